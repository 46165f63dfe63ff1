pub mod cyclotomic;
pub mod diagram;
pub mod interp;
pub mod gadgets;
pub mod normalform;
pub mod rules;
pub mod cli;
