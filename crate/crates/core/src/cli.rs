//! Command-line front end. Reports go to stdout as JSON lines, diagnostics
//! to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{fragment_of, term_from_str, term_to_json, DiagramError, Fragment, Term};
use crate::gadgets::GadgetError;
use crate::interp::{interp_with_cap, Backend, InterpError, Matrix, DEFAULT_MAX_QUBITS};
use crate::normalform::{equal_with, lambda_map, normalize_with, render_nf, NfError};
use crate::rules::{builtin_rules, check_soundness, lemmas, meta, RuleError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Semantic(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::Parse { .. } => CliError::Parse(e.to_string()),
            DiagramError::Budget { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<InterpError> for CliError {
    fn from(e: InterpError) -> Self {
        match e {
            InterpError::Parse(_) => CliError::Parse(e.to_string()),
            InterpError::WidthCap { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::Interp(e) => e.into(),
            e => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<NfError> for CliError {
    fn from(e: NfError) -> Self {
        match e {
            NfError::Interp(e) => e.into(),
            NfError::Gadget(e) => e.into(),
            NfError::Parse(_) => CliError::Parse(e.to_string()),
            e => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        CliError::Semantic(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(name = "zxnf", version, about = "Exact ZX-calculus interpretation, normal forms and rule audits")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    /// Scalar backend; inferred from the angles when omitted.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Angle fragment: n for multiples of π/4n, or `real`.
    #[arg(long, global = true, value_parser = Fragment::parse)]
    pub fragment: Option<Fragment>,
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "max-qubits", global = true, default_value_t = DEFAULT_MAX_QUBITS)]
    pub max_qubits: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the matrix of a diagram.
    Interp { diagram: PathBuf },
    /// Print the normal form of a diagram.
    Normalize { diagram: PathBuf },
    /// Exit 0 when two diagrams denote the same map, 1 otherwise.
    Eq { left: PathBuf, right: PathBuf },
    /// Sample every built-in rule and check both sides agree.
    CheckRules,
    /// Build a normal-form diagram for a matrix.
    Synth { matrix: PathBuf },
    /// Run the angle-multiplier incompleteness argument.
    DemoIncompleteness {
        #[arg(long, default_value_t = 3)]
        p: u64,
    },
    /// Verify the lemma corpus, from a directory or the built-in list.
    LemmaCorpus {
        dir: Option<PathBuf>,
        /// Write the built-in corpus to this directory instead.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// Largest cyclotomic order the incompleteness demo will build.
pub const MAX_ORDER: u64 = 1024;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_diagram(text: &str) -> Result<Term, CliError> {
    Ok(term_from_str(text)?)
}

pub fn parse_matrix(text: &str) -> Result<Matrix, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(Matrix::from_json(&v)?)
}

impl Invocation {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(CliError::Semantic(format!("--tol must be a non-negative number, got {}", self.tol)));
        }
        if self.max_qubits == 0 || self.max_qubits > 30 {
            return Err(CliError::Semantic(format!("--max-qubits must be in 1..=30, got {}", self.max_qubits)));
        }
        if self.backend == Some(BackendArg::Exact) && self.fragment == Some(Fragment::Unrestricted) {
            return Err(CliError::Semantic("the exact backend needs a rational fragment".into()));
        }
        Ok(())
    }

    fn backend_for(&self, terms: &[&Term]) -> Result<Backend, CliError> {
        let inferred = terms
            .iter()
            .fold(Fragment::RationalPi { n: 1 }, |f, t| f.join(&fragment_of(t)));
        let fragment = self.fragment.map(|f| f.join(&inferred)).unwrap_or(inferred);
        match (self.backend, fragment.order()) {
            (Some(BackendArg::Float), _) => Ok(Backend::Float),
            (_, Some(order)) => Ok(Backend::Exact { order }),
            (Some(BackendArg::Exact), None) => {
                Err(CliError::Semantic("diagram has non-rational angles; use --backend float".into()))
            }
            (None, None) => Ok(Backend::Float),
        }
    }

    fn soundness_fragment(&self) -> Fragment {
        match (self.backend, self.fragment) {
            (Some(BackendArg::Float), _) => Fragment::Unrestricted,
            (_, Some(f)) => f,
            _ => Fragment::RationalPi { n: 1 },
        }
    }
}

fn line(out: &mut dyn Write, v: &Value) {
    // Output errors (a closed pipe) are not worth a distinct exit code.
    let _ = writeln!(out, "{v}");
}

/// Runs one invocation; returns the exit code.
pub fn execute(inv: &Invocation, out: &mut dyn Write) -> Result<i32, CliError> {
    inv.validate()?;
    let cap = inv.max_qubits;
    match &inv.command {
        Command::Interp { diagram } => {
            let t = parse_diagram(&read(diagram)?)?;
            let m = interp_with_cap(&t, inv.backend_for(&[&t])?, cap)?;
            line(out, &m.to_json());
            Ok(0)
        }
        Command::Normalize { diagram } => {
            let t = parse_diagram(&read(diagram)?)?;
            let nf = normalize_with(&t, inv.backend_for(&[&t])?, cap)?;
            line(out, &nf.to_json());
            Ok(0)
        }
        Command::Eq { left, right } => {
            let a = parse_diagram(&read(left)?)?;
            let b = parse_diagram(&read(right)?)?;
            let same = equal_with(&a, &b, inv.backend_for(&[&a, &b])?, inv.tol, cap)?;
            line(out, &json!({"equal": same}));
            Ok(if same { 0 } else { 1 })
        }
        Command::CheckRules => {
            let fragment = inv.soundness_fragment();
            let reports: Vec<_> = builtin_rules()
                .par_iter()
                .map(|r| check_soundness(r, inv.samples as usize, fragment, inv.seed))
                .collect();
            for r in &reports {
                line(out, &r.to_json());
            }
            let ok = reports.iter().all(|r| r.ok());
            line(out, &json!({"rules": reports.len(), "all_sound": ok}));
            Ok(if ok { 0 } else { 1 })
        }
        Command::Synth { matrix } => {
            let m = parse_matrix(&read(matrix)?)?;
            let width = m.rows().trailing_zeros() + m.cols().trailing_zeros();
            if width as usize > cap {
                return Err(CliError::Resource(format!("{width} qubits exceed the cap of {cap}")));
            }
            let t = render_nf(&lambda_map(&m)?)?;
            line(out, &term_to_json(&t));
            Ok(0)
        }
        Command::DemoIncompleteness { p } => {
            if p.saturating_mul(8) > MAX_ORDER {
                return Err(CliError::Resource(format!("order 8·{p} exceeds the cap of {MAX_ORDER}")));
            }
            let rep = meta::incompleteness_witness(*p, inv.samples as usize, inv.seed)?;
            line(out, &rep.to_json());
            Ok(if rep.holds() { 0 } else { 1 })
        }
        Command::LemmaCorpus { dir, emit } => {
            if let Some(target) = emit {
                let n = lemmas::emit(target).map_err(|e| CliError::Semantic(format!("{}: {e}", target.display())))?;
                line(out, &json!({"emitted": n, "dir": target.display().to_string()}));
                return Ok(0);
            }
            let eqs: Vec<lemmas::Loaded> = match dir {
                Some(d) => lemmas::load(d).map_err(|e| CliError::Parse(format!("{}: {e}", d.display())))?,
                None => lemmas::corpus().into_iter().map(|e| (lemmas::file_name(&e), Ok(e))).collect(),
            };
            let backend = match inv.backend {
                Some(BackendArg::Float) => Some(Backend::Float),
                _ => None,
            };
            let results: Vec<(String, Result<bool, String>)> = eqs
                .into_par_iter()
                .map(|(name, e)| (name, e.map(|e| meta::verify_equation(&e, backend))))
                .collect();
            let mut parse_failed = false;
            let mut all = true;
            for (name, r) in &results {
                match r {
                    Ok(v) => {
                        all &= *v;
                        line(out, &json!({"equation": name, "verified": v}));
                    }
                    Err(msg) => {
                        parse_failed = true;
                        eprintln!("{name}: {msg}");
                        line(out, &json!({"equation": name, "error": msg}));
                    }
                }
            }
            line(out, &json!({"equations": results.len(), "all_verified": all && !parse_failed}));
            if parse_failed {
                Ok(2)
            } else {
                Ok(if all { 0 } else { 1 })
            }
        }
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&inv, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zxnf: {e}");
            e.code()
        }
    }
}
