//! Wire-label builder for terms: gates are applied to named wires and the
//! builder inserts the permutations.

use super::term::Term;

pub type Wire = usize;

pub struct Circuit {
    wires: Vec<Wire>,
    next: Wire,
    term: Option<Term>,
    inputs: usize,
}

impl Circuit {
    /// A circuit with `n` input wires, labelled `0..n`.
    pub fn new(n: usize) -> Circuit {
        Circuit { wires: (0..n).collect(), next: n, term: None, inputs: n }
    }

    pub fn input(&self, i: usize) -> Wire {
        i
    }

    fn push(&mut self, layer: Term) {
        self.term = Some(match self.term.take() {
            None => layer,
            Some(t) => t.then(&layer),
        });
    }

    fn fresh(&mut self, k: usize) -> Vec<Wire> {
        let v = (self.next..self.next + k).collect();
        self.next += k;
        v
    }

    /// Applies `gate` to the given wires (in order) and returns the labels of
    /// its output wires.
    pub fn apply(&mut self, gate: &Term, on: &[Wire]) -> Vec<Wire> {
        assert_eq!(gate.inputs(), on.len(), "gate arity");
        let pos: Vec<usize> = on
            .iter()
            .map(|w| self.wires.iter().position(|x| x == w).expect("unknown or consumed wire"))
            .collect();
        let start = pos.iter().copied().min().unwrap_or(self.wires.len());
        let others: Vec<usize> = (0..self.wires.len()).filter(|p| !pos.contains(p)).collect();
        let before: Vec<usize> = others.iter().copied().filter(|&p| p < start).collect();
        let after: Vec<usize> = others.iter().copied().filter(|&p| p > start).collect();
        let mut perm = before.clone();
        perm.extend(&pos);
        perm.extend(&after);
        if perm.iter().enumerate().any(|(j, &i)| i != j) {
            self.push(Term::permutation(&perm));
        }
        self.push(gate.padded(before.len(), after.len()));
        let outs = self.fresh(gate.outputs());
        let mut next: Vec<Wire> = before.iter().map(|&p| self.wires[p]).collect();
        next.extend(&outs);
        next.extend(after.iter().map(|&p| self.wires[p]));
        self.wires = next;
        outs
    }

    /// Single-output convenience.
    pub fn apply1(&mut self, gate: &Term, on: &[Wire]) -> Wire {
        let o = self.apply(gate, on);
        assert_eq!(o.len(), 1);
        o[0]
    }

    /// Finishes with the remaining wires permuted into the given order; every
    /// open wire must be listed.
    pub fn finish(mut self, outputs: &[Wire]) -> Term {
        assert_eq!(outputs.len(), self.wires.len(), "all open wires must be outputs");
        let perm: Vec<usize> = outputs
            .iter()
            .map(|w| self.wires.iter().position(|x| x == w).expect("unknown output wire"))
            .collect();
        if perm.iter().enumerate().any(|(j, &i)| i != j) {
            self.push(Term::permutation(&perm));
        }
        self.term.unwrap_or_else(|| Term::wires(self.inputs))
    }
}
