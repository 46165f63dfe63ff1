use std::fmt;
use std::sync::Arc;

use super::angle::Angle;
use super::DiagramError;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Z { inputs: usize, outputs: usize, phase: Angle },
    X { inputs: usize, outputs: usize, phase: Angle },
    H,
    Id,
    Swap,
    Cup,
    Cap,
    Empty,
}

impl Generator {
    pub fn arity(&self) -> (usize, usize) {
        match *self {
            Generator::Z { inputs, outputs, .. } | Generator::X { inputs, outputs, .. } => (inputs, outputs),
            Generator::H | Generator::Id => (1, 1),
            Generator::Swap => (2, 2),
            Generator::Cup => (2, 0),
            Generator::Cap => (0, 2),
            Generator::Empty => (0, 0),
        }
    }

    pub fn phase(&self) -> Option<Angle> {
        match self {
            Generator::Z { phase, .. } | Generator::X { phase, .. } => Some(*phase),
            _ => None,
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum TermKind {
    Gen(Generator),
    Tensor(Term, Term),
    /// `Compose(first, then)`: `first` is applied first.
    Compose(Term, Term),
}

#[derive(Debug)]
pub struct Node {
    pub kind: TermKind,
    pub inputs: usize,
    pub outputs: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Node) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs && self.kind == other.kind
    }
}

/// A ZX term. Cloning is cheap; shared subterms keep their identity, which the
/// interpreter uses for memoization.
#[derive(Clone, Debug)]
pub struct Term(Arc<Node>);

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Term {
    fn gen(g: Generator) -> Term {
        let (inputs, outputs) = g.arity();
        Term(Arc::new(Node { kind: TermKind::Gen(g), inputs, outputs }))
    }

    pub fn z(inputs: usize, outputs: usize, phase: Angle) -> Term {
        Self::gen(Generator::Z { inputs, outputs, phase })
    }

    pub fn x(inputs: usize, outputs: usize, phase: Angle) -> Term {
        Self::gen(Generator::X { inputs, outputs, phase })
    }

    pub fn h() -> Term {
        Self::gen(Generator::H)
    }

    pub fn id() -> Term {
        Self::gen(Generator::Id)
    }

    pub fn swap() -> Term {
        Self::gen(Generator::Swap)
    }

    pub fn cup() -> Term {
        Self::gen(Generator::Cup)
    }

    pub fn cap() -> Term {
        Self::gen(Generator::Cap)
    }

    pub fn empty() -> Term {
        Self::gen(Generator::Empty)
    }

    pub fn generator(g: Generator) -> Term {
        Self::gen(g)
    }

    pub fn tensor(a: &Term, b: &Term) -> Term {
        Term(Arc::new(Node {
            kind: TermKind::Tensor(a.clone(), b.clone()),
            inputs: a.inputs() + b.inputs(),
            outputs: a.outputs() + b.outputs(),
        }))
    }

    /// `b ∘ a`: the outputs of `a` feed the inputs of `b`.
    pub fn compose(a: &Term, b: &Term) -> Result<Term, DiagramError> {
        if a.outputs() != b.inputs() {
            return Err(DiagramError::Arity { first_outputs: a.outputs(), then_inputs: b.inputs() });
        }
        Ok(Term(Arc::new(Node {
            kind: TermKind::Compose(a.clone(), b.clone()),
            inputs: a.inputs(),
            outputs: b.outputs(),
        })))
    }

    /// `next ∘ self` for arities known to match; panics otherwise.
    pub fn then(&self, next: &Term) -> Term {
        Term::compose(self, next).unwrap_or_else(|e| panic!("{e}"))
    }

    /// `self ⊗ other`.
    pub fn par(&self, other: &Term) -> Term {
        Term::tensor(self, other)
    }

    /// `Id^{⊗n}`, with `Empty` for `n = 0`.
    pub fn wires(n: usize) -> Term {
        match n {
            0 => Term::empty(),
            _ => Term::tensor_all((0..n).map(|_| Term::id())),
        }
    }

    /// Left-nested tensor of the items; `Empty` when there are none.
    pub fn tensor_all<I: IntoIterator<Item = Term>>(items: I) -> Term {
        items.into_iter().reduce(|a, b| Term::tensor(&a, &b)).unwrap_or_else(Term::empty)
    }

    /// `Id^{⊗before} ⊗ self ⊗ Id^{⊗after}`, omitting empty identities.
    pub fn padded(&self, before: usize, after: usize) -> Term {
        let mut t = self.clone();
        if before > 0 {
            t = Term::wires(before).par(&t);
        }
        if after > 0 {
            t = t.par(&Term::wires(after));
        }
        t
    }

    /// Wire permutation: output `j` carries input `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Term {
        let n = perm.len();
        let mut cur: Vec<usize> = (0..n).collect();
        let mut layers = Vec::new();
        // Bubble sort from the identity arrangement towards `perm`.
        let target_pos: Vec<usize> = {
            let mut pos = vec![0; n];
            for (j, &i) in perm.iter().enumerate() {
                pos[i] = j;
            }
            pos
        };
        loop {
            let mut swapped = false;
            for k in 0..n.saturating_sub(1) {
                if target_pos[cur[k]] > target_pos[cur[k + 1]] {
                    cur.swap(k, k + 1);
                    layers.push(Term::swap().padded(k, n - k - 2));
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        layers.into_iter().reduce(|a, b| a.then(&b)).unwrap_or_else(|| Term::wires(n))
    }

    pub fn inputs(&self) -> usize {
        self.0.inputs
    }

    pub fn outputs(&self) -> usize {
        self.0.outputs
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn as_generator(&self) -> Option<&Generator> {
        match &self.0.kind {
            TermKind::Gen(g) => Some(g),
            _ => None,
        }
    }

    /// Number of generator leaves (shared subterms counted each time).
    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::Gen(_) => 1,
            TermKind::Tensor(a, b) | TermKind::Compose(a, b) => a.size() + b.size(),
        }
    }

    pub fn angles(&self) -> Vec<Angle> {
        let mut out = Vec::new();
        self.visit_generators(&mut |g| {
            if let Some(a) = g.phase() {
                out.push(a);
            }
        });
        out
    }

    pub fn visit_generators(&self, f: &mut impl FnMut(&Generator)) {
        match self.kind() {
            TermKind::Gen(g) => f(g),
            TermKind::Tensor(a, b) | TermKind::Compose(a, b) => {
                a.visit_generators(f);
                b.visit_generators(f);
            }
        }
    }

    /// Rebuilds the term with every generator replaced by `f(g)`; the
    /// replacement must keep the generator's arity.
    pub fn map_generators(&self, f: &impl Fn(&Generator) -> Term) -> Term {
        let mut memo = std::collections::HashMap::new();
        self.map_gen_memo(f, &mut memo)
    }

    fn map_gen_memo(&self, f: &impl Fn(&Generator) -> Term, memo: &mut std::collections::HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&self.ptr_id()) {
            return t.clone();
        }
        let t = match self.kind() {
            TermKind::Gen(g) => f(g),
            TermKind::Tensor(a, b) => Term::tensor(&a.map_gen_memo(f, memo), &b.map_gen_memo(f, memo)),
            TermKind::Compose(a, b) => a.map_gen_memo(f, memo).then(&b.map_gen_memo(f, memo)),
        };
        memo.insert(self.ptr_id(), t.clone());
        t
    }

    pub fn map_angles(&self, f: &impl Fn(Angle) -> Angle) -> Term {
        self.map_generators(&|g| match g {
            Generator::Z { inputs, outputs, phase } => Term::z(*inputs, *outputs, f(*phase)),
            Generator::X { inputs, outputs, phase } => Term::x(*inputs, *outputs, f(*phase)),
            other => Term::gen(other.clone()),
        })
    }

    /// Swaps the roles of Z and X spiders.
    pub fn colour_swap(&self) -> Term {
        self.map_generators(&|g| match g {
            Generator::Z { inputs, outputs, phase } => Term::x(*inputs, *outputs, *phase),
            Generator::X { inputs, outputs, phase } => Term::z(*inputs, *outputs, *phase),
            other => Term::gen(other.clone()),
        })
    }

    fn flip(&self, negate: bool) -> Term {
        match self.kind() {
            TermKind::Gen(g) => Term::gen(match g {
                Generator::Z { inputs, outputs, phase } => Generator::Z {
                    inputs: *outputs,
                    outputs: *inputs,
                    phase: if negate { phase.neg() } else { *phase },
                },
                Generator::X { inputs, outputs, phase } => Generator::X {
                    inputs: *outputs,
                    outputs: *inputs,
                    phase: if negate { phase.neg() } else { *phase },
                },
                Generator::Cup => Generator::Cap,
                Generator::Cap => Generator::Cup,
                other => other.clone(),
            }),
            TermKind::Tensor(a, b) => Term::tensor(&a.flip(negate), &b.flip(negate)),
            TermKind::Compose(a, b) => b.flip(negate).then(&a.flip(negate)),
        }
    }

    /// Dagger: upside-down with negated phases.
    pub fn adjoint(&self) -> Term {
        self.flip(true)
    }

    /// Upside-down without touching phases.
    pub fn transpose(&self) -> Term {
        self.flip(false)
    }

    /// The `(n+m)`-output state obtained by bending every input up with caps,
    /// ordered inputs first (Choi order).
    pub fn bent(&self) -> Term {
        let n = self.inputs();
        if n == 0 {
            return self.clone();
        }
        // Caps produce pairs (a_i, b_i); b_i feed the term, a_i stay as outputs.
        let caps = Term::tensor_all((0..n).map(|_| Term::cap()));
        let mut perm = Vec::with_capacity(2 * n);
        for i in 0..n {
            perm.push(2 * i);
        }
        for i in 0..n {
            perm.push(2 * i + 1);
        }
        caps.then(&Term::permutation(&perm)).then(&self.padded(n, 0))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Gen(g) => match g {
                Generator::Z { inputs, outputs, phase } => write!(f, "Z{inputs}{outputs}({phase})"),
                Generator::X { inputs, outputs, phase } => write!(f, "X{inputs}{outputs}({phase})"),
                other => write!(f, "{other:?}"),
            },
            TermKind::Tensor(a, b) => write!(f, "({a} ⊗ {b})"),
            TermKind::Compose(a, b) => write!(f, "({a} ; {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities() {
        assert_eq!(Term::id().par(&Term::id()).inputs(), 2);
        let t = Term::compose(&Term::z(1, 2, Angle::zero()), &Term::cup()).unwrap();
        assert_eq!((t.inputs(), t.outputs()), (1, 0));
        assert_eq!(
            Term::compose(&Term::h(), &Term::cup()),
            Err(DiagramError::Arity { first_outputs: 1, then_inputs: 2 })
        );
    }

    #[test]
    fn flips() {
        let z = Term::z(1, 1, Angle::pi_frac(1, 4));
        assert_eq!(z.adjoint(), Term::z(1, 1, Angle::pi_frac(7, 4)));
        assert_eq!(Term::h().adjoint(), Term::h());
        assert_eq!(Term::cap().transpose(), Term::cup());
        let t = Term::z(2, 1, Angle::pi_frac(1, 2)).then(&Term::x(1, 3, Angle::zero()));
        assert_eq!((t.transpose().inputs(), t.transpose().outputs()), (3, 2));
    }

    #[test]
    fn permutation_arity() {
        let p = Term::permutation(&[2, 0, 1]);
        assert_eq!((p.inputs(), p.outputs()), (3, 3));
        assert_eq!(Term::permutation(&[0, 1]), Term::wires(2));
    }
}
