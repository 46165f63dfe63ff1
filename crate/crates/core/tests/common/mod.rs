#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use zxnf::cyclotomic::{DyadicCyclotomic, IntPolynomial};
use zxnf::diagram::circuit::Circuit;
use zxnf::diagram::{from_graph, to_graph, Angle, Fragment, Term};
use zxnf::interp::{Matrix, Scalar};
use zxnf::rules::{apply_rule, builtin_rules, find_matches, Direction};

pub fn random_angle(rng: &mut impl Rng, den: i64) -> Angle {
    Angle::pi_frac(rng.gen_range(0..2 * den), den)
}

/// A random diagram with at most `gens` spiders and Hadamards, phases in
/// multiples of `π/den`, at most `max_in` inputs.
pub fn random_term(rng: &mut impl Rng, gens: usize, den: i64, max_in: usize) -> Term {
    let n = rng.gen_range(0..=max_in);
    let mut c = Circuit::new(n);
    let mut wires: Vec<usize> = (0..n).collect();
    for _ in 0..rng.gen_range(1..=gens) {
        let a = random_angle(rng, den);
        let z = rng.gen_bool(0.5);
        let sp = |i, o| if z { Term::z(i, o, a) } else { Term::x(i, o, a) };
        let pick = |rng: &mut dyn rand::RngCore, ws: &mut Vec<usize>| ws.remove(rng.gen_range(0..ws.len()));
        match rng.gen_range(0..6) {
            0 if !wires.is_empty() => {
                let w = pick(rng, &mut wires);
                wires.push(c.apply1(&sp(1, 1), &[w]));
            }
            1 if !wires.is_empty() => {
                let w = pick(rng, &mut wires);
                wires.push(c.apply1(&Term::h(), &[w]));
            }
            2 if !wires.is_empty() && wires.len() < 3 => {
                let w = pick(rng, &mut wires);
                wires.extend(c.apply(&sp(1, 2), &[w]));
            }
            3 if wires.len() >= 2 => {
                let a = pick(rng, &mut wires);
                let b = pick(rng, &mut wires);
                wires.push(c.apply1(&sp(2, 1), &[a, b]));
            }
            4 if wires.len() >= 2 => {
                let w = pick(rng, &mut wires);
                c.apply(&sp(1, 0), &[w]);
            }
            _ if wires.len() < 3 => wires.push(c.apply1(&sp(0, 1), &[])),
            _ => {
                let w = pick(rng, &mut wires);
                wires.push(c.apply1(&sp(1, 1), &[w]));
            }
        }
    }
    wires.shuffle(rng);
    c.finish(&wires)
}

/// Applies `steps` random rule instances whose angles stay in the fragment.
/// Returns the rewritten term and the labels of the rules used.
pub fn random_rewrites(rng: &mut impl Rng, t: &Term, steps: usize, fragment: Fragment) -> (Term, Vec<String>) {
    let rules = builtin_rules();
    let mut g = to_graph(t);
    let mut used = Vec::new();
    while used.len() < steps {
        let mut options: Vec<(usize, Direction)> = (0..rules.len())
            .flat_map(|i| [(i, Direction::Forward), (i, Direction::Backward)])
            .collect();
        options.shuffle(rng);
        let mut applied = false;
        for (i, dir) in options {
            let r = &rules[i];
            let ms: Vec<_> = find_matches(&g, r, dir)
                .into_iter()
                .filter(|m| m.angles.iter().flatten().all(|a| fragment.contains_angle(a)))
                .collect();
            if ms.is_empty() {
                continue;
            }
            let m = &ms[rng.gen_range(0..ms.len())];
            g = apply_rule(&g, r, m, dir).expect("matched site applies");
            used.push(format!("{}{}", r.label(), if dir == Direction::Forward { "" } else { "<-" }));
            applied = true;
            break;
        }
        if !applied {
            break;
        }
    }
    (from_graph(&g), used)
}

pub fn random_ring(rng: &mut impl Rng, order: u64, max_p: u32, coeff: i64) -> DyadicCyclotomic {
    let deg = rng.gen_range(1..=order as usize / 2);
    let cs: Vec<i64> = (0..deg).map(|_| rng.gen_range(-coeff..=coeff)).collect();
    DyadicCyclotomic::canonicalize(order, rng.gen_range(0..=max_p), IntPolynomial::from_i64s(&cs)).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, order: u64, max_qubits: u32) -> Matrix {
    let rows = 1usize << rng.gen_range(0..=max_qubits);
    let cols = 1usize << rng.gen_range(0..=max_qubits);
    let data = (0..rows * cols).map(|_| random_ring(rng, order, 3, 8)).collect();
    Matrix::from_exact(rows, cols, order, data).unwrap()
}

pub fn random_state(rng: &mut impl Rng, order: u64, n: u32) -> Vec<Scalar> {
    (0..1usize << n).map(|_| Scalar::Exact(random_ring(rng, order, 2, 4))).collect()
}
