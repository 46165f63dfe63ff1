//! ZX terms, their open-graph view, fragments and the JSON exchange format.

pub mod angle;
pub mod circuit;
pub mod graph;
pub mod term;

use num_integer::Integer;
use serde_json::{json, Value};
use thiserror::Error;

pub use angle::Angle;
pub use graph::{from_graph, graph_equal, to_graph, End, OpenGraph, VertexKind};
pub use term::{Generator, Term, TermKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("cannot compose: first has {first_outputs} outputs, then has {then_inputs} inputs")]
    Arity { first_outputs: usize, then_inputs: usize },
    #[error("graph has {vertices} vertices, over the budget of {budget}")]
    Budget { vertices: usize, budget: usize },
    #[error("malformed graph: {0}")]
    Graph(String),
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },
}

/// Angle groups the engine works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    /// Multiples of `π/(4n)`; ring order `8n`.
    RationalPi { n: u64 },
    /// Multiples of `π/2^k`, `k ≥ 2`; ring order `2^{k+1}`.
    DyadicPi { k: u32 },
    Unrestricted,
}

impl Fragment {
    /// Order `N` of the root of unity of the matching exact ring.
    pub fn order(&self) -> Option<u64> {
        match *self {
            Fragment::RationalPi { n } => Some(8 * n),
            Fragment::DyadicPi { k } => Some(1 << (k + 1)),
            Fragment::Unrestricted => None,
        }
    }

    pub fn from_order(order: u64) -> Fragment {
        assert!(order >= 8 && order % 8 == 0);
        let n = order / 8;
        if n > 1 && n.is_power_of_two() {
            Fragment::DyadicPi { k: (4 * n).trailing_zeros() }
        } else {
            Fragment::RationalPi { n }
        }
    }

    /// Smallest fragment containing both.
    pub fn join(&self, other: &Fragment) -> Fragment {
        match (self.order(), other.order()) {
            (Some(a), Some(b)) => Fragment::from_order(a.lcm(&b)),
            _ => Fragment::Unrestricted,
        }
    }

    pub fn contains_angle(&self, a: &Angle) -> bool {
        match self.order() {
            None => true,
            Some(o) => a.root_exponent(o).is_some(),
        }
    }

    /// The generating angle `π/(4n)` (or `π/2^k`) of an exact fragment.
    pub fn unit_angle(&self) -> Option<Angle> {
        self.order().map(|o| Angle::pi_frac(2, o as i64))
    }

    pub fn parse(s: &str) -> Result<Fragment, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("real") || s.eq_ignore_ascii_case("unrestricted") {
            return Ok(Fragment::Unrestricted);
        }
        let n: u64 = s.parse().map_err(|_| format!("bad fragment `{s}`: expected n ≥ 1 or `real`"))?;
        if n == 0 {
            return Err("fragment n must be ≥ 1".into());
        }
        Ok(Fragment::from_order(8 * n))
    }
}

pub fn fragment_of(t: &Term) -> Fragment {
    let mut l: i64 = 4;
    for a in t.angles() {
        match a.denominator() {
            Some(d) => l = l.lcm(&d),
            None => return Fragment::Unrestricted,
        }
    }
    Fragment::from_order(2 * l as u64)
}

// ---------------------------------------------------------------------------
// JSON

pub fn term_to_json(t: &Term) -> Value {
    match t.kind() {
        TermKind::Tensor(a, b) => json!({"tensor": [term_to_json(a), term_to_json(b)]}),
        TermKind::Compose(a, b) => json!({"compose": [term_to_json(a), term_to_json(b)]}),
        TermKind::Gen(g) => match g {
            Generator::Z { inputs, outputs, phase } => json!({"Z": spider_json(*inputs, *outputs, phase)}),
            Generator::X { inputs, outputs, phase } => json!({"X": spider_json(*inputs, *outputs, phase)}),
            Generator::H => json!("H"),
            Generator::Id => json!("Id"),
            Generator::Swap => json!("Swap"),
            Generator::Cup => json!("Cup"),
            Generator::Cap => json!("Cap"),
            Generator::Empty => json!("Empty"),
        },
    }
}

fn spider_json(i: usize, o: usize, a: &Angle) -> Value {
    let phase = match a.fraction_string() {
        Some(s) => json!(s),
        None => json!({"rad": a.radians()}),
    };
    json!({"in": i, "out": o, "phase": phase})
}

pub fn term_from_json(v: &Value) -> Result<Term, DiagramError> {
    parse_term(v, "$")
}

pub fn term_from_str(s: &str) -> Result<Term, DiagramError> {
    let v: Value = serde_json::from_str(s).map_err(|e| DiagramError::Parse { path: "$".into(), msg: e.to_string() })?;
    term_from_json(&v)
}

fn perr(path: &str, msg: impl Into<String>) -> DiagramError {
    DiagramError::Parse { path: path.to_string(), msg: msg.into() }
}

fn parse_term(v: &Value, path: &str) -> Result<Term, DiagramError> {
    match v {
        Value::String(s) => match s.as_str() {
            "H" => Ok(Term::h()),
            "Id" => Ok(Term::id()),
            "Swap" => Ok(Term::swap()),
            "Cup" => Ok(Term::cup()),
            "Cap" => Ok(Term::cap()),
            "Empty" => Ok(Term::empty()),
            other => Err(perr(path, format!("unknown generator `{other}`"))),
        },
        Value::Object(m) if m.len() == 1 => {
            let (k, body) = m.iter().next().unwrap();
            let sub = format!("{path}.{k}");
            match k.as_str() {
                "Z" | "X" => {
                    let (i, o, a) = parse_spider(body, &sub)?;
                    Ok(if k == "Z" { Term::z(i, o, a) } else { Term::x(i, o, a) })
                }
                "tensor" | "compose" => {
                    let arr = body.as_array().filter(|a| a.len() == 2).ok_or_else(|| perr(&sub, "expected a two-element array"))?;
                    let a = parse_term(&arr[0], &format!("{sub}[0]"))?;
                    let b = parse_term(&arr[1], &format!("{sub}[1]"))?;
                    if k == "tensor" {
                        Ok(Term::tensor(&a, &b))
                    } else {
                        Term::compose(&a, &b).map_err(|e| perr(&sub, e.to_string()))
                    }
                }
                other => Err(perr(path, format!("unknown key `{other}`"))),
            }
        }
        _ => Err(perr(path, "expected a generator name or a single-key object")),
    }
}

fn parse_spider(v: &Value, path: &str) -> Result<(usize, usize, Angle), DiagramError> {
    let arity = |key: &str| -> Result<usize, DiagramError> {
        v.get(key)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| perr(&format!("{path}.{key}"), "expected a non-negative integer"))
    };
    let i = arity("in")?;
    let o = arity("out")?;
    let ppath = format!("{path}.phase");
    let a = match v.get("phase") {
        None => Angle::zero(),
        Some(Value::String(s)) => Angle::parse_fraction(s).map_err(|m| perr(&ppath, m))?,
        Some(Value::Number(n)) if n.is_i64() => Angle::pi_frac(n.as_i64().unwrap(), 1),
        Some(Value::Object(m)) => {
            let r = m.get("rad").and_then(Value::as_f64).ok_or_else(|| perr(&ppath, "expected {\"rad\": number}"))?;
            if !r.is_finite() {
                return Err(perr(&ppath, "radians must be finite"));
            }
            Angle::real(r)
        }
        Some(_) => return Err(perr(&ppath, "expected a fraction string or {\"rad\": x}")),
    };
    Ok((i, o, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments() {
        let t = Term::z(1, 1, Angle::pi_frac(1, 4)).then(&Term::x(1, 1, Angle::pi_frac(1, 2)));
        assert_eq!(fragment_of(&t), Fragment::RationalPi { n: 1 });
        assert_eq!(fragment_of(&t).order(), Some(8));
        let t = Term::z(1, 1, Angle::pi_frac(1, 3));
        assert_eq!(fragment_of(&t), Fragment::RationalPi { n: 3 });
        assert_eq!(fragment_of(&t).order(), Some(24));
        assert_eq!(fragment_of(&Term::z(0, 0, Angle::real(1.0))), Fragment::Unrestricted);
        assert_eq!(fragment_of(&Term::z(1, 1, Angle::pi_frac(1, 8))), Fragment::DyadicPi { k: 3 });
        assert_eq!(Fragment::DyadicPi { k: 3 }.order(), Some(16));
        assert_eq!(Fragment::RationalPi { n: 1 }.join(&Fragment::RationalPi { n: 3 }), Fragment::RationalPi { n: 3 });
    }

    #[test]
    fn json_round_trip() {
        let t = Term::z(1, 2, Angle::pi_frac(1, 4))
            .then(&Term::h().par(&Term::x(1, 1, Angle::real(0.5))))
            .then(&Term::cup());
        let back = term_from_json(&term_to_json(&t)).unwrap();
        assert_eq!(back, t);
        let z: Term = term_from_str(r#"{"Z":{"in":1,"out":2,"phase":"1/4"}}"#).unwrap();
        assert_eq!(z, Term::z(1, 2, Angle::pi_frac(1, 4)));
    }

    #[test]
    fn json_errors_carry_paths() {
        let e = term_from_str(r#"{"compose":["H",{"Z":{"in":1,"out":1,"phase":"1/x"}}]}"#).unwrap_err();
        match e {
            DiagramError::Parse { path, .. } => assert_eq!(path, "$.compose[1].Z.phase"),
            other => panic!("{other:?}"),
        }
        assert!(term_from_str(r#"{"compose":["H","Cup"]}"#).is_err());
        assert!(term_from_str("[").is_err());
    }
}
