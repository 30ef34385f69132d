//! Systems of logically connected events and their correlation polytopes.
//!
//! An [`EventSystem`] has `n_atoms` independent atomic events and a list of
//! derived events, each a Boolean expression over the atoms. Its consistent
//! 0/1 assignments are the vertices of the correlation polytope; the facets
//! of that polytope are the linear conditions a vector of relative
//! frequencies must satisfy to come from a single probability space.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::{self, HPolytope, PolytopeError, VPolytope, MAX_DIM};
use crate::rational;

/// Exhaustive enumeration is capped at 2^24 atom assignments.
pub const MAX_ATOMS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventsError {
    #[error("{n_atoms} atoms exceed the enumeration bound {max}")]
    AtomBoundExceeded { n_atoms: usize, max: usize },
    #[error("dimension {dim} exceeds the facet enumeration bound {max}")]
    DimensionBoundExceeded { dim: usize, max: usize },
    #[error("vector has length {found}, system has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("derived event {index} references atom {atom} but the system has {n_atoms} atoms")]
    InvalidAtom { index: usize, atom: usize, n_atoms: usize },
    #[error("derived event {index}: {reason}")]
    MalformedExpr { index: usize, reason: String },
    #[error("an event system needs at least one event")]
    Empty,
    #[error("invalid event system JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Boolean expression over atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicalExpr {
    Atom(usize),
    Not(Box<LogicalExpr>),
    And(Vec<LogicalExpr>),
    Or(Vec<LogicalExpr>),
}

impl LogicalExpr {
    pub fn atom(i: usize) -> Self {
        LogicalExpr::Atom(i)
    }

    pub fn and(items: Vec<LogicalExpr>) -> Self {
        LogicalExpr::And(items)
    }

    pub fn or(items: Vec<LogicalExpr>) -> Self {
        LogicalExpr::Or(items)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: LogicalExpr) -> Self {
        LogicalExpr::Not(Box::new(e))
    }

    pub fn eval(&self, atoms: &[bool]) -> bool {
        match self {
            LogicalExpr::Atom(i) => atoms[*i],
            LogicalExpr::Not(e) => !e.eval(atoms),
            LogicalExpr::And(es) => es.iter().all(|e| e.eval(atoms)),
            LogicalExpr::Or(es) => es.iter().any(|e| e.eval(atoms)),
        }
    }

    fn validate(&self, n_atoms: usize, index: usize) -> Result<(), EventsError> {
        match self {
            LogicalExpr::Atom(a) if *a >= n_atoms => Err(EventsError::InvalidAtom {
                index,
                atom: *a,
                n_atoms,
            }),
            LogicalExpr::Atom(_) => Ok(()),
            LogicalExpr::Not(e) => e.validate(n_atoms, index),
            LogicalExpr::And(es) | LogicalExpr::Or(es) => {
                if es.len() < 2 {
                    return Err(EventsError::MalformedExpr {
                        index,
                        reason: "and/or need at least two operands".into(),
                    });
                }
                es.iter().try_for_each(|e| e.validate(n_atoms, index))
            }
        }
    }
}

impl fmt::Display for LogicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicalExpr::Atom(i) => write!(f, "E{}", i + 1),
            LogicalExpr::Not(e) => write!(f, "¬{e}"),
            LogicalExpr::And(es) | LogicalExpr::Or(es) => {
                let op = if matches!(self, LogicalExpr::And(_)) { " ∧ " } else { " ∨ " };
                f.write_str("(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// JSON form: atoms are bare integers, operators are arrays headed by
// "and" / "or" / "not", e.g. ["and", 0, ["not", 1]].
impl Serialize for LogicalExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LogicalExpr::Atom(i) => s.serialize_u64(*i as u64),
            LogicalExpr::Not(e) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element("not")?;
                seq.serialize_element(e.as_ref())?;
                seq.end()
            }
            LogicalExpr::And(es) | LogicalExpr::Or(es) => {
                let op = if matches!(self, LogicalExpr::And(_)) { "and" } else { "or" };
                let mut seq = s.serialize_seq(Some(es.len() + 1))?;
                seq.serialize_element(op)?;
                for e in es {
                    seq.serialize_element(e)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for LogicalExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExprVisitor;

        impl<'de> Visitor<'de> for ExprVisitor {
            type Value = LogicalExpr;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an atom index or an [\"and\"|\"or\"|\"not\", ...] array")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LogicalExpr, E> {
                Ok(LogicalExpr::Atom(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LogicalExpr, E> {
                usize::try_from(v)
                    .map(LogicalExpr::Atom)
                    .map_err(|_| E::custom(format!("negative atom index {v}")))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<LogicalExpr, A::Error> {
                let op: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("empty expression array"))?;
                let mut args = Vec::new();
                while let Some(e) = seq.next_element::<LogicalExpr>()? {
                    args.push(e);
                }
                match op.as_str() {
                    "not" => {
                        if args.len() != 1 {
                            return Err(de::Error::custom("\"not\" takes exactly one operand"));
                        }
                        Ok(LogicalExpr::not(args.pop().expect("one operand")))
                    }
                    "and" => Ok(LogicalExpr::And(args)),
                    "or" => Ok(LogicalExpr::Or(args)),
                    other => Err(de::Error::custom(format!("unknown operator {other:?}"))),
                }
            }
        }

        d.deserialize_any(ExprVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventSystem {
    #[serde(rename = "atoms")]
    n_atoms: usize,
    derived: Vec<LogicalExpr>,
}

impl EventSystem {
    pub fn new(n_atoms: usize, derived: Vec<LogicalExpr>) -> Result<Self, EventsError> {
        if n_atoms == 0 && derived.is_empty() {
            return Err(EventsError::Empty);
        }
        for (i, e) in derived.iter().enumerate() {
            e.validate(n_atoms, i)?;
        }
        Ok(EventSystem { n_atoms, derived })
    }

    /// Atoms `A1, A2, B1, B2` (indices 0..4) with the four cross conjunctions
    /// `A1∧B1, A1∧B2, A2∧B1, A2∧B2`.
    pub fn chsh() -> Self {
        let conj = |a, b| LogicalExpr::and(vec![LogicalExpr::atom(a), LogicalExpr::atom(b)]);
        EventSystem::new(4, vec![conj(0, 2), conj(0, 3), conj(1, 2), conj(1, 3)])
            .expect("valid system")
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn derived(&self) -> &[LogicalExpr] {
        &self.derived
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + self.derived.len()
    }

    /// Coordinate names: `p1..pn` for atoms, `p13` for the conjunction of
    /// atoms 1 and 3, and `q1, q2, …` for any other derived event.
    pub fn coordinate_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.n_atoms).map(|i| format!("p{i}")).collect();
        let mut other = 0;
        for e in &self.derived {
            let atoms: Option<Vec<usize>> = match e {
                LogicalExpr::And(items) => items
                    .iter()
                    .map(|x| match x {
                        LogicalExpr::Atom(i) => Some(i + 1),
                        _ => None,
                    })
                    .collect(),
                _ => None,
            };
            match atoms {
                Some(ix) if self.n_atoms < 10 => {
                    names.push(format!("p{}", ix.iter().map(usize::to_string).collect::<String>()))
                }
                Some(ix) => names.push(format!(
                    "p{}",
                    ix.iter().map(usize::to_string).collect::<Vec<_>>().join("_")
                )),
                None => {
                    other += 1;
                    names.push(format!("q{other}"));
                }
            }
        }
        names
    }

    pub fn from_json(s: &str) -> Result<Self, EventsError> {
        #[derive(Deserialize)]
        struct Raw {
            atoms: usize,
            #[serde(default)]
            derived: Vec<LogicalExpr>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| EventsError::Json(e.to_string()))?;
        EventSystem::new(raw.atoms, raw.derived)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    fn vector_for(&self, atoms: &[bool]) -> ZeroOneVector {
        let mut bits: Vec<u8> = atoms.iter().map(|&b| b as u8).collect();
        bits.extend(self.derived.iter().map(|e| e.eval(atoms) as u8));
        ZeroOneVector(bits)
    }
}

/// An extremal probability assignment: one 0/1 entry per event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZeroOneVector(pub Vec<u8>);

impl ZeroOneVector {
    pub fn to_rationals(&self) -> Vec<rational::Rational> {
        self.0.iter().map(|&b| rational::int(b as i64)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|b| b.to_string()).collect()
    }
}

/// All consistent 0/1 vectors of the system, sorted lexicographically.
pub fn enumerate_vertices(sys: &EventSystem) -> Result<Vec<ZeroOneVector>, EventsError> {
    let n = sys.n_atoms;
    if n > MAX_ATOMS {
        return Err(EventsError::AtomBoundExceeded {
            n_atoms: n,
            max: MAX_ATOMS,
        });
    }
    // Counting upward with atom 0 as the most significant bit visits the
    // atom prefixes in lexicographic order; atoms determine the rest.
    let mut out = Vec::with_capacity(1 << n);
    let mut atoms = vec![false; n];
    for code in 0u32..(1u32 << n) {
        for (i, a) in atoms.iter_mut().enumerate() {
            *a = (code >> (n - 1 - i)) & 1 == 1;
        }
        out.push(sys.vector_for(&atoms));
    }
    out.dedup();
    Ok(out)
}

pub fn is_consistent(sys: &EventSystem, v: &ZeroOneVector) -> Result<bool, EventsError> {
    if v.0.len() != sys.dim() {
        return Err(EventsError::DimensionMismatch {
            expected: sys.dim(),
            found: v.0.len(),
        });
    }
    if v.0.iter().any(|&b| b > 1) {
        return Ok(false);
    }
    let atoms: Vec<bool> = v.0[..sys.n_atoms].iter().map(|&b| b == 1).collect();
    Ok(sys
        .derived
        .iter()
        .zip(&v.0[sys.n_atoms..])
        .all(|(e, &b)| e.eval(&atoms) == (b == 1)))
}

/// Facets of the correlation polytope of `sys` (Boole's conditions of
/// possible experience), each as coprime integers in `a·p + a0 >= 0` form.
pub fn boole_conditions(sys: &EventSystem) -> Result<HPolytope, EventsError> {
    let d = sys.dim();
    if d > MAX_DIM {
        return Err(EventsError::DimensionBoundExceeded { dim: d, max: MAX_DIM });
    }
    let verts = enumerate_vertices(sys)?;
    let v = correlation_polytope(d, &verts)?;
    Ok(polytope::facets(&v)?)
}

pub fn correlation_polytope(dim: usize, verts: &[ZeroOneVector]) -> Result<VPolytope, EventsError> {
    Ok(VPolytope::new(dim, verts.iter().map(ZeroOneVector::to_rationals).collect())?)
}
