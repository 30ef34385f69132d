//! Boolean frames: the commuting yes/no questions "is the value of `A` in
//! `Δ`?" attached to one observable.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{c, hermitian_deviation, hermitian_eigen, max_abs, CMatrix, QuantumError, QuantumState};
use crate::elliptope::{CorrelationTriple, ElliptopeError};
use crate::raffles::{self, BalancedValueSet, RaffleFeasibility};
use crate::rational::{self, Rational};

/// Tolerance for projector identities and commutation.
pub const FRAME_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one.
pub const MERGE_TOL: f64 = 1e-9;

/// An interval of real values with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ValueRange {
    pub fn closed(lo: f64, hi: f64) -> Self {
        ValueRange { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// `[lo, hi)`
    pub fn half_open(lo: f64, hi: f64) -> Self {
        ValueRange { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn point(x: f64) -> Self {
        ValueRange::closed(x, x)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn overlaps(&self, o: &ValueRange) -> bool {
        if self.is_empty() || o.is_empty() {
            return false;
        }
        // the larger lower end must stay below the smaller upper end
        let (lo, lo_closed) = if self.lo > o.lo || (self.lo == o.lo && !self.lo_closed) {
            (self.lo, self.lo_closed)
        } else {
            (o.lo, o.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < o.hi || (self.hi == o.hi && !self.hi_closed) {
            (self.hi, self.hi_closed)
        } else {
            (o.hi, o.hi_closed)
        };
        lo < hi || (lo == hi && lo_closed && hi_closed)
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi && self.lo_closed && self.hi_closed {
            return write!(f, "{{{}}}", self.lo);
        }
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// One question of a frame: the range asked about and its projector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub label: ValueRange,
    #[serde(serialize_with = "super::json::serialize_matrix")]
    pub projector: CMatrix,
}

/// Orthogonal projectors summing to the identity, labelled by value ranges of
/// a source observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BooleanFrame {
    outcomes: Vec<Outcome>,
    #[serde(serialize_with = "super::json::serialize_matrix")]
    observable: CMatrix,
}

impl BooleanFrame {
    /// Checks idempotence, mutual orthogonality and completeness.
    pub fn new(observable: CMatrix, outcomes: Vec<Outcome>) -> Result<Self, QuantumError> {
        let d = observable.nrows();
        let mut total = CMatrix::zeros(d, d);
        for (i, o) in outcomes.iter().enumerate() {
            let p = &o.projector;
            if p.nrows() != d || p.ncols() != d {
                return Err(QuantumError::DimensionMismatch { expected: d, found: p.nrows() });
            }
            let idem = max_abs(&(p * p - p));
            if idem > FRAME_TOL || hermitian_deviation(p) > FRAME_TOL {
                return Err(QuantumError::NotProjective(format!(
                    "projector {i} is not an orthogonal projector ({idem:e})"
                )));
            }
            for (j, q) in outcomes.iter().enumerate().skip(i + 1) {
                let overlap = max_abs(&(p * &q.projector));
                if overlap > FRAME_TOL {
                    return Err(QuantumError::NotProjective(format!(
                        "projectors {i} and {j} are not orthogonal ({overlap:e})"
                    )));
                }
            }
            total += p;
        }
        let gap = max_abs(&(total - CMatrix::identity(d, d)));
        if gap > FRAME_TOL {
            return Err(QuantumError::NotProjective(format!(
                "projectors sum to the identity only up to {gap:e}"
            )));
        }
        Ok(BooleanFrame { outcomes, observable })
    }

    /// The single trivial question with projector `I`.
    pub fn trivial(dim: usize) -> Self {
        let id = CMatrix::identity(dim, dim);
        BooleanFrame {
            outcomes: vec![Outcome {
                label: ValueRange::point(1.0),
                projector: id.clone(),
            }],
            observable: id,
        }
    }

    /// Rank-one projectors on the standard basis, labelled by index.
    pub fn standard_basis(dim: usize) -> Self {
        let outcomes = (0..dim)
            .map(|k| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(k, k)] = c(1.0);
                Outcome {
                    label: ValueRange::point(k as f64),
                    projector: p,
                }
            })
            .collect();
        let observable = CMatrix::from_fn(dim, dim, |i, j| if i == j { c(i as f64) } else { c(0.0) });
        BooleanFrame { outcomes, observable }
    }

    pub fn dim(&self) -> usize {
        self.observable.nrows()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn observable(&self) -> &CMatrix {
        &self.observable
    }

    pub fn projectors(&self) -> impl Iterator<Item = &CMatrix> {
        self.outcomes.iter().map(|o| &o.projector)
    }
}

/// Spectral frame of a Hermitian observable. Eigenvalues are sorted
/// descending and merged when within [`MERGE_TOL`] of their neighbour. With
/// `ranges`, projectors are summed per range; ranges containing no eigenvalue
/// are dropped, and every eigenvalue must fall in some range.
pub fn frame_of(observable: &CMatrix, ranges: Option<&[ValueRange]>) -> Result<BooleanFrame, QuantumError> {
    if observable.nrows() != observable.ncols() {
        return Err(QuantumError::NotSquare(observable.nrows(), observable.ncols()));
    }
    let dev = hermitian_deviation(observable);
    if dev > FRAME_TOL {
        return Err(QuantumError::NotHermitian(dev));
    }
    let (values, vectors) = hermitian_eigen(observable);
    // (latest eigenvalue, sum of eigenvalues, count, projector), descending
    let mut groups: Vec<(f64, f64, usize, CMatrix)> = Vec::new();
    for (&l, v) in values.iter().zip(&vectors).rev() {
        let proj = v * v.adjoint();
        match groups.last_mut() {
            Some((last, sum, count, p)) if *last - l <= MERGE_TOL => {
                *last = l;
                *sum += l;
                *count += 1;
                *p += proj;
            }
            _ => groups.push((l, l, 1, proj)),
        }
    }
    // a merged cluster is labelled by its mean
    let spectrum: Vec<(f64, CMatrix)> = groups
        .into_iter()
        .map(|(_, sum, count, p)| (sum / count as f64, p))
        .collect();

    let outcomes = match ranges {
        None => spectrum
            .into_iter()
            .map(|(l, p)| Outcome {
                label: ValueRange::point(l),
                projector: p,
            })
            .collect(),
        Some(ranges) => {
            for (i, r) in ranges.iter().enumerate() {
                for o in &ranges[i + 1..] {
                    if r.overlaps(o) {
                        return Err(QuantumError::OverlappingRanges(r.to_string(), o.to_string()));
                    }
                }
            }
            let mut sums: Vec<Option<CMatrix>> = vec![None; ranges.len()];
            // first eigenvalue seen per range, for ordering
            let mut first: Vec<f64> = vec![f64::NEG_INFINITY; ranges.len()];
            for (l, p) in spectrum {
                let Some(k) = ranges.iter().position(|r| r.contains(l)) else {
                    return Err(QuantumError::UncoveredEigenvalue(l));
                };
                match &mut sums[k] {
                    Some(acc) => *acc += p,
                    slot @ None => {
                        *slot = Some(p);
                        first[k] = l;
                    }
                }
            }
            let mut out: Vec<(f64, Outcome)> = ranges
                .iter()
                .zip(sums)
                .zip(first)
                .filter_map(|((r, p), l)| {
                    p.map(|projector| (l, Outcome { label: *r, projector }))
                })
                .collect();
            out.sort_by(|a, b| b.0.total_cmp(&a.0));
            out.into_iter().map(|(_, o)| o).collect()
        }
    };
    BooleanFrame::new(observable.clone(), outcomes)
}

/// Every projector of one frame commutes with every projector of the other.
pub fn frames_compatible(f1: &BooleanFrame, f2: &BooleanFrame) -> Result<bool, QuantumError> {
    if f1.dim() != f2.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: f1.dim(),
            found: f2.dim(),
        });
    }
    for p in f1.projectors() {
        for q in f2.projectors() {
            if max_abs(&(p * q - q * p)) > FRAME_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Born probabilities of the frame's outcomes, in frame order.
pub fn born<S: QuantumState + ?Sized>(state: &S, frame: &BooleanFrame) -> Result<Vec<f64>, QuantumError> {
    if state.dim() != frame.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: frame.dim(),
            found: state.dim(),
        });
    }
    Ok(frame.projectors().map(|p| state.expectation(p).re).collect())
}

/// Whether three balanced variables with `values_per_variable` uniformly
/// distributed values admit a joint distribution with anti-correlations
/// `correlations`. Decided by the exact raffle LP on the exact binary values
/// of the inputs.
pub fn global_boolean_embedding_exists(
    correlations: &CorrelationTriple,
    values_per_variable: usize,
) -> Result<RaffleFeasibility, QuantumError> {
    let spin2 = values_per_variable
        .checked_sub(1)
        .filter(|&s| s >= 1 && s <= raffles::MAX_SPIN2 as usize)
        .ok_or(QuantumError::Raffle(raffles::RaffleError::SpinBoundExceeded {
            spin2: values_per_variable.saturating_sub(1) as u32,
            max: raffles::MAX_SPIN2,
        }))?;
    let chi = correlations.as_array();
    let mut target: [Rational; 3] = Default::default();
    for (t, x) in target.iter_mut().zip(chi) {
        *t = rational::from_f64(x).ok_or(QuantumError::Elliptope(ElliptopeError::OutOfRange(x)))?;
    }
    Ok(raffles::feasible(&BalancedValueSet::new(spin2 as u32), &target)?)
}
