//! Finite-dimensional quantum mechanics for the three-setting spin scenario.
//!
//! Spin observables use the basis `|s⟩, |s-1⟩, …, |-s⟩` (index `k` holds
//! `m = s - k`) with ħ = 1. Two-party states live on `C^d ⊗ C^d` with the
//! first factor's index major.
//!
//! Floating-point invariants are checked at `1e-12` for dimension ≤ 8 and
//! `1e-9` above; see [`tolerance`].

mod frames;
pub mod json;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptope::{gram_vectors, CorrelationTriple, ElliptopeError};
use crate::raffles::RaffleError;

pub use frames::{
    born, frame_of, frames_compatible, global_boolean_embedding_exists, BooleanFrame, Outcome,
    ValueRange,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest `2s` accepted (dimension 21).
pub const MAX_SPIN2: u32 = 20;

/// Slack allowed for negative eigenvalues of a density operator.
pub const EIGEN_TOL: f64 = 1e-10;
/// Slack for unit norm of directions.
pub const DIRECTION_TOL: f64 = 1e-10;

/// Invariant tolerance for matrices of the given dimension.
pub fn tolerance(dim: usize) -> f64 {
    if dim <= 8 {
        1e-12
    } else {
        1e-9
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("2s = {spin2} is outside the supported range 1..={max}")]
    SpinBoundExceeded { spin2: u32, max: u32 },
    #[error("vector norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    TraceNotOne(f64),
    #[error("eigenvalue {0:e} is negative")]
    NegativeEigenvalue(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({0}×{1})")]
    NotSquare(usize, usize),
    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),
    #[error("projectors do not form a resolution of the identity: {0}")]
    NotProjective(String),
    #[error("value ranges {0} and {1} overlap")]
    OverlappingRanges(String, String),
    #[error("eigenvalue {0} lies in none of the given ranges")]
    UncoveredEigenvalue(f64),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Elliptope(#[from] ElliptopeError),
    #[error(transparent)]
    Raffle(#[from] RaffleError),
}

fn check_spin(spin2: u32) -> Result<(), QuantumError> {
    if spin2 == 0 || spin2 > MAX_SPIN2 {
        return Err(QuantumError::SpinBoundExceeded { spin2, max: MAX_SPIN2 });
    }
    Ok(())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// A unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionInput", into = "[f64; 3]")]
pub struct Direction([f64; 3]);

#[derive(Deserialize)]
#[serde(untagged)]
enum DirectionInput {
    Cartesian([f64; 3]),
    Spherical { theta: f64, phi: f64 },
}

impl TryFrom<DirectionInput> for Direction {
    type Error = QuantumError;

    fn try_from(d: DirectionInput) -> Result<Self, QuantumError> {
        match d {
            DirectionInput::Cartesian(v) => Direction::new(v),
            DirectionInput::Spherical { theta, phi } => Ok(Direction::from_spherical(theta, phi)),
        }
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    pub fn new(v: [f64; 3]) -> Result<Self, QuantumError> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > DIRECTION_TOL {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(Direction(v))
    }

    /// Polar angle `theta` from the z axis and azimuth `phi`, in radians.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Direction([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn x() -> Self {
        Direction([1.0, 0.0, 0.0])
    }

    pub fn z() -> Self {
        Direction([0.0, 0.0, 1.0])
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, o: &Direction) -> f64 {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }
}

/// `S_x`, `S_y`, `S_z` for one spin `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators {
    spin2: u32,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl SpinOperators {
    pub fn spin2(&self) -> u32 {
        self.spin2
    }

    pub fn spin(&self) -> f64 {
        self.spin2 as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.spin2 as usize + 1
    }

    /// `a·S`.
    pub fn component(&self, a: &Direction) -> CMatrix {
        let [x, y, z] = a.0;
        &self.sx * c(x) + &self.sy * c(y) + &self.sz * c(z)
    }

    /// `S_x² + S_y² + S_z²`, which equals `s(s+1)·I`.
    pub fn casimir(&self) -> CMatrix {
        &self.sx * &self.sx + &self.sy * &self.sy + &self.sz * &self.sz
    }
}

/// Ladder-operator construction:
/// `S₊|m⟩ = sqrt(s(s+1) - m(m+1)) |m+1⟩`.
pub fn spin_ops(spin2: u32) -> Result<SpinOperators, QuantumError> {
    check_spin(spin2)?;
    let d = spin2 as usize + 1;
    let s = spin2 as f64 / 2.0;
    let m = |k: usize| s - k as f64;
    let mut raise = CMatrix::zeros(d, d);
    for k in 1..d {
        // |m_k⟩ → |m_k + 1⟩ = |m_{k-1}⟩
        raise[(k - 1, k)] = c((s * (s + 1.0) - m(k) * (m(k) + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * c(0.5);
    let sy = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let sz = CMatrix::from_diagonal(&DVector::from_fn(d, |k, _| c(m(k))));
    Ok(SpinOperators { spin2, sx, sy, sz })
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetJson", into = "KetJson")]
pub struct Ket {
    amps: CVector,
}

#[derive(Serialize, Deserialize)]
struct KetJson(
    #[serde(
        serialize_with = "json::serialize_vector",
        deserialize_with = "json::deserialize_vector"
    )]
    CVector,
);

impl TryFrom<KetJson> for Ket {
    type Error = QuantumError;

    fn try_from(k: KetJson) -> Result<Self, QuantumError> {
        Ket::new(k.0)
    }
}

impl From<Ket> for KetJson {
    fn from(k: Ket) -> Self {
        KetJson(k.amps)
    }
}

impl Ket {
    pub fn new(amps: CVector) -> Result<Self, QuantumError> {
        let n = amps.norm();
        if (n - 1.0).abs() > tolerance(amps.len()) {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(Ket { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self, QuantumError> {
        let n = v.norm();
        if !n.is_normal() {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(Ket { amps: v / c(n) })
    }

    pub fn from_real(v: &[f64]) -> Result<Self, QuantumError> {
        Ket::new(DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    /// Standard basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[k] = c(1.0);
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn tensor(&self, o: &Ket) -> Ket {
        Ket {
            amps: self.amps.kronecker(&o.amps),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { m: self.projector() }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityJson", into = "DensityJson")]
pub struct DensityOperator {
    m: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct DensityJson(
    #[serde(
        serialize_with = "json::serialize_matrix",
        deserialize_with = "json::deserialize_matrix"
    )]
    CMatrix,
);

impl TryFrom<DensityJson> for DensityOperator {
    type Error = QuantumError;

    fn try_from(d: DensityJson) -> Result<Self, QuantumError> {
        DensityOperator::new(d.0)
    }
}

impl From<DensityOperator> for DensityJson {
    fn from(d: DensityOperator) -> Self {
        DensityJson(d.m)
    }
}

impl DensityOperator {
    pub fn new(m: CMatrix) -> Result<Self, QuantumError> {
        let rho = DensityOperator { m };
        rho.check()?;
        Ok(rho)
    }

    /// Re-verifies the type invariants.
    pub fn check(&self) -> Result<(), QuantumError> {
        let m = &self.m;
        if m.nrows() != m.ncols() {
            return Err(QuantumError::NotSquare(m.nrows(), m.ncols()));
        }
        let tol = tolerance(m.nrows());
        let dev = hermitian_deviation(m);
        if dev > tol {
            return Err(QuantumError::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr - c(1.0)).norm() > tol {
            return Err(QuantumError::TraceNotOne(tr.re));
        }
        let min = hermitian_eigen(m).0.into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(QuantumError::NegativeEigenvalue(min));
        }
        Ok(())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            m: CMatrix::identity(dim, dim) * c(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn tensor(&self, o: &DensityOperator) -> DensityOperator {
        DensityOperator {
            m: self.m.kronecker(&o.m),
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of the
/// Hermitian part of `m`.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let h = (m + m.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(h);
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&l, v)| (l, v.into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Anything that assigns expectation values to operators.
pub trait QuantumState {
    fn dim(&self) -> usize;
    /// `⟨ψ|O|ψ⟩` or `tr(ρ O)`.
    fn expectation(&self, op: &CMatrix) -> Complex64;
}

impl QuantumState for Ket {
    fn dim(&self) -> usize {
        self.amps.len()
    }

    fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.amps.dotc(&(op * &self.amps))
    }
}

impl QuantumState for DensityOperator {
    fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn expectation(&self, op: &CMatrix) -> Complex64 {
        // tr(ρ O) = Σ_ij ρ_ij O_ji
        let mut acc = Complex64::zero();
        for i in 0..self.m.nrows() {
            for j in 0..self.m.ncols() {
                acc += self.m[(i, j)] * op[(j, i)];
            }
        }
        acc
    }
}

/// `(2s+1)^{-1/2} Σ_m (-1)^{s-m} |m⟩ ⊗ |-m⟩`, the total-spin-zero state.
pub fn singlet(spin2: u32) -> Result<Ket, QuantumError> {
    check_spin(spin2)?;
    let d = spin2 as usize + 1;
    let norm = 1.0 / (d as f64).sqrt();
    let mut amps = CVector::zeros(d * d);
    for k in 0..d {
        // m = s - k pairs with -m at index d - 1 - k; s - m = k
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        amps[k * d + (d - 1 - k)] = c(sign * norm);
    }
    Ok(Ket { amps })
}

/// `⟨ψ|(a·S) ⊗ (b·S)|ψ⟩` on [`singlet`].
pub fn singlet_correlation(spin2: u32, a: &Direction, b: &Direction) -> Result<f64, QuantumError> {
    let ops = spin_ops(spin2)?;
    let psi = singlet(spin2)?;
    let d = ops.dim();
    // ψ as a d×d matrix Ψ_{ij}; ⟨ψ|A⊗B|ψ⟩ = tr(Ψ† A Ψ Bᵀ)
    let big_psi = CMatrix::from_fn(d, d, |i, j| psi.amps[i * d + j]);
    let am = ops.component(a);
    let bm = ops.component(b);
    let prod = big_psi.adjoint() * am * &big_psi * bm.transpose();
    Ok(prod.trace().re)
}

/// `s(s+1)/3`.
pub fn sigma2(spin2: u32) -> f64 {
    let s = spin2 as f64 / 2.0;
    s * (s + 1.0) / 3.0
}

/// Anti-correlation coefficient of the singlet for settings `a`, `b`:
/// the raw correlation divided by `-σ²`. Equals `a·b`.
pub fn chi_quantum(spin2: u32, a: &Direction, b: &Direction) -> Result<f64, QuantumError> {
    Ok(-singlet_correlation(spin2, a, b)? / sigma2(spin2))
}

/// Three settings whose pairwise singlet anti-correlations are `t`.
pub fn saturate(t: &CorrelationTriple, spin2: u32) -> Result<[Direction; 3], QuantumError> {
    check_spin(spin2)?;
    let g = gram_vectors(t)?;
    Ok(g.vectors().map(|v| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Direction([v[0] / n, v[1] / n, v[2] / n])
    }))
}

/// The three pairwise `chi_quantum` values `(ab, ac, bc)`.
pub fn chi_triple(spin2: u32, dirs: &[Direction; 3]) -> Result<[f64; 3], QuantumError> {
    Ok([
        chi_quantum(spin2, &dirs[0], &dirs[1])?,
        chi_quantum(spin2, &dirs[0], &dirs[2])?,
        chi_quantum(spin2, &dirs[1], &dirs[2])?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace(
    rho: &DensityOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator, QuantumError> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: da * db,
        });
    }
    let m = &rho.m;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, k| {
            (0..db).fold(Complex64::zero(), |acc, j| acc + m[(i * db + j, k * db + j)])
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |j, l| {
            (0..da).fold(Complex64::zero(), |acc, i| acc + m[(i * db + j, i * db + l)])
        }),
    };
    DensityOperator::new(out)
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|`.
pub fn ensemble_density(ensemble: &[(f64, Ket)]) -> Result<DensityOperator, QuantumError> {
    let Some((_, first)) = ensemble.first() else {
        return Err(QuantumError::BadDistribution("empty ensemble".into()));
    };
    let d = first.dim();
    let mut total = 0.0;
    let mut m = CMatrix::zeros(d, d);
    for (p, k) in ensemble {
        if !(p.is_finite() && *p >= 0.0) {
            return Err(QuantumError::BadDistribution(format!("weight {p} is not a probability")));
        }
        if k.dim() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: k.dim(),
            });
        }
        total += p;
        m += k.projector() * c(*p);
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(QuantumError::BadDistribution(format!("weights sum to {total}")));
    }
    DensityOperator::new(m)
}

/// `Σ_j (I ⊗ Q_j) ρ (I ⊗ Q_j)` for the projectors `Q_j` of a frame on B.
pub fn measure_b_nonselective(
    rho: &DensityOperator,
    dims: (usize, usize),
    frame_b: &BooleanFrame,
) -> Result<DensityOperator, QuantumError> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: da * db,
        });
    }
    if frame_b.dim() != db {
        return Err(QuantumError::DimensionMismatch {
            expected: db,
            found: frame_b.dim(),
        });
    }
    let id = CMatrix::identity(da, da);
    let mut out = CMatrix::zeros(da * db, da * db);
    for o in frame_b.outcomes() {
        let q = id.kronecker(&o.projector);
        out += &q * &rho.m * &q;
    }
    DensityOperator::new(out)
}

/// Largest total-variation distance between A's outcome distribution before
/// and after a non-selective measurement on B, over every pair of an A frame
/// and a B frame. An empty `frames_a` means the standard basis of A.
pub fn no_signalling_check(
    rho: &DensityOperator,
    dims: (usize, usize),
    frames_a: &[BooleanFrame],
    frames_b: &[BooleanFrame],
) -> Result<f64, QuantumError> {
    let (da, _) = dims;
    let standard;
    let frames_a = if frames_a.is_empty() {
        standard = [BooleanFrame::standard_basis(da)];
        &standard[..]
    } else {
        frames_a
    };
    let before = partial_trace(rho, dims, Subsystem::A)?;
    let mut worst: f64 = 0.0;
    for fb in frames_b {
        let after = partial_trace(&measure_b_nonselective(rho, dims, fb)?, dims, Subsystem::A)?;
        for fa in frames_a {
            let p = born(&before, fa)?;
            let q = born(&after, fa)?;
            let tv = 0.5 * p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum::<f64>();
            worst = worst.max(tv);
        }
    }
    Ok(worst)
}
