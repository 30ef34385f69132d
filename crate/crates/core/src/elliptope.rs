//! The elliptope: triples of anti-correlation coefficients whose 3×3
//! unit-diagonal correlation matrix is positive semidefinite.
//!
//! Coordinates are `(chi_ab, chi_ac, chi_bc)`. Each `chi` is the negative of
//! the Pearson coefficient between the two parties' outcomes; for balanced
//! variables with standard deviations `sigma_x`, `sigma_y` the Pearson
//! coefficient is `<XY> / (sigma_x sigma_y)`.
//!
//! Boundary points are algebraic irrationals in general, so this module works
//! in `f64` with an absolute tolerance on the determinant;
//! [`elliptope_value_exact`] covers rational points.

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElliptopeError {
    #[error("correlation coefficient {0} is not a finite number in [-1, 1]")]
    OutOfRange(f64),
    #[error("triple {0:?} lies outside the elliptope (value {1:e})")]
    NotInElliptope([f64; 3], f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub chi_ab: f64,
    pub chi_ac: f64,
    pub chi_bc: f64,
}

impl CorrelationTriple {
    pub fn new(chi_ab: f64, chi_ac: f64, chi_bc: f64) -> Result<Self, ElliptopeError> {
        for c in [chi_ab, chi_ac, chi_bc] {
            if !c.is_finite() || c.abs() > 1.0 {
                return Err(ElliptopeError::OutOfRange(c));
            }
        }
        Ok(CorrelationTriple { chi_ab, chi_ac, chi_bc })
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self, ElliptopeError> {
        CorrelationTriple::new(a[0], a[1], a[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.chi_ab, self.chi_ac, self.chi_bc]
    }

    /// `[[1, ab, ac], [ab, 1, bc], [ac, bc, 1]]`
    pub fn correlation_matrix(&self) -> [[f64; 3]; 3] {
        [
            [1.0, self.chi_ab, self.chi_ac],
            [self.chi_ab, 1.0, self.chi_bc],
            [self.chi_ac, self.chi_bc, 1.0],
        ]
    }
}

/// `1 - ab² - ac² - bc² + 2·ab·ac·bc`, the determinant of the correlation matrix.
pub fn elliptope_value(t: &CorrelationTriple) -> f64 {
    let (x, y, z) = (t.chi_ab, t.chi_ac, t.chi_bc);
    1.0 - x * x - y * y - z * z + 2.0 * x * y * z
}

/// The same determinant in exact arithmetic, for rational points such as
/// polytope vertices.
pub fn elliptope_value_exact(c: &[Rational; 3]) -> Rational {
    let [x, y, z] = c;
    Rational::one() - x * x - y * y - z * z + rational::int(2) * x * y * z
}

/// Same expression as [`elliptope_value`] on raw components, for callers that
/// may hold values outside `[-1, 1]`.
pub fn elliptope_value_raw(c: [f64; 3]) -> f64 {
    let [x, y, z] = c;
    1.0 - x * x - y * y - z * z + 2.0 * x * y * z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

pub fn is_in_elliptope(t: &CorrelationTriple, tol: f64) -> Verdict {
    classify(t.as_array(), tol)
}

/// Classification on raw components (values beyond `[-1, 1]` come out `Outside`).
pub fn classify(c: [f64; 3], tol: f64) -> Verdict {
    let value = elliptope_value_raw(c);
    let max_abs = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max_abs > 1.0 + tol || c.iter().any(|x| !x.is_finite()) {
        return Verdict::Outside;
    }
    if value > tol && max_abs < 1.0 - tol {
        Verdict::Inside
    } else if value.abs() <= tol || ((1.0 - max_abs).abs() <= tol && value >= -tol) {
        Verdict::Boundary
    } else {
        Verdict::Outside
    }
}

/// Three unit vectors whose pairwise dot products reproduce a triple.
///
/// Gauge: `a = (1, 0, 0)`, `b` in the xy-plane with nonnegative y, `c` with
/// nonnegative z (Cholesky factor of the correlation matrix, pivots in the
/// order a, b, c). For any weights `v` the squared norm of `v1 a + v2 b + v3 c`
/// equals the quadratic form of the correlation matrix, so it is never
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramRealization {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
}

pub(crate) fn dot3(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

impl GramRealization {
    pub fn vectors(&self) -> [[f64; 3]; 3] {
        [self.a, self.b, self.c]
    }

    /// `(a·b, a·c, b·c)`
    pub fn cosines(&self) -> [f64; 3] {
        [dot3(&self.a, &self.b), dot3(&self.a, &self.c), dot3(&self.b, &self.c)]
    }

    /// `|v1 a + v2 b + v3 c|²`
    pub fn quadratic_form(&self, v: [f64; 3]) -> f64 {
        let s: [f64; 3] = std::array::from_fn(|k| v[0] * self.a[k] + v[1] * self.b[k] + v[2] * self.c[k]);
        dot3(&s, &s)
    }
}

/// Cholesky-style realization of an elliptope point as unit vectors.
pub fn gram_vectors(t: &CorrelationTriple) -> Result<GramRealization, ElliptopeError> {
    if is_in_elliptope(t, DEFAULT_TOL) == Verdict::Outside {
        return Err(ElliptopeError::NotInElliptope(t.as_array(), elliptope_value(t)));
    }
    let (x, y, z) = (t.chi_ab, t.chi_ac, t.chi_bc);
    let a = [1.0, 0.0, 0.0];
    let b2 = (1.0 - x * x).max(0.0);
    let b = [x, b2.sqrt(), 0.0];
    let c = if b2 > 1e-24 {
        let c1 = (z - x * y) / b[1];
        let c2 = (1.0 - y * y - c1 * c1).max(0.0).sqrt();
        [y, c1, c2]
    } else {
        // b = ±a; then bc = ±ac and c only needs the right angle to a
        [y, (1.0 - y * y).max(0.0).sqrt(), 0.0]
    };
    Ok(GramRealization {
        a,
        b,
        c: normalize(c),
    })
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot3(&v, &v).sqrt();
    if n == 0.0 {
        v
    } else {
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

/// Both boundary roots `bc = ab·ac ± sqrt((1-ab²)(1-ac²))` over an `n × n`
/// grid of `(ab, ac)` in `[-1, 1]²`. Grid points where the roots coincide
/// contribute a single triple. Output order: row-major over the grid, `+`
/// root first.
pub fn boundary_mesh(n: usize) -> Vec<CorrelationTriple> {
    let n = n.max(2);
    let grid: Vec<f64> = (0..n).map(|i| grid_point(i, n)).collect();
    let mut out = Vec::with_capacity(2 * n * n);
    for &ab in &grid {
        for &ac in &grid {
            for bc in boundary_roots(ab, ac) {
                out.push(CorrelationTriple { chi_ab: ab, chi_ac: ac, chi_bc: bc });
            }
        }
    }
    out
}

fn grid_point(i: usize, n: usize) -> f64 {
    // exact endpoints and an exact zero for odd n
    let num = 2 * i as i64 - (n as i64 - 1);
    num as f64 / (n as f64 - 1.0)
}

/// The one or two `bc` values that put `(ab, ac, bc)` on the boundary.
pub fn boundary_roots(ab: f64, ac: f64) -> Vec<f64> {
    let center = ab * ac;
    let radius = ((1.0 - ab * ab) * (1.0 - ac * ac)).max(0.0).sqrt();
    if radius == 0.0 {
        vec![center.clamp(-1.0, 1.0)]
    } else {
        vec![(center + radius).clamp(-1.0, 1.0), (center - radius).clamp(-1.0, 1.0)]
    }
}

pub fn mesh_to_csv(mesh: &[CorrelationTriple]) -> String {
    let mut s = String::from("chi_ab,chi_ac,chi_bc\n");
    for t in mesh {
        s.push_str(&format!("{},{},{}\n", t.chi_ab, t.chi_ac, t.chi_bc));
    }
    s
}
