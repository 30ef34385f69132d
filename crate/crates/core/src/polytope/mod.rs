//! Exact rational convex geometry.
//!
//! Polytopes come in two flavours: [`VPolytope`] (convex hull of finitely
//! many vertices) and [`HPolytope`] (intersection of halfspaces written as
//! `a·x + a0 >= 0`). Conversion between them uses the double description
//! method in [`dd`]; lower-dimensional inputs are first reduced to their
//! affine hull, which is reported as pairs of opposite halfspaces.
//!
//! Nothing in this module touches floating point.

pub mod dd;
mod linalg;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, Feasibility};
use crate::rational::{self, dot, primitive_integer, to_rationals, Rational};

use linalg::{nullspace, rank, rref};

/// Largest ambient dimension handled by the exact hull routines.
pub const MAX_DIM: usize = 10;
/// Largest vertex count accepted by [`facets`].
pub const MAX_VERTICES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("dimension {dim} exceeds the supported bound {max}")]
    DimensionBoundExceeded { dim: usize, max: usize },
    #[error("{count} vertices exceed the supported bound {max}")]
    TooManyVertices { count: usize, max: usize },
    #[error("polytope has no vertices")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the affine slice does not meet the polytope")]
    EmptySlice,
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("coordinate index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("halfspace system is infeasible")]
    InfeasibleSystem,
    #[error("the linear image is unbounded")]
    UnboundedImage,
    #[error("invalid polytope JSON: {0}")]
    Json(String),
}

/// The closed halfspace `a·x + a0 >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "rational::serde_str::vec")]
    pub a: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub a0: Rational,
}

impl Halfspace {
    pub fn new(a: Vec<Rational>, a0: Rational) -> Self {
        Halfspace { a, a0 }
    }

    pub fn from_ints(a: &[i64], a0: i64) -> Self {
        Halfspace {
            a: a.iter().map(|&x| rational::int(x)).collect(),
            a0: rational::int(a0),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.a, x) + &self.a0
    }

    /// Rescales by a positive factor so all coefficients are coprime integers.
    pub fn normalized(&self) -> Halfspace {
        let mut all = self.a.clone();
        all.push(self.a0.clone());
        let ints = primitive_integer(&all);
        let mut r = to_rationals(&ints);
        let a0 = r.pop().unwrap_or_else(Rational::zero);
        Halfspace { a: r, a0 }
    }

    pub fn negated(&self) -> Halfspace {
        Halfspace {
            a: self.a.iter().map(|x| -x).collect(),
            a0: -&self.a0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// Renders `Σ a_i name_i >= -a0`, e.g. `chi_ab+chi_ac+chi_bc >= -1`.
    pub fn to_inequality_string(&self, names: &[&str]) -> String {
        let mut lhs = String::new();
        for (i, c) in self.a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = names
                .get(i)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("x{i}"));
            let mag = c.abs();
            let sign = if c.is_negative() {
                "-"
            } else if lhs.is_empty() {
                ""
            } else {
                "+"
            };
            lhs.push_str(sign);
            if !mag.is_one() {
                lhs.push_str(&format!("{mag}*"));
            }
            lhs.push_str(&name);
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        format!("{lhs} >= {}", -&self.a0)
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.a.len()).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_inequality_string(&refs))
    }
}

fn cmp_halfspace(x: &Halfspace, y: &Halfspace) -> Ordering {
    x.a.cmp(&y.a).then_with(|| x.a0.cmp(&y.a0))
}

/// Halfspace representation `{ x : a_i·x + a0_i >= 0 for all i }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl HPolytope {
    /// Normalizes and deduplicates the halfspaces and checks feasibility.
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, PolytopeError> {
        let mut out: Vec<Halfspace> = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if h.dim() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
            let n = h.normalized();
            if !out.contains(&n) {
                out.push(n);
            }
        }
        let p = HPolytope {
            dim,
            halfspaces: out,
        };
        if !p.is_feasible() {
            return Err(PolytopeError::InfeasibleSystem);
        }
        Ok(p)
    }

    fn from_parts_unchecked(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        HPolytope { dim, halfspaces }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Halfspaces whose exact opposite is also present (affine hull equalities),
    /// reported once each with a positive leading coefficient.
    pub fn equalities(&self) -> Vec<Halfspace> {
        let mut eqs = Vec::new();
        for h in &self.halfspaces {
            let neg = h.negated();
            if self.halfspaces.contains(&neg) && leading_positive(&h.a) {
                eqs.push(h.clone());
            }
        }
        eqs
    }

    /// Halfspaces that are not part of an equality pair.
    pub fn inequalities(&self) -> Vec<Halfspace> {
        self.halfspaces
            .iter()
            .filter(|h| !self.halfspaces.contains(&h.negated()))
            .cloned()
            .collect()
    }

    fn is_feasible(&self) -> bool {
        // x = x⁺ - x⁻, slack s >= 0:  a·x⁺ - a·x⁻ - s = -a0
        let d = self.dim;
        let m = self.halfspaces.len();
        if m == 0 {
            return true;
        }
        let rows: Vec<Vec<Rational>> = self
            .halfspaces
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let mut row = Vec::with_capacity(2 * d + m);
                row.extend(h.a.iter().cloned());
                row.extend(h.a.iter().map(|x| -x));
                row.extend((0..m).map(|k| if k == i { -Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let rhs: Vec<Rational> = self.halfspaces.iter().map(|h| -&h.a0).collect();
        matches!(lp::feasibility(&rows, &rhs), Feasibility::Feasible(_))
    }

    pub fn from_json(s: &str) -> Result<Self, PolytopeError> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            halfspaces: Vec<Halfspace>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| PolytopeError::Json(e.to_string()))?;
        HPolytope::new(raw.dim, raw.halfspaces)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

fn leading_positive(a: &[Rational]) -> bool {
    a.iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_positive())
}

/// Vertex representation; vertices are distinct, extremal and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VPolytope {
    dim: usize,
    #[serde(with = "rational::serde_str::matrix")]
    vertices: Vec<Vec<Rational>>,
}

impl VPolytope {
    /// Builds the convex hull of `points`, keeping only extremal points.
    pub fn new(dim: usize, points: Vec<Vec<Rational>>) -> Result<Self, PolytopeError> {
        for p in &points {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        let mut points = points;
        points.sort();
        points.dedup();
        if points.is_empty() {
            return Err(PolytopeError::EmptyInput);
        }
        let vertices = if dim <= MAX_DIM && points.len() <= MAX_VERTICES {
            let hull = Hull::compute(&points);
            points
                .into_iter()
                .zip(hull.is_vertex)
                .filter_map(|(p, keep)| keep.then_some(p))
                .collect()
        } else {
            prune_by_lp(points)
        };
        Ok(VPolytope { dim, vertices })
    }

    /// Builds a polytope from integer vertices.
    pub fn from_ints(dim: usize, points: &[&[i64]]) -> Result<Self, PolytopeError> {
        let pts = points
            .iter()
            .map(|p| p.iter().map(|&x| rational::int(x)).collect())
            .collect();
        VPolytope::new(dim, pts)
    }

    /// Wraps vertices already known to be distinct, sorted and extremal.
    fn from_vertices_unchecked(dim: usize, mut vertices: Vec<Vec<Rational>>) -> Self {
        vertices.sort();
        vertices.dedup();
        VPolytope { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn from_json(s: &str) -> Result<Self, PolytopeError> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            #[serde(with = "rational::serde_str::matrix")]
            vertices: Vec<Vec<Rational>>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| PolytopeError::Json(e.to_string()))?;
        VPolytope::new(raw.dim, raw.vertices)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

fn prune_by_lp(points: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut keep = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let others: Vec<Vec<Rational>> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if others.is_empty() || !matches!(convex_weights(&others, p), Feasibility::Feasible(_)) {
            keep.push(p.clone());
        }
    }
    keep
}

/// Affine hull plus facets of a finite point set.
struct Hull {
    /// One entry per independent affine equality, leading coefficient positive.
    equalities: Vec<Halfspace>,
    facets: Vec<Halfspace>,
    is_vertex: Vec<bool>,
}

impl Hull {
    /// `points` must be nonempty, distinct, and of equal length.
    fn compute(points: &[Vec<Rational>]) -> Hull {
        let d = points[0].len();
        let base = &points[0];
        let diffs: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| p.iter().zip(base).map(|(x, b)| x - b).collect())
            .collect();
        let (reduced, pivots) = rref(diffs, d);
        let k = pivots.len();
        let mut equalities: Vec<Halfspace> = nullspace(&reduced, &pivots, d)
            .into_iter()
            .map(|w| {
                let a0 = -dot(&w, base);
                let h = Halfspace::new(w, a0).normalized();
                if leading_positive(&h.a) {
                    h
                } else {
                    h.negated()
                }
            })
            .collect();
        equalities.sort_by(cmp_halfspace);

        if k == 0 {
            return Hull {
                equalities,
                facets: Vec::new(),
                is_vertex: vec![true; points.len()],
            };
        }
        let projected: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| pivots.iter().map(|&c| p[c].clone()).collect())
            .collect();
        let rows: Vec<Vec<BigInt>> = projected
            .iter()
            .map(|y| {
                let mut row = vec![Rational::one()];
                row.extend(y.iter().cloned());
                primitive_integer(&row)
            })
            .collect();
        let rays = dd::extreme_rays(&rows).expect("points span their affine hull");
        let reduced_facets: Vec<Vec<Rational>> = rays.iter().map(|r| to_rationals(r)).collect();

        let is_vertex = projected
            .iter()
            .map(|y| {
                let tight: Vec<Vec<Rational>> = reduced_facets
                    .iter()
                    .filter(|f| (dot(&f[1..], y) + &f[0]).is_zero())
                    .map(|f| f[1..].to_vec())
                    .collect();
                rank(tight) == k
            })
            .collect();

        let mut facets: Vec<Halfspace> = reduced_facets
            .into_iter()
            .map(|f| {
                let mut a = vec![Rational::zero(); d];
                for (t, &c) in pivots.iter().enumerate() {
                    a[c] = f[t + 1].clone();
                }
                Halfspace::new(a, f[0].clone())
            })
            .collect();
        facets.sort_by(cmp_halfspace);
        Hull {
            equalities,
            facets,
            is_vertex,
        }
    }

    fn into_hpolytope(self, dim: usize) -> HPolytope {
        let mut hs = Vec::with_capacity(2 * self.equalities.len() + self.facets.len());
        for e in self.equalities {
            let neg = e.negated();
            hs.push(e);
            hs.push(neg);
        }
        hs.extend(self.facets);
        HPolytope::from_parts_unchecked(dim, hs)
    }
}

/// Exact H-representation of `conv(v)`.
///
/// Full-dimensional polytopes yield their facets. Lower-dimensional ones yield
/// each affine hull equality as a pair of opposite halfspaces (listed first)
/// followed by the facets within the hull.
pub fn facets(v: &VPolytope) -> Result<HPolytope, PolytopeError> {
    if v.dim > MAX_DIM {
        return Err(PolytopeError::DimensionBoundExceeded {
            dim: v.dim,
            max: MAX_DIM,
        });
    }
    if v.vertices.len() > MAX_VERTICES {
        return Err(PolytopeError::TooManyVertices {
            count: v.vertices.len(),
            max: MAX_VERTICES,
        });
    }
    if v.vertices.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    Ok(Hull::compute(&v.vertices).into_hpolytope(v.dim))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Every slack is strictly positive.
    Inside,
    /// No slack is negative and at least one is zero.
    Boundary,
    /// Indices of violated halfspaces.
    Outside { violated: Vec<usize> },
}

pub fn contains(h: &HPolytope, x: &[Rational]) -> Result<Membership, PolytopeError> {
    if x.len() != h.dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: h.dim,
            found: x.len(),
        });
    }
    let mut violated = Vec::new();
    let mut tight = false;
    for (i, hs) in h.halfspaces.iter().enumerate() {
        let s = hs.slack(x);
        if s.is_negative() {
            violated.push(i);
        } else if s.is_zero() {
            tight = true;
        }
    }
    Ok(if !violated.is_empty() {
        Membership::Outside { violated }
    } else if tight {
        Membership::Boundary
    } else {
        Membership::Inside
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Convex weights, one per vertex in the polytope's vertex order.
    Inside { weights: Vec<Rational> },
    /// A halfspace satisfied by every vertex and violated by the query point.
    Outside { separator: Halfspace },
}

/// LP for `λ >= 0, Σλ = 1, Σλ_i v_i = x`.
fn convex_weights(vertices: &[Vec<Rational>], x: &[Rational]) -> Feasibility {
    let d = x.len();
    let mut rows: Vec<Vec<Rational>> = (0..d)
        .map(|j| vertices.iter().map(|v| v[j].clone()).collect())
        .collect();
    rows.push(vec![Rational::one(); vertices.len()]);
    let mut rhs = x.to_vec();
    rhs.push(Rational::one());
    lp::feasibility(&rows, &rhs)
}

/// Membership in `conv(v)` decided by exact LP, with a certificate either way.
pub fn lp_membership(v: &VPolytope, x: &[Rational]) -> Result<Certificate, PolytopeError> {
    if x.len() != v.dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: v.dim,
            found: x.len(),
        });
    }
    match convex_weights(&v.vertices, x) {
        Feasibility::Feasible(weights) => Ok(Certificate::Inside { weights }),
        Feasibility::Infeasible(y) => {
            let separator = separating_halfspace(&v.vertices, x, y);
            Ok(Certificate::Outside { separator })
        }
    }
}

/// Finds `(a, a0)` with `a·v_i + a0 >= 0` for all vertices and `a·x + a0 = -1`,
/// then moves it to a vertex of that set so that, for full-dimensional
/// polytopes, the separator supports a facet. `farkas` is a starting point.
fn separating_halfspace(vertices: &[Vec<Rational>], x: &[Rational], farkas: Vec<Rational>) -> Halfspace {
    let d = x.len();
    // rows of the lifted constraint matrix: (v_i, 1)
    let lifted: Vec<Vec<Rational>> = vertices
        .iter()
        .map(|v| {
            let mut r = v.clone();
            r.push(Rational::one());
            r
        })
        .collect();
    let mut target = x.to_vec();
    target.push(Rational::one());
    // scale the Farkas vector so that (x,1)·y = -1
    let at_x = dot(&target, &farkas);
    debug_assert!(at_x.is_negative());
    let mut y: Vec<Rational> = farkas.iter().map(|c| c / (-&at_x)).collect();

    loop {
        let mut active: Vec<Vec<Rational>> = lifted
            .iter()
            .filter(|row| dot(row, &y).is_zero())
            .cloned()
            .collect();
        active.push(target.clone());
        let (reduced, pivots) = rref(active, d + 1);
        if pivots.len() == d + 1 {
            break;
        }
        let mut moved = false;
        for z in nullspace(&reduced, &pivots, d + 1) {
            let step_plus = max_step(&lifted, &y, &z);
            let neg: Vec<Rational> = z.iter().map(|c| -c).collect();
            let step_minus = max_step(&lifted, &y, &neg);
            let (dir, step) = match (step_plus, step_minus) {
                (Some(t), _) => (z, t),
                (None, Some(t)) => (neg, t),
                (None, None) => continue,
            };
            for (yi, zi) in y.iter_mut().zip(&dir) {
                *yi += &step * zi;
            }
            moved = true;
            break;
        }
        if !moved {
            // only lineality directions remain (lower-dimensional polytope)
            break;
        }
    }
    let a0 = y.pop().unwrap_or_else(Rational::zero);
    Halfspace::new(y, a0).normalized()
}

/// Largest `t >= 0` keeping `rows·(y + t z) >= 0`, or `None` if unbounded.
fn max_step(rows: &[Vec<Rational>], y: &[Rational], z: &[Rational]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for r in rows {
        let rz = dot(r, z);
        if rz.is_negative() {
            let t = dot(r, y) / (-rz);
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
    }
    best
}

/// Intersection of `conv(v)` with `{ x : e·x + e0 = 0 }` for every `e` in
/// `equalities`, in vertex form.
pub fn slice(v: &VPolytope, equalities: &[Halfspace]) -> Result<VPolytope, PolytopeError> {
    let d = v.dim;
    if d > MAX_DIM {
        return Err(PolytopeError::DimensionBoundExceeded { dim: d, max: MAX_DIM });
    }
    for e in equalities {
        if e.dim() != d {
            return Err(PolytopeError::DimensionMismatch {
                expected: d,
                found: e.dim(),
            });
        }
    }
    // Augmented system [E | -e0]; solve for x = x0 + N t.
    let augmented: Vec<Vec<Rational>> = equalities
        .iter()
        .map(|e| {
            let mut r = e.a.clone();
            r.push(-&e.a0);
            r
        })
        .collect();
    let (reduced, pivots) = rref(augmented, d + 1);
    if pivots.contains(&d) {
        return Err(PolytopeError::EmptySlice);
    }
    if pivots.is_empty() {
        return Ok(v.clone());
    }
    let mut x0 = vec![Rational::zero(); d];
    for (row, &p) in reduced.iter().zip(&pivots) {
        x0[p] = row[d].clone();
    }
    let basis = nullspace(&reduced, &pivots, d);
    let r = basis.len();

    let hull = Hull::compute(&v.vertices);
    let mut constraints: Vec<Halfspace> = hull.facets.clone();
    for e in &hull.equalities {
        constraints.push(e.clone());
        constraints.push(e.negated());
    }
    if r == 0 {
        return if constraints.iter().all(|h| !h.slack(&x0).is_negative()) {
            Ok(VPolytope::from_vertices_unchecked(d, vec![x0]))
        } else {
            Err(PolytopeError::EmptySlice)
        };
    }
    // Homogenized constraints in (λ, t): c0 λ + c·t >= 0, plus λ >= 0.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(constraints.len() + 1);
    let mut lam = vec![Rational::one()];
    lam.extend((0..r).map(|_| Rational::zero()));
    rows.push(primitive_integer(&lam));
    for h in &constraints {
        let mut row = vec![h.slack(&x0)];
        row.extend(basis.iter().map(|b| dot(&h.a, b)));
        rows.push(primitive_integer(&row));
    }
    let rays = dd::extreme_rays(&rows).expect("bounded polytope gives a pointed cone");
    let mut vertices = Vec::new();
    for ray in rays {
        let lambda = Rational::from_integer(ray[0].clone());
        if !lambda.is_positive() {
            continue;
        }
        let mut x = x0.clone();
        for (b, ti) in basis.iter().zip(&ray[1..]) {
            let coef = Rational::from_integer(ti.clone()) / &lambda;
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += &coef * bi;
            }
        }
        vertices.push(x);
    }
    if vertices.is_empty() {
        return Err(PolytopeError::EmptySlice);
    }
    Ok(VPolytope::from_vertices_unchecked(d, vertices))
}

/// Vertex form of `{ M x : A x = b, x >= 0 }` for a bounded feasible region.
///
/// Works from LP support queries alone: the affine hull is found by
/// optimizing along directions orthogonal to the points found so far, then
/// every facet of the running hull is checked by minimizing its linear form
/// over the region. A facet is kept once no point of the region violates it.
/// `map` has one row per output coordinate.
///
/// `symmetries` lists linear maps `g` (row-major `k × k`) with `g(P) = P` for
/// the image `P`, closed under composition; they only save LP calls and may
/// be empty.
pub fn linear_image(
    a: &[Vec<Rational>],
    b: &[Rational],
    map: &[Vec<Rational>],
    symmetries: &[Vec<Vec<Rational>>],
) -> Result<VPolytope, PolytopeError> {
    let k = map.len();
    if k > MAX_DIM {
        return Err(PolytopeError::DimensionBoundExceeded { dim: k, max: MAX_DIM });
    }
    let orbit = |p: Vec<Rational>| -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = symmetries
            .iter()
            .map(|g| g.iter().map(|row| dot(row, &p)).collect())
            .collect();
        out.push(p);
        out
    };
    // a·(g x) + a0 >= 0 on P whenever a·x + a0 >= 0 on P
    let facet_orbit = |f: &Halfspace| -> Vec<Halfspace> {
        let mut out: Vec<Halfspace> = symmetries
            .iter()
            .map(|g| {
                let a = (0..k)
                    .map(|j| {
                        f.a.iter()
                            .zip(g)
                            .fold(Rational::zero(), |acc, (ai, row)| acc + ai * &row[j])
                    })
                    .collect();
                Halfspace::new(a, f.a0.clone()).normalized()
            })
            .collect();
        out.push(f.normalized());
        out
    };
    let n = map.first().map_or(0, Vec::len);
    let image = |x: &[Rational]| -> Vec<Rational> { map.iter().map(|row| dot(row, x)).collect() };
    // objective w·(M x) as a cost vector on x
    let pull_back = |w: &[Rational]| -> Vec<Rational> {
        (0..n)
            .map(|j| {
                w.iter()
                    .zip(map)
                    .fold(Rational::zero(), |acc, (wi, row)| acc + wi * &row[j])
            })
            .collect()
    };
    let region = lp::Region::new(a, b).map_err(|_| PolytopeError::EmptyInput)?;
    let optimize = |w: &[Rational]| -> Result<Vec<Rational>, PolytopeError> {
        region
            .minimize(&pull_back(w))
            .map(|(x, _)| image(&x))
            .ok_or(PolytopeError::UnboundedImage)
    };
    let start = image(&region.point());
    let mut points = vec![start.clone()];
    // grow an affinely independent set until every orthogonal direction is constant
    let mut constant: Vec<Vec<Rational>> = Vec::new();
    loop {
        let mut rows: Vec<Vec<Rational>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(&start).map(|(x, s)| x - s).collect())
            .collect();
        rows.extend(constant.iter().cloned());
        let (reduced, pivots) = rref(rows, k);
        let Some(w) = nullspace(&reduced, &pivots, k).into_iter().next() else {
            break;
        };
        let level = dot(&w, &start);
        let lo = optimize(&w)?;
        if dot(&w, &lo) != level {
            points.extend(orbit(lo));
            continue;
        }
        let neg: Vec<Rational> = w.iter().map(|c| -c).collect();
        let hi = optimize(&neg)?;
        if dot(&w, &hi) != level {
            points.extend(orbit(hi));
            continue;
        }
        constant.push(w);
    }

    let mut confirmed: HashSet<Halfspace> = HashSet::new();
    loop {
        points.sort();
        points.dedup();
        let hull = Hull::compute(&points);
        points = points
            .into_iter()
            .zip(&hull.is_vertex)
            .filter_map(|(p, &keep)| keep.then_some(p))
            .collect();
        let mut queried: HashSet<Halfspace> = HashSet::new();
        let mut found = Vec::new();
        for f in &hull.facets {
            let f = f.normalized();
            if confirmed.contains(&f) || queried.contains(&f) {
                continue;
            }
            let y = optimize(&f.a)?;
            if f.slack(&y).is_negative() {
                // the orbit of y violates every facet in the orbit of f
                queried.extend(facet_orbit(&f));
                found.extend(orbit(y));
            } else {
                confirmed.extend(facet_orbit(&f));
            }
        }
        if found.is_empty() {
            return Ok(VPolytope::from_vertices_unchecked(k, points));
        }
        points.extend(found);
    }
}

/// Coordinate projection followed by removal of non-extremal points.
pub fn project(v: &VPolytope, coords: &[usize]) -> Result<VPolytope, PolytopeError> {
    for (i, &c) in coords.iter().enumerate() {
        if c >= v.dim {
            return Err(PolytopeError::IndexOutOfRange { index: c, dim: v.dim });
        }
        if coords[..i].contains(&c) {
            return Err(PolytopeError::DuplicateIndex(c));
        }
    }
    let pts = v
        .vertices
        .iter()
        .map(|p| coords.iter().map(|&c| p[c].clone()).collect())
        .collect();
    VPolytope::new(coords.len(), pts)
}
