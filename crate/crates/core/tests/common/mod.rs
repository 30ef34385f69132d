//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the polytope or elliptope algorithms under test:
//! facets come from brute force over vertex subsets or from Fourier-Motzkin
//! elimination, vertices from brute force over constraint subsets.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use corrgeo::rational::{self, Rational};
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// `a·x + a0 >= 0`, scaled so the first nonzero entry of `(a, a0)` has
/// absolute value one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    pub a: Vec<Rational>,
    pub a0: Rational,
}

impl Row {
    pub fn new(a: Vec<Rational>, a0: Rational) -> Row {
        let pivot = a.iter().chain(std::iter::once(&a0)).find(|c| !c.is_zero()).cloned();
        match pivot {
            Some(p) => {
                let s = p.abs();
                Row {
                    a: a.iter().map(|c| c / &s).collect(),
                    a0: a0 / s,
                }
            }
            None => Row { a, a0 },
        }
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        rational::dot(&self.a, x) + &self.a0
    }
}

pub fn canonical(h: &corrgeo::polytope::Halfspace) -> Row {
    Row::new(h.a.clone(), h.a0.clone())
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rational::int(x)).collect()
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Unique solution of `M x = rhs`, if there is one.
pub fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.first()?.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..n {
        let p = (r..aug.len()).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(r, p);
        let inv = Rational::one() / &aug[r][c];
        for k in 0..=n {
            aug[r][k] *= &inv;
        }
        for i in 0..aug.len() {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for k in 0..=n {
                    let t = &f * &aug[r][k];
                    aug[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n].clone()).collect())
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the affine hull of `points`.
pub fn affine_dim(points: &[Vec<Rational>]) -> usize {
    let Some(p0) = points.first() else { return 0 };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        rank(&diffs)
    }
}

/// Facets of a full-dimensional `conv(points)` by brute force: every
/// hyperplane through `d` affinely independent points that leaves all points
/// on one side and touches an affinely `d-1`-dimensional subset.
pub fn brute_facets(points: &[Vec<Rational>]) -> BTreeSet<Row> {
    let d = points[0].len();
    assert_eq!(affine_dim(points), d, "brute_facets needs a full-dimensional hull");
    let mut out = BTreeSet::new();
    for s in subsets(points.len(), d) {
        // normal (a, a0) spans the kernel of [p | 1]; rank d means the chosen
        // points are affinely independent
        let rows: Vec<Vec<Rational>> = s
            .iter()
            .map(|&i| {
                let mut r = points[i].clone();
                r.push(Rational::one());
                r
            })
            .collect();
        let Some(normal) = kernel_vector(&rows, d + 1) else { continue };
        let a = normal[..d].to_vec();
        let a0 = normal[d].clone();
        let slacks: Vec<Rational> = points.iter().map(|p| rational::dot(&a, p) + &a0).collect();
        let neg = slacks.iter().any(|s| s.is_negative());
        let pos = slacks.iter().any(|s| s.is_positive());
        match (neg, pos) {
            (false, true) => {
                out.insert(Row::new(a, a0));
            }
            (true, false) => {
                out.insert(Row::new(a.iter().map(|c| -c).collect(), -a0));
            }
            _ => {}
        }
    }
    out
}

/// The kernel vector of a matrix of rank `cols - 1`, or `None` for any other
/// rank. One reduction to row echelon form.
pub fn kernel_vector(rows: &[Vec<Rational>], cols: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for k in c..cols {
            m[r][k] *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let t = &f * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if r + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = -&m[row][free];
    }
    Some(v)
}

/// Vertices of `{ x : row·x + a0 >= 0 }` by brute force over `d`-subsets of
/// constraints made tight. Equalities are given as `eqs` and always tight.
pub fn brute_vertices(dim: usize, ineqs: &[Row], eqs: &[Row]) -> BTreeSet<Vec<Rational>> {
    let eq_rank = if eqs.is_empty() {
        0
    } else {
        rank(&eqs.iter().map(|e| e.a.clone()).collect::<Vec<_>>())
    };
    let mut out = BTreeSet::new();
    for s in subsets(ineqs.len(), dim - eq_rank) {
        let tight: Vec<&Row> = eqs.iter().chain(s.iter().map(|&i| &ineqs[i])).collect();
        let m: Vec<Vec<Rational>> = tight.iter().map(|r| r.a.clone()).collect();
        let rhs: Vec<Rational> = tight.iter().map(|r| -&r.a0).collect();
        let Some(x) = solve(&m, &rhs) else { continue };
        if ineqs.iter().all(|r| !r.slack(&x).is_negative()) && eqs.iter().all(|r| r.slack(&x).is_zero()) {
            out.insert(x);
        }
    }
    out
}

/// Facets of `conv(points)` by Fourier-Motzkin elimination of the convex
/// weights from `x = Σ λ_i p_i, Σ λ_i = 1, λ >= 0`, then discarding implied
/// rows (those whose tight points do not span a facet). Kohler's rule prunes
/// during elimination: after `k` eliminations a row combining more than
/// `k + 1` of the original inequalities is redundant.
pub fn fm_facets(points: &[Vec<Rational>]) -> BTreeSet<Row> {
    type Constraint = (Vec<Rational>, Rational, BTreeSet<usize>);
    let d = points[0].len();
    let m = points.len();
    let n = d + m;
    // rows over (x, λ) with constant term; eq rows mean = 0
    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for j in 0..d {
        let mut r = vec![Rational::zero(); n];
        r[j] = Rational::one();
        for (i, p) in points.iter().enumerate() {
            r[d + i] = -p[j].clone();
        }
        eqs.push((r, Rational::zero()));
    }
    let mut sum = vec![Rational::zero(); n];
    for i in 0..m {
        sum[d + i] = Rational::one();
    }
    eqs.push((sum, -Rational::one()));
    let mut ineqs: Vec<Constraint> = (0..m)
        .map(|i| {
            let mut r = vec![Rational::zero(); n];
            r[d + i] = Rational::one();
            (r, Rational::zero(), BTreeSet::from([i]))
        })
        .collect();

    let mut eliminated = 0;
    for v in d..n {
        if let Some(k) = eqs.iter().position(|(r, _)| !r[v].is_zero()) {
            let (er, ec) = eqs.remove(k);
            let sub = |r: &mut Vec<Rational>, c: &mut Rational| {
                if r[v].is_zero() {
                    return;
                }
                let f = &r[v] / &er[v];
                for (x, y) in r.iter_mut().zip(&er) {
                    *x -= &f * y;
                }
                *c -= &f * &ec;
            };
            eqs.iter_mut().for_each(|(r, c)| sub(r, c));
            ineqs.iter_mut().for_each(|(r, c, _)| sub(r, c));
            continue;
        }
        eliminated += 1;
        let (zero, rest): (Vec<_>, Vec<_>) = ineqs.into_iter().partition(|(r, _, _)| r[v].is_zero());
        let (pos, neg): (Vec<_>, Vec<_>) = rest.into_iter().partition(|(r, _, _)| r[v].is_positive());
        let mut next = std::collections::BTreeMap::new();
        for (r, c, h) in zero {
            next.entry(Row::new(r, c)).or_insert(h);
        }
        for (pr, pc, ph) in &pos {
            for (nr, nc, nh) in &neg {
                let h: BTreeSet<usize> = ph.union(nh).copied().collect();
                if h.len() > eliminated + 1 {
                    continue;
                }
                let (fp, fn_) = (-&nr[v], pr[v].clone());
                let r: Vec<Rational> = pr.iter().zip(nr).map(|(a, b)| &fp * a + &fn_ * b).collect();
                let c = &fp * pc + &fn_ * nc;
                next.entry(Row::new(r, c)).or_insert(h);
            }
        }
        ineqs = next.into_iter().map(|(r, h)| (r.a, r.a0, h)).collect();
    }
    let dim = affine_dim(points);
    ineqs
        .into_iter()
        .map(|(r, c, _)| Row::new(r[..d].to_vec(), c))
        .filter(|row| row.a.iter().any(|c| !c.is_zero()))
        .filter(|row| {
            let tight: Vec<Vec<Rational>> = points.iter().filter(|p| row.slack(p).is_zero()).cloned().collect();
            !tight.is_empty() && affine_dim(&tight) + 1 == dim
        })
        .collect()
}

/// Uniform rational in `[lo, hi]` with denominator at most `max_den`.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(lo * q..=hi * q);
    rational::ratio(p, q)
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, lo: i64, hi: i64, max_den: i64) -> Vec<Rational> {
    (0..dim).map(|_| random_rational(rng, lo, hi, max_den)).collect()
}

/// Determinant of `[[1, x, y], [x, 1, z], [y, z, 1]]` by cofactor expansion
/// along the first row.
pub fn det3(c: [f64; 3]) -> f64 {
    let [x, y, z] = c;
    let m = [[1.0, x, y], [x, 1.0, z], [y, z, 1.0]];
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Smallest eigenvalue of the correlation matrix.
pub fn min_eigenvalue(c: [f64; 3]) -> f64 {
    let [x, y, z] = c;
    let m = nalgebra::Matrix3::new(1.0, x, y, x, 1.0, z, y, z, 1.0);
    m.symmetric_eigenvalues().min()
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> corrgeo::quantum::CMatrix {
    let x = corrgeo::quantum::CMatrix::from_fn(d, d, |_, _| {
        num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&x + x.adjoint()) * num_complex::Complex64::new(0.5, 0.0)
}

/// `G G† / tr(G G†)` for a random complex `G`: a full-rank density matrix.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> corrgeo::quantum::DensityOperator {
    let g = corrgeo::quantum::CMatrix::from_fn(d, d, |_, _| {
        num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut m = m / tr;
    // remove rounding asymmetry before validation
    m = (&m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    corrgeo::quantum::DensityOperator::new(m).expect("valid density matrix")
}

/// Random unit vector, uniform on the sphere.
pub fn random_direction<R: Rng>(rng: &mut R) -> corrgeo::quantum::Direction {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    corrgeo::quantum::Direction::from_spherical(z.acos(), phi)
}
