//! Exact rational simplex for problems in standard form `A x = b, x >= 0`.
//!
//! A revised simplex over sparse columns with an explicit basis inverse.
//! Pricing picks the most negative reduced cost and falls back to Bland's
//! rule (smallest eligible entering index, ratio ties broken by the smallest
//! basic variable) after a run of degenerate pivots, so it always terminates.
//! No tolerances are involved anywhere.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Outcome of a feasibility query on `A x = b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A basic feasible solution.
    Feasible(Vec<Rational>),
    /// Farkas certificate `y` with `yᵀA >= 0` componentwise and `yᵀb < 0`.
    Infeasible(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Optimum {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible(Vec<Rational>),
    Unbounded,
}

/// Degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 32;

#[derive(Debug, Clone)]
struct Simplex {
    /// Sparse columns: `n` structural ones followed by `m` artificials.
    columns: Vec<Vec<(usize, Rational)>>,
    n: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    /// Values of the basic variables.
    xb: Vec<Rational>,
}

impl Simplex {
    fn duals(&self, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        let m = self.basis.len();
        let mut y = vec![Rational::zero(); m];
        for (r, &bv) in self.basis.iter().enumerate() {
            let c = cost(bv);
            if c.is_zero() {
                continue;
            }
            for (yi, v) in y.iter_mut().zip(&self.binv[r]) {
                if !v.is_zero() {
                    *yi += &c * v;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cj: Rational, y: &[Rational]) -> Rational {
        self.columns[j]
            .iter()
            .fold(cj, |acc, (i, v)| acc - &y[*i] * v)
    }

    /// `B⁻¹ A_j`.
    fn direction(&self, j: usize) -> Vec<Rational> {
        self.binv
            .iter()
            .map(|row| {
                self.columns[j]
                    .iter()
                    .fold(Rational::zero(), |acc, (i, v)| {
                        if row[*i].is_zero() {
                            acc
                        } else {
                            acc + &row[*i] * v
                        }
                    })
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[Rational]) {
        let inv = Rational::one() / &u[r];
        for v in self.binv[r].iter_mut() {
            *v *= &inv;
        }
        self.xb[r] *= &inv;
        let prow = self.binv[r].clone();
        let pval = self.xb[r].clone();
        for (i, ui) in u.iter().enumerate() {
            if i == r || ui.is_zero() {
                continue;
            }
            for (v, p) in self.binv[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= ui * p;
                }
            }
            self.xb[i] -= ui * &pval;
        }
        self.basis[r] = j;
    }

    /// Minimizes over entering columns `0..allowed`; false when unbounded.
    fn run(&mut self, allowed: usize, cost: &dyn Fn(usize) -> Rational) -> bool {
        let mut degenerate = 0;
        loop {
            let y = self.duals(cost);
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, Rational)> = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let d = self.reduced_cost(j, cost(j), &y);
                if !d.is_negative() {
                    continue;
                }
                if entering.as_ref().is_none_or(|(_, best)| d < *best) {
                    entering = Some((j, d));
                }
                if bland {
                    break;
                }
            }
            let Some((j, _)) = entering else {
                return true;
            };
            let u = self.direction(j);
            let mut leave: Option<(usize, Rational)> = None;
            for (i, ui) in u.iter().enumerate() {
                if !ui.is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / ui;
                let better = match &leave {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, step)) = leave else {
                return false;
            };
            if step.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j, &u);
        }
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (&bv, v) in self.basis.iter().zip(&self.xb) {
            if bv < self.n {
                x[bv] = v.clone();
            }
        }
        x
    }
}

/// The feasible region `{ x >= 0 : A x = b }` with a basic feasible solution
/// already found, ready to be optimized along any number of objectives.
#[derive(Debug, Clone)]
pub struct Region {
    simplex: Simplex,
}

impl Region {
    /// Runs phase one. On infeasibility returns a Farkas certificate.
    pub fn new(a: &[Vec<Rational>], b: &[Rational]) -> Result<Region, Vec<Rational>> {
        assert_eq!(a.len(), b.len(), "row count mismatch");
        let m = a.len();
        let n = a.first().map_or(0, Vec::len);
        let flipped: Vec<bool> = b.iter().map(Signed::is_negative).collect();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n + m];
        for (i, row) in a.iter().enumerate() {
            assert_eq!(row.len(), n, "ragged constraint matrix");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    columns[j].push((i, if flipped[i] { -v } else { v.clone() }));
                }
            }
            columns[n + i].push((i, Rational::one()));
        }
        let mut simplex = Simplex {
            columns,
            n,
            basis: (n..n + m).collect(),
            binv: (0..m)
                .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
                .collect(),
            xb: b.iter().map(Signed::abs).collect(),
        };
        let phase_one = |j: usize| if j >= n { Rational::one() } else { Rational::zero() };
        simplex.run(n + m, &phase_one);
        let infeasibility = simplex
            .basis
            .iter()
            .zip(&simplex.xb)
            .filter(|(&bv, _)| bv >= n)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_positive() {
            // phase-one duals y' certify infeasibility of the flipped system;
            // z = -D y' certifies the original one
            let y = simplex.duals(&phase_one);
            return Err(y
                .into_iter()
                .zip(&flipped)
                .map(|(v, &flip)| if flip { v } else { -v })
                .collect());
        }
        // Drive zero-valued artificials out where possible; the rest sit on
        // redundant rows and can never leave or move.
        for r in 0..m {
            if simplex.basis[r] < n {
                continue;
            }
            let candidate = (0..n)
                .filter(|j| !simplex.basis.contains(j))
                .map(|j| (j, simplex.direction(j)))
                .find(|(_, u)| !u[r].is_zero());
            if let Some((j, u)) = candidate {
                simplex.pivot(r, j, &u);
            }
        }
        Ok(Region { simplex })
    }

    pub fn dim(&self) -> usize {
        self.simplex.n
    }

    /// The basic feasible solution found by phase one.
    pub fn point(&self) -> Vec<Rational> {
        self.simplex.solution()
    }

    /// Minimizes `cᵀx` starting from the stored basis; `None` when unbounded.
    pub fn minimize(&self, c: &[Rational]) -> Option<(Vec<Rational>, Rational)> {
        let n = self.simplex.n;
        assert_eq!(c.len(), n, "objective length mismatch");
        let mut s = self.simplex.clone();
        let cost = |j: usize| if j < n { c[j].clone() } else { Rational::zero() };
        if !s.run(n, &cost) {
            return None;
        }
        let x = s.solution();
        let value = c.iter().zip(&x).fold(Rational::zero(), |acc, (ci, xi)| acc + ci * xi);
        Some((x, value))
    }
}

pub fn feasibility(a: &[Vec<Rational>], b: &[Rational]) -> Feasibility {
    match Region::new(a, b) {
        Ok(region) => Feasibility::Feasible(region.point()),
        Err(y) => Feasibility::Infeasible(y),
    }
}

/// Minimizes `cᵀx` subject to `A x = b, x >= 0`.
pub fn minimize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Optimum {
    match Region::new(a, b) {
        Ok(region) => match region.minimize(c) {
            Some((x, value)) => Optimum::Optimal { x, value },
            None => Optimum::Unbounded,
        },
        Err(y) => Optimum::Infeasible(y),
    }
}
