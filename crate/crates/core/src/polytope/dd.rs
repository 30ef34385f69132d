//! Double description method on integer cones.
//!
//! Given rows `A` (m × n) of full column rank, [`extreme_rays`] returns the
//! extreme rays of the pointed cone `{ y : A y >= 0 }` as primitive integer
//! vectors. Constraints are inserted one at a time; adjacency of ray pairs is
//! decided combinatorially from the sets of tight constraints.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::{primitive, primitive_integer, Rational};

type Bits = Vec<u64>;

fn bits_new(m: usize) -> Bits {
    vec![0; m.div_ceil(64)]
}

fn bit_set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_count(a: &Bits) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Ray {
    v: Vec<BigInt>,
    tight: Bits,
}

fn eval(row: &[BigInt], v: &[BigInt]) -> BigInt {
    row.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Greedy choice of `n` linearly independent rows, scanning in order.
/// Returns `None` when the matrix does not have full column rank.
fn independent_rows(a: &[Vec<BigInt>], n: usize) -> Option<Vec<usize>> {
    let mut chosen = Vec::with_capacity(n);
    // Echelon basis of the span of the chosen rows, kept in rationals.
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut r: Vec<Rational> = row.iter().cloned().map(Rational::from_integer).collect();
        for (pc, b) in &basis {
            if !r[*pc].is_zero() {
                let f = r[*pc].clone() / &b[*pc];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pc, r));
            chosen.push(i);
            if chosen.len() == n {
                return Some(chosen);
            }
        }
    }
    None
}

/// Inverse of a square integer matrix as rational columns.
fn inverse_columns(m: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().cloned().map(Rational::from_integer).collect();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .expect("selected rows are independent");
        aug.swap(col, p);
        let inv = Rational::from_integer(1.into()) / &aug[col][col];
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    (0..n)
        .map(|j| (0..n).map(|i| aug[i][n + j].clone()).collect())
        .collect()
}

/// Extreme rays of `{ y : A y >= 0 }`. Returns `None` if `A` lacks full
/// column rank (the cone is not pointed). Output is sorted lexicographically.
pub fn extreme_rays(a: &[Vec<BigInt>]) -> Option<Vec<Vec<BigInt>>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if n == 0 {
        return Some(Vec::new());
    }
    let initial = independent_rows(a, n)?;
    let sub: Vec<Vec<BigInt>> = initial.iter().map(|&i| a[i].clone()).collect();
    let mut rays: Vec<Ray> = inverse_columns(&sub)
        .into_iter()
        .map(|col| {
            let v = primitive_integer(&col);
            let mut tight = bits_new(m);
            // column j of the inverse is tight on every initial row but the j-th
            for &row in &initial {
                if eval(&a[row], &v).is_zero() {
                    bit_set(&mut tight, row);
                }
            }
            Ray { v, tight }
        })
        .collect();

    let mut done = vec![false; m];
    for &i in &initial {
        done[i] = true;
    }
    for i in 0..m {
        if done[i] {
            continue;
        }
        let row = &a[i];
        let values: Vec<BigInt> = rays.iter().map(|r| eval(row, &r.v)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, val) in values.iter().enumerate() {
            if val.is_positive() {
                pos.push(k);
            } else if val.is_negative() {
                neg.push(k);
            } else {
                bit_set(&mut rays[k].tight, i);
            }
        }
        done[i] = true;
        if neg.is_empty() {
            continue;
        }
        // Rays tight on the constraints processed so far (excluding row i).
        let threshold = n.saturating_sub(2) as u32;
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = bits_and(&rays[p].tight, &rays[q].tight);
                if bits_count(&common) < threshold {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == q || !bits_subset(&common, &r.tight)
                });
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vq = &values[q];
                // vp > 0 > vq: vp * q - vq * p is tight on row i
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xq, xp)| vp * xq - vq * xp)
                    .collect();
                let v = primitive(v);
                let mut tight = common;
                bit_set(&mut tight, i);
                fresh.push(Ray { v, tight });
            }
        }
        let mut keep = vec![true; rays.len()];
        for &q in &neg {
            keep[q] = false;
        }
        let mut k = 0;
        rays.retain(|_| {
            let r = keep[k];
            k += 1;
            r
        });
        rays.extend(fresh);
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn positive_orthant() {
        let a = ints(&[&[1, 0], &[0, 1]]);
        let rays = extreme_rays(&a).unwrap();
        assert_eq!(rays, ints(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn square_cone_has_four_rays() {
        // homogenized unit square: t >= 0 implied, x >= 0, y >= 0, t - x >= 0, t - y >= 0
        let a = ints(&[&[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[1, 0, -1]]);
        let rays = extreme_rays(&a).unwrap();
        assert_eq!(rays, ints(&[&[1, 0, 0], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]]));
    }

    #[test]
    fn rank_deficient_input_is_rejected() {
        let a = ints(&[&[1, 1], &[2, 2]]);
        assert!(extreme_rays(&a).is_none());
    }

    #[test]
    fn redundant_constraints_do_not_add_rays() {
        let a = ints(&[&[1, 0], &[0, 1], &[1, 1], &[2, 1]]);
        assert_eq!(extreme_rays(&a).unwrap(), ints(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn empty_cone_intersection() {
        // x >= 0, -x >= 0, y >= 0, -y >= 0 -> only the origin, no rays
        let a = ints(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        assert!(extreme_rays(&a).unwrap().is_empty());
    }
}
