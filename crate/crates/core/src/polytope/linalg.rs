use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form over the first `ncols` columns. Returns the
/// nonzero rows and their pivot columns; trailing columns beyond `ncols`
/// are carried along (used for augmented systems).
pub(crate) fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    // an augmented column can still hold a pivot (inconsistent system)
    if r < rows.len() {
        let width = rows[0].len();
        for c in ncols..width {
            if let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) {
                rows.swap(r, p);
                pivots.push(c);
                r += 1;
                break;
            }
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{ w : reduced · w = 0 }` restricted to the first `ncols` columns.
pub(crate) fn nullspace(reduced: &[Vec<Rational>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut w = vec![Rational::zero(); ncols];
            w[f] = Rational::one();
            for (row, &p) in reduced.iter().zip(pivots) {
                if p < ncols {
                    w[p] = -&row[f];
                }
            }
            w
        })
        .collect()
}

pub(crate) fn rank(rows: Vec<Vec<Rational>>) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    rref(rows, n).1.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, int};

    #[test]
    fn nullspace_is_annihilated() {
        let rows = vec![
            vec![int(1), int(2), int(3), int(4)],
            vec![int(2), int(4), int(6), int(8)],
            vec![int(0), int(1), int(1), int(0)],
        ];
        let (red, piv) = rref(rows.clone(), 4);
        assert_eq!(piv.len(), 2);
        let ns = nullspace(&red, &piv, 4);
        assert_eq!(ns.len(), 2);
        for w in &ns {
            for r in &rows {
                assert!(dot(r, w).is_zero());
            }
        }
    }

    #[test]
    fn detects_inconsistent_augmented_system() {
        // x = 1 and x = 2
        let rows = vec![vec![int(1), int(1)], vec![int(1), int(2)]];
        let (_, piv) = rref(rows, 1);
        assert_eq!(piv, vec![0, 1]);
    }
}
