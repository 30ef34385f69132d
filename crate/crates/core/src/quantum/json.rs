//! Complex matrices and vectors as JSON arrays of `[re, im]` pairs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CMatrix, CVector};

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err("ragged matrix rows".into());
    }
    Ok(DMatrix::from_fn(n, m, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    matrix_to_rows(m).serialize(s)
}

pub fn deserialize_matrix<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
    let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
    matrix_from_rows(&rows).map_err(D::Error::custom)
}

pub fn serialize_vector<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(pair).collect::<Vec<_>>().serialize(s)
}

pub fn deserialize_vector<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
    let entries: Vec<[f64; 2]> = Vec::deserialize(d)?;
    Ok(DVector::from_iterator(
        entries.len(),
        entries.iter().map(|p| Complex64::new(p[0], p[1])),
    ))
}
