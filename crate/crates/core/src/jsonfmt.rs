//! JSON encodings shared by the CLI contract: complex numbers as `[re, im]`
//! pairs, matrices as row-major nested arrays of such pairs.

use crate::{C64, CMatrix, Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Serde adapter for a single complex scalar as `[re, im]`.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(value: &C64, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [value.re, value.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(C64::new(re, im))
    }
}

/// Serde adapter for `Vec<C64>` as a list of `[re, im]` pairs.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        values: &[C64],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = values.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Matrix as row-major nested arrays of `[re, im]`; the dimension is inferred.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::json!(rows)
}

pub fn matrix_from_json(v: &serde_json::Value) -> Result<CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(v.clone())?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::NotSquare);
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::invalid("matrix", "ragged rows"));
    }
    let m = rows[0].len();
    Ok(CMatrix::from_fn(n, m, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Tuple of matrices as a JSON array of matrices.
pub fn tuple_from_json(v: &serde_json::Value) -> Result<Vec<CMatrix>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::invalid("operator tuple", "expected an array of matrices"))?;
    arr.iter().map(matrix_from_json).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, -2.5),
                C64::new(3.0, 4.0),
                C64::new(0.0, 0.0),
            ],
        );
        let v = matrix_to_json(&m);
        let back = matrix_from_json(&v).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn ragged_rejected() {
        let v = serde_json::json!([[[1.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]]);
        assert!(matrix_from_json(&v).is_err());
    }
}
