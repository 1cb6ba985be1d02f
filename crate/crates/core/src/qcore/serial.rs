use super::{CMat, C64};
use crate::error::{QcError, Result};
use serde::{Deserialize, Serialize};

/// Square complex matrix as `{"dim": d, "data": [re, im, ...]}`, row-major
/// with interleaved real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(QcError::Shape(format!("expected square matrix, got {:?}", m.shape())));
        }
        let d = m.nrows();
        let mut data = Vec::with_capacity(2 * d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(m[(i, j)].re);
                data.push(m[(i, j)].im);
            }
        }
        Ok(MatrixJson { dim: d, data })
    }

    pub fn to_mat(&self) -> Result<CMat> {
        let d = self.dim;
        if self.data.len() != 2 * d * d {
            return Err(QcError::Shape(format!(
                "matrix of dim {d} needs {} numbers, got {}",
                2 * d * d,
                self.data.len()
            )));
        }
        Ok(CMat::from_fn(d, d, |i, j| {
            let k = 2 * (i * d + j);
            C64::new(self.data[k], self.data[k + 1])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_json() {
        let m = CMat::from_fn(3, 3, |i, j| C64::new(i as f64 + 0.5, j as f64 - 0.25));
        let s = serde_json::to_string(&MatrixJson::from_mat(&m).unwrap()).unwrap();
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_mat().unwrap(), m);
    }

    #[test]
    fn rejects_wrong_length() {
        let bad = MatrixJson { dim: 2, data: vec![0.0; 7] };
        assert!(bad.to_mat().is_err());
    }
}
