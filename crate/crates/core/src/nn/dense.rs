//! Affine layer: `y = W x + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::linalg::Matrix;

/// Weights and bias of one affine layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        DenseParams {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![0.0; out_dim],
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }
}

/// `W x + b` with shape checking.
pub fn dense_forward(x: &[f64], p: &DenseParams) -> Result<Vec<f64>> {
    if x.len() != p.in_dim() {
        return Err(Error::Shape(format!(
            "dense layer expects input of length {}, got {}",
            p.in_dim(),
            x.len()
        )));
    }
    if p.bias.len() != p.out_dim() {
        return Err(Error::Shape(format!(
            "dense bias has length {}, expected {}",
            p.bias.len(),
            p.out_dim()
        )));
    }
    let mut out = p.bias.clone();
    p.weights.matvec_acc(x, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_pass_bias_through() {
        let p = DenseParams {
            weights: Matrix::zeros(2, 3),
            bias: vec![0.4, -1.5],
        };
        assert_eq!(dense_forward(&[9.0, 9.0, 9.0], &p).unwrap(), vec![0.4, -1.5]);
    }

    #[test]
    fn identity_weights() {
        let p = DenseParams {
            weights: Matrix::identity(3),
            bias: vec![0.0; 3],
        };
        let x = [1.0, -2.0, 0.5];
        assert_eq!(dense_forward(&x, &p).unwrap(), x.to_vec());
    }

    #[test]
    fn hand_computed_value() {
        // W=[[1,2]], b=[3], x=[4,5] -> 1*4 + 2*5 + 3 = 17
        let p = DenseParams {
            weights: Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(),
            bias: vec![3.0],
        };
        assert_eq!(dense_forward(&[4.0, 5.0], &p).unwrap(), vec![17.0]);
    }

    #[test]
    fn shape_mismatch() {
        let p = DenseParams::zeros(1, 2);
        assert!(matches!(
            dense_forward(&[1.0, 2.0, 3.0], &p),
            Err(Error::Shape(_))
        ));
    }
}
