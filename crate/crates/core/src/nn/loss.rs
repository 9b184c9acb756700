//! Mean squared error and its gradient.

use crate::error::{Error, Result};

fn check(pred: &[f64], target: &[f64]) -> Result<usize> {
    if pred.len() != target.len() {
        return Err(Error::Shape(format!(
            "loss inputs have lengths {} and {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Domain("loss over empty vectors".into()));
    }
    Ok(pred.len())
}

/// `(1/n) Σ (pred_i - target_i)²`
pub fn mse_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    let n = check(pred, target)?;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / n as f64)
}

/// Gradient of `mse_loss` with respect to `pred`: `2 (pred_i - target_i) / n`.
pub fn mse_grad(pred: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    let n = check(pred, target)? as f64;
    Ok(pred
        .iter()
        .zip(target)
        .map(|(p, t)| 2.0 * (p - t) / n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::grad_check;

    #[test]
    fn zero_at_equality() {
        let v = [0.3, -1.2, 7.0];
        assert_eq!(mse_loss(&v, &v).unwrap(), 0.0);
        assert_eq!(mse_grad(&v, &v).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn hand_computed() {
        assert_eq!(mse_loss(&[2.0], &[0.0]).unwrap(), 4.0);
        assert_eq!(mse_grad(&[2.0], &[0.0]).unwrap(), vec![4.0]);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(mse_loss(&[], &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn grad_matches_finite_differences() {
        let target = [0.7, -0.4, 1.9, 0.0];
        let pred = [0.1, 0.2, -0.5, 2.0];
        let analytic = mse_grad(&pred, &target).unwrap();
        let err = grad_check(
            |p| mse_loss(p, &target),
            &analytic,
            &pred,
            1e-5,
        )
        .unwrap();
        assert!(err < 1e-8, "max relative error {err}");
    }

    #[test]
    fn nonnegative_and_zero_iff_equal() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 3.0 + 1e-9];
        assert!(mse_loss(&a, &b).unwrap() > 0.0);
    }
}
