//! Central-difference verification of analytic gradients.

use crate::error::{Error, Result};

/// Compare `analytic` against central differences of `f` at `params`.
///
/// Per coordinate the numeric derivative is `(f(θ+h) - f(θ-h)) / 2h` and the
/// reported figure is the maximum over coordinates of
/// `|analytic - numeric| / max(1e-8, |analytic| + |numeric|)`.
pub fn grad_check<F>(mut f: F, analytic: &[f64], params: &[f64], h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if analytic.len() != params.len() {
        return Err(Error::Shape(format!(
            "grad_check: {} analytic entries for {} parameters",
            analytic.len(),
            params.len()
        )));
    }
    let mut theta = params.to_vec();
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let saved = theta[i];
        theta[i] = saved + h;
        let plus = f(&theta)?;
        theta[i] = saved - h;
        let minus = f(&theta)?;
        theta[i] = saved;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::Numeric(format!(
                "grad_check: non-finite objective near coordinate {i}"
            )));
        }
        let numeric = (plus - minus) / (2.0 * h);
        let denom = (analytic[i].abs() + numeric.abs()).max(1e-8);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_matches_closed_form() {
        // f(x) = x^2 at x = 3, analytic gradient 2x = 6.
        let err = grad_check(|p| Ok(p[0] * p[0]), &[6.0], &[3.0], 1e-5).unwrap();
        assert!(err < 1e-9, "error {err}");
    }

    #[test]
    fn doubled_gradient_reports_one_third() {
        // |2g - g| / (|2g| + |g|) = 1/3 for any nonzero g.
        let err = grad_check(|p| Ok(p[0] * p[0]), &[12.0], &[3.0], 1e-5).unwrap();
        assert!((err - 1.0 / 3.0).abs() < 1e-6, "error {err}");
    }

    #[test]
    fn constant_function_zero_error() {
        let err = grad_check(|_| Ok(4.2), &[0.0, 0.0], &[1.0, -1.0], 1e-5).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let res = grad_check(|p| Ok(1.0 / (p[0] - p[0])), &[0.0], &[1.0], 1e-5);
        assert!(matches!(res, Err(Error::Numeric(_))));
    }

    #[test]
    fn multivariate_polynomial() {
        // f(x, y) = x^2 y + y^3; df/dx = 2xy, df/dy = x^2 + 3y^2.
        let at = [1.3, -0.7];
        let analytic = [2.0 * at[0] * at[1], at[0] * at[0] + 3.0 * at[1] * at[1]];
        let err = grad_check(
            |p| Ok(p[0] * p[0] * p[1] + p[1] * p[1] * p[1]),
            &analytic,
            &at,
            1e-5,
        )
        .unwrap();
        assert!(err < 1e-8, "error {err}");
    }
}
