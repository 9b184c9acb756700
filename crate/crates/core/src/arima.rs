//! ARIMA(p,d,q) baseline fit by conditional least squares.
//!
//! The conditional sum of squares treats residuals before max(p,q) as zero
//! and minimizes the one-step squared residuals of the differenced series.
//! Pure-AR models solve ordinary least squares in closed form; models with
//! an MA part run a damped (Levenberg-Marquardt) least-squares iteration
//! from a zero start, accepting only improving steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model order: AR terms, differencing passes, MA terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        let order = ArimaOrder { p, d, q };
        order.validate()?;
        Ok(order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d > 2 {
            return Err(Error::Domain(format!(
                "differencing order must be 0, 1, or 2, got {}",
                self.d
            )));
        }
        // A model must do something: have AR/MA structure or difference.
        if self.p + self.q == 0 && self.d == 0 {
            return Err(Error::Domain(
                "order (0,0,0) specifies no model at all".into(),
            ));
        }
        Ok(())
    }

    /// Estimated parameter count (intercept + AR + MA), the `k` in AIC.
    pub fn k(&self) -> usize {
        self.p + self.q + 1
    }
}

/// Fit summary kept alongside the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Conditional sum of squared residuals at the optimum.
    pub ssr: f64,
    /// n_eff * ln(ssr / n_eff) + 2k, with n_eff the residual count.
    pub aic: f64,
    pub n_eff: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub residual_variance: f64,
    pub diagnostics: FitDiagnostics,
    /// Accepted objective values per optimizer iteration (closed-form fits
    /// record a single entry). Not persisted in checkpoints.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

/// Apply `d` rounds of first differences.
pub fn difference(series: &[f64], d: usize) -> Result<Vec<f64>> {
    if series.len() <= d {
        return Err(Error::Domain(format!(
            "cannot difference {} points {d} times",
            series.len()
        )));
    }
    let mut w = series.to_vec();
    for _ in 0..d {
        w = w.windows(2).map(|pair| pair[1] - pair[0]).collect();
    }
    Ok(w)
}

/// Invert `d` rounds of differencing for a one-step forecast on the
/// differenced scale, given the undifferenced history.
pub fn undifference(forecast: f64, history: &[f64], d: usize) -> Result<f64> {
    if history.len() < d {
        return Err(Error::Domain(format!(
            "undifferencing order {d} needs at least {d} history values, got {}",
            history.len()
        )));
    }
    // The next value of each difference level is the forecast plus the last
    // value of every lower level.
    let mut level = history.to_vec();
    let mut lasts = Vec::with_capacity(d);
    for _ in 0..d {
        lasts.push(*level.last().expect("length checked above"));
        level = level.windows(2).map(|pair| pair[1] - pair[0]).collect();
    }
    Ok(forecast + lasts.iter().sum::<f64>())
}

/// Conditional one-step residuals of the differenced series `w` under the
/// given coefficients; entries before max(p,q) stay zero.
fn css_residuals(w: &[f64], intercept: f64, ar: &[f64], ma: &[f64], out: &mut [f64]) {
    let p = ar.len();
    let q = ma.len();
    let t0 = p.max(q);
    debug_assert_eq!(out.len(), w.len());
    for e in out.iter_mut().take(t0) {
        *e = 0.0;
    }
    for t in t0..w.len() {
        let mut pred = intercept;
        for (i, phi) in ar.iter().enumerate() {
            pred += phi * w[t - 1 - i];
        }
        for (j, theta) in ma.iter().enumerate() {
            pred += theta * out[t - 1 - j];
        }
        out[t] = w[t] - pred;
    }
}

fn css_objective(w: &[f64], intercept: f64, ar: &[f64], ma: &[f64], scratch: &mut [f64]) -> f64 {
    css_residuals(w, intercept, ar, ma, scratch);
    let t0 = ar.len().max(ma.len());
    scratch[t0..].iter().map(|e| e * e).sum()
}

/// Solve a small symmetric linear system by Gaussian elimination with
/// partial pivoting. A zero pivot (singular/degenerate design) fixes that
/// unknown at zero rather than failing, which keeps constant-series fits
/// well-defined.
#[allow(clippy::needless_range_loop)] // in-place elimination over row pairs
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let mut skipped = vec![false; n];
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-12 {
            skipped[col] = true;
            continue;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        if skipped[col] {
            x[col] = 0.0;
            continue;
        }
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    x
}

fn check_length(series_len: usize, order: ArimaOrder) -> Result<usize> {
    if series_len <= order.d {
        return Err(Error::InsufficientData(format!(
            "{series_len} points cannot be differenced {} times",
            order.d
        )));
    }
    let n_w = series_len - order.d;
    let required = 10 * order.k();
    if n_w < required {
        return Err(Error::InsufficientData(format!(
            "css fit of ({},{},{}) needs at least {required} differenced points, got {n_w}",
            order.p, order.d, order.q
        )));
    }
    Ok(n_w)
}

fn finish_model(
    order: ArimaOrder,
    intercept: f64,
    ar: Vec<f64>,
    ma: Vec<f64>,
    w: &[f64],
    iterations: usize,
    trace: Vec<f64>,
) -> ArimaModel {
    let mut resid = vec![0.0; w.len()];
    css_residuals(w, intercept, &ar, &ma, &mut resid);
    let t0 = order.p.max(order.q);
    let n_eff = w.len() - t0;
    let ssr: f64 = resid[t0..].iter().map(|e| e * e).sum();
    let variance = ssr / n_eff as f64;
    let aic = n_eff as f64 * (ssr / n_eff as f64).max(f64::MIN_POSITIVE).ln()
        + 2.0 * order.k() as f64;
    ArimaModel {
        order,
        intercept,
        ar,
        ma,
        residual_variance: variance,
        diagnostics: FitDiagnostics {
            ssr,
            aic,
            n_eff,
            iterations,
        },
        objective_trace: trace,
    }
}

/// Closed-form OLS for pure AR models: regress w_t on [1, w_{t-1..t-p}].
fn fit_ar_ols(w: &[f64], order: ArimaOrder) -> ArimaModel {
    let p = order.p;
    let k = p + 1;
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for t in p..w.len() {
        let mut row = Vec::with_capacity(k);
        row.push(1.0);
        for i in 0..p {
            row.push(w[t - 1 - i]);
        }
        for a in 0..k {
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
            xty[a] += row[a] * w[t];
        }
    }
    let beta = solve_linear(xtx, xty);
    let intercept = beta[0];
    let ar = beta[1..].to_vec();
    let mut scratch = vec![0.0; w.len()];
    let obj = css_objective(w, intercept, &ar, &[], &mut scratch);
    finish_model(order, intercept, ar, vec![], w, 1, vec![obj])
}

const LM_MAX_ITER: usize = 200;
const LM_MAX_BACKTRACK: usize = 25;

/// Damped least squares on [intercept, ar..., ma...] from a zero start.
/// Only improving steps are accepted, so the objective trace never rises.
fn fit_css_lm(w: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    let (p, q) = (order.p, order.q);
    let k = order.k();
    let mut beta = vec![0.0; k];
    let mut scratch = vec![0.0; w.len()];
    let objective = |beta: &[f64], scratch: &mut [f64]| -> f64 {
        css_objective(w, beta[0], &beta[1..1 + p], &beta[1 + p..], scratch)
    };
    let t0 = p.max(q);
    let n_eff = w.len() - t0;
    let mut current = objective(&beta, &mut scratch);
    let mut trace = vec![current];
    let mut lambda = 1e-3;
    let mut iterations = 0;

    for _ in 0..LM_MAX_ITER {
        iterations += 1;
        // Numerical Jacobian of the residual vector, central differences.
        let mut jac = vec![vec![0.0; k]; n_eff];
        let mut plus = vec![0.0; w.len()];
        let mut minus = vec![0.0; w.len()];
        for j in 0..k {
            let h = 1e-6 * beta[j].abs().max(1.0);
            let mut bp = beta.clone();
            bp[j] += h;
            css_residuals(w, bp[0], &bp[1..1 + p], &bp[1 + p..], &mut plus);
            bp[j] = beta[j] - h;
            css_residuals(w, bp[0], &bp[1..1 + p], &bp[1 + p..], &mut minus);
            for t in 0..n_eff {
                jac[t][j] = (plus[t0 + t] - minus[t0 + t]) / (2.0 * h);
            }
        }
        css_residuals(w, beta[0], &beta[1..1 + p], &beta[1 + p..], &mut scratch);
        let mut jtj = vec![vec![0.0; k]; k];
        let mut jtr = vec![0.0; k];
        for t in 0..n_eff {
            for a in 0..k {
                for b in 0..k {
                    jtj[a][b] += jac[t][a] * jac[t][b];
                }
                jtr[a] += jac[t][a] * scratch[t0 + t];
            }
        }

        let mut improved = false;
        for _ in 0..LM_MAX_BACKTRACK {
            let mut damped = jtj.clone();
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-12);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let delta = solve_linear(damped, rhs);
            let candidate: Vec<f64> = beta.iter().zip(&delta).map(|(b, d)| b + d).collect();
            let value = objective(&candidate, &mut scratch);
            if value.is_finite() && value < current {
                beta = candidate;
                current = value;
                trace.push(current);
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            // Damping exhausted: a stationary point within float resolution.
            break;
        }
        let prev = trace[trace.len() - 2];
        if prev - current <= 1e-12 * prev.max(1.0) {
            break;
        }
    }

    if iterations >= LM_MAX_ITER && trace.len() >= 2 {
        let prev = trace[trace.len() - 2];
        if prev - current > 1e-9 * prev.max(1.0) {
            return Err(Error::Convergence(format!(
                "css fit of ({p},{},{q}) still improving after {LM_MAX_ITER} iterations; \
                 best ssr {current:.6e}, coefficients {beta:?}",
                order.d
            )));
        }
    }
    Ok(finish_model(
        order,
        beta[0],
        beta[1..1 + p].to_vec(),
        beta[1 + p..].to_vec(),
        w,
        iterations,
        trace,
    ))
}

/// Fit by conditional least squares. Pure AR orders use the closed form;
/// anything with an MA part runs the damped iteration.
pub fn fit_css(series: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    order.validate()?;
    check_length(series.len(), order)?;
    let w = difference(series, order.d)?;
    if order.q == 0 {
        Ok(fit_ar_ols(&w, order))
    } else {
        fit_css_lm(&w, order)
    }
}

/// The iterative path regardless of order; exposed so the closed-form and
/// iterative solutions can be cross-checked on pure AR data.
pub fn fit_css_iterative(series: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    order.validate()?;
    check_length(series.len(), order)?;
    let w = difference(series, order.d)?;
    fit_css_lm(&w, order)
}

/// One-step-ahead point forecast on the original scale. The residual history
/// is reconstructed by filtering the provided observations, so walking a test
/// set feeds actual values (not forecasts) forward.
pub fn forecast_one_step(model: &ArimaModel, history: &[f64]) -> Result<f64> {
    let ArimaOrder { p, d, q } = model.order;
    if history.len() < p + d || history.len() <= d {
        return Err(Error::Domain(format!(
            "one-step forecast needs at least {} observations, got {}",
            p + d,
            history.len()
        )));
    }
    let w = difference(history, d)?;
    let n = w.len();
    let mut resid = vec![0.0; n];
    css_residuals(&w, model.intercept, &model.ar, &model.ma, &mut resid);
    let mut next = model.intercept;
    for (i, phi) in model.ar.iter().enumerate() {
        next += phi * w[n - 1 - i];
    }
    let t0 = p.max(q);
    for (j, theta) in model.ma.iter().enumerate() {
        if n > j && n - 1 - j >= t0 {
            next += theta * resid[n - 1 - j];
        }
    }
    undifference(next, history, d)
}

/// Grid-search the order by AIC. Ties prefer smaller p+q, then smaller d,
/// then lexicographically smaller (p, q). Orders whose fit fails are skipped;
/// if every fit fails the selection itself is an error.
pub fn select_order(
    series: &[f64],
    p_grid: &[usize],
    d_grid: &[usize],
    q_grid: &[usize],
) -> Result<(ArimaOrder, ArimaModel)> {
    if p_grid.is_empty() || d_grid.is_empty() || q_grid.is_empty() {
        return Err(Error::Config("order grid must be non-empty".into()));
    }
    let mut best: Option<(ArimaOrder, ArimaModel)> = None;
    let mut failures = Vec::new();
    for &p in p_grid {
        for &d in d_grid {
            for &q in q_grid {
                let Ok(order) = ArimaOrder::new(p, d, q) else {
                    continue;
                };
                match fit_css(series, order) {
                    Ok(model) => {
                        let better = match &best {
                            None => true,
                            Some((b_order, b_model)) => {
                                let key = (
                                    model.diagnostics.aic,
                                    (order.p + order.q) as f64,
                                    order.d as f64,
                                    order.p as f64,
                                    order.q as f64,
                                );
                                let best_key = (
                                    b_model.diagnostics.aic,
                                    (b_order.p + b_order.q) as f64,
                                    b_order.d as f64,
                                    b_order.p as f64,
                                    b_order.q as f64,
                                );
                                key < best_key
                            }
                        };
                        if better {
                            best = Some((order, model));
                        }
                    }
                    Err(e) => failures.push(format!("({p},{d},{q}): {e}")),
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::Search(format!(
            "every order in the grid failed to fit: {}",
            failures.join("; ")
        ))
    })
}

/// The default selection grid: p, q in {0,1,2}, d in {0,1}.
pub fn select_order_default(series: &[f64]) -> Result<(ArimaOrder, ArimaModel)> {
    select_order(series, &[0, 1, 2], &[0, 1], &[0, 1, 2])
}
