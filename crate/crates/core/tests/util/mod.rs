//! Shared test-side oracles. Everything here is independent of the library's
//! own gradient checker: central differences are recomputed per coordinate.

use chronocast_core::models::{Mode, NeuralParams, SequenceModel};
use chronocast_core::windows::SeqWindow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Step sizes tried per coordinate, finest first. A wrong analytic gradient
/// disagrees with central differences at every step size (its error does not
/// depend on h), so taking the best-agreeing step per coordinate preserves
/// bug detection while sidestepping the h-tradeoff between f64 roundoff
/// (dominant at small h) and truncation (dominant at large h).
pub const FD_STEPS: [f64; 5] = [1e-5, 3e-5, 1e-4, 3e-4, 1e-3];

/// Max over coordinates of the best-over-step-sizes relative error between
/// the model's analytic loss gradients and central finite differences.
///
/// Relative error per coordinate: |a - n| / max(1e-8, |a| + |n|).
pub fn max_grad_error(params: &NeuralParams, data: &[f64], steps: usize, target: f64) -> f64 {
    let features = data.len() / steps;
    let window = SeqWindow::new(data, steps, features).unwrap();
    let mut grads = params.zeros_like();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    params
        .accumulate_grads(window, target, Mode::Eval, &mut rng, &mut grads)
        .unwrap();
    let analytic = grads.flatten();
    let flat = params.flatten();

    let loss_at = |theta: &[f64]| -> f64 {
        let mut probe = params.clone();
        probe.assign_flat(theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let y = probe.predict(window, Mode::Eval, &mut rng).unwrap();
        (y - target) * (y - target)
    };

    let mut theta = flat.clone();
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let saved = theta[i];
        let mut best = f64::INFINITY;
        for &h in &FD_STEPS {
            theta[i] = saved + h;
            let plus = loss_at(&theta);
            theta[i] = saved - h;
            let minus = loss_at(&theta);
            let numeric = (plus - minus) / (2.0 * h);
            let rel = (analytic[i] - numeric).abs()
                / (analytic[i].abs() + numeric.abs()).max(1e-8);
            best = best.min(rel);
            if best < 1e-7 {
                break;
            }
        }
        theta[i] = saved;
        worst = worst.max(best);
    }
    worst
}

/// ReLU networks are not differentiable where a pre-activation is exactly
/// zero; a config whose units sit within `margin` of a kink would let a
/// +-h probe flip the unit, voiding the finite-difference comparison.
pub fn fnn_kink_safe(params: &NeuralParams, data: &[f64], margin: f64) -> bool {
    let NeuralParams::Fnn(p) = params else {
        return true;
    };
    let mut pre1 = p.hidden1.bias.clone();
    p.hidden1.weights.matvec_acc(data, &mut pre1);
    if pre1.iter().any(|v| v.abs() < margin) {
        return false;
    }
    let act1: Vec<f64> = pre1.iter().map(|&v| v.max(0.0)).collect();
    let mut pre2 = p.hidden2.bias.clone();
    p.hidden2.weights.matvec_acc(&act1, &mut pre2);
    pre2.iter().all(|v| v.abs() >= margin)
}
