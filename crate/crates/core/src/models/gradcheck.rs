use serde::{Deserialize, Serialize};

/// A scalar loss over a flat parameter vector with an analytic gradient.
pub trait Objective {
    fn parameters(&self) -> Vec<f64>;
    fn loss_at(&self, params: &[f64]) -> f64;
    fn gradient_at(&self, params: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares the analytic gradient with central differences
/// `(f(θ + ε) - f(θ - ε)) / 2ε`, coordinate by coordinate.
pub fn gradient_check<O: Objective + ?Sized>(objective: &O, epsilon: f64) -> GradCheck {
    let theta = objective.parameters();
    let analytic = objective.gradient_at(&theta);
    assert_eq!(analytic.len(), theta.len(), "gradient length");
    let mut probe = theta.clone();
    let mut worst = GradCheck {
        max_relative_error: 0.0,
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
    };
    for i in 0..theta.len() {
        probe[i] = theta[i] + epsilon;
        let plus = objective.loss_at(&probe);
        probe[i] = theta[i] - epsilon;
        let minus = objective.loss_at(&probe);
        probe[i] = theta[i];
        let numeric = (plus - minus) / (2.0 * epsilon);
        let err = relative_error(analytic[i], numeric);
        if err > worst.max_relative_error {
            worst = GradCheck {
                max_relative_error: err,
                worst_index: i,
                analytic: analytic[i],
                numeric,
            };
        }
    }
    worst
}
