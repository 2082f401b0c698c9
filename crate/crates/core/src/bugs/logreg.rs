use serde::{Deserialize, Serialize};

use crate::nn::ops::{bce_with_logit, sigmoid};
use crate::nn::tensor::dot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2: f64,
    pub epochs: usize,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1e-3,
            epochs: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Mean log-loss plus `l2 / 2 * |w|^2`; the bias is not penalized.
pub fn objective(model: &LogisticRegression, x: &[Vec<f64>], y: &[bool], l2: f64) -> f64 {
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| bce_with_logit(dot(&model.weights, xi) + model.bias, f64::from(u8::from(yi))))
        .sum::<f64>()
        / x.len().max(1) as f64;
    data + 0.5 * l2 * dot(&model.weights, &model.weights)
}

impl LogisticRegression {
    /// Full-batch gradient descent with step `1/L`, where `L` bounds the
    /// objective's curvature, so the objective never increases.
    /// Returns the model and the objective before each epoch plus the final value.
    pub fn fit(x: &[Vec<f64>], y: &[bool], cfg: LogRegConfig) -> (Self, Vec<f64>) {
        let p = x.first().map_or(0, Vec::len);
        let n = x.len().max(1) as f64;
        let mut model = LogisticRegression {
            weights: vec![0.0; p],
            bias: 0.0,
        };
        let max_sq = x
            .iter()
            .map(|xi| dot(xi, xi) + 1.0)
            .fold(0.0, f64::max);
        let step = 1.0 / (0.25 * max_sq + cfg.l2);
        let mut trace = Vec::with_capacity(cfg.epochs + 1);
        for _ in 0..cfg.epochs {
            trace.push(objective(&model, x, y, cfg.l2));
            let mut gw: Vec<f64> = model.weights.iter().map(|w| cfg.l2 * w).collect();
            let mut gb = 0.0;
            for (xi, &yi) in x.iter().zip(y) {
                let r = (sigmoid(dot(&model.weights, xi) + model.bias) - f64::from(u8::from(yi))) / n;
                for (g, v) in gw.iter_mut().zip(xi) {
                    *g += r * v;
                }
                gb += r;
            }
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= step * g;
            }
            model.bias -= step * gb;
        }
        trace.push(objective(&model, x, y, cfg.l2));
        (model, trace)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separable_toy_is_fit_exactly() {
        let x = vec![
            vec![3.0, 0.0],
            vec![2.0, 1.0],
            vec![4.0, 1.0],
            vec![3.0, 2.0],
            vec![0.0, 3.0],
            vec![1.0, 2.0],
            vec![1.0, 4.0],
            vec![0.0, 2.0],
        ];
        let y = [true, true, true, true, false, false, false, false];
        let (m, trace) = LogisticRegression::fit(&x, &y, LogRegConfig::default());
        let acc = x
            .iter()
            .zip(&y)
            .filter(|(xi, &yi)| (m.score(xi) >= 0.5) == yi)
            .count();
        assert_eq!(acc, 8);
        assert!(trace.last().unwrap() < &trace[0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn objective_never_increases(
            rows in proptest::collection::vec(
                (proptest::collection::vec(0.0f64..5.0, 3), any::<bool>()), 2..20),
            l2 in 0.0f64..0.5,
        ) {
            let (x, y): (Vec<Vec<f64>>, Vec<bool>) = rows.into_iter().unzip();
            let (_, trace) = LogisticRegression::fit(&x, &y, LogRegConfig { l2, epochs: 60 });
            for w in trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }
}
