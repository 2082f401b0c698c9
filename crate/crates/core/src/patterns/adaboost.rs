//! Multiclass AdaBoost over depth-1 stumps with real-valued per-class leaf votes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// Per-class votes when `x[feature] <= threshold`.
    pub left: Vec<f64>,
    /// Per-class votes otherwise.
    pub right: Vec<f64>,
}

impl Stump {
    pub fn votes(&self, x: &[f64]) -> &[f64] {
        if x[self.feature] <= self.threshold {
            &self.left
        } else {
            &self.right
        }
    }

    /// Class with the highest vote on the side `x` falls on.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(self.votes(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostConfig {
    pub n_estimators: usize,
    pub learning_rate: f64,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        AdaBoostConfig {
            n_estimators: 100,
            learning_rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub classes: Vec<String>,
    pub stages: Vec<(Stump, f64)>,
    pub n_estimators: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrace {
    pub error: f64,
    pub alpha: f64,
    pub weight_sum: f64,
    pub train_error: f64,
}

impl AdaBoostModel {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.classes.len()];
        for (stump, alpha) in &self.stages {
            for (si, v) in s.iter_mut().zip(stump.votes(x)) {
                *si += alpha * v;
            }
        }
        s
    }

    /// Argmax of the weighted votes; the earliest class wins ties.
    pub fn predict_index(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Per-class `(W+, W-)` weight sums on one side of a split.
#[derive(Clone)]
struct Side {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl Side {
    fn new(classes: usize) -> Self {
        Side {
            pos: vec![0.0; classes],
            neg: vec![0.0; classes],
        }
    }

    fn add(&mut self, wi: &[f64], yi: usize) {
        for (c, &v) in wi.iter().enumerate() {
            if c == yi {
                self.pos[c] += v;
            } else {
                self.neg[c] += v;
            }
        }
    }

    fn minus(&self, other: &Side) -> Side {
        Side {
            pos: self.pos.iter().zip(&other.pos).map(|(a, b)| a - b).collect(),
            neg: self.neg.iter().zip(&other.neg).map(|(a, b)| a - b).collect(),
        }
    }

    /// This side's share of the normalizer `Z`.
    fn z(&self) -> f64 {
        self.pos.iter().zip(&self.neg).map(|(p, n)| (p.max(0.0) * n.max(0.0)).sqrt()).sum()
    }

    /// Smoothed half log-odds per class.
    fn votes(&self, eps: f64) -> Vec<f64> {
        self.pos
            .iter()
            .zip(&self.neg)
            .map(|(p, n)| 0.5 * ((p.max(0.0) + eps) / (n.max(0.0) + eps)).ln())
            .collect()
    }
}

/// Depth-1 split minimizing the boosting normalizer `Z = 2 Σ_side Σ_c sqrt(W+ W-)`
/// over per-(sample, class) weights. Earlier features and thresholds win ties.
fn best_stump(x: &[Vec<f64>], y: &[usize], w: &[Vec<f64>], eps: f64) -> Stump {
    let n = x.len();
    let p = x[0].len();
    let classes = w[0].len();
    let mut total = Side::new(classes);
    for (wi, &yi) in w.iter().zip(y) {
        total.add(wi, yi);
    }
    let mut best: Option<(f64, usize, f64, Side, Side)> = None;
    let mut order: Vec<usize> = (0..n).collect();
    for f in 0..p {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = Side::new(classes);
        for k in 0..n {
            let i = order[k];
            left.add(&w[i], y[i]);
            let last = k + 1 == n;
            if !last && x[order[k + 1]][f] == x[i][f] {
                continue;
            }
            let right = if last { left.clone() } else { total.minus(&left) };
            let z = left.z() + if last { 0.0 } else { right.z() };
            let threshold = if last { x[i][f] } else { 0.5 * (x[i][f] + x[order[k + 1]][f]) };
            if best.as_ref().is_none_or(|b| z < b.0 - 1e-15) {
                best = Some((z, f, threshold, left.clone(), right));
            }
        }
    }
    let (_, feature, threshold, l, r) = best.expect("at least one sample and feature");
    Stump {
        feature,
        threshold,
        left: l.votes(eps),
        right: r.votes(eps),
    }
}

/// Stagewise boosting of depth-1 stumps with real-valued per-class votes.
///
/// Weights live on (sample, class) pairs and start uniform. Each round fits the
/// split minimizing the normalizer; each leaf votes `½ ln((W+ + ε)/(W- + ε))`
/// per class with `ε = 1/(nC)`, and the stage weight is the learning rate. The
/// stump's error is the sample-weighted share whose leaf argmax is wrong: at or
/// above `1 - 1/K` ends training without adding it, zero adds it and ends
/// training. Otherwise `w_ic *= exp(-lr y_ic v_c(x_i))` with `y_ic = ±1`, and
/// the weights are renormalized so the sample weights `Σ_c w_ic` sum to 1.
/// `K` counts the classes present in `y`; `C` is the configured class count.
pub fn train_adaboost(
    x: &[Vec<f64>],
    y: &[usize],
    classes: &[String],
    cfg: AdaBoostConfig,
) -> Result<(AdaBoostModel, Vec<RoundTrace>)> {
    if let Some(&bad) = y.iter().find(|&&l| l >= classes.len()) {
        return Err(Error::LabelRange(vec![format!("label index {bad}")]));
    }
    let mut present: Vec<usize> = y.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(Error::DegenerateLabels(format!(
            "pattern training needs at least two labels, found {}",
            present.len()
        )));
    }
    let k = present.len() as f64;
    let c = classes.len();
    let n = x.len();
    let eps = 1.0 / (n * c) as f64;
    let mut w = vec![vec![eps; c]; n];
    let mut model = AdaBoostModel {
        classes: classes.to_vec(),
        stages: Vec::new(),
        n_estimators: cfg.n_estimators,
        learning_rate: cfg.learning_rate,
    };
    let mut trace = Vec::new();
    let mut scores = vec![vec![0.0; c]; n];
    for _ in 0..cfg.n_estimators {
        let stump = best_stump(x, y, &w, eps);
        let sample_w: Vec<f64> = w.iter().map(|wi| wi.iter().sum()).collect();
        let err = x
            .iter()
            .zip(y)
            .zip(&sample_w)
            .filter(|((xi, &yi), _)| stump.predict(xi) != yi)
            .map(|(_, wi)| wi)
            .sum::<f64>()
            / sample_w.iter().sum::<f64>();
        if err >= 1.0 - 1.0 / k {
            break;
        }
        let alpha = cfg.learning_rate;
        for ((wi, xi), &yi) in w.iter_mut().zip(x).zip(y) {
            for (j, (wij, v)) in wi.iter_mut().zip(stump.votes(xi)).enumerate() {
                let sign = if j == yi { 1.0 } else { -1.0 };
                *wij *= (-alpha * sign * v).exp();
            }
        }
        let sum: f64 = w.iter().flatten().sum();
        for wij in w.iter_mut().flatten() {
            *wij /= sum;
        }
        for (s, xi) in scores.iter_mut().zip(x) {
            for (sj, v) in s.iter_mut().zip(stump.votes(xi)) {
                *sj += alpha * v;
            }
        }
        model.stages.push((stump, alpha));
        let wrong = scores.iter().zip(y).filter(|(s, &yi)| argmax(s) != yi).count();
        trace.push(RoundTrace {
            error: err,
            alpha,
            weight_sum: w.iter().map(|wi| wi.iter().sum::<f64>()).sum(),
            train_error: wrong as f64 / n as f64,
        });
        if err <= 0.0 {
            break;
        }
    }
    Ok((model, trace))
}
