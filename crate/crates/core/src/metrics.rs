//! Classification metrics and stratified fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy, precision, recall and F1 as fractions in `[0, 1]`.
///
/// Zero-denominator conventions: with no predicted positives, precision is 0 if
/// actual positives exist and 1 otherwise; recall is 1 when there are no actual
/// positives; F1 is 0 whenever precision + recall is 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_pairs(predicted: &[bool], actual: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            c.add(p, a);
        }
        c
    }

    pub fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn merge(self, other: Confusion) -> Self {
        Confusion {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            tn: self.tn + other.tn,
            fn_: self.fn_ + other.fn_,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn metrics(&self) -> Metrics {
        let actual_pos = self.tp + self.fn_;
        let pred_pos = self.tp + self.fp;
        let precision = if pred_pos > 0 {
            self.tp as f64 / pred_pos as f64
        } else if actual_pos > 0 {
            0.0
        } else {
            1.0
        };
        let recall = if actual_pos > 0 {
            self.tp as f64 / actual_pos as f64
        } else {
            1.0
        };
        let accuracy = if self.total() > 0 {
            (self.tp + self.tn) as f64 / self.total() as f64
        } else {
            0.0
        };
        Metrics {
            accuracy,
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn binary_metrics(predicted: &[bool], actual: &[bool]) -> Metrics {
    Confusion::from_pairs(predicted, actual).metrics()
}

/// One-vs-rest metrics per class, in class-index order.
pub fn per_class_metrics(predicted: &[usize], actual: &[usize], classes: usize) -> Vec<Metrics> {
    (0..classes)
        .map(|c| {
            let p: Vec<bool> = predicted.iter().map(|&x| x == c).collect();
            let a: Vec<bool> = actual.iter().map(|&x| x == c).collect();
            binary_metrics(&p, &a)
        })
        .collect()
}

/// Multiclass summary: plain accuracy with macro-averaged precision, recall and F1.
pub fn multiclass_metrics(predicted: &[usize], actual: &[usize], classes: usize) -> Metrics {
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    let accuracy = if actual.is_empty() {
        0.0
    } else {
        hits as f64 / actual.len() as f64
    };
    let present: Vec<Metrics> = per_class_metrics(predicted, actual, classes)
        .into_iter()
        .enumerate()
        .filter(|(c, _)| actual.contains(c) || predicted.contains(c))
        .map(|(_, m)| m)
        .collect();
    let n = present.len().max(1) as f64;
    Metrics {
        accuracy,
        precision: present.iter().map(|m| m.precision).sum::<f64>() / n,
        recall: present.iter().map(|m| m.recall).sum::<f64>() / n,
        f1: present.iter().map(|m| m.f1).sum::<f64>() / n,
    }
}

pub fn mean_metrics(ms: &[Metrics]) -> Metrics {
    let n = ms.len().max(1) as f64;
    Metrics {
        accuracy: ms.iter().map(|m| m.accuracy).sum::<f64>() / n,
        precision: ms.iter().map(|m| m.precision).sum::<f64>() / n,
        recall: ms.iter().map(|m| m.recall).sum::<f64>() / n,
        f1: ms.iter().map(|m| m.f1).sum::<f64>() / n,
    }
}

/// Assign samples to `k` test folds so each class is spread evenly.
///
/// Samples are grouped by class (shuffled within each class by `seed`) and dealt
/// round-robin across folds without restarting at class boundaries, so each
/// fold's count for a class is within one of `n_class / k`. A class smaller
/// than `k` is logged as a warning; `k` itself is reduced only when there are
/// fewer samples than folds.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidFolds(k));
    }
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let smallest = by_class
        .iter()
        .map(Vec::len)
        .filter(|&n| n > 0)
        .min()
        .unwrap_or(0);
    if smallest < k {
        log::warn!("smallest class has {smallest} samples; some of the {k} folds will hold none of it");
    }
    let mut k = k;
    if labels.len() < k {
        let reduced = labels.len().max(2);
        log::warn!("only {} samples; reducing folds from {k} to {reduced}", labels.len());
        k = reduced;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Complement of one test fold.
pub fn train_indices(n: usize, test: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in test {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}
