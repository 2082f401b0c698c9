use rayon::prelude::*;

use super::adaboost::{train_adaboost, AdaBoostConfig};
use crate::error::Result;
use crate::metrics::{multiclass_metrics, per_class_metrics, stratified_folds, train_indices, Metrics};

#[derive(Debug, Clone, PartialEq)]
pub struct PatternCvReport {
    pub classes: Vec<String>,
    pub k: usize,
    pub seed: u64,
    /// Multiclass metrics of each test fold.
    pub per_fold: Vec<Metrics>,
    /// One-vs-rest metrics over the pooled out-of-fold predictions.
    pub per_class: Vec<Metrics>,
    pub mean: Metrics,
}

pub fn cross_validate_patterns(
    x: &[Vec<f64>],
    y: &[usize],
    classes: &[String],
    cfg: AdaBoostConfig,
    k: usize,
    seed: u64,
) -> Result<PatternCvReport> {
    let folds = stratified_folds(y, k, seed)?;
    let results = folds
        .par_iter()
        .map(|test| {
            let train = train_indices(x.len(), test);
            let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let (model, _) = train_adaboost(&tx, &ty, classes, cfg)?;
            Ok(test.iter().map(|&i| model.predict_index(&x[i])).collect::<Vec<usize>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pooled_pred = vec![0; x.len()];
    let mut per_fold = Vec::with_capacity(folds.len());
    for (test, pred) in folds.iter().zip(&results) {
        let actual: Vec<usize> = test.iter().map(|&i| y[i]).collect();
        per_fold.push(multiclass_metrics(pred, &actual, classes.len()));
        for (&i, &p) in test.iter().zip(pred) {
            pooled_pred[i] = p;
        }
    }
    Ok(PatternCvReport {
        classes: classes.to_vec(),
        k: folds.len(),
        seed,
        per_class: per_class_metrics(&pooled_pred, y, classes.len()),
        mean: crate::metrics::mean_metrics(&per_fold),
        per_fold,
    })
}

/// Per-class precision/recall/F1 table followed by the fold mean.
pub fn format_pattern_report(r: &PatternCvReport) -> String {
    let mut out = format!("# pattern detection, stratified {}-fold, seed {}\n", r.k, r.seed);
    out.push_str("class\tprecision\trecall\tf1\n");
    for (c, m) in r.classes.iter().zip(&r.per_class) {
        out.push_str(&format!("{c}\t{:.4}\t{:.4}\t{:.4}\n", m.precision, m.recall, m.f1));
    }
    out.push_str(&format!(
        "MEAN\t{:.4}\t{:.4}\t{:.4}\naccuracy\t{:.4}\n",
        r.mean.precision, r.mean.recall, r.mean.f1, r.mean.accuracy
    ));
    out
}
