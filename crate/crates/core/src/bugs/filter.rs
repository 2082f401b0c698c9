use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::{ForestConfig, RandomForest};
use super::logreg::{LogRegConfig, LogisticRegression};
use super::text::{build_ngram_vocab, featurize, preprocess, MembershipVector, NGramVocabulary, DEFAULT_VOCAB_CAP};
use crate::error::{Error, Result};
use crate::ingest::{BugReportDoc, BugWarning};
use crate::metrics::{binary_metrics, mean_metrics, stratified_folds, train_indices, Metrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    #[serde(rename = "LOGREG")]
    LogReg,
    #[serde(rename = "RANDOM_FOREST")]
    RandomForest,
}

impl FilterKind {
    pub const ALL: [FilterKind; 2] = [FilterKind::LogReg, FilterKind::RandomForest];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterKind::LogReg => "LOGREG",
            FilterKind::RandomForest => "RANDOM_FOREST",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LOGREG" => Ok(FilterKind::LogReg),
            "RANDOM_FOREST" => Ok(FilterKind::RandomForest),
            _ => Err(Error::Config(format!("unknown filter kind `{s}` (expected LOGREG or RANDOM_FOREST)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FilterClassifier {
    LogReg(LogisticRegression),
    RandomForest(RandomForest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub n_max: usize,
    pub min_df: usize,
    pub vocab_cap: usize,
    pub threshold: f64,
    pub folds: usize,
    pub logreg: LogRegConfig,
    pub forest: ForestConfig,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            n_max: 3,
            min_df: 2,
            vocab_cap: DEFAULT_VOCAB_CAP,
            threshold: 0.5,
            folds: 5,
            logreg: LogRegConfig::default(),
            forest: ForestConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugFilterModel {
    pub kind: FilterKind,
    pub classifier: FilterClassifier,
    pub vocab: NGramVocabulary,
    pub threshold: f64,
}

impl BugFilterModel {
    pub fn score_features(&self, m: &MembershipVector) -> f64 {
        let x = m.to_dense(self.vocab.len());
        match &self.classifier {
            FilterClassifier::LogReg(c) => c.score(&x),
            FilterClassifier::RandomForest(c) => c.score(&x),
        }
    }

    pub fn score_text(&self, text: &str) -> f64 {
        self.score_features(&featurize(&preprocess(text), &self.vocab))
    }

    pub fn is_genuine(&self, text: &str) -> bool {
        self.score_text(text) >= self.threshold
    }
}

pub fn train_filter(
    features: &[MembershipVector],
    labels: &[bool],
    vocab: &NGramVocabulary,
    kind: FilterKind,
    cfg: &FilterConfig,
    seed: u64,
) -> Result<BugFilterModel> {
    let positives = labels.iter().filter(|&&b| b).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateLabels(format!(
            "filter training needs both bug and non-bug documents ({positives} of {} are bugs)",
            labels.len()
        )));
    }
    let x: Vec<Vec<f64>> = features.iter().map(|m| m.to_dense(vocab.len())).collect();
    let classifier = match kind {
        FilterKind::LogReg => FilterClassifier::LogReg(LogisticRegression::fit(&x, labels, cfg.logreg).0),
        FilterKind::RandomForest => FilterClassifier::RandomForest(RandomForest::fit(&x, labels, cfg.forest, seed)),
    };
    Ok(BugFilterModel {
        kind,
        classifier,
        vocab: vocab.clone(),
        threshold: cfg.threshold,
    })
}

fn tokenize_all(docs: &[&BugReportDoc]) -> Vec<Vec<String>> {
    docs.par_iter().map(|d| preprocess(&d.text)).collect()
}

/// Build the vocabulary from `docs`, featurize, and train one classifier kind.
pub fn fit_filter(docs: &[&BugReportDoc], kind: FilterKind, cfg: &FilterConfig, seed: u64) -> Result<BugFilterModel> {
    let tokens = tokenize_all(docs);
    let vocab = build_ngram_vocab(&tokens, cfg.n_max, cfg.min_df, cfg.vocab_cap)?;
    let features: Vec<MembershipVector> = tokens.par_iter().map(|t| featurize(t, &vocab)).collect();
    let labels: Vec<bool> = docs.iter().map(|d| d.label.is_bug()).collect();
    train_filter(&features, &labels, &vocab, kind, cfg, seed)
}

/// Stratified k-fold estimate; the vocabulary is rebuilt on each training split.
pub fn cross_validate_filter(
    docs: &[BugReportDoc],
    kind: FilterKind,
    cfg: &FilterConfig,
    seed: u64,
) -> Result<(Vec<Metrics>, Metrics)> {
    let labels: Vec<usize> = docs.iter().map(|d| usize::from(d.label.is_bug())).collect();
    let folds = stratified_folds(&labels, cfg.folds, seed)?;
    let mut per_fold = Vec::with_capacity(folds.len());
    for test in &folds {
        let train: Vec<&BugReportDoc> = train_indices(docs.len(), test).into_iter().map(|i| &docs[i]).collect();
        let model = fit_filter(&train, kind, cfg, seed)?;
        let predicted: Vec<bool> = test.iter().map(|&i| model.is_genuine(&docs[i].text)).collect();
        let actual: Vec<bool> = test.iter().map(|&i| docs[i].label.is_bug()).collect();
        per_fold.push(binary_metrics(&predicted, &actual));
    }
    let mean = mean_metrics(&per_fold);
    Ok((per_fold, mean))
}

#[derive(Debug, Clone)]
pub struct FilterSelection {
    pub model: BugFilterModel,
    pub cv: Vec<(FilterKind, Metrics)>,
}

impl FilterSelection {
    pub fn selected_cv(&self) -> Metrics {
        self.cv
            .iter()
            .find(|(k, _)| *k == self.model.kind)
            .map(|(_, m)| *m)
            .unwrap_or_default()
    }
}

/// Cross-validate both classifier kinds and refit the one with the higher mean F1
/// on all documents; LOGREG wins ties.
pub fn select_filter(docs: &[BugReportDoc], cfg: &FilterConfig, seed: u64) -> Result<FilterSelection> {
    let mut cv = Vec::with_capacity(2);
    for kind in FilterKind::ALL {
        let (_, mean) = cross_validate_filter(docs, kind, cfg, seed)?;
        log::info!("filter {kind}: cv f1 {:.4}", mean.f1);
        cv.push((kind, mean));
    }
    let best = cv
        .iter()
        .fold(None::<(FilterKind, f64)>, |acc, (k, m)| match acc {
            Some((_, f)) if f >= m.f1 => acc,
            _ => Some((*k, m.f1)),
        })
        .map(|(k, _)| k)
        .expect("two candidates");
    let all: Vec<&BugReportDoc> = docs.iter().collect();
    Ok(FilterSelection {
        model: fit_filter(&all, best, cfg, seed)?,
        cv,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<BugWarning>,
    pub removed: Vec<BugWarning>,
}

impl FilterOutcome {
    /// Fraction of input warnings removed; 0 for an empty input.
    pub fn removal_ratio(&self) -> f64 {
        let total = self.kept.len() + self.removed.len();
        if total == 0 {
            0.0
        } else {
            self.removed.len() as f64 / total as f64
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "kept\t{}\nremoved\t{}\nremoval_ratio\t{:.4}\n",
            self.kept.len(),
            self.removed.len(),
            self.removal_ratio()
        )
    }
}

/// Text a warning is judged by: its linked report (keyed by warning type) or its own message.
pub fn warning_text<'a>(w: &'a BugWarning, reports: &'a BTreeMap<String, String>) -> &'a str {
    reports.get(&w.warning_type).map_or(w.message.as_str(), String::as_str)
}

pub fn filter_warnings(
    warnings: &[BugWarning],
    reports: &BTreeMap<String, String>,
    model: &BugFilterModel,
) -> FilterOutcome {
    let verdicts: Vec<bool> = warnings
        .par_iter()
        .map(|w| model.is_genuine(warning_text(w, reports)))
        .collect();
    let mut out = FilterOutcome {
        kept: Vec::new(),
        removed: Vec::new(),
    };
    for (w, keep) in warnings.iter().zip(verdicts) {
        if keep {
            out.kept.push(w.clone());
        } else {
            out.removed.push(w.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ReportLabel;

    fn doc(id: usize, text: &str, bug: bool) -> BugReportDoc {
        BugReportDoc {
            id: format!("r{id}"),
            text: text.into(),
            label: if bug { ReportLabel::Bug } else { ReportLabel::NonBug },
        }
    }

    fn warning(msg: &str) -> BugWarning {
        BugWarning {
            warning_type: "T".into(),
            category: "CORRECTNESS".into(),
            priority: 2,
            class_name: "C".into(),
            method_name: None,
            line_start: 1,
            line_end: 1,
            message: msg.into(),
        }
    }

    fn constant_model(bias: f64) -> BugFilterModel {
        let vocab = build_ngram_vocab(&[vec!["x".to_string()]], 1, 1, 10).unwrap();
        BugFilterModel {
            kind: FilterKind::LogReg,
            classifier: FilterClassifier::LogReg(LogisticRegression {
                weights: vec![0.0],
                bias,
            }),
            vocab,
            threshold: 0.5,
        }
    }

    #[test]
    fn degenerate_labels_rejected() {
        let docs = [doc(0, "crash here", true), doc(1, "crash there", true)];
        let refs: Vec<&BugReportDoc> = docs.iter().collect();
        assert!(matches!(
            fit_filter(&refs, FilterKind::LogReg, &FilterConfig::default(), 0),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn constant_models_bound_the_ratio() {
        let ws: Vec<BugWarning> = (0..5).map(|i| warning(&format!("message {i}"))).collect();
        let reports = BTreeMap::new();
        let keep_all = filter_warnings(&ws, &reports, &constant_model(50.0));
        assert_eq!(keep_all.kept, ws);
        assert_eq!(keep_all.removal_ratio(), 0.0);
        let drop_all = filter_warnings(&ws, &reports, &constant_model(-50.0));
        assert!(drop_all.kept.is_empty());
        assert_eq!(drop_all.removal_ratio(), 1.0);
    }

    #[test]
    fn linked_report_overrides_message() {
        let mut reports = BTreeMap::new();
        reports.insert("T".to_string(), "linked".to_string());
        let w = warning("own");
        assert_eq!(warning_text(&w, &reports), "linked");
        assert_eq!(warning_text(&w, &BTreeMap::new()), "own");
    }

    #[test]
    fn kind_names_round_trip() {
        for k in FilterKind::ALL {
            assert_eq!(k.as_str().parse::<FilterKind>().unwrap(), k);
        }
    }
}
