//! Design-pattern detection from structural class features, and pattern context vectors.

pub mod adaboost;
pub mod context;
pub mod cv;
pub mod features;
pub mod labels;

pub use adaboost::{train_adaboost, AdaBoostConfig, AdaBoostModel, RoundTrace, Stump};
pub use context::{pattern_context, pattern_raw_context, predict_pattern};
pub use cv::{cross_validate_patterns, format_pattern_report, PatternCvReport};
pub use features::{extract_pattern_features, PatternFeatures, FEATURE_COUNT, FEATURE_NAMES};
pub use labels::{PatternSet, DEFAULT_PATTERNS, NONE_PATTERN};
pub use crate::metrics::stratified_folds;

use rayon::prelude::*;

use crate::error::Result;
use crate::ingest::PatternSample;

/// Feature matrix and label indices for a labeled pattern corpus.
pub fn pattern_dataset(samples: &[PatternSample], set: &PatternSet) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let rows = samples
        .par_iter()
        .map(|s| {
            let f = extract_pattern_features(&s.unit.ast)?;
            Ok((f.0.to_vec(), set.index(&s.pattern)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().unzip())
}

/// Train the detector on a labeled corpus with the given boosting settings.
pub fn train_pattern_model(samples: &[PatternSample], set: &PatternSet, cfg: AdaBoostConfig) -> Result<AdaBoostModel> {
    let (x, y) = pattern_dataset(samples, set)?;
    train_adaboost(&x, &y, set.labels(), cfg).map(|(m, _)| m)
}
