use super::adaboost::AdaBoostModel;
use super::features::PatternFeatures;
use super::labels::PatternSet;
use crate::encode::context::{Channel, ContextVector, RawContext, Scope};
use crate::error::Result;
use crate::nn::Tensor;

/// Predicted label with the per-class weighted vote totals.
pub fn predict_pattern(features: &PatternFeatures, model: &AdaBoostModel) -> (String, Vec<f64>) {
    let scores = model.scores(features.as_slice());
    let label = model.classes[super::adaboost::argmax(&scores)].clone();
    (label, scores)
}

pub fn pattern_raw_context(label: &str, set: &PatternSet) -> Result<RawContext> {
    Ok(RawContext {
        channel: Channel::Pattern,
        scope: Scope::WholeUnit,
        features: set.one_hot(label)?,
    })
}

pub fn pattern_context(label: &str, set: &PatternSet, projection: &Tensor) -> Result<ContextVector> {
    pattern_raw_context(label, set)?.project(projection)
}
