use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heads::{classify, clone_score, Head};
use super::prepare::Channels;
use super::train::{encode_all, pair_indices, prepare_all, TrainedTask};
use crate::error::{Error, Result};
use crate::ingest::{ClassificationSample, CloneCorpus, CloneType};
use crate::metrics::{binary_metrics, multiclass_metrics, Metrics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEval {
    pub metrics: Metrics,
    pub predictions: Vec<usize>,
}

/// Per-stratum rows in report order followed by `ALL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneEval {
    pub rows: Vec<(String, Metrics)>,
    pub scores: Vec<f64>,
}

impl CloneEval {
    pub fn get(&self, name: &str) -> Option<&Metrics> {
        self.rows.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

pub fn eval_classification(task: &TrainedTask, channels: &Channels, samples: &[ClassificationSample]) -> Result<ClassificationEval> {
    let Head::Classifier(head) = &task.model.head else {
        return Err(Error::Config("model was not trained for classification".into()));
    };
    let units: Vec<_> = samples.iter().map(|s| &s.unit).collect();
    let prepared = prepare_all(&units, &task.vocab, task.variant, channels)?;
    let codes = encode_all(&prepared, &task.model.encoder)?;
    let predictions = codes
        .par_iter()
        .map(|c| classify(c, head).map(|(l, _)| l))
        .collect::<Result<Vec<_>>>()?;
    let actual: Vec<usize> = samples.iter().map(|s| s.label).collect();
    Ok(ClassificationEval {
        metrics: multiclass_metrics(&predictions, &actual, head.classes()),
        predictions,
    })
}

pub fn eval_clone(task: &TrainedTask, channels: &Channels, corpus: &CloneCorpus) -> Result<CloneEval> {
    let Head::Clone(head) = &task.model.head else {
        return Err(Error::Config("model was not trained for clone detection".into()));
    };
    let units: Vec<_> = corpus.store.values().collect();
    let prepared = prepare_all(&units, &task.vocab, task.variant, channels)?;
    let codes = encode_all(&prepared, &task.model.encoder)?;
    let idx = pair_indices(corpus)?;
    let scores = idx
        .par_iter()
        .map(|&(a, b, _)| clone_score(&codes[a], &codes[b], head))
        .collect::<Result<Vec<_>>>()?;
    let predicted: Vec<bool> = scores.iter().map(|&p| p >= head.threshold).collect();
    let actual: Vec<bool> = corpus.pairs.iter().map(|p| p.is_clone()).collect();
    let mut rows = Vec::new();
    for t in CloneType::POSITIVE {
        let members: Vec<usize> = (0..corpus.pairs.len())
            .filter(|&i| corpus.pairs[i].groups().contains(&t))
            .collect();
        if !members.iter().any(|&i| actual[i] && corpus.pairs[i].clone_type == t) {
            continue;
        }
        let p: Vec<bool> = members.iter().map(|&i| predicted[i]).collect();
        let a: Vec<bool> = members.iter().map(|&i| actual[i]).collect();
        rows.push((t.as_str().to_string(), binary_metrics(&p, &a)));
    }
    rows.push(("ALL".to_string(), binary_metrics(&predicted, &actual)));
    Ok(CloneEval { rows, scores })
}
