//! Versioned model bundles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bugs::BugFilterModel;
use crate::encode::{EncoderParams, EncoderShape, Fusion, Vocabulary};
use crate::error::{Error, Result};
use crate::nn::{ParamSet, Tensor};
use crate::patterns::{AdaBoostModel, PatternSet};
use crate::tasks::{Channels, ClassifierHead, CloneHead, EpochLog, Head, TaskModel, TrainedTask, Variant};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HeadSpec {
    Classifier { classes: usize },
    Clone { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    /// Effective run configuration, in `key = value` order.
    pub config: Vec<(String, String)>,
    pub variant: Variant,
    pub head: HeadSpec,
    pub rounds: usize,
    pub fusion: Fusion,
    pub vocab: Vocabulary,
    pub params: ParamSet,
    pub filter: Option<BugFilterModel>,
    pub reports: BTreeMap<String, String>,
    pub patterns: PatternSet,
    pub detector: Option<AdaBoostModel>,
    pub log: Vec<EpochLog>,
}

impl ModelBundle {
    pub fn new(task: &TrainedTask, channels: &Channels, config: Vec<(String, String)>) -> Self {
        let head = match &task.model.head {
            Head::Classifier(h) => HeadSpec::Classifier { classes: h.classes() },
            Head::Clone(h) => HeadSpec::Clone { threshold: h.threshold },
        };
        ModelBundle {
            format_version: FORMAT_VERSION,
            config,
            variant: task.variant,
            head,
            rounds: task.model.encoder.rounds,
            fusion: task.model.encoder.fusion,
            vocab: task.vocab.clone(),
            params: ParamSet::from_params(&task.model, ""),
            filter: channels.filter.clone(),
            reports: channels.reports.clone(),
            patterns: channels.patterns.clone(),
            detector: channels.detector.clone(),
            log: task.log.clone(),
        }
    }

    fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.params
            .get(name)
            .ok_or_else(|| Error::format_detail("params", format!("missing `{name}`")))
    }

    /// Rebuild the trained model and its channels.
    pub fn restore(&self) -> Result<(TrainedTask, Channels)> {
        let emb = self.tensor("encoder.embedding")?;
        let shape = EncoderShape {
            vocab: emb.rows(),
            dim: emb.cols(),
            hidden: self.tensor("encoder.gru.fwd.w_z")?.rows(),
            bug_features: self.tensor("encoder.ctx.bug")?.cols(),
            pattern_features: self.tensor("encoder.ctx.pattern")?.cols(),
        };
        if shape.vocab != self.vocab.len() {
            return Err(Error::Shape(format!(
                "embedding has {} rows for a vocabulary of {}",
                shape.vocab,
                self.vocab.len()
            )));
        }
        let mut encoder = EncoderParams::zeros(shape);
        encoder.rounds = self.rounds;
        encoder.fusion = self.fusion;
        let code_dim = encoder.code_dim();
        let head = match self.head {
            HeadSpec::Classifier { classes } => Head::Classifier(ClassifierHead::zeros(classes, code_dim)),
            HeadSpec::Clone { threshold } => Head::Clone(CloneHead::zeros(code_dim, threshold)),
        };
        let mut model = TaskModel { encoder, head };
        self.params.load_into(&mut model, "")?;
        let task = TrainedTask {
            variant: self.variant,
            vocab: self.vocab.clone(),
            model,
            log: self.log.clone(),
        };
        let channels = Channels {
            filter: self.filter.clone(),
            reports: self.reports.clone(),
            patterns: self.patterns.clone(),
            detector: self.detector.clone(),
        };
        Ok((task, channels))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::format_detail("bundle", e.to_string());
        let value: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::format("format_version"))?;
        if found > u64::from(FORMAT_VERSION) {
            return Err(Error::Version {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                supported: FORMAT_VERSION,
            });
        }
        let mut bundle: ModelBundle = serde_json::from_value(value).map_err(bad)?;
        if let Some(f) = &mut bundle.filter {
            f.vocab.reindex();
        }
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&crate::ingest::read_text(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::task_corpus;
    use crate::tasks::{eval_classification, train_task, TaskConfig, TaskData};

    fn small() -> (TrainedTask, Channels, Vec<crate::ingest::ClassificationSample>) {
        let samples = task_corpus(2, 3, 4, 5).unwrap();
        let cfg = TaskConfig {
            dim: 6,
            hidden: 4,
            epochs: 2,
            ..TaskConfig::default()
        };
        let ch = Channels::default();
        let t = train_task(&TaskData::Classify { classes: 2, samples: &samples }, Variant::None, &cfg, &ch, 3).unwrap();
        (t, ch, samples)
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let (t, ch, samples) = small();
        let b = ModelBundle::new(&t, &ch, vec![("seed".into(), "3".into())]);
        let text = b.to_json();
        let back = ModelBundle::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let (t2, ch2) = back.restore().unwrap();
        assert_eq!(t2, t);
        assert_eq!(
            eval_classification(&t2, &ch2, &samples).unwrap(),
            eval_classification(&t, &ch, &samples).unwrap()
        );
    }

    #[test]
    fn future_version_is_rejected() {
        let (t, ch, _) = small();
        let mut b = ModelBundle::new(&t, &ch, Vec::new());
        b.format_version = FORMAT_VERSION + 1;
        let err = ModelBundle::from_json(&b.to_json()).unwrap_err();
        assert!(matches!(err, Error::Version { found, supported } if found == FORMAT_VERSION + 1 && supported == FORMAT_VERSION));
        assert!(ModelBundle::from_json("{}").is_err());
    }
}
