use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heads::{ClassifierHead, CloneHead, Head, TaskModel};
use super::prepare::{check_channels, prepare_unit, Channels};
use super::variant::Variant;
use crate::encode::encoder::{unit_backward, unit_forward};
use crate::encode::{build_vocab, encode_unit, train_embeddings, EncoderParams, EncoderShape, Fusion, PreparedUnit, SkipGramConfig, Vocabulary};
use crate::error::{Error, Result};
use crate::ingest::warnings::CATEGORY_SLOTS;
use crate::ingest::{ClassificationSample, CloneCorpus, CodeUnit};
use crate::nn::ops::{bce_with_logit, sigmoid, softmax_xent};
use crate::nn::optim::Adam;
use crate::nn::params::{accumulate, scale_all};
use crate::patterns::adaboost::argmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub dim: usize,
    pub hidden: usize,
    pub rounds: usize,
    pub fusion: Fusion,
    /// Tokens seen fewer times map to UNK.
    pub min_count: usize,
    /// Skip-gram pretraining epochs; 0 keeps the seeded random embedding.
    pub embed_epochs: usize,
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    /// Stop once training accuracy reaches 1.
    pub early_stop: bool,
    pub clone_threshold: f64,
    /// Embed identifiers by kind only, making renamed programs encode identically.
    pub abstract_identifiers: bool,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            dim: 128,
            hidden: 100,
            rounds: 1,
            fusion: Fusion::Node,
            min_count: 1,
            embed_epochs: 0,
            epochs: 15,
            batch: 8,
            lr: 2e-3,
            early_stop: false,
            clone_threshold: 0.5,
            abstract_identifiers: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
}

pub enum TaskData<'a> {
    Classify {
        classes: usize,
        samples: &'a [ClassificationSample],
    },
    Clone(&'a CloneCorpus),
}

impl TaskData<'_> {
    fn units(&self) -> Vec<&CodeUnit> {
        match self {
            TaskData::Classify { samples, .. } => samples.iter().map(|s| &s.unit).collect(),
            TaskData::Clone(c) => c.store.values().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedTask {
    pub variant: Variant,
    pub vocab: Vocabulary,
    pub model: TaskModel,
    pub log: Vec<EpochLog>,
}

enum Examples {
    Classify(Vec<usize>),
    /// Unit indices and target.
    Clone(Vec<(usize, usize, f64)>),
}

impl Examples {
    fn len(&self) -> usize {
        match self {
            Examples::Classify(y) => y.len(),
            Examples::Clone(p) => p.len(),
        }
    }
}

pub fn prepare_all(units: &[&CodeUnit], vocab: &Vocabulary, variant: Variant, channels: &Channels) -> Result<Vec<PreparedUnit>> {
    units
        .par_iter()
        .map(|u| prepare_unit(u, vocab, variant, channels))
        .collect()
}

pub fn encode_all(units: &[PreparedUnit], encoder: &EncoderParams) -> Result<Vec<Vec<f64>>> {
    units.par_iter().map(|u| encode_unit(u, encoder)).collect()
}

/// Resolve clone pairs to indices into the store's iteration order.
pub(crate) fn pair_indices(corpus: &CloneCorpus) -> Result<Vec<(usize, usize, f64)>> {
    let index: BTreeMap<&str, usize> = corpus.store.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    corpus
        .pairs
        .iter()
        .map(|p| {
            let get = |id: &str| index.get(id).copied().ok_or_else(|| Error::DanglingId(vec![id.to_string()]));
            Ok((get(&p.id_a)?, get(&p.id_b)?, f64::from(p.label)))
        })
        .collect()
}

fn example_grad(model: &TaskModel, units: &[PreparedUnit], ex: &Examples, i: usize) -> Result<(f64, TaskModel)> {
    let mut grads = model.zeros_like();
    let TaskModel { encoder: enc_grads, head: head_grads } = &mut grads;
    match (ex, &model.head, head_grads) {
        (Examples::Classify(labels), Head::Classifier(head), Head::Classifier(gh)) => {
            let (code, cache) = unit_forward(&units[i], &model.encoder)?;
            let (loss, dlogits) = softmax_xent(&head.logits(&code)?, labels[i])?;
            gh.weight.add_outer(&dlogits, &code);
            for (b, d) in gh.bias.values_mut().iter_mut().zip(&dlogits) {
                *b += d;
            }
            let dcode = head.weight.matvec_t(&dlogits);
            unit_backward(&units[i], &cache, &dcode, &model.encoder, enc_grads);
            Ok((loss, grads))
        }
        (Examples::Clone(pairs), Head::Clone(head), Head::Clone(gh)) => {
            let (a, b, y) = pairs[i];
            let (ca, cache_a) = unit_forward(&units[a], &model.encoder)?;
            let (cb, cache_b) = unit_forward(&units[b], &model.encoder)?;
            let z = head.logit(&ca, &cb)?;
            let dz = sigmoid(z) - y;
            let w = head.weight.values();
            let mut da = vec![0.0; ca.len()];
            for k in 0..ca.len() {
                let d = ca[k] - cb[k];
                gh.weight.values_mut()[k] += dz * d.abs();
                da[k] = dz * w[k] * sign(d);
            }
            gh.bias.values_mut()[0] += dz;
            let db: Vec<f64> = da.iter().map(|v| -v).collect();
            unit_backward(&units[a], &cache_a, &da, &model.encoder, enc_grads);
            unit_backward(&units[b], &cache_b, &db, &model.encoder, enc_grads);
            Ok((bce_with_logit(z, y), grads))
        }
        _ => Err(Error::Shape("task head does not match the dataset".into())),
    }
}

/// Subgradient of |x| with 0 at 0.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn training_accuracy(model: &TaskModel, units: &[PreparedUnit], ex: &Examples) -> Result<f64> {
    let codes = encode_all(units, &model.encoder)?;
    let correct = match (ex, &model.head) {
        (Examples::Classify(labels), Head::Classifier(h)) => labels
            .par_iter()
            .enumerate()
            .map(|(i, &y)| Ok(usize::from(argmax(&h.logits(&codes[i])?) == y)))
            .collect::<Result<Vec<_>>>()?,
        (Examples::Clone(pairs), Head::Clone(h)) => pairs
            .par_iter()
            .map(|&(a, b, y)| {
                let p = sigmoid(h.logit(&codes[a], &codes[b])?);
                Ok(usize::from((p >= h.threshold) == (y == 1.0)))
            })
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Shape("task head does not match the dataset".into())),
    };
    Ok(correct.iter().sum::<usize>() as f64 / ex.len().max(1) as f64)
}

/// Initial model: seeded encoder, optional skip-gram embeddings, seeded head.
fn init_model(data: &TaskData, vocab: &Vocabulary, cfg: &TaskConfig, channels: &Channels, seed: u64) -> Result<TaskModel> {
    if cfg.dim == 0 || cfg.hidden == 0 {
        return Err(Error::Config("dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = EncoderShape {
        vocab: vocab.len(),
        dim: cfg.dim,
        hidden: cfg.hidden,
        bug_features: CATEGORY_SLOTS,
        pattern_features: channels.patterns.len(),
    };
    let mut encoder = EncoderParams::random(shape, &mut rng);
    encoder.rounds = cfg.rounds.max(1);
    encoder.fusion = cfg.fusion;
    if cfg.embed_epochs > 0 {
        let asts: Vec<_> = data.units().into_iter().map(|u| &u.ast).collect();
        let sg = SkipGramConfig {
            dim: cfg.dim,
            epochs: cfg.embed_epochs,
            ..SkipGramConfig::default()
        };
        encoder.embedding = train_embeddings(&asts, vocab, &sg, seed);
    }
    let code_dim = encoder.code_dim();
    let head = match data {
        TaskData::Classify { classes, .. } => Head::Classifier(ClassifierHead::random(*classes, code_dim, &mut rng)),
        TaskData::Clone(_) => Head::Clone(CloneHead::random(code_dim, cfg.clone_threshold, &mut rng)),
    };
    Ok(TaskModel { encoder, head })
}

/// Train encoder and head end to end with the variant's channels enabled.
pub fn train_task(data: &TaskData, variant: Variant, cfg: &TaskConfig, channels: &Channels, seed: u64) -> Result<TrainedTask> {
    let units = data.units();
    if units.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if cfg.batch == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    check_channels(units.iter().copied(), variant, channels)?;
    let asts: Vec<_> = units.iter().map(|u| &u.ast).collect();
    let vocab = build_vocab(&asts, cfg.min_count).with_abstract_identifiers(cfg.abstract_identifiers);
    let mut model = init_model(data, &vocab, cfg, channels, seed)?;
    let prepared = prepare_all(&units, &vocab, variant, channels)?;
    let examples = match data {
        TaskData::Classify { classes, samples } => {
            if let Some(bad) = samples.iter().find(|s| s.label >= *classes) {
                return Err(Error::LabelRange(vec![bad.id().to_string()]));
            }
            Examples::Classify(samples.iter().map(|s| s.label).collect())
        }
        TaskData::Clone(corpus) => Examples::Clone(pair_indices(corpus)?),
    };
    if examples.len() == 0 {
        return Err(Error::EmptyCorpus);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut adam = Adam::new(cfg.lr, (0.9, 0.999));
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut log = Vec::new();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch) {
            let results = batch
                .par_iter()
                .map(|&i| example_grad(&model, &prepared, &examples, i))
                .collect::<Result<Vec<_>>>()?;
            let mut grads = model.zeros_like();
            for (loss, g) in &results {
                total += loss;
                accumulate(&mut grads, g);
            }
            scale_all(&mut grads, 1.0 / batch.len() as f64);
            adam.step(&mut model, &grads);
        }
        let acc = training_accuracy(&model, &prepared, &examples)?;
        let entry = EpochLog {
            epoch,
            loss: total / examples.len() as f64,
            train_accuracy: acc,
        };
        log::info!("epoch {epoch} loss {:.6} train_accuracy {:.4}", entry.loss, acc);
        log.push(entry);
        if cfg.early_stop && acc == 1.0 {
            break;
        }
    }
    Ok(TrainedTask {
        variant,
        vocab,
        model,
        log,
    })
}

/// Model-space gradient of one example's loss, for checking.
pub fn loss_and_grad_classify(model: &TaskModel, unit: &PreparedUnit, label: usize) -> Result<(f64, TaskModel)> {
    example_grad(model, std::slice::from_ref(unit), &Examples::Classify(vec![label]), 0)
}

pub fn loss_and_grad_clone(model: &TaskModel, a: &PreparedUnit, b: &PreparedUnit, target: f64) -> Result<(f64, TaskModel)> {
    let units = [a.clone(), b.clone()];
    example_grad(model, &units, &Examples::Clone(vec![(0, 1, target)]), 0)
}

