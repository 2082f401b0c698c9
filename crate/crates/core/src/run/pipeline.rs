//! Commands tying ingestion, side models, training and reporting together.

use std::path::{Path, PathBuf};

use super::bundle::ModelBundle;
use super::config::{RunConfig, TaskKind};
use super::report;
use crate::bugs::select_filter;
use crate::error::{Error, Result};
use crate::ingest::{
    attach_warnings, load_bug_reports, load_classification_corpus, load_clone_corpus, load_pattern_corpus, load_warnings,
    BugWarning, ClassificationSample, CloneCorpus, CodeUnit,
};
use crate::metrics::Metrics;
use crate::patterns::{train_pattern_model, PatternSet};
use crate::tasks::{
    check_channels, eval_classification, eval_clone, train_task, Channels, ClassificationEval, CloneEval, Head, TaskData,
    TrainedTask, Variant,
};

pub const BUNDLE_FILE: &str = "model.json";
pub const LOG_FILE: &str = "train.log";
pub const EVAL_FILE: &str = "eval.tsv";
pub const ABLATION_FILE: &str = "ablation.tsv";

#[derive(Debug, Clone)]
pub enum Dataset {
    Classify {
        classes: usize,
        samples: Vec<ClassificationSample>,
    },
    Clone(CloneCorpus),
}

impl Dataset {
    pub fn task(&self) -> TaskKind {
        match self {
            Dataset::Classify { .. } => TaskKind::Classify,
            Dataset::Clone(_) => TaskKind::Clone,
        }
    }

    pub fn as_task_data(&self) -> TaskData<'_> {
        match self {
            Dataset::Classify { classes, samples } => TaskData::Classify {
                classes: *classes,
                samples,
            },
            Dataset::Clone(c) => TaskData::Clone(c),
        }
    }

    fn units(&self) -> Vec<&CodeUnit> {
        match self {
            Dataset::Classify { samples, .. } => samples.iter().map(|s| &s.unit).collect(),
            Dataset::Clone(c) => c.store.values().collect(),
        }
    }

    pub fn attach(&mut self, warnings: &[BugWarning]) -> usize {
        let mut units: Vec<&mut CodeUnit> = match self {
            Dataset::Classify { samples, .. } => samples.iter_mut().map(|s| &mut s.unit).collect(),
            Dataset::Clone(c) => c.store.values_mut().collect(),
        };
        attach_warnings(&mut units, warnings)
    }
}

pub fn read_warning_file(path: &Path) -> Result<Vec<BugWarning>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_warnings(&bytes)
}

/// Load a classification corpus, or a clone store with its pairs, and attach warnings.
pub fn load_dataset(
    task: TaskKind,
    corpus: Option<&Path>,
    code: Option<&Path>,
    pairs: Option<&Path>,
    warnings: Option<&Path>,
) -> Result<Dataset> {
    let missing = |key: &str| Error::Config(format!("task {task} needs `{key}`"));
    let mut data = match task {
        TaskKind::Classify => {
            let (classes, samples) = load_classification_corpus(corpus.ok_or_else(|| missing("corpus"))?)?;
            Dataset::Classify { classes, samples }
        }
        TaskKind::Clone => Dataset::Clone(load_clone_corpus(
            code.ok_or_else(|| missing("code"))?,
            pairs.ok_or_else(|| missing("pairs"))?,
        )?),
    };
    if let Some(w) = warnings {
        let n = data.attach(&read_warning_file(w)?);
        log::info!("attached {n} warnings");
    }
    Ok(data)
}

pub fn train_dataset(cfg: &RunConfig) -> Result<Dataset> {
    load_dataset(
        cfg.task,
        cfg.corpus.as_deref(),
        cfg.code.as_deref(),
        cfg.pairs.as_deref(),
        cfg.warnings.as_deref(),
    )
}

/// The held-out set when one is configured.
pub fn test_dataset(cfg: &RunConfig) -> Result<Option<Dataset>> {
    let configured = match cfg.task {
        TaskKind::Classify => cfg.test.is_some(),
        TaskKind::Clone => cfg.test_pairs.is_some(),
    };
    if !configured {
        return Ok(None);
    }
    load_dataset(
        cfg.task,
        cfg.test.as_deref(),
        cfg.code.as_deref(),
        cfg.test_pairs.as_deref(),
        cfg.warnings.as_deref(),
    )
    .map(Some)
}

/// Train the side models the variants need from whatever inputs are configured.
pub fn build_channels(cfg: &RunConfig, variants: &[Variant]) -> Result<Channels> {
    let mut ch = Channels {
        patterns: PatternSet::new(cfg.patterns.clone())?,
        ..Channels::default()
    };
    if let Some(path) = &cfg.reports {
        let docs = load_bug_reports(path)?;
        ch.reports = docs.iter().map(|d| (d.id.clone(), d.text.clone())).collect();
        if variants.iter().any(|v| v.filters_bugs()) {
            let sel = select_filter(&docs, &cfg.filter_config(), cfg.seed)?;
            log::info!("bug filter: {} (cv f1 {:.4})", sel.model.kind, sel.selected_cv().f1);
            ch.filter = Some(sel.model);
        }
    }
    if let Some(path) = &cfg.pattern_corpus {
        if variants.iter().any(|v| v.uses_patterns()) {
            let samples = load_pattern_corpus(path)?;
            ch.detector = Some(train_pattern_model(&samples, &ch.patterns, cfg.adaboost_config())?);
        }
    }
    Ok(ch)
}

/// Fail with the missing input named before any training starts.
pub fn check_inputs(cfg: &RunConfig, data: &Dataset, channels: &Channels, variants: &[Variant]) -> Result<()> {
    for &v in variants {
        if v.uses_bugs() && cfg.warnings.is_none() {
            return Err(Error::MissingChannel(format!("bug warnings (no `warnings` file configured for {v})")));
        }
        if v.filters_bugs() && cfg.reports.is_none() {
            return Err(Error::MissingChannel(format!("bug filter (no `reports` corpus configured for {v})")));
        }
        check_channels(data.units(), v, channels)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Classify(ClassificationEval),
    Clone(CloneEval),
}

impl Evaluation {
    /// Accuracy for classification, ALL-row F1 for clones.
    pub fn headline(&self) -> (&'static str, f64) {
        match self {
            Evaluation::Classify(e) => ("accuracy", e.metrics.accuracy),
            Evaluation::Clone(e) => ("f1", e.get("ALL").map_or(0.0, |m| m.f1)),
        }
    }

    pub fn metrics(&self) -> Option<Metrics> {
        match self {
            Evaluation::Classify(e) => Some(e.metrics),
            Evaluation::Clone(e) => e.get("ALL").copied(),
        }
    }
}

pub fn evaluate(task: &TrainedTask, channels: &Channels, data: &Dataset) -> Result<Evaluation> {
    match (data, &task.model.head) {
        (Dataset::Classify { samples, .. }, Head::Classifier(_)) => {
            eval_classification(task, channels, samples).map(Evaluation::Classify)
        }
        (Dataset::Clone(c), Head::Clone(_)) => eval_clone(task, channels, c).map(Evaluation::Clone),
        _ => Err(Error::Config("dataset task does not match the model's head".into())),
    }
}

pub fn report_table(results: &[(Variant, Evaluation)]) -> String {
    match results.first() {
        Some((_, Evaluation::Clone(_))) => {
            let rows: Vec<(Variant, &CloneEval)> = results
                .iter()
                .filter_map(|(v, e)| match e {
                    Evaluation::Clone(c) => Some((*v, c)),
                    Evaluation::Classify(_) => None,
                })
                .collect();
            report::clone_table(&rows)
        }
        _ => {
            let rows: Vec<(Variant, Metrics)> = results
                .iter()
                .filter_map(|(v, e)| match e {
                    Evaluation::Classify(c) => Some((*v, c.metrics)),
                    Evaluation::Clone(_) => None,
                })
                .collect();
            report::classification_table(&rows)
        }
    }
}

fn config_entries(cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn format_log(task: &TrainedTask, seed: u64) -> String {
    let mut out = format!("# train variant={} seed={seed}\nepoch\tloss\ttrain_accuracy\n", task.variant);
    for e in &task.log {
        out.push_str(&format!("{}\t{:.6}\t{:.4}\n", e.epoch, e.loss, e.train_accuracy));
    }
    out
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub task: TrainedTask,
    pub channels: Channels,
    pub bundle: ModelBundle,
    pub bundle_path: PathBuf,
    pub log_path: PathBuf,
}

/// Train the configured variant without touching the filesystem beyond the inputs.
pub fn train_in_memory(cfg: &RunConfig) -> Result<(TrainedTask, Channels, ModelBundle)> {
    let data = train_dataset(cfg)?;
    let channels = build_channels(cfg, &[cfg.variant])?;
    check_inputs(cfg, &data, &channels, &[cfg.variant])?;
    let task = train_task(&data.as_task_data(), cfg.variant, &cfg.task_config(), &channels, cfg.seed)?;
    let bundle = ModelBundle::new(&task, &channels, config_entries(cfg));
    Ok((task, channels, bundle))
}

/// Train, then write the bundle and the per-epoch log into `out_dir`.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutput> {
    let (task, channels, bundle) = train_in_memory(cfg)?;
    let bundle_path = cfg.out_dir.join(BUNDLE_FILE);
    let log_path = cfg.out_dir.join(LOG_FILE);
    write(&bundle_path, &bundle.to_json())?;
    write(&log_path, &format_log(&task, cfg.seed))?;
    Ok(TrainOutput {
        task,
        channels,
        bundle,
        bundle_path,
        log_path,
    })
}

/// Evaluate a saved bundle on `data`; the report goes to `out` when given.
pub fn cmd_eval(bundle_path: &Path, data: &Dataset, out: Option<&Path>) -> Result<(Evaluation, String)> {
    let bundle = ModelBundle::load(bundle_path)?;
    let (task, channels) = bundle.restore()?;
    let eval = evaluate(&task, &channels, data)?;
    let seed = bundle
        .config
        .iter()
        .find(|(k, _)| k == "seed")
        .map_or("-", |(_, v)| v.as_str());
    let mut text = report::header("eval", data.task().as_str(), &[task.variant], seed, &bundle.config);
    text.push_str(&report_table(&[(task.variant, eval.clone())]));
    if let Some(path) = out {
        write(path, &text)?;
    }
    Ok((eval, text))
}

/// Train and evaluate all five variants on the same data and seed.
pub fn ablate_in_memory(cfg: &RunConfig) -> Result<(Vec<(Variant, Evaluation)>, String)> {
    let data = train_dataset(cfg)?;
    let test = test_dataset(cfg)?;
    let channels = build_channels(cfg, &Variant::ALL)?;
    check_inputs(cfg, &data, &channels, &Variant::ALL)?;
    let eval_on = test.as_ref().unwrap_or(&data);
    let mut results = Vec::new();
    for (i, v) in Variant::ALL.into_iter().enumerate() {
        let seed = if cfg.vary_seed { cfg.seed + i as u64 } else { cfg.seed };
        let task = train_task(&data.as_task_data(), v, &cfg.task_config(), &channels, seed)?;
        let e = evaluate(&task, &channels, eval_on)?;
        let (name, value) = e.headline();
        log::info!("{v}: {name} {value:.4}");
        results.push((v, e));
    }
    let mut text = report::header(
        "ablate",
        cfg.task.as_str(),
        &Variant::ALL,
        &cfg.seed.to_string(),
        &config_entries(cfg),
    );
    if test.is_none() {
        text.push_str("# evaluated on the training data (no held-out set configured)\n");
    }
    text.push_str(&report_table(&results));
    Ok((results, text))
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<(Vec<(Variant, Evaluation)>, PathBuf)> {
    let (results, text) = ablate_in_memory(cfg)?;
    let path = cfg.out_dir.join(ABLATION_FILE);
    write(&path, &text)?;
    Ok((results, path))
}

pub struct FilterRun {
    pub cv: Vec<(crate::bugs::FilterKind, Metrics)>,
    pub selected: crate::bugs::FilterKind,
    pub outcome: crate::bugs::FilterOutcome,
    pub summary: String,
}

/// Select a bug filter by cross-validation on the report corpus and apply it to a warning file.
/// Writes the kept warnings and a summary into `out_dir`.
pub fn cmd_filter_bugs(cfg: &RunConfig, reports: &Path, warnings: &Path) -> Result<FilterRun> {
    let docs = load_bug_reports(reports)?;
    let sel = select_filter(&docs, &cfg.filter_config(), cfg.seed)?;
    let links = docs.iter().map(|d| (d.id.clone(), d.text.clone())).collect();
    let outcome = crate::bugs::filter_warnings(&read_warning_file(warnings)?, &links, &sel.model);
    let mut summary = format!("# filter-bugs seed={}\nclassifier\tcv_precision\tcv_recall\tcv_f1\n", cfg.seed);
    for (k, m) in &sel.cv {
        summary.push_str(&format!("{k}\t{:.4}\t{:.4}\t{:.4}\n", m.precision, m.recall, m.f1));
    }
    summary.push_str(&format!("selected\t{}\n", sel.model.kind));
    summary.push_str(&outcome.summary());
    write(&cfg.out_dir.join("filter.tsv"), &summary)?;
    write(&cfg.out_dir.join("kept.xml"), &crate::ingest::warnings::write_warnings(&outcome.kept))?;
    Ok(FilterRun {
        cv: sel.cv.clone(),
        selected: sel.model.kind,
        outcome,
        summary,
    })
}

/// Stratified cross-validation of the pattern detector; writes `patterns.tsv`.
pub fn cmd_detect_patterns(cfg: &RunConfig, corpus: &Path) -> Result<crate::patterns::PatternCvReport> {
    let samples = load_pattern_corpus(corpus)?;
    let set = PatternSet::new(cfg.patterns.clone())?;
    let (x, y) = crate::patterns::pattern_dataset(&samples, &set)?;
    let r = crate::patterns::cross_validate_patterns(&x, &y, set.labels(), cfg.adaboost_config(), cfg.k_folds, cfg.seed)?;
    write(&cfg.out_dir.join("patterns.tsv"), &crate::patterns::format_pattern_report(&r))?;
    Ok(r)
}

/// Generate synthetic clone pairs from a labeled seed corpus; writes `code.jsonl` and `pairs.jsonl`.
pub fn cmd_gen_clones(
    seeds: &Path,
    types: &[crate::ingest::CloneType],
    count: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<crate::tasks::SyntheticClones> {
    let (_, samples) = load_classification_corpus(seeds)?;
    let seeds: Vec<_> = samples.iter().map(|s| (s.unit.ast.clone(), s.label)).collect();
    let clones = crate::tasks::gen_clone_suite(&seeds, types, count, seed)?;
    write(
        &out_dir.join("code.jsonl"),
        &crate::ingest::write_code_store(clones.corpus.store.values()),
    )?;
    write(&out_dir.join("pairs.jsonl"), &crate::ingest::write_pairs(&clones.corpus.pairs))?;
    Ok(clones)
}
