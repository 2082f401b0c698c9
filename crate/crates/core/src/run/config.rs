//! Run configuration as flat `key = value` text.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bugs::FilterConfig;
use crate::encode::Fusion;
use crate::error::{Error, Result};
use crate::ingest::read_text;
use crate::patterns::{AdaBoostConfig, DEFAULT_PATTERNS};
use crate::tasks::{TaskConfig, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Classify,
    Clone,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Classify => "classify",
            TaskKind::Clone => "clone",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(TaskKind::Classify),
            "clone" => Ok(TaskKind::Clone),
            other => Err(Error::Config(format!("unknown task `{other}` (expected classify or clone)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: TaskKind,
    pub variant: Variant,
    /// Classification corpus used for training.
    pub corpus: Option<PathBuf>,
    /// Held-out classification corpus.
    pub test: Option<PathBuf>,
    /// Clone code store and training pairs.
    pub code: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub test_pairs: Option<PathBuf>,
    pub warnings: Option<PathBuf>,
    pub reports: Option<PathBuf>,
    pub pattern_corpus: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub patterns: Vec<String>,
    pub dim: usize,
    pub hidden: usize,
    pub rounds: usize,
    pub fusion: Fusion,
    pub min_count: usize,
    pub embed_epochs: usize,
    pub abstract_identifiers: bool,
    pub n_max: usize,
    pub min_df: usize,
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub k_folds: usize,
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub early_stop: bool,
    pub clone_threshold: f64,
    pub seed: u64,
    /// Ablation gives variant `i` the seed `seed + i` instead of sharing one.
    pub vary_seed: bool,
}

impl RunConfig {
    /// Defaults for everything but the seed, which has none.
    pub fn with_seed(seed: u64) -> Self {
        let t = TaskConfig::default();
        let f = FilterConfig::default();
        let a = AdaBoostConfig::default();
        RunConfig {
            task: TaskKind::Classify,
            variant: Variant::None,
            corpus: None,
            test: None,
            code: None,
            pairs: None,
            test_pairs: None,
            warnings: None,
            reports: None,
            pattern_corpus: None,
            out_dir: PathBuf::from("out"),
            patterns: DEFAULT_PATTERNS.iter().map(|s| s.to_string()).collect(),
            dim: t.dim,
            hidden: t.hidden,
            rounds: t.rounds,
            fusion: t.fusion,
            min_count: t.min_count,
            embed_epochs: t.embed_epochs,
            abstract_identifiers: t.abstract_identifiers,
            n_max: f.n_max,
            min_df: f.min_df,
            n_estimators: a.n_estimators,
            learning_rate: a.learning_rate,
            k_folds: f.folds,
            epochs: t.epochs,
            batch: t.batch,
            lr: t.lr,
            early_stop: t.early_stop,
            clone_threshold: t.clone_threshold,
            seed,
            vary_seed: false,
        }
    }

    /// Parse `key = value` lines; `#` starts a comment. `seed` is required.
    pub fn from_kv(text: &str) -> Result<Self> {
        Self::from_kv_with(text, &[])
    }

    /// Parse file text, then apply `key=value` overrides in order.
    pub fn from_kv_with(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        Self::from_entries(parse_lines(text)?, overrides)
    }

    /// Like [`RunConfig::from_kv_with`], but relative paths in the file are taken
    /// relative to `base`. Overrides are used as given.
    pub fn from_kv_in(text: &str, base: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let mut entries = parse_lines(text)?;
        for (k, v) in entries.iter_mut() {
            if PATH_KEYS.contains(&k.as_str()) && !v.is_empty() && Path::new(v.as_str()).is_relative() {
                *v = base.join(v.as_str()).display().to_string();
            }
        }
        Self::from_entries(entries, overrides)
    }

    fn from_entries(mut entries: Vec<(String, String)>, overrides: &[(String, String)]) -> Result<Self> {
        entries.extend(overrides.iter().cloned());
        let seed = entries
            .iter()
            .rev()
            .find(|(k, _)| k == "seed")
            .ok_or_else(|| Error::Config("`seed` is mandatory".into()))?;
        let mut cfg = RunConfig::with_seed(parse_num(&seed.0, &seed.1)?);
        for (k, v) in &entries {
            cfg.apply_override(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[(String, String)]) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_kv_in(&read_text(path)?, base, overrides)
    }

    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "task" => self.task = v.parse()?,
            "variant" => self.variant = v.parse()?,
            "corpus" => self.corpus = opt_path(v),
            "test" => self.test = opt_path(v),
            "code" => self.code = opt_path(v),
            "pairs" => self.pairs = opt_path(v),
            "test_pairs" => self.test_pairs = opt_path(v),
            "warnings" => self.warnings = opt_path(v),
            "reports" => self.reports = opt_path(v),
            "pattern_corpus" => self.pattern_corpus = opt_path(v),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "patterns" => {
                self.patterns = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "dim" => self.dim = parse_num(key, v)?,
            "hidden" => self.hidden = parse_num(key, v)?,
            "rounds" => self.rounds = parse_num(key, v)?,
            "fusion" => {
                self.fusion = match v {
                    "node" => Fusion::Node,
                    "statement" => Fusion::Statement,
                    _ => return Err(Error::Config(format!("fusion must be node or statement, got `{v}`"))),
                }
            }
            "min_count" => self.min_count = parse_num(key, v)?,
            "embed_epochs" => self.embed_epochs = parse_num(key, v)?,
            "abstract_identifiers" => self.abstract_identifiers = parse_num(key, v)?,
            "n_max" => self.n_max = parse_num(key, v)?,
            "min_df" => self.min_df = parse_num(key, v)?,
            "n_estimators" => self.n_estimators = parse_num(key, v)?,
            "learning_rate" => self.learning_rate = parse_num(key, v)?,
            "k_folds" => self.k_folds = parse_num(key, v)?,
            "epochs" => self.epochs = parse_num(key, v)?,
            "batch" => self.batch = parse_num(key, v)?,
            "lr" => self.lr = parse_num(key, v)?,
            "early_stop" => self.early_stop = parse_num(key, v)?,
            "clone_threshold" => self.clone_threshold = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "vary_seed" => self.vary_seed = parse_num(key, v)?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dim", self.dim),
            ("hidden", self.hidden),
            ("rounds", self.rounds),
            ("n_max", self.n_max),
            ("min_df", self.min_df),
            ("n_estimators", self.n_estimators),
            ("batch", self.batch),
            ("min_count", self.min_count),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
        }
        if self.k_folds < 2 {
            return Err(Error::InvalidFolds(self.k_folds));
        }
        if !(self.lr > 0.0 && self.learning_rate > 0.0) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        if !(self.clone_threshold > 0.0 && self.clone_threshold < 1.0) {
            return Err(Error::Config("`clone_threshold` must lie in (0, 1)".into()));
        }
        if self.patterns.is_empty() {
            return Err(Error::Config("`patterns` must list at least one label".into()));
        }
        Ok(())
    }

    /// Every key in a fixed order; `from_kv(to_kv())` gives the same config back.
    pub fn to_kv(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let p = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        vec![
            ("task", self.task.to_string()),
            ("variant", self.variant.to_string()),
            ("corpus", p(&self.corpus)),
            ("test", p(&self.test)),
            ("code", p(&self.code)),
            ("pairs", p(&self.pairs)),
            ("test_pairs", p(&self.test_pairs)),
            ("warnings", p(&self.warnings)),
            ("reports", p(&self.reports)),
            ("pattern_corpus", p(&self.pattern_corpus)),
            ("out_dir", self.out_dir.display().to_string()),
            ("patterns", self.patterns.join(",")),
            ("dim", self.dim.to_string()),
            ("hidden", self.hidden.to_string()),
            ("rounds", self.rounds.to_string()),
            (
                "fusion",
                match self.fusion {
                    Fusion::Node => "node",
                    Fusion::Statement => "statement",
                }
                .to_string(),
            ),
            ("min_count", self.min_count.to_string()),
            ("embed_epochs", self.embed_epochs.to_string()),
            ("abstract_identifiers", self.abstract_identifiers.to_string()),
            ("n_max", self.n_max.to_string()),
            ("min_df", self.min_df.to_string()),
            ("n_estimators", self.n_estimators.to_string()),
            ("learning_rate", self.learning_rate.to_string()),
            ("k_folds", self.k_folds.to_string()),
            ("epochs", self.epochs.to_string()),
            ("batch", self.batch.to_string()),
            ("lr", self.lr.to_string()),
            ("early_stop", self.early_stop.to_string()),
            ("clone_threshold", self.clone_threshold.to_string()),
            ("seed", self.seed.to_string()),
            ("vary_seed", self.vary_seed.to_string()),
        ]
    }

    pub fn task_config(&self) -> TaskConfig {
        TaskConfig {
            dim: self.dim,
            hidden: self.hidden,
            rounds: self.rounds,
            fusion: self.fusion,
            min_count: self.min_count,
            embed_epochs: self.embed_epochs,
            epochs: self.epochs,
            batch: self.batch,
            lr: self.lr,
            early_stop: self.early_stop,
            clone_threshold: self.clone_threshold,
            abstract_identifiers: self.abstract_identifiers,
        }
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            n_max: self.n_max,
            min_df: self.min_df,
            folds: self.k_folds,
            ..FilterConfig::default()
        }
    }

    pub fn adaboost_config(&self) -> AdaBoostConfig {
        AdaBoostConfig {
            n_estimators: self.n_estimators,
            learning_rate: self.learning_rate,
        }
    }
}

const PATH_KEYS: &[&str] = &[
    "corpus",
    "test",
    "code",
    "pairs",
    "test_pairs",
    "warnings",
    "reports",
    "pattern_corpus",
    "out_dir",
];

fn parse_lines(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Split a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))
}

fn opt_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        assert!(matches!(RunConfig::from_kv("dim = 4"), Err(Error::Config(m)) if m.contains("seed")));
        assert_eq!(RunConfig::from_kv("seed = 3").unwrap().seed, 3);
    }

    #[test]
    fn round_trip_through_text() {
        let mut cfg = RunConfig::with_seed(11);
        cfg.variant = Variant::BugsAndPatterns;
        cfg.fusion = Fusion::Statement;
        cfg.corpus = Some("data/train.jsonl".into());
        cfg.lr = 0.0125;
        cfg.patterns = vec!["A".into(), "NONE".into()];
        let back = RunConfig::from_kv(&cfg.to_kv()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_kv(), cfg.to_kv());
    }

    #[test]
    fn overrides_win_over_file() {
        let over = vec![parse_override("dim=8").unwrap(), parse_override("seed=9").unwrap()];
        let cfg = RunConfig::from_kv_with("seed = 1\ndim = 4 # small\n", &over).unwrap();
        assert_eq!((cfg.dim, cfg.seed), (8, 9));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_kv("seed = 1\ncolour = red").is_err());
        assert!(RunConfig::from_kv("seed = 1\ndim = 0").is_err());
        assert!(RunConfig::from_kv("seed = 1\nk_folds = 1").is_err());
        assert!(RunConfig::from_kv("seed = 1\nnot a pair").is_err());
        let err = RunConfig::from_kv("seed = 1\nvariant = BOTH").unwrap_err().to_string();
        for v in Variant::ALL {
            assert!(err.contains(v.as_str()), "{err}");
        }
    }
}
