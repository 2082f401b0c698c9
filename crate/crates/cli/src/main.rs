use std::path::PathBuf;
use std::process::ExitCode;

use astctx::ingest::CloneType;
use astctx::run::{self, parse_override, RunConfig, TaskKind};
use astctx::Error;
use clap::{Args, Parser, Subcommand};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "astctx", version, about = "Train and evaluate statement-tree code models with static-analysis context")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one variant and write the bundle and training log.
    Train(ConfigArgs),
    /// Evaluate a bundle on a dataset and write a report.
    Eval(EvalArgs),
    /// Train and evaluate all five variants with one seed.
    Ablate(ConfigArgs),
    /// Select a bug-report classifier and filter a warning file with it.
    FilterBugs(ConfigArgs),
    /// Cross-validate the design pattern detector.
    DetectPatterns(ConfigArgs),
    /// Generate synthetic clone pairs from labeled seed programs.
    GenClones(GenArgs),
    /// Run gradient checks and oracle comparisons.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long)]
    warnings: Option<PathBuf>,
    #[arg(long)]
    reports: Option<PathBuf>,
    #[arg(long)]
    pattern_corpus: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> astctx::Result<RunConfig> {
        let mut over = Vec::new();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        for (k, v) in [
            ("seed", self.seed.map(|s| s.to_string())),
            ("variant", self.variant.clone()),
            ("task", self.task.clone()),
            ("corpus", path(&self.corpus)),
            ("code", path(&self.code)),
            ("pairs", path(&self.pairs)),
            ("warnings", path(&self.warnings)),
            ("reports", path(&self.reports)),
            ("pattern_corpus", path(&self.pattern_corpus)),
            ("out_dir", path(&self.out_dir)),
            ("epochs", self.epochs.map(|e| e.to_string())),
        ] {
            if let Some(v) = v {
                over.push((k.to_string(), v));
            }
        }
        for s in &self.set {
            over.push(parse_override(s)?);
        }
        match &self.config {
            Some(p) => RunConfig::load(p, &over),
            None => RunConfig::from_kv_with("", &over),
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// classify or clone.
    #[arg(long)]
    task: String,
    /// Classification corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Clone code store.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Clone pairs.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long)]
    warnings: Option<PathBuf>,
    /// Report file; defaults to `eval.tsv` beside the bundle.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Classification corpus whose programs and labels seed the pairs.
    #[arg(long)]
    seeds: PathBuf,
    /// Comma-separated clone types.
    #[arg(long, default_value = "T1,T2,ST3,MT3,T4")]
    types: String,
    /// Positive pairs per type.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

enum Failure {
    Usage(String),
    Data(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Data(m) => (EXIT_DATA, m),
                Failure::Check(m) => (EXIT_CHECK, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Train(args) => {
            let cfg = args.resolve()?;
            let out = run::cmd_train(&cfg)?;
            println!("bundle\t{}", out.bundle_path.display());
            println!("log\t{}", out.log_path.display());
            if let Some(last) = out.task.log.last() {
                println!(
                    "epoch {} loss {:.6} train_accuracy {:.4}",
                    last.epoch, last.loss, last.train_accuracy
                );
            }
        }
        Command::Eval(args) => {
            let task: TaskKind = args.task.parse()?;
            let data = run::load_dataset(
                task,
                args.corpus.as_deref(),
                args.code.as_deref(),
                args.pairs.as_deref(),
                args.warnings.as_deref(),
            )?;
            let out = args.out.clone().unwrap_or_else(|| {
                args.bundle
                    .parent()
                    .unwrap_or_else(|| std::path::Path::new("."))
                    .join(run::pipeline::EVAL_FILE)
            });
            let (eval, _) = run::cmd_eval(&args.bundle, &data, Some(&out))?;
            let (name, value) = eval.headline();
            println!("{name}\t{value:.4}");
            println!("report\t{}", out.display());
        }
        Command::Ablate(args) => {
            let cfg = args.resolve()?;
            let (results, path) = run::cmd_ablate(&cfg)?;
            for (v, e) in &results {
                let (name, value) = e.headline();
                println!("{v}\t{name}\t{value:.4}");
            }
            println!("report\t{}", path.display());
        }
        Command::FilterBugs(args) => {
            let cfg = args.resolve()?;
            let reports = cfg
                .reports
                .clone()
                .ok_or_else(|| Failure::Usage("filter-bugs needs `reports`".into()))?;
            let warnings = cfg
                .warnings
                .clone()
                .ok_or_else(|| Failure::Usage("filter-bugs needs `warnings`".into()))?;
            let r = run::cmd_filter_bugs(&cfg, &reports, &warnings)?;
            print!("{}", r.summary);
        }
        Command::DetectPatterns(args) => {
            let cfg = args.resolve()?;
            let corpus = cfg
                .pattern_corpus
                .clone()
                .ok_or_else(|| Failure::Usage("detect-patterns needs `pattern_corpus`".into()))?;
            let r = run::cmd_detect_patterns(&cfg, &corpus)?;
            print!("{}", astctx::patterns::format_pattern_report(&r));
        }
        Command::GenClones(args) => {
            let types = args
                .types
                .split(',')
                .map(|t| t.trim().parse::<CloneType>())
                .collect::<astctx::Result<Vec<_>>>()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let clones = run::cmd_gen_clones(&args.seeds, &types, args.count, args.seed, &args.out_dir)?;
            println!("units\t{}", clones.corpus.store.len());
            println!("pairs\t{}", clones.corpus.pairs.len());
        }
        Command::Selfcheck(args) => {
            let report = run::run_selfcheck(args.inject_fault.as_deref())?;
            print!("{}", report.summary());
            if let Some(f) = report.first_failure() {
                return Err(Failure::Check(format!("selfcheck failed at {}: {}", f.name, f.detail)));
            }
        }
    }
    Ok(())
}
