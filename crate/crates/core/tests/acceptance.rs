//! Acceptance suite. Each test prints one PASS/FAIL line with the measured value
//! next to its tolerance, then asserts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use astctx::ast::{kind, AstNode};
use astctx::bugs::{build_ngram_vocab, featurize, filter_warnings, select_filter, FilterConfig};
use astctx::encode::encoder::{unit_backward, unit_forward};
use astctx::encode::{build_vocab, split_statements, Channel, CompiledTree, EncoderParams, EncoderShape, PreparedUnit, RawContext, Scope};
use astctx::ingest::{load_classification_corpus, parse_mini, CloneType};
use astctx::metrics::stratified_folds;
use astctx::nn::params::{flatten, unflatten};
use astctx::nn::{affine, affine_backward, grad_check, gru_step, gru_step_backward, softmax_xent, GruParams, Tensor};
use astctx::patterns::{extract_pattern_features, train_adaboost, train_pattern_model, AdaBoostConfig, PatternSet, DEFAULT_PATTERNS};
use astctx::run::{ablate_in_memory, evaluate, train_in_memory, ModelBundle, RunConfig};
use astctx::synth::{bug_report_corpus, pattern_corpus, pattern_labeled_corpus, planted_warnings, random_program, task_corpus};
use astctx::tasks::{clone_score, eval_classification, eval_clone, gen_clone_suite, train_task, Channels, CloneHead, TaskConfig, TaskData, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRAD_TOL: f64 = 1e-4;
const GRAD_EPS: f64 = 1e-5;
const GRAD_BUDGET: Duration = Duration::from_secs(60);
const SPLIT_PROGRAMS: usize = 50;
const OVERFIT_EPOCHS: usize = 200;
const OVERFIT_BUDGET: Duration = Duration::from_secs(120);
const CLONE_SEED_PROGRAMS: usize = 30;
const CLONE_SEEDS: u64 = 3;
const ST3_MIN_F1: f64 = 0.90;
const SYMMETRY_PAIRS: usize = 1000;
const FILTER_MIN_F1: f64 = 0.90;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const RQ2_SEEDS: u64 = 5;

fn report(criterion: u32, name: &str, ok: bool, detail: String) {
    println!("{} criterion {criterion:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn c01_gradient_integrity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut errs = Vec::new();

    let (m, n) = (4, 5);
    let probe = rand_vec(&mut rng, m);
    let point = rand_vec(&mut rng, n + m * n + m);
    errs.push((
        "affine",
        grad_check(
            |v| {
                let (x, rest) = v.split_at(n);
                let (w, b) = rest.split_at(m * n);
                let w = Tensor::matrix(m, n, w.to_vec()).unwrap();
                let y = affine(x, &w, b).unwrap();
                let g = affine_backward(x, &w, &probe);
                let mut grad = g.dx;
                grad.extend_from_slice(g.dw.values());
                grad.extend(g.db);
                (y.iter().zip(&probe).map(|(a, p)| a * p).sum(), grad)
            },
            &point,
            GRAD_EPS,
        ),
    ));

    let (d, h) = (4, 5);
    let gru = GruParams::random(d, h, &mut rng);
    let probe = rand_vec(&mut rng, h);
    let mut point = rand_vec(&mut rng, d + h);
    point.extend(flatten(&gru));
    errs.push((
        "gru_step",
        grad_check(
            |v| {
                let (x, rest) = v.split_at(d);
                let (h0, w) = rest.split_at(h);
                let mut p = gru.clone();
                unflatten(&mut p, w);
                let (h1, cache) = gru_step(x, h0, &p).unwrap();
                let mut g = GruParams::zeros(d, h);
                let (dx, dh) = gru_step_backward(&p, &cache, &probe, &mut g);
                let mut grad = dx;
                grad.extend(dh);
                grad.extend(flatten(&g));
                (h1.iter().zip(&probe).map(|(a, b)| a * b).sum(), grad)
            },
            &point,
            GRAD_EPS,
        ),
    ));

    let logits = rand_vec(&mut rng, 6);
    errs.push(("softmax_xent", grad_check(|v| softmax_xent(v, 4).unwrap(), &logits, GRAD_EPS)));

    // full statement -> code path, with both context channels attached
    let ast = parse_mini("int g(int n){ int s = 0; for (int i = 0; i < n; i = i + 1) { if (i < 3) { s = s + i; } } return s; }").unwrap();
    let vocab = build_vocab(&[&ast], 1);
    let trees: Vec<_> = split_statements(&ast).iter().map(|t| CompiledTree::compile(&t.root, &vocab)).collect();
    let shape = EncoderShape { vocab: vocab.len(), dim: 5, hidden: 4, bug_features: 10, pattern_features: 6 };
    let contexts = vec![
        RawContext { channel: Channel::Bug, scope: Scope::Statement(2), features: rand_vec(&mut rng, 10) },
        RawContext { channel: Channel::Pattern, scope: Scope::WholeUnit, features: rand_vec(&mut rng, 6) },
    ];
    let unit = PreparedUnit::new(trees, contexts);
    let enc = EncoderParams::random(shape, &mut rng);
    let probe = rand_vec(&mut rng, enc.code_dim());
    errs.push((
        "encoder",
        grad_check(
            |v| {
                let mut p = enc.clone();
                unflatten(&mut p, v);
                let (code, cache) = unit_forward(&unit, &p).unwrap();
                let mut g = p.zeros_like();
                unit_backward(&unit, &cache, &probe, &p, &mut g);
                (code.iter().zip(&probe).map(|(a, b)| a * b).sum(), flatten(&g))
            },
            &flatten(&enc),
            GRAD_EPS,
        ),
    ));

    let elapsed = start.elapsed();
    let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let parts: Vec<String> = errs.iter().map(|(n, e)| format!("{n} {e:.2e}")).collect();
    report(
        1,
        "gradient integrity",
        worst < GRAD_TOL && elapsed < GRAD_BUDGET,
        format!("{} (tol {GRAD_TOL:.0e}), {elapsed:.2?} (budget {GRAD_BUDGET:?})", parts.join(", ")),
    );
}

/// Tokens of each statement in preorder, stopping at nested statements.
fn walk_tokens(ast: &AstNode) -> Vec<String> {
    fn own(n: &AstNode, out: &mut Vec<String>) {
        out.extend(n.token.clone());
        for c in &n.children {
            if !kind::is_statement(&c.kind) {
                own(c, out);
            }
        }
    }
    let mut out = Vec::new();
    for n in ast.preorder().filter(|n| kind::is_statement(&n.kind)) {
        own(n, &mut out);
    }
    out
}

#[test]
fn c02_splitting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut bad = Vec::new();
    for i in 0..SPLIT_PROGRAMS {
        let ast = parse_mini(&random_program(&mut rng)).unwrap();
        let trees = split_statements(&ast);
        let got: Vec<String> = trees
            .iter()
            .filter(|t| !t.is_end_block())
            .flat_map(|t| t.root.preorder().filter_map(|n| n.token.clone()).collect::<Vec<_>>())
            .collect();
        let markers = trees.iter().filter(|t| t.is_end_block()).count();
        let compound = ast.preorder().filter(|n| kind::is_compound(&n.kind)).count();
        let all_leaves: Vec<String> = ast.preorder().filter_map(|n| n.token.clone()).collect();
        let mut sorted_got = got.clone();
        let mut sorted_all = all_leaves;
        sorted_got.sort();
        sorted_all.sort();
        if got != walk_tokens(&ast) || markers != compound || sorted_got != sorted_all {
            bad.push(i);
        }
    }
    report(
        2,
        "splitting oracle",
        bad.is_empty(),
        format!("{} of {SPLIT_PROGRAMS} programs violate token preservation or marker count", bad.len()),
    );
}

#[test]
fn c03_overfit() {
    let (classes, samples) = load_classification_corpus(fixture("classify_train.jsonl")).unwrap();
    assert_eq!((classes, samples.len()), (4, 20));
    let cfg = TaskConfig { dim: 16, hidden: 12, lr: 1e-2, epochs: OVERFIT_EPOCHS, early_stop: true, ..TaskConfig::default() };
    let start = Instant::now();
    let t = train_task(&TaskData::Classify { classes, samples: &samples }, Variant::None, &cfg, &Channels::default(), 1).unwrap();
    let elapsed = start.elapsed();
    let last = t.log.last().unwrap();
    report(
        3,
        "overfit",
        last.train_accuracy == 1.0 && last.epoch <= OVERFIT_EPOCHS && elapsed < OVERFIT_BUDGET,
        format!(
            "train accuracy {:.4} after {} epochs (limit {OVERFIT_EPOCHS}), {elapsed:.2?} (budget {OVERFIT_BUDGET:?})",
            last.train_accuracy, last.epoch
        ),
    );
}

#[test]
fn c04_t1_t2_exactness() {
    let types = [CloneType::T1, CloneType::T2, CloneType::ST3, CloneType::MT3, CloneType::T4];
    let cfg = TaskConfig { dim: 16, hidden: 16, lr: 1e-2, epochs: 20, abstract_identifiers: true, ..TaskConfig::default() };
    let mut exact = true;
    let mut st3 = Vec::new();
    let mut lines = Vec::new();
    for s in 0..CLONE_SEEDS {
        let seeds: Vec<_> = task_corpus(6, CLONE_SEED_PROGRAMS / 6, 12, 100 + s)
            .unwrap()
            .into_iter()
            .map(|x| (x.unit.ast, x.label))
            .collect();
        assert_eq!(seeds.len(), CLONE_SEED_PROGRAMS);
        let train = gen_clone_suite(&seeds, &types, 60, s).unwrap();
        let test = gen_clone_suite(&seeds, &types, 20, s + 1000).unwrap();
        let t = train_task(&TaskData::Clone(&train.corpus), Variant::None, &cfg, &Channels::default(), s).unwrap();
        let ev = eval_clone(&t, &Channels::default(), &test.corpus).unwrap();
        let f1 = |name: &str| ev.rows.iter().find(|(n, _)| n == name).map(|(_, m)| m.f1).unwrap();
        exact &= f1("T1") == 1.0 && f1("T2") == 1.0;
        st3.push(f1("ST3"));
        lines.push(format!("seed {s}: T1 {:.3} T2 {:.3} ST3 {:.3}", f1("T1"), f1("T2"), f1("ST3")));
    }
    let mean = st3.iter().sum::<f64>() / st3.len() as f64;
    report(
        4,
        "T1/T2 exactness",
        exact && mean >= ST3_MIN_F1,
        format!("{}; ST3 mean {mean:.3} (min {ST3_MIN_F1})", lines.join("; ")),
    );
}

#[test]
fn c05_clone_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let head = CloneHead::random(24, 0.5, &mut rng);
    let mut asym = 0;
    for _ in 0..SYMMETRY_PAIRS {
        let a: Vec<f64> = (0..24).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = (0..24).map(|_| rng.gen_range(-10.0..10.0)).collect();
        if clone_score(&a, &b, &head).unwrap().to_bits() != clone_score(&b, &a, &head).unwrap().to_bits() {
            asym += 1;
        }
    }
    report(5, "clone symmetry", asym == 0, format!("{asym} of {SYMMETRY_PAIRS} pairs differ bitwise"));
}

#[test]
fn c06_ngram_oracle() {
    const WORDS: [&str; 7] = ["crash", "on", "null", "stream", "leak", "thread", "lock"];
    let (n_max, min_df) = (3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let docs: Vec<Vec<String>> = (0..10)
        .map(|_| (0..50).map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_string()).collect())
        .collect();
    // brute force: every contiguous run of 1..=n_max tokens
    let grams = |d: &[String]| -> Vec<String> {
        (1..=n_max).flat_map(|n| d.windows(n).map(|w| w.join(" "))).collect()
    };
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for d in &docs {
        let mut seen: Vec<String> = grams(d);
        seen.sort();
        seen.dedup();
        for g in seen {
            *df.entry(g).or_insert(0) += 1;
        }
    }
    df.retain(|_, &mut c| c >= min_df);

    let vocab = build_ngram_vocab(&docs, n_max, min_df, usize::MAX).unwrap();
    let got: BTreeMap<String, usize> = (0..vocab.len()).map(|i| (vocab.gram(i).to_string(), vocab.df(i))).collect();
    let mut mismatched_docs = 0;
    for d in &docs {
        let mut want: BTreeMap<String, u32> = BTreeMap::new();
        for g in grams(d).into_iter().filter(|g| df.contains_key(g)) {
            *want.entry(g).or_insert(0) += 1;
        }
        let have: BTreeMap<String, u32> = featurize(d, &vocab)
            .counts
            .into_iter()
            .map(|(i, c)| (vocab.gram(i).to_string(), c))
            .collect();
        if have != want {
            mismatched_docs += 1;
        }
    }
    report(
        6,
        "n-gram oracle",
        got == df && mismatched_docs == 0,
        format!("vocab {} vs oracle {} grams, {mismatched_docs} of 10 documents differ", got.len(), df.len()),
    );
}

#[test]
fn c07_bug_filter() {
    let docs = bug_report_corpus(60, 707);
    let sel = select_filter(&docs, &FilterConfig::default(), 7).unwrap();
    let cv = sel.selected_cv();
    let (warnings, planted) = planted_warnings(20, 6, 708);
    let out = filter_warnings(&warnings, &BTreeMap::new(), &sel.model);
    let removed: Vec<usize> = warnings
        .iter()
        .enumerate()
        .filter(|(_, w)| out.removed.contains(w))
        .map(|(i, _)| i)
        .collect();
    report(
        7,
        "bug filter",
        cv.f1 >= FILTER_MIN_F1 && removed == planted,
        format!(
            "{} cv F1 {:.4} (min {FILTER_MIN_F1}); removed {removed:?}, planted {planted:?}",
            sel.model.kind, cv.f1
        ),
    );
}

#[test]
fn c08_adaboost_contract() {
    let cfg = AdaBoostConfig { n_estimators: 100, learning_rate: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let x: Vec<Vec<f64>> = (0..90).map(|_| rand_vec(&mut rng, 5)).collect();
    let y: Vec<usize> = (0..90).map(|i| i % 3).collect();
    let classes: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
    let (_, trace) = train_adaboost(&x, &y, &classes, cfg).unwrap();
    let worst_sum = trace.iter().map(|t| (t.weight_sum - 1.0).abs()).fold(0.0, f64::max);

    let sx: Vec<Vec<f64>> = [0.5, 1.5, 2.0, 6.0, 6.5, 9.0].iter().map(|&v| vec![0.0, v]).collect();
    let sy = vec![0, 0, 0, 1, 1, 1];
    let (_, strace) = train_adaboost(&sx, &sy, &classes[..2], cfg).unwrap();
    let first_err = strace[0].train_error;

    let pats: Vec<String> = DEFAULT_PATTERNS.iter().map(|s| s.to_string()).collect();
    let set = PatternSet::new(pats.clone()).unwrap();
    let labels: Vec<usize> = pattern_corpus(&pats, 13, 809)
        .unwrap()
        .iter()
        .map(|s| set.index(&s.pattern).unwrap())
        .collect();
    let folds = stratified_folds(&labels, 5, 3).unwrap();
    let mut worst_dev = 0.0f64;
    for c in 0..set.len() {
        let total = labels.iter().filter(|&&l| l == c).count() as f64;
        for f in &folds {
            let have = f.iter().filter(|&&i| labels[i] == c).count() as f64;
            worst_dev = worst_dev.max((have - total / 5.0).abs());
        }
    }
    report(
        8,
        "AdaBoost contract",
        worst_sum <= WEIGHT_SUM_TOL && first_err == 0.0 && worst_dev <= 1.0,
        format!(
            "max |sum w - 1| {worst_sum:.1e} over {} rounds (tol {WEIGHT_SUM_TOL:.0e}); separable round-1 error {first_err}; max fold deviation {worst_dev:.2} (tol 1)",
            trace.len()
        ),
    );
}

#[test]
fn c09_pattern_context_helps() {
    let pats: Vec<String> = DEFAULT_PATTERNS.iter().map(|s| s.to_string()).collect();
    let set = PatternSet::new(pats.clone()).unwrap();
    let cfg = TaskConfig { dim: 16, hidden: 12, lr: 1e-2, epochs: 15, ..TaskConfig::default() };
    let mut diffs = Vec::new();
    for s in 0..RQ2_SEEDS {
        let detector = train_pattern_model(&pattern_corpus(&pats, 20, 500 + s).unwrap(), &set, AdaBoostConfig::default()).unwrap();
        let mut data = pattern_labeled_corpus(&pats, 10, s).unwrap();
        // labels come from the detector, not from the generator
        for d in &mut data {
            d.unit.pattern = None;
        }
        assert!(data.iter().all(|d| extract_pattern_features(&d.unit.ast).is_ok()));
        let (train, test) = data.split_at(data.len() / 2);
        let ch = Channels { patterns: set.clone(), detector: Some(detector), ..Channels::default() };
        let acc = |v: Variant| {
            let t = train_task(&TaskData::Classify { classes: pats.len(), samples: train }, v, &cfg, &ch, s).unwrap();
            eval_classification(&t, &ch, test).unwrap().metrics.accuracy
        };
        diffs.push(acc(Variant::Patterns) - acc(Variant::None));
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let parts: Vec<String> = diffs.iter().map(|d| format!("{d:+.3}")).collect();
    report(
        9,
        "pattern context direction",
        mean > 0.0,
        format!("PATTERNS - NONE per seed [{}], mean {mean:+.4} (must be > 0)", parts.join(", ")),
    );
}

fn fixture_config(out: &Path, epochs: usize) -> RunConfig {
    RunConfig::load(
        fixture("classify.conf"),
        &[("out_dir".into(), out.display().to_string()), ("epochs".into(), epochs.to_string())],
    )
    .unwrap()
}

#[test]
fn c10_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture_config(dir.path(), 8);

    let run = || {
        astctx::run::cmd_train(&cfg).unwrap();
        std::fs::read(dir.path().join("model.json")).unwrap()
    };
    let first = run();
    let identical = first == run();

    let (task, channels, bundle) = train_in_memory(&cfg).unwrap();
    let in_memory_bytes = bundle.to_json();
    let same_as_file = in_memory_bytes.as_bytes() == first.as_slice();
    let loaded = ModelBundle::from_json(&in_memory_bytes).unwrap();
    let roundtrip = loaded.to_json() == in_memory_bytes;
    let (rt_task, rt_channels) = loaded.restore().unwrap();
    let data = astctx::run::pipeline::test_dataset(&cfg).unwrap().unwrap();
    let a = evaluate(&task, &channels, &data).unwrap();
    let b = evaluate(&rt_task, &rt_channels, &data).unwrap();
    let eval_equal = a == b;

    let (_, table) = ablate_in_memory(&fixture_config(dir.path(), 2)).unwrap();
    let header = table.lines().find(|l| l.starts_with("metric")).unwrap_or("").to_string();
    let order_ok = header == "metric\tNONE\tRAW_BUGS\tFILTERED_BUGS\tPATTERNS\tBUGS_AND_PATTERNS";

    report(
        10,
        "reproducibility and persistence",
        identical && same_as_file && roundtrip && eval_equal && order_ok,
        format!(
            "bundles identical {identical}, in-memory matches file {same_as_file}, save/load/save identical {roundtrip}, reloaded eval equal {eval_equal}, ablate columns `{}`",
            header.replace('\t', " ")
        ),
    );
}
