//! Built-in gradient checks and oracle comparisons.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{kind, AstNode};
use crate::bugs::{build_ngram_vocab, featurize};
use crate::encode::encoder::{unit_backward, unit_forward};
use crate::encode::{build_vocab, split_statements, Channel, CompiledTree, EncoderParams, EncoderShape, PreparedUnit, RawContext, Scope};
use crate::error::Result;
use crate::ingest::parse_mini;
use crate::metrics::binary_metrics;
use crate::nn::params::{flatten, unflatten};
use crate::nn::{affine, affine_backward, grad_check, gru_step, gru_step_backward, softmax_xent, GruParams, Tensor, GRAD_CHECK_EPS};
use crate::patterns::train_adaboost;
use crate::synth::random_program;
use crate::tasks::train::{loss_and_grad_classify, loss_and_grad_clone};
use crate::tasks::{clone_score, ClassifierHead, CloneHead, Head, TaskModel};

pub const GRAD_TOLERANCE: f64 = 1e-4;

/// Every check, in the order they run.
pub const CHECKS: [&str; 11] = [
    "affine",
    "gru_step",
    "softmax_xent",
    "encoder",
    "classifier_head",
    "clone_head",
    "split_statements",
    "ngram",
    "metrics",
    "clone_symmetry",
    "adaboost",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckReport {
    pub results: Vec<CheckResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.results.iter().find(|r| !r.passed)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}\t{}\t{}\n", r.name, r.detail));
        }
        let n = self.results.iter().filter(|r| r.passed).count();
        out.push_str(&format!("{n}/{} checks passed\n", self.results.len()));
        out
    }
}

/// Run every check. `fault` names one op whose kernel output is deliberately
/// corrupted, to confirm the check guarding it fails.
pub fn run_selfcheck(fault: Option<&str>) -> Result<SelfcheckReport> {
    let mut results = Vec::new();
    for name in CHECKS {
        let broken = fault == Some(name);
        let start = Instant::now();
        let (passed, detail) = match name {
            "affine" => grad_result(check_affine(broken)),
            "gru_step" => grad_result(check_gru(broken)),
            "softmax_xent" => grad_result(check_softmax(broken)?),
            "encoder" => grad_result(check_encoder(broken)?),
            "classifier_head" => grad_result(check_task_model(false, broken)?),
            "clone_head" => grad_result(check_task_model(true, broken)?),
            "split_statements" => check_split(broken)?,
            "ngram" => check_ngrams(broken)?,
            "metrics" => check_metrics(broken),
            "clone_symmetry" => check_symmetry(broken)?,
            "adaboost" => check_adaboost(broken)?,
            _ => unreachable!(),
        };
        log::info!("selfcheck {name}: {} in {:.2?}", if passed { "pass" } else { "fail" }, start.elapsed());
        results.push(CheckResult { name, passed, detail });
    }
    Ok(SelfcheckReport { results })
}

fn grad_result(err: f64) -> (bool, String) {
    (err < GRAD_TOLERANCE, format!("max relative error {err:.3e}"))
}

fn corrupt(g: &mut [f64], broken: bool) {
    if broken {
        if let Some(x) = g.first_mut() {
            *x = *x * 1.5 + 0.1;
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn check_affine(broken: bool) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (m, n) = (3, 4);
    let probe = random_vec(&mut rng, m);
    let point = random_vec(&mut rng, n + m * n + m);
    grad_check(
        |v| {
            let (x, rest) = v.split_at(n);
            let (w, b) = rest.split_at(m * n);
            let w = Tensor::matrix(m, n, w.to_vec()).expect("shape");
            let y = affine(x, &w, b).expect("shape");
            let loss = y.iter().zip(&probe).map(|(a, p)| a * p).sum();
            let g = affine_backward(x, &w, &probe);
            let mut grad = g.dx;
            grad.extend_from_slice(g.dw.values());
            grad.extend(g.db);
            corrupt(&mut grad, broken);
            (loss, grad)
        },
        &point,
        GRAD_CHECK_EPS,
    )
}

fn check_gru(broken: bool) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (d, h) = (3, 4);
    let p = GruParams::random(d, h, &mut rng);
    let probe = random_vec(&mut rng, h);
    let mut point = random_vec(&mut rng, d + h);
    point.extend(flatten(&p));
    grad_check(
        |v| {
            let (x, rest) = v.split_at(d);
            let (h0, w) = rest.split_at(h);
            let mut params = p.clone();
            unflatten(&mut params, w);
            let (h1, cache) = gru_step(x, h0, &params).expect("shape");
            let loss = h1.iter().zip(&probe).map(|(a, b)| a * b).sum();
            let mut grads = GruParams::zeros(d, h);
            let (dx, dh) = gru_step_backward(&params, &cache, &probe, &mut grads);
            let mut grad = dx;
            grad.extend(dh);
            grad.extend(flatten(&grads));
            corrupt(&mut grad, broken);
            (loss, grad)
        },
        &point,
        GRAD_CHECK_EPS,
    )
}

fn check_softmax(broken: bool) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let point = random_vec(&mut rng, 5);
    softmax_xent(&point, 2)?;
    Ok(grad_check(
        |v| {
            let (loss, mut grad) = softmax_xent(v, 2).expect("label in range");
            corrupt(&mut grad, broken);
            (loss, grad)
        },
        &point,
        GRAD_CHECK_EPS,
    ))
}

const TOY: &str = "int f(int n){ int a = 1; while (a < n) { a = a * 3; } return a; }";

fn toy_unit() -> Result<(PreparedUnit, EncoderShape)> {
    let ast = parse_mini(TOY)?;
    let vocab = build_vocab(&[&ast], 1);
    let trees: Vec<_> = split_statements(&ast)
        .iter()
        .map(|t| CompiledTree::compile(&t.root, &vocab))
        .collect();
    let shape = EncoderShape {
        vocab: vocab.len(),
        dim: 4,
        hidden: 3,
        bug_features: 10,
        pattern_features: 6,
    };
    let mut bug = vec![0.0; 10];
    bug[1] = 2.0;
    bug[7] = 1.0;
    let mut pattern = vec![0.0; 6];
    pattern[3] = 1.0;
    let contexts = vec![
        RawContext {
            channel: Channel::Bug,
            scope: Scope::Statement(1),
            features: bug,
        },
        RawContext {
            channel: Channel::Pattern,
            scope: Scope::WholeUnit,
            features: pattern,
        },
    ];
    Ok((PreparedUnit::new(trees, contexts), shape))
}

fn check_encoder(broken: bool) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (unit, shape) = toy_unit()?;
    let p = EncoderParams::random(shape, &mut rng);
    let probe = random_vec(&mut rng, p.code_dim());
    Ok(grad_check(
        |v| {
            let mut params = p.clone();
            unflatten(&mut params, v);
            let (code, cache) = unit_forward(&unit, &params).expect("toy encodes");
            let loss = code.iter().zip(&probe).map(|(a, b)| a * b).sum();
            let mut grads = params.zeros_like();
            unit_backward(&unit, &cache, &probe, &params, &mut grads);
            let mut grad = flatten(&grads);
            corrupt(&mut grad, broken);
            (loss, grad)
        },
        &flatten(&p),
        GRAD_CHECK_EPS,
    ))
}

fn check_task_model(clone: bool, broken: bool) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (unit, shape) = toy_unit()?;
    let other = PreparedUnit::new(unit.trees[1..].to_vec(), unit.contexts[..1].to_vec());
    let encoder = EncoderParams::random(shape, &mut rng);
    let code_dim = encoder.code_dim();
    let head = if clone {
        Head::Clone(CloneHead::random(code_dim, 0.5, &mut rng))
    } else {
        Head::Classifier(ClassifierHead::random(3, code_dim, &mut rng))
    };
    let model = TaskModel { encoder, head };
    Ok(grad_check(
        |v| {
            let mut m = model.clone();
            unflatten(&mut m, v);
            let (loss, g) = if clone {
                loss_and_grad_clone(&m, &unit, &other, 1.0)
            } else {
                loss_and_grad_classify(&m, &unit, 1)
            }
            .expect("toy model");
            let mut grad = flatten(&g);
            corrupt(&mut grad, broken);
            (loss, grad)
        },
        &flatten(&model),
        GRAD_CHECK_EPS,
    ))
}

/// Statement nodes in preorder, each with the tokens reachable without
/// entering a nested statement.
fn statement_tokens(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    for node in ast.preorder() {
        if !kind::is_statement(&node.kind) {
            continue;
        }
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if let Some(t) = &n.token {
                out.push(t.clone());
            }
            for c in n.children.iter().rev() {
                if !kind::is_statement(&c.kind) {
                    stack.push(c);
                }
            }
        }
    }
    out
}

fn check_split(broken: bool) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let ast = parse_mini(&random_program(&mut rng))?;
        let mut trees = split_statements(&ast);
        if broken {
            trees.pop();
        }
        let emitted: Vec<String> = trees
            .iter()
            .filter(|t| !t.is_end_block())
            .flat_map(|t| t.root.preorder().filter_map(|n| n.token.clone()).collect::<Vec<_>>())
            .collect();
        let markers = trees.iter().filter(|t| t.is_end_block()).count();
        let compound = ast.preorder().filter(|n| kind::is_compound(&n.kind)).count();
        if emitted != statement_tokens(&ast) {
            return Ok((false, format!("program {i}: token order differs from the tree walk")));
        }
        if markers != compound {
            return Ok((false, format!("program {i}: {markers} markers for {compound} compound statements")));
        }
    }
    Ok((true, "50 random programs".into()))
}

fn check_ngrams(broken: bool) -> Result<(bool, String)> {
    const WORDS: [&str; 6] = ["null", "pointer", "leak", "stream", "close", "lock"];
    let (n_max, min_df) = (3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let docs: Vec<Vec<String>> = (0..10)
        .map(|_| (0..50).map(|_| WORDS[rng.gen_range(0..WORDS.len())].to_string()).collect())
        .collect();
    let windows = |doc: &[String]| -> Vec<String> {
        let mut out = Vec::new();
        for start in 0..doc.len() {
            for len in 1..=n_max {
                if start + len <= doc.len() {
                    out.push(doc[start..start + len].join(" "));
                }
            }
        }
        out
    };
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for d in &docs {
        let mut grams = windows(d);
        grams.sort();
        grams.dedup();
        for g in grams {
            *df.entry(g).or_default() += 1;
        }
    }
    df.retain(|_, c| *c >= min_df);
    let vocab = build_ngram_vocab(&docs, n_max, min_df, usize::MAX)?;
    let got: BTreeMap<String, usize> = (0..vocab.len()).map(|i| (vocab.gram(i).to_string(), vocab.df(i))).collect();
    if got != df {
        return Ok((false, format!("vocabulary has {} grams, recount has {}", got.len(), df.len())));
    }
    for (k, d) in docs.iter().enumerate() {
        let mut expected: BTreeMap<usize, u32> = BTreeMap::new();
        for g in windows(d) {
            if let Some(i) = vocab.index_of(&g) {
                *expected.entry(i).or_default() += 1;
            }
        }
        let mut counts = featurize(d, &vocab).counts;
        if broken {
            counts.pop_first();
        }
        if counts != expected {
            return Ok((false, format!("document {k}: membership counts differ from the recount")));
        }
    }
    Ok((true, format!("{} grams over 10 documents", vocab.len())))
}

fn check_metrics(broken: bool) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..20 {
        let n = rng.gen_range(1..40);
        let pred: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let actual: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut m = binary_metrics(&pred, &actual);
        if broken {
            m.accuracy += 0.5;
        }
        let count = |p: bool, a: bool| pred.iter().zip(&actual).filter(|&(&x, &y)| x == p && y == a).count() as f64;
        let (tp, fp, fn_, tn) = (count(true, true), count(true, false), count(false, true), count(false, false));
        let precision = if tp + fp == 0.0 { if tp + fn_ == 0.0 { 1.0 } else { 0.0 } } else { tp / (tp + fp) };
        let recall = if tp + fn_ == 0.0 { 1.0 } else { tp / (tp + fn_) };
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        let accuracy = (tp + tn) / n as f64;
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        if !(close(m.accuracy, accuracy) && close(m.precision, precision) && close(m.recall, recall) && close(m.f1, f1)) {
            return (false, format!("round {round}: metrics differ from the confusion recount"));
        }
    }
    (true, "20 random confusion matrices".into())
}

fn check_symmetry(broken: bool) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let head = CloneHead::random(16, 0.5, &mut rng);
    for i in 0..1000 {
        let a = random_vec(&mut rng, 16);
        let b = random_vec(&mut rng, 16);
        let mut ab = clone_score(&a, &b, &head)?;
        if broken {
            ab += a[0] * 1e-3;
        }
        if ab.to_bits() != clone_score(&b, &a, &head)?.to_bits() {
            return Ok((false, format!("pair {i}: score depends on argument order")));
        }
    }
    Ok((true, "1000 random pairs".into()))
}

fn check_adaboost(broken: bool) -> Result<(bool, String)> {
    let x: Vec<Vec<f64>> = [1.0, 2.0, 3.0, 7.0, 8.0, 9.0].iter().map(|&v| vec![v, 0.0]).collect();
    let y = vec![0, 0, 0, 1, 1, 1];
    let classes = vec!["A".to_string(), "B".to_string()];
    let (_, trace) = train_adaboost(&x, &y, &classes, crate::patterns::AdaBoostConfig::default())?;
    let first = trace.first().map_or(1.0, |t| t.train_error);
    if first != 0.0 {
        return Ok((false, format!("separable fixture has training error {first} after round 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x: Vec<Vec<f64>> = (0..60).map(|_| random_vec(&mut rng, 4)).collect();
    let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
    let classes = vec!["A".to_string(), "B".to_string(), "C".to_string()];
    let (_, trace) = train_adaboost(&x, &y, &classes, crate::patterns::AdaBoostConfig::default())?;
    for (r, t) in trace.iter().enumerate() {
        let sum = if broken { t.weight_sum * 1.01 } else { t.weight_sum };
        if (sum - 1.0).abs() > 1e-12 {
            return Ok((false, format!("round {}: sample weights sum to {sum}", r + 1)));
        }
    }
    Ok((true, format!("{} rounds on noisy data", trace.len())))
}
