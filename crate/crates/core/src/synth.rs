//! Deterministic generators for desk-scale corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ingest::warnings::CATEGORIES;
use crate::ingest::{BugReportDoc, BugWarning, ClassificationSample, CodeUnit, PatternSample, ReportLabel};

const VARS: &[&str] = &[
    "a", "b", "c", "i", "j", "k", "n", "m", "x", "y", "z", "acc", "tmp", "idx", "val", "cur", "res",
    "total", "count", "step", "lo", "hi", "mid", "sum", "prod", "left", "right", "key", "len", "pos",
];
const FUNCS: &[&str] = &[
    "run", "compute", "solve", "work", "calc", "evaluate", "process", "reduce", "scan", "fold",
    "measure", "walk",
];
const CALLS: &[&str] = &["print", "log", "trace", "emit", "record", "check"];
const TYPES: &[&str] = &[
    "Engine", "Store", "Widget", "Service", "Handler", "Manager", "Node", "Item", "Record", "Channel",
    "Buffer", "Panel", "Worker", "Cache", "Queue", "Router",
];
const IFACES: &[&str] = &["Component", "Target", "Listener", "Source", "Shape", "Sink", "Port", "Stage"];
const METHODS: &[&str] = &[
    "apply", "handle", "update", "render", "load", "save", "next", "size", "reset", "open", "close",
    "push", "pull", "flush", "merge", "split", "draw", "poll",
];

/// Indented source text builder.
struct Src {
    out: String,
    depth: usize,
}

impl Src {
    fn new() -> Self {
        Src {
            out: String::new(),
            depth: 0,
        }
    }

    fn line(&mut self, s: &str) {
        for _ in 0..self.depth {
            self.out.push_str("    ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn open(&mut self, s: &str) {
        self.line(&format!("{s} {{"));
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        self.line("}");
    }
}

fn pick<'a, R: Rng>(rng: &mut R, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).expect("non-empty pool")
}

/// `k` distinct names from the pool.
fn distinct<'a, R: Rng>(rng: &mut R, pool: &[&'a str], k: usize) -> Vec<&'a str> {
    pool.choose_multiple(rng, k).copied().collect()
}

// ---------------------------------------------------------------------------
// Random programs

fn random_expr<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..5) {
            0 => rng.gen_range(0..100).to_string(),
            1 => format!("{}({})", pick(rng, CALLS), pick(rng, vars)),
            2 => format!("{}[{}]", pick(rng, vars), pick(rng, vars)),
            _ => pick(rng, vars).to_string(),
        };
    }
    let op = pick(rng, &["+", "-", "*", "/", "%", "<", ">", "==", "!=", "&&", "||", "<=", ">="]);
    let lhs = random_expr(rng, vars, depth - 1);
    let rhs = random_expr(rng, vars, depth - 1);
    if rng.gen_bool(0.2) {
        format!("-({lhs} {op} {rhs})")
    } else {
        format!("{lhs} {op} {rhs}")
    }
}

fn random_block<R: Rng>(rng: &mut R, src: &mut Src, vars: &[&str], depth: usize, len: usize) {
    for _ in 0..len {
        random_stmt(rng, src, vars, depth);
    }
}

fn random_stmt<R: Rng>(rng: &mut R, src: &mut Src, vars: &[&str], depth: usize) {
    let choice = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..8) };
    match choice {
        0 => {
            let ty = pick(rng, &["int", "double", "bool"]);
            let init = random_expr(rng, vars, 2);
            src.line(&format!("{ty} {} = {init};", pick(rng, vars)));
        }
        1 => src.line(&format!("{} = {};", pick(rng, vars), random_expr(rng, vars, 2))),
        2 => src.line(&format!("{}({});", pick(rng, CALLS), random_expr(rng, vars, 1))),
        3 => src.line(&format!("return {};", random_expr(rng, vars, 1))),
        4 | 5 => {
            src.open(&format!("if ({})", random_expr(rng, vars, 2)));
            let n = rng.gen_range(1..4);
            random_block(rng, src, vars, depth - 1, n);
            if rng.gen_bool(0.5) {
                src.depth -= 1;
                src.open("} else");
                let n = rng.gen_range(1..3);
                random_block(rng, src, vars, depth - 1, n);
            }
            src.close();
        }
        6 => {
            src.open(&format!("while ({})", random_expr(rng, vars, 2)));
            let n = rng.gen_range(1..4);
            random_block(rng, src, vars, depth - 1, n);
            src.close();
        }
        _ => {
            let v = pick(rng, vars);
            src.open(&format!(
                "for (int {v} = 0; {v} < {}; {v} = {v} + 1)",
                random_expr(rng, vars, 1)
            ));
            let n = rng.gen_range(1..4);
            random_block(rng, src, vars, depth - 1, n);
            src.close();
        }
    }
}

/// A random program mixing functions and small classes, with nested control flow.
pub fn random_program<R: Rng>(rng: &mut R) -> String {
    let mut src = Src::new();
    let items = rng.gen_range(1..4);
    for _ in 0..items {
        let vars = distinct(rng, VARS, 5);
        if rng.gen_bool(0.25) {
            let name = pick(rng, TYPES);
            src.open(&format!("public class {name}"));
            src.line(&format!("private int {};", vars[0]));
            src.open(&format!("public {name}(int {})", vars[1]));
            src.line(&format!("{} = {};", vars[0], vars[1]));
            src.close();
            src.open(&format!("public int {}(int {})", pick(rng, METHODS), vars[2]));
            let n = rng.gen_range(1..4);
            random_block(&mut *rng, &mut src, &vars, 2, n);
            src.close();
            src.close();
        } else {
            let ret = pick(rng, &["int", "void", "double"]);
            src.open(&format!("{ret} {}(int {}, int {})", pick(rng, FUNCS), vars[0], vars[1]));
            let n = rng.gen_range(1..6);
            random_block(&mut *rng, &mut src, &vars, 3, n);
            src.close();
        }
    }
    src.out
}

// ---------------------------------------------------------------------------
// Task programs: several structurally different implementations per task

pub const TASK_NAMES: [&str; 6] = ["sum", "max", "count_positive", "factorial", "fibonacci", "power"];

fn emit_loop<R: Rng>(rng: &mut R, src: &mut Src, i: &str, from: &str, bound: &str, body: &dyn Fn(&mut Src)) {
    if rng.gen_bool(0.5) {
        src.open(&format!("for (int {i} = {from}; {i} < {bound}; {i} = {i} + 1)"));
        body(src);
        src.close();
    } else {
        src.line(&format!("int {i} = {from};"));
        src.open(&format!("while ({i} < {bound})"));
        body(src);
        src.line(&format!("{i} = {i} + 1;"));
        src.close();
    }
}

fn task_body<R: Rng>(rng: &mut R, src: &mut Src, label: usize, v: &[&str]) {
    let (arr, n, acc, i, t) = (v[0], v[1], v[2], v[3], v[4]);
    let log_call = pick(rng, CALLS);
    let noisy = rng.gen_bool(0.5);
    match label {
        0 => {
            src.line(&format!("int {acc} = 0;"));
            emit_loop(rng, src, i, "0", n, &|s| {
                s.line(&format!("{acc} = {acc} + {arr}[{i}];"));
                if noisy {
                    s.line(&format!("{log_call}({acc});"));
                }
            });
        }
        1 => {
            src.line(&format!("int {acc} = {arr}[0];"));
            emit_loop(rng, src, i, "1", n, &|s| {
                s.open(&format!("if ({arr}[{i}] > {acc})"));
                s.line(&format!("{acc} = {arr}[{i}];"));
                s.close();
            });
        }
        2 => {
            src.line(&format!("int {acc} = 0;"));
            emit_loop(rng, src, i, "0", n, &|s| {
                s.open(&format!("if ({arr}[{i}] > 0)"));
                s.line(&format!("{acc} = {acc} + 1;"));
                if noisy {
                    s.line(&format!("{log_call}({i});"));
                }
                s.close();
            });
        }
        3 => {
            src.line(&format!("int {acc} = 1;"));
            let bound = format!("{n} + 1");
            emit_loop(rng, src, i, "1", &bound, &|s| {
                s.line(&format!("{acc} = {acc} * {i};"));
            });
        }
        4 => {
            src.line(&format!("int {acc} = 0;"));
            src.line(&format!("int {t} = 1;"));
            emit_loop(rng, src, i, "0", n, &|s| {
                s.line(&format!("int {arr} = {acc} + {t};"));
                s.line(&format!("{acc} = {t};"));
                s.line(&format!("{t} = {arr};"));
            });
        }
        _ => {
            src.line(&format!("int {acc} = 1;"));
            emit_loop(rng, src, i, "0", n, &|s| {
                s.line(&format!("{acc} = {acc} * {t};"));
            });
        }
    }
    src.line(&format!("return {acc};"));
}

/// Count statements the mini-language parser would produce for a source text.
fn statement_count(src: &str) -> usize {
    crate::ingest::parse_mini(src)
        .map(|ast| ast.preorder().filter(|n| crate::ast::kind::is_statement(&n.kind)).count())
        .unwrap_or(0)
}

/// One implementation of task `label` (index into `TASK_NAMES`), with at least
/// `min_statements` statements.
pub fn task_program<R: Rng>(rng: &mut R, label: usize, min_statements: usize) -> String {
    let v = distinct(rng, VARS, 6);
    let f = pick(rng, FUNCS);
    let mut src = Src::new();
    let params = match label {
        0..=2 => format!("int[] {}, int {}", v[0], v[1]),
        5 => format!("int {}, int {}", v[4], v[1]),
        _ => format!("int {}", v[1]),
    };
    src.open(&format!("int {f}({params})"));
    if rng.gen_bool(0.5) {
        src.open(&format!("if ({} < 1)", v[1]));
        src.line(&format!("return {};", rng.gen_range(0..2)));
        src.close();
    }
    task_body(rng, &mut src, label, &v);
    src.close();

    // Driver and helpers: pad to the requested size with task-neutral code.
    let mut driver = Src::new();
    let out = pick(rng, &["out", "result", "answer", "value"]);
    driver.open("void main()");
    let arg = match label {
        0..=2 => {
            driver.line("int[] data = input();");
            "data, size(data)".to_string()
        }
        5 => "read(), read()".to_string(),
        _ => "read()".to_string(),
    };
    driver.line(&format!("int {out} = {f}({arg});"));
    let mut body = src.out.clone();
    let mut extra = Vec::new();
    while statement_count(&format!("{body}{}    print({out});\n}}\n", driver.out)) < min_statements {
        extra.push(format!("{}({out});", pick(rng, CALLS)));
        driver.line(extra.last().expect("just pushed"));
    }
    driver.line(&format!("print({out});"));
    driver.close();
    if rng.gen_bool(0.5) {
        body = format!("{}{}", driver.out, body);
    } else {
        body.push_str(&driver.out);
    }
    body
}

/// `per_label` programs for each of `labels` tasks, shuffled.
pub fn task_corpus(labels: usize, per_label: usize, min_statements: usize, seed: u64) -> Result<Vec<ClassificationSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(labels * per_label);
    for label in 0..labels {
        for k in 0..per_label {
            let src = task_program(&mut rng, label % TASK_NAMES.len(), min_statements);
            out.push(ClassificationSample {
                unit: CodeUnit::from_source(format!("t{label}_{k}"), src)?,
                label,
            });
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pattern classes

fn filler_methods<R: Rng>(rng: &mut R, src: &mut Src, fields: &[String], count: usize) {
    for _ in 0..count {
        let m = format!("{}{}", pick(rng, METHODS), rng.gen_range(0..10));
        let f = fields.choose(rng).cloned().unwrap_or_else(|| "0".to_string());
        match rng.gen_range(0..3) {
            0 => {
                src.open(&format!("public int {m}()"));
                src.line(&format!("return {f};"));
                src.close();
            }
            1 if !fields.is_empty() => {
                src.open(&format!("public void {m}(int v)"));
                src.line(&format!("{f} = v;"));
                src.close();
            }
            _ => {
                src.open(&format!("public int {m}(int p, int q)"));
                src.line("int t = p + q;");
                src.line(&format!("return t * {};", rng.gen_range(1..5)));
                src.close();
            }
        }
    }
}

fn plain_fields<R: Rng>(rng: &mut R, src: &mut Src, count: usize) -> Vec<String> {
    let names: Vec<String> = distinct(rng, VARS, count).into_iter().map(|v| format!("{v}F")).collect();
    for n in &names {
        src.line(&format!("private int {n};"));
    }
    names
}

/// Source for one class exhibiting `pattern` (a default pattern label), with
/// random names and filler members. Supporting interfaces precede the class.
pub fn pattern_class<R: Rng>(rng: &mut R, pattern: &str) -> String {
    let class = format!("{}{}", pick(rng, TYPES), rng.gen_range(0..100));
    let iface = pick(rng, IFACES);
    let ms = distinct(rng, METHODS, 4);
    let mut src = Src::new();
    let n_fields = rng.gen_range(0..3);
    let n_fill = rng.gen_range(0..4);
    match pattern {
        "SINGLETON" => {
            src.open(&format!("public class {class}"));
            src.line(&format!("private static {class} shared;"));
            let fields = plain_fields(rng, &mut src, n_fields);
            src.open(&format!("private {class}()"));
            for f in &fields {
                src.line(&format!("{f} = 0;"));
            }
            src.close();
            src.open(&format!("public static {class} {}()", ms[0]));
            src.open("if (shared == null)");
            src.line(&format!("shared = new {class}();"));
            src.close();
            src.line("return shared;");
            src.close();
            filler_methods(rng, &mut src, &fields, n_fill);
            src.close();
        }
        "FACTORY_METHOD" => {
            let products = distinct(rng, TYPES, 2);
            src.open(&format!("public class {class}"));
            let fields = plain_fields(rng, &mut src, n_fields);
            src.open(&format!("public {iface} {}(int kind)", ms[0]));
            src.open("if (kind == 1)");
            src.line(&format!("return new {}();", products[0]));
            src.close();
            src.line(&format!("return new {}();", products[1]));
            src.close();
            filler_methods(rng, &mut src, &fields, n_fill);
            src.close();
        }
        "ADAPTER" => {
            let adaptee = pick(rng, TYPES);
            src.open(&format!("interface {iface}"));
            src.line(&format!("int {}(int v);", ms[0]));
            src.close();
            src.open(&format!("public class {class} implements {iface}"));
            src.line(&format!("private {adaptee} wrapped;"));
            let fields = plain_fields(rng, &mut src, n_fields);
            src.open(&format!("public {class}({adaptee} w)"));
            src.line("wrapped = w;");
            src.close();
            src.open(&format!("public int {}(int v)", ms[0]));
            src.line(&format!("int r = wrapped.{}(v * 2);", ms[1]));
            src.line("return r + 1;");
            src.close();
            filler_methods(rng, &mut src, &fields, n_fill);
            src.close();
        }
        "DECORATOR" => {
            src.open(&format!("interface {iface}"));
            src.line(&format!("int {}(int v);", ms[0]));
            src.line(&format!("int {}(int v);", ms[1]));
            src.close();
            src.open(&format!("public class {class} implements {iface}"));
            src.line(&format!("private {iface} inner;"));
            let fields = plain_fields(rng, &mut src, n_fields);
            src.open(&format!("public {class}({iface} c)"));
            src.line("inner = c;");
            src.close();
            for (m, op) in [(ms[0], "+"), (ms[1], "*")] {
                src.open(&format!("public int {m}(int v)"));
                src.line(&format!("return inner.{m}(v) {op} {};", rng.gen_range(1..9)));
                src.close();
            }
            filler_methods(rng, &mut src, &fields, n_fill);
            src.close();
        }
        "OBSERVER" => {
            src.open(&format!("public class {class}"));
            src.line(&format!("private {iface}[] subs;"));
            src.line("private int used;");
            let fields = plain_fields(rng, &mut src, n_fields);
            src.open(&format!("public void {}({iface} s)", ms[0]));
            src.line("subs[used] = s;");
            src.line("used = used + 1;");
            src.close();
            src.open(&format!("public void {}(int v)", ms[1]));
            src.open("for (int i = 0; i < used; i = i + 1)");
            src.line(&format!("subs[i].{}(v);", ms[2]));
            src.close();
            src.close();
            filler_methods(rng, &mut src, &fields, n_fill);
            src.close();
        }
        _ => {
            src.open(&format!("public class {class}"));
            let fields = plain_fields(rng, &mut src, n_fields + 1);
            if rng.gen_bool(0.5) {
                src.open(&format!("public {class}(int v)"));
                src.line(&format!("{} = v;", fields[0]));
                src.close();
            }
            filler_methods(rng, &mut src, &fields, n_fill + 1);
            src.close();
        }
    }
    src.out
}

/// Labeled pattern corpus with `per_pattern` classes per label of `patterns`.
pub fn pattern_corpus(patterns: &[String], per_pattern: usize, seed: u64) -> Result<Vec<PatternSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in patterns {
        for k in 0..per_pattern {
            let src = pattern_class(&mut rng, p);
            let mut unit = CodeUnit::from_source(format!("{}_{k}", p.to_lowercase()), src)?;
            unit.pattern = Some(p.clone());
            out.push(PatternSample {
                unit,
                pattern: p.clone(),
            });
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

/// Classification corpus whose label is the index of the planted pattern in `patterns`.
pub fn pattern_labeled_corpus(patterns: &[String], per_label: usize, seed: u64) -> Result<Vec<ClassificationSample>> {
    let samples = pattern_corpus(patterns, per_label, seed)?;
    Ok(samples
        .into_iter()
        .map(|s| {
            let label = patterns.iter().position(|p| *p == s.pattern).expect("generated label");
            ClassificationSample { unit: s.unit, label }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Bug reports and warnings

pub const BUG_PHRASES: &[&str] = &[
    "null pointer dereference",
    "crash on startup",
    "array index out of bounds",
    "infinite loop hangs",
    "resource leak of stream",
    "race condition between threads",
    "integer overflow in loop",
    "comparing unrelated class and interface",
    "deadlock acquiring lock",
    "wrong result returned",
    "uncaught exception thrown",
    "division by zero",
];

pub const NON_BUG_PHRASES: &[&str] = &[
    "naming convention suggestion",
    "unused import cleanup",
    "documentation typo fix",
    "feature request for export",
    "refactor long method",
    "code style formatting",
    "rename variable for clarity",
    "add more comments",
    "question about usage",
    "update build configuration",
    "whitespace and indentation",
    "improve readme wording",
];

const FILLER_WORDS: &[&str] = &[
    "method", "module", "user", "reported", "version", "release", "value", "field", "call", "please",
    "check", "observed", "during", "test", "review", "component", "parser", "handler",
];

fn report_text<R: Rng>(rng: &mut R, bug: bool) -> String {
    let pool = if bug { BUG_PHRASES } else { NON_BUG_PHRASES };
    let k = rng.gen_range(1..3);
    let mut parts: Vec<String> = distinct(rng, pool, k).into_iter().map(String::from).collect();
    for _ in 0..rng.gen_range(3..7) {
        parts.push(pick(rng, FILLER_WORDS).to_string());
    }
    parts.shuffle(rng);
    parts.join(" ")
}

/// Balanced labeled report corpus.
pub fn bug_report_corpus(n: usize, seed: u64) -> Vec<BugReportDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .enumerate()
        .map(|(i, bug)| BugReportDoc {
            id: format!("r{i}"),
            text: report_text(&mut rng, bug),
            label: if bug { ReportLabel::Bug } else { ReportLabel::NonBug },
        })
        .collect()
}

fn warning<R: Rng>(rng: &mut R, class_name: &str, lines: (u32, u32), genuine: bool) -> BugWarning {
    let phrase = pick(rng, if genuine { BUG_PHRASES } else { NON_BUG_PHRASES });
    let category = if genuine {
        let pool: Vec<&str> = CATEGORIES.iter().copied().filter(|c| *c != "STYLE").collect();
        pick(rng, &pool)
    } else {
        "STYLE"
    };
    BugWarning {
        warning_type: format!("{}_{}", category, rng.gen_range(0..1000)),
        category: category.to_string(),
        priority: rng.gen_range(1..4),
        class_name: class_name.to_string(),
        method_name: None,
        line_start: lines.0,
        line_end: lines.1,
        message: format!("{} in {}", phrase, pick(rng, FILLER_WORDS)),
    }
}

/// `n` warnings of which the positions in the returned list are the planted non-bug ones.
pub fn planted_warnings(n: usize, planted: usize, seed: u64) -> (Vec<BugWarning>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise: Vec<usize> = (0..n).collect();
    noise.shuffle(&mut rng);
    noise.truncate(planted);
    noise.sort_unstable();
    let ws = (0..n)
        .map(|i| {
            let start = rng.gen_range(1..40);
            let end = start + rng.gen_range(0..3);
            warning(&mut rng, &format!("Sample{i}"), (start, end), !noise.contains(&i))
        })
        .collect();
    (ws, noise)
}

/// Give roughly `fraction` of the units one to three warnings located on their
/// statements; about 30% of the warnings carry non-bug descriptions.
pub fn attach_synthetic_warnings(units: &mut [&mut CodeUnit], fraction: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for unit in units.iter_mut() {
        if !rng.gen_bool(fraction) {
            continue;
        }
        let lines = unit.stmt_lines.clone().unwrap_or_default();
        let key = unit.join_key().to_string();
        for _ in 0..rng.gen_range(1..4) {
            let line = lines.choose(&mut rng).copied().unwrap_or(0);
            let genuine = rng.gen_bool(0.7);
            let w = warning(&mut rng, &key, (line, line), genuine);
            unit.warnings.push(w);
        }
    }
}
