//! Line-record corpus files: classification samples, clone stores and pairs,
//! bug-report documents and labeled pattern classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::mini::parse_mini_with_lines;
use super::record::ast_from_value;
use super::warnings::BugWarning;
use crate::ast::AstNode;
use crate::error::{Error, Result};

/// One program plus whatever static-analysis context came with it.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeUnit {
    pub id: String,
    pub ast: AstNode,
    /// Source text, when the unit was given as code.
    pub source: Option<String>,
    /// Starting line of each statement node in preorder, when known.
    pub stmt_lines: Option<Vec<u32>>,
    pub warnings: Vec<BugWarning>,
    pub pattern: Option<String>,
    /// Class name used to join detector warnings to this unit.
    pub class_name: Option<String>,
}

impl CodeUnit {
    pub fn from_source(id: impl Into<String>, source: impl Into<String>) -> Result<Self> {
        let source = source.into();
        let (ast, lines) = parse_mini_with_lines(&source)?;
        Ok(CodeUnit {
            id: id.into(),
            ast,
            source: Some(source),
            stmt_lines: Some(lines),
            warnings: Vec::new(),
            pattern: None,
            class_name: None,
        })
    }

    pub fn from_ast(id: impl Into<String>, ast: AstNode) -> Self {
        CodeUnit {
            id: id.into(),
            ast,
            source: None,
            stmt_lines: None,
            warnings: Vec::new(),
            pattern: None,
            class_name: None,
        }
    }

    /// Name matched against `BugWarning::class_name`.
    pub fn join_key(&self) -> &str {
        self.class_name.as_deref().unwrap_or(&self.id)
    }

    fn to_json(&self) -> Map<String, Value> {
        let mut obj = Map::new();
        obj.insert("id".into(), json!(self.id));
        match &self.source {
            Some(code) => {
                obj.insert("code".into(), json!(code));
            }
            None => {
                obj.insert("ast".into(), serde_json::to_value(&self.ast).expect("ast"));
                if let Some(lines) = &self.stmt_lines {
                    obj.insert("lines".into(), json!(lines));
                }
            }
        }
        if !self.warnings.is_empty() {
            obj.insert("warnings".into(), serde_json::to_value(&self.warnings).expect("warnings"));
        }
        if let Some(p) = &self.pattern {
            obj.insert("pattern".into(), json!(p));
        }
        if let Some(c) = &self.class_name {
            obj.insert("class".into(), json!(c));
        }
        obj
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationSample {
    pub unit: CodeUnit,
    pub label: usize,
}

impl ClassificationSample {
    pub fn id(&self) -> &str {
        &self.unit.id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CloneType {
    T1,
    T2,
    ST3,
    MT3,
    T4,
    NONE,
}

impl CloneType {
    /// Positive strata in report order.
    pub const POSITIVE: [CloneType; 5] = [
        CloneType::T1,
        CloneType::T2,
        CloneType::ST3,
        CloneType::MT3,
        CloneType::T4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CloneType::T1 => "T1",
            CloneType::T2 => "T2",
            CloneType::ST3 => "ST3",
            CloneType::MT3 => "MT3",
            CloneType::T4 => "T4",
            CloneType::NONE => "NONE",
        }
    }
}

impl fmt::Display for CloneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "T1" => CloneType::T1,
            "T2" => CloneType::T2,
            "ST3" => CloneType::ST3,
            "MT3" => CloneType::MT3,
            "T4" => CloneType::T4,
            "NONE" => CloneType::NONE,
            other => return Err(Error::format_detail("type", format!("unknown clone type `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClonePair {
    pub id_a: String,
    pub id_b: String,
    /// 1 for clones, 0 otherwise.
    pub label: u8,
    pub clone_type: CloneType,
    /// Stratum a negative pair was generated for; `None` means it is shared by every stratum.
    pub stratum: Option<CloneType>,
}

impl ClonePair {
    pub fn is_clone(&self) -> bool {
        self.label == 1
    }

    /// Strata whose per-type report includes this pair.
    pub fn groups(&self) -> Vec<CloneType> {
        if self.is_clone() {
            vec![self.clone_type]
        } else if let Some(s) = self.stratum {
            vec![s]
        } else {
            CloneType::POSITIVE.to_vec()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CloneCorpus {
    pub store: BTreeMap<String, CodeUnit>,
    pub pairs: Vec<ClonePair>,
}

impl CloneCorpus {
    /// Pairs per stratum, in [`CloneType::POSITIVE`] order; empty strata are omitted.
    pub fn groups(&self) -> BTreeMap<CloneType, Vec<&ClonePair>> {
        let mut out: BTreeMap<CloneType, Vec<&ClonePair>> = BTreeMap::new();
        for pair in &self.pairs {
            for g in pair.groups() {
                out.entry(g).or_default().push(pair);
            }
        }
        out.retain(|t, pairs| pairs.iter().any(|p| p.is_clone() && p.clone_type == *t));
        out
    }

    pub fn unit(&self, id: &str) -> Option<&CodeUnit> {
        self.store.get(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportLabel {
    #[serde(rename = "bug")]
    Bug,
    #[serde(rename = "non-bug")]
    NonBug,
}

impl ReportLabel {
    pub fn is_bug(self) -> bool {
        self == ReportLabel::Bug
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReportDoc {
    pub id: String,
    pub text: String,
    pub label: ReportLabel,
}

/// A class labeled with the design pattern it implements.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSample {
    pub unit: CodeUnit,
    pub pattern: String,
}

// ---------------------------------------------------------------------------
// Field helpers

struct Record<'a> {
    line: usize,
    obj: &'a Map<String, Value>,
}

impl<'a> Record<'a> {
    fn parse(line_no: usize, line: &str, value: &'a mut Value) -> Result<Record<'a>> {
        *value = serde_json::from_str(line)
            .map_err(|e| Error::format_detail("record", format!("line {line_no}: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::format_detail("record", format!("line {line_no}: not an object")))?;
        Ok(Record { line: line_no, obj })
    }

    fn err(&self, field: &str, what: &str) -> Error {
        Error::format_detail(field, format!("line {}: {what}", self.line))
    }

    fn string(&self, field: &str) -> Result<String> {
        match self.obj.get(field) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Number(n)) if field.starts_with("id") => Ok(n.to_string()),
            Some(_) => Err(self.err(field, "expected a string")),
            None => Err(self.err(field, "missing")),
        }
    }

    fn opt_string(&self, field: &str) -> Result<Option<String>> {
        match self.obj.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(self.err(field, "expected a string or null")),
        }
    }

    fn int(&self, field: &str) -> Result<i64> {
        self.obj
            .get(field)
            .and_then(Value::as_i64)
            .ok_or_else(|| self.err(field, "expected an integer"))
    }

    fn code_unit(&self) -> Result<CodeUnit> {
        let id = self.string("id")?;
        let mut unit = match (self.obj.get("ast"), self.obj.get("code")) {
            (Some(ast), _) => {
                let mut unit = CodeUnit::from_ast(id, ast_from_value(ast)?);
                if let Some(lines) = self.obj.get("lines") {
                    let lines: Vec<u32> = serde_json::from_value(lines.clone())
                        .map_err(|e| self.err("lines", &e.to_string()))?;
                    unit.stmt_lines = Some(lines);
                }
                unit
            }
            (None, Some(Value::String(code))) => CodeUnit::from_source(id, code.clone())?,
            (None, Some(_)) => return Err(self.err("code", "expected a string")),
            (None, None) => return Err(self.err("ast", "record needs `ast` or `code`")),
        };
        if let Some(ws) = self.obj.get("warnings") {
            let ws: Vec<BugWarning> = serde_json::from_value(ws.clone())
                .map_err(|e| self.err("warnings", &e.to_string()))?;
            unit.warnings = ws
                .into_iter()
                .map(BugWarning::validated)
                .collect::<Result<_>>()?;
        }
        unit.pattern = self.opt_string("pattern")?;
        unit.class_name = self.opt_string("class")?;
        Ok(unit)
    }
}

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::format_detail("id", format!("duplicate id `{id}`")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Classification corpus

/// Parse a classification corpus: a `{"classes": C}` header, then one sample per line.
pub fn parse_classification_corpus(text: &str) -> Result<(usize, Vec<ClassificationSample>)> {
    let mut lines = records(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::format("classes"))?;
    let mut value = Value::Null;
    let header = Record::parse(line_no, header, &mut value)?;
    let classes = header.int("classes")?;
    if classes < 1 {
        return Err(header.err("classes", "must be positive"));
    }
    let classes = classes as usize;

    let mut samples = Vec::new();
    let mut out_of_range = Vec::new();
    for (line_no, line) in lines {
        let mut value = Value::Null;
        let rec = Record::parse(line_no, line, &mut value)?;
        let unit = rec.code_unit()?;
        let label = rec.int("label")?;
        if label < 0 || label as usize >= classes {
            out_of_range.push(unit.id.clone());
            continue;
        }
        samples.push(ClassificationSample {
            unit,
            label: label as usize,
        });
    }
    if !out_of_range.is_empty() {
        return Err(Error::LabelRange(out_of_range));
    }
    check_unique(samples.iter().map(|s| s.id()))?;
    Ok((classes, samples))
}

pub fn load_classification_corpus(path: impl AsRef<Path>) -> Result<(usize, Vec<ClassificationSample>)> {
    parse_classification_corpus(&read_text(path)?)
}

pub fn write_classification_corpus(classes: usize, samples: &[ClassificationSample]) -> String {
    let mut out = format!("{}\n", json!({ "classes": classes }));
    for s in samples {
        let mut obj = s.unit.to_json();
        obj.insert("label".into(), json!(s.label));
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// Attach detector warnings to samples whose join key matches the warning's class.
pub fn attach_warnings(units: &mut [&mut CodeUnit], warnings: &[BugWarning]) -> usize {
    let mut attached = 0;
    for unit in units.iter_mut() {
        let key = unit.join_key().to_string();
        let matched: Vec<BugWarning> = warnings.iter().filter(|w| w.class_name == key).cloned().collect();
        attached += matched.len();
        unit.warnings.extend(matched);
    }
    attached
}

// ---------------------------------------------------------------------------
// Clone corpus

pub fn parse_code_store(text: &str) -> Result<BTreeMap<String, CodeUnit>> {
    let mut store = BTreeMap::new();
    for (line_no, line) in records(text) {
        let mut value = Value::Null;
        let unit = Record::parse(line_no, line, &mut value)?.code_unit()?;
        if store.contains_key(&unit.id) {
            return Err(Error::format_detail("id", format!("duplicate id `{}`", unit.id)));
        }
        store.insert(unit.id.clone(), unit);
    }
    Ok(store)
}

pub fn parse_pairs(text: &str) -> Result<Vec<ClonePair>> {
    let mut pairs = Vec::new();
    for (line_no, line) in records(text) {
        let mut value = Value::Null;
        let rec = Record::parse(line_no, line, &mut value)?;
        let label = rec.int("label")?;
        if label != 0 && label != 1 {
            return Err(rec.err("label", "expected 0 or 1"));
        }
        let clone_type: CloneType = rec.string("type")?.parse()?;
        if (label == 0) != (clone_type == CloneType::NONE) {
            return Err(rec.err("type", "non-clones must carry NONE and clones a clone type"));
        }
        let stratum = rec
            .opt_string("stratum")?
            .map(|s| s.parse::<CloneType>())
            .transpose()?;
        pairs.push(ClonePair {
            id_a: rec.string("id1")?,
            id_b: rec.string("id2")?,
            label: label as u8,
            clone_type,
            stratum,
        });
    }
    Ok(pairs)
}

/// Assemble a clone corpus, checking that every pair resolves.
pub fn clone_corpus(store: BTreeMap<String, CodeUnit>, pairs: Vec<ClonePair>) -> Result<CloneCorpus> {
    let mut dangling = BTreeSet::new();
    for p in &pairs {
        for id in [&p.id_a, &p.id_b] {
            if !store.contains_key(id) {
                dangling.insert(id.clone());
            }
        }
    }
    if !dangling.is_empty() {
        return Err(Error::DanglingId(dangling.into_iter().collect()));
    }
    Ok(CloneCorpus { store, pairs })
}

pub fn load_clone_corpus(code_path: impl AsRef<Path>, pair_path: impl AsRef<Path>) -> Result<CloneCorpus> {
    let store = parse_code_store(&read_text(code_path)?)?;
    let pairs = parse_pairs(&read_text(pair_path)?)?;
    clone_corpus(store, pairs)
}

pub fn write_code_store<'a>(units: impl IntoIterator<Item = &'a CodeUnit>) -> String {
    units
        .into_iter()
        .map(|u| format!("{}\n", Value::Object(u.to_json())))
        .collect()
}

pub fn write_pairs(pairs: &[ClonePair]) -> String {
    pairs
        .iter()
        .map(|p| {
            let mut obj = json!({
                "id1": p.id_a,
                "id2": p.id_b,
                "label": p.label,
                "type": p.clone_type.as_str(),
            });
            if let Some(s) = p.stratum {
                obj["stratum"] = json!(s.as_str());
            }
            format!("{obj}\n")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bug reports and pattern corpora

pub fn parse_bug_reports(text: &str) -> Result<Vec<BugReportDoc>> {
    let mut docs = Vec::new();
    for (line_no, line) in records(text) {
        let doc: BugReportDoc = serde_json::from_str(line)
            .map_err(|e| Error::format_detail("report", format!("line {line_no}: {e}")))?;
        if doc.text.trim().is_empty() {
            return Err(Error::format_detail("text", format!("line {line_no}: empty text")));
        }
        docs.push(doc);
    }
    check_unique(docs.iter().map(|d| d.id.as_str()))?;
    Ok(docs)
}

pub fn load_bug_reports(path: impl AsRef<Path>) -> Result<Vec<BugReportDoc>> {
    parse_bug_reports(&read_text(path)?)
}

pub fn write_bug_reports(docs: &[BugReportDoc]) -> String {
    docs.iter()
        .map(|d| format!("{}\n", serde_json::to_string(d).expect("doc")))
        .collect()
}

pub fn parse_pattern_corpus(text: &str) -> Result<Vec<PatternSample>> {
    let mut out = Vec::new();
    for (line_no, line) in records(text) {
        let mut value = Value::Null;
        let rec = Record::parse(line_no, line, &mut value)?;
        let mut unit = rec.code_unit()?;
        let pattern = unit
            .pattern
            .take()
            .ok_or_else(|| rec.err("pattern", "missing"))?;
        out.push(PatternSample { unit, pattern });
    }
    check_unique(out.iter().map(|s| s.unit.id.as_str()))?;
    Ok(out)
}

pub fn load_pattern_corpus(path: impl AsRef<Path>) -> Result<Vec<PatternSample>> {
    parse_pattern_corpus(&read_text(path)?)
}

pub fn write_pattern_corpus(samples: &[PatternSample]) -> String {
    samples
        .iter()
        .map(|s| {
            let mut obj = s.unit.to_json();
            obj.insert("pattern".into(), json!(s.pattern));
            format!("{}\n", Value::Object(obj))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn warning(class: &str, line: u32) -> BugWarning {
        BugWarning {
            warning_type: "NP_NULL".into(),
            category: "CORRECTNESS".into(),
            priority: 1,
            class_name: class.into(),
            method_name: None,
            line_start: line,
            line_end: line,
            message: "possible null pointer dereference".into(),
        }
    }

    #[test]
    fn classification_header_and_order() {
        let text = r#"{"classes": 3}
{"id":"a","label":2,"code":"int f(){return 1;}"}
{"id":"b","label":0,"ast":{"kind":"CompilationUnit","token":null,"children":[]},"warnings":[],"pattern":null}
"#;
        let (c, samples) = parse_classification_corpus(text).unwrap();
        assert_eq!(c, 3);
        let ids: Vec<_> = samples.iter().map(|s| s.id()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(samples[0].unit.stmt_lines.as_deref(), Some(&[1, 1][..]));
    }

    #[test]
    fn label_at_class_count_is_rejected() {
        let text = "{\"classes\":104}\n{\"id\":\"p1\",\"label\":104,\"code\":\"\"}\n{\"id\":\"p2\",\"label\":-1,\"code\":\"\"}\n{\"id\":\"p3\",\"label\":103,\"code\":\"\"}";
        match parse_classification_corpus(text) {
            Err(Error::LabelRange(ids)) => assert_eq!(ids, ["p1", "p2"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn corpus_write_read_round_trip() {
        let mut unit = CodeUnit::from_source("x", "int f(){int a; return a;}").unwrap();
        unit.warnings.push(warning("x", 1));
        unit.pattern = Some("SINGLETON".into());
        let ast_only = CodeUnit::from_ast("y", unit.ast.clone());
        let samples = vec![
            ClassificationSample { unit, label: 1 },
            ClassificationSample { unit: ast_only, label: 0 },
        ];
        let text = write_classification_corpus(2, &samples);
        let (c, back) = parse_classification_corpus(&text).unwrap();
        assert_eq!(c, 2);
        assert_eq!(back, samples);
    }

    #[test]
    fn dangling_ids_are_listed() {
        let store = parse_code_store("{\"id\":\"x1\",\"code\":\"\"}\n{\"id\":\"x2\",\"code\":\"\"}").unwrap();
        let pairs = parse_pairs(
            "{\"id1\":\"x1\",\"id2\":\"x9\",\"label\":1,\"type\":\"T1\"}\n{\"id1\":\"x1\",\"id2\":\"x2\",\"label\":0,\"type\":\"NONE\"}",
        )
        .unwrap();
        match clone_corpus(store, pairs) {
            Err(Error::DanglingId(ids)) => assert_eq!(ids, ["x9"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pair_type_must_match_label() {
        assert!(parse_pairs("{\"id1\":\"a\",\"id2\":\"b\",\"label\":0,\"type\":\"T2\"}").is_err());
        assert!(parse_pairs("{\"id1\":\"a\",\"id2\":\"b\",\"label\":1,\"type\":\"NONE\"}").is_err());
        assert!(parse_pairs("{\"id1\":\"a\",\"id2\":\"b\",\"label\":1,\"type\":\"T9\"}").is_err());
    }

    #[test]
    fn reports_parse_and_validate() {
        let docs = parse_bug_reports(
            "{\"id\":\"r1\",\"text\":\"crash on null\",\"label\":\"bug\"}\n{\"id\":\"r2\",\"text\":\"add docs\",\"label\":\"non-bug\"}",
        )
        .unwrap();
        assert_eq!(docs[1].label, ReportLabel::NonBug);
        assert_eq!(parse_bug_reports(&write_bug_reports(&docs)).unwrap(), docs);
        assert!(parse_bug_reports("{\"id\":\"r1\",\"text\":\" \",\"label\":\"bug\"}").is_err());
        assert!(parse_bug_reports(
            "{\"id\":\"r1\",\"text\":\"a\",\"label\":\"bug\"}\n{\"id\":\"r1\",\"text\":\"b\",\"label\":\"bug\"}"
        )
        .is_err());
    }

    #[test]
    fn warnings_join_by_class() {
        let mut a = CodeUnit::from_source("A", "").unwrap();
        let mut b = CodeUnit::from_source("b-id", "").unwrap();
        b.class_name = Some("B".into());
        let ws = vec![warning("A", 3), warning("B", 4), warning("C", 5)];
        let n = attach_warnings(&mut [&mut a, &mut b], &ws);
        assert_eq!(n, 2);
        assert_eq!(a.warnings[0].line_start, 3);
        assert_eq!(b.warnings[0].line_start, 4);
    }
}
