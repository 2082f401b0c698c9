use std::collections::BTreeMap;

use crate::bugs::{bug_raw_contexts, filter_warnings, BugFilterModel};
use crate::encode::{split_statements, CompiledTree, PreparedUnit, StatementTree, Vocabulary};
use crate::error::{Error, Result};
use crate::ingest::CodeUnit;
use crate::patterns::{extract_pattern_features, pattern_raw_context, predict_pattern, AdaBoostModel, PatternSet, NONE_PATTERN};

use super::variant::Variant;

/// Trained side models and lookup tables feeding the context channels.
#[derive(Debug, Clone, Default)]
pub struct Channels {
    pub filter: Option<BugFilterModel>,
    /// Report text by warning type.
    pub reports: BTreeMap<String, String>,
    pub patterns: PatternSet,
    pub detector: Option<AdaBoostModel>,
}

impl Channels {
    /// Pattern label used for a unit: the detector's prediction when it applies,
    /// else the corpus label, else NONE.
    pub fn pattern_label(&self, unit: &CodeUnit) -> String {
        if let Some(model) = &self.detector {
            if let Ok(f) = extract_pattern_features(&unit.ast) {
                return predict_pattern(&f, model).0;
            }
        }
        unit.pattern.clone().unwrap_or_else(|| NONE_PATTERN.to_string())
    }
}

/// Fail early when a variant's inputs are absent.
pub fn check_channels<'a>(units: impl IntoIterator<Item = &'a CodeUnit>, variant: Variant, channels: &Channels) -> Result<()> {
    let (mut any_warning, mut any_pattern) = (false, false);
    for u in units {
        any_warning |= !u.warnings.is_empty();
        any_pattern |= u.pattern.is_some();
    }
    if variant.uses_bugs() && !any_warning {
        return Err(Error::MissingChannel("bug warnings".into()));
    }
    if variant.filters_bugs() && channels.filter.is_none() {
        return Err(Error::MissingChannel("bug filter".into()));
    }
    if variant.uses_patterns() && channels.detector.is_none() && !any_pattern {
        return Err(Error::MissingChannel("design patterns".into()));
    }
    Ok(())
}

/// Statement trees for a unit; a unit without statements becomes one tree.
pub fn unit_trees(unit: &CodeUnit) -> Vec<StatementTree> {
    let trees = split_statements(&unit.ast);
    if trees.is_empty() {
        vec![StatementTree { root: unit.ast.clone() }]
    } else {
        trees
    }
}

pub fn prepare_unit(unit: &CodeUnit, vocab: &Vocabulary, variant: Variant, channels: &Channels) -> Result<PreparedUnit> {
    let trees = unit_trees(unit);
    let compiled = trees.iter().map(|t| CompiledTree::compile(&t.root, vocab)).collect();
    let mut contexts = Vec::new();
    if variant.uses_bugs() {
        let lines = unit.stmt_lines.as_deref();
        if variant.filters_bugs() {
            let filter = channels
                .filter
                .as_ref()
                .ok_or_else(|| Error::MissingChannel("bug filter".into()))?;
            let kept = filter_warnings(&unit.warnings, &channels.reports, filter).kept;
            contexts.extend(bug_raw_contexts(&kept, &trees, lines));
        } else {
            contexts.extend(bug_raw_contexts(&unit.warnings, &trees, lines));
        }
    }
    if variant.uses_patterns() {
        contexts.push(pattern_raw_context(&channels.pattern_label(unit), &channels.patterns)?);
    }
    Ok(PreparedUnit::new(compiled, contexts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::build_vocab;
    use crate::encode::Channel;
    use crate::ingest::BugWarning;

    fn unit() -> CodeUnit {
        let mut u = CodeUnit::from_source("u", "int f(int a) {\n  int b = a;\n  return b;\n}\n").unwrap();
        u.warnings.push(BugWarning {
            warning_type: "NP".into(),
            category: "CORRECTNESS".into(),
            priority: 1,
            class_name: "u".into(),
            method_name: None,
            line_start: 2,
            line_end: 2,
            message: "null pointer dereference".into(),
        });
        u.pattern = Some("SINGLETON".into());
        u
    }

    #[test]
    fn none_ignores_context() {
        let u = unit();
        let vocab = build_vocab(&[&u.ast], 1);
        let with = prepare_unit(&u, &vocab, Variant::None, &Channels::default()).unwrap();
        let mut bare = u.clone();
        bare.warnings.clear();
        bare.pattern = None;
        let without = prepare_unit(&bare, &vocab, Variant::None, &Channels::default()).unwrap();
        assert_eq!(with, without);
        assert!(with.contexts.is_empty());
    }

    #[test]
    fn channels_by_variant() {
        let u = unit();
        let vocab = build_vocab(&[&u.ast], 1);
        let raw = prepare_unit(&u, &vocab, Variant::RawBugs, &Channels::default()).unwrap();
        assert_eq!(raw.contexts.len(), 1);
        assert_eq!(raw.contexts[0].channel, Channel::Bug);
        let pat = prepare_unit(&u, &vocab, Variant::Patterns, &Channels::default()).unwrap();
        assert_eq!(pat.contexts.len(), 1);
        assert_eq!(pat.contexts[0].features[0], 1.0);
        assert!(matches!(
            prepare_unit(&u, &vocab, Variant::FilteredBugs, &Channels::default()),
            Err(Error::MissingChannel(_))
        ));
    }

    #[test]
    fn missing_channels_named() {
        let mut u = unit();
        u.warnings.clear();
        u.pattern = None;
        let err = check_channels([&u], Variant::RawBugs, &Channels::default()).unwrap_err();
        assert!(err.to_string().contains("bug warnings"));
        let err = check_channels([&u], Variant::Patterns, &Channels::default()).unwrap_err();
        assert!(err.to_string().contains("design patterns"));
        check_channels([&u], Variant::None, &Channels::default()).unwrap();
    }

    #[test]
    fn empty_unit_gets_a_tree() {
        let u = CodeUnit::from_source("e", "").unwrap();
        assert_eq!(unit_trees(&u).len(), 1);
    }
}
