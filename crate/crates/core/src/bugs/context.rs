use crate::encode::context::{Channel, ContextVector, RawContext, Scope};
use crate::encode::split::StatementTree;
use crate::error::{Error, Result};
use crate::ingest::warnings::{category_slot, CATEGORY_SLOTS};
use crate::ingest::BugWarning;
use crate::nn::Tensor;

/// One-hot category scaled by `4 - priority`, max-pooled over the warnings.
pub fn bug_features(warnings: &[&BugWarning]) -> Result<Vec<f64>> {
    if warnings.is_empty() {
        return Err(Error::EmptyInput("bug context needs at least one warning"));
    }
    let mut raw = vec![0.0; CATEGORY_SLOTS];
    for w in warnings {
        let slot = category_slot(&w.category);
        let weight = f64::from(4u8.saturating_sub(w.priority));
        raw[slot] = f64::max(raw[slot], weight);
    }
    Ok(raw)
}

pub fn bug_context(warnings: &[&BugWarning], projection: &Tensor, scope: Scope) -> Result<ContextVector> {
    RawContext {
        channel: Channel::Bug,
        scope,
        features: bug_features(warnings)?,
    }
    .project(projection)
}

/// Line span of each statement: from its first line up to the line before the
/// next statement starts; the last one is open-ended.
pub fn statement_spans(stmt_lines: &[u32]) -> Vec<(u32, u32)> {
    stmt_lines
        .iter()
        .enumerate()
        .map(|(k, &start)| {
            let end = stmt_lines
                .get(k + 1)
                .map_or(u32::MAX, |&next| next.saturating_sub(1).max(start));
            (start, end)
        })
        .collect()
}

/// Group warnings by the statements they overlap.
///
/// `stmt_lines` holds the first line of every non-marker tree in `trees`, in
/// order. Warnings that overlap no statement, or any warning when line
/// information is missing or misaligned, attach to the whole unit.
pub fn bug_raw_contexts(
    warnings: &[BugWarning],
    trees: &[StatementTree],
    stmt_lines: Option<&[u32]>,
) -> Vec<RawContext> {
    if warnings.is_empty() {
        return Vec::new();
    }
    let positions: Vec<usize> = trees
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_end_block())
        .map(|(i, _)| i)
        .collect();
    let spans = match stmt_lines {
        Some(lines) if lines.len() == positions.len() => statement_spans(lines),
        _ => Vec::new(),
    };
    let mut per_stmt: Vec<Vec<&BugWarning>> = vec![Vec::new(); spans.len()];
    let mut whole: Vec<&BugWarning> = Vec::new();
    for w in warnings {
        let mut hit = false;
        for (k, &(start, end)) in spans.iter().enumerate() {
            if w.overlaps(start, end) {
                per_stmt[k].push(w);
                hit = true;
            }
        }
        if !hit {
            whole.push(w);
        }
    }
    let mut out = Vec::new();
    for (k, ws) in per_stmt.iter().enumerate() {
        if let Ok(features) = bug_features(ws) {
            out.push(RawContext {
                channel: Channel::Bug,
                scope: Scope::Statement(positions[k]),
                features,
            });
        }
    }
    if let Ok(features) = bug_features(&whole) {
        out.push(RawContext {
            channel: Channel::Bug,
            scope: Scope::WholeUnit,
            features,
        });
    }
    out
}
