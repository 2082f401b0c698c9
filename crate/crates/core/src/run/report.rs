//! Tab-separated result tables.

use crate::metrics::Metrics;
use crate::tasks::{CloneEval, Variant};

/// Published classification accuracy (%) per variant, for comparison only.
pub const CLASSIFY_REFERENCE: [f64; 5] = [96.6, 95.6, 97.8, 98.2, 98.5];

pub const CLONE_ROWS: [&str; 6] = ["T1", "T2", "ST3", "MT3", "T4", "ALL"];

/// Published clone-detection A/P/R/F1 (%) per row, variants in column order.
pub const CLONE_REFERENCE: [[f64; 20]; 6] = [
    [100.0; 20],
    [100.0; 20],
    [
        98.7, 96.3, 95.2, 95.7, 94.2, 93.6, 92.1, 92.8, 9.7, 98.7, 96.7, 97.7, 99.2, 99.1, 98.6, 98.8, 99.9, 99.3, 98.7, 99.0,
    ],
    [
        93.8, 93.4, 92.1, 92.7, 87.6, 85.9, 84.7, 85.3, 95.8, 93.8, 92.6, 93.1, 96.2, 93.8, 94.7, 94.2, 98.5, 97.8, 97.1, 97.4,
    ],
    [
        90.1, 83.2, 81.7, 82.4, 85.9, 81.3, 77.8, 79.5, 93.8, 90.6, 86.4, 88.5, 92.7, 91.4, 92.6, 91.9, 94.8, 91.7, 92.8, 92.2,
    ],
    [
        92.6, 87.7, 82.4, 84.9, 88.6, 82.7, 80.9, 81.8, 94.2, 91.8, 89.9, 90.8, 93.8, 92.7, 93.8, 93.2, 95.7, 95.6, 93.7, 94.6,
    ],
];

fn variant_index(v: Variant) -> usize {
    Variant::ALL.iter().position(|&x| x == v).expect("known variant")
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

/// Comment lines naming the command, task, variants and seed, then the config echo.
pub fn header(command: &str, task: &str, variants: &[Variant], seed: &str, config: &[(String, String)]) -> String {
    let names: Vec<&str> = variants.iter().map(|v| v.as_str()).collect();
    let mut out = format!("# {command} task={task} variant={} seed={seed}\n", names.join(","));
    for (k, v) in config {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

/// One accuracy row across the given variants plus the reference row.
pub fn classification_table(results: &[(Variant, Metrics)]) -> String {
    let mut out = String::from("metric");
    for (v, _) in results {
        out.push_str(&format!("\t{v}"));
    }
    out.push_str("\nAccuracy");
    for (_, m) in results {
        out.push_str(&format!("\t{}", pct(m.accuracy)));
    }
    out.push_str("\nreference");
    for (v, _) in results {
        out.push_str(&format!("\t{}", CLASSIFY_REFERENCE[variant_index(*v)]));
    }
    out.push('\n');
    out
}

/// Six clone-type rows of A/P/R/F1 per variant, then the reference rows.
/// Strata without positive pairs print `-`.
pub fn clone_table(results: &[(Variant, &CloneEval)]) -> String {
    let mut out = String::from("type");
    for (v, _) in results {
        for m in ["A", "P", "R", "F1"] {
            out.push_str(&format!("\t{v} {m}"));
        }
    }
    out.push('\n');
    for row in CLONE_ROWS {
        out.push_str(row);
        for (_, e) in results {
            match e.get(row) {
                Some(m) => {
                    for x in [m.accuracy, m.precision, m.recall, m.f1] {
                        out.push_str(&format!("\t{}", pct(x)));
                    }
                }
                None => out.push_str("\t-\t-\t-\t-"),
            }
        }
        out.push('\n');
    }
    for (r, row) in CLONE_ROWS.iter().enumerate() {
        out.push_str(&format!("reference {row}"));
        for (v, _) in results {
            let i = variant_index(*v) * 4;
            for x in &CLONE_REFERENCE[r][i..i + 4] {
                out.push_str(&format!("\t{x}"));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_follow_variant_order() {
        let rows: Vec<_> = Variant::ALL.iter().map(|&v| (v, Metrics::default())).collect();
        let t = classification_table(&rows);
        let head: Vec<&str> = t.lines().next().unwrap().split('\t').collect();
        assert_eq!(head, ["metric", "NONE", "RAW_BUGS", "FILTERED_BUGS", "PATTERNS", "BUGS_AND_PATTERNS"]);
        assert_eq!(t.lines().nth(2).unwrap(), "reference\t96.6\t95.6\t97.8\t98.2\t98.5");
    }

    #[test]
    fn clone_rows_always_present() {
        let e = CloneEval {
            rows: vec![("T1".into(), Metrics { accuracy: 1.0, precision: 1.0, recall: 1.0, f1: 1.0 })],
            scores: vec![],
        };
        let t = clone_table(&[(Variant::Patterns, &e)]);
        let first: Vec<&str> = t.lines().skip(1).take(6).map(|l| l.split('\t').next().unwrap()).collect();
        assert_eq!(first, CLONE_ROWS);
        assert!(t.contains("T1\t100.00\t100.00\t100.00\t100.00"));
        assert!(t.contains("T2\t-\t-\t-\t-"));
        assert!(t.contains("reference ALL\t93.8\t92.7\t93.8\t93.2"));
    }
}
