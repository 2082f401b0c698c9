use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{kind, AstNode};
use crate::error::{Error, Result};
use crate::ingest::{CloneCorpus, ClonePair, CloneType, CodeUnit};

/// Statement edits applied to produce one stored program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloneEdit {
    /// Index into the generated pairs.
    pub pair: usize,
    /// Statement count of the seed the edits were applied to.
    pub statements: usize,
    pub edits: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticClones {
    pub corpus: CloneCorpus,
    pub edits: Vec<CloneEdit>,
}

impl SyntheticClones {
    /// Append another batch; pair indices in its log are shifted.
    pub fn merge(&mut self, other: SyntheticClones) {
        let offset = self.corpus.pairs.len();
        self.corpus.store.extend(other.corpus.store);
        self.corpus.pairs.extend(other.corpus.pairs);
        self.edits.extend(other.edits.into_iter().map(|e| CloneEdit {
            pair: e.pair + offset,
            ..e
        }));
    }
}

const SIMPLE: &[&str] = &[kind::DECL, kind::ASSIGN, kind::RETURN, kind::CALL_STMT];
const CONTAINERS: &[&str] = &[kind::FUNC_DEF, kind::METHOD, kind::CONSTRUCTOR, kind::WHILE, kind::FOR, kind::BLOCK];

pub fn statement_count(ast: &AstNode) -> usize {
    ast.preorder().filter(|n| kind::is_statement(&n.kind)).count()
}

/// Consistent renaming of every identifier to a fresh `v<k>` name.
pub fn rename_identifiers<R: Rng>(ast: &AstNode, rng: &mut R) -> AstNode {
    let mut seen: Vec<String> = Vec::new();
    for n in ast.preorder() {
        if let (true, Some(t)) = (n.is(kind::IDENTIFIER), &n.token) {
            if !seen.contains(t) {
                seen.push(t.clone());
            }
        }
    }
    let pool = (seen.len() * 2).max(64);
    let fresh: Vec<usize> = rand::seq::index::sample(rng, pool, seen.len()).into_vec();
    let map: BTreeMap<String, String> = seen
        .into_iter()
        .zip(fresh)
        .map(|(old, k)| (old, format!("v{k}")))
        .collect();
    let mut out = ast.clone();
    rename_in(&mut out, &map);
    out
}

fn rename_in(node: &mut AstNode, map: &BTreeMap<String, String>) {
    if node.is(kind::IDENTIFIER) {
        if let Some(t) = &node.token {
            if let Some(new) = map.get(t) {
                node.token = Some(new.clone());
            }
        }
    }
    for c in &mut node.children {
        rename_in(c, map);
    }
}

fn paths(node: &AstNode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, pred: &dyn Fn(&AstNode) -> bool) {
    if pred(node) {
        out.push(path.clone());
    }
    for (i, c) in node.children.iter().enumerate() {
        path.push(i);
        paths(c, path, out, pred);
        path.pop();
    }
}

fn find(node: &AstNode, pred: &dyn Fn(&AstNode) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    paths(node, &mut Vec::new(), &mut out, pred);
    out
}

fn at_mut<'a>(mut node: &'a mut AstNode, path: &[usize]) -> &'a mut AstNode {
    for &i in path {
        node = &mut node.children[i];
    }
    node
}

fn at<'a>(mut node: &'a AstNode, path: &[usize]) -> &'a AstNode {
    for &i in path {
        node = &node.children[i];
    }
    node
}

fn statement_children(n: &AstNode) -> usize {
    n.children.iter().filter(|c| kind::is_statement(&c.kind)).count()
}

/// Apply `edits` random simple-statement insertions or deletions.
pub fn edit_statements<R: Rng>(ast: &AstNode, edits: usize, rng: &mut R) -> AstNode {
    let mut out = ast.clone();
    for _ in 0..edits {
        let deletable: Vec<Vec<usize>> = find(&out, &|n| CONTAINERS.contains(&n.kind.as_str()) && statement_children(n) >= 2)
            .into_iter()
            .flat_map(|p| {
                let node = at(&out, &p);
                node.children
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| SIMPLE.contains(&c.kind.as_str()))
                    .map(|(i, _)| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let donors = find(&out, &|n| SIMPLE.contains(&n.kind.as_str()));
        let containers = find(&out, &|n| CONTAINERS.contains(&n.kind.as_str()));
        let delete = !deletable.is_empty() && (donors.is_empty() || containers.is_empty() || rng.gen_bool(0.5));
        if delete {
            let mut p = deletable.choose(rng).expect("non-empty").clone();
            let i = p.pop().expect("child path");
            at_mut(&mut out, &p).children.remove(i);
        } else if let (Some(donor), Some(target)) = (donors.choose(rng), containers.choose(rng)) {
            let stmt = at(&out, donor).clone();
            let node = at_mut(&mut out, target);
            let first = node
                .children
                .iter()
                .position(|c| kind::is_statement(&c.kind))
                .unwrap_or(node.children.len());
            let pos = rng.gen_range(first..=node.children.len());
            node.children.insert(pos, stmt);
        }
    }
    out
}

fn edit_range(ty: CloneType, n: usize) -> Option<(usize, usize)> {
    let low = n / 10;
    let high = 3 * n / 10;
    match ty {
        CloneType::ST3 if low >= 1 => Some((1, low)),
        CloneType::MT3 if low >= 1 && high > low => Some((low + 1, high)),
        _ => None,
    }
}

/// Derived program of the requested similarity to `seed`, with the edit count.
fn mutate<R: Rng>(ty: CloneType, seed: &AstNode, rng: &mut R) -> (AstNode, usize) {
    match ty {
        CloneType::T2 => (rename_identifiers(seed, rng), 0),
        CloneType::ST3 | CloneType::MT3 => match edit_range(ty, statement_count(seed)) {
            Some((lo, hi)) => {
                let e = rng.gen_range(lo..=hi);
                (edit_statements(seed, e, rng), e)
            }
            None => (seed.clone(), 0),
        },
        _ => (seed.clone(), 0),
    }
}

/// Clone pairs of one similarity type from labeled seed programs, plus an equal
/// number of cross-label negatives assigned to the same stratum.
pub fn gen_synthetic_clones(seeds: &[(AstNode, usize)], ty: CloneType, count: usize, rng_seed: u64) -> Result<SyntheticClones> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput("seed programs"));
    }
    if ty == CloneType::NONE {
        return Err(Error::UnsupportedType("NONE is not a clone type".into()));
    }
    let qualifies = |k: usize| match ty {
        CloneType::ST3 | CloneType::MT3 => edit_range(ty, statement_count(&seeds[k].0)).is_some(),
        CloneType::T4 => (0..seeds.len()).any(|j| j != k && seeds[j].1 == seeds[k].1),
        _ => true,
    };
    let usable: Vec<usize> = (0..seeds.len()).filter(|&k| qualifies(k)).collect();
    if usable.is_empty() {
        return Err(Error::UnsupportedType(format!("no seed program supports {ty}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = SyntheticClones::default();
    let store_seed = |out: &mut SyntheticClones, k: usize| {
        let id = format!("seed{k}");
        out.corpus
            .store
            .entry(id.clone())
            .or_insert_with(|| CodeUnit::from_ast(id.clone(), seeds[k].0.clone()));
        id
    };
    let tag = ty.as_str().to_lowercase();

    for i in 0..count {
        let k = *usable.choose(&mut rng).expect("non-empty");
        let id_a = store_seed(&mut out, k);
        let id_b = if ty == CloneType::T4 {
            let partners: Vec<usize> = (0..seeds.len()).filter(|&j| j != k && seeds[j].1 == seeds[k].1).collect();
            let j = *partners.choose(&mut rng).expect("qualified");
            store_seed(&mut out, j)
        } else {
            let (ast, edits) = mutate(ty, &seeds[k].0, &mut rng);
            if edits > 0 {
                out.edits.push(CloneEdit {
                    pair: out.corpus.pairs.len(),
                    statements: statement_count(&seeds[k].0),
                    edits,
                });
            }
            let id = format!("{tag}_p{i}");
            out.corpus.store.insert(id.clone(), CodeUnit::from_ast(id.clone(), ast));
            id
        };
        out.corpus.pairs.push(ClonePair {
            id_a,
            id_b,
            label: 1,
            clone_type: ty,
            stratum: None,
        });
    }

    for i in 0..count {
        let k = rng.gen_range(0..seeds.len());
        let others: Vec<usize> = (0..seeds.len()).filter(|&j| seeds[j].1 != seeds[k].1).collect();
        if others.is_empty() {
            return Err(Error::UnsupportedType("negative pairs need seeds with at least two labels".into()));
        }
        let preferred: Vec<usize> = others.iter().copied().filter(|&j| qualifies(j)).collect();
        let j = *if preferred.is_empty() { &others } else { &preferred }
            .choose(&mut rng)
            .expect("non-empty");
        let id_a = store_seed(&mut out, k);
        let id_b = if ty == CloneType::T4 || ty == CloneType::T1 {
            store_seed(&mut out, j)
        } else {
            let (ast, _) = mutate(ty, &seeds[j].0, &mut rng);
            let id = format!("{tag}_n{i}");
            out.corpus.store.insert(id.clone(), CodeUnit::from_ast(id.clone(), ast));
            id
        };
        out.corpus.pairs.push(ClonePair {
            id_a,
            id_b,
            label: 0,
            clone_type: CloneType::NONE,
            stratum: Some(ty),
        });
    }
    Ok(out)
}

/// One batch per type, merged; each type draws from its own derived seed.
pub fn gen_clone_suite(seeds: &[(AstNode, usize)], types: &[CloneType], count: usize, rng_seed: u64) -> Result<SyntheticClones> {
    let mut out = SyntheticClones::default();
    for (i, &ty) in types.iter().enumerate() {
        out.merge(gen_synthetic_clones(seeds, ty, count, rng_seed.wrapping_mul(31).wrapping_add(i as u64))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::split_statements;
    use crate::synth::task_corpus;

    fn seeds() -> Vec<(AstNode, usize)> {
        task_corpus(6, 5, 12, 7)
            .unwrap()
            .into_iter()
            .map(|s| (s.unit.ast, s.label))
            .collect()
    }

    /// Rename identifiers by order of first occurrence.
    fn canonical(ast: &AstNode) -> AstNode {
        let mut seen: Vec<String> = Vec::new();
        for n in ast.preorder() {
            if let (true, Some(t)) = (n.is(kind::IDENTIFIER), &n.token) {
                if !seen.contains(t) {
                    seen.push(t.clone());
                }
            }
        }
        let map = seen.into_iter().enumerate().map(|(i, t)| (t, format!("id{i}"))).collect();
        let mut out = ast.clone();
        rename_in(&mut out, &map);
        out
    }

    /// Insert/delete distance between statement sequences via LCS.
    fn indel_distance(a: &AstNode, b: &AstNode) -> usize {
        let sa = split_statements(a);
        let sb = split_statements(b);
        let mut dp = vec![vec![0usize; sb.len() + 1]; sa.len() + 1];
        for i in 1..=sa.len() {
            for j in 1..=sb.len() {
                dp[i][j] = if sa[i - 1] == sb[j - 1] {
                    dp[i - 1][j - 1] + 1
                } else {
                    dp[i - 1][j].max(dp[i][j - 1])
                };
            }
        }
        let lcs = dp[sa.len()][sb.len()];
        // Markers of compound statements are never edited.
        let marks = |s: &[crate::encode::StatementTree]| s.iter().filter(|t| t.is_end_block()).count();
        debug_assert_eq!(marks(&sa), marks(&sb));
        sa.len() + sb.len() - 2 * lcs
    }

    #[test]
    fn t1_identical() {
        let s = seeds();
        let out = gen_synthetic_clones(&s, CloneType::T1, 10, 1).unwrap();
        for p in out.corpus.pairs.iter().filter(|p| p.is_clone()) {
            assert_eq!(out.corpus.store[&p.id_a].ast, out.corpus.store[&p.id_b].ast);
        }
        assert_eq!(out.corpus.pairs.iter().filter(|p| !p.is_clone()).count(), 10);
    }

    #[test]
    fn t2_alpha_equivalent() {
        let s = seeds();
        let out = gen_synthetic_clones(&s, CloneType::T2, 20, 2).unwrap();
        for p in out.corpus.pairs.iter().filter(|p| p.is_clone()) {
            let (a, b) = (&out.corpus.store[&p.id_a].ast, &out.corpus.store[&p.id_b].ast);
            assert_ne!(a, b);
            assert_eq!(canonical(a), canonical(b));
        }
    }

    #[test]
    fn st3_and_mt3_edit_bounds() {
        let s = seeds();
        for (ty, lo_frac, hi_frac) in [(CloneType::ST3, 0.0, 0.1), (CloneType::MT3, 0.1, 0.3)] {
            let out = gen_synthetic_clones(&s, ty, 30, 3).unwrap();
            assert_eq!(out.edits.len(), 30);
            for e in &out.edits {
                let n = e.statements as f64;
                assert!(e.edits as f64 > lo_frac * n - 1.0 && e.edits >= 1);
                assert!(e.edits as f64 <= (hi_frac * n).floor());
                let p = &out.corpus.pairs[e.pair];
                let (a, b) = (&out.corpus.store[&p.id_a].ast, &out.corpus.store[&p.id_b].ast);
                let d = indel_distance(a, b);
                assert!(d <= e.edits, "distance {d} > edits {}", e.edits);
                assert!(d as f64 <= (hi_frac * n).floor());
            }
        }
    }

    #[test]
    fn t4_same_label_and_negatives_cross_label() {
        let s = seeds();
        let label_of = |id: &str| s[id.trim_start_matches("seed").parse::<usize>().unwrap()].1;
        let out = gen_synthetic_clones(&s, CloneType::T4, 15, 4).unwrap();
        for p in &out.corpus.pairs {
            assert_ne!(p.id_a, p.id_b);
            if p.is_clone() {
                assert_eq!(label_of(&p.id_a), label_of(&p.id_b));
            } else {
                assert_ne!(label_of(&p.id_a), label_of(&p.id_b));
                assert_eq!(p.stratum, Some(CloneType::T4));
            }
        }
    }

    #[test]
    fn deterministic_and_errors() {
        let s = seeds();
        let a = gen_synthetic_clones(&s, CloneType::MT3, 8, 9).unwrap();
        let b = gen_synthetic_clones(&s, CloneType::MT3, 8, 9).unwrap();
        assert_eq!(a.corpus.pairs, b.corpus.pairs);
        assert_eq!(a.corpus.store, b.corpus.store);
        assert!(matches!(gen_synthetic_clones(&s, CloneType::NONE, 1, 0), Err(Error::UnsupportedType(_))));
        let tiny = vec![(crate::ingest::parse_mini("int f() { return 1; }").unwrap(), 0)];
        assert!(matches!(gen_synthetic_clones(&tiny, CloneType::ST3, 1, 0), Err(Error::UnsupportedType(_))));
        assert!(matches!(gen_synthetic_clones(&tiny, CloneType::T4, 1, 0), Err(Error::UnsupportedType(_))));
    }
}
