//! Statement encoder with context fusion, and the bidirectional sequence encoder.
//!
//! Each node's input is the elementwise max of its symbol embedding and every
//! projected context vector in scope. One bottom-up pass computes
//! `s_n = tanh(W_self x_n + Σ_children W_child s_c + b)`; further rounds reuse the
//! previous round's state as the node input. The statement vector is the max over
//! node states. A forward and a backward GRU then run over the statement vectors
//! and the concatenated per-step states are max-pooled into the code vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::context::{Channel, ContextVector, RawContext};
use super::split::StatementTree;
use super::vocab::Vocabulary;
use crate::ast::AstNode;
use crate::error::{Error, Result};
use crate::nn::gru::{gru_step, gru_step_backward, GruCache, GruParams};
use crate::nn::ops::{max_pool, max_pool_backward};
use crate::nn::params::Params;
use crate::nn::tensor::{add_into, Tensor};

/// Where context vectors are fused into the statement encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Fusion {
    /// Max-pooled into every node input before message passing.
    #[default]
    Node,
    /// Max-pooled with the finished statement vector.
    Statement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub embedding: Tensor,
    pub w_self: Tensor,
    pub w_child: Tensor,
    pub bias: Tensor,
    pub bug_proj: Tensor,
    pub pattern_proj: Tensor,
    pub fwd: GruParams,
    pub bwd: GruParams,
    pub rounds: usize,
    pub fusion: Fusion,
}

#[derive(Debug, Clone, Copy)]
pub struct EncoderShape {
    pub vocab: usize,
    pub dim: usize,
    pub hidden: usize,
    pub bug_features: usize,
    pub pattern_features: usize,
}

impl EncoderParams {
    pub fn zeros(shape: EncoderShape) -> Self {
        let d = shape.dim;
        EncoderParams {
            embedding: Tensor::zeros(&[shape.vocab, d]),
            w_self: Tensor::zeros(&[d, d]),
            w_child: Tensor::zeros(&[d, d]),
            bias: Tensor::zeros(&[d]),
            bug_proj: Tensor::zeros(&[d, shape.bug_features]),
            pattern_proj: Tensor::zeros(&[d, shape.pattern_features]),
            fwd: GruParams::zeros(d, shape.hidden),
            bwd: GruParams::zeros(d, shape.hidden),
            rounds: 1,
            fusion: Fusion::Node,
        }
    }

    /// Glorot-uniform weights, small uniform embeddings.
    pub fn random<R: Rng>(shape: EncoderShape, rng: &mut R) -> Self {
        let d = shape.dim;
        let glorot = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        EncoderParams {
            embedding: Tensor::uniform(&[shape.vocab, d], 0.5, rng),
            w_self: Tensor::uniform(&[d, d], glorot(d, d), rng),
            w_child: Tensor::uniform(&[d, d], glorot(d, d), rng),
            bias: Tensor::zeros(&[d]),
            bug_proj: Tensor::uniform(&[d, shape.bug_features], glorot(shape.bug_features, d), rng),
            pattern_proj: Tensor::uniform(
                &[d, shape.pattern_features],
                glorot(shape.pattern_features, d),
                rng,
            ),
            fwd: GruParams::random(d, shape.hidden, rng),
            bwd: GruParams::random(d, shape.hidden, rng),
            rounds: 1,
            fusion: Fusion::Node,
        }
    }

    pub fn dim(&self) -> usize {
        self.w_self.rows()
    }

    pub fn hidden(&self) -> usize {
        self.fwd.hidden_dim()
    }

    pub fn code_dim(&self) -> usize {
        2 * self.hidden()
    }

    pub fn projection(&self, channel: Channel) -> &Tensor {
        match channel {
            Channel::Bug => &self.bug_proj,
            Channel::Pattern => &self.pattern_proj,
        }
    }

    fn projection_mut(&mut self, channel: Channel) -> &mut Tensor {
        match channel {
            Channel::Bug => &mut self.bug_proj,
            Channel::Pattern => &mut self.pattern_proj,
        }
    }

    /// Zero-valued gradient accumulator with the same layout.
    pub fn zeros_like(&self) -> Self {
        let mut g = self.clone();
        g.zero();
        g
    }
}

impl Params for EncoderParams {
    fn visit(&self, prefix: &str, f: &mut dyn FnMut(String, &Tensor)) {
        f(format!("{prefix}embedding"), &self.embedding);
        f(format!("{prefix}stmt.w_self"), &self.w_self);
        f(format!("{prefix}stmt.w_child"), &self.w_child);
        f(format!("{prefix}stmt.bias"), &self.bias);
        f(format!("{prefix}ctx.bug"), &self.bug_proj);
        f(format!("{prefix}ctx.pattern"), &self.pattern_proj);
        self.fwd.visit(&format!("{prefix}gru.fwd."), f);
        self.bwd.visit(&format!("{prefix}gru.bwd."), f);
    }

    fn visit_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Tensor)) {
        f(format!("{prefix}embedding"), &mut self.embedding);
        f(format!("{prefix}stmt.w_self"), &mut self.w_self);
        f(format!("{prefix}stmt.w_child"), &mut self.w_child);
        f(format!("{prefix}stmt.bias"), &mut self.bias);
        f(format!("{prefix}ctx.bug"), &mut self.bug_proj);
        f(format!("{prefix}ctx.pattern"), &mut self.pattern_proj);
        self.fwd.visit_mut(&format!("{prefix}gru.fwd."), f);
        self.bwd.visit_mut(&format!("{prefix}gru.bwd."), f);
    }
}

/// A statement tree flattened to postorder symbol indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledTree {
    pub symbols: Vec<usize>,
    /// Child indices per node; children always precede their parent.
    pub children: Vec<Vec<usize>>,
}

impl CompiledTree {
    pub fn compile(root: &AstNode, vocab: &Vocabulary) -> Self {
        let mut tree = CompiledTree {
            symbols: Vec::new(),
            children: Vec::new(),
        };
        // Iterative postorder.
        let mut stack: Vec<(&AstNode, Vec<usize>, usize)> = vec![(root, Vec::new(), 0)];
        loop {
            let top = stack.last_mut().expect("non-empty");
            if top.2 < top.0.children.len() {
                let child = &top.0.children[top.2];
                top.2 += 1;
                stack.push((child, Vec::new(), 0));
                continue;
            }
            let (node, kids, _) = stack.pop().expect("non-empty");
            let idx = tree.symbols.len();
            tree.symbols.push(vocab.node(node));
            tree.children.push(kids);
            match stack.last_mut() {
                Some(parent) => parent.1.push(idx),
                None => break,
            }
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Forward activations of one statement.
#[derive(Debug, Clone)]
pub struct StatementCache {
    x: Vec<Vec<f64>>,
    x_src: Vec<Vec<usize>>,
    states: Vec<Vec<Vec<f64>>>,
    pool_arg: Vec<usize>,
    fused_arg: Option<Vec<usize>>,
}

fn check_contexts(ctx: &[&[f64]], d: usize) -> Result<()> {
    for (i, c) in ctx.iter().enumerate() {
        if c.len() != d {
            return Err(Error::Shape(format!(
                "context {i} has dimension {} but the embedding dimension is {d}",
                c.len()
            )));
        }
    }
    Ok(())
}

pub fn statement_forward(
    tree: &CompiledTree,
    ctx: &[&[f64]],
    p: &EncoderParams,
) -> Result<(Vec<f64>, StatementCache)> {
    let d = p.dim();
    check_contexts(ctx, d)?;
    if tree.is_empty() {
        return Err(Error::EmptyInput("statement tree without nodes"));
    }
    let n = tree.len();
    let node_fusion = p.fusion == Fusion::Node;
    let mut x = Vec::with_capacity(n);
    let mut x_src = Vec::with_capacity(n);
    for &sym in &tree.symbols {
        let emb = p.embedding.row(sym);
        if node_fusion && !ctx.is_empty() {
            let mut inputs: Vec<&[f64]> = Vec::with_capacity(1 + ctx.len());
            inputs.push(emb);
            inputs.extend_from_slice(ctx);
            let pooled = max_pool(&inputs)?;
            x.push(pooled.values);
            x_src.push(pooled.argmax);
        } else {
            x.push(emb.to_vec());
            x_src.push(vec![0; d]);
        }
    }

    let rounds = p.rounds.max(1);
    let mut states: Vec<Vec<Vec<f64>>> = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let mut s: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let input = if r == 0 { &x[i] } else { &states[r - 1][i] };
            let mut pre = p.bias.values().to_vec();
            p.w_self.matvec_acc(input, &mut pre);
            for &c in &tree.children[i] {
                p.w_child.matvec_acc(&s[c], &mut pre);
            }
            s.push(pre.into_iter().map(f64::tanh).collect());
        }
        states.push(s);
    }
    let pooled = max_pool(states.last().expect("at least one round"))?;
    let (out, fused_arg) = if !node_fusion && !ctx.is_empty() {
        let mut inputs: Vec<&[f64]> = vec![&pooled.values];
        inputs.extend_from_slice(ctx);
        let fused = max_pool(&inputs)?;
        (fused.values, Some(fused.argmax))
    } else {
        (pooled.values, None)
    };
    Ok((
        out,
        StatementCache {
            x,
            x_src,
            states,
            pool_arg: pooled.argmax,
            fused_arg,
        },
    ))
}

/// Accumulates into `grads` and returns the gradient for each context vector.
pub fn statement_backward(
    tree: &CompiledTree,
    n_ctx: usize,
    cache: &StatementCache,
    dout: &[f64],
    p: &EncoderParams,
    grads: &mut EncoderParams,
) -> Vec<Vec<f64>> {
    let d = p.dim();
    let n = tree.len();
    let mut dctx = vec![vec![0.0; d]; n_ctx];
    let dpooled = match &cache.fused_arg {
        Some(arg) => {
            let routed = max_pool_backward(arg, dout, 1 + n_ctx);
            for (k, g) in routed.iter().enumerate().skip(1) {
                add_into(&mut dctx[k - 1], g);
            }
            routed.into_iter().next().expect("pooled slot")
        }
        None => dout.to_vec(),
    };

    let rounds = cache.states.len();
    let mut ds = max_pool_backward(&cache.pool_arg, &dpooled, n);
    for r in (0..rounds).rev() {
        let s = &cache.states[r];
        let mut d_in = vec![vec![0.0; d]; n];
        for i in (0..n).rev() {
            let dpre: Vec<f64> = ds[i]
                .iter()
                .zip(&s[i])
                .map(|(g, v)| g * (1.0 - v * v))
                .collect();
            let input = if r == 0 { &cache.x[i] } else { &cache.states[r - 1][i] };
            grads.w_self.add_outer(&dpre, input);
            add_into(grads.bias.values_mut(), &dpre);
            p.w_self.matvec_t_acc(&dpre, &mut d_in[i]);
            for &c in &tree.children[i] {
                grads.w_child.add_outer(&dpre, &s[c]);
                let mut dc = vec![0.0; d];
                p.w_child.matvec_t_acc(&dpre, &mut dc);
                add_into(&mut ds[c], &dc);
            }
        }
        ds = d_in;
    }

    // `ds` now holds gradients of the round-0 node inputs.
    for (i, dx) in ds.iter().enumerate() {
        let sym = tree.symbols[i];
        let src = &cache.x_src[i];
        let emb_row = grads.embedding.row_mut(sym);
        for j in 0..d {
            match src[j] {
                0 => emb_row[j] += dx[j],
                k => dctx[k - 1][j] += dx[j],
            }
        }
    }
    dctx
}

/// Encode one statement tree given the context vectors in scope.
pub fn encode_statement(
    tree: &StatementTree,
    contexts: &[ContextVector],
    params: &EncoderParams,
    vocab: &Vocabulary,
) -> Result<Vec<f64>> {
    let compiled = CompiledTree::compile(&tree.root, vocab);
    let ctx: Vec<&[f64]> = contexts.iter().map(|c| c.values.as_slice()).collect();
    statement_forward(&compiled, &ctx, params).map(|(v, _)| v)
}

#[derive(Debug, Clone)]
pub struct CodeCache {
    fwd: Vec<GruCache>,
    bwd: Vec<GruCache>,
    pool_arg: Vec<usize>,
}

pub fn code_forward(stmts: &[Vec<f64>], p: &EncoderParams) -> Result<(Vec<f64>, CodeCache)> {
    if stmts.is_empty() {
        return Err(Error::EmptyInput("encode_code needs at least one statement"));
    }
    let h = p.hidden();
    let t_len = stmts.len();
    let mut fwd_states = Vec::with_capacity(t_len);
    let mut fwd_caches = Vec::with_capacity(t_len);
    let mut state = vec![0.0; h];
    for v in stmts {
        let (next, cache) = gru_step(v, &state, &p.fwd)?;
        fwd_caches.push(cache);
        fwd_states.push(next.clone());
        state = next;
    }
    let mut bwd_states = vec![Vec::new(); t_len];
    let mut bwd_caches: Vec<Option<GruCache>> = vec![None; t_len];
    let mut state = vec![0.0; h];
    for t in (0..t_len).rev() {
        let (next, cache) = gru_step(&stmts[t], &state, &p.bwd)?;
        bwd_caches[t] = Some(cache);
        bwd_states[t] = next.clone();
        state = next;
    }
    let steps: Vec<Vec<f64>> = fwd_states
        .iter()
        .zip(&bwd_states)
        .map(|(f, b)| f.iter().chain(b).copied().collect())
        .collect();
    let pooled = max_pool(&steps)?;
    Ok((
        pooled.values,
        CodeCache {
            fwd: fwd_caches,
            bwd: bwd_caches.into_iter().map(|c| c.expect("filled")).collect(),
            pool_arg: pooled.argmax,
        },
    ))
}

/// Returns the gradient for each statement vector.
pub fn code_backward(
    cache: &CodeCache,
    dcode: &[f64],
    p: &EncoderParams,
    grads: &mut EncoderParams,
) -> Vec<Vec<f64>> {
    let h = p.hidden();
    let t_len = cache.fwd.len();
    let dsteps = max_pool_backward(&cache.pool_arg, dcode, t_len);
    let mut dstmts = vec![vec![0.0; p.dim()]; t_len];

    let mut carry = vec![0.0; h];
    for t in (0..t_len).rev() {
        let mut g = dsteps[t][..h].to_vec();
        add_into(&mut g, &carry);
        let (dx, dh) = gru_step_backward(&p.fwd, &cache.fwd[t], &g, &mut grads.fwd);
        add_into(&mut dstmts[t], &dx);
        carry = dh;
    }
    let mut carry = vec![0.0; h];
    for t in 0..t_len {
        let mut g = dsteps[t][h..].to_vec();
        add_into(&mut g, &carry);
        let (dx, dh) = gru_step_backward(&p.bwd, &cache.bwd[t], &g, &mut grads.bwd);
        add_into(&mut dstmts[t], &dx);
        carry = dh;
    }
    dstmts
}

/// Encode a statement-vector sequence into a code vector of width `2h`.
pub fn encode_code(stmts: &[Vec<f64>], params: &EncoderParams) -> Result<Vec<f64>> {
    code_forward(stmts, params).map(|(v, _)| v)
}

/// A program ready for encoding: compiled statements plus raw contexts and
/// which statements each context applies to.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedUnit {
    pub trees: Vec<CompiledTree>,
    pub contexts: Vec<RawContext>,
    /// For each tree, indices into `contexts`.
    pub tree_contexts: Vec<Vec<usize>>,
}

impl PreparedUnit {
    pub fn new(trees: Vec<CompiledTree>, contexts: Vec<RawContext>) -> Self {
        let tree_contexts = (0..trees.len())
            .map(|t| {
                contexts
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.scope.applies_to(t))
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        PreparedUnit {
            trees,
            contexts,
            tree_contexts,
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnitCache {
    projected: Vec<Vec<f64>>,
    stmts: Vec<StatementCache>,
    code: CodeCache,
}

pub fn unit_forward(unit: &PreparedUnit, p: &EncoderParams) -> Result<(Vec<f64>, UnitCache)> {
    let projected = unit
        .contexts
        .iter()
        .map(|c| p.projection(c.channel).matvec(&c.features))
        .collect::<Result<Vec<_>>>()?;
    let mut vecs = Vec::with_capacity(unit.trees.len());
    let mut caches = Vec::with_capacity(unit.trees.len());
    for (tree, ctx_ids) in unit.trees.iter().zip(&unit.tree_contexts) {
        let ctx: Vec<&[f64]> = ctx_ids.iter().map(|&k| projected[k].as_slice()).collect();
        let (v, cache) = statement_forward(tree, &ctx, p)?;
        vecs.push(v);
        caches.push(cache);
    }
    let (code, code_cache) = code_forward(&vecs, p)?;
    Ok((
        code,
        UnitCache {
            projected,
            stmts: caches,
            code: code_cache,
        },
    ))
}

pub fn unit_backward(
    unit: &PreparedUnit,
    cache: &UnitCache,
    dcode: &[f64],
    p: &EncoderParams,
    grads: &mut EncoderParams,
) {
    let dstmts = code_backward(&cache.code, dcode, p, grads);
    let mut dproj = vec![vec![0.0; p.dim()]; cache.projected.len()];
    for (t, tree) in unit.trees.iter().enumerate() {
        let ids = &unit.tree_contexts[t];
        let dctx = statement_backward(tree, ids.len(), &cache.stmts[t], &dstmts[t], p, grads);
        for (&k, g) in ids.iter().zip(&dctx) {
            add_into(&mut dproj[k], g);
        }
    }
    for (ctx, g) in unit.contexts.iter().zip(&dproj) {
        grads.projection_mut(ctx.channel).add_outer(g, &ctx.features);
    }
}

pub fn encode_unit(unit: &PreparedUnit, p: &EncoderParams) -> Result<Vec<f64>> {
    unit_forward(unit, p).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::context::Scope;
    use crate::encode::split::split_statements;
    use crate::encode::vocab::build_vocab;
    use crate::ingest::parse_mini;
    use crate::nn::gradcheck::grad_check;
    use crate::nn::params::{flatten, unflatten};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(vocab: usize, dim: usize, hidden: usize) -> EncoderShape {
        EncoderShape {
            vocab,
            dim,
            hidden,
            bug_features: 10,
            pattern_features: 6,
        }
    }

    #[test]
    fn compile_is_postorder() {
        let src = "int f(){ x = a + 1; }";
        let ast = parse_mini(src).unwrap();
        let vocab = build_vocab(&[&ast], 1);
        let trees = split_statements(&ast);
        let c = CompiledTree::compile(&trees[1].root, &vocab);
        assert_eq!(c.len(), trees[1].root.size());
        for (i, kids) in c.children.iter().enumerate() {
            assert!(kids.iter().all(|&k| k < i));
        }
        assert_eq!(*c.symbols.last().unwrap(), vocab.kind("Assign"));
    }

    #[test]
    fn single_leaf_with_identity_self_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let leaf = AstNode::leaf("Identifier", "x");
        let vocab = build_vocab(&[&leaf], 1);
        let mut p = EncoderParams::random(shape(vocab.len(), 4, 3), &mut rng);
        p.w_self = Tensor::identity(4);
        p.bias.fill(0.0);
        let tree = StatementTree { root: leaf.clone() };
        let out = encode_statement(&tree, &[], &p, &vocab).unwrap();
        let expected: Vec<f64> = p.embedding.row(vocab.node(&leaf)).iter().map(|v| v.tanh()).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn empty_context_matches_pure_tree_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ast = parse_mini("int f(){ int a = b * 2; }").unwrap();
        let vocab = build_vocab(&[&ast], 1);
        let p = EncoderParams::random(shape(vocab.len(), 5, 3), &mut rng);
        let tree = &split_statements(&ast)[1];
        let a = encode_statement(tree, &[], &p, &vocab).unwrap();
        let b = encode_statement(&tree.clone(), &[], &p, &vocab).unwrap();
        assert_eq!(a, b);
        let bad = ContextVector {
            channel: Channel::Bug,
            scope: Scope::WholeUnit,
            values: vec![0.0; 4],
        };
        assert!(matches!(encode_statement(tree, &[bad], &p, &vocab), Err(Error::Shape(_))));
    }

    #[test]
    fn single_statement_code_is_both_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = EncoderParams::random(shape(10, 4, 3), &mut rng);
        let v = vec![0.3, -0.2, 0.9, 0.1];
        let code = encode_code(std::slice::from_ref(&v), &p).unwrap();
        let (hf, _) = gru_step(&v, &[0.0; 3], &p.fwd).unwrap();
        let (hb, _) = gru_step(&v, &[0.0; 3], &p.bwd).unwrap();
        let expected: Vec<f64> = hf.into_iter().chain(hb).collect();
        assert_eq!(code, expected);
        assert!(matches!(encode_code(&[], &p), Err(Error::EmptyInput(_))));
    }

    fn toy_unit(vocab: &Vocabulary, ast: &AstNode, rng: &mut ChaCha8Rng) -> PreparedUnit {
        let trees: Vec<_> = split_statements(ast)
            .iter()
            .map(|t| CompiledTree::compile(&t.root, vocab))
            .collect();
        let mut bug = vec![0.0; 10];
        bug[0] = 3.0;
        bug[4] = 1.0;
        let mut pat = vec![0.0; 6];
        pat[2] = 1.0;
        let _ = rng;
        PreparedUnit::new(
            trees,
            vec![
                RawContext {
                    channel: Channel::Bug,
                    scope: Scope::Statement(1),
                    features: bug,
                },
                RawContext {
                    channel: Channel::Pattern,
                    scope: Scope::WholeUnit,
                    features: pat,
                },
            ],
        )
    }

    fn end_to_end_check(fusion: Fusion, rounds: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ast = parse_mini("int f(){ int a = 1; a = a * 3; }").unwrap();
        assert_eq!(split_statements(&ast).len(), 4);
        let vocab = build_vocab(&[&ast], 1);
        let mut p = EncoderParams::random(shape(vocab.len(), 4, 3), &mut rng);
        p.fusion = fusion;
        p.rounds = rounds;
        let unit = toy_unit(&vocab, &ast, &mut rng);
        let probe: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let point = flatten(&p);
        grad_check(
            |v| {
                let mut params = p.clone();
                unflatten(&mut params, v);
                let (code, cache) = unit_forward(&unit, &params).unwrap();
                let loss = code.iter().zip(&probe).map(|(a, b)| a * b).sum();
                let mut grads = params.zeros_like();
                unit_backward(&unit, &cache, &probe, &params, &mut grads);
                (loss, flatten(&grads))
            },
            &point,
            1e-5,
        )
    }

    #[test]
    fn end_to_end_gradients_node_fusion() {
        let err = end_to_end_check(Fusion::Node, 1);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn end_to_end_gradients_statement_fusion_two_rounds() {
        let err = end_to_end_check(Fusion::Statement, 2);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn fused_inputs_dominate_embeddings() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ast = parse_mini("int f(){ int a = 1; }").unwrap();
        let vocab = build_vocab(&[&ast], 1);
        let p = EncoderParams::random(shape(vocab.len(), 6, 3), &mut rng);
        let tree = CompiledTree::compile(&split_statements(&ast)[1].root, &vocab);
        let ctx = vec![0.1, -0.3, 0.7, 0.0, 0.2, -0.9];
        let (_, cache) = statement_forward(&tree, &[&ctx], &p).unwrap();
        for (i, &sym) in tree.symbols.iter().enumerate() {
            for (x, e) in cache.x[i].iter().zip(p.embedding.row(sym)) {
                assert!(x >= e);
            }
        }
    }
}
