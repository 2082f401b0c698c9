//! Skip-gram token embeddings trained with negative sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::split::split_statements;
use super::vocab::Vocabulary;
use crate::ast::AstNode;
use crate::nn::ops::sigmoid;
use crate::nn::tensor::{axpy, dot, Tensor};

#[derive(Debug, Clone, Copy)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 128,
            window: 5,
            epochs: 5,
            negatives: 5,
            learning_rate: 0.025,
        }
    }
}

/// Per-program symbol sequences: statement trees in order, nodes in preorder.
pub fn symbol_sequences(corpus: &[&AstNode], vocab: &Vocabulary) -> Vec<Vec<usize>> {
    corpus
        .iter()
        .map(|ast| {
            split_statements(ast)
                .iter()
                .flat_map(|t| t.root.preorder().map(|n| vocab.node(n)).collect::<Vec<_>>())
                .collect()
        })
        .collect()
}

pub fn train_embeddings(
    corpus: &[&AstNode],
    vocab: &Vocabulary,
    config: &SkipGramConfig,
    seed: u64,
) -> Tensor {
    let seqs = symbol_sequences(corpus, vocab);
    train_skipgram(&seqs, vocab.len(), config, seed)
}

/// Input-side vectors after training. With zero epochs this is the seeded
/// initialization, uniform in `±0.5/dim`.
pub fn train_skipgram(
    sequences: &[Vec<usize>],
    vocab_size: usize,
    config: &SkipGramConfig,
    seed: u64,
) -> Tensor {
    let d = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut input = Tensor::uniform(&[vocab_size, d], 0.5 / d as f64, &mut rng);
    if config.epochs == 0 {
        return input;
    }
    let mut output = Tensor::zeros(&[vocab_size, d]);

    let mut freq = vec![0.0f64; vocab_size];
    for s in sequences {
        for &t in s {
            freq[t] += 1.0;
        }
    }
    let mut cumulative = Vec::with_capacity(vocab_size);
    let mut acc = 0.0;
    for f in &freq {
        acc += f.powf(0.75);
        cumulative.push(acc);
    }
    if acc == 0.0 {
        return input;
    }

    let total_steps = (config.epochs * freq.iter().sum::<f64>() as usize).max(1) as f64;
    let mut done = 0.0;
    let mut grad_in = vec![0.0; d];
    for _ in 0..config.epochs {
        for seq in sequences {
            for (i, &center) in seq.iter().enumerate() {
                let lr = (config.learning_rate * (1.0 - done / total_steps)).max(config.learning_rate * 1e-4);
                done += 1.0;
                let reach = rng.gen_range(1..=config.window.max(1));
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(seq.len() - 1);
                for (j, &ctx) in seq.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    grad_in.iter_mut().for_each(|g| *g = 0.0);
                    for k in 0..=config.negatives {
                        let (target, label) = if k == 0 {
                            (ctx, 1.0)
                        } else {
                            let r = rng.gen_range(0.0..acc);
                            let t = cumulative.partition_point(|c| *c <= r).min(vocab_size - 1);
                            if t == ctx {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let score = sigmoid(dot(input.row(center), output.row(target)));
                        let g = (label - score) * lr;
                        axpy(g, output.row(target), &mut grad_in);
                        let center_row = input.row(center).to_vec();
                        axpy(g, &center_row, output.row_mut(target));
                    }
                    let row = input.row_mut(center);
                    for (r, g) in row.iter_mut().zip(&grad_in) {
                        *r += g;
                    }
                }
            }
        }
    }
    input
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}
