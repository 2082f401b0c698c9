use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Features tried per split; `None` means `ceil(sqrt(p))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 8,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        /// Fraction of positive training samples that reached this leaf.
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { positive } => return *positive,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

struct Grower<'a, R: Rng> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    max_depth: usize,
    max_features: usize,
    rng: &'a mut R,
}

impl<R: Rng> Grower<'_, R> {
    fn grow(&mut self, idx: &[usize], depth: usize) -> TreeNode {
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let leaf = TreeNode::Leaf {
            positive: pos as f64 / idx.len().max(1) as f64,
        };
        if depth >= self.max_depth || pos == 0 || pos == idx.len() {
            return leaf;
        }
        let p = self.x[0].len();
        let mut features = sample(self.rng, p, self.max_features.min(p)).into_vec();
        features.sort_unstable();
        let n = idx.len() as f64;
        let parent = gini(pos as f64, n);
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            let mut order: Vec<usize> = idx.to_vec();
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left_pos = 0.0;
            for k in 0..order.len() - 1 {
                if self.y[order[k]] {
                    left_pos += 1.0;
                }
                let (lo, hi) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if lo == hi {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let impurity = (nl * gini(left_pos, nl) + nr * gini(pos as f64 - left_pos, nr)) / n;
                if impurity < parent - 1e-12 && best.is_none_or(|(b, _, _)| impurity < b) {
                    best = Some((impurity, f, 0.5 * (lo + hi)));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return leaf;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        TreeNode::Split {
            feature,
            threshold,
            left: Box::new(self.grow(&l, depth + 1)),
            right: Box::new(self.grow(&r, depth + 1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<TreeNode>,
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[bool], cfg: ForestConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = x.len();
        let p = x.first().map_or(0, Vec::len);
        let max_features = cfg
            .max_features
            .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
            .max(1);
        let mut trees = Vec::with_capacity(cfg.n_trees);
        for _ in 0..cfg.n_trees {
            let idx: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let tree = if p == 0 || n == 0 {
                TreeNode::Leaf {
                    positive: y.iter().filter(|&&b| b).count() as f64 / n.max(1) as f64,
                }
            } else {
                Grower {
                    x,
                    y,
                    max_depth: cfg.max_depth,
                    max_features,
                    rng: &mut rng,
                }
                .grow(&idx, 0)
            };
            trees.push(tree);
        }
        RandomForest { trees }
    }

    /// Mean leaf positive fraction across trees.
    pub fn score(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.trees.iter().map(|t| t.score(x)).sum::<f64>() / self.trees.len() as f64
    }
}
