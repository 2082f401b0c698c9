use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encode::EncoderParams;
use crate::error::{Error, Result};
use crate::nn::ops::{sigmoid, softmax};
use crate::nn::params::Params;
use crate::nn::tensor::{dot, Tensor};
use crate::patterns::adaboost::argmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierHead {
    /// `classes × code_dim`.
    pub weight: Tensor,
    pub bias: Tensor,
}

impl ClassifierHead {
    pub fn zeros(classes: usize, code_dim: usize) -> Self {
        ClassifierHead {
            weight: Tensor::zeros(&[classes, code_dim]),
            bias: Tensor::zeros(&[classes]),
        }
    }

    pub fn random<R: Rng>(classes: usize, code_dim: usize, rng: &mut R) -> Self {
        let scale = (6.0 / (classes + code_dim) as f64).sqrt();
        ClassifierHead {
            weight: Tensor::uniform(&[classes, code_dim], scale, rng),
            bias: Tensor::zeros(&[classes]),
        }
    }

    pub fn classes(&self) -> usize {
        self.weight.rows()
    }

    pub fn logits(&self, code: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.weight.matvec(code)?;
        for (zi, b) in z.iter_mut().zip(self.bias.values()) {
            *zi += b;
        }
        Ok(z)
    }
}

/// Softmax over affine logits; the lowest index wins ties.
pub fn classify(code: &[f64], head: &ClassifierHead) -> Result<(usize, Vec<f64>)> {
    let probs = softmax(&head.logits(code)?);
    Ok((argmax(&probs), probs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneHead {
    pub weight: Tensor,
    /// One-element tensor.
    pub bias: Tensor,
    pub threshold: f64,
}

impl CloneHead {
    pub fn zeros(code_dim: usize, threshold: f64) -> Self {
        CloneHead {
            weight: Tensor::zeros(&[code_dim]),
            bias: Tensor::zeros(&[1]),
            threshold,
        }
    }

    pub fn random<R: Rng>(code_dim: usize, threshold: f64, rng: &mut R) -> Self {
        CloneHead {
            weight: Tensor::uniform(&[code_dim], (6.0 / (code_dim + 1) as f64).sqrt(), rng),
            bias: Tensor::zeros(&[1]),
            threshold,
        }
    }

    pub fn logit(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let w = self.weight.values();
        if a.len() != w.len() || b.len() != w.len() {
            return Err(Error::Shape(format!(
                "clone head expects vectors of width {}, got {} and {}",
                w.len(),
                a.len(),
                b.len()
            )));
        }
        let dist: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
        Ok(dot(w, &dist) + self.bias.values()[0])
    }
}

/// `σ(w·|a − b| + b)`.
pub fn clone_score(a: &[f64], b: &[f64], head: &CloneHead) -> Result<f64> {
    head.logit(a, b).map(sigmoid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Head {
    Classifier(ClassifierHead),
    Clone(CloneHead),
}

impl Head {
    fn tensors(&self) -> (&Tensor, &Tensor) {
        match self {
            Head::Classifier(h) => (&h.weight, &h.bias),
            Head::Clone(h) => (&h.weight, &h.bias),
        }
    }

    fn tensors_mut(&mut self) -> (&mut Tensor, &mut Tensor) {
        match self {
            Head::Classifier(h) => (&mut h.weight, &mut h.bias),
            Head::Clone(h) => (&mut h.weight, &mut h.bias),
        }
    }
}

/// Encoder plus task head, trained end to end.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskModel {
    pub encoder: EncoderParams,
    pub head: Head,
}

impl TaskModel {
    pub fn zeros_like(&self) -> Self {
        let mut g = self.clone();
        g.zero();
        g
    }
}

impl Params for TaskModel {
    fn visit(&self, prefix: &str, f: &mut dyn FnMut(String, &Tensor)) {
        self.encoder.visit(&format!("{prefix}encoder."), f);
        let (w, b) = self.head.tensors();
        f(format!("{prefix}head.weight"), w);
        f(format!("{prefix}head.bias"), b);
    }

    fn visit_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Tensor)) {
        self.encoder.visit_mut(&format!("{prefix}encoder."), f);
        let (w, b) = self.head.tensors_mut();
        f(format!("{prefix}head.weight"), w);
        f(format!("{prefix}head.bias"), b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_head_is_uniform() {
        let head = ClassifierHead::zeros(4, 6);
        let (label, p) = classify(&[0.3, -1.0, 2.0, 0.0, 1.0, 5.0], &head).unwrap();
        assert_eq!(label, 0);
        assert!(p.iter().all(|&x| x == 0.25));
    }

    #[test]
    fn probabilities_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let head = ClassifierHead::random(5, 8, &mut rng);
        let x: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let (_, p) = classify(&x, &head).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(matches!(classify(&x[..3], &head), Err(Error::Shape(_))));
    }

    #[test]
    fn identical_vectors_score_sigmoid_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut head = CloneHead::random(6, 0.5, &mut rng);
        head.bias.values_mut()[0] = 0.37;
        let a = [1.0, -2.0, 0.5, 3.0, 0.0, 9.0];
        assert_eq!(head.logit(&a, &a).unwrap(), 0.37);
        assert_eq!(clone_score(&a, &a, &head).unwrap(), sigmoid(0.37));
        assert!(matches!(clone_score(&a, &a[..2], &head), Err(Error::Shape(_))));
    }

    proptest! {
        #[test]
        fn clone_score_symmetric(
            a in prop::collection::vec(-1e3f64..1e3, 8),
            b in prop::collection::vec(-1e3f64..1e3, 8),
            seed in 0u64..1000,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let head = CloneHead::random(8, 0.5, &mut rng);
            let ab = clone_score(&a, &b, &head).unwrap();
            let ba = clone_score(&b, &a, &head).unwrap();
            prop_assert_eq!(ab.to_bits(), ba.to_bits());
        }
    }
}
