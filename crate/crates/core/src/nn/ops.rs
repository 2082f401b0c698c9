//! Differentiable kernels with hand-written backward passes.

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// `y = W x + b`
pub fn affine(x: &[f64], w: &Tensor, b: &[f64]) -> Result<Vec<f64>> {
    let mut y = w.matvec(x)?;
    if b.len() != y.len() {
        return Err(Error::Shape(format!(
            "affine bias of length {} for output of length {}",
            b.len(),
            y.len()
        )));
    }
    for (yi, bi) in y.iter_mut().zip(b) {
        *yi += bi;
    }
    Ok(y)
}

pub struct AffineGrads {
    pub dx: Vec<f64>,
    pub dw: Tensor,
    pub db: Vec<f64>,
}

pub fn affine_backward(x: &[f64], w: &Tensor, dy: &[f64]) -> AffineGrads {
    let mut dw = w.zeros_like();
    dw.add_outer(dy, x);
    AffineGrads {
        dx: w.matvec_t(dy),
        dw,
        db: dy.to_vec(),
    }
}

/// Elementwise maximum with the index of the winning input per component.
/// Ties go to the earliest input.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub values: Vec<f64>,
    pub argmax: Vec<usize>,
}

pub fn max_pool<V: AsRef<[f64]>>(vs: &[V]) -> Result<Pooled> {
    let first = vs.first().ok_or(Error::EmptyInput("max_pool needs at least one vector"))?;
    let d = first.as_ref().len();
    let mut values = first.as_ref().to_vec();
    let mut argmax = vec![0; d];
    for (i, v) in vs.iter().enumerate().skip(1) {
        let v = v.as_ref();
        if v.len() != d {
            return Err(Error::Shape(format!(
                "max_pool input {i} has length {} (expected {d})",
                v.len()
            )));
        }
        for j in 0..d {
            if v[j] > values[j] {
                values[j] = v[j];
                argmax[j] = i;
            }
        }
    }
    Ok(Pooled { values, argmax })
}

/// Route `dy` to the winning inputs; returns one gradient per input.
pub fn max_pool_backward(argmax: &[usize], dy: &[f64], n_inputs: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; dy.len()]; n_inputs];
    for (j, (&src, &g)) in argmax.iter().zip(dy).enumerate() {
        out[src][j] += g;
    }
    out
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Max-shifted softmax cross-entropy and its gradient with respect to the logits.
pub fn softmax_xent(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
    if label >= logits.len() {
        return Err(Error::LabelRange(vec![format!(
            "label {label} with {} classes",
            logits.len()
        )]));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_total = logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    let loss = log_total - (logits[label] - max);
    let mut grad = softmax(logits);
    grad[label] -= 1.0;
    Ok((loss, grad))
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy computed from the logit, stable for large magnitudes.
pub fn bce_with_logit(logit: f64, target: f64) -> f64 {
    logit.max(0.0) - logit * target + (-logit.abs()).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::grad_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn affine_examples() {
        let y = affine(&[3.0, -1.0], &Tensor::identity(2), &[0.0, 0.0]).unwrap();
        assert_eq!(y, [3.0, -1.0]);
        let w = Tensor::matrix(1, 2, vec![1.0, 1.0]).unwrap();
        assert_eq!(affine(&[2.0, 3.0], &w, &[1.0]).unwrap(), [6.0]);
        assert!(matches!(affine(&[2.0], &w, &[1.0]), Err(Error::Shape(_))));
        assert!(matches!(affine(&[2.0, 3.0], &w, &[1.0, 2.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn affine_gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (m, n) = (4, 3);
        let point: Vec<f64> = (0..n + m * n + m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let probe: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let err = grad_check(
            |p| {
                let (x, rest) = p.split_at(n);
                let (wv, b) = rest.split_at(m * n);
                let w = Tensor::matrix(m, n, wv.to_vec()).unwrap();
                let y = affine(x, &w, b).unwrap();
                let loss = y.iter().zip(&probe).map(|(a, b)| a * b).sum();
                let g = affine_backward(x, &w, &probe);
                let mut grad = g.dx;
                grad.extend_from_slice(g.dw.values());
                grad.extend(g.db);
                (loss, grad)
            },
            &point,
            1e-5,
        );
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn max_pool_examples() {
        let p = max_pool(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(p.values, [3.0, 2.0]);
        assert_eq!(p.argmax, [1, 0]);
        let v = vec![0.5, -2.0, 7.0];
        assert_eq!(max_pool(&[v.clone()]).unwrap().values, v);
        assert!(matches!(max_pool::<Vec<f64>>(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(max_pool(&[vec![1.0], vec![1.0, 2.0]]), Err(Error::Shape(_))));
    }

    #[test]
    fn max_pool_ties_route_to_first() {
        let p = max_pool(&[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(p.argmax, [0]);
        let g = max_pool_backward(&p.argmax, &[2.0], 2);
        assert_eq!(g, [vec![2.0], vec![0.0]]);
    }

    #[test]
    fn max_pool_gradients_at_untied_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (k, d) = (4, 5);
        // Spread values on a coarse grid plus jitter so no component is within eps of a tie.
        let point: Vec<f64> = (0..k * d)
            .map(|i| (i as f64 * 7.0 % 13.0) + rng.gen_range(0.0..0.1))
            .collect();
        let probe: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let err = grad_check(
            |p| {
                let vs: Vec<&[f64]> = p.chunks(d).collect();
                let pooled = max_pool(&vs).unwrap();
                let loss = pooled.values.iter().zip(&probe).map(|(a, b)| a * b).sum();
                let grads = max_pool_backward(&pooled.argmax, &probe, k);
                (loss, grads.concat())
            },
            &point,
            1e-5,
        );
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn softmax_xent_examples() {
        let (loss, grad) = softmax_xent(&[0.3; 4], 2).unwrap();
        assert!((loss - 4f64.ln()).abs() < 1e-12);
        assert!((grad.iter().sum::<f64>()).abs() < 1e-12);
        let (loss, grad) = softmax_xent(&[1000.0, 0.0], 0).unwrap();
        assert!(loss.is_finite() && loss.abs() < 1e-12);
        assert!(grad.iter().all(|g| g.is_finite()));
        assert!(matches!(softmax_xent(&[1.0, 2.0], 2), Err(Error::LabelRange(_))));
    }

    #[test]
    fn softmax_xent_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let logits: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let err = grad_check(|l| softmax_xent(l, 4).unwrap(), &logits, 1e-5);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn sigmoid_and_bce_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(-800.0) >= 0.0);
        assert!(bce_with_logit(800.0, 1.0).abs() < 1e-12);
        assert!((bce_with_logit(0.0, 1.0) - 2f64.ln()).abs() < 1e-12);
        let err = grad_check(
            |x| (bce_with_logit(x[0], 0.3), vec![sigmoid(x[0]) - 0.3]),
            &[0.7],
            1e-5,
        );
        assert!(err < 1e-8);
    }
}
