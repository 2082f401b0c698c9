//! Gated recurrent unit with reset applied before the candidate's recurrent map:
//!
//! ```text
//! z  = σ(W_z x + U_z h + b_z)
//! r  = σ(W_r x + U_r h + b_r)
//! n  = tanh(W_n x + U_n (r ⊙ h) + b_n)
//! h' = (1 − z) ⊙ n + z ⊙ h
//! ```

use rand::Rng;

use super::ops::sigmoid;
use super::params::Params;
use super::tensor::{add_into, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub w_z: Tensor,
    pub u_z: Tensor,
    pub b_z: Tensor,
    pub w_r: Tensor,
    pub u_r: Tensor,
    pub b_r: Tensor,
    pub w_n: Tensor,
    pub u_n: Tensor,
    pub b_n: Tensor,
}

impl GruParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        let w = || Tensor::zeros(&[hidden, input]);
        let u = || Tensor::zeros(&[hidden, hidden]);
        let b = || Tensor::zeros(&[hidden]);
        GruParams {
            w_z: w(),
            u_z: u(),
            b_z: b(),
            w_r: w(),
            u_r: u(),
            b_r: b(),
            w_n: w(),
            u_n: u(),
            b_n: b(),
        }
    }

    /// Uniform in `±1/√hidden`.
    pub fn random<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let mut p = Self::zeros(input, hidden);
        let scale = 1.0 / (hidden as f64).sqrt();
        p.visit_mut("", &mut |_, t| *t = Tensor::uniform(t.shape(), scale, rng));
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w_z.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_z.rows()
    }
}

impl Params for GruParams {
    fn visit(&self, prefix: &str, f: &mut dyn FnMut(String, &Tensor)) {
        for (name, t) in [
            ("w_z", &self.w_z),
            ("u_z", &self.u_z),
            ("b_z", &self.b_z),
            ("w_r", &self.w_r),
            ("u_r", &self.u_r),
            ("b_r", &self.b_r),
            ("w_n", &self.w_n),
            ("u_n", &self.u_n),
            ("b_n", &self.b_n),
        ] {
            f(format!("{prefix}{name}"), t);
        }
    }

    fn visit_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Tensor)) {
        for (name, t) in [
            ("w_z", &mut self.w_z),
            ("u_z", &mut self.u_z),
            ("b_z", &mut self.b_z),
            ("w_r", &mut self.w_r),
            ("u_r", &mut self.u_r),
            ("b_r", &mut self.b_r),
            ("w_n", &mut self.w_n),
            ("u_n", &mut self.u_n),
            ("b_n", &mut self.b_n),
        ] {
            f(format!("{prefix}{name}"), t);
        }
    }
}

/// Activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct GruCache {
    x: Vec<f64>,
    h: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    n: Vec<f64>,
    rh: Vec<f64>,
}

pub fn gru_step(x: &[f64], h: &[f64], p: &GruParams) -> Result<(Vec<f64>, GruCache)> {
    let (d, hd) = (p.input_dim(), p.hidden_dim());
    if x.len() != d || h.len() != hd {
        return Err(Error::Shape(format!(
            "gru_step expects x[{d}] and h[{hd}], got x[{}] and h[{}]",
            x.len(),
            h.len()
        )));
    }
    let gate = |w: &Tensor, u: &Tensor, b: &Tensor, hh: &[f64]| -> Vec<f64> {
        let mut a = b.values().to_vec();
        w.matvec_acc(x, &mut a);
        u.matvec_acc(hh, &mut a);
        a
    };
    let z: Vec<f64> = gate(&p.w_z, &p.u_z, &p.b_z, h).into_iter().map(sigmoid).collect();
    let r: Vec<f64> = gate(&p.w_r, &p.u_r, &p.b_r, h).into_iter().map(sigmoid).collect();
    let rh: Vec<f64> = r.iter().zip(h).map(|(a, b)| a * b).collect();
    let n: Vec<f64> = gate(&p.w_n, &p.u_n, &p.b_n, &rh).into_iter().map(f64::tanh).collect();
    let h_new = (0..hd).map(|i| (1.0 - z[i]) * n[i] + z[i] * h[i]).collect();
    Ok((
        h_new,
        GruCache {
            x: x.to_vec(),
            h: h.to_vec(),
            z,
            r,
            n,
            rh,
        },
    ))
}

/// Accumulates parameter gradients into `grads`; returns `(dx, dh)`.
pub fn gru_step_backward(
    p: &GruParams,
    cache: &GruCache,
    dh_new: &[f64],
    grads: &mut GruParams,
) -> (Vec<f64>, Vec<f64>) {
    let hd = dh_new.len();
    let GruCache { x, h, z, r, n, rh } = cache;
    let mut dx = vec![0.0; x.len()];
    let mut dh: Vec<f64> = (0..hd).map(|i| dh_new[i] * z[i]).collect();

    let da_n: Vec<f64> = (0..hd)
        .map(|i| dh_new[i] * (1.0 - z[i]) * (1.0 - n[i] * n[i]))
        .collect();
    grads.w_n.add_outer(&da_n, x);
    grads.u_n.add_outer(&da_n, rh);
    add_into(grads.b_n.values_mut(), &da_n);
    p.w_n.matvec_t_acc(&da_n, &mut dx);
    let drh = p.u_n.matvec_t(&da_n);

    let da_r: Vec<f64> = (0..hd)
        .map(|i| drh[i] * h[i] * r[i] * (1.0 - r[i]))
        .collect();
    for i in 0..hd {
        dh[i] += drh[i] * r[i];
    }
    let da_z: Vec<f64> = (0..hd)
        .map(|i| dh_new[i] * (h[i] - n[i]) * z[i] * (1.0 - z[i]))
        .collect();

    for (da, w, u, gw, gu, gb) in [
        (&da_r, &p.w_r, &p.u_r, &mut grads.w_r, &mut grads.u_r, &mut grads.b_r),
        (&da_z, &p.w_z, &p.u_z, &mut grads.w_z, &mut grads.u_z, &mut grads.b_z),
    ] {
        gw.add_outer(da, x);
        gu.add_outer(da, h);
        add_into(gb.values_mut(), da);
        w.matvec_t_acc(da, &mut dx);
        u.matvec_t_acc(da, &mut dh);
    }
    (dx, dh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck::grad_check;
    use crate::nn::params::{flatten, unflatten};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_params_fix_zero_state() {
        let p = GruParams::zeros(3, 4);
        let (h, _) = gru_step(&[0.3, -2.0, 1.0], &[0.0; 4], &p).unwrap();
        assert_eq!(h, [0.0; 4]);
    }

    #[test]
    fn outputs_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = GruParams::random(5, 6, &mut rng);
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let h: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.99..0.99)).collect();
        let (out, _) = gru_step(&x, &h, &p).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn shape_errors() {
        let p = GruParams::zeros(3, 2);
        assert!(matches!(gru_step(&[0.0; 2], &[0.0; 2], &p), Err(Error::Shape(_))));
        assert!(matches!(gru_step(&[0.0; 3], &[0.0; 3], &p), Err(Error::Shape(_))));
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (d, hd) = (3, 4);
        let p = GruParams::random(d, hd, &mut rng);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h: Vec<f64> = (0..hd).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let probe: Vec<f64> = (0..hd).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut point = x.clone();
        point.extend(&h);
        point.extend(flatten(&p));
        let err = grad_check(
            |v| {
                let (x, rest) = v.split_at(d);
                let (h, pv) = rest.split_at(hd);
                let mut params = p.clone();
                unflatten(&mut params, pv);
                let (out, cache) = gru_step(x, h, &params).unwrap();
                let loss = out.iter().zip(&probe).map(|(a, b)| a * b).sum();
                let mut g = GruParams::zeros(d, hd);
                let (dx, dh) = gru_step_backward(&params, &cache, &probe, &mut g);
                let mut grad = dx;
                grad.extend(dh);
                grad.extend(flatten(&g));
                (loss, grad)
            },
            &point,
            1e-5,
        );
        assert!(err < 1e-4, "{err}");
    }
}
