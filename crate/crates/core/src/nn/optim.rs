use std::collections::BTreeMap;

use super::params::{ParamSet, Params};
use super::tensor::Tensor;

/// Adam with bias correction. State is keyed by parameter name.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: BTreeMap<String, Vec<f64>>,
    v: BTreeMap<String, Vec<f64>>,
}

impl Default for Adam {
    fn default() -> Self {
        Adam::new(1e-3, (0.9, 0.999))
    }
}

impl Adam {
    pub fn new(lr: f64, betas: (f64, f64)) -> Self {
        Adam {
            lr,
            beta1: betas.0,
            beta2: betas.1,
            eps: 1e-8,
            step: 0,
            m: BTreeMap::new(),
            v: BTreeMap::new(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Update `params` in place from matching-layout `grads`.
    pub fn step<P: Params>(&mut self, params: &mut P, grads: &P) {
        let mut gs: Vec<Tensor> = Vec::new();
        grads.visit("", &mut |_, g| gs.push(g.clone()));
        self.step += 1;
        let mut i = 0;
        params.visit_mut("", &mut |name, t| {
            self.update(&name, t, &gs[i]);
            i += 1;
        });
    }

    /// Update a [`ParamSet`] from its own gradient accumulators.
    pub fn step_set(&mut self, params: &mut ParamSet) {
        self.step += 1;
        let ParamSet { values, grads } = params;
        for (name, t) in values.iter_mut() {
            if let Some(g) = grads.get(name) {
                self.update(name, t, g);
            }
        }
    }

    fn update(&mut self, name: &str, param: &mut Tensor, grad: &Tensor) {
        let n = param.len();
        let m = self.m.entry(name.to_string()).or_insert_with(|| vec![0.0; n]);
        let v = self.v.entry(name.to_string()).or_insert_with(|| vec![0.0; n]);
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for ((p, g), (mi, vi)) in param
            .values_mut()
            .iter_mut()
            .zip(grad.values())
            .zip(m.iter_mut().zip(v.iter_mut()))
        {
            *mi = self.beta1 * *mi + (1.0 - self.beta1) * g;
            *vi = self.beta2 * *vi + (1.0 - self.beta2) * g * g;
            let m_hat = *mi / bc1;
            let v_hat = *vi / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradients_leave_parameters() {
        let mut ps = ParamSet::new();
        ps.insert("w", Tensor::vector(vec![1.5, -2.0])).unwrap();
        let before = ps.clone();
        let mut adam = Adam::default();
        for _ in 0..10 {
            adam.step_set(&mut ps);
        }
        assert_eq!(ps.values, before.values);
    }

    #[test]
    fn converges_on_quadratic() {
        // f(x) = (x - 3)^2, minimum at 3.
        let mut ps = ParamSet::new();
        ps.insert("x", Tensor::vector(vec![2.0])).unwrap();
        let mut adam = Adam::new(1e-2, (0.9, 0.999));
        for t in 1..=1000 {
            let x = ps.values["x"].values()[0];
            ps.grad_mut("x").unwrap().values_mut()[0] = 2.0 * (x - 3.0);
            adam.step_set(&mut ps);
            let x = ps.values["x"].values()[0];
            match t {
                1 => assert!((x - 2.00999999995).abs() < 1e-12, "x = {x}"),
                200 => assert!((x - 2.984427514682753).abs() < 1e-12, "x = {x}"),
                _ => {}
            }
        }
        let x = ps.values["x"].values()[0];
        assert!((x - 3.0).abs() < 1e-6, "x = {x}");
    }

    #[test]
    fn deterministic_runs() {
        let run = || {
            let mut ps = ParamSet::new();
            ps.insert("w", Tensor::vector(vec![0.1, 0.2, 0.3])).unwrap();
            let mut adam = Adam::default();
            for k in 0..50 {
                for (i, g) in ps.grad_mut("w").unwrap().values_mut().iter_mut().enumerate() {
                    *g = ((k * 7 + i) as f64).sin();
                }
                adam.step_set(&mut ps);
            }
            ps.values["w"].values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
