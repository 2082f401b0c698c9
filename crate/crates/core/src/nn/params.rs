use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Structured parameter containers expose their tensors by stable names.
pub trait Params {
    fn visit(&self, prefix: &str, f: &mut dyn FnMut(String, &Tensor));
    fn visit_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Tensor));

    fn zero(&mut self) {
        self.visit_mut("", &mut |_, t| t.fill(0.0));
    }

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.visit("", &mut |_, t| n += t.len());
        n
    }
}

/// All values concatenated in visit order.
pub fn flatten(p: &impl Params) -> Vec<f64> {
    let mut out = Vec::new();
    p.visit("", &mut |_, t| out.extend_from_slice(t.values()));
    out
}

/// Inverse of [`flatten`].
pub fn unflatten(p: &mut impl Params, values: &[f64]) {
    let mut offset = 0;
    p.visit_mut("", &mut |_, t| {
        let n = t.len();
        t.values_mut().copy_from_slice(&values[offset..offset + n]);
        offset += n;
    });
}

/// `dst += src`, matching tensors by position.
pub fn accumulate<P: Params>(dst: &mut P, src: &P) {
    let mut srcs = Vec::new();
    src.visit("", &mut |_, t| srcs.push(t.clone()));
    let mut i = 0;
    dst.visit_mut("", &mut |_, t| {
        t.add_assign(&srcs[i]);
        i += 1;
    });
}

pub fn scale_all(p: &mut impl Params, s: f64) {
    p.visit_mut("", &mut |_, t| t.scale(s));
}

/// Named tensors with matching gradient accumulators.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub values: BTreeMap<String, Tensor>,
    #[serde(skip)]
    pub grads: BTreeMap<String, Tensor>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor) -> Result<()> {
        let name = name.into();
        if self.values.contains_key(&name) {
            return Err(Error::Shape(format!("duplicate parameter name `{name}`")));
        }
        self.grads.insert(name.clone(), value.zeros_like());
        self.values.insert(name, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.values.get(name)
    }

    pub fn grad_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        if !self.grads.contains_key(name) {
            let t = self.values.get(name)?.zeros_like();
            self.grads.insert(name.to_string(), t);
        }
        self.grads.get_mut(name)
    }

    pub fn zero_grads(&mut self) {
        for g in self.grads.values_mut() {
            g.fill(0.0);
        }
    }

    pub fn from_params(p: &impl Params, prefix: &str) -> Self {
        let mut set = ParamSet::new();
        set.extend_from(p, prefix);
        set
    }

    pub fn extend_from(&mut self, p: &impl Params, prefix: &str) {
        p.visit(prefix, &mut |name, t| {
            self.grads.insert(name.clone(), t.zeros_like());
            self.values.insert(name, t.clone());
        });
    }

    /// Copy stored values into `p`, checking every name and shape.
    pub fn load_into(&self, p: &mut impl Params, prefix: &str) -> Result<()> {
        let mut err = None;
        p.visit_mut(prefix, &mut |name, t| {
            if err.is_some() {
                return;
            }
            match self.values.get(&name) {
                Some(v) if v.shape() == t.shape() => *t = v.clone(),
                Some(v) => {
                    err = Some(Error::Shape(format!(
                        "parameter `{name}` has shape {:?}, expected {:?}",
                        v.shape(),
                        t.shape()
                    )))
                }
                None => err = Some(Error::format_detail("params", format!("missing `{name}`"))),
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl Params for ParamSet {
    fn visit(&self, prefix: &str, f: &mut dyn FnMut(String, &Tensor)) {
        for (name, t) in &self.values {
            f(format!("{prefix}{name}"), t);
        }
    }

    fn visit_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Tensor)) {
        for (name, t) in self.values.iter_mut() {
            f(format!("{prefix}{name}"), t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_unique_and_grads_shaped() {
        let mut ps = ParamSet::new();
        ps.insert("w", Tensor::zeros(&[2, 3])).unwrap();
        assert!(ps.insert("w", Tensor::zeros(&[1])).is_err());
        assert_eq!(ps.grads["w"].shape(), &[2, 3]);
    }
}
