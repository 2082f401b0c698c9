use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major array of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Tensor {
            shape: shape.to_vec(),
            values: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], values: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "{} values for shape {shape:?} (needs {expected})",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite value in tensor".into()));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            values,
        })
    }

    pub fn vector(values: Vec<f64>) -> Self {
        Tensor {
            shape: vec![values.len()],
            values,
        }
    }

    pub fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::from_vec(&[rows, cols], values)
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Tensor::zeros(&[n, n]);
        for i in 0..n {
            t.values[i * n + i] = 1.0;
        }
        t
    }

    /// Uniform entries in `[-scale, scale)`.
    pub fn uniform<R: Rng>(shape: &[usize], scale: f64, rng: &mut R) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            values: (0..n).map(|_| rng.gen_range(-scale..scale)).collect(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Tensor::zeros(&self.shape)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn rows(&self) -> usize {
        self.shape.first().copied().unwrap_or(0)
    }

    pub fn cols(&self) -> usize {
        if self.shape.len() >= 2 {
            self.shape[1..].iter().product()
        } else {
            1
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.values[i * c..(i + 1) * c]
    }

    pub fn fill(&mut self, v: f64) {
        self.values.iter_mut().for_each(|x| *x = v);
    }

    fn check_matrix(&self, x_len: usize, what: &str) -> Result<()> {
        if self.shape.len() != 2 || self.shape[1] != x_len {
            return Err(Error::Shape(format!(
                "{what}: matrix {:?} against vector of length {x_len}",
                self.shape
            )));
        }
        Ok(())
    }

    /// `W x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_matrix(x.len(), "matvec")?;
        Ok(self.matvec_unchecked(x))
    }

    pub(crate) fn matvec_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let c = x.len();
        self.values
            .chunks_exact(c)
            .map(|row| dot(row, x))
            .collect()
    }

    /// `y += W x`
    pub(crate) fn matvec_acc(&self, x: &[f64], y: &mut [f64]) {
        let c = x.len();
        for (yi, row) in y.iter_mut().zip(self.values.chunks_exact(c)) {
            *yi += dot(row, x);
        }
    }

    /// `Wᵀ y`
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let c = self.cols();
        let mut out = vec![0.0; c];
        self.matvec_t_acc(y, &mut out);
        out
    }

    /// `out += Wᵀ y`
    pub(crate) fn matvec_t_acc(&self, y: &[f64], out: &mut [f64]) {
        let c = out.len();
        for (yi, row) in y.iter().zip(self.values.chunks_exact(c)) {
            if *yi != 0.0 {
                axpy(*yi, row, out);
            }
        }
    }

    /// `W += dy ⊗ x`
    pub(crate) fn add_outer(&mut self, dy: &[f64], x: &[f64]) {
        let c = x.len();
        for (d, row) in dy.iter().zip(self.values.chunks_exact_mut(c)) {
            if *d != 0.0 {
                axpy(*d, x, row);
            }
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Tensor) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub(crate) fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}
