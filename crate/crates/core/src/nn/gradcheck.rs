/// Compare an analytic gradient with central differences.
///
/// `f` returns the scalar value and its analytic gradient at a point. The result
/// is `max_i |g_a - g_n| / max(1, |g_a|, |g_n|)` over all coordinates.
pub fn grad_check<F>(mut f: F, point: &[f64], eps: f64) -> f64
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let (_, analytic) = f(point);
    assert_eq!(analytic.len(), point.len(), "gradient length must match the point");
    let mut x = point.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + eps;
        let (plus, _) = f(&x);
        x[i] = orig - eps;
        let (minus, _) = f(&x);
        x[i] = orig;
        let numeric = (plus - minus) / (2.0 * eps);
        let a = analytic[i];
        let err = (a - numeric).abs() / 1f64.max(a.abs()).max(numeric.abs());
        worst = worst.max(err);
    }
    worst
}

/// Default step for [`grad_check`].
pub const GRAD_CHECK_EPS: f64 = 1e-5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_wrong_gradient() {
        let good = grad_check(|x| (x[0] * x[0], vec![2.0 * x[0]]), &[1.3], GRAD_CHECK_EPS);
        let bad = grad_check(|x| (x[0] * x[0], vec![3.0 * x[0]]), &[1.3], GRAD_CHECK_EPS);
        assert!(good < 1e-8);
        assert!(bad > 0.1);
    }
}
