//! Small quadrature helpers.

/// Tanh–sinh (double exponential) quadrature of `g` over `[0, len]`.
///
/// `g` receives the abscissa measured from the left end, so integrable
/// singularities at 0 such as `t^(k-1)` are sampled without cancellation.
pub fn tanh_sinh(g: impl Fn(f64) -> f64, len: f64) -> f64 {
    if len == 0.0 {
        return 0.0;
    }
    const STEP: f64 = 1.0 / 64.0;
    const T_MAX: f64 = 6.2;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut sum = 0.0;
    let steps = (T_MAX / STEP) as i64;
    for j in -steps..=steps {
        let t = j as f64 * STEP;
        let u = half_pi * t.sinh();
        // Left offset len/(1+e^{-2u}) and right offset len/(1+e^{2u}) are both exact.
        let left = len / (1.0 + (-2.0 * u).exp());
        if left <= 0.0 || left >= len {
            continue;
        }
        let cu = u.cosh();
        let w = len * half_pi * t.cosh() / (2.0 * cu * cu);
        if w == 0.0 || !w.is_finite() {
            continue;
        }
        let v = g(left);
        if v.is_finite() {
            sum += w * v;
        }
    }
    sum * STEP
}

/// Trapezoidal rule on a uniform grid for samples that vanish beyond both ends
/// (Dirichlet data), i.e. a plain Riemann sum times the spacing.
pub fn dirichlet_trapezoid(values: impl IntoIterator<Item = f64>, h: f64) -> f64 {
    values.into_iter().sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_and_singular_integrands() {
        assert!((tanh_sinh(|t| t.cos(), 1.0) - 1.0f64.sin()).abs() < 1e-14);
        // ∫₀¹ t^{-1/2} dt = 2
        assert!((tanh_sinh(|t| t.powf(-0.5), 1.0) - 2.0).abs() < 1e-12);
        // ∫₀¹ t^{-0.9} dt = 10
        assert!((tanh_sinh(|t| t.powf(-0.9), 1.0) - 10.0).abs() < 1e-9);
    }
}
