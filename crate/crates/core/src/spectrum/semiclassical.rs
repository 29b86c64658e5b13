//! Harmonic approximations of `x² + (i/ε) f(x)` at the origin and at the
//! complex outer critical points `±z_ε`, for `f(x) = (1 + x²)^{-k/2}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Potential, PotentialKind};

/// Which quadratic approximation produces the smaller real part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `μₙ⁰`, modes localized at `x = 0`.
    Origin,
    /// `νₙ⁰`, modes localized near `±z_ε`.
    Outer,
}

/// Principal-branch predictions `μₙ⁰ = i/ε + (2n+1) ω_ε` and `νₙ⁰ = D_ε + (2n+1) Ω_ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalPrediction {
    pub k: f64,
    pub epsilon: f64,
    pub omega_eps: Complex64,
    pub z_eps: Complex64,
    pub d_eps: Complex64,
    pub big_omega_eps: Complex64,
    pub mu: Vec<Complex64>,
    pub nu: Vec<Complex64>,
}

impl SemiclassicalPrediction {
    pub fn new(k: f64, epsilon: f64, n_max: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Unsupported(format!("semiclassical predictions need k > 0 and ε > 0 (k = {k}, ε = {epsilon})")));
        }
        let i = Complex64::i();
        let nu_exp = 2.0 / (k + 2.0);
        let base = i * (k / (2.0 * epsilon));
        let w = base.powf(nu_exp);
        let omega_eps = (1.0 - base).sqrt();
        let z_eps = (w - 1.0).sqrt();
        let d_eps = w * ((k + 2.0) / k) - 1.0;
        let big_omega_eps = ((1.0 - base.inv().powf(nu_exp)) * (k + 2.0)).sqrt();
        let ladder = |start: Complex64, step: Complex64| (0..=n_max).map(|n| start + step * (2 * n + 1) as f64).collect();
        Ok(Self {
            k,
            epsilon,
            omega_eps,
            z_eps,
            d_eps,
            big_omega_eps,
            mu: ladder(i / epsilon, omega_eps),
            nu: ladder(d_eps, big_omega_eps),
        })
    }

    /// Relative residuals of `D_ε = z_ε² + (i/ε) f(z_ε)` and
    /// `Ω_ε² = (k+2) z_ε² / (1 + z_ε²)`, with `f` continued as `(1 + z²)^{-k/2}`.
    pub fn identity_residuals(&self) -> (f64, f64) {
        let z2 = self.z_eps * self.z_eps;
        let f = (1.0 + z2).powf(-self.k / 2.0);
        let d = z2 + Complex64::i() * f / self.epsilon;
        let o2 = z2 * (self.k + 2.0) / (1.0 + z2);
        let om2 = self.big_omega_eps * self.big_omega_eps;
        ((d - self.d_eps).norm() / self.d_eps.norm(), (o2 - om2).norm() / om2.norm())
    }

    /// Branch attaining `min(Re μ₀⁰, Re ν₀⁰)` and that value.
    pub fn minimum(&self) -> (Branch, f64) {
        let (m, n) = (self.mu[0].re, self.nu[0].re);
        if m <= n {
            (Branch::Origin, m)
        } else {
            (Branch::Outer, n)
        }
    }

    /// Branch predicted to carry the spectral bound: the origin for `k ≤ 2`, the outer wells otherwise.
    pub fn expected_branch(&self) -> Branch {
        if self.k <= 2.0 {
            Branch::Origin
        } else {
            Branch::Outer
        }
    }
}

/// Predictions for a `PowerDecay` potential with `f(0) = 1` and `f''(0) = -k`.
pub fn semiclassical_predict(p: &Potential, epsilon: f64, n_max: usize) -> Result<SemiclassicalPrediction> {
    let PotentialKind::PowerDecay { k } = *p.kind() else {
        return Err(Error::Unsupported(format!("{} is not a power-decay potential", p.label())));
    };
    let f0 = p.eval(0.0, 0)?;
    let f2 = p.eval(0.0, 2)?;
    if (f0 - 1.0).abs() > 1e-14 || (f2 + k).abs() > 1e-12 * k.max(1.0) {
        return Err(Error::Unsupported(format!("{} is rescaled (f(0) = {f0}, f''(0) = {f2})", p.label())));
    }
    SemiclassicalPrediction::new(k, epsilon, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, re: f64, im: f64, rel: f64) -> bool {
        (a.re - re).abs() <= rel * re.abs() && (a.im - im).abs() <= rel * im.abs()
    }

    #[test]
    fn table_one_predictions() {
        let s = SemiclassicalPrediction::new(4.0, 2f64.powi(-18), 4).unwrap();
        assert!(close(s.mu[0], 512.0, 2.616e5, 1e-3));
        assert!(close(s.mu[4], 4608.0, 2.575e5, 1e-3));
        let published = [(106.18, 60.48), (111.06, 60.50), (115.93, 60.51), (120.80, 60.53), (125.67, 60.54)];
        for (v, &(re, im)) in s.nu.iter().zip(&published) {
            assert!(close(*v, re, im, 1e-3), "{v}");
        }
    }

    #[test]
    fn table_two_and_three_origin_modes() {
        let s = SemiclassicalPrediction::new(2.0, 2f64.powi(-12), 4).unwrap();
        assert!(close(s.mu[0], 45.26, 4050.0, 1e-3));
        assert!(close(s.nu[1], 95.48, 90.54, 1e-3));
        assert_eq!(s.minimum().0, Branch::Origin);
        let s = SemiclassicalPrediction::new(1.0, 2f64.powi(-12), 2).unwrap();
        assert!(close(s.mu[0], 32.00, 4064.0, 1e-3));
        assert!(close(s.nu[0], 242.63, 419.00, 1e-3));
        assert_eq!(s.expected_branch(), Branch::Origin);
    }

    #[test]
    fn ladders_are_arithmetic() {
        let s = SemiclassicalPrediction::new(3.0, 1e-3, 6).unwrap();
        for n in 0..=6 {
            let d = s.mu[n] - s.mu[0] - s.omega_eps * (2 * n) as f64;
            assert!(d.norm() <= 1e-12 * s.mu[n].norm());
        }
    }

    #[test]
    fn rejects_other_kinds() {
        assert!(semiclassical_predict(&Potential::double_bump(), 0.1, 2).is_err());
        assert!(semiclassical_predict(&Potential::power_decay(4.0).unwrap().affine(2.0, 0.0), 0.1, 2).is_err());
        assert!(semiclassical_predict(&Potential::power_decay(4.0).unwrap(), 0.1, 2).is_ok());
    }
}
