use num_complex::Complex64;

use super::lu::BandedLu;
use super::settings::SolverSettings;
use super::svd::{norm, random_unit, scale};
use crate::error::LinalgError;
use crate::model::ComplexBandedMatrix;

/// Approximate eigenpair with `residual = ‖A v − value · v‖₂` and `‖v‖₂ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    /// Eigenvalue condition number `‖w‖‖v‖ / |wᴴv|` (`w` the left eigenvector).
    pub condition: f64,
    /// First-order rounding bound on `value`: `condition · u · ‖ |A| |v| ‖`.
    pub error_estimate: f64,
}

/// Iterations at which the shift is moved to the current estimate.
const RESHIFT_AT: [usize; 2] = [3, 6];
/// Within the pseudospectrum the first iterates have tiny residuals at any shift,
/// so convergence is only tested after the last re-shift has taken effect.
const MIN_ITERS: usize = 8;
/// Below this `|vᵀv|` the complex-symmetric quotient loses more digits to cancellation
/// than the Hermitian quotient loses to linear convergence.
const SYMMETRIC_QUOTIENT_FLOOR: f64 = 1e-6;

fn dot_t(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn dot_h(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `‖ |A| |v| ‖₂`: scale of the componentwise backward error seen by `v`.
fn abs_action(a: &ComplexBandedMatrix, v: &[Complex64]) -> f64 {
    let n = a.n();
    let (sub, diag, sup) = (a.sub(), a.diag(), a.sup());
    let mut acc = 0.0;
    for i in 0..n {
        let mut t = diag[i].norm() * v[i].norm();
        if i > 0 {
            t += sub[i - 1].norm() * v[i - 1].norm();
        }
        if i + 1 < n {
            t += sup[i].norm() * v[i + 1].norm();
        }
        acc += t * t;
    }
    acc.sqrt()
}

fn residual(av: &[Complex64], v: &[Complex64], value: Complex64) -> f64 {
    av.iter().zip(v).map(|(y, x)| (y - x * value).norm_sqr()).sum::<f64>().sqrt()
}

struct Estimate {
    value: Complex64,
    residual: f64,
    condition: f64,
    noise: f64,
}

fn estimate(a: &ComplexBandedMatrix, v: &[Complex64], left: Option<&[Complex64]>) -> Estimate {
    let av = a.matvec(v);
    let (value, condition) = match left {
        None => {
            let vtv = dot_t(v, v);
            let cond = 1.0 / vtv.norm();
            let value = if vtv.norm() > SYMMETRIC_QUOTIENT_FLOOR { dot_t(v, &av) / vtv } else { dot_h(v, &av) };
            (value, cond)
        }
        Some(w) => {
            let wv = dot_h(w, v);
            (dot_h(v, &av), 1.0 / wv.norm())
        }
    };
    let noise = condition * f64::EPSILON * abs_action(a, v);
    Estimate { value, residual: residual(&av, v, value), condition, noise }
}

/// Inverse iteration from `shift`, re-shifted to the running estimate at fixed steps.
///
/// Converges when successive estimates differ by at most
/// `max(rel_tol·|λ|, 2·error_estimate)` (the second term is the rounding floor
/// of an ill-conditioned eigenvalue) and the residual has stopped halving.
/// Fails with `Divergence` otherwise.
pub fn shift_invert_refine(a: &ComplexBandedMatrix, shift: Complex64, settings: &SolverSettings) -> Result<EigenPair, LinalgError> {
    let n = a.n();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    let symmetric = a.is_complex_symmetric();
    let mut lu = BandedLu::factor(&a.shifted(shift))?;
    let mut v = random_unit(n, settings);
    // Left vector; complex symmetric matrices have `w = v̄`.
    let mut w = if symmetric { None } else { Some(v.clone()) };
    let mut prev: Option<(Complex64, f64)> = None;
    for it in 1..=settings.max_iters {
        lu.solve_in_place(&mut v);
        let vn = norm(&v);
        if !(vn.is_finite() && vn > 0.0) {
            return Err(LinalgError::Divergence { history: it });
        }
        scale(&mut v, 1.0 / vn);
        if let Some(w) = w.as_mut() {
            lu.solve_adjoint_in_place(w);
            let wn = norm(w);
            if !(wn.is_finite() && wn > 0.0) {
                return Err(LinalgError::Divergence { history: it });
            }
            scale(w, 1.0 / wn);
        }
        let est = estimate(a, &v, w.as_deref());
        let tol = (settings.rel_tol * est.value.norm()).max(2.0 * est.noise);
        if it >= MIN_ITERS && prev.is_some_and(|(p, r)| (est.value - p).norm() <= tol && est.residual > 0.5 * r) {
            return Ok(EigenPair { value: est.value, vector: v, residual: est.residual, condition: est.condition, error_estimate: est.noise });
        }
        prev = Some((est.value, est.residual));
        if RESHIFT_AT.contains(&it) {
            match BandedLu::factor(&a.shifted(est.value)) {
                Ok(f) => lu = f,
                // The estimate is an eigenvalue to working precision.
                Err(LinalgError::Singular { .. }) => {
                    return Ok(EigenPair {
                        value: est.value,
                        vector: v,
                        residual: est.residual,
                        condition: est.condition,
                        error_estimate: est.noise,
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }
    Err(LinalgError::Divergence { history: settings.max_iters })
}
