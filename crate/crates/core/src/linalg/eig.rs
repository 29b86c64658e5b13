//! Full spectrum of a complex tridiagonal matrix.
//!
//! The matrix is first made complex symmetric by a diagonal similarity
//! (`e_i = √(sub_i · sup_i)`), then reduced by implicit QL sweeps with complex
//! orthogonal rotations. Such rotations are unbounded when `f² + g²` nearly
//! vanishes; a sweep that hits that case is rolled back and retried with a
//! randomized shift.

use num_complex::Complex64;
use rand::Rng;

use super::settings::SolverSettings;
use crate::error::LinalgError;
use crate::model::ComplexBandedMatrix;

/// A sweep is abandoned when a rotation would amplify entries by more than `1 / BREAKDOWN`.
const BREAKDOWN: f64 = 1e-3;
/// Every this many stagnant sweeps an exceptional shift is used.
const EXCEPTIONAL_PERIOD: usize = 30;

/// Sorts by ascending real part, ties broken by imaginary part.
pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Diagonal and off-diagonal of the complex symmetric matrix similar to `a`.
/// A zero product `sub_i · sup_i` yields `e_i = 0`, which decouples exactly.
pub fn symmetrize(a: &ComplexBandedMatrix) -> (Vec<Complex64>, Vec<Complex64>) {
    let d = a.diag().to_vec();
    let e = a.sub().iter().zip(a.sup()).map(|(l, u)| (l * u).sqrt()).collect();
    (d, e)
}

/// All eigenvalues of `a`, sorted by [`sort_spectrum`]. Cost is `O(n²)`.
pub fn all_eigenvalues(a: &ComplexBandedMatrix, settings: &SolverSettings) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.n();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    if n > settings.eig_cap {
        return Err(LinalgError::TooLarge { n, cap: settings.eig_cap });
    }
    let (d, mut e) = symmetrize(a);
    e.push(Complex64::new(0.0, 0.0));
    let mut d = d;
    symmetric_ql(&mut d, &mut e, settings)?;
    sort_spectrum(&mut d);
    Ok(d)
}

fn negligible(e: Complex64, dm: Complex64, dm1: Complex64, abs_tol: f64) -> bool {
    let en = e.norm();
    en <= f64::EPSILON * (dm.norm() + dm1.norm()) || en <= abs_tol
}

/// Implicit QL on the complex symmetric tridiagonal `(d, e)`; `e[n-1]` is scratch.
/// On return `d` holds the eigenvalues in no particular order.
fn symmetric_ql(d: &mut [Complex64], e: &mut [Complex64], settings: &SolverSettings) -> Result<(), LinalgError> {
    let n = d.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let abs_tol = settings.deflation_tol.unwrap_or(0.0);
    let mut rng = settings.rng();
    let mut snap_d = Vec::new();
    let mut snap_e = Vec::new();
    for l in 0..n {
        let mut sweeps = 0usize;
        let mut force_exceptional = false;
        loop {
            let mut m = l;
            while m + 1 < n && !negligible(e[m], d[m], d[m + 1], abs_tol) {
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps >= settings.max_iters {
                return Err(LinalgError::Stagnation { index: l, sweeps });
            }
            sweeps += 1;
            let shift = if force_exceptional || sweeps % EXCEPTIONAL_PERIOD == 0 {
                force_exceptional = false;
                let radius = e[l].norm() + e[l + 1].norm();
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let rho: f64 = rng.gen_range(0.5..1.0);
                d[l] + Complex64::from_polar(rho * radius, theta)
            } else {
                // Eigenvalue of the leading 2x2 block closer to d[l].
                let g = (d[l + 1] - d[l]) / (e[l] * 2.0);
                let mut r = (g * g + one).sqrt();
                if (g - r).norm() > (g + r).norm() {
                    r = -r;
                }
                d[l] - e[l] / (g + r)
            };
            snap_d.clear();
            snap_d.extend_from_slice(&d[l..=m]);
            snap_e.clear();
            snap_e.extend_from_slice(&e[l..=m]);

            let mut g = d[m] - shift;
            let (mut s, mut c, mut p) = (one, one, zero);
            let mut broke = false;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let scale = f.norm().max(g.norm());
                if scale == 0.0 {
                    d[i + 1] -= p;
                    e[i + 1] = zero;
                    e[m] = zero;
                    underflow = true;
                    break;
                }
                let r = (f * f + g * g).sqrt();
                if r.norm() < BREAKDOWN * scale {
                    broke = true;
                    break;
                }
                e[i + 1] = r;
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r2 = (d[i] - g) * s + c * b * 2.0;
                p = s * r2;
                d[i + 1] = g + p;
                g = c * r2 - b;
            }
            if broke {
                d[l..=m].copy_from_slice(&snap_d);
                e[l..=m].copy_from_slice(&snap_e);
                force_exceptional = true;
                continue;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
            if !(d[l].re.is_finite() && d[l].im.is_finite()) {
                return Err(LinalgError::Stagnation { index: l, sweeps });
            }
        }
    }
    Ok(())
}
