use num_complex::Complex64;
use rand::Rng;

use super::lu::{BandedLu, PIVOT_FLOOR_PER_ROW};
use super::settings::SolverSettings;
use crate::error::LinalgError;
use crate::model::ComplexBandedMatrix;

/// Outcome of a Krylov singular value estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Interval certified by the final Rayleigh residual; always contains `value`.
    pub bracket: (f64, f64),
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn scale(v: &mut [Complex64], s: f64) {
    v.iter_mut().for_each(|z| *z *= s);
}

pub(crate) fn random_unit(n: usize, settings: &SolverSettings) -> Vec<Complex64> {
    let mut rng = settings.rng();
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = 1.0 / norm(&v);
    scale(&mut v, s);
    v
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest eigenvalue and unit eigenvector of the real symmetric tridiagonal
/// `(alpha, beta)`, by cyclic Jacobi on its dense form.
fn top_eigenpair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut a = vec![vec![0.0; m]; m];
    let mut v = vec![vec![0.0; m]; m];
    for i in 0..m {
        a[i][i] = alpha[i];
        v[i][i] = 1.0;
        if i + 1 < m {
            a[i][i + 1] = beta[i];
            a[i + 1][i] = beta[i];
        }
    }
    for _ in 0..50 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let total: f64 = off + (0..m).map(|i| a[i][i] * a[i][i]).sum::<f64>();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let top = (0..m).max_by(|&i, &j| a[i][i].total_cmp(&a[j][j])).expect("nonempty");
    (a[top][top], v.iter().map(|row| row[top]).collect())
}

/// Krylov basis size between restarts.
const LANCZOS_BASIS: usize = 32;

/// Largest eigenvalue of the Gram operator `BᴴB` by explicitly restarted Lanczos with
/// full reorthogonalization; `first` applies `B` and `second` applies `Bᴴ` in place.
/// `iterations` counts Gram applications.
fn lanczos_on_inverse_gram(
    n: usize,
    settings: &SolverSettings,
    first: impl Fn(&mut [Complex64]),
    second: impl Fn(&mut [Complex64]),
) -> SingularEstimate {
    let m_max = LANCZOS_BASIS.min(n);
    let mut x = random_unit(n, settings);
    let mut rho = 0.0;
    let mut resid = f64::INFINITY;
    let mut prev = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iters && !converged {
        let mut basis = vec![x.clone()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut ritz = vec![1.0];
        loop {
            let k = basis.len() - 1;
            let mut w = basis[k].clone();
            first(&mut w);
            second(&mut w);
            iterations += 1;
            alpha.push(dot(&basis[k], &w).re);
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
                }
            }
            let b = norm(&w);
            let (theta, s) = top_eigenpair(&alpha, &beta);
            if !(theta.is_finite() && theta > 0.0) {
                break;
            }
            rho = theta;
            resid = b * s[k].abs();
            ritz = s;
            let sigma = rho.sqrt();
            // Small Ritz steps alone can stall short of the limit on a clustered spectrum.
            let settled = (sigma - prev).abs() <= settings.rel_tol * sigma && resid <= settings.rel_tol.sqrt() * rho;
            prev = sigma;
            if settled || resid <= f64::EPSILON * rho {
                converged = true;
                break;
            }
            if basis.len() == m_max || iterations >= settings.max_iters {
                break;
            }
            beta.push(b);
            scale(&mut w, 1.0 / b);
            basis.push(w);
        }
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for (v, &c) in basis.iter().zip(&ritz) {
            next.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
        }
        let nn = norm(&next);
        if !(nn.is_finite() && nn > 0.0) {
            break;
        }
        scale(&mut next, 1.0 / nn);
        x = next;
    }
    // Largest singular value of A⁻¹ is √ρ; translate the Ritz residual into a bracket.
    let value = 1.0 / rho.sqrt();
    let lo = 1.0 / (rho + resid).sqrt();
    let hi = if rho > resid { 1.0 / (rho - resid).sqrt() } else { f64::INFINITY };
    SingularEstimate { value, converged, iterations, bracket: (lo.min(value), hi.max(value)) }
}

/// `σ_min(A)` by Lanczos on `(AᴴA)⁻¹`, using one LU factorization.
///
/// Deterministic for a fixed `settings.seed`. Singular factorizations propagate as
/// errors; non-convergence within `max_iters` is reported through `converged`.
pub fn smallest_singular_value(a: &ComplexBandedMatrix, settings: &SolverSettings) -> Result<SingularEstimate, LinalgError> {
    if a.n() == 0 {
        return Err(LinalgError::Empty);
    }
    let lu = BandedLu::factor(a)?;
    Ok(lanczos_on_inverse_gram(a.n(), settings, |v| lu.solve_in_place(v), |v| lu.solve_adjoint_in_place(v)))
}

/// `‖A⁻¹‖₂` by Lanczos on `A⁻¹A⁻ᴴ`. Shares no iterates with
/// [`smallest_singular_value`], so the product of the two is an independent check.
pub fn inverse_norm(a: &ComplexBandedMatrix, settings: &SolverSettings) -> Result<f64, LinalgError> {
    if a.n() == 0 {
        return Err(LinalgError::Empty);
    }
    let lu = BandedLu::factor(a)?;
    let est = lanczos_on_inverse_gram(a.n(), settings, |v| lu.solve_adjoint_in_place(v), |v| lu.solve_in_place(v));
    Ok(1.0 / est.value)
}

/// Upper-triangular factor of bandwidth two, rows `[R_kk, R_k,k+1, R_k,k+2]`.
struct BandedR(Vec<[Complex64; 3]>);

/// Unitary rotation `(c, s)` sending `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let r = a.norm().hypot(b.norm());
    if r == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (a / r, b / r)
    }
}

impl BandedR {
    /// `R` from `QR = [A; rows]` where each extra row is `value · e_index`ᵀ.
    fn factor(a: &ComplexBandedMatrix, rows: &[(usize, Complex64)]) -> Self {
        let n = a.n();
        let zero = Complex64::new(0.0, 0.0);
        let (sub, diag, sup) = (a.sub(), a.diag(), a.sup());
        let mut r = vec![[zero; 3]; n];
        let mut w = [diag[0], if n > 1 { sup[0] } else { zero }];
        for k in 0..n - 1 {
            let next = [sub[k], diag[k + 1], if k + 2 < n { sup[k + 1] } else { zero }];
            let (c, s) = givens(w[0], next[0]);
            r[k] = [c.conj() * w[0] + s.conj() * next[0], c.conj() * w[1] + s.conj() * next[1], s.conj() * next[2]];
            w = [-s * w[1] + c * next[1], c * next[2]];
        }
        r[n - 1] = [w[0], zero, zero];
        for &(i, value) in rows {
            // Sliding window of the extra row at columns k, k+1, k+2.
            let mut x = [value, zero, zero];
            for k in i..n {
                let (c, s) = givens(r[k][0], x[0]);
                let rk = r[k];
                for m in 0..3 {
                    r[k][m] = c.conj() * rk[m] + s.conj() * x[m];
                }
                let fresh = [-s * rk[1] + c * x[1], -s * rk[2] + c * x[2], zero];
                x = fresh;
                if x[0] == zero && x[1] == zero {
                    break;
                }
            }
        }
        Self(r)
    }

    /// `b ← R⁻ᴴ b`.
    fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        let r = &self.0;
        for k in 0..b.len() {
            let mut acc = b[k];
            if k >= 1 {
                acc -= r[k - 1][1].conj() * b[k - 1];
            }
            if k >= 2 {
                acc -= r[k - 2][2].conj() * b[k - 2];
            }
            b[k] = acc / r[k][0].conj();
        }
    }

    /// `b ← R⁻¹ b`.
    fn solve_in_place(&self, b: &mut [Complex64]) {
        let r = &self.0;
        let n = b.len();
        for k in (0..n).rev() {
            let mut acc = b[k];
            if k + 1 < n {
                acc -= r[k][1] * b[k + 1];
            }
            if k + 2 < n {
                acc -= r[k][2] * b[k + 2];
            }
            b[k] = acc / r[k][0];
        }
    }
}

/// `σ_min` of `A` stacked on the extra rows `value · e_index`ᵀ, by Givens QR and
/// Lanczos on `(RᴴR)⁻¹`.
///
/// With `A` a principal block of a tridiagonal operator and the extra rows its
/// couplings leaving the block, this is `inf ‖M u‖ / ‖u‖` over `u` supported on the
/// block, measured on the whole output.
pub fn bordered_smallest_singular_value(
    a: &ComplexBandedMatrix,
    rows: &[(usize, Complex64)],
    settings: &SolverSettings,
) -> Result<SingularEstimate, LinalgError> {
    let n = a.n();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    if let Some(&(index, _)) = rows.iter().find(|(i, _)| *i >= n) {
        return Err(LinalgError::Dimension { expected: n, got: index });
    }
    let r = BandedR::factor(a, rows);
    let floor = PIVOT_FLOOR_PER_ROW * n as f64;
    if let Some((index, p)) = r.0.iter().enumerate().find(|(_, p)| !(p[0].norm() > floor)) {
        return Err(LinalgError::Singular { index, modulus: p[0].norm() });
    }
    Ok(lanczos_on_inverse_gram(n, settings, |v| r.solve_adjoint_in_place(v), |v| r.solve_in_place(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_smallest_entry() {
        let d = vec![c(3.0, 0.0), c(0.0, -0.5), c(2.0, 2.0), c(-1.0, 0.0)];
        let a = ComplexBandedMatrix::from_diagonal(d).unwrap();
        let est = smallest_singular_value(&a, &SolverSettings::default()).unwrap();
        assert!(est.converged);
        assert!((est.value - 0.5).abs() < 1e-10, "{est:?}");
        assert!(est.bracket.0 <= est.value && est.value <= est.bracket.1);
    }

    #[test]
    fn identity_has_unit_singular_value() {
        let est = smallest_singular_value(&ComplexBandedMatrix::identity(50), &SolverSettings::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_laplacian() {
        let n = 99;
        let h = 1.0 / (n + 1) as f64;
        let a = ComplexBandedMatrix::new(vec![c(-1.0 / (h * h), 0.0); n - 1], vec![c(2.0 / (h * h), 0.0); n], vec![c(-1.0 / (h * h), 0.0); n - 1])
            .unwrap();
        let exact = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        let est = smallest_singular_value(&a, &SolverSettings::default()).unwrap();
        assert!((est.value - exact).abs() < 1e-9 * exact);
        let inv = inverse_norm(&a, &SolverSettings::default()).unwrap();
        assert!((est.value * inv - 1.0).abs() < 1e-9);
    }

    #[test]
    fn border_rows_lift_the_column_they_touch() {
        let a = ComplexBandedMatrix::from_diagonal(vec![c(3.0, 0.0), c(0.0, 0.5), c(2.0, 0.0)]).unwrap();
        let s = SolverSettings::default();
        let plain = bordered_smallest_singular_value(&a, &[], &s).unwrap();
        assert!((plain.value - 0.5).abs() < 1e-12);
        let lifted = bordered_smallest_singular_value(&a, &[(1, c(0.0, 1.2))], &s).unwrap();
        assert!((lifted.value - 1.3).abs() < 1e-9, "{lifted:?}");
        assert!(bordered_smallest_singular_value(&a, &[(3, c(1.0, 0.0))], &s).is_err());
    }

    #[test]
    fn borders_never_lower_the_square_value() {
        let n = 60;
        let h = 1.0 / (n + 1) as f64;
        let off = vec![c(-1.0 / (h * h), 0.0); n - 1];
        let diag: Vec<_> = (0..n).map(|i| c(2.0 / (h * h), 40.0 * (i as f64 * h - 0.5))).collect();
        let a = ComplexBandedMatrix::new(off.clone(), diag, off).unwrap();
        let s = SolverSettings::default();
        let square = smallest_singular_value(&a, &s).unwrap().value;
        let rows = [(0, c(-1.0 / (h * h), 0.0)), (n - 1, c(-1.0 / (h * h), 0.0))];
        let bordered = bordered_smallest_singular_value(&a, &rows, &s).unwrap().value;
        assert!(bordered >= square);
    }
}
