//! LU factorization of complex tridiagonal matrices with partial pivoting.
//!
//! Row interchanges create one extra superdiagonal, so `U` has bandwidth two.

use num_complex::Complex64;

use crate::error::LinalgError;
use crate::model::ComplexBandedMatrix;

/// Pivots at or below `PIVOT_FLOOR_PER_ROW * n` mark the matrix as singular.
pub const PIVOT_FLOOR_PER_ROW: f64 = 1e-300;

/// `P A = L U` for a tridiagonal `A`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    /// Multipliers of `L`.
    dl: Vec<Complex64>,
    /// Diagonal of `U`.
    d: Vec<Complex64>,
    /// First superdiagonal of `U`.
    du: Vec<Complex64>,
    /// Second superdiagonal of `U` (fill-in).
    du2: Vec<Complex64>,
    /// `swapped[i]` records an interchange of rows `i` and `i + 1`.
    swapped: Vec<bool>,
}

impl BandedLu {
    pub fn factor(a: &ComplexBandedMatrix) -> Result<Self, LinalgError> {
        let n = a.n();
        let zero = Complex64::new(0.0, 0.0);
        let mut dl = a.sub().to_vec();
        let mut d = a.diag().to_vec();
        let mut du = a.sup().to_vec();
        let mut du2 = vec![zero; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] != zero {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = zero;
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let floor = PIVOT_FLOOR_PER_ROW * n as f64;
        if let Some((index, p)) = d.iter().enumerate().find(|(_, p)| !(p.norm() > floor)) {
            return Err(LinalgError::Singular { index, modulus: p.norm() });
        }
        Ok(Self { dl, d, du, du2, swapped })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Bandwidth of `U`: 2 when any fill-in occurred.
    pub fn upper_bandwidth(&self) -> usize {
        if self.du2.iter().any(|v| *v != Complex64::new(0.0, 0.0)) {
            2
        } else {
            usize::from(self.n() > 1)
        }
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n();
        assert_eq!(b.len(), n, "rhs dimension");
        for i in 0..n - 1 {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    /// Overwrites `b` with `A⁻ᴴ b`.
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        let n = self.n();
        assert_eq!(b.len(), n, "rhs dimension");
        b[0] /= self.d[0].conj();
        if n > 1 {
            b[1] = (b[1] - self.du[0].conj() * b[0]) / self.d[1].conj();
        }
        for i in 2..n {
            b[i] = (b[i] - self.du[i - 1].conj() * b[i - 1] - self.du2[i - 2].conj() * b[i - 2]) / self.d[i].conj();
        }
        for i in (0..n - 1).rev() {
            if self.swapped[i] {
                let tmp = b[i + 1];
                b[i + 1] = b[i] - self.dl[i].conj() * tmp;
                b[i] = tmp;
            } else {
                b[i] -= self.dl[i].conj() * b[i + 1];
            }
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_adjoint_in_place(&mut x);
        x
    }
}

/// Solves `A x = b`, rejecting singular pivots and residuals above
/// `10 n u ‖A‖∞ ‖x‖∞` (the backward-stability envelope of partial pivoting).
pub fn banded_lu_solve(a: &ComplexBandedMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    if b.len() != a.n() {
        return Err(LinalgError::Dimension { expected: a.n(), got: b.len() });
    }
    let lu = BandedLu::factor(a)?;
    let x = lu.solve(b);
    let ax = a.matvec(&x);
    let residual = ax.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let xnorm = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bound = 10.0 * a.n() as f64 * f64::EPSILON * a.norm_inf() * xnorm;
    if !(residual <= bound) {
        return Err(LinalgError::LargeResidual { residual, bound });
    }
    Ok(x)
}
