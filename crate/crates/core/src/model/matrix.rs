use num_complex::Complex64;

use crate::ddouble::CDd;
use crate::error::LinalgError;

/// Complex tridiagonal matrix stored by diagonals.
///
/// `sub[i] = A[i+1][i]`, `diag[i] = A[i][i]`, `sup[i] = A[i][i+1]`.
/// A zero off-diagonal entry splits the matrix into independent blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBandedMatrix {
    sub: Vec<Complex64>,
    diag: Vec<Complex64>,
    sup: Vec<Complex64>,
}

impl ComplexBandedMatrix {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        for v in [&sub, &sup] {
            if v.len() != n - 1 {
                return Err(LinalgError::Dimension { expected: n - 1, got: v.len() });
            }
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn from_diagonal(diag: Vec<Complex64>) -> Result<Self, LinalgError> {
        let n = diag.len();
        let z = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        Self::new(z.clone(), diag, z)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(vec![Complex64::new(1.0, 0.0); n]).expect("n > 0")
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[Complex64] {
        &self.sub
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn sup(&self) -> &[Complex64] {
        &self.sup
    }

    pub fn diag_mut(&mut self) -> &mut [Complex64] {
        &mut self.diag
    }

    /// Bandwidth before factorization is at most one.
    pub fn bandwidth(&self) -> usize {
        let zero = Complex64::new(0.0, 0.0);
        usize::from(self.sub.iter().chain(&self.sup).any(|&v| v != zero))
    }

    pub fn is_complex_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    /// `A - σ I`.
    pub fn shifted(&self, sigma: Complex64) -> Self {
        let mut out = self.clone();
        for d in &mut out.diag {
            *d -= sigma;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self { sub: self.sup.clone(), diag: self.diag.clone(), sup: self.sub.clone() }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let c = |v: &Vec<Complex64>| v.iter().map(|z| z.conj()).collect();
        Self { sub: c(&self.sub), diag: c(&self.diag), sup: c(&self.sup) }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(x.len(), n, "matvec dimension");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `A^H x`.
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(x.len(), n, "matvec dimension");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i].conj() * x[i];
                if i > 0 {
                    acc += self.sup[i - 1].conj() * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sub[i].conj() * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].norm();
                if i > 0 {
                    s += self.sub[i - 1].norm();
                }
                if i + 1 < n {
                    s += self.sup[i].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Dense row-major copy, for small oracles and debugging.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.n();
        let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i + 1][i] = self.sub[i];
                a[i][i + 1] = self.sup[i];
            }
        }
        a
    }
}

/// Real symmetric tridiagonal matrix (diagonal plus one off-diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if off.len() != n - 1 {
            return Err(LinalgError::Dimension { expected: n - 1, got: off.len() });
        }
        Ok(Self { diag, off })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// Complex tridiagonal matrix with double-double entries, used for eigenvalue
/// refinement where condition numbers exceed what `f64` entries can resolve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTridiagonal {
    sub: Vec<CDd>,
    diag: Vec<CDd>,
    sup: Vec<CDd>,
    /// `false` when the potential had no extended evaluator and `f64` values were promoted.
    pub entries_extended: bool,
}

impl ExtendedTridiagonal {
    pub fn new(sub: Vec<CDd>, diag: Vec<CDd>, sup: Vec<CDd>, entries_extended: bool) -> Result<Self, LinalgError> {
        let n = diag.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        for v in [&sub, &sup] {
            if v.len() + 1 != n {
                return Err(LinalgError::Dimension { expected: n - 1, got: v.len() });
            }
        }
        Ok(Self { sub, diag, sup, entries_extended })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[CDd] {
        &self.sub
    }

    pub fn diag(&self) -> &[CDd] {
        &self.diag
    }

    pub fn sup(&self) -> &[CDd] {
        &self.sup
    }

    pub fn is_complex_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    pub fn shifted(&self, sigma: CDd) -> Self {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d = *d - sigma);
        out
    }

    pub fn matvec(&self, x: &[CDd]) -> Vec<CDd> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Entries rounded to `f64`.
    pub fn to_f64(&self) -> ComplexBandedMatrix {
        let r = |v: &[CDd]| v.iter().map(|z| z.to_c64()).collect();
        ComplexBandedMatrix::new(r(&self.sub), r(&self.diag), r(&self.sup)).expect("validated dimensions")
    }
}
