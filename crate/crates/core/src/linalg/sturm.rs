use crate::error::LinalgError;
use crate::model::SymTridiagonal;

/// Number of eigenvalues of `t` strictly below `x`, from the signs of the
/// LDLᵀ pivots of `t - x`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let d = t.diag();
    let e = t.off();
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * e.iter().map(|v| v * v).fold(0.0, f64::max));
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(t: &SymTridiagonal) -> (f64, f64) {
    let d = t.diag();
    let e = t.off();
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) * 4.0;
    (lo - pad, hi + pad)
}

/// Eigenvalue with zero-based index `k` in ascending order, bisected until the
/// bracket cannot shrink in floating point.
pub fn sturm_eigenvalue(t: &SymTridiagonal, k: usize) -> Result<f64, LinalgError> {
    let n = t.n();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    if k >= n {
        return Err(LinalgError::Dimension { expected: n, got: k + 1 });
    }
    let (mut lo, mut hi) = gershgorin(t);
    // Invariant: count(lo) <= k < count(hi).
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue of a real symmetric tridiagonal matrix.
pub fn sturm_min_eigenvalue(t: &SymTridiagonal) -> Result<f64, LinalgError> {
    sturm_eigenvalue(t, 0)
}
