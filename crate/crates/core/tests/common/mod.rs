//! Dense reference implementations used to check the banded kernels.
#![allow(dead_code)]

use rand::Rng;
use skewho::{Complex64, ComplexBandedMatrix};

pub type Dense = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tridiagonal with diagonal uniform in `[-2,2]²` and off-diagonals uniform in `[-1,1]²`.
pub fn random_tridiagonal<R: Rng>(rng: &mut R, n: usize) -> ComplexBandedMatrix {
    let mut draw = |r: f64| c(rng.gen_range(-r..r), rng.gen_range(-r..r));
    let diag = (0..n).map(|_| draw(2.0)).collect();
    let sub = (0..n.saturating_sub(1)).map(|_| draw(1.0)).collect();
    let sup = (0..n.saturating_sub(1)).map(|_| draw(1.0)).collect();
    ComplexBandedMatrix::new(sub, diag, sup).unwrap()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting on the dense matrix.
pub fn dense_solve(mut a: Dense, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= m * t;
            }
            let t = b[k];
            b[i] -= m * t;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Singular values of an `m × n` matrix (`m ≥ n`) by one-sided (Hestenes) Jacobi, ascending.
pub fn jacobi_singular_values(a: &Dense) -> Vec<f64> {
    let m = a.len();
    let n = a[0].len();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for r in 0..m {
                    let x = cols[i][r];
                    let y = cols[j][r] * phase.conj();
                    cols[i][r] = x * cs - y * sn;
                    cols[j][r] = x * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|v| norm(v)).collect();
    s.sort_by(f64::total_cmp);
    s
}

/// `det(T − z)` and its derivative by the three-term recurrence.
fn char_poly(a: &ComplexBandedMatrix, z: Complex64) -> (Complex64, Complex64) {
    let (d, lo, up) = (a.diag(), a.sub(), a.sup());
    let (mut p0, mut p1) = (c(1.0, 0.0), d[0] - z);
    let (mut q0, mut q1) = (c(0.0, 0.0), c(-1.0, 0.0));
    for k in 1..d.len() {
        let bc = lo[k - 1] * up[k - 1];
        let p2 = (d[k] - z) * p1 - bc * p0;
        let q2 = -p1 + (d[k] - z) * q1 - bc * q0;
        (p0, p1, q0, q1) = (p1, p2, q1, q2);
    }
    (p1, q1)
}

/// Eigenvalues of a tridiagonal as roots of its characteristic polynomial (Aberth–Ehrlich).
pub fn aberth_eigenvalues(a: &ComplexBandedMatrix) -> Vec<Complex64> {
    let n = a.n();
    let center: Complex64 = a.diag().iter().sum::<Complex64>() / n as f64;
    let radius = a.norm_inf() + 1.0;
    let mut z: Vec<Complex64> = (0..n).map(|k| center + Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    for _ in 0..2000 {
        let mut biggest: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = char_poly(a, z[i]);
            if p == c(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            biggest = biggest.max(w.norm() / z[i].norm().max(1.0));
        }
        if biggest < 1e-15 {
            break;
        }
    }
    z
}

/// Largest distance in a greedy nearest-neighbour matching of two equally long sets.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b.iter().enumerate().filter(|(j, _)| !used[*j]).map(|(j, y)| (j, (x - y).norm())).min_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
