use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SolverSettings;
use crate::model::{Grid, GridRule, Potential};
use crate::pseudospectrum::kappa::{kappa, KappaFlag};
use crate::pseudospectrum::regimes::{decaying_exponent, infinity_peak_lambda, regime_tag, RegimeTag};
use crate::spectrum::fmt17;

const COARSE_POINTS: usize = 100;
const COARSE_DECADES: f64 = 5.0;
const WINDOW_HALF_WIDTH: f64 = 0.1;
const WINDOW_SAMPLES: usize = 9;
const LOCALIZATION: f64 = 0.005;
const MAX_REFINEMENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanStrategy {
    /// Equispaced points on `[-λ_max, λ_max]`.
    Uniform { points: usize },
    /// Log-spaced coarse grid plus refinement windows; see [`scan_lambda`].
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub lambda: f64,
    pub kappa: f64,
    pub tag: RegimeTag,
    pub flag: KappaFlag,
}

/// `κ(ε, λ)` along the imaginary axis, sorted by `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventScan {
    pub epsilon: f64,
    pub grid: Grid,
    pub points: Vec<ScanPoint>,
    /// `1 / max κ` (0 when some `κ` is infinite).
    pub psi: f64,
    pub argmax_lambda: f64,
}

pub const SCAN_CSV_HEADER: &str = "eps,lambda,kappa,tag,flag";

impl ResolventScan {
    fn from_points(epsilon: f64, grid: Grid, mut points: Vec<ScanPoint>) -> Self {
        points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        points.dedup_by(|a, b| a.lambda == b.lambda);
        let best = points.iter().copied().reduce(|a, b| if b.kappa > a.kappa { b } else { a }).expect("non-empty scan");
        Self { epsilon, grid, psi: 1.0 / best.kappa, argmax_lambda: best.lambda, points }
    }

    pub fn lambda_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn kappa_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kappa).collect()
    }

    pub fn max_kappa(&self) -> f64 {
        1.0 / self.psi
    }

    pub fn point_at(&self, lambda: f64) -> Option<&ScanPoint> {
        self.points.iter().find(|p| p.lambda == lambda)
    }

    /// Local maxima of `κ` exceeding by a factor `≥ 2` the largest `κ` found at
    /// relative distance `≥ 5%` on either side.
    pub fn spikes(&self) -> Vec<ScanPoint> {
        let pts = &self.points;
        let mut out = Vec::new();
        for i in 1..pts.len().saturating_sub(1) {
            let p = pts[i];
            if !(p.kappa >= pts[i - 1].kappa && p.kappa >= pts[i + 1].kappa) || p.lambda == 0.0 {
                continue;
            }
            let reach = 0.05 * p.lambda.abs();
            let left = pts[..i].iter().rev().find(|q| p.lambda - q.lambda >= reach);
            let right = pts[i + 1..].iter().find(|q| q.lambda - p.lambda >= reach);
            if let (Some(l), Some(r)) = (left, right) {
                if p.kappa >= 2.0 * l.kappa && p.kappa >= 2.0 * r.kappa {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Rows `eps,lambda,kappa,tag,flag` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{},{},{},{}\n", fmt17(self.epsilon), fmt17(p.lambda), fmt17(p.kappa), p.tag.as_str(), p.flag.as_str()));
        }
        out
    }
}

/// Upper end of the scanned `λ` range: `1.2 · max |f| / ε` over the grid.
pub fn lambda_max(p: &Potential, eps: f64, grid: &Grid) -> f64 {
    let (lo, hi) = p.range_closure();
    let mut m = lo.abs().max(hi.abs());
    if !m.is_finite() {
        m = [grid.lo(), 0.0, grid.hi()].iter().filter_map(|&x| p.eval(x, 0).ok()).fold(0.0, |a: f64, v| a.max(v.abs()));
    }
    if m == 0.0 {
        m = 1.0;
    }
    1.2 * m / eps
}

fn evaluate(p: &Potential, eps: f64, grid: &Grid, lambdas: &[f64], settings: &SolverSettings) -> Result<Vec<ScanPoint>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let k = kappa(p, eps, lambda, grid, settings)?;
            Ok(ScanPoint { lambda, kappa: k.kappa, tag: regime_tag(p, eps, lambda), flag: k.flag })
        })
        .collect()
}

/// Sample `[a, b]`, shrink to the two cells around the maximum, repeat until
/// the bracket is narrower than 0.5% of the peak location.
fn refine_window(p: &Potential, eps: f64, grid: &Grid, (mut a, mut b): (f64, f64), floor: f64, settings: &SolverSettings) -> Result<Vec<ScanPoint>> {
    let mut all = Vec::new();
    for _ in 0..MAX_REFINEMENTS {
        let xs: Vec<f64> = (0..WINDOW_SAMPLES).map(|i| a + (b - a) * i as f64 / (WINDOW_SAMPLES - 1) as f64).collect();
        let pts = evaluate(p, eps, grid, &xs, settings)?;
        let imax = (0..pts.len()).fold(0, |m, i| if pts[i].kappa > pts[m].kappa { i } else { m });
        let peak = xs[imax];
        all.extend(pts);
        if b - a <= LOCALIZATION * peak.abs() || b - a <= floor {
            break;
        }
        a = xs[imax.saturating_sub(1)];
        b = xs[(imax + 1).min(WINDOW_SAMPLES - 1)];
    }
    Ok(all)
}

/// Resolvent norms along `iℝ`.
///
/// The adaptive strategy evaluates `λ = 0` and 100 log-spaced points over five
/// decades below `λ_max` on both signs, then refines windows of ±10% around
/// every nonzero `c/ε` (`c ∈ cv(f)`), around `λ_∞ = ε^{-4/(k+4)}` for decaying
/// potentials, and between the neighbours of every coarse local maximum.
pub fn scan_lambda(p: &Potential, eps: f64, grid: &Grid, strategy: ScanStrategy, settings: &SolverSettings) -> Result<ResolventScan> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Model(crate::error::ModelError::InvalidParameter(format!("epsilon = {eps} must be positive"))));
    }
    let lmax = lambda_max(p, eps, grid);
    match strategy {
        ScanStrategy::Uniform { points } => {
            if points < 2 {
                return Err(Error::InsufficientData(format!("uniform scan needs at least 2 points, got {points}")));
            }
            let xs: Vec<f64> = (0..points).map(|i| -lmax + 2.0 * lmax * i as f64 / (points - 1) as f64).collect();
            Ok(ResolventScan::from_points(eps, *grid, evaluate(p, eps, grid, &xs, settings)?))
        }
        ScanStrategy::Adaptive => {
            let mut xs = vec![0.0];
            for i in 0..COARSE_POINTS {
                let l = lmax * 10f64.powf(-COARSE_DECADES * (1.0 - i as f64 / (COARSE_POINTS - 1) as f64));
                xs.push(l);
                xs.push(-l);
            }
            xs.sort_by(f64::total_cmp);
            let coarse = evaluate(p, eps, grid, &xs, settings)?;
            let floor = 1e-9 * lmax;

            let mut windows: Vec<(f64, f64)> = Vec::new();
            let mut centers: Vec<f64> = p.critical_values().iter().filter(|&&c| c != 0.0).map(|c| c / eps).collect();
            if let Some(k) = decaying_exponent(p) {
                let l = infinity_peak_lambda(k, eps);
                centers.push(if p.range_closure().1 > 0.0 { l } else { -l });
            }
            for c in centers {
                let (a, b) = (c * (1.0 - WINDOW_HALF_WIDTH), c * (1.0 + WINDOW_HALF_WIDTH));
                windows.push((a.min(b), a.max(b)));
            }
            for i in 0..coarse.len() {
                let left = if i > 0 { coarse[i - 1].kappa } else { f64::NEG_INFINITY };
                let right = coarse.get(i + 1).map_or(f64::NEG_INFINITY, |q| q.kappa);
                if coarse[i].kappa >= left && coarse[i].kappa >= right {
                    let a = coarse[i.saturating_sub(1)].lambda;
                    let b = coarse[(i + 1).min(coarse.len() - 1)].lambda;
                    if b > a {
                        windows.push((a, b));
                    }
                }
            }
            let refined: Vec<Vec<ScanPoint>> =
                windows.iter().map(|&w| refine_window(p, eps, grid, w, floor, settings)).collect::<Result<_>>()?;
            let mut points = coarse;
            points.extend(refined.into_iter().flatten());
            Ok(ResolventScan::from_points(eps, *grid, points))
        }
    }
}

/// `Ψ(ε)` from one adaptive scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEntry {
    pub epsilon: f64,
    /// `None` when the scan failed.
    pub psi: Option<f64>,
    pub argmax_lambda: Option<f64>,
    /// The maximizing evaluation was not [`KappaFlag::Ok`], or the scan failed.
    pub flagged: bool,
    pub error: Option<String>,
}

/// Adaptive scans for each `ε` (listed in descending order), each on `rule.grid_for(p, ε)`.
pub fn psi_of_epsilon(p: &Potential, eps_list: &[f64], rule: &GridRule, settings: &SolverSettings) -> Result<Vec<PsiEntry>> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InsufficientData("epsilon list must be strictly descending".into()));
    }
    Ok(eps_list
        .iter()
        .map(|&eps| {
            let run = rule.grid_for(p, eps).map_err(Error::from).and_then(|g| scan_lambda(p, eps, &g, ScanStrategy::Adaptive, settings));
            match run {
                Ok(scan) => {
                    let flag = scan.point_at(scan.argmax_lambda).map_or(KappaFlag::Ok, |q| q.flag);
                    PsiEntry { epsilon: eps, psi: Some(scan.psi), argmax_lambda: Some(scan.argmax_lambda), flagged: flag != KappaFlag::Ok, error: None }
                }
                Err(e) => PsiEntry { epsilon: eps, psi: None, argmax_lambda: None, flagged: true, error: Some(e.to_string()) },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_has_unit_psi() {
        let p = Potential::constant(0.7);
        let g = Grid::symmetric(8.0, 800).unwrap();
        let s = scan_lambda(&p, 0.1, &g, ScanStrategy::Adaptive, &SolverSettings::default()).unwrap();
        assert!((s.psi - 1.0).abs() < 1e-3, "{}", s.psi);
        assert!((s.argmax_lambda - 7.0).abs() < 0.05 * 7.0);
        assert!(s.points.windows(2).all(|w| w[0].lambda < w[1].lambda));
    }

    #[test]
    fn uniform_scan_and_csv() {
        let p = Potential::power_decay(2.0).unwrap();
        let g = Grid::symmetric(8.0, 300).unwrap();
        let s = scan_lambda(&p, 0.25, &g, ScanStrategy::Uniform { points: 11 }, &SolverSettings::default()).unwrap();
        assert_eq!(s.points.len(), 11);
        assert!((s.psi * s.max_kappa() - 1.0).abs() < 1e-15);
        let csv = s.to_csv();
        assert_eq!(csv.lines().next().unwrap(), SCAN_CSV_HEADER);
        assert_eq!(csv.lines().count(), 12);
        assert!(scan_lambda(&p, 0.25, &g, ScanStrategy::Uniform { points: 1 }, &SolverSettings::default()).is_err());
    }

    #[test]
    fn psi_list_must_descend() {
        let p = Potential::constant(1.0);
        assert!(psi_of_epsilon(&p, &[0.1, 0.2], &GridRule::fixed(8.0, 100), &SolverSettings::default()).is_err());
    }
}
