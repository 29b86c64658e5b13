use crate::error::{LinalgError, Result};
use crate::linalg::{smallest_singular_value, SolverSettings};
use crate::model::{assemble_h, assemble_h_sector, Grid, OperatorConfig, Parity, Potential};

/// Quality flag attached to a resolvent-norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KappaFlag {
    Ok,
    /// `N` and `2N+1` grids disagree by more than 1%.
    GridSensitive,
    /// Inverse iteration hit `max_iters`; the value is the last estimate.
    Unconverged,
    /// `iλ` is an eigenvalue to working precision; `κ = +∞`.
    Singular,
}

impl KappaFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaFlag::Ok => "ok",
            KappaFlag::GridSensitive => "grid",
            KappaFlag::Unconverged => "unconverged",
            KappaFlag::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaValue {
    pub kappa: f64,
    pub flag: KappaFlag,
}

/// `κ(ε, λ) = ‖(H_ε − iλ)⁻¹‖` of the Dirichlet discretization on `grid`.
///
/// Even potentials on symmetric grids are split into parity sectors; the
/// smallest singular value is the smaller of the two sector values.
pub fn kappa(p: &Potential, eps: f64, lambda: f64, grid: &Grid, settings: &SolverSettings) -> Result<KappaValue> {
    let cfg = OperatorConfig::new(p, eps, lambda);
    let blocks = if p.is_even() && grid.lo() == -grid.hi() {
        vec![assemble_h_sector(&cfg, grid, Parity::Even)?, assemble_h_sector(&cfg, grid, Parity::Odd)?]
    } else {
        vec![assemble_h(&cfg, grid)?]
    };
    let mut best: Option<(f64, bool)> = None;
    for a in &blocks {
        match smallest_singular_value(a, settings) {
            Ok(est) => {
                if best.map_or(true, |(v, _)| est.value < v) {
                    best = Some((est.value, est.converged));
                }
            }
            Err(LinalgError::Singular { .. }) => return Ok(KappaValue { kappa: f64::INFINITY, flag: KappaFlag::Singular }),
            Err(e) => return Err(e.into()),
        }
    }
    let (sigma, converged) = best.expect("at least one block");
    if sigma <= 0.0 {
        return Ok(KappaValue { kappa: f64::INFINITY, flag: KappaFlag::Singular });
    }
    Ok(KappaValue { kappa: 1.0 / sigma, flag: if converged { KappaFlag::Ok } else { KappaFlag::Unconverged } })
}

/// [`kappa`] on `grid`, flagged [`KappaFlag::GridSensitive`] when the `2N+1` grid moves it by more than 1%.
pub fn kappa_two_grid(p: &Potential, eps: f64, lambda: f64, grid: &Grid, settings: &SolverSettings) -> Result<KappaValue> {
    let coarse = kappa(p, eps, lambda, grid, settings)?;
    if coarse.flag != KappaFlag::Ok {
        return Ok(coarse);
    }
    let fine = kappa(p, eps, lambda, &grid.refined(), settings)?;
    let sensitive = fine.flag != KappaFlag::Ok || (fine.kappa - coarse.kappa).abs() > 0.01 * fine.kappa;
    Ok(KappaValue { flag: if sensitive { KappaFlag::GridSensitive } else { KappaFlag::Ok }, ..coarse })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_oscillator_has_unit_kappa() {
        let g = Grid::symmetric(10.0, 1999).unwrap();
        let k = kappa(&Potential::zero(), 1.0, 0.0, &g, &SolverSettings::default()).unwrap();
        assert_eq!(k.flag, KappaFlag::Ok);
        assert!((k.kappa - 1.0).abs() < 1e-3);
    }

    #[test]
    fn range_gap_bound() {
        let p = Potential::power_decay(4.0).unwrap();
        let eps = 2f64.powi(-8);
        let g = Grid::symmetric(10.0, 1000).unwrap();
        let k = kappa_two_grid(&p, eps, 2.0 / eps, &g, &SolverSettings::default()).unwrap();
        assert_eq!(k.flag, KappaFlag::Ok);
        assert!(k.kappa <= 1.05 * eps);
    }

    #[test]
    fn sectors_match_full_matrix() {
        let p = Potential::double_bump();
        let g = Grid::symmetric(8.0, 401).unwrap();
        let s = SolverSettings::default();
        let split = kappa(&p, 0.05, 21.0, &g, &s).unwrap().kappa;
        let a = assemble_h(&OperatorConfig::new(&p, 0.05, 21.0), &g).unwrap();
        let full = 1.0 / smallest_singular_value(&a, &s).unwrap().value;
        assert!((split - full).abs() < 1e-8 * full);
    }
}
