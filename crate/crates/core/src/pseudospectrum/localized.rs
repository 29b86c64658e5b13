use crate::error::{LinalgError, Result};
use crate::linalg::{bordered_smallest_singular_value, SolverSettings};
use crate::model::{assemble_p_dyadic, dyadic_exit_couplings, DyadicGrid, OperatorConfig, Potential};

/// `C_j(ε, λ) = inf ‖P_{j,ε,λ} u‖` over unit `u` supported in `K_j`, the output
/// including the stencil rows just outside `K_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedBoundReport {
    pub j: u32,
    pub c_j: f64,
    pub converged: bool,
}

pub fn localized_bound(p: &Potential, eps: f64, lambda: f64, j: u32, nodes_per_interval: usize, settings: &SolverSettings) -> Result<LocalizedBoundReport> {
    let cfg = OperatorConfig::dyadic(p, eps, lambda, j);
    let grid = DyadicGrid::new(j, nodes_per_interval);
    let a = assemble_p_dyadic(&cfg, &grid)?;
    match bordered_smallest_singular_value(&a, &dyadic_exit_couplings(&grid)?, settings) {
        Ok(est) => Ok(LocalizedBoundReport { j, c_j: est.value, converged: est.converged }),
        Err(LinalgError::Singular { .. }) => Ok(LocalizedBoundReport { j, c_j: 0.0, converged: true }),
        Err(e) => Err(e.into()),
    }
}

/// `1/κ` against `inf_j C_j` for `j = 0..=j_max`.
///
/// Functions supported in `K_j` are admissible for the whole-line operator, so
/// `1/κ ≤ inf_j C_j`; the localization lemma bounds the ratio
/// `inf_j C_j · κ` by a constant independent of `(ε, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub bounds: Vec<LocalizedBoundReport>,
    pub inf_c: f64,
    pub argmin_j: u32,
    pub inverse_kappa: f64,
    /// `inf_j C_j · κ`, the smallest admissible constant.
    pub fitted_constant: f64,
}

impl SandwichReport {
    /// `1/κ ≤ slack · inf_j C_j` and `inf_j C_j ≤ c_max / κ`.
    pub fn holds(&self, slack: f64, c_max: f64) -> bool {
        self.inverse_kappa <= slack * self.inf_c && self.fitted_constant <= c_max
    }
}

pub fn kappa_sandwich(
    p: &Potential,
    eps: f64,
    lambda: f64,
    kappa: f64,
    j_max: u32,
    nodes_per_interval: usize,
    settings: &SolverSettings,
) -> Result<SandwichReport> {
    let bounds = (0..=j_max).map(|j| localized_bound(p, eps, lambda, j, nodes_per_interval, settings)).collect::<Result<Vec<_>>>()?;
    let best = bounds.iter().min_by(|a, b| a.c_j.total_cmp(&b.c_j)).expect("j = 0 always present");
    Ok(SandwichReport { inf_c: best.c_j, argmin_j: best.j, inverse_kappa: 1.0 / kappa, fitted_constant: best.c_j * kappa, bounds })
}
