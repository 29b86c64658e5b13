use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LogLogFit};
use crate::linalg::SolverSettings;
use crate::model::{GridRule, Potential, PotentialKind};
use crate::pseudospectrum::psi_of_epsilon;
use crate::spectrum::{compute_spectrum_with, sigma_of_epsilon, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Sigma,
    Psi,
}

/// Power-law fit of `Σ(ε)` or `Ψ(ε)` over an `ε` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub quantity: Quantity,
    /// `(ε, value)` pairs entering the fit.
    pub points: Vec<(f64, f64)>,
    /// `(ε, reason)` for sweep points left out.
    pub excluded: Vec<(f64, String)>,
    pub fit: LogLogFit,
    pub theory_slope: Option<f64>,
}

/// Asymptotic exponent of `quantity` in `ε`: `−min(1/2, 2/(k+2))` for `Σ` and
/// `−2/(k+4)` for `Ψ` with power decay; `−2/3` for `Ψ` and `−2` for `Σ` with a
/// linear potential; `−1/2` for both with a quadratic one.
pub fn theory_slope(p: &Potential, quantity: Quantity) -> Option<f64> {
    match (p.kind(), quantity) {
        (PotentialKind::PowerDecay { k }, Quantity::Sigma) => Some(-(0.5f64).min(2.0 / (k + 2.0))),
        (PotentialKind::PowerDecay { k } , Quantity::Psi) => Some(-2.0 / (k + 4.0)),
        (PotentialKind::DoubleBump, Quantity::Psi) => Some(-0.25),
        (PotentialKind::Linear, Quantity::Psi) => Some(-2.0 / 3.0),
        (PotentialKind::Linear, Quantity::Sigma) => Some(-2.0),
        (PotentialKind::Quadratic, _) => Some(-0.5),
        (PotentialKind::Constant { .. }, _) => Some(0.0),
        _ => None,
    }
}

/// Sweep `ε` (strictly descending, at least four values), fit `ln value` against `ln ε`.
pub fn scaling_fit(p: &Potential, quantity: Quantity, eps_list: &[f64], rule: &GridRule, settings: &SolverSettings) -> Result<ScalingFit> {
    if eps_list.len() < 4 {
        return Err(Error::InsufficientData(format!("scaling fit needs at least 4 values of epsilon, got {}", eps_list.len())));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InsufficientData("epsilon list must be strictly descending".into()));
    }
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    match quantity {
        Quantity::Psi => {
            for e in psi_of_epsilon(p, eps_list, rule, settings)? {
                match (e.psi, e.flagged) {
                    (Some(v), false) => points.push((e.epsilon, v)),
                    _ => excluded.push((e.epsilon, e.error.unwrap_or_else(|| "maximizing evaluation flagged".into()))),
                }
            }
        }
        Quantity::Sigma => {
            let opts = SpectrumOptions { settings: settings.clone(), ..SpectrumOptions::new(1) };
            for &eps in eps_list {
                let run = rule.grid_for(p, eps).map_err(Error::from).and_then(|g| compute_spectrum_with(p, eps, &g, &opts)).and_then(|r| sigma_of_epsilon(&r));
                match run {
                    Ok(v) => points.push((eps, v)),
                    Err(e) => excluded.push((eps, e.to_string())),
                }
            }
        }
    }
    let fit = loglog_fit(&points)?;
    Ok(ScalingFit { quantity, points, excluded, fit, theory_slope: theory_slope(p, quantity) })
}
