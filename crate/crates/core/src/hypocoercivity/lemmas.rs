use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, LinalgError, Result};
use crate::fit::{loglog_fit, LogLogFit};
use crate::hypocoercivity::evolve::{linear_slope, Propagator};
use crate::hypocoercivity::{BetaProfile, DecayTrace};
use crate::linalg::{smallest_singular_value, sturm_min_eigenvalue, SolverSettings};
use crate::model::{assemble_h, assemble_hat_h, Grid, HatWeight, OperatorConfig, Potential};

/// Which self-adjoint lower-bound operator to scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HatForm {
    /// `−∂² + x² + ε⁻² f'²`, ground energy `~ ε^{-2/(k+2)}`.
    Commutator,
    /// `−∂² + x² + (β(x)/ε) f'²` with the piecewise profile, ground energy `~ ε^{-2/(k+4)}`.
    BetaProfile,
}

impl HatForm {
    pub fn theory_slope(self, k: f64) -> f64 {
        match self {
            HatForm::Commutator => -2.0 / (k + 2.0),
            HatForm::BetaProfile => -2.0 / (k + 4.0),
        }
    }
}

/// Ground energies over `ε` and their log–log fit.
#[derive(Debug, Clone, PartialEq)]
pub struct HatScaling {
    pub form: HatForm,
    pub points: Vec<(f64, f64)>,
    pub fit: LogLogFit,
    pub theory_slope: Option<f64>,
}

/// Largest node count [`hat_h_scaling`] will use.
pub const MAX_SCALING_NODES: usize = 4_000_000;

/// Grid for one ground energy: `L` is three times the outer minimizer of
/// `x² + w k² a² |x|^{-2k-2}` (and at least `B_ε` and 8), and `h` resolves every
/// critical-point well `(1 + w f''(x_c)²)^{-1/4}` by ten nodes.
fn scaling_grid(p: &Potential, form: HatForm, eps: f64, min_nodes: usize) -> Result<(Grid, Option<Vec<f64>>)> {
    let prof = match form {
        HatForm::Commutator => None,
        HatForm::BetaProfile => Some(BetaProfile::for_potential(p, eps)?),
    };
    let weight_at = |x: f64| match &prof {
        None => 1.0 / (eps * eps),
        Some(b) => b.beta(x) / eps,
    };
    let mut half_width: f64 = 8.0;
    if let (Some(k), Some(a)) = (p.decay_exponent(), p.asymptotic_coefficient()) {
        let w_out = prof.as_ref().map_or(1.0 / (eps * eps), |b| b.beta_outer() / eps);
        let x_star = ((k + 1.0) * w_out * k * k * a * a).powf(1.0 / (2.0 * k + 4.0));
        half_width = half_width.max(3.0 * x_star).max(prof.as_ref().map_or(0.0, |b| 1.5 * b.b_eps));
    }
    let mut width = 1.0f64;
    for &xc in p.critical_points() {
        let f2 = p.eval(xc, 2)?;
        width = width.min((1.0 + weight_at(xc) * f2 * f2).powf(-0.25));
    }
    let nodes = min_nodes.max((20.0 * half_width / width).ceil() as usize);
    if nodes > MAX_SCALING_NODES {
        return Err(Error::InsufficientData(format!("ε = {eps:e} needs {nodes} nodes to resolve its wells")));
    }
    let grid = Grid::symmetric(half_width, nodes)?;
    let beta = prof.map(|b| grid.nodes().map(|x| b.beta(x)).collect());
    Ok((grid, beta))
}

/// Smallest eigenvalue of the chosen form at each `ε`, on grids of at least `nodes` points
/// refined until every well is resolved.
pub fn hat_h_scaling(p: &Potential, form: HatForm, eps_list: &[f64], nodes: usize) -> Result<HatScaling> {
    if eps_list.len() < 2 {
        return Err(Error::InsufficientData(format!("{} epsilon values", eps_list.len())));
    }
    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let (grid, beta) = scaling_grid(p, form, eps, nodes)?;
        let weight = match &beta {
            None => HatWeight::Commutator,
            Some(b) => HatWeight::Profile(b),
        };
        let t = assemble_hat_h(p, eps, &grid, weight)?;
        points.push((eps, sturm_min_eigenvalue(&t)?));
    }
    let fit = loglog_fit(&points)?;
    Ok(HatScaling { form, points, fit, theory_slope: p.decay_exponent().map(|k| form.theory_slope(k)) })
}

/// Envelope `‖e^{−tH}‖ ≤ C e^{−μt}` fitted to operator norms at sampled times.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    pub c: f64,
    pub mu: f64,
    /// `(t, ‖e^{−tH}‖)` of the discrete propagator.
    pub norms: Vec<(f64, f64)>,
}

const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITERS: usize = 40;

/// `‖Rᵐ‖` for the Crank–Nicolson step `R` with `m = round(t/dt)`, by power iteration on `R*ᵐ Rᵐ`.
pub fn semigroup_norms(p: &Potential, eps: f64, grid: &Grid, times: &[f64], dt: f64, settings: &SolverSettings) -> Result<Vec<f64>> {
    let h = assemble_h(&OperatorConfig::new(p, eps, 0.0), grid)?;
    if !h.is_complex_symmetric() {
        return Err(LinalgError::Unsymmetric.into());
    }
    let prop = Propagator::new(&h, dt)?;
    let apply = |v: &[Complex64], m: usize| (0..m).fold(v.to_vec(), |u, _| prop.step(&u));
    let conj = |v: Vec<Complex64>| v.into_iter().map(|z| z.conj()).collect::<Vec<_>>();
    let unit = |v: Vec<Complex64>| {
        let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / s).collect::<Vec<_>>()
    };
    let mut rng = settings.rng();
    times
        .iter()
        .map(|&t| {
            let m = (t / dt).round() as usize;
            let mut v = unit((0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
            let mut best = 0.0f64;
            for _ in 0..POWER_MAX_ITERS {
                let w = apply(&v, m);
                let s2 = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
                let done = (s2 - best * best).abs() <= POWER_TOL * s2;
                best = best.max(s2.sqrt());
                if done || s2 == 0.0 {
                    break;
                }
                v = unit(conj(apply(&conj(w), m)));
            }
            Ok(best)
        })
        .collect()
}

/// Operator norms at up to `samples` of the trace times; `μ` is the decay rate over
/// the later half of them and `C ≥ 1` the smallest constant covering all of them.
pub fn operator_envelope(p: &Potential, grid: &Grid, trace: &DecayTrace, samples: usize, settings: &SolverSettings) -> Result<EnvelopeFit> {
    let n = trace.times.len();
    if n < 3 || samples < 2 {
        return Err(Error::InsufficientData(format!("{n} trace samples for an envelope of {samples} points")));
    }
    let mut idx: Vec<usize> = (1..=samples).map(|j| 1 + (j - 1) * (n - 2) / (samples - 1).max(1)).collect();
    idx.dedup();
    let times: Vec<f64> = idx.iter().map(|&i| trace.times[i]).collect();
    let values = semigroup_norms(p, trace.epsilon, grid, &times, trace.dt, settings)?;
    let norms: Vec<(f64, f64)> = times.into_iter().zip(values).collect();
    let tail = &norms[norms.len() / 2..];
    let tail = if tail.len() < 2 { &norms[norms.len() - 2..] } else { tail };
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(t, v)| (t, v.ln())).collect();
    let mu = -linear_slope(&pts).ok_or_else(|| Error::InsufficientData("degenerate envelope times".into()))?;
    let c = norms.iter().map(|&(t, v)| v * (mu * t).exp()).fold(1.0, f64::max);
    Ok(EnvelopeFit { c, mu, norms })
}

/// Checks of the semigroup–resolvent inequalities on measured data.
#[derive(Debug, Clone, PartialEq)]
pub struct ElemReport {
    pub envelope: EnvelopeFit,
    pub sigma: f64,
    pub psi: f64,
    /// `Σ ≥ μ (1 − slack)`.
    pub sigma_holds: bool,
    /// `μ / (1 + ln C)`.
    pub psi_lower: f64,
    pub psi_holds: bool,
    /// Probe shift `μ' < Ψ` for the shifted resolvent.
    pub probe_mu: f64,
    /// `‖(H − μ' − iλ*)⁻¹‖` at the scan argmax `λ*`.
    pub n_proxy: f64,
    /// `(Ψ − μ')⁻¹`.
    pub n_bound: f64,
    pub n_holds: bool,
}

impl ElemReport {
    pub fn item_i_holds(&self) -> bool {
        self.sigma_holds && self.psi_holds
    }
}

const ENVELOPE_SAMPLES: usize = 8;

/// Compares `Σ`, `Ψ` with the operator-norm envelope on the times of `trace` and
/// probes the shifted resolvent at `μ' = Ψ/2`.
#[allow(clippy::too_many_arguments)]
pub fn elem_consistency(
    sigma: f64,
    psi: f64,
    argmax_lambda: f64,
    trace: &DecayTrace,
    p: &Potential,
    grid: &Grid,
    slack: f64,
    settings: &SolverSettings,
) -> Result<ElemReport> {
    let envelope = operator_envelope(p, grid, trace, ENVELOPE_SAMPLES, settings)?;
    let psi_lower = envelope.mu / (1.0 + envelope.c.ln());
    let probe_mu = 0.5 * psi;
    let a = assemble_h(&OperatorConfig::new(p, trace.epsilon, argmax_lambda), grid)?.shifted(probe_mu.into());
    let n_proxy = 1.0 / smallest_singular_value(&a, settings)?.value;
    let n_bound = 1.0 / (psi - probe_mu);
    let mu = envelope.mu;
    Ok(ElemReport {
        envelope,
        sigma,
        psi,
        sigma_holds: sigma >= mu * (1.0 - slack),
        psi_lower,
        psi_holds: psi >= psi_lower * (1.0 - slack),
        probe_mu,
        n_proxy,
        n_bound,
        n_holds: n_proxy <= n_bound * (1.0 + slack),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypocoercivity::{evolve, EvolveOptions};

    #[test]
    fn free_oscillator_scaling_is_flat() {
        let s = hat_h_scaling(&Potential::zero(), HatForm::Commutator, &[0.5, 0.1, 0.01], 1601).unwrap();
        for &(_, e) in &s.points {
            assert!((e - 1.0).abs() < 1e-4);
        }
        assert!(s.fit.slope.abs() < 1e-4);
        assert_eq!(s.theory_slope, None);
    }

    #[test]
    fn free_oscillator_saturates_elem() {
        let g = Grid::symmetric(8.0, 1601).unwrap();
        let opts = EvolveOptions { t_final: 2.0, dt: Some(1e-3), stride: 50, ..EvolveOptions::default() };
        let tr = evolve(&Potential::zero(), 1.0, &g, None, &opts).unwrap();
        let r = elem_consistency(1.0, 1.0, 0.0, &tr, &Potential::zero(), &g, 0.02, &SolverSettings::default()).unwrap();
        assert!((r.envelope.mu - 1.0).abs() < 1e-3);
        assert!((r.envelope.c - 1.0).abs() < 1e-3);
        assert!(r.item_i_holds() && r.n_holds);
        assert!((r.n_proxy - 2.0).abs() < 1e-3);
    }
}
