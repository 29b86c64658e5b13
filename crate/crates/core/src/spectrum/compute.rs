use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, LinalgError, Result};
use crate::linalg::{all_eigenvalues, refine_extended, sort_spectrum, EigenPair, SolverSettings};
use crate::model::{
    assemble_h, assemble_h_extended, assemble_h_sector, sector_nodes, ExtendedTridiagonal, Grid, OperatorConfig, Parity, Potential,
    PotentialKind,
};
use crate::spectrum::semiclassical::SemiclassicalPrediction;

/// Acceptance thresholds for a computed eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationPolicy {
    /// `‖Av − λv‖ < residual_rel · |λ|`.
    pub residual_rel: f64,
    /// `|λ_N − λ_{2N+1}| < two_grid_rel · |λ|`.
    pub two_grid_rel: f64,
    /// Eigenvector mass beyond `|x| > boundary_fraction · L`.
    pub boundary_fraction: f64,
    pub boundary_mass: f64,
    /// Rounding error estimate (condition · unit roundoff · ‖|A||v|‖) below `error_rel · |λ|`.
    pub error_rel: f64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self { residual_rel: 1e-6, two_grid_rel: 1e-3, boundary_fraction: 0.9, boundary_mass: 1e-6, error_rel: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    /// Number of lowest-real-part eigenvalues requested.
    pub window: usize,
    pub settings: SolverSettings,
    pub policy: ValidationPolicy,
    /// Skip the refined-grid comparison (reported displacement is then NaN and not enforced).
    pub skip_two_grid: bool,
    /// Additional refinement seeds beyond the QR candidates and semiclassical ladders.
    pub extra_seeds: Vec<Complex64>,
}

impl SpectrumOptions {
    pub fn new(window: usize) -> Self {
        Self { window, settings: SolverSettings::default(), policy: ValidationPolicy::default(), skip_two_grid: false, extra_seeds: Vec::new() }
    }
}

/// One validated eigenvalue of the discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedEigenvalue {
    pub value: Complex64,
    /// Residual of the double-double eigenpair on the base grid.
    pub residual: f64,
    pub condition: f64,
    pub error_estimate: f64,
    /// `|λ_N − λ_{2N+1}| / |λ|`.
    pub two_grid_displacement: f64,
    pub boundary_mass: f64,
    /// Number of parity sectors in which the value was found (2 for tunnelling pairs).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub epsilon: f64,
    pub grid: Grid,
    pub requested: usize,
    /// Lowest-real-part validated eigenvalues, ascending by real part then imaginary part.
    pub eigenvalues: Vec<ValidatedEigenvalue>,
    /// Min real part over `eigenvalues`, `None` when nothing validated.
    pub sigma: Option<f64>,
    /// Distinct refined candidates that failed validation.
    pub rejected: usize,
    /// Fewer than `requested` eigenvalues validated.
    pub partial: bool,
}

impl SpectrumReport {
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }
}

/// [`compute_spectrum_with`] with default settings and validation policy.
pub fn compute_spectrum(p: &Potential, eps: f64, grid: &Grid, window: usize) -> Result<SpectrumReport> {
    compute_spectrum_with(p, eps, grid, &SpectrumOptions::new(window))
}

/// Lowest eigenvalues of the Dirichlet discretization of `H_ε` on `grid`.
///
/// Every eigenvalue inside the padded strip `R_ε` is computed by implicit QR
/// (per parity sector for even potentials), then polished by double-double
/// shift-invert iteration together with the semiclassical seeds, and kept only
/// when it passes the residual, rounding-error, refined-grid and boundary-mass
/// tests of the [`ValidationPolicy`].
pub fn compute_spectrum_with(p: &Potential, eps: f64, grid: &Grid, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Model(crate::error::ModelError::InvalidParameter(format!("epsilon = {eps} must be positive"))));
    }
    let symmetric = grid.lo() == -grid.hi();
    let sectors: Vec<Option<Parity>> = if p.is_even() && symmetric { vec![Some(Parity::Even), Some(Parity::Odd)] } else { vec![None] };
    let cfg = OperatorConfig::new(p, eps, 0.0);
    let refined_grid = grid.refined();

    let mut seeds = opts.extra_seeds.clone();
    if matches!(p.kind(), PotentialKind::PowerDecay { .. }) {
        if let Ok(pred) = crate::spectrum::semiclassical_predict(p, eps, opts.window + 2) {
            seeds.extend(pred.mu.iter().chain(&pred.nu).copied());
        }
    }

    let per_sector: Vec<Result<(Vec<Candidate>, usize)>> = sectors
        .par_iter()
        .map(|&parity| sector_candidates(&cfg, grid, &refined_grid, parity, &seeds, opts))
        .collect();
    let mut accepted = Vec::new();
    let mut rejected = 0;
    for r in per_sector {
        let (c, rej) = r?;
        accepted.extend(c);
        rejected += rej;
    }

    accepted.sort_by(|a, b| a.eig.value.re.total_cmp(&b.eig.value.re).then(a.eig.value.im.total_cmp(&b.eig.value.im)));
    let mut merged: Vec<ValidatedEigenvalue> = Vec::new();
    for c in accepted {
        if let Some(last) = merged.iter_mut().rev().find(|m| same_value(m.value, m.error_estimate, c.eig.value, c.eig.error_estimate)) {
            last.multiplicity += 1;
            continue;
        }
        merged.push(c.eig);
    }
    merged.truncate(opts.window);
    let sigma = sigma_of(&merged);
    Ok(SpectrumReport { epsilon: eps, grid: *grid, requested: opts.window, partial: merged.len() < opts.window, eigenvalues: merged, sigma, rejected })
}

struct Candidate {
    eig: ValidatedEigenvalue,
}

fn same_value(a: Complex64, ea: f64, b: Complex64, eb: f64) -> bool {
    (a - b).norm() <= 1e-10 * a.norm().max(b.norm()) + 4.0 * (ea + eb)
}

/// Strip `Re z ≥ 1`, `ε Im z ∈ closure f(ℝ)`, padded by `pad` in both coordinates.
fn in_numerical_range(p: &Potential, eps: f64, z: Complex64, pad: f64) -> bool {
    let (lo, hi) = p.range_closure();
    z.re >= 1.0 - pad && eps * z.im >= lo - pad && eps * z.im <= hi + pad
}

fn sector_candidates(
    cfg: &OperatorConfig<'_>,
    grid: &Grid,
    refined_grid: &Grid,
    parity: Option<Parity>,
    seeds: &[Complex64],
    opts: &SpectrumOptions,
) -> Result<(Vec<Candidate>, usize)> {
    let p = cfg.potential;
    let eps = cfg.epsilon;
    let a = match parity {
        Some(par) => assemble_h_sector(cfg, grid, par)?,
        None => assemble_h(cfg, grid)?,
    };
    let mut qr = all_eigenvalues(&a, &opts.settings)?;
    qr.retain(|z| in_numerical_range(p, eps, *z, 1e-3));
    sort_spectrum(&mut qr);
    qr.truncate(2 * opts.window + 8);
    let ext = assemble_h_extended(cfg, grid, parity)?;

    let mut pairs: Vec<EigenPair> = Vec::new();
    for &s in qr.iter().chain(seeds) {
        // An exact eigenvalue makes the shifted factorization singular.
        let shift = s + Complex64::new(1e-9, 1e-9) * s.norm().max(1.0);
        match refine_extended(&ext, shift, &opts.settings) {
            Ok(pair) => {
                if !pairs.iter().any(|q| same_value(q.value, q.error_estimate, pair.value, pair.error_estimate)) {
                    pairs.push(pair);
                }
            }
            Err(LinalgError::Divergence { .. } | LinalgError::Singular { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }

    let nodes = sector_nodes(grid, parity);
    let ext_refined = if opts.skip_two_grid { None } else { Some(assemble_h_extended(cfg, refined_grid, parity)?) };
    let mut out = Vec::new();
    let mut rejected = 0;
    for pair in pairs {
        match validate(p, eps, grid, &nodes, ext_refined.as_ref(), pair, opts) {
            Some(eig) => out.push(Candidate { eig }),
            None => rejected += 1,
        }
    }
    Ok((out, rejected))
}

fn validate(
    p: &Potential,
    eps: f64,
    grid: &Grid,
    nodes: &[f64],
    refined: Option<&ExtendedTridiagonal>,
    pair: EigenPair,
    opts: &SpectrumOptions,
) -> Option<ValidatedEigenvalue> {
    let pol = &opts.policy;
    let mag = pair.value.norm();
    if !in_numerical_range(p, eps, pair.value, 1e-3) || pair.residual >= pol.residual_rel * mag || pair.error_estimate >= pol.error_rel * mag {
        return None;
    }
    let cut = pol.boundary_fraction * grid.hi().max(-grid.lo());
    let boundary_mass: f64 = pair.vector.iter().zip(nodes).filter(|(_, x)| x.abs() > cut).map(|(v, _)| v.norm_sqr()).sum();
    if boundary_mass >= pol.boundary_mass {
        return None;
    }
    let two_grid_displacement = match refined {
        Some(ext) => {
            let fine = refine_extended(ext, pair.value, &opts.settings).ok()?;
            (fine.value - pair.value).norm() / mag
        }
        None => f64::NAN,
    };
    if two_grid_displacement >= pol.two_grid_rel {
        return None;
    }
    Some(ValidatedEigenvalue {
        value: pair.value,
        residual: pair.residual,
        condition: pair.condition,
        error_estimate: pair.error_estimate,
        two_grid_displacement,
        boundary_mass,
        multiplicity: 1,
    })
}

fn sigma_of(values: &[ValidatedEigenvalue]) -> Option<f64> {
    values
        .iter()
        .min_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.abs().total_cmp(&b.value.im.abs())))
        .map(|e| e.value.re)
}

/// Spectral bound of the validated eigenvalues; ties in the real part go to the smaller `|Im|`.
pub fn sigma_of_epsilon(report: &SpectrumReport) -> Result<f64> {
    sigma_of(&report.eigenvalues).ok_or_else(|| Error::InsufficientData(format!("no validated eigenvalue at ε = {}", report.epsilon)))
}

/// `Σ(ε)` on the whole line where it is known exactly: `Re (1 + i/ε)^{1/2}` for `x²`,
/// `1 + 1/(4ε²)` for `x`, and `1` for constants.
pub fn exact_sigma(p: &Potential, eps: f64) -> Option<f64> {
    match p.kind() {
        PotentialKind::Quadratic => Some(Complex64::new(1.0, 1.0 / eps).sqrt().re),
        PotentialKind::Linear => Some(1.0 + 0.25 / (eps * eps)),
        PotentialKind::Constant { .. } => Some(1.0),
        _ => None,
    }
}

/// Comparison of the computed spectral bound with `min(Re μ₀⁰, Re ν₀⁰)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub epsilon: f64,
    pub sigma: f64,
    pub re_mu0: f64,
    pub re_nu0: f64,
    pub predicted: f64,
    /// Branch attaining the minimum of the two predictions.
    pub branch: crate::spectrum::Branch,
    /// Branch expected from the decay exponent alone.
    pub expected_branch: crate::spectrum::Branch,
    /// `|Σ − predicted| / Σ`.
    pub rel_gap: f64,
}

pub fn conjecture_check(p: &Potential, eps: f64, grid: &Grid) -> Result<ConjectureReport> {
    let pred = crate::spectrum::semiclassical_predict(p, eps, 0)?;
    let report = compute_spectrum(p, eps, grid, 1)?;
    let sigma = sigma_of_epsilon(&report)?;
    Ok(conjecture_from(&pred, sigma))
}

pub(crate) fn conjecture_from(pred: &SemiclassicalPrediction, sigma: f64) -> ConjectureReport {
    let (branch, predicted) = pred.minimum();
    ConjectureReport {
        epsilon: pred.epsilon,
        sigma,
        re_mu0: pred.mu[0].re,
        re_nu0: pred.nu[0].re,
        predicted,
        branch,
        expected_branch: pred.expected_branch(),
        rel_gap: (sigma - predicted).abs() / sigma,
    }
}
