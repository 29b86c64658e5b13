use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hypocoercivity::functional::{norm_sq, phi_value};
use crate::hypocoercivity::HypoParams;
use crate::linalg::BandedLu;
use crate::spectrum::{exact_sigma, fmt17};
use crate::model::{assemble_h, ComplexBandedMatrix, Grid, OperatorConfig, Potential};

pub const DECAY_CSV_HEADER: &str = "t,norm_sq,phi";

/// Largest tolerated per-step growth of `‖u‖²`.
const GROWTH_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 4;
/// A run stopped by the floor with fewer samples is repeated on its own horizon.
const MIN_SAMPLES: usize = 16;

/// Time-stepping controls for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Defaults to `1e-2 ε^{1/2}`.
    pub dt: Option<f64>,
    /// Steps between recorded samples.
    pub stride: usize,
    /// Defaults to the normalized Gaussian `e^{-x²/2}`.
    pub u0: Option<Vec<Complex64>>,
    /// Stop once `‖u‖² < floor · ‖u₀‖²`.
    pub floor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { t_final: 2.0, dt: None, stride: 100, u0: None, floor: 1e-24 }
    }
}

impl EvolveOptions {
    pub fn default_dt(eps: f64) -> f64 {
        1e-2 * eps.sqrt()
    }
}

/// `min(20, 12/r)` with `r` the smaller of `η` and the exact `Σ(ε)` when one is
/// known, so that both rates show over the run.
pub fn decay_horizon(p: &Potential, eps: f64, eta: f64) -> f64 {
    let rate = exact_sigma(p, eps).map_or(eta, |s| s.min(eta));
    (12.0 / rate).min(20.0)
}

/// Samples of `‖u(t)‖²` and `Φ(t)` along a Crank–Nicolson trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTrace {
    pub epsilon: f64,
    /// Step actually used after any halvings.
    pub dt: f64,
    pub times: Vec<f64>,
    pub norm_sq: Vec<f64>,
    /// Empty when no parameters were supplied.
    pub phi: Vec<f64>,
    /// `-d ln Φ/dt` by least squares over all samples.
    pub fitted_rate: Option<f64>,
    /// `max_t ‖u(t)‖ / (e^{-t} ‖u₀‖) − 1` over every step.
    pub contraction_excess: f64,
    /// Worst relative defect of `(‖u_{m+1}‖² − ‖u_m‖²)/dt = −2(‖ū'‖² + ‖xū‖²)` at the step midpoints.
    pub id1_residual: f64,
    pub halvings: usize,
    pub stopped_early: bool,
}

impl DecayTrace {
    /// `-d ln ‖u‖/dt` by least squares over the trailing `fraction` of the samples.
    pub fn tail_norm_rate(&self, fraction: f64) -> Option<f64> {
        let n = self.times.len();
        let start = ((1.0 - fraction.clamp(0.0, 1.0)) * n as f64).floor() as usize;
        let pts: Vec<(f64, f64)> = (start.min(n.saturating_sub(2))..n).map(|i| (self.times[i], 0.5 * self.norm_sq[i].ln())).collect();
        linear_slope(&pts).map(|s| -s)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(DECAY_CSV_HEADER);
        s.push('\n');
        for i in 0..self.times.len() {
            let phi = self.phi.get(i).copied().unwrap_or(f64::NAN);
            let _ = writeln!(s, "{},{},{}", fmt17(self.times[i]), fmt17(self.norm_sq[i]), fmt17(phi));
        }
        s
    }
}

pub(crate) fn linear_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `e^{-x²/2}` normalized in the discrete norm.
pub fn gaussian_state(grid: &Grid) -> Vec<Complex64> {
    let u: Vec<Complex64> = grid.nodes().map(|x| Complex64::new((-0.5 * x * x).exp(), 0.0)).collect();
    let s = norm_sq(&u, grid.spacing()).sqrt();
    u.into_iter().map(|z| z / s).collect()
}

/// `I + c H`.
fn identity_plus(h: &ComplexBandedMatrix, c: Complex64) -> ComplexBandedMatrix {
    let scale = |v: &[Complex64]| v.iter().map(|z| z * c).collect::<Vec<_>>();
    let diag = h.diag().iter().map(|z| 1.0 + z * c).collect();
    ComplexBandedMatrix::new(scale(h.sub()), diag, scale(h.sup())).expect("same shape as h")
}

/// `‖u'‖² + ‖xu‖²` with forward differences and zero ends; equals `Re⟨H u, u⟩` for the discrete `H`.
fn dirichlet_form(u: &[Complex64], grid: &Grid) -> f64 {
    let h = grid.spacing();
    let n = u.len();
    let mut grad = u[0].norm_sqr() + u[n - 1].norm_sqr();
    grad += u.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum::<f64>();
    let pot: f64 = grid.nodes().zip(u).map(|(x, z)| x * x * z.norm_sqr()).sum();
    grad / h + pot * h
}

/// One Crank–Nicolson step `(I + dt/2 H)⁻¹ (I − dt/2 H)`, factored once.
///
/// For complex symmetric `H` the step matrix is complex symmetric as well, so its
/// adjoint acts as `v ↦ conj(R conj(v))`.
pub(crate) struct Propagator {
    lu: BandedLu,
    explicit: ComplexBandedMatrix,
}

impl Propagator {
    pub(crate) fn new(h: &ComplexBandedMatrix, dt: f64) -> std::result::Result<Self, crate::error::LinalgError> {
        let half = Complex64::new(0.5 * dt, 0.0);
        Ok(Self { lu: BandedLu::factor(&identity_plus(h, half))?, explicit: identity_plus(h, -half) })
    }

    pub(crate) fn step(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut next = self.explicit.matvec(u);
        self.lu.solve_in_place(&mut next);
        next
    }
}

enum Attempt {
    Done(DecayTrace),
    Retry(String),
}

/// Integrates `u_t = −H_ε u` by Crank–Nicolson, `(I + dt/2 H) u_{m+1} = (I − dt/2 H) u_m`.
///
/// The step is halved (at most four times) when the factorization fails or `‖u‖²`
/// grows. A run that hits the floor with fewer than 16 samples is repeated on
/// the shortened horizon with a finer step. `Φ` is recorded when `params` is given.
pub fn evolve(p: &Potential, eps: f64, grid: &Grid, params: Option<&HypoParams>, opts: &EvolveOptions) -> Result<DecayTrace> {
    if !(opts.t_final > 0.0 && opts.t_final.is_finite()) || opts.stride == 0 {
        return Err(Error::Stepping(format!("t_final = {} and stride = {} must be positive", opts.t_final, opts.stride)));
    }
    let u0 = match &opts.u0 {
        Some(u) if u.len() != grid.len() => {
            return Err(Error::Stepping(format!("initial state has {} entries for {} nodes", u.len(), grid.len())));
        }
        Some(u) => u.clone(),
        None => gaussian_state(grid),
    };
    let h_mat = assemble_h(&OperatorConfig::new(p, eps, 0.0), grid)?;
    let dt = opts.dt.unwrap_or_else(|| EvolveOptions::default_dt(eps));
    let mut trace = run_with_halving(p, eps, grid, params, opts, &h_mat, &u0, dt)?;
    if trace.stopped_early && trace.times.len() < MIN_SAMPLES {
        let t_stop = *trace.times.last().expect("nonempty trace");
        let opts = EvolveOptions { t_final: t_stop, ..opts.clone() };
        let dt = trace.dt.min(t_stop / (MIN_SAMPLES * opts.stride) as f64);
        trace = run_with_halving(p, eps, grid, params, &opts, &h_mat, &u0, dt)?;
    }
    Ok(trace)
}

#[allow(clippy::too_many_arguments)]
fn run_with_halving(
    p: &Potential,
    eps: f64,
    grid: &Grid,
    params: Option<&HypoParams>,
    opts: &EvolveOptions,
    h_mat: &ComplexBandedMatrix,
    u0: &[Complex64],
    mut dt: f64,
) -> Result<DecayTrace> {
    let mut stride = opts.stride;
    let mut last = String::new();
    for halvings in 0..=MAX_HALVINGS {
        match attempt(p, eps, grid, params, opts, h_mat, u0, dt, stride, halvings)? {
            Attempt::Done(trace) => return Ok(trace),
            Attempt::Retry(why) => last = why,
        }
        dt *= 0.5;
        stride *= 2;
    }
    Err(Error::Stepping(format!("gave up after {MAX_HALVINGS} step halvings: {last}")))
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    p: &Potential,
    eps: f64,
    grid: &Grid,
    params: Option<&HypoParams>,
    opts: &EvolveOptions,
    h_mat: &ComplexBandedMatrix,
    u0: &[Complex64],
    dt: f64,
    stride: usize,
    halvings: usize,
) -> Result<Attempt> {
    let steps = (opts.t_final / dt).ceil().max(1.0) as usize;
    let dt = opts.t_final / steps as f64;
    let prop = match Propagator::new(h_mat, dt) {
        Ok(prop) => prop,
        Err(e) => return Ok(Attempt::Retry(e.to_string())),
    };
    let hx = grid.spacing();
    let phi_of = |u: &[Complex64]| params.map(|pr| phi_value(u, pr, p, eps, grid)).transpose();

    let mut u = u0.to_vec();
    let m0 = norm_sq(&u, hx);
    if !(m0 > 0.0) {
        return Err(Error::Stepping("initial state is zero".into()));
    }
    let mut trace = DecayTrace {
        epsilon: eps,
        dt,
        times: vec![0.0],
        norm_sq: vec![m0],
        phi: phi_of(&u)?.into_iter().collect(),
        fitted_rate: None,
        contraction_excess: 0.0,
        id1_residual: 0.0,
        halvings,
        stopped_early: false,
    };
    let mut m_prev = m0;
    for step in 1..=steps {
        let next = prop.step(&u);
        let m = norm_sq(&next, hx);
        if !m.is_finite() || m > m_prev * (1.0 + GROWTH_TOL) {
            return Ok(Attempt::Retry(format!("‖u‖² grew from {m_prev:e} to {m:e} at step {step}")));
        }
        let mid: Vec<Complex64> = u.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let form = dirichlet_form(&mid, grid);
        if form > 0.0 {
            let defect = ((m - m_prev) / dt + 2.0 * form).abs() / (2.0 * form);
            trace.id1_residual = trace.id1_residual.max(defect);
        }
        let t = step as f64 * dt;
        trace.contraction_excess = trace.contraction_excess.max((0.5 * (m / m0).ln() + t).exp_m1());
        u = next;
        m_prev = m;
        let floor_hit = m < opts.floor * m0;
        if step % stride == 0 || step == steps || floor_hit {
            trace.times.push(t);
            trace.norm_sq.push(m);
            if let Some(phi) = phi_of(&u)? {
                trace.phi.push(phi);
            }
        }
        if floor_hit {
            trace.stopped_early = step < steps;
            break;
        }
    }
    if !trace.phi.is_empty() {
        let pts: Vec<(f64, f64)> = trace.times.iter().zip(&trace.phi).map(|(&t, &f)| (t, f.ln())).collect();
        trace.fitted_rate = linear_slope(&pts).map(|s| -s);
    }
    Ok(Attempt::Done(trace))
}

/// Outcome of [`verify_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub holds: bool,
    /// `max_{s<t} Φ(t) / (Φ(s) e^{−η(t−s)})`.
    pub worst_ratio: f64,
}

/// Checks `Φ(t) ≤ Φ(s) e^{−η(t−s)} (1 + tol)` over all sampled pairs `s < t`.
pub fn verify_decay(trace: &DecayTrace, eta: f64, tol: f64) -> DecayCheck {
    let mut worst = 0.0f64;
    let n = trace.phi.len();
    for s in 0..n {
        for t in s + 1..n {
            let (fs, ft) = (trace.phi[s], trace.phi[t]);
            if fs <= 0.0 {
                continue;
            }
            let log_ratio = ft.ln() - fs.ln() + eta * (trace.times[t] - trace.times[s]);
            worst = worst.max(log_ratio.exp());
        }
    }
    DecayCheck { holds: n >= 2 && worst <= 1.0 + tol, worst_ratio: worst }
}
