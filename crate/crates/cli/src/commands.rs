use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Value};
use skewho::fit::{loglog_fit, LogLogFit};
use skewho::hypocoercivity::{decay_horizon, evolve, make_params, verify_decay, EvolveOptions, DECAY_CSV_HEADER};
use skewho::model::numerical_range_bound;
use skewho::pseudospectrum::{avoided_domain, psi_of_epsilon, scan_lambda, SCAN_CSV_HEADER};
use skewho::spectrum::{compute_spectrum_with, exact_sigma, fmt17, semiclassical_predict, theory_slope, Quantity, SpectrumOptions, SpectrumTable, TABLE_CSV_HEADER};
use skewho::{Complex64, Potential, SolverSettings};

use crate::config::{CommandKind, RunConfig};

/// Slack on the `κ ≤ 1/dist(iλ, R_ε)` check.
const RANGE_SLACK: f64 = 1.05;
/// Discretization allowance on `Ψ ≥ 1` and `Σ ≥ 1` (the discrete oscillator ground energy sits `O(h²)` below 1).
const UNIT_TOL: f64 = 1e-3;
const DECAY_SLACK: f64 = 0.05;
const CONTRACTION_TOL: f64 = 1e-6;

/// Output of one `ε` job.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub csv_rows: Vec<String>,
    pub result: Value,
    /// Named invariant checks and whether they held.
    pub checks: Vec<(&'static str, bool)>,
}

/// One job's outcome; failures are recorded, never propagated to siblings.
#[derive(Debug, Clone)]
pub struct JobRecord {
    pub epsilon: f64,
    pub outcome: Result<JobOutput, String>,
}

impl JobRecord {
    pub fn ok(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.checks.iter().all(|c| c.1))
    }
}

/// Everything a command produced, in input order.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv_header: String,
    pub jobs: Vec<JobRecord>,
    /// Cross-job summary (fits), if the command has one.
    pub summary: Option<Value>,
    pub summary_ok: bool,
}

impl RunOutput {
    pub fn ok(&self) -> bool {
        self.summary_ok && self.jobs.iter().all(JobRecord::ok)
    }
}

pub fn num(x: f64) -> Value {
    Value::String(fmt17(x))
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn fit_json(fit: &LogLogFit, theory: Option<f64>) -> Value {
    json!({
        "slope": num(fit.slope),
        "intercept": num(fit.intercept),
        "max_residual": num(fit.max_residual),
        "points": fit.points,
        "theory_slope": opt_num(theory),
    })
}

/// Settings of job `i`: the run seed offset by the job index, so results do not depend on scheduling.
fn settings_for(cfg: &RunConfig, i: usize) -> SolverSettings {
    SolverSettings::with_seed(cfg.seed.wrapping_add(i as u64))
}

/// Epsilons in run order: descending for the sweeps, as given otherwise.
pub fn job_epsilons(cfg: &RunConfig) -> Vec<f64> {
    let mut eps = cfg.epsilons.clone();
    if matches!(cfg.command, CommandKind::Psi | CommandKind::SigmaFit) {
        eps.sort_by(|a, b| b.total_cmp(a));
        eps.dedup();
    }
    eps
}

fn run_jobs<F>(cfg: &RunConfig, job: F) -> Result<Vec<JobRecord>>
where
    F: Fn(usize, f64, &Potential) -> Result<JobOutput> + Sync,
{
    let p = cfg.potential.build()?;
    let eps = job_epsilons(cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    Ok(pool.install(|| {
        eps.par_iter()
            .enumerate()
            .map(|(i, &e)| JobRecord { epsilon: e, outcome: job(i, e, &p).map_err(|err| format!("{err:#}")) })
            .collect()
    }))
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Scan => cmd_scan(cfg),
        CommandKind::Psi => cmd_psi(cfg),
        CommandKind::Spectrum => cmd_spectrum(cfg),
        CommandKind::SigmaFit => cmd_sigma_fit(cfg),
        CommandKind::Decay => cmd_decay(cfg),
        CommandKind::Domain => cmd_domain(cfg),
    }
}

fn per_job(csv_header: String, jobs: Vec<JobRecord>) -> RunOutput {
    RunOutput { csv_header, jobs, summary: None, summary_ok: true }
}

pub fn cmd_scan(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let jobs = run_jobs(cfg, |i, eps, p| {
        let grid = rule.grid_for(p, eps)?;
        let scan = scan_lambda(p, eps, &grid, cfg.scan_strategy(), &settings_for(cfg, i))?;
        let within_range = scan.points.iter().all(|q| !q.kappa.is_finite() || q.kappa <= RANGE_SLACK * numerical_range_bound(p, eps, q.lambda));
        let points: Vec<Value> = scan
            .points
            .iter()
            .map(|q| json!({ "lambda": num(q.lambda), "kappa": num(q.kappa), "tag": q.tag.as_str(), "flag": q.flag.as_str() }))
            .collect();
        Ok(JobOutput {
            csv_rows: scan.to_csv().lines().skip(1).map(str::to_owned).collect(),
            result: json!({ "eps": num(eps), "psi": num(scan.psi), "argmax_lambda": num(scan.argmax_lambda), "points": points }),
            checks: vec![("psi_at_least_one", scan.psi >= 1.0 - UNIT_TOL), ("kappa_within_numerical_range_bound", within_range)],
        })
    })?;
    Ok(per_job(SCAN_CSV_HEADER.to_string(), jobs))
}

/// Log-log fit over the successful jobs that produced `value`.
fn sweep_fit(jobs: &[JobRecord], value: &str, theory: Option<f64>) -> (Value, bool) {
    let points: Vec<(f64, f64)> = jobs
        .iter()
        .filter_map(|j| {
            let o = j.outcome.as_ref().ok()?;
            (o.result["flagged"] != Value::Bool(true)).then_some(())?;
            let v: f64 = o.result[value].as_str()?.parse().ok()?;
            Some((j.epsilon, v))
        })
        .collect();
    match loglog_fit(&points) {
        Ok(fit) => (json!({ "fit": fit_json(&fit, theory) }), true),
        Err(e) => (json!({ "fit": Value::Null, "error": e.to_string() }), false),
    }
}

pub fn cmd_psi(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let jobs = run_jobs(cfg, |i, eps, p| {
        let entry = psi_of_epsilon(p, &[eps], &rule, &settings_for(cfg, i))?.remove(0);
        if let Some(err) = entry.error {
            anyhow::bail!(err);
        }
        let psi = entry.psi.unwrap_or(f64::NAN);
        Ok(JobOutput {
            csv_rows: vec![format!("{},{},{},{}", fmt17(eps), fmt17(psi), fmt17(entry.argmax_lambda.unwrap_or(f64::NAN)), entry.flagged)],
            result: json!({ "eps": num(eps), "psi": num(psi), "argmax_lambda": opt_num(entry.argmax_lambda), "flagged": entry.flagged }),
            checks: vec![("psi_at_least_one", psi >= 1.0 - UNIT_TOL)],
        })
    })?;
    let p = cfg.potential.build()?;
    let (summary, ok) = sweep_fit(&jobs, "psi", theory_slope(&p, Quantity::Psi));
    Ok(RunOutput { csv_header: "eps,psi,argmax_lambda,flagged".into(), jobs, summary: Some(summary), summary_ok: ok })
}

fn spectrum_options(cfg: &RunConfig, i: usize, window: usize) -> SpectrumOptions {
    SpectrumOptions { settings: settings_for(cfg, i), ..SpectrumOptions::new(window) }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let m = cfg.n.unwrap_or(5).max(1);
    let jobs = run_jobs(cfg, |i, eps, p| {
        let grid = rule.grid_for(p, eps)?;
        let report = compute_spectrum_with(p, eps, &grid, &spectrum_options(cfg, i, m))?;
        let pred = semiclassical_predict(p, eps, m - 1).ok();
        let table = SpectrumTable::new(&report, pred.as_ref());
        let rows = table.to_csv().lines().skip(1).map(|l| format!("{},{l}", fmt17(eps))).collect();
        let eigen: Vec<Value> = report
            .eigenvalues
            .iter()
            .map(|e| {
                json!({
                    "value": complex(e.value),
                    "residual": num(e.residual),
                    "condition": num(e.condition),
                    "error_estimate": num(e.error_estimate),
                    "two_grid_displacement": num(e.two_grid_displacement),
                    "multiplicity": e.multiplicity,
                })
            })
            .collect();
        let pred_json = pred.as_ref().map_or(Value::Null, |q| {
            json!({ "mu0": q.mu.iter().map(|&z| complex(z)).collect::<Vec<_>>(), "nu0": q.nu.iter().map(|&z| complex(z)).collect::<Vec<_>>() })
        });
        let (lo, hi) = p.range_closure();
        let in_range = report.eigenvalues.iter().all(|e| e.value.re >= 1.0 - UNIT_TOL && eps * e.value.im >= lo - 1e-6 && eps * e.value.im <= hi + 1e-6);
        Ok(JobOutput {
            csv_rows: rows,
            result: json!({
                "eps": num(eps),
                "half_width": num(grid.hi()),
                "nodes": grid.len(),
                "sigma": opt_num(report.sigma),
                "partial": report.partial,
                "rejected": report.rejected,
                "eigenvalues": eigen,
                "semiclassical": pred_json,
            }),
            checks: vec![("eigenvalues_in_numerical_range", in_range), ("complete", !report.partial)],
        })
    })?;
    Ok(per_job(format!("eps,{TABLE_CSV_HEADER}"), jobs))
}

pub fn cmd_sigma_fit(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let jobs = run_jobs(cfg, |i, eps, p| {
        let grid = rule.grid_for(p, eps)?;
        let report = compute_spectrum_with(p, eps, &grid, &spectrum_options(cfg, i, 1))?;
        let sigma = report.sigma.ok_or_else(|| anyhow::anyhow!("no validated eigenvalue"))?;
        let exact = exact_sigma(p, eps);
        Ok(JobOutput {
            csv_rows: vec![format!("{},{}", fmt17(eps), fmt17(sigma))],
            result: json!({ "eps": num(eps), "sigma": num(sigma), "exact_sigma": opt_num(exact) }),
            checks: vec![("sigma_at_least_one", sigma >= 1.0 - UNIT_TOL)],
        })
    })?;
    let p = cfg.potential.build()?;
    let (summary, ok) = sweep_fit(&jobs, "sigma", theory_slope(&p, Quantity::Sigma));
    Ok(RunOutput { csv_header: "eps,sigma".into(), jobs, summary: Some(summary), summary_ok: ok })
}

/// Horizon long enough for `e^{-12}` at the slower of the spectral and functional rates.
pub fn cmd_decay(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let recipe = cfg.recipe();
    let jobs = run_jobs(cfg, |_, eps, p| {
        let grid = rule.grid_for(p, eps)?;
        let params = make_params(recipe.tag(), eps, p, &grid)?;
        let t_final = cfg.t_final.unwrap_or_else(|| decay_horizon(p, eps, params.eta));
        let dt = EvolveOptions::default_dt(eps);
        let stride = ((t_final / dt) as usize / 60).max(1);
        let trace = evolve(p, eps, &grid, Some(&params), &EvolveOptions { t_final, stride, ..EvolveOptions::default() })?;
        let check = verify_decay(&trace, params.eta, DECAY_SLACK);
        let rows = trace.to_csv().lines().skip(1).map(|l| format!("{},{l}", fmt17(eps))).collect();
        let samples: Vec<Value> =
            (0..trace.times.len()).map(|j| json!({ "t": num(trace.times[j]), "norm_sq": num(trace.norm_sq[j]), "phi": num(trace.phi[j]) })).collect();
        Ok(JobOutput {
            csv_rows: rows,
            result: json!({
                "eps": num(eps),
                "recipe": recipe.tag().as_str(),
                "eta": num(params.eta),
                "eta_terms": params.eta_terms.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                "dt": num(trace.dt),
                "fitted_rate": opt_num(trace.fitted_rate),
                "worst_ratio": num(check.worst_ratio),
                "contraction_excess": num(trace.contraction_excess),
                "id1_residual": num(trace.id1_residual),
                "samples": samples,
            }),
            checks: vec![("verify_decay", check.holds), ("contraction", trace.contraction_excess <= CONTRACTION_TOL)],
        })
    })?;
    Ok(per_job(format!("eps,{DECAY_CSV_HEADER}"), jobs))
}

pub fn cmd_domain(cfg: &RunConfig) -> Result<RunOutput> {
    let rule = cfg.grid.rule();
    let jobs = run_jobs(cfg, |i, eps, p| {
        let grid = rule.grid_for(p, eps)?;
        let scan = scan_lambda(p, eps, &grid, cfg.scan_strategy(), &settings_for(cfg, i))?;
        let domain = avoided_domain(&scan);
        let rows = domain.boundary.iter().map(|&(re, im)| format!("{},{},{}", fmt17(eps), fmt17(re), fmt17(im))).collect();
        let boundary: Vec<Value> = domain.boundary.iter().map(|&(re, im)| json!({ "re": num(re), "im": num(im) })).collect();
        let reaches = domain.boundary.iter().all(|&(re, _)| re >= 0.5 * scan.psi * (1.0 - 1e-9));
        Ok(JobOutput {
            csv_rows: rows,
            result: json!({ "eps": num(eps), "psi": num(scan.psi), "boundary": boundary }),
            checks: vec![("boundary_beyond_half_psi", reaches)],
        })
    })?;
    Ok(per_job("eps,re,im".into(), jobs))
}
