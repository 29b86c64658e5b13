use crate::error::{Error, Result};
use crate::linalg::sturm_min_eigenvalue;
use crate::model::{assemble_hat_h, Grid, HatWeight, Potential, PotentialKind};

/// Parameter recipe for the functional `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecipeTag {
    /// Constant parameters from `K₂ = sup|f''|`, `K₃ = sup|f'''|`.
    Thm1,
    /// `f(x) = x²`: the [`RecipeTag::Thm1`] parameters with `ν = 1/2`.
    ModelQuadratic,
    /// `f(x) = x`: `γ = 0`.
    ModelLinear,
    /// `f' ~ |x|^{-k-1}` with no critical point.
    ModelTail,
    /// `x`-dependent `β` with `α`, `γ` slaved to it.
    ProfileBeta,
}

impl RecipeTag {
    pub const ALL: [RecipeTag; 5] =
        [RecipeTag::Thm1, RecipeTag::ModelQuadratic, RecipeTag::ModelLinear, RecipeTag::ModelTail, RecipeTag::ProfileBeta];

    pub fn as_str(self) -> &'static str {
        match self {
            RecipeTag::Thm1 => "thm1",
            RecipeTag::ModelQuadratic => "quadratic",
            RecipeTag::ModelLinear => "linear",
            RecipeTag::ModelTail => "tail",
            RecipeTag::ProfileBeta => "profile",
        }
    }
}

/// A parameter that is either constant or sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Scalar(f64),
    Profile(Vec<f64>),
}

impl Coefficient {
    pub fn at(&self, j: usize) -> f64 {
        match self {
            Coefficient::Scalar(v) => *v,
            Coefficient::Profile(v) => v[j],
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Coefficient::Scalar(v) => v.abs(),
            Coefficient::Profile(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    fn len_matches(&self, n: usize) -> bool {
        match self {
            Coefficient::Scalar(_) => true,
            Coefficient::Profile(v) => v.len() == n,
        }
    }
}

/// Piecewise `β`: `β₀` on `|x| ≤ A`, `β₀ (|x|/A)^{2k}` up to `B_ε = A ε^{-1/(2(k+4))}`, then constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaProfile {
    pub k: f64,
    pub a: f64,
    pub beta0: f64,
    pub b_eps: f64,
    pub epsilon: f64,
}

impl BetaProfile {
    /// `β₀` from `3β₀²K₃² ≤ 1/6` and `768 β₀² K₂² 2^{4k} ≤ 1/12`; `A` from the critical
    /// points and from `f'(x)² ≥ k² a²/(2|x|^{2k+2})` on `|x| ≥ A`, `a` the tail coefficient.
    pub fn for_potential(p: &Potential, eps: f64) -> Result<Self> {
        let (Some(k), Some(coef)) = (p.decay_exponent(), p.asymptotic_coefficient()) else {
            return Err(Error::Unsupported(format!("{} has no algebraic tail f ~ a|x|^-k", p.label())));
        };
        let k2 = p.sup_derivative(2);
        let k3 = p.sup_derivative(3);
        let beta0 = (1.0 / (18f64.sqrt() * k3)).min(1.0 / (96.0 * k2 * 4f64.powf(k)));
        let mut a = p.critical_points().iter().fold(0.0, |m: f64, c| m.max(c.abs())) + 1.0;
        let tail_ok = |x: f64| -> Result<bool> {
            let d1 = p.eval(x, 1)?;
            let dm = p.eval(-x, 1)?;
            let bound = k * k * coef * coef / (2.0 * x.powf(2.0 * k + 2.0));
            Ok(d1 * d1 >= bound && dm * dm >= bound)
        };
        // The inequality holds on a half-line; step outwards until it does on a long stretch.
        'search: loop {
            if a > 1e3 {
                return Err(Error::Unsupported(format!("no tail radius found for {}", p.label())));
            }
            for i in 0..400 {
                if !tail_ok(a * (1.0 + 0.05 * i as f64))? {
                    a += 0.05;
                    continue 'search;
                }
            }
            break;
        }
        Ok(Self { k, a, beta0, b_eps: a * eps.powf(-1.0 / (2.0 * (k + 4.0))), epsilon: eps })
    }

    pub fn beta(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.a {
            self.beta0
        } else if ax <= self.b_eps {
            self.beta0 * (ax / self.a).powf(2.0 * self.k)
        } else {
            self.beta_outer()
        }
    }

    pub fn beta_outer(&self) -> f64 {
        self.beta0 * self.epsilon.powf(-self.k / (self.k + 4.0))
    }

    /// One-sided derivatives `(β'(x⁻), β'(x⁺))`; they differ only at `±A` and `±B_ε`.
    pub fn beta_prime(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        let band = |y: f64| 2.0 * self.k * self.beta0 * y.powf(2.0 * self.k - 1.0) / self.a.powf(2.0 * self.k);
        let inside = |y: f64| y > self.a && y < self.b_eps;
        let (left, right) = if ax == self.a {
            (0.0, band(ax))
        } else if ax == self.b_eps {
            (band(ax), 0.0)
        } else if inside(ax) {
            (band(ax), band(ax))
        } else {
            (0.0, 0.0)
        };
        // (left, right) are taken along |x|; mirror for x < 0.
        if x < 0.0 {
            (-right, -left)
        } else {
            (left, right)
        }
    }
}

/// Lower bound `λ_min(−∂² + x² + w f'²) = M · s^e` used inside `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundEnergyConstant {
    /// Computed ground energy at the weight actually used.
    pub ground_energy: f64,
    /// `s` above: `2β/ε`, `β/ε` or `1/ε`.
    pub scale: f64,
    pub exponent: f64,
    /// `M = ground_energy / s^e`.
    pub constant: f64,
}

/// Parameters `(α, β, γ)` of `Φ` and the decay rate `η` they certify.
#[derive(Debug, Clone, PartialEq)]
pub struct HypoParams {
    pub recipe: RecipeTag,
    pub epsilon: f64,
    pub grid: Grid,
    pub alpha: Coefficient,
    pub beta: Coefficient,
    pub gamma: Coefficient,
    pub eta: f64,
    /// The candidates whose minimum is `η`, in recipe order.
    pub eta_terms: Vec<f64>,
    pub ground: Option<GroundEnergyConstant>,
    pub profile: Option<BetaProfile>,
}

fn ground_energy(p: &Potential, grid: &Grid, weight: &[f64], eps: f64) -> Result<f64> {
    let h = assemble_hat_h(p, eps, grid, HatWeight::Profile(weight))?;
    Ok(sturm_min_eigenvalue(&h)?)
}

/// Ground energy of `−∂² + x² + s f'²` with a constant weight `s`.
fn ground_energy_scaled(p: &Potential, grid: &Grid, s: f64) -> Result<f64> {
    // HatWeight::Profile multiplies β by 1/ε; pass ε = 1 and β ≡ s.
    ground_energy(p, grid, &vec![s; grid.len()], 1.0)
}

fn thm1_nu(p: &Potential) -> Result<f64> {
    match p.kind() {
        PotentialKind::Quadratic => Ok(0.5),
        PotentialKind::PowerDecay { .. } | PotentialKind::DoubleBump | PotentialKind::SmoothedLinear { .. } => {
            Ok(1.0 / (p.decay_exponent().expect("decaying kinds carry k") + 2.0))
        }
        _ => Err(Error::Unsupported(format!("no lower-bound exponent for {}", p.label()))),
    }
}

fn mismatch(recipe: RecipeTag, p: &Potential) -> Error {
    Error::Unsupported(format!("recipe {} does not apply to {}", recipe.as_str(), p.label()))
}

/// The three model cases: a nondegenerate critical point, no critical point, and a
/// critical point at infinity (`k = 2`).
pub fn model_catalog() -> Vec<(RecipeTag, Potential)> {
    vec![
        (RecipeTag::ModelQuadratic, Potential::quadratic()),
        (RecipeTag::ModelLinear, Potential::linear()),
        (RecipeTag::ModelTail, Potential::smoothed_linear(2.0).expect("k = 2 is admissible")),
    ]
}

/// Builds the parameters of `recipe` for `p` at `eps`; ground energies are computed on `grid`.
pub fn make_params(recipe: RecipeTag, eps: f64, p: &Potential, grid: &Grid) -> Result<HypoParams> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::ParameterCondition(format!("epsilon = {eps} must be positive")));
    }
    let base = |alpha, beta, gamma, eta_terms: Vec<f64>, ground, profile| {
        let eta = eta_terms.iter().copied().fold(f64::INFINITY, f64::min);
        HypoParams { recipe, epsilon: eps, grid: *grid, alpha, beta, gamma, eta, eta_terms, ground, profile }
    };
    match recipe {
        RecipeTag::Thm1 | RecipeTag::ModelQuadratic => {
            if recipe == RecipeTag::ModelQuadratic && !matches!(p.kind(), PotentialKind::Quadratic) {
                return Err(mismatch(recipe, p));
            }
            let nu = thm1_nu(p)?;
            let k2 = p.sup_derivative(2);
            let k3 = p.sup_derivative(3);
            let beta = (1.0 / (4.0 * k3)).min(1.0 / (32.0 * k2));
            if !beta.is_finite() {
                return Err(mismatch(recipe, p));
            }
            let alpha = (beta * eps / 4.0).sqrt();
            let gamma = 8.0 * (beta.powi(3) / eps).sqrt();
            let s = 2.0 * beta / eps;
            let e0 = ground_energy_scaled(p, grid, s)?;
            let ground = GroundEnergyConstant { ground_energy: e0, scale: s, exponent: nu, constant: e0 / s.powf(nu) };
            let terms = vec![1.0 / (6.0 * alpha), beta / (3.0 * eps * gamma), e0 / 4.0];
            Ok(base(Coefficient::Scalar(alpha), Coefficient::Scalar(beta), Coefficient::Scalar(gamma), terms, Some(ground), None))
        }
        RecipeTag::ModelLinear => {
            if !matches!(p.kind(), PotentialKind::Linear) {
                return Err(mismatch(recipe, p));
            }
            let alpha = (eps * eps / 16.0).cbrt();
            let beta = (eps / 32.0).cbrt();
            let terms = vec![1.0 / (3.0 * alpha), 2.0 * beta / (3.0 * eps)];
            Ok(base(Coefficient::Scalar(alpha), Coefficient::Scalar(beta), Coefficient::Scalar(0.0), terms, None, None))
        }
        RecipeTag::ModelTail => {
            let PotentialKind::SmoothedLinear { k } = *p.kind() else {
                return Err(mismatch(recipe, p));
            };
            let alpha = 0.5 * eps.powf(2.0 / (k + 4.0));
            let beta = eps.powf(-k / (k + 4.0));
            let gamma = 8.0 * eps.powf(-(2.0 * k + 2.0) / (k + 4.0));
            let nu = 1.0 / (k + 2.0);
            let s = beta / eps;
            let e0 = ground_energy_scaled(p, grid, s)?;
            let ground = GroundEnergyConstant { ground_energy: e0, scale: s, exponent: nu, constant: e0 / s.powf(nu) };
            let terms = vec![1.0 / (3.0 * alpha), beta / (3.0 * eps * gamma), e0 / 2.0];
            Ok(base(Coefficient::Scalar(alpha), Coefficient::Scalar(beta), Coefficient::Scalar(gamma), terms, Some(ground), None))
        }
        RecipeTag::ProfileBeta => {
            let prof = BetaProfile::for_potential(p, eps)?;
            let beta: Vec<f64> = grid.nodes().map(|x| prof.beta(x)).collect();
            let alpha: Vec<f64> = beta.iter().map(|b| (b * eps / 4.0).sqrt()).collect();
            let gamma: Vec<f64> = beta.iter().map(|b| 8.0 * (b.powi(3) / eps).sqrt()).collect();
            let nu_bar = 2.0 / (prof.k + 4.0);
            let e0 = ground_energy(p, grid, &beta, eps)?;
            let ground = GroundEnergyConstant { ground_energy: e0, scale: 1.0 / eps, exponent: nu_bar, constant: e0 * eps.powf(nu_bar) };
            let sup_alpha = alpha.iter().fold(0.0, |m: f64, &a| m.max(a));
            let sup_ratio = gamma.iter().zip(&beta).fold(0.0, |m: f64, (g, b)| m.max(g / b));
            let terms = vec![1.0 / (6.0 * sup_alpha), 1.0 / (6.0 * eps * sup_ratio), e0 / 8.0];
            Ok(base(
                Coefficient::Profile(alpha),
                Coefficient::Profile(beta),
                Coefficient::Profile(gamma),
                terms,
                Some(ground),
                Some(prof),
            ))
        }
    }
}

/// Checks `ε^{1/2}β'² ≤ cβ^{3/2}`, `εβ ≤ c` and `εβ'² ≤ cβ` at every node of the
/// parameter grid and at both one-sided limits of the four kinks.
pub fn beta_profile_check(params: &HypoParams, eps: f64, c: f64) -> bool {
    let Some(prof) = params.profile else {
        return false;
    };
    let prof = BetaProfile { b_eps: prof.a * eps.powf(-1.0 / (2.0 * (prof.k + 4.0))), epsilon: eps, ..prof };
    let ok = |x: f64| {
        let b = prof.beta(x);
        let (l, r) = prof.beta_prime(x);
        let d2 = l.powi(2).max(r.powi(2));
        eps.sqrt() * d2 <= c * b.powf(1.5) && eps * b <= c && eps * d2 <= c * b
    };
    let kinks = [-prof.b_eps, -prof.a, prof.a, prof.b_eps];
    params.grid.nodes().all(ok) && kinks.into_iter().all(ok)
}

impl HypoParams {
    /// Pointwise `4β² ≤ αγ`, or `4β²f'² ≤ α` where `γ = 0`.
    pub fn check_condition(&self, p: &Potential) -> Result<()> {
        let n = self.grid.len();
        if !(self.alpha.len_matches(n) && self.beta.len_matches(n) && self.gamma.len_matches(n)) {
            return Err(Error::ParameterCondition(format!("coefficient profiles do not match {n} nodes")));
        }
        for (j, x) in self.grid.nodes().enumerate() {
            let (a, b, g) = (self.alpha.at(j), self.beta.at(j), self.gamma.at(j));
            if a < 0.0 || g < 0.0 {
                return Err(Error::ParameterCondition(format!("negative α or γ at x = {x}")));
            }
            let ok = if g > 0.0 {
                4.0 * b * b <= a * g * (1.0 + 1e-12)
            } else {
                let d1 = p.eval(x, 1)?;
                4.0 * b * b * d1 * d1 <= a * (1.0 + 1e-12)
            };
            if !ok {
                return Err(Error::ParameterCondition(format!("4β² ≤ αγ fails at x = {x} (α = {a}, β = {b}, γ = {g})")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::symmetric(10.0, 2001).unwrap()
    }

    #[test]
    fn linear_rate_scales_like_eps_two_thirds() {
        let eps = 1e-3;
        let pr = make_params(RecipeTag::ModelLinear, eps, &Potential::linear(), &grid()).unwrap();
        let scaled = pr.eta * eps.powf(2.0 / 3.0);
        assert!((0.1..=10.0).contains(&scaled), "{scaled}");
        pr.check_condition(&Potential::linear()).unwrap();
    }

    #[test]
    fn quadratic_rate_scales_like_eps_half() {
        let p = Potential::quadratic();
        let scaled = |eps: f64| {
            let pr = make_params(RecipeTag::ModelQuadratic, eps, &p, &grid()).unwrap();
            // −∂² + x² + s·4x² has ground energy √(1 + 4s), s = 2β/ε, β = 1/64.
            let g = pr.ground.unwrap();
            let exact = (1.0 + 4.0 * g.scale).sqrt();
            assert!((g.ground_energy - exact).abs() < 1e-3 * exact);
            assert!((g.scale - 1.0 / (32.0 * eps)).abs() < 1e-12 * g.scale);
            pr.eta * eps.sqrt()
        };
        let (a, b) = (scaled(1e-2), scaled(1e-4));
        // The ground-energy term binds: η ε^{1/2} → (1/4)·2·(1/32)^{1/2} = 0.0884.
        assert!((a - (1.0 + 0.125 / 1e-2f64).sqrt() / 4.0 * 0.1).abs() < 1e-3, "{a}");
        assert!((b / a - 1.0).abs() < 0.05, "{a} {b}");
    }

    #[test]
    fn profile_saturates_the_condition() {
        let p = Potential::power_decay(4.0).unwrap();
        let pr = make_params(RecipeTag::ProfileBeta, 2f64.powi(-10), &p, &grid()).unwrap();
        for j in (0..pr.grid.len()).step_by(37) {
            let (a, b, g) = (pr.alpha.at(j), pr.beta.at(j), pr.gamma.at(j));
            assert!((4.0 * b * b - a * g).abs() <= 1e-12 * a * g);
        }
        let prof = pr.profile.unwrap();
        assert!(prof.a >= 1.0);
        assert!((prof.beta(prof.b_eps * 1.01) - prof.beta_outer()).abs() < 1e-15);
        // Continuous at both kinks.
        assert!((prof.beta(prof.b_eps) - prof.beta_outer()).abs() <= 1e-12 * prof.beta_outer());
        pr.check_condition(&p).unwrap();
    }

    #[test]
    fn profile_properties() {
        let p = Potential::power_decay(4.0).unwrap();
        let pr = make_params(RecipeTag::ProfileBeta, 1.0, &p, &grid()).unwrap();
        assert!(!beta_profile_check(&pr, 1.0, 1e-6));
        let mut seen_true = false;
        for e in 0..30 {
            let holds = beta_profile_check(&pr, 2f64.powi(-e), 0.1);
            assert!(!(seen_true && !holds), "flipped back at 2^-{e}");
            seen_true |= holds;
        }
        assert!(seen_true);
    }

    #[test]
    fn mismatched_recipes() {
        let g = grid();
        assert!(make_params(RecipeTag::ModelTail, 0.1, &Potential::quadratic(), &g).is_err());
        assert!(make_params(RecipeTag::ModelLinear, 0.1, &Potential::quadratic(), &g).is_err());
        assert!(make_params(RecipeTag::Thm1, 0.1, &Potential::linear(), &g).is_err());
        assert!(make_params(RecipeTag::ProfileBeta, 0.1, &Potential::linear(), &g).is_err());
        assert!(make_params(RecipeTag::ModelTail, 0.1, &Potential::smoothed_linear(2.0).unwrap(), &g).is_ok());
        assert!(make_params(RecipeTag::Thm1, 0.1, &Potential::power_decay(4.0).unwrap(), &g).is_ok());
    }
}
