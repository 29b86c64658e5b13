//! Second-order finite-difference assembly of `H_ε - iλ`, the dyadic operators
//! `P_{j,ε,λ}` and the self-adjoint companion `Ĥ_ε`.

use num_complex::Complex64;

use crate::ddouble::{CDd, Dd};
use crate::error::ModelError;
use crate::model::grid::{DyadicGrid, Grid};
use crate::model::matrix::{ComplexBandedMatrix, ExtendedTridiagonal, SymTridiagonal};
use crate::model::potential::Potential;

/// Parameters of one discretized operator.
#[derive(Debug, Clone, Copy)]
pub struct OperatorConfig<'a> {
    pub potential: &'a Potential,
    pub epsilon: f64,
    /// The operator is shifted by `-iλ`.
    pub lambda: f64,
    /// Dyadic index `j` for `P_{j,ε,λ}`; must be unset for the whole-line operator.
    pub scale_j: Option<u32>,
}

impl<'a> OperatorConfig<'a> {
    pub fn new(potential: &'a Potential, epsilon: f64, lambda: f64) -> Self {
        Self { potential, epsilon, lambda, scale_j: None }
    }

    pub fn dyadic(potential: &'a Potential, epsilon: f64, lambda: f64, j: u32) -> Self {
        Self { potential, epsilon, lambda, scale_j: Some(j) }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !self.lambda.is_finite() {
            return Err(ModelError::InvalidParameter("lambda must be finite".into()));
        }
        Ok(())
    }
}

/// `H_ε - iλ` on `grid`: diagonal `2/h² + x² + i (f(x)/ε - λ)`, off-diagonals `-1/h²`.
pub fn assemble_h(cfg: &OperatorConfig<'_>, grid: &Grid) -> Result<ComplexBandedMatrix, ModelError> {
    if cfg.scale_j.is_some() {
        return Err(ModelError::DyadicScaleSet);
    }
    cfg.validate()?;
    let (diag, off) = dilated_operator(cfg, grid, 0)?;
    Ok(ComplexBandedMatrix::new(off.clone(), diag, off).expect("consistent lengths"))
}

/// Invariant subspace of the reflection `x ↦ -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Restriction of `H_ε - iλ` to even or odd grid functions on a symmetric grid.
///
/// Coordinates are isometric (`√2·u_j` for mirrored pairs, `u_0` for a center
/// node), so the block is complex symmetric and its eigenvalues and singular
/// values are exactly those of the full matrix on that subspace. The union of
/// the two sectors' spectra is the spectrum of [`assemble_h`].
pub fn assemble_h_sector(cfg: &OperatorConfig<'_>, grid: &Grid, parity: Parity) -> Result<ComplexBandedMatrix, ModelError> {
    if cfg.scale_j.is_some() {
        return Err(ModelError::DyadicScaleSet);
    }
    cfg.validate()?;
    if !cfg.potential.is_even() {
        return Err(ModelError::InvalidParameter(format!("{} is not even; parity sectors do not decouple", cfg.potential.label())));
    }
    if grid.lo() != -grid.hi() {
        return Err(ModelError::InvalidParameter("parity sectors need a symmetric grid".into()));
    }
    let (diag, off) = dilated_operator(cfg, grid, 0)?;
    let n = grid.len();
    let m = n / 2;
    let lap = -off[0].re;
    let (mut d, mut o): (Vec<Complex64>, Vec<Complex64>) = (diag[m..].to_vec(), off[m..].to_vec());
    if n % 2 == 1 {
        // Center node at x = 0.
        match parity {
            Parity::Even => o[0] *= std::f64::consts::SQRT_2,
            Parity::Odd => {
                d.remove(0);
                o.remove(0);
            }
        }
    } else {
        // Nodes ±h/2 straddle the origin; the mirrored neighbour folds onto the diagonal.
        match parity {
            Parity::Even => d[0] -= lap,
            Parity::Odd => d[0] += lap,
        }
    }
    if d.is_empty() {
        return Err(ModelError::GridTooSmall(n));
    }
    Ok(ComplexBandedMatrix::new(o.clone(), d, o).expect("consistent lengths"))
}

/// Node positions carried by the coordinates of [`assemble_h_sector`] (the
/// non-negative half, ascending), or all nodes when `parity` is `None`.
pub fn sector_nodes(grid: &Grid, parity: Option<Parity>) -> Vec<f64> {
    let n = grid.len();
    let start = match parity {
        None => 0,
        Some(Parity::Odd) if n % 2 == 1 => n / 2 + 1,
        Some(_) => n / 2,
    };
    (start..n).map(|j| grid.node(j)).collect()
}

/// [`assemble_h`] (`parity = None`) or [`assemble_h_sector`] with every entry
/// formed in double-double arithmetic, nodes included. Potentials without an
/// extended evaluator fall back to promoted `f64` values and say so in
/// [`ExtendedTridiagonal::entries_extended`].
pub fn assemble_h_extended(cfg: &OperatorConfig<'_>, grid: &Grid, parity: Option<Parity>) -> Result<ExtendedTridiagonal, ModelError> {
    if cfg.scale_j.is_some() {
        return Err(ModelError::DyadicScaleSet);
    }
    cfg.validate()?;
    if parity.is_some() && !cfg.potential.is_even() {
        return Err(ModelError::InvalidParameter(format!("{} is not even; parity sectors do not decouple", cfg.potential.label())));
    }
    let n = grid.len();
    let lo = Dd::new(grid.lo());
    let h = (Dd::new(grid.hi()) - lo) / Dd::from((n + 1) as u64);
    let lap = h.sqr().recip();
    let eps = Dd::new(cfg.epsilon);
    let mut extended = true;
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let x = lo + h * Dd::from((j + 1) as u64);
        let f = match cfg.potential.eval_extended(x) {
            Some(v) => v,
            None => {
                extended = false;
                Dd::new(cfg.potential.eval(x.to_f64(), 0)?)
            }
        };
        diag.push(CDd::new(lap * 2.0 + x.sqr(), f / eps - Dd::new(cfg.lambda)));
    }
    let mut off = vec![CDd::new(-lap, Dd::ZERO); n - 1];
    if let Some(parity) = parity {
        if grid.lo() != -grid.hi() {
            return Err(ModelError::InvalidParameter("parity sectors need a symmetric grid".into()));
        }
        let m = n / 2;
        diag.drain(..m);
        off.drain(..m);
        if n % 2 == 1 {
            match parity {
                Parity::Even => off[0] = off[0].scale(Dd::new(2.0).sqrt()),
                Parity::Odd => {
                    diag.remove(0);
                    off.remove(0);
                }
            }
        } else {
            let fold = CDd::new(lap, Dd::ZERO);
            match parity {
                Parity::Even => diag[0] -= fold,
                Parity::Odd => diag[0] += fold,
            }
        }
        if diag.is_empty() {
            return Err(ModelError::GridTooSmall(n));
        }
    }
    Ok(ExtendedTridiagonal::new(off.clone(), diag, off, extended).expect("consistent lengths"))
}

/// `P_{j,ε,λ} = -4^{-j} ∂² + 4^j x² + (i/ε) f(2^j x) - iλ` with Dirichlet ends on each piece of `K_j`.
pub fn assemble_p_dyadic(cfg: &OperatorConfig<'_>, grid: &DyadicGrid) -> Result<ComplexBandedMatrix, ModelError> {
    let j = cfg
        .scale_j
        .ok_or_else(|| ModelError::InvalidParameter("dyadic assembly needs scale_j".into()))?;
    if j != grid.j {
        return Err(ModelError::InvalidParameter(format!("config j = {j} but grid covers K_{}", grid.j)));
    }
    cfg.validate()?;
    let mut diag = Vec::new();
    let mut off = Vec::new();
    for (piece_idx, piece) in grid.pieces()?.iter().enumerate() {
        if piece_idx > 0 {
            // Decoupled blocks.
            off.push(Complex64::new(0.0, 0.0));
        }
        let (d, o) = dilated_operator(cfg, piece, j)?;
        diag.extend(d);
        off.extend(o);
    }
    Ok(ComplexBandedMatrix::new(off.clone(), diag, off).expect("consistent lengths"))
}

/// Couplings `(node, −4^{-j}/h²)` from the end nodes of each piece of `K_j` to the
/// neighbours just outside it, one per piece end.
pub fn dyadic_exit_couplings(grid: &DyadicGrid) -> Result<Vec<(usize, Complex64)>, ModelError> {
    let dil = 2f64.powi(grid.j as i32);
    let mut rows = Vec::new();
    let mut start = 0;
    for piece in grid.pieces()? {
        let h = piece.spacing();
        let c = Complex64::new(-1.0 / (dil * dil * h * h), 0.0);
        rows.push((start, c));
        rows.push((start + piece.len() - 1, c));
        start += piece.len();
    }
    Ok(rows)
}

fn dilated_operator(
    cfg: &OperatorConfig<'_>,
    grid: &Grid,
    j: u32,
) -> Result<(Vec<Complex64>, Vec<Complex64>), ModelError> {
    let h = grid.spacing();
    let dil = 2f64.powi(j as i32);
    let lap = 1.0 / (dil * dil * h * h);
    let mut diag = Vec::with_capacity(grid.len());
    for x in grid.nodes() {
        let f = cfg.potential.eval(dil * x, 0)?;
        diag.push(Complex64::new(2.0 * lap + dil * dil * x * x, f / cfg.epsilon - cfg.lambda));
    }
    let off = vec![Complex64::new(-lap, 0.0); grid.len() - 1];
    Ok((diag, off))
}

/// Weight in front of `f'(x)²` in the self-adjoint operator.
#[derive(Debug, Clone, Copy)]
pub enum HatWeight<'a> {
    /// `1/ε²`: `Ĥ_ε = -∂² + x² + ε⁻² f'²`.
    Commutator,
    /// Per-node `β(x_j)/ε`.
    Profile(&'a [f64]),
}

/// Real symmetric tridiagonal discretization of `-∂² + x² + w(x) f'(x)²`.
pub fn assemble_hat_h(p: &Potential, eps: f64, grid: &Grid, weight: HatWeight<'_>) -> Result<SymTridiagonal, ModelError> {
    if !(eps > 0.0) {
        return Err(ModelError::InvalidParameter(format!("epsilon = {eps} must be positive")));
    }
    if let HatWeight::Profile(beta) = weight {
        if beta.len() != grid.len() {
            return Err(ModelError::InvalidParameter(format!(
                "beta profile has {} entries for {} nodes",
                beta.len(),
                grid.len()
            )));
        }
    }
    let h = grid.spacing();
    let lap = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(grid.len());
    for (idx, x) in grid.nodes().enumerate() {
        let d1 = p.eval(x, 1)?;
        let w = match weight {
            HatWeight::Commutator => 1.0 / (eps * eps),
            HatWeight::Profile(beta) => beta[idx] / eps,
        };
        diag.push(2.0 * lap + x * x + w * d1 * d1);
    }
    Ok(SymTridiagonal::new(diag, vec![-lap; grid.len() - 1]).expect("consistent lengths"))
}

/// Vertical gap `dist(ελ, closure f(ℝ)) / ε` between `iλ` and the strip
/// containing the numerical range; zero when `ελ` lies in the closure.
pub fn numerical_range_gap(p: &Potential, eps: f64, lambda: f64) -> f64 {
    let (lo, hi) = p.range_closure();
    let el = eps * lambda;
    let d = if el < lo {
        lo - el
    } else if el > hi {
        el - hi
    } else {
        0.0
    };
    d / eps
}

/// `1 / dist(iλ, R_ε)` where `R_ε = {Re z ≥ 1, ε Im z ∈ closure f(ℝ)}`.
pub fn numerical_range_bound(p: &Potential, eps: f64, lambda: f64) -> f64 {
    1.0 / numerical_range_gap(p, eps, lambda).hypot(1.0)
}
