use crate::error::ModelError;
use crate::model::potential::{Potential, PotentialKind};

/// Default interior node count.
pub const DEFAULT_NODES: usize = 2000;

/// Uniform interior grid on `[lo, hi]` with Dirichlet ends.
///
/// Nodes are `x_j = lo + (j + 1) h` for `j = 0..n` with `h = (hi - lo) / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Self, ModelError> {
        if n < 3 {
            return Err(ModelError::GridTooSmall(n));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(ModelError::InvalidParameter(format!("grid interval [{lo}, {hi}] is empty")));
        }
        let g = Self { lo, hi, n };
        let h = g.spacing();
        if h * h < f64::MIN_POSITIVE / f64::EPSILON {
            return Err(ModelError::SpacingUnderflow(h));
        }
        Ok(g)
    }

    /// `[-L, L]` with `n` interior nodes.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self, ModelError> {
        if !(half_width > 0.0) {
            return Err(ModelError::InvalidParameter(format!("half-width {half_width} must be positive")));
        }
        Self::interval(-half_width, half_width, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n + 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.lo + (j + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n).map(move |j| self.lo + (j + 1) as f64 * h)
    }

    /// Same interval, `2n + 1` nodes: every old node is kept and the spacing halves.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n + 1, ..*self }
    }
}

/// How a grid is chosen for a given `(potential, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRule {
    /// `None` selects the automatic half-width.
    pub half_width: Option<f64>,
    pub nodes: usize,
    /// Raise `nodes` until every critical-point well of width
    /// `|1 + i f''(x_c)/(2ε)|^{-1/4}` spans at least this many spacings.
    pub points_per_well: Option<f64>,
}

impl Default for GridRule {
    fn default() -> Self {
        Self { half_width: None, nodes: DEFAULT_NODES, points_per_well: None }
    }
}

impl GridRule {
    pub fn fixed(half_width: f64, nodes: usize) -> Self {
        Self { half_width: Some(half_width), nodes, points_per_well: None }
    }

    pub fn auto(nodes: usize) -> Self {
        Self { half_width: None, nodes, points_per_well: None }
    }

    pub fn resolving(self, points_per_well: f64) -> Self {
        Self { points_per_well: Some(points_per_well), ..self }
    }

    pub fn grid_for(&self, p: &Potential, eps: f64) -> Result<Grid, ModelError> {
        let l = self.half_width.unwrap_or_else(|| auto_half_width(p, eps));
        let mut n = self.nodes;
        if let Some(ppw) = self.points_per_well {
            let width = well_width(p, eps)?;
            let needed = (2.0 * l * ppw / width).ceil();
            if needed.is_finite() && needed > n as f64 {
                n = needed as usize;
            }
        }
        Grid::symmetric(l, n)
    }
}

/// Narrowest harmonic length scale `|1 + i f''(x_c)/(2ε)|^{-1/4}` over the critical points (1 if none).
pub fn well_width(p: &Potential, eps: f64) -> Result<f64, ModelError> {
    let mut width: f64 = 1.0;
    for &xc in p.critical_points() {
        let c2 = p.eval(xc, 2)?;
        width = width.min(1.0f64.hypot(c2 / (2.0 * eps)).powf(-0.25));
    }
    Ok(width)
}

/// `L = max(8, 3 (k / 2ε)^{1/(k+2)})`: wide enough to contain the outer wells
/// at `|z_ε| ≈ (k / 2ε)^{1/(k+2)}` of the decaying kinds. Other kinds use 8.
pub fn auto_half_width(p: &Potential, eps: f64) -> f64 {
    let k = match p.kind() {
        PotentialKind::PowerDecay { .. } | PotentialKind::DoubleBump => p.decay_exponent(),
        _ => None,
    };
    match k {
        Some(k) => (3.0 * (k / (2.0 * eps)).powf(1.0 / (k + 2.0))).max(8.0),
        None => 8.0,
    }
}

/// The rescaled annulus `K_j`: `[-1, 1]` for `j = 0`, `[-1, -1/4] ∪ [1/4, 1]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicGrid {
    pub j: u32,
    pub nodes_per_interval: usize,
}

impl DyadicGrid {
    pub const DEFAULT_NODES: usize = 800;

    pub fn new(j: u32, nodes_per_interval: usize) -> Self {
        Self { j, nodes_per_interval }
    }

    /// The one or two Dirichlet pieces making up `K_j`.
    pub fn pieces(&self) -> Result<Vec<Grid>, ModelError> {
        if self.j == 0 {
            Ok(vec![Grid::interval(-1.0, 1.0, self.nodes_per_interval)?])
        } else {
            Ok(vec![
                Grid::interval(-1.0, -0.25, self.nodes_per_interval)?,
                Grid::interval(0.25, 1.0, self.nodes_per_interval)?,
            ])
        }
    }
}
