//! The real potential family `f` entering `H = -d²/dx² + x² + (i/ε) f(x)`.
//!
//! Every analytic kind carries hand-derived closed forms for `f`, `f'`, `f''`
//! and `f'''`. Tabulated potentials are interpolated by a natural cubic spline.

use std::f64::consts::FRAC_PI_4;

use crate::ddouble::Dd;
use crate::error::ModelError;
use crate::quadrature::tanh_sinh;

/// Which member of the family a [`Potential`] is.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `f(x) = (1 + x²)^(-k/2)`.
    PowerDecay { k: f64 },
    /// `f(x) = (1 + 3x²) / (1 + x²/3)³`, critical values 1 and 27/16, decay `81 |x|^-4`.
    DoubleBump,
    /// `f(x) = x²`.
    Quadratic,
    /// `f(x) = x`.
    Linear,
    /// `f(x) = ∫₀ˣ (1 + y²)^(-(k+1)/2) dy`.
    SmoothedLinear { k: f64 },
    /// `f(x) = c`.
    Constant { c: f64 },
    /// Natural cubic spline through user samples.
    Tabulated(CubicSpline),
}

/// A potential together with the metadata the analysis layers rely on.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    /// `None` for kinds that do not decay like `|x|^-k` (the "infinite" flag).
    decay_exponent: Option<f64>,
    critical_points: Vec<f64>,
    critical_values: Vec<f64>,
    range_closure: (f64, f64),
    /// Value of `f(∞)` for [`PotentialKind::SmoothedLinear`], cached.
    tail_limit: f64,
    /// The evaluated potential is `scale · f + offset`.
    scale: f64,
    offset: f64,
}

impl Potential {
    pub fn power_decay(k: f64) -> Result<Self, ModelError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("decay exponent k = {k} must be positive")));
        }
        Ok(Self {
            kind: PotentialKind::PowerDecay { k },
            decay_exponent: Some(k),
            critical_points: vec![0.0],
            critical_values: vec![1.0],
            range_closure: (0.0, 1.0),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        })
    }

    pub fn double_bump() -> Self {
        Self {
            kind: PotentialKind::DoubleBump,
            decay_exponent: Some(4.0),
            critical_points: vec![-1.0, 0.0, 1.0],
            critical_values: vec![1.0, 27.0 / 16.0],
            range_closure: (0.0, 27.0 / 16.0),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn quadratic() -> Self {
        Self {
            kind: PotentialKind::Quadratic,
            decay_exponent: None,
            critical_points: vec![0.0],
            critical_values: vec![0.0],
            range_closure: (0.0, f64::INFINITY),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: PotentialKind::Linear,
            decay_exponent: None,
            critical_points: vec![],
            critical_values: vec![],
            range_closure: (f64::NEG_INFINITY, f64::INFINITY),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn smoothed_linear(k: f64) -> Result<Self, ModelError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("decay exponent k = {k} must be positive")));
        }
        // ∫₀^{π/2} cos^{k-1}θ dθ split at π/4 so both halves have a regular upper end.
        let a = tanh_sinh(|t| (t).cos().powf(k - 1.0), FRAC_PI_4);
        let b = tanh_sinh(|t| (t).sin().powf(k - 1.0), FRAC_PI_4);
        let limit = a + b;
        Ok(Self {
            kind: PotentialKind::SmoothedLinear { k },
            decay_exponent: Some(k),
            critical_points: vec![],
            critical_values: vec![],
            range_closure: (-limit, limit),
            tail_limit: limit,
            scale: 1.0,
            offset: 0.0,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            kind: PotentialKind::Constant { c },
            decay_exponent: None,
            critical_points: vec![],
            // Every point is critical; the single level value is what the scans need.
            critical_values: vec![c],
            range_closure: (c, c),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        }
    }

    /// `f ≡ 0`, the pure harmonic oscillator.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ModelError> {
        let spline = CubicSpline::natural(xs, ys)?;
        let critical_points = spline.critical_points();
        let mut critical_values: Vec<f64> = critical_points.iter().map(|&x| spline.eval(x, 0)).collect();
        critical_values.sort_by(f64::total_cmp);
        critical_values.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in spline.ys.iter().chain(critical_values.iter()) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        Ok(Self {
            kind: PotentialKind::Tabulated(spline),
            decay_exponent: None,
            critical_points,
            critical_values,
            range_closure: (lo, hi),
            tail_limit: 0.0,
            scale: 1.0,
            offset: 0.0,
        })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn decay_exponent(&self) -> Option<f64> {
        self.decay_exponent
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    /// Sorted, deduplicated critical values `cv(f)`.
    pub fn critical_values(&self) -> &[f64] {
        &self.critical_values
    }

    /// Closure of `f(ℝ)` as `[inf f, sup f]`; infinite ends for unbounded kinds.
    pub fn range_closure(&self) -> (f64, f64) {
        self.range_closure
    }

    pub fn is_constant(&self) -> bool {
        self.scale == 0.0 || matches!(self.kind, PotentialKind::Constant { .. })
    }

    /// `f(-x) = f(x)` for every `x`. Tabulated samples are never treated as even.
    pub fn is_even(&self) -> bool {
        self.is_constant()
            || matches!(self.kind, PotentialKind::PowerDecay { .. } | PotentialKind::DoubleBump | PotentialKind::Quadratic)
    }

    /// The constant `a` with `|x|^k f(x) → a`, for kinds decaying to zero.
    pub fn asymptotic_coefficient(&self) -> Option<f64> {
        if self.offset != 0.0 {
            return None;
        }
        match self.kind {
            PotentialKind::PowerDecay { .. } => Some(self.scale),
            PotentialKind::DoubleBump => Some(81.0 * self.scale),
            _ => None,
        }
    }

    /// Short CLI-style label.
    pub fn label(&self) -> String {
        let base = self.base_label();
        match (self.scale, self.offset) {
            (s, o) if s == 1.0 && o == 0.0 => base,
            (s, o) => format!("{s}*{base}+{o}"),
        }
    }

    fn base_label(&self) -> String {
        match &self.kind {
            PotentialKind::PowerDecay { k } => format!("fex(k={k})"),
            PotentialKind::DoubleBump => "bump".into(),
            PotentialKind::Quadratic => "x2".into(),
            PotentialKind::Linear => "x".into(),
            PotentialKind::SmoothedLinear { k } => format!("sl(k={k})"),
            PotentialKind::Constant { c } => format!("const(c={c})"),
            PotentialKind::Tabulated(s) => format!("tabulated({} samples)", s.xs.len()),
        }
    }

    /// The potential `scale · f + offset`; critical values and range follow.
    pub fn affine(&self, scale: f64, offset: f64) -> Self {
        let mut out = self.clone();
        out.scale *= scale;
        out.offset = scale * self.offset + offset;
        out.critical_values = self.critical_values.iter().map(|c| scale * c + offset).collect();
        out.critical_values.sort_by(f64::total_cmp);
        let (a, b) = self.range_closure;
        let (a, b) = (scale * a + offset, scale * b + offset);
        out.range_closure = if a <= b { (a, b) } else { (b, a) };
        if scale == 0.0 {
            out.range_closure = (offset, offset);
        }
        out
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        self.affine(1.0, c)
    }

    /// `-f`.
    pub fn negated(&self) -> Self {
        self.affine(-1.0, 0.0)
    }

    /// `∂ₓ^order f(x)`, closed form for every analytic kind.
    pub fn eval(&self, x: f64, order: u8) -> Result<f64, ModelError> {
        if order > 3 {
            return Err(ModelError::DerivativeOrder(order));
        }
        let base = self.eval_base(x, order)?;
        Ok(if order == 0 { self.scale * base + self.offset } else { self.scale * base })
    }

    /// `f(x)` in double-double arithmetic, for kinds with a rational or
    /// integer-power closed form. `None` for the other kinds.
    pub fn eval_extended(&self, x: Dd) -> Option<Dd> {
        let base = match &self.kind {
            PotentialKind::PowerDecay { k } if k.fract() == 0.0 && *k <= 64.0 => {
                let s = Dd::ONE + x.sqr();
                let m = (*k as i32) / 2;
                if (*k as i32) % 2 == 0 {
                    s.powi(-m)
                } else {
                    s.powi(-m) / s.sqrt()
                }
            }
            PotentialKind::DoubleBump => {
                let x2 = x.sqr();
                (Dd::ONE + x2 * 3.0) / (Dd::ONE + x2 / Dd::new(3.0)).powi(3)
            }
            PotentialKind::Quadratic => x.sqr(),
            PotentialKind::Linear => x,
            PotentialKind::Constant { c } => Dd::new(*c),
            _ => return None,
        };
        Some(base * self.scale + Dd::new(self.offset))
    }

    fn eval_base(&self, x: f64, order: u8) -> Result<f64, ModelError> {
        Ok(match &self.kind {
            PotentialKind::PowerDecay { k } => power_decay(*k, x, order),
            PotentialKind::DoubleBump => double_bump(x, order),
            PotentialKind::Quadratic => match order {
                0 => x * x,
                1 => 2.0 * x,
                2 => 2.0,
                _ => 0.0,
            },
            PotentialKind::Linear => match order {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            },
            PotentialKind::SmoothedLinear { k } => smoothed_linear(*k, self.tail_limit, x, order),
            PotentialKind::Constant { c } => {
                if order == 0 {
                    *c
                } else {
                    0.0
                }
            }
            PotentialKind::Tabulated(s) => {
                let (lo, hi) = s.support();
                if x < lo || x > hi {
                    return Err(ModelError::Extrapolation { x, lo, hi });
                }
                s.eval(x, order)
            }
        })
    }

    /// `sup |f^(order)|`, closed form where it is known, otherwise a fine sampling.
    pub fn sup_derivative(&self, order: u8) -> f64 {
        if order == 0 {
            let (a, b) = self.range_closure;
            return a.abs().max(b.abs());
        }
        self.scale.abs() * self.sup_base_derivative(order)
    }

    fn sup_base_derivative(&self, order: u8) -> f64 {
        match (&self.kind, order) {
            (PotentialKind::Quadratic, 2) => 2.0,
            (PotentialKind::Quadratic, 3) => 0.0,
            (PotentialKind::Linear, 2 | 3) => 0.0,
            (PotentialKind::Constant { .. }, 1..=3) => 0.0,
            (PotentialKind::Quadratic | PotentialKind::Linear, _) => f64::INFINITY,
            (PotentialKind::Tabulated(s), _) => {
                let (lo, hi) = s.support();
                sample_sup(|x| s.eval(x, order).abs(), lo, hi, 20_001)
            }
            _ => {
                // Derivatives of the decaying kinds live on |x| ≲ 5; beyond that they fall off.
                sample_sup(|x| self.eval_base(x, order).map(f64::abs).unwrap_or(0.0), -60.0, 60.0, 240_001)
            }
        }
    }
}

fn sample_sup(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| g(lo + i as f64 * h)).fold(0.0, f64::max)
}

fn power_decay(k: f64, x: f64, order: u8) -> f64 {
    // f = s^a with s = 1 + x², a = -k/2.
    let a = -0.5 * k;
    let s = 1.0 + x * x;
    match order {
        0 => s.powf(a),
        1 => 2.0 * a * x * s.powf(a - 1.0),
        2 => 2.0 * a * s.powf(a - 1.0) + 4.0 * a * (a - 1.0) * x * x * s.powf(a - 2.0),
        _ => {
            12.0 * a * (a - 1.0) * x * s.powf(a - 2.0)
                + 8.0 * a * (a - 1.0) * (a - 2.0) * x * x * x * s.powf(a - 3.0)
        }
    }
}

fn double_bump(x: f64, order: u8) -> f64 {
    // f = p · q⁻³, p = 1 + 3x², q = 1 + x²/3; Leibniz rule on the product.
    let p = [1.0 + 3.0 * x * x, 6.0 * x, 6.0, 0.0];
    let q = 1.0 + x * x / 3.0;
    let dq = 2.0 * x / 3.0;
    let ddq = 2.0 / 3.0;
    let g = [
        q.powi(-3),
        -3.0 * q.powi(-4) * dq,
        12.0 * q.powi(-5) * dq * dq - 3.0 * q.powi(-4) * ddq,
        -60.0 * q.powi(-6) * dq.powi(3) + 36.0 * q.powi(-5) * dq * ddq,
    ];
    const BINOM: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0],
        [1.0, 3.0, 3.0, 1.0],
    ];
    let n = order as usize;
    (0..=n).map(|i| BINOM[n][i] * p[i] * g[n - i]).sum()
}

fn smoothed_linear(k: f64, limit: f64, x: f64, order: u8) -> f64 {
    let s = 1.0 + x * x;
    match order {
        0 => {
            let ax = x.abs();
            let value = if ax <= 1.0 {
                // y = tan θ turns the integrand into cos^{k-1}θ on [0, atan|x|].
                tanh_sinh(|t| t.cos().powf(k - 1.0), ax.atan())
            } else {
                limit - tanh_sinh(|t| t.sin().powf(k - 1.0), (1.0 / ax).atan())
            };
            value.copysign(x)
        }
        1 => s.powf(-0.5 * (k + 1.0)),
        2 => -(k + 1.0) * x * s.powf(-0.5 * (k + 3.0)),
        _ => -(k + 1.0) * s.powf(-0.5 * (k + 3.0)) + (k + 1.0) * (k + 3.0) * x * x * s.powf(-0.5 * (k + 5.0)),
    }
}

/// Natural cubic spline; third derivative is piecewise constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ModelError> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(ModelError::InvalidParameter(
                "tabulated potential needs at least 3 (x, f) samples of equal length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParameter("tabulated abscissae must be finite and strictly increasing".into()));
        }
        // Thomas algorithm on the interior second-derivative system.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            r[i] = (rhs - h0 * r[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = r[i] - c[i] * m[i + 1];
        }
        Ok(Self { xs, ys, m })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64, order: u8) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = x1 - x;
        let b = x - x0;
        match order {
            0 => m0 * a.powi(3) / (6.0 * h) + m1 * b.powi(3) / (6.0 * h) + (y0 / h - m0 * h / 6.0) * a + (y1 / h - m1 * h / 6.0) * b,
            1 => -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0) + (y1 / h - m1 * h / 6.0),
            2 => (m0 * a + m1 * b) / h,
            _ => (m1 - m0) / h,
        }
    }

    /// Zeros of the spline derivative (a quadratic on each segment).
    fn critical_points(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for i in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let h = x1 - x0;
            let d0 = self.eval(x0, 1);
            let d1 = self.eval(x1, 1);
            let dm = self.eval(0.5 * (x0 + x1), 1);
            // Quadratic through the three derivative samples in t = (x - x0)/h.
            let qa = 2.0 * d0 - 4.0 * dm + 2.0 * d1;
            let qb = -3.0 * d0 + 4.0 * dm - d1;
            let qc = d0;
            let mut roots = Vec::new();
            if qa.abs() < 1e-14 * (qb.abs() + qc.abs()).max(1e-300) {
                if qb != 0.0 {
                    roots.push(-qc / qb);
                }
            } else {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let q = -0.5 * (qb + sq.copysign(qb));
                    roots.push(q / qa);
                    if q != 0.0 {
                        roots.push(qc / q);
                    }
                }
            }
            for t in roots {
                if (0.0..=1.0).contains(&t) {
                    let x = x0 + t * h;
                    if out.last().is_none_or(|&l| (x - l).abs() > 1e-12 * h) {
                        out.push(x);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}
