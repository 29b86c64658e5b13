use crate::model::{numerical_range_gap, Potential, PotentialKind};
use crate::pseudospectrum::ResolventScan;

/// Which resolvent estimate governs `κ(ε, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegimeTag {
    /// `ελ` outside the closure of `f(ℝ)`: `κ ≤ ε/δ`.
    RangeGap,
    /// `ελ` away from `cv(f) ∪ {0}`: `κ = O(ε^{2/3})`.
    Generic2_3,
    /// `ελ` within 10% of a nonzero critical value: `κ = O(ε^{1/2})`.
    CriticalSpike1_2,
    /// `λ = 0`, or `|λ| < λ_∞/10` for decaying potentials.
    LambdaZero,
    /// `|λ| ∈ [λ_∞/10, 10 λ_∞]` with `λ_∞ = ε^{-4/(k+4)}`: `κ = O(ε^{2/(k+4)})`.
    #[allow(non_camel_case_types)]
    InfinityPeak2_k4,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 5] =
        [RegimeTag::RangeGap, RegimeTag::Generic2_3, RegimeTag::CriticalSpike1_2, RegimeTag::LambdaZero, RegimeTag::InfinityPeak2_k4];

    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::RangeGap => "RangeGap",
            RegimeTag::Generic2_3 => "Generic2_3",
            RegimeTag::CriticalSpike1_2 => "CriticalSpike1_2",
            RegimeTag::LambdaZero => "LambdaZero",
            RegimeTag::InfinityPeak2_k4 => "InfinityPeak2_k4",
        }
    }
}

/// Decay exponent `k` for the kinds with `f(x) → 0` like `|x|^{-k}`.
pub(crate) fn decaying_exponent(p: &Potential) -> Option<f64> {
    match p.kind() {
        PotentialKind::PowerDecay { .. } | PotentialKind::DoubleBump => p.decay_exponent(),
        _ => None,
    }
}

/// `ε^{-4/(k+4)}`, the location of the resolvent maximum for decaying potentials.
pub fn infinity_peak_lambda(k: f64, eps: f64) -> f64 {
    eps.powf(-4.0 / (k + 4.0))
}

pub fn regime_tag(p: &Potential, eps: f64, lambda: f64) -> RegimeTag {
    if numerical_range_gap(p, eps, lambda) > 0.0 {
        return RegimeTag::RangeGap;
    }
    let el = eps * lambda;
    if p.critical_values().iter().any(|&c| c != 0.0 && (el - c).abs() <= 0.1 * c.abs()) {
        return RegimeTag::CriticalSpike1_2;
    }
    match decaying_exponent(p) {
        Some(k) => {
            let r = lambda.abs() / infinity_peak_lambda(k, eps);
            if r < 0.1 {
                RegimeTag::LambdaZero
            } else if r <= 10.0 {
                RegimeTag::InfinityPeak2_k4
            } else {
                RegimeTag::Generic2_3
            }
        }
        None if lambda == 0.0 => RegimeTag::LambdaZero,
        None => RegimeTag::Generic2_3,
    }
}

fn zero_in_range(p: &Potential) -> bool {
    let (lo, hi) = p.range_closure();
    (lo < 0.0 && hi > 0.0) || p.critical_values().contains(&0.0)
}

/// Exponent `a` in the envelope `κ ≲ C ε^a` for each regime.
///
/// For `λ = 0` the exponent depends on whether `0 ∈ f(ℝ)` and `0 ∈ cv(f)`;
/// non-decaying kinds drop the `2/(k+2)` candidate.
pub fn regime_exponent(p: &Potential, tag: RegimeTag) -> f64 {
    let k = decaying_exponent(p);
    match tag {
        RegimeTag::RangeGap => 1.0,
        RegimeTag::Generic2_3 => 2.0 / 3.0,
        RegimeTag::CriticalSpike1_2 => 0.5,
        RegimeTag::InfinityPeak2_k4 => k.map_or(0.0, |k| 2.0 / (k + 4.0)),
        RegimeTag::LambdaZero => {
            let decay = k.map_or(f64::INFINITY, |k| 2.0 / (k + 2.0));
            if !zero_in_range(p) {
                if decay.is_finite() {
                    decay
                } else {
                    1.0
                }
            } else if p.critical_values().contains(&0.0) {
                decay.min(0.5)
            } else {
                decay.min(2.0 / 3.0)
            }
        }
    }
}

/// Predicted envelope for one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimePrediction {
    pub tag: RegimeTag,
    /// `a` in `κ ≲ C ε^a`.
    pub exponent: f64,
    /// Where the regime peaks at the fitting `ε`: `c/ε` per critical value,
    /// `λ_∞` for the infinity peak, 0 for `LambdaZero`.
    pub lambda_location: Vec<f64>,
    /// `C = max κ / ε^a` over the tagged points of the scan with the smallest `ε`.
    pub constant: Option<f64>,
    pub fit_epsilon: Option<f64>,
}

/// Envelope constants per tag, fitted on the smallest-`ε` scan that contains the tag.
pub fn classify_regimes(scans: &[ResolventScan], p: &Potential) -> Vec<RegimePrediction> {
    let mut out = Vec::new();
    for tag in RegimeTag::ALL {
        let exponent = regime_exponent(p, tag);
        let fit = scans
            .iter()
            .filter_map(|s| {
                let m = s.points.iter().filter(|q| q.tag == tag && q.kappa.is_finite()).map(|q| q.kappa).fold(f64::NAN, f64::max);
                (!m.is_nan()).then_some((s.epsilon, m))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let Some((eps, max_kappa)) = fit else { continue };
        let lambda_location = match tag {
            RegimeTag::CriticalSpike1_2 => p.critical_values().iter().filter(|&&c| c != 0.0).map(|c| c / eps).collect(),
            RegimeTag::InfinityPeak2_k4 => decaying_exponent(p).map(|k| vec![infinity_peak_lambda(k, eps)]).unwrap_or_default(),
            RegimeTag::LambdaZero => vec![0.0],
            _ => vec![],
        };
        out.push(RegimePrediction { tag, exponent, lambda_location, constant: Some(max_kappa / eps.powf(exponent)), fit_epsilon: Some(eps) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_for_double_bump() {
        let p = Potential::double_bump();
        let eps = 2f64.powi(-14);
        assert_eq!(regime_tag(&p, eps, -1.0), RegimeTag::RangeGap);
        assert_eq!(regime_tag(&p, eps, 2.0 / eps), RegimeTag::RangeGap);
        assert_eq!(regime_tag(&p, eps, 1.02 / eps), RegimeTag::CriticalSpike1_2);
        assert_eq!(regime_tag(&p, eps, 27.0 / 16.0 / eps), RegimeTag::CriticalSpike1_2);
        assert_eq!(regime_tag(&p, eps, 0.0), RegimeTag::LambdaZero);
        assert_eq!(regime_tag(&p, eps, 128.0), RegimeTag::InfinityPeak2_k4);
        assert_eq!(regime_tag(&p, eps, 0.5 / eps), RegimeTag::Generic2_3);
    }

    #[test]
    fn lambda_zero_exponents() {
        assert_eq!(regime_exponent(&Potential::double_bump(), RegimeTag::LambdaZero), 1.0 / 3.0);
        assert_eq!(regime_exponent(&Potential::power_decay(1.0).unwrap(), RegimeTag::LambdaZero), 2.0 / 3.0);
        assert_eq!(regime_exponent(&Potential::quadratic(), RegimeTag::LambdaZero), 0.5);
        assert_eq!(regime_exponent(&Potential::linear(), RegimeTag::LambdaZero), 2.0 / 3.0);
        assert_eq!(regime_exponent(&Potential::power_decay(4.0).unwrap(), RegimeTag::InfinityPeak2_k4), 0.25);
    }
}
