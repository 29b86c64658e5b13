use crate::pseudospectrum::ResolventScan;
use crate::spectrum::fmt17;

/// The region `ω_ε`: disks `|z − iλ| ≤ 1/(2κ(ε,λ))` together with `Re z ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AvoidedDomain {
    /// `(λ, 1/(2κ))` per scan point.
    pub disks: Vec<(f64, f64)>,
    /// Right boundary `(Re, Im)` sampled at every scan `λ`.
    pub boundary: Vec<(f64, f64)>,
}

pub fn avoided_domain(scan: &ResolventScan) -> AvoidedDomain {
    let disks: Vec<(f64, f64)> = scan.points.iter().map(|p| (p.lambda, 0.5 / p.kappa)).collect();
    let boundary = disks
        .iter()
        .map(|&(y, _)| {
            let re = disks
                .iter()
                .filter_map(|&(c, r)| {
                    let d = (y - c).abs();
                    (d <= r).then(|| (r * r - d * d).sqrt())
                })
                .fold(0.0, f64::max);
            (re, y)
        })
        .collect();
    AvoidedDomain { disks, boundary }
}

impl AvoidedDomain {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im\n");
        for &(re, im) in &self.boundary {
            out.push_str(&format!("{},{}\n", fmt17(re), fmt17(im)));
        }
        out
    }
}
