use std::path::PathBuf;

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use skewho::hypocoercivity::RecipeTag;
use skewho::pseudospectrum::ScanStrategy;
use skewho::{GridRule, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Scan,
    Psi,
    Spectrum,
    SigmaFit,
    Decay,
    Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FKind {
    /// `(1 + x²)^(-k/2)`
    Fex,
    /// `(1 + 3x²) / (1 + x²/3)³`
    Bump,
    X2,
    X,
    /// `∫₀ˣ (1 + y²)^(-(k+1)/2) dy`
    Sl,
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Adaptive,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    Thm1,
    Quadratic,
    Linear,
    Tail,
    Profile,
}

impl Recipe {
    pub fn tag(self) -> RecipeTag {
        match self {
            Recipe::Thm1 => RecipeTag::Thm1,
            Recipe::Quadratic => RecipeTag::ModelQuadratic,
            Recipe::Linear => RecipeTag::ModelLinear,
            Recipe::Tail => RecipeTag::ModelTail,
            Recipe::Profile => RecipeTag::ProfileBeta,
        }
    }

    /// The model recipe matching a potential family.
    pub fn default_for(f: FKind) -> Self {
        match f {
            FKind::X2 => Recipe::Quadratic,
            FKind::X => Recipe::Linear,
            FKind::Sl => Recipe::Tail,
            FKind::Fex | FKind::Bump | FKind::Const => Recipe::Thm1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: FKind,
    /// Decay exponent for `fex` and `sl`, the value for `const`; ignored otherwise.
    #[serde(with = "f17_opt")]
    pub k: Option<f64>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        let k = |default: f64| self.k.unwrap_or(default);
        Ok(match self.kind {
            FKind::Fex => Potential::power_decay(k(4.0))?,
            FKind::Bump => Potential::double_bump(),
            FKind::X2 => Potential::quadratic(),
            FKind::X => Potential::linear(),
            FKind::Sl => Potential::smoothed_linear(k(2.0))?,
            FKind::Const => Potential::constant(k(0.0)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `None` is the automatic half-width.
    #[serde(with = "f17_opt")]
    pub half_width: Option<f64>,
    pub nodes: usize,
    /// Raise `nodes` until every potential well spans this many grid points.
    #[serde(with = "f17_opt", default)]
    pub points_per_well: Option<f64>,
}

impl GridSpec {
    pub fn rule(&self) -> GridRule {
        let rule = match self.half_width {
            Some(l) => GridRule::fixed(l, self.nodes),
            None => GridRule::auto(self.nodes),
        };
        match self.points_per_well {
            Some(ppw) => rule.resolving(ppw),
            None => rule,
        }
    }
}

/// Everything a run depends on. Serialized numbers are 17-digit decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub potential: PotentialSpec,
    #[serde(with = "f17_vec")]
    pub epsilons: Vec<f64>,
    pub grid: GridSpec,
    pub strategy: Strategy,
    /// Eigenvalues for `spectrum`, scan points for a uniform scan.
    pub n: Option<usize>,
    pub recipe: Option<Recipe>,
    #[serde(with = "f17_opt")]
    pub t_final: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).context("parsing run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The configuration as echoed into outputs: everything except the parallelism degree.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config is always serializable");
        v.as_object_mut().expect("struct serializes to an object").remove("jobs");
        v
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.epsilons.is_empty(), "no epsilon given (use --eps or --eps-list)");
        ensure!(self.epsilons.iter().all(|e| e.is_finite() && *e > 0.0), "epsilon values must be positive and finite");
        ensure!(self.jobs >= 1, "--jobs must be at least 1");
        ensure!(self.grid.nodes >= 3, "--N must be at least 3");
        if let Some(l) = self.grid.half_width {
            ensure!(l.is_finite() && l > 0.0, "--L must be positive");
        }
        if let Some(ppw) = self.grid.points_per_well {
            ensure!(ppw.is_finite() && ppw > 0.0, "--points-per-well must be positive");
        }
        if matches!(self.command, CommandKind::Psi | CommandKind::SigmaFit) {
            let mut sorted = self.epsilons.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            sorted.dedup();
            ensure!(sorted.len() >= 2, "{:?} needs at least two distinct epsilon values", self.command);
        }
        self.potential.build().map(|_| ())
    }

    pub fn scan_strategy(&self) -> ScanStrategy {
        match self.strategy {
            Strategy::Adaptive => ScanStrategy::Adaptive,
            Strategy::Uniform => ScanStrategy::Uniform { points: self.n.unwrap_or(201) },
        }
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe.unwrap_or_else(|| Recipe::default_for(self.potential.kind))
    }
}

/// One `ε` literal: a decimal number or `b^e`, the latter evaluated exactly for integer `e`.
pub fn parse_eps(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.trim().parse().with_context(|| format!("bad base in {s:?}"))?;
            let e = e.trim();
            match e.parse::<i32>() {
                Ok(e) => b.powi(e),
                Err(_) => b.powf(e.parse::<f64>().with_context(|| format!("bad exponent in {s:?}"))?),
            }
        }
        None => s.parse::<f64>().with_context(|| format!("bad epsilon {s:?}"))?,
    };
    if !(v.is_finite() && v > 0.0) {
        bail!("epsilon {s:?} is not positive and finite");
    }
    Ok(v)
}

fn power_of_two_exponent(s: &str) -> Option<i32> {
    let (b, e) = s.trim().split_once('^')?;
    (b.trim() == "2").then_some(())?;
    e.trim().parse().ok()
}

/// Comma-separated `ε` literals; `2^a..2^b` expands to every integer power in between.
pub fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = power_of_two_exponent(a)
                    .zip(power_of_two_exponent(b))
                    .ok_or_else(|| anyhow!("range {item:?} must have the form 2^a..2^b"))?;
                let step = if b >= a { 1 } else { -1 };
                let mut e = a;
                loop {
                    out.push(2f64.powi(e));
                    if e == b {
                        break;
                    }
                    e += step;
                }
            }
            None => out.push(parse_eps(item)?),
        }
    }
    ensure!(!out.is_empty(), "empty epsilon list");
    Ok(out)
}

/// Grid half-width: a positive number or `auto`.
pub fn parse_half_width(s: &str) -> Result<Option<f64>> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let v: f64 = s.trim().parse().with_context(|| format!("bad half-width {s:?}"))?;
    ensure!(v.is_finite() && v > 0.0, "half-width must be positive");
    Ok(Some(v))
}

pub mod f17 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use skewho::spectrum::fmt17;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt17(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

pub mod f17_opt {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use skewho::spectrum::fmt17;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&fmt17(*x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<String>::deserialize(d)?.map(|t| t.parse().map_err(D::Error::custom)).transpose()
    }
}

pub mod f17_vec {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use skewho::spectrum::fmt17;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| fmt17(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|t| t.parse().map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_are_exact() {
        assert_eq!(parse_eps("2^-14").unwrap(), 1.0 / 16384.0);
        assert_eq!(parse_eps(" 2^-18 ").unwrap(), 2f64.powi(-18));
        assert_eq!(parse_eps("1e-3").unwrap(), 1e-3);
        assert!(parse_eps("-1").is_err());
        assert!(parse_eps("2^x").is_err());
    }

    #[test]
    fn ranges_expand() {
        let v = parse_eps_list("2^-8..2^-11,0.5").unwrap();
        assert_eq!(v, vec![2f64.powi(-8), 2f64.powi(-9), 2f64.powi(-10), 2f64.powi(-11), 0.5]);
        assert!(parse_eps_list("0.1..0.01").is_err());
    }
}
