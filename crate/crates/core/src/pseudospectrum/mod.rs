//! Resolvent norms `κ(ε, λ) = ‖(H_ε − iλ)⁻¹‖` along the imaginary axis, the
//! pseudospectral bound `Ψ(ε)`, regime envelopes, dyadic localization and the
//! avoided domain `ω_ε`.

mod domain;
mod kappa;
mod localized;
mod regimes;
mod scan;

pub use domain::{avoided_domain, AvoidedDomain};
pub use kappa::{kappa, kappa_two_grid, KappaFlag, KappaValue};
pub use localized::{kappa_sandwich, localized_bound, LocalizedBoundReport, SandwichReport};
pub use regimes::{classify_regimes, infinity_peak_lambda, regime_exponent, regime_tag, RegimePrediction, RegimeTag};
pub use scan::{lambda_max, psi_of_epsilon, scan_lambda, PsiEntry, ResolventScan, ScanPoint, ScanStrategy, SCAN_CSV_HEADER};
