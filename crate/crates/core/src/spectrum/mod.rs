//! Validated eigenvalues, the spectral bound `Σ(ε)`, semiclassical predictions
//! and scaling fits.

mod compute;
mod scaling;
mod semiclassical;
mod table;

pub use compute::{
    compute_spectrum, compute_spectrum_with, conjecture_check, exact_sigma, sigma_of_epsilon, ConjectureReport, SpectrumOptions, SpectrumReport,
    ValidatedEigenvalue, ValidationPolicy,
};
pub use scaling::{scaling_fit, theory_slope, Quantity, ScalingFit};
pub use semiclassical::{semiclassical_predict, Branch, SemiclassicalPrediction};
pub use table::{fmt17, SpectrumTable, TableRow, TABLE_CSV_HEADER};
