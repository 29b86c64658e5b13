//! Banded complex linear algebra: LU solves, singular value and eigenvalue kernels.

mod eig;
mod extended;
mod lu;
mod refine;
mod settings;
mod sturm;
mod svd;

pub use eig::{all_eigenvalues, sort_spectrum, symmetrize};
pub use extended::{refine_extended, ExtendedLu};
pub use lu::{banded_lu_solve, BandedLu, PIVOT_FLOOR_PER_ROW};
pub use refine::{shift_invert_refine, EigenPair};
pub use settings::SolverSettings;
pub use sturm::{sturm_count, sturm_eigenvalue, sturm_min_eigenvalue};
pub use svd::{bordered_smallest_singular_value, inverse_norm, smallest_singular_value, SingularEstimate};
