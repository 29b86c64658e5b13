use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Iteration controls shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Absolute deflation threshold for the QR/QL sweeps. `None` uses the local
    /// test `|e_m| ≤ u (|d_m| + |d_{m+1}|)` with `u` the unit roundoff.
    pub deflation_tol: Option<f64>,
    pub seed: u64,
    /// Largest dimension accepted by [`all_eigenvalues`](super::all_eigenvalues).
    pub eig_cap: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { max_iters: 500, rel_tol: 1e-11, deflation_tol: None, seed: 0x5eed, eig_cap: 8192 }
    }
}

impl SolverSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}
