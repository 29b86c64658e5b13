mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewho::linalg::{all_eigenvalues, banded_lu_solve, bordered_smallest_singular_value, shift_invert_refine, smallest_singular_value};
use skewho::{Complex64, SolverSettings};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn oracles_agree_on_closed_forms() {
    let d = vec![vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -4.0)]];
    assert_eq!(jacobi_singular_values(&d), vec![3.0, 4.0]);
    let t = skewho::ComplexBandedMatrix::new(vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(2.0, 0.0); 2], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let mut roots: Vec<f64> = aberth_eigenvalues(&t).iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    assert!((roots[0] - 1.0).abs() < 1e-14 && (roots[1] - 3.0).abs() < 1e-14);
    let x = dense_solve(t.to_dense(), vec![Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)]);
    assert!((x[0] - 1.0).norm() < 1e-15 && (x[1] - 1.0).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn banded_solve_matches_dense_elimination(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_tridiagonal(&mut r, 32);
        let b: Vec<Complex64> = (0..32).map(|i| Complex64::new((i as f64).sin(), 1.0 / (1.0 + i as f64))).collect();
        let x = banded_lu_solve(&a, &b).unwrap();
        let y = dense_solve(a.to_dense(), b);
        let diff: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p - q).collect();
        prop_assert!(norm(&diff) < 1e-10 * norm(&y), "{}", norm(&diff) / norm(&y));
    }

    #[test]
    fn smallest_singular_value_matches_jacobi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_tridiagonal(&mut r, 48);
        let est = smallest_singular_value(&a, &SolverSettings::default()).unwrap();
        let oracle = jacobi_singular_values(&a.to_dense())[0];
        prop_assert!((est.value - oracle).abs() < 1e-8 * oracle, "{} vs {}", est.value, oracle);
    }

    #[test]
    fn bordered_singular_value_matches_jacobi(seed in any::<u64>(), cut in 8usize..40) {
        let mut r = rng(seed);
        let a = random_tridiagonal(&mut r, 48);
        let mut sub = a.sub().to_vec();
        sub[cut - 1] = Complex64::new(0.0, 0.0);
        let mut sup = a.sup().to_vec();
        sup[cut - 1] = Complex64::new(0.0, 0.0);
        let block = skewho::ComplexBandedMatrix::new(sub, a.diag().to_vec(), sup).unwrap();
        let mut draw = || Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let rows = [(0, draw()), (cut - 1, draw()), (cut, draw()), (47, draw())];
        let mut dense = block.to_dense();
        for &(i, v) in &rows {
            let mut row = vec![Complex64::new(0.0, 0.0); 48];
            row[i] = v;
            dense.push(row);
        }
        let est = bordered_smallest_singular_value(&block, &rows, &SolverSettings::default()).unwrap();
        let oracle = jacobi_singular_values(&dense)[0];
        prop_assert!((est.value - oracle).abs() < 1e-8 * oracle, "{} vs {}", est.value, oracle);
    }

    #[test]
    fn eigenvalues_match_characteristic_roots(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_tridiagonal(&mut r, 24);
        let ev = all_eigenvalues(&a, &SolverSettings::default()).unwrap();
        let roots = aberth_eigenvalues(&a);
        prop_assert!(matching_distance(&ev, &roots) < 1e-8 * a.norm_inf());
    }

    #[test]
    fn refinement_lands_on_the_nearest_eigenvalue(seed in any::<u64>(), pick in 0usize..32) {
        let mut r = rng(seed);
        let a = random_tridiagonal(&mut r, 32);
        let ev = all_eigenvalues(&a, &SolverSettings::default()).unwrap();
        let target = ev[pick];
        let gap = ev.iter().filter(|z| **z != target).map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-3);
        let shift = target + Complex64::new(0.1 * gap, 0.05 * gap);
        let pair = shift_invert_refine(&a, shift, &SolverSettings::default()).unwrap();
        prop_assert!((pair.value - target).norm() < 1e-9 * a.norm_inf().max(1.0), "{} vs {}", pair.value, target);
    }
}
