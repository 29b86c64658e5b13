use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hypocoercivity::HypoParams;
use crate::model::{Grid, Potential};

/// Per-node `(|u|², |u'|² + x²|u|², Re(ū' i f' u), f'²|u|²)` with central differences and zero ends.
fn densities<'a>(u: &'a [Complex64], p: &'a Potential, grid: &'a Grid) -> impl Iterator<Item = Result<[f64; 4]>> + 'a {
    let h = grid.spacing();
    let n = u.len();
    let zero = Complex64::new(0.0, 0.0);
    grid.nodes().enumerate().map(move |(j, x)| {
        let left = if j > 0 { u[j - 1] } else { zero };
        let right = if j + 1 < n { u[j + 1] } else { zero };
        let du = (right - left) / (2.0 * h);
        let d1 = p.eval(x, 1)?;
        let m = u[j].norm_sqr();
        let cross = (du.conj() * Complex64::i() * d1 * u[j]).re;
        Ok([m, du.norm_sqr() + x * x * m, cross, d1 * d1 * m])
    })
}

fn check_lengths(u: &[Complex64], grid: &Grid) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::ParameterCondition(format!("state has {} entries for {} nodes", u.len(), grid.len())));
    }
    Ok(())
}

/// `Φ(u) = ∫ ½|u|² + (α/2)(|u'|² + x²|u|²) + β Re(ū' i f' u) + (γ/2) f'²|u|²`.
///
/// Rejects parameters violating the positivity condition and verifies `Φ ≥ ¼‖u‖²`.
pub fn phi_value(u: &[Complex64], params: &HypoParams, p: &Potential, eps: f64, grid: &Grid) -> Result<f64> {
    check_lengths(u, grid)?;
    if grid != &params.grid || eps != params.epsilon {
        return Err(Error::ParameterCondition("parameters were built for another grid or epsilon".into()));
    }
    params.check_condition(p)?;
    let (mut phi, mut mass) = (0.0, 0.0);
    for (j, d) in densities(u, p, grid).enumerate() {
        let [m, e, c, w] = d?;
        phi += 0.5 * m + 0.5 * params.alpha.at(j) * e + params.beta.at(j) * c + 0.5 * params.gamma.at(j) * w;
        mass += m;
    }
    let h = grid.spacing();
    let (phi, mass) = (phi * h, mass * h);
    if phi < 0.25 * mass * (1.0 - 1e-12) {
        return Err(Error::ParameterCondition(format!("Φ = {phi:e} below ‖u‖²/4 = {:e}", 0.25 * mass)));
    }
    Ok(phi)
}

/// `∫ ½|u|² + (3α/4)(|u'|² + x²|u|²) + (3γ/4) f'²|u|²`, an upper bound for `Φ` when `4β² ≤ αγ`.
pub fn phi_upper(u: &[Complex64], params: &HypoParams, p: &Potential, grid: &Grid) -> Result<f64> {
    check_lengths(u, grid)?;
    let mut acc = 0.0;
    for (j, d) in densities(u, p, grid).enumerate() {
        let [m, e, _, w] = d?;
        acc += 0.5 * m + 0.75 * params.alpha.at(j) * e + 0.75 * params.gamma.at(j) * w;
    }
    Ok(acc * grid.spacing())
}

/// Discrete `‖u‖²`.
pub fn norm_sq(u: &[Complex64], h: f64) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypocoercivity::{make_params, Coefficient, RecipeTag};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, grid: &Grid) -> Vec<Complex64> {
        let c = rng.gen_range(-3.0..3.0);
        let w = rng.gen_range(0.3..2.0);
        let kx = rng.gen_range(-5.0..5.0);
        grid.nodes()
            .map(|x| {
                let env = (-(x - c) * (x - c) / (2.0 * w * w)).exp();
                Complex64::from_polar(env, kx * x) + Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01)) * env
            })
            .collect()
    }

    #[test]
    fn trivial_values() {
        let g = Grid::symmetric(8.0, 401).unwrap();
        let p = Potential::quadratic();
        let mut pr = make_params(RecipeTag::ModelQuadratic, 0.1, &p, &g).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); g.len()];
        assert_eq!(phi_value(&zero, &pr, &p, 0.1, &g).unwrap(), 0.0);
        pr.alpha = Coefficient::Scalar(0.0);
        pr.beta = Coefficient::Scalar(0.0);
        pr.gamma = Coefficient::Scalar(0.0);
        let u: Vec<Complex64> = g.nodes().map(|x| Complex64::new((-x * x).exp(), x)).collect();
        let phi = phi_value(&u, &pr, &p, 0.1, &g).unwrap();
        assert!((phi - 0.5 * norm_sq(&u, g.spacing())).abs() < 1e-14);
    }

    #[test]
    fn sandwich_on_random_states() {
        let g = Grid::symmetric(8.0, 801).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (recipe, p) in [
            (RecipeTag::ModelQuadratic, Potential::quadratic()),
            (RecipeTag::ModelTail, Potential::smoothed_linear(2.0).unwrap()),
            (RecipeTag::ProfileBeta, Potential::power_decay(4.0).unwrap()),
        ] {
            let pr = make_params(recipe, 0.01, &p, &g).unwrap();
            for _ in 0..50 {
                let u = random_state(&mut rng, &g);
                let phi = phi_value(&u, &pr, &p, 0.01, &g).unwrap();
                assert!(phi >= 0.25 * norm_sq(&u, g.spacing()));
                assert!(phi <= phi_upper(&u, &pr, &p, &g).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn rejects_violated_condition() {
        let g = Grid::symmetric(8.0, 201).unwrap();
        let p = Potential::quadratic();
        let mut pr = make_params(RecipeTag::ModelQuadratic, 0.1, &p, &g).unwrap();
        pr.beta = Coefficient::Scalar(10.0);
        let u = vec![Complex64::new(1.0, 0.0); g.len()];
        assert!(matches!(phi_value(&u, &pr, &p, 0.1, &g), Err(Error::ParameterCondition(_))));
    }
}
