//! L1-regularized least squares over the word basis, solved with FISTA.
//!
//! The objective is `||target - v . D||^2 + alpha * ||v||_1` where the rows
//! of `D` are unit-norm basis vectors. The gradient step uses a Lipschitz
//! constant `L = 2 * sigma_max(D)^2` estimated once per dictionary by power
//! iteration, so a batch run shares it across all words.

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// L1 weight; larger means sparser.
    pub alpha: f64,
    pub max_iter: usize,
    /// Relative objective-change stopping threshold.
    pub rel_tol: f64,
    /// Word coefficients below this magnitude are zeroed after solving.
    pub clamp: f64,
}

impl SolverConfig {
    pub fn new(alpha: f64) -> SolverConfig {
        SolverConfig {
            alpha,
            max_iter: 1000,
            rel_tol: 1e-7,
            clamp: 0.001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        if self.clamp < 0.0 {
            return Err(Error::Config("clamp must be non-negative".into()));
        }
        Ok(())
    }
}

/// Proximal operator of the L1 norm: shrink toward zero by `t`.
pub fn soft_threshold(x: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .map(|&xi| xi.signum() * (xi.abs() - t).max(0.0))
        .collect()
}

#[derive(Debug, Clone)]
pub struct FistaResult {
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub objective: f64,
}

/// `L = 2 * lambda_max(D^T D)`, estimated with up to 30 power iterations
/// (stops early when the eigenvalue settles to 1e-10 relative).
pub fn estimate_lipschitz(dictionary: &[Vec<f64>]) -> Result<f64> {
    if dictionary.is_empty() {
        return Err(Error::Config("empty dictionary".into()));
    }
    let d = dictionary[0].len();
    let mut x = deterministic_unit_vector(d);
    let mut lambda = 0.0;
    for _ in 0..30 {
        // y = D^T (D x)
        let mut y = vec![0.0; d];
        for atom in dictionary {
            let u = math::dot(atom, &x);
            math::axpy(u, atom, &mut y);
        }
        let lambda_new = math::dot(&x, &y);
        let nrm = math::normalize(&mut y);
        if nrm == 0.0 {
            break;
        }
        x = y;
        if (lambda_new - lambda).abs() <= 1e-10 * lambda_new.abs().max(1.0) {
            lambda = lambda_new;
            break;
        }
        lambda = lambda_new;
    }
    let l = 2.0 * lambda;
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Numerical(format!("Lipschitz estimate {l} is not positive")));
    }
    Ok(l)
}

// splitmix64-based fill: reproducible everywhere, no RNG crate state involved
fn deterministic_unit_vector(d: usize) -> Vec<f64> {
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut v: Vec<f64> = (0..d)
        .map(|_| {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            (z as f64 / u64::MAX as f64) - 0.5
        })
        .collect();
    math::normalize(&mut v);
    v
}

pub fn fista_solve(
    target: &[f64],
    dictionary: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<FistaResult> {
    if dictionary.is_empty() {
        return Ok(FistaResult {
            coeffs: Vec::new(),
            iterations: 0,
            objective: math::norm_sq(target),
        });
    }
    let l = estimate_lipschitz(dictionary)?;
    fista_solve_with_l(target, dictionary, l, config)
}

/// FISTA with a precomputed Lipschitz constant. Returns the best iterate
/// seen, so the reported objective never exceeds the objective at v = 0.
pub fn fista_solve_with_l(
    target: &[f64],
    dictionary: &[Vec<f64>],
    l: f64,
    config: &SolverConfig,
) -> Result<FistaResult> {
    config.validate()?;
    if dictionary.is_empty() {
        return Ok(FistaResult {
            coeffs: Vec::new(),
            iterations: 0,
            objective: math::norm_sq(target),
        });
    }
    if !(l > 0.0) {
        return Err(Error::Numerical(format!("Lipschitz constant {l} is not positive")));
    }
    let n = dictionary.len();
    let d = target.len();
    let step = 1.0 / l;
    let thresh = config.alpha / l;

    let mut v = vec![0.0; n];
    let mut v_old = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut t: f64 = 1.0;
    let mut f_prev = math::norm_sq(target); // objective at v = 0
    let mut best = (v.clone(), f_prev);
    let mut iterations = 0;

    let mut recon = vec![0.0; d];
    for k in 1..=config.max_iter {
        iterations = k;

        // gradient of the smooth part at y
        recon.iter_mut().for_each(|r| *r = 0.0);
        for (yj, atom) in y.iter().zip(dictionary) {
            if *yj != 0.0 {
                math::axpy(*yj, atom, &mut recon);
            }
        }
        std::mem::swap(&mut v_old, &mut v);
        for j in 0..n {
            let mut g = 0.0;
            for (a, (ti, ri)) in dictionary[j].iter().zip(target.iter().zip(&recon)) {
                g += a * (ti - ri);
            }
            let grad_j = -2.0 * g;
            let z = y[j] - step * grad_j;
            v[j] = z.signum() * (z.abs() - thresh).max(0.0);
        }

        // objective at the new point
        recon.iter_mut().for_each(|r| *r = 0.0);
        let mut l1 = 0.0;
        for (vj, atom) in v.iter().zip(dictionary) {
            if *vj != 0.0 {
                math::axpy(*vj, atom, &mut recon);
                l1 += vj.abs();
            }
        }
        let mut fit = 0.0;
        for (ti, ri) in target.iter().zip(&recon) {
            fit += (ti - ri) * (ti - ri);
        }
        let f = fit + config.alpha * l1;
        if !f.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite value at iteration {k}"
            )));
        }
        if f < best.1 {
            best = (v.clone(), f);
        }

        let t_new = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_new;
        for j in 0..n {
            y[j] = v[j] + beta * (v[j] - v_old[j]);
        }
        t = t_new;

        let rel = (f - f_prev).abs() / f_prev.max(1e-12);
        f_prev = f;
        if rel < config.rel_tol {
            break;
        }
    }

    Ok(FistaResult {
        coeffs: best.0,
        iterations,
        objective: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_definition() {
        assert_eq!(soft_threshold(&[1.2, -0.3, 0.5], 0.5), vec![0.7, 0.0, 0.0]);
        let x = vec![0.4, -0.2, 0.0];
        assert_eq!(soft_threshold(&x, 0.0), x);
        assert_eq!(soft_threshold(&[0.0, 0.0], 123.0), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_target_gives_zero() {
        let dict = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let res = fista_solve(&[0.0, 0.0], &dict, &SolverConfig::new(0.1)).unwrap();
        assert!(res.coeffs.iter().all(|&c| c == 0.0));
        assert_eq!(res.objective, 0.0);
    }

    #[test]
    fn one_atom_closed_form() {
        // target = c*b with unit b: v* = sign(c) * max(|c| - alpha/2, 0)
        let mut b = vec![2.0, -1.0, 2.0];
        math::normalize(&mut b);
        for &(c, alpha) in &[(1.0, 0.35), (0.5, 0.1), (-0.8, 0.2), (0.1, 0.35)] {
            let target: Vec<f64> = b.iter().map(|x| c * x).collect();
            let res = fista_solve(&target, &[b.clone()], &SolverConfig::new(alpha)).unwrap();
            let expect = c.signum() * (c.abs() - alpha / 2.0).max(0.0);
            assert!(
                (res.coeffs[0] - expect).abs() <= 1e-8,
                "c={c} alpha={alpha}: got {} want {expect}",
                res.coeffs[0]
            );
        }
    }

    #[test]
    fn lipschitz_orthonormal_dictionary() {
        let dict = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let l = estimate_lipschitz(&dict).unwrap();
        assert!((l - 2.0).abs() < 1e-9, "{l}");
    }

    #[test]
    fn objective_never_exceeds_zero_vector() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..8);
            let d = rng.gen_range(2..6);
            let dict: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    math::normalize(&mut a);
                    a
                })
                .collect();
            let target: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let res = fista_solve(&target, &dict, &SolverConfig::new(0.2)).unwrap();
            assert!(res.objective <= math::norm_sq(&target) + 1e-12);
        }
    }

    #[test]
    fn subgradient_optimality_at_solution() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let alpha = 0.2;
        for _ in 0..10 {
            let n = 8;
            let d = 5;
            let dict: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    math::normalize(&mut a);
                    a
                })
                .collect();
            let target: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let mut config = SolverConfig::new(alpha);
            config.rel_tol = 1e-12;
            config.max_iter = 20_000;
            let res = fista_solve(&target, &dict, &config).unwrap();

            let mut recon = vec![0.0; d];
            for (c, atom) in res.coeffs.iter().zip(&dict) {
                math::axpy(*c, atom, &mut recon);
            }
            for (j, &cj) in res.coeffs.iter().enumerate() {
                let g = 2.0 * (math::dot(&dict[j], &recon) - math::dot(&dict[j], &target));
                if cj != 0.0 {
                    assert!((g + alpha * cj.signum()).abs() <= 1e-4, "active {j}: {g}");
                } else {
                    assert!(g.abs() <= alpha + 1e-4, "inactive {j}: {g}");
                }
            }
        }
    }
}
