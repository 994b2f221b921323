use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::mc::{run_batches, Moments};

use super::functional::{eval_functional, ExcursionFunctional};
use super::ExcursionPath;

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_HORIZON: f64 = 10.0;
pub const DEFAULT_N_PATHS: usize = 100_000;

/// Beyond this value of `2 x0 x1 / dt` the bridge crossing probability is
/// below `e^-40` and is not sampled.
const BRIDGE_CUTOFF: f64 = 40.0;

fn check_sim_params(eps: f64, dt: f64, horizon: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", "must be positive"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", "must be positive"));
    }
    Ok(())
}

/// Brownian motion from `eps` on the grid `k dt`, killed at the first grid
/// step that ends at or below 0 or whose Brownian bridge crosses 0 (which
/// happens with probability `exp(-2 x_k x_{k+1} / dt)`). The lifetime is the
/// grid time closing that step. Paths alive at `horizon` are censored.
fn simulate(rng: &mut ChaCha8Rng, eps: f64, dt: f64, horizon: f64) -> ExcursionPath {
    let steps = (horizon / dt).ceil().max(1.0) as usize;
    let sd = dt.sqrt();
    let mut times = vec![0.0];
    let mut values = vec![eps];
    let mut x = eps;
    for k in 1..=steps {
        let t = k as f64 * dt;
        let next = x + sd * rng.sample::<f64, _>(StandardNormal);
        let killed = next <= 0.0 || {
            let exponent = 2.0 * x * next / dt;
            exponent < BRIDGE_CUTOFF && rng.random::<f64>() < (-exponent).exp()
        };
        times.push(t);
        if killed {
            values.push(0.0);
            return ExcursionPath { times, values, zeta: t, censored: false };
        }
        values.push(next);
        x = next;
    }
    let zeta = *times.last().expect("nonempty");
    ExcursionPath { times, values, zeta, censored: true }
}

/// One killed Brownian path from `eps`, reproducible from `seed`.
pub fn sample_killed_bm(eps: f64, dt: f64, horizon: f64, seed: u64) -> Result<ExcursionPath> {
    check_sim_params(eps, dt, horizon)?;
    Ok(simulate(&mut ChaCha8Rng::seed_from_u64(seed), eps, dt, horizon))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    /// Paths still alive at the end of the simulation window.
    pub censored: u64,
}

/// `(1/eps) E_eps[F(B)]` for several functionals on the same simulated paths.
///
/// Each path is simulated up to the smaller of `horizon` and the time after
/// which none of the functionals depends on it.
pub fn empirical_lhs_multi(
    functionals: &[ExcursionFunctional],
    eps: f64,
    n_paths: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    check_sim_params(eps, dt, horizon)?;
    if n_paths < 100 {
        return Err(invalid("n_paths", "need at least 100 paths"));
    }
    let needed = functionals.iter().map(ExcursionFunctional::horizon_needed).fold(dt, f64::max);
    let window = needed.min(horizon);
    let batches = run_batches(n_paths, seed, |rng, count| -> Result<(Vec<Moments>, u64)> {
        let mut moments = vec![Moments::default(); functionals.len()];
        let mut censored = 0;
        for _ in 0..count {
            let path = simulate(rng, eps, dt, window);
            censored += u64::from(path.censored);
            for (m, functional) in moments.iter_mut().zip(functionals) {
                m.push(eval_functional(functional, &path)?);
            }
        }
        Ok((moments, censored))
    });
    let mut total = vec![Moments::default(); functionals.len()];
    let mut censored = 0;
    for batch in batches {
        let (moments, c) = batch?;
        censored += c;
        for (t, m) in total.iter_mut().zip(moments) {
            *t = t.merge(m);
        }
    }
    Ok(total
        .into_iter()
        .map(|m| McEstimate { mean: m.mean / eps, std_error: m.std_error() / eps, n: m.n, censored })
        .collect())
}

/// `(1/eps) E_eps[F(B)]` with its standard error.
pub fn empirical_lhs(
    functional: &ExcursionFunctional,
    eps: f64,
    n_paths: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(empirical_lhs_multi(std::slice::from_ref(functional), eps, n_paths, dt, horizon, seed)?[0])
}
