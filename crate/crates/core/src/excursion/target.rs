use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::mc::{run_batches, Moments};

use super::functional::{ExcursionFunctional, LifetimeWeight};
use super::sim::McEstimate;

/// `kappa(r) = (2 pi r^3)^{-1/2}`
pub fn kappa(r: f64) -> f64 {
    (2.0 * PI * r * r * r).sqrt().recip()
}

/// Hitting-time density of level `alpha` for Brownian motion:
/// `alpha (2 pi r^3)^{-1/2} exp(-alpha^2 / (2r))`.
pub fn levy_density(alpha: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    alpha * kappa(r) * (-alpha * alpha / (2.0 * r)).exp()
}

/// Composite Simpson rule with `pieces` (rounded up to even) sub-intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = pieces.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Simpson on `[a, b]` split at the given interior points.
fn simpson_split(f: &impl Fn(f64) -> f64, a: f64, b: f64, splits: &[f64], pieces: usize) -> f64 {
    let mut cuts: Vec<f64> = splits.iter().copied().filter(|c| *c > a && *c < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| simpson(f, w[0], w[1], pieces)).sum()
}

/// `int_0^inf levy_density(alpha, r) dr` by Simpson quadrature in `log r`
/// over `alpha^2 [e^-12, e^40]`.
pub fn levy_density_mass(alpha: f64) -> f64 {
    let centre = (alpha * alpha).ln();
    simpson(|s| levy_density(alpha, s.exp()) * s.exp(), centre - 12.0, centre + 40.0, 20_000)
}

/// Density of the 3-d Bessel process at time `t` started at `x`:
/// `2 kappa(t) y^2 exp(-y^2 / 2t)` for `x = 0`, and
/// `(y / x) (phi_t(y - x) - phi_t(y + x))` for `x > 0`.
pub fn bessel_density(t: f64, x: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return 2.0 * kappa(t) * y * y * (-y * y / (2.0 * t)).exp();
    }
    let phi = |z: f64| (-z * z / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
    y / x * (phi(y - x) - phi(y + x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetOptions {
    pub n_bessel: usize,
    pub dt: f64,
    /// Simpson sub-intervals per smooth piece of the inner quadratures.
    pub quad_nodes: usize,
    pub seed: u64,
}

impl Default for TargetOptions {
    fn default() -> Self {
        Self { n_bessel: 10_000, dt: 1e-2, quad_nodes: 128, seed: 0 }
    }
}

/// `int_0^inf h(s + r) levy_density(a, r) dr`. The part `r >= U - s`, with
/// `U = constant_from`, is `value_beyond * erf(a / sqrt(2 (U - s)))`; the rest
/// is integrated in `log r`, split where `h` has kinks.
fn shifted_lifetime_average(h: &LifetimeWeight, s: f64, a: f64, nodes: usize) -> f64 {
    let u = h.constant_from();
    if s >= u {
        return h.value_beyond();
    }
    let upper = (u - s).ln();
    let mut lower = (a * a).ln() - 12.0;
    if let Some(zb) = h.zero_below() {
        if zb > s {
            lower = lower.max((zb - s).ln());
        }
    }
    let splits: Vec<f64> = h.kinks().iter().filter(|k| **k > s).map(|k| (k - s).ln()).collect();
    let density = |v: f64| {
        let r = v.exp();
        h.eval(s + r) * levy_density(a, r) * r
    };
    h.value_beyond() * libm::erf(a / (2.0 * (u - s)).sqrt()) + simpson_split(&density, lower, upper, &splits, nodes)
}

/// `int F dmu_exc`.
///
/// With no pairs this is `int h kappa dr`, by quadrature up to the point
/// where `h` becomes constant and `value_beyond * sqrt(2 / (pi U))` after it;
/// `h` must then vanish near `0`. With pairs, 3-d Bessel paths from 0 are
/// sampled on a grid and the Stieltjes sum of `H(s, rho_s) / rho_s` against
/// `d prod_i int_0^s f_i g_i(rho)` is averaged, where `H` is the average of
/// `h(s + r)` under the hitting-time density of level `rho_s`.
pub fn target_rhs(functional: &ExcursionFunctional, opts: &TargetOptions) -> Result<McEstimate> {
    let h = &functional.h;
    if functional.pairs.is_empty() {
        let zb = match h.zero_below() {
            Some(zb) if zb > 0.0 => zb,
            _ => {
                return Err(Error::PossiblyInfinite(format!(
                    "lifetime weight {} does not vanish near 0 and the excursion measure has infinite mass",
                    h.id()
                )))
            }
        };
        let cut = h.constant_from().max(zb);
        let body = if zb.is_finite() {
            simpson_split(&|s: f64| h.eval(s.exp()) * kappa(s.exp()) * s.exp(), zb.ln(), cut.ln(), &log_kinks(h), 4 * opts.quad_nodes.max(256))
        } else {
            0.0
        };
        let tail = if h.value_beyond() == 0.0 { 0.0 } else { h.value_beyond() * (2.0 / (PI * cut)).sqrt() };
        return Ok(McEstimate { mean: body + tail, std_error: 0.0, n: 0, censored: 0 });
    }
    if opts.n_bessel < 2 {
        return Err(invalid("n_bessel", "need at least two paths"));
    }
    if !(opts.dt > 0.0) {
        return Err(invalid("dt", "must be positive"));
    }
    let end = functional.pairs.iter().map(|(f, _)| f.support().1).fold(0.0, f64::max);
    let steps = (end / opts.dt).ceil() as usize;
    let sd = opts.dt.sqrt();
    let batches = run_batches(opts.n_bessel, opts.seed, |rng, count| {
        let mut m = Moments::default();
        let mut cum = vec![0.0; functional.pairs.len()];
        let mut integrand_prev = vec![0.0; functional.pairs.len()];
        for _ in 0..count {
            let mut w = [0.0f64; 3];
            cum.iter_mut().for_each(|c| *c = 0.0);
            integrand_prev.iter_mut().for_each(|c| *c = 0.0);
            let mut prod_prev = 0.0;
            let mut k_prev: Option<f64> = None;
            let mut value = 0.0;
            for k in 1..=steps {
                let s = k as f64 * opts.dt;
                for c in &mut w {
                    *c += sd * rng.sample::<f64, _>(StandardNormal);
                }
                let rho = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                for (i, (f, g)) in functional.pairs.iter().enumerate() {
                    let cur = f.eval(s) * g.eval(rho);
                    cum[i] += 0.5 * (integrand_prev[i] + cur) * opts.dt;
                    integrand_prev[i] = cur;
                }
                let prod: f64 = cum.iter().product();
                let dp = prod - prod_prev;
                prod_prev = prod;
                if dp == 0.0 {
                    k_prev = None;
                    continue;
                }
                let kk = shifted_lifetime_average(h, s, rho, opts.quad_nodes) / rho;
                value += match k_prev {
                    Some(kp) => 0.5 * (kp + kk) * dp,
                    None => kk * dp,
                };
                k_prev = Some(kk);
            }
            m.push(value);
        }
        m
    });
    let m: Moments = batches.into_iter().collect();
    Ok(McEstimate { mean: m.mean, std_error: m.std_error(), n: m.n, censored: 0 })
}

fn log_kinks(h: &LifetimeWeight) -> Vec<f64> {
    h.kinks().iter().filter(|k| **k > 0.0).map(|k| k.ln()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupReport {
    pub t: f64,
    pub x: f64,
    pub n_samples: usize,
    /// `int_0^inf` of the stated density, by quadrature.
    pub density_mass: f64,
    /// Largest gap between the empirical and the stated distribution function
    /// over the comparison grid.
    pub sup_deviation: f64,
    /// Largest pointwise Monte Carlo standard error `sqrt(F (1 - F) / N)`.
    pub mc_error: f64,
    pub passed: bool,
}

const CDF_GRID: usize = 200;

/// Samples `rho_t` started at `x` as `|x e_1 + W_t|` for a 3-d Brownian motion
/// `W` and compares its distribution function with the integral of
/// [`bessel_density`] on a grid of 200 points; passes if the sup deviation is
/// below three times the largest pointwise standard error.
pub fn bessel_semigroup_check(t: f64, x: f64, n_samples: usize, seed: u64) -> Result<SemigroupReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be positive"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid("x", "must be nonnegative"));
    }
    if n_samples == 0 {
        return Err(Error::EmptySample);
    }
    let sd = t.sqrt();
    let mut samples: Vec<f64> = run_batches(n_samples, seed, |rng, count| {
        (0..count)
            .map(|_| {
                let z: [f64; 3] = std::array::from_fn(|_| sd * rng.sample::<f64, _>(StandardNormal));
                ((x + z[0]).powi(2) + z[1] * z[1] + z[2] * z[2]).sqrt()
            })
            .collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect();
    samples.sort_by(f64::total_cmp);

    let y_max = x + 9.0 * sd;
    let step = y_max / CDF_GRID as f64;
    let density = |y: f64| bessel_density(t, x, y);
    let n = n_samples as f64;
    let (mut cdf, mut sup_deviation, mut mc_error) = (0.0, 0.0f64, 0.0f64);
    for j in 1..=CDF_GRID {
        let (y0, y1) = ((j - 1) as f64 * step, j as f64 * step);
        cdf += simpson(density, y0, y1, 32);
        let empirical = samples.partition_point(|s| *s <= y1) as f64 / n;
        sup_deviation = sup_deviation.max((empirical - cdf).abs());
        mc_error = mc_error.max((cdf * (1.0 - cdf)).max(0.0).sqrt() / n.sqrt());
    }
    Ok(SemigroupReport {
        t,
        x,
        n_samples,
        density_mass: cdf,
        sup_deviation,
        mc_error,
        passed: sup_deviation < 3.0 * mc_error,
    })
}
