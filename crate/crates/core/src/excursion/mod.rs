//! Excursion paths, the excursion metric, killed Brownian motion and the
//! excursion-measure functionals.

mod functional;
mod sim;
mod target;

pub use functional::{eval_functional, ExcursionFunctional, LifetimeWeight, SpaceWeight, TimeWeight};
pub use sim::{empirical_lhs, empirical_lhs_multi, sample_killed_bm, McEstimate, DEFAULT_DT, DEFAULT_HORIZON, DEFAULT_N_PATHS};
pub use target::{
    bessel_density, bessel_semigroup_check, kappa, levy_density, levy_density_mass, target_rhs, SemigroupReport,
    TargetOptions,
};

use crate::error::{invalid, Result};
use crate::metric::MetricStructure;

/// A nonnegative path, linear between knots `(t_k, v_k)` and `0` after the
/// last knot, with lifetime `zeta`.
///
/// `censored` marks a simulated path that was still alive at the end of the
/// simulation window; its `zeta` is then only a lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionPath {
    times: Vec<f64>,
    values: Vec<f64>,
    zeta: f64,
    censored: bool,
}

impl ExcursionPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, zeta: f64, censored: bool) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid("path", "needs equally many times and values, at least one"));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("path", "times must start at 0 and increase strictly"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("path", "values must be finite and nonnegative"));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(invalid("zeta", format!("{zeta} is not a positive lifetime")));
        }
        if times.iter().zip(&values).any(|(t, v)| *t > zeta && *v != 0.0) {
            return Err(invalid("path", "nonzero value after the lifetime"));
        }
        Ok(Self { times, values, zeta, censored })
    }

    /// Path equal to `level` on `[0, zeta]` and `0` afterwards.
    pub fn constant(level: f64, zeta: f64) -> Result<Self> {
        Self::new(vec![0.0, zeta], vec![level, level], zeta, false)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn is_censored(&self) -> bool {
        self.censored
    }

    fn last_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let last = self.last_time();
        if t < 0.0 || t > last {
            return 0.0;
        }
        let j = self.times.partition_point(|s| *s <= t);
        if j == self.times.len() {
            return self.values[j - 1];
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Limits of the path at `s0+` and `s1-`, for an interval containing no knot
    /// in its interior.
    fn on_interval(&self, s0: f64, s1: f64) -> (f64, f64) {
        if s0 >= self.last_time() {
            return (0.0, 0.0);
        }
        let j = self.times.partition_point(|s| *s <= s0);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        let at = |t: f64| v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        (at(s0), at(s1))
    }
}

/// `int_0^len min(|d(u)|, 1) du` for `d` linear from `d0` to `d1`.
fn integral_min_abs_linear(d0: f64, d1: f64, len: f64) -> f64 {
    let mut cuts = vec![0.0, 1.0];
    if d0 != d1 {
        for level in [-1.0, 0.0, 1.0] {
            let u = (level - d0) / (d1 - d0);
            if u > 0.0 && u < 1.0 {
                cuts.push(u);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let f = |u: f64| (d0 + (d1 - d0) * u).abs().min(1.0);
    cuts.windows(2).map(|w| 0.5 * (f(w[0]) + f(w[1])) * (w[1] - w[0])).sum::<f64>() * len
}

/// `(int_0^inf |e1 - e2| ^ 1 dt) ^ 1 + |zeta1^-1 - zeta2^-1|`, with the
/// integral computed exactly for the piecewise-linear representation.
pub fn excursion_metric(e1: &ExcursionPath, e2: &ExcursionPath) -> f64 {
    let mut knots: Vec<f64> = e1.times.iter().chain(&e2.times).copied().collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut integral = 0.0;
    for w in knots.windows(2) {
        let (a0, a1) = e1.on_interval(w[0], w[1]);
        let (b0, b1) = e2.on_interval(w[0], w[1]);
        integral += integral_min_abs_linear(a0 - b0, a1 - b1, w[1] - w[0]);
        if integral >= 1.0 {
            break;
        }
    }
    integral.min(1.0) + (e1.zeta.recip() - e2.zeta.recip()).abs()
}

pub fn excursion_space() -> MetricStructure<ExcursionPath> {
    let reference = ExcursionPath::constant(1.0, 1.0).expect("valid path");
    MetricStructure::new("Exc:d", reference, |a, b| Ok(excursion_metric(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn metric_examples() {
        let e1 = ExcursionPath::constant(1.0, 1.0).unwrap();
        let e2 = ExcursionPath::constant(1.0, 2.0).unwrap();
        assert_eq!(excursion_metric(&e1, &e1), 0.0);
        assert!((excursion_metric(&e1, &e2) - 1.5).abs() < 1e-15);

        let a = ExcursionPath::new(vec![0.0, 0.5, 1.0], vec![0.2, 0.4, 0.0], 1.0, false).unwrap();
        let b = ExcursionPath::new(vec![0.0, 0.5, 1.0], vec![0.2, 0.4, 0.0], 3.0, false).unwrap();
        assert!((excursion_metric(&a, &b) - (1.0 - 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn metric_small_differences_are_integrated_exactly() {
        // |e1 - e2| = 0.1 t on [0, 1]: integral 0.05.
        let a = ExcursionPath::new(vec![0.0, 1.0], vec![0.5, 0.6], 1.0, false).unwrap();
        let b = ExcursionPath::new(vec![0.0, 1.0], vec![0.5, 0.5], 1.0, false).unwrap();
        assert!((excursion_metric(&a, &b) - 0.05).abs() < 1e-15);
        // Difference crossing zero: 0.5 - t on [0, 1] has integral 0.25.
        let c = ExcursionPath::new(vec![0.0, 1.0], vec![1.0, 0.0], 1.0, false).unwrap();
        let d = ExcursionPath::new(vec![0.0, 1.0], vec![0.5, 0.5], 1.0, false).unwrap();
        assert!((excursion_metric(&c, &d) - 0.25).abs() < 1e-15);
        // Difference exceeding 1 on part of the interval is truncated.
        let e = ExcursionPath::new(vec![0.0, 1.0], vec![0.0, 4.0], 1.0, false).unwrap();
        let z = ExcursionPath::new(vec![0.0, 1.0], vec![0.0, 0.0], 1.0, false).unwrap();
        assert!((excursion_metric(&e, &z) - (0.125 + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn path_validation() {
        assert!(ExcursionPath::new(vec![0.0, 1.0], vec![1.0, 1.0], 0.5, false).is_err());
        assert!(ExcursionPath::new(vec![0.0, 1.0], vec![1.0, -1.0], 1.0, false).is_err());
        assert!(ExcursionPath::new(vec![0.1, 1.0], vec![1.0, 1.0], 1.0, false).is_err());
        assert!(ExcursionPath::new(vec![0.0], vec![1.0], 0.0, false).is_err());
        let p = ExcursionPath::new(vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 0.0], 2.0, false).unwrap();
        assert_eq!(p.value_at(0.5), 2.0);
        assert_eq!(p.value_at(1.5), 1.5);
        assert_eq!(p.value_at(2.5), 0.0);
    }

    #[test]
    fn convergence_in_measure_with_lifetimes() {
        // Spikes of vanishing width converge in measure; lifetimes converge.
        let limit = ExcursionPath::constant(1.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in 3..200 {
            let w = 1.0 / n as f64;
            let zeta = 1.0 + w;
            let e = ExcursionPath::new(
                vec![0.0, 0.5, 0.5 + w / 2.0, 0.5 + w, 1.0, zeta],
                vec![1.0, 1.0, 50.0, 1.0, 1.0, 1.0],
                zeta,
                false,
            )
            .unwrap();
            let d = excursion_metric(&e, &limit);
            assert!(d <= prev + 1e-12);
            prev = d;
        }
        assert!(prev < 2e-2);
        // Lifetimes converging elsewhere keep the metric away from 0.
        let other = 2.0;
        for n in 1..100 {
            let zeta = other + 1.0 / n as f64;
            let e = ExcursionPath::new(vec![0.0, 1.0, zeta], vec![1.0, 1.0, 0.0], zeta, false).unwrap();
            assert!(excursion_metric(&e, &limit) >= (1.0 - other.recip()) - 1e-9);
        }
    }

    fn path() -> impl Strategy<Value = ExcursionPath> {
        (prop::collection::vec((0.01..1.0f64, 0.0..3.0f64), 1..6), 0.1..2.0f64).prop_map(|(steps, extra)| {
            let mut t = 0.0;
            let (mut times, mut values) = (vec![0.0], vec![steps[0].1]);
            for (dt, v) in &steps[1..] {
                t += dt;
                times.push(t);
                values.push(*v);
            }
            ExcursionPath::new(times, values, t + extra, false).unwrap()
        })
    }

    proptest! {
        #[test]
        fn metric_axioms(a in path(), b in path(), c in path()) {
            let dab = excursion_metric(&a, &b);
            prop_assert!(excursion_metric(&a, &a) == 0.0);
            prop_assert!((dab - excursion_metric(&b, &a)).abs() < 1e-12);
            prop_assert!(excursion_metric(&a, &c) <= dab + excursion_metric(&b, &c) + 1e-9);
        }
    }
}
