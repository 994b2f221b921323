//! Boundedly finite measures represented as finite weighted atom lists.

use num_complex::Complex64;

use crate::algebra::{FunctionFamily, TestFunction};
use crate::error::{invalid, Error, Result};
use crate::metric::{BoundedSetWitness, MetricStructure};

/// Largest atom count accepted by [`prohorov_distance`]; the exact search is
/// exponential in the support size.
pub const PROHOROV_MAX_ATOMS: usize = 16;

/// `sum_i w_i delta_{x_i}` with all `w_i > 0`, on a fixed base space.
#[derive(Debug, Clone)]
pub struct AtomicMeasure<P> {
    atoms: Vec<(P, f64)>,
    space: MetricStructure<P>,
}

impl<P: Clone> AtomicMeasure<P> {
    pub fn new(atoms: Vec<(P, f64)>, space: MetricStructure<P>) -> Result<Self> {
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !(*w > 0.0 && w.is_finite())) {
            return Err(invalid("weight", format!("{w} is not a positive finite number")));
        }
        Ok(Self { atoms, space })
    }

    pub fn empty(space: MetricStructure<P>) -> Self {
        Self { atoms: Vec::new(), space }
    }

    pub fn dirac(x: P, weight: f64, space: MetricStructure<P>) -> Result<Self> {
        Self::new(vec![(x, weight)], space)
    }

    pub fn atoms(&self) -> &[(P, f64)] {
        &self.atoms
    }

    pub fn space(&self) -> &MetricStructure<P> {
        &self.space
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Mass of the closed ball described by `witness`.
    pub fn mass_in(&self, witness: &BoundedSetWitness<P>) -> Result<f64> {
        let mut m = 0.0;
        for (x, w) in &self.atoms {
            if witness.contains(&self.space, x)? {
                m += w;
            }
        }
        Ok(m)
    }
}

/// `sum_i w_i f(x_i)`.
pub fn integrate<P: 'static>(mu: &AtomicMeasure<P>, f: &TestFunction<P>) -> Result<Complex64> {
    mu.atoms.iter().try_fold(Complex64::default(), |acc, (x, w)| Ok(acc + f.eval(x)? * *w))
}

/// Membership in M_F: every `|f|` evaluates at every atom. Finite atom lists
/// give finite integrals of bounded functions, so this only fails on
/// evaluation errors.
pub fn integrates_family<P: 'static>(mu: &AtomicMeasure<P>, fam: &FunctionFamily<P>) -> bool {
    fam.members.iter().all(|f| mu.atoms.iter().all(|(x, _)| f.eval(x).is_ok()))
}

fn check_same_space<P>(a: &AtomicMeasure<P>, b: &AtomicMeasure<P>) -> Result<()> {
    if a.space.same_space(&b.space) {
        Ok(())
    } else {
        Err(Error::MismatchedSpaces(a.space.id().to_string(), b.space.id().to_string()))
    }
}

/// Exact Prohorov distance between two finite atomic measures (masses may differ).
///
/// For `eps` between consecutive atom-to-atom distances the closed
/// neighbourhood structure is fixed, so the constraint reduces to
/// `eps >= G`, where `G` is the largest mass excess `nu1(S) - nu2(N(S))`
/// (and symmetrically) over subsets `S` of one support. The answer is the
/// first interval where `max(lower end, G)` stays inside the interval.
pub fn prohorov_distance<P: Clone>(nu1: &AtomicMeasure<P>, nu2: &AtomicMeasure<P>) -> Result<f64> {
    check_same_space(nu1, nu2)?;
    for nu in [nu1, nu2] {
        if nu.atoms.len() > PROHOROV_MAX_ATOMS {
            return Err(Error::TooManyAtoms { atoms: nu.atoms.len(), max: PROHOROV_MAX_ATOMS });
        }
    }
    let (n, m) = (nu1.atoms.len(), nu2.atoms.len());
    let mut cross = vec![vec![0.0; m]; n];
    let mut thresholds = vec![0.0];
    for (i, (x, _)) in nu1.atoms.iter().enumerate() {
        for (j, (y, _)) in nu2.atoms.iter().enumerate() {
            let d = nu1.space.dist(x, y)?;
            cross[i][j] = d;
            thresholds.push(d);
        }
    }
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let w1: Vec<f64> = nu1.atoms.iter().map(|(_, w)| *w).collect();
    let w2: Vec<f64> = nu2.atoms.iter().map(|(_, w)| *w).collect();
    let mass1 = subset_masses(&w1);
    let mass2 = subset_masses(&w2);

    for (k, &t) in thresholds.iter().enumerate() {
        let nbr12: Vec<u32> = (0..n).map(|i| mask_within(&cross[i], t)).collect();
        let nbr21: Vec<u32> = (0..m).map(|j| mask_within(&cross.iter().map(|r| r[j]).collect::<Vec<_>>(), t)).collect();
        let excess = max_excess(&w1, &nbr12, &mass2).max(max_excess(&w2, &nbr21, &mass1));
        let candidate = t.max(excess);
        match thresholds.get(k + 1) {
            Some(&next) if candidate >= next => continue,
            _ => return Ok(candidate),
        }
    }
    unreachable!("last interval is unbounded")
}

fn mask_within(row: &[f64], t: f64) -> u32 {
    row.iter().enumerate().filter(|(_, &d)| d <= t).fold(0, |acc, (j, _)| acc | (1 << j))
}

fn subset_masses(w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << w.len()];
    for s in 1..out.len() {
        let low = s.trailing_zeros() as usize;
        out[s] = out[s & (s - 1)] + w[low];
    }
    out
}

/// `max(0, max_S w(S) - other(N(S)))` over subsets `S` of the first support.
fn max_excess(w: &[f64], nbr: &[u32], other_masses: &[f64]) -> f64 {
    let size = 1usize << w.len();
    let mut mass = vec![0.0; size];
    let mut reach = vec![0u32; size];
    let mut best = 0.0f64;
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        mass[s] = mass[rest] + w[low];
        reach[s] = reach[rest] | nbr[low];
        best = best.max(mass[s] - other_masses[reach[s] as usize]);
    }
    best
}

/// `d(nu1, nu2) = d_Prohorov(nu1, nu2) + |nu1(E)^-1 - nu2(E)^-1|` on nonzero finite measures.
pub fn mf_measure_metric<P: Clone>(nu1: &AtomicMeasure<P>, nu2: &AtomicMeasure<P>) -> Result<f64> {
    let (m1, m2) = (nu1.total_mass(), nu2.total_mass());
    if m1 <= 0.0 || m2 <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(prohorov_distance(nu1, nu2)? + (m1.recip() - m2.recip()).abs())
}

/// Finite measures on `base` under the Prohorov metric.
pub fn prohorov_space<P>(base: &MetricStructure<P>, reference: AtomicMeasure<P>) -> MetricStructure<AtomicMeasure<P>>
where
    P: Clone + Send + Sync + 'static,
{
    MetricStructure::new(format!("Prohorov[{}]", base.id()), reference, |a, b| prohorov_distance(a, b))
}

/// Nonzero finite measures on `base` under [`mf_measure_metric`].
pub fn mf_space<P>(base: &MetricStructure<P>, reference: AtomicMeasure<P>) -> Result<MetricStructure<AtomicMeasure<P>>>
where
    P: Clone + Send + Sync + 'static,
{
    if reference.total_mass() <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(MetricStructure::new(format!("Mf[{}]", base.id()), reference, |a, b| mf_measure_metric(a, b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionGaps {
    pub id: String,
    /// `|int f d mu_n - int f d mu|` for each element of the sequence.
    pub gaps: Vec<f64>,
}

impl FunctionGaps {
    pub fn last(&self) -> f64 {
        self.gaps.last().copied().unwrap_or(0.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub per_function: Vec<FunctionGaps>,
    pub tol: f64,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn max_final_gap(&self) -> f64 {
        self.per_function.iter().map(FunctionGaps::last).fold(0.0, f64::max)
    }
}

/// Integral gaps of a measure sequence against a sampled family; converged
/// iff every final gap is below `tol`.
pub fn weak_sharp_report<P: Clone + 'static>(
    seq: &[AtomicMeasure<P>],
    limit: &AtomicMeasure<P>,
    fam: &FunctionFamily<P>,
    tol: f64,
) -> Result<ConvergenceReport> {
    for mu in seq {
        check_same_space(mu, limit)?;
    }
    let mut per_function = Vec::with_capacity(fam.len());
    for f in &fam.members {
        let target = integrate(limit, f)?;
        let gaps = seq.iter().map(|mu| Ok((integrate(mu, f)? - target).norm())).collect::<Result<Vec<f64>>>()?;
        per_function.push(FunctionGaps { id: f.id().to_string(), gaps });
    }
    let converged = per_function.iter().all(|g| g.last() < tol);
    Ok(ConvergenceReport { per_function, tol, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{levy_space_metric, real_line};
    use proptest::prelude::*;

    fn line_measure(atoms: &[(f64, f64)]) -> AtomicMeasure<f64> {
        AtomicMeasure::new(atoms.to_vec(), real_line()).unwrap()
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(AtomicMeasure::new(vec![(0.0, 0.0)], real_line()).is_err());
        assert!(AtomicMeasure::new(vec![(0.0, -1.0)], real_line()).is_err());
        assert!(AtomicMeasure::new(vec![(0.0, f64::NAN)], real_line()).is_err());
    }

    #[test]
    fn integration_examples() {
        let f = TestFunction::new("exp", 1.0, |x: &f64| Complex64::new(0.0, *x).exp());
        let d = line_measure(&[(0.3, 1.0)]);
        assert_eq!(integrate(&d, &f).unwrap(), f.eval(&0.3).unwrap());

        let sq = TestFunction::real("sq", 1.0, |x: &f64| x * x);
        let mu = line_measure(&[(0.5, 1.0), (0.5, 1.0)]);
        assert_eq!(integrate(&mu, &sq).unwrap(), Complex64::new(0.5, 0.0));

        let id = TestFunction::real("id", 1.0, |x: &f64| *x);
        let phi = line_measure(&[(0.5, 1.0), (1.0 / 3.0, 1.0)]);
        assert!((integrate(&phi, &id).unwrap().re - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_failure_propagates() {
        let bad = TestFunction::real("inv", 1.0, |x: &f64| x.recip());
        let mu = line_measure(&[(0.0, 1.0)]);
        assert!(matches!(integrate(&mu, &bad), Err(Error::Evaluation { .. })));
        let fam = FunctionFamily::new(vec![bad], real_line());
        assert!(!integrates_family(&mu, &fam));
    }

    #[test]
    fn membership_in_mf() {
        let fam = FunctionFamily::new(
            (1..=5).map(|p| TestFunction::real(format!("x^{p}"), 1.0, move |x: &f64| x.powi(p))).collect(),
            real_line(),
        );
        let phi = line_measure(&[(0.5, 1.0), (0.25, 2.0)]);
        assert!(integrates_family(&phi, &fam));
        for f in &fam.members {
            assert!(integrate(&phi, f).unwrap().re <= 1.0);
        }
        let empty = AtomicMeasure::empty(real_line());
        assert!(integrates_family(&empty, &fam));
        assert_eq!(integrate(&empty, &fam.members[0]).unwrap(), Complex64::default());
    }

    #[test]
    fn prohorov_examples() {
        let a = line_measure(&[(0.0, 1.0)]);
        assert_eq!(prohorov_distance(&a, &a).unwrap(), 0.0);
        let b = line_measure(&[(0.3, 1.0)]);
        assert!((prohorov_distance(&a, &b).unwrap() - 0.3).abs() < 1e-15);
        let heavy = line_measure(&[(0.0, 1.4)]);
        assert!((prohorov_distance(&a, &heavy).unwrap() - 0.4).abs() < 1e-12);
        let far = line_measure(&[(5.0, 1.0)]);
        assert!((prohorov_distance(&a, &far).unwrap() - 1.0).abs() < 1e-15);
        let empty = AtomicMeasure::empty(real_line());
        assert!((prohorov_distance(&a, &empty).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prohorov_requires_common_space() {
        let a = line_measure(&[(0.0, 1.0)]);
        let b = AtomicMeasure::new(vec![(0.5, 1.0)], crate::metric::inverse_metric()).unwrap();
        assert!(matches!(prohorov_distance(&a, &b), Err(Error::MismatchedSpaces(..))));
    }

    #[test]
    fn mf_metric_examples() {
        let a = line_measure(&[(0.0, 1.0)]);
        assert_eq!(mf_measure_metric(&a, &a).unwrap(), 0.0);
        let double = line_measure(&[(0.0, 2.0)]);
        assert!((mf_measure_metric(&a, &double).unwrap() - 1.5).abs() < 1e-12);
        let b = line_measure(&[(0.3, 1.0)]);
        assert!((mf_measure_metric(&a, &b).unwrap() - 0.3).abs() < 1e-15);
        let empty = AtomicMeasure::empty(real_line());
        assert_eq!(mf_measure_metric(&a, &empty), Err(Error::ZeroMass));
    }

    fn levy_family() -> FunctionFamily<Vec<f64>> {
        let members = [(0.3, 0.5), (-0.8, 0.2), (1.0, -1.0)]
            .into_iter()
            .map(|(u, v)| {
                TestFunction::new(format!("F{u}F{v}"), 4.0, move |x: &Vec<f64>| {
                    (Complex64::new(0.0, u * x[0]).exp() - 1.0) * (Complex64::new(0.0, v * x[0]).exp() - 1.0)
                })
            })
            .collect();
        FunctionFamily::new(members, levy_space_metric(1))
    }

    #[test]
    fn dirac_sequence_converges() {
        let space = levy_space_metric(1);
        let fam = levy_family();
        let seq: Vec<_> = [10, 100, 1000, 10_000]
            .iter()
            .map(|&n| AtomicMeasure::dirac(vec![1.0 + 1.0 / n as f64], 1.0, space.clone()).unwrap())
            .collect();
        let limit = AtomicMeasure::dirac(vec![1.0], 1.0, space.clone()).unwrap();
        let report = weak_sharp_report(&seq, &limit, &fam, 1e-3).unwrap();
        assert!(report.converged);
        assert!(report.per_function.iter().all(FunctionGaps::is_nonincreasing));

        let constant = vec![limit.clone(); 3];
        let report = weak_sharp_report(&constant, &limit, &fam, 1e-12).unwrap();
        assert!(report.converged && report.max_final_gap() == 0.0);
    }

    #[test]
    fn escaping_mass_does_not_converge() {
        let space = crate::metric::inverse_metric();
        let f = TestFunction::real("1^x", 1.0, |x: &f64| 0.5 + 0.5 * x);
        let fam = FunctionFamily::new(vec![f], space.clone());
        let seq: Vec<_> =
            (1..=50).map(|n| AtomicMeasure::dirac(1.0 / n as f64, n as f64, space.clone()).unwrap()).collect();
        let report = weak_sharp_report(&seq, &AtomicMeasure::empty(space), &fam, 1e-3).unwrap();
        assert!(!report.converged);
        assert!(report.per_function[0].gaps.iter().enumerate().all(|(k, g)| *g >= 0.5 * (k + 1) as f64));
    }

    fn small_measure() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-2.0..2.0f64, 0.05..1.5f64), 0..=4)
    }

    proptest! {
        #[test]
        fn integration_is_linear(atoms in small_measure(), a in -3.0..3.0f64, b in -3.0..3.0f64, u in -2.0..2.0f64) {
            let mu = line_measure(&atoms);
            let f = TestFunction::new("f", 2.0, move |x: &f64| Complex64::new(0.0, u * x).exp() - 1.0);
            let g = TestFunction::real("g", 4.0, |x: &f64| x * x);
            let (f2, g2) = (f.clone(), g.clone());
            let h = TestFunction::new("h", 1.0, move |x: &f64| f2.eval(x).unwrap() * a + g2.eval(x).unwrap() * b);
            let lhs = integrate(&mu, &h).unwrap();
            let rhs = integrate(&mu, &f).unwrap() * a + integrate(&mu, &g).unwrap() * b;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn prohorov_metric_axioms(x in small_measure(), y in small_measure(), z in small_measure()) {
            let (x, y, z) = (line_measure(&x), line_measure(&y), line_measure(&z));
            let dxy = prohorov_distance(&x, &y).unwrap();
            prop_assert!(prohorov_distance(&x, &x).unwrap() == 0.0);
            prop_assert!((dxy - prohorov_distance(&y, &x).unwrap()).abs() < 1e-12);
            prop_assert!(prohorov_distance(&x, &z).unwrap() <= dxy + prohorov_distance(&y, &z).unwrap() + 1e-12);
        }
    }
}
