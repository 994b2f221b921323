//! Mass fragmentations `S` (nonincreasing sequences in `[0, 1]` with sum at
//! most 1), their embedding as counting measures on `((0, 1], |1/x - 1/y|)`,
//! and the power-sum and Laplace families on them.

use std::collections::BTreeMap;

use crate::algebra::{FunctionFamily, TestFunction};
use crate::error::{invalid, Error, Result};
use crate::measure::{integrate, weak_sharp_report, AtomicMeasure, ConvergenceReport};
use crate::metric::inverse_metric;

/// Tolerance on the mass constraints `sum <= 1` and, for proper sequences, `sum = 1`.
pub const MASS_TOL: f64 = 1e-12;

/// Nonzero entries of a sequence in `S`, nonincreasing.
///
/// Sequences built from rationals keep them, so that power sums can be
/// evaluated exactly and rounded once.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentationSequence {
    parts: Vec<f64>,
    rational: Option<Vec<(u64, u64)>>,
    truncated_mass: f64,
}

impl FragmentationSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::InvalidSequence(format!("entry {v} outside [0, 1]")));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidSequence("entries must be nonincreasing".into()));
        }
        let parts: Vec<f64> = values.into_iter().filter(|v| *v > 0.0).collect();
        let mass: f64 = parts.iter().sum();
        if mass > 1.0 + MASS_TOL {
            return Err(Error::InvalidSequence(format!("total mass {mass} exceeds 1")));
        }
        Ok(Self { parts, rational: None, truncated_mass: 0.0 })
    }

    pub fn zero() -> Self {
        Self { parts: Vec::new(), rational: None, truncated_mass: 0.0 }
    }

    /// Entries `num / den`, validated exactly.
    pub fn from_rationals(values: Vec<(u64, u64)>) -> Result<Self> {
        if values.iter().any(|(n, d)| *d == 0 || n > d) {
            return Err(Error::InvalidSequence("entries must be fractions in [0, 1]".into()));
        }
        let values: Vec<(u64, u64)> = values.into_iter().filter(|(n, _)| *n > 0).collect();
        if values.windows(2).any(|w| u128::from(w[1].0) * u128::from(w[0].1) > u128::from(w[0].0) * u128::from(w[1].1)) {
            return Err(Error::InvalidSequence("entries must be nonincreasing".into()));
        }
        if let Some((n, d)) = exact_power_sum(&values, 1) {
            if n > d {
                return Err(Error::InvalidSequence(format!("total mass {n}/{d} exceeds 1")));
            }
        }
        let mut s = Self::new(values.iter().map(|(n, d)| *n as f64 / *d as f64).collect())?;
        s.rational = Some(values);
        Ok(s)
    }

    /// `(1/n, ..., 1/n)` with `n` entries.
    pub fn uniform(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Self::from_rationals(vec![(1, n); n as usize])
    }

    /// `s_i = (1 - q) q^{i-1}`, cut where the remaining mass `q^i` drops
    /// below `MASS_TOL`; the dropped mass is recorded.
    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("q", "must lie in (0, 1)"));
        }
        let mut parts = Vec::new();
        let mut tail = 1.0;
        while tail >= MASS_TOL {
            parts.push((1.0 - q) * tail);
            tail *= q;
        }
        let mut s = Self::new(parts)?;
        s.truncated_mass = tail;
        Ok(s)
    }

    /// Nonzero entries.
    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    /// `s_i`, 1-based, `0` beyond the stored entries.
    pub fn coord(&self, i: usize) -> f64 {
        i.checked_sub(1).and_then(|j| self.parts.get(j)).copied().unwrap_or(0.0)
    }

    pub fn mass(&self) -> f64 {
        self.parts.iter().sum()
    }

    /// Mass dropped when an infinite sequence was cut to finite length.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// `sum s_i = 1` up to [`MASS_TOL`], counting truncated mass.
    pub fn is_proper(&self) -> bool {
        if let Some((n, d)) = self.rational.as_ref().and_then(|r| exact_power_sum(r, 1)) {
            return n == d;
        }
        (self.mass() + self.truncated_mass - 1.0).abs() <= MASS_TOL
    }
}

/// Sequence with total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperFragmentation(FragmentationSequence);

impl ProperFragmentation {
    pub fn new(s: FragmentationSequence) -> Result<Self> {
        if s.is_proper() {
            Ok(Self(s))
        } else {
            Err(Error::InvalidSequence(format!("mass {} is not 1", s.mass() + s.truncated_mass)))
        }
    }

    pub fn sequence(&self) -> &FragmentationSequence {
        &self.0
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `sum (n_i / d_i)^p` as a reduced fraction, or `None` on overflow.
fn exact_power_sum(values: &[(u64, u64)], p: u32) -> Option<(u128, u128)> {
    let mut acc = (0u128, 1u128);
    for (n, d) in values {
        let (num, den) = (u128::from(*n).checked_pow(p)?, u128::from(*d).checked_pow(p)?);
        let g = gcd(acc.1, den);
        let lcm = (acc.1 / g).checked_mul(den)?;
        let sum = acc.0.checked_mul(lcm / acc.1)?.checked_add(num.checked_mul(lcm / den)?)?;
        let r = gcd(sum, lcm).max(1);
        acc = (sum / r, lcm / r);
    }
    Some(acc)
}

/// `sum_i delta_{s_i}` on `((0, 1], |1/x - 1/y|)`, repeated entries merged
/// into one atom with integer weight.
pub fn phi(s: &FragmentationSequence) -> AtomicMeasure<f64> {
    let mut counts: Vec<(f64, f64)> = Vec::new();
    for &v in &s.parts {
        match counts.last_mut() {
            Some((x, w)) if *x == v => *w += 1.0,
            _ => counts.push((v, 1.0)),
        }
    }
    AtomicMeasure::new(counts, inverse_metric()).expect("positive integer weights")
}

/// Expands atoms by multiplicity and sorts them; fails unless the measure is
/// a counting measure on `(0, 1]` with total mass `sum x_i w_i <= 1`.
pub fn phi_inverse(mu: &AtomicMeasure<f64>) -> Result<FragmentationSequence> {
    if !mu.space().same_space(&inverse_metric()) {
        return Err(Error::NotInImage(format!("measure lives on {}", mu.space().id())));
    }
    let mut merged: BTreeMap<u64, usize> = BTreeMap::new();
    for (x, w) in mu.atoms() {
        if !(*x > 0.0 && *x <= 1.0) {
            return Err(Error::NotInImage(format!("atom at {x} outside (0, 1]")));
        }
        if w.fract() != 0.0 {
            return Err(Error::NotInImage(format!("weight {w} is not an integer")));
        }
        *merged.entry(x.to_bits()).or_default() += *w as usize;
    }
    let mut parts: Vec<f64> = merged.iter().flat_map(|(x, n)| std::iter::repeat_n(f64::from_bits(*x), *n)).collect();
    parts.reverse();
    FragmentationSequence::new(parts).map_err(|e| Error::NotInImage(e.to_string()))
}

/// `G_p(s) = sum_i s_i^p`, exact (rounded once) for rational sequences when
/// the fractions fit in 128 bits.
pub fn g_p(s: &FragmentationSequence, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(invalid("p", "must be at least 1"));
    }
    if let Some((n, d)) = s.rational.as_ref().and_then(|r| exact_power_sum(r, p)) {
        return Ok(n as f64 / d as f64);
    }
    Ok(s.parts.iter().map(|v| v.powi(p as i32)).sum())
}

/// `H_alpha(s) = sum_i (1 - exp(-alpha s_i))`
pub fn h_alpha(s: &FragmentationSequence, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha", "must be positive"));
    }
    Ok(s.parts.iter().map(|v| -(-alpha * v).exp_m1()).sum())
}

/// `x -> x^p` for `p = 1..=max_p`, on `(0, 1]`.
pub fn power_family(max_p: u32) -> FunctionFamily<f64> {
    let members = (1..=max_p).map(|p| TestFunction::real(format!("x^{p}"), 1.0, move |x: &f64| x.powi(p as i32))).collect();
    FunctionFamily::new(members, inverse_metric())
}

#[derive(Debug, Clone, PartialEq)]
pub enum FragmentationFamily {
    /// `G_p`, `p = 1..=max_p`
    PowerSums { max_p: u32 },
    /// `H_alpha` for each listed `alpha`
    Laplace { alphas: Vec<f64> },
}

impl FragmentationFamily {
    pub fn evaluate(&self, s: &FragmentationSequence) -> Result<Vec<f64>> {
        match self {
            Self::PowerSums { max_p } => (1..=*max_p).map(|p| g_p(s, p)).collect(),
            Self::Laplace { alphas } => alphas.iter().map(|a| h_alpha(s, *a)).collect(),
        }
    }
}

/// `max_i |s_i - t_i|`
pub fn pointwise_gap(s: &FragmentationSequence, t: &FragmentationSequence) -> f64 {
    (1..=s.parts.len().max(t.parts.len())).map(|i| (s.coord(i) - t.coord(i)).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingReport {
    /// Largest family gap at each `n`.
    pub family_gaps: Vec<f64>,
    /// Largest coordinate gap at each `n`.
    pub pointwise_gaps: Vec<f64>,
    pub tol: f64,
    pub pointwise_tol: f64,
    pub family_converged: bool,
    pub pointwise_converged: bool,
    /// Family convergence at the tail implies pointwise convergence at the tail.
    pub implication_holds: bool,
}

/// Last quarter of the sequence, at least one element.
fn tail(gaps: &[f64]) -> &[f64] {
    &gaps[gaps.len() - gaps.len().div_ceil(4)..]
}

fn tail_below(gaps: &[f64], tol: f64) -> bool {
    !gaps.is_empty() && tail(gaps).iter().all(|g| *g < tol)
}

/// Family and coordinate gaps along `seq`; convergence means every gap in
/// the last quarter of the sequence is below `tol` (family) or `10 tol`
/// (coordinates).
pub fn convergence_determining_check(
    seq: &[FragmentationSequence],
    limit: &FragmentationSequence,
    family: &FragmentationFamily,
    tol: f64,
) -> Result<DeterminingReport> {
    if seq.is_empty() {
        return Err(Error::EmptySample);
    }
    let target = family.evaluate(limit)?;
    let mut family_gaps = Vec::with_capacity(seq.len());
    let mut pointwise_gaps = Vec::with_capacity(seq.len());
    for s in seq {
        let values = family.evaluate(s)?;
        family_gaps.push(values.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        pointwise_gaps.push(pointwise_gap(s, limit));
    }
    let pointwise_tol = 10.0 * tol;
    let family_converged = tail_below(&family_gaps, tol);
    let pointwise_converged = tail_below(&pointwise_gaps, pointwise_tol);
    Ok(DeterminingReport {
        family_gaps,
        pointwise_gaps,
        tol,
        pointwise_tol,
        family_converged,
        pointwise_converged,
        implication_holds: !family_converged || pointwise_converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyReport {
    pub pointwise_converged: bool,
    pub family_converged: bool,
    /// Both directions hold: the two verdicts agree.
    pub equivalent: bool,
    pub detail: DeterminingReport,
}

/// On proper sequences, checks that coordinate convergence and convergence
/// of `G_1..G_P` agree (both at tolerance `tol`).
pub fn topology_equivalence_check_s1(
    seq: &[FragmentationSequence],
    limit: &FragmentationSequence,
    max_p: u32,
    tol: f64,
) -> Result<TopologyReport> {
    for s in seq.iter().chain(std::iter::once(limit)) {
        ProperFragmentation::new(s.clone())?;
    }
    let detail = convergence_determining_check(seq, limit, &FragmentationFamily::PowerSums { max_p }, tol)?;
    let pointwise_converged = tail_below(&detail.pointwise_gaps, tol);
    let family_converged = detail.family_converged;
    Ok(TopologyReport { pointwise_converged, family_converged, equivalent: pointwise_converged == family_converged, detail })
}

/// `weak#` gaps of `phi(s(n))` against `phi(limit)` over `x^p`, `p <= max_p`.
pub fn phi_convergence_report(
    seq: &[FragmentationSequence],
    limit: &FragmentationSequence,
    max_p: u32,
    tol: f64,
) -> Result<ConvergenceReport> {
    let measures: Vec<AtomicMeasure<f64>> = seq.iter().map(phi).collect();
    weak_sharp_report(&measures, &phi(limit), &power_family(max_p), tol)
}

/// `G_p(s) = int x^p dphi(s)` evaluated through the embedding.
pub fn g_p_via_phi(s: &FragmentationSequence, p: u32) -> Result<f64> {
    let f = TestFunction::real(format!("x^{p}"), 1.0, move |x: &f64| x.powi(p as i32));
    Ok(integrate(&phi(s), &f)?.re)
}
