//! Test-function families and the sampled hypothesis checks used by the
//! convergence-determining and separation theorems.
//!
//! Every `check_*` function is a sampled certificate: `true` means no
//! counterexample was found on the supplied points at the given tolerance.

mod function;
mod polynomial;

use std::collections::HashSet;

pub use function::{FunctionFamily, TestFunction};
pub use polynomial::{stone_weierstrass_p0, CubePolynomial, PolynomialBasis, SW_GRID_POINTS};

use crate::error::{invalid, Error, Result};
use crate::metric::{BoundedSetWitness, CubePoint};

/// Adds every product of at most `depth` factors drawn from the members and
/// their complex conjugates. Members are deduplicated by id; product ids list
/// the factor ids in sorted order joined by `·`.
pub fn close_multiplicatively<P: Clone + 'static>(fam: &FunctionFamily<P>, depth: usize) -> Result<FunctionFamily<P>> {
    if depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    let mut generators: Vec<TestFunction<P>> = Vec::new();
    let mut seen = HashSet::new();
    for m in &fam.members {
        for g in [m.clone(), m.conj()] {
            if seen.insert(g.id().to_string()) {
                generators.push(g);
            }
        }
    }
    generators.sort_by(|a, b| a.id().cmp(b.id()));

    let mut out: Vec<TestFunction<P>> = Vec::new();
    let mut ids = HashSet::new();
    for m in &fam.members {
        if ids.insert(m.id().to_string()) {
            out.push(m.clone());
        }
    }
    // Multisets of generator indices, nondecreasing, sizes 1..=depth.
    let mut stack: Vec<(Vec<usize>, Option<TestFunction<P>>)> = vec![(Vec::new(), None)];
    while let Some((idx, prod)) = stack.pop() {
        if let Some(p) = &prod {
            if ids.insert(p.id().to_string()) {
                out.push(p.clone());
            }
        }
        if idx.len() == depth {
            continue;
        }
        let start = idx.last().copied().unwrap_or(0);
        for j in (start..generators.len()).rev() {
            let g = &generators[j];
            let mut next = idx.clone();
            next.push(j);
            let p = match &prod {
                None => g.clone(),
                Some(p) => {
                    let id = next.iter().map(|&k| generators[k].id()).collect::<Vec<_>>().join("·");
                    p.times(g, id)
                }
            };
            stack.push((next, Some(p)));
        }
    }
    Ok(FunctionFamily::new(out, fam.space.clone()))
}

/// For each pair, some member differs by more than `tol`.
pub fn check_separates_points<P>(fam: &FunctionFamily<P>, pairs: &[(P, P)], tol: f64) -> Result<bool>
where
    P: 'static,
{
    for (x, y) in pairs {
        let mut separated = false;
        for f in &fam.members {
            if (f.eval(x)? - f.eval(y)?).norm() > tol {
                separated = true;
                break;
            }
        }
        if !separated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each sample point, some member has modulus above `tol`.
pub fn check_vanishes_nowhere<P: 'static>(fam: &FunctionFamily<P>, sample: &[P], tol: f64) -> Result<bool> {
    for x in sample {
        let mut found = false;
        for f in &fam.members {
            if f.eval(x)?.norm() > tol {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`check_bounded_below_on`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedBelow {
    pub holds: bool,
    /// Member with the largest sampled minimum modulus.
    pub member: Option<String>,
    /// That member's minimum modulus over the sample.
    pub delta: f64,
}

/// Looks for a member whose modulus stays away from zero on the sampled part
/// of a bounded set. The sample must lie inside the witness ball.
pub fn check_bounded_below_on<P: 'static>(
    fam: &FunctionFamily<P>,
    witness: &BoundedSetWitness<P>,
    sample: &[P],
) -> Result<BoundedBelow> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    for x in sample {
        if !witness.contains(&fam.space, x)? {
            return Err(invalid("sample", "point outside the bounded-set witness"));
        }
    }
    let mut best = BoundedBelow { holds: false, member: None, delta: 0.0 };
    for f in &fam.members {
        let mut min = f64::INFINITY;
        for x in sample {
            min = min.min(f.eval(x)?.norm());
        }
        if best.member.is_none() || min > best.delta {
            best = BoundedBelow { holds: min > 0.0, member: Some(f.id().to_string()), delta: min };
        }
    }
    Ok(best)
}

/// `x -> (f_1(x), f_2(x), ...)` for a family of `[0,1]`-valued members.
pub fn embed_hilbert_cube<P: 'static>(fam: &FunctionFamily<P>, x: &P) -> Result<CubePoint> {
    const SLACK: f64 = 1e-12;
    let mut coords = Vec::with_capacity(fam.len());
    for f in &fam.members {
        let v = f.eval(x)?;
        if v.im.abs() > SLACK || v.re < -SLACK || v.re > 1.0 + SLACK {
            return Err(Error::OutOfUnitRange { id: f.id().to_string(), value: v.to_string() });
        }
        coords.push(v.re.clamp(0.0, 1.0));
    }
    Ok(CubePoint(coords))
}

/// Real and imaginary parts, then `f^2` and `f^2 (B - f)` for each of them
/// (`B` the declared sup bound), each rescaled into `[0, 1]`.
pub fn normalize_to_unit<P: Clone + 'static>(fam: &FunctionFamily<P>) -> FunctionFamily<P> {
    let mut out = Vec::with_capacity(4 * fam.len());
    for f in &fam.members {
        let b = f.sup_bound();
        let parts = [
            f.map(format!("Re({})", f.id()), b, |v| v.re.into()),
            f.map(format!("Im({})", f.id()), b, |v| v.im.into()),
        ];
        for r in parts {
            let sq_scale = if b > 0.0 { (b * b).recip() } else { 1.0 };
            out.push(r.map(format!("sq({})", r.id()), 1.0, move |v| (v.re * v.re * sq_scale).into()));
            // max of t^2 (B - t) over [-B, B] is 2 B^3, at t = -B.
            let cubic_scale = if b > 0.0 { (2.0 * b * b * b).recip() } else { 1.0 };
            out.push(r.map(format!("sqc({})", r.id()), 1.0, move |v| (v.re * v.re * (b - v.re) * cubic_scale).into()));
        }
    }
    FunctionFamily::new(out, fam.space.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{levy_space_metric, real_line, MetricStructure};
    use num_complex::Complex64;

    fn line_family(members: Vec<TestFunction<f64>>) -> FunctionFamily<f64> {
        FunctionFamily::new(members, real_line())
    }

    fn f_u(u: f64) -> TestFunction<f64> {
        TestFunction::new(format!("F[{u}]"), 2.0, move |x: &f64| Complex64::new(0.0, u * x).exp() - 1.0)
    }

    #[test]
    fn closure_of_single_member() {
        let f = TestFunction::new("f", 2.0, |x: &f64| Complex64::new(*x, 1.0));
        let closed = close_multiplicatively(&line_family(vec![f]), 2).unwrap();
        let mut ids = closed.ids();
        ids.sort();
        assert_eq!(ids, vec!["conj(f)", "conj(f)·conj(f)", "conj(f)·f", "f", "f·f"]);
        let x = 0.5;
        let ff = closed.get("conj(f)·f").unwrap().eval(&x).unwrap();
        assert!((ff - Complex64::new(1.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closure_of_empty_family_is_empty() {
        let closed = close_multiplicatively(&line_family(vec![]), 3).unwrap();
        assert!(closed.is_empty());
        assert!(close_multiplicatively(&line_family(vec![]), 0).is_err());
    }

    #[test]
    fn closure_contains_product_identity() {
        let (u, v) = (0.7, -1.3);
        let closed = close_multiplicatively(&line_family(vec![f_u(u), f_u(v)]), 2).unwrap();
        let prod = closed.get(&format!("F[{v}]·F[{u}]")).expect("product present");
        for k in 0..50 {
            let x = -3.0 + 0.13 * k as f64;
            let expected = f_u(u + v).eval(&x).unwrap() - f_u(u).eval(&x).unwrap() - f_u(v).eval(&x).unwrap();
            assert!((prod.eval(&x).unwrap() - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn closure_is_closed_under_conjugation() {
        let fam = line_family(vec![f_u(0.4), f_u(1.1), TestFunction::real("id", 1.0, |x: &f64| *x)]);
        let closed = close_multiplicatively(&fam, 3).unwrap();
        let sample: Vec<f64> = (0..20).map(|k| -1.0 + 0.1 * k as f64).collect();
        for m in &closed.members {
            let c = m.conj();
            let matched = closed.members.iter().any(|o| {
                sample.iter().all(|x| (o.eval(x).unwrap() - c.eval(x).unwrap()).norm() < 1e-12)
            });
            assert!(matched, "no conjugate partner for {}", m.id());
        }
    }

    #[test]
    fn separation_examples() {
        let id = line_family(vec![TestFunction::real("id", 1.0, |x: &f64| *x)]);
        assert!(check_separates_points(&id, &[(0.0, 1.0)], 1e-9).unwrap());
        let sq = line_family(vec![TestFunction::real("sq", 1.0, |x: &f64| x * x)]);
        assert!(!check_separates_points(&sq, &[(-1.0, 1.0)], 1e-9).unwrap());
    }

    #[test]
    fn vanishing_examples() {
        let fam = line_family(vec![TestFunction::real("min1", 1.0, |x: &f64| x.min(1.0))]);
        let sample: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
        assert!(check_vanishes_nowhere(&fam, &sample, 0.0).unwrap());
        let shifted = line_family(vec![TestFunction::real("x-1", 1.0, |x: &f64| x - 1.0)]);
        assert!(!check_vanishes_nowhere(&shifted, &[1.0], 1e-12).unwrap());
    }

    #[test]
    fn bounded_below_examples() {
        let space: MetricStructure<Vec<f64>> = levy_space_metric(1);
        let witness = BoundedSetWitness::new(vec![1.0], 10.0);
        let sample: Vec<Vec<f64>> = (0..=200).map(|k| vec![0.5 + 1.5 * k as f64 / 200.0]).collect();

        let eps: f64 = 0.5;
        let u = eps * std::f64::consts::PI / 2.0;
        let fu = TestFunction::new("Fu*", 2.0, move |x: &Vec<f64>| Complex64::new(0.0, u * x[0]).exp() - 1.0);
        let fam = FunctionFamily::new(vec![fu], space.clone());
        let res = check_bounded_below_on(&fam, &witness, &sample).unwrap();
        let bound = (1.0 - (std::f64::consts::PI * eps * eps / 2.0).cos()).powi(2);
        assert!((bound - 5.80e-3).abs() < 1e-5);
        assert!(res.holds && res.delta * res.delta >= bound);

        let one = FunctionFamily::new(vec![TestFunction::constant("1", Complex64::new(1.0, 0.0))], space.clone());
        let res = check_bounded_below_on(&one, &witness, &sample).unwrap();
        assert_eq!((res.holds, res.delta), (true, 1.0));

        let zero = FunctionFamily::new(vec![TestFunction::real("0", 0.0, |_: &Vec<f64>| 0.0)], space.clone());
        assert!(!check_bounded_below_on(&zero, &witness, &sample).unwrap().holds);

        let far = vec![vec![100.0]];
        assert!(check_bounded_below_on(&one, &BoundedSetWitness::new(vec![1.0], 1.0), &far).is_err());
    }

    #[test]
    fn embedding_examples() {
        let fam = line_family(vec![TestFunction::real("id", 1.0, |x: &f64| *x)]);
        assert_eq!(embed_hilbert_cube(&fam, &0.3).unwrap(), CubePoint(vec![0.3]));
        let fam = line_family(vec![
            TestFunction::real("id", 1.0, |x: &f64| *x),
            TestFunction::real("sq", 1.0, |x: &f64| x * x),
        ]);
        assert_eq!(embed_hilbert_cube(&fam, &0.5).unwrap(), CubePoint(vec![0.5, 0.25]));
        assert!(matches!(embed_hilbert_cube(&fam, &1.5), Err(Error::OutOfUnitRange { .. })));
    }

    #[test]
    fn normalization_examples() {
        let f = TestFunction::real("f", 1.0, |x: &f64| *x);
        let norm = normalize_to_unit(&line_family(vec![f]));
        let sq = norm.get("sq(Re(f))").unwrap();
        let sqc = norm.get("sqc(Re(f))").unwrap();
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            assert!((sq.eval(&x).unwrap().re - x * x).abs() < 1e-15);
            assert!((sqc.eval(&x).unwrap().re - x * x * (1.0 - x) / 2.0).abs() < 1e-15);
        }

        let g = TestFunction::new("ig", 1.0, |x: &f64| Complex64::new(0.0, x.sin()));
        let norm = normalize_to_unit(&line_family(vec![g]));
        let re_sq = norm.get("sq(Re(ig))").unwrap();
        let im_sq = norm.get("sq(Im(ig))").unwrap();
        assert_eq!(re_sq.eval(&0.7).unwrap().re, 0.0);
        assert!((im_sq.eval(&0.7).unwrap().re - 0.7f64.sin().powi(2)).abs() < 1e-15);

        let one = TestFunction::constant("1", Complex64::new(1.0, 0.0));
        let norm = normalize_to_unit(&line_family(vec![one]));
        let values: HashSet<u64> = norm.members.iter().map(|m| m.eval(&0.0).unwrap().re.to_bits()).collect();
        assert_eq!(values, HashSet::from([1.0f64.to_bits(), 0.0f64.to_bits()]));
    }

    #[test]
    fn normalized_members_stay_in_unit_interval() {
        let fam = line_family(vec![f_u(1.7), f_u(-0.3), TestFunction::real("cos", 1.0, |x: &f64| x.cos())]);
        let norm = normalize_to_unit(&fam);
        for k in 0..400 {
            let x = -10.0 + 0.05 * k as f64;
            assert!(embed_hilbert_cube(&norm, &x).is_ok());
        }
    }
}
