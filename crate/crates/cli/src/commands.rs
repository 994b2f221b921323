use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use measura::algebra::{stone_weierstrass_p0, SW_GRID_POINTS};
use measura::excursion::{empirical_lhs_multi, ExcursionFunctional, LifetimeWeight, DEFAULT_HORIZON};
use measura::fragmentation::{g_p, phi_convergence_report, topology_equivalence_check_s1, FragmentationSequence};
use measura::levy::{levy_family, psi_exponent, recover_b, recover_c, LevyTriple, LimitSchedule};
use measura::measure::{prohorov_distance, weak_sharp_report};
use measura::metric::{levy_space_metric, real_line, sup_norm};
use measura::random_measure::{f_phi, laplace_functional, measure_space, recover_b_measure, GroundMeasure, RandomMeasureLaw};
use measura::{AtomicMeasure, Result};

use crate::oracle::prohorov_brute_force;
use crate::{Command, ExperimentConfig, Verdict};

pub(crate) struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
}

fn verdict(name: &str, passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { name: name.to_string(), passed, detail: detail.into() }
}

fn uniform_vec(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..hi)).collect()
}

/// Parameters are present after `resolved`.
fn get<T: Copy>(v: Option<T>) -> T {
    v.expect("parameter resolved")
}

pub(crate) fn dispatch(c: &ExperimentConfig) -> Result<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    match c.command {
        Command::LevyRecover => levy_recover(c, &mut rng),
        Command::LevyConverge => levy_converge(c, &mut rng),
        Command::RandomMeasure => random_measure(c, &mut rng),
        Command::Excursion => excursion(c),
        Command::Fragmentation => fragmentation(c),
        Command::SwApprox => sw_approx(c),
        Command::ProhorovOracle => prohorov_oracle(c, &mut rng),
    }
}

fn levy_recover(c: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Table> {
    let (d, tol) = (get(c.dim), get(c.tol));
    let cov = if d == 2 {
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0])
    } else {
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose()
    };
    let b = uniform_vec(rng, d, -1.0, 1.0);
    let atoms: Vec<(Vec<f64>, f64)> = (0..3)
        .map(|_| {
            let radius = rng.random_range(0.1f64.ln()..10.0f64.ln()).exp();
            let v = uniform_vec(rng, d, -1.0, 1.0);
            let n = sup_norm(&v).max(1e-12);
            (v.iter().map(|x| x * radius / n).collect(), rng.random_range(0.1..2.0))
        })
        .collect();
    let shift: Vec<f64> =
        (0..d).map(|k| atoms.iter().filter(|(x, _)| sup_norm(x) <= 1.0).map(|(x, w)| w * x[k]).sum()).collect();
    let triple = LevyTriple::new(b.clone(), cov.clone(), AtomicMeasure::new(atoms, levy_space_metric(d))?)?;
    let psi = |u: &[f64]| psi_exponent(&triple, u).unwrap_or_default();
    let schedule = LimitSchedule::geometric(get(c.m_max))?;
    let rc = recover_c(psi, d, &schedule)?;
    let rb = recover_b(psi, &cov, d, &schedule)?;

    let mut rows = Vec::new();
    let (mut c_err, mut b_err, mut shifted_err) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..d {
        for j in 0..d {
            let e = (rc[(i, j)] - cov[(i, j)]).abs();
            c_err = c_err.max(e);
            rows.push(vec![0.0, i as f64, j as f64, cov[(i, j)], cov[(i, j)], rc[(i, j)], e]);
        }
    }
    for k in 0..d {
        let e = (rb[k] - b[k]).abs();
        b_err = b_err.max(e);
        shifted_err = shifted_err.max((rb[k] - (b[k] - shift[k])).abs());
        rows.push(vec![1.0, k as f64, 0.0, b[k], b[k] - shift[k], rb[k], e]);
    }
    Ok(Table {
        columns: vec!["kind", "i", "j", "exact", "limit", "recovered", "abs_error"],
        rows,
        verdicts: vec![
            verdict("C recovered", c_err < tol, format!("max error {c_err:e}, tol {tol:e}")),
            verdict("b recovered", b_err < tol, format!("max error {b_err:e}, tol {tol:e}")),
            verdict(
                "b - int x 1{|x|<=1} dmu recovered",
                shifted_err < tol,
                format!("max error {shifted_err:e}; the drift limit includes the compensated small jumps"),
            ),
        ],
    })
}

fn levy_converge(c: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Table> {
    let (d, members, tol) = (get(c.dim), get(c.n_paths), get(c.tol));
    let pairs: Vec<(Vec<f64>, Vec<f64>)> =
        (0..members).map(|_| (uniform_vec(rng, d, -1.0, 1.0), uniform_vec(rng, d, -1.0, 1.0))).collect();
    let fam = levy_family(d, &pairs)?;
    let space = levy_space_metric(d);
    let point = |shift: f64| {
        let mut x = vec![0.0; d];
        x[0] = 1.0 + shift;
        x
    };
    let ns = [10.0, 100.0, 1000.0, 1e4];
    let seq = ns
        .iter()
        .map(|n| AtomicMeasure::dirac(point(1.0 / n), 1.0, space.clone()))
        .collect::<Result<Vec<_>>>()?;
    let limit = AtomicMeasure::dirac(point(0.0), 1.0, space)?;
    let report = weak_sharp_report(&seq, &limit, &fam, tol)?;
    let rows = ns
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let gaps: Vec<f64> = report.per_function.iter().map(|g| g.gaps[k]).collect();
            let max = gaps.iter().copied().fold(0.0, f64::max);
            vec![*n, max, gaps.iter().sum::<f64>() / gaps.len() as f64]
        })
        .collect();
    let monotone = report.per_function.iter().all(|g| g.is_nonincreasing());
    Ok(Table {
        columns: vec!["n", "max_gap", "mean_gap"],
        rows,
        verdicts: vec![
            verdict("converged", report.converged, format!("max final gap {:e}, tol {tol:e}", report.max_final_gap())),
            verdict("gaps nonincreasing", monotone, ""),
        ],
    })
}

fn random_ground(rng: &mut ChaCha8Rng, size: usize, min_atoms: usize) -> Result<GroundMeasure> {
    let ground = measure_space(size)?.reference().space().clone();
    let mut atoms = Vec::new();
    for e in 0..size {
        if atoms.len() < min_atoms || rng.random_bool(0.6) {
            atoms.push((e, rng.random_range(0.1..2.0)));
        }
    }
    AtomicMeasure::new(atoms, ground)
}

fn random_measure(c: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Table> {
    let (size, samples, tol) = (get(c.dim), get(c.n_paths), get(c.tol));
    let b = random_ground(rng, size, 0)?;
    let inner = (0..3).map(|_| Ok((random_ground(rng, size, 1)?, rng.random_range(0.1..2.0)))).collect::<Result<Vec<_>>>()?;
    let law = RandomMeasureLaw::new(size, b.clone(), AtomicMeasure::new(inner, measure_space(size)?)?)?;
    let schedule = LimitSchedule::geometric(get(c.m_max))?;
    let recovered = recover_b_measure(|p: &[f64]| laplace_functional(&law, p).unwrap_or(f64::NAN), size, &schedule)?;
    let mass = |m: &GroundMeasure, e: usize| m.atoms().iter().filter(|a| a.0 == e).map(|a| a.1).sum::<f64>();
    let mut err = 0.0f64;
    let rows: Vec<Vec<f64>> = (0..size)
        .map(|e| {
            let (exact, got) = (mass(&b, e), mass(&recovered, e));
            err = err.max((exact - got).abs());
            vec![e as f64, exact, got, (exact - got).abs()]
        })
        .collect();

    let (mut stated, mut corrected) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let phi = uniform_vec(rng, size, 0.0, 2.0);
        let psi = uniform_vec(rng, size, 0.0, 2.0);
        let sum: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| a + b).collect();
        let nu = random_ground(rng, size, 1)?;
        let (fp, fq, fs) = (f_phi(phi).eval(&nu)?.re, f_phi(psi).eval(&nu)?.re, f_phi(sum).eval(&nu)?.re);
        stated = stated.max((fp * fq - (fs - fp - fq)).abs());
        corrected = corrected.max((fp * fq - (fp + fq - fs)).abs());
    }
    Ok(Table {
        columns: vec!["e", "b_exact", "b_recovered", "abs_error"],
        rows,
        verdicts: vec![
            verdict("b recovered", err < tol, format!("max error {err:e}, tol {tol:e}")),
            verdict("F_phi F_psi = F_phi + F_psi - F_(phi+psi)", corrected < 1e-12, format!("max error {corrected:e}")),
            verdict(
                "F_phi F_psi = F_(phi+psi) - F_phi - F_psi",
                stated < 1e-12,
                format!("max error {stated:e}; this form has the wrong sign"),
            ),
        ],
    })
}

fn excursion(c: &ExperimentConfig) -> Result<Table> {
    let ts = [0.5, 1.0, 2.0];
    let functionals = ts
        .iter()
        .map(|t| Ok(ExcursionFunctional::lifetime_only(LifetimeWeight::step(*t)?)))
        .collect::<Result<Vec<_>>>()?;
    let est = empirical_lhs_multi(&functionals, get(c.eps), get(c.n_paths), get(c.dt), DEFAULT_HORIZON, c.seed)?;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for (t, e) in ts.iter().zip(&est) {
        let target = (2.0 / (std::f64::consts::PI * t)).sqrt();
        rows.push(vec![*t, e.mean, e.std_error, target, e.mean / target]);
        let z = (e.mean - target) / e.std_error;
        verdicts.push(verdict(&format!("tail at t = {t}"), z.abs() < 3.0, format!("{z:+.3} standard errors")));
    }
    Ok(Table { columns: vec!["t", "lhs", "se", "target", "ratio"], rows, verdicts })
}

fn fragmentation(c: &ExperimentConfig) -> Result<Table> {
    let (n_max, max_p, tol) = (get(c.n_paths) as u64, get(c.max_p), get(c.tol));
    let mut rows = Vec::new();
    let mut exact = true;
    let mut witness = Vec::new();
    for n in 1..=n_max {
        let s = FragmentationSequence::uniform(n)?;
        let g1 = g_p(&s, 1)?;
        exact &= g1 == 1.0;
        rows.push(vec![n as f64, s.coord(1), g1, g_p(&s, 2)?]);
        if n.is_power_of_two() {
            witness.push(s);
        }
    }
    let zero = FragmentationSequence::zero();
    let witness_report = phi_convergence_report(&witness, &zero, max_p, tol)?;

    let pair = |a: f64, b: f64| FragmentationSequence::new(vec![a, b]);
    let halves = (2..=40).map(|n| pair(0.5 + 0.5f64.powi(n), 0.5 - 0.5f64.powi(n))).collect::<Result<Vec<_>>>()?;
    let alternating =
        (0..40).map(|n| if n % 2 == 0 { pair(0.5, 0.5) } else { pair(1.0, 0.0) }).collect::<Result<Vec<_>>>()?;
    let limit = pair(0.5, 0.5)?;
    let conv = topology_equivalence_check_s1(&halves, &limit, max_p, tol)?;
    let alt = topology_equivalence_check_s1(&alternating, &limit, max_p, tol)?;
    Ok(Table {
        columns: vec!["n", "s_1", "g_1", "g_2"],
        rows,
        verdicts: vec![
            verdict("G_1 = 1 exactly for the uniform witness", exact, format!("n = 1..={n_max}")),
            verdict(
                "phi of the witness does not converge over x^p",
                !witness_report.converged,
                format!("max final gap {:e}", witness_report.max_final_gap()),
            ),
            verdict(
                "pointwise and power-sum convergence agree (converging family)",
                conv.equivalent && conv.family_converged,
                "",
            ),
            verdict(
                "pointwise and power-sum convergence agree (alternating family)",
                alt.equivalent && !alt.family_converged,
                "",
            ),
        ],
    })
}

fn sw_approx(c: &ExperimentConfig) -> Result<Table> {
    let eps = get(c.eps);
    let budget = get(c.m_max).min(f64::from(u32::MAX)) as u32;
    let g = |x: &[f64]| x[0] * ((x[0] - 0.25) / 0.25).clamp(0.0, 1.0);
    let p = stone_weierstrass_p0(g, 1, 0.25, eps, budget)?;
    let mut worst = f64::NEG_INFINITY;
    let rows: Vec<Vec<f64>> = (0..SW_GRID_POINTS)
        .map(|i| {
            let x1 = i as f64 / (SW_GRID_POINTS - 1) as f64;
            let (gv, pv) = (g(&[x1]), p.eval(&[x1]).re);
            worst = worst.max((gv - pv).abs() - eps * x1);
            vec![x1, gv, pv, (gv - pv).abs(), eps * x1]
        })
        .collect();
    Ok(Table {
        columns: vec!["x1", "g", "p", "abs_error", "bound"],
        rows,
        verdicts: vec![
            verdict("p vanishes on the face x_1 = 0", p.in_p0(), format!("degree {}", p.max_degree())),
            verdict("|g - p| <= eps x_1 on the grid", worst <= 0.0, format!("max excess {worst:e}")),
        ],
    })
}

fn prohorov_oracle(c: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Table> {
    let (pairs, tol) = (get(c.n_paths), get(c.tol));
    let random = |rng: &mut ChaCha8Rng| {
        let atoms: Vec<(f64, f64)> =
            (0..rng.random_range(0..=4)).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(0.1..1.5))).collect();
        AtomicMeasure::new(atoms, real_line())
    };
    let mut rows = Vec::with_capacity(pairs);
    let mut worst = 0.0f64;
    for k in 0..pairs {
        let (a, b) = (random(rng)?, random(rng)?);
        let (exact, brute) = (prohorov_distance(&a, &b)?, prohorov_brute_force(&a, &b)?);
        worst = worst.max((exact - brute).abs());
        rows.push(vec![k as f64, exact, brute, (exact - brute).abs()]);
    }
    Ok(Table {
        columns: vec!["pair", "exact", "brute_force", "abs_diff"],
        rows,
        verdicts: vec![verdict("exact matches brute force", worst < tol, format!("max difference {worst:e}"))],
    })
}
