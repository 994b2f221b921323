//! Laplace functionals of infinitely divisible random measures on a finite
//! ground set `E = {0, .., n-1}`.

use crate::algebra::{FunctionFamily, TestFunction};
use crate::error::{invalid, Error, Result};
use crate::levy::{richardson, LimitSchedule};
use crate::measure::{mf_space, AtomicMeasure};
use crate::metric::{discrete_metric, MetricStructure};

pub type GroundMeasure = AtomicMeasure<usize>;

/// `(b, mu)` with `b` a finite measure on `E` and `mu` a measure on the
/// nonzero finite measures on `E`.
#[derive(Debug, Clone)]
pub struct RandomMeasureLaw {
    size: usize,
    b: GroundMeasure,
    mu: AtomicMeasure<GroundMeasure>,
}

/// Nonzero finite measures on `E` under the Prohorov-plus-inverse-mass metric.
pub fn measure_space(size: usize) -> Result<MetricStructure<GroundMeasure>> {
    if size == 0 {
        return Err(invalid("E", "ground set must be nonempty"));
    }
    let ground = discrete_metric(size);
    let reference = AtomicMeasure::dirac(0, 1.0, ground.clone())?;
    mf_space(&ground, reference)
}

impl RandomMeasureLaw {
    pub fn new(size: usize, b: GroundMeasure, mu: AtomicMeasure<GroundMeasure>) -> Result<Self> {
        let space = measure_space(size)?;
        if !b.space().same_space(space.reference().space()) {
            return Err(Error::MismatchedSpaces(b.space().id().to_string(), space.reference().space().id().to_string()));
        }
        if !mu.space().same_space(&space) {
            return Err(Error::MismatchedSpaces(mu.space().id().to_string(), space.id().to_string()));
        }
        check_points(&b, size)?;
        for (nu, _) in mu.atoms() {
            check_points(nu, size)?;
            if nu.total_mass() <= 0.0 {
                return Err(Error::ZeroMass);
            }
        }
        Ok(Self { size, b, mu })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn b(&self) -> &GroundMeasure {
        &self.b
    }

    pub fn mu(&self) -> &AtomicMeasure<GroundMeasure> {
        &self.mu
    }
}

fn check_points(nu: &GroundMeasure, size: usize) -> Result<()> {
    match nu.atoms().iter().find(|(e, _)| *e >= size) {
        Some((e, _)) => Err(invalid("E", format!("point {e} outside ground set of size {size}"))),
        None => Ok(()),
    }
}

/// `<phi, nu> = sum_i w_i phi(e_i)`
pub fn pairing(phi: &[f64], nu: &GroundMeasure) -> f64 {
    nu.atoms().iter().map(|(e, w)| w * phi[*e]).sum()
}

/// `L(phi) = <phi, b> + sum_atoms w (1 - exp(-<phi, nu>))` for `phi >= 0`.
pub fn laplace_functional(law: &RandomMeasureLaw, phi: &[f64]) -> Result<f64> {
    if phi.len() != law.size {
        return Err(Error::DimensionMismatch { expected: law.size, got: phi.len() });
    }
    if let Some(v) = phi.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(invalid("phi", format!("value {v} is not a nonnegative finite number")));
    }
    let jumps: f64 = law.mu.atoms().iter().map(|(nu, w)| w * -(-pairing(phi, nu)).exp_m1()).sum();
    Ok(pairing(phi, &law.b) + jumps)
}

/// `F_phi(nu) = 1 - exp(-<phi, nu>)`
pub fn f_phi(phi: Vec<f64>) -> TestFunction<GroundMeasure> {
    let parts: Vec<String> = phi.iter().map(|v| v.to_string()).collect();
    TestFunction::real(format!("F[{}]", parts.join(",")), 1.0, move |nu: &GroundMeasure| {
        -(-pairing(&phi, nu)).exp_m1()
    })
}

pub fn f_phi_family(size: usize, phi_samples: &[Vec<f64>]) -> Result<FunctionFamily<GroundMeasure>> {
    let mut members = Vec::with_capacity(phi_samples.len());
    for phi in phi_samples {
        if phi.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: phi.len() });
        }
        if phi.iter().any(|v| !(*v >= 0.0)) {
            return Err(invalid("phi", "must be nonnegative"));
        }
        members.push(f_phi(phi.clone()));
    }
    Ok(FunctionFamily::new(members, measure_space(size)?))
}

/// `b({e}) = lim L(m 1_e) / m`, Richardson order 1 along the schedule.
/// Values below `1e-9` in modulus are dropped; a clearly negative value is
/// reported as [`Error::ImproperMass`].
pub fn recover_b_measure<L>(l: L, size: usize, schedule: &LimitSchedule) -> Result<GroundMeasure>
where
    L: Fn(&[f64]) -> f64,
{
    let estimates: Vec<Vec<f64>> = schedule
        .ms()
        .iter()
        .map(|&m| {
            (0..size)
                .map(|e| {
                    let mut phi = vec![0.0; size];
                    phi[e] = m;
                    l(&phi) / m
                })
                .collect()
        })
        .collect();
    let weights = richardson(schedule, &estimates, 1.0)?;
    let mut atoms = Vec::new();
    for (e, w) in weights.into_iter().enumerate() {
        if w < -1e-9 {
            return Err(Error::ImproperMass(w));
        }
        if w > 1e-9 {
            atoms.push((e, w));
        }
    }
    AtomicMeasure::new(atoms, discrete_metric(size))
}
