//! Lévy–Khintchine exponents on R^D and recovery of the triple from the exponent.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{FunctionFamily, TestFunction};
use crate::error::{invalid, Error, Result};
use crate::measure::AtomicMeasure;
use crate::metric::{levy_space_metric, sup_norm};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Weight `h(x)` in the compensator `i u.x h(x)`.
#[derive(Clone, Default)]
pub enum Compensator {
    /// `1{||x||_inf <= 1}`
    #[default]
    Indicator,
    /// `max(0, 1 - ||x||_inf)`
    Tent,
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for Compensator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Indicator => f.write_str("Indicator"),
            Self::Tent => f.write_str("Tent"),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Compensator {
    pub fn weight(&self, x: &[f64]) -> f64 {
        match self {
            Self::Indicator => f64::from(u8::from(sup_norm(x) <= 1.0)),
            Self::Tent => (1.0 - sup_norm(x)).max(0.0),
            Self::Custom(h) => h(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevyTriple {
    b: Vec<f64>,
    c: DMatrix<f64>,
    mu: AtomicMeasure<Vec<f64>>,
    compensator: Compensator,
    small_jump_integral: f64,
}

impl LevyTriple {
    /// Validates dimensions, symmetry and positive semidefiniteness of `c`
    /// (smallest eigenvalue at least `-1e-10`), and that atoms are nonzero.
    pub fn new(b: Vec<f64>, c: DMatrix<f64>, mu: AtomicMeasure<Vec<f64>>) -> Result<Self> {
        let d = b.len();
        if d == 0 {
            return Err(invalid("b", "dimension must be at least 1"));
        }
        if c.nrows() != d || c.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: c.nrows().max(c.ncols()) });
        }
        let scale = c.amax().max(1.0);
        if (&c - c.transpose()).amax() > 1e-12 * scale {
            return Err(invalid("C", "not symmetric"));
        }
        let min_eig = c.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -1e-10 {
            return Err(invalid("C", format!("smallest eigenvalue {min_eig:e} is negative")));
        }
        let mut small_jump_integral = 0.0;
        for (x, w) in mu.atoms() {
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.len() });
            }
            let n = sup_norm(x);
            if n == 0.0 {
                return Err(Error::RemovedPointQueried);
            }
            small_jump_integral += w * (n * n).min(1.0);
        }
        Ok(Self { b, c, mu, compensator: Compensator::Indicator, small_jump_integral })
    }

    pub fn with_compensator(mut self, compensator: Compensator) -> Self {
        self.compensator = compensator;
        self
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn mu(&self) -> &AtomicMeasure<Vec<f64>> {
        &self.mu
    }

    pub fn compensator(&self) -> &Compensator {
        &self.compensator
    }

    /// `int (1 ^ ||x||_inf^2) dmu`
    pub fn small_jump_integral(&self) -> f64 {
        self.small_jump_integral
    }
}

fn dot(u: &[f64], x: &[f64]) -> f64 {
    u.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// `i u.b - u.Cu/2 + sum_atoms w (e^{i u.x} - 1 - i u.x h(x))`
pub fn psi_exponent(t: &LevyTriple, u: &[f64]) -> Result<Complex64> {
    let d = t.dim();
    if u.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: u.len() });
    }
    let mut quad = 0.0;
    for k in 0..d {
        for j in 0..d {
            quad += u[k] * t.c[(k, j)] * u[j];
        }
    }
    let mut jumps = Complex64::default();
    for (x, w) in t.mu.atoms() {
        let ux = dot(u, x);
        jumps += (Complex64::from_polar(1.0, ux) - 1.0 - I * ux * t.compensator.weight(x)) * *w;
    }
    Ok(I * dot(u, &t.b) - 0.5 * quad + jumps)
}

/// Increasing `m` values at which a limit `m -> inf` is sampled, plus the
/// tolerance on the last two extrapolated estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSchedule {
    ms: Vec<f64>,
    tol: f64,
}

impl LimitSchedule {
    pub fn new(ms: Vec<f64>, tol: f64) -> Result<Self> {
        if ms.len() < 2 {
            return Err(invalid("m_schedule", "needs at least two entries"));
        }
        if ms.iter().any(|m| !(*m > 0.0 && m.is_finite())) || ms.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("m_schedule", "entries must be positive and strictly increasing"));
        }
        if !(tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        Ok(Self { ms, tol })
    }

    /// `[m_max/8, m_max/4, m_max/2, m_max]` with tolerance `0.1`.
    pub fn geometric(m_max: f64) -> Result<Self> {
        Self::new(vec![m_max / 8.0, m_max / 4.0, m_max / 2.0, m_max], 0.1)
    }

    pub fn ms(&self) -> &[f64] {
        &self.ms
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// Richardson extrapolation of vector-valued estimates with error `~ m^-p`,
/// combining consecutive schedule entries. Fails if the last two combined
/// estimates differ by more than the schedule tolerance (relative to
/// `max(1, |value|)`).
pub(crate) fn richardson(schedule: &LimitSchedule, estimates: &[Vec<f64>], p: f64) -> Result<Vec<f64>> {
    let ms = &schedule.ms;
    let combined: Vec<Vec<f64>> = (0..ms.len() - 1)
        .map(|i| {
            let (a, b) = (ms[i].powf(p), ms[i + 1].powf(p));
            estimates[i].iter().zip(&estimates[i + 1]).map(|(e0, e1)| (b * e1 - a * e0) / (b - a)).collect()
        })
        .collect();
    let last = combined.last().expect("schedule has two entries").clone();
    if let [.., prev, _] = combined.as_slice() {
        for (p0, p1) in prev.iter().zip(&last) {
            if (p1 - p0).abs() > schedule.tol * p1.abs().max(1.0) || !p1.is_finite() {
                return Err(Error::NonConvergent { previous: *p0, last: *p1, tol: schedule.tol });
            }
        }
    }
    Ok(last)
}

fn unit(d: usize, k: usize, m: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = m;
    e
}

/// `C_kj = -lim m^-2 [Psi(m(e_k + e_j)) - Psi(m e_k) - Psi(m e_j)]`, real part,
/// Richardson-extrapolated with error order 2 and symmetrized.
pub fn recover_c<F>(psi: F, d: usize, schedule: &LimitSchedule) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Complex64,
{
    let estimates: Vec<Vec<f64>> = schedule
        .ms
        .iter()
        .map(|&m| {
            let diag: Vec<Complex64> = (0..d).map(|k| psi(&unit(d, k, m))).collect();
            let mut out = Vec::with_capacity(d * d);
            for k in 0..d {
                for j in 0..d {
                    let mut ekj = unit(d, k, m);
                    ekj[j] += m;
                    out.push(-(psi(&ekj) - diag[k] - diag[j]).re / (m * m));
                }
            }
            out
        })
        .collect();
    let flat = richardson(schedule, &estimates, 2.0)?;
    let raw = DMatrix::from_row_slice(d, d, &flat);
    Ok((&raw + raw.transpose()) * 0.5)
}

/// `b_k = lim -(i/m) (Psi(m e_k) + m^2 C_kk / 2)`, real part, Richardson order 1.
///
/// With the indicator compensator the limit equals `b_k - int x_k 1{||x||_inf <= 1} dmu`,
/// so it reproduces `b` only when that integral vanishes. A non-vanishing
/// imaginary part is logged as a warning.
pub fn recover_b<F>(psi: F, c: &DMatrix<f64>, d: usize, schedule: &LimitSchedule) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Complex64,
{
    if c.nrows() != d || c.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: c.nrows() });
    }
    let raw: Vec<Vec<Complex64>> = schedule
        .ms
        .iter()
        .map(|&m| (0..d).map(|k| -I / m * (psi(&unit(d, k, m)) + 0.5 * m * m * c[(k, k)])).collect())
        .collect();
    let re: Vec<Vec<f64>> = raw.iter().map(|v| v.iter().map(|z| z.re).collect()).collect();
    let im_last = raw.last().expect("schedule has two entries").iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if im_last > schedule.tol {
        log::warn!("recover_b: imaginary residue {im_last:e} at m = {}", schedule.ms.last().unwrap());
    }
    richardson(schedule, &re, 1.0)
}

fn vec_id(u: &[f64]) -> String {
    let parts: Vec<String> = u.iter().map(|v| v.to_string()).collect();
    parts.join(",")
}

/// `F_u(x) = exp(i u.x) - 1`
pub fn f_u(u: Vec<f64>) -> TestFunction<Vec<f64>> {
    let id = format!("F[{}]", vec_id(&u));
    TestFunction::new(id, 2.0, move |x: &Vec<f64>| Complex64::from_polar(1.0, dot(&u, x)) - 1.0)
}

/// `psi_u(x) = i u.x h(x)`. The declared bound `|u|_1` assumes `0 <= h <= 1`
/// with `h = 0` outside the unit ball, as for the built-in compensators.
pub fn psi_u(u: Vec<f64>, compensator: Compensator) -> TestFunction<Vec<f64>> {
    let id = format!("psi[{}]", vec_id(&u));
    let bound = u.iter().map(|v| v.abs()).sum::<f64>();
    TestFunction::new(id, bound, move |x: &Vec<f64>| I * dot(&u, x) * compensator.weight(x))
}

/// `G_u = F_u - psi_u`
pub fn g_u(u: Vec<f64>, compensator: Compensator) -> TestFunction<Vec<f64>> {
    let (f, p) = (f_u(u.clone()), psi_u(u.clone(), compensator));
    let id = format!("G[{}]", vec_id(&u));
    let bound = f.sup_bound() + p.sup_bound();
    TestFunction::new(id, bound, move |x: &Vec<f64>| f.eval(x).unwrap_or_default() - p.eval(x).unwrap_or_default())
}

/// Products `F_u F_v` for the sampled pairs, on `R^D \ {0}`.
pub fn levy_family(d: usize, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<FunctionFamily<Vec<f64>>> {
    let mut members = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        for w in [u, v] {
            if w.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.len() });
            }
        }
        let (fu, fv) = (f_u(u.clone()), f_u(v.clone()));
        let id = format!("{}*{}", fu.id(), fv.id());
        members.push(TestFunction::new(id, 4.0, move |x: &Vec<f64>| {
            fu.eval(x).unwrap_or_default() * fv.eval(x).unwrap_or_default()
        }));
    }
    Ok(FunctionFamily::new(members, levy_space_metric(d)))
}

/// The diagonal frequency `u* = (eps pi / (2D), ...)` and the lower bound
/// `(1 - cos(pi eps^2 / (2D)))^2` claimed for `inf |F_{u*}|^2` on the annulus
/// `eps < ||x||_inf < 1/eps`.
pub fn annulus_frequency(eps: f64, d: usize) -> (Vec<f64>, f64) {
    let dd = d as f64;
    let u = vec![eps * std::f64::consts::PI / (2.0 * dd); d];
    let bound = (1.0 - (std::f64::consts::PI * eps * eps / (2.0 * dd)).cos()).powi(2);
    (u, bound)
}

/// `sum_k |F_{(eps pi / 2) e_k}(x)|^2`, a member of the span of the product
/// family that is bounded below by `(1 - cos(pi eps^2 / 2))^2` on the whole
/// annulus in every dimension.
pub fn annulus_axis_sum(eps: f64, d: usize) -> (TestFunction<Vec<f64>>, f64) {
    let a = eps * std::f64::consts::PI / 2.0;
    let f = TestFunction::real(format!("axis-sum[{eps}]"), 4.0 * d as f64, move |x: &Vec<f64>| {
        x.iter().map(|xk| 2.0 - 2.0 * (a * xk).cos()).sum()
    });
    (f, (1.0 - (std::f64::consts::PI * eps * eps / 2.0).cos()).powi(2))
}
