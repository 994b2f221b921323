//! Polynomials on the Hilbert cube and a constructive Stone–Weierstrass
//! approximation that vanishes on the face `x_1 = 0`.
//!
//! The approximant is `p = x_1 * B_N(g~)`, where `g~ = g / x_1` (extended by
//! its one-sided limit on the face) and `B_N` is the tensor Bernstein operator
//! of degree `N` per coordinate. High-degree Bernstein polynomials are badly conditioned in the
//! monomial basis, so they are stored in Bernstein form; [`CubePolynomial::to_monomial`]
//! expands exactly when the degree is small enough for that to be meaningful.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Points per axis of the verification grid, endpoints included.
pub const SW_GRID_POINTS: usize = 50;

const FACE_STEP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PolynomialBasis {
    /// `term(x) = prod_j x_j^{a_j}`
    Monomial,
    /// `term(x) = prod_j C(N_j, a_j) x_j^{a_j} (1 - x_j)^{N_j - a_j}`
    Bernstein { degrees: Vec<u32> },
}

/// `x_1^{x1_factor} * sum_terms c * term(x)` on the first `arity` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CubePolynomial {
    pub arity: usize,
    pub basis: PolynomialBasis,
    pub x1_factor: u32,
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

impl CubePolynomial {
    /// Lowest power of `x_1` in the given term.
    pub fn first_coordinate_exponent(&self, term: usize) -> u32 {
        self.x1_factor + self.terms[term].0.first().copied().unwrap_or(0)
    }

    /// Syntactic membership in P_0: every term carries a positive power of `x_1`.
    pub fn in_p0(&self) -> bool {
        (0..self.terms.len()).all(|t| self.first_coordinate_exponent(t) >= 1)
    }

    pub fn max_degree(&self) -> u32 {
        match &self.basis {
            PolynomialBasis::Bernstein { degrees } => degrees.iter().copied().max().unwrap_or(0),
            PolynomialBasis::Monomial => self.terms.iter().flat_map(|(a, _)| a.iter().copied()).max().unwrap_or(0),
        }
    }

    /// Evaluates at the first `arity` coordinates of `x` (missing ones are 0).
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let coord = |j: usize| x.get(j).copied().unwrap_or(0.0);
        let prefix = coord(0).powi(self.x1_factor as i32);
        let sum: Complex64 = match &self.basis {
            PolynomialBasis::Monomial => self
                .terms
                .iter()
                .map(|(a, c)| c * a.iter().enumerate().map(|(j, &e)| coord(j).powi(e as i32)).product::<f64>())
                .sum(),
            PolynomialBasis::Bernstein { degrees } => {
                let tables: Vec<Vec<f64>> =
                    degrees.iter().enumerate().map(|(j, &n)| bernstein_basis(n, coord(j))).collect();
                self.terms
                    .iter()
                    .map(|(a, c)| c * a.iter().enumerate().map(|(j, &k)| tables[j][k as usize]).product::<f64>())
                    .sum()
            }
        };
        prefix * sum
    }

    /// Exact expansion into the monomial basis (coefficients summed in `f64`).
    pub fn to_monomial(&self) -> CubePolynomial {
        let degrees = match &self.basis {
            PolynomialBasis::Monomial => return self.clone(),
            PolynomialBasis::Bernstein { degrees } => degrees,
        };
        let expansions: Vec<Vec<Vec<f64>>> =
            degrees.iter().map(|&n| (0..=n).map(|k| bernstein_monomial_coeffs(n, k)).collect()).collect();
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (a, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
            for (j, &k) in a.iter().enumerate() {
                let coeffs = &expansions[j][k as usize];
                let mut next = Vec::new();
                for (idx, w) in &partial {
                    for (p, &cp) in coeffs.iter().enumerate() {
                        if cp != 0.0 {
                            let mut i = idx.clone();
                            i.push(p as u32);
                            next.push((i, w * cp));
                        }
                    }
                }
                partial = next;
            }
            for (mut idx, w) in partial {
                if let Some(first) = idx.first_mut() {
                    *first += self.x1_factor;
                }
                *acc.entry(idx).or_default() += c * w;
            }
        }
        CubePolynomial {
            arity: self.arity,
            basis: PolynomialBasis::Monomial,
            x1_factor: 0,
            terms: acc.into_iter().filter(|(_, c)| *c != Complex64::default()).collect(),
        }
    }
}

/// `b_{k,n}(x)` for `k = 0..=n`.
fn bernstein_basis(n: u32, x: f64) -> Vec<f64> {
    let n_us = n as usize;
    let mut out = vec![0.0; n_us + 1];
    if x <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x >= 1.0 {
        out[n_us] = 1.0;
        return out;
    }
    let (lx, l1x) = (x.ln(), (-x).ln_1p());
    let lf = ln_factorials(n_us);
    for (k, o) in out.iter_mut().enumerate() {
        let ln_c = lf[n_us] - lf[k] - lf[n_us - k];
        *o = (ln_c + k as f64 * lx + (n_us - k) as f64 * l1x).exp();
    }
    out
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    lf
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monomial coefficients of `b_{k,n}`: index `i` holds the coefficient of `x^i`.
fn bernstein_monomial_coeffs(n: u32, k: u32) -> Vec<f64> {
    let mut c = vec![0.0; n as usize + 1];
    let lead = binomial(n, k);
    for i in k..=n {
        let sign = if (i - k) % 2 == 0 { 1.0 } else { -1.0 };
        c[i as usize] = lead * binomial(n - k, i - k) * sign;
    }
    c
}

fn grid_axis(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Iterates over all points of `axis^arity`.
fn for_each_grid_point(axis: &[f64], arity: usize, mut f: impl FnMut(&[f64]) -> Result<()>) -> Result<()> {
    let mut idx = vec![0usize; arity];
    let mut point = vec![axis[0]; arity];
    loop {
        f(&point)?;
        let mut j = 0;
        loop {
            if j == arity {
                return Ok(());
            }
            idx[j] += 1;
            if idx[j] < axis.len() {
                point[j] = axis[idx[j]];
                break;
            }
            idx[j] = 0;
            point[j] = axis[0];
            j += 1;
        }
    }
}

/// Finds `p` in P_0 with `|g(x) - p(x)| <= eps * x_1` on the `50^arity`
/// verification grid (which includes the face `x_1 = 0`).
///
/// `g` must be `[0,1]`-valued, depend only on its first `arity` coordinates,
/// and vanish whenever `x_1 < delta`; both are checked on the grid. Degrees
/// 1, 2, 4, ... up to `degree_budget` are tried in turn.
pub fn stone_weierstrass_p0<G>(g: G, arity: usize, delta: f64, eps: f64, degree_budget: u32) -> Result<CubePolynomial>
where
    G: Fn(&[f64]) -> f64,
{
    if arity == 0 {
        return Err(invalid("arity", "must be at least 1"));
    }
    if !(delta >= 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("{delta} not in [0, 1)")));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if degree_budget == 0 {
        return Err(invalid("degree_budget", "must be at least 1"));
    }
    let axis = grid_axis(SW_GRID_POINTS);

    let mut grid: Vec<(Vec<f64>, f64)> = Vec::with_capacity(SW_GRID_POINTS.pow(arity as u32));
    for_each_grid_point(&axis, arity, |x| {
        let v = g(x);
        if !(-1e-15..=1.0 + 1e-15).contains(&v) {
            return Err(invalid("g", format!("value {v} outside [0, 1]")));
        }
        let on_face = x[0] == 0.0;
        if (x[0] < delta || on_face) && v.abs() > 1e-15 {
            return Err(Error::SupportViolated { x1: x[0], delta, value: v });
        }
        grid.push((x.to_vec(), v));
        Ok(())
    })?;

    // On the face g~ is taken as the one-sided limit g(h, x_2, ...) / h.
    let g_tilde = |x: &[f64]| {
        if x[0] > 0.0 {
            g(x) / x[0]
        } else {
            let mut y = x.to_vec();
            y[0] = FACE_STEP;
            g(&y) / FACE_STEP
        }
    };

    let mut degree = 1u32;
    let mut last_error = f64::INFINITY;
    loop {
        let poly = bernstein_p0(&g_tilde, arity, degree);
        // max over the grid of |g - p| / x_1 for x_1 > 0; the face is exact.
        let mut worst = 0.0f64;
        for (x, v) in &grid {
            if x[0] > 0.0 {
                worst = worst.max((Complex64::from(*v) - poly.eval(x)).norm() / x[0]);
            }
        }
        last_error = last_error.min(worst);
        if worst <= eps {
            return Ok(poly);
        }
        if degree >= degree_budget {
            return Err(Error::BudgetExhausted { degree, error: last_error, target: eps });
        }
        degree = (degree * 2).min(degree_budget);
    }
}

fn bernstein_p0(g_tilde: &dyn Fn(&[f64]) -> f64, arity: usize, degree: u32) -> CubePolynomial {
    let nodes: Vec<f64> = (0..=degree).map(|k| k as f64 / degree as f64).collect();
    let mut terms = Vec::new();
    let mut idx = vec![0u32; arity];
    let mut point = vec![0.0; arity];
    'outer: loop {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = nodes[i as usize];
        }
        let c = g_tilde(&point);
        if c != 0.0 {
            terms.push((idx.clone(), Complex64::from(c)));
        }
        for j in 0..arity {
            idx[j] += 1;
            if idx[j] <= degree {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    CubePolynomial { arity, basis: PolynomialBasis::Bernstein { degrees: vec![degree; arity] }, x1_factor: 1, terms }
}
