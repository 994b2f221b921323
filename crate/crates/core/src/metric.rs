//! Metric spaces, boundedness, and the metric constructions used by the
//! examples: point removal, the Hilbert cube metric with an inverted first
//! coordinate, and the concrete metrics built on top of them.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

type DistFn<P> = dyn Fn(&P, &P) -> Result<f64> + Send + Sync;

/// A distance function on a point type together with a reference point used
/// to express boundedness as a radius.
///
/// Values are immutable once built and cheap to clone.
pub struct MetricStructure<P> {
    id: Arc<str>,
    dist: Arc<DistFn<P>>,
    reference: P,
}

impl<P: Clone> Clone for MetricStructure<P> {
    fn clone(&self) -> Self {
        Self { id: Arc::clone(&self.id), dist: Arc::clone(&self.dist), reference: self.reference.clone() }
    }
}

impl<P: fmt::Debug> fmt::Debug for MetricStructure<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricStructure").field("id", &self.id).field("reference", &self.reference).finish()
    }
}

impl<P> MetricStructure<P> {
    pub fn new<F>(id: impl Into<String>, reference: P, dist: F) -> Self
    where
        F: Fn(&P, &P) -> Result<f64> + Send + Sync + 'static,
    {
        Self { id: Arc::from(id.into()), dist: Arc::new(dist), reference }
    }

    pub fn dist(&self, x: &P, y: &P) -> Result<f64> {
        (self.dist)(x, y)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn reference(&self) -> &P {
        &self.reference
    }

    /// Same distance, different reference point.
    pub fn with_reference(self, reference: P) -> Self {
        Self { reference, ..self }
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// A closed ball `{x : dist(center, x) <= radius}` standing in for a bounded set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedSetWitness<P> {
    pub center: P,
    pub radius: f64,
}

impl<P> BoundedSetWitness<P> {
    pub fn new(center: P, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, metric: &MetricStructure<P>, x: &P) -> Result<bool> {
        Ok(metric.dist(&self.center, x)? <= self.radius)
    }
}

/// `|x - y|` on the real line.
pub fn real_line() -> MetricStructure<f64> {
    MetricStructure::new("R:abs", 0.0, |x: &f64, y: &f64| Ok((x - y).abs()))
}

pub fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `||x - y||_inf` on R^D.
pub fn sup_norm_metric(dim: usize) -> MetricStructure<Vec<f64>> {
    MetricStructure::new(format!("R^{dim}:sup"), vec![0.0; dim], move |x: &Vec<f64>, y: &Vec<f64>| {
        check_dim(dim, x.len())?;
        check_dim(dim, y.len())?;
        Ok(x.iter().zip(y).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    })
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Sends `removed` infinitely far away:
/// `d'(y, z) = d(y, z) + |d(removed, y)^-1 - d(removed, z)^-1|` on `X \ {removed}`.
///
/// Distances involving the removed point itself are reported as
/// [`Error::RemovedPointQueried`] rather than as infinity. The caller picks the
/// reference point of the new space since the base reference may be the
/// removed point.
pub fn point_removal_metric<P>(base: &MetricStructure<P>, removed: P, reference: P) -> Result<MetricStructure<P>>
where
    P: Clone + Send + Sync + 'static,
{
    if base.dist(&removed, &reference)? == 0.0 {
        return Err(Error::RemovedPointQueried);
    }
    let inner = base.clone();
    let id = format!("{}\\removed", base.id());
    Ok(MetricStructure::new(id, reference, move |y: &P, z: &P| {
        let dy = inner.dist(&removed, y)?;
        let dz = inner.dist(&removed, z)?;
        if dy == 0.0 || dz == 0.0 {
            return Err(Error::RemovedPointQueried);
        }
        Ok(inner.dist(y, z)? + (dy.recip() - dz.recip()).abs())
    }))
}

/// The metric on `R^D \ {0}` used for Lévy measures:
/// `||x - y||_inf + | ||x||_inf^-1 - ||y||_inf^-1 |`, reference point `(1, 0, ..., 0)`.
pub fn levy_space_metric(dim: usize) -> MetricStructure<Vec<f64>> {
    assert!(dim >= 1, "dimension must be positive");
    let mut reference = vec![0.0; dim];
    reference[0] = 1.0;
    point_removal_metric(&sup_norm_metric(dim), vec![0.0; dim], reference)
        .expect("reference differs from origin")
}

/// `|x^-1 - y^-1|` on `(0, 1]`, reference point 1.
pub fn inverse_metric() -> MetricStructure<f64> {
    MetricStructure::new("(0,1]:inverse", 1.0, |x: &f64, y: &f64| {
        for v in [*x, *y] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(invalid("point", format!("{v} not in (0, 1]")));
            }
        }
        Ok((x.recip() - y.recip()).abs())
    })
}

/// Discrete metric on the finite set `{0, ..., size - 1}`.
pub fn discrete_metric(size: usize) -> MetricStructure<usize> {
    MetricStructure::new(format!("E{size}:discrete"), 0, move |x: &usize, y: &usize| {
        if *x >= size || *y >= size {
            return Err(invalid("point", format!("index outside ground set of size {size}")));
        }
        Ok(if x == y { 0.0 } else { 1.0 })
    })
}

/// A point of the Hilbert cube `[0,1]^N`, finitely supported: coordinates
/// past the stored prefix are zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CubePoint(pub Vec<f64>);

impl CubePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(v) = coords.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid("coordinate", format!("{v} not in [0, 1]")));
        }
        Ok(Self(coords))
    }

    /// Coordinate `n`, 1-based.
    pub fn coord(&self, n: usize) -> f64 {
        self.0.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }
}

/// `r(x, y) = |x_1^-1 - y_1^-1| + sum_n 2^-n (|x_n - y_n| ^ 1)`.
///
/// The series is summed over the longer supported prefix; the remaining tail
/// is identically zero because both points vanish there.
pub fn hilbert_cube_metric() -> MetricStructure<CubePoint> {
    MetricStructure::new("H:r", CubePoint(vec![1.0]), |x: &CubePoint, y: &CubePoint| {
        let (x1, y1) = (x.coord(1), y.coord(1));
        for v in [x1, y1] {
            if v <= 0.0 {
                return Err(Error::NotInCubeDomain(v));
            }
        }
        let len = x.support_len().max(y.support_len());
        let mut weight = 1.0;
        let mut series = 0.0;
        for n in 1..=len {
            weight *= 0.5;
            series += weight * (x.coord(n) - y.coord(n)).abs().min(1.0);
        }
        Ok((x1.recip() - y1.recip()).abs() + series)
    })
}

/// True iff every sample point lies within `radius_cap` of the reference point.
pub fn is_bounded<P>(sample: &[P], metric: &MetricStructure<P>, radius_cap: f64) -> Result<bool> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let reference = metric.reference();
    for x in sample {
        if metric.dist(reference, x)? > radius_cap {
            return Ok(false);
        }
    }
    Ok(true)
}
