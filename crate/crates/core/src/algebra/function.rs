use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metric::MetricStructure;

type EvalFn<P> = dyn Fn(&P) -> Complex64 + Send + Sync;

/// A bounded complex-valued function with a stable identifier.
///
/// `sup_bound` is a declared upper bound on `|f|`; it is used for
/// normalisation and is not re-derived from the closure.
pub struct TestFunction<P> {
    id: String,
    eval: Arc<EvalFn<P>>,
    sup_bound: f64,
}

impl<P> Clone for TestFunction<P> {
    fn clone(&self) -> Self {
        Self { id: self.id.clone(), eval: Arc::clone(&self.eval), sup_bound: self.sup_bound }
    }
}

impl<P> fmt::Debug for TestFunction<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("id", &self.id).field("sup_bound", &self.sup_bound).finish()
    }
}

impl<P> TestFunction<P> {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

impl<P: 'static> TestFunction<P> {
    pub fn new<F>(id: impl Into<String>, sup_bound: f64, eval: F) -> Self
    where
        F: Fn(&P) -> Complex64 + Send + Sync + 'static,
    {
        Self { id: id.into(), eval: Arc::new(eval), sup_bound }
    }

    pub fn real<F>(id: impl Into<String>, sup_bound: f64, eval: F) -> Self
    where
        F: Fn(&P) -> f64 + Send + Sync + 'static,
    {
        Self::new(id, sup_bound, move |x| Complex64::new(eval(x), 0.0))
    }

    pub fn constant(id: impl Into<String>, value: Complex64) -> Self {
        Self::new(id, value.norm(), move |_| value)
    }

    /// Evaluates, turning a non-finite value into [`Error::Evaluation`].
    pub fn eval(&self, x: &P) -> Result<Complex64> {
        let v = (self.eval)(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { id: self.id.clone() })
        }
    }

    /// Pointwise transform of the value, with a caller-supplied id and bound.
    pub fn map<G>(&self, id: impl Into<String>, sup_bound: f64, g: G) -> Self
    where
        G: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.eval);
        Self::new(id, sup_bound, move |x| g(inner(x)))
    }

    pub fn conj(&self) -> Self {
        let id = match self.id.strip_prefix("conj(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) if balanced(inner) => inner.to_string(),
            _ => format!("conj({})", self.id),
        };
        self.map(id, self.sup_bound, |v| v.conj())
    }

    pub fn times(&self, other: &Self, id: impl Into<String>) -> Self {
        let (a, b) = (Arc::clone(&self.eval), Arc::clone(&other.eval));
        Self::new(id, self.sup_bound * other.sup_bound, move |x| a(x) * b(x))
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// A finite (sampled) family of test functions on a metric space.
pub struct FunctionFamily<P> {
    pub members: Vec<TestFunction<P>>,
    pub space: MetricStructure<P>,
}

impl<P: Clone> Clone for FunctionFamily<P> {
    fn clone(&self) -> Self {
        Self { members: self.members.clone(), space: self.space.clone() }
    }
}

impl<P: fmt::Debug> fmt::Debug for FunctionFamily<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<&str> = self.members.iter().map(|m| m.id()).collect();
        f.debug_struct("FunctionFamily").field("members", &ids).field("space", &self.space).finish()
    }
}

impl<P> FunctionFamily<P> {
    pub fn new(members: Vec<TestFunction<P>>, space: MetricStructure<P>) -> Self {
        Self { members, space }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&TestFunction<P>> {
        self.members.iter().find(|m| m.id() == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.id()).collect()
    }
}
