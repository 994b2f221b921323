use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

use super::ExcursionPath;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bounded weight `h` applied to the lifetime. It equals `value_beyond` for
/// `r >= constant_from`, and, if `zero_below` is set, vanishes for `r < zero_below`.
#[derive(Clone)]
pub struct LifetimeWeight {
    id: String,
    h: RealFn,
    zero_below: Option<f64>,
    constant_from: f64,
    value_beyond: f64,
    kinks: Vec<f64>,
}

impl fmt::Debug for LifetimeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LifetimeWeight")
            .field("id", &self.id)
            .field("zero_below", &self.zero_below)
            .field("constant_from", &self.constant_from)
            .field("value_beyond", &self.value_beyond)
            .finish()
    }
}

impl LifetimeWeight {
    pub fn constant(c: f64) -> Self {
        Self {
            id: format!("const[{c}]"),
            h: Arc::new(move |_| c),
            zero_below: (c == 0.0).then_some(f64::INFINITY),
            constant_from: 0.0,
            value_beyond: c,
            kinks: Vec::new(),
        }
    }

    /// `1{r > t}`
    pub fn step(t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(invalid("t", "step location must be positive"));
        }
        Ok(Self {
            id: format!("step[{t}]"),
            h: Arc::new(move |r| f64::from(u8::from(r > t))),
            zero_below: Some(t),
            constant_from: t,
            value_beyond: 1.0,
            kinks: vec![t],
        })
    }

    /// `before` on `[0, a]`, `after` on `[b, inf)`, linear in between.
    pub fn ramp(a: f64, b: f64, before: f64, after: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b.is_finite()) {
            return Err(invalid("ramp", format!("need 0 <= a < b < inf, got a = {a}, b = {b}")));
        }
        Ok(Self {
            id: format!("ramp[{a},{b},{before},{after}]"),
            h: Arc::new(move |r| {
                if r <= a {
                    before
                } else if r >= b {
                    after
                } else {
                    before + (after - before) * (r - a) / (b - a)
                }
            }),
            zero_below: (before == 0.0 && a > 0.0).then_some(a),
            constant_from: b,
            value_beyond: after,
            kinks: vec![a, b],
        })
    }

    /// A caller-described weight. `h(r)` must equal `value_beyond` for
    /// `r >= constant_from` and vanish below `zero_below` when that is given.
    pub fn custom<F>(id: impl Into<String>, h: F, zero_below: Option<f64>, constant_from: f64, value_beyond: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { id: id.into(), h: Arc::new(h), zero_below, constant_from, value_beyond, kinks: Vec::new() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.constant_from {
            self.value_beyond
        } else {
            (self.h)(r)
        }
    }

    pub fn zero_below(&self) -> Option<f64> {
        self.zero_below
    }

    pub fn constant_from(&self) -> f64 {
        self.constant_from
    }

    pub fn value_beyond(&self) -> f64 {
        self.value_beyond
    }

    /// Points where `h` is not smooth; quadratures split there.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
}

/// Continuous time weight `f` supported in `[a, b]`.
#[derive(Clone)]
pub struct TimeWeight {
    id: String,
    f: RealFn,
    support: (f64, f64),
    kinks: Vec<f64>,
}

impl fmt::Debug for TimeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeWeight").field("id", &self.id).field("support", &self.support).finish()
    }
}

impl TimeWeight {
    /// Tent of height 1 on `[a, b]` peaking at the midpoint.
    pub fn tent(a: f64, b: f64) -> Result<Self> {
        check_support(a, b)?;
        let mid = 0.5 * (a + b);
        Ok(Self {
            id: format!("tent[{a},{b}]"),
            f: Arc::new(move |t| (1.0 - (t - mid).abs() / (mid - a)).max(0.0)),
            support: (a, b),
            kinks: vec![a, mid, b],
        })
    }

    /// `1` on `[a + w, b - w]`, linear to `0` at `a` and `b`.
    pub fn plateau(a: f64, b: f64, w: f64) -> Result<Self> {
        check_support(a, b)?;
        if !(w > 0.0 && 2.0 * w <= b - a) {
            return Err(invalid("w", "edge width must be positive and fit in the support"));
        }
        Ok(Self {
            id: format!("plateau[{a},{b},{w}]"),
            f: Arc::new(move |t| ((t - a).min(b - t) / w).clamp(0.0, 1.0)),
            support: (a, b),
            kinks: vec![a, a + w, b - w, b],
        })
    }

    /// `f` is evaluated only on `[a, b]` and taken as `0` elsewhere.
    pub fn custom<F>(id: impl Into<String>, a: f64, b: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_support(a, b)?;
        Ok(Self { id: id.into(), f: Arc::new(f), support: (a, b), kinks: vec![a, b] })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            0.0
        } else {
            (self.f)(t)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !(0.0 <= a && a < b && b.is_finite()) {
        return Err(invalid("support", format!("need 0 <= a < b < inf, got [{a}, {b}]")));
    }
    Ok(())
}

/// Space weight `g` with `g(x) / (1 ^ x)` bounded; `g(0) = 0` is checked.
#[derive(Clone)]
pub struct SpaceWeight {
    id: String,
    g: RealFn,
}

impl fmt::Debug for SpaceWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceWeight").field("id", &self.id).finish()
    }
}

impl SpaceWeight {
    /// `1 ^ x`
    pub fn min_one() -> Self {
        Self { id: "min1".into(), g: Arc::new(|x| x.min(1.0)) }
    }

    /// `(1 ^ x) * c(x)` for a bounded continuous `c`.
    pub fn scaled<F>(id: impl Into<String>, c: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { id: id.into(), g: Arc::new(move |x| x.min(1.0) * c(x)) }
    }

    pub fn custom<F>(id: impl Into<String>, g: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let id = id.into();
        let g0 = g(0.0);
        if g0 != 0.0 {
            return Err(invalid("g", format!("{id}(0) = {g0}, must vanish at 0")));
        }
        Ok(Self { id, g: Arc::new(g) })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }
}

/// `F(e) = h(zeta(e)) * prod_i int f_i(t) g_i(e(t)) dt`
#[derive(Debug, Clone)]
pub struct ExcursionFunctional {
    pub h: LifetimeWeight,
    pub pairs: Vec<(TimeWeight, SpaceWeight)>,
}

impl ExcursionFunctional {
    pub fn new(h: LifetimeWeight, pairs: Vec<(TimeWeight, SpaceWeight)>) -> Self {
        Self { h, pairs }
    }

    pub fn lifetime_only(h: LifetimeWeight) -> Self {
        Self { h, pairs: Vec::new() }
    }

    /// Time after which neither `h(zeta)` nor any `f_i` depends on the path.
    pub fn horizon_needed(&self) -> f64 {
        self.pairs.iter().map(|(f, _)| f.support().1).fold(self.h.constant_from(), f64::max)
    }
}

/// Sub-intervals per unit of `f` support used on top of the path knots.
const TIME_NODES: usize = 1024;

/// `int_a^b f(t) g(e(t)) dt` by the trapezoid rule on the path knots inside
/// the support, merged with a uniform grid of the support and the kinks of `f`.
fn pair_integral(f: &TimeWeight, g: &SpaceWeight, e: &ExcursionPath) -> f64 {
    let (a, b) = f.support();
    let mut nodes: Vec<f64> = e.times().iter().copied().filter(|t| *t > a && *t < b).collect();
    nodes.extend((0..=TIME_NODES).map(|k| a + (b - a) * k as f64 / TIME_NODES as f64));
    nodes.extend(f.kinks().iter().copied().filter(|t| *t >= a && *t <= b));
    let last = *e.times().last().expect("nonempty");
    if last > a && last < b {
        // The path drops to 0 just after its last knot.
        nodes.push(last);
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let integrand = |t: f64| f.eval(t) * g.eval(e.value_at(t));
    let mut sum = 0.0;
    let mut prev = (nodes[0], integrand(nodes[0]));
    for &t in &nodes[1..] {
        // Right limit at the last knot is 0.
        let left = if prev.0 == last && t > last { 0.0 } else { prev.1 };
        let cur = integrand(t);
        sum += 0.5 * (left + cur) * (t - prev.0);
        prev = (t, cur);
    }
    sum
}

/// `h(zeta) * prod_i int f_i g_i(e) dt`. A censored path is accepted only if
/// it was observed up to [`ExcursionFunctional::horizon_needed`].
pub fn eval_functional(functional: &ExcursionFunctional, e: &ExcursionPath) -> Result<f64> {
    if e.is_censored() {
        let needed = functional.horizon_needed();
        if e.zeta() < needed {
            return Err(Error::HorizonTooShort(format!(
                "path censored at {} but the functional depends on the path up to {needed}",
                e.zeta()
            )));
        }
    }
    let mut value = functional.h.eval(e.zeta());
    for (f, g) in &functional.pairs {
        if value == 0.0 {
            break;
        }
        value *= pair_integral(f, g, e);
    }
    Ok(value)
}
