use measura::{AtomicMeasure, Result};

/// `nu1(S) <= nu2(S^eps) + eps` for every subset `S` of the atoms of `nu1`,
/// where `S^eps` is the open `eps`-neighbourhood of `S`.
fn dominated<P: Clone>(nu1: &AtomicMeasure<P>, nu2: &AtomicMeasure<P>, eps: f64) -> Result<bool> {
    let space = nu1.space();
    let (a, b) = (nu1.atoms(), nu2.atoms());
    // near[i][j]: atom j of nu2 lies within eps of atom i of nu1
    let near = a
        .iter()
        .map(|(x, _)| b.iter().map(|(y, _)| Ok(space.dist(x, y)? < eps)).collect::<Result<Vec<bool>>>())
        .collect::<Result<Vec<_>>>()?;
    for mask in 0u32..1 << a.len() {
        let members = || (0..a.len()).filter(move |i| mask >> i & 1 == 1);
        let mass: f64 = members().map(|i| a[i].1).sum();
        let covered: f64 = (0..b.len()).filter(|j| members().any(|i| near[i][*j])).map(|j| b[j].1).sum();
        if mass > covered + eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Prohorov distance by bisection on `eps`, testing every subset of either
/// support. Exponential in the number of atoms; meant as an oracle for small
/// measures.
pub fn prohorov_brute_force<P: Clone>(nu1: &AtomicMeasure<P>, nu2: &AtomicMeasure<P>) -> Result<f64> {
    let feasible = |eps: f64| -> Result<bool> { Ok(dominated(nu1, nu2, eps)? && dominated(nu2, nu1, eps)?) };
    let (mut lo, mut hi) = (0.0, nu1.total_mass().max(nu2.total_mass()) + 1e-9);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
