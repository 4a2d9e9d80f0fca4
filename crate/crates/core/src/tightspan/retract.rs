//! Retraction of Δ onto the extremal forms.
//!
//! The averaging map `f ↦ (f + f*)/2` is 1-Lipschitz in the sup norm, fixes
//! extremal forms and decreases every form of Δ. Its iterates converge to an
//! extremal form below the start. Iteration runs in exact rationals until the
//! sup change drops below the tolerance; the limit is then snapped onto the
//! exact solution of its tight equations `f(x) + f(y) = d(x, y)` and accepted
//! only after exact verification.

use num_traits::Zero;

use super::{conjugate, delta_violation, d_inf, FiniteMetric, MetricForm};
use crate::error::{Error, Result};
use crate::numeric::{from_f64, simplest_between, Rational};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const MAX_ITERATIONS: usize = 5000;

/// Result of [`retract`].
#[derive(Clone, Debug, PartialEq)]
pub struct Retraction {
    /// Exact extremal form, pointwise at most the input.
    pub form: MetricForm,
    /// Averaging steps taken.
    pub iterations: usize,
    /// Whether the answer came from solving the tight system rather than
    /// from an exact fixed point of the iteration.
    pub snapped: bool,
    /// The last iterate before snapping.
    pub pre_snap: MetricForm,
}

/// Values on one connected piece of a tight graph, written as
/// `c_v + σ_v · t` in terms of the value `t` at the piece's root.
pub(super) struct TightSolution {
    pub comp: Vec<usize>,
    pub roots: Vec<usize>,
    pub offset: Vec<Rational>,
    pub sign: Vec<i8>,
    /// `Some(t)` when the piece contains an odd cycle (or loop).
    pub fixed: Vec<Option<Rational>>,
}

impl TightSolution {
    pub fn value(&self, v: usize, t: &Rational) -> Rational {
        if self.sign[v] > 0 {
            &self.offset[v] + t
        } else {
            &self.offset[v] - t
        }
    }
}

/// Propagates the equations `g(u) + g(v) = d(u, v)` over `edges` (loops
/// allowed). `None` when two equations disagree.
pub(super) fn solve_tight(m: &FiniteMetric, edges: &[(usize, usize)]) -> Option<TightSolution> {
    let n = m.len();
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        adjacency[u].push(v);
        if u != v {
            adjacency[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut offset = vec![Rational::zero(); n];
    let mut sign = vec![0i8; n];
    let mut roots = Vec::new();
    for r in 0..n {
        if comp[r] != usize::MAX {
            continue;
        }
        let id = roots.len();
        roots.push(r);
        comp[r] = id;
        sign[r] = 1;
        let mut stack = vec![r];
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    offset[v] = m.d(u, v) - &offset[u];
                    sign[v] = -sign[u];
                    stack.push(v);
                }
            }
        }
    }
    let mut fixed: Vec<Option<Rational>> = vec![None; roots.len()];
    for &(u, v) in edges {
        let s = sign[u] + sign[v];
        let rhs = m.d(u, v) - &offset[u] - &offset[v];
        if s == 0 {
            if !rhs.is_zero() {
                return None;
            }
            continue;
        }
        let t = rhs / Rational::from_integer(s.into());
        match &fixed[comp[u]] {
            Some(existing) if *existing != t => return None,
            Some(_) => {}
            None => fixed[comp[u]] = Some(t),
        }
    }
    Some(TightSolution { comp, roots, offset, sign, fixed })
}

/// Retracts `f ∈ Δ` onto an extremal form `g ≤ f`.
pub fn retract(m: &FiniteMetric, f: &MetricForm, tol: f64) -> Result<Retraction> {
    m.check_form(f)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    if let Some((x, y)) = delta_violation(m, f) {
        return Err(Error::NotInDelta(m.points()[x].clone(), m.points()[y].clone()));
    }
    let two = Rational::from_integer(2.into());
    let mut h = f.clone();
    let mut threshold = tol;
    for iterations in 0..=MAX_ITERATIONS {
        let star = conjugate(m, &h);
        if star == h {
            return Ok(Retraction { form: h.clone(), iterations, snapped: false, pre_snap: h });
        }
        let next = MetricForm::new(h.values.iter().zip(&star.values).map(|(a, b)| (a + b) / &two).collect());
        let change = d_inf(&h, &next);
        h = next;
        if crate::numeric::to_f64(&change) < threshold {
            if let Some(g) = snap(m, &h, f, threshold) {
                return Ok(Retraction { form: g, iterations: iterations + 1, snapped: true, pre_snap: h });
            }
            threshold /= 16.0;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

/// Solves the near-tight equations of `h` exactly. Free parameters (pieces
/// with only even cycles) take the simplest rational within `tol` of `h`.
fn snap(m: &FiniteMetric, h: &MetricForm, f: &MetricForm, tol: f64) -> Option<MetricForm> {
    let n = m.len();
    let eta = from_f64(tol.sqrt().max(tol * 1e3));
    let window = from_f64(tol);
    let slack = |x: usize, y: usize| &h.values[x] + &h.values[y] - m.d(x, y);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).filter(|&(x, y)| slack(x, y) <= eta).collect();
    let mut covered = vec![false; n];
    for &(x, y) in &edges {
        covered[x] = true;
        covered[y] = true;
    }
    if covered.contains(&false) {
        return None;
    }
    let sol = solve_tight(m, &edges)?;
    let params: Vec<Rational> = (0..sol.roots.len())
        .map(|id| match &sol.fixed[id] {
            Some(t) => t.clone(),
            None => free_parameter(m, &sol, id, h, f, &window),
        })
        .collect();
    let g = MetricForm::new((0..n).map(|v| sol.value(v, &params[sol.comp[v]])).collect());
    let verified = delta_violation(m, &g).is_none()
        && conjugate(m, &g) == g
        && g.values.iter().zip(&f.values).all(|(a, b)| a <= b);
    verified.then_some(g)
}

fn free_parameter(
    m: &FiniteMetric,
    sol: &TightSolution,
    id: usize,
    h: &MetricForm,
    f: &MetricForm,
    window: &Rational,
) -> Rational {
    let members: Vec<usize> = (0..m.len()).filter(|&v| sol.comp[v] == id).collect();
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut lower = |b: Rational| lo = Some(lo.take().map_or(b.clone(), |l| l.max(b)));
    let mut upper = |b: Rational| hi = Some(hi.take().map_or(b.clone(), |u| u.min(b)));
    for &v in &members {
        // c_v + σ_v t ≤ f(v)
        if sol.sign[v] > 0 {
            upper(&f.values[v] - &sol.offset[v]);
        } else {
            lower(&sol.offset[v] - &f.values[v]);
        }
    }
    for &u in &members {
        for &v in &members {
            // c_u + c_v + (σ_u + σ_v) t ≥ d(u, v)
            let s = sol.sign[u] + sol.sign[v];
            let rhs = m.d(u, v) - &sol.offset[u] - &sol.offset[v];
            match s.signum() {
                1 => lower(rhs / Rational::from_integer(s.into())),
                -1 => upper(rhs / Rational::from_integer(s.into())),
                _ => {}
            }
        }
    }
    let target = h.values[sol.roots[id]].clone();
    let mut a = &target - window;
    let mut b = &target + window;
    if let Some(l) = &lo {
        a = a.max(l.clone());
    }
    if let Some(u) = &hi {
        b = b.min(u.clone());
    }
    if a <= b {
        return simplest_between(&a, &b);
    }
    let mut t = target;
    if let Some(l) = lo {
        t = t.max(l);
    }
    if let Some(u) = hi {
        t = t.min(u);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::super::tests::metric;
    use super::super::{is_extremal, kuratowski};
    use super::*;
    use crate::numeric::{int, ratio};

    #[test]
    fn two_point_example() {
        let m = metric(&["x", "y"], &[&[0, 5], &[5, 0]]);
        let r = retract(&m, &MetricForm::new(vec![int(3), int(3)]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.form, MetricForm::new(vec![ratio(5, 2), ratio(5, 2)]));
        // Iterates (0, 13/2), (0, 23/4), ... converge to e(x).
        let r = retract(&m, &MetricForm::new(vec![int(1), int(9)]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.form, MetricForm::new(vec![int(0), int(5)]));
        assert!(r.snapped);
    }

    #[test]
    fn extremal_forms_are_fixed() {
        let m = metric(&["a", "b", "c", "d"], &[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]);
        for x in 0..4 {
            let r = retract(&m, &kuratowski(&m, x), DEFAULT_TOLERANCE).unwrap();
            assert_eq!(r.iterations, 0);
            assert_eq!(r.form, kuratowski(&m, x));
        }
    }

    #[test]
    fn retraction_of_a_constant_form_on_the_square() {
        let m = metric(&["a", "b", "c", "d"], &[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]);
        let r = retract(&m, &MetricForm::new(vec![int(3); 4]), DEFAULT_TOLERANCE).unwrap();
        assert!(is_extremal(&m, &r.form).unwrap());
        assert!(r.form.values().iter().all(|v| *v <= int(3)));
    }

    #[test]
    fn rejects_forms_outside_delta() {
        let m = metric(&["x", "y"], &[&[0, 5], &[5, 0]]);
        assert_eq!(
            retract(&m, &MetricForm::new(vec![int(1), int(1)]), DEFAULT_TOLERANCE),
            Err(Error::NotInDelta("x".into(), "y".into()))
        );
        assert!(retract(&m, &MetricForm::new(vec![int(3), int(3)]), 0.0).is_err());
    }

    #[test]
    fn tight_system_with_odd_cycle() {
        let m = metric(&["x", "y", "z"], &[&[0, 4, 6], &[4, 0, 8], &[6, 8, 0]]);
        let sol = solve_tight(&m, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let t = sol.fixed[0].clone().unwrap();
        assert_eq!((0..3).map(|v| sol.value(v, &t)).collect::<Vec<_>>(), vec![int(1), int(3), int(5)]);
        assert!(solve_tight(&m, &[(0, 0), (0, 1), (1, 1)]).is_none());
    }
}
