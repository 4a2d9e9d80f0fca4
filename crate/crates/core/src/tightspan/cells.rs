//! Vertices of the polyhedral structure on the tight span.
//!
//! A vertex is an extremal form pinned down by its tight equations
//! `f(x) + f(y) = d(x, y)`. A set of `n` such equations (loops `x = y`
//! allowed) determines `f` uniquely exactly when every connected piece of its
//! graph has one cycle and that cycle is odd, so the search runs over those
//! edge sets with a parity union-find.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;

use super::retract::solve_tight;
use super::{conjugate, delta_violation, FiniteMetric, MetricForm};
use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Largest space accepted by [`tight_span_cells`].
pub const CELL_POINT_BOUND: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct TightSpanReport {
    /// Sorted, distinct zero-cells.
    pub zero_cells: Vec<MetricForm>,
    /// `max_f min_x f(x)` over the zero-cells; a lower bound for the same
    /// quantity over the whole tight span.
    pub coarse_gap: Rational,
}

#[derive(Clone)]
struct Parity {
    parent: Vec<usize>,
    /// Parity of the path to the parent.
    parity: Vec<bool>,
    cyclic: Vec<bool>,
}

impl Parity {
    fn new(n: usize) -> Parity {
        Parity { parent: (0..n).collect(), parity: vec![false; n], cyclic: vec![false; n] }
    }

    fn find(&self, mut v: usize) -> (usize, bool) {
        let mut p = false;
        while self.parent[v] != v {
            p ^= self.parity[v];
            v = self.parent[v];
        }
        (v, p)
    }

    /// Adds an edge, keeping every piece with at most one cycle, and that
    /// cycle odd.
    fn add(&mut self, u: usize, v: usize) -> bool {
        let (ru, pu) = self.find(u);
        let (rv, pv) = self.find(v);
        if ru == rv {
            if self.cyclic[ru] || pu != pv {
                return false;
            }
            self.cyclic[ru] = true;
            return true;
        }
        if self.cyclic[ru] && self.cyclic[rv] {
            return false;
        }
        self.parent[ru] = rv;
        self.parity[ru] = !(pu ^ pv);
        self.cyclic[rv] |= self.cyclic[ru];
        true
    }
}

pub fn tight_span_cells(m: &FiniteMetric) -> Result<TightSpanReport> {
    let n = m.len();
    if n > CELL_POINT_BOUND {
        return Err(Error::TooLarge { points: n, bound: CELL_POINT_BOUND });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).collect();
    let cells: BTreeSet<MetricForm> = (0..pairs.len())
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeSet::new();
            let mut uf = Parity::new(n);
            if uf.add(pairs[first].0, pairs[first].1) {
                let mut chosen = vec![pairs[first]];
                search(m, &pairs, first + 1, &mut chosen, &uf, &mut found);
            }
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let zero_cells: Vec<MetricForm> = cells.into_iter().collect();
    let coarse_gap = zero_cells.iter().map(MetricForm::min_value).max().unwrap_or_else(Rational::zero);
    Ok(TightSpanReport { zero_cells, coarse_gap })
}

fn search(
    m: &FiniteMetric,
    pairs: &[(usize, usize)],
    next: usize,
    chosen: &mut Vec<(usize, usize)>,
    uf: &Parity,
    found: &mut BTreeSet<MetricForm>,
) {
    let n = m.len();
    if chosen.len() == n {
        if let Some(f) = evaluate(m, chosen) {
            found.insert(f);
        }
        return;
    }
    if pairs.len() - next < n - chosen.len() {
        return;
    }
    for i in next..pairs.len() {
        let (u, v) = pairs[i];
        let mut extended = uf.clone();
        if extended.add(u, v) {
            chosen.push((u, v));
            search(m, pairs, i + 1, chosen, &extended, found);
            chosen.pop();
        }
    }
}

fn evaluate(m: &FiniteMetric, edges: &[(usize, usize)]) -> Option<MetricForm> {
    let sol = solve_tight(m, edges)?;
    let params: Vec<Rational> = sol.fixed.iter().cloned().collect::<Option<Vec<_>>>()?;
    let f = MetricForm::new((0..m.len()).map(|v| sol.value(v, &params[sol.comp[v]])).collect());
    (delta_violation(m, &f).is_none() && conjugate(m, &f) == f).then_some(f)
}
