//! Hyperbolicity diagnostics read off the walls of a cube complex:
//! L-separation, grids of walls, coloured-wall metrics, the bottleneck
//! distances `dist_L`, the curtain-model distance that sums them, and the
//! four-point δ of a finite metric table.

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CubeComplex;
use crate::error::{Error, Result};
use crate::numeric::{decimal_string, Rational};
use crate::wallsys::{Chain, Relation, Side};
use crate::zeta::{zeta, zeta_f64};

/// Two chains with every wall of one crossing every wall of the other.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridWitness {
    pub chain_a: Chain,
    pub chain_b: Chain,
    pub thinness: usize,
}

fn crossing_sets(x: &CubeComplex) -> Vec<FixedBitSet> {
    let h = x.num_walls();
    let ws = x.walls();
    (0..h)
        .map(|i| {
            let mut set = FixedBitSet::with_capacity(h);
            set.extend((0..h).filter(|&j| ws.crosses(i, j)));
            set
        })
        .collect()
}

/// Bottleneck widths of all disjoint wall pairs: the longest chain of walls
/// crossing both. Computed once per complex and reused by `dist_L` and the
/// curtain model.
#[derive(Clone, Debug)]
pub struct SeparationProfile<'a> {
    complex: &'a CubeComplex,
    /// `None` for crossing or identical pairs.
    width: Vec<Option<usize>>,
}

impl<'a> SeparationProfile<'a> {
    pub fn new(complex: &'a CubeComplex) -> SeparationProfile<'a> {
        let h = complex.num_walls();
        let ws = complex.walls();
        let cross = crossing_sets(complex);
        let rows: Vec<Vec<Option<usize>>> = (0..h)
            .into_par_iter()
            .map(|i| {
                (0..h)
                    .map(|j| {
                        if !matches!(ws.relation(i, j), Relation::Nested(..)) {
                            return None;
                        }
                        let mut both = cross[i].clone();
                        both.intersect_with(&cross[j]);
                        if both.is_clear() {
                            return Some(0);
                        }
                        let subset: Vec<usize> = both.ones().collect();
                        Some(ws.longest_chain(&subset).len())
                    })
                    .collect()
            })
            .collect();
        SeparationProfile { complex, width: rows.into_iter().flatten().collect() }
    }

    pub fn complex(&self) -> &CubeComplex {
        self.complex
    }

    pub fn width(&self, h: usize, k: usize) -> Option<usize> {
        self.width[h * self.complex.num_walls() + k]
    }

    /// Largest width over disjoint pairs.
    pub fn max_width(&self) -> usize {
        self.width.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn are_l_separated(&self, h: usize, k: usize, l: usize) -> Result<bool> {
        let n = self.complex.num_walls();
        for w in [h, k] {
            if w >= n {
                return Err(Error::UnknownWall(w));
            }
        }
        match self.width(h, k) {
            Some(w) => Ok(w <= l),
            None if h == k => Err(Error::Parameter("L-separation needs two distinct walls".into())),
            None => Err(Error::CrossingWalls(h, k)),
        }
    }

    /// Longest chain of pairwise `l`-separated walls separating `x` from
    /// `y`, ordered from `x`.
    ///
    /// Along a nested sequence `h1 ⊂ h2 ⊂ h3` every wall crossing `h1` and
    /// `h3` also crosses `h2`, so widths shrink with distance and checking
    /// consecutive pairs suffices.
    pub fn dist_l_chain(&self, l: usize, x: usize, y: usize) -> Chain {
        let ws = self.complex.walls();
        let nodes: Vec<(usize, Side)> =
            ws.separating_walls(x, y).into_iter().map(|w| (w, ws.wall(w).side_of(x))).collect();
        ws.longest_nested_path(&nodes, |h, k| self.width(h, k).is_some_and(|w| w <= l))
    }

    /// `0` if `x = y`, else one plus the longest chain of pairwise
    /// `l`-separated walls separating them.
    pub fn dist_l(&self, l: usize, x: usize, y: usize) -> usize {
        if x == y {
            0
        } else {
            1 + self.dist_l_chain(l, x, y).len()
        }
    }

    /// `Σ_{L≥1} dist_L(x,y) / L^p`, exactly: `dist_L` is constant from
    /// `L = H` (the number of walls) on, so the tail is `dist_H` times
    /// `ζ(p) − Σ_{L<H} L^{-p}`.
    pub fn curtain_model_dist(&self, x: usize, y: usize, exponent: u32) -> Result<CurtainValue> {
        if exponent < 2 {
            return Err(Error::Parameter(format!("exponent must be an integer ≥ 2, got {exponent}")));
        }
        if x == y {
            return Ok(CurtainValue::zero(exponent));
        }
        let stable_from = self.complex.num_walls().max(1);
        let tail = self.dist_l(stable_from, x, y);
        let mut rational = Rational::zero();
        for l in 1..stable_from {
            let excess = self.dist_l(l, x, y) as i64 - tail as i64;
            if excess != 0 {
                rational += Rational::from_integer(BigInt::from(excess)) * partial_power(l as u64, exponent);
            }
        }
        Ok(CurtainValue { rational, zeta_coefficient: Rational::from_integer(BigInt::from(tail)), exponent })
    }

    /// `Σ_{L=1}^{terms} dist_L(x,y) / L^p` in floating point, evaluating
    /// `dist_L` afresh for every `L`.
    pub fn curtain_truncated(&self, x: usize, y: usize, exponent: u32, terms: usize) -> f64 {
        // Summed from the small tail terms upward to limit rounding.
        (1..=terms).rev().map(|l| self.dist_l(l, x, y) as f64 / (l as f64).powi(exponent as i32)).sum()
    }
}

fn partial_power(l: u64, p: u32) -> Rational {
    Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(l), p as usize))
}

/// Whether the disjoint walls `h`, `k` are `l`-separated: every chain of
/// walls crossing both has at most `l` members.
pub fn are_l_separated(x: &CubeComplex, h: usize, k: usize, l: usize) -> Result<bool> {
    let ws = x.walls();
    for w in [h, k] {
        if w >= ws.len() {
            return Err(Error::UnknownWall(w));
        }
    }
    match ws.relation(h, k) {
        Relation::Identical => Err(Error::Parameter("L-separation needs two distinct walls".into())),
        Relation::Crossing => Err(Error::CrossingWalls(h, k)),
        Relation::Nested(..) => {
            let both: Vec<usize> = (0..ws.len()).filter(|&j| ws.crosses(h, j) && ws.crosses(k, j)).collect();
            Ok(ws.longest_chain(&both).len() <= l)
        }
    }
}

pub fn dist_l(x: &CubeComplex, l: usize, a: usize, b: usize) -> usize {
    SeparationProfile::new(x).dist_l(l, a, b)
}

pub fn curtain_model_dist(x: &CubeComplex, a: usize, b: usize, exponent: u32) -> Result<CurtainValue> {
    SeparationProfile::new(x).curtain_model_dist(a, b, exponent)
}

/// `0` if `x = y`, else one plus the number of walls from `colored`
/// separating them.
pub fn dist_colored(x: &CubeComplex, colored: &[usize], a: usize, b: usize) -> Result<usize> {
    for &w in colored {
        if w >= x.num_walls() {
            return Err(Error::UnknownWall(w));
        }
    }
    if a == b {
        return Ok(0);
    }
    let mut distinct = colored.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(1 + distinct.iter().filter(|&&w| x.walls().wall(w).separates(a, b)).count())
}

/// Largest `min(|A|, |B|)` over grids of walls, with a witness. Searches
/// increasing chains `A` of half spaces; `B` is a longest chain among the
/// walls crossing all of `A`.
pub fn grid_thinness(x: &CubeComplex) -> GridWitness {
    let ws = x.walls();
    let h = ws.len();
    let cross = crossing_sets(x);
    let nodes: Vec<(usize, Side)> = (0..h).flat_map(|w| [(w, Side::Plus), (w, Side::Minus)]).collect();
    let mut best = GridWitness::default();
    let mut stack_a: Vec<(usize, Side)> = Vec::new();

    fn extend(
        x: &CubeComplex,
        cross: &[FixedBitSet],
        nodes: &[(usize, Side)],
        chain: &mut Vec<(usize, Side)>,
        common: FixedBitSet,
        best: &mut GridWitness,
    ) {
        let ws = x.walls();
        let subset: Vec<usize> = common.ones().collect();
        let other = ws.longest_chain(&subset);
        if other.len() <= best.thinness {
            return;
        }
        if chain.len() > best.thinness {
            *best = GridWitness {
                chain_a: Chain::new(chain.iter().map(|n| n.0).collect()),
                chain_b: other.clone(),
                thinness: chain.len().min(other.len()),
            };
        }
        let &(last, side) = chain.last().unwrap();
        for &(w, s) in nodes {
            if ws.half_nested(last, side, w, s) {
                let mut next = common.clone();
                next.intersect_with(&cross[w]);
                chain.push((w, s));
                extend(x, cross, nodes, chain, next, best);
                chain.pop();
            }
        }
    }

    for &node in &nodes {
        stack_a.push(node);
        extend(x, &cross, &nodes, &mut stack_a, cross[node.0].clone(), &mut best);
        stack_a.pop();
    }
    best
}

/// A value `rational + zeta_coefficient · ζ(exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurtainValue {
    pub rational: Rational,
    pub zeta_coefficient: Rational,
    pub exponent: u32,
}

impl CurtainValue {
    pub fn zero(exponent: u32) -> CurtainValue {
        CurtainValue { rational: Rational::zero(), zeta_coefficient: Rational::zero(), exponent }
    }

    /// Decimal expansion with `digits` fractional digits; correct up to one
    /// unit in the last place for `digits ≤ 50`.
    pub fn decimal(&self, digits: usize) -> String {
        let z = zeta(self.exponent);
        decimal_string(&(&self.rational + &self.zeta_coefficient * z.approx), digits)
    }

    pub fn to_f64(&self) -> f64 {
        let z = zeta(self.exponent);
        (&self.rational + &self.zeta_coefficient * z.approx).to_f64().unwrap_or(f64::NAN)
    }

    pub fn half(&self) -> CurtainValue {
        let two = Rational::from_integer(BigInt::from(2));
        CurtainValue {
            rational: &self.rational / &two,
            zeta_coefficient: &self.zeta_coefficient / &two,
            exponent: self.exponent,
        }
    }

    /// Sign of the value. Exact when the ζ coefficient vanishes; otherwise
    /// decided by the ζ enclosure (≈ 60 digits), treating anything inside
    /// the enclosure as zero.
    pub fn signum(&self) -> Ordering {
        if self.zeta_coefficient.is_zero() {
            return self.rational.cmp(&Rational::zero());
        }
        // Floating-point screen; conversion errors are far below the margin.
        let (r, c) = (self.rational.to_f64().unwrap_or(f64::NAN), self.zeta_coefficient.to_f64().unwrap_or(f64::NAN));
        let estimate = r + c * zeta_f64(self.exponent);
        if estimate.abs() > 1e-6 * (1.0 + r.abs() + c.abs()) {
            return estimate.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        let z = zeta(self.exponent);
        let centre = &self.rational + &self.zeta_coefficient * &z.approx;
        let slack = self.zeta_coefficient.abs() * &z.error;
        if centre > slack {
            Ordering::Greater
        } else if centre < -slack {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Add for &CurtainValue {
    type Output = CurtainValue;
    fn add(self, other: &CurtainValue) -> CurtainValue {
        assert_eq!(self.exponent, other.exponent, "mixed exponents");
        CurtainValue {
            rational: &self.rational + &other.rational,
            zeta_coefficient: &self.zeta_coefficient + &other.zeta_coefficient,
            exponent: self.exponent,
        }
    }
}

impl Sub for &CurtainValue {
    type Output = CurtainValue;
    fn sub(self, other: &CurtainValue) -> CurtainValue {
        assert_eq!(self.exponent, other.exponent, "mixed exponents");
        CurtainValue {
            rational: &self.rational - &other.rational,
            zeta_coefficient: &self.zeta_coefficient - &other.zeta_coefficient,
            exponent: self.exponent,
        }
    }
}

impl PartialOrd for CurtainValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurtainValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

/// Values a pseudometric table can hold.
pub trait MetricValue: Clone + Ord + Send + Sync {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn halve(&self) -> Self;
}

impl MetricValue for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn halve(&self) -> Self {
        self / Rational::from_integer(BigInt::from(2))
    }
}

impl MetricValue for CurtainValue {
    fn zero_like(&self) -> Self {
        CurtainValue::zero(self.exponent)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn halve(&self) -> Self {
        self.half()
    }
}

/// Symmetric, nonnegative, zero-diagonal table satisfying the triangle
/// inequality.
#[derive(Clone, Debug)]
pub struct PseudoMetricTable<V> {
    names: Vec<String>,
    values: Vec<Vec<V>>,
}

impl<V: MetricValue> PseudoMetricTable<V> {
    pub fn new(names: Vec<String>, values: Vec<Vec<V>>) -> Result<PseudoMetricTable<V>> {
        let n = names.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric("table is not square over its points".into()));
        }
        if n == 0 {
            return Ok(PseudoMetricTable { names, values });
        }
        let zero = values[0][0].zero_like();
        for i in 0..n {
            if values[i][i] != zero {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at `{}`", names[i])));
            }
            for j in 0..n {
                if values[i][j] != values[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({}, {})", names[i], names[j])));
                }
                if values[i][j] < zero {
                    return Err(Error::InvalidMetric(format!("negative at ({}, {})", names[i], names[j])));
                }
            }
        }
        let violation = (0..n).into_par_iter().find_map_first(|i| {
            for j in 0..n {
                for k in 0..n {
                    if values[i][k] > values[i][j].plus(&values[j][k]) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        if let Some((i, j, k)) = violation {
            return Err(Error::InvalidMetric(format!(
                "triangle inequality fails: d({a},{c}) > d({a},{b}) + d({b},{c})",
                a = names[i],
                b = names[j],
                c = names[k]
            )));
        }
        Ok(PseudoMetricTable { names, values })
    }

    /// Tabulates `f` over all vertex pairs of a complex (in parallel).
    pub fn from_complex<F>(x: &CubeComplex, f: F) -> Result<PseudoMetricTable<V>>
    where
        F: Fn(usize, usize) -> Result<V> + Sync,
    {
        let n = x.num_vertices();
        let values: Vec<Vec<V>> =
            (0..n).into_par_iter().map(|i| (0..n).map(|j| f(i, j)).collect::<Result<Vec<V>>>()).collect::<Result<_>>()?;
        PseudoMetricTable::new(x.names().to_vec(), values)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, i: usize, j: usize) -> &V {
        &self.values[i][j]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaEstimate<V> {
    pub delta: V,
    /// A maximizing quadruple, `None` with fewer than four points.
    pub witness: Option<[usize; 4]>,
}

/// Maximum over quadruples of half the gap between the largest and second
/// largest of the three pair sums.
pub fn four_point_delta<V: MetricValue>(table: &PseudoMetricTable<V>) -> Option<DeltaEstimate<V>> {
    let n = table.len();
    if n == 0 {
        return None;
    }
    let zero = table.get(0, 0).zero_like();
    let d = |i: usize, j: usize| table.get(i, j);
    let per_first: Vec<Option<(V, [usize; 4])>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best: Option<(V, [usize; 4])> = None;
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let mut sums =
                            [d(a, b).plus(d(c, e)), d(a, c).plus(d(b, e)), d(a, e).plus(d(b, c))];
                        sums.sort();
                        let defect = sums[2].minus(&sums[1]).halve();
                        if best.as_ref().is_none_or(|(v, _)| defect > *v) {
                            best = Some((defect, [a, b, c, e]));
                        }
                    }
                }
            }
            best
        })
        .collect();
    let mut out = DeltaEstimate { delta: zero, witness: None };
    for (value, quad) in per_first.into_iter().flatten() {
        if out.witness.is_none() || value > out.delta {
            out = DeltaEstimate { delta: value, witness: Some(quad) };
        }
    }
    Some(out)
}
