//! Injective hulls (tight spans) of finite metric spaces.
//!
//! Points of the hull are metric forms `f: X → ℝ` with
//! `f(x) + f(y) ≥ d(x, y)` that are pointwise minimal; on a finite space
//! minimality is the equality `f(x) = max_y (d(x, y) − f(y))`. Everything is
//! exact rational arithmetic except the convergence phase of the retraction.

mod cells;
mod retract;

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, rational_from_json, Rational};

pub use cells::{tight_span_cells, TightSpanReport, CELL_POINT_BOUND};
pub use retract::{retract, Retraction, DEFAULT_TOLERANCE};

/// JSON schema: `{"points": [...], "d": [[...], ...]}`; entries are numbers
/// or `"p/q"` / decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDoc {
    pub points: Vec<String>,
    pub d: Vec<Vec<Value>>,
}

/// A finite metric space with exact rational distances.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    points: Vec<String>,
    index: HashMap<String, usize>,
    d: Vec<Vec<Rational>>,
}

impl FiniteMetric {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality.
    pub fn new(points: Vec<String>, d: Vec<Vec<Rational>>) -> Result<FiniteMetric> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidMetric("no points".into()));
        }
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("distance matrix must be {n}×{n}")));
        }
        let mut index = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidMetric(format!("duplicate point `{p}`")));
            }
        }
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(Error::InvalidMetric(format!("d({0},{0}) ≠ 0", points[i])));
            }
            for j in 0..n {
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidMetric(format!("d({},{}) is not symmetric", points[i], points[j])));
                }
                if i != j && !d[i][j].is_positive() {
                    return Err(Error::InvalidMetric(format!("d({},{}) must be positive", points[i], points[j])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails at ({}, {}, {})",
                            points[i], points[j], points[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { points, index, d })
    }

    pub fn from_doc(doc: &MetricDoc) -> Result<FiniteMetric> {
        let d = doc
            .d
            .iter()
            .map(|row| row.iter().map(rational_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteMetric::new(doc.points.clone(), d)
    }

    /// CSV with a header row of point names; each data row may start with
    /// its point name.
    pub fn from_csv(text: &str) -> Result<FiniteMetric> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
        }
        // A leading empty header cell means every row is labelled.
        let labelled = header.first().is_some_and(|h| h.is_empty());
        let points: Vec<String> = if labelled { header[1..].to_vec() } else { header };
        let d = rows
            .iter()
            .map(|row| {
                let cells = if labelled { &row[1.min(row.len())..] } else { &row[..] };
                cells.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteMetric::new(points, d)
    }

    pub fn to_doc(&self) -> MetricDoc {
        MetricDoc {
            points: self.points.clone(),
            d: self.d.iter().map(|row| row.iter().map(crate::numeric::rational_to_json).collect()).collect(),
        }
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, x: usize, y: usize) -> &Rational {
        &self.d[x][y]
    }

    pub fn point(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    fn check_form(&self, f: &MetricForm) -> Result<()> {
        if f.len() == self.len() {
            Ok(())
        } else {
            Err(Error::FormLength { expected: self.len(), got: f.len() })
        }
    }
}

/// A function on the points of a metric space, as a vector indexed like the
/// space's point list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetricForm {
    values: Vec<Rational>,
}

impl MetricForm {
    pub fn new(values: Vec<Rational>) -> MetricForm {
        MetricForm { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> Rational {
        self.values.iter().min().cloned().unwrap_or_else(Rational::zero)
    }

    /// `(1 − t)·self + t·other`.
    pub fn lerp(&self, other: &MetricForm, t: &Rational) -> MetricForm {
        let s = Rational::one() - t;
        MetricForm::new(self.values.iter().zip(&other.values).map(|(a, b)| &s * a + t * b).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(crate::numeric::to_f64).collect()
    }
}

/// Sup distance between two forms.
pub fn d_inf(f: &MetricForm, g: &MetricForm) -> Rational {
    f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero)
}

/// The first pair `(x, y)` with `f(x) + f(y) < d(x, y)`, if any.
pub(crate) fn delta_violation(m: &FiniteMetric, f: &MetricForm) -> Option<(usize, usize)> {
    let n = m.len();
    (0..n).flat_map(|x| (x..n).map(move |y| (x, y))).find(|&(x, y)| &f.values[x] + &f.values[y] < m.d[x][y])
}

/// Membership in the cone Δ of metric forms.
pub fn in_delta(m: &FiniteMetric, f: &MetricForm) -> Result<bool> {
    m.check_form(f)?;
    Ok(delta_violation(m, f).is_none())
}

/// Membership in Δ¹: in Δ and 1-Lipschitz.
pub fn in_delta1(m: &FiniteMetric, f: &MetricForm) -> Result<bool> {
    if !in_delta(m, f)? {
        return Ok(false);
    }
    let n = m.len();
    Ok((0..n).all(|x| (0..n).all(|y| (&f.values[x] - &f.values[y]).abs() <= m.d[x][y])))
}

/// `f*(x) = max_y (d(x, y) − f(y))`.
pub fn conjugate(m: &FiniteMetric, f: &MetricForm) -> MetricForm {
    let n = m.len();
    MetricForm::new(
        (0..n).map(|x| (0..n).map(|y| &m.d[x][y] - &f.values[y]).max().expect("nonempty space")).collect(),
    )
}

/// Extremality of a form in Δ: `f = f*` exactly.
pub fn is_extremal(m: &FiniteMetric, f: &MetricForm) -> Result<bool> {
    m.check_form(f)?;
    if let Some((x, y)) = delta_violation(m, f) {
        return Err(Error::NotInDelta(m.points[x].clone(), m.points[y].clone()));
    }
    Ok(conjugate(m, f) == *f)
}

/// The Kuratowski image `e(x) = d(x, ·)`.
pub fn kuratowski(m: &FiniteMetric, x: usize) -> MetricForm {
    MetricForm::new(m.d[x].clone())
}

pub fn kuratowski_named(m: &FiniteMetric, x: &str) -> Result<MetricForm> {
    Ok(kuratowski(m, m.point(x)?))
}

/// Outcome of a Helly query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HellyWitness {
    /// An extremal form inside every ball.
    Point(MetricForm),
    /// Balls `i` and `j` are too far apart to meet.
    Infeasible(usize, usize),
}

/// Finds a point of the hull in every ball `B(e(c_i), r_i)` when the balls
/// pairwise intersect: the form `min_i (r_i + d(·, c_i))` lies in Δ and
/// retracting only lowers it.
pub fn helly_witness(m: &FiniteMetric, balls: &[(usize, Rational)], tol: f64) -> Result<HellyWitness> {
    if balls.is_empty() {
        return Err(Error::Empty("ball family"));
    }
    for (c, r) in balls {
        if *c >= m.len() {
            return Err(Error::UnknownPoint(c.to_string()));
        }
        if r.is_negative() {
            return Err(Error::Parameter("negative radius".into()));
        }
    }
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if m.d[balls[i].0][balls[j].0] > &balls[i].1 + &balls[j].1 {
                return Ok(HellyWitness::Infeasible(i, j));
            }
        }
    }
    let n = m.len();
    let g = MetricForm::new(
        (0..n).map(|x| balls.iter().map(|(c, r)| r + &m.d[x][*c]).min().expect("nonempty")).collect(),
    );
    if delta_violation(m, &g).is_some() {
        return Err(Error::Internal("ball envelope is not a metric form".into()));
    }
    let f = retract(m, &g, tol)?.form;
    for (c, r) in balls {
        if f.values[*c] > *r {
            return Err(Error::Internal(format!("retracted witness leaves the ball around `{}`", m.points[*c])));
        }
    }
    Ok(HellyWitness::Point(f))
}

/// Legs of the tripod on three points and its centre.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tripod {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub center: MetricForm,
}

/// Solves `d(x,y) = a + b`, `d(x,z) = a + c`, `d(y,z) = b + c` and returns
/// an extremal `m` with `d∞(m, e(x)) = a`, `d∞(m, e(y)) = b`,
/// `d∞(m, e(z)) = c`.
pub fn tripod_center(m: &FiniteMetric, x: usize, y: usize, z: usize, tol: f64) -> Result<Tripod> {
    for p in [x, y, z] {
        if p >= m.len() {
            return Err(Error::UnknownPoint(p.to_string()));
        }
    }
    if x == y || y == z || x == z {
        return Err(Error::Parameter("tripod needs three distinct points".into()));
    }
    let two = Rational::from_integer(2.into());
    let (dxy, dxz, dyz) = (&m.d[x][y], &m.d[x][z], &m.d[y][z]);
    let a = (dxy + dxz - dyz) / &two;
    let b = (dxy + dyz - dxz) / &two;
    let c = (dxz + dyz - dxy) / &two;
    let n = m.len();
    let legs = [(x, &a), (y, &b), (z, &c)];
    // Lower envelope: any extremal form within the legs dominates it.
    let lower = MetricForm::new(
        (0..n).map(|w| legs.iter().map(|(p, r)| &m.d[*p][w] - *r).max().expect("three legs")).collect(),
    );
    let start = if delta_violation(m, &lower).is_none() {
        lower
    } else {
        MetricForm::new((0..n).map(|w| legs.iter().map(|(p, r)| *r + &m.d[*p][w]).min().expect("three legs")).collect())
    };
    let center = retract(m, &start, tol)?.form;
    for (p, r) in legs {
        if d_inf(&center, &kuratowski(m, p)) != *r {
            return Err(Error::Internal(format!("tripod leg at `{}` has the wrong length", m.points[p])));
        }
    }
    Ok(Tripod { a, b, c, center })
}

/// Average of the Kuratowski images, pushed down onto the hull.
pub fn center(m: &FiniteMetric, pts: &[usize], tol: f64) -> Result<MetricForm> {
    if pts.is_empty() {
        return Err(Error::Empty("point list"));
    }
    for &p in pts {
        if p >= m.len() {
            return Err(Error::UnknownPoint(p.to_string()));
        }
    }
    let count = Rational::from_integer((pts.len() as i64).into());
    let n = m.len();
    let average = MetricForm::new(
        (0..n).map(|w| pts.iter().map(|&p| m.d[p][w].clone()).fold(Rational::zero(), |a, b| a + b) / &count).collect(),
    );
    let pushed = retract(m, &average, tol)?.form;
    for &p in pts {
        let e = kuratowski(m, p);
        if d_inf(&pushed, &e) > d_inf(&average, &e) {
            return Err(Error::Internal("push-down moved the centre away from a point".into()));
        }
    }
    Ok(pushed)
}

/// Point at parameter `t` on the combing path from `f` to `g`: the affine
/// interpolation retracted onto the hull.
pub fn comb(m: &FiniteMetric, f: &MetricForm, g: &MetricForm, t: &Rational, tol: f64) -> Result<MetricForm> {
    for form in [f, g] {
        if !is_extremal(m, form)? {
            let at = conjugate(m, form).values.iter().zip(&form.values).position(|(a, b)| a != b).unwrap_or(0);
            return Err(Error::NotExtremal(m.points[at].clone()));
        }
    }
    if t.is_negative() || *t > Rational::one() {
        return Err(Error::Parameter("comb parameter must lie in [0, 1]".into()));
    }
    if t.is_zero() {
        return Ok(f.clone());
    }
    if t.is_one() {
        return Ok(g.clone());
    }
    Ok(retract(m, &f.lerp(g, t), tol)?.form)
}
