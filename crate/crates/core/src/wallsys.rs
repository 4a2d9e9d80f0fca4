//! Finite wall systems: families of bipartitions of a finite ground set,
//! with separation, crossing, nesting and chains of walls.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two half spaces of a wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn from_bit(bit: bool) -> Side {
        if bit {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// A bipartition of the ground set, stored as both half spaces over point
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wall {
    plus: FixedBitSet,
    minus: FixedBitSet,
}

impl Wall {
    /// Builds the wall whose plus side is `plus` and minus side its complement
    /// in a ground set of `n` points.
    pub fn from_plus(plus: FixedBitSet, n: usize) -> Wall {
        let mut plus = plus;
        plus.grow(n);
        let mut minus = FixedBitSet::with_capacity(n);
        minus.insert_range(..);
        minus.difference_with(&plus);
        Wall { plus, minus }
    }

    pub fn plus(&self) -> &FixedBitSet {
        &self.plus
    }

    pub fn minus(&self) -> &FixedBitSet {
        &self.minus
    }

    pub fn half(&self, side: Side) -> &FixedBitSet {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn side_of(&self, point: usize) -> Side {
        Side::from_bit(self.plus.contains(point))
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.plus.contains(x) != self.plus.contains(y)
    }

    /// The same bipartition with the sides exchanged.
    pub fn flipped(&self) -> Wall {
        Wall { plus: self.minus.clone(), minus: self.plus.clone() }
    }

    /// Orientation-independent key: the side not containing point 0.
    fn bipartition_key(&self) -> &FixedBitSet {
        if self.plus.contains(0) {
            &self.minus
        } else {
            &self.plus
        }
    }

    pub fn same_bipartition(&self, other: &Wall) -> bool {
        self.bipartition_key() == other.bipartition_key()
    }
}

/// How two walls sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Identical,
    Crossing,
    /// `h^a ∩ k^b = ∅` for the pair `(h, k)` this was computed for;
    /// equivalently `h^a ⊊ k^-b` and `k^b ⊊ h^-a`.
    Nested(Side, Side),
}

/// An ordered sequence of pairwise disjoint walls, each separating its
/// neighbours.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    walls: Vec<usize>,
}

impl Chain {
    pub fn new(walls: Vec<usize>) -> Chain {
        Chain { walls }
    }

    pub fn walls(&self) -> &[usize] {
        &self.walls
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallDoc {
    pub plus: Vec<String>,
    pub minus: Vec<String>,
}

/// JSON schema: `{"ground": [...], "walls": [{"plus": [...], "minus": [...]}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSystemDoc {
    pub ground: Vec<String>,
    pub walls: Vec<WallDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicatePoint,
    UnknownPoint,
    EmptySide,
    SidesOverlap,
    NotExhaustive,
    DuplicateWall,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ViolationKind::DuplicatePoint => "duplicate point",
            ViolationKind::UnknownPoint => "unknown point",
            ViolationKind::EmptySide => "empty side",
            ViolationKind::SidesOverlap => "sides overlap",
            ViolationKind::NotExhaustive => "sides do not cover the ground set",
            ViolationKind::DuplicateWall => "duplicate wall",
        };
        f.write_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Offending wall, or `None` for ground-set problems.
    pub wall: Option<usize>,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, wall: Option<usize>, kind: ViolationKind, detail: impl Into<String>) {
        self.violations.push(Violation { wall, kind, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match v.wall {
                Some(w) => write!(f, "wall {w}: {} ({})", v.kind, v.detail)?,
                None => write!(f, "{} ({})", v.kind, v.detail)?,
            }
        }
        Ok(())
    }
}

/// Checks every wall invariant of a document and reports each violation.
pub fn validate(doc: &WallSystemDoc) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut index = HashMap::new();
    for (i, p) in doc.ground.iter().enumerate() {
        if index.insert(p.as_str(), i).is_some() {
            report.push(None, ViolationKind::DuplicatePoint, p.clone());
        }
    }
    let n = doc.ground.len();
    let mut seen: Vec<(usize, Wall)> = Vec::new();
    for (w, wall) in doc.walls.iter().enumerate() {
        let mut sides = [FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n)];
        let mut clean = true;
        for (s, members) in [&wall.plus, &wall.minus].into_iter().enumerate() {
            if members.is_empty() {
                report.push(Some(w), ViolationKind::EmptySide, if s == 0 { "plus" } else { "minus" });
                clean = false;
            }
            for m in members {
                match index.get(m.as_str()) {
                    Some(&i) => sides[s].insert(i),
                    None => {
                        report.push(Some(w), ViolationKind::UnknownPoint, m.clone());
                        clean = false;
                    }
                }
            }
        }
        let overlap: Vec<usize> = sides[0].intersection(&sides[1]).collect();
        if !overlap.is_empty() {
            let names: Vec<&str> = overlap.iter().map(|&i| doc.ground[i].as_str()).collect();
            report.push(Some(w), ViolationKind::SidesOverlap, names.join(","));
            clean = false;
        }
        let covered = sides[0].union_count(&sides[1]);
        if covered < n {
            let mut all = sides[0].clone();
            all.union_with(&sides[1]);
            let missing: Vec<&str> =
                (0..n).filter(|&i| !all.contains(i)).map(|i| doc.ground[i].as_str()).collect();
            report.push(Some(w), ViolationKind::NotExhaustive, missing.join(","));
            clean = false;
        }
        if clean {
            let candidate = Wall::from_plus(sides[0].clone(), n);
            if let Some((first, _)) = seen.iter().find(|(_, other)| other.same_bipartition(&candidate)) {
                report.push(Some(w), ViolationKind::DuplicateWall, format!("same bipartition as wall {first}"));
            } else {
                seen.push((w, candidate));
            }
        }
    }
    report
}

/// A finite ground set with a family of distinct bipartitions.
///
/// Immutable after construction. The pairwise relation table is computed
/// on first use.
#[derive(Clone, Debug)]
pub struct WallSystem {
    ground: Vec<String>,
    index: HashMap<String, usize>,
    walls: Vec<Wall>,
    relations: OnceLock<Vec<Relation>>,
}

impl PartialEq for WallSystem {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.walls == other.walls
    }
}

impl WallSystem {
    pub fn from_doc(doc: &WallSystemDoc) -> Result<WallSystem> {
        let report = validate(doc);
        if !report.is_valid() {
            return Err(Error::InvalidWallSystem(report));
        }
        let n = doc.ground.len();
        let index: HashMap<String, usize> =
            doc.ground.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let walls = doc
            .walls
            .iter()
            .map(|w| {
                let mut plus = FixedBitSet::with_capacity(n);
                for p in &w.plus {
                    plus.insert(index[p]);
                }
                Wall::from_plus(plus, n)
            })
            .collect();
        Ok(WallSystem { ground: doc.ground.clone(), index, walls, relations: OnceLock::new() })
    }

    /// Builds a system from already-indexed walls, rejecting any invariant
    /// violation.
    pub fn new(ground: Vec<String>, walls: Vec<Wall>) -> Result<WallSystem> {
        let ws = WallSystem {
            index: ground.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect(),
            ground,
            walls,
            relations: OnceLock::new(),
        };
        let report = validate(&ws.to_doc());
        if !report.is_valid() {
            return Err(Error::InvalidWallSystem(report));
        }
        Ok(ws)
    }

    /// Canonical document: each side listed in ground order.
    pub fn to_doc(&self) -> WallSystemDoc {
        let names = |set: &FixedBitSet| set.ones().map(|i| self.ground[i].clone()).collect();
        WallSystemDoc {
            ground: self.ground.clone(),
            walls: self.walls.iter().map(|w| WallDoc { plus: names(&w.plus), minus: names(&w.minus) }).collect(),
        }
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn wall(&self, i: usize) -> &Wall {
        &self.walls[i]
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    fn check_wall(&self, w: usize) -> Result<()> {
        if w < self.walls.len() {
            Ok(())
        } else {
            Err(Error::UnknownWall(w))
        }
    }

    /// Whether wall `w` puts the named points on opposite sides.
    pub fn separates(&self, w: usize, x: &str, y: &str) -> Result<bool> {
        self.check_wall(w)?;
        Ok(self.walls[w].separates(self.point_index(x)?, self.point_index(y)?))
    }

    pub fn separating_walls(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.walls.len()).filter(|&w| self.walls[w].separates(x, y)).collect()
    }

    fn relations(&self) -> &[Relation] {
        self.relations.get_or_init(|| {
            let h = self.walls.len();
            let mut table = vec![Relation::Identical; h * h];
            for i in 0..h {
                for j in i + 1..h {
                    let rel = quarter_relation(&self.walls[i], &self.walls[j]);
                    table[i * h + j] = rel;
                    table[j * h + i] = match rel {
                        Relation::Nested(a, b) => Relation::Nested(b, a),
                        other => other,
                    };
                }
            }
            table
        })
    }

    pub fn relation(&self, h: usize, k: usize) -> Relation {
        self.relations()[h * self.walls.len() + k]
    }

    /// True iff all four quarters are nonempty.
    pub fn crosses(&self, h: usize, k: usize) -> bool {
        self.relation(h, k) == Relation::Crossing
    }

    /// Whether the half space `(h, s)` is strictly contained in `(k, t)`.
    pub fn half_nested(&self, h: usize, s: Side, k: usize, t: Side) -> bool {
        h != k && self.relation(h, k) == Relation::Nested(s, t.flip())
    }

    /// The side of `k` that contains one whole half space of `h`, for
    /// disjoint walls.
    fn side_containing(&self, h: usize, k: usize) -> Option<Side> {
        match self.relation(h, k) {
            Relation::Nested(_, b) => Some(b.flip()),
            _ => None,
        }
    }

    /// Checks the chain invariants: pairwise disjoint walls, each interior
    /// wall separating its two neighbours.
    pub fn is_chain(&self, chain: &Chain) -> bool {
        let w = chain.walls();
        if w.iter().any(|&i| i >= self.walls.len()) {
            return false;
        }
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if !matches!(self.relation(w[i], w[j]), Relation::Nested(..)) {
                    return false;
                }
            }
        }
        w.windows(3).all(|t| {
            match (self.side_containing(t[0], t[1]), self.side_containing(t[2], t[1])) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            }
        })
    }

    /// Longest chain among the walls separating `x` from `y`, ordered from
    /// the `x` end. Empty when no wall separates them.
    pub fn max_separating_chain(&self, x: &str, y: &str) -> Result<Chain> {
        let (x, y) = (self.point_index(x)?, self.point_index(y)?);
        Ok(self.max_separating_chain_idx(x, y))
    }

    pub fn max_separating_chain_idx(&self, x: usize, y: usize) -> Chain {
        let nodes: Vec<(usize, Side)> =
            self.separating_walls(x, y).into_iter().map(|w| (w, self.walls[w].side_of(x))).collect();
        self.longest_nested_path(&nodes, |_, _| true)
    }

    /// Longest chain among an arbitrary subset of walls, in either
    /// orientation.
    pub fn longest_chain(&self, subset: &[usize]) -> Chain {
        let nodes: Vec<(usize, Side)> =
            subset.iter().flat_map(|&w| [(w, Side::Plus), (w, Side::Minus)]).collect();
        self.longest_nested_path(&nodes, |_, _| true)
    }

    /// Longest strictly increasing sequence of oriented half spaces among
    /// `nodes`, where consecutive walls must also satisfy `allowed`.
    /// Ties go to the lexicographically smallest wall sequence.
    pub(crate) fn longest_nested_path<F>(&self, nodes: &[(usize, Side)], allowed: F) -> Chain
    where
        F: Fn(usize, usize) -> bool,
    {
        if nodes.is_empty() {
            return Chain::default();
        }
        // Strict inclusion strictly increases size, so size order is topological.
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        let size = |i: usize| self.walls[nodes[i].0].half(nodes[i].1).count_ones(..);
        order.sort_by_key(|&i| std::cmp::Reverse(size(i)));
        let mut best = vec![1usize; nodes.len()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (pos, &i) in order.iter().enumerate() {
            for &j in &order[..pos] {
                let ((h, s), (k, t)) = (nodes[i], nodes[j]);
                if self.half_nested(h, s, k, t) && allowed(h, k) {
                    succ[i].push(j);
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        let key = |i: usize| (nodes[i].0, nodes[i].1);
        let top = *best.iter().max().unwrap();
        let mut current = (0..nodes.len()).filter(|&i| best[i] == top).min_by_key(|&i| key(i)).unwrap();
        let mut walls = vec![nodes[current].0];
        while best[current] > 1 {
            let want = best[current] - 1;
            current = succ[current].iter().copied().filter(|&j| best[j] == want).min_by_key(|&j| key(j)).unwrap();
            walls.push(nodes[current].0);
        }
        Chain::new(walls)
    }
}

fn quarter_relation(h: &Wall, k: &Wall) -> Relation {
    let mut empty = None;
    let mut count = 0;
    for a in [Side::Plus, Side::Minus] {
        for b in [Side::Plus, Side::Minus] {
            if h.half(a).is_disjoint(k.half(b)) {
                empty = Some((a, b));
                count += 1;
            }
        }
    }
    match (count, empty) {
        (0, _) => Relation::Crossing,
        (1, Some((a, b))) => Relation::Nested(a, b),
        _ => Relation::Identical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(ground: &[&str], walls: &[(&[&str], &[&str])]) -> WallSystemDoc {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        WallSystemDoc {
            ground: s(ground),
            walls: walls.iter().map(|(p, m)| WallDoc { plus: s(p), minus: s(m) }).collect(),
        }
    }

    /// Path a-b-c-d with its three walls.
    fn p4() -> WallSystem {
        WallSystem::from_doc(&doc(
            &["a", "b", "c", "d"],
            &[(&["a"], &["b", "c", "d"]), (&["a", "b"], &["c", "d"]), (&["a", "b", "c"], &["d"])],
        ))
        .unwrap()
    }

    #[test]
    fn valid_system_has_empty_report() {
        assert!(validate(&doc(&["a", "b", "c"], &[(&["a"], &["b", "c"])])).is_valid());
    }

    #[test]
    fn overlapping_sides_reported() {
        let report = validate(&doc(&["a", "b"], &[(&["a"], &["a", "b"])]));
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::SidesOverlap);
        assert_eq!(report.violations[0].wall, Some(0));
        assert!(report.to_string().contains("sides overlap"));
    }

    #[test]
    fn duplicate_walls_reported_even_when_flipped() {
        let report = validate(&doc(
            &["a", "b", "c"],
            &[(&["a"], &["b", "c"]), (&["a"], &["b", "c"]), (&["b", "c"], &["a"])],
        ));
        let dups: Vec<_> = report.violations.iter().filter(|v| v.kind == ViolationKind::DuplicateWall).collect();
        assert_eq!(dups.len(), 2);
        assert_eq!(dups[0].wall, Some(1));
        assert!(report.to_string().contains("duplicate wall"));
    }

    #[test]
    fn other_violations_reported() {
        let report = validate(&doc(&["a", "b", "c", "a"], &[(&[], &["a"]), (&["z"], &["a", "b", "c"])]));
        let kinds: Vec<_> = report.violations.iter().map(|v| v.kind.clone()).collect();
        assert!(kinds.contains(&ViolationKind::DuplicatePoint));
        assert!(kinds.contains(&ViolationKind::EmptySide));
        assert!(kinds.contains(&ViolationKind::NotExhaustive));
        assert!(kinds.contains(&ViolationKind::UnknownPoint));
        assert!(WallSystem::from_doc(&doc(&["a", "b"], &[(&["a"], &["a", "b"])])).is_err());
    }

    #[test]
    fn separation() {
        let ws = WallSystem::from_doc(&doc(&["a", "b", "c"], &[(&["a"], &["b", "c"])])).unwrap();
        assert!(ws.separates(0, "a", "b").unwrap());
        assert!(!ws.separates(0, "b", "c").unwrap());
        assert_eq!(ws.separates(0, "a", "q"), Err(Error::UnknownPoint("q".into())));
        assert_eq!(ws.separates(3, "a", "b"), Err(Error::UnknownWall(3)));
    }

    #[test]
    fn crossing() {
        let square = WallSystem::from_doc(&doc(
            &["00", "10", "01", "11"],
            &[(&["00", "01"], &["10", "11"]), (&["00", "10"], &["01", "11"])],
        ))
        .unwrap();
        assert!(square.crosses(0, 1));
        assert!(square.crosses(1, 0));
        assert!(!square.crosses(0, 0));
        let path = p4();
        assert!(!path.crosses(0, 1));
        assert!(!path.crosses(1, 2));
    }

    #[test]
    fn chain_along_path() {
        let ws = p4();
        let chain = ws.max_separating_chain("a", "d").unwrap();
        assert_eq!(chain.walls(), &[0, 1, 2]);
        assert!(ws.is_chain(&chain));
        let back = ws.max_separating_chain("d", "a").unwrap();
        assert_eq!(back.walls(), &[2, 1, 0]);
        assert_eq!(ws.max_separating_chain("b", "c").unwrap().walls(), &[1]);
        assert!(ws.max_separating_chain("b", "b").unwrap().is_empty());
        assert!(!ws.is_chain(&Chain::new(vec![0, 2, 1])));
        assert!(ws.is_chain(&Chain::new(vec![0, 2])));
        assert_eq!(ws.longest_chain(&[0, 1, 2]).len(), 3);
    }

    #[test]
    fn roundtrip_document_is_canonical() {
        let d = doc(&["a", "b", "c"], &[(&["c", "a"], &["b"])]);
        let ws = WallSystem::from_doc(&d).unwrap();
        let canonical = ws.to_doc();
        assert_eq!(canonical.walls[0].plus, vec!["a".to_string(), "c".to_string()]);
        let again = WallSystem::from_doc(&canonical).unwrap().to_doc();
        assert_eq!(
            serde_json::to_string(&canonical).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }
}
