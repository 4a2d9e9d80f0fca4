//! Finite CAT(0) cube complexes, represented by their 1-skeleton together
//! with the hyperplane wall system. Every metric notion here is read off the
//! walls: distances count separating walls, medians take majority sides,
//! hulls intersect half spaces, gates keep the walls that separate a point
//! from a convex set.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medianrec::GraphDoc;
use crate::wallsys::{Chain, Side, WallSystem, WallSystemDoc};

/// A vertex as a choice of side for every wall; bit `w` set means the plus
/// side of wall `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation(FixedBitSet);

impl Orientation {
    pub fn new(bits: FixedBitSet) -> Orientation {
        Orientation(bits)
    }

    pub fn from_sides(sides: &[Side]) -> Orientation {
        let mut bits = FixedBitSet::with_capacity(sides.len());
        for (w, s) in sides.iter().enumerate() {
            bits.set(w, *s == Side::Plus);
        }
        Orientation(bits)
    }

    pub fn side(&self, wall: usize) -> Side {
        Side::from_bit(self.0.contains(wall))
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of walls on which two orientations disagree.
    pub fn distance(&self, other: &Orientation) -> usize {
        self.0.symmetric_difference_count(&other.0)
    }

    /// `"0110…"` with `1` for plus, indexed by wall.
    pub fn label(&self) -> String {
        (0..self.0.len()).map(|w| if self.0.contains(w) { '1' } else { '0' }).collect()
    }
}

/// A walk in the 1-skeleton, given by vertex indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPath {
    pub vertices: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L1,
    Linf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hull {
    pub vertices: Vec<usize>,
    /// Rounds of the interval operator before the set stopped growing.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HellyOutcome {
    /// A vertex lying in every ball.
    Common(usize),
    /// Two balls that do not meet.
    NotPairwise(usize, usize),
    /// Pairwise intersecting, but this subfamily (a triple when one exists)
    /// has empty intersection.
    EmptyIntersection(Vec<usize>),
}

/// JSON schema: either `{"walls": <wall system>}` or
/// `{"graph": {"vertices": [...], "edges": [[u, v], ...]}}`. When both are
/// present the graph wins and `walls` is informational.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walls: Option<WallSystemDoc>,
}

impl ComplexDoc {
    pub fn load(&self) -> Result<CubeComplex> {
        if let Some(graph) = &self.graph {
            let g = crate::medianrec::SimpleGraph::from_doc(graph)?;
            return crate::medianrec::cubify(&g);
        }
        if let Some(walls) = &self.walls {
            let ws = WallSystem::from_doc(walls)?;
            return crate::sageev::dual_complex(&ws);
        }
        Err(Error::Parse("complex document needs a `graph` or `walls` entry".into()))
    }
}

#[derive(Clone, Debug)]
pub struct CubeComplex {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    edge_wall: Vec<usize>,
    walls: WallSystem,
    orientations: Vec<Orientation>,
    by_orientation: HashMap<Orientation, usize>,
}

impl CubeComplex {
    /// Assembles a complex from its 1-skeleton and hyperplane walls (whose
    /// ground set must be the vertex names, in order) and checks the
    /// structural invariants: connected, distinct orientations, adjacency
    /// exactly when orientations differ on one wall.
    pub fn from_parts(names: Vec<String>, edges: Vec<(usize, usize)>, walls: WallSystem) -> Result<CubeComplex> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Empty("cube complex needs a vertex"));
        }
        if walls.ground() != names.as_slice() {
            return Err(Error::Internal("wall ground set differs from vertex list".into()));
        }
        let h = walls.len();
        let orientations: Vec<Orientation> = (0..n)
            .map(|v| {
                let mut bits = FixedBitSet::with_capacity(h);
                for (w, wall) in walls.walls().iter().enumerate() {
                    bits.set(w, wall.plus().contains(v));
                }
                Orientation(bits)
            })
            .collect();
        let mut by_orientation = HashMap::with_capacity(n);
        for (v, o) in orientations.iter().enumerate() {
            if let Some(u) = by_orientation.insert(o.clone(), v) {
                return Err(Error::Internal(format!(
                    "vertices `{}` and `{}` have the same orientation",
                    names[u], names[v]
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_wall = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            let diff: Vec<usize> = orientations[a].0.symmetric_difference(&orientations[b].0).collect();
            if diff.len() != 1 {
                return Err(Error::Internal(format!(
                    "edge `{}`-`{}` is crossed by {} walls",
                    names[a],
                    names[b],
                    diff.len()
                )));
            }
            edge_wall.push(diff[0]);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        // Every single flip that lands on a vertex must be an edge.
        for v in 0..n {
            for w in 0..h {
                let mut flipped = orientations[v].0.clone();
                flipped.toggle(w);
                if let Some(&u) = by_orientation.get(&Orientation(flipped)) {
                    if adjacency[v].binary_search(&u).is_err() {
                        return Err(Error::Internal(format!(
                            "`{}` and `{}` differ on one wall but are not adjacent",
                            names[v], names[u]
                        )));
                    }
                }
            }
        }
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let complex =
            CubeComplex { names, index, adjacency, edges, edge_wall, walls, orientations, by_orientation };
        if complex.bfs(0).iter().any(|d| d.is_none()) {
            return Err(Error::Disconnected);
        }
        Ok(complex)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// The wall dual to edge `e`.
    pub fn edge_wall(&self, e: usize) -> usize {
        self.edge_wall[e]
    }

    pub fn walls(&self) -> &WallSystem {
        &self.walls
    }

    pub fn num_walls(&self) -> usize {
        self.walls.len()
    }

    pub fn orientation(&self, v: usize) -> &Orientation {
        &self.orientations[v]
    }

    pub fn vertex_of(&self, o: &Orientation) -> Option<usize> {
        self.by_orientation.get(o).copied()
    }

    fn check(&self, v: usize) -> Result<usize> {
        if v < self.names.len() {
            Ok(v)
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    /// Graph distances from `src` (breadth-first search on the 1-skeleton).
    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.names.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &u in &self.adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Combinatorial distance: the number of separating walls.
    pub fn dist_l1(&self, x: usize, y: usize) -> usize {
        self.orientations[x].distance(&self.orientations[y])
    }

    /// ℓ∞ distance: the length of a longest chain of separating walls.
    pub fn dist_linf(&self, x: usize, y: usize) -> usize {
        self.walls.max_separating_chain_idx(x, y).len()
    }

    pub fn dist(&self, metric: Metric, x: usize, y: usize) -> usize {
        match metric {
            Metric::L1 => self.dist_l1(x, y),
            Metric::Linf => self.dist_linf(x, y),
        }
    }

    pub fn max_separating_chain(&self, x: usize, y: usize) -> Chain {
        self.walls.max_separating_chain_idx(x, y)
    }

    /// The vertex choosing, on every wall, the side holding at least two of
    /// the three inputs.
    pub fn median(&self, x: usize, y: usize, z: usize) -> Result<usize> {
        for v in [x, y, z] {
            self.check(v)?;
        }
        let (a, b, c) = (&self.orientations[x].0, &self.orientations[y].0, &self.orientations[z].0);
        let mut ab = a.clone();
        ab.intersect_with(b);
        let mut bc = b.clone();
        bc.intersect_with(c);
        let mut ca = c.clone();
        ca.intersect_with(a);
        ab.union_with(&bc);
        ab.union_with(&ca);
        self.by_orientation.get(&Orientation(ab)).copied().ok_or_else(|| {
            Error::Internal(format!(
                "majority orientation of ({}, {}, {}) is not a vertex",
                self.names[x], self.names[y], self.names[z]
            ))
        })
    }

    /// Vertices on some geodesic from `x` to `y`, as a bitset: those agreeing
    /// with `x` and `y` on every wall where the two agree.
    fn interval_bits(&self, x: usize, y: usize) -> FixedBitSet {
        let (ox, oy) = (&self.orientations[x].0, &self.orientations[y].0);
        let mut agree = ox.clone();
        agree.symmetric_difference_with(oy);
        agree.toggle_range(..);
        let mut out = FixedBitSet::with_capacity(self.names.len());
        for (v, o) in self.orientations.iter().enumerate() {
            let mut diff = o.0.clone();
            diff.symmetric_difference_with(ox);
            if diff.is_disjoint(&agree) {
                out.insert(v);
            }
        }
        out
    }

    /// The metric interval `{v : d(x,v) + d(v,y) = d(x,y)}`.
    pub fn metric_interval(&self, x: usize, y: usize) -> Vec<usize> {
        let dxy = self.dist_l1(x, y);
        (0..self.names.len()).filter(|&v| self.dist_l1(x, v) + self.dist_l1(v, y) == dxy).collect()
    }

    /// `[x, y]` as the set of medians `m(x, y, z)`; checked against the
    /// metric characterization.
    pub fn interval(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check(x)?;
        self.check(y)?;
        let mut hit = FixedBitSet::with_capacity(self.names.len());
        for z in 0..self.names.len() {
            hit.insert(self.median(x, y, z)?);
        }
        let via_medians: Vec<usize> = hit.ones().collect();
        if via_medians != self.metric_interval(x, y) {
            return Err(Error::Internal(format!(
                "median interval differs from metric interval for ({}, {})",
                self.names[x], self.names[y]
            )));
        }
        Ok(via_medians)
    }

    /// Intersection of every half space containing `set`.
    pub fn halfspace_hull(&self, set: &[usize]) -> Vec<usize> {
        let mut hull = FixedBitSet::with_capacity(self.names.len());
        hull.insert_range(..);
        for wall in self.walls.walls() {
            for side in [Side::Plus, Side::Minus] {
                let half = wall.half(side);
                if set.iter().all(|&v| half.contains(v)) {
                    hull.intersect_with(half);
                }
            }
        }
        hull.ones().collect()
    }

    /// Convex hull as the fixed point of `A ↦ ⋃_{x,y ∈ A} [x, y]`, checked
    /// against the half-space intersection.
    pub fn hull(&self, set: &[usize]) -> Result<Hull> {
        if set.is_empty() {
            return Err(Error::Empty("hull of an empty set"));
        }
        for &v in set {
            self.check(v)?;
        }
        let mut current = FixedBitSet::with_capacity(self.names.len());
        current.extend(set.iter().copied());
        let mut iterations = 0;
        loop {
            let members: Vec<usize> = current.ones().collect();
            let mut next = current.clone();
            for (i, &x) in members.iter().enumerate() {
                for &y in &members[i + 1..] {
                    next.union_with(&self.interval_bits(x, y));
                }
            }
            if next == current {
                break;
            }
            current = next;
            iterations += 1;
        }
        let vertices: Vec<usize> = current.ones().collect();
        if vertices != self.halfspace_hull(set) {
            return Err(Error::Internal("interval hull differs from half-space hull".into()));
        }
        Ok(Hull { vertices, iterations })
    }

    pub fn is_convex(&self, set: &[usize]) -> bool {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        !sorted.is_empty() && self.halfspace_hull(&sorted) == sorted
    }

    /// Nearest vertex of the convex set `target` to `x`. Computed as the
    /// distance minimizer, as the vertex whose separating walls from `x` are
    /// exactly those separating `x` from the whole set, and as the member
    /// of the set lying in every interval `[x, y]`; all three must agree.
    pub fn gate(&self, x: usize, target: &[usize]) -> Result<usize> {
        self.check(x)?;
        if target.is_empty() {
            return Err(Error::Empty("gate onto an empty set"));
        }
        for &v in target {
            self.check(v)?;
        }
        if !self.is_convex(target) {
            return Err(Error::NotConvex);
        }
        let best = target.iter().map(|&y| self.dist_l1(x, y)).min().unwrap();
        let nearest: Vec<usize> = target.iter().copied().filter(|&y| self.dist_l1(x, y) == best).collect();
        if nearest.len() != 1 {
            return Err(Error::Internal(format!("{} nearest points in a convex set", nearest.len())));
        }
        let by_distance = nearest[0];

        let mut bits = self.orientations[x].0.clone();
        for (w, wall) in self.walls.walls().iter().enumerate() {
            for side in [Side::Plus, Side::Minus] {
                if target.iter().all(|&y| wall.half(side).contains(y)) {
                    bits.set(w, side == Side::Plus);
                }
            }
        }
        let by_walls = self
            .vertex_of(&Orientation(bits))
            .ok_or_else(|| Error::Internal("hyperplane gate orientation is not a vertex".into()))?;

        let mut common = FixedBitSet::with_capacity(self.names.len());
        common.extend(target.iter().copied());
        for &y in target {
            common.intersect_with(&self.interval_bits(x, y));
        }
        let by_intervals: Vec<usize> = common.ones().collect();

        if by_walls != by_distance || by_intervals != [by_distance] {
            return Err(Error::Internal(format!(
                "gate characterizations disagree for `{}`",
                self.names[x]
            )));
        }
        Ok(by_distance)
    }

    /// Whether the path crosses every wall at most once. Checked against
    /// `length = d(start, end)`.
    pub fn is_geodesic(&self, path: &VertexPath) -> Result<bool> {
        let vs = &path.vertices;
        if vs.is_empty() {
            return Err(Error::Empty("path"));
        }
        for &v in vs {
            self.check(v)?;
        }
        let mut crossed = FixedBitSet::with_capacity(self.walls.len());
        let mut repeated = false;
        for (step, pair) in vs.windows(2).enumerate() {
            if self.adjacency[pair[0]].binary_search(&pair[1]).is_err() {
                return Err(Error::InvalidPath(step));
            }
            let w = self.orientations[pair[0]].0.symmetric_difference(&self.orientations[pair[1]].0).next().unwrap();
            if crossed.put(w) {
                repeated = true;
            }
        }
        let geodesic = !repeated;
        let by_length = vs.len() - 1 == self.dist_l1(vs[0], vs[vs.len() - 1]);
        if geodesic != by_length {
            return Err(Error::Internal("wall-recrossing test disagrees with path length".into()));
        }
        Ok(geodesic)
    }

    /// Size of the largest family of pairwise crossing walls.
    pub fn dimension(&self) -> usize {
        let h = self.walls.len();
        let neighbors: Vec<FixedBitSet> = (0..h)
            .map(|i| {
                let mut set = FixedBitSet::with_capacity(h);
                for j in 0..h {
                    if i != j && self.walls.crosses(i, j) {
                        set.insert(j);
                    }
                }
                set
            })
            .collect();
        let mut all = FixedBitSet::with_capacity(h);
        all.insert_range(..);
        let mut best = 0;
        bron_kerbosch(&neighbors, 0, all, FixedBitSet::with_capacity(h), &mut best);
        best
    }

    /// Discrete Helly check for integer-radius balls around vertices.
    pub fn helly_discrete(&self, balls: &[(usize, usize)], metric: Metric) -> Result<HellyOutcome> {
        if balls.is_empty() {
            return Err(Error::Empty("ball family"));
        }
        for &(c, _) in balls {
            self.check(c)?;
        }
        let n = self.names.len();
        let members: Vec<FixedBitSet> = balls
            .iter()
            .map(|&(c, r)| {
                let mut set = FixedBitSet::with_capacity(n);
                set.extend((0..n).filter(|&v| self.dist(metric, c, v) <= r));
                set
            })
            .collect();
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                if members[i].is_disjoint(&members[j]) {
                    return Ok(HellyOutcome::NotPairwise(i, j));
                }
            }
        }
        let meet = |family: &[usize]| {
            let mut acc = members[family[0]].clone();
            for &i in &family[1..] {
                acc.intersect_with(&members[i]);
            }
            acc
        };
        let all: Vec<usize> = (0..balls.len()).collect();
        if let Some(v) = meet(&all).ones().next() {
            return Ok(HellyOutcome::Common(v));
        }
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                for k in j + 1..balls.len() {
                    if meet(&[i, j, k]).is_clear() {
                        return Ok(HellyOutcome::EmptyIntersection(vec![i, j, k]));
                    }
                }
            }
        }
        // No empty triple: shrink greedily to a minimal failing family.
        let mut family = all;
        let mut i = 0;
        while i < family.len() {
            let mut trial = family.clone();
            trial.remove(i);
            if meet(&trial).is_clear() {
                family = trial;
            } else {
                i += 1;
            }
        }
        Ok(HellyOutcome::EmptyIntersection(family))
    }

    /// Number of cubes of each dimension (index = dimension), found as
    /// vertex plus pairwise crossing set of incident walls whose flips all
    /// exist. Reporting only; no metric depends on it.
    pub fn cube_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = vec![0; self.dimension() + 1];
        for v in 0..self.names.len() {
            let incident: Vec<usize> = self.adjacency[v]
                .iter()
                .map(|&u| self.orientations[v].0.symmetric_difference(&self.orientations[u].0).next().unwrap())
                .collect();
            let mut chosen = Vec::new();
            self.count_cubes_at(v, &incident, 0, &mut chosen, &mut counts);
        }
        // Each k-cube was found once from each of its 2^k corners.
        counts.iter().enumerate().map(|(k, &c)| c >> k).collect()
    }

    fn count_cubes_at(&self, v: usize, incident: &[usize], from: usize, chosen: &mut Vec<usize>, counts: &mut [usize]) {
        let k = chosen.len();
        let corners_present = (0u64..(1 << k)).all(|mask| {
            let mut bits = self.orientations[v].0.clone();
            for (i, &w) in chosen.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    bits.toggle(w);
                }
            }
            self.by_orientation.contains_key(&Orientation(bits))
        });
        if !corners_present {
            return;
        }
        counts[k] += 1;
        for i in from..incident.len() {
            let w = incident[i];
            if chosen.iter().all(|&c| self.walls.crosses(c, w)) {
                chosen.push(w);
                self.count_cubes_at(v, incident, i + 1, chosen, counts);
                chosen.pop();
            }
        }
    }

    pub fn to_graph_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.names.clone(),
            edges: self.edges.iter().map(|&(a, b)| [self.names[a].clone(), self.names[b].clone()]).collect(),
        }
    }

    pub fn to_doc(&self) -> ComplexDoc {
        ComplexDoc { graph: Some(self.to_graph_doc()), walls: Some(self.walls.to_doc()) }
    }

    /// Graphviz rendering of the 1-skeleton, edges coloured by hyperplane.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 10] = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
            "#17becf",
        ];
        let mut out = String::from("graph cube_complex {\n");
        for name in &self.names {
            let _ = writeln!(out, "  \"{}\";", escape(name));
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let w = self.edge_wall[e];
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [color=\"{}\", label=\"h{}\"];",
                escape(&self.names[a]),
                escape(&self.names[b]),
                PALETTE[w % PALETTE.len()],
                w
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn bron_kerbosch(
    neighbors: &[FixedBitSet],
    size: usize,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    best: &mut usize,
) {
    if candidates.is_clear() {
        if excluded.is_clear() {
            *best = (*best).max(size);
        }
        return;
    }
    if size + candidates.count_ones(..) <= *best {
        return;
    }
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| neighbors[u].intersection(&candidates).count())
        .unwrap();
    let branch: Vec<usize> = candidates.difference(&neighbors[pivot]).collect();
    for v in branch {
        let mut next_candidates = candidates.clone();
        next_candidates.intersect_with(&neighbors[v]);
        let mut next_excluded = excluded.clone();
        next_excluded.intersect_with(&neighbors[v]);
        bron_kerbosch(neighbors, size + 1, next_candidates, next_excluded, best);
        candidates.set(v, false);
        excluded.insert(v);
    }
}
