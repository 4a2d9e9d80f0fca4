//! Sageev duality: the cube complex of coherent orientations of a wall
//! system, the wall system of a cube complex, and certificates that the two
//! constructions invert each other.

use std::collections::{BTreeMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::complex::{CubeComplex, Orientation};
use crate::error::{Error, Result};
use crate::medianrec::hyperplane_classes;
use crate::wallsys::{Relation, Side, Wall, WallSystem};

/// Upward closure: no two chosen half spaces are disjoint. For finite
/// systems this is equivalent to `h^s ⊂ k^t ⇒ k^t chosen`.
pub fn is_coherent(ws: &WallSystem, orientation: &Orientation) -> bool {
    let h = ws.len();
    if orientation.len() != h {
        return false;
    }
    (0..h).all(|i| {
        (i + 1..h).all(|j| match ws.relation(i, j) {
            Relation::Nested(a, b) => !(orientation.side(i) == a && orientation.side(j) == b),
            _ => true,
        })
    })
}

/// The orientation picking, for every wall, the side containing `point`.
pub fn principal_orientation(ws: &WallSystem, point: usize) -> Orientation {
    let mut bits = FixedBitSet::with_capacity(ws.len());
    for (w, wall) in ws.walls().iter().enumerate() {
        bits.set(w, wall.plus().contains(point));
    }
    Orientation::new(bits)
}

/// All coherent orientations, by backtracking with forced-side propagation.
pub fn coherent_orientations(ws: &WallSystem) -> Vec<Orientation> {
    let h = ws.len();
    // Walls with the smallest half space first: they force the most.
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by_key(|&w| {
        let wall = ws.wall(w);
        (wall.plus().count_ones(..).min(wall.minus().count_ones(..)), w)
    });
    let mut out = Vec::new();
    let mut assignment: Vec<Option<Side>> = vec![None; h];
    backtrack(ws, &order, 0, &mut assignment, &mut out);
    out
}

fn conflicts(ws: &WallSystem, w: usize, s: Side, assignment: &[Option<Side>]) -> bool {
    assignment.iter().enumerate().any(|(k, chosen)| match (chosen, ws.relation(w, k)) {
        (Some(t), Relation::Nested(a, b)) => a == s && b == *t,
        _ => false,
    })
}

fn backtrack(ws: &WallSystem, order: &[usize], pos: usize, assignment: &mut Vec<Option<Side>>, out: &mut Vec<Orientation>) {
    let Some(&w) = order[pos..].iter().find(|&&w| assignment[w].is_none()) else {
        let sides: Vec<Side> = assignment.iter().map(|s| s.unwrap()).collect();
        out.push(Orientation::from_sides(&sides));
        return;
    };
    for side in [Side::Minus, Side::Plus] {
        if conflicts(ws, w, side, assignment) {
            continue;
        }
        let saved = assignment.clone();
        assignment[w] = Some(side);
        if propagate(ws, assignment) {
            backtrack(ws, order, pos + 1, assignment, out);
        }
        *assignment = saved;
    }
}

/// Forces every wall that has only one side compatible with the current
/// choices. Returns false on a dead end.
fn propagate(ws: &WallSystem, assignment: &mut [Option<Side>]) -> bool {
    loop {
        let mut changed = false;
        for k in 0..assignment.len() {
            if assignment[k].is_some() {
                continue;
            }
            let plus_ok = !conflicts(ws, k, Side::Plus, assignment);
            let minus_ok = !conflicts(ws, k, Side::Minus, assignment);
            match (plus_ok, minus_ok) {
                (false, false) => return false,
                (true, false) => assignment[k] = Some(Side::Plus),
                (false, true) => assignment[k] = Some(Side::Minus),
                (true, true) => continue,
            }
            changed = true;
        }
        if !changed {
            return true;
        }
    }
}

/// The dual cube complex: vertices are the coherent orientations reachable
/// by single flips from the principal orientations of ground points, labelled
/// by their bit strings; edges join orientations differing on one wall.
pub fn dual_complex(ws: &WallSystem) -> Result<CubeComplex> {
    if ws.ground().is_empty() {
        return Err(Error::Empty("wall system ground set"));
    }
    let all: HashSet<Orientation> = coherent_orientations(ws).into_iter().collect();
    if all.is_empty() {
        return Err(Error::Internal("wall system has no coherent orientation".into()));
    }
    let mut reached: HashSet<Orientation> = HashSet::new();
    let mut queue = VecDeque::new();
    for p in 0..ws.ground().len() {
        let o = principal_orientation(ws, p);
        if !all.contains(&o) {
            return Err(Error::Internal(format!("principal orientation of `{}` is incoherent", ws.ground()[p])));
        }
        if reached.insert(o.clone()) {
            queue.push_back(o);
        }
    }
    while let Some(o) = queue.pop_front() {
        for w in 0..ws.len() {
            let mut bits = o.bits().clone();
            bits.toggle(w);
            let next = Orientation::new(bits);
            if all.contains(&next) && reached.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut vertices: Vec<Orientation> = reached.into_iter().collect();
    vertices.sort_by_key(|o| o.label());
    let names: Vec<String> = vertices.iter().map(|o| o.label()).collect();
    let position: std::collections::HashMap<&Orientation, usize> =
        vertices.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let mut edges = Vec::new();
    for (v, o) in vertices.iter().enumerate() {
        for w in 0..ws.len() {
            let mut bits = o.bits().clone();
            bits.toggle(w);
            if let Some(&u) = position.get(&Orientation::new(bits)) {
                if v < u {
                    edges.push((v, u));
                }
            }
        }
    }
    let n = vertices.len();
    let walls: Vec<Wall> = (0..ws.len())
        .map(|w| {
            let mut plus = FixedBitSet::with_capacity(n);
            plus.extend((0..n).filter(|&v| vertices[v].side(w) == Side::Plus));
            Wall::from_plus(plus, n)
        })
        .collect();
    let vertex_walls = WallSystem::new(names.clone(), walls)?;
    CubeComplex::from_parts(names, edges, vertex_walls)
}

/// One wall per hyperplane class of the 1-skeleton, with sides given by the
/// median half spaces `{x : m(a, b, x) = a}`.
pub fn walls_of(x: &CubeComplex) -> Result<WallSystem> {
    let n = x.num_vertices();
    let dist: Vec<Vec<u32>> = (0..n)
        .map(|v| x.bfs(v).into_iter().map(|d| d.map_or(u32::MAX, |d| d as u32)).collect())
        .collect();
    let (walls, _) = hyperplane_classes(x.names(), x.edges(), &dist)?;
    WallSystem::new(x.names().to_vec(), walls)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallMatch {
    pub wall: usize,
    /// Whether plus corresponds to minus.
    pub flipped: bool,
}

/// Explicit bijections witnessing both directions of the round trip.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripCertificate {
    pub isomorphic: bool,
    /// Input wall index ↦ wall of `walls_of(dual_complex(ws))`.
    pub wall_bijection: BTreeMap<usize, WallMatch>,
    /// Ground point ↦ its principal vertex in the dual.
    pub point_map: BTreeMap<String, String>,
    /// Vertex of `X = dual_complex(ws)` ↦ vertex of `dual_complex(walls_of(X))`.
    pub vertex_bijection: BTreeMap<String, String>,
    pub failures: Vec<String>,
}

/// Matches the walls of `derived` (over the vertices of `x`) against the
/// walls of `ws` through the map `point_map` from ground points to vertices.
fn match_walls(ws: &WallSystem, derived: &WallSystem, point_map: &[usize]) -> (BTreeMap<usize, WallMatch>, Vec<String>) {
    let mut bijection = BTreeMap::new();
    let mut failures = Vec::new();
    let mut used = HashSet::new();
    for (i, wall) in ws.walls().iter().enumerate() {
        let found = (0..derived.len()).find_map(|j| {
            let other = derived.wall(j);
            let straight = (0..ws.ground().len()).all(|p| wall.side_of(p) == other.side_of(point_map[p]));
            let crossed = (0..ws.ground().len()).all(|p| wall.side_of(p) != other.side_of(point_map[p]));
            match (straight, crossed) {
                (true, _) => Some(WallMatch { wall: j, flipped: false }),
                (_, true) => Some(WallMatch { wall: j, flipped: true }),
                _ => None,
            }
        });
        match found {
            Some(m) if used.insert(m.wall) => {
                bijection.insert(i, m);
            }
            Some(m) => failures.push(format!("wall {i} matches already used wall {}", m.wall)),
            None => failures.push(format!("wall {i} has no counterpart")),
        }
    }
    if derived.len() != ws.len() {
        failures.push(format!("{} walls recovered from {} input walls", derived.len(), ws.len()));
    }
    (bijection, failures)
}

/// Checks `dual_complex(walls_of(x)) ≅ x`, returning the vertex bijection
/// (empty on failure) and any failures.
pub fn complex_roundtrip(x: &CubeComplex) -> Result<(BTreeMap<String, String>, Vec<String>)> {
    let ws = walls_of(x)?;
    let back = dual_complex(&ws)?;
    let mut failures = Vec::new();
    let mut map = vec![usize::MAX; x.num_vertices()];
    for (v, slot) in map.iter_mut().enumerate() {
        match back.vertex_of(&principal_orientation(&ws, v)) {
            Some(u) => *slot = u,
            None => failures.push(format!("vertex `{}` has no image", x.name(v))),
        }
    }
    if back.num_vertices() != x.num_vertices() {
        failures.push(format!("{} vertices become {}", x.num_vertices(), back.num_vertices()));
    }
    if failures.is_empty() {
        let image: HashSet<usize> = map.iter().copied().collect();
        if image.len() != map.len() {
            failures.push("vertex map is not injective".into());
        }
        let edges: HashSet<(usize, usize)> =
            back.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let mapped: HashSet<(usize, usize)> =
            x.edges().iter().map(|&(a, b)| (map[a].min(map[b]), map[a].max(map[b]))).collect();
        if edges != mapped {
            failures.push("edge sets differ under the vertex map".into());
        }
    }
    let bijection = if failures.is_empty() {
        (0..x.num_vertices()).map(|v| (x.name(v).to_string(), back.name(map[v]).to_string())).collect()
    } else {
        BTreeMap::new()
    };
    Ok((bijection, failures))
}

/// Runs both directions of the duality on `ws`.
pub fn roundtrip_check(ws: &WallSystem) -> Result<RoundtripCertificate> {
    let x = dual_complex(ws)?;
    let derived = walls_of(&x)?;
    let point_map: Vec<usize> = (0..ws.ground().len())
        .map(|p| x.vertex_of(&principal_orientation(ws, p)).expect("principal orientations are vertices"))
        .collect();
    let (wall_bijection, mut failures) = match_walls(ws, &derived, &point_map);
    let (vertex_bijection, more) = complex_roundtrip(&x)?;
    failures.extend(more);
    Ok(RoundtripCertificate {
        isomorphic: failures.is_empty(),
        wall_bijection,
        point_map: ws.ground().iter().zip(&point_map).map(|(p, &v)| (p.clone(), x.name(v).to_string())).collect(),
        vertex_bijection,
        failures,
    })
}
