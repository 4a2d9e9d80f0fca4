//! Median-graph recognition and the passage from a median graph to its cube
//! complex.

use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CubeComplex;
use crate::error::{Error, Result};
use crate::wallsys::{Wall, WallSystem};

/// JSON schema: `{"vertices": [...], "edges": [[u, v], ...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

/// Loopless graph without parallel edges.
#[derive(Clone, Debug)]
pub struct SimpleGraph {
    names: Vec<String>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<SimpleGraph> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut distinct = HashSet::new();
        for name in &names {
            if !distinct.insert(name.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
            }
        }
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at `{}`", names[a])));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("parallel edge `{}`-`{}`", names[a], names[b])));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        Ok(SimpleGraph { names, adjacency, edges })
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<SimpleGraph> {
        let index: HashMap<&str, usize> = doc.vertices.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |s: &String| index.get(s.as_str()).copied().ok_or_else(|| Error::UnknownVertex(s.clone()));
        let edges = doc.edges.iter().map(|[a, b]| Ok((lookup(a)?, lookup(b)?))).collect::<Result<Vec<_>>>()?;
        SimpleGraph::new(doc.vertices.clone(), edges)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.names.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// All-pairs graph distances; `Disconnected` if some pair is unreachable.
    pub fn distances(&self) -> Result<Vec<Vec<u32>>> {
        let table: Vec<Vec<u32>> = (0..self.names.len()).into_par_iter().map(|v| self.bfs(v)).collect();
        if table[0].contains(&u32::MAX) {
            return Err(Error::Disconnected);
        }
        Ok(table)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianCheck {
    pub is_median: bool,
    /// First triple (lexicographically) without exactly one median, with its
    /// median count.
    pub witness: Option<([usize; 3], usize)>,
}

fn intervals(dist: &[Vec<u32>]) -> Vec<Vec<FixedBitSet>> {
    let n = dist.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            (0..n)
                .map(|y| {
                    let mut set = FixedBitSet::with_capacity(n);
                    set.extend((0..n).filter(|&v| dist[x][v] + dist[v][y] == dist[x][y]));
                    set
                })
                .collect()
        })
        .collect()
}

/// Triple enumeration: every triple must have exactly one vertex lying on
/// geodesics between each pair.
pub fn is_median(g: &SimpleGraph) -> Result<MedianCheck> {
    let dist = g.distances()?;
    let n = g.len();
    let iv = intervals(&dist);
    let witness = (0..n).into_par_iter().find_map_first(|x| {
        for y in x + 1..n {
            for z in y + 1..n {
                let mut common = iv[x][y].clone();
                common.intersect_with(&iv[y][z]);
                common.intersect_with(&iv[x][z]);
                let count = common.count_ones(..);
                if count != 1 {
                    return Some(([x, y, z], count));
                }
            }
        }
        None
    });
    Ok(MedianCheck { is_median: witness.is_none(), witness })
}

/// Groups edges into hyperplane classes by the half spaces
/// `{x : m(a, b, x) = a}` of each edge `(a, b)`. Returns the walls (the first
/// vertex always on the minus side) and the wall index of each edge.
pub(crate) fn hyperplane_classes(
    names: &[String],
    edges: &[(usize, usize)],
    dist: &[Vec<u32>],
) -> Result<(Vec<Wall>, Vec<usize>)> {
    let n = names.len();
    let mut walls: Vec<Wall> = Vec::new();
    let mut lookup: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut edge_wall = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        // For adjacent a, b the median m(a, b, x) is a exactly when a lies on
        // a geodesic from b to x.
        let mut near_b = FixedBitSet::with_capacity(n);
        for x in 0..n {
            let (da, db) = (dist[a][x], dist[b][x]);
            if db + 1 == da {
                near_b.insert(x);
            } else if da + 1 != db {
                return Err(Error::Internal(format!(
                    "`{}` is equidistant from the ends of edge `{}`-`{}`",
                    names[x], names[a], names[b]
                )));
            }
        }
        let plus = if near_b.contains(0) {
            let mut other = near_b.clone();
            other.toggle_range(..);
            other
        } else {
            near_b
        };
        let id = *lookup.entry(plus.clone()).or_insert_with(|| {
            walls.push(Wall::from_plus(plus, n));
            walls.len() - 1
        });
        edge_wall.push(id);
    }
    Ok((walls, edge_wall))
}

/// The cube complex whose 1-skeleton is the median graph `g`.
pub fn cubify(g: &SimpleGraph) -> Result<CubeComplex> {
    let check = is_median(g)?;
    if let Some((t, medians)) = check.witness {
        return Err(Error::NotMedian {
            witness: [g.names[t[0]].clone(), g.names[t[1]].clone(), g.names[t[2]].clone()],
            medians,
        });
    }
    let dist = g.distances()?;
    let (walls, _) = hyperplane_classes(&g.names, &g.edges, &dist)?;
    let ws = WallSystem::new(g.names.clone(), walls)?;
    CubeComplex::from_parts(g.names.clone(), g.edges.clone(), ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        SimpleGraph::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec()).unwrap()
    }

    fn cycle(n: usize) -> SimpleGraph {
        graph(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    /// Independent check: count medians by distance sums directly.
    fn brute_force_median(g: &SimpleGraph) -> bool {
        let d = g.distances().unwrap();
        let n = g.len();
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    let count = (0..n)
                        .filter(|&m| {
                            d[x][m] + d[m][y] == d[x][y] && d[y][m] + d[m][z] == d[y][z] && d[x][m] + d[m][z] == d[x][z]
                        })
                        .count();
                    if count != 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn trees_are_median() {
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(is_median(&star).unwrap().is_median);
        let x = cubify(&star).unwrap();
        assert_eq!(x.num_walls(), 3);
        assert_eq!(x.dimension(), 1);
    }

    #[test]
    fn k23_rejected_with_witness_on_three_side() {
        let names = ["a", "b", "1", "2", "3"].iter().map(|s| s.to_string()).collect();
        let g = SimpleGraph::new(names, vec![(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        let check = is_median(&g).unwrap();
        assert!(!check.is_median);
        assert_eq!(check.witness, Some(([2, 3, 4], 2)));
        assert!(!brute_force_median(&g));
        match cubify(&g) {
            Err(Error::NotMedian { witness, medians }) => {
                assert_eq!(witness, ["1".to_string(), "2".to_string(), "3".to_string()]);
                assert_eq!(medians, 2);
            }
            other => panic!("expected NotMedian, got {other:?}"),
        }
    }

    #[test]
    fn hexagon_rejected() {
        let check = is_median(&cycle(6)).unwrap();
        assert!(!check.is_median);
        let ([x, y, z], count) = check.witness.unwrap();
        assert_eq!(count, 0);
        assert_eq!([x, y, z], [0, 2, 4]);
    }

    #[test]
    fn square_and_cube() {
        let square = cubify(&cycle(4)).unwrap();
        assert_eq!(square.num_walls(), 2);
        assert!(square.walls().crosses(0, 1));
        let edges: Vec<(usize, usize)> =
            (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|(a, b)| a < b).collect();
        let cube = cubify(&graph(8, &edges)).unwrap();
        assert_eq!(cube.num_walls(), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(cube.walls().crosses(i, j), i != j);
            }
        }
    }

    #[test]
    fn disconnected_and_malformed_inputs() {
        assert_eq!(is_median(&graph(3, &[(0, 1)])), Err(Error::Disconnected));
        assert!(SimpleGraph::new(vec!["a".into()], vec![(0, 0)]).is_err());
        assert!(SimpleGraph::new(vec!["a".into(), "b".into()], vec![(0, 1), (1, 0)]).is_err());
        let doc = GraphDoc { vertices: vec!["a".into()], edges: vec![["a".into(), "z".into()]] };
        assert_eq!(SimpleGraph::from_doc(&doc).err(), Some(Error::UnknownVertex("z".into())));
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        // All graphs on 5 labelled vertices that are connected.
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let mut checked = 0;
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = graph(5, &edges);
            if g.distances().is_err() {
                continue;
            }
            assert_eq!(is_median(&g).unwrap().is_median, brute_force_median(&g), "edges {edges:?}");
            checked += 1;
        }
        assert_eq!(checked, 728);
    }
}
