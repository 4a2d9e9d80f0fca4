//! Standard complexes and random wall systems used by tests, benchmarks and
//! the CLI.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::CubeComplex;
use crate::error::Result;
use crate::medianrec::{cubify, SimpleGraph};
use crate::sageev::dual_complex;
use crate::wallsys::{Wall, WallSystem};

fn assemble(names: Vec<String>, edges: Vec<(usize, usize)>, walls: Vec<Wall>) -> CubeComplex {
    let ws = WallSystem::new(names.clone(), walls).expect("family walls are valid");
    CubeComplex::from_parts(names, edges, ws).expect("family complexes are valid")
}

/// Product of paths with the given numbers of edges. `grid(a, b)` is the
/// `a × b` square grid with `(a+1)(b+1)` vertices named `"i,j"`.
pub fn product_of_paths(lengths: &[usize]) -> CubeComplex {
    product_named(lengths, |coords| coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
}

fn product_named(lengths: &[usize], name: impl Fn(&[usize]) -> String) -> CubeComplex {
    let dims: Vec<usize> = lengths.iter().map(|l| l + 1).collect();
    let n: usize = dims.iter().product();
    let coords = |mut v: usize| {
        let mut c = vec![0; dims.len()];
        for i in (0..dims.len()).rev() {
            c[i] = v % dims[i];
            v /= dims[i];
        }
        c
    };
    let stride: Vec<usize> = (0..dims.len()).map(|i| dims[i + 1..].iter().product()).collect();
    let all: Vec<Vec<usize>> = (0..n).map(coords).collect();
    let names = all.iter().map(|c| name(c)).collect();
    let mut edges = Vec::new();
    for (v, c) in all.iter().enumerate() {
        for i in 0..dims.len() {
            if c[i] + 1 < dims[i] {
                edges.push((v, v + stride[i]));
            }
        }
    }
    let mut walls = Vec::new();
    for (i, &len) in lengths.iter().enumerate() {
        for t in 0..len {
            let mut plus = FixedBitSet::with_capacity(n);
            plus.extend((0..n).filter(|&v| all[v][i] > t));
            walls.push(Wall::from_plus(plus, n));
        }
    }
    assemble(names, edges, walls)
}

pub fn grid(a: usize, b: usize) -> CubeComplex {
    product_of_paths(&[a, b])
}

/// The `n`-cube, vertices named by their bit strings.
pub fn cube(n: usize) -> CubeComplex {
    product_named(&vec![1; n], |coords| coords.iter().map(|c| c.to_string()).collect())
}

/// Path with `n` vertices `0..n`.
pub fn path(n: usize) -> CubeComplex {
    tree(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>())
}

pub fn star(leaves: usize) -> CubeComplex {
    tree(leaves + 1, &(1..=leaves).map(|v| (0, v)).collect::<Vec<_>>())
}

/// Tree on vertices `0..n` from its edge list; one wall per edge.
pub fn tree(n: usize, edges: &[(usize, usize)]) -> CubeComplex {
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let walls = edges
        .iter()
        .map(|&(a, b)| {
            // Side of b after cutting the edge.
            let mut plus = FixedBitSet::with_capacity(n);
            let mut stack = vec![b];
            plus.insert(b);
            while let Some(v) = stack.pop() {
                for &u in &adjacency[v] {
                    if (v, u) != (b, a) && !plus.put(u) {
                        stack.push(u);
                    }
                }
            }
            Wall::from_plus(plus, n)
        })
        .collect();
    assemble((0..n).map(|v| v.to_string()).collect(), edges.to_vec(), walls)
}

pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> CubeComplex {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    tree(n, &edges)
}

/// Width-`w` staircase: lattice points `(i, j)` with `0 ≤ j ≤ steps` and
/// `j ≤ i ≤ j + w`, with unit grid edges.
pub fn staircase(steps: usize, width: usize) -> Result<CubeComplex> {
    let points: Vec<(usize, usize)> =
        (0..=steps).flat_map(|j| (j..=j + width).map(move |i| (i, j))).collect();
    let index = |p: (usize, usize)| points.iter().position(|&q| q == p);
    let mut edges = Vec::new();
    for (v, &(i, j)) in points.iter().enumerate() {
        for next in [(i + 1, j), (i, j + 1)] {
            if let Some(u) = index(next) {
                edges.push((v, u));
            }
        }
    }
    let names = points.iter().map(|(i, j)| format!("{i},{j}")).collect();
    cubify(&SimpleGraph::new(names, edges)?)
}

/// Random wall system on `points` ground points with at most `walls`
/// distinct nontrivial bipartitions.
pub fn random_wall_system<R: Rng>(points: usize, walls: usize, rng: &mut R) -> WallSystem {
    assert!(points >= 2, "need two points for a nontrivial wall");
    let ground: Vec<String> = (0..points).map(|i| format!("p{i}")).collect();
    let mut chosen: Vec<Wall> = Vec::new();
    let mut attempts = 0;
    while chosen.len() < walls && attempts < 50 * walls {
        attempts += 1;
        let mut order: Vec<usize> = (0..points).collect();
        order.shuffle(rng);
        let cut = rng.gen_range(1..points);
        let mut plus = FixedBitSet::with_capacity(points);
        plus.extend(order[..cut].iter().copied());
        let wall = Wall::from_plus(plus, points);
        if !chosen.iter().any(|w| w.same_bipartition(&wall)) {
            chosen.push(wall);
        }
    }
    WallSystem::new(ground, chosen).expect("distinct nontrivial bipartitions")
}

/// Thirty named complexes: a path, a star, a random tree, three grids, two
/// cubes, two staircases and twenty duals of random wall systems with at
/// most ten walls. Deterministic in `seed`.
pub fn standard_corpus(seed: u64) -> Vec<(String, CubeComplex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = vec![
        ("path7".to_string(), path(7)),
        ("star5".to_string(), star(5)),
        ("tree10".to_string(), random_tree(10, &mut rng)),
        ("grid2x2".to_string(), grid(2, 2)),
        ("grid3x4".to_string(), grid(3, 4)),
        ("grid6x6".to_string(), grid(6, 6)),
        ("cube3".to_string(), cube(3)),
        ("cube5".to_string(), cube(5)),
        ("staircase4x2".to_string(), staircase(4, 2).expect("staircases are median")),
        ("staircase6x1".to_string(), staircase(6, 1).expect("staircases are median")),
    ];
    for i in 0..20 {
        let points = rng.gen_range(3..=6);
        let walls = rng.gen_range(2..=10);
        let ws = random_wall_system(points, walls, &mut rng);
        corpus.push((format!("dual{i}"), dual_complex(&ws).expect("random wall systems are valid")));
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let g = grid(3, 2);
        assert_eq!(g.num_vertices(), 12);
        assert_eq!(g.num_walls(), 5);
        assert_eq!(g.dimension(), 2);
        let c = cube(3);
        assert_eq!(c.names()[5], "101");
        assert_eq!(c.dimension(), 3);
        assert_eq!(path(4).num_walls(), 3);
        assert_eq!(star(3).dimension(), 1);
    }

    #[test]
    fn staircase_is_a_thin_median_complex() {
        let s = staircase(4, 2).unwrap();
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.num_vertices(), 15);
    }

    #[test]
    fn corpus_shape() {
        let corpus = standard_corpus(1);
        assert_eq!(corpus.len(), 30);
        assert!(corpus.iter().all(|(_, x)| x.num_vertices() <= 49));
        assert!(corpus.iter().filter(|(name, _)| name.starts_with("dual")).all(|(_, x)| x.num_walls() <= 10));
        assert_eq!(corpus.iter().filter(|(name, _)| name.starts_with("dual")).count(), 20);
    }
}
