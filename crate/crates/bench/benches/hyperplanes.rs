use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cubetight::families::{cube, grid, random_wall_system};
use cubetight::hypdiag::{grid_thinness, SeparationProfile};
use cubetight::medianrec::{cubify, is_median, SimpleGraph};
use cubetight::sageev::dual_complex;
use cubetight::tightspan::{tight_span_cells, FiniteMetric};
use cubetight::Metric;

fn distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("distances");
    for size in [4usize, 8, 12] {
        let x = grid(size, size);
        let far = x.num_vertices() - 1;
        group.bench_with_input(BenchmarkId::new("linf", size), &x, |b, x| {
            b.iter(|| x.dist(Metric::Linf, black_box(0), black_box(far)))
        });
        group.bench_with_input(BenchmarkId::new("median", size), &x, |b, x| {
            b.iter(|| x.median(black_box(0), black_box(far), black_box(size)))
        });
    }
    group.finish();
}

fn recognition(c: &mut Criterion) {
    let mut group = c.benchmark_group("recognition");
    for n in [3usize, 4, 5] {
        let x = cube(n);
        let g = SimpleGraph::new(x.names().to_vec(), x.edges().to_vec()).unwrap();
        group.bench_with_input(BenchmarkId::new("is_median", n), &g, |b, g| b.iter(|| is_median(g).unwrap()));
        group.bench_with_input(BenchmarkId::new("cubify", n), &g, |b, g| b.iter(|| cubify(g).unwrap()));
    }
    group.finish();
}

fn sageev(c: &mut Criterion) {
    let mut group = c.benchmark_group("sageev");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for walls in [4usize, 6, 8] {
        let ws = random_wall_system(6, walls, &mut rng);
        group.bench_with_input(BenchmarkId::new("dual_complex", walls), &ws, |b, ws| {
            b.iter(|| dual_complex(ws).unwrap())
        });
    }
    group.finish();
}

fn hyperbolicity(c: &mut Criterion) {
    let mut group = c.benchmark_group("hyperbolicity");
    for size in [3usize, 5] {
        let x = grid(size, size);
        group.bench_with_input(BenchmarkId::new("profile", size), &x, |b, x| b.iter(|| SeparationProfile::new(x)));
        group.bench_with_input(BenchmarkId::new("grid_thinness", size), &x, |b, x| b.iter(|| grid_thinness(x)));
    }
    group.finish();
}

fn tight_spans(c: &mut Criterion) {
    let mut group = c.benchmark_group("tight_span_cells");
    for n in [4usize, 5, 6] {
        let x = cube(3);
        let names: Vec<String> = x.names()[..n].to_vec();
        let d = (0..n)
            .map(|i| (0..n).map(|j| cubetight::numeric::int(x.dist_l1(i, j) as i64)).collect())
            .collect();
        let m = FiniteMetric::new(names, d).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| tight_span_cells(m).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, distances, recognition, sageev, hyperbolicity, tight_spans);
criterion_main!(benches);
