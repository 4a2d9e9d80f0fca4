use cubetight::families::{product_of_paths, random_tree, random_wall_system};
use cubetight::hypdiag::{dist_colored, grid_thinness};
use cubetight::medianrec::{cubify, is_median};
use cubetight::numeric::{int, ratio};
use cubetight::sageev::{dual_complex, roundtrip_check};
use cubetight::tightspan::{comb, d_inf, in_delta, is_extremal, kuratowski, retract};
use cubetight::{CubeComplex, FiniteMetric, MetricForm, Rational, SeparationProfile, SimpleGraph, WallSystem};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wall_system(seed: u64) -> WallSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = rng.gen_range(2..=6);
    let walls = rng.gen_range(1..=10);
    random_wall_system(points, walls, &mut rng)
}

fn complex(seed: u64) -> CubeComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match seed % 3 {
        0 => random_tree(rng.gen_range(2..=12), &mut rng),
        1 => product_of_paths(&[rng.gen_range(1..=4), rng.gen_range(1..=4)]),
        _ => dual_complex(&wall_system(seed)).unwrap(),
    }
}

fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetric {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = ratio(rng.gen_range(1..=20), rng.gen_range(1..=3));
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = &d[i][k] + &d[k][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    FiniteMetric::new((0..n).map(|i| format!("p{i}")).collect(), d).unwrap()
}

/// Every value at least half the diameter puts a form in Δ.
fn delta_form(m: &FiniteMetric, rng: &mut ChaCha8Rng) -> MetricForm {
    let diam = (0..m.len()).flat_map(|i| (0..m.len()).map(move |j| (i, j))).map(|(i, j)| m.d(i, j).clone()).max().unwrap();
    MetricForm::new((0..m.len()).map(|_| &diam / int(2) + &diam * ratio(rng.gen_range(0..=16), 8)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossing_is_symmetric_and_irreflexive(seed in any::<u64>()) {
        let ws = wall_system(seed);
        for h in 0..ws.len() {
            prop_assert!(!ws.crosses(h, h));
            for k in 0..ws.len() {
                prop_assert_eq!(ws.crosses(h, k), ws.crosses(k, h));
            }
        }
    }

    #[test]
    fn wall_system_json_round_trip(seed in any::<u64>()) {
        let ws = wall_system(seed);
        let text = serde_json::to_string(&ws.to_doc()).unwrap();
        let back = WallSystem::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.to_doc(), ws.to_doc());
    }

    #[test]
    fn dual_complex_size(seed in any::<u64>()) {
        let ws = wall_system(seed);
        let x = dual_complex(&ws).unwrap();
        let n = ws.len();
        let all_cross = (0..n).all(|h| (0..n).all(|k| h == k || ws.crosses(h, k)));
        prop_assert!(x.num_vertices() <= 1 << n);
        prop_assert_eq!(x.num_vertices() == 1 << n, all_cross);
        prop_assert_eq!(x.num_walls(), n);
        let g = SimpleGraph::new(x.names().to_vec(), x.edges().to_vec()).unwrap();
        prop_assert!(is_median(&g).unwrap().is_median);
    }

    #[test]
    fn sageev_round_trip(seed in any::<u64>()) {
        let cert = roundtrip_check(&wall_system(seed)).unwrap();
        prop_assert!(cert.isomorphic, "{:?}", cert.failures);
    }

    #[test]
    fn cubify_preserves_the_skeleton(seed in any::<u64>()) {
        let x = complex(seed);
        let g = SimpleGraph::new(x.names().to_vec(), x.edges().to_vec()).unwrap();
        let y = cubify(&g).unwrap();
        prop_assert_eq!(y.names(), x.names());
        let mut a = x.edges().to_vec();
        let mut b = y.edges().to_vec();
        a.iter_mut().chain(b.iter_mut()).for_each(|e| if e.0 > e.1 { *e = (e.1, e.0) });
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        prop_assert_eq!(y.num_walls(), x.num_walls());
    }

    #[test]
    fn median_axioms(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let x = complex(seed);
        let n = x.num_vertices();
        let [a, b, c] = [picks[0].index(n), picks[1].index(n), picks[2].index(n)];
        let m = x.median(a, b, c).unwrap();
        prop_assert_eq!(x.median(a, a, c).unwrap(), a);
        prop_assert_eq!(x.median(b, c, a).unwrap(), m);
        prop_assert_eq!(x.median(c, b, a).unwrap(), m);
        for (p, q) in [(a, b), (b, c), (a, c)] {
            prop_assert_eq!(x.dist_l1(p, m) + x.dist_l1(m, q), x.dist_l1(p, q));
        }
    }

    #[test]
    fn linf_is_dominated_by_l1(seed in any::<u64>()) {
        let x = complex(seed);
        for a in 0..x.num_vertices() {
            for b in 0..x.num_vertices() {
                let (l1, linf) = (x.dist_l1(a, b), x.dist_linf(a, b));
                prop_assert!(linf <= l1);
                prop_assert_eq!(linf == 0, a == b);
            }
        }
    }

    #[test]
    fn product_of_paths_formulas(lengths in prop::collection::vec(1usize..4, 1..4)) {
        let x = product_of_paths(&lengths);
        let coords = |v: usize| -> Vec<i64> { x.name(v).split(',').map(|c| c.parse().unwrap()).collect() };
        for a in 0..x.num_vertices() {
            for b in 0..x.num_vertices() {
                let gaps: Vec<usize> = coords(a).iter().zip(coords(b)).map(|(p, q)| (p - q).unsigned_abs() as usize).collect();
                prop_assert_eq!(x.dist_l1(a, b), gaps.iter().sum::<usize>());
                prop_assert_eq!(x.dist_linf(a, b), *gaps.iter().max().unwrap());
            }
        }
        prop_assert_eq!(x.dimension(), lengths.len());
    }

    #[test]
    fn dist_l_is_monotone_and_bounded(seed in any::<u64>()) {
        let x = complex(seed);
        let profile = SeparationProfile::new(&x);
        for a in 0..x.num_vertices() {
            for b in a + 1..x.num_vertices() {
                let values: Vec<usize> = (0..=x.num_walls() + 1).map(|l| profile.dist_l(l, a, b)).collect();
                prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(*values.last().unwrap() <= 1 + x.dist_l1(a, b));
            }
        }
    }

    #[test]
    fn colored_distance_triangle(seed in any::<u64>(), mask in any::<u32>()) {
        let x = complex(seed);
        let colored: Vec<usize> = (0..x.num_walls()).filter(|w| mask >> (w % 32) & 1 == 1).collect();
        let n = x.num_vertices();
        let d = |a, b| if a == b { 0 } else { dist_colored(&x, &colored, a, b).unwrap() };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    prop_assert!(d(a, c) <= d(a, b) + d(b, c));
                }
            }
        }
    }

    #[test]
    fn thinness_vanishes_exactly_in_dimension_one(seed in any::<u64>()) {
        let x = complex(seed);
        prop_assert_eq!(grid_thinness(&x).thinness == 0, x.dimension() <= 1);
    }

    #[test]
    fn curtain_distance_is_a_metric(seed in 0u64..32) {
        let x = complex(seed);
        let profile = SeparationProfile::new(&x);
        let n = x.num_vertices().min(8);
        let d: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| profile.curtain_model_dist(a, b, 4).unwrap().to_f64()).collect()).collect();
        for a in 0..n {
            prop_assert_eq!(d[a][a], 0.0);
            for b in 0..n {
                prop_assert_eq!(d[a][b], d[b][a]);
                prop_assert!(a == b || d[a][b] > 0.0);
                for c in 0..n {
                    prop_assert!(d[a][c] <= d[a][b] + d[b][c] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn curtain_matches_truncated_sum(seed in 0u64..32) {
        let x = complex(seed);
        let profile = SeparationProfile::new(&x);
        let n = x.num_vertices();
        let (a, b) = (0, n - 1);
        let exact = profile.curtain_model_dist(a, b, 4).unwrap();
        // Partial sum up to the number of walls, then dist_L is constant.
        let h = x.num_walls().max(1);
        let head: Rational = (1..=h)
            .map(|l| Rational::from_integer(profile.dist_l(l, a, b).into()) / Rational::from_integer((l as u64).pow(4).into()))
            .sum();
        let stable = profile.dist_l(h, a, b) as f64;
        let tail = stable * (cubetight::zeta::zeta_f64(4) - cubetight::numeric::to_f64(&cubetight::zeta::partial_sum(4, h as u64)));
        prop_assert!((exact.to_f64() - cubetight::numeric::to_f64(&head) - tail).abs() < 1e-12);
    }

    #[test]
    fn retraction_lands_on_the_hull(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let m = random_metric(&mut rng, n);
        let f = delta_form(&m, &mut rng);
        prop_assert!(in_delta(&m, &f).unwrap());
        let r = retract(&m, &f, 1e-9).unwrap().form;
        prop_assert!(is_extremal(&m, &r).unwrap());
        prop_assert!(r.values().iter().zip(f.values()).all(|(a, b)| a <= b));
        let again = retract(&m, &r, 1e-9).unwrap();
        prop_assert_eq!(again.iterations, 0);
        prop_assert_eq!(again.form, r);
    }

    #[test]
    fn kuratowski_points_are_extremal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let m = random_metric(&mut rng, n);
        for x in 0..n {
            let e = kuratowski(&m, x);
            prop_assert!(is_extremal(&m, &e).unwrap());
            for y in 0..n {
                prop_assert_eq!(&d_inf(&e, &kuratowski(&m, y)), m.d(x, y));
            }
        }
    }

    #[test]
    fn combing_two_points_is_geodesic(d in 1i64..50, s in 0i64..=8, t in 0i64..=8) {
        let m = FiniteMetric::new(vec!["a".into(), "b".into()], vec![vec![int(0), int(d)], vec![int(d), int(0)]]).unwrap();
        let (f, g) = (kuratowski(&m, 0), kuratowski(&m, 1));
        let (s, t) = (ratio(s, 8), ratio(t, 8));
        let p = comb(&m, &f, &g, &s, 1e-9).unwrap();
        let q = comb(&m, &f, &g, &t, 1e-9).unwrap();
        prop_assert!(is_extremal(&m, &p).unwrap());
        let gap = if s > t { &s - &t } else { &t - &s };
        prop_assert_eq!(d_inf(&p, &q), gap * d_inf(&f, &g));
    }
}
