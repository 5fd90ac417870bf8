mod common;

use common::*;
use gjk_accel::benchgen::sample_ellipsoid;
use gjk_accel::{
    solve, Algorithm, CollisionPair, ConvexShape, Cuboid, Mode, QueryResult, SolverConfig, Sphere, Status, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GJK_VARIANTS: [Algorithm; 2] = [Algorithm::Gjk, Algorithm::NesterovGjk];

fn random_shape(rng: &mut ChaCha8Rng) -> ConvexShape {
    match rng.random_range(0..4) {
        0 => sample_ellipsoid(rng).into(),
        1 => Cuboid::new(Vec3::from_fn(|_, _| rng.random_range(0.05..=0.8))).unwrap().into(),
        2 => Sphere::new(rng.random_range(0.05..=0.8)).unwrap().into(),
        _ => random_polytope(rng, 30).into(),
    }
}

fn random_pair(rng: &mut ChaCha8Rng) -> CollisionPair {
    let s1 = random_shape(rng);
    let s2 = random_shape(rng);
    let p1 = random_pose(rng, 0.0);
    let p2 = random_pose(rng, 1.2);
    CollisionPair::from_shapes(s1, p1, s2, p2)
}

fn check_witnesses(pair: &CollisionPair, r: &QueryResult) {
    assert!(pair.shape1.contains_posed(&pair.pose1, &r.witness1, 1e-7), "witness1 outside shape1");
    assert!(pair.shape2.contains_posed(&pair.pose2, &r.witness2, 1e-7), "witness2 outside shape2");
    assert_eq!(r.separation_vector, r.witness1 - r.witness2);
    if r.status == Status::Separated {
        assert!((r.separation_vector.norm() - r.distance).abs() <= 1e-12);
    }
}

#[test]
fn gjk_iterate_norm_never_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..500 {
        let pair = random_pair(&mut rng);
        let r = solve(&pair, &SolverConfig::default().with_trace(true), Algorithm::Gjk).unwrap();
        let trace = r.trace.unwrap();
        for w in trace.windows(2) {
            assert!(w[1].norm_x <= w[0].norm_x + 1e-12, "{} -> {}", w[0].norm_x, w[1].norm_x);
        }
    }
}

#[test]
fn boolean_and_distance_agree_on_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut intersecting = 0;
    for _ in 0..10_000 {
        let pair = random_pair(&mut rng);
        for algo in GJK_VARIANTS {
            let cfg = SolverConfig::for_algorithm(algo);
            let dist = solve(&pair, &cfg, algo).unwrap();
            let boolean = solve(&pair, &cfg.with_mode(Mode::Boolean), algo).unwrap();
            assert!(matches!(dist.status, Status::Separated | Status::Intersecting));
            assert_eq!(dist.is_intersecting(), boolean.is_intersecting(), "{algo}");
            assert!(boolean.iterations <= dist.iterations || boolean.is_intersecting());
            intersecting += usize::from(dist.is_intersecting());
        }
    }
    // Both outcomes are exercised.
    assert!(intersecting > 1000 && intersecting < 19_000, "{intersecting}");
}

#[test]
fn witnesses_lie_on_their_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let pair = random_pair(&mut rng);
        for algo in GJK_VARIANTS {
            let r = solve(&pair, &SolverConfig::default(), algo).unwrap();
            check_witnesses(&pair, &r);
        }
    }
}

/// With `<x, x - s> <= eps` at termination, `|x| - d* <= eps / |x|`.
#[test]
fn separated_distances_agree_within_the_gap_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let eps = SolverConfig::default().epsilon;
    for _ in 0..2000 {
        let pair = random_pair(&mut rng);
        let results: Vec<QueryResult> = [
            (Algorithm::Gjk, SolverConfig::default()),
            (Algorithm::NesterovGjk, SolverConfig::default()),
            (Algorithm::NesterovGjk, SolverConfig::default().with_normalization(false)),
        ]
        .into_iter()
        .map(|(a, c)| solve(&pair, &c, a).unwrap())
        .collect();
        for a in &results {
            for b in &results {
                if a.is_separated() && b.is_separated() {
                    let bound = eps / a.distance.min(b.distance) + 1e-12;
                    assert!((a.distance - b.distance).abs() <= bound, "{} vs {}", a.distance, b.distance);
                }
            }
        }
    }
}

#[test]
fn gjk_matches_polytope_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let m1 = random_polytope(&mut rng, 20);
        let m2 = random_polytope(&mut rng, 20);
        let p1 = random_pose(&mut rng, 0.0);
        let p2 = random_pose(&mut rng, 1.5);
        let oracle = polytope_distance(&m1, &p1, &m2, &p2);
        let pair = CollisionPair::from_shapes(m1.into(), p1, m2.into(), p2);
        for algo in GJK_VARIANTS {
            let r = solve(&pair, &SolverConfig::default(), algo).unwrap();
            assert!((r.distance - oracle).abs() <= 1e-6, "{algo}: {} vs {oracle}", r.distance);
        }
    }
}

#[test]
fn momentum_switches_off_at_most_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..2000 {
        let pair = random_pair(&mut rng);
        for normalize in [true, false] {
            let cfg = SolverConfig::default().with_trace(true).with_normalization(normalize);
            let trace = solve(&pair, &cfg, Algorithm::NesterovGjk).unwrap().trace.unwrap();
            assert!(trace[0].momentum_active);
            let switches = trace.windows(2).filter(|w| w[0].momentum_active != w[1].momentum_active).count();
            assert!(switches <= 1);
            assert!(trace.windows(2).all(|w| w[0].momentum_active || !w[1].momentum_active));
        }
    }
}

#[test]
fn frank_wolfe_agrees_on_strictly_convex_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let eps = SolverConfig::default().epsilon;
    for _ in 0..200 {
        let e1: ConvexShape = sample_ellipsoid(&mut rng).into();
        let e2: ConvexShape = sample_ellipsoid(&mut rng).into();
        let p2 = random_pose(&mut rng, 2.5);
        let pair = CollisionPair::from_shapes(e1, random_pose(&mut rng, 0.0), e2, p2);
        let gjk = solve(&pair, &SolverConfig::default(), Algorithm::Gjk).unwrap();
        let fw = solve(&pair, &SolverConfig::for_algorithm(Algorithm::FrankWolfe), Algorithm::FrankWolfe).unwrap();
        if gjk.is_separated() && gjk.distance > 1e-3 {
            assert_eq!(fw.status, Status::Separated);
            assert!((gjk.distance - fw.distance).abs() <= eps / gjk.distance.min(fw.distance) + 1e-12);
            check_witnesses(&pair, &fw);
        }
    }
}

#[test]
fn invalid_directions_and_configs_are_errors() {
    let pair = CollisionPair::from_shapes(
        Sphere::new(1.0).unwrap().into(),
        Default::default(),
        Sphere::new(1.0).unwrap().into(),
        Default::default(),
    );
    assert!(pair.support_difference(&Vec3::zeros()).is_err());
    let mut cfg = SolverConfig::default();
    cfg.epsilon = -1.0;
    for algo in Algorithm::ALL {
        assert!(solve(&pair, &cfg, algo).is_err());
    }
}
