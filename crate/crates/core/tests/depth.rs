use proptest::prelude::*;
use rand::Rng;

use depthgof::depth::{halfspace_depth_1d, halfspace_depth_2d_exact, halfspace_depth_approx, zonoid_depth};
use depthgof::distributions::{sample, DistributionSpec};
use depthgof::{depth_profile, gn_transform, DataMatrix, DepthKind, Seed};

fn matrix(points: &[[f64; 2]]) -> DataMatrix {
    DataMatrix::from_rows(points).unwrap()
}

fn int_points(max: i32, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<[f64; 2]>> {
    proptest::collection::vec((-max..=max, -max..=max).prop_map(|(a, b)| [a as f64, b as f64]), len)
}

fn gaussian_points(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<[f64; 2]>> {
    proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| [a, b]), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn halfspace_depth_is_affine_invariant(
        pts in int_points(20, 1..40),
        q in (-20i32..=20, -20i32..=20),
        a in (-3i32..=3, -3i32..=3, -3i32..=3, -3i32..=3),
        b in (-10i32..=10, -10i32..=10),
    ) {
        let (a11, a12, a21, a22) = (a.0 as f64, a.1 as f64, a.2 as f64, a.3 as f64);
        prop_assume!(a11 * a22 - a12 * a21 != 0.0);
        let map = |p: [f64; 2]| [a11 * p[0] + a12 * p[1] + b.0 as f64, a21 * p[0] + a22 * p[1] + b.1 as f64];
        let q = [q.0 as f64, q.1 as f64];
        let before = halfspace_depth_2d_exact(&q, &matrix(&pts)).unwrap();
        let moved: Vec<[f64; 2]> = pts.iter().map(|&p| map(p)).collect();
        let after = halfspace_depth_2d_exact(&map(q), &matrix(&moved)).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn approximate_depth_bounds_exact_depth(
        pts in gaussian_points(1..40),
        q in (-3.5f64..3.5, -3.5f64..3.5),
        m in 1usize..60,
        seed in any::<u64>(),
    ) {
        let w = matrix(&pts);
        let q = [q.0, q.1];
        let exact = halfspace_depth_2d_exact(&q, &w).unwrap();
        prop_assert!(halfspace_depth_approx(&q, &w, m, seed).unwrap() >= exact);
    }

    #[test]
    fn zonoid_depth_positive_exactly_inside_hull(
        pts in gaussian_points(3..25),
        q in (-3.5f64..3.5, -3.5f64..3.5),
    ) {
        let w = matrix(&pts);
        let q = [q.0, q.1];
        let inside = halfspace_depth_2d_exact(&q, &w).unwrap() > 0.0;
        let z = zonoid_depth(&q, &w).unwrap();
        prop_assert_eq!(z > 0.0, inside, "zonoid {} at {:?}", z, q);
    }

    #[test]
    fn zonoid_depth_decreases_along_rays(
        pts in gaussian_points(3..25),
        q in (-3.0f64..3.0, -3.0f64..3.0),
        s in 0.0f64..=1.0,
    ) {
        let w = matrix(&pts);
        let mean = w.column_mean();
        let y = [q.0, q.1];
        let between = [mean[0] + s * (y[0] - mean[0]), mean[1] + s * (y[1] - mean[1])];
        let outer = zonoid_depth(&y, &w).unwrap();
        let inner = zonoid_depth(&between, &w).unwrap();
        prop_assert!(inner >= outer - 1e-7, "inner {} < outer {}", inner, outer);
    }

    #[test]
    fn gn_values_are_multiples_of_one_over_n(
        w in gaussian_points(1..60),
        x in gaussian_points(1..20),
        zonoid in any::<bool>(),
    ) {
        let kind = if zonoid { DepthKind::ZONOID } else { DepthKind::HALFSPACE };
        let big_n = w.len() as f64;
        let g = gn_transform(&matrix(&x), &matrix(&w), kind).unwrap();
        for &v in g.values() {
            prop_assert!((0.0..=1.0).contains(&v));
            let k = v * big_n;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }
}

/// Vertices of the arrangement of lines through pairs of integer points, as
/// `(X, Y, D)` with the vertex at `(X / D, Y / D)`.
fn arrangement_vertices(pts: &[[i64; 2]]) -> Vec<[i64; 3]> {
    let mut lines = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] != pts[j] {
                lines.push((pts[i], pts[j]));
            }
        }
    }
    let mut out: Vec<[i64; 3]> = pts.iter().map(|p| [p[0], p[1], 1]).collect();
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            let ((p, q), (r, s)) = (lines[a], lines[b]);
            let d1 = [q[0] - p[0], q[1] - p[1]];
            let d2 = [s[0] - r[0], s[1] - r[1]];
            let den = d1[0] * d2[1] - d1[1] * d2[0];
            if den != 0 {
                let t = (r[0] - p[0]) * d2[1] - (r[1] - p[1]) * d2[0];
                out.push([p[0] * den + t * d1[0], p[1] * den + t * d1[1], den]);
            }
        }
    }
    out
}

#[test]
fn centerpoint_bound() {
    let mut rng = Seed(31).rng();
    for _ in 0..15 {
        let n: usize = rng.gen_range(3..14);
        let pts: Vec<[i64; 2]> = (0..n)
            .map(|_| [rng.gen_range(-100..=100), rng.gen_range(-100..=100)])
            .collect();
        // Scaling the data by D makes each rational vertex an integer query.
        let deepest = arrangement_vertices(&pts)
            .into_iter()
            .map(|[x, y, den]| {
                let scaled: Vec<[f64; 2]> =
                    pts.iter().map(|p| [(p[0] * den) as f64, (p[1] * den) as f64]).collect();
                halfspace_depth_2d_exact(&[x as f64, y as f64], &matrix(&scaled)).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(deepest >= n.div_ceil(3) as f64 / n as f64, "n={n}: {deepest}");
    }
}

#[test]
fn one_dimensional_transform_by_direct_count() {
    let w = DataMatrix::from_column(&(1..=100).map(f64::from).collect::<Vec<_>>()).unwrap();
    let x = DataMatrix::from_column(&[50.5]).unwrap();
    let target = halfspace_depth_1d(50.5, &w).unwrap();
    assert_eq!(target, 0.5);
    let count = (1..=100)
        .filter(|&i| halfspace_depth_1d(i as f64, &w).unwrap() <= target)
        .count();
    let g = gn_transform(&x, &w, DepthKind::HALFSPACE).unwrap();
    assert_eq!(g.values(), &[count as f64 / 100.0]);
    assert_eq!(g.values(), &[1.0]);
}

#[test]
fn sample_depth_converges_to_gaussian_depth() {
    let normal = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
    use statrs::distribution::ContinuousCDF;
    let grid: Vec<[f64; 2]> = (-2..=2)
        .flat_map(|i| (-2..=2).map(move |j| [i as f64 * 0.75, j as f64 * 0.75]))
        .collect();
    let queries = matrix(&grid);
    let spec = DistributionSpec::standard_normal(2);
    let errors: Vec<f64> = [500, 5000, 50_000]
        .iter()
        .map(|&n| {
            let w = sample(&spec, n, Seed(32).derive(n as u64)).unwrap();
            let d = depth_profile(&queries, &w, DepthKind::HALFSPACE).unwrap();
            grid.iter()
                .zip(&d.values)
                .map(|(p, &v)| (v - normal.cdf(-(p[0].hypot(p[1])))).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}

#[test]
fn batch_depths_match_single_queries() {
    let spec = DistributionSpec::standard_normal(2);
    let w = sample(&spec, 300, Seed(33)).unwrap();
    let x = sample(&spec, 20, Seed(34)).unwrap();
    for kind in [DepthKind::HALFSPACE, DepthKind::ZONOID] {
        let batch = depth_profile(&x, &w, kind).unwrap();
        for (row, &v) in x.rows().zip(&batch.values) {
            let single = match kind.family {
                depthgof::DepthFamily::Halfspace => halfspace_depth_2d_exact(row, &w).unwrap(),
                depthgof::DepthFamily::Zonoid => zonoid_depth(row, &w).unwrap(),
            };
            assert!((single - v).abs() < 1e-12, "{kind}: {single} vs {v}");
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec = DistributionSpec::standard_normal(2);
    let w = sample(&spec, 400, Seed(35)).unwrap();
    let x = sample(&spec, 50, Seed(36)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                [DepthKind::HALFSPACE, DepthKind::ZONOID, DepthKind::halfspace_approx(100, 1)]
                    .map(|k| gn_transform(&x, &w, k).unwrap())
            })
    };
    assert_eq!(run(1), run(3));
}
