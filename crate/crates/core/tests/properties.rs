use lifelines_core::arrangement::{build_arrangement, snap_point};
use lifelines_core::curve::{arc_length, resample_points, shoelace};
use lifelines_core::frechet::{discrete_frechet, endpoint_bound};
use lifelines_core::gallery::lower_bounds;
use lifelines_core::morph::{collapse_duplicates, interpolate};
use lifelines_core::synth::random_canonical;
use lifelines_core::winding::compute_winding;
use lifelines_core::{
    close_curve, continuous_frechet, frechet_decision, make_morph, recolor, CanonicalCurve, Palette,
    Point,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curve(seed: u64) -> CanonicalCurve {
    random_canonical(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn point() -> impl Strategy<Value = Point> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn polyline(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arrangement_invariants(seed in any::<u64>()) {
        let c = curve(seed);
        let arr = build_arrangement(&close_curve(&c)).unwrap();
        prop_assert_eq!(arr.euler_characteristic(), 2);
        let w = compute_winding(&arr);
        prop_assert_eq!(w.get(arr.unbounded_face()), 0);
        for h in arr.half_edges() {
            let twin = &arr.half_edges()[h.twin];
            prop_assert_eq!(w.get(h.face) - w.get(twin.face), h.curve_dir as i64);
            prop_assert_eq!(arr.half_edges()[h.next].origin, arr.destination(h.id));
        }
    }

    #[test]
    fn winding_weighted_area_is_chain_area(seed in any::<u64>()) {
        let c = curve(seed);
        let chain = close_curve(&c);
        let arr = build_arrangement(&chain).unwrap();
        let w = compute_winding(&arr);
        let weighted: f64 = arr.bounded_faces().map(|f| w.get(f.id) as f64 * arr.face_area(f.id)).sum();
        let snapped: Vec<Point> = chain.points().iter().map(|&p| snap_point(p).unwrap()).collect();
        let area = shoelace(&snapped);
        prop_assert!((weighted - area).abs() <= 1e-6 * area.abs().max(1.0), "{} vs {}", weighted, area);
    }

    #[test]
    fn recolor_keeps_equal_winding_classes(seed in any::<u64>(), offset in -20i64..20) {
        let c = curve(seed);
        let palette = Palette::default();
        let (_, _, colored) = lifelines_core::winding::color_chain(&close_curve(&c), &palette).unwrap();
        let shifted = recolor(&colored, &palette, offset);
        for f in &shifted {
            for g in &shifted {
                // the default palette has eight distinct colors
                prop_assert_eq!(f.color == g.color, (f.winding - g.winding).rem_euclid(8) == 0);
            }
        }
        prop_assert_eq!(recolor(&shifted, &palette, 0), colored);
    }

    #[test]
    fn frechet_is_symmetric(a in polyline(12), b in polyline(12)) {
        prop_assert_eq!(discrete_frechet(&a, &b).unwrap().distance, discrete_frechet(&b, &a).unwrap().distance);
    }

    #[test]
    fn frechet_triangle_inequality(a in polyline(10), b in polyline(10), c in polyline(10)) {
        let d = |x: &[Point], y: &[Point]| discrete_frechet(x, y).unwrap().distance;
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn frechet_ignores_duplicated_samples(a in polyline(10), b in polyline(10), k in 0usize..10) {
        let k = k % a.len();
        let mut dup = a.clone();
        dup.insert(k, a[k]);
        prop_assert_eq!(discrete_frechet(&dup, &b).unwrap().distance, discrete_frechet(&a, &b).unwrap().distance);
    }

    #[test]
    fn bounds_sandwich_the_distances(a in polyline(10), b in polyline(10)) {
        let discrete = discrete_frechet(&a, &b).unwrap().distance;
        let tol = 1e-7;
        let continuous = continuous_frechet(&a, &b, tol).unwrap();
        let (ends, boxes) = lower_bounds(&a, &b);
        prop_assert!(ends <= continuous + tol && boxes <= continuous + tol);
        prop_assert!(ends == endpoint_bound(&a, &b));
        prop_assert!(continuous <= discrete + tol);
    }

    #[test]
    fn decision_is_monotone(a in polyline(8), b in polyline(8)) {
        let top = discrete_frechet(&a, &b).unwrap().distance * 1.5 + 1e-3;
        let answers: Vec<bool> = (0..32).map(|k| frechet_decision(&a, &b, top * k as f64 / 31.0)).collect();
        prop_assert!(answers.windows(2).all(|w| w[0] <= w[1]), "{:?}", answers);
        prop_assert!(answers[31]);
    }

    #[test]
    fn morph_frames_stay_close(sa in any::<u64>(), sb in any::<u64>(), t in 0.0..1.0f64) {
        let (a, b) = (curve(sa), curve(sb));
        let r = discrete_frechet(a.points(), b.points()).unwrap();
        let frame = interpolate(a.points(), b.points(), &r.coupling, t);
        let to_a = discrete_frechet(a.points(), &frame).unwrap().distance;
        let to_b = discrete_frechet(&frame, b.points()).unwrap().distance;
        prop_assert!(to_a <= t * r.distance + 1e-9);
        prop_assert!(to_b <= (1.0 - t) * r.distance + 1e-9);
    }

    #[test]
    fn resampling_preserves_endpoints_and_length(
        start in point(),
        steps in prop::collection::vec((0.001..0.1f64, -1.0..1.0f64), 1..64),
        n in 2usize..600,
    ) {
        // Each vertex turns by at most 45 degrees. A sample window of length h
        // straddling a corner then loses at most h (1 - cos 22.5°), so 62
        // corners at n = 512 lose less than 1% of the length.
        let mut pts = vec![start];
        let mut heading = 0.0f64;
        for &(len, turn) in &steps {
            heading += turn * std::f64::consts::FRAC_PI_4;
            let p = *pts.last().unwrap();
            pts.push(Point::new(p.x + len * heading.cos(), p.y + len * heading.sin()));
        }
        let source = arc_length(&pts);
        let out = resample_points(&pts, n).unwrap();
        prop_assert_eq!(out.len(), n);
        prop_assert_eq!(out[0], pts[0]);
        prop_assert_eq!(out[n - 1], pts[pts.len() - 1]);
        let len = arc_length(&out);
        prop_assert!(len <= source * (1.0 + 1e-12));
        if n >= 512 {
            prop_assert!(source - len < 0.01 * source, "{} vs {}", len, source);
        }
    }

    #[test]
    fn resampling_collinear_input_is_idempotent(xs in prop::collection::vec(0.0..1.0f64, 0..20), n in 2usize..64, y in 0.0..1.0f64) {
        let mut xs = xs;
        xs.push(0.0);
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        let pts: Vec<Point> = xs.iter().map(|&x| Point::new(x, y)).collect();
        let once = resample_points(&pts, n).unwrap();
        let twice = resample_points(&once, n).unwrap();
        for (p, q) in once.iter().zip(&twice) {
            prop_assert!(p.distance(q) <= 1e-12);
        }
    }
}

#[test]
fn morph_endpoints_reproduce_inputs() {
    for seed in 0..10 {
        let (a, b) = (curve(2 * seed), curve(2 * seed + 1));
        let m = make_morph(&a, &b, 5, &Palette::default()).unwrap();
        assert_eq!(collapse_duplicates(&m.frames[0].curve), a.points());
        assert_eq!(collapse_duplicates(&m.frames[4].curve), b.points());
    }
}

#[test]
fn resampled_samples_are_equally_spaced_along_the_source() {
    // an L-shape: chord spacing shrinks at the corner but arc spacing does not
    let l = [Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    let out = resample_points(&l, 4).unwrap();
    let along = |p: &Point| if p.x == 0.0 { 1.0 - p.y } else { 1.0 + p.x };
    for (k, p) in out.iter().enumerate() {
        assert!((along(p) - 2.0 * k as f64 / 3.0).abs() < 1e-12);
    }
}
