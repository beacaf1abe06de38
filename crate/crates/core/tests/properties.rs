use gaussref_core::color::{color_distance, hsv_to_rgb, rgb_to_hsv, Hsv, Rgb};
use gaussref_core::energy::{
    overlap_closed_form, regularization_energy, regularization_gradient, wendland, NeighborGraph, OverlapForm,
};
use gaussref_core::mesh::subdivide;
use gaussref_core::synth::{finite_diff_fn, icosphere, plane_grid};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

proptest! {
    #[test]
    fn hsv_round_trips(r in unit(), g in unit(), b in unit()) {
        let back = hsv_to_rgb(rgb_to_hsv(Rgb::new(r, g, b)));
        prop_assert!((back.r - r).abs() < 1e-12);
        prop_assert!((back.g - g).abs() < 1e-12);
        prop_assert!((back.b - b).abs() < 1e-12);
    }

    #[test]
    fn color_distance_is_a_bounded_symmetric_measure(
        a in (unit(), unit(), unit()), b in (unit(), unit(), unit()),
    ) {
        let (x, y) = (Hsv::new(a.0 % 1.0, a.1, a.2), Hsv::new(b.0 % 1.0, b.1, b.2));
        let d = color_distance(x, y);
        prop_assert_eq!(d, color_distance(y, x));
        prop_assert!(d >= 0.0);
        prop_assert!(d <= (0.25f64 + 1.0 + 1.0).sqrt() + 1e-12);
        prop_assert_eq!(color_distance(x, x), 0.0);
    }

    #[test]
    fn wendland_falls_monotonically_to_zero(d1 in 0.0..0.1f64, d2 in 0.0..0.1f64) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (a, b) = (wendland(lo, 0.05), wendland(hi, 0.05));
        prop_assert!(a >= b);
        prop_assert!((0.0..=1.0).contains(&a));
        if hi >= 0.05 {
            prop_assert_eq!(b, 0.0);
        }
    }

    #[test]
    fn overlap_is_bounded_by_the_geometric_mean_self_overlap(
        s1 in 0.1..20.0f64, s2 in 0.1..20.0f64, dx in -50.0..50.0f64, dy in -50.0..50.0f64,
    ) {
        for form in [OverlapForm::Exact, OverlapForm::Published] {
            let v = overlap_closed_form([0.0, 0.0], s1, [dx, dy], s2, form);
            let cap = std::f64::consts::PI * s1 * s2;
            prop_assert!(v >= 0.0 && v <= cap * (1.0 + 1e-12));
            prop_assert_eq!(v, overlap_closed_form([dx, dy], s2, [0.0, 0.0], s1, form));
        }
    }

    #[test]
    fn regularizer_gradient_matches_differences(k in proptest::collection::vec(-5.0..5.0f64, 6)) {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)];
        let graph = NeighborGraph::from_edges(6, &edges, 2.0);
        prop_assert!(regularization_energy(&k, &graph) >= 0.0);
        let analytic = regularization_gradient(&k, &graph);
        let numeric = finite_diff_fn(|x| regularization_energy(x, &graph), &k, 1e-3);
        for (a, n) in analytic.iter().zip(&numeric) {
            prop_assert!((a - n).abs() <= 1e-8 * a.abs().max(1.0));
        }
    }

    #[test]
    fn regularizer_ignores_a_common_offset(k in proptest::collection::vec(-5.0..5.0f64, 5), c in -10.0..10.0f64) {
        let graph = NeighborGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], 2.0);
        let shifted: Vec<f64> = k.iter().map(|v| v + c).collect();
        let (a, b) = (regularization_energy(&k, &graph), regularization_energy(&shifted, &graph));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn subdivision_follows_euler_bookkeeping(cells in 1usize..6, levels in 0u32..3) {
        let m = plane_grid(100.0, cells).unwrap();
        let once = subdivide(&m, 1);
        prop_assert_eq!(once.vertex_count(), m.vertex_count() + m.edges().len());
        prop_assert_eq!(once.face_count(), 4 * m.face_count());
        let many = subdivide(&m, levels);
        prop_assert_eq!(many.face_count(), m.face_count() * 4usize.pow(levels));
        prop_assert_eq!(&many.vertices()[..m.vertex_count()], m.vertices());
    }
}

#[test]
fn closed_mesh_subdivision_counts() {
    let m = icosphere(1.0, 1).unwrap();
    let s = subdivide(&m, 1);
    assert_eq!(s.vertex_count(), m.vertex_count() + m.edges().len());
    assert_eq!(s.face_count(), 4 * m.face_count());
    assert_eq!(subdivide(&m, 0).vertices(), m.vertices());
}
