use std::f64::consts::PI;

use gaussref_core::color::{Hsv, HueMetric};
use gaussref_core::image::RgbImage;
use gaussref_core::math::{add, scale};
use gaussref_core::mesh::{compute_normals, subdivide};
use gaussref_core::surface::build_surface_gaussians;
use gaussref_core::synth::{
    make_scene, quadrature_product, raycast_visibility, reprojection_error, SceneConfig, TextureKind,
};

fn small(kind: SceneConfig) -> SceneConfig {
    SceneConfig {
        width: 96,
        height: 96,
        focal: 180.0,
        cameras: 3,
        ..kind
    }
}

#[test]
fn redisplacing_the_smooth_base_reproduces_the_truth() {
    for cfg in [
        small(SceneConfig::plane_wave()),
        SceneConfig {
            resolution: 2,
            ..small(SceneConfig::sphere_bumps())
        },
    ] {
        let s = make_scene(&cfg).unwrap();
        let base = subdivide(&s.coarse, cfg.subdiv_levels);
        let normals = compute_normals(&base).unwrap();
        for ((p, n), (k, t)) in base
            .vertices()
            .iter()
            .zip(&normals)
            .zip(s.k_true.iter().zip(s.truth.vertices()))
        {
            let q = add(*p, scale(*n, *k));
            for a in 0..3 {
                assert!((q[a] - t[a]).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn plane_wave_peaks_at_its_amplitude() {
    let s = make_scene(&small(SceneConfig::plane_wave())).unwrap();
    let max = s.k_true.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    assert!((max - 10.0).abs() < 1e-9, "{max}");
}

#[test]
fn quadrature_recovers_gaussian_mass() {
    for sigma in [0.3, 1.0, 2.5, 11.0] {
        let v = quadrature_product(&[([0.0, 0.0], sigma)]).unwrap();
        let want = 2.0 * PI * sigma * sigma;
        assert!((v - want).abs() / want <= 1e-6);
    }
}

#[test]
fn uniformly_wrong_value_scores_half() {
    let s = make_scene(&SceneConfig {
        texture: gaussref_core::synth::Texture {
            kind: TextureKind::Plain([255, 255, 255]),
            seed: 0,
        },
        ..small(SceneConfig::plane_wave())
    })
    .unwrap();
    let colors = vec![Some(Hsv::new(0.0, 0.0, 0.5)); s.truth.vertex_count()];
    let m = reprojection_error(&s.truth, &colors, &s.images, &s.cameras, HueMetric::Circular);
    assert!((m.overall - 0.5).abs() < 1e-12, "{}", m.overall);
    let blank: Vec<RgbImage> = s
        .images
        .iter()
        .map(|i| RgbImage::new(i.width(), i.height(), [0, 0, 0]))
        .collect();
    let m = reprojection_error(&s.truth, &colors, &blank, &s.cameras, HueMetric::Circular);
    assert!((m.overall - 0.5).abs() < 1e-12);
}

#[test]
fn raycasting_sees_the_front_of_a_sphere() {
    let cfg = SceneConfig {
        resolution: 1,
        subdiv_levels: 0,
        amplitude: 0.0,
        ..small(SceneConfig::sphere_bumps())
    };
    let s = make_scene(&cfg).unwrap();
    let normals = compute_normals(&s.truth).unwrap();
    let gaussians = build_surface_gaussians(&s.truth, &normals, 7.0);
    let vis = raycast_visibility(&s.truth, &gaussians, &s.cameras[..1], 1.0);
    let seen = vis.visible_count();
    assert!(seen > 0 && seen < gaussians.len(), "{seen}");
}
