//! Randomized verification suites comparing the closed forms, analytic
//! derivatives and depth-buffer visibility against independent
//! references, plus the synthetic recovery run.
//!
//! Every suite is seeded and returns a [`CheckOutcome`] holding the worst
//! observed error next to the tolerance it was held to.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::camera::CameraSpec;
use crate::color::{color_distance, Hsv};
use crate::energy::{
    regularization_energy, regularization_gradient, EnergyError, EnergyModel, EnergyParams, NeighborGraph,
};
use crate::math::{add, floor, normalize, scale, Vec3};
use crate::mesh::{compute_normals, Edge, Mesh};
use crate::quadtree::ImageGaussian;
use crate::solver::{refine_frame, PipelineError, RefinementReport, RunParams, SolverConfig};
use crate::surface::{build_surface_gaussians, current_positions, project_gaussian, SurfaceGaussian};
use crate::synth::{
    finite_diff_fn, finite_diff_gradient, finite_diff_similarity, make_scene, quadrature_overlap, raycast_visibility,
    reprojection_error, vertex_colors, SceneConfig, SynthError,
};
use crate::visibility::{compute_visibility, VisibilityMask};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, cases: usize, worst: f64, tolerance: f64, detail: String) -> Self {
        CheckOutcome {
            name,
            cases,
            worst,
            tolerance,
            passed: worst <= tolerance,
            detail,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_color(rng: &mut ChaCha8Rng) -> Hsv {
    Hsv::new(
        rng.gen_range(0.0..1.0),
        rng.gen_range(0.2..1.0),
        rng.gen_range(0.2..1.0),
    )
}

/// A color at HSV distance below `max` from `c`.
fn nearby_color(rng: &mut ChaCha8Rng, c: Hsv, max: f64) -> Hsv {
    let r = max / 3.0;
    let h = c.h + rng.gen_range(-r..r);
    Hsv::new(
        h - floor(h),
        (c.s + rng.gen_range(-r..r)).clamp(0.0, 1.0),
        (c.v + rng.gen_range(-r..r)).clamp(0.0, 1.0),
    )
}

/// Closed-form overlap of random pairs against the quadrature reference.
pub fn check_overlap(cases: usize, seed: u64, params: &EnergyParams) -> CheckOutcome {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut nonzero = 0;
    for _ in 0..cases {
        let sigma_s = rng.gen_range(0.5..12.0);
        let sigma_i = rng.gen_range(0.5..12.0);
        let var_sum = sigma_s * sigma_s + sigma_i * sigma_i;
        // stay inside the evaluated range so the culled branch is not hit
        let limit = params.cull_factor * params.cull_factor * params.overlap.exponent_scale() * var_sum;
        let d = libm::sqrt(rng.gen_range(0.0..0.95) * limit);
        let angle = rng.gen_range(0.0..core::f64::consts::TAU);
        let mu_s = [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)];
        let mu_i = [mu_s[0] + d * libm::cos(angle), mu_s[1] + d * libm::sin(angle)];
        let color_s = random_color(&mut rng);
        let color_i = if rng.gen_bool(0.9) {
            nearby_color(&mut rng, color_s, params.delta_color)
        } else {
            random_color(&mut rng)
        };
        let proj = crate::surface::ProjectedGaussian {
            mu: mu_s,
            sigma: sigma_s,
            depth: 1.0,
            vertex: 0,
            camera: 0,
        };
        let img = ImageGaussian {
            mu: mu_i,
            sigma: sigma_i,
            color: color_i,
            camera: 0,
            depth: 0,
        };
        let closed = crate::energy::pair_overlap(&proj, &img, color_distance(color_s, color_i), params);
        let reference = match quadrature_overlap(mu_s, sigma_s, color_s, mu_i, sigma_i, color_i, params) {
            Ok(v) => v,
            Err(_) => {
                worst = f64::INFINITY;
                continue;
            }
        };
        let err = if reference == 0.0 {
            if closed == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            nonzero += 1;
            (closed - reference).abs() / reference.abs()
        };
        worst = worst.max(err);
    }
    CheckOutcome::new(
        "closed-form overlap vs quadrature",
        cases,
        worst,
        1e-4,
        format!("{nonzero} color-compatible pairs"),
    )
}

/// A small hand-built scene for gradient checks.
pub struct GradientScene {
    pub model: EnergyModel,
    pub gaussians: Vec<SurfaceGaussian>,
    pub visibility: VisibilityMask,
}

/// Relative distance of the pair-wise quantities that decide the
/// non-smooth branches (culling radius, clamp) from their thresholds.
fn boundary_margin(scene: &GradientScene) -> Result<f64, EnergyError> {
    let params = scene.model.params();
    let eval = scene.model.evaluate(&scene.gaussians, &scene.visibility)?;
    let mut margin = f64::INFINITY;
    for (c, cam) in scene.model.cameras().iter().enumerate() {
        let images = scene.model.image_gaussians(c);
        for (i, gi) in images.iter().enumerate() {
            let cap = gi.max_overlap();
            margin = margin.min((eval.overlap_sums(c)[i] - cap).abs() / cap);
        }
        for g in &scene.gaussians {
            let p = project_gaussian(cam, c, g).map_err(|_| EnergyError::MaskShape)?;
            for gi in images {
                let dx = gi.mu[0] - p.mu[0];
                let dy = gi.mu[1] - p.mu[1];
                let var_sum = p.sigma * p.sigma + gi.sigma * gi.sigma;
                let limit = params.cull_factor * params.cull_factor * params.overlap.exponent_scale() * var_sum;
                margin = margin.min(((dx * dx + dy * dy) - limit).abs() / limit);
            }
        }
    }
    Ok(margin)
}

/// Random scene with at most 10 surface Gaussians, 3 cameras and 20 image
/// Gaussians in total, all Gaussians visible.
pub fn random_gradient_scene(rng: &mut ChaCha8Rng, params: &EnergyParams) -> GradientScene {
    let n_cams = rng.gen_range(1..=3);
    let cams: Vec<CameraSpec> = (0..n_cams)
        .map(|_| loop {
            let azimuth = rng.gen_range(0.0..core::f64::consts::TAU);
            let elevation = rng.gen_range(0.5..1.3f64);
            let dist = rng.gen_range(700.0..1200.0);
            let eye = scale(
                [
                    libm::cos(elevation) * libm::cos(azimuth),
                    libm::cos(elevation) * libm::sin(azimuth),
                    libm::sin(elevation),
                ],
                dist,
            );
            if let Ok(c) = CameraSpec::look_at(eye, [0.0; 3], [0.0, 0.0, 1.0], rng.gen_range(500.0..1000.0), 200, 200) {
                break c;
            }
        })
        .collect();
    let n_s = rng.gen_range(2..=10);
    let palette: Vec<Hsv> = (0..3).map(|_| random_color(rng)).collect();
    let gaussians: Vec<SurfaceGaussian> = (0..n_s)
        .map(|s| {
            let normal =
                normalize([rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6), 1.0]).unwrap_or([0.0, 0.0, 1.0]);
            SurfaceGaussian {
                rest: [
                    rng.gen_range(-30.0..30.0),
                    rng.gen_range(-30.0..30.0),
                    rng.gen_range(-10.0..10.0),
                ],
                normal,
                k: rng.gen_range(-3.0..3.0),
                sigma_hat: rng.gen_range(4.0..9.0),
                color: Some({
                    let base = palette[rng.gen_range(0..palette.len())];
                    nearby_color(rng, base, params.delta_color)
                }),
                vertex: s,
            }
        })
        .collect();
    let total_images = rng.gen_range(n_cams..=20);
    let mut image_gaussians: Vec<Vec<ImageGaussian>> = vec![Vec::new(); n_cams];
    for j in 0..total_images {
        let c = j % n_cams;
        let anchor = &gaussians[rng.gen_range(0..n_s)];
        let p = project_gaussian(&cams[c], c, anchor).expect("in front of the camera");
        let sigma = rng.gen_range(2.0..9.0);
        let base = palette[rng.gen_range(0..palette.len())];
        image_gaussians[c].push(ImageGaussian {
            mu: [
                p.mu[0] + rng.gen_range(-1.5..1.5) * p.sigma,
                p.mu[1] + rng.gen_range(-1.5..1.5) * p.sigma,
            ],
            sigma,
            color: nearby_color(rng, base, params.delta_color),
            camera: c,
            depth: 0,
        });
    }
    let mut edges: Vec<Edge> = (1..n_s).map(|s| (rng.gen_range(0..s), s)).collect();
    for _ in 0..rng.gen_range(0..n_s) {
        let a = rng.gen_range(0..n_s);
        let b = rng.gen_range(0..n_s);
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    let graph = NeighborGraph::from_edges(n_s, &edges, params.delta_geo);
    let model = EnergyModel::new(cams, image_gaussians, graph, *params).expect("valid parameters");
    let visibility = VisibilityMask::new(n_cams, n_s, true);
    GradientScene {
        model,
        gaussians,
        visibility,
    }
}

/// Analytic gradient against central differences on random small scenes
/// that stay clear of the culling radius and the clamp.
pub fn check_gradient(scenes: usize, seed: u64, h: f64) -> CheckOutcome {
    const THRESHOLD: f64 = 1e-10;
    const MIN_MARGIN: f64 = 1e-3;
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut components = 0;
    let mut rejected = 0;
    let mut done = 0;
    while done < scenes {
        let params = EnergyParams {
            w_reg: rng.gen_range(0.0..0.2),
            ..EnergyParams::default()
        };
        let scene = random_gradient_scene(&mut rng, &params);
        match boundary_margin(&scene) {
            Ok(m) if m > MIN_MARGIN => {}
            _ => {
                rejected += 1;
                continue;
            }
        }
        let outcome = (|| -> Result<(), EnergyError> {
            let eval = scene.model.evaluate(&scene.gaussians, &scene.visibility)?;
            if eval.report.pairs == 0 {
                return Err(EnergyError::MaskShape);
            }
            let analytic = scene.model.gradient(&scene.gaussians, &eval)?;
            let numeric = finite_diff_gradient(&scene.model, &scene.gaussians, &scene.visibility, h)?;
            for (a, n) in analytic.iter().zip(&numeric) {
                if a.abs() > THRESHOLD {
                    components += 1;
                    worst = worst.max((a - n).abs() / a.abs());
                }
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => done += 1,
            Err(_) => rejected += 1,
        }
    }
    CheckOutcome::new(
        "analytic gradient vs central differences",
        scenes,
        worst,
        1e-5,
        format!("{components} components compared, {rejected} near-boundary scenes redrawn"),
    )
}

/// Zero set, derivative and hand value of the regularizer.
pub fn check_regularizer(graphs: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for g in 0..graphs {
        let n = rng.gen_range(2..40);
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(1..2 * n) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a.min(b), a.max(b)));
            }
        }
        let graph = NeighborGraph::from_edges(n, &edges, 2.0);
        let component = components(n, &edges);
        let levels: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let constant: Vec<f64> = component.iter().map(|&c| levels[c]).collect();
        if regularization_energy(&constant, &graph) != 0.0 {
            failures.push(format!("graph {g}: nonzero energy for per-component constant k"));
        }
        // a vertex with an incident edge differing from its neighbors
        if let Some(&(a, _)) = edges.first() {
            let mut bumped = constant.clone();
            bumped[a] += rng.gen_range(0.01..1.0);
            if !(regularization_energy(&bumped, &graph) > 0.0) {
                failures.push(format!("graph {g}: zero energy for non-constant k"));
            }
        }
        let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let analytic = regularization_gradient(&k, &graph);
        let numeric = finite_diff_fn(|x| regularization_energy(x, &graph), &k, 1e-3);
        for (a, b) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    let pair = NeighborGraph::from_edges(2, &[(0, 1)], 2.0);
    let hand = regularization_energy(&[0.0, 1.0], &pair);
    if hand != 0.375 {
        failures.push(format!("two-vertex value {hand} != 0.375"));
    }
    let mut outcome = CheckOutcome::new(
        "regularizer zero set, derivative, two-vertex value",
        graphs,
        worst,
        1e-8,
        if failures.is_empty() {
            String::from("two-vertex value 0.375")
        } else {
            failures.join("; ")
        },
    );
    outcome.passed &= failures.is_empty();
    outcome
}

fn components(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Scene whose surface Gaussians project exactly onto a grid of image
/// Gaussians with matching colors and a slightly larger extent, so every
/// image Gaussian starts saturated.
pub fn matched_scene(seed: u64) -> GradientScene {
    let mut rng = rng(seed);
    let cam =
        CameraSpec::look_at([0.0, 0.0, 1000.0], [0.0; 3], [0.0, 1.0, 0.0], 1000.0, 200, 200).expect("valid camera");
    let palette: Vec<Hsv> = (0..4).map(|_| random_color(&mut rng)).collect();
    let sigma_i = 4.0;
    let mut images = Vec::new();
    let mut gaussians = Vec::new();
    for a in 0..10 {
        for b in 0..10 {
            let mu = [
                20.0 + 16.0 * a as f64 + rng.gen_range(-1.0..1.0),
                20.0 + 16.0 * b as f64 + rng.gen_range(-1.0..1.0),
            ];
            let color = palette[rng.gen_range(0..palette.len())];
            images.push(ImageGaussian {
                mu,
                sigma: sigma_i,
                color,
                camera: 0,
                depth: 0,
            });
            let dir = cam.ray_direction(mu).expect("valid ray");
            let t = -cam.center()[2] / dir[2];
            let rest = add(cam.center(), scale(dir, t));
            gaussians.push(SurfaceGaussian {
                rest,
                normal: [0.0, 0.0, 1.0],
                k: 0.0,
                // projected extent 1.25 sigma_i at depth 1000
                sigma_hat: 1.25 * sigma_i * 1000.0 / cam.focal(),
                color: Some(color),
                vertex: gaussians.len(),
            });
        }
    }
    let n = gaussians.len();
    let edges: Vec<Edge> = (1..n).map(|s| (s - 1, s)).collect();
    let params = EnergyParams::default();
    let model = EnergyModel::new(
        vec![cam],
        vec![images],
        NeighborGraph::from_edges(n, &edges, params.delta_geo),
        params,
    )
    .expect("valid parameters");
    GradientScene {
        model,
        visibility: VisibilityMask::new(1, n, true),
        gaussians,
    }
}

/// Duplicating every surface Gaussian of a saturated scene leaves the
/// similarity unchanged, and nothing flows back through saturated image
/// Gaussians.
pub fn check_occlusion_clamp(seed: u64) -> CheckOutcome {
    let scene = matched_scene(seed);
    let mut detail = Vec::new();
    let result = (|| -> Result<f64, EnergyError> {
        let before = scene.model.evaluate(&scene.gaussians, &scene.visibility)?;
        let n = scene.gaussians.len();
        let images = scene.model.image_gaussians(0).len();
        if before.report.saturated != images {
            detail.push(format!(
                "only {} of {images} image gaussians saturated",
                before.report.saturated
            ));
        }
        let mut doubled = scene.gaussians.clone();
        for g in &scene.gaussians {
            doubled.push(SurfaceGaussian {
                vertex: g.vertex + n,
                ..g.clone()
            });
        }
        // duplicates carry no graph edges of their own
        let graph = NeighborGraph::from_edges(2 * n, &[], scene.model.params().delta_geo);
        let model = EnergyModel::new(
            scene.model.cameras().to_vec(),
            vec![scene.model.image_gaussians(0).to_vec()],
            graph,
            *scene.model.params(),
        )?;
        let vis = VisibilityMask::new(1, 2 * n, true);
        let after = model.evaluate(&doubled, &vis)?;
        let diff = (after.report.similarity - before.report.similarity).abs();
        let grad = model.similarity_gradient(&doubled, &after)?;
        let leaked = model
            .pair_contributions(&doubled, &after)?
            .iter()
            .filter(|p| p.gaussian >= n && p.saturated && p.gradient != 0.0)
            .count();
        let nonzero = grad[n..].iter().filter(|g| **g != 0.0).count();
        let numeric = finite_diff_similarity(&model, &doubled, &vis, 1e-4)?;
        let numeric_nonzero = numeric[n..].iter().filter(|g| **g != 0.0).count();
        if leaked + nonzero + numeric_nonzero > 0 {
            detail.push(format!(
                "{leaked} saturated pair terms, {nonzero} analytic and {numeric_nonzero} numeric duplicate derivatives nonzero"
            ));
        }
        Ok(diff)
    })();
    let (worst, passed_extra) = match result {
        Ok(d) => (d, detail.is_empty()),
        Err(e) => {
            detail.push(format!("{e}"));
            (f64::INFINITY, false)
        }
    };
    let mut outcome = CheckOutcome::new(
        "occlusion clamp under duplication",
        1,
        worst,
        1e-12,
        if detail.is_empty() {
            String::from("all image gaussians saturated, duplicate derivatives exactly 0")
        } else {
            detail.join("; ")
        },
    );
    outcome.passed &= passed_extra;
    outcome
}

/// Random triangle soup of at most `max_triangles` triangles in front of a
/// few cameras.
pub fn random_visibility_scene(
    rng: &mut ChaCha8Rng,
    max_triangles: usize,
) -> (Mesh, Vec<SurfaceGaussian>, Vec<CameraSpec>) {
    loop {
        let n_tri = rng.gen_range(10..=max_triangles);
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for t in 0..n_tri {
            let center: Vec3 = [
                rng.gen_range(-150.0..150.0),
                rng.gen_range(-150.0..150.0),
                rng.gen_range(-150.0..150.0),
            ];
            let size = if t % 10 == 0 {
                rng.gen_range(100.0..250.0)
            } else {
                rng.gen_range(15.0..90.0)
            };
            for _ in 0..3 {
                vertices.push(add(
                    center,
                    [
                        rng.gen_range(-size..size),
                        rng.gen_range(-size..size),
                        rng.gen_range(-size..size),
                    ],
                ));
            }
            faces.push([3 * t, 3 * t + 1, 3 * t + 2]);
        }
        let Ok(mesh) = Mesh::new(vertices, faces) else {
            continue;
        };
        let Ok(normals) = compute_normals(&mesh) else {
            continue;
        };
        let gaussians = build_surface_gaussians(&mesh, &normals, 7.0);
        let n_cams = rng.gen_range(1..=3);
        let cams: Vec<CameraSpec> = (0..n_cams)
            .filter_map(|_| {
                let dir = normalize([
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ])?;
                CameraSpec::look_at(
                    scale(dir, rng.gen_range(900.0..1400.0)),
                    [0.0; 3],
                    [0.0, 0.0, 1.0],
                    rng.gen_range(300.0..700.0),
                    160,
                    120,
                )
                .ok()
            })
            .collect();
        if cams.is_empty() {
            continue;
        }
        return (mesh, gaussians, cams);
    }
}

/// Depth-buffer visibility against ray casting.
pub fn check_visibility(scenes: usize, seed: u64) -> CheckOutcome {
    let mut rng = rng(seed);
    let mut total = 0usize;
    let mut disagree = 0usize;
    let mut visible = 0usize;
    let mut occluded = 0usize;
    for _ in 0..scenes {
        let (mesh, gaussians, cams) = random_visibility_scene(&mut rng, 100);
        let a = compute_visibility(&mesh, &gaussians, &cams, 14.0);
        let b = raycast_visibility(&mesh, &gaussians, &cams, 14.0);
        for (c, cam) in cams.iter().enumerate() {
            for (s, g) in gaussians.iter().enumerate() {
                total += 1;
                let va = a.is_visible(c, s);
                if va != b.is_visible(c, s) {
                    disagree += 1;
                }
                if va {
                    visible += 1;
                } else {
                    let facing = crate::math::dot(g.normal, crate::math::sub(cam.center(), g.mean())) > 0.0;
                    let inside = cam.project(g.mean()).is_some_and(|(uv, _)| cam.contains_pixel(uv));
                    if facing && inside {
                        occluded += 1;
                    }
                }
            }
        }
    }
    CheckOutcome::new(
        "depth-buffer vs ray-cast visibility",
        scenes,
        disagree as f64,
        0.0,
        format!("{total} vertex/camera tests, {visible} visible, {occluded} occluded, {disagree} disagreements"),
    )
}

#[derive(Debug, Clone)]
pub struct RecoveryOutcome {
    pub input_rmse: f64,
    pub output_rmse: f64,
    /// `1 - output / input`.
    pub reduction: f64,
    pub reprojection_before: f64,
    pub reprojection_after: f64,
    pub report: RefinementReport,
    /// Solver displacement per vertex of the subdivided mesh (0 where no
    /// Gaussian sits).
    pub k: Vec<f64>,
}

/// Refines the coarse mesh of a synthetic scene and scores the result
/// against the known displacements.
pub fn run_recovery(
    scene_config: &SceneConfig,
    params: &RunParams,
    solver: &SolverConfig,
) -> Result<RecoveryOutcome, RecoveryError> {
    let scene = make_scene(scene_config)?;
    let params = RunParams {
        subdiv_levels: scene_config.subdiv_levels,
        ..*params
    };
    let result = refine_frame(&scene.frame(), &scene.cameras, &params, solver, None, None)?;
    let n = scene.base.vertex_count();
    let mut k = vec![0.0; n];
    for g in &result.gaussians {
        k[g.vertex] = g.k;
    }
    let input_rmse = scene.k_rmse(&vec![0.0; n]);
    let output_rmse = scene.k_rmse(&k);
    let colors = vertex_colors(n, &result.gaussians);
    let metric = params.energy.hue_metric;
    let before = reprojection_error(&scene.base, &colors, &scene.images, &scene.cameras, metric);
    let refined = scene
        .base
        .with_vertices(current_positions(&scene.base, &result.gaussians))
        .map_err(PipelineError::from)?;
    let after = reprojection_error(&refined, &colors, &scene.images, &scene.cameras, metric);
    Ok(RecoveryOutcome {
        input_rmse,
        output_rmse,
        reduction: if input_rmse > 0.0 {
            1.0 - output_rmse / input_rmse
        } else {
            0.0
        },
        reprojection_before: before.overall,
        reprojection_after: after.overall,
        report: result.report,
        k,
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecoveryError {
    #[error(transparent)]
    Scene(#[from] SynthError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Settings of the plane-wave recovery benchmark.
pub fn recovery_settings() -> (SceneConfig, RunParams, SolverConfig) {
    let params = RunParams {
        energy: EnergyParams {
            w_reg: 0.01,
            ..EnergyParams::default()
        },
        bias_compensation: false,
        ..RunParams::default()
    };
    (SceneConfig::plane_wave(), params, SolverConfig::default())
}
