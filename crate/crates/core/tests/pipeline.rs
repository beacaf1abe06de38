use gaussref_core::camera::CameraSpec;
use gaussref_core::color::Hsv;
use gaussref_core::image::RgbImage;
use gaussref_core::math::{add, scale};
use gaussref_core::mesh::{compute_normals, Mesh};
use gaussref_core::solver::{refine_frame, refine_sequence, FrameInput, PipelineError, RunParams, SolverConfig};
use gaussref_core::surface::{assign_colors, build_surface_gaussians};
use gaussref_core::synth::{make_scene, plane_grid, SceneConfig, SyntheticScene};
use gaussref_core::visibility::VisibilityMask;

fn small_scene(amplitude: f64) -> SyntheticScene {
    make_scene(&SceneConfig {
        width: 128,
        height: 128,
        focal: 260.0,
        resolution: 6,
        cameras: 4,
        amplitude,
        frequency: 1.0 / 200.0,
        ..SceneConfig::plane_wave()
    })
    .unwrap()
}

fn quick() -> SolverConfig {
    SolverConfig {
        max_iters: 60,
        ..SolverConfig::default()
    }
}

#[test]
fn color_comes_from_the_best_aligned_camera() {
    let mesh = plane_grid(100.0, 2).unwrap();
    let normals = compute_normals(&mesh).unwrap();
    let mut g = build_surface_gaussians(&mesh, &normals, 7.0);
    let head_on = CameraSpec::look_at([0.0, 0.0, 1000.0], [0.0; 3], [0.0, 1.0, 0.0], 800.0, 200, 200).unwrap();
    let grazing = CameraSpec::look_at([1000.0, 0.0, 60.0], [0.0; 3], [0.0, 0.0, 1.0], 800.0, 200, 200).unwrap();
    let images = vec![
        RgbImage::new(200, 200, [255, 0, 0]),
        RgbImage::new(200, 200, [0, 0, 255]),
    ];
    let vis = VisibilityMask::new(2, g.len(), true);
    assign_colors(&mut g, &mesh, &images, &[head_on, grazing], &vis).unwrap();
    assert!(
        g.iter().all(|g| g.color == Some(Hsv::new(0.0, 1.0, 1.0))),
        "{:?}",
        g[0].color
    );
}

#[test]
fn unseen_vertex_takes_neighbor_color() {
    let mesh = plane_grid(100.0, 2).unwrap();
    let normals = compute_normals(&mesh).unwrap();
    let mut g = build_surface_gaussians(&mesh, &normals, 7.0);
    let cam = CameraSpec::look_at([0.0, 0.0, 1000.0], [0.0; 3], [0.0, 1.0, 0.0], 800.0, 200, 200).unwrap();
    let images = vec![RgbImage::new(200, 200, [128, 128, 128])];
    let hidden = 4;
    let vis = VisibilityMask::from_fn(1, g.len(), |_, s| s != hidden);
    assign_colors(&mut g, &mesh, &images, &[cam], &vis).unwrap();
    let gray = g[0].color.unwrap();
    assert_eq!(gray.s, 0.0);
    assert_eq!(g[hidden].color, Some(gray));
}

#[test]
fn bias_offsets_the_export_along_normals() {
    let scene = small_scene(0.0);
    let frame = FrameInput {
        mesh: scene.truth.clone(),
        images: scene.images.clone(),
    };
    let params = RunParams {
        subdiv_levels: 0,
        ..RunParams::default()
    };
    let on = refine_frame(&frame, &scene.cameras, &params, &quick(), None, None).unwrap();
    let max_k = on.report.max_abs_k;
    assert!(max_k < 2.0, "consistent input drifted {max_k} mm");
    for g in &on.gaussians {
        let want = add(g.rest, scale(g.normal, g.k + 7.0));
        assert_eq!(on.mesh.vertices()[g.vertex], want);
    }

    let off = refine_frame(
        &frame,
        &scene.cameras,
        &RunParams {
            bias_compensation: false,
            ..params
        },
        &quick(),
        None,
        None,
    )
    .unwrap();
    assert_eq!(off.displacements(), on.displacements());
    for g in &off.gaussians {
        assert_eq!(off.mesh.vertices()[g.vertex], add(g.rest, scale(g.normal, g.k)));
    }
}

#[test]
fn refinement_raises_the_energy() {
    let scene = small_scene(10.0);
    let r = refine_frame(
        &scene.frame(),
        &scene.cameras,
        &RunParams::default(),
        &quick(),
        None,
        None,
    )
    .unwrap();
    assert!(r.report.final_energy > r.report.initial_energy);
    assert_eq!(r.energy_trace.len(), r.report.trace.len());
}

#[test]
fn single_frame_sequence_equals_refine_frame() {
    let scene = small_scene(10.0);
    let params = RunParams::default();
    let direct = refine_frame(&scene.frame(), &scene.cameras, &params, &quick(), None, None).unwrap();
    let mut frames = vec![scene.frame()];
    let mut seen = Vec::new();
    let reports = refine_sequence(&mut frames, &scene.cameras, &params, &quick(), 0, |t, r| {
        seen.push((t, r.displacements(), r.mesh.vertices().to_vec()));
        Ok(())
    })
    .unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(seen[0].1, direct.displacements());
    assert_eq!(seen[0].2, direct.mesh.vertices());
    assert_eq!(reports[0].iterations, direct.report.iterations);
}

#[test]
fn static_sequence_warm_starts_converge_faster() {
    let scene = small_scene(10.0);
    let mut frames = vec![scene.frame(), scene.frame(), scene.frame()];
    let config = SolverConfig::default();
    let reports = refine_sequence(
        &mut frames,
        &scene.cameras,
        &RunParams::default(),
        &config,
        0,
        |_, _| Ok(()),
    )
    .unwrap();
    let iters: Vec<usize> = reports.iter().map(|r| r.iterations).collect();
    assert!(iters[1] < iters[0] && iters[2] < iters[0], "{iters:?}");
}

#[test]
fn topology_change_names_the_frame() {
    let scene = small_scene(10.0);
    let other = Mesh::new(scene.coarse.vertices()[..3].to_vec(), vec![[0, 1, 2]]).unwrap();
    let mut frames = vec![
        scene.frame(),
        FrameInput {
            mesh: other,
            images: scene.images.clone(),
        },
    ];
    let e = refine_sequence(
        &mut frames,
        &scene.cameras,
        &RunParams::default(),
        &quick(),
        0,
        |_, _| Ok(()),
    )
    .unwrap_err();
    assert_eq!(e, PipelineError::Topology { frame: 1 });
}

#[test]
fn image_count_mismatch_is_rejected() {
    let scene = small_scene(10.0);
    let frame = FrameInput {
        mesh: scene.coarse.clone(),
        images: scene.images[..2].to_vec(),
    };
    let e = refine_frame(&frame, &scene.cameras, &RunParams::default(), &quick(), None, None).unwrap_err();
    assert!(
        matches!(
            e,
            PipelineError::ImageCount {
                images: 2,
                cameras: 4,
                ..
            }
        ),
        "{e}"
    );
}

#[test]
fn reference_out_of_range_is_rejected() {
    let scene = small_scene(10.0);
    let mut frames = vec![scene.frame()];
    let e = refine_sequence(
        &mut frames,
        &scene.cameras,
        &RunParams::default(),
        &quick(),
        3,
        |_, _| Ok(()),
    )
    .unwrap_err();
    assert_eq!(
        e,
        PipelineError::Reference {
            reference: 3,
            frames: 1
        }
    );
}
