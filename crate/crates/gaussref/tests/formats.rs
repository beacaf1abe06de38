use gaussref::calib::{load_cameras, save_cameras, NamedCamera};
use gaussref::imageio::{load_image, save_png};
use gaussref::manifest::{Manifest, ManifestFrame, ManifestSource};
use gaussref::obj::{load_mesh, save_mesh};
use gaussref::Error;
use gaussref_core::mesh::{compute_normals, Mesh};
use gaussref_core::solver::FrameSource;
use gaussref_core::surface::build_surface_gaussians;
use gaussref_core::synth::{camera_ring, make_scene, plane_grid, render_textured, SceneConfig};

fn grid(nx: usize, ny: usize) -> Mesh {
    let mut v = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            v.push([i as f64, j as f64, 0.25 * ((i * j) % 3) as f64]);
        }
    }
    let mut f = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            f.push([a, a + 1, a + nx + 1]);
            f.push([a, a + nx + 1, a + nx]);
        }
    }
    Mesh::new(v, f).unwrap()
}

#[test]
fn large_mesh_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.obj");
    let m = grid(43, 71);
    assert_eq!(m.vertex_count(), 3053);
    save_mesh(&m, &path).unwrap();
    let back = load_mesh(&path).unwrap();
    assert_eq!(back.vertex_count(), 3053);
    assert_eq!(back.vertices(), m.vertices());
    assert_eq!(back.faces(), m.faces());
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec![std::ffi::OsString::from("big.obj")]);
}

#[test]
fn mask_selects_gaussians() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("mask.txt");
    let indices: String = (0..3053).map(|i| format!("{i}\n")).collect();
    std::fs::write(&mask, format!("# region\n{indices}")).unwrap();
    let m = gaussref::obj::apply_mask(grid(60, 60), &gaussref::obj::load_mask(&mask).unwrap(), &mask).unwrap();
    let normals = compute_normals(&m).unwrap();
    assert_eq!(build_surface_gaussians(&m, &normals, 7.0).len(), 3053);
}

#[test]
fn eight_camera_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cams.txt");
    let cams: Vec<NamedCamera> = camera_ring(&SceneConfig::plane_wave())
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(i, spec)| NamedCamera {
            id: format!("c{i}"),
            spec,
        })
        .collect();
    save_cameras(&cams, &path).unwrap();
    let back = load_cameras(&path).unwrap();
    assert_eq!(back.len(), 8);
    assert_eq!(back, cams);
}

#[test]
fn rendered_png_keeps_its_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("view.png");
    let cfg = SceneConfig {
        width: 1004,
        height: 1004,
        cameras: 2,
        ..SceneConfig::plane_wave()
    };
    let cams = camera_ring(&cfg).unwrap();
    let mesh = plane_grid(400.0, 8).unwrap();
    let img = render_textured(
        mesh.vertices(),
        mesh.vertices(),
        mesh.faces(),
        &cfg.texture,
        &cams[0],
        [0, 0, 0],
    );
    save_png(&img, &path).unwrap();
    let back = load_image(&path).unwrap();
    assert_eq!((back.width(), back.height()), (1004, 1004));
    assert_eq!(back, img);
}

#[test]
fn ppm_and_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("tiny.ppm");
    std::fs::write(&ppm, b"P3 2 2 255  1 2 3  4 5 6  7 8 9  250 251 252\n").unwrap();
    let img = load_image(&ppm).unwrap();
    assert_eq!(img.pixels(), &[[1, 2, 3], [4, 5, 6], [7, 8, 9], [250, 251, 252]]);
    let empty = dir.path().join("empty.png");
    std::fs::write(&empty, b"").unwrap();
    assert!(matches!(load_image(&empty), Err(Error::Truncated { .. })));
}

#[test]
fn manifest_source_loads_frames_with_the_mask() {
    let dir = tempfile::tempdir().unwrap();
    let scene = make_scene(&SceneConfig {
        width: 64,
        height: 64,
        focal: 120.0,
        cameras: 2,
        resolution: 3,
        ..SceneConfig::plane_wave()
    })
    .unwrap();
    let mesh = dir.path().join("m.obj");
    save_mesh(&scene.coarse, &mesh).unwrap();
    let mut images = Vec::new();
    for (c, img) in scene.images.iter().enumerate() {
        let p = dir.path().join(format!("v{c}.png"));
        save_png(img, &p).unwrap();
        images.push(p);
    }
    let mask = dir.path().join("mask.txt");
    std::fs::write(&mask, "0\n5\n").unwrap();
    let manifest = Manifest {
        cameras: dir.path().join("cams.txt"),
        reference: 1,
        mask: Some(mask),
        frames: vec![
            ManifestFrame {
                mesh: mesh.clone(),
                images: images.clone(),
            },
            ManifestFrame { mesh, images },
        ],
    };
    let path = dir.path().join("seq.txt");
    manifest.save(&path).unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .contains("frame m.obj v0.png v1.png"));
    let back = Manifest::load(&path).unwrap();
    assert_eq!(back, manifest);

    let mut source = ManifestSource::new(&back, None).unwrap();
    assert_eq!(source.frame_count(), 2);
    let frame = source.load(1).unwrap();
    assert_eq!(frame.images, scene.images);
    assert_eq!(frame.mesh.refinable().iter().filter(|&&r| r).count(), 2);
    assert!(source.load(2).is_err());
}
