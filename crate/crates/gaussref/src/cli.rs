//! The `gaussref` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussref_core::camera::CameraSpec;
use gaussref_core::checks::{self, CheckOutcome};
use gaussref_core::energy::EnergyParams;
use gaussref_core::mesh::{compute_normals, subdivide};
use gaussref_core::solver::{
    decompose_frame, prepare_surface, refine_frame, refine_sequence, FrameInput, PipelineError, RunParams,
};
use gaussref_core::surface::assign_colors;
use gaussref_core::synth::{self, make_scene, reprojection_error, vertex_colors, SceneConfig, TextureKind};
use gaussref_core::visibility::compute_visibility;

use crate::calib::{load_cameras, save_cameras, NamedCamera};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::imageio::{load_image, save_png};
use crate::manifest::{load_frame, Manifest, ManifestFrame, ManifestSource};
use crate::obj::{apply_mask, load_mask, load_mesh, save_mesh};
use crate::tables::{
    read_displacements, write_displacements, write_energy_dump, write_eval, write_image_gaussians, write_report,
    ReportRow,
};

#[derive(Debug, Parser)]
#[command(
    name = "gaussref",
    version,
    about = "Photo-consistent mesh refinement with surface and image Gaussians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split images into color-coherent patches and list their Gaussians.
    Decompose(DecomposeArgs),
    /// Refine one mesh against one image per camera.
    Refine(RefineArgs),
    /// Refine every frame of a sequence manifest.
    RefineSeq(RefineSeqArgs),
    /// Write a synthetic scene with known displacements.
    Synth(SynthArgs),
    /// Score a refined mesh against the images of a scene.
    Eval(EvalArgs),
    /// Run the verification suites.
    Check(CheckArgs),
}

#[derive(Debug, Args, Default)]
pub struct Tuning {
    /// key = value configuration file; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Smoothness weight.
    #[arg(long, value_name = "W")]
    pub wreg: Option<f64>,
    /// Surface Gaussian standard deviation, mm.
    #[arg(long, value_name = "MM")]
    pub sigma_hat: Option<f64>,
    /// Subdivision levels applied to the input mesh.
    #[arg(long, value_name = "N")]
    pub subdiv: Option<u32>,
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,
    /// Export the optimized displacements without the sigma_hat offset.
    #[arg(long)]
    pub no_bias: bool,
    /// Vertex indices allowed to move, one per line.
    #[arg(long, value_name = "FILE")]
    pub mask: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

impl Tuning {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.wreg {
            cfg.params.energy.w_reg = v;
        }
        if let Some(v) = self.sigma_hat {
            cfg.params.sigma_hat = v;
        }
        if let Some(v) = self.subdiv {
            cfg.params.subdiv_levels = v;
        }
        if let Some(v) = self.max_iters {
            cfg.solver.max_iters = v;
        }
        if self.no_bias {
            cfg.params.bias_compensation = false;
        }
        if let Some(m) = &self.mask {
            cfg.mask = Some(m.clone());
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct Outputs {
    /// Per-iteration energy CSV.
    #[arg(long, value_name = "CSV")]
    pub energy_dump: Option<PathBuf>,
    /// Per-frame report CSV.
    #[arg(long, value_name = "CSV")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Images, one per camera, in camera order.
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[arg(long, short, value_name = "CSV")]
    pub out: PathBuf,
    #[arg(long, value_name = "N")]
    pub depth: Option<u32>,
    /// Largest RGB standard deviation of a leaf patch.
    #[arg(long, value_name = "T")]
    pub threshold: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[arg(long, value_name = "OBJ")]
    pub mesh: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub cameras: PathBuf,
    /// Images, one per camera, in camera file order.
    #[arg(long, num_args = 1.., required = true, value_name = "IMG")]
    pub images: Vec<PathBuf>,
    /// Refined mesh.
    #[arg(long, short, value_name = "OBJ")]
    pub out: PathBuf,
    /// Displacement CSV.
    #[arg(long, value_name = "CSV")]
    pub k_out: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Args)]
pub struct RefineSeqArgs {
    #[arg(long, value_name = "FILE")]
    pub manifest: PathBuf,
    /// Directory for refined meshes and displacement CSVs.
    #[arg(long, short, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Overrides the manifest's reference frame.
    #[arg(long, value_name = "T")]
    pub reference: Option<usize>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    PlaneWave,
    SphereBumps,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TextureChoice {
    Cells,
    Noise,
    Plain,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "plane-wave")]
    pub kind: Kind,
    #[arg(long, default_value_t = 8)]
    pub cams: usize,
    #[arg(long, short, value_name = "DIR")]
    pub out: PathBuf,
    /// Frames listed in the manifest (all show the same static scene).
    #[arg(long, default_value_t = 1)]
    pub frames: usize,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    /// Displacement amplitude, mm.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Plane: coarse grid cells per side. Sphere: icosphere levels.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Levels between the coarse mesh and the ground-truth surface.
    #[arg(long)]
    pub subdiv: Option<u32>,
    #[arg(long, value_enum, default_value = "cells")]
    pub texture: TextureChoice,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Refined mesh.
    #[arg(long, value_name = "OBJ")]
    pub mesh: PathBuf,
    /// Scene manifest supplying cameras, images and the input mesh.
    #[arg(long, value_name = "FILE")]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Ground-truth displacements of the subdivided input mesh.
    #[arg(long, value_name = "CSV")]
    pub k_true: Option<PathBuf>,
    #[arg(long, short, value_name = "CSV")]
    pub out: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Overlap,
    Gradient,
    Regularizer,
    Clamp,
    Visibility,
    Recovery,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Run a tenth of the randomized cases.
    #[arg(long)]
    pub quick: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Decompose(a) => decompose(a),
        Command::Refine(a) => refine(a),
        Command::RefineSeq(a) => refine_seq(a),
        Command::Synth(a) => synth_scene(a),
        Command::Eval(a) => eval(a),
        Command::Check(a) => check(a),
    }
}

fn init_threads(threads: usize) {
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

fn specs(cameras: &[NamedCamera]) -> Vec<CameraSpec> {
    cameras.iter().map(|c| c.spec.clone()).collect()
}

fn decompose(a: DecomposeArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = a.depth {
        cfg.params.quadtree.max_depth = d;
    }
    if let Some(t) = a.threshold {
        cfg.params.quadtree.split_threshold = t;
    }
    init_threads(cfg.threads);
    let images = a.images.iter().map(|p| load_image(p)).collect::<Result<Vec<_>>>()?;
    let all: Vec<_> = decompose_frame(&images, &cfg.params.quadtree)
        .into_iter()
        .flatten()
        .collect();
    write_image_gaussians(&a.out, &all)
}

fn check_counts(images: usize, cameras: usize) -> Result<()> {
    if images != cameras {
        return Err(Error::Pipeline(PipelineError::ImageCount {
            frame: 0,
            images,
            cameras,
        }));
    }
    Ok(())
}

fn displacement_rows(result: &gaussref_core::solver::FrameResult) -> Vec<(usize, f64)> {
    result.gaussians.iter().map(|g| (g.vertex, g.k)).collect()
}

fn refine(a: RefineArgs) -> Result<()> {
    let cfg = a.tuning.resolve()?;
    init_threads(cfg.threads);
    let cameras = load_cameras(&a.cameras)?;
    check_counts(a.images.len(), cameras.len())?;
    let mut mesh = load_mesh(&a.mesh)?;
    if let Some(m) = &cfg.mask {
        mesh = apply_mask(mesh, &load_mask(m)?, m)?;
    }
    let images = a.images.iter().map(|p| load_image(p)).collect::<Result<Vec<_>>>()?;
    let frame = FrameInput { mesh, images };
    let result = refine_frame(&frame, &specs(&cameras), &cfg.params, &cfg.solver, None, None)?;
    save_mesh(&result.mesh, &a.out)?;
    if let Some(p) = &a.k_out {
        write_displacements(p, &displacement_rows(&result))?;
    }
    if let Some(p) = &a.outputs.energy_dump {
        write_energy_dump(p, &[(0, result.energy_trace.clone())])?;
    }
    if let Some(p) = &a.outputs.report {
        write_report(
            p,
            &cfg.header(),
            &[ReportRow {
                frame: 0,
                report: result.report.clone(),
            }],
        )?;
    }
    Ok(())
}

/// File names of a sequence output directory.
pub fn frame_mesh_name(t: usize) -> String {
    format!("frame{t:03}.obj")
}

pub fn frame_k_name(t: usize) -> String {
    format!("frame{t:03}_k.csv")
}

fn refine_seq(a: RefineSeqArgs) -> Result<()> {
    let mut cfg = a.tuning.resolve()?;
    if a.reference.is_some() {
        cfg.reference = a.reference;
    }
    init_threads(cfg.threads);
    let manifest = Manifest::load(&a.manifest)?;
    let cameras = load_cameras(&manifest.cameras)?;
    check_counts(manifest.camera_count(), cameras.len())?;
    let reference = cfg.reference.unwrap_or(manifest.reference);
    // record the frame actually used so the header reproduces the run
    cfg.reference = Some(reference);
    let mut source = ManifestSource::new(&manifest, cfg.mask.as_deref())?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let report_path = a.outputs.report.clone().unwrap_or_else(|| a.out_dir.join("report.csv"));
    let header = cfg.header();
    let mut rows: Vec<ReportRow> = Vec::new();
    let mut traces = Vec::new();
    let mut io_error: Option<Error> = None;
    let outcome = refine_sequence(
        &mut source,
        &specs(&cameras),
        &cfg.params,
        &cfg.solver,
        reference,
        |t, result| {
            let written = save_mesh(&result.mesh, &a.out_dir.join(frame_mesh_name(t)))
                .and_then(|_| write_displacements(&a.out_dir.join(frame_k_name(t)), &displacement_rows(result)))
                .and_then(|_| {
                    rows.push(ReportRow {
                        frame: t,
                        report: result.report.clone(),
                    });
                    write_report(&report_path, &header, &rows)
                });
            if a.outputs.energy_dump.is_some() {
                traces.push((t, result.energy_trace.clone()));
            }
            written.map_err(|e| {
                let message = e.to_string();
                io_error = Some(e);
                PipelineError::Source { frame: t, message }
            })
        },
    );
    if let Err(e) = outcome {
        return Err(io_error.or_else(|| source.take_error()).unwrap_or(Error::Pipeline(e)));
    }
    if let Some(p) = &a.outputs.energy_dump {
        write_energy_dump(p, &traces)?;
    }
    Ok(())
}

fn synth_scene(a: SynthArgs) -> Result<()> {
    let mut sc = match a.kind {
        Kind::PlaneWave => SceneConfig::plane_wave(),
        Kind::SphereBumps => SceneConfig::sphere_bumps(),
    };
    sc.cameras = a.cams;
    if let Some(w) = a.width {
        sc.width = w;
    }
    if let Some(h) = a.height {
        sc.height = h;
    }
    if let Some(v) = a.amplitude {
        sc.amplitude = v;
    }
    if let Some(r) = a.resolution {
        sc.resolution = r;
    }
    if let Some(s) = a.subdiv {
        sc.subdiv_levels = s;
    }
    if let Some(s) = a.seed {
        sc.texture.seed = s;
    }
    sc.texture.kind = match a.texture {
        TextureChoice::Cells => TextureKind::Cells { cell: 25.0 },
        TextureChoice::Noise => TextureKind::Noise { scale: 20.0 },
        TextureChoice::Plain => TextureKind::Plain([180, 120, 60]),
    };
    if a.frames == 0 {
        return Err(Error::Config("--frames must be at least 1".into()));
    }
    let scene = make_scene(&sc)?;
    let dir = &a.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cameras: Vec<NamedCamera> = scene
        .cameras
        .iter()
        .enumerate()
        .map(|(c, spec)| NamedCamera {
            id: format!("cam{c:02}"),
            spec: spec.clone(),
        })
        .collect();
    save_cameras(&cameras, &dir.join("cameras.txt"))?;
    save_mesh(&scene.coarse, &dir.join("coarse.obj"))?;
    save_mesh(&scene.truth, &dir.join("truth.obj"))?;
    let k_true: Vec<(usize, f64)> = scene.k_true.iter().copied().enumerate().collect();
    write_displacements(&dir.join("k_true.csv"), &k_true)?;
    let mut image_paths = Vec::with_capacity(scene.images.len());
    for (c, img) in scene.images.iter().enumerate() {
        let p = dir.join(format!("cam{c:02}.png"));
        save_png(img, &p)?;
        image_paths.push(p);
    }
    let manifest = Manifest {
        cameras: dir.join("cameras.txt"),
        reference: 0,
        mask: None,
        frames: (0..a.frames)
            .map(|_| ManifestFrame {
                mesh: dir.join("coarse.obj"),
                images: image_paths.clone(),
            })
            .collect(),
    };
    manifest.save(&dir.join("manifest.txt"))
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = a.tuning.resolve()?;
    init_threads(cfg.threads);
    let manifest = Manifest::load(&a.manifest)?;
    let cameras = specs(&load_cameras(&manifest.cameras)?);
    let frame = manifest.frames.get(a.frame).ok_or_else(|| {
        Error::Config(format!(
            "frame {} out of range for {} frames",
            a.frame,
            manifest.frames.len()
        ))
    })?;
    check_counts(frame.images.len(), cameras.len())?;
    let mask = match cfg.mask.as_deref().or(manifest.mask.as_deref()) {
        Some(p) => Some((p.to_path_buf(), load_mask(p)?)),
        None => None,
    };
    let input = load_frame(frame, mask.as_ref())?;
    let refined = load_mesh(&a.mesh)?;
    let per_vertex = RunParams {
        subdiv_levels: 0,
        ..cfg.params
    };
    let (surface, mut gaussians) = prepare_surface(&refined, &per_vertex)?;
    let vis = compute_visibility(&surface, &gaussians, &cameras, cfg.params.tolerance());
    assign_colors(&mut gaussians, &surface, &input.images, &cameras, &vis).map_err(PipelineError::from)?;
    let colors = vertex_colors(surface.vertex_count(), &gaussians);
    let metric = reprojection_error(&surface, &colors, &input.images, &cameras, cfg.params.energy.hue_metric);
    let k_rmse = match &a.k_true {
        Some(p) => Some(displacement_rmse(&input, &refined, &cfg.params, p)?),
        None => None,
    };
    write_eval(&a.out, &metric.per_camera, metric.overall, k_rmse)
}

/// RMS difference between the displacement the refined mesh applies to the
/// subdivided input (minus the exported offset) and ground truth, over the
/// refinable vertices.
fn displacement_rmse(
    input: &FrameInput,
    refined: &gaussref_core::mesh::Mesh,
    params: &RunParams,
    k_true_path: &Path,
) -> Result<f64> {
    let base = subdivide(&input.mesh, params.subdiv_levels);
    if !base.same_topology(refined) {
        return Err(Error::Config(format!(
            "refined mesh has {} vertices, the input subdivided {} times has {}",
            refined.vertex_count(),
            params.subdiv_levels,
            base.vertex_count()
        )));
    }
    let normals = compute_normals(&base).map_err(PipelineError::from)?;
    let mut truth = vec![None; base.vertex_count()];
    for (v, k) in read_displacements(k_true_path)? {
        if let Some(slot) = truth.get_mut(v) {
            *slot = Some(k);
        }
    }
    let bias = params.bias();
    let pairs = (0..base.vertex_count())
        .filter(|&v| base.refinable()[v])
        .filter_map(|v| {
            let d = gaussref_core::math::sub(refined.vertices()[v], base.vertices()[v]);
            truth[v].map(|t| (gaussref_core::math::dot(d, normals[v]) - bias, t))
        });
    Ok(synth::rmse(pairs))
}

fn print_outcome(o: &CheckOutcome) {
    println!(
        "{} {}: worst {:.3e} (tolerance {:.1e}) over {} cases; {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.name,
        o.worst,
        o.tolerance,
        o.cases,
        o.detail
    );
}

fn check(a: CheckArgs) -> Result<()> {
    let scale = |n: usize| if a.quick { (n / 10).max(1) } else { n };
    let want = |s: Suite| a.suite == Suite::All || a.suite == s;
    let mut outcomes = Vec::new();
    if want(Suite::Overlap) {
        outcomes.push(checks::check_overlap(scale(1000), a.seed, &EnergyParams::default()));
    }
    if want(Suite::Gradient) {
        outcomes.push(checks::check_gradient(scale(100), a.seed, 1e-4));
    }
    if want(Suite::Regularizer) {
        outcomes.push(checks::check_regularizer(scale(50), a.seed));
    }
    if want(Suite::Clamp) {
        outcomes.push(checks::check_occlusion_clamp(a.seed));
    }
    if want(Suite::Visibility) {
        outcomes.push(checks::check_visibility(scale(20), a.seed));
    }
    outcomes.iter().for_each(print_outcome);
    let mut failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if want(Suite::Recovery) {
        let (scene, params, solver) = checks::recovery_settings();
        let r = checks::run_recovery(&scene, &params, &solver).map_err(|e| Error::Check(e.to_string()))?;
        let passed = r.reduction >= 0.6 && r.reprojection_after < r.reprojection_before;
        println!(
            "{} recovery: RMSE {:.3} -> {:.3} mm ({:.1}% reduction), reprojection {:.4} -> {:.4}, {} iterations",
            if passed { "PASS" } else { "FAIL" },
            r.input_rmse,
            r.output_rmse,
            100.0 * r.reduction,
            r.reprojection_before,
            r.reprojection_after,
            r.report.iterations
        );
        if !passed {
            failed.push("recovery");
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Check(format!("failed: {}", failed.join(", "))))
    }
}
