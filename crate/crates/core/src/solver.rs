//! Conditioned gradient ascent over the displacement vector and the
//! per-frame / per-sequence refinement pipeline.
//!
//! Each displacement has its own step size. The step grows while the sign
//! of its derivative stays the same and shrinks when the sign flips; a
//! flip also skips that variable's move for the iteration. By default a
//! move is `step * gradient` capped at `step_max`; [`StepRule::Sign`] moves
//! by `step * sign(gradient)` instead. The best iterate seen is returned.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::camera::CameraSpec;
use crate::color::Hsv;
use crate::energy::{EnergyError, EnergyModel, EnergyParams, EnergyReport, NeighborGraph};
use crate::image::RgbImage;
use crate::math::{add, scale};
use crate::mesh::{compute_normals, subdivide, Mesh, MeshError};
use crate::quadtree::{decompose_image, ImageGaussian, QuadTreeParams};
use crate::surface::{assign_colors, build_surface_gaussians, SurfaceError, SurfaceGaussian, DEFAULT_SIGMA_HAT};
use crate::visibility::{compute_visibility, default_tolerance, VisibilityMask};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("non-finite energy at iteration {iteration}")]
    NonFiniteEnergy { iteration: usize },
    #[error("non-finite derivative for variable {variable} at iteration {iteration}")]
    NonFiniteGradient { iteration: usize, variable: usize },
    #[error("objective returned {got} derivatives for {expected} variables")]
    GradientLength { got: usize, expected: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Starting step per variable, mm.
    pub initial_step: f64,
    /// Step multiplier while the derivative sign is stable.
    pub grow: f64,
    /// Step multiplier on a sign flip.
    pub shrink: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub max_iters: usize,
    /// Relative energy change, over `convergence_window` iterations, below
    /// which the ascent stops.
    pub convergence_eps: f64,
    pub convergence_window: usize,
    /// Visibility is recomputed every this many iterations (0 = never).
    pub visibility_refresh: usize,
    pub rule: StepRule,
}

/// How a variable's step size turns into a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// `step * dE/dk`, capped at `step_max` mm.
    #[default]
    Scaled,
    /// `step * sign(dE/dk)`.
    Sign,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            initial_step: 0.1,
            grow: 1.2,
            shrink: 0.5,
            step_min: 1e-4,
            step_max: 5.0,
            max_iters: 200,
            convergence_eps: 1e-6,
            convergence_window: 5,
            visibility_refresh: 10,
            rule: StepRule::Scaled,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.shrink > 0.0 && self.shrink < 1.0 && self.grow > 1.0) {
            return Err(SolverError::InvalidConfig("need 0 < shrink < 1 < grow"));
        }
        if !(self.step_min > 0.0 && self.step_min <= self.step_max) {
            return Err(SolverError::InvalidConfig("need 0 < step_min <= step_max"));
        }
        if !(self.initial_step > 0.0) {
            return Err(SolverError::InvalidConfig("initial_step must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be >= 1"));
        }
        if self.convergence_window == 0 {
            return Err(SolverError::InvalidConfig("convergence_window must be >= 1"));
        }
        Ok(())
    }
}

/// Per-variable step sizes and last derivative signs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionerState {
    steps: Vec<f64>,
    signs: Vec<i8>,
}

impl ConditionerState {
    pub fn new(n: usize, config: &SolverConfig) -> Self {
        ConditionerState {
            steps: vec![config.initial_step.clamp(config.step_min, config.step_max); n],
            signs: vec![0; n],
        }
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Moves `k` one conditioned step along `gradient`.
    pub fn step(&mut self, k: &mut [f64], gradient: &[f64], config: &SolverConfig) {
        for (s, (ks, &g)) in k.iter_mut().zip(gradient).enumerate() {
            let sign: i8 = if g > 0.0 {
                1
            } else if g < 0.0 {
                -1
            } else {
                0
            };
            let agreement = self.signs[s] * sign;
            let mut moving = sign;
            if agreement > 0 {
                self.steps[s] = (self.steps[s] * config.grow).min(config.step_max);
            } else if agreement < 0 {
                self.steps[s] = (self.steps[s] * config.shrink).max(config.step_min);
                moving = 0;
            }
            if moving != 0 {
                *ks += match config.rule {
                    StepRule::Sign => self.steps[s] * moving as f64,
                    StepRule::Scaled => (self.steps[s] * g).clamp(-config.step_max, config.step_max),
                };
            }
            self.signs[s] = moving;
        }
    }
}

/// Something to maximize: value and derivatives at `k`.
pub trait Objective {
    /// `iteration` is 0 for the starting point and counts updates after it.
    fn evaluate(&mut self, iteration: usize, k: &[f64]) -> Result<(f64, Vec<f64>), SolverError>;
}

impl<F> Objective for F
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    fn evaluate(&mut self, _iteration: usize, k: &[f64]) -> Result<(f64, Vec<f64>), SolverError> {
        Ok(self(k))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RefinementReport {
    pub iterations: usize,
    pub initial_energy: f64,
    /// Energy of the returned iterate, the maximum of `trace`.
    pub final_energy: f64,
    /// Energy at the start and after every update.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub max_abs_k: f64,
    pub wall_seconds: f64,
}

/// Maximizes `objective` starting from `k`; on return `k` holds the best
/// iterate seen.
pub fn ascend<O: Objective + ?Sized>(
    objective: &mut O,
    k: &mut [f64],
    config: &SolverConfig,
) -> Result<RefinementReport, SolverError> {
    config.validate()?;
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();

    let n = k.len();
    let mut conditioner = ConditionerState::new(n, config);
    let (mut energy, mut grad) = checked(objective, 0, k)?;
    let mut trace = vec![energy];
    let mut best_energy = energy;
    let mut best_k = k.to_vec();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        conditioner.step(k, &grad, config);
        iterations += 1;
        (energy, grad) = checked(objective, iterations, k)?;
        trace.push(energy);
        if energy > best_energy {
            best_energy = energy;
            best_k.copy_from_slice(k);
        }
        if iterations >= config.convergence_window {
            let earlier = trace[iterations - config.convergence_window];
            let scale = energy.abs().max(earlier.abs());
            if (energy - earlier).abs() <= config.convergence_eps * scale {
                converged = true;
                break;
            }
        }
    }
    k.copy_from_slice(&best_k);

    #[cfg(feature = "std")]
    let wall_seconds = started.elapsed().as_secs_f64();
    #[cfg(not(feature = "std"))]
    let wall_seconds = 0.0;
    Ok(RefinementReport {
        iterations,
        initial_energy: trace[0],
        final_energy: best_energy,
        trace,
        converged,
        max_abs_k: k.iter().fold(0.0, |m, v| m.max(v.abs())),
        wall_seconds,
    })
}

fn checked<O: Objective + ?Sized>(
    objective: &mut O,
    iteration: usize,
    k: &[f64],
) -> Result<(f64, Vec<f64>), SolverError> {
    let (e, g) = objective.evaluate(iteration, k)?;
    if !e.is_finite() {
        return Err(SolverError::NonFiniteEnergy { iteration });
    }
    if g.len() != k.len() {
        return Err(SolverError::GradientLength {
            got: g.len(),
            expected: k.len(),
        });
    }
    if let Some(variable) = g.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::NonFiniteGradient { iteration, variable });
    }
    Ok((e, g))
}

/// Photo-consistency objective over the displacements of `gaussians`,
/// refreshing visibility on a fixed schedule.
pub struct PhotoObjective<'a> {
    model: &'a EnergyModel,
    mesh: &'a Mesh,
    gaussians: Vec<SurfaceGaussian>,
    visibility: VisibilityMask,
    refresh: usize,
    tolerance: f64,
    reports: Vec<EnergyReport>,
}

impl<'a> PhotoObjective<'a> {
    pub fn new(
        model: &'a EnergyModel,
        mesh: &'a Mesh,
        gaussians: Vec<SurfaceGaussian>,
        visibility: VisibilityMask,
        refresh: usize,
        tolerance: f64,
    ) -> Self {
        PhotoObjective {
            model,
            mesh,
            gaussians,
            visibility,
            refresh,
            tolerance,
            reports: Vec::new(),
        }
    }

    /// One report per evaluation, in order.
    pub fn reports(&self) -> &[EnergyReport] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<EnergyReport> {
        self.reports
    }

    pub fn gaussians(&self) -> &[SurfaceGaussian] {
        &self.gaussians
    }
}

impl Objective for PhotoObjective<'_> {
    fn evaluate(&mut self, iteration: usize, k: &[f64]) -> Result<(f64, Vec<f64>), SolverError> {
        for (g, &v) in self.gaussians.iter_mut().zip(k) {
            g.k = v;
        }
        if iteration > 0 && self.refresh > 0 && iteration.is_multiple_of(self.refresh) {
            self.visibility = compute_visibility(self.mesh, &self.gaussians, self.model.cameras(), self.tolerance);
        }
        let eval = self.model.evaluate(&self.gaussians, &self.visibility)?;
        let grad = self.model.gradient(&self.gaussians, &eval)?;
        let e = eval.report.total;
        self.reports.push(eval.report);
        Ok((e, grad))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("frame {frame}: mesh topology differs from the reference frame")]
    Topology { frame: usize },
    #[error("frame {frame}: {images} images for {cameras} cameras")]
    ImageCount {
        frame: usize,
        images: usize,
        cameras: usize,
    },
    #[error("reference frame {reference} out of range for {frames} frames")]
    Reference { reference: usize, frames: usize },
    #[error("frame {frame}: {message}")]
    Source { frame: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
}

/// Pipeline settings besides the energy and the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub energy: EnergyParams,
    pub quadtree: QuadTreeParams,
    /// Surface Gaussian extent, mm.
    pub sigma_hat: f64,
    pub subdiv_levels: u32,
    /// Export `rest + N (k + sigma_hat)` instead of `rest + N k`.
    pub bias_compensation: bool,
    /// Depth-buffer slack for visibility, mm; `None` means `2 sigma_hat`.
    pub visibility_tolerance: Option<f64>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            energy: EnergyParams::default(),
            quadtree: QuadTreeParams::default(),
            sigma_hat: DEFAULT_SIGMA_HAT,
            subdiv_levels: 1,
            bias_compensation: true,
            visibility_tolerance: None,
        }
    }
}

impl RunParams {
    pub fn tolerance(&self) -> f64 {
        self.visibility_tolerance
            .unwrap_or_else(|| default_tolerance(self.sigma_hat))
    }

    pub fn bias(&self) -> f64 {
        if self.bias_compensation {
            self.sigma_hat
        } else {
            0.0
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        self.energy.validate()?;
        if !(self.sigma_hat > 0.0) {
            return Err(PipelineError::InvalidParam("sigma_hat must be > 0"));
        }
        if !(self.quadtree.split_threshold >= 0.0) {
            return Err(PipelineError::InvalidParam("split_threshold must be >= 0"));
        }
        Ok(())
    }
}

/// One frame: coarse mesh plus one image per camera.
#[derive(Debug, Clone)]
pub struct FrameInput {
    pub mesh: Mesh,
    pub images: Vec<RgbImage>,
}

#[derive(Debug, Clone)]
pub struct FrameResult {
    /// Subdivided mesh with refined (and possibly bias-compensated) vertices.
    pub mesh: Mesh,
    /// Subdivided input mesh before refinement.
    pub base: Mesh,
    /// Refined surface Gaussians (`k` excludes the export bias).
    pub gaussians: Vec<SurfaceGaussian>,
    pub report: RefinementReport,
    /// Energy report of every evaluation.
    pub energy_trace: Vec<EnergyReport>,
}

impl FrameResult {
    pub fn displacements(&self) -> Vec<f64> {
        self.gaussians.iter().map(|g| g.k).collect()
    }

    pub fn colors(&self) -> Vec<Option<Hsv>> {
        self.gaussians.iter().map(|g| g.color).collect()
    }
}

/// Subdivided mesh and its Gaussians at rest.
pub fn prepare_surface(mesh: &Mesh, params: &RunParams) -> Result<(Mesh, Vec<SurfaceGaussian>), PipelineError> {
    let sub = subdivide(mesh, params.subdiv_levels);
    let normals = compute_normals(&sub)?;
    let gaussians = build_surface_gaussians(&sub, &normals, params.sigma_hat);
    Ok((sub, gaussians))
}

/// Colors for the Gaussians of `frame` at rest, from its own images.
pub fn reference_colors(
    frame: &FrameInput,
    cams: &[CameraSpec],
    params: &RunParams,
) -> Result<Vec<Option<Hsv>>, PipelineError> {
    params.validate()?;
    let (sub, mut gaussians) = prepare_surface(&frame.mesh, params)?;
    let vis = compute_visibility(&sub, &gaussians, cams, params.tolerance());
    assign_colors(&mut gaussians, &sub, &frame.images, cams, &vis)?;
    Ok(gaussians.iter().map(|g| g.color).collect())
}

/// Image Gaussians for every camera of a frame.
pub fn decompose_frame(images: &[RgbImage], params: &QuadTreeParams) -> Vec<Vec<ImageGaussian>> {
    crate::par::map_range(images.len(), |c| decompose_image(&images[c], params, c))
}

/// Refines one frame. `colors` come from the reference frame (computed from
/// this frame when `None`); `initial_k` warm-starts the displacements.
pub fn refine_frame(
    frame: &FrameInput,
    cams: &[CameraSpec],
    params: &RunParams,
    config: &SolverConfig,
    colors: Option<&[Option<Hsv>]>,
    initial_k: Option<&[f64]>,
) -> Result<FrameResult, PipelineError> {
    params.validate()?;
    config.validate()?;
    if frame.images.len() != cams.len() {
        return Err(PipelineError::ImageCount {
            frame: 0,
            images: frame.images.len(),
            cameras: cams.len(),
        });
    }
    let (sub, mut gaussians) = prepare_surface(&frame.mesh, params)?;
    let tolerance = params.tolerance();
    match colors {
        Some(c) if c.len() == gaussians.len() => {
            for (g, &col) in gaussians.iter_mut().zip(c) {
                g.color = col;
            }
        }
        Some(_) => return Err(PipelineError::Topology { frame: 0 }),
        None => {
            let vis = compute_visibility(&sub, &gaussians, cams, tolerance);
            assign_colors(&mut gaussians, &sub, &frame.images, cams, &vis)?;
        }
    }
    let mut k = vec![0.0; gaussians.len()];
    if let Some(init) = initial_k {
        if init.len() != k.len() {
            return Err(PipelineError::Topology { frame: 0 });
        }
        k.copy_from_slice(init);
        for (g, &v) in gaussians.iter_mut().zip(init) {
            g.k = v;
        }
    }
    let graph = NeighborGraph::from_mesh(&sub, &gaussians, params.energy.delta_geo);
    let model = EnergyModel::new(
        cams.to_vec(),
        decompose_frame(&frame.images, &params.quadtree),
        graph,
        params.energy,
    )?;
    let visibility = compute_visibility(&sub, &gaussians, cams, tolerance);
    let mut objective = PhotoObjective::new(
        &model,
        &sub,
        gaussians.clone(),
        visibility,
        config.visibility_refresh,
        tolerance,
    );
    let report = ascend(&mut objective, &mut k, config)?;
    let energy_trace = objective.into_reports();
    for (g, &v) in gaussians.iter_mut().zip(&k) {
        g.k = v;
    }
    let mesh = export_mesh(&sub, &gaussians, params.bias())?;
    Ok(FrameResult {
        mesh,
        base: sub,
        gaussians,
        report,
        energy_trace,
    })
}

/// `rest + N (k + bias)` for every Gaussian's vertex; other vertices unchanged.
pub fn export_mesh(base: &Mesh, gaussians: &[SurfaceGaussian], bias: f64) -> Result<Mesh, MeshError> {
    let mut vertices = base.vertices().to_vec();
    for g in gaussians {
        vertices[g.vertex] = add(g.rest, scale(g.normal, g.k + bias));
    }
    base.with_vertices(vertices)
}

/// Random access to the frames of a sequence.
pub trait FrameSource {
    fn frame_count(&self) -> usize;
    fn load(&mut self, frame: usize) -> Result<FrameInput, PipelineError>;
}

impl FrameSource for [FrameInput] {
    fn frame_count(&self) -> usize {
        self.len()
    }

    fn load(&mut self, frame: usize) -> Result<FrameInput, PipelineError> {
        self.get(frame).cloned().ok_or(PipelineError::Source {
            frame,
            message: String::from("no such frame"),
        })
    }
}

impl FrameSource for Vec<FrameInput> {
    fn frame_count(&self) -> usize {
        self.len()
    }

    fn load(&mut self, frame: usize) -> Result<FrameInput, PipelineError> {
        self.as_mut_slice().load(frame)
    }
}

/// Refines every frame in order, warm-starting each from the previous
/// solution and coloring once from `reference`. Results are handed to
/// `sink` as they are produced.
pub fn refine_sequence<S, F>(
    source: &mut S,
    cams: &[CameraSpec],
    params: &RunParams,
    config: &SolverConfig,
    reference: usize,
    mut sink: F,
) -> Result<Vec<RefinementReport>, PipelineError>
where
    S: FrameSource + ?Sized,
    F: FnMut(usize, &FrameResult) -> Result<(), PipelineError>,
{
    let frames = source.frame_count();
    if reference >= frames {
        return Err(PipelineError::Reference { reference, frames });
    }
    let reference_frame = source.load(reference)?;
    check_images(&reference_frame, reference, cams.len())?;
    let colors = reference_colors(&reference_frame, cams, params)?;
    let mut previous: Option<Vec<f64>> = None;
    let mut reports = Vec::with_capacity(frames);
    for t in 0..frames {
        let frame = if t == reference {
            reference_frame.clone()
        } else {
            source.load(t)?
        };
        if !frame.mesh.same_topology(&reference_frame.mesh)
            || frame.mesh.refinable() != reference_frame.mesh.refinable()
        {
            return Err(PipelineError::Topology { frame: t });
        }
        check_images(&frame, t, cams.len())?;
        let result =
            refine_frame(&frame, cams, params, config, Some(&colors), previous.as_deref()).map_err(|e| match e {
                PipelineError::Topology { .. } => PipelineError::Topology { frame: t },
                other => other,
            })?;
        previous = Some(result.displacements());
        reports.push(result.report.clone());
        sink(t, &result)?;
    }
    Ok(reports)
}

fn check_images(frame: &FrameInput, t: usize, cameras: usize) -> Result<(), PipelineError> {
    if frame.images.len() != cameras || cameras == 0 {
        return Err(PipelineError::ImageCount {
            frame: t,
            images: frame.images.len(),
            cameras,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_converges_to_its_maximum() {
        let mut f = |k: &[f64]| (-(k[0] - 3.0) * (k[0] - 3.0), vec![-2.0 * (k[0] - 3.0)]);
        let mut k = [0.0];
        let r = ascend(&mut f, &mut k, &SolverConfig::default()).unwrap();
        assert!((k[0] - 3.0).abs() <= 1e-3, "k = {}", k[0]);
        assert!(r.iterations <= 200);
        assert_eq!(r.final_energy, r.trace.iter().cloned().fold(f64::MIN, f64::max));
        assert!(r.final_energy >= r.initial_energy);
    }

    #[test]
    fn stationary_start_does_not_move() {
        let mut f = |k: &[f64]| (1.5, vec![0.0; k.len()]);
        let mut k = [0.25, -1.0];
        let r = ascend(&mut f, &mut k, &SolverConfig::default()).unwrap();
        assert_eq!(k, [0.25, -1.0]);
        assert!(r.converged);
        assert_eq!(r.iterations, 5);
        assert_eq!(r.final_energy, r.initial_energy);
    }

    #[test]
    fn warm_start_at_optimum_stays_within_step_min() {
        let mut f = |k: &[f64]| {
            let e: f64 = k.iter().map(|v| -(v - 1.0) * (v - 1.0)).sum();
            (e, k.iter().map(|v| -2.0 * (v - 1.0)).collect())
        };
        let mut k = [0.0, 5.0, -2.0];
        ascend(&mut f, &mut k, &SolverConfig::default()).unwrap();
        let solved = k;
        let one = SolverConfig {
            max_iters: 1,
            ..SolverConfig::default()
        };
        ascend(&mut f, &mut k, &one).unwrap();
        for (a, b) in k.iter().zip(&solved) {
            assert!((a - b).abs() <= one.step_min);
        }
    }

    #[test]
    fn steps_stay_in_bounds() {
        let config = SolverConfig::default();
        let mut c = ConditionerState::new(2, &config);
        let mut k = [0.0, 0.0];
        for i in 0..200 {
            let g = if i % 2 == 0 { [1.0, 1.0] } else { [-1.0, 1.0] };
            c.step(&mut k, &g, &config);
            assert!(c.steps().iter().all(|&s| s >= config.step_min && s <= config.step_max));
        }
        assert_eq!(c.steps()[1], config.step_max);
        assert_eq!(c.steps()[0], config.step_min);
    }

    #[test]
    fn non_finite_gradient_names_variable() {
        let mut f = |_: &[f64]| (0.0, vec![0.0, f64::NAN, 1.0]);
        let mut k = [0.0; 3];
        assert_eq!(
            ascend(&mut f, &mut k, &SolverConfig::default()),
            Err(SolverError::NonFiniteGradient {
                iteration: 0,
                variable: 1
            })
        );
        let mut g = |_: &[f64]| (f64::INFINITY, vec![0.0]);
        assert_eq!(
            ascend(&mut g, &mut [0.0], &SolverConfig::default()),
            Err(SolverError::NonFiniteEnergy { iteration: 0 })
        );
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            shrink: 1.5,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            step_min: 2.0,
            step_max: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
