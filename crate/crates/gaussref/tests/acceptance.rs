//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
//! binding criterion fails.

use std::time::{Duration, Instant};

use gaussref::tables::write_displacements;
use gaussref_core::checks::{self, CheckOutcome};
use gaussref_core::energy::{EnergyModel, EnergyParams, NeighborGraph, OverlapForm};
use gaussref_core::solver::{decompose_frame, prepare_surface, reference_colors, RunParams};
use gaussref_core::synth::{make_scene, SceneConfig};
use gaussref_core::visibility::compute_visibility;

const SEED: u64 = 20_240_601;

const OVERLAP_CASES: usize = 1000;
const OVERLAP_BUDGET: Duration = Duration::from_secs(60);
const GRADIENT_SCENES: usize = 100;
const GRADIENT_STEP_MM: f64 = 1e-4;
const GRADIENT_BUDGET: Duration = Duration::from_secs(120);
const REGULARIZER_GRAPHS: usize = 50;
const RECOVERY_MIN_REDUCTION: f64 = 0.60;
const RECOVERY_BUDGET: Duration = Duration::from_secs(600);
const VISIBILITY_SCENES: usize = 20;
const THROUGHPUT_TARGET: Duration = Duration::from_secs(2);

struct Gate {
    failures: Vec<u32>,
}

impl Gate {
    fn line(&mut self, id: u32, passed: bool, binding: bool, text: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        let note = if binding { "" } else { " [non-binding]" };
        println!("{tag} criterion {id}{note}: {text}");
        if binding && !passed {
            self.failures.push(id);
        }
    }

    fn check(&mut self, id: u32, outcome: &CheckOutcome, elapsed: Duration, budget: Option<Duration>) {
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let budget = budget
            .map(|b| format!(" (budget {} s)", b.as_secs()))
            .unwrap_or_default();
        self.line(
            id,
            outcome.passed && in_time,
            true,
            format!(
                "{} | worst {:.3e} <= {:.1e} over {} cases | {:.2} s{} | {}",
                outcome.name,
                outcome.worst,
                outcome.tolerance,
                outcome.cases,
                elapsed.as_secs_f64(),
                budget,
                outcome.detail
            ),
        );
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn throughput() -> Result<(usize, usize, Duration, Duration), String> {
    let cfg = SceneConfig {
        width: 1000,
        height: 1000,
        focal: 2150.0,
        resolution: 27,
        ..SceneConfig::plane_wave()
    };
    let scene = make_scene(&cfg).map_err(|e| e.to_string())?;
    let params = RunParams {
        subdiv_levels: cfg.subdiv_levels,
        ..RunParams::default()
    };
    let colors = reference_colors(&scene.frame(), &scene.cameras, &params).map_err(|e| e.to_string())?;
    let (sub, mut gaussians) = prepare_surface(&scene.coarse, &params).map_err(|e| e.to_string())?;
    for (g, c) in gaussians.iter_mut().zip(colors) {
        g.color = c;
    }
    let (images, decompose_time) = timed(|| decompose_frame(&scene.images, &params.quadtree));
    let image_count = images.iter().map(Vec::len).sum();
    let graph = NeighborGraph::from_mesh(&sub, &gaussians, params.energy.delta_geo);
    let model = EnergyModel::new(scene.cameras.clone(), images, graph, params.energy).map_err(|e| e.to_string())?;
    let vis = compute_visibility(&sub, &gaussians, &scene.cameras, params.tolerance());
    let (grad, step_time) = timed(|| {
        model
            .evaluate(&gaussians, &vis)
            .and_then(|e| model.gradient(&gaussians, &e))
    });
    grad.map_err(|e| e.to_string())?;
    Ok((gaussians.len(), image_count, step_time, decompose_time))
}

fn main() {
    let mut gate = Gate { failures: Vec::new() };
    let exact = EnergyParams::default();

    let (o, t) = timed(|| checks::check_overlap(OVERLAP_CASES, SEED, &exact));
    gate.check(1, &o, t, Some(OVERLAP_BUDGET));
    let published = EnergyParams {
        overlap: OverlapForm::Published,
        ..exact
    };
    let p = checks::check_overlap(OVERLAP_CASES, SEED, &published);
    println!(
        "INFO criterion 1 with the exponent -d^2/S instead of -d^2/(2S): worst {:.3e} (would {})",
        p.worst,
        if p.passed { "pass" } else { "fail" }
    );

    let (o, t) = timed(|| checks::check_gradient(GRADIENT_SCENES, SEED, GRADIENT_STEP_MM));
    gate.check(2, &o, t, Some(GRADIENT_BUDGET));

    let (o, t) = timed(|| checks::check_regularizer(REGULARIZER_GRAPHS, SEED));
    gate.check(3, &o, t, None);

    let (o, t) = timed(|| checks::check_occlusion_clamp(SEED));
    gate.check(4, &o, t, None);

    let (scene, params, solver) = checks::recovery_settings();
    let (first, t) = timed(|| checks::run_recovery(&scene, &params, &solver));
    match &first {
        Ok(r) => {
            let passed = r.reduction >= RECOVERY_MIN_REDUCTION
                && r.reprojection_after < r.reprojection_before
                && t <= RECOVERY_BUDGET;
            gate.line(
                5,
                passed,
                true,
                format!(
                    "RMSE(k - k_true) {:.4} -> {:.4} mm, reduction {:.1}% (>= {:.0}%) | reprojection {:.5} -> {:.5} | {} iterations | {:.1} s (budget {} s)",
                    r.input_rmse,
                    r.output_rmse,
                    100.0 * r.reduction,
                    100.0 * RECOVERY_MIN_REDUCTION,
                    r.reprojection_before,
                    r.reprojection_after,
                    r.report.iterations,
                    t.as_secs_f64(),
                    RECOVERY_BUDGET.as_secs()
                ),
            );
        }
        Err(e) => gate.line(5, false, true, format!("recovery run failed: {e}")),
    }

    let (o, t) = timed(|| checks::check_visibility(VISIBILITY_SCENES, SEED));
    gate.check(6, &o, t, None);

    match throughput() {
        Ok((n, m, step, decompose)) => gate.line(
            7,
            step <= THROUGHPUT_TARGET,
            false,
            format!(
                "one energy + gradient pass with {n} surface and {m} image Gaussians, 8 cameras at 1000x1000: {:.3} s (target {} s; decomposition {:.3} s)",
                step.as_secs_f64(),
                THROUGHPUT_TARGET.as_secs(),
                decompose.as_secs_f64()
            ),
        ),
        Err(e) => gate.line(7, false, false, format!("setup failed: {e}")),
    }

    let second = checks::run_recovery(&scene, &params, &solver);
    match (&first, &second) {
        (Ok(a), Ok(b)) => {
            let dir = tempfile::tempdir().expect("temporary directory");
            let write = |name: &str, k: &[f64]| {
                let path = dir.path().join(name);
                let rows: Vec<(usize, f64)> = k.iter().copied().enumerate().collect();
                write_displacements(&path, &rows).expect("write displacements");
                std::fs::read(&path).expect("read displacements")
            };
            let (x, y) = (write("a.csv", &a.k), write("b.csv", &b.k));
            gate.line(
                8,
                x == y,
                true,
                format!(
                    "two recovery runs, displacement CSVs of {} and {} bytes, identical: {}",
                    x.len(),
                    y.len(),
                    x == y
                ),
            );
        }
        _ => gate.line(8, false, true, "a recovery run failed".into()),
    }

    if gate.failures.is_empty() {
        println!("acceptance: all binding criteria passed");
    } else {
        println!("acceptance: failed criteria {:?}", gate.failures);
        std::process::exit(1);
    }
}
