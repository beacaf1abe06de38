//! CSV outputs. Every table has a header row; floats are written in their
//! shortest round-trip form so files compare byte for byte across runs.

use std::path::Path;

use gaussref_core::energy::EnergyReport;
use gaussref_core::quadtree::ImageGaussian;
use gaussref_core::solver::RefinementReport;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

fn csv_bytes<I, R>(header: &[&str], rows: I, path: &Path) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

fn write_table<I, R>(path: &Path, preamble: &str, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut bytes = preamble.as_bytes().to_vec();
    bytes.extend(csv_bytes(header, rows, path)?);
    write_atomic(path, &bytes)
}

/// `vertex_id,k_mm`; also the format of `k_true.csv`.
pub fn write_displacements(path: &Path, values: &[(usize, f64)]) -> Result<()> {
    write_table(
        path,
        "",
        &["vertex_id", "k_mm"],
        values.iter().map(|(v, k)| [v.to_string(), k.to_string()]),
    )
}

pub fn read_displacements(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(n + 2);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let v = field(0)
            .parse()
            .map_err(|_| Error::parse(path, line, format!("malformed vertex id `{}`", field(0))))?;
        let k = field(1)
            .parse()
            .map_err(|_| Error::parse(path, line, format!("malformed displacement `{}`", field(1))))?;
        out.push((v, k));
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

/// One row of the per-frame report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub frame: usize,
    pub report: RefinementReport,
}

/// Report CSV `frame,iters,E0,Ef,max_k_mm,seconds` after a configuration
/// header.
pub fn write_report(path: &Path, header: &str, rows: &[ReportRow]) -> Result<()> {
    write_table(
        path,
        header,
        &["frame", "iters", "E0", "Ef", "max_k_mm", "seconds"],
        rows.iter().map(|r| {
            [
                r.frame.to_string(),
                r.report.iterations.to_string(),
                r.report.initial_energy.to_string(),
                r.report.final_energy.to_string(),
                r.report.max_abs_k.to_string(),
                format!("{:.3}", r.report.wall_seconds),
            ]
        }),
    )
}

/// Per-iteration energies, `frame,iter,E_total,E_sim,E_reg,saturated,pairs`.
pub fn write_energy_dump(path: &Path, frames: &[(usize, Vec<EnergyReport>)]) -> Result<()> {
    let rows = frames.iter().flat_map(|(f, reports)| {
        reports.iter().enumerate().map(move |(i, r)| {
            [
                f.to_string(),
                i.to_string(),
                r.total.to_string(),
                r.similarity.to_string(),
                r.regularization.to_string(),
                r.saturated.to_string(),
                r.pairs.to_string(),
            ]
        })
    });
    write_table(
        path,
        "",
        &["frame", "iter", "E_total", "E_sim", "E_reg", "saturated", "pairs"],
        rows,
    )
}

/// Evaluation metrics: `camera,mean_abs_hsv_err` per camera, an `all` row,
/// and a `k_rmse_mm` row when ground truth was supplied.
pub fn write_eval(path: &Path, per_camera: &[f64], overall: f64, k_rmse: Option<f64>) -> Result<()> {
    let mut rows: Vec<[String; 2]> = per_camera
        .iter()
        .enumerate()
        .map(|(c, e)| [c.to_string(), e.to_string()])
        .collect();
    rows.push(["all".into(), overall.to_string()]);
    if let Some(r) = k_rmse {
        rows.push(["k_rmse_mm".into(), r.to_string()]);
    }
    write_table(path, "", &["camera", "mean_abs_hsv_err"], rows)
}

/// Image Gaussians, `camera,mu_x,mu_y,sigma,h,s,v,depth`.
pub fn write_image_gaussians(path: &Path, gaussians: &[ImageGaussian]) -> Result<()> {
    write_table(
        path,
        "",
        &["camera", "mu_x", "mu_y", "sigma", "h", "s", "v", "depth"],
        gaussians.iter().map(|g| {
            [
                g.camera.to_string(),
                g.mu[0].to_string(),
                g.mu[1].to_string(),
                g.sigma.to_string(),
                g.color.h.to_string(),
                g.color.s.to_string(),
                g.color.v.to_string(),
                g.depth.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacements_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        let values = vec![(0, 0.1), (7, -1.0 / 3.0), (12, 1e-300)];
        write_displacements(&path, &values).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("vertex_id,k_mm\n"));
        assert_eq!(read_displacements(&path).unwrap(), values);
    }

    #[test]
    fn malformed_row_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        std::fs::write(&path, "vertex_id,k_mm\n0,1\n1,x\n").unwrap();
        let e = read_displacements(&path).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn report_has_header_then_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let report = RefinementReport {
            iterations: 3,
            initial_energy: 0.5,
            final_energy: 0.75,
            trace: vec![],
            converged: true,
            max_abs_k: 2.0,
            wall_seconds: 0.0,
        };
        write_report(&path, "# config: wreg=1\n", &[ReportRow { frame: 0, report }]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "# config: wreg=1\nframe,iters,E0,Ef,max_k_mm,seconds\n0,3,0.5,0.75,2,0.000\n"
        );
    }

    #[test]
    fn eval_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_eval(&path, &[0.25, 0.5], 0.375, Some(1.5)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "camera,mean_abs_hsv_err\n0,0.25\n1,0.5\nall,0.375\nk_rmse_mm,1.5\n"
        );
    }
}
