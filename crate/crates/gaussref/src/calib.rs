//! Camera calibration files.
//!
//! One stanza of seven lines per camera, blank lines and `#` comments
//! allowed between stanzas:
//!
//! ```text
//! camera <id>
//! <P row 0: 4 floats>
//! <P row 1: 4 floats>
//! <P row 2: 4 floats>
//! f <focal length in pixels>
//! center <x> <y> <z>
//! size <width> <height>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use gaussref_core::camera::CameraSpec;

use crate::error::{Error, Result};
use crate::fsutil::{read_text, write_atomic};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCamera {
    pub id: String,
    pub spec: CameraSpec,
}

pub fn load_cameras(path: &Path) -> Result<Vec<NamedCamera>> {
    parse_cameras(&read_text(path)?, path)
}

pub fn parse_cameras(text: &str, path: &Path) -> Result<Vec<NamedCamera>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let mut cameras = Vec::new();
    while let Some((line_no, header)) = lines.next() {
        let id = keyword(header, "camera", 1, path, line_no)?[0].to_string();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(path, line_no, format!("camera {id}: missing {what}")))
        };
        let mut p = [[0.0; 4]; 3];
        for (r, row) in p.iter_mut().enumerate() {
            let (n, l) = next(&format!("projection row {r}"))?;
            let vals = numbers(l.split_whitespace().collect(), 4, path, n, "projection row")?;
            row.copy_from_slice(&vals);
        }
        let (n, l) = next("`f` line")?;
        let f = numbers(keyword(l, "f", 1, path, n)?, 1, path, n, "f")?[0];
        let (n, l) = next("`center` line")?;
        let c = numbers(keyword(l, "center", 3, path, n)?, 3, path, n, "center")?;
        let (n, l) = next("`size` line")?;
        let size = keyword(l, "size", 2, path, n)?;
        let mut wh = [0u32; 2];
        for (slot, tok) in wh.iter_mut().zip(size) {
            *slot = tok
                .parse()
                .map_err(|_| Error::parse(path, n, format!("malformed image size `{tok}`")))?;
        }
        let spec = CameraSpec::new(p, f, [c[0], c[1], c[2]], wh[0], wh[1]).map_err(|source| Error::Camera {
            path: path.to_path_buf(),
            id: id.clone(),
            source,
        })?;
        cameras.push(NamedCamera { id, spec });
    }
    Ok(cameras)
}

fn keyword<'a>(line: &'a str, key: &str, count: usize, path: &Path, n: usize) -> Result<Vec<&'a str>> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some(key) {
        return Err(Error::parse(path, n, format!("expected `{key}`, found `{line}`")));
    }
    let rest: Vec<&str> = fields.collect();
    if rest.len() != count {
        return Err(Error::parse(
            path,
            n,
            format!("`{key}` takes {count} value(s), found {}", rest.len()),
        ));
    }
    Ok(rest)
}

fn numbers(tokens: Vec<&str>, count: usize, path: &Path, n: usize, what: &str) -> Result<Vec<f64>> {
    if tokens.len() != count {
        return Err(Error::parse(
            path,
            n,
            format!("{what}: expected {count} numbers, found {}", tokens.len()),
        ));
    }
    tokens
        .into_iter()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(path, n, format!("{what}: malformed number `{t}`")))
        })
        .collect()
}

pub fn format_cameras(cameras: &[NamedCamera]) -> String {
    let mut out = String::new();
    for cam in cameras {
        let s = &cam.spec;
        let _ = writeln!(out, "camera {}", cam.id);
        for row in s.projection() {
            let _ = writeln!(out, "{} {} {} {}", row[0], row[1], row[2], row[3]);
        }
        let _ = writeln!(out, "f {}", s.focal());
        let c = s.center();
        let _ = writeln!(out, "center {} {} {}", c[0], c[1], c[2]);
        let _ = writeln!(out, "size {} {}", s.width(), s.height());
        out.push('\n');
    }
    out
}

pub fn save_cameras(cameras: &[NamedCamera], path: &Path) -> Result<()> {
    write_atomic(path, format_cameras(cameras).as_bytes())
}
