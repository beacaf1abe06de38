//! Sequence manifests.
//!
//! ```text
//! # comment
//! cameras cameras.txt
//! reference 0
//! mask region.txt          (optional)
//! frame frame000.obj cam0.png cam1.png ...
//! frame frame001.obj cam0.png cam1.png ...
//! ```
//!
//! Relative paths are resolved against the manifest's directory. Paths may
//! not contain whitespace.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gaussref_core::image::RgbImage;
use gaussref_core::solver::{FrameInput, FrameSource, PipelineError};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fsutil::{read_text, write_atomic};
use crate::imageio::load_image;
use crate::obj::{apply_mask, load_mask, load_mesh};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestFrame {
    pub mesh: PathBuf,
    pub images: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub cameras: PathBuf,
    pub reference: usize,
    pub mask: Option<PathBuf>,
    pub frames: Vec<ManifestFrame>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let dir = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &str| dir.join(p);
        let mut cameras = None;
        let mut reference = None;
        let mut mask = None;
        let mut frames = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            let mut fields = line.split_whitespace();
            let Some(key) = fields.next() else {
                continue;
            };
            let rest: Vec<&str> = fields.collect();
            let single = |what: &str| -> Result<&str> {
                match rest.as_slice() {
                    [one] => Ok(one),
                    _ => Err(Error::parse(path, line_no, format!("`{what}` takes exactly one value"))),
                }
            };
            match key {
                "cameras" => cameras = Some(resolve(single("cameras")?)),
                "reference" => {
                    let v = single("reference")?;
                    reference = Some(
                        v.parse()
                            .map_err(|_| Error::parse(path, line_no, format!("malformed frame index `{v}`")))?,
                    );
                }
                "mask" => mask = Some(resolve(single("mask")?)),
                "frame" => {
                    if rest.len() < 2 {
                        return Err(Error::parse(path, line_no, "frame needs a mesh and at least one image"));
                    }
                    if let Some(first) = frames.first() {
                        let first: &ManifestFrame = first;
                        if first.images.len() != rest.len() - 1 {
                            return Err(Error::parse(
                                path,
                                line_no,
                                format!(
                                    "frame lists {} images, the first frame {}",
                                    rest.len() - 1,
                                    first.images.len()
                                ),
                            ));
                        }
                    }
                    frames.push(ManifestFrame {
                        mesh: resolve(rest[0]),
                        images: rest[1..].iter().map(|p| resolve(p)).collect(),
                    });
                }
                other => return Err(Error::parse(path, line_no, format!("unknown record `{other}`"))),
            }
        }
        let cameras = cameras.ok_or_else(|| Error::parse(path, 0, "missing `cameras` record"))?;
        if frames.is_empty() {
            return Err(Error::parse(path, 0, "manifest lists no frames"));
        }
        let reference = reference.unwrap_or(0);
        if reference >= frames.len() {
            return Err(Error::parse(
                path,
                0,
                format!("reference frame {reference} out of range for {} frames", frames.len()),
            ));
        }
        Ok(Manifest {
            cameras,
            reference,
            mask,
            frames,
        })
    }

    /// Manifest text with every path written relative to `dir` when it lies
    /// below it.
    pub fn format(&self, dir: &Path) -> String {
        let rel = |p: &Path| p.strip_prefix(dir).unwrap_or(p).display().to_string();
        let mut out = String::new();
        let _ = writeln!(out, "cameras {}", rel(&self.cameras));
        let _ = writeln!(out, "reference {}", self.reference);
        if let Some(m) = &self.mask {
            let _ = writeln!(out, "mask {}", rel(m));
        }
        for f in &self.frames {
            let _ = write!(out, "frame {}", rel(&f.mesh));
            for i in &f.images {
                let _ = write!(out, " {}", rel(i));
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = path.parent().unwrap_or(Path::new(""));
        write_atomic(path, self.format(dir).as_bytes())
    }

    pub fn camera_count(&self) -> usize {
        self.frames[0].images.len()
    }
}

/// Loads one frame's mesh and images.
pub fn load_frame(frame: &ManifestFrame, mask: Option<&(PathBuf, Vec<usize>)>) -> Result<FrameInput> {
    let mut mesh = load_mesh(&frame.mesh)?;
    if let Some((path, indices)) = mask {
        mesh = apply_mask(mesh, indices, path)?;
    }
    let images = frame
        .images
        .par_iter()
        .map(|p| load_image(p))
        .collect::<Result<Vec<RgbImage>>>()?;
    Ok(FrameInput { mesh, images })
}

/// Frames of a manifest, read from disk on demand.
#[derive(Debug)]
pub struct ManifestSource {
    frames: Vec<ManifestFrame>,
    mask: Option<(PathBuf, Vec<usize>)>,
    /// The error behind the last failed load.
    last_error: Option<Error>,
}

impl ManifestSource {
    /// `mask` overrides the manifest's own mask record.
    pub fn new(manifest: &Manifest, mask: Option<&Path>) -> Result<Self> {
        let mask = match mask.or(manifest.mask.as_deref()) {
            Some(p) => Some((p.to_path_buf(), load_mask(p)?)),
            None => None,
        };
        Ok(ManifestSource {
            frames: manifest.frames.clone(),
            mask,
            last_error: None,
        })
    }

    pub fn take_error(&mut self) -> Option<Error> {
        self.last_error.take()
    }
}

impl FrameSource for ManifestSource {
    fn frame_count(&self) -> usize {
        self.frames.len()
    }

    fn load(&mut self, frame: usize) -> std::result::Result<FrameInput, PipelineError> {
        let Some(f) = self.frames.get(frame) else {
            return Err(PipelineError::Source {
                frame,
                message: "no such frame".into(),
            });
        };
        load_frame(f, self.mask.as_ref()).map_err(|e| {
            let message = e.to_string();
            self.last_error = Some(e);
            PipelineError::Source { frame, message }
        })
    }
}
