//! Perspective triangle rasterization with a depth buffer.
//!
//! Samples are taken at pixel centers. Both windings are drawn; facing is
//! decided by callers. Barycentric weights are perspective-correct and
//! depth is the camera depth `[P X]_z` of the surface point.

use alloc::vec;
use alloc::vec::Vec;

use crate::camera::CameraSpec;
use crate::math::{ceil, floor, Vec3};

/// Closest surface sample of a pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fragment {
    pub face: usize,
    /// Perspective-correct weights of the face's three vertices.
    pub bary: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct FrameBuffer {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    fragments: Vec<Option<Fragment>>,
}

impl FrameBuffer {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Depth at a pixel; `f64::INFINITY` where nothing was drawn.
    #[inline]
    pub fn depth(&self, x: usize, y: usize) -> f64 {
        self.depth[y * self.width + x]
    }

    #[inline]
    pub fn fragment(&self, x: usize, y: usize) -> Option<Fragment> {
        self.fragments[y * self.width + x]
    }

    /// Interpolates a per-vertex attribute at a pixel.
    pub fn interpolate(&self, x: usize, y: usize, faces: &[[usize; 3]], attr: &[Vec3]) -> Option<Vec3> {
        let f = self.fragment(x, y)?;
        let [a, b, c] = faces[f.face];
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = f.bary[0] * attr[a][k] + f.bary[1] * attr[b][k] + f.bary[2] * attr[c][k];
        }
        Some(out)
    }
}

/// Depths below this are treated as behind the camera.
pub const NEAR_DEPTH: f64 = 1e-6;

pub fn rasterize(positions: &[Vec3], faces: &[[usize; 3]], cam: &CameraSpec) -> FrameBuffer {
    let width = cam.width() as usize;
    let height = cam.height() as usize;
    let mut fb = FrameBuffer {
        width,
        height,
        depth: vec![f64::INFINITY; width * height],
        fragments: vec![None; width * height],
    };
    let projected: Vec<[f64; 3]> = positions
        .iter()
        .map(|&p| {
            let h = cam.project_point_h(p);
            [h[0] / h[2], h[1] / h[2], h[2]]
        })
        .collect();
    for (fi, &[a, b, c]) in faces.iter().enumerate() {
        let (pa, pb, pc) = (projected[a], projected[b], projected[c]);
        if pa[2] <= NEAR_DEPTH || pb[2] <= NEAR_DEPTH || pc[2] <= NEAR_DEPTH {
            continue;
        }
        let area = edge_fn(pa, pb, pc[0], pc[1]);
        if area == 0.0 || !area.is_finite() {
            continue;
        }
        let xmin = pa[0].min(pb[0]).min(pc[0]);
        let xmax = pa[0].max(pb[0]).max(pc[0]);
        let ymin = pa[1].min(pb[1]).min(pc[1]);
        let ymax = pa[1].max(pb[1]).max(pc[1]);
        // pixel x has center x + 0.5
        let x0 = ceil(xmin - 0.5).max(0.0);
        let x1 = floor(xmax - 0.5).min(width as f64 - 1.0);
        let y0 = ceil(ymin - 0.5).max(0.0);
        let y1 = floor(ymax - 0.5).min(height as f64 - 1.0);
        if x0 > x1 || y0 > y1 {
            continue;
        }
        let inv_area = 1.0 / area;
        for y in (y0 as usize)..=(y1 as usize) {
            let sy = y as f64 + 0.5;
            for x in (x0 as usize)..=(x1 as usize) {
                let sx = x as f64 + 0.5;
                let l0 = edge_fn(pb, pc, sx, sy) * inv_area;
                let l1 = edge_fn(pc, pa, sx, sy) * inv_area;
                let l2 = edge_fn(pa, pb, sx, sy) * inv_area;
                if l0 < 0.0 || l1 < 0.0 || l2 < 0.0 {
                    continue;
                }
                let q0 = l0 / pa[2];
                let q1 = l1 / pb[2];
                let q2 = l2 / pc[2];
                let qs = q0 + q1 + q2;
                let z = 1.0 / qs;
                let at = y * width + x;
                if z < fb.depth[at] {
                    fb.depth[at] = z;
                    fb.fragments[at] = Some(Fragment {
                        face: fi,
                        bary: [q0 * z, q1 * z, q2 * z],
                    });
                }
            }
        }
    }
    fb
}

#[inline]
fn edge_fn(a: [f64; 3], b: [f64; 3], x: f64, y: f64) -> f64 {
    (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0])
}
