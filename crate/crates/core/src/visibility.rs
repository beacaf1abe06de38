//! Per-camera visibility of surface Gaussians from a depth buffer.

use alloc::vec;
use alloc::vec::Vec;

use crate::camera::CameraSpec;
use crate::math::{dot, sub};
use crate::mesh::Mesh;
use crate::raster::rasterize;
use crate::surface::{current_positions, SurfaceGaussian};

/// Visibility flags indexed by (camera, gaussian).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityMask {
    cameras: usize,
    gaussians: usize,
    flags: Vec<bool>,
}

impl VisibilityMask {
    pub fn new(cameras: usize, gaussians: usize, visible: bool) -> Self {
        VisibilityMask {
            cameras,
            gaussians,
            flags: vec![visible; cameras * gaussians],
        }
    }

    /// Mask filled by `f(camera, gaussian)`.
    pub fn from_fn(cameras: usize, gaussians: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut flags = Vec::with_capacity(cameras * gaussians);
        for c in 0..cameras {
            for g in 0..gaussians {
                flags.push(f(c, g));
            }
        }
        VisibilityMask {
            cameras,
            gaussians,
            flags,
        }
    }

    pub fn camera_count(&self) -> usize {
        self.cameras
    }

    pub fn gaussian_count(&self) -> usize {
        self.gaussians
    }

    #[inline]
    pub fn is_visible(&self, camera: usize, gaussian: usize) -> bool {
        self.flags[camera * self.gaussians + gaussian]
    }

    pub fn set(&mut self, camera: usize, gaussian: usize, visible: bool) {
        self.flags[camera * self.gaussians + gaussian] = visible;
    }

    pub fn visible_count(&self) -> usize {
        self.flags.iter().filter(|&&v| v).count()
    }
}

/// Default depth tolerance: twice the Gaussian extent.
pub fn default_tolerance(sigma_hat: f64) -> f64 {
    2.0 * sigma_hat
}

/// A Gaussian is visible in a camera iff its normal faces the camera, its
/// mean projects inside the image, and its depth is within `tolerance` of
/// the depth buffer of the current (displaced) mesh at that pixel.
pub fn compute_visibility(
    mesh: &Mesh,
    gaussians: &[SurfaceGaussian],
    cams: &[CameraSpec],
    tolerance: f64,
) -> VisibilityMask {
    let positions = current_positions(mesh, gaussians);
    let per_camera: Vec<Vec<bool>> = crate::par::map_range(cams.len(), |c| {
        let cam = &cams[c];
        let fb = rasterize(&positions, mesh.faces(), cam);
        gaussians
            .iter()
            .map(|g| {
                let mean = g.mean();
                if dot(g.normal, sub(cam.center(), mean)) <= 0.0 {
                    return false;
                }
                let Some((uv, depth)) = cam.project(mean) else {
                    return false;
                };
                if !cam.contains_pixel(uv) {
                    return false;
                }
                depth <= fb.depth(uv[0] as usize, uv[1] as usize) + tolerance
            })
            .collect()
    });
    let gaussian_count = gaussians.len();
    VisibilityMask {
        cameras: cams.len(),
        gaussians: gaussian_count,
        flags: per_camera.into_iter().flatten().collect(),
    }
}
