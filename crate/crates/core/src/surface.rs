//! Surface Gaussians anchored at mesh vertices, their projection into the
//! cameras, and color assignment from a reference frame.

use alloc::vec;
use alloc::vec::Vec;

use crate::camera::CameraSpec;
use crate::color::{rgb_to_hsv, Hsv, RgbAccumulator};
use crate::image::RgbImage;
use crate::math::{add, dot, floor, normalize, scale, sub, Vec3};
use crate::mesh::Mesh;
use crate::visibility::VisibilityMask;

/// Default spatial extent of a surface Gaussian, mm.
pub const DEFAULT_SIGMA_HAT: f64 = 7.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("point lies at or behind the camera plane (depth {0})")]
    BehindCamera(f64),
    #[error("no surface Gaussian is visible in any camera")]
    NothingVisible,
    #[error("{images} images given for {cameras} cameras")]
    ImageCount { images: usize, cameras: usize },
    #[error("visibility mask does not match {gaussians} gaussians x {cameras} cameras")]
    MaskShape { gaussians: usize, cameras: usize },
}

/// Isotropic 3D Gaussian that moves along a fixed normal.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGaussian {
    /// Rest position (the subdivided mesh vertex), mm.
    pub rest: Vec3,
    /// Unit vertex normal, fixed for the frame.
    pub normal: Vec3,
    /// Displacement along `normal`, mm.
    pub k: f64,
    pub sigma_hat: f64,
    pub color: Option<Hsv>,
    pub vertex: usize,
}

impl SurfaceGaussian {
    /// Current mean `rest + normal * k`.
    #[inline]
    pub fn mean(&self) -> Vec3 {
        add(self.rest, scale(self.normal, self.k))
    }
}

/// Surface Gaussian seen through one camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedGaussian {
    pub mu: [f64; 2],
    pub sigma: f64,
    /// `[P mu^h]_z`.
    pub depth: f64,
    pub vertex: usize,
    pub camera: usize,
}

/// One Gaussian per refinable vertex, `k = 0`, colors unset.
pub fn build_surface_gaussians(mesh: &Mesh, normals: &[Vec3], sigma_hat: f64) -> Vec<SurfaceGaussian> {
    mesh.vertices()
        .iter()
        .zip(normals)
        .zip(mesh.refinable())
        .enumerate()
        .filter(|(_, (_, &r))| r)
        .map(|(i, ((&v, &n), _))| SurfaceGaussian {
            rest: v,
            normal: n,
            k: 0.0,
            sigma_hat,
            color: None,
            vertex: i,
        })
        .collect()
}

/// Perspective projection of the mean and of the spatial extent
/// `sigma = sigma_hat f / depth`.
pub fn project_gaussian(
    cam: &CameraSpec,
    camera: usize,
    g: &SurfaceGaussian,
) -> Result<ProjectedGaussian, SurfaceError> {
    let h = cam.project_point_h(g.mean());
    if !(h[2] > 0.0) {
        return Err(SurfaceError::BehindCamera(h[2]));
    }
    Ok(ProjectedGaussian {
        mu: [h[0] / h[2], h[1] / h[2]],
        sigma: g.sigma_hat * cam.focal() / h[2],
        depth: h[2],
        vertex: g.vertex,
        camera,
    })
}

/// Vertex-to-Gaussian lookup for a mesh with `n` vertices.
pub fn gaussian_lookup(n: usize, gaussians: &[SurfaceGaussian]) -> Vec<Option<usize>> {
    let mut map = vec![None; n];
    for (i, g) in gaussians.iter().enumerate() {
        if g.vertex < n {
            map[g.vertex] = Some(i);
        }
    }
    map
}

/// Mesh positions with every Gaussian's vertex moved to its current mean.
pub fn current_positions(mesh: &Mesh, gaussians: &[SurfaceGaussian]) -> Vec<Vec3> {
    let mut pos = mesh.vertices().to_vec();
    for g in gaussians {
        pos[g.vertex] = g.mean();
    }
    pos
}

/// Average color of the pixels whose centers fall inside the projected
/// 1-sigma disk; the pixel under the mean when the disk holds no center.
pub fn sample_disk(image: &RgbImage, mu: [f64; 2], radius: f64) -> Option<Hsv> {
    let (w, h) = (image.width() as f64, image.height() as f64);
    if !(mu[0] >= 0.0 && mu[1] >= 0.0 && mu[0] < w && mu[1] < h) {
        return None;
    }
    let mut acc = RgbAccumulator::default();
    let x0 = floor(mu[0] - radius).max(0.0) as usize;
    let y0 = floor(mu[1] - radius).max(0.0) as usize;
    let x1 = (floor(mu[0] + radius) as usize).min(image.width() - 1);
    let y1 = (floor(mu[1] + radius) as usize).min(image.height() - 1);
    let r2 = radius * radius;
    for y in y0..=y1 {
        let dy = y as f64 + 0.5 - mu[1];
        for x in x0..=x1 {
            let dx = x as f64 + 0.5 - mu[0];
            if dx * dx + dy * dy <= r2 {
                acc.push(image.rgb(x, y));
            }
        }
    }
    if acc.count() == 0 {
        acc.push(image.rgb(mu[0] as usize, mu[1] as usize));
    }
    acc.mean().map(rgb_to_hsv)
}

/// Assigns each Gaussian the mean color under its projection in the
/// visible camera whose viewing direction best aligns with its normal.
/// Gaussians seen by no camera take the mean color of their colored 1-ring
/// neighbors, repeated until nothing changes.
pub fn assign_colors(
    gaussians: &mut [SurfaceGaussian],
    mesh: &Mesh,
    images: &[RgbImage],
    cams: &[CameraSpec],
    visibility: &VisibilityMask,
) -> Result<(), SurfaceError> {
    if images.len() != cams.len() {
        return Err(SurfaceError::ImageCount {
            images: images.len(),
            cameras: cams.len(),
        });
    }
    if visibility.gaussian_count() != gaussians.len() || visibility.camera_count() != cams.len() {
        return Err(SurfaceError::MaskShape {
            gaussians: gaussians.len(),
            cameras: cams.len(),
        });
    }
    let mut any = false;
    for (gi, g) in gaussians.iter_mut().enumerate() {
        g.color = None;
        let mean = g.mean();
        let mut best: Option<(f64, usize)> = None;
        for (c, cam) in cams.iter().enumerate() {
            if !visibility.is_visible(c, gi) {
                continue;
            }
            let Some(view) = normalize(sub(cam.center(), mean)) else {
                continue;
            };
            let align = dot(g.normal, view);
            if best.is_none_or(|(b, _)| align > b) {
                best = Some((align, c));
            }
        }
        if let Some((_, c)) = best {
            if let Ok(p) = project_gaussian(&cams[c], c, g) {
                g.color = sample_disk(&images[c], p.mu, p.sigma);
            }
        }
        any |= g.color.is_some();
    }
    if !any {
        return Err(SurfaceError::NothingVisible);
    }
    fill_from_neighbors(gaussians, mesh);
    Ok(())
}

fn fill_from_neighbors(gaussians: &mut [SurfaceGaussian], mesh: &Mesh) {
    let lookup = gaussian_lookup(mesh.vertex_count(), gaussians);
    let adjacency = mesh.adjacency();
    loop {
        let snapshot: Vec<Option<Hsv>> = gaussians.iter().map(|g| g.color).collect();
        let mut changed = false;
        for (gi, g) in gaussians.iter_mut().enumerate() {
            if snapshot[gi].is_some() {
                continue;
            }
            let mut acc = RgbAccumulator::default();
            for &nb in adjacency.neighbors(g.vertex) {
                if let Some(Some(c)) = lookup[nb].map(|j| snapshot[j]) {
                    acc.push(crate::color::hsv_to_rgb(c));
                }
            }
            if let Some(mean) = acc.mean() {
                g.color = Some(rgb_to_hsv(mean));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_cam(f: f64) -> CameraSpec {
        CameraSpec::new(
            [[f, 0.0, 0.0, 0.0], [0.0, f, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
            f,
            [0.0; 3],
            1,
            1,
        )
        .unwrap()
    }

    fn gaussian_at(p: Vec3) -> SurfaceGaussian {
        SurfaceGaussian {
            rest: p,
            normal: [0.0, 0.0, -1.0],
            k: 0.0,
            sigma_hat: 7.0,
            color: None,
            vertex: 0,
        }
    }

    #[test]
    fn projection_examples() {
        let cam = diag_cam(1000.0);
        let p = project_gaussian(&cam, 0, &gaussian_at([0.0, 0.0, 2000.0])).unwrap();
        assert_eq!(p.mu, [0.0, 0.0]);
        assert_eq!(p.sigma, 3.5);
        let p = project_gaussian(&cam, 0, &gaussian_at([200.0, 0.0, 2000.0])).unwrap();
        assert_eq!(p.mu, [100.0, 0.0]);
        assert!(matches!(
            project_gaussian(&cam, 0, &gaussian_at([1.0, 1.0, 0.0])),
            Err(SurfaceError::BehindCamera(_))
        ));
    }

    #[test]
    fn projected_sigma_shrinks_with_depth() {
        let cam = diag_cam(800.0);
        let mut last = f64::INFINITY;
        for z in [10.0, 100.0, 500.0, 1000.0, 5000.0] {
            let s = project_gaussian(&cam, 0, &gaussian_at([0.0, 0.0, z])).unwrap().sigma;
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn mean_follows_normal() {
        let mut g = gaussian_at([1.0, 2.0, 3.0]);
        g.normal = [0.0, 0.6, 0.8];
        g.k = 2.5;
        let m = g.mean();
        assert_eq!(m, [1.0, 2.0 + 0.6 * 2.5, 3.0 + 0.8 * 2.5]);
    }

    #[test]
    fn build_respects_mask() {
        let mesh = Mesh::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let normals = crate::mesh::compute_normals(&mesh).unwrap();
        let all = build_surface_gaussians(&mesh, &normals, 7.0);
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|g| g.k == 0.0 && g.color.is_none()));
        let none = mesh.clone().with_region_mask(vec![false; 4]).unwrap();
        assert!(build_surface_gaussians(&none, &normals, 7.0).is_empty());
        let some = mesh.with_region_indices(&[1, 3]).unwrap();
        let g = build_surface_gaussians(&some, &normals, 7.0);
        assert_eq!(g.iter().map(|g| g.vertex).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn disk_average_of_uniform_red() {
        let img = RgbImage::new(20, 20, [255, 0, 0]);
        assert_eq!(sample_disk(&img, [10.0, 10.0], 3.0), Some(Hsv::new(0.0, 1.0, 1.0)));
        assert_eq!(sample_disk(&img, [10.2, 10.7], 0.1), Some(Hsv::new(0.0, 1.0, 1.0)));
        assert_eq!(sample_disk(&img, [-1.0, 10.0], 3.0), None);
    }
}
