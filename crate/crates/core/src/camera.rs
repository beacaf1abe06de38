//! Pinhole cameras given by a 3x4 projection matrix.
//!
//! Pixel coordinates are continuous: pixel `(x, y)` covers
//! `[x, x + 1) x [y, y + 1)` and its center sits at `(x + 0.5, y + 0.5)`.

use crate::math::{cross, det3, dot, normalize, sub, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CameraError {
    #[error("projection matrix is rank deficient")]
    RankDeficient,
    #[error("focal length must be positive, got {0}")]
    NonPositiveFocal(f64),
    #[error("image size must be non-zero, got {0}x{1}")]
    EmptyImage(u32, u32),
    #[error("camera parameters are not finite")]
    NonFinite,
    #[error("degenerate look-at configuration")]
    DegenerateLookAt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraSpec {
    projection: [[f64; 4]; 3],
    focal: f64,
    center: Vec3,
    width: u32,
    height: u32,
}

impl CameraSpec {
    pub fn new(
        projection: [[f64; 4]; 3],
        focal: f64,
        center: Vec3,
        width: u32,
        height: u32,
    ) -> Result<Self, CameraError> {
        if projection.iter().flatten().any(|v| !v.is_finite())
            || center.iter().any(|v| !v.is_finite())
            || !focal.is_finite()
        {
            return Err(CameraError::NonFinite);
        }
        if focal <= 0.0 {
            return Err(CameraError::NonPositiveFocal(focal));
        }
        if width == 0 || height == 0 {
            return Err(CameraError::EmptyImage(width, height));
        }
        if !has_full_rank(&projection) {
            return Err(CameraError::RankDeficient);
        }
        Ok(CameraSpec {
            projection,
            focal,
            center,
            width,
            height,
        })
    }

    /// Camera at `eye` looking at `target` with principal point at the image
    /// center. Image x follows the camera right vector, image y points down.
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        focal: f64,
        width: u32,
        height: u32,
    ) -> Result<Self, CameraError> {
        let z = normalize(sub(target, eye)).ok_or(CameraError::DegenerateLookAt)?;
        let x = normalize(cross(z, up)).ok_or(CameraError::DegenerateLookAt)?;
        let y = cross(z, x);
        let cx = width as f64 / 2.0;
        let cy = height as f64 / 2.0;
        let t = [-dot(x, eye), -dot(y, eye), -dot(z, eye)];
        let row = |r: Vec3, tr: f64| [r[0], r[1], r[2], tr];
        let rx = row(x, t[0]);
        let ry = row(y, t[1]);
        let rz = row(z, t[2]);
        let mut p = [[0.0; 4]; 3];
        for c in 0..4 {
            p[0][c] = focal * rx[c] + cx * rz[c];
            p[1][c] = focal * ry[c] + cy * rz[c];
            p[2][c] = rz[c];
        }
        CameraSpec::new(p, focal, eye, width, height)
    }

    pub fn projection(&self) -> &[[f64; 4]; 3] {
        &self.projection
    }

    pub fn focal(&self) -> f64 {
        self.focal
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// `P [p, 1]`.
    #[inline]
    pub fn project_point_h(&self, p: Vec3) -> [f64; 3] {
        let m = &self.projection;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2] + m[0][3],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2] + m[1][3],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2] + m[2][3],
        ]
    }

    /// `P [d, 0]`: image of a direction.
    #[inline]
    pub fn project_direction_h(&self, d: Vec3) -> [f64; 3] {
        let m = &self.projection;
        [
            m[0][0] * d[0] + m[0][1] * d[1] + m[0][2] * d[2],
            m[1][0] * d[0] + m[1][1] * d[1] + m[1][2] * d[2],
            m[2][0] * d[0] + m[2][1] * d[1] + m[2][2] * d[2],
        ]
    }

    /// Pixel position and depth `[P p^h]_z`; `None` when the depth is not positive.
    #[inline]
    pub fn project(&self, p: Vec3) -> Option<([f64; 2], f64)> {
        let h = self.project_point_h(p);
        (h[2] > 0.0).then(|| ([h[0] / h[2], h[1] / h[2]], h[2]))
    }

    pub fn contains_pixel(&self, uv: [f64; 2]) -> bool {
        uv[0] >= 0.0 && uv[1] >= 0.0 && uv[0] < self.width as f64 && uv[1] < self.height as f64
    }

    /// World-space direction (not normalized) of the ray through pixel
    /// position `uv`, i.e. `d` with `P [d, 0] ~ [u, v, 1]`.
    pub fn ray_direction(&self, uv: [f64; 2]) -> Option<Vec3> {
        let m = &self.projection;
        let a = [
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ];
        let det = det3(a);
        if det == 0.0 {
            return None;
        }
        let b = [uv[0], uv[1], 1.0];
        // Cramer's rule for A d = b.
        let mut d = [0.0; 3];
        for (col, out) in d.iter_mut().enumerate() {
            let mut ac = a;
            for row in 0..3 {
                ac[row][col] = b[row];
            }
            *out = det3(ac) / det;
        }
        Some(d)
    }
}

fn has_full_rank(p: &[[f64; 4]; 3]) -> bool {
    let scale = p.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    let mut best = 0.0f64;
    for skip in 0..4 {
        let mut m = [[0.0; 3]; 3];
        for (r, row) in p.iter().enumerate() {
            let mut c = 0;
            for (k, v) in row.iter().enumerate() {
                if k != skip {
                    m[r][c] = v / scale;
                    c += 1;
                }
            }
        }
        best = best.max(det3(m).abs());
    }
    best > 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> [[f64; 4]; 3] {
        [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
    }

    #[test]
    fn canonical_camera_is_accepted() {
        let cam = CameraSpec::new(canonical(), 1.0, [0.0; 3], 10, 10).unwrap();
        assert_eq!(cam.project([2.0, 4.0, 2.0]), Some(([1.0, 2.0], 2.0)));
    }

    #[test]
    fn zero_third_row_is_rank_deficient() {
        let mut p = canonical();
        p[2] = [0.0; 4];
        assert_eq!(
            CameraSpec::new(p, 1.0, [0.0; 3], 10, 10),
            Err(CameraError::RankDeficient)
        );
    }

    #[test]
    fn focal_must_be_positive() {
        assert!(matches!(
            CameraSpec::new(canonical(), 0.0, [0.0; 3], 10, 10),
            Err(CameraError::NonPositiveFocal(_))
        ));
    }

    #[test]
    fn look_at_centers_target() {
        let cam =
            CameraSpec::look_at([0.0, -1000.0, 500.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0], 800.0, 640, 480).unwrap();
        let (uv, depth) = cam.project([0.0, 0.0, 0.0]).unwrap();
        assert!((uv[0] - 320.0).abs() < 1e-9 && (uv[1] - 240.0).abs() < 1e-9);
        assert!((depth - (1000.0f64 * 1000.0 + 500.0 * 500.0).sqrt()).abs() < 1e-9);
        // world up maps to image up (smaller y)
        let (up, _) = cam.project([0.0, 0.0, 10.0]).unwrap();
        assert!(up[1] < 240.0);
        // world +x maps to image right
        let (right, _) = cam.project([10.0, 0.0, 0.0]).unwrap();
        assert!(right[0] > 320.0);
    }

    #[test]
    fn ray_direction_reprojects() {
        let cam = CameraSpec::look_at(
            [300.0, -900.0, 400.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            700.0,
            512,
            512,
        )
        .unwrap();
        let d = cam.ray_direction([100.5, 300.25]).unwrap();
        let p = crate::math::add(cam.center(), crate::math::scale(d, 3.0));
        let (uv, _) = cam.project(p).unwrap();
        assert!((uv[0] - 100.5).abs() < 1e-8 && (uv[1] - 300.25).abs() < 1e-8);
    }
}
