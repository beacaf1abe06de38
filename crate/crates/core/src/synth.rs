//! Synthetic multi-view scenes with known displacements, a flat-shaded
//! renderer, and the reference computations used to check the energy,
//! its gradient and the visibility test.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::camera::{CameraError, CameraSpec};
use crate::color::{color_distance_with, hsv_to_rgb, rgb_to_hsv, Hsv, HueMetric, Rgb};
use crate::energy::{EnergyError, EnergyModel, EnergyParams};
use crate::image::RgbImage;
use crate::math::{add, cos, cross, dot, exp, floor, normalize, scale, sin, sqrt, sub, Vec3};
use crate::mesh::{compute_normals, subdivide, Mesh, MeshError};
use crate::raster::{rasterize, FrameBuffer, NEAR_DEPTH};
use crate::solver::FrameInput;
use crate::surface::{current_positions, gaussian_lookup, SurfaceGaussian};
use crate::visibility::VisibilityMask;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid scene configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Camera(#[from] CameraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    /// Square grid in the `z = 0` plane displaced along `+z` by
    /// `A sin(2 pi f x) sin(2 pi f y)`.
    PlaneWave,
    /// Icosphere with smooth radial bumps around the six axis directions.
    SphereBumps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TextureKind {
    /// Random palette colors on a 3D grid of cubic cells.
    Cells { cell: f64 },
    /// Smoothly interpolated random colors on a 3D lattice.
    Noise { scale: f64 },
    /// One color everywhere.
    Plain([u8; 3]),
}

/// Procedural color as a function of the undisplaced surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texture {
    pub kind: TextureKind,
    pub seed: u64,
}

const PALETTE: [[u8; 3]; 8] = [
    [230, 40, 40],
    [40, 190, 60],
    [40, 70, 240],
    [240, 220, 40],
    [210, 50, 210],
    [40, 210, 220],
    [250, 140, 20],
    [240, 240, 240],
];

impl Texture {
    pub fn color_at(&self, p: Vec3) -> [u8; 3] {
        match self.kind {
            TextureKind::Plain(c) => c,
            TextureKind::Cells { cell } => {
                let ix = floor(p[0] / cell) as i64;
                let iy = floor(p[1] / cell) as i64;
                let iz = floor(p[2] / cell) as i64;
                PALETTE[(lattice_hash(self.seed, ix, iy, iz) % PALETTE.len() as u64) as usize]
            }
            TextureKind::Noise { scale } => {
                let q = [p[0] / scale, p[1] / scale, p[2] / scale];
                let base = [floor(q[0]), floor(q[1]), floor(q[2])];
                let t = [smooth(q[0] - base[0]), smooth(q[1] - base[1]), smooth(q[2] - base[2])];
                let mut acc = [0.0; 3];
                for corner in 0..8 {
                    let o = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
                    let mut w = 1.0;
                    for a in 0..3 {
                        w *= if o[a] == 1 { t[a] } else { 1.0 - t[a] };
                    }
                    let h = lattice_hash(
                        self.seed,
                        base[0] as i64 + o[0] as i64,
                        base[1] as i64 + o[1] as i64,
                        base[2] as i64 + o[2] as i64,
                    );
                    for (ch, a) in acc.iter_mut().enumerate() {
                        *a += w * ((h >> (16 * ch)) & 0xff) as f64;
                    }
                }
                [acc[0] as u8, acc[1] as u8, acc[2] as u8]
            }
        }
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn lattice_hash(seed: u64, x: i64, y: i64, z: i64) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [x, y, z] {
        h = splitmix(h ^ (v as u64));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    pub kind: SceneKind,
    pub cameras: usize,
    pub width: u32,
    pub height: u32,
    pub focal: f64,
    /// Displacement amplitude, mm.
    pub amplitude: f64,
    /// Plane waves: cycles per mm. Sphere bumps: bumps per radian of arc
    /// across one bump.
    pub frequency: f64,
    /// Plane side length or sphere radius, mm.
    pub size: f64,
    /// Plane: cells per side of the coarse grid. Sphere: icosphere levels.
    pub resolution: usize,
    /// Subdivision levels between the coarse mesh and the refined surface.
    pub subdiv_levels: u32,
    /// Distance of every camera to the origin, mm.
    pub camera_distance: f64,
    /// Camera elevation above the `z = 0` plane, degrees.
    pub elevation_deg: f64,
    pub texture: Texture,
    pub background: [u8; 3],
}

impl SceneConfig {
    pub fn plane_wave() -> Self {
        SceneConfig {
            kind: SceneKind::PlaneWave,
            cameras: 8,
            width: 512,
            height: 512,
            focal: 1100.0,
            amplitude: 10.0,
            frequency: 1.0 / 400.0,
            size: 400.0,
            resolution: 16,
            subdiv_levels: 1,
            camera_distance: 1000.0,
            elevation_deg: 50.0,
            texture: Texture {
                kind: TextureKind::Cells { cell: 25.0 },
                seed: 7,
            },
            background: [0, 0, 0],
        }
    }

    pub fn sphere_bumps() -> Self {
        SceneConfig {
            kind: SceneKind::SphereBumps,
            frequency: 1.5,
            size: 150.0,
            resolution: 3,
            elevation_deg: 20.0,
            ..SceneConfig::plane_wave()
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.cameras < 2 {
            return Err(SynthError::InvalidConfig("need at least 2 cameras"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(SynthError::InvalidConfig("empty image"));
        }
        if !(self.size > 0.0 && self.camera_distance > self.size) {
            return Err(SynthError::InvalidConfig("cameras must sit outside the object"));
        }
        if !(self.elevation_deg > -89.0 && self.elevation_deg < 89.0) {
            return Err(SynthError::InvalidConfig("elevation must be within (-89, 89) degrees"));
        }
        if self.resolution == 0 {
            return Err(SynthError::InvalidConfig("resolution must be >= 1"));
        }
        if !self.amplitude.is_finite() || !self.frequency.is_finite() {
            return Err(SynthError::InvalidConfig("non-finite amplitude or frequency"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub config: SceneConfig,
    /// Input to the refinement.
    pub coarse: Mesh,
    /// `coarse` subdivided `subdiv_levels` times.
    pub base: Mesh,
    pub normals: Vec<Vec3>,
    /// True displacement per vertex of `base`.
    pub k_true: Vec<f64>,
    /// `base` displaced by `k_true`.
    pub truth: Mesh,
    pub cameras: Vec<CameraSpec>,
    pub images: Vec<RgbImage>,
}

pub fn make_scene(config: &SceneConfig) -> Result<SyntheticScene, SynthError> {
    config.validate()?;
    let coarse = match config.kind {
        SceneKind::PlaneWave => plane_grid(config.size, config.resolution)?,
        SceneKind::SphereBumps => icosphere(config.size, config.resolution as u32)?,
    };
    let base = subdivide(&coarse, config.subdiv_levels);
    let normals = compute_normals(&base)?;
    let k_true: Vec<f64> = base.vertices().iter().map(|&p| displacement_field(config, p)).collect();
    let truth_vertices: Vec<Vec3> = base
        .vertices()
        .iter()
        .zip(&normals)
        .zip(&k_true)
        .map(|((&p, &n), &k)| add(p, scale(n, k)))
        .collect();
    let truth = base.with_vertices(truth_vertices)?;
    let cameras = camera_ring(config)?;
    let images = crate::par::map_range(cameras.len(), |c| {
        render_textured(
            truth.vertices(),
            base.vertices(),
            truth.faces(),
            &config.texture,
            &cameras[c],
            config.background,
        )
    });
    Ok(SyntheticScene {
        config: *config,
        coarse,
        base,
        normals,
        k_true,
        truth,
        cameras,
        images,
    })
}

impl SyntheticScene {
    pub fn frame(&self) -> FrameInput {
        FrameInput {
            mesh: self.coarse.clone(),
            images: self.images.clone(),
        }
    }

    /// True displacement of each Gaussian, by its vertex.
    pub fn k_true_for(&self, gaussians: &[SurfaceGaussian]) -> Vec<f64> {
        gaussians.iter().map(|g| self.k_true[g.vertex]).collect()
    }

    /// RMS of `k - k_true` over refinable vertices of `base`.
    pub fn k_rmse(&self, k_per_vertex: &[f64]) -> f64 {
        let pairs = self
            .base
            .refinable()
            .iter()
            .zip(k_per_vertex.iter().zip(&self.k_true))
            .filter(|(&r, _)| r)
            .map(|(_, (&k, &t))| (k, t));
        rmse(pairs)
    }
}

/// Root mean square difference of the pairs; 0 for none.
pub fn rmse(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for (a, b) in pairs {
        sum += (a - b) * (a - b);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sqrt(sum / n as f64)
    }
}

fn displacement_field(config: &SceneConfig, p: Vec3) -> f64 {
    let a = config.amplitude;
    if a == 0.0 {
        return 0.0;
    }
    match config.kind {
        SceneKind::PlaneWave => {
            let w = 2.0 * PI * config.frequency;
            a * sin(w * p[0]) * sin(w * p[1])
        }
        SceneKind::SphereBumps => {
            let Some(dir) = normalize(p) else {
                return 0.0;
            };
            let half_width = (1.0 / config.frequency.abs().max(1e-9)).min(PI / 4.0);
            let mut k = 0.0;
            for d in dir {
                for sign in [1.0, -1.0] {
                    let c = (sign * d).clamp(-1.0, 1.0);
                    let angle = libm::acos(c);
                    if angle < half_width {
                        let q = angle / half_width;
                        let w = 1.0 - q * q;
                        k += w * w;
                    }
                }
            }
            a * k
        }
    }
}

/// Flat square grid in `z = 0`, centered on the origin, normals `+z`.
pub fn plane_grid(side: f64, cells: usize) -> Result<Mesh, SynthError> {
    let n = cells;
    let step = side / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([-side / 2.0 + step * i as f64, -side / 2.0 + step * j as f64, 0.0]);
        }
    }
    let at = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    Ok(Mesh::new(vertices, faces)?)
}

/// Icosahedron subdivided `levels` times with every vertex pushed onto the
/// sphere of the given radius. Faces wind outward.
pub fn icosphere(radius: f64, levels: u32) -> Result<Mesh, SynthError> {
    let t = (1.0 + sqrt(5.0)) / 2.0;
    let raw: [Vec3; 12] = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut mesh = Mesh::new(raw.to_vec(), faces)?;
    for _ in 0..levels {
        mesh = subdivide(&mesh, 1);
        let on_sphere: Vec<Vec3> = mesh.vertices().iter().map(|&v| normalize(v).unwrap_or(v)).collect();
        mesh = mesh.with_vertices(on_sphere)?;
    }
    let scaled: Vec<Vec3> = mesh
        .vertices()
        .iter()
        .map(|&v| scale(normalize(v).unwrap_or(v), radius))
        .collect();
    Ok(mesh.with_vertices(scaled)?)
}

/// Cameras evenly spaced in azimuth at the configured distance and
/// elevation, all looking at the origin with `+z` up.
pub fn camera_ring(config: &SceneConfig) -> Result<Vec<CameraSpec>, SynthError> {
    let elevation = config.elevation_deg * PI / 180.0;
    (0..config.cameras)
        .map(|c| {
            let azimuth = 2.0 * PI * c as f64 / config.cameras as f64;
            let eye = scale(
                [
                    cos(elevation) * cos(azimuth),
                    cos(elevation) * sin(azimuth),
                    sin(elevation),
                ],
                config.camera_distance,
            );
            Ok(CameraSpec::look_at(
                eye,
                [0.0; 3],
                [0.0, 0.0, 1.0],
                config.focal,
                config.width,
                config.height,
            )?)
        })
        .collect()
}

/// Rasterizes the triangles and colors every covered pixel with `shade`.
pub fn render<F>(
    positions: &[Vec3],
    faces: &[[usize; 3]],
    cam: &CameraSpec,
    background: [u8; 3],
    shade: F,
) -> (RgbImage, FrameBuffer)
where
    F: Fn(usize, [f64; 3]) -> [u8; 3],
{
    let fb = rasterize(positions, faces, cam);
    let mut image = RgbImage::new(fb.width(), fb.height(), background);
    for y in 0..fb.height() {
        for x in 0..fb.width() {
            if let Some(f) = fb.fragment(x, y) {
                image.set(x, y, shade(f.face, f.bary));
            }
        }
    }
    (image, fb)
}

/// Renders a mesh whose texture is looked up at the `material` position of
/// each surface point.
pub fn render_textured(
    positions: &[Vec3],
    material: &[Vec3],
    faces: &[[usize; 3]],
    texture: &Texture,
    cam: &CameraSpec,
    background: [u8; 3],
) -> RgbImage {
    render(positions, faces, cam, background, |face, b| {
        let [i, j, k] = faces[face];
        let mut p = [0.0; 3];
        for a in 0..3 {
            p[a] = b[0] * material[i][a] + b[1] * material[j][a] + b[2] * material[k][a];
        }
        texture.color_at(p)
    })
    .0
}

/// Mean HSV color error of a rendered model against input images.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReprojectionMetric {
    pub per_camera: Vec<f64>,
    /// Compared pixels per camera.
    pub covered: Vec<usize>,
    /// Mean over all compared pixels of all cameras.
    pub overall: f64,
}

/// Per-vertex colors from the Gaussians attached to the vertices.
pub fn vertex_colors(vertex_count: usize, gaussians: &[SurfaceGaussian]) -> Vec<Option<Hsv>> {
    gaussian_lookup(vertex_count, gaussians)
        .into_iter()
        .map(|g| g.and_then(|i| gaussians[i].color))
        .collect()
}

/// Renders the mesh with vertex colors interpolated in RGB and compares it
/// with each image over the pixels covered by fully colored triangles.
pub fn reprojection_error(
    mesh: &Mesh,
    colors: &[Option<Hsv>],
    images: &[RgbImage],
    cams: &[CameraSpec],
    metric: HueMetric,
) -> ReprojectionMetric {
    let rgb: Vec<Option<Rgb>> = colors.iter().map(|c| c.map(hsv_to_rgb)).collect();
    let per: Vec<(f64, usize)> = crate::par::map_range(cams.len(), |c| {
        let fb = rasterize(mesh.vertices(), mesh.faces(), &cams[c]);
        let image = &images[c];
        let mut sum = 0.0;
        let mut count = 0usize;
        for y in 0..fb.height().min(image.height()) {
            for x in 0..fb.width().min(image.width()) {
                let Some(f) = fb.fragment(x, y) else {
                    continue;
                };
                let [i, j, k] = mesh.faces()[f.face];
                let (Some(a), Some(b), Some(d)) = (rgb[i], rgb[j], rgb[k]) else {
                    continue;
                };
                let w = f.bary;
                let model = Rgb::new(
                    w[0] * a.r + w[1] * b.r + w[2] * d.r,
                    w[0] * a.g + w[1] * b.g + w[2] * d.g,
                    w[0] * a.b + w[1] * b.b + w[2] * d.b,
                );
                sum += color_distance_with(rgb_to_hsv(model), rgb_to_hsv(image.rgb(x, y)), metric);
                count += 1;
            }
        }
        (sum, count)
    });
    let total: f64 = per.iter().map(|p| p.0).sum();
    let n: usize = per.iter().map(|p| p.1).sum();
    ReprojectionMetric {
        per_camera: per
            .iter()
            .map(|&(s, c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect(),
        covered: per.iter().map(|p| p.1).collect(),
        overall: if n == 0 { 0.0 } else { total / n as f64 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("quadrature did not converge after {refinements} refinements")]
pub struct QuadratureError {
    pub refinements: u32,
}

/// Maximum number of grid halvings of the quadrature.
pub const MAX_REFINEMENTS: u32 = 12;
const QUADRATURE_RTOL: f64 = 1e-6;

/// Numeric overlap `T(delta) * integral of G_s G_i` of two un-normalized
/// isotropic Gaussians `exp(-|x - mu|^2 / (2 sigma^2))`, integrated over
/// the union of their `+-6 sigma` boxes with the trapezoid rule. The grid
/// is halved until two successive results agree to 1e-6 relative.
pub fn quadrature_overlap(
    mu_s: [f64; 2],
    sigma_s: f64,
    color_s: Hsv,
    mu_i: [f64; 2],
    sigma_i: f64,
    color_i: Hsv,
    params: &EnergyParams,
) -> Result<f64, QuadratureError> {
    let t = crate::energy::wendland(
        color_distance_with(color_s, color_i, params.hue_metric),
        params.delta_color,
    );
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * quadrature_product(&[(mu_s, sigma_s), (mu_i, sigma_i)])?)
}

/// Integral of the product of the given Gaussians over the union of their
/// `+-6 sigma` boxes.
pub fn quadrature_product(gaussians: &[([f64; 2], f64)]) -> Result<f64, QuadratureError> {
    let mut value = 1.0;
    for axis in 0..2 {
        let lo = gaussians
            .iter()
            .map(|(m, s)| m[axis] - 6.0 * s)
            .fold(f64::INFINITY, f64::min);
        let hi = gaussians
            .iter()
            .map(|(m, s)| m[axis] + 6.0 * s)
            .fold(f64::NEG_INFINITY, f64::max);
        let f = |x: f64| {
            gaussians
                .iter()
                .map(|(m, s)| {
                    let d = x - m[axis];
                    -d * d / (2.0 * s * s)
                })
                .sum::<f64>()
        };
        value *= trapezoid(|x| exp(f(x)), lo, hi)?;
    }
    Ok(value)
}

fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64, QuadratureError> {
    let mut n = 16usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = 0.5 * (f(lo) + f(hi)) + (1..n).map(|j| f(lo + h * j as f64)).sum::<f64>();
    let mut prev = sum * h;
    for _ in 0..MAX_REFINEMENTS {
        // add the midpoints of the current intervals
        sum += (0..n).map(|j| f(lo + h * (j as f64 + 0.5))).sum::<f64>();
        n *= 2;
        h = (hi - lo) / n as f64;
        let next = sum * h;
        if (next - prev).abs() <= QUADRATURE_RTOL * next.abs().max(prev.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(QuadratureError {
        refinements: MAX_REFINEMENTS,
    })
}

/// Central differences of the total energy in every displacement, with
/// visibility held fixed.
pub fn finite_diff_gradient(
    model: &EnergyModel,
    gaussians: &[SurfaceGaussian],
    visibility: &VisibilityMask,
    h: f64,
) -> Result<Vec<f64>, EnergyError> {
    finite_diff(gaussians, h, |g| Ok(model.total_energy(g, visibility)?.total))
}

/// Central differences of the similarity energy alone.
pub fn finite_diff_similarity(
    model: &EnergyModel,
    gaussians: &[SurfaceGaussian],
    visibility: &VisibilityMask,
    h: f64,
) -> Result<Vec<f64>, EnergyError> {
    finite_diff(gaussians, h, |g| Ok(model.total_energy(g, visibility)?.similarity))
}

fn finite_diff<F>(gaussians: &[SurfaceGaussian], h: f64, energy: F) -> Result<Vec<f64>, EnergyError>
where
    F: Fn(&[SurfaceGaussian]) -> Result<f64, EnergyError>,
{
    let mut work = gaussians.to_vec();
    let mut grad = Vec::with_capacity(gaussians.len());
    for s in 0..gaussians.len() {
        let k = gaussians[s].k;
        work[s].k = k + h;
        let up = energy(&work)?;
        work[s].k = k - h;
        let down = energy(&work)?;
        work[s].k = k;
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Central differences of an arbitrary scalar function.
pub fn finite_diff_fn<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|s| {
            work[s] = x[s] + h;
            let up = f(&work);
            work[s] = x[s] - h;
            let down = f(&work);
            work[s] = x[s];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Ray/triangle intersection distance along `dir`, edges inclusive.
pub fn ray_triangle(origin: Vec3, dir: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let e1 = sub(b, a);
    let e2 = sub(c, a);
    let p = cross(dir, e2);
    let det = dot(e1, p);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    let tv = sub(origin, a);
    let u = dot(tv, p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = cross(tv, e1);
    let v = dot(dir, q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = dot(e2, q) * inv;
    (t > 0.0).then_some(t)
}

/// Visibility by casting the ray of the pixel under each Gaussian through
/// every triangle. Same front-facing, in-image and depth-slack rules as
/// the depth-buffer test.
pub fn raycast_visibility(
    mesh: &Mesh,
    gaussians: &[SurfaceGaussian],
    cams: &[CameraSpec],
    tolerance: f64,
) -> VisibilityMask {
    let positions = current_positions(mesh, gaussians);
    let mut mask = VisibilityMask::new(cams.len(), gaussians.len(), false);
    for (c, cam) in cams.iter().enumerate() {
        let depth_of = |p: Vec3| cam.project_point_h(p)[2];
        for (s, g) in gaussians.iter().enumerate() {
            let mean = g.mean();
            if dot(g.normal, sub(cam.center(), mean)) <= 0.0 {
                continue;
            }
            let Some((uv, depth)) = cam.project(mean) else {
                continue;
            };
            if !cam.contains_pixel(uv) {
                continue;
            }
            let pixel = [floor(uv[0]) + 0.5, floor(uv[1]) + 0.5];
            let Some(dir) = cam.ray_direction(pixel) else {
                continue;
            };
            let mut nearest = f64::INFINITY;
            for &[a, b, d] in mesh.faces() {
                let (pa, pb, pd) = (positions[a], positions[b], positions[d]);
                if depth_of(pa) <= NEAR_DEPTH || depth_of(pb) <= NEAR_DEPTH || depth_of(pd) <= NEAR_DEPTH {
                    continue;
                }
                if let Some(t) = ray_triangle(cam.center(), dir, pa, pb, pd) {
                    let hit = depth_of(add(cam.center(), scale(dir, t)));
                    nearest = nearest.min(hit);
                }
            }
            mask.set(c, s, depth <= nearest + tolerance);
        }
    }
    mask
}
