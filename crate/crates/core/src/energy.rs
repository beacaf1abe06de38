//! Photo-consistency energy `E = E_sim - w_reg E_reg` and its analytic
//! gradient with respect to every normal displacement `k_s`.
//!
//! `E_sim` sums, per camera and image Gaussian, the color-weighted overlap
//! of all visible projected surface Gaussians, clamped at the image
//! Gaussian's self-overlap and normalized by it. `E_reg` penalizes
//! displacement differences between surface Gaussians that are close on
//! the mesh graph.
//!
//! Energy and gradient share one pass over the (surface, image) pairs; the
//! result is cached in an [`Evaluation`] so the gradient uses exactly the
//! same clamp decisions as the energy it belongs to.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::camera::CameraSpec;
use crate::color::{color_distance_with, HueMetric};
use crate::math::{exp, sqrt};
use crate::mesh::{Edge, Mesh};
use crate::quadtree::{ImageGaussian, ImageGaussianIndex};
use crate::surface::{gaussian_lookup, ProjectedGaussian, SurfaceGaussian};
use crate::visibility::VisibilityMask;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergyError {
    #[error("gaussian state changed since the cached evaluation")]
    StaleCache,
    #[error("{images} image gaussian sets for {cameras} cameras")]
    CameraCount { images: usize, cameras: usize },
    #[error("visibility mask does not match the scene")]
    MaskShape,
    #[error("invalid energy parameter: {0}")]
    InvalidParam(&'static str),
}

/// Closed form used for the overlap of two 2D Gaussians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapForm {
    /// Exact integral of the product of two Gaussians
    /// `exp(-|x - mu|^2 / (2 sigma^2))`:
    /// `2 pi s_s^2 s_i^2 / S * exp(-d^2 / (2 S))`, `S = s_s^2 + s_i^2`.
    #[default]
    Exact,
    /// The variant with exponent `-d^2 / S`. Its self-overlap is the same,
    /// but it decays twice as fast in squared distance.
    Published,
}

impl OverlapForm {
    /// Denominator scale `c` in `exp(-d^2 / (c S))`.
    #[inline]
    pub fn exponent_scale(self) -> f64 {
        match self {
            OverlapForm::Exact => 2.0,
            OverlapForm::Published => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Smoothness weight.
    pub w_reg: f64,
    /// Wendland cutoff for color distance.
    pub delta_color: f64,
    /// Wendland cutoff for graph distance, in edges.
    pub delta_geo: f64,
    /// Pairs whose overlap exponent `d^2 / (c S)` exceeds `cull_factor^2`
    /// are skipped.
    pub cull_factor: f64,
    pub hue_metric: HueMetric,
    pub overlap: OverlapForm,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            w_reg: 1.0,
            delta_color: 0.05,
            delta_geo: 2.0,
            cull_factor: 3.0,
            hue_metric: HueMetric::Circular,
            overlap: OverlapForm::Exact,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if !(self.w_reg >= 0.0) {
            return Err(EnergyError::InvalidParam("w_reg must be >= 0"));
        }
        if !(self.delta_color > 0.0) {
            return Err(EnergyError::InvalidParam("delta_color must be > 0"));
        }
        if !(self.delta_geo > 0.0) {
            return Err(EnergyError::InvalidParam("delta_geo must be > 0"));
        }
        if !(self.cull_factor > 0.0) {
            return Err(EnergyError::InvalidParam("cull_factor must be > 0"));
        }
        Ok(())
    }

    /// Largest center distance at which a pair is still evaluated.
    #[inline]
    pub fn reach(&self, sigma_i: f64, sigma_s: f64) -> f64 {
        sqrt(self.cull_limit(sigma_i * sigma_i + sigma_s * sigma_s))
    }

    #[inline]
    fn cull_limit(&self, var_sum: f64) -> f64 {
        self.cull_factor * self.cull_factor * self.overlap.exponent_scale() * var_sum
    }

    /// True when a pair at squared distance `d2` with variance sum
    /// `var_sum` is skipped.
    #[inline]
    pub fn is_culled(&self, d2: f64, var_sum: f64) -> bool {
        d2 > self.cull_limit(var_sum)
    }
}

/// Compactly supported Wendland falloff
/// `(1 - d/D)^4 (4 d/D + 1)` for `d < D`, else 0.
#[inline]
pub fn wendland(delta: f64, cutoff: f64) -> f64 {
    if delta < cutoff {
        let q = delta / cutoff;
        let a = 1.0 - q;
        let a2 = a * a;
        a2 * a2 * (4.0 * q + 1.0)
    } else {
        0.0
    }
}

/// Overlap of two 2D Gaussians without color weighting or culling.
#[inline]
pub fn overlap_closed_form(mu_s: [f64; 2], sigma_s: f64, mu_i: [f64; 2], sigma_i: f64, form: OverlapForm) -> f64 {
    let ss = sigma_s * sigma_s;
    let si = sigma_i * sigma_i;
    let sum = ss + si;
    let dx = mu_i[0] - mu_s[0];
    let dy = mu_i[1] - mu_s[1];
    let d2 = dx * dx + dy * dy;
    2.0 * PI * (ss * si / sum) * exp(-d2 / (form.exponent_scale() * sum))
}

/// Color-weighted overlap `E_is` of a projected surface Gaussian with an
/// image Gaussian; 0 for culled pairs.
pub fn pair_overlap(g_proj: &ProjectedGaussian, g_img: &ImageGaussian, color_dist: f64, params: &EnergyParams) -> f64 {
    let dx = g_img.mu[0] - g_proj.mu[0];
    let dy = g_img.mu[1] - g_proj.mu[1];
    let var_sum = g_proj.sigma * g_proj.sigma + g_img.sigma * g_img.sigma;
    if params.is_culled(dx * dx + dy * dy, var_sum) {
        return 0.0;
    }
    let t = wendland(color_dist, params.delta_color);
    if t == 0.0 {
        return 0.0;
    }
    t * overlap_closed_form(g_proj.mu, g_proj.sigma, g_img.mu, g_img.sigma, params.overlap)
}

/// Graph neighbor of a surface Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// Graph distance in edges.
    pub distance: u32,
    /// `wendland(distance, delta_geo)`, always positive.
    pub weight: f64,
}

/// Neighborhoods `Psi(s)` of all surface Gaussians within `delta_geo` edges.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborGraph {
    offsets: Vec<usize>,
    entries: Vec<Neighbor>,
}

impl NeighborGraph {
    /// Graph over the Gaussians of `mesh`; two Gaussians are adjacent when
    /// their vertices share a mesh edge.
    pub fn from_mesh(mesh: &Mesh, gaussians: &[SurfaceGaussian], delta_geo: f64) -> Self {
        let lookup = gaussian_lookup(mesh.vertex_count(), gaussians);
        let edges: Vec<Edge> = mesh
            .edges()
            .into_iter()
            .filter_map(|(a, b)| Some((lookup[a]?, lookup[b]?)))
            .collect();
        NeighborGraph::from_edges(gaussians.len(), &edges, delta_geo)
    }

    /// Breadth-first neighborhoods over an explicit undirected edge list.
    pub fn from_edges(n: usize, edges: &[Edge], delta_geo: f64) -> Self {
        let adjacency = crate::mesh::Adjacency::from_edges(n, edges);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        let mut seen = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let mut found = Vec::new();
            seen[s] = 0;
            queue.push_back(s);
            let mut touched = vec![s];
            while let Some(v) = queue.pop_front() {
                let next = seen[v] + 1;
                if !((next as f64) < delta_geo) {
                    continue;
                }
                for &w in adjacency.neighbors(v) {
                    if seen[w] == u32::MAX {
                        seen[w] = next;
                        touched.push(w);
                        queue.push_back(w);
                        found.push(Neighbor {
                            index: w,
                            distance: next,
                            weight: wendland(next as f64, delta_geo),
                        });
                    }
                }
            }
            for t in touched {
                seen[t] = u32::MAX;
            }
            found.retain(|nb| nb.weight > 0.0);
            found.sort_by_key(|nb| nb.index);
            entries.extend(found);
            offsets.push(entries.len());
        }
        NeighborGraph { offsets, entries }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, s: usize) -> &[Neighbor] {
        &self.entries[self.offsets[s]..self.offsets[s + 1]]
    }
}

/// `sum_s sum_{j in Psi(s)} T(delta_sj) (k_s - k_j)^2`; every unordered
/// pair is counted from both ends.
pub fn regularization_energy(k: &[f64], graph: &NeighborGraph) -> f64 {
    let mut total = 0.0;
    for (s, &ks) in k.iter().enumerate() {
        for nb in graph.neighbors(s) {
            let d = ks - k[nb.index];
            total += nb.weight * d * d;
        }
    }
    total
}

/// `dE_reg/dk_s = 4 sum_{j in Psi(s)} T(delta_sj) (k_s - k_j)`.
pub fn regularization_gradient(k: &[f64], graph: &NeighborGraph) -> Vec<f64> {
    k.iter()
        .enumerate()
        .map(|(s, &ks)| {
            4.0 * graph
                .neighbors(s)
                .iter()
                .map(|nb| nb.weight * (ks - k[nb.index]))
                .sum::<f64>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyReport {
    pub total: f64,
    pub similarity: f64,
    pub regularization: f64,
    /// Each camera's share of `similarity`.
    pub per_camera: Vec<f64>,
    /// Image Gaussians whose accumulated overlap reached the clamp.
    pub saturated: usize,
    /// Evaluated (non-culled, color-compatible) pairs.
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy)]
struct PairTerm {
    gaussian: u32,
    image: u32,
    /// `dE_is/dk_s`.
    derivative: f64,
}

#[derive(Debug, Clone)]
struct CameraPass {
    pairs: Vec<PairTerm>,
    sums: Vec<f64>,
}

/// One evaluated (surface, image) pair's share of the similarity gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairContribution {
    pub camera: usize,
    pub image: usize,
    pub gaussian: usize,
    /// The image Gaussian's accumulated overlap reached its clamp.
    pub saturated: bool,
    pub gradient: f64,
}

/// Energy report plus the pair cache its gradient is computed from.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: EnergyReport,
    k_snapshot: Vec<f64>,
    passes: Vec<CameraPass>,
}

impl Evaluation {
    /// Accumulated overlap `sum_s E_is` per image Gaussian of `camera`.
    pub fn overlap_sums(&self, camera: usize) -> &[f64] {
        &self.passes[camera].sums
    }
}

/// Image Gaussians, cameras and neighbor graph for one frame.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    cameras: Vec<CameraSpec>,
    images: Vec<ImageGaussianIndex>,
    graph: NeighborGraph,
    params: EnergyParams,
}

impl EnergyModel {
    pub fn new(
        cameras: Vec<CameraSpec>,
        image_gaussians: Vec<Vec<ImageGaussian>>,
        graph: NeighborGraph,
        params: EnergyParams,
    ) -> Result<Self, EnergyError> {
        params.validate()?;
        if cameras.len() != image_gaussians.len() {
            return Err(EnergyError::CameraCount {
                images: image_gaussians.len(),
                cameras: cameras.len(),
            });
        }
        Ok(EnergyModel {
            cameras,
            images: image_gaussians.into_iter().map(ImageGaussianIndex::new).collect(),
            graph,
            params,
        })
    }

    pub fn params(&self) -> &EnergyParams {
        &self.params
    }

    pub fn cameras(&self) -> &[CameraSpec] {
        &self.cameras
    }

    pub fn graph(&self) -> &NeighborGraph {
        &self.graph
    }

    pub fn image_gaussians(&self, camera: usize) -> &[ImageGaussian] {
        self.images[camera].gaussians()
    }

    /// Replaces the image Gaussians, keeping cameras, graph and params.
    pub fn with_images(&self, image_gaussians: Vec<Vec<ImageGaussian>>) -> Result<Self, EnergyError> {
        EnergyModel::new(self.cameras.clone(), image_gaussians, self.graph.clone(), self.params)
    }

    /// Energy, report and gradient cache in one pass.
    pub fn evaluate(
        &self,
        gaussians: &[SurfaceGaussian],
        visibility: &VisibilityMask,
    ) -> Result<Evaluation, EnergyError> {
        if visibility.camera_count() != self.cameras.len() || visibility.gaussian_count() != gaussians.len() {
            return Err(EnergyError::MaskShape);
        }
        let passes: Vec<CameraPass> =
            crate::par::map_range(self.cameras.len(), |c| self.camera_pass(c, gaussians, visibility));
        let n_c = self.cameras.len() as f64;
        let mut per_camera = Vec::with_capacity(passes.len());
        let mut saturated = 0;
        let mut pairs = 0;
        for (c, pass) in passes.iter().enumerate() {
            let mut acc = 0.0;
            for (g, &sum) in self.images[c].gaussians().iter().zip(&pass.sums) {
                let cap = g.max_overlap();
                if sum >= cap {
                    saturated += 1;
                    acc += 1.0;
                } else {
                    acc += sum / cap;
                }
            }
            per_camera.push(acc / n_c);
            pairs += pass.pairs.len();
        }
        let similarity: f64 = per_camera.iter().sum();
        let k: Vec<f64> = gaussians.iter().map(|g| g.k).collect();
        let regularization = regularization_energy(&k, &self.graph);
        Ok(Evaluation {
            report: EnergyReport {
                total: similarity - self.params.w_reg * regularization,
                similarity,
                regularization,
                per_camera,
                saturated,
                pairs,
            },
            k_snapshot: k,
            passes,
        })
    }

    /// `E_sim` alone, with its cache.
    pub fn similarity_energy(
        &self,
        gaussians: &[SurfaceGaussian],
        visibility: &VisibilityMask,
    ) -> Result<(f64, Evaluation), EnergyError> {
        let e = self.evaluate(gaussians, visibility)?;
        Ok((e.report.similarity, e))
    }

    pub fn total_energy(
        &self,
        gaussians: &[SurfaceGaussian],
        visibility: &VisibilityMask,
    ) -> Result<EnergyReport, EnergyError> {
        Ok(self.evaluate(gaussians, visibility)?.report)
    }

    /// `dE_sim/dk_s`. Image Gaussians at the clamp contribute nothing.
    pub fn similarity_gradient(
        &self,
        gaussians: &[SurfaceGaussian],
        eval: &Evaluation,
    ) -> Result<Vec<f64>, EnergyError> {
        self.check_fresh(gaussians, eval)?;
        let n_c = self.cameras.len() as f64;
        let mut grad = vec![0.0; gaussians.len()];
        for (c, pass) in eval.passes.iter().enumerate() {
            let images = self.images[c].gaussians();
            for p in &pass.pairs {
                let i = p.image as usize;
                let cap = images[i].max_overlap();
                if pass.sums[i] < cap {
                    grad[p.gaussian as usize] += p.derivative / cap / n_c;
                }
            }
        }
        Ok(grad)
    }

    /// `dE/dk_s = dE_sim/dk_s - w_reg dE_reg/dk_s`.
    pub fn gradient(&self, gaussians: &[SurfaceGaussian], eval: &Evaluation) -> Result<Vec<f64>, EnergyError> {
        let mut grad = self.similarity_gradient(gaussians, eval)?;
        let reg = regularization_gradient(&eval.k_snapshot, &self.graph);
        for (g, r) in grad.iter_mut().zip(reg) {
            *g -= self.params.w_reg * r;
        }
        Ok(grad)
    }

    /// Per-pair share of `dE_sim/dk_s`, in evaluation order.
    pub fn pair_contributions(
        &self,
        gaussians: &[SurfaceGaussian],
        eval: &Evaluation,
    ) -> Result<Vec<PairContribution>, EnergyError> {
        self.check_fresh(gaussians, eval)?;
        let n_c = self.cameras.len() as f64;
        let mut out = Vec::new();
        for (c, pass) in eval.passes.iter().enumerate() {
            let images = self.images[c].gaussians();
            for p in &pass.pairs {
                let i = p.image as usize;
                let cap = images[i].max_overlap();
                let saturated = pass.sums[i] >= cap;
                out.push(PairContribution {
                    camera: c,
                    image: i,
                    gaussian: p.gaussian as usize,
                    saturated,
                    gradient: if saturated { 0.0 } else { p.derivative / cap / n_c },
                });
            }
        }
        Ok(out)
    }

    fn check_fresh(&self, gaussians: &[SurfaceGaussian], eval: &Evaluation) -> Result<(), EnergyError> {
        let fresh = gaussians.len() == eval.k_snapshot.len()
            && gaussians
                .iter()
                .zip(&eval.k_snapshot)
                .all(|(g, k)| g.k.to_bits() == k.to_bits());
        if fresh {
            Ok(())
        } else {
            Err(EnergyError::StaleCache)
        }
    }

    fn camera_pass(&self, c: usize, gaussians: &[SurfaceGaussian], visibility: &VisibilityMask) -> CameraPass {
        let cam = &self.cameras[c];
        let index = &self.images[c];
        let params = &self.params;
        let c_exp = params.overlap.exponent_scale();
        let mut pairs = Vec::new();
        for (s, g) in gaussians.iter().enumerate() {
            if !visibility.is_visible(c, s) {
                continue;
            }
            let Some(color) = g.color else {
                continue;
            };
            let h = cam.project_point_h(g.mean());
            let z = h[2];
            if !(z > 0.0) {
                continue;
            }
            let mu = [h[0] / z, h[1] / z];
            let sigma_s = g.sigma_hat * cam.focal() / z;
            let dh = cam.project_direction_h(g.normal);
            let dz = dh[2];
            let dmu = [(dh[0] - mu[0] * dz) / z, (dh[1] - mu[1] * dz) / z];
            let ss = sigma_s * sigma_s;
            index.for_each_near(
                mu,
                |sigma_i| params.reach(sigma_i, sigma_s),
                |i, gi| {
                    let dx = gi.mu[0] - mu[0];
                    let dy = gi.mu[1] - mu[1];
                    let d2 = dx * dx + dy * dy;
                    let si = gi.sigma * gi.sigma;
                    let sum = ss + si;
                    if params.is_culled(d2, sum) {
                        return;
                    }
                    let t = wendland(
                        color_distance_with(gi.color, color, params.hue_metric),
                        params.delta_color,
                    );
                    if t == 0.0 {
                        return;
                    }
                    let e = t * 2.0 * PI * (ss * si / sum) * exp(-d2 / (c_exp * sum));
                    let depth_rate = dz / z;
                    let dlog = 2.0 * depth_rate * (-1.0 + ss / sum) + (2.0 / c_exp) * (dx * dmu[0] + dy * dmu[1]) / sum
                        - (2.0 / c_exp) * d2 * ss * depth_rate / (sum * sum);
                    pairs.push((s as u32, i as u32, e, e * dlog));
                },
            );
        }
        let mut sums = vec![0.0; index.len()];
        let pairs = pairs
            .into_iter()
            .map(|(s, i, e, de)| {
                sums[i as usize] += e;
                PairTerm {
                    gaussian: s,
                    image: i,
                    derivative: de,
                }
            })
            .collect();
        CameraPass { pairs, sums }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Hsv;

    #[test]
    fn wendland_values() {
        assert_eq!(wendland(0.0, 0.05), 1.0);
        assert_eq!(wendland(0.05, 0.05), 0.0);
        assert!((wendland(0.025, 0.05) - 0.1875).abs() < 1e-15);
        assert_eq!(wendland(1.0, 2.0), 0.1875);
        assert_eq!(wendland(2.0, 2.0), 0.0);
    }

    fn proj(mu: [f64; 2], sigma: f64) -> ProjectedGaussian {
        ProjectedGaussian {
            mu,
            sigma,
            depth: 1.0,
            vertex: 0,
            camera: 0,
        }
    }

    fn img(mu: [f64; 2], sigma: f64) -> ImageGaussian {
        ImageGaussian {
            mu,
            sigma,
            color: Hsv::default(),
            camera: 0,
            depth: 0,
        }
    }

    #[test]
    fn self_overlap_is_max_overlap() {
        let p = EnergyParams::default();
        let e = pair_overlap(&proj([3.0, 4.0], 2.0), &img([3.0, 4.0], 2.0), 0.0, &p);
        assert!((e - 4.0 * PI).abs() < 1e-12);
        assert!((e - img([0.0; 2], 2.0).max_overlap()).abs() < 1e-12);
    }

    #[test]
    fn offset_overlap_both_forms() {
        // sigma 1 each, squared distance 2
        let a = proj([0.0, 0.0], 1.0);
        let b = img([1.0, 1.0], 1.0);
        let published = EnergyParams {
            overlap: OverlapForm::Published,
            ..EnergyParams::default()
        };
        let e = pair_overlap(&a, &b, 0.0, &published);
        assert!((e - PI / core::f64::consts::E).abs() < 1e-12);
        let e = pair_overlap(&a, &b, 0.0, &EnergyParams::default());
        assert!((e - PI * (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn color_cutoff_zeroes_overlap() {
        let p = EnergyParams::default();
        assert_eq!(pair_overlap(&proj([0.0; 2], 2.0), &img([0.0; 2], 2.0), 0.05, &p), 0.0);
        assert_eq!(pair_overlap(&proj([0.0; 2], 2.0), &img([0.0; 2], 2.0), 0.3, &p), 0.0);
    }

    #[test]
    fn culled_pairs_are_zero() {
        let p = EnergyParams::default();
        // exponent d^2 / (2 S) with S = 2: cull above d^2 = 36
        assert!(pair_overlap(&proj([0.0; 2], 1.0), &img([5.9, 0.0], 1.0), 0.0, &p) > 0.0);
        assert_eq!(pair_overlap(&proj([0.0; 2], 1.0), &img([6.1, 0.0], 1.0), 0.0, &p), 0.0);
    }

    #[test]
    fn overlap_is_symmetric() {
        for form in [OverlapForm::Exact, OverlapForm::Published] {
            let a = overlap_closed_form([1.0, 2.0], 3.0, [4.0, -1.0], 5.5, form);
            let b = overlap_closed_form([4.0, -1.0], 5.5, [1.0, 2.0], 3.0, form);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn two_vertex_regularizer() {
        let g = NeighborGraph::from_edges(2, &[(0, 1)], 2.0);
        assert_eq!(g.neighbors(0).len(), 1);
        assert_eq!(g.neighbors(0)[0].weight, 0.1875);
        assert_eq!(regularization_energy(&[1.0, 0.0], &g), 0.375);
        assert_eq!(regularization_energy(&[0.7, 0.7], &g), 0.0);
        let grad = regularization_gradient(&[1.0, 0.0], &g);
        assert_eq!(grad, vec![0.75, -0.75]);
    }

    #[test]
    fn two_edges_apart_do_not_interact() {
        // path 0 - 1 - 2: 0 and 2 are two edges apart
        let g = NeighborGraph::from_edges(3, &[(0, 1), (1, 2)], 2.0);
        assert!(g.neighbors(0).iter().all(|nb| nb.index != 2));
        let e = regularization_energy(&[1.0, 1.0, 0.0], &g);
        assert_eq!(e, 0.375);
        // a wider cutoff reaches further
        let wide = NeighborGraph::from_edges(3, &[(0, 1), (1, 2)], 3.0);
        let n = wide.neighbors(0);
        assert_eq!(n.len(), 2);
        assert_eq!(n[1].distance, 2);
    }

    #[test]
    fn graph_is_symmetric() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5)];
        let g = NeighborGraph::from_edges(6, &edges, 3.5);
        for s in 0..6 {
            for nb in g.neighbors(s) {
                let back = g.neighbors(nb.index).iter().find(|m| m.index == s).unwrap();
                assert_eq!(back.distance, nb.distance);
            }
        }
    }
}
