//! Quad-tree decomposition of an image into 2D image Gaussians.
//!
//! The image is padded (conceptually) to a square power-of-two domain.
//! Patches that lie entirely in the padding are dropped; patches that
//! straddle it average only their real pixels but keep the geometry of the
//! full square. A straddling patch whose center falls outside the image is
//! split further, and dropped if it can no longer be split.

use alloc::vec;
use alloc::vec::Vec;

use crate::color::{rgb_to_hsv, Hsv, Rgb};
use crate::image::RgbImage;
use crate::math::{ceil, floor, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTreeParams {
    pub max_depth: u32,
    /// Largest per-channel RGB standard deviation (normalized to `[0, 1]`)
    /// of a patch that is kept as a leaf.
    pub split_threshold: f64,
    /// Patches with this side length (pixels) or smaller are never split.
    pub min_patch_side: u32,
}

impl Default for QuadTreeParams {
    fn default() -> Self {
        QuadTreeParams {
            max_depth: 8,
            split_threshold: 0.04,
            min_patch_side: 2,
        }
    }
}

/// Gaussian summarizing one color-coherent square patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageGaussian {
    /// Patch center, pixels.
    pub mu: [f64; 2],
    /// Half the patch side, pixels.
    pub sigma: f64,
    /// Average patch color.
    pub color: Hsv,
    pub camera: usize,
    /// Quad-tree level of the patch (root = 0).
    pub depth: u32,
}

impl ImageGaussian {
    /// Self-overlap `pi sigma^2`, the largest overlap any configuration of
    /// surface Gaussians may contribute to this image Gaussian.
    #[inline]
    pub fn max_overlap(&self) -> f64 {
        core::f64::consts::PI * self.sigma * self.sigma
    }
}

struct Integral {
    stride: usize,
    sum: [Vec<u64>; 3],
    sum_sq: [Vec<u64>; 3],
}

impl Integral {
    fn new(img: &RgbImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let len = stride * (h + 1);
        let mut sum = [vec![0u64; len], vec![0u64; len], vec![0u64; len]];
        let mut sum_sq = [vec![0u64; len], vec![0u64; len], vec![0u64; len]];
        for y in 0..h {
            let mut row = [0u64; 3];
            let mut row_sq = [0u64; 3];
            for x in 0..w {
                let px = img.get(x, y);
                for c in 0..3 {
                    let v = px[c] as u64;
                    row[c] += v;
                    row_sq[c] += v * v;
                    let at = (y + 1) * stride + x + 1;
                    sum[c][at] = sum[c][at - stride] + row[c];
                    sum_sq[c][at] = sum_sq[c][at - stride] + row_sq[c];
                }
            }
        }
        Integral { stride, sum, sum_sq }
    }

    fn rect(&self, table: &[u64], x0: usize, y0: usize, x1: usize, y1: usize) -> u64 {
        let s = self.stride;
        table[y1 * s + x1] + table[y0 * s + x0] - table[y0 * s + x1] - table[y1 * s + x0]
    }

    /// Mean color and largest per-channel standard deviation over the
    /// half-open pixel rectangle.
    fn stats(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (Rgb, f64) {
        let n = ((x1 - x0) * (y1 - y0)) as u128;
        let mut mean = [0.0; 3];
        let mut worst = 0.0f64;
        for (c, m) in mean.iter_mut().enumerate() {
            let s = self.rect(&self.sum[c], x0, y0, x1, y1) as u128;
            let sq = self.rect(&self.sum_sq[c], x0, y0, x1, y1) as u128;
            *m = s as f64 / n as f64 / 255.0;
            // n^2 var = n sum(x^2) - (sum x)^2, exact in integers
            let var_n2 = n * sq - s * s;
            let std = sqrt(var_n2 as f64) / n as f64 / 255.0;
            worst = worst.max(std);
        }
        (Rgb::new(mean[0], mean[1], mean[2]), worst)
    }
}

/// Padded square domain side for an image: next power of two of the
/// larger dimension.
pub fn padded_side(width: usize, height: usize) -> usize {
    width.max(height).max(1).next_power_of_two()
}

/// Decomposes `image` into image Gaussians in Morton order of their patches.
pub fn decompose_image(image: &RgbImage, params: &QuadTreeParams, camera: usize) -> Vec<ImageGaussian> {
    let mut out = Vec::new();
    if image.is_empty() {
        return out;
    }
    let integral = Integral::new(image);
    let side = padded_side(image.width(), image.height());
    let mut stack = vec![(0usize, 0usize, side, 0u32)];
    let (w, h) = (image.width(), image.height());
    while let Some((x0, y0, s, depth)) = stack.pop() {
        let x1 = (x0 + s).min(w);
        let y1 = (y0 + s).min(h);
        if x0 >= x1 || y0 >= y1 {
            continue;
        }
        let (mean, std) = integral.stats(x0, y0, x1, y1);
        let half = s as f64 / 2.0;
        let mu = [x0 as f64 + half, y0 as f64 + half];
        let inside = mu[0] <= w as f64 && mu[1] <= h as f64;
        let terminal = depth >= params.max_depth || s as u64 <= params.min_patch_side as u64 || s < 2;
        if !terminal && (std > params.split_threshold || !inside) {
            let c = s / 2;
            // pushed in reverse so children pop in Morton order
            stack.push((x0 + c, y0 + c, c, depth + 1));
            stack.push((x0, y0 + c, c, depth + 1));
            stack.push((x0 + c, y0, c, depth + 1));
            stack.push((x0, y0, c, depth + 1));
        } else if inside {
            out.push(ImageGaussian {
                mu,
                sigma: half,
                color: rgb_to_hsv(mean),
                camera,
                depth,
            });
        }
    }
    out
}

/// Spatial lookup of image Gaussians by center, bucketed per distinct sigma.
#[derive(Debug, Clone)]
pub struct ImageGaussianIndex {
    gaussians: Vec<ImageGaussian>,
    groups: Vec<SigmaGroup>,
}

#[derive(Debug, Clone)]
struct SigmaGroup {
    sigma: f64,
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<usize>,
    members: Vec<usize>,
}

impl ImageGaussianIndex {
    pub fn new(gaussians: Vec<ImageGaussian>) -> Self {
        let mut order: Vec<usize> = (0..gaussians.len()).collect();
        order.sort_by(|&a, &b| gaussians[b].sigma.total_cmp(&gaussians[a].sigma).then(a.cmp(&b)));
        let mut groups = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let sigma = gaussians[order[start]].sigma;
            let mut end = start;
            while end < order.len() && gaussians[order[end]].sigma == sigma {
                end += 1;
            }
            let mut members: Vec<usize> = order[start..end].to_vec();
            members.sort_unstable();
            groups.push(SigmaGroup::build(sigma, &members, &gaussians));
            start = end;
        }
        ImageGaussianIndex { gaussians, groups }
    }

    pub fn gaussians(&self) -> &[ImageGaussian] {
        &self.gaussians
    }

    pub fn len(&self) -> usize {
        self.gaussians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaussians.is_empty()
    }

    /// Calls `visit` with every Gaussian whose center may lie within
    /// `reach(sigma_i)` of `mu` (a superset; the caller applies the exact
    /// test). Visiting order is deterministic.
    pub fn for_each_near<R, F>(&self, mu: [f64; 2], reach: R, mut visit: F)
    where
        R: Fn(f64) -> f64,
        F: FnMut(usize, &ImageGaussian),
    {
        for g in &self.groups {
            let r = reach(g.sigma);
            if !(r >= 0.0) {
                continue;
            }
            let Some((gx0, gx1)) = g.range(mu[0] - r, mu[0] + r, g.origin[0], g.nx) else {
                continue;
            };
            let Some((gy0, gy1)) = g.range(mu[1] - r, mu[1] + r, g.origin[1], g.ny) else {
                continue;
            };
            for gy in gy0..=gy1 {
                for gx in gx0..=gx1 {
                    let cell = gy * g.nx + gx;
                    for &m in &g.members[g.offsets[cell]..g.offsets[cell + 1]] {
                        visit(m, &self.gaussians[m]);
                    }
                }
            }
        }
    }
}

impl SigmaGroup {
    fn build(sigma: f64, members: &[usize], all: &[ImageGaussian]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for &m in members {
            for k in 0..2 {
                lo[k] = lo[k].min(all[m].mu[k]);
                hi[k] = hi[k].max(all[m].mu[k]);
            }
        }
        let n = members.len() as f64;
        let (wx, wy) = (hi[0] - lo[0], hi[1] - lo[1]);
        let cell = (2.0 * sigma).max(sqrt(wx * wy / n)).max(wx.max(wy) / n).max(1e-9);
        let nx = floor(wx / cell) as usize + 1;
        let ny = floor(wy / cell) as usize + 1;
        let cell_of = |p: [f64; 2]| {
            let cx = (floor((p[0] - lo[0]) / cell) as usize).min(nx - 1);
            let cy = (floor((p[1] - lo[1]) / cell) as usize).min(ny - 1);
            cy * nx + cx
        };
        let mut offsets = vec![0usize; nx * ny + 1];
        for &m in members {
            offsets[cell_of(all[m].mu) + 1] += 1;
        }
        for i in 0..nx * ny {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut slots = vec![0usize; members.len()];
        for &m in members {
            let c = cell_of(all[m].mu);
            slots[fill[c]] = m;
            fill[c] += 1;
        }
        SigmaGroup {
            sigma,
            origin: lo,
            cell,
            nx,
            ny,
            offsets,
            members: slots,
        }
    }

    fn range(&self, lo: f64, hi: f64, origin: f64, n: usize) -> Option<(usize, usize)> {
        let a = floor((lo - origin) / self.cell);
        let b = ceil((hi - origin) / self.cell);
        if b < 0.0 || a > (n - 1) as f64 || a.is_nan() || b.is_nan() {
            return None;
        }
        let a = a.max(0.0) as usize;
        let b = (b.min((n - 1) as f64)) as usize;
        Some((a, b))
    }
}
