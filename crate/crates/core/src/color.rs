//! RGB/HSV conversion and the color distance used for Gaussian matching.
//!
//! Every component is normalized to `[0, 1]`, hue included.

use crate::math::{fabs, floor, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl Rgb {
    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Rgb { r, g, b }
    }

    pub fn from_u8(px: [u8; 3]) -> Self {
        Rgb::new(px[0] as f64 / 255.0, px[1] as f64 / 255.0, px[2] as f64 / 255.0)
    }

    /// Nearest 8-bit value per channel, clamped to `[0, 255]`.
    pub fn to_u8(self) -> [u8; 3] {
        let q = |c: f64| {
            let c = if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) };
            floor(c * 255.0 + 0.5) as u8
        };
        [q(self.r), q(self.g), q(self.b)]
    }
}

impl Hsv {
    pub const fn new(h: f64, s: f64, v: f64) -> Self {
        Hsv { h, s, v }
    }
}

/// Hue treatment in [`color_distance_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HueMetric {
    /// Hue difference measured around the hue circle.
    #[default]
    Circular,
    /// Plain difference of hue values, as in a flat Euclidean HSV space.
    Linear,
}

/// Standard HSV with hue scaled to `[0, 1)`; achromatic inputs get hue 0.
pub fn rgb_to_hsv(c: Rgb) -> Hsv {
    let max = c.r.max(c.g).max(c.b);
    let min = c.r.min(c.g).min(c.b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta <= 0.0 {
        0.0
    } else if max == c.r {
        let mut h = (c.g - c.b) / delta;
        if h < 0.0 {
            h += 6.0;
        }
        h / 6.0
    } else if max == c.g {
        ((c.b - c.r) / delta + 2.0) / 6.0
    } else {
        ((c.r - c.g) / delta + 4.0) / 6.0
    };
    Hsv::new(if h >= 1.0 { 0.0 } else { h }, s, v)
}

pub fn hsv_to_rgb(c: Hsv) -> Rgb {
    let h6 = (c.h - floor(c.h)) * 6.0;
    let sector = floor(h6);
    let f = h6 - sector;
    let v = c.v;
    let p = v * (1.0 - c.s);
    let q = v * (1.0 - c.s * f);
    let t = v * (1.0 - c.s * (1.0 - f));
    match sector as i32 {
        0 => Rgb::new(v, t, p),
        1 => Rgb::new(q, v, p),
        2 => Rgb::new(p, v, t),
        3 => Rgb::new(p, q, v),
        4 => Rgb::new(t, p, v),
        _ => Rgb::new(v, p, q),
    }
}

/// Euclidean HSV distance with circular hue.
pub fn color_distance(a: Hsv, b: Hsv) -> f64 {
    color_distance_with(a, b, HueMetric::Circular)
}

pub fn color_distance_with(a: Hsv, b: Hsv, metric: HueMetric) -> f64 {
    let raw = fabs(a.h - b.h);
    let dh = match metric {
        HueMetric::Circular => raw.min(1.0 - raw),
        HueMetric::Linear => raw,
    };
    let ds = a.s - b.s;
    let dv = a.v - b.v;
    sqrt(dh * dh + ds * ds + dv * dv)
}

/// Running mean of RGB samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct RgbAccumulator {
    sum: [f64; 3],
    count: usize,
}

impl RgbAccumulator {
    pub fn push(&mut self, c: Rgb) {
        self.sum[0] += c.r;
        self.sum[1] += c.g;
        self.sum[2] += c.b;
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Option<Rgb> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as f64;
        Some(Rgb::new(self.sum[0] / n, self.sum[1] / n, self.sum[2] / n))
    }
}
