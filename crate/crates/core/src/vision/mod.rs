//! Pixel-level comparison kernel: perceptual image differencing, binary
//! transformation, color quantization/histograms, and histogram distance.

mod pid;

pub use pid::perceptual_diff;

use crate::error::{Error, Result};
use crate::model::{BoundingBox, Raster};

/// Boolean per-pixel mask; `true` marks a perceptually different pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceImage {
    pub width: u32,
    pub height: u32,
    pub mask: Vec<bool>,
}

impl DifferenceImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            mask: vec![false; (width as usize) * (height as usize)],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.mask[(y as usize) * (self.width as usize) + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.mask[(y as usize) * (self.width as usize) + x as usize] = v;
    }

    pub fn canvas(&self) -> BoundingBox {
        BoundingBox::new(0, 0, self.width, self.height)
    }

    pub fn count(&self) -> u64 {
        self.mask.iter().filter(|&&v| v).count() as u64
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&v| v)
    }

    pub fn count_in(&self, region: &BoundingBox) -> u64 {
        match region.intersect(&self.canvas()) {
            None => 0,
            Some(b) => {
                let mut n = 0u64;
                for y in b.y..b.bottom() {
                    for x in b.x..b.right() {
                        if self.get(x as u32, y as u32) {
                            n += 1;
                        }
                    }
                }
                n
            }
        }
    }

    /// Fraction of difference pixels over the whole mask.
    pub fn overall_density(&self) -> f64 {
        let total = self.mask.len() as f64;
        if total == 0.0 {
            0.0
        } else {
            self.count() as f64 / total
        }
    }

    /// Clears every mask pixel inside `region` (dynamic-content exclusion).
    pub fn clear_region(&mut self, region: &BoundingBox) {
        if let Some(b) = region.intersect(&self.canvas()) {
            for y in b.y..b.bottom() {
                for x in b.x..b.right() {
                    self.set(x as u32, y as u32, false);
                }
            }
        }
    }
}

/// Fraction of difference pixels inside `region ∩ canvas`.
pub fn diff_density(diff: &DifferenceImage, region: &BoundingBox) -> Result<f64> {
    let clipped = region.intersect(&diff.canvas()).ok_or(Error::EmptyRegion)?;
    Ok(diff.count_in(&clipped) as f64 / clipped.area() as f64)
}

fn luma(p: &[u8; 3]) -> f64 {
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
}

/// Intensity-independent binary transformation: per-pixel luma thresholded
/// by Otsu's method computed on this image. Output pixels are pure black or
/// pure white; a degenerate (single-level) histogram yields all white.
pub fn binarize(img: &Raster) -> Raster {
    let mut hist = [0u64; 256];
    for p in img.pixels() {
        hist[luma(&p.0).round().clamp(0.0, 255.0) as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &n)| v as f64 * n as f64)
        .sum();

    let mut best_t: Option<usize> = None;
    let mut best_var = 0.0f64;
    let mut w0 = 0u64;
    let mut sum0 = 0.0f64;
    for t in 0..255usize {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let mu0 = sum0 / w0 as f64;
        let mu1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (mu0 - mu1) * (mu0 - mu1);
        if between > best_var {
            best_var = between;
            best_t = Some(t);
        }
    }

    let mut out = Raster::new(img.width(), img.height());
    match best_t {
        None => {
            // Uniform image: all white by convention.
            for p in out.pixels_mut() {
                p.0 = [255, 255, 255];
            }
        }
        Some(t) => {
            for (src, dst) in img.pixels().zip(out.pixels_mut()) {
                let l = luma(&src.0).round().clamp(0.0, 255.0) as usize;
                dst.0 = if l <= t { [0, 0, 0] } else { [255, 255, 255] };
            }
        }
    }
    out
}

pub const HISTOGRAM_BINS_PER_CHANNEL: usize = 16;
pub const HISTOGRAM_BINS: usize = 16 * 16 * 16;

/// 16x16x16 RGB histogram (4 high bits per channel) with per-bin color
/// centroids so exact colors survive quantization for reporting.
#[derive(Debug, Clone)]
pub struct ColorHistogram {
    pub counts: Vec<u32>,
    sums: Vec<[u64; 3]>,
    pub total: u64,
}

impl ColorHistogram {
    pub fn bin_of(p: &[u8; 3]) -> usize {
        (((p[0] >> 4) as usize) << 8) | (((p[1] >> 4) as usize) << 4) | ((p[2] >> 4) as usize)
    }

    /// Mean RGB of the pixels accumulated into `bin`.
    pub fn centroid(&self, bin: usize) -> Option<[u8; 3]> {
        let n = self.counts[bin] as u64;
        if n == 0 {
            return None;
        }
        let s = self.sums[bin];
        Some([
            ((s[0] + n / 2) / n) as u8,
            ((s[1] + n / 2) / n) as u8,
            ((s[2] + n / 2) / n) as u8,
        ])
    }

    pub fn normalized(&self, bin: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[bin] as f64 / self.total as f64
        }
    }
}

/// Accumulates every pixel of `img` into the quantized RGB histogram.
pub fn histogram(img: &Raster) -> ColorHistogram {
    let mut h = ColorHistogram {
        counts: vec![0; HISTOGRAM_BINS],
        sums: vec![[0; 3]; HISTOGRAM_BINS],
        total: 0,
    };
    for p in img.pixels() {
        let bin = ColorHistogram::bin_of(&p.0);
        h.counts[bin] += 1;
        h.sums[bin][0] += p.0[0] as u64;
        h.sums[bin][1] += p.0[1] as u64;
        h.sums[bin][2] += p.0[2] as u64;
        h.total += 1;
    }
    h
}

/// Normalized-Euclidean histogram similarity:
/// `1 - ||h1/n1 - h2/n2||_2 / sqrt(2)`.
///
/// 1.0 exactly on equal normalized histograms; 0.0 on disjoint single-bin
/// histograms (the maximal L2 distance of sqrt(2)).
pub fn histogram_similarity(h1: &ColorHistogram, h2: &ColorHistogram) -> Result<f64> {
    if h1.total == 0 || h2.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let mut sq = 0.0f64;
    for bin in 0..HISTOGRAM_BINS {
        let d = h1.normalized(bin) - h2.normalized(bin);
        sq += d * d;
    }
    Ok(1.0 - sq.sqrt() / std::f64::consts::SQRT_2)
}

/// Centroids of the `k` most populous bins, descending by count, ties
/// broken by lower bin index. Returns fewer than `k` when fewer bins are
/// populated.
pub fn top_colors(h: &ColorHistogram, k: usize) -> Vec<[u8; 3]> {
    let mut bins: Vec<usize> = (0..HISTOGRAM_BINS).filter(|&b| h.counts[b] > 0).collect();
    bins.sort_by(|&a, &b| h.counts[b].cmp(&h.counts[a]).then(a.cmp(&b)));
    bins.into_iter()
        .take(k)
        .filter_map(|b| h.centroid(b))
        .collect()
}
