//! Self-fusion: similarity-weighted averaging of neighbouring B-scans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, Image, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Align {
    #[default]
    None,
    /// Integer translation maximizing zero-normalized cross-correlation.
    Shift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    /// Neighbours taken on each side of the centre slice.
    pub radius: usize,
    /// Side of the square similarity window; odd.
    pub patch: usize,
    /// Weight bandwidth in intensity units.
    pub h: f64,
    pub include_center: bool,
    pub align: Align,
    /// Search range for `Align::Shift`, capped at a quarter of the smaller side.
    pub max_shift: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            radius: 3,
            patch: 7,
            h: 0.5,
            include_center: true,
            align: Align::None,
            max_shift: 8,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::Config("fusion radius must be at least 1".into()));
        }
        if self.patch < 3 || self.patch.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "fusion patch must be odd and >= 3, got {}",
                self.patch
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!(
                "fusion bandwidth must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }
}

/// Per-pixel fusion weights; at every pixel the weights of the centre (when
/// included) and all neighbours sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    pub center: Option<Image>,
    pub neighbors: Vec<Image>,
}

impl WeightField {
    /// All weight maps, centre first when present.
    pub fn maps(&self) -> impl Iterator<Item = &Image> {
        self.center.iter().chain(&self.neighbors)
    }
}

/// Summed-area table with a zero row and column prepended.
struct Integral {
    stride: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(width: usize, height: usize, values: impl Iterator<Item = f64>) -> Self {
        let stride = width + 1;
        let mut sums = vec![0.0; stride * (height + 1)];
        let mut values = values;
        for y in 0..height {
            let mut row = 0.0;
            for x in 0..width {
                row += values.next().expect("value count matches dims");
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { stride, sums }
    }

    /// Sum over `[x0, x1) × [y0, y1)`.
    fn window(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let s = self.stride;
        self.sums[y1 * s + x1] - self.sums[y0 * s + x1] - self.sums[y1 * s + x0] + self.sums[y0 * s + x0]
    }
}

/// Raw weights `exp(-SSD / (h² P))`, where SSD runs over the `patch × patch`
/// window around each pixel (clipped to the image) and `P` is its pixel count,
/// normalized pixel-wise together with a unit centre weight when included.
pub fn similarity_weights(center: &Image, neighbors: &[Image], cfg: &FusionConfig) -> Result<WeightField> {
    cfg.validate()?;
    if neighbors.is_empty() {
        return Err(Error::Fusion("similarity weights need at least one neighbour".into()));
    }
    for n in neighbors {
        ensure_same_dims(center, n)?;
    }
    let (w, h) = center.dims();
    let r = cfg.patch / 2;
    let inv_h2 = 1.0 / (cfg.h * cfg.h);
    let mut raw: Vec<Vec<f64>> = neighbors
        .iter()
        .map(|n| {
            let sq = center.data().iter().zip(n.data()).map(|(a, b)| (a - b) * (a - b));
            let table = Integral::new(w, h, sq);
            let mut out = Vec::with_capacity(w * h);
            for y in 0..h {
                let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
                for x in 0..w {
                    let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
                    let count = ((x1 - x0) * (y1 - y0)) as f64;
                    out.push((-table.window(x0, y0, x1, y1) / count * inv_h2).exp());
                }
            }
            out
        })
        .collect();
    let base = if cfg.include_center { 1.0 } else { 0.0 };
    let mut center_w = cfg.include_center.then(|| vec![0.0; w * h]);
    for p in 0..w * h {
        let total = base + raw.iter().map(|m| m[p]).sum::<f64>();
        if total > 0.0 {
            raw.iter_mut().for_each(|m| m[p] /= total);
            if let Some(c) = center_w.as_mut() {
                c[p] = base / total;
            }
        } else {
            // every neighbour underflowed: fall back to uniform weights
            let n = raw.len() as f64;
            raw.iter_mut().for_each(|m| m[p] = 1.0 / n);
        }
    }
    let to_image = |v: Vec<f64>| Image::new(w, h, v).expect("weight dims match");
    Ok(WeightField {
        center: center_w.map(to_image),
        neighbors: raw.into_iter().map(to_image).collect(),
    })
}

/// Translates `img` by `(dx, dy)`: `out(x, y) = img(x - dx, y - dy)`, edges replicated.
pub fn shift_image(img: &Image, dx: isize, dy: isize) -> Image {
    Image::from_fn(img.width(), img.height(), |x, y| {
        img.get_clamped(x as isize - dx, y as isize - dy)
    })
}

fn overlap_zncc(moving: &Image, fixed: &Image, dx: isize, dy: isize) -> Option<f64> {
    let (w, h) = (fixed.width() as isize, fixed.height() as isize);
    let (x0, x1) = (dx.max(0), (w + dx).min(w));
    let (y0, y1) = (dy.max(0), (h + dy).min(h));
    if x1 - x0 < 2 || y1 - y0 < 2 {
        return None;
    }
    let n = ((x1 - x0) * (y1 - y0)) as f64;
    let pairs = || {
        (y0..y1).flat_map(move |y| {
            (x0..x1).map(move |x| {
                (
                    moving.get((x - dx) as usize, (y - dy) as usize),
                    fixed.get(x as usize, y as usize),
                )
            })
        })
    };
    let (sm, sf) = pairs().fold((0.0, 0.0), |(a, b), (m, f)| (a + m, b + f));
    let (mm, mf) = (sm / n, sf / n);
    let (mut cov, mut vm, mut vf) = (0.0, 0.0, 0.0);
    for (m, f) in pairs() {
        cov += (m - mm) * (f - mf);
        vm += (m - mm) * (m - mm);
        vf += (f - mf) * (f - mf);
    }
    if vm <= 0.0 || vf <= 0.0 {
        return None;
    }
    Some(cov / (vm * vf).sqrt())
}

/// Integer shift `(dx, dy)` that best aligns `moving` onto `fixed` when applied
/// with [`shift_image`]. Ties prefer the smallest `|dx| + |dy|`, then row-major order.
pub fn align_integer_shift(moving: &Image, fixed: &Image, max_shift: usize) -> Result<(isize, isize)> {
    ensure_same_dims(moving, fixed)?;
    let cap = moving.width().min(moving.height()) / 4;
    if max_shift > cap {
        return Err(Error::Align(format!(
            "max shift {max_shift} exceeds a quarter of the smaller side ({cap})"
        )));
    }
    for (name, img) in [("moving", moving), ("fixed", fixed)] {
        let (lo, hi) = img.min_max();
        if lo == hi {
            return Err(Error::Align(format!("{name} image is constant")));
        }
    }
    let m = max_shift as isize;
    let mut best: Option<(f64, isize, isize)> = None;
    for dy in -m..=m {
        for dx in -m..=m {
            let Some(score) = overlap_zncc(moving, fixed, dx, dy) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((s, bx, by)) => {
                    score > s + 1e-12 || ((score - s).abs() <= 1e-12 && dx.abs() + dy.abs() < bx.abs() + by.abs())
                }
            };
            if better {
                best = Some((score, dx, dy));
            }
        }
    }
    best.map(|(_, dx, dy)| (dx, dy))
        .ok_or_else(|| Error::Align("no shift gives a non-degenerate overlap".into()))
}

/// Indices of the slices that may contribute to slice `i` (the window is truncated
/// at the volume ends), centre excluded.
pub fn neighbor_indices(len: usize, i: usize, radius: usize) -> Vec<usize> {
    (i.saturating_sub(radius)..=(i + radius).min(len - 1))
        .filter(|&j| j != i)
        .collect()
}

/// Fuses slice `i` of `vol` with its neighbours.
pub fn fuse_slice(vol: &Volume, i: usize, cfg: &FusionConfig) -> Result<Image> {
    cfg.validate()?;
    if i >= vol.len() {
        return Err(Error::Fusion(format!(
            "slice {i} out of range for {} slices",
            vol.len()
        )));
    }
    let center = &vol.slices()[i];
    let idx = neighbor_indices(vol.len(), i, cfg.radius);
    if idx.is_empty() {
        return if cfg.include_center {
            Ok(center.clone())
        } else {
            Err(Error::Fusion("no neighbouring slices and centre excluded".into()))
        };
    }
    let neighbors: Vec<Image> = idx
        .iter()
        .map(|&j| {
            let n = &vol.slices()[j];
            match cfg.align {
                Align::None => Ok(n.clone()),
                Align::Shift => {
                    let cap = center.width().min(center.height()) / 4;
                    let (dx, dy) = align_integer_shift(n, center, cfg.max_shift.min(cap))?;
                    Ok(shift_image(n, dx, dy))
                }
            }
        })
        .collect::<Result<_>>()?;
    let weights = similarity_weights(center, &neighbors, cfg)?;
    let sources: Vec<&Image> = cfg
        .include_center
        .then_some(center)
        .into_iter()
        .chain(&neighbors)
        .collect();
    let maps: Vec<&Image> = weights.maps().collect();
    let (w, h) = center.dims();
    let mut out = Vec::with_capacity(w * h);
    for p in 0..w * h {
        let first = sources[0].data()[p];
        let (mut lo, mut hi, mut acc) = (first, first, 0.0);
        for (s, m) in sources.iter().zip(&maps) {
            let v = s.data()[p];
            lo = lo.min(v);
            hi = hi.max(v);
            acc += m.data()[p] * v;
        }
        // equal contributions reproduce the value exactly
        out.push(if lo == hi { lo } else { acc.clamp(lo, hi) });
    }
    Image::new(w, h, out)
}

/// Applies [`fuse_slice`] to every slice.
pub fn fuse_volume(vol: &Volume, cfg: &FusionConfig) -> Result<Volume> {
    let indices: Vec<usize> = (0..vol.len()).collect();
    let slices = crate::par::try_map(&indices, |&i| fuse_slice(vol, i, cfg))?;
    Volume::new(vol.subject_id(), slices)
}
