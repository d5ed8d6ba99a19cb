//! Neighbor2Neighbor sub-sampling and loss.
//!
//! Each 2×2 cell of the image contributes one pixel to `g1` and a different
//! pixel of the same cell to `g2`. The loss of a denoiser `f` on `y` is
//! `rec + gamma * reg` with
//! `rec = mean((f(g1(y)) - g2(y))²)` and
//! `reg = mean(((f(g1(y)) - g2(y)) - (g1(f(y)) - g2(f(y))))²)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::denoise::Denoise;
use crate::error::{Error, Result};
use crate::image::Image;

/// Offset `(dx, dy)` inside a 2×2 cell.
pub type CellOffset = (u8, u8);

pub const CELL_OFFSETS: [CellOffset; 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// The 12 ordered pairs of distinct cell offsets.
pub fn offset_pairs() -> [(CellOffset, CellOffset); 12] {
    let mut out = [((0, 0), (0, 0)); 12];
    let mut n = 0;
    for a in CELL_OFFSETS {
        for b in CELL_OFFSETS {
            if a != b {
                out[n] = (a, b);
                n += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsamplePlan {
    width: usize,
    height: usize,
    seed: u64,
    /// Index into [`offset_pairs`] per cell, row-major.
    cells: Vec<u8>,
}

impl SubsamplePlan {
    pub fn image_dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn cell_dims(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Offsets feeding `g1` and `g2` for the cell at `(cx, cy)`.
    pub fn cell(&self, cx: usize, cy: usize) -> (CellOffset, CellOffset) {
        offset_pairs()[self.cells[cy * (self.width / 2) + cx] as usize]
    }

    /// Builds a plan with explicit pair indices, mainly for tests.
    pub fn from_pair_indices(width: usize, height: usize, cells: Vec<u8>) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::Geometry(format!("need at least 2x2, got {width}x{height}")));
        }
        if cells.len() != (width / 2) * (height / 2) || cells.iter().any(|&c| c >= 12) {
            return Err(Error::Geometry("invalid cell pair indices".into()));
        }
        Ok(Self {
            width,
            height,
            seed: 0,
            cells,
        })
    }
}

/// Draws an ordered pair of distinct offsets uniformly for every 2×2 cell.
pub fn make_plan(width: usize, height: usize, seed: u64) -> Result<SubsamplePlan> {
    if width < 2 || height < 2 {
        return Err(Error::Geometry(format!(
            "sub-sampling needs at least 2x2, got {width}x{height}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..(width / 2) * (height / 2))
        .map(|_| rng.gen_range(0..12u8))
        .collect();
    Ok(SubsamplePlan {
        width,
        height,
        seed,
        cells,
    })
}

/// Gathers the two half-resolution images `(g1, g2)`.
pub fn subsample(img: &Image, plan: &SubsamplePlan) -> Result<(Image, Image)> {
    if img.dims() != plan.image_dims() {
        return Err(Error::Shape(format!(
            "plan is for {}x{}, image is {}x{}",
            plan.width,
            plan.height,
            img.width(),
            img.height()
        )));
    }
    let (cw, ch) = plan.cell_dims();
    let mut g1 = Vec::with_capacity(cw * ch);
    let mut g2 = Vec::with_capacity(cw * ch);
    for cy in 0..ch {
        for cx in 0..cw {
            let ((ax, ay), (bx, by)) = plan.cell(cx, cy);
            g1.push(img.get(2 * cx + ax as usize, 2 * cy + ay as usize));
            g2.push(img.get(2 * cx + bx as usize, 2 * cy + by as usize));
        }
    }
    Ok((Image::new(cw, ch, g1)?, Image::new(cw, ch, g2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct N2nConfig {
    pub gamma: f64,
    pub seed: u64,
}

impl Default for N2nConfig {
    fn default() -> Self {
        Self { gamma: 2.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct N2nLoss {
    pub total: f64,
    pub rec: f64,
    pub reg: f64,
}

pub fn n2n_loss(f: &dyn Denoise, y: &Image, cfg: &N2nConfig, plan: &SubsamplePlan) -> Result<N2nLoss> {
    if !(cfg.gamma >= 0.0 && cfg.gamma.is_finite()) {
        return Err(Error::Config(format!("gamma must be non-negative, got {}", cfg.gamma)));
    }
    let (g1, g2) = subsample(y, plan)?;
    let pred = f.denoise(&g1)?;
    if pred.dims() != g2.dims() {
        return Err(Error::Shape("denoiser changed the image size".into()));
    }
    let full = f.denoise(y)?;
    let (f1, f2) = subsample(&full, plan)?;
    let n = g2.len() as f64;
    let (mut rec, mut reg) = (0.0, 0.0);
    for i in 0..g2.len() {
        let diff = pred.data()[i] - g2.data()[i];
        let consistency = diff - (f1.data()[i] - f2.data()[i]);
        rec += diff * diff;
        reg += consistency * consistency;
    }
    let (rec, reg) = (rec / n, reg / n);
    Ok(N2nLoss {
        total: rec + cfg.gamma * reg,
        rec,
        reg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::DenoiserSpec;

    fn random(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen())
    }

    #[test]
    fn plan_is_deterministic() {
        assert_eq!(make_plan(33, 17, 9).unwrap(), make_plan(33, 17, 9).unwrap());
        assert_ne!(make_plan(64, 64, 9).unwrap(), make_plan(64, 64, 10).unwrap());
        let p = make_plan(33, 17, 9).unwrap();
        assert_eq!(p.len(), 16 * 8);
    }

    #[test]
    fn tiny_plan() {
        let p = make_plan(2, 2, 1).unwrap();
        assert_eq!(p.len(), 1);
        let (a, b) = p.cell(0, 0);
        assert_ne!(a, b);
        assert!(matches!(make_plan(1, 5, 0), Err(Error::Geometry(_))));
    }

    #[test]
    fn pair_frequencies_are_uniform() {
        let mut counts = [0u64; 12];
        let mut cells = 0u64;
        for seed in 0..4 {
            let p = make_plan(100, 100, seed).unwrap();
            for cy in 0..50 {
                for cx in 0..50 {
                    let pair = p.cell(cx, cy);
                    counts[offset_pairs().iter().position(|q| *q == pair).unwrap()] += 1;
                    cells += 1;
                }
            }
        }
        let prob = 1.0 / 12.0;
        let mean = cells as f64 * prob;
        let sd = (cells as f64 * prob * (1.0 - prob)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sd, "{c} vs {mean} ± {sd}");
        }
    }

    #[test]
    fn subsample_gathers_planned_pixels() {
        let img = Image::from_fn(4, 4, |x, y| (y * 4 + x) as f64 / 16.0);
        // pair indices: 0 -> ((0,0),(1,0)), 5 -> ((1,0),(1,1)), 7 -> ((0,1),(1,0)), 11 -> ((1,1),(0,1))
        let plan = SubsamplePlan::from_pair_indices(4, 4, vec![0, 5, 7, 11]).unwrap();
        let (g1, g2) = subsample(&img, &plan).unwrap();
        let px = |x: usize, y: usize| (y * 4 + x) as f64 / 16.0;
        assert_eq!(g1.data(), &[px(0, 0), px(3, 0), px(0, 3), px(3, 3)]);
        assert_eq!(g2.data(), &[px(1, 0), px(3, 1), px(1, 2), px(2, 3)]);
    }

    #[test]
    fn subsample_constant_and_mismatch() {
        let plan = make_plan(7, 5, 3).unwrap();
        let (g1, g2) = subsample(&Image::filled(7, 5, 0.3), &plan).unwrap();
        assert_eq!((g1.dims(), g2.dims()), ((3, 2), (3, 2)));
        assert!(g1.data().iter().chain(g2.data()).all(|&v| v == 0.3));
        assert!(matches!(
            subsample(&Image::filled(6, 5, 0.3), &plan),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn identity_has_zero_regularizer() {
        let y = random(16, 16, 1);
        let plan = make_plan(16, 16, 2).unwrap();
        let loss = n2n_loss(&DenoiserSpec::identity(), &y, &N2nConfig::default(), &plan).unwrap();
        assert_eq!(loss.reg, 0.0);
        let (g1, g2) = subsample(&y, &plan).unwrap();
        assert!((loss.total - g1.mse(&g2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn constant_input_has_zero_loss() {
        let y = Image::filled(10, 10, 0.4);
        let plan = make_plan(10, 10, 2).unwrap();
        for spec in ["gaussian:sigma=1.5", "median:window=5", "identity"] {
            let f: DenoiserSpec = spec.parse().unwrap();
            assert!(n2n_loss(&f, &y, &N2nConfig::default(), &plan).unwrap().total.abs() < 1e-24);
        }
    }

    #[test]
    fn gamma_zero_gives_reconstruction_only() {
        let y = random(16, 16, 4);
        let plan = make_plan(16, 16, 5).unwrap();
        let f = DenoiserSpec::gaussian(1.0).unwrap();
        let cfg = N2nConfig { gamma: 0.0, seed: 0 };
        let loss = n2n_loss(&f, &y, &cfg, &plan).unwrap();
        assert_eq!(loss.total, loss.rec);
        assert!(loss.reg > 0.0);
    }

    #[test]
    fn failing_denoiser_propagates() {
        let y = random(8, 8, 6);
        let plan = make_plan(8, 8, 0).unwrap();
        let broken = |_: &Image| -> Result<Image> { Err(Error::Spec("boom".into())) };
        assert!(matches!(
            n2n_loss(&broken, &y, &N2nConfig::default(), &plan),
            Err(Error::Spec(_))
        ));
    }
}
