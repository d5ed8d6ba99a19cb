//! Synthetic layered phantoms and seeded speckle noise.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, Volume};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of looks; speckle is Gamma(L, 1/L) with mean 1 and variance 1/L.
    pub looks: u32,
    /// Standard deviation of additive Gaussian noise.
    pub sigma_add: f64,
    pub seed: u64,
    pub slices: usize,
    /// Maximum vertical drift of the anatomy between slices, in pixels.
    pub jitter: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            looks: 4,
            sigma_add: 0.0,
            seed: 42,
            slices: 20,
            jitter: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.looks < 1 {
            return Err(Error::Config("looks must be at least 1".into()));
        }
        if !(self.sigma_add >= 0.0 && self.sigma_add.is_finite()) {
            return Err(Error::Config("sigma_add must be non-negative".into()));
        }
        if self.slices < 1 {
            return Err(Error::Config("slices must be at least 1".into()));
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return Err(Error::Config("jitter must be non-negative".into()));
        }
        Ok(())
    }

    /// Independent, reproducible random stream for one slice.
    pub fn slice_rng(&self, slice_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(slice_index as u64);
        rng
    }
}

/// Layer geometry of a retina-like phantom.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    /// Mean intensity of each band, top to bottom.
    levels: Vec<f64>,
    /// Resting depth of each inner boundary as a fraction of the height.
    depths: Vec<f64>,
    /// Boundary ripple amplitude as a fraction of the height, per boundary.
    ripple: Vec<f64>,
    ripple_phase: Vec<f64>,
    wave_amp: f64,
    wave_periods: f64,
    wave_phase: f64,
}

impl Phantom {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_9a47_0b5c_a11e);
        let bands = rng.gen_range(5..=9usize);
        let mut levels: Vec<f64> = (0..bands)
            .map(|i| 0.12 + 0.76 * i as f64 / (bands - 1) as f64)
            .collect();
        levels.shuffle(&mut rng);
        let gap = 0.84 / bands as f64;
        let depths = (1..bands)
            .map(|i| 0.08 + gap * i as f64 + rng.gen_range(-0.15..0.15) * gap)
            .collect();
        let ripple = (1..bands).map(|_| rng.gen_range(0.0..0.2) * gap).collect();
        let ripple_phase = (1..bands).map(|_| rng.gen_range(0.0..TAU)).collect();
        Self {
            levels,
            depths,
            ripple,
            ripple_phase,
            wave_amp: rng.gen_range(0.02..0.06),
            wave_periods: rng.gen_range(0.5..1.5),
            wave_phase: rng.gen_range(0.0..TAU),
        }
    }

    pub fn bands(&self) -> usize {
        self.levels.len()
    }

    /// Renders the phantom shifted down by `dy` pixels.
    pub fn render(&self, width: usize, height: usize, dy: f64) -> Image {
        let (w, h) = (width as f64, height as f64);
        Image::from_fn(width, height, |x, y| {
            let u = x as f64 / w;
            let wave = self.wave_amp * (TAU * self.wave_periods * u + self.wave_phase).sin();
            let fy = (y as f64 + 0.5 - dy) / h - wave;
            let mut band = 0;
            let mut top = 0.0;
            for (i, &d) in self.depths.iter().enumerate() {
                let edge = d + self.ripple[i] * (TAU * 3.0 * u + self.ripple_phase[i]).sin();
                if fy >= edge {
                    band = i + 1;
                    top = edge;
                }
            }
            // gentle within-band shading so no region is perfectly flat
            let shade = 0.03 * ((fy - top) * 6.0).tanh() + 0.01 * (TAU * 2.0 * u).cos();
            (self.levels[band] + shade).clamp(0.05, 0.95)
        })
    }
}

/// Deterministic layered phantom with intensities in `[0.05, 0.95]`.
pub fn make_phantom(width: usize, height: usize, seed: u64) -> Result<Image> {
    if width < 32 || height < 32 {
        return Err(Error::Geometry(format!(
            "phantom needs at least 32x32, got {width}x{height}"
        )));
    }
    Ok(Phantom::from_seed(seed).render(width, height, 0.0))
}

fn speckle_distribution(looks: u32) -> Gamma<f64> {
    Gamma::new(looks as f64, 1.0 / looks as f64).expect("looks >= 1")
}

/// Draws `count` multiplicative speckle factors from the given slice stream.
pub fn speckle_factors(cfg: &SimConfig, slice_index: usize, count: usize) -> Vec<f64> {
    let dist = speckle_distribution(cfg.looks);
    let mut rng = cfg.slice_rng(slice_index);
    (0..count).map(|_| dist.sample(&mut rng)).collect()
}

/// `clamp(x·n + e, 0, 1)` with Gamma speckle `n` and Gaussian `e`, seeded per slice.
pub fn add_speckle(clean: &Image, cfg: &SimConfig, slice_index: usize) -> Result<Image> {
    cfg.validate()?;
    let gamma = speckle_distribution(cfg.looks);
    let normal = Normal::new(0.0, cfg.sigma_add).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = cfg.slice_rng(slice_index);
    Ok(clean.map(|x| {
        let n = gamma.sample(&mut rng);
        let e = if cfg.sigma_add > 0.0 {
            normal.sample(&mut rng)
        } else {
            0.0
        };
        (x * n + e).clamp(0.0, 1.0)
    }))
}

/// A clean phantom and `cfg.slices` independent speckle realizations of it.
pub fn make_noisy_volume(cfg: &SimConfig, width: usize, height: usize) -> Result<(Image, Volume)> {
    cfg.validate()?;
    make_phantom(width, height, cfg.seed)?;
    let phantom = Phantom::from_seed(cfg.seed);
    let clean = phantom.render(width, height, 0.0);
    let mut drift = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd41f_7000);
    let slices = (0..cfg.slices)
        .map(|i| {
            let base = if cfg.jitter > 0.0 {
                phantom.render(width, height, drift.gen_range(-cfg.jitter..=cfg.jitter))
            } else {
                clean.clone()
            };
            add_speckle(&base, cfg, i)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((clean, Volume::new(format!("sim-{}", cfg.seed), slices)?))
}
