//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function simulates its own input so the page needs no file
//! access. Images cross the boundary as RGBA bytes ready for `ImageData`.

use sdpa::metrics::{auto_roi_or_regions, MetricReport};
use sdpa::sim::{add_speckle, make_noisy_volume, make_phantom, SimConfig};
use sdpa::{color_scale, fuse_slice, patch_ensemble, DenoiserSpec, EnsembleConfig, FusionConfig, Image, MetricWeights};
use wasm_bindgen::prelude::*;

const PALETTE: [[u8; 3]; 4] = [[230, 97, 1], [94, 60, 153], [27, 158, 119], [217, 95, 2]];

fn rgba(img: &Image) -> Vec<u8> {
    img.data()
        .iter()
        .flat_map(|&v| {
            let b = sdpa::io::to_byte(v);
            [b, b, b, 255]
        })
        .collect()
}

fn js(e: sdpa::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct FusionDemo {
    size: usize,
    clean: Image,
    noisy: Image,
    fused: Image,
    noisy_mse: f64,
    fused_mse: f64,
}

#[wasm_bindgen]
impl FusionDemo {
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn clean_rgba(&self) -> Vec<u8> {
        rgba(&self.clean)
    }
    pub fn noisy_rgba(&self) -> Vec<u8> {
        rgba(&self.noisy)
    }
    pub fn fused_rgba(&self) -> Vec<u8> {
        rgba(&self.fused)
    }
    /// Mean over all slices of MSE(noisy, clean).
    pub fn noisy_mse(&self) -> f64 {
        self.noisy_mse
    }
    pub fn fused_mse(&self) -> f64 {
        self.fused_mse
    }
}

fn fusion(size: usize, slices: usize, looks: u32, seed: u64, radius: usize, h: f64) -> sdpa::Result<FusionDemo> {
    let sim = SimConfig {
        looks,
        seed,
        slices,
        ..Default::default()
    };
    let (clean, vol) = make_noisy_volume(&sim, size, size)?;
    let cfg = FusionConfig {
        radius,
        h,
        ..Default::default()
    };
    let mid = vol.len() / 2;
    let fused = fuse_slice(&vol, mid, &cfg)?;
    let noisy_mse = vol.slices().iter().map(|s| s.mse(&clean)).sum::<sdpa::Result<f64>>()? / vol.len() as f64;
    Ok(FusionDemo {
        size,
        noisy: vol.slices()[mid].clone(),
        fused_mse: fused.mse(&clean)?,
        noisy_mse,
        clean,
        fused,
    })
}

/// Simulates a speckled volume and fuses its middle slice with its neighbours.
#[wasm_bindgen]
pub fn fusion_demo(
    size: usize,
    slices: usize,
    looks: u32,
    seed: u64,
    radius: usize,
    h: f64,
) -> Result<FusionDemo, JsError> {
    fusion(size, slices, looks, seed, radius, h).map_err(js)
}

#[wasm_bindgen]
pub struct EnsembleDemo {
    size: usize,
    noisy: Image,
    candidates: Vec<Image>,
    output: Image,
    winners: Vec<u8>,
    wins: Vec<u32>,
    composites: Vec<f64>,
}

#[wasm_bindgen]
impl EnsembleDemo {
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn noisy_rgba(&self) -> Vec<u8> {
        rgba(&self.noisy)
    }
    pub fn candidate_rgba(&self, i: usize) -> Vec<u8> {
        self.candidates.get(i).map(rgba).unwrap_or_default()
    }
    pub fn output_rgba(&self) -> Vec<u8> {
        rgba(&self.output)
    }
    /// Each pixel tinted by the candidate that won the last patch covering it.
    pub fn winner_rgba(&self) -> Vec<u8> {
        self.winners
            .iter()
            .flat_map(|&w| {
                let [r, g, b] = PALETTE[w as usize % PALETTE.len()];
                [r, g, b, 255]
            })
            .collect()
    }
    pub fn wins(&self) -> Vec<u32> {
        self.wins.clone()
    }
    /// Whole-image composite score of each candidate and then of the output.
    pub fn composites(&self) -> Vec<f64> {
        self.composites.clone()
    }
}

#[allow(clippy::too_many_arguments)]
fn ensemble(
    size: usize,
    looks: u32,
    seed: u64,
    k: usize,
    stride: usize,
    weights: [f64; 4],
    specs: &[DenoiserSpec],
) -> sdpa::Result<EnsembleDemo> {
    let clean = make_phantom(size, size, seed)?;
    let noisy = add_speckle(
        &clean,
        &SimConfig {
            looks,
            seed,
            ..Default::default()
        },
        0,
    )?;
    let candidates = specs
        .iter()
        .map(|s| s.apply(&noisy))
        .collect::<sdpa::Result<Vec<_>>>()?;
    let weights = MetricWeights::new(weights[0], weights[1], weights[2], weights[3])?;
    let cfg = EnsembleConfig {
        k,
        stride,
        weights,
        ..Default::default()
    };
    let (output, decisions) = patch_ensemble(&candidates, &noisy, &cfg)?;

    let mut winners = vec![0u8; size * size];
    let mut wins = vec![0u32; candidates.len()];
    for d in &decisions {
        wins[d.winner] += 1;
        let r = d.patch.rect();
        for y in r.y0..r.y0 + r.height {
            winners[y * size + r.x0..y * size + r.x0 + r.width].fill(d.winner as u8);
        }
    }
    let roi = auto_roi_or_regions(&noisy);
    let composites = candidates
        .iter()
        .chain(std::iter::once(&output))
        .map(|c| Ok(MetricReport::evaluate(c, &noisy, &roi)?.composite(&weights)))
        .collect::<sdpa::Result<Vec<_>>>()?;
    Ok(EnsembleDemo {
        size,
        noisy,
        candidates,
        output,
        winners,
        wins,
        composites,
    })
}

/// Denoises one speckled slice with median and gaussian filters and merges
/// them patch by patch under the given metric weights.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn ensemble_demo(
    size: usize,
    looks: u32,
    seed: u64,
    k: usize,
    stride: usize,
    w_cnr: f64,
    w_msr: f64,
    w_tp: f64,
    w_ep: f64,
) -> Result<EnsembleDemo, JsError> {
    let specs = [
        DenoiserSpec::median(3).map_err(js)?,
        DenoiserSpec::gaussian(1.0).map_err(js)?,
    ];
    ensemble(size, looks, seed, k, stride, [w_cnr, w_msr, w_tp, w_ep], &specs).map_err(js)
}

#[wasm_bindgen]
pub struct ScaleDemo {
    size: usize,
    before: Image,
    after: Image,
    cnr_before: Option<f64>,
    cnr_after: Option<f64>,
}

#[wasm_bindgen]
impl ScaleDemo {
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn before_rgba(&self) -> Vec<u8> {
        rgba(&self.before)
    }
    pub fn after_rgba(&self) -> Vec<u8> {
        rgba(&self.after)
    }
    pub fn cnr_before(&self) -> Option<f64> {
        self.cnr_before
    }
    pub fn cnr_after(&self) -> Option<f64> {
        self.cnr_after
    }
}

fn scale(size: usize, seed: u64, lo: f64, hi: f64) -> sdpa::Result<ScaleDemo> {
    let clean = make_phantom(size, size, seed)?;
    let noisy = add_speckle(
        &clean,
        &SimConfig {
            seed,
            ..Default::default()
        },
        0,
    )?;
    let (min, max) = noisy.min_max();
    let span = (max - min).max(f64::EPSILON);
    let before = noisy.map(|v| lo + (hi - lo) * (v - min) / span);
    let (after, _) = color_scale(&before);
    // the same masks for both so only the intensities differ
    let roi = auto_roi_or_regions(&noisy);
    Ok(ScaleDemo {
        size,
        cnr_before: sdpa::metrics::cnr(&before, &roi)?,
        cnr_after: sdpa::metrics::cnr(&after, &roi)?,
        before,
        after,
    })
}

/// Squeezes a speckled slice into `[lo, hi]` and stretches it back with the
/// min-max color scaling.
#[wasm_bindgen]
pub fn scale_demo(size: usize, seed: u64, lo: f64, hi: f64) -> Result<ScaleDemo, JsError> {
    scale(size, seed, lo, hi).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fusion_reduces_error() {
        let d = fusion(64, 5, 4, 42, 2, 0.5).unwrap();
        assert_eq!(d.fused_rgba().len(), 64 * 64 * 4);
        assert!(d.fused_mse() < 0.5 * d.noisy_mse());
    }

    #[test]
    fn ensemble_accounts_for_every_patch() {
        let specs = [DenoiserSpec::median(3).unwrap(), DenoiserSpec::gaussian(1.0).unwrap()];
        let d = ensemble(64, 4, 3, 16, 4, [3.0, 2.0, 5.0, 0.0], &specs).unwrap();
        let patches = sdpa::patch_grid(64, 64, 16, 4).unwrap().len() as u32;
        assert_eq!(d.wins().iter().sum::<u32>(), patches);
        assert_eq!(d.winner_rgba().len(), 64 * 64 * 4);
        assert_eq!(d.composites().len(), 3);
        assert!(d.candidate_rgba(2).is_empty());
    }

    #[test]
    fn scaling_keeps_cnr() {
        let d = scale(64, 9, 0.3, 0.6).unwrap();
        let (a, b) = (d.cnr_before().unwrap(), d.cnr_after().unwrap());
        assert!((a - b).abs() < 1e-9);
        assert_eq!(d.after.min_max(), (0.0, 1.0));
    }

    #[test]
    fn bad_parameters_are_errors() {
        assert!(fusion(8, 5, 4, 1, 2, 0.5).is_err());
        let specs = [DenoiserSpec::identity()];
        assert!(ensemble(64, 4, 1, 2, 1, [1.0; 4], &specs).is_err());
    }
}
