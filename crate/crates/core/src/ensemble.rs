//! Patch-based ensemble of several denoised candidates, and the pixel-mean
//! voting baseline.
//!
//! Every `k × k` window of the grid is scored once per candidate; the best
//! candidate's pixels are accumulated over the window footprint and each output
//! pixel is the average of all selected contributions that cover it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, patch_grid, Image, PatchRef};
use crate::metrics::{auto_roi_or_regions, MetricReport, MetricWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestModelIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiSource {
    /// Otsu foreground/background of the noisy patch; whole patch as the TP/EP region.
    #[default]
    NoisyPatchOtsu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub k: usize,
    pub stride: usize,
    pub weights: MetricWeights,
    pub tie_break: TieBreak,
    pub roi_source: RoiSource,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            k: 16,
            stride: 4,
            weights: MetricWeights::default(),
            tie_break: TieBreak::LowestModelIndex,
            roi_source: RoiSource::NoisyPatchOtsu,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::Config(format!("patch side must be >= 3, got {}", self.k)));
        }
        if self.stride < 1 || self.stride > self.k {
            return Err(Error::Config(format!(
                "stride must be in 1..={}, got {}",
                self.k, self.stride
            )));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchDecision {
    pub patch: PatchRef,
    pub winner: usize,
    pub scores: Vec<f64>,
}

fn check_candidates(candidates: &[Image], noisy: &Image) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::Ensemble("at least one candidate is required".into()));
    }
    for c in candidates {
        ensure_same_dims(c, noisy)?;
    }
    Ok(())
}

/// Composite score of every candidate on one patch, all scored against the ROI
/// derived from the noisy patch.
pub fn score_patch(candidates: &[Image], noisy: &Image, patch: PatchRef, cfg: &EnsembleConfig) -> Result<Vec<f64>> {
    check_candidates(candidates, noisy)?;
    let rect = patch.rect();
    let noisy_patch = noisy.crop(rect)?;
    let RoiSource::NoisyPatchOtsu = cfg.roi_source;
    let roi = auto_roi_or_regions(&noisy_patch);
    candidates
        .iter()
        .map(|c| {
            let crop = c.crop(rect)?;
            Ok(MetricReport::evaluate(&crop, &noisy_patch, &roi)?.composite(&cfg.weights))
        })
        .collect()
}

fn pick_winner(scores: &[f64], tie: TieBreak) -> usize {
    let TieBreak::LowestModelIndex = tie;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Running per-pixel average that returns a value bit-exactly when every
/// contribution to a pixel was that same value.
struct Accumulator {
    sum: Vec<f64>,
    count: Vec<u32>,
    first: Vec<f64>,
    uniform: Vec<bool>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            count: vec![0; n],
            first: vec![0.0; n],
            uniform: vec![true; n],
        }
    }

    #[inline]
    fn add(&mut self, p: usize, v: f64) {
        if self.count[p] == 0 {
            self.first[p] = v;
        } else if v != self.first[p] {
            self.uniform[p] = false;
        }
        self.sum[p] += v;
        self.count[p] += 1;
    }

    fn finish(self, width: usize, height: usize) -> Result<Image> {
        let mut out = Vec::with_capacity(self.sum.len());
        for p in 0..self.sum.len() {
            if self.count[p] == 0 {
                return Err(Error::Ensemble(format!("pixel {p} not covered by any patch")));
            }
            out.push(if self.uniform[p] {
                self.first[p]
            } else {
                self.sum[p] / self.count[p] as f64
            });
        }
        Image::new(width, height, out)
    }
}

/// Runs the patch ensemble and returns the blended image with one decision per patch.
pub fn patch_ensemble(
    candidates: &[Image],
    noisy: &Image,
    cfg: &EnsembleConfig,
) -> Result<(Image, Vec<PatchDecision>)> {
    cfg.validate()?;
    check_candidates(candidates, noisy)?;
    let (w, h) = noisy.dims();
    let grid = patch_grid(w, h, cfg.k, cfg.stride)?;
    // scoring may run in parallel; accumulation below is sequential in grid order
    let decisions = crate::par::try_map(&grid, |&patch| {
        let scores = score_patch(candidates, noisy, patch, cfg)?;
        let winner = pick_winner(&scores, cfg.tie_break);
        Ok(PatchDecision { patch, winner, scores })
    })?;
    let mut acc = Accumulator::new(w * h);
    for d in &decisions {
        let src = &candidates[d.winner];
        let PatchRef { x0, y0, k } = d.patch;
        for y in y0..y0 + k {
            for x in x0..x0 + k {
                acc.add(y * w + x, src.get(x, y));
            }
        }
    }
    Ok((acc.finish(w, h)?, decisions))
}

/// Pixel-wise mean of all candidates.
pub fn voting_ensemble(candidates: &[Image]) -> Result<Image> {
    let first = candidates
        .first()
        .ok_or_else(|| Error::Ensemble("at least one candidate is required".into()))?;
    for c in candidates {
        ensure_same_dims(first, c)?;
    }
    let mut acc = Accumulator::new(first.len());
    for c in candidates {
        for (p, &v) in c.data().iter().enumerate() {
            acc.add(p, v);
        }
    }
    acc.finish(first.width(), first.height())
}

/// CSV header for [`decision_rows`] with `n` candidates.
pub fn decisions_header(n: usize) -> String {
    let scores: Vec<String> = (0..n).map(|i| format!("score_{i}")).collect();
    format!("slice,x0,y0,k,winner,{}", scores.join(","))
}

pub fn decision_rows(slice: usize, decisions: &[PatchDecision]) -> Vec<String> {
    decisions
        .iter()
        .map(|d| {
            let scores: Vec<String> = d.scores.iter().map(|s| format!("{s:.9}")).collect();
            format!(
                "{slice},{},{},{},{},{}",
                d.patch.x0,
                d.patch.y0,
                d.patch.k,
                d.winner,
                scores.join(",")
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{auto_roi, composite_score, ThresholdMethod};
    use crate::sim::{add_speckle, make_phantom, SimConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen_range(0.05..0.95))
    }

    #[test]
    fn identical_candidates_score_equally() {
        let noisy = random(16, 16, 1);
        let cand = random(16, 16, 2);
        let patch = PatchRef { x0: 0, y0: 0, k: 16 };
        let s = score_patch(&[cand.clone(), cand], &noisy, patch, &EnsembleConfig::default()).unwrap();
        assert_eq!(s[0], s[1]);
    }

    #[test]
    fn noisy_candidate_has_unit_tp_and_ep() {
        let noisy = random(16, 16, 3);
        let roi = auto_roi(&noisy, ThresholdMethod::Otsu).unwrap();
        let r = MetricReport::evaluate(&noisy, &noisy, &roi).unwrap();
        assert!((r.tp.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.ep.unwrap() - 1.0).abs() < 1e-12);
        let tp_only = EnsembleConfig {
            weights: MetricWeights::new(0.0, 0.0, 1.0, 1.0).unwrap(),
            ..Default::default()
        };
        let s = score_patch(
            std::slice::from_ref(&noisy),
            &noisy,
            PatchRef { x0: 0, y0: 0, k: 16 },
            &tp_only,
        )
        .unwrap();
        assert!((s[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scores_match_metric_composition() {
        let noisy = random(24, 24, 4);
        let cands = [random(24, 24, 5), random(24, 24, 6)];
        let cfg = EnsembleConfig {
            weights: MetricWeights::new(3.0, 2.0, 5.0, 1.0).unwrap(),
            ..Default::default()
        };
        let patch = PatchRef { x0: 4, y0: 8, k: 16 };
        let scores = score_patch(&cands, &noisy, patch, &cfg).unwrap();
        let np = noisy.crop(patch.rect()).unwrap();
        let roi = auto_roi(&np, ThresholdMethod::Otsu).unwrap();
        for (c, s) in cands.iter().zip(&scores) {
            let expect = composite_score(&c.crop(patch.rect()).unwrap(), &np, &roi, &cfg.weights).unwrap();
            assert!((s - expect).abs() <= 1e-6 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn flat_noisy_patch_scores_without_panicking() {
        let noisy = Image::filled(16, 16, 0.5);
        let cand = random(16, 16, 7);
        let s = score_patch(
            &[cand],
            &noisy,
            PatchRef { x0: 0, y0: 0, k: 16 },
            &EnsembleConfig::default(),
        )
        .unwrap();
        assert_eq!(s, vec![0.0]);
    }

    #[test]
    fn single_and_identical_candidates_pass_through() {
        let noisy = random(40, 37, 8);
        let cand = random(40, 37, 9);
        let cfg = EnsembleConfig::default();
        let (out, _) = patch_ensemble(std::slice::from_ref(&cand), &noisy, &cfg).unwrap();
        assert_eq!(out, cand);
        let (out, _) = patch_ensemble(&[cand.clone(), cand.clone(), cand.clone()], &noisy, &cfg).unwrap();
        assert_eq!(out, cand);
    }

    #[test]
    fn clean_candidate_wins_everywhere() {
        let clean = make_phantom(64, 64, 3).unwrap();
        let noisy = add_speckle(
            &clean,
            &SimConfig {
                looks: 4,
                seed: 1,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let heavy = add_speckle(
            &clean,
            &SimConfig {
                looks: 1,
                seed: 2,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let (out, decisions) = patch_ensemble(&[clean.clone(), heavy], &noisy, &EnsembleConfig::default()).unwrap();
        if decisions.iter().all(|d| d.winner == 0) {
            assert_eq!(out, clean);
        }
        let wins = decisions.iter().filter(|d| d.winner == 0).count();
        assert!(
            wins as f64 >= 0.95 * decisions.len() as f64,
            "{wins}/{}",
            decisions.len()
        );
    }

    #[test]
    fn winners_are_optimal_and_ties_go_low() {
        let noisy = random(32, 32, 10);
        let cands = [random(32, 32, 11), random(32, 32, 12), random(32, 32, 11)];
        let (_, decisions) = patch_ensemble(&cands, &noisy, &EnsembleConfig::default()).unwrap();
        for d in &decisions {
            assert!(d.scores.iter().all(|&s| s <= d.scores[d.winner]));
            assert_eq!(d.scores[0], d.scores[2]);
            assert_ne!(d.winner, 2);
        }
    }

    #[test]
    fn permutation_with_distinct_scores_keeps_output() {
        let noisy = random(32, 32, 13);
        let a = random(32, 32, 14);
        let b = random(32, 32, 15);
        let cfg = EnsembleConfig::default();
        let (ab, da) = patch_ensemble(&[a.clone(), b.clone()], &noisy, &cfg).unwrap();
        let (ba, db) = patch_ensemble(&[b, a], &noisy, &cfg).unwrap();
        assert!(da.iter().all(|d| d.scores[0] != d.scores[1]));
        for (x, y) in ab.data().iter().zip(ba.data()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(da.iter().zip(&db).all(|(x, y)| x.winner != y.winner));
    }

    #[test]
    fn output_is_convex_in_selected_values() {
        let noisy = random(30, 30, 16);
        let cands = [random(30, 30, 17), random(30, 30, 18)];
        let (out, _) = patch_ensemble(&cands, &noisy, &EnsembleConfig::default()).unwrap();
        for p in 0..out.len() {
            let (a, b) = (cands[0].data()[p], cands[1].data()[p]);
            assert!(out.data()[p] >= a.min(b) - 1e-15 && out.data()[p] <= a.max(b) + 1e-15);
        }
    }

    #[test]
    fn errors_and_config() {
        let noisy = random(16, 16, 19);
        assert!(matches!(
            patch_ensemble(&[], &noisy, &EnsembleConfig::default()),
            Err(Error::Ensemble(_))
        ));
        assert!(matches!(
            patch_ensemble(&[random(15, 16, 1)], &noisy, &EnsembleConfig::default()),
            Err(Error::Shape(_))
        ));
        let bad = EnsembleConfig {
            k: 2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EnsembleConfig {
            stride: 17,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn voting_is_pixel_mean() {
        let img = random(9, 9, 20);
        assert_eq!(voting_ensemble(std::slice::from_ref(&img)).unwrap(), img);
        assert_eq!(voting_ensemble(&vec![img.clone(); 5]).unwrap(), img);
        let half = voting_ensemble(&[Image::filled(4, 4, 0.0), Image::filled(4, 4, 1.0)]).unwrap();
        assert!(half.data().iter().all(|&v| v == 0.5));
        assert!(matches!(voting_ensemble(&[]), Err(Error::Ensemble(_))));
    }

    #[test]
    fn decision_csv_layout() {
        let d = PatchDecision {
            patch: PatchRef { x0: 4, y0: 8, k: 16 },
            winner: 1,
            scores: vec![1.0, 2.5],
        };
        assert_eq!(decisions_header(2), "slice,x0,y0,k,winner,score_0,score_1");
        assert_eq!(decision_rows(3, &[d]), vec!["3,4,8,16,1,1.000000000,2.500000000"]);
    }
}
