//! No-reference quality metrics: CNR, MSR, TP and EP, plus their weighted composite.
//!
//! All standard deviations are population deviations. A metric whose formula
//! degenerates (zero variance, zero contrast, empty region) is reported as
//! `None` and contributes nothing to a composite score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, Image, Rect};
use crate::io::to_byte;

/// Foreground/background masks plus the rectangular regions used by TP and EP.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiSet {
    width: usize,
    height: usize,
    foreground: Vec<bool>,
    background: Vec<bool>,
    rois: Vec<Rect>,
}

impl RoiSet {
    pub fn new(
        width: usize,
        height: usize,
        foreground: Vec<bool>,
        background: Vec<bool>,
        rois: Vec<Rect>,
    ) -> Result<Self> {
        let n = width * height;
        if foreground.len() != n || background.len() != n {
            return Err(Error::Roi(format!("masks must have {n} entries")));
        }
        if foreground.iter().zip(&background).any(|(&f, &b)| f && b) {
            return Err(Error::Roi("foreground and background overlap".into()));
        }
        let nf = foreground.iter().filter(|&&f| f).count();
        let nb = background.iter().filter(|&&b| b).count();
        if nf < 2 || nb < 2 {
            return Err(Error::Roi(format!(
                "foreground ({nf} px) and background ({nb} px) need at least 2 pixels each"
            )));
        }
        let set = Self::regions_only(width, height, rois)?;
        Ok(Self {
            foreground,
            background,
            ..set
        })
    }

    /// A set with empty foreground/background, for images no threshold can split.
    /// CNR and MSR are undefined on it; TP and EP still use `rois`.
    pub fn regions_only(width: usize, height: usize, rois: Vec<Rect>) -> Result<Self> {
        if rois.is_empty() {
            return Err(Error::Roi("at least one ROI rectangle is required".into()));
        }
        for r in &rois {
            r.check_inside(width, height).map_err(|e| Error::Roi(e.to_string()))?;
        }
        Ok(Self {
            width,
            height,
            foreground: vec![false; width * height],
            background: vec![false; width * height],
            rois,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn foreground(&self) -> &[bool] {
        &self.foreground
    }

    pub fn background(&self) -> &[bool] {
        &self.background
    }

    pub fn rois(&self) -> &[Rect] {
        &self.rois
    }

    fn check(&self, img: &Image) -> Result<()> {
        if img.dims() != (self.width, self.height) {
            return Err(Error::Shape(format!(
                "roi set is {}x{}, image is {}x{}",
                self.width,
                self.height,
                img.width(),
                img.height()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMethod {
    #[default]
    Otsu,
}

/// Otsu threshold over the 256-level byte histogram of `img`.
///
/// Returns the level `t` that maximizes between-class variance when classes are
/// split as `byte < t` and `byte >= t`; ties go to the smallest `t`. `None` when
/// fewer than two levels are occupied.
pub fn otsu_level(img: &Image) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[to_byte(v) as usize] += 1;
    }
    let total = img.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best: Option<(u8, f64)> = None;
    for t in 1..256 {
        w0 += hist[t - 1] as f64;
        sum0 += (t - 1) as f64 * hist[t - 1] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((t as u8, between));
        }
    }
    best.map(|(t, _)| t)
}

/// Splits `reference` into foreground (at or above the Otsu level) and background,
/// with the whole image as the single TP/EP region.
pub fn auto_roi(reference: &Image, method: ThresholdMethod) -> Result<RoiSet> {
    let ThresholdMethod::Otsu = method;
    let level =
        otsu_level(reference).ok_or_else(|| Error::Roi("constant image: no threshold separates two classes".into()))?;
    let foreground: Vec<bool> = reference.data().iter().map(|&v| to_byte(v) >= level).collect();
    let background = foreground.iter().map(|f| !f).collect();
    let (w, h) = reference.dims();
    RoiSet::new(w, h, foreground, background, vec![Rect::full(w, h)])
}

/// Like [`auto_roi`] but falls back to [`RoiSet::regions_only`] when the image
/// cannot be split into two classes of at least two pixels.
pub fn auto_roi_or_regions(reference: &Image) -> RoiSet {
    let (w, h) = reference.dims();
    auto_roi(reference, ThresholdMethod::Otsu)
        .unwrap_or_else(|_| RoiSet::regions_only(w, h, vec![Rect::full(w, h)]).expect("full-image rect is valid"))
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mean: f64,
    var: f64,
    count: usize,
    /// All samples bit-identical; `var` is then exactly zero.
    constant: bool,
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> Moments {
    let mut first = None;
    let mut constant = true;
    let (sum, count) = values.clone().fold((0.0, 0usize), |(s, n), v| {
        match first {
            None => first = Some(v),
            Some(f) if f != v => constant = false,
            _ => {}
        }
        (s + v, n + 1)
    });
    if count == 0 {
        return Moments {
            mean: 0.0,
            var: 0.0,
            count,
            constant: true,
        };
    }
    if constant {
        let v = first.unwrap_or(0.0);
        return Moments {
            mean: v,
            var: 0.0,
            count,
            constant,
        };
    }
    let mean = sum / count as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    Moments {
        mean,
        var,
        count,
        constant,
    }
}

fn masked<'a>(img: &'a Image, mask: &'a [bool]) -> impl Iterator<Item = f64> + Clone + 'a {
    img.data().iter().zip(mask).filter(|(_, &m)| m).map(|(&v, _)| v)
}

fn rect_values(img: &Image, r: Rect) -> impl Iterator<Item = f64> + Clone + '_ {
    (r.y0..r.y0 + r.height).flat_map(move |y| (r.x0..r.x0 + r.width).map(move |x| img.get(x, y)))
}

/// Contrast-to-noise ratio in decibels (base-10 log).
pub fn cnr(img: &Image, roi: &RoiSet) -> Result<Option<f64>> {
    roi.check(img)?;
    let f = moments(masked(img, roi.foreground()));
    let b = moments(masked(img, roi.background()));
    if f.count == 0 || b.count == 0 || (f.constant && b.constant) {
        return Ok(None);
    }
    let contrast = (f.mean - b.mean).abs();
    let noise = (0.5 * (f.var + b.var)).sqrt();
    if contrast == 0.0 || noise == 0.0 {
        return Ok(None);
    }
    Ok(Some(10.0 * (contrast / noise).log10()))
}

/// Foreground mean over foreground standard deviation.
pub fn msr(img: &Image, roi: &RoiSet) -> Result<Option<f64>> {
    roi.check(img)?;
    let f = moments(masked(img, roi.foreground()));
    if f.count == 0 || f.constant {
        return Ok(None);
    }
    Ok(Some(f.mean / f.var.sqrt()))
}

/// Texture preservation, averaged over the ROI rectangles.
pub fn tp(denoised: &Image, noisy: &Image, roi: &RoiSet) -> Result<Option<f64>> {
    ensure_same_dims(denoised, noisy)?;
    roi.check(noisy)?;
    let mut total = 0.0;
    for &r in roi.rois() {
        let d = moments(rect_values(denoised, r));
        let n = moments(rect_values(noisy, r));
        if n.constant || n.mean <= 0.0 || d.mean < 0.0 {
            return Ok(None);
        }
        total += d.var / n.var * (d.mean / n.mean).sqrt();
    }
    Ok(Some(total / roi.rois().len() as f64))
}

/// 4-neighbour Laplacian over the interior of `r` (its one-pixel border excluded).
fn interior_laplacian(img: &Image, r: Rect) -> Vec<f64> {
    let mut out = Vec::with_capacity((r.width - 2) * (r.height - 2));
    for y in r.y0 + 1..r.y0 + r.height - 1 {
        for x in r.x0 + 1..r.x0 + r.width - 1 {
            let c = img.get(x, y);
            // differences first so flat neighbourhoods give exactly zero
            out.push(
                (img.get(x - 1, y) - c) + (img.get(x + 1, y) - c) + (img.get(x, y - 1) - c) + (img.get(x, y + 1) - c),
            );
        }
    }
    out
}

/// Mean-centres `v`; `None` when all entries are equal (nothing left after centring).
fn centered(mut v: Vec<f64>) -> Option<Vec<f64>> {
    if v.windows(2).all(|p| p[0] == p[1]) {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    Some(v)
}

/// Edge preservation: correlation of mean-centred Laplacians, averaged over ROIs.
pub fn ep(denoised: &Image, noisy: &Image, roi: &RoiSet) -> Result<Option<f64>> {
    ensure_same_dims(denoised, noisy)?;
    roi.check(noisy)?;
    if let Some(r) = roi.rois().iter().find(|r| r.width < 3 || r.height < 3) {
        return Err(Error::Roi(format!(
            "EP needs ROIs of at least 3x3, got {}x{}",
            r.width, r.height
        )));
    }
    let mut total = 0.0;
    for &r in roi.rois() {
        let (Some(a), Some(b)) = (
            centered(interior_laplacian(denoised, r)),
            centered(interior_laplacian(noisy, r)),
        ) else {
            return Ok(None);
        };
        let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let aa: f64 = a.iter().map(|x| x * x).sum();
        let bb: f64 = b.iter().map(|x| x * x).sum();
        if aa == 0.0 || bb == 0.0 {
            return Ok(None);
        }
        total += (ab / (aa * bb).sqrt()).clamp(-1.0, 1.0);
    }
    Ok(Some(total / roi.rois().len() as f64))
}

/// Non-negative weights of the composite score `w_cnr·CNR + w_msr·MSR + w_tp·TP + w_ep·EP`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    pub cnr: f64,
    pub msr: f64,
    pub tp: f64,
    pub ep: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self {
            cnr: 3.0,
            msr: 2.0,
            tp: 5.0,
            ep: 0.0,
        }
    }
}

impl MetricWeights {
    pub fn new(cnr: f64, msr: f64, tp: f64, ep: f64) -> Result<Self> {
        let w = Self { cnr, msr, tp, ep };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.cnr, self.msr, self.tp, self.ep];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("metric weights must be finite and non-negative".into()));
        }
        if all.iter().all(|&w| w == 0.0) {
            return Err(Error::Config("at least one metric weight must be positive".into()));
        }
        Ok(())
    }
}

/// The four metrics for one image pair; `None` marks an undefined value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricReport {
    pub cnr: Option<f64>,
    pub msr: Option<f64>,
    pub tp: Option<f64>,
    pub ep: Option<f64>,
}

impl MetricReport {
    /// CNR and MSR of `denoised`, TP and EP of `denoised` against `noisy`.
    pub fn evaluate(denoised: &Image, noisy: &Image, roi: &RoiSet) -> Result<Self> {
        Ok(Self {
            cnr: cnr(denoised, roi)?,
            msr: msr(denoised, roi)?,
            tp: tp(denoised, noisy, roi)?,
            ep: ep(denoised, noisy, roi)?,
        })
    }

    /// Weighted sum with undefined metrics contributing zero.
    pub fn composite(&self, w: &MetricWeights) -> f64 {
        let term = |wt: f64, m: Option<f64>| if wt == 0.0 { 0.0 } else { wt * m.unwrap_or(0.0) };
        term(w.cnr, self.cnr) + term(w.msr, self.msr) + term(w.tp, self.tp) + term(w.ep, self.ep)
    }

    /// Names of the metrics that carry a positive weight but were undefined.
    pub fn substituted(&self, w: &MetricWeights) -> Vec<&'static str> {
        [
            ("cnr", w.cnr, self.cnr),
            ("msr", w.msr, self.msr),
            ("tp", w.tp, self.tp),
            ("ep", w.ep, self.ep),
        ]
        .into_iter()
        .filter(|(_, wt, m)| *wt > 0.0 && m.is_none())
        .map(|(n, _, _)| n)
        .collect()
    }
}

pub fn composite_score(denoised: &Image, noisy: &Image, roi: &RoiSet, w: &MetricWeights) -> Result<f64> {
    Ok(MetricReport::evaluate(denoised, noisy, roi)?.composite(w))
}

/// Formats a metric value for CSV output, `NA` when undefined.
pub fn csv_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "NA".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_roi(values: &[f64], fg: &[bool]) -> (Image, RoiSet) {
        let img = Image::new(values.len(), 1, values.to_vec()).unwrap();
        let bg = fg.iter().map(|f| !f).collect();
        let roi = RoiSet::new(values.len(), 1, fg.to_vec(), bg, vec![Rect::full(values.len(), 1)]).unwrap();
        (img, roi)
    }

    #[test]
    fn otsu_two_class_split() {
        let img = Image::from_fn(8, 4, |x, _| if x < 4 { 0.0 } else { 1.0 });
        let roi = auto_roi(&img, ThresholdMethod::Otsu).unwrap();
        for (i, &f) in roi.foreground().iter().enumerate() {
            assert_eq!(f, img.data()[i] == 1.0);
            assert_eq!(roi.background()[i], !f);
        }
        assert_eq!(roi.rois(), &[Rect::full(8, 4)]);
        assert!(matches!(
            auto_roi(&Image::filled(5, 5, 0.4), ThresholdMethod::Otsu),
            Err(Error::Roi(_))
        ));
    }

    #[test]
    fn cnr_known_value() {
        // foreground 10 ± 2, background 2 ± 2 (population)
        let vals = [8.0, 12.0, 0.0, 4.0].map(|v| v / 255.0);
        let (img, roi) = split_roi(&vals, &[true, true, false, false]);
        let c = cnr(&img, &roi).unwrap().unwrap();
        assert!((c - 10.0 * 4f64.log10()).abs() < 1e-12);
        assert!((c - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn cnr_equal_means_undefined() {
        let (img, roi) = split_roi(&[0.1, 0.3, 0.3, 0.1], &[true, true, false, false]);
        assert_eq!(cnr(&img, &roi).unwrap(), None);
    }

    #[test]
    fn msr_known_value() {
        let (img, roi) = split_roi(&[0.1, 0.2, 0.3, 0.9, 0.8], &[true, true, true, false, false]);
        let m = msr(&img, &roi).unwrap().unwrap();
        assert!((m - 0.2 / (0.02f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((m - 2.4495).abs() < 1e-4);
        let (flat, roi) = split_roi(&[0.4, 0.4, 0.1, 0.2], &[true, true, false, false]);
        assert_eq!(msr(&flat, &roi).unwrap(), None);
    }

    #[test]
    fn tp_identity_half_and_constant() {
        let noisy = Image::from_fn(6, 6, |x, y| 0.1 + 0.1 * ((x * 5 + y * 3) % 7) as f64);
        let roi = RoiSet::regions_only(6, 6, vec![Rect::full(6, 6), Rect::new(1, 1, 4, 3)]).unwrap();
        assert!((tp(&noisy, &noisy, &roi).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let half = noisy.map(|v| 0.5 * v);
        let t = tp(&half, &noisy, &roi).unwrap().unwrap();
        assert!((t - 0.25 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((t - 0.17678).abs() < 1e-5);
        let flat = Image::filled(6, 6, 0.3);
        assert_eq!(tp(&noisy, &flat, &roi).unwrap(), None);
        assert!(matches!(
            tp(&noisy, &Image::filled(5, 6, 0.3), &roi),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn ep_identity_inversion_and_shift() {
        let noisy = Image::from_fn(8, 8, |x, y| ((x * 13 + y * 7) % 11) as f64 / 11.0);
        let roi = RoiSet::regions_only(8, 8, vec![Rect::full(8, 8)]).unwrap();
        assert!((ep(&noisy, &noisy, &roi).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let inverted = noisy.map(|v| 1.0 - v);
        assert!((ep(&inverted, &noisy, &roi).unwrap().unwrap() + 1.0).abs() < 1e-12);
        let shifted = noisy.map(|v| v + 0.05);
        assert!((ep(&shifted, &noisy, &roi).unwrap().unwrap() - 1.0).abs() < 1e-12);
        let flat = Image::filled(8, 8, 0.5);
        assert_eq!(ep(&flat, &noisy, &roi).unwrap(), None);
    }

    #[test]
    fn ep_rejects_thin_roi() {
        let img = Image::filled(8, 8, 0.5);
        let roi = RoiSet::regions_only(8, 8, vec![Rect::new(0, 0, 2, 8)]).unwrap();
        assert!(matches!(ep(&img, &img, &roi), Err(Error::Roi(_))));
    }

    #[test]
    fn composite_examples() {
        let report = MetricReport {
            cnr: Some(6.0206),
            msr: Some(2.4495),
            tp: Some(1.0),
            ep: None,
        };
        let w = MetricWeights::default();
        assert!((report.composite(&w) - 27.9608).abs() < 1e-9);
        assert!(report.substituted(&w).is_empty());
        assert_eq!(MetricReport::default().composite(&w), 0.0);
        assert_eq!(MetricReport::default().substituted(&w), ["cnr", "msr", "tp"]);

        let noisy = Image::from_fn(8, 8, |x, y| ((x * 13 + y * 7) % 11) as f64 / 11.0);
        let roi = auto_roi(&noisy, ThresholdMethod::Otsu).unwrap();
        let ep_only = MetricWeights::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!((composite_score(&noisy, &noisy, &roi, &ep_only).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_validation() {
        assert!(MetricWeights::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(MetricWeights::new(-1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn roi_invariants() {
        let fg = vec![true, true, false, false];
        assert!(RoiSet::new(4, 1, fg.clone(), fg.clone(), vec![Rect::full(4, 1)]).is_err());
        let one = vec![true, false, false, false];
        let rest = one.iter().map(|f| !f).collect();
        assert!(RoiSet::new(4, 1, one, rest, vec![Rect::full(4, 1)]).is_err());
        assert!(RoiSet::regions_only(4, 4, vec![Rect::new(2, 2, 3, 1)]).is_err());
        assert!(RoiSet::regions_only(4, 4, vec![]).is_err());
    }
}
