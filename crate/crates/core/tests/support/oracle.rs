//! Literal, unoptimized transcriptions of the quality-metric formulas, kept
//! independent of the library so they can check it.

#![allow(dead_code)]

pub struct Img<'a> {
    pub w: usize,
    pub h: usize,
    pub px: &'a [f64],
}

impl Img<'_> {
    fn at(&self, x: usize, y: usize) -> f64 {
        self.px[y * self.w + x]
    }
}

pub struct Region {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pop_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

fn pick(img: &Img, mask: &[bool]) -> Vec<f64> {
    (0..img.px.len()).filter(|&i| mask[i]).map(|i| img.px[i]).collect()
}

fn region(img: &Img, r: &Region) -> Vec<f64> {
    let mut out = Vec::new();
    for y in r.y0..r.y0 + r.h {
        for x in r.x0..r.x0 + r.w {
            out.push(img.at(x, y));
        }
    }
    out
}

/// CNR = 10 log10(|mu_f - mu_b| / sqrt(0.5 (sigma_f² + sigma_b²)))
pub fn cnr(img: &Img, fg: &[bool], bg: &[bool]) -> f64 {
    let f = pick(img, fg);
    let b = pick(img, bg);
    let (sf, sb) = (pop_std(&f), pop_std(&b));
    10.0 * ((mean(&f) - mean(&b)).abs() / (0.5 * (sf * sf + sb * sb)).sqrt()).log10()
}

/// MSR = mu_f / sigma_f
pub fn msr(img: &Img, fg: &[bool]) -> f64 {
    let f = pick(img, fg);
    mean(&f) / pop_std(&f)
}

/// TP = mean over ROIs of (sigma_m² / sigma'_m²) sqrt(mu_den / mu_in)
pub fn tp(den: &Img, noisy: &Img, rois: &[Region]) -> f64 {
    let per: Vec<f64> = rois
        .iter()
        .map(|r| {
            let d = region(den, r);
            let n = region(noisy, r);
            (pop_std(&d).powi(2) / pop_std(&n).powi(2)) * (mean(&d) / mean(&n)).sqrt()
        })
        .collect();
    mean(&per)
}

fn laplacian(img: &Img, r: &Region) -> Vec<f64> {
    let mut out = Vec::new();
    for y in r.y0 + 1..r.y0 + r.h - 1 {
        for x in r.x0 + 1..r.x0 + r.w - 1 {
            let lap = -4.0 * img.at(x, y) + img.at(x - 1, y) + img.at(x + 1, y) + img.at(x, y - 1) + img.at(x, y + 1);
            out.push(lap);
        }
    }
    out
}

fn gamma(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// EP = mean over ROIs of
/// Gamma(dI' - mean, dI - mean) / sqrt(Gamma(dI' - mean, dI' - mean) Gamma(dI - mean, dI - mean))
pub fn ep(den: &Img, noisy: &Img, rois: &[Region]) -> f64 {
    let per: Vec<f64> = rois
        .iter()
        .map(|r| {
            let ld = laplacian(den, r);
            let ln = laplacian(noisy, r);
            let (md, mn) = (mean(&ld), mean(&ln));
            let cd: Vec<f64> = ld.iter().map(|v| v - md).collect();
            let cn: Vec<f64> = ln.iter().map(|v| v - mn).collect();
            gamma(&cd, &cn) / (gamma(&cd, &cd) * gamma(&cn, &cn)).sqrt()
        })
        .collect();
    mean(&per)
}

/// Exhaustive Otsu: try every byte threshold t in 1..=255 (classes < t and >= t),
/// keep the first one with the largest between-class variance.
pub fn otsu_bruteforce(bytes: &[u8]) -> Option<u8> {
    let mut best: Option<(u8, f64)> = None;
    for t in 1..=255u16 {
        let lo: Vec<f64> = bytes.iter().filter(|&&b| (b as u16) < t).map(|&b| b as f64).collect();
        let hi: Vec<f64> = bytes.iter().filter(|&&b| (b as u16) >= t).map(|&b| b as f64).collect();
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let n = bytes.len() as f64;
        let (w0, w1) = (lo.len() as f64 / n, hi.len() as f64 / n);
        let between = w0 * w1 * (mean(&lo) - mean(&hi)).powi(2);
        if best.is_none_or(|(_, b)| between > b * (1.0 + 1e-12)) {
            best = Some((t as u8, between));
        }
    }
    best.map(|(t, _)| t)
}

/// Relative agreement check used by the oracle comparisons.
pub fn rel_close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1e-300) || got == want
}
