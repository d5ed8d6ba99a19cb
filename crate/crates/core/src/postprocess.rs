//! Min-max color scaling.

use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleReport {
    pub in_min: f64,
    pub in_max: f64,
    /// False when the input was constant and was returned unchanged.
    pub applied: bool,
}

/// Stretches intensities so the darkest pixel maps to 0 and the brightest to 1.
pub fn color_scale(img: &Image) -> (Image, ScaleReport) {
    let (lo, hi) = img.min_max();
    let report = ScaleReport {
        in_min: lo,
        in_max: hi,
        applied: lo != hi,
    };
    if !report.applied {
        return (img.clone(), report);
    }
    let range = hi - lo;
    (img.map(|v| (v - lo) / range), report)
}
