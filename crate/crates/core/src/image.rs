//! Grayscale images, B-scan volumes and patch geometry.

use crate::error::{Error, Result};

/// A single-channel image stored row-major with intensities nominally in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} samples for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!("non-finite intensity at index {i}")));
        }
        Ok(Self { width, height, data })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert!(value.is_finite());
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v.is_finite(), "non-finite intensity at ({x}, {y})");
                data.push(v);
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Pixel lookup with coordinates clamped to the image border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Applies `f` to every intensity. Panics if `f` produces a non-finite value.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Image {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert!(data.iter().all(|v| v.is_finite()), "map produced non-finite intensity");
        Image {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Pixel-wise combination of two equally sized images.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Image> {
        ensure_same_dims(self, other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Image::new(self.width, self.height, data)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn clamp_unit(&self) -> Image {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    /// Copies the rectangle out as a new image.
    pub fn crop(&self, rect: Rect) -> Result<Image> {
        rect.check_inside(self.width, self.height)?;
        let mut data = Vec::with_capacity(rect.width * rect.height);
        for y in rect.y0..rect.y0 + rect.height {
            let row = y * self.width;
            data.extend_from_slice(&self.data[row + rect.x0..row + rect.x0 + rect.width]);
        }
        Image::new(rect.width, rect.height, data)
    }

    /// Mean squared difference to `other`.
    pub fn mse(&self, other: &Image) -> Result<f64> {
        ensure_same_dims(self, other)?;
        let sum: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok(sum / self.data.len() as f64)
    }
}

pub(crate) fn ensure_same_dims(a: &Image, b: &Image) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// An ordered stack of equally sized B-scans from one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    subject_id: String,
    slices: Vec<Image>,
}

impl Volume {
    pub fn new(subject_id: impl Into<String>, slices: Vec<Image>) -> Result<Self> {
        let Some(first) = slices.first() else {
            return Err(Error::Volume("volume needs at least one slice".into()));
        };
        let dims = first.dims();
        let offenders: Vec<String> = slices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.dims() != dims)
            .map(|(i, s)| format!("slice {i} is {}x{}", s.width(), s.height()))
            .collect();
        if !offenders.is_empty() {
            return Err(Error::Volume(format!(
                "expected {}x{}; {}",
                dims.0,
                dims.1,
                offenders.join(", ")
            )));
        }
        Ok(Self {
            subject_id: subject_id.into(),
            slices,
        })
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn slices(&self) -> &[Image] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<Image> {
        self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.slices[0].dims()
    }
}

/// Axis-aligned rectangle in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { x0, y0, width, height }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self::new(0, 0, width, height)
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn check_inside(&self, width: usize, height: usize) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.x0 + self.width > width || self.y0 + self.height > height {
            return Err(Error::Geometry(format!(
                "rect {}x{} at ({}, {}) does not fit in {width}x{height}",
                self.width, self.height, self.x0, self.y0
            )));
        }
        Ok(())
    }
}

/// A square `k × k` window whose top-left corner is `(x0, y0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatchRef {
    pub x0: usize,
    pub y0: usize,
    pub k: usize,
}

impl PatchRef {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x0, self.y0, self.k, self.k)
    }
}

fn axis_starts(dim: usize, k: usize, stride: usize) -> Vec<usize> {
    let last = dim - k;
    let steps = last.div_ceil(stride);
    (0..=steps).map(|i| (i * stride).min(last)).collect()
}

/// Enumerates overlapping `k × k` windows in row-major order.
///
/// Starts advance by `stride` (capped at `k`, so no pixel falls between two
/// windows); the final window on each axis is pulled back to `dim - k` so the
/// grid covers every pixel without padding.
pub fn patch_grid(width: usize, height: usize, k: usize, stride: usize) -> Result<Vec<PatchRef>> {
    if k == 0 || k > width.min(height) {
        return Err(Error::Geometry(format!(
            "patch side {k} must be in 1..={} for a {width}x{height} image",
            width.min(height)
        )));
    }
    if stride == 0 {
        return Err(Error::Geometry("stride must be at least 1".into()));
    }
    let step = stride.min(k);
    let xs = axis_starts(width, k, step);
    let ys = axis_starts(height, k, step);
    Ok(ys
        .iter()
        .flat_map(|&y0| xs.iter().map(move |&x0| PatchRef { x0, y0, k }))
        .collect())
}

/// Bilinear resampling with pixel-centre alignment and clamped borders.
pub fn resize_to(img: &Image, width: usize, height: usize) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::Geometry(format!("cannot resize to {width}x{height}")));
    }
    if img.dims() == (width, height) {
        return Ok(img.clone());
    }
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    Ok(Image::from_fn(width, height, |x, y| {
        let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
        let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(img.width() - 1), (y0 + 1).min(img.height() - 1));
        let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
        let top = img.get(x0, y0) * (1.0 - tx) + img.get(x1, y0) * tx;
        let bottom = img.get(x0, y1) * (1.0 - tx) + img.get(x1, y1) * tx;
        top * (1.0 - ty) + bottom * ty
    }))
}
