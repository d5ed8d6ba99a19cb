//! Classical denoisers behind a common plug-in interface.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

/// Anything that maps an image to a denoised image of the same size.
pub trait Denoise {
    fn denoise(&self, img: &Image) -> Result<Image>;
}

impl<F> Denoise for F
where
    F: Fn(&Image) -> Result<Image>,
{
    fn denoise(&self, img: &Image) -> Result<Image> {
        self(img)
    }
}

/// A named denoiser with its parameters, written `name:key=val,key=val`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DenoiserSpec {
    name: String,
    params: BTreeMap<String, f64>,
}

/// One parameter of a registered denoiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSchema {
    pub key: &'static str,
    pub default: f64,
    pub help: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiserInfo {
    pub name: &'static str,
    pub params: &'static [ParamSchema],
}

const REGISTRY: &[DenoiserInfo] = &[
    DenoiserInfo {
        name: "gaussian",
        params: &[ParamSchema {
            key: "sigma",
            default: 1.0,
            help: "standard deviation in pixels (> 0); kernel radius ceil(3 sigma)",
        }],
    },
    DenoiserInfo {
        name: "identity",
        params: &[],
    },
    DenoiserInfo {
        name: "median",
        params: &[ParamSchema {
            key: "window",
            default: 3.0,
            help: "odd window side: 3, 5 or 7",
        }],
    },
    DenoiserInfo {
        name: "nlmeans",
        params: &[
            ParamSchema {
                key: "search",
                default: 5.0,
                help: "search window radius in pixels",
            },
            ParamSchema {
                key: "patch",
                default: 1.0,
                help: "comparison patch radius in pixels",
            },
            ParamSchema {
                key: "h",
                default: 0.1,
                help: "filtering bandwidth in intensity units (> 0)",
            },
        ],
    },
];

/// Registered denoisers, sorted by name.
pub fn registry() -> &'static [DenoiserInfo] {
    REGISTRY
}

impl DenoiserSpec {
    /// Builds a spec, filling unspecified parameters with their defaults.
    pub fn new(name: &str, params: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let info = REGISTRY
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Spec(format!("unknown denoiser '{name}'")))?;
        let mut map: BTreeMap<String, f64> = info.params.iter().map(|p| (p.key.to_string(), p.default)).collect();
        for (k, v) in params {
            if !map.contains_key(&k) {
                return Err(Error::Spec(format!("denoiser '{name}' has no parameter '{k}'")));
            }
            map.insert(k, v);
        }
        let spec = Self {
            name: name.to_string(),
            params: map,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity() -> Self {
        Self::new("identity", []).unwrap()
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new("gaussian", [("sigma".to_string(), sigma)])
    }

    pub fn median(window: usize) -> Result<Self> {
        Self::new("median", [("window".to_string(), window as f64)])
    }

    pub fn nlmeans(search: usize, patch: usize, h: f64) -> Result<Self> {
        Self::new(
            "nlmeans",
            [
                ("search".to_string(), search as f64),
                ("patch".to_string(), patch as f64),
                ("h".to_string(), h),
            ],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn radius_param(&self, key: &str) -> Result<usize> {
        let v = self.param(key);
        if v < 0.0 || v.fract() != 0.0 || v > 64.0 {
            return Err(Error::Spec(format!(
                "{}: '{key}' must be an integer in 0..=64, got {v}",
                self.name
            )));
        }
        Ok(v as usize)
    }

    fn validate(&self) -> Result<()> {
        match self.name.as_str() {
            "identity" => {}
            "gaussian" => {
                let s = self.param("sigma");
                if !(s > 0.0 && s.is_finite() && s <= 20.0) {
                    return Err(Error::Spec(format!("gaussian: sigma must be in (0, 20], got {s}")));
                }
            }
            "median" => {
                let w = self.param("window");
                if ![3.0, 5.0, 7.0].contains(&w) {
                    return Err(Error::Spec(format!("median: window must be 3, 5 or 7, got {w}")));
                }
            }
            "nlmeans" => {
                self.radius_param("search")?;
                self.radius_param("patch")?;
                let h = self.param("h");
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::Spec(format!("nlmeans: h must be positive, got {h}")));
                }
            }
            other => return Err(Error::Spec(format!("unknown denoiser '{other}'"))),
        }
        Ok(())
    }

    pub fn apply(&self, img: &Image) -> Result<Image> {
        let out = match self.name.as_str() {
            "identity" => return Ok(img.clone()),
            "gaussian" => gaussian_blur(img, self.param("sigma")),
            "median" => median_filter(img, self.param("window") as usize),
            "nlmeans" => nl_means(
                img,
                self.radius_param("search")?,
                self.radius_param("patch")?,
                self.param("h"),
            ),
            other => return Err(Error::Spec(format!("unknown denoiser '{other}'"))),
        };
        Ok(out.clamp_unit())
    }
}

impl Denoise for DenoiserSpec {
    fn denoise(&self, img: &Image) -> Result<Image> {
        self.apply(img)
    }
}

impl fmt::Display for DenoiserSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl FromStr for DenoiserSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("expected key=value, got '{pair}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Spec(format!("'{}' is not a number", v.trim())))?;
            params.push((k.trim().to_string(), v));
        }
        DenoiserSpec::new(name.trim(), params)
    }
}

impl TryFrom<String> for DenoiserSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DenoiserSpec> for String {
    fn from(d: DenoiserSpec) -> String {
        d.to_string()
    }
}

/// Normalized 1-D Gaussian taps for offsets `-r..=r`, `r = ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur with clamp-to-edge borders.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = img.dims();
    let rows = Image::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, t)| t * img.get_clamped(x as isize + i as isize - r, y as isize))
            .sum()
    });
    Image::from_fn(w, h, |x, y| {
        kernel
            .iter()
            .enumerate()
            .map(|(i, t)| t * rows.get_clamped(x as isize, y as isize + i as isize - r))
            .sum()
    })
}

/// Median over a `window × window` neighbourhood with clamp-to-edge borders.
pub fn median_filter(img: &Image, window: usize) -> Image {
    let r = (window / 2) as isize;
    let mut buf = Vec::with_capacity(window * window);
    Image::from_fn(img.width(), img.height(), |x, y| {
        buf.clear();
        for dy in -r..=r {
            for dx in -r..=r {
                buf.push(img.get_clamped(x as isize + dx, y as isize + dy));
            }
        }
        let mid = buf.len() / 2;
        *buf.select_nth_unstable_by(mid, f64::total_cmp).1
    })
}

/// Non-local means: each pixel becomes the average of its search window weighted
/// by `exp(-d / h²)`, `d` being the mean squared distance between patches.
pub fn nl_means(img: &Image, search: usize, patch: usize, h: f64) -> Image {
    let (s, p) = (search as isize, patch as isize);
    let patch_px = ((2 * p + 1) * (2 * p + 1)) as f64;
    let h2 = h * h;
    Image::from_fn(img.width(), img.height(), |x, y| {
        let (x, y) = (x as isize, y as isize);
        let (mut acc, mut norm) = (0.0, 0.0);
        for sy in -s..=s {
            for sx in -s..=s {
                let (qx, qy) = (x + sx, y + sy);
                let mut d = 0.0;
                for py in -p..=p {
                    for px in -p..=p {
                        let a = img.get_clamped(x + px, y + py);
                        let b = img.get_clamped(qx + px, qy + py);
                        d += (a - b) * (a - b);
                    }
                }
                let wgt = (-(d / patch_px) / h2).exp();
                acc += wgt * img.get_clamped(qx, qy);
                norm += wgt;
            }
        }
        acc / norm
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(w, h, |_, _| rng.gen())
    }

    #[test]
    fn parse_and_display() {
        let d: DenoiserSpec = "median:window=5".parse().unwrap();
        assert_eq!(d.name(), "median");
        assert_eq!(d.params()["window"], 5.0);
        assert_eq!(d.to_string(), "median:window=5");
        let g: DenoiserSpec = " gaussian : sigma = 1.5 ".parse().unwrap();
        assert_eq!(g.to_string().parse::<DenoiserSpec>().unwrap(), g);
        let n: DenoiserSpec = "nlmeans:h=0.2".parse().unwrap();
        assert_eq!(n.to_string(), "nlmeans:h=0.2,patch=1,search=5");
        assert_eq!("identity".parse::<DenoiserSpec>().unwrap(), DenoiserSpec::identity());
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "bogus",
            "median:window=4",
            "median:size=3",
            "gaussian:sigma=0",
            "gaussian:sigma",
            "gaussian:sigma=abc",
            "nlmeans:search=1.5",
        ] {
            assert!(matches!(bad.parse::<DenoiserSpec>(), Err(Error::Spec(_))), "{bad}");
        }
    }

    #[test]
    fn registry_listing() {
        let names: Vec<&str> = registry().iter().map(|d| d.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(names.contains(&"identity"));
        let median = registry().iter().find(|d| d.name == "median").unwrap();
        assert_eq!(median.params[0].key, "window");
    }

    #[test]
    fn identity_is_exact() {
        let img = random(9, 7, 1);
        assert_eq!(DenoiserSpec::identity().apply(&img).unwrap(), img);
    }

    #[test]
    fn median_removes_impulse() {
        let mut img = Image::filled(7, 7, 0.0);
        img.set(3, 3, 1.0);
        let out = DenoiserSpec::median(3).unwrap().apply(&img).unwrap();
        assert_eq!(out.get(3, 3), 0.0);
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gaussian_matches_direct_convolution() {
        let img = random(16, 16, 2);
        let out = DenoiserSpec::gaussian(1.0).unwrap().apply(&img).unwrap();
        let r = 3isize;
        let g = |i: isize| (-(i * i) as f64 / 2.0).exp();
        let norm: f64 = (-r..=r).map(g).sum::<f64>().powi(2);
        for y in 0..16isize {
            for x in 0..16isize {
                let mut acc = 0.0;
                for dy in -r..=r {
                    for dx in -r..=r {
                        acc += g(dx) * g(dy) * img.get_clamped(x + dx, y + dy);
                    }
                }
                assert!((out.get(x as usize, y as usize) - acc / norm).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn shift_commutes_on_interior() {
        let img = random(20, 20, 3).map(|v| 0.2 + 0.5 * v);
        let c = 0.1;
        let shifted = img.map(|v| v + c);
        for spec in [DenoiserSpec::gaussian(1.0).unwrap(), DenoiserSpec::median(5).unwrap()] {
            let a = spec.apply(&img).unwrap();
            let b = spec.apply(&shifted).unwrap();
            for y in 4..16 {
                for x in 4..16 {
                    assert!((b.get(x, y) - a.get(x, y) - c).abs() < 1e-12, "{spec}");
                }
            }
        }
    }

    #[test]
    fn nlmeans_bandwidth_trend() {
        let img = random(12, 12, 4);
        let dist = |h: f64| {
            DenoiserSpec::nlmeans(2, 1, h)
                .unwrap()
                .apply(&img)
                .unwrap()
                .mse(&img)
                .unwrap()
        };
        let (d1, d2, d3) = (dist(0.01), dist(0.1), dist(10.0));
        assert!(d1 < d2 && d2 < d3, "{d1} {d2} {d3}");
        assert!(d1 < 1e-6);
        let wide = DenoiserSpec::nlmeans(2, 1, 1e6).unwrap().apply(&img).unwrap();
        let expect: f64 = (-2..=2isize)
            .flat_map(|dy| (-2..=2isize).map(move |dx| (dx, dy)))
            .map(|(dx, dy)| img.get_clamped(5 + dx, 6 + dy))
            .sum::<f64>()
            / 25.0;
        assert!((wide.get(5, 6) - expect).abs() < 1e-6);
    }

    #[test]
    fn outputs_preserve_dims_and_range() {
        let img = random(11, 9, 5);
        for s in [
            "identity",
            "median:window=7",
            "gaussian:sigma=2",
            "nlmeans:search=2,patch=1,h=0.3",
        ] {
            let out = s.parse::<DenoiserSpec>().unwrap().apply(&img).unwrap();
            assert_eq!(out.dims(), img.dims());
            assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
