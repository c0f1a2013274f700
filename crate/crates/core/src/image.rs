use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fisher::{InfoMap, MapKind};

/// An 8-bit grayscale image: a [`Field`] whose values lie in [0, 255].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    field: Field,
}

impl GrayImage {
    pub fn new(field: Field) -> Result<Self> {
        if let Some((i, &v)) = field
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=255.0).contains(*v))
        {
            return Err(Error::OutOfImageRange { index: i, value: v });
        }
        Ok(Self { field })
    }

    /// Rounds half away from zero and clamps each value into [0, 255].
    pub fn from_field_clamped(field: &Field) -> Self {
        let values = field
            .values()
            .iter()
            .map(|&v| libm::round(v).clamp(0.0, 255.0))
            .collect();
        Self {
            field: Field::new(field.height(), field.width(), values).unwrap(),
        }
    }

    pub fn from_bytes(height: usize, width: usize, bytes: &[u8]) -> Result<Self> {
        let values = bytes.iter().map(|&b| b as f64).collect();
        Ok(Self {
            field: Field::new(height, width, values)?,
        })
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.field.height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.field.width()
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn into_field(self) -> Field {
        self.field
    }

    /// Row-major 8-bit pixels.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.field
            .values()
            .iter()
            .map(|&v| libm::round(v).clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Adds seeded Gaussian noise: `x' = clamp(round(x + N(0, sigma_n^2)), 0, 255)`.
pub fn add_gaussian_noise(image: &GrayImage, sigma_n: f64, seed: u64) -> Result<GrayImage> {
    if sigma_n < 0.0 || !sigma_n.is_finite() {
        return Err(Error::NegativeNoise(sigma_n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = image
        .field
        .values()
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            libm::round(v + sigma_n * z).clamp(0.0, 255.0)
        })
        .collect();
    Ok(GrayImage {
        field: Field::new(image.height(), image.width(), values).unwrap(),
    })
}

/// Absolute response of the 3x3 Laplacian kernel
/// `[[0,1,0],[1,-4,1],[0,1,0]]` under the toroidal boundary.
pub fn laplacian_map(image: &GrayImage) -> InfoMap {
    let f = image.field();
    let (h, w) = (f.height(), f.width());
    let mut values = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let (ri, ci) = (r as isize, c as isize);
            let v = f.get_wrapped(ri - 1, ci)
                + f.get_wrapped(ri + 1, ci)
                + f.get_wrapped(ri, ci - 1)
                + f.get_wrapped(ri, ci + 1)
                - 4.0 * f.get(r, c);
            values.push(v.abs());
        }
    }
    InfoMap::new(
        h,
        w,
        MapKind::Laplacian,
        values,
        alloc::vec![true; h * w],
        None,
    )
}

/// Separable Gaussian blur with kernel radius `ceil(3 sigma_b)`, toroidal
/// boundary. `sigma_b = 0` returns the image unchanged.
pub fn gaussian_blur(image: &GrayImage, sigma_b: f64) -> Result<GrayImage> {
    if sigma_b < 0.0 || !sigma_b.is_finite() {
        return Err(Error::InvalidConfig("blur sigma must be >= 0"));
    }
    if sigma_b == 0.0 {
        return Ok(image.clone());
    }
    let radius = libm::ceil(3.0 * sigma_b) as isize;
    let mut weights = Vec::with_capacity(2 * radius as usize + 1);
    let mut total = 0.0;
    for i in -radius..=radius {
        let wgt = libm::exp(-(i as f64 * i as f64) / (2.0 * sigma_b * sigma_b));
        weights.push(wgt);
        total += wgt;
    }
    for wgt in &mut weights {
        *wgt /= total;
    }

    let f = image.field();
    let (h, w) = (f.height(), f.width());
    let mut horizontal = Field::constant(h, w, 0.0).unwrap();
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (idx, wgt) in weights.iter().enumerate() {
                let dc = idx as isize - radius;
                acc += wgt * f.get_wrapped(r as isize, c as isize + dc);
            }
            horizontal.set(r, c, acc);
        }
    }
    let mut blurred = Field::constant(h, w, 0.0).unwrap();
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (idx, wgt) in weights.iter().enumerate() {
                let dr = idx as isize - radius;
                acc += wgt * horizontal.get_wrapped(r as isize + dr, c as isize);
            }
            blurred.set(r, c, acc);
        }
    }
    Ok(GrayImage::from_field_clamped(&blurred))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    Linear,
    Log,
}

fn normalize_values(
    height: usize,
    width: usize,
    values: &[f64],
    defined: Option<&[bool]>,
    mode: NormalizeMode,
) -> GrayImage {
    let is_defined = |i: usize| defined.is_none_or(|d| d[i]);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if is_defined(i) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let transform = |v: f64| match mode {
        NormalizeMode::Linear => v - lo,
        NormalizeMode::Log => libm::log1p(v - lo),
    };
    let span = if lo.is_finite() && hi > lo {
        transform(hi)
    } else {
        0.0
    };
    let out: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if !is_defined(i) || span == 0.0 {
                0.0
            } else {
                libm::round(transform(v) / span * 255.0).clamp(0.0, 255.0)
            }
        })
        .collect();
    GrayImage {
        field: Field::new(height, width, out).unwrap(),
    }
}

/// Min-max normalization of a map into an 8-bit image; `Log` compresses with
/// `ln(1 + v - min)` first. Constant or fully-undefined maps come out black,
/// and undefined sites are rendered black.
pub fn normalize_map(map: &InfoMap, mode: NormalizeMode) -> GrayImage {
    normalize_values(
        map.height(),
        map.width(),
        map.values(),
        Some(map.defined()),
        mode,
    )
}

/// Min-max normalization of a raw field into an 8-bit image.
pub fn normalize_field(field: &Field, mode: NormalizeMode) -> GrayImage {
    normalize_values(field.height(), field.width(), field.values(), None, mode)
}
