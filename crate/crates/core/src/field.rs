use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A real-valued `height x width` lattice stored row-major.
///
/// The lattice must be at least 3x3 (one full second-order window) and every
/// value must be finite. Values are free reals; image-mode fields restrict
/// them to [0, 255] (see [`crate::image::GrayImage`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height < 3 || width < 3 {
            return Err(Error::FieldTooSmall { height, width });
        }
        if values.len() != height * width {
            return Err(Error::LengthMismatch {
                expected: height * width,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    /// Builds a field from a per-site closure called in raster order.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Self::new(height, width, values)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of sites `n = height * width`.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.width + col] = value;
    }

    /// Toroidal access: indices wrap around both axes.
    #[inline]
    pub fn get_wrapped(&self, row: isize, col: isize) -> f64 {
        let r = row.rem_euclid(self.height as isize) as usize;
        let c = col.rem_euclid(self.width as isize) as usize;
        self.values[r * self.width + c]
    }

    /// Global sample mean over all sites.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance about `mu` (divide by n).
    pub fn variance_about(&self, mu: f64) -> f64 {
        self.values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / self.len() as f64
    }

    /// New field cyclically shifted down by `dr` rows and right by `dc` columns.
    pub fn cyclic_shift(&self, dr: isize, dc: isize) -> Field {
        let mut out = self.clone();
        for r in 0..self.height {
            for c in 0..self.width {
                out.values[r * self.width + c] = self.get_wrapped(r as isize - dr, c as isize - dc);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_and_ragged_inputs() {
        assert!(matches!(
            Field::new(2, 5, vec![0.0; 10]),
            Err(Error::FieldTooSmall { .. })
        ));
        assert!(matches!(
            Field::new(3, 3, vec![0.0; 8]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut v = vec![0.0; 9];
        v[4] = f64::NAN;
        assert_eq!(Field::new(3, 3, v), Err(Error::NonFinite(4)));
    }

    #[test]
    fn wrapped_access_is_toroidal() {
        let f = Field::from_fn(3, 4, |r, c| (r * 4 + c) as f64).unwrap();
        assert_eq!(f.get_wrapped(-1, 0), f.get(2, 0));
        assert_eq!(f.get_wrapped(3, -1), f.get(0, 3));
        assert_eq!(f.get_wrapped(5, 9), f.get(2, 1));
    }

    #[test]
    fn shift_round_trips() {
        let f = Field::from_fn(3, 3, |r, c| (r * 3 + c) as f64).unwrap();
        let g = f.cyclic_shift(1, 2).cyclic_shift(-1, -2);
        assert_eq!(f, g);
    }
}
