use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;

/// How lattice borders are treated.
///
/// `Toroidal` wraps both axes so every site has a full neighborhood; it is the
/// default everywhere (sampler and estimators) and makes the direct and the
/// covariance form of the coupling estimator agree exactly. `InteriorOnly`
/// restricts sums and patterns to sites whose 3x3 window lies inside the
/// lattice, which is the conservative choice for image analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Toroidal,
    InteriorOnly,
}

/// An isotropic non-causal neighborhood on the 2D lattice.
///
/// Order 1 is the 4-cross, order 2 the full 8-neighbor ring; both fit in a
/// 3x3 window. Pattern vectors list that window in raster order, so the
/// central site sits at index 2 (order 1) or 4 (order 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSystem {
    order: u8,
    boundary: Boundary,
    offsets: Vec<(i8, i8)>,
    window: Vec<(i8, i8)>,
    central_index: usize,
}

const WINDOW_ORDER1: [(i8, i8); 5] = [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)];
const WINDOW_ORDER2: [(i8, i8); 9] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 0),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl NeighborhoodSystem {
    pub fn new(order: u8, boundary: Boundary) -> Result<Self> {
        let window: Vec<(i8, i8)> = match order {
            1 => WINDOW_ORDER1.to_vec(),
            2 => WINDOW_ORDER2.to_vec(),
            other => return Err(Error::UnsupportedOrder(other)),
        };
        let central_index = window.iter().position(|&o| o == (0, 0)).unwrap();
        let offsets = window.iter().copied().filter(|&o| o != (0, 0)).collect();
        Ok(Self {
            order,
            boundary,
            offsets,
            window,
            central_index,
        })
    }

    /// Order-`order` system with the default toroidal boundary.
    pub fn toroidal(order: u8) -> Result<Self> {
        Self::new(order, Boundary::Toroidal)
    }

    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Neighbor count `k` (4 or 8).
    #[inline]
    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    /// Pattern length `K = k + 1`.
    #[inline]
    pub fn pattern_len(&self) -> usize {
        self.window.len()
    }

    #[inline]
    pub fn central_index(&self) -> usize {
        self.central_index
    }

    /// Neighbor offsets `(dy, dx)`, window raster order, center excluded.
    #[inline]
    pub fn offsets(&self) -> &[(i8, i8)] {
        &self.offsets
    }

    /// Full window offsets including `(0, 0)` at [`Self::central_index`].
    #[inline]
    pub fn window(&self) -> &[(i8, i8)] {
        &self.window
    }

    /// Sum of neighbor values around `(row, col)` under this boundary policy.
    ///
    /// For `InteriorOnly` the caller must pass an interior site.
    #[inline]
    pub fn neighbor_sum(&self, field: &Field, row: usize, col: usize) -> f64 {
        let mut s = 0.0;
        for &(dy, dx) in &self.offsets {
            s += field.get_wrapped(row as isize + dy as isize, col as isize + dx as isize);
        }
        s
    }

    /// Row range of admissible window centers for `field`.
    pub fn site_rows(&self, field: &Field) -> core::ops::Range<usize> {
        match self.boundary {
            Boundary::Toroidal => 0..field.height(),
            Boundary::InteriorOnly => 1..field.height().saturating_sub(1),
        }
    }

    /// Column range of admissible window centers for `field`.
    pub fn site_cols(&self, field: &Field) -> core::ops::Range<usize> {
        match self.boundary {
            Boundary::Toroidal => 0..field.width(),
            Boundary::InteriorOnly => 1..field.width().saturating_sub(1),
        }
    }

    /// Number of sites admitted by the boundary policy.
    pub fn site_count(&self, field: &Field) -> usize {
        self.site_rows(field).len() * self.site_cols(field).len()
    }
}
