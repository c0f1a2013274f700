use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::neighborhood::NeighborhoodSystem;

/// Contextual configuration patterns extracted with a moving 3x3 window.
///
/// Each row lists the window values in the fixed raster ordering of the
/// neighborhood system, one row per admissible window center.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    pattern_len: usize,
    central_index: usize,
    n_rows: usize,
    rows: Vec<f64>,
    sites: Vec<(usize, usize)>,
    field_mean: f64,
}

impl PatternSet {
    #[inline]
    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    #[inline]
    pub fn central_index(&self) -> usize {
        self.central_index
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.pattern_len..(i + 1) * self.pattern_len]
    }

    /// Lattice coordinate of row `i`'s central element.
    #[inline]
    pub fn site(&self, i: usize) -> (usize, usize) {
        self.sites[i]
    }

    /// Global sample mean of the source field, recorded at extraction time.
    #[inline]
    pub fn field_mean(&self) -> f64 {
        self.field_mean
    }
}

/// Extracts one pattern per site admitted by the boundary policy.
pub fn extract_patterns(field: &Field, nbhd: &NeighborhoodSystem) -> Result<PatternSet> {
    let pattern_len = nbhd.pattern_len();
    let rows_range = nbhd.site_rows(field);
    let cols_range = nbhd.site_cols(field);
    let n_rows = rows_range.len() * cols_range.len();
    if n_rows == 0 {
        return Err(Error::EmptyPatternSet);
    }

    let mut rows = Vec::with_capacity(n_rows * pattern_len);
    let mut sites = Vec::with_capacity(n_rows);
    for r in rows_range {
        for c in cols_range.clone() {
            for &(dy, dx) in nbhd.window() {
                rows.push(field.get_wrapped(r as isize + dy as isize, c as isize + dx as isize));
            }
            sites.push((r, c));
        }
    }

    Ok(PatternSet {
        pattern_len,
        central_index: nbhd.central_index(),
        n_rows,
        rows,
        sites,
        field_mean: field.mean(),
    })
}
