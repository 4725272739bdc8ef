use crate::error::{Error, Result};
use crate::float::Scalar;

/// Uniform periodic grid on `[0, L)^n`, `n` in `{2, 3}`, `N` points per axis.
///
/// The grid is deliberately cheap to clone: wavenumber tables are rebuilt on
/// demand by the operators instead of being cached here.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    points: usize,
    length: T,
}

impl<T: Scalar> Grid<T> {
    /// `dim` must be 2 or 3, `points` a power of two at least 8, `length`
    /// positive and finite.
    pub fn new(dim: usize, points: usize, length: T) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::BadDimension(dim));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::BadResolution(points));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::BadBoxLength(length.as_f64()));
        }
        Ok(Grid {
            dim,
            points,
            length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Total number of grid points, `N^n`.
    pub fn total(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Mesh spacing `h = L / N`.
    pub fn spacing(&self) -> T {
        self.length / T::of(self.points as f64)
    }

    /// Volume element `h^n` of the grid quadrature.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.dim as i32)
    }

    /// Same grid with a different box length (used by dyadic rescaling).
    pub fn with_length(&self, length: T) -> Result<Self> {
        Grid::new(self.dim, self.points, length)
    }

    /// Same box with a different resolution (used by refinement studies).
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Grid::new(self.dim, points, self.length)
    }

    /// Signed mode index for storage index `i`: `0..N/2` then `-N/2..-1`.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Storage index for a signed mode index.
    pub fn storage_index(&self, m: i64) -> usize {
        if m >= 0 {
            m as usize
        } else {
            (m + self.points as i64) as usize
        }
    }

    /// Angular wavenumber of signed mode index `m`: `2 pi m / L`.
    pub fn wavenumber(&self, m: i64) -> T {
        T::of(2.0) * T::PI() * T::of(m as f64) / self.length
    }

    /// Signed mode indices along one axis, in storage order.
    pub fn axis_signed(&self) -> Vec<i64> {
        (0..self.points).map(|i| self.signed_index(i)).collect()
    }

    /// Angular wavenumbers along one axis, in storage order.
    pub fn axis_wavenumbers(&self) -> Vec<T> {
        (0..self.points)
            .map(|i| self.wavenumber(self.signed_index(i)))
            .collect()
    }

    /// Largest angular wavenumber kept by the 2/3 dealias rule.
    pub fn dealias_edge(&self) -> T {
        self.wavenumber(self.points as i64 / 3)
    }

    /// Splits a flat storage index into per-axis indices; the third entry is
    /// zero in two dimensions.
    pub fn decompose(&self, idx: usize) -> [usize; 3] {
        let n = self.points;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    /// Flat storage index from per-axis indices (inverse of `decompose`).
    pub fn flatten(&self, ix: [usize; 3]) -> usize {
        let n = self.points;
        match self.dim {
            2 => ix[0] * n + ix[1],
            _ => (ix[0] * n + ix[1]) * n + ix[2],
        }
    }

    /// Advisory horizon `0.1 (L / 2 pi)^2` up to which the periodic box is a
    /// faithful stand-in for free space at unit viscosity.
    pub fn horizon(&self) -> T {
        let ratio = self.length / (T::of(2.0) * T::PI());
        T::of(0.1) * ratio * ratio
    }

    /// True when both grids host the same fields.
    pub fn matches(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && self.length == other.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::<f64>::new(1, 16, 1.0).is_err());
        assert!(Grid::<f64>::new(4, 16, 1.0).is_err());
        assert!(Grid::<f64>::new(2, 12, 1.0).is_err());
        assert!(Grid::<f64>::new(2, 4, 1.0).is_err());
        assert!(Grid::<f64>::new(2, 16, 0.0).is_err());
        assert!(Grid::<f64>::new(2, 16, -2.0).is_err());
        assert!(Grid::<f64>::new(2, 16, f64::INFINITY).is_err());
        assert!(Grid::<f64>::new(3, 8, 6.5).is_ok());
    }

    #[test]
    fn signed_indices_wrap() {
        let g = Grid::<f64>::new(2, 8, 1.0).unwrap();
        let signed: Vec<i64> = g.axis_signed();
        assert_eq!(signed, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for i in 0..8 {
            assert_eq!(g.storage_index(g.signed_index(i)), i);
        }
    }

    #[test]
    fn decompose_roundtrip() {
        let g2 = Grid::<f64>::new(2, 8, 1.0).unwrap();
        let g3 = Grid::<f64>::new(3, 8, 1.0).unwrap();
        for idx in 0..g2.total() {
            assert_eq!(g2.flatten(g2.decompose(idx)), idx);
        }
        for idx in 0..g3.total() {
            assert_eq!(g3.flatten(g3.decompose(idx)), idx);
        }
        assert_eq!(g2.decompose(13), [1, 5, 0]);
        assert_eq!(g3.decompose(8 * 8 * 2 + 8 * 3 + 7), [2, 3, 7]);
    }

    #[test]
    fn quadrature_weights() {
        let g = Grid::<f64>::new(3, 16, 4.0).unwrap();
        assert_eq!(g.total(), 4096);
        assert!((g.spacing() - 0.25).abs() < 1e-15);
        assert!((g.cell_volume() - 0.015625).abs() < 1e-15);
    }

    #[test]
    fn horizon_scales_with_box() {
        let g = Grid::<f64>::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        assert!((g.horizon() - 0.1).abs() < 1e-15);
        let big = g.with_length(20.0 * std::f64::consts::PI).unwrap();
        assert!((big.horizon() - 10.0).abs() < 1e-12);
    }
}
