use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::float::Scalar;
use crate::grid::Grid;

/// In-place multidimensional FFT over every axis of `data`, which holds the
/// grid in row-major order. Plans are created per call; the planner caches
/// nothing across calls and keeps no global state.
fn transform_in_place<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>], direction: FftDirection) {
    debug_assert_eq!(data.len(), grid.total());
    let n = grid.points();
    let dim = grid.dim();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];

    // Last axis: lines are contiguous in memory.
    for chunk in data.chunks_exact_mut(n) {
        fft.process_with_scratch(chunk, &mut scratch);
    }

    // Remaining axes: copy each strided line through a contiguous buffer.
    let total = data.len();
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    for axis in 0..dim - 1 {
        let stride = n.pow((dim - 1 - axis) as u32);
        let group = stride * n;
        let mut start = 0;
        while start < total {
            for off in 0..stride {
                let base = start + off;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, value) in line.iter().enumerate() {
                    data[base + t * stride] = *value;
                }
            }
            start += group;
        }
    }
}

/// Physical samples to mode amplitudes, normalized by `1 / N^n` so that a
/// unit plane wave has a coefficient of one.
pub(crate) fn forward<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    transform_in_place(grid, data, FftDirection::Forward);
    let scale = T::one() / T::of(grid.total() as f64);
    for c in data.iter_mut() {
        *c = c.scale(scale);
    }
}

/// Mode amplitudes to physical samples (the unnormalized inverse, so
/// `backward(forward(x)) == x` up to rounding).
pub(crate) fn backward<T: Scalar>(grid: &Grid<T>, data: &mut [Complex<T>]) {
    transform_in_place(grid, data, FftDirection::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complexify(samples: &[f64]) -> Vec<Complex<f64>> {
        samples.iter().map(|&x| Complex::new(x, 0.0)).collect()
    }

    #[test]
    fn cosine_lands_on_unit_modes() {
        // cos(2 pi x1 / L) must produce amplitude 1/2 at signed modes +-e1.
        let grid = Grid::new(2, 16, 3.0).unwrap();
        let l = grid.length();
        let mut data = Vec::with_capacity(grid.total());
        for idx in 0..grid.total() {
            let ix = grid.decompose(idx);
            let x1 = ix[0] as f64 * grid.spacing();
            data.push(Complex::new((2.0 * std::f64::consts::PI * x1 / l).cos(), 0.0));
        }
        forward(&grid, &mut data);
        for idx in 0..grid.total() {
            let ix = grid.decompose(idx);
            let m = [grid.signed_index(ix[0]), grid.signed_index(ix[1])];
            let expect = if (m == [1, 0]) || (m == [-1, 0]) {
                0.5
            } else {
                0.0
            };
            let c = data[idx];
            assert!(
                (c.re - expect).abs() < 1e-13 && c.im.abs() < 1e-13,
                "mode {:?}: {:?}",
                m,
                c
            );
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let samples: Vec<f64> = (0..grid.total())
            .map(|i| ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let mut data = complexify(&samples);
        forward(&grid, &mut data);
        backward(&grid, &mut data);
        for (orig, c) in samples.iter().zip(&data) {
            assert!((c.re - orig).abs() < 1e-12);
            assert!(c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn axes_are_independent() {
        // A product of single-axis waves excites exactly one mode pair per axis.
        let grid = Grid::new(3, 8, 1.0).unwrap();
        let mut data = Vec::with_capacity(grid.total());
        for idx in 0..grid.total() {
            let ix = grid.decompose(idx);
            let p = 2.0 * std::f64::consts::PI;
            let x = ix[0] as f64 / 8.0;
            let y = ix[1] as f64 / 8.0;
            let z = ix[2] as f64 / 8.0;
            data.push(Complex::new(
                (p * x).cos() * (2.0 * p * y).sin() * (3.0 * p * z).cos(),
                0.0,
            ));
        }
        forward(&grid, &mut data);
        let mut live = 0;
        for idx in 0..grid.total() {
            if data[idx].norm() > 1e-12 {
                live += 1;
                let ix = grid.decompose(idx);
                let m: Vec<i64> = ix.iter().map(|&i| grid.signed_index(i)).collect();
                assert_eq!(m[0].abs(), 1);
                assert_eq!(m[1].abs(), 2);
                assert_eq!(m[2].abs(), 3);
                assert!((data[idx].norm() - 0.125).abs() < 1e-12);
            }
        }
        assert_eq!(live, 8);
    }
}
