use num_complex::Complex;

use crate::error::{Error, Result};
use crate::float::Scalar;
use crate::grid::Grid;
use crate::transform;

/// Dyadic dilation factor: `Double` is `f(x) -> f(2x)`, `Halve` is
/// `f(x) -> f(x/2)`.
///
/// Dilation is realized on the box itself: the coefficient array keeps its
/// indices and the box length changes by the inverse factor, so wavenumbers
/// scale exactly and the grid quadrature picks up the scaling of volume. The
/// physical sample array is unchanged; it samples the dilated function on the
/// dilated box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyadicScale {
    Double,
    Halve,
}

/// Relative spectral divergence below which a vector field is treated as
/// divergence free.
pub const DIV_FREE_RATIO: f64 = 1e-10;

/// A mode counts as occupied for band-limit checks when its magnitude
/// exceeds this fraction of the field's largest mode. Transform rounding
/// leaves dust around 1e-16 relative; real content sits far above.
pub const OCCUPIED_RATIO: f64 = 1e-12;

/// Real scalar field on a periodic grid, stored as Fourier mode amplitudes.
#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    grid: Grid<T>,
    modes: Vec<Complex<T>>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn zero(grid: &Grid<T>) -> Self {
        ScalarField {
            grid: grid.clone(),
            modes: vec![Complex::new(T::zero(), T::zero()); grid.total()],
        }
    }

    /// Wraps an existing coefficient array (row-major storage order).
    pub fn from_modes(grid: &Grid<T>, modes: Vec<Complex<T>>) -> Result<Self> {
        if modes.len() != grid.total() {
            return Err(Error::SizeMismatch {
                got: modes.len(),
                need: grid.total(),
            });
        }
        Ok(ScalarField {
            grid: grid.clone(),
            modes,
        })
    }

    /// Transforms physical samples (row-major) into mode amplitudes.
    pub fn from_physical(grid: &Grid<T>, samples: &[T]) -> Result<Self> {
        if samples.len() != grid.total() {
            return Err(Error::SizeMismatch {
                got: samples.len(),
                need: grid.total(),
            });
        }
        let mut modes: Vec<Complex<T>> = samples
            .iter()
            .map(|&x| Complex::new(x, T::zero()))
            .collect();
        transform::forward(grid, &mut modes);
        Ok(ScalarField {
            grid: grid.clone(),
            modes,
        })
    }

    /// Samples `f` at the grid points; the third coordinate is zero in two
    /// dimensions.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn([T; 3]) -> T) -> Self {
        let h = grid.spacing();
        let samples: Vec<T> = (0..grid.total())
            .map(|idx| {
                let ix = grid.decompose(idx);
                f([
                    T::of(ix[0] as f64) * h,
                    T::of(ix[1] as f64) * h,
                    T::of(ix[2] as f64) * h,
                ])
            })
            .collect();
        Self::from_physical(grid, &samples).expect("sample count matches grid")
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex<T>] {
        &self.modes
    }

    pub(crate) fn modes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.modes
    }

    pub fn into_modes(self) -> Vec<Complex<T>> {
        self.modes
    }

    /// Inverse transform; imaginary parts are dropped (they are rounding
    /// noise for Hermitian coefficients).
    pub fn to_physical(&self) -> Vec<T> {
        let mut buf = self.modes.clone();
        transform::backward(&self.grid, &mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Mean value over the box, i.e. the zero-mode amplitude.
    pub fn mean(&self) -> T {
        self.modes[0].re
    }

    pub fn max_mode_magnitude(&self) -> T {
        self.modes
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Euclidean norm of the coefficient array. By Parseval the grid L2 norm
    /// equals `L^{n/2}` times this.
    pub fn coeff_l2(&self) -> T {
        self.modes
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest deviation from conjugate symmetry, `max |c(m) - conj(c(-m))|`.
    pub fn hermitian_defect(&self) -> T {
        let g = &self.grid;
        let mut worst = T::zero();
        for idx in 0..g.total() {
            let ix = g.decompose(idx);
            let mut mirror = [0usize; 3];
            for a in 0..3 {
                mirror[a] = if ix[a] == 0 {
                    0
                } else {
                    g.points() - ix[a]
                };
            }
            let other = self.modes[g.flatten(mirror)];
            let defect = (self.modes[idx] - other.conj()).norm();
            if defect > worst {
                worst = defect;
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// Zeroes every mode with `3 |m_j| > N` on any axis (the 2/3 rule, as an
    /// exact integer test). Products of surviving modes alias strictly
    /// outside the kept band, so pointwise products of dealiased fields are
    /// exact convolutions on the kept band.
    pub fn dealiased(&self) -> Self {
        let g = &self.grid;
        let n = g.points() as i64;
        let keep: Vec<bool> = g.axis_signed().iter().map(|&m| 3 * m.abs() <= n).collect();
        let mut out = self.clone();
        apply_axis_mask(g, out.modes_mut(), &keep);
        out
    }

    /// Dyadic dilation via box rescaling; see [`DyadicScale`]. Doubling
    /// requires every occupied mode index to lie within `N/4` per axis so the
    /// dilated field stays inside the resolved band.
    pub fn rescaled(&self, scale: DyadicScale) -> Result<Self> {
        let g = &self.grid;
        match scale {
            DyadicScale::Double => {
                let limit = g.points() as i64 / 4;
                let floor = T::of(OCCUPIED_RATIO) * self.max_mode_magnitude();
                for idx in 0..g.total() {
                    let c = self.modes[idx];
                    if c.norm() <= floor {
                        continue;
                    }
                    let ix = g.decompose(idx);
                    for a in 0..g.dim() {
                        let m = g.signed_index(ix[a]);
                        if m.abs() > limit {
                            return Err(Error::BandLimit {
                                op: "rescale double",
                                index: m,
                                limit,
                            });
                        }
                    }
                }
                let half = g.length() / T::of(2.0);
                Ok(ScalarField {
                    grid: g.with_length(half)?,
                    modes: self.modes.clone(),
                })
            }
            DyadicScale::Halve => {
                let twice = g.length() * T::of(2.0);
                Ok(ScalarField {
                    grid: g.with_length(twice)?,
                    modes: self.modes.clone(),
                })
            }
        }
    }

    /// Shift by an integer number of grid cells per axis (exact phase ramp):
    /// the result samples `f(x - c h)`.
    pub fn translated(&self, cells: &[i64]) -> Result<Self> {
        let g = &self.grid;
        if cells.len() != g.dim() {
            return Err(Error::invalid(format!(
                "translation needs {} offsets, got {}",
                g.dim(),
                cells.len()
            )));
        }
        let n = g.points();
        let mut phases: Vec<Vec<Complex<T>>> = Vec::with_capacity(g.dim());
        for &c in cells {
            let table: Vec<Complex<T>> = (0..n)
                .map(|i| {
                    let m = g.signed_index(i);
                    let angle =
                        -T::of(2.0) * T::PI() * T::of((m * c) as f64) / T::of(n as f64);
                    Complex::new(angle.cos(), angle.sin())
                })
                .collect();
            phases.push(table);
        }
        let mut out = self.clone();
        for idx in 0..g.total() {
            let ix = g.decompose(idx);
            let mut factor = phases[0][ix[0]];
            for a in 1..g.dim() {
                factor = factor * phases[a][ix[a]];
            }
            out.modes[idx] = out.modes[idx] * factor;
        }
        Ok(out)
    }

    /// Heat semigroup at unit viscosity: multiplies each mode by
    /// `exp(-|k|^2 t)`. Time must be nonnegative.
    pub fn heat_flow(&self, t: T) -> Result<Self> {
        if !(t >= T::zero()) {
            return Err(Error::invalid(format!(
                "heat flow time must be nonnegative, got {}",
                t
            )));
        }
        let mut out = self.clone();
        apply_radial(&self.grid, out.modes_mut(), |ksq| (-ksq * t).exp());
        Ok(out)
    }

    /// Pointwise product on the grid (no dealiasing; callers that need an
    /// exact convolution dealias the factors and the result).
    pub fn product(&self, other: &Self) -> Result<Self> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let a = self.to_physical();
        let b = other.to_physical();
        let samples: Vec<T> = a.iter().zip(&b).map(|(&x, &y)| x * y).collect();
        Self::from_physical(&self.grid, &samples)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: T, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b.scale(c))
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for m in out.modes.iter_mut() {
            *m = m.scale(c);
        }
        out
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ScalarField {
            grid: self.grid.clone(),
            modes,
        })
    }

    /// Embeds the field into a grid refined by the (power of two) `factor`,
    /// same box: coefficients keep their signed indices, new modes are zero.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::invalid(format!(
                "refinement factor must be a power of two, got {}",
                factor
            )));
        }
        let g = &self.grid;
        let fine = g.with_points(g.points() * factor)?;
        let mut out = ScalarField::zero(&fine);
        for idx in 0..g.total() {
            let c = self.modes[idx];
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            let ix = g.decompose(idx);
            let mut jx = [0usize; 3];
            for a in 0..g.dim() {
                jx[a] = fine.storage_index(g.signed_index(ix[a]));
            }
            let flat = fine.flatten(jx);
            out.modes[flat] = c;
        }
        Ok(out)
    }
}

/// Multiplies each mode by `f(|k|^2)`; the incremental index avoids
/// recomputing axis contributions in the inner loop.
pub(crate) fn apply_radial<T: Scalar>(
    grid: &Grid<T>,
    modes: &mut [Complex<T>],
    f: impl Fn(T) -> T,
) {
    let ksq: Vec<T> = grid.axis_wavenumbers().iter().map(|&k| k * k).collect();
    let n = grid.points();
    let mut idx = 0;
    match grid.dim() {
        2 => {
            for i0 in 0..n {
                let a = ksq[i0];
                for i1 in 0..n {
                    let w = f(a + ksq[i1]);
                    modes[idx] = modes[idx].scale(w);
                    idx += 1;
                }
            }
        }
        _ => {
            for i0 in 0..n {
                let a = ksq[i0];
                for i1 in 0..n {
                    let b = a + ksq[i1];
                    for i2 in 0..n {
                        let w = f(b + ksq[i2]);
                        modes[idx] = modes[idx].scale(w);
                        idx += 1;
                    }
                }
            }
        }
    }
}

/// Zeroes every mode whose axis flag is false on any axis.
fn apply_axis_mask<T: Scalar>(grid: &Grid<T>, modes: &mut [Complex<T>], keep: &[bool]) {
    let n = grid.points();
    let zero = Complex::new(T::zero(), T::zero());
    let mut idx = 0;
    match grid.dim() {
        2 => {
            for i0 in 0..n {
                let k0 = keep[i0];
                for i1 in 0..n {
                    if !(k0 && keep[i1]) {
                        modes[idx] = zero;
                    }
                    idx += 1;
                }
            }
        }
        _ => {
            for i0 in 0..n {
                let k0 = keep[i0];
                for i1 in 0..n {
                    let k01 = k0 && keep[i1];
                    for i2 in 0..n {
                        if !(k01 && keep[i2]) {
                            modes[idx] = zero;
                        }
                        idx += 1;
                    }
                }
            }
        }
    }
}

/// Velocity field: one scalar component per space dimension, plus a
/// divergence-free tag maintained by the constructors and operators.
#[derive(Clone, Debug)]
pub struct VectorField<T> {
    components: Vec<ScalarField<T>>,
    divergence_free: bool,
}

impl<T: Scalar> VectorField<T> {
    pub fn zero(grid: &Grid<T>) -> Self {
        VectorField {
            components: (0..grid.dim()).map(|_| ScalarField::zero(grid)).collect(),
            divergence_free: true,
        }
    }

    /// Builds a velocity field and measures its spectral divergence to set
    /// the tag. Component count must match the grid dimension.
    pub fn from_components(components: Vec<ScalarField<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("vector field needs at least one component"));
        }
        let grid = components[0].grid().clone();
        if components.len() != grid.dim() {
            return Err(Error::invalid(format!(
                "{} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        for c in &components {
            if !c.grid().matches(&grid) {
                return Err(Error::GridMismatch);
            }
        }
        let mut field = VectorField {
            components,
            divergence_free: false,
        };
        field.divergence_free = field.divergence_ratio().as_f64() <= DIV_FREE_RATIO;
        Ok(field)
    }

    /// Constructor for operators that guarantee solenoidality spectrally.
    pub(crate) fn solenoidal_unchecked(components: Vec<ScalarField<T>>) -> Self {
        VectorField {
            components,
            divergence_free: true,
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &ScalarField<T> {
        &self.components[j]
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// `max_k |k . u^(k)| / max_k |u^(k)|`, zero for the zero field.
    pub fn divergence_ratio(&self) -> T {
        let g = self.grid().clone();
        let kt: Vec<T> = g.axis_wavenumbers();
        let mut worst = T::zero();
        let mut largest = T::zero();
        for idx in 0..g.total() {
            let ix = g.decompose(idx);
            let mut dot = Complex::new(T::zero(), T::zero());
            let mut mag = T::zero();
            for (a, comp) in self.components.iter().enumerate() {
                let c = comp.modes()[idx];
                dot = dot + c.scale(kt[ix[a]]);
                mag = mag + c.norm_sqr();
            }
            let dot = dot.norm();
            let mag = mag.sqrt();
            if dot > worst {
                worst = dot;
            }
            if mag > largest {
                largest = mag;
            }
        }
        if largest == T::zero() {
            T::zero()
        } else {
            worst / largest
        }
    }

    /// Pointwise Euclidean speed `|u|` at the grid points.
    pub fn magnitude_samples(&self) -> Vec<T> {
        let parts: Vec<Vec<T>> = self.components.iter().map(|c| c.to_physical()).collect();
        (0..self.grid().total())
            .map(|i| {
                parts
                    .iter()
                    .map(|p| p[i] * p[i])
                    .fold(T::zero(), |a, b| a + b)
                    .sqrt()
            })
            .collect()
    }

    pub fn max_speed(&self) -> T {
        self.magnitude_samples()
            .into_iter()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Grid L2 norm via Parseval: `L^{n/2} (sum |u^|^2)^{1/2}`.
    pub fn energy_norm(&self) -> T {
        let sumsq = self
            .components
            .iter()
            .map(|c| {
                c.modes()
                    .iter()
                    .map(|m| m.norm_sqr())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), |a, b| a + b);
        let half_dim = T::of(self.grid().dim() as f64 / 2.0);
        self.grid().length().powf(half_dim) * sumsq.sqrt()
    }

    pub fn max_mode_magnitude(&self) -> T {
        self.components
            .iter()
            .map(|c| c.max_mode_magnitude())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn heat_flow(&self, t: T) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.heat_flow(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            components,
            divergence_free: self.divergence_free,
        })
    }

    pub fn dealiased(&self) -> Self {
        VectorField {
            components: self.components.iter().map(|c| c.dealiased()).collect(),
            divergence_free: self.divergence_free,
        }
    }

    pub fn rescaled(&self, scale: DyadicScale) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.rescaled(scale))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            components,
            divergence_free: self.divergence_free,
        })
    }

    pub fn translated(&self, cells: &[i64]) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.translated(cells))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            components,
            divergence_free: self.divergence_free,
        })
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.refined(factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            components,
            divergence_free: self.divergence_free,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, ScalarField::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, ScalarField::sub)
    }

    pub fn add_scaled(&self, c: T, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add_scaled(c, b))
    }

    pub fn scaled(&self, c: T) -> Self {
        VectorField {
            components: self.components.iter().map(|s| s.scaled(c)).collect(),
            divergence_free: self.divergence_free,
        }
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField<T>, &ScalarField<T>) -> Result<ScalarField<T>>,
    ) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField {
            components,
            divergence_free: self.divergence_free && other.divergence_free,
        })
    }
}
