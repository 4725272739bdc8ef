//! Fourier multiplier operators: heat semigroup, Riesz transforms, the Leray
//! projection in two equivalent forms, and the projected advection bilinear
//! form of the mild Navier-Stokes formulation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{apply_radial, ScalarField, VectorField};
use crate::float::Scalar;
use crate::grid::Grid;

/// Visits every mode with its signed wavenumber vector and `|k|^2`.
fn for_each_mode<T: Scalar>(grid: &Grid<T>, mut f: impl FnMut(usize, [T; 3], T)) {
    let kt = grid.axis_wavenumbers();
    let n = grid.points();
    let mut idx = 0;
    match grid.dim() {
        2 => {
            for i0 in 0..n {
                let k0 = kt[i0];
                let k0sq = k0 * k0;
                for i1 in 0..n {
                    let k1 = kt[i1];
                    f(idx, [k0, k1, T::zero()], k0sq + k1 * k1);
                    idx += 1;
                }
            }
        }
        _ => {
            for i0 in 0..n {
                let k0 = kt[i0];
                let k0sq = k0 * k0;
                for i1 in 0..n {
                    let k1 = kt[i1];
                    let k01sq = k0sq + k1 * k1;
                    for i2 in 0..n {
                        let k2 = kt[i2];
                        f(idx, [k0, k1, k2], k01sq + k2 * k2);
                        idx += 1;
                    }
                }
            }
        }
    }
}

/// Diagonal symbol of the heat semigroup `exp(t Laplacian)` at unit
/// viscosity.
#[derive(Clone, Copy, Debug)]
pub struct HeatMultiplier<T> {
    time: T,
}

impl<T: Scalar> HeatMultiplier<T> {
    pub fn new(time: T) -> Result<Self> {
        if !(time >= T::zero()) {
            return Err(Error::invalid(format!(
                "heat multiplier time must be nonnegative, got {}",
                time
            )));
        }
        Ok(HeatMultiplier { time })
    }

    pub fn time(&self) -> T {
        self.time
    }

    /// `exp(-|k|^2 t)`; always in `(0, 1]`, equal to one exactly at `k = 0`.
    pub fn factor(&self, ksq: T) -> T {
        (-ksq * self.time).exp()
    }

    pub fn apply_scalar(&self, f: &ScalarField<T>) -> ScalarField<T> {
        let mut out = f.clone();
        apply_radial(f.grid(), out.modes_mut(), |ksq| self.factor(ksq));
        out
    }

    pub fn apply(&self, u: &VectorField<T>) -> VectorField<T> {
        u.heat_flow(self.time).expect("time checked at construction")
    }
}

/// Heat flow of a velocity field: `S(t) u`, `t >= 0`.
pub fn heat_semigroup<T: Scalar>(u: &VectorField<T>, t: T) -> Result<VectorField<T>> {
    u.heat_flow(t)
}

/// Riesz transform along `axis`: symbol `-i k_axis / |k|`, zero mode mapped
/// to zero. Real fields stay real.
pub fn riesz_transform<T: Scalar>(f: &ScalarField<T>, axis: usize) -> Result<ScalarField<T>> {
    let g = f.grid().clone();
    if axis >= g.dim() {
        return Err(Error::invalid(format!(
            "riesz axis {} out of range for dimension {}",
            axis,
            g.dim()
        )));
    }
    let mut out = f.clone();
    let modes = out.modes_mut();
    for_each_mode(&g, |idx, k, ksq| {
        if ksq == T::zero() {
            modes[idx] = Complex::new(T::zero(), T::zero());
        } else {
            let symbol = Complex::new(T::zero(), -k[axis] / ksq.sqrt());
            modes[idx] = modes[idx] * symbol;
        }
    });
    Ok(out)
}

/// Leray projection onto divergence-free fields: mode-wise
/// `u^ - k (k . u^) / |k|^2`, identity on the mean mode.
pub fn leray_project<T: Scalar>(u: &VectorField<T>) -> VectorField<T> {
    let g = u.grid().clone();
    let dim = g.dim();
    let mut modes: Vec<Vec<Complex<T>>> = u
        .components()
        .iter()
        .map(|c| c.modes().to_vec())
        .collect();
    for_each_mode(&g, |idx, k, ksq| {
        if ksq == T::zero() {
            return;
        }
        let mut dot = Complex::new(T::zero(), T::zero());
        for (a, comp) in modes.iter().enumerate().take(dim) {
            dot = dot + comp[idx].scale(k[a]);
        }
        let dot = dot.scale(T::one() / ksq);
        for (a, comp) in modes.iter_mut().enumerate().take(dim) {
            comp[idx] = comp[idx] - dot.scale(k[a]);
        }
    });
    let components = modes
        .into_iter()
        .map(|m| ScalarField::from_modes(&g, m).expect("length preserved"))
        .collect();
    VectorField::solenoidal_unchecked(components)
}

/// Leray projection written through Riesz transforms: with
/// `sigma = sum_l R_l u_l`, the projection is `u_j + R_j sigma`
/// (the composition `R_j R_l` carries symbol `-k_j k_l / |k|^2`, so the plus
/// sign reproduces `I - k k^T / |k|^2`). Agrees with [`leray_project`] to
/// rounding.
pub fn riesz_form_project<T: Scalar>(u: &VectorField<T>) -> Result<VectorField<T>> {
    let dim = u.dim();
    let mut sigma = riesz_transform(u.component(0), 0)?;
    for a in 1..dim {
        sigma = sigma.add(&riesz_transform(u.component(a), a)?)?;
    }
    let mut components = Vec::with_capacity(dim);
    for a in 0..dim {
        components.push(u.component(a).add(&riesz_transform(&sigma, a)?)?);
    }
    Ok(VectorField::solenoidal_unchecked(components))
}

/// Spectral divergence `sum_j i k_j u_j^`.
pub fn spectral_divergence<T: Scalar>(u: &VectorField<T>) -> ScalarField<T> {
    let g = u.grid().clone();
    let dim = g.dim();
    let mut out = vec![Complex::new(T::zero(), T::zero()); g.total()];
    for_each_mode(&g, |idx, k, _| {
        let mut dot = Complex::new(T::zero(), T::zero());
        for a in 0..dim {
            dot = dot + u.component(a).modes()[idx].scale(k[a]);
        }
        out[idx] = Complex::new(-dot.im, dot.re); // multiply by i
    });
    ScalarField::from_modes(&g, out).expect("length preserved")
}

/// Spectral gradient of a scalar field.
pub fn gradient<T: Scalar>(f: &ScalarField<T>) -> VectorField<T> {
    let g = f.grid().clone();
    let dim = g.dim();
    let mut comps: Vec<Vec<Complex<T>>> =
        vec![vec![Complex::new(T::zero(), T::zero()); g.total()]; dim];
    for_each_mode(&g, |idx, k, _| {
        let c = f.modes()[idx];
        let ic = Complex::new(-c.im, c.re);
        for (a, comp) in comps.iter_mut().enumerate().take(dim) {
            comp[idx] = ic.scale(k[a]);
        }
    });
    let components = comps
        .into_iter()
        .map(|m| ScalarField::from_modes(&g, m).expect("length preserved"))
        .collect();
    // a gradient is almost never solenoidal; let the constructor measure
    VectorField::from_components(components).expect("components share the grid")
}

/// Divergence-free velocity from a stream function in two dimensions:
/// `u = (d psi / dx2, -d psi / dx1)`.
pub fn perp_gradient<T: Scalar>(psi: &ScalarField<T>) -> Result<VectorField<T>> {
    let g = psi.grid().clone();
    if g.dim() != 2 {
        return Err(Error::invalid(
            "perp_gradient needs a two-dimensional grid",
        ));
    }
    let mut u1 = vec![Complex::new(T::zero(), T::zero()); g.total()];
    let mut u2 = vec![Complex::new(T::zero(), T::zero()); g.total()];
    for_each_mode(&g, |idx, k, _| {
        let c = psi.modes()[idx];
        let ic = Complex::new(-c.im, c.re);
        u1[idx] = ic.scale(k[1]);
        u2[idx] = -ic.scale(k[0]);
    });
    Ok(VectorField::solenoidal_unchecked(vec![
        ScalarField::from_modes(&g, u1)?,
        ScalarField::from_modes(&g, u2)?,
    ]))
}

/// Divergence-free velocity from a vector potential in three dimensions:
/// `u = curl A`.
pub fn curl<T: Scalar>(potential: &[ScalarField<T>; 3]) -> Result<VectorField<T>> {
    let g = potential[0].grid().clone();
    if g.dim() != 3 {
        return Err(Error::invalid("curl needs a three-dimensional grid"));
    }
    for a in potential.iter() {
        if !a.grid().matches(&g) {
            return Err(Error::GridMismatch);
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut comps = vec![vec![zero; g.total()]; 3];
    for_each_mode(&g, |idx, k, _| {
        let a: Vec<Complex<T>> = potential.iter().map(|p| p.modes()[idx]).collect();
        let i_times = |c: Complex<T>| Complex::new(-c.im, c.re);
        comps[0][idx] = i_times(a[2].scale(k[1]) - a[1].scale(k[2]));
        comps[1][idx] = i_times(a[0].scale(k[2]) - a[2].scale(k[0]));
        comps[2][idx] = i_times(a[1].scale(k[0]) - a[0].scale(k[1]));
    });
    let components = comps
        .into_iter()
        .map(|m| ScalarField::from_modes(&g, m).expect("length preserved"))
        .collect();
    Ok(VectorField::solenoidal_unchecked(components))
}

/// Projected advection term `B(u, v) = P [div (u tensor v)]`: pointwise
/// tensor product on the grid, dealias, spectral divergence, Leray
/// projection. Bilinear in each slot; the output is divergence free and
/// supported on the dealiased band.
pub fn bilinear<T: Scalar>(u: &VectorField<T>, v: &VectorField<T>) -> Result<VectorField<T>> {
    let g = u.grid().clone();
    if !g.matches(v.grid()) {
        return Err(Error::GridMismatch);
    }
    let dim = g.dim();
    let u_phys: Vec<Vec<T>> = u.components().iter().map(|c| c.to_physical()).collect();
    let v_phys: Vec<Vec<T>> = v.components().iter().map(|c| c.to_physical()).collect();

    let zero = Complex::new(T::zero(), T::zero());
    let mut comps = vec![vec![zero; g.total()]; dim];
    let mut samples = vec![T::zero(); g.total()];
    for j in 0..dim {
        for (l, u_l) in u_phys.iter().enumerate().take(dim) {
            for (i, s) in samples.iter_mut().enumerate() {
                *s = u_l[i] * v_phys[j][i];
            }
            let tensor = ScalarField::from_physical(&g, &samples)?.dealiased();
            let comp = &mut comps[j];
            for_each_mode(&g, |idx, k, _| {
                let c = tensor.modes()[idx];
                // accumulate i k_l (u_l v_j)^
                comp[idx] = comp[idx] + Complex::new(-c.im, c.re).scale(k[l]);
            });
        }
    }
    let components = comps
        .into_iter()
        .map(|m| ScalarField::from_modes(&g, m).expect("length preserved"))
        .collect::<Vec<_>>();
    Ok(leray_project(&VectorField::solenoidal_unchecked(components)))
}
