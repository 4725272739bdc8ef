//! Scale-critical norms on periodic fields: grid Lp and weak Lp, a caloric
//! sup norm built from the heat flow, dyadic scaling degrees, and the
//! quadrature adequacy check for the mild integral equation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DyadicScale, ScalarField, VectorField};
use crate::float::Scalar;
use crate::grid::Grid;

/// Log-spaced sample points, endpoints included and exact.
pub(crate) fn log_spaced<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    debug_assert!(count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let denom = T::of((count - 1) as f64);
    let mut out: Vec<T> = (0..count)
        .map(|i| {
            let s = T::of(i as f64) / denom;
            (a + (b - a) * s).exp()
        })
        .collect();
    out[0] = lo;
    let last = out.len() - 1;
    out[last] = hi;
    out
}

/// Anything the norms apply to: scalar fields (magnitude `|f|`) and velocity
/// fields (pointwise Euclidean speed).
pub trait NormedField<T: Scalar>: Clone + Send + Sync {
    fn grid(&self) -> &Grid<T>;
    fn magnitude_samples(&self) -> Vec<T>;
    fn heat_flow(&self, t: T) -> Result<Self>;
    fn rescaled(&self, scale: DyadicScale) -> Result<Self>;
    fn is_zero(&self) -> bool;
}

impl<T: Scalar> NormedField<T> for ScalarField<T> {
    fn grid(&self) -> &Grid<T> {
        ScalarField::grid(self)
    }
    fn magnitude_samples(&self) -> Vec<T> {
        self.to_physical().into_iter().map(|x| x.abs()).collect()
    }
    fn heat_flow(&self, t: T) -> Result<Self> {
        ScalarField::heat_flow(self, t)
    }
    fn rescaled(&self, scale: DyadicScale) -> Result<Self> {
        ScalarField::rescaled(self, scale)
    }
    fn is_zero(&self) -> bool {
        ScalarField::is_zero(self)
    }
}

impl<T: Scalar> NormedField<T> for VectorField<T> {
    fn grid(&self) -> &Grid<T> {
        VectorField::grid(self)
    }
    fn magnitude_samples(&self) -> Vec<T> {
        VectorField::magnitude_samples(self)
    }
    fn heat_flow(&self, t: T) -> Result<Self> {
        VectorField::heat_flow(self, t)
    }
    fn rescaled(&self, scale: DyadicScale) -> Result<Self> {
        VectorField::rescaled(self, scale)
    }
    fn is_zero(&self) -> bool {
        VectorField::is_zero(self)
    }
}

/// Grid Lp norm `(sum |f|^p h^n)^{1/p}`, `p >= 1`.
pub fn lp_norm<T: Scalar, F: NormedField<T>>(f: &F, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::invalid(format!("lp norm needs p >= 1, got {}", p)));
    }
    let vol = f.grid().cell_volume();
    let sum = f
        .magnitude_samples()
        .into_iter()
        .map(|m| m.powf(p))
        .fold(T::zero(), |a, b| a + b);
    Ok((sum * vol).powf(T::one() / p))
}

/// Weak Lp quasi-norm via the descending rearrangement:
/// `sup_k a_(k) (k h^n)^{1/p}`, `p > 1`. Never exceeds the strong norm.
pub fn weak_lp_norm<T: Scalar, F: NormedField<T>>(f: &F, p: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::invalid(format!(
            "weak lp norm needs p > 1, got {}",
            p
        )));
    }
    let mut mags = f.magnitude_samples();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).expect("magnitudes are finite"));
    let vol = f.grid().cell_volume();
    let inv_p = T::one() / p;
    let mut best = T::zero();
    for (k, a) in mags.into_iter().enumerate() {
        if a == T::zero() {
            break;
        }
        let measure = T::of((k + 1) as f64) * vol;
        let cand = a * measure.powf(inv_p);
        if cand > best {
            best = cand;
        }
    }
    Ok(best)
}

/// Sampling recipe for the caloric sup norm
/// `sup_t t^{beta/2} ||S(t) f||_p` with `beta = 1 - n/p`: the sup is taken
/// over a log-spaced grid of heat-flow times.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec<T> {
    dim: usize,
    p: T,
    t_min: T,
    t_max: T,
    t_samples: usize,
}

impl<T: Scalar> NormSpec<T> {
    /// `p` must exceed the dimension (criticality needs `beta` in `(0,1)`),
    /// times must satisfy `0 < t_min < t_max`, and at least 16 samples keep
    /// the sup honest.
    pub fn new(dim: usize, p: T, t_min: T, t_max: T, t_samples: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::BadDimension(dim));
        }
        if !(p > T::of(dim as f64)) {
            return Err(Error::invalid(format!(
                "caloric norm needs p > n for criticality; got p = {}, n = {}",
                p, dim
            )));
        }
        if !(t_min > T::zero()) || !(t_max > t_min) {
            return Err(Error::invalid(format!(
                "caloric sampling needs 0 < t_min < t_max, got [{}, {}]",
                t_min, t_max
            )));
        }
        if t_samples < 16 {
            return Err(Error::invalid(format!(
                "caloric sampling needs at least 16 points, got {}",
                t_samples
            )));
        }
        Ok(NormSpec {
            dim,
            p,
            t_min,
            t_max,
            t_samples,
        })
    }

    /// Default sampling for a given box: `[1e-4, (L / 2 pi)^2 / 4]` with 64
    /// points.
    pub fn defaults(dim: usize, p: T, box_length: T) -> Result<Self> {
        let ratio = box_length / (T::of(2.0) * T::PI());
        NormSpec::new(dim, p, T::of(1e-4), ratio * ratio / T::of(4.0), 64)
    }

    /// Sampling grid aligned with dyadic scaling: `t_max = t_min 4^q` with
    /// `per` steps per factor of four, so quartering a sample time lands on
    /// the grid again. Used by the caloric scaling-degree check.
    pub fn scaling_compatible(
        dim: usize,
        p: T,
        t_min: T,
        quarterings: usize,
        per: usize,
    ) -> Result<Self> {
        if quarterings == 0 || per == 0 {
            return Err(Error::invalid(
                "scaling-compatible grid needs at least one quartering and one step",
            ));
        }
        let t_max = t_min * T::of(4.0).powi(quarterings as i32);
        NormSpec::new(dim, p, t_min, t_max, quarterings * per + 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// Critical weight exponent `beta = 1 - n/p`, in `(0, 1)`.
    pub fn beta(&self) -> T {
        T::one() - T::of(self.dim as f64) / self.p
    }

    pub fn t_min(&self) -> T {
        self.t_min
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn t_samples(&self) -> usize {
        self.t_samples
    }

    pub fn sample_times(&self) -> Vec<T> {
        log_spaced(self.t_min, self.t_max, self.t_samples)
    }

    /// Doubles the sampling density; the new grid contains every old point,
    /// so the sampled sup can only grow under refinement.
    pub fn refined(&self) -> Self {
        let mut r = self.clone();
        r.t_samples = 2 * self.t_samples - 1;
        r
    }
}

/// One row of a weighted norm series.
#[derive(Clone, Copy, Debug)]
pub struct NormSample<T> {
    pub t: T,
    pub value: T,
    pub weighted: T,
}

/// Weighted norm history `(t, ||.||, t^{beta/2} ||.||)` with strictly
/// increasing times; the weighted column is checked against the other two at
/// construction.
#[derive(Clone, Debug)]
pub struct NormSeries<T> {
    beta: T,
    samples: Vec<NormSample<T>>,
}

impl<T: Scalar> NormSeries<T> {
    pub fn new(beta: T, samples: Vec<NormSample<T>>) -> Result<Self> {
        let tol = T::of(1e-12);
        for (i, s) in samples.iter().enumerate() {
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::invalid(format!(
                    "norm series times must increase strictly (rows {} and {})",
                    i - 1,
                    i
                )));
            }
            let expect = s.t.powf(beta / T::of(2.0)) * s.value;
            let scale = expect.abs().max(s.weighted.abs()).max(T::of(1e-300));
            if (s.weighted - expect).abs() > tol * scale {
                return Err(Error::invalid(format!(
                    "weighted column inconsistent at t = {} (got {}, expect {})",
                    s.t, s.weighted, expect
                )));
            }
        }
        Ok(NormSeries { beta, samples })
    }

    /// Builds the series from `(t, value)` pairs, filling in the weight.
    pub fn from_values(beta: T, rows: &[(T, T)]) -> Result<Self> {
        let samples = rows
            .iter()
            .map(|&(t, value)| NormSample {
                t,
                value,
                weighted: t.powf(beta / T::of(2.0)) * value,
            })
            .collect();
        NormSeries::new(beta, samples)
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn samples(&self) -> &[NormSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_weighted(&self) -> T {
        self.samples
            .iter()
            .map(|s| s.weighted)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Rows with `lo <= t <= hi`.
    pub fn window(&self, lo: T, hi: T) -> Vec<NormSample<T>> {
        self.samples
            .iter()
            .copied()
            .filter(|s| s.t >= lo && s.t <= hi)
            .collect()
    }
}

/// Caloric sup norm evaluation with its evidence.
#[derive(Clone, Debug)]
pub struct BesovReport<T> {
    pub value: T,
    pub argmax_t: T,
    /// True when the sup sits on the first or last sample; the sampled sup
    /// is then likely a truncation of the true one.
    pub endpoint_attained: bool,
    pub series: NormSeries<T>,
}

/// Caloric sup norm `sup_t t^{beta/2} ||S(t) f||_p` over the sampling grid.
pub fn besov_norm<T: Scalar, F: NormedField<T>>(f: &F, spec: &NormSpec<T>) -> Result<T> {
    Ok(besov_detailed(f, spec)?.value)
}

/// As [`besov_norm`], returning the whole weighted series and the location
/// of the sup.
pub fn besov_detailed<T: Scalar, F: NormedField<T>>(
    f: &F,
    spec: &NormSpec<T>,
) -> Result<BesovReport<T>> {
    if spec.dim() != f.grid().dim() {
        return Err(Error::invalid(format!(
            "norm spec dimension {} does not match field dimension {}",
            spec.dim(),
            f.grid().dim()
        )));
    }
    let times = spec.sample_times();
    let p = spec.p();
    let rows: Vec<(T, T)> = times
        .par_iter()
        .map(|&t| -> Result<(T, T)> {
            let flowed = f.heat_flow(t)?;
            Ok((t, lp_norm(&flowed, p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let series = NormSeries::from_values(spec.beta(), &rows)?;
    let mut best = 0usize;
    for (i, s) in series.samples().iter().enumerate() {
        if s.weighted > series.samples()[best].weighted {
            best = i;
        }
    }
    let last = series.len() - 1;
    Ok(BesovReport {
        value: series.samples()[best].weighted,
        argmax_t: series.samples()[best].t,
        endpoint_attained: best == 0 || best == last,
        series,
    })
}

/// Norm whose dyadic scaling degree is being measured.
#[derive(Clone, Debug)]
pub enum NormKind<T> {
    Lp(T),
    Caloric(NormSpec<T>),
}

/// Measured dyadic scaling degree `log2(||f(2.)|| / ||f||)`. For the Lp norm
/// the exact degree is `-n/p`; for the caloric norm it is `-n/p - beta`
/// (up to sampling-grid alignment, see
/// [`NormSpec::scaling_compatible`]).
pub fn scaling_degree<T: Scalar, F: NormedField<T>>(f: &F, kind: &NormKind<T>) -> Result<T> {
    if f.is_zero() {
        return Err(Error::invalid(
            "scaling degree of the zero field is undefined",
        ));
    }
    let doubled = f.rescaled(DyadicScale::Double)?;
    let (num, den) = match kind {
        NormKind::Lp(p) => (lp_norm(&doubled, *p)?, lp_norm(f, *p)?),
        NormKind::Caloric(spec) => (besov_norm(&doubled, spec)?, besov_norm(f, spec)?),
    };
    if !(den > T::zero()) || !(num > T::zero()) {
        return Err(Error::invalid(
            "scaling degree needs strictly positive norms",
        ));
    }
    Ok((num / den).ln() / T::of(2.0).ln())
}

/// Integrability verdict for the singular quadrature weight
/// `(t - tau)^{-a}`, `a = (1 + n/p) / 2`, over a horizon `T0`.
#[derive(Clone, Copy, Debug)]
pub struct AdequacyReport<T> {
    pub exponent: T,
    pub integrable: bool,
    /// `T0^{1-a} / (1-a)` when integrable.
    pub weight_integral: Option<T>,
}

/// The mild-equation quadrature is adequate exactly when `p > n`; at or
/// below that the endpoint weight is non-integrable.
pub fn adequacy_check<T: Scalar>(dim: usize, p: T, horizon: T) -> Result<AdequacyReport<T>> {
    if dim != 2 && dim != 3 {
        return Err(Error::BadDimension(dim));
    }
    if !(p >= T::one()) {
        return Err(Error::invalid(format!("adequacy needs p >= 1, got {}", p)));
    }
    if !(horizon > T::zero()) {
        return Err(Error::invalid(format!(
            "adequacy horizon must be positive, got {}",
            horizon
        )));
    }
    let exponent = (T::one() + T::of(dim as f64) / p) / T::of(2.0);
    let integrable = exponent < T::one();
    let weight_integral = if integrable {
        Some(horizon.powf(T::one() - exponent) / (T::one() - exponent))
    } else {
        None
    };
    Ok(AdequacyReport {
        exponent,
        integrable,
        weight_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid2(n: usize, l: f64) -> Grid<f64> {
        Grid::new(2, n, l).unwrap()
    }

    #[test]
    fn lp_of_sine_closed_forms() {
        let g = grid2(32, 5.0);
        let f = ScalarField::from_fn(&g, |x| (2.0 * PI * x[0] / 5.0).sin());
        // integral of sin^2 over the box is L^n / 2
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert!((l2 - (25.0f64 / 2.0).sqrt()).abs() < 1e-12);
        // integral of sin^4 is 3 L^n / 8
        let l4 = lp_norm(&f, 4.0).unwrap();
        assert!((l4 - (3.0 * 25.0f64 / 8.0).powf(0.25)).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn l2_matches_parseval() {
        let g = grid2(16, 3.0);
        let f = ScalarField::from_fn(&g, |x| {
            (2.0 * PI * x[0] / 3.0).sin() + 0.4 * (4.0 * PI * x[1] / 3.0).cos()
        });
        let quad = lp_norm(&f, 2.0).unwrap();
        let parseval = 3.0f64 * f.coeff_l2(); // L^{n/2} = L for n = 2
        assert!((quad - parseval).abs() < 1e-12);
    }

    #[test]
    fn weak_lp_of_indicator_plateaus_at_volume_power() {
        // indicator of a block: the rearrangement is flat, so the weak and
        // strong norms agree at V^{1/p} exactly
        let g = grid2(16, 2.0);
        let h = g.spacing();
        let samples: Vec<f64> = (0..g.total())
            .map(|idx| {
                let ix = g.decompose(idx);
                let (x, y) = (ix[0] as f64 * h, ix[1] as f64 * h);
                if x < 1.0 && y < 0.5 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let f = ScalarField::from_physical(&g, &samples).unwrap();
        let p = 4.0;
        let volume = 0.5f64;
        let weak = weak_lp_norm(&f, p).unwrap();
        let strong = lp_norm(&f, p).unwrap();
        assert!((weak - volume.powf(1.0 / p)).abs() < 1e-12);
        assert!((strong - volume.powf(1.0 / p)).abs() < 1e-12);
    }

    #[test]
    fn weak_never_exceeds_strong() {
        let g = grid2(32, 2.0);
        let f = ScalarField::from_fn(&g, |x| {
            (PI * x[0]).sin() * (3.0 * PI * x[1]).cos() + 0.2
        });
        for &p in &[1.5, 2.0, 4.0, 8.0] {
            let weak = weak_lp_norm(&f, p).unwrap();
            let strong = lp_norm(&f, p).unwrap();
            assert!(weak <= strong * (1.0 + 1e-12), "p = {}", p);
        }
        assert!(weak_lp_norm(&f, 1.0).is_err());
    }

    #[test]
    fn gaussian_norms_match_closed_form() {
        // exp(-|x|^2 / 4a): Lp norm is (4 pi a / p)^{n/(2p)}
        let g = grid2(128, 30.0);
        let a = 1.0;
        let c = 15.0;
        let f = ScalarField::from_fn(&g, |x| {
            let r2 = (x[0] - c).powi(2) + (x[1] - c).powi(2);
            (-r2 / (4.0 * a)).exp()
        });
        for &p in &[2.0, 4.0] {
            let closed = (4.0 * PI * a / p).powf(2.0 / (2.0 * p));
            let measured = lp_norm(&f, p).unwrap();
            assert!(
                (measured - closed).abs() < 1e-8 * closed,
                "p = {}: {} vs {}",
                p,
                measured,
                closed
            );
        }
    }

    #[test]
    fn caloric_series_of_gaussian_matches_closed_form() {
        // S(t) G_a = (a / (a+t))^{n/2} G_{a+t}
        let g = grid2(128, 30.0);
        let a = 1.0;
        let c = 15.0;
        let f = ScalarField::from_fn(&g, |x| {
            let r2 = (x[0] - c).powi(2) + (x[1] - c).powi(2);
            (-r2 / (4.0 * a)).exp()
        });
        let p = 4.0;
        let spec = NormSpec::new(2, p, 1e-3, 4.0, 32).unwrap();
        let report = besov_detailed(&f, &spec).unwrap();
        for s in report.series.samples() {
            let width = a + s.t;
            let closed = (a / width).powf(1.0) * (4.0 * PI * width / p).powf(2.0 / (2.0 * p));
            assert!(
                (s.value - closed).abs() < 1e-8 * closed,
                "t = {}: {} vs {}",
                s.t,
                s.value,
                closed
            );
        }
    }

    #[test]
    fn caloric_sup_grows_under_refinement() {
        let g = grid2(32, 2.0 * PI);
        let f = ScalarField::from_fn(&g, |x| (3.0 * x[0]).cos() * (2.0 * x[1]).sin() + 0.3 * (x[0]).sin());
        let spec = NormSpec::new(2, 4.0, 1e-3, 1.0, 17).unwrap();
        let coarse = besov_norm(&f, &spec).unwrap();
        let fine = besov_norm(&f, &spec.refined()).unwrap();
        assert!(fine >= coarse);
        assert_eq!(spec.refined().t_samples(), 33);
    }

    #[test]
    fn caloric_norm_never_grows_along_heat_flow() {
        let g = grid2(32, 2.0 * PI);
        let f = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos() + (x[1]).sin());
        let spec = NormSpec::new(2, 4.0, 1e-3, 1.0, 32).unwrap();
        let before = besov_norm(&f, &spec).unwrap();
        let after = besov_norm(&f.heat_flow(0.2).unwrap(), &spec).unwrap();
        assert!(after <= before * (1.0 + 1e-12));
    }

    #[test]
    fn endpoint_flag_reports_sup_location() {
        let g = grid2(64, 2.0 * PI);
        // high mode: weighted sup near t = beta / (2 k^2), below t_min
        let hot = ScalarField::from_fn(&g, |x| (20.0 * x[0]).cos());
        let spec = NormSpec::new(2, 4.0, 1e-2, 1.0, 24).unwrap();
        let r = besov_detailed(&hot, &spec).unwrap();
        assert!(r.endpoint_attained);
        assert_eq!(r.argmax_t, 1e-2);
        // moderate mode peaks inside the window
        let mild = ScalarField::from_fn(&g, |x| (3.0 * x[0]).cos());
        let spec = NormSpec::new(2, 4.0, 1e-4, 10.0, 48).unwrap();
        let r = besov_detailed(&mild, &spec).unwrap();
        assert!(!r.endpoint_attained);
    }

    #[test]
    fn spec_validation() {
        assert!(NormSpec::new(2, 4.0, 1e-3, 1.0, 16).is_ok());
        assert!(NormSpec::new(2, 2.0, 1e-3, 1.0, 16).is_err()); // p = n
        assert!(NormSpec::new(3, 3.0, 1e-3, 1.0, 16).is_err());
        assert!(NormSpec::new(2, 4.0, 0.0, 1.0, 16).is_err());
        assert!(NormSpec::new(2, 4.0, 1.0, 0.5, 16).is_err());
        assert!(NormSpec::new(2, 4.0, 1e-3, 1.0, 8).is_err());
        assert!(NormSpec::new(1, 4.0, 1e-3, 1.0, 16).is_err());
        let s = NormSpec::<f64>::new(2, 4.0, 1e-3, 1.0, 16).unwrap();
        assert!((s.beta() - 0.5).abs() < 1e-15);
        let s3 = NormSpec::<f64>::new(3, 4.0, 1e-3, 1.0, 16).unwrap();
        assert!((s3.beta() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lp_scaling_degree_is_exact() {
        let g = grid2(32, 2.0);
        let f = ScalarField::from_fn(&g, |x| {
            (2.0 * PI * x[0] / 2.0).cos() + 0.5 * (4.0 * PI * x[1] / 2.0).sin()
        });
        for &p in &[2.0, 4.0, 8.0] {
            let deg = scaling_degree(&f, &NormKind::Lp(p)).unwrap();
            assert!(
                (deg + 2.0 / p).abs() < 1e-12,
                "p = {}: degree {}",
                p,
                deg
            );
        }
        let z = ScalarField::<f64>::zero(&g);
        assert!(scaling_degree(&z, &NormKind::Lp(2.0)).is_err());
    }

    #[test]
    fn caloric_scaling_degree_on_compatible_grid() {
        let g = grid2(32, 2.0 * PI);
        let f = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos() * (x[1]).sin() + 0.4 * (3.0 * x[1]).cos());
        let p = 4.0;
        let spec = NormSpec::scaling_compatible(2, p, 1e-4, 7, 8).unwrap();
        let deg = scaling_degree(&f, &NormKind::Caloric(spec)).unwrap();
        let expect = -(2.0 / p) - 0.5; // -n/p - beta
        assert!((deg - expect).abs() < 1e-3, "degree {} vs {}", deg, expect);
    }

    #[test]
    fn adequacy_examples() {
        // p = 4, n = 3, horizon 1: exponent 7/8, integral 8
        let r = adequacy_check::<f64>(3, 4.0, 1.0).unwrap();
        assert!(r.integrable);
        assert!((r.exponent - 0.875).abs() < 1e-15);
        assert!((r.weight_integral.unwrap() - 8.0).abs() < 1e-12);

        // p = 2 in three dimensions is not integrable
        let r = adequacy_check::<f64>(3, 2.0, 1.0).unwrap();
        assert!(!r.integrable);
        assert!(r.weight_integral.is_none());
        assert!((r.exponent - 1.25).abs() < 1e-15);

        // exponent exactly one at p = n
        let r = adequacy_check::<f64>(2, 2.0, 5.0).unwrap();
        assert!(!r.integrable);

        assert!(adequacy_check::<f64>(4, 2.0, 1.0).is_err());
        assert!(adequacy_check::<f64>(2, 2.0, 0.0).is_err());
    }

    #[test]
    fn norm_series_validates_rows() {
        let ok = NormSeries::from_values(0.5, &[(0.1, 2.0), (0.2, 1.5)]);
        assert!(ok.is_ok());
        let bad_order = NormSeries::from_values(0.5, &[(0.2, 2.0), (0.1, 1.5)]);
        assert!(bad_order.is_err());
        let bad_weight = NormSeries::new(
            0.5,
            vec![NormSample {
                t: 0.1,
                value: 1.0,
                weighted: 0.9,
            }],
        );
        assert!(bad_weight.is_err());
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = grid2(16, 1.0);
        let z = ScalarField::<f64>::zero(&g);
        assert_eq!(lp_norm(&z, 2.0).unwrap(), 0.0);
        assert_eq!(weak_lp_norm(&z, 2.0).unwrap(), 0.0);
        let spec = NormSpec::new(2, 4.0, 1e-3, 1.0, 16).unwrap();
        assert_eq!(besov_norm(&z, &spec).unwrap(), 0.0);
    }

    #[test]
    fn log_spacing_hits_endpoints_exactly() {
        let ts = log_spaced::<f64>(1e-3, 10.0, 41);
        assert_eq!(ts[0], 1e-3);
        assert_eq!(ts[40], 10.0);
        for w in ts.windows(2) {
            assert!(w[1] > w[0]);
        }
        let ratio0 = ts[1] / ts[0];
        let ratio_mid = ts[21] / ts[20];
        assert!((ratio0 - ratio_mid).abs() < 1e-10);
    }
}
