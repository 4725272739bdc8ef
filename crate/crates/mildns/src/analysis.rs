//! Quantitative experiments on top of the solver: bilinear smoothing
//! constant probes, difference-decay experiments with empirical bound
//! checks, zero-stability rate fits, and the purely linear hypothesis check
//! for difference data.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::float::Scalar;
use crate::gronwall::{kernel_shape_integral, QuadratureRule};
use crate::norms::{besov_norm, log_spaced, lp_norm, NormSample, NormSeries, NormSpec};
use crate::operators::bilinear;
use crate::solver::{evolve, SolverConfig, Trajectory};

/// Sampled ratio estimates of the bilinear smoothing constants.
///
/// For fields `u`, `v` and `b = B(u, v)`, the two ratio families are
/// `r1(t) = ||S(t) b||_p t^((1+n/p)/2) / (||u||_p ||v||_p)` and
/// `r2(t) = ||S(t) b||_caloric t^((1+n/p-beta)/2) / (||u||_p ||v||_p)`;
/// their sups estimate the constants whose existence the smoothing
/// estimates assert. No reference value exists, so stability of the
/// estimates under grid refinement is the meaningful diagnostic.
#[derive(Clone, Debug)]
pub struct ProbeReport<T> {
    pub dim: usize,
    pub p: T,
    pub beta: T,
    pub times: Vec<T>,
    pub smoothing_ratios: Vec<T>,
    pub caloric_ratios: Vec<T>,
    pub c1_hat: T,
    pub c2_hat: T,
    /// Signed relative change of `(c1_hat, c2_hat)` under one grid
    /// doubling; present only for the refined probe.
    pub refinement_delta: Option<(T, T)>,
}

fn probe_ratios<T: Scalar>(
    u: &VectorField<T>,
    v: &VectorField<T>,
    spec: &NormSpec<T>,
    t_set: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    let b = bilinear(u, v)?;
    let denom = lp_norm(u, spec.p())? * lp_norm(v, spec.p())?;
    if !(denom > T::zero()) {
        return Err(Error::invalid(
            "bilinear probe needs nonzero fields in both slots",
        ));
    }
    let n_over_p = T::of(u.dim() as f64) / spec.p();
    let smoothing_exp = (T::one() + n_over_p) * T::of(0.5);
    let caloric_exp = (T::one() + n_over_p - spec.beta()) * T::of(0.5);
    let pairs: Vec<(T, T)> = t_set
        .par_iter()
        .map(|&t| {
            let flowed = b.heat_flow(t)?;
            let r1 = lp_norm(&flowed, spec.p())? * t.powf(smoothing_exp) / denom;
            let r2 = besov_norm(&flowed, spec)? * t.powf(caloric_exp) / denom;
            Ok((r1, r2))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

fn validate_probe_times<T: Scalar>(t_set: &[T], horizon: T) -> Result<()> {
    if t_set.is_empty() {
        return Err(Error::invalid("probe needs at least one time"));
    }
    for &t in t_set {
        if !(t > T::zero()) {
            return Err(Error::invalid(format!("probe times must be positive, got {}", t)));
        }
        if t > horizon {
            return Err(Error::invalid(format!(
                "probe time {} exceeds the box-validity horizon {}",
                t, horizon
            )));
        }
    }
    Ok(())
}

/// Estimates the smoothing constants on one grid.
pub fn lemma1_probe<T: Scalar>(
    u: &VectorField<T>,
    v: &VectorField<T>,
    spec: &NormSpec<T>,
    t_set: &[T],
) -> Result<ProbeReport<T>> {
    if !u.grid().matches(v.grid()) {
        return Err(Error::GridMismatch);
    }
    if spec.dim() != u.dim() {
        return Err(Error::GridMismatch);
    }
    validate_probe_times(t_set, u.grid().horizon())?;
    let (smoothing_ratios, caloric_ratios) = probe_ratios(u, v, spec, t_set)?;
    let c1_hat = smoothing_ratios.iter().fold(T::zero(), |m, &r| m.max(r));
    let c2_hat = caloric_ratios.iter().fold(T::zero(), |m, &r| m.max(r));
    Ok(ProbeReport {
        dim: u.dim(),
        p: spec.p(),
        beta: spec.beta(),
        times: t_set.to_vec(),
        smoothing_ratios,
        caloric_ratios,
        c1_hat,
        c2_hat,
        refinement_delta: None,
    })
}

/// Runs the probe on the native grid and once more after embedding both
/// fields into a grid with doubled resolution, reporting the signed relative
/// drift of the constants. Band-limited fields embed exactly, so the drift
/// isolates discretization effects in the norms.
pub fn lemma1_probe_refined<T: Scalar>(
    u: &VectorField<T>,
    v: &VectorField<T>,
    spec: &NormSpec<T>,
    t_set: &[T],
) -> Result<ProbeReport<T>> {
    let mut report = lemma1_probe(u, v, spec, t_set)?;
    let fine = lemma1_probe(&u.refined(2)?, &v.refined(2)?, spec, t_set)?;
    let delta = |coarse: T, refined: T| {
        if coarse == T::zero() {
            T::zero()
        } else {
            (refined - coarse) / coarse
        }
    };
    report.refinement_delta = Some((
        delta(report.c1_hat, fine.c1_hat),
        delta(report.c2_hat, fine.c2_hat),
    ));
    Ok(report)
}

/// Log-log least-squares fit of a norm series over a window.
#[derive(Clone, Copy, Debug)]
pub struct DecayFit<T> {
    pub window: (T, T),
    pub slope: T,
    pub stderr: T,
    /// Whether the weighted series is non-growing across the window:
    /// equivalently `slope + beta/2 <= 0.05`.
    pub bounded: bool,
}

impl<T: Scalar> DecayFit<T> {
    fn degenerate(window: (T, T)) -> Self {
        DecayFit {
            window,
            slope: T::zero(),
            stderr: T::zero(),
            bounded: true,
        }
    }
}

/// Ordinary least squares of `log value` against `log t` over the samples
/// inside `window`. Needs at least eight samples, all positive.
pub fn fit_loglog<T: Scalar>(series: &NormSeries<T>, window: (T, T)) -> Result<DecayFit<T>> {
    if !(window.0 < window.1) {
        return Err(Error::invalid(format!(
            "fit window must be ordered, got [{}, {}]",
            window.0, window.1
        )));
    }
    let samples = series.window(window.0, window.1);
    if samples.len() < 8 {
        return Err(Error::invalid(format!(
            "fit needs at least 8 samples in the window, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|s| !(s.value > T::zero())) {
        return Err(Error::invalid(
            "fit needs strictly positive values in the window",
        ));
    }
    let m = T::of(samples.len() as f64);
    let xs: Vec<T> = samples.iter().map(|s| s.t.ln()).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.value.ln()).collect();
    let xbar = xs.iter().fold(T::zero(), |a, &x| a + x) / m;
    let ybar = ys.iter().fold(T::zero(), |a, &y| a + y) / m;
    let sxx = xs.iter().map(|&x| (x - xbar) * (x - xbar)).fold(T::zero(), |a, v| a + v);
    let sxy = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (x - xbar) * (y - ybar))
        .fold(T::zero(), |a, v| a + v);
    if !(sxx > T::zero()) {
        return Err(Error::invalid("fit window collapses to a single abscissa"));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .fold(T::zero(), |a, v| a + v);
    let dof = m - T::of(2.0);
    let stderr = (ss_res / dof / sxx).sqrt();
    if !slope.as_f64().is_finite() {
        return Err(Error::invalid("fit produced a non-finite slope"));
    }
    let weighted_slope = slope + series.beta() * T::of(0.5);
    Ok(DecayFit {
        window,
        slope,
        stderr,
        bounded: weighted_slope <= T::of(0.05),
    })
}

/// Default fit window for a difference datum: `[10 t_ramp, horizon]`, where
/// `t_ramp` is the first mesh time at which the weighted linear series of
/// the datum reaches 90% of its plateau. Excludes the ramp-up transient at
/// the low end and the finite-box regime at the high end.
pub fn auto_window<T: Scalar>(w0: &VectorField<T>, mesh: &[T], p: T) -> Result<(T, T)> {
    let horizon = w0.grid().horizon();
    let positive: Vec<T> = mesh
        .iter()
        .copied()
        .filter(|&t| t > T::zero() && t <= horizon)
        .collect();
    if positive.len() < 2 {
        return Err(Error::invalid(
            "mesh has too few positive times inside the horizon",
        ));
    }
    if w0.is_zero() {
        return Ok((positive[0], horizon));
    }
    let n = T::of(w0.dim() as f64);
    let beta = T::one() - n / p;
    let half = T::of(0.5);
    let weighted: Vec<(T, T)> = positive
        .par_iter()
        .map(|&t| Ok((t, t.powf(beta * half) * lp_norm(&w0.heat_flow(t)?, p)?)))
        .collect::<Result<_>>()?;
    let plateau = weighted.iter().map(|&(_, v)| v).fold(T::zero(), T::max);
    let t_ramp = weighted
        .iter()
        .find(|&&(_, v)| v >= T::of(0.9) * plateau)
        .map(|&(t, _)| t)
        .expect("plateau is attained at some sample");
    let lo = T::of(10.0) * t_ramp;
    if !(lo < horizon) {
        return Err(Error::invalid(format!(
            "transient fills the validity horizon: 10 t_ramp = {} >= {}",
            lo, horizon
        )));
    }
    Ok((lo, horizon))
}

/// Difference-decay experiment result: the weighted difference series, its
/// rate fit, and the empirical stability bound check
/// `max weighted <= caloric(w0) + 4 c_hat m_hat^2` over the window.
#[derive(Clone, Debug)]
pub struct DecayReport<T> {
    pub dim: usize,
    pub p: T,
    pub beta: T,
    pub window: (T, T),
    pub series: NormSeries<T>,
    pub fit: DecayFit<T>,
    pub besov_w0: T,
    /// Smoothing-constant estimate entering the bound.
    pub c_hat: T,
    pub c2_hat: T,
    /// Largest trajectory norm among the two evolutions.
    pub m_hat: T,
    pub bound_lhs: T,
    pub bound_rhs: T,
    pub bound_holds: bool,
    /// `m_hat` times the estimated memory-kernel integral
    /// `c_hat integral of (1-tau)^(-(1+n/p)/2) tau^(-beta)`: the empirical
    /// stand-in for the unquantified smallness proviso. Values at or above
    /// one put the data outside the contractive regime.
    pub contraction_product: T,
    pub contraction_product_large: bool,
    pub probe: Option<ProbeReport<T>>,
}

fn weighted_difference_series<T: Scalar>(
    tu: &Trajectory<T>,
    tv: &Trajectory<T>,
    p: T,
) -> Result<NormSeries<T>> {
    let n = T::of(tu.initial_state().dim() as f64);
    let beta = T::one() - n / p;
    let half = T::of(0.5);
    let samples: Vec<NormSample<T>> = tu
        .times()
        .par_iter()
        .zip(tu.states().par_iter().zip(tv.states().par_iter()))
        .filter(|(t, _)| **t > T::zero())
        .map(|(&t, (a, b))| {
            let value = lp_norm(&a.sub(b)?, p)?;
            Ok(NormSample {
                t,
                value,
                weighted: t.powf(beta * half) * value,
            })
        })
        .collect::<Result<_>>()?;
    NormSeries::new(beta, samples)
}

/// Evolves both data, forms the difference `w(t) = u(t) - v(t)`, and checks
/// its weighted decay against the empirically estimated bound. `window`
/// overrides the automatic fit window.
pub fn decay_experiment<T: Scalar>(
    u0: &VectorField<T>,
    v0: &VectorField<T>,
    config: &SolverConfig<T>,
    window: Option<(T, T)>,
) -> Result<DecayReport<T>> {
    if !u0.grid().matches(v0.grid()) {
        return Err(Error::GridMismatch);
    }
    let p = config.norm().p();
    let beta = config.norm().beta();
    let horizon = u0.grid().horizon();

    let traj_u = evolve(u0, config)?;
    let traj_v = evolve(v0, config)?;
    let w0 = u0.sub(v0)?;
    let series = weighted_difference_series(&traj_u, &traj_v, p)?;
    let window = match window {
        Some(w) => {
            if !(w.0 < w.1) {
                return Err(Error::invalid(format!(
                    "window must be ordered, got [{}, {}]",
                    w.0, w.1
                )));
            }
            w
        }
        None => auto_window(&w0, config.mesh(), p)?,
    };

    let probe = if u0.is_zero() && v0.is_zero() {
        None
    } else {
        // probe the constants on the data themselves; with a zero second
        // datum the pair degenerates, so probe the nonzero field twice
        let t_set = log_spaced(horizon * T::of(1e-4), horizon, 16);
        let (pa, pb) = if v0.is_zero() {
            (u0, u0)
        } else if u0.is_zero() {
            (v0, v0)
        } else {
            (u0, v0)
        };
        Some(lemma1_probe(pa, pb, config.norm(), &t_set)?)
    };
    let c_hat = probe.as_ref().map(|r| r.c1_hat).unwrap_or(T::zero());
    let c2_hat = probe.as_ref().map(|r| r.c2_hat).unwrap_or(T::zero());
    let m_hat = traj_u.chi_norm().max(traj_v.chi_norm());

    let besov_w0 = besov_norm(&w0, config.norm())?;
    let in_window = series.window(window.0, window.1);
    let bound_lhs = in_window
        .iter()
        .map(|s| s.weighted)
        .fold(T::zero(), T::max);
    let bound_rhs = besov_w0 + T::of(4.0) * c_hat * m_hat * m_hat;
    let bound_holds = bound_lhs <= bound_rhs;

    let degenerate = series.samples().iter().all(|s| s.value == T::zero());
    let fit = if degenerate {
        DecayFit::degenerate(window)
    } else {
        fit_loglog(&series, window)?
    };

    let n = T::of(u0.dim() as f64);
    let shape = kernel_shape_integral(
        (T::one() + n / p) * T::of(0.5),
        beta,
        &QuadratureRule::default(),
    )?;
    let contraction_product = m_hat * c_hat * shape;

    Ok(DecayReport {
        dim: u0.dim(),
        p,
        beta,
        window,
        series,
        fit,
        besov_w0,
        c_hat,
        c2_hat,
        m_hat,
        bound_lhs,
        bound_rhs,
        bound_holds,
        contraction_product,
        contraction_product_large: contraction_product >= T::one(),
        probe,
    })
}

/// Decay of a single solution toward zero: the difference experiment
/// against the zero datum, same code path, so the series agree bit for bit.
pub fn zero_stability<T: Scalar>(
    u0: &VectorField<T>,
    config: &SolverConfig<T>,
    window: Option<(T, T)>,
) -> Result<DecayReport<T>> {
    let zero = VectorField::zero(u0.grid());
    decay_experiment(u0, &zero, config, window)
}

/// Purely linear check of the difference hypothesis: the series
/// `t^(beta/2) ||S(t)(u0 - v0)||_p` with an empirical verdict on whether it
/// tends to zero across the sampled range.
#[derive(Clone, Debug)]
pub struct HypothesisReport<T> {
    pub series: NormSeries<T>,
    /// Last weighted value relative to the series maximum.
    pub last_over_max: T,
    /// True when the final quarter of the series is non-increasing (2%
    /// slack) and the last value sits at or below half the maximum.
    pub tends_to_zero: bool,
}

pub fn corollary2_hypothesis<T: Scalar>(
    u0: &VectorField<T>,
    v0: &VectorField<T>,
    spec: &NormSpec<T>,
    t_set: &[T],
) -> Result<HypothesisReport<T>> {
    if !u0.grid().matches(v0.grid()) {
        return Err(Error::GridMismatch);
    }
    if spec.dim() != u0.dim() {
        return Err(Error::GridMismatch);
    }
    validate_probe_times(t_set, u0.grid().horizon())?;
    let w0 = u0.sub(v0)?;
    let beta = spec.beta();
    let half = T::of(0.5);
    let p = spec.p();
    let samples: Vec<NormSample<T>> = t_set
        .par_iter()
        .map(|&t| {
            let value = lp_norm(&w0.heat_flow(t)?, p)?;
            Ok(NormSample {
                t,
                value,
                weighted: t.powf(beta * half) * value,
            })
        })
        .collect::<Result<_>>()?;
    let series = NormSeries::new(beta, samples)?;
    let weighted: Vec<T> = series.samples().iter().map(|s| s.weighted).collect();
    let max = weighted.iter().fold(T::zero(), |m, &v| m.max(v));
    let last = *weighted.last().expect("series nonempty");
    let tail_start = weighted.len() - (weighted.len() / 4).max(2).min(weighted.len() - 1);
    let slack = T::of(1.02);
    let tail_monotone = weighted[tail_start..]
        .windows(2)
        .all(|w| w[1] <= w[0] * slack);
    let (last_over_max, tends) = if max == T::zero() {
        (T::zero(), true) // an identically zero difference has converged
    } else {
        let rel = last / max;
        (rel, tail_monotone && rel <= half)
    };
    Ok(HypothesisReport {
        series,
        last_over_max,
        tends_to_zero: tends,
    })
}
