//! Time integration in mild form: a semigroup-exact two-stage stepper, the
//! Picard iteration for the memory-integral formulation, a residual check
//! that measures how well a trajectory satisfies that formulation, and a
//! bisection routine locating the small-data threshold.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{VectorField, DIV_FREE_RATIO};
use crate::float::Scalar;
use crate::grid::Grid;
use crate::norms::{besov_norm, log_spaced, lp_norm, NormSample, NormSeries, NormSpec};
use crate::operators::{bilinear, heat_semigroup, leray_project};
use crate::quadrature::{mild_integral, GRADED_PANELS};

/// Growth factor of the energy norm beyond which integration aborts.
pub const BLOW_UP_RATIO: f64 = 1e3;

/// Initial guess for the Picard iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PicardStart {
    /// Heat flow of the datum; the natural first iterate.
    HeatFlow,
    /// Identically zero; its first sweep reproduces the heat flow, so both
    /// starts land on the same fixed point one sweep apart.
    Zero,
}

/// Parameters shared by the stepper and the Picard iteration.
#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    norm: NormSpec<T>,
    mesh: Vec<T>,
    picard_tol: T,
    max_iterations: usize,
    epsilon: Option<T>,
    substep_cap: T,
}

impl<T: Scalar> SolverConfig<T> {
    /// `mesh` must start at zero and increase strictly; norms along the
    /// trajectory are taken in the space described by `norm`.
    pub fn new(norm: NormSpec<T>, mesh: Vec<T>) -> Result<Self> {
        if mesh.len() < 2 {
            return Err(Error::invalid("time mesh needs at least two points"));
        }
        if mesh[0] != T::zero() {
            return Err(Error::invalid(format!(
                "time mesh must start at zero, got {}",
                mesh[0]
            )));
        }
        for w in mesh.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!(
                    "time mesh must increase strictly, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(SolverConfig {
            norm,
            mesh,
            picard_tol: T::of(1e-8),
            max_iterations: 40,
            epsilon: None,
            substep_cap: T::of(0.25),
        })
    }

    pub fn with_picard_tol(mut self, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::invalid(format!("picard_tol must be positive, got {}", tol)));
        }
        self.picard_tol = tol;
        Ok(self)
    }

    pub fn with_max_iterations(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("max_iterations must be at least one"));
        }
        self.max_iterations = n;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", epsilon)));
        }
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    /// Caps stepper substeps at `cap * h^2` where `h` is the grid spacing;
    /// smaller values refine the integration.
    pub fn with_substep_cap(mut self, cap: T) -> Result<Self> {
        if !(cap > T::zero()) {
            return Err(Error::invalid(format!("substep_cap must be positive, got {}", cap)));
        }
        self.substep_cap = cap;
        Ok(self)
    }

    pub fn norm(&self) -> &NormSpec<T> {
        &self.norm
    }

    pub fn mesh(&self) -> &[T] {
        &self.mesh
    }

    pub fn picard_tol(&self) -> T {
        self.picard_tol
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn epsilon(&self) -> Option<T> {
        self.epsilon
    }

    pub fn substep_cap(&self) -> T {
        self.substep_cap
    }
}

/// `[0]` followed by `count` logarithmically spaced points on
/// `[t_first, horizon]`: geometric refinement toward the initial time, where
/// weighted norms vary fastest.
pub fn geometric_mesh<T: Scalar>(t_first: T, horizon: T, count: usize) -> Result<Vec<T>> {
    if !(t_first > T::zero()) || !(horizon > t_first) {
        return Err(Error::invalid(format!(
            "mesh needs 0 < t_first < horizon, got {} and {}",
            t_first, horizon
        )));
    }
    if count < 2 {
        return Err(Error::invalid("mesh needs at least two positive times"));
    }
    let mut mesh = Vec::with_capacity(count + 1);
    mesh.push(T::zero());
    mesh.extend(log_spaced(t_first, horizon, count));
    Ok(mesh)
}

/// A discrete velocity trajectory: states at mesh times, every state
/// divergence-free and the first equal to the initial datum. Carries the
/// weighted space-time norm
/// `max(initial caloric norm, sup over positive times of t^(beta/2) ||u(t)||_p)`.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    times: Vec<T>,
    states: Vec<VectorField<T>>,
    chi_norm: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(times: Vec<T>, states: Vec<VectorField<T>>, norm: &NormSpec<T>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::SizeMismatch {
                got: states.len(),
                need: times.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::invalid("trajectory needs at least one state"));
        }
        if times[0] < T::zero() {
            return Err(Error::invalid(format!("negative initial time {}", times[0])));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!(
                    "trajectory times must increase strictly, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        let grid = states[0].grid();
        for s in &states {
            if !s.grid().matches(grid) {
                return Err(Error::GridMismatch);
            }
            if !s.divergence_free() {
                return Err(Error::NotDivergenceFree(s.divergence_ratio().as_f64()));
            }
        }
        let beta = norm.beta();
        let p = norm.p();
        let half = T::of(0.5);
        let weighted = times
            .par_iter()
            .zip(states.par_iter())
            .filter(|(t, _)| **t > T::zero())
            .map(|(t, s)| Ok(t.powf(beta * half) * lp_norm(s, p)?))
            .collect::<Result<Vec<T>>>()?;
        let sup = weighted.into_iter().fold(T::zero(), T::max);
        let initial = besov_norm(&states[0], norm)?;
        Ok(Trajectory {
            times,
            states,
            chi_norm: initial.max(sup),
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[VectorField<T>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &VectorField<T> {
        &self.states[i]
    }

    pub fn initial_state(&self) -> &VectorField<T> {
        &self.states[0]
    }

    pub fn final_state(&self) -> &VectorField<T> {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Weighted norm over the whole trajectory, initial time included.
    pub fn chi_norm(&self) -> T {
        self.chi_norm
    }

    /// The series `(t, ||u(t)||_p, t^(beta/2) ||u(t)||_p)` over the positive
    /// mesh times.
    pub fn weighted_series(&self, p: T) -> Result<NormSeries<T>> {
        let grid = self.states[0].grid();
        let n = T::of(grid.dim() as f64);
        let beta = T::one() - n / p;
        let half = T::of(0.5);
        let samples = self
            .times
            .par_iter()
            .zip(self.states.par_iter())
            .filter(|(t, _)| **t > T::zero())
            .map(|(t, s)| {
                let value = lp_norm(s, p)?;
                Ok(NormSample {
                    t: *t,
                    value,
                    weighted: t.powf(beta * half) * value,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        NormSeries::new(beta, samples)
    }
}

/// One step of the semigroup-exact two-stage scheme. With `g = B(u, u)`:
/// predictor `v = S(dt)(u - dt g)`, then
/// `u' = S(dt) u - (dt/2) (S(dt) g + B(v, v))`, projected divergence-free.
/// Exact for pure heat flow and second order in `dt` otherwise.
pub fn duhamel_step<T: Scalar>(u: &VectorField<T>, dt: T) -> Result<VectorField<T>> {
    if !(dt > T::zero()) {
        return Err(Error::invalid(format!("step size must be positive, got {}", dt)));
    }
    let g = bilinear(u, u)?;
    let half = T::of(0.5);
    let drifted = heat_semigroup(&u.add_scaled(-dt, &g)?, dt)?;
    let g_end = bilinear(&drifted, &drifted)?;
    let heat_u = heat_semigroup(u, dt)?;
    let heat_g = heat_semigroup(&g, dt)?;
    let correction = heat_g.add(&g_end)?.scaled(dt * half);
    Ok(leray_project(&heat_u.sub(&correction)?))
}

/// Integrates the datum across the config mesh, capping internal substeps at
/// `substep_cap * h^2` and aborting if the energy norm grows by more than
/// `BLOW_UP_RATIO` or stops being finite.
pub fn evolve<T: Scalar>(u0: &VectorField<T>, config: &SolverConfig<T>) -> Result<Trajectory<T>> {
    let ratio = u0.divergence_ratio().as_f64();
    if ratio > DIV_FREE_RATIO {
        return Err(Error::NotDivergenceFree(ratio));
    }
    let h = u0.grid().spacing();
    let dt_cap = config.substep_cap * h * h;
    let e0 = u0.energy_norm();
    let limit = T::of(BLOW_UP_RATIO) * e0;
    let mut states = Vec::with_capacity(config.mesh.len());
    states.push(u0.clone());
    let mut u = u0.clone();
    for w in config.mesh.windows(2) {
        let span = w[1] - w[0];
        let substeps = (span / dt_cap).ceil().as_f64().max(1.0) as usize;
        let dt = span / T::of(substeps as f64);
        for s in 0..substeps {
            u = duhamel_step(&u, dt)?;
            let e = u.energy_norm();
            if !e.as_f64().is_finite() || (e > limit && e0 > T::zero()) {
                let t = w[0] + dt * T::of((s + 1) as f64);
                return Err(Error::BlowUp {
                    t: t.as_f64(),
                    norm: e.as_f64(),
                    limit: limit.as_f64(),
                });
            }
        }
        states.push(u.clone());
    }
    Trajectory::new(config.mesh.clone(), states, &config.norm)
}

/// Certificate that the datum sat below the configured smallness threshold
/// and the constructed solution stayed within twice that threshold.
#[derive(Clone, Debug)]
pub struct SmallnessCertificate<T> {
    pub epsilon: T,
    pub weighted_sup: T,
    pub bound: T,
    pub holds: bool,
}

/// Result of the Picard construction. `converged == false` means the update
/// metric never fell below tolerance within the sweep budget; that is the
/// expected outcome for data beyond the small-data regime and the trajectory
/// then holds the final iterate.
#[derive(Clone, Debug)]
pub struct PicardOutcome<T> {
    pub trajectory: Trajectory<T>,
    pub iterations: usize,
    pub converged: bool,
    pub final_update: T,
    pub initial_besov: T,
    pub certificate: Option<SmallnessCertificate<T>>,
}

/// Picard iteration for the mild formulation, heat-flow start.
pub fn picard_construct<T: Scalar>(
    u0: &VectorField<T>,
    config: &SolverConfig<T>,
) -> Result<PicardOutcome<T>> {
    picard_construct_from(u0, config, PicardStart::HeatFlow)
}

/// Picard iteration with an explicit initial guess. Each sweep maps the
/// current trajectory `u` to `S(t_i) u0 - Q_i[B(u, u)]` at every mesh time
/// and stops when the weighted sup of the update falls below tolerance.
pub fn picard_construct_from<T: Scalar>(
    u0: &VectorField<T>,
    config: &SolverConfig<T>,
    start: PicardStart,
) -> Result<PicardOutcome<T>> {
    let ratio = u0.divergence_ratio().as_f64();
    if ratio > DIV_FREE_RATIO {
        return Err(Error::NotDivergenceFree(ratio));
    }
    if config.norm.dim() != u0.grid().dim() {
        return Err(Error::GridMismatch);
    }
    let mesh = &config.mesh;
    let last = mesh.len() - 1;
    let grid = u0.grid().clone();
    let beta = config.norm.beta();
    let p = config.norm.p();
    let half = T::of(0.5);

    // the linear part is the same every sweep
    let heat_part: Vec<VectorField<T>> = mesh
        .par_iter()
        .map(|&t| {
            if t == T::zero() {
                Ok(u0.clone())
            } else {
                u0.heat_flow(t)
            }
        })
        .collect::<Result<_>>()?;

    let mut current: Vec<VectorField<T>> = match start {
        PicardStart::HeatFlow => heat_part.clone(),
        PicardStart::Zero => {
            let mut v = vec![VectorField::zero(&grid); mesh.len()];
            v[0] = VectorField::zero(&grid);
            v
        }
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut final_update = T::infinity();
    while iterations < config.max_iterations {
        let g: Vec<VectorField<T>> = current
            .par_iter()
            .map(|u| bilinear(u, u))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(mesh.len());
        next.push(u0.clone());
        let tail: Vec<VectorField<T>> = (1..=last)
            .into_par_iter()
            .map(|i| heat_part[i].sub(&mild_integral(mesh, &g, i, GRADED_PANELS)?))
            .collect::<Result<_>>()?;
        next.extend(tail);

        let update = (1..=last)
            .into_par_iter()
            .map(|i| {
                let diff = next[i].sub(&current[i])?;
                Ok(mesh[i].powf(beta * half) * lp_norm(&diff, p)?)
            })
            .collect::<Result<Vec<T>>>()?
            .into_iter()
            .fold(T::zero(), T::max);

        current = next;
        iterations += 1;
        final_update = update;
        if update < config.picard_tol {
            converged = true;
            break;
        }
        if !update.as_f64().is_finite() {
            break; // sweeps can only propagate the overflow further
        }
    }

    let trajectory = Trajectory::new(mesh.clone(), current, &config.norm)?;
    let initial_besov = besov_norm(u0, &config.norm)?;
    let weighted_sup = trajectory
        .weighted_series(p)
        .map(|s| s.max_weighted())
        .unwrap_or(T::zero());
    let certificate = config.epsilon.and_then(|eps| {
        if initial_besov < eps {
            let bound = T::of(2.0) * eps;
            Some(SmallnessCertificate {
                epsilon: eps,
                weighted_sup,
                bound,
                holds: weighted_sup <= bound,
            })
        } else {
            None
        }
    });
    Ok(PicardOutcome {
        trajectory,
        iterations,
        converged,
        final_update,
        initial_besov,
        certificate,
    })
}

/// Weighted defect of a trajectory against the mild formulation:
/// `t_i^(beta/2) || u(t_i) - S(t_i) u0 + Q_i[B(u, u)] ||_p` per mesh time.
#[derive(Clone, Debug)]
pub struct ResidualReport<T> {
    pub per_time: Vec<(T, T)>,
    pub max: T,
}

pub fn residual_check<T: Scalar>(
    trajectory: &Trajectory<T>,
    config: &SolverConfig<T>,
) -> Result<ResidualReport<T>> {
    let times = trajectory.times();
    if times.len() != config.mesh.len() || times.iter().zip(config.mesh.iter()).any(|(a, b)| a != b)
    {
        return Err(Error::invalid(
            "trajectory times do not match the config mesh",
        ));
    }
    let states = trajectory.states();
    let u0 = trajectory.initial_state();
    let beta = config.norm.beta();
    let p = config.norm.p();
    let half = T::of(0.5);
    let g: Vec<VectorField<T>> = states
        .par_iter()
        .map(|u| bilinear(u, u))
        .collect::<Result<_>>()?;
    let per_time: Vec<(T, T)> = (1..times.len())
        .into_par_iter()
        .map(|i| {
            let mild = u0
                .heat_flow(times[i])?
                .sub(&mild_integral(times, &g, i, GRADED_PANELS)?)?;
            let defect = states[i].sub(&mild)?;
            Ok((times[i], times[i].powf(beta * half) * lp_norm(&defect, p)?))
        })
        .collect::<Result<_>>()?;
    let max = per_time.iter().map(|&(_, r)| r).fold(T::zero(), T::max);
    Ok(ResidualReport { per_time, max })
}

/// Trace of the threshold search: probed amplitudes and whether Picard
/// converged there.
#[derive(Clone, Debug)]
pub struct CalibrationReport<T> {
    /// Largest amplitude with a convergent iteration.
    pub amplitude: T,
    /// Caloric norm of the datum at that amplitude: the empirical smallness
    /// threshold for this data family.
    pub epsilon: T,
    pub probes: Vec<(T, bool)>,
}

/// Bisects (in log amplitude) the largest amplitude at which the Picard
/// iteration converges for the given data family, stopping once the bracket
/// is tighter than ten percent. The lower amplitude must converge and the
/// upper must not, otherwise the bracket is invalid.
pub fn calibrate_epsilon<T: Scalar>(
    grid: &Grid<T>,
    kind: &crate::data::DataKind<T>,
    seed: u64,
    config: &SolverConfig<T>,
    amp_lo: T,
    amp_hi: T,
) -> Result<CalibrationReport<T>> {
    if !(amp_lo > T::zero()) || !(amp_hi > amp_lo) {
        return Err(Error::invalid(format!(
            "calibration needs 0 < amp_lo < amp_hi, got {} and {}",
            amp_lo, amp_hi
        )));
    }
    let mut probes = Vec::new();
    let probe = |amp: T, probes: &mut Vec<(T, bool)>| -> Result<bool> {
        let u0 = crate::data::make_divfree_data(grid, kind, amp, seed)?;
        let outcome = picard_construct(&u0, config)?;
        probes.push((amp, outcome.converged));
        Ok(outcome.converged)
    };
    if !probe(amp_lo, &mut probes)? {
        return Err(Error::invalid(format!(
            "Picard already fails at the lower amplitude {}",
            amp_lo
        )));
    }
    if probe(amp_hi, &mut probes)? {
        return Err(Error::invalid(format!(
            "Picard still converges at the upper amplitude {}; widen the bracket",
            amp_hi
        )));
    }
    let (mut lo, mut hi) = (amp_lo, amp_hi);
    let gap = T::of(1.1);
    while hi / lo > gap {
        let mid = (lo * hi).sqrt();
        if probe(mid, &mut probes)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u0 = crate::data::make_divfree_data(grid, kind, lo, seed)?;
    let epsilon = besov_norm(&u0, config.norm())?;
    Ok(CalibrationReport {
        amplitude: lo,
        epsilon,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_divfree_data, DataKind};
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn tg(n: usize, amp: f64) -> (Grid<f64>, VectorField<f64>) {
        let g = Grid::new(2, n, 2.0 * PI).unwrap();
        let u = make_divfree_data(&g, &DataKind::TaylorGreen, amp, 0).unwrap();
        (g, u)
    }

    fn blob(n: usize, amp: f64) -> (Grid<f64>, VectorField<f64>) {
        let g = Grid::new(2, n, 2.0 * PI).unwrap();
        let u = make_divfree_data(&g, &DataKind::vortex_blob_default(&g), amp, 0).unwrap();
        (g, u)
    }

    fn small_config(g: &Grid<f64>, horizon: f64, count: usize) -> SolverConfig<f64> {
        let norm = NormSpec::new(g.dim(), 4.0, 1e-4, horizon.max(1e-3), 16).unwrap();
        SolverConfig::new(norm, geometric_mesh(horizon / 100.0, horizon, count).unwrap()).unwrap()
    }

    #[test]
    fn step_is_exact_on_taylor_green() {
        // 2D Taylor-Green advection is a pure gradient, so the projected
        // nonlinearity vanishes and the solution is exact heat decay
        let (_, u) = tg(32, 1.0);
        let dt = 0.01;
        let stepped = duhamel_step(&u, dt).unwrap();
        let exact = u.heat_flow(dt).unwrap();
        let err = stepped.sub(&exact).unwrap().max_mode_magnitude();
        assert!(err < 1e-14, "error {}", err);
    }

    #[test]
    fn step_reduces_to_heat_flow_for_tiny_data() {
        let (_, u) = blob(32, 1e-8);
        let stepped = duhamel_step(&u, 0.01).unwrap();
        let heat = u.heat_flow(0.01).unwrap();
        let dev = stepped.sub(&heat).unwrap().max_mode_magnitude();
        // nonlinear correction is quadratic in the amplitude
        assert!(dev < 1e-8 * 1e-6, "deviation {}", dev);
        assert!(duhamel_step(&u, 0.0).is_err());
    }

    #[test]
    fn stepper_is_second_order() {
        let (g, u) = blob(32, 0.5);
        let norm = NormSpec::new(2, 4.0, 1e-3, 0.3, 16).unwrap();
        let run = |cap: f64| {
            let config = SolverConfig::new(norm.clone(), vec![0.0, 0.3])
                .unwrap()
                .with_substep_cap(cap)
                .unwrap();
            evolve(&u, &config).unwrap().final_state().clone()
        };
        let reference = run(0.25 / 16.0);
        let errs: Vec<f64> = [0.25, 0.125, 0.0625]
            .iter()
            .map(|&cap| {
                run(cap)
                    .sub(&reference)
                    .unwrap()
                    .max_mode_magnitude()
            })
            .collect();
        let _ = g;
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 2.7 && ratio < 6.0, "order ratio {} from {:?}", ratio, errs);
        }
    }

    #[test]
    fn evolve_tracks_taylor_green_decay() {
        let (g, u) = tg(32, 1.0);
        let config = small_config(&g, 1.0, 8);
        let traj = evolve(&u, &config).unwrap();
        let kappa = 2.0 * PI / g.length();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let expected = (-2.0 * kappa * kappa * t).exp();
            let peak = s.max_speed();
            assert!(
                (peak - expected).abs() < 1e-9 * expected.max(1e-3),
                "t = {}: peak {} vs {}",
                t,
                peak,
                expected
            );
        }
        assert_eq!(traj.initial_state().sub(&u).unwrap().max_mode_magnitude(), 0.0);
    }

    #[test]
    fn evolve_preserves_energy_monotonicity() {
        let (g, u) = blob(32, 0.5);
        let config = small_config(&g, 0.5, 10);
        let traj = evolve(&u, &config).unwrap();
        let energies: Vec<f64> = traj.states().iter().map(|s| s.energy_norm()).collect();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "energy grew: {:?}", w);
        }
    }

    #[test]
    fn evolve_rejects_divergent_datum_and_detects_blow_up() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let psi = crate::data::gaussian_bump(&g, [PI, PI, PI], 1.0);
        let grad = crate::operators::gradient(&psi);
        let config = small_config(&g, 0.2, 4);
        match evolve(&grad, &config) {
            Err(Error::NotDivergenceFree(_)) => {}
            other => panic!("expected divergence rejection, got {:?}", other.map(|_| ())),
        }
        let (_, huge) = blob(16, 1e8);
        match evolve(&huge, &config) {
            Err(Error::BlowUp { .. }) => {}
            other => panic!("expected blow-up, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn zero_datum_is_a_fixed_point() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let zero = VectorField::<f64>::zero(&g);
        let config = small_config(&g, 0.1, 4);
        let traj = evolve(&zero, &config).unwrap();
        assert!(traj.states().iter().all(|s| s.is_zero()));
        assert_eq!(traj.chi_norm(), 0.0);
        let outcome = picard_construct(&zero, &config).unwrap();
        assert!(outcome.converged);
        assert_eq!(outcome.iterations, 1);
        assert!(outcome.trajectory.states().iter().all(|s| s.is_zero()));
    }

    #[test]
    fn picard_converges_on_taylor_green_and_matches_evolve() {
        let (g, u) = tg(32, 1e-2);
        let config = small_config(&g, 0.5, 12);
        let outcome = picard_construct(&u, &config).unwrap();
        assert!(outcome.converged);
        assert!(outcome.iterations <= 20);
        let evolved = evolve(&u, &config).unwrap();
        for (a, b) in outcome.trajectory.states().iter().zip(evolved.states()) {
            let dev = a.sub(b).unwrap().max_mode_magnitude();
            assert!(dev < 1e-10, "deviation {}", dev);
        }
    }

    #[test]
    fn picard_starts_agree_after_convergence() {
        let (g, u) = blob(32, 1e-2);
        let config = small_config(&g, 0.5, 12);
        let from_heat = picard_construct_from(&u, &config, PicardStart::HeatFlow).unwrap();
        let from_zero = picard_construct_from(&u, &config, PicardStart::Zero).unwrap();
        assert!(from_heat.converged && from_zero.converged);
        assert_eq!(from_zero.iterations, from_heat.iterations + 1);
        for (a, b) in from_heat
            .trajectory
            .states()
            .iter()
            .zip(from_zero.trajectory.states())
        {
            let dev = a.sub(b).unwrap().max_mode_magnitude();
            assert!(dev < 2e-8, "start deviation {}", dev);
        }
    }

    #[test]
    fn picard_cross_validates_the_stepper_on_a_blob() {
        // independent constructions of the same solution: Picard solves the
        // memory-integral form on a dense mesh, evolve marches the stepper
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let u = make_divfree_data(&g, &DataKind::vortex_blob_default(&g), 5e-2, 0).unwrap();
        let norm = NormSpec::new(2, 4.0, 1e-4, 0.5, 16).unwrap();
        let mesh = geometric_mesh(5e-4, 0.5, 32).unwrap();
        let config = SolverConfig::new(norm, mesh).unwrap();
        let picard = picard_construct(&u, &config).unwrap();
        assert!(picard.converged);
        let evolved = evolve(&u, &config).unwrap();
        let u_ref = evolved.final_state();
        let dev = picard
            .trajectory
            .final_state()
            .sub(u_ref)
            .unwrap()
            .max_mode_magnitude()
            / u_ref.max_mode_magnitude();
        assert!(dev < 1e-4, "cross-validation deviation {}", dev);
    }

    #[test]
    fn picard_reports_non_convergence_without_erroring() {
        let (g, u) = blob(16, 50.0);
        let config = small_config(&g, 0.3, 8).with_max_iterations(6).unwrap();
        let outcome = picard_construct(&u, &config).unwrap();
        assert!(!outcome.converged);
        assert!(outcome.final_update >= config.picard_tol() || !outcome.final_update.is_finite());
    }

    #[test]
    fn residual_is_small_for_picard_and_flags_corruption() {
        let (g, u) = blob(32, 1e-2);
        let config = small_config(&g, 0.5, 12);
        let outcome = picard_construct(&u, &config).unwrap();
        let clean = residual_check(&outcome.trajectory, &config).unwrap();
        assert!(clean.max <= 10.0 * config.picard_tol(), "clean residual {}", clean.max);

        let mut states = outcome.trajectory.states().to_vec();
        let mid = states.len() / 2;
        states[mid] = states[mid].scaled(1.1);
        let corrupted =
            Trajectory::new(outcome.trajectory.times().to_vec(), states, config.norm()).unwrap();
        let dirty = residual_check(&corrupted, &config).unwrap();
        assert!(
            dirty.max >= 10.0 * clean.max.max(config.picard_tol()),
            "corruption not flagged: {} vs {}",
            dirty.max,
            clean.max
        );
    }

    #[test]
    fn smallness_certificate_tracks_the_threshold() {
        let (g, u) = blob(16, 1e-3);
        let config = small_config(&g, 0.3, 8).with_epsilon(1.0).unwrap();
        let outcome = picard_construct(&u, &config).unwrap();
        let cert = outcome.certificate.expect("datum sits below epsilon");
        assert!(cert.holds);
        assert!(cert.weighted_sup <= 2.0 * cert.epsilon);
        assert!(outcome.initial_besov < 1.0);
        // datum above epsilon yields no certificate
        let config2 = small_config(&g, 0.3, 8).with_epsilon(1e-12).unwrap();
        let outcome2 = picard_construct(&u, &config2).unwrap();
        assert!(outcome2.certificate.is_none());
    }

    #[test]
    fn calibration_brackets_the_convergence_threshold() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let kind = DataKind::vortex_blob_default(&g);
        let config = small_config(&g, 0.3, 8).with_max_iterations(25).unwrap();
        let report = calibrate_epsilon(&g, &kind, 0, &config, 1e-3, 1e3).unwrap();
        assert!(report.amplitude > 1e-3 && report.amplitude < 1e3);
        assert!(report.epsilon > 0.0);
        let converged: Vec<_> = report.probes.iter().filter(|p| p.1).collect();
        let diverged: Vec<_> = report.probes.iter().filter(|p| !p.1).collect();
        assert!(!converged.is_empty() && !diverged.is_empty());
        // every convergent probe sits below every divergent probe
        let max_c = converged.iter().map(|p| p.0).fold(0.0, f64::max);
        let min_d = diverged.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        assert!(max_c < min_d);
        assert!(min_d / max_c <= 1.1 + 1e-9);
    }

    #[test]
    fn config_validation() {
        let norm = NormSpec::<f64>::new(2, 4.0, 1e-3, 1.0, 16).unwrap();
        assert!(SolverConfig::new(norm.clone(), vec![0.0]).is_err());
        assert!(SolverConfig::new(norm.clone(), vec![0.1, 0.2]).is_err());
        assert!(SolverConfig::new(norm.clone(), vec![0.0, 0.2, 0.2]).is_err());
        let ok = SolverConfig::new(norm, vec![0.0, 0.1, 0.2]).unwrap();
        assert!(ok.clone().with_picard_tol(0.0).is_err());
        assert!(ok.clone().with_substep_cap(-1.0).is_err());
        assert!(ok.clone().with_max_iterations(0).is_err());
        assert!(ok.with_epsilon(0.0).is_err());
        assert!(geometric_mesh::<f64>(0.0, 1.0, 4).is_err());
        assert!(geometric_mesh::<f64>(0.1, 0.05, 4).is_err());
    }
}
