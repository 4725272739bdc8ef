//! Iteration of the scalar integral inequality
//! `f(t) <= g(t) + integral over (0,1) of w(tau) f(tau t) dtau`.
//!
//! When the kernel mass `integral of w` is below one, the map
//! `T f = g + integral w f(tau .)` contracts in the sup norm with factor
//! equal to that mass, so its iterates converge geometrically to the unique
//! fixed point; the fixed point's tail value measures whether a decaying
//! forcing `g` forces decay of `f` itself.

use crate::error::{Error, Result};
use crate::float::Scalar;

/// Kernel of the memory integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel<T> {
    /// `w == level` on (0, 1).
    Constant { level: T },
    /// `w(tau) = c (1 - tau)^(-end_exponent) tau^(-origin_exponent)` with
    /// `c` fixed by requiring the numerically integrated mass to equal
    /// `mass`. Both exponents must sit below one for integrability.
    PowerLaw {
        end_exponent: T,
        origin_exponent: T,
        mass: T,
    },
}

impl<T: Scalar> Kernel<T> {
    pub fn constant(level: T) -> Result<Self> {
        if !(level > T::zero()) || !level.as_f64().is_finite() {
            return Err(Error::invalid(format!(
                "constant kernel level must be positive and finite, got {}",
                level
            )));
        }
        Ok(Kernel::Constant { level })
    }

    /// The kernel shape arising from the smoothing weight of the bilinear
    /// term in the critical setting: endpoint exponent `(1 + n/p) / 2`,
    /// origin exponent `1 - n/p`.
    pub fn critical(dim: usize, p: T, mass: T) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::BadDimension(dim));
        }
        let n = T::of(dim as f64);
        if !(p > n) {
            return Err(Error::invalid(format!(
                "critical kernel needs p > n, got p = {}",
                p
            )));
        }
        Kernel::power_law(
            (T::one() + n / p) / T::of(2.0),
            T::one() - n / p,
            mass,
        )
    }

    pub fn power_law(end_exponent: T, origin_exponent: T, mass: T) -> Result<Self> {
        for (name, e) in [("end", end_exponent), ("origin", origin_exponent)] {
            if !(e < T::one()) {
                return Err(Error::invalid(format!(
                    "{} exponent must be below one for an integrable kernel, got {}",
                    name, e
                )));
            }
            if e < T::zero() {
                return Err(Error::invalid(format!(
                    "{} exponent must be nonnegative, got {}",
                    name, e
                )));
            }
        }
        if !(mass > T::zero()) {
            return Err(Error::invalid(format!(
                "kernel mass must be positive, got {}",
                mass
            )));
        }
        Ok(Kernel::PowerLaw {
            end_exponent,
            origin_exponent,
            mass,
        })
    }

    /// Total integral of the kernel over (0, 1) under the given rule. For a
    /// power-law kernel this equals the requested mass by construction.
    pub fn mass(&self, rule: &QuadratureRule) -> Result<T> {
        Ok(self.nodes(rule)?.iter().map(|&(_, w)| w).sum())
    }

    /// Product-quadrature nodes `(tau_j, W_j)` with
    /// `sum_j W_j phi(tau_j) ~ integral of w(tau) phi(tau)` for smooth `phi`.
    fn nodes(&self, rule: &QuadratureRule) -> Result<Vec<(T, T)>> {
        rule.validate()?;
        match self {
            Kernel::Constant { level } => {
                let mut nodes = shape_nodes(T::zero(), T::zero(), rule);
                for n in nodes.iter_mut() {
                    n.1 = n.1 * *level;
                }
                Ok(nodes)
            }
            Kernel::PowerLaw {
                end_exponent,
                origin_exponent,
                mass,
            } => {
                let mut nodes = shape_nodes(*end_exponent, *origin_exponent, rule);
                let raw: T = nodes.iter().map(|&(_, w)| w).sum();
                // normalize with the same rule that integrates, so the
                // realized mass is exact and the contraction factor honest
                let c = *mass / raw;
                for n in nodes.iter_mut() {
                    n.1 = n.1 * c;
                }
                Ok(nodes)
            }
        }
    }

    /// The normalization constant `c` of a power-law kernel under the rule;
    /// the constant kernel returns its level.
    pub fn normalization(&self, rule: &QuadratureRule) -> Result<T> {
        match self {
            Kernel::Constant { level } => Ok(*level),
            Kernel::PowerLaw {
                end_exponent,
                origin_exponent,
                mass,
            } => {
                let raw = kernel_shape_integral(*end_exponent, *origin_exponent, rule)?;
                Ok(*mass / raw)
            }
        }
    }
}

/// Composite quadrature layout: panels graded geometrically toward both
/// endpoints with Gauss-Legendre points per panel, plus closed-form product
/// weights for the two endpoint slivers the grading never reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureRule {
    /// Number of geometric halvings toward each endpoint.
    pub graded_levels: usize,
    /// Gauss-Legendre points per panel.
    pub panel_points: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            graded_levels: 40,
            panel_points: 8,
        }
    }
}

impl QuadratureRule {
    fn validate(&self) -> Result<()> {
        if self.graded_levels < 4 || self.graded_levels > 60 {
            return Err(Error::invalid(format!(
                "graded_levels must lie in [4, 60], got {}",
                self.graded_levels
            )));
        }
        if self.panel_points < 2 || self.panel_points > 16 {
            return Err(Error::invalid(format!(
                "panel_points must lie in [2, 16], got {}",
                self.panel_points
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre polynomial; classical and adequate for the orders allowed here.
fn gauss_legendre(points: usize) -> Vec<(f64, f64)> {
    let n = points;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n and its derivative by recurrence
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Nodes and product weights for the unnormalized shape
/// `(1 - tau)^(-a) tau^(-b)` on (0, 1).
fn shape_nodes<T: Scalar>(a: T, b: T, rule: &QuadratureRule) -> Vec<(T, T)> {
    let gl = gauss_legendre(rule.panel_points);
    let shape = |tau: T| (T::one() - tau).powf(-a) * tau.powf(-b);
    let mut nodes: Vec<(T, T)> = Vec::new();
    let push_panel = |x0: T, x1: T, nodes: &mut Vec<(T, T)>| {
        let mid = (x0 + x1) * T::of(0.5);
        let halfw = (x1 - x0) * T::of(0.5);
        for &(xi, wi) in &gl {
            let tau = mid + halfw * T::of(xi);
            nodes.push((tau, halfw * T::of(wi) * shape(tau)));
        }
    };

    let half = T::of(0.5);
    let delta = half.powi(rule.graded_levels as i32);

    // panels [2^-(k+1), 2^-k] grading toward the origin, covering [delta, 1/2]
    for k in 1..rule.graded_levels {
        let x1 = half.powi(k as i32);
        push_panel(x1 * half, x1, &mut nodes);
    }

    // panels [1 - 2^-k, 1 - 2^-(k+1)] grading toward one, covering [1/2, 1 - delta]
    for k in 1..rule.graded_levels {
        let y0 = T::one() - half.powi(k as i32);
        let y1 = T::one() - half.powi(k as i32 + 1);
        push_panel(y0, y1, &mut nodes);
    }

    // endpoint slivers in closed product form: on (0, delta) the smooth
    // factor (1 - tau)^(-a) is one to relative accuracy a * delta, on
    // (1 - delta, 1) the factor tau^(-b) likewise
    let one_minus_b = T::one() - b;
    let origin_weight = delta.powf(one_minus_b) / one_minus_b;
    nodes.push((delta * half, origin_weight));
    let one_minus_a = T::one() - a;
    let end_weight = delta.powf(one_minus_a) / one_minus_a
        * (T::one() - delta * half).powf(-b);
    nodes.push((T::one() - delta * half, end_weight));

    nodes
}

/// Integral over (0, 1) of `(1 - tau)^(-end_exponent) tau^(-origin_exponent)`.
pub fn kernel_shape_integral<T: Scalar>(
    end_exponent: T,
    origin_exponent: T,
    rule: &QuadratureRule,
) -> Result<T> {
    rule.validate()?;
    if !(end_exponent < T::one()) || !(origin_exponent < T::one()) {
        return Err(Error::invalid(
            "shape integral needs both exponents below one",
        ));
    }
    Ok(shape_nodes(end_exponent, origin_exponent, rule)
        .iter()
        .map(|&(_, w)| w)
        .sum())
}

/// Fixed point and diagnostics of the inequality iteration.
#[derive(Clone, Debug)]
pub struct GronwallReport<T> {
    pub times: Vec<T>,
    pub fixed_point: Vec<T>,
    /// Fixed-point value at the largest grid time.
    pub tail: T,
    pub kernel_mass: T,
    pub iterations: usize,
    /// Sup-norm gap ratios between successive sweeps, recorded while the
    /// gap stays clear of rounding; each must not exceed the kernel mass.
    pub contraction_ratios: Vec<T>,
}

/// Iterates `f -> g + integral of w(tau) f(tau t) dtau` to its fixed point
/// on a log grid. `f` is interpolated log-linearly in `t` between grid
/// points and extended by zero below the grid: mass flowing below the
/// resolved window is dropped, which only lowers the fixed point.
pub fn gronwall_iterate<T: Scalar>(
    kernel: &Kernel<T>,
    g: impl Fn(T) -> T,
    t_grid: &[T],
    rule: &QuadratureRule,
) -> Result<GronwallReport<T>> {
    if t_grid.len() < 2 {
        return Err(Error::invalid("time grid needs at least two points"));
    }
    if !(t_grid[0] > T::zero()) {
        return Err(Error::invalid(format!(
            "time grid must be positive, got {}",
            t_grid[0]
        )));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "time grid must increase strictly, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    let forcing: Vec<T> = t_grid.iter().map(|&t| g(t)).collect();
    let g_sup = forcing.iter().fold(T::zero(), |m, &v| m.max(v));
    if forcing
        .iter()
        .any(|v| !(*v >= T::zero()) || !v.as_f64().is_finite())
    {
        return Err(Error::invalid(
            "decay envelope must be nonnegative, finite, and bounded on the grid",
        ));
    }
    let mass = kernel.mass(rule)?;
    if mass >= T::one() {
        return Err(Error::NotContractive(mass.as_f64()));
    }
    let nodes = kernel.nodes(rule)?;
    let ln_t: Vec<T> = t_grid.iter().map(|t| t.ln()).collect();

    let interp = |f: &[T], x: T| -> T {
        if x < t_grid[0] {
            return T::zero(); // zero extension below the grid
        }
        if x >= *t_grid.last().expect("grid nonempty") {
            return *f.last().expect("grid nonempty");
        }
        let mut lo = 0usize;
        let mut hi = t_grid.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t_grid[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lam = (x.ln() - ln_t[lo]) / (ln_t[hi] - ln_t[lo]);
        f[lo] + (f[hi] - f[lo]) * lam
    };

    let tol = T::of(1e-13) * (T::one() + g_sup);
    let max_sweeps = 400;
    let mut f = forcing.clone();
    let mut iterations = 0;
    let mut last_gap: Option<T> = None;
    let mut ratios = Vec::new();
    while iterations < max_sweeps {
        let mut next = Vec::with_capacity(f.len());
        for (i, &t) in t_grid.iter().enumerate() {
            let mut acc = forcing[i];
            for &(tau, w) in &nodes {
                acc = acc + w * interp(&f, tau * t);
            }
            next.push(acc);
        }
        let gap = next
            .iter()
            .zip(&f)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        if let Some(prev) = last_gap {
            // ratios are meaningful only while both gaps beat rounding
            if prev > tol * T::of(100.0) && gap > T::zero() {
                ratios.push(gap / prev);
            }
        }
        last_gap = Some(gap);
        f = next;
        iterations += 1;
        if gap <= tol {
            break;
        }
    }

    let tail = *f.last().expect("grid nonempty");
    Ok(GronwallReport {
        times: t_grid.to_vec(),
        fixed_point: f,
        tail,
        kernel_mass: mass,
        iterations,
        contraction_ratios: ratios,
    })
}
