//! Classical euclidean kink between adjacent minima.
//!
//! A profile is tabulated on a time grid together with its velocity and
//! acceleration. Closed-form triple-well profiles additionally keep their
//! analytic shape so that off-grid evaluation is exact; numerically
//! integrated profiles are interpolated with quintic Hermite polynomials.

use crate::numerics::{self, logistic};
use crate::potential::PotentialSpec;
use thiserror::Error;

/// Potential value below which the kink is treated as sitting in the
/// linearized basin of a minimum.
pub const BOUNDARY_LAYER_V: f64 = 1e-12;

/// Default time step in units of `1/ω`.
pub const DEFAULT_STEP_OMEGA: f64 = 0.01;

/// Default box length in units of `1/ω`.
pub const DEFAULT_BOX_OMEGA: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstantonError {
    #[error("{start} and {end} are not adjacent minima of the potential")]
    NonAdjacentMinima { start: f64, end: f64 },
    #[error("kink quadrature did not reach tolerance {tol:e} (best estimate {achieved:e})")]
    QuadratureFailure { achieved: f64, tol: f64 },
    #[error("fit window outside the asymptotic regime: {0}")]
    InsufficientTail(String),
    #[error("time grid must be strictly increasing with at least 5 nodes")]
    InvalidGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `x² = (1 + tanh ω(τ − τ_c)) / 2` from 0 to 1, possibly mirrored.
    TripleWellKink { omega: f64, mirrored: bool },
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstantonProfile {
    pub tau_grid: Vec<f64>,
    pub x_c: Vec<f64>,
    pub dx_c: Vec<f64>,
    /// Second time derivative, equal to `V'(x_c)` on a zero-energy path.
    pub ddx_c: Vec<f64>,
    pub tau_c: f64,
    pub action: f64,
    /// Right-tail amplitude: `x_o ≈ C exp(−κ₊ (τ − τ_c))`.
    pub c_const: f64,
    /// Left-tail amplitude: `x_o ≈ D exp(κ₋ (τ − τ_c))`.
    pub d_const: f64,
    /// Well frequency κ₋ of the minimum the kink leaves.
    pub left_rate: f64,
    /// Well frequency κ₊ of the minimum the kink reaches.
    pub right_rate: f64,
    pub start: f64,
    pub end: f64,
    pub potential: PotentialSpec,
    shape: Shape,
}

/// Fitted tail amplitudes and free-fit decay slopes of the zero mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub c: f64,
    pub d: f64,
    pub right_slope: f64,
    pub left_slope: f64,
}

/// Tail window measured from the kink center, `near ≤ |τ − τ_c| ≤ far`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub near: f64,
    pub far: f64,
}

impl FitWindow {
    /// `[8, 12] / κ₋`, deep enough that subleading tail corrections are
    /// below `e^{-16}`.
    pub fn default_for(profile: &InstantonProfile) -> Self {
        let k = profile.left_rate.min(profile.right_rate);
        Self { near: 8.0 / k, far: 12.0 / k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionParts {
    pub kinetic: f64,
    pub potential: f64,
}

impl ActionParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

/// Default grid for a kink of frequency `omega`: `ωT = 30`, `h = 0.01/ω`.
pub fn default_grid(omega: f64) -> Vec<f64> {
    numerics::symmetric_grid(0.5 * DEFAULT_BOX_OMEGA / omega, DEFAULT_STEP_OMEGA / omega)
}

fn validate_grid(grid: &[f64]) -> Result<(), InstantonError> {
    if grid.len() < 5 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(InstantonError::InvalidGrid);
    }
    Ok(())
}

/// Closed-form triple-well kink from `x = 0` to `x = 1`.
///
/// Positions use `x² = σ(2ω(τ − τ_c))` and `1 − x² = σ(−2ω(τ − τ_c))` with
/// the logistic σ, which keeps both tails accurate to full relative
/// precision.
pub fn closed_form_profile(omega: f64, tau_c: f64, grid: &[f64]) -> InstantonProfile {
    assert!(omega > 0.0);
    assert!(validate_grid(grid).is_ok(), "grid must be strictly increasing");
    let action = omega / 4.0;
    let amplitude = omega / action.sqrt();
    let shape = Shape::TripleWellKink { omega, mirrored: false };
    let mut profile = InstantonProfile {
        tau_grid: grid.to_vec(),
        x_c: Vec::with_capacity(grid.len()),
        dx_c: Vec::with_capacity(grid.len()),
        ddx_c: Vec::with_capacity(grid.len()),
        tau_c,
        action,
        c_const: amplitude,
        d_const: amplitude,
        left_rate: omega,
        right_rate: 2.0 * omega,
        start: 0.0,
        end: 1.0,
        potential: PotentialSpec::triple_well(omega),
        shape,
    };
    for &t in grid {
        let (x, dx, ddx) = profile.state_at(t);
        profile.x_c.push(x);
        profile.dx_c.push(dx);
        profile.ddx_c.push(ddx);
    }
    profile
}

fn triple_kink_state(omega: f64, tau_c: f64, t: f64) -> (f64, f64, f64) {
    let z = 2.0 * omega * (t - tau_c);
    let x2 = logistic(z);
    let x = x2.sqrt();
    let dx = omega * x * logistic(-z);
    let ddx = omega * dx * (1.0 - 3.0 * x2);
    (x, dx, ddx)
}

/// `∫ sqrt(2V) dx` between two points, the action of a saturated kink.
pub fn bogomolny_action(spec: &PotentialSpec, a: f64, b: f64) -> f64 {
    let n = 4096;
    let h = (b - a).abs() / n as f64;
    let lo = a.min(b);
    let values: Vec<f64> = (0..=n).map(|i| spec.bogomolny_speed(lo + h * i as f64)).collect();
    numerics::simpson(&values, h)
}

struct KinkOde<'a> {
    spec: &'a PotentialSpec,
    a: f64,
    b: f64,
    span: f64,
    kappa_a: f64,
    kappa_b: f64,
}

impl KinkOde<'_> {
    /// Distances of `x(s) = a + (b − a) σ(s)` to both endpoints.
    fn distances(&self, s: f64) -> (f64, f64) {
        (self.span * logistic(s), self.span * logistic(-s))
    }

    fn position(&self, s: f64) -> f64 {
        let (da, db) = self.distances(s);
        if da <= db {
            self.a + (self.b - self.a).signum() * da
        } else {
            self.b - (self.b - self.a).signum() * db
        }
    }

    /// `ds/dτ` for the logit coordinate `s = ln[(x − a)/(b − x)]`.
    fn rate(&self, s: f64) -> f64 {
        let (da, db) = self.distances(s);
        let x = self.position(s);
        if self.spec.evaluate(x) < BOUNDARY_LAYER_V {
            if da <= db {
                self.kappa_a * self.span / db
            } else {
                self.kappa_b * self.span / da
            }
        } else {
            self.spec.bogomolny_speed(x) * self.span / (da * db)
        }
    }

    fn velocity(&self, s: f64) -> f64 {
        let (da, db) = self.distances(s);
        (self.b - self.a).signum() * da * db / self.span * self.rate(s)
    }

    fn acceleration(&self, s: f64) -> f64 {
        let (da, db) = self.distances(s);
        let x = self.position(s);
        if self.spec.evaluate(x) < BOUNDARY_LAYER_V {
            let v = self.velocity(s);
            if da <= db {
                self.kappa_a * v
            } else {
                -self.kappa_b * v
            }
        } else {
            self.spec.first_derivative(x)
        }
    }

    fn rk4(&self, s: f64, h: f64) -> f64 {
        let k1 = self.rate(s);
        let k2 = self.rate(s + 0.5 * h * k1);
        let k3 = self.rate(s + 0.5 * h * k2);
        let k4 = self.rate(s + h * k3);
        s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    fn advance(&self, s: f64, dt: f64, substeps: usize) -> f64 {
        let h = dt / substeps as f64;
        (0..substeps).fold(s, |s, _| self.rk4(s, h))
    }

    /// Logit coordinate on every grid node, integrating outwards from the
    /// anchor `(tau_c, s0)`.
    fn integrate(&self, grid: &[f64], tau_c: f64, s0: f64, substeps: usize) -> Vec<f64> {
        let n = grid.len();
        let mut s = vec![0.0; n];
        let first_right = grid.partition_point(|&t| t < tau_c);
        if first_right < n {
            let mut cur = self.advance(s0, grid[first_right] - tau_c, substeps);
            s[first_right] = cur;
            for i in first_right + 1..n {
                cur = self.advance(cur, grid[i] - grid[i - 1], substeps);
                s[i] = cur;
            }
        }
        if first_right > 0 {
            let last_left = first_right - 1;
            let mut cur = self.advance(s0, grid[last_left] - tau_c, substeps);
            s[last_left] = cur;
            for i in (0..last_left).rev() {
                cur = self.advance(cur, grid[i] - grid[i + 1], substeps);
                s[i] = cur;
            }
        }
        s
    }
}

/// Integrates `dx/dτ = ±sqrt(2V(x))` between two adjacent minima.
///
/// The kink is parametrized by the logit coordinate
/// `s = ln[(x − a)/(b − x)]`, in which `dτ = dx / sqrt(2V)` becomes a smooth
/// first-order equation whose rate tends to the local well frequencies at
/// both ends. Inside the boundary layer `V < 1e-12` the rate is replaced by
/// its linearized limit. The kink center `τ_c` is pinned at
/// [`PotentialSpec::kink_center`]. Substeps per grid interval are doubled
/// until two successive solutions agree to `tol`.
pub fn solve_bogomolny(
    spec: &PotentialSpec,
    x_start: f64,
    x_end: f64,
    grid: &[f64],
    tol: f64,
) -> Result<InstantonProfile, InstantonError> {
    if !spec.are_adjacent_minima(x_start, x_end) {
        return Err(InstantonError::NonAdjacentMinima { start: x_start, end: x_end });
    }
    validate_grid(grid)?;
    let ode = KinkOde {
        spec,
        a: x_start,
        b: x_end,
        span: (x_end - x_start).abs(),
        kappa_a: spec.well_frequency(x_start),
        kappa_b: spec.well_frequency(x_end),
    };
    let center = spec.kink_center(x_start, x_end);
    let u = (center - x_start) / (x_end - x_start);
    let s0 = (u / (1.0 - u)).ln();
    let tau_c = 0.0;

    const MAX_SUBSTEPS: usize = 256;
    let mut substeps = 1;
    let mut s = ode.integrate(grid, tau_c, s0, substeps);
    let positions = |s: &[f64]| s.iter().map(|&v| ode.position(v)).collect::<Vec<_>>();
    let mut x = positions(&s);
    loop {
        let refined_s = ode.integrate(grid, tau_c, s0, 2 * substeps);
        let refined_x = positions(&refined_s);
        let change = x.iter().zip(&refined_x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        s = refined_s;
        x = refined_x;
        substeps *= 2;
        if change <= tol {
            break;
        }
        if substeps >= MAX_SUBSTEPS {
            return Err(InstantonError::QuadratureFailure { achieved: change, tol });
        }
    }

    let dx: Vec<f64> = s.iter().map(|&v| ode.velocity(v)).collect();
    let ddx: Vec<f64> = s.iter().map(|&v| ode.acceleration(v)).collect();
    let action = bogomolny_action(spec, x_start, x_end);
    let mut profile = InstantonProfile {
        tau_grid: grid.to_vec(),
        x_c: x,
        dx_c: dx,
        ddx_c: ddx,
        tau_c,
        action,
        c_const: 0.0,
        d_const: 0.0,
        left_rate: ode.kappa_a,
        right_rate: ode.kappa_b,
        start: x_start,
        end: x_end,
        potential: *spec,
        shape: Shape::Tabulated,
    };
    let (c, d) = profile.endpoint_tail_constants();
    profile.c_const = c;
    profile.d_const = d;
    Ok(profile)
}

/// Euclidean action `∫ [½ ẋ² + V(x)] dτ` of a tabulated path on a uniform grid.
pub fn euclidean_action(spec: &PotentialSpec, tau: &[f64], x: &[f64], dx: &[f64]) -> ActionParts {
    let h = (tau[tau.len() - 1] - tau[0]) / (tau.len() - 1) as f64;
    let kin: Vec<f64> = dx.iter().map(|v| 0.5 * v * v).collect();
    let pot: Vec<f64> = x.iter().map(|&v| spec.evaluate(v)).collect();
    ActionParts { kinetic: numerics::trapezoid(&kin, h), potential: numerics::trapezoid(&pot, h) }
}

/// Euclidean action of the profile evaluated by quadrature over its grid.
///
/// The integrand decays exponentially at both ends, so the trapezoid rule
/// converges spectrally on a uniform grid.
pub fn classical_action(profile: &InstantonProfile, spec: &PotentialSpec) -> f64 {
    action_parts(profile, spec).total()
}

pub fn action_parts(profile: &InstantonProfile, spec: &PotentialSpec) -> ActionParts {
    euclidean_action(spec, &profile.tau_grid, &profile.x_c, &profile.dx_c)
}

/// Normalized zero mode `x_o = ẋ_c / sqrt(S_eo)` on the profile grid.
pub fn zero_mode(profile: &InstantonProfile) -> Vec<f64> {
    let norm = profile.action.sqrt();
    profile.dx_c.iter().map(|v| v / norm).collect()
}

/// Fits the tail amplitudes of the zero mode.
///
/// Amplitudes are fitted with the slopes pinned at the well frequencies;
/// free least-squares slopes are reported and must agree with the pinned
/// ones to 1%.
pub fn asymptotic_constants(
    profile: &InstantonProfile,
    window: FitWindow,
) -> Result<AsymptoticFit, InstantonError> {
    if !(window.far > window.near && window.near > 0.0) {
        return Err(InstantonError::InsufficientTail(format!(
            "window [{}, {}] must satisfy 0 < near < far",
            window.near, window.far
        )));
    }
    let x_o = zero_mode(profile);
    let tc = profile.tau_c;
    let mut right = (Vec::new(), Vec::new());
    let mut left = (Vec::new(), Vec::new());
    for (&t, &v) in profile.tau_grid.iter().zip(&x_o) {
        let r = t - tc;
        if v <= 0.0 {
            continue;
        }
        if r >= window.near && r <= window.far {
            right.0.push(r);
            right.1.push(v.ln());
        } else if -r >= window.near && -r <= window.far {
            left.0.push(r);
            left.1.push(v.ln());
        }
    }
    let grid_lo = profile.tau_grid[0] - tc;
    let grid_hi = profile.tau_grid[profile.tau_grid.len() - 1] - tc;
    if right.0.len() < 3 || left.0.len() < 3 || grid_hi < window.far || -grid_lo < window.far {
        return Err(InstantonError::InsufficientTail(format!(
            "grid [{grid_lo}, {grid_hi}] around the center does not cover window [{}, {}]",
            window.near, window.far
        )));
    }
    let (right_slope, _) = numerics::linear_fit(&right.0, &right.1);
    let (left_slope, _) = numerics::linear_fit(&left.0, &left.1);
    let kr = profile.right_rate;
    let kl = profile.left_rate;
    for (slope, expected, side) in [(right_slope, -kr, "right"), (left_slope, kl, "left")] {
        if (slope / expected - 1.0).abs() > 0.01 {
            return Err(InstantonError::InsufficientTail(format!(
                "{side} tail slope {slope} differs from {expected} by more than 1%"
            )));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let c = mean(&right.0.iter().zip(&right.1).map(|(r, l)| l + kr * r).collect::<Vec<_>>()).exp();
    let d = mean(&left.0.iter().zip(&left.1).map(|(r, l)| l - kl * r).collect::<Vec<_>>()).exp();
    Ok(AsymptoticFit { c, d, right_slope, left_slope })
}

impl InstantonProfile {
    pub fn omega(&self) -> f64 {
        self.potential.omega
    }

    pub fn step(&self) -> f64 {
        let n = self.tau_grid.len();
        (self.tau_grid[n - 1] - self.tau_grid[0]) / (n - 1) as f64
    }

    /// Largest half-box `T/2` such that `[−T/2, T/2]` lies inside the grid.
    pub fn half_extent(&self) -> f64 {
        (-self.tau_grid[0]).min(self.tau_grid[self.tau_grid.len() - 1])
    }

    /// `(x_c, ẋ_c, ẍ_c)` at an arbitrary time.
    ///
    /// Beyond the grid the tabulated profile is continued with its
    /// exponential tails.
    pub fn state_at(&self, t: f64) -> (f64, f64, f64) {
        match self.shape {
            Shape::TripleWellKink { omega, mirrored: false } => triple_kink_state(omega, self.tau_c, t),
            Shape::TripleWellKink { omega, mirrored: true } => {
                let (x, dx, ddx) = triple_kink_state(omega, -self.tau_c, -t);
                (-x, dx, -ddx)
            }
            Shape::Tabulated => self.interpolate(t),
        }
    }

    pub fn position_at(&self, t: f64) -> f64 {
        self.state_at(t).0
    }

    /// Stability-operator curvature `V''(x_c(τ))`.
    pub fn curvature_at(&self, t: f64) -> f64 {
        self.potential.second_derivative(self.position_at(t))
    }

    /// Zero mode and its derivative at an arbitrary time.
    pub fn zero_mode_at(&self, t: f64) -> (f64, f64) {
        let (_, dx, ddx) = self.state_at(t);
        let norm = self.action.sqrt();
        (dx / norm, ddx / norm)
    }

    pub fn zero_mode_derivative(&self) -> Vec<f64> {
        let norm = self.action.sqrt();
        self.ddx_c.iter().map(|v| v / norm).collect()
    }

    fn interpolate(&self, t: f64) -> (f64, f64, f64) {
        let g = &self.tau_grid;
        let n = g.len();
        if t <= g[0] {
            let decay = (self.left_rate * (t - g[0])).exp();
            let dx = self.dx_c[0] * decay;
            return (self.start + (self.x_c[0] - self.start) * decay, dx, self.left_rate * dx);
        }
        if t >= g[n - 1] {
            let decay = (-self.right_rate * (t - g[n - 1])).exp();
            let dx = self.dx_c[n - 1] * decay;
            return (self.end + (self.x_c[n - 1] - self.end) * decay, dx, -self.right_rate * dx);
        }
        let i = (g.partition_point(|&v| v <= t) - 1).min(n - 2);
        let h = g[i + 1] - g[i];
        let u = (t - g[i]) / h;
        quintic_hermite(
            u,
            h,
            [self.x_c[i], self.dx_c[i], self.ddx_c[i]],
            [self.x_c[i + 1], self.dx_c[i + 1], self.ddx_c[i + 1]],
        )
    }

    /// Amplitudes from the outermost grid nodes, assuming they are deep in
    /// the linearized tails.
    fn endpoint_tail_constants(&self) -> (f64, f64) {
        let n = self.tau_grid.len();
        let norm = self.action.sqrt();
        let c = self.dx_c[n - 1].abs() / norm * (self.right_rate * (self.tau_grid[n - 1] - self.tau_c)).exp();
        let d = self.dx_c[0].abs() / norm * (-self.left_rate * (self.tau_grid[0] - self.tau_c)).exp();
        (c, d)
    }

    /// Antiinstanton obtained by `τ → −τ`, `x_c → −x_c`.
    pub fn anti(&self) -> InstantonProfile {
        let rev = |v: &[f64], sign: f64| v.iter().rev().map(|a| sign * a).collect::<Vec<_>>();
        let shape = match self.shape {
            Shape::TripleWellKink { omega, mirrored } => Shape::TripleWellKink { omega, mirrored: !mirrored },
            Shape::Tabulated => Shape::Tabulated,
        };
        InstantonProfile {
            tau_grid: rev(&self.tau_grid, -1.0),
            x_c: rev(&self.x_c, -1.0),
            dx_c: rev(&self.dx_c, 1.0),
            ddx_c: rev(&self.ddx_c, -1.0),
            tau_c: -self.tau_c,
            action: self.action,
            c_const: self.d_const,
            d_const: self.c_const,
            left_rate: self.right_rate,
            right_rate: self.left_rate,
            start: -self.end,
            end: -self.start,
            potential: self.potential,
            shape,
        }
    }
}

/// Quintic Hermite interpolant on `[0, 1]` matching value, first and second
/// derivative at both ends. Returns value, first and second derivative in
/// physical units.
fn quintic_hermite(u: f64, h: f64, left: [f64; 3], right: [f64; 3]) -> (f64, f64, f64) {
    let (p0, v0, a0) = (left[0], left[1] * h, left[2] * h * h);
    let (p1, v1, a1) = (right[0], right[1] * h, right[2] * h * h);
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h00 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h10 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h20 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h01 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h11 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h21 = 0.5 * (u3 - 2.0 * u4 + u5);
    let d00 = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
    let d10 = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
    let d20 = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
    let d11 = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
    let d21 = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
    let s00 = -60.0 * u + 180.0 * u2 - 120.0 * u3;
    let s10 = -36.0 * u + 96.0 * u2 - 60.0 * u3;
    let s20 = 0.5 * (2.0 - 18.0 * u + 36.0 * u2 - 20.0 * u3);
    let s11 = -24.0 * u + 84.0 * u2 - 60.0 * u3;
    let s21 = 0.5 * (6.0 * u - 24.0 * u2 + 20.0 * u3);
    let value = h00 * p0 + h10 * v0 + h20 * a0 + h01 * p1 + h11 * v1 + h21 * a1;
    let d1 = d00 * p0 + d10 * v0 + d20 * a0 - d00 * p1 + d11 * v1 + d21 * a1;
    let d2 = s00 * p0 + s10 * v0 + s20 * a0 - s00 * p1 + s11 * v1 + s21 * a1;
    (value, d1 / h, d2 / (h * h))
}
