//! Brute-force ground truth by finite-difference diagonalization.
//!
//! Both the Schrödinger Hamiltonian `−½ d²/dx² + V(x)` and the stability
//! operator `−d²/dτ² + W(τ)` are discretized with the three-point Laplacian
//! and Dirichlet ends. Low-lying eigenvalues are located by Sturm bisection,
//! polished into Rayleigh quotients evaluated in the energy form
//! `Σ c (Δv)²/h² + Σ W v²` (no cancellation between the `2c/h²` diagonal and
//! the off-diagonals), and Richardson-extrapolated over `h` and `h/2`.

use serde::Serialize;
use thiserror::Error;

use crate::instanton::InstantonProfile;
use crate::potential::PotentialSpec;
use crate::tridiagonal::SymTridiagonal;

/// Largest relative eigenvalue shift tolerated between boxes `L` and `1.2 L`.
pub const BOX_SENSITIVITY: f64 = 1e-6;

/// Starting half-width for Schrödinger boxes around the minima at `±1`.
pub const DEFAULT_HALF_WIDTH: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("box of half-width {half_width} too small: {reason}")]
    BoxTooSmall { half_width: f64, reason: String },
    #[error("grid needs at least 100 points, got {0}")]
    TooFewPoints(usize),
    #[error("requested {count} eigenvalues from {available} interior modes")]
    TooManyModes { count: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self, OracleError> {
        if points < 100 {
            return Err(OracleError::TooFewPoints(points));
        }
        assert!(half_width > 0.0);
        Ok(Self { half_width, points, boundary: Boundary::Dirichlet })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Interior nodes; the two boundary nodes carry the Dirichlet zeros.
    pub fn interior(&self) -> Vec<f64> {
        let h = self.step();
        (1..self.points - 1).map(|i| -self.half_width + h * i as f64).collect()
    }

    /// Same box with the step halved.
    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, ..*self }
    }

    pub fn with_half_width(&self, half_width: f64) -> Self {
        Self { half_width, ..*self }
    }
}

/// `−c d²/dx² + W(x)` on the interior nodes of a Dirichlet grid.
#[derive(Debug, Clone)]
pub struct FdOperator {
    pub kinetic: f64,
    pub step: f64,
    pub potential: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl FdOperator {
    pub fn new(kinetic: f64, grid: &GridSpec, field: impl Fn(f64) -> f64) -> Self {
        let potential = grid.interior().into_iter().map(field).collect();
        Self { kinetic, step: grid.step(), potential }
    }

    pub fn matrix(&self) -> SymTridiagonal {
        let k = self.kinetic / (self.step * self.step);
        let n = self.potential.len();
        SymTridiagonal::new(self.potential.iter().map(|w| 2.0 * k + w).collect(), vec![-k; n - 1])
    }

    /// `⟨v|A|v⟩ / ⟨v|v⟩` written as a sum of squares plus the potential term.
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let k = self.kinetic / (self.step * self.step);
        let n = v.len();
        let mut grad = v[0] * v[0] + v[n - 1] * v[n - 1];
        for i in 0..n - 1 {
            let d = v[i + 1] - v[i];
            grad += d * d;
        }
        let pot: f64 = v.iter().zip(&self.potential).map(|(a, w)| w * a * a).sum();
        let norm: f64 = v.iter().map(|a| a * a).sum();
        (k * grad + pot) / norm
    }

    /// Lowest `count` modes with Rayleigh-polished eigenvalues.
    pub fn lowest_modes(&self, count: usize) -> Result<Vec<Mode>, OracleError> {
        let available = self.potential.len();
        if count > available {
            return Err(OracleError::TooManyModes { count, available });
        }
        let m = self.matrix();
        Ok((0..count)
            .map(|k| {
                let estimate = m.kth_eigenvalue(k);
                let vector = m.inverse_iteration(estimate);
                Mode { value: self.rayleigh_quotient(&vector), vector }
            })
            .collect())
    }

    pub fn all_eigenvalues(&self) -> Vec<f64> {
        self.matrix().eigenvalues()
    }
}

fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

fn lowest_values(op: &FdOperator, count: usize) -> Result<Vec<f64>, OracleError> {
    Ok(op.lowest_modes(count)?.into_iter().map(|m| m.value).collect())
}

/// Lowest eigenvalues on `grid` and on the halved-step grid, plus their
/// Richardson combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolated {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

fn extrapolate(
    grid: &GridSpec,
    count: usize,
    build: impl Fn(&GridSpec) -> FdOperator,
) -> Result<Extrapolated, OracleError> {
    let coarse = lowest_values(&build(grid), count)?;
    let fine = lowest_values(&build(&grid.refined()), count)?;
    let extrapolated = richardson(&coarse, &fine);
    Ok(Extrapolated { coarse, fine, extrapolated })
}

fn schrodinger_operator(spec: &PotentialSpec, grid: &GridSpec) -> FdOperator {
    FdOperator::new(0.5, grid, |x| spec.evaluate(x))
}

/// Richardson-extrapolated Schrödinger levels with their grid history.
pub fn schrodinger_levels(
    spec: &PotentialSpec,
    grid: &GridSpec,
    count: usize,
) -> Result<Extrapolated, OracleError> {
    extrapolate(grid, count, |g| schrodinger_operator(spec, g))
}

/// Lowest `count` levels of `−½ d²/dx² + V(x)` (unit mass).
///
/// Fails with `BoxTooSmall` when `V(±L)` does not exceed ten times the
/// highest requested level or when enlarging the box to `1.2 L` moves any
/// level by more than [`BOX_SENSITIVITY`] relative.
pub fn diagonalize_schrodinger(
    spec: &PotentialSpec,
    grid: &GridSpec,
    count: usize,
) -> Result<Vec<f64>, OracleError> {
    let levels = schrodinger_levels(spec, grid, count)?.extrapolated;
    let top = levels[count - 1];
    let wall = spec.evaluate(grid.half_width).min(spec.evaluate(-grid.half_width));
    if wall <= 10.0 * top {
        return Err(OracleError::BoxTooSmall {
            half_width: grid.half_width,
            reason: format!("V(L) = {wall} does not exceed 10 x E_{} = {}", count - 1, 10.0 * top),
        });
    }
    let wider = schrodinger_levels(spec, &grid.with_half_width(1.2 * grid.half_width), count)?.extrapolated;
    for (i, (a, b)) in levels.iter().zip(&wider).enumerate() {
        let shift = ((a - b) / a).abs();
        if shift > BOX_SENSITIVITY {
            return Err(OracleError::BoxTooSmall {
                half_width: grid.half_width,
                reason: format!("level {i} moves by {shift:e} relative when the box grows by 20%"),
            });
        }
    }
    Ok(levels)
}

/// [`diagonalize_schrodinger`] starting from `L = 3` and growing the box by
/// 20% until the boundary tests pass. Returns the levels and the box used.
pub fn diagonalize_schrodinger_auto(
    spec: &PotentialSpec,
    points: usize,
    count: usize,
) -> Result<(Vec<f64>, GridSpec), OracleError> {
    let mut grid = GridSpec::new(DEFAULT_HALF_WIDTH, points)?;
    let mut last = None;
    for _ in 0..25 {
        match diagonalize_schrodinger(spec, &grid, count) {
            Ok(levels) => return Ok((levels, grid)),
            Err(e @ OracleError::BoxTooSmall { .. }) => {
                last = Some(e);
                grid = grid.with_half_width(1.2 * grid.half_width);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `⟨v|P|v⟩` for the reflection `x → −x` on a symmetric grid: `+1` for even
/// states, `−1` for odd ones.
pub fn parity(vector: &[f64]) -> f64 {
    let n = vector.len();
    let norm: f64 = vector.iter().map(|a| a * a).sum();
    (0..n).map(|i| vector[i] * vector[n - 1 - i]).sum::<f64>() / norm
}

/// Parities of the lowest `count` Schrödinger eigenstates on `grid`.
pub fn schrodinger_parities(spec: &PotentialSpec, grid: &GridSpec, count: usize) -> Result<Vec<f64>, OracleError> {
    Ok(schrodinger_operator(spec, grid).lowest_modes(count)?.iter().map(|m| parity(&m.vector)).collect())
}

fn stability_operator(curvature: &dyn Fn(f64) -> f64, grid: &GridSpec) -> FdOperator {
    FdOperator::new(1.0, grid, curvature)
}

/// Lowest Dirichlet eigenvalues of `−d²/dτ² + V''(x_c(τ))` on
/// `[−T/2, T/2]`, Richardson-extrapolated. `ε₀` is the compressed zero mode.
pub fn diagonalize_stability(
    profile: &InstantonProfile,
    half_box: f64,
    grid: &GridSpec,
    count: usize,
) -> Result<Vec<f64>, OracleError> {
    let grid = grid.with_half_width(half_box);
    let w = |t: f64| profile.curvature_at(t);
    Ok(extrapolate(&grid, count, |g| stability_operator(&w, g))?.extrapolated)
}

/// Stability modes on the unrefined grid, eigenvectors included.
pub fn stability_modes(
    profile: &InstantonProfile,
    half_box: f64,
    grid: &GridSpec,
    count: usize,
) -> Result<Vec<Mode>, OracleError> {
    let grid = grid.with_half_width(half_box);
    stability_operator(&|t| profile.curvature_at(t), &grid).lowest_modes(count)
}

/// Constant-curvature counterpart of [`diagonalize_stability`].
pub fn diagonalize_curvature(
    curvature: &dyn Fn(f64) -> f64,
    half_box: f64,
    grid: &GridSpec,
    count: usize,
) -> Result<Vec<f64>, OracleError> {
    let grid = grid.with_half_width(half_box);
    Ok(extrapolate(&grid, count, |g| stability_operator(curvature, g))?.extrapolated)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantRatio {
    /// `∏ ε_j / ε̃_j` over all interior modes.
    pub raw: f64,
    /// `raw / ε₀`, the ratio with the lowest mode of the first operator removed.
    pub reduced: f64,
}

/// Eigenvalue-product ratio of `−d²/dτ² + W` against `−d²/dτ² + ν²` on a
/// shared Dirichlet grid, pairing modes by ascending index.
pub fn determinant_ratio_bruteforce(
    curvature: &dyn Fn(f64) -> f64,
    nu: f64,
    half_box: f64,
    grid: &GridSpec,
) -> DeterminantRatio {
    let grid = grid.with_half_width(half_box);
    let num = stability_operator(curvature, &grid).all_eigenvalues();
    let den = stability_operator(&|_| nu * nu, &grid).all_eigenvalues();
    let mut log_raw = 0.0;
    let mut sign = 1.0;
    for (a, b) in num.iter().zip(&den) {
        log_raw += a.abs().ln() - b.ln();
        sign *= a.signum();
    }
    let raw = sign * log_raw.exp();
    DeterminantRatio { raw, reduced: raw / num[0] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuation;
    use crate::instanton::zero_mode;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert_eq!(GridSpec::new(1.0, 99), Err(OracleError::TooFewPoints(99)));
        let g = GridSpec::new(2.0, 101).unwrap();
        assert!((g.step() - 0.04).abs() < 1e-15);
        assert_eq!(g.interior().len(), 99);
        assert_eq!(g.refined().points, 201);
    }

    #[test]
    fn harmonic_levels() {
        let spec = PotentialSpec::harmonic(1.0);
        let grid = GridSpec::new(10.0, 4000).unwrap();
        let e = diagonalize_schrodinger(&spec, &grid, 3).unwrap();
        for (n, v) in e.iter().enumerate() {
            assert!((v - (n as f64 + 0.5)).abs() < 1e-6, "{n}: {v}");
        }
    }

    #[test]
    fn small_box_detected() {
        let spec = PotentialSpec::harmonic(1.0);
        let grid = GridSpec::new(2.5, 400).unwrap();
        assert!(matches!(diagonalize_schrodinger(&spec, &grid, 3), Err(OracleError::BoxTooSmall { .. })));
        let (levels, used) = diagonalize_schrodinger_auto(&spec, 1500, 3).unwrap();
        assert!(used.half_width > DEFAULT_HALF_WIDTH);
        assert!((levels[2] - 2.5).abs() < 1e-5);
    }

    #[test]
    fn richardson_improves_convergence() {
        let spec = PotentialSpec::triple_well(4.0);
        let grid = GridSpec::new(3.0, 300).unwrap();
        let a = schrodinger_levels(&spec, &grid, 3).unwrap();
        let b = schrodinger_levels(&spec, &grid.refined(), 3).unwrap();
        for i in 0..3 {
            let raw_gap = (a.coarse[i] - a.fine[i]).abs();
            let extrap_gap = (a.extrapolated[i] - b.extrapolated[i]).abs();
            // O(h²): halving the step cuts the error ~4x
            let ratio = (a.coarse[i] - a.fine[i]) / (b.coarse[i] - b.fine[i]);
            assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
            assert!(extrap_gap * 4.0 <= raw_gap);
        }
    }

    #[test]
    fn parity_alternates() {
        let spec = PotentialSpec::triple_well(2.0);
        let grid = GridSpec::new(3.0, 1200).unwrap();
        let p = schrodinger_parities(&spec, &grid, 6).unwrap();
        for (i, v) in p.iter().enumerate() {
            let expected = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - expected).abs() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let spec = PotentialSpec::triple_well(3.0);
        let grid = GridSpec::new(3.0, 400).unwrap();
        let modes = schrodinger_operator(&spec, &grid).lowest_modes(5).unwrap();
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate() {
                let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10, "{i},{j}: {dot}");
            }
        }
    }

    #[test]
    fn constant_curvature_box_spectrum() {
        let nu: f64 = 1.5;
        let half_box = 2.0;
        let grid = GridSpec::new(half_box, 2000).unwrap();
        let ev = diagonalize_curvature(&|_| nu * nu, half_box, &grid, 4).unwrap();
        for (i, v) in ev.iter().enumerate() {
            let j = (i + 1) as f64;
            let exact = nu * nu + (j * PI / (2.0 * half_box)).powi(2);
            assert!((v - exact).abs() < 1e-4, "{i}: {v} vs {exact}");
        }
    }

    #[test]
    fn compressed_zero_mode_matches_kink_derivative() {
        let half_box = 8.0;
        let profile = fluctuation::triple_well_profile(1.0, half_box);
        let grid = GridSpec::new(half_box, 1601).unwrap();
        let modes = stability_modes(&profile, half_box, &grid, 1).unwrap();
        let x_o = zero_mode(&profile);
        // both live on the same uniform nodes (h = 0.01)
        let interior = &x_o[1..x_o.len() - 1];
        let norm = interior.iter().map(|v| v * v).sum::<f64>().sqrt();
        let overlap: f64 = modes[0].vector.iter().zip(interior).map(|(a, b)| a * b / norm).sum();
        assert!(overlap.abs() > 0.999, "{overlap}");
    }

    #[test]
    fn identical_operators_give_unit_ratio() {
        let grid = GridSpec::new(3.0, 500).unwrap();
        let r = determinant_ratio_bruteforce(&|_| 4.0, 2.0, 3.0, &grid);
        assert_eq!(r.raw, 1.0);
    }

    #[test]
    fn harmonic_pair_matches_gelfand_yaglom() {
        let (n1, n2) = (1.0f64, 2.0f64);
        let t = 4.0;
        let grid = GridSpec::new(0.5 * t, 4000).unwrap();
        let r = determinant_ratio_bruteforce(&|_| n1 * n1, n2, 0.5 * t, &grid);
        let exact = (n2 * (n1 * t).sinh()) / (n1 * (n2 * t).sinh());
        assert!((r.raw / exact - 1.0).abs() < 0.005, "{} vs {exact}", r.raw);
    }
}
