//! Dilute instanton gas for the `0 → 1` transition and the resulting
//! three lowest levels.
//!
//! A string of `k` kinks (k odd) contributes `F(k) (ωT)^k / k!` times the
//! k-th power of the one-kink weight, with `F(k) = 2^{(k−1)/2}` counting the
//! walks `0 → ±1 → 0 → … → 1` over adjacent minima. Writing
//! `F(k) d₁^k = (√2 d₁)^k / √2` folds the count into the density
//! `d = √2 d₁ = sqrt(8/3π) sqrt(S) e^{−S}` and moves the `1/√2` into the
//! harmonic prefactor, so that the summed amplitude is
//! `sqrt(3ω/4π) e^{−3ωT/4} sinh(ωTd)`.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::numerics;

/// Truncation default: stop once the next term drops below this fraction
/// of the partial sum.
pub const SERIES_RELATIVE_CUTOFF: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasError {
    #[error("the 0 -> 1 channel needs an odd number of kinks, got {0}")]
    EvenK(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumTriplet {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

impl SpectrumTriplet {
    pub fn is_ordered(&self) -> bool {
        self.e0 < self.e1 && self.e1 < self.e2
    }
}

/// Series handling for the multi-kink sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Closed form `sinh(ωTd)`.
    Closed,
    /// Terms `j = 0..=max_j`, i.e. up to `k = 2 max_j + 1` kinks.
    Terms(usize),
    /// Stop at [`SERIES_RELATIVE_CUTOFF`].
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitude {
    pub value: f64,
    /// Largest kink number included; `None` for the closed form.
    pub k_max: Option<u64>,
    /// First omitted term times the prefactor (zero for the closed form).
    pub first_omitted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiluteGasResult {
    pub omega: f64,
    pub density: f64,
    pub prefactor: f64,
    pub energies: SpectrumTriplet,
    pub k_max_used: u64,
}

impl DiluteGasResult {
    /// `⟨1| e^{−HT} |0⟩` in the dilute-gas approximation.
    pub fn amplitude(&self, t: f64) -> f64 {
        amplitude(self.omega, t, Truncation::Closed).value
    }
}

pub fn instanton_action(omega: f64) -> f64 {
    omega / 4.0
}

/// `d = sqrt(8/3π) sqrt(S) e^{−S}` with `S = ω/4`.
pub fn instanton_density(omega: f64) -> f64 {
    assert!(omega > 0.0);
    let s = instanton_action(omega);
    (8.0 / (3.0 * PI)).sqrt() * s.sqrt() * (-s).exp()
}

/// Weight of a single kink per unit `ω dτ_c`, before the combinatorial
/// factor is absorbed: `sqrt(4/3π) sqrt(S) e^{−S} = d / √2`.
pub fn single_kink_density(omega: f64) -> f64 {
    let s = instanton_action(omega);
    (4.0 / (3.0 * PI)).sqrt() * s.sqrt() * (-s).exp()
}

/// Density rebuilt from a computed reduced determinant ratio:
/// `√2 · (Det'/Det)^{−1/2} · sqrt(S/2π) · e^{−S} / ω`.
pub fn pipeline_density(omega: f64, reduced_ratio: f64) -> f64 {
    let s = instanton_action(omega);
    std::f64::consts::SQRT_2 * reduced_ratio.powf(-0.5) * (s / (2.0 * PI)).sqrt() * (-s).exp() / omega
}

/// `(ωT)^k / k!`, the volume of the ordered centers `−T/2 < τ₁ < … < τ_k < T/2`
/// in units of `1/ω`.
pub fn translational_volume(k: u64, omega: f64, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    (k as f64 * (omega * t).ln() - numerics::ln_factorial(k)).exp()
}

/// `F(k) = 2^{(k−1)/2}` orderings of `k` kinks leading from 0 to 1.
pub fn combinatorial_factor(k: u64) -> Result<f64, GasError> {
    if k.is_multiple_of(2) {
        return Err(GasError::EvenK(k));
    }
    Ok(2f64.powi(((k - 1) / 2) as i32))
}

/// `sqrt(3ω/4π) e^{−3ωT/4}`.
pub fn amplitude_prefactor(omega: f64, t: f64) -> f64 {
    (3.0 * omega / (4.0 * PI)).sqrt() * (-0.75 * omega * t).exp()
}

/// Dilute-gas amplitude `⟨1| e^{−HT} |0⟩`.
pub fn amplitude(omega: f64, t: f64, truncation: Truncation) -> Amplitude {
    let pre = amplitude_prefactor(omega, t);
    let x = omega * t * instanton_density(omega);
    if truncation == Truncation::Closed {
        return Amplitude { value: pre * x.sinh(), k_max: None, first_omitted: 0.0 };
    }
    let mut term = x;
    let mut sum = 0.0;
    let mut j = 0usize;
    loop {
        sum += term;
        let k = 2 * j as u64 + 1;
        let next = term * x * x / ((k + 1) as f64 * (k + 2) as f64);
        let done = match truncation {
            Truncation::Terms(max_j) => j >= max_j,
            _ => next < SERIES_RELATIVE_CUTOFF * sum,
        };
        if done {
            return Amplitude { value: pre * sum, k_max: Some(k), first_omitted: pre * next };
        }
        term = next;
        j += 1;
    }
}

/// Levels `3ω/4 − ωd`, `3ω/4`, `3ω/4 + ωd`.
pub fn energy_levels(omega: f64) -> SpectrumTriplet {
    let center = 0.75 * omega;
    let split = omega * instanton_density(omega);
    SpectrumTriplet { e0: center - split, e1: center, e2: center + split }
}

pub fn dilute_gas(omega: f64, reference_t: f64) -> DiluteGasResult {
    let k_max_used = amplitude(omega, reference_t, Truncation::Auto).k_max.unwrap_or(1);
    DiluteGasResult {
        omega,
        density: instanton_density(omega),
        prefactor: (3.0 * omega / (4.0 * PI)).sqrt(),
        energies: energy_levels(omega),
        k_max_used,
    }
}

/// `E₀` and `E₂` recovered from the amplitude alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedLevels {
    pub e0: f64,
    pub e2: f64,
}

/// Two-exponential fit `A(T) = a₀ e^{−E₀T} + a₂ e^{−E₂T}` from four
/// equally spaced samples (linear prediction). The `0 → 1` channel carries
/// no `E₁` component, so only the outer levels are recovered.
pub fn fit_levels(omega: f64) -> FittedLevels {
    let split = omega * instanton_density(omega);
    let dt = 0.5 / split;
    let a: Vec<f64> = (1..=4).map(|k| amplitude(omega, k as f64 * dt, Truncation::Closed).value).collect();
    // [a1 a0; a2 a1] [p; q] = [a2; a3]
    let det = a[1] * a[1] - a[0] * a[2];
    let p = (a[2] * a[1] - a[0] * a[3]) / det;
    let q = (a[1] * a[3] - a[2] * a[2]) / det;
    let disc = (p * p + 4.0 * q).sqrt();
    let z_hi = 0.5 * (p + disc);
    let z_lo = -q / z_hi;
    FittedLevels { e0: -z_hi.ln() / dt, e2: -z_lo.ln() / dt }
}

/// `sqrt(ν/π) (2 sinh νT)^{−1/2}`, the harmonic `⟨0| e^{−HT} |0⟩`.
pub fn harmonic_return_amplitude(nu: f64, t: f64) -> f64 {
    (nu / PI).sqrt() * (2.0 * (nu * t).sinh()).powf(-0.5)
}

/// Large-`T` form `sqrt(ν/π) e^{−νT/2}`.
pub fn harmonic_return_asymptotic(nu: f64, t: f64) -> f64 {
    (nu / PI).sqrt() * (-0.5 * nu * t).exp()
}
