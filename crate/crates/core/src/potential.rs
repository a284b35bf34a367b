//! Potential families used by the pipeline and its cross-checks.
//!
//! The triple well is `V(x) = k ω² x² (x² − 1)²` with `k = 1/2` under the
//! canonical convention and `k = 1/8` under the literal one. The harmonic
//! family is `V = ω² x² / 2` (so `ω` plays the role of the oscillator
//! frequency ν) and the double well is `V = (ω²/8)(x² − 1)²`, normalized so
//! that its well frequency is `ω`.

use serde::{Deserialize, Serialize};

/// Prefactor of the symmetric double well, chosen so that `V''(±1) = ω²`.
pub const DOUBLE_WELL_COEFFICIENT: f64 = 1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TripleWell,
    Harmonic,
    DoubleWell,
}

/// Normalization of the triple-well prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `V = (ω²/2) x² (x² − 1)²`: the normalization under which the kink,
    /// its action ω/4 and the tail rates ω, 2ω are mutually consistent.
    #[default]
    Canonical,
    /// `V = (ω²/8) x² (x² − 1)²`.
    Literal,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Canonical => "canonical",
            Convention::Literal => "literal",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(Convention::Canonical),
            "literal" => Ok(Convention::Literal),
            other => Err(format!("unknown convention `{other}` (expected canonical|literal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    pub omega: f64,
    pub convention: Convention,
}

/// Frequencies `sqrt(V''(m))` at every minimum plus their average over
/// distinct well types (minima related by `x → −x` count once).
#[derive(Debug, Clone, PartialEq)]
pub struct WellFrequencies {
    pub per_minimum: Vec<(f64, f64)>,
    pub average: f64,
}

impl PotentialSpec {
    pub fn new(family: Family, omega: f64, convention: Convention) -> Self {
        assert!(omega > 0.0 && omega.is_finite(), "omega must be positive, got {omega}");
        Self { family, omega, convention }
    }

    pub fn triple_well(omega: f64) -> Self {
        Self::new(Family::TripleWell, omega, Convention::Canonical)
    }

    pub fn harmonic(nu: f64) -> Self {
        Self::new(Family::Harmonic, nu, Convention::Canonical)
    }

    pub fn double_well(omega: f64) -> Self {
        Self::new(Family::DoubleWell, omega, Convention::Canonical)
    }

    fn triple_coefficient(&self) -> f64 {
        match self.convention {
            Convention::Canonical => 0.5,
            Convention::Literal => 0.125,
        }
    }

    /// The ω of the canonical triple well that this spec is equal to.
    ///
    /// `(ω²/8) x²(x²−1)²` is the canonical form with ω/2, so every closed-form
    /// result for the literal convention follows by substitution.
    pub fn effective_omega(&self) -> f64 {
        match (self.family, self.convention) {
            (Family::TripleWell, Convention::Literal) => 0.5 * self.omega,
            _ => self.omega,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let w2 = self.omega * self.omega;
        match self.family {
            Family::TripleWell => {
                let q = x * x - 1.0;
                self.triple_coefficient() * w2 * x * x * q * q
            }
            Family::Harmonic => 0.5 * w2 * x * x,
            Family::DoubleWell => {
                let q = x * x - 1.0;
                DOUBLE_WELL_COEFFICIENT * w2 * q * q
            }
        }
    }

    pub fn first_derivative(&self, x: f64) -> f64 {
        let w2 = self.omega * self.omega;
        match self.family {
            // d/dx [x²(x²−1)²] = 2x(x²−1)(3x²−1)
            Family::TripleWell => {
                self.triple_coefficient() * w2 * 2.0 * x * (x * x - 1.0) * (3.0 * x * x - 1.0)
            }
            Family::Harmonic => w2 * x,
            Family::DoubleWell => DOUBLE_WELL_COEFFICIENT * w2 * 4.0 * x * (x * x - 1.0),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let w2 = self.omega * self.omega;
        let x2 = x * x;
        match self.family {
            // d²/dx² [x⁶ − 2x⁴ + x²] = 30x⁴ − 24x² + 2
            Family::TripleWell => self.triple_coefficient() * w2 * (30.0 * x2 * x2 - 24.0 * x2 + 2.0),
            Family::Harmonic => w2,
            Family::DoubleWell => DOUBLE_WELL_COEFFICIENT * w2 * (12.0 * x2 - 4.0),
        }
    }

    /// `sqrt(2 V(x))`, the speed of a zero-energy euclidean trajectory.
    pub fn bogomolny_speed(&self, x: f64) -> f64 {
        (2.0 * self.evaluate(x)).sqrt()
    }

    pub fn minima(&self) -> Vec<f64> {
        match self.family {
            Family::TripleWell => vec![-1.0, 0.0, 1.0],
            Family::Harmonic => vec![0.0],
            Family::DoubleWell => vec![-1.0, 1.0],
        }
    }

    pub fn is_minimum(&self, x: f64) -> bool {
        self.minima().contains(&x)
    }

    /// `true` when `a` and `b` are distinct minima with no minimum between them.
    pub fn are_adjacent_minima(&self, a: f64, b: f64) -> bool {
        let minima = self.minima();
        let ia = minima.iter().position(|&m| m == a);
        let ib = minima.iter().position(|&m| m == b);
        matches!((ia, ib), (Some(i), Some(j)) if i.abs_diff(j) == 1)
    }

    pub fn well_frequency(&self, minimum: f64) -> f64 {
        self.second_derivative(minimum).sqrt()
    }

    pub fn well_frequencies(&self) -> WellFrequencies {
        let per_minimum: Vec<(f64, f64)> =
            self.minima().into_iter().map(|m| (m, self.well_frequency(m))).collect();
        let mut distinct: Vec<(f64, f64)> = Vec::new();
        for &(m, f) in &per_minimum {
            if !distinct.iter().any(|&(d, _)| d == m.abs()) {
                distinct.push((m.abs(), f));
            }
        }
        let average = distinct.iter().map(|&(_, f)| f).sum::<f64>() / distinct.len() as f64;
        WellFrequencies { per_minimum, average }
    }

    /// Reference frequency ν for the fluctuation determinant ratio.
    pub fn reference_frequency(&self) -> f64 {
        self.well_frequencies().average
    }

    /// Position at which a kink from `a` to `b` is centered.
    ///
    /// For the triple well the tanh structure lives in `x²`, so the center
    /// is where `x²` is halfway between the endpoints; for the double well it
    /// is the plain midpoint.
    pub fn kink_center(&self, a: f64, b: f64) -> f64 {
        match self.family {
            Family::TripleWell => {
                let sign = if a + b >= 0.0 { 1.0 } else { -1.0 };
                sign * (0.5 * (a * a + b * b)).sqrt()
            }
            Family::Harmonic | Family::DoubleWell => 0.5 * (a + b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triple_well_values() {
        let v = PotentialSpec::triple_well(2.0);
        assert_eq!(v.evaluate(0.0), 0.0);
        assert_eq!(v.evaluate(1.0), 0.0);
        assert_eq!(v.evaluate(-1.0), 0.0);
        // (4/2) * 0.25 * 0.5625
        assert_relative_eq!(v.evaluate(0.5), 0.28125, max_relative = 1e-15);
    }

    #[test]
    fn curvature_at_minima() {
        let v = PotentialSpec::triple_well(1.0);
        assert_relative_eq!(v.second_derivative(0.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(v.second_derivative(1.0), 4.0, max_relative = 1e-15);
        let h = PotentialSpec::harmonic(1.7);
        for x in [-2.0, 0.0, 0.3, 5.0] {
            assert_relative_eq!(h.second_derivative(x), 1.7 * 1.7, max_relative = 1e-15);
        }
    }

    #[test]
    fn curvature_matches_central_difference() {
        let v = PotentialSpec::triple_well(1.0);
        let step = 1e-5;
        for x in [0.0, 1.0, 0.37, -0.81] {
            let fd = (v.evaluate(x + step) - 2.0 * v.evaluate(x) + v.evaluate(x - step)) / (step * step);
            assert!((fd - v.second_derivative(x)).abs() < 1e-6, "x={x}: {fd}");
        }
    }

    #[test]
    fn minima_lists() {
        assert_eq!(PotentialSpec::triple_well(1.0).minima(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(PotentialSpec::harmonic(1.0).minima(), vec![0.0]);
        assert_eq!(PotentialSpec::double_well(1.0).minima(), vec![-1.0, 1.0]);
    }

    #[test]
    fn frequencies() {
        let f = PotentialSpec::triple_well(2.0).well_frequencies();
        assert_eq!(f.per_minimum.len(), 3);
        assert_relative_eq!(f.per_minimum[1].1, 2.0, max_relative = 1e-15);
        assert_relative_eq!(f.per_minimum[0].1, 4.0, max_relative = 1e-15);
        assert_relative_eq!(f.per_minimum[2].1, 4.0, max_relative = 1e-15);
        assert_relative_eq!(f.average, 3.0, max_relative = 1e-15);

        let lit = PotentialSpec::new(Family::TripleWell, 2.0, Convention::Literal).well_frequencies();
        assert_relative_eq!(lit.per_minimum[1].1, 1.0, max_relative = 1e-15);
        assert_relative_eq!(lit.per_minimum[2].1, 2.0, max_relative = 1e-15);
        assert_relative_eq!(lit.average, 1.5, max_relative = 1e-15);

        assert_relative_eq!(PotentialSpec::harmonic(0.7).well_frequencies().average, 0.7);
        assert_relative_eq!(PotentialSpec::double_well(3.0).well_frequencies().average, 3.0);
    }

    #[test]
    fn adjacency() {
        let v = PotentialSpec::triple_well(1.0);
        assert!(v.are_adjacent_minima(0.0, 1.0));
        assert!(v.are_adjacent_minima(0.0, -1.0));
        assert!(!v.are_adjacent_minima(-1.0, 1.0));
        assert!(!v.are_adjacent_minima(0.0, 0.5));
        assert!(PotentialSpec::double_well(1.0).are_adjacent_minima(-1.0, 1.0));
    }

    #[test]
    fn kink_centers() {
        let v = PotentialSpec::triple_well(1.0);
        assert_relative_eq!(v.kink_center(0.0, 1.0), 0.5f64.sqrt());
        assert_relative_eq!(v.kink_center(-1.0, 0.0), -(0.5f64.sqrt()));
        assert_eq!(PotentialSpec::double_well(1.0).kink_center(-1.0, 1.0), 0.0);
    }

    #[test]
    fn convention_parse() {
        assert_eq!("literal".parse::<Convention>().unwrap(), Convention::Literal);
        assert!("other".parse::<Convention>().is_err());
    }

    #[test]
    fn literal_is_canonical_with_half_omega() {
        let lit = PotentialSpec::new(Family::TripleWell, 3.0, Convention::Literal);
        let can = PotentialSpec::triple_well(lit.effective_omega());
        for x in [-1.3, -0.2, 0.4, 0.9, 2.0] {
            assert_relative_eq!(lit.evaluate(x), can.evaluate(x), max_relative = 1e-14);
        }
    }
}
