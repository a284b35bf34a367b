use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triplewell::dilute_gas::{self, Truncation};

/// Monte Carlo estimate of the ordered-center volume `(ωT)^k / k!`.
fn simplex_volume(k: usize, omega: f64, t: f64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64 + 17);
    let mut hits = 0usize;
    let mut centers = vec![0.0; k];
    for _ in 0..samples {
        for c in centers.iter_mut() {
            *c = rng.gen_range(-0.5 * t..0.5 * t);
        }
        if centers.windows(2).all(|w| w[0] < w[1]) {
            hits += 1;
        }
    }
    (omega * t).powi(k as i32) * hits as f64 / samples as f64
}

#[test]
fn translational_volume_matches_monte_carlo() {
    for (k, omega, t) in [(1, 2.0, 1.5), (2, 1.0, 3.0), (3, 4.0, 0.7), (4, 1.5, 2.0)] {
        let exact = dilute_gas::translational_volume(k, omega, t);
        let mc = simplex_volume(k as usize, omega, t, 400_000);
        assert!(((mc - exact) / exact).abs() < 0.01, "k={k}: {mc} vs {exact}");
    }
}

#[test]
fn walks_over_adjacent_minima() {
    fn walks(pos: i32, left: u32) -> u64 {
        if left == 0 {
            return u64::from(pos == 1);
        }
        [pos - 1, pos + 1].into_iter().filter(|n| n.abs() <= 1).map(|n| walks(n, left - 1)).sum()
    }
    for k in (1..=11u32).step_by(2) {
        assert_eq!(dilute_gas::combinatorial_factor(u64::from(k)).unwrap(), walks(0, k) as f64);
    }
    for k in (0..=10u32).step_by(2) {
        assert_eq!(walks(0, k), 0);
        assert!(dilute_gas::combinatorial_factor(u64::from(k)).is_err());
    }
}

#[test]
fn truncated_sum_rebuilds_from_gas_weights() {
    // Σ_k F(k) (ωT)^k/k! d₁^k with d₁ = d/√2, times the √2 folded into the prefactor
    let (omega, t) = (3.0, 2.0);
    let d1 = dilute_gas::single_kink_density(omega);
    let sum: f64 = (1..=41u64)
        .step_by(2)
        .map(|k| {
            dilute_gas::combinatorial_factor(k).unwrap()
                * dilute_gas::translational_volume(k, omega, t)
                * d1.powi(k as i32)
        })
        .sum();
    let direct = std::f64::consts::SQRT_2 * sum * dilute_gas::amplitude_prefactor(omega, t);
    let closed = dilute_gas::amplitude(omega, t, Truncation::Closed).value;
    assert!(((direct - closed) / closed).abs() < 1e-13);
}

#[test]
fn amplitude_spot_value() {
    let d = dilute_gas::instanton_density(4.0);
    let expected = (3.0 / std::f64::consts::PI).sqrt() * (-6.0f64).exp() * (8.0 * d).sinh();
    let got = dilute_gas::amplitude(4.0, 2.0, Truncation::Closed).value;
    assert!(((got - expected) / expected).abs() < 1e-14);
    // independent extended-precision evaluation
    assert!((got - 0.018148650492354626).abs() < 1e-16, "{got}");
}

#[test]
fn levels_stay_ordered() {
    for i in 1..400 {
        let omega = 0.05 * i as f64;
        assert!(dilute_gas::energy_levels(omega).is_ordered(), "{omega}");
    }
}

#[test]
fn harmonic_prefactor_large_time() {
    for omega in [1.0, 2.0, 5.0] {
        let nu = 1.5 * omega;
        for t in [10.0 / omega, 14.0 / omega] {
            let exact = dilute_gas::harmonic_return_amplitude(nu, t);
            let asym = dilute_gas::harmonic_return_asymptotic(nu, t);
            let predicted = 0.5 * (-3.0 * omega * t).exp();
            let err = exact / asym - 1.0;
            assert!((err - predicted).abs() < 1e-3 * predicted + 1e-15, "{omega} {t}: {err} vs {predicted}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn series_matches_closed_form(omega in 0.5f64..8.0, t in 0.1f64..4.0) {
        let closed = dilute_gas::amplitude(omega, t, Truncation::Closed).value;
        let auto = dilute_gas::amplitude(omega, t, Truncation::Auto);
        prop_assert!((closed - auto.value).abs() <= auto.first_omitted + 4.0 * f64::EPSILON * closed);
        let short = dilute_gas::amplitude(omega, t, Truncation::Terms(0));
        prop_assert!(closed - short.value >= short.first_omitted * (1.0 - 1e-12));
    }
}
