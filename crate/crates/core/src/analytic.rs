//! Closed-form two-party statistics of a Dicke state.
//!
//! Any two qubits `A`, `B` of `|D(n, k)⟩` share the reduced state
//!
//! ```text
//!              1      ⎡ (n−k)(n−k−1)     0        0        0    ⎤
//! ρ_AB  =  ───────── ⎢      0        k(n−k)   k(n−k)      0    ⎥
//!           n(n−1)    ⎢      0        k(n−k)   k(n−k)      0    ⎥
//!                     ⎣      0           0        0     k(k−1)  ⎦
//! ```
//!
//! The coherence `⟨01|ρ|10⟩ = k(n−k)/(n(n−1))` is the amplitude `A₀(k, n)` of
//! the `cos(ωΔt)` oscillation Bob sees after Alice reads `|+⟩`:
//! `P(+) = 1/2 + A₀·cos(ωΔt)`.
//!
//! All numerators and denominators are formed in `u64` and divided once.

use num_complex::Complex;
use num_rational::Ratio;
use serde::Serialize;

use crate::density::{Basis, DensityMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::Sign;

fn check_parties(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewParties(n));
    }
    if k > n {
        return Err(Error::InvalidSpec { n, k });
    }
    Ok(())
}

/// Integer numerators of the reduced pair state over the common denominator
/// `n(n−1)`: `[|00⟩⟨00|, |01⟩⟨01| (= coherence), |11⟩⟨11|, denominator]`.
pub fn pair_numerators(n: u64, k: u64) -> [u64; 4] {
    let both_ground = (n - k) * (n - k).saturating_sub(1);
    let mixed = k * (n - k);
    let both_excited = k * k.saturating_sub(1);
    [both_ground, mixed, both_excited, n * (n - 1)]
}

/// Reduced density matrix of any two qubits of `|D(n, k)⟩` in the
/// computational basis.
pub fn rho_ab_computational<T: Real>(n: usize, k: usize) -> Result<DensityMatrix<T>> {
    check_parties(n, k)?;
    let [g, m, e, den] = pair_numerators(n as u64, k as u64);
    let (g, m, e) = (T::ratio(g, den), T::ratio(m, den), T::ratio(e, den));
    let z = T::zero();
    DensityMatrix::from_real_rows(
        Basis::Computational,
        [[g, z, z, z], [z, m, m, z], [z, m, m, z], [z, z, z, e]],
    )
}

/// `H ⊗ H`, row-major. Real, symmetric and self-inverse.
fn hadamard_pair<T: Real>() -> Vec<Complex<T>> {
    let half = T::lit(0.5);
    let sign = |r: usize, c: usize| {
        if (r & c).count_ones().is_multiple_of(2) {
            half
        } else {
            -half
        }
    };
    (0..16)
        .map(|i| Complex::new(sign(i / 4, i % 4), T::zero()))
        .collect()
}

/// Re-expresses a two-qubit density matrix in the other single-qubit basis on
/// both slots. Computational input yields the `±` representation and vice
/// versa, so applying it twice is the identity.
pub fn rho_ab_measurement<T: Real>(rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho.dim() != 4 {
        return Err(Error::MalformedMatrix(format!(
            "expected a 4x4 two-qubit matrix, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(rho
        .conjugate(&hadamard_pair())?
        .with_basis(rho.basis().other()))
}

/// Lets Bob's qubit (right label) evolve for `delta_t`: conjugation by
/// `I ⊗ diag(1, e^{−iωΔt})`. The input must be in the computational basis.
pub fn evolve_bob<T: Real>(
    rho: &DensityMatrix<T>,
    omega: T,
    delta_t: T,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != 4 || rho.basis() != Basis::Computational {
        return Err(Error::MalformedMatrix(
            "phase evolution expects a 4x4 computational-basis matrix".into(),
        ));
    }
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let phase = Complex::from_polar(T::one(), -(omega * delta_t));
    let u = vec![
        one, z, z, z, //
        z, phase, z, z, //
        z, z, one, z, //
        z, z, z, phase,
    ];
    rho.conjugate(&u)
}

/// Bob's state after Alice (left label) announced `alice`: project her slot,
/// renormalize, trace her out. Input must be in the `±` basis.
pub fn bob_conditional_density<T: Real>(
    rho_m: &DensityMatrix<T>,
    alice: Sign,
) -> Result<DensityMatrix<T>> {
    if rho_m.dim() != 4 || rho_m.basis() != Basis::PlusMinus {
        return Err(Error::MalformedMatrix(
            "conditioning expects a 4x4 matrix in the ± basis".into(),
        ));
    }
    let a = match alice {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    let block = |b: usize, b2: usize| rho_m.get(2 * a + b, 2 * a + b2);
    let p = (block(0, 0) + block(1, 1)).re;
    let p64 = p.to_f64().unwrap_or(0.0);
    if p64 <= 1e-15 {
        return Err(Error::ZeroProbability(p64));
    }
    let entries = vec![
        block(0, 0) / p,
        block(0, 1) / p,
        block(1, 0) / p,
        block(1, 1) / p,
    ];
    DensityMatrix::from_entries(2, Basis::PlusMinus, entries)
}

/// `P(Bob reads + | Alice read +) = 1/2 + A₀(k, n)·cos(ωΔt)`.
pub fn prob_plus<T: Real>(n: usize, k: usize, omega: T, delta_t: T) -> Result<T> {
    conditional_prob_plus(n, k, omega, delta_t, Sign::Plus)
}

/// `P(Bob reads + | Alice read alice)`; the `−` branch flips the sign of the
/// oscillation.
pub fn conditional_prob_plus<T: Real>(
    n: usize,
    k: usize,
    omega: T,
    delta_t: T,
    alice: Sign,
) -> Result<T> {
    let a0 = amplitude::<T>(k, n)?.value;
    let swing = a0 * (omega * delta_t).cos();
    let half = T::lit(0.5);
    Ok(match alice {
        Sign::Plus => half + swing,
        Sign::Minus => half - swing,
    })
}

/// Oscillation amplitude `A₀(k, n) = k(n−k) / (n(n−1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitude<T: Real> {
    pub value: T,
    pub k: usize,
    pub n: usize,
}

impl<T: Real> Amplitude<T> {
    pub fn exact(&self) -> Ratio<u64> {
        amplitude_exact(self.k, self.n).expect("validated on construction")
    }
}

pub fn amplitude<T: Real>(k: usize, n: usize) -> Result<Amplitude<T>> {
    check_parties(n, k)?;
    let [_, num, _, den] = pair_numerators(n as u64, k as u64);
    Ok(Amplitude {
        value: T::ratio(num, den),
        k,
        n,
    })
}

/// `A₀(k, n)` as a reduced fraction.
pub fn amplitude_exact(k: usize, n: usize) -> Result<Ratio<u64>> {
    check_parties(n, k)?;
    let [_, num, _, den] = pair_numerators(n as u64, k as u64);
    Ok(Ratio::new(num, den))
}

/// Excitation count maximizing `A₀(·, n)`: `⌊n/2⌋`. For odd `n` the
/// mirror `⌈n/2⌉` ties; the floor is returned.
pub fn k_opt(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::TooFewParties(n));
    }
    Ok(n / 2)
}

/// `A₀(k_opt, n) = ⌊n/2⌋·⌈n/2⌉ / (n(n−1))`, which tends to 1/4.
pub fn a0_opt<T: Real>(n: usize) -> Result<T> {
    Ok(amplitude::<T>(k_opt(n)?, n)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{dicke_state, DickeSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    fn assert_rows(rho: &DensityMatrix<f64>, scale: f64, rows: [[f64; 4]; 4]) {
        for (r, row) in rows.iter().enumerate() {
            for (c, want) in row.iter().enumerate() {
                assert_abs_diff_eq!(rho.get(r, c).re, want * scale, epsilon = TOL);
                assert_abs_diff_eq!(rho.get(r, c).im, 0.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn pair_state_small_cases() {
        let rho = rho_ab_computational::<f64>(3, 1).unwrap();
        assert_rows(
            &rho,
            1.0 / 6.0,
            [
                [2., 0., 0., 0.],
                [0., 2., 2., 0.],
                [0., 2., 2., 0.],
                [0., 0., 0., 0.],
            ],
        );
        let rho = rho_ab_computational::<f64>(2, 1).unwrap();
        assert_rows(
            &rho,
            0.5,
            [
                [0., 0., 0., 0.],
                [0., 1., 1., 0.],
                [0., 1., 1., 0.],
                [0., 0., 0., 0.],
            ],
        );
        assert!(matches!(
            rho_ab_computational::<f64>(1, 0),
            Err(Error::TooFewParties(1))
        ));
        assert!(matches!(
            rho_ab_computational::<f64>(4, 5),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn pair_state_matches_partial_trace_n7_k3() {
        let analytic = rho_ab_computational::<f64>(7, 3).unwrap();
        let oracle = dicke_state::<f64>(DickeSpec::new(7, 3).unwrap())
            .unwrap()
            .partial_trace_pair(0, 1)
            .unwrap();
        assert!(analytic.max_abs_diff(&oracle) < TOL);
    }

    #[test]
    fn trace_identity_exhaustive_small_n() {
        for n in 2..=2000u64 {
            for k in 0..=n {
                let [g, m, e, den] = pair_numerators(n, k);
                assert_eq!(g + 2 * m + e, den, "n={n} k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn trace_identity_up_to_a_million(n in 2u64..=1_000_000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let [g, m, e, den] = pair_numerators(n, k.min(n));
            prop_assert_eq!(g + 2 * m + e, den);
        }

        #[test]
        fn amplitude_symmetric_in_k(n in 2usize..5000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as usize;
            let a = amplitude::<f64>(k, n).unwrap().value;
            let b = amplitude::<f64>(n - k, n).unwrap().value;
            prop_assert_eq!(a, b);
            prop_assert!(a >= 0.0 && a <= 0.25 * n as f64 / (n as f64 - 1.0));
        }
    }

    #[test]
    fn measurement_basis_of_product_and_mixed_states() {
        let mut ground = vec![Complex::new(0.0, 0.0); 16];
        ground[0] = Complex::new(1.0, 0.0);
        let rho = DensityMatrix::from_entries(4, Basis::Computational, ground).unwrap();
        let m = rho_ab_measurement(&rho).unwrap();
        assert_eq!(m.basis(), Basis::PlusMinus);
        assert!(m
            .entries()
            .iter()
            .all(|z| (z - Complex::new(0.25, 0.0)).norm() < TOL));

        let mixed = DensityMatrix::<f64>::maximally_mixed(4, Basis::Computational).unwrap();
        let m = rho_ab_measurement(&mixed).unwrap();
        assert!(m.max_abs_diff(&mixed) < TOL);
    }

    #[test]
    fn measurement_transform_is_an_involution() {
        let rho = rho_ab_computational::<f64>(6, 2).unwrap();
        let back = rho_ab_measurement(&rho_ab_measurement(&rho).unwrap()).unwrap();
        assert_eq!(back.basis(), Basis::Computational);
        assert!(back.max_abs_diff(&rho) < TOL);
        rho_ab_measurement(&rho)
            .unwrap()
            .validate(1e-12, 1e-10)
            .unwrap();
    }

    #[test]
    fn measurement_transform_rejects_single_qubit_input() {
        let one = DensityMatrix::<f64>::maximally_mixed(2, Basis::Computational).unwrap();
        assert!(rho_ab_measurement(&one).is_err());
    }

    #[test]
    fn measurement_transform_matches_rotated_statevector() {
        let psi = dicke_state::<f64>(DickeSpec::new(5, 2).unwrap()).unwrap();
        let rotated = psi
            .rotate_to_measurement_basis(0)
            .unwrap()
            .rotate_to_measurement_basis(1)
            .unwrap();
        let oracle = rotated.partial_trace_pair(0, 1).unwrap();
        let analytic = rho_ab_measurement(&rho_ab_computational::<f64>(5, 2).unwrap()).unwrap();
        assert!(analytic.max_abs_diff(&oracle) < TOL);
    }

    #[test]
    fn bell_pair_conditions_bob_onto_plus() {
        let rho_m = rho_ab_measurement(&rho_ab_computational::<f64>(2, 1).unwrap()).unwrap();
        let bob = bob_conditional_density(&rho_m, Sign::Plus).unwrap();
        assert_abs_diff_eq!(bob.get(0, 0).re, 1.0, epsilon = TOL);
        bob.validate(1e-12, 1e-10).unwrap();
    }

    #[test]
    fn uncorrelated_input_leaves_bob_mixed() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(4, Basis::PlusMinus).unwrap();
        let half = DensityMatrix::<f64>::maximally_mixed(2, Basis::PlusMinus).unwrap();
        for s in [Sign::Plus, Sign::Minus] {
            assert!(
                bob_conditional_density(&mixed, s)
                    .unwrap()
                    .max_abs_diff(&half)
                    < TOL
            );
        }
    }

    #[test]
    fn conditioning_on_impossible_outcome_is_rejected() {
        // |00⟩ in the ± frame is |++⟩: Alice can never read −.
        let mut e = vec![Complex::new(0.0, 0.0); 16];
        e[0] = Complex::new(1.0, 0.0);
        let rho = DensityMatrix::from_entries(4, Basis::PlusMinus, e).unwrap();
        assert!(matches!(
            bob_conditional_density(&rho, Sign::Minus),
            Err(Error::ZeroProbability(_))
        ));
        let comp = DensityMatrix::<f64>::maximally_mixed(4, Basis::Computational).unwrap();
        assert!(bob_conditional_density(&comp, Sign::Plus).is_err());
    }

    #[test]
    fn density_chain_matches_closed_form_n5_k2() {
        let rho_c = rho_ab_computational::<f64>(5, 2).unwrap();
        for phi in [0.0, PI / 7.0, PI / 3.0, PI / 2.0, PI, 1.5 * PI] {
            let evolved = evolve_bob(&rho_c, 1.0, phi).unwrap();
            let rho_m = rho_ab_measurement(&evolved).unwrap();
            for alice in [Sign::Plus, Sign::Minus] {
                let bob = bob_conditional_density(&rho_m, alice).unwrap();
                let want = conditional_prob_plus(5, 2, 1.0, phi, alice).unwrap();
                assert_abs_diff_eq!(bob.get(0, 0).re, want, epsilon = TOL);
            }
        }
    }

    #[test]
    fn probability_examples() {
        assert_abs_diff_eq!(
            prob_plus::<f64>(2, 1, 1.0, 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            prob_plus::<f64>(4, 2, 1.0, PI).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        for n in 2..50 {
            for dt in [0.0, 0.4, 1.9, 3.0] {
                let p = prob_plus::<f64>(n, 1, 1.3, dt).unwrap();
                assert_abs_diff_eq!(p, 0.5 + (1.3 * dt).cos() / n as f64, epsilon = 1e-15);
            }
        }
        assert!(prob_plus::<f64>(1, 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn amplitude_examples() {
        for n in 2..200 {
            assert_eq!(amplitude::<f64>(1, n).unwrap().value, 1.0 / n as f64);
            assert_eq!(amplitude::<f64>(0, n).unwrap().value, 0.0);
        }
        assert_abs_diff_eq!(
            amplitude::<f64>(2, 4).unwrap().value,
            1.0 / 3.0,
            epsilon = 1e-16
        );
        assert_eq!(amplitude::<f64>(2, 4).unwrap().exact(), Ratio::new(1, 3));
        assert!(amplitude::<f64>(0, 1).is_err());
    }

    #[test]
    fn optimizer_examples() {
        assert_eq!(k_opt(4).unwrap(), 2);
        assert_eq!(k_opt(5).unwrap(), 2);
        assert_eq!(
            amplitude_exact(2, 5).unwrap(),
            amplitude_exact(3, 5).unwrap()
        );
        assert!(k_opt(1).is_err());
        assert_abs_diff_eq!(a0_opt::<f64>(2).unwrap(), 0.5);
        assert_abs_diff_eq!(a0_opt::<f64>(4).unwrap(), 1.0 / 3.0, epsilon = 1e-16);
        assert!(a0_opt::<f64>(4).unwrap() > amplitude::<f64>(1, 4).unwrap().value);
        // odd n uses ⌊n/2⌋⌈n/2⌉: 2·3/20 at n = 5
        assert_eq!(
            amplitude_exact(k_opt(5).unwrap(), 5).unwrap(),
            Ratio::new(6, 20)
        );
        assert!((a0_opt::<f64>(1000).unwrap() - 0.25).abs() < 2.6e-4);
    }

    #[test]
    fn k_opt_is_exhaustive_argmax() {
        for n in 2..=1000usize {
            let best = (0..=n)
                .map(|k| amplitude_exact(k, n).unwrap())
                .max()
                .unwrap();
            assert_eq!(
                amplitude_exact(k_opt(n).unwrap(), n).unwrap(),
                best,
                "n={n}"
            );
        }
    }

    #[test]
    fn single_precision_agrees() {
        let a = rho_ab_computational::<f32>(6, 3).unwrap();
        let b = rho_ab_computational::<f64>(6, 3).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert!((x.re as f64 - y.re).abs() < 1e-7);
        }
        assert!(
            (prob_plus::<f32>(6, 3, 1.0, 0.7).unwrap() as f64
                - prob_plus::<f64>(6, 3, 1.0, 0.7).unwrap())
            .abs()
                < 1e-6
        );
    }
}
