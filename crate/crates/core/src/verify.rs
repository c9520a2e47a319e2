//! Oracle-equivalence checks of the closed-form model against the statevector
//! simulation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analytic::{prob_plus, rho_ab_computational};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::state::{dicke_state, DickeSpec, Outcome, MAX_QUBITS};

/// Entrywise tolerance for every oracle comparison.
pub const ORACLE_TOL: f64 = 1e-12;

/// `ωΔt` values the probability chain is sampled at.
pub const PHASE_GRID: [f64; 6] = [0.0, PI / 7.0, PI / 3.0, PI / 2.0, PI, 1.5 * PI];

/// The closed-form quantities under test.
pub trait AnalyticModel {
    fn pair_state(&self, n: usize, k: usize) -> Result<DensityMatrix<f64>>;
    fn prob_plus(&self, n: usize, k: usize, omega: f64, delta_t: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl AnalyticModel for ClosedForm {
    fn pair_state(&self, n: usize, k: usize) -> Result<DensityMatrix<f64>> {
        rho_ab_computational(n, k)
    }

    fn prob_plus(&self, n: usize, k: usize, omega: f64, delta_t: f64) -> Result<f64> {
        prob_plus(n, k, omega, delta_t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Reduced pair state vs. partial trace.
    PairState,
    /// `P(+ | Alice +)` vs. the prepare/measure/evolve/project pipeline.
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub check: Check,
    pub n: usize,
    pub k: usize,
    /// `ωΔt`, for probability cases.
    pub phase: Option<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub max_n: usize,
    pub tolerance: f64,
    pub cases: Vec<CaseReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CaseReport> {
        self.cases.iter().find(|c| !c.passed)
    }

    pub fn worst(&self, check: Check) -> f64 {
        self.cases
            .iter()
            .filter(|c| c.check == check)
            .map(|c| c.max_deviation)
            .fold(0.0, f64::max)
    }
}

/// `P(Bob + | Alice +)` by direct statevector simulation: rotate and project
/// Alice (qubit 0), evolve Bob (qubit 1) for `delta_t`, rotate him and read
/// the `+` probability.
pub fn pipeline_prob_plus(n: usize, k: usize, omega: f64, delta_t: f64) -> Result<f64> {
    let psi = dicke_state::<f64>(DickeSpec::new(n, k)?)?;
    let (_, after_alice) = psi
        .rotate_to_measurement_basis(0)?
        .project(0, Outcome::ZeroOrPlus)?;
    after_alice
        .evolve_qubit(1, delta_t, omega)?
        .rotate_to_measurement_basis(1)?
        .probability(1, Outcome::ZeroOrPlus)
}

/// Runs both oracle suites for every `2 ≤ n ≤ max_n` and `0 ≤ k ≤ n`.
pub fn verify_oracles_with(max_n: usize, model: &dyn AnalyticModel) -> Result<VerifyReport> {
    if max_n < 2 {
        return Err(Error::TooFewParties(max_n));
    }
    if max_n > MAX_QUBITS {
        return Err(Error::Capacity {
            n: max_n,
            cap: MAX_QUBITS,
        });
    }
    let mut cases = Vec::new();
    for n in 2..=max_n {
        for k in 0..=n {
            let psi = dicke_state::<f64>(DickeSpec::new(n, k)?)?;
            let analytic = model.pair_state(n, k)?;
            let dev = [(0, 1), (n - 1, 0)]
                .into_iter()
                .map(|(a, b)| {
                    psi.partial_trace_pair(a, b)
                        .map(|o| o.max_abs_diff(&analytic))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            cases.push(CaseReport {
                check: Check::PairState,
                n,
                k,
                phase: None,
                max_deviation: dev,
                passed: dev <= ORACLE_TOL,
            });
            for phase in PHASE_GRID {
                let oracle = pipeline_prob_plus(n, k, 1.0, phase)?;
                let dev = (model.prob_plus(n, k, 1.0, phase)? - oracle).abs();
                cases.push(CaseReport {
                    check: Check::Probability,
                    n,
                    k,
                    phase: Some(phase),
                    max_deviation: dev,
                    passed: dev <= ORACLE_TOL,
                });
            }
        }
    }
    Ok(VerifyReport {
        max_n,
        tolerance: ORACLE_TOL,
        cases,
    })
}

pub fn verify_oracles(max_n: usize) -> Result<VerifyReport> {
    verify_oracles_with(max_n, &ClosedForm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Basis;
    use num_complex::Complex64;

    struct Skewed;

    impl AnalyticModel for Skewed {
        fn pair_state(&self, n: usize, k: usize) -> Result<DensityMatrix<f64>> {
            let rho = rho_ab_computational::<f64>(n, k)?;
            if (n, k) != (4, 2) {
                return Ok(rho);
            }
            let mut e = rho.entries().to_vec();
            e[5] += Complex64::new(1e-6, 0.0);
            DensityMatrix::from_entries(4, Basis::Computational, e)
        }

        fn prob_plus(&self, n: usize, k: usize, omega: f64, delta_t: f64) -> Result<f64> {
            prob_plus(n, k, omega, delta_t)
        }
    }

    #[test]
    fn closed_form_passes_up_to_six() {
        let r = verify_oracles(6).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
        assert_eq!(r.cases.len(), (2..=6).map(|n| (n + 1) * 7).sum::<usize>());
    }

    #[test]
    fn corrupted_coefficient_is_named() {
        let r = verify_oracles_with(6, &Skewed).unwrap();
        let f = r.first_failure().unwrap();
        assert_eq!((f.check, f.n, f.k), (Check::PairState, 4, 2));
    }

    #[test]
    fn range_errors() {
        assert!(verify_oracles(1).is_err());
        assert!(verify_oracles(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn pipeline_reproduces_w_state_law() {
        for n in 2..=6 {
            let p = pipeline_prob_plus(n, 1, 2.0, 0.3).unwrap();
            assert!((p - (0.5 + (0.6f64).cos() / n as f64)).abs() < 1e-12);
        }
    }
}
