//! Batch experiments: amplitude tables, the large-n limit, and Monte Carlo
//! accuracy sweeps comparing excitation-count policies.
//!
//! Accuracy is reported two ways and kept in separate columns: the analytic
//! oscillation amplitude `A₀` and the empirical RMSE of the skew estimates.

use serde::{Deserialize, Serialize};

use crate::analytic::{a0_opt, amplitude, k_opt, prob_plus};
use crate::error::{Error, Result};
use crate::protocol::{invert_probability, run_protocol, ProtocolConfig};

/// Largest party count a Monte Carlo sweep will simulate.
pub const SWEEP_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub n: usize,
    pub k_opt: usize,
    /// `A₀(1, n)`, the W-state amplitude.
    pub a0_w: f64,
    pub a0_opt: f64,
    pub ratio: f64,
}

pub fn amplitude_table(n_min: usize, n_max: usize) -> Result<Vec<AmplitudeRow>> {
    if n_min < 2 {
        return Err(Error::TooFewParties(n_min));
    }
    if n_min > n_max {
        return Err(Error::config(
            "n_max",
            format!("range {n_min}..={n_max} is empty"),
        ));
    }
    (n_min..=n_max)
        .map(|n| {
            let a0_w = amplitude::<f64>(1, n)?.value;
            let a0_opt = a0_opt::<f64>(n)?;
            Ok(AmplitudeRow {
                n,
                k_opt: k_opt(n)?,
                a0_w,
                a0_opt,
                ratio: a0_opt / a0_w,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub n: usize,
    pub a0_opt: f64,
    /// `|A₀(k_opt, n) − 1/4|`
    pub gap: f64,
    /// `1 / (2(n − 1))`
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// Roughly log-spaced sample of the approach to 1/4.
    pub points: Vec<LimitPoint>,
    /// Every even n in `[4, n_max]` has a strictly smaller gap than the previous even n.
    pub even_gap_decreasing: bool,
    /// `a0_opt` stays above 1/4 and decreases over even n.
    pub even_from_above: bool,
    /// Every n in `[4, n_max]` satisfies `gap ≤ bound`.
    pub within_bound: bool,
}

impl LimitReport {
    pub fn passed(&self) -> bool {
        self.even_gap_decreasing && self.even_from_above && self.within_bound
    }
}

fn limit_point(n: usize) -> Result<LimitPoint> {
    let a0 = a0_opt::<f64>(n)?;
    Ok(LimitPoint {
        n,
        a0_opt: a0,
        gap: (a0 - 0.25).abs(),
        bound: 1.0 / (2.0 * (n as f64 - 1.0)),
    })
}

pub fn limit_check(n_max: usize) -> Result<LimitReport> {
    if n_max < 4 {
        return Err(Error::config(
            "n_max",
            format!("need n_max >= 4, got {n_max}"),
        ));
    }
    let mut schedule = vec![4usize];
    let mut x = 4.0f64;
    loop {
        x *= 10f64.powf(0.25);
        let n = x.round() as usize;
        if n >= n_max {
            break;
        }
        if n > *schedule.last().unwrap() {
            schedule.push(n);
        }
    }
    if *schedule.last().unwrap() != n_max {
        schedule.push(n_max);
    }
    let points = schedule
        .into_iter()
        .map(limit_point)
        .collect::<Result<Vec<_>>>()?;

    let mut even_gap_decreasing = true;
    let mut even_from_above = true;
    let mut within_bound = true;
    let mut prev: Option<LimitPoint> = None;
    for n in 4..=n_max {
        let p = limit_point(n)?;
        within_bound &= p.gap <= p.bound;
        if n % 2 == 0 {
            even_from_above &= p.a0_opt > 0.25;
            if let Some(q) = prev {
                even_gap_decreasing &= p.gap < q.gap;
                even_from_above &= p.a0_opt < q.a0_opt;
            }
            prev = Some(p);
        }
    }
    Ok(LimitReport {
        points,
        even_gap_decreasing,
        even_from_above,
        within_bound,
    })
}

/// How a sweep picks the excitation count for each n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KPolicy {
    Fixed(usize),
    WState,
    Optimal,
}

impl KPolicy {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            KPolicy::Fixed(k) => Ok(k),
            KPolicy::WState => Ok(1),
            KPolicy::Optimal => k_opt(n),
        }
    }

    pub fn label(self) -> String {
        match self {
            KPolicy::Fixed(k) => format!("fixed_{k}"),
            KPolicy::WState => "w_state".into(),
            KPolicy::Optimal => "optimal".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    pub policies: Vec<KPolicy>,
    #[serde(default = "unit_omega")]
    pub omega: f64,
    pub skew_grid: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    /// Feed analytic probabilities to the estimator instead of simulating.
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub use_minus_rounds: bool,
}

fn unit_omega() -> f64 {
    1.0
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::config("n_values", "must not be empty"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "must not be empty"));
        }
        if self.skew_grid.is_empty() {
            return Err(Error::config("skew_grid", "must not be empty"));
        }
        if self.shots == 0 {
            return Err(Error::config("shots", "must be at least 1"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::config(
                "omega",
                "must be a positive finite angular frequency",
            ));
        }
        for (i, &s) in self.skew_grid.iter().enumerate() {
            if !s.is_finite() || (self.omega * s).abs() >= std::f64::consts::PI {
                return Err(Error::config(
                    format!("skew_grid[{i}]"),
                    "|omega*skew| must lie in [0, pi)",
                ));
            }
        }
        for (i, &n) in self.n_values.iter().enumerate() {
            if n < 2 {
                return Err(Error::config(
                    format!("n_values[{i}]"),
                    format!("n = {n} is below 2"),
                ));
            }
            if !self.exact && n > SWEEP_MAX_N {
                return Err(Error::Capacity {
                    n,
                    cap: SWEEP_MAX_N,
                });
            }
            for p in &self.policies {
                let k = p.resolve(n)?;
                if k == 0 || k >= n {
                    return Err(Error::ZeroAmplitude { n, k });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub policy: String,
    pub k: usize,
    pub a0: f64,
    pub skew: f64,
    pub p_analytic: f64,
    pub p_hat: f64,
    pub abs_err: f64,
    /// RMSE of the skew estimates over the whole grid for this `(n, policy)`.
    pub rmse: f64,
}

/// SplitMix64 finalizer over `seed` and the cell coordinates.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    let mut z = seed;
    for &c in coords {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(c);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Runs the protocol for every `(n, policy, skew)` cell and estimates the
/// skew from the conditional frequencies pooled over all Bobs (they share the
/// cell's skew). Both policies at the same `(n, skew)` use the same seed.
pub fn accuracy_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &n in &spec.n_values {
        for &policy in &spec.policies {
            let k = policy.resolve(n)?;
            let a0 = amplitude::<f64>(k, n)?.value;
            let start = rows.len();
            for (i, &skew) in spec.skew_grid.iter().enumerate() {
                let p_analytic = prob_plus(n, k, spec.omega, skew)?;
                let p_hat = if spec.exact {
                    p_analytic
                } else {
                    let config = ProtocolConfig {
                        n,
                        k,
                        omega: spec.omega,
                        skews: vec![skew; n - 1],
                        shots: spec.shots,
                        seed: derive_seed(spec.seed, &[n as u64, i as u64]),
                        use_minus_rounds: spec.use_minus_rounds,
                    };
                    let tally = run_protocol(&config)?;
                    let (hits, total) = tally.parties.iter().fold((0u64, 0u64), |(h, t), p| {
                        if spec.use_minus_rounds {
                            (
                                h + p.after_plus.plus + p.after_minus.minus,
                                t + p.after_plus.total() + p.after_minus.total(),
                            )
                        } else {
                            (h + p.after_plus.plus, t + p.after_plus.total())
                        }
                    });
                    if total == 0 {
                        return Err(Error::EmptyTally(1));
                    }
                    hits as f64 / total as f64
                };
                let (_, estimate) = invert_probability(p_hat, a0, spec.omega);
                rows.push(SweepRow {
                    n,
                    policy: policy.label(),
                    k,
                    a0,
                    skew,
                    p_analytic,
                    p_hat,
                    abs_err: (estimate - skew.abs()).abs(),
                    rmse: 0.0,
                });
            }
            let group = &mut rows[start..];
            let mse = group.iter().map(|r| r.abs_err * r.abs_err).sum::<f64>() / group.len() as f64;
            let rmse = mse.sqrt();
            group.iter_mut().for_each(|r| r.rmse = rmse);
        }
    }
    Ok(rows)
}

/// One `(n, policy)` group of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub policy: String,
    pub k: usize,
    pub a0: f64,
    pub rmse: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut out: Vec<SweepSummary> = Vec::new();
    for r in rows {
        if out
            .last()
            .is_some_and(|s| s.n == r.n && s.policy == r.policy)
        {
            continue;
        }
        out.push(SweepSummary {
            n: r.n,
            policy: r.policy.clone(),
            k: r.k,
            a0: r.a0,
            rmse: r.rmse,
        });
    }
    out
}

/// `count` evenly spaced points over `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let rows = amplitude_table(2, 10).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(
            (rows[0].a0_w, rows[0].a0_opt, rows[0].ratio),
            (0.5, 0.5, 1.0)
        );
        let r4 = rows[2];
        assert_eq!(r4.n, 4);
        assert_eq!(r4.k_opt, 2);
        assert_eq!(r4.a0_w, 0.25);
        assert!((r4.a0_opt - 1.0 / 3.0).abs() < 1e-16);
        assert!((r4.ratio - 4.0 / 3.0).abs() < 1e-15);
        assert!(amplitude_table(10, 2).is_err());
        assert!(amplitude_table(1, 2).is_err());
    }

    #[test]
    fn table_n100() {
        let r = amplitude_table(100, 100).unwrap()[0];
        assert_eq!(r.a0_opt, 2500.0 / 9900.0);
        assert!((r.ratio - 25.252525252525).abs() < 1e-9);
    }

    #[test]
    fn limit_examples() {
        let report = limit_check(1000).unwrap();
        assert!(report.passed());
        assert_eq!(report.points.first().unwrap().n, 4);
        assert_eq!(report.points.last().unwrap().n, 1000);
        let p10 = limit_point(10).unwrap();
        assert!((p10.gap - 1.0 / 36.0).abs() < 1e-15);
        let p1000 = limit_point(1000).unwrap();
        assert!((p1000.gap - (250000.0 / 999000.0 - 0.25)).abs() < 1e-15);
        assert!(limit_check(3).is_err());
    }

    #[test]
    fn policies_resolve() {
        assert_eq!(KPolicy::Optimal.resolve(7).unwrap(), 3);
        assert_eq!(KPolicy::WState.resolve(7).unwrap(), 1);
        assert_eq!(KPolicy::Fixed(2).resolve(7).unwrap(), 2);
        let spec: SweepSpec = serde_json::from_str(
            r#"{"n_values":[4],"policies":["w_state",{"fixed":2},"optimal"],"skew_grid":[0.5],"shots":10,"seed":1}"#,
        )
        .unwrap();
        assert_eq!(
            spec.policies,
            vec![KPolicy::WState, KPolicy::Fixed(2), KPolicy::Optimal]
        );
        assert_eq!(spec.omega, 1.0);
    }

    fn spec(n_values: Vec<usize>, exact: bool) -> SweepSpec {
        SweepSpec {
            n_values,
            policies: vec![KPolicy::WState, KPolicy::Optimal],
            omega: 1.0,
            skew_grid: linear_grid(0.3, 2.8, 20),
            shots: 10_000,
            seed: 7,
            exact,
            use_minus_rounds: false,
        }
    }

    #[test]
    fn sweep_validation() {
        let mut s = spec(vec![], false);
        assert!(s.validate().is_err());
        s.n_values = vec![13];
        assert!(matches!(s.validate(), Err(Error::Capacity { .. })));
        s.exact = true;
        assert!(s.validate().is_ok());
        s.policies = vec![KPolicy::Fixed(0)];
        assert!(matches!(s.validate(), Err(Error::ZeroAmplitude { .. })));
        let mut s = spec(vec![4], false);
        s.skew_grid = vec![3.2];
        assert!(s.validate().is_err());
    }

    #[test]
    fn exact_sweep_has_zero_error() {
        let rows = accuracy_sweep(&spec(vec![4, 9, 40], true)).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 20);
        for r in &rows {
            assert!(r.abs_err <= 1e-12, "{r:?}");
            assert_eq!(r.a0, amplitude::<f64>(r.k, r.n).unwrap().value);
        }
    }

    #[test]
    fn n2_policies_coincide() {
        let rows = accuracy_sweep(&spec(vec![2], false)).unwrap();
        let (w, o) = rows.split_at(20);
        for (a, b) in w.iter().zip(o) {
            assert_eq!(
                (a.k, a.p_hat, a.abs_err, a.rmse),
                (b.k, b.p_hat, b.abs_err, b.rmse)
            );
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = spec(vec![3], false);
        assert_eq!(accuracy_sweep(&s).unwrap(), accuracy_sweep(&s).unwrap());
    }

    #[test]
    fn seeds_differ_per_cell() {
        let a = derive_seed(1, &[4, 0]);
        assert_ne!(a, derive_seed(1, &[4, 1]));
        assert_ne!(a, derive_seed(1, &[5, 0]));
        assert_ne!(a, derive_seed(2, &[4, 0]));
        assert_eq!(a, derive_seed(1, &[4, 0]));
    }

    #[test]
    fn grid_endpoints() {
        let g = linear_grid(0.3, 2.8, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.3);
        assert!((g[19] - 2.8).abs() < 1e-15);
    }
}
