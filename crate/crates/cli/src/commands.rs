use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qclock_core::analysis::{accuracy_sweep, amplitude_table, summarize, SweepSpec};
use qclock_core::analytic::{a0_opt, k_opt};
use qclock_core::protocol::{audit_messages, estimate_skew, Protocol, ProtocolConfig};
use qclock_core::verify::{verify_oracles_with, AnalyticModel, Check, ClosedForm, VerifyReport};
use qclock_core::Sign;

use crate::output::{encode_json, encode_table, OutputSet};
use crate::{Cli, CliError, Command, Format, GlobalOpts};

/// Everything a subcommand produced, before it is printed or written.
#[derive(Debug)]
pub struct Produced {
    pub subcommand: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub outputs: OutputSet,
    /// Human-readable summary for stdout.
    pub summary: String,
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Verify { max_n } => cmd_verify(*max_n, g.format, &ClosedForm),
        Command::Amplitude { n_min, n_max } => cmd_amplitude(*n_min, *n_max, g.format),
        Command::Optimize { n } => cmd_optimize(n, g.format),
        Command::Simulate { config } => {
            require_out(g)?;
            cmd_simulate(config, g.format, g.jobs)
        }
        Command::Sweep { config } => {
            require_out(g)?;
            cmd_sweep(config, g.format, g.jobs)
        }
    };
    // A failed verification still reports and writes its table.
    let (produced, failure) = match result {
        Ok(p) => (p, None),
        Err(Failed {
            produced: Some(p),
            error,
        }) => (*p, Some(error)),
        Err(Failed {
            produced: None,
            error,
        }) => return Err(error),
    };
    print!("{}", produced.summary);
    if let Some(dir) = &g.out {
        let manifest =
            produced
                .outputs
                .manifest(produced.subcommand, produced.config.clone(), produced.seed);
        for p in produced.outputs.write_all(dir, &manifest)? {
            eprintln!("wrote {}", p.display());
        }
    }
    failure.map_or(Ok(()), Err)
}

fn require_out(g: &GlobalOpts) -> Result<(), CliError> {
    if g.out.is_none() {
        return Err(CliError::Usage("--out DIR is required".into()));
    }
    Ok(())
}

/// A subcommand error, optionally with partial results worth emitting.
#[derive(Debug)]
pub struct Failed {
    pub produced: Option<Box<Produced>>,
    pub error: CliError,
}

impl From<CliError> for Failed {
    fn from(error: CliError) -> Self {
        Failed {
            produced: None,
            error,
        }
    }
}

impl From<qclock_core::Error> for Failed {
    fn from(e: qclock_core::Error) -> Self {
        CliError::from(e).into()
    }
}

fn stdout_table(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    check: Check,
    n: usize,
    k: usize,
    phase: Option<f64>,
    max_deviation: f64,
    passed: bool,
}

pub fn cmd_verify(
    max_n: usize,
    format: Format,
    model: &dyn AnalyticModel,
) -> Result<Produced, Failed> {
    if max_n < 2 {
        return Err(CliError::Usage(format!("--max-n must be at least 2, got {max_n}")).into());
    }
    let report: VerifyReport = verify_oracles_with(max_n, model)?;
    let rows: Vec<VerifyRow> = report
        .cases
        .iter()
        .map(|c| VerifyRow {
            check: c.check,
            n: c.n,
            k: c.k,
            phase: c.phase,
            max_deviation: c.max_deviation,
            passed: c.passed,
        })
        .collect();
    let table = encode_table(&rows, format)?;
    let mut summary = stdout_table(&table);
    summary.push_str(&format!(
        "# {} cases, worst pair-state deviation {:e}, worst probability deviation {:e}, tolerance {:e}\n",
        report.cases.len(),
        report.worst(Check::PairState),
        report.worst(Check::Probability),
        report.tolerance
    ));
    let mut outputs = OutputSet::default();
    outputs.add(format!("verify.{}", format.extension()), table);
    let failure = report.first_failure().map(|c| {
        let phase = c
            .phase
            .map(|p| format!(" omega*dt={p}"))
            .unwrap_or_default();
        CliError::Verification(format!(
            "{:?} check at n={} k={}{phase}: deviation {:e} exceeds {:e}",
            c.check, c.n, c.k, c.max_deviation, report.tolerance
        ))
    });
    let produced = Produced {
        subcommand: "verify",
        config: json!({ "max_n": max_n }),
        seed: None,
        outputs,
        summary,
    };
    match failure {
        None => Ok(produced),
        Some(error) => Err(Failed {
            produced: Some(Box::new(produced)),
            error,
        }),
    }
}

pub fn cmd_amplitude(n_min: usize, n_max: usize, format: Format) -> Result<Produced, Failed> {
    if n_min < 2 || n_min > n_max {
        return Err(CliError::Usage(format!(
            "need 2 <= n_min <= n_max, got n_min={n_min} n_max={n_max}"
        ))
        .into());
    }
    let rows = amplitude_table(n_min, n_max)?;
    let table = encode_table(&rows, format)?;
    let mut outputs = OutputSet::default();
    outputs.add(format!("amplitude.{}", format.extension()), table.clone());
    Ok(Produced {
        subcommand: "amplitude",
        config: json!({ "n_min": n_min, "n_max": n_max }),
        seed: None,
        outputs,
        summary: stdout_table(&table),
    })
}

#[derive(Debug, Serialize)]
struct OptimizeRow {
    n: usize,
    k_opt: usize,
    a0_opt: f64,
}

pub fn cmd_optimize(ns: &[usize], format: Format) -> Result<Produced, Failed> {
    let rows = ns
        .iter()
        .map(|&n| {
            Ok(OptimizeRow {
                n,
                k_opt: k_opt(n)?,
                a0_opt: a0_opt(n)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let table = encode_table(&rows, format)?;
    let mut outputs = OutputSet::default();
    outputs.add(format!("optimize.{}", format.extension()), table.clone());
    Ok(Produced {
        subcommand: "optimize",
        config: json!({ "n": ns }),
        seed: None,
        outputs,
        summary: stdout_table(&table),
    })
}

/// Reads a JSON document, reporting parse errors with the offending field path.
pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_slice(&bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        CliError::Usage(format!(
            "{}: at `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })
}

fn with_pool<T: Send>(jobs: Option<u16>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j as usize)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Usage(format!("cannot start {j} workers: {e}"))),
    }
}

#[derive(Debug, Serialize)]
struct TallyRow {
    party_id: usize,
    alice_outcome: Sign,
    bob_plus: u64,
    bob_minus: u64,
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    party_id: usize,
    true_skew: f64,
    p_hat: f64,
    cos_hat: f64,
    estimated_abs_skew: f64,
    shots_used: u64,
    amplitude_used: f64,
}

pub fn cmd_simulate(
    config_path: &Path,
    format: Format,
    jobs: Option<u16>,
) -> Result<Produced, Failed> {
    let config: ProtocolConfig = read_document(config_path)?;
    config.validate_for_estimation()?;
    let protocol = Protocol::new(config.clone())?;
    let (tally, log) = with_pool(jobs, || protocol.run_logged())?;
    let estimate = estimate_skew(
        &tally,
        config.n,
        config.k,
        config.omega,
        config.use_minus_rounds,
    )?;
    let audit = audit_messages(&log);

    let tally_rows: Vec<TallyRow> = tally
        .parties
        .iter()
        .flat_map(|p| {
            [(Sign::Plus, p.after_plus), (Sign::Minus, p.after_minus)].map(|(s, c)| TallyRow {
                party_id: p.party_id,
                alice_outcome: s,
                bob_plus: c.plus,
                bob_minus: c.minus,
            })
        })
        .collect();
    let estimate_rows: Vec<EstimateRow> = estimate
        .parties
        .iter()
        .map(|e| EstimateRow {
            party_id: e.party_id,
            true_skew: config.skews[e.party_id - 1],
            p_hat: e.p_hat,
            cos_hat: e.cos_hat,
            estimated_abs_skew: e.estimated_abs_skew,
            shots_used: e.shots_used,
            amplitude_used: estimate.amplitude_used,
        })
        .collect();

    let ext = format.extension();
    let estimates = encode_table(&estimate_rows, format)?;
    let mut outputs = OutputSet::default();
    outputs.add(format!("tally.{ext}"), encode_table(&tally_rows, format)?);
    outputs.add(format!("estimates.{ext}"), estimates.clone());
    outputs.add("channel_audit.json", encode_json(&audit)?);

    let mut summary = stdout_table(&estimates);
    summary.push_str(&format!(
        "# {} rounds, Alice announced + in {}; channel audit: {} messages, {} violations\n",
        tally.rounds,
        tally.alice.plus,
        audit.messages_checked,
        audit.violations.len()
    ));
    Ok(Produced {
        subcommand: "simulate",
        config: serde_json::to_value(&config).expect("config serializes"),
        seed: Some(config.seed),
        outputs,
        summary,
    })
}

pub fn cmd_sweep(spec_path: &Path, format: Format, jobs: Option<u16>) -> Result<Produced, Failed> {
    let spec: SweepSpec = read_document(spec_path)?;
    spec.validate()?;
    let rows = with_pool(jobs, || accuracy_sweep(&spec))??;
    let summary_rows = summarize(&rows);
    let ext = format.extension();
    let summary_table = encode_table(&summary_rows, format)?;
    let mut outputs = OutputSet::default();
    outputs.add(format!("sweep.{ext}"), encode_table(&rows, format)?);
    outputs.add(format!("sweep_summary.{ext}"), summary_table.clone());
    Ok(Produced {
        subcommand: "sweep",
        config: serde_json::to_value(&spec).expect("spec serializes"),
        seed: Some(spec.seed),
        outputs,
        summary: stdout_table(&summary_table),
    })
}
