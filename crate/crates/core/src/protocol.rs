//! Multi-party synchronization protocol over a simulated broadcast channel.
//!
//! Every round distributes a fresh `|D(n, k)⟩`. Party 0 (Alice, the standard
//! clock) measures her qubit in the `±` basis at `t = 0` and broadcasts the
//! result. Each Bob `j` measures his qubit in the `±` basis after it has
//! accrued the phase `exp(−iω·Δt_j)` of his skewed clock. Bobs measure in
//! ascending party order. Bob `j` then inverts `P(+) = 1/2 + A₀·cos(ωΔt_j)`
//! from his outcome frequencies over the rounds where Alice announced `+`.
//!
//! `cos` is even and 2π-periodic, so only `|Δt| ∈ [0, π/ω]` is identifiable.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analytic::amplitude;
use crate::error::{Error, Result};
use crate::state::{dicke_state, DickeSpec, Outcome, Sign, StateVector, MAX_QUBITS};

/// Rounds handed to one worker at a time.
const CHUNK_ROUNDS: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Party count, Alice included.
    pub n: usize,
    /// Excitations in the shared Dicke state.
    pub k: usize,
    /// Angular frequency ω of the qubit splitting.
    pub omega: f64,
    /// True skews of parties `1..n`.
    pub skews: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    /// Also use rounds where Alice announced `−` (sign-flipped).
    #[serde(default)]
    pub use_minus_rounds: bool,
}

impl ProtocolConfig {
    /// Structural checks needed to run rounds.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(
                "n",
                format!("need at least 2 parties, got {}", self.n),
            ));
        }
        if self.n > MAX_QUBITS {
            return Err(Error::Capacity {
                n: self.n,
                cap: MAX_QUBITS,
            });
        }
        if self.k > self.n {
            return Err(Error::config(
                "k",
                format!("k = {} exceeds n = {}", self.k, self.n),
            ));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::config(
                "omega",
                "must be a positive finite angular frequency",
            ));
        }
        if self.skews.len() != self.n - 1 {
            return Err(Error::config(
                "skews",
                format!(
                    "expected {} skews (parties 1..n), got {}",
                    self.n - 1,
                    self.skews.len()
                ),
            ));
        }
        if let Some(i) = self.skews.iter().position(|s| !s.is_finite()) {
            return Err(Error::config(format!("skews[{i}]"), "must be finite"));
        }
        if self.shots == 0 {
            return Err(Error::config("shots", "must be at least 1"));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the conditions for skew estimation:
    /// nonzero amplitude and every `|ω·Δt| < π`.
    pub fn validate_for_estimation(&self) -> Result<()> {
        self.validate()?;
        if self.k == 0 || self.k == self.n {
            return Err(Error::ZeroAmplitude {
                n: self.n,
                k: self.k,
            });
        }
        for (i, s) in self.skews.iter().enumerate() {
            if (self.omega * s).abs() >= std::f64::consts::PI {
                return Err(Error::config(
                    format!("skews[{i}]"),
                    format!(
                        "|omega*skew| = {} is outside the identifiable range [0, pi)",
                        (self.omega * s).abs()
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn clocks(&self) -> Vec<PartyClock> {
        std::iter::once(0.0)
            .chain(self.skews.iter().copied())
            .enumerate()
            .map(|(party_id, skew)| PartyClock {
                party_id,
                skew,
                omega: self.omega,
            })
            .collect()
    }
}

/// A party's clock offset from the standard clock held by party 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartyClock {
    pub party_id: usize,
    pub skew: f64,
    pub omega: f64,
}

/// The only traffic on the classical channel: who measured what, in which round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalMessage {
    pub round_index: u64,
    pub sender: usize,
    pub payload: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_index: u64,
    pub alice_outcome: Sign,
    /// Outcomes of parties `1..n`, in party order.
    pub bob_outcomes: Vec<Sign>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub plus: u64,
    pub minus: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.plus + self.minus
    }

    fn record(&mut self, s: Sign) {
        match s {
            Sign::Plus => self.plus += 1,
            Sign::Minus => self.minus += 1,
        }
    }

    fn merge(&mut self, other: &Counts) {
        self.plus += other.plus;
        self.minus += other.minus;
    }
}

/// One Bob's outcome counts, split by Alice's announcement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyTally {
    pub party_id: usize,
    pub after_plus: Counts,
    pub after_minus: Counts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyTable {
    pub n: usize,
    pub k: usize,
    pub rounds: u64,
    pub alice: Counts,
    pub parties: Vec<PartyTally>,
}

impl TallyTable {
    pub fn empty(n: usize, k: usize) -> Self {
        TallyTable {
            n,
            k,
            rounds: 0,
            alice: Counts::default(),
            parties: (1..n)
                .map(|party_id| PartyTally {
                    party_id,
                    after_plus: Counts::default(),
                    after_minus: Counts::default(),
                })
                .collect(),
        }
    }

    pub fn record(&mut self, round: &RoundRecord) {
        self.rounds += 1;
        self.alice.record(round.alice_outcome);
        for (party, &bob) in self.parties.iter_mut().zip(&round.bob_outcomes) {
            match round.alice_outcome {
                Sign::Plus => party.after_plus.record(bob),
                Sign::Minus => party.after_minus.record(bob),
            }
        }
    }

    /// Adds another table's counts. Associative and commutative.
    pub fn merge(&mut self, other: &TallyTable) {
        debug_assert_eq!((self.n, self.k), (other.n, other.k));
        self.rounds += other.rounds;
        self.alice.merge(&other.alice);
        for (a, b) in self.parties.iter_mut().zip(&other.parties) {
            a.after_plus.merge(&b.after_plus);
            a.after_minus.merge(&b.after_minus);
        }
    }

    pub fn party(&self, party_id: usize) -> Option<&PartyTally> {
        self.parties.iter().find(|p| p.party_id == party_id)
    }
}

/// Independent RNG stream for one round, fixed by `(seed, round_index)`.
pub fn round_rng(seed: u64, round_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round_index);
    rng
}

/// A validated configuration with its shared state prepared once.
#[derive(Debug, Clone)]
pub struct Protocol {
    config: ProtocolConfig,
    prepared: StateVector<f64>,
    /// `exp(−iω·Δt_j)` per party; 1 for Alice.
    phases: Vec<Complex64>,
}

impl Protocol {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let prepared = dicke_state(DickeSpec::new(config.n, config.k)?)?;
        let phases = config
            .clocks()
            .iter()
            .map(|c| Complex64::from_polar(1.0, -c.omega * c.skew))
            .collect();
        Ok(Protocol {
            config,
            prepared,
            phases,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    /// Runs round `round_index` on its derived RNG stream.
    pub fn run_round(&self, round_index: u64) -> Result<(RoundRecord, Vec<ClassicalMessage>)> {
        let mut rng = round_rng(self.config.seed, round_index);
        let mut buf = Vec::with_capacity(self.prepared.amplitudes().len());
        let mut signs = Vec::with_capacity(self.config.n);
        self.sample_round(&mut rng, &mut buf, &mut signs);
        Ok(self.package(round_index, &signs))
    }

    /// Same round as [`run_round`](Self::run_round) built from the general
    /// statevector operations (prepare, rotate, measure, evolve). Slower;
    /// kept as the reference the fast path is checked against.
    pub fn run_round_reference<R: Rng + ?Sized>(
        &self,
        round_index: u64,
        rng: &mut R,
    ) -> Result<(RoundRecord, Vec<ClassicalMessage>)> {
        let cfg = &self.config;
        let mut state = dicke_state::<f64>(DickeSpec::new(cfg.n, cfg.k)?)?;
        let mut signs = Vec::with_capacity(cfg.n);
        state.apply_hadamard(0)?;
        signs.push(Sign::from(state.measure_in_place(0, rng)?));
        for clock in cfg.clocks().iter().skip(1) {
            let q = clock.party_id;
            state.apply_phase(q, clock.skew, clock.omega)?;
            state.apply_hadamard(q)?;
            signs.push(Sign::from(state.measure_in_place(q, rng)?));
        }
        Ok(self.package(round_index, &signs))
    }

    fn package(&self, round_index: u64, signs: &[Sign]) -> (RoundRecord, Vec<ClassicalMessage>) {
        let record = RoundRecord {
            round_index,
            alice_outcome: signs[0],
            bob_outcomes: signs[1..].to_vec(),
        };
        let message = ClassicalMessage {
            round_index,
            sender: 0,
            payload: signs[0],
        };
        (record, vec![message])
    }

    /// Exact statevector round. Party `p` is always the leading qubit once
    /// parties `0..p` are measured, so each measurement keeps one half of
    /// the current slice and the measured qubit drops out. Amplitudes are
    /// left unnormalized; branch choice uses the relative weights.
    fn sample_round<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        buf: &mut Vec<Complex64>,
        signs: &mut Vec<Sign>,
    ) {
        buf.clear();
        buf.extend_from_slice(self.prepared.amplitudes());
        signs.clear();
        let mut view: &mut [Complex64] = buf.as_mut_slice();
        for phase in &self.phases {
            let half = view.len() / 2;
            let (ground, excited) = view.split_at_mut(half);
            let (mut p0, mut p1) = (0.0, 0.0);
            for (g, e) in ground.iter_mut().zip(excited.iter_mut()) {
                let e_rot = *e * phase;
                let plus = *g + e_rot;
                let minus = *g - e_rot;
                p0 += plus.norm_sqr();
                p1 += minus.norm_sqr();
                *g = plus;
                *e = minus;
            }
            let u: f64 = rng.random();
            let outcome = Outcome::from_bit(u * (p0 + p1) < p1);
            signs.push(Sign::from(outcome));
            view = match outcome {
                Outcome::ZeroOrPlus => ground,
                Outcome::OneOrMinus => excited,
            };
        }
    }

    fn run_chunk(
        &self,
        start: u64,
        end: u64,
        mut log: Option<&mut Vec<ClassicalMessage>>,
    ) -> TallyTable {
        let cfg = &self.config;
        let mut tally = TallyTable::empty(cfg.n, cfg.k);
        let mut buf = Vec::with_capacity(self.prepared.amplitudes().len());
        let mut signs = Vec::with_capacity(cfg.n);
        for round_index in start..end {
            let mut rng = round_rng(cfg.seed, round_index);
            self.sample_round(&mut rng, &mut buf, &mut signs);
            let (record, messages) = self.package(round_index, &signs);
            tally.record(&record);
            if let Some(log) = log.as_deref_mut() {
                log.extend(messages);
            }
        }
        tally
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        let shots = self.config.shots;
        (0..shots.div_ceil(CHUNK_ROUNDS))
            .map(|c| (c * CHUNK_ROUNDS, ((c + 1) * CHUNK_ROUNDS).min(shots)))
            .collect()
    }

    /// All rounds, in parallel on the current rayon pool. The result depends
    /// only on the config.
    pub fn run(&self) -> TallyTable {
        self.chunks()
            .into_par_iter()
            .map(|(s, e)| self.run_chunk(s, e, None))
            .reduce(
                || TallyTable::empty(self.config.n, self.config.k),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    }

    /// Like [`run`](Self::run), also returning every broadcast in round order.
    pub fn run_logged(&self) -> (TallyTable, Vec<ClassicalMessage>) {
        let parts: Vec<(TallyTable, Vec<ClassicalMessage>)> = self
            .chunks()
            .into_par_iter()
            .map(|(s, e)| {
                let mut log = Vec::with_capacity((e - s) as usize);
                let t = self.run_chunk(s, e, Some(&mut log));
                (t, log)
            })
            .collect();
        let mut tally = TallyTable::empty(self.config.n, self.config.k);
        let mut log = Vec::with_capacity(self.config.shots as usize);
        for (t, l) in parts {
            tally.merge(&t);
            log.extend(l);
        }
        (tally, log)
    }
}

pub fn run_protocol(config: &ProtocolConfig) -> Result<TallyTable> {
    Ok(Protocol::new(config.clone())?.run())
}

/// Per-party skew estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartyEstimate {
    pub party_id: usize,
    /// Conditional frequency of `+` (sign-folded when minus rounds are pooled).
    pub p_hat: f64,
    /// Estimate of `cos(ωΔt)`, clamped to `[−1, 1]`.
    pub cos_hat: f64,
    /// `arccos(cos_hat) / ω`, in `[0, π/ω]`.
    pub estimated_abs_skew: f64,
    pub shots_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub amplitude_used: f64,
    pub used_minus_rounds: bool,
    pub parties: Vec<PartyEstimate>,
}

/// Inverts `p = 1/2 + a0·cos(ωΔt)`: returns `(cos_hat, |Δt|)`.
pub fn invert_probability(p_hat: f64, a0: f64, omega: f64) -> (f64, f64) {
    let cos_hat = ((p_hat - 0.5) / a0).clamp(-1.0, 1.0);
    (cos_hat, cos_hat.acos() / omega)
}

pub fn estimate_skew(
    tally: &TallyTable,
    n: usize,
    k: usize,
    omega: f64,
    use_minus_rounds: bool,
) -> Result<EstimationResult> {
    if (tally.n, tally.k) != (n, k) {
        return Err(Error::config(
            "tally",
            format!(
                "tally is for (n={}, k={}), asked for (n={n}, k={k})",
                tally.n, tally.k
            ),
        ));
    }
    let a0 = amplitude::<f64>(k, n)?.value;
    if a0 == 0.0 {
        return Err(Error::ZeroAmplitude { n, k });
    }
    let parties = tally
        .parties
        .iter()
        .map(|p| {
            // After Alice's −, Bob's − plays the role of + (P = 1/2 − A₀cos).
            let (hits, shots) = if use_minus_rounds {
                (
                    p.after_plus.plus + p.after_minus.minus,
                    p.after_plus.total() + p.after_minus.total(),
                )
            } else {
                (p.after_plus.plus, p.after_plus.total())
            };
            if shots == 0 {
                return Err(Error::EmptyTally(p.party_id));
            }
            let p_hat = hits as f64 / shots as f64;
            let (cos_hat, estimated_abs_skew) = invert_probability(p_hat, a0, omega);
            Ok(PartyEstimate {
                party_id: p.party_id,
                p_hat,
                cos_hat,
                estimated_abs_skew,
                shots_used: shots,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimationResult {
        amplitude_used: a0,
        used_minus_rounds: use_minus_rounds,
        parties,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub message_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub messages_checked: usize,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const MESSAGE_FIELDS: [&str; 3] = ["round_index", "sender", "payload"];

/// Schema audit of wire-form messages: each must be an object holding exactly
/// `round_index`, `sender` and a one-bit `payload` (`"plus"` or `"minus"`),
/// so nothing on the channel can carry timing data.
pub fn audit_channel(messages: &[Value]) -> AuditReport {
    let mut violations = Vec::new();
    for (message_index, msg) in messages.iter().enumerate() {
        let mut flag = |reason: String| {
            violations.push(Violation {
                message_index,
                reason,
            })
        };
        let Some(obj) = msg.as_object() else {
            flag("message is not an object".into());
            continue;
        };
        for key in obj.keys().filter(|k| !MESSAGE_FIELDS.contains(&k.as_str())) {
            flag(format!("unexpected field `{key}`"));
        }
        for key in ["round_index", "sender"] {
            if !obj.get(key).is_some_and(Value::is_u64) {
                flag(format!("`{key}` missing or not a non-negative integer"));
            }
        }
        match obj.get("payload").and_then(Value::as_str) {
            Some("plus" | "minus") => {}
            _ => flag("`payload` must be the single outcome \"plus\" or \"minus\"".into()),
        }
    }
    AuditReport {
        messages_checked: messages.len(),
        violations,
    }
}

/// Serializes `messages` to their wire form and audits them.
pub fn audit_messages(messages: &[ClassicalMessage]) -> AuditReport {
    let wire: Vec<Value> = messages
        .iter()
        .map(|m| serde_json::to_value(m).expect("message serializes"))
        .collect();
    audit_channel(&wire)
}
