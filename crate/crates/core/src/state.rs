//! Dense n-qubit statevectors.
//!
//! Amplitudes are indexed by the computational-basis bitstring with qubit 0
//! stored in the most significant bit, so for three qubits index `0b100` is
//! `|100⟩` (qubit 0 excited). Time evolution uses `ħ = 1` and assigns `|1⟩`
//! an energy `ω` above `|0⟩`, i.e. each basis amplitude picks up the phase
//! `exp(-i·ω·t·popcount)`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::{Basis, DensityMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register `dicke_state` will allocate.
pub const MAX_QUBITS: usize = 24;

/// Norm below which a projected branch is treated as empty.
pub const DEGENERATE_NORM: f64 = 1e-15;

/// Symmetric Dicke state `|D(n, k)⟩`: `n` qubits with exactly `k` excitations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DickeSpec {
    pub n: usize,
    pub k: usize,
}

impl DickeSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let spec = DickeSpec { n, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::NoQubits);
        }
        if self.k > self.n {
            return Err(Error::InvalidSpec {
                n: self.n,
                k: self.k,
            });
        }
        Ok(())
    }

    /// The W-state on `n` qubits.
    pub fn w_state(n: usize) -> Result<Self> {
        Self::new(n, 1)
    }
}

/// Single-qubit readout value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `|0⟩` in the computational basis, `|+⟩` in the measurement basis.
    ZeroOrPlus,
    /// `|1⟩` in the computational basis, `|−⟩` in the measurement basis.
    OneOrMinus,
}

impl Outcome {
    pub fn bit(self) -> usize {
        match self {
            Outcome::ZeroOrPlus => 0,
            Outcome::OneOrMinus => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Outcome::OneOrMinus
        } else {
            Outcome::ZeroOrPlus
        }
    }
}

/// Outcome of a `±`-basis measurement, the only payload a party ever broadcasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl From<Outcome> for Sign {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::ZeroOrPlus => Sign::Plus,
            Outcome::OneOrMinus => Sign::Minus,
        }
    }
}

impl From<Sign> for Outcome {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => Outcome::ZeroOrPlus,
            Sign::Minus => Outcome::OneOrMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub qubit_index: usize,
    pub basis: Basis,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|00…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes, normalizing them. The length must be `2^n`.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::MalformedState { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits)?;
        let mut state = StateVector {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr().sqrt();
        if norm.to_f64().unwrap_or(0.0) < DEGENERATE_NORM {
            return Err(Error::DegenerateNorm(norm.to_f64().unwrap_or(0.0)));
        }
        let scale = norm.recip();
        for a in &mut state.amplitudes {
            *a = a.scale(scale);
        }
        Ok(state)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(n_qubits)?;
        if index >= state.amplitudes.len() {
            return Err(Error::MalformedState { len: index });
        }
        state.amplitudes[0] = Complex::new(T::zero(), T::zero());
        state.amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    /// Bit mask of `qubit` inside a basis index.
    pub fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    /// Free evolution of every qubit for duration `t`.
    pub fn evolve(&self, t: T, omega: T) -> Self {
        let mut out = self.clone();
        let angle = omega * t;
        // phases[w] = exp(-i·w·ωt)
        let phases: Vec<Complex<T>> = (0..=self.n_qubits)
            .map(|w| Complex::from_polar(T::one(), -angle * T::lit(w as f64)))
            .collect();
        for (index, a) in out.amplitudes.iter_mut().enumerate() {
            *a = *a * phases[index.count_ones() as usize];
        }
        out
    }

    /// Free evolution of a single qubit for duration `t`.
    pub fn evolve_qubit(&self, qubit: usize, t: T, omega: T) -> Result<Self> {
        let mut out = self.clone();
        out.apply_phase(qubit, t, omega)?;
        Ok(out)
    }

    /// Maps `|0⟩ → |+⟩`, `|1⟩ → |−⟩` on `qubit` (a Hadamard gate), so a later
    /// computational readout of that qubit is a `±` measurement.
    pub fn rotate_to_measurement_basis(&self, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.apply_hadamard(qubit)?;
        Ok(out)
    }

    /// Born probability of reading `outcome` on `qubit` in the computational basis.
    pub fn probability(&self, qubit: usize, outcome: Outcome) -> Result<T> {
        let mask = self.mask(qubit)?;
        let want = outcome.bit() == 1;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == want)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Projects `qubit` onto `outcome`, returning the branch probability and
    /// the renormalized post-measurement state.
    pub fn project(&self, qubit: usize, outcome: Outcome) -> Result<(T, Self)> {
        let mut out = self.clone();
        let p = out.collapse(qubit, outcome)?;
        Ok((p, out))
    }

    /// Projective computational-basis measurement of `qubit`.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<(MeasurementOutcome, Self)> {
        let mut out = self.clone();
        let outcome = out.measure_in_place(qubit, rng)?;
        Ok((
            MeasurementOutcome {
                qubit_index: qubit,
                basis: Basis::Computational,
                outcome,
            },
            out,
        ))
    }

    /// Measures `qubit` in `basis`. The returned state is expressed in the
    /// original (computational) frame.
    pub fn measure_in_basis<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        basis: Basis,
        rng: &mut R,
    ) -> Result<(MeasurementOutcome, Self)> {
        let mut out = self.clone();
        if basis == Basis::PlusMinus {
            out.apply_hadamard(qubit)?;
        }
        let outcome = out.measure_in_place(qubit, rng)?;
        if basis == Basis::PlusMinus {
            out.apply_hadamard(qubit)?;
        }
        Ok((
            MeasurementOutcome {
                qubit_index: qubit,
                basis,
                outcome,
            },
            out,
        ))
    }

    /// Reduced density matrix of qubits `a` and `b`, basis order
    /// `|00⟩, |01⟩, |10⟩, |11⟩` with `a` as the left label.
    pub fn partial_trace_pair(&self, a: usize, b: usize) -> Result<DensityMatrix<T>> {
        let mask_a = self.mask(a)?;
        let mask_b = self.mask(b)?;
        if a == b {
            return Err(Error::EqualQubits(a));
        }
        let slot = |bit_a: usize, bit_b: usize| {
            (if bit_a == 1 { mask_a } else { 0 }) | (if bit_b == 1 { mask_b } else { 0 })
        };
        let offsets = [slot(0, 0), slot(0, 1), slot(1, 0), slot(1, 1)];
        let zero = Complex::new(T::zero(), T::zero());
        let mut entries = vec![zero; 16];
        for rest in 0..self.amplitudes.len() {
            if rest & (mask_a | mask_b) != 0 {
                continue;
            }
            let local: [Complex<T>; 4] = offsets.map(|o| self.amplitudes[rest | o]);
            for (r, ar) in local.iter().enumerate() {
                for (c, ac) in local.iter().enumerate() {
                    entries[r * 4 + c] = entries[r * 4 + c] + ar * ac.conj();
                }
            }
        }
        DensityMatrix::from_entries(4, Basis::Computational, entries)
    }

    /// Reduced density matrix of a single qubit.
    pub fn partial_trace_single(&self, qubit: usize) -> Result<DensityMatrix<T>> {
        let mask = self.mask(qubit)?;
        let zero = Complex::new(T::zero(), T::zero());
        let mut entries = vec![zero; 4];
        for rest in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let local = [self.amplitudes[rest], self.amplitudes[rest | mask]];
            for r in 0..2 {
                for c in 0..2 {
                    entries[r * 2 + c] = entries[r * 2 + c] + local[r] * local[c].conj();
                }
            }
        }
        DensityMatrix::from_entries(2, Basis::Computational, entries)
    }

    /// Relabels qubits `a` and `b`.
    pub fn swap_qubits(&self, a: usize, b: usize) -> Result<Self> {
        let mask_a = self.mask(a)?;
        let mask_b = self.mask(b)?;
        let mut out = self.clone();
        for (i, slot) in out.amplitudes.iter_mut().enumerate() {
            let bit_a = i & mask_a != 0;
            let bit_b = i & mask_b != 0;
            let mut j = i & !(mask_a | mask_b);
            if bit_a {
                j |= mask_b;
            }
            if bit_b {
                j |= mask_a;
            }
            *slot = self.amplitudes[j];
        }
        Ok(out)
    }

    // In-place kernels used by the pure wrappers and by the protocol round loop.

    pub fn apply_phase(&mut self, qubit: usize, t: T, omega: T) -> Result<()> {
        let mask = self.mask(qubit)?;
        let phase = Complex::from_polar(T::one(), -(omega * t));
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = *a * phase;
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        let mask = self.mask(qubit)?;
        let s = T::FRAC_1_SQRT_2();
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            self.amplitudes[i] = (a0 + a1).scale(s);
            self.amplitudes[i | mask] = (a0 - a1).scale(s);
        }
        Ok(())
    }

    /// Zeroes the branch inconsistent with `outcome` and renormalizes.
    /// Returns the probability of the kept branch.
    pub fn collapse(&mut self, qubit: usize, outcome: Outcome) -> Result<T> {
        let mask = self.mask(qubit)?;
        let keep_set = outcome.bit() == 1;
        let zero = Complex::new(T::zero(), T::zero());
        let mut p = T::zero();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) == keep_set {
                p = p + a.norm_sqr();
            } else {
                *a = zero;
            }
        }
        let norm = p.sqrt();
        let norm64 = norm.to_f64().unwrap_or(0.0);
        if norm64 < DEGENERATE_NORM {
            return Err(Error::DegenerateNorm(norm64));
        }
        let scale = norm.recip();
        for a in &mut self.amplitudes {
            *a = a.scale(scale);
        }
        Ok(p)
    }

    pub fn measure_in_place<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<Outcome> {
        let mask = self.mask(qubit)?;
        let (mut p0, mut p1) = (T::zero(), T::zero());
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask != 0 {
                p1 = p1 + a.norm_sqr();
            } else {
                p0 = p0 + a.norm_sqr();
            }
        }
        // u ∈ [0, 1), so a branch with exactly zero weight can never be drawn.
        let u = T::lit(rng.random::<f64>());
        let outcome = Outcome::from_bit(u * (p0 + p1) < p1);
        self.collapse(qubit, outcome)?;
        Ok(outcome)
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::NoQubits);
    }
    if n > MAX_QUBITS {
        return Err(Error::Capacity { n, cap: MAX_QUBITS });
    }
    Ok(())
}

/// Equal-weight superposition of every `n`-bit string with exactly `k` ones.
pub fn dicke_state<T: Real>(spec: DickeSpec) -> Result<StateVector<T>> {
    spec.validate()?;
    check_capacity(spec.n)?;
    let weight = binomial(spec.n as u64, spec.k as u64);
    let amp = Complex::new(T::lit(weight as f64).sqrt().recip(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let amplitudes = (0..1usize << spec.n)
        .map(|i| {
            if i.count_ones() as usize == spec.k {
                amp
            } else {
                zero
            }
        })
        .collect();
    Ok(StateVector {
        n_qubits: spec.n,
        amplitudes,
    })
}

/// `C(n, k)`; exact for the register sizes this crate allocates.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn assert_state_eq(a: &StateVector<f64>, b: &StateVector<f64>) {
        assert_eq!(a.n_qubits(), b.n_qubits());
        let d = a.max_abs_diff(b);
        assert!(d < TOL, "states differ by {d}");
    }

    #[test]
    fn w_state_three_qubits() {
        let s = dicke_state::<f64>(DickeSpec::new(3, 1).unwrap()).unwrap();
        let third = 1.0 / 3f64.sqrt();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if [0b100, 0b010, 0b001].contains(&i) {
                third
            } else {
                0.0
            };
            assert_abs_diff_eq!(a.re, want, epsilon = TOL);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn null_state() {
        let s = dicke_state::<f64>(DickeSpec::new(2, 0).unwrap()).unwrap();
        assert_eq!(
            s.amplitudes(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn half_filled_four_qubits() {
        let s = dicke_state::<f64>(DickeSpec::new(4, 2).unwrap()).unwrap();
        let support: Vec<usize> = (0..16).filter(|&i| s.amplitude(i).norm() > 0.0).collect();
        assert_eq!(support.len(), 6);
        for i in support {
            assert_eq!(i.count_ones(), 2);
            assert_abs_diff_eq!(s.amplitude(i).re, 1.0 / 6f64.sqrt(), epsilon = TOL);
        }
        // non-support amplitudes are exactly zero
        assert!((0..16)
            .filter(|i: &usize| i.count_ones() != 2)
            .all(|i| s.amplitude(i) == c(0.0, 0.0)));
    }

    #[test]
    fn spec_and_capacity_errors() {
        assert!(matches!(
            DickeSpec::new(3, 4),
            Err(Error::InvalidSpec { n: 3, k: 4 })
        ));
        let bad = DickeSpec { n: 3, k: 5 };
        assert!(dicke_state::<f64>(bad).is_err());
        let big = DickeSpec {
            n: MAX_QUBITS + 1,
            k: 1,
        };
        assert!(matches!(
            dicke_state::<f64>(big),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn twenty_qubits_fit() {
        let s = dicke_state::<f32>(DickeSpec::new(20, 1).unwrap()).unwrap();
        assert_eq!(s.amplitudes().len(), 1 << 20);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn evolve_identity_at_zero_time() {
        let s = dicke_state::<f64>(DickeSpec::new(4, 2).unwrap()).unwrap();
        assert_eq!(s.evolve(0.0, 3.0), s);
    }

    #[test]
    fn evolve_w_state_is_global_phase() {
        let s = dicke_state::<f64>(DickeSpec::new(3, 1).unwrap()).unwrap();
        let (t, omega) = (0.37, 2.1);
        let phase = Complex::from_polar(1.0, -omega * t);
        let want = StateVector::from_amplitudes(s.amplitudes().iter().map(|a| a * phase).collect())
            .unwrap();
        assert_state_eq(&s.evolve(t, omega), &want);
    }

    #[test]
    fn evolve_bell_pair_relative_phase() {
        let r = 1.0 / 2f64.sqrt();
        let bell =
            StateVector::from_amplitudes(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)])
                .unwrap();
        let (t, omega) = (0.8, 1.3);
        let out = bell.evolve(t, omega);
        assert_abs_diff_eq!(out.amplitude(0).re, r, epsilon = TOL);
        let want = Complex::from_polar(r, -2.0 * omega * t);
        assert!((out.amplitude(3) - want).norm() < TOL);
    }

    #[test]
    fn rotation_maps_zero_to_plus_and_back() {
        let zero = StateVector::<f64>::zero(1).unwrap();
        let plus = zero.rotate_to_measurement_basis(0).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(plus.amplitude(0).re, r, epsilon = TOL);
        assert_abs_diff_eq!(plus.amplitude(1).re, r, epsilon = TOL);
        assert_state_eq(&plus.rotate_to_measurement_basis(0).unwrap(), &zero);
    }

    #[test]
    fn rotation_is_self_inverse_on_w_state() {
        let s = dicke_state::<f64>(DickeSpec::new(3, 1).unwrap()).unwrap();
        let twice = s
            .rotate_to_measurement_basis(0)
            .unwrap()
            .rotate_to_measurement_basis(0)
            .unwrap();
        assert_state_eq(&twice, &s);
        assert!(matches!(
            s.rotate_to_measurement_basis(3),
            Err(Error::QubitOutOfRange {
                index: 3,
                n_qubits: 3
            })
        ));
    }

    #[test]
    fn deterministic_measurement() {
        let s = StateVector::<f64>::basis_state(2, 0b10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (m, post) = s.measure_qubit(0, &mut rng).unwrap();
            assert_eq!(m.outcome, Outcome::OneOrMinus);
            assert_eq!(m.basis, Basis::Computational);
            assert_state_eq(&post, &s);
        }
    }

    #[test]
    fn bell_like_measurement_collapses_partner() {
        let s = dicke_state::<f64>(DickeSpec::new(2, 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (m, post) = s.measure_qubit(0, &mut rng).unwrap();
            let expected_index = match m.outcome {
                Outcome::OneOrMinus => 0b10,
                Outcome::ZeroOrPlus => 0b01,
            };
            seen[m.outcome.bit()] = true;
            assert_state_eq(&post, &StateVector::basis_state(2, expected_index).unwrap());
            // repeat measurement agrees
            let (again, _) = post.measure_qubit(0, &mut rng).unwrap();
            assert_eq!(again.outcome, m.outcome);
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn measurement_frequency_matches_born_rule() {
        let s = dicke_state::<f64>(DickeSpec::new(4, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let shots = 100_000;
        let mut ones = 0usize;
        let mut work = s.clone();
        for _ in 0..shots {
            work.clone_from(&s);
            if work.measure_in_place(0, &mut rng).unwrap() == Outcome::OneOrMinus {
                ones += 1;
            }
        }
        let freq = ones as f64 / shots as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn collapse_onto_empty_branch_is_an_error() {
        let mut s = StateVector::<f64>::basis_state(2, 0b00).unwrap();
        assert!(matches!(
            s.collapse(0, Outcome::OneOrMinus),
            Err(Error::DegenerateNorm(_))
        ));
    }

    #[test]
    fn plus_minus_measurement_of_plus_state() {
        let plus = StateVector::<f64>::zero(1)
            .unwrap()
            .rotate_to_measurement_basis(0)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..16 {
            let (m, post) = plus
                .measure_in_basis(0, Basis::PlusMinus, &mut rng)
                .unwrap();
            assert_eq!(m.outcome, Outcome::ZeroOrPlus);
            assert_state_eq(&post, &plus);
        }
    }

    #[test]
    fn partial_trace_of_two_qubit_w_state() {
        let s = dicke_state::<f64>(DickeSpec::new(2, 1).unwrap()).unwrap();
        let rho = s.partial_trace_pair(0, 1).unwrap();
        let want = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for (r, row) in want.iter().enumerate() {
            for (col, &w) in row.iter().enumerate() {
                assert_abs_diff_eq!(rho.get(r, col).re, w, epsilon = TOL);
                assert_abs_diff_eq!(rho.get(r, col).im, 0.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn partial_trace_of_three_qubit_w_state() {
        let s = dicke_state::<f64>(DickeSpec::new(3, 1).unwrap()).unwrap();
        let rho = s.partial_trace_pair(0, 1).unwrap();
        let sixth = 1.0 / 6.0;
        let want = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 2.0, 0.0],
            [0.0, 2.0, 2.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for (r, row) in want.iter().enumerate() {
            for (col, &w) in row.iter().enumerate() {
                assert_abs_diff_eq!(rho.get(r, col).re, w * sixth, epsilon = TOL);
            }
        }
        rho.validate(1e-12, 1e-10).unwrap();
    }

    #[test]
    fn partial_trace_orders_labels_by_argument() {
        // |10⟩: qubit 0 excited. Tracing (0,1) puts weight on |10⟩, (1,0) on |01⟩.
        let s = StateVector::<f64>::basis_state(2, 0b10).unwrap();
        assert_abs_diff_eq!(s.partial_trace_pair(0, 1).unwrap().get(2, 2).re, 1.0);
        assert_abs_diff_eq!(s.partial_trace_pair(1, 0).unwrap().get(1, 1).re, 1.0);
        assert!(matches!(
            s.partial_trace_pair(1, 1),
            Err(Error::EqualQubits(1))
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(3, 4), 0);
    }
}
