//! Simulation backends: dense statevectors and Pauli frames.
//!
//! The statevector backend tracks full `2^n` amplitude vectors and supports
//! Pauli application, the H/X/Z gates needed for dummy-qubit handling,
//! projective generator measurements, qubit permutation, and encoding into a
//! code's logical basis. Basis indices give qubit 0 the most significant
//! bit, so letter strings and kets read in the same left-to-right order.
//!
//! The Pauli-frame backend tracks only the accumulated physical error of a
//! session relative to the ideal run. It reproduces syndrome statistics and
//! class bookkeeping exactly for Clifford-free sessions at a tiny fraction
//! of the cost, which is what makes large attack campaigns practical. Tests
//! pin the two backends against each other.
//!
//! Encoding builds the logical basis by projector group sums: summing every
//! signed element of the group generated by the stabilizers and logical-Z
//! operators over an anchor basis state yields `|0…0_L⟩`, and logical-X
//! products reach the remaining basis states. The construction is verified
//! on the spot — eigenvalue relations, logical action, orthonormality — so a
//! bad catalog record cannot produce a silently wrong codeword.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::BitVec;
use crate::code::Code;
use crate::error::{Error, Result};
use crate::pauli::{Letter, Pauli};

/// Largest register the dense backend will allocate (`2^14` amplitudes).
pub const STATEVECTOR_MAX_QUBITS: usize = 14;

/// Tolerance for norm, eigenvalue, and projection checks.
const TOL: f64 = 1e-9;

/// Dense `2^n`-amplitude state of an `n`-qubit register.
#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(n: usize) -> Result<StateVector> {
        Self::basis_state(n, 0)
    }

    /// A single computational basis state; `index` bit `n-1-q` is qubit `q`.
    pub fn basis_state(n: usize, index: usize) -> Result<StateVector> {
        check_register_size(n)?;
        if index >= 1 << n {
            return Err(Error::parameter(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[index] = Complex64::ONE;
        Ok(StateVector { n, amps })
    }

    /// Wrap explicit amplitudes; must be length `2^n` and unit norm.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        check_register_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::parameter(format!(
                "expected {} amplitudes for {n} qubits, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let state = StateVector { n, amps };
        if (state.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::parameter(format!(
                "amplitudes have norm {:.6}, expected 1",
                state.norm()
            )));
        }
        Ok(state)
    }

    /// A uniformly random unit vector (normalized complex Gaussian draws).
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<StateVector> {
        check_register_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for _ in 0..1usize << n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            amps.push(Complex64::new(re, im));
        }
        let mut state = StateVector { n, amps };
        let norm = state.norm();
        for a in &mut state.amps {
            *a /= norm;
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.n, other.n, "register size mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Apply a Pauli operator in place.
    pub fn apply_pauli(&mut self, p: &Pauli) {
        assert_eq!(p.n(), self.n, "operator size mismatch");
        let x_mask = index_mask(p.x_bits(), self.n);
        let z_mask = index_mask(p.z_bits(), self.n);
        let global = phase_factor(p.phase_power());
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i & z_mask).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            out[i ^ x_mask] = global * sign * a;
        }
        self.amps = out;
    }

    pub fn apply_x(&mut self, q: usize) {
        self.apply_pauli(&Pauli::single(self.n, q, Letter::X));
    }

    pub fn apply_z(&mut self, q: usize) {
        self.apply_pauli(&Pauli::single(self.n, q, Letter::Z));
    }

    /// Hadamard on one qubit.
    pub fn apply_h(&mut self, q: usize) {
        assert!(q < self.n, "qubit index out of range");
        let bit = 1usize << (self.n - 1 - q);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = s * (a + b);
                self.amps[i | bit] = s * (a - b);
            }
        }
    }

    /// Projectively measure a Hermitian Pauli. Returns `false` for the `+1`
    /// outcome, `true` for `-1`, collapsing the state. The RNG is consulted
    /// only when both outcomes have weight above [`TOL`], so deterministic
    /// measurements never advance a random stream.
    pub fn measure_pauli(&mut self, g: &Pauli, rng: &mut impl Rng) -> bool {
        assert!(g.is_hermitian(), "measurement requires a Hermitian operator");
        let mut rotated = self.clone();
        rotated.apply_pauli(g);
        let overlap = self.inner(&rotated).re;
        let p_plus = ((1.0 + overlap) / 2.0).clamp(0.0, 1.0);
        let outcome = if p_plus >= 1.0 - TOL {
            false
        } else if p_plus <= TOL {
            true
        } else {
            rng.random::<f64>() >= p_plus
        };
        let (sign, prob) = if outcome {
            (-1.0, 1.0 - p_plus)
        } else {
            (1.0, p_plus)
        };
        let scale = 1.0 / (2.0 * prob.sqrt());
        for (a, r) in self.amps.iter_mut().zip(&rotated.amps) {
            *a = (*a + sign * r) * scale;
        }
        outcome
    }

    /// Measure qubit `q` in the computational basis, or in the Hadamard
    /// basis when `hadamard` is set. Returns the outcome bit (`true` for
    /// `|1⟩` / `|−⟩`).
    pub fn measure_qubit(&mut self, q: usize, hadamard: bool, rng: &mut impl Rng) -> bool {
        if hadamard {
            self.apply_h(q);
        }
        let outcome = self.measure_pauli(&Pauli::single(self.n, q, Letter::Z), rng);
        if hadamard {
            self.apply_h(q);
        }
        outcome
    }

    /// Move qubit `q` to position `perm[q]`. `perm` must be a permutation.
    pub fn permute_qubits(&mut self, perm: &[usize]) {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut seen = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (q, &target) in perm.iter().enumerate() {
                if i >> (self.n - 1 - q) & 1 == 1 {
                    j |= 1 << (self.n - 1 - target);
                }
            }
            out[j] = a;
        }
        self.amps = out;
    }

    /// Tensor product; `self`'s qubits come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n + other.n;
        check_register_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n, amps })
    }

    /// Probability of observing computational basis state `index`.
    pub fn basis_probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }
}

fn check_register_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::parameter("register must hold at least one qubit"));
    }
    if n > STATEVECTOR_MAX_QUBITS {
        return Err(Error::capacity(format!(
            "register of {n} qubits exceeds the dense-backend cap {STATEVECTOR_MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Map qubit-positions bits to a basis-index mask (qubit 0 → top bit).
fn index_mask(bits: &BitVec, n: usize) -> usize {
    let mut mask = 0usize;
    for q in bits.ones() {
        mask |= 1 << (n - 1 - q);
    }
    mask
}

fn phase_factor(p: u8) -> Complex64 {
    match p & 3 {
        0 => Complex64::ONE,
        1 => Complex64::I,
        2 => -Complex64::ONE,
        _ => -Complex64::I,
    }
}

/// The `2^k` logical basis states of a code, with encode/decode maps.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    n: usize,
    k: usize,
    states: Vec<StateVector>,
}

impl LogicalBasis {
    /// Build and verify the logical basis of a code.
    pub fn for_code(code: &Code) -> Result<LogicalBasis> {
        let n = code.n();
        let k = code.k();
        check_register_size(n)?;

        // Signed elements of ⟨stabilizers, logical Z⟩: the group sum is
        // 2^n times the rank-one projector onto |0…0_L⟩.
        let mut group = vec![Pauli::identity(n)];
        for g in code.generators().iter().chain(code.logical_z()) {
            for i in 0..group.len() {
                group.push(group[i].mul(g));
            }
        }

        let zero_logical = (0..1usize << n)
            .find_map(|anchor| {
                let mut amps = vec![Complex64::ZERO; 1 << n];
                for m in &group {
                    // m|anchor⟩ is a single signed basis state.
                    let x = index_mask(m.x_bits(), n);
                    let z = index_mask(m.z_bits(), n);
                    let mut c = phase_factor(m.phase_power());
                    if (z & anchor).count_ones() & 1 == 1 {
                        c = -c;
                    }
                    amps[anchor ^ x] += c;
                }
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm < TOL {
                    return None;
                }
                for a in &mut amps {
                    *a /= norm;
                }
                Some(StateVector { n, amps })
            })
            .ok_or_else(|| {
                Error::validation(format!("{}: projector annihilates every basis state", code.name()))
            })?;

        let mut states = Vec::with_capacity(1 << k);
        for b in 0..1usize << k {
            let mut state = zero_logical.clone();
            for (i, lx) in code.logical_x().iter().enumerate() {
                if b >> (k - 1 - i) & 1 == 1 {
                    state.apply_pauli(lx);
                }
            }
            states.push(state);
        }

        let basis = LogicalBasis { n, k, states };
        basis.verify(code)?;
        Ok(basis)
    }

    /// Postcondition sweep: stabilizer eigenvalues, logical eigenvalues,
    /// logical X action, and orthonormality.
    fn verify(&self, code: &Code) -> Result<()> {
        let fail = |msg: String| Error::validation(format!("{}: {msg}", code.name()));
        for (b, state) in self.states.iter().enumerate() {
            for g in code.generators() {
                let mut moved = state.clone();
                moved.apply_pauli(g);
                if (state.inner(&moved).re - 1.0).abs() > TOL {
                    return Err(fail(format!("codeword {b} is not stabilized by {g}")));
                }
            }
            for (i, lz) in code.logical_z().iter().enumerate() {
                let want = if b >> (self.k - 1 - i) & 1 == 1 { -1.0 } else { 1.0 };
                let mut moved = state.clone();
                moved.apply_pauli(lz);
                if (state.inner(&moved).re - want).abs() > TOL {
                    return Err(fail(format!("codeword {b} has wrong {lz} eigenvalue")));
                }
            }
            for (c, other) in self.states.iter().enumerate() {
                let want = if b == c { 1.0 } else { 0.0 };
                if (state.inner(other).norm() - want).abs() > TOL {
                    return Err(fail(format!("codewords {b} and {c} are not orthonormal")));
                }
            }
        }
        for (i, lx) in code.logical_x().iter().enumerate() {
            for b in 0..self.states.len() {
                let mut moved = self.states[b].clone();
                moved.apply_pauli(lx);
                let target = b ^ (1 << (self.k - 1 - i));
                if (moved.inner(&self.states[target]).norm() - 1.0).abs() > TOL {
                    return Err(fail(format!("{lx} does not map codeword {b} to {target}")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The codeword for logical basis state `b` (qubit 0 of the logical
    /// register is the most significant bit of `b`).
    pub fn codeword(&self, b: usize) -> &StateVector {
        &self.states[b]
    }

    /// Isometry: map a `k`-qubit payload to its encoded `n`-qubit state.
    pub fn encode(&self, payload: &StateVector) -> Result<StateVector> {
        if payload.n() != self.k {
            return Err(Error::parameter(format!(
                "payload holds {} qubits, expected {}",
                payload.n(),
                self.k
            )));
        }
        let mut amps = vec![Complex64::ZERO; 1 << self.n];
        for (b, &coeff) in payload.amplitudes().iter().enumerate() {
            if coeff == Complex64::ZERO {
                continue;
            }
            for (i, &a) in self.states[b].amplitudes().iter().enumerate() {
                amps[i] += coeff * a;
            }
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// Project an encoded state back to the logical register. Returns the
    /// normalized payload and the leakage `1 - ‖projection‖²` (population
    /// outside the code space).
    pub fn decode(&self, encoded: &StateVector) -> Result<(StateVector, f64)> {
        if encoded.n() != self.n {
            return Err(Error::parameter(format!(
                "encoded state holds {} qubits, expected {}",
                encoded.n(),
                self.n
            )));
        }
        let mut amps = Vec::with_capacity(1 << self.k);
        for state in &self.states {
            amps.push(state.inner(encoded));
        }
        let norm_sqr = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if norm_sqr < TOL {
            return Err(Error::validation(
                "state has no support on the code space".to_string(),
            ));
        }
        let norm = norm_sqr.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let leakage = (1.0 - norm_sqr).max(0.0);
        Ok((
            StateVector {
                n: self.k,
                amps,
            },
            leakage,
        ))
    }
}

/// Pauli-frame state: the accumulated physical error relative to an ideal
/// session.
#[derive(Clone, Debug)]
pub struct PauliFrame {
    error: Pauli,
}

impl PauliFrame {
    pub fn new(n: usize) -> PauliFrame {
        PauliFrame {
            error: Pauli::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.error.n()
    }

    /// Compose another error onto the frame (applied after what the frame
    /// already holds).
    pub fn apply(&mut self, p: &Pauli) {
        self.error = p.mul(&self.error);
    }

    /// The accumulated error, phase stripped.
    pub fn residual(&self) -> Pauli {
        self.error.phase_stripped()
    }

    /// Syndrome the accumulated error produces on a code.
    pub fn syndrome(&self, code: &Code) -> BitVec {
        code.syndrome_of(&self.error)
    }
}

/// Physical channel acting on each transmitted qubit independently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelModel {
    /// Noiseless.
    Ideal,
    /// Independent depolarizing noise: each qubit suffers X, Y, or Z with
    /// probability `p/3` each.
    Depolarizing { p: f64 },
    /// Worst-case-within-budget test channel: every use injects an error
    /// of exactly `weight` qubits, uniformly random support and letters.
    FixedWeight { weight: usize },
}

impl ChannelModel {
    /// Parse `ideal`, `depolarizing:<p>`, or `fixed-weight:<w>`.
    pub fn parse(text: &str) -> Result<ChannelModel> {
        if text == "ideal" {
            return Ok(ChannelModel::Ideal);
        }
        if let Some(rest) = text.strip_prefix("depolarizing:") {
            let p: f64 = rest
                .parse()
                .map_err(|_| Error::parse(format!("bad channel rate {rest:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::parameter(format!(
                    "channel rate {p} outside [0, 1]"
                )));
            }
            return Ok(ChannelModel::Depolarizing { p });
        }
        if let Some(rest) = text.strip_prefix("fixed-weight:") {
            let weight: usize = rest
                .parse()
                .map_err(|_| Error::parse(format!("bad channel weight {rest:?}")))?;
            return Ok(ChannelModel::FixedWeight { weight });
        }
        Err(Error::parse(format!("unknown channel model {text:?}")))
    }

    /// Sample one error realization on `n` qubits.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Pauli {
        match *self {
            ChannelModel::Ideal => Pauli::identity(n),
            ChannelModel::Depolarizing { p } => {
                let mut letters = vec![Letter::I; n];
                for letter in letters.iter_mut() {
                    if rng.random::<f64>() < p {
                        *letter = [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)];
                    }
                }
                Pauli::from_letters(&letters)
            }
            ChannelModel::FixedWeight { weight } => {
                assert!(weight <= n, "error weight {weight} exceeds register size {n}");
                let mut qubits: Vec<usize> = (0..n).collect();
                for i in 0..weight {
                    let j = i + rng.random_range(0..n - i);
                    qubits.swap(i, j);
                }
                let mut letters = vec![Letter::I; n];
                for &q in &qubits[..weight] {
                    letters[q] = [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)];
                }
                Pauli::from_letters(&letters)
            }
        }
    }
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelModel::Ideal => write!(f, "ideal"),
            ChannelModel::Depolarizing { p } => write!(f, "depolarizing:{p}"),
            ChannelModel::FixedWeight { weight } => write!(f, "fixed-weight:{weight}"),
        }
    }
}
