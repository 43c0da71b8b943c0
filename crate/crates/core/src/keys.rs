//! Session key material: the four secret bit-strings a sender draws per
//! session, the dummy-state descriptors they define, the slot permutation
//! that interleaves dummies with payload, and code selection against a
//! channel error-rate target.
//!
//! A session on an `[[n,k,d]]` code carries `k'` payload qubits and
//! `k - k'` single-qubit dummies drawn from two mutually unbiased bases.
//! Three strings of `k - k'` bits fix each dummy's preparation
//! (`flip`, `phase`, `basis` — the dummy is `X^flip Z^phase H^basis |0⟩`),
//! and one `k`-bit string of Hamming weight `k - k'` fixes which logical
//! slots the dummies occupy. None of it is revealed until the final
//! protocol step, which is what makes dummy verification tamper-evidence.

use rand::Rng;

use crate::analysis::bigprob::BigProbability;
use crate::analysis::rates::{logical_error_rate, NoiseRate};
use crate::bits::BitVec;
use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::sim::StateVector;

/// The four per-session secrets.
///
/// `flip`, `phase`, and `basis` hold one bit per dummy qubit (`k - k'`
/// bits each); `placement` holds one bit per logical slot (`k` bits,
/// exactly `k - k'` of them set). Dummy `j` lives at the `j`-th set bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyMaterial {
    flip: BitVec,
    phase: BitVec,
    basis: BitVec,
    placement: BitVec,
    k_prime: usize,
}

impl KeyMaterial {
    /// Assemble from explicit strings, enforcing every length/weight
    /// invariant.
    pub fn from_parts(
        flip: BitVec,
        phase: BitVec,
        basis: BitVec,
        placement: BitVec,
        k_prime: usize,
    ) -> Result<KeyMaterial> {
        let k = placement.len();
        if k_prime < 1 || k_prime >= k {
            return Err(Error::parameter(format!(
                "payload count k'={k_prime} must satisfy 1 <= k' < k={k}"
            )));
        }
        let dummies = k - k_prime;
        for (name, bits) in [("flip", &flip), ("phase", &phase), ("basis", &basis)] {
            if bits.len() != dummies {
                return Err(Error::parameter(format!(
                    "{name} key holds {} bits, expected {dummies}",
                    bits.len()
                )));
            }
        }
        if placement.count_ones() != dummies {
            return Err(Error::parameter(format!(
                "placement key has weight {}, expected {dummies}",
                placement.count_ones()
            )));
        }
        Ok(KeyMaterial {
            flip,
            phase,
            basis,
            placement,
            k_prime,
        })
    }

    pub fn k(&self) -> usize {
        self.placement.len()
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    pub fn dummy_count(&self) -> usize {
        self.k() - self.k_prime
    }

    pub fn flip(&self) -> &BitVec {
        &self.flip
    }

    pub fn phase(&self) -> &BitVec {
        &self.phase
    }

    pub fn basis(&self) -> &BitVec {
        &self.basis
    }

    pub fn placement(&self) -> &BitVec {
        &self.placement
    }

    /// Slot indices holding dummies, ascending.
    pub fn dummy_positions(&self) -> Vec<usize> {
        self.placement.ones().collect()
    }

    /// Slot indices holding payload, ascending.
    pub fn payload_positions(&self) -> Vec<usize> {
        self.placement.zeros_iter().collect()
    }

    /// Serialize for the final reveal message: placement, then the three
    /// dummy strings (`placement || flip || phase || basis`).
    pub fn to_wire_bits(&self) -> BitVec {
        let k = self.k();
        let d = self.dummy_count();
        let mut out = BitVec::zeros(k + 3 * d);
        for i in 0..k {
            out.set(i, self.placement.get(i));
        }
        for i in 0..d {
            out.set(k + i, self.flip.get(i));
            out.set(k + d + i, self.phase.get(i));
            out.set(k + 2 * d + i, self.basis.get(i));
        }
        out
    }

    /// Inverse of [`to_wire_bits`](Self::to_wire_bits).
    pub fn from_wire_bits(bits: &BitVec, k: usize, k_prime: usize) -> Result<KeyMaterial> {
        if k_prime >= k {
            return Err(Error::parameter(format!(
                "payload count k'={k_prime} must satisfy 1 <= k' < k={k}"
            )));
        }
        let d = k - k_prime;
        if bits.len() != k + 3 * d {
            return Err(Error::parse(format!(
                "key reveal body holds {} bits, expected {}",
                bits.len(),
                k + 3 * d
            )));
        }
        let slice = |start: usize, len: usize| {
            let mut v = BitVec::zeros(len);
            for i in 0..len {
                v.set(i, bits.get(start + i));
            }
            v
        };
        KeyMaterial::from_parts(
            slice(k, d),
            slice(k + d, d),
            slice(k + 2 * d, d),
            slice(0, k),
            k_prime,
        )
    }
}

/// Draw fresh key material: three uniform `k - k'`-bit strings and a
/// placement string uniform over the `C(k, k-k')` weight-`(k-k')`
/// alternatives.
pub fn keygen(k: usize, k_prime: usize, rng: &mut impl Rng) -> Result<KeyMaterial> {
    if k_prime < 1 || k_prime >= k {
        return Err(Error::parameter(format!(
            "payload count k'={k_prime} must satisfy 1 <= k' < k={k}"
        )));
    }
    let dummies = k - k_prime;
    // Partial Fisher-Yates over slot indices: the first `dummies` entries
    // form a uniform random subset.
    let mut slots: Vec<usize> = (0..k).collect();
    for i in 0..dummies {
        let j = i + rng.random_range(0..k - i);
        slots.swap(i, j);
    }
    let placement = BitVec::from_indices(k, slots[..dummies].iter().copied());
    Ok(KeyMaterial {
        flip: BitVec::random(dummies, rng),
        phase: BitVec::random(dummies, rng),
        basis: BitVec::random(dummies, rng),
        placement,
        k_prime,
    })
}

/// Preparation recipe and verification data for one dummy qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DummyState {
    /// Bit exponent of the X in `X^flip Z^phase H^basis |0⟩`.
    pub flip: bool,
    /// Bit exponent of the Z.
    pub phase: bool,
    /// Basis selector: false = computational, true = Hadamard.
    pub hadamard: bool,
    /// Outcome a measurement in the dummy's own basis must produce on an
    /// undisturbed carrier.
    pub expected: bool,
}

impl DummyState {
    /// The prepared single-qubit state.
    pub fn prepare(&self) -> StateVector {
        let mut state = StateVector::zero(1).expect("single qubit");
        if self.hadamard {
            state.apply_h(0);
        }
        if self.phase {
            state.apply_z(0);
        }
        if self.flip {
            state.apply_x(0);
        }
        state
    }
}

/// Verification descriptor: one entry per dummy, in placement order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DummySpec {
    pub states: Vec<DummyState>,
}

/// Expand key material into per-dummy preparation/verification entries.
///
/// Expected outcomes: a computational-basis dummy reads back its flip bit
/// (the Z factor only adjusts phase); a Hadamard-basis dummy reads back
/// its phase bit (the X factor acts on `|±⟩` as a global sign).
pub fn dummy_spec(keys: &KeyMaterial) -> DummySpec {
    let states = (0..keys.dummy_count())
        .map(|j| {
            let hadamard = keys.basis.get(j);
            DummyState {
                flip: keys.flip.get(j),
                phase: keys.phase.get(j),
                hadamard,
                expected: if hadamard {
                    keys.phase.get(j)
                } else {
                    keys.flip.get(j)
                },
            }
        })
        .collect();
    DummySpec { states }
}

/// The slot permutation a placement key defines on the register
/// `[payload_0 .. payload_{k'-1}, dummy_0 .. dummy_{d-1}]`: payload `i`
/// moves to the `i`-th clear bit of the placement, dummy `j` to the
/// `j`-th set bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotPermutation {
    forward: Vec<usize>,
}

impl SlotPermutation {
    pub fn from_placement(placement: &BitVec, k_prime: usize) -> Result<SlotPermutation> {
        let k = placement.len();
        if k_prime > k || placement.count_ones() != k - k_prime {
            return Err(Error::parameter(format!(
                "placement weight {} does not match {} dummy slots",
                placement.count_ones(),
                k.saturating_sub(k_prime)
            )));
        }
        let mut forward = Vec::with_capacity(k);
        forward.extend(placement.zeros_iter());
        forward.extend(placement.ones());
        Ok(SlotPermutation { forward })
    }

    /// `forward()[q]` is the destination slot of register position `q`
    /// (matches the statevector qubit-permutation convention).
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// The inverse map: `inverse()[slot]` is the register position that
    /// landed there.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.forward.len()];
        for (q, &dest) in self.forward.iter().enumerate() {
            inv[dest] = q;
        }
        inv
    }

    /// Permute an ordered slot list (generic oracle-side helper).
    pub fn apply_slots<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.forward.len() {
            return Err(Error::parameter(format!(
                "register holds {} slots, permutation expects {}",
                items.len(),
                self.forward.len()
            )));
        }
        let mut out = items.to_vec();
        for (q, &dest) in self.forward.iter().enumerate() {
            out[dest] = items[q].clone();
        }
        Ok(out)
    }

    /// Undo [`apply_slots`](Self::apply_slots).
    pub fn invert_slots<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.forward.len() {
            return Err(Error::parameter(format!(
                "register holds {} slots, permutation expects {}",
                items.len(),
                self.forward.len()
            )));
        }
        let mut out = items.to_vec();
        for (q, &dest) in self.forward.iter().enumerate() {
            out[q] = items[dest].clone();
        }
        Ok(out)
    }
}

/// One catalog candidate's residual error rate, for selection and
/// reporting.
#[derive(Clone, Debug)]
pub struct CodeCandidate {
    pub spec: CodeSpec,
    pub residual_rate: BigProbability,
}

fn rate_log10(p: &BigProbability) -> f64 {
    p.mantissa().log10() + f64::from(p.exp10())
}

/// Pick the smallest-n catalog code whose residual logical error rate at
/// the measured channel rate stays within the target; the rate model is
/// the binomial tail over more-than-`t` physical errors.
pub fn select_code(
    qber: f64,
    catalog: &[CodeSpec],
    target_residual: f64,
) -> Result<CodeCandidate> {
    if !(0.0..0.5).contains(&qber) {
        return Err(Error::parameter(format!(
            "channel error rate {qber} outside [0, 0.5)"
        )));
    }
    if catalog.is_empty() {
        return Err(Error::parameter("empty code catalog".to_string()));
    }
    let rate = NoiseRate::from_f64(qber);
    let mut candidates: Vec<CodeCandidate> = catalog
        .iter()
        .map(|spec| {
            let t = (spec.d as u64 - 1) / 2;
            logical_error_rate(spec.n as u64, t, &rate).map(|residual_rate| CodeCandidate {
                spec: spec.clone(),
                residual_rate,
            })
        })
        .collect::<Result<_>>()?;
    candidates.sort_by_key(|c| (c.spec.n, c.spec.name.clone()));
    let qualifies = |c: &CodeCandidate| {
        if c.residual_rate.is_zero() {
            target_residual >= 0.0
        } else {
            target_residual > 0.0 && rate_log10(&c.residual_rate) <= target_residual.log10()
        }
    };
    if let Some(found) = candidates.iter().find(|c| qualifies(c)) {
        return Ok(found.clone());
    }
    let best = candidates
        .iter()
        .min_by(|a, b| {
            let (la, lb) = (rate_log10(&a.residual_rate), rate_log10(&b.residual_rate));
            la.partial_cmp(&lb).expect("finite rate logs")
        })
        .expect("nonempty candidate list");
    Err(Error::Selection(format!(
        "no catalog code reaches residual rate {target_residual:e} at channel rate {qber}; \
         best available is {} at {}",
        best.spec.name, best.residual_rate
    )))
}
