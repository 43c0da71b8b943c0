//! Transport-cost accounting for the relayed-teleportation alternative.
//!
//! Moving a register through a chain of entanglement-swapping relays costs
//! pairs for the nested purification tree, plus classical rounds, and the
//! whole chain must be repeated until every swap stage succeeds. The counts
//! here are exact: repetitions come from a ceiling of an exact rational
//! power, and totals are big integers, so deep chains never saturate a
//! machine word.

use num::bigint::BigUint;
use num::{One, ToPrimitive};

use crate::analysis::bigprob::Magnitude;
use crate::error::{Error, Result};

/// Deepest nesting level accepted. At `N = 20` the repetition count for
/// small measurement registers already holds tens of thousands of digits;
/// beyond that the numbers stop being meaningful to report.
pub const MAX_NESTING: u32 = 20;

/// Exact cost breakdown for one relayed transport.
#[derive(Clone, Debug)]
pub struct OverheadBreakdown {
    /// Nesting depth of the purification tree.
    pub nesting: u32,
    /// Raw pairs consumed per segment at the bottom of the tree.
    pub pairs_per_segment: u64,
    /// Entangled pairs consumed by one attempt: `2·N_A·(2^(N+1) - 1)`.
    pub entangled_pairs: BigUint,
    /// Swap stages the chain performs: `2^N - 1`.
    pub swap_stages: BigUint,
    /// Probability that every stage's measurement succeeds in one attempt:
    /// `(1 - 2^-m)^(2^N - 1)` for an `m`-qubit stage register.
    pub success_probability: f64,
    /// Attempts needed so the expected number of full successes reaches
    /// one: `⌈(2^m / (2^m - 1))^(2^N - 1)⌉`, exact.
    pub repetitions: BigUint,
    /// Classical transmissions per attempt: `2·(2^N - 1)·(m - 1)`.
    pub classical_per_attempt: BigUint,
    /// Grand total: `(entangled_pairs + classical_per_attempt) ·
    /// repetitions`.
    pub total: BigUint,
}

impl OverheadBreakdown {
    /// The total as a displayable magnitude.
    pub fn total_magnitude(&self) -> Magnitude {
        Magnitude::from_bigint(self.total.clone().into())
    }
}

/// Cost of one relayed transport with nesting depth `nesting`,
/// `pairs_per_segment` raw pairs at each leaf, and an `m = bsm_qubits`
/// measurement register at every swap stage.
pub fn teleport_overhead(
    nesting: u32,
    pairs_per_segment: u64,
    bsm_qubits: u32,
) -> Result<OverheadBreakdown> {
    if nesting == 0 || nesting > MAX_NESTING {
        return Err(Error::parameter(format!(
            "nesting depth {nesting} outside 1..={MAX_NESTING}"
        )));
    }
    if pairs_per_segment == 0 {
        return Err(Error::parameter("need at least one pair per segment".to_string()));
    }
    if bsm_qubits < 2 {
        return Err(Error::parameter(
            "stage measurement needs at least two qubits".to_string(),
        ));
    }

    let segments = (BigUint::one() << (nesting as usize + 1)) - BigUint::one();
    let entangled_pairs = BigUint::from(2u32) * BigUint::from(pairs_per_segment) * &segments;
    let swap_stages = (BigUint::one() << nesting as usize) - BigUint::one();

    // 2^m and 2^m - 1 drive both the success probability and the exact
    // repetition count.
    let m = bsm_qubits as usize;
    let pow = BigUint::one() << m;
    let pow_minus = &pow - BigUint::one();
    let stages = swap_stages
        .to_u64()
        .expect("2^N - 1 fits u64 for N ≤ 20");

    let per_stage = 1.0 - 0.5f64.powi(bsm_qubits as i32);
    let success_probability = per_stage.powf(stages as f64);

    // repetitions = ⌈ 2^(m·stages) / (2^m - 1)^stages ⌉, computed exactly.
    let numerator = BigUint::one() << (m * stages as usize);
    let denominator = pow_minus.pow(stages as u32);
    let mut repetitions = &numerator / &denominator;
    if &repetitions * &denominator != numerator {
        repetitions += BigUint::one();
    }

    let classical_per_attempt =
        BigUint::from(2u32) * &swap_stages * BigUint::from(bsm_qubits as u64 - 1);
    let total = (&entangled_pairs + &classical_per_attempt) * &repetitions;

    Ok(OverheadBreakdown {
        nesting,
        pairs_per_segment,
        entangled_pairs,
        swap_stages,
        success_probability,
        repetitions,
        classical_per_attempt,
        total,
    })
}
