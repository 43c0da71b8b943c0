//! Threat model: intercept-and-resend with syndrome-consistent spoofing.
//!
//! The attacker sits on one hop, captures the sealed carrier, and forwards
//! a substitute whose injected error matches the publicly declared
//! syndrome.  The attacker's choices are drawn only from channel-visible
//! data — the declared syndrome, the public code tables, and the protocol
//! parameters — never from key material, the true injected error, or any
//! oracle field.  [`AttackerView`] is that information barrier made
//! structural: spoof selection receives nothing else.
//!
//! Spoof selection is the attacker's *choice*; the physical swap mechanics
//! live in the session engine.  The engine models the attacker's best
//! case — the substitute carries the genuine sealed content with only the
//! injected error exchanged — so the measured detection rate isolates the
//! seal-class question instead of compounding it with the attacker's
//! inability to forge the secret codeword.

use rand::Rng;

use crate::bits::BitVec;
use crate::code::{builtin_code, Code};
use crate::error::{Error, Result};
use crate::exec;
use crate::protocol::{run_session_trial, AbortReason, Backend, SessionConfig, SessionOutcome};
use crate::sim::LogicalBasis;

/// How the attacker picks the substitute injected error for syndrome `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpoofPolicy {
    /// Uniform over all logical classes consistent with `s` (including the
    /// correctable one), times a uniform stabilizer element.
    UniformCoset,
    /// Exactly the public decoder representative of `s` — the correctable
    /// class.
    CopyRepresentative,
}

impl std::fmt::Display for SpoofPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpoofPolicy::UniformCoset => write!(f, "uniform-coset"),
            SpoofPolicy::CopyRepresentative => write!(f, "copy-representative"),
        }
    }
}

/// Adversary strategy for one session.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackStrategy {
    /// Honest channel: no interception.
    None,
    /// Capture the carrier at one hop, keep it, and forward a substitute
    /// whose injected error matches the declared syndrome.
    InterceptResend {
        spoof: SpoofPolicy,
        /// Exploratory variant: before forwarding, measure each logical
        /// slot of the carrier in a random logical basis (candidate-dummy
        /// probing).  Disturbs the carrier, so the receiver's own-basis
        /// checks can catch it.  Dense backend only; carries no analytic
        /// rate claim.
        probe: bool,
    },
}

impl AttackStrategy {
    /// Parse `none`, `intercept-resend:<policy>`, or
    /// `intercept-resend:<policy>:probe`.
    pub fn parse(text: &str) -> Result<AttackStrategy> {
        if text == "none" {
            return Ok(AttackStrategy::None);
        }
        if let Some(rest) = text.strip_prefix("intercept-resend:") {
            let (policy_text, probe) = match rest.strip_suffix(":probe") {
                Some(head) => (head, true),
                None => (rest, false),
            };
            let spoof = match policy_text {
                "uniform-coset" => SpoofPolicy::UniformCoset,
                "copy-representative" => SpoofPolicy::CopyRepresentative,
                other => {
                    return Err(Error::parse(format!("unknown spoof policy {other:?}")));
                }
            };
            return Ok(AttackStrategy::InterceptResend { spoof, probe });
        }
        Err(Error::parse(format!("unknown adversary strategy {text:?}")))
    }

    /// Whether any interception happens at all.
    pub fn is_active(&self) -> bool {
        !matches!(self, AttackStrategy::None)
    }

    /// Whether the strategy includes the state-disturbing probe variant.
    pub fn probes(&self) -> bool {
        matches!(self, AttackStrategy::InterceptResend { probe: true, .. })
    }
}

impl std::fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackStrategy::None => write!(f, "none"),
            AttackStrategy::InterceptResend { spoof, probe } => {
                write!(f, "intercept-resend:{spoof}")?;
                if *probe {
                    write!(f, ":probe")?;
                }
                Ok(())
            }
        }
    }
}

/// Everything the attacker is allowed to see when choosing a spoof: the
/// declared syndrome from the classical channel, the public code tables,
/// and the public protocol parameters.
pub struct AttackerView<'a> {
    pub syndrome: &'a BitVec,
    pub code: &'a Code,
    pub k_prime: usize,
}

/// The attacker's drawn choices for one trial.
#[derive(Clone, Debug)]
pub struct SpoofChoice {
    /// Logical class selector for the substitute injected error
    /// (`2k` bits).
    pub class_label: BitVec,
    /// Stabilizer selector mixed into the substitute (`n − k` bits).
    pub stabilizer_bits: BitVec,
    /// Uniform guess at the hidden dummy placement: a `k`-bit string of
    /// weight `k − k′`.
    pub placement_guess: BitVec,
}

/// Draw the attacker's spoof and extraction guesses.
///
/// Draw order is fixed (class label, stabilizer bits, placement guess) so
/// trial substreams replay identically.
pub fn choose_spoof(view: &AttackerView<'_>, policy: SpoofPolicy, rng: &mut impl Rng) -> SpoofChoice {
    let k = view.code.k();
    let m = view.code.syndrome_bits();
    let (class_label, stabilizer_bits) = match policy {
        SpoofPolicy::UniformCoset => (BitVec::random(2 * k, rng), BitVec::random(m, rng)),
        SpoofPolicy::CopyRepresentative => (BitVec::zeros(2 * k), BitVec::zeros(m)),
    };
    let dummies = k - view.k_prime;
    let mut slots: Vec<usize> = (0..k).collect();
    for i in 0..dummies {
        let j = i + rng.random_range(0..k - i);
        slots.swap(i, j);
    }
    let placement_guess = BitVec::from_indices(k, slots[..dummies].iter().copied());
    SpoofChoice {
        class_label,
        stabilizer_bits,
        placement_guess,
    }
}

/// 95% Wilson score interval for a binomial rate.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(successes <= trials, "successes exceed trials");
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // The bounds are exact at the extremes; don't let rounding blur them.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Aggregated outcome of an attack campaign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackReport {
    pub strategy: AttackStrategy,
    pub code_name: String,
    /// Logical slots `k` of the code under attack.
    pub logical_slots: usize,
    pub k_prime: usize,
    pub seed: u64,
    pub trials: u64,
    /// Sessions the receiver aborted (either check).
    pub detected: u64,
    /// Sessions delivered despite the interception.
    pub undetected: u64,
    /// Detected sessions that aborted at the residual check.
    pub residual_aborts: u64,
    /// Detected sessions that aborted at the dummy check.
    pub dummy_aborts: u64,
    /// Trials where the substitute hit the true injected error's logical
    /// class.
    pub class_matches: u64,
    /// Trials where the uniform placement guess matched the hidden
    /// placement key.
    pub placement_successes: u64,
    /// Trials where both the class and the placement guess were right —
    /// the attacker holds everything needed to read the payload.
    pub extraction_successes: u64,
}

impl AttackReport {
    fn rate(&self, count: u64) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            count as f64 / self.trials as f64
        }
    }

    /// Fraction of trials the receiver aborted.
    pub fn detection_rate(&self) -> f64 {
        self.rate(self.detected)
    }

    /// Fraction of trials delivered despite the interception.
    pub fn pass_rate(&self) -> f64 {
        self.rate(self.undetected)
    }

    /// Fraction of trials with a correct placement guess.
    pub fn placement_rate(&self) -> f64 {
        self.rate(self.placement_successes)
    }

    /// Fraction of trials with a correct class choice.
    pub fn class_match_rate(&self) -> f64 {
        self.rate(self.class_matches)
    }

    /// Fraction of trials where the attacker got both secrets right.
    pub fn extraction_rate(&self) -> f64 {
        self.rate(self.extraction_successes)
    }

    /// 95% Wilson interval for the pass rate.
    pub fn pass_interval(&self) -> (f64, f64) {
        wilson_interval(self.undetected, self.trials)
    }

    /// 95% Wilson interval for the placement-guess rate.
    pub fn placement_interval(&self) -> (f64, f64) {
        wilson_interval(self.placement_successes, self.trials)
    }

    /// 95% Wilson interval for the joint extraction rate.
    pub fn extraction_interval(&self) -> (f64, f64) {
        wilson_interval(self.extraction_successes, self.trials)
    }
}

#[derive(Default)]
struct CampaignCounts {
    trials: u64,
    detected: u64,
    undetected: u64,
    residual_aborts: u64,
    dummy_aborts: u64,
    class_matches: u64,
    placement_successes: u64,
    extraction_successes: u64,
    fault: Option<String>,
}

impl CampaignCounts {
    fn merge(mut self, other: CampaignCounts) -> CampaignCounts {
        self.trials += other.trials;
        self.detected += other.detected;
        self.undetected += other.undetected;
        self.residual_aborts += other.residual_aborts;
        self.dummy_aborts += other.dummy_aborts;
        self.class_matches += other.class_matches;
        self.placement_successes += other.placement_successes;
        self.extraction_successes += other.extraction_successes;
        if self.fault.is_none() {
            self.fault = other.fault;
        }
        self
    }
}

/// Run `trials` independent sessions under the configured strategy and
/// aggregate detection and extraction statistics.
///
/// Deterministic for a fixed seed: every trial draws from its own
/// substream and partial counts merge in canonical chunk order, so the
/// thread count never changes the report.
pub fn run_attack_campaign(config: &SessionConfig, trials: u64) -> Result<AttackReport> {
    if trials == 0 {
        return Err(Error::parameter("attack campaign needs at least one trial"));
    }
    let code = builtin_code(&config.code_name)?;
    config.validate(&code)?;
    let basis = match config.backend {
        Backend::StateVector => Some(LogicalBasis::for_code(&code)?),
        Backend::Frame => None,
    };
    let worker = |first: u64, last: u64| -> CampaignCounts {
        let mut counts = CampaignCounts::default();
        for trial in first..last {
            let report = match run_session_trial(&code, basis.as_ref(), config, trial) {
                Ok(report) => report,
                Err(fault) => {
                    counts.fault.get_or_insert_with(|| fault.to_string());
                    continue;
                }
            };
            counts.trials += 1;
            match report.outcome {
                SessionOutcome::Delivered { .. } => counts.undetected += 1,
                SessionOutcome::Aborted { reason } => {
                    counts.detected += 1;
                    match reason {
                        AbortReason::NonZeroSyndrome => counts.residual_aborts += 1,
                        AbortReason::DummyMismatch => counts.dummy_aborts += 1,
                    }
                }
            }
            if report.oracle.class_match == Some(true) {
                counts.class_matches += 1;
            }
            if report.oracle.placement_correct == Some(true) {
                counts.placement_successes += 1;
            }
            if report.oracle.class_match == Some(true)
                && report.oracle.placement_correct == Some(true)
            {
                counts.extraction_successes += 1;
            }
        }
        counts
    };
    let counts = exec::parallel_trials(trials, worker, CampaignCounts::merge);
    if let Some(fault) = counts.fault {
        return Err(Error::Validation(format!("campaign trial faulted: {fault}")));
    }
    debug_assert_eq!(counts.trials, trials);
    debug_assert_eq!(counts.detected + counts.undetected, trials);
    Ok(AttackReport {
        strategy: config.adversary,
        code_name: config.code_name.clone(),
        logical_slots: code.k(),
        k_prime: config.k_prime,
        seed: config.seed,
        trials,
        detected: counts.detected,
        undetected: counts.undetected,
        residual_aborts: counts.residual_aborts,
        dummy_aborts: counts.dummy_aborts,
        class_matches: counts.class_matches,
        placement_successes: counts.placement_successes,
        extraction_successes: counts.extraction_successes,
    })
}
