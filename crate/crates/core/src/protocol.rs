//! Session choreography: sender, relays, and receiver exchanging one
//! sealed block over a chain of noisy hops, plus the classical message
//! flow that reveals the seal and the keys in tamper-gated stages.
//!
//! One session is a single-threaded deterministic event loop.  Every
//! party draws from its own seeded substream, so identical configs replay
//! byte-for-byte; campaigns fan trials out across threads with the merge
//! order fixed by [`crate::exec`].
//!
//! Two carrier backends share the choreography:
//!
//! * **dense** ([`Backend::StateVector`]) — the full state is simulated;
//!   measurements and fidelities are physical.
//! * **frame** ([`Backend::Frame`]) — only the accumulated physical error
//!   relative to the ideal session is tracked.  Exact for the scheme's
//!   native operations (everything here except attack probing), and fast
//!   enough for million-trial campaigns.
//!
//! Both carriers always track the ground-truth error frame; the dense
//! backend additionally evolves amplitudes, which is what lets the probe
//! attack variant disturb the state in a way no error frame can express.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::adversary::{choose_spoof, AttackStrategy, AttackerView};
use crate::analysis::bigprob::BigProbability;
use crate::analysis::rates::{logical_error_rate, NoiseRate};
use crate::bits::BitVec;
use crate::code::{builtin_code, Code, ErrorClass};
use crate::error::{Error, Result};
use crate::exec;
use crate::keys::{dummy_spec, keygen, KeyMaterial, SlotPermutation};
use crate::pauli::Pauli;
use crate::rng::{self, StreamRole};
use crate::sim::{ChannelModel, LogicalBasis, PauliFrame, StateVector, STATEVECTOR_MAX_QUBITS};

const SENDER: &str = "sender";
const RECEIVER: &str = "receiver";

/// Carrier simulation backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Dense amplitudes: physical measurements, payload fidelity, probe
    /// attacks. Capped at [`STATEVECTOR_MAX_QUBITS`].
    StateVector,
    /// Error-frame bookkeeping only: exact for the native operation set,
    /// fast enough for large campaigns.
    Frame,
}

impl Backend {
    pub fn parse(text: &str) -> Result<Backend> {
        match text {
            "statevector" => Ok(Backend::StateVector),
            "frame" => Ok(Backend::Frame),
            other => Err(Error::parse(format!("unknown backend {other:?}"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::StateVector => write!(f, "statevector"),
            Backend::Frame => write!(f, "frame"),
        }
    }
}

/// Full description of one session: code, payload split, topology,
/// noise, adversary, and determinism seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Catalog name of the block code.
    pub code_name: String,
    /// Payload width `k′` (the remaining `k − k′` logical slots carry
    /// dummies).
    pub k_prime: usize,
    /// Root seed; all party substreams derive from it.
    pub seed: u64,
    /// Carrier backend.
    pub backend: Backend,
    /// One channel model per hop; `len() − 1` relay nodes sit between.
    pub channels: Vec<ChannelModel>,
    /// Adversary strategy.
    pub adversary: AttackStrategy,
    /// Hop index the adversary taps (carrier is intercepted before that
    /// hop's own noise acts).
    pub attack_hop: usize,
    /// Skip the zero syndrome when sampling the injected error, so the
    /// declared syndrome is always informative.
    pub exclude_zero_syndrome: bool,
    /// Gate delivery on the revealed seal cancelling the accumulated
    /// error exactly (idealized tamper signature).  When off, only the
    /// physically measurable syndrome gates the run, and logically
    /// corrupted blocks can slip through — the oracle log records them.
    pub tamper_signature: bool,
}

impl SessionConfig {
    /// A single-hop, noiseless, honest, dense-backend config.
    pub fn new(code_name: impl Into<String>, k_prime: usize, seed: u64) -> SessionConfig {
        SessionConfig {
            code_name: code_name.into(),
            k_prime,
            seed,
            backend: Backend::StateVector,
            channels: vec![ChannelModel::Ideal],
            adversary: AttackStrategy::None,
            attack_hop: 0,
            exclude_zero_syndrome: true,
            tamper_signature: true,
        }
    }

    /// Parse the structured-text config format (see `docs/formats.md`):
    /// `key: value` lines, `#` comments, and one optional `topology:`
    /// section listing the party chain and per-hop channel models.
    pub fn parse(text: &str) -> Result<SessionConfig> {
        let mut code_name = None;
        let mut k_prime = None;
        let mut seed = None;
        let mut backend = Backend::StateVector;
        let mut exclude_zero_syndrome = true;
        let mut tamper_signature = true;
        let mut adversary = AttackStrategy::None;
        let mut attack_hop = 0usize;
        let mut seen = std::collections::HashSet::new();
        let mut in_topology = false;
        let mut parties: Vec<String> = Vec::new();
        let mut channels: Vec<ChannelModel> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(format!("config line {lineno}: expected key: value")))?;
            let (key, value) = (key.trim(), value.trim());
            if !in_topology {
                if key == "topology" {
                    if !value.is_empty() {
                        return Err(Error::parse(format!(
                            "config line {lineno}: topology introduces a section, not a value"
                        )));
                    }
                    in_topology = true;
                    continue;
                }
                if !seen.insert(key.to_string()) {
                    return Err(Error::parse(format!(
                        "config line {lineno}: duplicate key {key:?}"
                    )));
                }
                let bad_num =
                    |what: &str| Error::parse(format!("config line {lineno}: bad {what} {value:?}"));
                match key {
                    "code" => code_name = Some(value.to_string()),
                    "kprime" => {
                        k_prime = Some(value.parse().map_err(|_| bad_num("payload width"))?)
                    }
                    "seed" => seed = Some(value.parse().map_err(|_| bad_num("seed"))?),
                    "backend" => backend = Backend::parse(value)?,
                    "exclude-zero-syndrome" => {
                        exclude_zero_syndrome = parse_bool(value, lineno)?
                    }
                    "tamper-signature" => tamper_signature = parse_bool(value, lineno)?,
                    "adversary" => adversary = AttackStrategy::parse(value)?,
                    "attack-hop" => {
                        attack_hop = value.parse().map_err(|_| bad_num("attack hop"))?
                    }
                    other => {
                        return Err(Error::parse(format!(
                            "config line {lineno}: unknown key {other:?}"
                        )));
                    }
                }
            } else {
                match key {
                    "party" => {
                        if parties.len() != channels.len() {
                            return Err(Error::parse(format!(
                                "config line {lineno}: expected a hop before the next party"
                            )));
                        }
                        match (value, parties.is_empty(), parties.last()) {
                            (_, _, Some(last)) if last == RECEIVER => {
                                return Err(Error::parse(format!(
                                    "config line {lineno}: no party may follow the receiver"
                                )));
                            }
                            ("sender", true, _) => parties.push(value.to_string()),
                            ("relay" | "receiver", false, _) => parties.push(value.to_string()),
                            ("sender", false, _) => {
                                return Err(Error::parse(format!(
                                    "config line {lineno}: sender must come first and only once"
                                )));
                            }
                            _ => {
                                return Err(Error::parse(format!(
                                    "config line {lineno}: unknown party {value:?} (or chain must start at sender)"
                                )));
                            }
                        }
                    }
                    "hop" => {
                        if parties.len() != channels.len() + 1 {
                            return Err(Error::parse(format!(
                                "config line {lineno}: a hop needs a party on each side"
                            )));
                        }
                        if parties.last().map(String::as_str) == Some(RECEIVER) {
                            return Err(Error::parse(format!(
                                "config line {lineno}: no hop may follow the receiver"
                            )));
                        }
                        channels.push(ChannelModel::parse(value)?);
                    }
                    other => {
                        return Err(Error::parse(format!(
                            "config line {lineno}: unknown topology key {other:?}"
                        )));
                    }
                }
            }
        }

        let code_name: String =
            code_name.ok_or_else(|| Error::parse("config is missing required key \"code\""))?;
        let k_prime =
            k_prime.ok_or_else(|| Error::parse("config is missing required key \"kprime\""))?;
        let seed = seed.ok_or_else(|| Error::parse("config is missing required key \"seed\""))?;
        if in_topology {
            if parties.len() < 2 || parties.last().map(String::as_str) != Some(RECEIVER) {
                return Err(Error::parse(
                    "topology must run from sender to receiver with a hop between each pair",
                ));
            }
        } else {
            channels.push(ChannelModel::Ideal);
        }
        Ok(SessionConfig {
            code_name,
            k_prime,
            seed,
            backend,
            channels,
            adversary,
            attack_hop,
            exclude_zero_syndrome,
            tamper_signature,
        })
    }

    /// Canonical config text: `parse(canonical_text())` reproduces the
    /// config exactly, and equal configs produce identical text.
    pub fn canonical_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "code: {}", self.code_name);
        let _ = writeln!(out, "kprime: {}", self.k_prime);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "backend: {}", self.backend);
        let _ = writeln!(out, "exclude-zero-syndrome: {}", self.exclude_zero_syndrome);
        let _ = writeln!(out, "tamper-signature: {}", self.tamper_signature);
        let _ = writeln!(out, "adversary: {}", self.adversary);
        let _ = writeln!(out, "attack-hop: {}", self.attack_hop);
        let _ = writeln!(out, "topology:");
        let _ = writeln!(out, "  party: sender");
        for (h, channel) in self.channels.iter().enumerate() {
            let _ = writeln!(out, "  hop: {channel}");
            let party = if h + 1 < self.channels.len() {
                "relay"
            } else {
                RECEIVER
            };
            let _ = writeln!(out, "  party: {party}");
        }
        out
    }

    /// Number of quantum hops (relay count is one less).
    pub fn hops(&self) -> usize {
        self.channels.len()
    }

    /// Check the config against the chosen code and the backend limits.
    pub fn validate(&self, code: &Code) -> Result<()> {
        if code.name() != self.code_name {
            return Err(Error::parameter(format!(
                "config names code {:?} but was validated against {:?}",
                self.code_name,
                code.name()
            )));
        }
        let k = code.k();
        if self.k_prime < 1 || self.k_prime >= k {
            return Err(Error::parameter(format!(
                "payload width k\u{2032} = {} must satisfy 1 \u{2264} k\u{2032} < k = {k} so the block hosts at least one dummy and one payload slot",
                self.k_prime
            )));
        }
        if self.channels.is_empty() {
            return Err(Error::parameter("topology needs at least one hop"));
        }
        if self.adversary.is_active() && self.attack_hop >= self.channels.len() {
            return Err(Error::parameter(format!(
                "attack hop {} out of range for {} hops",
                self.attack_hop,
                self.channels.len()
            )));
        }
        if self.adversary.probes() && self.backend != Backend::StateVector {
            return Err(Error::parameter(
                "the probing attack variant disturbs amplitudes and needs the dense backend",
            ));
        }
        if self.backend == Backend::StateVector && code.n() > STATEVECTOR_MAX_QUBITS {
            return Err(Error::capacity(format!(
                "code {} has {} qubits, beyond the dense-backend cap {STATEVECTOR_MAX_QUBITS}; use the frame backend",
                code.name(),
                code.n()
            )));
        }
        for channel in &self.channels {
            if let ChannelModel::FixedWeight { weight } = channel {
                if *weight > code.n() {
                    return Err(Error::parameter(format!(
                        "fixed-weight channel weight {weight} exceeds block size {}",
                        code.n()
                    )));
                }
            }
        }
        Ok(())
    }
}

fn parse_bool(value: &str, lineno: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::parse(format!(
            "config line {lineno}: expected true or false, got {other:?}"
        ))),
    }
}

/// Why the receiver refused delivery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbortReason {
    /// The revealed seal did not cancel the accumulated error.
    NonZeroSyndrome,
    /// A dummy measured in its own basis contradicted the key material.
    DummyMismatch,
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AbortReason::NonZeroSyndrome => "nonzero-syndrome",
            AbortReason::DummyMismatch => "dummy-mismatch",
        })
    }
}

/// One authenticated classical message.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalMessage {
    /// Sender declares the syndrome of the injected error.
    Syndrome { s: BitVec },
    /// Receiver confirms arrival and correction to the declared syndrome.
    Ack1,
    /// Sender reveals the injected error (phase-stripped).
    RevealInjection { injected: Pauli },
    /// Receiver confirms the seal cancelled cleanly.
    Ack2,
    /// Sender reveals placement and dummy keys.
    RevealKeys { keys: KeyMaterial },
    /// Receiver refuses delivery.
    Abort { reason: AbortReason },
}

impl ClassicalMessage {
    /// Wire type tag.
    pub fn type_tag(&self) -> &'static str {
        match self {
            ClassicalMessage::Syndrome { .. } => "syndrome",
            ClassicalMessage::Ack1 => "ack1",
            ClassicalMessage::RevealInjection { .. } => "reveal-injection",
            ClassicalMessage::Ack2 => "ack2",
            ClassicalMessage::RevealKeys { .. } => "reveal-keys",
            ClassicalMessage::Abort { .. } => "abort",
        }
    }

    fn body_hex(&self) -> String {
        match self {
            ClassicalMessage::Syndrome { s } => s.to_hex(),
            ClassicalMessage::Ack1 | ClassicalMessage::Ack2 => "-".to_string(),
            ClassicalMessage::RevealInjection { injected } => {
                bytes_to_hex(&injected.to_wire_bytes())
            }
            ClassicalMessage::RevealKeys { keys } => keys.to_wire_bits().to_hex(),
            ClassicalMessage::Abort { reason } => match reason {
                AbortReason::NonZeroSyndrome => "01".to_string(),
                AbortReason::DummyMismatch => "02".to_string(),
            },
        }
    }
}

/// One transcript entry: a classical message with its position and
/// endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageRecord {
    pub seq: u32,
    pub from: String,
    pub to: String,
    pub message: ClassicalMessage,
}

impl MessageRecord {
    /// One-line wire form: `seq from to type hexbody` (`-` for an empty
    /// body; bit-vectors hex-encode most-significant-bit first).
    pub fn to_line(&self) -> String {
        format!(
            "{} {} {} {} {}",
            self.seq,
            self.from,
            self.to,
            self.message.type_tag(),
            self.message.body_hex()
        )
    }
}

fn bytes_to_hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(2 * bytes.len());
    for b in bytes {
        out.push(char::from_digit((b >> 4) as u32, 16).expect("nibble"));
        out.push(char::from_digit((b & 0xf) as u32, 16).expect("nibble"));
    }
    out
}

fn hex_to_bytes(text: &str) -> Result<Vec<u8>> {
    if !text.len().is_multiple_of(2) {
        return Err(Error::parse(format!("odd-length hex body {text:?}")));
    }
    let mut out = Vec::with_capacity(text.len() / 2);
    let digits = text.as_bytes();
    for pair in digits.chunks_exact(2) {
        let hi = (pair[0] as char).to_digit(16);
        let lo = (pair[1] as char).to_digit(16);
        match (hi, lo) {
            (Some(hi), Some(lo)) => out.push(((hi << 4) | lo) as u8),
            _ => return Err(Error::parse(format!("bad hex body {text:?}"))),
        }
    }
    Ok(out)
}

/// Render a transcript to its line-per-message text form.
pub fn transcript_to_text(records: &[MessageRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&record.to_line());
        out.push('\n');
    }
    out
}

/// Parse a transcript back from text. Body sizes depend on the session
/// shape, so the block size `n`, logical width `k`, and payload width
/// `k′` must be supplied.
pub fn transcript_from_text(
    text: &str,
    n: usize,
    k: usize,
    k_prime: usize,
) -> Result<Vec<MessageRecord>> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(format!(
                "transcript line {lineno}: expected 5 fields, got {}",
                fields.len()
            )));
        }
        let seq: u32 = fields[0]
            .parse()
            .map_err(|_| Error::parse(format!("transcript line {lineno}: bad seq")))?;
        let (from, to, tag, body) = (fields[1], fields[2], fields[3], fields[4]);
        let message = match tag {
            "syndrome" => ClassicalMessage::Syndrome {
                s: BitVec::from_hex(body, n - k)?,
            },
            "ack1" => ClassicalMessage::Ack1,
            "ack2" => ClassicalMessage::Ack2,
            "reveal-injection" => {
                let bytes = hex_to_bytes(body)?;
                ClassicalMessage::RevealInjection {
                    injected: Pauli::from_wire_bytes(&bytes, n)?,
                }
            }
            "reveal-keys" => {
                let bits = BitVec::from_hex(body, k + 3 * (k - k_prime))?;
                ClassicalMessage::RevealKeys {
                    keys: KeyMaterial::from_wire_bits(&bits, k, k_prime)?,
                }
            }
            "abort" => ClassicalMessage::Abort {
                reason: match body {
                    "01" => AbortReason::NonZeroSyndrome,
                    "02" => AbortReason::DummyMismatch,
                    other => {
                        return Err(Error::parse(format!(
                            "transcript line {lineno}: unknown abort code {other:?}"
                        )));
                    }
                },
            },
            other => {
                return Err(Error::parse(format!(
                    "transcript line {lineno}: unknown message type {other:?}"
                )));
            }
        };
        records.push(MessageRecord {
            seq,
            from: from.to_string(),
            to: to.to_string(),
            message,
        });
    }
    Ok(records)
}

/// Check a complete session transcript against the protocol's ordering
/// and secrecy invariants: consecutive sequence numbers, correct
/// directions, and exactly one of the three legal shapes (delivered,
/// refused at the seal check, refused at the dummy check).  In
/// particular the keys never appear before the second acknowledgment and
/// the seal never before the first.
pub fn audit_transcript(records: &[MessageRecord]) -> Result<()> {
    let fault = |msg: String| Err(Error::ProtocolOrder(msg));
    let tags: Vec<&str> = records.iter().map(|r| r.message.type_tag()).collect();
    const DELIVERED: [&str; 5] = ["syndrome", "ack1", "reveal-injection", "ack2", "reveal-keys"];
    const DUMMY_REFUSED: [&str; 6] = [
        "syndrome",
        "ack1",
        "reveal-injection",
        "ack2",
        "reveal-keys",
        "abort",
    ];
    const SEAL_REFUSED: [&str; 4] = ["syndrome", "ack1", "reveal-injection", "abort"];
    let shape_ok = tags == DELIVERED || tags == DUMMY_REFUSED || tags == SEAL_REFUSED;
    if !shape_ok {
        return fault(format!("illegal transcript shape {tags:?}"));
    }
    for (idx, record) in records.iter().enumerate() {
        if record.seq as usize != idx {
            return fault(format!(
                "sequence number {} at transcript position {idx}",
                record.seq
            ));
        }
        let sender_originated = matches!(
            record.message,
            ClassicalMessage::Syndrome { .. }
                | ClassicalMessage::RevealInjection { .. }
                | ClassicalMessage::RevealKeys { .. }
        );
        let (want_from, want_to) = if sender_originated {
            (SENDER, RECEIVER)
        } else {
            (RECEIVER, SENDER)
        };
        if record.from != want_from || record.to != want_to {
            return fault(format!(
                "message {} must flow {want_from} \u{2192} {want_to}",
                record.message.type_tag()
            ));
        }
        if let ClassicalMessage::Abort { reason } = record.message {
            let want = if tags.len() == SEAL_REFUSED.len() {
                AbortReason::NonZeroSyndrome
            } else {
                AbortReason::DummyMismatch
            };
            if reason != want {
                return fault(format!("abort reason {reason:?} at the wrong stage"));
            }
        }
    }
    Ok(())
}

/// How the session ended.
#[derive(Clone, Debug, PartialEq)]
pub enum SessionOutcome {
    /// The receiver accepted the block.  The dense backend reports the
    /// measured payload fidelity; the frame backend reports `Some(1.0)`
    /// when the accumulated error provably acts trivially on the payload
    /// slots and `None` when the payload is corrupted in a way the frame
    /// cannot quantify.
    Delivered { fidelity: Option<f64> },
    /// The receiver refused the block.
    Aborted { reason: AbortReason },
}

impl SessionOutcome {
    pub fn is_delivered(&self) -> bool {
        matches!(self, SessionOutcome::Delivered { .. })
    }
}

/// Ground-truth record of one session, visible to the harness and the
/// reports but to no protocol party.
#[derive(Clone, Debug)]
pub struct OracleLog {
    /// The true injected error.
    pub injected: Pauli,
    /// Its syndrome/class decomposition.
    pub injected_class: ErrorClass,
    /// Substitute injected error forwarded by the adversary.
    pub spoofed: Option<Pauli>,
    /// Logical class label the adversary chose.
    pub spoof_label: Option<BitVec>,
    /// Whether the spoof hit the true logical class.
    pub class_match: Option<bool>,
    /// The adversary's uniform placement guess.
    pub placement_guess: Option<BitVec>,
    /// Whether that guess matched the hidden placement key.
    pub placement_correct: Option<bool>,
    /// Per-hop channel error realizations.
    pub channel_errors: Vec<Pauli>,
    /// Class of the accumulated error after the receiver applied the
    /// revealed seal (Pauli dynamics only; probe disturbance is invisible
    /// here and shows up in the measured fidelity instead).
    pub residual_class: ErrorClass,
    /// The block was delivered although the accumulated error acts
    /// nontrivially on payload slots.
    pub undetected_logical_failure: bool,
    /// The sender's key material.
    pub keys: KeyMaterial,
    /// Expected dummy outcomes in key order.
    pub dummy_expected: Vec<bool>,
    /// Measured dummy outcomes (when the session reached the dummy
    /// check).
    pub dummy_outcomes: Option<Vec<bool>>,
    /// The original payload state (dense backend).
    pub payload: Option<StateVector>,
    /// Population the decoder found outside the code space (dense
    /// backend, dummy-check stage).
    pub leakage: Option<f64>,
}

/// Everything one session produced.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub outcome: SessionOutcome,
    pub transcript: Vec<MessageRecord>,
    /// Syndrome observed by each receiving node (relays, then receiver)
    /// before its correction, one per hop.
    pub hop_syndromes: Vec<BitVec>,
    /// An adversary was active and the session aborted.
    pub adversary_detected: bool,
    pub oracle: OracleLog,
}

/// The quantum state in transit: optional dense amplitudes plus the
/// ground-truth error frame that every physical Pauli also updates.
struct QuantumCarrier {
    vector: Option<StateVector>,
    truth: PauliFrame,
}

impl QuantumCarrier {
    fn apply(&mut self, p: &Pauli) {
        if let Some(vector) = self.vector.as_mut() {
            vector.apply_pauli(p);
        }
        self.truth.apply(p);
    }

    /// Measure all generators. Dense backend: physical projective
    /// measurements (deterministic whenever the carrier is a syndrome
    /// eigenstate, which Pauli dynamics and logical-operator probes both
    /// preserve). Frame backend: read the frame.
    fn measure_syndrome(&mut self, code: &Code, rng: &mut ChaCha12Rng) -> BitVec {
        match self.vector.as_mut() {
            Some(vector) => {
                let mut bits = BitVec::zeros(code.syndrome_bits());
                for (i, g) in code.generators().iter().enumerate() {
                    bits.set(i, vector.measure_pauli(g, rng));
                }
                debug_assert_eq!(bits, self.truth.syndrome(code));
                bits
            }
            None => self.truth.syndrome(code),
        }
    }
}

/// Sender-side artifacts of block preparation.
struct SenderArtifacts {
    keys: KeyMaterial,
    injected: Pauli,
    declared: BitVec,
    carrier: QuantumCarrier,
    payload: Option<StateVector>,
}

/// Draw keys, sample the seal, and build the sealed carrier.
///
/// Sender-stream draw order is fixed: key material first, then the
/// injected error. The payload itself is a harness draw (it models the
/// application's data, not a protocol choice).
fn sender_prepare(
    code: &Code,
    basis: Option<&LogicalBasis>,
    config: &SessionConfig,
    sender_rng: &mut ChaCha12Rng,
    harness_rng: &mut ChaCha12Rng,
) -> Result<SenderArtifacts> {
    let keys = keygen(code.k(), config.k_prime, sender_rng)?;
    let injected = code
        .sample_uncorrectable(config.exclude_zero_syndrome, sender_rng)
        .phase_stripped();
    let declared = code.syndrome_of(&injected);
    let mut carrier = QuantumCarrier {
        vector: None,
        truth: PauliFrame::new(code.n()),
    };
    let mut payload = None;
    if let Some(basis) = basis {
        let sampled = StateVector::random(config.k_prime, harness_rng)?;
        let mut register = sampled.clone();
        for dummy in &dummy_spec(&keys).states {
            register = register.tensor(&dummy.prepare())?;
        }
        let perm = SlotPermutation::from_placement(keys.placement(), config.k_prime)?;
        register.permute_qubits(perm.forward());
        carrier.vector = Some(encode_and_seal(basis, &register, &injected)?);
        payload = Some(sampled);
    }
    carrier.truth.apply(&injected);
    Ok(SenderArtifacts {
        keys,
        injected,
        declared,
        carrier,
        payload,
    })
}

/// Encode a full logical register and apply a seal operator.  Test hook:
/// passing the identity seal must yield a clean codeword.
pub(crate) fn encode_and_seal(
    basis: &LogicalBasis,
    logical: &StateVector,
    seal: &Pauli,
) -> Result<StateVector> {
    let mut encoded = basis.encode(logical)?;
    encoded.apply_pauli(seal);
    Ok(encoded)
}

/// What a relay node sees and does: syndromes only, never key material
/// or payload amplitudes (the field types make that structural).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelayLog {
    /// Syndrome observed on arrival.
    pub observed: BitVec,
    /// Syndrome of the correction it applied to restore the declared
    /// value.
    pub correction: BitVec,
}

/// Measure the syndrome and steer it back to the declared value.
fn relay_correct(
    code: &Code,
    carrier: &mut QuantumCarrier,
    declared: &BitVec,
    rng: &mut ChaCha12Rng,
) -> RelayLog {
    let observed = carrier.measure_syndrome(code, rng);
    let correction = observed.xor(declared);
    let fix = code.rep(&correction).clone();
    carrier.apply(&fix);
    RelayLog {
        observed,
        correction,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    AwaitSyndrome,
    AwaitCarrier,
    AwaitInjection,
    AwaitKeys,
    Done,
}

/// Receiver state machine. Feeding a message out of protocol order is a
/// protocol-order fault, which is a caller bug — distinct from the
/// security aborts the receiver itself issues.
struct ReceiverNode<'a> {
    code: &'a Code,
    basis: Option<&'a LogicalBasis>,
    k_prime: usize,
    tamper_signature: bool,
    rng: ChaCha12Rng,
    stage: Stage,
    declared: Option<BitVec>,
    carrier: Option<QuantumCarrier>,
    residual: Option<ErrorClass>,
}

/// Receiver-side result of the key-reveal stage.
#[derive(Debug)]
struct ReceiverFinish {
    /// `Some` only when the receiver refuses at the dummy check.
    reply: Option<ClassicalMessage>,
    delivered: bool,
    dummy_outcomes: Vec<bool>,
    /// Decoded payload state (dense backend, delivered runs).
    extracted: Option<StateVector>,
    leakage: Option<f64>,
}

impl<'a> ReceiverNode<'a> {
    fn new(
        code: &'a Code,
        basis: Option<&'a LogicalBasis>,
        k_prime: usize,
        tamper_signature: bool,
        rng: ChaCha12Rng,
    ) -> ReceiverNode<'a> {
        ReceiverNode {
            code,
            basis,
            k_prime,
            tamper_signature,
            rng,
            stage: Stage::AwaitSyndrome,
            declared: None,
            carrier: None,
            residual: None,
        }
    }

    fn expect(&self, want: Stage, event: &str) -> Result<()> {
        if self.stage == want {
            Ok(())
        } else {
            Err(Error::ProtocolOrder(format!(
                "receiver got {event} while in stage {:?}",
                self.stage
            )))
        }
    }

    fn on_syndrome(&mut self, s: BitVec) -> Result<()> {
        self.expect(Stage::AwaitSyndrome, "a declared syndrome")?;
        if s.len() != self.code.syndrome_bits() {
            return Err(Error::parameter(format!(
                "declared syndrome has {} bits, expected {}",
                s.len(),
                self.code.syndrome_bits()
            )));
        }
        self.declared = Some(s);
        self.stage = Stage::AwaitCarrier;
        Ok(())
    }

    /// Take delivery of the carrier: measure its syndrome and correct it
    /// to the declared value. Returns the pre-correction observation and
    /// the first acknowledgment.
    fn receive_carrier(
        &mut self,
        mut carrier: QuantumCarrier,
    ) -> Result<(BitVec, ClassicalMessage)> {
        self.expect(Stage::AwaitCarrier, "the quantum carrier")?;
        let declared = self.declared.clone().expect("declared syndrome stored");
        let observed = carrier.measure_syndrome(self.code, &mut self.rng);
        let correction = observed.xor(&declared);
        let fix = self.code.rep(&correction).clone();
        carrier.apply(&fix);
        self.carrier = Some(carrier);
        self.stage = Stage::AwaitInjection;
        Ok((observed, ClassicalMessage::Ack1))
    }

    /// Apply the revealed seal and gate on the result: the measured
    /// syndrome must vanish, and — when the tamper signature is on — the
    /// accumulated error must be a pure stabilizer, i.e. the reveal must
    /// cancel it exactly.
    fn on_reveal_injection(&mut self, injected: &Pauli) -> Result<ClassicalMessage> {
        self.expect(Stage::AwaitInjection, "the seal reveal")?;
        let carrier = self.carrier.as_mut().expect("carrier stored");
        carrier.apply(injected);
        let syndrome = carrier.measure_syndrome(self.code, &mut self.rng);
        let residual = self.code.classify(&carrier.truth.residual());
        debug_assert_eq!(residual.syndrome, syndrome);
        let clean = if self.tamper_signature {
            syndrome.is_zero() && residual.logical.is_zero()
        } else {
            syndrome.is_zero()
        };
        self.residual = Some(residual);
        if clean {
            self.stage = Stage::AwaitKeys;
            Ok(ClassicalMessage::Ack2)
        } else {
            self.stage = Stage::Done;
            Ok(ClassicalMessage::Abort {
                reason: AbortReason::NonZeroSyndrome,
            })
        }
    }

    /// Decode, undo the placement permutation, verify every dummy in its
    /// own basis, and extract the payload when all of them check out.
    fn on_reveal_keys(&mut self, keys: &KeyMaterial) -> Result<ReceiverFinish> {
        self.expect(Stage::AwaitKeys, "the key reveal")?;
        if keys.k() != self.code.k() || keys.k_prime() != self.k_prime {
            return Err(Error::parameter(format!(
                "revealed keys describe a [{} / {}] split, expected [{} / {}]",
                keys.k(),
                keys.k_prime(),
                self.code.k(),
                self.k_prime
            )));
        }
        let spec = dummy_spec(keys);
        let expected: Vec<bool> = spec.states.iter().map(|d| d.expected).collect();
        let k = self.code.k();
        let d = k - self.k_prime;
        let perm = SlotPermutation::from_placement(keys.placement(), self.k_prime)?;
        let carrier = self.carrier.as_mut().expect("carrier stored");
        let (dummy_outcomes, extracted, leakage) = match carrier.vector.as_mut() {
            Some(vector) => {
                let basis = self.basis.expect("dense backend has a logical basis");
                let (mut logical, leakage) = basis.decode(vector)?;
                logical.permute_qubits(&perm.inverse());
                let mut outcomes = Vec::with_capacity(d);
                for (j, dummy) in spec.states.iter().enumerate() {
                    outcomes.push(logical.measure_qubit(
                        self.k_prime + j,
                        dummy.hadamard,
                        &mut self.rng,
                    ));
                }
                let extracted = if outcomes == expected {
                    for (j, dummy) in spec.states.iter().enumerate() {
                        if dummy.hadamard {
                            logical.apply_h(self.k_prime + j);
                        }
                    }
                    let mut dummy_index = 0usize;
                    for (j, &bit) in outcomes.iter().enumerate() {
                        if bit {
                            dummy_index |= 1 << (d - 1 - j);
                        }
                    }
                    let amps = logical.amplitudes();
                    let sliced: Vec<_> = (0..1usize << self.k_prime)
                        .map(|pi| amps[(pi << d) | dummy_index])
                        .collect();
                    Some(StateVector::from_amplitudes(self.k_prime, sliced)?)
                } else {
                    None
                };
                (outcomes, extracted, Some(leakage))
            }
            None => {
                // Pauli dynamics on the dummy slots is classical: each
                // own-basis readout flips exactly when the accumulated
                // error's visible component at that slot is set.
                let label = &self.residual.as_ref().expect("residual stored").logical;
                let positions = keys.dummy_positions();
                let outcomes: Vec<bool> = spec
                    .states
                    .iter()
                    .enumerate()
                    .map(|(j, dummy)| {
                        let p = positions[j];
                        let visible = if dummy.hadamard {
                            label.get(k + p)
                        } else {
                            label.get(p)
                        };
                        dummy.expected ^ visible
                    })
                    .collect();
                (outcomes, None, None)
            }
        };
        self.stage = Stage::Done;
        let delivered = dummy_outcomes == expected;
        Ok(ReceiverFinish {
            reply: (!delivered).then_some(ClassicalMessage::Abort {
                reason: AbortReason::DummyMismatch,
            }),
            delivered,
            dummy_outcomes,
            extracted,
            leakage,
        })
    }
}

/// Engine-side record of an executed interception.
struct AttackRecord {
    spoofed: Pauli,
    spoof_label: BitVec,
    placement_guess: BitVec,
}

/// Execute the configured interception on the carrier: draw the
/// attacker's choices from their own substream, optionally probe, then
/// substitute the injected error.
///
/// The substitution models the attacker's best case — the forwarded
/// carrier holds the genuine sealed content with only the seal class
/// exchanged — so detection statistics isolate the seal-class question.
/// Mechanically the engine strips the true seal (self-inverse up to
/// global phase) and applies the substitute built from the declared
/// syndrome's public representative.
fn execute_attack(
    code: &Code,
    carrier: &mut QuantumCarrier,
    injected: &Pauli,
    declared: &BitVec,
    k_prime: usize,
    strategy: AttackStrategy,
    rng: &mut ChaCha12Rng,
) -> AttackRecord {
    let AttackStrategy::InterceptResend { spoof, probe } = strategy else {
        unreachable!("execute_attack called without an active strategy");
    };
    let view = AttackerView {
        syndrome: declared,
        code,
        k_prime,
    };
    let choice = choose_spoof(&view, spoof, rng);
    if probe {
        for q in 0..code.k() {
            let in_x_basis = rng.random::<bool>();
            let op = if in_x_basis {
                &code.logical_x()[q]
            } else {
                &code.logical_z()[q]
            };
            let vector = carrier
                .vector
                .as_mut()
                .expect("probe variant validated to run on the dense backend");
            let _outcome = vector.measure_pauli(op, rng);
        }
    }
    let spoofed = code
        .rep(declared)
        .mul(&code.logical_class_rep(&choice.class_label))
        .mul(&code.stabilizer_element(&choice.stabilizer_bits))
        .phase_stripped();
    carrier.apply(injected);
    carrier.apply(&spoofed);
    AttackRecord {
        spoofed,
        spoof_label: choice.class_label,
        placement_guess: choice.placement_guess,
    }
}

/// Run one complete session under `config`.
pub fn run_session(config: &SessionConfig) -> Result<TrialReport> {
    let code = builtin_code(&config.code_name)?;
    config.validate(&code)?;
    let basis = match config.backend {
        Backend::StateVector => Some(LogicalBasis::for_code(&code)?),
        Backend::Frame => None,
    };
    run_session_trial(&code, basis.as_ref(), config, 0)
}

/// Run trial `trial` of a campaign: same config, per-trial substreams.
/// `basis` must be `Some` exactly for the dense backend (built once by
/// the caller, shared read-only across trials).
pub fn run_session_trial(
    code: &Code,
    basis: Option<&LogicalBasis>,
    config: &SessionConfig,
    trial: u64,
) -> Result<TrialReport> {
    config.validate(code)?;
    if basis.is_some() != (config.backend == Backend::StateVector) {
        return Err(Error::parameter(
            "logical basis must be supplied exactly for the dense backend",
        ));
    }
    let mut sender_rng = rng::stream(config.seed, trial, StreamRole::Sender);
    let receiver_rng = rng::stream(config.seed, trial, StreamRole::Receiver);
    let mut harness_rng = rng::stream(config.seed, trial, StreamRole::Harness);
    let mut attacker_rng = rng::stream(config.seed, trial, StreamRole::Attacker);

    let art = sender_prepare(code, basis, config, &mut sender_rng, &mut harness_rng)?;
    let mut receiver = ReceiverNode::new(
        code,
        basis,
        config.k_prime,
        config.tamper_signature,
        receiver_rng,
    );

    let mut transcript: Vec<MessageRecord> = Vec::with_capacity(6);
    let push = |transcript: &mut Vec<MessageRecord>, from: &str, to: &str, message| {
        let seq = transcript.len() as u32;
        transcript.push(MessageRecord {
            seq,
            from: from.to_string(),
            to: to.to_string(),
            message,
        });
    };

    push(
        &mut transcript,
        SENDER,
        RECEIVER,
        ClassicalMessage::Syndrome {
            s: art.declared.clone(),
        },
    );
    receiver.on_syndrome(art.declared.clone())?;

    // Quantum routing: interception, hop noise, relay corrections.
    let hops = config.channels.len();
    let mut carrier = art.carrier;
    let mut hop_syndromes = Vec::with_capacity(hops);
    let mut channel_errors = Vec::with_capacity(hops);
    let mut attack_record = None;
    for (h, channel) in config.channels.iter().enumerate() {
        if config.adversary.is_active() && h == config.attack_hop {
            attack_record = Some(execute_attack(
                code,
                &mut carrier,
                &art.injected,
                &art.declared,
                config.k_prime,
                config.adversary,
                &mut attacker_rng,
            ));
        }
        let mut channel_rng = rng::stream(config.seed, trial, StreamRole::Channel(h as u16));
        let e = channel.sample(code.n(), &mut channel_rng);
        carrier.apply(&e);
        channel_errors.push(e);
        if h + 1 < hops {
            let mut relay_rng = rng::stream(config.seed, trial, StreamRole::Relay(h as u16));
            let log = relay_correct(code, &mut carrier, &art.declared, &mut relay_rng);
            hop_syndromes.push(log.observed);
        }
    }
    let (observed, ack1) = receiver.receive_carrier(carrier)?;
    hop_syndromes.push(observed);
    push(&mut transcript, RECEIVER, SENDER, ack1);

    push(
        &mut transcript,
        SENDER,
        RECEIVER,
        ClassicalMessage::RevealInjection {
            injected: art.injected.clone(),
        },
    );
    let reply = receiver.on_reveal_injection(&art.injected)?;
    let seal_refused = matches!(reply, ClassicalMessage::Abort { .. });
    push(&mut transcript, RECEIVER, SENDER, reply);

    let mut dummy_outcomes = None;
    let mut extracted = None;
    let mut leakage = None;
    let mut delivered = false;
    if !seal_refused {
        push(
            &mut transcript,
            SENDER,
            RECEIVER,
            ClassicalMessage::RevealKeys {
                keys: art.keys.clone(),
            },
        );
        let finish = receiver.on_reveal_keys(&art.keys)?;
        delivered = finish.delivered;
        dummy_outcomes = Some(finish.dummy_outcomes);
        extracted = finish.extracted;
        leakage = finish.leakage;
        if let Some(abort) = finish.reply {
            push(&mut transcript, RECEIVER, SENDER, abort);
        }
    }
    audit_transcript(&transcript)?;

    let residual_class = receiver
        .residual
        .clone()
        .expect("every session reaches the seal check");
    let k = code.k();
    let label = &residual_class.logical;
    let payload_clean = residual_class.syndrome.is_zero()
        && art
            .keys
            .payload_positions()
            .iter()
            .all(|&q| !label.get(q) && !label.get(k + q));

    let outcome = if delivered {
        let fidelity = match (&extracted, &art.payload) {
            (Some(state), Some(original)) => Some(state.fidelity(original)),
            _ => payload_clean.then_some(1.0),
        };
        SessionOutcome::Delivered { fidelity }
    } else if seal_refused {
        SessionOutcome::Aborted {
            reason: AbortReason::NonZeroSyndrome,
        }
    } else {
        SessionOutcome::Aborted {
            reason: AbortReason::DummyMismatch,
        }
    };

    let injected_class = code.classify(&art.injected);
    let (spoofed, spoof_label, class_match, placement_guess, placement_correct) =
        match attack_record {
            Some(record) => {
                let class_match = record.spoof_label == injected_class.logical;
                let placement_correct = record.placement_guess == *art.keys.placement();
                (
                    Some(record.spoofed),
                    Some(record.spoof_label),
                    Some(class_match),
                    Some(record.placement_guess),
                    Some(placement_correct),
                )
            }
            None => (None, None, None, None, None),
        };

    let adversary_detected = config.adversary.is_active() && !outcome.is_delivered();
    let dummy_expected = dummy_spec(&art.keys).states.iter().map(|d| d.expected).collect();
    let oracle = OracleLog {
        injected: art.injected,
        injected_class,
        spoofed,
        spoof_label,
        class_match,
        placement_guess,
        placement_correct,
        channel_errors,
        residual_class,
        undetected_logical_failure: delivered && !payload_clean,
        keys: art.keys,
        dummy_expected,
        dummy_outcomes,
        payload: art.payload,
        leakage,
    };

    Ok(TrialReport {
        outcome,
        transcript,
        hop_syndromes,
        adversary_detected,
        oracle,
    })
}

/// Aggregate of a frame-backend error-rate campaign: per-trial channel
/// draws classified against the decoder, compared with the analytic
/// tail.
#[derive(Clone, Debug)]
pub struct MonteCarloReport {
    pub code_name: String,
    pub physical_rate: f64,
    pub trials: u64,
    pub failures: u64,
    pub seed: u64,
    /// Analytic residual rate (tail of more-than-radius errors).
    pub predicted: BigProbability,
}

impl MonteCarloReport {
    pub fn empirical_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }

    pub fn predicted_rate(&self) -> f64 {
        self.predicted.approx()
    }

    /// Binomial standard error of the empirical rate at the predicted
    /// value.
    pub fn sigma(&self) -> f64 {
        let p = self.predicted_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standardized distance between the empirical and predicted rates.
    pub fn z_score(&self) -> f64 {
        (self.empirical_rate() - self.predicted_rate()) / self.sigma()
    }
}

/// Estimate the residual (uncorrectable) error rate of one code under
/// independent depolarizing noise by classifying per-trial channel
/// draws, and pair it with the analytic tail.
///
/// Deterministic for a fixed seed regardless of thread count.
pub fn frame_montecarlo(
    code: &Code,
    rate: &NoiseRate,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::parameter("error-rate campaign needs at least one trial"));
    }
    if !(0.0..=1.0).contains(&rate.value) {
        return Err(Error::parameter(format!(
            "physical rate {} outside [0, 1]",
            rate.value
        )));
    }
    let predicted = logical_error_rate(code.n() as u64, code.radius() as u64, rate)?;
    let channel = ChannelModel::Depolarizing { p: rate.value };
    let n = code.n();
    let worker = |first: u64, last: u64| -> u64 {
        let mut failures = 0;
        for trial in first..last {
            let mut rng = rng::stream(seed, trial, StreamRole::Channel(0));
            let e = channel.sample(n, &mut rng);
            if !code.classify(&e).is_correctable() {
                failures += 1;
            }
        }
        failures
    };
    let failures = exec::parallel_trials(trials, worker, |a, b| a + b);
    Ok(MonteCarloReport {
        code_name: code.name().to_string(),
        physical_rate: rate.value,
        trials,
        failures,
        seed,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::SpoofPolicy;
    use crate::pauli::Letter;

    fn dense_config(code: &str, k_prime: usize, seed: u64) -> SessionConfig {
        SessionConfig::new(code, k_prime, seed)
    }

    fn frame_config(code: &str, k_prime: usize, seed: u64) -> SessionConfig {
        let mut config = SessionConfig::new(code, k_prime, seed);
        config.backend = Backend::Frame;
        config
    }

    #[test]
    fn wire_records_round_trip() {
        let mut rng = rng::root(61);
        let keys = keygen(3, 1, &mut rng).unwrap();
        let messages = vec![
            ClassicalMessage::Syndrome {
                s: BitVec::from_bit_string("10110").unwrap(),
            },
            ClassicalMessage::Ack1,
            ClassicalMessage::RevealInjection {
                injected: Pauli::random(8, &mut rng),
            },
            ClassicalMessage::Ack2,
            ClassicalMessage::RevealKeys { keys },
            ClassicalMessage::Abort {
                reason: AbortReason::NonZeroSyndrome,
            },
            ClassicalMessage::Abort {
                reason: AbortReason::DummyMismatch,
            },
        ];
        for (i, message) in messages.into_iter().enumerate() {
            let from = if i % 2 == 0 { SENDER } else { RECEIVER };
            let to = if i % 2 == 0 { RECEIVER } else { SENDER };
            let record = MessageRecord {
                seq: i as u32,
                from: from.to_string(),
                to: to.to_string(),
                message,
            };
            let parsed = transcript_from_text(&record.to_line(), 8, 3, 1).unwrap();
            assert_eq!(parsed.len(), 1);
            assert_eq!(parsed[0], record);
        }
        // Spot-check the literal line shape.
        let record = MessageRecord {
            seq: 3,
            from: RECEIVER.to_string(),
            to: SENDER.to_string(),
            message: ClassicalMessage::Abort {
                reason: AbortReason::NonZeroSyndrome,
            },
        };
        assert_eq!(record.to_line(), "3 receiver sender abort 01");
        let ack = MessageRecord {
            seq: 1,
            from: RECEIVER.to_string(),
            to: SENDER.to_string(),
            message: ClassicalMessage::Ack1,
        };
        assert_eq!(ack.to_line(), "1 receiver sender ack1 -");
        assert!(transcript_from_text("0 sender receiver syndrome zz", 8, 3, 1).is_err());
        assert!(transcript_from_text("0 sender receiver nonsense -", 8, 3, 1).is_err());
        assert!(transcript_from_text("0 sender receiver abort 07", 8, 3, 1).is_err());
    }

    #[test]
    fn config_text_round_trips_with_defaults_and_faults() {
        let text = "\
# full chain example
code: 833
kprime: 1
seed: 99
backend: frame
exclude-zero-syndrome: false
tamper-signature: false
adversary: intercept-resend:uniform-coset
attack-hop: 1
topology:
  party: sender
  hop: depolarizing:0.01   # first hop
  party: relay
  hop: ideal
  party: receiver
";
        let config = SessionConfig::parse(text).unwrap();
        assert_eq!(config.code_name, "833");
        assert_eq!(config.k_prime, 1);
        assert_eq!(config.seed, 99);
        assert_eq!(config.backend, Backend::Frame);
        assert!(!config.exclude_zero_syndrome);
        assert!(!config.tamper_signature);
        assert_eq!(config.attack_hop, 1);
        assert_eq!(config.channels.len(), 2);
        assert_eq!(
            config.channels[0],
            ChannelModel::Depolarizing { p: 0.01 }
        );
        let canonical = config.canonical_text();
        assert_eq!(SessionConfig::parse(&canonical).unwrap(), config);
        assert_eq!(
            SessionConfig::parse(&canonical).unwrap().canonical_text(),
            canonical
        );

        // Defaults: minimal config gets one ideal hop, honest adversary.
        let minimal = SessionConfig::parse("code: 833\nkprime: 2\nseed: 5\n").unwrap();
        assert_eq!(minimal.channels, vec![ChannelModel::Ideal]);
        assert_eq!(minimal.backend, Backend::StateVector);
        assert_eq!(minimal.adversary, AttackStrategy::None);
        assert!(minimal.exclude_zero_syndrome);
        assert!(minimal.tamper_signature);

        for bad in [
            "kprime: 1\nseed: 5\n",                                  // missing code
            "code: 833\nseed: 5\n",                                  // missing kprime
            "code: 833\nkprime: 1\n",                                // missing seed
            "code: 833\ncode: 713\nkprime: 1\nseed: 5\n",            // duplicate
            "code: 833\nkprime: 1\nseed: 5\nflavor: mild\n",         // unknown key
            "code: 833\nkprime: 1\nseed: 5\nbackend: tensor\n",      // bad backend
            "code: 833\nkprime: 1\nseed: 5\ntamper-signature: yes\n", // bad bool
            "code: 833\nkprime: 1\nseed: 5\ntopology:\n  party: sender\n", // no receiver
            "code: 833\nkprime: 1\nseed: 5\ntopology:\n  party: sender\n  party: receiver\n", // missing hop
            "code: 833\nkprime: 1\nseed: 5\ntopology:\n  party: sender\n  hop: ideal\n  hop: ideal\n  party: receiver\n", // double hop
            "code: 833\nkprime: 1\nseed: 5\ntopology:\n  party: receiver\n", // wrong start
            "code: 833\nkprime: 1\nseed: 5\ntopology:\n  party: sender\n  hop: ideal\n  party: receiver\n  hop: ideal\n", // hop after receiver
        ] {
            assert!(SessionConfig::parse(bad).is_err(), "accepted: {bad}");
        }

        // Probe needs the dense backend; attack hop must exist.
        let code = builtin_code("833").unwrap();
        let mut probing = frame_config("833", 1, 7);
        probing.adversary = AttackStrategy::InterceptResend {
            spoof: SpoofPolicy::UniformCoset,
            probe: true,
        };
        assert!(probing.validate(&code).is_err());
        let mut far = dense_config("833", 1, 7);
        far.adversary = AttackStrategy::InterceptResend {
            spoof: SpoofPolicy::UniformCoset,
            probe: false,
        };
        far.attack_hop = 1;
        assert!(far.validate(&code).is_err());
    }

    #[test]
    fn narrow_code_cannot_host_dummies() {
        let config = dense_config("513", 1, 7);
        let err = run_session(&config).unwrap_err();
        assert!(
            matches!(err, Error::Parameter(_)),
            "expected a parameter fault, got {err:?}"
        );
        assert!(err.to_string().contains("k\u{2032}"));
    }

    #[test]
    fn declared_syndrome_matches_dense_measurement() {
        let code = builtin_code("513").unwrap();
        let basis = LogicalBasis::for_code(&code).unwrap();
        let mut rng = rng::root(62);
        for _ in 0..1000 {
            let payload = StateVector::random(1, &mut rng).unwrap();
            let seal = code.sample_uncorrectable(false, &mut rng).phase_stripped();
            let mut state = encode_and_seal(&basis, &payload, &seal).unwrap();
            let mut measured = BitVec::zeros(code.syndrome_bits());
            for (i, g) in code.generators().iter().enumerate() {
                measured.set(i, state.measure_pauli(g, &mut rng));
            }
            assert_eq!(measured, code.syndrome_of(&seal));
        }
        // Identity seal: the carrier is a clean codeword with zero syndrome.
        let payload = StateVector::random(1, &mut rng).unwrap();
        let mut state =
            encode_and_seal(&basis, &payload, &Pauli::identity(5)).unwrap();
        for g in code.generators() {
            assert!(!state.measure_pauli(g, &mut rng));
        }
        let clean = basis.encode(&payload).unwrap();
        assert!((state.fidelity(&clean) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relay_restores_the_state_within_the_radius() {
        let code = builtin_code("513").unwrap();
        let basis = LogicalBasis::for_code(&code).unwrap();
        let mut rng = rng::root(63);
        let payload = StateVector::random(1, &mut rng).unwrap();
        let seal = code.sample_uncorrectable(true, &mut rng).phase_stripped();
        let declared = code.syndrome_of(&seal);
        let sealed = encode_and_seal(&basis, &payload, &seal).unwrap();
        for q in 0..5 {
            for letter in [Letter::X, Letter::Y, Letter::Z] {
                let mut carrier = QuantumCarrier {
                    vector: Some(sealed.clone()),
                    truth: PauliFrame::new(5),
                };
                carrier.truth.apply(&seal);
                let e = Pauli::single(5, q, letter);
                carrier.apply(&e);
                let log = relay_correct(&code, &mut carrier, &declared, &mut rng);
                assert_eq!(log.observed, declared.xor(&code.syndrome_of(&e)));
                assert_eq!(log.correction, code.syndrome_of(&e));
                let fidelity = carrier.vector.as_ref().unwrap().fidelity(&sealed);
                assert!(
                    (fidelity - 1.0).abs() < 1e-10,
                    "hop error {e:?}: fidelity {fidelity}"
                );
            }
        }
        // Two relays in series, one weight-1 error per hop: the delivered
        // syndrome is still the declared one.
        let mut carrier = QuantumCarrier {
            vector: Some(sealed.clone()),
            truth: PauliFrame::new(5),
        };
        carrier.truth.apply(&seal);
        carrier.apply(&Pauli::single(5, 1, Letter::X));
        relay_correct(&code, &mut carrier, &declared, &mut rng);
        carrier.apply(&Pauli::single(5, 4, Letter::Z));
        relay_correct(&code, &mut carrier, &declared, &mut rng);
        assert_eq!(carrier.measure_syndrome(&code, &mut rng), declared);
        let fidelity = carrier.vector.as_ref().unwrap().fidelity(&sealed);
        assert!((fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn honest_noiseless_sessions_deliver_on_both_backends() {
        for seed in [7, 8, 9] {
            let dense = run_session(&dense_config("833", 1, seed)).unwrap();
            match dense.outcome {
                SessionOutcome::Delivered { fidelity: Some(f) } => {
                    assert!((f - 1.0).abs() < 1e-10, "fidelity {f}")
                }
                ref other => panic!("dense session ended {other:?}"),
            }
            assert_eq!(dense.transcript.len(), 5);
            assert_eq!(dense.hop_syndromes.len(), 1);
            assert_eq!(
                dense.hop_syndromes[0],
                code_syndrome(&dense.oracle.injected)
            );
            assert!(dense.oracle.residual_class.syndrome.is_zero());
            assert!(dense.oracle.residual_class.logical.is_zero());
            assert!(!dense.oracle.undetected_logical_failure);
            assert!(dense.oracle.leakage.unwrap() < 1e-9);
            assert!(!dense.adversary_detected);

            let frame = run_session(&frame_config("833", 1, seed)).unwrap();
            assert_eq!(
                frame.outcome,
                SessionOutcome::Delivered {
                    fidelity: Some(1.0)
                }
            );
            // Pauli-only sessions produce identical transcripts on both
            // backends: the classical flow depends only on sender draws.
            assert_eq!(
                transcript_to_text(&dense.transcript),
                transcript_to_text(&frame.transcript)
            );
        }
    }

    fn code_syndrome(e: &Pauli) -> BitVec {
        builtin_code("833").unwrap().syndrome_of(e)
    }

    #[test]
    fn three_node_noiseless_chain_delivers() {
        let text = "\
code: 833
kprime: 2
seed: 21
backend: statevector
topology:
  party: sender
  hop: ideal
  party: relay
  hop: ideal
  party: receiver
";
        let config = SessionConfig::parse(text).unwrap();
        let report = run_session(&config).unwrap();
        match report.outcome {
            SessionOutcome::Delivered { fidelity: Some(f) } => {
                assert!((f - 1.0).abs() < 1e-10)
            }
            ref other => panic!("session ended {other:?}"),
        }
        assert_eq!(report.hop_syndromes.len(), 2);
        let declared = code_syndrome(&report.oracle.injected);
        assert_eq!(report.hop_syndromes[0], declared);
        assert_eq!(report.hop_syndromes[1], declared);
    }

    #[test]
    fn correctable_hop_errors_never_disturb_delivery() {
        let text = "\
code: 833
kprime: 1
seed: 31
backend: statevector
topology:
  party: sender
  hop: fixed-weight:1
  party: relay
  hop: fixed-weight:1
  party: receiver
";
        let config = SessionConfig::parse(text).unwrap();
        let code = builtin_code("833").unwrap();
        let basis = LogicalBasis::for_code(&code).unwrap();
        for trial in 0..25 {
            let report = run_session_trial(&code, Some(&basis), &config, trial).unwrap();
            match report.outcome {
                SessionOutcome::Delivered { fidelity: Some(f) } => {
                    assert!((f - 1.0).abs() < 1e-10, "trial {trial}: fidelity {f}")
                }
                ref other => panic!("trial {trial} ended {other:?}"),
            }
            let declared = code.syndrome_of(&report.oracle.injected);
            for (h, e) in report.oracle.channel_errors.iter().enumerate() {
                assert_eq!(e.weight(), 1);
                assert_eq!(
                    report.hop_syndromes[h],
                    declared.xor(&code.syndrome_of(e)),
                    "trial {trial} hop {h}"
                );
            }
        }
    }

    #[test]
    fn sessions_replay_byte_for_byte() {
        let mut config = dense_config("833", 1, 77);
        config.adversary = AttackStrategy::InterceptResend {
            spoof: SpoofPolicy::UniformCoset,
            probe: false,
        };
        let a = run_session(&config).unwrap();
        let b = run_session(&config).unwrap();
        assert_eq!(
            transcript_to_text(&a.transcript),
            transcript_to_text(&b.transcript)
        );
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.oracle.placement_guess, b.oracle.placement_guess);

        let code = builtin_code("833").unwrap();
        let basis = LogicalBasis::for_code(&code).unwrap();
        let later = run_session_trial(&code, Some(&basis), &config, 1).unwrap();
        assert_ne!(
            transcript_to_text(&a.transcript),
            transcript_to_text(&later.transcript),
            "distinct trials should draw distinct sessions"
        );
    }

    #[test]
    fn out_of_order_messages_are_protocol_faults() {
        let code = builtin_code("833").unwrap();
        let mut rng = rng::root(64);
        let keys = keygen(3, 1, &mut rng).unwrap();
        let receiver_rng = rng::stream(5, 0, StreamRole::Receiver);
        let mut receiver = ReceiverNode::new(&code, None, 1, true, receiver_rng);

        let err = receiver.on_reveal_keys(&keys).unwrap_err();
        assert!(matches!(err, Error::ProtocolOrder(_)), "got {err:?}");
        let err = receiver
            .on_reveal_injection(&Pauli::identity(8))
            .unwrap_err();
        assert!(matches!(err, Error::ProtocolOrder(_)));

        receiver.on_syndrome(BitVec::zeros(5)).unwrap();
        let err = receiver.on_syndrome(BitVec::zeros(5)).unwrap_err();
        assert!(matches!(err, Error::ProtocolOrder(_)));

        let carrier = QuantumCarrier {
            vector: None,
            truth: PauliFrame::new(8),
        };
        receiver.receive_carrier(carrier).unwrap();
        let err = receiver.on_reveal_keys(&keys).unwrap_err();
        assert!(matches!(err, Error::ProtocolOrder(_)));
    }

    #[test]
    fn audit_rejects_tampered_transcripts() {
        let report = run_session(&frame_config("833", 1, 11)).unwrap();
        let mut reordered = report.transcript.clone();
        reordered.swap(1, 2);
        assert!(matches!(
            audit_transcript(&reordered),
            Err(Error::ProtocolOrder(_))
        ));

        let mut truncated = report.transcript.clone();
        truncated.pop();
        assert!(audit_transcript(&truncated).is_err());

        let mut renumbered = report.transcript.clone();
        renumbered[4].seq = 9;
        assert!(audit_transcript(&renumbered).is_err());

        let mut misdirected = report.transcript.clone();
        misdirected[2].from = RECEIVER.to_string();
        misdirected[2].to = SENDER.to_string();
        assert!(audit_transcript(&misdirected).is_err());

        // An abort right after the seal reveal must carry the seal reason.
        let mut wrong_reason = report.transcript[..3].to_vec();
        wrong_reason.push(MessageRecord {
            seq: 3,
            from: RECEIVER.to_string(),
            to: SENDER.to_string(),
            message: ClassicalMessage::Abort {
                reason: AbortReason::DummyMismatch,
            },
        });
        assert!(audit_transcript(&wrong_reason).is_err());
        let mut right_reason = report.transcript[..3].to_vec();
        right_reason.push(MessageRecord {
            seq: 3,
            from: RECEIVER.to_string(),
            to: SENDER.to_string(),
            message: ClassicalMessage::Abort {
                reason: AbortReason::NonZeroSyndrome,
            },
        });
        assert!(audit_transcript(&right_reason).is_ok());
    }

    #[test]
    fn tamper_signature_gates_logical_corruption() {
        let base = {
            let mut config = frame_config("833", 1, 13);
            config.channels = vec![ChannelModel::FixedWeight { weight: 2 }];
            config
        };
        let code = builtin_code("833").unwrap();
        let trials = 200;

        let mut with_signature = base.clone();
        with_signature.tamper_signature = true;
        let mut seal_aborts = 0;
        let mut delivered_on = 0;
        for trial in 0..trials {
            let report = run_session_trial(&code, None, &with_signature, trial).unwrap();
            assert!(!report.oracle.undetected_logical_failure);
            match report.outcome {
                SessionOutcome::Aborted {
                    reason: AbortReason::NonZeroSyndrome,
                } => seal_aborts += 1,
                SessionOutcome::Delivered { fidelity } => {
                    assert_eq!(fidelity, Some(1.0));
                    delivered_on += 1;
                }
                SessionOutcome::Aborted {
                    reason: AbortReason::DummyMismatch,
                } => panic!("signature-gated runs never reach a failing dummy check"),
            }
        }
        assert!(seal_aborts > 0, "weight-2 hops should trip the signature");
        assert!(delivered_on > 0, "some weight-2 errors are correctable");

        let mut without_signature = base;
        without_signature.tamper_signature = false;
        let mut undetected = 0;
        let mut dummy_aborts = 0;
        for trial in 0..trials {
            let report =
                run_session_trial(&code, None, &without_signature, trial).unwrap();
            match report.outcome {
                SessionOutcome::Aborted {
                    reason: AbortReason::NonZeroSyndrome,
                } => panic!("without the signature the measured syndrome always vanishes"),
                SessionOutcome::Aborted {
                    reason: AbortReason::DummyMismatch,
                } => dummy_aborts += 1,
                SessionOutcome::Delivered { fidelity } => {
                    if report.oracle.undetected_logical_failure {
                        undetected += 1;
                        assert_eq!(fidelity, None);
                    } else {
                        assert_eq!(fidelity, Some(1.0));
                    }
                }
            }
        }
        assert!(
            dummy_aborts > 0,
            "visible dummy flips should catch some corrupted blocks"
        );
        assert!(
            undetected > 0,
            "invisible logical corruption should slip through sometimes"
        );
    }

    #[test]
    fn zero_syndrome_seals_appear_only_when_allowed() {
        let code = builtin_code("833").unwrap();
        let mut permissive = frame_config("833", 1, 17);
        permissive.exclude_zero_syndrome = false;
        let mut zeros = 0;
        for trial in 0..200 {
            let report = run_session_trial(&code, None, &permissive, trial).unwrap();
            if report.oracle.injected_class.syndrome.is_zero() {
                zeros += 1;
            }
            assert!(!report.oracle.injected_class.logical.is_zero());
        }
        assert!(zeros > 0, "zero syndrome should appear at rate 1/32");

        let strict = frame_config("833", 1, 17);
        for trial in 0..500 {
            let report = run_session_trial(&code, None, &strict, trial).unwrap();
            assert!(!report.oracle.injected_class.syndrome.is_zero());
        }
    }

    #[test]
    fn delivered_fraction_composes_per_hop_tails() {
        let text = "\
code: 833
kprime: 1
seed: 23
backend: frame
topology:
  party: sender
  hop: depolarizing:0.05
  party: relay
  hop: depolarizing:0.05
  party: receiver
";
        let config = SessionConfig::parse(text).unwrap();
        let code = builtin_code("833").unwrap();
        let trials = 10_000u64;
        let mut delivered = 0u64;
        for trial in 0..trials {
            let report = run_session_trial(&code, None, &config, trial).unwrap();
            if report.outcome.is_delivered() {
                delivered += 1;
            }
        }
        let p_hop = logical_error_rate(8, 1, &NoiseRate::parse("0.05").unwrap())
            .unwrap()
            .approx();
        let q = (1.0 - p_hop) * (1.0 - p_hop);
        let sigma = (q * (1.0 - q) / trials as f64).sqrt();
        let fraction = delivered as f64 / trials as f64;
        assert!(
            (fraction - q).abs() < 4.0 * sigma,
            "delivered fraction {fraction} vs composed tail {q} (sigma {sigma})"
        );
    }

    #[test]
    fn montecarlo_rate_matches_the_analytic_tail() {
        let code = builtin_code("513").unwrap();
        let rate = NoiseRate::parse("0.01").unwrap();
        let report = frame_montecarlo(&code, &rate, 100_000, 29).unwrap();
        assert_eq!(report.trials, 100_000);
        assert!(
            report.z_score().abs() < 4.0,
            "empirical {} vs predicted {} (z = {})",
            report.empirical_rate(),
            report.predicted_rate(),
            report.z_score()
        );
        let again = frame_montecarlo(&code, &rate, 100_000, 29).unwrap();
        assert_eq!(report.failures, again.failures);
        assert!(frame_montecarlo(&code, &rate, 0, 29).is_err());
    }
}
