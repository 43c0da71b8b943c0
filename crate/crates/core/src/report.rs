//! Structured-text and CSV rendering for every run artifact.
//!
//! All reports share one line discipline — `key: value` pairs in a fixed
//! order, with block payloads indented two spaces under a bare `key:`
//! line — so outputs from different subcommands diff cleanly and a rerun
//! with the embedded seed and configuration reproduces the bytes exactly.
//! Numeric fields always print with an explicit digit count; probabilities
//! below 10⁻⁶ switch to scientific notation so small rates are never
//! silently rounded when compared against reference constants.

use std::fmt::Display;

use num::ToPrimitive;

use crate::adversary::AttackReport;
use crate::analysis::nu::{bound_crossover_closed_form, bound_crossover_rate, CurvePoint};
use crate::analysis::overhead::OverheadBreakdown;
use crate::analysis::rates::{
    ComparisonRow, NoiseRate, QUOTED_RELAY_TELEPORT_FAILURE, QUOTED_SEALED_BLOCK_FAILURE,
};
use crate::bits::BitVec;
use crate::code::{Census, Code, ValidationReport};
use crate::error::{Error, Result};
use crate::protocol::{MonteCarloReport, SessionConfig, SessionOutcome, TrialReport};

/// Relative deviation below which a computed candidate is reported as
/// agreeing with a quoted reference constant.
pub const COMPARISON_AGREEMENT: f64 = 0.10;

/// Format a probability or rate with six significant digits: scientific
/// below 10⁻³ (covering the 10⁻⁶ cutoff with margin), plain decimal with
/// six places otherwise.
pub fn format_probability(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() < 1e-3 {
        format!("{v:.5e}")
    } else {
        format!("{v:.6}")
    }
}

/// Format a fidelity-like quantity at fifteen decimal places.
pub fn format_fidelity(v: f64) -> String {
    format!("{v:.15}")
}

/// CSV float format: scientific with sixteen fractional digits
/// (seventeen significant), enough to reparse to the identical `f64`.
pub fn csv_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Line accumulator enforcing the shared report texture.
pub struct ReportWriter {
    lines: Vec<String>,
}

impl ReportWriter {
    /// Start a report of the named kind.
    pub fn new(kind: &str) -> ReportWriter {
        ReportWriter {
            lines: vec![format!("report: {kind}")],
        }
    }

    /// Append one `key: value` line.
    pub fn field(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    /// Append a bare annotation line (used for flags and verdicts).
    pub fn note(&mut self, text: &str) {
        self.lines.push(text.to_string());
    }

    /// Append a `key:` header followed by each item indented two spaces.
    pub fn block<I, S>(&mut self, key: &str, items: I)
    where
        I: IntoIterator<Item = S>,
        S: Display,
    {
        self.lines.push(format!("{key}:"));
        for item in items {
            self.lines.push(format!("  {item}"));
        }
    }

    /// Append a multi-line text payload indented two spaces under `key:`.
    pub fn text_block(&mut self, key: &str, text: &str) {
        self.block(key, text.lines());
    }

    /// Render the accumulated lines with a trailing newline.
    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

fn outcome_fields(w: &mut ReportWriter, outcome: &SessionOutcome) {
    match outcome {
        SessionOutcome::Delivered { fidelity } => {
            w.field("outcome", "delivered");
            if let Some(f) = fidelity {
                w.field("payload-fidelity", format_fidelity(*f));
            }
        }
        SessionOutcome::Aborted { reason } => {
            w.field("outcome", "aborted");
            w.field("abort-reason", reason);
        }
    }
}

/// Render one protocol session: run parameters, verdict, per-hop
/// syndromes, and the full classical transcript. The canonical
/// configuration text is embedded so the run can be replayed from the
/// report alone.
pub fn session_report(config: &SessionConfig, config_hash: &str, trial: &TrialReport) -> String {
    let mut w = ReportWriter::new("session");
    w.field("code", &config.code_name);
    w.field("payload-slots", config.k_prime);
    w.field("backend", config.backend);
    w.field("seed", config.seed);
    w.field("config-sha256", config_hash);
    outcome_fields(&mut w, &trial.outcome);
    if config.adversary.is_active() {
        w.field("adversary", config.adversary);
        w.field("adversary-detected", trial.adversary_detected);
    }
    w.field(
        "undetected-logical-failure",
        trial.oracle.undetected_logical_failure,
    );
    w.block(
        "hop-syndromes",
        trial
            .hop_syndromes
            .iter()
            .enumerate()
            .map(|(h, s)| format!("hop={h} syndrome={}", s.to_hex())),
    );
    w.block("transcript", trial.transcript.iter().map(|r| r.to_line()));
    w.text_block("config", &config.canonical_text());
    w.finish()
}

fn rate_with_interval(w: &mut ReportWriter, name: &str, rate: f64, interval: (f64, f64)) {
    w.field(name, format_probability(rate));
    w.field(
        &format!("{name}-interval-95"),
        format!(
            "{} {}",
            format_probability(interval.0),
            format_probability(interval.1)
        ),
    );
}

/// Independent binomial reference rates implied by the code parameters:
/// hitting the hidden logical class by chance and guessing the payload
/// placement blind.
fn attack_references(k: usize, k_prime: usize) -> (f64, f64) {
    let class = 1.0 / (1u64 << (2 * k)) as f64;
    let mut combos = 1.0f64;
    for i in 0..(k - k_prime) {
        combos *= (k - i) as f64 / (i + 1) as f64;
    }
    (class, combos.recip())
}

/// Render an attack campaign: counts, Wilson-interval rates, and the
/// analytic reference rates they are compared against.
pub fn attack_report(config: &SessionConfig, config_hash: &str, report: &AttackReport) -> String {
    let mut w = ReportWriter::new("attack");
    w.field("strategy", report.strategy);
    w.field("code", &report.code_name);
    w.field("payload-slots", report.k_prime);
    w.field("trials", report.trials);
    w.field("seed", report.seed);
    w.field("config-sha256", config_hash);
    w.field("detected", report.detected);
    w.field("undetected", report.undetected);
    w.field("seal-stage-aborts", report.residual_aborts);
    w.field("dummy-stage-aborts", report.dummy_aborts);
    w.field("class-matches", report.class_matches);
    w.field("placement-successes", report.placement_successes);
    w.field("extraction-successes", report.extraction_successes);
    w.field("detection-rate", format_probability(report.detection_rate()));
    rate_with_interval(&mut w, "pass-rate", report.pass_rate(), report.pass_interval());
    w.field(
        "class-match-rate",
        format_probability(report.class_match_rate()),
    );
    rate_with_interval(
        &mut w,
        "placement-rate",
        report.placement_rate(),
        report.placement_interval(),
    );
    rate_with_interval(
        &mut w,
        "extraction-rate",
        report.extraction_rate(),
        report.extraction_interval(),
    );
    let (class_ref, placement_ref) = attack_references(report.logical_slots, report.k_prime);
    w.field("class-reference", format_probability(class_ref));
    w.field("placement-reference", format_probability(placement_ref));
    w.field(
        "extraction-reference",
        format_probability(class_ref * placement_ref),
    );
    w.text_block("config", &config.canonical_text());
    w.finish()
}

/// Render a frame-backend error-rate campaign beside the analytic tail it
/// estimates.
pub fn montecarlo_report(config_hash: &str, report: &MonteCarloReport) -> String {
    let mut w = ReportWriter::new("montecarlo");
    w.field("code", &report.code_name);
    w.field("physical-rate", format_probability(report.physical_rate));
    w.field("trials", report.trials);
    w.field("failures", report.failures);
    w.field("seed", report.seed);
    w.field("config-sha256", config_hash);
    w.field("empirical-rate", format_probability(report.empirical_rate()));
    w.field("predicted-rate", report.predicted.to_scientific(6));
    w.field("binomial-sigma", format_probability(report.sigma()));
    w.field("z-score", format!("{:.3}", report.z_score()));
    w.finish()
}

/// Render the exhaustive coset census beside the analytic class-count
/// estimate, with the per-syndrome uncorrectable count listed for every
/// syndrome.
pub fn census_report(code: &Code, census: &Census, estimate: &num::BigRational) -> String {
    let mut w = ReportWriter::new("census");
    w.field("code", code.name());
    w.field("block-length", code.n());
    w.field("logical-slots", code.k());
    w.field("distance", code.distance());
    w.field("correction-radius", code.radius());
    w.field("syndromes", census.syndrome_count);
    w.field("classes-per-syndrome", census.classes_per_syndrome);
    w.field("members-per-class", census.members_per_class);
    w.field("total-classes", census.total_classes);
    w.field(
        "uncorrectable-per-syndrome-exact",
        census.uncorrectable_per_syndrome,
    );
    let approx = estimate.to_f64().unwrap_or(f64::NAN);
    w.field(
        "uncorrectable-per-syndrome-estimate",
        format!("{:.6} ({}/{})", approx, estimate.numer(), estimate.denom()),
    );
    let m = code.n() - code.k();
    w.block(
        "per-syndrome",
        (0..census.syndrome_count).map(|s| {
            format!(
                "syndrome={} uncorrectable={}",
                BitVec::from_index(m, s).to_hex(),
                census.uncorrectable_per_syndrome
            )
        }),
    );
    w.finish()
}

/// Render the transport-cost breakdown for one relayed block.
pub fn overhead_report(bsm_qubits: u32, breakdown: &OverheadBreakdown) -> String {
    let mut w = ReportWriter::new("overhead");
    w.field("nesting", breakdown.nesting);
    w.field("pairs-per-segment", breakdown.pairs_per_segment);
    w.field("bsm-qubits", bsm_qubits);
    w.field("entangled-pairs", &breakdown.entangled_pairs);
    w.field("swap-stages", &breakdown.swap_stages);
    w.field(
        "stage-success-probability",
        format_probability(breakdown.success_probability),
    );
    w.field("repetitions", &breakdown.repetitions);
    w.field("classical-per-attempt", &breakdown.classical_per_attempt);
    w.field("total-qubits", &breakdown.total);
    w.finish()
}

fn comparison_row_line(row: &ComparisonRow, quoted: f64) -> String {
    let computed = row.rate.approx();
    let gap = if quoted > 0.0 {
        (computed / quoted).log10().abs()
    } else {
        f64::INFINITY
    };
    let verdict = if (computed / quoted - 1.0).abs() <= COMPARISON_AGREEMENT {
        "agrees"
    } else {
        "MISMATCH"
    };
    format!(
        "n={} k={} radius={} rule={} failure-bound={} quoted={} log10-gap={:.3} {}",
        row.n,
        row.k,
        row.radius,
        row.radius_rule,
        row.rate.to_scientific(6),
        format_probability(quoted),
        gap,
        verdict
    )
}

/// Render the external reference constants beside every computed
/// candidate reading, flagging each row that disagrees. The relay-failure
/// constant has no computed counterpart in this artifact (it depends on a
/// purification model outside scope), so it is always flagged
/// comparison-only.
pub fn comparison_report(p: &NoiseRate, rows: &[ComparisonRow]) -> String {
    let mut w = ReportWriter::new("comparison");
    w.field("physical-rate", format_probability(p.value));
    w.field(
        "quoted-relay-failure",
        format_probability(QUOTED_RELAY_TELEPORT_FAILURE),
    );
    w.note(
        "quoted-relay-status: comparison-only — external purification-model \
         constant, not computed by this artifact",
    );
    w.field(
        "quoted-block-failure",
        format_probability(QUOTED_SEALED_BLOCK_FAILURE),
    );
    w.block(
        "candidates",
        rows.iter()
            .map(|row| comparison_row_line(row, QUOTED_SEALED_BLOCK_FAILURE)),
    );
    let matches = rows
        .iter()
        .filter(|row| (row.rate.approx() / QUOTED_SEALED_BLOCK_FAILURE - 1.0).abs() <= COMPARISON_AGREEMENT)
        .count();
    if matches == 0 {
        w.note(
            "quoted-block-status: comparison-only — no candidate reading \
             reproduces the quoted figure; discrepancy flagged above",
        );
    } else {
        w.field("quoted-block-matching-candidates", matches);
    }
    w.finish()
}

/// CSV form of the candidate survey, one row per reading.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("n,k,radius,radius_rule,failure_bound,quoted_reference\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n,
            row.k,
            row.radius,
            row.radius_rule,
            csv_number(row.rate.approx()),
            csv_number(QUOTED_SEALED_BLOCK_FAILURE),
        ));
    }
    out
}

/// Render the class-count bound at one (n, R) point with the collapse
/// threshold derived two independent ways.
pub fn bound_report(n: u64, rate: f64, bound: &crate::analysis::bigprob::Magnitude) -> String {
    let mut w = ReportWriter::new("class-count-bound");
    w.field("block-length", n);
    w.field("rate", format_probability(rate));
    w.field("bound", bound.to_scientific(8));
    w.field("log10-bound", format!("{:.6}", bound.log10()));
    w.field(
        "collapse-rate-bisection",
        format_probability(bound_crossover_rate()),
    );
    w.field(
        "collapse-rate-closed-form",
        format_probability(bound_crossover_closed_form()),
    );
    w.finish()
}

/// CSV form of the bound-versus-rate curve at fixed block length.
/// Columns: block length, rate, bound, and its base-10 logarithm.
pub fn curve_csv(n: u64, points: &[CurvePoint]) -> String {
    let mut out = String::from("n,R,nu_bound,log10_nu\n");
    for point in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            n,
            csv_number(point.rate),
            csv_number(point.bound.approx()),
            csv_number(point.bound.log10()),
        ));
    }
    out
}

/// Render the leakage analysis: full-mixing deviation, the discrimination
/// bound over logical messages, and the accessible-information budget.
pub fn accinfo_report(
    epsilon: f64,
    n: u64,
    messages: usize,
    twirl_deviation: f64,
    holevo_bits: f64,
    budget_bits: f64,
) -> String {
    let mut w = ReportWriter::new("accinfo");
    w.field("epsilon", format_probability(epsilon));
    w.field("block-length", n);
    w.field("messages", messages);
    w.field("twirl-max-deviation", format!("{twirl_deviation:.3e}"));
    w.field("holevo-bits", format!("{holevo_bits:.12}"));
    w.field("accessible-info-budget-bits", format!("{budget_bits:.6}"));
    w.finish()
}

/// Render catalog validation: one line per code with re-derived
/// parameters.
pub fn validation_report(reports: &[ValidationReport]) -> String {
    let mut w = ReportWriter::new("validate");
    w.field("codes", reports.len());
    w.block(
        "catalog",
        reports.iter().map(|r| {
            format!(
                "name={} n={} k={} declared-distance={} computed-distance={} \
                 nondegenerate={} syndromes={} beyond-radius={}",
                r.name,
                r.n,
                r.k,
                r.declared_distance,
                r.computed_distance,
                r.nondegenerate,
                r.syndrome_count,
                r.beyond_radius_syndromes
            )
        }),
    );
    w.finish()
}

/// Parse one float field back out of a CSV body (header skipped), for
/// round-trip checks.
pub fn csv_column(text: &str, column: usize) -> Result<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            let cell = line
                .split(',')
                .nth(column)
                .ok_or_else(|| Error::parse(format!("row {line:?} lacks column {column}")))?;
            cell.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(format!("bad float {cell:?}")))
        })
        .collect()
}
