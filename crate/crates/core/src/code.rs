//! Stabilizer codes: catalog, validation, lookup decoding, coset census.
//!
//! A code record declares `[[n, k, d]]` together with its stabilizer
//! generators and a symplectic basis of logical operators. Records are never
//! trusted: [`Code::build`] re-derives the distance and non-degeneracy by
//! exhaustive search and rejects any record whose declared parameters do not
//! match. Building also produces the syndrome-indexed lookup decoder whose
//! representatives define the correctable coset of every syndrome.
//!
//! Error classes: modding out the stabilizer group, the `4^n` phase-stripped
//! Paulis split into `2^(n-k)` syndromes × `2^(2k)` logical classes, each
//! class holding exactly `2^(n-k)` operators. The decoder representative's
//! class is correctable by construction; the remaining `2^(2k) - 1` classes
//! of its syndrome are the uncorrectable cosets that the sealing scheme
//! draws from.

use std::collections::HashMap;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::{symplectic_vector, RowBasis};
use crate::pauli::Pauli;

/// Largest block size for which exhaustive validation, table decoding, and
/// census scans are performed. `4^n` patterns are enumerated, so this keeps
/// build times in the milliseconds-to-seconds range.
pub const TABLE_MAX_N: usize = 10;

/// Built-in code catalog (see `data/codes.txt` for the format).
pub const BUILTIN_CATALOG: &str = include_str!("../data/codes.txt");

/// A declared stabilizer code record, parsed but not yet validated.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub generators: Vec<Pauli>,
    pub logical_x: Vec<Pauli>,
    pub logical_z: Vec<Pauli>,
}

/// Result of re-deriving a record's parameters during validation.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub declared_distance: usize,
    pub computed_distance: usize,
    pub nondegenerate: bool,
    pub syndrome_count: usize,
    /// Syndromes whose best representative exceeds the correction radius.
    pub beyond_radius_syndromes: usize,
}

/// Syndrome-indexed lookup decoder.
///
/// Representatives are the first minimum-weight error for each syndrome in
/// lexicographic letter-string order; entries beyond the correction radius
/// `t = ⌊(d-1)/2⌋` are flagged.
#[derive(Clone, Debug)]
pub struct DecoderTable {
    reps: Vec<Pauli>,
    beyond_radius: Vec<bool>,
}

impl DecoderTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep_for_index(&self, idx: usize) -> &Pauli {
        &self.reps[idx]
    }

    pub fn is_beyond_radius(&self, idx: usize) -> bool {
        self.beyond_radius[idx]
    }
}

/// The syndrome and logical-class label of an error.
///
/// The logical label has `2k` bits: bit `i` is set when the reduced error
/// anticommutes with `Z̄_i` (an X-type action on logical qubit `i`), bit
/// `k + i` when it anticommutes with `X̄_i` (a Z-type action).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorClass {
    pub syndrome: BitVec,
    pub logical: BitVec,
}

impl ErrorClass {
    /// True when the decoder representative returns the error to the
    /// stabilizer group — i.e. lookup decoding fully corrects it.
    pub fn is_correctable(&self) -> bool {
        self.logical.is_zero()
    }
}

/// Exhaustive coset census of a code.
#[derive(Clone, Debug)]
pub struct Census {
    pub syndrome_count: usize,
    /// Distinct logical classes observed per syndrome (uniform over
    /// syndromes; always `2^(2k)`).
    pub classes_per_syndrome: usize,
    /// Phase-stripped operators in each (syndrome, class) cell (always
    /// `2^(n-k)`).
    pub members_per_class: u64,
    /// Uncorrectable classes per syndrome (`2^(2k) - 1`).
    pub uncorrectable_per_syndrome: usize,
    /// Mean uncorrectable class count over syndromes (equals the integer
    /// above; kept as a float for reporting beside analytic estimates).
    pub mean_uncorrectable: f64,
    /// Total classes over all syndromes (`2^(n+k)`).
    pub total_classes: u64,
}

/// A validated stabilizer code with its lookup decoder.
#[derive(Clone, Debug)]
pub struct Code {
    spec: CodeSpec,
    radius: usize,
    decoder: DecoderTable,
    report: ValidationReport,
}

impl Code {
    /// Validate a record and build its decoder table.
    ///
    /// Fails when the generators are dependent or non-commuting, the logical
    /// operators break the symplectic relations, the recomputed distance or
    /// declared parameters disagree, or any weight-≤t syndrome collides.
    pub fn build(spec: CodeSpec) -> Result<Code> {
        spec.shape_check()?;
        let n = spec.n;
        let k = spec.k;

        for g in spec.generators.iter().chain(&spec.logical_x).chain(&spec.logical_z) {
            if !g.is_hermitian() {
                return Err(Error::validation(format!(
                    "{}: operator {g} carries a non-Hermitian phase",
                    spec.name
                )));
            }
        }
        for (i, a) in spec.generators.iter().enumerate() {
            for b in spec.generators.iter().skip(i + 1) {
                if a.anticommutes(b) {
                    return Err(Error::validation(format!(
                        "{}: generators {a} and {b} anticommute",
                        spec.name
                    )));
                }
            }
        }
        let gen_basis = RowBasis::from_rows(2 * n, spec.generators.iter().map(symplectic_vector));
        if gen_basis.rank() != n - k {
            return Err(Error::validation(format!(
                "{}: generators are dependent (rank {} of {})",
                spec.name,
                gen_basis.rank(),
                n - k
            )));
        }
        spec.logical_relations_check()?;
        for l in spec.logical_x.iter().chain(&spec.logical_z) {
            if gen_basis.contains(&symplectic_vector(l)) {
                return Err(Error::validation(format!(
                    "{}: logical operator {l} lies in the stabilizer span",
                    spec.name
                )));
            }
        }

        let stabilizer_masks = spec.stabilizer_mask_set()?;
        let computed_distance = spec.compute_distance(&stabilizer_masks);
        if computed_distance != spec.d {
            return Err(Error::validation(format!(
                "{}: declared distance {} but exhaustive search finds {}",
                spec.name, spec.d, computed_distance
            )));
        }
        let radius = (spec.d - 1) / 2;
        if !spec.check_nondegenerate(radius) {
            return Err(Error::validation(format!(
                "{}: weight-≤{radius} errors share a syndrome (degenerate record)",
                spec.name
            )));
        }

        let decoder = spec.build_decoder(radius)?;
        let beyond = decoder.beyond_radius.iter().filter(|&&b| b).count();
        let report = ValidationReport {
            name: spec.name.clone(),
            n,
            k,
            declared_distance: spec.d,
            computed_distance,
            nondegenerate: true,
            syndrome_count: decoder.len(),
            beyond_radius_syndromes: beyond,
        };
        Ok(Code {
            spec,
            radius,
            decoder,
            report,
        })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn distance(&self) -> usize {
        self.spec.d
    }

    /// Correction radius `t = ⌊(d-1)/2⌋`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.spec.generators
    }

    pub fn logical_x(&self) -> &[Pauli] {
        &self.spec.logical_x
    }

    pub fn logical_z(&self) -> &[Pauli] {
        &self.spec.logical_z
    }

    pub fn decoder(&self) -> &DecoderTable {
        &self.decoder
    }

    pub fn validation_report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn syndrome_bits(&self) -> usize {
        self.spec.n - self.spec.k
    }

    /// Anticommutation pattern of `e` against the generators.
    pub fn syndrome_of(&self, e: &Pauli) -> BitVec {
        let mut s = BitVec::zeros(self.syndrome_bits());
        for (i, g) in self.spec.generators.iter().enumerate() {
            s.set(i, e.anticommutes(g));
        }
        s
    }

    /// Decoder representative for a syndrome.
    pub fn rep(&self, syndrome: &BitVec) -> &Pauli {
        assert_eq!(syndrome.len(), self.syndrome_bits(), "syndrome length mismatch");
        self.decoder.rep_for_index(syndrome.to_index())
    }

    /// Syndrome plus logical-class label after multiplying out the decoder
    /// representative.
    pub fn classify(&self, e: &Pauli) -> ErrorClass {
        let syndrome = self.syndrome_of(e);
        let reduced = e.mul(self.rep(&syndrome));
        debug_assert!(self.syndrome_of(&reduced).is_zero());
        ErrorClass {
            syndrome,
            logical: self.logical_label_of(&reduced),
        }
    }

    /// Logical label of a zero-syndrome operator.
    fn logical_label_of(&self, e: &Pauli) -> BitVec {
        let k = self.spec.k;
        let mut label = BitVec::zeros(2 * k);
        for i in 0..k {
            label.set(i, e.anticommutes(&self.spec.logical_z[i]));
            label.set(k + i, e.anticommutes(&self.spec.logical_x[i]));
        }
        label
    }

    /// Representative operator of a logical class label (`2k` bits).
    pub fn logical_class_rep(&self, label: &BitVec) -> Pauli {
        let k = self.spec.k;
        assert_eq!(label.len(), 2 * k, "logical label length mismatch");
        let mut op = Pauli::identity(self.spec.n);
        for i in 0..k {
            if label.get(i) {
                op = op.mul(&self.spec.logical_x[i]);
            }
        }
        for i in 0..k {
            if label.get(k + i) {
                op = op.mul(&self.spec.logical_z[i]);
            }
        }
        op
    }

    /// Stabilizer element selected by one bit per generator.
    pub fn stabilizer_element(&self, bits: &BitVec) -> Pauli {
        assert_eq!(bits.len(), self.syndrome_bits(), "stabilizer selector length mismatch");
        let mut op = Pauli::identity(self.spec.n);
        for (i, g) in self.spec.generators.iter().enumerate() {
            if bits.get(i) {
                op = op.mul(g);
            }
        }
        op
    }

    pub fn random_stabilizer(&self, rng: &mut impl Rng) -> Pauli {
        let bits = BitVec::random(self.syndrome_bits(), rng);
        self.stabilizer_element(&bits)
    }

    /// Sample an uncorrectable error: a uniformly chosen syndrome
    /// representative times a uniformly chosen nontrivial logical class times
    /// a uniform stabilizer element.
    ///
    /// With `exclude_zero_syndrome` the zero syndrome is skipped, so the
    /// result is always *detectable* as well as uncorrectable.
    pub fn sample_uncorrectable(
        &self,
        exclude_zero_syndrome: bool,
        rng: &mut impl Rng,
    ) -> Pauli {
        let m = self.syndrome_bits();
        let k = self.spec.k;
        let syndrome_index = if exclude_zero_syndrome {
            1 + rng.random_range(0..(1usize << m) - 1)
        } else {
            rng.random_range(0..1usize << m)
        };
        let label_index = 1 + rng.random_range(0..(1usize << (2 * k)) - 1);
        let rep = self.decoder.rep_for_index(syndrome_index).clone();
        let logical = self.logical_class_rep(&BitVec::from_index(2 * k, label_index));
        let stab = self.random_stabilizer(rng);
        rep.mul(&logical).mul(&stab)
    }

    /// Exhaustive census over all `4^n` phase-stripped errors.
    pub fn census(&self) -> Census {
        let n = self.spec.n;
        let k = self.spec.k;
        let m = n - k;
        let gens = self.generator_masks();
        let logicals = self.logical_masks();
        let mut cells = vec![0u64; 1 << (m + 2 * k)];
        let rep_masks: Vec<(u64, u64)> = self
            .decoder
            .reps
            .iter()
            .map(|r| (r.x_bits().as_u64(), r.z_bits().as_u64()))
            .collect();
        for c in 0..(1u64 << (2 * n)) {
            let (x, z) = split_pattern(c, n);
            let s = syndrome_index(x, z, &gens);
            let (rx, rz) = rep_masks[s];
            let label = logical_label_index(x ^ rx, z ^ rz, &logicals);
            cells[(s << (2 * k)) | label] += 1;
        }
        let members = 1u64 << m;
        for (cell, &count) in cells.iter().enumerate() {
            assert_eq!(
                count, members,
                "coset cell {cell} holds {count} operators, expected {members}"
            );
        }
        let classes_per_syndrome = 1usize << (2 * k);
        Census {
            syndrome_count: 1 << m,
            classes_per_syndrome,
            members_per_class: members,
            uncorrectable_per_syndrome: classes_per_syndrome - 1,
            mean_uncorrectable: (classes_per_syndrome - 1) as f64,
            total_classes: 1u64 << (n + k),
        }
    }

    fn generator_masks(&self) -> Vec<(u64, u64)> {
        self.spec
            .generators
            .iter()
            .map(|g| (g.x_bits().as_u64(), g.z_bits().as_u64()))
            .collect()
    }

    /// Masks ordered so the census label matches [`Code::logical_label_of`]:
    /// first the Z̄ operators (detecting X-type action), then the X̄.
    fn logical_masks(&self) -> Vec<(u64, u64)> {
        self.spec
            .logical_z
            .iter()
            .chain(&self.spec.logical_x)
            .map(|l| (l.x_bits().as_u64(), l.z_bits().as_u64()))
            .collect()
    }
}

/// Split a base-4 pattern index into X/Z masks; qubit 0 is the most
/// significant digit and digits order letters I < X < Y < Z, so ascending
/// indices enumerate letter strings lexicographically.
fn split_pattern(c: u64, n: usize) -> (u64, u64) {
    let mut x = 0u64;
    let mut z = 0u64;
    let mut rest = c;
    for q in (0..n).rev() {
        match rest & 3 {
            1 => x |= 1 << q,
            2 => {
                x |= 1 << q;
                z |= 1 << q;
            }
            3 => z |= 1 << q,
            _ => {}
        }
        rest >>= 2;
    }
    (x, z)
}

fn anticommutes_mask(x: u64, z: u64, gx: u64, gz: u64) -> bool {
    ((x & gz).count_ones() + (z & gx).count_ones()) & 1 == 1
}

/// Syndrome as an MSB-first index (generator 0 is the top bit), matching
/// `BitVec::to_index` of [`Code::syndrome_of`].
fn syndrome_index(x: u64, z: u64, gens: &[(u64, u64)]) -> usize {
    let mut idx = 0usize;
    for &(gx, gz) in gens {
        idx = (idx << 1) | usize::from(anticommutes_mask(x, z, gx, gz));
    }
    idx
}

fn logical_label_index(x: u64, z: u64, logicals: &[(u64, u64)]) -> usize {
    let mut idx = 0usize;
    for &(lx, lz) in logicals {
        idx = (idx << 1) | usize::from(anticommutes_mask(x, z, lx, lz));
    }
    idx
}

impl CodeSpec {
    fn shape_check(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || self.k == 0 || self.k >= n {
            return Err(Error::validation(format!(
                "{}: invalid parameters n={} k={}",
                self.name, n, self.k
            )));
        }
        if n > TABLE_MAX_N {
            return Err(Error::capacity(format!(
                "{}: block size {n} exceeds the exhaustive-validation cap {TABLE_MAX_N}",
                self.name
            )));
        }
        if self.d < 1 {
            return Err(Error::validation(format!("{}: distance must be ≥ 1", self.name)));
        }
        if self.generators.len() != n - self.k {
            return Err(Error::validation(format!(
                "{}: expected {} generators, found {}",
                self.name,
                n - self.k,
                self.generators.len()
            )));
        }
        if self.logical_x.len() != self.k || self.logical_z.len() != self.k {
            return Err(Error::validation(format!(
                "{}: expected {} logical X/Z pairs",
                self.name, self.k
            )));
        }
        for op in self
            .generators
            .iter()
            .chain(&self.logical_x)
            .chain(&self.logical_z)
        {
            if op.n() != n {
                return Err(Error::validation(format!(
                    "{}: operator {op} acts on {} qubits, expected {n}",
                    self.name,
                    op.n()
                )));
            }
        }
        Ok(())
    }

    fn logical_relations_check(&self) -> Result<()> {
        let k = self.k;
        for i in 0..k {
            for j in 0..k {
                let want_anti = i == j;
                if self.logical_x[i].anticommutes(&self.logical_z[j]) != want_anti {
                    return Err(Error::validation(format!(
                        "{}: X̄_{i} / Z̄_{j} commutation is wrong",
                        self.name
                    )));
                }
                if i < j {
                    if self.logical_x[i].anticommutes(&self.logical_x[j]) {
                        return Err(Error::validation(format!(
                            "{}: X̄_{i} and X̄_{j} anticommute",
                            self.name
                        )));
                    }
                    if self.logical_z[i].anticommutes(&self.logical_z[j]) {
                        return Err(Error::validation(format!(
                            "{}: Z̄_{i} and Z̄_{j} anticommute",
                            self.name
                        )));
                    }
                }
            }
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            for g in &self.generators {
                if l.anticommutes(g) {
                    return Err(Error::validation(format!(
                        "{}: logical {l} anticommutes with generator {g}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// All `2^(n-k)` stabilizer X/Z mask pairs; also verifies that no group
    /// element carries an odd power of `i` (which would make `-I` a member).
    fn stabilizer_mask_set(&self) -> Result<HashMap<(u64, u64), ()>> {
        let m = self.generators.len();
        let mut set = HashMap::with_capacity(1 << m);
        for bits in 0..(1u32 << m) {
            let mut op = Pauli::identity(self.n);
            for (i, g) in self.generators.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    op = op.mul(g);
                }
            }
            if !op.phase_power().is_multiple_of(2) {
                return Err(Error::validation(format!(
                    "{}: stabilizer group contains a non-Hermitian element",
                    self.name
                )));
            }
            set.insert((op.x_bits().as_u64(), op.z_bits().as_u64()), ());
        }
        if set.len() != 1 << m {
            return Err(Error::validation(format!(
                "{}: stabilizer group collapses to {} elements",
                self.name,
                set.len()
            )));
        }
        Ok(set)
    }

    /// Minimum weight over zero-syndrome operators outside the stabilizer
    /// group: the code distance.
    fn compute_distance(&self, stabilizer: &HashMap<(u64, u64), ()>) -> usize {
        let n = self.n;
        let gens: Vec<(u64, u64)> = self
            .generators
            .iter()
            .map(|g| (g.x_bits().as_u64(), g.z_bits().as_u64()))
            .collect();
        let mut best = usize::MAX;
        for c in 1..(1u64 << (2 * n)) {
            let (x, z) = split_pattern(c, n);
            let weight = (x | z).count_ones() as usize;
            if weight >= best {
                continue;
            }
            if syndrome_index(x, z, &gens) == 0 && !stabilizer.contains_key(&(x, z)) {
                best = weight;
            }
        }
        best
    }

    /// Every error of weight ≤ radius must have a unique syndrome.
    fn check_nondegenerate(&self, radius: usize) -> bool {
        let n = self.n;
        let gens: Vec<(u64, u64)> = self
            .generators
            .iter()
            .map(|g| (g.x_bits().as_u64(), g.z_bits().as_u64()))
            .collect();
        let mut seen = vec![false; 1 << gens.len()];
        let mut ok = true;
        let mut visit = |x: u64, z: u64| {
            let s = syndrome_index(x, z, &gens);
            if seen[s] {
                ok = false;
            }
            seen[s] = true;
        };
        // Enumerate supports of weight ≤ radius with all letter choices.
        let mut positions = Vec::new();
        enumerate_low_weight(n, radius, 0, &mut positions, &mut visit);
        ok
    }

    /// Single pass over all `4^n` patterns in lexicographic letter order,
    /// keeping the first minimum-weight representative per syndrome.
    fn build_decoder(&self, radius: usize) -> Result<DecoderTable> {
        let n = self.n;
        let m = n - self.k;
        let gens: Vec<(u64, u64)> = self
            .generators
            .iter()
            .map(|g| (g.x_bits().as_u64(), g.z_bits().as_u64()))
            .collect();
        let mut best: Vec<Option<(usize, u64, u64)>> = vec![None; 1 << m];
        for c in 0..(1u64 << (2 * n)) {
            let (x, z) = split_pattern(c, n);
            let weight = (x | z).count_ones() as usize;
            let s = syndrome_index(x, z, &gens);
            match best[s] {
                // Ties keep the earlier pattern, so representatives are the
                // lexicographically first among minimum-weight candidates.
                Some((w, _, _)) if w <= weight => {}
                _ => best[s] = Some((weight, x, z)),
            }
        }
        let mut reps = Vec::with_capacity(1 << m);
        let mut beyond = Vec::with_capacity(1 << m);
        for (s, entry) in best.iter().enumerate() {
            let (w, x, z) = entry.ok_or_else(|| {
                Error::validation(format!("{}: syndrome {s} is unreachable", self.name))
            })?;
            let mut xb = BitVec::zeros(n);
            let mut zb = BitVec::zeros(n);
            for q in 0..n {
                xb.set(q, x >> q & 1 == 1);
                zb.set(q, z >> q & 1 == 1);
            }
            reps.push(Pauli::from_parts(xb, zb, 0).phase_stripped());
            beyond.push(w > radius);
        }
        Ok(DecoderTable {
            reps,
            beyond_radius: beyond,
        })
    }
}

/// Recursive enumeration of all patterns with weight ≤ `budget` on qubits
/// `from..n`, invoking `visit` with the X/Z masks of every pattern
/// (including the identity).
fn enumerate_low_weight(
    n: usize,
    budget: usize,
    from: usize,
    stack: &mut Vec<(usize, u8)>,
    visit: &mut impl FnMut(u64, u64),
) {
    let mut x = 0u64;
    let mut z = 0u64;
    for &(q, letter) in stack.iter() {
        match letter {
            1 => x |= 1 << q,
            2 => {
                x |= 1 << q;
                z |= 1 << q;
            }
            _ => z |= 1 << q,
        }
    }
    visit(x, z);
    if budget == 0 {
        return;
    }
    for q in from..n {
        for letter in 1..=3u8 {
            stack.push((q, letter));
            enumerate_low_weight(n, budget - 1, q + 1, stack, visit);
            stack.pop();
        }
    }
}

/// Parse a catalog of code records.
///
/// The format is line-oriented labeled text: each record starts with
/// `code: <name>`, carries `n:`, `k:`, `d:`, one `generator:` line per
/// stabilizer generator and one `logical_x:` / `logical_z:` line per logical
/// qubit, and closes with `end`. Blank lines and `#` comments are skipped.
pub fn parse_catalog(text: &str) -> Result<Vec<CodeSpec>> {
    let mut records = Vec::new();
    let mut current: Option<CodeSpec> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |msg: String| Error::parse(format!("catalog line {}: {msg}", lineno + 1));
        if line == "end" {
            let record = current
                .take()
                .ok_or_else(|| fail("'end' outside a record".to_string()))?;
            records.push(record);
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| fail(format!("expected 'key: value', got {line:?}")))?;
        let value = value.trim();
        if key == "code" {
            if current.is_some() {
                return Err(fail("record started before previous 'end'".to_string()));
            }
            current = Some(CodeSpec {
                name: value.to_string(),
                n: 0,
                k: 0,
                d: 0,
                generators: Vec::new(),
                logical_x: Vec::new(),
                logical_z: Vec::new(),
            });
            continue;
        }
        let record = current
            .as_mut()
            .ok_or_else(|| fail(format!("field {key:?} outside a record")))?;
        match key {
            "n" => record.n = value.parse().map_err(|_| fail(format!("bad n {value:?}")))?,
            "k" => record.k = value.parse().map_err(|_| fail(format!("bad k {value:?}")))?,
            "d" => record.d = value.parse().map_err(|_| fail(format!("bad d {value:?}")))?,
            "generator" => record.generators.push(Pauli::from_str(value)?),
            "logical_x" => record.logical_x.push(Pauli::from_str(value)?),
            "logical_z" => record.logical_z.push(Pauli::from_str(value)?),
            other => return Err(fail(format!("unknown field {other:?}"))),
        }
    }
    if current.is_some() {
        return Err(Error::parse("catalog ends inside a record".to_string()));
    }
    if records.is_empty() {
        return Err(Error::parse("catalog holds no records".to_string()));
    }
    Ok(records)
}

/// Parse and fully validate the built-in catalog.
pub fn builtin_codes() -> Result<Vec<Code>> {
    parse_catalog(BUILTIN_CATALOG)?
        .into_iter()
        .map(Code::build)
        .collect()
}

/// Look up a catalog entry by name and build it.
pub fn builtin_code(name: &str) -> Result<Code> {
    let specs = parse_catalog(BUILTIN_CATALOG)?;
    let spec = specs
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::parameter(format!("unknown code {name:?}")))?;
    Code::build(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::str::FromStr;

    fn five_qubit() -> Code {
        builtin_code("513").unwrap()
    }

    #[test]
    fn builtin_catalog_validates_end_to_end() {
        let codes = builtin_codes().unwrap();
        let names: Vec<&str> = codes.iter().map(|c| c.name()).collect();
        assert_eq!(names, ["513", "713", "833"]);
        for code in &codes {
            let report = code.validation_report();
            assert_eq!(report.computed_distance, report.declared_distance);
            assert!(report.nondegenerate);
            assert_eq!(report.syndrome_count, 1 << code.syndrome_bits());
        }
    }

    #[test]
    fn single_x_syndrome_matches_worked_example() {
        let code = five_qubit();
        let e = Pauli::single(5, 2, crate::pauli::Letter::X);
        assert_eq!(code.syndrome_of(&e).to_string(), "0011");
    }

    #[test]
    fn weight_one_reps_cover_every_nonzero_syndrome_of_the_five_qubit_code() {
        let code = five_qubit();
        let table = code.decoder();
        assert_eq!(table.len(), 16);
        for idx in 0..16 {
            let rep = table.rep_for_index(idx);
            assert_eq!(rep.weight(), usize::from(idx != 0));
            assert!(!table.is_beyond_radius(idx));
            assert_eq!(code.syndrome_of(rep).to_index(), idx);
        }
    }

    #[test]
    fn seven_qubit_table_flags_weight_two_syndromes() {
        let code = builtin_code("713").unwrap();
        let table = code.decoder();
        assert_eq!(table.len(), 64);
        let mut within = 0;
        let mut beyond = 0;
        for idx in 0..64 {
            let rep = table.rep_for_index(idx);
            assert_eq!(code.syndrome_of(rep).to_index(), idx);
            if table.is_beyond_radius(idx) {
                assert_eq!(rep.weight(), 2);
                beyond += 1;
            } else {
                assert!(rep.weight() <= 1);
                within += 1;
            }
        }
        assert_eq!((within, beyond), (22, 42));
    }

    #[test]
    fn eight_qubit_table_flags_weight_two_syndromes() {
        let code = builtin_code("833").unwrap();
        let table = code.decoder();
        assert_eq!(table.len(), 32);
        let beyond = (0..32).filter(|&i| table.is_beyond_radius(i)).count();
        assert_eq!(beyond, 7);
        for idx in 0..32 {
            let w = table.rep_for_index(idx).weight();
            assert_eq!(table.is_beyond_radius(idx), w > 1);
        }
    }

    #[test]
    fn every_weight_one_error_is_correctable() {
        for code in builtin_codes().unwrap() {
            for q in 0..code.n() {
                for letter in [
                    crate::pauli::Letter::X,
                    crate::pauli::Letter::Y,
                    crate::pauli::Letter::Z,
                ] {
                    let class = code.classify(&Pauli::single(code.n(), q, letter));
                    assert!(class.is_correctable(), "{} {letter:?}{q}", code.name());
                }
            }
        }
    }

    #[test]
    fn logical_operators_classify_as_their_own_label() {
        let code = builtin_code("833").unwrap();
        let k = code.k();
        for label_idx in 0..(1usize << (2 * k)) {
            let label = BitVec::from_index(2 * k, label_idx);
            let class = code.classify(&code.logical_class_rep(&label));
            assert!(class.syndrome.is_zero());
            assert_eq!(class.logical, label);
            assert_eq!(class.is_correctable(), label_idx == 0);
        }
    }

    #[test]
    fn classification_is_invariant_under_stabilizer_multiplication() {
        let code = five_qubit();
        let mut rng = rng::root(41);
        for _ in 0..200 {
            let e = Pauli::random(5, &mut rng);
            let class = code.classify(&e);
            let shifted = e.mul(&code.random_stabilizer(&mut rng));
            assert_eq!(code.classify(&shifted), class);
        }
    }

    #[test]
    fn census_counts_match_group_theory() {
        let code = five_qubit();
        let census = code.census();
        assert_eq!(census.syndrome_count, 16);
        assert_eq!(census.classes_per_syndrome, 4);
        assert_eq!(census.members_per_class, 16);
        assert_eq!(census.uncorrectable_per_syndrome, 3);
        assert_eq!(census.total_classes, 64);

        let census = builtin_code("833").unwrap().census();
        assert_eq!(census.syndrome_count, 32);
        assert_eq!(census.classes_per_syndrome, 64);
        assert_eq!(census.members_per_class, 32);
        assert_eq!(census.uncorrectable_per_syndrome, 63);
    }

    #[test]
    fn sampled_errors_are_never_correctable() {
        let code = five_qubit();
        let mut rng = rng::root(99);
        let mut zero_syndromes = 0;
        for _ in 0..500 {
            let e = code.sample_uncorrectable(false, &mut rng);
            let class = code.classify(&e);
            assert!(!class.is_correctable());
            if class.syndrome.is_zero() {
                zero_syndromes += 1;
            }
        }
        // Zero syndrome is 1 of 16 equally likely choices; 500 draws land
        // there ≈ 31 times. A zero count would mean exclusion crept in.
        assert!(zero_syndromes > 5, "zero syndrome drawn {zero_syndromes} times");
        for _ in 0..500 {
            let e = code.sample_uncorrectable(true, &mut rng);
            let class = code.classify(&e);
            assert!(!class.is_correctable());
            assert!(!class.syndrome.is_zero());
        }
    }

    #[test]
    fn sampler_visits_all_uncorrectable_cells_uniformly() {
        let code = five_qubit();
        let mut rng = rng::root(7);
        let cells = 16 * 3;
        let per_cell = 250;
        let draws = cells * per_cell;
        let mut counts = vec![0u32; 16 * 4];
        for _ in 0..draws {
            let class = code.classify(&code.sample_uncorrectable(false, &mut rng));
            counts[class.syndrome.to_index() * 4 + class.logical.to_index()] += 1;
        }
        // 3.9σ band for Binomial(draws, 1/48) per occupied cell.
        let sd = (draws as f64 / 48.0 * (1.0 - 1.0 / 48.0)).sqrt();
        let (lo, hi) = (
            per_cell as f64 - 3.9 * sd,
            per_cell as f64 + 3.9 * sd,
        );
        for s in 0..16 {
            for l in 0..4 {
                let c = f64::from(counts[s * 4 + l]);
                if l == 0 {
                    assert_eq!(c, 0.0, "correctable cell hit at syndrome {s}");
                } else {
                    assert!(c > lo && c < hi, "cell ({s},{l}) count {c}");
                }
            }
        }
    }

    #[test]
    fn build_rejects_misdeclared_distance() {
        let mut spec = parse_catalog(BUILTIN_CATALOG)
            .unwrap()
            .into_iter()
            .find(|s| s.name == "513")
            .unwrap();
        spec.d = 5;
        let err = Code::build(spec).unwrap_err().to_string();
        assert!(err.contains("distance"), "{err}");
    }

    #[test]
    fn build_rejects_dependent_generators() {
        let mut spec = parse_catalog(BUILTIN_CATALOG)
            .unwrap()
            .into_iter()
            .find(|s| s.name == "513")
            .unwrap();
        let dependent = spec.generators[0].mul(&spec.generators[1]).phase_stripped();
        spec.generators[3] = dependent;
        let err = Code::build(spec).unwrap_err().to_string();
        assert!(err.contains("dependent"), "{err}");
    }

    #[test]
    fn build_rejects_anticommuting_generators() {
        let bad = CodeSpec {
            name: "anti".into(),
            n: 3,
            k: 1,
            d: 1,
            generators: vec![
                Pauli::from_str("XII").unwrap(),
                Pauli::from_str("ZII").unwrap(),
            ],
            logical_x: vec![Pauli::from_str("IXI").unwrap()],
            logical_z: vec![Pauli::from_str("IZI").unwrap()],
        };
        let err = Code::build(bad).unwrap_err().to_string();
        assert!(err.contains("anticommute"), "{err}");
    }

    #[test]
    fn build_rejects_broken_logical_pairing() {
        let broken = CodeSpec {
            name: "pairing".into(),
            n: 2,
            k: 1,
            d: 1,
            generators: vec![Pauli::from_str("XI").unwrap()],
            logical_x: vec![Pauli::from_str("IX").unwrap()],
            // X̄ must anticommute with Z̄ on the same logical qubit.
            logical_z: vec![Pauli::from_str("IX").unwrap()],
        };
        assert!(Code::build(broken).is_err());
    }

    #[test]
    fn build_rejects_logical_inside_stabilizer_span() {
        let mut spec = parse_catalog(BUILTIN_CATALOG)
            .unwrap()
            .into_iter()
            .find(|s| s.name == "513")
            .unwrap();
        spec.logical_x[0] = spec.generators[0].clone();
        assert!(Code::build(spec).is_err());
    }

    #[test]
    fn catalog_parser_rejects_malformed_input() {
        assert!(parse_catalog("code: x\nn: 5\n").is_err());
        assert!(parse_catalog("n: 5\nend\n").is_err());
        assert!(parse_catalog("code: x\nmystery: 3\nend\n").is_err());
        assert!(parse_catalog("# only comments\n").is_err());
        assert!(parse_catalog("code: a\nend\ncode: a2\nn: not-a-number\nend").is_err());
    }

    #[test]
    fn oversized_records_hit_the_table_cap() {
        let n = TABLE_MAX_N + 1;
        let gens = (0..n - 1)
            .map(|i| Pauli::single(n, i, crate::pauli::Letter::Z))
            .collect();
        let spec = CodeSpec {
            name: "big".into(),
            n,
            k: 1,
            d: 1,
            generators: gens,
            logical_x: vec![Pauli::single(n, n - 1, crate::pauli::Letter::X)],
            logical_z: vec![Pauli::single(n, n - 1, crate::pauli::Letter::Z)],
        };
        let err = Code::build(spec).unwrap_err().to_string();
        assert!(err.contains("cap"), "{err}");
    }
}
