//! Symplectic Pauli-operator algebra.
//!
//! An n-qubit Pauli operator is stored in the canonical form
//! `i^phase · X^x · Z^z`, where `x` and `z` are packed support masks and
//! `phase` is a power of `i` modulo 4. The letter `Y` on qubit `q`
//! corresponds to `x_q = z_q = 1` with one factor of `i` absorbed into the
//! phase, so a bare letter string always denotes the Hermitian tensor product
//! of its letters.
//!
//! Products need no matrix arithmetic: moving the right factor's X-part
//! through the left factor's Z-part contributes `(-1)` per overlapping
//! position, giving
//! `phase = a.phase + b.phase + 2·⟨a.z, b.x⟩ (mod 4)`
//! with the support masks XOR-ed. Two Paulis commute exactly when the
//! symplectic form `⟨a.x, b.z⟩ + ⟨a.z, b.x⟩` vanishes mod 2.

use std::fmt;
use std::str::FromStr;

use crate::bits::{BitVec, MAX_BITS};
use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Letter::I),
            'X' => Ok(Letter::X),
            'Y' => Ok(Letter::Y),
            'Z' => Ok(Letter::Z),
            _ => Err(Error::parse(format!("invalid Pauli letter {c:?}"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }
}

/// An n-qubit Pauli operator `i^phase · X^x · Z^z`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pauli {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl Pauli {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        Pauli {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    /// Build from explicit support masks and phase (power of `i`, mod 4).
    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "X and Z masks must share a length");
        Pauli {
            x,
            z,
            phase: phase & 3,
        }
    }

    /// The Hermitian tensor product of the given letters (phase `i^{#Y}`).
    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut x = BitVec::zeros(letters.len());
        let mut z = BitVec::zeros(letters.len());
        let mut ys = 0u8;
        for (q, letter) in letters.iter().enumerate() {
            let (xb, zb) = letter.bits();
            x.set(q, xb);
            z.set(q, zb);
            if *letter == Letter::Y {
                ys = ys.wrapping_add(1);
            }
        }
        Pauli { x, z, phase: ys & 3 }
    }

    /// A single letter on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        assert!(q < n, "qubit {q} out of range for {n} qubits");
        let mut letters = vec![Letter::I; n];
        letters[q] = letter;
        Pauli::from_letters(&letters)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (0..self.n()).filter(|&q| self.letter(q) != Letter::I).count()
    }

    /// Power of `i` in the canonical form.
    pub fn phase_power(&self) -> u8 {
        self.phase
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    /// True when the support is empty (the operator is `i^phase · I`).
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits carrying the letter `Y`.
    fn y_count(&self) -> usize {
        (0..self.n()).filter(|&q| self.x.get(q) && self.z.get(q)).count()
    }

    /// The same letters with the canonical Hermitian phase `i^{#Y}`.
    pub fn phase_stripped(&self) -> Self {
        Pauli {
            x: self.x.clone(),
            z: self.z.clone(),
            phase: (self.y_count() & 3) as u8,
        }
    }

    /// Hermitian operators square to `+I`; this holds exactly when the phase
    /// power matches the X∧Z overlap parity.
    pub fn is_hermitian(&self) -> bool {
        (self.phase & 1) as usize == self.y_count() % 2
    }

    /// Group product `self · other` with exact phase tracking.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        assert_eq!(self.n(), other.n(), "qubit count mismatch in product");
        let swap = u8::from(self.z.parity_and(&other.x));
        Pauli {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + 2 * swap) & 3,
        }
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Pauli) -> bool {
        assert_eq!(self.n(), other.n(), "qubit count mismatch in commutator");
        !(self.x.parity_and(&other.z) ^ self.z.parity_and(&other.x))
    }

    pub fn anticommutes(&self, other: &Pauli) -> bool {
        !self.commutes(other)
    }

    /// Uniform sample over the `4^n` phase-stripped Paulis.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        let x = BitVec::random(n, rng);
        let z = BitVec::random(n, rng);
        Pauli::from_parts(x, z, 0).phase_stripped()
    }

    /// Letters only, no phase prefix.
    pub fn letters(&self) -> String {
        (0..self.n()).map(|q| self.letter(q).to_char()).collect()
    }

    /// Wire body: X mask then Z mask, each packed MSB-first and byte-aligned.
    pub fn to_wire_bytes(&self) -> Vec<u8> {
        let mut out = self.x.to_bytes();
        out.extend(self.z.to_bytes());
        out
    }

    /// Inverse of [`Pauli::to_wire_bytes`]; the result is phase-stripped.
    pub fn from_wire_bytes(bytes: &[u8], n: usize) -> Result<Self> {
        let half = n.div_ceil(8);
        if bytes.len() != 2 * half {
            return Err(Error::parse(format!(
                "expected {} bytes for an {n}-qubit operator, got {}",
                2 * half,
                bytes.len()
            )));
        }
        let x = BitVec::from_bytes(&bytes[..half], n)?;
        let z = BitVec::from_bytes(&bytes[half..], n)?;
        Ok(Pauli::from_parts(x, z, 0).phase_stripped())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    /// Parse an optional phase prefix (`+`, `-`, `+i`, `-i`) followed by a
    /// letter string, e.g. `"XIZ"` or `"-iY"`.
    fn from_str(s: &str) -> Result<Self> {
        let (prefix_power, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3u8, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2u8, r)
        } else {
            (0u8, s)
        };
        if rest.is_empty() {
            return Err(Error::parse("empty Pauli letter string".to_string()));
        }
        if rest.len() > MAX_BITS {
            return Err(Error::capacity(format!(
                "operator on {} qubits exceeds the {MAX_BITS}-qubit cap",
                rest.len()
            )));
        }
        let letters: Result<Vec<Letter>> = rest.chars().map(Letter::from_char).collect();
        let base = Pauli::from_letters(&letters?);
        Ok(Pauli {
            phase: (base.phase + prefix_power) & 3,
            ..base
        })
    }
}

impl fmt::Display for Pauli {
    /// Canonical rendering: phase prefix relative to the Hermitian letter
    /// product (omitted when `+`), then one letter per qubit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = (self.phase as usize + 4 - self.y_count() % 4) % 4;
        let prefix = match d {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl std::ops::Mul for &Pauli {
    type Output = Pauli;

    fn mul(self, rhs: &Pauli) -> Pauli {
        Pauli::mul(self, rhs)
    }
}
