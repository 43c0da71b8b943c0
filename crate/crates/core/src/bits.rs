//! Packed bit-vectors.
//!
//! `BitVec` is the shared representation for Pauli X/Z support masks,
//! syndromes, key material, and coset labels. Bits are indexed from 0; in
//! every textual rendering bit 0 is written first (leftmost), matching the
//! qubit-0-leftmost convention used for Pauli letter strings. The wire
//! encoding packs bits most-significant-bit-first into bytes, so bit 0 lands
//! in the top bit of the first byte; trailing pad bits must be zero.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on bit-vector length (and therefore on block size `n`).
pub const MAX_BITS: usize = 1024;

const WORD_BITS: usize = 64;

/// A fixed-length vector of bits packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    /// All-zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit-vector length {len} exceeds {MAX_BITS}");
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector of length `len` with ones exactly at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = BitVec::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Parse a string of `0`/`1` characters, bit 0 first.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity (mod 2) of the AND of two equal-length vectors: the GF(2)
    /// inner product.
    pub fn parity_and(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in inner product");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Indices of clear bits, ascending.
    pub fn zeros_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| !self.get(i))
    }

    /// Interpret the vector as an integer with bit 0 most significant,
    /// matching the written form (e.g. `"0011"` → 3). Requires `len <= 64`.
    pub fn to_index(&self) -> usize {
        assert!(self.len <= 64, "index conversion limited to 64 bits");
        let mut idx = 0usize;
        for i in 0..self.len {
            idx = (idx << 1) | usize::from(self.get(i));
        }
        idx
    }

    /// Inverse of [`BitVec::to_index`].
    pub fn from_index(len: usize, index: usize) -> Self {
        assert!(len <= 64, "index conversion limited to 64 bits");
        assert!(index < (1usize << len) || len == 64, "index {index} out of range");
        let mut v = BitVec::zeros(len);
        for i in 0..len {
            v.set(i, index >> (len - 1 - i) & 1 == 1);
        }
        v
    }

    /// Low word of the packed representation (bit i of the vector is bit i of
    /// the word). Only valid for `len <= 64`.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64, "word view limited to 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    /// Pack into bytes most-significant-bit-first: bit 0 of the vector is the
    /// top bit of byte 0. Trailing pad bits are zero.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        bytes
    }

    /// Inverse of [`BitVec::to_bytes`]; rejects nonzero pad bits.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::parse(format!(
                "expected {} bytes for {len} bits, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut v = BitVec::zeros(len);
        for i in 0..len {
            v.set(i, bytes[i / 8] & (0x80 >> (i % 8)) != 0);
        }
        for i in len..bytes.len() * 8 {
            if bytes[i / 8] & (0x80 >> (i % 8)) != 0 {
                return Err(Error::parse("nonzero pad bits in packed bit-vector".to_string()));
            }
        }
        Ok(v)
    }

    /// Lowercase hex of the MSB-first byte packing.
    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Inverse of [`BitVec::to_hex`].
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if !hex.len().is_multiple_of(2) {
            return Err(Error::parse("hex body has odd length".to_string()));
        }
        let bytes: Result<Vec<u8>> = (0..hex.len() / 2)
            .map(|i| {
                u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                    .map_err(|_| Error::parse(format!("invalid hex byte in {hex:?}")))
            })
            .collect();
        BitVec::from_bytes(&bytes?, len)
    }

    /// Sample a uniform bit-vector.
    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Self {
        let mut v = BitVec::zeros(len);
        for word in v.words.iter_mut() {
            *word = rng.random();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}
