//! GF(2) linear algebra over packed bit-vectors.
//!
//! Stabilizer generators live in the 2n-dimensional symplectic binary space
//! (X mask concatenated with Z mask). This module supplies the small amount
//! of exact linear algebra the code layer needs: rank and independence,
//! span membership, null-space bases, and symplectic completion of a
//! commuting generator set into logical operator pairs.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Row-echelon basis of a set of GF(2) vectors.
///
/// Rows are stored reduced, each with a distinct pivot column, so membership
/// queries are a single elimination pass.
#[derive(Clone, Debug)]
pub struct RowBasis {
    width: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(width: usize) -> Self {
        RowBasis {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(width: usize, rows: impl IntoIterator<Item = BitVec>) -> Self {
        let mut basis = RowBasis::new(width);
        for row in rows {
            basis.insert(&row);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; the remainder is zero iff `v` lies in
    /// the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.width, "width mismatch in reduction");
        let mut rem = v.clone();
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            if rem.get(pivot) {
                rem.xor_assign(row);
            }
        }
        rem
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Insert `v`; returns false when `v` was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let rem = self.reduce(v);
        let pivot = rem.ones().next();
        match pivot {
            None => false,
            Some(pivot) => {
                self.rows.push(rem);
                self.pivots.push(pivot);
                true
            }
        }
    }
}

/// Rank of an arbitrary collection of equal-length vectors.
pub fn rank(width: usize, rows: impl IntoIterator<Item = BitVec>) -> usize {
    RowBasis::from_rows(width, rows).rank()
}

/// Basis of the null space `{ v : M v = 0 }` for the matrix whose rows are
/// `rows` (all of length `width`).
pub fn kernel_basis(width: usize, rows: &[BitVec]) -> Vec<BitVec> {
    // Gaussian elimination into reduced echelon form, tracking pivot columns.
    let mut echelon: Vec<BitVec> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        assert_eq!(row.len(), width, "width mismatch in kernel computation");
        let mut rem = row.clone();
        for (e, &p) in echelon.iter().zip(&pivots) {
            if rem.get(p) {
                rem.xor_assign(e);
            }
        }
        let pivot = rem.ones().next();
        if let Some(pivot) = pivot {
            // Back-substitute to keep the echelon reduced.
            for e in echelon.iter_mut() {
                if e.get(pivot) {
                    e.xor_assign(&rem);
                }
            }
            echelon.push(rem);
            pivots.push(pivot);
        }
    }
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivots.contains(c)) {
        let mut v = BitVec::zeros(width);
        v.set(free, true);
        for (e, &p) in echelon.iter().zip(&pivots) {
            if e.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Concatenated symplectic coordinates `x ‖ z` of a Pauli (phase dropped).
pub fn symplectic_vector(p: &Pauli) -> BitVec {
    let n = p.n();
    let mut v = BitVec::zeros(2 * n);
    for i in 0..n {
        v.set(i, p.x_bits().get(i));
        v.set(n + i, p.z_bits().get(i));
    }
    v
}

/// Rebuild a phase-stripped Pauli from symplectic coordinates.
pub fn pauli_from_vector(v: &BitVec) -> Pauli {
    assert!(v.len().is_multiple_of(2), "symplectic vector must have even length");
    let n = v.len() / 2;
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    for i in 0..n {
        x.set(i, v.get(i));
        z.set(i, v.get(n + i));
    }
    Pauli::from_parts(x, z, 0).phase_stripped()
}

fn symplectic_product(a: &BitVec, b: &BitVec) -> bool {
    let n = a.len() / 2;
    let mut acc = false;
    for i in 0..n {
        acc ^= (a.get(i) & b.get(n + i)) ^ (a.get(n + i) & b.get(i));
    }
    acc
}

/// Complete a commuting, independent generator set into `k` logical operator
/// pairs `(X̄_i, Z̄_i)` satisfying the standard symplectic relations: each
/// pair anticommutes internally, and everything else (generators included)
/// commutes.
pub fn derive_logical_pairs(generators: &[Pauli]) -> Result<Vec<(Pauli, Pauli)>> {
    if generators.is_empty() {
        return Err(Error::parameter("no generators supplied".to_string()));
    }
    let n = generators[0].n();
    let width = 2 * n;
    let gen_vectors: Vec<BitVec> = generators.iter().map(symplectic_vector).collect();
    let k = n - generators.len();

    // The normalizer is the null space of the symplectically-swapped
    // generator matrix: v commutes with g iff ⟨g.z‖g.x , v⟩ = 0.
    let swapped: Vec<BitVec> = generators
        .iter()
        .map(|g| {
            let mut row = BitVec::zeros(width);
            for i in 0..n {
                row.set(i, g.z_bits().get(i));
                row.set(n + i, g.x_bits().get(i));
            }
            row
        })
        .collect();
    let mut pool = kernel_basis(width, &swapped);

    let mut consumed = RowBasis::from_rows(width, gen_vectors.iter().cloned());
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let u = pool
            .iter()
            .find(|v| !consumed.contains(v))
            .cloned()
            .ok_or_else(|| Error::validation("normalizer too small for logical pairs".to_string()))?;
        let w = pool
            .iter()
            .find(|v| symplectic_product(&u, v))
            .cloned()
            .ok_or_else(|| Error::validation("no symplectic partner found".to_string()))?;
        // Make the rest of the pool commute with the chosen pair.
        for v in pool.iter_mut() {
            if symplectic_product(v, &w) {
                v.xor_assign(&u);
            }
            if symplectic_product(v, &u) {
                v.xor_assign(&w);
            }
        }
        consumed.insert(&u);
        consumed.insert(&w);
        pairs.push((pauli_from_vector(&u), pauli_from_vector(&w)));
    }
    Ok(pairs)
}
