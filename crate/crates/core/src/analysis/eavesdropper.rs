//! What a wiretap learns: density operators, the uniform Pauli twirl, and
//! the Holevo bound on extractable information.
//!
//! A relay that measures only declared syndromes sees, from the outside,
//! states averaged over the sender's uniformly random frame choices. The
//! twirl here averages a state over all `X^j Z^k` conjugations in two
//! explicit stages — a Z-stage that dephases and an X-stage that mixes the
//! surviving diagonal — and lands on the maximally mixed state, which is
//! what makes the transmitted block featureless to an observer without the
//! keys. The Holevo quantity then caps what any measurement could extract
//! from an ensemble the observer can distinguish.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::sim::StateVector;

/// Largest register the dense-operator tools accept (`256 × 256`).
pub const DENSITY_MAX_QUBITS: usize = 8;

const TOL: f64 = 1e-9;

/// A validated density operator on `n` qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<DensityMatrix> {
        check_size(state.n())?;
        let dim = 1 << state.n();
        let amps = state.amplitudes();
        let m = DMatrix::from_fn(dim, dim, |r, c| amps[r] * amps[c].conj());
        Ok(DensityMatrix { n: state.n(), m })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
        check_size(n)?;
        let dim = 1 << n;
        let m = DMatrix::from_diagonal_element(
            dim,
            dim,
            Complex64::new(1.0 / dim as f64, 0.0),
        );
        Ok(DensityMatrix { n, m })
    }

    /// Wrap an explicit matrix, enforcing Hermiticity, unit trace, and
    /// positive semidefiniteness.
    pub fn from_matrix(n: usize, m: DMatrix<Complex64>) -> Result<DensityMatrix> {
        check_size(n)?;
        let dim = 1 << n;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::parameter(format!(
                "matrix is {}×{}, expected {dim}×{dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        for r in 0..dim {
            for c in 0..=r {
                if (m[(r, c)] - m[(c, r)].conj()).norm() > TOL {
                    return Err(Error::validation(
                        "density matrix is not Hermitian".to_string(),
                    ));
                }
            }
        }
        let trace: Complex64 = m.diagonal().iter().sum();
        if (trace - Complex64::ONE).norm() > 1e-6 {
            return Err(Error::validation(format!(
                "density matrix has trace {trace}, expected 1"
            )));
        }
        let out = DensityMatrix { n, m };
        if out.eigenvalues().iter().any(|&l| l < -1e-7) {
            return Err(Error::validation(
                "density matrix has a negative eigenvalue".to_string(),
            ));
        }
        Ok(out)
    }

    /// Convex mixture of density operators.
    pub fn mix(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::parameter("mixture needs at least one part".to_string()))?;
        let n = first.n;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 || parts.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::parameter(
                "mixture weights must be nonnegative and sum to 1".to_string(),
            ));
        }
        let dim = 1 << n;
        let mut m = DMatrix::from_element(dim, dim, Complex64::ZERO);
        for (p, part) in parts {
            if part.n != n {
                return Err(Error::parameter("mixture parts differ in size".to_string()));
            }
            m += part.m.scale(*p);
        }
        Ok(DensityMatrix { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|c| c.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let mut sum = 0.0;
        for r in 0..self.m.nrows() {
            for c in 0..self.m.ncols() {
                sum += (self.m[(r, c)] * self.m[(c, r)]).re;
            }
        }
        sum
    }

    /// `P ρ P†` for a Pauli `P`. Global operator phases cancel; only the
    /// Z-part signs and the X-part index shifts survive:
    /// `ρ'[a⊕x][b⊕x] = (-1)^(z·a) (-1)^(z·b) ρ[a][b]`.
    pub fn conjugate_pauli(&self, p: &Pauli) -> DensityMatrix {
        assert_eq!(p.n(), self.n, "operator size mismatch");
        let dim = self.m.nrows();
        let x = index_mask(p, self.n, true);
        let z = index_mask(p, self.n, false);
        let sign = |i: usize| if (i & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        let mut out = DMatrix::from_element(dim, dim, Complex64::ZERO);
        for a in 0..dim {
            for b in 0..dim {
                out[(a ^ x, b ^ x)] = sign(a) * sign(b) * self.m[(a, b)];
            }
        }
        DensityMatrix { n: self.n, m: out }
    }

    /// Average over all `4^n` conjugations `X^j Z^k ρ (X^j Z^k)†`, computed
    /// in two explicit stages: summing the `Z^k` conjugations dephases the
    /// matrix, then summing the `X^j` conjugations of that result mixes
    /// the diagonal uniformly. The output is exactly `Tr(ρ)·I/2^n`.
    pub fn twirl(&self) -> DensityMatrix {
        let dim = self.m.nrows();
        // Z-stage: Σ_k Z^k ρ Z^k / 2^n.
        let mut dephased = DMatrix::from_element(dim, dim, Complex64::ZERO);
        for k in 0..dim {
            let sign = |i: usize| if (i & k).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            for a in 0..dim {
                for b in 0..dim {
                    dephased[(a, b)] += sign(a) * sign(b) * self.m[(a, b)];
                }
            }
        }
        dephased /= Complex64::new(dim as f64, 0.0);
        // X-stage: Σ_j X^j σ X^j / 2^n.
        let mut out = DMatrix::from_element(dim, dim, Complex64::ZERO);
        for j in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    out[(a ^ j, b ^ j)] += dephased[(a, b)];
                }
            }
        }
        out /= Complex64::new(dim as f64, 0.0);
        DensityMatrix { n: self.n, m: out }
    }

    /// Largest entrywise distance from the maximally mixed state
    /// `I/2^n`.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let dim = self.m.nrows();
        let uniform = 1.0 / dim as f64;
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let target = if r == c { uniform } else { 0.0 };
                worst = worst.max((self.m[(r, c)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Real eigenvalues (the matrix is Hermitian by construction).
    fn eigenvalues(&self) -> Vec<f64> {
        self.m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-12)
            .map(|&l| -l * l.log2())
            .sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, state: &StateVector) -> f64 {
        assert_eq!(state.n(), self.n, "register size mismatch");
        let amps = state.amplitudes();
        let mut sum = Complex64::ZERO;
        for r in 0..self.m.nrows() {
            for c in 0..self.m.ncols() {
                sum += amps[r].conj() * self.m[(r, c)] * amps[c];
            }
        }
        sum.re
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > DENSITY_MAX_QUBITS {
        return Err(Error::capacity(format!(
            "density tools accept 1..={DENSITY_MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

fn index_mask(p: &Pauli, n: usize, x_part: bool) -> usize {
    let bits = if x_part { p.x_bits() } else { p.z_bits() };
    let mut mask = 0usize;
    for q in bits.ones() {
        mask |= 1 << (n - 1 - q);
    }
    mask
}

/// Holevo bound `χ = S(Σ pᵢ ρᵢ) − Σ pᵢ S(ρᵢ)` in bits: the ceiling on
/// information any measurement extracts from the labeled ensemble.
pub fn holevo_bound(ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    let average = DensityMatrix::mix(ensemble)?;
    let conditional: f64 = ensemble
        .iter()
        .map(|(p, rho)| p * rho.von_neumann_entropy())
        .sum();
    Ok((average.von_neumann_entropy() - conditional).max(0.0))
}

/// Information bound for a leaked-fraction model: observing each of `n`
/// carriers with probability `ε` reveals at most `2εn` bits (two bits per
/// observed carrier: its X- and Z-frame components).
pub fn accessible_info_bound(epsilon: f64, n: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::parameter(format!(
            "leak fraction {epsilon} outside [0, 1]"
        )));
    }
    Ok(2.0 * epsilon * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn pure_random(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = rng::root(seed);
        DensityMatrix::pure(&StateVector::random(n, &mut rng).unwrap()).unwrap()
    }

    #[test]
    fn pure_states_have_zero_entropy_and_unit_purity() {
        let rho = pure_random(3, 31);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-9);
        assert!(rho.von_neumann_entropy().abs() < 1e-7);
    }

    #[test]
    fn maximally_mixed_entropy_counts_qubits() {
        for n in 1..=4 {
            let rho = DensityMatrix::maximally_mixed(n).unwrap();
            assert!((rho.von_neumann_entropy() - n as f64).abs() < 1e-9);
            assert!((rho.purity() - 0.5f64.powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_lands_on_the_maximally_mixed_state() {
        for n in 1..=3 {
            let rho = pure_random(n, 100 + n as u64);
            let twirled = rho.twirl();
            let mixed = DensityMatrix::maximally_mixed(n).unwrap();
            let diff = (&twirled.m - &mixed.m).norm();
            assert!(diff < 1e-12, "n={n}: ‖Δ‖ = {diff}");
        }
    }

    #[test]
    fn staged_twirl_matches_single_conjugation_average() {
        // Oracle: the naive average over all 4^n frame conjugations, each
        // done through conjugate_pauli (itself pinned against dense matrix
        // products below).
        use crate::bits::BitVec;
        for n in 1..=3usize {
            let rho = pure_random(n, 200 + n as u64);
            let dim = 1usize << n;
            let mut sum = DMatrix::from_element(dim, dim, Complex64::ZERO);
            for j in 0..dim {
                for k in 0..dim {
                    let mut xb = BitVec::zeros(n);
                    let mut zb = BitVec::zeros(n);
                    for q in 0..n {
                        xb.set(q, j >> (n - 1 - q) & 1 == 1);
                        zb.set(q, k >> (n - 1 - q) & 1 == 1);
                    }
                    let p = Pauli::from_parts(xb, zb, 0);
                    sum += &rho.conjugate_pauli(&p).m;
                }
            }
            sum /= Complex64::new((dim * dim) as f64, 0.0);
            let diff = (&rho.twirl().m - &sum).norm();
            assert!(diff < 1e-12, "n={n}: ‖Δ‖ = {diff}");
        }
    }

    #[test]
    fn conjugation_matches_dense_matrix_products() {
        let mut rng = rng::root(41);
        for _ in 0..20 {
            let n = 2usize;
            let rho = DensityMatrix::pure(&StateVector::random(n, &mut rng).unwrap()).unwrap();
            let p = Pauli::random(n, &mut rng);
            let dim = 1 << n;
            // Dense unitary for p.
            let mut u = DMatrix::from_element(dim, dim, Complex64::ZERO);
            let x = index_mask(&p, n, true);
            let z = index_mask(&p, n, false);
            for c in 0..dim {
                let sign = if (c & z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                u[(c ^ x, c)] = Complex64::new(sign, 0.0);
            }
            let direct = &u * &rho.m * u.adjoint();
            let fast = rho.conjugate_pauli(&p).m;
            assert!((&direct - &fast).norm() < 1e-12);
        }
    }

    #[test]
    fn holevo_of_orthogonal_pair_is_one_bit() {
        let zero = DensityMatrix::pure(&StateVector::basis_state(1, 0).unwrap()).unwrap();
        let one = DensityMatrix::pure(&StateVector::basis_state(1, 1).unwrap()).unwrap();
        let chi = holevo_bound(&[(0.5, zero.clone()), (0.5, one)]).unwrap();
        assert!((chi - 1.0).abs() < 1e-9);
        let same = holevo_bound(&[(0.5, zero.clone()), (0.5, zero)]).unwrap();
        assert!(same.abs() < 1e-9);
    }

    #[test]
    fn holevo_of_tilted_pair_matches_binary_entropy() {
        // {|0⟩, |+⟩} at equal priors: χ = h((1 + 1/√2)/2).
        let zero = DensityMatrix::pure(&StateVector::basis_state(1, 0).unwrap()).unwrap();
        let mut plus_state = StateVector::zero(1).unwrap();
        plus_state.apply_h(0);
        let plus = DensityMatrix::pure(&plus_state).unwrap();
        let chi = holevo_bound(&[(0.5, zero), (0.5, plus)]).unwrap();
        let lam = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let h = -lam * lam.log2() - (1.0 - lam) * (1.0 - lam).log2();
        assert!((chi - h).abs() < 1e-9, "{chi} vs {h}");
    }

    #[test]
    fn leak_bound_is_two_bits_per_observed_carrier() {
        let b = accessible_info_bound(0.01, 102).unwrap();
        assert!((b - 2.04).abs() < 1e-12);
        assert!(accessible_info_bound(1.5, 10).is_err());
    }

    #[test]
    fn matrix_validation_rejects_malformed_operators() {
        let dim = 2;
        let bad = DMatrix::from_fn(dim, dim, |r, c| {
            Complex64::new((r + 2 * c) as f64, 0.0)
        });
        assert!(DensityMatrix::from_matrix(1, bad).is_err());

        let double = DMatrix::from_diagonal_element(dim, dim, Complex64::ONE);
        assert!(DensityMatrix::from_matrix(1, double).is_err());

        // Hermitian, trace 1, but indefinite.
        let mut indefinite = DMatrix::from_element(dim, dim, Complex64::ZERO);
        indefinite[(0, 0)] = Complex64::new(1.5, 0.0);
        indefinite[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::from_matrix(1, indefinite).is_err());

        let ok = DMatrix::from_diagonal_element(dim, dim, Complex64::new(0.5, 0.0));
        assert!(DensityMatrix::from_matrix(1, ok).is_ok());
        assert!(DensityMatrix::maximally_mixed(DENSITY_MAX_QUBITS + 1).is_err());

        assert!(DensityMatrix::mix(&[]).is_err());
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(DensityMatrix::mix(&[(0.7, half)]).is_err());
    }
}
