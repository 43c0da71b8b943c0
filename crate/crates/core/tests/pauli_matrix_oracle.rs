//! Cross-checks the symplectic Pauli algebra against dense matrices.
//!
//! Every operator identity the packed representation claims — products,
//! phases, commutation — must agree with literal 2^n × 2^n complex matrix
//! arithmetic on small registers.

use num_complex::Complex64;
use qseal::pauli::Pauli;
use rand::SeedableRng;

type Matrix = Vec<Vec<Complex64>>;

fn zero(dim: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

/// Dense matrix of `i^phase · X^x · Z^z` with qubit 0 as the most
/// significant index bit.
fn dense(p: &Pauli) -> Matrix {
    let n = p.n();
    let dim = 1usize << n;
    let phase = match p.phase_power() {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    for q in 0..n {
        if p.x_bits().get(q) {
            x_mask |= 1 << (n - 1 - q);
        }
        if p.z_bits().get(q) {
            z_mask |= 1 << (n - 1 - q);
        }
    }
    let mut m = zero(dim);
    for col in 0..dim {
        let sign = if (col & z_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        m[col ^ x_mask][col] = phase * sign;
    }
    m
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    let mut out = zero(dim);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn assert_matrix_eq(a: &Matrix, b: &Matrix) {
    for (ra, rb) in a.iter().zip(b) {
        for (va, vb) in ra.iter().zip(rb) {
            assert!((va - vb).norm() < 1e-12, "matrix mismatch: {va} vs {vb}");
        }
    }
}

fn all_paulis(n: usize) -> Vec<Pauli> {
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let mut s = String::new();
        let mut c = code;
        for _ in 0..n {
            s.push(letters[c % 4]);
            c /= 4;
        }
        for prefix in ["", "+i", "-", "-i"] {
            out.push(format!("{prefix}{s}").parse().unwrap());
        }
    }
    out
}

#[test]
fn products_match_dense_matrices_exhaustively_small() {
    for n in 1..=2 {
        let ops = all_paulis(n);
        for a in &ops {
            for b in &ops {
                let fast = a.mul(b);
                assert_matrix_eq(&dense(&fast), &matmul(&dense(a), &dense(b)));
            }
        }
    }
}

#[test]
fn products_match_dense_matrices_random_three_qubit() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
    for _ in 0..300 {
        let a = Pauli::random(3, &mut rng);
        let b = Pauli::random(3, &mut rng);
        let fast = a.mul(&b);
        assert_matrix_eq(&dense(&fast), &matmul(&dense(&a), &dense(&b)));
    }
}

#[test]
fn named_product_example_matches_oracle() {
    let a: Pauli = "XIZ".parse().unwrap();
    let b: Pauli = "IXZ".parse().unwrap();
    let product = a.mul(&b);
    assert_eq!(product.to_string(), "XXI");
    assert_matrix_eq(&dense(&product), &matmul(&dense(&a), &dense(&b)));
}

#[test]
fn commutation_matches_dense_commutator() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(78);
    for _ in 0..200 {
        let a = Pauli::random(2, &mut rng);
        let b = Pauli::random(2, &mut rng);
        let ab = matmul(&dense(&a), &dense(&b));
        let ba = matmul(&dense(&b), &dense(&a));
        let mut commutator_norm = 0.0f64;
        for i in 0..ab.len() {
            for j in 0..ab.len() {
                commutator_norm += (ab[i][j] - ba[i][j]).norm_sqr();
            }
        }
        assert_eq!(a.commutes(&b), commutator_norm < 1e-18);
    }
}

#[test]
fn parsed_letter_strings_are_hermitian_matrices() {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(79);
    for _ in 0..100 {
        let p = Pauli::random(2, &mut rng);
        let m = dense(&p);
        for (i, row) in m.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                assert!((entry - m[j][i].conj()).norm() < 1e-12);
            }
        }
    }
}
