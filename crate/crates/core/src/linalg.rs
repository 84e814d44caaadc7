//! Dense complex linear algebra helpers shared by all modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Frobenius norm.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    // Symmetrize to damp numerical asymmetry before the Hermitian solver.
    let h = (m + m.adjoint()) * cr(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Hermitian eigendecomposition: (eigenvalues, eigenvectors as columns).
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * cr(0.5);
    let se = h.symmetric_eigen();
    let ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
    (ev, se.eigenvectors)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c_: usize) -> CMat {
    CMat::zeros(r, c_)
}

/// Standard matrix unit E_ij of size n.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = cr(1.0);
    m
}

/// Random matrix with independent standard complex Gaussian entries.
pub fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        // Box-Muller from two uniforms per component.
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let u3: f64 = rng.gen_range(1e-12..1.0);
        let u4: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        c(
            (-2.0 * u1.ln()).sqrt() * u2.cos(),
            (-2.0 * u3.ln()).sqrt() * u4.cos(),
        )
    })
}

/// Random Hermitian matrix.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = random_cmat(rng, n, n);
    (&g + g.adjoint()) * cr(0.5)
}

/// Random unit vector.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            c(
                (-2.0 * u1.ln()).sqrt() * u2.cos(),
                (-2.0 * u1.ln()).sqrt() * u2.sin(),
            )
        });
        let n2 = v.norm();
        if n2 > 1e-8 {
            return v * cr(1.0 / n2);
        }
    }
}

/// Gram-Schmidt with a fixed list of seed vectors (columns). Returns an
/// orthonormal basis of their span; near-dependent vectors are dropped.
pub fn gram_schmidt(vectors: &[CVec]) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let coef = b.dotc(&w); // sum conj(b_i) w_i
            w -= b * coef;
        }
        let n = w.norm();
        if n > 1e-10 {
            basis.push(w * cr(1.0 / n));
        }
    }
    basis
}
