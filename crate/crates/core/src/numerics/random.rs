//! Reproducible random operators.
//!
//! The generator is xoshiro256++ seeded through SplitMix64 (the reference
//! seeding procedure), as provided by `rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`.
//! Gaussian samples use the Box–Muller transform on two uniform draws from
//! `(0, 1]`, so every stream is fixed by the algorithm and the seed alone.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{inner, root_of_unity, ComplexMatrix, NumericsError};

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `(0, 1]` built from the top 53 bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.inner.random_range(0..bound)
    }

    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }

    /// Standard complex Gaussian with independent N(0,1) real and imaginary parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        let (a, b) = self.standard_normal_pair();
        Complex64::new(a, b)
    }

    pub fn gaussian_vector(&mut self, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| self.complex_normal()).collect()
    }

    /// Derives an independent child seed; used to give each trial its own stream.
    pub fn fork(&mut self) -> SeededRng {
        SeededRng::new(self.next_u64())
    }
}

/// Random unitary from Gram–Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal());
        if let Some(q) = gram_schmidt_columns(&g) {
            return q;
        }
    }
}

fn gram_schmidt_columns(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let dim = g.rows();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = g.column(c);
        // Two passes keep the result orthonormal to machine precision.
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let nv = super::norm(&v);
        if nv < 1e-8 {
            return None;
        }
        cols.push(v.into_iter().map(|x| x / nv).collect());
    }
    Some(ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
}

/// Random Hermitian matrix `(G + G*)/2` with Gaussian `G`.
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal());
    (&g + &g.adjoint()).scale_real(0.5)
}

/// `U = V diag(ω^{e_1}, …, ω^{e_dim}) V*` with uniform exponents and a random unitary `V`.
pub fn random_order_n_observable_with(
    order: u32,
    dim: usize,
    rng: &mut SeededRng,
) -> Result<ComplexMatrix, NumericsError> {
    if order < 2 {
        return Err(NumericsError::InvalidParameter(format!(
            "observable order must be at least 2, got {order}"
        )));
    }
    if dim == 0 {
        return Err(NumericsError::InvalidParameter("dimension must be positive".into()));
    }
    let exps: Vec<Complex64> = (0..dim)
        .map(|_| root_of_unity(order as u64, rng.below(order as u64) as i64))
        .collect();
    let v = random_unitary(dim, rng);
    Ok(&(&v * &ComplexMatrix::diagonal(&exps)) * &v.adjoint())
}

/// Seeded form of [`random_order_n_observable_with`].
pub fn random_order_n_observable(
    order: u32,
    dim: usize,
    seed: u64,
) -> Result<ComplexMatrix, NumericsError> {
    random_order_n_observable_with(order, dim, &mut SeededRng::new(seed))
}
