//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small dense matrices (dimension at most a few
//! hundred). Matrices are plain values; no operation mutates its inputs.

mod eig;
mod lanczos;
mod matrix;
mod random;

pub use eig::{hermitian_eig, HermitianEig};
pub use lanczos::{lanczos_top_eigenvalue, LanczosResult};
pub use matrix::{
    add_scaled, apply_local, compensated_sum, inner, norm, normalize, root_of_unity, sub_vec,
    ComplexMatrix, I, ONE, ZERO,
};
pub use random::{
    random_hermitian, random_order_n_observable, random_order_n_observable_with, random_unitary,
    SeededRng,
};

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: defect norm {defect:.3e} exceeds {limit:.3e}")]
    NotHermitian { defect: f64, limit: f64 },
    #[error("Jacobi iteration did not converge: off-diagonal mass {off:.3e} after {sweeps} sweeps")]
    NoConvergence { off: f64, sweeps: usize },
    #[error("data of length {len} cannot fill a {rows}x{cols} matrix")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("rows have differing lengths")]
    RaggedRows,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Traces out the second tensor factor of a `(dim_a·dim_b)`-square operator.
pub fn partial_trace_b(
    rho: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix, NumericsError> {
    let d = dim_a * dim_b;
    if rho.rows() != d || rho.cols() != d {
        return Err(NumericsError::Dimension(format!(
            "operator is {}x{}, expected {d}x{d} for dims ({dim_a}, {dim_b})",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b)
            .map(|k| rho[(i * dim_b + k, j * dim_b + k)])
            .sum()
    }))
}

/// Reduced density matrix of a pure bipartite state, `Tr_B |ψ⟩⟨ψ|`, computed as `ΨΨ*`.
pub fn reduced_density_a(
    state: &[Complex64],
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix, NumericsError> {
    if state.len() != dim_a * dim_b {
        return Err(NumericsError::Dimension(format!(
            "state has length {}, expected {}",
            state.len(),
            dim_a * dim_b
        )));
    }
    let psi = ComplexMatrix::from_vec(dim_a, dim_b, state.to_vec())?;
    Ok(&psi * &psi.adjoint())
}

/// Dirichlet kernel `sin((m+½)x) / (2π sin(x/2))`.
///
/// At `x ≡ 0 (mod 2π)` the removable singularity is filled with `(2m+1)/(2π)`.
pub fn dirichlet_kernel(m: u32, x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = x.rem_euclid(two_pi);
    let half = (x / 2.0).sin();
    if r.abs() < 1e-12 || (two_pi - r).abs() < 1e-12 || half.abs() < 1e-15 {
        return (2 * m + 1) as f64 / two_pi;
    }
    ((m as f64 + 0.5) * x).sin() / (two_pi * half)
}

/// The defining sum `(1/2π) Σ_{k=-m}^{m} e^{ikx}`; kept separate so the closed form can be checked.
pub fn dirichlet_kernel_sum(m: u32, x: f64) -> f64 {
    let m = m as i64;
    let total: Complex64 = (-m..=m)
        .map(|k| Complex64::from_polar(1.0, k as f64 * x))
        .sum();
    total.re / (2.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn partial_trace_of_product_state() {
        let mut ket = vec![ZERO; 4];
        ket[1] = ONE; // |0⟩|1⟩
        let rho = ComplexMatrix::outer(&ket, &ket);
        let red = partial_trace_b(&rho, 2, 2).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(red.distance(&expected) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let ket = vec![Complex64::new(s, 0.0), ZERO, ZERO, Complex64::new(s, 0.0)];
        let red = partial_trace_b(&ComplexMatrix::outer(&ket, &ket), 2, 2).unwrap();
        assert!(red.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(partial_trace_b(&ComplexMatrix::identity(6), 2, 2).is_err());
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let mut rng = SeededRng::new(5);
        let state = normalize(&rng.gaussian_vector(6));
        let a = reduced_density_a(&state, 2, 3).unwrap();
        let b = partial_trace_b(&ComplexMatrix::outer(&state, &state), 2, 3).unwrap();
        assert!(a.distance(&b) < 1e-14);
    }

    #[test]
    fn dirichlet_single_term() {
        assert!((dirichlet_kernel(0, PI) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_m1_at_pi_over_3() {
        assert!((dirichlet_kernel_sum(1, PI / 3.0) - 1.0 / PI).abs() < 1e-14);
        assert!((dirichlet_kernel(1, PI / 3.0) - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_limit_at_zero() {
        assert_eq!(dirichlet_kernel(3, 0.0), 7.0 / (2.0 * PI));
        assert!((dirichlet_kernel(3, 2.0 * PI) - 7.0 / (2.0 * PI)).abs() < 1e-12);
    }
}
