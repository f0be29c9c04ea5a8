use num_complex::Complex64;

use super::{hermitian_eig, inner, norm, ComplexMatrix, NumericsError, SeededRng};

#[derive(Debug, Clone, Copy)]
pub struct LanczosResult {
    pub eigenvalue: f64,
    /// `‖A v − λ v‖` for the returned Ritz pair.
    pub residual: f64,
    pub iterations: usize,
}

/// Largest eigenvalue of a Hermitian operator given only by its action.
///
/// Plain Lanczos with full reorthogonalization; stops when the Ritz residual
/// drops below `tol` or after `max_iter` steps. The start vector comes from
/// the seeded generator, so runs are reproducible.
pub fn lanczos_top_eigenvalue(
    dim: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<LanczosResult, NumericsError> {
    if dim == 0 {
        return Err(NumericsError::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = SeededRng::new(seed);
    let start = rng.gaussian_vector(dim);
    let s = norm(&start);
    let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|z| z / s).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best = LanczosResult {
        eigenvalue: f64::NAN,
        residual: f64::INFINITY,
        iterations: 0,
    };
    for k in 0..max_iter.min(dim) {
        let mut w = apply(&basis[k]);
        let alpha = inner(&basis[k], &w).re;
        // Two rounds of Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);

        let m = alphas.len();
        let last_step = k + 1 == max_iter.min(dim) || beta < 1e-14;
        // The tridiagonal solve is dense, so only look at the Ritz values every few steps.
        if m % 8 != 0 && !last_step {
            betas.push(beta);
            basis.push(w.iter().map(|z| z / beta).collect());
            continue;
        }
        let t = ComplexMatrix::from_fn(m, m, |r, c| {
            let v = if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        });
        let eig = hermitian_eig(&t, 1e-12)?;
        let top = eig.eigenvalues[m - 1];
        let last = eig.eigenvectors[(m - 1, m - 1)].norm();
        best = LanczosResult {
            eigenvalue: top,
            residual: beta * last,
            iterations: m,
        };
        if best.residual <= tol || beta < 1e-14 {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|z| z / beta).collect());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random_hermitian;

    #[test]
    fn matches_dense_solver() {
        let mut rng = SeededRng::new(4);
        let m = random_hermitian(30, &mut rng);
        let dense = hermitian_eig(&m, 1e-9).unwrap();
        let top = lanczos_top_eigenvalue(30, |v| m.matvec(v), 1e-10, 200, 9).unwrap();
        assert!((top.eigenvalue - dense.eigenvalues[29]).abs() < 1e-9);
    }
}
