use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, NumericsError, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `M = V diag(λ) V*` of a Hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<Complex64> = self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let v = &self.eigenvectors;
        &(v * &ComplexMatrix::diagonal(&d)) * &v.adjoint()
    }

    /// Groups consecutive eigenvalues whose gap is at most `gap`; returns index ranges.
    pub fn clusters(&self, gap: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            if k == self.eigenvalues.len() || self.eigenvalues[k] - self.eigenvalues[k - 1] > gap {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Orthogonal projector onto the span of the given eigenvector columns.
    pub fn projector(&self, range: std::ops::Range<usize>) -> ComplexMatrix {
        let dim = self.eigenvectors.rows();
        let mut p = ComplexMatrix::zeros(dim, dim);
        for k in range {
            let v = self.eigenvector(k);
            p += &ComplexMatrix::outer(&v, &v);
        }
        p
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += a[(p, q)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the classical real Jacobi rotation. Sweeps stop once the off-diagonal
/// Frobenius mass drops to `tol·‖M‖_F`, or after 100 sweeps.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEig, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let scale = m.frobenius_norm();
    let defect = m.hermitian_defect();
    let limit = tol * scale.max(1.0);
    if defect > limit {
        return Err(NumericsError::NotHermitian { defect, limit });
    }
    let n = m.rows();
    // Symmetrize so the iteration sees an exactly Hermitian input.
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    // Iterate well past the requested tolerance; it costs a sweep or two at most.
    let target = (tol * 1e-3).max(f64::EPSILON) * scale;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let off = off_diagonal_norm(&a);
    if off > tol * scale {
        return Err(NumericsError::NoConvergence { off, sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let abs_g = g.norm();
    if abs_g < 1e-300 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Diagonal phase d = conj(g)/|g| makes the (p,q) pivot real.
    let d = g.conj() / abs_g;
    let theta = (aqq - app) / (2.0 * abs_g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Rotation U acting on coordinates (p, q):
    //   U_pp = c, U_pq = s, U_qp = -s·d, U_qq = c·d
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = d * (-s);
    let u_qq = d * c;

    let n = a.rows();
    // A ← A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A ← U* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_hermitian, SeededRng, I, ONE};

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::identity(4), 1e-9).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x, 1e-9).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let e = hermitian_eig(&y, 1e-9).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.reconstruct().distance(&y)) < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        match hermitian_eig(&m, 1e-9) {
            Err(NumericsError::NotHermitian { defect, .. }) => assert!((defect - 2f64.sqrt()).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3), 1e-9),
            Err(NumericsError::NotSquare { .. })
        ));
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let mut rng = SeededRng::new(17);
        for dim in [1, 2, 5, 16, 40] {
            let m = random_hermitian(dim, &mut rng);
            let e = hermitian_eig(&m, 1e-9).unwrap();
            let rel = e.reconstruct().distance(&m) / m.frobenius_norm();
            assert!(rel < 1e-10, "dim {dim}: {rel}");
            assert!(e.eigenvectors.unitarity_defect() < 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn clusters_group_degenerate_values() {
        let m = ComplexMatrix::diagonal(&[ONE, ONE, Complex64::new(3.0, 0.0)]);
        let e = hermitian_eig(&m, 1e-9).unwrap();
        assert_eq!(e.clusters(1e-7), vec![0..2, 2..3]);
    }
}
