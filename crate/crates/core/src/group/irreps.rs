use serde::{Deserialize, Serialize};

use super::{alice_presentation, evaluate_word};
use crate::numerics::{root_of_unity, ComplexMatrix, ONE, ZERO};

/// Irreducible representation of the order-3 group given by its generator images.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Irrep {
    pub name: String,
    pub degree: usize,
    pub p0: ComplexMatrix,
    pub p1: ComplexMatrix,
    pub j: ComplexMatrix,
}

impl Irrep {
    /// Largest `‖ρ(r) − I‖_F` over the presentation relators for `n = 3`.
    pub fn relator_defect(&self) -> f64 {
        let images = [self.p0.clone(), self.p1.clone(), self.j.clone()];
        alice_presentation(3)
            .relators
            .iter()
            .map(|(_, w)| evaluate_word(w, &images).distance(&ComplexMatrix::identity(self.degree)))
            .fold(0.0, f64::max)
    }
}

/// `‖H(P0, P1) + I‖_F` with `H = ω Σ_{i=0}^{n−1} P0^i P1 P0^{n−i−1}`, for order-`n` images.
pub fn ring_relation_defect(p0: &ComplexMatrix, p1: &ComplexMatrix, n: u32) -> f64 {
    let d = p0.rows();
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..n {
        let term = &(&p0.pow(i as u64) * p1) * &p0.pow((n - i - 1) as u64);
        h += &term;
    }
    let h = h.scale(root_of_unity(n as u64, 1));
    (&h + &ComplexMatrix::identity(d)).frobenius_norm()
}

/// The twelve irreducible representations: nine characters and three of degree 3.
pub fn g3_irreps() -> Vec<Irrep> {
    let w = root_of_unity(3, 1);
    let wc = w.conj();
    let scalar = |z| ComplexMatrix::diagonal(&[z]);
    let mut out = Vec::with_capacity(12);
    for i in 0..3i64 {
        for j in 0..3i64 {
            out.push(Irrep {
                name: format!("chi_{i}{j}"),
                degree: 1,
                p0: scalar(root_of_unity(3, i)),
                p1: scalar(root_of_unity(3, j)),
                j: scalar(root_of_unity(3, 2 * (j - i))),
            });
        }
    }
    let m = |rows: [[num_complex::Complex64; 3]; 3]| {
        ComplexMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("3x3")
    };
    let cyclic = m([[ZERO, ZERO, ONE], [ONE, ZERO, ZERO], [ZERO, ONE, ZERO]]);
    let cyclic_t = m([[ZERO, ONE, ZERO], [ZERO, ZERO, ONE], [ONE, ZERO, ZERO]]);
    out.push(Irrep {
        name: "g1".into(),
        degree: 3,
        p0: cyclic.clone(),
        p1: m([[ZERO, ZERO, wc], [-wc, ZERO, ZERO], [ZERO, -wc, ZERO]]),
        j: ComplexMatrix::identity(3).scale(w),
    });
    out.push(Irrep {
        name: "g2".into(),
        degree: 3,
        p0: cyclic,
        p1: m([[ZERO, ZERO, -ONE], [-ONE, ZERO, ZERO], [ZERO, ONE, ZERO]]),
        j: ComplexMatrix::identity(3),
    });
    out.push(Irrep {
        name: "g3".into(),
        degree: 3,
        p0: cyclic_t,
        p1: m([[ZERO, w, ZERO], [ZERO, ZERO, -w], [-w, ZERO, ZERO]]),
        j: ComplexMatrix::identity(3).scale(wc),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_square_sum() {
        let total: usize = g3_irreps().iter().map(|r| r.degree * r.degree).sum();
        assert_eq!(total, 36);
    }

    #[test]
    fn g1_central_element() {
        let g1 = g3_irreps().into_iter().find(|r| r.name == "g1").unwrap();
        assert!(g1.j.distance(&ComplexMatrix::identity(3).scale(root_of_unity(3, 1))) < 1e-15);
    }
}
