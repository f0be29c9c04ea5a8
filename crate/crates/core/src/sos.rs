//! Sum-of-squares certificates `λI − B = Σ_k w_k T_k* T_k` and their checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bias::bias_polynomial;
use crate::game::ModNGameParams;
use crate::numerics::{
    hermitian_eig, norm, random_order_n_observable_with, root_of_unity, ComplexMatrix, NumericsError, SeededRng,
    DEFAULT_TOL, I, ONE,
};
use crate::poly::{apply_to_state, eval_nc, Assignment, NCPolynomial, PolyError};
use crate::strategy::Strategy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SosError {
    #[error("certificate has order {cert}, bias polynomial has order {bias}")]
    OrderMismatch { cert: u32, bias: u32 },
    #[error("weight of square {0} is not positive")]
    NonPositiveWeight(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedSquare {
    pub name: String,
    pub weight: f64,
    pub poly: NCPolynomial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SOSCertificate {
    pub order: u32,
    pub lambda: f64,
    pub squares: Vec<WeightedSquare>,
}

impl SOSCertificate {
    pub fn validate(&self) -> Result<(), SosError> {
        for sq in &self.squares {
            if !(sq.weight > 0.0) {
                return Err(SosError::NonPositiveWeight(sq.name.clone()));
            }
            if sq.poly.order() != self.order {
                return Err(SosError::OrderMismatch {
                    cert: self.order,
                    bias: sq.poly.order(),
                });
            }
        }
        Ok(())
    }

    /// `Σ_k w_k T_k* T_k` as a polynomial.
    pub fn sum_of_squares(&self) -> NCPolynomial {
        self.squares.iter().fold(NCPolynomial::zero(self.order), |acc, sq| {
            &acc + &sq.poly.hermitian_square().scale_real(sq.weight)
        })
    }

    /// Upper bound `λ/(4n) + 1/n` on the quantum value implied by the certificate.
    pub fn value_bound(&self) -> f64 {
        let n = self.order as f64;
        self.lambda / (4.0 * n) + 1.0 / n
    }
}

fn letters(n: u32) -> [NCPolynomial; 8] {
    [
        NCPolynomial::a(n, 0, 1),
        NCPolynomial::a(n, 0, -1),
        NCPolynomial::a(n, 1, 1),
        NCPolynomial::a(n, 1, -1),
        NCPolynomial::b(n, 0, 1),
        NCPolynomial::b(n, 0, -1),
        NCPolynomial::b(n, 1, 1),
        NCPolynomial::b(n, 1, -1),
    ]
}

fn lin(terms: &[(Complex64, &NCPolynomial)], n: u32) -> NCPolynomial {
    terms
        .iter()
        .fold(NCPolynomial::zero(n), |acc, (c, p)| &acc + &p.scale(*c))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `2√2 I − B₂ = (√2/4)(A0 + A1 − √2 B0)² + (√2/4)(A0 − A1 − √2 B1)²` over binary observables.
pub fn certificate_chsh() -> SOSCertificate {
    let n = 2;
    let [a0, _, a1, _, b0, _, b1, _] = letters(n);
    let r2 = 2f64.sqrt();
    let t1 = lin(&[(ONE, &a0), (ONE, &a1), (re(-r2), &b0)], n);
    let t2 = lin(&[(ONE, &a0), (re(-1.0), &a1), (re(-r2), &b1)], n);
    SOSCertificate {
        order: n,
        lambda: 2.0 * r2,
        squares: vec![
            WeightedSquare {
                name: "T1".into(),
                weight: r2 / 4.0,
                poly: t1,
            },
            WeightedSquare {
                name: "T2".into(),
                weight: r2 / 4.0,
                poly: t2,
            },
        ],
    }
}

/// The degree-2 certificate `6I − B₃ = λ₁(S₁*S₁ + S₂*S₂) + λ₂(T₁*T₁ + T₂*T₂) + λ₃(T₃*T₃ + T₄*T₄) + λ₄(T₅*T₅ + T₆*T₆)`.
pub fn certificate_g3() -> SOSCertificate {
    let n = 3;
    let [a0, a0c, a1, a1c, b0, b0c, b1, b1c] = letters(n);
    let w = root_of_unity(3, 1);
    let wc = w.conj();
    let s7 = 7f64.sqrt();
    let s21 = 21f64.sqrt();
    let a = (w * 2.0 + wc * 3.0) / s7;
    let b = (w * 3.0 + wc * 8.0) / 7.0;
    let ai = a * I;

    // The eight products every T_k is built from, in display order.
    let p = [
        &a0 * &b0c,
        &a0c * &b0,
        &a0 * &b1,
        &a0c * &b1c,
        &a1 * &b0c,
        &a1c * &b0,
        &a1 * &b1,
        &a1c * &b1c,
    ];
    let t = |c: [Complex64; 8]| -> NCPolynomial {
        c.iter().zip(&p).fold(NCPolynomial::zero(n), |acc, (ci, pi)| &acc + &pi.scale(*ci))
    };

    let s1 = lin(&[(ONE, &a0), (w, &a1), (wc, &b0), (w, &b1c)], n);
    let s2 = lin(&[(ONE, &a0c), (wc, &a1c), (w, &b0c), (wc, &b1)], n);
    let t1 = t([ONE, ai, -a, I, a, -I, -wc, -ai * w]);
    let t2 = t([ONE, ai, a, -I, -a, I, -wc, -ai * w]);
    let t3 = t([ONE, -ai, -a, -I, a, I, -wc, ai * w]);
    let t4 = t([ONE, -ai, a, I, -a, -I, -wc, ai * w]);
    let t5 = t([ONE, b, -b, -ONE, -b, -ONE, wc, b * w]);
    let t6 = &NCPolynomial::constant(n, re(6.0)) - &t([ONE, ONE, ONE, ONE, ONE, ONE, wc, w]);

    let l1 = 5.0 / 86.0;
    let l2 = (14.0 + s21) / 344.0;
    let l3 = (14.0 - s21) / 344.0;
    let l4 = 7.0 / 86.0;
    let sq = |name: &str, weight: f64, poly: NCPolynomial| WeightedSquare {
        name: name.into(),
        weight,
        poly,
    };
    SOSCertificate {
        order: n,
        lambda: 6.0,
        squares: vec![
            sq("S1", l1, s1),
            sq("S2", l1, s2),
            sq("T1", l2, t1),
            sq("T2", l2, t2),
            sq("T3", l3, t3),
            sq("T4", l3, t4),
            sq("T5", l4, t5),
            sq("T6", l4, t6),
        ],
    }
}

/// `(λI − B) − Σ w_k T_k* T_k` as a polynomial; zero (up to rounding) for a valid certificate.
pub fn identity_defect_polynomial(cert: &SOSCertificate, bias: &NCPolynomial) -> Result<NCPolynomial, SosError> {
    if cert.order != bias.order() {
        return Err(SosError::OrderMismatch {
            cert: cert.order,
            bias: bias.order(),
        });
    }
    let lhs = &NCPolynomial::constant(cert.order, re(cert.lambda)) - bias;
    Ok(&lhs - &cert.sum_of_squares())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SosVerification {
    pub trials: usize,
    pub max_residual: f64,
    /// Dimensions `(dimA, dimB)` used, one entry per trial.
    pub dims: Vec<(usize, usize)>,
    /// Smallest eigenvalue of the evaluated sum of squares over all trials.
    pub min_sos_eigenvalue: f64,
}

/// Local dimensions for trial `t`: cycles through `{n, 2n}²` so every pairing is exercised.
pub fn trial_dims(n: u32, t: usize) -> (usize, usize) {
    let d = n as usize;
    match t % 4 {
        0 => (d, d),
        1 => (d, 2 * d),
        2 => (2 * d, d),
        _ => (2 * d, 2 * d),
    }
}

/// Draws a random admissible tuple `(A0, A1, B0, B1)` of order-`n` observables.
pub fn random_assignment(n: u32, dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> Assignment {
    let mut draw = |d| random_order_n_observable_with(n, d, rng).expect("valid parameters");
    let alice = [draw(dim_a), draw(dim_a)];
    let bob = [draw(dim_b), draw(dim_b)];
    Assignment::new(n, &alice, &bob).expect("consistent shapes")
}

/// Max over seeded random tuples of `‖(λI − B) − Σ w_k T_k* T_k‖_F`.
pub fn verify_sos_identity(
    cert: &SOSCertificate,
    bias: &NCPolynomial,
    trials: usize,
    seed: u64,
) -> Result<SosVerification, SosError> {
    cert.validate()?;
    if cert.order != bias.order() {
        return Err(SosError::OrderMismatch {
            cert: cert.order,
            bias: bias.order(),
        });
    }
    let n = cert.order;
    let mut rng = SeededRng::new(seed);
    let mut max_residual: f64 = 0.0;
    let mut min_sos_eigenvalue = f64::INFINITY;
    let mut dims = Vec::with_capacity(trials);
    for t in 0..trials {
        let (da, db) = trial_dims(n, t);
        let mut trial_rng = rng.fork();
        let asg = random_assignment(n, da, db, &mut trial_rng);
        let b = eval_nc(bias, &asg)?;
        let lhs = &ComplexMatrix::identity(da * db).scale_real(cert.lambda) - &b;
        let mut rhs = ComplexMatrix::zeros(da * db, da * db);
        for sq in &cert.squares {
            let m = eval_nc(&sq.poly, &asg)?;
            rhs += &(&m.adjoint() * &m).scale_real(sq.weight);
        }
        max_residual = max_residual.max(lhs.distance(&rhs));
        let eig = hermitian_eig(&rhs, DEFAULT_TOL)?;
        min_sos_eigenvalue = min_sos_eigenvalue.min(eig.eigenvalues[0]);
        dims.push((da, db));
    }
    Ok(SosVerification {
        trials,
        max_residual,
        dims,
        min_sos_eigenvalue,
    })
}

/// `‖T_k|ψ⟩‖` for every square of the certificate.
pub fn annihilation_residuals(cert: &SOSCertificate, s: &Strategy) -> Result<Vec<(String, f64)>, SosError> {
    let asg = s.assignment();
    cert.squares
        .iter()
        .map(|sq| Ok((sq.name.clone(), norm(&apply_to_state(&sq.poly, &asg, s.state())?))))
        .collect()
}

/// Largest bias eigenvalue seen over seeded random admissible tuples.
pub fn max_random_bias_eigenvalue(p: ModNGameParams, trials: usize, seed: u64) -> Result<f64, SosError> {
    let bias = bias_polynomial(p).expect("validated parameters");
    let mut rng = SeededRng::new(seed);
    let mut worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let (da, db) = trial_dims(p.n, t);
        let mut trial_rng = rng.fork();
        let asg = random_assignment(p.n, da, db, &mut trial_rng);
        let m = eval_nc(&bias, &asg)?;
        let eig = hermitian_eig(&m, DEFAULT_TOL)?;
        worst = worst.max(*eig.eigenvalues.last().expect("nonempty"));
    }
    Ok(worst)
}

/// A named family of polynomials `L` expected to satisfy `L(A, B)|ψ⟩ = 0` on optimal strategies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedRelation {
    pub name: String,
    pub polys: Vec<NCPolynomial>,
}

/// `H = ω Σ_{i=0}^{n−1} A0^i A1 A0^{n−i−1}`.
pub fn ring_polynomial(n: u32) -> NCPolynomial {
    let w = root_of_unity(n as u64, 1);
    (0..n as i64)
        .fold(NCPolynomial::zero(n), |acc, i| {
            &acc + &(&(&NCPolynomial::a(n, 0, i) * &NCPolynomial::a(n, 1, 1)) * &NCPolynomial::a(n, 0, n as i64 - i - 1))
        })
        .scale(w)
}

/// State-dependent relations satisfied by every optimal strategy of `G_3`.
pub fn derived_relations_g3() -> Vec<NamedRelation> {
    let n = 3;
    let [a0, a0c, a1, a1c, b0, b0c, b1, b1c] = letters(n);
    let w = root_of_unity(3, 1);
    let wc = w.conj();
    let m = |x: &NCPolynomial, y: &NCPolynomial| x * y;
    let m3 = |x: &NCPolynomial, y: &NCPolynomial, z: &NCPolynomial| &(x * y) * z;
    let rel = |name: &str, polys: Vec<NCPolynomial>| NamedRelation {
        name: name.into(),
        polys,
    };
    let h = ring_polynomial(n);
    let hc = h.adjoint();
    let id = NCPolynomial::identity(n);
    vec![
        rel(
            "pairing",
            vec![
                &m(&a0, &b0c) - &m(&a1, &b1).scale(wc),
                &m(&a0c, &b0) - &m(&a1c, &b1c).scale(w),
                &m(&a0, &b1) - &m(&a1, &b0c),
                &m(&a0c, &b1c) - &m(&a1c, &b0),
            ],
        ),
        rel("A0A1_1", vec![&m(&a0c, &a1).scale(wc) - &m(&b1c, &b0c)]),
        rel("A0A1_2", vec![&m(&a0, &a1c).scale(w) - &m(&b1, &b0)]),
        rel("A0A1_3", vec![&m(&a0c, &a1) - &m(&b0, &b1)]),
        rel("A0A1_4", vec![&m(&a0, &a1c) - &m(&b0c, &b1c)]),
        rel("A1A0_1", vec![&m(&a1c, &a0) - &m(&b0, &b1).scale(wc)]),
        rel("A1A0_2", vec![&m(&a1, &a0c) - &m(&b0c, &b1c).scale(w)]),
        rel("A1A0_3", vec![&m(&a1c, &a0) - &m(&b1c, &b0c)]),
        rel("A1A0_4", vec![&m(&a1, &a0c) - &m(&b1, &b0)]),
        rel("group_rel_1", vec![&m(&a0c, &a1) - &m(&a1c, &a0).scale(w)]),
        rel("group_rel_2", vec![&m(&a1, &a0c) - &m(&a0, &a1c).scale(w)]),
        rel("ring", vec![&h + &id, &hc + &id]),
        rel("sum_of_rings", vec![&(&h + &hc) + &id.scale_real(2.0)]),
        rel("important_1", vec![&m3(&a0, &a1, &a0) - &m3(&a0c, &a1c, &a0c).scale(w)]),
        rel(
            "obs_com",
            vec![&m(&m(&a0, &a1c), &m(&a0c, &a1)) - &m(&m(&a0c, &a1), &m(&a0, &a1c))],
        ),
    ]
}
