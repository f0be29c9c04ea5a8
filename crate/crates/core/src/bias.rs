//! Bias polynomials of the mod-n games and their spectra.
//!
//! For a strategy with state `ψ`, the winning probability in `(Z_n, m1, m2)`
//! is `⟨ψ|B|ψ⟩/(4n) + 1/n`, where `B` is the bias polynomial evaluated on the
//! strategy's observables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, ModNGameParams};
use crate::numerics::{
    hermitian_eig, inner, lanczos_top_eigenvalue, norm, root_of_unity, sub_vec, ComplexMatrix, NumericsError,
    DEFAULT_TOL,
};
use crate::poly::{apply_to_state, eval_nc, NCPolynomial, PolyError};
use crate::strategy::{canonical_strategy, canonical_value_formula, Strategy, StrategyError};

/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;

/// Largest operator handed to the dense eigensolver; bigger ones use Lanczos.
pub const DENSE_LIMIT: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BiasError {
    #[error("strategy has order {strategy}, game has modulus {game}")]
    OrderMismatch { strategy: u32, game: u32 },
    #[error("bias operator is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `Σ_{i=1}^{n−1} A0^i B0^{−i} + ω^{−i·m1} A0^i B1^i + A1^i B0^{−i} + ω^{−i·m2} A1^i B1^i`.
pub fn bias_polynomial(p: ModNGameParams) -> Result<NCPolynomial, BiasError> {
    p.validate()?;
    let n = p.n;
    let mut b = NCPolynomial::zero(n);
    for i in 1..n as i64 {
        let a0 = NCPolynomial::a(n, 0, i);
        let a1 = NCPolynomial::a(n, 1, i);
        let b0 = NCPolynomial::b(n, 0, -i);
        let b1 = NCPolynomial::b(n, 1, i);
        let w1 = root_of_unity(n as u64, -i * p.m1 as i64);
        let w2 = root_of_unity(n as u64, -i * p.m2 as i64);
        b = &b + &(&a0 * &b0);
        b = &b + &(&a0 * &b1).scale(w1);
        b = &b + &(&a1 * &b0);
        b = &b + &(&a1 * &b1).scale(w2);
    }
    Ok(b)
}

fn check_order(p: ModNGameParams, s: &Strategy) -> Result<(), BiasError> {
    if s.order() != p.n {
        return Err(BiasError::OrderMismatch {
            strategy: s.order(),
            game: p.n,
        });
    }
    Ok(())
}

/// Matrix of the bias polynomial on the strategy's observables.
pub fn bias_operator(p: ModNGameParams, s: &Strategy) -> Result<ComplexMatrix, BiasError> {
    check_order(p, s)?;
    let m = eval_nc(&bias_polynomial(p)?, &s.assignment())?;
    let defect = m.hermitian_defect();
    if defect > 1e-10 * m.frobenius_norm().max(1.0) {
        return Err(BiasError::NotHermitian(defect));
    }
    Ok(m)
}

/// `⟨ψ|B|ψ⟩/(4n) + 1/n`.
pub fn bias_value(p: ModNGameParams, s: &Strategy) -> Result<f64, BiasError> {
    check_order(p, s)?;
    let v = apply_to_state(&bias_polynomial(p)?, &s.assignment(), s.state())?;
    let n = p.n as f64;
    Ok(inner(s.state(), &v).re / (4.0 * n) + 1.0 / n)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BiasReport {
    pub top_eigenvalue: f64,
    pub multiplicity: usize,
    /// Present only when the top eigenvalue is simple; defined up to a global phase.
    #[serde(with = "opt_complex_vec")]
    pub top_eigenvector: Option<Vec<Complex64>>,
    pub predicted_value: f64,
}

mod opt_complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Complex64>>, D::Error> {
        let raw: Option<Vec<[f64; 2]>> = Option::deserialize(d)?;
        Ok(raw.map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

/// Top eigenvalue of the bias operator, its multiplicity and (if simple) its eigenvector.
pub fn bias_spectrum(p: ModNGameParams, s: &Strategy) -> Result<BiasReport, BiasError> {
    let m = bias_operator(p, s)?;
    let eig = hermitian_eig(&m, DEFAULT_TOL)?;
    let clusters = eig.clusters(CLUSTER_GAP);
    let top = clusters.last().expect("nonempty spectrum").clone();
    let multiplicity = top.len();
    let top_eigenvalue = eig.eigenvalues[top.end - 1];
    let top_eigenvector = (multiplicity == 1).then(|| eig.eigenvector(top.start));
    let n = p.n as f64;
    Ok(BiasReport {
        top_eigenvalue,
        multiplicity,
        top_eigenvector,
        predicted_value: top_eigenvalue / (4.0 * n) + 1.0 / n,
    })
}

/// `2n − 4 + 2/sin(π/2n)`, the eigenvalue of `B_n` on the canonical state.
pub fn canonical_eigenvalue(n: u32) -> f64 {
    let nf = n as f64;
    2.0 * nf - 4.0 + 2.0 / (std::f64::consts::PI / (2.0 * nf)).sin()
}

/// `‖B_n|ψ_n⟩ − (2n − 4 + 2/sin(π/2n))|ψ_n⟩‖` for the canonical strategy.
pub fn eigenrelation_residual(n: u32) -> Result<f64, BiasError> {
    let s = canonical_strategy(n)?;
    let b = bias_polynomial(ModNGameParams::chsh(n)?)?;
    let v = apply_to_state(&b, &s.assignment(), s.state())?;
    let lambda = canonical_eigenvalue(n);
    let target: Vec<Complex64> = s.state().iter().map(|z| z * lambda).collect();
    Ok(norm(&sub_vec(&v, &target)))
}

/// One row of the bias table for the canonical strategies.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BiasRow {
    pub n: u32,
    /// Largest eigenvalue of `B_n` over the canonical observables.
    pub top_eigenvalue: f64,
    /// `top_eigenvalue/(4n) + 1/n`.
    pub predicted_value: f64,
    /// `1/2 + 1/(2n sin(π/2n))`.
    pub formula_value: f64,
    /// "dense" or "lanczos".
    pub method: &'static str,
}

/// Column header of the CSV written by [`write_bias_csv`].
pub const BIAS_CSV_HEADER: &str = "n,top_eigenvalue,predicted_value,formula_value,method";

pub fn bias_row(n: u32) -> Result<BiasRow, BiasError> {
    let s = canonical_strategy(n)?;
    let p = ModNGameParams::chsh(n)?;
    let dim = s.dim_a() * s.dim_b();
    let (top, method) = if dim <= DENSE_LIMIT {
        (bias_spectrum(p, &s)?.top_eigenvalue, "dense")
    } else {
        let poly = bias_polynomial(p)?;
        let asg = s.assignment();
        let r = lanczos_top_eigenvalue(
            dim,
            |v| apply_to_state(&poly, &asg, v).expect("shapes agree"),
            1e-10,
            400,
            0x5eed,
        )?;
        (r.eigenvalue, "lanczos")
    };
    let nf = n as f64;
    Ok(BiasRow {
        n,
        top_eigenvalue: top,
        predicted_value: top / (4.0 * nf) + 1.0 / nf,
        formula_value: canonical_value_formula(n),
        method,
    })
}

pub fn write_bias_csv(rows: &[BiasRow], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{BIAS_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.12},{:.12},{:.12},{}",
            r.n, r.top_eigenvalue, r.predicted_value, r.formula_value, r.method
        )?;
    }
    Ok(())
}
