//! Quantum strategies built from generalized observables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameSpec;
use crate::group::MultiplicationTable;
use crate::numerics::{
    apply_local, compensated_sum, hermitian_eig, inner, norm, normalize, random_order_n_observable_with,
    reduced_density_a, root_of_unity, sub_vec, ComplexMatrix, NumericsError, SeededRng, DEFAULT_TOL, ONE,
    ZERO,
};
use crate::poly::{apply_to_state, Assignment, NCPolynomial, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("order must be at least 2, got {0}")]
    Order(u32),
    #[error("{who} observable {index} is not an order-{order} unitary (‖U^n−I‖={power_defect:.3e}, ‖U*U−I‖={unitarity_defect:.3e})")]
    NotObservable {
        who: &'static str,
        index: usize,
        order: u32,
        power_defect: f64,
        unitarity_defect: f64,
    },
    #[error("state norm is {0}, expected 1")]
    StateNorm(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("inconsistent multiplication table: {0}")]
    Table(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Per-player generalized observables plus a shared pure state on `C^{dimA} ⊗ C^{dimB}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "StrategyWire", into = "StrategyWire")]
pub struct Strategy {
    order: u32,
    dim_a: usize,
    dim_b: usize,
    alice: Vec<ComplexMatrix>,
    bob: Vec<ComplexMatrix>,
    state: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StrategyWire {
    order: u32,
    dim_a: usize,
    dim_b: usize,
    alice_obs: Vec<ComplexMatrix>,
    bob_obs: Vec<ComplexMatrix>,
    state: Vec<[f64; 2]>,
}

impl TryFrom<StrategyWire> for Strategy {
    type Error = StrategyError;
    fn try_from(w: StrategyWire) -> Result<Self, StrategyError> {
        let state = w.state.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let s = Strategy::new(w.order, w.alice_obs, w.bob_obs, state)?;
        if s.dim_a != w.dim_a || s.dim_b != w.dim_b {
            return Err(StrategyError::Shape("declared dimensions disagree with the matrices".into()));
        }
        Ok(s)
    }
}

impl From<Strategy> for StrategyWire {
    fn from(s: Strategy) -> Self {
        StrategyWire {
            order: s.order,
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            alice_obs: s.alice,
            bob_obs: s.bob,
            state: s.state.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Strategy {
    /// Validates with the default tolerance.
    pub fn new(
        order: u32,
        alice: Vec<ComplexMatrix>,
        bob: Vec<ComplexMatrix>,
        state: Vec<Complex64>,
    ) -> Result<Self, StrategyError> {
        Self::with_tolerance(order, alice, bob, state, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        order: u32,
        alice: Vec<ComplexMatrix>,
        bob: Vec<ComplexMatrix>,
        state: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self, StrategyError> {
        if order < 2 {
            return Err(StrategyError::Order(order));
        }
        let dim_a = check_observables("Alice", &alice, order, tol)?;
        let dim_b = check_observables("Bob", &bob, order, tol)?;
        if state.len() != dim_a * dim_b {
            return Err(StrategyError::Shape(format!(
                "state has length {}, expected {}·{}",
                state.len(),
                dim_a,
                dim_b
            )));
        }
        let nrm = norm(&state);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(StrategyError::StateNorm(nrm));
        }
        Ok(Self {
            order,
            dim_a,
            dim_b,
            alice,
            bob,
            state,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }
    pub fn alice(&self) -> &[ComplexMatrix] {
        &self.alice
    }
    pub fn bob(&self) -> &[ComplexMatrix] {
        &self.bob
    }
    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.order, &self.alice, &self.bob).expect("validated observables share a shape")
    }

    /// Same observables with a different shared state.
    pub fn with_state(&self, state: Vec<Complex64>) -> Result<Self, StrategyError> {
        Self::new(self.order, self.alice.clone(), self.bob.clone(), state)
    }
}

fn check_observables(who: &'static str, obs: &[ComplexMatrix], order: u32, tol: f64) -> Result<usize, StrategyError> {
    let dim = obs.first().map(|m| m.rows()).ok_or_else(|| StrategyError::Shape(format!("{who} has no observables")))?;
    for (index, u) in obs.iter().enumerate() {
        if u.rows() != dim || u.cols() != dim {
            return Err(StrategyError::Shape(format!("{who} observable {index} is not {dim}x{dim}")));
        }
        let power_defect = u.pow(order as u64).distance(&ComplexMatrix::identity(dim));
        let unitarity_defect = u.unitarity_defect();
        if power_defect > tol || unitarity_defect > tol {
            return Err(StrategyError::NotObservable {
                who,
                index,
                order,
                power_defect,
                unitarity_defect,
            });
        }
    }
    Ok(dim)
}

/// `z = e^{iπ/2n}`, a primitive `4n`-th root of unity with `z⁴ = ω_n`.
pub fn z_root(n: u32) -> Complex64 {
    root_of_unity(4 * n as u64, 1)
}

/// Cyclic shift `X e_i = e_{i+1 mod n}`.
pub fn shift_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| if r == (c + 1) % n { ONE } else { ZERO })
}

/// `D_j = I − 2 e_j e_j*`.
pub fn reflection_matrix(n: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| match (r == c, r == j) {
        (true, true) => -ONE,
        (true, false) => ONE,
        _ => ZERO,
    })
}

/// `γ_n = sqrt(2n + 2/sin(π/2n))`, the normalization of the canonical state.
pub fn gamma(n: u32) -> f64 {
    let n = n as f64;
    (2.0 * n + 2.0 / (std::f64::consts::PI / (2.0 * n)).sin()).sqrt()
}

/// `Σ_{j=0}^{n−1} z^{±(2j+n+1)}`; the sign is negative when `inverse` is set.
pub fn shifted_root_sum(n: u32, inverse: bool) -> Complex64 {
    let sign = if inverse { -1 } else { 1 };
    (0..n as i64)
        .map(|j| root_of_unity(4 * n as u64, sign * (2 * j + n as i64 + 1)))
        .sum()
}

/// Unnormalized amplitudes `1 − z^{n+2i+1}` of the canonical state on `|i, −i mod n⟩`.
pub fn canonical_amplitudes(n: u32) -> Vec<Complex64> {
    let z = z_root(n);
    (0..n).map(|i| ONE - z.powi((n + 2 * i + 1) as i32)).collect()
}

/// The strategy `S_n`: `A0 = B0 = X`, `A1 = z²D₀X`, `B1 = z²D₀X*`, and the state
/// `(1/γ_n) Σ_i (1 − z^{n+2i+1}) |i, −i⟩`.
pub fn canonical_strategy(n: u32) -> Result<Strategy, StrategyError> {
    if n < 2 {
        return Err(StrategyError::Order(n));
    }
    let d = n as usize;
    let x = shift_matrix(d);
    let z2 = z_root(n).powi(2);
    let d0 = reflection_matrix(d, 0);
    let a1 = (&d0 * &x).scale(z2);
    let b1 = (&d0 * &x.adjoint()).scale(z2);
    let mut state = vec![ZERO; d * d];
    let amps = canonical_amplitudes(n);
    // Normalize numerically rather than by γ_n so the unit-norm check is tight.
    let g = norm(&amps);
    for (i, amp) in amps.iter().enumerate() {
        state[i * d + (d - i) % d] = amp / g;
    }
    Strategy::new(n, vec![x.clone(), a1], vec![x, b1], state)
}

/// Spectral projectors `E_i = (1/n) Σ_k (ω^{−i} U)^k` of an order-`n` observable.
pub fn observable_to_pvm(u: &ComplexMatrix, n: u32, tol: f64) -> Result<Vec<ComplexMatrix>, StrategyError> {
    if !u.is_square() {
        return Err(StrategyError::Shape(format!("observable is {}x{}", u.rows(), u.cols())));
    }
    let d = u.rows();
    let power_defect = u.pow(n as u64).distance(&ComplexMatrix::identity(d));
    let unitarity_defect = u.unitarity_defect();
    if power_defect > tol || unitarity_defect > tol {
        return Err(StrategyError::NotObservable {
            who: "input",
            index: 0,
            order: n,
            power_defect,
            unitarity_defect,
        });
    }
    let powers: Vec<ComplexMatrix> = {
        let mut v = Vec::with_capacity(n as usize);
        let mut acc = ComplexMatrix::identity(d);
        for _ in 0..n {
            v.push(acc.clone());
            acc = &acc * u;
        }
        v
    };
    let scale = 1.0 / n as f64;
    Ok((0..n)
        .map(|i| {
            let mut e = ComplexMatrix::zeros(d, d);
            for (k, pk) in powers.iter().enumerate() {
                let phase = root_of_unity(n as u64, -((i as i64) * k as i64)) * scale;
                e += &pk.scale(phase);
            }
            e
        })
        .collect())
}

/// Projective measurements for every question, plus the shared state.
#[derive(Debug, Clone)]
pub struct Measurements {
    pub dim_a: usize,
    pub dim_b: usize,
    /// `alice[i][a]` is Alice's projector for answer `a` to question `i`.
    pub alice: Vec<Vec<ComplexMatrix>>,
    pub bob: Vec<Vec<ComplexMatrix>>,
    pub state: Vec<Complex64>,
}

impl Measurements {
    pub fn from_strategy(s: &Strategy) -> Result<Self, StrategyError> {
        let pvms = |obs: &[ComplexMatrix]| -> Result<Vec<Vec<ComplexMatrix>>, StrategyError> {
            obs.iter().map(|u| observable_to_pvm(u, s.order, DEFAULT_TOL)).collect()
        };
        Ok(Self {
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            alice: pvms(&s.alice)?,
            bob: pvms(&s.bob)?,
            state: s.state.clone(),
        })
    }

    /// `Σ π(i,j) ⟨ψ|E_{i,a} ⊗ F_{j,b}|ψ⟩ V(i,j,a,b)`.
    ///
    /// Each term is evaluated as `⟨(E⊗I)ψ | (I⊗F)ψ⟩` and the terms are
    /// accumulated with Neumaier summation in the fixed order (i, j, a, b).
    pub fn value(&self, g: &GameSpec) -> Result<f64, StrategyError> {
        if self.alice.len() != g.n_a() || self.bob.len() != g.n_b() {
            return Err(StrategyError::Shape(format!(
                "strategy answers {}x{} questions, game asks {}x{}",
                self.alice.len(),
                self.bob.len(),
                g.n_a(),
                g.n_b()
            )));
        }
        if self.alice.iter().any(|e| e.len() > g.m_a()) || self.bob.iter().any(|f| f.len() > g.m_b()) {
            return Err(StrategyError::Shape("strategy has more outcomes than the game has answers".into()));
        }
        let (da, db) = (self.dim_a, self.dim_b);
        let alice_vecs: Vec<Vec<Vec<Complex64>>> = self
            .alice
            .iter()
            .map(|es| es.iter().map(|e| apply_local(Some(e), None, &self.state, da, db)).collect())
            .collect();
        let bob_vecs: Vec<Vec<Vec<Complex64>>> = self
            .bob
            .iter()
            .map(|fs| fs.iter().map(|f| apply_local(None, Some(f), &self.state, da, db)).collect())
            .collect();
        let mut terms = Vec::new();
        for i in 0..g.n_a() {
            for j in 0..g.n_b() {
                let p = g.probability(i, j);
                if p == 0.0 {
                    continue;
                }
                for (a, va) in alice_vecs[i].iter().enumerate() {
                    for (b, vb) in bob_vecs[j].iter().enumerate() {
                        if g.wins(i, j, a, b) {
                            terms.push(p * inner(va, vb).re);
                        }
                    }
                }
            }
        }
        Ok(compensated_sum(terms))
    }
}

/// Winning probability of `s` in `g`, read off the spectral projectors of each observable.
pub fn strategy_value_direct(g: &GameSpec, s: &Strategy) -> Result<f64, StrategyError> {
    if g.m_a() != s.order as usize || g.m_b() != s.order as usize {
        return Err(StrategyError::Shape(format!(
            "order-{} observables have {} outcomes, game has {}x{} answers",
            s.order,
            s.order,
            g.m_a(),
            g.m_b()
        )));
    }
    Measurements::from_strategy(s)?.value(g)
}

/// Strategy with independently drawn order-`n` observables and a Gaussian random state.
pub fn random_strategy(n: u32, dim_a: usize, dim_b: usize, rng: &mut SeededRng) -> Result<Strategy, StrategyError> {
    let alice = (0..2)
        .map(|_| random_order_n_observable_with(n, dim_a, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let bob = (0..2)
        .map(|_| random_order_n_observable_with(n, dim_b, rng))
        .collect::<Result<Vec<_>, _>>()?;
    let state = normalize(&rng.gaussian_vector(dim_a * dim_b));
    Strategy::new(n, alice, bob, state)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchmidtData {
    /// Nonincreasing.
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Entanglement entropy in bits.
    pub entropy: f64,
}

/// Coefficients at or below this are not counted in the Schmidt rank.
pub const SCHMIDT_RANK_THRESHOLD: f64 = 1e-9;

/// Schmidt coefficients from the eigenvalues of the reduced density matrix on A.
pub fn schmidt(state: &[Complex64], dim_a: usize, dim_b: usize) -> Result<SchmidtData, StrategyError> {
    let nrm = norm(state);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(StrategyError::StateNorm(nrm));
    }
    let rho = reduced_density_a(state, dim_a, dim_b)?;
    let eig = hermitian_eig(&rho, DEFAULT_TOL)?;
    let mut coefficients: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    coefficients.reverse();
    let rank = coefficients.iter().filter(|&&c| c > SCHMIDT_RANK_THRESHOLD).count();
    let entropy = -compensated_sum(
        coefficients
            .iter()
            .filter(|&&c| c > SCHMIDT_RANK_THRESHOLD)
            .map(|&c| {
                let p = c * c;
                p * p.log2()
            }),
    );
    Ok(SchmidtData {
        coefficients,
        rank,
        entropy,
    })
}

/// `‖L(A, B)|ψ⟩‖`.
pub fn check_state_relation(s: &Strategy, relation: &NCPolynomial) -> Result<f64, StrategyError> {
    let v = apply_to_state(relation, &s.assignment(), &s.state)?;
    Ok(norm(&v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Bob,
}

/// Largest `‖f(x)f(y)|ψ⟩ − f(xy)|ψ⟩‖` over all element pairs.
///
/// `images[k]` is `f` of element `k`; it acts on the tensor factor chosen by `side`.
pub fn check_psi_representation(
    table: &MultiplicationTable,
    images: &[ComplexMatrix],
    state: &[Complex64],
    dim_a: usize,
    dim_b: usize,
    side: Side,
) -> Result<f64, StrategyError> {
    table.validate().map_err(StrategyError::Table)?;
    if images.len() != table.size() {
        return Err(StrategyError::Table(format!(
            "{} images for {} elements",
            images.len(),
            table.size()
        )));
    }
    if state.len() != dim_a * dim_b {
        return Err(StrategyError::Shape("state length does not match dimensions".into()));
    }
    let local_dim = match side {
        Side::Alice => dim_a,
        Side::Bob => dim_b,
    };
    if images.iter().any(|m| m.rows() != local_dim || m.cols() != local_dim) {
        return Err(StrategyError::Shape(format!("images must be {local_dim}x{local_dim}")));
    }
    let act = |m: &ComplexMatrix, v: &[Complex64]| match side {
        Side::Alice => apply_local(Some(m), None, v, dim_a, dim_b),
        Side::Bob => apply_local(None, Some(m), v, dim_a, dim_b),
    };
    let single: Vec<Vec<Complex64>> = images.iter().map(|m| act(m, state)).collect();
    let mut worst: f64 = 0.0;
    for x in 0..table.size() {
        for y in 0..table.size() {
            let lhs = act(&images[x], &single[y]);
            let rhs = &single[table.product(x, y)];
            worst = worst.max(norm(&sub_vec(&lhs, rhs)));
        }
    }
    Ok(worst)
}

/// One row of the value/entropy table for the canonical strategies.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n: u32,
    pub value: f64,
    pub entropy_ratio: f64,
}

pub fn entropy_row(n: u32) -> Result<EntropyRow, StrategyError> {
    let s = canonical_strategy(n)?;
    let g = crate::game::make_mod_n_game(crate::game::ModNGameParams::chsh(n).expect("n >= 2"))
        .expect("valid parameters");
    let value = strategy_value_direct(&g, &s)?;
    let sd = schmidt(s.state(), s.dim_a(), s.dim_b())?;
    Ok(EntropyRow {
        n,
        value,
        entropy_ratio: sd.entropy / (n as f64).log2(),
    })
}

/// Column header of the CSV written by [`write_entropy_csv`].
pub const ENTROPY_CSV_HEADER: &str = "n,value,entropy_ratio";

pub fn write_entropy_csv(rows: &[EntropyRow], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{ENTROPY_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{:.12},{:.12}", r.n, r.value, r.entropy_ratio)?;
    }
    Ok(())
}

/// `1/2 + 1/(2n sin(π/2n))`, the winning probability of `S_n` in `G_n`.
pub fn canonical_value_formula(n: u32) -> f64 {
    let nf = n as f64;
    0.5 + 1.0 / (2.0 * nf * (std::f64::consts::PI / (2.0 * nf)).sin())
}
