//! Two-player non-local games: the two-equation mod-n family, linear
//! constraint system (LCS) games over Z_n, and exact classical values.
//!
//! Answers in the mod-n family are exponents of `ω_n`, so "a + b ≡ m"
//! stands for the multiplicative condition `ω^a ω^b = ω^m`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default limit on predicate evaluations for [`classical_value`].
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("modulus must be at least 2, got {0}")]
    Modulus(u32),
    #[error("right-hand side {value} is not reduced mod {n}")]
    Rhs { value: u32, n: u32 },
    #[error("equation {0} has no satisfying assignment")]
    Unsatisfiable(usize),
    #[error(
        "classical search refused: {strategies} deterministic strategies on the enumerated side \
         ({evaluations} predicate evaluations) exceed the budget of {budget}; \
         full strategy space is {space}"
    )]
    BudgetExceeded {
        strategies: u128,
        evaluations: u128,
        budget: u64,
        space: String,
    },
}

/// Finite game `(I_A, I_B, O_A, O_B, π, V)` with questions and answers indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameSpecRaw", into = "GameSpecRaw")]
pub struct GameSpec {
    n_a: usize,
    n_b: usize,
    m_a: usize,
    m_b: usize,
    distribution: Vec<Vec<f64>>,
    predicate: Vec<bool>,
}

/// Wire form: `{"nA", "nB", "mA", "mB", "distribution": [[p]], "predicate": [[[[bool]]]]}`.
#[derive(Serialize, Deserialize)]
struct GameSpecRaw {
    #[serde(rename = "nA")]
    n_a: usize,
    #[serde(rename = "nB")]
    n_b: usize,
    #[serde(rename = "mA")]
    m_a: usize,
    #[serde(rename = "mB")]
    m_b: usize,
    distribution: Vec<Vec<f64>>,
    predicate: Vec<Vec<Vec<Vec<bool>>>>,
}

impl TryFrom<GameSpecRaw> for GameSpec {
    type Error = GameError;
    fn try_from(raw: GameSpecRaw) -> Result<Self, GameError> {
        let shape_err = || GameError::Invalid("predicate shape does not match nA x nB x mA x mB".into());
        if raw.predicate.len() != raw.n_a {
            return Err(shape_err());
        }
        let mut flat = Vec::with_capacity(raw.n_a * raw.n_b * raw.m_a * raw.m_b);
        for row in &raw.predicate {
            if row.len() != raw.n_b {
                return Err(shape_err());
            }
            for cell in row {
                if cell.len() != raw.m_a {
                    return Err(shape_err());
                }
                for answers in cell {
                    if answers.len() != raw.m_b {
                        return Err(shape_err());
                    }
                    flat.extend_from_slice(answers);
                }
            }
        }
        GameSpec::new(raw.n_a, raw.n_b, raw.m_a, raw.m_b, raw.distribution, flat)
    }
}

impl From<GameSpec> for GameSpecRaw {
    fn from(g: GameSpec) -> Self {
        let predicate = (0..g.n_a)
            .map(|i| {
                (0..g.n_b)
                    .map(|j| {
                        (0..g.m_a)
                            .map(|a| (0..g.m_b).map(|b| g.wins(i, j, a, b)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        GameSpecRaw {
            n_a: g.n_a,
            n_b: g.n_b,
            m_a: g.m_a,
            m_b: g.m_b,
            distribution: g.distribution,
            predicate,
        }
    }
}

impl GameSpec {
    /// `predicate` is flattened in `(i, j, a, b)` row-major order.
    pub fn new(
        n_a: usize,
        n_b: usize,
        m_a: usize,
        m_b: usize,
        distribution: Vec<Vec<f64>>,
        predicate: Vec<bool>,
    ) -> Result<Self, GameError> {
        if n_a == 0 || n_b == 0 || m_a == 0 || m_b == 0 {
            return Err(GameError::Invalid("question and answer counts must be positive".into()));
        }
        if distribution.len() != n_a || distribution.iter().any(|r| r.len() != n_b) {
            return Err(GameError::Invalid("distribution must be an nA x nB table".into()));
        }
        if distribution.iter().flatten().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(GameError::Invalid("distribution entries must be finite and nonnegative".into()));
        }
        let total: f64 = distribution.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(GameError::Invalid(format!("distribution sums to {total}, not 1")));
        }
        if predicate.len() != n_a * n_b * m_a * m_b {
            return Err(GameError::Invalid(format!(
                "predicate has {} entries, expected {}",
                predicate.len(),
                n_a * n_b * m_a * m_b
            )));
        }
        Ok(Self {
            n_a,
            n_b,
            m_a,
            m_b,
            distribution,
            predicate,
        })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }
    pub fn m_a(&self) -> usize {
        self.m_a
    }
    pub fn m_b(&self) -> usize {
        self.m_b
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        self.distribution[i][j]
    }

    pub fn distribution(&self) -> &[Vec<f64>] {
        &self.distribution
    }

    pub fn wins(&self, i: usize, j: usize, a: usize, b: usize) -> bool {
        self.predicate[((i * self.n_b + j) * self.m_a + a) * self.m_b + b]
    }

    /// Winning probability of a deterministic strategy pair.
    pub fn deterministic_value(&self, alice: &[usize], bob: &[usize]) -> f64 {
        let mut v = 0.0;
        for i in 0..self.n_a {
            for j in 0..self.n_b {
                if self.wins(i, j, alice[i], bob[j]) {
                    v += self.distribution[i][j];
                }
            }
        }
        v
    }

    /// Same game with answers renamed: Alice's `a` becomes `perm_a[a]`, Bob's `b` becomes `perm_b[b]`.
    pub fn relabel_answers(&self, perm_a: &[usize], perm_b: &[usize]) -> GameSpec {
        let mut predicate = vec![false; self.predicate.len()];
        for i in 0..self.n_a {
            for j in 0..self.n_b {
                for a in 0..self.m_a {
                    for b in 0..self.m_b {
                        let idx = ((i * self.n_b + j) * self.m_a + perm_a[a]) * self.m_b + perm_b[b];
                        predicate[idx] = self.wins(i, j, a, b);
                    }
                }
            }
        }
        GameSpec {
            predicate,
            ..self.clone()
        }
    }
}

/// Parameters of the two-equation game `(Z_n, m1, m2)`: `x0 x1 = ω^{m1}`, `x0 x1 = ω^{m2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModNGameParams {
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
}

impl ModNGameParams {
    pub fn new(n: u32, m1: u32, m2: u32) -> Result<Self, GameError> {
        let p = Self { n, m1, m2 };
        p.validate()?;
        Ok(p)
    }

    /// The generalized CHSH game `G_n = (Z_n, 0, 1)`.
    pub fn chsh(n: u32) -> Result<Self, GameError> {
        Self::new(n, 0, 1)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.n < 2 {
            return Err(GameError::Modulus(self.n));
        }
        for value in [self.m1, self.m2] {
            if value >= self.n {
                return Err(GameError::Rhs { value, n: self.n });
            }
        }
        Ok(())
    }

    /// The same game as a linear system over the two variables `x0, x1`.
    pub fn linear_system(&self) -> LinearSystem {
        let eq = |rhs| Equation {
            terms: vec![(0, 1), (1, 1)],
            rhs,
        };
        LinearSystem {
            modulus: self.n,
            variable_count: 2,
            equations: vec![eq(self.m1), eq(self.m2)],
        }
    }
}

/// Uniform questions on `[2]×[2]`; Alice answers her value of `x0`, Bob the value of his variable.
pub fn make_mod_n_game(p: ModNGameParams) -> Result<GameSpec, GameError> {
    p.validate()?;
    let n = p.n as usize;
    let rhs = [p.m1 as usize, p.m2 as usize];
    let mut predicate = Vec::with_capacity(4 * n * n);
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..n {
                for b in 0..n {
                    predicate.push(if j == 0 { a == b } else { (a + b) % n == rhs[i] });
                }
            }
        }
    }
    GameSpec::new(2, 2, n, n, vec![vec![0.25; 2]; 2], predicate)
}

/// One equation `Σ_j a_j x_j ≡ b (mod n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    /// `(variable index, exponent)` pairs; exponents are reduced mod n.
    pub terms: Vec<(usize, u32)>,
    pub rhs: u32,
}

impl Equation {
    pub fn variables(&self) -> Vec<usize> {
        self.terms.iter().map(|&(v, _)| v).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub modulus: u32,
    pub variable_count: usize,
    pub equations: Vec<Equation>,
}

impl LinearSystem {
    pub fn new(modulus: u32, variable_count: usize, equations: Vec<Equation>) -> Result<Self, GameError> {
        let mut sys = Self {
            modulus,
            variable_count,
            equations,
        };
        sys.normalize()?;
        Ok(sys)
    }

    fn normalize(&mut self) -> Result<(), GameError> {
        if self.modulus < 2 {
            return Err(GameError::Modulus(self.modulus));
        }
        let n = self.modulus;
        for (k, eq) in self.equations.iter_mut().enumerate() {
            if eq.terms.is_empty() {
                return Err(GameError::Invalid(format!("equation {k} has no variables")));
            }
            let mut seen = std::collections::BTreeSet::new();
            for (v, a) in eq.terms.iter_mut() {
                if *v >= self.variable_count {
                    return Err(GameError::Invalid(format!(
                        "equation {k} uses variable {v} but only {} exist",
                        self.variable_count
                    )));
                }
                if !seen.insert(*v) {
                    return Err(GameError::Invalid(format!("equation {k} repeats variable {v}")));
                }
                *a %= n;
            }
            eq.rhs %= n;
        }
        Ok(())
    }

    /// Satisfying assignments of equation `k`, each listed in the order of its variables.
    pub fn satisfying_assignments(&self, k: usize) -> Vec<Vec<u32>> {
        let eq = &self.equations[k];
        let n = self.modulus;
        let len = eq.terms.len();
        let mut out = Vec::new();
        let mut x = vec![0u32; len];
        loop {
            let s: u64 = eq.terms.iter().zip(&x).map(|(&(_, a), &xi)| a as u64 * xi as u64).sum();
            if s % n as u64 == eq.rhs as u64 {
                out.push(x.clone());
            }
            if !odometer(&mut x, n) {
                break;
            }
        }
        out
    }

    /// Whether a single global assignment satisfies every equation (brute force over `n^vars`).
    pub fn is_satisfiable(&self) -> bool {
        let n = self.modulus;
        let mut x = vec![0u32; self.variable_count];
        loop {
            let ok = self.equations.iter().all(|eq| {
                let s: u64 = eq.terms.iter().map(|&(v, a)| a as u64 * x[v] as u64).sum();
                s % n as u64 == eq.rhs as u64
            });
            if ok {
                return true;
            }
            if !odometer(&mut x, n) {
                return false;
            }
        }
    }
}

fn odometer(x: &mut [u32], base: u32) -> bool {
    for d in x.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// An LCS game together with the meaning of Alice's answer labels.
#[derive(Debug, Clone)]
pub struct LcsGame {
    pub spec: GameSpec,
    pub system: LinearSystem,
    /// `assignments[i][a]` is the assignment to `V_i` that Alice's answer `a` stands for.
    /// Answer labels beyond `assignments[i].len()` are padding and always lose.
    pub assignments: Vec<Vec<Vec<u32>>>,
}

/// Alice receives an equation `i`, Bob a variable `j`; uniform over pairs with `j ∈ V_i`.
///
/// Alice answers a satisfying assignment of `V_i`; they win iff her value
/// for `x_j` equals Bob's answer.
pub fn make_lcs_game(sys: &LinearSystem) -> Result<LcsGame, GameError> {
    let mut sys = sys.clone();
    sys.normalize()?;
    let assignments: Vec<Vec<Vec<u32>>> = (0..sys.equations.len())
        .map(|k| sys.satisfying_assignments(k))
        .collect();
    if let Some(k) = assignments.iter().position(Vec::is_empty) {
        return Err(GameError::Unsatisfiable(k));
    }
    let n_a = sys.equations.len();
    let n_b = sys.variable_count;
    let m_a = assignments.iter().map(Vec::len).max().unwrap_or(1);
    let m_b = sys.modulus as usize;
    let pairs: usize = sys.equations.iter().map(|e| e.terms.len()).sum();
    let mut distribution = vec![vec![0.0; n_b]; n_a];
    for (i, eq) in sys.equations.iter().enumerate() {
        for &(v, _) in &eq.terms {
            distribution[i][v] = 1.0 / pairs as f64;
        }
    }
    let mut predicate = vec![false; n_a * n_b * m_a * m_b];
    for (i, eq) in sys.equations.iter().enumerate() {
        for (pos, &(v, _)) in eq.terms.iter().enumerate() {
            for (a, x) in assignments[i].iter().enumerate() {
                let b = x[pos] as usize;
                predicate[((i * n_b + v) * m_a + a) * m_b + b] = true;
            }
        }
    }
    let spec = GameSpec::new(n_a, n_b, m_a, m_b, distribution, predicate)?;
    Ok(LcsGame {
        spec,
        system: sys,
        assignments,
    })
}

/// Two-variable LCS game in which Alice reports only her first variable.
///
/// Requires every equation to have exactly two variables with an invertible
/// coefficient on the second, so that her remaining value is determined.
pub fn make_first_variable_game(sys: &LinearSystem) -> Result<GameSpec, GameError> {
    let mut sys = sys.clone();
    sys.normalize()?;
    let n = sys.modulus as u64;
    let n_a = sys.equations.len();
    let n_b = sys.variable_count;
    let m = n as usize;
    let pairs = 2 * n_a;
    let mut distribution = vec![vec![0.0; n_b]; n_a];
    let mut predicate = vec![false; n_a * n_b * m * m];
    for (i, eq) in sys.equations.iter().enumerate() {
        if eq.terms.len() != 2 {
            return Err(GameError::Invalid(format!("equation {i} does not have exactly two variables")));
        }
        let (v0, a0) = eq.terms[0];
        let (v1, a1) = eq.terms[1];
        let inv = (1..n).find(|&t| (t * a1 as u64) % n == 1).ok_or_else(|| {
            GameError::Invalid(format!("equation {i}: coefficient {a1} is not invertible mod {n}"))
        })?;
        distribution[i][v0] = 1.0 / pairs as f64;
        distribution[i][v1] = 1.0 / pairs as f64;
        for x0 in 0..n {
            let rest = (eq.rhs as u64 + n * n - (a0 as u64 * x0) % n) % n;
            let x1 = (rest * inv) % n;
            predicate[((i * n_b + v0) * m + x0 as usize) * m + x0 as usize] = true;
            predicate[((i * n_b + v1) * m + x0 as usize) * m + x1 as usize] = true;
        }
    }
    GameSpec::new(n_a, n_b, m, m, distribution, predicate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalValue {
    pub value: f64,
    /// Number of deterministic pairs `(f_A, f_B)` attaining `value` (saturating).
    pub optimal_pairs: u128,
}

/// Exact classical value by exhaustive search with the default budget.
pub fn classical_value(g: &GameSpec) -> Result<ClassicalValue, GameError> {
    classical_value_with_budget(g, DEFAULT_BUDGET)
}

/// Exact classical value.
///
/// Shared randomness never beats the best deterministic pair (the value is
/// linear in the mixture), so it suffices to search deterministic strategies.
/// The side with fewer deterministic strategies is enumerated and the other
/// side best-responds question by question; the optimum count multiplies the
/// number of best responses per question.
pub fn classical_value_with_budget(g: &GameSpec, budget: u64) -> Result<ClassicalValue, GameError> {
    let strategies_a = pow_sat(g.m_a as u128, g.n_a as u32);
    let strategies_b = pow_sat(g.m_b as u128, g.n_b as u32);
    let enumerate_bob = strategies_b <= strategies_a;

    // Work per enumerated strategy: one predicate lookup per (question pair with π > 0, responder answer).
    let support: u128 = g
        .distribution
        .iter()
        .flatten()
        .filter(|&&p| p > 0.0)
        .count() as u128;
    let (strategies, responder_answers) = if enumerate_bob {
        (strategies_b, g.m_a as u128)
    } else {
        (strategies_a, g.m_b as u128)
    };
    let evaluations = strategies.saturating_mul(support).saturating_mul(responder_answers);
    if evaluations > budget as u128 {
        return Err(GameError::BudgetExceeded {
            strategies,
            evaluations,
            budget,
            space: format!("{}^{} x {}^{}", g.m_a, g.n_a, g.m_b, g.n_b),
        });
    }
    Ok(if enumerate_bob {
        search(g, false)
    } else {
        search(g, true)
    })
}

fn pow_sat(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Enumerates the "fixed" side (Bob unless `fix_alice`) and lets the other side best-respond.
fn search(g: &GameSpec, fix_alice: bool) -> ClassicalValue {
    let (fixed_q, fixed_m, resp_q, resp_m) = if fix_alice {
        (g.n_a, g.m_a, g.n_b, g.m_b)
    } else {
        (g.n_b, g.m_b, g.n_a, g.m_a)
    };
    let prob = |r: usize, f: usize| {
        if fix_alice {
            g.distribution[f][r]
        } else {
            g.distribution[r][f]
        }
    };
    let wins = |r: usize, f: usize, ra: usize, fa: usize| {
        if fix_alice {
            g.wins(f, r, fa, ra)
        } else {
            g.wins(r, f, ra, fa)
        }
    };
    // For each responder question, the fixed-side questions it is paired with.
    let partners: Vec<Vec<(usize, f64)>> = (0..resp_q)
        .map(|r| {
            (0..fixed_q)
                .filter_map(|f| {
                    let p = prob(r, f);
                    (p > 0.0).then_some((f, p))
                })
                .collect()
        })
        .collect();

    const EPS: f64 = 1e-12;
    let mut best = f64::NEG_INFINITY;
    let mut count: u128 = 0;
    let mut fixed = vec![0u32; fixed_q];
    loop {
        let mut total = 0.0;
        let mut multiplicity: u128 = 1;
        for (r, ps) in partners.iter().enumerate() {
            let mut best_r = f64::NEG_INFINITY;
            let mut ties: u128 = 0;
            for ra in 0..resp_m {
                let v: f64 = ps
                    .iter()
                    .filter(|&&(f, _)| wins(r, f, ra, fixed[f] as usize))
                    .map(|&(_, p)| p)
                    .sum();
                if v > best_r + EPS {
                    best_r = v;
                    ties = 1;
                } else if (v - best_r).abs() <= EPS {
                    ties += 1;
                }
            }
            total += best_r;
            multiplicity = multiplicity.saturating_mul(ties);
        }
        if total > best + EPS {
            best = total;
            count = multiplicity;
        } else if (total - best).abs() <= EPS {
            count = count.saturating_add(multiplicity);
        }
        if !odometer(&mut fixed, fixed_m as u32) {
            break;
        }
    }
    ClassicalValue {
        value: best,
        optimal_pairs: count,
    }
}
