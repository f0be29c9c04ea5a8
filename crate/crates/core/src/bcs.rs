//! Binary constraint systems over Z_2 in multiplicative (±1) form: operator
//! solutions, the perfect strategies they induce, and the glued magic square.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{make_lcs_game, Equation, GameError, LcsGame, LinearSystem};
use crate::group::{evaluate_word, GroupWord, Presentation};
use crate::numerics::{apply_local, norm, sub_vec, ComplexMatrix, I, ONE, ZERO};
use crate::strategy::{Measurements, StrategyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BcsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid constraint system: {0}")]
    Invalid(String),
    #[error("invalid operator solution: {0}")]
    Solution(String),
    #[error("operator solution failed verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// `Π_{j ∈ variables} x_j = sign` with each `x_j ∈ {±1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryConstraint {
    pub variables: Vec<usize>,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BinaryLcsWire", into = "BinaryLcsWire")]
pub struct BinaryLCS {
    variable_count: usize,
    constraints: Vec<BinaryConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct BinaryLcsWire {
    variable_count: usize,
    constraints: Vec<BinaryConstraint>,
}

impl TryFrom<BinaryLcsWire> for BinaryLCS {
    type Error = BcsError;
    fn try_from(w: BinaryLcsWire) -> Result<Self, BcsError> {
        BinaryLCS::new(w.variable_count, w.constraints)
    }
}

impl From<BinaryLCS> for BinaryLcsWire {
    fn from(s: BinaryLCS) -> Self {
        Self {
            variable_count: s.variable_count,
            constraints: s.constraints,
        }
    }
}

impl BinaryLCS {
    pub fn new(variable_count: usize, constraints: Vec<BinaryConstraint>) -> Result<Self, BcsError> {
        for (k, c) in constraints.iter().enumerate() {
            if c.variables.is_empty() {
                return Err(BcsError::Invalid(format!("constraint {k} is empty")));
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(BcsError::Invalid(format!("constraint {k} has sign {}", c.sign)));
            }
            let mut seen = BTreeSet::new();
            for &v in &c.variables {
                if v >= variable_count {
                    return Err(BcsError::Invalid(format!(
                        "constraint {k} uses variable {} of {variable_count}",
                        v + 1
                    )));
                }
                if !seen.insert(v) {
                    return Err(BcsError::Invalid(format!("constraint {k} repeats variable {}", v + 1)));
                }
            }
        }
        Ok(Self {
            variable_count,
            constraints,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn constraints(&self) -> &[BinaryConstraint] {
        &self.constraints
    }

    /// The same system additively over Z_2: sign `−1` becomes right-hand side 1.
    pub fn to_linear_system(&self) -> LinearSystem {
        let equations = self
            .constraints
            .iter()
            .map(|c| Equation {
                terms: c.variables.iter().map(|&v| (v, 1)).collect(),
                rhs: u32::from(c.sign < 0),
            })
            .collect();
        LinearSystem::new(2, self.variable_count, equations).expect("validated on construction")
    }

    /// Whether some `±1` assignment satisfies every constraint (brute force, at most 30 variables).
    pub fn is_classically_satisfiable(&self) -> Result<bool, BcsError> {
        if self.variable_count > 30 {
            return Err(BcsError::Invalid(format!(
                "{} variables is too many for exhaustive search",
                self.variable_count
            )));
        }
        let masks: Vec<(u32, u32)> = self
            .constraints
            .iter()
            .map(|c| (c.variables.iter().fold(0u32, |m, &v| m | 1 << v), u32::from(c.sign < 0)))
            .collect();
        Ok((0u32..1 << self.variable_count).any(|x| masks.iter().all(|&(m, b)| (x & m).count_ones() % 2 == b)))
    }
}

/// Text form: an optional `variables N` line, then one `sign v1 v2 … vk` line per
/// constraint with 1-based variable indices. `#` starts a comment.
impl fmt::Display for BinaryLCS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variables {}", self.variable_count)?;
        for c in &self.constraints {
            write!(f, "{}", if c.sign > 0 { "+1" } else { "-1" })?;
            for v in &c.variables {
                write!(f, " {}", v + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for BinaryLCS {
    type Err = BcsError;

    fn from_str(s: &str) -> Result<Self, BcsError> {
        let mut declared = None;
        let mut constraints = Vec::new();
        for (k, raw) in s.lines().enumerate() {
            let line = k + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let err = |message: String| BcsError::Parse { line, message };
            let mut tokens = text.split_whitespace();
            let head = tokens.next().expect("nonempty line");
            if head == "variables" {
                let n = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| err("expected a variable count".into()))?;
                declared = Some(n);
                continue;
            }
            let sign = match head {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(err(format!("sign must be +1 or -1, got {other:?}"))),
            };
            let variables = tokens
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(err(format!("bad variable index {t:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if variables.is_empty() {
                return Err(err("constraint lists no variables".into()));
            }
            constraints.push(BinaryConstraint { variables, sign });
        }
        let used = constraints
            .iter()
            .flat_map(|c| c.variables.iter().map(|v| v + 1))
            .max()
            .unwrap_or(0);
        BinaryLCS::new(declared.unwrap_or(used), constraints)
    }
}

/// One binary observable per variable, all of the same dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSolution {
    dim: usize,
    observables: Vec<ComplexMatrix>,
}

impl OperatorSolution {
    /// Rejects observables that are not Hermitian involutions within `tol`.
    pub fn new(observables: Vec<ComplexMatrix>, tol: f64) -> Result<Self, BcsError> {
        let dim = observables
            .first()
            .map(ComplexMatrix::rows)
            .ok_or_else(|| BcsError::Solution("no observables".into()))?;
        for (k, m) in observables.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(BcsError::Solution(format!("observable {} is not {dim}x{dim}", k + 1)));
            }
            let d = binary_defect(m);
            if d > tol {
                return Err(BcsError::Solution(format!(
                    "observable {} is not a binary observable (defect {d:.3e})",
                    k + 1
                )));
            }
        }
        Ok(Self { dim, observables })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }
}

/// `max(‖M − M*‖, ‖M² − I‖)`.
fn binary_defect(m: &ComplexMatrix) -> f64 {
    let sq = m * m;
    m.hermitian_defect().max(sq.distance(&ComplexMatrix::identity(m.rows())))
}

fn pauli() -> [ComplexMatrix; 4] {
    let id = ComplexMatrix::identity(2);
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2");
    let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    [id, x, y, z]
}

/// The nine two-qubit observables `A_1 … A_9` of the magic-square solution.
pub fn magic_square_observables() -> Vec<ComplexMatrix> {
    let [id, x, y, z] = pauli();
    vec![
        id.kron(&z),
        z.kron(&id),
        z.kron(&z),
        x.kron(&id),
        id.kron(&x),
        x.kron(&x),
        x.kron(&z),
        z.kron(&x),
        y.kron(&y),
    ]
}

fn constraint(vars: &[usize], sign: i8) -> BinaryConstraint {
    BinaryConstraint {
        variables: vars.iter().map(|v| v - 1).collect(),
        sign,
    }
}

/// Rows of the 3×3 grid multiply to +1, the first two columns to +1, the last column to −1.
pub fn magic_square_system() -> BinaryLCS {
    BinaryLCS::new(
        9,
        vec![
            constraint(&[1, 2, 3], 1),
            constraint(&[4, 5, 6], 1),
            constraint(&[7, 8, 9], 1),
            constraint(&[1, 4, 7], 1),
            constraint(&[2, 5, 8], 1),
            constraint(&[3, 6, 9], -1),
        ],
    )
    .expect("well-formed")
}

pub fn magic_square() -> (BinaryLCS, OperatorSolution) {
    let sol = OperatorSolution::new(magic_square_observables(), 1e-12).expect("Pauli products are binary");
    (magic_square_system(), sol)
}

/// Two magic squares sharing the six-variable line `e3 e6 e9 e10 e13 e16 = −1`.
///
/// Square one keeps its rows and first two columns; square two keeps its rows
/// and last two columns. Eleven constraints in all.
pub fn glued_magic_square_system() -> BinaryLCS {
    BinaryLCS::new(
        18,
        vec![
            constraint(&[1, 2, 3], 1),
            constraint(&[4, 5, 6], 1),
            constraint(&[7, 8, 9], 1),
            constraint(&[1, 4, 7], 1),
            constraint(&[2, 5, 8], 1),
            constraint(&[3, 6, 9, 10, 13, 16], -1),
            constraint(&[10, 11, 12], 1),
            constraint(&[13, 14, 15], 1),
            constraint(&[16, 17, 18], 1),
            constraint(&[11, 14, 17], 1),
            constraint(&[12, 15, 18], 1),
        ],
    )
    .expect("well-formed")
}

/// Index of the first-square observable that `E_i` (for `i ≥ 10`) carries in its upper block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecondSquareMapping {
    /// `10↦3, 11↦2, 12↦1, 13↦6, 14↦5, 15↦4, 16↦9, 17↦8, 18↦7`: the grid mirrored left to right.
    Reflected,
    /// `i ↦ i − 9`.
    Literal,
}

impl SecondSquareMapping {
    pub fn source(self, i: usize) -> usize {
        match self {
            Self::Literal => i - 9,
            Self::Reflected => {
                let k = i - 10;
                3 * (k / 3) + (3 - k % 3)
            }
        }
    }
}

/// `E_i = diag(I₄, A_i)` for `i ≤ 9` and `diag(A_{r(i)}, I₄)` for `i ≥ 10`.
pub fn glued_e_observables(mapping: SecondSquareMapping) -> Vec<ComplexMatrix> {
    let a = magic_square_observables();
    let id = ComplexMatrix::identity(4);
    (1..=18)
        .map(|i| {
            if i <= 9 {
                id.direct_sum(&a[i - 1])
            } else {
                a[mapping.source(i) - 1].direct_sum(&id)
            }
        })
        .collect()
}

/// `F_i = A_i` for `i ≤ 9` and `I₄` otherwise.
pub fn glued_f_observables() -> Vec<ComplexMatrix> {
    let mut f = magic_square_observables();
    f.extend(std::iter::repeat_n(ComplexMatrix::identity(4), 9));
    f
}

/// The glued system with its two inequivalent operator solutions `E` (dim 8) and `F` (dim 4).
pub fn glued_magic_square() -> (BinaryLCS, OperatorSolution, OperatorSolution) {
    let e = OperatorSolution::new(glued_e_observables(SecondSquareMapping::Reflected), 1e-12).expect("binary");
    let f = OperatorSolution::new(glued_f_observables(), 1e-12).expect("binary");
    (glued_magic_square_system(), e, f)
}

/// Product of a constraint's observables, in the order the constraint lists them.
pub fn constraint_product(c: &BinaryConstraint, sol: &OperatorSolution) -> ComplexMatrix {
    c.variables
        .iter()
        .fold(ComplexMatrix::identity(sol.dim), |acc, &v| &acc * &sol.observables[v])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommutationDefect {
    pub constraint: usize,
    pub first: usize,
    pub second: usize,
    pub defect: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperatorSolutionReport {
    pub tol: f64,
    /// Per variable, `max(‖M − M*‖, ‖M² − I‖)`.
    pub observable_defects: Vec<f64>,
    /// Every within-constraint pair, with `‖[M_j, M_k]‖`.
    pub commutation_defects: Vec<CommutationDefect>,
    /// Per constraint, `‖Π_j M_j − sign·I‖`.
    pub product_defects: Vec<f64>,
}

impl OperatorSolutionReport {
    pub fn is_clean(&self) -> bool {
        self.failures().is_empty()
    }

    /// Human-readable list of every check above tolerance; indices are 1-based.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (v, &d) in self.observable_defects.iter().enumerate() {
            if !(d <= self.tol) {
                out.push(format!("variable {} is not a binary observable (defect {d:.3e})", v + 1));
            }
        }
        for c in &self.commutation_defects {
            if !(c.defect <= self.tol) {
                out.push(format!(
                    "constraint {}: variables {} and {} do not commute (defect {:.3e})",
                    c.constraint + 1,
                    c.first + 1,
                    c.second + 1,
                    c.defect
                ));
            }
        }
        for (k, &d) in self.product_defects.iter().enumerate() {
            if !(d <= self.tol) {
                out.push(format!("constraint {}: product differs from its sign (defect {d:.3e})", k + 1));
            }
        }
        out
    }
}

pub fn verify_operator_solution(
    lcs: &BinaryLCS,
    sol: &OperatorSolution,
    tol: f64,
) -> Result<OperatorSolutionReport, BcsError> {
    if sol.observables.len() != lcs.variable_count {
        return Err(BcsError::Solution(format!(
            "{} observables for {} variables",
            sol.observables.len(),
            lcs.variable_count
        )));
    }
    let observable_defects = sol.observables.iter().map(binary_defect).collect();
    let mut commutation_defects = Vec::new();
    let mut product_defects = Vec::new();
    for (k, c) in lcs.constraints.iter().enumerate() {
        for (p, &j) in c.variables.iter().enumerate() {
            for &l in &c.variables[p + 1..] {
                commutation_defects.push(CommutationDefect {
                    constraint: k,
                    first: j,
                    second: l,
                    defect: sol.observables[j].commutator(&sol.observables[l]).frobenius_norm(),
                });
            }
        }
        let target = ComplexMatrix::identity(sol.dim).scale_real(c.sign as f64);
        product_defects.push(constraint_product(c, sol).distance(&target));
    }
    Ok(OperatorSolutionReport {
        tol,
        observable_defects,
        commutation_defects,
        product_defects,
    })
}

/// `(1/√d) Σ_i |i⟩|i⟩`.
pub fn maximally_entangled_state(d: usize) -> Vec<Complex64> {
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut psi = vec![ZERO; d * d];
    for i in 0..d {
        psi[i * d + i] = amp;
    }
    psi
}

/// Strategy induced by an operator solution.
///
/// `alice[i][mask]` is Alice's projector onto the joint eigenspace in which
/// variable `constraints[i].variables[l]` takes value `(−1)^{bit l of mask}`.
#[derive(Debug, Clone)]
pub struct BcsStrategy {
    pub dim: usize,
    pub alice: Vec<Vec<ComplexMatrix>>,
    pub bob_observables: Vec<ComplexMatrix>,
    pub state: Vec<Complex64>,
}

/// Joint eigenprojectors of commuting binary observables, refining one observable at a time.
///
/// Each step splits every current projector `P` into `P(I + M)/2` and `P(I − M)/2`.
pub fn joint_projectors(observables: &[&ComplexMatrix], dim: usize) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(dim);
    let mut projectors = vec![id.clone()];
    for (l, m) in observables.iter().enumerate() {
        let plus = (&id + *m).scale_real(0.5);
        let minus = (&id - *m).scale_real(0.5);
        let mut next = vec![ComplexMatrix::zeros(dim, dim); projectors.len() * 2];
        for (mask, p) in projectors.iter().enumerate() {
            next[mask] = p * &plus;
            next[mask | 1 << l] = p * &minus;
        }
        projectors = next;
    }
    projectors
}

impl BcsStrategy {
    /// `A_j^{(i)} = Σ_{x_j = +1} E_{i,x} − Σ_{x_j = −1} E_{i,x}`, summed over satisfying assignments `x`.
    pub fn alice_observable(&self, lcs: &BinaryLCS, i: usize, position: usize) -> ComplexMatrix {
        let c = &lcs.constraints[i];
        let mut a = ComplexMatrix::zeros(self.dim, self.dim);
        for (mask, e) in self.alice[i].iter().enumerate() {
            if !satisfies(mask, c) {
                continue;
            }
            if mask >> position & 1 == 0 {
                a += e;
            } else {
                a -= e;
            }
        }
        a
    }

    /// `[(I + B_j)/2, (I − B_j)/2]`: Bob answers 0 for eigenvalue +1.
    pub fn bob_pvm(&self, j: usize) -> [ComplexMatrix; 2] {
        let id = ComplexMatrix::identity(self.dim);
        let b = &self.bob_observables[j];
        [(&id + b).scale_real(0.5), (&id - b).scale_real(0.5)]
    }

    /// Measurements in the answer labels of `game`.
    pub fn measurements(&self, lcs: &BinaryLCS, game: &LcsGame) -> Measurements {
        let alice = game
            .assignments
            .iter()
            .enumerate()
            .map(|(i, answers)| {
                debug_assert_eq!(answers.first().map(Vec::len), Some(lcs.constraints[i].variables.len()));
                answers.iter().map(|x| self.alice[i][assignment_mask(x)].clone()).collect()
            })
            .collect();
        let bob = (0..self.bob_observables.len()).map(|j| self.bob_pvm(j).to_vec()).collect();
        Measurements {
            dim_a: self.dim,
            dim_b: self.dim,
            alice,
            bob,
            state: self.state.clone(),
        }
    }
}

fn assignment_mask(x: &[u32]) -> usize {
    x.iter().enumerate().fold(0, |m, (l, &b)| m | (b as usize) << l)
}

fn satisfies(mask: usize, c: &BinaryConstraint) -> bool {
    let parity = (mask.count_ones() % 2) as i8;
    (parity == 0) == (c.sign > 0)
}

/// A perfect strategy together with the game it plays and its winning probability.
#[derive(Debug, Clone)]
pub struct InducedStrategy {
    pub strategy: BcsStrategy,
    pub game: LcsGame,
    pub value: f64,
}

/// Maximally entangled state, Bob's observables are transposes, Alice measures
/// the joint eigenbasis of each constraint's observables.
pub fn solution_to_strategy(lcs: &BinaryLCS, sol: &OperatorSolution, tol: f64) -> Result<InducedStrategy, BcsError> {
    let report = verify_operator_solution(lcs, sol, tol)?;
    let failures = report.failures();
    if !failures.is_empty() {
        return Err(BcsError::Unverified(failures.join("; ")));
    }
    let alice = lcs
        .constraints
        .iter()
        .map(|c| {
            let obs: Vec<&ComplexMatrix> = c.variables.iter().map(|&v| &sol.observables[v]).collect();
            joint_projectors(&obs, sol.dim)
        })
        .collect();
    let strategy = BcsStrategy {
        dim: sol.dim,
        alice,
        bob_observables: sol.observables.iter().map(ComplexMatrix::transpose).collect(),
        state: maximally_entangled_state(sol.dim),
    };
    let game = make_lcs_game(&lcs.to_linear_system())?;
    let value = strategy.measurements(lcs, &game).value(&game.spec)?;
    Ok(InducedStrategy { strategy, game, value })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerfectConditions {
    /// Max over constraints `i` and `j ∈ V_i` of `‖(A_j^{(i)} ⊗ I − I ⊗ B_j)|ψ⟩‖`.
    pub consistency: f64,
    /// Max over constraints of `‖(I − sign_i Π_k A_k^{(i)})|ψ⟩‖`.
    pub constraint: f64,
}

pub fn perfect_conditions_residual(lcs: &BinaryLCS, s: &BcsStrategy) -> PerfectConditions {
    let d = s.dim;
    let mut consistency: f64 = 0.0;
    let mut constraint: f64 = 0.0;
    for (i, c) in lcs.constraints.iter().enumerate() {
        let mut prod = ComplexMatrix::identity(d);
        for (pos, &j) in c.variables.iter().enumerate() {
            let a = s.alice_observable(lcs, i, pos);
            let lhs = apply_local(Some(&a), None, &s.state, d, d);
            let rhs = apply_local(None, Some(&s.bob_observables[j]), &s.state, d, d);
            consistency = consistency.max(norm(&sub_vec(&lhs, &rhs)));
            prod = &prod * &a;
        }
        let v = apply_local(Some(&prod.scale_real(c.sign as f64)), None, &s.state, d, d);
        constraint = constraint.max(norm(&sub_vec(&s.state, &v)));
    }
    PerfectConditions { consistency, constraint }
}

/// Max over question pairs of the Frobenius distance between `I − Σ_{winning} E_{i,x} ⊗ F_{j,y}`
/// and `(1/8)[(I − B A)² + (I − sΠA)² + (I − sΠA·A B)²]`, with `A = A_j^{(i)} ⊗ I`, `B = I ⊗ B_j`.
pub fn losing_operator_identity_residual(lcs: &BinaryLCS, s: &BcsStrategy) -> f64 {
    let d = s.dim;
    let id_d = ComplexMatrix::identity(d);
    let id = ComplexMatrix::identity(d * d);
    let mut worst: f64 = 0.0;
    for (i, c) in lcs.constraints.iter().enumerate() {
        let alice_obs: Vec<ComplexMatrix> = (0..c.variables.len()).map(|p| s.alice_observable(lcs, i, p)).collect();
        let signed_prod = alice_obs
            .iter()
            .fold(id_d.clone(), |acc, a| &acc * a)
            .scale_real(c.sign as f64)
            .kron(&id_d);
        for (pos, &j) in c.variables.iter().enumerate() {
            let bob = s.bob_pvm(j);
            let mut win = ComplexMatrix::zeros(d * d, d * d);
            for (mask, e) in s.alice[i].iter().enumerate() {
                if satisfies(mask, c) {
                    win += &e.kron(&bob[mask >> pos & 1]);
                }
            }
            let lhs = &id - &win;
            let a = alice_obs[pos].kron(&id_d);
            let b = id_d.kron(&s.bob_observables[j]);
            let t1 = &id - &(&b * &a);
            let t2 = &id - &signed_prod;
            let t3 = &id - &(&(&signed_prod * &a) * &b);
            let rhs = (&(&(&t1 * &t1) + &(&t2 * &t2)) + &(&t3 * &t3)).scale_real(0.125);
            worst = worst.max(lhs.distance(&rhs));
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NonrigidityWitness {
    /// `⟨ψ₁|(E₅E₁ ⊗ I)|ψ₁⟩` on the 8-dimensional maximally entangled state.
    pub inner_product: Complex64,
    /// `Tr(E₁E₅)`.
    pub trace: Complex64,
    /// `‖F₁F₅ + F₅F₁‖_F`.
    pub anticommutator_norm: f64,
}

/// The three quantities showing `E` and `F` cannot be related by local isometries.
pub fn nonrigidity_witness() -> NonrigidityWitness {
    let (_, e, f) = glued_magic_square();
    let (e1, e5) = (&e.observables[0], &e.observables[4]);
    let (f1, f5) = (&f.observables[0], &f.observables[4]);
    let psi = maximally_entangled_state(8);
    let moved = apply_local(Some(&(e5 * e1)), None, &psi, 8, 8);
    NonrigidityWitness {
        inner_product: crate::numerics::inner(&psi, &moved),
        trace: (e1 * e5).trace(),
        anticommutator_norm: f1.anticommutator(f5).frobenius_norm(),
    }
}

/// Solution group over Z_2: generators `g_1 … g_N, J` with relators `g_j²`, `J²`,
/// `[g_j, J]`, `[g_j, g_k]` for `j, k` sharing a constraint, and `Π_{j ∈ V_i} g_j · J^{−b_i}`.
///
/// Product relators are named `product_{i}` (1-based).
pub fn solution_group(lcs: &BinaryLCS) -> Presentation {
    let n = lcs.variable_count;
    let j = n;
    let mut generators: Vec<String> = (1..=n).map(|k| format!("g{k}")).collect();
    generators.push("J".into());
    let mut relators: Vec<(String, GroupWord)> = Vec::new();
    for k in 0..n {
        relators.push((format!("g{}^2", k + 1), vec![(k, 2)]));
    }
    relators.push(("J^2".into(), vec![(j, 2)]));
    for k in 0..n {
        relators.push((format!("[g{}, J]", k + 1), vec![(k, 1), (j, 1), (k, -1), (j, -1)]));
    }
    let pairs: BTreeSet<(usize, usize)> = lcs
        .constraints
        .iter()
        .flat_map(|c| {
            c.variables
                .iter()
                .enumerate()
                .flat_map(move |(p, &a)| c.variables[p + 1..].iter().map(move |&b| (a.min(b), a.max(b))))
        })
        .collect();
    for (a, b) in pairs {
        relators.push((
            format!("[g{}, g{}]", a + 1, b + 1),
            vec![(a, 1), (b, 1), (a, -1), (b, -1)],
        ));
    }
    for (i, c) in lcs.constraints.iter().enumerate() {
        let mut w: GroupWord = c.variables.iter().map(|&v| (v, 1)).collect();
        if c.sign < 0 {
            w.push((j, -1));
        }
        relators.push((format!("product_{}", i + 1), w));
    }
    Presentation { generators, relators }
}

/// `‖w(g) − I‖_F` for every relator, with `g_j ↦` the solution's observables and `J ↦ −I`.
pub fn solution_group_defects(p: &Presentation, sol: &OperatorSolution) -> Vec<(String, f64)> {
    let mut images = sol.observables.clone();
    images.push(ComplexMatrix::identity(sol.dim).scale(-ONE));
    let id = ComplexMatrix::identity(sol.dim);
    p.relators
        .iter()
        .map(|(name, w)| (name.clone(), evaluate_word(w, &images).distance(&id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_mapping_table() {
        let r: Vec<usize> = (10..=18).map(|i| SecondSquareMapping::Reflected.source(i)).collect();
        assert_eq!(r, vec![3, 2, 1, 6, 5, 4, 9, 8, 7]);
    }

    #[test]
    fn text_round_trip() {
        let sys = glued_magic_square_system();
        let back: BinaryLCS = sys.to_string().parse().unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn parse_comments_and_errors() {
        let sys: BinaryLCS = "# a comment\n+1 1 2 # trailing\n-1 2 3\n".parse().unwrap();
        assert_eq!(sys.variable_count(), 3);
        assert_eq!(sys.constraints()[1].sign, -1);
        assert!(matches!("+2 1 2".parse::<BinaryLCS>(), Err(BcsError::Parse { line: 1, .. })));
        assert!(matches!("+1 0".parse::<BinaryLCS>(), Err(BcsError::Parse { .. })));
        assert!("+1".parse::<BinaryLCS>().is_err());
        assert!("variables 2\n+1 3".parse::<BinaryLCS>().is_err());
    }

    #[test]
    fn joint_projectors_resolve_identity() {
        let a = magic_square_observables();
        let p = joint_projectors(&[&a[0], &a[1]], 4);
        let sum = p.iter().fold(ComplexMatrix::zeros(4, 4), |acc, e| &acc + e);
        assert!(sum.distance(&ComplexMatrix::identity(4)) < 1e-14);
        for e in &p {
            assert!((e * e).distance(e) < 1e-14);
        }
    }

    #[test]
    fn magic_square_is_not_classically_satisfiable() {
        assert!(!magic_square_system().is_classically_satisfiable().unwrap());
        let easy: BinaryLCS = "+1 1 2\n-1 2 3".parse().unwrap();
        assert!(easy.is_classically_satisfiable().unwrap());
    }
}
