//! Level-1 and level-2 NPA moment relaxations of the mod-n games, with a
//! sparse SDPA writer and reader.
//!
//! Nothing here solves the SDP. The module builds the problem, exports it,
//! and checks that moment vectors of explicit strategies are feasible.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bias::{bias_polynomial, BiasError};
use crate::game::ModNGameParams;
use crate::numerics::{hermitian_eig, inner, ComplexMatrix, NumericsError, SeededRng, DEFAULT_TOL, ONE, ZERO};
use crate::poly::{apply_to_state, Letter, NCPolynomial, Party, PolyError, Word};
use crate::strategy::Strategy;

#[derive(Debug, Error)]
pub enum NpaError {
    #[error("level must be 1 or 2, got {0}")]
    Level(u32),
    #[error("objective word {0} is not a moment of this relaxation")]
    MissingMoment(String),
    #[error("SDPA parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Bias(#[from] BiasError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn all_letters(n: u32) -> Vec<Letter> {
    let mut out = Vec::new();
    for party in [Party::A, Party::B] {
        for index in 0..2 {
            for exp in 1..n {
                out.push(Letter { party, index, exp });
            }
        }
    }
    out
}

/// Reduced words of length at most `level`, shortest first, the empty word at index 0.
pub fn generate_words(n: u32, level: u32) -> Result<Vec<Word>, NpaError> {
    if !(1..=2).contains(&level) {
        return Err(NpaError::Level(level));
    }
    let letters = all_letters(n);
    let mut set: BTreeSet<(usize, Word)> = BTreeSet::new();
    set.insert((0, Word::identity()));
    for &l in &letters {
        let w = Word::from_letters([l], n);
        set.insert((w.len(), w));
    }
    if level == 2 {
        for &l in &letters {
            for &r in &letters {
                let w = Word::from_letters([l, r], n);
                set.insert((w.len(), w));
            }
        }
    }
    Ok(set.into_iter().map(|(_, w)| w).collect())
}

/// Entry of the moment matrix: moment variable `id`, conjugated when `conj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentRef {
    pub id: usize,
    pub conj: bool,
}

/// `M[u, v] = y(reduce(u* v))`, with `w` and `w*` sharing one variable.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    pub params: ModNGameParams,
    pub order: u32,
    pub level: u32,
    pub words: Vec<Word>,
    /// Representative word of each moment variable; id 0 is the empty word, fixed to 1.
    pub moments: Vec<Word>,
    pub matrix: Vec<Vec<MomentRef>>,
    /// `Σ c_k y_k`, the bias polynomial written in moment variables (conjugation already applied).
    pub objective: Vec<(MomentRef, Complex64)>,
}

struct MomentIndex {
    n: u32,
    ids: HashMap<Word, usize>,
    reps: Vec<Word>,
}

impl MomentIndex {
    fn lookup(&mut self, w: Word) -> MomentRef {
        let adj = w.adjoint(self.n);
        let (rep, conj) = if adj < w { (adj, true) } else { (w, false) };
        let id = match self.ids.get(&rep) {
            Some(&id) => id,
            None => {
                self.reps.push(rep.clone());
                self.ids.insert(rep, self.reps.len() - 1);
                self.reps.len() - 1
            }
        };
        MomentRef { id, conj }
    }
}

pub fn build_moment_problem(p: ModNGameParams, level: u32) -> Result<MomentProblem, NpaError> {
    let n = p.n;
    let words = generate_words(n, level)?;
    let mut index = MomentIndex {
        n,
        ids: HashMap::new(),
        reps: Vec::new(),
    };
    index.lookup(Word::identity());
    let matrix: Vec<Vec<MomentRef>> = words
        .iter()
        .map(|u| {
            let ua = u.adjoint(n);
            words.iter().map(|v| index.lookup(ua.concat(v, n))).collect()
        })
        .collect();
    let present: BTreeSet<usize> = matrix.iter().flatten().map(|r| r.id).collect();
    let mut objective = Vec::new();
    for (w, c) in bias_polynomial(p)?.terms() {
        let r = index.lookup(w.clone());
        if !present.contains(&r.id) {
            return Err(NpaError::MissingMoment(w.to_string()));
        }
        objective.push((r, *c));
    }
    Ok(MomentProblem {
        params: p,
        order: n,
        level,
        words,
        moments: index.reps,
        matrix,
        objective,
    })
}

fn resolve(r: MomentRef, y: &[Complex64]) -> Complex64 {
    if r.conj {
        y[r.id].conj()
    } else {
        y[r.id]
    }
}

impl MomentProblem {
    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Moment matrix for a given moment vector `y` (with `y[0] = 1`).
    pub fn moment_matrix(&self, y: &[Complex64]) -> ComplexMatrix {
        let n = self.size();
        ComplexMatrix::from_fn(n, n, |i, j| resolve(self.matrix[i][j], y))
    }

    pub fn objective_value(&self, y: &[Complex64]) -> Complex64 {
        self.objective.iter().map(|&(r, c)| c * resolve(r, y)).sum()
    }

    /// Moment vector of an explicit strategy: `y_k = ⟨ψ|w_k|ψ⟩`.
    pub fn moments_of(&self, s: &Strategy) -> Result<Vec<Complex64>, NpaError> {
        let asg = s.assignment();
        self.moments
            .iter()
            .map(|w| {
                let v = apply_to_state(&NCPolynomial::monomial(self.order, ONE, w.clone()), &asg, s.state())?;
                Ok(inner(s.state(), &v))
            })
            .collect()
    }

    /// Number of distinct moment variables that appear in the matrix.
    pub fn moment_count(&self) -> usize {
        self.moments.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityReport {
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    /// Largest gap between `y(reduce(u*v))` and `⟨u ψ| v ψ⟩` evaluated without reduction.
    pub identification_defect: f64,
    pub normalization_defect: f64,
    pub objective: f64,
    pub objective_imag: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.hermitian_defect <= tol
            && self.min_eigenvalue >= -tol
            && self.identification_defect <= tol
            && self.normalization_defect <= tol
    }
}

/// Feasibility of a strategy's moments, checked against direct evaluation of every entry.
pub fn check_strategy_moments(mp: &MomentProblem, s: &Strategy) -> Result<FeasibilityReport, NpaError> {
    let y = mp.moments_of(s)?;
    let m = mp.moment_matrix(&y);
    let asg = s.assignment();
    let columns: Vec<Vec<Complex64>> = mp
        .words
        .iter()
        .map(|w| apply_to_state(&NCPolynomial::monomial(mp.order, ONE, w.clone()), &asg, s.state()))
        .collect::<Result<_, _>>()?;
    let mut identification_defect: f64 = 0.0;
    for (i, ci) in columns.iter().enumerate() {
        for (j, cj) in columns.iter().enumerate() {
            identification_defect = identification_defect.max((inner(ci, cj) - m[(i, j)]).norm());
        }
    }
    let eig = hermitian_eig(&m, DEFAULT_TOL)?;
    let obj = mp.objective_value(&y);
    Ok(FeasibilityReport {
        hermitian_defect: m.hermitian_defect(),
        min_eigenvalue: eig.eigenvalues[0],
        identification_defect,
        normalization_defect: (y[0] - ONE).norm(),
        objective: obj.re,
        objective_imag: obj.im,
    })
}

/// Sparse SDPA problem: minimize `c·x` subject to `Σ_k x_k F_k − F_0 ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpaProblem {
    pub comments: Vec<String>,
    pub block_sizes: Vec<i64>,
    pub objective: Vec<f64>,
    /// `(matrix k, block, row, col, value)`, 1-indexed, `row ≤ col`, sorted.
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

/// Which real coordinate of which moment a real SDP variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealVariable {
    Re(usize),
    Im(usize),
}

/// Real variables: `Re y_k` for every non-empty moment, `Im y_k` for those not self-adjoint.
pub fn real_variables(mp: &MomentProblem) -> Vec<RealVariable> {
    let mut out = Vec::new();
    for (k, w) in mp.moments.iter().enumerate().skip(1) {
        out.push(RealVariable::Re(k));
        if w.adjoint(mp.order) != *w {
            out.push(RealVariable::Im(k));
        }
    }
    out
}

/// `(Re, Im)` contribution of real variable `v` to moment entry `r`.
fn coordinate(r: MomentRef, v: RealVariable) -> Complex64 {
    match v {
        RealVariable::Re(k) if k == r.id => ONE,
        RealVariable::Im(k) if k == r.id => Complex64::new(0.0, if r.conj { -1.0 } else { 1.0 }),
        _ => ZERO,
    }
}

/// Adds the real symmetric embedding `[[Re, −Im], [Im, Re]]` of Hermitian entry `(i, j)` (with `i ≤ j`) for value `z`.
fn push_embedded(out: &mut Vec<(usize, usize, usize, usize, f64)>, k: usize, n: usize, i: usize, j: usize, z: Complex64) {
    if z.re != 0.0 {
        out.push((k, 1, i + 1, j + 1, z.re));
        out.push((k, 1, n + i + 1, n + j + 1, z.re));
    }
    debug_assert!(i != j || z.im == 0.0, "diagonal moments are real");
    if z.im != 0.0 {
        // Lower-left block holds Im; (n+i, j) and (n+j, i) are the upper-triangle images of (i,j) and (j,i).
        out.push((k, 1, j + 1, n + i + 1, z.im));
        out.push((k, 1, i + 1, n + j + 1, -z.im));
    }
}

/// Maximize the bias objective, written as SDPA's minimization of its negative.
pub fn to_sdpa(mp: &MomentProblem) -> SdpaProblem {
    let n = mp.size();
    let vars = real_variables(mp);
    let objective = vars
        .iter()
        .map(|&v| {
            -mp.objective
                .iter()
                .map(|&(r, c)| (c * coordinate(r, v)).re)
                .sum::<f64>()
                + 0.0
        })
        .collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            let r = mp.matrix[i][j];
            if r.id == 0 {
                // F_0 carries the fixed empty-word moment with a minus sign.
                push_embedded(&mut entries, 0, n, i, j, -ONE);
            }
            for (k, &v) in vars.iter().enumerate() {
                let z = coordinate(r, v);
                if z != ZERO {
                    push_embedded(&mut entries, k + 1, n, i, j, z);
                }
            }
        }
    }
    entries.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
    SdpaProblem {
        comments: vec![
            format!(
                "NPA relaxation of the mod-{} game (m1={}, m2={}), level {}: {} words, {} moments",
                mp.params.n,
                mp.params.m1,
                mp.params.m2,
                mp.level,
                n,
                mp.moment_count()
            ),
            format!(
                "Hermitian {n}x{n} moment matrix embedded as the real symmetric {}x{} block [[Re, -Im], [Im, Re]]",
                2 * n,
                2 * n
            ),
            "F0 fixes the empty-word moment to 1; minimizing c.x maximizes the bias".into(),
        ],
        block_sizes: vec![2 * n as i64],
        objective,
        entries,
    }
}

impl SdpaProblem {
    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    /// `Σ_k x_k F_k − F_0` as a dense real matrix (single block).
    pub fn constraint_matrix(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.block_sizes.first().map(|b| b.unsigned_abs() as usize).unwrap_or(0);
        let mut m = vec![vec![0.0; d]; d];
        for &(k, _, i, j, v) in &self.entries {
            let w = if k == 0 { -v } else { x[k - 1] * v };
            m[i - 1][j - 1] += w;
            if i != j {
                m[j - 1][i - 1] += w;
            }
        }
        m
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            writeln!(s, "* {c}").unwrap();
        }
        writeln!(s, "{} = mDIM", self.objective.len()).unwrap();
        writeln!(s, "{} = nBLOCK", self.block_sizes.len()).unwrap();
        let blocks: Vec<String> = self.block_sizes.iter().map(i64::to_string).collect();
        writeln!(s, "{} = bLOCKsTRUCT", blocks.join(" ")).unwrap();
        let c: Vec<String> = self.objective.iter().map(|v| format!("{v:?}")).collect();
        writeln!(s, "{}", c.join(" ")).unwrap();
        for &(k, b, i, j, v) in &self.entries {
            writeln!(s, "{k} {b} {i} {j} {v:?}").unwrap();
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), NpaError> {
        std::fs::write(path, self.to_text()).map_err(|source| NpaError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Reads the format written by [`SdpaProblem::to_text`]; `*` and `"` start comment lines.
    pub fn parse(text: &str) -> Result<Self, NpaError> {
        let mut comments = Vec::new();
        let mut body: Vec<(usize, &str)> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let t = line.trim();
            if let Some(c) = t.strip_prefix('*').or_else(|| t.strip_prefix('"')) {
                comments.push(c.trim().to_string());
            } else if !t.is_empty() {
                body.push((k + 1, t));
            }
        }
        let err = |line: usize, message: &str| NpaError::Parse {
            line,
            message: message.into(),
        };
        // Header values may be followed by "= name" annotations; only the leading numbers count.
        let header = |idx: usize| -> Result<(usize, Vec<&str>), NpaError> {
            let &(line, t) = body.get(idx).ok_or_else(|| err(0, "unexpected end of file"))?;
            let head = t.split('=').next().unwrap_or("");
            Ok((line, head.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')').filter(|s| !s.is_empty()).collect()))
        };
        let (line, m_tok) = header(0)?;
        let m: usize = m_tok.first().and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "bad mDIM"))?;
        let (line, nb_tok) = header(1)?;
        let nblock: usize = nb_tok.first().and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "bad nBLOCK"))?;
        let (line, bs_tok) = header(2)?;
        let block_sizes = bs_tok
            .iter()
            .take(nblock)
            .map(|t| t.parse::<i64>().map_err(|_| err(line, "bad block size")))
            .collect::<Result<Vec<_>, _>>()?;
        if block_sizes.len() != nblock {
            return Err(err(line, "too few block sizes"));
        }
        // With no variables the objective line is blank and was skipped above.
        let (objective, first_entry) = if m == 0 {
            (Vec::new(), 3)
        } else {
            let (line, c_tok) = header(3)?;
            let objective = c_tok
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| err(line, "bad objective coefficient")))
                .collect::<Result<Vec<_>, _>>()?;
            if objective.len() != m {
                return Err(err(line, "objective length differs from mDIM"));
            }
            (objective, 4)
        };
        let mut entries = Vec::new();
        for &(line, t) in &body[first_entry..] {
            let f: Vec<&str> = t.split_whitespace().collect();
            if f.len() != 5 {
                return Err(err(line, "expected 5 fields"));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(line, "bad index"));
            let (k, b, i, j) = (int(f[0])?, int(f[1])?, int(f[2])?, int(f[3])?);
            let v: f64 = f[4].parse().map_err(|_| err(line, "bad value"))?;
            if k > m || b == 0 || b > nblock || i == 0 || j == 0 {
                return Err(err(line, "index out of range"));
            }
            let size = block_sizes[b - 1].unsigned_abs() as usize;
            if i > size || j > size {
                return Err(err(line, "index exceeds block size"));
            }
            entries.push((k, b, i, j, v));
        }
        Ok(Self {
            comments,
            block_sizes,
            objective,
            entries,
        })
    }
}

/// Real SDP variables for a complex moment vector, in the order of [`real_variables`].
pub fn real_point(mp: &MomentProblem, y: &[Complex64]) -> Vec<f64> {
    real_variables(mp)
        .into_iter()
        .map(|v| match v {
            RealVariable::Re(k) => y[k].re,
            RealVariable::Im(k) => y[k].im,
        })
        .collect()
}

/// Real symmetric embedding `[[Re M, −Im M], [Im M, Re M]]`.
pub fn embed_hermitian(m: &ComplexMatrix) -> Vec<Vec<f64>> {
    let n = m.rows();
    let mut out = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[i][j] = z.re;
            out[n + i][n + j] = z.re;
            out[n + i][j] = z.im;
            out[i][n + j] = -z.im;
        }
    }
    out
}

/// Reduces a raw letter sequence by applying rewrite rules at randomly chosen positions:
/// drop `x^0`, move a Bob letter right of an adjacent Alice letter, merge equal neighbours.
///
/// Returns the letters as left by the rules, without going through [`Word`]'s canonicalization.
pub fn reduce_randomly(mut letters: Vec<Letter>, n: u32, rng: &mut SeededRng) -> Vec<Letter> {
    loop {
        let mut moves = Vec::new();
        for (p, l) in letters.iter().enumerate() {
            if l.exp % n == 0 {
                moves.push((0u8, p));
            }
        }
        for p in 0..letters.len().saturating_sub(1) {
            let (l, r) = (letters[p], letters[p + 1]);
            if l.party == Party::B && r.party == Party::A {
                moves.push((1, p));
            }
            if l.party == r.party && l.index == r.index {
                moves.push((2, p));
            }
        }
        if moves.is_empty() {
            break;
        }
        let (rule, p) = moves[rng.below(moves.len() as u64) as usize];
        match rule {
            0 => {
                letters.remove(p);
            }
            1 => letters.swap(p, p + 1),
            _ => {
                letters[p].exp = (letters[p].exp + letters[p + 1].exp) % n;
                letters.remove(p + 1);
            }
        }
    }
    for l in &mut letters {
        l.exp %= n;
    }
    letters
}

/// Draws `count` random raw words (length up to `max_len`, exponents in `0..2n`) and
/// returns how many reduce differently under random rule order and the canonical reducer.
pub fn confluence_failures(n: u32, count: usize, max_len: usize, seed: u64) -> usize {
    let mut rng = SeededRng::new(seed);
    let mut failures = 0;
    for _ in 0..count {
        let len = rng.below(max_len as u64 + 1) as usize;
        let raw: Vec<Letter> = (0..len)
            .map(|_| Letter {
                party: if rng.below(2) == 0 { Party::A } else { Party::B },
                index: rng.below(2) as u8,
                exp: rng.below(2 * n as u64) as u32,
            })
            .collect();
        let canonical = Word::from_letters(raw.iter().copied(), n);
        if reduce_randomly(raw, n, &mut rng) != canonical.letters() {
            failures += 1;
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_counts() {
        assert_eq!(generate_words(2, 1).unwrap().len(), 5);
        assert_eq!(generate_words(3, 1).unwrap().len(), 9);
        assert_eq!(generate_words(2, 2).unwrap().len(), 13);
        assert!(generate_words(2, 3).is_err());
    }

    #[test]
    fn inverse_pair_reduces_to_identity() {
        let n = 5;
        let w = Word::from_letters(
            [
                Letter { party: Party::A, index: 0, exp: 1 },
                Letter { party: Party::A, index: 0, exp: n - 1 },
            ],
            n,
        );
        assert!(w.is_empty());
    }

    #[test]
    fn chsh_objective_touches_four_moments() {
        let mp = build_moment_problem(ModNGameParams::chsh(2).unwrap(), 1).unwrap();
        assert_eq!(mp.size(), 5);
        let ids: BTreeSet<usize> = mp.objective.iter().map(|(r, _)| r.id).collect();
        assert_eq!(ids.len(), 4);
    }

    #[test]
    fn embedding_matches_constraint_matrix() {
        let p = ModNGameParams::chsh(3).unwrap();
        let mp = build_moment_problem(p, 1).unwrap();
        let s = crate::strategy::canonical_strategy(3).unwrap();
        let y = mp.moments_of(&s).unwrap();
        let sdpa = to_sdpa(&mp);
        let lhs = sdpa.constraint_matrix(&real_point(&mp, &y));
        let rhs = embed_hermitian(&mp.moment_matrix(&y));
        for (a, b) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
        let cx: f64 = sdpa.objective.iter().zip(real_point(&mp, &y)).map(|(c, x)| c * x).sum();
        assert!((cx + 6.0).abs() < 1e-9);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(SdpaProblem::parse("* only a comment\n").is_err());
        assert!(SdpaProblem::parse("1\n1\n2\n0.5\n0 1 3 1 1.0\n").is_err());
    }
}
