use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupError, GroupLike, MonomialUnitary};

/// Word in numbered generators: `(generator, signed exponent)` factors, left to right.
pub type GroupWord = Vec<(usize, i64)>;

/// Generators plus named relators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<(String, GroupWord)>,
}

impl Presentation {
    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, e)| {
                if e == 1 {
                    self.generators[g].clone()
                } else {
                    format!("{}^{}", self.generators[g], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// True when every relator word only names declared generators.
    pub fn is_well_formed(&self) -> bool {
        self.relators
            .iter()
            .all(|(_, w)| w.iter().all(|&(g, _)| g < self.generators.len()))
    }
}

/// Product of generator images along `word`; negative exponents use inverses.
pub fn evaluate_word<T: GroupLike>(word: &GroupWord, images: &[T]) -> T {
    let mut acc = images[0].group_identity();
    for &(g, e) in word {
        let base = if e < 0 {
            images[g].group_inverse()
        } else {
            images[g].clone()
        };
        for _ in 0..e.unsigned_abs() {
            acc = acc.group_mul(&base);
        }
    }
    acc
}

const P0: usize = 0;
const P1: usize = 1;
const J: usize = 2;

fn presentation(n: u32, names: [&str; 3], square_factor: impl Fn(i64) -> GroupWord) -> Presentation {
    let n = n as i64;
    let mut relators = vec![
        (format!("{}^{n}", names[0]), vec![(P0, n)]),
        (format!("{}^{n}", names[1]), vec![(P1, n)]),
        (format!("J^{n}"), vec![(J, n)]),
        (format!("[J,{}]", names[0]), vec![(J, 1), (P0, 1), (J, -1), (P0, -1)]),
        (format!("[J,{}]", names[1]), vec![(J, 1), (P1, 1), (J, -1), (P1, -1)]),
    ];
    for i in 1..=n / 2 {
        let f = square_factor(i);
        let mut w = vec![(J, i)];
        w.extend(f.iter().copied());
        w.extend(f.iter().copied());
        let pres = Presentation {
            generators: names.iter().map(|s| s.to_string()).collect(),
            relators: Vec::new(),
        };
        relators.push((
            format!("J^{i}({})^2", pres.format_word(&f)),
            w,
        ));
    }
    Presentation {
        generators: names.iter().map(|s| s.to_string()).collect(),
        relators,
    }
}

/// `⟨P0, P1, J | P0^n, P1^n, J^n, [J,P0], [J,P1], J^i (P0^i P1^{−i})² for 1 ≤ i ≤ ⌊n/2⌋⟩`.
pub fn alice_presentation(n: u32) -> Presentation {
    presentation(n, ["P0", "P1", "J"], |i| vec![(P0, i), (P1, -i)])
}

/// Bob's version: the square factor is `Q0^{−i} Q1^{−i}`.
pub fn bob_presentation(n: u32) -> Presentation {
    presentation(n, ["Q0", "Q1", "J"], |i| vec![(P0, -i), (P1, -i)])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationReport {
    pub n: u32,
    pub relators_checked: usize,
    /// Names of relators that did not evaluate to the identity (exact check).
    pub failures: Vec<String>,
    /// Largest `‖M − I‖_F` of the same relators evaluated as floating-point matrices.
    pub max_matrix_defect: f64,
}

impl PresentationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check(pres: &Presentation, images: &[MonomialUnitary], n: u32) -> PresentationReport {
    let mats: Vec<_> = images.iter().map(MonomialUnitary::to_matrix).collect();
    let mut failures = Vec::new();
    let mut max_matrix_defect: f64 = 0.0;
    for (name, w) in &pres.relators {
        if !evaluate_word(w, images).is_identity() {
            failures.push(name.clone());
        }
        let m = evaluate_word(w, &mats);
        max_matrix_defect = max_matrix_defect.max(m.distance(&crate::numerics::ComplexMatrix::identity(n as usize)));
    }
    PresentationReport {
        n,
        relators_checked: pres.relators.len(),
        failures,
        max_matrix_defect,
    }
}

/// Evaluates Alice's relators on `(A0, A1, z⁴I)` and Bob's on `(B0, B1, z⁴I)`, exactly.
pub fn verify_presentation(n: u32) -> Result<(PresentationReport, PresentationReport), GroupError> {
    if n < 2 {
        return Err(GroupError::Order(n));
    }
    let [a0, a1] = MonomialUnitary::alice_generators(n);
    let [b0, b1] = MonomialUnitary::bob_generators(n);
    let j = MonomialUnitary::j(n);
    Ok((
        check(&alice_presentation(n), &[a0, a1, j.clone()], n),
        check(&bob_presentation(n), &[b0, b1, j], n),
    ))
}

/// `J^j P0^p Π_{k=1}^{n−1} (P0^k P1^{−k})^{q_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub j: u32,
    pub p0: u32,
    /// `q[k-1]` is the exponent `q_k ∈ {0, 1}`.
    pub q: Vec<bool>,
}

impl NormalForm {
    pub fn word(&self) -> GroupWord {
        let mut w = Vec::new();
        if self.j > 0 {
            w.push((J, self.j as i64));
        }
        if self.p0 > 0 {
            w.push((P0, self.p0 as i64));
        }
        for (k, &on) in self.q.iter().enumerate() {
            if on {
                let k = k as i64 + 1;
                w.push((P0, k));
                w.push((P1, -k));
            }
        }
        w
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J^{} P0^{}", self.j, self.p0)?;
        for (k, &on) in self.q.iter().enumerate() {
            if on {
                write!(f, " (P0^{} P1^-{})", k + 1, k + 1)?;
            }
        }
        Ok(())
    }
}

/// All `n·n·2^{n−1}` normal-form words, evaluated with `J ↦ z⁴I`, `P0 ↦ A0`, `P1 ↦ A1`.
///
/// Fails with the first pair of words that evaluate to the same element.
pub fn normal_form_enumerate(n: u32) -> Result<Vec<(NormalForm, MonomialUnitary)>, GroupError> {
    if n < 2 {
        return Err(GroupError::Order(n));
    }
    let [a0, a1] = MonomialUnitary::alice_generators(n);
    let images = [a0, a1, MonomialUnitary::j(n)];
    let mut seen: HashMap<MonomialUnitary, NormalForm> = HashMap::new();
    let mut out = Vec::new();
    for j in 0..n {
        for p0 in 0..n {
            for mask in 0u64..(1u64 << (n - 1)) {
                let q = (0..n - 1).map(|k| mask >> k & 1 == 1).collect();
                let nf = NormalForm { j, p0, q };
                let g = evaluate_word(&nf.word(), &images);
                if let Some(prev) = seen.get(&g) {
                    return Err(GroupError::Collision {
                        first: prev.to_string(),
                        second: nf.to_string(),
                    });
                }
                seen.insert(g.clone(), nf.clone());
                out.push((nf, g));
            }
        }
    }
    Ok(out)
}

/// Pairs `(i, j)` for which `X^i D_j ≠ D_{j+i} X^i`, with `reflections[j]` standing in for `D_j`.
pub fn commutation_failures(n: u32, reflections: &[MonomialUnitary]) -> Vec<(u32, u32)> {
    let x = MonomialUnitary::shift_x(n);
    let mut out = Vec::new();
    for i in 0..n {
        let xi = x.pow(i as i64);
        for j in 0..n {
            let lhs = xi.mul(&reflections[j as usize]);
            let rhs = reflections[((i + j) % n) as usize].mul(&xi);
            if lhs != rhs {
                out.push((i, j));
            }
        }
    }
    out
}

/// Exact check of `X^i D_j = D_{σ^i(j)} X^i` for all `i, j`.
pub fn commutation_check(n: u32) -> bool {
    let refl: Vec<_> = (0..n).map(|j| MonomialUnitary::reflection(n, j)).collect();
    commutation_failures(n, &refl).is_empty()
}
