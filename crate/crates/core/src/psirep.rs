//! Maps from the abstract group `G_n` into a strategy's unitaries, defined on
//! normal forms, and the state-dependent multiplicativity test.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::group::{
    enumerate_group, evaluate_word, normal_form_enumerate, GroupError, GroupWord, MonomialUnitary,
    MultiplicationTable, NormalForm, DEFAULT_CAP,
};
use crate::numerics::{root_of_unity, ComplexMatrix};
use crate::strategy::{canonical_strategy, check_psi_representation, Side, Strategy, StrategyError};

#[derive(Debug, thiserror::Error)]
pub enum PsiRepError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("catalogue element {0} has no normal form")]
    MissingNormalForm(usize),
}

/// Rewrites every exponent to its representative in `(−n/2, n/2]`.
///
/// For `n = 3` this turns `(P0² P1^{−2})` into `(P0^{−1} P1)`.
pub fn signed_minimal_word(word: &GroupWord, n: u32) -> GroupWord {
    let n = n as i64;
    word.iter()
        .map(|&(g, e)| {
            let r = e.rem_euclid(n);
            (g, if 2 * r > n { r - n } else { r })
        })
        .filter(|&(_, e)| e != 0)
        .collect()
}

/// The group `G_n` realized as `⟨A0, A1⟩`, each element tagged with its normal form.
#[derive(Debug, Clone)]
pub struct NormalFormGroup {
    pub n: u32,
    pub elements: Vec<MonomialUnitary>,
    pub normal_forms: Vec<NormalForm>,
    pub table: MultiplicationTable,
}

pub fn normal_form_group(n: u32) -> Result<NormalFormGroup, PsiRepError> {
    let gens = MonomialUnitary::alice_generators(n);
    let catalogue = enumerate_group(&gens, DEFAULT_CAP)?;
    let lookup: HashMap<MonomialUnitary, NormalForm> = normal_form_enumerate(n)?.into_iter().map(|(nf, g)| (g, nf)).collect();
    let normal_forms = catalogue
        .elements()
        .iter()
        .enumerate()
        .map(|(k, g)| lookup.get(g).cloned().ok_or(PsiRepError::MissingNormalForm(k)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NormalFormGroup {
        n,
        elements: catalogue.elements().to_vec(),
        normal_forms,
        table: catalogue.multiplication_table()?,
    })
}

/// Generator images `(P0, P1, J)` induced by a strategy.
///
/// Alice: `P0 ↦ A0`, `P1 ↦ A1`. Bob: `P0 ↦ B0*`, `P1 ↦ B1`, so that
/// `P0 P1^{−1} ↦ B0* B1*` and `P0^{−1} P1 ↦ B0 B1`. In both cases `J ↦ ω_n I`.
pub fn generator_images(s: &Strategy, side: Side) -> [ComplexMatrix; 3] {
    let n = s.order();
    match side {
        Side::Alice => {
            let d = s.dim_a();
            [s.alice()[0].clone(), s.alice()[1].clone(), ComplexMatrix::identity(d).scale(root_of_unity(n as u64, 1))]
        }
        Side::Bob => {
            let d = s.dim_b();
            [s.bob()[0].adjoint(), s.bob()[1].clone(), ComplexMatrix::identity(d).scale(root_of_unity(n as u64, 1))]
        }
    }
}

/// `f(g)` for every element, evaluated on the signed-minimal normal-form word.
pub fn induced_images(group: &NormalFormGroup, s: &Strategy, side: Side) -> Vec<ComplexMatrix> {
    let gens = generator_images(s, side);
    group
        .normal_forms
        .iter()
        .map(|nf| evaluate_word(&signed_minimal_word(&nf.word(), group.n), &gens))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiRepReport {
    pub n: u32,
    pub side: Side,
    pub elements: usize,
    pub pairs: usize,
    pub max_residual: f64,
}

/// Builds `f_A` or `f_B` from the canonical strategy and measures the ψ-representation defect.
pub fn check_induced(n: u32, side: Side) -> Result<PsiRepReport, PsiRepError> {
    let s = canonical_strategy(n)?;
    let group = normal_form_group(n)?;
    let images = induced_images(&group, &s, side);
    let max_residual = check_psi_representation(&group.table, &images, s.state(), s.dim_a(), s.dim_b(), side)?;
    Ok(PsiRepReport {
        n,
        side,
        elements: group.elements.len(),
        pairs: group.elements.len() * group.elements.len(),
        max_residual,
    })
}

/// Checks, exactly in `H_n`, that each normal-form word and its signed-minimal
/// rewrite name the same element. Returns the words that disagree.
pub fn normal_form_rewrites_agree(n: u32) -> Result<Vec<String>, GroupError> {
    let [a0, a1] = MonomialUnitary::alice_generators(n);
    let gens = [a0, a1, MonomialUnitary::j(n)];
    Ok(normal_form_enumerate(n)?
        .into_iter()
        .filter(|(nf, g)| evaluate_word(&signed_minimal_word(&nf.word(), n), &gens) != *g)
        .map(|(nf, _)| nf.to_string())
        .collect())
}
