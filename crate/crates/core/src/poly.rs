//! Noncommutative polynomials in the four letters `A0, A1, B0, B1`.
//!
//! Every letter is an order-`n` generalized observable, so exponents live in
//! `Z_n` and `X^{-k}` is stored as `X^{n-k}`. Alice's letters commute with
//! Bob's; a canonical word lists all Alice letters (in their original order)
//! before all Bob letters, merges adjacent powers of the same letter and drops
//! zero exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{apply_local, ComplexMatrix, ONE, ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("no operator assigned to {party}{index}")]
    MissingLetter { party: Party, index: u8 },
    #[error("order mismatch: polynomial over Z_{left}, operand over Z_{right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub party: Party,
    pub index: u8,
    /// Exponent reduced to `1..n` in canonical words.
    pub exp: u32,
}

/// Canonical word; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Canonicalizes an arbitrary letter sequence over `Z_n`.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>, n: u32) -> Self {
        let (mut alice, mut bob): (Vec<Letter>, Vec<Letter>) =
            letters.into_iter().partition(|l| l.party == Party::A);
        reduce_in_place(&mut alice, n);
        reduce_in_place(&mut bob, n);
        alice.extend(bob);
        Word(alice)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn alice(&self) -> &[Letter] {
        let k = self.0.iter().take_while(|l| l.party == Party::A).count();
        &self.0[..k]
    }

    pub fn bob(&self) -> &[Letter] {
        let k = self.0.iter().take_while(|l| l.party == Party::A).count();
        &self.0[k..]
    }

    pub fn concat(&self, other: &Word, n: u32) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied(), n)
    }

    /// `w*`: reverse the letters and invert each one.
    pub fn adjoint(&self, n: u32) -> Word {
        Word::from_letters(
            self.0.iter().rev().map(|l| Letter {
                exp: (n - l.exp % n) % n,
                ..*l
            }),
            n,
        )
    }

    /// Parses the `Display` form, e.g. `"A0^2 B1"`, or `"I"` for the identity.
    pub fn parse(s: &str, n: u32) -> Result<Word, PolyError> {
        let s = s.trim();
        if s.is_empty() || s == "I" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let err = || PolyError::Parse(tok.to_string());
            let mut chars = tok.chars();
            let party = match chars.next() {
                Some('A') => Party::A,
                Some('B') => Party::B,
                _ => return Err(err()),
            };
            let rest: String = chars.collect();
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, e.parse::<i64>().map_err(|_| err())?),
                None => (rest.as_str(), 1),
            };
            let index: u8 = idx.parse().map_err(|_| err())?;
            letters.push(Letter {
                party,
                index,
                exp: exp.rem_euclid(n as i64) as u32,
            });
        }
        Ok(Word::from_letters(letters, n))
    }
}

fn reduce_in_place(letters: &mut Vec<Letter>, n: u32) {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for l in letters.drain(..) {
        let exp = l.exp % n;
        if exp == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.party == l.party && last.index == l.index => {
                last.exp = (last.exp + exp) % n;
                if last.exp == 0 {
                    out.pop();
                }
            }
            _ => out.push(Letter { exp, ..l }),
        }
    }
    *letters = out;
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if l.exp == 1 {
                write!(f, "{}{}", l.party, l.index)?;
            } else {
                write!(f, "{}{}^{}", l.party, l.index, l.exp)?;
            }
        }
        Ok(())
    }
}

/// Complex linear combination of canonical words over `Z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NCPolynomial {
    order: u32,
    terms: BTreeMap<Word, Complex64>,
}

impl NCPolynomial {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 2, "order must be at least 2");
        Self {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(order: u32, c: Complex64) -> Self {
        let mut p = Self::zero(order);
        p.add_term(c, Word::identity());
        p
    }

    pub fn identity(order: u32) -> Self {
        Self::constant(order, ONE)
    }

    pub fn monomial(order: u32, c: Complex64, word: Word) -> Self {
        let mut p = Self::zero(order);
        p.add_term(c, word);
        p
    }

    /// A single letter raised to a signed power.
    pub fn letter(order: u32, party: Party, index: u8, exp: i64) -> Self {
        let w = Word::from_letters(
            [Letter {
                party,
                index,
                exp: exp.rem_euclid(order as i64) as u32,
            }],
            order,
        );
        Self::monomial(order, ONE, w)
    }

    pub fn a(order: u32, index: u8, exp: i64) -> Self {
        Self::letter(order, Party::A, index, exp)
    }

    pub fn b(order: u32, index: u8, exp: i64) -> Self {
        Self::letter(order, Party::B, index, exp)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> Complex64 {
        self.terms.get(w).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: Complex64, word: Word) {
        let entry = self.terms.entry(word.clone()).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&word);
        }
    }

    /// Drops terms whose coefficient magnitude is at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        Self {
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(
            self.order, other.order,
            "cannot combine polynomials over Z_{} and Z_{}",
            self.order, other.order
        );
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.order);
        for (w, c) in &self.terms {
            out.add_term(c * s, w.clone());
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (w, c) in &self.terms {
            out.add_term(c.conj(), w.adjoint(self.order));
        }
        out
    }

    /// `p* p`.
    pub fn hermitian_square(&self) -> Self {
        &self.adjoint() * self
    }

    /// Largest coefficient magnitude of `self − other`.
    pub fn max_coefficient_distance(&self, other: &Self) -> f64 {
        (self - other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_wire(&self) -> PolynomialWire {
        PolynomialWire {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermWire {
                    coeff: [c.re, c.im],
                    word: w.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: &PolynomialWire) -> Result<Self, PolyError> {
        if wire.order < 2 {
            return Err(PolyError::Parse(format!("order {}", wire.order)));
        }
        let mut p = Self::zero(wire.order);
        for t in &wire.terms {
            p.add_term(Complex64::new(t.coeff[0], t.coeff[1]), Word::parse(&t.word, wire.order)?);
        }
        Ok(p)
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)·{}", c.re, c.im, w)?;
        }
        Ok(())
    }
}

impl std::ops::Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.check_order(rhs);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*c, w.clone());
        }
        out
    }
}

impl std::ops::Add for NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: NCPolynomial) -> NCPolynomial {
        &self + &rhs
    }
}

impl std::ops::Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.check_order(rhs);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(-*c, w.clone());
        }
        out
    }
}

impl std::ops::Sub for NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: NCPolynomial) -> NCPolynomial {
        &self - &rhs
    }
}

impl std::ops::Mul for &NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        self.check_order(rhs);
        let mut out = NCPolynomial::zero(self.order);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(c1 * c2, w1.concat(w2, self.order));
            }
        }
        out
    }
}

impl std::ops::Mul for NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: NCPolynomial) -> NCPolynomial {
        &self * &rhs
    }
}

impl std::ops::Mul<Complex64> for NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: Complex64) -> NCPolynomial {
        self.scale(rhs)
    }
}

impl std::ops::Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale_real(-1.0)
    }
}

/// JSON form: `{"order": n, "terms": [{"coeff": [re, im], "word": "A0^2 B1"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialWire {
    pub order: u32,
    pub terms: Vec<TermWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermWire {
    pub coeff: [f64; 2],
    pub word: String,
}

impl Serialize for NCPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_wire().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NCPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = PolynomialWire::deserialize(deserializer)?;
        NCPolynomial::from_wire(&wire).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Party {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        match s {
            "A" => Ok(Party::A),
            "B" => Ok(Party::B),
            _ => Err(PolyError::Parse(s.to_string())),
        }
    }
}

/// Concrete operators for the letters, with all powers precomputed.
///
/// Alice's letters act on the first tensor factor and Bob's on the second,
/// so cross-party commutation holds by construction.
#[derive(Debug, Clone)]
pub struct Assignment {
    order: u32,
    dim_a: usize,
    dim_b: usize,
    // powers[party][index][k] = M^k for k in 0..n
    alice_powers: Vec<Vec<ComplexMatrix>>,
    bob_powers: Vec<Vec<ComplexMatrix>>,
}

impl Assignment {
    pub fn new(order: u32, alice: &[ComplexMatrix], bob: &[ComplexMatrix]) -> Result<Self, PolyError> {
        let dim_of = |ms: &[ComplexMatrix], who: &str| -> Result<usize, PolyError> {
            let d = ms.first().map_or(1, |m| m.rows());
            if ms.iter().any(|m| m.rows() != d || m.cols() != d) {
                return Err(PolyError::Dimension(format!("{who} observables differ in shape")));
            }
            Ok(d)
        };
        let dim_a = dim_of(alice, "Alice")?;
        let dim_b = dim_of(bob, "Bob")?;
        Ok(Self {
            order,
            dim_a,
            dim_b,
            alice_powers: alice.iter().map(|m| powers(m, order)).collect(),
            bob_powers: bob.iter().map(|m| powers(m, order)).collect(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    fn power(&self, l: &Letter) -> Result<&ComplexMatrix, PolyError> {
        let table = match l.party {
            Party::A => &self.alice_powers,
            Party::B => &self.bob_powers,
        };
        table
            .get(l.index as usize)
            .map(|p| &p[(l.exp % self.order) as usize])
            .ok_or(PolyError::MissingLetter {
                party: l.party,
                index: l.index,
            })
    }

    fn local_product(&self, letters: &[Letter], dim: usize) -> Result<Option<ComplexMatrix>, PolyError> {
        let mut acc: Option<ComplexMatrix> = None;
        for l in letters {
            let m = self.power(l)?;
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => &a * m,
            });
        }
        if let Some(a) = &acc {
            debug_assert_eq!(a.rows(), dim);
        }
        Ok(acc)
    }

    /// Alice and Bob factors of a word; `None` stands for the identity.
    pub fn word_factors(&self, w: &Word) -> Result<(Option<ComplexMatrix>, Option<ComplexMatrix>), PolyError> {
        Ok((
            self.local_product(w.alice(), self.dim_a)?,
            self.local_product(w.bob(), self.dim_b)?,
        ))
    }

    /// Alice-only matrix of a word with no Bob letters.
    pub fn alice_matrix(&self, w: &Word) -> Result<ComplexMatrix, PolyError> {
        Ok(self
            .local_product(w.alice(), self.dim_a)?
            .unwrap_or_else(|| ComplexMatrix::identity(self.dim_a)))
    }

    pub fn bob_matrix(&self, w: &Word) -> Result<ComplexMatrix, PolyError> {
        Ok(self
            .local_product(w.bob(), self.dim_b)?
            .unwrap_or_else(|| ComplexMatrix::identity(self.dim_b)))
    }
}

fn powers(m: &ComplexMatrix, order: u32) -> Vec<ComplexMatrix> {
    // Exponents above n/2 are taken as adjoint powers, which is exact for
    // unitaries of order n and numerically the better-conditioned route.
    let adj = m.adjoint();
    (0..order)
        .map(|k| {
            if 2 * k <= order {
                m.pow(k as u64)
            } else {
                adj.pow((order - k) as u64)
            }
        })
        .collect()
}

/// Matrix of `p` on `C^{dimA} ⊗ C^{dimB}`.
pub fn eval_nc(p: &NCPolynomial, assignment: &Assignment) -> Result<ComplexMatrix, PolyError> {
    if p.order() != assignment.order {
        return Err(PolyError::OrderMismatch {
            left: p.order(),
            right: assignment.order,
        });
    }
    let (da, db) = assignment.dims();
    let mut out = ComplexMatrix::zeros(da * db, da * db);
    for (w, c) in p.terms() {
        let a = assignment.alice_matrix(w)?;
        let b = assignment.bob_matrix(w)?;
        out += &a.kron(&b).scale(*c);
    }
    Ok(out)
}

/// `p(A, B)|ψ⟩`, computed factor-wise without forming Kronecker products.
pub fn apply_to_state(
    p: &NCPolynomial,
    assignment: &Assignment,
    state: &[Complex64],
) -> Result<Vec<Complex64>, PolyError> {
    if p.order() != assignment.order {
        return Err(PolyError::OrderMismatch {
            left: p.order(),
            right: assignment.order,
        });
    }
    let (da, db) = assignment.dims();
    if state.len() != da * db {
        return Err(PolyError::Dimension(format!(
            "state length {} does not match {da}x{db}",
            state.len()
        )));
    }
    let mut out = vec![ZERO; state.len()];
    for (w, c) in p.terms() {
        let (a, b) = assignment.word_factors(w)?;
        let v = apply_local(a.as_ref(), b.as_ref(), state, da, db);
        crate::numerics::add_scaled(&mut out, *c, &v);
    }
    Ok(out)
}
