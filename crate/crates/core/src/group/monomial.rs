use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{root_of_unity, ComplexMatrix, ZERO};

use super::GroupLike;

/// Exact monomial unitary on `C^n` whose nonzero entries are powers of `z = e^{iπ/2n}`.
///
/// Acts as `g·e_k = z^{phases[k]} e_{(k + shift) mod n}`. Phases are stored
/// reduced to `[0, 4n)`, so `(shift, phases)` is a canonical key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialUnitary {
    n: u32,
    shift: u32,
    phases: Vec<u32>,
}

impl MonomialUnitary {
    pub fn new(n: u32, shift: i64, phases: Vec<i64>) -> Self {
        assert!(n >= 1, "dimension must be positive");
        assert_eq!(phases.len(), n as usize, "one phase per basis vector");
        let m = 4 * n as i64;
        Self {
            n,
            shift: shift.rem_euclid(n as i64) as u32,
            phases: phases.into_iter().map(|p| p.rem_euclid(m) as u32).collect(),
        }
    }

    pub fn identity(n: u32) -> Self {
        Self::new(n, 0, vec![0; n as usize])
    }

    /// `z^p I`.
    pub fn scalar(n: u32, p: i64) -> Self {
        Self::new(n, 0, vec![p; n as usize])
    }

    /// Cyclic shift `X e_i = e_{i+1}`.
    pub fn shift_x(n: u32) -> Self {
        Self::new(n, 1, vec![0; n as usize])
    }

    /// `D_j`: negate the `j`-th basis vector (`−1 = z^{2n}`).
    pub fn reflection(n: u32, j: u32) -> Self {
        let mut phases = vec![0; n as usize];
        phases[j as usize] = 2 * n as i64;
        Self::new(n, 0, phases)
    }

    /// Alice's generators `A0 = X`, `A1 = z²D₀X`.
    pub fn alice_generators(n: u32) -> [Self; 2] {
        let x = Self::shift_x(n);
        let a1 = Self::scalar(n, 2).mul(&Self::reflection(n, 0)).mul(&x);
        [x, a1]
    }

    /// Bob's generators `B0 = X`, `B1 = z²D₀X*`.
    pub fn bob_generators(n: u32) -> [Self; 2] {
        let x = Self::shift_x(n);
        let b1 = Self::scalar(n, 2).mul(&Self::reflection(n, 0)).mul(&x.inverse());
        [x, b1]
    }

    /// Central element `J ↦ z⁴I = ω_n I`.
    pub fn j(n: u32) -> Self {
        Self::scalar(n, 4)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.phases.iter().all(|&p| p == 0)
    }

    pub fn mul(&self, h: &Self) -> Self {
        assert_eq!(self.n, h.n, "dimension mismatch");
        let n = self.n as usize;
        let m = 4 * self.n;
        let sh = h.shift as usize;
        let phases = (0..n)
            .map(|k| (h.phases[k] + self.phases[(k + sh) % n]) % m)
            .collect();
        Self {
            n: self.n,
            shift: (self.shift + h.shift) % self.n,
            phases,
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n as usize;
        let m = 4 * self.n;
        let s = self.shift as usize;
        let phases = (0..n).map(|k| (m - self.phases[(k + n - s) % n]) % m).collect();
        Self {
            n: self.n,
            shift: (self.n - self.shift) % self.n,
            phases,
        }
    }

    /// Signed integer power.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Multiplicative order (smallest `k ≥ 1` with `g^k = I`).
    pub fn element_order(&self) -> u64 {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.n as usize;
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            m[((k + self.shift as usize) % n, k)] = root_of_unity(4 * self.n as u64, self.phases[k] as i64);
        }
        debug_assert!(m.as_slice().iter().filter(|z| **z != ZERO).count() == n);
        m
    }
}

impl fmt::Display for MonomialUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shift={} phases={:?}", self.shift, self.phases)
    }
}

impl GroupLike for MonomialUnitary {
    fn group_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn group_inverse(&self) -> Self {
        self.inverse()
    }
    fn group_identity(&self) -> Self {
        Self::identity(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_match_dense_construction() {
        for n in 2..=6u32 {
            let s = crate::strategy::canonical_strategy(n).unwrap();
            let [a0, a1] = MonomialUnitary::alice_generators(n);
            let [b0, b1] = MonomialUnitary::bob_generators(n);
            assert!(a0.to_matrix().distance(&s.alice()[0]) < 1e-14);
            assert!(a1.to_matrix().distance(&s.alice()[1]) < 1e-14);
            assert!(b0.to_matrix().distance(&s.bob()[0]) < 1e-14);
            assert!(b1.to_matrix().distance(&s.bob()[1]) < 1e-14);
        }
    }

    #[test]
    fn inverse_and_orders() {
        let n = 5;
        let [a0, a1] = MonomialUnitary::alice_generators(n);
        assert!(a1.mul(&a1.inverse()).is_identity());
        assert!(a1.inverse().mul(&a1).is_identity());
        assert_eq!(a0.element_order(), 5);
        assert!(a1.pow(n as i64).is_identity());
        assert_eq!(a1.pow(-2), a1.inverse().mul(&a1.inverse()));
    }

    #[test]
    fn phases_reduced_to_canonical_range() {
        let g = MonomialUnitary::new(2, -1, vec![-1, 9]);
        assert_eq!(g.shift(), 1);
        assert_eq!(g.phases(), &[7, 1]);
    }
}
