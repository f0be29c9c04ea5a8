//! Generalized CHSH games over Z_n: game models, canonical strategies,
//! bias operators, exact group enumeration, sum-of-squares certificates,
//! binary constraint systems and NPA moment problems.

pub mod bcs;
pub mod bias;
pub mod checks;
pub mod game;
pub mod group;
pub mod npa;
pub mod numerics;
pub mod poly;
pub mod psirep;
pub mod sos;
pub mod strategy;
