//! Graph products of finite-dimensional operator algebras at desk scale:
//! right-angled Coxeter word calculus, truncated Fock representations,
//! word-length multipliers, radial semigroups, operator-space factorizations
//! and Hecke-algebra vertex data — everything exact or verified against
//! brute-force oracles.

pub mod coxeter;
pub mod fock;
pub mod hecke;
pub mod khintchine;
pub mod linalg;
pub mod multipliers;
pub mod report;
pub mod valg;
