//! Sparse arithmetic in graded-commutative algebras over `F_p`.
//!
//! One engine serves every algebra in the crate: the cohomology ring
//! `E(x) ⊗ P(y)`, the truncated Milnor dual, the coefficient rings of the
//! power map, and their tensor products, which are simply concatenated
//! generator tables.

mod binomial;
mod element;
mod linalg;
mod monomial;
mod parse;
mod table;

pub use binomial::{binomial_mod_p, multinomial_mod_p};
pub use element::Element;
pub use linalg::{solve_many, solve_mod_p, Solution};
pub use monomial::{normalize_word, Monomial};
pub use parse::parse_element;
pub use table::{Generator, GeneratorTable, Parity, MAX_GENERATORS};
