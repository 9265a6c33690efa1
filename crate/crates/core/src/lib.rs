//! Exact computations in the mod-`p` cohomology of elementary abelian
//! `p`-groups: Dickson and Mùi invariants of `SL_n`, the Milnor-basis
//! Steenrod operations `St^{S,R}`, Mùi's power map `d_m^* P_m`, and exhaustive
//! checkers for the closed-form action formulas on the invariants.

pub mod algebra;
pub mod calibration;
pub mod error;
pub mod field;
pub mod invariants;
pub mod milnor;
pub mod power_map;
pub mod steenrod;
pub mod theorems;
pub mod verdict;

pub use algebra::{Element, GeneratorTable, Monomial};
pub use error::{Error, Result};
pub use field::FieldConfig;
pub use invariants::{BracketSpec, Invariants};
pub use milnor::MilnorIndex;
pub use power_map::{st_from_power_map, PowerMap};
pub use verdict::Verdict;
