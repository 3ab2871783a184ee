//! Exact computations with the ordinal-indexed valuation rings `R1`/`R2`,
//! the `Gamma` witnesses, special Aronszajn trees and uniserial
//! presentations over them.

pub mod aronszajn;
pub mod error;
pub mod experiments;
pub mod field;
pub mod gamma;
pub mod group;
pub mod ordinal;
pub mod schedule;
pub mod series;
pub mod uniserial;
pub mod valuation;

pub use error::{Error, Result};
pub use field::{Field, Gf, Q};
pub use group::GroupElement;
pub use ordinal::{Ladder, Ordinal};
pub use series::{Poly, Quotient};
