//! Workbench for a light affine type discipline over pure lambda terms:
//! derivation checking, quantitative measures, level-indexed reduction with
//! polynomial step accounting, a combinator catalog with machine-checked
//! typings, a safe-recursion interpreter and compiler, and a poly-time
//! Turing machine encoder.

pub mod builders;
pub mod combinators;
pub mod data;
pub mod derivation;
pub mod formula;
pub mod judgment;
pub mod measures;
pub mod qlsrn;
pub mod reduction;
pub mod term;
pub mod tm;
pub mod worked;

pub use derivation::{check_derivation, Derivation, Rule, Violation, ViolationKind};
pub use formula::{parse_formula, Formula};
pub use judgment::{Ctx, Judgment, PDContext, Pair};
pub use term::{parse_term, Name, Position, Selector, Term};
