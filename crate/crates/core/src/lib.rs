//! Decision procedures for densely ordered abelian groups over the
//! rationals, and executable checks of continuous induction built on them.
//!
//! The pipeline: parse a [`logic::Formula`] with [`parser::parse_formula`],
//! bind it to a [`structure::StructureSpec`], then decide it with
//! [`qe::QeEngine`], read off its definable set with [`sets::normalize`], or
//! run one of the checks in [`lab`].

pub mod cli;
pub mod lab;
pub mod logic;
pub mod parser;
pub mod qe;
pub mod scalar;
pub mod sets;
pub mod structure;

pub use logic::{Formula, LinearTerm, Var};
pub use parser::{parse_formula, parse_term};
pub use qe::{decide, eliminate_all, QeEngine};
pub use scalar::{Rational, Scalar};
pub use structure::StructureSpec;
