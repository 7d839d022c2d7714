//! Exact reasoning engine for propositional logics valued in the Lawvere
//! quantale, the extended half-line `[0, oo]` with truncated subtraction
//! as the residual of addition.
//!
//! The crate provides the shared syntax and exact semantics, a
//! branch-tree normalization procedure, Fourier–Motzkin machinery for the
//! resulting linear side conditions, satisfiability and consequence
//! decision procedures with checkable certificates, a proof checker for
//! the natural-deduction calculus, and quantitative-algebra utilities
//! built on top of the logic.

pub mod extval;
pub mod linarith;
pub mod normalize;
pub mod proofkit;
pub mod semantics;
pub mod syntax;

pub use extval::{ExtValue, Rational};
pub use linarith::{AffineConstraint, LinSystem};
pub use proofkit::{check, Proof, ProofBuilder, RuleId, Verdict};
pub use semantics::{eval, satisfies, satisfies_all, Model, SampleProfile};
pub use syntax::{Formula, Judgement, LogicLevel, PropName};
