//! Random generation of formulas, judgements, and rule instantiations.
//!
//! Soundness testing needs a steady supply of schema instances: fill a
//! rule's slots with random material, recompute the instance, and check
//! that every model satisfying the premises satisfies the conclusion.
//! The generators here are weighted towards small formulas so that a
//! sweep exercises many shapes rather than a few deep ones.

use super::{BinConn, Instantiation, RuleId};
use crate::extval::Rational;
use crate::syntax::{Formula, LogicLevel, PropName};
use num_bigint::BigInt;
use rand::Rng;

/// A random nonnegative rational from a small pool, occasionally zero.
pub fn random_scalar<R: Rng>(rng: &mut R) -> Rational {
    let (num, den) = match rng.random_range(0..8u8) {
        0 => (0, 1),
        1 => (1, 1),
        2 => (2, 1),
        3 => (3, 1),
        4 => (1, 2),
        5 => (3, 2),
        6 => (5, 3),
        _ => (7, 2),
    };
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Like `random_scalar` but never zero.
pub fn random_positive_scalar<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = random_scalar(rng);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

/// A random formula over `atoms` with connective nesting up to `depth`,
/// drawn from the fragment allowed at `level`.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    atoms: &[PropName],
    depth: usize,
    level: LogicLevel,
) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..10u8) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 if level >= LogicLevel::L1 => Formula::One,
            _ => {
                let i = rng.random_range(0..atoms.len());
                Formula::atom(atoms[i].clone())
            }
        };
    }
    let n_kinds = if level >= LogicLevel::L1star { 5 } else { 4 };
    match rng.random_range(0..n_kinds) {
        0 => Formula::and(
            random_formula(rng, atoms, depth - 1, level),
            random_formula(rng, atoms, depth - 1, level),
        ),
        1 => Formula::or(
            random_formula(rng, atoms, depth - 1, level),
            random_formula(rng, atoms, depth - 1, level),
        ),
        2 => Formula::tensor(
            random_formula(rng, atoms, depth - 1, level),
            random_formula(rng, atoms, depth - 1, level),
        ),
        3 => Formula::limp(
            random_formula(rng, atoms, depth - 1, level),
            random_formula(rng, atoms, depth - 1, level),
        ),
        _ => Formula::scale(
            random_scalar(rng),
            random_formula(rng, atoms, depth - 1, level),
        ),
    }
}

/// A random context of up to `max_len` formulas.
pub fn random_context<R: Rng>(
    rng: &mut R,
    atoms: &[PropName],
    depth: usize,
    level: LogicLevel,
    max_len: usize,
) -> Vec<Formula> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| random_formula(rng, atoms, depth, level)).collect()
}

fn random_conn<R: Rng>(rng: &mut R) -> BinConn {
    match rng.random_range(0..4u8) {
        0 => BinConn::And,
        1 => BinConn::Or,
        2 => BinConn::Tensor,
        _ => BinConn::Limp,
    }
}

/// Fill every slot the rule might read. Scalars for the strictly
/// positive side conditions are drawn nonzero so the instance is
/// well formed; other slots may still trip side conditions, in which
/// case the caller should resample.
pub fn random_instantiation<R: Rng>(
    rng: &mut R,
    rule: &RuleId,
    atoms: &[PropName],
    level: LogicLevel,
) -> Instantiation {
    let f = |rng: &mut R| random_formula(rng, atoms, 2, level);
    let strict = matches!(
        rule,
        RuleId::S1Scale | RuleId::S1Unscale | RuleId::S7
    );
    let r = if strict { random_positive_scalar(rng) } else { random_scalar(rng) };
    let s = random_scalar(rng);
    Instantiation {
        gamma: random_context(rng, atoms, 1, level, 2),
        delta: random_context(rng, atoms, 1, level, 1),
        phi: Some(f(rng)),
        psi: Some(f(rng)),
        theta: Some(f(rng)),
        r: Some(r),
        s: Some(s),
        op: Some(random_conn(rng)),
        cases: None,
    }
}
