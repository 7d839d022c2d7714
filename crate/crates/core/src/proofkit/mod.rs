//! Natural-deduction proof objects and their checker.
//!
//! A proof is a flat sequence of steps; each step names a rule, the
//! indices of the earlier steps it uses as premises, and the substitution
//! that instantiates the rule schema. Checking a step recomputes the
//! schema instance from the substitution and compares it, judgement by
//! judgement, with what the step claims. Hypothesis steps refer to an
//! ambient assumption set, and case splits on a supplementary pair are
//! carried as a single admissible step holding both subproofs.
//!
//! Two rule schemas differ deliberately from their usual presentation.
//! The scaled-bottom axiom `r*bot |- bot` requires `r > 0` here: with the
//! convention `0 * oo = 0` the instance at `r = 0` evaluates to `0 |- oo`
//! and is false in every model. The scalar-difference axiom is stated as
//! `|- (r -. s)*phi o-o (s*phi -o r*phi)` and takes a finiteness premise
//! `|- !!phi`; without that premise the schema fails at `m(phi) = oo`
//! (take `r > s > 0`), and with the inner implication the other way
//! around it already fails at finite values (take `r = 1`, `s = 0`,
//! `m(phi) = 1`).

pub mod builder;
pub mod file;
pub mod sampling;

pub use builder::{BuildError, ProofBuilder};

use crate::extval::{rational_tsub, Rational};
use crate::syntax::{Formula, Judgement, LogicLevel};
use num_traits::{One as _, Signed, Zero as _};
use std::fmt;

/// Binary connective slot for the scale-distribution axiom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinConn {
    And,
    Or,
    Tensor,
    Limp,
}

impl BinConn {
    pub fn apply(self, a: Formula, b: Formula) -> Formula {
        match self {
            BinConn::And => Formula::and(a, b),
            BinConn::Or => Formula::or(a, b),
            BinConn::Tensor => Formula::tensor(a, b),
            BinConn::Limp => Formula::limp(a, b),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinConn::And => "/\\",
            BinConn::Or => "\\/",
            BinConn::Tensor => "(x)",
            BinConn::Limp => "-o",
        }
    }
}

/// Rule identifiers. The two invertible tensor rules are split into
/// explicit directions so a step is checkable without guessing which way
/// it was applied; same for scaling and unscaling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleId {
    Id,
    Cut,
    Weak,
    Perm,
    Top,
    Bot,
    And1,
    And2,
    And3,
    Or1,
    Or2,
    Or3,
    Wem,
    Tot,
    Tens1Fold,
    Tens1Unfold,
    Tens2Curry,
    Tens2Uncurry,
    Tens3,
    Limp1,
    Limp2,
    Limp3,
    One,
    S1Scale,
    S1Unscale,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    S10,
    /// Reference to a judgement in the ambient assumption set.
    Hyp,
    /// Registered derived rule; the only one today is `"totality"`.
    Admissible(String),
}

impl RuleId {
    /// Smallest logic whose deduction system contains the rule.
    pub fn min_level(&self) -> LogicLevel {
        match self {
            RuleId::One => LogicLevel::L1,
            RuleId::S1Scale
            | RuleId::S1Unscale
            | RuleId::S2
            | RuleId::S3
            | RuleId::S4
            | RuleId::S5
            | RuleId::S6
            | RuleId::S7
            | RuleId::S8
            | RuleId::S9
            | RuleId::S10 => LogicLevel::L1star,
            _ => LogicLevel::L,
        }
    }

    /// File-format name.
    pub fn name(&self) -> String {
        match self {
            RuleId::Id => "id".into(),
            RuleId::Cut => "cut".into(),
            RuleId::Weak => "weak".into(),
            RuleId::Perm => "perm".into(),
            RuleId::Top => "top".into(),
            RuleId::Bot => "bot".into(),
            RuleId::And1 => "and1".into(),
            RuleId::And2 => "and2".into(),
            RuleId::And3 => "and3".into(),
            RuleId::Or1 => "or1".into(),
            RuleId::Or2 => "or2".into(),
            RuleId::Or3 => "or3".into(),
            RuleId::Wem => "wem".into(),
            RuleId::Tot => "tot".into(),
            RuleId::Tens1Fold => "tens1_fold".into(),
            RuleId::Tens1Unfold => "tens1_unfold".into(),
            RuleId::Tens2Curry => "tens2_curry".into(),
            RuleId::Tens2Uncurry => "tens2_uncurry".into(),
            RuleId::Tens3 => "tens3".into(),
            RuleId::Limp1 => "limp1".into(),
            RuleId::Limp2 => "limp2".into(),
            RuleId::Limp3 => "limp3".into(),
            RuleId::One => "one".into(),
            RuleId::S1Scale => "s1_scale".into(),
            RuleId::S1Unscale => "s1_unscale".into(),
            RuleId::S2 => "s2".into(),
            RuleId::S3 => "s3".into(),
            RuleId::S4 => "s4".into(),
            RuleId::S5 => "s5".into(),
            RuleId::S6 => "s6".into(),
            RuleId::S7 => "s7".into(),
            RuleId::S8 => "s8".into(),
            RuleId::S9 => "s9".into(),
            RuleId::S10 => "s10".into(),
            RuleId::Hyp => "hyp".into(),
            RuleId::Admissible(name) => format!("admissible({name})"),
        }
    }

    /// Inverse of [`RuleId::name`] for the schematic rules.
    pub fn from_name(s: &str) -> Option<RuleId> {
        let r = match s {
            "id" => RuleId::Id,
            "cut" => RuleId::Cut,
            "weak" => RuleId::Weak,
            "perm" => RuleId::Perm,
            "top" => RuleId::Top,
            "bot" => RuleId::Bot,
            "and1" => RuleId::And1,
            "and2" => RuleId::And2,
            "and3" => RuleId::And3,
            "or1" => RuleId::Or1,
            "or2" => RuleId::Or2,
            "or3" => RuleId::Or3,
            "wem" => RuleId::Wem,
            "tot" => RuleId::Tot,
            "tens1_fold" => RuleId::Tens1Fold,
            "tens1_unfold" => RuleId::Tens1Unfold,
            "tens2_curry" => RuleId::Tens2Curry,
            "tens2_uncurry" => RuleId::Tens2Uncurry,
            "tens3" => RuleId::Tens3,
            "limp1" => RuleId::Limp1,
            "limp2" => RuleId::Limp2,
            "limp3" => RuleId::Limp3,
            "one" => RuleId::One,
            "s1_scale" => RuleId::S1Scale,
            "s1_unscale" => RuleId::S1Unscale,
            "s2" => RuleId::S2,
            "s3" => RuleId::S3,
            "s4" => RuleId::S4,
            "s5" => RuleId::S5,
            "s6" => RuleId::S6,
            "s7" => RuleId::S7,
            "s8" => RuleId::S8,
            "s9" => RuleId::S9,
            "s10" => RuleId::S10,
            "hyp" => RuleId::Hyp,
            _ => return None,
        };
        Some(r)
    }

    /// All schematic rules (everything except `hyp` and admissibles),
    /// useful for exhaustive instantiation sweeps.
    pub fn schematic() -> &'static [RuleId] {
        const ALL: &[RuleId] = &[
            RuleId::Id,
            RuleId::Cut,
            RuleId::Weak,
            RuleId::Perm,
            RuleId::Top,
            RuleId::Bot,
            RuleId::And1,
            RuleId::And2,
            RuleId::And3,
            RuleId::Or1,
            RuleId::Or2,
            RuleId::Or3,
            RuleId::Wem,
            RuleId::Tot,
            RuleId::Tens1Fold,
            RuleId::Tens1Unfold,
            RuleId::Tens2Curry,
            RuleId::Tens2Uncurry,
            RuleId::Tens3,
            RuleId::Limp1,
            RuleId::Limp2,
            RuleId::Limp3,
            RuleId::One,
            RuleId::S1Scale,
            RuleId::S1Unscale,
            RuleId::S2,
            RuleId::S3,
            RuleId::S4,
            RuleId::S5,
            RuleId::S6,
            RuleId::S7,
            RuleId::S8,
            RuleId::S9,
            RuleId::S10,
        ];
        ALL
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Case split payload of an admissible totality step.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseSplit {
    /// The supplementary pair being discharged.
    pub pair: (Judgement, Judgement),
    /// Subproof under the extra assumption `pair.0`.
    pub left: Proof,
    /// Subproof under the extra assumption `pair.1`.
    pub right: Proof,
}

/// Substitution instantiating a rule schema. Each rule reads the slots it
/// needs and ignores the rest; `rule_instance` rejects instantiations
/// with a required slot missing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Instantiation {
    pub gamma: Vec<Formula>,
    pub delta: Vec<Formula>,
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
    pub theta: Option<Formula>,
    pub r: Option<Rational>,
    pub s: Option<Rational>,
    pub op: Option<BinConn>,
    pub cases: Option<Box<CaseSplit>>,
}

impl Instantiation {
    pub fn with_phi(phi: Formula) -> Self {
        Instantiation { phi: Some(phi), ..Default::default() }
    }
}

/// One proof step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub conclusion: Judgement,
    pub rule: RuleId,
    pub premises: Vec<usize>,
    pub inst: Instantiation,
}

/// A proof: steps whose premise indices point strictly backwards; the
/// last step's conclusion is the theorem.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Proof {
    pub steps: Vec<Step>,
}

impl Proof {
    pub fn theorem(&self) -> Option<&Judgement> {
        self.steps.last().map(|s| &s.conclusion)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Total step count including nested case-split subproofs.
    pub fn total_steps(&self) -> usize {
        self.steps
            .iter()
            .map(|s| {
                1 + s.inst.cases.as_ref().map_or(0, |c| c.left.total_steps() + c.right.total_steps())
            })
            .sum()
    }
}

/// Outcome of checking. Rejection points at the first bad step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected { step, reason } => write!(f, "rejected at step {step}: {reason}"),
        }
    }
}

/// The premises and conclusion a rule schema produces for a given
/// substitution.
#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    pub premises: Vec<Judgement>,
    pub conclusion: Judgement,
}

/// Why an instantiation was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule {rule} needs slot `{slot}`")]
    MissingSlot { rule: String, slot: &'static str },
    #[error("rule {rule}: {reason}")]
    SideCondition { rule: String, reason: String },
    #[error("rule {0} is not schematic")]
    NotSchematic(String),
}

fn need<'a>(rule: &RuleId, slot: &'static str, f: &'a Option<Formula>) -> Result<&'a Formula, RuleError> {
    f.as_ref().ok_or(RuleError::MissingSlot { rule: rule.name(), slot })
}

fn need_scalar<'a>(
    rule: &RuleId,
    slot: &'static str,
    r: &'a Option<Rational>,
) -> Result<&'a Rational, RuleError> {
    let r = r.as_ref().ok_or(RuleError::MissingSlot { rule: rule.name(), slot })?;
    if r.is_negative() {
        return Err(RuleError::SideCondition {
            rule: rule.name(),
            reason: format!("negative scalar {r}"),
        });
    }
    Ok(r)
}

fn ctx_plus(ctx: &[Formula], extra: &[Formula]) -> Vec<Formula> {
    let mut v = ctx.to_vec();
    v.extend_from_slice(extra);
    v
}

/// Instantiate a rule schema. Returns the premises the rule demands, in
/// schema order, and the conclusion it yields.
pub fn rule_instance(rule: &RuleId, inst: &Instantiation) -> Result<Inference, RuleError> {
    use Formula as F;
    let g = &inst.gamma;
    let inf = |premises: Vec<Judgement>, conclusion: Judgement| Inference { premises, conclusion };
    match rule {
        RuleId::Id => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            Ok(inf(vec![], Judgement::entail(phi.clone(), phi)))
        }
        RuleId::Cut => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p1 = Judgement::new(g.clone(), phi.clone());
            let p2 = Judgement::new(ctx_plus(&inst.delta, &[phi]), psi.clone());
            let c = Judgement::new(ctx_plus(g, &inst.delta), psi);
            Ok(inf(vec![p1, p2], c))
        }
        RuleId::Weak => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p = Judgement::new(g.clone(), phi.clone());
            let c = Judgement::new(ctx_plus(g, &[psi]), phi);
            Ok(inf(vec![p], c))
        }
        RuleId::Perm => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let mut before = g.clone();
            before.push(phi.clone());
            before.push(psi.clone());
            before.extend_from_slice(&inst.delta);
            let mut after = g.clone();
            after.push(psi);
            after.push(phi);
            after.extend_from_slice(&inst.delta);
            Ok(inf(vec![Judgement::new(before, theta.clone())], Judgement::new(after, theta)))
        }
        RuleId::Top => Ok(inf(vec![], Judgement::new(g.clone(), F::Top))),
        RuleId::Bot => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            Ok(inf(vec![], Judgement::entail(F::Bot, phi)))
        }
        RuleId::And1 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let p = Judgement::new(ctx_plus(g, &[phi.clone()]), theta.clone());
            let c = Judgement::new(ctx_plus(g, &[F::and(phi, psi)]), theta);
            Ok(inf(vec![p], c))
        }
        RuleId::And2 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p1 = Judgement::new(g.clone(), phi.clone());
            let p2 = Judgement::new(g.clone(), psi.clone());
            let c = Judgement::new(g.clone(), F::and(phi, psi));
            Ok(inf(vec![p1, p2], c))
        }
        RuleId::And3 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p = Judgement::new(g.clone(), F::and(phi, psi.clone()));
            let c = Judgement::new(g.clone(), psi);
            Ok(inf(vec![p], c))
        }
        RuleId::Or1 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let p1 = Judgement::new(ctx_plus(g, &[phi.clone()]), theta.clone());
            let p2 = Judgement::new(ctx_plus(g, &[psi.clone()]), theta.clone());
            let c = Judgement::new(ctx_plus(g, &[F::or(phi, psi)]), theta);
            Ok(inf(vec![p1, p2], c))
        }
        RuleId::Or2 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p = Judgement::new(g.clone(), phi.clone());
            let c = Judgement::new(g.clone(), F::or(phi, psi));
            Ok(inf(vec![p], c))
        }
        RuleId::Or3 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let p = Judgement::new(ctx_plus(g, &[F::or(phi, psi.clone())]), theta.clone());
            let c = Judgement::new(ctx_plus(g, &[psi]), theta);
            Ok(inf(vec![p], c))
        }
        RuleId::Wem => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let c = F::or(F::not(phi.clone()), F::not(F::not(phi)));
            Ok(inf(vec![], Judgement::thesis(c)))
        }
        RuleId::Tot => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let c = F::or(F::limp(phi.clone(), psi.clone()), F::limp(psi, phi));
            Ok(inf(vec![], Judgement::thesis(c)))
        }
        RuleId::Tens1Fold | RuleId::Tens1Unfold => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let unfolded = Judgement::new(ctx_plus(g, &[phi.clone(), psi.clone()]), theta.clone());
            let folded = Judgement::new(ctx_plus(g, &[F::tensor(phi, psi)]), theta);
            if *rule == RuleId::Tens1Fold {
                Ok(inf(vec![unfolded], folded))
            } else {
                Ok(inf(vec![folded], unfolded))
            }
        }
        RuleId::Tens2Curry | RuleId::Tens2Uncurry => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let tensored =
                Judgement::new(ctx_plus(g, &[F::tensor(phi.clone(), psi.clone())]), theta.clone());
            let curried = Judgement::new(ctx_plus(g, &[phi]), F::limp(psi, theta));
            if *rule == RuleId::Tens2Curry {
                Ok(inf(vec![tensored], curried))
            } else {
                Ok(inf(vec![curried], tensored))
            }
        }
        RuleId::Tens3 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let p = Judgement::entail(
                F::tensor(phi.clone(), phi.clone()),
                F::tensor(psi.clone(), psi.clone()),
            );
            Ok(inf(vec![p], Judgement::entail(phi, psi)))
        }
        RuleId::Limp1 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let p1 = Judgement::new(
                ctx_plus(g, &[F::limp(phi.clone(), theta.clone())]),
                psi.clone(),
            );
            let p2 = Judgement::entail(theta.clone(), phi.clone());
            let c = Judgement::new(ctx_plus(g, &[theta]), F::tensor(phi, psi));
            Ok(inf(vec![p1, p2], c))
        }
        RuleId::Limp2 | RuleId::Limp3 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let theta = need(rule, "theta", &inst.theta)?.clone();
            let p1 = Judgement::new(
                ctx_plus(g, &[theta.clone()]),
                F::tensor(phi.clone(), psi.clone()),
            );
            let side = if *rule == RuleId::Limp2 { phi.clone() } else { theta.clone() };
            let p2 = Judgement::thesis(F::not(F::not(side)));
            let c = Judgement::new(ctx_plus(g, &[F::limp(phi, theta)]), psi);
            Ok(inf(vec![p1, p2], c))
        }
        RuleId::One => {
            let p = Judgement::thesis(F::or(F::One, F::not(F::One)));
            Ok(inf(vec![p], Judgement::thesis(F::Bot)))
        }
        RuleId::S1Scale | RuleId::S1Unscale => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            if r.is_zero() {
                return Err(RuleError::SideCondition {
                    rule: rule.name(),
                    reason: "requires r > 0".into(),
                });
            }
            let plain = Judgement::entail(phi.clone(), psi.clone());
            let scaled = Judgement::entail(F::scale(r.clone(), phi), F::scale(r, psi));
            if *rule == RuleId::S1Scale {
                Ok(inf(vec![plain], scaled))
            } else {
                Ok(inf(vec![scaled], plain))
            }
        }
        RuleId::S2 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            let s = need_scalar(rule, "s", &inst.s)?.clone();
            let lhs = F::scale(r.clone(), F::scale(s.clone(), phi.clone()));
            let rhs = F::scale(r * s, phi);
            Ok(inf(vec![], Judgement::thesis(F::biimp(lhs, rhs))))
        }
        RuleId::S3 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let rhs = F::scale(Rational::one(), phi.clone());
            Ok(inf(vec![], Judgement::thesis(F::biimp(phi, rhs))))
        }
        RuleId::S4 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let psi = need(rule, "psi", &inst.psi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            let op = inst.op.ok_or(RuleError::MissingSlot { rule: rule.name(), slot: "op" })?;
            let lhs = F::scale(r.clone(), op.apply(phi.clone(), psi.clone()));
            let rhs = op.apply(F::scale(r.clone(), phi), F::scale(r, psi));
            Ok(inf(vec![], Judgement::thesis(F::biimp(lhs, rhs))))
        }
        RuleId::S5 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            Ok(inf(vec![], Judgement::thesis(F::scale(Rational::zero(), phi))))
        }
        RuleId::S6 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            let s = need_scalar(rule, "s", &inst.s)?.clone();
            let lhs = F::scale(r.clone() + s.clone(), phi.clone());
            let rhs = F::tensor(F::scale(r, phi.clone()), F::scale(s, phi));
            Ok(inf(vec![], Judgement::thesis(F::biimp(lhs, rhs))))
        }
        RuleId::S7 => {
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            if r.is_zero() {
                return Err(RuleError::SideCondition {
                    rule: rule.name(),
                    reason: "requires r > 0 (0*bot evaluates to 0)".into(),
                });
            }
            Ok(inf(vec![], Judgement::entail(F::scale(r, F::Bot), F::Bot)))
        }
        RuleId::S8 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            let s = need_scalar(rule, "s", &inst.s)?.clone();
            let p = Judgement::thesis(F::not(F::not(phi.clone())));
            let lhs = F::scale(rational_tsub(&r, &s), phi.clone());
            let rhs = F::limp(F::scale(s, phi.clone()), F::scale(r, phi));
            Ok(inf(vec![p], Judgement::thesis(F::biimp(lhs, rhs))))
        }
        RuleId::S9 | RuleId::S10 => {
            let phi = need(rule, "phi", &inst.phi)?.clone();
            let r = need_scalar(rule, "r", &inst.r)?.clone();
            let s = need_scalar(rule, "s", &inst.s)?.clone();
            let (mk, pick): (fn(Formula, Formula) -> Formula, Rational) = if *rule == RuleId::S9 {
                (F::and, r.clone().max(s.clone()))
            } else {
                (F::or, r.clone().min(s.clone()))
            };
            let lhs = mk(F::scale(r, phi.clone()), F::scale(s, phi.clone()));
            let rhs = F::scale(pick, phi);
            Ok(inf(vec![], Judgement::thesis(F::biimp(lhs, rhs))))
        }
        RuleId::Hyp | RuleId::Admissible(_) => Err(RuleError::NotSchematic(rule.name())),
    }
}

/// Is `(j1, j2)` a supplementary pair: `(|- phi -o psi, |- psi -o phi)`
/// or `(|- !phi, |- !!phi)`? In every model at least one member holds,
/// which is what justifies case splitting.
pub fn supplementary_pair(j1: &Judgement, j2: &Judgement) -> bool {
    if !j1.antecedents.is_empty() || !j2.antecedents.is_empty() {
        return false;
    }
    // negation pair: (!phi, !!phi)
    if let (Some(a), Some(nn)) = (j1.consequent.as_negation(), j2.consequent.as_negation()) {
        if let Some(b) = nn.as_negation() {
            if a == b {
                return true;
            }
        }
    }
    if let (Formula::Limp(a1, b1), Formula::Limp(a2, b2)) = (&j1.consequent, &j2.consequent) {
        if a1 == b2 && b1 == a2 {
            return true;
        }
    }
    false
}

/// Check a proof against an assumption set at a logic level.
pub fn check(proof: &Proof, assumptions: &[Judgement], level: LogicLevel) -> Verdict {
    if proof.steps.is_empty() {
        return Verdict::Rejected { step: 0, reason: "empty proof".into() };
    }
    for (i, step) in proof.steps.iter().enumerate() {
        if let Err(reason) = check_step(proof, i, step, assumptions, level) {
            return Verdict::Rejected { step: i, reason };
        }
    }
    Verdict::Accepted
}

fn check_step(
    proof: &Proof,
    i: usize,
    step: &Step,
    assumptions: &[Judgement],
    level: LogicLevel,
) -> Result<(), String> {
    if step.conclusion.level() > level {
        return Err(format!(
            "conclusion `{}` uses syntax beyond {level}",
            step.conclusion
        ));
    }
    if step.rule.min_level() > level {
        return Err(format!("rule {} is not available in {level}", step.rule));
    }
    for &p in &step.premises {
        if p >= i {
            return Err(format!("premise index {p} does not point backwards"));
        }
    }
    match &step.rule {
        RuleId::Hyp => {
            if !step.premises.is_empty() {
                return Err("hyp takes no premises".into());
            }
            if !assumptions.contains(&step.conclusion) {
                return Err(format!("`{}` is not among the assumptions", step.conclusion));
            }
            Ok(())
        }
        RuleId::Admissible(name) => {
            if name != "totality" {
                return Err(format!("unknown admissible rule `{name}`"));
            }
            let cases = step
                .inst
                .cases
                .as_deref()
                .ok_or_else(|| "totality step is missing its case split".to_string())?;
            if !step.premises.is_empty() {
                return Err("totality carries its subproofs, not premise indices".into());
            }
            if !supplementary_pair(&cases.pair.0, &cases.pair.1) {
                return Err(format!(
                    "(`{}`, `{}`) is not a supplementary pair",
                    cases.pair.0, cases.pair.1
                ));
            }
            for (branch, sub, extra) in [
                ("left", &cases.left, &cases.pair.0),
                ("right", &cases.right, &cases.pair.1),
            ] {
                if sub.theorem() != Some(&step.conclusion) {
                    return Err(format!(
                        "{branch} branch concludes `{:?}`, expected `{}`",
                        sub.theorem().map(|j| j.to_string()),
                        step.conclusion
                    ));
                }
                let mut assum = assumptions.to_vec();
                assum.push(extra.clone());
                match check(sub, &assum, level) {
                    Verdict::Accepted => {}
                    Verdict::Rejected { step: s, reason } => {
                        return Err(format!("{branch} branch, step {s}: {reason}"));
                    }
                }
            }
            Ok(())
        }
        rule => {
            let inference = rule_instance(rule, &step.inst).map_err(|e| e.to_string())?;
            if inference.conclusion != step.conclusion {
                return Err(format!(
                    "conclusion `{}` does not match the schema instance `{}`",
                    step.conclusion, inference.conclusion
                ));
            }
            if inference.premises.len() != step.premises.len() {
                return Err(format!(
                    "rule {rule} takes {} premises, {} given",
                    inference.premises.len(),
                    step.premises.len()
                ));
            }
            for (want, &have_idx) in inference.premises.iter().zip(&step.premises) {
                let have = &proof.steps[have_idx].conclusion;
                if want != have {
                    return Err(format!(
                        "premise {have_idx} concludes `{have}`, schema needs `{want}`"
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Assemble a case split over a supplementary pair into a one-step proof.
/// Both subproofs must conclude the same judgement, each using its half
/// of the pair as an extra assumption.
pub fn by_cases(pair: (Judgement, Judgement), left: Proof, right: Proof) -> Result<Proof, String> {
    if !supplementary_pair(&pair.0, &pair.1) {
        return Err(format!("(`{}`, `{}`) is not a supplementary pair", pair.0, pair.1));
    }
    let conclusion = left
        .theorem()
        .ok_or("left branch is empty")?
        .clone();
    if right.theorem() != Some(&conclusion) {
        return Err(format!(
            "branches conclude different judgements: `{}` vs `{}`",
            conclusion,
            right.theorem().map(|j| j.to_string()).unwrap_or_else(|| "<empty>".into())
        ));
    }
    let inst = Instantiation {
        cases: Some(Box::new(CaseSplit { pair, left, right })),
        ..Default::default()
    };
    Ok(Proof {
        steps: vec![Step {
            conclusion,
            rule: RuleId::Admissible("totality".into()),
            premises: vec![],
            inst,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::sampling::{random_instantiation, random_formula};
    use super::*;
    use crate::semantics::{sample_model_with, satisfies, SampleProfile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn j(s: &str) -> Judgement {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        crate::extval::parse_rational(s).unwrap()
    }

    #[test]
    fn identity_is_accepted() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.id(&f("p")).unwrap();
        let p = b.into_proof_of(i);
        assert!(check(&p, &[], LogicLevel::L).is_accepted());
    }

    /// From the hypothesis `|- n /\ ((n (x) r) -o t)` the thesis
    /// `|- r -o t` is derivable, even though the corresponding
    /// implication thesis fails in a model; this is the standard
    /// counterexample to the deduction theorem here.
    #[test]
    fn deduction_failure_derivation() {
        let phi = j("|- n /\\ ((n (x) r) -o t)");
        let assume = vec![phi.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let h = b.hyp(&phi).unwrap();
        // left component of the conjunction, via cut with the projection
        let pl = b.proj_left(&f("n"), &f("(n (x) r) -o t")).unwrap();
        let n_thesis = b.cut(h, pl).unwrap();
        // right component directly
        let imp = b
            .push(
                RuleId::And3,
                Instantiation {
                    phi: Some(f("n")),
                    psi: Some(f("(n (x) r) -o t")),
                    ..Default::default()
                },
                &[h],
            )
            .unwrap();
        let ent = b.thesis_to_entail(imp).unwrap();
        assert_eq!(*b.judgement(ent), j("n (x) r |- t"));
        let mut i = b.unfold_last(ent).unwrap();
        i = b.perm_at(i, 0).unwrap();
        i = b.cut(n_thesis, i).unwrap();
        assert_eq!(*b.judgement(i), j("r |- t"));
        let goal = b.entail_to_thesis(i).unwrap();
        let p = b.into_proof_of(goal);
        assert_eq!(p.theorem(), Some(&j("|- r -o t")));
        assert!(check(&p, &assume, LogicLevel::L).is_accepted());

        // while the implication itself has a countermodel
        let mut m = crate::semantics::Model::zeroed();
        m.set("n", crate::extval::ExtValue::finite(crate::extval::rat(1, 4)));
        m.set("r", crate::extval::ExtValue::finite(crate::extval::rat_int(0)));
        m.set("t", crate::extval::ExtValue::finite(crate::extval::rat_int(1)));
        let imp_thesis = j("|- (n /\\ ((n (x) r) -o t)) -o (r -o t)");
        assert!(!satisfies(&m, &imp_thesis));
    }

    /// The unit rule turns the excluded-middle disjunction for the unit
    /// into falsum; no scaled implication form of this is ever valid.
    #[test]
    fn weak_deduction_failure_derivation() {
        let hyp = j("|- 1 \\/ !1");
        let assume = vec![hyp.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let h = b.hyp(&hyp).unwrap();
        let i = b.push(RuleId::One, Instantiation::default(), &[h]).unwrap();
        let p = b.into_proof_of(i);
        assert_eq!(p.theorem(), Some(&j("|- bot")));
        assert!(check(&p, &assume, LogicLevel::L1).is_accepted());
        // the same proof is not available in the base logic
        assert!(!check(&p, &assume, LogicLevel::L).is_accepted());
    }

    #[test]
    fn limp2_requires_its_finiteness_premise() {
        let hyp = j("w, p |- p (x) q");
        // correct usage first
        let inst = Instantiation {
            gamma: vec![f("w")],
            phi: Some(f("p")),
            psi: Some(f("q")),
            theta: Some(f("p")),
            ..Default::default()
        };
        let inference = rule_instance(&RuleId::Limp2, &inst).unwrap();
        assert_eq!(inference.premises[1], j("|- !!p"));
        assert_eq!(inference.conclusion, j("w, p -o p |- q"));

        // a step claiming the rule with only the first premise
        let steps = vec![
            Step {
                conclusion: hyp.clone(),
                rule: RuleId::Hyp,
                premises: vec![],
                inst: Instantiation::default(),
            },
            Step {
                conclusion: j("w, p -o p |- q"),
                rule: RuleId::Limp2,
                premises: vec![0],
                inst: inst.clone(),
            },
        ];
        let verdict = check(&Proof { steps }, &[hyp.clone()], LogicLevel::L);
        match verdict {
            Verdict::Rejected { step, .. } => assert_eq!(step, 1),
            Verdict::Accepted => panic!("missing side premise must reject"),
        }

        // and with a wrong judgement in the side-premise slot
        let steps = vec![
            Step {
                conclusion: hyp.clone(),
                rule: RuleId::Hyp,
                premises: vec![],
                inst: Instantiation::default(),
            },
            Step {
                conclusion: j("w, p -o p |- q"),
                rule: RuleId::Limp2,
                premises: vec![0, 0],
                inst,
            },
        ];
        let verdict = check(&Proof { steps }, &[hyp], LogicLevel::L);
        assert!(!verdict.is_accepted());
    }

    #[test]
    fn rule_instance_examples() {
        let inst = Instantiation {
            phi: Some(f("p")),
            r: Some(q("1")),
            s: Some(q("2")),
            ..Default::default()
        };
        let inf = rule_instance(&RuleId::S6, &inst).unwrap();
        assert_eq!(inf.conclusion, j("|- 3*p o-o 1*p (x) 2*p"));

        let inst = Instantiation {
            phi: Some(f("p")),
            psi: Some(f("q")),
            ..Default::default()
        };
        let inf = rule_instance(&RuleId::Tot, &inst).unwrap();
        assert_eq!(inf.conclusion, j("|- (p -o q) \\/ (q -o p)"));

        let inst = Instantiation {
            phi: Some(f("p")),
            psi: Some(f("q")),
            r: Some(q("0")),
            ..Default::default()
        };
        assert!(matches!(
            rule_instance(&RuleId::S1Scale, &inst),
            Err(RuleError::SideCondition { .. })
        ));
        assert!(matches!(
            rule_instance(&RuleId::S7, &Instantiation { r: Some(q("0")), ..Default::default() }),
            Err(RuleError::SideCondition { .. })
        ));
    }

    #[test]
    fn case_split_basic() {
        let pair = (j("|- !p"), j("|- !!p"));
        let mut b = ProofBuilder::new(vec![]);
        let i = b
            .by_cases(
                pair,
                |bl| bl.top(&[]),
                |br| br.top(&[]),
            )
            .unwrap();
        let p = b.into_proof_of(i);
        assert_eq!(p.theorem(), Some(&j("|- top")));
        assert!(check(&p, &[], LogicLevel::L).is_accepted());
    }

    #[test]
    fn case_split_rejects_mismatches() {
        // not a supplementary pair
        let bad = by_cases(
            (j("|- p"), j("|- q")),
            Proof {
                steps: vec![Step {
                    conclusion: j("|- top"),
                    rule: RuleId::Top,
                    premises: vec![],
                    inst: Instantiation::default(),
                }],
            },
            Proof {
                steps: vec![Step {
                    conclusion: j("|- top"),
                    rule: RuleId::Top,
                    premises: vec![],
                    inst: Instantiation::default(),
                }],
            },
        );
        assert!(bad.is_err());

        // branches concluding different judgements
        let mut b = ProofBuilder::new(vec![]);
        let r = b.by_cases(
            (j("|- !p"), j("|- !!p")),
            |bl| bl.top(&[]),
            |br| br.top(&[f("p")]),
        );
        assert!(r.is_err());
    }

    /// Distributivity of the tensor over the meet needs the totality
    /// case split in its interesting direction; kept as a regression
    /// fixture for the admissible-step machinery.
    #[test]
    fn distributivity_fixture_via_totality() {
        let goal = j("(p (x) q) /\\ (p (x) w) |- p (x) (q /\\ w)");
        let pair = (j("|- q -o w"), j("|- w -o q"));
        let mut b = ProofBuilder::new(vec![]);

        let easy_dir = |bb: &mut ProofBuilder| -> Result<usize, BuildError> {
            // p (x) (q /\ w) |- (p (x) q) /\ (p (x) w), no split needed
            let ip = bb.id(&f("p"))?;
            let pl = bb.proj_left(&f("q"), &f("w"))?;
            let left = bb.mono_tensor(ip, pl)?;
            let ip = bb.id(&f("p"))?;
            let pr = bb.proj_right(&f("q"), &f("w"))?;
            let right = bb.mono_tensor(ip, pr)?;
            bb.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![f("p (x) (q /\\ w)")],
                    phi: Some(f("p (x) q")),
                    psi: Some(f("p (x) w")),
                    ..Default::default()
                },
                &[left, right],
            )
        };
        let easy = easy_dir(&mut b).unwrap();
        assert_eq!(
            *b.judgement(easy),
            j("p (x) (q /\\ w) |- (p (x) q) /\\ (p (x) w)")
        );

        let hard = b
            .by_cases(
                pair,
                |bl| {
                    // under |- q -o w the meet collapses to q
                    let h = bl.hyp(&j("|- q -o w"))?;
                    let qw = bl.thesis_to_entail(h)?;
                    let iq = bl.id(&f("q"))?;
                    let into_meet = bl.push(
                        RuleId::And2,
                        Instantiation {
                            gamma: vec![f("q")],
                            phi: Some(f("q")),
                            psi: Some(f("w")),
                            ..Default::default()
                        },
                        &[iq, qw],
                    )?;
                    let pl = bl.proj_left(&f("p (x) q"), &f("p (x) w"))?;
                    let ip = bl.id(&f("p"))?;
                    let lift = bl.mono_tensor(ip, into_meet)?;
                    bl.cut(pl, lift)
                },
                |br| {
                    let h = br.hyp(&j("|- w -o q"))?;
                    let wq = br.thesis_to_entail(h)?;
                    let iw = br.id(&f("w"))?;
                    let into_meet = br.push(
                        RuleId::And2,
                        Instantiation {
                            gamma: vec![f("w")],
                            phi: Some(f("q")),
                            psi: Some(f("w")),
                            ..Default::default()
                        },
                        &[wq, iw],
                    )?;
                    let pr = br.proj_right(&f("p (x) q"), &f("p (x) w"))?;
                    let ip = br.id(&f("p"))?;
                    let lift = br.mono_tensor(ip, into_meet)?;
                    br.cut(pr, lift)
                },
            )
            .unwrap();
        assert_eq!(*b.judgement(hard), goal);
        let p = b.into_proof_of(hard);
        assert!(check(&p, &[], LogicLevel::L).is_accepted());

        // cross-check the statement semantically
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = sample_model_with(&mut rng, ["p", "q", "w"], SampleProfile::Mixed);
            assert!(satisfies(&m, &goal));
        }
    }

    /// Replacing the admissible step by its two recorded subproofs,
    /// each checked under its half of the pair, preserves the semantic
    /// status of the conclusion.
    #[test]
    fn admissible_steps_are_conservative() {
        let pair = (j("|- !p"), j("|- !!p"));
        let conclusion = j("|- top (x) top");
        let mut b = ProofBuilder::new(vec![]);
        let i = b
            .by_cases(
                pair.clone(),
                |bl| {
                    let t = bl.top(&[])?;
                    let t2 = bl.top(&[])?;
                    bl.pad_consequent(t, t2)
                },
                |br| {
                    let t = br.top(&[])?;
                    let t2 = br.top(&[])?;
                    br.pad_consequent(t, t2)
                },
            )
            .unwrap();
        let whole = b.into_proof_of(i);
        assert!(check(&whole, &[], LogicLevel::L).is_accepted());

        let Some(cases) = whole.steps.last().unwrap().inst.cases.as_deref() else {
            panic!("case split step lost its subproofs");
        };
        assert!(check(&cases.left, &[pair.0.clone()], LogicLevel::L).is_accepted());
        assert!(check(&cases.right, &[pair.1.clone()], LogicLevel::L).is_accepted());
        assert_eq!(cases.left.theorem(), Some(&conclusion));
        assert_eq!(cases.right.theorem(), Some(&conclusion));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = sample_model_with(&mut rng, ["p"], SampleProfile::Mixed);
            // whichever half of the pair holds, its subproof's theorem
            // agrees with the admissible conclusion
            assert!(satisfies(&m, &pair.0) || satisfies(&m, &pair.1));
            assert!(satisfies(&m, &conclusion));
        }
    }

    /// Every schema instance, fed back as a proof whose premises are
    /// assumptions, self-checks.
    #[test]
    fn schema_instances_self_check() {
        let atoms: Vec<crate::syntax::PropName> =
            vec!["p".into(), "q".into(), "w".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for rule in RuleId::schematic() {
            let mut produced = 0;
            let mut guard = 0;
            while produced < 60 {
                guard += 1;
                assert!(guard < 10_000, "rule {rule} never instantiates");
                let inst = random_instantiation(&mut rng, rule, &atoms, LogicLevel::L1star);
                let Ok(inference) = rule_instance(rule, &inst) else {
                    continue;
                };
                produced += 1;
                let mut steps: Vec<Step> = inference
                    .premises
                    .iter()
                    .map(|p| Step {
                        conclusion: p.clone(),
                        rule: RuleId::Hyp,
                        premises: vec![],
                        inst: Instantiation::default(),
                    })
                    .collect();
                let premise_ids: Vec<usize> = (0..steps.len()).collect();
                steps.push(Step {
                    conclusion: inference.conclusion.clone(),
                    rule: rule.clone(),
                    premises: premise_ids,
                    inst: inst.clone(),
                });
                let verdict = check(&Proof { steps }, &inference.premises, LogicLevel::L1star);
                assert!(verdict.is_accepted(), "rule {rule}: {verdict}");
            }
        }
    }

    /// Small soundness sweep; the acceptance suite runs the full-size one.
    #[test]
    fn soundness_smoke() {
        let atoms: Vec<crate::syntax::PropName> =
            vec!["p".into(), "q".into(), "w".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for rule in RuleId::schematic() {
            let mut produced = 0;
            let mut guard = 0;
            while produced < 25 {
                guard += 1;
                assert!(guard < 10_000);
                let inst = random_instantiation(&mut rng, rule, &atoms, LogicLevel::L1star);
                let Ok(inference) = rule_instance(rule, &inst) else {
                    continue;
                };
                produced += 1;
                for _ in 0..8 {
                    let m = sample_model_with(
                        &mut rng,
                        atoms.iter().map(|s| s.as_str()),
                        SampleProfile::Mixed,
                    );
                    let premises_hold =
                        inference.premises.iter().all(|p| satisfies(&m, p));
                    if premises_hold && !satisfies(&m, &inference.conclusion) {
                        panic!(
                            "rule {rule} unsound at {m}: premises {:?} conclusion {}",
                            inference.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                            inference.conclusion
                        );
                    }
                }
            }
        }
    }

    /// Random formulas respect the level fragments.
    #[test]
    fn sampled_formulas_stay_in_level() {
        let atoms: Vec<crate::syntax::PropName> = vec!["p".into(), "q".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let fl = random_formula(&mut rng, &atoms, 3, LogicLevel::L);
            assert_eq!(fl.level(), LogicLevel::L);
            let f1 = random_formula(&mut rng, &atoms, 3, LogicLevel::L1);
            assert!(f1.level() <= LogicLevel::L1);
        }
    }
}
