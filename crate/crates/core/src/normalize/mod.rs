//! Reduction of judgement sets to branching normal representations.
//!
//! A judgement is *normal* when it has one of five shapes: tautological
//! (true in every model), inconsistent (false in every model), alethic
//! (a single proposition pinned to value zero or to infinity), finitist
//! (a proposition asserted to take a finite value), or affine (an
//! inequality between nonnegative linear combinations of propositions
//! and constants). [`normalize`] turns an arbitrary finite judgement
//! set into a [`BranchTree`] whose leaves carry normal theories and
//! which is jointly equivalent to the input: a model satisfies the
//! input set exactly when it satisfies the theory of at least one leaf.
//!
//! Tree edges come in two kinds. A rewrite edge replaces one judgement
//! by zero, one, or two judgements with the same joint meaning. A split
//! edge introduces a supplementary pair of theses, one per child; the
//! two children jointly cover all models because every pair used is
//! admissible by case distinction. When proof recording is enabled,
//! every edge carries derivations showing each new judgement provable
//! from the parent set (plus the introduced thesis) and each discarded
//! judgement provable from the child set, so the whole tree replays
//! through the proof checker.

mod engine;
mod evidence;

pub use evidence::split_support;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One as _, Zero as _};

use crate::extval::Rational;
use crate::proofkit::builder::tensor_factors;
use crate::proofkit::Proof;
use crate::semantics::{satisfies, Model};
use crate::syntax::{Formula, Judgement, LogicLevel, PropName};

/// Flatten scaling through every connective and prune units.
///
/// The result contains no `Scale` node except directly on an atom or on
/// the unit constant, and there with a factor other than 0 and 1. The
/// constants `⊤` and `⊥` survive only when the whole formula collapses
/// to one of them. Applying the function twice gives the same result.
pub fn canon_formula(f: &Formula) -> Formula {
    match f {
        Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => f.clone(),
        Formula::Scale(r, body) => scaled(r.clone(), canon_formula(body)),
        Formula::And(a, b) => mk_and(canon_formula(a), canon_formula(b)),
        Formula::Or(a, b) => mk_or(canon_formula(a), canon_formula(b)),
        Formula::Tensor(a, b) => mk_tensor(canon_formula(a), canon_formula(b)),
        Formula::Limp(a, b) => mk_limp(canon_formula(a), canon_formula(b)),
    }
}

/// Scale an already canonical formula by `r`, pushing inward.
fn scaled(r: Rational, g: Formula) -> Formula {
    if r.is_zero() {
        return Formula::Top;
    }
    if r.is_one() {
        return g;
    }
    match g {
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::Scale(s, h) => {
            let rs = r * &s;
            if rs.is_one() {
                *h
            } else {
                Formula::Scale(rs, h)
            }
        }
        Formula::And(a, b) => mk_and(scaled(r.clone(), *a), scaled(r, *b)),
        Formula::Or(a, b) => mk_or(scaled(r.clone(), *a), scaled(r, *b)),
        Formula::Tensor(a, b) => mk_tensor(scaled(r.clone(), *a), scaled(r, *b)),
        Formula::Limp(a, b) => mk_limp(scaled(r.clone(), *a), scaled(r, *b)),
        atom_or_one => Formula::Scale(r, Box::new(atom_or_one)),
    }
}

fn mk_and(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Bot, _) | (_, Formula::Bot) => Formula::Bot,
        (Formula::Top, _) => b,
        (_, Formula::Top) => a,
        _ => Formula::and(a, b),
    }
}

fn mk_or(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
        (Formula::Bot, _) => b,
        (_, Formula::Bot) => a,
        _ => Formula::or(a, b),
    }
}

fn mk_tensor(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Bot, _) | (_, Formula::Bot) => Formula::Bot,
        (Formula::Top, _) => b,
        (_, Formula::Top) => a,
        _ => Formula::tensor(a, b),
    }
}

fn mk_limp(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Bot, _) => Formula::Top,
        (_, Formula::Top) => Formula::Top,
        (Formula::Top, _) => b,
        _ => Formula::limp(a, b),
    }
}

/// The working form of a judgement inside the engine: every formula
/// canonical, the antecedent list flattened into tensor factors, and
/// `⊤` antecedents removed. The consequent keeps its tree shape.
pub fn canonical_work(j: &Judgement) -> Judgement {
    let consequent = canon_formula(&j.consequent);
    let mut antecedents = Vec::new();
    for a in &j.antecedents {
        let ca = canon_formula(a);
        if ca == Formula::Top {
            continue;
        }
        for f in tensor_factors(&ca) {
            antecedents.push(f.clone());
        }
    }
    Judgement::new(antecedents, consequent)
}

/// Which of the two degenerate values an alethic judgement pins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlethicKind {
    /// The proposition takes value 0 (the top of the quantale order).
    Zero,
    /// The proposition takes value infinity (the bottom).
    Infinite,
}

/// An inequality between affine combinations: the sum of the left side
/// (coefficients times propositions, plus a constant) is at least the
/// sum of the right side in the quantale order, i.e. numerically
/// `lhs >= rhs`. Coefficients are positive; constants nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AffineJudgement {
    pub lhs: BTreeMap<PropName, Rational>,
    pub lconst: Rational,
    pub rhs: BTreeMap<PropName, Rational>,
    pub rconst: Rational,
}

/// The five normal shapes a judgement can take.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalJudgement {
    Tautological,
    Inconsistent,
    Alethic { prop: PropName, kind: AlethicKind },
    Finitist { prop: PropName },
    Affine(AffineJudgement),
}

/// What a theory asserts about one proposition's value class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertive {
    Zero,
    Finitist,
    Infinite,
}

fn is_unit_factor(f: &Formula) -> bool {
    matches!(f, Formula::One) || matches!(f, Formula::Scale(_, b) if **b == Formula::One)
}

fn as_nn_atom(f: &Formula) -> Option<&PropName> {
    if let Formula::Limp(inner, bot) = f {
        if **bot == Formula::Bot {
            if let Formula::Limp(p, bot2) = &**inner {
                if **bot2 == Formula::Bot {
                    if let Formula::Atom(name) = &**p {
                        return Some(name);
                    }
                }
            }
        }
    }
    None
}

fn add_affine(
    coeffs: &mut BTreeMap<PropName, Rational>,
    constant: &mut Rational,
    f: &Formula,
) -> Option<()> {
    match f {
        Formula::One => {
            *constant += Rational::one();
            Some(())
        }
        Formula::Atom(p) => {
            *coeffs
                .entry(p.clone())
                .or_insert_with(Rational::zero) += Rational::one();
            Some(())
        }
        Formula::Scale(r, body) => {
            use num_traits::Signed;
            if r.is_negative() {
                return None;
            }
            match &**body {
                Formula::One => {
                    *constant += r.clone();
                    Some(())
                }
                Formula::Atom(p) => {
                    *coeffs.entry(p.clone()).or_insert_with(Rational::zero) += r.clone();
                    Some(())
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Decide whether a judgement already has one of the five normal
/// shapes, and if so which. The judgement is brought into working form
/// first, so e.g. `⊤ ⊢ p` classifies as alethic.
pub fn classify(j: &Judgement) -> Option<NormalJudgement> {
    let w = canonical_work(j);
    if w.consequent == Formula::Top {
        return Some(NormalJudgement::Tautological);
    }
    if w.antecedents.iter().any(|f| *f == Formula::Bot) {
        return Some(NormalJudgement::Tautological);
    }
    if w.consequent == Formula::Bot {
        if w.antecedents.is_empty() || w.antecedents.iter().all(is_unit_factor) {
            return Some(NormalJudgement::Inconsistent);
        }
        if let [Formula::Atom(p)] = &w.antecedents[..] {
            return Some(NormalJudgement::Alethic {
                prop: p.clone(),
                kind: AlethicKind::Infinite,
            });
        }
        return None;
    }
    if w.antecedents.is_empty() {
        if let Formula::Atom(p) = &w.consequent {
            return Some(NormalJudgement::Alethic {
                prop: p.clone(),
                kind: AlethicKind::Zero,
            });
        }
        if let Some(p) = as_nn_atom(&w.consequent) {
            return Some(NormalJudgement::Finitist { prop: p.clone() });
        }
    }
    let mut aff = AffineJudgement::default();
    for f in &w.antecedents {
        add_affine(&mut aff.lhs, &mut aff.lconst, f)?;
    }
    for f in tensor_factors(&w.consequent) {
        add_affine(&mut aff.rhs, &mut aff.rconst, f)?;
    }
    Some(NormalJudgement::Affine(aff))
}

/// Apply knowledge of each proposition's value class to an affine
/// judgement: an infinite proposition on the left makes it vacuous, a
/// zero proposition drops out on either side, and an infinite
/// proposition remaining on the right (with an all-finite left side)
/// makes it unsatisfiable. The context should assign a class to every
/// proposition that occurs; missing entries are treated as finitist.
pub fn simplify_with_assertives(
    aj: &AffineJudgement,
    ctx: &BTreeMap<PropName, Assertive>,
) -> NormalJudgement {
    let class = |p: &PropName| ctx.get(p).copied().unwrap_or(Assertive::Finitist);
    if aj.lhs.keys().any(|p| class(p) == Assertive::Infinite) {
        return NormalJudgement::Tautological;
    }
    if aj.rhs.keys().any(|p| class(p) == Assertive::Infinite) {
        return NormalJudgement::Inconsistent;
    }
    let keep = |side: &BTreeMap<PropName, Rational>| {
        side.iter()
            .filter(|(p, _)| class(p) != Assertive::Zero)
            .map(|(p, r)| (p.clone(), r.clone()))
            .collect::<BTreeMap<_, _>>()
    };
    let out = AffineJudgement {
        lhs: keep(&aj.lhs),
        lconst: aj.lconst.clone(),
        rhs: keep(&aj.rhs),
        rconst: aj.rconst.clone(),
    };
    if out.lhs.is_empty() && out.rhs.is_empty() {
        return if out.lconst >= out.rconst {
            NormalJudgement::Tautological
        } else {
            NormalJudgement::Inconsistent
        };
    }
    NormalJudgement::Affine(out)
}

impl NormalJudgement {
    /// Render back into judgement syntax at the given level. Constant
    /// contributions are rendered with the unit constant, so results
    /// mentioning constants need at least the second level to be
    /// well formed; at the base level affine judgements never carry
    /// constants when they came out of a base-level normalization.
    pub fn as_judgement(&self, level: LogicLevel) -> Judgement {
        match self {
            NormalJudgement::Tautological => Judgement::thesis(Formula::Top),
            NormalJudgement::Inconsistent => Judgement::thesis(Formula::Bot),
            NormalJudgement::Alethic { prop, kind } => match kind {
                AlethicKind::Zero => Judgement::thesis(Formula::atom(prop.clone())),
                AlethicKind::Infinite => {
                    Judgement::entail(Formula::atom(prop.clone()), Formula::Bot)
                }
            },
            NormalJudgement::Finitist { prop } => {
                Judgement::thesis(Formula::not(Formula::not(Formula::atom(prop.clone()))))
            }
            NormalJudgement::Affine(aj) => {
                let ants = render_side(&aj.lhs, &aj.lconst, level);
                let cons_factors = render_side(&aj.rhs, &aj.rconst, level);
                let consequent = cons_factors
                    .into_iter()
                    .rev()
                    .reduce(|acc, f| Formula::tensor(f, acc))
                    .unwrap_or(Formula::Top);
                Judgement::new(ants, consequent)
            }
        }
    }

    /// Truth of this judgement in a model.
    pub fn holds(&self, m: &Model) -> bool {
        satisfies(m, &self.as_judgement(LogicLevel::L1star))
    }

    /// The proposition this judgement constrains to a value class, if
    /// it is an assertive shape.
    pub fn assertive(&self) -> Option<(&PropName, Assertive)> {
        match self {
            NormalJudgement::Alethic {
                prop,
                kind: AlethicKind::Zero,
            } => Some((prop, Assertive::Zero)),
            NormalJudgement::Alethic {
                prop,
                kind: AlethicKind::Infinite,
            } => Some((prop, Assertive::Infinite)),
            NormalJudgement::Finitist { prop } => Some((prop, Assertive::Finitist)),
            _ => None,
        }
    }

    /// All propositions mentioned.
    pub fn props(&self) -> BTreeSet<PropName> {
        match self {
            NormalJudgement::Tautological | NormalJudgement::Inconsistent => BTreeSet::new(),
            NormalJudgement::Alethic { prop, .. } | NormalJudgement::Finitist { prop } => {
                [prop.clone()].into()
            }
            NormalJudgement::Affine(aj) => {
                aj.lhs.keys().chain(aj.rhs.keys()).cloned().collect()
            }
        }
    }
}

fn render_side(
    coeffs: &BTreeMap<PropName, Rational>,
    constant: &Rational,
    level: LogicLevel,
) -> Vec<Formula> {
    use num_traits::ToPrimitive;
    let mut out = Vec::new();
    let render = |r: &Rational, base: Formula, out: &mut Vec<Formula>| {
        if r.is_zero() {
            return;
        }
        if level >= LogicLevel::L1star {
            if r.is_one() {
                out.push(base);
            } else {
                out.push(Formula::scale(r.clone(), base));
            }
            return;
        }
        // below the scaling level, spell integer multiplicity out as
        // repeated factors
        let n = if r.is_integer() {
            r.to_integer().to_usize()
        } else {
            None
        };
        match n {
            Some(k) => {
                for _ in 0..k {
                    out.push(base.clone());
                }
            }
            None => out.push(Formula::scale(r.clone(), base)),
        }
    };
    for (p, r) in coeffs {
        render(r, Formula::atom(p.clone()), &mut out);
    }
    render(constant, Formula::One, &mut out);
    out
}

/// A set of normal judgements, deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NormalTheory {
    pub judgements: BTreeSet<NormalJudgement>,
}

impl NormalTheory {
    pub fn from_iter<I: IntoIterator<Item = NormalJudgement>>(it: I) -> Self {
        NormalTheory {
            judgements: it.into_iter().collect(),
        }
    }

    /// Whether the theory contains the unsatisfiable judgement.
    pub fn is_inconsistent(&self) -> bool {
        self.judgements.contains(&NormalJudgement::Inconsistent)
    }

    /// Truth in a model: every member holds.
    pub fn holds(&self, m: &Model) -> bool {
        self.judgements.iter().all(|nj| nj.holds(m))
    }

    /// The assertive class recorded for each proposition.
    pub fn assertives(&self) -> BTreeMap<PropName, Assertive> {
        let mut out = BTreeMap::new();
        for nj in &self.judgements {
            if let Some((p, a)) = nj.assertive() {
                out.insert(p.clone(), a);
            }
        }
        out
    }

    /// All propositions mentioned anywhere in the theory.
    pub fn props(&self) -> BTreeSet<PropName> {
        self.judgements.iter().flat_map(|nj| nj.props()).collect()
    }

    /// Structural well-formedness. An inconsistent theory passes by
    /// virtue of its marker. Otherwise: a proposition pinned to zero or
    /// infinity may not occur in any other judgement, and when
    /// `require_assertives` is set every occurring proposition must
    /// carry exactly one assertive judgement.
    pub fn check_invariants(&self, require_assertives: bool) -> Result<(), String> {
        if self.is_inconsistent() {
            return Ok(());
        }
        let mut assertive_count: BTreeMap<&PropName, usize> = BTreeMap::new();
        for nj in &self.judgements {
            if let Some((p, _)) = nj.assertive() {
                *assertive_count.entry(p).or_insert(0) += 1;
            }
        }
        for (p, n) in &assertive_count {
            if *n > 1 {
                return Err(format!("proposition {p} has {n} assertive judgements"));
            }
        }
        for nj in &self.judgements {
            if let Some((p, a)) = nj.assertive() {
                if a == Assertive::Finitist {
                    continue;
                }
                for other in &self.judgements {
                    if other == nj {
                        continue;
                    }
                    if other.props().contains(p) {
                        return Err(format!(
                            "proposition {p} is pinned but occurs in {other:?}"
                        ));
                    }
                }
            }
        }
        if require_assertives {
            let assertives = self.assertives();
            for p in self.props() {
                if !assertives.contains_key(&p) {
                    return Err(format!("proposition {p} has no assertive judgement"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for NormalJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_judgement(LogicLevel::L1star))
    }
}

impl fmt::Display for NormalTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, nj) in self.judgements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{nj}")?;
        }
        write!(f, "}}")
    }
}

/// Node index inside a [`BranchTree`]; the root is 0.
pub type NodeId = usize;

/// One edge of the tree: the rule applied, the set judgements whose
/// presence licensed it, and, when recording is on, derivations both
/// ways across the edge.
#[derive(Clone, Debug)]
pub struct Edge {
    pub rule: &'static str,
    pub uses: Vec<Judgement>,
    pub proofs: Option<EdgeProofs>,
}

/// Derivations across an edge: `forward` proves each judgement present
/// in the child but not the parent (from the parent set, plus the
/// introduced thesis on split edges); `backward` proves each judgement
/// present in the parent but not the child (from the child set).
#[derive(Clone, Debug)]
pub struct EdgeProofs {
    pub forward: Vec<(Judgement, Proof)>,
    pub backward: Vec<(Judgement, Proof)>,
}

#[derive(Clone, Debug)]
pub enum NodeKind {
    /// A fully reduced set.
    Leaf(NormalTheory),
    /// A meaning-preserving rewrite of one judgement.
    Rewrite { edge: Edge, child: NodeId },
    /// A case split on a supplementary pair of theses. `pair.0` is
    /// assumed in the left child, `pair.1` in the right.
    Split {
        pair: (Judgement, Judgement),
        left: Edge,
        right: Edge,
        children: (NodeId, NodeId),
    },
}

#[derive(Clone, Debug)]
pub struct Node {
    /// The judgement set at this node, in working form.
    pub judgements: Vec<Judgement>,
    pub kind: NodeKind,
}

/// The full reduction tree produced by [`normalize`].
#[derive(Clone, Debug)]
pub struct BranchTree {
    pub nodes: Vec<Node>,
    pub level: LogicLevel,
}

impl BranchTree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Every leaf theory, inconsistent ones included, in tree order.
    pub fn leaves(&self) -> Vec<&NormalTheory> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match &self.nodes[id].kind {
                NodeKind::Leaf(t) => out.push(t),
                NodeKind::Rewrite { child, .. } => stack.push(*child),
                NodeKind::Split { children, .. } => {
                    stack.push(children.1);
                    stack.push(children.0);
                }
            }
        }
        out
    }

    /// Leaf theories that are not marked inconsistent.
    pub fn satisfiable_leaves(&self) -> Vec<&NormalTheory> {
        self.leaves()
            .into_iter()
            .filter(|t| !t.is_inconsistent())
            .collect()
    }

    /// The judgement sets of all nodes, useful for asserting that a
    /// particular intermediate stage appears.
    pub fn node_sets(&self) -> Vec<&[Judgement]> {
        self.nodes.iter().map(|n| n.judgements.as_slice()).collect()
    }
}

/// Knobs for [`normalize`].
#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    /// Logic level the input must fit in and the evidence is checked
    /// at. Below the scaling level the input must be scale-free;
    /// numerals have to be spelled as repeated unit factors.
    pub level: LogicLevel,
    /// Record derivations on every edge.
    pub record_proofs: bool,
    /// Keep splitting until every proposition in every leaf carries an
    /// assertive judgement. Disabling this stops at the first set whose
    /// judgements are all normal, which is the shape intermediate
    /// presentations use.
    pub saturate: bool,
    /// Abort after this many engine steps.
    pub max_steps: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            level: LogicLevel::L1star,
            record_proofs: true,
            saturate: true,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("input exceeds the requested logic level: {0}")]
    LevelExceeded(String),
    #[error("step budget exhausted before the set was reduced")]
    BudgetExhausted,
    #[error("evidence construction failed: {0}")]
    Evidence(String),
}

/// Reduce a judgement set to a branching normal representation.
pub fn normalize(
    judgements: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<BranchTree, NormalizeError> {
    for j in judgements {
        if j.level() > opts.level {
            return Err(NormalizeError::LevelExceeded(format!(
                "judgement `{j}` does not fit in {:?}",
                opts.level
            )));
        }
        if opts.level < LogicLevel::L1star && judgement_has_scale(j) {
            return Err(NormalizeError::LevelExceeded(format!(
                "judgement `{j}` uses scaling; below the scaling level numerals \
                 must be written as repeated unit factors"
            )));
        }
        if judgement_has_negative_scale(j) {
            return Err(NormalizeError::Evidence(format!(
                "judgement `{j}` carries a negative scalar"
            )));
        }
    }
    engine::run(judgements, opts)
}

fn formula_has_scale(f: &Formula) -> bool {
    match f {
        Formula::Scale(..) => true,
        Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) | Formula::Limp(a, b) => {
            formula_has_scale(a) || formula_has_scale(b)
        }
    }
}

fn judgement_has_scale(j: &Judgement) -> bool {
    j.antecedents.iter().any(formula_has_scale) || formula_has_scale(&j.consequent)
}

fn formula_has_negative_scale(f: &Formula) -> bool {
    use num_traits::Signed;
    match f {
        Formula::Scale(r, b) => r.is_negative() || formula_has_negative_scale(b),
        Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) | Formula::Limp(a, b) => {
            formula_has_negative_scale(a) || formula_has_negative_scale(b)
        }
    }
}

fn judgement_has_negative_scale(j: &Judgement) -> bool {
    j.antecedents.iter().any(formula_has_negative_scale)
        || formula_has_negative_scale(&j.consequent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extval::{rat, rat_int, ExtValue};
    use crate::semantics::{eval, sample_model_with, SampleProfile};
    use crate::syntax::{parse_formula, parse_judgement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn j(s: &str) -> Judgement {
        parse_judgement(s).unwrap()
    }

    #[test]
    fn flatten_pushes_scaling_through_tensor() {
        assert_eq!(canon_formula(&f("2*(p (x) q)")), f("2*p (x) 2*q"));
    }

    #[test]
    fn flatten_composes_scalars() {
        assert_eq!(canon_formula(&f("2*(3*p)")), f("6*p"));
    }

    #[test]
    fn flatten_kills_zero_scaling() {
        assert_eq!(canon_formula(&f("0*(p -o q)")), Formula::Top);
    }

    #[test]
    fn flatten_prunes_units() {
        assert_eq!(canon_formula(&f("p (x) top")), f("p"));
        assert_eq!(canon_formula(&f("p (x) bot")), Formula::Bot);
        assert_eq!(canon_formula(&f("p /\\ top")), f("p"));
        assert_eq!(canon_formula(&f("p \\/ bot")), f("p"));
        assert_eq!(canon_formula(&f("bot -o p")), Formula::Top);
        assert_eq!(canon_formula(&f("top -o p")), f("p"));
        assert_eq!(canon_formula(&f("1*p")), f("p"));
    }

    #[test]
    fn flatten_is_idempotent_and_value_preserving() {
        let atoms: Vec<String> = vec!["p".into(), "q".into(), "r".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1a7);
        for _ in 0..400 {
            let formula = crate::proofkit::sampling::random_formula(
                &mut rng,
                &atoms,
                4,
                LogicLevel::L1star,
            );
            let canon = canon_formula(&formula);
            assert_eq!(canon_formula(&canon), canon, "not idempotent on {formula}");
            for seed in 0..6u64 {
                let mut mrng = ChaCha8Rng::seed_from_u64(seed * 77 + 5);
                let m = sample_model_with(
                    &mut mrng,
                    &["p".to_string(), "q".to_string(), "r".to_string()],
                    SampleProfile::Mixed,
                );
                assert_eq!(
                    eval(&m, &formula),
                    eval(&m, &canon),
                    "value changed for {formula} vs {canon}"
                );
            }
        }
    }

    #[test]
    fn canonical_scale_placement() {
        let atoms: Vec<String> = vec!["p".into(), "q".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
        fn scale_ok(f: &Formula) -> bool {
            match f {
                Formula::Scale(r, b) => {
                    matches!(**b, Formula::Atom(_) | Formula::One)
                        && !num_traits::Zero::is_zero(r)
                        && !num_traits::One::is_one(r)
                }
                Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => true,
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Tensor(a, b)
                | Formula::Limp(a, b) => scale_ok(a) && scale_ok(b),
            }
        }
        fn no_inner_unit(f: &Formula) -> bool {
            match f {
                Formula::Top | Formula::Bot => true,
                _ => no_unit_rec(f),
            }
        }
        fn no_unit_rec(f: &Formula) -> bool {
            match f {
                Formula::Top | Formula::Bot => false,
                Formula::One | Formula::Atom(_) => true,
                Formula::Scale(_, b) => no_unit_rec(b),
                // a negation keeps its `bot` tail; nothing else may
                Formula::Limp(a, b) => {
                    no_unit_rec(a) && (**b == Formula::Bot || no_unit_rec(b))
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) => {
                    no_unit_rec(a) && no_unit_rec(b)
                }
            }
        }
        for _ in 0..400 {
            let formula = crate::proofkit::sampling::random_formula(
                &mut rng,
                &atoms,
                4,
                LogicLevel::L1star,
            );
            let canon = canon_formula(&formula);
            assert!(scale_ok(&canon), "bad scale placement in {canon}");
            assert!(no_inner_unit(&canon), "unit constant survives in {canon}");
        }
    }

    #[test]
    fn classify_alethic_zero_through_canonical_form() {
        assert_eq!(
            classify(&j("top |- p")),
            Some(NormalJudgement::Alethic {
                prop: "p".into(),
                kind: AlethicKind::Zero
            })
        );
    }

    #[test]
    fn classify_affine_example() {
        let got = classify(&j("2*p (x) 1*1 |- 3*q (x) 0*1")).unwrap();
        let want = NormalJudgement::Affine(AffineJudgement {
            lhs: [("p".to_string(), rat_int(2))].into(),
            lconst: rat_int(1),
            rhs: [("q".to_string(), rat_int(3))].into(),
            rconst: rat_int(0),
        });
        assert_eq!(got, want);
    }

    #[test]
    fn classify_rejects_disjunctive_consequent() {
        assert_eq!(classify(&j("theta |- (phi \\/ psi) (x) rho")), None);
    }

    #[test]
    fn classify_more_shapes() {
        assert_eq!(
            classify(&j("p |- bot")),
            Some(NormalJudgement::Alethic {
                prop: "p".into(),
                kind: AlethicKind::Infinite
            })
        );
        assert_eq!(
            classify(&j("|- ((p -o bot) -o bot)")),
            Some(NormalJudgement::Finitist { prop: "p".into() })
        );
        assert_eq!(classify(&j("|- bot")), Some(NormalJudgement::Inconsistent));
        assert_eq!(
            classify(&j("1 (x) 2*1 |- bot")),
            Some(NormalJudgement::Inconsistent)
        );
        assert_eq!(classify(&j("p |- top")), Some(NormalJudgement::Tautological));
        assert_eq!(classify(&j("bot |- p")), Some(NormalJudgement::Tautological));
    }

    #[test]
    fn classification_matches_model_truth() {
        // independent oracle: whenever classify succeeds, the rendered
        // normal judgement and the original must agree in every model
        let atoms: Vec<String> = vec!["p".into(), "q".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(0xc1a5);
        let mut classified = 0usize;
        for _ in 0..600 {
            let ants = crate::proofkit::sampling::random_context(
                &mut rng,
                &atoms,
                2,
                LogicLevel::L1star,
                2,
            );
            let cons = crate::proofkit::sampling::random_formula(
                &mut rng,
                &atoms,
                2,
                LogicLevel::L1star,
            );
            let judgement = Judgement::new(ants, cons);
            if judgement_has_negative_scale(&judgement) {
                continue;
            }
            let Some(nj) = classify(&judgement) else {
                continue;
            };
            classified += 1;
            let rendered = nj.as_judgement(LogicLevel::L1star);
            for seed in 0..8u64 {
                let mut mrng = ChaCha8Rng::seed_from_u64(seed * 131 + 1);
                let m = sample_model_with(
                    &mut mrng,
                    &["p".to_string(), "q".to_string()],
                    SampleProfile::Mixed,
                );
                assert_eq!(
                    satisfies(&m, &judgement),
                    satisfies(&m, &rendered),
                    "classification changed meaning of {judgement} -> {rendered}"
                );
            }
        }
        assert!(classified > 100, "sampler produced too few classifiable sets");
    }

    #[test]
    fn simplify_with_assertives_spec_cases() {
        let aff = |s: &str| match classify(&j(s)) {
            Some(NormalJudgement::Affine(a)) => a,
            other => panic!("expected affine, got {other:?}"),
        };
        let ctx1: BTreeMap<PropName, Assertive> =
            [("p".to_string(), Assertive::Infinite), ("q".to_string(), Assertive::Finitist)]
                .into();
        assert_eq!(
            simplify_with_assertives(&aff("2*p |- q"), &ctx1),
            NormalJudgement::Tautological
        );
        let ctx2: BTreeMap<PropName, Assertive> =
            [("p".to_string(), Assertive::Finitist), ("q".to_string(), Assertive::Infinite)]
                .into();
        assert_eq!(
            simplify_with_assertives(&aff("p |- q"), &ctx2),
            NormalJudgement::Inconsistent
        );
        let ctx3: BTreeMap<PropName, Assertive> = [
            ("p".to_string(), Assertive::Finitist),
            ("q".to_string(), Assertive::Finitist),
            ("r".to_string(), Assertive::Zero),
        ]
        .into();
        assert_eq!(
            simplify_with_assertives(&aff("p (x) r |- q"), &ctx3),
            NormalJudgement::Affine(AffineJudgement {
                lhs: [("p".to_string(), rat_int(1))].into(),
                lconst: rat_int(0),
                rhs: [("q".to_string(), rat_int(1))].into(),
                rconst: rat_int(0),
            })
        );
    }

    #[test]
    fn normal_judgement_truth_values() {
        let m = Model::from_pairs([
            ("p", ExtValue::zero()),
            ("q", ExtValue::finite(rat(3, 2))),
            ("r", ExtValue::Infinity),
        ]);
        assert!(NormalJudgement::Tautological.holds(&m));
        assert!(!NormalJudgement::Inconsistent.holds(&m));
        assert!(NormalJudgement::Alethic { prop: "p".into(), kind: AlethicKind::Zero }.holds(&m));
        assert!(!NormalJudgement::Alethic { prop: "q".into(), kind: AlethicKind::Zero }.holds(&m));
        assert!(
            NormalJudgement::Alethic { prop: "r".into(), kind: AlethicKind::Infinite }.holds(&m)
        );
        assert!(NormalJudgement::Finitist { prop: "q".into() }.holds(&m));
        assert!(!NormalJudgement::Finitist { prop: "r".into() }.holds(&m));
        // 2q >= 3 holds exactly, 2q >= 4 does not
        let two_q_vs = |c: i64| {
            NormalJudgement::Affine(AffineJudgement {
                lhs: [("q".to_string(), rat_int(2))].into(),
                lconst: rat_int(0),
                rhs: BTreeMap::new(),
                rconst: rat_int(c),
            })
        };
        assert!(two_q_vs(3).holds(&m));
        assert!(!two_q_vs(4).holds(&m));
    }

    #[test]
    fn theory_invariants() {
        let ok = NormalTheory::from_iter([
            NormalJudgement::Finitist { prop: "p".into() },
            NormalJudgement::Alethic { prop: "q".into(), kind: AlethicKind::Infinite },
        ]);
        ok.check_invariants(true).unwrap();
        let pinned_and_used = NormalTheory::from_iter([
            NormalJudgement::Alethic { prop: "p".into(), kind: AlethicKind::Infinite },
            NormalJudgement::Affine(AffineJudgement {
                lhs: [("p".to_string(), rat_int(1))].into(),
                lconst: rat_int(0),
                rhs: BTreeMap::new(),
                rconst: rat_int(1),
            }),
        ]);
        assert!(pinned_and_used.check_invariants(false).is_err());
        let missing_assertive = NormalTheory::from_iter([NormalJudgement::Affine(
            AffineJudgement {
                lhs: [("p".to_string(), rat_int(1))].into(),
                lconst: rat_int(0),
                rhs: BTreeMap::new(),
                rconst: rat_int(0),
            },
        )]);
        assert!(missing_assertive.check_invariants(true).is_err());
        missing_assertive.check_invariants(false).unwrap();
    }

    #[test]
    fn level_preconditions() {
        let opts = NormalizeOptions {
            level: LogicLevel::L1,
            record_proofs: false,
            ..Default::default()
        };
        let scaled = vec![j("2*p |- q")];
        assert!(matches!(
            normalize(&scaled, &opts),
            Err(NormalizeError::LevelExceeded(_))
        ));
        let unit_scaled = vec![j("2*1 |- q")];
        assert!(matches!(
            normalize(&unit_scaled, &opts),
            Err(NormalizeError::LevelExceeded(_))
        ));
        let repeated = vec![j("1 (x) 1 |- q")];
        normalize(&repeated, &opts).unwrap();
    }
}
