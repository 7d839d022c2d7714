//! Derivations that replay engine rewrites inside the proof kit.
//!
//! Every edge of a branch tree either rewrites one judgement or splits on
//! a supplementary pair. The functions here produce, for each judgement a
//! child set gains, a proof from the parent set (plus the branch axiom on
//! split edges), and for each judgement a parent set loses, a proof from
//! the child set. The engine stores them in [`super::EdgeProofs`].
//!
//! The justification enums mirror the shape of the formula they talk
//! about, so a proof construction can recurse over formula and
//! justification in lockstep and pick up set judgements exactly where the
//! engine consulted them.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One as _, Zero as _};

use crate::extval::Rational;
use crate::proofkit::builder::tensor_factors;
use crate::proofkit::{BinConn, BuildError, Instantiation, Proof, ProofBuilder, RuleId};
use crate::syntax::{Formula, Judgement, PropName};

use super::{canon_formula, canonical_work, mk_and, mk_or};

fn err(reason: String) -> BuildError {
    BuildError::Shape { tactic: "edge-evidence", reason }
}

fn ensure(b: &ProofBuilder, idx: usize, want: &Judgement) -> Result<usize, BuildError> {
    if b.judgement(idx) == want {
        Ok(idx)
    } else {
        Err(err(format!("built `{}`, expected `{}`", b.judgement(idx), want)))
    }
}

/// Run a construction against fixed assumptions and package the proof.
fn build_one(
    assumptions: &[Judgement],
    want: &Judgement,
    steps: impl FnOnce(&mut ProofBuilder) -> Result<usize, BuildError>,
) -> Result<(Judgement, Proof), BuildError> {
    let mut b = ProofBuilder::new(assumptions.to_vec());
    let idx = steps(&mut b)?;
    ensure(&b, idx, want)?;
    Ok((want.clone(), b.into_proof_of(idx)))
}

// -- formula shape utilities ---------------------------------------------

fn factor_count(f: &Formula) -> usize {
    match f {
        Formula::Tensor(a, b) => factor_count(a) + factor_count(b),
        _ => 1,
    }
}

pub(super) fn factor_at(c: &Formula, pos: usize) -> &Formula {
    tensor_factors(c)[pos]
}

/// Substitute a whole subtree for the `pos`-th tensor factor.
pub(super) fn replace_factor(c: &Formula, pos: usize, new: &Formula) -> Formula {
    match c {
        Formula::Tensor(a, b) => {
            let k = factor_count(a);
            if pos < k {
                Formula::tensor(replace_factor(a, pos, new), (**b).clone())
            } else {
                Formula::tensor((**a).clone(), replace_factor(b, pos - k, new))
            }
        }
        _ => new.clone(),
    }
}

/// Drop the listed tensor factors, keeping the tree shape of the rest.
/// Removing every factor leaves `⊤`.
pub(super) fn remove_factors(c: &Formula, rm: &BTreeSet<usize>) -> Formula {
    fn go(c: &Formula, base: usize, rm: &BTreeSet<usize>) -> Option<Formula> {
        match c {
            Formula::Tensor(a, b) => {
                let k = factor_count(a);
                match (go(a, base, rm), go(b, base + k, rm)) {
                    (None, None) => None,
                    (Some(x), None) => Some(x),
                    (None, Some(y)) => Some(y),
                    (Some(x), Some(y)) => Some(Formula::tensor(x, y)),
                }
            }
            _ => {
                if rm.contains(&base) {
                    None
                } else {
                    Some(c.clone())
                }
            }
        }
    }
    go(c, 0, rm).unwrap_or(Formula::Top)
}

/// Left/right turns from the root of the tensor tree to the `pos`-th
/// factor. `false` is left.
pub(super) fn factor_path(c: &Formula, pos: usize) -> Vec<bool> {
    let mut out = Vec::new();
    let mut cur = c;
    let mut p = pos;
    while let Formula::Tensor(a, b) = cur {
        let k = factor_count(a);
        if p < k {
            out.push(false);
            cur = a;
        } else {
            out.push(true);
            cur = b;
            p -= k;
        }
    }
    out
}

fn right_nested(fs: &[Formula]) -> Formula {
    let mut it = fs.iter().rev();
    let mut acc = it.next().expect("factor list is never empty").clone();
    for f in it {
        acc = Formula::tensor(f.clone(), acc);
    }
    acc
}

/// Peel every outer negation.
pub(super) fn strip_negs(mut f: &Formula) -> &Formula {
    while let Formula::Limp(x, y) = f {
        if **y == Formula::Bot {
            f = x;
        } else {
            break;
        }
    }
    f
}

/// A formula whose value is `0` exactly when `f` is finite and `∞`
/// otherwise. Used as the set form of a finiteness axiom: it decomposes
/// under the ordinary rewrite rules into per-atom assertions.
pub(super) fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::One => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::Atom(_) => Formula::not(Formula::not(f.clone())),
        Formula::Scale(r, g) => {
            if r.is_zero() {
                Formula::Top
            } else {
                nnf(g)
            }
        }
        Formula::Tensor(a, b) | Formula::And(a, b) => mk_and(nnf(a), nnf(b)),
        Formula::Or(a, b) => mk_or(nnf(a), nnf(b)),
        Formula::Limp(x, y) => mk_or(nnf(y), Formula::not((**x).clone())),
    }
}

/// The judgements a branch axiom contributes to its child set.
pub fn split_support(axiom: &Judgement) -> Vec<Judgement> {
    let Formula::Limp(x, y) = &axiom.consequent else {
        return Vec::new();
    };
    if **y == Formula::Bot {
        if let Formula::Limp(g, gb) = &**x {
            if **gb == Formula::Bot {
                // a finiteness axiom `|- !!g`
                let n = nnf(g);
                if n == Formula::Top {
                    return Vec::new();
                }
                return vec![canonical_work(&Judgement::thesis(n))];
            }
        }
    }
    vec![canonical_work(&Judgement::new(vec![(**x).clone()], (**y).clone()))]
}

// -- value-class lookups ---------------------------------------------------

/// Why a formula is known to take the value `∞` in every model of the
/// fact set.
#[derive(Clone, Debug)]
pub(super) enum InfJust {
    Bot,
    Fact(Judgement),
    Scale(Box<InfJust>),
    TensorL(Box<InfJust>),
    TensorR(Box<InfJust>),
    AndL(Box<InfJust>),
    AndR(Box<InfJust>),
    OrBoth(Box<InfJust>, Box<InfJust>),
    Imp(Box<InfJust>, Box<FinJust>),
}

/// Why a formula is known to take a finite value in every model of the
/// fact set.
#[derive(Clone, Debug)]
pub(super) enum FinJust {
    Unit,
    Fact(Judgement),
    Zero(Judgement),
    Scale(Box<FinJust>),
    Tensor(Box<FinJust>, Box<FinJust>),
    Both(Box<FinJust>, Box<FinJust>),
    OrL(Box<FinJust>),
    OrR(Box<FinJust>),
    ImpCons(Box<FinJust>),
    ImpAnt(Box<InfJust>),
}

impl InfJust {
    pub(super) fn uses(&self, out: &mut Vec<Judgement>) {
        match self {
            InfJust::Bot => {}
            InfJust::Fact(j) => out.push(j.clone()),
            InfJust::Scale(s)
            | InfJust::TensorL(s)
            | InfJust::TensorR(s)
            | InfJust::AndL(s)
            | InfJust::AndR(s) => s.uses(out),
            InfJust::OrBoth(a, b) => {
                a.uses(out);
                b.uses(out);
            }
            InfJust::Imp(a, b) => {
                a.uses(out);
                b.uses(out);
            }
        }
    }
}

impl FinJust {
    pub(super) fn uses(&self, out: &mut Vec<Judgement>) {
        match self {
            FinJust::Unit => {}
            FinJust::Fact(j) | FinJust::Zero(j) => out.push(j.clone()),
            FinJust::Scale(s) | FinJust::OrL(s) | FinJust::OrR(s) | FinJust::ImpCons(s) => {
                s.uses(out)
            }
            FinJust::Tensor(a, b) | FinJust::Both(a, b) => {
                a.uses(out);
                b.uses(out);
            }
            FinJust::ImpAnt(s) => s.uses(out),
        }
    }
}

pub(super) fn known_infinite(f: &Formula, facts: &[Judgement]) -> Option<InfJust> {
    if *f == Formula::Bot {
        return Some(InfJust::Bot);
    }
    let key = canonical_work(&Judgement::new(vec![f.clone()], Formula::Bot));
    if facts.contains(&key) {
        return Some(InfJust::Fact(key));
    }
    match f {
        Formula::Scale(r, g) if !r.is_zero() => {
            known_infinite(g, facts).map(|s| InfJust::Scale(Box::new(s)))
        }
        Formula::Tensor(a, b) => known_infinite(a, facts)
            .map(|s| InfJust::TensorL(Box::new(s)))
            .or_else(|| known_infinite(b, facts).map(|s| InfJust::TensorR(Box::new(s)))),
        Formula::And(a, b) => known_infinite(a, facts)
            .map(|s| InfJust::AndL(Box::new(s)))
            .or_else(|| known_infinite(b, facts).map(|s| InfJust::AndR(Box::new(s)))),
        Formula::Or(a, b) => {
            let sa = known_infinite(a, facts)?;
            let sb = known_infinite(b, facts)?;
            Some(InfJust::OrBoth(Box::new(sa), Box::new(sb)))
        }
        Formula::Limp(x, y) => {
            let sy = known_infinite(y, facts)?;
            let sx = known_finite(x, facts)?;
            Some(InfJust::Imp(Box::new(sy), Box::new(sx)))
        }
        _ => None,
    }
}

pub(super) fn known_finite(f: &Formula, facts: &[Judgement]) -> Option<FinJust> {
    match f {
        Formula::Top | Formula::One => return Some(FinJust::Unit),
        Formula::Scale(r, _) if r.is_zero() => return Some(FinJust::Unit),
        Formula::Scale(_, h) if **h == Formula::One => return Some(FinJust::Unit),
        _ => {}
    }
    let key = Judgement::thesis(Formula::not(Formula::not(f.clone())));
    if facts.contains(&key) {
        return Some(FinJust::Fact(key));
    }
    if matches!(f, Formula::Atom(_)) {
        let zero = Judgement::thesis(f.clone());
        if facts.contains(&zero) {
            return Some(FinJust::Zero(zero));
        }
    }
    match f {
        Formula::Scale(_, g) => known_finite(g, facts).map(|s| FinJust::Scale(Box::new(s))),
        Formula::Tensor(a, b) => {
            let sa = known_finite(a, facts)?;
            let sb = known_finite(b, facts)?;
            Some(FinJust::Tensor(Box::new(sa), Box::new(sb)))
        }
        Formula::And(a, b) => {
            let sa = known_finite(a, facts)?;
            let sb = known_finite(b, facts)?;
            Some(FinJust::Both(Box::new(sa), Box::new(sb)))
        }
        Formula::Or(a, b) => known_finite(a, facts)
            .map(|s| FinJust::OrL(Box::new(s)))
            .or_else(|| known_finite(b, facts).map(|s| FinJust::OrR(Box::new(s)))),
        Formula::Limp(x, y) => known_finite(y, facts)
            .map(|s| FinJust::ImpCons(Box::new(s)))
            .or_else(|| known_infinite(x, facts).map(|s| FinJust::ImpAnt(Box::new(s)))),
        _ => None,
    }
}

// -- fact derivation ---------------------------------------------------------

/// How a wanted judgement follows from the fact set. Leaves cite set
/// members; the inner shapes are the invertible decompositions, each of
/// which strictly shrinks the goal, so the search terminates on its own
/// and the fuel only bounds backtracking.
enum Recipe {
    Member,
    ValidTop,
    ValidMatch,
    AntInf { pos: usize, just: InfJust },
    ExFalso(Box<Recipe>),
    Curry(Box<Recipe>),
    Weaken { pos: usize, sub: Box<Recipe> },
    AntOr { pos: usize, left: Box<Recipe>, right: Box<Recipe> },
    AntAnd { pos: usize, keep_left: bool, sub: Box<Recipe> },
    ConsOr { pos: usize, keep_left: bool, sub: Box<Recipe> },
    ConsAnd { pos: usize, left: Box<Recipe>, right: Box<Recipe> },
    ConsSplit { pos: usize, thesis: Box<Recipe>, rest: Box<Recipe> },
}

/// A judgement that holds in every model of the fact set, together with
/// the members it rests on and, when requested, a proof from them.
#[derive(Clone, Debug)]
pub(super) struct FactProof {
    pub(super) fact: Judgement,
    pub(super) members: Vec<Judgement>,
    pub(super) proof: Option<Proof>,
}

impl FactProof {
    /// Bring the fact into a builder whose assumptions cover the members.
    pub(super) fn emit(&self, b: &mut ProofBuilder) -> Result<usize, BuildError> {
        match &self.proof {
            Some(p) => b.append_proof(p),
            None => b.hyp(&self.fact),
        }
    }
}

/// Search for a derivation of `want` from `facts`; `want` must be in
/// canonical working form. Membership is checked first, then trivial
/// validity, an infinite antecedent, and the decompositions. A proof is
/// assembled only when `record` is set; the search itself builds nothing.
pub(super) fn derive_fact(
    facts: &[Judgement],
    want: &Judgement,
    record: bool,
) -> Result<Option<FactProof>, BuildError> {
    let mut failed = BTreeSet::new();
    let mut fuel: u32 = 192;
    let Some(recipe) = search_fact(facts, want, &mut failed, &mut fuel) else {
        return Ok(None);
    };
    let mut members = Vec::new();
    collect_members(want, &recipe, &mut members);
    let proof = if record && !matches!(recipe, Recipe::Member) {
        let mut b = ProofBuilder::new(facts.to_vec());
        let idx = emit_recipe(&mut b, want, &recipe)?;
        ensure(&b, idx, want)?;
        Some(b.into_proof_of(idx))
    } else {
        None
    };
    Ok(Some(FactProof { fact: want.clone(), members, proof }))
}

fn splice_ant(j: &Judgement, pos: usize, side: &Formula) -> Judgement {
    let mut ants = j.antecedents.clone();
    ants.splice(pos..pos + 1, tensor_factors(side).into_iter().cloned());
    Judgement::new(ants, j.consequent.clone())
}

fn swap_cons_factor(j: &Judgement, pos: usize, side: &Formula) -> Judgement {
    Judgement::new(j.antecedents.clone(), replace_factor(&j.consequent, pos, side))
}

fn drop_ant(j: &Judgement, pos: usize) -> Judgement {
    let mut ants = j.antecedents.clone();
    ants.remove(pos);
    Judgement::new(ants, j.consequent.clone())
}

fn drop_cons_factor(j: &Judgement, pos: usize) -> Judgement {
    let rm = BTreeSet::from([pos]);
    Judgement::new(j.antecedents.clone(), remove_factors(&j.consequent, &rm))
}

fn curry_child(j: &Judgement, ant: &Formula, cons: &Formula) -> Judgement {
    let mut ants = j.antecedents.clone();
    ants.extend(tensor_factors(ant).into_iter().cloned());
    Judgement::new(ants, cons.clone())
}

/// Match each consequent factor to a distinct equal antecedent. Returns
/// the antecedent index per factor.
fn embed_map(j: &Judgement) -> Option<Vec<usize>> {
    let facs = tensor_factors(&j.consequent);
    let mut used = vec![false; j.antecedents.len()];
    let mut map = Vec::with_capacity(facs.len());
    for f in facs {
        let slot = (0..j.antecedents.len()).find(|&i| !used[i] && j.antecedents[i] == *f)?;
        used[slot] = true;
        map.push(slot);
    }
    Some(map)
}

fn search_fact(
    facts: &[Judgement],
    want: &Judgement,
    failed: &mut BTreeSet<Judgement>,
    fuel: &mut u32,
) -> Option<Recipe> {
    if *fuel == 0 || failed.contains(want) {
        return None;
    }
    *fuel -= 1;
    if facts.contains(want) {
        return Some(Recipe::Member);
    }
    if want.consequent == Formula::Top {
        return Some(Recipe::ValidTop);
    }
    if embed_map(want).is_some() {
        return Some(Recipe::ValidMatch);
    }
    for (pos, f) in want.antecedents.iter().enumerate() {
        if let Some(just) = known_infinite(f, facts) {
            return Some(Recipe::AntInf { pos, just });
        }
    }
    if let Formula::Limp(a, t) = &want.consequent {
        let sub = curry_child(want, a, t);
        if let Some(s) = search_fact(facts, &sub, failed, fuel) {
            return Some(Recipe::Curry(Box::new(s)));
        }
    }
    for pos in 0..want.antecedents.len() {
        match want.antecedents[pos].clone() {
            Formula::Or(l, r) => {
                let found = search_fact(facts, &splice_ant(want, pos, &l), failed, fuel)
                    .and_then(|rl| {
                        search_fact(facts, &splice_ant(want, pos, &r), failed, fuel)
                            .map(|rr| (rl, rr))
                    });
                if let Some((rl, rr)) = found {
                    return Some(Recipe::AntOr {
                        pos,
                        left: Box::new(rl),
                        right: Box::new(rr),
                    });
                }
            }
            Formula::And(l, r) => {
                if let Some(s) = search_fact(facts, &splice_ant(want, pos, &l), failed, fuel) {
                    return Some(Recipe::AntAnd { pos, keep_left: true, sub: Box::new(s) });
                }
                if let Some(s) = search_fact(facts, &splice_ant(want, pos, &r), failed, fuel) {
                    return Some(Recipe::AntAnd { pos, keep_left: false, sub: Box::new(s) });
                }
            }
            _ => {}
        }
    }
    if want.consequent != Formula::Bot {
        let facs: Vec<Formula> =
            tensor_factors(&want.consequent).into_iter().cloned().collect();
        for (pos, f) in facs.iter().enumerate() {
            match f {
                Formula::Or(l, r) => {
                    if let Some(s) =
                        search_fact(facts, &swap_cons_factor(want, pos, l), failed, fuel)
                    {
                        return Some(Recipe::ConsOr { pos, keep_left: true, sub: Box::new(s) });
                    }
                    if let Some(s) =
                        search_fact(facts, &swap_cons_factor(want, pos, r), failed, fuel)
                    {
                        return Some(Recipe::ConsOr { pos, keep_left: false, sub: Box::new(s) });
                    }
                }
                Formula::And(l, r) => {
                    let found = search_fact(facts, &swap_cons_factor(want, pos, l), failed, fuel)
                        .and_then(|rl| {
                            search_fact(facts, &swap_cons_factor(want, pos, r), failed, fuel)
                                .map(|rr| (rl, rr))
                        });
                    if let Some((rl, rr)) = found {
                        return Some(Recipe::ConsAnd {
                            pos,
                            left: Box::new(rl),
                            right: Box::new(rr),
                        });
                    }
                }
                _ => {}
            }
        }
        if facs.len() > 1 {
            for (pos, f) in facs.iter().enumerate() {
                let found =
                    search_fact(facts, &Judgement::thesis(f.clone()), failed, fuel).and_then(
                        |th| {
                            search_fact(facts, &drop_cons_factor(want, pos), failed, fuel)
                                .map(|rest| (th, rest))
                        },
                    );
                if let Some((th, rest)) = found {
                    return Some(Recipe::ConsSplit {
                        pos,
                        thesis: Box::new(th),
                        rest: Box::new(rest),
                    });
                }
            }
        }
        let sub = Judgement::new(want.antecedents.clone(), Formula::Bot);
        if let Some(s) = search_fact(facts, &sub, failed, fuel) {
            return Some(Recipe::ExFalso(Box::new(s)));
        }
    }
    for pos in 0..want.antecedents.len() {
        if let Some(s) = search_fact(facts, &drop_ant(want, pos), failed, fuel) {
            return Some(Recipe::Weaken { pos, sub: Box::new(s) });
        }
    }
    failed.insert(want.clone());
    None
}

fn collect_members(j: &Judgement, r: &Recipe, out: &mut Vec<Judgement>) {
    match r {
        Recipe::Member => out.push(j.clone()),
        Recipe::ValidTop | Recipe::ValidMatch => {}
        Recipe::AntInf { just, .. } => just.uses(out),
        Recipe::ExFalso(sub) => {
            let jb = Judgement::new(j.antecedents.clone(), Formula::Bot);
            collect_members(&jb, sub, out);
        }
        Recipe::Curry(sub) => {
            if let Formula::Limp(a, t) = &j.consequent {
                collect_members(&curry_child(j, a, t), sub, out);
            }
        }
        Recipe::Weaken { pos, sub } => collect_members(&drop_ant(j, *pos), sub, out),
        Recipe::AntOr { pos, left, right } => {
            if let Formula::Or(l, r) = j.antecedents[*pos].clone() {
                collect_members(&splice_ant(j, *pos, &l), left, out);
                collect_members(&splice_ant(j, *pos, &r), right, out);
            }
        }
        Recipe::AntAnd { pos, keep_left, sub } => {
            if let Formula::And(l, r) = j.antecedents[*pos].clone() {
                let kept = if *keep_left { l } else { r };
                collect_members(&splice_ant(j, *pos, &kept), sub, out);
            }
        }
        Recipe::ConsOr { pos, keep_left, sub } => {
            if let Formula::Or(l, r) = factor_at(&j.consequent, *pos).clone() {
                let side = if *keep_left { l } else { r };
                collect_members(&swap_cons_factor(j, *pos, &side), sub, out);
            }
        }
        Recipe::ConsAnd { pos, left, right } => {
            if let Formula::And(l, r) = factor_at(&j.consequent, *pos).clone() {
                collect_members(&swap_cons_factor(j, *pos, &l), left, out);
                collect_members(&swap_cons_factor(j, *pos, &r), right, out);
            }
        }
    }
}

/// Move the factor run of `side` from `pos` to the end of the context
/// and fold it back into `side`.
fn gather_fuse(
    b: &mut ProofBuilder,
    mut idx: usize,
    pos: usize,
    side: &Formula,
) -> Result<usize, BuildError> {
    let k = tensor_factors(side).len();
    let len = b.judgement(idx).antecedents.len();
    for _ in 0..k {
        idx = b.move_antecedent(idx, pos, len - 1)?;
    }
    fuse_run(b, idx, len - k, side)
}

fn emit_recipe(b: &mut ProofBuilder, j: &Judgement, r: &Recipe) -> Result<usize, BuildError> {
    match r {
        Recipe::Member => b.hyp(j),
        Recipe::ValidTop => b.top(&j.antecedents),
        Recipe::ValidMatch => {
            let map = embed_map(j)
                .ok_or_else(|| err(format!("`{j}` stopped embedding into its context")))?;
            let mut idx = b.id(&j.consequent)?;
            idx = b.unfold_fully(idx)?;
            let mut keys = map;
            for tgt in 0..keys.len() {
                let src = (tgt..keys.len())
                    .min_by_key(|&i| keys[i])
                    .expect("the key range is nonempty");
                if src != tgt {
                    idx = b.move_antecedent(idx, src, tgt)?;
                    let k = keys.remove(src);
                    keys.insert(tgt, k);
                }
            }
            weak_to_ctx(b, idx, &j.antecedents)
        }
        Recipe::AntInf { pos, just } => {
            let e = ent_bot(b, &j.antecedents[*pos], just)?;
            let bo = b.bot(&j.consequent)?;
            let i = b.cut(e, bo)?;
            weak_to_ctx(b, i, &j.antecedents)
        }
        Recipe::ExFalso(sub) => {
            let jb = Judgement::new(j.antecedents.clone(), Formula::Bot);
            let i = emit_recipe(b, &jb, sub)?;
            let bo = b.bot(&j.consequent)?;
            b.cut(i, bo)
        }
        Recipe::Curry(sub) => {
            let Formula::Limp(a, t) = &j.consequent else {
                return Err(err(format!("curry arm on non-implication `{}`", j.consequent)));
            };
            let jc = curry_child(j, a, t);
            let i = emit_recipe(b, &jc, sub)?;
            let i = fuse_run(b, i, j.antecedents.len(), a)?;
            curry_out_last(b, i)
        }
        Recipe::Weaken { pos, sub } => {
            let jd = drop_ant(j, *pos);
            let mut i = emit_recipe(b, &jd, sub)?;
            i = b.weak(i, &j.antecedents[*pos])?;
            let last = b.judgement(i).antecedents.len() - 1;
            if last != *pos {
                i = b.move_antecedent(i, last, *pos)?;
            }
            Ok(i)
        }
        Recipe::AntOr { pos, left, right } => {
            let Formula::Or(l, r) = j.antecedents[*pos].clone() else {
                return Err(err("or arm on a non-disjunction antecedent".into()));
            };
            let (l, r) = (*l, *r);
            let il = emit_recipe(b, &splice_ant(j, *pos, &l), left)?;
            let il = gather_fuse(b, il, *pos, &l)?;
            let ir = emit_recipe(b, &splice_ant(j, *pos, &r), right)?;
            let ir = gather_fuse(b, ir, *pos, &r)?;
            let mut gamma = j.antecedents.clone();
            gamma.remove(*pos);
            let o = b.push(
                RuleId::Or1,
                Instantiation {
                    gamma,
                    phi: Some(l),
                    psi: Some(r),
                    theta: Some(j.consequent.clone()),
                    ..Default::default()
                },
                &[il, ir],
            )?;
            let last = b.judgement(o).antecedents.len() - 1;
            if last != *pos {
                b.move_antecedent(o, last, *pos)
            } else {
                Ok(o)
            }
        }
        Recipe::AntAnd { pos, keep_left, sub } => {
            let Formula::And(l, r) = j.antecedents[*pos].clone() else {
                return Err(err("and arm on a non-conjunction antecedent".into()));
            };
            let (l, r) = (*l, *r);
            let kept = if *keep_left { l.clone() } else { r.clone() };
            let i = emit_recipe(b, &splice_ant(j, *pos, &kept), sub)?;
            let i = gather_fuse(b, i, *pos, &kept)?;
            let mut gamma = j.antecedents.clone();
            gamma.remove(*pos);
            let (phi, psi) =
                if *keep_left { (l.clone(), r.clone()) } else { (r.clone(), l.clone()) };
            let mut a = b.push(
                RuleId::And1,
                Instantiation {
                    gamma,
                    phi: Some(phi),
                    psi: Some(psi),
                    theta: Some(j.consequent.clone()),
                    ..Default::default()
                },
                &[i],
            )?;
            let last = b.judgement(a).antecedents.len() - 1;
            if !*keep_left {
                // the rule rebuilt the conjunction as r∧l; swap it back
                let pl = b.proj_left(&l, &r)?;
                let pr = b.proj_right(&l, &r)?;
                let comm = b.push(
                    RuleId::And2,
                    Instantiation {
                        gamma: vec![Formula::and(l.clone(), r.clone())],
                        phi: Some(r),
                        psi: Some(l),
                        ..Default::default()
                    },
                    &[pr, pl],
                )?;
                a = b.replace_antecedent(a, last, comm)?;
            }
            if last != *pos {
                b.move_antecedent(a, last, *pos)
            } else {
                Ok(a)
            }
        }
        Recipe::ConsOr { pos, keep_left, sub } => {
            let Formula::Or(l, r) = factor_at(&j.consequent, *pos).clone() else {
                return Err(err("or arm on a non-disjunction factor".into()));
            };
            let side = if *keep_left { &l } else { &r };
            let jc = swap_cons_factor(j, *pos, side);
            let i = emit_recipe(b, &jc, sub)?;
            let inj = if *keep_left { b.inj_left(&l, &r)? } else { b.inj_right(&l, &r)? };
            let path = factor_path(&j.consequent, *pos);
            let lift = mono_at_path(b, &jc.consequent, &path, inj)?;
            b.cut(i, lift)
        }
        Recipe::ConsAnd { pos, left, right } => {
            let Formula::And(l, r) = factor_at(&j.consequent, *pos).clone() else {
                return Err(err("and arm on a non-conjunction factor".into()));
            };
            let il = emit_recipe(b, &swap_cons_factor(j, *pos, &l), left)?;
            let ir = emit_recipe(b, &swap_cons_factor(j, *pos, &r), right)?;
            cons_and_join(b, j, *pos, il, ir)
        }
    }
}

// -- small tactic combinations ----------------------------------------------

/// Weaken missing antecedents in until the context matches `target`.
/// The current context must be a subsequence of `target`.
fn weak_to_ctx(
    b: &mut ProofBuilder,
    mut idx: usize,
    target: &[Formula],
) -> Result<usize, BuildError> {
    for pos in 0..target.len() {
        let cur = b.judgement(idx).antecedents.get(pos).cloned();
        if cur.as_ref() != Some(&target[pos]) {
            idx = b.weak(idx, &target[pos])?;
            let last = b.judgement(idx).antecedents.len() - 1;
            if last != pos {
                idx = b.move_antecedent(idx, last, pos)?;
            }
        }
    }
    if b.judgement(idx).antecedents.len() != target.len() {
        return Err(err(format!(
            "context `{:?}` does not embed into the target context",
            b.judgement(idx)
        )));
    }
    Ok(idx)
}

/// Fold the run of `shape`'s factors starting at antecedent `pos` back
/// into `shape`.
fn fuse_run(
    b: &mut ProofBuilder,
    mut idx: usize,
    pos: usize,
    shape: &Formula,
) -> Result<usize, BuildError> {
    let fs: Vec<Formula> = tensor_factors(shape).into_iter().cloned().collect();
    let k = fs.len();
    if k == 1 {
        return Ok(idx);
    }
    let len = b.judgement(idx).antecedents.len();
    for _ in 0..k {
        idx = b.move_antecedent(idx, pos, len - 1)?;
    }
    for _ in 0..k - 1 {
        idx = b.fold_last(idx)?;
    }
    let built = right_nested(&fs);
    if built != *shape {
        let rw = b.reassoc(shape, &built)?;
        let last = b.judgement(idx).antecedents.len() - 1;
        idx = b.replace_antecedent(idx, last, rw)?;
    }
    let last = b.judgement(idx).antecedents.len() - 1;
    if last != pos {
        idx = b.move_antecedent(idx, last, pos)?;
    }
    Ok(idx)
}

/// Apply a single-antecedent rewrite under the tensor factor at `path`.
fn mono_at_path(
    b: &mut ProofBuilder,
    c: &Formula,
    path: &[bool],
    lemma: usize,
) -> Result<usize, BuildError> {
    if path.is_empty() {
        return Ok(lemma);
    }
    let Formula::Tensor(l, r) = c else {
        return Err(err(format!("path descends into non-tensor `{c}`")));
    };
    if !path[0] {
        let sub = mono_at_path(b, l, &path[1..], lemma)?;
        let ir = b.id(r)?;
        b.mono_tensor(sub, ir)
    } else {
        let sub = mono_at_path(b, r, &path[1..], lemma)?;
        let il = b.id(l)?;
        b.mono_tensor(il, sub)
    }
}

/// From `Γ, x |- θ` derive `Γ |- x -o θ`.
fn curry_out_last(b: &mut ProofBuilder, idx: usize) -> Result<usize, BuildError> {
    let w = b.weak(idx, &Formula::Top)?;
    let len = b.judgement(w).antecedents.len();
    let m = b.move_antecedent(w, len - 1, len - 2)?;
    let f = b.fold_last(m)?;
    let c = b.curry(f)?;
    let t = b.top(&[])?;
    b.cut(t, c)
}

/// From `|- g` derive `|- r*g`.
fn thesis_scale(b: &mut ProofBuilder, idx: usize, r: &Rational) -> Result<usize, BuildError> {
    if r.is_one() {
        return Ok(idx);
    }
    let g = b.judgement(idx).consequent.clone();
    if r.is_zero() {
        return b.push(RuleId::S5, Instantiation::with_phi(g), &[]);
    }
    let w = b.weak(idx, &Formula::Top)?;
    let s = b.mono_scale(w, r)?;
    let st = b.scaled_top(r)?;
    b.cut(st, s)
}

/// From `|- r*g` (with `r` positive) derive `|- g`.
fn thesis_unscale(b: &mut ProofBuilder, idx: usize, r: &Rational) -> Result<usize, BuildError> {
    if r.is_one() {
        return Ok(idx);
    }
    let Formula::Scale(_, inner) = b.judgement(idx).consequent.clone() else {
        return Err(err("thesis_unscale expects a scaled consequent".into()));
    };
    let w = b.weak(idx, &Formula::scale(r.clone(), Formula::Top))?;
    let u = b.push(
        RuleId::S1Unscale,
        Instantiation {
            phi: Some(Formula::Top),
            psi: Some((*inner).clone()),
            r: Some(r.clone()),
            ..Default::default()
        },
        &[w],
    )?;
    let t = b.top(&[])?;
    b.cut(t, u)
}

/// Derive `[f] |- bot` from the justification.
fn ent_bot(b: &mut ProofBuilder, f: &Formula, just: &InfJust) -> Result<usize, BuildError> {
    match (f, just) {
        (Formula::Bot, InfJust::Bot) => b.id(&Formula::Bot),
        (_, InfJust::Fact(j)) => {
            let h = b.hyp(j)?;
            b.fold_ctx_as(h, f)
        }
        (Formula::Scale(r, g), InfJust::Scale(sub)) => {
            let e = ent_bot(b, g, sub)?;
            let s = b.mono_scale(e, r)?;
            let s7 = b.push(
                RuleId::S7,
                Instantiation { r: Some(r.clone()), ..Default::default() },
                &[],
            )?;
            b.cut(s, s7)
        }
        (Formula::Tensor(a, y), InfJust::TensorL(sub)) => {
            let e = ent_bot(b, a, sub)?;
            let w = b.weak(e, y)?;
            b.fold_last(w)
        }
        (Formula::Tensor(a, y), InfJust::TensorR(sub)) => {
            let e = ent_bot(b, y, sub)?;
            let w = b.weak(e, a)?;
            let p = b.perm_at(w, 0)?;
            b.fold_last(p)
        }
        (Formula::And(a, y), InfJust::AndL(sub)) => {
            let p = b.proj_left(a, y)?;
            let e = ent_bot(b, a, sub)?;
            b.cut(p, e)
        }
        (Formula::And(a, y), InfJust::AndR(sub)) => {
            let p = b.proj_right(a, y)?;
            let e = ent_bot(b, y, sub)?;
            b.cut(p, e)
        }
        (Formula::Or(a, y), InfJust::OrBoth(sa, sb)) => {
            let ea = ent_bot(b, a, sa)?;
            let eb = ent_bot(b, y, sb)?;
            b.push(
                RuleId::Or1,
                Instantiation {
                    phi: Some((**a).clone()),
                    psi: Some((**y).clone()),
                    theta: Some(Formula::Bot),
                    ..Default::default()
                },
                &[ea, eb],
            )
        }
        (Formula::Limp(x, y), InfJust::Imp(sy, sx)) => {
            let m = b.mp(x, y)?;
            let ey = ent_bot(b, y, sy)?;
            let c = b.cut(m, ey)?;
            let fl = b.fold_last(c)?;
            let cu = b.curry(fl)?;
            let nn = nn_from(b, x, sx)?;
            let tn = b.thesis_to_entail(nn)?;
            b.cut(cu, tn)
        }
        _ => Err(err(format!("infinity justification does not fit `{f}`"))),
    }
}

/// Derive `|- !!f` from the justification.
fn nn_from(b: &mut ProofBuilder, f: &Formula, just: &FinJust) -> Result<usize, BuildError> {
    match (f, just) {
        (_, FinJust::Unit) => b.prove_nn(f),
        (_, FinJust::Fact(j)) => b.hyp(j),
        (Formula::Atom(_), FinJust::Zero(j)) => {
            let h = b.hyp(j)?;
            b.nn_of_thesis(h)
        }
        (Formula::Scale(r, g), FinJust::Scale(sub)) => {
            let nn = nn_from(b, g, sub)?;
            nn_of_scaled(b, r, g, nn)
        }
        (Formula::Tensor(x, y), FinJust::Tensor(sa, sb)) => {
            let nna = nn_from(b, x, sa)?;
            let nnb = nn_from(b, y, sb)?;
            let ta = b.thesis_to_entail(nna)?;
            let tb = b.thesis_to_entail(nnb)?;
            let m = b.mp(f, &Formula::Bot)?;
            let mut i = b.curry(m)?;
            i = b.cut(i, tb)?;
            i = b.fold_last(i)?;
            i = b.curry(i)?;
            i = b.cut(i, ta)?;
            b.entail_to_thesis(i)
        }
        (Formula::And(x, y), FinJust::Both(sa, sb)) => {
            let fwd = Judgement::thesis(Formula::limp((**x).clone(), (**y).clone()));
            let bwd = Judgement::thesis(Formula::limp((**y).clone(), (**x).clone()));
            let (gx, gy) = ((**x).clone(), (**y).clone());
            let (ja, jb) = (sa.clone(), sb.clone());
            b.by_cases(
                (fwd.clone(), bwd.clone()),
                |bl| {
                    let h = bl.hyp(&fwd)?;
                    let ab = bl.thesis_to_entail(h)?;
                    let ia = bl.id(&gx)?;
                    let up = bl.push(
                        RuleId::And2,
                        Instantiation {
                            gamma: vec![gx.clone()],
                            phi: Some(gx.clone()),
                            psi: Some(gy.clone()),
                            ..Default::default()
                        },
                        &[ia, ab],
                    )?;
                    let nn = nn_from(bl, &gx, &ja)?;
                    bl.nn_mono(up, nn)
                },
                |br| {
                    let h = br.hyp(&bwd)?;
                    let ba = br.thesis_to_entail(h)?;
                    let ib = br.id(&gy)?;
                    let up = br.push(
                        RuleId::And2,
                        Instantiation {
                            gamma: vec![gy.clone()],
                            phi: Some(gx.clone()),
                            psi: Some(gy.clone()),
                            ..Default::default()
                        },
                        &[ba, ib],
                    )?;
                    let nn = nn_from(br, &gy, &jb)?;
                    br.nn_mono(up, nn)
                },
            )
        }
        (Formula::Or(x, y), FinJust::OrL(sa)) => {
            let nna = nn_from(b, x, sa)?;
            let inj = b.inj_left(x, y)?;
            b.nn_mono(inj, nna)
        }
        (Formula::Or(x, y), FinJust::OrR(sb)) => {
            let nnb = nn_from(b, y, sb)?;
            let inj = b.inj_right(x, y)?;
            b.nn_mono(inj, nnb)
        }
        (Formula::Limp(x, y), FinJust::ImpCons(sy)) => {
            let nny = nn_from(b, y, sy)?;
            let iy = b.id(y)?;
            let w = b.weak(iy, x)?;
            let fl = b.fold_last(w)?;
            let cu = b.curry(fl)?;
            b.nn_mono(cu, nny)
        }
        (Formula::Limp(x, y), FinJust::ImpAnt(sx)) => {
            let e = ent_bot(b, x, sx)?;
            let bo = b.bot(y)?;
            let c = b.cut(e, bo)?;
            let t = b.entail_to_thesis(c)?;
            b.nn_of_thesis(t)
        }
        _ => Err(err(format!("finiteness justification does not fit `{f}`"))),
    }
}

/// Lift `|- !!g` to `|- !!(r*g)`.
fn nn_of_scaled(
    b: &mut ProofBuilder,
    r: &Rational,
    g: &Formula,
    i_nn: usize,
) -> Result<usize, BuildError> {
    if r.is_one() {
        return Ok(i_nn);
    }
    if r.is_zero() {
        return b.prove_nn(&Formula::scale(Rational::zero(), g.clone()));
    }
    let scaled_nn = thesis_scale(b, i_nn, r)?;
    let ng = Formula::not(g.clone());
    let (_, swap_bwd) = b.scale_neg_swap(r, &ng)?;
    let step = b.cut(scaled_nn, swap_bwd)?;
    let (swap_fwd, _) = b.scale_neg_swap(r, g)?;
    let contra = b.contrapositive(swap_fwd)?;
    b.cut(step, contra)
}

/// Why an implication factor is a theorem.
#[derive(Clone, Debug)]
pub(super) enum DropWhy {
    /// Its antecedent is infinite.
    AntInfinite(InfJust),
    /// The set entails it.
    Entailed(FactProof),
}

impl DropWhy {
    pub(super) fn uses(&self, out: &mut Vec<Judgement>) {
        match self {
            DropWhy::AntInfinite(j) => j.uses(out),
            DropWhy::Entailed(fp) => out.extend(fp.members.iter().cloned()),
        }
    }
}

/// Derive `|- x -o y`.
fn theorem_imp(
    b: &mut ProofBuilder,
    x: &Formula,
    y: &Formula,
    why: &DropWhy,
) -> Result<usize, BuildError> {
    match why {
        DropWhy::AntInfinite(j) => {
            let e = ent_bot(b, x, j)?;
            let bo = b.bot(y)?;
            let c = b.cut(e, bo)?;
            b.entail_to_thesis(c)
        }
        DropWhy::Entailed(fp) => {
            let h = fp.emit(b)?;
            let hf = b.fold_ctx_as(h, x)?;
            b.entail_to_thesis(hf)
        }
    }
}

/// `[!h] |- r*!h` for positive `r`: negations only take the two extreme
/// values, and both are fixed by positive scaling. Split on which one.
fn neg_scale_up(b: &mut ProofBuilder, r: &Rational, h: &Formula) -> Result<usize, BuildError> {
    let nh = Formula::not(h.clone());
    let left = Judgement::thesis(nh.clone());
    let right = Judgement::thesis(Formula::not(nh.clone()));
    let r2 = r.clone();
    let nh2 = nh.clone();
    let target = Formula::scale(r.clone(), nh.clone());
    b.by_cases(
        (left.clone(), right.clone()),
        move |bl| {
            let hy = bl.hyp(&left)?;
            let sc = thesis_scale(bl, hy, &r2)?;
            bl.weak(sc, &nh2)
        },
        move |br| {
            let hy = br.hyp(&right)?;
            let te = br.thesis_to_entail(hy)?;
            let bo = br.bot(&target)?;
            br.cut(te, bo)
        },
    )
}

/// `[!!f] |- nnf(f)`.
fn nnf_from_nn(b: &mut ProofBuilder, f: &Formula) -> Result<usize, BuildError> {
    let lhs = Formula::not(Formula::not(f.clone()));
    let target = nnf(f);
    if target == Formula::Top {
        return b.top(std::slice::from_ref(&lhs));
    }
    match f {
        Formula::Atom(_) => b.id(&lhs),
        Formula::Bot => {
            let i = b.id(&Formula::Bot)?;
            let t = b.entail_to_thesis(i)?;
            let m = b.mp(&Formula::not(Formula::Bot), &Formula::Bot)?;
            b.cut(t, m)
        }
        Formula::Scale(r, g) => {
            let (_, swap_bwd) = b.scale_neg_swap(r, g)?;
            let c1 = b.contrapositive(swap_bwd)?;
            let up = neg_scale_up(b, r, g)?;
            let c2 = b.contrapositive(up)?;
            let i = b.cut(c1, c2)?;
            let rec = nnf_from_nn(b, g)?;
            b.cut(i, rec)
        }
        Formula::Tensor(x, y) | Formula::And(x, y) => {
            let (na, nb) = (nnf(x), nnf(y));
            let is_tensor = matches!(f, Formula::Tensor(..));
            let pa = {
                let down = if is_tensor {
                    let ia = b.id(x)?;
                    let w = b.weak(ia, y)?;
                    b.fold_last(w)?
                } else {
                    b.proj_left(x, y)?
                };
                let c1 = b.contrapositive(down)?;
                b.contrapositive(c1)?
            };
            let pb = {
                let down = if is_tensor {
                    let ib = b.id(y)?;
                    let w = b.weak(ib, x)?;
                    let p = b.perm_at(w, 0)?;
                    b.fold_last(p)?
                } else {
                    b.proj_right(x, y)?
                };
                let c1 = b.contrapositive(down)?;
                b.contrapositive(c1)?
            };
            if na == Formula::Top {
                let rb = nnf_from_nn(b, y)?;
                return b.cut(pb, rb);
            }
            if nb == Formula::Top {
                let ra = nnf_from_nn(b, x)?;
                return b.cut(pa, ra);
            }
            let ra = nnf_from_nn(b, x)?;
            let qa = {
                let c = b.cut(pa, ra)?;
                c
            };
            let rb = nnf_from_nn(b, y)?;
            let qb = b.cut(pb, rb)?;
            b.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![lhs],
                    phi: Some(na),
                    psi: Some(nb),
                    ..Default::default()
                },
                &[qa, qb],
            )
        }
        Formula::Or(x, y) => {
            let (na, nb) = (nnf(x), nnf(y));
            let pair_l = Judgement::thesis(Formula::limp((**x).clone(), (**y).clone()));
            let pair_r = Judgement::thesis(Formula::limp((**y).clone(), (**x).clone()));
            let (gx, gy) = ((**x).clone(), (**y).clone());
            let (gx2, gy2) = (gx.clone(), gy.clone());
            let (ca, cb) = (na.clone(), nb.clone());
            let (ca2, cb2) = (ca.clone(), cb.clone());
            let pl = pair_l.clone();
            let pr = pair_r.clone();
            b.by_cases(
                (pair_l, pair_r),
                move |bl| {
                    let h = bl.hyp(&pl)?;
                    let ab = bl.thesis_to_entail(h)?;
                    let idb = bl.id(&gy)?;
                    let down = bl.push(
                        RuleId::Or1,
                        Instantiation {
                            phi: Some(gx.clone()),
                            psi: Some(gy.clone()),
                            theta: Some(gy.clone()),
                            ..Default::default()
                        },
                        &[ab, idb],
                    )?;
                    let c1 = bl.contrapositive(down)?;
                    let c2 = bl.contrapositive(c1)?;
                    let r = nnf_from_nn(bl, &gy)?;
                    let q = bl.cut(c2, r)?;
                    let inj = bl.inj_right(&ca, &cb)?;
                    bl.cut(q, inj)
                },
                move |br| {
                    let h = br.hyp(&pr)?;
                    let ba = br.thesis_to_entail(h)?;
                    let ida = br.id(&gx2)?;
                    let down = br.push(
                        RuleId::Or1,
                        Instantiation {
                            phi: Some(gx2.clone()),
                            psi: Some(gy2.clone()),
                            theta: Some(gx2.clone()),
                            ..Default::default()
                        },
                        &[ida, ba],
                    )?;
                    let c1 = br.contrapositive(down)?;
                    let c2 = br.contrapositive(c1)?;
                    let r = nnf_from_nn(br, &gx2)?;
                    let q = br.cut(c2, r)?;
                    let inj = br.inj_left(&ca2, &cb2)?;
                    br.cut(q, inj)
                },
            )
        }
        Formula::Limp(x, y) => {
            if **y == Formula::Bot {
                // a triple negation collapses to a single one
                let m = b.mp(x, &Formula::Bot)?;
                let p = b.perm_at(m, 0)?;
                let fl = b.fold_last(p)?;
                let cu = b.curry(fl)?;
                return b.contrapositive(cu);
            }
            let ny = nnf(y);
            let nx = Formula::not((**x).clone());
            let pair_l = Judgement::thesis(nx.clone());
            let pair_r = Judgement::thesis(Formula::not(nx.clone()));
            let (gx, gy) = ((**x).clone(), (**y).clone());
            let (ca, cb) = (ny.clone(), nx.clone());
            let (ca2, cb2) = (ca.clone(), cb.clone());
            let lhs2 = lhs.clone();
            let pl = pair_l.clone();
            let pr = pair_r.clone();
            b.by_cases(
                (pair_l, pair_r),
                move |bl| {
                    let h = bl.hyp(&pl)?;
                    let inj = bl.inj_right(&ca, &cb)?;
                    let t = bl.cut(h, inj)?;
                    bl.weak(t, &lhs2)
                },
                move |br| {
                    // with a finite antecedent the implication tracks its
                    // consequent's class
                    let m1 = br.mp(&gx, &gy)?;
                    let ey = br.mp(&gy, &Formula::Bot)?;
                    let c = br.cut(m1, ey)?;
                    let mv = br.move_antecedent(c, 1, 2)?;
                    let f1 = br.fold_last(mv)?;
                    let cu = br.curry(f1)?;
                    let hn = br.hyp(&pr)?;
                    let tn = br.thesis_to_entail(hn)?;
                    let c2 = br.cut(cu, tn)?;
                    let p = br.perm_at(c2, 0)?;
                    let f2 = br.fold_last(p)?;
                    let cu2 = br.curry(f2)?;
                    let ct = br.contrapositive(cu2)?;
                    let ry = nnf_from_nn(br, &gy)?;
                    let q = br.cut(ct, ry)?;
                    let inj = br.inj_left(&ca2, &cb2)?;
                    br.cut(q, inj)
                },
            )
        }
        Formula::Top | Formula::One => unreachable!("handled by the tautology check"),
    }
}

// -- canonical form, both directions ----------------------------------------

/// Build `[f] |- canon(f)` and `[canon(f)] |- f`.
fn canon_equiv(b: &mut ProofBuilder, f: &Formula) -> Result<(usize, usize), BuildError> {
    match f {
        Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => {
            let i = b.id(f)?;
            Ok((i, i))
        }
        Formula::Scale(r, g) => {
            if r.is_zero() {
                let fwd = b.top(std::slice::from_ref(f))?;
                let z = b.push(RuleId::S5, Instantiation::with_phi((**g).clone()), &[])?;
                let bwd = b.weak(z, &Formula::Top)?;
                return Ok((fwd, bwd));
            }
            let (gf, gb) = canon_equiv(b, g)?;
            let cg = canon_formula(g);
            if r.is_one() {
                let s3 = b.push(RuleId::S3, Instantiation::with_phi((**g).clone()), &[])?;
                let unwrap = b.biimp_bwd(s3)?;
                let wrap = b.biimp_fwd(s3)?;
                let fwd = b.cut(unwrap, gf)?;
                let bwd = b.cut(gb, wrap)?;
                return Ok((fwd, bwd));
            }
            let sf = b.mono_scale(gf, r)?;
            let sb = b.mono_scale(gb, r)?;
            let (pf, pb) = scaled_equiv(b, r, &cg)?;
            Ok((b.cut(sf, pf)?, b.cut(pb, sb)?))
        }
        Formula::And(x, y) => {
            let (fx, bx) = canon_equiv(b, x)?;
            let (fy, by) = canon_equiv(b, y)?;
            let cx = canon_formula(x);
            let cy = canon_formula(y);
            if cx == Formula::Bot {
                let p = b.proj_left(x, y)?;
                let fwd = b.cut(p, fx)?;
                let bwd = b.bot(f)?;
                return Ok((fwd, bwd));
            }
            if cy == Formula::Bot {
                let p = b.proj_right(x, y)?;
                let fwd = b.cut(p, fy)?;
                let bwd = b.bot(f)?;
                return Ok((fwd, bwd));
            }
            if cx == Formula::Top {
                let p = b.proj_right(x, y)?;
                let fwd = b.cut(p, fy)?;
                let t = b.top(std::slice::from_ref(&cy))?;
                let p1 = b.cut(t, bx)?;
                let bwd = b.push(
                    RuleId::And2,
                    Instantiation {
                        gamma: vec![cy],
                        phi: Some((**x).clone()),
                        psi: Some((**y).clone()),
                        ..Default::default()
                    },
                    &[p1, by],
                )?;
                return Ok((fwd, bwd));
            }
            if cy == Formula::Top {
                let p = b.proj_left(x, y)?;
                let fwd = b.cut(p, fx)?;
                let t = b.top(std::slice::from_ref(&cx))?;
                let p2 = b.cut(t, by)?;
                let bwd = b.push(
                    RuleId::And2,
                    Instantiation {
                        gamma: vec![cx],
                        phi: Some((**x).clone()),
                        psi: Some((**y).clone()),
                        ..Default::default()
                    },
                    &[bx, p2],
                )?;
                return Ok((fwd, bwd));
            }
            Ok((b.mono_and(fx, fy)?, b.mono_and(bx, by)?))
        }
        Formula::Or(x, y) => {
            let (fx, bx) = canon_equiv(b, x)?;
            let (fy, by) = canon_equiv(b, y)?;
            let cx = canon_formula(x);
            let cy = canon_formula(y);
            if cx == Formula::Top || cy == Formula::Top {
                let fwd = b.top(std::slice::from_ref(f))?;
                let bwd = if cx == Formula::Top {
                    let inj = b.inj_left(x, y)?;
                    b.cut(bx, inj)?
                } else {
                    let inj = b.inj_right(x, y)?;
                    b.cut(by, inj)?
                };
                return Ok((fwd, bwd));
            }
            if cx == Formula::Bot {
                let bo = b.bot(&cy)?;
                let p1 = b.cut(fx, bo)?;
                let fwd = b.push(
                    RuleId::Or1,
                    Instantiation {
                        phi: Some((**x).clone()),
                        psi: Some((**y).clone()),
                        theta: Some(cy),
                        ..Default::default()
                    },
                    &[p1, fy],
                )?;
                let inj = b.inj_right(x, y)?;
                let bwd = b.cut(by, inj)?;
                return Ok((fwd, bwd));
            }
            if cy == Formula::Bot {
                let bo = b.bot(&cx)?;
                let p2 = b.cut(fy, bo)?;
                let fwd = b.push(
                    RuleId::Or1,
                    Instantiation {
                        phi: Some((**x).clone()),
                        psi: Some((**y).clone()),
                        theta: Some(cx),
                        ..Default::default()
                    },
                    &[fx, p2],
                )?;
                let inj = b.inj_left(x, y)?;
                let bwd = b.cut(bx, inj)?;
                return Ok((fwd, bwd));
            }
            Ok((b.mono_or(fx, fy)?, b.mono_or(bx, by)?))
        }
        Formula::Tensor(x, y) => {
            let (fx, bx) = canon_equiv(b, x)?;
            let (fy, by) = canon_equiv(b, y)?;
            let cx = canon_formula(x);
            let cy = canon_formula(y);
            if cx == Formula::Bot || cy == Formula::Bot {
                let m = b.mono_tensor(fx, fy)?;
                let dn = if cx == Formula::Bot {
                    let i = b.id(&Formula::Bot)?;
                    let w = b.weak(i, &cy)?;
                    b.fold_last(w)?
                } else {
                    let i = b.id(&Formula::Bot)?;
                    let w = b.weak(i, &cx)?;
                    let p = b.perm_at(w, 0)?;
                    b.fold_last(p)?
                };
                let fwd = b.cut(m, dn)?;
                let bwd = b.bot(f)?;
                return Ok((fwd, bwd));
            }
            if cx == Formula::Top {
                let m = b.mono_tensor(fx, fy)?;
                let dn = {
                    let i = b.id(&cy)?;
                    let w = b.weak(i, &Formula::Top)?;
                    let p = b.perm_at(w, 0)?;
                    b.fold_last(p)?
                };
                let fwd = b.cut(m, dn)?;
                let t = b.top(&[])?;
                let i = b.id(&cy)?;
                let pad = b.pad_consequent(i, t)?;
                let rr = b.tensor_rearrange(
                    &Formula::tensor(cy.clone(), Formula::Top),
                    &Formula::tensor(Formula::Top, cy.clone()),
                )?;
                let up = b.cut(pad, rr)?;
                let m2 = b.mono_tensor(bx, by)?;
                let bwd = b.cut(up, m2)?;
                return Ok((fwd, bwd));
            }
            if cy == Formula::Top {
                let m = b.mono_tensor(fx, fy)?;
                let dn = {
                    let i = b.id(&cx)?;
                    let w = b.weak(i, &Formula::Top)?;
                    b.fold_last(w)?
                };
                let fwd = b.cut(m, dn)?;
                let t = b.top(&[])?;
                let i = b.id(&cx)?;
                let pad = b.pad_consequent(i, t)?;
                let m2 = b.mono_tensor(bx, by)?;
                let bwd = b.cut(pad, m2)?;
                return Ok((fwd, bwd));
            }
            Ok((b.mono_tensor(fx, fy)?, b.mono_tensor(bx, by)?))
        }
        Formula::Limp(x, y) => {
            let (fx, bx) = canon_equiv(b, x)?;
            let (fy, by) = canon_equiv(b, y)?;
            let cx = canon_formula(x);
            let cy = canon_formula(y);
            if cx == Formula::Bot {
                let fwd = b.top(std::slice::from_ref(f))?;
                let bo = b.bot(y)?;
                let c = b.cut(fx, bo)?;
                let t = b.entail_to_thesis(c)?;
                let bwd = b.weak(t, &Formula::Top)?;
                return Ok((fwd, bwd));
            }
            if cy == Formula::Top {
                let fwd = b.top(std::slice::from_ref(f))?;
                let tx = b.top(std::slice::from_ref(x))?;
                let c = b.cut(tx, by)?;
                let t = b.entail_to_thesis(c)?;
                let bwd = b.weak(t, &Formula::Top)?;
                return Ok((fwd, bwd));
            }
            if cx == Formula::Top {
                let m = b.mp(x, y)?;
                let rw = b.replace_antecedent(m, 1, bx)?;
                let t = b.top(&[])?;
                let c = b.cut(t, rw)?;
                let fwd = b.cut(c, fy)?;
                let w = b.weak(by, x)?;
                let fl = b.fold_last(w)?;
                let bwd = b.curry(fl)?;
                return Ok((fwd, bwd));
            }
            Ok((b.mono_limp(bx, fy)?, b.mono_limp(fx, by)?))
        }
    }
}

/// Push a positive scalar (`r` neither 0 nor 1) through an already
/// canonical formula: `[r*g] |- scaled(r, g)` and back.
fn scaled_equiv(
    b: &mut ProofBuilder,
    r: &Rational,
    g: &Formula,
) -> Result<(usize, usize), BuildError> {
    let lhs = Formula::scale(r.clone(), g.clone());
    match g {
        Formula::Top => {
            let fwd = b.top(std::slice::from_ref(&lhs))?;
            let st = b.scaled_top(r)?;
            let bwd = b.weak(st, &Formula::Top)?;
            Ok((fwd, bwd))
        }
        Formula::Bot => {
            let fwd = b.push(
                RuleId::S7,
                Instantiation { r: Some(r.clone()), ..Default::default() },
                &[],
            )?;
            let bwd = b.bot(&lhs)?;
            Ok((fwd, bwd))
        }
        Formula::Scale(s, h) => {
            let rs = r * s;
            let s2 = b.push(
                RuleId::S2,
                Instantiation {
                    phi: Some((**h).clone()),
                    r: Some(r.clone()),
                    s: Some(s.clone()),
                    ..Default::default()
                },
                &[],
            )?;
            let f1 = b.biimp_fwd(s2)?;
            let b1 = b.biimp_bwd(s2)?;
            if rs.is_one() {
                let s3 = b.push(RuleId::S3, Instantiation::with_phi((**h).clone()), &[])?;
                let f2 = b.biimp_bwd(s3)?;
                let b2 = b.biimp_fwd(s3)?;
                Ok((b.cut(f1, f2)?, b.cut(b2, b1)?))
            } else {
                Ok((f1, b1))
            }
        }
        Formula::Atom(_) | Formula::One => {
            let i = b.id(&lhs)?;
            Ok((i, i))
        }
        Formula::And(..) | Formula::Or(..) | Formula::Tensor(..) | Formula::Limp(..) => {
            let (x, y, op) = match g {
                Formula::And(x, y) => (x, y, BinConn::And),
                Formula::Or(x, y) => (x, y, BinConn::Or),
                Formula::Tensor(x, y) => (x, y, BinConn::Tensor),
                Formula::Limp(x, y) => (x, y, BinConn::Limp),
                _ => unreachable!(),
            };
            let s4 = b.push(
                RuleId::S4,
                Instantiation {
                    phi: Some((**x).clone()),
                    psi: Some((**y).clone()),
                    r: Some(r.clone()),
                    op: Some(op),
                    ..Default::default()
                },
                &[],
            )?;
            let f1 = b.biimp_fwd(s4)?;
            let b1 = b.biimp_bwd(s4)?;
            let (px, bx) = scaled_equiv(b, r, x)?;
            let (py, by) = scaled_equiv(b, r, y)?;
            let (lf, lb) = match op {
                BinConn::And => (b.mono_and(px, py)?, b.mono_and(bx, by)?),
                BinConn::Or => (b.mono_or(px, py)?, b.mono_or(bx, by)?),
                BinConn::Tensor => (b.mono_tensor(px, py)?, b.mono_tensor(bx, by)?),
                BinConn::Limp => (b.mono_limp(bx, py)?, b.mono_limp(px, by)?),
            };
            Ok((b.cut(f1, lf)?, b.cut(lb, b1)?))
        }
    }
}

// -- per-rewrite constructors ------------------------------------------------

pub(super) fn canonicalize_fwd(
    assumptions: &[Judgement],
    original: &Judgement,
    work: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, work, |b| {
        let mut i = b.hyp(original)?;
        for pos in 0..original.antecedents.len() {
            let a = &original.antecedents[pos];
            if canon_formula(a) != *a {
                let (_, abwd) = canon_equiv(b, a)?;
                i = b.replace_antecedent(i, pos, abwd)?;
            }
        }
        loop {
            let top_at = b
                .judgement(i)
                .antecedents
                .iter()
                .position(|f| *f == Formula::Top);
            let Some(pos) = top_at else { break };
            let last = b.judgement(i).antecedents.len() - 1;
            if pos != last {
                i = b.move_antecedent(i, pos, last)?;
            }
            let t = b.top(&[])?;
            i = b.cut(t, i)?;
        }
        i = b.unfold_fully(i)?;
        if canon_formula(&original.consequent) != original.consequent {
            let (cfwd, _) = canon_equiv(b, &original.consequent)?;
            i = b.replace_consequent(i, cfwd)?;
        }
        Ok(i)
    })
}

pub(super) fn canonicalize_bwd(
    assumptions: &[Judgement],
    original: &Judgement,
    work: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, original, |b| {
        let mut i = b.hyp(work)?;
        if canon_formula(&original.consequent) != original.consequent {
            let (_, cbwd) = canon_equiv(b, &original.consequent)?;
            i = b.replace_consequent(i, cbwd)?;
        }
        let mut slot = 0usize;
        for a in &original.antecedents {
            let ca = canon_formula(a);
            if ca == Formula::Top {
                continue;
            }
            i = fuse_run(b, i, slot, &ca)?;
            if ca != *a {
                let (afwd, _) = canon_equiv(b, a)?;
                i = b.replace_antecedent(i, slot, afwd)?;
            }
            slot += 1;
        }
        for (pos, a) in original.antecedents.iter().enumerate() {
            if canon_formula(a) == Formula::Top {
                i = b.weak(i, a)?;
                let last = b.judgement(i).antecedents.len() - 1;
                if last != pos {
                    i = b.move_antecedent(i, last, pos)?;
                }
            }
        }
        Ok(i)
    })
}

pub(super) fn drop_tautology_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        if j.consequent == Formula::Top {
            return b.top(&j.antecedents);
        }
        let i = b.bot(&j.consequent)?;
        weak_to_ctx(b, i, &j.antecedents)
    })
}

pub(super) fn subsume_finitist_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    zero: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let h = b.hyp(zero)?;
        b.nn_of_thesis(h)
    })
}

pub(super) fn discharge_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    pos: usize,
    just: &InfJust,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let f = &j.antecedents[pos];
        let e = ent_bot(b, f, just)?;
        let i = if j.consequent == Formula::Bot {
            e
        } else {
            let bo = b.bot(&j.consequent)?;
            b.cut(e, bo)?
        };
        weak_to_ctx(b, i, &j.antecedents)
    })
}

pub(super) fn collapse_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    just: &InfJust,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let i = b.hyp(j)?;
        let e = ent_bot(b, &j.consequent, just)?;
        b.replace_consequent(i, e)
    })
}

pub(super) fn collapse_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let i = b.hyp(child)?;
        let bo = b.bot(&j.consequent)?;
        b.replace_consequent(i, bo)
    })
}

fn zero_thesis(
    b: &mut ProofBuilder,
    f: &Formula,
    zeros: &BTreeMap<PropName, Judgement>,
) -> Result<usize, BuildError> {
    let fetch = |b: &mut ProofBuilder, p: &PropName| {
        let fact = zeros
            .get(p)
            .ok_or_else(|| err(format!("no zero fact for `{p}`")))?;
        b.hyp(fact)
    };
    match f {
        Formula::Atom(p) => fetch(b, p),
        Formula::Scale(r, h) => {
            let Formula::Atom(p) = &**h else {
                return Err(err(format!("`{f}` is not a scaled proposition")));
            };
            let t = fetch(b, p)?;
            thesis_scale(b, t, r)
        }
        _ => Err(err(format!("`{f}` is not a zero factor"))),
    }
}

/// `[c] |- c'` where `c'` is `c` without the `rm` factors (or `⊤` when
/// everything goes).
fn consequent_narrow(
    b: &mut ProofBuilder,
    c: &Formula,
    rm: &BTreeSet<usize>,
) -> Result<usize, BuildError> {
    let c2 = remove_factors(c, rm);
    if c2 == Formula::Top {
        return b.top(std::slice::from_ref(c));
    }
    let mut k = b.id(&c2)?;
    k = b.unfold_fully(k)?;
    for &pos in rm {
        let fac = factor_at(c, pos).clone();
        k = b.weak(k, &fac)?;
        let last = b.judgement(k).antecedents.len() - 1;
        if last != pos {
            k = b.move_antecedent(k, last, pos)?;
        }
    }
    b.fold_ctx_as(k, c)
}

pub(super) fn eliminate_zero_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    ant_rm: &[usize],
    cons_rm: &BTreeSet<usize>,
    zeros: &BTreeMap<PropName, Judgement>,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let mut i = b.hyp(j)?;
        for (step, &pos) in ant_rm.iter().enumerate() {
            let p = pos - step;
            let f = j.antecedents[pos].clone();
            let last = b.judgement(i).antecedents.len() - 1;
            if p != last {
                i = b.move_antecedent(i, p, last)?;
            }
            let t = zero_thesis(b, &f, zeros)?;
            i = b.cut(t, i)?;
        }
        if !cons_rm.is_empty() {
            let rw = consequent_narrow(b, &j.consequent, cons_rm)?;
            i = b.replace_consequent(i, rw)?;
        }
        Ok(i)
    })
}

pub(super) fn eliminate_zero_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    ant_rm: &[usize],
    cons_rm: &BTreeSet<usize>,
    zeros: &BTreeMap<PropName, Judgement>,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let c = &j.consequent;
        let mut i;
        if cons_rm.is_empty() {
            i = b.hyp(child)?;
        } else if child.consequent == Formula::Top {
            // the whole consequent was zero; rebuild it from the facts
            let facs: Vec<Formula> = tensor_factors(c).into_iter().cloned().collect();
            let mut th = zero_thesis(b, &facs[0], zeros)?;
            let mut built = facs[0].clone();
            for fac in &facs[1..] {
                let z = zero_thesis(b, fac, zeros)?;
                th = b.pad_consequent(th, z)?;
                built = Formula::tensor(built, fac.clone());
            }
            if built != *c {
                let rr = b.tensor_rearrange(&built, c)?;
                th = b.cut(th, rr)?;
            }
            i = weak_to_ctx(b, th, &child.antecedents)?;
        } else {
            i = b.hyp(child)?;
            let mut k = b.id(c)?;
            k = b.unfold_fully(k)?;
            for (step, &pos) in cons_rm.iter().enumerate() {
                let p = pos - step;
                let fac = factor_at(c, pos).clone();
                let last = b.judgement(k).antecedents.len() - 1;
                if p != last {
                    k = b.move_antecedent(k, p, last)?;
                }
                let t = zero_thesis(b, &fac, zeros)?;
                k = b.cut(t, k)?;
            }
            let c2 = remove_factors(c, cons_rm);
            k = b.fold_ctx_as(k, &c2)?;
            i = b.replace_consequent(i, k)?;
        }
        for &pos in ant_rm {
            let f = j.antecedents[pos].clone();
            i = b.weak(i, &f)?;
            let last = b.judgement(i).antecedents.len() - 1;
            if last != pos {
                i = b.move_antecedent(i, last, pos)?;
            }
        }
        Ok(i)
    })
}

pub(super) fn rescale_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    r: &Rational,
    q: &Formula,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let i = b.hyp(j)?;
        let inv = r.recip();
        let m = b.mono_scale(i, &inv)?;
        let s3 = b.push(RuleId::S3, Instantiation::with_phi(q.clone()), &[])?;
        let f1 = b.biimp_fwd(s3)?;
        let s2 = b.push(
            RuleId::S2,
            Instantiation {
                phi: Some(q.clone()),
                r: Some(inv.clone()),
                s: Some(r.clone()),
                ..Default::default()
            },
            &[],
        )?;
        let b1 = b.biimp_bwd(s2)?;
        let rw = b.cut(f1, b1)?;
        let m2 = b.replace_antecedent(m, 0, rw)?;
        let s7 = b.push(
            RuleId::S7,
            Instantiation { r: Some(inv), ..Default::default() },
            &[],
        )?;
        b.cut(m2, s7)
    })
}

pub(super) fn rescale_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    r: &Rational,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let i = b.hyp(child)?;
        let m = b.mono_scale(i, r)?;
        let s7 = b.push(
            RuleId::S7,
            Instantiation { r: Some(r.clone()), ..Default::default() },
            &[],
        )?;
        b.cut(m, s7)
    })
}

pub(super) fn split_zeroes_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    fact: &Judgement,
    pos: usize,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, fact, |b| {
        let facs: Vec<Formula> = tensor_factors(&j.consequent).into_iter().cloned().collect();
        let f0 = facs[pos].clone();
        let mut k = b.id(&f0)?;
        for (idx2, g) in facs.iter().enumerate() {
            if idx2 != pos {
                k = b.weak(k, g)?;
            }
        }
        if pos != 0 {
            k = b.move_antecedent(k, 0, pos)?;
        }
        k = b.fold_ctx_as(k, &j.consequent)?;
        let i = b.hyp(j)?;
        let mut t = b.cut(i, k)?;
        if let Formula::Scale(r, _) = &f0 {
            let r = r.clone();
            t = thesis_unscale(b, t, &r)?;
        }
        Ok(t)
    })
}

pub(super) fn split_zeroes_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    zeros: &BTreeMap<PropName, Judgement>,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let facs: Vec<Formula> = tensor_factors(&j.consequent).into_iter().cloned().collect();
        let mut th = zero_thesis(b, &facs[0], zeros)?;
        let mut built = facs[0].clone();
        for fac in &facs[1..] {
            let z = zero_thesis(b, fac, zeros)?;
            th = b.pad_consequent(th, z)?;
            built = Formula::tensor(built, fac.clone());
        }
        if built != j.consequent {
            let rr = b.tensor_rearrange(&built, &j.consequent)?;
            th = b.cut(th, rr)?;
        }
        Ok(th)
    })
}

pub(super) fn pick_conjunct_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    keep_left: bool,
    supp: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let Formula::And(x, y) = &j.antecedents[pos] else {
            return Err(err("pick expects a conjunction antecedent factor".into()));
        };
        let i = b.hyp(j)?;
        let rw = if keep_left {
            let h = b.hyp(supp)?;
            let hf = b.fold_ctx_as(h, x)?;
            let ix = b.id(x)?;
            b.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![(**x).clone()],
                    phi: Some((**x).clone()),
                    psi: Some((**y).clone()),
                    ..Default::default()
                },
                &[ix, hf],
            )?
        } else {
            let h = b.hyp(supp)?;
            let hf = b.fold_ctx_as(h, y)?;
            let iy = b.id(y)?;
            b.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![(**y).clone()],
                    phi: Some((**x).clone()),
                    psi: Some((**y).clone()),
                    ..Default::default()
                },
                &[hf, iy],
            )?
        };
        let i = b.replace_antecedent(i, pos, rw)?;
        b.unfold_fully(i)
    })
}

pub(super) fn pick_conjunct_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    keep_left: bool,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let Formula::And(x, y) = &j.antecedents[pos] else {
            return Err(err("pick expects a conjunction antecedent factor".into()));
        };
        let kept = if keep_left { x } else { y };
        let mut i = b.hyp(child)?;
        i = fuse_run(b, i, pos, kept)?;
        let rw = if keep_left {
            b.proj_left(x, y)?
        } else {
            b.proj_right(x, y)?
        };
        b.replace_antecedent(i, pos, rw)
    })
}

pub(super) fn branch_disjunct_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    left_side: bool,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let Formula::Or(x, y) = &j.antecedents[pos] else {
            return Err(err("branch expects a disjunction antecedent factor".into()));
        };
        let i = b.hyp(j)?;
        let rw = if left_side {
            b.inj_left(x, y)?
        } else {
            b.inj_right(x, y)?
        };
        let i = b.replace_antecedent(i, pos, rw)?;
        b.unfold_fully(i)
    })
}

pub(super) fn branch_disjunct_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    j_left: &Judgement,
    j_right: &Judgement,
    pos: usize,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let Formula::Or(x, y) = &j.antecedents[pos] else {
            return Err(err("branch expects a disjunction antecedent factor".into()));
        };
        let mut ia = b.hyp(j_left)?;
        ia = fuse_run(b, ia, pos, x)?;
        let la = b.judgement(ia).antecedents.len() - 1;
        if pos != la {
            ia = b.move_antecedent(ia, pos, la)?;
        }
        let mut ib = b.hyp(j_right)?;
        ib = fuse_run(b, ib, pos, y)?;
        let lb = b.judgement(ib).antecedents.len() - 1;
        if pos != lb {
            ib = b.move_antecedent(ib, pos, lb)?;
        }
        let mut gamma = j.antecedents.clone();
        gamma.remove(pos);
        let o = b.push(
            RuleId::Or1,
            Instantiation {
                gamma,
                phi: Some((**x).clone()),
                psi: Some((**y).clone()),
                theta: Some(j.consequent.clone()),
                ..Default::default()
            },
            &[ia, ib],
        )?;
        let lo = b.judgement(o).antecedents.len() - 1;
        if lo != pos {
            b.move_antecedent(o, lo, pos)
        } else {
            Ok(o)
        }
    })
}

pub(super) fn pick_disjunct_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    keep_left: bool,
    supp: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let c = j.consequent.clone();
        let Formula::Or(x, y) = factor_at(&c, pos).clone() else {
            return Err(err("pick expects a disjunction consequent factor".into()));
        };
        let lemma = if keep_left {
            let ix = b.id(&x)?;
            let h = b.hyp(supp)?;
            let hf = b.fold_ctx_as(h, &y)?;
            b.push(
                RuleId::Or1,
                Instantiation {
                    phi: Some((*x).clone()),
                    psi: Some((*y).clone()),
                    theta: Some((*x).clone()),
                    ..Default::default()
                },
                &[ix, hf],
            )?
        } else {
            let h = b.hyp(supp)?;
            let hf = b.fold_ctx_as(h, &x)?;
            let iy = b.id(&y)?;
            b.push(
                RuleId::Or1,
                Instantiation {
                    phi: Some((*x).clone()),
                    psi: Some((*y).clone()),
                    theta: Some((*y).clone()),
                    ..Default::default()
                },
                &[hf, iy],
            )?
        };
        let path = factor_path(&c, pos);
        let rw = mono_at_path(b, &c, &path, lemma)?;
        let i = b.hyp(j)?;
        b.replace_consequent(i, rw)
    })
}

pub(super) fn pick_disjunct_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    keep_left: bool,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let c = &j.consequent;
        let Formula::Or(x, y) = factor_at(c, pos).clone() else {
            return Err(err("pick expects a disjunction consequent factor".into()));
        };
        let lemma = if keep_left {
            b.inj_left(&x, &y)?
        } else {
            b.inj_right(&x, &y)?
        };
        let path = factor_path(c, pos);
        let cc = child.consequent.clone();
        let rw = mono_at_path(b, &cc, &path, lemma)?;
        let i = b.hyp(child)?;
        b.replace_consequent(i, rw)
    })
}

pub(super) fn branch_conjunct_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    left_side: bool,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let c = j.consequent.clone();
        let Formula::And(x, y) = factor_at(&c, pos).clone() else {
            return Err(err("branch expects a conjunction consequent factor".into()));
        };
        let lemma = if left_side {
            b.proj_left(&x, &y)?
        } else {
            b.proj_right(&x, &y)?
        };
        let path = factor_path(&c, pos);
        let rw = mono_at_path(b, &c, &path, lemma)?;
        let i = b.hyp(j)?;
        b.replace_consequent(i, rw)
    })
}

/// Join proofs of the two single-conjunct variants of `j` back into `j`
/// itself. `ia` and `ib` must conclude `j` with the conjunction factor at
/// `pos` replaced by its left and right side respectively. The conjunction
/// of the two consequents is rebuilt below a totality case split.
pub(super) fn cons_and_join(
    b: &mut ProofBuilder,
    j: &Judgement,
    pos: usize,
    ia: usize,
    ib: usize,
) -> Result<usize, BuildError> {
    let c = &j.consequent;
    let Formula::And(x, y) = factor_at(c, pos).clone() else {
        return Err(err("branch expects a conjunction consequent factor".into()));
    };
    let path = factor_path(c, pos);
    let ca = b.judgement(ia).consequent.clone();
    let cb = b.judgement(ib).consequent.clone();
    let up = b.push(
        RuleId::And2,
        Instantiation {
            gamma: j.antecedents.clone(),
            phi: Some(ca.clone()),
            psi: Some(cb.clone()),
            ..Default::default()
        },
        &[ia, ib],
    )?;
    let pair_l = Judgement::thesis(Formula::limp((*x).clone(), (*y).clone()));
    let pair_r = Judgement::thesis(Formula::limp((*y).clone(), (*x).clone()));
    let (gx, gy) = ((*x).clone(), (*y).clone());
    let (gx2, gy2) = (gx.clone(), gy.clone());
    let (ca2, cb2) = (ca.clone(), cb.clone());
    let (path_l, path_r) = (path.clone(), path);
    let pl = pair_l.clone();
    let pr = pair_r.clone();
    let dn = b.by_cases(
        (pair_l, pair_r),
        move |bl| {
            let p = bl.proj_left(&ca2, &cb2)?;
            let h = bl.hyp(&pl)?;
            let hb = bl.thesis_to_entail(h)?;
            let ix = bl.id(&gx)?;
            let l2 = bl.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![gx.clone()],
                    phi: Some(gx.clone()),
                    psi: Some(gy.clone()),
                    ..Default::default()
                },
                &[ix, hb],
            )?;
            let lift = mono_at_path(bl, &ca2, &path_l, l2)?;
            bl.cut(p, lift)
        },
        move |br| {
            let p = br.proj_right(&ca, &cb)?;
            let h = br.hyp(&pr)?;
            let ha = br.thesis_to_entail(h)?;
            let iy = br.id(&gy2)?;
            let l2 = br.push(
                RuleId::And2,
                Instantiation {
                    gamma: vec![gy2.clone()],
                    phi: Some(gx2.clone()),
                    psi: Some(gy2.clone()),
                    ..Default::default()
                },
                &[ha, iy],
            )?;
            let lift = mono_at_path(br, &cb, &path_r, l2)?;
            br.cut(p, lift)
        },
    )?;
    b.cut(up, dn)
}

pub(super) fn branch_conjunct_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    j_left: &Judgement,
    j_right: &Judgement,
    pos: usize,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let ia = b.hyp(j_left)?;
        let ib = b.hyp(j_right)?;
        cons_and_join(b, j, pos, ia, ib)
    })
}

pub(super) fn drop_imp_ant_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    why: &DropWhy,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let Formula::Limp(x, y) = &j.antecedents[pos] else {
            return Err(err("drop expects an implication antecedent factor".into()));
        };
        let th = theorem_imp(b, x, y, why)?;
        let mut i = b.hyp(j)?;
        let last = j.antecedents.len() - 1;
        if pos != last {
            i = b.move_antecedent(i, pos, last)?;
        }
        b.cut(th, i)
    })
}

/// Recover a judgement whose listed antecedents were removed.
pub(super) fn weaken_in_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    positions: &[usize],
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let mut i = b.hyp(child)?;
        for &pos in positions {
            let f = j.antecedents[pos].clone();
            i = b.weak(i, &f)?;
            let last = b.judgement(i).antecedents.len() - 1;
            if last != pos {
                i = b.move_antecedent(i, last, pos)?;
            }
        }
        Ok(i)
    })
}

pub(super) fn drop_imp_cons_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let rm = BTreeSet::from([pos]);
        let i = b.hyp(j)?;
        let rw = consequent_narrow(b, &j.consequent, &rm)?;
        b.replace_consequent(i, rw)
    })
}

pub(super) fn drop_imp_cons_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    why: &DropWhy,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let c = &j.consequent;
        let fac = factor_at(c, pos).clone();
        let Formula::Limp(x, y) = &fac else {
            return Err(err("drop expects an implication consequent factor".into()));
        };
        let th = theorem_imp(b, x, y, why)?;
        if child.consequent == Formula::Top {
            return weak_to_ctx(b, th, &j.antecedents);
        }
        let i = b.hyp(child)?;
        let p = b.pad_consequent(i, th)?;
        let rr = b.tensor_rearrange(&Formula::tensor(child.consequent.clone(), fac), c)?;
        b.replace_consequent(p, rr)
    })
}

/// `[y] |- x⊗(x -o y)` given the derived fact `[y-factors] |- x`.
fn key_split(
    b: &mut ProofBuilder,
    x: &Formula,
    y: &Formula,
    fact: &FactProof,
) -> Result<usize, BuildError> {
    let imp = Formula::limp(x.clone(), y.clone());
    let ii = b.id(&imp)?;
    let h = fact.emit(b)?;
    let hf = b.fold_ctx_as(h, y)?;
    b.push(
        RuleId::Limp1,
        Instantiation {
            phi: Some(x.clone()),
            psi: Some(imp),
            theta: Some(y.clone()),
            ..Default::default()
        },
        &[ii, hf],
    )
}

pub(super) fn shift_imp_cons_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let c = &j.consequent;
        let Formula::Limp(x, y) = factor_at(c, pos).clone() else {
            return Err(err("shift expects an implication consequent factor".into()));
        };
        let c2 = &child.consequent;
        let mut k = b.id(c2)?;
        k = b.unfold_fully(k)?;
        k = fuse_run(b, k, pos, &y)?;
        let m = b.mp(&x, &y)?;
        let mf = b.fold_last(m)?;
        k = b.replace_antecedent(k, pos, mf)?;
        let last = b.judgement(k).antecedents.len() - 1;
        if pos != last {
            k = b.move_antecedent(k, pos, last)?;
        }
        k = b.unfold_last(k)?;
        let l2 = b.judgement(k).antecedents.len() - 1;
        if l2 - 1 != pos {
            k = b.move_antecedent(k, l2 - 1, pos)?;
        }
        let l3 = b.judgement(k).antecedents.len() - 1;
        if l3 != 0 {
            k = b.move_antecedent(k, l3, 0)?;
        }
        k = b.fold_ctx_as(k, c)?;
        let i = b.hyp(j)?;
        let out = b.cut(i, k)?;
        b.unfold_fully(out)
    })
}

pub(super) fn shift_imp_cons_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    fact: &FactProof,
    fin_y: &FinJust,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let c = &j.consequent;
        let Formula::Limp(x, y) = factor_at(c, pos).clone() else {
            return Err(err("shift expects an implication consequent factor".into()));
        };
        let c2 = &child.consequent;
        let xf = factor_count(&x);
        let gamma_len = child.antecedents.len() - xf;
        let mut i = b.hyp(child)?;
        i = fuse_run(b, i, gamma_len, &x)?;
        i = curry_out_last(b, i)?;
        let key = key_split(b, &x, &y, fact)?;
        let p1 = {
            let there = Formula::tensor((*x).clone(), c.clone());
            let mut k2 = b.id(&there)?;
            k2 = b.unfold_fully(k2)?;
            k2 = fuse_run(b, k2, 0, &x)?;
            let imp_pos = 1 + pos;
            if imp_pos - 1 != 0 {
                k2 = b.move_antecedent(k2, 0, imp_pos - 1)?;
            }
            let len2 = b.judgement(k2).antecedents.len();
            k2 = b.move_antecedent(k2, imp_pos - 1, len2 - 1)?;
            k2 = b.move_antecedent(k2, imp_pos - 1, len2 - 1)?;
            k2 = b.fold_last(k2)?;
            let l = b.judgement(k2).antecedents.len() - 1;
            k2 = b.replace_antecedent(k2, l, key)?;
            let l2 = b.judgement(k2).antecedents.len() - 1;
            if l2 != pos {
                k2 = b.move_antecedent(k2, l2, pos)?;
            }
            k2 = b.unfold_fully(k2)?;
            b.fold_ctx_as(k2, c2)?
        };
        let nn = {
            let h = fact.emit(b)?;
            let hf = b.fold_ctx_as(h, &y)?;
            let ny = nn_from(b, &y, fin_y)?;
            b.nn_mono(hf, ny)?
        };
        let n = b.push(
            RuleId::Limp2,
            Instantiation {
                phi: Some((*x).clone()),
                psi: Some(c.clone()),
                theta: Some(c2.clone()),
                ..Default::default()
            },
            &[p1, nn],
        )?;
        b.cut(i, n)
    })
}

pub(super) fn shift_imp_ant_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    fact: &FactProof,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let Formula::Limp(x, y) = j.antecedents[pos].clone() else {
            return Err(err("shift expects an implication antecedent factor".into()));
        };
        let t = &j.consequent;
        let carried = Formula::tensor(t.clone(), (*x).clone());
        let lem = {
            let k = b.id(&carried)?;
            let k = b.unfold_last(k)?;
            b.move_antecedent(k, 0, 1)?
        };
        let i = b.hyp(j)?;
        let mut m = b.cut(i, lem)?;
        let len = b.judgement(m).antecedents.len();
        if pos != len - 1 {
            m = b.move_antecedent(m, pos, len - 1)?;
        }
        m = b.fold_last(m)?;
        let key = key_split(b, &x, &y, fact)?;
        let l = b.judgement(m).antecedents.len() - 1;
        m = b.replace_antecedent(m, l, key)?;
        let l2 = b.judgement(m).antecedents.len() - 1;
        if l2 != pos {
            m = b.move_antecedent(m, l2, pos)?;
        }
        m = b.unfold_fully(m)?;
        if *t == Formula::Bot {
            let e = {
                let i0 = b.id(&Formula::Bot)?;
                let w = b.weak(i0, &x)?;
                b.fold_last(w)?
            };
            m = b.replace_consequent(m, e)?;
        }
        Ok(m)
    })
}

pub(super) fn shift_imp_ant_bwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    pos: usize,
    fact: &FactProof,
    fin_y: &FinJust,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, j, |b| {
        let Formula::Limp(x, y) = j.antecedents[pos].clone() else {
            return Err(err("shift expects an implication antecedent factor".into()));
        };
        let t = &j.consequent;
        let mut i = b.hyp(child)?;
        i = fuse_run(b, i, pos, &y)?;
        if *t == Formula::Bot {
            let bo = b.bot(&Formula::tensor((*x).clone(), t.clone()))?;
            i = b.replace_consequent(i, bo)?;
        } else {
            let rr = b.tensor_rearrange(
                &Formula::tensor(t.clone(), (*x).clone()),
                &Formula::tensor((*x).clone(), t.clone()),
            )?;
            i = b.replace_consequent(i, rr)?;
        }
        let len = b.judgement(i).antecedents.len();
        if pos != len - 1 {
            i = b.move_antecedent(i, pos, len - 1)?;
        }
        let nn = {
            let h = fact.emit(b)?;
            let hf = b.fold_ctx_as(h, &y)?;
            let ny = nn_from(b, &y, fin_y)?;
            b.nn_mono(hf, ny)?
        };
        let mut gamma = j.antecedents.clone();
        gamma.remove(pos);
        let l2 = b.push(
            RuleId::Limp2,
            Instantiation {
                gamma,
                phi: Some((*x).clone()),
                psi: Some(t.clone()),
                theta: Some((*y).clone()),
                ..Default::default()
            },
            &[i, nn],
        )?;
        let lo = b.judgement(l2).antecedents.len() - 1;
        if lo != pos {
            b.move_antecedent(l2, lo, pos)
        } else {
            Ok(l2)
        }
    })
}

/// Drop finite antecedent factors from a judgement whose consequent is
/// `⊥`. `fins[k]` justifies the factor at `positions[k]`; `None` means
/// the factor is a unit.
pub(super) fn drop_finite_bot_fwd(
    assumptions: &[Judgement],
    j: &Judgement,
    child: &Judgement,
    positions: &[usize],
    fins: &[Option<FinJust>],
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, child, |b| {
        let mut i = b.hyp(j)?;
        let mut left = j.antecedents.len();
        for (step, &pos) in positions.iter().enumerate() {
            let p = pos - step;
            let u = j.antecedents[pos].clone();
            let nn = match &fins[step] {
                None => b.prove_nn(&u)?,
                Some(fj) => nn_from(b, &u, fj)?,
            };
            let tn = b.thesis_to_entail(nn)?;
            if left == 1 {
                let e = b.entail_to_thesis(i)?;
                i = b.cut(e, tn)?;
            } else {
                let last = left - 1;
                if p != last {
                    i = b.move_antecedent(i, p, last)?;
                }
                i = b.fold_last(i)?;
                i = b.curry(i)?;
                i = b.cut(i, tn)?;
            }
            left -= 1;
        }
        Ok(i)
    })
}

/// Prove a split-support judgement from its branch axiom.
pub(super) fn supp_intro(
    assumptions: &[Judgement],
    axiom: &Judgement,
    supp: &Judgement,
) -> Result<(Judgement, Proof), BuildError> {
    build_one(assumptions, supp, |b| {
        let Formula::Limp(x, y) = &axiom.consequent else {
            return Err(err(format!("`{axiom}` is not a branch axiom")));
        };
        let h = b.hyp(axiom)?;
        let is_finiteness = **y == Formula::Bot
            && matches!(&**x, Formula::Limp(_, gb) if **gb == Formula::Bot);
        if is_finiteness {
            let Formula::Limp(g, _) = &**x else { unreachable!() };
            let lem = nnf_from_nn(b, g)?;
            b.cut(h, lem)
        } else {
            let e = b.thesis_to_entail(h)?;
            b.unfold_fully(e)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extval::rat;
    use crate::proofkit::sampling::random_formula;
    use crate::proofkit::{check, Verdict};
    use crate::syntax::LogicLevel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn accepted(p: &Proof, assumptions: &[Judgement]) -> bool {
        matches!(check(p, assumptions, LogicLevel::L1star), Verdict::Accepted)
    }

    #[test]
    fn canonical_equivalence_proofs_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(021_005);
        let atoms: Vec<String> = ["p", "q", "s"].map(String::from).to_vec();
        for _ in 0..120 {
            let f = random_formula(&mut rng, &atoms, 3, LogicLevel::L1star);
            let cf = canon_formula(&f);
            let mut b = ProofBuilder::new(Vec::new());
            let (fwd, bwd) = canon_equiv(&mut b, &f).expect("equivalence construction");
            assert_eq!(
                *b.judgement(fwd),
                Judgement::new(vec![f.clone()], cf.clone()),
                "forward shape for `{f}`"
            );
            assert_eq!(
                *b.judgement(bwd),
                Judgement::new(vec![cf.clone()], f.clone()),
                "backward shape for `{f}`"
            );
            let pf = b.into_proof_of(fwd);
            assert!(accepted(&pf, &[]), "forward proof for `{f}`");
        }
    }

    #[test]
    fn finiteness_translation_proofs_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7_440);
        let atoms: Vec<String> = ["p", "q"].map(String::from).to_vec();
        let mut tried = 0;
        for _ in 0..200 {
            let raw = random_formula(&mut rng, &atoms, 3, LogicLevel::L1star);
            let f = canon_formula(&raw);
            if f == Formula::Top || f == Formula::Bot {
                continue;
            }
            tried += 1;
            let mut b = ProofBuilder::new(Vec::new());
            let idx = nnf_from_nn(&mut b, &f).expect("translation construction");
            assert_eq!(
                *b.judgement(idx),
                Judgement::new(vec![Formula::not(Formula::not(f.clone()))], nnf(&f)),
                "shape for `{f}`"
            );
            let p = b.into_proof_of(idx);
            assert!(accepted(&p, &[]), "proof for `{f}`");
        }
        assert!(tried > 100);
    }

    #[test]
    fn class_constructions_use_set_facts() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        let inf_p = Judgement::new(vec![p.clone()], Formula::Bot);
        let nn_q = Judgement::thesis(Formula::not(Formula::not(q.clone())));
        let zero_q = Judgement::thesis(q.clone());
        let facts = vec![inf_p.clone(), nn_q.clone(), zero_q.clone()];

        let f = Formula::tensor(Formula::scale(rat(3, 2), p.clone()), q.clone());
        let just = known_infinite(&f, &facts).expect("left factor is pinned infinite");
        let mut b = ProofBuilder::new(facts.clone());
        let idx = ent_bot(&mut b, &f, &just).expect("construction");
        assert_eq!(
            *b.judgement(idx),
            Judgement::new(vec![f.clone()], Formula::Bot)
        );
        let proof = b.into_proof_of(idx);
        assert!(accepted(&proof, &facts));

        let g = Formula::and(
            Formula::scale(rat(5, 1), q.clone()),
            Formula::limp(p.clone(), q.clone()),
        );
        let fin = known_finite(&g, &facts).expect("both sides are pinned finite");
        let mut b2 = ProofBuilder::new(facts.clone());
        let idx2 = nn_from(&mut b2, &g, &fin).expect("construction");
        assert_eq!(
            *b2.judgement(idx2),
            Judgement::thesis(Formula::not(Formula::not(g.clone())))
        );
        let proof2 = b2.into_proof_of(idx2);
        assert!(accepted(&proof2, &facts));

        let mut used = Vec::new();
        fin.uses(&mut used);
        assert!(used.contains(&nn_q) || used.contains(&zero_q));
    }

    #[test]
    fn support_shapes() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        let imp = Judgement::thesis(Formula::limp(
            Formula::tensor(p.clone(), q.clone()),
            q.clone(),
        ));
        assert_eq!(
            split_support(&imp),
            vec![Judgement::new(vec![p.clone(), q.clone()], q.clone())]
        );
        let neg = Judgement::thesis(Formula::not(Formula::tensor(p.clone(), q.clone())));
        assert_eq!(
            split_support(&neg),
            vec![Judgement::new(
                vec![p.clone(), q.clone()],
                Formula::Bot
            )]
        );
        let nn = Judgement::thesis(Formula::not(Formula::not(Formula::tensor(
            p.clone(),
            Formula::scale(rat(2, 1), q.clone()),
        ))));
        assert_eq!(
            split_support(&nn),
            vec![Judgement::thesis(Formula::and(
                Formula::not(Formula::not(p.clone())),
                Formula::not(Formula::not(q.clone())),
            ))]
        );
        let nn_unit = Judgement::thesis(Formula::not(Formula::not(Formula::One)));
        assert_eq!(split_support(&nn_unit), Vec::new());
    }

    #[test]
    fn support_introduction_proofs_check() {
        let p = Formula::atom("p");
        let q = Formula::atom("q");
        for axiom in [
            Judgement::thesis(Formula::limp(Formula::tensor(p.clone(), q.clone()), q.clone())),
            Judgement::thesis(Formula::not(Formula::tensor(p.clone(), q.clone()))),
            Judgement::thesis(Formula::not(Formula::not(Formula::or(
                p.clone(),
                Formula::limp(p.clone(), q.clone()),
            )))),
            Judgement::thesis(Formula::not(Formula::not(Formula::not(p.clone())))),
        ] {
            let assumptions = vec![axiom.clone()];
            for supp in split_support(&axiom) {
                let (jj, proof) =
                    supp_intro(&assumptions, &axiom, &supp).expect("introduction construction");
                assert_eq!(jj, supp);
                assert!(
                    matches!(
                        check(&proof, &assumptions, LogicLevel::L1star),
                        Verdict::Accepted
                    ),
                    "support proof for `{axiom}`"
                );
            }
        }
    }
}
