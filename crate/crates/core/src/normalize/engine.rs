//! Worklist construction of the branch tree.
//!
//! Each pass looks at one node's judgement set and either closes it as a
//! leaf, rewrites it into a single child, or splits it on an axiom of the
//! logic. Rewrites that need a fact consult the rest of the set, never the
//! judgement being rewritten, so every recorded proof can cite its
//! supporting judgements as hypotheses of the surrounding node.

use std::collections::{BTreeMap, BTreeSet};
use std::slice::from_ref;

use num_traits::Zero as _;

use super::evidence::{
    self, derive_fact, known_finite, known_infinite, remove_factors, replace_factor,
    split_support, DropWhy, FinJust, InfJust,
};
use super::{
    as_nn_atom, canonical_work, classify, is_unit_factor, mk_tensor, Assertive, BranchTree, Edge,
    EdgeProofs, Node, NodeId, NodeKind, NormalJudgement, NormalTheory, NormalizeError,
    NormalizeOptions,
};
use crate::proofkit::builder::tensor_factors;
use crate::proofkit::{BuildError, Proof};
use crate::syntax::{Formula, Judgement, PropName};

fn ev(e: BuildError) -> NormalizeError {
    NormalizeError::Evidence(e.to_string())
}

/// What one pass decided to do with a node's judgement set.
enum Step {
    Close(NormalTheory),
    Rewrite { rule: &'static str, plan: Plan },
    Split { rule: &'static str, pair: (Judgement, Judgement), sides: Box<(Plan, Plan)> },
}

/// A child set plus the material for the edge leading to it.
struct Plan {
    child: Vec<Judgement>,
    uses: Vec<Judgement>,
    fwd: Vec<(Judgement, Proof)>,
    bwd: Vec<(Judgement, Proof)>,
}

fn dedup_keep_first(v: Vec<Judgement>) -> Vec<Judgement> {
    let mut out: Vec<Judgement> = Vec::with_capacity(v.len());
    for j in v {
        if !out.contains(&j) {
            out.push(j);
        }
    }
    out
}

fn without(set: &[Judgement], slot: usize) -> Vec<Judgement> {
    let mut out = set.to_vec();
    out.remove(slot);
    out
}

fn replace_slot(set: &[Judgement], slot: usize, with: &[Judgement]) -> Vec<Judgement> {
    let mut out = Vec::with_capacity(set.len() + with.len());
    for (i, j) in set.iter().enumerate() {
        if i == slot {
            out.extend(with.iter().cloned());
        } else {
            out.push(j.clone());
        }
    }
    dedup_keep_first(out)
}

fn factor_prop(f: &Formula) -> Option<&PropName> {
    match f {
        Formula::Atom(p) => Some(p),
        Formula::Scale(_, body) => match &**body {
            Formula::Atom(p) => Some(p),
            _ => None,
        },
        _ => None,
    }
}

fn inconsistent_theory() -> NormalTheory {
    NormalTheory::from_iter([NormalJudgement::Inconsistent])
}

pub(super) fn run(
    judgements: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<BranchTree, NormalizeError> {
    let original: Vec<Judgement> = judgements.to_vec();
    let work = dedup_keep_first(original.iter().map(canonical_work).collect());

    let mut tree = BranchTree { nodes: Vec::new(), level: opts.level };
    tree.nodes.push(Node {
        judgements: original.clone(),
        kind: NodeKind::Leaf(NormalTheory::default()),
    });

    let mut pending: Vec<NodeId> = Vec::new();
    if work == original {
        pending.push(0);
    } else {
        let proofs = if opts.record_proofs {
            Some(canonicalize_proofs(&original, &work)?)
        } else {
            None
        };
        tree.nodes.push(Node {
            judgements: work.clone(),
            kind: NodeKind::Leaf(NormalTheory::default()),
        });
        tree.nodes[0].kind = NodeKind::Rewrite {
            edge: Edge { rule: "canonicalize", uses: Vec::new(), proofs },
            child: 1,
        };
        pending.push(1);
    }

    let mut steps = 0usize;
    while let Some(id) = pending.pop() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(NormalizeError::BudgetExhausted);
        }
        let set = tree.nodes[id].judgements.clone();
        let step = pass(&set, opts)?;
        if std::env::var("LAWQ_TRACE").is_ok() {
            let name = match &step {
                Step::Close(_) => "close".to_string(),
                Step::Rewrite { rule, .. } => format!("rw:{rule}"),
                Step::Split { rule, .. } => format!("sp:{rule}"),
            };
            let js: Vec<String> = set.iter().map(|j| j.to_string()).collect();
            println!("STEP {steps} node {id} [{}] -> {name}", js.join(" ; "));
        }
        match step {
            Step::Close(theory) => {
                tree.nodes[id].kind = NodeKind::Leaf(theory);
            }
            Step::Rewrite { rule, plan } => {
                if plan.child == set {
                    return Err(stalled(rule));
                }
                let child_id = tree.nodes.len();
                tree.nodes.push(Node {
                    judgements: plan.child.clone(),
                    kind: NodeKind::Leaf(NormalTheory::default()),
                });
                let edge = finish_edge(rule, &set, plan, opts);
                tree.nodes[id].kind = NodeKind::Rewrite { edge, child: child_id };
                pending.push(child_id);
            }
            Step::Split { rule, pair, sides } => {
                let (left, right) = *sides;
                if left.child == set || right.child == set {
                    return Err(stalled(rule));
                }
                let left_id = tree.nodes.len();
                tree.nodes.push(Node {
                    judgements: left.child.clone(),
                    kind: NodeKind::Leaf(NormalTheory::default()),
                });
                let right_id = tree.nodes.len();
                tree.nodes.push(Node {
                    judgements: right.child.clone(),
                    kind: NodeKind::Leaf(NormalTheory::default()),
                });
                let left_edge = finish_edge(rule, &set, left, opts);
                let right_edge = finish_edge(rule, &set, right, opts);
                tree.nodes[id].kind = NodeKind::Split {
                    pair,
                    left: left_edge,
                    right: right_edge,
                    children: (left_id, right_id),
                };
                pending.push(right_id);
                pending.push(left_id);
            }
        }
    }
    Ok(tree)
}

fn stalled(rule: &str) -> NormalizeError {
    NormalizeError::Evidence(format!("rule `{rule}` made no progress"))
}

/// Keep only proofs for judgements actually gained or lost along the edge,
/// and only fact citations that name members of the parent set.
fn finish_edge(rule: &'static str, parent: &[Judgement], plan: Plan, opts: &NormalizeOptions) -> Edge {
    let Plan { child, uses, fwd, bwd } = plan;
    let mut uses = dedup_keep_first(uses);
    uses.retain(|u| parent.contains(u));
    let proofs = if opts.record_proofs {
        Some(EdgeProofs {
            forward: diff_filter(fwd, &child, parent),
            backward: diff_filter(bwd, parent, &child),
        })
    } else {
        None
    };
    Edge { rule, uses, proofs }
}

fn diff_filter(
    pairs: Vec<(Judgement, Proof)>,
    keep_in: &[Judgement],
    drop_in: &[Judgement],
) -> Vec<(Judgement, Proof)> {
    let mut out: Vec<(Judgement, Proof)> = Vec::new();
    for (j, p) in pairs {
        if keep_in.contains(&j) && !drop_in.contains(&j) && !out.iter().any(|(k, _)| *k == j) {
            out.push((j, p));
        }
    }
    out
}

fn canonicalize_proofs(
    parent: &[Judgement],
    child: &[Judgement],
) -> Result<EdgeProofs, NormalizeError> {
    let mut forward = Vec::new();
    for w in child {
        if parent.contains(w) {
            continue;
        }
        let orig = parent
            .iter()
            .find(|o| canonical_work(o) == *w)
            .expect("every working form comes from some input judgement");
        forward.push(evidence::canonicalize_fwd(parent, orig, w).map_err(ev)?);
    }
    let mut backward = Vec::new();
    for o in parent {
        if child.contains(o) {
            continue;
        }
        backward.push(evidence::canonicalize_bwd(child, o, &canonical_work(o)).map_err(ev)?);
    }
    Ok(EdgeProofs { forward, backward })
}

fn pass(set: &[Judgement], opts: &NormalizeOptions) -> Result<Step, NormalizeError> {
    let classes: Vec<Option<NormalJudgement>> = set.iter().map(classify).collect();

    if unsatisfiable_on_sight(&classes) {
        return Ok(Step::Close(inconsistent_theory()));
    }

    if let Some(step) = drop_tautology(set, &classes, opts)? {
        return Ok(step);
    }
    if let Some(step) = subsume_finitist(set, opts)? {
        return Ok(step);
    }
    if let Some(step) = discharge_infinite(set, opts)? {
        return Ok(step);
    }
    if let Some(step) = collapse_infinite(set, opts)? {
        return Ok(step);
    }
    if let Some(step) = eliminate_zero(set, opts)? {
        return Ok(step);
    }
    if let Some(step) = rescale(set, opts)? {
        return Ok(step);
    }
    if let Some(step) = split_zeroes(set, &classes, opts)? {
        return Ok(step);
    }

    if classes.iter().all(Option::is_some) {
        let theory = NormalTheory::from_iter(classes.into_iter().flatten());
        if opts.saturate {
            let assertives = theory.assertives();
            if let Some(p) = theory.props().into_iter().find(|p| !assertives.contains_key(p)) {
                return saturate_split(set, &p, opts);
            }
        }
        return Ok(Step::Close(theory));
    }

    let slot = classes.iter().position(Option::is_none).expect("some judgement is not normal");
    structural(set, slot, opts)
}

/// A member no model can satisfy closes the branch immediately, as does a
/// pair of members pinning the same proposition to incompatible classes.
fn unsatisfiable_on_sight(classes: &[Option<NormalJudgement>]) -> bool {
    let mut zero: BTreeSet<&PropName> = BTreeSet::new();
    let mut finite: BTreeSet<&PropName> = BTreeSet::new();
    let mut infinite: BTreeSet<&PropName> = BTreeSet::new();
    for cls in classes {
        match cls {
            Some(NormalJudgement::Inconsistent) => return true,
            Some(NormalJudgement::Affine(aff))
                if aff.lhs.is_empty() && aff.lconst < aff.rconst =>
            {
                // values are nonnegative, so the right side stays above its
                // constant while the left side equals its constant
                return true;
            }
            Some(nj) => {
                if let Some((p, kind)) = nj.assertive() {
                    match kind {
                        Assertive::Zero => {
                            zero.insert(p);
                        }
                        Assertive::Finitist => {
                            finite.insert(p);
                        }
                        Assertive::Infinite => {
                            infinite.insert(p);
                        }
                    }
                }
            }
            None => {}
        }
    }
    infinite.iter().any(|p| zero.contains(*p) || finite.contains(*p))
}

fn drop_tautology(
    set: &[Judgement],
    classes: &[Option<NormalJudgement>],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    let Some(slot) =
        classes.iter().position(|c| matches!(c, Some(NormalJudgement::Tautological)))
    else {
        return Ok(None);
    };
    let child = without(set, slot);
    let mut bwd = Vec::new();
    if opts.record_proofs {
        bwd.push(evidence::drop_tautology_bwd(&child, &set[slot]).map_err(ev)?);
    }
    Ok(Some(Step::Rewrite {
        rule: "drop-tautology",
        plan: Plan { child, uses: Vec::new(), fwd: Vec::new(), bwd },
    }))
}

fn subsume_finitist(
    set: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    for (slot, j) in set.iter().enumerate() {
        if !j.antecedents.is_empty() {
            continue;
        }
        let Some(p) = as_nn_atom(&j.consequent) else { continue };
        let zero = Judgement::thesis(Formula::atom(p.clone()));
        if !set.iter().enumerate().any(|(k, o)| k != slot && *o == zero) {
            continue;
        }
        let child = without(set, slot);
        let mut bwd = Vec::new();
        if opts.record_proofs {
            bwd.push(evidence::subsume_finitist_bwd(&child, j, &zero).map_err(ev)?);
        }
        return Ok(Some(Step::Rewrite {
            rule: "subsume-finitist",
            plan: Plan { child, uses: vec![zero], fwd: Vec::new(), bwd },
        }));
    }
    Ok(None)
}

fn discharge_infinite(
    set: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    for slot in 0..set.len() {
        let j = &set[slot];
        let facts = without(set, slot);
        for (pos, f) in j.antecedents.iter().enumerate() {
            let Some(just) = known_infinite(f, &facts) else { continue };
            let child = facts.clone();
            let mut uses = Vec::new();
            just.uses(&mut uses);
            let mut bwd = Vec::new();
            if opts.record_proofs {
                bwd.push(evidence::discharge_bwd(&child, j, pos, &just).map_err(ev)?);
            }
            return Ok(Some(Step::Rewrite {
                rule: "discharge-infinite",
                plan: Plan { child, uses, fwd: Vec::new(), bwd },
            }));
        }
    }
    Ok(None)
}

fn collapse_infinite(
    set: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    for slot in 0..set.len() {
        let j = &set[slot];
        if j.consequent == Formula::Bot {
            continue;
        }
        let facts = without(set, slot);
        let Some(just) = known_infinite(&j.consequent, &facts) else { continue };
        let child_j = Judgement::new(j.antecedents.clone(), Formula::Bot);
        let child = replace_slot(set, slot, from_ref(&child_j));
        let mut uses = Vec::new();
        just.uses(&mut uses);
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            fwd.push(evidence::collapse_fwd(set, j, &child_j, &just).map_err(ev)?);
            bwd.push(evidence::collapse_bwd(&child, j, &child_j).map_err(ev)?);
        }
        return Ok(Some(Step::Rewrite {
            rule: "collapse-infinite",
            plan: Plan { child, uses, fwd, bwd },
        }));
    }
    Ok(None)
}

fn eliminate_zero(
    set: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    let mut zeros: BTreeMap<PropName, Judgement> = BTreeMap::new();
    for j in set {
        if j.antecedents.is_empty() {
            if let Formula::Atom(p) = &j.consequent {
                zeros.entry(p.clone()).or_insert_with(|| j.clone());
            }
        }
    }
    if zeros.is_empty() {
        return Ok(None);
    }
    for slot in 0..set.len() {
        let j = &set[slot];
        let usable = |p: &PropName| zeros.get(p).is_some_and(|f| f != j);
        let is_zero_factor = |f: &Formula| factor_prop(f).is_some_and(&usable);
        let ant_rm: Vec<usize> = j
            .antecedents
            .iter()
            .enumerate()
            .filter(|(_, f)| is_zero_factor(f))
            .map(|(i, _)| i)
            .collect();
        let cons_rm: BTreeSet<usize> = if j.consequent == Formula::Bot {
            BTreeSet::new()
        } else {
            tensor_factors(&j.consequent)
                .into_iter()
                .enumerate()
                .filter(|(_, f)| is_zero_factor(f))
                .map(|(i, _)| i)
                .collect()
        };
        if ant_rm.is_empty() && cons_rm.is_empty() {
            continue;
        }
        let ants: Vec<Formula> = j
            .antecedents
            .iter()
            .enumerate()
            .filter(|(i, _)| !ant_rm.contains(i))
            .map(|(_, f)| f.clone())
            .collect();
        let cons = if cons_rm.is_empty() {
            j.consequent.clone()
        } else {
            remove_factors(&j.consequent, &cons_rm)
        };
        let child_j = Judgement::new(ants, cons);
        let child = replace_slot(set, slot, from_ref(&child_j));
        let mut uses = Vec::new();
        for f in j.antecedents.iter().chain(tensor_factors(&j.consequent)) {
            if let Some(p) = factor_prop(f) {
                if usable(p) {
                    uses.push(zeros[p].clone());
                }
            }
        }
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            fwd.push(
                evidence::eliminate_zero_fwd(set, j, &child_j, &ant_rm, &cons_rm, &zeros)
                    .map_err(ev)?,
            );
            bwd.push(
                evidence::eliminate_zero_bwd(&child, j, &child_j, &ant_rm, &cons_rm, &zeros)
                    .map_err(ev)?,
            );
        }
        return Ok(Some(Step::Rewrite {
            rule: "eliminate-zero",
            plan: Plan { child, uses, fwd, bwd },
        }));
    }
    Ok(None)
}

fn rescale(set: &[Judgement], opts: &NormalizeOptions) -> Result<Option<Step>, NormalizeError> {
    for slot in 0..set.len() {
        let j = &set[slot];
        if j.consequent != Formula::Bot || j.antecedents.len() != 1 {
            continue;
        }
        let Formula::Scale(r, body) = &j.antecedents[0] else { continue };
        if !matches!(&**body, Formula::Atom(_)) {
            continue;
        }
        let child_j = Judgement::new(vec![(**body).clone()], Formula::Bot);
        let child = replace_slot(set, slot, from_ref(&child_j));
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            fwd.push(evidence::rescale_fwd(set, j, &child_j, r, body).map_err(ev)?);
            bwd.push(evidence::rescale_bwd(&child, j, &child_j, r).map_err(ev)?);
        }
        return Ok(Some(Step::Rewrite {
            rule: "rescale",
            plan: Plan { child, uses: Vec::new(), fwd, bwd },
        }));
    }
    Ok(None)
}

/// A thesis whose affine reading is `0 >= sum of propositions` pins every
/// one of those propositions to zero.
fn split_zeroes(
    set: &[Judgement],
    classes: &[Option<NormalJudgement>],
    opts: &NormalizeOptions,
) -> Result<Option<Step>, NormalizeError> {
    for (slot, cls) in classes.iter().enumerate() {
        let Some(NormalJudgement::Affine(aff)) = cls else { continue };
        if !(aff.lhs.is_empty()
            && aff.lconst.is_zero()
            && aff.rconst.is_zero()
            && !aff.rhs.is_empty())
        {
            continue;
        }
        let j = &set[slot];
        let facs = tensor_factors(&j.consequent);
        let mut zeros: BTreeMap<PropName, Judgement> = BTreeMap::new();
        let mut new_js: Vec<Judgement> = Vec::new();
        for p in aff.rhs.keys() {
            let fact = Judgement::thesis(Formula::atom(p.clone()));
            zeros.insert(p.clone(), fact.clone());
            new_js.push(fact);
        }
        let child = replace_slot(set, slot, &new_js);
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            for p in aff.rhs.keys() {
                let pos = facs
                    .iter()
                    .position(|f| factor_prop(f) == Some(p))
                    .expect("the affine reading saw this proposition");
                fwd.push(evidence::split_zeroes_fwd(set, j, &zeros[p], pos).map_err(ev)?);
            }
            bwd.push(evidence::split_zeroes_bwd(&child, j, &zeros).map_err(ev)?);
        }
        return Ok(Some(Step::Rewrite {
            rule: "split-zeroes",
            plan: Plan { child, uses: Vec::new(), fwd, bwd },
        }));
    }
    Ok(None)
}

fn wem_pair(core: &Formula) -> (Judgement, Judgement) {
    let neg = Formula::not(core.clone());
    (Judgement::thesis(neg.clone()), Judgement::thesis(Formula::not(neg)))
}

/// Every proposition of a leaf theory must carry an assertive, so an
/// unpinned one is split on whether its value is infinite.
fn saturate_split(
    set: &[Judgement],
    p: &PropName,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let pair = wem_pair(&Formula::atom(p.clone()));
    let mut plans = Vec::with_capacity(2);
    for thesis in [&pair.0, &pair.1] {
        let supps = split_support(thesis);
        let mut child: Vec<Judgement> = supps.clone();
        child.extend_from_slice(set);
        let child = dedup_keep_first(child);
        let mut fwd = Vec::new();
        if opts.record_proofs {
            let mut assumps = set.to_vec();
            assumps.push(thesis.clone());
            for s in &supps {
                if !set.contains(s) {
                    fwd.push(evidence::supp_intro(&assumps, thesis, s).map_err(ev)?);
                }
            }
        }
        plans.push(Plan { child, uses: Vec::new(), fwd, bwd: Vec::new() });
    }
    let right = plans.pop().unwrap();
    let left = plans.pop().unwrap();
    Ok(Step::Split { rule: "saturate", pair, sides: Box::new((left, right)) })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SlotSide {
    Ant,
    Cons,
}

fn factor_of(j: &Judgement, side: SlotSide, pos: usize) -> Formula {
    match side {
        SlotSide::Ant => j.antecedents[pos].clone(),
        SlotSide::Cons => tensor_factors(&j.consequent)[pos].clone(),
    }
}

fn structural(
    set: &[Judgement],
    slot: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    for (pos, f) in j.antecedents.iter().enumerate() {
        match f {
            Formula::And(..) => return conjunct_split(set, slot, pos, opts),
            Formula::Or(..) => return branch_disjunct(set, slot, pos, opts),
            Formula::Limp(..) => return implication_factor(set, slot, SlotSide::Ant, pos, opts),
            _ => {}
        }
    }
    if j.consequent != Formula::Bot {
        let facs: Vec<Formula> =
            tensor_factors(&j.consequent).into_iter().cloned().collect();
        for (pos, f) in facs.iter().enumerate() {
            match f {
                Formula::And(..) => return branch_conjunct(set, slot, pos, opts),
                Formula::Or(..) => return disjunct_split(set, slot, pos, opts),
                Formula::Limp(..) => {
                    return implication_factor(set, slot, SlotSide::Cons, pos, opts)
                }
                _ => {}
            }
        }
    }
    bottom_split(set, slot, opts)
}

/// max(a, b) in an antecedent: branch on which argument realizes it.
fn conjunct_split(
    set: &[Judgement],
    slot: usize,
    pos: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    let Formula::And(a, b) = j.antecedents[pos].clone() else { unreachable!() };
    let mut theses = Vec::with_capacity(2);
    let mut plans = Vec::with_capacity(2);
    for keep_left in [true, false] {
        let (kept, other) = if keep_left { (&*a, &*b) } else { (&*b, &*a) };
        let thesis = Judgement::thesis(Formula::limp(kept.clone(), other.clone()));
        let supps = split_support(&thesis);
        let mut ants = j.antecedents.clone();
        ants.splice(pos..pos + 1, tensor_factors(kept).into_iter().cloned());
        let child_j = Judgement::new(ants, j.consequent.clone());
        let mut child: Vec<Judgement> = supps.clone();
        child.extend(replace_slot(set, slot, from_ref(&child_j)));
        let child = dedup_keep_first(child);
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            let mut supp_assumps = set.to_vec();
            supp_assumps.push(thesis.clone());
            for s in &supps {
                if !set.contains(s) {
                    fwd.push(evidence::supp_intro(&supp_assumps, &thesis, s).map_err(ev)?);
                }
            }
            let mut assumps = supp_assumps.clone();
            assumps.extend(supps.iter().cloned());
            let supp = supps.first().expect("a comparison axiom always has support");
            fwd.push(
                evidence::pick_conjunct_fwd(&assumps, j, &child_j, pos, keep_left, supp)
                    .map_err(ev)?,
            );
            bwd.push(evidence::pick_conjunct_bwd(&child, j, &child_j, pos, keep_left).map_err(ev)?);
        }
        theses.push(thesis);
        plans.push(Plan { child, uses: Vec::new(), fwd, bwd });
    }
    let right_plan = plans.pop().unwrap();
    let left_plan = plans.pop().unwrap();
    let right_th = theses.pop().unwrap();
    let left_th = theses.pop().unwrap();
    Ok(Step::Split {
        rule: "split-conjunct",
        pair: (left_th, right_th),
        sides: Box::new((left_plan, right_plan)),
    })
}

/// min(a, b) in an antecedent: the judgement must hold under either
/// argument, so both replacements join the same child set.
fn branch_disjunct(
    set: &[Judgement],
    slot: usize,
    pos: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    let Formula::Or(a, b) = j.antecedents[pos].clone() else { unreachable!() };
    let make = |side: &Formula| -> Judgement {
        let mut ants = j.antecedents.clone();
        ants.splice(pos..pos + 1, tensor_factors(side).into_iter().cloned());
        Judgement::new(ants, j.consequent.clone())
    };
    let ja = make(&a);
    let jb = make(&b);
    let child = replace_slot(set, slot, &[ja.clone(), jb.clone()]);
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    if opts.record_proofs {
        fwd.push(evidence::branch_disjunct_fwd(set, j, &ja, pos, true).map_err(ev)?);
        fwd.push(evidence::branch_disjunct_fwd(set, j, &jb, pos, false).map_err(ev)?);
        bwd.push(evidence::branch_disjunct_bwd(&child, j, &ja, &jb, pos).map_err(ev)?);
    }
    Ok(Step::Rewrite {
        rule: "branch-disjunct",
        plan: Plan { child, uses: Vec::new(), fwd, bwd },
    })
}

/// max(a, b) in a consequent factor: both bounds must hold, so both
/// replacements join the same child set.
fn branch_conjunct(
    set: &[Judgement],
    slot: usize,
    pos: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    let Formula::And(x, y) = tensor_factors(&j.consequent)[pos].clone() else { unreachable!() };
    let ja = Judgement::new(j.antecedents.clone(), replace_factor(&j.consequent, pos, &x));
    let jb = Judgement::new(j.antecedents.clone(), replace_factor(&j.consequent, pos, &y));
    let child = replace_slot(set, slot, &[ja.clone(), jb.clone()]);
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    if opts.record_proofs {
        fwd.push(evidence::branch_conjunct_fwd(set, j, &ja, pos, true).map_err(ev)?);
        fwd.push(evidence::branch_conjunct_fwd(set, j, &jb, pos, false).map_err(ev)?);
        bwd.push(evidence::branch_conjunct_bwd(&child, j, &ja, &jb, pos).map_err(ev)?);
    }
    Ok(Step::Rewrite {
        rule: "branch-conjunct",
        plan: Plan { child, uses: Vec::new(), fwd, bwd },
    })
}

/// min(x, y) in a consequent factor: branch on which argument realizes it.
fn disjunct_split(
    set: &[Judgement],
    slot: usize,
    pos: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    let Formula::Or(x, y) = tensor_factors(&j.consequent)[pos].clone() else { unreachable!() };
    let mut theses = Vec::with_capacity(2);
    let mut plans = Vec::with_capacity(2);
    for keep_left in [true, false] {
        let (kept, other) = if keep_left { (&*x, &*y) } else { (&*y, &*x) };
        let thesis = Judgement::thesis(Formula::limp(other.clone(), kept.clone()));
        let supps = split_support(&thesis);
        let child_j =
            Judgement::new(j.antecedents.clone(), replace_factor(&j.consequent, pos, kept));
        let mut child: Vec<Judgement> = supps.clone();
        child.extend(replace_slot(set, slot, from_ref(&child_j)));
        let child = dedup_keep_first(child);
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            let mut supp_assumps = set.to_vec();
            supp_assumps.push(thesis.clone());
            for s in &supps {
                if !set.contains(s) {
                    fwd.push(evidence::supp_intro(&supp_assumps, &thesis, s).map_err(ev)?);
                }
            }
            let mut assumps = supp_assumps.clone();
            assumps.extend(supps.iter().cloned());
            let supp = supps.first().expect("a comparison axiom always has support");
            fwd.push(
                evidence::pick_disjunct_fwd(&assumps, j, &child_j, pos, keep_left, supp)
                    .map_err(ev)?,
            );
            bwd.push(evidence::pick_disjunct_bwd(&child, j, &child_j, pos, keep_left).map_err(ev)?);
        }
        theses.push(thesis);
        plans.push(Plan { child, uses: Vec::new(), fwd, bwd });
    }
    let right_plan = plans.pop().unwrap();
    let left_plan = plans.pop().unwrap();
    let right_th = theses.pop().unwrap();
    let left_th = theses.pop().unwrap();
    Ok(Step::Split {
        rule: "split-disjunct",
        pair: (left_th, right_th),
        sides: Box::new((left_plan, right_plan)),
    })
}

/// Resolve an implication factor. If the set already determines enough of
/// its parts the factor rewrites in place; otherwise the node splits on an
/// axiom chosen to make both sides determined or at least informative.
fn implication_factor(
    set: &[Judgement],
    slot: usize,
    side: SlotSide,
    pos: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    if let Some((rule, plan)) = imp_gates(set, slot, side, pos, set, opts)? {
        return Ok(Step::Rewrite { rule, plan });
    }
    let j = &set[slot];
    let Formula::Limp(x, y) = factor_of(j, side, pos) else { unreachable!() };
    let facts = without(set, slot);
    let yx = canonical_work(&Judgement::entail((*y).clone(), (*x).clone()));
    let (pair, rule) = if known_infinite(&y, &facts).is_some() {
        (wem_pair(evidence::strip_negs(&x)), "split-wem")
    } else if derive_fact(&facts, &yx, false).map_err(ev)?.is_some() {
        (wem_pair(evidence::strip_negs(&y)), "split-wem")
    } else {
        let lt = Judgement::thesis(Formula::limp((*x).clone(), (*y).clone()));
        let rt = Judgement::thesis(Formula::limp((*y).clone(), (*x).clone()));
        ((lt, rt), "split-compare")
    };
    gate_split(set, slot, side, pos, pair, rule, opts)
}

/// The in-place resolutions for an implication factor, tried in order:
/// a theorem factor drops, an infinite factor collapses or discharges its
/// judgement, and a finite bounded factor shifts across the turnstile.
fn imp_gates(
    cur: &[Judgement],
    slot: usize,
    side: SlotSide,
    pos: usize,
    fwd_assumps: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Option<(&'static str, Plan)>, NormalizeError> {
    let j = &cur[slot];
    let Formula::Limp(x, y) = factor_of(j, side, pos) else {
        unreachable!("gates run on an implication factor");
    };
    let facts = without(cur, slot);

    let why = if let Some(just) = known_infinite(&x, &facts) {
        Some(DropWhy::AntInfinite(just))
    } else {
        let fact = canonical_work(&Judgement::entail((*x).clone(), (*y).clone()));
        derive_fact(&facts, &fact, opts.record_proofs).map_err(ev)?.map(DropWhy::Entailed)
    };
    if let Some(why) = why {
        let plan = drop_implication(cur, slot, side, pos, &why, fwd_assumps, opts)?;
        return Ok(Some(("drop-implication", plan)));
    }

    if let Some(jy) = known_infinite(&y, &facts) {
        let Some(fx) = known_finite(&x, &facts) else {
            return Ok(None);
        };
        let mut uses = Vec::new();
        jy.uses(&mut uses);
        fx.uses(&mut uses);
        match side {
            SlotSide::Cons => {
                let mut just = InfJust::Imp(Box::new(jy), Box::new(fx));
                for step_right in evidence::factor_path(&j.consequent, pos).into_iter().rev() {
                    just = if step_right {
                        InfJust::TensorR(Box::new(just))
                    } else {
                        InfJust::TensorL(Box::new(just))
                    };
                }
                let child_j = Judgement::new(j.antecedents.clone(), Formula::Bot);
                let child = replace_slot(cur, slot, from_ref(&child_j));
                let mut fwd = Vec::new();
                let mut bwd = Vec::new();
                if opts.record_proofs {
                    fwd.push(evidence::collapse_fwd(fwd_assumps, j, &child_j, &just).map_err(ev)?);
                    bwd.push(evidence::collapse_bwd(&child, j, &child_j).map_err(ev)?);
                }
                return Ok(Some(("collapse-infinite", Plan { child, uses, fwd, bwd })));
            }
            SlotSide::Ant => {
                let just = InfJust::Imp(Box::new(jy), Box::new(fx));
                let child = without(cur, slot);
                let mut bwd = Vec::new();
                if opts.record_proofs {
                    bwd.push(evidence::discharge_bwd(&child, j, pos, &just).map_err(ev)?);
                }
                return Ok(Some((
                    "discharge-infinite",
                    Plan { child, uses, fwd: Vec::new(), bwd },
                )));
            }
        }
    }

    let fact_yx = canonical_work(&Judgement::entail((*y).clone(), (*x).clone()));
    if let Some(fy) = known_finite(&y, &facts) {
        let Some(fp) = derive_fact(&facts, &fact_yx, opts.record_proofs).map_err(ev)? else {
            return Ok(None);
        };
        let mut uses = fp.members.clone();
        fy.uses(&mut uses);
        match side {
            SlotSide::Cons => {
                let mut ants = j.antecedents.clone();
                ants.extend(tensor_factors(&x).into_iter().cloned());
                let child_j = Judgement::new(ants, replace_factor(&j.consequent, pos, &y));
                let child = replace_slot(cur, slot, from_ref(&child_j));
                let mut fwd = Vec::new();
                let mut bwd = Vec::new();
                if opts.record_proofs {
                    fwd.push(evidence::shift_imp_cons_fwd(fwd_assumps, j, &child_j, pos).map_err(ev)?);
                    bwd.push(
                        evidence::shift_imp_cons_bwd(&child, j, &child_j, pos, &fp, &fy)
                            .map_err(ev)?,
                    );
                }
                return Ok(Some(("shift-implication", Plan { child, uses, fwd, bwd })));
            }
            SlotSide::Ant => {
                let mut ants = j.antecedents.clone();
                ants.splice(pos..pos + 1, tensor_factors(&y).into_iter().cloned());
                let child_j = Judgement::new(ants, mk_tensor(j.consequent.clone(), (*x).clone()));
                let child = replace_slot(cur, slot, from_ref(&child_j));
                let mut fwd = Vec::new();
                let mut bwd = Vec::new();
                if opts.record_proofs {
                    fwd.push(
                        evidence::shift_imp_ant_fwd(fwd_assumps, j, &child_j, pos, &fp)
                            .map_err(ev)?,
                    );
                    bwd.push(
                        evidence::shift_imp_ant_bwd(&child, j, &child_j, pos, &fp, &fy)
                            .map_err(ev)?,
                    );
                }
                return Ok(Some(("shift-implication", Plan { child, uses, fwd, bwd })));
            }
        }
    }
    Ok(None)
}

fn drop_implication(
    cur: &[Judgement],
    slot: usize,
    side: SlotSide,
    pos: usize,
    why: &DropWhy,
    fwd_assumps: &[Judgement],
    opts: &NormalizeOptions,
) -> Result<Plan, NormalizeError> {
    let j = &cur[slot];
    let mut uses = Vec::new();
    why.uses(&mut uses);
    match side {
        SlotSide::Ant => {
            let mut ants = j.antecedents.clone();
            ants.remove(pos);
            let child_j = Judgement::new(ants, j.consequent.clone());
            let child = replace_slot(cur, slot, from_ref(&child_j));
            let mut fwd = Vec::new();
            let mut bwd = Vec::new();
            if opts.record_proofs {
                fwd.push(
                    evidence::drop_imp_ant_fwd(fwd_assumps, j, &child_j, pos, why).map_err(ev)?,
                );
                bwd.push(evidence::weaken_in_bwd(&child, j, &child_j, &[pos]).map_err(ev)?);
            }
            Ok(Plan { child, uses, fwd, bwd })
        }
        SlotSide::Cons => {
            let rm = BTreeSet::from([pos]);
            let child_j =
                Judgement::new(j.antecedents.clone(), remove_factors(&j.consequent, &rm));
            let child = replace_slot(cur, slot, from_ref(&child_j));
            let mut fwd = Vec::new();
            let mut bwd = Vec::new();
            if opts.record_proofs {
                fwd.push(evidence::drop_imp_cons_fwd(fwd_assumps, j, &child_j, pos).map_err(ev)?);
                bwd.push(evidence::drop_imp_cons_bwd(&child, j, &child_j, pos, why).map_err(ev)?);
            }
            Ok(Plan { child, uses, fwd, bwd })
        }
    }
}

/// Split on an axiom, then try the gates again on each side with the
/// support judgement in view. A side that stays undetermined just keeps
/// the support; the factor is revisited on a later pass.
fn gate_split(
    set: &[Judgement],
    slot: usize,
    side: SlotSide,
    pos: usize,
    pair: (Judgement, Judgement),
    rule: &'static str,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = set[slot].clone();
    let mut plans = Vec::with_capacity(2);
    for thesis in [&pair.0, &pair.1] {
        let supps = split_support(thesis);
        let mut base: Vec<Judgement> = supps.clone();
        base.extend_from_slice(set);
        let base = dedup_keep_first(base);
        let slot2 = base
            .iter()
            .position(|o| *o == j)
            .expect("the judgement under rewrite stays in the set");
        let mut fwd_assumps = set.to_vec();
        fwd_assumps.push(thesis.clone());
        fwd_assumps.extend(supps.iter().cloned());
        let determined = imp_gates(&base, slot2, side, pos, &fwd_assumps, opts)?;
        let (child, uses, fwd, bwd) = match determined {
            Some((_, plan)) => (plan.child, plan.uses, plan.fwd, plan.bwd),
            None => (base, Vec::new(), Vec::new(), Vec::new()),
        };
        let mut all_fwd = Vec::new();
        if opts.record_proofs {
            let mut supp_assumps = set.to_vec();
            supp_assumps.push(thesis.clone());
            for s in &supps {
                if !set.contains(s) {
                    all_fwd.push(evidence::supp_intro(&supp_assumps, thesis, s).map_err(ev)?);
                }
            }
            all_fwd.extend(fwd);
        }
        plans.push(Plan { child, uses, fwd: all_fwd, bwd });
    }
    let right = plans.pop().unwrap();
    let left = plans.pop().unwrap();
    Ok(Step::Split { rule, pair, sides: Box::new((left, right)) })
}

/// A bottom consequent over atomic factors: units and finitely pinned
/// factors drop out one at a time; when none remain the first proposition
/// factor is split on whether its value is infinite.
fn bottom_split(
    set: &[Judgement],
    slot: usize,
    opts: &NormalizeOptions,
) -> Result<Step, NormalizeError> {
    let j = &set[slot];
    debug_assert_eq!(j.consequent, Formula::Bot);
    let facts = without(set, slot);

    for (pos, f) in j.antecedents.iter().enumerate() {
        let fin = if is_unit_factor(f) { Some(None) } else { known_finite(f, &facts).map(Some) };
        let Some(fin) = fin else { continue };
        let mut ants = j.antecedents.clone();
        ants.remove(pos);
        let child_j = Judgement::new(ants, Formula::Bot);
        let child = replace_slot(set, slot, from_ref(&child_j));
        let mut uses = Vec::new();
        if let Some(fj) = &fin {
            fj.uses(&mut uses);
        }
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        if opts.record_proofs {
            fwd.push(
                evidence::drop_finite_bot_fwd(set, j, &child_j, &[pos], from_ref(&fin))
                    .map_err(ev)?,
            );
            bwd.push(evidence::weaken_in_bwd(&child, j, &child_j, &[pos]).map_err(ev)?);
        }
        return Ok(Step::Rewrite { rule: "drop-finite", plan: Plan { child, uses, fwd, bwd } });
    }

    let (pos0, q) = j
        .antecedents
        .iter()
        .enumerate()
        .find_map(|(i, f)| factor_prop(f).map(|p| (i, p.clone())))
        .expect("a bottom consequent over units alone is inconsistent");
    let pair = wem_pair(&Formula::atom(q.clone()));

    // left: the proposition is infinite and the judgement already holds
    let supps_l = split_support(&pair.0);
    let mut left_child: Vec<Judgement> = supps_l.clone();
    left_child.extend(without(set, slot));
    let left_child = dedup_keep_first(left_child);
    let mut left_fwd = Vec::new();
    let mut left_bwd = Vec::new();
    if opts.record_proofs {
        let mut supp_assumps = set.to_vec();
        supp_assumps.push(pair.0.clone());
        for s in &supps_l {
            if !set.contains(s) {
                left_fwd.push(evidence::supp_intro(&supp_assumps, &pair.0, s).map_err(ev)?);
            }
        }
        let fact = supps_l[0].clone();
        let just = match &j.antecedents[pos0] {
            Formula::Atom(_) => InfJust::Fact(fact),
            Formula::Scale(..) => InfJust::Scale(Box::new(InfJust::Fact(fact))),
            _ => unreachable!(),
        };
        left_bwd.push(evidence::discharge_bwd(&left_child, j, pos0, &just).map_err(ev)?);
    }
    let left = Plan { child: left_child, uses: Vec::new(), fwd: left_fwd, bwd: left_bwd };

    // right: the proposition is finite and all its factors drop at once
    let supps_r = split_support(&pair.1);
    let positions: Vec<usize> = j
        .antecedents
        .iter()
        .enumerate()
        .filter(|(_, f)| factor_prop(f) == Some(&q))
        .map(|(i, _)| i)
        .collect();
    let mut ants = j.antecedents.clone();
    for i in positions.iter().rev() {
        ants.remove(*i);
    }
    let child_j = Judgement::new(ants, Formula::Bot);
    let mut right_child: Vec<Judgement> = supps_r.clone();
    right_child.extend(replace_slot(set, slot, from_ref(&child_j)));
    let right_child = dedup_keep_first(right_child);
    let mut right_fwd = Vec::new();
    let mut right_bwd = Vec::new();
    if opts.record_proofs {
        let mut supp_assumps = set.to_vec();
        supp_assumps.push(pair.1.clone());
        for s in &supps_r {
            if !set.contains(s) {
                right_fwd.push(evidence::supp_intro(&supp_assumps, &pair.1, s).map_err(ev)?);
            }
        }
        let fact = supps_r[0].clone();
        let fins: Vec<Option<FinJust>> = positions
            .iter()
            .map(|i| {
                Some(match &j.antecedents[*i] {
                    Formula::Atom(_) => FinJust::Fact(fact.clone()),
                    Formula::Scale(..) => FinJust::Scale(Box::new(FinJust::Fact(fact.clone()))),
                    _ => unreachable!(),
                })
            })
            .collect();
        let mut assumps = supp_assumps.clone();
        assumps.extend(supps_r.iter().cloned());
        right_fwd.push(
            evidence::drop_finite_bot_fwd(&assumps, j, &child_j, &positions, &fins).map_err(ev)?,
        );
        right_bwd.push(evidence::weaken_in_bwd(&right_child, j, &child_j, &positions).map_err(ev)?);
    }
    let right = Plan { child: right_child, uses: Vec::new(), fwd: right_fwd, bwd: right_bwd };
    Ok(Step::Split { rule: "split-infinite", pair, sides: Box::new((left, right)) })
}
