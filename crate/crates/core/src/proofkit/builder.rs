//! Incremental proof construction.
//!
//! `ProofBuilder` accumulates checked steps: every push recomputes the
//! rule schema instance and verifies the referenced premises, so a
//! builder can only ever hold correct proofs and a tactic bug surfaces at
//! construction time, not at checking time. Steps are deduplicated by
//! conclusion, which keeps the generated proofs small when tactics share
//! lemmas.
//!
//! On top of the raw rules the builder offers the derived inferences the
//! rest of the crate leans on: projections and injections, modus ponens,
//! monotonicity of every connective, contraposition, thesis/entailment
//! conversions, tensor reassociation, cancellation of finite factors, and
//! case splits over supplementary pairs.

use super::{
    by_cases as assemble_by_cases, rule_instance, Instantiation, Proof, RuleId, Step,
};
use crate::extval::Rational;
use crate::syntax::{Formula, Judgement};
use num_traits::{One as _, Zero as _};
use std::collections::HashMap;

/// Failure during proof construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Rule(#[from] super::RuleError),
    #[error("tactic {tactic}: {reason}")]
    Shape { tactic: &'static str, reason: String },
    #[error("`{0}` is not among the declared assumptions")]
    NotAssumed(Judgement),
}

fn shape(tactic: &'static str, reason: impl Into<String>) -> BuildError {
    BuildError::Shape { tactic, reason: reason.into() }
}

pub struct ProofBuilder {
    steps: Vec<Step>,
    seen: HashMap<Judgement, usize>,
    assumptions: Vec<Judgement>,
}

impl ProofBuilder {
    pub fn new(assumptions: Vec<Judgement>) -> Self {
        ProofBuilder { steps: Vec::new(), seen: HashMap::new(), assumptions }
    }

    pub fn assumptions(&self) -> &[Judgement] {
        &self.assumptions
    }

    pub fn judgement(&self, idx: usize) -> &Judgement {
        &self.steps[idx].conclusion
    }

    fn ctx(&self, idx: usize) -> &[Formula] {
        &self.steps[idx].conclusion.antecedents
    }

    fn ctx_len(&self, idx: usize) -> usize {
        self.ctx(idx).len()
    }

    fn push_step(&mut self, step: Step) -> usize {
        if let Some(&i) = self.seen.get(&step.conclusion) {
            return i;
        }
        let i = self.steps.len();
        self.seen.insert(step.conclusion.clone(), i);
        self.steps.push(step);
        i
    }

    /// Apply a schematic rule. The premises must already prove exactly
    /// what the schema instance demands.
    pub fn push(
        &mut self,
        rule: RuleId,
        inst: Instantiation,
        premises: &[usize],
    ) -> Result<usize, BuildError> {
        let inference = rule_instance(&rule, &inst)?;
        if inference.premises.len() != premises.len() {
            return Err(shape(
                "push",
                format!(
                    "rule {rule} takes {} premises, {} given",
                    inference.premises.len(),
                    premises.len()
                ),
            ));
        }
        for (want, &have) in inference.premises.iter().zip(premises) {
            if self.steps[have].conclusion != *want {
                return Err(shape(
                    "push",
                    format!(
                        "premise {have} proves `{}`, rule {rule} needs `{want}`",
                        self.steps[have].conclusion
                    ),
                ));
            }
        }
        Ok(self.push_step(Step {
            conclusion: inference.conclusion,
            rule,
            premises: premises.to_vec(),
            inst,
        }))
    }

    /// Reference an assumed judgement.
    pub fn hyp(&mut self, j: &Judgement) -> Result<usize, BuildError> {
        if !self.assumptions.contains(j) {
            return Err(BuildError::NotAssumed(j.clone()));
        }
        Ok(self.push_step(Step {
            conclusion: j.clone(),
            rule: RuleId::Hyp,
            premises: vec![],
            inst: Instantiation::default(),
        }))
    }

    /// Splice a self-contained proof into this builder; returns the index
    /// proving its theorem. Hypothesis steps must be assumptions here too.
    pub fn append_proof(&mut self, p: &Proof) -> Result<usize, BuildError> {
        if p.steps.is_empty() {
            return Err(shape("append_proof", "empty proof"));
        }
        let mut map = Vec::with_capacity(p.steps.len());
        for step in &p.steps {
            let idx = match &step.rule {
                RuleId::Hyp => self.hyp(&step.conclusion)?,
                RuleId::Admissible(_) => self.push_step(Step {
                    conclusion: step.conclusion.clone(),
                    rule: step.rule.clone(),
                    premises: step.premises.iter().map(|&i| map[i]).collect(),
                    inst: step.inst.clone(),
                }),
                rule => {
                    let premises: Vec<usize> =
                        step.premises.iter().map(|&i| map[i]).collect();
                    self.push(rule.clone(), step.inst.clone(), &premises)?
                }
            };
            map.push(idx);
        }
        Ok(*map.last().unwrap())
    }

    /// Finish, making `idx` the theorem. Unreachable steps are pruned.
    pub fn into_proof_of(mut self, idx: usize) -> Proof {
        let last = self.steps.len() - 1;
        let target = if idx == last {
            idx
        } else {
            // re-derive the judgement as a final step: cut with identity
            let j = self.steps[idx].conclusion.clone();
            let id_idx = self
                .push(
                    RuleId::Id,
                    Instantiation::with_phi(j.consequent.clone()),
                    &[],
                )
                .expect("identity is always well formed");
            let inst = Instantiation {
                gamma: j.antecedents.clone(),
                phi: j.consequent.clone().into(),
                psi: j.consequent.clone().into(),
                ..Default::default()
            };
            let inference = rule_instance(&RuleId::Cut, &inst).expect("cut re-derivation");
            debug_assert_eq!(inference.conclusion, j);
            let i = self.steps.len();
            self.steps.push(Step {
                conclusion: j,
                rule: RuleId::Cut,
                premises: vec![idx, id_idx],
                inst,
            });
            i
        };
        prune(&Proof { steps: self.steps }, target)
    }

    // -- structural tactics ------------------------------------------------

    pub fn id(&mut self, phi: &Formula) -> Result<usize, BuildError> {
        self.push(RuleId::Id, Instantiation::with_phi(phi.clone()), &[])
    }

    /// `Γ |- top`.
    pub fn top(&mut self, ctx: &[Formula]) -> Result<usize, BuildError> {
        self.push(
            RuleId::Top,
            Instantiation { gamma: ctx.to_vec(), ..Default::default() },
            &[],
        )
    }

    /// `bot |- phi`.
    pub fn bot(&mut self, phi: &Formula) -> Result<usize, BuildError> {
        self.push(RuleId::Bot, Instantiation::with_phi(phi.clone()), &[])
    }

    /// Append `psi` to the context.
    pub fn weak(&mut self, idx: usize, psi: &Formula) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        self.push(
            RuleId::Weak,
            Instantiation {
                gamma: j.antecedents,
                phi: Some(j.consequent),
                psi: Some(psi.clone()),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// Swap the antecedents at `pos` and `pos + 1`.
    pub fn perm_at(&mut self, idx: usize, pos: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        if pos + 1 >= j.antecedents.len() {
            return Err(shape("perm_at", format!("no adjacent pair at {pos} in `{j}`")));
        }
        self.push(
            RuleId::Perm,
            Instantiation {
                gamma: j.antecedents[..pos].to_vec(),
                phi: Some(j.antecedents[pos].clone()),
                psi: Some(j.antecedents[pos + 1].clone()),
                delta: j.antecedents[pos + 2..].to_vec(),
                theta: Some(j.consequent),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// Move the antecedent at `from` to position `to` by adjacent swaps,
    /// preserving the relative order of everything else.
    pub fn move_antecedent(
        &mut self,
        mut idx: usize,
        from: usize,
        to: usize,
    ) -> Result<usize, BuildError> {
        if from < to {
            for p in from..to {
                idx = self.perm_at(idx, p)?;
            }
        } else {
            for p in (to..from).rev() {
                idx = self.perm_at(idx, p)?;
            }
        }
        Ok(idx)
    }

    /// Cut: the consequent of `i1` must be the last antecedent of `i2`.
    pub fn cut(&mut self, i1: usize, i2: usize) -> Result<usize, BuildError> {
        let j1 = self.judgement(i1).clone();
        let j2 = self.judgement(i2).clone();
        match j2.antecedents.last() {
            Some(last) if *last == j1.consequent => {}
            _ => {
                return Err(shape(
                    "cut",
                    format!("`{j2}` does not end with the consequent of `{j1}`"),
                ))
            }
        }
        self.push(
            RuleId::Cut,
            Instantiation {
                gamma: j1.antecedents,
                delta: j2.antecedents[..j2.antecedents.len() - 1].to_vec(),
                phi: Some(j1.consequent),
                psi: Some(j2.consequent),
                ..Default::default()
            },
            &[i1, i2],
        )
    }

    /// Fold the last two antecedents into a tensor.
    pub fn fold_last(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let n = j.antecedents.len();
        if n < 2 {
            return Err(shape("fold_last", format!("`{j}` has fewer than two antecedents")));
        }
        self.push(
            RuleId::Tens1Fold,
            Instantiation {
                gamma: j.antecedents[..n - 2].to_vec(),
                phi: Some(j.antecedents[n - 2].clone()),
                psi: Some(j.antecedents[n - 1].clone()),
                theta: Some(j.consequent),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// Split a tensor in last antecedent position into its components.
    pub fn unfold_last(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Some(Formula::Tensor(a, b)) = j.antecedents.last() else {
            return Err(shape("unfold_last", format!("last antecedent of `{j}` is not a tensor")));
        };
        self.push(
            RuleId::Tens1Unfold,
            Instantiation {
                gamma: j.antecedents[..j.antecedents.len() - 1].to_vec(),
                phi: Some((**a).clone()),
                psi: Some((**b).clone()),
                theta: Some(j.consequent.clone()),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// Fold the whole context into one right-nested tensor.
    pub fn fold_all(&mut self, mut idx: usize) -> Result<usize, BuildError> {
        while self.ctx_len(idx) >= 2 {
            idx = self.fold_last(idx)?;
        }
        Ok(idx)
    }

    /// Recursively unfold every tensor antecedent, preserving factor order.
    pub fn unfold_fully(&mut self, mut idx: usize) -> Result<usize, BuildError> {
        loop {
            let pos = self
                .ctx(idx)
                .iter()
                .position(|f| matches!(f, Formula::Tensor(..)));
            let Some(pos) = pos else { return Ok(idx) };
            let last = self.ctx_len(idx) - 1;
            idx = self.move_antecedent(idx, pos, last)?;
            idx = self.unfold_last(idx)?;
            // the two pieces sit at the end; restore their position
            let len = self.ctx_len(idx);
            idx = self.move_antecedent(idx, len - 2, pos)?;
            idx = self.move_antecedent(idx, len - 1, pos + 1)?;
        }
    }

    /// `Γ, φ⊗ψ |- θ` to `Γ, φ |- ψ -o θ`.
    pub fn curry(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Some(Formula::Tensor(a, b)) = j.antecedents.last() else {
            return Err(shape("curry", format!("last antecedent of `{j}` is not a tensor")));
        };
        self.push(
            RuleId::Tens2Curry,
            Instantiation {
                gamma: j.antecedents[..j.antecedents.len() - 1].to_vec(),
                phi: Some((**a).clone()),
                psi: Some((**b).clone()),
                theta: Some(j.consequent.clone()),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// `Γ, φ |- ψ -o θ` to `Γ, φ⊗ψ |- θ`.
    pub fn uncurry(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Formula::Limp(b, c) = &j.consequent else {
            return Err(shape("uncurry", format!("consequent of `{j}` is not an implication")));
        };
        let Some(last) = j.antecedents.last() else {
            return Err(shape("uncurry", format!("`{j}` has no antecedent to pair with")));
        };
        self.push(
            RuleId::Tens2Uncurry,
            Instantiation {
                gamma: j.antecedents[..j.antecedents.len() - 1].to_vec(),
                phi: Some(last.clone()),
                psi: Some((**b).clone()),
                theta: Some((**c).clone()),
                ..Default::default()
            },
            &[idx],
        )
    }

    // -- conversions between entailments and theses -------------------------

    /// `Γ |- ψ` to `|- ⊗Γ -o ψ` (no-op when the context is empty).
    pub fn entail_to_thesis(&mut self, mut idx: usize) -> Result<usize, BuildError> {
        if self.ctx_len(idx) == 0 {
            return Ok(idx);
        }
        idx = self.fold_all(idx)?;
        idx = self.weak(idx, &Formula::Top)?;
        idx = self.perm_at(idx, 0)?;
        idx = self.fold_last(idx)?;
        idx = self.curry(idx)?;
        let top_thesis = self.top(&[])?;
        self.cut(top_thesis, idx)
    }

    /// `|- φ -o ψ` to `φ |- ψ`.
    pub fn thesis_to_entail(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        if !j.antecedents.is_empty() || !matches!(j.consequent, Formula::Limp(..)) {
            return Err(shape("thesis_to_entail", format!("`{j}` is not an implication thesis")));
        }
        let mut i = self.weak(idx, &Formula::Top)?;
        i = self.uncurry(i)?;
        i = self.unfold_last(i)?;
        i = self.perm_at(i, 0)?;
        let top_thesis = self.top(&[])?;
        self.cut(top_thesis, i)
    }

    // -- lattice lemmas ------------------------------------------------------

    /// `φ |- φ ∨ ψ`.
    pub fn inj_left(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let i = self.id(phi)?;
        self.push(
            RuleId::Or2,
            Instantiation {
                gamma: vec![phi.clone()],
                phi: Some(phi.clone()),
                psi: Some(psi.clone()),
                ..Default::default()
            },
            &[i],
        )
    }

    /// `ψ |- φ ∨ ψ`.
    pub fn inj_right(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let disj = Formula::or(phi.clone(), psi.clone());
        let i = self.id(&disj)?;
        self.push(
            RuleId::Or3,
            Instantiation {
                phi: Some(phi.clone()),
                psi: Some(psi.clone()),
                theta: Some(disj),
                ..Default::default()
            },
            &[i],
        )
    }

    /// `φ ∧ ψ |- φ`.
    pub fn proj_left(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let i = self.id(phi)?;
        self.push(
            RuleId::And1,
            Instantiation {
                phi: Some(phi.clone()),
                psi: Some(psi.clone()),
                theta: Some(phi.clone()),
                ..Default::default()
            },
            &[i],
        )
    }

    /// `φ ∧ ψ |- ψ`.
    pub fn proj_right(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let conj = Formula::and(phi.clone(), psi.clone());
        let i = self.id(&conj)?;
        self.push(
            RuleId::And3,
            Instantiation {
                gamma: vec![conj],
                phi: Some(phi.clone()),
                psi: Some(psi.clone()),
                ..Default::default()
            },
            &[i],
        )
    }

    // -- implication lemmas --------------------------------------------------

    /// Modus ponens: `φ -o ψ, φ |- ψ`.
    pub fn mp(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let imp = Formula::limp(phi.clone(), psi.clone());
        let mut i = self.id(&imp)?;
        i = self.uncurry(i)?;
        self.unfold_last(i)
    }

    /// `φ⊗ψ |- ψ⊗φ`.
    pub fn tensor_comm(&mut self, phi: &Formula, psi: &Formula) -> Result<usize, BuildError> {
        let flipped = Formula::tensor(psi.clone(), phi.clone());
        let mut i = self.id(&flipped)?;
        i = self.unfold_last(i)?;
        i = self.perm_at(i, 0)?;
        self.fold_last(i)
    }

    /// From `X |- X'` and `Y |- Y'` (single antecedents) derive
    /// `X⊗Y |- X'⊗Y'`.
    pub fn mono_tensor(&mut self, i1: usize, i2: usize) -> Result<usize, BuildError> {
        let (x, x1) = self.single(i1, "mono_tensor")?;
        let (y, y1) = self.single(i2, "mono_tensor")?;
        // premise: Y, X'-oX |- Y' by weakening, then the tensor
        // introduction rule with premise X |- X'
        let imp = Formula::limp(x1.clone(), x.clone());
        let w = self.weak(i2, &imp)?;
        let mut i = self.push(
            RuleId::Limp1,
            Instantiation {
                gamma: vec![y.clone()],
                phi: Some(x1.clone()),
                psi: Some(y1.clone()),
                theta: Some(x.clone()),
                ..Default::default()
            },
            &[w, i1],
        )?;
        i = self.perm_at(i, 0)?;
        self.fold_last(i)
    }

    /// From `X |- X'` and `Y |- Y'` derive `X∧Y |- X'∧Y'`.
    pub fn mono_and(&mut self, i1: usize, i2: usize) -> Result<usize, BuildError> {
        let (x, x1) = self.single(i1, "mono_and")?;
        let (y, y1) = self.single(i2, "mono_and")?;
        let pl = self.proj_left(&x, &y)?;
        let left = self.cut(pl, i1)?;
        let pr = self.proj_right(&x, &y)?;
        let right = self.cut(pr, i2)?;
        self.push(
            RuleId::And2,
            Instantiation {
                gamma: vec![Formula::and(x, y)],
                phi: Some(x1),
                psi: Some(y1),
                ..Default::default()
            },
            &[left, right],
        )
    }

    /// From `X |- X'` and `Y |- Y'` derive `X∨Y |- X'∨Y'`.
    pub fn mono_or(&mut self, i1: usize, i2: usize) -> Result<usize, BuildError> {
        let (x, x1) = self.single(i1, "mono_or")?;
        let (y, y1) = self.single(i2, "mono_or")?;
        let il = self.inj_left(&x1, &y1)?;
        let left = self.cut(i1, il)?;
        let ir = self.inj_right(&x1, &y1)?;
        let right = self.cut(i2, ir)?;
        self.push(
            RuleId::Or1,
            Instantiation {
                phi: Some(x),
                psi: Some(y),
                theta: Some(Formula::or(x1, y1)),
                ..Default::default()
            },
            &[left, right],
        )
    }

    /// From `X' |- X` and `Y |- Y'` derive `X -o Y |- X' -o Y'`
    /// (antitone in the antecedent).
    pub fn mono_limp(&mut self, i_left: usize, i_right: usize) -> Result<usize, BuildError> {
        let (_, x) = self.single(i_left, "mono_limp")?;
        let (y, _) = self.single(i_right, "mono_limp")?;
        let mp = self.mp(&x, &y)?;
        let mut i = self.cut(i_left, mp)?;
        i = self.cut(i, i_right)?;
        i = self.perm_at(i, 0)?;
        i = self.fold_last(i)?;
        self.curry(i)
    }

    /// From `X |- Y` derive `r*X |- r*Y`. Scaling by 1 is the identity
    /// and scaling by 0 goes through the zero-scale axiom.
    pub fn mono_scale(&mut self, idx: usize, r: &Rational) -> Result<usize, BuildError> {
        let (x, y) = self.single(idx, "mono_scale")?;
        if r.is_one() {
            return Ok(idx);
        }
        if r.is_zero() {
            let z = self.push(RuleId::S5, Instantiation::with_phi(y.clone()), &[])?;
            return self.weak(z, &Formula::scale(Rational::zero(), x));
        }
        self.push(
            RuleId::S1Scale,
            Instantiation {
                phi: Some(x),
                psi: Some(y),
                r: Some(r.clone()),
                ..Default::default()
            },
            &[idx],
        )
    }

    /// From `A |- B` derive `!B |- !A`.
    pub fn contrapositive(&mut self, idx: usize) -> Result<usize, BuildError> {
        let bot_id = self.id(&Formula::Bot)?;
        self.mono_limp(idx, bot_id)
    }

    /// From `|- X` derive `|- !!X`.
    pub fn nn_of_thesis(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        if !j.antecedents.is_empty() {
            return Err(shape("nn_of_thesis", format!("`{j}` is not a thesis")));
        }
        let x = j.consequent;
        let mp = self.mp(&x, &Formula::Bot)?;
        let i = self.cut(idx, mp)?;
        self.entail_to_thesis(i)
    }

    // -- biimplication -------------------------------------------------------

    /// From `A |- B` and `B |- A` derive `|- A o-o B`.
    pub fn biimp_intro(&mut self, i_fwd: usize, i_bwd: usize) -> Result<usize, BuildError> {
        let (a, b) = self.single(i_fwd, "biimp_intro")?;
        let fwd = self.entail_to_thesis(i_fwd)?;
        let bwd = self.entail_to_thesis(i_bwd)?;
        self.push(
            RuleId::And2,
            Instantiation {
                phi: Some(Formula::limp(a.clone(), b.clone())),
                psi: Some(Formula::limp(b, a)),
                ..Default::default()
            },
            &[fwd, bwd],
        )
    }

    /// From `|- A o-o B` derive `A |- B`.
    pub fn biimp_fwd(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Some((a, b)) = j.consequent.as_biimp().map(|(a, b)| (a.clone(), b.clone())) else {
            return Err(shape("biimp_fwd", format!("`{j}` is not a biimplication thesis")));
        };
        let fwd = Formula::limp(a.clone(), b.clone());
        let bwd = Formula::limp(b, a);
        let pl = self.proj_left(&fwd, &bwd)?;
        let th = self.cut(idx, pl)?;
        self.thesis_to_entail(th)
    }

    /// From `|- A o-o B` derive `B |- A`.
    pub fn biimp_bwd(&mut self, idx: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Some((a, b)) = j.consequent.as_biimp().map(|(a, b)| (a.clone(), b.clone())) else {
            return Err(shape("biimp_bwd", format!("`{j}` is not a biimplication thesis")));
        };
        let th = self.push(
            RuleId::And3,
            Instantiation {
                phi: Some(Formula::limp(a.clone(), b.clone())),
                psi: Some(Formula::limp(b, a)),
                ..Default::default()
            },
            &[idx],
        )?;
        self.thesis_to_entail(th)
    }

    // -- rewriting -----------------------------------------------------------

    /// Replace the antecedent at `pos` using `i_rw : F' |- F`.
    pub fn replace_antecedent(
        &mut self,
        idx: usize,
        pos: usize,
        i_rw: usize,
    ) -> Result<usize, BuildError> {
        let (f1, f) = self.single(i_rw, "replace_antecedent")?;
        let j = self.judgement(idx).clone();
        if j.antecedents.get(pos) != Some(&f) {
            return Err(shape(
                "replace_antecedent",
                format!("antecedent {pos} of `{j}` is not `{f}`"),
            ));
        }
        let last = j.antecedents.len() - 1;
        let mut i = self.move_antecedent(idx, pos, last)?;
        i = self.cut(i_rw, i)?;
        // the replacement lands first; restore its position
        let _ = f1;
        self.move_antecedent(i, 0, pos)
    }

    /// Replace the consequent using `i_rw : C |- C'`.
    pub fn replace_consequent(&mut self, idx: usize, i_rw: usize) -> Result<usize, BuildError> {
        self.cut(idx, i_rw)
    }

    /// Prove `from |- to` when both sides are tensor trees over the same
    /// ordered factor list (reassociation).
    pub fn reassoc(&mut self, from: &Formula, to: &Formula) -> Result<usize, BuildError> {
        if tensor_factors(from) != tensor_factors(to) {
            return Err(shape(
                "reassoc",
                format!("`{from}` and `{to}` have different factor lists"),
            ));
        }
        if from == to {
            return self.id(from);
        }
        let mut i = self.id(to)?;
        i = self.unfold_fully(i)?;
        self.fold_ctx_as(i, from)
    }

    /// Prove `from |- to` when both sides are tensor trees over the same
    /// factor multiset, in any order and association.
    pub fn tensor_rearrange(&mut self, from: &Formula, to: &Formula) -> Result<usize, BuildError> {
        let ffrom: Vec<Formula> = tensor_factors(from).into_iter().cloned().collect();
        let fto: Vec<Formula> = tensor_factors(to).into_iter().cloned().collect();
        let mut a = ffrom.clone();
        let mut b = fto.clone();
        a.sort();
        b.sort();
        if a != b {
            return Err(shape(
                "tensor_rearrange",
                format!("`{from}` and `{to}` have different factor multisets"),
            ));
        }
        if from == to {
            return self.id(from);
        }
        let mut i = self.id(to)?;
        i = self.unfold_fully(i)?;
        // context is now fto in order; permute it into ffrom's order
        for k in 0..ffrom.len() {
            let pos = self.ctx(i)[k..]
                .iter()
                .position(|f| *f == ffrom[k])
                .map(|p| p + k)
                .expect("multisets match");
            if pos != k {
                i = self.move_antecedent(i, pos, k)?;
            }
        }
        self.fold_ctx_as(i, from)
    }

    /// Fold the trailing antecedents into the shape of `shape`'s tensor
    /// tree; they must equal its factor list.
    pub(crate) fn fold_ctx_as(&mut self, idx: usize, shape: &Formula) -> Result<usize, BuildError> {
        match shape {
            Formula::Tensor(a, b) => {
                let ka = tensor_factors(a).len();
                let mut i = self.fold_ctx_as(idx, b)?;
                // context now ends with [a's factors..., b]; move b in
                // front of them so a's factors are trailing
                let len = self.ctx_len(i);
                i = self.move_antecedent(i, len - 1, len - 1 - ka)?;
                i = self.fold_ctx_as(i, a)?;
                // trailing pair is [b, a]; swap and fold
                let len = self.ctx_len(i);
                i = self.perm_at(i, len - 2)?;
                self.fold_last(i)
            }
            _ => Ok(idx),
        }
    }

    // -- theses about scaling ------------------------------------------------

    /// `|- s * top` for any `s >= 0`.
    pub fn scaled_top(&mut self, s: &Rational) -> Result<usize, BuildError> {
        if s.is_zero() {
            return self.push(RuleId::S5, Instantiation::with_phi(Formula::Top), &[]);
        }
        // top is interderivable with 0*bot, whose scaling collapses
        let zb = Formula::scale(Rational::zero(), Formula::Bot);
        let z = self.push(RuleId::S5, Instantiation::with_phi(Formula::Bot), &[])?;
        let up = self.top(&[zb.clone()])?;
        let scaled_up = self.push(
            RuleId::S1Scale,
            Instantiation {
                phi: Some(zb.clone()),
                psi: Some(Formula::Top),
                r: Some(s.clone()),
                ..Default::default()
            },
            &[up],
        )?;
        let collapse = self.push(
            RuleId::S2,
            Instantiation {
                phi: Some(Formula::Bot),
                r: Some(s.clone()),
                s: Some(Rational::zero()),
                ..Default::default()
            },
            &[],
        )?;
        let back = self.biimp_bwd(collapse)?;
        let i = self.cut(z, back)?;
        self.cut(i, scaled_up)
    }

    /// Extend the consequent with a provable factor: from `Γ |- C` and
    /// `|- Z` derive `Γ |- C⊗Z`.
    pub fn pad_consequent(&mut self, idx: usize, i_thesis: usize) -> Result<usize, BuildError> {
        let jt = self.judgement(i_thesis).clone();
        if !jt.antecedents.is_empty() {
            return Err(shape("pad_consequent", format!("`{jt}` is not a thesis")));
        }
        let z = jt.consequent;
        let c = self.judgement(idx).consequent.clone();
        let imp = Formula::limp(c.clone(), c.clone());
        let w = self.weak(i_thesis, &imp)?;
        let cid = self.id(&c)?;
        let lemma = self.push(
            RuleId::Limp1,
            Instantiation {
                phi: Some(c.clone()),
                psi: Some(z),
                theta: Some(c),
                ..Default::default()
            },
            &[w, cid],
        )?;
        self.cut(idx, lemma)
    }

    /// From `Γ, v |- v⊗ψ` and `|- !!v` derive `Γ |- ψ`.
    pub fn cancel(&mut self, idx: usize, i_nn: usize) -> Result<usize, BuildError> {
        let j = self.judgement(idx).clone();
        let Some(v) = j.antecedents.last().cloned() else {
            return Err(shape("cancel", format!("`{j}` has no antecedent to cancel")));
        };
        let Formula::Tensor(tv, psi) = &j.consequent else {
            return Err(shape("cancel", format!("consequent of `{j}` is not a tensor")));
        };
        if **tv != v {
            return Err(shape(
                "cancel",
                format!("`{j}`: consequent does not start with the last antecedent"),
            ));
        }
        let psi = (**psi).clone();
        let nn = Judgement::thesis(Formula::not(Formula::not(v.clone())));
        if *self.judgement(i_nn) != nn {
            return Err(shape("cancel", format!("expected `{nn}`, got `{}`", self.judgement(i_nn))));
        }
        let i = self.push(
            RuleId::Limp2,
            Instantiation {
                gamma: j.antecedents[..j.antecedents.len() - 1].to_vec(),
                phi: Some(v.clone()),
                psi: Some(psi),
                theta: Some(v.clone()),
                ..Default::default()
            },
            &[idx, i_nn],
        )?;
        let vid = self.id(&v)?;
        let refl = self.entail_to_thesis(vid)?;
        self.cut(refl, i)
    }

    /// From a proof of `|- bot` derive `Γ |- φ`.
    pub fn ex_falso(&mut self, i_bot: usize, ctx: &[Formula], phi: &Formula) -> Result<usize, BuildError> {
        let j = self.judgement(i_bot).clone();
        if j != Judgement::thesis(Formula::Bot) {
            return Err(shape("ex_falso", format!("`{j}` is not `|- bot`")));
        }
        let b = self.bot(phi)?;
        let mut i = self.cut(i_bot, b)?;
        for f in ctx {
            i = self.weak(i, f)?;
        }
        Ok(i)
    }

    /// `|- !!1`: the unit is finite. Case split on `(|- !1, |- !!1)`;
    /// under `|- !1` the unit rule yields `|- bot` and anything follows.
    pub fn nn_one(&mut self) -> Result<usize, BuildError> {
        let not_one = Judgement::thesis(Formula::not(Formula::One));
        let nn_one = Judgement::thesis(Formula::not(Formula::not(Formula::One)));
        let pair = (not_one.clone(), nn_one.clone());
        self.by_cases(
            pair,
            |b| {
                let h = b.hyp(&not_one)?;
                let ir = b.inj_right(&Formula::One, &Formula::not(Formula::One))?;
                let disj = b.cut(h, ir)?;
                let bot = b.push(RuleId::One, Instantiation::default(), &[disj])?;
                b.ex_falso(bot, &[], &Formula::not(Formula::not(Formula::One)))
            },
            |b| b.hyp(&nn_one),
        )
    }

    /// From `A |- B` and `|- !!A` derive `|- !!B`.
    pub fn nn_mono(&mut self, i_ent: usize, i_nn: usize) -> Result<usize, BuildError> {
        let c1 = self.contrapositive(i_ent)?;
        let c2 = self.contrapositive(c1)?;
        self.cut(i_nn, c2)
    }

    /// `!(r*φ) |- r*!φ` and back, for `r > 0`: scaling by a positive
    /// rational commutes with negation. Returns `(fwd, bwd)`.
    pub(crate) fn scale_neg_swap(
        &mut self,
        r: &Rational,
        phi: &Formula,
    ) -> Result<(usize, usize), BuildError> {
        let scaled = Formula::scale(r.clone(), phi.clone());
        let sbot = Formula::scale(r.clone(), Formula::Bot);
        // r*!φ o-o (r*φ -o r*bot), then swap r*bot for bot on the right
        let dist = self.push(
            RuleId::S4,
            Instantiation {
                phi: Some(phi.clone()),
                psi: Some(Formula::Bot),
                r: Some(r.clone()),
                op: Some(super::BinConn::Limp),
                ..Default::default()
            },
            &[],
        )?;
        let sid = self.id(&scaled)?;
        let collapse = self.push(
            RuleId::S7,
            Instantiation { r: Some(r.clone()), ..Default::default() },
            &[],
        )?;
        let inner_fwd = self.mono_limp(sid, collapse)?;
        let sid2 = self.id(&scaled)?;
        let expand = self.bot(&sbot)?;
        let inner_bwd = self.mono_limp(sid2, expand)?;
        // fwd: !(r*φ) |- (r*φ -o r*bot) |- r*!φ
        let d_bwd = self.biimp_bwd(dist)?;
        let f1 = self.cut(inner_bwd, d_bwd)?;
        // bwd: r*!φ |- (r*φ -o r*bot) |- !(r*φ)
        let d_fwd = self.biimp_fwd(dist)?;
        let b1 = self.cut(d_fwd, inner_fwd)?;
        Ok((f1, b1))
    }

    /// Prove `|- !!φ` for formulas that are finite in every model. Fails
    /// on shapes whose finiteness depends on the model (atoms, `bot`,
    /// and combinations that need an infinite part to collapse).
    pub fn prove_nn(&mut self, phi: &Formula) -> Result<usize, BuildError> {
        match phi {
            Formula::Top => {
                let mp = self.mp(&Formula::Top, &Formula::Bot)?;
                let t = self.top(&[])?;
                let i = self.cut(t, mp)?;
                self.entail_to_thesis(i)
            }
            Formula::One => self.nn_one(),
            Formula::Scale(r, f) if r.is_zero() => {
                let z = self.push(
                    RuleId::S5,
                    Instantiation::with_phi((**f).clone()),
                    &[],
                )?;
                self.nn_of_thesis(z)
            }
            Formula::Scale(r, f) => {
                let nn = self.prove_nn(f)?;
                // from |- !!f: scale !f |- bot, then pull the negation
                // inside the scaling
                let ent = self.thesis_to_entail(nn)?;
                let scaled = self.push(
                    RuleId::S1Scale,
                    Instantiation {
                        phi: Some(Formula::not((**f).clone())),
                        psi: Some(Formula::Bot),
                        r: Some(r.clone()),
                        ..Default::default()
                    },
                    &[ent],
                )?;
                let collapse = self.push(
                    RuleId::S7,
                    Instantiation { r: Some(r.clone()), ..Default::default() },
                    &[],
                )?;
                let to_bot = self.cut(scaled, collapse)?;
                let (swap_fwd, _) = self.scale_neg_swap(r, f)?;
                let i = self.cut(swap_fwd, to_bot)?;
                self.entail_to_thesis(i)
            }
            Formula::Tensor(a, b) => {
                let nna = self.prove_nn(a)?;
                let nnb = self.prove_nn(b)?;
                let ta = self.thesis_to_entail(nna)?;
                let tb = self.thesis_to_entail(nnb)?;
                let mp = self.mp(phi, &Formula::Bot)?;
                let mut i = self.curry(mp)?;
                i = self.cut(i, tb)?;
                i = self.fold_last(i)?;
                i = self.curry(i)?;
                i = self.cut(i, ta)?;
                self.entail_to_thesis(i)
            }
            Formula::And(a, b) => {
                let fwd = Judgement::thesis(Formula::limp((**a).clone(), (**b).clone()));
                let bwd = Judgement::thesis(Formula::limp((**b).clone(), (**a).clone()));
                let goal_a = (**a).clone();
                let goal_b = (**b).clone();
                let conj = phi.clone();
                self.by_cases(
                    (fwd.clone(), bwd.clone()),
                    |bl| {
                        // m(b) <= m(a): the conjunction collapses to a
                        let h = bl.hyp(&fwd)?;
                        let ab = bl.thesis_to_entail(h)?;
                        let ia = bl.id(&goal_a)?;
                        let up = bl.push(
                            RuleId::And2,
                            Instantiation {
                                gamma: vec![goal_a.clone()],
                                phi: Some(goal_a.clone()),
                                psi: Some(goal_b.clone()),
                                ..Default::default()
                            },
                            &[ia, ab],
                        )?;
                        let nn = bl.prove_nn(&goal_a)?;
                        bl.nn_mono(up, nn)
                    },
                    |br| {
                        let h = br.hyp(&bwd)?;
                        let ba = br.thesis_to_entail(h)?;
                        let ib = br.id(&goal_b)?;
                        let up = br.push(
                            RuleId::And2,
                            Instantiation {
                                gamma: vec![goal_b.clone()],
                                phi: Some(goal_a.clone()),
                                psi: Some(goal_b.clone()),
                                ..Default::default()
                            },
                            &[ba, ib],
                        )?;
                        let nn = br.prove_nn(&goal_b)?;
                        br.nn_mono(up, nn)
                    },
                )
                .map(|i| {
                    debug_assert_eq!(
                        *self.judgement(i),
                        Judgement::thesis(Formula::not(Formula::not(conj)))
                    );
                    i
                })
            }
            Formula::Or(a, b) => {
                if let Ok(nna) = self.prove_nn(a) {
                    let inj = self.inj_left(a, b)?;
                    return self.nn_mono(inj, nna);
                }
                let nnb = self.prove_nn(b)?;
                let inj = self.inj_right(a, b)?;
                self.nn_mono(inj, nnb)
            }
            Formula::Limp(a, b) => {
                if let Ok(nnb) = self.prove_nn(b) {
                    // b |- a -o b, so finiteness of b transfers
                    let ib = self.id(b)?;
                    let mut i = self.weak(ib, a)?;
                    i = self.fold_last(i)?;
                    i = self.curry(i)?;
                    return self.nn_mono(i, nnb);
                }
                // an always-infinite antecedent also makes b -. a zero
                let na = self.prove_infinite(a)?;
                let ta = self.thesis_to_entail(na)?;
                let fb = self.bot(b)?;
                let ab = self.cut(ta, fb)?;
                let th = self.entail_to_thesis(ab)?;
                self.nn_of_thesis(th)
            }
            Formula::Bot | Formula::Atom(_) => Err(shape(
                "prove_nn",
                format!("`{phi}` is not finite in every model"),
            )),
        }
    }

    /// Prove `|- !φ` for formulas that are infinite in every model.
    pub fn prove_infinite(&mut self, phi: &Formula) -> Result<usize, BuildError> {
        match phi {
            Formula::Bot => {
                let i = self.id(&Formula::Bot)?;
                self.entail_to_thesis(i)
            }
            Formula::Scale(r, f) if !r.is_zero() => {
                let nf = self.prove_infinite(f)?;
                // |- r*!f via scaling a weakened form, then swap the
                // negation outside
                let w = self.weak(nf, &Formula::Top)?;
                let sw = self.push(
                    RuleId::S1Scale,
                    Instantiation {
                        phi: Some(Formula::Top),
                        psi: Some(Formula::not((**f).clone())),
                        r: Some(r.clone()),
                        ..Default::default()
                    },
                    &[w],
                )?;
                let st = self.scaled_top(r)?;
                let i = self.cut(st, sw)?;
                let (_, swap_bwd) = self.scale_neg_swap(r, f)?;
                self.cut(i, swap_bwd)
            }
            Formula::Tensor(a, b) => {
                // a factor below bot drags the whole tensor down
                if let Ok(na) = self.prove_infinite(a) {
                    let ia = self.id(a)?;
                    let mut up = self.weak(ia, b)?;
                    up = self.fold_last(up)?;
                    let c = self.contrapositive(up)?;
                    return self.cut(na, c);
                }
                let nb = self.prove_infinite(b)?;
                let ib = self.id(b)?;
                let mut up = self.weak(ib, a)?;
                up = self.perm_at(up, 0)?;
                up = self.fold_last(up)?;
                let c = self.contrapositive(up)?;
                self.cut(nb, c)
            }
            Formula::And(a, b) => {
                if let Ok(na) = self.prove_infinite(a) {
                    let p = self.proj_left(a, b)?;
                    let c = self.contrapositive(p)?;
                    return self.cut(na, c);
                }
                let nb = self.prove_infinite(b)?;
                let p = self.proj_right(a, b)?;
                let c = self.contrapositive(p)?;
                self.cut(nb, c)
            }
            Formula::Or(a, b) => {
                let na = self.prove_infinite(a)?;
                let nb = self.prove_infinite(b)?;
                let ta = self.thesis_to_entail(na)?;
                let tb = self.thesis_to_entail(nb)?;
                let split = self.push(
                    RuleId::Or1,
                    Instantiation {
                        phi: Some((**a).clone()),
                        psi: Some((**b).clone()),
                        theta: Some(Formula::Bot),
                        ..Default::default()
                    },
                    &[ta, tb],
                )?;
                self.entail_to_thesis(split)
            }
            Formula::Limp(a, b) => {
                // needs an infinite consequent over a finite antecedent
                let nb = self.prove_infinite(b)?;
                let nna = self.prove_nn(a)?;
                let tb = self.thesis_to_entail(nb)?;
                let ta = self.thesis_to_entail(nna)?;
                let mp = self.mp(a, b)?;
                let mut i = self.cut(mp, tb)?;
                i = self.fold_last(i)?;
                i = self.curry(i)?;
                i = self.cut(i, ta)?;
                self.entail_to_thesis(i)
            }
            _ => Err(shape(
                "prove_infinite",
                format!("`{phi}` is not infinite in every model"),
            )),
        }
    }

    /// Case split over a supplementary pair. Each closure builds one
    /// branch in a sub-builder that may additionally assume its half of
    /// the pair; both must conclude the same judgement.
    pub fn by_cases<L, R>(
        &mut self,
        pair: (Judgement, Judgement),
        left: L,
        right: R,
    ) -> Result<usize, BuildError>
    where
        L: FnOnce(&mut ProofBuilder) -> Result<usize, BuildError>,
        R: FnOnce(&mut ProofBuilder) -> Result<usize, BuildError>,
    {
        let mut lb = ProofBuilder::new(ctx_plus_j(&self.assumptions, &pair.0));
        let li = left(&mut lb)?;
        let left_proof = lb.into_proof_of(li);
        let mut rb = ProofBuilder::new(ctx_plus_j(&self.assumptions, &pair.1));
        let ri = right(&mut rb)?;
        let right_proof = rb.into_proof_of(ri);
        let one_step = assemble_by_cases(pair, left_proof, right_proof)
            .map_err(|reason| shape("by_cases", reason))?;
        let step = one_step.steps.into_iter().next().unwrap();
        Ok(self.push_step(step))
    }

    // -- helpers -------------------------------------------------------------

    /// The (antecedent, consequent) of a single-antecedent judgement.
    fn single(&self, idx: usize, tactic: &'static str) -> Result<(Formula, Formula), BuildError> {
        let j = self.judgement(idx);
        if j.antecedents.len() != 1 {
            return Err(shape(tactic, format!("`{j}` does not have exactly one antecedent")));
        }
        Ok((j.antecedents[0].clone(), j.consequent.clone()))
    }
}

fn ctx_plus_j(base: &[Judgement], extra: &Judgement) -> Vec<Judgement> {
    let mut v = base.to_vec();
    v.push(extra.clone());
    v
}

/// Flat factor list of a tensor tree.
pub fn tensor_factors(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Tensor(a, b) => {
            let mut v = tensor_factors(a);
            v.extend(tensor_factors(b));
            v
        }
        _ => vec![f],
    }
}

/// Drop steps unreachable from `target` and make it the last step.
pub fn prune(proof: &Proof, target: usize) -> Proof {
    let mut keep = vec![false; proof.steps.len()];
    let mut stack = vec![target];
    while let Some(i) = stack.pop() {
        if keep[i] {
            continue;
        }
        keep[i] = true;
        stack.extend(proof.steps[i].premises.iter().copied());
    }
    let mut map = vec![usize::MAX; proof.steps.len()];
    let mut steps = Vec::new();
    for (i, step) in proof.steps.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        let mut s = step.clone();
        s.premises = s.premises.iter().map(|&p| map[p]).collect();
        map[i] = steps.len();
        steps.push(s);
    }
    Proof { steps }
}

/// The derived combination rule of the completeness argument: from
/// proofs of `φ₁ |- ψ₁` and `φ₂ |- ψ₂` build a proof of
/// `r*φ₁ ⊗ s*φ₂ |- r*ψ₁ ⊗ s*ψ₂` in primitive steps, with two
/// conveniences: scaling by 1 adds no wrapper, and a second component
/// proving `top |- top` is treated as absent so the result is just
/// `r*φ₁ |- r*ψ₁`. Both sides are reassociated to flat right-nested
/// tensors, which makes chained combinations associative on the nose.
pub fn combine(
    p1: &Proof,
    p2: &Proof,
    r: &Rational,
    s: &Rational,
    assumptions: &[Judgement],
) -> Result<Proof, BuildError> {
    if r.is_zero() || s.is_zero() {
        return Err(shape("combine", "coefficients must be positive"));
    }
    let trivial = Judgement::entail(Formula::Top, Formula::Top);
    let mut b = ProofBuilder::new(assumptions.to_vec());
    let i1 = b.append_proof(p1)?;
    let scaled1 = b.mono_scale(i1, r)?;
    if p2.theorem() == Some(&trivial) {
        return Ok(b.into_proof_of(scaled1));
    }
    let i2 = b.append_proof(p2)?;
    let scaled2 = b.mono_scale(i2, s)?;
    let mut i = b.mono_tensor(scaled1, scaled2)?;
    let j = b.judgement(i).clone();
    let lhs = j.antecedents[0].clone();
    let rhs = j.consequent.clone();
    let flat_lhs = flat_tensor(&lhs);
    let flat_rhs = flat_tensor(&rhs);
    if flat_lhs != lhs {
        let rw = b.reassoc(&flat_lhs, &lhs)?;
        i = b.replace_antecedent(i, 0, rw)?;
    }
    if flat_rhs != rhs {
        let rw = b.reassoc(&rhs, &flat_rhs)?;
        i = b.replace_consequent(i, rw)?;
    }
    Ok(b.into_proof_of(i))
}

/// Right-nested flat form of a tensor tree.
pub fn flat_tensor(f: &Formula) -> Formula {
    let factors: Vec<Formula> = tensor_factors(f).into_iter().cloned().collect();
    let mut it = factors.into_iter().rev();
    let last = it.next().expect("tensor_factors is never empty");
    it.fold(last, |acc, x| Formula::tensor(x, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofkit::check;
    use crate::syntax::LogicLevel;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    fn j(s: &str) -> Judgement {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        crate::extval::parse_rational(s).unwrap()
    }

    /// Finish at `idx`, check the pruned proof, and compare the theorem.
    fn finish(
        b: ProofBuilder,
        idx: usize,
        assumptions: &[Judgement],
        level: LogicLevel,
        want: &str,
    ) -> Proof {
        let p = b.into_proof_of(idx);
        assert_eq!(p.theorem(), Some(&j(want)), "theorem mismatch");
        let v = check(&p, assumptions, level);
        assert!(v.is_accepted(), "{v}");
        p
    }

    #[test]
    fn modus_ponens_shape() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.mp(&f("p"), &f("q")).unwrap();
        finish(b, i, &[], LogicLevel::L, "p -o q, p |- q");
    }

    #[test]
    fn tensor_commutes() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.tensor_comm(&f("p"), &f("q")).unwrap();
        finish(b, i, &[], LogicLevel::L, "p (x) q |- q (x) p");
    }

    #[test]
    fn entailment_thesis_conversions() {
        let hyp = j("p, q |- w");
        let mut b = ProofBuilder::new(vec![hyp.clone()]);
        let h = b.hyp(&hyp).unwrap();
        let t = b.entail_to_thesis(h).unwrap();
        assert_eq!(*b.judgement(t), j("|- p (x) q -o w"));
        let back = b.thesis_to_entail(t).unwrap();
        finish(b, back, &[hyp], LogicLevel::L, "p (x) q |- w");
    }

    #[test]
    fn injections_and_projections() {
        let mut b = ProofBuilder::new(vec![]);
        let il = b.inj_left(&f("p"), &f("q")).unwrap();
        assert_eq!(*b.judgement(il), j("p |- p \\/ q"));
        let ir = b.inj_right(&f("p"), &f("q")).unwrap();
        assert_eq!(*b.judgement(ir), j("q |- p \\/ q"));
        let pl = b.proj_left(&f("p"), &f("q")).unwrap();
        assert_eq!(*b.judgement(pl), j("p /\\ q |- p"));
        let pr = b.proj_right(&f("p"), &f("q")).unwrap();
        finish(b, pr, &[], LogicLevel::L, "p /\\ q |- q");
    }

    #[test]
    fn monotonicity_tactics() {
        let h1 = j("p |- q");
        let h2 = j("w |- v");
        let assume = vec![h1.clone(), h2.clone()];

        let mut b = ProofBuilder::new(assume.clone());
        let (a, c) = (b.hyp(&h1).unwrap(), b.hyp(&h2).unwrap());
        let i = b.mono_tensor(a, c).unwrap();
        finish(b, i, &assume, LogicLevel::L, "p (x) w |- q (x) v");

        let mut b = ProofBuilder::new(assume.clone());
        let (a, c) = (b.hyp(&h1).unwrap(), b.hyp(&h2).unwrap());
        let i = b.mono_and(a, c).unwrap();
        finish(b, i, &assume, LogicLevel::L, "p /\\ w |- q /\\ v");

        let mut b = ProofBuilder::new(assume.clone());
        let (a, c) = (b.hyp(&h1).unwrap(), b.hyp(&h2).unwrap());
        let i = b.mono_or(a, c).unwrap();
        finish(b, i, &assume, LogicLevel::L, "p \\/ w |- q \\/ v");

        // antitone on the left: from q |- p and w |- v
        let g1 = j("q |- p");
        let assume2 = vec![g1.clone(), h2.clone()];
        let mut b = ProofBuilder::new(assume2.clone());
        let (a, c) = (b.hyp(&g1).unwrap(), b.hyp(&h2).unwrap());
        let i = b.mono_limp(a, c).unwrap();
        finish(b, i, &assume2, LogicLevel::L, "p -o w |- q -o v");
    }

    #[test]
    fn scaling_monotonicity() {
        let h = j("p |- q");
        let assume = vec![h.clone()];

        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let i = b.mono_scale(a, &q("3/2")).unwrap();
        finish(b, i, &assume, LogicLevel::L1star, "3/2*p |- 3/2*q");

        // scaling by 1 adds no wrapper
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let i = b.mono_scale(a, &q("1")).unwrap();
        assert_eq!(*b.judgement(i), h);

        // scaling by 0 goes through the zero axiom
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let i = b.mono_scale(a, &q("0")).unwrap();
        finish(b, i, &assume, LogicLevel::L1star, "0*p |- 0*q");
    }

    #[test]
    fn contraposition_and_double_negation() {
        let h = j("p |- q");
        let assume = vec![h.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let c = b.contrapositive(a).unwrap();
        finish(b, c, &assume, LogicLevel::L, "!q |- !p");

        let th = j("|- p");
        let assume = vec![th.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&th).unwrap();
        let i = b.nn_of_thesis(a).unwrap();
        finish(b, i, &assume, LogicLevel::L, "|- !!p");
    }

    #[test]
    fn biimplication_tactics() {
        let h1 = j("p |- q");
        let h2 = j("q |- p");
        let assume = vec![h1.clone(), h2.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let (a, c) = (b.hyp(&h1).unwrap(), b.hyp(&h2).unwrap());
        let bi = b.biimp_intro(a, c).unwrap();
        assert_eq!(*b.judgement(bi), j("|- p o-o q"));
        let fwd = b.biimp_fwd(bi).unwrap();
        assert_eq!(*b.judgement(fwd), j("p |- q"));
        let bwd = b.biimp_bwd(bi).unwrap();
        finish(b, bwd, &assume, LogicLevel::L, "q |- p");
    }

    #[test]
    fn reassociation() {
        let from = f("(p (x) q) (x) w");
        let to = f("p (x) (q (x) w)");
        let mut b = ProofBuilder::new(vec![]);
        let i = b.reassoc(&from, &to).unwrap();
        finish(b, i, &[], LogicLevel::L, "(p (x) q) (x) w |- p (x) (q (x) w)");

        // deeper shuffle, both directions
        let from = f("((p (x) q) (x) w) (x) v");
        let to = f("p (x) ((q (x) w) (x) v)");
        let mut b = ProofBuilder::new(vec![]);
        let i = b.reassoc(&to, &from).unwrap();
        assert_eq!(
            *b.judgement(i),
            j("p (x) ((q (x) w) (x) v) |- ((p (x) q) (x) w) (x) v")
        );

        // different factor lists are refused
        let mut b = ProofBuilder::new(vec![]);
        assert!(b.reassoc(&f("p (x) q"), &f("q (x) p")).is_err());
    }

    #[test]
    fn scaled_top_theses() {
        for s in ["0", "1", "2", "5/3"] {
            let mut b = ProofBuilder::new(vec![]);
            let i = b.scaled_top(&q(s)).unwrap();
            finish(b, i, &[], LogicLevel::L1star, &format!("|- {s}*top"));
        }
    }

    #[test]
    fn pad_and_cancel() {
        let h = j("p |- q");
        let assume = vec![h.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let t = b.scaled_top(&q("2")).unwrap();
        let i = b.pad_consequent(a, t).unwrap();
        finish(b, i, &assume, LogicLevel::L1star, "p |- q (x) 2*top");

        // cancelling a unit factor needs its finiteness
        let h = j("w, 1 |- 1 (x) q");
        let assume = vec![h.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let nn = b.nn_one().unwrap();
        let i = b.cancel(a, nn).unwrap();
        finish(b, i, &assume, LogicLevel::L1, "w |- q");
    }

    #[test]
    fn unit_is_finite() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.nn_one().unwrap();
        finish(b, i, &[], LogicLevel::L1, "|- !!1");
    }

    #[test]
    fn finiteness_prover() {
        let cases = [
            ("top", LogicLevel::L),
            ("1", LogicLevel::L1),
            ("3", LogicLevel::L1star),
            ("0*p", LogicLevel::L1star),
            ("2*(1 /\\ top)", LogicLevel::L1star),
            ("1 (x) 2", LogicLevel::L1star),
            ("1 /\\ 2", LogicLevel::L1star),
            ("p \\/ 1", LogicLevel::L1),
            ("p -o 1", LogicLevel::L1),
            ("bot -o p", LogicLevel::L),
            ("top -o (1 (x) 1)", LogicLevel::L1),
        ];
        for (text, level) in cases {
            let mut b = ProofBuilder::new(vec![]);
            let i = b.prove_nn(&f(text)).unwrap();
            finish(b, i, &[], level, &format!("|- !!({text})"));
        }
        for text in ["p", "bot", "p (x) 1", "1 /\\ p", "p \\/ bot", "1 -o p"] {
            let mut b = ProofBuilder::new(vec![]);
            assert!(b.prove_nn(&f(text)).is_err(), "{text} should not be provably finite");
        }
    }

    #[test]
    fn infiniteness_prover() {
        let cases = [
            ("bot", LogicLevel::L),
            ("2*bot", LogicLevel::L1star),
            ("bot (x) p", LogicLevel::L),
            ("p (x) bot", LogicLevel::L),
            ("bot /\\ p", LogicLevel::L),
            ("bot \\/ 3*bot", LogicLevel::L1star),
            ("1 -o bot", LogicLevel::L1),
        ];
        for (text, level) in cases {
            let mut b = ProofBuilder::new(vec![]);
            let i = b.prove_infinite(&f(text)).unwrap();
            finish(b, i, &[], level, &format!("|- !({text})"));
        }
        for text in ["p", "top", "1", "0*bot", "bot \\/ 1", "bot -o bot"] {
            let mut b = ProofBuilder::new(vec![]);
            assert!(b.prove_infinite(&f(text)).is_err(), "{text} should not be provably infinite");
        }
    }

    #[test]
    fn ex_falso_spreads() {
        let h = j("|- bot");
        let assume = vec![h.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let i = b.ex_falso(a, &[f("p")], &f("q")).unwrap();
        finish(b, i, &assume, LogicLevel::L, "p |- q");
    }

    #[test]
    fn replacement_tactics() {
        let h = j("p, q, w |- v");
        let rw = j("u |- q");
        let assume = vec![h.clone(), rw.clone()];
        let mut b = ProofBuilder::new(assume.clone());
        let a = b.hyp(&h).unwrap();
        let r = b.hyp(&rw).unwrap();
        let i = b.replace_antecedent(a, 1, r).unwrap();
        finish(b, i, &assume, LogicLevel::L, "p, u, w |- v");
    }

    #[test]
    fn finish_from_interior_step_prunes() {
        let mut b = ProofBuilder::new(vec![]);
        let keep = b.mp(&f("p"), &f("q")).unwrap();
        let _noise = b.tensor_comm(&f("a"), &f("c")).unwrap();
        let p = b.into_proof_of(keep);
        assert_eq!(p.theorem(), Some(&j("p -o q, p |- q")));
        // every remaining step feeds the theorem
        let mut used = vec![false; p.steps.len()];
        *used.last_mut().unwrap() = true;
        for s in p.steps.iter().rev() {
            for &pr in &s.premises {
                used[pr] = true;
            }
        }
        assert!(used.iter().all(|&u| u), "orphan steps survived pruning");
        assert!(check(&p, &[], LogicLevel::L).is_accepted());
    }

    #[test]
    fn append_foreign_proof() {
        let h = j("p |- q");
        let mut inner = ProofBuilder::new(vec![h.clone()]);
        let a = inner.hyp(&h).unwrap();
        let i = inner.contrapositive(a).unwrap();
        let sub = inner.into_proof_of(i);

        let mut outer = ProofBuilder::new(vec![h.clone()]);
        let spliced = outer.append_proof(&sub).unwrap();
        assert_eq!(*outer.judgement(spliced), j("!q |- !p"));

        let mut refused = ProofBuilder::new(vec![]);
        assert!(matches!(
            refused.append_proof(&sub),
            Err(BuildError::NotAssumed(_))
        ));
    }

    #[test]
    fn combine_identity_components() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.id(&f("p")).unwrap();
        let p1 = b.into_proof_of(i);
        let mut b = ProofBuilder::new(vec![]);
        let i = b.id(&f("q")).unwrap();
        let p2 = b.into_proof_of(i);

        let c = combine(&p1, &p2, &q("1"), &q("1"), &[]).unwrap();
        assert_eq!(c.theorem(), Some(&j("p (x) q |- p (x) q")));
        assert!(check(&c, &[], LogicLevel::L1star).is_accepted());
    }

    #[test]
    fn combine_scales_a_hypothesis() {
        let h = j("p |- q");
        let mut b = ProofBuilder::new(vec![h.clone()]);
        let i = b.hyp(&h).unwrap();
        let p1 = b.into_proof_of(i);
        let mut b = ProofBuilder::new(vec![]);
        let i = b.id(&f("top")).unwrap();
        let trivial = b.into_proof_of(i);

        let c = combine(&p1, &trivial, &q("2"), &q("1"), &[h.clone()]).unwrap();
        assert_eq!(c.theorem(), Some(&j("2*p |- 2*q")));
        assert!(check(&c, &[h], LogicLevel::L1star).is_accepted());
    }

    #[test]
    fn combine_chains_associatively() {
        let id_proof = |name: &str| {
            let mut b = ProofBuilder::new(vec![]);
            let i = b.id(&f(name)).unwrap();
            b.into_proof_of(i)
        };
        let (a, c, w) = (id_proof("p"), id_proof("q"), id_proof("w"));
        let one = q("1");
        let left = combine(&combine(&a, &c, &one, &one, &[]).unwrap(), &w, &one, &one, &[]).unwrap();
        let right = combine(&a, &combine(&c, &w, &one, &one, &[]).unwrap(), &one, &one, &[]).unwrap();
        assert_eq!(left.theorem(), right.theorem());
        assert_eq!(left.theorem(), Some(&j("p (x) (q (x) w) |- p (x) (q (x) w)")));
        assert!(check(&left, &[], LogicLevel::L1star).is_accepted());
        assert!(check(&right, &[], LogicLevel::L1star).is_accepted());
    }

    #[test]
    fn combine_rejects_zero_coefficients() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b.id(&f("p")).unwrap();
        let p1 = b.into_proof_of(i);
        assert!(combine(&p1, &p1, &q("0"), &q("1"), &[]).is_err());
    }
}
