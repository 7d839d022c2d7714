//! Models and evaluation.
//!
//! A model assigns an extended value to every proposition; evaluation
//! extends it homomorphically to formulas. A judgement `Γ |- ψ` is
//! satisfied when the extended sum of the antecedent values dominates the
//! consequent value. Note the order reversal relative to the lattice
//! view: larger numbers mean "more false", `bot` evaluates to `oo` and
//! `top` to `0`, so theses `|- φ` hold exactly when `φ` evaluates to `0`.

use crate::extval::{parse_rational, ExtValue, Rational};
use crate::syntax::{Formula, Judgement, PropName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A finitely supported assignment of extended values to propositions,
/// with a default for everything outside the support so that evaluation
/// is total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub assignment: BTreeMap<PropName, ExtValue>,
    pub default: ExtValue,
}

impl Model {
    /// Empty model sending every proposition to `default`.
    pub fn new(default: ExtValue) -> Model {
        Model { assignment: BTreeMap::new(), default }
    }

    /// Empty model with default `0`.
    pub fn zeroed() -> Model {
        Model::new(ExtValue::zero())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Model
    where
        I: IntoIterator<Item = (S, ExtValue)>,
        S: Into<String>,
    {
        let mut m = Model::zeroed();
        for (k, v) in pairs {
            m.assignment.insert(k.into(), v);
        }
        m
    }

    pub fn set(&mut self, prop: impl Into<String>, value: ExtValue) -> &mut Self {
        self.assignment.insert(prop.into(), value);
        self
    }

    pub fn get(&self, prop: &str) -> &ExtValue {
        self.assignment.get(prop).unwrap_or(&self.default)
    }
}

/// Evaluate a formula in a model.
pub fn eval(m: &Model, f: &Formula) -> ExtValue {
    match f {
        Formula::Bot => ExtValue::Infinity,
        Formula::Top => ExtValue::zero(),
        Formula::One => ExtValue::one(),
        Formula::Atom(p) => m.get(p).clone(),
        Formula::And(a, b) => eval(m, a).max(eval(m, b)),
        Formula::Or(a, b) => eval(m, a).min(eval(m, b)),
        Formula::Tensor(a, b) => eval(m, a).add(&eval(m, b)),
        Formula::Limp(a, b) => eval(m, b).tsub(&eval(m, a)),
        Formula::Scale(r, a) => eval(m, a).scale(r),
    }
}

/// Extended sum of the antecedent values.
pub fn eval_context(m: &Model, j: &Judgement) -> ExtValue {
    j.antecedents
        .iter()
        .fold(ExtValue::zero(), |acc, f| acc.add(&eval(m, f)))
}

/// `m ⊨ Γ |- ψ` iff the antecedent sum dominates the consequent value.
pub fn satisfies(m: &Model, j: &Judgement) -> bool {
    eval_context(m, j) >= eval(m, &j.consequent)
}

pub fn satisfies_all<'a, I>(m: &Model, js: I) -> bool
where
    I: IntoIterator<Item = &'a Judgement>,
{
    js.into_iter().all(|j| satisfies(m, j))
}

// ---------------------------------------------------------------------------
// diagrammatic theories

/// Per-proposition axiom shape of a diagrammatic theory: a proposition is
/// either pinned to `oo` by `p |- bot`, or pinned to a finite rational ε
/// by the judgement pair `ε |- p` and `p |- ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramAxiom {
    Infinite,
    Value(Rational),
}

/// A diagrammatic theory over a finite support, one axiom per proposition.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiagramAxioms {
    pub axioms: BTreeMap<PropName, DiagramAxiom>,
}

impl DiagramAxioms {
    /// The judgements the axioms stand for.
    pub fn to_judgements(&self) -> Vec<Judgement> {
        let mut out = Vec::new();
        for (p, ax) in &self.axioms {
            let atom = Formula::atom(p.clone());
            match ax {
                DiagramAxiom::Infinite => {
                    out.push(Judgement::entail(atom, Formula::Bot));
                }
                DiagramAxiom::Value(eps) => {
                    let numeral = Formula::numeral(eps.clone());
                    out.push(Judgement::entail(numeral.clone(), atom.clone()));
                    out.push(Judgement::entail(atom, numeral));
                }
            }
        }
        out
    }
}

/// Read off the unique diagrammatic theory a model satisfies on `props`.
pub fn model_to_diagram<'a, I>(m: &Model, props: I) -> DiagramAxioms
where
    I: IntoIterator<Item = &'a str>,
{
    let mut axioms = BTreeMap::new();
    for p in props {
        let ax = match m.get(p) {
            ExtValue::Infinity => DiagramAxiom::Infinite,
            ExtValue::Finite(q) => DiagramAxiom::Value(q.clone()),
        };
        axioms.insert(p.to_string(), ax);
    }
    DiagramAxioms { axioms }
}

/// The unique model of a diagrammatic theory (default `0` off support).
pub fn diagram_to_model(d: &DiagramAxioms) -> Model {
    let mut m = Model::zeroed();
    for (p, ax) in &d.axioms {
        let v = match ax {
            DiagramAxiom::Infinite => ExtValue::Infinity,
            DiagramAxiom::Value(q) => ExtValue::Finite(q.clone()),
        };
        m.assignment.insert(p.clone(), v);
    }
    m
}

// ---------------------------------------------------------------------------
// random models

/// Value distribution for random model sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleProfile {
    /// Zeros, infinities, small and large rationals. The workhorse for
    /// differential testing; exercises truncation and absorption.
    Mixed,
    /// Like `Mixed` but never emits `oo`.
    FiniteOnly,
    /// Only `0` and `oo`.
    Boundary,
}

impl std::str::FromStr for SampleProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mixed" => Ok(SampleProfile::Mixed),
            "finite-only" => Ok(SampleProfile::FiniteOnly),
            "boundary" => Ok(SampleProfile::Boundary),
            other => Err(format!(
                "unknown sample profile `{other}` (expected mixed, finite-only or boundary)"
            )),
        }
    }
}

/// Draw one extended value from the profile's distribution.
pub fn sample_value<R: Rng + ?Sized>(rng: &mut R, profile: SampleProfile) -> ExtValue {
    match profile {
        SampleProfile::Boundary => {
            if rng.random_bool(0.5) {
                ExtValue::zero()
            } else {
                ExtValue::Infinity
            }
        }
        SampleProfile::Mixed | SampleProfile::FiniteOnly => {
            let roll = rng.random_range(0u32..100);
            if profile == SampleProfile::Mixed && roll < 15 {
                return ExtValue::Infinity;
            }
            if roll < 35 {
                ExtValue::zero()
            } else if roll < 85 {
                // small fractions keep sums and differences readable
                let num = rng.random_range(1i64..=8);
                let den = rng.random_range(1i64..=8);
                ExtValue::finite(Rational::new(num.into(), den.into()))
            } else {
                let num = rng.random_range(9i64..=10_000);
                ExtValue::finite(Rational::from_integer(num.into()))
            }
        }
    }
}

/// Sample a model for the given propositions using a caller-owned rng.
pub fn sample_model_with<R, I, S>(rng: &mut R, props: I, profile: SampleProfile) -> Model
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut m = Model::zeroed();
    for p in props {
        let v = sample_value(rng, profile);
        m.assignment.insert(p.into(), v);
    }
    m
}

/// Sample a model deterministically from a seed.
pub fn sample_model<I, S>(props: I, seed: u64, profile: SampleProfile) -> Model
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_model_with(&mut rng, props, profile)
}

// ---------------------------------------------------------------------------
// model files

/// Error in a model file, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("model file line {line}: {msg}")]
pub struct ModelFileError {
    pub line: usize,
    pub msg: String,
}

/// Parse a model file: one `ident = rational | inf` binding per line,
/// `#` comments, blank lines ignored.
pub fn parse_model(src: &str, default: ExtValue) -> Result<Model, ModelFileError> {
    let mut m = Model::new(default);
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = match raw.find('#') {
            Some(j) => &raw[..j],
            None => raw,
        };
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        let (name, value) = text.split_once('=').ok_or_else(|| ModelFileError {
            line,
            msg: format!("expected `ident = value`, got `{text}`"),
        })?;
        let name = name.trim();
        if name.is_empty()
            || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        {
            return Err(ModelFileError { line, msg: format!("invalid proposition name `{name}`") });
        }
        let value = value.trim();
        let v: ExtValue = if value == "inf" {
            ExtValue::Infinity
        } else {
            ExtValue::Finite(parse_rational(value).map_err(|e| ModelFileError {
                line,
                msg: e.to_string(),
            })?)
        };
        if m.assignment.insert(name.to_string(), v).is_some() {
            return Err(ModelFileError { line, msg: format!("duplicate binding for `{name}`") });
        }
    }
    Ok(m)
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, v) in &self.assignment {
            writeln!(f, "{p} = {v}")?;
        }
        Ok(())
    }
}

/// Atoms of a set of judgements, handy for sampling over a theory.
pub fn theory_atoms(js: &[Judgement]) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    for j in js {
        j.consequent.collect_atoms(&mut out);
        for a in &j.antecedents {
            a.collect_atoms(&mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extval::{rat, rat_int};
    use crate::syntax::{parse_formula, parse_judgement};

    fn fml(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn jdg(s: &str) -> Judgement {
        parse_judgement(s).unwrap()
    }

    #[test]
    fn evaluation_table() {
        let m = Model::from_pairs([
            ("p", ExtValue::finite(rat(1, 2))),
            ("q", ExtValue::Infinity),
        ]);
        assert_eq!(eval(&m, &fml("bot")), ExtValue::Infinity);
        assert_eq!(eval(&m, &fml("top")), ExtValue::zero());
        assert_eq!(eval(&m, &fml("1")), ExtValue::one());
        assert_eq!(eval(&m, &fml("p /\\ 1")), ExtValue::one());
        assert_eq!(eval(&m, &fml("p \\/ 1")), ExtValue::finite(rat(1, 2)));
        assert_eq!(eval(&m, &fml("p (x) p")), ExtValue::one());
        assert_eq!(eval(&m, &fml("p -o 1")), ExtValue::finite(rat(1, 2)));
        assert_eq!(eval(&m, &fml("1 -o p")), ExtValue::zero());
        assert_eq!(eval(&m, &fml("q -o p")), ExtValue::zero());
        assert_eq!(eval(&m, &fml("p -o q")), ExtValue::Infinity);
        assert_eq!(eval(&m, &fml("3*p")), ExtValue::finite(rat(3, 2)));
        assert_eq!(eval(&m, &fml("0*q")), ExtValue::zero());
        // unmapped propositions fall back to the default
        assert_eq!(eval(&m, &fml("r")), ExtValue::zero());
    }

    #[test]
    fn deduction_theorem_failure_value() {
        let m = Model::from_pairs([
            ("eta", ExtValue::finite(rat(1, 4))),
            ("rho", ExtValue::zero()),
            ("theta", ExtValue::one()),
        ]);
        let phi = fml("eta /\\ (eta (x) rho -o theta)");
        let psi = fml("rho -o theta");
        assert_eq!(eval(&m, &phi), ExtValue::finite(rat(3, 4)));
        assert_eq!(eval(&m, &psi), ExtValue::one());
        assert_eq!(
            eval(&m, &Formula::limp(phi.clone(), psi.clone())),
            ExtValue::finite(rat(1, 4))
        );
        // m refutes the implication thesis without touching the
        // hypothesis |- phi, so it cannot refute the rule-level
        // consequence from |- phi to |- psi
        assert!(!satisfies(&m, &Judgement::thesis(Formula::limp(phi.clone(), psi))));
        assert!(!satisfies(&m, &Judgement::thesis(phi)));
    }

    #[test]
    fn self_implication_is_a_tautology() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in ["p", "p (x) q", "2*p -o q \\/ bot", "!p /\\ 1"] {
            let f = fml(f);
            for _ in 0..20 {
                let m = sample_model_with(&mut rng, ["p", "q"], SampleProfile::Mixed);
                assert_eq!(eval(&m, &Formula::limp(f.clone(), f.clone())), ExtValue::zero());
            }
        }
    }

    #[test]
    fn double_negation_detects_finiteness() {
        let nn = fml("!!p");
        let fin = Model::from_pairs([("p", ExtValue::finite(rat_int(17)))]);
        let inf = Model::from_pairs([("p", ExtValue::Infinity)]);
        assert_eq!(eval(&fin, &nn), ExtValue::zero());
        assert_eq!(eval(&inf, &nn), ExtValue::Infinity);
    }

    #[test]
    fn biimplication_is_absolute_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let m = sample_model_with(&mut rng, ["p", "q"], SampleProfile::Mixed);
            let d = eval(&m, &fml("p o-o q"));
            let (vp, vq) = (eval(&m, &fml("p")), eval(&m, &fml("q")));
            let expected = vp.tsub(&vq).max(vq.tsub(&vp));
            assert_eq!(d, expected);
        }
    }

    #[test]
    fn satisfaction_examples() {
        let m = Model::from_pairs([
            ("p", ExtValue::finite(rat(1, 2))),
            ("q", ExtValue::one()),
        ]);
        assert!(satisfies(&m, &jdg("2*p |- q")));
        assert!(!satisfies(&m, &jdg("p |- q")));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let m = sample_model_with(&mut rng, ["phi"], SampleProfile::Mixed);
            assert!(!satisfies(&m, &jdg("|- 1 \\/ !1")));
            assert!(satisfies(&m, &jdg("bot |- phi")));
        }
    }

    #[test]
    fn satisfies_all_folds() {
        let m = Model::zeroed();
        let tautologies = vec![jdg("|- top"), jdg("p |- p"), jdg("bot |- q")];
        assert!(satisfies_all(&m, &tautologies));
        let unsat = vec![jdg("|- 1 \\/ !1")];
        assert!(!satisfies_all(&m, &unsat));
        assert!(satisfies_all(&m, &[]));
    }

    #[test]
    fn context_satisfaction_matches_folded_implication() {
        // Γ |- ψ and |- (x)Γ -o ψ have the same models
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let js = [
            jdg("p, q |- p (x) q"),
            jdg("p, !q, 2*p |- q \\/ r"),
            jdg("|- p -o p"),
            jdg("p /\\ q |- 1"),
        ];
        for j in &js {
            let folded = Judgement::thesis(j.as_implication());
            for _ in 0..100 {
                let m = sample_model_with(&mut rng, ["p", "q", "r"], SampleProfile::Mixed);
                assert_eq!(satisfies(&m, j), satisfies(&m, &folded), "{j}");
            }
        }
    }

    #[test]
    fn diagram_round_trip() {
        let m = Model::from_pairs([
            ("p", ExtValue::finite(rat(3, 2))),
            ("q", ExtValue::Infinity),
            ("r", ExtValue::zero()),
        ]);
        let d = model_to_diagram(&m, ["p", "q", "r"]);
        assert_eq!(d.axioms["p"], DiagramAxiom::Value(rat(3, 2)));
        assert_eq!(d.axioms["q"], DiagramAxiom::Infinite);
        assert_eq!(diagram_to_model(&d), m);

        // the axioms are judgements the model itself satisfies
        assert!(satisfies_all(&m, &d.to_judgements()));
    }

    #[test]
    fn sampling_profiles() {
        let props = ["a", "b", "c", "d"];
        let m1 = sample_model(props, 42, SampleProfile::Mixed);
        let m2 = sample_model(props, 42, SampleProfile::Mixed);
        assert_eq!(m1, m2);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = sample_model_with(&mut rng, props, SampleProfile::FiniteOnly);
            assert!(m.assignment.values().all(ExtValue::is_finite));
            let b = sample_model_with(&mut rng, props, SampleProfile::Boundary);
            assert!(b
                .assignment
                .values()
                .all(|v| v.is_infinite() || *v == ExtValue::zero()));
        }
    }

    #[test]
    fn model_files() {
        let src = "# test model\np = 1/2\nq = inf\nr = 3 # three\n";
        let m = parse_model(src, ExtValue::zero()).unwrap();
        assert_eq!(*m.get("p"), ExtValue::finite(rat(1, 2)));
        assert_eq!(*m.get("q"), ExtValue::Infinity);
        assert_eq!(*m.get("r"), ExtValue::finite(rat_int(3)));
        assert_eq!(*m.get("unbound"), ExtValue::zero());

        let printed = m.to_string();
        let back = parse_model(&printed, ExtValue::zero()).unwrap();
        assert_eq!(back, m);

        assert!(parse_model("p == 1", ExtValue::zero()).is_err());
        assert!(parse_model("p = -1", ExtValue::zero()).is_err());
        assert!(parse_model("p = 1\np = 2", ExtValue::zero()).is_err());
        assert!(parse_model("1p = 1", ExtValue::zero()).is_err());
    }
}
