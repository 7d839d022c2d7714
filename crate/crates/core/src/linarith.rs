//! Exact linear arithmetic over the rationals.
//!
//! Systems of affine inequalities `c1*x1 + ... + cn*xn + d >= 0` (or
//! `> 0`) are decided by Fourier-Motzkin elimination. Every row produced
//! during elimination remembers the nonnegative combination of input
//! rows that generated it, so an infeasible system yields a checkable
//! certificate (a combination deriving a violated constant row) and a
//! feasible one yields a rational witness by back-substitution.
//!
//! Entailment of one inequality by a system reduces to infeasibility of
//! the system extended with the strict negation of the goal; transposing
//! that certificate gives nonnegative multipliers `t` and a slack `t0`
//! with `goal = t . hyps + t0` as an identity of affine forms. When the
//! hypotheses are themselves inconsistent no such identity need exist
//! (no combination can produce the goal's variables), so a combination
//! deriving a violated constant row from the hypotheses alone is also
//! accepted as a valid entailment certificate.

use crate::extval::Rational;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type Var = String;

/// Relation of an affine row to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `form >= 0`
    Geq,
    /// `form > 0`
    Gt,
}

/// One inequality in the canonical form `sum(coeffs) + constant REL 0`.
/// Variables with zero coefficient are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineConstraint {
    coeffs: BTreeMap<Var, Rational>,
    pub constant: Rational,
    pub relation: Relation,
}

impl AffineConstraint {
    pub fn new(
        coeffs: BTreeMap<Var, Rational>,
        constant: Rational,
        relation: Relation,
    ) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        AffineConstraint { coeffs, constant, relation }
    }

    pub fn from_terms<const N: usize>(
        terms: [(&str, i64); N],
        constant: i64,
        relation: Relation,
    ) -> Self {
        let coeffs = terms
            .into_iter()
            .map(|(v, c)| (v.to_string(), Rational::from(num_bigint::BigInt::from(c))))
            .collect();
        Self::new(coeffs, Rational::from(num_bigint::BigInt::from(constant)), relation)
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, v: &str) -> Rational {
        self.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(|s| s.as_str())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// A constant row that no assignment can satisfy.
    pub fn is_violated_constant(&self) -> bool {
        self.is_constant()
            && match self.relation {
                Relation::Geq => self.constant.is_negative(),
                Relation::Gt => !self.constant.is_positive(),
            }
    }

    /// Value of the affine form at a point (missing variables read 0).
    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Rational {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            if let Some(x) = point.get(v) {
                acc += c * x;
            }
        }
        acc
    }

    pub fn satisfied_by(&self, point: &BTreeMap<Var, Rational>) -> bool {
        let v = self.eval(point);
        match self.relation {
            Relation::Geq => !v.is_negative(),
            Relation::Gt => v.is_positive(),
        }
    }

    /// `r * self` for `r > 0` (the relation is preserved).
    pub fn scaled(&self, r: &Rational) -> Self {
        debug_assert!(r.is_positive());
        AffineConstraint {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * r)).collect(),
            constant: &self.constant * r,
            relation: self.relation,
        }
    }

    /// Sum of two rows; strictness wins.
    pub fn plus(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let e = coeffs.entry(v.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                coeffs.remove(v);
            }
        }
        AffineConstraint {
            coeffs,
            constant: &self.constant + &other.constant,
            relation: if self.relation == Relation::Gt || other.relation == Relation::Gt {
                Relation::Gt
            } else {
                Relation::Geq
            },
        }
    }

    /// Same affine form and relation (used to compare an expansion with
    /// a goal row exactly).
    pub fn same_form(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && self.constant == other.constant
            && self.relation == other.relation
    }
}

impl fmt::Display for AffineConstraint {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                write!(out, "{c}*{v}")?;
                first = false;
            } else if c.is_negative() {
                write!(out, " - {}*{v}", -c)?;
            } else {
                write!(out, " + {c}*{v}")?;
            }
        }
        if first {
            write!(out, "{}", self.constant)?;
        } else if self.constant.is_negative() {
            write!(out, " - {}", -&self.constant)?;
        } else if !self.constant.is_zero() {
            write!(out, " + {}", self.constant)?;
        }
        match self.relation {
            Relation::Geq => write!(out, " >= 0"),
            Relation::Gt => write!(out, " > 0"),
        }
    }
}

/// A conjunction of affine constraints plus a set of variables declared
/// nonnegative. The nonnegativity declarations materialize as ordinary
/// rows `x >= 0` appended after `constraints`; certificate multipliers
/// index into that combined row list (see [`LinSystem::rows`]).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinSystem {
    pub constraints: Vec<AffineConstraint>,
    pub nonneg: BTreeSet<Var>,
}

impl LinSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: AffineConstraint) -> &mut Self {
        self.constraints.push(c);
        self
    }

    pub fn declare_nonneg(&mut self, v: impl Into<Var>) -> &mut Self {
        self.nonneg.insert(v.into());
        self
    }

    /// All rows in certificate-index order: the explicit constraints
    /// first, then one `x >= 0` row per nonnegative variable in name
    /// order.
    pub fn rows(&self) -> Vec<AffineConstraint> {
        let mut rows = self.constraints.clone();
        for v in &self.nonneg {
            rows.push(AffineConstraint::new(
                BTreeMap::from([(v.clone(), Rational::from(num_bigint::BigInt::from(1)))]),
                Rational::zero(),
                Relation::Geq,
            ));
        }
        rows
    }

    pub fn universe(&self) -> BTreeSet<Var> {
        let mut u: BTreeSet<Var> = self
            .constraints
            .iter()
            .flat_map(|c| c.variables().map(str::to_string))
            .collect();
        u.extend(self.nonneg.iter().cloned());
        u
    }

    pub fn satisfied_by(&self, point: &BTreeMap<Var, Rational>) -> bool {
        self.rows().iter().all(|c| c.satisfied_by(point))
    }
}

impl fmt::Display for LinSystem {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.rows() {
            writeln!(out, "{c}")?;
        }
        Ok(())
    }
}

/// Nonnegative multipliers over row indices plus a nonnegative slack.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Combination {
    pub multipliers: BTreeMap<usize, Rational>,
    pub slack: Rational,
}

impl Combination {
    /// Build after checking the sign invariants.
    pub fn checked(
        multipliers: BTreeMap<usize, Rational>,
        slack: Rational,
    ) -> Option<Self> {
        if multipliers.values().any(|m| m.is_negative()) || slack.is_negative() {
            return None;
        }
        let multipliers = multipliers.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Some(Combination { multipliers, slack })
    }

    pub fn is_well_formed(&self) -> bool {
        self.multipliers.values().all(|m| !m.is_negative()) && !self.slack.is_negative()
    }

    /// `sum(t_i * rows_i) + slack`. Returns `None` on an out-of-range
    /// index. The result's relation is strict iff some strict row has a
    /// positive multiplier.
    pub fn expand(&self, rows: &[AffineConstraint]) -> Option<AffineConstraint> {
        let mut acc = AffineConstraint::new(BTreeMap::new(), self.slack.clone(), Relation::Geq);
        for (&i, m) in &self.multipliers {
            let row = rows.get(i)?;
            if m.is_zero() {
                continue;
            }
            acc = acc.plus(&row.scaled(m));
        }
        Some(acc)
    }
}

/// A satisfying rational point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: BTreeMap<Var, Rational>,
}

/// A nonnegative combination of the system's rows that collapses to a
/// constant row no point can satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub combination: Combination,
    pub derived: AffineConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Witness),
    Infeasible(InfeasibilityCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// A point satisfying the hypotheses and strictly violating the goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub point: BTreeMap<Var, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entailment {
    Entailed(Combination),
    Refuted(Countermodel),
}

// ---------------------------------------------------------------------------
// elimination

/// A row together with the nonnegative combination of original rows
/// that produced it.
#[derive(Clone, Debug)]
pub struct TrackedRow {
    pub row: AffineConstraint,
    pub parents: BTreeMap<usize, Rational>,
}

impl TrackedRow {
    fn original(i: usize, row: AffineConstraint) -> Self {
        let parents = BTreeMap::from([(i, Rational::from(num_bigint::BigInt::from(1)))]);
        TrackedRow { row, parents }
    }

    fn scaled(&self, r: &Rational) -> Self {
        TrackedRow {
            row: self.row.scaled(r),
            parents: self.parents.iter().map(|(&i, m)| (i, m * r)).collect(),
        }
    }

    fn plus(&self, other: &Self) -> Self {
        let mut parents = self.parents.clone();
        for (&i, m) in &other.parents {
            let e = parents.entry(i).or_insert_with(Rational::zero);
            *e += m;
        }
        TrackedRow { row: self.row.plus(&other.row), parents }
    }
}

/// Divide a row by a positive rational so the lexicographically first
/// variable has coefficient of absolute value 1; pure renaming of the
/// same half-space, but it lets duplicate rows collide.
fn canonicalize(t: TrackedRow) -> TrackedRow {
    let Some((_, lead)) = t.row.coeffs.iter().next() else { return t };
    let norm = lead.abs();
    if norm == Rational::from(num_bigint::BigInt::from(1)) {
        return t;
    }
    t.scaled(&norm.recip())
}

/// Keep only the strongest row among those sharing an affine linear
/// part, and drop satisfied constant rows.
fn prune(rows: Vec<TrackedRow>) -> Vec<TrackedRow> {
    let mut best: BTreeMap<Vec<(Var, Rational)>, TrackedRow> = BTreeMap::new();
    for t in rows {
        if t.row.is_constant() && !t.row.is_violated_constant() {
            continue;
        }
        let key: Vec<(Var, Rational)> =
            t.row.coeffs.iter().map(|(v, c)| (v.clone(), c.clone())).collect();
        match best.get(&key) {
            Some(cur) if !stronger(&t.row, &cur.row) => {}
            _ => {
                best.insert(key, t);
            }
        }
    }
    best.into_values().collect()
}

/// Does `a` imply `b` for rows with identical linear parts?
fn stronger(a: &AffineConstraint, b: &AffineConstraint) -> bool {
    a.constant < b.constant
        || (a.constant == b.constant
            && (a.relation == Relation::Gt || b.relation == Relation::Geq))
}

/// One Fourier-Motzkin step on tracked rows: every pairing of a row
/// with positive `v` coefficient and one with negative coefficient,
/// scaled so `v` cancels.
fn eliminate_tracked(rows: &[TrackedRow], v: &str) -> Vec<TrackedRow> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for t in rows {
        let c = t.row.coeff(v);
        if c.is_zero() {
            out.push(t.clone());
        } else if c.is_positive() {
            pos.push(t.scaled(&c.recip()));
        } else {
            neg.push(t.scaled(&(-c).recip()));
        }
    }
    for p in &pos {
        for n in &neg {
            out.push(canonicalize(p.plus(n)));
        }
    }
    prune(out)
}

/// Eliminate `v`, with provenance over the indices of `rows`.
pub fn fm_eliminate_tracked(rows: &[AffineConstraint], v: &str) -> Vec<TrackedRow> {
    let tracked: Vec<TrackedRow> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| TrackedRow::original(i, r.clone()))
        .collect();
    eliminate_tracked(&tracked, v)
}

/// Eliminate `v` from the system (provenance dropped; see
/// [`fm_eliminate_tracked`] to keep it). Nonnegativity declarations are
/// folded into ordinary rows first.
pub fn fm_eliminate(s: &LinSystem, v: &str) -> LinSystem {
    let out = fm_eliminate_tracked(&s.rows(), v);
    LinSystem {
        constraints: out.into_iter().map(|t| t.row).collect(),
        nonneg: BTreeSet::new(),
    }
}

/// Pick the variable whose elimination produces the fewest pairings.
fn cheapest_variable(rows: &[TrackedRow]) -> Option<Var> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in rows {
        for (v, c) in &t.row.coeffs {
            let e = counts.entry(v).or_default();
            if c.is_positive() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    counts
        .into_iter()
        .min_by_key(|(v, (p, n))| (p * n, v.to_string()))
        .map(|(v, _)| v.to_string())
}

/// Decide the system, returning either an exact witness or a
/// certificate.
pub fn feasible(s: &LinSystem) -> Feasibility {
    let original = s.rows();
    let mut rows: Vec<TrackedRow> = original
        .iter()
        .enumerate()
        .map(|(i, r)| TrackedRow::original(i, r.clone()))
        .collect();
    rows = prune(rows);
    // (variable, rows mentioning it at that stage) for back-substitution
    let mut stages: Vec<(Var, Vec<AffineConstraint>)> = Vec::new();
    loop {
        if let Some(bad) = rows.iter().find(|t| t.row.is_violated_constant()) {
            let combination = Combination {
                multipliers: bad.parents.clone(),
                slack: Rational::zero(),
            };
            debug_assert!(combination
                .expand(&original)
                .is_some_and(|d| d.same_form(&bad.row)));
            return Feasibility::Infeasible(InfeasibilityCertificate {
                combination,
                derived: bad.row.clone(),
            });
        }
        let Some(v) = cheapest_variable(&rows) else { break };
        let mentioning: Vec<AffineConstraint> = rows
            .iter()
            .filter(|t| !t.row.coeff(&v).is_zero())
            .map(|t| t.row.clone())
            .collect();
        rows = eliminate_tracked(&rows, &v);
        stages.push((v, mentioning));
    }
    // all variables eliminated and no violated constant row survives
    let mut assignment: BTreeMap<Var, Rational> = BTreeMap::new();
    for (v, mentioning) in stages.iter().rev() {
        let value = choose_value(v, mentioning, &assignment);
        assignment.insert(v.clone(), value);
    }
    for v in s.universe() {
        assignment.entry(v).or_insert_with(Rational::zero);
    }
    debug_assert!(s.satisfied_by(&assignment));
    Feasibility::Feasible(Witness { assignment })
}

/// Value for `v` within the bounds imposed by `mentioning` under the
/// already-fixed later variables.
fn choose_value(
    v: &str,
    mentioning: &[AffineConstraint],
    fixed: &BTreeMap<Var, Rational>,
) -> Rational {
    let one = Rational::from(num_bigint::BigInt::from(1));
    let two = Rational::from(num_bigint::BigInt::from(2));
    // c*v + rest REL 0 becomes v >= -rest/c (c > 0) or v <= -rest/c (c < 0)
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for row in mentioning {
        let c = row.coeff(v);
        let mut rest = row.constant.clone();
        for (w, cw) in row.coeffs() {
            if w != v {
                rest += cw * fixed.get(w).cloned().unwrap_or_else(Rational::zero);
            }
        }
        let bound = -rest / &c;
        let strict = row.relation == Relation::Gt;
        if c.is_positive() {
            if lower
                .as_ref()
                .map_or(true, |(b, s)| bound > *b || (bound == *b && strict && !s))
            {
                lower = Some((bound, strict));
            }
        } else if upper
            .as_ref()
            .map_or(true, |(b, s)| bound < *b || (bound == *b && strict && !s))
        {
            upper = Some((bound, strict));
        }
    }
    match (lower, upper) {
        (None, None) => Rational::zero(),
        (Some((lo, false)), None) => lo,
        (Some((lo, true)), None) => lo + one,
        (None, Some((hi, false))) => hi,
        (None, Some((hi, true))) => hi - one,
        (Some((lo, ls)), Some((hi, hs))) => {
            debug_assert!(lo < hi || (lo == hi && !ls && !hs));
            if !ls && lo == hi {
                lo
            } else if !ls && !hs {
                lo
            } else {
                (lo + hi) / two
            }
        }
    }
}

/// Does the system entail `goal >= 0`? Either a combination certifying
/// the entailment or a countermodel point.
pub fn entails(hyps: &LinSystem, goal: &AffineConstraint) -> Entailment {
    debug_assert!(goal.relation == Relation::Geq);
    debug_assert!(hyps.rows().iter().all(|r| r.relation == Relation::Geq));
    // negate the goal: sum + d >= 0 fails iff -sum - d > 0
    let negated = AffineConstraint::new(
        goal.coeffs().iter().map(|(v, c)| (v.clone(), -c)).collect(),
        -goal.constant.clone(),
        Relation::Gt,
    );
    let mut extended = hyps.clone();
    // nonnegativity rows of `hyps` sit before this index in rows()
    let neg_index = extended.constraints.len() + extended.nonneg.len();
    extended.constraints.extend(
        extended.nonneg.iter().map(|v| {
            AffineConstraint::new(
                BTreeMap::from([(v.clone(), Rational::from(num_bigint::BigInt::from(1)))]),
                Rational::zero(),
                Relation::Geq,
            )
        }),
    );
    extended.nonneg.clear();
    extended.push(negated);
    match feasible(&extended) {
        Feasibility::Feasible(w) => Entailment::Refuted(Countermodel { point: w.assignment }),
        Feasibility::Infeasible(cert) => {
            let mut multipliers = cert.combination.multipliers;
            let mu = multipliers.remove(&neg_index).unwrap_or_else(Rational::zero);
            if mu.is_zero() {
                // the hypotheses alone are contradictory; the
                // combination certifies anything by deriving absurdity
                return Entailment::Entailed(Combination {
                    multipliers,
                    slack: Rational::zero(),
                });
            }
            let scaled: BTreeMap<usize, Rational> =
                multipliers.into_iter().map(|(i, m)| (i, m / &mu)).collect();
            // derived = sum(t_i hyp_i) + mu * (-goal), a violated Gt row,
            // so goal = sum(t_i/mu hyp_i) - derived/mu with -derived/mu >= 0
            let slack = -&cert.derived.constant / &mu;
            debug_assert!(!slack.is_negative());
            let combination = Combination { multipliers: scaled, slack };
            debug_assert!(verify_combination(hyps, goal, &combination));
            Entailment::Entailed(combination)
        }
    }
}

/// Check a combination against hypotheses and goal: the multipliers
/// must be nonnegative and the expansion must either reproduce the
/// goal's affine form exactly or collapse to a constant row that no
/// point satisfies (the hypotheses were contradictory).
pub fn verify_combination(
    hyps: &LinSystem,
    goal: &AffineConstraint,
    c: &Combination,
) -> bool {
    if !c.is_well_formed() {
        return false;
    }
    let rows = hyps.rows();
    let Some(expansion) = c.expand(&rows) else { return false };
    if expansion.coeffs == *goal.coeffs() && expansion.constant == goal.constant {
        return true;
    }
    expansion.is_violated_constant()
}

/// Check an infeasibility certificate by exact re-expansion.
pub fn verify_certificate(s: &LinSystem, cert: &InfeasibilityCertificate) -> bool {
    if !cert.combination.is_well_formed() || !cert.combination.slack.is_zero() {
        return false;
    }
    let Some(expansion) = cert.combination.expand(&s.rows()) else { return false };
    expansion.same_form(&cert.derived) && cert.derived.is_violated_constant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> Rational {
        q(n, 1)
    }

    fn geq<const N: usize>(terms: [(&str, i64); N], constant: i64) -> AffineConstraint {
        AffineConstraint::from_terms(terms, constant, Relation::Geq)
    }

    fn sys<const N: usize>(rows: [AffineConstraint; N]) -> LinSystem {
        LinSystem { constraints: rows.to_vec(), nonneg: BTreeSet::new() }
    }

    // -- independent oracle for elimination and feasibility ----------------
    //
    // Brute-force evaluation over a small rational grid. A projection is
    // correct when a grid point satisfies the eliminated system iff some
    // grid extension of it satisfies the original; used as the ground
    // truth for the derived behavior of the elimination and witnesses.

    fn grid() -> Vec<Rational> {
        vec![qi(-2), qi(-1), q(-1, 2), qi(0), q(1, 2), qi(1), qi(2)]
    }

    fn grid_points(vars: &[Var]) -> Vec<BTreeMap<Var, Rational>> {
        let mut points = vec![BTreeMap::new()];
        for v in vars {
            let mut next = Vec::new();
            for p in &points {
                for g in grid() {
                    let mut p = p.clone();
                    p.insert(v.clone(), g);
                    next.push(p);
                }
            }
            points = next;
        }
        points
    }

    #[test]
    fn elimination_examples() {
        // chaining x - y >= 0, y - 1 >= 0 gives x - 1 >= 0
        let s = sys([geq([("x", 1), ("y", -1)], 0), geq([("y", 1)], -1)]);
        let out = fm_eliminate(&s, "y");
        assert_eq!(out.constraints, vec![geq([("x", 1)], -1)]);

        // no opposing bound: the row disappears
        let s = sys([geq([("x", 1)], 0)]);
        let out = fm_eliminate(&s, "x");
        assert!(out.constraints.is_empty());

        // opposite bounds that cannot meet surface as a constant row
        let s = sys([geq([("x", 1)], -1), geq([("x", -1)], 0)]);
        let out = fm_eliminate(&s, "x");
        assert_eq!(out.constraints, vec![geq([], -1)]);
        assert!(out.constraints[0].is_violated_constant());
    }

    #[test]
    fn elimination_provenance_recomputes_rows() {
        let rows = vec![
            geq([("x", 2), ("y", -1)], 0),
            geq([("y", 3), ("x", 1)], -2),
            AffineConstraint::from_terms([("y", 1)], 5, Relation::Gt),
        ];
        for t in fm_eliminate_tracked(&rows, "y") {
            let c = Combination {
                multipliers: t.parents.clone(),
                slack: Rational::zero(),
            };
            let expansion = c.expand(&rows).unwrap();
            assert!(expansion.same_form(&t.row), "{expansion} != {}", t.row);
        }
    }

    #[test]
    fn feasibility_examples() {
        let s = sys([geq([("x", 1), ("y", -1)], 0), geq([("y", 1)], -1)]);
        match feasible(&s) {
            Feasibility::Feasible(w) => assert!(s.satisfied_by(&w.assignment)),
            other => panic!("expected witness, got {other:?}"),
        }

        let s = sys([geq([("x", 1)], -1), geq([("x", -1)], 0)]);
        match feasible(&s) {
            Feasibility::Infeasible(cert) => {
                assert!(verify_certificate(&s, &cert));
                // the certificate is the plain sum of the two rows
                assert_eq!(cert.derived, geq([], -1));
            }
            other => panic!("expected certificate, got {other:?}"),
        }

        match feasible(&LinSystem::new()) {
            Feasibility::Feasible(w) => assert!(w.assignment.is_empty()),
            other => panic!("empty system must be feasible, got {other:?}"),
        }
    }

    #[test]
    fn strict_rows_are_respected() {
        // x > 0, -x >= 0 has no solution
        let mut s = LinSystem::new();
        s.push(AffineConstraint::from_terms([("x", 1)], 0, Relation::Gt));
        s.push(geq([("x", -1)], 0));
        match feasible(&s) {
            Feasibility::Infeasible(cert) => {
                assert!(verify_certificate(&s, &cert));
                assert_eq!(cert.derived.relation, Relation::Gt);
            }
            other => panic!("expected certificate, got {other:?}"),
        }

        // x > 0 alone is satisfiable with a strict witness
        let mut s = LinSystem::new();
        s.push(AffineConstraint::from_terms([("x", 1)], 0, Relation::Gt));
        match feasible(&s) {
            Feasibility::Feasible(w) => assert!(s.satisfied_by(&w.assignment)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonneg_declarations_are_rows() {
        let mut s = LinSystem::new();
        s.push(geq([("x", -1)], -1));
        s.declare_nonneg("x");
        assert_eq!(s.rows().len(), 2);
        match feasible(&s) {
            Feasibility::Infeasible(cert) => assert!(verify_certificate(&s, &cert)),
            other => panic!("x >= 0 and -x - 1 >= 0 cannot both hold: {other:?}"),
        }
    }

    #[test]
    fn entailment_examples() {
        // doubling a row
        let s = sys([geq([("x_p", 1), ("x_q", -1)], 0)]);
        let goal = geq([("x_p", 2), ("x_q", -2)], 0);
        match entails(&s, &goal) {
            Entailment::Entailed(c) => {
                assert!(verify_combination(&s, &goal, &c));
                assert_eq!(c.multipliers.get(&0), Some(&qi(2)));
                assert!(c.slack.is_zero());
            }
            other => panic!("expected combination, got {other:?}"),
        }

        // half the coefficient is not enough when the variables may
        // differ: 2x_p - x_q >= 0 does not force x_p - x_q >= 0
        let mut s = sys([geq([("x_p", 2), ("x_q", -1)], 0)]);
        s.declare_nonneg("x_p");
        s.declare_nonneg("x_q");
        let goal = geq([("x_p", 1), ("x_q", -1)], 0);
        match entails(&s, &goal) {
            Entailment::Refuted(cm) => {
                assert!(s.satisfied_by(&cm.point));
                assert!(!goal.satisfied_by(&cm.point));
                // the classic countermodel x_p = 1/2, x_q = 1 works too
                let classic =
                    BTreeMap::from([("x_p".to_string(), q(1, 2)), ("x_q".to_string(), qi(1))]);
                assert!(s.satisfied_by(&classic));
                assert!(!goal.satisfied_by(&classic));
            }
            other => panic!("expected countermodel, got {other:?}"),
        }

        // trivial goal from no hypotheses
        let goal = geq([], 0);
        match entails(&LinSystem::new(), &goal) {
            Entailment::Entailed(c) => {
                assert!(c.multipliers.is_empty());
                assert!(c.slack.is_zero());
                assert!(verify_combination(&LinSystem::new(), &goal, &c));
            }
            other => panic!("expected empty combination, got {other:?}"),
        }
    }

    #[test]
    fn entailment_with_slack() {
        let s = sys([geq([("x", 1)], -3)]);
        let goal = geq([("x", 1)], 0);
        match entails(&s, &goal) {
            Entailment::Entailed(c) => {
                assert_eq!(c.slack, qi(3));
                assert!(verify_combination(&s, &goal, &c));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn entailment_from_contradictory_hypotheses() {
        let s = sys([geq([("x", 1)], -1), geq([("x", -1)], 0)]);
        let goal = geq([("y", 1)], 0);
        match entails(&s, &goal) {
            Entailment::Entailed(c) => {
                // no identity can produce y; the combination derives a
                // violated constant row instead
                let expansion = c.expand(&s.rows()).unwrap();
                assert!(expansion.is_violated_constant());
                assert!(verify_combination(&s, &goal, &c));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn combination_tampering_is_caught() {
        let s = sys([geq([("x_p", 1), ("x_q", -1)], 0)]);
        let goal = geq([("x_p", 2), ("x_q", -2)], 0);
        let Entailment::Entailed(c) = entails(&s, &goal) else {
            panic!("entailment expected")
        };
        let mut tampered = c.clone();
        tampered.multipliers.insert(0, qi(3));
        assert!(!verify_combination(&s, &goal, &tampered));

        let mut negative = c.clone();
        negative.multipliers.insert(0, qi(-2));
        assert!(!verify_combination(&s, &goal, &negative));
        assert!(Combination::checked(negative.multipliers, negative.slack).is_none());
    }

    fn random_system(rng: &mut ChaCha8Rng, vars: &[Var], rows: usize) -> LinSystem {
        let mut s = LinSystem::new();
        for _ in 0..rows {
            let mut coeffs = BTreeMap::new();
            for v in vars {
                let c = rng.random_range(-2..=2i64);
                if c != 0 {
                    coeffs.insert(v.clone(), qi(c));
                }
            }
            let relation = if rng.random_bool(0.2) { Relation::Gt } else { Relation::Geq };
            s.push(AffineConstraint::new(coeffs, qi(rng.random_range(-2..=2i64)), relation));
        }
        s
    }

    /// Exact one-variable feasibility by interval arithmetic: with all
    /// other variables fixed, the rows bound `v` from below and above.
    /// Written independently of the elimination code to serve as its
    /// oracle.
    fn extends_over(rows: &[AffineConstraint], v: &str, fixed: &BTreeMap<Var, Rational>) -> bool {
        let mut lower: Option<(Rational, bool)> = None;
        let mut upper: Option<(Rational, bool)> = None;
        for row in rows {
            let c = row.coeff(v);
            if c.is_zero() {
                if !row.satisfied_by(fixed) {
                    return false;
                }
                continue;
            }
            let mut rest = row.constant.clone();
            for (w, cw) in row.coeffs() {
                if w != v {
                    rest += cw * fixed.get(w).cloned().unwrap_or_else(Rational::zero);
                }
            }
            let bound = -rest / &c;
            let strict = row.relation == Relation::Gt;
            if c.is_positive() {
                match &mut lower {
                    Some((b, _)) if *b > bound => {}
                    Some((b, s)) if *b == bound => *s = *s || strict,
                    _ => lower = Some((bound, strict)),
                }
            } else {
                match &mut upper {
                    Some((b, _)) if *b < bound => {}
                    Some((b, s)) if *b == bound => *s = *s || strict,
                    _ => upper = Some((bound, strict)),
                }
            }
        }
        match (lower, upper) {
            (Some((lo, ls)), Some((hi, hs))) => lo < hi || (lo == hi && !ls && !hs),
            _ => true,
        }
    }

    #[test]
    fn projection_matches_brute_force() {
        let vars: Vec<Var> = vec!["x".into(), "y".into(), "z".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let s = random_system(&mut rng, &vars, 3);
            let eliminated = fm_eliminate(&s, "z");
            for p in grid_points(&vars[..2].to_vec()) {
                let projected_ok = eliminated.satisfied_by(&p);
                let extension_ok = extends_over(&s.rows(), "z", &p);
                assert_eq!(
                    projected_ok, extension_ok,
                    "projection disagrees with the interval oracle on\n{s}at {p:?}"
                );
            }
        }
    }

    #[test]
    fn feasibility_duality_on_random_systems() {
        let vars: Vec<Var> = vec!["x".into(), "y".into(), "z".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen_infeasible = 0;
        let mut seen_feasible = 0;
        for _ in 0..300 {
            let s = random_system(&mut rng, &vars, 4);
            match feasible(&s) {
                Feasibility::Feasible(w) => {
                    seen_feasible += 1;
                    assert!(s.satisfied_by(&w.assignment), "bad witness for\n{s}");
                }
                Feasibility::Infeasible(cert) => {
                    seen_infeasible += 1;
                    assert!(verify_certificate(&s, &cert), "bad certificate for\n{s}");
                    // no grid point slips through
                    assert!(
                        grid_points(&vars).iter().all(|p| !s.satisfied_by(p)),
                        "grid point satisfies a certified-infeasible system\n{s}"
                    );
                }
            }
        }
        assert!(seen_feasible > 20, "sampler produced too few feasible systems");
        assert!(seen_infeasible > 20, "sampler produced too few infeasible systems");
    }

    #[test]
    fn entailment_agrees_with_sampling_falsifier() {
        let vars: Vec<Var> = vec!["x".into(), "y".into()];
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let mut s = random_system(&mut rng, &vars, 3);
            for row in &mut s.constraints {
                row.relation = Relation::Geq;
            }
            let goal = {
                let mut g = random_system(&mut rng, &vars, 1).constraints.pop().unwrap();
                g.relation = Relation::Geq;
                g
            };
            match entails(&s, &goal) {
                Entailment::Entailed(c) => {
                    assert!(verify_combination(&s, &goal, &c));
                    for p in grid_points(&vars) {
                        assert!(
                            !s.satisfied_by(&p) || goal.satisfied_by(&p),
                            "sampled falsification of a certified entailment\n{s}goal {goal}"
                        );
                    }
                }
                Entailment::Refuted(cm) => {
                    assert!(s.satisfied_by(&cm.point));
                    assert!(!goal.satisfied_by(&cm.point));
                }
            }
        }
    }

    #[test]
    fn display_format() {
        let row = AffineConstraint::new(
            BTreeMap::from([("x".to_string(), qi(2)), ("y".to_string(), qi(-1))]),
            q(-3, 2),
            Relation::Geq,
        );
        assert_eq!(row.to_string(), "2*x - 1*y - 3/2 >= 0");
        let strict = AffineConstraint::from_terms([], 1, Relation::Gt);
        assert_eq!(strict.to_string(), "1 > 0");
    }
}
