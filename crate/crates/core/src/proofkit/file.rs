//! Text format for proof objects.
//!
//! ```text
//! # free-form comment
//! assume p |- q
//! 0: p |- q BY hyp
//! 1: p, q |- q BY weak [0] {phi = q; psi = q}
//! ```
//!
//! Each numbered line carries a judgement, a rule name, the premise
//! indices in brackets (omitted when the rule has none), and the slot
//! assignment in braces (omitted when empty). Slots: `gamma` and `delta`
//! take bracketed comma-separated formula lists, `phi`/`psi`/`theta`
//! formulas, `r`/`s` nonnegative rationals, `op` one of the four binary
//! connective symbols. Case-split steps have no line syntax; only
//! schematic rules and `hyp` round-trip through files.

use super::{BinConn, Instantiation, Proof, RuleId, Step};
use crate::extval::parse_rational;
use crate::syntax::{Formula, Judgement};
use std::fmt;

/// Parse failure, with the 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ProofFileError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ProofFileError> {
    Err(ProofFileError { line, msg: msg.into() })
}

/// Parse a proof file into its assumption list and proof.
pub fn parse_proof_file(text: &str) -> Result<(Vec<Judgement>, Proof), ProofFileError> {
    let mut assumptions = Vec::new();
    let mut steps: Vec<Step> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("assume ") {
            match rest.trim().parse::<Judgement>() {
                Ok(j) => assumptions.push(j),
                Err(e) => return err(lineno, format!("bad assumption: {e}")),
            }
            continue;
        }
        let step = parse_step(line, lineno, steps.len())?;
        steps.push(step);
    }
    if steps.is_empty() {
        return err(0, "no proof steps");
    }
    Ok((assumptions, Proof { steps }))
}

fn parse_step(line: &str, lineno: usize, expect_idx: usize) -> Result<Step, ProofFileError> {
    let Some((num, rest)) = line.split_once(':') else {
        return err(lineno, "expected `n: <judgement> BY <rule> ...`");
    };
    match num.trim().parse::<usize>() {
        Ok(n) if n == expect_idx => {}
        Ok(n) => return err(lineno, format!("step numbered {n}, expected {expect_idx}")),
        Err(_) => return err(lineno, format!("bad step number `{}`", num.trim())),
    }
    // judgements may mention an atom spelled BY, so take the rightmost
    // separator that is followed by a recognizable rule name
    let mut split = None;
    let mut from = rest.len();
    while let Some(pos) = rest[..from].rfind(" BY ") {
        let tail = rest[pos + 4..].trim_start();
        let name_end = tail
            .find(|c: char| c.is_whitespace() || c == '[' || c == '{')
            .unwrap_or(tail.len());
        if RuleId::from_name(&tail[..name_end]).is_some() {
            split = Some(pos);
            break;
        }
        from = pos;
    }
    let Some(pos) = split else {
        return err(lineno, "no ` BY <rule>` clause found");
    };
    let judgement = match rest[..pos].trim().parse::<Judgement>() {
        Ok(j) => j,
        Err(e) => return err(lineno, format!("bad judgement: {e}")),
    };
    let mut tail = rest[pos + 4..].trim();
    let name_end = tail
        .find(|c: char| c.is_whitespace() || c == '[' || c == '{')
        .unwrap_or(tail.len());
    let rule = RuleId::from_name(&tail[..name_end]).expect("matched above");
    tail = tail[name_end..].trim_start();

    let mut premises = Vec::new();
    if let Some(after) = tail.strip_prefix('[') {
        let Some(close) = after.find(']') else {
            return err(lineno, "unclosed premise list");
        };
        let body = &after[..close];
        if !body.trim().is_empty() {
            for part in body.split(',') {
                match part.trim().parse::<usize>() {
                    Ok(p) if p < expect_idx => premises.push(p),
                    Ok(p) => {
                        return err(lineno, format!("premise {p} is not an earlier step"))
                    }
                    Err(_) => return err(lineno, format!("bad premise index `{}`", part.trim())),
                }
            }
        }
        tail = after[close + 1..].trim_start();
    }

    let mut inst = Instantiation::default();
    if let Some(after) = tail.strip_prefix('{') {
        let Some(close) = after.find('}') else {
            return err(lineno, "unclosed instantiation");
        };
        parse_slots(&after[..close], &mut inst, lineno)?;
        tail = after[close + 1..].trim_start();
    }
    if !tail.is_empty() {
        return err(lineno, format!("trailing input `{tail}`"));
    }
    Ok(Step { conclusion: judgement, rule, premises, inst })
}

fn parse_slots(body: &str, inst: &mut Instantiation, lineno: usize) -> Result<(), ProofFileError> {
    for part in body.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((key, value)) = part.split_once('=') else {
            return err(lineno, format!("slot `{part}` is not `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "gamma" => inst.gamma = parse_formula_list(value, lineno)?,
            "delta" => inst.delta = parse_formula_list(value, lineno)?,
            "phi" => inst.phi = Some(parse_formula_slot(value, lineno)?),
            "psi" => inst.psi = Some(parse_formula_slot(value, lineno)?),
            "theta" => inst.theta = Some(parse_formula_slot(value, lineno)?),
            "r" | "s" => {
                let q = parse_rational(value)
                    .map_err(|e| ProofFileError { line: lineno, msg: format!("bad scalar: {e}") })?;
                if key == "r" {
                    inst.r = Some(q);
                } else {
                    inst.s = Some(q);
                }
            }
            "op" => {
                inst.op = Some(match value {
                    "/\\" => BinConn::And,
                    "\\/" => BinConn::Or,
                    "(x)" => BinConn::Tensor,
                    "-o" => BinConn::Limp,
                    other => return err(lineno, format!("unknown connective `{other}`")),
                })
            }
            other => return err(lineno, format!("unknown slot `{other}`")),
        }
    }
    Ok(())
}

fn parse_formula_slot(text: &str, lineno: usize) -> Result<Formula, ProofFileError> {
    text.parse::<Formula>()
        .map_err(|e| ProofFileError { line: lineno, msg: format!("bad formula: {e}") })
}

fn parse_formula_list(text: &str, lineno: usize) -> Result<Vec<Formula>, ProofFileError> {
    let Some(body) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) else {
        return err(lineno, format!("`{text}` is not a bracketed formula list"));
    };
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|part| parse_formula_slot(part.trim(), lineno))
        .collect()
}

/// Render assumptions and a proof in the line format. Fails on case-split
/// steps, which have no file representation.
pub fn render_proof(assumptions: &[Judgement], proof: &Proof) -> Result<String, String> {
    use fmt::Write as _;
    let mut out = String::new();
    for a in assumptions {
        let _ = writeln!(out, "assume {a}");
    }
    for (i, step) in proof.steps.iter().enumerate() {
        if matches!(step.rule, RuleId::Admissible(_)) {
            return Err(format!("step {i} is a case split and cannot be rendered"));
        }
        let _ = write!(out, "{i}: {} BY {}", step.conclusion, step.rule.name());
        if !step.premises.is_empty() {
            let list: Vec<String> = step.premises.iter().map(|p| p.to_string()).collect();
            let _ = write!(out, " [{}]", list.join(", "));
        }
        let slots = render_slots(&step.inst);
        if !slots.is_empty() {
            let _ = write!(out, " {{{slots}}}");
        }
        let _ = writeln!(out);
    }
    Ok(out)
}

fn render_slots(inst: &Instantiation) -> String {
    let mut parts = Vec::new();
    if !inst.gamma.is_empty() {
        parts.push(format!("gamma = {}", render_list(&inst.gamma)));
    }
    if !inst.delta.is_empty() {
        parts.push(format!("delta = {}", render_list(&inst.delta)));
    }
    if let Some(f) = &inst.phi {
        parts.push(format!("phi = {f}"));
    }
    if let Some(f) = &inst.psi {
        parts.push(format!("psi = {f}"));
    }
    if let Some(f) = &inst.theta {
        parts.push(format!("theta = {f}"));
    }
    if let Some(q) = &inst.r {
        parts.push(format!("r = {q}"));
    }
    if let Some(q) = &inst.s {
        parts.push(format!("s = {q}"));
    }
    if let Some(op) = inst.op {
        parts.push(format!("op = {}", op.symbol()));
    }
    parts.join("; ")
}

fn render_list(fs: &[Formula]) -> String {
    let mut out = String::from("[");
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&f.to_string());
    }
    out.push(']');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofkit::{check, ProofBuilder};
    use crate::syntax::LogicLevel;

    fn j(s: &str) -> Judgement {
        s.parse().unwrap()
    }

    #[test]
    fn round_trip_a_built_proof() {
        let hyp = j("p |- q");
        let mut b = ProofBuilder::new(vec![hyp.clone()]);
        let h = b.hyp(&hyp).unwrap();
        let c = b.contrapositive(h).unwrap();
        let i = b.mono_scale(c, &crate::extval::rat_int(2)).unwrap();
        let p = b.into_proof_of(i);

        let text = render_proof(&[hyp.clone()], &p).unwrap();
        let (assumptions, parsed) = parse_proof_file(&text).unwrap();
        assert_eq!(assumptions, vec![hyp.clone()]);
        assert_eq!(parsed.steps.len(), p.steps.len());
        for (a, b) in parsed.steps.iter().zip(&p.steps) {
            assert_eq!(a.conclusion, b.conclusion);
            assert_eq!(a.rule, b.rule);
            assert_eq!(a.premises, b.premises);
        }
        assert!(check(&parsed, &assumptions, LogicLevel::L1star).is_accepted());
    }

    #[test]
    fn hand_written_file() {
        let text = "\
# tiny derivation
assume p |- q

0: p |- q BY hyp
1: p, w |- q BY weak [0] {gamma = [p]; phi = q; psi = w}
";
        let (assumptions, p) = parse_proof_file(text).unwrap();
        assert_eq!(assumptions.len(), 1);
        assert_eq!(p.steps.len(), 2);
        assert!(check(&p, &assumptions, LogicLevel::L).is_accepted());
        assert_eq!(p.theorem(), Some(&j("p, w |- q")));
    }

    #[test]
    fn parse_errors_are_located() {
        let cases = [
            ("0: p |- p BY nonsense", "no ` BY <rule>`"),
            ("1: p |- p BY id {phi = p}", "numbered 1"),
            ("0: p |- p BY id [3] {phi = p}", "not an earlier step"),
            ("0: p |- p BY id {phi = p", "unclosed instantiation"),
            ("0: p |- p BY id {zeta = p}", "unknown slot"),
            ("0: p |- BY id", "bad judgement"),
            ("0: p |- p BY s4 {op = <>}", "unknown connective"),
        ];
        for (text, needle) in cases {
            let err = parse_proof_file(text).unwrap_err();
            assert!(
                err.msg.contains(needle) || err.to_string().contains(needle),
                "`{text}` gave `{err}`, wanted `{needle}`"
            );
        }
        assert!(parse_proof_file("# only comments\n").is_err());
    }

    #[test]
    fn case_split_steps_do_not_render() {
        let mut b = ProofBuilder::new(vec![]);
        let i = b
            .by_cases(
                (j("|- !p"), j("|- !!p")),
                |bl| bl.top(&[]),
                |br| br.top(&[]),
            )
            .unwrap();
        let p = b.into_proof_of(i);
        assert!(render_proof(&[], &p).is_err());
    }

    #[test]
    fn slot_parsing_covers_every_kind() {
        let text = r"0: |- 2*(p /\ q) o-o 2*p /\ 2*q BY s4 {phi = p; psi = q; r = 2; op = /\}";
        let (_, p) = parse_proof_file(text).unwrap();
        assert!(check(&p, &[], LogicLevel::L1star).is_accepted());

        let text = "0: p |- p BY id {phi = p}\n1: q, w, p |- p BY weak... ";
        assert!(parse_proof_file(text).is_err());
    }
}
