//! Formula and judgement syntax for the three logics.
//!
//! The base logic has the lattice constants and connectives
//! (`bot`, `top`, `/\`, `\/`), the tensor `(x)` and its residual `-o`.
//! The first extension adds the unit constant `1`; the second adds scaling
//! of a formula by a nonnegative rational, written `r*phi`. Negation and
//! biimplication are definable and are only sugar here:
//! `!phi = phi -o bot` and `phi o-o psi = (phi -o psi) /\ (psi -o phi)`.
//!
//! Concrete syntax accepted by the parser:
//!
//! ```text
//! formula   := limp
//! limp      := lat (("-o" | "o-o") lat)*      right associative
//! lat       := tens (("/\" | "\/") tens)*     left associative
//! tens      := unary ("(x)" unary)*           left associative
//! unary     := rational "*" unary | "!" unary | atom
//! atom      := "bot" | "top" | "1" | rational | ident | "(" formula ")"
//! judgement := [formula ("," formula)*] "|-" formula
//! ```
//!
//! `#` starts a comment running to the end of the line. A bare rational
//! `r` in atom position is the numeral `r*1`. One lexical quirk follows
//! from the tensor symbol: the exact character sequence `(x)` is always
//! the tensor operator, so a parenthesized atom named `x` must be written
//! with whitespace, `( x )`.

use crate::extval::{parse_rational, Rational};
use num_traits::{One as _, Signed};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Atomic proposition identifier. Plain `ident` tokens when parsed from
/// text; generated names (for instance equation atoms) may contain other
/// characters and then cannot round-trip through the parser.
pub type PropName = String;

/// Propositional formulas. `Scale` carries a nonnegative rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Top,
    One,
    Atom(PropName),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Tensor(Box<Formula>, Box<Formula>),
    /// `Limp(phi, psi)` is `phi -o psi`.
    Limp(Box<Formula>, Box<Formula>),
    Scale(Rational, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn limp(a: Formula, b: Formula) -> Formula {
        Formula::Limp(Box::new(a), Box::new(b))
    }

    /// `!phi`, sugar for `phi -o bot`.
    pub fn not(a: Formula) -> Formula {
        Formula::limp(a, Formula::Bot)
    }

    /// `phi o-o psi`, sugar for `(phi -o psi) /\ (psi -o phi)`.
    pub fn biimp(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::limp(a.clone(), b.clone()),
            Formula::limp(b, a),
        )
    }

    /// Scale by a nonnegative rational. Panics on a negative scalar.
    pub fn scale(r: Rational, body: Formula) -> Formula {
        assert!(!r.is_negative(), "Formula::scale: negative scalar {r}");
        Formula::Scale(r, Box::new(body))
    }

    /// The numeral `r`, i.e. `r*1`.
    pub fn numeral(r: Rational) -> Formula {
        Formula::scale(r, Formula::One)
    }

    /// `n`-fold tensor power: `0*phi` is `top`, and each further step
    /// tensors on another copy of `phi`.
    pub fn ntimes(n: u32, phi: &Formula) -> Formula {
        match n {
            0 => Formula::Top,
            _ => {
                let mut f = phi.clone();
                for _ in 1..n {
                    f = Formula::tensor(phi.clone(), f);
                }
                f
            }
        }
    }

    /// Match `phi -o bot`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Limp(a, b) if **b == Formula::Bot => Some(a),
            _ => None,
        }
    }

    /// Match `(a -o b) /\ (b -o a)`, returning `(a, b)`.
    pub fn as_biimp(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::And(l, r) = self {
            if let (Formula::Limp(a, b), Formula::Limp(b2, a2)) = (&**l, &**r) {
                if a == a2 && b == b2 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::Top | Formula::One | Formula::Atom(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) | Formula::Limp(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Scale(_, a) => 1 + a.size(),
        }
    }

    /// Collect atomic proposition names into `out`.
    pub fn collect_atoms<'a>(&'a self, out: &mut std::collections::BTreeSet<&'a str>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) | Formula::Limp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Scale(_, a) => a.collect_atoms(out),
            _ => {}
        }
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<&str> {
        let mut s = std::collections::BTreeSet::new();
        self.collect_atoms(&mut s);
        s
    }

    /// Smallest logic level whose syntax admits this formula.
    pub fn level(&self) -> LogicLevel {
        match self {
            Formula::Bot | Formula::Top | Formula::Atom(_) => LogicLevel::L,
            Formula::One => LogicLevel::L1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Tensor(a, b) | Formula::Limp(a, b) => {
                a.level().max(b.level())
            }
            Formula::Scale(_, body) => {
                if **body == Formula::One {
                    LogicLevel::L1
                } else {
                    LogicLevel::L1star
                }
            }
        }
    }
}

/// The three logics, ordered by expressiveness. `L1` extends `L` with the
/// unit constant (and therefore numerals `r*1`); `L1star` additionally
/// allows scaling arbitrary formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LogicLevel {
    L,
    L1,
    L1star,
}

impl LogicLevel {
    pub fn permits(self, f: &Formula) -> bool {
        f.level() <= self
    }
}

impl fmt::Display for LogicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LogicLevel::L => "L",
            LogicLevel::L1 => "L1",
            LogicLevel::L1star => "L1star",
        };
        f.write_str(s)
    }
}

impl FromStr for LogicLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" => Ok(LogicLevel::L),
            "L1" => Ok(LogicLevel::L1),
            "L1star" => Ok(LogicLevel::L1star),
            other => Err(format!("unknown logic level `{other}` (expected L, L1 or L1star)")),
        }
    }
}

/// A judgement `phi_1, ..., phi_n |- psi`. The antecedent order matters
/// for proof checking; the exchange rule is explicit in the calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Judgement {
    pub antecedents: Vec<Formula>,
    pub consequent: Formula,
}

impl Judgement {
    pub fn new(antecedents: Vec<Formula>, consequent: Formula) -> Self {
        Judgement { antecedents, consequent }
    }

    /// `|- psi`.
    pub fn thesis(consequent: Formula) -> Self {
        Judgement { antecedents: Vec::new(), consequent }
    }

    /// `phi |- psi`.
    pub fn entail(antecedent: Formula, consequent: Formula) -> Self {
        Judgement { antecedents: vec![antecedent], consequent }
    }

    pub fn level(&self) -> LogicLevel {
        self.antecedents
            .iter()
            .map(Formula::level)
            .fold(self.consequent.level(), LogicLevel::max)
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<&str> {
        let mut s = self.consequent.atoms();
        for a in &self.antecedents {
            a.collect_atoms(&mut s);
        }
        s
    }

    /// The antecedents folded into one right-nested tensor, `top` if
    /// there are none. Right nesting matches what repeated folding of the
    /// last two context entries produces.
    pub fn folded_antecedent(&self) -> Formula {
        let mut it = self.antecedents.iter().cloned().rev();
        match it.next() {
            None => Formula::Top,
            Some(last) => it.fold(last, |acc, f| Formula::tensor(f, acc)),
        }
    }

    /// The single formula `antecedents -o consequent`, used when a
    /// judgement has to be treated as a formula (e.g. for evaluation of
    /// hypothesis streams).
    pub fn as_implication(&self) -> Formula {
        if self.antecedents.is_empty() {
            self.consequent.clone()
        } else {
            Formula::limp(self.folded_antecedent(), self.consequent.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// printing

/// Precedence levels for the printer, loosest first.
#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Limp,
    Lat,
    Tens,
    Unary,
}

fn write_formula(f: &Formula, prec: Prec, out: &mut String) {
    // sugar first: biimplication, then negation
    if let Some((a, b)) = f.as_biimp() {
        if prec > Prec::Limp {
            out.push('(');
            write_formula(a, Prec::Lat, out);
            out.push_str(" o-o ");
            write_formula(b, Prec::Lat, out);
            out.push(')');
        } else {
            write_formula(a, Prec::Lat, out);
            out.push_str(" o-o ");
            write_formula(b, Prec::Lat, out);
        }
        return;
    }
    if let Some(a) = f.as_negation() {
        out.push('!');
        write_formula(a, Prec::Unary, out);
        return;
    }
    match f {
        Formula::Bot => out.push_str("bot"),
        Formula::Top => out.push_str("top"),
        Formula::One => out.push('1'),
        Formula::Atom(p) => out.push_str(p),
        Formula::Limp(a, b) => {
            let parens = prec > Prec::Limp;
            if parens {
                out.push('(');
            }
            // right associative: the left argument needs one level more
            write_formula(a, Prec::Lat, out);
            out.push_str(" -o ");
            write_formula(b, Prec::Limp, out);
            if parens {
                out.push(')');
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let op = if matches!(f, Formula::And(..)) { " /\\ " } else { " \\/ " };
            let parens = prec > Prec::Lat;
            if parens {
                out.push('(');
            }
            // left associative chain
            write_formula(a, Prec::Lat, out);
            out.push_str(op);
            write_formula(b, Prec::Tens, out);
            if parens {
                out.push(')');
            }
        }
        Formula::Tensor(a, b) => {
            let parens = prec > Prec::Tens;
            if parens {
                out.push('(');
            }
            write_formula(a, Prec::Tens, out);
            out.push_str(" (x) ");
            write_formula(b, Prec::Unary, out);
            if parens {
                out.push(')');
            }
        }
        Formula::Scale(r, body) => {
            // numerals print as bare rationals, except 1*1 which must not
            // collapse to the unit constant
            if **body == Formula::One && !r.is_one() {
                out.push_str(&r.to_string());
                return;
            }
            out.push_str(&r.to_string());
            out.push('*');
            match **body {
                // unary continues with scale, bang or an atom; anything
                // else needs parentheses
                Formula::Scale(..)
                | Formula::Bot
                | Formula::Top
                | Formula::One
                | Formula::Atom(_) => write_formula(body, Prec::Unary, out),
                _ if body.as_negation().is_some() && body.as_biimp().is_none() => {
                    write_formula(body, Prec::Unary, out)
                }
                _ => {
                    out.push('(');
                    write_formula(body, Prec::Limp, out);
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, Prec::Limp, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        if self.antecedents.is_empty() {
            f.write_str("|- ")?;
        } else {
            f.write_str(" |- ")?;
        }
        write!(f, "{}", self.consequent)
    }
}

// ---------------------------------------------------------------------------
// lexing and parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Bot,
    Top,
    Number(Rational, String),
    Ident(String),
    LParen,
    RParen,
    TensorOp,
    AndOp,
    OrOp,
    LimpOp,
    BiimpOp,
    Bang,
    Star,
    Comma,
    Turnstile,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Bot => write!(f, "`bot`"),
            Tok::Top => write!(f, "`top`"),
            Tok::Number(_, raw) => write!(f, "number `{raw}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::TensorOp => write!(f, "`(x)`"),
            Tok::AndOp => write!(f, "`/\\`"),
            Tok::OrOp => write!(f, "`\\/`"),
            Tok::LimpOp => write!(f, "`-o`"),
            Tok::BiimpOp => write!(f, "`o-o`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Turnstile => write!(f, "`|-`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

/// Parse error with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn perr(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError { pos, msg: msg.into() }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_trivia(&mut self) {
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn next_token(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_trivia();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let b = self.src[self.pos];

        // multi-character operators
        if self.starts_with("(x)") {
            self.pos += 3;
            return Ok((start, Tok::TensorOp));
        }
        if self.starts_with("/\\") {
            self.pos += 2;
            return Ok((start, Tok::AndOp));
        }
        if self.starts_with("\\/") {
            self.pos += 2;
            return Ok((start, Tok::OrOp));
        }
        if self.starts_with("-o") {
            self.pos += 2;
            return Ok((start, Tok::LimpOp));
        }
        if self.starts_with("o-o") {
            // only when it cannot be the prefix of an identifier
            let after = self.pos + 3;
            if after >= self.src.len() || !is_ident_char(self.src[after]) {
                self.pos += 3;
                return Ok((start, Tok::BiimpOp));
            }
        }
        if self.starts_with("|-") {
            self.pos += 2;
            return Ok((start, Tok::Turnstile));
        }

        match b {
            b'(' => {
                self.pos += 1;
                Ok((start, Tok::LParen))
            }
            b')' => {
                self.pos += 1;
                Ok((start, Tok::RParen))
            }
            b'!' => {
                self.pos += 1;
                Ok((start, Tok::Bang))
            }
            b'*' => {
                self.pos += 1;
                Ok((start, Tok::Star))
            }
            b',' => {
                self.pos += 1;
                Ok((start, Tok::Comma))
            }
            _ if b.is_ascii_digit() => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                // a fraction only if `/` is followed by a digit, so that
                // `1/\ ...` still lexes as `1` `/\`
                if end + 1 < self.src.len()
                    && self.src[end] == b'/'
                    && self.src[end + 1].is_ascii_digit()
                {
                    end += 1;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                }
                let raw = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                let r = parse_rational(&raw).map_err(|e| perr(start, e.to_string()))?;
                Ok((start, Tok::Number(r, raw)))
            }
            _ if is_ident_start(b) => {
                let mut end = self.pos;
                while end < self.src.len() && is_ident_char(self.src[end]) {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                match name.as_str() {
                    "bot" => Ok((start, Tok::Bot)),
                    "top" => Ok((start, Tok::Top)),
                    _ => Ok((start, Tok::Ident(name))),
                }
            }
            _ => Err(perr(start, format!("unexpected character `{}`", b as char))),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let mut lx = Lexer::new(src);
        let mut toks = Vec::new();
        loop {
            let t = lx.next_token()?;
            let eof = t.1 == Tok::Eof;
            toks.push(t);
            if eof {
                break;
            }
        }
        Ok(Parser { toks, idx: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].1
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].1.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(perr(self.pos(), format!("expected {want}, found {}", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.limp()
    }

    fn limp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.lat()?;
        match self.peek() {
            Tok::LimpOp => {
                self.bump();
                let rhs = self.limp()?;
                Ok(Formula::limp(lhs, rhs))
            }
            Tok::BiimpOp => {
                self.bump();
                let rhs = self.limp()?;
                Ok(Formula::biimp(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn lat(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.tens()?;
        loop {
            match self.peek() {
                Tok::AndOp => {
                    self.bump();
                    let rhs = self.tens()?;
                    lhs = Formula::and(lhs, rhs);
                }
                Tok::OrOp => {
                    self.bump();
                    let rhs = self.tens()?;
                    lhs = Formula::or(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn tens(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::TensorOp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::tensor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                let body = self.unary()?;
                Ok(Formula::not(body))
            }
            Tok::Number(r, _) => {
                // lookahead for `*`: scaling; otherwise a numeral atom
                let save = self.idx;
                self.bump();
                if *self.peek() == Tok::Star {
                    self.bump();
                    let body = self.unary()?;
                    Ok(Formula::scale(r, body))
                } else {
                    self.idx = save;
                    self.atom()
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Tok::Bot => Ok(Formula::Bot),
            Tok::Top => Ok(Formula::Top),
            Tok::Number(r, raw) => {
                if raw == "1" {
                    Ok(Formula::One)
                } else {
                    Ok(Formula::numeral(r))
                }
            }
            Tok::Ident(name) => Ok(Formula::Atom(name)),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            other => Err(perr(self.pos(), format!("expected a formula, found {other}"))),
        }
    }

    fn judgement(&mut self) -> Result<Judgement, ParseError> {
        let mut antecedents = Vec::new();
        if *self.peek() != Tok::Turnstile {
            antecedents.push(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                antecedents.push(self.formula()?);
            }
        }
        self.expect(&Tok::Turnstile)?;
        let consequent = self.formula()?;
        Ok(Judgement { antecedents, consequent })
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(perr(self.pos(), format!("trailing input: {}", self.peek())))
        }
    }
}

/// Parse one formula from a string.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parse one judgement from a string.
pub fn parse_judgement(src: &str) -> Result<Judgement, ParseError> {
    let mut p = Parser::new(src)?;
    let j = p.judgement()?;
    p.finish()?;
    Ok(j)
}

/// Parse a theory file: one judgement per non-empty line, `#` comments.
pub fn parse_theory(src: &str) -> Result<Vec<Judgement>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in src.split('\n') {
        let stripped = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if !stripped.trim().is_empty() {
            let j = parse_judgement(stripped).map_err(|e| perr(offset + e.pos, e.msg))?;
            out.push(j);
        }
        offset += line.len() + 1;
    }
    Ok(out)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl FromStr for Judgement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_judgement(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extval::{rat, rat_int};

    fn fml(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn precedence_example() {
        // scale binds strongest, then tensor, then the lattice ops, then -o
        let f = fml("1/2*phi (x) psi /\\ 3*psi -o theta");
        let expected = Formula::limp(
            Formula::and(
                Formula::tensor(
                    Formula::scale(rat(1, 2), Formula::atom("phi")),
                    Formula::atom("psi"),
                ),
                Formula::scale(rat_int(3), Formula::atom("psi")),
            ),
            Formula::atom("theta"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn negation_is_sugar() {
        assert_eq!(fml("!bot"), Formula::not(Formula::Bot));
        assert_eq!(fml("!p"), Formula::limp(Formula::atom("p"), Formula::Bot));
        // `!` binds tighter than tensor
        assert_eq!(
            fml("!p (x) q"),
            Formula::tensor(Formula::not(Formula::atom("p")), Formula::atom("q"))
        );
    }

    #[test]
    fn numerals() {
        assert_eq!(fml("1"), Formula::One);
        assert_eq!(fml("2"), Formula::numeral(rat_int(2)));
        assert_eq!(fml("3/4"), Formula::numeral(rat(3, 4)));
        assert_eq!(fml("2*1"), Formula::scale(rat_int(2), Formula::One));
        assert_eq!(fml("0"), Formula::numeral(rat_int(0)));
    }

    #[test]
    fn biimp_is_sugar() {
        let f = fml("p o-o q");
        assert_eq!(f, Formula::biimp(Formula::atom("p"), Formula::atom("q")));
        assert_eq!(f.to_string(), "p o-o q");
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(fml("a -o b -o c"), fml("a -o (b -o c)"));
        assert_ne!(fml("a -o b -o c"), fml("(a -o b) -o c"));
    }

    #[test]
    fn judgement_forms() {
        let j = parse_judgement("p, q |- p (x) q").unwrap();
        assert_eq!(j.antecedents.len(), 2);
        assert_eq!(j.to_string(), "p, q |- p (x) q");

        let t = parse_judgement("|- top").unwrap();
        assert!(t.antecedents.is_empty());
        assert_eq!(t.to_string(), "|- top");
    }

    #[test]
    fn theory_files_with_comments() {
        let src = "# axioms\np |- q # first\n\n|- !r\n";
        let th = parse_theory(src).unwrap();
        assert_eq!(th.len(), 2);
        assert_eq!(th[1], parse_judgement("|- !r").unwrap());
    }

    #[test]
    fn levels() {
        assert_eq!(fml("p /\\ q").level(), LogicLevel::L);
        assert_eq!(fml("p (x) 1").level(), LogicLevel::L1);
        assert_eq!(fml("3 -o p").level(), LogicLevel::L1);
        assert_eq!(fml("1/2*p").level(), LogicLevel::L1star);
        assert!(LogicLevel::L1.permits(&fml("2*1")));
        assert!(!LogicLevel::L1.permits(&fml("2*p")));
    }

    #[test]
    fn print_round_trips() {
        for s in [
            "p",
            "bot",
            "top",
            "1",
            "2",
            "1*1",
            "3/4",
            "!p",
            "!!p",
            "p -o q -o r",
            "(p -o q) -o r",
            "p o-o q",
            "p /\\ q \\/ r",
            "p /\\ (q \\/ r)",
            "p (x) q (x) r",
            "p (x) (q (x) r)",
            "2*p (x) 1*1",
            "1/2*(p -o q)",
            "2*3*p",
            "!(p (x) q)",
            "p, q, 2*r |- p (x) 1",
        ] {
            if s.contains("|-") {
                let j = parse_judgement(s).unwrap();
                assert_eq!(parse_judgement(&j.to_string()).unwrap(), j, "input `{s}`");
            } else {
                let f = parse_formula(s).unwrap();
                assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "input `{s}`");
            }
        }
    }

    #[test]
    fn ntimes_powers() {
        let p = Formula::atom("p");
        assert_eq!(Formula::ntimes(0, &p), Formula::Top);
        assert_eq!(Formula::ntimes(1, &p), p.clone());
        assert_eq!(Formula::ntimes(3, &p), fml("p (x) (p (x) p)"));
    }
}
