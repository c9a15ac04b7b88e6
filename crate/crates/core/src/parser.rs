//! Recursive-descent parser for the integrand language.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := '-' factor | primary ['^' exponent]
//! primary  := NUMBER | IDENT | 'x' | func '(' args ')' | '(' poly ')'
//! func     := 'exp' '(' poly ')' | 'sin' '(' linarg ')' | 'cos' '(' linarg ')'
//!           | 'besselj' '(' const ',' linarg ')'
//! exponent := ['-'] NUMBER | IDENT | '(' const ')'
//! const    := ['-'] cterm (('+' | '-') cterm)*      cterm := NUMBER ['*' IDENT] | IDENT
//! poly     := ['-'] monomial (('+' | '-') monomial)*
//! ```
//!
//! Numbers are exact: `3/2` and `0.25` are rational literals. Identifiers in
//! coefficient position are scale parameters; identifiers in exponents and
//! Bessel orders are symbolic constants.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::as_i64;
use crate::expr::{Atom, Coeff, Expr, Integrand, Monomial};
use crate::types::{AffineForm, Param, SymbolicConst};

const FUNCTIONS: [&str; 4] = ["exp", "sin", "cos", "besselj"];

/// Byte range `start..end` into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("unsupported function `{name}` at {span}")]
    UnsupportedAtom { name: String, span: SourceSpan },
    #[error("only the variable x is supported; found `{name}` at {span}")]
    MultipleVariables { name: String, span: SourceSpan },
    #[error("unsupported structure: {message}")]
    UnsupportedStructure { message: String, span: Option<SourceSpan> },
}

impl ParseError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnsupportedAtom { span, .. }
            | ParseError::MultipleVariables { span, .. } => Some(*span),
            ParseError::UnsupportedStructure { span, .. } => *span,
        }
    }
}

fn syntax(message: impl Into<String>, span: SourceSpan) -> ParseError {
    ParseError::Syntax { message: message.into(), span }
}

fn structure(message: impl Into<String>, span: Option<SourceSpan>) -> ParseError {
    ParseError::UnsupportedStructure { message: message.into(), span }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(q) => write!(f, "number {q}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let (q, end) = lex_number(text, start)?;
            i = end;
            out.push((Tok::Num(q), SourceSpan::new(start, end)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
            continue;
        }
        let width = text[start..].chars().next().map_or(1, char::len_utf8);
        return Err(syntax(
            format!("unexpected character `{}`", &text[start..start + width]),
            SourceSpan::new(start, start + width),
        ));
    }
    out.push((Tok::End, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

fn lex_number(text: &str, start: usize) -> Result<(BigRational, usize), ParseError> {
    let bytes = text.as_bytes();
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    let mut i = digits(start);
    let whole = &text[start..i];
    let mut frac = "";
    if i < bytes.len() && bytes[i] == b'.' {
        let fs = i + 1;
        i = digits(fs);
        frac = &text[fs..i];
    }
    if whole.is_empty() && frac.is_empty() {
        return Err(syntax("malformed number", SourceSpan::new(start, i.max(start + 1))));
    }
    let mantissa: BigInt = format!("{whole}{frac}").parse().expect("digits");
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let mut value = BigRational::new(mantissa, scale);
    if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() && frac.is_empty() {
        let ds = i + 1;
        i = digits(ds);
        let denom: BigInt = text[ds..i].parse().expect("digits");
        if denom.is_zero() {
            return Err(syntax("zero denominator", SourceSpan::new(start, i)));
        }
        value /= BigRational::from_integer(denom);
    }
    Ok((value, i))
}

/// Result of parsing a parenthesized polynomial or the argument of a function.
struct PolyTerm {
    monomial: Monomial,
    has_x: bool,
    last_ident: Option<(String, SourceSpan)>,
    span: SourceSpan,
}

enum Primary {
    Atom(Atom),
    Group(Vec<PolyTerm>, SourceSpan),
}

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<SourceSpan, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(syntax(format!("expected {tok}, found {}", self.peek()), self.span()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(&Tok::Plus) {
                terms.push(self.term()?);
            } else if self.eat(&Tok::Minus) {
                let t = self.term()?;
                terms.push(negate(t));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.eat(&Tok::Star) {
            factors.push(self.factor()?);
        }
        Ok(canonical_product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(negate(self.factor()?));
        }
        let start = self.span();
        let primary = self.primary()?;
        if self.eat(&Tok::Caret) {
            let exponent = self.exponent()?;
            let span = start.to(self.prev_span());
            return apply_exponent(primary, exponent, span);
        }
        match primary {
            Primary::Atom(a) => Ok(Expr::Atom(a)),
            Primary::Group(terms, span) => {
                if terms.len() == 1 {
                    let t = terms.into_iter().next().expect("one monomial");
                    Ok(monomial_expr(t.monomial))
                } else {
                    Err(structure("a parenthesized sum needs an exponent, as in (1 + x)^(-s)", Some(span)))
                }
            }
        }
    }

    fn primary(&mut self) -> Result<Primary, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Num(q) => Ok(Primary::Atom(Atom::Scalar(Coeff::rational(q)))),
            Tok::Ident(name) if name == "x" => Ok(Primary::Atom(Atom::Power(AffineForm::integer(1)))),
            Tok::Ident(name) if self.peek() == &Tok::LParen => self.call(name, span),
            Tok::Ident(name) if FUNCTIONS.contains(&name.as_str()) => {
                Err(syntax(format!("expected `(` after `{name}`"), self.span()))
            }
            Tok::Ident(name) => Ok(Primary::Atom(Atom::Scalar(Coeff::param(Param::new(name))))),
            Tok::LParen => {
                let terms = self.poly()?;
                let close = self.expect(&Tok::RParen)?;
                Ok(Primary::Group(terms, span.to(close)))
            }
            other => Err(syntax(format!("unexpected {other}"), span)),
        }
    }

    fn call(&mut self, name: String, name_span: SourceSpan) -> Result<Primary, ParseError> {
        if !FUNCTIONS.contains(&name.as_str()) {
            return Err(ParseError::UnsupportedAtom { name, span: name_span });
        }
        self.expect(&Tok::LParen)?;
        let atom = match name.as_str() {
            "exp" => {
                let arg_start = self.span();
                let mut terms = self.poly()?;
                let arg_span = arg_start.to(self.prev_span());
                if terms.len() != 1 {
                    return Err(structure("exp takes a single monomial argument such as -a*x^2", Some(arg_span)));
                }
                let t = terms.pop().expect("one monomial");
                require_variable(&t, "exp")?;
                Atom::Exp { coeff: t.monomial.coeff.negated(), power: t.monomial.power }
            }
            "sin" => Atom::Sin(self.linarg("sin")?),
            "cos" => Atom::Cos(self.linarg("cos")?),
            _ => {
                let order = self.const_expr()?;
                self.expect(&Tok::Comma)?;
                let coeff = self.linarg("besselj")?;
                Atom::BesselJ { order, coeff }
            }
        };
        self.expect(&Tok::RParen)?;
        Ok(Primary::Atom(atom))
    }

    fn linarg(&mut self, func: &str) -> Result<Coeff, ParseError> {
        let t = self.monomial()?;
        require_variable(&t, func)?;
        if !t.monomial.power.is_one() {
            return Err(structure(format!("the argument of {func} must be linear in x"), Some(t.span)));
        }
        Ok(t.monomial.coeff)
    }

    fn poly(&mut self) -> Result<Vec<PolyTerm>, ParseError> {
        let mut out = Vec::new();
        let mut negative = self.eat(&Tok::Minus);
        loop {
            let mut t = self.monomial()?;
            if negative {
                t.monomial.coeff = t.monomial.coeff.negated();
            }
            out.push(t);
            if self.eat(&Tok::Plus) {
                negative = false;
            } else if self.eat(&Tok::Minus) {
                negative = true;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn monomial(&mut self) -> Result<PolyTerm, ParseError> {
        let start = self.span();
        let mut coeff = Coeff::one();
        let mut power = BigRational::zero();
        let mut has_x = false;
        let mut last_ident = None;
        if self.eat(&Tok::Minus) {
            coeff = coeff.negated();
        }
        loop {
            let (tok, span) = self.bump();
            match tok {
                Tok::Num(q) => coeff.rational *= q,
                Tok::Ident(name) if name == "x" => {
                    let p = if self.eat(&Tok::Caret) {
                        let e = self.exponent()?;
                        e.as_rational()
                            .cloned()
                            .ok_or_else(|| structure("powers of x inside a polynomial must be rational", Some(span)))?
                    } else {
                        BigRational::one()
                    };
                    power += p;
                    has_x = true;
                }
                Tok::Ident(name) if FUNCTIONS.contains(&name.as_str()) || self.peek() == &Tok::LParen => {
                    return Err(structure(
                        format!("function `{name}` cannot appear inside a polynomial or argument"),
                        Some(span),
                    ));
                }
                Tok::Ident(name) => {
                    let k = if self.eat(&Tok::Caret) {
                        let e = self.exponent()?;
                        e.as_rational()
                            .and_then(as_i64)
                            .and_then(|k| i32::try_from(k).ok())
                            .ok_or_else(|| structure("parameter powers must be integers", Some(span)))?
                    } else {
                        1
                    };
                    coeff = coeff.mul(&Coeff::param(Param::new(name.clone())).powi(i64::from(k)).expect("param power"));
                    last_ident = Some((name, span));
                }
                other => return Err(syntax(format!("expected a number, parameter or x, found {other}"), span)),
            }
            if !self.eat(&Tok::Star) {
                break;
            }
        }
        Ok(PolyTerm { monomial: Monomial { coeff, power }, has_x, last_ident, span: start.to(self.prev_span()) })
    }

    fn exponent(&mut self) -> Result<AffineForm, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.const_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                let (tok, span) = self.bump();
                match tok {
                    Tok::Num(q) => Ok(AffineForm::constant(-q)),
                    other => Err(syntax(format!("expected a number after `-`, found {other}"), span)),
                }
            }
            Tok::Num(q) => {
                self.bump();
                Ok(AffineForm::constant(q))
            }
            Tok::Ident(name) if name != "x" && !FUNCTIONS.contains(&name.as_str()) => {
                self.bump();
                Ok(AffineForm::sym(SymbolicConst::new(name)))
            }
            other => Err(syntax(format!("expected an exponent, found {other}"), self.span())),
        }
    }

    fn const_expr(&mut self) -> Result<AffineForm, ParseError> {
        let mut acc = AffineForm::zero();
        let mut negative = self.eat(&Tok::Minus);
        if !negative {
            self.eat(&Tok::Plus);
        }
        loop {
            let term = self.const_term()?;
            acc = if negative { acc - term } else { acc + term };
            if self.eat(&Tok::Plus) {
                negative = false;
            } else if self.eat(&Tok::Minus) {
                negative = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn const_term(&mut self) -> Result<AffineForm, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Num(q) => {
                if self.eat(&Tok::Star) {
                    let (tok, span) = self.bump();
                    match tok {
                        Tok::Ident(name) if name != "x" => Ok(AffineForm::zero().with_sym(SymbolicConst::new(name), q)),
                        Tok::Ident(_) => Err(structure("x cannot appear in an exponent or order", Some(span))),
                        other => Err(syntax(format!("expected a constant name, found {other}"), span)),
                    }
                } else {
                    Ok(AffineForm::constant(q))
                }
            }
            Tok::Ident(name) if name == "x" => Err(structure("x cannot appear in an exponent or order", Some(span))),
            Tok::Ident(name) => Ok(AffineForm::sym(SymbolicConst::new(name))),
            other => Err(syntax(format!("expected a constant, found {other}"), span)),
        }
    }
}

fn require_variable(t: &PolyTerm, func: &str) -> Result<(), ParseError> {
    if t.has_x {
        return Ok(());
    }
    match &t.last_ident {
        Some((name, span)) => Err(ParseError::MultipleVariables { name: name.clone(), span: *span }),
        None => Err(syntax(format!("the argument of {func} must involve x"), t.span)),
    }
}

fn monomial_expr(m: Monomial) -> Expr {
    let mut factors = vec![Expr::Atom(Atom::Scalar(m.coeff))];
    if !m.power.is_zero() {
        factors.push(Expr::Atom(Atom::Power(AffineForm::constant(m.power))));
    }
    canonical_product(factors)
}

fn apply_exponent(primary: Primary, exponent: AffineForm, span: SourceSpan) -> Result<Expr, ParseError> {
    let int_exponent = exponent.as_rational().and_then(as_i64);
    match primary {
        Primary::Atom(Atom::Power(e)) if e.as_rational().is_some_and(One::is_one) => {
            Ok(Expr::Atom(Atom::Power(exponent)))
        }
        Primary::Atom(Atom::Scalar(c)) => int_exponent
            .and_then(|k| c.powi(k))
            .map(|c| Expr::Atom(Atom::Scalar(c)))
            .ok_or_else(|| structure("constants may only be raised to integer powers", Some(span))),
        Primary::Group(mut terms, gspan) => {
            if terms.len() >= 2 {
                let has_x = terms.iter().any(|t| t.has_x);
                if !has_x {
                    if let Some((name, span)) = terms.iter().rev().find_map(|t| t.last_ident.clone()) {
                        return Err(ParseError::MultipleVariables { name, span });
                    }
                    return Err(structure("a multinomial must involve x", Some(gspan)));
                }
                return Ok(Expr::Atom(Atom::Multinomial {
                    terms: terms.into_iter().map(|t| t.monomial).collect(),
                    exponent,
                }));
            }
            let m = terms.pop().expect("nonempty poly").monomial;
            let coeff = if m.coeff.is_one() {
                Coeff::one()
            } else {
                int_exponent
                    .and_then(|k| m.coeff.powi(k))
                    .ok_or_else(|| structure("a coefficient may only be raised to an integer power", Some(span)))?
            };
            let mut factors = vec![Expr::Atom(Atom::Scalar(coeff))];
            if !m.power.is_zero() {
                factors.push(Expr::Atom(Atom::Power(exponent.scale(&m.power))));
            }
            Ok(canonical_product(factors))
        }
        Primary::Atom(_) => {
            Err(structure("exponents apply only to x, constants and parenthesized polynomials", Some(span)))
        }
    }
}

fn negate(e: Expr) -> Expr {
    canonical_product(vec![Expr::Atom(Atom::Scalar(Coeff::rational(-BigRational::one()))), e])
}

/// Flattens nested products and merges constant factors into one leading
/// scalar, dropped when it is exactly one.
pub(crate) fn canonical_product(factors: Vec<Expr>) -> Expr {
    let mut scalar = Coeff::one();
    let mut saw_scalar = false;
    let mut rest = Vec::new();
    let mut stack: Vec<Expr> = factors.into_iter().rev().collect();
    while let Some(f) = stack.pop() {
        match f {
            Expr::Product(xs) => stack.extend(xs.into_iter().rev()),
            Expr::Atom(Atom::Scalar(c)) => {
                scalar = scalar.mul(&c);
                saw_scalar = true;
            }
            other => rest.push(other),
        }
    }
    let mut out = Vec::with_capacity(rest.len() + 1);
    if saw_scalar && (!scalar.is_one() || rest.is_empty()) {
        out.push(Expr::Atom(Atom::Scalar(scalar)));
    }
    out.extend(rest);
    if out.len() == 1 {
        out.pop().expect("one factor")
    } else {
        Expr::Product(out)
    }
}

/// Parses integrand text into an AST whose atoms all belong to the catalog.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, _text: text };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(syntax(format!("unexpected {}", p.peek()), p.span()));
    }
    Ok(e)
}

/// Splits top-level sums into product-form integrands and checks the
/// structural requirements of every atom.
pub fn validate(expr: &Expr) -> Result<Vec<Integrand>, ParseError> {
    let params = expr.params();
    if let Some(clash) = expr.sym_consts().iter().find(|c| params.contains(&Param::new(c.name()))) {
        return Err(structure(
            format!("`{clash}` is used both as a scale parameter and as an exponent/order constant"),
            None,
        ));
    }
    let summands: Vec<&Expr> = match expr {
        Expr::Sum(xs) => xs.iter().collect(),
        other => vec![other],
    };
    summands
        .into_iter()
        .map(|s| {
            let atoms: Vec<Atom> = match s {
                Expr::Atom(a) => vec![a.clone()],
                Expr::Product(xs) => xs
                    .iter()
                    .map(|x| match x {
                        Expr::Atom(a) => Ok(a.clone()),
                        _ => Err(structure("sums are only supported at the top level", None)),
                    })
                    .collect::<Result<_, _>>()?,
                Expr::Sum(_) => return Err(structure("nested sums are not supported", None)),
            };
            atoms.iter().try_for_each(check_atom)?;
            Ok(Integrand { factors: atoms })
        })
        .collect()
}

fn check_atom(atom: &Atom) -> Result<(), ParseError> {
    let positive = |c: &Coeff, what: &str| {
        if c.is_positive() {
            Ok(())
        } else {
            Err(structure(format!("{what} must have a positive coefficient, got {c}"), None))
        }
    };
    match atom {
        Atom::Exp { coeff, power } => {
            positive(coeff, "exp(-c*x^p)")?;
            if !power.is_positive() {
                return Err(structure("exp(-c*x^p) needs p > 0", None));
            }
            Ok(())
        }
        Atom::Sin(c) => positive(c, "sin"),
        Atom::Cos(c) => positive(c, "cos"),
        Atom::BesselJ { coeff, .. } => positive(coeff, "besselj"),
        Atom::Multinomial { terms, .. } => {
            if terms.len() < 2 {
                return Err(structure("a multinomial needs at least two terms", None));
            }
            terms.iter().try_for_each(|t| positive(&t.coeff, "each multinomial term"))
        }
        Atom::Power(_) | Atom::Scalar(_) => Ok(()),
    }
}

/// `parse` followed by `validate`.
pub fn parse_integrands(text: &str) -> Result<Vec<Integrand>, ParseError> {
    validate(&parse(text)?)
}
