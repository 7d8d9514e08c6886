//! Polynomial expressions: parsing and canonical printing.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' nat)?
//! base   := rational | var | '(' expr ')'
//! var    := letter alphanum*
//! rational := int ('/' int)?
//! ```
//!
//! Whitespace is insignificant and juxtaposition is not multiplication.
//! Exponents must be below 2^32.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mpoly::MPoly;

/// Largest exponent accepted on a base with more than one term.
pub const MAX_EXPANDED_POWER: u32 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyExpr {
    pub source: String,
    pub poly: MPoly,
    /// Variable names; index `i` is variable `x_i` of `poly`.
    pub vars: Vec<String>,
}

impl PolyExpr {
    /// Canonical text of the parsed polynomial.
    pub fn canonical(&self) -> String {
        print_poly(&self.poly, &self.vars)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character '{ch}'")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Natural order on names: alphabetic prefix, then numeric suffix by value.
fn name_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u128>, &str) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, digits) = s.split_at(cut);
        (head, digits.parse().ok(), digits)
    }
    let (ha, na, da) = split(a);
    let (hb, nb, db) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(da.cmp(db))
}

/// Intermediate expression tree; variables are resolved after the whole
/// input has been read.
#[derive(Debug, Clone)]
enum Node {
    Num(BigRational),
    Var(String, usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>, usize),
    Pow(Box<Node>, u32, usize),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Int(v)) => format!("'{v}'"),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(t) => format!(
                "'{}'",
                match t {
                    Tok::Plus => '+',
                    Tok::Minus => '-',
                    Tok::Star => '*',
                    Tok::Slash => '/',
                    Tok::Caret => '^',
                    Tok::LParen => '(',
                    _ => ')',
                }
            ),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Node::Neg(Box::new(self.term()?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Node::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Node::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            acc = Node::Mul(Box::new(acc), Box::new(self.factor()?), at);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let off = self.offset();
            let e = match self.peek() {
                Some(Tok::Int(v)) => v.clone(),
                _ => return Err(syntax(off, format!("expected exponent, found {}", self.describe()))),
            };
            self.pos += 1;
            let e = u32::try_from(e).map_err(|_| syntax(off, "exponent must be below 2^32"))?;
            return Ok(Node::Pow(Box::new(base), e, at));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    let doff = self.offset();
                    let Some(Tok::Int(d)) = self.peek().cloned() else {
                        return Err(syntax(doff, format!("expected denominator, found {}", self.describe())));
                    };
                    self.pos += 1;
                    if d.is_zero() {
                        return Err(syntax(doff, "zero denominator"));
                    }
                    return Ok(Node::Num(BigRational::new(n, d)));
                }
                Ok(Node::Num(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Node::Var(name, off))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(syntax(self.offset(), format!("expected ')', found {}", self.describe())));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(syntax(off, format!("expected a number, variable or '(', found {}", self.describe()))),
        }
    }
}

fn collect_vars(node: &Node, out: &mut Vec<String>) {
    match node {
        Node::Num(_) => {}
        Node::Var(n, _) => {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        Node::Neg(a) | Node::Pow(a, _, _) => collect_vars(a, out),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b, _) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

fn degree_overflow(at: usize) -> Error {
    syntax(at, "exponent overflow: degrees must stay below 2^32")
}

fn eval(node: &Node, vars: &[String]) -> Result<MPoly> {
    let n = vars.len();
    Ok(match node {
        Node::Num(c) => MPoly::constant(n, c.clone()),
        Node::Var(name, off) => {
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable { name: name.clone(), offset: *off })?;
            MPoly::var(n, i)
        }
        Node::Neg(a) => eval(a, vars)?.neg(),
        Node::Add(a, b) => eval(a, vars)?.add(&eval(b, vars)?),
        Node::Sub(a, b) => eval(a, vars)?.sub(&eval(b, vars)?),
        Node::Mul(a, b, at) => {
            let (pa, pb) = (eval(a, vars)?, eval(b, vars)?);
            for i in 0..n {
                pa.degree_in(i).checked_add(pb.degree_in(i)).ok_or_else(|| degree_overflow(*at))?;
            }
            pa.mul(&pb)
        }
        Node::Pow(a, e, at) => {
            let pa = eval(a, vars)?;
            for i in 0..n {
                pa.degree_in(i).checked_mul(*e).ok_or_else(|| degree_overflow(*at))?;
            }
            match pa.num_terms() {
                0 => {
                    if *e == 0 {
                        MPoly::constant(n, BigRational::one())
                    } else {
                        pa
                    }
                }
                1 => {
                    let (m, c) = pa.terms().next().expect("one term");
                    let exps = m.0.iter().map(|&k| k * e).collect();
                    MPoly::from_terms(n, [(exps, num::pow(c.clone(), *e as usize))])
                }
                _ if *e > MAX_EXPANDED_POWER => {
                    return Err(syntax(*at, format!("expansion too large: exponent above {MAX_EXPANDED_POWER} on a sum")))
                }
                _ => pa.pow(*e),
            }
        }
    })
}

fn parse_tree(text: &str) -> Result<Node> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let node = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.offset(), format!("unexpected {}", p.describe())));
    }
    Ok(node)
}

/// Parses `text`; the variables are those occurring in it, in natural name
/// order (`x < y`, `x2 < x10`).
pub fn parse_polynomial(text: &str) -> Result<PolyExpr> {
    let node = parse_tree(text)?;
    let mut vars = Vec::new();
    collect_vars(&node, &mut vars);
    vars.sort_by(|a, b| name_cmp(a, b));
    let poly = eval(&node, &vars)?;
    Ok(PolyExpr { source: text.to_string(), poly, vars })
}

/// Parses `text` over the declared variables, in the given order. Any other
/// name is an error.
pub fn parse_polynomial_with_vars(text: &str, vars: &[&str]) -> Result<PolyExpr> {
    let node = parse_tree(text)?;
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let poly = eval(&node, &vars)?;
    Ok(PolyExpr { source: text.to_string(), poly, vars })
}

/// Parses several expressions over one variable table: the declared names
/// if given, otherwise every name occurring in any of them, in natural order.
pub fn parse_many(texts: &[&str], declared: Option<&[&str]>) -> Result<(Vec<MPoly>, Vec<String>)> {
    let trees = texts.iter().map(|t| parse_tree(t)).collect::<Result<Vec<_>>>()?;
    let vars: Vec<String> = match declared {
        Some(d) => d.iter().map(|s| s.to_string()).collect(),
        None => {
            let mut v = Vec::new();
            for t in &trees {
                collect_vars(t, &mut v);
            }
            v.sort_by(|a, b| name_cmp(a, b));
            v
        }
    };
    let polys = trees.iter().map(|t| eval(t, &vars)).collect::<Result<Vec<_>>>()?;
    Ok((polys, vars))
}

/// Canonical text: terms in descending graded-lexicographic order, `" + "` /
/// `" - "` between terms, unit coefficients omitted, rationals as `a/b`.
pub fn print_poly(poly: &MPoly, vars: &[String]) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in poly.terms().rev().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mut factors = Vec::new();
        let is_const = m.0.iter().all(|&e| e == 0);
        if !a.is_one() || is_const {
            factors.push(a.to_string());
        }
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(vars[i].clone()),
                _ => factors.push(format!("{}^{e}", vars[i])),
            }
        }
        let _ = write!(out, "{}", factors.join("*"));
    }
    out
}
