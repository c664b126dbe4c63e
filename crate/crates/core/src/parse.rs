//! Text format for triangular systems.
//!
//! ```text
//! # comment
//! ring x1 x2 [residue q | residue fp:<p> | fp:<p>]
//! poly t*x1^2 + x1 + 1
//! poly x2 - t^(1/2)*x1
//! ```
//!
//! Expressions use `+ - * / ^` and parentheses over `t`, `x1..xn` and
//! integers. Exponents of `t` (and of any single-term constant) may be
//! negative or rational, written `t^(-1)` or `t^(2/3)`. Division is only by
//! single-term constants. Identifiers starting with `u` are reserved.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::puiseux::{PuiseuxScalar, Rat};
use crate::residue::ResidueField;
use crate::root_tree::TriangularSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, col, message: message.into() }
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(n), line, col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(name), line, col });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            i += 1;
        } else {
            return Err(syntax(line, col, format!("unexpected character '{c}'")));
        }
    }
    out.push(Token { tok: Tok::End, line, col: col0 + chars.len() });
    Ok(out)
}

struct ExprParser {
    toks: Vec<Token>,
    pos: usize,
    nvars: usize,
    field: ResidueField,
}

impl ExprParser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(syntax(t.line, t.col, format!("expected '{c}'")))
        }
    }

    fn constant(&self, c: PuiseuxScalar) -> MPoly {
        MPoly::constant(self.nvars, c)
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            if self.at_sym('+') {
                self.next();
                acc = &acc + &self.term()?;
            } else if self.at_sym('-') {
                self.next();
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.at_sym('*') {
                self.next();
                acc = &acc * &self.unary()?;
            } else if self.at_sym('/') {
                let t = self.next();
                let d = self.unary()?;
                let inv = single_term(&d)
                    .and_then(|s| s.monomial_inverse().ok())
                    .ok_or_else(|| syntax(t.line, t.col, "division is only by a nonzero single-term constant"))?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly> {
        if self.at_sym('-') {
            self.next();
            return Ok(-&self.unary()?);
        }
        if self.at_sym('+') {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if !self.at_sym('^') {
            return Ok(base);
        }
        let caret = self.next();
        let e = self.exponent()?;
        if !e.is_negative() && e.is_integer() {
            let k = e.to_integer().to_u32().ok_or_else(|| syntax(caret.line, caret.col, "exponent too large"))?;
            return Ok(base.pow(k));
        }
        let s = single_term(&base)
            .ok_or_else(|| syntax(caret.line, caret.col, "negative or rational exponents need a single-term constant base"))?;
        let (exp, c) = s.terms()[0].clone();
        if e.is_integer() {
            let k = (-&e).to_integer().to_u32().ok_or_else(|| syntax(caret.line, caret.col, "exponent too large"))?;
            let inv = s.monomial_inverse().map_err(|_| syntax(caret.line, caret.col, "division by zero"))?;
            return Ok(self.constant(inv.pow(k)));
        }
        if !c.is_one() {
            return Err(syntax(caret.line, caret.col, "rational exponents need a power of t as base"));
        }
        Ok(self.constant(PuiseuxScalar::monomial(c, exp * e)))
    }

    fn exponent(&mut self) -> Result<Rat> {
        let paren = self.at_sym('(');
        if paren {
            self.next();
        }
        let neg = self.at_sym('-');
        if neg {
            self.next();
        }
        let num = self.int()?;
        let mut e = Rat::from_integer(num);
        if paren && self.at_sym('/') {
            let slash = self.next();
            let den = self.int()?;
            if den.is_zero() {
                return Err(syntax(slash.line, slash.col, "zero denominator"));
            }
            e /= Rat::from_integer(den);
        }
        if paren {
            self.expect_sym(')')?;
        }
        Ok(if neg { -e } else { e })
    }

    fn int(&mut self) -> Result<BigInt> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(n),
            _ => Err(syntax(t.line, t.col, "expected an integer")),
        }
    }

    fn atom(&mut self) -> Result<MPoly> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(self.constant(PuiseuxScalar::constant(self.field.from_int(&n)))),
            Tok::Ident(name) => self.ident(&name, t.line, t.col),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Tok::End => Err(syntax(t.line, t.col, "unexpected end of expression")),
            Tok::Sym(c) => Err(syntax(t.line, t.col, format!("unexpected '{c}'"))),
        }
    }

    fn ident(&self, name: &str, line: usize, col: usize) -> Result<MPoly> {
        if name == "t" {
            return Ok(self.constant(PuiseuxScalar::monomial(self.field.one(), Rat::one())));
        }
        if name.starts_with('u') {
            return Err(Error::ReservedIdentifier { name: name.to_string(), line, col });
        }
        if let Some(k) = var_index(name).filter(|k| (1..=self.nvars).contains(k)) {
            return Ok(MPoly::var(self.nvars, k - 1, self.field));
        }
        Err(syntax(line, col, format!("unknown identifier '{name}'")))
    }
}

fn var_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// The scalar of a polynomial that is a single term `c * t^e`.
fn single_term(p: &MPoly) -> Option<PuiseuxScalar> {
    p.as_scalar().filter(PuiseuxScalar::is_monomial)
}

fn parse_header(words: &[(usize, &str)], line: usize) -> Result<(usize, ResidueField)> {
    let mut it = words.iter().peekable();
    match it.next() {
        Some((_, "ring")) => {}
        Some((col, w)) => return Err(syntax(line, *col, format!("expected 'ring', found '{w}'"))),
        None => return Err(syntax(line, 1, "expected 'ring'")),
    }
    let mut n = 0;
    while let Some((col, w)) = it.peek() {
        if let Some(k) = var_index(w) {
            if k != n + 1 {
                return Err(syntax(line, *col, format!("expected x{}, found {w}", n + 1)));
            }
            n += 1;
            it.next();
        } else {
            break;
        }
    }
    if n == 0 {
        return Err(syntax(line, words.get(1).map_or(5, |w| w.0), "ring needs at least one variable"));
    }
    let mut field = ResidueField::Rationals;
    let mut field_word = it.next();
    if let Some((_, "residue")) = field_word {
        field_word = it.next();
        if field_word.is_none() {
            return Err(syntax(line, words.last().map_or(1, |w| w.0), "expected a residue field after 'residue'"));
        }
    }
    if let Some((col, w)) = field_word {
        field = if *w == "q" || *w == "QQ" {
            ResidueField::Rationals
        } else if let Some(p) = w.strip_prefix("fp:") {
            let p: u64 = p.parse().map_err(|_| syntax(line, *col, format!("invalid prime '{p}'")))?;
            ResidueField::prime(p).map_err(|e| syntax(line, *col, e.to_string()))?
        } else {
            return Err(syntax(line, *col, format!("unknown residue field '{w}'")));
        };
    }
    if let Some((col, w)) = it.next() {
        return Err(syntax(line, *col, format!("unexpected '{w}' in header")));
    }
    Ok((n, field))
}

/// Words of a line with their 1-based columns.
fn words(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &text[s..]));
    }
    out
}

/// Parses a polynomial expression in `x1..x{nvars}` and `t`.
pub fn parse_poly(text: &str, nvars: usize, field: ResidueField) -> Result<MPoly> {
    parse_expr_at(text, nvars, field, 1, 1)
}

fn parse_expr_at(text: &str, nvars: usize, field: ResidueField, line: usize, col0: usize) -> Result<MPoly> {
    let toks = lex(text, line, col0)?;
    let mut p = ExprParser { toks, pos: 0, nvars, field };
    let value = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.line, t.col, "unexpected trailing input"));
    }
    Ok(value)
}

pub fn parse_system(text: &str) -> Result<TriangularSystem> {
    let mut header: Option<(usize, ResidueField)> = None;
    let mut polys = Vec::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let ws = words(content);
        let Some((col, first)) = ws.first().copied() else {
            continue;
        };
        match header {
            None => header = Some(parse_header(&ws, line)?),
            Some((n, field)) => {
                if first != "poly" {
                    return Err(syntax(line, col, format!("expected 'poly', found '{first}'")));
                }
                if polys.len() == n {
                    return Err(syntax(line, col, format!("more than {n} polynomials")));
                }
                let offset = col - 1 + "poly".len();
                polys.push(parse_expr_at(&content[offset..], n, field, line, offset + 1)?);
            }
        }
    }
    let (n, field) = header.ok_or_else(|| syntax(last_line, 1, "missing 'ring' header"))?;
    if polys.len() != n {
        return Err(syntax(last_line, 1, format!("expected {n} polynomials, found {}", polys.len())));
    }
    TriangularSystem::new(field, polys)
}

/// Writes a system in the format read by [`parse_system`].
pub fn format_system(system: &TriangularSystem) -> String {
    let vars: Vec<String> = (1..=system.len()).map(|k| format!("x{k}")).collect();
    let mut out = format!("ring {}", vars.join(" "));
    if let ResidueField::Prime(p) = system.field() {
        out.push_str(&format!(" residue fp:{p}"));
    }
    out.push('\n');
    for f in system.polys() {
        out.push_str(&format!("poly {f}\n"));
    }
    out
}
