//! Text form of polynomials: `3/4*x1^2*x3 - x2 + 5`.
//!
//! The printer is canonical (terms descending under grevlex, fixed spacing),
//! and the parser accepts a tolerant superset: whitespace anywhere, `*`
//! optional, signs before any term. parse(print(p)) == p exactly.

use std::fmt;

use num_traits::{One, Signed};

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::rational::{parse_unsigned_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Caret,
    Star,
    Plus,
    Minus,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = s.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut end = i;
                if i < bytes.len() && bytes[i] == b'/' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    end = i;
                }
                let lit = &s[start..end];
                match parse_unsigned_rational(lit) {
                    Some(r) => toks.push((start, Tok::Num(r))),
                    None => return err(start, format!("bad numeric literal '{lit}'")),
                }
            }
            b'x' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return err(start, "variable needs an index, like x1");
                }
                let idx: usize = s[digits_start..i]
                    .parse()
                    .map_err(|_| ParseError { pos: start, msg: "variable index too large".into() })?;
                if idx == 0 {
                    return err(start, "variable indices start at 1");
                }
                toks.push((start, Tok::Var(idx - 1)));
            }
            _ => return err(i, format!("unexpected character '{}'", &s[i..i + 1])),
        }
    }
    Ok(toks)
}

/// Parses into a ring with exactly `nvars` variables.
pub fn parse_polynomial(s: &str, nvars: usize) -> Result<Polynomial, ParseError> {
    let toks = lex(s)?;
    parse_tokens(&toks, nvars, s.len())
}

/// Parses, inferring the ring size from the largest variable index
/// (minimum 1, so constants land in Q[x1]).
pub fn parse_polynomial_auto(s: &str) -> Result<Polynomial, ParseError> {
    let toks = lex(s)?;
    let nvars = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    parse_tokens(&toks, nvars, s.len())
}

fn parse_tokens(toks: &[(usize, Tok)], nvars: usize, input_len: usize) -> Result<Polynomial, ParseError> {
    if toks.is_empty() {
        return err(0, "empty polynomial");
    }
    let mut acc = Polynomial::zero(nvars);
    let mut pos = 0;
    loop {
        // Sign of the upcoming term.
        let mut negative = false;
        match toks.get(pos) {
            Some((_, Tok::Plus)) => pos += 1,
            Some((_, Tok::Minus)) => {
                negative = true;
                pos += 1;
            }
            _ => {}
        }
        let (term, next) = parse_term(toks, pos, nvars, input_len)?;
        pos = next;
        acc = if negative { acc.checked_sub(&term) } else { acc.checked_add(&term) }
            .expect("ring sizes fixed by construction");
        match toks.get(pos) {
            None => return Ok(acc),
            Some((_, Tok::Plus)) | Some((_, Tok::Minus)) => {}
            Some((p, _)) => return err(*p, "expected '+' or '-' between terms"),
        }
    }
}

fn parse_term(
    toks: &[(usize, Tok)],
    mut pos: usize,
    nvars: usize,
    input_len: usize,
) -> Result<(Polynomial, usize), ParseError> {
    let mut coeff = Rational::one();
    let mut exps = vec![0u32; nvars];
    let mut saw_factor = false;
    loop {
        match toks.get(pos) {
            Some((_, Tok::Num(r))) => {
                coeff *= r;
                pos += 1;
                saw_factor = true;
            }
            Some((p, Tok::Var(v))) => {
                if *v >= nvars {
                    return err(*p, format!("variable x{} outside ring with {} variables", v + 1, nvars));
                }
                let mut e: u32 = 1;
                if let Some((_, Tok::Caret)) = toks.get(pos + 1) {
                    match toks.get(pos + 2) {
                        Some((ep, Tok::Num(r))) => {
                            if !r.is_integer() || r.is_negative() {
                                return err(*ep, "exponent must be a non-negative integer");
                            }
                            e = num_traits::ToPrimitive::to_u32(r.numer())
                                .ok_or(ParseError { pos: *ep, msg: "exponent too large".into() })?;
                            pos += 3;
                        }
                        other => {
                            let p = other.map(|(p, _)| *p).unwrap_or(input_len);
                            return err(p, "expected integer exponent after '^'");
                        }
                    }
                } else {
                    pos += 1;
                }
                exps[*v] = exps[*v]
                    .checked_add(e)
                    .ok_or(ParseError { pos: *p, msg: "exponent too large".into() })?;
                saw_factor = true;
            }
            Some((_, Tok::Star)) => {
                if !saw_factor {
                    return err(toks[pos].0, "'*' needs a left operand");
                }
                pos += 1;
                // A factor must follow.
                match toks.get(pos) {
                    Some((_, Tok::Num(_))) | Some((_, Tok::Var(_))) => continue,
                    other => {
                        let p = other.map(|(p, _)| *p).unwrap_or(input_len);
                        return err(p, "expected a factor after '*'");
                    }
                }
            }
            _ => break,
        }
    }
    if !saw_factor {
        let p = toks.get(pos).map(|(p, _)| *p).unwrap_or(input_len);
        return err(p, "expected a term");
    }
    Ok((Polynomial::term(nvars, Monomial::new(exps), coeff), pos))
}

/// Canonical rendering with caller-chosen variable names.
pub fn format_polynomial_with(p: &Polynomial, name: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        let negative = c.is_negative();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mag = c.abs();
        let mon = format_monomial_with(m, name);
        match mon {
            None => out.push_str(&mag.to_string()),
            Some(ms) => {
                if mag.is_one() {
                    out.push_str(&ms);
                } else {
                    out.push_str(&mag.to_string());
                    out.push('*');
                    out.push_str(&ms);
                }
            }
        }
    }
    out
}

/// None for the constant monomial.
fn format_monomial_with(m: &Monomial, name: &dyn Fn(usize) -> String) -> Option<String> {
    if m.is_unit() {
        return None;
    }
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(name(i)),
            _ => parts.push(format!("{}^{}", name(i), e)),
        }
    }
    Some(parts.join("*"))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_polynomial_with(self, &|i| format!("x{}", i + 1)))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly({self})")
    }
}
