//! Human-readable monomial syntax for forms, e.g.
//! `p[0,1]*w[0] + y[1]^2*dx[0]^dx[1]`.
//!
//! Variables are `x[i]`, `y[a]` and `p[i,a]` (spacetime index first). Basis
//! factors are `w` (the volume form), `w[i]` (`ωᵢ`) and wedge products of
//! `dx[i]`. Coefficients are integers or fractions `p/q`. Rendering picks the
//! `w` basis for degrees `n` and `n − 1` and plain `dx` wedges otherwise, so
//! `parse_form(render(F)) == F` for every form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exterior::ExteriorForm;
use super::poly::{Monomial, Poly};
use super::{HorizontalForm, PhaseContext};
use crate::error::{Error, Result};

fn render_monomial(m: &Monomial, name: &dyn Fn(usize) -> String) -> String {
    m.powers()
        .iter()
        .map(|&(v, e)| {
            if e == 1 {
                name(v)
            } else {
                format!("{}^{e}", name(v))
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn join_signed(parts: Vec<(bool, String)>) -> String {
    let mut out = String::new();
    for (k, (neg, body)) in parts.into_iter().enumerate() {
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

fn render_piece(
    m: &Monomial,
    c: &BigRational,
    basis: Option<&str>,
    name: &dyn Fn(usize) -> String,
) -> (bool, String) {
    let negative = c.is_negative();
    let mag = c.abs();
    let mut factors = Vec::new();
    if !mag.is_one() || (m.powers().is_empty() && basis.is_none()) {
        factors.push(format!("{mag}"));
    }
    if !m.powers().is_empty() {
        factors.push(render_monomial(m, name));
    }
    if let Some(b) = basis {
        factors.push(b.to_string());
    }
    (negative, factors.join("*"))
}

/// Renders a polynomial with a caller-provided variable naming.
pub fn render_poly(p: &Poly, name: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    join_signed(p.terms().map(|(m, c)| render_piece(m, c, None, name)).collect())
}

fn dx_basis(mask: u64) -> String {
    let mut parts = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros();
        parts.push(format!("dx[{i}]"));
        rest &= rest - 1;
    }
    parts.join("^")
}

/// Basis rendering for a horizontal mask: `(label, sign)` so that the stored
/// coefficient equals `sign ×` the coefficient written before the label.
fn basis_label(ctx: &PhaseContext, degree: usize, mask: u64) -> (Option<String>, i64) {
    let n = ctx.n();
    if degree == 0 {
        (None, 1)
    } else if degree == n {
        (Some("w".into()), 1)
    } else if degree + 1 == n {
        let i = (ctx.horizontal_mask() & !mask).trailing_zeros() as usize;
        let (_, sign) = ctx.omega_i(i);
        (Some(format!("w[{i}]")), sign)
    } else {
        (Some(dx_basis(mask)), 1)
    }
}

pub(crate) fn render_form(f: &HorizontalForm) -> String {
    let ctx = f.ctx();
    let name = |v: usize| ctx.coord_name(v);
    if f.is_zero() {
        if f.degree() == 0 {
            return "0".into();
        }
        let mask = (1u64 << f.degree()) - 1;
        let (label, _) = basis_label(&ctx, f.degree(), mask);
        return format!("0*{}", label.unwrap_or_default());
    }
    let mut parts = Vec::new();
    // order by basis label index so w[0] precedes w[1]
    let mut entries: Vec<(u64, &Poly)> = f.exterior().terms().map(|(m, c)| (*m, c)).collect();
    entries.sort_by_key(|(m, _)| std::cmp::Reverse(*m));
    if f.degree() + 1 != ctx.n() {
        entries.reverse();
    }
    for (mask, coeff) in entries {
        let (label, sign) = basis_label(&ctx, f.degree(), mask);
        let sign = BigRational::from_integer(sign.into());
        for (m, c) in coeff.terms() {
            parts.push(render_piece(m, &(c * &sign), label.as_deref(), &name));
        }
    }
    join_signed(parts)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Index(Vec<usize>),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' | '\n' | '\r' => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1;
            }
            '-' => {
                out.push(Token::Minus);
                k += 1;
            }
            '*' => {
                out.push(Token::Star);
                k += 1;
            }
            '/' => {
                out.push(Token::Slash);
                k += 1;
            }
            '^' => {
                out.push(Token::Caret);
                k += 1;
            }
            '[' => {
                let close = chars[k..]
                    .iter()
                    .position(|&ch| ch == ']')
                    .ok_or_else(|| Error::Parse("unclosed '['".into()))?;
                let inner: String = chars[k + 1..k + close].iter().collect();
                let idx = inner
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad index '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(Token::Index(idx));
                k += close + 1;
            }
            d if d.is_ascii_digit() => {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                out.push(Token::Int(digits.parse().expect("ascii digits")));
            }
            a if a.is_ascii_alphabetic() => {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_alphabetic() {
                    k += 1;
                }
                out.push(Token::Ident(chars[start..k].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ctx: PhaseContext,
}

enum Factor {
    Scalar(Poly),
    Basis(ExteriorForm, usize),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn index(&mut self, arity: usize, what: &str) -> Result<Vec<usize>> {
        match self.next() {
            Some(Token::Index(idx)) if idx.len() == arity => Ok(idx),
            _ => Err(Error::Parse(format!("{what} expects {arity} index(es)"))),
        }
    }

    fn check(&self, ok: bool, what: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::Parse(format!("index out of range in {what}")))
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(&Token::Caret) {
            if let Some(Token::Int(_)) = self.tokens.get(self.pos + 1) {
                self.pos += 1;
                if let Some(Token::Int(e)) = self.next() {
                    return u32::try_from(e)
                        .map_err(|_| Error::Parse("exponent too large".into()));
                }
            }
        }
        Ok(1)
    }

    fn factor(&mut self) -> Result<Factor> {
        let (n, m) = (self.ctx.n(), self.ctx.m());
        match self.next() {
            Some(Token::Int(num)) => {
                let mut value = BigRational::from_integer(num);
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    match self.next() {
                        Some(Token::Int(den)) if !den.is_zero() => {
                            value /= BigRational::from_integer(den);
                        }
                        _ => return Err(Error::Parse("bad denominator".into())),
                    }
                }
                Ok(Factor::Scalar(Poly::constant(value)))
            }
            Some(Token::Ident(id)) => match id.as_str() {
                "x" | "y" | "p" => {
                    let v = match id.as_str() {
                        "x" => {
                            let i = self.index(1, "x")?[0];
                            self.check(i < n, "x")?;
                            self.ctx.x_index(i)
                        }
                        "y" => {
                            let a = self.index(1, "y")?[0];
                            self.check(a < m, "y")?;
                            self.ctx.y_index(a)
                        }
                        _ => {
                            let idx = self.index(2, "p")?;
                            self.check(idx[0] < n && idx[1] < m, "p")?;
                            self.ctx.p_index(idx[0], idx[1])
                        }
                    };
                    let e = self.exponent()?;
                    Ok(Factor::Scalar(Poly::term(
                        BigRational::one(),
                        Monomial::from_powers([(v, e)]),
                    )))
                }
                "w" => {
                    if let Some(Token::Index(_)) = self.peek() {
                        let i = self.index(1, "w")?[0];
                        self.check(i < n, "w")?;
                        let (mask, sign) = self.ctx.omega_i(i);
                        Ok(Factor::Basis(
                            ExteriorForm::basis(mask, Poly::from_int(sign)),
                            n - 1,
                        ))
                    } else {
                        Ok(Factor::Basis(
                            ExteriorForm::basis(self.ctx.volume_mask(), Poly::one()),
                            n,
                        ))
                    }
                }
                "dx" => {
                    let mut indices = vec![self.index(1, "dx")?[0]];
                    while self.peek() == Some(&Token::Caret)
                        && self.tokens.get(self.pos + 1) == Some(&Token::Ident("dx".into()))
                    {
                        self.pos += 2;
                        indices.push(self.index(1, "dx")?[0]);
                    }
                    let mut form = ExteriorForm::basis(0, Poly::one());
                    for &i in indices.iter().rev() {
                        self.check(i < n, "dx")?;
                        form = form.wedge_left(i);
                    }
                    Ok(Factor::Basis(form, indices.len()))
                }
                other => Err(Error::Parse(format!("unknown symbol '{other}'"))),
            },
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }

    /// `term := factor ('*' factor)*`, at most one basis factor.
    fn term(&mut self) -> Result<(ExteriorForm, usize)> {
        let mut scalar = Poly::one();
        let mut basis: Option<(ExteriorForm, usize)> = None;
        loop {
            match self.factor()? {
                Factor::Scalar(p) => scalar = &scalar * &p,
                Factor::Basis(b, d) => {
                    if basis.is_some() {
                        return Err(Error::Parse(
                            "a term may carry at most one basis factor".into(),
                        ));
                    }
                    basis = Some((b, d));
                }
            }
            if self.peek() == Some(&Token::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let (b, d) = basis.unwrap_or((ExteriorForm::basis(0, Poly::one()), 0));
        Ok((b.scale(&scalar), d))
    }
}

/// Parses the textual form syntax over a phase-space context.
pub fn parse_form(input: &str, ctx: PhaseContext) -> Result<HorizontalForm> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty form".into()));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        ctx,
    };
    let mut total = ExteriorForm::zero();
    let mut degree: Option<usize> = None;
    let mut first = true;
    while parser.pos < tokens.len() {
        let negative = match parser.peek() {
            Some(Token::Plus) => {
                parser.pos += 1;
                false
            }
            Some(Token::Minus) => {
                parser.pos += 1;
                true
            }
            _ if first => false,
            other => return Err(Error::Parse(format!("expected '+' or '-', got {other:?}"))),
        };
        first = false;
        let (term, d) = parser.term()?;
        match degree {
            Some(prev) if prev != d => {
                return Err(Error::Parse(format!(
                    "mixed degrees {prev} and {d} in one form"
                )))
            }
            _ => degree = Some(d),
        }
        total = total.add(&if negative { term.neg() } else { term });
    }
    HorizontalForm::from_exterior(ctx, degree.unwrap_or(0), total)
}
