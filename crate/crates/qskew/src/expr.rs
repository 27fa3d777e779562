//! A small expression language for algebra elements: a whitespace-
//! insensitive grammar with juxtaposition products, position-bearing
//! parse errors, a canonical renderer, and exact evaluation into any
//! level of the tower or the torus.
//!
//! Grammar:
//! ```text
//! expr   := ('-')? term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' int)?
//! atom   := generator | scalar | '(' expr ')'
//! scalar := int ('/' posint)? | 'q' | 'qhat' | 'qint(' posint ')'
//! ```

use num::BigInt;
use thiserror::Error;

use crate::field::{QElem, Rat};
use crate::model::{AlgebraElement, Level, ModelError, UqModel};
use crate::ore::{OreError, PBWElement};
use crate::torus::TorusElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{name}` at {line}:{col}")]
    UnknownSymbol {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("context violation: {0}")]
    ContextViolation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<OreError> for ExprError {
    fn from(e: OreError) -> Self {
        match e {
            OreError::NonInvertibleGenerator(i) => ExprError::ContextViolation(format!(
                "generator {i} is not invertible in this context"
            )),
            other => ExprError::Model(ModelError::Ore(other)),
        }
    }
}

/// A generator symbol as written in source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    /// `e1..e3`
    Serre(u8),
    /// `X1..X6`, `Y..`, `Z..`, `T..`
    Basis(Level, u8),
    /// `Delta1..Delta3`
    Delta(u8),
    /// `z1`, `z2`
    Central(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
    Rational(BigInt, BigInt),
    Q,
    QHat,
    QInt(u32),
    Gen(Symbol),
}

// ---------------------------------------------------------------------
// tokenizer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Int(String),
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ExprError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut col);
            continue;
        }
        let tok = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = tok {
            chars.next();
            bump(c, &mut line, &mut col);
            out.push(Spanned {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                    bump(d, &mut line, &mut col);
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Int(s),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() {
                    s.push(d);
                    chars.next();
                    bump(d, &mut line, &mut col);
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: tline,
                col: tcol,
            });
            continue;
        }
        return Err(ExprError::Syntax {
            line: tline,
            col: tcol,
            msg: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ExprError {
        let (line, col) = self.here();
        ExprError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.bump();
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Ast, ExprError> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Ast::Neg(Box::new(self.parse_term()?))
        } else {
            self.parse_term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = Ast::Add(Box::new(acc), Box::new(t));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = Ast::Sub(Box::new(acc), Box::new(t));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen)
        )
    }

    fn parse_term(&mut self) -> Result<Ast, ExprError> {
        let mut acc = self.parse_factor()?;
        loop {
            if matches!(self.peek(), Some(Tok::Star)) {
                self.bump();
                let f = self.parse_factor()?;
                acc = Ast::Mul(Box::new(acc), Box::new(f));
            } else if self.starts_factor() {
                let f = self.parse_factor()?;
                acc = Ast::Mul(Box::new(acc), Box::new(f));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Ast, ExprError> {
        let atom = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let negative = if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                true
            } else {
                false
            };
            let Some(Tok::Int(digits)) = self.peek().cloned() else {
                return Err(self.err("expected integer exponent after `^`"));
            };
            self.bump();
            let k: i64 = digits
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            let k = if negative { -k } else { k };
            return Ok(Ast::Pow(Box::new(atom), k));
        }
        Ok(atom)
    }

    fn parse_atom(&mut self) -> Result<Ast, ExprError> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Int(digits)) => {
                self.bump();
                let num: BigInt = digits.parse().expect("digits parse as a big integer");
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.bump();
                    let Some(Tok::Int(dd)) = self.peek().cloned() else {
                        return Err(self.err("expected positive integer denominator"));
                    };
                    self.bump();
                    let den: BigInt = dd.parse().expect("digits parse as a big integer");
                    if den == BigInt::from(0) {
                        return Err(self.err("zero denominator"));
                    }
                    Ok(Ast::Rational(num, den))
                } else {
                    Ok(Ast::Rational(num, BigInt::from(1)))
                }
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "q" => Ok(Ast::Q),
                    "qhat" => Ok(Ast::QHat),
                    "qint" => {
                        self.expect(Tok::LParen, "`(` after qint")?;
                        let Some(Tok::Int(digits)) = self.peek().cloned() else {
                            return Err(self.err("expected positive integer in qint(..)"));
                        };
                        self.bump();
                        let k: u32 = digits
                            .parse()
                            .map_err(|_| self.err("qint argument out of range"))?;
                        if k == 0 {
                            return Err(self.err("qint argument must be positive"));
                        }
                        self.expect(Tok::RParen, "`)` after qint argument")?;
                        Ok(Ast::QInt(k))
                    }
                    _ => match parse_symbol(&name) {
                        Some(sym) => Ok(Ast::Gen(sym)),
                        None => Err(ExprError::UnknownSymbol { name, line, col }),
                    },
                }
            }
            _ => Err(self.err("expected a generator, scalar, or `(`")),
        }
    }
}

fn parse_symbol(name: &str) -> Option<Symbol> {
    if let Some(rest) = name.strip_prefix("Delta") {
        let i: u8 = rest.parse().ok()?;
        return (1..=3).contains(&i).then_some(Symbol::Delta(i));
    }
    let mut chars = name.chars();
    let head = chars.next()?;
    let rest: String = chars.collect();
    let i: u8 = rest.parse().ok()?;
    match head {
        'e' => (1..=3).contains(&i).then_some(Symbol::Serre(i)),
        'z' => (1..=2).contains(&i).then_some(Symbol::Central(i)),
        'X' => (1..=6).contains(&i).then_some(Symbol::Basis(Level::X, i)),
        'Y' => (1..=6).contains(&i).then_some(Symbol::Basis(Level::Y, i)),
        'Z' => (1..=6).contains(&i).then_some(Symbol::Basis(Level::Z, i)),
        'T' => (1..=6).contains(&i).then_some(Symbol::Basis(Level::T, i)),
        _ => None,
    }
}

/// Parse source text into an AST.
pub fn parse_expr(text: &str) -> Result<Ast, ExprError> {
    let toks = tokenize(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end_line = lines.len().max(1);
    let end_col = lines.last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    if p.peek().is_none() {
        return Err(p.err("empty expression"));
    }
    let ast = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(ast)
}

// ---------------------------------------------------------------------
// rendering

fn precedence(a: &Ast) -> u8 {
    match a {
        Ast::Add(..) | Ast::Sub(..) | Ast::Neg(..) => 0,
        Ast::Mul(..) => 1,
        Ast::Pow(..) => 2,
        _ => 3,
    }
}

fn render_prec(a: &Ast, min: u8, out: &mut String) {
    let p = precedence(a);
    if p < min {
        out.push('(');
    }
    match a {
        Ast::Add(l, r) => {
            render_prec(l, 0, out);
            out.push_str(" + ");
            render_prec(r, 1, out);
        }
        Ast::Sub(l, r) => {
            render_prec(l, 0, out);
            out.push_str(" - ");
            render_prec(r, 1, out);
        }
        Ast::Neg(x) => {
            out.push('-');
            render_prec(x, 1, out);
        }
        Ast::Mul(l, r) => {
            render_prec(l, 1, out);
            out.push('*');
            render_prec(r, 2, out);
        }
        Ast::Pow(b, k) => {
            render_prec(b, 3, out);
            out.push('^');
            out.push_str(&k.to_string());
        }
        Ast::Rational(n, d) => {
            if *d == BigInt::from(1) {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format!("{n}/{d}"));
            }
        }
        Ast::Q => out.push('q'),
        Ast::QHat => out.push_str("qhat"),
        Ast::QInt(k) => out.push_str(&format!("qint({k})")),
        Ast::Gen(sym) => out.push_str(&render_symbol(sym)),
    }
    if p < min {
        out.push(')');
    }
}

fn render_symbol(sym: &Symbol) -> String {
    match sym {
        Symbol::Serre(i) => format!("e{i}"),
        Symbol::Basis(level, i) => format!("{}{i}", level.symbol()),
        Symbol::Delta(i) => format!("Delta{i}"),
        Symbol::Central(i) => format!("z{i}"),
    }
}

/// Render an AST back to canonical source text.
pub fn render(a: &Ast) -> String {
    let mut out = String::new();
    render_prec(a, 0, &mut out);
    out
}

// ---------------------------------------------------------------------
// evaluation

/// Where an expression is evaluated: a level of the tower, or the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalContext {
    Algebra(Level),
    Torus,
}

/// The result of evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Algebra(AlgebraElement),
    Torus(TorusElement),
}

enum Evaluated {
    Scalar(QElem),
    Algebra(AlgebraElement),
    Torus(TorusElement),
}

fn resolve_symbol(
    model: &UqModel,
    ctx: EvalContext,
    sym: &Symbol,
) -> Result<Evaluated, ExprError> {
    let bad = |what: &str| {
        Err(ExprError::ContextViolation(format!(
            "{what} is not available in this context"
        )))
    };
    match (ctx, sym) {
        (EvalContext::Algebra(Level::X), Symbol::Serre(i)) => Ok(Evaluated::Algebra(
            model.serre_generator(*i as usize)?,
        )),
        (_, Symbol::Serre(i)) => bad(&format!("e{i}")),
        (EvalContext::Algebra(level), Symbol::Basis(l, i)) if l == &level => Ok(
            Evaluated::Algebra(model.generator(level, *i as usize)?),
        ),
        (EvalContext::Torus, Symbol::Basis(Level::T, i)) => {
            Ok(Evaluated::Torus(model.torus().generator(*i as usize)))
        }
        (_, Symbol::Basis(l, i)) => bad(&format!("{}{i}", l.symbol())),
        (EvalContext::Algebra(level), Symbol::Delta(i)) => Ok(Evaluated::Algebra(
            model.delta_in_basis(*i as usize, level)?,
        )),
        (EvalContext::Torus, Symbol::Delta(i)) => Ok(Evaluated::Torus(
            model.embed(&model.delta(*i as usize)?),
        )),
        (EvalContext::Algebra(level), Symbol::Central(i)) => {
            let z = if *i == 1 {
                model
                    .delta_in_basis(1, level)?
                    .mul(&model.delta_in_basis(3, level)?)?
            } else {
                model.delta_in_basis(2, level)?
            };
            Ok(Evaluated::Algebra(z))
        }
        (EvalContext::Torus, Symbol::Central(i)) => {
            let z = if *i == 1 {
                model.embed(&model.z1())
            } else {
                model.embed(&model.z2())
            };
            Ok(Evaluated::Torus(z))
        }
    }
}

fn ev_add(model: &UqModel, a: Evaluated, b: Evaluated, sub: bool) -> Result<Evaluated, ExprError> {
    let promote = |e: Evaluated, like: &Evaluated| -> Result<Evaluated, ExprError> {
        match (e, like) {
            (Evaluated::Scalar(c), Evaluated::Algebra(u)) => Ok(Evaluated::Algebra(
                model.one(u.level).scale(&c),
            )),
            (Evaluated::Scalar(c), Evaluated::Torus(_)) => {
                Ok(Evaluated::Torus(model.torus().one().scale(&c)))
            }
            (e, _) => Ok(e),
        }
    };
    let a = promote(a, &b)?;
    let b = promote(b, &a)?;
    match (a, b) {
        (Evaluated::Scalar(x), Evaluated::Scalar(y)) => Ok(Evaluated::Scalar(if sub {
            x.sub(&y)
        } else {
            x.add(&y)
        })),
        (Evaluated::Algebra(x), Evaluated::Algebra(y)) => Ok(Evaluated::Algebra(if sub {
            x.sub(&y)?
        } else {
            x.add(&y)?
        })),
        (Evaluated::Torus(x), Evaluated::Torus(y)) => Ok(Evaluated::Torus(if sub {
            x.sub(&y)
        } else {
            x.add(&y)
        })),
        _ => Err(ExprError::ContextViolation(
            "cannot mix tower and torus values".into(),
        )),
    }
}

fn ev_mul(model: &UqModel, a: Evaluated, b: Evaluated) -> Result<Evaluated, ExprError> {
    match (a, b) {
        (Evaluated::Scalar(x), Evaluated::Scalar(y)) => Ok(Evaluated::Scalar(x.mul(&y))),
        (Evaluated::Scalar(c), Evaluated::Algebra(u))
        | (Evaluated::Algebra(u), Evaluated::Scalar(c)) => Ok(Evaluated::Algebra(u.scale(&c))),
        (Evaluated::Scalar(c), Evaluated::Torus(t))
        | (Evaluated::Torus(t), Evaluated::Scalar(c)) => Ok(Evaluated::Torus(t.scale(&c))),
        (Evaluated::Algebra(x), Evaluated::Algebra(y)) => Ok(Evaluated::Algebra(x.mul(&y)?)),
        (Evaluated::Torus(x), Evaluated::Torus(y)) => {
            Ok(Evaluated::Torus(model.torus().mul(&x, &y)))
        }
        _ => Err(ExprError::ContextViolation(
            "cannot mix tower and torus values".into(),
        )),
    }
}

fn ev_pow(model: &UqModel, base: Evaluated, k: i64) -> Result<Evaluated, ExprError> {
    match base {
        Evaluated::Scalar(c) => {
            let p = c.pow(k).map_err(|_| {
                ExprError::ContextViolation("inverse of the zero scalar".into())
            })?;
            Ok(Evaluated::Scalar(p))
        }
        Evaluated::Algebra(u) => {
            if k >= 0 {
                return Ok(Evaluated::Algebra(u.pow(k as u32)?));
            }
            // negative powers: only monomials over invertible generators
            let mut terms = u.pbw.terms();
            let (exp, coeff) = match (terms.next(), terms.next()) {
                (Some(t), None) => t,
                _ => {
                    return Err(ExprError::ContextViolation(
                        "negative power of a non-monomial element".into(),
                    ))
                }
            };
            let p = model.presentation(u.level);
            // inverse word: reversed generator order with negated exponents
            let word: Vec<(usize, i64)> = (1..=6usize)
                .rev()
                .filter(|i| exp[i - 1] != 0)
                .map(|i| (i, -exp[i - 1]))
                .collect();
            let cinv = coeff.inv().map_err(|_| {
                ExprError::ContextViolation("inverse of the zero element".into())
            })?;
            let inv = PBWElement::normal_form(p, &word)?.scale(&cinv);
            Ok(Evaluated::Algebra(
                AlgebraElement {
                    level: u.level,
                    pbw: inv,
                }
                .pow((-k) as u32)?,
            ))
        }
        Evaluated::Torus(t) => {
            if k >= 0 {
                let mut acc = model.torus().one();
                for _ in 0..k {
                    acc = model.torus().mul(&acc, &t);
                }
                return Ok(Evaluated::Torus(acc));
            }
            let inv = model.torus().monomial_inverse(&t).ok_or_else(|| {
                ExprError::ContextViolation("negative power of a non-monomial element".into())
            })?;
            let mut acc = model.torus().one();
            for _ in 0..(-k) {
                acc = model.torus().mul(&acc, &inv);
            }
            Ok(Evaluated::Torus(acc))
        }
    }
}

fn eval_node(model: &UqModel, ctx: EvalContext, a: &Ast) -> Result<Evaluated, ExprError> {
    match a {
        Ast::Add(l, r) => {
            let l = eval_node(model, ctx, l)?;
            let r = eval_node(model, ctx, r)?;
            ev_add(model, l, r, false)
        }
        Ast::Sub(l, r) => {
            let l = eval_node(model, ctx, l)?;
            let r = eval_node(model, ctx, r)?;
            ev_add(model, l, r, true)
        }
        Ast::Neg(x) => {
            let v = eval_node(model, ctx, x)?;
            Ok(match v {
                Evaluated::Scalar(c) => Evaluated::Scalar(c.neg()),
                Evaluated::Algebra(u) => Evaluated::Algebra(u.neg()),
                Evaluated::Torus(t) => Evaluated::Torus(t.neg()),
            })
        }
        Ast::Mul(l, r) => {
            let l = eval_node(model, ctx, l)?;
            let r = eval_node(model, ctx, r)?;
            ev_mul(model, l, r)
        }
        Ast::Pow(b, k) => {
            let b = eval_node(model, ctx, b)?;
            ev_pow(model, b, *k)
        }
        Ast::Rational(n, d) => Ok(Evaluated::Scalar(QElem::from_rat(Rat::new(
            n.clone(),
            d.clone(),
        )))),
        Ast::Q => Ok(Evaluated::Scalar(QElem::q())),
        Ast::QHat => Ok(Evaluated::Scalar(QElem::qhat())),
        Ast::QInt(k) => Ok(Evaluated::Scalar(QElem::q_int(*k))),
        Ast::Gen(sym) => resolve_symbol(model, ctx, sym),
    }
}

/// Evaluate an AST in a context, producing an exact element.
pub fn evaluate(model: &UqModel, ctx: EvalContext, a: &Ast) -> Result<Value, ExprError> {
    match eval_node(model, ctx, a)? {
        Evaluated::Scalar(c) => Ok(match ctx {
            EvalContext::Algebra(level) => Value::Algebra(model.one(level).scale(&c)),
            EvalContext::Torus => Value::Torus(model.torus().one().scale(&c)),
        }),
        Evaluated::Algebra(u) => Ok(Value::Algebra(u)),
        Evaluated::Torus(t) => Ok(Value::Torus(t)),
    }
}

/// Parse and evaluate in one step.
pub fn eval_str(model: &UqModel, ctx: EvalContext, text: &str) -> Result<Value, ExprError> {
    evaluate(model, ctx, &parse_expr(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn m() -> &'static Arc<UqModel> {
        UqModel::shared()
    }

    fn eval_x(text: &str) -> AlgebraElement {
        match eval_str(m(), EvalContext::Algebra(Level::X), text).unwrap() {
            Value::Algebra(u) => u,
            Value::Torus(_) => panic!("expected algebra value"),
        }
    }

    fn eval_t(text: &str) -> TorusElement {
        match eval_str(m(), EvalContext::Torus, text).unwrap() {
            Value::Torus(t) => t,
            Value::Algebra(_) => panic!("expected torus value"),
        }
    }

    #[test]
    fn delta_formulas_parse_and_evaluate() {
        let d2 = eval_x("X2*X5 - q X3 X4");
        assert_eq!(d2, m().delta(2).unwrap());
        let d2s = eval_x("Delta2");
        assert_eq!(d2s, d2);
        let d3 = eval_x("qhat^2 X1 X4 X6 - q qhat X2 X6 - q qhat X1 X5 + q^2 X3");
        assert_eq!(d3, m().delta(3).unwrap());
        let serre = eval_x("e1*e3 - e3*e1");
        assert!(serre.is_zero());
    }

    #[test]
    fn torus_context() {
        let d3 = eval_t("qhat^2 T1 T4 T6");
        assert_eq!(d3, m().embed(&m().delta(3).unwrap()));
        let t4inv = eval_t("T4^-1");
        assert_eq!(
            t4inv,
            TorusElement::monomial(vec![0, 0, 0, -1, 0, 0], QElem::one())
        );
        let z = eval_t("z1 z2");
        assert!(m().torus().is_central(&z));
    }

    #[test]
    fn scalars_and_powers() {
        let u = eval_x("(3/2) e1^2");
        let e1 = m().serre_generator(1).unwrap();
        assert_eq!(
            u,
            e1.pow(2).unwrap().scale(&QElem::from_rat(crate::field::rat(3, 2)))
        );
        let v = eval_x("qint(3) X1");
        assert_eq!(v, eval_x("(q^2 + 1 + q^-2) X1"));
        let zero = eval_x("0");
        assert!(zero.is_zero());
        let neg = eval_x("-q X2 + q X2");
        assert!(neg.is_zero());
    }

    #[test]
    fn inverse_generators_in_z_basis() {
        match eval_str(m(), EvalContext::Algebra(Level::Z), "Z4^-1 Z1").unwrap() {
            Value::Algebra(u) => {
                let p = m().presentation(Level::Z);
                let expected = PBWElement::normal_form(p, &[(4, -1), (1, 1)]).unwrap();
                assert_eq!(u.pbw, expected);
            }
            _ => panic!("expected algebra value"),
        }
    }

    #[test]
    fn context_violations() {
        // X4^{-1} is not invertible at level 7
        let e = eval_str(m(), EvalContext::Algebra(Level::X), "X4^-1");
        assert!(matches!(e, Err(ExprError::ContextViolation(_))));
        // Y symbols are not valid at level 7
        let e = eval_str(m(), EvalContext::Algebra(Level::X), "Y2");
        assert!(matches!(e, Err(ExprError::ContextViolation(_))));
        // e1 is not valid in the torus
        let e = eval_str(m(), EvalContext::Torus, "e1");
        assert!(matches!(e, Err(ExprError::ContextViolation(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_expr("X1 + ") {
            Err(ExprError::Syntax { line, col, .. }) => {
                assert_eq!((line, col), (1, 6));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_expr("X1 @ X2") {
            Err(ExprError::Syntax { line, col, .. }) => {
                assert_eq!((line, col), (1, 4));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_expr("X9") {
            Err(ExprError::UnknownSymbol { name, .. }) => assert_eq!(name, "X9"),
            other => panic!("expected unknown symbol, got {other:?}"),
        }
        for bad in ["(X1", "X1)", "X1 ^ q", "3/0", "qint(0)", "", "X1^2^3"] {
            assert!(parse_expr(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn render_round_trip() {
        for text in [
            "X2*X5 - q X3 X4",
            "qhat^2 T1 T4 T6",
            "(3/2) e1^2",
            "-q X2 + (X1 + X2)*X4",
            "qint(3) - 5/7 + z1 z2^2",
            "T4^-1",
        ] {
            let ast = parse_expr(text).unwrap();
            let rendered = render(&ast);
            let again = parse_expr(&rendered).unwrap();
            assert_eq!(ast, again, "round trip through {rendered:?}");
        }
    }
}
