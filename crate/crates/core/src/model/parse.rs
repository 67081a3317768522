//! Line-oriented model format.
//!
//! ```text
//! # comment
//! modes: 2
//! channels: 2
//! theta: identity              # or: theta: rows [[1, 0], [0, 1]]
//! param k1 = 2
//! A[1] = -k1*a1 + 2*a1'*a2^2
//! B = [[-sqrt(2*k1), 0], [0, -sqrt(2*k2)]]
//! C[1] = sqrt(2*k1)*a1
//! D = identity
//! phi = 2*a1'*a1 + 2*a2'*a2
//! ```
//!
//! Optional statements: `name: <text>`, and the doubled noise data
//! `T = [[...]]` (commutation) and `F = [[...]]` (Ito matrix). Generators are
//! `a<k>` and `a<k>'` (one-based); `*` is mandatory between factors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::{NoiseSpec, QsdeModel};
use crate::algebra::{Algebra, Generator, OperatorPolynomial};
use crate::linalg::ScalarMatrix;
use crate::matrix::OperatorMatrix;
use crate::scalar::{parse_decimal, Mode, Scalar, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct ParseOptions {
    pub mode: Mode,
    pub tol: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { mode: Mode::Exact, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownMode { index: usize, modes: usize },
    UnknownParameter(String),
    NonSquareTheta { rows: usize, cols: usize },
    Shape(String),
    Missing(String),
    Duplicate(String),
    Invalid(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownMode { index, modes } => {
                write!(f, "unknown mode a{index} (model has {modes} modes)")
            }
            ParseErrorKind::UnknownParameter(p) => write!(f, "unknown parameter '{p}'"),
            ParseErrorKind::NonSquareTheta { rows, cols } => {
                write!(f, "theta must be square, got {rows}x{cols}")
            }
            ParseErrorKind::Shape(m) => write!(f, "shape mismatch: {m}"),
            ParseErrorKind::Missing(m) => write!(f, "missing {m}"),
            ParseErrorKind::Duplicate(m) => write!(f, "duplicate {m}"),
            ParseErrorKind::Invalid(m) => write!(f, "{m}"),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

fn err<T>(line: usize, column: usize, kind: ParseErrorKind) -> PResult<T> {
    Err(ParseError { line, column, kind })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Imag(BigRational),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
    Colon,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_) | Tok::Imag(_) => "number".into(),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::End => "end of line".into(),
            other => format!("'{}'", tok_char(other)),
        }
    }
}

fn tok_char(t: &Tok) -> char {
    match t {
        Tok::Prime => '\'',
        Tok::Plus => '+',
        Tok::Minus => '-',
        Tok::Star => '*',
        Tok::Slash => '/',
        Tok::Caret => '^',
        Tok::LParen => '(',
        Tok::RParen => ')',
        Tok::LBracket => '[',
        Tok::RBracket => ']',
        Tok::Comma => ',',
        Tok::Eq => '=',
        Tok::Colon => ':',
        _ => '?',
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex(line_no: usize, text: &str) -> PResult<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let Some(mut value) = parse_decimal(&lit) else {
                return err(line_no, col, ParseErrorKind::Syntax(format!("malformed number '{lit}'")));
            };
            // `p/q` without spaces is one literal, so `3/4i` means (3/4)i.
            if chars.get(i) == Some(&'/') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                let dstart = i + 1;
                i = dstart;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let dlit: String = chars[dstart..i].iter().collect();
                let Some(den) = parse_decimal(&dlit) else {
                    return err(line_no, dstart + 1, ParseErrorKind::Syntax(format!("malformed number '{dlit}'")));
                };
                if den.is_zero() {
                    return err(line_no, col, ParseErrorKind::Invalid("division by zero".into()));
                }
                value /= den;
            }
            let imag = chars.get(i) == Some(&'i')
                && !chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
            if imag {
                i += 1;
                out.push(Spanned { tok: Tok::Imag(value), col });
            } else {
                out.push(Spanned { tok: Tok::Num(value), col });
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), col });
            continue;
        }
        let tok = match c {
            '\'' => Tok::Prime,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            ':' => Tok::Colon,
            other => {
                return err(line_no, col, ParseErrorKind::Syntax(format!("unexpected character '{other}'")))
            }
        };
        out.push(Spanned { tok, col });
        i += 1;
    }
    out.push(Spanned { tok: Tok::End, col: chars.len() + 1 });
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(BigRational),
    Imag(BigRational),
    Ident { name: String, col: usize },
    Gen { index: usize, dagger: bool, col: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div { num: Box<Expr>, den: Box<Expr>, col: usize },
    Pow(Box<Expr>, u32),
    Sqrt { arg: Box<Expr>, col: usize },
}

/// Matrix literal or the keyword `identity`.
#[derive(Clone, Debug)]
enum MatrixSpec {
    Identity,
    Rows(Vec<Vec<Expr>>, usize),
}

#[derive(Clone, Debug)]
enum Stmt {
    Name(String),
    Modes(usize),
    Channels(usize),
    Theta(MatrixSpec),
    Param(String, Expr),
    Drift(usize, Expr),
    Output(usize, Expr),
    Matrix(char, MatrixSpec),
    Phi(Expr),
}

struct LineParser {
    line: usize,
    toks: Vec<Spanned>,
    pos: usize,
}

impl LineParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> PResult<T> {
        err(self.line, self.col(), ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {}, found {found}", want.describe()))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        match self.peek() {
            Tok::End => Ok(()),
            Tok::Num(_) | Tok::Imag(_) | Tok::Ident(_) | Tok::LParen => {
                self.fail("expected operator; use '*' between factors")
            }
            other => self.fail(format!("unexpected {}", other.describe())),
        }
    }

    fn count(&mut self) -> PResult<usize> {
        let col = self.col();
        match self.bump().tok {
            Tok::Num(v) if v.is_integer() => {
                let n: Option<usize> = v.to_integer().try_into().ok();
                n.ok_or(()).or_else(|_| err(self.line, col, ParseErrorKind::Syntax("integer too large".into())))
            }
            _ => err(self.line, col, ParseErrorKind::Syntax("expected a non-negative integer".into())),
        }
    }

    fn index(&mut self) -> PResult<(usize, usize)> {
        self.expect(Tok::LBracket)?;
        let col = self.col();
        let i = self.count()?;
        self.expect(Tok::RBracket)?;
        Ok((i, col))
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let head_col = self.col();
        let Tok::Ident(head) = self.bump().tok else {
            return err(self.line, head_col, ParseErrorKind::Syntax("expected a statement".into()));
        };
        let stmt = match head.as_str() {
            "modes" | "channels" => {
                self.expect(Tok::Colon)?;
                let v = self.count()?;
                if head == "modes" {
                    Stmt::Modes(v)
                } else {
                    Stmt::Channels(v)
                }
            }
            "theta" => {
                self.expect(Tok::Colon)?;
                if matches!(self.peek(), Tok::Ident(s) if s == "rows") {
                    self.bump();
                    let col = self.col();
                    Stmt::Theta(MatrixSpec::Rows(self.matrix_rows()?, col))
                } else {
                    Stmt::Theta(self.matrix_spec()?)
                }
            }
            "param" => {
                let col = self.col();
                let Tok::Ident(name) = self.bump().tok else {
                    return err(self.line, col, ParseErrorKind::Syntax("expected parameter name".into()));
                };
                if is_reserved(&name) {
                    return err(self.line, col, ParseErrorKind::Invalid(format!("'{name}' is reserved")));
                }
                self.expect(Tok::Eq)?;
                Stmt::Param(name, self.expr()?)
            }
            "A" | "C" => {
                let (i, col) = self.index()?;
                if i == 0 {
                    return err(self.line, col, ParseErrorKind::Invalid("indices are one-based".into()));
                }
                self.expect(Tok::Eq)?;
                let e = self.expr()?;
                if head == "A" {
                    Stmt::Drift(i, e)
                } else {
                    Stmt::Output(i, e)
                }
            }
            "B" | "D" | "T" | "F" => {
                self.expect(Tok::Eq)?;
                let which = head.chars().next().expect("non-empty");
                Stmt::Matrix(which, self.matrix_spec()?)
            }
            "phi" => {
                self.expect(Tok::Eq)?;
                Stmt::Phi(self.expr()?)
            }
            other => {
                return err(self.line, head_col, ParseErrorKind::Syntax(format!("unknown statement '{other}'")))
            }
        };
        self.expect_end()?;
        Ok(stmt)
    }

    fn matrix_spec(&mut self) -> PResult<MatrixSpec> {
        if matches!(self.peek(), Tok::Ident(s) if s == "identity") {
            self.bump();
            return Ok(MatrixSpec::Identity);
        }
        let col = self.col();
        Ok(MatrixSpec::Rows(self.matrix_rows()?, col))
    }

    fn matrix_rows(&mut self) -> PResult<Vec<Vec<Expr>>> {
        self.expect(Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket)?;
            let mut row = vec![self.expr()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                row.push(self.expr()?);
            }
            self.expect(Tok::RBracket)?;
            rows.push(row);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(rows)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let col = self.col();
                    self.bump();
                    lhs = Expr::Div { num: Box::new(lhs), den: Box::new(self.unary()?), col };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let col = self.col();
            let exp = self.count()?;
            let exp = u32::try_from(exp)
                .or_else(|_| err(self.line, col, ParseErrorKind::Syntax("exponent too large".into())))?;
            base = Expr::Pow(Box::new(base), exp);
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let col = self.col();
        match self.bump().tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Imag(v) => Ok(Expr::Imag(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "sqrt" => {
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Sqrt { arg: Box::new(arg), col })
            }
            Tok::Ident(name) => {
                if let Some(index) = generator_index(&name) {
                    let dagger = *self.peek() == Tok::Prime;
                    if dagger {
                        self.bump();
                    }
                    Ok(Expr::Gen { index, dagger, col })
                } else {
                    Ok(Expr::Ident { name, col })
                }
            }
            other => err(self.line, col, ParseErrorKind::Syntax(format!("unexpected {}", other.describe()))),
        }
    }
}

fn generator_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('a')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "i" | "sqrt" | "identity" | "rows") || generator_index(name).is_some()
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(Scalar),
    Op(OperatorPolynomial),
}

struct Evaluator<'a> {
    line: usize,
    params: &'a HashMap<String, Scalar>,
    alg: Option<&'a Arc<Algebra>>,
}

impl Evaluator<'_> {
    fn promote(&self, v: Value) -> OperatorPolynomial {
        match v {
            Value::Op(p) => p,
            Value::Scalar(s) => OperatorPolynomial::constant(self.alg.expect("operator context"), s),
        }
    }

    fn combine(
        &self,
        a: Value,
        b: Value,
        fs: impl Fn(&Scalar, &Scalar) -> Scalar,
        fo: impl Fn(&OperatorPolynomial, &OperatorPolynomial) -> OperatorPolynomial,
    ) -> Value {
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(fs(&x, &y)),
            (x, y) => Value::Op(fo(&self.promote(x), &self.promote(y))),
        }
    }

    fn eval(&self, e: &Expr) -> PResult<Value> {
        Ok(match e {
            Expr::Num(v) => Value::Scalar(Scalar::from_rational(v.clone())),
            Expr::Imag(v) => Value::Scalar(&Scalar::from_rational(v.clone()) * &Scalar::i()),
            Expr::Ident { name, col } => {
                if name == "i" {
                    Value::Scalar(Scalar::i())
                } else if let Some(v) = self.params.get(name) {
                    Value::Scalar(v.clone())
                } else {
                    return err(self.line, *col, ParseErrorKind::UnknownParameter(name.clone()));
                }
            }
            Expr::Gen { index, dagger, col } => {
                let Some(alg) = self.alg else {
                    return err(
                        self.line,
                        *col,
                        ParseErrorKind::Invalid("operators are not allowed in scalar expressions".into()),
                    );
                };
                if *index == 0 || *index > alg.modes() {
                    return err(self.line, *col, ParseErrorKind::UnknownMode { index: *index, modes: alg.modes() });
                }
                let g = Generator { mode: index - 1, dagger: *dagger };
                Value::Op(OperatorPolynomial::generator(alg, g).expect("range checked"))
            }
            Expr::Neg(x) => match self.eval(x)? {
                Value::Scalar(s) => Value::Scalar(-s),
                Value::Op(p) => Value::Op(-p),
            },
            Expr::Add(a, b) => self.combine(self.eval(a)?, self.eval(b)?, |x, y| x + y, |x, y| x + y),
            Expr::Sub(a, b) => self.combine(self.eval(a)?, self.eval(b)?, |x, y| x - y, |x, y| x - y),
            Expr::Mul(a, b) => self.combine(self.eval(a)?, self.eval(b)?, |x, y| x * y, |x, y| x * y),
            Expr::Div { num, den, col } => {
                let d = match self.eval(den)? {
                    Value::Scalar(s) => s,
                    Value::Op(p) => match p.constant_value() {
                        Some(s) => s,
                        None => {
                            return err(self.line, *col, ParseErrorKind::Invalid("division by an operator".into()))
                        }
                    },
                };
                let Some(inv) = d.recip() else {
                    return err(self.line, *col, ParseErrorKind::Invalid("division by zero".into()));
                };
                match self.eval(num)? {
                    Value::Scalar(s) => Value::Scalar(&s * &inv),
                    Value::Op(p) => Value::Op(p.scale(&inv)),
                }
            }
            Expr::Pow(b, k) => match self.eval(b)? {
                Value::Scalar(s) => Value::Scalar(s.powi(*k)),
                Value::Op(p) => Value::Op(p.pow(*k)),
            },
            Expr::Sqrt { arg, col } => match self.eval(arg)? {
                Value::Scalar(s) => Value::Scalar(s.sqrt()),
                Value::Op(p) => match p.constant_value() {
                    Some(s) => Value::Scalar(s.sqrt()),
                    None => {
                        return err(self.line, *col, ParseErrorKind::Invalid("sqrt of an operator".into()))
                    }
                },
            },
        })
    }

    fn scalar(&self, e: &Expr, col: usize) -> PResult<Scalar> {
        match self.eval(e)? {
            Value::Scalar(s) => Ok(s),
            Value::Op(p) => p.constant_value().ok_or(()).or_else(|_| {
                err(self.line, col, ParseErrorKind::Invalid("expected a scalar".into()))
            }),
        }
    }

    fn operator(&self, e: &Expr) -> PResult<OperatorPolynomial> {
        Ok(self.promote(self.eval(e)?))
    }
}

/// Parses one operator expression over `alg`, e.g. `2*a1'*a1 - 1`.
pub fn parse_polynomial(alg: &Arc<Algebra>, text: &str) -> Result<OperatorPolynomial, ParseError> {
    let mut p = LineParser { line: 1, toks: lex(1, text)?, pos: 0 };
    let e = p.expr()?;
    p.expect_end()?;
    let params = HashMap::new();
    Evaluator { line: 1, params: &params, alg: Some(alg) }.operator(&e)
}

struct Located<T> {
    line: usize,
    value: T,
}

/// Parses and binds a model: parameters are evaluated once, every operator
/// expression is normal-ordered.
pub fn parse_model(text: &str, opts: &ParseOptions) -> Result<QsdeModel, ParseError> {
    let mut stmts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        if let Some(rest) = body.trim_start().strip_prefix("name:") {
            let value = rest.trim();
            if value.is_empty() {
                return err(line, 1, ParseErrorKind::Missing("model name".into()));
            }
            stmts.push(Located { line, value: Stmt::Name(value.to_string()) });
            continue;
        }
        let mut p = LineParser { line, toks: lex(line, body)?, pos: 0 };
        stmts.push(Located { line, value: p.statement()? });
    }

    let mut name = None;
    let mut modes = None;
    let mut channels = None;
    let mut theta_spec = None;
    let mut param_stmts = Vec::new();
    let mut drift: BTreeMap<usize, Located<Expr>> = BTreeMap::new();
    let mut output: BTreeMap<usize, Located<Expr>> = BTreeMap::new();
    let mut matrices: HashMap<char, Located<MatrixSpec>> = HashMap::new();
    let mut phi = None;

    fn once<T>(slot: &mut Option<T>, v: T, line: usize, what: &str) -> PResult<()> {
        if slot.is_some() {
            return err(line, 1, ParseErrorKind::Duplicate(what.into()));
        }
        *slot = Some(v);
        Ok(())
    }

    for Located { line, value } in stmts {
        match value {
            Stmt::Name(n) => once(&mut name, n, line, "name")?,
            Stmt::Modes(n) => once(&mut modes, (n, line), line, "modes")?,
            Stmt::Channels(m) => once(&mut channels, (m, line), line, "channels")?,
            Stmt::Theta(t) => once(&mut theta_spec, Located { line, value: t }, line, "theta")?,
            Stmt::Param(n, e) => param_stmts.push((line, n, e)),
            Stmt::Drift(i, e) => {
                if drift.insert(i, Located { line, value: e }).is_some() {
                    return err(line, 1, ParseErrorKind::Duplicate(format!("A[{i}]")));
                }
            }
            Stmt::Output(i, e) => {
                if output.insert(i, Located { line, value: e }).is_some() {
                    return err(line, 1, ParseErrorKind::Duplicate(format!("C[{i}]")));
                }
            }
            Stmt::Matrix(c, m) => {
                if matrices.insert(c, Located { line, value: m }).is_some() {
                    return err(line, 1, ParseErrorKind::Duplicate(c.to_string()));
                }
            }
            Stmt::Phi(e) => once(&mut phi, Located { line, value: e }, line, "phi")?,
        }
    }

    let last_line = text.lines().count().max(1);
    let Some((n, n_line)) = modes else {
        return err(last_line, 1, ParseErrorKind::Missing("'modes:' declaration".into()));
    };
    let Some((m, m_line)) = channels else {
        return err(last_line, 1, ParseErrorKind::Missing("'channels:' declaration".into()));
    };
    if n == 0 {
        return err(n_line, 1, ParseErrorKind::Invalid("modes must be positive".into()));
    }
    if m == 0 {
        return err(m_line, 1, ParseErrorKind::Invalid("channels must be positive".into()));
    }

    let mut params = HashMap::new();
    let mut param_list = Vec::new();
    for (line, pname, e) in &param_stmts {
        if params.contains_key(pname) {
            return err(*line, 1, ParseErrorKind::Duplicate(format!("param {pname}")));
        }
        let ev = Evaluator { line: *line, params: &params, alg: None };
        let v = ev.scalar(e, 1)?.in_mode(opts.mode);
        params.insert(pname.clone(), v.clone());
        param_list.push((pname.clone(), v));
    }

    let scalar_matrix = |spec: &Located<MatrixSpec>, dim: (usize, usize), what: &str| -> PResult<ScalarMatrix> {
        match &spec.value {
            MatrixSpec::Identity => {
                if dim.0 != dim.1 {
                    return err(spec.line, 1, ParseErrorKind::Shape(format!("{what} = identity must be square")));
                }
                Ok(ScalarMatrix::identity(dim.0))
            }
            MatrixSpec::Rows(rows, col) => {
                let ev = Evaluator { line: spec.line, params: &params, alg: None };
                let vals = rows
                    .iter()
                    .map(|r| r.iter().map(|e| ev.scalar(e, *col)).collect::<PResult<Vec<_>>>())
                    .collect::<PResult<Vec<_>>>()?;
                let Some(mat) = ScalarMatrix::from_rows(vals) else {
                    return err(spec.line, *col, ParseErrorKind::Shape(format!("{what} has ragged rows")));
                };
                Ok(mat)
            }
        }
    };

    let theta = match &theta_spec {
        None => ScalarMatrix::identity(n),
        Some(spec) => {
            if let MatrixSpec::Rows(rows, col) = &spec.value {
                let cols = rows.first().map_or(0, Vec::len);
                if rows.len() != cols {
                    return err(spec.line, *col, ParseErrorKind::NonSquareTheta { rows: rows.len(), cols });
                }
            }
            let t = scalar_matrix(spec, (n, n), "theta")?;
            if t.rows() != n {
                return err(
                    spec.line,
                    1,
                    ParseErrorKind::Shape(format!("theta is {}x{} but modes is {n}", t.rows(), t.cols())),
                );
            }
            t
        }
    };
    let theta_line = theta_spec.as_ref().map_or(1, |s| s.line);
    let alg = Algebra::new(n, theta, opts.mode, opts.tol)
        .or_else(|e| err(theta_line, 1, ParseErrorKind::Invalid(e.to_string())))?;

    let op_eval = |line: usize| Evaluator { line, params: &params, alg: Some(&alg) };

    let mut a_entries = Vec::with_capacity(n);
    for i in 1..=n {
        let Some(e) = drift.get(&i) else {
            return err(last_line, 1, ParseErrorKind::Missing(format!("A[{i}]")));
        };
        a_entries.push(op_eval(e.line).operator(&e.value)?);
    }
    if let Some((&i, e)) = drift.iter().find(|(&i, _)| i > n) {
        return err(e.line, 1, ParseErrorKind::Shape(format!("A[{i}] exceeds modes = {n}")));
    }
    let mut c_entries = Vec::with_capacity(m);
    for v in 1..=m {
        let Some(e) = output.get(&v) else {
            return err(last_line, 1, ParseErrorKind::Missing(format!("C[{v}]")));
        };
        c_entries.push(op_eval(e.line).operator(&e.value)?);
    }
    if let Some((&v, e)) = output.iter().find(|(&v, _)| v > m) {
        return err(e.line, 1, ParseErrorKind::Shape(format!("C[{v}] exceeds channels = {m}")));
    }

    let op_matrix = |spec: &Located<MatrixSpec>, dim: (usize, usize), what: &str| -> PResult<OperatorMatrix> {
        match &spec.value {
            MatrixSpec::Identity => {
                if dim.0 != dim.1 {
                    return err(spec.line, 1, ParseErrorKind::Shape(format!("{what} = identity must be square")));
                }
                Ok(OperatorMatrix::identity(&alg, dim.0))
            }
            MatrixSpec::Rows(rows, col) => {
                let cols = rows.first().map_or(0, Vec::len);
                if rows.len() != dim.0 || rows.iter().any(|r| r.len() != dim.1) {
                    return err(
                        spec.line,
                        *col,
                        ParseErrorKind::Shape(format!(
                            "{what} must be {}x{}, got {}x{}",
                            dim.0,
                            dim.1,
                            rows.len(),
                            cols
                        )),
                    );
                }
                let ev = op_eval(spec.line);
                let entries = rows.iter().flatten().map(|e| ev.operator(e)).collect::<PResult<Vec<_>>>()?;
                Ok(OperatorMatrix::from_entries(&alg, dim.0, dim.1, entries).expect("shape checked"))
            }
        }
    };

    let Some(b_spec) = matrices.get(&'B') else {
        return err(last_line, 1, ParseErrorKind::Missing("B".into()));
    };
    let b = op_matrix(b_spec, (n, m), "B")?;
    let d = match matrices.get(&'D') {
        Some(spec) => op_matrix(spec, (m, m), "D")?,
        None => OperatorMatrix::identity(&alg, m),
    };

    let mut noise = NoiseSpec::canonical(m);
    let mut noise_line = 1;
    for (key, slot) in [('T', &mut noise.commutation), ('F', &mut noise.ito)] {
        if let Some(spec) = matrices.get(&key) {
            noise_line = spec.line;
            let mat = match &spec.value {
                MatrixSpec::Identity => ScalarMatrix::identity(2 * m),
                MatrixSpec::Rows(..) => scalar_matrix(spec, (2 * m, 2 * m), &key.to_string())?,
            };
            *slot = mat.in_mode(opts.mode);
        }
    }
    if let Err(msg) = noise.validate(m, opts.tol) {
        return err(noise_line, 1, ParseErrorKind::Invalid(msg));
    }

    let phi = match &phi {
        Some(e) => Some(op_eval(e.line).operator(&e.value)?),
        None => None,
    };

    let a_vec = OperatorMatrix::column(&alg, a_entries).expect("same algebra");
    let c_vec = OperatorMatrix::column(&alg, c_entries).expect("same algebra");
    let mut model = QsdeModel::new(&alg, a_vec, b, c_vec, d)
        .expect("shapes validated above")
        .with_params(param_list)
        .with_phi(phi)
        .with_noise(noise);
    model.name = name;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
name: example
modes: 2
channels: 2
theta: identity
param k1 = 2
param k2 = 2
A[1] = -k1*a1 + 2*a1'*a2^2
A[2] = -k2*a2 - 2*a2'*a1^2
B = [[-sqrt(2*k1), 0], [0, -sqrt(2*k2)]]
C[1] = sqrt(2*k1)*a1
C[2] = sqrt(2*k2)*a2
D = identity
phi = 2*a1'*a1 + 2*a2'*a2
";

    fn parse(text: &str) -> Result<QsdeModel, ParseError> {
        parse_model(text, &ParseOptions::default())
    }

    #[test]
    fn fixture_binds_parameters_exactly() {
        let m = parse(FIXTURE).unwrap();
        assert_eq!(m.name.as_deref(), Some("example"));
        assert_eq!(m.drift().at(0).to_string(), "(2+0i)*a1'*a2^2 + (-2+0i)*a1");
        assert_eq!(m.diffusion().get(0, 0).to_string(), "(-2+0i)");
        assert!(m.diffusion().get(0, 1).is_zero());
        assert_eq!(m.output().at(0).to_string(), "(2+0i)*a1");
        assert!(m.all_exact());
        assert_eq!(m.param("k1"), Some(&Scalar::from_int(2)));
    }

    #[test]
    fn unknown_mode() {
        let e = parse("modes: 2\nchannels: 1\nA[1] = a3\nA[2] = 0\nB = [[1],[0]]\nC[1] = a1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.column, 8);
        assert_eq!(e.kind, ParseErrorKind::UnknownMode { index: 3, modes: 2 });
    }

    #[test]
    fn unknown_parameter() {
        let e = parse("modes: 1\nchannels: 1\nA[1] = -k*a1\nB = [[1]]\nC[1] = a1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 9));
        assert_eq!(e.kind, ParseErrorKind::UnknownParameter("k".into()));
    }

    #[test]
    fn juxtaposition_is_rejected() {
        let e = parse("modes: 1\nchannels: 1\nA[1] = 2 a1\nB = [[1]]\nC[1] = a1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn non_square_theta() {
        let e = parse("modes: 2\nchannels: 1\ntheta: rows [[1, 0, 0], [0, 1, 0]]\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonSquareTheta { rows: 2, cols: 3 });
    }

    #[test]
    fn shape_mismatch_in_b() {
        let e = parse("modes: 2\nchannels: 1\nA[1] = 0\nA[2] = 0\nB = [[1, 0]]\nC[1] = a1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        assert_eq!(e.line, 5);
    }

    #[test]
    fn missing_entries() {
        let e = parse("modes: 2\nchannels: 1\nA[1] = 0\nB = [[1],[0]]\nC[1] = a1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Missing("A[2]".into()));
    }

    #[test]
    fn irrational_sqrt_degrades_to_float() {
        let m = parse("modes: 1\nchannels: 1\nparam k = 1\nA[1] = -k*a1\nB = [[-sqrt(2*k)]]\nC[1] = sqrt(2*k)*a1\n")
            .unwrap();
        assert!(!m.all_exact());
        assert!(m.drift().is_exact());
        let b = m.diffusion().get(0, 0).constant_value().unwrap();
        assert!((b.to_c64().re + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn imaginary_literals_and_division() {
        let m = parse("modes: 1\nchannels: 1\nA[1] = (0-3/4i)*a1 + 1/2*a1'\nB = [[1]]\nC[1] = a1\n").unwrap();
        assert_eq!(m.drift().at(0).to_string(), "(1/2+0i)*a1' + (0-3/4i)*a1");
    }

    #[test]
    fn noise_overrides_and_validation() {
        let base = "modes: 1\nchannels: 1\nA[1] = -a1\nB = [[1]]\nC[1] = a1\n";
        let ok = parse(&format!("{base}T = identity\n")).unwrap();
        assert!(ok.noise().commutation.is_identity(0.0));
        let e = parse(&format!("{base}F = [[0, 1], [0, 0]]\n")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(_)));
    }

    #[test]
    fn operators_in_params_rejected() {
        let e = parse("modes: 1\nchannels: 1\nparam k = a1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(_)));
    }

    #[test]
    fn duplicate_statement() {
        let e = parse("modes: 1\nmodes: 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
    }
}
