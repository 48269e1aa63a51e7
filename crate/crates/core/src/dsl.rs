//! Scalar functions of one variable: parsing, evaluation and symbolic
//! differentiation.
//!
//! The grammar is closed on purpose: decimal literals, one free variable,
//! `+ - * /`, `^` with a constant integer exponent, unary minus and the
//! functions `sin cos tanh exp abs sign min max clamp`. A closed grammar keeps
//! Lipschitz behaviour of user-supplied drifts auditable. `sign` exists mainly
//! as the derivative of `abs` (with sign(0) = 0) but parses like any other
//! function so printed derivatives stay within the grammar.
//!
//! Operator precedence: `^` binds tighter than unary minus, which binds
//! tighter than `* /`, which bind tighter than `+ -`; binary operators are
//! left-associative.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant integer exponent, so derivatives stay exact.
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tanh(Box<Expr>),
    Exp(Box<Expr>),
    Abs(Box<Expr>),
    Sign(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Clamp(Box<Expr>, Box<Expr>, Box<Expr>),
}

pub fn parse(source: &str, variable: &str) -> Result<Expr> {
    if source.trim().is_empty() {
        return Err(Error::EmptySource);
    }
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        variable,
    };
    let expr = parser.expression()?;
    parser.expect_eof()?;
    Ok(expr)
}

impl Expr {
    /// IEEE-double evaluation with the free variable bound to `v`.
    pub fn eval(&self, v: f64) -> Result<f64> {
        Ok(match self {
            Expr::Lit(c) => *c,
            Expr::Var => v,
            Expr::Neg(e) => -e.eval(v)?,
            Expr::Add(a, b) => a.eval(v)? + b.eval(v)?,
            Expr::Sub(a, b) => a.eval(v)? - b.eval(v)?,
            Expr::Mul(a, b) => a.eval(v)? * b.eval(v)?,
            Expr::Div(a, b) => {
                let den = b.eval(v)?;
                if den == 0.0 {
                    return Err(Error::DivisionByZero {
                        subexpr: self.display("x").to_string(),
                    });
                }
                a.eval(v)? / den
            }
            Expr::Pow(base, k) => {
                let b = base.eval(v)?;
                if *k < 0 && b == 0.0 {
                    return Err(Error::DivisionByZero {
                        subexpr: self.display("x").to_string(),
                    });
                }
                b.powi(*k)
            }
            Expr::Sin(e) => e.eval(v)?.sin(),
            Expr::Cos(e) => e.eval(v)?.cos(),
            Expr::Tanh(e) => e.eval(v)?.tanh(),
            Expr::Exp(e) => e.eval(v)?.exp(),
            Expr::Abs(e) => e.eval(v)?.abs(),
            Expr::Sign(e) => {
                let x = e.eval(v)?;
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Expr::Min(a, b) => a.eval(v)?.min(b.eval(v)?),
            Expr::Max(a, b) => a.eval(v)?.max(b.eval(v)?),
            // min(max(x, lo), hi): total even when lo > hi.
            Expr::Clamp(x, lo, hi) => x.eval(v)?.max(lo.eval(v)?).min(hi.eval(v)?),
        })
    }

    /// Symbolic derivative with respect to the free variable.
    ///
    /// `abs` differentiates to `sign` (with sign(0) = 0); `min`, `max` and
    /// `clamp` go through the identity min(f, g) = (f + g - |f - g|)/2. The
    /// only simplification applied is constant folding of literal-only
    /// subtrees.
    pub fn differentiate(&self) -> Expr {
        fold(self.diff())
    }

    fn diff(&self) -> Expr {
        use Expr::*;
        match self {
            Lit(_) => Lit(0.0),
            Var => Lit(1.0),
            Neg(e) => Neg(Box::new(e.diff())),
            Add(a, b) => Add(Box::new(a.diff()), Box::new(b.diff())),
            Sub(a, b) => Sub(Box::new(a.diff()), Box::new(b.diff())),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.diff()), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.diff()))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.diff()), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.diff()))),
                )),
                Box::new(Pow(b.clone(), 2)),
            ),
            Pow(base, k) => match *k {
                0 => Lit(0.0),
                1 => base.diff(),
                k => Mul(
                    Box::new(Mul(
                        Box::new(Lit(f64::from(k))),
                        Box::new(Pow(base.clone(), k - 1)),
                    )),
                    Box::new(base.diff()),
                ),
            },
            Sin(e) => Mul(Box::new(Cos(e.clone())), Box::new(e.diff())),
            Cos(e) => Mul(
                Box::new(Neg(Box::new(Sin(e.clone())))),
                Box::new(e.diff()),
            ),
            Tanh(e) => Mul(
                Box::new(Sub(
                    Box::new(Lit(1.0)),
                    Box::new(Pow(Box::new(Tanh(e.clone())), 2)),
                )),
                Box::new(e.diff()),
            ),
            Exp(e) => Mul(Box::new(Exp(e.clone())), Box::new(e.diff())),
            Abs(e) => Mul(Box::new(Sign(e.clone())), Box::new(e.diff())),
            // sign is locally constant away from its jump; 0 almost everywhere.
            Sign(_) => Lit(0.0),
            Min(f, g) => min_max_diff(f, g, false),
            Max(f, g) => min_max_diff(f, g, true),
            Clamp(x, lo, hi) => {
                let inner = Max(x.clone(), lo.clone());
                Min(Box::new(inner), hi.clone()).diff()
            }
        }
    }

    pub fn contains_var(&self) -> bool {
        use Expr::*;
        match self {
            Lit(_) => false,
            Var => true,
            Neg(e) | Sin(e) | Cos(e) | Tanh(e) | Exp(e) | Abs(e) | Sign(e) | Pow(e, _) => {
                e.contains_var()
            }
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Min(a, b) | Max(a, b) => {
                a.contains_var() || b.contains_var()
            }
            Clamp(a, b, c) => a.contains_var() || b.contains_var() || c.contains_var(),
        }
    }

    /// True when the tree uses none of the kinked primitives
    /// (`abs`, `sign`, `min`, `max`, `clamp`), hence is C^1 on its domain.
    pub fn is_smooth(&self) -> bool {
        use Expr::*;
        match self {
            Lit(_) | Var => true,
            Abs(_) | Sign(_) | Min(..) | Max(..) | Clamp(..) => false,
            Neg(e) | Sin(e) | Cos(e) | Tanh(e) | Exp(e) | Pow(e, _) => e.is_smooth(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_smooth() && b.is_smooth(),
        }
    }

    /// Printable form with the free variable rendered as `var`.
    /// Printing and re-parsing yields a structurally identical tree.
    pub fn display<'a>(&'a self, var: &'a str) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, var }
    }

    fn precedence(&self) -> u8 {
        use Expr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }
}

fn min_max_diff(f: &Expr, g: &Expr, is_max: bool) -> Expr {
    use Expr::*;
    // d min(f,g) = (f' + g' -+ sign(f-g) (f' - g')) / 2
    let df = f.diff();
    let dg = g.diff();
    let sum = Add(Box::new(df.clone()), Box::new(dg.clone()));
    let sgn = Sign(Box::new(Sub(
        Box::new(f.clone()),
        Box::new(g.clone()),
    )));
    let steer = Mul(Box::new(sgn), Box::new(Sub(Box::new(df), Box::new(dg))));
    let combined = if is_max {
        Add(Box::new(sum), Box::new(steer))
    } else {
        Sub(Box::new(sum), Box::new(steer))
    };
    Mul(Box::new(Lit(0.5)), Box::new(combined))
}

/// Constant-fold literal-only subtrees. Subtrees whose evaluation fails
/// (division by zero in constants) are left untouched.
fn fold(e: Expr) -> Expr {
    use Expr::*;
    let folded = match e {
        Lit(_) | Var => return e,
        Neg(a) => Neg(Box::new(fold(*a))),
        Add(a, b) => Add(Box::new(fold(*a)), Box::new(fold(*b))),
        Sub(a, b) => Sub(Box::new(fold(*a)), Box::new(fold(*b))),
        Mul(a, b) => Mul(Box::new(fold(*a)), Box::new(fold(*b))),
        Div(a, b) => Div(Box::new(fold(*a)), Box::new(fold(*b))),
        Pow(a, k) => Pow(Box::new(fold(*a)), k),
        Sin(a) => Sin(Box::new(fold(*a))),
        Cos(a) => Cos(Box::new(fold(*a))),
        Tanh(a) => Tanh(Box::new(fold(*a))),
        Exp(a) => Exp(Box::new(fold(*a))),
        Abs(a) => Abs(Box::new(fold(*a))),
        Sign(a) => Sign(Box::new(fold(*a))),
        Min(a, b) => Min(Box::new(fold(*a)), Box::new(fold(*b))),
        Max(a, b) => Max(Box::new(fold(*a)), Box::new(fold(*b))),
        Clamp(a, b, c) => Clamp(Box::new(fold(*a)), Box::new(fold(*b)), Box::new(fold(*c))),
    };
    if !folded.contains_var() {
        if let Ok(v) = folded.eval(0.0) {
            if v.is_finite() {
                return Lit(v);
            }
        }
    }
    folded
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    var: &'a str,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.var, 0)
    }
}

fn write_child(
    f: &mut fmt::Formatter<'_>,
    e: &Expr,
    var: &str,
    min_prec: u8,
) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "(")?;
        write_expr(f, e, var, 0)?;
        write!(f, ")")
    } else {
        write_expr(f, e, var, min_prec)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, var: &str, _min: u8) -> fmt::Result {
    use Expr::*;
    match e {
        Lit(v) => write!(f, "{v}"),
        Var => write!(f, "{var}"),
        Neg(a) => {
            write!(f, "-")?;
            // parenthesize a nested Neg so `--x` never appears
            if matches!(**a, Neg(_)) {
                write!(f, "(")?;
                write_expr(f, a, var, 0)?;
                write!(f, ")")
            } else {
                write_child(f, a, var, 3)
            }
        }
        Add(a, b) => {
            write_child(f, a, var, 1)?;
            write!(f, " + ")?;
            write_child(f, b, var, 2)
        }
        Sub(a, b) => {
            write_child(f, a, var, 1)?;
            write!(f, " - ")?;
            write_child(f, b, var, 2)
        }
        Mul(a, b) => {
            write_child(f, a, var, 2)?;
            write!(f, " * ")?;
            write_child(f, b, var, 3)
        }
        Div(a, b) => {
            write_child(f, a, var, 2)?;
            write!(f, " / ")?;
            write_child(f, b, var, 3)
        }
        Pow(a, k) => {
            write_child(f, a, var, 5)?;
            write!(f, "^{k}")
        }
        Sin(a) => write_call(f, "sin", &[a], var),
        Cos(a) => write_call(f, "cos", &[a], var),
        Tanh(a) => write_call(f, "tanh", &[a], var),
        Exp(a) => write_call(f, "exp", &[a], var),
        Abs(a) => write_call(f, "abs", &[a], var),
        Sign(a) => write_call(f, "sign", &[a], var),
        Min(a, b) => write_call(f, "min", &[a, b], var),
        Max(a, b) => write_call(f, "max", &[a, b], var),
        Clamp(a, b, c) => write_call(f, "clamp", &[a, b, c], var),
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, args: &[&Expr], var: &str) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_expr(f, a, var, 0)?;
    }
    write!(f, ")")
}

// ---------------------------------------------------------------------------
// Tokenizer / parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Spanned>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push(Spanned { tok: Tok::Plus, offset: start }),
            '-' => out.push(Spanned { tok: Tok::Minus, offset: start }),
            '*' => out.push(Spanned { tok: Tok::Star, offset: start }),
            '/' => out.push(Spanned { tok: Tok::Slash, offset: start }),
            '^' => out.push(Spanned { tok: Tok::Caret, offset: start }),
            '(' => out.push(Spanned { tok: Tok::LParen, offset: start }),
            ')' => out.push(Spanned { tok: Tok::RParen, offset: start }),
            ',' => out.push(Spanned { tok: Tok::Comma, offset: start }),
            '0'..='9' | '.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                }
                // exponent part, only when followed by digits
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && (bytes[k] as char).is_ascii_digit() {
                        j = k;
                        while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text = &src[start..j];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    expected: "a numeric literal".to_string(),
                })?;
                out.push(Spanned { tok: Tok::Num(value), offset: start });
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(src[start..j].to_string()),
                    offset: start,
                });
                i = j;
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    expected: "an operator, number, identifier or parenthesis".to_string(),
                })
            }
        }
        i += 1;
    }
    out.push(Spanned { tok: Tok::Eof, offset: src.len() });
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    variable: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> Error {
        Error::Syntax {
            offset: self.peek().offset,
            expected: expected.to_string(),
        }
    }

    fn expect_eof(&self) -> Result<()> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.err("end of input or a binary operator"))
        }
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let negative = if self.peek().tok == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let offset = self.peek().offset;
            match self.bump().tok {
                Tok::Num(v) => {
                    if v.fract() != 0.0 || v.abs() > f64::from(i32::MAX) {
                        return Err(Error::Syntax {
                            offset,
                            expected: "a constant integer exponent".to_string(),
                        });
                    }
                    let mut k = v as i32;
                    if negative {
                        k = -k;
                    }
                    base = Expr::Pow(Box::new(base), k);
                }
                _ => {
                    return Err(Error::Syntax {
                        offset,
                        expected: "a constant integer exponent".to_string(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let spanned = self.peek().clone();
        match spanned.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Lit(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expression()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.err("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(ref name) => {
                self.bump();
                if name == self.variable {
                    return Ok(Expr::Var);
                }
                let arity = match name.as_str() {
                    "sin" | "cos" | "tanh" | "exp" | "abs" | "sign" => 1,
                    "min" | "max" => 2,
                    "clamp" => 3,
                    _ => {
                        return Err(Error::UnknownIdentifier {
                            name: name.clone(),
                            offset: spanned.offset,
                        })
                    }
                };
                if self.peek().tok != Tok::LParen {
                    return Err(self.err("`(` to open the argument list"));
                }
                self.bump();
                let mut args = Vec::with_capacity(arity);
                loop {
                    args.push(self.expression()?);
                    match self.peek().tok {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RParen => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.err("`,` or `)`")),
                    }
                }
                if args.len() != arity {
                    return Err(Error::Syntax {
                        offset: spanned.offset,
                        expected: format!("{arity} argument(s) to `{name}`"),
                    });
                }
                let mut it = args.into_iter();
                Ok(match name.as_str() {
                    "sin" => Expr::Sin(Box::new(it.next().unwrap())),
                    "cos" => Expr::Cos(Box::new(it.next().unwrap())),
                    "tanh" => Expr::Tanh(Box::new(it.next().unwrap())),
                    "exp" => Expr::Exp(Box::new(it.next().unwrap())),
                    "abs" => Expr::Abs(Box::new(it.next().unwrap())),
                    "sign" => Expr::Sign(Box::new(it.next().unwrap())),
                    "min" => Expr::Min(
                        Box::new(it.next().unwrap()),
                        Box::new(it.next().unwrap()),
                    ),
                    "max" => Expr::Max(
                        Box::new(it.next().unwrap()),
                        Box::new(it.next().unwrap()),
                    ),
                    "clamp" => Expr::Clamp(
                        Box::new(it.next().unwrap()),
                        Box::new(it.next().unwrap()),
                        Box::new(it.next().unwrap()),
                    ),
                    _ => unreachable!(),
                })
            }
            _ => Err(self.err("a number, `(`, `-` or an identifier")),
        }
    }
}

// ---------------------------------------------------------------------------
// FunctionSpec
// ---------------------------------------------------------------------------

/// A parsed scalar function together with its source text and an optional
/// user-asserted Lipschitz bound.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    source: String,
    variable: String,
    expr: Expr,
    declared_lipschitz: Option<f64>,
}

/// Produced when sampled slopes exceed the declared Lipschitz bound.
/// A warning, not an error: sampling cannot prove a bound, only refute it.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzWarning {
    pub declared: f64,
    pub observed: f64,
    pub at: f64,
}

impl FunctionSpec {
    pub fn parse(source: &str, variable: &str) -> Result<Self> {
        let expr = parse(source, variable)?;
        Ok(Self {
            source: source.to_string(),
            variable: variable.to_string(),
            expr,
            declared_lipschitz: None,
        })
    }

    pub fn with_declared_lipschitz(mut self, bound: f64) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "declared Lipschitz bound must be positive, got {bound}"
            )));
        }
        self.declared_lipschitz = Some(bound);
        Ok(self)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn declared_lipschitz(&self) -> Option<f64> {
        self.declared_lipschitz
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        self.expr.eval(v)
    }

    pub fn derivative(&self) -> Expr {
        self.expr.differentiate()
    }

    /// Check the declared bound against finite-difference slopes on a sample
    /// grid over [lo, hi]. Returns the offending slope when the bound looks
    /// violated; points where evaluation fails are skipped.
    pub fn check_declared_lipschitz(
        &self,
        lo: f64,
        hi: f64,
        samples: usize,
    ) -> Option<LipschitzWarning> {
        let declared = self.declared_lipschitz?;
        let m = samples.max(2);
        let step = (hi - lo) / (m - 1) as f64;
        let mut prev: Option<(f64, f64)> = None;
        let mut worst: Option<LipschitzWarning> = None;
        for i in 0..m {
            let x = lo + step * i as f64;
            let Ok(y) = self.eval(x) else {
                prev = None;
                continue;
            };
            if let Some((px, py)) = prev {
                let slope = ((y - py) / (x - px)).abs();
                if slope > declared * (1.0 + 1e-9)
                    && worst.as_ref().is_none_or(|w| slope > w.observed)
                {
                    worst = Some(LipschitzWarning {
                        declared,
                        observed: slope,
                        at: x,
                    });
                }
            }
            prev = Some((x, y));
        }
        worst
    }
}
