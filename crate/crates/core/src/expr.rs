//! Arithmetic expressions for problem data.
//!
//! Grammar (`^` binds tightest and is right-associative, unary minus binds
//! looser than `^`, so `-2^2 = -4`):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | constant | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables are `x`, `y`, `u`, `t`, `s`; constants `pi`, `e`; functions
//! `sin cos exp ln abs sqrt sign` (one argument) and `min max` (two or more).

use std::collections::BTreeSet;
use std::fmt;

/// Byte offset into the source text. Ignored by `==` so that ASTs compare
/// structurally.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Pos(pub usize);

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    U,
    T,
    S,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X, Var::Y, Var::U, Var::T, Var::S];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::U => "u",
            Var::T => "t",
            Var::S => "s",
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
    Sqrt,
    Sign,
    Min,
    Max,
}

impl Func {
    const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Ln,
        Func::Abs,
        Func::Sqrt,
        Func::Sign,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sign => "sign",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }

    fn is_variadic(self) -> bool {
        matches!(self, Func::Min | Func::Max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Pos,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("evaluation error at byte {offset}: {message}")]
pub struct EvalError {
    pub offset: usize,
    pub message: String,
}

/// Variable bindings for evaluation; unbound variables read as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub t: f64,
    pub s: f64,
}

impl Env {
    fn get(&self, v: Var) -> f64 {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::U => self.u,
            Var::T => self.t,
            Var::S => self.s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // Exponent only if followed by digits, so `2e` stays `2` then `e`.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                expected: vec!["number".into()],
                found: format!("'{text}'"),
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["finite number".into()],
                    found: format!("'{text}'"),
                });
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                expected: vec!["token".into()],
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&[&format!("'{c}'")])
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let (_, at) = self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs, at);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let (_, at) = self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs, at);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            let (_, at) = self.bump();
            let exponent = self.unary()?;
            return Ok(binary(BinOp::Pow, base, exponent, at));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const START: &[&str] = &["number", "variable", "constant", "function", "'('", "'-'"];
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.offset();
                if let Some(v) = Var::from_name(&name) {
                    self.bump();
                    return Ok(Expr::Var(v));
                }
                match name.as_str() {
                    "pi" => {
                        self.bump();
                        return Ok(Expr::Const(Constant::Pi));
                    }
                    "e" => {
                        self.bump();
                        return Ok(Expr::Const(Constant::E));
                    }
                    _ => {}
                }
                let Some(func) = Func::from_name(&name) else {
                    return self.fail(START);
                };
                self.bump();
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if func.is_variadic() {
                    if args.len() < 2 {
                        return self.fail(&["','"]);
                    }
                } else if args.len() != 1 && *self.peek() == Tok::Sym(')') {
                    return Err(ParseError {
                        offset: at,
                        expected: vec![format!("one argument to {}", func.name())],
                        found: format!("{} arguments", args.len()),
                    });
                }
                self.expect(')')?;
                Ok(Expr::Call {
                    func,
                    args,
                    pos: Pos(at),
                })
            }
            _ => self.fail(START),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr, at: usize) -> Expr {
    Expr::Binary {
        op,
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
        pos: Pos(at),
    }
}

/// Parses `src` into an expression tree.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => Ok(env.get(*v)),
            Expr::Const(Constant::Pi) => Ok(std::f64::consts::PI),
            Expr::Const(Constant::E) => Ok(std::f64::consts::E),
            Expr::Neg(e) => Ok(-e.eval(env)?),
            Expr::Binary { op, lhs, rhs, pos } => {
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(EvalError {
                                offset: pos.0,
                                message: "division by zero".into(),
                            })
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinOp::Pow => {
                        let r = a.powf(b);
                        if r.is_nan() {
                            Err(EvalError {
                                offset: pos.0,
                                message: format!("{a}^{b} is undefined"),
                            })
                        } else {
                            Ok(r)
                        }
                    }
                }
            }
            Expr::Call { func, args, pos } => {
                let domain = |msg: String| EvalError {
                    offset: pos.0,
                    message: msg,
                };
                if func.is_variadic() {
                    let mut acc = args[0].eval(env)?;
                    for a in &args[1..] {
                        let v = a.eval(env)?;
                        acc = if *func == Func::Min { acc.min(v) } else { acc.max(v) };
                    }
                    return Ok(acc);
                }
                let v = args[0].eval(env)?;
                Ok(match func {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Ln => {
                        if v <= 0.0 {
                            return Err(domain(format!("ln of non-positive argument {v}")));
                        }
                        v.ln()
                    }
                    Func::Abs => v.abs(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(domain(format!("sqrt of negative argument {v}")));
                        }
                        v.sqrt()
                    }
                    Func::Sign => {
                        if v > 0.0 {
                            1.0
                        } else if v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                    Func::Min | Func::Max => unreachable!(),
                })
            }
        }
    }

    /// The set of variables the expression mentions.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Num(_) | Expr::Const(_) => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if *v < 0.0 => PREC_NEG,
            Expr::Neg(_) => PREC_NEG,
            Expr::Binary { op, .. } => op.precedence(),
            _ => PREC_ATOM,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "-{:?}", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Binary { op, lhs, rhs, .. } => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    write_child(f, lhs, lhs.precedence() < PREC_ATOM)?;
                    f.write_str("^")?;
                    write_child(f, rhs, rhs.precedence() < PREC_NEG)
                } else {
                    write_child(f, lhs, lhs.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    write_child(f, rhs, rhs.precedence() <= p)
                }
            }
            Expr::Call { func, args, .. } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, env: Env) -> f64 {
        parse(src).unwrap().eval(&env).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            ev(
                "2+3*x",
                Env {
                    x: 4.0,
                    ..Env::default()
                }
            ),
            14.0
        );
        assert_eq!(ev("2^3^2", Env::default()), 512.0);
        assert_eq!(
            ev(
                "u*(1-u)",
                Env {
                    u: 0.25,
                    ..Env::default()
                }
            ),
            0.1875
        );
        assert_eq!(ev("-2^2", Env::default()), -4.0);
        assert_eq!(ev("2^-1", Env::default()), 0.5);
        assert_eq!(ev("8/4/2", Env::default()), 1.0);
        assert_eq!(ev("1-2-3", Env::default()), -4.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(pi/2) + ln(e)", Env::default()) - 2.0).abs() < 1e-15);
        assert_eq!(ev("max(1, 3, 2) - min(4, -1)", Env::default()), 4.0);
        assert_eq!(ev("sign(-3) + abs(-2) + sqrt(9)", Env::default()), 4.0);
        assert_eq!(ev("1.5e-1*2E+1", Env::default()), 3.0);
    }

    #[test]
    fn syntax_error_reports_offset_and_expected() {
        let err = parse("1 + * 2").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected.iter().any(|e| e == "number"));
        assert_eq!(parse("sin(1").unwrap_err().offset, 5);
        assert_eq!(parse("1 2").unwrap_err().offset, 2);
        assert_eq!(parse("foo(1)").unwrap_err().offset, 0);
        assert_eq!(parse("3 # 1").unwrap_err().offset, 2);
        assert!(parse("max(1)").is_err());
        assert!(parse("sin(1, 2)").is_err());
        assert!(parse("").is_err());
        assert!(parse("1e999").is_err());
    }

    #[test]
    fn domain_errors_carry_position() {
        let e = parse("1 + ln(x)").unwrap();
        let err = e.eval(&Env::default()).unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse("sqrt(u)")
            .unwrap()
            .eval(&Env {
                u: -1.0,
                ..Env::default()
            })
            .unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(parse("1/x").unwrap().eval(&Env::default()).is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "-2^2", "(-2)^2", "2^3^2", "(2^3)^2", "1-(2-3)", "--x", "2^-x^2", "a", "-(1+x)*3",
        ] {
            let Ok(a) = parse(src) else { continue };
            let b = parse(&a.to_string()).unwrap();
            assert_eq!(a, b, "{src} printed as {a}");
        }
    }

    #[test]
    fn variables_collected() {
        let vars = parse("u*sin(x) + t").unwrap().variables();
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec![Var::X, Var::U, Var::T]);
    }
}
