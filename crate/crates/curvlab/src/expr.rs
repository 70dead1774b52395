//! A small arithmetic expression language for user-defined charts.
//!
//! Grammar (version 1):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := unary ('^' factor)?          // right-associative
//! unary   := '-' unary | primary
//! primary := NUMBER | IDENT ('(' expr (',' expr)* ')')? | '(' expr ')'
//! ```
//!
//! Identifiers `x1 .. x<dim>` are coordinates, `pi` and `e` are constants,
//! anything else resolves against the chart's parameter map. One-argument
//! functions: sin, cos, tan, asin, acos, atan, sinh, cosh, tanh, exp, log
//! (natural), log10, sqrt, abs. Two-argument: pow, atan2, min, max.
//! Parse errors report line and column.

use std::collections::BTreeMap;
use std::fmt;

/// Bumped when the grammar or the function set changes.
pub const GRAMMAR_VERSION: &str = "expr-v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    UnknownParam(String),
    CoordinateOutOfRange(usize),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnknownParam(p) => write!(f, "unknown parameter '{p}'"),
            EvalError::CoordinateOutOfRange(i) => {
                write!(f, "coordinate x{} out of range for this chart", i + 1)
            }
        }
    }
}

impl std::error::Error for EvalError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fn1 {
    Neg,
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Log10,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fn2 {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Atan2,
    Min,
    Max,
}

/// A parsed expression, ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index (source form `x1`, `x2`, ...).
    Coord(usize),
    Param(String),
    Un(Fn1e, Box<Expr>),
    Bin(Fn2e, Box<Expr>, Box<Expr>),
}

// Public wrappers keep the enum internals private while allowing matches in
// this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fn1e(Fn1);
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fn2e(Fn2);

impl Expr {
    /// Evaluates with coordinates `x` (frame order x1..x_dim) and params.
    pub fn eval(&self, x: &[f64], params: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Coord(i) => x
                .get(*i)
                .copied()
                .ok_or(EvalError::CoordinateOutOfRange(*i)),
            Expr::Param(name) => params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnknownParam(name.clone())),
            Expr::Un(f, a) => {
                let a = a.eval(x, params)?;
                Ok(match f.0 {
                    Fn1::Neg => -a,
                    Fn1::Sin => a.sin(),
                    Fn1::Cos => a.cos(),
                    Fn1::Tan => a.tan(),
                    Fn1::Asin => a.asin(),
                    Fn1::Acos => a.acos(),
                    Fn1::Atan => a.atan(),
                    Fn1::Sinh => a.sinh(),
                    Fn1::Cosh => a.cosh(),
                    Fn1::Tanh => a.tanh(),
                    Fn1::Exp => a.exp(),
                    Fn1::Log => a.ln(),
                    Fn1::Log10 => a.log10(),
                    Fn1::Sqrt => a.sqrt(),
                    Fn1::Abs => a.abs(),
                })
            }
            Expr::Bin(f, a, b) => {
                let a = a.eval(x, params)?;
                let b = b.eval(x, params)?;
                Ok(match f.0 {
                    Fn2::Add => a + b,
                    Fn2::Sub => a - b,
                    Fn2::Mul => a * b,
                    Fn2::Div => a / b,
                    Fn2::Pow => a.powf(b),
                    Fn2::Atan2 => a.atan2(b),
                    Fn2::Min => a.min(b),
                    Fn2::Max => a.max(b),
                })
            }
        }
    }
}

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
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize, usize)>, ParseError> {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let c = match self.peek() {
            Some(c) => c,
            None => return Ok(None),
        };
        let tok = match c {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'/' => {
                self.bump();
                Tok::Slash
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9' | b'.')) {
                    self.bump();
                }
                // exponent part
                if matches!(self.peek(), Some(b'e' | b'E')) {
                    let save = (self.pos, self.line, self.col);
                    self.bump();
                    if matches!(self.peek(), Some(b'+' | b'-')) {
                        self.bump();
                    }
                    if matches!(self.peek(), Some(b'0'..=b'9')) {
                        while matches!(self.peek(), Some(b'0'..=b'9')) {
                            self.bump();
                        }
                    } else {
                        (self.pos, self.line, self.col) = save;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: f64 = text
                    .parse()
                    .map_err(|_| self.err(format!("invalid number '{text}'")))?;
                Tok::Num(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = self.pos;
                while matches!(
                    self.peek(),
                    Some(b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')
                ) {
                    self.bump();
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Ident(text.to_string())
            }
            other => return Err(self.err(format!("unexpected character '{}'", other as char))),
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.bump();
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => Fn2::Add,
                Some(Tok::Minus) => Fn2::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(Fn2e(op), Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => Fn2::Mul,
                Some(Tok::Slash) => Fn2::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(Fn2e(op), Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // Unary minus binds looser than '^': -2^2 == -(2^2).
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expr::Un(Fn1e(Fn1::Neg), Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exp = self.factor()?; // right-assoc; exponent may be signed
            return Ok(Expr::Bin(Fn2e(Fn2::Pow), Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    self.call(&name, args)
                } else {
                    Ok(resolve_ident(&name))
                }
            }
            _ => Err(ParseError {
                line,
                col,
                message: "expected a number, identifier or '('".to_string(),
            }),
        }
    }

    fn call(&mut self, name: &str, mut args: Vec<Expr>) -> Result<Expr, ParseError> {
        let f1 = match name {
            "sin" => Some(Fn1::Sin),
            "cos" => Some(Fn1::Cos),
            "tan" => Some(Fn1::Tan),
            "asin" => Some(Fn1::Asin),
            "acos" => Some(Fn1::Acos),
            "atan" => Some(Fn1::Atan),
            "sinh" => Some(Fn1::Sinh),
            "cosh" => Some(Fn1::Cosh),
            "tanh" => Some(Fn1::Tanh),
            "exp" => Some(Fn1::Exp),
            "log" => Some(Fn1::Log),
            "log10" => Some(Fn1::Log10),
            "sqrt" => Some(Fn1::Sqrt),
            "abs" => Some(Fn1::Abs),
            _ => None,
        };
        if let Some(f) = f1 {
            if args.len() != 1 {
                return Err(self.err(format!("{name} takes exactly one argument")));
            }
            return Ok(Expr::Un(Fn1e(f), Box::new(args.pop().unwrap())));
        }
        let f2 = match name {
            "pow" => Some(Fn2::Pow),
            "atan2" => Some(Fn2::Atan2),
            "min" => Some(Fn2::Min),
            "max" => Some(Fn2::Max),
            _ => None,
        };
        if let Some(f) = f2 {
            if args.len() != 2 {
                return Err(self.err(format!("{name} takes exactly two arguments")));
            }
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            return Ok(Expr::Bin(Fn2e(f), Box::new(a), Box::new(b)));
        }
        Err(self.err(format!("unknown function '{name}'")))
    }
}

fn resolve_ident(name: &str) -> Expr {
    if name == "pi" {
        return Expr::Num(std::f64::consts::PI);
    }
    if name == "e" {
        return Expr::Num(std::f64::consts::E);
    }
    if let Some(rest) = name.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(k) = rest.parse::<usize>() {
                if k >= 1 {
                    return Expr::Coord(k - 1);
                }
            }
        }
    }
    Expr::Param(name.to_string())
}

/// Parses one expression from source text.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_token()? {
        toks.push(t);
    }
    let end = (lexer.line, lexer.col);
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: &[f64]) -> f64 {
        parse(src).unwrap().eval(x, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn golden_corpus() {
        let cases: &[(&str, &[f64], f64)] = &[
            ("1 + 2", &[], 3.0),
            ("2 * 3 + 4", &[], 10.0),
            ("2 + 3 * 4", &[], 14.0),
            ("(2 + 3) * 4", &[], 20.0),
            ("-x1 + 5", &[2.0], 3.0),
            ("x1 * x2", &[3.0, 4.0], 12.0),
            ("2 ^ 3 ^ 2", &[], 512.0),
            ("-2 ^ 2", &[], -4.0),
            ("x1 / (1 + x1 ^ 2)", &[1.0], 0.5),
            ("sin(pi / 2)", &[], 1.0),
            ("cos(0)", &[], 1.0),
            ("exp(log(7))", &[], 7.0),
            ("sqrt(x1 ^ 2 + x2 ^ 2)", &[3.0, 4.0], 5.0),
            ("pow(2, 10)", &[], 1024.0),
            ("atan2(1, 1) * 4", &[], std::f64::consts::PI),
            ("min(3, max(1, 2))", &[], 2.0),
            ("abs(-2.5)", &[], 2.5),
            ("1e-3 * 1000", &[], 1.0),
            ("2.5e2", &[], 250.0),
            ("tanh(0)", &[], 0.0),
        ];
        for (src, x, want) in cases {
            let got = eval(src, x);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "{src}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn params_resolve() {
        let e = parse("c * x1 + d").unwrap();
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), 2.0);
        params.insert("d".to_string(), 1.0);
        assert_eq!(e.eval(&[3.0], &params).unwrap(), 7.0);
        assert!(matches!(
            e.eval(&[3.0], &BTreeMap::new()),
            Err(EvalError::UnknownParam(_))
        ));
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse("1 +\n* 2").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 1);

        let err = parse("sin(1, 2)").unwrap_err();
        assert!(err.message.contains("one argument"));

        let err = parse("2 $ 3").unwrap_err();
        assert!(err.message.contains("unexpected character"));

        let err = parse("(1 + 2").unwrap_err();
        assert!(err.message.contains("')'"));
    }

    #[test]
    fn trailing_input_rejected() {
        assert!(parse("1 2").is_err());
    }
}
