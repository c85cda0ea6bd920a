//! A small closed-form expression language for custom mean-curvature
//! profiles.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 't' | 'd' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := cot | tan | sin | cos | exp | ln | sqrt
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cot,
    Tan,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "cot" => Func::Cot,
            "tan" => Func::Tan,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Cot => x.cos() / x.sin(),
            Func::Tan => x.tan(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Cot => "cot",
            Func::Tan => "tan",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    D,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::InvalidSpec(format!(
                "unexpected trailing input in expression {src:?}"
            )));
        }
        Ok(expr)
    }

    /// Evaluates with the free variables `t` and `d` bound.
    pub fn eval(&self, t: f64, d: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::T => t,
            Expr::D => d,
            Expr::Neg(a) => -a.eval(t, d),
            Expr::Add(a, b) => a.eval(t, d) + b.eval(t, d),
            Expr::Sub(a, b) => a.eval(t, d) - b.eval(t, d),
            Expr::Mul(a, b) => a.eval(t, d) * b.eval(t, d),
            Expr::Div(a, b) => a.eval(t, d) / b.eval(t, d),
            Expr::Pow(a, b) => {
                let base = a.eval(t, d);
                let exp = b.eval(t, d);
                if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                    base.powi(exp as i32)
                } else {
                    base.powf(exp)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(t, d)),
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::D => false,
            Expr::T => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_t(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.depends_on_t() || b.depends_on_t(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::T => write!(f, "t"),
            Expr::D => write!(f, "d"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Evaluates a constant expression such as `"pi/2"`.
pub fn eval_const(src: &str) -> Result<f64> {
    let expr = Expr::parse(src)?;
    if expr.depends_on_t() || matches!(expr, Expr::D) {
        return Err(Error::InvalidSpec(format!(
            "{src:?} must be a constant expression"
        )));
    }
    Ok(expr.eval(f64::NAN, f64::NAN))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part: 1e-3, 2.5E+4
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("bad number {text:?} in expression")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "unexpected character {c:?} in expression"
                    )))
                }
            };
            out.push(tok);
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::T),
                "d" => Ok(Expr::D),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                other => {
                    let func = Func::from_name(other).ok_or_else(|| {
                        Error::InvalidSpec(format!("unknown identifier {other:?} in expression"))
                    })?;
                    match self.next() {
                        Some(Token::LParen) => {}
                        _ => {
                            return Err(Error::InvalidSpec(format!(
                                "expected '(' after function {other}"
                            )))
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            Some(tok) => Err(Error::InvalidSpec(format!(
                "unexpected token {tok:?} in expression"
            ))),
            None => Err(Error::InvalidSpec("expression ended unexpectedly".into())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next() {
            Some(Token::RParen) => Ok(()),
            _ => Err(Error::InvalidSpec("missing ')' in expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(Expr::parse("1 + 2 * 3").unwrap().eval(0.0, 0.0), 7.0);
        assert_eq!(Expr::parse("2 ^ 3 ^ 2").unwrap().eval(0.0, 0.0), 512.0);
        assert_eq!(Expr::parse("-2 ^ 2").unwrap().eval(0.0, 0.0), -4.0);
        assert_eq!(Expr::parse("(1 - 2) - 3").unwrap().eval(0.0, 0.0), -4.0);
        assert_eq!(Expr::parse("8 / 4 / 2").unwrap().eval(0.0, 0.0), 1.0);
        assert_eq!(Expr::parse("1.5e2 + 2E-1").unwrap().eval(0.0, 0.0), 150.2);
    }

    #[test]
    fn variables_and_functions() {
        let e = Expr::parse("4*cot(2*t)").unwrap();
        assert!((e.eval(PI / 8.0, PI / 2.0) - 4.0).abs() < 1e-14);
        let e = Expr::parse("t/d + sqrt(4) + ln(exp(1)) + sin(0) + cos(0) + tan(0)").unwrap();
        assert!((e.eval(1.0, 2.0) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn constants() {
        assert_eq!(eval_const("pi/2").unwrap(), PI / 2.0);
        assert!(eval_const("t + 1").is_err());
        assert!(eval_const("d").is_err());
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1 +", "foo(t)", "cot t", "(1", "1 2", "3 $ 4", "t)"] {
            assert!(Expr::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }
}
