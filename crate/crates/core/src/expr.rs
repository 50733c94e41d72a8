//! Arithmetic expressions in named variables, used for metric profiles and potentials
//! supplied through config files (`"1 + 0.2*sin(t)*r"`).

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -a.eval(vars),
            Node::Add(a, b) => a.eval(vars) + b.eval(vars),
            Node::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Node::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Node::Div(a, b) => a.eval(vars) / b.eval(vars),
            Node::Pow(a, b) => {
                let base = a.eval(vars);
                match **b {
                    Node::Num(e) if e.fract() == 0.0 && e.abs() < 64.0 => base.powi(e as i32),
                    _ => base.powf(b.eval(vars)),
                }
            }
            Node::Call(f, a) => f.apply(a.eval(vars)),
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Clone)]
pub struct Expr {
    source: String,
    root: Arc<Node>,
    vars: Vec<String>,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.vars == other.vars
    }
}

impl Expr {
    /// Parses `source`; identifiers other than `vars`, `pi` and `e` are rejected.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self> {
        let mut p = Parser {
            chars: source.char_indices().collect(),
            pos: 0,
            vars,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: source.to_string(),
            root: Arc::new(root),
            vars: vars.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        self.root.eval(vars)
    }

    /// True when the expression does not reference the variable at `index`.
    pub fn is_independent_of(&self, index: usize) -> bool {
        fn walk(n: &Node, i: usize) -> bool {
            match n {
                Node::Num(_) => true,
                Node::Var(j) => *j != i,
                Node::Neg(a) | Node::Call(_, a) => walk(a, i),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b) => walk(a, i) && walk(b, i),
            }
        }
        walk(&self.root, index)
    }

    /// Constant value if the expression has no variables.
    pub fn as_constant(&self) -> Option<f64> {
        (0..self.vars.len())
            .all(|i| self.is_independent_of(i))
            .then(|| self.eval(&vec![0.0; self.vars.len()]))
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let column = self.chars.get(self.pos).map(|c| c.0).unwrap_or_else(|| {
            self.chars.last().map(|c| c.0 + 1).unwrap_or(0)
        }) + 1;
        Error::Expression {
            column,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            let exp_sign = (c == '+' || c == '-')
                && self.pos > start
                && matches!(self.chars[self.pos - 1].1, 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        text.parse::<f64>().map(Node::Num).map_err(|_| {
            self.pos = start;
            self.error(&format!("invalid number '{text}'"))
        })
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].1.is_ascii_alphanumeric() || self.chars[self.pos].1 == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        if self.peek() == Some('(') {
            let func = Func::from_name(&name).ok_or_else(|| {
                let save = self.pos;
                self.pos = start;
                let e = self.error(&format!("unknown function '{name}'"));
                self.pos = save;
                e
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(')') {
                return Err(self.error("expected ')' after function argument"));
            }
            self.pos += 1;
            return Ok(Node::Call(func, Box::new(arg)));
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        match name.as_str() {
            "pi" => Ok(Node::Num(std::f64::consts::PI)),
            "e" => Ok(Node::Num(std::f64::consts::E)),
            _ => {
                self.pos = start;
                Err(self.error(&format!("unknown identifier '{name}'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, r: f64, t: f64) -> f64 {
        Expr::parse(src, &["r", "t"]).unwrap().eval(&[r, t])
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(eval("1 + 2*3", 0.0, 0.0), 7.0);
        assert_eq!(eval("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(eval("2^3^2", 0.0, 0.0), 512.0);
        assert!((eval("1 + 0.3*sin(2*pi*t/(2*pi))*r", 0.5, 1.0) - (1.0 + 0.15 * 1f64.sin())).abs() < 1e-15);
        assert!((eval("r^2*t + exp(0)", 2.0, 3.0) - 13.0).abs() < 1e-15);
        assert_eq!(eval("1.5e-1*2", 0.0, 0.0), 0.3);
    }

    #[test]
    fn errors_carry_columns() {
        match Expr::parse("1 + foo", &["r", "t"]) {
            Err(Error::Expression { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("sin(1", &["r"]).is_err());
        assert!(Expr::parse("1 2", &["r"]).is_err());
        assert!(Expr::parse("bogus(1)", &["r"]).is_err());
    }

    #[test]
    fn dependency_queries() {
        let e = Expr::parse("cos(t) + 2", &["r", "t"]).unwrap();
        assert!(e.is_independent_of(0));
        assert!(!e.is_independent_of(1));
        assert_eq!(Expr::parse("2*pi", &["r", "t"]).unwrap().as_constant(), Some(2.0 * std::f64::consts::PI));
    }
}
