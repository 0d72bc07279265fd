//! Boolean expressions for phase oracles.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr  := or
//! or    := xor ('|' xor)*
//! xor   := and ('^' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | atom
//! atom  := ident | '0' | '1' | '(' expr ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;

pub const MAX_VARIABLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanExpr {
    Var(String),
    Const(bool),
    Not(Box<BooleanExpr>),
    And(Box<BooleanExpr>, Box<BooleanExpr>),
    Or(Box<BooleanExpr>, Box<BooleanExpr>),
    Xor(Box<BooleanExpr>, Box<BooleanExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("too many variables: {0} distinct (at most {MAX_VARIABLES})")]
    TooManyVariables(usize),
}

impl BooleanExpr {
    pub fn var(name: &str) -> Self {
        BooleanExpr::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BooleanExpr) -> Self {
        BooleanExpr::Not(Box::new(e))
    }

    pub fn and(a: BooleanExpr, b: BooleanExpr) -> Self {
        BooleanExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BooleanExpr, b: BooleanExpr) -> Self {
        BooleanExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: BooleanExpr, b: BooleanExpr) -> Self {
        BooleanExpr::Xor(Box::new(a), Box::new(b))
    }

    /// Free variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &BooleanExpr, out: &mut Vec<String>) {
            match e {
                BooleanExpr::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                BooleanExpr::Const(_) => {}
                BooleanExpr::Not(a) => walk(a, out),
                BooleanExpr::And(a, b) | BooleanExpr::Or(a, b) | BooleanExpr::Xor(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Evaluates with unbound variables treated as false.
    pub fn eval(&self, env: &BTreeMap<String, bool>) -> bool {
        match self {
            BooleanExpr::Var(v) => env.get(v).copied().unwrap_or(false),
            BooleanExpr::Const(c) => *c,
            BooleanExpr::Not(a) => !a.eval(env),
            BooleanExpr::And(a, b) => a.eval(env) && b.eval(env),
            BooleanExpr::Or(a, b) => a.eval(env) || b.eval(env),
            BooleanExpr::Xor(a, b) => a.eval(env) ^ b.eval(env),
        }
    }

    /// Evaluates on assignment bits: variable `order[i]` takes bit `i` of `x`.
    pub fn eval_bits(&self, order: &[String], x: usize) -> bool {
        let env = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), x >> i & 1 == 1))
            .collect();
        self.eval(&env)
    }

    /// Number of satisfying assignments over `order`.
    pub fn count_solutions(&self, order: &[String]) -> usize {
        (0..1usize << order.len())
            .filter(|&x| self.eval_bits(order, x))
            .count()
    }

    pub fn depth(&self) -> usize {
        match self {
            BooleanExpr::Var(_) | BooleanExpr::Const(_) => 0,
            BooleanExpr::Not(a) => 1 + a.depth(),
            BooleanExpr::And(a, b) | BooleanExpr::Or(a, b) | BooleanExpr::Xor(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BooleanExpr::Or(..) => 1,
            BooleanExpr::Xor(..) => 2,
            BooleanExpr::And(..) => 3,
            BooleanExpr::Not(_) => 4,
            BooleanExpr::Var(_) | BooleanExpr::Const(_) => 5,
        }
    }
}

/// Minimal-parenthesis rendering that reparses to the same tree.
impl fmt::Display for BooleanExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &BooleanExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let binary = |f: &mut fmt::Formatter<'_>, a: &BooleanExpr, b: &BooleanExpr, op: &str, p: u8| {
            // Left-associative: a right child of equal precedence needs parentheses.
            child(f, a, p)?;
            write!(f, " {op} ")?;
            child(f, b, p + 1)
        };
        match self {
            BooleanExpr::Var(v) => f.write_str(v),
            BooleanExpr::Const(c) => f.write_str(if *c { "1" } else { "0" }),
            BooleanExpr::Not(a) => {
                f.write_str("!")?;
                child(f, a, 4)
            }
            BooleanExpr::And(a, b) => binary(f, a, b, "&", 3),
            BooleanExpr::Xor(a, b) => binary(f, a, b, "^", 2),
            BooleanExpr::Or(a, b) => binary(f, a, b, "|", 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Const(bool),
    And,
    Or,
    Xor,
    Not,
    LParen,
    RParen,
}

fn describe(t: &Option<(usize, Tok)>) -> String {
    match t {
        None => "unexpected end of input".to_string(),
        Some((_, Tok::Ident(v))) => format!("unexpected identifier '{v}'"),
        Some((_, tok)) => {
            let s = match tok {
                Tok::Const(true) => "1",
                Tok::Const(false) => "0",
                Tok::And => "&",
                Tok::Or => "|",
                Tok::Xor => "^",
                Tok::Not => "!",
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Ident(_) => unreachable!(),
            };
            format!("unexpected '{s}'")
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let single = match b {
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'^' => Some(Tok::Xor),
            b'!' => Some(Tok::Not),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'0' => Some(Tok::Const(false)),
            b'1' => Some(Tok::Const(true)),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_alphabetic() || b == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ExprError::Syntax {
                offset: i,
                message: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn error_here(&self) -> ExprError {
        let cur = self.toks.get(self.pos).cloned();
        ExprError::Syntax {
            offset: cur.as_ref().map_or(self.end, |(o, _)| *o),
            message: describe(&cur),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn binary(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<BooleanExpr, ExprError>,
        build: fn(BooleanExpr, BooleanExpr) -> BooleanExpr,
    ) -> Result<BooleanExpr, ExprError> {
        let mut lhs = next(self)?;
        while self.eat(&op) {
            let rhs = next(self)?;
            lhs = build(lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::Or, Self::xor, BooleanExpr::or)
    }

    fn xor(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::Xor, Self::and, BooleanExpr::xor)
    }

    fn and(&mut self) -> Result<BooleanExpr, ExprError> {
        self.binary(Tok::And, Self::unary, BooleanExpr::and)
    }

    fn unary(&mut self) -> Result<BooleanExpr, ExprError> {
        if self.eat(&Tok::Not) {
            Ok(BooleanExpr::not(self.unary()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<BooleanExpr, ExprError> {
        let expr = match self.peek().cloned() {
            Some(Tok::Ident(v)) => BooleanExpr::Var(v),
            Some(Tok::Const(c)) => BooleanExpr::Const(c),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.or()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error_here());
                }
                return Ok(inner);
            }
            _ => return Err(self.error_here()),
        };
        self.pos += 1;
        Ok(expr)
    }
}

pub fn parse_bool_expr(text: &str) -> Result<BooleanExpr, ExprError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let expr = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.error_here());
    }
    let n = expr.variables().len();
    if n > MAX_VARIABLES {
        return Err(ExprError::TooManyVariables(n));
    }
    Ok(expr)
}
