//! Text format for polynomial systems.
//!
//! One polynomial per line in infix notation: integers, variables `x1..xk`
//! (or `x`, `y`, `z` for the first three), `+ - * ^`, parentheses, and
//! juxtaposition as multiplication (`3x^2y`). A line `lhs = rhs` means
//! `lhs - rhs`. Blank lines are skipped and `#` starts a comment.

use super::{PolySystem, Polynomial, VarietyError};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Equals,
}

pub(crate) fn variable_names(num_vars: usize) -> Vec<String> {
    if num_vars <= 3 {
        ["x", "y", "z"][..num_vars]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        (1..=num_vars).map(|i| format!("x{i}")).collect()
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            '=' => {
                out.push(Token::Equals);
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<i64>()
                    .map_err(|_| format!("integer literal {text} out of range"))?;
                out.push(Token::Num(v));
            }
            'x' | 'y' | 'z' => {
                i += 1;
                if c == 'x' && i < chars.len() && chars[i].is_ascii_digit() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    let idx: usize = text.parse().map_err(|_| format!("bad variable x{text}"))?;
                    if idx == 0 {
                        return Err("variables are numbered from x1".into());
                    }
                    out.push(Token::Var(idx - 1));
                } else {
                    out.push(Token::Var(match c {
                        'x' => 0,
                        'y' => 1,
                        _ => 2,
                    }));
                }
            }
            other => return Err(format!("unexpected character '{other}'")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    num_vars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn equation(&mut self) -> Result<Polynomial, String> {
        let lhs = self.expr()?;
        let poly = if self.peek() == Some(&Token::Equals) {
            self.bump();
            let rhs = self.expr()?;
            lhs.sub(&rhs).map_err(|e| e.to_string())?
        } else {
            lhs
        };
        match self.peek() {
            None => Ok(poly),
            Some(t) => Err(format!("unexpected {t:?}")),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, String> {
        let mut acc = Polynomial::zero(self.num_vars);
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    false
                }
                Some(Token::Minus) => {
                    self.bump();
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let term = self.term()?;
            acc = if negate {
                acc.sub(&term)
            } else {
                acc.add(&term)
            }
            .map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, String> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                }
                Some(Token::Num(_) | Token::Var(_) | Token::LParen) => {}
                _ => break,
            }
            let rhs = self.power()?;
            acc = acc.mul(&rhs).map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, String> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            match self.bump() {
                Some(Token::Num(e)) if (0..=u32::MAX as i64).contains(&e) => {
                    base.pow(e as u32).map_err(|e| e.to_string())
                }
                other => Err(format!(
                    "expected nonnegative integer exponent, found {other:?}"
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, String> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Polynomial::constant(self.num_vars, v)),
            Some(Token::Var(i)) => Ok(Polynomial::var(self.num_vars, i)),
            Some(Token::Minus) => self.power()?.neg().map_err(|e| e.to_string()),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    other => Err(format!("expected ')', found {other:?}")),
                }
            }
            other => Err(format!("expected a term, found {other:?}")),
        }
    }
}

fn max_var(tokens: &[Token]) -> Option<usize> {
    tokens
        .iter()
        .filter_map(|t| match t {
            Token::Var(i) => Some(*i),
            _ => None,
        })
        .max()
}

fn parse_tokens(tokens: &[Token], num_vars: usize) -> Result<Polynomial, String> {
    if let Some(m) = max_var(tokens) {
        if m >= num_vars {
            return Err(format!(
                "variable index {} exceeds {num_vars} variables",
                m + 1
            ));
        }
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        num_vars,
    };
    parser.equation()
}

/// Parse one polynomial in a fixed number of variables.
pub fn parse_polynomial(src: &str, num_vars: usize) -> Result<Polynomial, VarietyError> {
    let tokens = tokenize(src).map_err(|msg| VarietyError::Parse { line: 1, msg })?;
    parse_tokens(&tokens, num_vars).map_err(|msg| VarietyError::Parse { line: 1, msg })
}

/// Parse a whole system. Without an explicit variable count, the count is
/// the largest variable index used anywhere (at least 1).
pub fn parse_system(src: &str, num_vars: Option<usize>) -> Result<PolySystem, VarietyError> {
    let mut lines = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens = tokenize(body).map_err(|msg| VarietyError::Parse { line: i + 1, msg })?;
        lines.push((i + 1, tokens));
    }
    if lines.is_empty() {
        return Err(VarietyError::Parse {
            line: 0,
            msg: "no polynomials found".into(),
        });
    }
    let used = lines
        .iter()
        .filter_map(|(_, t)| max_var(t))
        .max()
        .map_or(1, |m| m + 1);
    let k = num_vars.unwrap_or(used);
    let polys = lines
        .iter()
        .map(|(line, tokens)| {
            parse_tokens(tokens, k).map_err(|msg| VarietyError::Parse { line: *line, msg })
        })
        .collect::<Result<Vec<_>, _>>()?;
    PolySystem::new(k, polys)
}
