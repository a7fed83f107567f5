//! Pure motives over F_q, represented by their weight-graded Frobenius
//! eigenvalues.
//!
//! A [`Motive`] maps each weight k to a multiset of complex eigenvalues of
//! modulus q^{k/2}, closed under conjugation. Direct sum is weightwise union,
//! tensor product adds weights and multiplies eigenvalues, and the point
//! count over F_{q^n} is the signed trace Σ_k (−1)^k Σ α^n.
//!
//! Standard motives: the unit h(1) (weight 0, eigenvalue 1), the Lefschetz
//! motive L (weight 2, eigenvalue q), h(P^d) = h(1) ⊕ L ⊕ ... ⊕ L^{⊗d}, and
//! h(E) = h(1) ⊕ h¹(E) ⊕ L for an elliptic curve E. The empty motive is the
//! unit for direct sum.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weil::{FrobeniusAlpha, WeilNumbers};
use crate::zeta::{trace_formula_count, ZetaError};

const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotiveError {
    #[error("base mismatch: motives over F_{0} and F_{1}")]
    BaseMismatch(u64, u64),
    #[error("purity violated: eigenvalue {value} in weight {weight} has modulus {modulus}, expected {expected}")]
    Impure {
        value: String,
        weight: u32,
        modulus: String,
        expected: String,
    },
    #[error("weight {0} eigenvalues are not closed under conjugation")]
    NotConjugateClosed(u32),
    #[error("invalid base field size {0}")]
    InvalidBase(u64),
    #[error("cannot parse motive expression: {0}")]
    Parse(String),
    #[error(transparent)]
    Trace(#[from] ZetaError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motive {
    q: u64,
    pieces: BTreeMap<u32, Vec<Complex64>>,
}

fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

fn conjugate_closed(values: &[Complex64]) -> bool {
    let tol = 1e-9;
    let mut unmatched: Vec<Complex64> = values.to_vec();
    while let Some(v) = unmatched.pop() {
        if v.im.abs() <= tol * v.norm().max(1.0) {
            continue;
        }
        match unmatched
            .iter()
            .position(|w| (w - v.conj()).norm() <= tol * v.norm().max(1.0))
        {
            Some(i) => {
                unmatched.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

impl Motive {
    /// Build a motive, rejecting eigenvalues that violate |α| = q^{k/2} or
    /// weight pieces that are not conjugation-closed.
    pub fn new(q: u64, pieces: BTreeMap<u32, Vec<Complex64>>) -> Result<Self, MotiveError> {
        if q < 2 {
            return Err(MotiveError::InvalidBase(q));
        }
        let mut clean = BTreeMap::new();
        for (k, mut values) in pieces {
            if values.is_empty() {
                continue;
            }
            let expected = (q as f64).powf(k as f64 / 2.0);
            for v in &values {
                if (v.norm() - expected).abs() > PURITY_TOL * expected {
                    return Err(MotiveError::Impure {
                        value: format_complex(*v),
                        weight: k,
                        modulus: format!("{}", v.norm()),
                        expected: format!("{expected}"),
                    });
                }
            }
            if !conjugate_closed(&values) {
                return Err(MotiveError::NotConjugateClosed(k));
            }
            sort_eigenvalues(&mut values);
            clean.insert(k, values);
        }
        Ok(Motive { q, pieces: clean })
    }

    /// The zero motive, unit for ⊕.
    pub fn zero(q: u64) -> Self {
        Motive {
            q,
            pieces: BTreeMap::new(),
        }
    }

    /// h(1), the motive of a point; unit for ⊗.
    pub fn unit(q: u64) -> Self {
        Motive {
            q,
            pieces: BTreeMap::from([(0, vec![Complex64::new(1.0, 0.0)])]),
        }
    }

    /// The Lefschetz motive L: one weight-2 eigenvalue q.
    pub fn lefschetz(q: u64) -> Self {
        Self::lefschetz_power(q, 1)
    }

    /// L^{⊗k}: one weight-2k eigenvalue q^k.
    pub fn lefschetz_power(q: u64, k: u32) -> Self {
        Motive {
            q,
            pieces: BTreeMap::from([(2 * k, vec![Complex64::new((q as f64).powi(k as i32), 0.0)])]),
        }
    }

    pub fn base(&self) -> u64 {
        self.q
    }

    pub fn pieces(&self) -> &BTreeMap<u32, Vec<Complex64>> {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// β_k for each nonempty weight.
    pub fn betti_numbers(&self) -> BTreeMap<u32, usize> {
        self.pieces.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    fn same_base(&self, other: &Self) -> Result<(), MotiveError> {
        if self.q == other.q {
            Ok(())
        } else {
            Err(MotiveError::BaseMismatch(self.q, other.q))
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, MotiveError> {
        self.same_base(other)?;
        let mut pieces = self.pieces.clone();
        for (&k, values) in &other.pieces {
            let slot = pieces.entry(k).or_default();
            slot.extend_from_slice(values);
            sort_eigenvalues(slot);
        }
        Ok(Motive { q: self.q, pieces })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self, MotiveError> {
        self.same_base(other)?;
        let mut pieces: BTreeMap<u32, Vec<Complex64>> = BTreeMap::new();
        for (&j, a) in &self.pieces {
            for (&k, b) in &other.pieces {
                let slot = pieces.entry(j + k).or_default();
                for x in a {
                    for y in b {
                        slot.push(x * y);
                    }
                }
            }
        }
        for slot in pieces.values_mut() {
            sort_eigenvalues(slot);
        }
        Ok(Motive { q: self.q, pieces })
    }

    /// Points over F_{q^n}: Σ_k (−1)^k Σ_{α in weight k} α^n.
    pub fn point_count(&self, n: u32) -> Result<i128, MotiveError> {
        Ok(trace_formula_count(&self.pieces, n)?)
    }
}

/// h(P^dim) = h(1) ⊕ L ⊕ L^{⊗2} ⊕ ... ⊕ L^{⊗dim}.
pub fn motive_of_projective_space(dim: u32, q: u64) -> Motive {
    let pieces = (0..=dim)
        .map(|k| (2 * k, vec![Complex64::new((q as f64).powi(k as i32), 0.0)]))
        .collect();
    Motive { q, pieces }
}

/// h(E) = h(1) ⊕ h¹(E) ⊕ L with h¹(E) carrying {α, ᾱ}.
pub fn motive_of_elliptic_curve(alpha: &FrobeniusAlpha) -> Motive {
    let p = alpha.p;
    let mut h1 = vec![alpha.value(), alpha.conj()];
    sort_eigenvalues(&mut h1);
    Motive {
        q: p,
        pieces: BTreeMap::from([
            (0, vec![Complex64::new(1.0, 0.0)]),
            (1, h1),
            (2, vec![Complex64::new(p as f64, 0.0)]),
        ]),
    }
}

/// h(C) = h(1) ⊕ h¹(C) ⊕ L for a curve of any genus.
pub fn motive_of_curve(weil: &WeilNumbers) -> Result<Motive, MotiveError> {
    let p = weil.p;
    Motive::new(
        p,
        BTreeMap::from([
            (0, vec![Complex64::new(1.0, 0.0)]),
            (1, weil.roots.clone()),
            (2, vec![Complex64::new(p as f64, 0.0)]),
        ]),
    )
}

fn format_real(x: f64) -> String {
    // Normalize -0 so output is stable.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.re == 0.0 {
        format!("{}i", format_real(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
    }
}

impl fmt::Display for Motive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return writeln!(f, "zero motive");
        }
        for (k, values) in &self.pieces {
            let list: Vec<String> = values.iter().map(|&v| format_complex(v)).collect();
            writeln!(f, "weight {k}: [{}]", list.join(", "))?;
        }
        Ok(())
    }
}

/// Parse a motive expression such as `P^2`, `L^3`, `1 + L`, `P^1 * P^1`, or
/// `elliptic a=-2 p=2`. `+` (or `⊕`) is direct sum and binds looser than `*`
/// (or `⊗`), which is tensor product. `q` supplies the base field for
/// constructors that do not name one.
pub fn parse_motive(expr: &str, q: Option<u64>) -> Result<Motive, MotiveError> {
    let tokens = tokenize_motive(expr)?;
    let mut parser = MotiveParser {
        tokens: &tokens,
        pos: 0,
        q,
    };
    let m = parser.sum()?;
    if parser.pos != tokens.len() {
        return Err(MotiveError::Parse(format!(
            "unexpected '{}'",
            tokens[parser.pos]
        )));
    }
    Ok(m)
}

fn tokenize_motive(expr: &str) -> Result<Vec<String>, MotiveError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    for c in expr.chars() {
        match c {
            '+' | '⊕' | '*' | '⊗' | '(' | ')' => {
                flush(&mut cur, &mut out);
                out.push(c.to_string());
            }
            c if c.is_whitespace() => flush(&mut cur, &mut out),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut out);
    if out.is_empty() {
        return Err(MotiveError::Parse("empty expression".into()));
    }
    Ok(out)
}

struct MotiveParser<'a> {
    tokens: &'a [String],
    pos: usize,
    q: Option<u64>,
}

impl MotiveParser<'_> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn base(&self, what: &str) -> Result<u64, MotiveError> {
        self.q
            .ok_or_else(|| MotiveError::Parse(format!("{what} needs a base field size (--q)")))
    }

    fn combine(a: Motive, b: Motive, tensor: bool) -> Result<Motive, MotiveError> {
        if tensor {
            a.tensor(&b)
        } else {
            a.direct_sum(&b)
        }
    }

    fn sum(&mut self) -> Result<Motive, MotiveError> {
        let mut acc = self.product()?;
        while matches!(self.peek(), Some("+" | "⊕")) {
            self.pos += 1;
            let rhs = self.product()?;
            acc = Self::combine(acc, rhs, false)?;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Motive, MotiveError> {
        let mut acc = self.atom()?;
        while matches!(self.peek(), Some("*" | "⊗")) {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = Self::combine(acc, rhs, true)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Motive, MotiveError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| MotiveError::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        let exponent = |s: &str, prefix: &str| -> Result<u32, MotiveError> {
            s.strip_prefix(prefix)
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| MotiveError::Parse(format!("bad exponent in '{s}'")))
        };
        match tok.as_str() {
            "(" => {
                let inner = self.sum()?;
                match self.peek() {
                    Some(")") => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(MotiveError::Parse("expected ')'".into())),
                }
            }
            "0" => Ok(Motive::zero(self.base("0")?)),
            "1" | "h(1)" => Ok(Motive::unit(self.base("h(1)")?)),
            "L" => Ok(Motive::lefschetz(self.base("L")?)),
            s if s.starts_with("L^") => {
                Ok(Motive::lefschetz_power(self.base("L")?, exponent(s, "L^")?))
            }
            s if s.starts_with("P^") => Ok(motive_of_projective_space(
                exponent(s, "P^")?,
                self.base("P^n")?,
            )),
            "elliptic" => self.elliptic(),
            other => Err(MotiveError::Parse(format!("unknown constructor '{other}'"))),
        }
    }

    /// `elliptic a=<trace> p=<prime>`; `p` defaults to the base field.
    fn elliptic(&mut self) -> Result<Motive, MotiveError> {
        let mut a = None;
        let mut p = self.q;
        while let Some(tok) = self.peek() {
            if let Some(v) = tok.strip_prefix("a=") {
                a = Some(
                    v.parse::<i64>()
                        .map_err(|_| MotiveError::Parse(format!("bad trace '{v}'")))?,
                );
            } else if let Some(v) = tok.strip_prefix("p=") {
                p = Some(
                    v.parse::<u64>()
                        .map_err(|_| MotiveError::Parse(format!("bad prime '{v}'")))?,
                );
            } else {
                break;
            }
            self.pos += 1;
        }
        let a = a.ok_or_else(|| MotiveError::Parse("elliptic needs a=<trace>".into()))?;
        let p = p.ok_or_else(|| MotiveError::Parse("elliptic needs p=<prime>".into()))?;
        if !crate::finite_field::is_prime(p) {
            return Err(MotiveError::Parse(format!("p = {p} is not prime")));
        }
        if let Some(q) = self.q {
            if q != p {
                return Err(MotiveError::BaseMismatch(q, p));
            }
        }
        let alpha =
            FrobeniusAlpha::from_trace(p, a).map_err(|e| MotiveError::Parse(e.to_string()))?;
        Ok(motive_of_elliptic_curve(&alpha))
    }
}
