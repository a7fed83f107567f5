//! Local zeta functions: Z(t) = exp(Σ N_n t^n / n) as an exact power
//! series, its reconstruction as P(t) / D(t) with integer coefficients, and
//! the signed trace formula over weight-graded reciprocal roots.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::polynomial_roots;
use crate::variety::CountSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("not rational of declared shape: {0}")]
    NotRationalOfShape(String),
    #[error("insufficient or inconsistent counts: {0}")]
    InsufficientOrInconsistent(String),
    #[error("ambiguous weight: reciprocal root of modulus {0} matches no p^(k/2)")]
    AmbiguousWeight(String),
    #[error("non-integral trace sum: {0}")]
    NonIntegralTrace(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Truncated formal power series c_0 + c_1 t + ... + c_m t^m over Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl PowerSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        PowerSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Expansion of num(t) / den(t) to order `order`; den(0) must be ±1.
    pub fn from_rational(num: &[i64], den: &[i64], order: usize) -> Self {
        assert!(
            den.first().is_some_and(|d| d.abs() == 1),
            "den(0) must be a unit"
        );
        let d0 = int(den[0]);
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = int(num.get(n).copied().unwrap_or(0));
            for k in 1..den.len().min(n + 1) {
                acc -= int(den[k]) * &out[n - k];
            }
            out.push(acc / &d0);
        }
        Self::new(out)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Product truncated to the shorter of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n).fold(BigRational::zero(), |acc, k| {
                    acc + &self.coeffs[k] * &other.coeffs[n - k]
                })
            })
            .collect();
        Self::new(coeffs)
    }

    /// Formal exponential of a series with zero constant term, using
    /// n·e_n = Σ_{k=1}^{n} k·a_k·e_{n−k}.
    pub fn exp(&self) -> Result<Self, ZetaError> {
        if !self.coeffs[0].is_zero() {
            return Err(ZetaError::Invalid(
                "formal exp needs a zero constant term".into(),
            ));
        }
        let mut e = vec![BigRational::one()];
        for n in 1..=self.order() {
            let sum = (1..=n).fold(BigRational::zero(), |acc, k| {
                acc + int(k as i64) * &self.coeffs[k] * &e[n - k]
            });
            e.push(sum / int(n as i64));
        }
        Ok(Self::new(e))
    }

    /// Formal logarithm of a series with constant term 1, using
    /// n·l_n = n·c_n − Σ_{k=1}^{n−1} k·l_k·c_{n−k}.
    pub fn log(&self) -> Result<Self, ZetaError> {
        if !self.coeffs[0].is_one() {
            return Err(ZetaError::Invalid(
                "formal log needs constant term 1".into(),
            ));
        }
        let mut l = vec![BigRational::zero()];
        for n in 1..=self.order() {
            let mut acc = int(n as i64) * &self.coeffs[n];
            for (k, lk) in l.iter().enumerate().skip(1) {
                acc -= int(k as i64) * lk * &self.coeffs[n - k];
            }
            l.push(acc / int(n as i64));
        }
        Ok(Self::new(l))
    }

    /// Coefficients as integers, when they all are.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| match n {
                0 => format!("{c}"),
                1 => format!("{c}t"),
                _ => format!("{c}t^{n}"),
            })
            .collect();
        write!(f, "{} + O(t^{})", terms.join(" + "), self.order() + 1)
    }
}

/// exp(Σ_{n=1}^{m} N_n t^n / n), truncated at order m.
pub fn zeta_series(counts: &CountSequence) -> Result<PowerSeries, ZetaError> {
    if counts.counts.is_empty() {
        return Err(ZetaError::Invalid("empty count sequence".into()));
    }
    let mut log = vec![BigRational::zero()];
    for (i, &n) in counts.counts.iter().enumerate() {
        let k = i as i64 + 1;
        log.push(BigRational::new(BigInt::from(n), BigInt::from(k)));
    }
    PowerSeries::new(log).exp()
}

/// (1 − t)(1 − q t), the denominator shared by every curve over F_q.
pub fn curve_denominator(q: u64) -> Vec<i64> {
    vec![1, -(q as i64 + 1), q as i64]
}

/// A reciprocal root of the numerator or denominator with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedRoot {
    pub re: f64,
    pub im: f64,
    pub weight: u32,
}

impl WeightedRoot {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Z(t) = P(t) / D(t) with integer coefficients and weighted reciprocal roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalZeta {
    pub q: u64,
    pub numerator: Vec<i64>,
    pub denominator: Vec<i64>,
    pub numerator_roots: Vec<WeightedRoot>,
    pub denominator_roots: Vec<WeightedRoot>,
}

impl RationalZeta {
    /// Reciprocal roots grouped by weight: numerator roots and denominator
    /// roots together, in the layout the trace formula consumes.
    pub fn weight_table(&self) -> BTreeMap<u32, Vec<Complex64>> {
        let mut table: BTreeMap<u32, Vec<Complex64>> = BTreeMap::new();
        for r in self.numerator_roots.iter().chain(&self.denominator_roots) {
            table.entry(r.weight).or_default().push(r.value());
        }
        table
    }

    /// β_k, the number of weight-k reciprocal roots.
    pub fn betti_numbers(&self) -> BTreeMap<u32, usize> {
        self.weight_table()
            .into_iter()
            .map(|(k, v)| (k, v.len()))
            .collect()
    }

    /// Re-expand P/D as a power series to `order`.
    pub fn expand(&self, order: usize) -> PowerSeries {
        PowerSeries::from_rational(&self.numerator, &self.denominator, order)
    }
}

fn format_poly(coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        match (j, mag) {
            (0, _) => out.push_str(&mag.to_string()),
            (1, 1) => out.push('t'),
            (1, _) => out.push_str(&format!("{mag}t")),
            (_, 1) => out.push_str(&format!("t^{j}")),
            (_, _) => out.push_str(&format!("{mag}t^{j}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for RationalZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = if self.denominator == curve_denominator(self.q) {
            format!("(1 - t)(1 - {}t)", self.q)
        } else {
            format_poly(&self.denominator)
        };
        write!(f, "({}) / ({})", format_poly(&self.numerator), den)
    }
}

/// Weight k with | |r| − q^{k/2} | < 0.1·q^{k/2}.
pub fn assign_weight(root: Complex64, q: u64) -> Result<u32, ZetaError> {
    let modulus = root.norm();
    let log_q = (q as f64).ln();
    let guess = (2.0 * modulus.ln() / log_q).round();
    let matches: Vec<u32> = [guess - 1.0, guess, guess + 1.0]
        .into_iter()
        .filter(|&k| k >= 0.0)
        .filter(|&k| {
            let target = (q as f64).powf(k / 2.0);
            (modulus - target).abs() < 0.1 * target
        })
        .map(|k| k as u32)
        .collect();
    match matches.as_slice() {
        [k] => Ok(*k),
        _ => Err(ZetaError::AmbiguousWeight(format!("{modulus}"))),
    }
}

fn reciprocal_roots(coeffs: &[i64], q: u64) -> Result<Vec<WeightedRoot>, ZetaError> {
    let reversed: Vec<f64> = coeffs.iter().rev().map(|&c| c as f64).collect();
    polynomial_roots(&reversed)
        .into_iter()
        .map(|r| {
            Ok(WeightedRoot {
                re: r.re,
                im: r.im,
                weight: assign_weight(r, q)?,
            })
        })
        .collect()
}

/// Solve P(t) = s(t)·D(t) mod t^{d+1} for the integer numerator, then check
/// every remaining coefficient of s·D vanishes.
pub fn rational_reconstruct(
    series: &PowerSeries,
    num_degree: usize,
    den: &[i64],
    q: u64,
) -> Result<RationalZeta, ZetaError> {
    let den_degree = den.len().saturating_sub(1);
    let needed = num_degree + den_degree + 2;
    if series.order() < needed {
        return Err(ZetaError::InsufficientOrInconsistent(format!(
            "series order {} < {needed} needed to determine and cross-check the numerator",
            series.order()
        )));
    }
    if den.first() != Some(&1) {
        return Err(ZetaError::Invalid(
            "denominator must satisfy D(0) = 1".into(),
        ));
    }
    let den_series = PowerSeries::new(
        (0..=series.order())
            .map(|j| int(den.get(j).copied().unwrap_or(0)))
            .collect(),
    );
    let product = series.mul(&den_series);
    let mut numerator = Vec::with_capacity(num_degree + 1);
    for (j, c) in product.coeffs()[..=num_degree].iter().enumerate() {
        if !c.is_integer() {
            return Err(ZetaError::NotRationalOfShape(format!(
                "numerator coefficient b_{j} = {c} is not an integer"
            )));
        }
        let v = c.to_integer().to_i64().ok_or_else(|| {
            ZetaError::NotRationalOfShape(format!("numerator coefficient b_{j} overflows"))
        })?;
        numerator.push(v);
    }
    if let Some((j, c)) = product
        .coeffs()
        .iter()
        .enumerate()
        .skip(num_degree + 1)
        .find(|(_, c)| !c.is_zero())
    {
        return Err(ZetaError::InsufficientOrInconsistent(format!(
            "coefficient of t^{j} in s(t)D(t) is {c}, expected 0"
        )));
    }
    if numerator[0] != 1 {
        return Err(ZetaError::NotRationalOfShape(format!(
            "P(0) = {} instead of 1",
            numerator[0]
        )));
    }
    Ok(RationalZeta {
        q,
        numerator_roots: reciprocal_roots(&numerator, q)?,
        denominator_roots: reciprocal_roots(den, q)?,
        numerator,
        denominator: den.to_vec(),
    })
}

/// Σ_k (−1)^k Σ_i α_{ik}^n, required to be an integer within 1e-6.
pub fn trace_formula_count(
    table: &BTreeMap<u32, Vec<Complex64>>,
    n: u32,
) -> Result<i128, ZetaError> {
    let total: Complex64 = table
        .iter()
        .map(|(&k, alphas)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            alphas.iter().map(|a| a.powu(n)).sum::<Complex64>() * sign
        })
        .sum();
    let rounded = total.re.round();
    if total.im.abs() > 1e-6 || (total.re - rounded).abs() > 1e-6 {
        return Err(ZetaError::NonIntegralTrace(format!(
            "{} + {}i at n = {n}",
            total.re, total.im
        )));
    }
    Ok(rounded as i128)
}

/// Coefficients as `i64`, when the series is integral and they fit.
pub fn integer_coefficients(series: &PowerSeries) -> Option<Vec<i64>> {
    series
        .to_integers()?
        .into_iter()
        .map(|c| c.to_i64())
        .collect()
}

/// True when every coefficient of `a` and `b` agrees up to the shorter order.
pub fn series_agree(a: &PowerSeries, b: &PowerSeries) -> bool {
    let order = a.order().min(b.order());
    (0..=order).all(|n| a.coeffs()[n] == b.coeffs()[n])
}

/// Largest |a_n − b_n| up to the shorter order.
pub fn max_abs_difference(a: &PowerSeries, b: &PowerSeries) -> BigRational {
    let order = a.order().min(b.order());
    (0..=order)
        .map(|n| (&a.coeffs()[n] - &b.coeffs()[n]).abs())
        .fold(BigRational::zero(), |acc, d| if d > acc { d } else { acc })
}
