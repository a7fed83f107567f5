//! Frobenius eigenvalues of curves from small-field point counts.
//!
//! Count predictions never touch floating point: they run through the integer
//! power sums s_n = Σ α_i^n, obtained either from the two-term recurrence
//! (genus 1) or from Newton's identities on the integer zeta numerator.
//! Complex values are used only for reporting eigenvalues and checking
//! their moduli.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::{polynomial_roots, relative_residual};
use crate::variety::CountSequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("not an elliptic-curve count: trace {a} violates a^2 <= 4p for p = {p}")]
    NotEllipticCount { p: u64, a: i64 },
    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),
    #[error("Weil bound violated: |alpha| = {modulus} but sqrt(p) = {expected}")]
    WeilBoundViolated { modulus: String, expected: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// A Frobenius eigenvalue α of an elliptic curve over F_p, stored with its
/// exact trace a = α + ᾱ. The imaginary part is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusAlpha {
    pub re: f64,
    pub im: f64,
    pub p: u64,
    pub trace_a: i64,
}

impl FrobeniusAlpha {
    /// α = (a + i√(4p − a²)) / 2 for an integer trace with a² ≤ 4p.
    pub fn from_trace(p: u64, a: i64) -> Result<Self, WeilError> {
        let disc = 4 * p as i128 - (a as i128) * (a as i128);
        if disc < 0 {
            return Err(WeilError::NotEllipticCount { p, a });
        }
        Ok(FrobeniusAlpha {
            re: a as f64 / 2.0,
            im: (disc as f64).sqrt() / 2.0,
            p,
            trace_a: a,
        })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn conj(&self) -> Complex64 {
        self.value().conj()
    }

    /// α^n by repeated multiplication; exact for Gaussian integers of
    /// moderate size such as −1 + i.
    pub fn power(&self, n: u32) -> Complex64 {
        (0..n).fold(Complex64::new(1.0, 0.0), |acc, _| acc * self.value())
    }

    /// s_n = α^n + ᾱ^n via s_n = a·s_{n−1} − p·s_{n−2}, s_0 = 2, s_1 = a.
    pub fn power_sum(&self, n: u32) -> i128 {
        let (a, p) = (self.trace_a as i128, self.p as i128);
        let (mut prev, mut cur) = (2i128, a);
        if n == 0 {
            return prev;
        }
        for _ in 1..n {
            let next = a * cur - p * prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// The eigenvalue with nonnegative imaginary part for a curve whose affine
/// count over F_p is `n1_affine`.
pub fn hasse_alpha(p: u64, n1_affine: u64) -> Result<FrobeniusAlpha, WeilError> {
    FrobeniusAlpha::from_trace(p, p as i64 - n1_affine as i64)
}

/// Affine count over F_{p^n}: p^n − α^n − ᾱ^n.
pub fn predict_affine_count(alpha: &FrobeniusAlpha, n: u32) -> i128 {
    (alpha.p as i128).pow(n) - alpha.power_sum(n)
}

/// Correction term (true count minus the main term p^n): −(α^n + ᾱ^n).
pub fn correction_term(alpha: &FrobeniusAlpha, n: u32) -> i128 {
    -alpha.power_sum(n)
}

/// The 2g Frobenius eigenvalues of a genus-g curve over F_p together with the
/// integer zeta numerator P(t) = Σ b_j t^j they are the reciprocal roots of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilNumbers {
    pub p: u64,
    pub genus: u32,
    pub roots: Vec<Complex64>,
    /// b_0..b_{2g}, b_0 = 1.
    pub numerator: Vec<i128>,
}

impl WeilNumbers {
    /// Σ α_i^n, exact, by Newton's identities on the numerator.
    pub fn power_sum(&self, n: u32) -> i128 {
        power_sums_from_numerator(&self.numerator, n)[n as usize]
    }

    /// Projective count N_n = p^n + 1 − Σ α_i^n.
    pub fn predict_projective_count(&self, n: u32) -> i128 {
        (self.p as i128).pow(n) + 1 - self.power_sum(n)
    }
}

/// Power sums s_0..s_max of the reciprocal roots of P(t) = Σ b_j t^j.
///
/// With e_k = (−1)^k b_k the elementary symmetric functions of the
/// reciprocal roots, Newton's identities read
/// s_n = −Σ_{i=1}^{min(n−1, d)} b_i s_{n−i} − n·b_n (the last term only for n ≤ d).
pub fn power_sums_from_numerator(b: &[i128], max: u32) -> Vec<i128> {
    let d = b.len() - 1;
    let mut s = vec![d as i128];
    for n in 1..=max as usize {
        let mut acc = 0i128;
        for i in 1..n.min(d + 1) {
            acc -= b[i] * s[n - i];
        }
        if n <= d {
            acc -= n as i128 * b[n];
        }
        s.push(acc);
    }
    s
}

/// Numerator coefficients b_0..b_{2g} from power sums s_1..s_g using
/// j·b_j = −Σ_{i=1}^{j} s_i b_{j−i} and b_{2g−j} = p^{g−j} b_j.
pub fn numerator_from_power_sums(p: u64, genus: u32, s: &[i128]) -> Result<Vec<i128>, WeilError> {
    let g = genus as usize;
    if s.len() < g {
        return Err(WeilError::Invalid(format!(
            "need {g} power sums, got {}",
            s.len()
        )));
    }
    let mut b = vec![0i128; 2 * g + 1];
    b[0] = 1;
    for j in 1..=g {
        let sum: i128 = (1..=j).map(|i| s[i - 1] * b[j - i]).sum();
        if sum % j as i128 != 0 {
            return Err(WeilError::InconsistentCounts(format!(
                "coefficient b_{j} = {}/{j} is not an integer",
                -sum
            )));
        }
        b[j] = -sum / j as i128;
    }
    for j in 0..g {
        b[2 * g - j] = (p as i128).pow((g - j) as u32) * b[j];
    }
    Ok(b)
}

/// Reconstruct the Frobenius eigenvalues of a genus-g curve from projective
/// counts N_1..N_g.
pub fn weil_numbers_from_counts(
    p: u64,
    genus: u32,
    counts: &CountSequence,
) -> Result<WeilNumbers, WeilError> {
    if genus == 0 {
        return Err(WeilError::Invalid("genus must be at least 1".into()));
    }
    if !counts.projective {
        return Err(WeilError::Invalid(
            "counts must use the projective convention".into(),
        ));
    }
    if counts.p != p {
        return Err(WeilError::Invalid(format!(
            "counts are over F_{}, expected F_{p}",
            counts.p
        )));
    }
    if counts.counts.len() < genus as usize {
        return Err(WeilError::Invalid(format!(
            "genus {genus} needs {genus} counts, got {}",
            counts.counts.len()
        )));
    }
    let s: Vec<i128> = (1..=genus)
        .map(|n| (p as i128).pow(n) + 1 - counts.counts[n as usize - 1] as i128)
        .collect();
    let numerator = numerator_from_power_sums(p, genus, &s)?;

    // The α_i are the roots of the reversed polynomial t^{2g} P(1/t).
    let reversed: Vec<f64> = numerator.iter().rev().map(|&c| c as f64).collect();
    let roots = polynomial_roots(&reversed);
    if let Some(worst) = roots
        .iter()
        .map(|&r| relative_residual(&reversed, r))
        .find(|&r| r > 1e-8)
    {
        return Err(WeilError::InconsistentCounts(format!(
            "root residual {worst:e} exceeds 1e-8"
        )));
    }
    let sqrt_p = (p as f64).sqrt();
    if let Some(bad) = roots.iter().find(|r| (r.norm() - sqrt_p).abs() > 1e-6) {
        return Err(WeilError::WeilBoundViolated {
            modulus: format!("{}", bad.norm()),
            expected: format!("{sqrt_p}"),
        });
    }
    Ok(WeilNumbers {
        p,
        genus,
        roots,
        numerator,
    })
}

/// Outcome of checking |α| = p^{k/2} for a set of eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhCheck {
    pub holds: bool,
    /// max_i | |α_i| − p^{k/2} | / p^{k/2}
    pub max_deviation: f64,
}

pub fn verify_weil_rh(roots: &[Complex64], p: u64, weight: u32) -> RhCheck {
    let target = (p as f64).powf(weight as f64 / 2.0);
    let max_deviation = roots
        .iter()
        .map(|r| (r.norm() - target).abs() / target)
        .fold(0.0, f64::max);
    RhCheck {
        holds: max_deviation <= 1e-9,
        max_deviation,
    }
}
