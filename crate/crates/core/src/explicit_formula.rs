//! The prime side: π(x) by sieve, the logarithmic integral, and Riemann's
//! explicit formula truncated at K pairs of nontrivial zeta zeros.
//!
//! The approximation is
//!
//! ```text
//! π₀(x) ≈ Σ_{m=1}^{M} μ(m)/m · f(x^{1/m}),    M = max{m : x^{1/m} ≥ 2}
//! f(y)  = li(y) − Σ_{j=1}^{K} 2·Re li(y^{ρ_j}) − ln 2 + ∫_y^∞ dt / (t(t²−1) ln t)
//! ```
//!
//! with ρ_j = 1/2 + i·t_j and li(y^ρ) = Ei(ρ ln y). Each conjugate pair of
//! zeros contributes the single real term 2·Re li(y^ρ).

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

mod quad;

pub use quad::integrate;

/// First 200 zero ordinates, bundled for the CLI default and the tests.
pub const BUNDLED_ZEROS: &str = include_str!("../data/zeros_200.txt");

const LI_ABS_TOL: f64 = 1e-12;
const LI_REL_TOL: f64 = 1e-15;
const ZERO_TERM_TOL: f64 = 1e-10;
/// Upper end of the ray integral for E1; the neglected tail is below
/// e^{-RAY_LENGTH} / |w|.
const RAY_LENGTH: f64 = 45.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplicitFormulaError {
    #[error("x = {x} is beyond the sieve limit {limit}")]
    BeyondSieve { x: f64, limit: u64 },
    #[error("divergent: li(1) is undefined")]
    Divergent,
    #[error("li needs x > 0, got {0}")]
    NonPositive(f64),
    #[error("requested {requested} zero pairs but the table has {available}")]
    TooFewZeros { requested: usize, available: usize },
    #[error("x = {0} is below 2")]
    BelowTwo(f64),
    #[error("range must be at least 3, got {0}")]
    RangeTooSmall(u64),
    #[error("zero table line {line}: cannot parse '{text}'")]
    Parse { line: usize, text: String },
    #[error("no zeros in table")]
    NoZeros,
    #[error("not increasing at line {line}: {value} after {previous}")]
    NotIncreasing {
        line: usize,
        previous: f64,
        value: f64,
    },
    #[error("ordinate {0} is not positive")]
    NonPositiveOrdinate(f64),
    #[error("first zero {0} is not within 0.01 of 14.13")]
    AnchorFailed(f64),
    #[error("cannot read zero table: {0}")]
    Io(String),
}

/// Sieve of Eratosthenes up to `limit` with per-word prefix counts.
#[derive(Debug, Clone)]
pub struct PrimeCounter {
    limit: u64,
    bits: Vec<u64>,
    /// Number of primes in words 0..i.
    prefix: Vec<u64>,
}

impl PrimeCounter {
    pub fn new(limit: u64) -> Self {
        let words = (limit / 64 + 1) as usize;
        let mut bits = vec![u64::MAX; words];
        let clear = |bits: &mut Vec<u64>, i: u64| bits[(i / 64) as usize] &= !(1u64 << (i % 64));
        clear(&mut bits, 0);
        if limit >= 1 {
            clear(&mut bits, 1);
        }
        // Bits past `limit` in the final word.
        for i in limit + 1..(words as u64) * 64 {
            clear(&mut bits, i);
        }
        let mut i = 2u64;
        while i * i <= limit {
            if bits[(i / 64) as usize] >> (i % 64) & 1 == 1 {
                let mut j = i * i;
                while j <= limit {
                    clear(&mut bits, j);
                    j += i;
                }
            }
            i += 1;
        }
        let mut prefix = Vec::with_capacity(words + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for w in &bits {
            acc += w.count_ones() as u64;
            prefix.push(acc);
        }
        PrimeCounter {
            limit,
            bits,
            prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && self.bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    /// π(n) for integer n ≤ limit.
    pub fn pi(&self, n: u64) -> u64 {
        let word = (n / 64) as usize;
        let offset = n % 64;
        let mask = if offset == 63 {
            u64::MAX
        } else {
            (1u64 << (offset + 1)) - 1
        };
        self.prefix[word] + (self.bits[word] & mask).count_ones() as u64
    }
}

/// Exact count of primes ≤ floor(x).
pub fn sieve_pi(x: f64, pc: &PrimeCounter) -> Result<u64, ExplicitFormulaError> {
    if x < 0.0 {
        return Ok(0);
    }
    let n = x.floor();
    if n > pc.limit as f64 {
        return Err(ExplicitFormulaError::BeyondSieve { x, limit: pc.limit });
    }
    Ok(pc.pi(n as u64))
}

/// Möbius function by trial division.
pub fn mobius(mut m: u64) -> i64 {
    assert!(m >= 1, "μ is defined on positive integers");
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// E1(s) = ∫_s^∞ e^{−u}/u du for real s > 0, as e^{−s} ∫_0^∞ e^{−v}/(s+v) dv.
fn e1_real(s: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (v, _) = integrate(
        |v: f64| (-v).exp() / (s + v),
        0.0,
        RAY_LENGTH,
        abs_tol * s.exp().min(1e300),
        rel_tol,
    );
    (-s).exp() * v
}

/// ∫_0^L (e^u − e^{−u})/u du = 2 Shi(L), the symmetric principal-value core.
fn symmetric_core(l: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (v, _) = integrate(
        |u: f64| {
            if u < 1e-6 {
                2.0 + u * u / 3.0
            } else {
                2.0 * u.sinh() / u
            }
        },
        0.0,
        l,
        abs_tol,
        rel_tol,
    );
    v
}

/// Principal value of ∫_0^x dt / ln t with explicit tolerances.
///
/// In the variable u = ln t the integral is PV ∫_{−∞}^{L} e^u/u du with
/// L = ln x. For x > 1 the window [−L, L] is symmetric about the
/// singularity, where the integrand pairs into 2 sinh(u)/u, and the left
/// remainder is −E1(L). For x < 1 there is no singularity and li = −E1(−L).
pub fn li_with_tolerance(x: f64, abs_tol: f64, rel_tol: f64) -> Result<f64, ExplicitFormulaError> {
    if x <= 0.0 {
        return Err(ExplicitFormulaError::NonPositive(x));
    }
    if x == 1.0 {
        return Err(ExplicitFormulaError::Divergent);
    }
    let l = x.ln();
    if l < 0.0 {
        return Ok(-e1_real(-l, abs_tol, rel_tol));
    }
    Ok(symmetric_core(l, abs_tol, rel_tol) - e1_real(l, abs_tol, rel_tol))
}

/// Principal-value logarithmic integral li(x) = PV ∫_0^x dt / ln t.
pub fn li(x: f64) -> Result<f64, ExplicitFormulaError> {
    li_with_tolerance(x, LI_ABS_TOL, LI_REL_TOL)
}

/// Ei(z) for Im z > 0, via Ei(z) = −E1(−z) + iπ and
/// E1(w) = e^{−w} ∫_0^∞ e^{−v}/(w + v) dv along the horizontal ray from w.
pub fn ei_upper(z: Complex64) -> Complex64 {
    assert!(z.im > 0.0, "ray formula needs Im z > 0");
    let w = -z;
    let (v, _) = integrate(
        |v: f64| (-v).exp() / (w + v),
        0.0,
        RAY_LENGTH,
        ZERO_TERM_TOL * 1e-3,
        1e-13,
    );
    -((-w).exp() * v) + Complex64::new(0.0, std::f64::consts::PI)
}

/// 2·Re li(y^ρ) for ρ = 1/2 + i·t, the contribution of one conjugate pair.
pub fn zero_pair_term(y: f64, ordinate: f64) -> f64 {
    let rho = Complex64::new(0.5, ordinate);
    2.0 * ei_upper(rho * y.ln()).re
}

/// ∫_y^∞ dt / (t(t²−1) ln t) = ∫_{ln y}^∞ du / (u(e^{2u} − 1)), y > 1.
pub fn trivial_zero_term(y: f64) -> f64 {
    let l = y.ln();
    let (v, _) = integrate(
        |u: f64| 1.0 / (u * (2.0 * u).exp_m1()),
        l,
        l + RAY_LENGTH,
        1e-14,
        1e-13,
    );
    v
}

/// Ordinates t_j of nontrivial zeros 1/2 + i·t_j, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
}

impl ZeroTable {
    pub fn new(ordinates: Vec<f64>) -> Result<Self, ExplicitFormulaError> {
        let first = *ordinates.first().ok_or(ExplicitFormulaError::NoZeros)?;
        for (i, w) in ordinates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(ExplicitFormulaError::NotIncreasing {
                    line: i + 2,
                    previous: w[0],
                    value: w[1],
                });
            }
        }
        if first <= 0.0 {
            return Err(ExplicitFormulaError::NonPositiveOrdinate(first));
        }
        if (first - 14.13).abs() > 0.01 {
            return Err(ExplicitFormulaError::AnchorFailed(first));
        }
        Ok(ZeroTable { ordinates })
    }

    /// Parse the text format: one decimal per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, ExplicitFormulaError> {
        let mut ordinates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let v: f64 = body.parse().map_err(|_| ExplicitFormulaError::Parse {
                line: i + 1,
                text: body.to_string(),
            })?;
            if let Some(&prev) = ordinates.last() {
                if v <= prev {
                    return Err(ExplicitFormulaError::NotIncreasing {
                        line: i + 1,
                        previous: prev,
                        value: v,
                    });
                }
            }
            ordinates.push(v);
        }
        Self::new(ordinates)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_ZEROS).expect("bundled zero table is valid")
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

pub fn load_zeros(path: &Path) -> Result<ZeroTable, ExplicitFormulaError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ExplicitFormulaError::Io(format!("{}: {e}", path.display())))?;
    ZeroTable::parse(&text)
}

/// f(y) with K zero pairs. Zero terms are evaluated in parallel and summed in
/// table order.
fn riemann_f(y: f64, zeros: &[f64]) -> Result<f64, ExplicitFormulaError> {
    let terms: Vec<f64> = zeros.par_iter().map(|&t| zero_pair_term(y, t)).collect();
    let oscillation: f64 = terms.iter().sum();
    Ok(li(y)? - oscillation - std::f64::consts::LN_2 + trivial_zero_term(y))
}

/// Largest M with x^{1/M} ≥ 2.
fn mobius_depth(x: f64) -> u32 {
    let mut m = 1;
    while x.powf(1.0 / (m + 1) as f64) >= 2.0 {
        m += 1;
    }
    m
}

/// Truncated explicit-formula approximation to π(x) with K zero pairs.
pub fn riemann_approx(x: f64, zeros: &ZeroTable, k: usize) -> Result<f64, ExplicitFormulaError> {
    if k > zeros.len() {
        return Err(ExplicitFormulaError::TooFewZeros {
            requested: k,
            available: zeros.len(),
        });
    }
    if x < 2.0 {
        return Err(ExplicitFormulaError::BelowTwo(x));
    }
    let used = &zeros.ordinates[..k];
    let mut total = 0.0;
    for m in 1..=mobius_depth(x) {
        let mu = mobius(m as u64);
        if mu == 0 {
            continue;
        }
        let y = x.powf(1.0 / m as f64);
        total += mu as f64 / m as f64 * riemann_f(y, used)?;
    }
    Ok(total)
}

/// sup over 3 ≤ n ≤ range_max of |π(n) − li(n)| / (√n ln n).
pub fn rh_bound_ratio(range_max: u64, pc: &PrimeCounter) -> Result<f64, ExplicitFormulaError> {
    if range_max < 3 {
        return Err(ExplicitFormulaError::RangeTooSmall(range_max));
    }
    if range_max > pc.limit {
        return Err(ExplicitFormulaError::BeyondSieve {
            x: range_max as f64,
            limit: pc.limit,
        });
    }
    let ratios = (3..=range_max)
        .into_par_iter()
        .map(|n| {
            let x = n as f64;
            let l = li(x)?;
            Ok((pc.pi(n) as f64 - l).abs() / (x.sqrt() * x.ln()))
        })
        .collect::<Result<Vec<f64>, ExplicitFormulaError>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}
