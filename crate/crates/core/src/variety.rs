//! Polynomial systems with integer coefficients and brute-force point counts
//! over finite fields.
//!
//! Affine counts enumerate F_q^k. Projective counts enumerate normalized
//! representatives: the first nonzero coordinate, scanning left to right,
//! is 1. Enumeration of the last coordinate is the inner loop; every other
//! coordinate is fixed per task, so each polynomial collapses to a univariate
//! polynomial before the inner loop runs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{FieldContext, FieldError, FieldSpec};

mod parse;

pub use parse::{parse_polynomial, parse_system};

/// Default cap on enumerated tuples.
pub const DEFAULT_WORK_LIMIT: u64 = 1 << 28;

/// Inner-loop chunk length; tasks never straddle more than one outer tuple.
const INNER_CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("search space too large: {size} tuples exceeds work limit {limit}")]
    SearchSpaceTooLarge { size: String, limit: u64 },
    #[error("not homogeneous: polynomial {0}")]
    NotHomogeneous(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("coefficient overflow")]
    CoefficientOverflow,
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A polynomial with integer coefficients, stored as exponent vector ->
/// coefficient with zero coefficients removed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: i64) -> Self {
        let mut p = Self::zero(num_vars);
        if c != 0 {
            p.terms.insert(vec![0; num_vars], c);
        }
        p
    }

    /// The variable x_{index} (zero-based).
    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        let mut p = Self::zero(num_vars);
        p.terms.insert(exps, 1);
        p
    }

    /// Build from (exponents, coefficient) pairs, merging duplicates.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, VarietyError>
    where
        I: IntoIterator<Item = (Vec<u32>, i64)>,
    {
        let mut p = Self::zero(num_vars);
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(VarietyError::Invalid(format!(
                    "exponent vector {exps:?} has length {}, expected {num_vars}",
                    exps.len()
                )));
            }
            p.add_term(exps, c)?;
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: i64) -> Result<(), VarietyError> {
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = entry
            .checked_add(c)
            .ok_or(VarietyError::CoefficientOverflow)?;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], i64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, VarietyError> {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Result<Self, VarietyError> {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, VarietyError> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, k: i64) -> Result<Self, VarietyError> {
        let mut out = Self::zero(self.num_vars);
        for (e, &c) in &self.terms {
            let v = c.checked_mul(k).ok_or(VarietyError::CoefficientOverflow)?;
            out.add_term(e.clone(), v)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, VarietyError> {
        let mut out = Self::zero(self.num_vars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let c = ca
                    .checked_mul(cb)
                    .ok_or(VarietyError::CoefficientOverflow)?;
                out.add_term(exps, c)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, VarietyError> {
        let mut out = Self::constant(self.num_vars, 1);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Set the first `zeroed` variables to 0 and variable `zeroed` to 1,
    /// leaving a polynomial in the remaining trailing variables.
    fn restrict_to_chart(&self, zeroed: usize) -> Result<Self, VarietyError> {
        let remaining = self.num_vars - zeroed - 1;
        let mut out = Self::zero(remaining);
        for (e, &c) in &self.terms {
            if e[..zeroed].iter().any(|&x| x > 0) {
                continue;
            }
            out.add_term(e[zeroed + 1..].to_vec(), c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = parse::variable_names(self.num_vars);
        // Highest total degree first for readability.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (exps, &c)) in terms.into_iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.unsigned_abs();
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| match e {
                    1 => names[v].clone(),
                    _ => format!("{}^{}", names[v], e),
                })
                .collect();
            match (mag, vars.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                (_, false) => write!(f, "{mag}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// A system of polynomial equations `f_i = 0` in `num_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySystem {
    num_vars: usize,
    polys: Vec<Polynomial>,
    homogeneous: bool,
}

impl PolySystem {
    pub fn new(num_vars: usize, polys: Vec<Polynomial>) -> Result<Self, VarietyError> {
        if num_vars == 0 {
            return Err(VarietyError::Invalid(
                "at least one variable required".into(),
            ));
        }
        if let Some(bad) = polys.iter().find(|p| p.num_vars != num_vars) {
            return Err(VarietyError::Invalid(format!(
                "polynomial in {} variables inside a {num_vars}-variable system",
                bad.num_vars
            )));
        }
        Ok(PolySystem {
            num_vars,
            polys,
            homogeneous: false,
        })
    }

    /// Mark the system as defining a projective variety; every polynomial
    /// must be homogeneous.
    pub fn homogeneous(num_vars: usize, polys: Vec<Polynomial>) -> Result<Self, VarietyError> {
        let mut sys = Self::new(num_vars, polys)?;
        if let Some(i) = sys.polys.iter().position(|p| !p.is_homogeneous()) {
            return Err(VarietyError::NotHomogeneous(i + 1));
        }
        sys.homogeneous = true;
        Ok(sys)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }
}

/// Counting knobs: work cap, worker threads (1 = serial), and whether to
/// skip the separable-equation shortcut and enumerate all of F_q^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub work_limit: u64,
    pub workers: usize,
    pub exhaustive: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            work_limit: DEFAULT_WORK_LIMIT,
            workers: 1,
            exhaustive: false,
        }
    }
}

impl CountOptions {
    pub fn with_workers(workers: usize) -> Self {
        CountOptions {
            workers,
            ..Default::default()
        }
    }
}

/// Point counts N_1..N_m over F_{p^1}..F_{p^m}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSequence {
    pub p: u64,
    pub counts: Vec<u64>,
    pub projective: bool,
}

impl CountSequence {
    pub fn new(p: u64, counts: Vec<u64>, projective: bool) -> Result<Self, VarietyError> {
        if counts.is_empty() {
            return Err(VarietyError::Invalid(
                "count sequence must be nonempty".into(),
            ));
        }
        Ok(CountSequence {
            p,
            counts,
            projective,
        })
    }

    /// Shift affine curve counts to projective ones by adding `extra` points
    /// at infinity over every extension.
    pub fn with_points_at_infinity(&self, extra: u64) -> Self {
        CountSequence {
            p: self.p,
            counts: self.counts.iter().map(|c| c + extra).collect(),
            projective: true,
        }
    }
}

/// A polynomial with coefficients already mapped into the field.
struct CompiledPoly {
    /// (coefficient, exponents of the leading variables, exponent of the last)
    terms: Vec<(u32, Vec<u32>, u32)>,
    last_degree: usize,
}

fn compile(poly: &Polynomial, ctx: &FieldContext) -> CompiledPoly {
    let terms: Vec<_> = poly
        .terms()
        .filter_map(|(e, c)| {
            let c = ctx.from_int(c);
            (c != 0).then(|| {
                let (last, lead) = e.split_last().map_or((0, &[][..]), |(l, r)| (*l, r));
                (c, lead.to_vec(), last)
            })
        })
        .collect();
    let last_degree = terms.iter().map(|t| t.2 as usize).max().unwrap_or(0);
    CompiledPoly { terms, last_degree }
}

fn checked_space(q: u64, vars: usize, limit: u64) -> Result<u64, VarietyError> {
    let size = (q as u128).checked_pow(vars as u32);
    match size {
        Some(s) if s <= limit as u128 => Ok(s as u64),
        _ => Err(VarietyError::SearchSpaceTooLarge {
            size: format!("{q}^{vars}"),
            limit,
        }),
    }
}

/// Count common zeros of compiled polynomials on F_q^vars.
fn count_compiled(polys: &[CompiledPoly], vars: usize, ctx: &FieldContext, workers: usize) -> u64 {
    let q = ctx.q() as u64;
    if vars == 0 {
        let all_vanish = polys.iter().all(|p| p.terms.is_empty());
        return all_vanish as u64;
    }
    let outer = q.pow(vars as u32 - 1);
    let chunks_per_row = q.div_ceil(INNER_CHUNK);
    let tasks = outer * chunks_per_row;

    let task = |t: u64| -> u64 {
        let row = t / chunks_per_row;
        let chunk = t % chunks_per_row;
        // Leading coordinates from the base-q digits of `row`.
        let mut lead = vec![0u32; vars - 1];
        let mut rest = row;
        for v in lead.iter_mut().rev() {
            *v = (rest % q) as u32;
            rest /= q;
        }
        let univariate: Vec<Vec<u32>> = polys
            .iter()
            .map(|p| {
                let mut coeffs = vec![0u32; p.last_degree + 1];
                for (c, exps, last) in &p.terms {
                    let mut m = *c;
                    for (&x, &e) in lead.iter().zip(exps) {
                        if e > 0 {
                            m = ctx.mul(m, ctx.pow(x, e));
                        }
                    }
                    let slot = &mut coeffs[*last as usize];
                    *slot = ctx.add(*slot, m);
                }
                coeffs
            })
            .collect();
        let start = chunk * INNER_CHUNK;
        let end = (start + INNER_CHUNK).min(q);
        (start..end)
            .filter(|&y| {
                let y = y as u32;
                univariate.iter().all(|coeffs| {
                    coeffs
                        .iter()
                        .rev()
                        .fold(0u32, |acc, &c| ctx.add(ctx.mul(acc, y), c))
                        == 0
                })
            })
            .count() as u64
    };

    run_tasks(tasks, workers, task)
}

/// Coefficient and exponents of the leading variables.
type Monomial = (u32, Vec<u32>);

/// A single polynomial of the form A(last) + B(leading variables) splits the
/// count into a histogram of A over F_q and one lookup per leading tuple.
/// Returns (A coefficients by degree, B terms) when the split applies.
fn split_separable(poly: &CompiledPoly) -> Option<(Vec<u32>, Vec<Monomial>)> {
    let mut a = vec![0u32; poly.last_degree + 1];
    let mut b = Vec::new();
    for (c, lead, last) in &poly.terms {
        let mixed = lead.iter().any(|&e| e > 0);
        match (mixed, *last) {
            (true, 0) | (false, 0) => b.push((*c, lead.clone())),
            (false, d) => a[d as usize] = *c,
            (true, _) => return None,
        }
    }
    Some((a, b))
}

fn run_tasks<F: Fn(u64) -> u64 + Sync + Send>(tasks: u64, workers: usize, task: F) -> u64 {
    // A single task gains nothing from a pool.
    if workers <= 1 || tasks <= 1 {
        (0..tasks).map(task).sum()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| (0..tasks).into_par_iter().map(task).sum())
    }
}

/// Count zeros of A(y) + B(x) on F_q^vars, where y is the last variable.
fn count_separable(
    a: &[u32],
    b: &[Monomial],
    vars: usize,
    ctx: &FieldContext,
    workers: usize,
) -> u64 {
    let q = ctx.q() as u64;
    let mut hist = vec![0u32; q as usize];
    for y in 0..q as u32 {
        let v = a
            .iter()
            .rev()
            .fold(0u32, |acc, &c| ctx.add(ctx.mul(acc, y), c));
        hist[v as usize] += 1;
    }
    let outer = q.pow(vars as u32 - 1);
    let tasks = outer.div_ceil(INNER_CHUNK);
    run_tasks(tasks, workers, |t| {
        let start = t * INNER_CHUNK;
        let end = (start + INNER_CHUNK).min(outer);
        let mut lead = vec![0u32; vars - 1];
        (start..end)
            .map(|row| {
                let mut rest = row;
                for v in lead.iter_mut().rev() {
                    *v = (rest % q) as u32;
                    rest /= q;
                }
                let value = b.iter().fold(0u32, |acc, (c, exps)| {
                    let m = lead
                        .iter()
                        .zip(exps)
                        .filter(|(_, &e)| e > 0)
                        .fold(*c, |m, (&x, &e)| ctx.mul(m, ctx.pow(x, e)));
                    ctx.add(acc, m)
                });
                hist[ctx.neg(value) as usize] as u64
            })
            .sum()
    })
}

/// Largest field for which a separable equation is counted by histogram.
const HISTOGRAM_LIMIT: u64 = 1 << 22;

/// Number of points of F_q^k where every polynomial of the system vanishes.
///
/// A single equation A(x_k) = B(x_1..x_{k-1}), such as y^2 + y = f(x), costs
/// q^{k-1} + q operations rather than q^k, and the work limit applies to that
/// reduced cost.
pub fn count_affine(
    sys: &PolySystem,
    field: &Arc<FieldSpec>,
    opts: CountOptions,
) -> Result<u64, VarietyError> {
    let q = field.q();
    let ctx = FieldContext::new(field);
    let compiled: Vec<_> = sys.polys.iter().map(|p| compile(p, &ctx)).collect();
    let shortcut = !opts.exhaustive && sys.num_vars >= 2 && q <= HISTOGRAM_LIMIT;
    if let ([only], true) = (&compiled[..], shortcut) {
        if let Some((a, b)) = split_separable(only) {
            let lead = checked_space(q, sys.num_vars - 1, opts.work_limit)?;
            if lead.saturating_add(q) > opts.work_limit {
                return Err(VarietyError::SearchSpaceTooLarge {
                    size: format!("{q}^{} + {q}", sys.num_vars - 1),
                    limit: opts.work_limit,
                });
            }
            return Ok(count_separable(&a, &b, sys.num_vars, &ctx, opts.workers));
        }
    }
    checked_space(q, sys.num_vars, opts.work_limit)?;
    Ok(count_compiled(&compiled, sys.num_vars, &ctx, opts.workers))
}

/// Number of points of P^{k-1}(F_q) where every (homogeneous) polynomial of
/// the system vanishes.
pub fn count_projective_variety(
    sys: &PolySystem,
    field: &Arc<FieldSpec>,
    opts: CountOptions,
) -> Result<u64, VarietyError> {
    if let Some(i) = sys.polys.iter().position(|p| !p.is_homogeneous()) {
        return Err(VarietyError::NotHomogeneous(i + 1));
    }
    checked_space(field.q(), sys.num_vars - 1, opts.work_limit)?;
    let ctx = FieldContext::new(field);
    let mut total = 0;
    for zeroed in 0..sys.num_vars {
        let chart = sys
            .polys
            .iter()
            .map(|p| Ok(compile(&p.restrict_to_chart(zeroed)?, &ctx)))
            .collect::<Result<Vec<_>, VarietyError>>()?;
        total += count_compiled(&chart, sys.num_vars - zeroed - 1, &ctx, opts.workers);
    }
    Ok(total)
}

/// 1 + q + ... + q^dim.
pub fn projective_space_closed_form(q: u64, dim: u32) -> u64 {
    (0..=dim).map(|k| q.pow(k)).sum()
}

/// |P^dim(F_q)|, by walking normalized representatives and checked against
/// the closed form. Spaces above the default work limit use the closed form.
pub fn count_projective_space(dim: u32, field: &FieldSpec) -> u64 {
    let q = field.q();
    let closed = projective_space_closed_form(q, dim);
    if closed > DEFAULT_WORK_LIMIT {
        return closed;
    }
    let mut walked = 0u64;
    for lead in 0..=dim {
        // Coordinates before `lead` are 0, coordinate `lead` is 1; the
        // remaining dim - lead coordinates range over F_q.
        let mut tail = vec![0u64; (dim - lead) as usize];
        loop {
            walked += 1;
            let mut i = 0;
            while i < tail.len() {
                tail[i] += 1;
                if tail[i] < q {
                    break;
                }
                tail[i] = 0;
                i += 1;
            }
            if i == tail.len() {
                break;
            }
        }
    }
    assert_eq!(
        walked, closed,
        "projective enumeration disagrees with 1 + q + ... + q^dim"
    );
    walked
}

/// Counts over F_{p^1}..F_{p^m}, affine or projective.
pub fn count_sequence(
    sys: &PolySystem,
    p: u64,
    m: u32,
    projective: bool,
    opts: CountOptions,
) -> Result<CountSequence, VarietyError> {
    let counts = (1..=m)
        .map(|n| {
            let field = crate::finite_field::make_field(p, n)?;
            if projective {
                count_projective_variety(sys, &field, opts)
            } else {
                count_affine(sys, &field, opts)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    CountSequence::new(p, counts, projective)
}
