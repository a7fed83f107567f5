//! Arithmetic in prime fields F_p and their extensions F_{p^n}.
//!
//! An extension field is F_p[x]/(f) where `f` is the lexicographically
//! smallest monic irreducible polynomial of degree `n` (coefficients compared
//! from the constant term upward). Elements are dense coefficient vectors.
//!
//! Two arithmetic paths exist:
//! - [`FFElement`], the value type with exact polynomial arithmetic and
//!   inversion by the extended Euclidean algorithm;
//! - [`FieldContext`], a packed-integer view used by the point counters,
//!   with log/exp tables for multiplication when the field is small enough.
//!
//! The two are cross-checked against each other in the tests.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Largest field cardinality accepted for full enumeration.
pub const MAX_FIELD_SIZE: u64 = 1 << 26;

/// Fields up to this size get log/exp multiplication tables.
const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("not prime: {0}")]
    NotPrime(u64),
    #[error("field too large: {p}^{n} exceeds 2^26 elements")]
    TooLarge { p: u64, n: u32 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("field mismatch")]
    FieldMismatch,
    #[error("invalid element: {0}")]
    InvalidElement(String),
}

/// Deterministic primality by trial division; inputs here are below 2^32.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over F_p, little-endian, with no trailing zeros.
/// The zero polynomial is the empty vector.
pub(crate) mod fp_poly {
    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.len().checked_sub(1)
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    /// Quotient and remainder of `a` by nonzero `b`.
    pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = inv_mod(b[db], p);
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = r[dr] * lead_inv % p;
            let shift = dr - db;
            q[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - c * bj % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
        div_rem(a, b, p).1
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_poly_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
        let mut result = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn monic(a: Poly, p: u64) -> Poly {
        match a.last() {
            Some(&lead) if lead != 1 => {
                let inv = inv_mod(lead, p);
                a.into_iter().map(|c| c * inv % p).collect()
            }
            _ => a,
        }
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        monic(x, p)
    }

    /// Inverse of `a` modulo irreducible `m`, or `None` when `a` is zero.
    pub fn inverse(a: &[u64], m: &[u64], p: u64) -> Option<Poly> {
        let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
        if r1.is_empty() {
            return None;
        }
        while !r1.is_empty() {
            let (q, r) = div_rem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant when m is irreducible.
        if r0.len() != 1 {
            return None;
        }
        let c = inv_mod(r0[0], p);
        Some(rem(&s0.iter().map(|x| x * c % p).collect::<Vec<_>>(), m, p))
    }

    /// x^(p^k) mod m, by k successive p-th powers.
    pub fn frobenius_x(k: u32, m: &[u64], p: u64) -> Poly {
        let mut acc = rem(&[0, 1], m, p);
        for _ in 0..k {
            acc = pow_poly_mod(&acc, p, m, p);
        }
        acc
    }
}

/// Rabin's irreducibility test for a monic polynomial of degree `n ≥ 1`
/// over F_p (little-endian coefficients).
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let f = fp_poly::trim(poly.iter().map(|c| c % p).collect());
    let n = match fp_poly::degree(&f) {
        Some(0) | None => return false,
        Some(d) => d as u32,
    };
    let x = vec![0, 1];
    let full = fp_poly::frobenius_x(n, &f, p);
    if fp_poly::sub(&full, &fp_poly::rem(&x, &f, p), p) != Vec::<u64>::new() {
        return false;
    }
    prime_factors(n as u64).into_iter().all(|r| {
        let h = fp_poly::frobenius_x(n / r as u32, &f, p);
        let diff = fp_poly::sub(&h, &x, p);
        fp_poly::gcd(&diff, &f, p) == vec![1]
    })
}

/// A finite field F_{p^n} with its defining modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    n: u32,
    /// Little-endian, monic, length n + 1.
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Build F_{p^n} using the lexicographically smallest monic irreducible
    /// modulus of degree `n`.
    pub fn new(p: u64, n: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        match p.checked_pow(n) {
            Some(q) if q <= MAX_FIELD_SIZE => {}
            _ => return Err(FieldError::TooLarge { p, n }),
        }
        let modulus = smallest_irreducible(p, n);
        Ok(FieldSpec { p, n, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Cardinality q = p^n.
    pub fn q(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// All q elements, in lexicographic order of coefficient vectors
    /// (constant coefficient most significant).
    pub fn enumerate(self: &Arc<Self>) -> impl Iterator<Item = FFElement> + '_ {
        let n = self.n as usize;
        let p = self.p;
        (0..self.q()).map(move |idx| {
            let mut coeffs = vec![0u64; n];
            let mut rest = idx;
            for c in coeffs.iter_mut().rev() {
                *c = rest % p;
                rest /= p;
            }
            FFElement {
                field: Arc::clone(self),
                coeffs,
            }
        })
    }

    pub fn zero(self: &Arc<Self>) -> FFElement {
        FFElement {
            field: Arc::clone(self),
            coeffs: vec![0; self.n as usize],
        }
    }

    pub fn one(self: &Arc<Self>) -> FFElement {
        self.constant(1)
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn constant(self: &Arc<Self>, c: i64) -> FFElement {
        let mut coeffs = vec![0; self.n as usize];
        coeffs[0] = c.rem_euclid(self.p as i64) as u64;
        FFElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// The class of the indeterminate x (equal to -modulus[0] when n = 1).
    pub fn generator_x(self: &Arc<Self>) -> FFElement {
        let poly = fp_poly::rem(&[0, 1], &self.modulus, self.p);
        FFElement::from_poly(self, poly)
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<u64>) -> Result<FFElement, FieldError> {
        if coeffs.len() != self.n as usize {
            return Err(FieldError::InvalidElement(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::InvalidElement(format!(
                "coefficient {c} not in [0, {})",
                self.p
            )));
        }
        Ok(FFElement {
            field: Arc::clone(self),
            coeffs,
        })
    }
}

/// Convenience constructor returning a shareable handle.
pub fn make_field(p: u64, n: u32) -> Result<Arc<FieldSpec>, FieldError> {
    FieldSpec::new(p, n).map(Arc::new)
}

/// True when `f` has an irreducible factor of degree at most 3 (short of `f`
/// itself). Rejects most reducible candidates before the full Rabin test.
fn has_small_factor(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    let x = vec![0, 1];
    let mut frob = fp_poly::rem(&x, f, p);
    for _ in 1..=(n / 2).min(3) {
        frob = fp_poly::pow_poly_mod(&frob, p, f, p);
        if fp_poly::gcd(&fp_poly::sub(&frob, &x, p), f, p) != vec![1] {
            return true;
        }
    }
    false
}

fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    let total = p.pow(n as u32);
    // Index digits: c0 is the most significant, so counting up walks the
    // lexicographic order with the constant term compared first.
    // Candidates with c0 = 0 are divisible by x, so start at c0 = 1.
    let start = if n > 1 { total / p } else { 0 };
    for idx in start..total {
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        let mut rest = idx;
        for c in coeffs[..n].iter_mut().rev() {
            *c = rest % p;
            rest /= p;
        }
        if has_small_factor(&coeffs, p) {
            continue;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Arithmetic operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Raise the left operand to a nonnegative power; the right operand is
    /// ignored.
    Pow(u64),
}

/// An element of F_{p^n}: coefficients c_0..c_{n-1} of a residue polynomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FFElement {
    field: Arc<FieldSpec>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FFElement({:?} mod {:?})",
            self.coeffs, self.field.modulus
        )
    }
}

impl FFElement {
    fn from_poly(field: &Arc<FieldSpec>, poly: Vec<u64>) -> Self {
        let mut coeffs = poly;
        coeffs.resize(field.n as usize, 0);
        FFElement {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(FFElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let p = self.field.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FFElement {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let f = &self.field;
        let prod = fp_poly::mul_mod(
            &fp_poly::trim(self.coeffs.clone()),
            &fp_poly::trim(other.coeffs.clone()),
            &f.modulus,
            f.p,
        );
        Ok(Self::from_poly(f, prod))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let f = &self.field;
        fp_poly::inverse(&fp_poly::trim(self.coeffs.clone()), &f.modulus, f.p)
            .map(|poly| Self::from_poly(f, poly))
            .ok_or(FieldError::ZeroDivisor)
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        result
    }

    /// Packed index Σ c_i p^i used by [`FieldContext`].
    pub fn index(&self) -> u32 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.field.p + c) as u32
    }
}

/// Binary field operation on two elements of the same field.
pub fn arith(a: &FFElement, b: &FFElement, op: ArithOp) -> Result<FFElement, FieldError> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
        ArithOp::Pow(e) => Ok(a.pow(e)),
    }
}

/// Packed-integer arithmetic for a fixed field, shared read-only by counting
/// workers. Element `e` is the integer Σ c_i p^i.
#[derive(Debug)]
pub struct FieldContext {
    spec: Arc<FieldSpec>,
    q: u32,
    /// exp[i] = g^i for i in 0..2(q-1); log[e] for e != 0.
    tables: Option<Arc<Tables>>,
}

type Tables = (Vec<u32>, Vec<u32>);

/// Tables cached per field so repeated counts over the same F_q (one per
/// curve in a sweep) build them once. Bounded to a handful of fields.
fn cached_tables(spec: &Arc<FieldSpec>) -> Arc<Tables> {
    const CACHE_CAPACITY: usize = 16;
    static CACHE: OnceLock<Mutex<HashMap<FieldSpec, Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("table cache").get(spec.as_ref()) {
        return Arc::clone(t);
    }
    let built = Arc::new(build_tables(spec));
    let mut guard = cache.lock().expect("table cache");
    if guard.len() >= CACHE_CAPACITY {
        guard.clear();
    }
    guard.insert(spec.as_ref().clone(), Arc::clone(&built));
    built
}

impl FieldContext {
    pub fn new(spec: &Arc<FieldSpec>) -> Self {
        let q = spec.q();
        let tables = (q <= TABLE_LIMIT).then(|| cached_tables(spec));
        FieldContext {
            spec: Arc::clone(spec),
            q: q as u32,
            tables,
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn from_int(&self, c: i64) -> u32 {
        c.rem_euclid(self.spec.p as i64) as u32
    }

    pub fn to_element(&self, e: u32) -> FFElement {
        let p = self.spec.p;
        let mut rest = e as u64;
        let coeffs = (0..self.spec.n)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect();
        FFElement {
            field: Arc::clone(&self.spec),
            coeffs,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p as u32;
        if p == 2 {
            return a ^ b;
        }
        if self.spec.n == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let p = self.spec.p as u32;
        if p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((p - a % p) % p) * place;
            place *= p;
            a /= p;
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        match self.tables.as_deref() {
            Some((exp, log)) => exp[(log[a as usize] + log[b as usize]) as usize],
            None => self
                .to_element(a)
                .mul(&self.to_element(b))
                .expect("same field")
                .index(),
        }
    }

    pub fn pow(&self, a: u32, e: u32) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        match self.tables.as_deref() {
            Some((exp, log)) => {
                let order = (self.q - 1) as u64;
                exp[((log[a as usize] as u64 * e as u64) % order) as usize]
            }
            None => self.to_element(a).pow(e as u64).index(),
        }
    }
}

/// Find a primitive element and tabulate its powers.
fn build_tables(spec: &Arc<FieldSpec>) -> Tables {
    let q = spec.q();
    let order = q - 1;
    let factors = prime_factors(order);
    let g = spec
        .enumerate()
        .skip(1)
        .find(|cand| factors.iter().all(|&r| cand.pow(order / r) != spec.one()))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![0u32; q as usize];
    let mut cur = spec.one();
    for i in 0..order as usize {
        let idx = cur.index();
        exp[i] = idx;
        exp[i + order as usize] = idx;
        log[idx as usize] = i as u32;
        cur = cur.mul(&g).expect("same field");
    }
    (exp, log)
}
