//! Exact elements of cyclotomic fields.
//!
//! Values are stored sparsely over the Zumbroich basis of `Q(ζ_n)` at the
//! smallest conductor `n` whose field contains them. That basis is a subset
//! of the roots of unity, so reducing an arbitrary sum of roots is a linear
//! rewrite and deciding membership in a subfield is a pattern check. The
//! power-basis coefficients modulo `Φ_n` are available through
//! [`Cyclotomic::coeffs`] and are what [`fmt::Display`] prints.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use super::{ArithError, Rational};
use crate::modp;

/// One prime-power factor `q = p^e` of a conductor `n`.
struct PrimePart {
    p: u64,
    e: u32,
    q: u64,
    /// Inverse of `n / q` modulo `q`; recovers the `q`-component of an exponent.
    cof_inv: u64,
}

impl PrimePart {
    fn component(&self, k: u64) -> u64 {
        modp::mul_mod(k % self.q, self.cof_inv, self.q)
    }

    fn allowed(&self, k: u64) -> bool {
        let a = self.component(k);
        if self.p == 2 {
            a < self.q / 2
        } else {
            a >= self.q / self.p
        }
    }
}

struct Conductor {
    n: u64,
    parts: Vec<PrimePart>,
    /// `Φ_n`, lowest degree first. Only needed for the power-basis view.
    poly: OnceLock<Vec<i64>>,
}

static CONDUCTORS: OnceLock<RwLock<HashMap<u64, Arc<Conductor>>>> = OnceLock::new();

fn conductor(n: u64) -> Arc<Conductor> {
    let cache = CONDUCTORS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().expect("conductor cache poisoned").get(&n) {
        return Arc::clone(c);
    }
    let built = Arc::new(Conductor::build(n));
    let mut w = cache.write().expect("conductor cache poisoned");
    Arc::clone(w.entry(n).or_insert(built))
}

fn mobius(n: u64) -> i32 {
    let mut m = n;
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

/// `Φ_n = Π_{d | n} (x^d - 1)^{μ(n/d)}`, multiplying first and dividing after
/// so every intermediate is a polynomial.
fn cyclotomic_poly(n: u64) -> Vec<i64> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut p: Vec<i64> = vec![1];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut q = vec![0i64; p.len() + d];
            for (i, &c) in p.iter().enumerate() {
                q[i + d] += c;
                q[i] -= c;
            }
            p = q;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            // p = q * (x^d - 1)  =>  q[i] = q[i - d] - p[i]
            let mut q = vec![0i64; p.len() - d];
            for i in 0..q.len() {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - p[i];
            }
            p = q;
        }
    }
    p
}

/// Sorts by exponent, adds up repeated exponents and drops zeros.
fn merge(mut terms: Vec<(u64, Rational)>) -> Vec<(u64, Rational)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(u64, Rational)> = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += &c,
            _ => {
                if let Some(last) = out.last() {
                    if last.1.is_zero() {
                        out.pop();
                    }
                }
                out.push((k, c));
            }
        }
    }
    if out.last().is_some_and(|t| t.1.is_zero()) {
        out.pop();
    }
    out
}

impl Conductor {
    fn build(n: u64) -> Conductor {
        let parts = modp::prime_factors(n)
            .into_iter()
            .map(|p| {
                let mut q = p;
                let mut e = 1;
                while (n / q).is_multiple_of(p) {
                    q *= p;
                    e += 1;
                }
                let cof_inv = if q == 1 { 0 } else { modp::inv_mod((n / q) % q, q).unwrap_or(0) };
                PrimePart { p, e, q, cof_inv }
            })
            .collect();
        Conductor {
            n,
            parts,
            poly: OnceLock::new(),
        }
    }

    /// Rewrites a sum of arbitrary `ζ_n^k` over the Zumbroich basis, one
    /// prime at a time. Each step only moves the exponent within its own
    /// prime-power component, so earlier primes stay settled.
    fn reduce(&self, terms: Vec<(u64, Rational)>) -> Vec<(u64, Rational)> {
        let n = self.n;
        let mut terms = merge(terms);
        for part in &self.parts {
            if terms.iter().all(|t| part.allowed(t.0)) {
                continue;
            }
            let step = n / part.p;
            let mut next = Vec::with_capacity(terms.len() * part.p as usize);
            for (k, c) in terms {
                if part.allowed(k) {
                    next.push((k, c));
                } else if part.p == 2 {
                    // ζ^{k} = -ζ^{k + n/2}
                    next.push(((k + step) % n, -c));
                } else {
                    // ζ^k = -Σ_{i=1}^{p-1} ζ^{k + i n/p}
                    for i in 1..part.p {
                        next.push(((k + i * step) % n, -c.clone()));
                    }
                }
            }
            terms = merge(next);
        }
        terms
    }

    /// Power-basis coefficients of a cyclic sum, reduced modulo `Φ_n`.
    fn power_basis(&self, terms: &[(u64, Rational)]) -> Vec<Rational> {
        let poly = self.poly.get_or_init(|| cyclotomic_poly(self.n));
        let phi = poly.len() - 1;
        let len = terms.iter().map(|t| t.0 as usize + 1).max().unwrap_or(0).max(phi);
        let mut v = vec![Rational::zero(); len];
        for (k, c) in terms {
            v[*k as usize] += c;
        }
        for i in (phi..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[i]);
            for (j, &pc) in poly[..phi].iter().enumerate() {
                if pc != 0 {
                    v[i - phi + j] -= &c.mul_int(pc);
                }
            }
        }
        v.truncate(phi);
        v
    }
}

/// Tries to rewrite basis terms at conductor `cd.n` over `cd.n / p`.
fn try_descend(cd: &Conductor, part: &PrimePart, terms: &[(u64, Rational)]) -> Option<Vec<(u64, Rational)>> {
    let n = cd.n;
    let p = part.p;
    let m = n / p;
    if part.e >= 2 {
        // The basis of the subfield is the set of basis exponents divisible by p.
        if terms.iter().any(|t| t.0 % p != 0) {
            return None;
        }
        return Some(terms.iter().map(|(k, c)| (k / p, c.clone())).collect());
    }
    if p == 2 {
        // Basis exponents all have trivial 2-component, so every one is even.
        let mut out: Vec<(u64, Rational)> = terms.iter().map(|(k, c)| ((k / 2) % m, c.clone())).collect();
        out.sort_unstable_by_key(|t| t.0);
        return Some(out);
    }
    // p exactly divides n: the coefficients over ζ_p^1..ζ_p^{p-1} must agree
    // within each class of the complementary exponent, and their common value c
    // contributes -c since Σ ζ_p^i = -1.
    let p_inv = if m == 1 { 0 } else { modp::inv_mod(p % m, m)? };
    let mut groups: HashMap<u64, (usize, &Rational)> = HashMap::new();
    for (k, c) in terms {
        let key = if m == 1 { 0 } else { modp::mul_mod(*k, p_inv, m) };
        match groups.get_mut(&key) {
            Some(g) => {
                if g.1 != c {
                    return None;
                }
                g.0 += 1;
            }
            None => {
                groups.insert(key, (1, c));
            }
        }
    }
    if groups.values().any(|g| g.0 as u64 != p - 1) {
        return None;
    }
    let mut out: Vec<(u64, Rational)> = groups.into_iter().map(|(k, (_, c))| (k, -c)).collect();
    out.sort_unstable_by_key(|t| t.0);
    Some(out)
}

/// An exact element of a cyclotomic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u64,
    /// Zumbroich-basis terms, sorted by exponent, nonzero coefficients.
    terms: Vec<(u64, Rational)>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            conductor: 1,
            terms: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: 1,
            terms: vec![(0, r)],
        }
    }

    /// `ζ_n^k` in canonical form.
    pub fn zeta(n: u64, k: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        Self::from_exponents(n, [(k, Rational::one())])
    }

    /// `Σ c · ζ_n^k` over the given `(k, c)` terms, reduced once at the end.
    pub fn from_exponents<I>(n: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        assert!(n >= 1, "conductor must be positive");
        let raw = terms
            .into_iter()
            .map(|(k, c)| (k.rem_euclid(n as i64) as u64, c))
            .collect();
        Self::from_cyclic(n, raw)
    }

    /// Same as [`Self::from_exponents`] for integer multiplicities.
    pub fn from_int_exponents<I>(n: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        Self::from_exponents(n, terms.into_iter().map(|(k, c)| (k, Rational::from_int(c))))
    }

    /// Terms with exponents already in `0..n`.
    fn from_cyclic(n: u64, raw: Vec<(u64, Rational)>) -> Self {
        let terms = conductor(n).reduce(raw);
        Self::normalized(n, terms)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Power-basis coefficients modulo `Φ_n` at the minimal conductor `n`;
    /// the vector has length `φ(n)`.
    pub fn coeffs(&self) -> Vec<Rational> {
        conductor(self.conductor).power_basis(&self.terms)
    }

    /// Nonzero `(exponent, coefficient)` pairs over the Zumbroich basis at
    /// the minimal conductor.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.terms.len() == 1 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn to_rational(&self) -> Result<Rational, ArithError> {
        if self.is_rational() {
            Ok(self.terms.first().map_or_else(Rational::zero, |t| t.1.clone()))
        } else {
            Err(ArithError::NotRational(self.to_string()))
        }
    }

    /// True when the value is an algebraic integer. The basis spans `Z[ζ_n]`,
    /// so this is integrality of the coefficients.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.1.is_integer())
    }

    /// Basis terms rewritten at a multiple `n` of the conductor.
    fn embed(&self, n: u64) -> Vec<(u64, Rational)> {
        debug_assert_eq!(n % self.conductor, 0);
        let step = n / self.conductor;
        let raw = self.terms.iter().map(|(k, c)| (k * step, c.clone())).collect();
        if step == 1 {
            raw
        } else {
            conductor(n).reduce(raw)
        }
    }

    /// Shrinks the conductor of reduced basis terms as far as possible.
    fn normalized(mut n: u64, mut terms: Vec<(u64, Rational)>) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        'outer: while n > 1 {
            let cd = conductor(n);
            for part in &cd.parts {
                if let Some(t) = try_descend(&cd, part, &terms) {
                    n /= part.p;
                    terms = t;
                    continue 'outer;
                }
            }
            break;
        }
        Cyclotomic { conductor: n, terms }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_int(k))
    }

    /// Applies `σ_k: ζ ↦ ζ^k`; `k = -1` is complex conjugation.
    pub fn galois(&self, k: i64) -> Result<Self, ArithError> {
        let n = self.conductor;
        let kk = k.rem_euclid(n as i64) as u64;
        if modp::gcd(kk, n) != 1 {
            return Err(ArithError::NotCoprime { k, conductor: n });
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let raw = self
            .terms
            .iter()
            .map(|(i, c)| (modp::mul_mod(*i, kk, n), c.clone()))
            .collect();
        // Galois conjugates share the conductor, so no descent is needed.
        Ok(Cyclotomic {
            conductor: n,
            terms: conductor(n).reduce(raw),
        })
    }

    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is a unit modulo every conductor")
    }

    /// Multiplicative inverse as the product of the other conjugates over
    /// the norm.
    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.terms[0].1.recip()?));
        }
        let n = self.conductor;
        let mut others = Cyclotomic::one();
        for k in 2..n {
            if modp::gcd(k, n) == 1 {
                others = &others * &self.galois(k as i64)?;
            }
        }
        let norm = (self * &others).to_rational()?;
        Ok(others.scale(&norm.recip()?))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Cyclotomic::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let n = modp::lcm(self.conductor, other.conductor);
        let mut a = self.embed(n);
        let b = other.embed(n);
        if negate {
            a.extend(b.into_iter().map(|(k, c)| (k, -c)));
        } else {
            a.extend(b);
        }
        Self::normalized(n, merge(a))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_rational() {
            return other.scale(&self.to_rational().unwrap_or_default());
        }
        if other.is_rational() {
            return self.scale(&other.to_rational().unwrap_or_default());
        }
        let n = modp::lcm(self.conductor, other.conductor);
        let (sa, sb) = (n / self.conductor, n / other.conductor);
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (i, x) in &self.terms {
            for (j, y) in &other.terms {
                raw.push(((i * sa + j * sb) % n, x * y));
            }
        }
        Self::from_cyclic(n, raw)
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        if rhs.is_zero() {
            return self.clone();
        }
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.mul_impl(rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: &Cyclotomic) -> Cyclotomic { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Cyclotomic {
        iter.fold(Cyclotomic::zero(), |a, b| &a + &b)
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Cyclotomic::from_rational(r)
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Cyclotomic::from_int(n)
    }
}

impl Ord for Cyclotomic {
    /// A total order for deterministic sorting: conductor first, then the
    /// basis terms lexicographically. Not compatible with the field
    /// operations.
    fn cmp(&self, other: &Self) -> Ordering {
        self.conductor
            .cmp(&other.conductor)
            .then_with(|| self.terms.cmp(&other.terms))
    }
}

impl PartialOrd for Cyclotomic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let coeffs = self.coeffs();
        for (i, c) in coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "E({},{})", self.conductor, i)?;
            } else {
                write!(f, "{mag}*E({},{})", self.conductor, i)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({self})")
    }
}
