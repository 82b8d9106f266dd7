//! Arithmetic in GF(p^n) with precomputed exp/log tables.
//!
//! An element is stored as the base-p integer whose digits are its coefficients
//! in the polynomial basis (constant term least significant). Multiplication,
//! inversion and powers go through the discrete-log tables of the canonical
//! primitive element; addition is digit-wise.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::arith::{is_prime, prime_factors};
use crate::error::{Error, Result};

/// Largest field the exhaustive machinery accepts.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Field element, encoded as the base-p integer of its coefficient vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    /// Monic irreducible modulus over GF(p), coefficients low-to-high.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        write!(f, "{}^{}/{}", self.p, self.n, coeffs.join(","))
    }
}

/// Parsed but not yet validated field string: "p^n" or "p^n/c0,...,cn".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRequest {
    pub p: u64,
    pub n: u32,
    pub modulus: Option<Vec<u32>>,
}

impl FromStr for FieldRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "field spec {s:?}: expected \"p^n\" or \"p^n/c0,...,cn\""
            ))
        };
        let (head, tail) = match s.split_once('/') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let (p, n) = head.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        let modulus = match tail {
            None => None,
            Some(t) => Some(
                t.split(',')
                    .map(|c| c.parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<u32>>>()?,
            ),
        };
        Ok(FieldRequest { p, n, modulus })
    }
}

/// Parses and builds a field from its string form.
pub fn parse_field(s: &str) -> Result<GaloisField> {
    let req: FieldRequest = s.parse()?;
    build_field(req.p, req.n, req.modulus.as_deref())
}

struct Tables {
    spec: FieldSpec,
    q: u32,
    /// exp[i] = g^i for 0 <= i < 2(q-1), so products need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    primitive: Elem,
}

/// A finite field with its arithmetic tables. Cheap to clone and share.
#[derive(Clone)]
pub struct GaloisField(Arc<Tables>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.spec)
    }
}

/// Builds GF(p^n). Without a modulus the smallest irreducible monic polynomial is
/// used, ordering candidates by the base-p integer of their coefficients.
pub fn build_field(p: u64, n: u32, modulus: Option<&[u32]>) -> Result<GaloisField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidModulus(
            "extension degree must be at least 1".into(),
        ));
    }
    let q = p
        .checked_pow(n)
        .filter(|&q| q <= MAX_FIELD_SIZE)
        .ok_or_else(|| Error::UnsupportedScale(format!("{p}^{n} exceeds 2^16 elements")))?;
    let p = p as u32;
    let modulus = match modulus {
        Some(m) => {
            if m.len() != n as usize + 1 || m[n as usize] != 1 {
                return Err(Error::InvalidModulus(format!(
                    "expected a monic polynomial of degree {n}"
                )));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::InvalidModulus(format!(
                    "coefficients must lie in [0, {p})"
                )));
            }
            if !modp::is_irreducible(m, p) {
                return Err(Error::InvalidModulus("modulus is reducible".into()));
            }
            m.to_vec()
        }
        None => default_modulus(p, n),
    };
    let spec = FieldSpec { p, n, modulus };
    Ok(GaloisField(Arc::new(Tables::new(spec, q as u32))))
}

fn default_modulus(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    (0..count)
        .map(|low| {
            let mut m = digits(low as u32, p, n as usize);
            m.push(1);
            m
        })
        .find(|m| modp::is_irreducible(m, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn digits(mut code: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl Tables {
    fn new(spec: FieldSpec, q: u32) -> Self {
        let slow_mul = |a: u32, b: u32| -> u32 {
            let n = spec.n as usize;
            let p = spec.p;
            let (da, db) = (digits(a, p, n), digits(b, p, n));
            let mut prod = vec![0u32; 2 * n - 1];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let rem = modp::rem(&prod, &spec.modulus, p);
            let mut rem = rem;
            rem.resize(n, 0);
            undigits(&rem, p)
        };
        let slow_pow = |mut base: u32, mut e: u64| -> u32 {
            let mut acc = 1;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let primitive = (1..q)
            .find(|&c| factors.iter().all(|&f| slow_pow(c, order / f) != 1))
            .expect("the multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * (q as usize - 1)];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for i in 0..(q as usize - 1) {
            exp[i] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, primitive);
        }
        for i in (q as usize - 1)..exp.len() {
            exp[i] = exp[i - (q as usize - 1)];
        }
        Tables {
            spec,
            q,
            exp,
            log,
            primitive: Elem(primitive),
        }
    }
}

impl GaloisField {
    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.n
    }

    pub fn q(&self) -> u64 {
        self.0.q as u64
    }

    fn order(&self) -> u64 {
        self.0.q as u64 - 1
    }

    /// Canonical primitive element: smallest code of multiplicative order q-1.
    pub fn primitive_element(&self) -> Elem {
        self.0.primitive
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.0.q
    }

    pub fn check(&self, x: Elem) -> Result<Elem> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::FieldMismatch(x.0))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> Elem {
        Elem(c.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        let (p, n) = (self.p(), self.degree() as usize);
        if coeffs.len() > n || coeffs.iter().any(|&c| c >= p) {
            return Err(Error::Invalid(format!(
                "coefficient vector {coeffs:?} is not an element of GF({p}^{n})"
            )));
        }
        Ok(Elem(undigits(coeffs, p)))
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        digits(x.0, self.p(), self.degree() as usize)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p();
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.degree() == 1 {
            return Elem((a.0 + b.0) % p);
        }
        let (mut x, mut y, mut place, mut out) = (a.0, b.0, 1u32, 0u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p();
        if p == 2 {
            return a;
        }
        if self.degree() == 1 {
            return Elem((p - a.0) % p);
        }
        let (mut x, mut place, mut out) = (a.0, 1u32, 0u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let t = &self.0;
        Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let t = &self.0;
        let l = t.log[a.0 as usize] as usize;
        Some(Elem(
            t.exp[(self.order() as usize - l) % self.order() as usize],
        ))
    }

    /// a / b; `None` when b is zero.
    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a.0 == 0 {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let l = self.0.log[a.0 as usize] as u64;
        let idx = (l * (e % self.order())) % self.order();
        Elem(self.0.exp[idx as usize])
    }

    /// Power with a possibly negative exponent; `None` for 0 to a negative power.
    pub fn pow_signed(&self, a: Elem, e: i64) -> Option<Elem> {
        if e >= 0 {
            return Some(self.pow(a, e as u64));
        }
        self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs()))
    }

    /// g^k for the canonical primitive element g.
    pub fn gen_pow(&self, k: u64) -> Elem {
        Elem(self.0.exp[(k % self.order()) as usize])
    }

    /// Discrete log to base g; `None` for zero.
    pub fn dlog(&self, a: Elem) -> Option<u64> {
        (a.0 != 0).then(|| self.0.log[a.0 as usize] as u64)
    }

    /// Sort key for the canonical element order: zero first, then by discrete log.
    pub fn order_key(&self, a: Elem) -> u64 {
        self.dlog(a).map_or(0, |l| l + 1)
    }

    pub fn sort_canonical(&self, xs: &mut [Elem]) {
        xs.sort_by_key(|&x| self.order_key(x));
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO];
        out.extend(self.nonzero());
        out
    }

    /// F_q^* in canonical order, g^0, g^1, ..., g^{q-2}.
    pub fn nonzero(&self) -> Vec<Elem> {
        self.0.exp[..self.order() as usize]
            .iter()
            .map(|&c| Elem(c))
            .collect()
    }

    /// The subgroup U_ell of ell-th roots of unity, sorted by discrete log.
    pub fn unity_subgroup(&self, ell: u64) -> Result<Vec<Elem>> {
        let order = self.order();
        if ell == 0 || !order.is_multiple_of(ell) {
            return Err(Error::NotDivisor {
                divisor: ell,
                value: order,
            });
        }
        let step = order / ell;
        Ok((0..ell).map(|i| self.gen_pow(i * step)).collect())
    }

    pub fn in_unity_subgroup(&self, x: Elem, ell: u64) -> bool {
        !x.is_zero() && self.pow(x, ell) == Elem::ONE
    }

    /// x -> x^{p^k}.
    pub fn frobenius(&self, x: Elem, k: u32) -> Elem {
        self.pow(x, (self.p() as u64).pow(k % self.degree()))
    }

    pub fn in_subfield(&self, x: Elem, sub_degree: u32) -> bool {
        self.degree().is_multiple_of(sub_degree) && self.frobenius(x, sub_degree) == x
    }

    /// Elements of the subfield GF(p^sub_degree), canonical order.
    pub fn subfield(&self, sub_degree: u32) -> Result<Vec<Elem>> {
        if sub_degree == 0 || !self.degree().is_multiple_of(sub_degree) {
            return Err(Error::NotDivisor {
                divisor: sub_degree as u64,
                value: self.degree() as u64,
            });
        }
        Ok(self
            .elements()
            .into_iter()
            .filter(|&x| self.in_subfield(x, sub_degree))
            .collect())
    }

    /// Relative trace from this field down to GF(p^sub_degree).
    pub fn trace(&self, sub_degree: u32, x: Elem) -> Result<Elem> {
        self.relative_trace(x, self.degree(), sub_degree)
    }

    /// Trace from the intermediate field GF(p^from) down to GF(p^to), for x in GF(p^from).
    pub fn relative_trace(&self, x: Elem, from: u32, to: u32) -> Result<Elem> {
        if to == 0 || from == 0 || !from.is_multiple_of(to) || !self.degree().is_multiple_of(from) {
            return Err(Error::NotDivisor {
                divisor: to as u64,
                value: from as u64,
            });
        }
        let step = (self.p() as u64).pow(to);
        let mut acc = Elem::ZERO;
        let mut term = x;
        for _ in 0..(from / to) {
            acc = self.add(acc, term);
            term = self.pow(term, step);
        }
        Ok(acc)
    }

    /// Human-readable element: integers for the prime subfield, "g^k" otherwise.
    pub fn display(&self, x: Elem) -> String {
        if x.0 < self.p() {
            x.0.to_string()
        } else {
            format!("g^{}", self.dlog(x).expect("nonzero"))
        }
    }

    /// Parses an element token: a base-10 integer in [0, p) or "g^k".
    pub fn parse_elem(&self, token: &str) -> Result<Elem> {
        let t = token.trim();
        if let Some(k) = t.strip_prefix("g^") {
            let k: u64 = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in element {t:?}")))?;
            return Ok(self.gen_pow(k));
        }
        let c: u32 = t
            .parse()
            .map_err(|_| Error::Parse(format!("element {t:?} is neither an integer nor g^k")))?;
        if c >= self.p() {
            return Err(Error::Parse(format!(
                "integer {c} is not in [0, {})",
                self.p()
            )));
        }
        Ok(Elem(c))
    }
}

/// Polynomial with coefficients low-to-high, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Elem) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Elem::ONE)
    }

    pub fn x() -> Self {
        Poly::monomial(Elem::ONE, 1)
    }

    pub fn monomial(c: Elem, degree: usize) -> Self {
        let mut coeffs = vec![Elem::ZERO; degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    /// Coefficients given as prime-subfield integers.
    pub fn from_ints(field: &GaloisField, ints: &[i64]) -> Self {
        Poly::new(ints.iter().map(|&c| field.from_int(c)).collect())
    }

    /// Sparse construction from (coefficient, exponent) pairs.
    pub fn from_terms(field: &GaloisField, terms: &[(Elem, usize)]) -> Self {
        let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![Elem::ZERO; deg + 1];
        for &(c, e) in terms {
            coeffs[e] = field.add(coeffs[e], c);
        }
        Poly::new(coeffs)
    }

    /// h_d(x) = x^{d-1} + ... + x + 1.
    pub fn geometric(d: usize) -> Self {
        Poly::new(vec![Elem::ONE; d])
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn eval(&self, field: &GaloisField, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    /// Evaluation that rejects codes foreign to `field`.
    pub fn try_eval(&self, field: &GaloisField, x: Elem) -> Result<Elem> {
        field.check(x)?;
        for &c in &self.coeffs {
            field.check(c)?;
        }
        Ok(self.eval(field, x))
    }

    pub fn add(&self, field: &GaloisField, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or(Elem::ZERO);
        Poly::new(
            (0..len)
                .map(|i| field.add(get(self, i), get(other, i)))
                .collect(),
        )
    }

    pub fn neg(&self, field: &GaloisField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub(&self, field: &GaloisField, other: &Poly) -> Poly {
        self.add(field, &other.neg(field))
    }

    pub fn scale(&self, field: &GaloisField, c: Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &GaloisField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, field: &GaloisField, mut e: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        acc
    }

    /// self(inner(x)).
    pub fn compose(&self, field: &GaloisField, inner: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            acc.mul(field, inner).add(field, &Poly::constant(c))
        })
    }

    /// self(x^e), by spreading coefficients.
    pub fn compose_power(&self, e: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; (self.coeffs.len() - 1) * e + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * e] = c;
        }
        Poly::new(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(Elem) -> Elem) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Poly string: comma-separated coefficients low-to-high.
    pub fn parse(field: &GaloisField, s: &str) -> Result<Poly> {
        if s.trim().is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let coeffs = s
            .split(',')
            .map(|t| field.parse_elem(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn display(&self, field: &GaloisField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self.coeffs.iter().map(|&c| field.display(c)).collect();
        parts.join(",")
    }
}

/// Sum of a few terms c·x^e with arbitrarily large exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePoly {
    pub terms: Vec<(Elem, u64)>,
}

impl SparsePoly {
    pub fn new(terms: Vec<(Elem, u64)>) -> Self {
        SparsePoly { terms }
    }

    pub fn eval(&self, field: &GaloisField, x: Elem) -> Elem {
        self.terms.iter().fold(Elem::ZERO, |acc, &(c, e)| {
            field.add(acc, field.mul(c, field.pow(x, e)))
        })
    }
}

/// Polynomials over GF(p) as coefficient vectors, used while bootstrapping a field.
mod modp {
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lead_inv = inv(b[db], p);
        while r.len() > db {
            let top = *r.last().unwrap();
            if top != 0 {
                let factor = top * lead_inv % p;
                let shift = r.len() - 1 - db;
                for (i, &c) in b.iter().enumerate() {
                    r[shift + i] = (r[shift + i] + p - factor * c % p) % p;
                }
            }
            r.pop();
        }
        while r.last() == Some(&0) {
            r.pop();
        }
        r
    }

    fn inv(a: u32, p: u32) -> u32 {
        (1..p)
            .find(|&x| a * x % p == 1)
            .expect("nonzero residue mod a prime")
    }

    /// Trial division by every monic polynomial of degree at most n/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for low in 0..count {
                let mut div = super::digits(low as u32, p, d);
                div.push(1);
                if rem(f, &div, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}
