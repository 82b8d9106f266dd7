//! Rational maps on U_{q+1} and on the projective line F_q ∪ {∞} inside F_{q^2}.

use std::collections::HashSet;

use serde::Serialize;

use crate::arith::gcd;
use crate::cyclotomic::CycloForm;
use crate::error::{Error, Result};
use crate::galois::{build_field, Elem, GaloisField, Poly, SparsePoly};
use crate::multiplicity::Fibers;

pub mod draws;

/// F_{q^2} seen as a quadratic extension of F_q.
#[derive(Clone, Debug)]
pub struct QuadExt {
    field: GaloisField,
    q: u64,
    base_degree: u32,
    unit: Vec<Elem>,
}

impl QuadExt {
    pub fn new(field: &GaloisField) -> Result<Self> {
        if !field.degree().is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "{} is not a quadratic extension",
                field.spec()
            )));
        }
        let base_degree = field.degree() / 2;
        let q = (field.p() as u64).pow(base_degree);
        let unit = field.unity_subgroup(q + 1)?;
        Ok(QuadExt {
            field: field.clone(),
            q,
            base_degree,
            unit,
        })
    }

    /// F_{q^2} under the default modulus.
    pub fn from_q(q: u64) -> Result<Self> {
        let p = crate::arith::prime_factors(q);
        if p.len() != 1 {
            return Err(Error::NotPrime(q));
        }
        let p = p[0];
        let mut k = 0u32;
        let mut t = q;
        while t > 1 {
            t /= p;
            k += 1;
        }
        QuadExt::new(&build_field(p, 2 * k, None)?)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn base_degree(&self) -> u32 {
        self.base_degree
    }

    pub fn frob(&self, x: Elem) -> Elem {
        self.field.pow(x, self.q)
    }

    pub fn norm(&self, x: Elem) -> Elem {
        self.field.pow(x, self.q + 1)
    }

    /// U_{q+1} in canonical order.
    pub fn unit(&self) -> &[Elem] {
        &self.unit
    }

    pub fn in_unit(&self, x: Elem) -> bool {
        self.field.in_unity_subgroup(x, self.q + 1)
    }

    pub fn in_base(&self, x: Elem) -> bool {
        self.frob(x) == x
    }

    /// F_q in canonical order.
    pub fn base(&self) -> Vec<Elem> {
        self.field
            .elements()
            .into_iter()
            .filter(|&x| self.in_base(x))
            .collect()
    }

    /// F_q ∪ {∞}.
    pub fn line(&self) -> Vec<ProjectivePoint> {
        let mut pts: Vec<ProjectivePoint> = self
            .base()
            .into_iter()
            .map(ProjectivePoint::Finite)
            .collect();
        pts.push(ProjectivePoint::Infinity);
        pts
    }

    /// P^{(q)}: coefficients raised to the q-th power.
    pub fn conj_poly(&self, p: &Poly) -> Poly {
        p.map_coeffs(|c| self.frob(c))
    }

    /// Absolute trace from F_q down to the prime field, for x in F_q.
    pub fn base_trace(&self, x: Elem) -> Result<Elem> {
        if !self.in_base(x) {
            return Err(Error::Invalid(format!(
                "{} is not in F_q",
                self.field.display(x)
            )));
        }
        let p = self.field.p() as u64;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.base_degree {
            acc = self.field.add(acc, y);
            y = self.field.pow(y, p);
        }
        Ok(acc)
    }

    fn require_char2(&self) -> Result<()> {
        if self.field.p() != 2 {
            return Err(Error::Invalid(format!(
                "characteristic {} is odd",
                self.field.p()
            )));
        }
        Ok(())
    }

    fn scan_rootless(&self, p: &Poly, name: &str) -> Result<()> {
        match self
            .unit
            .iter()
            .find(|&&x| p.eval(&self.field, x).is_zero())
        {
            Some(&x) => Err(Error::hypothesis_at(
                format!("{name} has a root in U_{}", self.q + 1),
                self.field.display(x),
            )),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProjectivePoint {
    Finite(Elem),
    Infinity,
}

impl ProjectivePoint {
    pub fn finite(self) -> Option<Elem> {
        match self {
            ProjectivePoint::Finite(x) => Some(x),
            ProjectivePoint::Infinity => None,
        }
    }

    pub fn display(self, field: &GaloisField) -> String {
        match self {
            ProjectivePoint::Finite(x) => field.display(x),
            ProjectivePoint::Infinity => "inf".to_string(),
        }
    }
}

impl From<Elem> for ProjectivePoint {
    fn from(x: Elem) -> Self {
        ProjectivePoint::Finite(x)
    }
}

/// num/den over one field, not both zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    pub num: Poly,
    pub den: Poly,
}

impl RationalMap {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::Invalid(
                "numerator and denominator are both zero".into(),
            ));
        }
        Ok(RationalMap { num, den })
    }

    /// Parses "num/den" with comma-separated coefficients, low degree first.
    pub fn parse(field: &GaloisField, s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
        RationalMap::new(Poly::parse(field, n)?, Poly::parse(field, d)?)
    }

    pub fn eval(&self, field: &GaloisField, x: ProjectivePoint) -> Result<ProjectivePoint> {
        match x {
            ProjectivePoint::Finite(x) => {
                let n = self.num.try_eval(field, x)?;
                let d = self.den.try_eval(field, x)?;
                if !d.is_zero() {
                    Ok(ProjectivePoint::Finite(field.div(n, d).expect("nonzero")))
                } else if !n.is_zero() {
                    Ok(ProjectivePoint::Infinity)
                } else {
                    Err(Error::Indeterminate(format!("0/0 at {}", field.display(x))))
                }
            }
            ProjectivePoint::Infinity => {
                if self.num.is_zero() {
                    return Ok(ProjectivePoint::Finite(Elem::ZERO));
                }
                if self.den.is_zero() {
                    return Ok(ProjectivePoint::Infinity);
                }
                let (dn, dd) = (self.num.degree().unwrap(), self.den.degree().unwrap());
                Ok(match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => ProjectivePoint::Infinity,
                    std::cmp::Ordering::Less => ProjectivePoint::Finite(Elem::ZERO),
                    std::cmp::Ordering::Equal => ProjectivePoint::Finite(
                        field
                            .div(self.num.leading(), self.den.leading())
                            .expect("nonzero"),
                    ),
                })
            }
        }
    }

    pub fn display(&self, field: &GaloisField) -> String {
        format!(
            "({})/({})",
            self.num.display(field),
            self.den.display(field)
        )
    }
}

pub fn rat_eval(
    field: &GaloisField,
    map: &RationalMap,
    x: ProjectivePoint,
) -> Result<ProjectivePoint> {
    map.eval(field, x)
}

/// True when `map` sends `domain` bijectively onto `target`.
fn is_bijection_onto(
    field: &GaloisField,
    map: &RationalMap,
    domain: &[ProjectivePoint],
    target: &HashSet<ProjectivePoint>,
) -> bool {
    let mut seen = HashSet::with_capacity(domain.len());
    domain.len() == target.len()
        && domain.iter().all(|&x| match map.eval(field, x) {
            Ok(y) => target.contains(&y) && seen.insert(y),
            Err(_) => false,
        })
}

fn unit_points(ext: &QuadExt) -> Vec<ProjectivePoint> {
    ext.unit
        .iter()
        .map(|&x| ProjectivePoint::Finite(x))
        .collect()
}

/// Scan: map permutes U_{q+1}.
pub fn permutes_unit_scan(ext: &QuadExt, map: &RationalMap) -> bool {
    let pts = unit_points(ext);
    let target = pts.iter().copied().collect();
    is_bijection_onto(&ext.field, map, &pts, &target)
}

/// Scan: map is a bijection from U_{q+1} onto F_q ∪ {∞}.
pub fn unit_to_line_scan(ext: &QuadExt, map: &RationalMap) -> bool {
    let target = ext.line().into_iter().collect();
    is_bijection_onto(&ext.field, map, &unit_points(ext), &target)
}

/// Scan: map is a bijection from F_q ∪ {∞} onto U_{q+1}.
pub fn line_to_unit_scan(ext: &QuadExt, map: &RationalMap) -> bool {
    let target = unit_points(ext).into_iter().collect();
    is_bijection_onto(&ext.field, map, &ext.line(), &target)
}

/// (a x + b)/(c x + d) with ad ≠ bc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deg1Map {
    a: Elem,
    b: Elem,
    c: Elem,
    d: Elem,
}

impl Deg1Map {
    pub fn new(field: &GaloisField, a: Elem, b: Elem, c: Elem, d: Elem) -> Result<Self> {
        if field.mul(a, d) == field.mul(b, c) {
            return Err(Error::Degenerate);
        }
        Ok(Deg1Map { a, b, c, d })
    }

    pub fn identity() -> Self {
        Deg1Map {
            a: Elem::ONE,
            b: Elem::ZERO,
            c: Elem::ZERO,
            d: Elem::ONE,
        }
    }

    pub fn coeffs(&self) -> [Elem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn eval(&self, field: &GaloisField, x: ProjectivePoint) -> ProjectivePoint {
        let (num, den) = match x {
            ProjectivePoint::Finite(x) => (
                field.add(field.mul(self.a, x), self.b),
                field.add(field.mul(self.c, x), self.d),
            ),
            ProjectivePoint::Infinity => (self.a, self.c),
        };
        match field.div(num, den) {
            Some(v) => ProjectivePoint::Finite(v),
            None => ProjectivePoint::Infinity,
        }
    }

    /// self ∘ other.
    pub fn compose(&self, field: &GaloisField, other: &Deg1Map) -> Deg1Map {
        let m = |x: Elem, y: Elem, z: Elem, w: Elem| field.add(field.mul(x, y), field.mul(z, w));
        Deg1Map {
            a: m(self.a, other.a, self.b, other.c),
            b: m(self.a, other.b, self.b, other.d),
            c: m(self.c, other.a, self.d, other.c),
            d: m(self.c, other.b, self.d, other.d),
        }
    }

    pub fn inverse(&self, field: &GaloisField) -> Deg1Map {
        Deg1Map {
            a: self.d,
            b: field.neg(self.b),
            c: field.neg(self.c),
            d: self.a,
        }
    }

    pub fn to_rational(&self) -> RationalMap {
        RationalMap {
            num: Poly::new(vec![self.b, self.a]),
            den: Poly::new(vec![self.d, self.c]),
        }
    }

    /// Up to scaling, (β^q x + α^q)/(αx + β) with α^{q+1} ≠ β^{q+1}: a = μ d^q and
    /// b = μ c^q for some μ in U_{q+1}.
    pub fn has_unit_shape(&self, ext: &QuadExt) -> bool {
        let f = &ext.field;
        let mu = if !self.d.is_zero() {
            f.div(self.a, ext.frob(self.d))
        } else {
            f.div(self.b, ext.frob(self.c))
        };
        let Some(mu) = mu else { return false };
        ext.in_unit(mu)
            && self.a == f.mul(mu, ext.frob(self.d))
            && self.b == f.mul(mu, ext.frob(self.c))
            && ext.norm(self.c) != ext.norm(self.d)
    }

    /// Up to scaling, (βx + β^q)/(αx + α^q) with α, β nonzero and α^{q-1} ≠ β^{q-1}.
    pub fn has_line_shape(&self, ext: &QuadExt) -> bool {
        let f = &ext.field;
        if self.a.is_zero() || self.c.is_zero() {
            return false;
        }
        let mu = f.div(self.b, ext.frob(self.a)).expect("a is nonzero");
        let q1 = ext.q - 1;
        ext.in_unit(mu)
            && self.d == f.mul(mu, ext.frob(self.c))
            && f.pow(self.c, q1) != f.pow(self.a, q1)
    }
}

/// Shape criterion for permuting U_{q+1}, cross-checked against a scan.
pub fn deg1_permutes_unit(ext: &QuadExt, map: &Deg1Map) -> Result<bool> {
    let shape = map.has_unit_shape(ext);
    let scan = permutes_unit_scan(ext, &map.to_rational());
    if shape != scan {
        return Err(Error::Invalid(format!(
            "shape says {shape}, scan says {scan}"
        )));
    }
    Ok(shape)
}

/// Shape criterion for a bijection U_{q+1} -> F_q ∪ {∞}, cross-checked against a scan.
pub fn deg1_unit_to_line(ext: &QuadExt, map: &Deg1Map) -> Result<bool> {
    let shape = map.has_line_shape(ext);
    let scan = unit_to_line_scan(ext, &map.to_rational());
    if shape != scan {
        return Err(Error::Invalid(format!(
            "shape says {shape}, scan says {scan}"
        )));
    }
    Ok(shape)
}

/// A lemma condition next to the scan that should agree with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub condition: bool,
    pub scan: bool,
}

/// (β^q x + α^q)/(αx + β): permutes U_{q+1} iff α^{q+1} ≠ β^{q+1}.
pub fn unit_perm_lemma(ext: &QuadExt, alpha: Elem, beta: Elem) -> LemmaCheck {
    let condition = ext.norm(alpha) != ext.norm(beta);
    let scan = RationalMap::new(
        Poly::new(vec![ext.frob(alpha), ext.frob(beta)]),
        Poly::new(vec![beta, alpha]),
    )
    .map(|m| permutes_unit_scan(ext, &m))
    .unwrap_or(false);
    LemmaCheck { condition, scan }
}

/// (βx + β^q)/(αx + α^q): U_{q+1} -> F_q ∪ {∞} bijectively iff α, β ≠ 0 and α^{q-1} ≠ β^{q-1}.
pub fn unit_to_line_lemma(ext: &QuadExt, alpha: Elem, beta: Elem) -> LemmaCheck {
    let f = &ext.field;
    let condition =
        !alpha.is_zero() && !beta.is_zero() && f.pow(alpha, ext.q - 1) != f.pow(beta, ext.q - 1);
    let scan = RationalMap::new(
        Poly::new(vec![ext.frob(beta), beta]),
        Poly::new(vec![ext.frob(alpha), alpha]),
    )
    .map(|m| unit_to_line_scan(ext, &m))
    .unwrap_or(false);
    LemmaCheck { condition, scan }
}

/// x + 1/(x + α) + 1/(x + α^q) as a single fraction.
pub fn gbar_map(ext: &QuadExt, alpha: Elem) -> RationalMap {
    let f = &ext.field;
    let tau = f.add(alpha, ext.frob(alpha));
    let nu = ext.norm(alpha);
    RationalMap {
        num: Poly::new(vec![tau, nu, tau, Elem::ONE]),
        den: Poly::new(vec![nu, tau, Elem::ONE]),
    }
}

/// One predicted statement and what a scan observed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub statement: String,
    pub predicted: bool,
    pub observed: bool,
}

impl Claim {
    pub fn new(statement: impl Into<String>, predicted: bool, observed: bool) -> Self {
        Claim {
            statement: statement.into(),
            predicted,
            observed,
        }
    }

    pub fn agrees(&self) -> bool {
        self.predicted == self.observed
    }
}

/// Fibers of a rational map restricted to U_{q+1}; 0/0 is an error.
fn unit_fibers(ext: &QuadExt, map: &RationalMap) -> Result<Fibers> {
    let vals: Vec<ProjectivePoint> = ext
        .unit
        .iter()
        .map(|&x| map.eval(&ext.field, x.into()))
        .collect::<Result<_>>()?;
    Ok(Fibers::from_keys(vals))
}

fn poly_unit_fibers(ext: &QuadExt, p: impl Fn(Elem) -> Elem) -> Fibers {
    Fibers::from_codes(ext.unit.iter().map(|&x| p(x).0), ext.field.q() as usize)
}

fn star_fibers(ext: &QuadExt, f: &SparsePoly) -> Fibers {
    let field = &ext.field;
    Fibers::from_codes(
        field.nonzero().into_iter().map(|x| f.eval(field, x).0),
        field.q() as usize,
    )
}

/// Result of splitting F_q^* by Tr(1/c) for q = 2^n.
#[derive(Clone, Debug, Serialize)]
pub struct HalfplaneSplit {
    pub a0: Vec<Elem>,
    pub a1: Vec<Elem>,
    /// (a, 1/a, a + 1/a) over F_q minus {0, 1}, one row per fiber.
    pub pairs0: Vec<(Elem, Elem, Elem)>,
    /// The same over U_{q+1} minus {1}.
    pub pairs1: Vec<(Elem, Elem, Elem)>,
}

/// A_i = {c in F_q^* : Tr(1/c) = i}; a + 1/a is 2-to-1 from F_q minus {0,1} onto A_0
/// and from U_{q+1} minus {1} onto A_1.
pub fn halfplane_split(ext: &QuadExt) -> Result<HalfplaneSplit> {
    ext.require_char2()?;
    let f = &ext.field;
    let mut a0 = Vec::new();
    let mut a1 = Vec::new();
    for c in ext.base().into_iter().filter(|c| !c.is_zero()) {
        if ext.base_trace(f.inv(c).unwrap())?.is_zero() {
            a0.push(c);
        } else {
            a1.push(c);
        }
    }
    let pair_up = |domain: Vec<Elem>, onto: &[Elem]| -> Result<Vec<(Elem, Elem, Elem)>> {
        let image = |a: Elem| f.add(a, f.inv(a).unwrap());
        let fibers = Fibers::from_codes(domain.iter().map(|&a| image(a).0), f.q() as usize);
        if !(fibers.histogram().iter().all(|&k| k == 2) && fibers.image_count() == onto.len()) {
            return Err(Error::Invalid("a + 1/a is not 2-to-1".into()));
        }
        let targets: HashSet<Elem> = onto.iter().copied().collect();
        let mut rows = Vec::new();
        for &a in &domain {
            let b = f.inv(a).unwrap();
            if !targets.contains(&image(a)) {
                return Err(Error::Invalid(format!(
                    "{} lands outside its half",
                    f.display(image(a))
                )));
            }
            if f.order_key(a) < f.order_key(b) {
                rows.push((a, b, image(a)));
            }
        }
        Ok(rows)
    };
    let base_domain: Vec<Elem> = ext
        .base()
        .into_iter()
        .filter(|&a| !a.is_zero() && a != Elem::ONE)
        .collect();
    let unit_domain: Vec<Elem> = ext
        .unit
        .iter()
        .copied()
        .filter(|&a| a != Elem::ONE)
        .collect();
    let pairs0 = pair_up(base_domain, &a0)?;
    let pairs1 = pair_up(unit_domain, &a1)?;
    Ok(HalfplaneSplit {
        a0,
        a1,
        pairs0,
        pairs1,
    })
}

/// Largest q^2 for which the full F_{q^2}^* polynomial scans run.
pub const FULL_SCAN_LIMIT: u64 = 4096;

fn sparse(terms: &[(Elem, u64)]) -> SparsePoly {
    SparsePoly::new(terms.to_vec())
}

/// Claims for g = (cx^3 + x^2 + 1)/(x^3 + x + c) and its companions, q = 2^n.
#[derive(Clone, Debug, Serialize)]
pub struct G3Record {
    pub n: u32,
    pub c: String,
    pub claims: Vec<Claim>,
}

pub fn g3_family(ext: &QuadExt, c: Elem) -> Result<G3Record> {
    ext.require_char2()?;
    let f = &ext.field;
    if c.is_zero() || !ext.in_base(c) {
        return Err(Error::Invalid("c must be a nonzero element of F_q".into()));
    }
    let n = ext.base_degree;
    let q = ext.q;
    let cubic = Poly::new(vec![c, Elem::ONE, Elem::ZERO, Elem::ONE]);
    ext.scan_rootless(&cubic, "x^3 + x + c")?;
    let cinv = f.inv(c).unwrap();
    let tr_shift = ext.base_trace(f.add(Elem::ONE, cinv))?;
    let tr_inv = ext.base_trace(cinv)?;
    let g = RationalMap::new(
        Poly::new(vec![Elem::ONE, Elem::ZERO, Elem::ONE, c]),
        cubic.clone(),
    )?;
    let gf = unit_fibers(ext, &g)?;
    let mut claims = vec![
        Claim::new("g is 1-to-1 on U", tr_shift.is_zero(), gf.is_m_to_1(1)),
        Claim::new("g is 3-to-1 on U", !tr_shift.is_zero(), gf.is_m_to_1(3)),
    ];
    if n.is_multiple_of(2) {
        let e = (q - 1) / 3;
        let g1 = poly_unit_fibers(ext, |x| f.mul(x, f.pow(cubic.eval(f, x), e)));
        claims.push(Claim::new(
            "g1 is 1-to-1 on U",
            tr_inv.is_zero(),
            g1.is_m_to_1(1),
        ));
        claims.push(Claim::new(
            "g1 is 3-to-1 on U",
            !tr_inv.is_zero(),
            g1.is_m_to_1(3),
        ));
    }
    if n >= 2 && f.q() <= FULL_SCAN_LIMIT {
        let shapes = [
            (
                "x^{3q} + x^{q+2} + c x^3",
                sparse(&[(Elem::ONE, 3 * q), (Elem::ONE, q + 2), (c, 3)]),
            ),
            (
                "c x^{3q} + x^{2q+1} + x^3",
                sparse(&[(c, 3 * q), (Elem::ONE, 2 * q + 1), (Elem::ONE, 3)]),
            ),
        ];
        for (name, poly) in shapes {
            let fib = star_fibers(ext, &poly);
            claims.push(Claim::new(
                format!("{name} is 1-to-1"),
                n % 2 == 1 && !tr_inv.is_zero(),
                fib.is_m_to_1(1),
            ));
            claims.push(Claim::new(
                format!("{name} is 3-to-1"),
                tr_inv.is_zero(),
                fib.is_m_to_1(3),
            ));
        }
    }
    Ok(G3Record {
        n,
        c: f.display(c),
        claims,
    })
}

/// Claims for g = (x^4 + x + 1)/(x^5 + x^4 + x) and the related results, q = 2^n.
pub fn g5_family(ext: &QuadExt) -> Result<Vec<Claim>> {
    ext.require_char2()?;
    let f = &ext.field;
    let n = ext.base_degree;
    let q = ext.q;
    let one = Elem::ONE;
    let z = Elem::ZERO;
    let h43 = Poly::new(vec![one, z, z, one, one]);
    let h41 = Poly::new(vec![one, one, z, z, one]);
    let rootless = |p: &Poly| ext.unit.iter().all(|&x| !p.eval(f, x).is_zero());
    let mut claims = vec![
        Claim::new("x^4 + x + 1 has no roots in U", true, rootless(&h41)),
        Claim::new("x^4 + x^3 + 1 has no roots in U", true, rootless(&h43)),
    ];
    let big_g = RationalMap::new(Poly::new(vec![z, one, one, z, z, one]), h43.clone())?;
    claims.push(Claim::new(
        "G permutes U",
        n.is_multiple_of(2),
        permutes_unit_scan(ext, &big_g),
    ));
    let g = RationalMap::new(h41.clone(), Poly::new(vec![z, one, z, z, one, one]))?;
    let gf = unit_fibers(ext, &g)?;
    claims.push(Claim::new("g is 5-to-1 on U", n % 4 == 2, gf.is_m_to_1(5)));
    claims.push(Claim::new("g is 1-to-1 on U", n % 4 != 2, gf.is_m_to_1(1)));
    if f.q() <= FULL_SCAN_LIMIT {
        let m5 = gcd(5, q - 1) as usize;
        if n.is_multiple_of(2) {
            for (name, poly) in [
                (
                    "x^{4q+1} + x^{3q+2} + x^5",
                    sparse(&[(one, 4 * q + 1), (one, 3 * q + 2), (one, 5)]),
                ),
                (
                    "x^{5q} + x^{2q+3} + x^{q+4}",
                    sparse(&[(one, 5 * q), (one, 2 * q + 3), (one, q + 4)]),
                ),
            ] {
                claims.push(Claim::new(
                    format!("{name} is {m5}-to-1"),
                    true,
                    star_fibers(ext, &poly).is_m_to_1(m5),
                ));
            }
        }
        if n >= 2 {
            let poly = sparse(&[(one, 4 * q - 1), (one, 3 * q), (one, 3)]);
            let fib = star_fibers(ext, &poly);
            claims.push(Claim::new(
                "x^{4q-1} + x^{3q} + x^3 is 1-to-1",
                n % 2 == 1,
                fib.is_m_to_1(1),
            ));
            claims.push(Claim::new(
                "x^{4q-1} + x^{3q} + x^3 is 3-to-1",
                n.is_multiple_of(4),
                fib.is_m_to_1(3),
            ));
        }
        for (name, poly) in [
            (
                "x^{4q+1} + x^{q+4} + x^5",
                sparse(&[(one, 4 * q + 1), (one, q + 4), (one, 5)]),
            ),
            (
                "x^{5q} + x^{4q+1} + x^{q+4}",
                sparse(&[(one, 5 * q), (one, 4 * q + 1), (one, q + 4)]),
            ),
        ] {
            let fib = star_fibers(ext, &poly);
            let (m, label) = if n % 2 == 1 {
                (1, "1-to-1")
            } else {
                (5, "5-to-1")
            };
            claims.push(Claim::new(
                format!("{name} is {label}"),
                true,
                fib.is_m_to_1(m),
            ));
        }
    }
    Ok(claims)
}

/// The g3 base polynomial x^3 h(x^{q-1}) with h = x^3 + x + c.
pub fn g3_base(ext: &QuadExt, c: Elem) -> Result<CycloForm> {
    let h = Poly::new(vec![c, Elem::ONE, Elem::ZERO, Elem::ONE]);
    CycloForm::new(&ext.field, 3, ext.q - 1, h)
}

/// The g5 base polynomial x^5 h(x^{q-1}) with h = x^4 + x + 1.
pub fn g5_base(ext: &QuadExt) -> Result<CycloForm> {
    let h = Poly::new(vec![
        Elem::ONE,
        Elem::ONE,
        Elem::ZERO,
        Elem::ZERO,
        Elem::ONE,
    ]);
    CycloForm::new(&ext.field, 5, ext.q - 1, h)
}

/// F = x^{kt} M(x^{q-1})^k f for f = x^r h(x^{q-1}) over F_{q^2}. Requires M rootless on
/// U_{q+1}, eps x^t M^q = M there with eps in U_{q+1}, deg M <= t <= 2 deg M, and
/// (r, q-1) = (r + kt, q-1) = 1. F has the same multiplicities as f for m <= q + 1.
pub fn transfer_q2(
    ext: &QuadExt,
    form: &CycloForm,
    multiplier: &Poly,
    eps: Elem,
    t: u64,
    k: u64,
) -> Result<CycloForm> {
    let f = &ext.field;
    let q = ext.q;
    if form.s() != q - 1 || form.field() != f {
        return Err(Error::hypothesis(
            "f is not of the form x^r h(x^{q-1}) over F_{q^2}",
        ));
    }
    ext.scan_rootless(multiplier, "M")?;
    if !ext.in_unit(eps) {
        return Err(Error::hypothesis_at(
            "eps is not in U_{q+1}",
            f.display(eps),
        ));
    }
    let deg = multiplier.degree().unwrap_or(0) as u64;
    if t < deg || t > 2 * deg {
        return Err(Error::hypothesis(format!(
            "t = {t} is outside [deg M, 2 deg M] = [{deg}, {}]",
            2 * deg
        )));
    }
    for &x in &ext.unit {
        let mx = multiplier.eval(f, x);
        if f.mul(f.mul(eps, f.pow(x, t)), ext.frob(mx)) != mx {
            return Err(Error::hypothesis_at(
                "eps x^t M^q differs from M",
                f.display(x),
            ));
        }
    }
    if gcd(form.r(), q - 1) != 1 || gcd(form.r() + k * t, q - 1) != 1 {
        return Err(Error::hypothesis(
            "(r, q-1) and (r + kt, q-1) must both be 1",
        ));
    }
    let h = multiplier.pow(f, k).mul(f, &form.h());
    CycloForm::new(f, form.r() + k * t, q - 1, h)
}

/// F = x^{k(d-1)} h_d(x^{q-1})^k f, requiring d odd and (d, q+1) = 1.
pub fn hd_transfer(ext: &QuadExt, form: &CycloForm, d: u64, k: u64) -> Result<CycloForm> {
    if d.is_multiple_of(2) || gcd(d, ext.q + 1) != 1 {
        return Err(Error::hypothesis(format!(
            "d = {d} must be odd with (d, q+1) = 1"
        )));
    }
    transfer_q2(ext, form, &Poly::geometric(d as usize), Elem::ONE, d - 1, k)
}

/// Degree-one data L = ε x^t M^q on U_{q+1}.
#[derive(Clone, Debug)]
pub struct Twisted {
    pub l: Poly,
    pub m: Poly,
    pub eps: Elem,
    pub t: u64,
}

#[derive(Clone, Debug)]
pub enum TowerShape {
    /// H = Σ a_j L1^{nj} M1^{n(t2-j)} with a_j the coefficients of M2.
    UnitToUnit {
        inner: Twisted,
        outer: Twisted,
        n: u64,
    },
    /// H = Σ a_i L^{ni} M^{n(u-i)} with a_i the coefficients of N, u = deg N.
    UnitToLine {
        l: Poly,
        m: Poly,
        eps: Elem,
        t: u64,
        big_n: Poly,
        n: u64,
    },
    /// H = Σ a_i h1^i h2^{u-i} built from x + 1/(x+α) + 1/(x+α^q).
    FinalGbar {
        l: Poly,
        m: Poly,
        eps: Elem,
        t: u64,
        big_n: Poly,
        alpha: Elem,
    },
}

/// A tower construction of H, with f = x^r H(x^{q-1})^{m1}.
#[derive(Clone, Debug)]
pub struct Tower {
    ext: QuadExt,
    shape: TowerShape,
    h: Poly,
}

fn powers(field: &GaloisField, p: &Poly, upto: u64) -> Vec<Poly> {
    let mut out = vec![Poly::one()];
    for i in 0..upto as usize {
        out.push(out[i].mul(field, p));
    }
    out
}

impl Tower {
    pub fn new(ext: &QuadExt, shape: TowerShape) -> Result<Self> {
        let f = &ext.field;
        let h = match &shape {
            TowerShape::UnitToUnit { inner, outer, n } => {
                let t2 = outer.t;
                if (outer.m.degree().unwrap_or(0) as u64) > t2 {
                    return Err(Error::hypothesis("t2 < deg M2"));
                }
                let lp = powers(f, &inner.l.pow(f, *n), t2);
                let mp = powers(f, &inner.m.pow(f, *n), t2);
                let mut h = Poly::zero();
                for (j, &a) in outer.m.coeffs().iter().enumerate() {
                    h = h.add(f, &lp[j].mul(f, &mp[t2 as usize - j]).scale(f, a));
                }
                h
            }
            TowerShape::UnitToLine { l, m, big_n, n, .. } => {
                let u = big_n
                    .degree()
                    .ok_or_else(|| Error::hypothesis("N is zero"))? as u64;
                let lp = powers(f, &l.pow(f, *n), u);
                let mp = powers(f, &m.pow(f, *n), u);
                let mut h = Poly::zero();
                for (i, &a) in big_n.coeffs().iter().enumerate() {
                    h = h.add(f, &lp[i].mul(f, &mp[u as usize - i]).scale(f, a));
                }
                h
            }
            TowerShape::FinalGbar {
                l, m, big_n, alpha, ..
            } => {
                let u = big_n
                    .degree()
                    .ok_or_else(|| Error::hypothesis("N is zero"))? as u64;
                let tau = Poly::constant(f.add(*alpha, ext.frob(*alpha)));
                let nu = Poly::constant(ext.norm(*alpha));
                let (l2, m2) = (l.mul(f, l), m.mul(f, m));
                let h1 = l2
                    .mul(f, l)
                    .add(f, &tau.mul(f, &l2).mul(f, m))
                    .add(f, &nu.mul(f, l).mul(f, &m2))
                    .add(f, &tau.mul(f, &m2).mul(f, m));
                let h2 = l2
                    .mul(f, m)
                    .add(f, &tau.mul(f, l).mul(f, &m2))
                    .add(f, &nu.mul(f, &m2).mul(f, m));
                let p1 = powers(f, &h1, u);
                let p2 = powers(f, &h2, u);
                let mut h = Poly::zero();
                for (i, &a) in big_n.coeffs().iter().enumerate() {
                    h = h.add(f, &p1[i].mul(f, &p2[u as usize - i]).scale(f, a));
                }
                h
            }
        };
        Ok(Tower {
            ext: ext.clone(),
            shape,
            h,
        })
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn shape(&self) -> &TowerShape {
        &self.shape
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// The residue that r/m1 must have modulo q + 1.
    pub fn residue(&self) -> u64 {
        let q1 = self.ext.q + 1;
        match &self.shape {
            TowerShape::UnitToUnit { inner, outer, n } => n * inner.t * outer.t % q1,
            TowerShape::UnitToLine { t, big_n, n, .. } => {
                n * t * big_n.degree().unwrap_or(0) as u64 % q1
            }
            TowerShape::FinalGbar { t, big_n, .. } => {
                3 * t * big_n.degree().unwrap_or(0) as u64 % q1
            }
        }
    }

    /// lhs = eps x^t rhs^q on U_{q+1}.
    fn check_twist(&self, lhs: &Poly, rhs: &Poly, eps: Elem, t: u64, name: &str) -> Result<()> {
        let ext = &self.ext;
        let f = &ext.field;
        if !ext.in_unit(eps) {
            return Err(Error::hypothesis_at(
                format!("eps for {name} is not in U_{{q+1}}"),
                f.display(eps),
            ));
        }
        for &x in &ext.unit {
            let v = f.mul(f.mul(eps, f.pow(x, t)), ext.frob(rhs.eval(f, x)));
            if lhs.eval(f, x) != v {
                return Err(Error::hypothesis_at(
                    format!("{name} differs from eps x^t (.)^q"),
                    f.display(x),
                ));
            }
        }
        Ok(())
    }

    /// The structural hypotheses: twist identities, degree bounds, and the
    /// bijectivity of the degree-one layers, all by scan.
    pub fn check_structure(&self) -> Result<()> {
        let ext = &self.ext;
        match &self.shape {
            TowerShape::UnitToUnit { inner, outer, .. } => {
                for (tw, name) in [(inner, "L1"), (outer, "L2")] {
                    if (tw.m.degree().unwrap_or(0) as u64) > tw.t {
                        return Err(Error::hypothesis(format!("t < deg M for {name}")));
                    }
                    ext.scan_rootless(&tw.m, name)?;
                    self.check_twist(&tw.l, &tw.m, tw.eps, tw.t, name)?;
                    let map = RationalMap::new(tw.l.clone(), tw.m.clone())?;
                    if !permutes_unit_scan(ext, &map) {
                        return Err(Error::hypothesis(format!(
                            "{name}/M does not permute U_{{q+1}}"
                        )));
                    }
                }
            }
            TowerShape::UnitToLine {
                l,
                m,
                eps,
                t,
                big_n,
                ..
            }
            | TowerShape::FinalGbar {
                l,
                m,
                eps,
                t,
                big_n,
                ..
            } => {
                let dmax = l.degree().unwrap_or(0).max(m.degree().unwrap_or(0)) as u64;
                if dmax > *t {
                    return Err(Error::hypothesis("t < max(deg L, deg M)"));
                }
                self.check_twist(l, l, *eps, *t, "L")?;
                self.check_twist(m, m, *eps, *t, "M")?;
                let lm = RationalMap::new(l.clone(), m.clone())?;
                if !unit_to_line_scan(ext, &lm) {
                    return Err(Error::hypothesis(
                        "L/M is not a bijection U_{q+1} -> F_q ∪ {inf}",
                    ));
                }
                let nn = RationalMap::new(ext.conj_poly(big_n), big_n.clone())?;
                if !line_to_unit_scan(ext, &nn) {
                    return Err(Error::hypothesis(
                        "N^(q)/N is not a bijection F_q ∪ {inf} -> U_{q+1}",
                    ));
                }
                if let TowerShape::FinalGbar { alpha, .. } = &self.shape {
                    if ext.field.p() != 2 {
                        return Err(Error::hypothesis("q must be even"));
                    }
                    if ext.in_base(*alpha) {
                        return Err(Error::hypothesis_at(
                            "alpha lies in F_q",
                            ext.field.display(*alpha),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_rootless(&self) -> Result<()> {
        self.ext.scan_rootless(&self.h, "H")
    }

    pub fn check_hypotheses(&self) -> Result<()> {
        self.check_structure()?;
        self.check_rootless()
    }

    fn check_r(&self, r: u64) -> Result<u64> {
        let q = self.ext.q;
        let m1 = gcd(r, q - 1);
        if (r / m1) % (q + 1) != self.residue() {
            return Err(Error::hypothesis(format!(
                "r/m1 = {} is not {} mod q+1",
                r / m1,
                self.residue()
            )));
        }
        Ok(m1)
    }

    /// f = x^r H(x^{q-1})^{m1}.
    pub fn form(&self, r: u64) -> Result<CycloForm> {
        let m1 = self.check_r(r)?;
        CycloForm::powered(&self.ext.field, r, self.ext.q - 1, self.h.clone(), m1)
    }

    /// Predicted verdict for f on F_{q^2}^*; the hypotheses are assumed checked.
    pub fn predict(&self, r: u64, m: u64) -> Result<bool> {
        let q = self.ext.q;
        let m1 = self.check_r(r)?;
        if m == 0 || m > m1 * (q + 1) {
            return Err(Error::range("m", m, 1, m1 * (q + 1)));
        }
        Ok(match &self.shape {
            TowerShape::UnitToUnit { n, .. } => m.is_multiple_of(m1) && gcd(*n, q + 1) == m / m1,
            TowerShape::UnitToLine { n, .. } => {
                let g = gcd(*n, q - 1);
                (m == m1 && g == 1)
                    || (m.is_multiple_of(m1) && g == m / m1 && m / m1 >= 3 && 2 * (q - 1) < m)
            }
            TowerShape::FinalGbar { alpha, .. } => {
                if m != m1 {
                    return Err(Error::range("m", m, m1, m1));
                }
                self.ext.field.add(*alpha, self.ext.frob(*alpha)) == Elem::ONE
            }
        })
    }
}

/// Checks every hypothesis, then predicts.
pub fn tower_predict(tower: &Tower, r: u64, m: u64) -> Result<bool> {
    tower.check_hypotheses()?;
    tower.predict(r, m)
}

/// Smallest r = m1 * r1 with r1 = residue (mod q+1) and (r, q-1) = m1, if any.
pub fn choose_r(q: u64, residue: u64, m1: u64) -> Option<u64> {
    if m1 == 0 || !(q - 1).is_multiple_of(m1) {
        return None;
    }
    let rest = (q - 1) / m1;
    (0..2 * rest + 2)
        .map(|j| residue % (q + 1) + j * (q + 1))
        .find(|&r1| r1 >= 1 && gcd(r1, rest) == 1)
        .map(|r1| r1 * m1)
}

#[cfg(test)]
mod tests;
