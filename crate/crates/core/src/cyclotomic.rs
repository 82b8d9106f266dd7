//! Maps of the form f(x) = x^r h(x^s) on F_q^*.
//!
//! With q - 1 = ell * s, m1 = (r, s), r1 = r/m1 and s1 = s/m1, the square
//! x^{s1} . f = g . x^s holds for g(a) = a^{r1} h(a)^{s1} on U_ell, and the
//! multiplicity of f is decided by m1, the multiplicity of g on U_ell, and a
//! bound on the exceptional points.

use serde::Serialize;

use crate::arith::{gcd, gcd_signed};
use crate::criteria::{CommutativeSquare, SquareSizes};
use crate::error::{Error, Result};
use crate::galois::{Elem, GaloisField, Poly};
use crate::multiplicity::{Fibers, Mto1Report};

#[derive(Clone, Debug)]
pub struct CycloForm {
    field: GaloisField,
    r: u64,
    s: u64,
    /// h = base^power; kept factored so large powers are never expanded.
    base: Poly,
    power: u64,
    ell: u64,
}

impl CycloForm {
    /// Requires r >= 1, s | q - 1, and h without roots in U_ell.
    pub fn new(field: &GaloisField, r: u64, s: u64, h: Poly) -> Result<Self> {
        Self::powered(field, r, s, h, 1)
    }

    /// The form with h = base^power.
    pub fn powered(field: &GaloisField, r: u64, s: u64, base: Poly, power: u64) -> Result<Self> {
        let order = field.q() - 1;
        if r == 0 {
            return Err(Error::Invalid("r must be positive".into()));
        }
        if s == 0 || !order.is_multiple_of(s) {
            return Err(Error::NotDivisor {
                divisor: s,
                value: order,
            });
        }
        if power == 0 {
            return Err(Error::Invalid("power must be positive".into()));
        }
        for &c in base.coeffs() {
            field.check(c)?;
        }
        let ell = order / s;
        for a in field.unity_subgroup(ell)? {
            if base.eval(field, a).is_zero() {
                return Err(Error::hypothesis_at(
                    format!("h has a root in U_{ell}"),
                    field.display(a),
                ));
            }
        }
        Ok(CycloForm {
            field: field.clone(),
            r,
            s,
            base,
            power,
            ell,
        })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    /// h expanded as a polynomial.
    pub fn h(&self) -> Poly {
        if self.power == 1 {
            self.base.clone()
        } else {
            self.base.pow(&self.field, self.power)
        }
    }

    pub fn h_at(&self, y: Elem) -> Elem {
        self.field.pow(self.base.eval(&self.field, y), self.power)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn m1(&self) -> u64 {
        gcd(self.r, self.s)
    }

    /// f(x) = x^r h(x^s), evaluated directly.
    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        f.mul(f.pow(x, self.r), self.h_at(f.pow(x, self.s)))
    }

    /// Fibers of f on F_q^*, points in canonical order.
    pub fn star_fibers(&self) -> Fibers {
        let q = self.field.q() as usize;
        Fibers::from_codes(self.field.nonzero().into_iter().map(|x| self.eval(x).0), q)
    }

    /// Brute-force verdict on F_q^*.
    pub fn brute_force(&self, m: usize) -> Result<Mto1Report<Elem>> {
        let nonzero = self.field.nonzero();
        Ok(self.star_fibers().report(m)?.map_points(|i| nonzero[i]))
    }

    /// x^r h(x^s) as an explicit polynomial.
    pub fn to_poly(&self) -> Poly {
        let spread = self.h().compose_power(self.s as usize);
        let mut coeffs = vec![Elem::ZERO; self.r as usize];
        coeffs.extend_from_slice(spread.coeffs());
        Poly::new(coeffs)
    }

    pub fn decompose(&self) -> Result<CycloDecomposition> {
        CycloDecomposition::new(self)
    }
}

/// Which conjunct of the main criterion failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjunct {
    M1Divides,
    SubgroupMultiplicity,
    ExceptionalBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub verdict: bool,
    pub failed: Option<Conjunct>,
}

impl Prediction {
    fn holds() -> Self {
        Prediction {
            verdict: true,
            failed: None,
        }
    }

    fn fails(c: Conjunct) -> Self {
        Prediction {
            verdict: false,
            failed: Some(c),
        }
    }
}

/// The derived data (m1, r1, s1, ell, g) with g tabulated on U_ell.
#[derive(Clone, Debug)]
pub struct CycloDecomposition {
    field: GaloisField,
    pub r: u64,
    pub s: u64,
    pub m1: u64,
    pub r1: u64,
    pub s1: u64,
    pub ell: u64,
    /// U_ell in canonical order, unit[i] = (g^s)^i.
    pub unit: Vec<Elem>,
    /// g on U_ell, aligned with `unit`.
    pub g: Vec<Elem>,
    g_fibers: Fibers,
}

impl CycloDecomposition {
    fn new(form: &CycloForm) -> Result<Self> {
        let field = form.field.clone();
        let (r, s, ell) = (form.r, form.s, form.ell);
        let m1 = gcd(r, s);
        let (r1, s1) = (r / m1, s / m1);
        let unit = field.unity_subgroup(ell)?;
        let g: Vec<Elem> = unit
            .iter()
            .map(|&a| field.mul(field.pow(a, r1), field.pow(form.h_at(a), s1)))
            .collect();
        if let Some(i) = g
            .iter()
            .position(|&v| !field.in_unity_subgroup(v, ell * m1))
        {
            return Err(Error::Invalid(format!(
                "g(U_ell) leaves U_ell*m1 at {}",
                field.display(unit[i])
            )));
        }
        for (j, x) in field.nonzero().into_iter().enumerate() {
            if field.pow(form.eval(x), s1) != g[j % ell as usize] {
                return Err(Error::Invalid(format!(
                    "square fails to commute at {}",
                    field.display(x)
                )));
            }
        }
        let g_fibers = Fibers::from_codes(g.iter().map(|v| v.0), field.q() as usize);
        Ok(CycloDecomposition {
            field,
            r,
            s,
            m1,
            r1,
            s1,
            ell,
            unit,
            g,
            g_fibers,
        })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn g_is_m_to_1(&self, m: u64) -> bool {
        self.g_fibers.is_m_to_1(m as usize)
    }

    pub fn g_fibers(&self) -> &Fibers {
        &self.g_fibers
    }

    /// Largest multiplicity the criterion covers.
    pub fn max_m(&self) -> u64 {
        self.ell * self.m1
    }

    fn check_range(&self, m: u64) -> Result<()> {
        if m == 0 || m > self.max_m() {
            return Err(Error::range("m", m, 1, self.max_m()));
        }
        Ok(())
    }

    /// f is m-to-1 on F_q^* iff m1 | m, g is (m/m1)-to-1 on U_ell, and s (ell mod m/m1) < m.
    pub fn predict(&self, m: u64) -> Result<Prediction> {
        self.check_range(m)?;
        if !m.is_multiple_of(self.m1) {
            return Ok(Prediction::fails(Conjunct::M1Divides));
        }
        let m2 = m / self.m1;
        if !self.g_is_m_to_1(m2) {
            return Ok(Prediction::fails(Conjunct::SubgroupMultiplicity));
        }
        if self.s * (self.ell % m2) >= m {
            return Ok(Prediction::fails(Conjunct::ExceptionalBound));
        }
        Ok(Prediction::holds())
    }

    /// Case lists for m = 2 and m = 3; returns the verdict and the matching case number.
    pub fn small_m(&self, m: u64) -> Result<(bool, Option<u8>)> {
        if !(m == 2 || m == 3) {
            return Err(Error::range("m", m, 2, 3));
        }
        if self.s < 2 {
            return Err(Error::range("s", self.s, 2, u64::MAX));
        }
        if self.ell < m {
            return Err(Error::range("ell", self.ell, m, u64::MAX));
        }
        let case = match m {
            2 if self.m1 == 1 && self.ell.is_multiple_of(2) && self.g_is_m_to_1(2) => Some(1),
            2 if self.m1 == 2 && self.g_is_m_to_1(1) => Some(2),
            3 if self.m1 == 1 && self.ell.is_multiple_of(3) && self.g_is_m_to_1(3) => Some(1),
            3 if self.m1 == 1 && self.ell % 3 == 1 && self.s == 2 && self.g_is_m_to_1(3) => Some(2),
            3 if self.m1 == 3 && self.g_is_m_to_1(1) => Some(3),
            _ => None,
        };
        Ok((case.is_some(), case))
    }

    /// Finite case analysis on the values of g when ell is 2 or 3.
    pub fn small_ell(&self, m: u64) -> Result<bool> {
        self.check_range(m)?;
        let m1 = self.m1;
        match self.ell {
            2 => {
                let distinct = self.g[0] != self.g[1];
                Ok((m == m1 && distinct) || (m == 2 * m1 && !distinct))
            }
            3 => {
                let (a, b, c) = (self.g[0], self.g[1], self.g[2]);
                let values = 1 + usize::from(b != a) + usize::from(c != a && c != b);
                Ok((m == m1 && values == 3)
                    || (m == 2 * m1 && values == 2 && self.r.is_multiple_of(self.s))
                    || (m == 3 * m1 && values == 1))
            }
            ell => Err(Error::range("ell", ell, 2, 3)),
        }
    }

    /// The square F_q^* -> F_q^* over U_ell -> U_{ell m1}, with points indexed by
    /// discrete-log position: A and Abar by j (x = g^j), S by i (x = g^{si}),
    /// Sbar by i (x = g^{s1 i}).
    pub fn square(&self, form: &CycloForm) -> Result<CommutativeSquare> {
        let field = &self.field;
        let order = field.q() - 1;
        let (ell, s1) = (self.ell, self.s1);
        let big = ell * self.m1;
        let f = field
            .nonzero()
            .into_iter()
            .map(|x| field.dlog(form.eval(x)).expect("f has no roots on F_q^*") as usize)
            .collect();
        let lambda = (0..order).map(|j| (j % ell) as usize).collect();
        let lambdabar = (0..order).map(|j| (j % big) as usize).collect();
        let fbar = self
            .g
            .iter()
            .map(|&v| (field.dlog(v).expect("nonzero") / s1) as usize)
            .collect();
        let n = order as usize;
        CommutativeSquare::new(
            SquareSizes {
                a: n,
                abar: n,
                s: ell as usize,
                sbar: big as usize,
            },
            f,
            fbar,
            lambda,
            lambdabar,
        )
    }
}

pub fn decompose(form: &CycloForm) -> Result<CycloDecomposition> {
    form.decompose()
}

pub fn main_predict(form: &CycloForm, m: u64) -> Result<Prediction> {
    form.decompose()?.predict(m)
}

pub fn small_m_predict(form: &CycloForm, m: u64) -> Result<(bool, Option<u8>)> {
    form.decompose()?.small_m(m)
}

pub fn small_ell_predict(form: &CycloForm, m: u64) -> Result<bool> {
    form.decompose()?.small_ell(m)
}

/// Verdict on all of F_q for 1 <= m <= q: for m >= 2 the map is m-to-1 on F_q
/// iff m does not divide q and it is m-to-1 on F_q^*; for m = 1 the two agree.
/// Fibers of f on F_q^* have at most ell m1 points, so larger m fail on F_q^*.
pub fn fq_bridge(form: &CycloForm, m: u64) -> Result<bool> {
    let q = form.field.q();
    if m == 0 || m > q {
        return Err(Error::range("m", m, 1, q));
    }
    let dec = form.decompose()?;
    let star = m < q && m <= dec.max_m() && dec.predict(m)?.verdict;
    Ok(if m == 1 {
        star
    } else {
        !q.is_multiple_of(m) && star
    })
}

/// The same bridge for an arbitrary polynomial whose only root is 0; the F_q^*
/// verdict comes from a scan.
pub fn fq_bridge_poly(field: &GaloisField, f: &Poly, m: u64) -> Result<bool> {
    let q = field.q();
    if m == 0 || m > q {
        return Err(Error::range("m", m, 1, q));
    }
    if !f.try_eval(field, Elem::ZERO)?.is_zero() {
        return Err(Error::hypothesis("f(0) is not 0"));
    }
    let nonzero = field.nonzero();
    if let Some(&x) = nonzero.iter().find(|&&x| f.eval(field, x).is_zero()) {
        return Err(Error::hypothesis_at(
            "f has a nonzero root",
            field.display(x),
        ));
    }
    let fibers = Fibers::from_codes(nonzero.iter().map(|&x| f.eval(field, x).0), q as usize);
    let star = fibers.is_m_to_1(m as usize);
    Ok(if m == 1 {
        star
    } else {
        !q.is_multiple_of(m) && star
    })
}

/// Verdict when h(a)^{s1} = beta a^t on U_ell: m1 | m and (r1 + t, ell) = m/m1.
pub fn monomial_predict(form: &CycloForm, beta: Elem, t: i64, m: u64) -> Result<bool> {
    let field = &form.field;
    let m1 = form.m1();
    let s1 = form.s / m1;
    let ell = form.ell;
    if m == 0 || m > ell * m1 {
        return Err(Error::range("m", m, 1, ell * m1));
    }
    for a in field.unity_subgroup(ell)? {
        let lhs = field.pow(form.h_at(a), s1);
        let rhs = field.mul(beta, field.pow_signed(a, t).expect("a is nonzero"));
        if lhs != rhs {
            return Err(Error::hypothesis_at(
                "h(a)^s1 differs from beta a^t",
                field.display(a),
            ));
        }
    }
    let r1 = (form.r / m1) as i128;
    Ok(m.is_multiple_of(m1) && gcd_signed(r1 + t as i128, ell) == m / m1)
}

/// Attempts to find (beta, t) with h(a)^{s1} = beta a^t on U_ell, 0 <= t < ell.
pub fn infer_monomial(form: &CycloForm) -> Option<(Elem, i64)> {
    let field = &form.field;
    let s1 = form.s / form.m1();
    let value = |a: Elem| field.pow(form.h_at(a), s1);
    let beta = value(Elem::ONE);
    let t = if form.ell == 1 {
        0
    } else {
        let zeta = field.gen_pow(form.s);
        let ratio = field.div(value(zeta), beta)?;
        let l = field.dlog(ratio)?;
        if l % form.s != 0 {
            return None;
        }
        (l / form.s) as i64
    };
    let holds = field
        .unity_subgroup(form.ell)
        .ok()?
        .into_iter()
        .all(|a| value(a) == field.mul(beta, field.pow(a, t as u64)));
    holds.then_some((beta, t))
}

/// Root criterion for h_d(x^e) on U_ell: no roots iff (d, q ell/(e, ell)) = 1.
pub fn hd_root_lemma(q: u64, d: u64, e: u64, ell: u64) -> bool {
    gcd(d, q * (ell / gcd(e, ell))) == 1
}

/// Scan: true when h_d(x^e) has no roots in U_ell.
pub fn hd_root_scan(field: &GaloisField, d: u64, e: u64, ell: u64) -> Result<bool> {
    let h = Poly::geometric(d as usize).compose_power(e as usize);
    Ok(field
        .unity_subgroup(ell)?
        .into_iter()
        .all(|a| !h.eval(field, a).is_zero()))
}

/// Parameters of f = x^r h(x^s) over F_{q^n} with h = h_d(x^e)^t H(h_k(x^e)^{ell0}),
/// ell0 = ell/(ell, k - 1), H over F_q, and s = (q^n - 1)/ell.
#[derive(Clone, Debug)]
pub struct HdParams {
    /// q = p^base_degree.
    pub base_degree: u32,
    pub ell: u64,
    pub r: u64,
    pub d: u64,
    pub e: u64,
    pub t: u64,
    pub outer: Option<(u64, Poly)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HdCase {
    /// ell m1 divides (q - 1, n).
    QMinusOne,
    /// n even and ell m1 divides q + 1.
    QPlusOne,
}

impl HdParams {
    pub fn h(&self, field: &GaloisField) -> Poly {
        let inner = Poly::geometric(self.d as usize)
            .compose_power(self.e as usize)
            .pow(field, self.t);
        match &self.outer {
            None => inner,
            Some((k, big_h)) => {
                let ell0 = self.ell / gcd(self.ell, k.abs_diff(1));
                let arg = Poly::geometric(*k as usize)
                    .compose_power(self.e as usize)
                    .pow(field, ell0);
                inner.mul(field, &big_h.compose(field, &arg))
            }
        }
    }

    pub fn form(&self, field: &GaloisField) -> Result<CycloForm> {
        let order = field.q() - 1;
        if self.ell == 0 || !order.is_multiple_of(self.ell) {
            return Err(Error::NotDivisor {
                divisor: self.ell,
                value: order,
            });
        }
        CycloForm::new(field, self.r, order / self.ell, self.h(field))
    }
}

/// Gcd prediction for the h_d families over F_{q^n}.
pub fn hd_family_predict(field: &GaloisField, params: &HdParams, m: u64) -> Result<(HdCase, bool)> {
    let bd = params.base_degree;
    if bd == 0 || !field.degree().is_multiple_of(bd) {
        return Err(Error::NotDivisor {
            divisor: bd as u64,
            value: field.degree() as u64,
        });
    }
    let n = (field.degree() / bd) as u64;
    let q = (field.p() as u64).pow(bd);
    if let Some((_, big_h)) = &params.outer {
        if let Some(&c) = big_h.coeffs().iter().find(|&&c| !field.in_subfield(c, bd)) {
            return Err(Error::hypothesis_at(
                "H has a coefficient outside F_q",
                field.display(c),
            ));
        }
    }
    let form = params.form(field)?;
    let s = form.s();
    let m1 = form.m1();
    let big = params.ell * m1;
    if m == 0 || m > big {
        return Err(Error::range("m", m, 1, big));
    }
    if gcd(q - 1, n).is_multiple_of(big) {
        return Ok((HdCase::QMinusOne, m == m1));
    }
    if n.is_multiple_of(2) && (q + 1).is_multiple_of(big) {
        let shift =
            (1 - params.d as i128) * params.e as i128 * (s / (q - 1)) as i128 * params.t as i128;
        let verdict = m.is_multiple_of(m1) && gcd_signed(params.r as i128 + shift, big) == m;
        return Ok((HdCase::QPlusOne, verdict));
    }
    Err(Error::hypothesis(format!(
        "ell m1 = {big} divides neither (q-1, n) = {} nor q+1 with n even",
        gcd(q - 1, n)
    )))
}

/// F = x^{kt} M(x^s)^k f from a permutation f, with its predicted multiplicity.
#[derive(Clone, Debug)]
pub struct Lift {
    pub lifted: CycloForm,
    pub predicted: u64,
    pub observed: bool,
}

fn check_unit_identity(
    form: &CycloForm,
    multiplier: &Poly,
    eps: Elem,
    t: u64,
    power: u64,
) -> Result<()> {
    let field = &form.field;
    for a in field.unity_subgroup(form.ell)? {
        let v = field.mul(
            field.mul(eps, field.pow(a, t)),
            field.pow(multiplier.eval(field, a), power),
        );
        if v != Elem::ONE {
            return Err(Error::hypothesis_at(
                "eps x^t M(x)^s is not 1 on U_ell",
                field.display(a),
            ));
        }
    }
    Ok(())
}

/// If f permutes F_q and eps x^t M(x)^s = 1 on U_ell with eps in U_ell, then
/// F = x^{kt} M(x^s)^k f(x) is (r + kt, s)-to-1 on F_q^*.
pub fn lift_from_permutation(
    form: &CycloForm,
    multiplier: &Poly,
    eps: Elem,
    t: u64,
    k: u64,
) -> Result<Lift> {
    let field = &form.field;
    if !form.star_fibers().is_m_to_1(1) {
        return Err(Error::hypothesis("f does not permute F_q"));
    }
    if !field.in_unity_subgroup(eps, form.ell) {
        return Err(Error::hypothesis_at(
            "eps is not in U_ell",
            field.display(eps),
        ));
    }
    check_unit_identity(form, multiplier, eps, t, form.s)?;
    let h = multiplier.pow(field, k).mul(field, &form.h());
    let lifted = CycloForm::new(field, form.r + k * t, form.s, h)?;
    let predicted = gcd(form.r + k * t, form.s);
    let observed = lifted.star_fibers().is_m_to_1(predicted as usize);
    Ok(Lift {
        lifted,
        predicted,
        observed,
    })
}

/// Transfer: with m1 = (r, s) dividing t, (r + kt, s) = m1, eps in U_{ell m1}, and
/// eps x^{t/m1} M(x)^{s/m1} = 1 on U_ell, F = x^{kt} M(x^s)^k f has exactly the
/// multiplicities of f. Returns F.
pub fn transfer_form(
    form: &CycloForm,
    multiplier: &Poly,
    eps: Elem,
    t: u64,
    k: u64,
) -> Result<CycloForm> {
    let field = &form.field;
    let m1 = form.m1();
    if !t.is_multiple_of(m1) {
        return Err(Error::hypothesis(format!(
            "(r, s) = {m1} does not divide t = {t}"
        )));
    }
    if gcd(form.r + k * t, form.s) != m1 {
        return Err(Error::hypothesis("(r + kt, s) differs from (r, s)"));
    }
    if !field.in_unity_subgroup(eps, form.ell * m1) {
        return Err(Error::hypothesis_at(
            "eps is not in U_{ell m1}",
            field.display(eps),
        ));
    }
    check_unit_identity(form, multiplier, eps, t / m1, form.s / m1)?;
    let h = multiplier.pow(field, k).mul(field, &form.h());
    CycloForm::new(field, form.r + k * t, form.s, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::build_field;

    fn f29_form() -> CycloForm {
        let f29 = build_field(29, 1, None).unwrap();
        let h = Poly::from_ints(&f29, &[1, 0, 0, 15, 1, 1]);
        CycloForm::new(&f29, 2, 4, h).unwrap()
    }

    #[test]
    fn f29_twelve_to_one_instance() {
        let form = f29_form();
        let dec = form.decompose().unwrap();
        assert_eq!((dec.m1, dec.r1, dec.s1, dec.ell), (2, 1, 2, 7));
        assert!(dec.g_is_m_to_1(6));
        assert!(dec.predict(12).unwrap().verdict);
        let rep = form.brute_force(12).unwrap();
        assert!(rep.verdict);
        let mut e: Vec<u32> = rep.exceptional_set.iter().map(|x| x.0).collect();
        e.sort();
        assert_eq!(e, vec![1, 12, 17, 28]);
        assert_eq!(
            dec.predict(6).unwrap().failed,
            Some(Conjunct::SubgroupMultiplicity)
        );
        assert_eq!(dec.predict(3).unwrap().failed, Some(Conjunct::M1Divides));
        assert!(dec.predict(15).is_err());
    }

    #[test]
    fn monomial_decomposition() {
        let f = build_field(13, 1, None).unwrap();
        for s in [1, 2, 3, 4, 6, 12] {
            for n in 1..=15 {
                let form = CycloForm::new(&f, n, s, Poly::one()).unwrap();
                let dec = form.decompose().unwrap();
                let e = n / gcd(n, s);
                for (a, v) in dec.unit.iter().zip(&dec.g) {
                    assert_eq!(*v, f.pow(*a, e));
                }
            }
        }
    }

    #[test]
    fn f64_three_to_one_instance() {
        let f64 = build_field(2, 6, Some(&[1, 1, 0, 1, 1, 0, 1])).unwrap();
        let xi9 = f64.gen_pow(9);
        let form = CycloForm::new(&f64, 2, 21, Poly::new(vec![xi9, Elem::ONE])).unwrap();
        let dec = form.decompose().unwrap();
        assert_eq!(dec.g, vec![Elem::ONE; 3]);
        assert!(dec.small_ell(3).unwrap());
        assert!(dec.predict(3).unwrap().verdict);
        assert!(form.brute_force(3).unwrap().verdict);
    }

    #[test]
    fn rootless_hypothesis_is_enforced() {
        let f5 = build_field(5, 1, None).unwrap();
        // x^3 + x = x (x^2 + 1) = x h(x^2) with h = x + 1 vanishing at -1 in U_2
        let err = CycloForm::new(&f5, 1, 2, Poly::from_ints(&f5, &[1, 1])).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }));
        assert!(CycloForm::new(&f5, 1, 3, Poly::one()).is_err());
    }

    #[test]
    fn bridge_examples() {
        let f5 = build_field(5, 1, None).unwrap();
        let cubic = Poly::from_ints(&f5, &[0, 1, 0, 1]);
        assert!(matches!(
            fq_bridge_poly(&f5, &cubic, 3),
            Err(Error::Hypothesis { .. })
        ));
        let f29 = build_field(29, 1, None).unwrap();
        let quartic = CycloForm::new(&f29, 4, 1, Poly::one()).unwrap();
        assert!(fq_bridge(&quartic, 4).unwrap());
        assert!(fq_bridge_poly(&f29, &quartic.to_poly(), 4).unwrap());
        let full = Fibers::from_codes(f29.elements().into_iter().map(|x| quartic.eval(x).0), 29);
        assert!(full.is_m_to_1(4));
    }

    #[test]
    fn bridge_matches_full_field_scan() {
        for (p, n) in [(7, 1), (9, 1), (8, 1), (13, 1), (16, 1)] {
            let (p, n) = match p {
                8 => (2, 3),
                9 => (3, 2),
                16 => (2, 4),
                _ => (p, n),
            };
            let field = build_field(p, n, None).unwrap();
            let q = field.q();
            for s in crate::arith::divisors(q - 1) {
                for r in 1..=2 * s {
                    for h in [
                        Poly::one(),
                        Poly::new(vec![field.gen_pow(3), Elem::ONE]),
                        Poly::new(vec![Elem::ONE, Elem::ZERO, field.gen_pow(1)]),
                    ] {
                        let Ok(form) = CycloForm::new(&field, r, s, h) else {
                            continue;
                        };
                        let full = Fibers::from_codes(
                            field.elements().into_iter().map(|x| form.eval(x).0),
                            q as usize,
                        );
                        for m in 1..=q {
                            assert_eq!(
                                fq_bridge(&form, m).unwrap(),
                                full.is_m_to_1(m as usize),
                                "q={q} r={r} s={s} m={m}"
                            );
                            assert_eq!(
                                fq_bridge_poly(&field, &form.to_poly(), m).unwrap(),
                                full.is_m_to_1(m as usize)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn small_m_parity_and_residue_cases() {
        let f = build_field(31, 1, None).unwrap();
        // s = 2, ell = 15 odd, m1 = 1
        let form = CycloForm::new(&f, 1, 2, Poly::one()).unwrap();
        assert_eq!(small_m_predict(&form, 2).unwrap(), (false, None));
        // ell = 5 = 2 mod 3, m1 = 1
        let form = CycloForm::new(&f, 1, 6, Poly::new(vec![Elem(3), Elem::ONE])).unwrap();
        assert!(!small_m_predict(&form, 3).unwrap().0);
        assert!(small_m_predict(&form, 4).is_err());
        let one = CycloForm::new(&f, 1, 1, Poly::one()).unwrap();
        assert!(small_m_predict(&one, 2).is_err());
    }

    #[test]
    fn ell_three_two_values_needs_s_dividing_r() {
        // every linear and quadratic h over fields with ell = 3; whenever g takes two
        // values, brute force is 2m1-to-1 exactly when s | r
        let (mut with, mut without) = (0, 0);
        for q in [7u64, 13, 19] {
            let f = build_field(q, 1, None).unwrap();
            let s = (q - 1) / 3;
            let els = f.elements();
            for r in 1..=2 * s {
                for &a in &els {
                    for &b in &els {
                        let h = Poly::new(vec![a, b, Elem::ONE]);
                        let Ok(form) = CycloForm::new(&f, r, s, h) else { continue };
                        let dec = form.decompose().unwrap();
                        let (x, y, z) = (dec.g[0], dec.g[1], dec.g[2]);
                        let values = 1 + usize::from(y != x) + usize::from(z != x && z != y);
                        if values != 2 {
                            continue;
                        }
                        let m = 2 * dec.m1;
                        let seen = form.star_fibers().is_m_to_1(m as usize);
                        assert_eq!(seen, r % s == 0, "q = {q}, r = {r}");
                        assert_eq!(dec.small_ell(m).unwrap(), seen);
                        if r % s == 0 {
                            with += 1;
                        } else {
                            without += 1;
                        }
                    }
                }
            }
        }
        assert!(with > 0 && without > 0, "{with} {without}");
    }

    #[test]
    fn small_ell_constant_g_is_three_to_one() {
        let f = build_field(13, 1, None).unwrap();
        // ell = 3, s = 4; h constant 1 and r = 12 gives g(a) = a^3 = 1
        let form = CycloForm::new(&f, 12, 4, Poly::one()).unwrap();
        let dec = form.decompose().unwrap();
        assert_eq!(dec.g, vec![Elem::ONE; 3]);
        assert!(dec.small_ell(3 * dec.m1).unwrap());
        assert!(small_ell_predict(&CycloForm::new(&f, 1, 1, Poly::one()).unwrap(), 1).is_err());
    }

    #[test]
    fn monomial_examples() {
        // h = H^{ell m1}: t = 0, beta = 1
        let f = build_field(31, 1, None).unwrap();
        let big_h = Poly::new(vec![Elem(3), Elem::ONE]);
        for (r, s) in [(2, 6), (3, 10), (5, 3), (4, 15)] {
            let ell = 30 / s;
            let m1 = gcd(r, s);
            let form = CycloForm::new(&f, r, s, big_h.pow(&f, ell * m1)).unwrap();
            assert_eq!(infer_monomial(&form), Some((Elem::ONE, 0)));
            for m in 1..=ell * m1 {
                let v = monomial_predict(&form, Elem::ONE, 0, m).unwrap();
                assert_eq!(v, gcd(r, ell * m1) == m);
                assert_eq!(v, form.brute_force(m as usize).unwrap().verdict);
            }
        }
    }

    #[test]
    fn fq2_corollary_fixtures() {
        // F_25, q = 5: x^{4q-3} + x = x (x^{4(q-1)} + 1), a = -1, d = 4
        let f25 = build_field(5, 2, None).unwrap();
        let h = Poly::from_terms(&f25, &[(f25.from_int(1), 4), (f25.from_int(1), 0)]);
        let form = CycloForm::new(&f25, 1, 4, h).unwrap();
        let beta = f25.neg(f25.inv(f25.from_int(-1)).unwrap());
        assert!(monomial_predict(&form, beta, -4, 3).unwrap());
        assert!(form.brute_force(3).unwrap().verdict);
        // x^{3q-2} - a x with a^{q+1} = 1, a^2 != 1
        let a = f25.gen_pow(4);
        assert_eq!(f25.pow(a, 6), Elem::ONE);
        assert_ne!(f25.pow(a, 2), Elem::ONE);
        let h = Poly::from_terms(&f25, &[(Elem::ONE, 3), (f25.neg(a), 0)]);
        let form = CycloForm::new(&f25, 1, 4, h).unwrap();
        let beta = f25.neg(f25.inv(a).unwrap());
        assert!(monomial_predict(&form, beta, -3, 2).unwrap());
        assert!(form.brute_force(2).unwrap().verdict);
        assert!(matches!(
            monomial_predict(&form, Elem::ONE, -3, 2),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn hd_lemma_examples() {
        let f16 = build_field(2, 4, None).unwrap();
        assert!(hd_root_lemma(4, 3, 1, 5));
        assert!(hd_root_scan(&f16, 3, 1, 5).unwrap());
        for p in [2, 3, 5, 7] {
            let f = build_field(p, 1, None).unwrap();
            for d in 1..=12 {
                let at_one = Poly::geometric(d as usize).eval(&f, Elem::ONE);
                assert_eq!(at_one.is_zero(), d % p == 0);
            }
        }
    }

    #[test]
    fn hd_q_plus_one_case_over_f9() {
        let f9 = build_field(3, 2, None).unwrap();
        let mut checked = 0;
        for ell in [1, 2, 4] {
            for r in 1..=16 {
                for d in 1..=5 {
                    for e in 1..=3 {
                        for t in 1..=2 {
                            let params = HdParams {
                                base_degree: 1,
                                ell,
                                r,
                                d,
                                e,
                                t,
                                outer: None,
                            };
                            let Ok(form) = params.form(&f9) else { continue };
                            for m in 1..=ell * form.m1() {
                                match hd_family_predict(&f9, &params, m) {
                                    Ok((_, v)) => {
                                        checked += 1;
                                        assert_eq!(
                                            v,
                                            form.brute_force(m as usize).unwrap().verdict,
                                            "{params:?} m={m}"
                                        );
                                    }
                                    Err(Error::Hypothesis { .. }) => {}
                                    Err(e) => panic!("{e}"),
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn lift_examples() {
        let f9 = build_field(3, 2, None).unwrap();
        // f = x permutes F_9; s = 2, ell = 4; M = c with eps c^s = 1 and t = 0
        let base = CycloForm::new(&f9, 1, 2, Poly::one()).unwrap();
        let c = f9.gen_pow(2);
        let eps = f9.inv(f9.pow(c, 2)).unwrap();
        let lift = lift_from_permutation(&base, &Poly::constant(c), eps, 0, 3).unwrap();
        assert_eq!(lift.predicted, 1);
        assert!(lift.observed);
        // M = x^3: x^t M^2 = x^{t+6}, equal to 1 on U_4 when t = 2
        let m_poly = Poly::monomial(Elem::ONE, 3);
        for k in 1..=4 {
            let lift = lift_from_permutation(&base, &m_poly, Elem::ONE, 2, k).unwrap();
            assert_eq!(lift.predicted, gcd(1 + 2 * k, 2));
            assert!(lift.observed);
        }
        assert!(lift_from_permutation(&base, &m_poly, Elem::ONE, 1, 1).is_err());
        let not_perm = CycloForm::new(&f9, 2, 2, Poly::one()).unwrap();
        assert!(lift_from_permutation(&not_perm, &m_poly, Elem::ONE, 2, 1).is_err());
    }

    #[test]
    fn transfer_preserves_every_multiplicity() {
        let f13 = build_field(13, 1, None).unwrap();
        // s = 4, ell = 3, r = 2 so m1 = 2; with M = x^4 and t = 2,
        // x^{t/m1} M(x)^{s/m1} = x^9 = 1 on U_3
        let m_poly = Poly::monomial(Elem::ONE, 4);
        for h in [
            Poly::one(),
            Poly::from_ints(&f13, &[2, 1]),
            Poly::from_ints(&f13, &[5, 0, 1]),
        ] {
            let Ok(form) = CycloForm::new(&f13, 2, 4, h) else {
                continue;
            };
            for k in 1..=5 {
                match transfer_form(&form, &m_poly, Elem::ONE, 2, k) {
                    Ok(lifted) => {
                        for m in 1..=12 {
                            assert_eq!(
                                lifted.brute_force(m).unwrap().verdict,
                                form.brute_force(m).unwrap().verdict
                            );
                        }
                    }
                    Err(Error::Hypothesis { .. }) => assert_ne!(gcd(2 + 2 * k, 4), 2),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn induced_square_supports_constructions() {
        let form = f29_form();
        let dec = form.decompose().unwrap();
        let sq = dec.square(&form).unwrap();
        let rep = crate::criteria::construction2_verdict(&sq, 2, 12).unwrap();
        assert!(rep.lhs && rep.rhs);
        let rep = crate::criteria::construction2_verdict(&sq, 2, 6).unwrap();
        assert!(!rep.lhs && !rep.rhs);
        // h = 1 gives g = x on U_7, injective, so Construction 1 applies
        let plain = CycloForm::new(form.field(), 2, 4, Poly::one()).unwrap();
        let pdec = plain.decompose().unwrap();
        let psq = pdec.square(&plain).unwrap();
        let rep = crate::criteria::construction1_verdict(&psq, 2).unwrap();
        assert!(rep.agree && rep.lhs);
    }
}
