//! Random parameter draws for the tower families.
//!
//! Parameters are drawn so that the lemma conditions fail a fair fraction of
//! the time; each draw records whether they hold so the scans can be compared.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{choose_r, QuadExt, Tower, TowerShape, Twisted};
use crate::arith::{divisors, gcd};
use crate::error::{Error, Result};
use crate::galois::{Elem, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerFamily {
    /// U -> U with L = δ^q x^k + γ^q, M = γ x^k + δ and outer layer αx + β.
    R1,
    /// R1 with k = 1.
    R1L1,
    /// R1 with L = x^5 + x^4 + x, M = x^4 + x + 1.
    R1L5,
    /// U -> U with outer layer (cx^3 + x^2 + 1)/(x^3 + x + c), q even.
    R3,
    /// R3 with k = 1.
    R3L1,
    /// U -> F_q ∪ {∞} with L = γ x^k + γ^q, M = δ x^k + δ^q and N = αx + β.
    LineR1,
    /// LineR1 with k = 1.
    LineR1L1,
    /// U -> F_q ∪ {∞} with N = γ'(αx + β)^K + δ'(α^q x + β^q)^K.
    Rk,
    /// Rk with L = x + 1 and M = θx + θ^q.
    RkL1,
    /// The x + 1/(x+α) + 1/(x+α^q) construction, q even.
    Gbar,
}

impl TowerFamily {
    pub const ALL: [TowerFamily; 10] = [
        TowerFamily::R1,
        TowerFamily::R1L1,
        TowerFamily::R1L5,
        TowerFamily::R3,
        TowerFamily::R3L1,
        TowerFamily::LineR1,
        TowerFamily::LineR1L1,
        TowerFamily::Rk,
        TowerFamily::RkL1,
        TowerFamily::Gbar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TowerFamily::R1 => "r1",
            TowerFamily::R1L1 => "r1-l1",
            TowerFamily::R1L5 => "r1-l5",
            TowerFamily::R3 => "r3",
            TowerFamily::R3L1 => "r3-l1",
            TowerFamily::LineR1 => "line-r1",
            TowerFamily::LineR1L1 => "line-r1-l1",
            TowerFamily::Rk => "rk",
            TowerFamily::RkL1 => "rk-l1",
            TowerFamily::Gbar => "gbar",
        }
    }

    /// Whether the family is defined for this q.
    pub fn applies(self, q: u64) -> bool {
        match self {
            TowerFamily::R3 | TowerFamily::R3L1 | TowerFamily::Gbar | TowerFamily::R1L5 => {
                q.is_multiple_of(2)
            }
            _ => true,
        }
    }
}

impl fmt::Display for TowerFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TowerFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TowerFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown tower family {s:?}")))
    }
}

/// One drawn tower with its exponent r and the lemma conditions' truth value.
#[derive(Clone, Debug)]
pub struct TowerDraw {
    pub tower: Tower,
    pub r: u64,
    pub condition: bool,
    pub params: String,
}

fn any<R: Rng>(ext: &QuadExt, rng: &mut R) -> Elem {
    Elem(rng.gen_range(0..ext.field().q() as u32))
}

fn nonzero<R: Rng>(ext: &QuadExt, rng: &mut R) -> Elem {
    ext.field().gen_pow(rng.gen_range(0..ext.field().q() - 1))
}

fn unit<R: Rng>(ext: &QuadExt, rng: &mut R) -> Elem {
    ext.field()
        .gen_pow((ext.q() - 1) * rng.gen_range(0..ext.q() + 1))
}

fn base_nonzero<R: Rng>(ext: &QuadExt, rng: &mut R) -> Elem {
    ext.field()
        .gen_pow((ext.q() + 1) * rng.gen_range(0..ext.q() - 1))
}

/// A pair (x, y), with y forced onto the lemma's bad locus a quarter of the time.
fn pair<R: Rng>(ext: &QuadExt, rng: &mut R, bad: impl Fn(Elem, &mut R) -> Elem) -> (Elem, Elem) {
    let x = any(ext, rng);
    let y = if rng.gen_bool(0.25) {
        bad(x, rng)
    } else {
        any(ext, rng)
    };
    (x, y)
}

/// Pair with y^{q+1} = x^{q+1} on the bad locus.
fn unit_pair<R: Rng>(ext: &QuadExt, rng: &mut R) -> (Elem, Elem) {
    pair(ext, rng, |x, rng| ext.field().mul(x, unit(ext, rng)))
}

/// Pair with y^{q-1} = x^{q-1} on the bad locus.
fn line_pair<R: Rng>(ext: &QuadExt, rng: &mut R) -> (Elem, Elem) {
    pair(ext, rng, |x, rng| {
        ext.field().mul(x, base_nonzero(ext, rng))
    })
}

/// An exponent in 1..=q+1, coprime to q + 1 three times out of four.
fn exponent<R: Rng>(ext: &QuadExt, rng: &mut R) -> u64 {
    let q1 = ext.q() + 1;
    if rng.gen_bool(0.75) {
        let coprime: Vec<u64> = (1..=q1).filter(|&k| gcd(k, q1) == 1).collect();
        *coprime.choose(rng).unwrap()
    } else {
        rng.gen_range(1..=q1)
    }
}

fn norms_differ(ext: &QuadExt, x: Elem, y: Elem) -> bool {
    ext.norm(x) != ext.norm(y)
}

fn line_ok(ext: &QuadExt, x: Elem, y: Elem) -> bool {
    let f = ext.field();
    !x.is_zero() && !y.is_zero() && f.pow(x, ext.q() - 1) != f.pow(y, ext.q() - 1)
}

/// L = δ^q x^k + γ^q, M = γ x^k + δ: L = x^k M^q on U.
fn unit_layer(ext: &QuadExt, gamma: Elem, delta: Elem, k: u64) -> Twisted {
    let l = Poly::from_terms(
        ext.field(),
        &[(ext.frob(delta), k as usize), (ext.frob(gamma), 0)],
    );
    let m = Poly::from_terms(ext.field(), &[(gamma, k as usize), (delta, 0)]);
    Twisted {
        l,
        m,
        eps: Elem::ONE,
        t: k,
    }
}

/// γ x^k + γ^q: equal to x^k times its own conjugate on U.
fn line_poly(ext: &QuadExt, gamma: Elem, k: u64) -> Poly {
    Poly::from_terms(ext.field(), &[(gamma, k as usize), (ext.frob(gamma), 0)])
}

fn trace_shift_zero(ext: &QuadExt, c: Elem) -> bool {
    let f = ext.field();
    ext.base_trace(f.add(Elem::ONE, f.inv(c).unwrap()))
        .map(|t| t.is_zero())
        .unwrap_or(false)
}

fn show(ext: &QuadExt, x: Elem) -> String {
    ext.field().display(x)
}

/// The inner layer for the line families: (L, M, t, condition, description).
fn line_layer<R: Rng>(ext: &QuadExt, rng: &mut R, unit_k: bool) -> (Poly, Poly, u64, bool, String) {
    let k = if unit_k { 1 } else { exponent(ext, rng) };
    let (gamma, delta) = line_pair(ext, rng);
    let cond = line_ok(ext, gamma, delta) && gcd(k, ext.q() + 1) == 1;
    let desc = format!(
        "L=({})x^{k}+conj M=({})x^{k}+conj",
        show(ext, gamma),
        show(ext, delta)
    );
    (
        line_poly(ext, gamma, k),
        line_poly(ext, delta, k),
        k,
        cond,
        desc,
    )
}

/// N = γ'(αx + β)^K + δ'(α^q x + β^q)^K, so that N^(q)/N is ℓ1 ∘ x^K ∘ ℓ2^{-1}.
fn lambda_k_poly<R: Rng>(ext: &QuadExt, rng: &mut R, fix_gamma: bool) -> (Poly, bool, String) {
    let f = ext.field();
    let (a, b) = line_pair(ext, rng);
    let big_k = exponent(ext, rng);
    let (gp, dp) = if fix_gamma {
        let d = if rng.gen_bool(0.25) {
            unit(ext, rng)
        } else {
            any(ext, rng)
        };
        (Elem::ONE, d)
    } else {
        unit_pair(ext, rng)
    };
    let left = Poly::new(vec![b, a]).pow(f, big_k).scale(f, gp);
    let right = Poly::new(vec![ext.frob(b), ext.frob(a)])
        .pow(f, big_k)
        .scale(f, dp);
    let cond = line_ok(ext, a, b) && norms_differ(ext, gp, dp) && gcd(big_k, ext.q() + 1) == 1;
    let desc = format!(
        "N: a={} b={} K={big_k} g'={} d'={}",
        show(ext, a),
        show(ext, b),
        show(ext, gp),
        show(ext, dp)
    );
    (left.add(f, &right), cond, desc)
}

fn pick_r<R: Rng>(ext: &QuadExt, rng: &mut R, residue: u64) -> Option<u64> {
    let mut m1s = divisors(ext.q() - 1);
    m1s.shuffle(rng);
    m1s.into_iter()
        .find_map(|m1| choose_r(ext.q(), residue, m1))
}

/// Draws one instance of `family` over F_{q^2}; `None` when no valid r exists for the
/// drawn residue (the caller redraws).
pub fn draw_tower<R: Rng>(family: TowerFamily, ext: &QuadExt, rng: &mut R) -> Option<TowerDraw> {
    let q = ext.q();
    if !family.applies(q) {
        return None;
    }
    let f = ext.field();
    let (shape, condition, params) = match family {
        TowerFamily::R1
        | TowerFamily::R1L1
        | TowerFamily::R1L5
        | TowerFamily::R3
        | TowerFamily::R3L1 => {
            let n = exponent(ext, rng);
            let (inner, inner_ok, inner_desc) = if family == TowerFamily::R1L5 {
                let l = Poly::from_ints(f, &[0, 1, 0, 0, 1, 1]);
                let m = Poly::from_ints(f, &[1, 1, 0, 0, 1]);
                (
                    Twisted {
                        l,
                        m,
                        eps: Elem::ONE,
                        t: 5,
                    },
                    ext.base_degree() % 4 != 2,
                    "L=x^5+x^4+x M=x^4+x+1".to_string(),
                )
            } else {
                let k = if matches!(family, TowerFamily::R1L1 | TowerFamily::R3L1) {
                    1
                } else {
                    exponent(ext, rng)
                };
                let (gamma, delta) = unit_pair(ext, rng);
                let ok = norms_differ(ext, gamma, delta) && gcd(k, q + 1) == 1;
                (
                    unit_layer(ext, gamma, delta, k),
                    ok,
                    format!("g={} d={} k={k}", show(ext, gamma), show(ext, delta)),
                )
            };
            let (outer, outer_ok, outer_desc) =
                if matches!(family, TowerFamily::R3 | TowerFamily::R3L1) {
                    let c = base_nonzero(ext, rng);
                    let l = Poly::new(vec![Elem::ONE, Elem::ZERO, Elem::ONE, c]);
                    let m = Poly::new(vec![c, Elem::ONE, Elem::ZERO, Elem::ONE]);
                    (
                        Twisted {
                            l,
                            m,
                            eps: Elem::ONE,
                            t: 3,
                        },
                        trace_shift_zero(ext, c),
                        format!("c={}", show(ext, c)),
                    )
                } else {
                    let (alpha, beta) = unit_pair(ext, rng);
                    let l = Poly::new(vec![ext.frob(alpha), ext.frob(beta)]);
                    let m = Poly::new(vec![beta, alpha]);
                    (
                        Twisted {
                            l,
                            m,
                            eps: Elem::ONE,
                            t: 1,
                        },
                        norms_differ(ext, alpha, beta),
                        format!("a={} b={}", show(ext, alpha), show(ext, beta)),
                    )
                };
            (
                TowerShape::UnitToUnit { inner, outer, n },
                inner_ok && outer_ok,
                format!("{inner_desc} {outer_desc} n={n}"),
            )
        }
        TowerFamily::LineR1 | TowerFamily::LineR1L1 => {
            let (l, m, t, inner_ok, inner_desc) =
                line_layer(ext, rng, family == TowerFamily::LineR1L1);
            let (alpha, beta) = line_pair(ext, rng);
            let n = rng.gen_range(1..=2 * q);
            let shape = TowerShape::UnitToLine {
                l,
                m,
                eps: Elem::ONE,
                t,
                big_n: Poly::new(vec![beta, alpha]),
                n,
            };
            let desc = format!(
                "{inner_desc} N=({})x+({}) n={n}",
                show(ext, alpha),
                show(ext, beta)
            );
            (shape, inner_ok && line_ok(ext, alpha, beta), desc)
        }
        TowerFamily::Rk | TowerFamily::RkL1 => {
            let (l, m, t, inner_ok, inner_desc) = if family == TowerFamily::RkL1 {
                let theta = if rng.gen_bool(0.25) {
                    base_nonzero(ext, rng)
                } else {
                    nonzero(ext, rng)
                };
                let ok = f.pow(theta, q - 1) != Elem::ONE;
                (
                    line_poly(ext, Elem::ONE, 1),
                    line_poly(ext, theta, 1),
                    1,
                    ok,
                    format!("theta={}", show(ext, theta)),
                )
            } else {
                line_layer(ext, rng, false)
            };
            let (big_n, n_ok, n_desc) = lambda_k_poly(ext, rng, family == TowerFamily::RkL1);
            let n = rng.gen_range(1..=2 * q);
            let shape = TowerShape::UnitToLine {
                l,
                m,
                eps: Elem::ONE,
                t,
                big_n,
                n,
            };
            (
                shape,
                inner_ok && n_ok,
                format!("{inner_desc} {n_desc} n={n}"),
            )
        }
        TowerFamily::Gbar => {
            let unit_k = rng.gen_bool(0.5);
            let (l, m, t, inner_ok, inner_desc) = line_layer(ext, rng, unit_k);
            let (big_n, n_ok, n_desc) = if rng.gen_bool(0.5) {
                let (a, b) = line_pair(ext, rng);
                (
                    Poly::new(vec![b, a]),
                    line_ok(ext, a, b),
                    format!("N=({})x+({})", show(ext, a), show(ext, b)),
                )
            } else {
                lambda_k_poly(ext, rng, false)
            };
            // half the draws sit on α + α^q = 1
            let alpha = if rng.gen_bool(0.5) {
                let pool: Vec<Elem> = f
                    .elements()
                    .into_iter()
                    .filter(|&a| f.add(a, ext.frob(a)) == Elem::ONE)
                    .collect();
                *pool.choose(rng).unwrap()
            } else {
                any(ext, rng)
            };
            let shape = TowerShape::FinalGbar {
                l,
                m,
                eps: Elem::ONE,
                t,
                big_n,
                alpha,
            };
            (
                shape,
                inner_ok && n_ok && !ext.in_base(alpha),
                format!("{inner_desc} {n_desc} alpha={}", show(ext, alpha)),
            )
        }
    };
    let tower = Tower::new(ext, shape).ok()?;
    let r = pick_r(ext, rng, tower.residue())?;
    Some(TowerDraw {
        tower,
        r,
        condition,
        params,
    })
}
