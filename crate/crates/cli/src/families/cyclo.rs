//! Families over x^r h(x^s).

use std::collections::BTreeMap;
use std::time::Instant;

use mtoone_core::arith::{gcd, gcd_signed};
use mtoone_core::cyclotomic::{self as cy, Conjunct, CycloForm, HdParams};
use mtoone_core::galois::{Elem, GaloisField, Poly, SparsePoly};
use mtoone_core::multiplicity::Fibers;
use mtoone_core::unitline::{QuadExt, FULL_SCAN_LIMIT};
use mtoone_core::Error;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::{divisors, fields_of, observe, random_rootless};
use crate::grid::{prime_power, Grid};
use crate::report::{Params, Record};
use crate::{fan, params, scale, CliError, VerifyConfig};

const MAIN_Q: [u64; 12] = [5, 7, 8, 9, 11, 13, 16, 25, 27, 29, 49, 64];
const SMALL_Q: [u64; 11] = [7, 9, 11, 13, 16, 19, 25, 29, 31, 37, 49];
const COROLLARY_Q: [u64; 12] = [7, 9, 11, 13, 16, 19, 25, 27, 29, 31, 37, 64];
const BRIDGE_Q: [u64; 7] = [5, 7, 8, 9, 11, 13, 16];
const MONOMIAL_Q: [u64; 5] = [3, 4, 5, 7, 8];
const LIFT_Q: [u64; 6] = [7, 9, 11, 13, 16, 25];

fn conjunct_name(c: Conjunct) -> &'static str {
    match c {
        Conjunct::M1Divides => "m1 does not divide m",
        Conjunct::SubgroupMultiplicity => "g is not (m/m1)-to-1 on U_ell",
        Conjunct::ExceptionalBound => "s (ell mod m/m1) >= m",
    }
}

/// r values from the grid, or 1..=hi.
fn r_values(grid: &Grid, hi: u64) -> Vec<u64> {
    match &grid.r {
        Some(rs) => rs.iter().copied().filter(|&r| r >= 1).collect(),
        None => (1..=hi).collect(),
    }
}

fn form_params(field: &GaloisField, form: &CycloForm, h: &Poly) -> Params {
    params! {
        "q" => field.q(),
        "s" => form.s(),
        "r" => form.r(),
        "h" => h.display(field),
        "ell" => form.ell(),
        "m1" => form.m1(),
    }
}

/// Main criterion against the scan of F_q^*, over 1..=min(ell m1, cap) filtered by the grid.
fn main_record(
    family: &str,
    params: Params,
    form: &CycloForm,
    cap: Option<u64>,
    grid: &Grid,
    nonzero: &[Elem],
) -> Record {
    let start = Instant::now();
    let dec = match form.decompose() {
        Ok(d) => d,
        Err(e) => {
            return Record::checked(family, params, "decomposition", e.to_string()).timed(start)
        }
    };
    let top = dec.max_m().min(cap.unwrap_or(u64::MAX));
    let ms: Vec<u64> = (1..=top).filter(|&m| grid.keeps_m(m)).collect();
    let mut predicted = Vec::new();
    let mut failed = BTreeMap::new();
    for &m in &ms {
        let p = dec.predict(m).expect("m within ell m1");
        if p.verdict {
            predicted.push(m);
        } else if let Some(c) = p.failed {
            failed.insert(m, conjunct_name(c).to_string());
        }
    }
    let obs = observe(form.field(), &form.star_fibers(), nonzero, &ms);
    let mut rec = Record::checked(family, params, predicted, obs.set);
    rec.failed_conjunct = failed;
    rec.exceptional_set = obs.exceptional;
    rec.timed(start)
}

/// h = x^5 + x^4 + 15x^3 + 1 with r = 2, s = 4 over F_29.
fn f29_reference(field: &GaloisField) -> (Poly, u64, u64) {
    (Poly::from_ints(field, &[1, 0, 0, 15, 1, 1]), 2, 4)
}

pub fn main_grid(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let draws = cfg.draws_or(200);
    let mut cells = Vec::new();
    for field in fields_of(&cfg.grid.q_or(&MAIN_Q))? {
        for s in divisors(field.q() - 1) {
            cells.push((field.clone(), s));
        }
    }
    Ok(fan(cells, |(field, s)| main_cell(cfg, field, *s, draws)))
}

fn main_cell(cfg: &VerifyConfig, field: &GaloisField, s: u64, draws: usize) -> Vec<Record> {
    let q = field.q();
    let unit = field.unity_subgroup((q - 1) / s).expect("s divides q - 1");
    let nonzero = field.nonzero();
    let cap = if cfg.all { None } else { Some(16) };
    let rs = r_values(&cfg.grid, 2 * s);
    let mut rng = cfg.rng(&[1, q, s]);
    let mut out = Vec::new();
    for i in 0..draws {
        let Some(h) = random_rootless(field, &unit, 5, &mut rng) else {
            break;
        };
        for &r in &rs {
            let form = CycloForm::new(field, r, s, h.clone()).expect("rootless by construction");
            let mut p = form_params(field, &form, &h);
            p.insert("draw".into(), json!(i));
            out.push(main_record("main", p, &form, cap, &cfg.grid, &nonzero));
        }
    }
    if q == 29 && s == 4 {
        let (h, r, s) = f29_reference(field);
        let form = CycloForm::new(field, r, s, h.clone()).expect("reference h is rootless");
        let mut p = form_params(field, &form, &h);
        p.insert("instance".into(), json!("reference"));
        out.push(main_record("main", p, &form, cap, &cfg.grid, &nonzero));
    }
    out
}

/// Cells (field, s) with ell = (q-1)/s accepted by `keep`.
fn cells_by<F: Fn(u64, u64) -> bool>(
    qs: &[u64],
    keep: F,
) -> Result<Vec<(GaloisField, u64)>, CliError> {
    let mut cells = Vec::new();
    for field in fields_of(qs)? {
        let order = field.q() - 1;
        for s in divisors(order) {
            if keep(s, order / s) {
                cells.push((field.clone(), s));
            }
        }
    }
    Ok(cells)
}

pub fn small_m(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let draws = cfg.draws_or(40);
    let cells = cells_by(&cfg.grid.q_or(&SMALL_Q), |s, ell| s >= 2 && ell >= 2)?;
    Ok(fan(cells, |(field, s)| {
        let q = field.q();
        let ell = (q - 1) / s;
        let unit = field.unity_subgroup(ell).expect("divisor");
        let mut rng = cfg.rng(&[2, q, *s]);
        let mut out = Vec::new();
        for i in 0..draws {
            let Some(h) = random_rootless(field, &unit, 5, &mut rng) else {
                break;
            };
            for r in r_values(&cfg.grid, 2 * s) {
                let start = Instant::now();
                let form = CycloForm::new(field, r, *s, h.clone()).expect("rootless");
                let dec = form.decompose().expect("decomposes");
                let fibers = form.star_fibers();
                for m in [2, 3]
                    .into_iter()
                    .filter(|&m| ell >= m && cfg.grid.keeps_m(m))
                {
                    let (verdict, case) = dec.small_m(m).expect("s >= 2 and ell >= m");
                    let main = dec.predict(m).map(|p| p.verdict).unwrap_or(false);
                    let seen = fibers.is_m_to_1(m as usize);
                    let mut p = form_params(field, &form, &h);
                    p.insert("draw".into(), json!(i));
                    p.insert("m".into(), json!(m));
                    p.insert("case".into(), json!(case));
                    out.push(
                        Record::checked("small-m", p, verdict, seen)
                            .require(main == seen, "main criterion disagrees with the scan")
                            .timed(start),
                    );
                }
            }
        }
        out
    }))
}

pub fn small_ell(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let draws = cfg.draws_or(40);
    let cells = cells_by(&cfg.grid.q_or(&SMALL_Q), |_, ell| ell == 2 || ell == 3)?;
    Ok(fan(cells, |(field, s)| {
        let q = field.q();
        let unit = field.unity_subgroup((q - 1) / s).expect("divisor");
        let nonzero = field.nonzero();
        let mut rng = cfg.rng(&[3, q, *s]);
        let mut out = Vec::new();
        for i in 0..draws {
            let Some(h) = random_rootless(field, &unit, 5, &mut rng) else {
                break;
            };
            for r in r_values(&cfg.grid, 2 * s) {
                let start = Instant::now();
                let form = CycloForm::new(field, r, *s, h.clone()).expect("rootless");
                let dec = form.decompose().expect("decomposes");
                let ms: Vec<u64> = (1..=dec.max_m()).filter(|&m| cfg.grid.keeps_m(m)).collect();
                let small: Vec<u64> = ms
                    .iter()
                    .copied()
                    .filter(|&m| dec.small_ell(m).unwrap())
                    .collect();
                let main: Vec<u64> = ms
                    .iter()
                    .copied()
                    .filter(|&m| dec.predict(m).unwrap().verdict)
                    .collect();
                let obs = observe(field, &form.star_fibers(), &nonzero, &ms);
                let same = main == obs.set;
                let mut p = form_params(field, &form, &h);
                p.insert("draw".into(), json!(i));
                let mut rec = Record::checked("small-ell", p, small, obs.set);
                rec.exceptional_set = obs.exceptional;
                out.push(
                    rec.require(same, "main criterion disagrees with the scan")
                        .timed(start),
                );
            }
        }
        out
    }))
}

fn sparse_star(field: &GaloisField, poly: &SparsePoly) -> Fibers {
    Fibers::from_codes(
        field.nonzero().into_iter().map(|x| poly.eval(field, x).0),
        field.q() as usize,
    )
}

/// Corollary condition forms, each evaluated from its own closed formula.
pub fn corollaries(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let fields = fields_of(&cfg.grid.q_or(&COROLLARY_Q))?;
    let mut cells = Vec::new();
    for field in fields {
        let q = field.q();
        if q % 2 == 1 && (q - 1) % 3 == 0 && q >= 7 {
            cells.push((field.clone(), "m2-quadratic"));
        }
        if q % 2 == 1 {
            cells.push((field.clone(), "ell2-linear"));
        }
        if (q - 1) % 3 == 0 {
            cells.push((field.clone(), "ell3-linear"));
        }
    }
    Ok(fan(cells, |(field, which)| {
        corollary_cell(cfg, field, which)
    }))
}

fn corollary_cell(cfg: &VerifyConfig, f: &GaloisField, which: &str) -> Vec<Record> {
    let q = f.q();
    let one = Elem::ONE;
    let minus = |a: Elem, b: Elem| f.sub(a, b);
    let mut out = Vec::new();
    for a in f.elements() {
        for r in r_values(&cfg.grid, q - 1) {
            let start = Instant::now();
            let (s, m, predicted, poly, h) = match which {
                "m2-quadratic" => {
                    if a == one || a == f.from_int(-2) {
                        continue;
                    }
                    let s = (q - 1) / 3;
                    let omega = f.gen_pow(s);
                    let v = f.pow(
                        f.mul(f.pow(minus(a, one), 5), f.add(a, f.from_int(2))),
                        (q - 1) / 6,
                    );
                    let pred = gcd(r, s) == 2
                        && matches!(r % 6, 2 | 4)
                        && v != omega
                        && v != f.mul(omega, omega);
                    let poly = SparsePoly::new(vec![(one, r + 2 * s), (one, r + s), (a, r)]);
                    (s, 2, pred, poly, Poly::new(vec![a, one, one]))
                }
                "ell2-linear" => {
                    if a == one || a == f.from_int(-1) {
                        continue;
                    }
                    let s = (q - 1) / 2;
                    let m1 = gcd(r, s);
                    let sign = |e: u64| {
                        if e.is_multiple_of(2) {
                            one
                        } else {
                            f.from_int(-1)
                        }
                    };
                    let case1 = m1 == 1 && f.pow(minus(f.mul(a, a), one), s) == sign(r);
                    let case2 = m1 == 2 && {
                        let ratio = f.div(f.add(a, one), minus(a, one)).expect("a != 1");
                        f.pow(ratio, (q - 1) / 4) != sign(r / 2)
                    };
                    let poly = SparsePoly::new(vec![(one, r + s), (a, r)]);
                    (s, 2, case1 || case2, poly, Poly::new(vec![a, one]))
                }
                _ => {
                    let s = (q - 1) / 3;
                    if f.in_unity_subgroup(a, 3) {
                        continue;
                    }
                    let m1 = gcd(r, s);
                    let r1 = r / m1;
                    let s1 = (q - 1) / gcd(3 * r, q - 1);
                    let omega = f.gen_pow(s);
                    let g = |x: Elem| f.mul(f.pow(x, r1), f.pow(minus(x, a), s1));
                    let vals = [g(one), g(omega), g(f.mul(omega, omega))];
                    let all_equal = vals[0] == vals[1] && vals[1] == vals[2];
                    let distinct = vals[0] != vals[1] && vals[1] != vals[2] && vals[0] != vals[2];
                    let pred = (m1 == 1 && all_equal) || (m1 == 3 && distinct);
                    let poly = SparsePoly::new(vec![(one, r + s), (f.neg(a), r)]);
                    (s, 3, pred, poly, Poly::new(vec![f.neg(a), one]))
                }
            };
            let seen = sparse_star(f, &poly).is_m_to_1(m as usize);
            let main = CycloForm::new(f, r, s, h)
                .and_then(|form| cy::main_predict(&form, m))
                .map(|p| p.verdict);
            let p =
                params! {"corollary" => which, "q" => q, "a" => f.display(a), "r" => r, "m" => m};
            let rec = Record::checked("corollaries", p, predicted, seen);
            out.push(
                rec.require(main == Ok(seen), "main criterion disagrees with the scan")
                    .timed(start),
            );
        }
    }
    out
}

pub fn fq_bridge(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let draws = cfg.draws_or(6);
    let cells = cells_by(&cfg.grid.q_or(&BRIDGE_Q), |_, _| true)?;
    Ok(fan(cells, |(field, s)| {
        let q = field.q();
        let unit = field.unity_subgroup((q - 1) / s).expect("divisor");
        let elements = field.elements();
        let mut rng = cfg.rng(&[5, q, *s]);
        let mut out = Vec::new();
        for i in 0..draws {
            let Some(h) = random_rootless(field, &unit, 3, &mut rng) else {
                break;
            };
            for r in r_values(&cfg.grid, 2 * s) {
                let start = Instant::now();
                let form = CycloForm::new(field, r, *s, h.clone()).expect("rootless");
                let ms: Vec<u64> = (1..=q).filter(|&m| cfg.grid.keeps_m(m)).collect();
                let predicted: Vec<u64> = ms
                    .iter()
                    .copied()
                    .filter(|&m| cy::fq_bridge(&form, m).unwrap())
                    .collect();
                let full = Fibers::from_codes(elements.iter().map(|&x| form.eval(x).0), q as usize);
                let obs = observe(field, &full, &elements, &ms);
                let mut p = form_params(field, &form, &h);
                p.insert("draw".into(), json!(i));
                let mut rec = Record::checked("fq-bridge", p, predicted, obs.set);
                rec.exceptional_set = obs.exceptional;
                out.push(rec.timed(start));
            }
        }
        out
    }))
}

fn quad_ext(q: u64) -> Result<QuadExt, CliError> {
    if prime_power(q).is_none() {
        return Err(CliError::Usage(format!("q = {q} is not a prime power")));
    }
    if q * q > FULL_SCAN_LIMIT {
        return Err(scale(format!(
            "q^2 = {} exceeds the full-scan limit {FULL_SCAN_LIMIT}",
            q * q
        )));
    }
    Ok(QuadExt::from_q(q)?)
}

/// f = x^r (x^{d(q-1)} - a)^{k m1} over F_{q^2} with a in U_{q+1}, plus the worked examples.
pub fn monomial(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let mut cells = Vec::new();
    for q in cfg.grid.q_or(&MONOMIAL_Q) {
        let ext = quad_ext(q)?;
        let ds = cfg.grid.d.clone().unwrap_or_else(|| (1..=q + 1).collect());
        for d in ds.into_iter().filter(|&d| d >= 1) {
            cells.push((ext.clone(), Some(d)));
        }
        cells.push((ext, None));
    }
    Ok(fan(cells, |(ext, d)| match d {
        Some(d) => monomial_cell(cfg, ext, *d),
        None => monomial_examples(ext),
    }))
}

fn monomial_cell(cfg: &VerifyConfig, ext: &QuadExt, d: u64) -> Vec<Record> {
    let f = ext.field();
    let q = ext.q();
    let nonzero = f.nonzero();
    let ks = cfg.grid.k.clone().unwrap_or_else(|| (1..=4).collect());
    let rs = r_values(&cfg.grid, 12);
    let t = (q + 1) / gcd(d, q + 1);
    let mut out = Vec::new();
    for &k in ks.iter().filter(|&&k| k >= 1) {
        for &r in &rs {
            for &a in ext.unit() {
                let start = Instant::now();
                let m1 = gcd(r, q - 1);
                let hyp = f.pow(a, t) != Elem::ONE;
                let base = Poly::from_terms(f, &[(Elem::ONE, d as usize), (f.neg(a), 0)]);
                let p = params! {"q" => q, "d" => d, "k" => k, "r" => r, "a" => f.display(a), "m1" => m1};
                let form = match CycloForm::powered(f, r, q - 1, base, k * m1) {
                    Ok(form) => form,
                    Err(Error::Hypothesis { .. }) => {
                        let rec = Record::checked(
                            "monomial",
                            p,
                            json!({"rootless": hyp}),
                            json!({"rootless": false}),
                        );
                        out.push(rec.timed(start));
                        continue;
                    }
                    Err(e) => {
                        out.push(
                            Record::checked("monomial", p, "form", e.to_string()).timed(start),
                        );
                        continue;
                    }
                };
                let r1 = (r / m1) as i128;
                let ms: Vec<u64> = (1..=m1 * (q + 1))
                    .filter(|&m| cfg.grid.keeps_m(m))
                    .collect();
                let predicted: Vec<u64> = ms
                    .iter()
                    .copied()
                    .filter(|&m| m % m1 == 0 && gcd_signed(r1 - (k * d) as i128, q + 1) == m / m1)
                    .collect();
                let beta = f.inv(f.pow(f.neg(a), k)).expect("a is a unit");
                let tt = -((k * d) as i64);
                let via_theorem: Result<Vec<u64>, Error> = ms
                    .iter()
                    .map(|&m| cy::monomial_predict(&form, beta, tt, m).map(|v| (m, v)))
                    .filter(|x| !matches!(x, Ok((_, false))))
                    .map(|x| x.map(|(m, _)| m))
                    .collect();
                let obs = observe(f, &form.star_fibers(), &nonzero, &ms);
                let mut rec = Record::checked(
                    "monomial",
                    p,
                    json!({"rootless": hyp, "multiplicities": predicted}),
                    json!({"rootless": true, "multiplicities": obs.set}),
                );
                rec.exceptional_set = obs.exceptional;
                let ok = via_theorem.as_ref().is_ok_and(|v| *v == predicted);
                let why = match &via_theorem {
                    Err(e) => format!("monomial predicate failed: {e}"),
                    Ok(_) => "monomial predicate disagrees with the closed form".into(),
                };
                out.push(rec.require(ok, why).timed(start));
            }
        }
    }
    out
}

fn monomial_examples(ext: &QuadExt) -> Vec<Record> {
    let f = ext.field();
    let q = ext.q();
    let one = Elem::ONE;
    let mut out = Vec::new();
    let mut push = |name: &str, a: Option<Elem>, m: u64, poly: SparsePoly| {
        let start = Instant::now();
        let seen = sparse_star(f, &poly).is_m_to_1(m as usize);
        let p = params! {"example" => name, "q" => q, "a" => a.map(|a| f.display(a))};
        out.push(Record::checked("monomial", p, true, seen).timed(start));
    };
    let good_a: Vec<Elem> = if (q + 1).is_multiple_of(3) {
        ext.unit()
            .iter()
            .copied()
            .filter(|&a| f.pow(a, (q + 1) / 3) != one)
            .collect()
    } else {
        Vec::new()
    };
    if q % 2 == 1 && (q + 1).is_multiple_of(3) && !(q + 1).is_multiple_of(8) {
        push(
            "x^{4q-3} + x is 3-to-1",
            None,
            3,
            SparsePoly::new(vec![(one, 4 * q - 3), (one, 1)]),
        );
    }
    if q.is_multiple_of(2) && q.trailing_zeros() % 2 == 1 {
        for &a in &good_a {
            push(
                "x^{3q+3} + a x^6 is 3-to-1",
                Some(a),
                3,
                SparsePoly::new(vec![(one, 3 * q + 3), (a, 6)]),
            );
        }
    }
    if q % 2 == 1 && (q + 1).is_multiple_of(3) {
        for &a in &good_a {
            push(
                "x^{3q-2} - a x is 2-to-1",
                Some(a),
                2,
                SparsePoly::new(vec![(one, 3 * q - 2), (f.neg(a), 1)]),
            );
        }
    }
    out
}

pub fn hd_lemma(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let default: Vec<u64> = (2..=64).filter(|&q| prime_power(q).is_some()).collect();
    let fields = fields_of(&cfg.grid.q_or(&default))?;
    let ds = cfg.grid.d.clone().unwrap_or_else(|| (1..=12).collect());
    Ok(fan(fields, |field| {
        let q = field.q();
        let mut out = Vec::new();
        for ell in divisors(q - 1) {
            for &d in ds.iter().filter(|&&d| d >= 1) {
                for e in 1..=12 {
                    let start = Instant::now();
                    let lemma = cy::hd_root_lemma(q, d, e, ell);
                    let scan = cy::hd_root_scan(field, d, e, ell).expect("ell divides q - 1");
                    let p = params! {"q" => q, "ell" => ell, "d" => d, "e" => e};
                    out.push(Record::checked("hd-lemma", p, lemma, scan).timed(start));
                }
            }
        }
        out
    }))
}

/// h_d families over F_{q^n}: q from --q (default 2..5), n from --n (default 2..4), q^n <= 256
/// unless given explicitly.
pub fn hd(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let explicit = cfg.grid.q.is_some() || cfg.grid.n.is_some();
    let mut cells = Vec::new();
    for q in cfg.grid.q_or(&[2, 3, 4, 5]) {
        let (p, bd) = prime_power(q)
            .ok_or_else(|| CliError::Usage(format!("q = {q} is not a prime power")))?;
        for n in cfg.grid.n_or(&[2, 3, 4]) {
            let big = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if big > 4096 {
                if explicit {
                    return Err(scale(format!("q^n = {q}^{n} exceeds 4096")));
                }
                continue;
            }
            if !explicit && big > 256 {
                continue;
            }
            let field = mtoone_core::build_field(p, bd * n as u32, None)?;
            let order = field.q() - 1;
            let mut ells: Vec<u64> = divisors(q + 1)
                .into_iter()
                .chain(divisors(gcd(q - 1, n)))
                .collect();
            ells.sort_unstable();
            ells.dedup();
            for ell in ells.into_iter().filter(|&l| order % l == 0) {
                cells.push((field.clone(), q, bd, n, ell));
            }
        }
    }
    Ok(fan(cells, |(field, q, bd, n, ell)| {
        hd_cell(cfg, field, *q, *bd, *n, *ell)
    }))
}

fn hd_cell(
    cfg: &VerifyConfig,
    field: &GaloisField,
    q: u64,
    bd: u32,
    n: u64,
    ell: u64,
) -> Vec<Record> {
    let order = field.q() - 1;
    let s = order / ell;
    let nonzero = field.nonzero();
    let sub = field.subfield(bd).expect("bd divides the degree");
    let sub_nonzero: Vec<Elem> = sub.iter().copied().filter(|c| !c.is_zero()).collect();
    let mut rng = cfg.rng(&[8, field.q(), q, ell]);
    let ds = cfg.grid.d.clone().unwrap_or_else(|| (1..=5).collect());
    let mut out = Vec::new();
    for r in r_values(&cfg.grid, 12) {
        let m1 = gcd(r, s);
        let big = ell * m1;
        if !(gcd(q - 1, n).is_multiple_of(big)
            || (n.is_multiple_of(2) && (q + 1).is_multiple_of(big)))
        {
            continue;
        }
        for &d in ds.iter().filter(|&&d| d >= 1) {
            for e in 1..=2 {
                for t in 1..=2 {
                    let mut outers = vec![None];
                    for k in [2u64, 3] {
                        let deg = rng.gen_range(1..=2);
                        let mut coeffs: Vec<Elem> =
                            (0..deg).map(|_| *sub.choose(&mut rng).unwrap()).collect();
                        coeffs.push(*sub_nonzero.choose(&mut rng).unwrap());
                        outers.push(Some((k, Poly::new(coeffs))));
                    }
                    for outer in outers {
                        let start = Instant::now();
                        let outer_desc = outer
                            .as_ref()
                            .map(|(k, h)| format!("k={k} H={}", h.display(field)));
                        let params = HdParams {
                            base_degree: bd,
                            ell,
                            r,
                            d,
                            e,
                            t,
                            outer,
                        };
                        let p = params! {
                            "q" => q, "n" => n, "ell" => ell, "r" => r, "d" => d, "e" => e, "t" => t,
                            "outer" => outer_desc,
                        };
                        let form = match params.form(field) {
                            Ok(form) => form,
                            Err(err) => {
                                out.push(Record::skipped("hd", p, err.to_string()).timed(start));
                                continue;
                            }
                        };
                        let ms: Vec<u64> = (1..=big).filter(|&m| cfg.grid.keeps_m(m)).collect();
                        let verdicts: Result<Vec<_>, Error> = ms
                            .iter()
                            .map(|&m| cy::hd_family_predict(field, &params, m).map(|cv| (m, cv)))
                            .collect();
                        let verdicts = match verdicts {
                            Ok(v) => v,
                            Err(err) => {
                                out.push(
                                    Record::checked("hd", p, "prediction", err.to_string())
                                        .timed(start),
                                );
                                continue;
                            }
                        };
                        let case = verdicts.first().map(|(_, (c, _))| *c);
                        let predicted: Vec<u64> = verdicts
                            .iter()
                            .filter(|(_, (_, v))| *v)
                            .map(|(m, _)| *m)
                            .collect();
                        let obs = observe(field, &form.star_fibers(), &nonzero, &ms);
                        let mut p = p;
                        p.insert("case".into(), json!(case));
                        let mut rec = Record::checked("hd", p, predicted, obs.set);
                        rec.exceptional_set = obs.exceptional;
                        out.push(rec.timed(start));
                    }
                }
            }
        }
    }
    out
}

/// Permutation lifts and the multiplicity-preserving transfer with M = c x^j.
pub fn lift(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let draws = cfg.draws_or(8);
    let cells = cells_by(&cfg.grid.q_or(&LIFT_Q), |s, ell| s >= 2 && ell >= 2)?;
    Ok(fan(cells, |(field, s)| lift_cell(cfg, field, *s, draws)))
}

fn lift_cell(cfg: &VerifyConfig, field: &GaloisField, s: u64, draws: usize) -> Vec<Record> {
    let q = field.q();
    let ell = (q - 1) / s;
    let unit = field.unity_subgroup(ell).expect("divisor");
    let mut rng = cfg.rng(&[9, q, s]);
    let mut perms = Vec::new();
    let mut generic = Vec::new();
    for _ in 0..400 {
        if perms.len() >= draws && generic.len() >= draws {
            break;
        }
        let Some(h) = random_rootless(field, &unit, 3, &mut rng) else {
            break;
        };
        let r = rng.gen_range(1..=2 * s);
        let form = CycloForm::new(field, r, s, h.clone()).expect("rootless");
        if form.star_fibers().is_m_to_1(1) {
            if perms.len() < draws {
                perms.push((form, h));
            }
        } else if generic.len() < draws {
            generic.push((form, h));
        }
    }
    let mut out = Vec::new();
    for (i, (form, h)) in perms.iter().enumerate() {
        let c = field.gen_pow(rng.gen_range(0..q - 1));
        let j = rng.gen_range(0..=3u64);
        let multiplier = Poly::monomial(c, j as usize);
        let eps = field.inv(field.pow(c, s)).expect("c nonzero");
        for t in (0..=2 * ell).filter(|t| (t + j * s).is_multiple_of(ell)) {
            for k in 1..=3 {
                let start = Instant::now();
                let mut p = form_params(field, form, h);
                p.extend(params! {"kind" => "lift", "draw" => i, "M" => multiplier.display(field), "t" => t, "k" => k});
                match cy::lift_from_permutation(form, &multiplier, eps, t, k) {
                    Ok(l) => out.push(
                        Record::checked(
                            "lift",
                            p,
                            json!({"m": l.predicted, "m_to_1": true}),
                            json!({"m": l.predicted, "m_to_1": l.observed}),
                        )
                        .timed(start),
                    ),
                    Err(e) => out.push(Record::skipped("lift", p, e.to_string()).timed(start)),
                }
            }
        }
    }
    let nonzero = field.nonzero();
    for (i, (form, h)) in generic.iter().enumerate() {
        let m1 = form.m1();
        let c = field.gen_pow(rng.gen_range(0..q - 1));
        let j = rng.gen_range(0..=3u64);
        let multiplier = Poly::monomial(c, j as usize);
        let eps = field.inv(field.pow(c, s / m1)).expect("c nonzero");
        let ms: Vec<u64> = (1..=ell * m1).collect();
        let before = observe(field, &form.star_fibers(), &nonzero, &ms).set;
        for t in (0..=2 * ell * m1)
            .filter(|t| t % m1 == 0 && (t / m1 + j * (s / m1)).is_multiple_of(ell))
        {
            for k in 1..=3 {
                let start = Instant::now();
                let mut p = form_params(field, form, h);
                p.extend(params! {"kind" => "transfer", "draw" => i, "M" => multiplier.display(field), "t" => t, "k" => k});
                match cy::transfer_form(form, &multiplier, eps, t, k) {
                    Ok(lifted) => {
                        let after = observe(field, &lifted.star_fibers(), &nonzero, &ms).set;
                        out.push(Record::checked("lift", p, &before, after).timed(start));
                    }
                    Err(e) => out.push(Record::skipped("lift", p, e.to_string()).timed(start)),
                }
            }
        }
    }
    out
}
