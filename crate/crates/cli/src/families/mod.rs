//! Family runners: each turns a grid into records of prediction versus scan.

use std::collections::BTreeMap;

use mtoone_core::build_field;
use mtoone_core::galois::{Elem, GaloisField, Poly};
use mtoone_core::multiplicity::Fibers;
use rand::Rng;

use crate::grid::prime_power;
use crate::report::Record;
use crate::{CliError, Family, VerifyConfig};

mod abstracts;
pub use abstracts::COUNT_LIMIT;
mod cyclo;
mod unit;

pub fn run(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    match cfg.family {
        Family::Main => cyclo::main_grid(cfg),
        Family::SmallM => cyclo::small_m(cfg),
        Family::SmallEll => cyclo::small_ell(cfg),
        Family::Corollaries => cyclo::corollaries(cfg),
        Family::FqBridge => cyclo::fq_bridge(cfg),
        Family::Monomial => cyclo::monomial(cfg),
        Family::HdLemma => cyclo::hd_lemma(cfg),
        Family::Hd => cyclo::hd(cfg),
        Family::Lift => cyclo::lift(cfg),
        Family::Halfplane => unit::halfplane(cfg),
        Family::G3 => unit::g3(cfg),
        Family::G5 => unit::g5(cfg),
        Family::Transfer => unit::transfer(cfg),
        Family::Towers => unit::towers(cfg),
        Family::Count => abstracts::count(cfg),
        Family::Criteria => abstracts::criteria(cfg),
    }
}

/// GF(q) with the default modulus; q must be a prime power.
pub(crate) fn field_of(q: u64) -> Result<GaloisField, CliError> {
    let (p, n) =
        prime_power(q).ok_or_else(|| CliError::Usage(format!("q = {q} is not a prime power")))?;
    Ok(build_field(p, n, None)?)
}

/// Prime powers among the requested q values; the rest are reported as usage errors.
pub(crate) fn fields_of(qs: &[u64]) -> Result<Vec<GaloisField>, CliError> {
    qs.iter().map(|&q| field_of(q)).collect()
}

/// Multiplicities in `ms` for which the fibers are m-to-1, with exceptional points.
pub(crate) struct Observed {
    pub set: Vec<u64>,
    pub exceptional: BTreeMap<u64, Vec<String>>,
}

pub(crate) fn observe(
    field: &GaloisField,
    fibers: &Fibers,
    points: &[Elem],
    ms: &[u64],
) -> Observed {
    let mut set = Vec::new();
    let mut exceptional = BTreeMap::new();
    for &m in ms {
        if !fibers.is_m_to_1(m as usize) {
            continue;
        }
        set.push(m);
        let rep = fibers.report(m as usize).expect("m in range");
        if !rep.exceptional_set.is_empty() {
            let mut pts: Vec<Elem> = rep.exceptional_set.iter().map(|&i| points[i]).collect();
            field.sort_canonical(&mut pts);
            exceptional.insert(m, pts.into_iter().map(|x| field.display(x)).collect());
        }
    }
    Observed { set, exceptional }
}

/// Random polynomial of degree at most `max_deg` without roots on `avoid`.
pub(crate) fn random_rootless<R: Rng>(
    field: &GaloisField,
    avoid: &[Elem],
    max_deg: usize,
    rng: &mut R,
) -> Option<Poly> {
    let q = field.q() as u32;
    for _ in 0..1000 {
        let deg = rng.gen_range(0..=max_deg);
        let mut coeffs: Vec<Elem> = (0..deg).map(|_| Elem(rng.gen_range(0..q))).collect();
        coeffs.push(Elem(rng.gen_range(1..q)));
        let h = Poly::new(coeffs);
        if avoid.iter().all(|&a| !h.eval(field, a).is_zero()) {
            return Some(h);
        }
    }
    None
}

/// Divisors in increasing order.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    mtoone_core::arith::divisors(n)
}
