//! The `search` command: h of bounded degree making x^r h(x^s) m-to-1 on F_q^*.

use mtoone_core::cyclotomic::{main_predict, CycloForm};
use mtoone_core::galois::{parse_field, Elem, GaloisField, Poly};
use mtoone_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_BUDGET: u128 = 2_000_000;

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub field: String,
    pub s: u64,
    pub deg: usize,
    pub m: u64,
    /// Exponents r to try; all of 1..=s when empty.
    pub r: Vec<u64>,
    pub monic: bool,
    /// Most nonzero coefficients in h.
    pub support: Option<usize>,
    pub budget: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hit {
    pub r: u64,
    /// Coefficients from x^0 upward.
    pub h: String,
    pub pretty: String,
    pub exceptional_set: Vec<String>,
    /// Brute-force confirmation over F_q^*.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub field: String,
    pub s: u64,
    pub m: u64,
    pub candidates: u128,
    pub hits: Vec<Hit>,
}

/// h written from the top degree down, e.g. "x^5 + x^4 + 15x^3 + 1".
pub fn pretty(field: &GaloisField, h: &Poly) -> String {
    let mut parts = Vec::new();
    for (e, &c) in h.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coef = if c == Elem::ONE && e > 0 {
            String::new()
        } else {
            field.display(c)
        };
        parts.push(match e {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{e}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Supports of the lower coefficients of a degree-d h: subsets of 0..d of size < support.
fn lower_supports(d: usize, max_extra: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        if (mask.count_ones() as usize) <= max_extra {
            out.push((0..d).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

impl SearchSpec {
    fn rs(&self) -> Vec<u64> {
        if self.r.is_empty() {
            (1..=self.s).collect()
        } else {
            self.r.clone()
        }
    }

    fn max_extra(&self, d: usize) -> usize {
        self.support.map_or(d, |n| n.saturating_sub(1).min(d))
    }

    /// Number of (r, h) pairs enumerated.
    pub fn size(&self, q: u64) -> u128 {
        let units = (q - 1) as u128;
        let leads = if self.monic { 1 } else { units };
        let per_r: u128 = (0..=self.deg)
            .map(|d| {
                leads
                    * (0..=self.max_extra(d))
                        .map(|j| binom(d, j) * units.pow(j as u32))
                        .sum::<u128>()
            })
            .sum();
        per_r * self.rs().len() as u128
    }
}

fn hits_for(
    field: &GaloisField,
    spec: &SearchSpec,
    r: u64,
    d: usize,
    support: &[usize],
) -> Result<Vec<Hit>, Error> {
    let nonzero = field.nonzero();
    let leads: Vec<Elem> = if spec.monic {
        vec![Elem::ONE]
    } else {
        nonzero.clone()
    };
    let mut hits = Vec::new();
    let mut digits = vec![0usize; support.len()];
    loop {
        for &lead in &leads {
            let mut coeffs = vec![Elem::ZERO; d + 1];
            coeffs[d] = lead;
            for (&pos, &i) in support.iter().zip(&digits) {
                coeffs[pos] = nonzero[i];
            }
            let h = Poly::new(coeffs);
            let form = match CycloForm::new(field, r, spec.s, h.clone()) {
                Ok(form) => form,
                Err(Error::Hypothesis { .. }) => continue,
                Err(e) => return Err(e),
            };
            let verdict = match main_predict(&form, spec.m) {
                Ok(p) => p.verdict,
                Err(Error::OutOfRange { .. }) => return Ok(Vec::new()),
                Err(e) => return Err(e),
            };
            if verdict {
                let brute = form.brute_force(spec.m as usize)?;
                let mut e = brute.exceptional_set.clone();
                field.sort_canonical(&mut e);
                hits.push(Hit {
                    r,
                    h: h.display(field),
                    pretty: pretty(field, &h),
                    exceptional_set: e.into_iter().map(|x| field.display(x)).collect(),
                    verified: brute.verdict,
                });
            }
        }
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < nonzero.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            return Ok(hits);
        }
    }
}

fn hit_key(field: &GaloisField, h: &Hit) -> (u64, usize, Vec<u64>) {
    let coeffs: Vec<u64> =
        h.h.split(',')
            .rev()
            .map(|t| field.order_key(field.parse_elem(t).expect("own output")))
            .collect();
    (h.r, coeffs.len(), coeffs)
}

pub fn search(spec: &SearchSpec) -> Result<SearchResult, CliError> {
    let field = parse_field(&spec.field)?;
    let q = field.q();
    if spec.s == 0 || (q - 1) % spec.s != 0 {
        return Err(CliError::Usage(format!(
            "s = {} must divide q - 1 = {}",
            spec.s,
            q - 1
        )));
    }
    if spec.m == 0 {
        return Err(CliError::Usage("m must be positive".into()));
    }
    if spec.support == Some(0) {
        return Err(CliError::Usage("support must be positive".into()));
    }
    let size = spec.size(q);
    if size > spec.budget {
        return Err(CliError::Budget {
            size,
            budget: spec.budget,
        });
    }
    let mut cells = Vec::new();
    for r in spec.rs() {
        for d in 0..=spec.deg {
            for support in lower_supports(d, spec.max_extra(d)) {
                cells.push((r, d, support));
            }
        }
    }
    let found: Result<Vec<Vec<Hit>>, Error> = cells
        .par_iter()
        .map(|(r, d, sup)| hits_for(&field, spec, *r, *d, sup))
        .collect();
    let mut hits: Vec<Hit> = found?.into_iter().flatten().collect();
    hits.sort_by_cached_key(|h| hit_key(&field, h));
    Ok(SearchResult {
        field: spec.field.clone(),
        s: spec.s,
        m: spec.m,
        candidates: size,
        hits,
    })
}

impl SearchResult {
    pub fn all_verified(&self) -> bool {
        self.hits.iter().all(|h| h.verified)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} candidates over {}, s = {}, m = {}: {} hits\n",
            self.candidates,
            self.field,
            self.s,
            self.m,
            self.hits.len()
        );
        for h in &self.hits {
            let mark = if h.verified { "" } else { "  NOT CONFIRMED" };
            out += &format!(
                "r={} h={}  E={{{}}}{mark}\n",
                h.r,
                h.pretty,
                h.exceptional_set.join(", ")
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(field: &str, s: u64, deg: usize, m: u64) -> SearchSpec {
        SearchSpec {
            field: field.into(),
            s,
            deg,
            m,
            r: Vec::new(),
            monic: false,
            support: None,
            budget: DEFAULT_BUDGET,
        }
    }

    #[test]
    fn sizes_count_candidates() {
        // degree <= 2 over F_13, all leads: 12 (1 + 12 + 144) per r, 4 values of r
        assert_eq!(spec("13^1", 4, 2, 3).size(13), 4 * 12 * (1 + 13 + 169));
        let mut s = spec("13^1", 4, 2, 3);
        s.monic = true;
        s.support = Some(1);
        assert_eq!(s.size(13), 4 * 3);
    }

    #[test]
    fn hits_are_confirmed() {
        let res = search(&spec("13^1", 4, 2, 3)).unwrap();
        assert!(!res.hits.is_empty());
        assert!(res.all_verified());
    }

    #[test]
    fn out_of_range_m_gives_nothing() {
        // ell m1 <= 3 * 4 = 12 for s = 4 over F_13
        assert!(search(&spec("13^1", 4, 1, 13)).unwrap().hits.is_empty());
    }

    #[test]
    fn over_budget() {
        let mut s = spec("29^1", 4, 5, 12);
        s.budget = 1000;
        assert_eq!(search(&s).unwrap_err().exit_code(), crate::EXIT_BUDGET);
    }

    #[test]
    fn pretty_form() {
        let field = parse_field("29^1").unwrap();
        assert_eq!(
            pretty(&field, &Poly::from_ints(&field, &[1, 0, 0, 15, 1, 1])),
            "x^5 + x^4 + 15x^3 + 1"
        );
    }
}
