//! The `analyze` command: fiber structure of one polynomial over a finite field.

use std::collections::BTreeMap;

use mtoone_core::galois::{parse_field, Elem, GaloisField, Poly, SparsePoly};
use mtoone_core::multiplicity::Fibers;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MReport {
    pub m: usize,
    pub verdict: bool,
    pub k: usize,
    pub r: usize,
    pub exceptional_set: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub field: String,
    pub poly: String,
    /// "F_q" or "F_q^*".
    pub domain: String,
    pub points: usize,
    /// Fiber size -> number of fibers of that size.
    pub histogram: BTreeMap<usize, usize>,
    pub admissible: Vec<usize>,
    pub reports: Vec<MReport>,
}

/// Parses a polynomial: either comma-separated coefficients from x^0 upward, or a sum of
/// terms such as "x^17 + 3x^2 + 1" (exponents may exceed q).
pub fn parse_poly(field: &GaloisField, s: &str) -> Result<SparsePoly, CliError> {
    if !s.contains('x') {
        let dense = Poly::parse(field, s)?;
        let terms = dense
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, &c)| (c, e as u64))
            .collect();
        return Ok(SparsePoly::new(terms));
    }
    let bad = |t: &str| CliError::Usage(format!("cannot read term {t:?}"));
    let mut terms = Vec::new();
    for raw in s.split('+') {
        let t: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad(raw));
        }
        let (coef, exp) = match t.split_once('x') {
            None => (t.as_str(), 0),
            Some((c, rest)) => {
                let e = match rest.strip_prefix('^') {
                    Some(e) => e.parse::<u64>().map_err(|_| bad(raw))?,
                    None if rest.is_empty() => 1,
                    None => return Err(bad(raw)),
                };
                (c.strip_suffix('*').unwrap_or(c), e)
            }
        };
        let c = if coef.is_empty() {
            Elem::ONE
        } else {
            field.parse_elem(coef)?
        };
        terms.push((c, exp));
    }
    Ok(SparsePoly::new(terms))
}

pub fn analyze(
    field_spec: &str,
    poly: &str,
    m: Option<usize>,
    star: bool,
) -> Result<Analysis, CliError> {
    let field = parse_field(field_spec)?;
    let f = parse_poly(&field, poly)?;
    let points = if star {
        field.nonzero()
    } else {
        field.elements()
    };
    let fibers = Fibers::from_codes(
        points.iter().map(|&x| f.eval(&field, x).0),
        field.q() as usize,
    );
    let mut histogram = BTreeMap::new();
    for size in fibers.histogram() {
        *histogram.entry(size).or_insert(0) += 1;
    }
    let admissible = fibers.admissible();
    let ms = match m {
        Some(m) if m == 0 || m > points.len() => {
            return Err(CliError::Usage(format!(
                "m = {m} must lie in 1..={}",
                points.len()
            )))
        }
        Some(m) => vec![m],
        None => admissible.clone(),
    };
    let reports = ms
        .into_iter()
        .map(|m| {
            let rep = fibers.report(m).expect("m in range");
            let mut e: Vec<Elem> = rep.exceptional_set.iter().map(|&i| points[i]).collect();
            field.sort_canonical(&mut e);
            MReport {
                m,
                verdict: rep.verdict,
                k: rep.k,
                r: rep.r,
                exceptional_set: e.into_iter().map(|x| field.display(x)).collect(),
            }
        })
        .collect();
    Ok(Analysis {
        field: field_spec.to_string(),
        poly: poly.to_string(),
        domain: format!("F_{}{}", field.q(), if star { "^*" } else { "" }),
        points: points.len(),
        histogram,
        admissible,
        reports,
    })
}

fn fibers(k: usize) -> String {
    if k == 1 {
        "1 fiber".into()
    } else {
        format!("{k} fibers")
    }
}

impl Analysis {
    pub fn to_text(&self) -> String {
        let hist: Vec<String> = self
            .histogram
            .iter()
            .map(|(s, c)| format!("{} of size {s}", fibers(*c)))
            .collect();
        let adm: Vec<String> = self.admissible.iter().map(|m| m.to_string()).collect();
        let mut out = format!(
            "f = {} over {} ({} points)\nfibers: {}\nm-to-1 for m in {{{}}}\n",
            self.poly,
            self.domain,
            self.points,
            hist.join(", "),
            adm.join(", ")
        );
        for r in &self.reports {
            if r.verdict {
                out += &format!(
                    "{}-to-1: {} of size {}, E = {{{}}}\n",
                    r.m,
                    fibers(r.k),
                    r.m,
                    r.exceptional_set.join(", ")
                );
            } else {
                out += &format!("not {}-to-1: {} of size {}\n", r.m, fibers(r.k), r.m);
            }
        }
        out
    }
}
