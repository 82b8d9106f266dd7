//! Families over F_{q^2} built on the unit circle U_{q+1}.

use std::time::Instant;

use mtoone_core::arith::gcd;
use mtoone_core::cyclotomic::CycloForm;
use mtoone_core::galois::{Elem, Poly};
use mtoone_core::unitline::draws::{draw_tower, TowerFamily};
use mtoone_core::unitline::{
    g3_base, g3_family, g5_base, g5_family, halfplane_split, hd_transfer, QuadExt, FULL_SCAN_LIMIT,
};
use mtoone_core::Error;
use serde_json::json;

use super::observe;
use crate::grid::prime_power;
use crate::report::Record;
use crate::{fan, params, scale, CliError, VerifyConfig};

const TOWER_Q: [u64; 5] = [3, 4, 5, 7, 8];

/// F_{q^2} over q = 2^n.
fn char2_ext(n: u64) -> Result<QuadExt, CliError> {
    if n == 0 || 2 * n > 16 {
        return Err(scale(format!(
            "n = {n}: q^2 = 2^{} is outside 2^2..=2^16",
            2 * n
        )));
    }
    Ok(QuadExt::from_q(1 << n)?)
}

fn char2_exts(cfg: &VerifyConfig) -> Result<Vec<QuadExt>, CliError> {
    cfg.grid
        .n_or(&[1, 2, 3, 4, 5, 6, 7, 8])
        .into_iter()
        .map(char2_ext)
        .collect()
}

pub fn halfplane(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    Ok(fan(char2_exts(cfg)?, |ext| {
        let start = Instant::now();
        let n = ext.base_degree();
        let half = 1u64 << (n - 1);
        let predicted = json!({"a0": half - 1, "a1": half, "pairs0": half - 1, "pairs1": half, "two_to_one": true});
        let observed = match halfplane_split(ext) {
            Ok(sp) => json!({
                "a0": sp.a0.len(), "a1": sp.a1.len(),
                "pairs0": sp.pairs0.len(), "pairs1": sp.pairs1.len(), "two_to_one": true,
            }),
            Err(e) => json!({"two_to_one": false, "error": e.to_string()}),
        };
        vec![Record::checked(
            "halfplane",
            params! {"n" => n, "q" => ext.q()},
            predicted,
            observed,
        )
        .timed(start)]
    }))
}

fn cubic(c: Elem) -> Poly {
    Poly::new(vec![c, Elem::ONE, Elem::ZERO, Elem::ONE])
}

pub fn g3(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let mut cells = Vec::new();
    for ext in char2_exts(cfg)? {
        for c in ext.base().into_iter().filter(|c| !c.is_zero()) {
            cells.push((ext.clone(), c));
        }
    }
    Ok(fan(cells, |(ext, c)| {
        let f = ext.field();
        let n = ext.base_degree();
        let start = Instant::now();
        let h = cubic(*c);
        let rootless = ext.unit().iter().all(|&x| !h.eval(f, x).is_zero());
        let base = params! {"n" => n, "c" => f.display(*c)};
        let mut p = base.clone();
        p.insert("claim".into(), json!("x^3 + x + c has no roots in U"));
        let mut out = vec![Record::checked("g3", p, true, rootless).timed(start)];
        match g3_family(ext, *c) {
            Ok(rec) => {
                for claim in rec.claims {
                    let mut p = base.clone();
                    p.insert("claim".into(), json!(claim.statement));
                    out.push(
                        Record::checked("g3", p, claim.predicted, claim.observed).timed(start),
                    );
                }
            }
            Err(e) => out.push(Record::skipped("g3", base, e.to_string()).timed(start)),
        }
        out
    }))
}

pub fn g5(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    Ok(fan(char2_exts(cfg)?, |ext| {
        let start = Instant::now();
        let n = ext.base_degree();
        match g5_family(ext) {
            Ok(claims) => claims
                .into_iter()
                .map(|c| {
                    let p = params! {"n" => n, "claim" => c.statement};
                    Record::checked("g5", p, c.predicted, c.observed).timed(start)
                })
                .collect(),
            Err(e) => vec![Record::skipped("g5", params! {"n" => n}, e.to_string()).timed(start)],
        }
    }))
}

/// Bases for the transfer over q = 2^n: the g3 bases when n is odd and at least 3, the g5 base
/// when n is even. Each comes with an optional (m, expected verdict) claim for the lifted map.
fn transfer_bases(ext: &QuadExt) -> Vec<(String, CycloForm, Vec<(u64, bool)>)> {
    let f = ext.field();
    let n = ext.base_degree();
    let mut out = Vec::new();
    if n % 2 == 1 && n >= 3 {
        for c in ext.base().into_iter().filter(|c| !c.is_zero()) {
            let Ok(form) = g3_base(ext, c) else { continue };
            let tr_zero = ext
                .base_trace(f.inv(c).unwrap())
                .map(|t| t.is_zero())
                .unwrap_or(false);
            out.push((
                format!("g3 c={}", f.display(c)),
                form,
                vec![(3, tr_zero), (1, !tr_zero)],
            ));
        }
    }
    if n.is_multiple_of(2) {
        if let Ok(form) = g5_base(ext) {
            let claims = if n == 2 { vec![(5, true)] } else { Vec::new() };
            out.push(("g5".to_string(), form, claims));
        }
    }
    out
}

pub fn transfer(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let mut cells = Vec::new();
    for q in cfg.grid.q_or(&[4, 8]) {
        match prime_power(q) {
            Some((2, _)) => {}
            _ => return Err(CliError::Usage(format!("transfer needs q = 2^n, got {q}"))),
        }
        if q * q > FULL_SCAN_LIMIT {
            return Err(scale(format!("q^2 = {} exceeds {FULL_SCAN_LIMIT}", q * q)));
        }
        let ext = QuadExt::from_q(q)?;
        for (name, form, claims) in transfer_bases(&ext) {
            cells.push((ext.clone(), name, form, claims));
        }
    }
    Ok(fan(cells, |(ext, name, form, claims)| {
        let q = ext.q();
        let f = ext.field();
        let nonzero = f.nonzero();
        let ms: Vec<u64> = (1..=q + 1).collect();
        let before = observe(f, &form.star_fibers(), &nonzero, &ms).set;
        let ds = cfg.grid.d.clone().unwrap_or_else(|| {
            (1..=q + 1)
                .filter(|&d| d % 2 == 1 && gcd(d, q + 1) == 1)
                .collect()
        });
        let ks = cfg.grid.k.clone().unwrap_or_else(|| (1..=3).collect());
        let mut out = Vec::new();
        for &d in &ds {
            for &k in &ks {
                let start = Instant::now();
                let p = params! {"q" => q, "base" => name, "d" => d, "k" => k};
                match hd_transfer(ext, form, d, k) {
                    Ok(lifted) => {
                        let fibers = lifted.star_fibers();
                        let after = observe(f, &fibers, &nonzero, &ms).set;
                        let mut pm = p.clone();
                        pm.insert("claim".into(), json!("same multiplicities as the base"));
                        out.push(Record::checked("transfer", pm, &before, after).timed(start));
                        for &(m, expected) in claims {
                            let mut pc = p.clone();
                            pc.insert("claim".into(), json!(format!("lifted map is {m}-to-1")));
                            out.push(
                                Record::checked(
                                    "transfer",
                                    pc,
                                    expected,
                                    fibers.is_m_to_1(m as usize),
                                )
                                .timed(start),
                            );
                        }
                    }
                    Err(e @ Error::Hypothesis { .. }) => {
                        out.push(Record::skipped("transfer", p, e.to_string()).timed(start))
                    }
                    Err(e) => {
                        out.push(Record::checked("transfer", p, "lift", e.to_string()).timed(start))
                    }
                }
            }
        }
        out
    }))
}

pub fn towers(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let target = cfg.draws_or(500);
    let mut cells = Vec::new();
    for q in cfg.grid.q_or(&TOWER_Q) {
        if prime_power(q).is_none() {
            return Err(CliError::Usage(format!("q = {q} is not a prime power")));
        }
        if q * q > FULL_SCAN_LIMIT {
            return Err(scale(format!("q^2 = {} exceeds {FULL_SCAN_LIMIT}", q * q)));
        }
        let ext = QuadExt::from_q(q)?;
        for (i, family) in TowerFamily::ALL.into_iter().enumerate() {
            if family.applies(q) {
                cells.push((ext.clone(), family, i as u64));
            }
        }
    }
    Ok(fan(cells, |(ext, family, id)| {
        tower_cell(cfg, ext, *family, *id, target)
    }))
}

fn tower_cell(
    cfg: &VerifyConfig,
    ext: &QuadExt,
    family: TowerFamily,
    id: u64,
    target: usize,
) -> Vec<Record> {
    let q = ext.q();
    let mut rng = cfg.rng(&[14, q, id]);
    let mut out = Vec::new();
    let mut conforming = 0;
    let mut attempt = 0;
    while conforming < target && attempt < 40 * target {
        attempt += 1;
        let start = Instant::now();
        let Some(draw) = draw_tower(family, ext, &mut rng) else {
            continue;
        };
        let p = params! {"tower" => family.name(), "q" => q, "draw" => attempt, "r" => draw.r, "params" => draw.params};
        let structure = draw.tower.check_structure().is_ok();
        if !draw.condition || !structure {
            let rec = Record::checked(
                "towers",
                p,
                json!({"hypotheses": draw.condition}),
                json!({"hypotheses": structure}),
            );
            out.push(rec.timed(start));
            continue;
        }
        if let Err(e) = draw.tower.check_rootless() {
            let rec = if family == TowerFamily::Gbar {
                Record::skipped("towers", p, e.to_string())
            } else {
                Record::checked(
                    "towers",
                    p,
                    json!({"hypotheses": true, "rootless": true}),
                    json!({"hypotheses": true, "rootless": false}),
                )
            };
            out.push(rec.timed(start));
            continue;
        }
        conforming += 1;
        let form = match draw.tower.form(draw.r) {
            Ok(form) => form,
            Err(e) => {
                out.push(Record::checked("towers", p, "form", e.to_string()).timed(start));
                continue;
            }
        };
        let m1 = form.m1();
        let ms: Vec<u64> = if family == TowerFamily::Gbar {
            vec![m1]
        } else {
            (1..=m1 * (q + 1)).collect()
        };
        let ms: Vec<u64> = ms.into_iter().filter(|&m| cfg.grid.keeps_m(m)).collect();
        let predicted: Result<Vec<u64>, Error> = ms
            .iter()
            .filter_map(|&m| match draw.tower.predict(draw.r, m) {
                Ok(true) => Some(Ok(m)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect();
        let obs = observe(
            ext.field(),
            &form.star_fibers(),
            &ext.field().nonzero(),
            &ms,
        );
        let rec = match predicted {
            Ok(pred) => {
                let mut rec = Record::checked(
                    "towers",
                    p,
                    json!({"hypotheses": true, "multiplicities": pred}),
                    json!({"hypotheses": true, "multiplicities": obs.set}),
                );
                rec.exceptional_set = obs.exceptional;
                rec
            }
            Err(e) => Record::checked("towers", p, "prediction", e.to_string()),
        };
        out.push(rec.timed(start));
    }
    out
}
