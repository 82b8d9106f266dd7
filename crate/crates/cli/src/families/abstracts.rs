//! Families on abstract finite maps: the m-to-1 count and the square criteria.

use std::time::Instant;

use mtoone_core::criteria::random::{
    construction1_square, construction2_square, construction3_model, local_model,
};
use mtoone_core::criteria::{
    construction1_verdict, construction2_verdict, construction3_verdict, load_group_square,
    load_square, local_criterion_check, CommutativeSquare, Construction3Variant, EquivalenceReport,
    GroupModel, SquareSizes,
};
use mtoone_core::cyclotomic::CycloForm;
use mtoone_core::galois::Poly;
use mtoone_core::multiplicity::count_formula;
use mtoone_core::Error;
use rand::Rng;
use serde_json::{json, Value};

use crate::count::enumerate_counts;
use crate::report::{Params, Record};
use crate::{fan, params, scale, CliError, VerifyConfig};

/// Largest q for which all q^q maps are enumerated.
pub const COUNT_LIMIT: u64 = 7;
const CHUNK: usize = 250;

pub fn count(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    let qs = cfg.grid.q_or(&[2, 3, 4, 5]);
    if let Some(&q) = qs.iter().find(|&&q| q == 0 || q > COUNT_LIMIT) {
        return Err(scale(format!(
            "q = {q}: enumeration supports 1..={COUNT_LIMIT}"
        )));
    }
    Ok(fan(qs, |&q| {
        let start = Instant::now();
        let counts = enumerate_counts(q);
        (1..=q)
            .filter(|&m| cfg.grid.keeps_m(m))
            .map(|m| {
                let predicted =
                    count_formula(q, m).map_or_else(|e| e.to_string(), |c| c.to_string());
                let observed = counts[m as usize].to_string();
                Record::checked("count", params! {"q" => q, "m" => m}, predicted, observed)
                    .timed(start)
            })
            .collect()
    }))
}

/// m values where each side holds, over one model.
fn sides(
    reports: Result<Vec<EquivalenceReport>, Error>,
) -> Result<(Vec<usize>, Vec<usize>), Error> {
    let reports = reports?;
    let rhs = reports.iter().filter(|r| r.rhs).map(|r| r.m).collect();
    let lhs = reports.iter().filter(|r| r.lhs).map(|r| r.m).collect();
    Ok((rhs, lhs))
}

fn model_record(
    p: Params,
    start: Instant,
    reports: Result<Vec<EquivalenceReport>, Error>,
) -> Record {
    match sides(reports) {
        Ok((rhs, lhs)) => Record::checked("criteria", p, rhs, lhs),
        Err(e) => Record::checked("criteria", p, "verdict", e.to_string()),
    }
    .timed(start)
}

#[derive(Clone, Copy)]
enum Kind {
    Local,
    C1,
    C2,
    C3,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Local => "local",
            Kind::C1 => "construction1",
            Kind::C2 => "construction2",
            Kind::C3 => "construction3",
        }
    }
}

fn c3_reports(
    group: &GroupModel,
    sq: &CommutativeSquare,
    u: &[usize],
    variant: Construction3Variant,
) -> Result<Vec<EquivalenceReport>, Error> {
    let hi = match variant {
        Construction3Variant::InjectiveBase => sq.sizes.a,
        Construction3Variant::UniformFibers { m1 } => m1 * sq.sizes.s,
    };
    (1..=hi)
        .map(|m| construction3_verdict(group, sq, u, variant, m))
        .collect()
}

fn chunk_records(cfg: &VerifyConfig, kind: Kind, chunk: usize, count: usize) -> Vec<Record> {
    let mut rng = cfg.rng(&[16, kind as u64, chunk as u64]);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let start = Instant::now();
        let index = chunk * CHUNK + out.len();
        let mut p = params! {"kind" => kind.name(), "model" => index};
        let reports = match kind {
            Kind::Local => {
                let model = local_model(&mut rng);
                p.insert("a".into(), json!(model.f.len()));
                (1..=model.f.len())
                    .map(|m| local_criterion_check(&model.f, &model.psi, m))
                    .collect()
            }
            Kind::C1 => {
                let sq = construction1_square(&mut rng);
                p.insert("a".into(), json!(sq.sizes.a));
                (1..=sq.sizes.a)
                    .map(|m| construction1_verdict(&sq, m))
                    .collect()
            }
            Kind::C2 => {
                let (sq, m1) = construction2_square(&mut rng);
                p.insert("a".into(), json!(sq.sizes.a));
                p.insert("m1".into(), json!(m1));
                (1..=m1 * sq.sizes.s)
                    .map(|m| construction2_verdict(&sq, m1, m))
                    .collect()
            }
            Kind::C3 => {
                let n = rng.gen_range(1..=12);
                let Some(model) = construction3_model(&mut rng, n) else {
                    continue;
                };
                p.insert("n".into(), json!(n));
                c3_reports(&model.group, &model.square, &model.u, model.variant)
            }
        };
        out.push(model_record(p, start, reports));
    }
    out
}

/// The F_29 square for h = x^5 + x^4 + 15x^3 + 1 with r = 2, s = 4.
fn f29_form() -> Result<CycloForm, Error> {
    let field = mtoone_core::build_field(29, 1, None)?;
    let h = Poly::from_ints(&field, &[1, 0, 0, 15, 1, 1]);
    CycloForm::new(&field, 2, 4, h)
}

/// F_13 with r = 2, s = 4, h = x + 1 as a square over the cyclic group of order 12,
/// twisted by u(x) = -2 when x^4 = 3 and u(x) = 2 otherwise.
fn f13_group_square() -> Result<(GroupModel, CommutativeSquare, Vec<usize>), Error> {
    let field = mtoone_core::build_field(13, 1, None)?;
    let form = CycloForm::new(&field, 2, 4, Poly::from_ints(&field, &[1, 1]))?;
    let dec = form.decompose()?;
    let n = 12usize;
    let dlog = |x| field.dlog(x).expect("nonzero") as usize;
    let f = field
        .nonzero()
        .into_iter()
        .map(|x| dlog(form.eval(x)))
        .collect();
    let fbar = dec.g.iter().map(|&v| dlog(v)).collect();
    let lambda = (0..n).map(|j| j % dec.ell as usize).collect();
    let lambdabar = (0..n).map(|j| j * dec.s1 as usize % n).collect();
    let sq = CommutativeSquare::new(
        SquareSizes {
            a: n,
            abar: n,
            s: dec.ell as usize,
            sbar: n,
        },
        f,
        fbar,
        lambda,
        lambdabar,
    )?;
    let (two, three) = (field.from_int(2), field.from_int(3));
    let u = field
        .nonzero()
        .into_iter()
        .map(|x| {
            dlog(if field.pow(x, 4) == three {
                field.neg(two)
            } else {
                two
            })
        })
        .collect();
    Ok((GroupModel::cyclic(n)?, sq, u))
}

fn reference_records() -> Vec<Record> {
    let mut out = Vec::new();
    let start = Instant::now();
    let square = f29_form().and_then(|form| form.decompose()?.square(&form));
    let reports = square
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|sq| (1..=14).map(|m| construction2_verdict(sq, 2, m)).collect());
    out.push(model_record(
        params! {"kind" => "construction2", "instance" => "F29 r=2 s=4"},
        start,
        reports,
    ));

    let start = Instant::now();
    let plain = mtoone_core::build_field(29, 1, None)
        .and_then(|field| CycloForm::new(&field, 1, 4, Poly::from_ints(&field, &[1])))
        .and_then(|form| form.decompose()?.square(&form));
    let reports = plain.and_then(|sq| (1..=28).map(|m| construction1_verdict(&sq, m)).collect());
    out.push(model_record(
        params! {"kind" => "construction1", "instance" => "F29 r=1 s=4 h=1"},
        start,
        reports,
    ));

    let start = Instant::now();
    let reports = f13_group_square().and_then(|(g, sq, u)| {
        c3_reports(&g, &sq, &u, Construction3Variant::UniformFibers { m1: 2 })
    });
    out.push(model_record(
        params! {"kind" => "construction3", "instance" => "F13 r=2 s=4 h=x+1"},
        start,
        reports,
    ));
    out
}

fn fixture_records(path: &std::path::Path) -> Result<Vec<Record>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let m1 = match value.get("m1") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|&k| k > 0)
                .ok_or_else(|| CliError::Usage("m1 must be a positive integer".into()))?
                as usize,
        ),
    };
    let start = Instant::now();
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let group = value.get("group").is_some();
    let kind = match (group, m1) {
        (true, _) => "construction3",
        (false, Some(_)) => "construction2",
        (false, None) => "construction1",
    };
    let p = params! {"kind" => kind, "fixture" => name};
    let reports = if group {
        load_group_square(&text).and_then(|(group, sq, u)| {
            let variant = match m1 {
                Some(m1) => Construction3Variant::UniformFibers { m1 },
                None => Construction3Variant::InjectiveBase,
            };
            c3_reports(&group, &sq, &u, variant)
        })
    } else {
        load_square(&text).and_then(|sq| match m1 {
            Some(m1) => (1..=m1 * sq.sizes.s)
                .map(|m| construction2_verdict(&sq, m1, m))
                .collect(),
            None => (1..=sq.sizes.a)
                .map(|m| construction1_verdict(&sq, m))
                .collect(),
        })
    };
    match reports {
        Ok(reports) => Ok(vec![model_record(p, start, Ok(reports))]),
        Err(e @ Error::Hypothesis { .. }) => {
            Ok(vec![
                Record::skipped("criteria", p, e.to_string()).timed(start)
            ])
        }
        Err(e) => Err(e.into()),
    }
}

pub fn criteria(cfg: &VerifyConfig) -> Result<Vec<Record>, CliError> {
    if let Some(path) = &cfg.fixture {
        return fixture_records(path);
    }
    let per_kind = cfg.draws_or(2500);
    let mut cells = Vec::new();
    for kind in [Kind::Local, Kind::C1, Kind::C2, Kind::C3] {
        for chunk in 0..per_kind.div_ceil(CHUNK) {
            cells.push((kind, chunk, CHUNK.min(per_kind - chunk * CHUNK)));
        }
    }
    let mut out = fan(cells, |&(kind, chunk, count)| {
        chunk_records(cfg, kind, chunk, count)
    });
    out.extend(reference_records());
    Ok(out)
}
