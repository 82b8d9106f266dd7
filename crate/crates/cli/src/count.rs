//! The `count` command: closed-form count of m-to-1 self-maps, optionally checked by enumeration.

use mtoone_core::multiplicity::count_formula;
use serde_json::json;

use crate::families::COUNT_LIMIT;
use crate::{scale, CliError};

/// counts[m] = number of m-to-1 maps from a q-set to itself, for 1 <= m <= q, over all q^q maps.
pub fn enumerate_counts(q: u64) -> Vec<u64> {
    let q = q as usize;
    let mut counts = vec![0u64; q + 1];
    let mut map = vec![0usize; q];
    let mut sizes = vec![0usize; q];
    loop {
        sizes.iter_mut().for_each(|c| *c = 0);
        for &b in &map {
            sizes[b] += 1;
        }
        for (m, slot) in counts.iter_mut().enumerate().skip(1) {
            if sizes.iter().filter(|&&c| c == m).count() == q / m {
                *slot += 1;
            }
        }
        // next map in base-q order
        let mut i = 0;
        while i < q {
            map[i] += 1;
            if map[i] < q {
                break;
            }
            map[i] = 0;
            i += 1;
        }
        if i == q {
            return counts;
        }
    }
}

/// Text or JSON output of `count`.
pub fn run_count(
    q: u64,
    m: Option<u64>,
    enumerate: bool,
    as_json: bool,
) -> Result<String, CliError> {
    if q == 0 {
        return Err(CliError::Usage("q must be positive".into()));
    }
    let ms: Vec<u64> = match m {
        Some(m) if m == 0 || m > q => {
            return Err(CliError::Usage(format!("m = {m} must lie in 1..={q}")))
        }
        Some(m) => vec![m],
        None => (1..=q).collect(),
    };
    if enumerate && q > COUNT_LIMIT {
        return Err(scale(format!(
            "enumeration of {q}^{q} maps; supported up to q = {COUNT_LIMIT}"
        )));
    }
    let enumerated = enumerate.then(|| enumerate_counts(q));
    let mut rows = Vec::new();
    for &m in &ms {
        let formula = count_formula(q, m)?.to_string();
        let seen = enumerated.as_ref().map(|c| c[m as usize].to_string());
        rows.push((m, formula, seen));
    }
    if as_json {
        let items: Vec<_> = rows
            .iter()
            .map(|(m, formula, seen)| {
                let mut v = json!({"q": q, "m": m, "formula": formula});
                if let Some(seen) = seen {
                    v["enumerated"] = json!(seen);
                    v["agree"] = json!(seen == formula);
                }
                v
            })
            .collect();
        return Ok(serde_json::to_string_pretty(&items).expect("serializable") + "\n");
    }
    let mut out = String::new();
    for (m, formula, seen) in rows {
        match seen {
            Some(seen) => {
                let mark = if seen == formula { "agree" } else { "DISAGREE" };
                out += &format!("q={q} m={m} formula={formula} enumerated={seen} {mark}\n");
            }
            None => out += &format!("q={q} m={m} formula={formula}\n"),
        }
    }
    Ok(out)
}

/// True when every enumerated count matches the formula.
pub fn counts_agree(q: u64) -> bool {
    let counts = enumerate_counts(q);
    (1..=q).all(|m| {
        count_formula(q, m)
            .map(|c| c.to_string() == counts[m as usize].to_string())
            .unwrap_or(false)
    })
}
