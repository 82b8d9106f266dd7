//! Integer lists on the command line: "5", "2..8", "5,7,9..13".

use std::collections::BTreeSet;

use crate::CliError;

/// Parses a comma-separated list of integers and inclusive ranges "a..b".
pub fn parse_list(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "bad integer list {s:?}: expected items like 5, 2..8 or 5,7,9..13"
        ))
    };
    let mut out = BTreeSet::new();
    for item in s.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(bad());
        }
        match item.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi || hi - lo > 1_000_000 {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => {
                out.insert(item.parse().map_err(|_| bad())?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Optional parameter lists that override a family's default grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grid {
    pub q: Option<Vec<u64>>,
    pub n: Option<Vec<u64>>,
    pub r: Option<Vec<u64>>,
    pub d: Option<Vec<u64>>,
    pub k: Option<Vec<u64>>,
    pub m: Option<Vec<u64>>,
}

impl Grid {
    /// Reads "q=5,7;n=2..8" style overrides. Keys already set are replaced.
    pub fn apply(&mut self, spec: &str) -> Result<(), CliError> {
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, list) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid entry {part:?} is not key=list")))?;
            let values = Some(parse_list(list)?);
            match key.trim() {
                "q" => self.q = values,
                "n" => self.n = values,
                "r" => self.r = values,
                "d" => self.d = values,
                "k" => self.k = values,
                "m" => self.m = values,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown grid key {other:?} (use q, n, r, d, k, m)"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn q_or(&self, default: &[u64]) -> Vec<u64> {
        self.q.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn n_or(&self, default: &[u64]) -> Vec<u64> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    /// True when m passes the optional m filter.
    pub fn keeps_m(&self, m: u64) -> bool {
        self.m.as_ref().is_none_or(|ms| ms.contains(&m))
    }
}

/// (p, n) with p^n = q, if q is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut n = 0;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_list("9, 5,7..8").unwrap(), vec![5, 7, 8, 9]);
        assert_eq!(parse_list("3..=4").unwrap(), vec![3, 4]);
        assert!(parse_list("5..2").is_err());
        assert!(parse_list("x").is_err());
        assert!(parse_list("").is_err());
    }

    #[test]
    fn grid_overrides() {
        let mut g = Grid::default();
        g.apply("q=5,7; d=1..3").unwrap();
        assert_eq!(g.q, Some(vec![5, 7]));
        assert_eq!(g.d, Some(vec![1, 2, 3]));
        assert!(g.apply("z=1").is_err());
        assert!(g.keeps_m(40));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
