//! The local criterion and the three square constructions, on explicit models.
//!
//! Every check reports both sides of an equivalence computed separately: the
//! left side is a direct verdict on the full map, the right side is assembled
//! from verdicts on pieces. Hypothesis failures are errors, never verdicts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplicity::Fibers;

pub mod random;

/// Largest group model accepted.
pub const MAX_GROUP_ORDER: usize = 4096;
/// Associativity is checked exhaustively up to this order.
pub const EXHAUSTIVE_AXIOMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub m: usize,
    pub lhs: bool,
    pub rhs: bool,
    pub agree: bool,
}

impl EquivalenceReport {
    fn new(m: usize, lhs: bool, rhs: bool) -> Self {
        EquivalenceReport {
            m,
            lhs,
            rhs,
            agree: lhs == rhs,
        }
    }
}

/// Point names for models loaded from fixtures.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SquareLabels {
    pub a: Vec<String>,
    pub abar: Vec<String>,
    pub s: Vec<String>,
    pub sbar: Vec<String>,
}

/// Maps f: A -> Abar, fbar: S -> Sbar, lambda: A -> S, lambdabar: Abar -> Sbar with
/// lambdabar . f = fbar . lambda. Points of each set are indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativeSquare {
    pub sizes: SquareSizes,
    pub f: Vec<usize>,
    pub fbar: Vec<usize>,
    pub lambda: Vec<usize>,
    pub lambdabar: Vec<usize>,
    pub labels: Option<SquareLabels>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareSizes {
    pub a: usize,
    pub abar: usize,
    pub s: usize,
    pub sbar: usize,
}

fn check_table(name: &str, table: &[usize], len: usize, bound: usize) -> Result<()> {
    if table.len() != len {
        return Err(Error::Invalid(format!(
            "{name} has {} entries, expected {len}",
            table.len()
        )));
    }
    if let Some(&bad) = table.iter().find(|&&v| v >= bound) {
        return Err(Error::Invalid(format!(
            "{name} sends a point to {bad}, outside a set of size {bound}"
        )));
    }
    Ok(())
}

impl CommutativeSquare {
    pub fn new(
        sizes: SquareSizes,
        f: Vec<usize>,
        fbar: Vec<usize>,
        lambda: Vec<usize>,
        lambdabar: Vec<usize>,
    ) -> Result<Self> {
        if sizes.a == 0 {
            return Err(Error::Invalid("A is empty".into()));
        }
        check_table("f", &f, sizes.a, sizes.abar)?;
        check_table("fbar", &fbar, sizes.s, sizes.sbar)?;
        check_table("lambda", &lambda, sizes.a, sizes.s)?;
        check_table("lambdabar", &lambdabar, sizes.abar, sizes.sbar)?;
        if let Some(a) = (0..sizes.a).find(|&a| lambdabar[f[a]] != fbar[lambda[a]]) {
            return Err(Error::hypothesis_at(
                "square does not commute",
                format!("a = {a}"),
            ));
        }
        Ok(CommutativeSquare {
            sizes,
            f,
            fbar,
            lambda,
            lambdabar,
            labels: None,
        })
    }

    fn name_a(&self, a: usize) -> String {
        self.labels
            .as_ref()
            .map_or_else(|| a.to_string(), |l| l.a[a].clone())
    }

    fn name_s(&self, s: usize) -> String {
        self.labels
            .as_ref()
            .map_or_else(|| s.to_string(), |l| l.s[s].clone())
    }

    /// Fibers of lambda over the points of lambda(A), keyed by s.
    fn lambda_fibers(&self) -> BTreeMap<usize, Vec<usize>> {
        partition(&self.lambda)
    }
}

fn partition(keys: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, &k) in keys.iter().enumerate() {
        classes.entry(k).or_default().push(a);
    }
    classes
}

/// Verdict of f restricted to `points` (requires m <= #points).
fn restricted_verdict(f: &[usize], points: &[usize], m: usize) -> bool {
    Fibers::from_keys(points.iter().map(|&a| f[a])).is_m_to_1(m)
}

/// Right side shared by the local criterion and Construction 1: f is m-to-1 on
/// every class of size >= m, and the exceptional points of the large classes plus
/// all points of the small classes number #A mod m.
fn classwise_side(f: &[usize], classes: &BTreeMap<usize, Vec<usize>>, m: usize) -> bool {
    let mut leftover = 0;
    for class in classes.values() {
        if class.len() >= m {
            if !restricted_verdict(f, class, m) {
                return false;
            }
            leftover += class.len() % m;
        } else {
            leftover += class.len();
        }
    }
    leftover == f.len() % m
}

fn check_m(m: usize, hi: usize) -> Result<()> {
    if m == 0 || m > hi {
        return Err(Error::range("m", m as u64, 1, hi as u64));
    }
    Ok(())
}

/// f: A -> B, psi: B -> C. Compares f being m-to-1 with the classwise condition
/// over the fibers of psi . f.
pub fn local_criterion_check(f: &[usize], psi: &[usize], m: usize) -> Result<EquivalenceReport> {
    if f.is_empty() {
        return Err(Error::Invalid("A is empty".into()));
    }
    check_table("f", f, f.len(), psi.len())?;
    check_m(m, f.len())?;
    let lhs = Fibers::from_keys(f.iter().copied()).is_m_to_1(m);
    let phi: Vec<usize> = f.iter().map(|&b| psi[b]).collect();
    let rhs = classwise_side(f, &partition(&phi), m);
    Ok(EquivalenceReport::new(m, lhs, rhs))
}

fn injective(table: &[usize]) -> bool {
    table.iter().collect::<BTreeSet<_>>().len() == table.len()
}

/// Construction 1: fbar injective on S; f is m-to-1 iff the classwise condition
/// holds over the fibers of lambda. With no fiber of size >= m the per-fiber
/// requirement is vacuous and only the counting identity remains.
pub fn construction1_verdict(sq: &CommutativeSquare, m: usize) -> Result<EquivalenceReport> {
    if !injective(&sq.fbar) {
        return Err(Error::hypothesis("fbar is not injective on S"));
    }
    check_m(m, sq.sizes.a)?;
    let lhs = Fibers::from_keys(sq.f.iter().copied()).is_m_to_1(m);
    let rhs = classwise_side(&sq.f, &sq.lambda_fibers(), m);
    Ok(EquivalenceReport::new(m, lhs, rhs))
}

/// Checks lambda onto S, #lambda^{-1}(s) = m1 #lambdabar^{-1}(fbar(s)), and f
/// m1-to-1 on each lambda^{-1}(s).
fn construction2_hypotheses(sq: &CommutativeSquare, m1: usize) -> Result<()> {
    if m1 == 0 {
        return Err(Error::Invalid("m1 must be positive".into()));
    }
    let fibers = sq.lambda_fibers();
    if let Some(s) = (0..sq.sizes.s).find(|s| !fibers.contains_key(s)) {
        return Err(Error::hypothesis_at(
            "lambda is not onto S",
            format!("s = {}", sq.name_s(s)),
        ));
    }
    let mut sbar_fiber = vec![0usize; sq.sizes.sbar];
    for &t in &sq.lambdabar {
        sbar_fiber[t] += 1;
    }
    for (&s, class) in &fibers {
        if class.len() != m1 * sbar_fiber[sq.fbar[s]] {
            return Err(Error::hypothesis_at(
                "#lambda^-1(s) differs from m1 #lambdabar^-1(fbar(s))",
                format!("s = {}", sq.name_s(s)),
            ));
        }
        if !restricted_verdict(&sq.f, class, m1) {
            return Err(Error::hypothesis_at(
                "f is not m1-to-1 on a fiber of lambda",
                format!("s = {}", sq.name_s(s)),
            ));
        }
    }
    Ok(())
}

/// Construction 2: f is m-to-1 iff m1 | m, fbar is (m/m1)-to-1 on S, and the
/// lambda-fibers over the exceptional set of fbar hold #A mod m points.
pub fn construction2_verdict(
    sq: &CommutativeSquare,
    m1: usize,
    m: usize,
) -> Result<EquivalenceReport> {
    construction2_hypotheses(sq, m1)?;
    check_m(m, m1 * sq.sizes.s)?;
    let lhs = Fibers::from_keys(sq.f.iter().copied()).is_m_to_1(m);
    let rhs = m.is_multiple_of(m1) && {
        let m2 = m / m1;
        let base = Fibers::from_keys(sq.fbar.iter().copied());
        base.is_m_to_1(m2) && {
            let fibers = sq.lambda_fibers();
            let over_exceptional: usize = (0..sq.sizes.s)
                .filter(|&s| base.fiber_of_point(s) != m2)
                .map(|s| fibers[&s].len())
                .sum();
            over_exceptional == sq.sizes.a % m
        }
    };
    Ok(EquivalenceReport::new(m, lhs, rhs))
}

/// A finite group given by its operation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupModel {
    /// `table[a * order + b] = a * b`. Associativity is checked exhaustively up to
    /// order 64; larger tables must be marked trusted.
    pub fn from_table(order: usize, table: Vec<usize>, trusted: bool) -> Result<Self> {
        if order == 0 || order > MAX_GROUP_ORDER {
            return Err(Error::range(
                "group order",
                order as u64,
                1,
                MAX_GROUP_ORDER as u64,
            ));
        }
        check_table("group operation", &table, order * order, order)?;
        if order > EXHAUSTIVE_AXIOMS && !trusted {
            return Err(Error::Invalid(format!(
                "group of order {order} exceeds {EXHAUSTIVE_AXIOMS}; mark it trusted to skip the axiom checks"
            )));
        }
        let op = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| op(e, x) == x && op(x, e) == x))
            .ok_or_else(|| Error::hypothesis("group table has no identity"))?;
        let mut inverse = vec![usize::MAX; order];
        for (a, slot) in inverse.iter_mut().enumerate() {
            *slot = (0..order)
                .find(|&b| op(a, b) == identity && op(b, a) == identity)
                .ok_or_else(|| Error::hypothesis_at("element without inverse", a.to_string()))?;
        }
        if !trusted {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if op(op(a, b), c) != op(a, op(b, c)) {
                            return Err(Error::hypothesis_at(
                                "operation is not associative",
                                format!("({a},{b},{c})"),
                            ));
                        }
                    }
                }
            }
        }
        let table = table.into_iter().map(|v| v as u32).collect();
        Ok(GroupModel {
            order,
            table,
            identity,
            inverse,
        })
    }

    /// Z/n under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        GroupModel::from_table(n, table, n > EXHAUSTIVE_AXIOMS)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }
}

/// Extra hypothesis selecting the form of Construction 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Construction3Variant {
    /// fbar injective and u constant on the fibers of lambda.
    InjectiveBase,
    /// Construction 2 hypotheses with the given m1 for both f and f*u.
    UniformFibers { m1: usize },
}

/// Construction 3 on a group A: lambdabar is an endomorphism of A whose image plays
/// the role of Sbar, lambdabar(u(a)) is a constant c, and f*u is compared with f.
/// The square must have Abar = Sbar = A.
pub fn construction3_verdict(
    group: &GroupModel,
    sq: &CommutativeSquare,
    u: &[usize],
    variant: Construction3Variant,
    m: usize,
) -> Result<EquivalenceReport> {
    let n = group.order();
    let sz = sq.sizes;
    if sz.a != n || sz.abar != n || sz.sbar != n {
        return Err(Error::Invalid(
            "A, Abar and Sbar must all be the group".into(),
        ));
    }
    check_table("u", u, n, n)?;
    let lb = &sq.lambdabar;
    for x in 0..n {
        for y in 0..n {
            if lb[group.op(x, y)] != group.op(lb[x], lb[y]) {
                return Err(Error::hypothesis_at(
                    "lambdabar is not a homomorphism",
                    format!("({x},{y})"),
                ));
            }
        }
    }
    let image: BTreeSet<usize> = lb.iter().copied().collect();
    if let Some(s) = (0..sz.s).find(|&s| !image.contains(&sq.fbar[s])) {
        return Err(Error::hypothesis_at(
            "fbar leaves the image of lambdabar",
            format!("s = {}", sq.name_s(s)),
        ));
    }
    let c = lb[u[0]];
    if let Some(a) = (0..n).find(|&a| lb[u[a]] != c) {
        return Err(Error::hypothesis_at(
            "lambdabar(u(a)) is not constant",
            format!("a = {}", sq.name_a(a)),
        ));
    }
    let fu: Vec<usize> = (0..n).map(|a| group.op(sq.f[a], u[a])).collect();
    let hi = match variant {
        Construction3Variant::InjectiveBase => {
            if !injective(&sq.fbar) {
                return Err(Error::hypothesis("fbar is not injective on S"));
            }
            let mut v = vec![usize::MAX; sz.s];
            for a in 0..n {
                let slot = &mut v[sq.lambda[a]];
                if *slot == usize::MAX {
                    *slot = u[a];
                } else if *slot != u[a] {
                    return Err(Error::hypothesis_at(
                        "u does not factor through lambda",
                        format!("a = {}", sq.name_a(a)),
                    ));
                }
            }
            n
        }
        Construction3Variant::UniformFibers { m1 } => {
            construction2_hypotheses(sq, m1)?;
            let shifted_base: Vec<usize> = sq.fbar.iter().map(|&t| group.op(t, c)).collect();
            let twin = CommutativeSquare::new(
                sz,
                fu.clone(),
                shifted_base,
                sq.lambda.clone(),
                lb.clone(),
            )?;
            construction2_hypotheses(&twin, m1)?;
            m1 * sz.s
        }
    };
    check_m(m, hi)?;
    let lhs = Fibers::from_keys(fu.iter().copied()).is_m_to_1(m);
    let rhs = Fibers::from_keys(sq.f.iter().copied()).is_m_to_1(m);
    Ok(EquivalenceReport::new(m, lhs, rhs))
}

/// JSON shape of a square: point sets as string lists and maps as dictionaries.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SquareFixture {
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "Abar")]
    pub abar: Vec<String>,
    #[serde(rename = "S")]
    pub s: Vec<String>,
    #[serde(rename = "Sbar")]
    pub sbar: Vec<String>,
    pub f: BTreeMap<String, String>,
    pub fbar: BTreeMap<String, String>,
    pub lambda: BTreeMap<String, String>,
    pub lambdabar: BTreeMap<String, String>,
}

/// JSON shape of a group: the operation as a nested dictionary op[x][y] = x*y.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GroupFixture {
    pub elements: Vec<String>,
    pub op: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub identity: Option<String>,
    #[serde(default)]
    pub trusted: bool,
}

/// A Construction 3 model: group, square over it, and the multiplier u.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GroupSquareFixture {
    pub group: GroupFixture,
    pub square: SquareFixture,
    pub u: BTreeMap<String, String>,
}

fn index_of(names: &[String]) -> Result<BTreeMap<&str, usize>> {
    let mut idx = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if idx.insert(n.as_str(), i).is_some() {
            return Err(Error::Parse(format!("duplicate point {n:?}")));
        }
    }
    Ok(idx)
}

fn resolve_map(
    name: &str,
    map: &BTreeMap<String, String>,
    from: &[String],
    to: &BTreeMap<&str, usize>,
) -> Result<Vec<usize>> {
    if map.len() != from.len() {
        return Err(Error::Parse(format!(
            "map {name} must list every domain point exactly once"
        )));
    }
    from.iter()
        .map(|x| {
            let y = map
                .get(x)
                .ok_or_else(|| Error::Parse(format!("map {name} misses {x:?}")))?;
            to.get(y.as_str()).copied().ok_or_else(|| {
                Error::Parse(format!("map {name} sends {x:?} to unknown point {y:?}"))
            })
        })
        .collect()
}

impl SquareFixture {
    pub fn into_square(self) -> Result<CommutativeSquare> {
        index_of(&self.a)?;
        let (iabar, is, isbar) = (
            index_of(&self.abar)?,
            index_of(&self.s)?,
            index_of(&self.sbar)?,
        );
        let f = resolve_map("f", &self.f, &self.a, &iabar)?;
        let fbar = resolve_map("fbar", &self.fbar, &self.s, &isbar)?;
        let lambda = resolve_map("lambda", &self.lambda, &self.a, &is)?;
        let lambdabar = resolve_map("lambdabar", &self.lambdabar, &self.abar, &isbar)?;
        let sizes = SquareSizes {
            a: self.a.len(),
            abar: self.abar.len(),
            s: self.s.len(),
            sbar: self.sbar.len(),
        };
        let mut sq = CommutativeSquare::new(sizes, f, fbar, lambda, lambdabar)?;
        sq.labels = Some(SquareLabels {
            a: self.a,
            abar: self.abar,
            s: self.s,
            sbar: self.sbar,
        });
        Ok(sq)
    }
}

impl GroupFixture {
    pub fn into_group(self) -> Result<GroupModel> {
        let idx = index_of(&self.elements)?;
        let n = self.elements.len();
        let mut table = Vec::with_capacity(n * n);
        for x in &self.elements {
            let row = self
                .op
                .get(x)
                .ok_or_else(|| Error::Parse(format!("op has no row for {x:?}")))?;
            table.extend(resolve_map("op", row, &self.elements, &idx)?);
        }
        let group = GroupModel::from_table(n, table, self.trusted)?;
        if let Some(e) = &self.identity {
            if idx.get(e.as_str()) != Some(&group.identity()) {
                return Err(Error::hypothesis_at(
                    "declared identity is not the identity",
                    e.clone(),
                ));
            }
        }
        Ok(group)
    }
}

pub fn load_square(json: &str) -> Result<CommutativeSquare> {
    let fx: SquareFixture = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    fx.into_square()
}

pub fn load_group(json: &str) -> Result<GroupModel> {
    let fx: GroupFixture = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    fx.into_group()
}

/// Loads a Construction 3 model; the square's A, Abar and Sbar must list the group elements in order.
pub fn load_group_square(json: &str) -> Result<(GroupModel, CommutativeSquare, Vec<usize>)> {
    let fx: GroupSquareFixture =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let elements = fx.group.elements.clone();
    if fx.square.a != elements || fx.square.abar != elements || fx.square.sbar != elements {
        return Err(Error::Invalid(
            "A, Abar and Sbar must list the group elements in order".into(),
        ));
    }
    let idx = index_of(&elements)?;
    let u = resolve_map("u", &fx.u, &elements, &idx)?;
    Ok((fx.group.into_group()?, fx.square.into_square()?, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{build_field, Poly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sizes(a: usize, abar: usize, s: usize, sbar: usize) -> SquareSizes {
        SquareSizes { a, abar, s, sbar }
    }

    #[test]
    fn local_criterion_examples() {
        let f = vec![0, 0, 1, 2, 2, 2];
        for m in 1..=6 {
            let id: Vec<usize> = (0..3).collect();
            assert!(local_criterion_check(&f, &id, m).unwrap().agree);
        }
        let f5 = build_field(5, 1, None).unwrap();
        let cubic = Poly::from_ints(&f5, &[0, 1, 0, 1]);
        let images: Vec<usize> = f5
            .elements()
            .iter()
            .map(|&x| cubic.eval(&f5, x).0 as usize)
            .collect();
        let rep = local_criterion_check(&images, &[0; 5], 3).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (true, true));
        assert!(local_criterion_check(&images, &[0; 5], 6).is_err());
        assert!(local_criterion_check(&images, &[0; 3], 1).is_err());
    }

    #[test]
    fn square_rejects_non_commuting_tables() {
        let err = CommutativeSquare::new(
            sizes(2, 2, 1, 2),
            vec![0, 1],
            vec![0],
            vec![0, 0],
            vec![0, 1],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }));
    }

    #[test]
    fn construction1_identity_square() {
        // S = A, lambda = id, fbar = f injective
        let f = vec![2, 0, 3, 1];
        let sq = CommutativeSquare::new(
            sizes(4, 4, 4, 4),
            f.clone(),
            f,
            (0..4).collect(),
            (0..4).collect(),
        )
        .unwrap();
        for m in 1..=4 {
            let rep = construction1_verdict(&sq, m).unwrap();
            assert!(rep.agree);
            assert_eq!(rep.lhs, m == 1);
        }
        let bad = CommutativeSquare::new(
            sizes(2, 1, 2, 1),
            vec![0, 0],
            vec![0, 0],
            vec![0, 1],
            vec![0],
        )
        .unwrap();
        assert!(construction1_verdict(&bad, 1).is_err());
    }

    #[test]
    fn construction2_reduces_to_plain_check() {
        let f = vec![0, 0, 1, 2, 2, 1];
        let id: Vec<usize> = (0..6).collect();
        let sq =
            CommutativeSquare::new(sizes(6, 3, 6, 3), f.clone(), f, id, (0..3).collect()).unwrap();
        for m in 1..=6 {
            let rep = construction2_verdict(&sq, 1, m).unwrap();
            assert!(rep.agree, "m = {m}");
            assert_eq!(rep.lhs, m == 2);
        }
        assert!(construction2_verdict(&sq, 1, 7).is_err());
        assert!(construction2_verdict(&sq, 2, 2).is_err());
    }

    #[test]
    fn construction3_with_identity_multiplier() {
        let g = GroupModel::cyclic(6).unwrap();
        let f = vec![0, 2, 4, 0, 2, 4];
        let lambdabar: Vec<usize> = (0..6).collect();
        let sq =
            CommutativeSquare::new(sizes(6, 6, 6, 6), f.clone(), f, (0..6).collect(), lambdabar)
                .unwrap();
        for m in 1..=6 {
            let rep = construction3_verdict(
                &g,
                &sq,
                &[0; 6],
                Construction3Variant::UniformFibers { m1: 1 },
                m,
            )
            .unwrap();
            assert!(rep.agree && rep.lhs == (m == 2));
        }
    }

    #[test]
    fn group_model_validation() {
        assert!(GroupModel::cyclic(12).is_ok());
        // x*y = x - y mod 3 has no two-sided identity
        let table: Vec<usize> = (0..9).map(|i| (i / 3 + 3 - i % 3) % 3).collect();
        assert!(GroupModel::from_table(3, table, false).is_err());
        assert!(GroupModel::from_table(100, vec![0; 10000], false).is_err());
        let big = GroupModel::cyclic(100).unwrap();
        assert_eq!(big.op(99, 3), 2);
        assert_eq!(big.inverse(1), 99);
    }

    #[test]
    fn fixtures_load() {
        let sq = load_square(
            r#"{"A":["a","b","c","d"],"Abar":["x","y"],"S":["s","t"],"Sbar":["u","v"],
                "f":{"a":"x","b":"x","c":"y","d":"y"},
                "fbar":{"s":"u","t":"v"},
                "lambda":{"a":"s","b":"s","c":"t","d":"t"},
                "lambdabar":{"x":"u","y":"v"}}"#,
        )
        .unwrap();
        assert!(construction1_verdict(&sq, 2).unwrap().lhs);
        assert!(load_square(r#"{"A":["a"],"Abar":["x"],"S":["s"],"Sbar":["u"],"f":{},"fbar":{"s":"u"},"lambda":{"a":"s"},"lambdabar":{"x":"u"}}"#).is_err());
        let g = load_group(r#"{"elements":["e","a"],"op":{"e":{"e":"e","a":"a"},"a":{"e":"a","a":"e"}},"identity":"e"}"#).unwrap();
        assert_eq!(g.identity(), 0);
        assert!(load_group(r#"{"elements":["e","a"],"op":{"e":{"e":"e","a":"a"},"a":{"e":"a","a":"e"}},"identity":"a"}"#).is_err());
    }

    #[test]
    fn random_models_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let model = random::local_model(&mut rng);
            for m in 1..=model.f.len() {
                assert!(
                    local_criterion_check(&model.f, &model.psi, m)
                        .unwrap()
                        .agree
                );
            }
            let sq = random::construction1_square(&mut rng);
            for m in 1..=sq.sizes.a {
                assert!(construction1_verdict(&sq, m).unwrap().agree);
            }
            let (sq, m1) = random::construction2_square(&mut rng);
            for m in 1..=m1 * sq.sizes.s {
                assert!(construction2_verdict(&sq, m1, m).unwrap().agree);
            }
            let n = rng.gen_range(1..=12);
            if let Some(model) = random::construction3_model(&mut rng, n) {
                let hi = match model.variant {
                    Construction3Variant::InjectiveBase => n,
                    Construction3Variant::UniformFibers { m1 } => m1 * model.square.sizes.s,
                };
                for m in 1..=hi {
                    let rep = construction3_verdict(
                        &model.group,
                        &model.square,
                        &model.u,
                        model.variant,
                        m,
                    )
                    .unwrap();
                    assert!(rep.agree);
                }
            }
        }
    }
}
