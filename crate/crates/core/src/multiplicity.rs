//! Fiber histograms and m-to-1 verdicts for explicit finite maps.
//!
//! A map f: A -> B is m-to-1 when, writing #A = km + r with 0 <= r < m, exactly
//! k points of B have m preimages each. Equivalently the points lying in fibers
//! of size m number #A - r; the other r points form the exceptional set.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Fiber structure of a map given by interned image ids, one per domain point.
#[derive(Clone, Debug)]
pub struct Fibers {
    ids: Vec<usize>,
    sizes: Vec<usize>,
    /// by_size[j] = number of fibers with exactly j points.
    by_size: Vec<usize>,
}

impl Fibers {
    /// Interns arbitrary hashable image keys.
    pub fn from_keys<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Fibers {
        let mut index: HashMap<K, usize> = HashMap::new();
        let ids = keys
            .into_iter()
            .map(|k| {
                let next = index.len();
                *index.entry(k).or_insert(next)
            })
            .collect();
        Fibers::from_dense(ids)
    }

    /// Image keys drawn from 0..bound, e.g. field element codes.
    pub fn from_codes(codes: impl IntoIterator<Item = u32>, bound: usize) -> Fibers {
        let mut index = vec![usize::MAX; bound];
        let mut next = 0;
        let ids = codes
            .into_iter()
            .map(|c| {
                let slot = &mut index[c as usize];
                if *slot == usize::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Fibers::from_dense(ids)
    }

    /// Ids already dense in 0..k.
    fn from_dense(ids: Vec<usize>) -> Fibers {
        let k = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; k];
        for &i in &ids {
            sizes[i] += 1;
        }
        let mut by_size = vec![0usize; ids.len() + 1];
        for &s in &sizes {
            by_size[s] += 1;
        }
        Fibers {
            ids,
            sizes,
            by_size,
        }
    }

    pub fn domain_len(&self) -> usize {
        self.ids.len()
    }

    pub fn image_count(&self) -> usize {
        self.sizes.len()
    }

    /// Fiber size of the image of each domain point.
    pub fn fiber_of_point(&self, i: usize) -> usize {
        self.sizes[self.ids[i]]
    }

    pub fn image_id(&self, i: usize) -> usize {
        self.ids[i]
    }

    /// Sorted fiber sizes.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = self.sizes.clone();
        h.sort_unstable();
        h
    }

    pub fn fibers_of_size(&self, m: usize) -> usize {
        self.by_size.get(m).copied().unwrap_or(0)
    }

    /// Verdict for 1 <= m; any m beyond the domain size is simply false.
    pub fn is_m_to_1(&self, m: usize) -> bool {
        let n = self.ids.len();
        m >= 1 && m <= n && self.fibers_of_size(m) * m == n - n % m
    }

    pub fn admissible(&self) -> Vec<usize> {
        (1..=self.ids.len())
            .filter(|&m| self.is_m_to_1(m))
            .collect()
    }

    pub fn report(&self, m: usize) -> Result<Mto1Report<usize>> {
        let n = self.ids.len();
        if m == 0 || m > n {
            return Err(Error::range("m", m as u64, 1, n as u64));
        }
        let verdict = self.is_m_to_1(m);
        let exceptional_set = if verdict {
            (0..n).filter(|&i| self.fiber_of_point(i) != m).collect()
        } else {
            Vec::new()
        };
        Ok(Mto1Report {
            m,
            verdict,
            k: self.fibers_of_size(m),
            r: n % m,
            exceptional_set,
            histogram: self.histogram(),
        })
    }
}

/// Outcome of testing one multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mto1Report<P> {
    pub m: usize,
    pub verdict: bool,
    /// Codomain points whose fiber has exactly m points.
    pub k: usize,
    /// #A mod m.
    pub r: usize,
    /// Domain points outside the size-m fibers, in domain order; empty unless verdict.
    pub exceptional_set: Vec<P>,
    pub histogram: Vec<usize>,
}

impl<P> Mto1Report<P> {
    pub fn map_points<Q>(self, f: impl Fn(P) -> Q) -> Mto1Report<Q> {
        Mto1Report {
            m: self.m,
            verdict: self.verdict,
            k: self.k,
            r: self.r,
            exceptional_set: self.exceptional_set.into_iter().map(f).collect(),
            histogram: self.histogram,
        }
    }
}

/// An explicit function table on a finite, ordered domain.
#[derive(Clone, Debug)]
pub struct FiniteMapping<P> {
    domain: Vec<P>,
    images: Vec<P>,
    fibers: Fibers,
}

impl<P: Clone + Eq + Hash> FiniteMapping<P> {
    pub fn new(domain: Vec<P>, images: Vec<P>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::Invalid("mapping domain is empty".into()));
        }
        if domain.len() != images.len() {
            return Err(Error::Invalid(format!(
                "{} domain points but {} images",
                domain.len(),
                images.len()
            )));
        }
        if Fibers::from_keys(domain.iter()).image_count() != domain.len() {
            return Err(Error::Invalid("domain points are not distinct".into()));
        }
        let fibers = Fibers::from_keys(images.iter());
        Ok(FiniteMapping {
            domain,
            images,
            fibers,
        })
    }

    pub fn from_fn(domain: Vec<P>, f: impl Fn(&P) -> P) -> Result<Self> {
        let images = domain.iter().map(f).collect();
        FiniteMapping::new(domain, images)
    }

    pub fn domain(&self) -> &[P] {
        &self.domain
    }

    pub fn images(&self) -> &[P] {
        &self.images
    }

    pub fn fibers(&self) -> &Fibers {
        &self.fibers
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }
}

pub fn fiber_histogram<P: Clone + Eq + Hash>(f: &FiniteMapping<P>) -> Vec<usize> {
    f.fibers.histogram()
}

pub fn check_m_to_1<P: Clone + Eq + Hash>(f: &FiniteMapping<P>, m: usize) -> Result<Mto1Report<P>> {
    let report = f.fibers.report(m)?;
    Ok(report.map_points(|i| f.domain[i].clone()))
}

pub fn admissible_m_set<P: Clone + Eq + Hash>(f: &FiniteMapping<P>) -> Vec<usize> {
    f.fibers.admissible()
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// Number of m-to-1 self-maps of a q-set:
/// (q!)^2 (q-k)^r / (k! r! (m!)^k (q-k)!) with q = km + r.
pub fn count_formula(q: u64, m: u64) -> Result<BigUint> {
    if q == 0 || m == 0 || m > q {
        return Err(Error::range("m", m, 1, q));
    }
    let (k, r) = (q / m, q % m);
    let qf = factorial(q);
    let num = &qf * &qf * BigUint::from(q - k).pow(r as u32);
    let den = factorial(k) * factorial(r) * factorial(m).pow(k as u32) * factorial(q - k);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{build_field, Elem, Poly};
    use proptest::prelude::*;

    /// Definition-level oracle: count images with exactly m preimages and compare with floor(#A/m).
    fn definition_verdict(images: &[usize], m: usize) -> bool {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &b in images {
            *counts.entry(b).or_default() += 1;
        }
        counts.values().filter(|&&c| c == m).count() == images.len() / m
    }

    fn index_map(images: Vec<usize>) -> FiniteMapping<usize> {
        FiniteMapping::new((0..images.len()).collect(), images).unwrap()
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(fiber_histogram(&index_map(vec![7, 7, 7, 7])), vec![4]);
        let f5 = build_field(5, 1, None).unwrap();
        let cubic = Poly::from_ints(&f5, &[0, 1, 0, 1]);
        let map = FiniteMapping::from_fn(f5.elements(), |&x| cubic.eval(&f5, x)).unwrap();
        assert_eq!(fiber_histogram(&map), vec![1, 1, 3]);
        let f29 = build_field(29, 1, None).unwrap();
        let quartic = FiniteMapping::from_fn(f29.nonzero(), |&x| f29.pow(x, 4)).unwrap();
        assert_eq!(fiber_histogram(&quartic), vec![4; 7]);
    }

    #[test]
    fn check_examples() {
        let f5 = build_field(5, 1, None).unwrap();
        let cubic = Poly::from_ints(&f5, &[0, 1, 0, 1]);
        let map = FiniteMapping::from_fn(f5.elements(), |&x| cubic.eval(&f5, x)).unwrap();
        let rep = check_m_to_1(&map, 3).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.exceptional_set, vec![Elem(1), Elem(4)]);
        assert_eq!((rep.k, rep.r), (1, 2));

        let id = index_map((0..9).collect());
        let rep = check_m_to_1(&id, 1).unwrap();
        assert!(rep.verdict && rep.exceptional_set.is_empty());

        let f7 = build_field(7, 1, None).unwrap();
        let sq = FiniteMapping::from_fn(f7.nonzero(), |&x| f7.mul(x, x)).unwrap();
        let rep = check_m_to_1(&sq, 2).unwrap();
        assert!(rep.verdict && rep.exceptional_set.is_empty());

        assert!(check_m_to_1(&id, 0).is_err());
        assert!(check_m_to_1(&id, 10).is_err());
        assert!(FiniteMapping::<u8>::new(vec![], vec![]).is_err());
        assert!(FiniteMapping::new(vec![1, 1], vec![2, 3]).is_err());
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(admissible_m_set(&index_map(vec![0; 5])), vec![5]);
        let f5 = build_field(5, 1, None).unwrap();
        let cubic = Poly::from_ints(&f5, &[0, 1, 0, 1]);
        let map = FiniteMapping::from_fn(f5.elements(), |&x| cubic.eval(&f5, x)).unwrap();
        let oracle: Vec<usize> = (1..=5)
            .filter(|&m| {
                definition_verdict(
                    &map.images()
                        .iter()
                        .map(|e| e.0 as usize)
                        .collect::<Vec<_>>(),
                    m,
                )
            })
            .collect();
        assert_eq!(oracle, vec![3]);
        assert_eq!(admissible_m_set(&map), vec![3]);
        // fibers {2,1,1}: m=1 needs 4 singletons, m=2 needs two pairs, m=3,4 need a big fiber
        assert!(admissible_m_set(&index_map(vec![0, 0, 1, 2])).is_empty());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_formula(2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_formula(3, 2).unwrap(), BigUint::from(18u32));
        assert_eq!(count_formula(5, 5).unwrap(), BigUint::from(5u32));
        assert!(count_formula(5, 6).is_err());
        assert!(count_formula(5, 0).is_err());
        // q = 64 with every m stays exact
        let total: BigUint = (1..=64).map(|m| count_formula(64, m).unwrap()).sum();
        assert!(total > BigUint::from(0u32));
    }

    #[test]
    fn count_matches_enumeration() {
        for q in 1..=5usize {
            let mut tallies = vec![0u64; q + 1];
            let total = q.pow(q as u32);
            for code in 0..total {
                let mut c = code;
                let images: Vec<usize> = (0..q)
                    .map(|_| {
                        let d = c % q;
                        c /= q;
                        d
                    })
                    .collect();
                for (m, tally) in tallies.iter_mut().enumerate().skip(1) {
                    if definition_verdict(&images, m) {
                        *tally += 1;
                    }
                }
            }
            for m in 1..=q {
                assert_eq!(
                    count_formula(q as u64, m as u64).unwrap(),
                    BigUint::from(tallies[m]),
                    "q={q} m={m}"
                );
            }
        }
    }

    #[test]
    fn power_maps_have_kernel_multiplicity() {
        for (p, n) in [(29, 1), (2, 6), (3, 3), (7, 2), (13, 1)] {
            let f = build_field(p, n, None).unwrap();
            let order = f.q() - 1;
            for e in 1..=order + 3 {
                let map = FiniteMapping::from_fn(f.nonzero(), |&x| f.pow(x, e)).unwrap();
                let kernel = num_integer::gcd(e, order) as usize;
                assert_eq!(admissible_m_set(&map), vec![kernel]);
                assert!(check_m_to_1(&map, kernel)
                    .unwrap()
                    .exceptional_set
                    .is_empty());
            }
        }
    }

    fn perm(len: usize, seed: &[usize]) -> Vec<usize> {
        let mut p: Vec<usize> = (0..len).collect();
        for (i, &s) in seed.iter().enumerate().take(len) {
            p.swap(i, s % len);
        }
        p
    }

    proptest! {
        #[test]
        fn verdict_matches_definition(images in prop::collection::vec(0usize..8, 1..13)) {
            let map = index_map(images.clone());
            for m in 1..=images.len() {
                let rep = check_m_to_1(&map, m).unwrap();
                prop_assert_eq!(rep.verdict, definition_verdict(&images, m));
                if rep.verdict {
                    prop_assert_eq!(rep.exceptional_set.len(), images.len() % m);
                    prop_assert_eq!(rep.k, images.len() / m);
                }
                prop_assert_eq!(rep.histogram.iter().sum::<usize>(), images.len());
            }
        }

        #[test]
        fn injective_post_composition_preserves_multiplicity(
            images in prop::collection::vec(0usize..12, 1..13),
            seed in prop::collection::vec(0usize..40, 40),
            shift in 0usize..5,
        ) {
            let sigma = perm(40, &seed);
            let map = index_map(images.clone());
            let composed = index_map(images.iter().map(|&b| sigma[b + shift]).collect());
            prop_assert_eq!(admissible_m_set(&map), admissible_m_set(&composed));
        }

        #[test]
        fn composition_with_uniform_fibers(
            m1 in 1usize..4,
            theta in prop::collection::vec(0usize..6, 1..5),
            seed in prop::collection::vec(0usize..16, 16),
        ) {
            // lambda: A -> B is m1-to-1 with #A = m1 #B, shuffled
            let b = theta.len();
            let a = m1 * b;
            let shuffle = perm(a, &seed);
            let lambda: Vec<usize> = (0..a).map(|i| shuffle[i] % b).collect();
            let composed = index_map(lambda.iter().map(|&x| theta[x]).collect());
            let theta_map = index_map(theta.clone());
            for m in 1..=a {
                let expected = m % m1 == 0 && m / m1 <= b && check_m_to_1(&theta_map, m / m1).unwrap().verdict;
                prop_assert_eq!(check_m_to_1(&composed, m).unwrap().verdict, expected);
            }
        }

        #[test]
        fn sandwich_by_permutations(
            images in prop::collection::vec(0usize..12, 12),
            s1 in prop::collection::vec(0usize..12, 12),
            s2 in prop::collection::vec(0usize..12, 12),
        ) {
            let (p1, p2) = (perm(12, &s1), perm(12, &s2));
            let map = index_map(images.clone());
            let sandwiched = index_map((0..12).map(|i| p2[images[p1[i]]]).collect());
            prop_assert_eq!(admissible_m_set(&map), admissible_m_set(&sandwiched));
        }
    }
}
