use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::draws::{draw_tower, TowerFamily};
use super::*;
use crate::cyclotomic::main_predict;

fn ext(q: u64) -> QuadExt {
    QuadExt::from_q(q).unwrap()
}

fn fin(x: Elem) -> ProjectivePoint {
    ProjectivePoint::Finite(x)
}

#[test]
fn infinity_conventions() {
    let e = ext(2);
    let f = e.field();
    let omega = f.gen_pow(1);
    let id = RationalMap::new(Poly::x(), Poly::one()).unwrap();
    assert_eq!(
        id.eval(f, ProjectivePoint::Infinity).unwrap(),
        ProjectivePoint::Infinity
    );
    let m = RationalMap::new(
        Poly::new(vec![Elem::ONE, Elem::ONE]),
        Poly::new(vec![omega, Elem::ONE]),
    )
    .unwrap();
    assert_eq!(m.eval(f, fin(omega)).unwrap(), ProjectivePoint::Infinity);
    assert_eq!(
        m.eval(f, ProjectivePoint::Infinity).unwrap(),
        fin(Elem::ONE)
    );
    let shared = RationalMap::new(
        Poly::new(vec![Elem::ONE, Elem::ONE]),
        Poly::new(vec![Elem::ONE, Elem::ONE]),
    )
    .unwrap();
    assert!(matches!(
        shared.eval(f, fin(Elem::ONE)),
        Err(Error::Indeterminate(_))
    ));
    let lower = RationalMap::new(Poly::one(), Poly::x()).unwrap();
    assert_eq!(
        lower.eval(f, ProjectivePoint::Infinity).unwrap(),
        fin(Elem::ZERO)
    );
    assert!(RationalMap::new(Poly::zero(), Poly::zero()).is_err());
}

#[test]
fn parse_rational() {
    let e = ext(2);
    let m = RationalMap::parse(e.field(), "1,1/g^1,1").unwrap();
    assert_eq!(
        m.eval(e.field(), fin(e.field().gen_pow(1))).unwrap(),
        ProjectivePoint::Infinity
    );
    assert!(RationalMap::parse(e.field(), "1,1").is_err());
}

#[test]
fn gbar_matches_direct_sum_and_fixes_infinity() {
    for q in [4, 8] {
        let e = ext(q);
        let f = e.field();
        for alpha in f.elements().into_iter().filter(|&a| !e.in_base(a)) {
            let g = gbar_map(&e, alpha);
            assert_eq!(
                g.eval(f, ProjectivePoint::Infinity).unwrap(),
                ProjectivePoint::Infinity
            );
            for x in e.base() {
                let direct = f.add(
                    f.add(x, f.inv(f.add(x, alpha)).unwrap()),
                    f.inv(f.add(x, e.frob(alpha))).unwrap(),
                );
                assert_eq!(g.eval(f, fin(x)).unwrap(), fin(direct));
            }
            let line = e.line();
            let target = line.iter().copied().collect();
            let perm = is_bijection_onto(f, &g, &line, &target);
            assert_eq!(perm, f.add(alpha, e.frob(alpha)) == Elem::ONE, "q={q}");
        }
    }
}

#[test]
fn conjugation_law_on_unit_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q in 2..=64u64 {
        if crate::arith::prime_factors(q).len() != 1 {
            continue;
        }
        let e = ext(q);
        let f = e.field();
        for _ in 0..4 {
            let deg = rng.gen_range(0..8);
            let p = Poly::new(
                (0..=deg)
                    .map(|_| Elem(rng.gen_range(0..f.q() as u32)))
                    .collect(),
            );
            let pq = e.conj_poly(&p);
            for &x in e.unit() {
                assert_eq!(e.frob(p.eval(f, x)), pq.eval(f, f.inv(x).unwrap()), "q={q}");
            }
        }
    }
}

#[test]
fn unit_lemma_matches_scan() {
    for q in [2, 3, 4, 5, 8] {
        let e = ext(q);
        let f = e.field();
        let els = f.elements();
        for &a in &els {
            for &b in &els {
                let c = unit_perm_lemma(&e, a, b);
                assert_eq!(c.condition, c.scan, "q={q}");
            }
        }
    }
    let e = ext(4);
    assert!(unit_perm_lemma(&e, Elem::ZERO, Elem::ONE).condition);
    let a = e.field().gen_pow(2);
    assert!(!unit_perm_lemma(&e, a, a).scan);
}

#[test]
fn line_lemma_matches_scan() {
    for q in [2, 3, 4, 5, 8] {
        let e = ext(q);
        let els = e.field().elements();
        for &a in &els {
            for &b in &els {
                let c = unit_to_line_lemma(&e, a, b);
                assert_eq!(c.condition, c.scan, "q={q}");
            }
        }
    }
    let e = ext(4);
    let f = e.field();
    let theta = f.gen_pow(1);
    assert_ne!(f.pow(theta, 3), Elem::ONE);
    let map = RationalMap::new(
        Poly::new(vec![Elem::ONE, Elem::ONE]),
        Poly::new(vec![e.frob(theta), theta]),
    )
    .unwrap();
    assert!(unit_to_line_scan(&e, &map));
}

#[test]
fn deg1_shapes_match_scans() {
    for q in [2, 3, 4] {
        let e = ext(q);
        let f = e.field();
        let els = f.elements();
        let mut unit_hits = 0;
        let mut line_hits = 0;
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    for &d in &els {
                        let Ok(map) = Deg1Map::new(f, a, b, c, d) else {
                            continue;
                        };
                        unit_hits += usize::from(deg1_permutes_unit(&e, &map).unwrap());
                        line_hits += usize::from(deg1_unit_to_line(&e, &map).unwrap());
                    }
                }
            }
        }
        assert!(unit_hits > 0 && line_hits > 0);
    }
    assert!(deg1_permutes_unit(&ext(4), &Deg1Map::identity()).unwrap());
    let f = ext(4);
    assert!(matches!(
        Deg1Map::new(f.field(), Elem::ONE, Elem::ONE, Elem::ONE, Elem::ONE),
        Err(Error::Degenerate)
    ));
}

#[test]
fn deg1_inverse_and_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in [4, 5, 8] {
        let e = ext(q);
        let f = e.field();
        let mut done = 0;
        while done < 50 {
            let mut pick = || Elem(rng.gen_range(0..f.q() as u32));
            let (a, b) = (pick(), pick());
            if e.norm(a) == e.norm(b) {
                continue;
            }
            let map = Deg1Map::new(f, e.frob(b), e.frob(a), a, b).unwrap();
            let back = map.inverse(f);
            let both = map.compose(f, &back);
            for &x in e.unit() {
                assert_eq!(back.eval(f, map.eval(f, fin(x))), fin(x));
                assert_eq!(both.eval(f, fin(x)), fin(x));
            }
            done += 1;
        }
    }
}

#[test]
fn halfplane_examples() {
    let e = ext(4);
    let split = halfplane_split(&e).unwrap();
    assert_eq!(split.a0, vec![Elem::ONE]);
    assert_eq!(split.pairs0.len(), 1);
    let (a, b, c) = split.pairs0[0];
    assert_eq!(e.field().mul(a, b), Elem::ONE);
    assert_eq!(c, Elem::ONE);
    for n in 1..=8u32 {
        let e = ext(1 << n);
        let split = halfplane_split(&e).unwrap();
        assert_eq!(split.a0.len(), (1 << (n - 1)) - 1);
        assert_eq!(split.a1.len(), 1 << (n - 1));
        assert_eq!(split.pairs1.len(), split.a1.len());
    }
    assert!(halfplane_split(&ext(3)).is_err());
}

#[test]
fn g3_examples() {
    let e = ext(4);
    let f = e.field();
    let rec = g3_family(&e, Elem::ONE).unwrap();
    assert!(rec.claims.iter().all(Claim::agrees), "{rec:?}");
    assert!(rec.claims[0].predicted);
    let cubic = SparsePoly::new(vec![(Elem::ONE, 12), (Elem::ONE, 6), (Elem::ONE, 3)]);
    assert!(star_fibers(&e, &cubic).is_m_to_1(3));
    let omega = e
        .base()
        .into_iter()
        .find(|&x| x != Elem::ZERO && x != Elem::ONE)
        .unwrap();
    let rec = g3_family(&e, omega).unwrap();
    assert!(rec.claims.iter().all(Claim::agrees));
    assert!(rec.claims[1].predicted && rec.claims[1].observed);
    assert!(g3_family(&e, Elem::ZERO).is_err());
    let _ = f;
}

#[test]
fn g5_examples() {
    for n in 1..=5u32 {
        let claims = g5_family(&ext(1 << n)).unwrap();
        for c in &claims {
            assert!(c.agrees(), "n={n} {c:?}");
        }
    }
    let claims = g5_family(&ext(4)).unwrap();
    assert!(claims
        .iter()
        .any(|c| c.statement == "g is 5-to-1 on U" && c.observed));
    let e = ext(4);
    let f17 = SparsePoly::new(vec![(Elem::ONE, 17), (Elem::ONE, 8), (Elem::ONE, 5)]);
    assert!(star_fibers(&e, &f17).is_m_to_1(5));
}

#[test]
fn transfer_families_preserve_multiplicity() {
    let e8 = ext(8);
    let f = e8.field();
    for c in e8.base().into_iter().filter(|c| !c.is_zero()) {
        let base = g3_base(&e8, c).unwrap();
        let lifted = hd_transfer(&e8, &base, 7, 1).unwrap();
        for m in 1..=9 {
            assert_eq!(
                lifted.brute_force(m).unwrap().verdict,
                base.brute_force(m).unwrap().verdict
            );
        }
        let tr = e8.base_trace(f.inv(c).unwrap()).unwrap();
        assert_eq!(lifted.brute_force(3).unwrap().verdict, tr.is_zero());
    }
    assert!(matches!(
        hd_transfer(&e8, &g3_base(&e8, Elem::ONE).unwrap(), 3, 1),
        Err(Error::Hypothesis { .. })
    ));
    let e4 = ext(4);
    let base = g5_base(&e4).unwrap();
    let lifted = hd_transfer(&e4, &base, 3, 1).unwrap();
    assert_eq!(lifted.r(), 7);
    assert!(lifted.brute_force(5).unwrap().verdict);
    // (x^{2q} + x^{q+1} + x^2) f expanded by hand
    let direct = SparsePoly::new(vec![
        (Elem::ONE, 2 * 4 + 4 * 4 + 1),
        (Elem::ONE, 2 * 4 + 4 + 4),
        (Elem::ONE, 2 * 4 + 5),
        (Elem::ONE, 4 + 1 + 4 * 4 + 1),
        (Elem::ONE, 4 + 1 + 4 + 4),
        (Elem::ONE, 4 + 1 + 5),
        (Elem::ONE, 2 + 4 * 4 + 1),
        (Elem::ONE, 2 + 4 + 4),
        (Elem::ONE, 2 + 5),
    ]);
    let ef = e4.field();
    for x in ef.nonzero() {
        assert_eq!(direct.eval(ef, x), lifted.eval(x));
    }
}

#[test]
fn identity_tower_reduces_to_main_criterion() {
    for q in [3, 4, 5] {
        let e = ext(q);
        let id = Twisted {
            l: Poly::x(),
            m: Poly::one(),
            eps: Elem::ONE,
            t: 1,
        };
        for n in 1..=q + 1 {
            let tower = Tower::new(
                &e,
                TowerShape::UnitToUnit {
                    inner: id.clone(),
                    outer: id.clone(),
                    n,
                },
            )
            .unwrap();
            tower.check_hypotheses().unwrap();
            for m1 in crate::arith::divisors(q - 1) {
                let Some(r) = choose_r(q, tower.residue(), m1) else {
                    continue;
                };
                let form = tower.form(r).unwrap();
                for m in 1..=m1 * (q + 1) {
                    assert_eq!(
                        tower_predict(&tower, r, m).unwrap(),
                        main_predict(&form, m).unwrap().verdict
                    );
                }
            }
        }
    }
}

#[test]
fn tower_draws_agree_with_scans() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [3, 4, 5] {
        let e = ext(q);
        for family in TowerFamily::ALL {
            if !family.applies(q) {
                continue;
            }
            let mut conforming = 0;
            for _ in 0..60 {
                let Some(draw) = draw_tower(family, &e, &mut rng) else {
                    continue;
                };
                let structure = draw.tower.check_structure();
                assert_eq!(
                    structure.is_ok(),
                    draw.condition,
                    "{family} q={q} {} {structure:?}",
                    draw.params
                );
                if !draw.condition {
                    continue;
                }
                if draw.tower.check_rootless().is_err() {
                    assert_eq!(family, TowerFamily::Gbar, "{}", draw.params);
                    continue;
                }
                conforming += 1;
                let form = draw.tower.form(draw.r).unwrap();
                let fibers = form.star_fibers();
                let m1 = form.m1();
                let ms: Vec<u64> = if family == TowerFamily::Gbar {
                    vec![m1]
                } else {
                    (1..=m1 * (q + 1)).collect()
                };
                for m in ms {
                    let predicted = draw.tower.predict(draw.r, m).unwrap();
                    assert_eq!(
                        predicted,
                        fibers.is_m_to_1(m as usize),
                        "{family} q={q} r={} m={m} {}",
                        draw.r,
                        draw.params
                    );
                }
            }
            if family != TowerFamily::R1L5 {
                assert!(conforming > 0, "{family} q={q}");
            }
        }
    }
}
