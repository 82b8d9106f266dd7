use mtoone_core::cyclotomic::{main_predict, CycloForm};
use mtoone_core::galois::{build_field, parse_field, Elem, Poly};
use mtoone_core::multiplicity::{check_m_to_1, FiniteMapping};

#[test]
fn cubic_over_f5() {
    let field = build_field(5, 1, None).unwrap();
    let f = Poly::from_ints(&field, &[0, 1, 0, 1]);
    let map = FiniteMapping::from_fn(field.elements(), |&x| f.eval(&field, x)).unwrap();
    let rep = check_m_to_1(&map, 3).unwrap();
    assert!(rep.verdict);
    let mut e: Vec<String> = rep
        .exceptional_set
        .iter()
        .map(|&x| field.display(x))
        .collect();
    e.sort();
    assert_eq!(e, ["1", "4"]);
}

#[test]
fn twelve_to_one_over_f29() {
    let field = build_field(29, 1, None).unwrap();
    let form = CycloForm::new(&field, 2, 4, Poly::from_ints(&field, &[1, 0, 0, 15, 1, 1])).unwrap();
    assert!(main_predict(&form, 12).unwrap().verdict);
    assert!(form.brute_force(12).unwrap().verdict);
    for m in (1..=14).filter(|&m| m != 12) {
        assert!(!main_predict(&form, m).unwrap().verdict, "m = {m}");
    }
}

#[test]
fn three_to_one_over_f64() {
    let field = parse_field("2^6/1,1,0,1,1,0,1").unwrap();
    let xi9 = field.pow(Elem(2), 9);
    let form = CycloForm::new(&field, 2, 21, Poly::new(vec![xi9, Elem::ONE])).unwrap();
    assert!(main_predict(&form, 3).unwrap().verdict);
    assert!(form.brute_force(3).unwrap().verdict);
}
