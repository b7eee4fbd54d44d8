use num_bigint::BigInt;
use proptest::prelude::*;

use medtk::graphprod::{GraphProductSpec, NormalForm};
use medtk::graphs::{path_graph, Permutation};
use medtk::groups::dinfty::evaluate;
use medtk::groups::{
    abelian_invariants, dinfty_witness, fwn_virtually_abelian, low_index_subgroups, reidemeister_schreier, todd_coxeter,
    DinftyElement, Presentation,
};
use medtk::quasiline::{translation_data, PeriodicQuasiLine, QLIsometry};

fn element() -> impl Strategy<Value = DinftyElement> {
    (-50i64..50, prop::bool::ANY).prop_map(|(t, s)| DinftyElement {
        translation: BigInt::from(t),
        sign: if s { 1 } else { -1 },
    })
}

fn word(generators: i32, len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=generators, prop::bool::ANY).prop_map(|(g, s)| if s { g } else { -g }), 0..len)
}

proptest! {
    #[test]
    fn dinfty_is_a_group(a in element(), b in element(), c in element()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&a.inverse()), DinftyElement::identity());
        prop_assert_eq!(a.inverse().mul(&a), DinftyElement::identity());
    }

    #[test]
    fn evaluation_is_multiplicative(
        sigma in prop::collection::vec(prop::bool::ANY, 3),
        lambda in prop::collection::vec(-5i64..6, 3),
        u in word(3, 6),
        v in word(3, 6),
    ) {
        let sigma: Vec<i8> = sigma.iter().map(|&s| if s { 1 } else { -1 }).collect();
        let lambda: Vec<BigInt> = lambda.into_iter().map(BigInt::from).collect();
        let uv: Vec<i32> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(evaluate(&sigma, &lambda, &uv), evaluate(&sigma, &lambda, &u).mul(&evaluate(&sigma, &lambda, &v)));
    }

    #[test]
    fn coset_tables_close_under_relators(m in 2i32..7, k in 2i32..5) {
        // dihedral group of order 2m, subgroup generated by a reflection power
        let pres = Presentation::new(2, vec![vec![1; m as usize], vec![2, 2], vec![2, 1, -2, 1]]).unwrap();
        let table = todd_coxeter(&pres, &[vec![1; k as usize]], 10_000).unwrap();
        prop_assert!(table.is_closed_under(pres.relators()));
        let g = num_integer::gcd(m, k);
        prop_assert_eq!(table.coset_count() as i32, 2 * g);
    }

    #[test]
    fn cyclic_subgroups_have_cyclic_abelianization(m in 2usize..13) {
        let pres = Presentation::new(1, vec![vec![1; m]]).unwrap();
        for table in low_index_subgroups(&pres, m).unwrap() {
            let d = table.coset_count();
            prop_assert_eq!(m % d, 0);
            let sub = reidemeister_schreier(&pres, &table).unwrap();
            let inv: Vec<BigInt> = abelian_invariants(&sub.presentation).into_iter().filter(|x| *x != BigInt::from(1)).collect();
            let expected: Vec<BigInt> = if m / d == 1 { vec![] } else { vec![BigInt::from(m / d)] };
            prop_assert_eq!(inv, expected);
        }
    }

    #[test]
    fn free_subgroups_follow_the_schreier_formula(rank in 1usize..3, n in 1usize..4) {
        let pres = Presentation::new(rank, vec![]).unwrap();
        for table in low_index_subgroups(&pres, n).unwrap() {
            let k = table.coset_count();
            let sub = reidemeister_schreier(&pres, &table).unwrap();
            let inv = abelian_invariants(&sub.presentation);
            let free = inv.iter().filter(|x| **x == BigInt::from(0)).count();
            prop_assert_eq!(free, k * (rank - 1) + 1);
            prop_assert!(inv.iter().all(|x| *x == BigInt::from(0) || *x == BigInt::from(1)));
        }
    }

    #[test]
    fn fw1_fails_iff_free_rank_or_witness(a in 0i32..4, b in 0i32..4) {
        // <x, y | [x, y], x^a y^b>, virtually abelian
        let mut rel = vec![1; a as usize];
        rel.extend(std::iter::repeat_n(2, b as usize));
        let mut rels = vec![vec![1, 2, -1, -2]];
        if !rel.is_empty() {
            rels.push(rel);
        }
        let pres = Presentation::new(2, rels).unwrap();
        let v = fwn_virtually_abelian(&pres, 1).unwrap();
        let free = abelian_invariants(&pres).contains(&BigInt::from(0));
        let witness = dinfty_witness(&pres).unwrap().is_some();
        prop_assert_eq!(!v.holds, free || witness);
    }

    #[test]
    fn graph_product_multiplication(
        u in prop::collection::vec((0usize..3, 1usize..3), 0..7),
        v in prop::collection::vec((0usize..3, 1usize..3), 0..7),
        w in prop::collection::vec((0usize..3, 1usize..3), 0..7),
    ) {
        let spec = GraphProductSpec::uniform_cyclic(path_graph(3), 3).unwrap();
        let (a, b, c) = (spec.normal_form(&u).unwrap(), spec.normal_form(&v).unwrap(), spec.normal_form(&w).unwrap());
        prop_assert_eq!(spec.multiply(&spec.multiply(&a, &b), &c), spec.multiply(&a, &spec.multiply(&b, &c)));
        prop_assert_eq!(spec.multiply(&a, &spec.inverse(&a)), NormalForm::identity());
        // normal forms are idempotent
        prop_assert_eq!(spec.normal_form(a.syllables()).unwrap(), a.clone());
        // graphically reduced: no two syllables on one vertex with only neighbours between
        let s = a.syllables();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if s[i].0 == s[j].0 {
                    let blocked = s[i + 1..j].iter().any(|x| !spec.gamma().has_edge(x.0, s[i].0));
                    prop_assert!(blocked, "{:?}", s);
                }
            }
        }
    }

    #[test]
    fn quasi_line_isometries_form_a_group(
        s1 in -4i64..5, r1 in prop::bool::ANY, p1 in prop::bool::ANY,
        s2 in -4i64..5, r2 in prop::bool::ANY, p2 in prop::bool::ANY,
        k in -10i64..10, v in 0usize..2,
    ) {
        let iso = |shift, reverses, swap: bool| QLIsometry {
            shift,
            reverses,
            internal: Permutation::new(if swap { vec![1, 0] } else { vec![0, 1] }).unwrap(),
        };
        let (g, h) = (iso(s1, r1, p1), iso(s2, r2, p2));
        prop_assert_eq!(g.compose(&h).apply((k, v)), g.apply(h.apply((k, v))));
        prop_assert_eq!(g.inverse().apply(g.apply((k, v))), (k, v));
        let ladder = PeriodicQuasiLine::new(path_graph(2), vec![(0, 0), (1, 1)]).unwrap();
        prop_assert!(g.is_isometry_of(&ladder));
        let t = translation_data(&ladder, &g).unwrap();
        if r1 {
            prop_assert_eq!(t.h, 0);
        } else {
            prop_assert_eq!(t.h, s1);
        }
    }
}
