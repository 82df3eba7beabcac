use std::collections::BTreeSet;

use lssd_core::exact::rat;
use lssd_core::exact::BitMatrix;
use lssd_core::geometry::{equiangular_gram, frame_sum_check, lssd_from_gram, mub_gram, simplex_gram, GramMode};
use lssd_core::gf2kerdock::{
    cameron_seidel_lssd, golden_kerdock_n4, kerdock_simplex, rm1_coset, search_kerdock_family,
};
use lssd_core::golden::{golden_bw_h12, golden_bw_h13, golden_bw_h23, golden_q2_coset, golden_q2_simplex};
use lssd_core::hadamard_oa::{
    beth_wocjan_matrix, beth_wocjan_unbiased_set, golden_h4, golden_oa16, hadamards_from_lssd,
    lssd_from_unbiased_hadamards, mols_oa, unbiased, HadamardError,
};
use lssd_core::lssd::{restrict_fibers, verify_lssd};
use num_rational::BigRational;
use proptest::prelude::*;

fn row_set(m: &BitMatrix) -> BTreeSet<Vec<bool>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect())
        .collect()
}

#[test]
fn printed_coset_and_simplex_match() {
    let fam = golden_kerdock_n4();
    let q2 = &fam.forms[1];
    assert_eq!(row_set(&rm1_coset(q2)), row_set(&golden_q2_coset()));
    let x2 = kerdock_simplex(q2).vectors;
    let printed = golden_q2_simplex();
    assert_eq!(row_set(&x2), row_set(&printed));
}

#[test]
fn simplices_have_two_cross_dots() {
    let fam = golden_kerdock_n4();
    let simplices: Vec<_> = fam.forms.iter().map(kerdock_simplex).collect();
    for (a, sa) in simplices.iter().enumerate() {
        assert_eq!(sa.len(), 16);
        for i in 0..16 {
            for j in 0..16 {
                let own = sa.dot(i, sa, j);
                assert_eq!(own, if i == j { 15 } else { -1 });
            }
        }
        for sb in &simplices[a + 1..] {
            let dots: BTreeSet<i64> = (0..256).map(|n| sa.dot(n / 16, sb, n % 16)).collect();
            assert_eq!(dots, BTreeSet::from([-5, 3]));
        }
    }
}

#[test]
fn search_reproduces_a_valid_family() {
    let fam = search_kerdock_family(4, 8, 1_000_000).unwrap();
    fam.validate().unwrap();
    let g = cameron_seidel_lssd(&fam).unwrap();
    assert!(verify_lssd(&g).passed());
}

#[test]
fn beth_wocjan_reproduces_printed_matrices() {
    let o = golden_oa16();
    let h = golden_h4();
    assert_eq!(beth_wocjan_matrix(&o, &h, 0, 1), golden_bw_h12());
    assert_eq!(beth_wocjan_matrix(&o, &h, 0, 2), golden_bw_h13());
    assert_eq!(beth_wocjan_matrix(&o, &h, 1, 2), golden_bw_h23());
    // The constructed set pairs column 0 with each other column.
    assert!(unbiased(&golden_bw_h12(), &golden_bw_h13()));
}

#[test]
fn hadamard_lssd_round_trip() {
    let out = beth_wocjan_unbiased_set(&golden_oa16(), &golden_h4()).unwrap();
    let g = lssd_from_unbiased_hadamards(&out.set).unwrap();
    let r = verify_lssd(&g);
    assert!(r.passed());
    let back = hadamards_from_lssd(&g).unwrap();
    assert_eq!(back.len(), out.set.len());
    assert_eq!(lssd_from_unbiased_hadamards(&back).unwrap(), g);
}

#[test]
fn kerdock_gives_seven_unbiased_hadamards() {
    let g = cameron_seidel_lssd(&golden_kerdock_n4()).unwrap();
    let set = hadamards_from_lssd(&g).unwrap();
    assert_eq!(set.len(), 7);
    assert!(set.is_regular());
    let ms = set.matrices();
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            assert!(unbiased(&ms[i], &ms[j]));
        }
    }
    let pair = restrict_fibers(&g, &[0, 4]).unwrap();
    assert_eq!(hadamards_from_lssd(&pair).unwrap().len(), 1);
}

#[test]
fn mols_array_of_prime_order_rejected_for_wrong_symbols() {
    let o = mols_oa(3).unwrap();
    assert!(matches!(
        beth_wocjan_unbiased_set(&o, &golden_h4()),
        Err(HadamardError::SymbolMismatch { .. })
    ));
}

#[test]
fn kerdock_lines_and_gram_round_trip() {
    let g = cameron_seidel_lssd(&golden_kerdock_n4()).unwrap();
    let (lines, coeffs) = equiangular_gram(&g, 8).unwrap();
    assert_eq!(lines.dim, 128);
    assert_eq!(lines.rank(), 23);
    assert_eq!(coeffs.cosine, rat(1, 5));

    let (gram, _) = simplex_gram(g.params(), g.w(), Some(&g), GramMode::First).unwrap();
    assert_eq!(lssd_from_gram(&gram, g.v(), g.w()).unwrap(), g);

    let m = mub_gram(&restrict_fibers(&g, &[0, 1, 2]).unwrap()).unwrap();
    assert!(m.is_mub);
}

fn frame_vec(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), n).prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn simplex_is_tight_frame(x in frame_vec(15), y in frame_vec(15)) {
        let s = kerdock_simplex(&golden_kerdock_n4().forms[3]);
        let (lhs, rhs) = frame_sum_check(&s, &x, &y);
        prop_assert_eq!(lhs, rhs);
    }
}
