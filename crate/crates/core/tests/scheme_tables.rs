use lssd_core::designs::validate_params;
use lssd_core::exact::rat;
use lssd_core::gf2kerdock::{cameron_seidel_lssd, golden_kerdock_n4, kerdock_params};
use lssd_core::hadamard_oa::{beth_wocjan_unbiased_set, golden_h4, golden_oa16, lssd_from_unbiased_hadamards};
use lssd_core::lssd::{degenerate_lssd, restrict_fibers};
use lssd_core::scheme::{
    eigenmatrices, intersection_numbers, krein_parameters, natural_params, q_polynomial_condition, relation_matrices,
    scheme_tables, verify_scheme, SchemeError,
};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Kerdock intersection numbers `p^j_{ab}` for `v = 4^r`, indexed `[pair][j]`
/// with pairs in the order 11, 12, 13, 22, 23, 33.
fn kerdock_p(r: u32, w: i64) -> [[i64; 4]; 6] {
    let t = 1i64 << r;
    let q = 1i64 << (r - 1);
    // Entries printed over 2^{r-2}; for r = 2 the divisor is 1.
    let h = |x: i64| x * q / 2;
    [
        [
            h((2 * t + 2) * (w - 1)),
            h((t + 3) * (w - 2)),
            h((t + 2) * (w - 1)),
            h((t + 1) * (w - 2)),
        ],
        [0, q * (t + 1) - 1, 0, q * (t + 1)],
        [0, h((t - 1) * (w - 2)), h(t * (w - 1)), h((t + 1) * (w - 2))],
        [t * t - 1, 0, t * t - 2, 0],
        [0, q * (t - 1), 0, q * (t - 1) - 1],
        [
            h((2 * t - 2) * (w - 1)),
            h((t - 1) * (w - 2)),
            h((t - 2) * (w - 1)),
            h((t - 3) * (w - 2)),
        ],
    ]
}

/// Kerdock Krein parameters `q^j_{ab}`, same layout.
fn kerdock_q(r: u32, w: i64) -> [[BigRational; 4]; 6] {
    let v = 1i64 << (2 * r);
    let f = |n: i64, d: i64| rat(n, d);
    let z = || rat(0, 1);
    [
        [f(v - 1, 1), f(v - 2 * w, w), f(v, w), z()],
        [z(), f(v * (w - 1), w), f(v * (w - 1) - 2 * w, w), f(v - 1, 1)],
        [z(), z(), f(1, 1), z()],
        [
            f((w - 1) * (v - 1), 1),
            f(v * (w - 1) * (w - 1) - 2 * w * (w - 1), w),
            f(v * (w - 1) * (w - 1) - 2 * w * (w - 2), w),
            f((w - 2) * (v - 1), 1),
        ],
        [z(), f(w - 1, 1), f(w - 2, 1), z()],
        [f(w - 1, 1), z(), z(), f(w - 2, 1)],
    ]
}

const PAIRS: [(usize, usize); 6] = [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

#[test]
fn kerdock_intersection_and_krein_tables() {
    for r in [2u32, 3] {
        let (v, k, l) = kerdock_params(r);
        let p = validate_params(v as i64, k as i64, l as i64).unwrap();
        for w in 2..=(1i64 << (2 * r - 1)) {
            let ls = intersection_numbers(&p, w as usize).unwrap();
            let pt = kerdock_p(r, w);
            let (_, _, krein) = krein_parameters(&p, w as usize).unwrap();
            let qt = kerdock_q(r, w);
            for (n, &(a, b)) in PAIRS.iter().enumerate() {
                for j in 0..4 {
                    assert_eq!(*ls[a].get(j, b), BigInt::from(pt[n][j]), "r={r} w={w} p^{j}_{a}{b}");
                    assert_eq!(*krein.get(a, b, j), qt[n][j], "r={r} w={w} q^{j}_{a}{b}");
                }
            }
        }
    }
}

#[test]
fn kerdock_w_past_bound_has_negative_krein() {
    let p = validate_params(64, 36, 20).unwrap();
    assert!(matches!(
        krein_parameters(&p, 33),
        Err(SchemeError::KreinViolation { i: 1, j: 1, k: 1, .. })
    ));
}

#[test]
fn natural_member_and_q_polynomial() {
    let (np, mn) = natural_params(&validate_params(16, 6, 2).unwrap()).unwrap();
    assert_eq!((np.k, np.lambda, mn.mu, mn.nu), (10, 6, 7, 5));
    let (ok, lhs, rhs) = q_polynomial_condition(&np).unwrap();
    assert!(ok);
    assert_eq!((lhs, rhs), (2 * 14, 16 - 20));
}

#[test]
fn tables_are_consistent() {
    let p = validate_params(36, 15, 6).unwrap();
    for w in 2..=6 {
        let t = scheme_tables(&p, w).unwrap();
        assert_eq!(t.multiplicities.iter().sum::<i64>(), 36 * w as i64);
        let (pm, _) = eigenmatrices(&p, w).unwrap();
        assert_eq!(t.p, pm);
    }
}

#[test]
fn kerdock_scheme_verifies() {
    let g = cameron_seidel_lssd(&golden_kerdock_n4()).unwrap();
    let r = verify_scheme(&g).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.q_antipodal, Some(true));
    let pair = restrict_fibers(&g, &[2, 5]).unwrap();
    let r2 = verify_scheme(&pair).unwrap();
    assert!(r2.passed());
    assert_eq!(r2.q_antipodal, None);
}

#[test]
fn beth_wocjan_scheme_verifies() {
    let out = beth_wocjan_unbiased_set(&golden_oa16(), &golden_h4()).unwrap();
    let g = lssd_from_unbiased_hadamards(&out.set).unwrap();
    let rel = relation_matrices(&g).unwrap();
    assert_eq!(rel.size(), g.v() * g.w());
    assert!(verify_scheme(&g).unwrap().passed());
}

#[test]
fn degenerate_scheme_refused() {
    let g = degenerate_lssd(5, 4).unwrap();
    assert!(matches!(relation_matrices(&g), Err(SchemeError::NotQPolynomial(..))));
    assert!(!verify_scheme(&g).unwrap().passed());
}
