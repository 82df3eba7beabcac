//! Parameter-level screening: the integrality lemma, bounds on the number of
//! fibers, and Menon parameters.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::designs::{validate_params, DesignError, DesignParams};
use crate::exact::{exact_sqrt, Rational};
use crate::lssd::{mu_nu, Branch};

pub mod families;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScreenVerdict {
    pub params: DesignParams,
    pub s_integral: bool,
    pub nu_plus_integral: bool,
    pub nu_minus_integral: bool,
    pub gcd_k_v: u64,
    /// `None` when `s` is irrational.
    pub gcd_s_v: Option<u64>,
    pub v_composite: bool,
    pub degenerate: bool,
    pub feasible: bool,
    pub branch: Option<Branch>,
    pub nu: Option<u64>,
    pub mu: Option<u64>,
    /// Names of the failed conditions.
    pub notes: Vec<String>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, e)` with `p^e = n`, by trial division.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// Evaluates every condition of the integrality lemma; nothing short-circuits.
pub fn integrality_screen(v: i64, k: i64, lambda: i64) -> Result<ScreenVerdict, DesignError> {
    let p = validate_params(v, k, lambda)?;
    Ok(screen_params(&p))
}

pub fn screen_params(p: &DesignParams) -> ScreenVerdict {
    let (v, k) = (p.v, p.k);
    let mut notes = Vec::new();
    let s = p.s;
    let (nu_plus_integral, nu_minus_integral) = match s {
        Some(s) => ((k * (k + s)) % v == 0, (k * (k - s)) % v == 0),
        None => (false, false),
    };
    if s.is_none() {
        notes.push("s not integral".to_string());
    } else {
        match (nu_plus_integral, nu_minus_integral) {
            (false, false) => notes.push("nu not integral".to_string()),
            (true, true) => notes.push("both nu branches integral".to_string()),
            _ => {}
        }
    }
    let gcd_k_v = k.gcd(&v);
    if gcd_k_v == 1 {
        notes.push("gcd(k,v) = 1".to_string());
    }
    let gcd_s_v = s.map(|s| s.gcd(&v));
    if gcd_s_v == Some(1) {
        notes.push("gcd(s,v) = 1".to_string());
    }
    let v_composite = !is_prime(v);
    if !v_composite {
        notes.push("v prime".to_string());
    }
    if p.degenerate {
        notes.push("degenerate".to_string());
    }
    let mn = mu_nu(p).ok();
    let feasible = s.is_some()
        && (nu_plus_integral != nu_minus_integral)
        && gcd_k_v > 1
        && gcd_s_v.is_some_and(|g| g > 1)
        && !p.degenerate;
    ScreenVerdict {
        params: *p,
        s_integral: s.is_some(),
        nu_plus_integral,
        nu_minus_integral,
        gcd_k_v,
        gcd_s_v,
        v_composite,
        degenerate: p.degenerate,
        feasible,
        branch: mn.map(|m| m.branch),
        nu: mn.map(|m| m.nu),
        mu: mn.map(|m| m.mu),
        notes,
    }
}

fn choose3(x: u64) -> BigInt {
    let x = BigInt::from(x);
    if x < BigInt::from(3) {
        return BigInt::from(0);
    }
    &x * (&x - 1) * (&x - 2) / 6
}

/// The full binomial-coefficient bound at `w`:
/// `(w−1)[(k−2)λC(k,3) − (v−2)T] ≤ (v−2)[(v−1)C(λ,3) + C(k,3) − T]`
/// with `T = (v−k)C(ν,3) + kC(μ,3)`.
pub fn noda_full_holds(p: &DesignParams, mu: u64, nu: u64, w: u64) -> bool {
    let (v, k, l) = (BigInt::from(p.v), BigInt::from(p.k), BigInt::from(p.lambda));
    let t = (&v - &k) * choose3(nu) + &k * choose3(mu);
    let lhs = BigInt::from(w as i64 - 1) * ((&k - 2) * &l * choose3(p.k) - (&v - 2) * &t);
    let rhs = (&v - 2) * ((&v - 1) * choose3(p.lambda) + choose3(p.k) - &t);
    lhs <= rhs
}

/// Simplified form `(w−1)(2k−v) ≤ (v−2)s`.
pub fn noda_simplified_holds(p: &DesignParams, w: u64) -> Option<bool> {
    let s = p.s_i()?;
    Some((w as i64 - 1) * (2 * p.k_i() - p.v_i()) <= (p.v_i() - 2) * s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub params: DesignParams,
    /// `(w, holds)` for every candidate `w` from 2 up to one past the absolute bound.
    pub noda_full_holds_at_w: Vec<(u64, bool)>,
    /// `(v−2)s/(2k−v) + 1`, present when `2k > v`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub krein_w_max: Option<Rational>,
    pub absolute_w_max: u64,
    /// `2u²` when `v = 4u²` and `v − 2k = −2s`.
    pub menon_w_max: Option<u64>,
    /// Set when the Menon case applies with `u` odd, which forces `w = 2`.
    pub menon_forces_w2: bool,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Evaluates every bound on the supplied triple as written.
pub fn bounds(p: &DesignParams, q111_is_zero: bool) -> BoundsReport {
    let v = p.v;
    let absolute_w_max = if q111_is_zero { v.div_ceil(2) } else { (v - 1) / 2 };
    let noda_full_holds_at_w = match mu_nu(p) {
        Ok(mn) => (2..=absolute_w_max.max(2) + 1)
            .map(|w| (w, noda_full_holds(p, mn.mu, mn.nu, w)))
            .collect(),
        Err(_) => Vec::new(),
    };
    let two_k_minus_v = 2 * p.k_i() - p.v_i();
    let krein_w_max = match p.s_i() {
        Some(s) if two_k_minus_v > 0 => Some(
            Rational::new(BigInt::from((p.v_i() - 2) * s), BigInt::from(two_k_minus_v))
                + Rational::from_integer(BigInt::from(1)),
        ),
        _ => None,
    };
    let (menon_w_max, menon_forces_w2) = match (p.s_i(), exact_sqrt(v)) {
        (Some(s), Some(root)) if root % 2 == 0 && p.v_i() - 2 * p.k_i() == -2 * s => {
            let u = root / 2;
            (Some(2 * u * u), u % 2 == 1)
        }
        _ => (None, false),
    };
    BoundsReport {
        params: *p,
        noda_full_holds_at_w,
        krein_w_max,
        absolute_w_max,
        menon_w_max,
        menon_forces_w2,
    }
}

/// The complementary Menon pair `(4u², (2u−1)u, (u−1)u)` and `(4u², (2u+1)u, (u+1)u)`.
pub fn menon_params(u: u64) -> (DesignParams, DesignParams) {
    let u = u.max(1) as i64;
    let v = 4 * u * u;
    (
        validate_params(v, (2 * u - 1) * u, (u - 1) * u).expect("Menon parameters"),
        validate_params(v, (2 * u + 1) * u, (u + 1) * u).expect("Menon parameters"),
    )
}
