//! The 3-class Q-antipodal association scheme carried by a linked system.
//!
//! Relations use the natural ordering: `R1` is adjacency in the μ-heavy member of
//! the complementary pair, `R2` joins distinct vertices of one fiber, `R3` is
//! adjacency in the ν-heavy member. Parameters handed to the table builders may
//! be either member; they are normalized to the μ-heavy one first.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::designs::{complement_params, DesignParams};
use crate::exact::{mat_mul, rat, rat_int, BitMatrix, IntMatrix, RatMatrix, Rational};
use crate::lssd::{mu_nu, LssdError, LssdGraph, MuNu};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error(transparent)]
    Params(#[from] LssdError),
    #[error("degenerate parameters {0}: s(v-2) = {lhs} is not greater than v-2k = {rhs}, so the scheme is not Q-polynomial", lhs = .1, rhs = .2)]
    NotQPolynomial(DesignParams, i64, i64),
    #[error("Krein condition violated: q^{k}_{{{i},{j}}} = {value} < 0")]
    KreinViolation {
        i: usize,
        j: usize,
        k: usize,
        value: Rational,
    },
    #[error("Krein parameter q^{k}_{{{i},{j}}} = {computed} disagrees with the closed form {closed}")]
    KreinMismatch {
        i: usize,
        j: usize,
        k: usize,
        computed: Box<Rational>,
        closed: Box<Rational>,
    },
}

/// Returns the μ-heavy member of `{p, complement(p)}` with its μ, ν.
pub fn natural_params(p: &DesignParams) -> Result<(DesignParams, MuNu), LssdError> {
    let mn = mu_nu(p)?;
    if mn.mu > mn.nu {
        Ok((*p, mn))
    } else {
        let c = complement_params(p);
        let cm = mu_nu(&c)?;
        Ok((c, cm))
    }
}

/// `Q`-polynomial ordering condition `s(v−2) > v−2k` on the μ-heavy member.
pub fn q_polynomial_condition(p: &DesignParams) -> Result<(bool, i64, i64), LssdError> {
    let (p, _) = natural_params(p)?;
    let s = p.s_i().ok_or(LssdError::IrrationalRoot(p.order()))?;
    let lhs = s * (p.v_i() - 2);
    let rhs = p.v_i() - 2 * p.k_i();
    Ok((lhs > rhs, lhs, rhs))
}

/// The four 01 relation matrices on `vw` vertices (fiber-major vertex order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrices {
    pub a: [BitMatrix; 4],
}

impl RelationMatrices {
    pub fn size(&self) -> usize {
        self.a[0].rows()
    }

    /// Index of the relation containing `(x, y)`.
    pub fn relation(&self, x: usize, y: usize) -> usize {
        (0..4)
            .find(|&r| self.a[r].get(x, y))
            .expect("relations partition X x X")
    }
}

/// Builds `A0..A3`. Degenerate systems are refused because their scheme is not
/// Q-polynomial.
pub fn relation_matrices(g: &LssdGraph) -> Result<RelationMatrices, SchemeError> {
    let p = g.params();
    let (ok, lhs, rhs) = q_polynomial_condition(p)?;
    if p.degenerate || !ok {
        return Err(SchemeError::NotQPolynomial(*p, lhs, rhs));
    }
    relation_matrices_unchecked(g)
}

fn relation_matrices_unchecked(g: &LssdGraph) -> Result<RelationMatrices, SchemeError> {
    let mn = mu_nu(g.params())?;
    let mu_heavy = mn.mu > mn.nu;
    let (v, w) = (g.v(), g.w());
    let n = v * w;
    let mut a: [BitMatrix; 4] = std::array::from_fn(|_| BitMatrix::zeros(n, n));
    for x in 0..n {
        for y in 0..n {
            let (fx, vx, fy, vy) = (x / v, x % v, y / v, y % v);
            let r = if x == y {
                0
            } else if fx == fy {
                2
            } else if g.adjacent(fx, vx, fy, vy) == mu_heavy {
                1
            } else {
                3
            };
            a[r].set(x, y, true);
        }
    }
    Ok(RelationMatrices { a })
}

/// `L_i[k][j] = p_{ij}^k`, the closed forms for the natural ordering.
pub fn intersection_numbers(p: &DesignParams, w: usize) -> Result<[IntMatrix; 4], LssdError> {
    let (p, mn) = natural_params(p)?;
    let (v, k, l) = (p.v_i(), p.k_i(), p.lambda_i());
    let (mu, nu) = (mn.mu as i64, mn.nu as i64);
    let w1 = w as i64 - 1;
    let w2 = w as i64 - 2;
    let m = |d: [i64; 16]| IntMatrix::from_i64(4, 4, &d).expect("4x4");
    Ok([
        IntMatrix::identity(4),
        m([
            0,
            k * w1,
            0,
            0, //
            1,
            mu * w2,
            k - 1,
            (k - mu) * w2, //
            0,
            l * w1,
            0,
            (k - l) * w1, //
            0,
            nu * w2,
            k,
            (k - nu) * w2,
        ]),
        m([
            0,
            0,
            v - 1,
            0, //
            0,
            k - 1,
            0,
            v - k, //
            1,
            0,
            v - 2,
            0, //
            0,
            k,
            0,
            v - k - 1,
        ]),
        m([
            0,
            0,
            0,
            (v - k) * w1, //
            0,
            (k - mu) * w2,
            v - k,
            (v + mu - 2 * k) * w2, //
            0,
            (k - l) * w1,
            0,
            (v + l - 2 * k) * w1, //
            1,
            (k - nu) * w2,
            v - k - 1,
            (v + nu - 2 * k) * w2,
        ]),
    ])
}

/// First and second eigenmatrices: rows of `P` index eigenspaces, columns relations.
pub fn eigenmatrices(p: &DesignParams, w: usize) -> Result<(RatMatrix, RatMatrix), LssdError> {
    let (p, _) = natural_params(p)?;
    let s = p.s_i().ok_or(LssdError::IrrationalRoot(p.order()))?;
    let (v, k) = (p.v_i(), p.k_i());
    let w1 = w as i64 - 1;
    let ints = |d: [i64; 16]| RatMatrix::from_vec(4, 4, d.iter().map(|&x| rat_int(x)).collect());
    let pm = ints([
        1,
        k * w1,
        v - 1,
        (v - k) * w1, //
        1,
        s * w1,
        -1,
        -s * w1, //
        1,
        -s,
        -1,
        s, //
        1,
        -k,
        v - 1,
        k - v,
    ])
    .expect("4x4");
    let qm = RatMatrix::from_vec(
        4,
        4,
        vec![
            rat_int(1),
            rat_int(v - 1),
            rat_int(w1 * (v - 1)),
            rat_int(w1),
            rat_int(1),
            rat(v - k, s),
            rat(k - v, s),
            rat_int(-1),
            rat_int(1),
            rat_int(-1),
            rat_int(-w1),
            rat_int(w1),
            rat_int(1),
            rat(-k, s),
            rat(k, s),
            rat_int(-1),
        ],
    )
    .expect("4x4");
    Ok((pm, qm))
}

/// All Krein parameters `q_{ij}^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KreinArray {
    values: Vec<Rational>,
}

impl KreinArray {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.values[(i * 4 + j) * 4 + k]
    }

    /// `L_i*[k][j] = q_{ij}^k`.
    pub fn matrix(&self, i: usize) -> RatMatrix {
        RatMatrix::from_fn(4, 4, |k, j| self.get(i, j, k).clone())
    }
}

/// `q_{ij}^k = (m_i m_j / |X|) Σ_u P_iu P_ju P_ku / k_u²` with `k_u = P_0u`, `m_i = Q_0i`.
pub fn krein_from_eigenmatrices(pm: &RatMatrix, qm: &RatMatrix) -> KreinArray {
    let n: Rational = (0..4).map(|u| pm.get(0, u).clone()).sum();
    let mut values = Vec::with_capacity(64);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let sum: Rational = (0..4)
                    .map(|u| {
                        let ku = pm.get(0, u);
                        pm.get(i, u) * pm.get(j, u) * pm.get(k, u) / (ku * ku)
                    })
                    .sum();
                values.push(qm.get(0, i) * qm.get(0, j) / &n * sum);
            }
        }
    }
    KreinArray { values }
}

/// Closed-form `L1*` and `L3*`.
pub fn closed_form_krein(p: &DesignParams, w: usize) -> Result<(RatMatrix, RatMatrix), LssdError> {
    let (p, _) = natural_params(p)?;
    let s = p.s_i().ok_or(LssdError::IrrationalRoot(p.order()))?;
    let (v, k) = (p.v_i(), p.k_i());
    let wi = w as i64;
    let ws = wi * s;
    let e = 2 * k - v;
    let l1 = RatMatrix::from_vec(
        4,
        4,
        vec![
            rat_int(0),
            rat_int(v - 1),
            rat_int(0),
            rat_int(0),
            rat_int(1),
            rat((1 - wi) * e + (v - 2) * s, ws),
            rat((wi - 1) * (s * (v - 2) + e), ws),
            rat_int(0),
            rat_int(0),
            rat(s * (v - 2) + e, ws),
            rat(s * (wi - 1) * (v - 2) - e, ws),
            rat_int(1),
            rat_int(0),
            rat_int(0),
            rat_int(v - 1),
            rat_int(0),
        ],
    )
    .expect("4x4");
    let l3 = RatMatrix::from_vec(
        4,
        4,
        [0, 0, 0, wi - 1, 0, 0, wi - 1, 0, 0, 1, wi - 2, 0, 1, 0, 0, wi - 2]
            .iter()
            .map(|&x| rat_int(x))
            .collect(),
    )
    .expect("4x4");
    Ok((l1, l3))
}

/// Closed-form `q_{11}^1 = ((1−w)(2k−v) + (v−2)s) / (ws)` on the μ-heavy member.
pub fn q111(p: &DesignParams, w: usize) -> Result<Rational, LssdError> {
    Ok(closed_form_krein(p, w)?.0.get(1, 1).clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeTables {
    pub params: DesignParams,
    pub w: usize,
    pub l: [Vec<Vec<i64>>; 4],
    #[serde(skip)]
    pub p: RatMatrix,
    #[serde(skip)]
    pub q: RatMatrix,
    #[serde(skip)]
    pub lstar1: RatMatrix,
    #[serde(skip)]
    pub lstar3: RatMatrix,
    #[serde(skip)]
    pub krein: KreinArray,
    pub multiplicities: [i64; 4],
}

/// Computes every Krein parameter from `P`, `Q`, cross-checks `L1*`, `L3*` against
/// the closed forms and rejects any negative value.
pub fn krein_parameters(p: &DesignParams, w: usize) -> Result<(RatMatrix, RatMatrix, KreinArray), SchemeError> {
    let (pm, qm) = eigenmatrices(p, w)?;
    let all = krein_from_eigenmatrices(&pm, &qm);
    let (l1, l3) = closed_form_krein(p, w)?;
    for (i, closed) in [(1, &l1), (3, &l3)] {
        for k in 0..4 {
            for j in 0..4 {
                let computed = all.get(i, j, k);
                if computed != closed.get(k, j) {
                    return Err(SchemeError::KreinMismatch {
                        i,
                        j,
                        k,
                        computed: Box::new(computed.clone()),
                        closed: Box::new(closed.get(k, j).clone()),
                    });
                }
            }
        }
    }
    if let Some((i, j, k)) = first_negative(&all) {
        return Err(SchemeError::KreinViolation {
            i,
            j,
            k,
            value: all.get(i, j, k).clone(),
        });
    }
    Ok((l1, l3, all))
}

fn first_negative(q: &KreinArray) -> Option<(usize, usize, usize)> {
    (0..64)
        .map(|n| (n / 16, (n / 4) % 4, n % 4))
        .find(|&(i, j, k)| q.get(i, j, k).is_negative())
}

pub fn scheme_tables(p: &DesignParams, w: usize) -> Result<SchemeTables, SchemeError> {
    let (np, _) = natural_params(p)?;
    let l = intersection_numbers(p, w)?;
    let (pm, qm) = eigenmatrices(p, w)?;
    let (lstar1, lstar3, krein) = krein_parameters(p, w)?;
    let to_i64 = |m: &IntMatrix| -> Vec<Vec<i64>> {
        (0..4)
            .map(|r| m.row(r).iter().map(|x| i64::try_from(x).expect("small")).collect())
            .collect()
    };
    let multiplicities =
        std::array::from_fn(|i| i64::try_from(qm.get(0, i).to_integer()).expect("integral multiplicity"));
    Ok(SchemeTables {
        params: np,
        w,
        l: [to_i64(&l[0]), to_i64(&l[1]), to_i64(&l[2]), to_i64(&l[3])],
        p: pm,
        q: qm,
        lstar1,
        lstar3,
        krein,
        multiplicities,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeReport {
    /// `A_i A_j = Σ_k p_{ij}^k A_k` for all `i, j`.
    pub algebra_ok: bool,
    /// First failing `(i, j, x, y)` in the algebra check.
    pub algebra_witness: Option<(usize, usize, usize, usize)>,
    pub eigen_ok: bool,
    pub krein_ok: bool,
    pub krein_error: Option<String>,
    pub q_polynomial: bool,
    /// `None` when `w = 2` (check skipped).
    pub q_antipodal: Option<bool>,
}

impl SchemeReport {
    pub fn passed(&self) -> bool {
        self.algebra_ok && self.eigen_ok && self.krein_ok && self.q_polynomial && self.q_antipodal.unwrap_or(true)
    }
}

/// Verifies the relation algebra against the closed-form intersection numbers and
/// reports the Q-polynomial and Q-antipodal conditions.
pub fn verify_scheme(g: &LssdGraph) -> Result<SchemeReport, SchemeError> {
    let p = g.params();
    let w = g.w();
    let rel = relation_matrices_unchecked(g)?;
    let l = intersection_numbers(p, w)?;
    let n = rel.size();

    let relation: Vec<u8> = (0..n * n).map(|c| rel.relation(c / n, c % n) as u8).collect();
    let mut witness = None;
    'outer: for (i, li) in l.iter().enumerate() {
        for j in 0..4 {
            for x in 0..n {
                for y in 0..n {
                    // A_j is symmetric, so row y of A_j is column y.
                    let got = rel.a[i].and_count(x, &rel.a[j], y);
                    let r = relation[x * n + y] as usize;
                    if BigInt::from(got) != *li.get(r, j) {
                        witness = Some((i, j, x, y));
                        break 'outer;
                    }
                }
            }
        }
    }

    let (pm, qm) = eigenmatrices(p, w)?;
    let nw = rat_int(n as i64);
    let pq = mat_mul(&pm, &qm).expect("4x4");
    let eigen_ok = pq == RatMatrix::identity(4).scale(&nw);

    let (krein_ok, krein_error, all) = match krein_parameters(p, w) {
        Ok((_, _, all)) => (true, None, all),
        Err(e) => {
            let (pm, qm) = eigenmatrices(p, w)?;
            (false, Some(e.to_string()), krein_from_eigenmatrices(&pm, &qm))
        }
    };
    let (q_polynomial, _, _) = q_polynomial_condition(p)?;
    let q_antipodal = (w > 2).then(|| all.get(3, 3, 1).is_zero() && all.get(3, 3, 2).is_zero());

    Ok(SchemeReport {
        algebra_ok: witness.is_none(),
        algebra_witness: witness,
        eigen_ok,
        krein_ok,
        krein_error,
        q_polynomial: q_polynomial && !p.degenerate,
        q_antipodal,
    })
}
