//! The 21 classical families of symmetric designs and their LSSD screen.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{prime_power, screen_params, ScreenVerdict};
use crate::designs::{validate_params, DesignError, DesignParams};
use crate::exact::{rat, Rational};

pub const FAMILY_COUNT: u8 = 21;

/// Index parameters of one family member; unused names stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct FamilyIndex {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            ("q", self.q),
            ("m", self.m),
            ("d", self.d),
            ("t", self.t),
            ("n", self.n),
            ("p", self.p),
        ]
        .iter()
        .filter_map(|(name, x)| x.map(|x| format!("{name}={x}")))
        .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub family: u8,
    pub index: FamilyIndex,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum FamilyRejection {
    /// A family-level obstruction rules out every member without arithmetic.
    #[error("{0}")]
    Obstruction(&'static str),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("formula yields an invalid design: {0}")]
    InvalidDesign(String),
    #[error("unknown family {0}")]
    UnknownFamily(u8),
}

impl From<DesignError> for FamilyRejection {
    fn from(e: DesignError) -> Self {
        FamilyRejection::InvalidDesign(e.to_string())
    }
}

fn need(x: Option<u64>, name: &str) -> Result<i128, FamilyRejection> {
    x.map(|x| x as i128)
        .ok_or_else(|| FamilyRejection::InvalidIndex(format!("missing {name}")))
}

fn need_prime_power(q: i128, what: &str) -> Result<(), FamilyRejection> {
    if q > 0 && prime_power(q as u64).is_some() {
        Ok(())
    } else {
        Err(FamilyRejection::InvalidIndex(format!(
            "{what} = {q} is not a prime power"
        )))
    }
}

fn exact_div(a: i128, b: i128, what: &str) -> Result<i128, FamilyRejection> {
    if b != 0 && a % b == 0 {
        Ok(a / b)
    } else {
        Err(FamilyRejection::InvalidIndex(format!(
            "{what} = {a}/{b} is not an integer"
        )))
    }
}

/// `q^a + q^(a+1) + … + q^b`.
fn geo(q: i128, a: u32, b: u32) -> i128 {
    (a..=b).map(|i| q.pow(i)).sum()
}

fn small(x: i128, name: &str) -> Result<u32, FamilyRejection> {
    u32::try_from(x)
        .ok()
        .filter(|&x| x <= 40)
        .ok_or_else(|| FamilyRejection::InvalidIndex(format!("{name} = {x} out of range")))
}

/// Closed-form `(v, k, λ)` of a family member.
pub fn family_params(f: &FamilySpec) -> Result<DesignParams, FamilyRejection> {
    let ix = &f.index;
    let (v, k, l): (i128, i128, i128) = match f.family {
        1 => {
            let (q, m) = (need(ix.q, "q")?, need(ix.m, "m")?);
            need_prime_power(q, "q")?;
            let m = small(m, "m")?;
            if m < 2 {
                return Err(FamilyRejection::InvalidIndex("m must be at least 2".into()));
            }
            (geo(q, 0, m), geo(q, 0, m - 1), geo(q, 0, m - 2))
        }
        2 => {
            let n = need(ix.n, "n")?;
            (4 * n - 1, 2 * n - 1, n - 1)
        }
        3 | 4 => return Err(FamilyRejection::Obstruction("v must be prime")),
        5 => {
            let p = need(ix.p, "p")?;
            let q = 3 * p + 2;
            for (x, name) in [(p, "p"), (q, "q = 3p+2")] {
                if !super::is_prime(x as u64) {
                    return Err(FamilyRejection::InvalidIndex(format!("{name} = {x} is not prime")));
                }
            }
            let v = p * q;
            (v, exact_div(v - 1, 4, "k")?, exact_div(v - 5, 16, "lambda")?)
        }
        6 => {
            let t = need(ix.t, "t")?;
            (4 * t * t, 2 * t * t - t, t * t - t)
        }
        7 => {
            let (q, m) = (need(ix.q, "q")?, small(need(ix.m, "m")?, "m")?);
            need_prime_power(q, "q")?;
            let qm = q.pow(m);
            (
                q.pow(m + 1) * (geo(q, 1, m) + 2),
                qm * geo(q, 0, m),
                qm * geo(q, 0, m.max(1) - 1),
            )
        }
        8 => {
            let m = need(ix.m, "m")?;
            (m * m * m + m + 1, m * m + 1, m)
        }
        9 => {
            let m = small(need(ix.m, "m")?, "m")?;
            let (a, b) = (3i128.pow(m), 3i128.pow(m - 1));
            (a * (a - 1) / 2, b * (a + 1) / 2, b * (b + 1) / 2)
        }
        10 => {
            let (q, d, m) = (
                need(ix.q, "q")?,
                small(need(ix.d, "d")?, "d")?,
                small(need(ix.m, "m")?, "m")?,
            );
            need_prime_power(q, "q")?;
            let r = (q.pow(d) - 1) / (q - 1);
            if r < 2 {
                return Err(FamilyRejection::InvalidIndex("r must exceed 1".into()));
            }
            let lam = exact_div(r.pow(m - 1) * (r - 1), q, "lambda")?;
            (1 + q * r * (r.pow(m) - 1) / (r - 1), r.pow(m), lam)
        }
        11 => {
            let (q, m) = (need(ix.q, "q")?, small(need(ix.m, "m")?, "m")?);
            need_prime_power(q, "q")?;
            let lam = exact_div(q.pow(m - 1) * (q - 1), 2, "lambda")?;
            (2 * geo(q, 1, m) + 1, q.pow(m), lam)
        }
        12 => {
            let (q, d, m) = (
                need(ix.q, "q")?,
                small(need(ix.d, "d")?, "d")?,
                small(need(ix.m, "m")?, "m")?,
            );
            need_prime_power(q, "q")?;
            let r = (q.pow(d + 1) - 1) / (q - 1);
            (
                q.pow(d + 1) * ((r.pow(2 * m) - 1) / (r - 1)),
                r.pow(2 * m - 1) * q.pow(d),
                (r - 1) * r.pow(2 * m - 2) * q.pow(d - 1),
            )
        }
        13 => {
            let d = small(need(ix.d, "d")?, "d")?;
            let two = |e: u32| 2i128.pow(e);
            (
                two(2 * d + 4) * (two(2 * d + 2) - 1) / 3,
                two(2 * d + 1) * (two(2 * d + 3) + 1) / 3,
                two(2 * d + 1) * (two(2 * d + 1) + 1) / 3,
            )
        }
        14 => {
            let (q, d) = (need(ix.q, "q")?, small(need(ix.d, "d")?, "d")?);
            need_prime_power(q, "q")?;
            let q2d = q.pow(2 * d);
            (
                4 * q2d * (q2d - 1) / (q * q - 1),
                // The divisor is q+1; with q−1 the triple fails k(k−1) = λ(v−1).
                q.pow(2 * d - 1) * (1 + 2 * exact_div(q2d - 1, q + 1, "k")?),
                exact_div(q.pow(2 * d - 1) * (q - 1) * (q.pow(2 * d - 1) + 1), q + 1, "lambda")?,
            )
        }
        15 => {
            let (q, d, m) = (
                need(ix.q, "q")?,
                small(need(ix.d, "d")?, "d")?,
                small(need(ix.m, "m")?, "m")?,
            );
            need_prime_power(q, "q")?;
            let qd = q.pow(d);
            let r = q.pow(d + 1) + q - 1;
            (
                exact_div(qd * (r.pow(2 * m) - 1), (q - 1) * (qd + 1), "v")?,
                qd * r.pow(2 * m - 1),
                qd * (qd + 1) * (q - 1) * r.pow(2 * m - 2),
            )
        }
        16 => {
            let (d, m) = (small(need(ix.d, "d")?, "d")?, small(need(ix.m, "m")?, "m")?);
            let t = 3i128.pow(d);
            let q = exact_div(3 * t + 1, 2, "q")?;
            need_prime_power(q, "q")?;
            (
                exact_div(2 * t * (q.pow(2 * m) - 1), t + 1, "v")?,
                t * q.pow(2 * m - 1),
                exact_div(t * (t + 1) * q.pow(2 * m - 2), 2, "lambda")?,
            )
        }
        17 => {
            let (d, m) = (small(need(ix.d, "d")?, "d")?, small(need(ix.m, "m")?, "m")?);
            let t = 3i128.pow(d);
            let q = 3 * t - 2;
            need_prime_power(q, "q")?;
            (
                exact_div(t * (q.pow(2 * m) - 1), 2 * (t - 1), "v")?,
                t * q.pow(2 * m - 1),
                2 * t * (t - 1) * q.pow(2 * m - 2),
            )
        }
        18 => {
            let (d, m) = (small(need(ix.d, "d")?, "d")?, small(need(ix.m, "m")?, "m")?);
            let q = exact_div(2i128.pow(2 * d + 3) + 1, 3, "q")?;
            need_prime_power(q, "q")?;
            (
                exact_div(2i128.pow(2 * d + 3) * (q.pow(2 * m) - 1), q + 1, "v")?,
                2i128.pow(2 * d + 1) * q.pow(2 * m - 1),
                2i128.pow(2 * d - 1) * (q + 1) * q.pow(2 * m - 2),
            )
        }
        19 => {
            let (d, m) = (small(need(ix.d, "d")?, "d")?, small(need(ix.m, "m")?, "m")?);
            let q = 2i128.pow(2 * d + 3) - 3;
            need_prime_power(q, "q")?;
            (
                exact_div(2i128.pow(2 * d + 3) * (q.pow(2 * m) - 1), 3 * q - 3, "v")?,
                2i128.pow(2 * d + 1) * q.pow(2 * m - 1),
                3 * 2i128.pow(2 * d - 1) * (q - 1) * q.pow(2 * m - 2),
            )
        }
        20 => {
            let d = small(need(ix.d, "d")?, "d")?;
            let mersenne = 2i128.pow(d) - 1;
            if !super::is_prime(mersenne as u64) {
                return Err(FamilyRejection::InvalidIndex(format!(
                    "2^d - 1 = {mersenne} is not a Mersenne prime"
                )));
            }
            return Err(FamilyRejection::Obstruction(
                "order n = 2^(2dm-d-1)(2^d-1) is never a square",
            ));
        }
        21 => {
            let (t, m) = (need(ix.t, "t")?, small(need(ix.m, "m")?, "m")?);
            let q = (2 * t - 1) * (2 * t - 1);
            need_prime_power(q, "q")?;
            (
                4 * t * t * ((q.pow(m + 1) - 1) / (q - 1)),
                (2 * t * t - t) * q.pow(m),
                (t * t - t) * q.pow(m),
            )
        }
        other => return Err(FamilyRejection::UnknownFamily(other)),
    };
    let fit = |x: i128| i64::try_from(x).map_err(|_| FamilyRejection::InvalidIndex(format!("{x} overflows")));
    Ok(validate_params(fit(v)?, fit(k)?, fit(l)?)?)
}

/// The appendix's simplified closed form for the integral ν, where one is given.
pub fn appendix_nu(f: &FamilySpec) -> Option<Rational> {
    let ix = &f.index;
    let g = |x: Option<u64>| x.map(|x| x as i64);
    let pw = |b: i64, e: i64| b.pow(e as u32);
    let geo = |q: i64, a: i64, b: i64| (a..=b).map(|i| pw(q, i)).sum::<i64>();
    Some(match f.family {
        6 => {
            let t = g(ix.t)?;
            if t % 2 == 1 {
                rat((2 * t - 1) * (t - 1), 2)
            } else {
                rat((2 * t - 1) * t, 2)
            }
        }
        7 => {
            let (q, m) = (g(ix.q)?, g(ix.m)?);
            rat(pw(q, m - 1) * geo(q, 0, m), 1)
        }
        9 => {
            let m = g(ix.m)?;
            rat((pw(3, m) + 1) * pw(3, m), 2 * 9)
        }
        12 if ix.m == Some(1) => {
            let (q, d) = (g(ix.q)?, g(ix.d)?);
            rat(pw(q, d - 1) * (pw(q, d + 1) - 1), q - 1)
        }
        13 if ix.d != Some(0) => {
            let d = g(ix.d)?;
            // (2^(2d+3)+1) 2^(2d-1) / 3
            rat((pw(2, 2 * d + 3) + 1) * pw(2, 2 * d + 1), 3 * 4)
        }
        15 if ix.m == Some(1) => {
            let (q, d) = (g(ix.q)?, g(ix.d)?);
            let r = pw(q, d + 1) + q - 1;
            rat((q - 1) * pw(q, d) * r, q)
        }
        16 if ix.m == Some(1) => {
            let d = g(ix.d)?;
            let q = (pw(3, d + 1) + 1) / 2;
            rat(pw(3, d) * q, 3)
        }
        17 if ix.m == Some(1) => {
            let d = g(ix.d)?;
            let q = pw(3, d + 1) - 2;
            rat(2 * q * pw(3, d), 3)
        }
        18 if ix.m == Some(1) => {
            let d = g(ix.d)?;
            let q = (pw(2, 2 * d + 3) + 1) / 3;
            rat(pw(2, 2 * d) * q, 2)
        }
        19 if ix.m == Some(1) => {
            let d = g(ix.d)?;
            let q = pw(2, 2 * d + 3) - 3;
            rat(pw(2, 2 * d) * 3 * q, 2)
        }
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyVerdict {
    AlwaysPass,
    PassIffMEquals1,
    NeverPass,
    Mixed,
}

impl fmt::Display for FamilyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyVerdict::AlwaysPass => "always-pass",
            FamilyVerdict::PassIffMEquals1 => "pass-iff-m=1",
            FamilyVerdict::NeverPass => "never-pass",
            FamilyVerdict::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRow {
    pub family: u8,
    pub index: FamilyIndex,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RowOutcome {
    Screened(ScreenVerdict),
    Rejected(FamilyRejection),
}

impl FamilyRow {
    pub fn passes(&self) -> bool {
        matches!(&self.outcome, RowOutcome::Screened(s) if s.feasible)
    }

    /// Rows with an index outside the family's constraints carry no verdict.
    pub fn counts(&self) -> bool {
        !matches!(
            self.outcome,
            RowOutcome::Rejected(FamilyRejection::InvalidIndex(_) | FamilyRejection::InvalidDesign(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTable {
    pub family: u8,
    pub rows: Vec<FamilyRow>,
    pub verdict: FamilyVerdict,
}

pub fn screen_family(family: u8, indices: &[FamilyIndex]) -> FamilyTable {
    let rows: Vec<FamilyRow> = indices
        .iter()
        .map(|&index| {
            let outcome = match family_params(&FamilySpec { family, index }) {
                Ok(p) => RowOutcome::Screened(screen_params(&p)),
                Err(e) => RowOutcome::Rejected(e),
            };
            FamilyRow { family, index, outcome }
        })
        .collect();
    let verdict = aggregate(&rows);
    FamilyTable { family, rows, verdict }
}

fn aggregate(rows: &[FamilyRow]) -> FamilyVerdict {
    let counted: Vec<&FamilyRow> = rows.iter().filter(|r| r.counts()).collect();
    if counted.iter().all(|r| !r.passes()) {
        return FamilyVerdict::NeverPass;
    }
    if counted.iter().all(|r| r.passes()) {
        return FamilyVerdict::AlwaysPass;
    }
    let m_rule = counted
        .iter()
        .all(|r| r.index.m.is_some() && r.passes() == (r.index.m == Some(1)));
    if m_rule {
        FamilyVerdict::PassIffMEquals1
    } else {
        FamilyVerdict::Mixed
    }
}

/// Name of the index the `--range` option sweeps for a family.
pub fn primary_index(family: u8) -> &'static str {
    match family {
        2 => "n",
        3 | 4 | 6 | 21 => "t",
        5 => "p",
        13 | 14 | 20 => "d",
        _ => "m",
    }
}

/// Family members with the primary index over `range` and the remaining
/// indices at their standard values.
pub fn indices_for_range(family: u8, range: std::ops::RangeInclusive<u64>) -> Vec<FamilyIndex> {
    let x = |v: u64| Some(v);
    let mut out = Vec::new();
    for a in range {
        let base = FamilyIndex::default();
        let set: Vec<FamilyIndex> = match family {
            1 => (2..=5)
                .map(|q| FamilyIndex {
                    q: x(q),
                    m: x(a),
                    ..base
                })
                .collect(),
            2 => vec![FamilyIndex { n: x(a), ..base }],
            3 | 4 | 6 => vec![FamilyIndex { t: x(a), ..base }],
            5 => vec![FamilyIndex { p: x(a), ..base }],
            7 | 11 => (2..=4)
                .map(|q| FamilyIndex {
                    q: x(q),
                    m: x(a),
                    ..base
                })
                .collect(),
            8 | 9 => vec![FamilyIndex { m: x(a), ..base }],
            10 => (2..=4)
                .map(|q| FamilyIndex {
                    q: x(q),
                    d: x(2),
                    m: x(a),
                    ..base
                })
                .collect(),
            12 => (1..=2)
                .map(|d| FamilyIndex {
                    q: x(2),
                    d: x(d),
                    m: x(a),
                    ..base
                })
                .collect(),
            13 => vec![FamilyIndex { d: x(a), ..base }],
            14 => (2..=3)
                .map(|q| FamilyIndex {
                    q: x(q),
                    d: x(a),
                    ..base
                })
                .collect(),
            15 => vec![FamilyIndex {
                q: x(2),
                d: x(1),
                m: x(a),
                ..base
            }],
            16..=19 => vec![FamilyIndex {
                d: x(1),
                m: x(a),
                ..base
            }],
            20 => vec![FamilyIndex {
                d: x(a),
                m: x(1),
                ..base
            }],
            21 => (1..=2)
                .map(|m| FamilyIndex {
                    t: x(a),
                    m: x(m),
                    ..base
                })
                .collect(),
            _ => Vec::new(),
        };
        out.extend(set);
    }
    out
}

/// The standard index ranges for each family.
pub fn standard_indices(family: u8) -> Vec<FamilyIndex> {
    let range = match family {
        1 => 2..=5,
        2 => 2..=40,
        3 | 4 => 2..=10,
        5 => {
            return [3, 5, 7, 11]
                .iter()
                .flat_map(|&p| indices_for_range(5, p..=p))
                .collect()
        }
        6 => 2..=20,
        7 => 1..=3,
        8 => 2..=10,
        9 => 2..=4,
        10 | 11 => 1..=4,
        12 => 1..=3,
        13 => 1..=3,
        14 => 1..=2,
        15..=19 => 1..=3,
        20 => 2..=5,
        21 => 2..=6,
        _ => return Vec::new(),
    };
    indices_for_range(family, range)
}
