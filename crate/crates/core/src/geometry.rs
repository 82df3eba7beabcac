//! Gram matrices built from the primitive idempotents: linked simplices,
//! equiangular lines and mutually unbiased bases, all carried as integer
//! matrices with an explicit scale.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::designs::{validate_params, DesignParams};
use crate::exact::{rank_int, rat, rat_int, IntMatrix, Rational};
use crate::gf2kerdock::SignSimplex;
use crate::lssd::{classify, verify_lssd, Heaviness, LssdError, LssdGraph, Outlook, Witness};
use crate::scheme::{eigenmatrices, natural_params};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Lssd(#[from] LssdError),
    #[error("s = sqrt({0}) is not an integer")]
    IrrationalRoot(u64),
    #[error("simplex Gram for w = {0} needs a graph")]
    MissingGraph(usize),
    #[error("graph has parameters {found}, expected {expected}")]
    ParamsMismatch {
        expected: DesignParams,
        found: DesignParams,
    },
    #[error("graph has {found} fibers, expected {expected}")]
    FiberCount { expected: usize, found: usize },
    #[error("the second linked pair needs exactly 2 fibers, got {0}")]
    SecondPairNeedsTwoFibers(usize),
    #[error("rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("entry ({i}, {j}) = {value} is not an integer after scaling by {scale}")]
    NotIntegral {
        i: usize,
        j: usize,
        value: Rational,
        scale: i64,
    },
    #[error("Gram is {dim}x{dim}, expected {expected}")]
    Dimension { dim: usize, expected: usize },
    #[error("entry ({i}, {j}) breaks symmetry")]
    Asymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} is {value}, expected the scale {scale}")]
    Diagonal { i: usize, value: BigInt, scale: BigInt },
    #[error("within-fiber entry ({i}, {j}) = {value} is not -scale/(v-1)")]
    NotSimplex { i: usize, j: usize, value: BigInt },
    #[error("cross-fiber entries take {count} values (third value {extra} at ({i}, {j}))")]
    ThreeValues {
        count: usize,
        extra: BigInt,
        i: usize,
        j: usize,
    },
    #[error("cross-fiber entries take a single value")]
    OneValue,
    #[error("row {row} of block ({fa}, {fb}) has {found} larger entries, expected {expected}")]
    BlockDegree {
        fa: usize,
        fb: usize,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("k = {0} is not a positive integer, so these simplices cannot be linked")]
    NonIntegralK(Rational),
    #[error("the recovered parameters are not a design: {0}")]
    NotDesign(String),
    #[error("recovered graph fails verification: {0:?}")]
    Inconsistent(Box<Witness>),
    #[error("t = {t} must lie in 1..={w}")]
    LineCount { t: usize, w: usize },
    #[error("pessimistic system: t = {t} exceeds 2 + 2(k+s)/(v-2k) = {bound}")]
    PessimisticBound { t: usize, bound: Rational },
    #[error("equiangular check failed at ({i}, {j}): {value}")]
    NotEquiangular { i: usize, j: usize, value: BigInt },
}

/// `scale · G` for a real Gram matrix `G` with unit diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledGram {
    pub dim: usize,
    pub scale: BigInt,
    pub entries: IntMatrix,
    pub claimed_rank: usize,
}

impl ScaledGram {
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        self.entries.get(i, j)
    }

    /// The true inner product `entries[i][j] / scale`.
    pub fn inner_product(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.get(i, j).clone(), self.scale.clone())
    }

    pub fn rank(&self) -> usize {
        rank_int(&self.entries)
    }
}

/// Within-fiber and the two cross-fiber inner products of a linked-simplex Gram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramProfile {
    pub within_fiber_ip: Rational,
    pub cross_ip_positive: Rational,
    pub cross_ip_negative: Rational,
}

/// Relation index of `(fa, x)` and `(fb, y)` in the natural ordering.
fn relation(g: &LssdGraph, heavy: Heaviness, fa: usize, x: usize, fb: usize, y: usize) -> usize {
    if fa == fb {
        return if x == y { 0 } else { 2 };
    }
    let edge = g.adjacent(fa, x, fb, y);
    if edge == (heavy == Heaviness::MuHeavy) {
        1
    } else {
        3
    }
}

/// Coefficients `y_u` with `Σ_j c_j E_j = Σ_u y_u A_u` in the natural ordering.
pub fn idempotent_combination(p: &DesignParams, w: usize, c: &[Rational; 4]) -> Result<[Rational; 4], GeometryError> {
    let (_, q) = eigenmatrices(p, w)?;
    let size = rat_int((p.v * w as u64) as i64);
    Ok(std::array::from_fn(|u| {
        (0..4).map(|j| &c[j] * q.get(u, j)).sum::<Rational>() / &size
    }))
}

/// Integer Gram over the first `t` fibers with relation weights `y_u · scale`.
fn assemble(g: &LssdGraph, t: usize, y: &[Rational; 4], scale: i64) -> Result<IntMatrix, GeometryError> {
    let heavy = classify(g.params())?.heaviness;
    let scaled: Vec<Rational> = y.iter().map(|x| x * rat_int(scale)).collect();
    if let Some(u) = scaled.iter().position(|x| !x.is_integer()) {
        return Err(GeometryError::NotIntegral {
            i: u,
            j: u,
            value: y[u].clone(),
            scale,
        });
    }
    let ints: Vec<BigInt> = scaled.iter().map(|x| x.to_integer()).collect();
    let v = g.v();
    Ok(IntMatrix::from_fn(v * t, v * t, |i, j| {
        ints[relation(g, heavy, i / v, i % v, j / v, j % v)].clone()
    }))
}

/// Which idempotent a simplex Gram comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GramMode {
    /// `(vw/(v−1))E₁`.
    #[default]
    First,
    /// The second linked pair of a two-fiber system: one simplex negated.
    SecondPair,
}

/// Scale `D = (v−1)s`: diagonal `D`, within-fiber `−s`, cross-fiber `v−k` on
/// μ-heavy pairs and `−k` on ν-heavy pairs (`k` of the μ-heavy member).
pub fn simplex_gram(
    p: &DesignParams,
    w: usize,
    g: Option<&LssdGraph>,
    mode: GramMode,
) -> Result<(ScaledGram, GramProfile), GeometryError> {
    let (np, _) = natural_params(p)?;
    let s = np.s_i().ok_or(GeometryError::IrrationalRoot(np.order()))?;
    let (v, k) = (np.v_i(), np.k_i());
    let d = (v - 1) * s;
    let vs = np.v as usize;
    let negate = |fa: usize, fb: usize| mode == GramMode::SecondPair && (fa == 0) != (fb == 0);
    let entries = match g {
        None if w == 1 => IntMatrix::from_fn(vs, vs, |i, j| BigInt::from(if i == j { d } else { -s })),
        None => return Err(GeometryError::MissingGraph(w)),
        Some(g) => {
            check_graph(g, p, w)?;
            if mode == GramMode::SecondPair && w != 2 {
                return Err(GeometryError::SecondPairNeedsTwoFibers(w));
            }
            let heavy = classify(g.params())?.heaviness;
            let weights = [d, v - k, -s, -k];
            IntMatrix::from_fn(vs * w, vs * w, |i, j| {
                let (fa, fb) = (i / vs, j / vs);
                let x = weights[relation(g, heavy, fa, i % vs, fb, j % vs)];
                BigInt::from(if negate(fa, fb) { -x } else { x })
            })
        }
    };
    let gram = ScaledGram {
        dim: entries.rows(),
        scale: BigInt::from(d),
        entries,
        claimed_rank: vs - 1,
    };
    let found = gram.rank();
    if found != gram.claimed_rank {
        return Err(GeometryError::RankMismatch {
            expected: gram.claimed_rank,
            found,
        });
    }
    let sign = if mode == GramMode::SecondPair { -1 } else { 1 };
    let profile = GramProfile {
        within_fiber_ip: rat(-1, v - 1),
        cross_ip_positive: rat(sign * (v - k), d),
        cross_ip_negative: rat(-sign * k, d),
    };
    Ok((gram, profile))
}

fn check_graph(g: &LssdGraph, p: &DesignParams, w: usize) -> Result<(), GeometryError> {
    if g.params() != p {
        return Err(GeometryError::ParamsMismatch {
            expected: *p,
            found: *g.params(),
        });
    }
    if g.w() != w {
        return Err(GeometryError::FiberCount {
            expected: w,
            found: g.w(),
        });
    }
    Ok(())
}

/// Recovers the linked system from a simplex Gram: adjacency is the larger
/// cross value `γ`, and `kγ + (v−k)ζ = 0` gives `k = ζv/(ζ−γ)`.
pub fn lssd_from_gram(gram: &ScaledGram, v: usize, w: usize) -> Result<LssdGraph, GeometryError> {
    let n = v * w;
    if gram.dim != n || gram.entries.rows() != n || gram.entries.cols() != n {
        return Err(GeometryError::Dimension {
            dim: gram.dim,
            expected: n,
        });
    }
    let d = &gram.scale;
    let within = -d / BigInt::from(v as i64 - 1);
    if &within * BigInt::from(v as i64 - 1) != -d {
        return Err(GeometryError::NotSimplex {
            i: 0,
            j: 1,
            value: within,
        });
    }
    let mut values: Vec<BigInt> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = gram.get(i, j);
            if x != gram.get(j, i) {
                return Err(GeometryError::Asymmetric { i, j });
            }
            if i == j {
                if x != d {
                    return Err(GeometryError::Diagonal {
                        i,
                        value: x.clone(),
                        scale: d.clone(),
                    });
                }
            } else if i / v == j / v {
                if *x != within {
                    return Err(GeometryError::NotSimplex { i, j, value: x.clone() });
                }
            } else if !values.contains(x) {
                if values.len() == 2 {
                    return Err(GeometryError::ThreeValues {
                        count: 3,
                        extra: x.clone(),
                        i,
                        j,
                    });
                }
                values.push(x.clone());
            }
        }
    }
    if values.len() < 2 {
        return Err(GeometryError::OneValue);
    }
    values.sort();
    let (zeta, gamma) = (values[0].clone(), values[1].clone());
    let k = Rational::new(&zeta * BigInt::from(v as i64), &zeta - &gamma);
    if !k.is_integer() || !k.is_positive() {
        return Err(GeometryError::NonIntegralK(k));
    }
    let k_int = k.to_integer();
    let kk: i64 = i64::try_from(&k_int).map_err(|_| GeometryError::NonIntegralK(k.clone()))?;
    let vi = v as i64;
    if (kk * (kk - 1)) % (vi - 1) != 0 {
        return Err(GeometryError::NotDesign(format!("k = {kk} gives non-integral lambda")));
    }
    let params =
        validate_params(vi, kk, kk * (kk - 1) / (vi - 1)).map_err(|e| GeometryError::NotDesign(e.to_string()))?;
    let mut blocks = Vec::new();
    for fa in 0..w {
        for fb in fa + 1..w {
            let b = crate::exact::BitMatrix::from_fn(v, v, |x, y| *gram.get(fa * v + x, fb * v + y) == gamma);
            if let Some(row) = (0..v).find(|&r| b.row_weight(r) as i64 != kk) {
                return Err(GeometryError::BlockDegree {
                    fa,
                    fb,
                    row,
                    found: b.row_weight(row) as usize,
                    expected: kk as usize,
                });
            }
            blocks.push(b);
        }
    }
    let g = LssdGraph::new(params, w, blocks)?;
    let report = verify_lssd(&g);
    if let Some((_, witness)) = report.failures.into_iter().next() {
        return Err(GeometryError::Inconsistent(Box::new(witness)));
    }
    Ok(g)
}

/// Weights of `E₀, E₁, E₃` as `vw·α`, `vw·β`, `vw·γ` with `w = t`, and the
/// off-diagonal value `c` of the resulting Gram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSystemCoeffs {
    pub line_alpha: Rational,
    pub line_beta: Rational,
    pub line_gamma: Rational,
    /// Off-diagonal magnitude relative to the scale `D = 2s − 1`.
    pub c: Rational,
    /// Diagonal value of the combination, `(2s+1)/(2s−1)`.
    pub diagonal: Rational,
    /// `|cos|` between distinct lines after normalizing: `c / diagonal`.
    pub cosine: Rational,
}

pub fn line_coeffs(p: &DesignParams, t: usize) -> Result<LineSystemCoeffs, GeometryError> {
    let (np, _) = natural_params(p)?;
    let s = np.s_i().ok_or(GeometryError::IrrationalRoot(np.order()))?;
    let (v, k, t) = (np.v_i(), np.k_i(), t as i64);
    let den = 2 * s - 1;
    let c = rat(1, den);
    let diagonal = rat(2 * s + 1, den);
    Ok(LineSystemCoeffs {
        line_alpha: rat(v + 2 * s - (t - 1) * (v - 2 * k), den),
        line_beta: rat(2 * t * s, den),
        line_gamma: rat(2 * v - 2 * k + 2 * s, den),
        cosine: &c / &diagonal,
        c,
        diagonal,
    })
}

/// `vt` lines from the first `t` fibers: `D·(vwα E₀ + vwβ E₁ + vwγ E₃)/(vw)` with `D = 2s−1`.
pub fn equiangular_gram(g: &LssdGraph, t: usize) -> Result<(ScaledGram, LineSystemCoeffs), GeometryError> {
    if t == 0 || t > g.w() {
        return Err(GeometryError::LineCount { t, w: g.w() });
    }
    let p = *g.params();
    let (np, _) = natural_params(&p)?;
    let class = classify(&p)?;
    let s = np.s_i().ok_or(GeometryError::IrrationalRoot(np.order()))?;
    if class.outlook == Outlook::Pessimistic {
        let (v, k) = (np.v_i(), np.k_i());
        let bound = rat_int(2) + rat(2 * (k + s), v - 2 * k);
        if rat_int(t as i64) > bound {
            return Err(GeometryError::PessimisticBound { t, bound });
        }
    }
    let coeffs = line_coeffs(&p, t)?;
    let c = [
        coeffs.line_alpha.clone(),
        coeffs.line_beta.clone(),
        Rational::zero(),
        coeffs.line_gamma.clone(),
    ];
    let y = idempotent_combination(&np, t, &c)?;
    let scale = 2 * s - 1;
    let entries = assemble(g, t, &y, scale)?;
    let diag = y[0].clone() * rat_int(scale);
    let diag = diag.to_integer();
    let n = entries.rows();
    for i in 0..n {
        for j in 0..n {
            let x = entries.get(i, j);
            let ok = if i == j { *x == diag } else { x.abs() == BigInt::from(1) };
            if !ok {
                return Err(GeometryError::NotEquiangular { i, j, value: x.clone() });
            }
        }
    }
    let gram = ScaledGram {
        dim: n,
        scale: BigInt::from(scale),
        entries,
        claimed_rank: g.v() + t - 1,
    };
    let found = gram.rank();
    if found != gram.claimed_rank {
        return Err(GeometryError::RankMismatch {
            expected: gram.claimed_rank,
            found,
        });
    }
    Ok((gram, coeffs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MubGram {
    pub gram: ScaledGram,
    pub beta1: Rational,
    pub beta2: Rational,
    pub is_mub: bool,
}

impl MubGram {
    /// Positive-entry pattern of the `(fa, fb)` cross block.
    pub fn cross_signs(&self, v: usize, fa: usize, fb: usize) -> crate::exact::BitMatrix {
        crate::exact::BitMatrix::from_fn(v, v, |x, y| self.gram.get(fa * v + x, fb * v + y).is_positive())
    }
}

/// `β₁ = (v−k+s)/(vs)`, `β₂ = −(k−s)/(vs)` for the μ-heavy member, and whether
/// the system is a set of MUBs (optimistic with `|v−2k| = 2s`).
pub fn mub_profile(p: &DesignParams) -> Result<(Rational, Rational, bool), GeometryError> {
    let (np, _) = natural_params(p)?;
    let s = np.s_i().ok_or(GeometryError::IrrationalRoot(np.order()))?;
    let (v, k) = (np.v_i(), np.k_i());
    let is_mub = classify(p)?.outlook == Outlook::Optimistic && (v - 2 * k).abs() == 2 * s;
    Ok((rat(v - k + s, v * s), rat(-(k - s), v * s), is_mub))
}

/// `w(E₀ + E₁)` scaled by `vs`.
pub fn mub_gram(g: &LssdGraph) -> Result<MubGram, GeometryError> {
    let p = *g.params();
    let (np, _) = natural_params(&p)?;
    let (beta1, beta2, is_mub) = mub_profile(&p)?;
    let s = np.s_i().ok_or(GeometryError::IrrationalRoot(np.order()))?;
    let w = g.w();
    let c = [rat_int(w as i64), rat_int(w as i64), Rational::zero(), Rational::zero()];
    let y = idempotent_combination(&np, w, &c)?;
    let scale = np.v_i() * s;
    let entries = assemble(g, w, &y, scale)?;
    let v = g.v();
    if is_mub {
        // Both cross values have magnitude vs/√v = v − k + s.
        let want = BigInt::from(np.v_i() - np.k_i() + s);
        for i in 0..v * w {
            for j in 0..v * w {
                if i / v != j / v && entries.get(i, j).abs() != want {
                    return Err(GeometryError::NotEquiangular {
                        i,
                        j,
                        value: entries.get(i, j).clone(),
                    });
                }
            }
        }
    }
    let gram = ScaledGram {
        dim: v * w,
        scale: BigInt::from(scale),
        entries,
        claimed_rank: v,
    };
    Ok(MubGram {
        gram,
        beta1,
        beta2,
        is_mub,
    })
}

/// Both sides of `Σᵢ⟨aᵢ,x⟩⟨aᵢ,y⟩ = (v/(v−1))⟨x,y⟩` for the unit vectors `aᵢ`
/// obtained by normalizing the simplex.
pub fn frame_sum_check(s: &SignSimplex, x: &[Rational], y: &[Rational]) -> (Rational, Rational) {
    let v = s.len() as i64;
    let norm = rat_int(s.dim() as i64);
    let dot = |i: usize, z: &[Rational]| -> Rational { s.signs(i).iter().zip(z).map(|(&a, b)| b * rat_int(a)).sum() };
    let lhs: Rational = (0..s.len()).map(|i| dot(i, x) * dot(i, y)).sum::<Rational>() / norm;
    let xy: Rational = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (lhs, xy * rat(v, v - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2kerdock::{cameron_seidel_lssd, golden_kerdock_n4, kerdock_simplex};
    use crate::lssd::{degenerate_lssd, restrict_fibers};

    fn kerdock3() -> LssdGraph {
        restrict_fibers(&cameron_seidel_lssd(&golden_kerdock_n4()).unwrap(), &[0, 1, 2]).unwrap()
    }

    #[test]
    fn simplex_grams() {
        let g = kerdock3();
        let (gram, prof) = simplex_gram(g.params(), 3, Some(&g), GramMode::First).unwrap();
        assert_eq!(
            (gram.dim, gram.scale.clone(), gram.claimed_rank),
            (48, BigInt::from(30), 15)
        );
        assert_eq!(prof.cross_ip_positive, rat(1, 5));
        assert_eq!(prof.cross_ip_negative, rat(-1, 3));
        assert_eq!(lssd_from_gram(&gram, 16, 3).unwrap(), g);

        let (single, _) = simplex_gram(g.params(), 1, None, GramMode::First).unwrap();
        assert_eq!(single.inner_product(0, 1), rat(-1, 15));
        assert!(matches!(
            simplex_gram(g.params(), 3, None, GramMode::First),
            Err(GeometryError::MissingGraph(3))
        ));
    }

    #[test]
    fn simplex_matches_idempotent() {
        let g = kerdock3();
        let p = *g.params();
        let (gram, _) = simplex_gram(&p, 3, Some(&g), GramMode::First).unwrap();
        let c = [Rational::zero(), rat(48, 15), Rational::zero(), Rational::zero()];
        let y = idempotent_combination(&p, 3, &c).unwrap();
        assert_eq!(assemble(&g, 3, &y, 30).unwrap(), gram.entries);
    }

    #[test]
    fn degenerate_simplices_coincide() {
        let g = degenerate_lssd(4, 3).unwrap();
        let (gram, _) = simplex_gram(g.params(), 3, Some(&g), GramMode::First).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let want = if i % 4 == j % 4 { 3 } else { -1 };
                assert_eq!(*gram.get(i, j), BigInt::from(want));
            }
        }
    }

    #[test]
    fn second_pair() {
        let g = restrict_fibers(&kerdock3(), &[0, 1]).unwrap();
        let (gram, prof) = simplex_gram(g.params(), 2, Some(&g), GramMode::SecondPair).unwrap();
        assert_eq!(prof.cross_ip_positive, rat(-1, 5));
        let h = lssd_from_gram(&gram, 16, 2).unwrap();
        assert_eq!((h.params().k, h.params().lambda), (6, 2));
        assert_eq!(h, crate::lssd::multipartite_complement(&g));
        assert!(simplex_gram(kerdock3().params(), 3, Some(&kerdock3()), GramMode::SecondPair).is_err());
    }

    #[test]
    fn perturbed_gram_rejected() {
        let g = kerdock3();
        let (mut gram, _) = simplex_gram(g.params(), 3, Some(&g), GramMode::First).unwrap();
        gram.entries.set(0, 20, BigInt::from(7));
        gram.entries.set(20, 0, BigInt::from(7));
        assert!(matches!(
            lssd_from_gram(&gram, 16, 3),
            Err(GeometryError::ThreeValues { .. })
        ));
    }

    #[test]
    fn lines() {
        let g = kerdock3();
        let (gram, c) = equiangular_gram(&g, 3).unwrap();
        assert_eq!((gram.dim, gram.claimed_rank), (48, 18));
        assert_eq!(
            (c.line_alpha.clone(), c.line_beta.clone(), c.line_gamma.clone()),
            (rat(28, 3), rat(4, 1), rat(16, 3))
        );
        assert_eq!((c.c.clone(), c.cosine.clone()), (rat(1, 3), rat(1, 5)));
        let (one, _) = equiangular_gram(&g, 1).unwrap();
        assert_eq!(one.claimed_rank, 16);
        assert!(matches!(equiangular_gram(&g, 4), Err(GeometryError::LineCount { .. })));
    }

    #[test]
    fn mubs() {
        let g = kerdock3();
        let m = mub_gram(&g).unwrap();
        assert!(m.is_mub);
        assert_eq!((m.beta1.clone(), m.beta2.clone()), (rat(1, 4), rat(-1, 4)));
        assert_eq!(m.cross_signs(16, 0, 1), *g.stored_block(0, 1));
        let d = degenerate_lssd(4, 3).unwrap();
        assert!(!mub_gram(&d).unwrap().is_mub);
        let p = validate_params(36, 15, 6).unwrap();
        assert!(!mub_profile(&p).unwrap().2);
    }

    #[test]
    fn frame_identity() {
        let s = kerdock_simplex(&golden_kerdock_n4().forms[1]);
        let zero = vec![Rational::zero(); 15];
        assert_eq!(frame_sum_check(&s, &zero, &zero), (Rational::zero(), Rational::zero()));
        let a: Vec<Rational> = s.signs(0).iter().map(|&x| rat_int(x)).collect();
        let (l, r) = frame_sum_check(&s, &a, &a);
        assert_eq!(l, r);
        assert_eq!(l, rat(16 * 15, 15));
    }
}
