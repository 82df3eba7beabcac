//! Hadamard matrices, orthogonal arrays, the Beth–Wocjan construction, and the
//! correspondence between Menon-parameter linked systems and unbiased regular
//! Hadamard matrices.

use num_bigint::BigInt;
use thiserror::Error;

use crate::designs::{validate_params, DesignParams};
use crate::exact::{exact_sqrt, BitMatrix, IntMatrix};
use crate::lssd::{classify, verify_lssd, Heaviness, LssdGraph, LssdReport, Outlook, Witness};

pub mod field;
pub mod oa;

pub use field::FiniteField;
pub use oa::{golden_oa16, macneish_product, mols_oa, OaError, OrthogonalArray};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HadamardError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({i}, {j}) is {value}, expected +1 or -1")]
    NotSign { i: usize, j: usize, value: String },
    #[error("rows {i} and {j} are not orthogonal")]
    NotHadamard { i: usize, j: usize },
    #[error("order {0} is not a perfect square, so no unbiased pair exists")]
    OrderNotSquare(usize),
    #[error("orders {0} and {1} differ")]
    OrderMismatch(usize, usize),
    #[error("matrix {index} is not regular")]
    NotRegular { index: usize },
    #[error("matrices {i} and {j} are not unbiased")]
    Biased { i: usize, j: usize },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("no built-in irreducible polynomial for GF({0})")]
    UnsupportedField(u32),
    #[error(transparent)]
    Oa(#[from] OaError),
    #[error("Hadamard order {hadamard} does not match {symbols} array symbols")]
    SymbolMismatch { hadamard: usize, symbols: usize },
    #[error("array needs at least 2 columns, has {0}")]
    TooFewColumns(usize),
    #[error("the set is empty")]
    Empty,
    #[error("row sum {row_sum} does not give Menon parameters")]
    NotMenon { row_sum: i64 },
    #[error("parameters {0} are not in the optimistic |v - 2k| = 2s regime")]
    NotMenonRegime(DesignParams),
    #[error("assembled graph fails verification: {0:?}")]
    Inconsistent(Box<Witness>),
    #[error("block ({i}, {j}) disagrees with the sign pattern of the Hadamard product")]
    BlockMismatch { i: usize, j: usize },
    #[error("{0}")]
    Parse(String),
}

/// A `±1` square matrix stored as bits, `true` for `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HadamardMatrix {
    bits: BitMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HadamardProps {
    pub is_hadamard: bool,
    pub is_regular: bool,
    /// The common row and column sum when regular.
    pub row_sum: Option<i64>,
}

impl HadamardMatrix {
    /// Wraps a sign pattern; the Hadamard property is not checked here.
    pub fn from_bits(bits: BitMatrix) -> Result<Self, HadamardError> {
        if bits.rows() != bits.cols() {
            return Err(HadamardError::NotSquare {
                rows: bits.rows(),
                cols: bits.cols(),
            });
        }
        Ok(Self { bits })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> bool) -> Self {
        Self {
            bits: BitMatrix::from_fn(n, n, f),
        }
    }

    pub fn from_int(m: &IntMatrix) -> Result<Self, HadamardError> {
        if !m.is_square() {
            return Err(HadamardError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let (one, minus) = (BigInt::from(1), BigInt::from(-1));
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x = m.get(i, j);
                if *x != one && *x != minus {
                    return Err(HadamardError::NotSign {
                        i,
                        j,
                        value: x.to_string(),
                    });
                }
            }
        }
        Ok(Self::from_fn(m.rows(), |i, j| *m.get(i, j) == one))
    }

    pub fn order(&self) -> usize {
        self.bits.rows()
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        if self.bits.get(i, j) {
            1
        } else {
            -1
        }
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::from_fn(self.order(), self.order(), |i, j| BigInt::from(self.entry(i, j)))
    }

    pub fn negate(&self) -> Self {
        Self {
            bits: self.bits.complement(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            bits: self.bits.transpose(),
        }
    }

    /// Sign-level Kronecker product.
    pub fn kronecker(&self, other: &Self) -> Self {
        let m = other.order();
        Self::from_fn(self.order() * m, |i, j| {
            self.bits.get(i / m, j / m) == other.bits.get(i % m, j % m)
        })
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        2 * self.bits.row_weight(i) as i64 - self.order() as i64
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.order()).map(|i| self.row_sum(i)).collect()
    }

    pub fn col_sums(&self) -> Vec<i64> {
        self.transpose().row_sums()
    }

    /// First pair of non-orthogonal rows.
    pub fn first_defect(&self) -> Option<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| 2 * self.bits.xor_count(i, &self.bits, j) as usize != n)
    }

    pub fn props(&self) -> HadamardProps {
        let is_hadamard = self.first_defect().is_none();
        let rows = self.row_sums();
        let cols = self.col_sums();
        let c = rows[0];
        let constant = rows.iter().chain(&cols).all(|&x| x == c);
        let is_regular = is_hadamard && constant && c * c == self.order() as i64;
        HadamardProps {
            is_hadamard,
            is_regular,
            row_sum: is_regular.then_some(c),
        }
    }

    /// Text form: the order, then one row of `+`/`-` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order());
        for i in 0..self.order() {
            out.extend((0..self.order()).map(|j| if self.bits.get(i, j) { '+' } else { '-' }));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, HadamardError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| HadamardError::Parse("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| HadamardError::Parse(format!("bad order line {header:?}")))?;
        let rows: Vec<&str> = lines.collect();
        if rows.len() != n {
            return Err(HadamardError::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        let mut bits = BitMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != n {
                return Err(HadamardError::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.chars().count()
                )));
            }
            for (j, c) in row.chars().enumerate() {
                match c {
                    '+' => bits.set(i, j, true),
                    '-' => {}
                    other => {
                        return Err(HadamardError::Parse(format!(
                            "row {}, column {}: unexpected {other:?}",
                            i + 1,
                            j + 1
                        )))
                    }
                }
            }
        }
        Ok(Self { bits })
    }
}

/// Exact checks on an integer matrix.
pub fn hadamard_props(h: &IntMatrix) -> Result<HadamardProps, HadamardError> {
    Ok(HadamardMatrix::from_int(h)?.props())
}

/// `S` with `H₁ᵀH₂ = √n · S` (bit set for `+√n`), or `None` when some entry has another value.
pub fn unbiased_sign_pattern(h1: &HadamardMatrix, h2: &HadamardMatrix) -> Option<BitMatrix> {
    let n = h1.order();
    if h2.order() != n {
        return None;
    }
    let root = exact_sqrt(n as u64)? as i64;
    let (t1, t2) = (h1.bits.transpose(), h2.bits.transpose());
    let mut out = BitMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            match n as i64 - 2 * t1.xor_count(a, &t2, b) as i64 {
                x if x == root => out.set(a, b, true),
                x if x == -root => {}
                _ => return None,
            }
        }
    }
    Some(out)
}

/// Unbiased when every entry of `H₁ᵀH₂` is `±√n`, so the column bases are unbiased.
pub fn unbiased(h1: &HadamardMatrix, h2: &HadamardMatrix) -> bool {
    unbiased_sign_pattern(h1, h2).is_some()
}

/// `[[1,1],[1,−1]]^{⊗e}`.
pub fn sylvester(e: u32) -> HadamardMatrix {
    let h2 = HadamardMatrix::from_fn(2, |i, j| i == 0 || j == 0);
    (0..e).fold(HadamardMatrix::from_fn(1, |_, _| true), |acc, _| acc.kronecker(&h2))
}

/// `J − 2I` of order 4.
pub fn golden_h4() -> HadamardMatrix {
    HadamardMatrix::from_fn(4, |i, j| i != j)
}

pub fn golden_h36() -> HadamardMatrix {
    HadamardMatrix::from_text(include_str!("../data/h36.txt")).expect("embedded order-36 matrix")
}

/// Regular pairwise-unbiased Hadamard matrices of a common square order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnbiasedHadamardSet {
    order: usize,
    matrices: Vec<HadamardMatrix>,
    regular: bool,
}

impl UnbiasedHadamardSet {
    /// Checks the Hadamard property, pairwise unbiasedness and (recorded, not
    /// required) regularity.
    pub fn new(matrices: Vec<HadamardMatrix>) -> Result<Self, HadamardError> {
        let order = matrices.first().ok_or(HadamardError::Empty)?.order();
        if exact_sqrt(order as u64).is_none() {
            return Err(HadamardError::OrderNotSquare(order));
        }
        let mut regular = true;
        for h in &matrices {
            if h.order() != order {
                return Err(HadamardError::OrderMismatch(order, h.order()));
            }
            if let Some((i, j)) = h.first_defect() {
                return Err(HadamardError::NotHadamard { i, j });
            }
            regular &= h.props().is_regular;
        }
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                if !unbiased(&matrices[i], &matrices[j]) {
                    return Err(HadamardError::Biased { i, j });
                }
            }
        }
        Ok(Self {
            order,
            matrices,
            regular,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrices(&self) -> &[HadamardMatrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }
}

/// Inner products `⟨M^{c1,j,l}, M^{c2,j′,l′}⟩` between the Beth–Wocjan bases of
/// columns `c1` and `c2`. Basis vectors are ordered by `(j, l)` with `j` outer.
///
/// The array must already satisfy the pair property.
pub fn beth_wocjan_matrix(o: &OrthogonalArray, h: &HadamardMatrix, c1: usize, c2: usize) -> HadamardMatrix {
    let n = o.n() as usize;
    // Occurrence rank of each row within its symbol class, scanning from the top.
    let rank_in = |c: usize| -> Vec<usize> {
        let mut seen = vec![0usize; n];
        o.rows()
            .iter()
            .map(|row| {
                let s = row[c] as usize - 1;
                seen[s] += 1;
                seen[s] - 1
            })
            .collect()
    };
    let (rank1, rank2) = (rank_in(c1), rank_in(c2));
    let rows = o.pair_rows(c1, c2);
    HadamardMatrix::from_fn(n * n, |x, y| {
        let (j, l) = (x / n, x % n);
        let (j2, l2) = (y / n, y % n);
        let k = rows[j * n + j2];
        h.bits.get(rank1[k], l) == h.bits.get(rank2[k], l2)
    })
}

#[derive(Debug, Clone)]
pub struct BethWocjanOutput {
    /// `H_{1,i}` for `i = 2..cols`.
    pub set: UnbiasedHadamardSet,
    /// Row sum promised by the construction, `(row sum of H)²`, when `H` is regular.
    pub expected_row_sum: Option<i64>,
}

/// Bases from every array column; returns the matrices relating the first basis
/// to each of the others.
pub fn beth_wocjan_unbiased_set(o: &OrthogonalArray, h: &HadamardMatrix) -> Result<BethWocjanOutput, HadamardError> {
    if h.order() != o.n() as usize {
        return Err(HadamardError::SymbolMismatch {
            hadamard: h.order(),
            symbols: o.n() as usize,
        });
    }
    if o.cols() < 2 {
        return Err(HadamardError::TooFewColumns(o.cols()));
    }
    o.check()?;
    if let Some((i, j)) = h.first_defect() {
        return Err(HadamardError::NotHadamard { i, j });
    }
    let matrices: Vec<HadamardMatrix> = (1..o.cols()).map(|c| beth_wocjan_matrix(o, h, 0, c)).collect();
    let expected_row_sum = h.props().row_sum.map(|c| c * c);
    let set = UnbiasedHadamardSet::new(matrices)?;
    if let Some(want) = expected_row_sum {
        if let Some(index) = set.matrices.iter().position(|m| m.props().row_sum != Some(want)) {
            return Err(HadamardError::NotRegular { index });
        }
    }
    Ok(BethWocjanOutput { set, expected_row_sum })
}

/// Menon parameters `(4u², 2u²+u, u²+u)` from a positive row sum `2u`.
fn menon_from_row_sum(order: usize, c: i64) -> Result<DesignParams, HadamardError> {
    let v = order as i64;
    if c <= 0 || c % 2 != 0 || c * c != v {
        return Err(HadamardError::NotMenon { row_sum: c });
    }
    let u = c / 2;
    validate_params(v, 2 * u * u + u, u * u + u).map_err(|_| HadamardError::NotMenon { row_sum: c })
}

/// Fiber 0 is the identity basis; block `(0, i)` marks the `+1` entries of `Hᵢ`
/// and block `(i, j)` the `+1` entries of `HᵢᵀHⱼ/√v`.
pub fn lssd_from_unbiased_hadamards(s: &UnbiasedHadamardSet) -> Result<LssdGraph, HadamardError> {
    let mats: Vec<HadamardMatrix> = s
        .matrices
        .iter()
        .enumerate()
        .map(|(index, h)| {
            let h = if h.row_sum(0) < 0 { h.negate() } else { h.clone() };
            match h.props().row_sum {
                Some(_) => Ok(h),
                None => Err(HadamardError::NotRegular { index }),
            }
        })
        .collect::<Result<_, _>>()?;
    let params = menon_from_row_sum(s.order, mats[0].row_sum(0))?;
    let w = mats.len() + 1;
    let mut blocks = Vec::with_capacity(w * (w - 1) / 2);
    for i in 0..w {
        for j in i + 1..w {
            let b = if i == 0 {
                mats[j - 1].bits.clone()
            } else {
                unbiased_sign_pattern(&mats[i - 1], &mats[j - 1]).ok_or(HadamardError::Biased { i: i - 1, j: j - 1 })?
            };
            blocks.push(b);
        }
    }
    let g = LssdGraph::new(params, w, blocks).map_err(|e| HadamardError::Parse(e.to_string()))?;
    check_report(verify_lssd(&g))?;
    Ok(g)
}

fn check_report(report: LssdReport) -> Result<(), HadamardError> {
    match report.failures.into_iter().next() {
        None => Ok(()),
        Some((_, witness)) => Err(HadamardError::Inconsistent(Box::new(witness))),
    }
}

/// One Hadamard per fiber `i ≥ 1`: `+1` where fiber-0 vertex `a` and fiber-`i`
/// vertex `b` are joined in the μ-heavy relation.
pub fn hadamards_from_lssd(g: &LssdGraph) -> Result<UnbiasedHadamardSet, HadamardError> {
    let p = *g.params();
    let class = classify(&p).map_err(|_| HadamardError::NotMenonRegime(p))?;
    let s = p.s_i().ok_or(HadamardError::NotMenonRegime(p))?;
    if class.outlook != Outlook::Optimistic || (p.v_i() - 2 * p.k_i()).abs() != 2 * s {
        return Err(HadamardError::NotMenonRegime(p));
    }
    let mu_heavy = class.heaviness == Heaviness::MuHeavy;
    let oriented = |i: usize, j: usize| -> BitMatrix {
        let b = g.block(i, j).into_owned();
        if mu_heavy {
            b
        } else {
            b.complement()
        }
    };
    let mats: Vec<HadamardMatrix> = (1..g.w()).map(|i| HadamardMatrix { bits: oriented(0, i) }).collect();
    let set = UnbiasedHadamardSet::new(mats)?;
    if let Some(index) = set.matrices.iter().position(|m| m.props().row_sum != Some(2 * s)) {
        return Err(HadamardError::NotRegular { index });
    }
    for i in 1..g.w() {
        for j in i + 1..g.w() {
            let pattern = unbiased_sign_pattern(&set.matrices[i - 1], &set.matrices[j - 1]);
            if pattern.as_ref() != Some(&oriented(i, j)) {
                return Err(HadamardError::BlockMismatch { i, j });
            }
        }
    }
    Ok(set)
}

/// Brings a set to a canonical form: every matrix with positive row sums.
pub fn normalize_signs(set: &UnbiasedHadamardSet) -> Vec<HadamardMatrix> {
    set.matrices
        .iter()
        .map(|h| if h.row_sum(0) < 0 { h.negate() } else { h.clone() })
        .collect()
}

/// Largest entry magnitude of `H₁ᵀH₂`, for reporting.
pub fn max_inner_product(h1: &HadamardMatrix, h2: &HadamardMatrix) -> i64 {
    let (t1, t2) = (h1.bits.transpose(), h2.bits.transpose());
    let n = h1.order();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| (n as i64 - 2 * t1.xor_count(a, &t2, b) as i64).abs())
        .max()
        .unwrap_or(0)
}
