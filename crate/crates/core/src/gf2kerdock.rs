//! Quadratic forms over GF(2), Reed–Muller cosets and the linked system they
//! produce when pairwise sums of the forms have full rank.
//!
//! A point of `Z₂ⁿ` is the integer `i ∈ 0..2ⁿ` with coordinate `x_j` equal to bit
//! `j−1` of `i`. The "last" coordinate of a truth table is the point `2ⁿ−1`.

use thiserror::Error;

use crate::designs::validate_params;
use crate::exact::BitMatrix;
use crate::lssd::LssdGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KerdockError {
    #[error("n = {0} must be even and between 2 and 8")]
    BadDimension(usize),
    #[error("a family on Z_2^{n} has at most {max} forms, asked for {target}")]
    ExceedsBound { n: usize, target: usize, max: usize },
    #[error("search budget of {0} nodes exhausted before reaching the target")]
    BudgetExhausted(u64),
    #[error("forms {i} and {j} have a singular sum (rank {rank})")]
    SingularSum { i: usize, j: usize, rank: usize },
    #[error("form {index} is on Z_2^{found}, expected Z_2^{expected}")]
    MixedDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vertices {a} of fiber {fa} and {b} of fiber {fb} have unscaled inner product {dot}")]
    Integrity {
        fa: usize,
        a: usize,
        fb: usize,
        b: usize,
        dot: i64,
    },
}

/// Alternating bilinear form: symmetric with zero diagonal. Bit `j` of `rows[i]` is entry `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BilinearFormGF2 {
    pub n: usize,
    pub rows: Vec<u64>,
}

impl BilinearFormGF2 {
    /// Parses rows written as `0`/`1` strings, leftmost character = column 0.
    pub fn from_strings(rows: &[&str]) -> Self {
        let n = rows.len();
        let rows = rows
            .iter()
            .map(|r| {
                r.bytes()
                    .enumerate()
                    .filter(|&(_, c)| c == b'1')
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        Self { n, rows }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn is_alternating(&self) -> bool {
        (0..self.n).all(|i| !self.get(i, i) && (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        gf2_rank(&self.rows)
    }
}

/// Rank over GF(2) of the matrix whose rows are the given bit words.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for r in rows.iter_mut().skip(rank + 1) {
            if *r & mask != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

pub fn bilinear_rank_gf2(m: &BilinearFormGF2) -> usize {
    m.rank()
}

/// `Q(x) = Σ_{i<j} upper[i][j] x_i x_j + Σ linear[i] x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticFormGF2 {
    pub n: usize,
    /// Bit `j` of `upper[i]` (only `j > i` used).
    pub upper: Vec<u64>,
    pub linear: u64,
}

impl QuadraticFormGF2 {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            upper: vec![0; n],
            linear: 0,
        }
    }

    /// Strictly upper half of an alternating form, zero linear part.
    pub fn from_bilinear(b: &BilinearFormGF2) -> Self {
        let upper = (0..b.n).map(|i| b.rows[i] & !((1u64 << (i + 1)) - 1)).collect();
        Self {
            n: b.n,
            upper,
            linear: 0,
        }
    }

    pub fn bilinear(&self) -> BilinearFormGF2 {
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (self.upper[i] >> j) & 1 == 1 {
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
            }
        }
        BilinearFormGF2 { n: self.n, rows }
    }

    pub fn eval(&self, x: u64) -> bool {
        let quad = (0..self.n)
            .filter(|&i| (x >> i) & 1 == 1)
            .map(|i| (self.upper[i] & x).count_ones())
            .sum::<u32>();
        (quad + (self.linear & x).count_ones()) % 2 == 1
    }

    /// Characteristic vector `[Q(v)]_v` over the `2ⁿ` points.
    pub fn truth_table(&self) -> Vec<bool> {
        (0..1u64 << self.n).map(|x| self.eval(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KerdockFamily {
    pub n: usize,
    pub forms: Vec<QuadraticFormGF2>,
}

impl KerdockFamily {
    /// Checks that every pairwise sum has a full-rank bilinear form.
    pub fn validate(&self) -> Result<(), KerdockError> {
        let bil: Vec<BilinearFormGF2> = self
            .forms
            .iter()
            .enumerate()
            .map(|(index, f)| {
                if f.n == self.n {
                    Ok(f.bilinear())
                } else {
                    Err(KerdockError::MixedDimension {
                        index,
                        expected: self.n,
                        found: f.n,
                    })
                }
            })
            .collect::<Result<_, _>>()?;
        for i in 0..bil.len() {
            for j in i + 1..bil.len() {
                let rank = bil[i].add(&bil[j]).rank();
                if rank != self.n {
                    return Err(KerdockError::SingularSum { i, j, rank });
                }
            }
        }
        Ok(())
    }
}

/// The eight alternating forms printed for `n = 4`.
pub const GOLDEN_N4_BILINEAR: [[&str; 4]; 8] = [
    ["0000", "0000", "0000", "0000"],
    ["0100", "1000", "0001", "0010"],
    ["0010", "0001", "1001", "0110"],
    ["0110", "1011", "1100", "0100"],
    ["0001", "0011", "0101", "1110"],
    ["0101", "1010", "0100", "1000"],
    ["0011", "0010", "1101", "1010"],
    ["0111", "1001", "1000", "1100"],
];

pub fn golden_kerdock_n4() -> KerdockFamily {
    KerdockFamily {
        n: 4,
        forms: GOLDEN_N4_BILINEAR
            .iter()
            .map(|rows| QuadraticFormGF2::from_bilinear(&BilinearFormGF2::from_strings(rows)))
            .collect(),
    }
}

/// Enumerates alternating forms by their packed strictly-upper bits.
fn form_from_code(n: usize, mut code: u64) -> QuadraticFormGF2 {
    let mut q = QuadraticFormGF2::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            if code & 1 == 1 {
                q.upper[i] |= 1 << j;
            }
            code >>= 1;
        }
    }
    q
}

/// Deterministic backtracking search for `target_w` forms with pairwise
/// full-rank sums. `budget` caps the number of search nodes.
pub fn search_kerdock_family(n: usize, target_w: usize, budget: u64) -> Result<KerdockFamily, KerdockError> {
    if !(2..=8).contains(&n) || n % 2 == 1 {
        return Err(KerdockError::BadDimension(n));
    }
    let max = 1usize << (n - 1);
    if target_w > max {
        return Err(KerdockError::ExceedsBound {
            n,
            target: target_w,
            max,
        });
    }
    let bits = n * (n - 1) / 2;
    // With the zero form fixed first, every other member must be nonsingular.
    let candidates: Vec<(u64, BilinearFormGF2)> = (1..1u64 << bits)
        .map(|c| (c, form_from_code(n, c).bilinear()))
        .filter(|(_, b)| b.rank() == n)
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    let all: Vec<usize> = (0..candidates.len()).collect();
    let found = extend(
        &candidates,
        &all,
        &mut chosen,
        target_w.saturating_sub(1),
        &mut nodes,
        budget,
    );
    match found {
        Some(true) => {
            let mut forms = vec![QuadraticFormGF2::zero(n)];
            forms.extend(chosen.iter().map(|&i| form_from_code(n, candidates[i].0)));
            forms.truncate(target_w);
            let fam = KerdockFamily { n, forms };
            fam.validate()?;
            Ok(fam)
        }
        _ => Err(KerdockError::BudgetExhausted(budget)),
    }
}

/// `Some(true)` on success, `Some(false)` when this subtree is exhausted,
/// `None` when the budget ran out.
fn extend(
    cands: &[(u64, BilinearFormGF2)],
    live: &[usize],
    chosen: &mut Vec<usize>,
    need: usize,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    if chosen.len() == need {
        return Some(true);
    }
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    // Members must have distinct first rows, which bounds what can still be added.
    let mut first_rows: Vec<u64> = live.iter().map(|&c| cands[c].1.rows[0]).collect();
    first_rows.sort_unstable();
    first_rows.dedup();
    if chosen.len() + first_rows.len() < need {
        return Some(false);
    }
    for (pos, &c) in live.iter().enumerate() {
        let next: Vec<usize> = live[pos + 1..]
            .iter()
            .copied()
            .filter(|&d| cands[c].1.add(&cands[d].1).rank() == cands[c].1.n)
            .collect();
        chosen.push(c);
        match extend(cands, &next, chosen, need, nodes, budget) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
        chosen.pop();
    }
    Some(false)
}

/// The coset `[Q(v)]_v + RM(1,n)` as `2^{n+1}` rows of length `2ⁿ`.
/// Rows enumerate the affine functions `a·x + c` with `a` outer, `c` inner.
pub fn rm1_coset(q: &QuadraticFormGF2) -> BitMatrix {
    let n = q.n;
    let points = 1usize << n;
    let table = q.truth_table();
    let mut out = BitMatrix::zeros(2 * points, points);
    for a in 0..points as u64 {
        for c in 0..2u32 {
            let row = (a as usize) * 2 + c as usize;
            for (x, &q) in table.iter().enumerate() {
                let affine = ((a & x as u64).count_ones() + c) % 2 == 1;
                out.set(row, x, q ^ affine);
            }
        }
    }
    out
}

/// `2ⁿ` unscaled ±1 vectors of length `2ⁿ−1`; bit 1 stands for `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSimplex {
    pub vectors: BitMatrix,
}

impl SignSimplex {
    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    /// Unscaled dot product of vector `i` here and vector `j` of `other`.
    pub fn dot(&self, i: usize, other: &SignSimplex, j: usize) -> i64 {
        self.dim() as i64 - 2 * self.vectors.xor_count(i, &other.vectors, j) as i64
    }

    /// Vector `i` as `±1` integers.
    pub fn signs(&self, i: usize) -> Vec<i64> {
        (0..self.dim())
            .map(|c| if self.vectors.get(i, c) { 1 } else { -1 })
            .collect()
    }
}

/// Keeps the coset words vanishing at the last point, drops that coordinate and
/// maps `0 → −1`, `1 → +1`.
pub fn kerdock_simplex(q: &QuadraticFormGF2) -> SignSimplex {
    let coset = rm1_coset(q);
    let len = coset.cols() - 1;
    let keep: Vec<usize> = (0..coset.rows()).filter(|&r| !coset.get(r, len)).collect();
    let vectors = BitMatrix::from_fn(keep.len(), len, |i, c| coset.get(keep[i], c));
    SignSimplex { vectors }
}

/// Builds the linked system: cross-fiber vertices are adjacent iff their
/// unscaled inner product is `2^r − 1`.
pub fn cameron_seidel_lssd(fam: &KerdockFamily) -> Result<LssdGraph, KerdockError> {
    let n = fam.n;
    if n < 2 || n % 2 == 1 || n > 8 {
        return Err(KerdockError::BadDimension(n));
    }
    fam.validate()?;
    let r = (n / 2) as u32;
    let (v, k, l) = (
        1i64 << (2 * r),
        (1i64 << (r - 1)) * ((1 << r) + 1),
        (1i64 << (r - 1)) * ((1 << (r - 1)) + 1),
    );
    let params = validate_params(v, k, l).expect("Kerdock parameters form a design");
    let near = (1i64 << r) - 1;
    let far = -((1i64 << r) + 1);
    let simplices: Vec<SignSimplex> = fam.forms.iter().map(kerdock_simplex).collect();
    let vs = v as usize;
    let mut blocks = Vec::new();
    for fa in 0..simplices.len() {
        for fb in fa + 1..simplices.len() {
            let mut b = BitMatrix::zeros(vs, vs);
            for a in 0..vs {
                for c in 0..vs {
                    let dot = simplices[fa].dot(a, &simplices[fb], c);
                    if dot == near {
                        b.set(a, c, true);
                    } else if dot != far {
                        return Err(KerdockError::Integrity { fa, a, fb, b: c, dot });
                    }
                }
            }
            blocks.push(b);
        }
    }
    LssdGraph::new(params, simplices.len(), blocks).map_err(|_| KerdockError::BadDimension(n))
}

/// Kerdock-system parameters `(2^{2r}, 2^{r−1}(2^r+1), 2^{r−1}(2^{r−1}+1))`.
pub fn kerdock_params(r: u32) -> (u64, u64, u64) {
    (
        1 << (2 * r),
        (1 << (r - 1)) * ((1 << r) + 1),
        (1 << (r - 1)) * ((1 << (r - 1)) + 1),
    )
}
