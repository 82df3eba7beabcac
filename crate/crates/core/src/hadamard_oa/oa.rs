//! Strength-2 orthogonal arrays with symbols `1..=n`.

use super::field::FiniteField;
use super::HadamardError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OaError {
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("symbol {symbol} at row {row}, column {col} is outside 1..={n}")]
    Symbol {
        row: usize,
        col: usize,
        symbol: u32,
        n: u32,
    },
    #[error("columns {c1} and {c2} repeat the pair ({a}, {b})")]
    RepeatedPair { c1: usize, c2: usize, a: u32, b: u32 },
    #[error("{0}")]
    Parse(String),
}

/// `n² × cols` array; rows stored in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    n: u32,
    cols: usize,
    rows: Vec<Vec<u32>>,
}

impl OrthogonalArray {
    /// Checks shape and symbol range, not the pair property (see [`Self::check`]).
    pub fn new(n: u32, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self, OaError> {
        let expected = (n as usize).pow(2);
        if rows.len() != expected {
            return Err(OaError::RowCount {
                expected,
                found: rows.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(OaError::Ragged {
                    row: r,
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some((c, &symbol)) = row.iter().enumerate().find(|(_, &x)| x == 0 || x > n) {
                return Err(OaError::Symbol {
                    row: r,
                    col: c,
                    symbol,
                    n,
                });
            }
        }
        Ok(Self { n, cols, rows })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.rows[row][col]
    }

    /// Exhaustive check that every column pair meets each ordered symbol pair once.
    pub fn check(&self) -> Result<(), OaError> {
        let n = self.n as usize;
        let mut seen = vec![false; n * n];
        for c1 in 0..self.cols {
            for c2 in c1 + 1..self.cols {
                seen.iter_mut().for_each(|s| *s = false);
                for row in &self.rows {
                    let (a, b) = (row[c1], row[c2]);
                    let slot = &mut seen[(a as usize - 1) * n + (b as usize - 1)];
                    if *slot {
                        return Err(OaError::RepeatedPair { c1, c2, a, b });
                    }
                    *slot = true;
                }
            }
        }
        Ok(())
    }

    /// Keeps the listed columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            n: self.n,
            cols: cols.len(),
            rows: self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
        }
    }

    /// Row `k` with `O[k][c1] = a` and `O[k][c2] = b`, indexed by `(a−1)·n + (b−1)`.
    pub(crate) fn pair_rows(&self, c1: usize, c2: usize) -> Vec<usize> {
        let n = self.n as usize;
        let mut out = vec![usize::MAX; n * n];
        for (k, row) in self.rows.iter().enumerate() {
            out[(row[c1] as usize - 1) * n + (row[c2] as usize - 1)] = k;
        }
        out
    }

    /// Text form: `n cols`, then one row per line of space-separated symbols.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.cols);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`Self::to_text`] output; the pair property is left to [`Self::check`].
    pub fn from_text(text: &str) -> Result<Self, OaError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| OaError::Parse("empty input".into()))?;
        let nums: Vec<u64> = header.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        let [n, cols] = nums[..] else {
            return Err(OaError::Parse(format!("bad header {header:?}, expected `n cols`")));
        };
        let n = u32::try_from(n).map_err(|_| OaError::Parse(format!("symbol count {n} too large")))?;
        let rows = lines
            .enumerate()
            .map(|(r, line)| {
                line.split_whitespace()
                    .map(|t| {
                        t.parse::<u32>()
                            .map_err(|_| OaError::Parse(format!("row {}: bad symbol {t:?}", r + 1)))
                    })
                    .collect::<Result<Vec<u32>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, cols as usize, rows)
    }
}

/// The array from the `q − 1` squares `L_a(x, y) = a·x + y` over GF(q): rows are
/// `(x, y)` with `x` outer, columns `x`, `y`, then one per nonzero `a`.
pub fn mols_oa(q: u32) -> Result<OrthogonalArray, HadamardError> {
    let f = FiniteField::new(q)?;
    let mut rows = Vec::with_capacity((q * q) as usize);
    for x in 0..q {
        for y in 0..q {
            let mut row = vec![x + 1, y + 1];
            row.extend((1..q).map(|a| f.add(f.mul(a, x), y) + 1));
            rows.push(row);
        }
    }
    Ok(OrthogonalArray::new(q, q as usize + 1, rows)?)
}

/// Product array on `n₁n₂` symbols with `min(cols)` columns. Rows pair `(r₁, r₂)`
/// with `r₁` outer; symbols `(a, b)` encode as `(a−1)·n₂ + b`.
pub fn macneish_product(o1: &OrthogonalArray, o2: &OrthogonalArray) -> OrthogonalArray {
    let cols = o1.cols.min(o2.cols);
    let mut rows = Vec::with_capacity(o1.rows.len() * o2.rows.len());
    for r1 in &o1.rows {
        for r2 in &o2.rows {
            rows.push((0..cols).map(|c| (r1[c] - 1) * o2.n + r2[c]).collect());
        }
    }
    OrthogonalArray {
        n: o1.n * o2.n,
        cols,
        rows,
    }
}

/// The printed 16-row, 3-column array: columns `x`, `y`, `(x + y) mod 4`, shifted to `1..=4`.
pub fn golden_oa16() -> OrthogonalArray {
    let rows = (0..4)
        .flat_map(|x| (0..4).map(move |y| vec![x + 1, y + 1, (x + y) % 4 + 1]))
        .collect();
    OrthogonalArray::new(4, 3, rows).expect("printed array is well formed")
}
