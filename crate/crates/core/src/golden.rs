//! Printed reference data embedded at compile time.

use crate::exact::BitMatrix;
use crate::hadamard_oa::HadamardMatrix;

pub use crate::gf2kerdock::{golden_kerdock_n4, GOLDEN_N4_BILINEAR};
pub use crate::hadamard_oa::{golden_h36, golden_h4, golden_oa16};

fn hadamard(text: &str) -> HadamardMatrix {
    HadamardMatrix::from_text(text).expect("embedded matrix parses")
}

/// The three printed order-16 matrices of the worked example.
pub fn golden_bw_h12() -> HadamardMatrix {
    hadamard(include_str!("../data/bw_h12.txt"))
}

pub fn golden_bw_h13() -> HadamardMatrix {
    hadamard(include_str!("../data/bw_h13.txt"))
}

pub fn golden_bw_h23() -> HadamardMatrix {
    hadamard(include_str!("../data/bw_h23.txt"))
}

fn bit_rows(text: &str, one: char) -> BitMatrix {
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let cols = rows.first().map_or(0, |r| r.chars().count());
    BitMatrix::from_fn(rows.len(), cols, |i, j| rows[i].chars().nth(j) == Some(one))
}

/// The printed coset `[Q₂(v)]_v + RM(1,4)`, 32 rows of length 16, in printed order.
pub fn golden_q2_coset() -> BitMatrix {
    bit_rows(include_str!("../data/q2_coset.txt"), '1')
}

/// The printed simplex `X₂`: 16 sign vectors of length 15, bit set for `+`.
pub fn golden_q2_simplex() -> BitMatrix {
    bit_rows(include_str!("../data/q2_simplex.txt"), '+')
}
