//! Small finite fields as explicit addition and multiplication tables.

use crate::feasibility::prime_power;

use super::HadamardError;

/// GF(q) with elements `0..q`; an element is the base-`p` digit string of its
/// polynomial coefficients, constant term least significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// Monic irreducible polynomials, coefficients from the constant term up.
fn irreducible(q: u32) -> Option<&'static [u32]> {
    Some(match q {
        4 => &[1, 1, 1],
        8 => &[1, 1, 0, 1],
        9 => &[1, 0, 1],
        16 => &[1, 1, 0, 0, 1],
        25 => &[2, 0, 1],
        27 => &[1, 2, 0, 1],
        32 => &[1, 0, 1, 0, 0, 1],
        49 => &[1, 0, 1],
        64 => &[1, 1, 0, 0, 0, 0, 1],
        _ => return None,
    })
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self, HadamardError> {
        let (p, e) = prime_power(q as u64).ok_or(HadamardError::NotPrimePower(q))?;
        let (p, e) = (p as u32, e);
        let digits = |x: u32| -> Vec<u32> {
            let mut x = x;
            (0..e)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let pack = |d: &[u32]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
        let modulus: Vec<u32> = if e == 1 {
            vec![0, 1]
        } else {
            irreducible(q).ok_or(HadamardError::UnsupportedField(q))?.to_vec()
        };
        let size = q as usize;
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = pack(&sum);
                let prod = if e == 1 {
                    vec![(a * b) % p]
                } else {
                    poly_mul_mod(&da, &db, &modulus, p)
                };
                mul[(a * q + b) as usize] = pack(&prod);
            }
        }
        let field = Self { p, e, q, add, mul };
        field.check_inverses()?;
        Ok(field)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    /// Polynomial arithmetic mod an irreducible is a commutative ring; it is a
    /// field exactly when every nonzero element is invertible.
    fn check_inverses(&self) -> Result<(), HadamardError> {
        match (1..self.q).find(|&a| (1..self.q).all(|b| self.mul(a, b) != 1)) {
            Some(_) => Err(HadamardError::UnsupportedField(self.q)),
            None => Ok(()),
        }
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c != 0 {
            for (t, &m) in modulus.iter().enumerate() {
                let idx = deg - e + t;
                prod[idx] = (prod[idx] + p * p - c * m % p) % p;
            }
        }
    }
    prod.truncate(e);
    prod
}
