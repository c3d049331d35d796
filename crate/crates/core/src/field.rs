//! Small finite fields GF(p^s) with table arithmetic.

use crate::error::ConstructionError;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest field handled; tables are `q x q`.
pub const MAX_FIELD: u64 = 1 << 10;

/// GF(p^s). Element `k` is the polynomial whose base-p digits (least
/// significant first) are its coefficients.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    s: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
}

fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    // b is monic.
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let x = &mut a[shift + i];
                *x = (*x + p - (lead * bc) % p) % p;
            }
        }
        a.pop();
    }
    a
}

/// Monic polynomials of degree `deg` in the canonical order: coefficient
/// vectors compared from the constant term up.
fn monic_polys(p: u32, deg: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(deg as u32);
    (0..total).map(move |mut k| {
        let mut coeffs = vec![0u32; deg + 1];
        // Constant term is the most significant digit.
        for i in (0..deg).rev() {
            coeffs[i] = (k % p as u64) as u32;
            k /= p as u64;
        }
        coeffs[deg] = 1;
        coeffs
    })
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for g in monic_polys(p, d) {
            if poly_rem(f.to_vec(), &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    pub fn new(p: u64, s: u32) -> Result<Self, ConstructionError> {
        if !is_prime(p) {
            return Err(ConstructionError::NotPrime(p));
        }
        if s == 0 {
            return Err(ConstructionError::Parameters("s must be positive".into()));
        }
        let q = p
            .checked_pow(s)
            .filter(|&q| q <= MAX_FIELD)
            .ok_or_else(|| ConstructionError::Parameters(format!("field {p}^{s} exceeds {MAX_FIELD} elements")))?;
        let p32 = p as u32;
        let modulus = monic_polys(p32, s as usize)
            .find(|f| is_irreducible(f, p32))
            .expect("an irreducible polynomial exists for every degree");
        let q = q as usize;
        let digits = |mut k: usize| -> Vec<u32> {
            (0..s)
                .map(|_| {
                    let d = (k % p as usize) as u32;
                    k /= p as usize;
                    d
                })
                .collect()
        };
        let encode = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p32 + d) };
        let elems: Vec<Vec<u32>> = (0..q).map(digits).collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for x in 0..q {
            for y in 0..q {
                let sum: Vec<u32> = elems[x].iter().zip(&elems[y]).map(|(a, b)| (a + b) % p32).collect();
                add[x * q + y] = encode(&sum);
                let mut prod = vec![0u32; 2 * s as usize - 1];
                for (i, &a) in elems[x].iter().enumerate() {
                    for (j, &b) in elems[y].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p32;
                    }
                }
                let mut r = poly_rem(prod, &modulus, p32);
                r.resize(s as usize, 0);
                mul[x * q + y] = encode(&r);
            }
        }
        Ok(FiniteField {
            p: p32,
            s,
            q,
            modulus,
            add,
            mul,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    /// Coefficients of the modulus, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.q + y as usize]
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.q + y as usize]
    }

    pub fn neg(&self, x: u32) -> u32 {
        (0..self.q as u32).find(|&y| self.add(x, y) == 0).unwrap()
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        (1..self.q as u32).find(|&y| self.mul(x, y) == 1)
    }
}
