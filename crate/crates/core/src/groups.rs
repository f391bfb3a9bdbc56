//! Finite matrix groups over prime fields.
//!
//! Residues are always stored reduced into `[0, t)`. The three matrix types
//! are kept separate on purpose: [`MatrixSl2`] is a determinant-1 matrix mod
//! an odd prime, [`PglMatrix`] is a projective class (first nonzero entry
//! scaled to 1, any nonzero determinant), and [`IntegerMatrix`] lives over
//! the integers and only enters mod-t land through [`IntegerMatrix::reduce_mod`].

mod counting;
mod generators;
mod projective;
mod quaternion;

pub use counting::{congruence_lattice_count, quad_form_representations};
pub use generators::{preset_generators, random_generator_set, GeneratorSet, GroupElement};
pub use projective::{
    mobius_act, mobius_act_entries, projective_fixed_points, projective_fixed_points_entries,
    projective_line, ProjectivePoint,
};
pub use quaternion::{lps_generator_set, quaternion_norm_solutions};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An odd prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    /// Wraps `t` after a deterministic Miller–Rabin primality check
    /// (the 12-witness set is exact for all 64-bit inputs). Requires `t` odd
    /// and `> 2`.
    pub fn new(t: u64) -> Result<Self> {
        if t > 2 && t % 2 == 1 && is_prime_u64(t) {
            Ok(PrimeModulus(t))
        } else {
            Err(Error::NotOddPrime(t))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// Reduces an arbitrary integer into `[0, t)`.
    pub fn reduce_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }

    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    pub fn add(self, x: u64, y: u64) -> u64 {
        let s = x + y; // residues < 2^63, no overflow
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    pub fn sub(self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.0 - y
        }
    }

    pub fn neg(self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.0 - x
        }
    }

    pub fn mul(self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.0 as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; `x` must be nonzero mod t.
    pub fn inv(self, x: u64) -> Result<u64> {
        let x = self.reduce(x);
        if x == 0 {
            return Err(Error::Singular(self.0));
        }
        Ok(self.pow(x, self.0 - 2))
    }

    /// Euler criterion: is `x` a nonzero quadratic residue?
    pub fn is_square(self, x: u64) -> bool {
        let x = self.reduce(x);
        x != 0 && self.pow(x, (self.0 - 1) / 2) == 1
    }

    /// Smallest square root of -1 mod t, if one exists (t = 1 mod 4).
    pub fn sqrt_minus_one(self) -> Result<u64> {
        if self.0 % 4 != 1 {
            return Err(Error::NoSquareRoot(self.0));
        }
        // For a non-residue a, a^((t-1)/4) squares to -1. Scan for the first
        // non-residue (tiny expected scan), then take the smaller of the pair.
        for a in 2..self.0 {
            if !self.is_square(a) {
                let r = self.pow(a, (self.0 - 1) / 4);
                return Ok(r.min(self.neg(r)));
            }
        }
        unreachable!("every prime > 2 has a non-residue")
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let modpow = |base: u64, mut e: u64| -> u64 {
        let n = n as u128;
        let mut acc = 1u128;
        let mut b = base as u128 % n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % n;
            }
            b = b * b % n;
            e >>= 1;
        }
        acc as u64
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of `SL2(F_t)`: entries reduced mod t, determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixSl2 {
    m: PrimeModulus,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl MatrixSl2 {
    /// Builds from residues (reduced here), rejecting determinant != 1.
    pub fn new(m: PrimeModulus, a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        let (a, b, c, d) = (m.reduce(a), m.reduce(b), m.reduce(c), m.reduce(d));
        let det = m.sub(m.mul(a, d), m.mul(b, c));
        if det != 1 {
            return Err(Error::NotSl2 { det, t: m.get() });
        }
        Ok(MatrixSl2 { m, a, b, c, d })
    }

    /// Builds from signed integers, reducing mod t first.
    pub fn from_i64(m: PrimeModulus, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(m, m.reduce_i64(a), m.reduce_i64(b), m.reduce_i64(c), m.reduce_i64(d))
    }

    pub fn identity(m: PrimeModulus) -> Self {
        MatrixSl2 { m, a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.m
    }

    /// Matrix product; the moduli must agree.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.m {
            return Err(Error::ModulusMismatch(self.m.get(), rhs.m.get()));
        }
        let m = self.m;
        Ok(MatrixSl2 {
            m,
            a: m.add(m.mul(self.a, rhs.a), m.mul(self.b, rhs.c)),
            b: m.add(m.mul(self.a, rhs.b), m.mul(self.b, rhs.d)),
            c: m.add(m.mul(self.c, rhs.a), m.mul(self.d, rhs.c)),
            d: m.add(m.mul(self.c, rhs.b), m.mul(self.d, rhs.d)),
        })
    }

    /// Inverse: for determinant 1 this is the adjugate (d, -b; -c, a).
    pub fn inv(&self) -> Self {
        let m = self.m;
        MatrixSl2 { m, a: self.d, b: m.neg(self.b), c: m.neg(self.c), d: self.a }
    }

    pub fn trace(&self) -> u64 {
        self.m.add(self.a, self.d)
    }

    pub fn is_identity(&self) -> bool {
        (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)
    }

    /// Is this I or -I, i.e. trivial on the projective line?
    pub fn is_central(&self) -> bool {
        let m = self.m;
        self.is_identity()
            || (self.a == m.get() - 1 && self.b == 0 && self.c == 0 && self.d == m.get() - 1)
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// All of `SL2(F_t)` in lexicographic (a,b,c,d) order.
///
/// For a != 0 the last entry is forced, d = (1+bc)/a; for a = 0 we need
/// bc = -1, which pins c = -1/b and leaves d free. Total t(t^2-1).
pub fn sl2_elements(m: PrimeModulus) -> Vec<MatrixSl2> {
    let t = m.get();
    let mut out = Vec::with_capacity((t * (t * t - 1)) as usize);
    // a = 0 block first (lexicographically smallest).
    for b in 1..t {
        let c = m.neg(m.inv(b).expect("b nonzero"));
        for d in 0..t {
            out.push(MatrixSl2 { m, a: 0, b, c, d });
        }
    }
    for a in 1..t {
        let ainv = m.inv(a).expect("a nonzero");
        for b in 0..t {
            for c in 0..t {
                let d = m.mul(ainv, m.add(1, m.mul(b, c)));
                out.push(MatrixSl2 { m, a, b, c, d });
            }
        }
    }
    // The a = 0 block is already sorted (b ascending, single c, d ascending)
    // and every a >= 1 block likewise, so the whole list is lexicographic.
    out
}

/// A projective class in `PGL2(F_t)`: the representative is scaled so its
/// first nonzero entry (in a,b,c,d order) equals 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PglMatrix {
    m: PrimeModulus,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl PglMatrix {
    pub fn new(m: PrimeModulus, a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        let (a, b, c, d) = (m.reduce(a), m.reduce(b), m.reduce(c), m.reduce(d));
        let det = m.sub(m.mul(a, d), m.mul(b, c));
        if det == 0 {
            return Err(Error::Singular(m.get()));
        }
        Ok(Self::canonical(m, a, b, c, d))
    }

    fn canonical(m: PrimeModulus, a: u64, b: u64, c: u64, d: u64) -> Self {
        let lead = [a, b, c, d].into_iter().find(|&x| x != 0).expect("nonzero matrix");
        let s = m.inv(lead).expect("lead nonzero");
        PglMatrix { m, a: m.mul(s, a), b: m.mul(s, b), c: m.mul(s, c), d: m.mul(s, d) }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.m
    }

    pub fn det(&self) -> u64 {
        self.m.sub(self.m.mul(self.a, self.d), self.m.mul(self.b, self.c))
    }

    /// Does the class contain an SL2 matrix? Scaling by s multiplies the
    /// determinant by s^2, so the class meets SL2 iff det is a square.
    pub fn is_in_psl(&self) -> bool {
        self.m.is_square(self.det())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.m {
            return Err(Error::ModulusMismatch(self.m.get(), rhs.m.get()));
        }
        let m = self.m;
        Ok(Self::canonical(
            m,
            m.add(m.mul(self.a, rhs.a), m.mul(self.b, rhs.c)),
            m.add(m.mul(self.a, rhs.b), m.mul(self.b, rhs.d)),
            m.add(m.mul(self.c, rhs.a), m.mul(self.d, rhs.c)),
            m.add(m.mul(self.c, rhs.b), m.mul(self.d, rhs.d)),
        ))
    }

    /// Projective inverse = adjugate (the 1/det scale is a scalar).
    pub fn inv(&self) -> Self {
        let m = self.m;
        Self::canonical(m, self.d, m.neg(self.b), m.neg(self.c), self.a)
    }

    pub fn is_identity(&self) -> bool {
        (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl From<MatrixSl2> for PglMatrix {
    fn from(g: MatrixSl2) -> Self {
        PglMatrix::canonical(g.m, g.a, g.b, g.c, g.d)
    }
}

/// All of `PGL2(F_t)` in lexicographic order of the canonical tuple.
/// Size t(t+1)(t-1).
pub fn pgl2_elements(m: PrimeModulus) -> Vec<PglMatrix> {
    let t = m.get();
    let mut out = Vec::with_capacity((t * (t * t - 1)) as usize);
    // Canonical tuples come in two shapes: (0,1,c,d) with c != 0 (det = -c),
    // and (1,b,c,d) with d != bc. The loops below emit them in lexicographic
    // order directly.
    for c in 1..t {
        for d in 0..t {
            out.push(PglMatrix { m, a: 0, b: 1, c, d });
        }
    }
    for b in 0..t {
        for c in 0..t {
            for d in 0..t {
                if d != m.mul(b, c) {
                    out.push(PglMatrix { m, a: 1, b, c, d });
                }
            }
        }
    }
    out
}

/// The PSL2 subset of [`pgl2_elements`], same relative order.
/// Size t(t+1)(t-1)/2.
pub fn psl2_elements(m: PrimeModulus) -> Vec<PglMatrix> {
    pgl2_elements(m).into_iter().filter(|g| g.is_in_psl()).collect()
}

/// A 2x2 integer matrix (no modulus), used for lattice-point counting and
/// operator norms before reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntegerMatrix { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Reduction into `SL2(F_t)`; the determinant must be 1 over the
    /// integers (not merely mod t).
    pub fn reduce_mod(&self, m: PrimeModulus) -> Result<MatrixSl2> {
        if self.det() != 1 {
            return Err(Error::NotUnimodular(self.det()));
        }
        MatrixSl2::from_i64(m, self.a, self.b, self.c, self.d)
    }

    /// Operator norm on Euclidean R^2: the largest singular value,
    /// sqrt of the top eigenvalue of M^T M, computed in closed form.
    pub fn operator_norm(&self) -> f64 {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let trace = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (trace * trace - 4.0 * det * det).max(0.0);
        (0.5 * (trace + disc.sqrt())).sqrt()
    }

    pub fn max_entry_abs(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}
