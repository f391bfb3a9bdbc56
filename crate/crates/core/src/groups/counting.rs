//! Integer lattice counts behind the density arguments: matrices of the
//! principal congruence lattice in a sup-norm ball, and representation
//! numbers of the rank-4 quadratic form x0^2 + 4t^2 (x1^2 + x2^2 + x3^2).

use super::PrimeModulus;
use crate::error::{Error, Result};

/// Number of integer matrices (a,b;c,d) with determinant 1, congruent to the
/// identity mod t, and all entries bounded by `bound` in absolute value.
///
/// The enumeration follows the structure of the congruence conditions
/// instead of scanning all (2T+1)^4 tuples: diagonal entries run over
/// 1 + tZ, the pair must satisfy a + d = 2 mod t^2 (else ad - 1 cannot be
/// divisible by t^2 while bc is), and for each diagonal the off-diagonal
/// pairs are read off from the divisors of (ad - 1)/t^2.
pub fn congruence_lattice_count(t: u64, bound: i64, budget: i64) -> Result<u64> {
    let _ = PrimeModulus::new(t)?;
    if bound < 0 {
        return Ok(0);
    }
    if bound > budget {
        return Err(Error::BudgetExceeded { need: bound as u128, budget: budget as u128 });
    }
    let t = t as i64;
    let t2 = t * t;
    let mut total = 0u64;
    // Steps i with |1 + t i| <= bound.
    let is: Vec<i64> =
        (-(bound + 1) / t..=(bound + 1) / t).filter(|i| (1 + t * i).abs() <= bound).collect();
    for &i in &is {
        let a = 1 + t * i;
        for &j in &is {
            if (i + j) % t != 0 {
                continue; // a + d != 2 (mod t^2): no (b,c) can close det 1
            }
            let d = 1 + t * j;
            let m = a * d - 1;
            debug_assert_eq!(m % t2, 0);
            total += off_diagonal_pairs(m, t, bound);
        }
    }
    Ok(total)
}

/// Ordered pairs (b, c) with b c = m, t | b, t | c, |b|, |c| <= bound.
fn off_diagonal_pairs(m: i64, t: i64, bound: i64) -> u64 {
    let cap = bound / t; // |b/t| <= cap
    if m == 0 {
        // b = 0 with c any multiple of t in range, or c = 0 with b any;
        // (0,0) would be counted twice.
        return (2 * (2 * cap + 1) - 1) as u64;
    }
    let m = m / (t * t);
    let mut count = 0u64;
    let mabs = m.abs();
    let mut e = 1i64;
    while e * e <= mabs {
        if mabs % e == 0 {
            let f = mabs / e;
            // b/t = +-e (c determined) and, when distinct, b/t = +-f.
            if e <= cap && f <= cap {
                count += 2;
                if e != f {
                    count += 2;
                }
            }
        }
        e += 1;
    }
    count
}

/// Number of integer solutions of x0^2 + 4 t^2 (x1^2 + x2^2 + x3^2) = q^k.
///
/// Scans x0 over the residues with 4t^2 | q^k - x0^2 and accumulates the
/// three-square representation count of the quotient. The work is
/// O(sqrt(N) + N / t^2) for N = q^k, gated by `budget`.
pub fn quad_form_representations(q: u64, t: u64, k: u32, budget: u64) -> Result<u64> {
    let _ = PrimeModulus::new(q)?;
    let _ = PrimeModulus::new(t)?;
    let n: u64 = q
        .checked_pow(k)
        .ok_or(Error::BudgetExceeded { need: u128::MAX, budget: budget as u128 })?;
    if n > budget {
        return Err(Error::BudgetExceeded { need: n as u128, budget: budget as u128 });
    }
    let n = n as i64;
    let block = 4 * (t * t) as i64;
    let s = n.isqrt();
    let mut total = 0u64;
    for x0 in -s..=s {
        let rem = n - x0 * x0;
        if rem % block != 0 {
            continue;
        }
        total += three_square_count(rem / block);
    }
    Ok(total)
}

/// r3(r): signed integer triples with x1^2 + x2^2 + x3^2 = r.
fn three_square_count(r: i64) -> u64 {
    debug_assert!(r >= 0);
    let mut count = 0u64;
    let s1 = r.isqrt();
    for x1 in -s1..=s1 {
        let r2 = r - x1 * x1;
        let s2 = r2.isqrt();
        for x2 in -s2..=s2 {
            let r3 = r2 - x2 * x2;
            let x3 = r3.isqrt();
            if x3 * x3 == r3 {
                count += if r3 == 0 { 1 } else { 2 };
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: scan all entry tuples directly.
    fn lattice_count_naive(t: i64, bound: i64) -> u64 {
        let mut count = 0u64;
        let ok = |x: i64| (x - 1) % t == 0;
        let ok0 = |x: i64| x % t == 0;
        for a in -bound..=bound {
            if !ok(a) {
                continue;
            }
            for d in -bound..=bound {
                if !ok(d) {
                    continue;
                }
                for b in -bound..=bound {
                    if !ok0(b) {
                        continue;
                    }
                    for c in -bound..=bound {
                        if ok0(c) && a * d - b * c == 1 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn lattice_count_matches_naive_scan() {
        for (t, bound) in [(3u64, 10i64), (3, 17), (5, 20), (7, 15), (11, 12)] {
            let fast = congruence_lattice_count(t, bound, 1 << 20).unwrap();
            let slow = lattice_count_naive(t as i64, bound);
            assert_eq!(fast, slow, "t={t}, bound={bound}");
        }
    }

    #[test]
    fn below_t_only_the_identity_survives() {
        for t in [3u64, 5, 7, 11, 101] {
            let bound = t as i64 - 1;
            assert_eq!(congruence_lattice_count(t, bound, 1 << 20).unwrap(), 1);
        }
    }

    #[test]
    fn lattice_budget_is_enforced() {
        let err = congruence_lattice_count(3, 1000, 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    /// Oracle: scan all four variables of the form directly.
    fn quad_form_naive(q: u64, t: u64, k: u32) -> u64 {
        let n = (q as i64).pow(k);
        let w = 4 * (t * t) as i64;
        let s0 = n.isqrt();
        let s = ((n / w) as i64).isqrt();
        let mut count = 0u64;
        for x0 in -s0..=s0 {
            for x1 in -s..=s {
                for x2 in -s..=s {
                    for x3 in -s..=s {
                        if x0 * x0 + w * (x1 * x1 + x2 * x2 + x3 * x3) == n {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn quad_form_matches_naive_scan() {
        for (q, t, k) in
            [(5u64, 3u64, 0u32), (5, 3, 1), (5, 3, 2), (5, 3, 3), (5, 3, 6), (3, 5, 4), (7, 5, 2)]
        {
            let fast = quad_form_representations(q, t, k, 1 << 30).unwrap();
            let slow = quad_form_naive(q, t, k);
            assert_eq!(fast, slow, "q={q}, t={t}, k={k}");
        }
    }

    #[test]
    fn quad_form_k0_counts_plus_minus_one() {
        // x0^2 = 1 forces (x0, 0, 0, 0) with x0 = +-1.
        assert_eq!(quad_form_representations(5, 3, 0, 1 << 20).unwrap(), 2);
        assert_eq!(quad_form_representations(13, 7, 0, 1 << 20).unwrap(), 2);
    }

    #[test]
    fn quad_form_budget_is_enforced() {
        let err = quad_form_representations(5, 3, 10, 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn three_square_small_values() {
        // r3(0)=1, r3(1)=6, r3(2)=12, r3(3)=8, r3(4)=6, r3(5)=24, r3(6)=24, r3(7)=0
        let expect = [1u64, 6, 12, 8, 6, 24, 24, 0];
        for (r, &e) in expect.iter().enumerate() {
            assert_eq!(three_square_count(r as i64), e, "r={r}");
        }
    }
}
