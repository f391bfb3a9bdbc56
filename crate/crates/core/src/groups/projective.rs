//! The projective line `P^1(F_t)` and the Mobius action of `SL2(F_t)` on it.

use super::{MatrixSl2, PrimeModulus};
use crate::error::{Error, Result};

/// A point of `P^1(F_t)` as a canonicalized homogeneous column (x, y):
/// either (1, y) or the point at infinity (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    pub x: u64,
    pub y: u64,
}

impl ProjectivePoint {
    /// Canonicalizes a nonzero homogeneous pair.
    pub fn new(m: PrimeModulus, x: u64, y: u64) -> Result<Self> {
        let (x, y) = (m.reduce(x), m.reduce(y));
        if x == 0 && y == 0 {
            return Err(Error::BadGeneratorSet("(0,0) is not projective".into()));
        }
        Ok(if x == 0 {
            ProjectivePoint { x: 0, y: 1 }
        } else {
            ProjectivePoint { x: 1, y: m.mul(y, m.inv(x).expect("x nonzero")) }
        })
    }

    pub fn infinity() -> Self {
        ProjectivePoint { x: 0, y: 1 }
    }

    /// Position of this point in the [`projective_line`] ordering:
    /// infinity first, then (1, y) by ascending y.
    pub fn index(&self) -> usize {
        if self.x == 0 {
            0
        } else {
            1 + self.y as usize
        }
    }
}

/// All t+1 points of `P^1(F_t)`: infinity, then (1,0), (1,1), ..., (1,t-1).
pub fn projective_line(m: PrimeModulus) -> Vec<ProjectivePoint> {
    let mut pts = Vec::with_capacity(m.get() as usize + 1);
    pts.push(ProjectivePoint::infinity());
    for y in 0..m.get() {
        pts.push(ProjectivePoint { x: 1, y });
    }
    pts
}

/// Left action of a matrix given by its entries (a, b, c, d) on a column,
/// re-canonicalized: (x, y) -> (a x + b y, c x + d y). Valid for any
/// invertible matrix — the action only depends on the projective class.
pub fn mobius_act_entries(m: PrimeModulus, e: [u64; 4], p: ProjectivePoint) -> ProjectivePoint {
    let [a, b, c, d] = e;
    let x = m.add(m.mul(a, p.x), m.mul(b, p.y));
    let y = m.add(m.mul(c, p.x), m.mul(d, p.y));
    ProjectivePoint::new(m, x, y).expect("invertible matrix, image nonzero")
}

/// Left action of g on a column vector, re-canonicalized.
pub fn mobius_act(g: &MatrixSl2, p: ProjectivePoint) -> ProjectivePoint {
    mobius_act_entries(g.modulus(), g.entries(), p)
}

/// Fixed-point count on `P^1(F_t)` for a matrix given by entries.
///
/// For a non-central matrix the count is 0, 1, or 2: infinity is fixed iff
/// b = 0, and (1, y) is fixed iff b y^2 + (a - d) y - c = 0, whose root
/// count is decided by the discriminant (a - d)^2 + 4 b c. Central elements
/// fix all t+1 points.
pub fn projective_fixed_points_entries(m: PrimeModulus, e: [u64; 4]) -> usize {
    let [a, b, c, d] = e;
    if b == 0 && c == 0 && a == d {
        return m.get() as usize + 1;
    }
    let amd = m.sub(a, d);
    if b == 0 {
        // infinity is fixed; the finite equation degenerates to (a-d) y = c.
        if amd != 0 {
            2 // one finite root plus infinity
        } else {
            // a = d and b = 0 with g non-central forces c != 0: no finite root.
            1
        }
    } else {
        let disc = m.add(m.mul(amd, amd), m.mul(4, m.mul(b, c)));
        if disc == 0 {
            1
        } else if m.is_square(disc) {
            2
        } else {
            0
        }
    }
}

/// Number of fixed points of g on `P^1(F_t)`, computed algebraically.
pub fn projective_fixed_points(g: &MatrixSl2) -> usize {
    projective_fixed_points_entries(g.modulus(), g.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::sl2_elements;

    fn pm(t: u64) -> PrimeModulus {
        PrimeModulus::new(t).unwrap()
    }

    #[test]
    fn line_has_t_plus_one_points_in_fixed_order() {
        let m = pm(3);
        let pts = projective_line(m);
        let tuples: Vec<(u64, u64)> = pts.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(tuples, vec![(0, 1), (1, 0), (1, 1), (1, 2)]);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.index(), i);
        }
    }

    #[test]
    fn canonicalization_collapses_scalar_multiples() {
        let m = pm(7);
        let p = ProjectivePoint::new(m, 3, 5).unwrap();
        let q = ProjectivePoint::new(m, 6, 10).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.x, 1);
        assert!(ProjectivePoint::new(m, 7, 14).is_err()); // reduces to (0,0)
    }

    #[test]
    fn rotation_by_quarter_turn_swaps_zero_and_infinity() {
        let m = pm(5);
        let g = MatrixSl2::from_i64(m, 0, -1, 1, 0).unwrap();
        let inf = ProjectivePoint::infinity();
        let zero = ProjectivePoint::new(m, 1, 0).unwrap();
        assert_eq!(mobius_act(&g, zero), ProjectivePoint { x: 0, y: 1 });
        assert_eq!(mobius_act(&g, inf), ProjectivePoint { x: 1, y: 0 });
    }

    #[test]
    fn action_is_a_homomorphism() {
        let m = pm(11);
        let g = MatrixSl2::from_i64(m, 1, 3, 0, 1).unwrap();
        let h = MatrixSl2::from_i64(m, 2, 1, 1, 1).unwrap();
        let gh = g.mul(&h).unwrap();
        for p in projective_line(m) {
            assert_eq!(mobius_act(&gh, p), mobius_act(&g, mobius_act(&h, p)));
        }
    }

    /// Oracle: fixed points by scanning the whole orbit of the line.
    fn fixed_points_by_scan(g: &MatrixSl2) -> usize {
        projective_line(g.modulus()).into_iter().filter(|&p| mobius_act(g, p) == p).count()
    }

    #[test]
    fn fixed_point_count_matches_exhaustive_scan_for_small_t() {
        for t in [3u64, 5, 7, 11] {
            let m = pm(t);
            for g in sl2_elements(m) {
                let fast = projective_fixed_points(&g);
                let slow = fixed_points_by_scan(&g);
                assert_eq!(fast, slow, "t={t}, g={:?}", g.entries());
                assert!(fast == 0 || fast == 1 || fast == 2 || fast == t as usize + 1);
            }
        }
    }

    #[test]
    fn quarter_turn_fixed_points_depend_on_quadratic_residue() {
        // y^2 = -1 has two roots mod 5, none mod 7.
        let g5 = MatrixSl2::from_i64(pm(5), 0, -1, 1, 0).unwrap();
        assert_eq!(projective_fixed_points(&g5), 2);
        let g7 = MatrixSl2::from_i64(pm(7), 0, -1, 1, 0).unwrap();
        assert_eq!(projective_fixed_points(&g7), 0);
        // +-I fix everything.
        let id = MatrixSl2::identity(pm(7));
        assert_eq!(projective_fixed_points(&id), 8);
        let neg = MatrixSl2::from_i64(pm(7), -1, 0, 0, -1).unwrap();
        assert_eq!(projective_fixed_points(&neg), 8);
    }
}
