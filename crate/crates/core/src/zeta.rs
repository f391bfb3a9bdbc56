//! The Hashimoto non-backtracking edge operator and cycle statistics.
//!
//! H acts on functions indexed by half-edges: (Hf)(e) sums f over the
//! half-edges that continue e, i.e. those leaving head(e) other than the
//! reversal of e. tr H^k counts closed non-backtracking tailless cycles
//! N_X(k) (based, with a distinguished starting edge); Möbius inversion
//! over divisors recovers the primitive cycle counts pi_X(k).
//!
//! The operator is never stored densely for counting: one application costs
//! O(m) through the rotation system ((Hf)(e) = S(head e) - f(reversal of e),
//! where S is the vertex sum of f). A dense materialization exists solely
//! for the spectrum cross-check, which compares the numerically computed
//! eigenvalues of H against the prediction from the vertex spectrum:
//! for each adjacency eigenvalue lambda the pair of roots of
//! theta^2 - (q+1) lambda theta + q = 0, plus +1 and -1 each with
//! multiplicity m/2 - n.

use crate::error::{Error, Result};
use crate::graph::RegularMultigraph;
use crate::spectral::Spectrum;
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Residue above which a float trace refuses to round to a count.
const ROUNDING_FAIL: f64 = 1e-3;

/// The non-backtracking transfer operator, held implicitly through the
/// rotation system of the graph.
pub struct EdgeOperator<'g> {
    g: &'g RegularMultigraph,
}

impl<'g> EdgeOperator<'g> {
    pub fn new(g: &'g RegularMultigraph) -> Self {
        Self { g }
    }

    /// Dimension: the number of half-edges, m = n(q+1).
    pub fn m(&self) -> usize {
        self.g.half_edges()
    }

    pub fn graph(&self) -> &RegularMultigraph {
        self.g
    }

    /// Half-edges that may follow `e` in a non-backtracking walk: the
    /// half-edges leaving head(e), minus the reversal of e. A half-loop is
    /// its own reversal, so it too has exactly q continuations.
    pub fn successors(&self, e: usize) -> Vec<usize> {
        let g = self.g;
        let back = g.partner(e);
        g.half_edges_at(g.head(e))
            .iter()
            .map(|&h| h as usize)
            .filter(|&h| h != back)
            .collect()
    }

    /// One operator application in O(m).
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let g = self.g;
        let mut vertex_sum = vec![0.0f64; g.n()];
        for h in 0..g.half_edges() {
            vertex_sum[g.origin(h)] += f[h];
        }
        (0..g.half_edges())
            .map(|e| vertex_sum[g.head(e)] - f[g.partner(e)])
            .collect()
    }

    /// Dense materialization, rows indexed by e, columns by its successors.
    /// Only used by the spectrum cross-check; size-gated by the caller.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut mat = DMatrix::zeros(m, m);
        for e in 0..m {
            for s in self.successors(e) {
                mat[(e, s)] = 1.0;
            }
        }
        mat
    }
}

/// A rounded trace of H^k with the rounding residue kept for audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleCount {
    pub k: usize,
    pub count: u64,
    pub residue: f64,
}

/// N_X(k) = tr H^k for k = 1..=k_max via basis sweeps (one O(k m) pass per
/// basis direction, m of them). `limit` gates the quadratic total cost.
pub fn cycle_counts(op: &EdgeOperator, k_max: usize, limit: usize) -> Result<Vec<CycleCount>> {
    let m = op.m();
    if m > limit {
        return Err(Error::DenseLimit { n: m, limit });
    }
    let diags: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut f = vec![0.0f64; m];
            f[j] = 1.0;
            let mut out = Vec::with_capacity(k_max);
            for _ in 0..k_max {
                f = op.apply(&f);
                out.push(f[j]);
            }
            out
        })
        .collect();
    (1..=k_max)
        .map(|k| {
            let tr: f64 = diags.iter().map(|d| d[k - 1]).sum();
            let count = tr.round();
            let residue = (tr - count).abs();
            if residue > ROUNDING_FAIL || count < 0.0 {
                return Err(Error::TraceRounding { k, residue });
            }
            Ok(CycleCount { k, count: count as u64, residue })
        })
        .collect()
}

/// Single-length convenience wrapper around [`cycle_counts`].
pub fn cycle_count(op: &EdgeOperator, k: usize, limit: usize) -> Result<CycleCount> {
    Ok(cycle_counts(op, k, limit)?.pop().expect("k >= 1"))
}

/// Rebuilds the tails-allowed closed path totals P(X,k) from the tailless
/// cycle counts N_j = tr H^j. Stripping the tail pair (first and last edge)
/// of a tailed closed path leaves a closed path two steps shorter; the
/// stripped edge re-enters its base past two forbidden directions when the
/// shorter path is tailless and one when it is tailed, so the tailed counts
/// satisfy T_k = q·T_{k-2} + (q-1)·N_{k-2} with T_1 = #half-loops, T_2 = 0,
/// and P(X,k) = N_k + T_k. Entry i of the result is P(X,i+1).
pub fn path_totals_from_cycles(
    q: u64,
    half_loops: usize,
    counts: &[CycleCount],
) -> Vec<u128> {
    let mut tails: Vec<u128> = Vec::with_capacity(counts.len());
    counts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            debug_assert_eq!(c.k, i + 1, "counts must start at k = 1 and be contiguous");
            let t = match i {
                0 => half_loops as u128,
                1 => 0,
                _ => q as u128 * tails[i - 2] + (q as u128 - 1) * counts[i - 2].count as u128,
            };
            tails.push(t);
            c.count as u128 + t
        })
        .collect()
}

fn brute_budget(m: usize, q: usize, k: usize, budget: u64) -> Result<()> {
    let need = m as u128 * (q as u128).pow(k.saturating_sub(1) as u32);
    if need > budget as u128 {
        return Err(Error::BudgetExceeded { need, budget: budget as u128 });
    }
    Ok(())
}

/// Exhaustive count of closed non-backtracking tailless cycles of length k
/// (based edge sequences), the combinatorial oracle for tr H^k.
pub fn cycle_counts_brute(g: &RegularMultigraph, k: usize, budget: u64) -> Result<u64> {
    brute_budget(g.half_edges(), g.q(), k, budget)?;
    let op = EdgeOperator::new(g);
    let total = (0..g.half_edges())
        .into_par_iter()
        .map(|start| {
            // Walk k-1 steps from `start`, then close: the walk is a cycle
            // iff `start` is among the successors of the final edge.
            fn dfs(op: &EdgeOperator, start: usize, cur: usize, left: usize) -> u64 {
                if left == 0 {
                    let g = op.graph();
                    let closes = g.head(cur) == g.origin(start) && g.partner(cur) != start;
                    return closes as u64;
                }
                op.successors(cur)
                    .into_iter()
                    .map(|nxt| dfs(op, start, nxt, left - 1))
                    .sum()
            }
            dfs(&op, start, start, k - 1)
        })
        .sum();
    Ok(total)
}

/// Exhaustive count of primitive cycles of length k: enumerate based cycles
/// keeping the edge sequence, discard those with a proper cyclic period,
/// and divide the remainder by k (each primitive class has k distinct
/// basings).
pub fn primitive_counts_brute(g: &RegularMultigraph, k: usize, budget: u64) -> Result<u64> {
    brute_budget(g.half_edges(), g.q(), k, budget)?;
    let op = EdgeOperator::new(g);
    fn is_primitive(seq: &[usize]) -> bool {
        let k = seq.len();
        for d in 1..k {
            if k % d == 0 && (0..k).all(|i| seq[i] == seq[(i + d) % k]) {
                return false;
            }
        }
        true
    }
    let based: u64 = (0..g.half_edges())
        .into_par_iter()
        .map(|start| {
            fn dfs(op: &EdgeOperator, start: usize, seq: &mut Vec<usize>, left: usize) -> u64 {
                if left == 0 {
                    let g = op.graph();
                    let cur = *seq.last().expect("k >= 1");
                    let closes = g.head(cur) == g.origin(start) && g.partner(cur) != start;
                    return (closes && is_primitive(seq)) as u64;
                }
                let mut acc = 0;
                for nxt in op.successors(*seq.last().expect("nonempty")) {
                    seq.push(nxt);
                    acc += dfs(op, start, seq, left - 1);
                    seq.pop();
                }
                acc
            }
            let mut seq = vec![start];
            dfs(&op, start, &mut seq, k - 1)
        })
        .sum();
    if based % k as u64 != 0 {
        return Err(Error::BadCycleCounts(format!(
            "based primitive cycles {based} not divisible by k={k}"
        )));
    }
    Ok(based / k as u64)
}

/// The Hashimoto spectrum predicted from the vertex spectrum: the roots of
/// theta^2 - (q+1) lambda theta + q per eigenvalue, padded with +1 of
/// multiplicity (m - f)/2 - n and -1 of multiplicity (m - f)/2 - n + f,
/// where f is the number of half-loops. Each half-loop is a fixed point of
/// the edge reversal, which shifts one eigenvalue of the reversal operator
/// from +1 to -1 and tilts the padding accordingly; with f = 0 this is the
/// usual m/2 - n of each sign. Sorted by (re, im).
pub fn hashimoto_spectrum_predicted(s: &Spectrum, half_loops: usize) -> Vec<Complex<f64>> {
    let q = s.q() as f64;
    let m = s.n() * (s.q() + 1);
    debug_assert!(half_loops <= m && (m - half_loops) % 2 == 0);
    let mut out = Vec::with_capacity(m);
    for &lambda in s.values() {
        let b = (q + 1.0) * lambda;
        let disc = b * b - 4.0 * q;
        if disc >= 0.0 {
            let r = disc.sqrt();
            out.push(Complex::new((b + r) / 2.0, 0.0));
            out.push(Complex::new((b - r) / 2.0, 0.0));
        } else {
            let im = (-disc).sqrt() / 2.0;
            out.push(Complex::new(b / 2.0, im));
            out.push(Complex::new(b / 2.0, -im));
        }
    }
    let pairs = (m - half_loops) / 2 - s.n();
    for _ in 0..pairs {
        out.push(Complex::new(1.0, 0.0));
        out.push(Complex::new(-1.0, 0.0));
    }
    for _ in 0..half_loops {
        out.push(Complex::new(-1.0, 0.0));
    }
    sort_complex(&mut out);
    out
}

/// The Hashimoto spectrum computed head-on from the dense operator.
///
/// H is not symmetric (and for q = 1 it is a permutation matrix), so this
/// goes through a general complex eigensolver rather than the symmetric
/// path used for the vertex spectrum.
pub fn hashimoto_spectrum_computed(
    g: &RegularMultigraph,
    limit: usize,
) -> Result<Vec<Complex<f64>>> {
    let op = EdgeOperator::new(g);
    let m = op.m();
    if m > limit {
        return Err(Error::DenseLimit { n: m, limit });
    }
    let mut dense = faer::Mat::<f64>::zeros(m, m);
    for e in 0..m {
        for s in op.successors(e) {
            dense[(e, s)] = 1.0;
        }
    }
    let mut vals: Vec<Complex<f64>> = dense
        .eigenvalues()
        .map_err(|e| Error::CheckFailed(format!("Hashimoto eigensolver failed: {e:?}")))?;
    sort_complex(&mut vals);
    Ok(vals)
}

fn sort_complex(v: &mut [Complex<f64>]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// One entry of the predicted-vs-computed spectrum comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMatch {
    pub predicted: (f64, f64),
    pub matched: (f64, f64),
    pub distance: f64,
}

/// Greedy minimal-cost assignment between two equal-size complex multisets;
/// the largest matched distance bounds the Hausdorff distance.
pub fn spectrum_match(
    predicted: &[Complex<f64>],
    computed: &[Complex<f64>],
) -> Result<Vec<SpectrumMatch>> {
    if predicted.len() != computed.len() {
        return Err(Error::BadCycleCounts(format!(
            "spectrum size mismatch: {} predicted vs {} computed",
            predicted.len(),
            computed.len()
        )));
    }
    let mut used = vec![false; computed.len()];
    let mut out = Vec::with_capacity(predicted.len());
    for p in predicted {
        let (best, dist) = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (p - c).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("equal sizes");
        used[best] = true;
        out.push(SpectrumMatch {
            predicted: (p.re, p.im),
            matched: (computed[best].re, computed[best].im),
            distance: dist,
        });
    }
    Ok(out)
}

/// Largest matched distance of [`spectrum_match`].
pub fn spectrum_match_distance(matches: &[SpectrumMatch]) -> f64 {
    matches.iter().map(|m| m.distance).fold(0.0, f64::max)
}

/// The Möbius function on small integers by trial factorization.
pub fn mobius(n: u64) -> i64 {
    debug_assert!(n >= 1);
    let mut n = n;
    let mut primes = 0;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            primes += 1;
        }
        d += 1;
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Primitive cycle counts by Möbius inversion:
/// pi(k) = (1/k) sum over d | k of mu(k/d) N(d).
/// Input is N(1..=K) in order; errors if any inverted value is negative or
/// not divisible by k.
pub fn primitive_counts(counts: &[CycleCount]) -> Result<Vec<u64>> {
    let k_max = counts.len();
    let n_of = |k: usize| counts[k - 1].count as i128;
    (1..=k_max)
        .map(|k| {
            let sum: i128 = (1..=k)
                .filter(|d| k % d == 0)
                .map(|d| mobius((k / d) as u64) as i128 * n_of(d))
                .sum();
            if sum < 0 || sum % k as i128 != 0 {
                return Err(Error::BadCycleCounts(format!(
                    "Mobius inversion at k={k} gave {sum}, not a k-multiple of a count"
                )));
            }
            Ok((sum / k as i128) as u64)
        })
        .collect()
}

/// One (k, N, pi, residue) row of the zeta report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub k: usize,
    pub n_k: u64,
    pub pi_k: u64,
    pub residue: f64,
}

/// Cycle statistics up to the density window k* = 2 floor(A log_q n), with
/// witness constants for both N and pi at k* and the bridging constant
/// |pi(k*) - N(k*)/k*| / (n q^(k*/2)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub a: f64,
    pub k_star: usize,
    pub rows: Vec<ZetaRow>,
    pub witness_n: f64,
    pub witness_pi: f64,
    pub bridge_constant: f64,
    /// Largest predicted-vs-computed spectrum distance, when m was within
    /// the dense gate.
    pub spectrum_max_distance: Option<f64>,
}

pub fn zeta_density_check(
    g: &RegularMultigraph,
    s: &Spectrum,
    a: f64,
    limit: usize,
) -> Result<ZetaReport> {
    let q = g.q() as f64;
    let nf = g.n() as f64;
    let k_star = crate::hecke::density_k_max(g.n(), g.q(), a).max(2);
    let op = EdgeOperator::new(g);
    let counts = cycle_counts(&op, k_star, limit)?;
    let prims = primitive_counts(&counts)?;
    let rows: Vec<ZetaRow> = counts
        .iter()
        .zip(&prims)
        .map(|(c, &p)| ZetaRow { k: c.k, n_k: c.count, pi_k: p, residue: c.residue })
        .collect();
    let scale = nf * q.powf(k_star as f64 / 2.0);
    let last = rows.last().expect("k_star >= 2");
    let witness_n = last.n_k as f64 / scale;
    let witness_pi = last.pi_k as f64 / scale;
    let bridge_constant = (last.pi_k as f64 - last.n_k as f64 / k_star as f64).abs() / scale;
    let spectrum_max_distance = match hashimoto_spectrum_computed(g, limit) {
        Ok(computed) => {
            let predicted = hashimoto_spectrum_predicted(s, g.loop_stats().0);
            Some(spectrum_match_distance(&spectrum_match(&predicted, &computed)?))
        }
        Err(Error::DenseLimit { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ZetaReport {
        a,
        k_star,
        rows,
        witness_n,
        witness_pi,
        bridge_constant,
        spectrum_max_distance,
    })
}


#[cfg(test)]
mod half_loop_tests {
    use super::*;
    use crate::graph::schreier_graph;
    use crate::groups::lps_generator_set;
    use crate::spectral::eigenvalues;

    // A Schreier graph on P^1(F_13) whose generators fix 8 points each with a
    // 2-torsion action, producing 8 half-loops: the hardest shape for the
    // edge-reversal bookkeeping. Traces, brute counts, and the half-loop
    // corrected eigenvalue prediction must all agree.
    #[test]
    fn half_loops_traces_and_spectrum() {
        let gens = lps_generator_set(3, 13).unwrap();
        let g = schreier_graph(&gens).unwrap();
        let (half, full) = g.loop_stats();
        assert_eq!((g.n(), g.half_edges(), half, full), (14, 56, 8, 0));
        let op = EdgeOperator::new(&g);
        let counts = cycle_counts(&op, 6, 4000).unwrap();
        let expect = [0, 0, 0, 96, 240, 744];
        for (c, &e) in counts.iter().zip(&expect) {
            assert_eq!(c.count, e, "k={}", c.k);
            assert_eq!(cycle_counts_brute(&g, c.k, 1 << 24).unwrap(), e, "k={}", c.k);
        }
        let s = eigenvalues(&g, 100).unwrap();
        let predicted = hashimoto_spectrum_predicted(&s, half);
        // Padding sanity: (m - f)/2 - n = 10 at +1, plus f more at -1.
        let at = |v: &[Complex<f64>], x: f64| {
            v.iter().filter(|z| (z.re - x).abs() < 1e-9 && z.im == 0.0).count()
        };
        assert!(at(&predicted, 1.0) >= 10 && at(&predicted, -1.0) >= 18);
        let computed = hashimoto_spectrum_computed(&g, 4000).unwrap();
        let matches = spectrum_match(&predicted, &computed).unwrap();
        assert!(spectrum_match_distance(&matches) < 1e-6);
    }
}
