//! Simple random walks, their tree-sphere decomposition, L1 cutoff
//! profiles, and almost-diameter statistics.
//!
//! The simple random walk on a (q+1)-regular multigraph is the normalized
//! adjacency operator acting on point masses: A^k delta_x0 is the walk
//! distribution after k steps. The operator identity
//!
//! ```text
//!   A^k = sum_{i=0}^k alpha_i^(k) A_i
//! ```
//!
//! expands the k-step kernel over the distance-i Hecke operators with
//! universal tree coefficients alpha_i^(k) (the distribution of a biased
//! birth-death chain on the distance-from-root axis of the (q+1)-regular
//! tree). [`walk_deviation`] verifies the identity numerically; the
//! coefficients concentrate near i = (q-1)/(q+1) k, which is what drives
//! both the cutoff location and the almost-diameter bound.

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, is_bipartite, RegularMultigraph};
use crate::hecke::{adjacency_apply, delta, hecke_sequence, VertexFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Distribution of the simple random walk after k steps from `x0`:
/// k sparse applications of the normalized adjacency to a point mass.
pub fn rw_distribution(g: &RegularMultigraph, x0: usize, k: usize) -> VertexFunction {
    let mut f = delta(g.n(), x0);
    for _ in 0..k {
        f = adjacency_apply(g, &f);
    }
    f
}

/// L1 distance between two vertex functions.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Which stationary object a walk profile measures against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkTarget {
    /// The uniform distribution pi = 1/n. Invalid on bipartite graphs,
    /// where the walk never forgets the starting parity.
    Pi,
    /// The parity-corrected target pi + (-1)^k pi_-: uniform mass 2/n on
    /// the side of the bipartition the walk occupies at step k. Only
    /// defined on bipartite graphs.
    PiBipartiteAdjusted,
}

/// L1 distances of the walk from its target along a range of step counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkProfile {
    pub source: usize,
    pub ks: Vec<usize>,
    /// ||A^k delta - target_k||_1, entry per element of `ks`; always in
    /// [0, 2], and non-increasing in k when the target is plain pi.
    pub l1: Vec<f64>,
    pub target_kind: WalkTarget,
}

impl WalkProfile {
    /// Total-variation column (= l1 / 2), for external comparability.
    pub fn tv(&self) -> Vec<f64> {
        self.l1.iter().map(|x| x / 2.0).collect()
    }

    /// The profile value at one k, if it was recorded.
    pub fn at(&self, k: usize) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.l1[i])
    }
}

/// L1 distance profile of the walk from `x0` over `k_range`.
///
/// With [`WalkTarget::Pi`] the graph must not be bipartite (the distance
/// would be stuck at 2 x parity floor); with
/// [`WalkTarget::PiBipartiteAdjusted`] it must be bipartite. Cost is one
/// sparse sweep per step, O(n q) each; no matrices are materialized.
pub fn cutoff_profile(
    g: &RegularMultigraph,
    x0: usize,
    k_range: std::ops::RangeInclusive<usize>,
    target: WalkTarget,
) -> Result<WalkProfile> {
    let n = g.n();
    let nf = n as f64;
    let coloring = is_bipartite(g);
    let color = match (target, coloring) {
        (WalkTarget::Pi, Some(_)) => return Err(Error::BipartiteTarget),
        (WalkTarget::Pi, None) => None,
        (WalkTarget::PiBipartiteAdjusted, None) => return Err(Error::NotBipartite),
        (WalkTarget::PiBipartiteAdjusted, Some(c)) => {
            // A connected regular bipartite graph has equal sides (count
            // the edges leaving each side), so the adjusted target is a
            // probability measure.
            debug_assert_eq!(c.iter().filter(|&&x| x == 0).count() * 2, n);
            Some(c)
        }
    };
    let mut f = delta(n, x0);
    let mut ks = Vec::new();
    let mut l1 = Vec::new();
    for k in 0..=*k_range.end() {
        if k > 0 {
            f = adjacency_apply(g, &f);
        }
        if k >= *k_range.start() {
            let dist = match &color {
                None => f.iter().map(|x| (x - 1.0 / nf).abs()).sum(),
                Some(c) => {
                    let side = (c[x0] as usize + k) % 2;
                    f.iter()
                        .zip(c)
                        .map(|(x, &cy)| {
                            let t = if cy as usize == side { 2.0 / nf } else { 0.0 };
                            (x - t).abs()
                        })
                        .sum()
                }
            };
            ks.push(k);
            l1.push(dist);
        }
    }
    Ok(WalkProfile { source: x0, ks, l1, target_kind: target })
}

/// Locates the L1 transition inside a profile: the largest recorded k with
/// l1 >= hi and the smallest with l1 <= lo. `k_lo - k_hi` is the window
/// width; a profile that never reaches a threshold is an error.
pub fn cutoff_window(profile: &WalkProfile, hi: f64, lo: f64) -> Result<(usize, usize)> {
    let k_hi = profile
        .ks
        .iter()
        .zip(&profile.l1)
        .filter(|(_, &d)| d >= hi)
        .map(|(&k, _)| k)
        .max()
        .ok_or(Error::ThresholdNotCrossed(hi))?;
    let k_lo = profile
        .ks
        .iter()
        .zip(&profile.l1)
        .filter(|(_, &d)| d <= lo)
        .map(|(&k, _)| k)
        .min()
        .ok_or(Error::ThresholdNotCrossed(lo))?;
    Ok((k_hi, k_lo))
}

/// The sphere decomposition of the k-step walk kernel on the tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeCoefficients {
    pub k: usize,
    /// alpha[i] = alpha_i^(k); alpha_i = 0 whenever i and k differ in
    /// parity, the rest are a probability vector.
    pub alpha: Vec<f64>,
}

/// Coefficients of A^k = sum_i alpha_i^(k) A_i, by the birth-death
/// recursion: mass at the root moves out with probability 1; mass at
/// distance i >= 1 moves out with probability q/(q+1) and back with
/// probability 1/(q+1).
pub fn tree_coefficients(q: usize, k: usize) -> TreeCoefficients {
    let qf = q as f64;
    let out = qf / (qf + 1.0);
    let back = 1.0 / (qf + 1.0);
    let mut alpha = vec![0.0; k + 1];
    alpha[0] = 1.0;
    for step in 0..k {
        let mut next = vec![0.0; k + 1];
        next[1] += alpha[0];
        for i in 1..=step {
            next[i + 1] += alpha[i] * out;
            next[i - 1] += alpha[i] * back;
        }
        alpha = next;
    }
    TreeCoefficients { k, alpha }
}

/// ||A^k delta_x0 - sum_i alpha_i^(k) A_i delta_x0||_1: the numeric residue
/// of the sphere decomposition. Zero in exact arithmetic on any graph.
pub fn walk_deviation(g: &RegularMultigraph, x0: usize, k: usize) -> f64 {
    let walked = rw_distribution(g, x0, k);
    let coeffs = tree_coefficients(g.q(), k);
    let spheres = hecke_sequence(g, k, &delta(g.n(), x0));
    let mut rebuilt = vec![0.0; g.n()];
    for (a, sphere) in coeffs.alpha.iter().zip(&spheres) {
        if *a == 0.0 {
            continue;
        }
        for (r, s) in rebuilt.iter_mut().zip(sphere) {
            *r += a * s;
        }
    }
    l1_distance(&walked, &rebuilt)
}

/// Distance statistics from one source vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub source: usize,
    /// (1 + eps) log_q n (natural log for q = 1).
    pub radius_threshold: f64,
    /// Vertices strictly farther than the threshold (unreachable counts
    /// as far).
    pub far_count: usize,
    /// floor(acosh(n-1)/acosh(1/lambda)) + 1, when lambda was supplied.
    pub diameter_bound_chung: Option<usize>,
}

/// Almost-diameter statistics over every source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostDiameterStats {
    pub eps: f64,
    pub n: usize,
    pub threshold: f64,
    pub reports: Vec<GeometryReport>,
    /// Upper median of far_count / n over sources.
    pub median_far_fraction: f64,
    pub max_far_fraction: f64,
}

/// Counts, for every source x0, the vertices beyond distance
/// (1 + eps) log_q n — the almost-diameter defect. Pass the nontrivial
/// spectral radius to also record the Chung diameter bound per report;
/// `None` skips it (e.g. when the graph is too large to eigensolve).
pub fn almost_diameter_stats(
    g: &RegularMultigraph,
    eps: f64,
    lambda: Option<f64>,
) -> Result<AlmostDiameterStats> {
    let n = g.n();
    let nf = n as f64;
    let threshold = if g.q() == 1 {
        (1.0 + eps) * nf.ln()
    } else {
        (1.0 + eps) * nf.ln() / (g.q() as f64).ln()
    };
    let chung = match lambda {
        Some(l) => Some(chung_diameter_bound(l, n)?),
        None => None,
    };
    let reports: Vec<GeometryReport> = (0..n)
        .into_par_iter()
        .map(|source| {
            let d = bfs_distances(g, source);
            let far_count =
                d.dist.iter().filter(|&&x| x == u32::MAX || x as f64 > threshold).count();
            GeometryReport {
                source,
                radius_threshold: threshold,
                far_count,
                diameter_bound_chung: chung,
            }
        })
        .collect();
    let mut fractions: Vec<f64> = reports.iter().map(|r| r.far_count as f64 / nf).collect();
    fractions.sort_by(f64::total_cmp);
    Ok(AlmostDiameterStats {
        eps,
        n,
        threshold,
        median_far_fraction: fractions[n / 2],
        max_far_fraction: *fractions.last().expect("nonempty"),
        reports,
    })
}

/// The spectral diameter bound floor(acosh(n-1)/acosh(1/lambda)) + 1 for a
/// graph with nontrivial spectral radius lambda in (0, 1).
pub fn chung_diameter_bound(lambda: f64, n: usize) -> Result<usize> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::NoSpectralGap(lambda));
    }
    let ratio = ((n as f64 - 1.0).acosh() / (1.0 / lambda).acosh()).floor();
    Ok(ratio as usize + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{diameter, preset_graph, schreier_graph};
    use crate::groups::preset_generators;
    use crate::spectral::{eigenvalues, CLASSIFY_TOL};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walk_distribution_small_steps() {
        let g = preset_graph("complete_k4").unwrap();
        assert_eq!(rw_distribution(&g, 2, 0), delta(4, 2));
        let one = rw_distribution(&g, 0, 1);
        assert_eq!(one, vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        for k in 0..=12 {
            let f = rw_distribution(&g, 0, k);
            assert_relative_eq!(f.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            assert!(f.iter().all(|&x| x >= -1e-12));
        }
    }

    #[test]
    fn walk_distribution_matches_monte_carlo() {
        let g = preset_graph("petersen").unwrap();
        let k = 5;
        let exact = rw_distribution(&g, 0, k);
        let walkers = 1_000_000u32;
        let mut rng = ChaCha8Rng::seed_from_u64(20240917);
        let mut hits = vec![0u32; g.n()];
        for _ in 0..walkers {
            let mut v = 0usize;
            for _ in 0..k {
                let hs = g.half_edges_at(v);
                v = g.head(hs[rng.random_range(0..hs.len())] as usize);
            }
            hits[v] += 1;
        }
        for v in 0..g.n() {
            let p = exact[v];
            let sigma = (p * (1.0 - p) / walkers as f64).sqrt();
            let observed = hits[v] as f64 / walkers as f64;
            assert!(
                (observed - p).abs() <= 3.0 * sigma,
                "vertex {v}: observed {observed}, exact {p}, sigma {sigma}"
            );
        }
    }

    #[test]
    fn tree_coefficients_by_hand() {
        let c = tree_coefficients(2, 0);
        assert_eq!(c.alpha, vec![1.0]);
        let c = tree_coefficients(2, 1);
        assert_eq!(c.alpha, vec![0.0, 1.0]);
        // One unrolling of A A_1 = (q/(q+1)) A_2 + (1/(q+1)) A_0.
        let c = tree_coefficients(2, 2);
        assert_eq!(c.alpha, vec![1.0 / 3.0, 0.0, 2.0 / 3.0]);
        // alpha_0^(2) = 1/(q+1) exactly, for any q.
        for q in 1..=9 {
            assert_eq!(tree_coefficients(q, 2).alpha[0], 1.0 / (q as f64 + 1.0));
        }
    }

    #[test]
    fn tree_coefficients_are_a_parity_respecting_distribution() {
        for q in [1usize, 2, 3, 5] {
            for k in 0..=25 {
                let c = tree_coefficients(q, k);
                assert_eq!(c.alpha.len(), k + 1);
                let total: f64 = c.alpha.iter().sum();
                assert_relative_eq!(total, 1.0, epsilon = 1e-12);
                for (i, &a) in c.alpha.iter().enumerate() {
                    assert!(a >= 0.0, "q={q} k={k} i={i}");
                    if (i + k) % 2 == 1 {
                        assert_eq!(a, 0.0, "parity zero q={q} k={k} i={i}");
                    }
                }
            }
        }
    }

    /// Mass outside the window |i - k/3| <= w k at q = 2.
    fn escaped_mass(k: usize, w: f64) -> f64 {
        let c = tree_coefficients(2, k);
        let center = k as f64 / 3.0;
        c.alpha
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as f64 - center).abs() > w * k as f64)
            .map(|(_, a)| a)
            .sum()
    }

    #[test]
    fn tree_coefficients_concentrate_at_the_drift() {
        // The sphere index performs a biased walk: drift (q-1)/(q+1) = 1/3
        // per step at q = 2, per-step variance 1 - 1/9 = 8/9. At k = 200
        // the +-0.1k window is only +-1.5 sigma, so the escaped mass sits
        // at 2 Phi(-1.5) ~ 0.13 — frozen here as a regression value; the
        // concentration statement is asymptotic, and by k = 2000 the same
        // relative window is +-4.7 sigma and the escape is negligible.
        let at_200 = escaped_mass(200, 0.1);
        assert!((0.10..0.15).contains(&at_200), "escaped mass {at_200}");
        assert!(escaped_mass(200, 0.2) < 0.01);
        assert!(escaped_mass(2000, 0.1) < 1e-4);
    }

    #[test]
    fn sphere_decomposition_reconstructs_the_walk() {
        let mut graphs = vec![];
        for name in ["complete_k4", "petersen", "cycle_6", "two_vertex_triple"] {
            graphs.push(preset_graph(name).unwrap());
        }
        graphs.push(schreier_graph(&preset_generators("pm2", 5).unwrap()).unwrap());
        for g in &graphs {
            for k in 0..=20 {
                let dev = walk_deviation(g, 0, k);
                assert!(dev <= 1e-8, "{} k={k}: deviation {dev}", g.meta().family);
            }
        }
    }

    #[test]
    fn profile_values_and_target_errors() {
        let g = preset_graph("complete_k4").unwrap();
        let p = cutoff_profile(&g, 0, 0..=6, WalkTarget::Pi).unwrap();
        assert_eq!(p.at(0), Some(1.5)); // ||delta - 1/4||_1 = 3/4 + 3/4
        assert_relative_eq!(p.at(1).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(p.tv()[0], 0.75);
        assert!(matches!(
            cutoff_profile(&g, 0, 0..=4, WalkTarget::PiBipartiteAdjusted),
            Err(Error::NotBipartite)
        ));
        let c6 = preset_graph("cycle_6").unwrap();
        assert!(matches!(
            cutoff_profile(&c6, 0, 0..=4, WalkTarget::Pi),
            Err(Error::BipartiteTarget)
        ));
    }

    #[test]
    fn adjusted_profile_converges_on_bipartite_graphs() {
        let c6 = preset_graph("cycle_6").unwrap();
        let p = cutoff_profile(&c6, 0, 0..=40, WalkTarget::PiBipartiteAdjusted).unwrap();
        assert!(p.l1.iter().all(|&d| (0.0..=2.0 + 1e-12).contains(&d)));
        assert!(p.l1.last().unwrap() < &1e-5);
        // The parallel-triple graph mixes within its parity class in a
        // single step: the adjusted distance is identically zero.
        let tv = preset_graph("two_vertex_triple").unwrap();
        let p = cutoff_profile(&tv, 0, 0..=9, WalkTarget::PiBipartiteAdjusted).unwrap();
        assert!(p.l1.iter().all(|&d| d.abs() < 1e-15));
    }

    #[test]
    fn plain_profile_is_monotone() {
        for name in ["complete_k4", "petersen", "cycle_5"] {
            let g = preset_graph(name).unwrap();
            let p = cutoff_profile(&g, 0, 0..=30, WalkTarget::Pi).unwrap();
            for w in p.l1.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{name}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn profile_is_source_independent_on_transitive_graphs() {
        let g = preset_graph("petersen").unwrap();
        let base = cutoff_profile(&g, 0, 0..=15, WalkTarget::Pi).unwrap();
        for v in 1..g.n() {
            let p = cutoff_profile(&g, v, 0..=15, WalkTarget::Pi).unwrap();
            for (a, b) in p.l1.iter().zip(&base.l1) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn window_extraction() {
        let p = WalkProfile {
            source: 0,
            ks: vec![0, 1, 2, 3],
            l1: vec![2.0, 2.0, 1.0, 0.1],
            target_kind: WalkTarget::Pi,
        };
        assert_eq!(cutoff_window(&p, 1.8, 0.2).unwrap(), (1, 3));
        assert!(matches!(
            cutoff_window(&p, 1.8, 0.01),
            Err(Error::ThresholdNotCrossed(_))
        ));
        assert!(matches!(
            cutoff_window(&p, 2.5, 0.2),
            Err(Error::ThresholdNotCrossed(_))
        ));
    }

    #[test]
    fn almost_diameter_counts() {
        // Complete graph: diameter 1, nothing is ever far.
        let g = preset_graph("complete_k4").unwrap();
        for eps in [0.0, 0.25, 1.0] {
            let s = almost_diameter_stats(&g, eps, None).unwrap();
            assert!(s.reports.iter().all(|r| r.far_count == 0));
            assert_eq!(s.median_far_fraction, 0.0);
        }
        // Long cycle: the anti-example. Threshold 1.25 ln 64 ~ 5.2, so
        // everything past distance 5 on both arcs is far: 64 - 11.
        let c = preset_graph("cycle_64").unwrap();
        let s = almost_diameter_stats(&c, 0.25, None).unwrap();
        assert!(s.reports.iter().all(|r| r.far_count == 53));
        assert_relative_eq!(s.median_far_fraction, 53.0 / 64.0, epsilon = 1e-15);
        assert_eq!(s.max_far_fraction, s.median_far_fraction);
    }

    #[test]
    fn far_count_vanishes_when_threshold_beats_diameter() {
        let g = preset_graph("petersen").unwrap();
        // diameter 2; eps making the threshold >= 2 empties the far set.
        let eps = 2.0 / ((10f64).ln() / (2f64).ln()) - 1.0 + 0.05;
        let s = almost_diameter_stats(&g, eps, None).unwrap();
        assert!(s.threshold >= diameter(&g).unwrap() as f64);
        assert!(s.reports.iter().all(|r| r.far_count == 0));
    }

    #[test]
    fn chung_bound_values() {
        // complete_k4: lambda = 1/3, acosh(3)/acosh(3) = 1 -> bound 2.
        assert_eq!(chung_diameter_bound(1.0 / 3.0, 4).unwrap(), 2);
        assert!(chung_diameter_bound(1.0 / 3.0, 4).unwrap() >= 1);
        // petersen: bound from its actual spectral radius dominates the
        // exact diameter (2).
        let g = preset_graph("petersen").unwrap();
        let s = eigenvalues(&g, 100).unwrap();
        let lambda = s.nontrivial_radius(CLASSIFY_TOL).unwrap();
        assert_relative_eq!(lambda, 2.0 / 3.0, epsilon = 1e-9);
        let bound = chung_diameter_bound(lambda, g.n()).unwrap();
        assert!(bound >= diameter(&g).unwrap() as usize);
        // The bound grows without bound as the gap closes.
        assert!(chung_diameter_bound(0.999, 100).unwrap() > chung_diameter_bound(0.5, 100).unwrap());
        for bad in [0.0, 1.0, 1.5, -0.3] {
            assert!(matches!(
                chung_diameter_bound(bad, 10),
                Err(Error::NoSpectralGap(_))
            ));
        }
    }

    #[test]
    fn chung_bound_dominates_diameter_on_the_presets() {
        // The bound needs the full mixing radius (second largest |lambda|
        // including a bipartite -1); bipartite presets therefore have no
        // gap and must be rejected rather than silently under-bounded.
        for name in ["complete_k4", "petersen", "cycle_6", "two_vertex_triple", "cycle_5"] {
            let g = preset_graph(name).unwrap();
            let s = eigenvalues(&g, 100).unwrap();
            let lambda = s.mixing_radius().unwrap();
            match chung_diameter_bound(lambda, g.n()) {
                Ok(bound) => {
                    assert!(
                        bound >= diameter(&g).unwrap() as usize,
                        "{name}: bound {bound} < diameter"
                    );
                }
                Err(Error::NoSpectralGap(l)) => {
                    assert!(is_bipartite(&g).is_some(), "{name}: unexpected gapless {l}");
                }
                Err(e) => panic!("{name}: {e}"),
            }
        }
    }
}
