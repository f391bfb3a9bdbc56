//! Spectrum of the normalized adjacency operator and its p-value geometry.
//!
//! Eigenvalues of the normalized adjacency A of a (q+1)-regular multigraph
//! live in [-1, 1]. Each eigenvalue is parametrized as
//!
//! ```text
//!   lambda = (theta + q/theta) / (q+1),       |theta| in [sqrt(q), q],
//! ```
//!
//! and classified by its p-value: |lambda| <= 2 sqrt(q)/(q+1) is *tempered*
//! (p = 2, theta on the circle |theta| = sqrt(q)), and larger |lambda|
//! solves |lambda| = (q^(1/p) + q^(1-1/p))/(q+1) for a unique p in (2, inf],
//! i.e. |theta| = q^(1-1/p). We store inv_p = 1/p so the trivial eigenvalue
//! (|lambda| = 1, p = inf) is inv_p = 0.

use crate::error::{Error, Result};
use crate::graph::RegularMultigraph;
use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Default tolerance for classifying an eigenvalue at the tempered boundary.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Grid of p-values used by density reports; `inf` marks the trivial class.
pub const DEFAULT_P_GRID: [f64; 14] =
    [2.0, 2.01, 2.1, 2.25, 2.5, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0, 64.0, f64::INFINITY];

/// Eigenvalues of the normalized adjacency, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    n: usize,
    q: usize,
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps precomputed eigenvalues (sorted descending here).
    pub fn from_values(q: usize, mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("no NaN eigenvalues"));
        Spectrum { n: values.len(), q, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Annotates every eigenvalue with its p-value data.
    pub fn annotated(&self, tol: f64) -> Vec<PValue> {
        self.values
            .iter()
            .map(|&l| p_value(l, self.q, tol).expect("values already clamped"))
            .collect()
    }

    /// Trace of the k-th Hecke operator, from the spectral side.
    pub fn hecke_trace(&self, k: usize) -> f64 {
        self.values.iter().map(|&l| lambda_k_closed(l, self.q, k)).sum()
    }

    /// Largest nontrivial |lambda|, skipping eigenvalues equal to +-1
    /// within `tol` (e.g. the Perron eigenvalue and the bipartite mirror).
    pub fn nontrivial_radius(&self, tol: f64) -> Option<f64> {
        self.values
            .iter()
            .map(|l| l.abs())
            .filter(|a| *a < 1.0 - tol)
            .fold(None, |acc, a| Some(acc.map_or(a, |b: f64| b.max(a))))
    }

    /// Largest |lambda| over every eigenvalue except the Perron one — the
    /// radius that governs mixing and the spectral diameter bound. Equals
    /// 1 on bipartite or disconnected graphs (no gap), unlike
    /// [`Self::nontrivial_radius`], which also drops the bipartite -1.
    pub fn mixing_radius(&self) -> Option<f64> {
        self.values
            .iter()
            .skip(1)
            .map(|l| l.abs())
            .fold(None, |acc, a| Some(acc.map_or(a, |b: f64| b.max(a))))
    }
}

/// Dense symmetric eigensolve of the normalized adjacency (values only).
/// Gated by `dense_limit` because the cost is O(n^3) time, O(n^2) memory.
pub fn eigenvalues(g: &RegularMultigraph, dense_limit: usize) -> Result<Spectrum> {
    let n = g.n();
    if n > dense_limit {
        return Err(Error::DenseLimit { n, limit: dense_limit });
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let w = 1.0 / g.degree() as f64;
    for h in 0..g.half_edges() {
        a[(g.origin(h), g.head(h))] += w;
    }
    let mut values: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    for v in &mut values {
        if v.abs() > 1.0 + 1e-8 {
            return Err(Error::EigenvalueRange(*v));
        }
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(Spectrum::from_values(g.q(), values))
}

/// Which side of the spectrum theta lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaClass {
    /// Untempered with lambda > 0: theta real in [sqrt(q), q].
    RealPositive,
    /// Untempered with lambda < 0: theta real in [-q, -sqrt(q)].
    RealNegative,
    /// Tempered: theta complex of modulus sqrt(q).
    Complex,
}

/// p-value annotation of a single eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub lambda: f64,
    /// 1/p in [0, 1/2]; 0 encodes p = inf (the trivial class).
    pub inv_p: f64,
    /// |theta| in [sqrt(q), q].
    pub theta_abs: f64,
    pub class: ThetaClass,
}

/// Classifies one eigenvalue. `tol` widens the tempered interval and the
/// admissible range of lambda; |lambda| > 1 + tol is rejected.
///
/// For q = 1 the parametrization degenerates (every |lambda| <= 1 is
/// tempered); we classify |lambda| >= 1 - tol as trivial (inv_p = 0) and
/// the rest as tempered, which keeps density statements meaningful on
/// 2-regular graphs.
pub fn p_value(lambda: f64, q: usize, tol: f64) -> Result<PValue> {
    debug_assert!(q >= 1);
    if lambda.abs() > 1.0 + tol || !lambda.is_finite() {
        return Err(Error::EigenvalueRange(lambda));
    }
    let al = lambda.abs().min(1.0);
    let qf = q as f64;
    if q == 1 {
        return Ok(if al >= 1.0 - tol {
            let class = if lambda > 0.0 { ThetaClass::RealPositive } else { ThetaClass::RealNegative };
            PValue { lambda, inv_p: 0.0, theta_abs: 1.0, class }
        } else {
            PValue { lambda, inv_p: 0.5, theta_abs: 1.0, class: ThetaClass::Complex }
        });
    }
    let boundary = 2.0 * qf.sqrt() / (qf + 1.0);
    if al <= boundary + tol {
        return Ok(PValue { lambda, inv_p: 0.5, theta_abs: qf.sqrt(), class: ThetaClass::Complex });
    }
    // Invert lambda = (theta + q/theta)/(q+1) for the root with |theta| in
    // [sqrt(q), q]; inv_p = 1 - log_q |theta|.
    let s = (qf + 1.0) * al;
    let theta_abs = 0.5 * (s + (s * s - 4.0 * qf).sqrt());
    let inv_p = (1.0 - theta_abs.ln() / qf.ln()).clamp(0.0, 0.5);
    let class = if lambda > 0.0 { ThetaClass::RealPositive } else { ThetaClass::RealNegative };
    Ok(PValue { lambda, inv_p, theta_abs: theta_abs.min(qf), class })
}

/// The eigenvalue of the k-th Hecke operator at lambda, in closed form:
///
/// ```text
///   lambda^(k) = [ theta^k + (q/theta)^k
///                  + (1 - 1/q) * sum_{i=1}^{k-1} q^i theta^(k-2i) ]
///                / ((q+1) q^(k-1)),
/// ```
///
/// where theta solves theta^2 - (q+1) lambda theta + q = 0 (either root;
/// we take the one of larger modulus for stability). k = 0 gives 1.
pub fn lambda_k_closed(lambda: f64, q: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let qf = q as f64;
    let disc = Complex::new((qf + 1.0) * (qf + 1.0) * lambda * lambda - 4.0 * qf, 0.0);
    let root = disc.sqrt();
    let tl = Complex::new((qf + 1.0) * lambda, 0.0);
    let theta = if lambda >= 0.0 { (tl + root) / 2.0 } else { (tl - root) / 2.0 };
    let ki = k as i32;
    let mut tail = Complex::new(0.0, 0.0);
    for i in 1..ki {
        tail += qf.powi(i) * theta.powi(ki - 2 * i);
    }
    let val = theta.powi(ki) + (Complex::new(qf, 0.0) / theta).powi(ki) + (1.0 - 1.0 / qf) * tail;
    // Conjugate pairing makes the exact value real; roundoff residue scales
    // with the largest term, q^k.
    debug_assert!(val.im.abs() <= 1e-9 * qf.powi(ki), "imaginary residue {}", val.im);
    val.re / ((qf + 1.0) * qf.powi(ki - 1))
}

/// Same eigenvalue by the three-term recursion
/// `(q+1) lambda . lambda^(k) = q lambda^(k+1) + lambda^(k-1)`.
pub fn lambda_k_recursive(lambda: f64, q: usize, k: usize) -> f64 {
    let qf = q as f64;
    let (mut prev, mut cur) = (1.0, lambda);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = ((qf + 1.0) * lambda * cur - prev) / qf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Outcome of checking the decay bounds on lambda^(k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub value: f64,
    /// |lambda^(k)| <= (k+1) q^(-k/p), always applicable.
    pub upper: bool,
    /// q^(-k/p) <= |lambda^(k)|; applicable when p > 2 and (k even or
    /// lambda > 0).
    pub lower: Option<bool>,
    /// Even k positive, odd k carries sign(lambda); applicable when p > 2.
    pub sign: Option<bool>,
}

impl CorollaryCheck {
    pub fn holds(&self) -> bool {
        self.upper && self.lower.unwrap_or(true) && self.sign.unwrap_or(true)
    }
}

/// Verifies the two-sided decay bounds for one (lambda, k) pair.
pub fn corollary_bounds_check(lambda: f64, q: usize, k: usize) -> Result<CorollaryCheck> {
    let pv = p_value(lambda, q, CLASSIFY_TOL)?;
    let qf = q as f64;
    let value = lambda_k_closed(lambda, q, k);
    let scale = qf.powf(-(k as f64) * pv.inv_p);
    let slack = 1e-9;
    let upper = value.abs() <= (k as f64 + 1.0) * scale + slack;
    let untempered = pv.inv_p < 0.5 && q > 1;
    let lower = (untempered && (k % 2 == 0 || lambda > 0.0))
        .then(|| value.abs() >= scale * (1.0 - 1e-9) - slack);
    let sign = untempered.then(|| {
        if k % 2 == 0 {
            value > -slack
        } else {
            value.signum() == lambda.signum() || value.abs() <= slack
        }
    });
    Ok(CorollaryCheck { value, upper, lower, sign })
}

/// Cumulative eigenvalue counts over a p-grid: row (p, #{i : p_i >= p}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub rows: Vec<(f64, usize)>,
}

/// Counts eigenvalues with p-value at least p, for each grid entry
/// (`inf` counts the trivial class only). Monotone along the grid.
pub fn density_profile(s: &Spectrum, grid: &[f64], tol: f64) -> DensityProfile {
    profile_of(&s.annotated(tol), grid)
}

/// [`density_profile`] restricted to strictly positive eigenvalues.
pub fn positive_only_profile(s: &Spectrum, grid: &[f64], tol: f64) -> DensityProfile {
    let ann: Vec<PValue> =
        s.annotated(tol).into_iter().filter(|pv| pv.lambda > 0.0).collect();
    profile_of(&ann, grid)
}

fn profile_of(ann: &[PValue], grid: &[f64]) -> DensityProfile {
    let rows = grid
        .iter()
        .map(|&p| {
            let cut = if p.is_infinite() { 0.0 } else { 1.0 / p };
            (p, ann.iter().filter(|pv| pv.inv_p <= cut + 1e-12).count())
        })
        .collect();
    DensityProfile { rows }
}

/// The density partial sum `D_A = sum_i n^(-1 + A (1 - 2/p_i))`.
///
/// Under the Sarnak–Xue density property this stays bounded by ~n^eps; the
/// trivial eigenvalue alone contributes n^(A-1) (= 1 at A = 1).
pub fn partial_sum_statistic(s: &Spectrum, a: f64, tol: f64) -> f64 {
    let nf = s.n() as f64;
    s.annotated(tol)
        .iter()
        .map(|pv| nf.powf(-1.0 + a * (1.0 - 2.0 * pv.inv_p)))
        .sum()
}

/// CDF of the Kesten–McKay law for the *normalized* adjacency of a
/// (q+1)-regular graph: density sqrt(4q - (q+1)^2 x^2) / (2 pi (1 - x^2))
/// supported on |x| <= 2 sqrt(q)/(q+1). For q = 1 this is the arcsine law,
/// handled in closed form; otherwise Simpson quadrature (the integrand is
/// bounded).
pub fn kesten_mckay_cdf(q: usize, x: f64) -> f64 {
    let qf = q as f64;
    let b = 2.0 * qf.sqrt() / (qf + 1.0);
    if x <= -b {
        return 0.0;
    }
    if x >= b {
        return 1.0;
    }
    if q == 1 {
        return 0.5 + x.asin() / std::f64::consts::PI;
    }
    let density = |t: f64| {
        let s = 4.0 * qf - (qf + 1.0) * (qf + 1.0) * t * t;
        if s <= 0.0 {
            0.0
        } else {
            s.sqrt() / (2.0 * std::f64::consts::PI * (1.0 - t * t))
        }
    };
    // Simpson on [ -b, x ] with a fixed fine grid.
    let panels = 4000;
    let h = (x + b) / panels as f64;
    let mut acc = density(-b) + density(x);
    for i in 1..panels {
        let t = -b + h * i as f64;
        acc += density(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (acc * h / 3.0).clamp(0.0, 1.0)
}

/// Kolmogorov distance between the empirical spectral measure and the
/// Kesten–McKay law, evaluated at the jump points.
pub fn kesten_mckay_distance(s: &Spectrum) -> f64 {
    let n = s.n() as f64;
    let mut asc: Vec<f64> = s.values().to_vec();
    asc.reverse();
    let mut worst = 0.0f64;
    for (i, &l) in asc.iter().enumerate() {
        let f = kesten_mckay_cdf(s.q(), l);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst
}

/// Local-statistics diagnostics comparing a finite graph against the
/// (q+1)-regular tree: closed non-backtracking path mass per vertex,
/// tempered-bound violations, and Kolmogorov distance to Kesten–McKay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsReport {
    /// (k, P(X,k)/n) from the spectral side, k = 1..=k_max.
    pub path_ratio: Vec<(usize, f64)>,
    /// Fraction of nontrivial eigenvalues with |lambda| above
    /// (1 + eps) * 2 sqrt(q)/(q+1).
    pub above_tempered: f64,
    /// Kolmogorov distance to the Kesten–McKay law.
    pub km_distance: f64,
}

/// Benjamini–Schramm-style diagnostics of `s` (eps widens the tempered
/// threshold; k_max bounds the path-mass rows).
pub fn bs_diagnostics(s: &Spectrum, eps: f64, k_max: usize) -> BsReport {
    let qf = s.q() as f64;
    let n = s.n() as f64;
    let path_ratio = (1..=k_max)
        .map(|k| {
            let tr = s.hecke_trace(k);
            (k, (qf + 1.0) * qf.powi(k as i32 - 1) * tr / n)
        })
        .collect();
    let cut = (1.0 + eps) * 2.0 * qf.sqrt() / (qf + 1.0);
    let above = s
        .values()
        .iter()
        .filter(|l| l.abs() < 1.0 - CLASSIFY_TOL && l.abs() > cut)
        .count();
    BsReport { path_ratio, above_tempered: above as f64 / n, km_distance: kesten_mckay_distance(s) }
}
