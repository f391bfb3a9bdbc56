//! Regular multigraphs as rotation systems on half-edges.
//!
//! A graph on n vertices of degree d stores m = n*d half-edges. `origin[h]`
//! is the vertex carrying h and `partner` is an involution matching h with
//! the opposite half of the same edge. A fixed point of `partner` is a
//! *half-loop*: a single half-edge attached to its vertex, contributing 1 to
//! the degree and reversing onto itself in non-backtracking walks (these
//! arise at involution slots of Cayley graphs). A 2-cycle of `partner`
//! within one vertex is an ordinary (full) loop contributing 2.
//!
//! All constructors lay half-edges out contiguously (vertex v owns
//! `[v*d, (v+1)*d)`), but any valid `origin` is accepted on load.

use crate::error::{Error, Result};
use crate::groups::{
    mobius_act_entries, projective_line, GeneratorSet, GroupElement, PrimeModulus,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Provenance carried inside the graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub family: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
}

impl GraphMeta {
    pub fn new(family: &str, params: serde_json::Value) -> Self {
        GraphMeta { family: family.into(), params, seed: None }
    }
}

/// A (q+1)-regular multigraph with q = degree - 1 >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularMultigraph {
    n: usize,
    degree: usize,
    origin: Vec<u32>,
    partner: Vec<u32>,
    labels: Option<Vec<u32>>,
    meta: GraphMeta,
    /// Half-edges grouped by vertex: slice [v*degree, (v+1)*degree).
    at: Vec<u32>,
}

/// On-disk JSON shape (format version 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub n: usize,
    pub degree: usize,
    pub origin: Vec<u32>,
    pub partner: Vec<u32>,
    pub labels: Option<Vec<u32>>,
    pub meta: GraphMeta,
}

impl RegularMultigraph {
    /// Validates and indexes a rotation system.
    pub fn from_parts(
        n: usize,
        degree: usize,
        origin: Vec<u32>,
        partner: Vec<u32>,
        labels: Option<Vec<u32>>,
        meta: GraphMeta,
    ) -> Result<Self> {
        if n == 0 || degree < 2 {
            return Err(Error::BadGraph(format!("need n >= 1 and degree >= 2, got n={n}, degree={degree}")));
        }
        let m = n * degree;
        if origin.len() != m || partner.len() != m {
            return Err(Error::BadGraph(format!(
                "expected {m} half-edges, got origin={}, partner={}",
                origin.len(),
                partner.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != m {
                return Err(Error::BadGraph(format!("labels length {} != {m}", l.len())));
            }
        }
        for h in 0..m {
            if origin[h] as usize >= n {
                return Err(Error::BadGraph(format!("origin[{h}] = {} out of range", origin[h])));
            }
            let p = partner[h] as usize;
            if p >= m || partner[p] as usize != h {
                return Err(Error::BadGraph(format!("partner is not an involution at {h}")));
            }
        }
        // Bucket half-edges by vertex, checking exact regularity.
        let mut counts = vec![0usize; n];
        for &v in &origin {
            counts[v as usize] += 1;
        }
        if let Some(v) = counts.iter().position(|&c| c != degree) {
            return Err(Error::BadGraph(format!(
                "vertex {v} has {} half-edges, expected {degree}",
                counts[v]
            )));
        }
        let mut offsets = vec![0usize; n];
        let mut at = vec![0u32; m];
        for h in 0..m {
            let v = origin[h] as usize;
            at[v * degree + offsets[v]] = h as u32;
            offsets[v] += 1;
        }
        Ok(RegularMultigraph { n, degree, origin, partner, labels, meta, at })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Tree parameter q = degree - 1.
    pub fn q(&self) -> usize {
        self.degree - 1
    }

    /// Number of half-edges, n * degree.
    pub fn half_edges(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h] as usize
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h] as usize
    }

    /// Vertex reached by traversing h from its origin.
    pub fn head(&self, h: usize) -> usize {
        self.origin[self.partner[h] as usize] as usize
    }

    pub fn half_edges_at(&self, v: usize) -> &[u32] {
        &self.at[v * self.degree..(v + 1) * self.degree]
    }

    pub fn is_half_loop(&self, h: usize) -> bool {
        self.partner[h] as usize == h
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut GraphMeta {
        &mut self.meta
    }

    /// (half-loops, full loops) in the whole graph.
    pub fn loop_stats(&self) -> (usize, usize) {
        let mut half = 0;
        let mut full = 0;
        for h in 0..self.half_edges() {
            let p = self.partner[h] as usize;
            if p == h {
                half += 1;
            } else if self.origin[p] == self.origin[h] && h < p {
                full += 1;
            }
        }
        (half, full)
    }

    pub fn to_json(&self) -> GraphFile {
        GraphFile {
            version: 1,
            n: self.n,
            degree: self.degree,
            origin: self.origin.clone(),
            partner: self.partner.clone(),
            labels: self.labels.clone(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_json(f: GraphFile) -> Result<Self> {
        if f.version != 1 {
            return Err(Error::BadGraph(format!("unsupported format version {}", f.version)));
        }
        Self::from_parts(f.n, f.degree, f.origin, f.partner, f.labels, f.meta)
    }
}

/// BFS distances from one source; unreachable vertices hold `u32::MAX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceField {
    pub source: usize,
    pub dist: Vec<u32>,
}

impl DistanceField {
    /// Largest finite distance, or None if some vertex is unreachable.
    pub fn eccentricity(&self) -> Option<u32> {
        let max = *self.dist.iter().max().expect("nonempty");
        (max != u32::MAX).then_some(max)
    }
}

/// Breadth-first distances along edges (loops never shorten anything but
/// are traversed harmlessly).
pub fn bfs_distances(g: &RegularMultigraph, source: usize) -> DistanceField {
    let mut dist = vec![u32::MAX; g.n()];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &h in g.half_edges_at(v) {
            let w = g.head(h as usize);
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    DistanceField { source, dist }
}

/// Two-coloring of the vertices if one exists (per component), else None.
/// Any loop (half or full) makes the graph non-bipartite.
pub fn is_bipartite(g: &RegularMultigraph) -> Option<Vec<u8>> {
    let mut color = vec![u8::MAX; g.n()];
    for start in 0..g.n() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &h in g.half_edges_at(v) {
                let w = g.head(h as usize);
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// Exact diameter by BFS from every vertex (parallel); errors if the graph
/// is disconnected.
pub fn diameter(g: &RegularMultigraph) -> Result<u32> {
    let eccs: Vec<Option<u32>> =
        (0..g.n()).into_par_iter().map(|v| bfs_distances(g, v).eccentricity()).collect();
    let mut best = 0;
    for (v, e) in eccs.iter().enumerate() {
        match e {
            Some(x) => best = best.max(*x),
            None => return Err(Error::Disconnected(v)),
        }
    }
    Ok(best)
}

/// Cayley multigraph of a generator set over an explicitly enumerated
/// vertex group (the list fixes vertex indices; it must be closed under
/// left multiplication by the generators).
pub fn cayley_graph<M: GroupElement>(
    group: &[M],
    gens: &GeneratorSet<M>,
    family: &str,
) -> Result<RegularMultigraph> {
    let n = group.len();
    let d = gens.degree();
    let index: HashMap<&M, usize> = group.iter().enumerate().map(|(i, g)| (g, i)).collect();
    if index.len() != n {
        return Err(Error::BadGraph("vertex list contains duplicates".into()));
    }
    let mut origin = vec![0u32; n * d];
    let mut partner = vec![0u32; n * d];
    let mut labels = vec![0u32; n * d];
    for (v, g) in group.iter().enumerate() {
        for i in 0..d {
            let h = v * d + i;
            origin[h] = v as u32;
            labels[h] = i as u32;
            let w = *index
                .get(&gens.element(i).compose(g))
                .ok_or_else(|| Error::BadGraph("vertex set not closed under generators".into()))?;
            partner[h] = (w * d + gens.inverse_of(i)) as u32;
        }
    }
    let params = serde_json::json!({
        "t": gens.t(),
        "label": gens.label(),
        "n": n,
        "loop_convention": "involution generators contribute one self-paired half-edge per vertex",
    });
    RegularMultigraph::from_parts(n, d, origin, partner, Some(labels), GraphMeta::new(family, params))
}

/// Schreier multigraph of the projective-line action; vertex indices follow
/// [`projective_line`] order (infinity first). Generic over the matrix kind
/// — the action only sees the projective class of each generator.
pub fn schreier_graph<M: GroupElement>(gens: &GeneratorSet<M>) -> Result<RegularMultigraph> {
    let m = PrimeModulus::new(gens.t())?;
    let points = projective_line(m);
    let n = points.len();
    let d = gens.degree();
    let mut origin = vec![0u32; n * d];
    let mut partner = vec![0u32; n * d];
    let mut labels = vec![0u32; n * d];
    for (v, &p) in points.iter().enumerate() {
        for i in 0..d {
            let h = v * d + i;
            origin[h] = v as u32;
            labels[h] = i as u32;
            let w = mobius_act_entries(m, gens.element(i).entries(), p).index();
            partner[h] = (w * d + gens.inverse_of(i)) as u32;
        }
    }
    let params = serde_json::json!({
        "t": gens.t(),
        "label": gens.label(),
        "n": n,
        "loop_convention": "involution generators contribute one self-paired half-edge per vertex",
    });
    RegularMultigraph::from_parts(
        n,
        d,
        origin,
        partner,
        Some(labels),
        GraphMeta::new("schreier_p1", params),
    )
}

/// Configuration-model random regular multigraph: a uniform perfect
/// matching of the n*degree half-edge stubs (loops and parallel edges are
/// kept, matching the model). Requires n*degree even.
pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<RegularMultigraph> {
    if n * degree % 2 != 0 {
        return Err(Error::OddHalfEdges { n, degree });
    }
    let m = n * degree;
    let origin: Vec<u32> = (0..m).map(|h| (h / degree) as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<u32> = (0..m as u32).collect();
    stubs.shuffle(&mut rng);
    let mut partner = vec![0u32; m];
    for pair in stubs.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    let meta = GraphMeta {
        family: "random_regular".into(),
        params: serde_json::json!({ "n": n, "degree": degree }),
        seed: Some(seed),
    };
    RegularMultigraph::from_parts(n, degree, origin, partner, None, meta)
}

/// Small fixed graphs: `complete_k4`, `petersen`, `two_vertex_triple`, and
/// `cycle_<n>` for n >= 3.
pub fn preset_graph(name: &str) -> Result<RegularMultigraph> {
    let edges: Vec<(usize, usize)> = match name {
        "complete_k4" => vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        "petersen" => {
            let mut e = Vec::new();
            for i in 0..5 {
                e.push((i, (i + 1) % 5)); // outer cycle
                e.push((i, i + 5)); // spoke
                e.push((5 + i, 5 + (i + 2) % 5)); // inner pentagram
            }
            e
        }
        "two_vertex_triple" => vec![(0, 1), (0, 1), (0, 1)],
        _ => {
            let n: usize = name
                .strip_prefix("cycle_")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::UnknownPreset(name.into()))?;
            if n < 3 {
                return Err(Error::UnknownPreset(name.into()));
            }
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        }
    };
    let n = 1 + edges.iter().map(|&(a, b)| a.max(b)).max().unwrap();
    from_edge_list(n, &edges, name)
}

/// Builds a regular multigraph from an explicit edge list (each edge spends
/// one half-edge slot at both endpoints; a (v,v) entry is a full loop).
fn from_edge_list(n: usize, edges: &[(usize, usize)], family: &str) -> Result<RegularMultigraph> {
    if edges.len() * 2 % n != 0 {
        return Err(Error::BadGraph("edge list is not regular".into()));
    }
    let degree = edges.len() * 2 / n;
    let mut used = vec![0usize; n];
    let mut origin = vec![0u32; n * degree];
    let mut partner = vec![0u32; n * degree];
    let mut slot = |v: usize| -> Result<usize> {
        if used[v] >= degree {
            return Err(Error::BadGraph(format!("vertex {v} exceeds degree {degree}")));
        }
        let h = v * degree + used[v];
        used[v] += 1;
        Ok(h)
    };
    for &(a, b) in edges {
        let ha = slot(a)?;
        let hb = slot(b)?;
        origin[ha] = a as u32;
        origin[hb] = b as u32;
        partner[ha] = hb as u32;
        partner[hb] = ha as u32;
    }
    let meta = GraphMeta::new(family, serde_json::json!({ "n": n }));
    RegularMultigraph::from_parts(n, degree, origin, partner, None, meta)
}
