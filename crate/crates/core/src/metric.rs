//! Discretized metric graph over cuff sample points with certified distance
//! brackets.
//!
//! Nodes are evenly spaced samples on every cuff side of every pants. Arcs
//! come in three kinds, each the length of a realized path on the surface:
//! along-cuff steps, intra-pants chords (unfolding upper bounds), and gluing
//! hops across an edge with the twist offset. Shortest paths are therefore
//! true upper bounds; lower bounds subtract the sampling slack `2*h` per
//! pants crossing on the witness path.
//!
//! The builder is incremental: pants, cuff sample blocks and gluings can be
//! appended while a resumable shortest-path pass keeps distances current.
//! Cuffs whose length is still undetermined (unpaired boundaries during an
//! exploration) carry no nodes; their pants use a placeholder length at the
//! top of the law support, which keeps every stored arc a valid upper bound
//! for any completion.

use crate::error::{Error, Result};
use crate::pants::{enumerate_unfoldings, PantsChart, PantsShape, Sheet, Unfolding};
use crate::hyperbolic::HPoint;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub type PantsId = usize;
pub type NodeId = u32;

/// A cuff sample: pants, slot `0..3`, sample index `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricNode {
    pub pants: PantsId,
    pub slot: u8,
    pub k: u16,
}

#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub to: NodeId,
    pub weight: f64,
    /// Gluing arcs cross between pants; they are what `hops` counts.
    pub glue: bool,
}

/// Certified distance bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub upper: f64,
    pub lower: f64,
    /// Pants crossings (gluing arcs) on the witness path.
    pub hops: u32,
}

impl DistanceResult {
    fn from_upper(upper: f64, hops: u32, h: f64) -> Self {
        DistanceResult {
            upper,
            lower: (upper - 2.0 * h * hops as f64).max(0.0),
            hops,
        }
    }
}

#[derive(Debug, Clone)]
struct PantsEntry {
    half_lengths: [f64; 3],
    resolved: [bool; 3],
    /// Base node id of the m-sample block per slot, once materialized.
    slot_base: [Option<NodeId>; 3],
    /// Pairs (as local sample indices) already connected by intra arcs for
    /// the current shape version.
    intra_version: u32,
}

/// Incremental metric-graph builder plus resumable multi-source shortest
/// paths.
pub struct MetricBuilder {
    m: usize,
    word_cap: usize,
    /// Sampling pitch certified against: `max cuff length / m` over the law
    /// support (or realized cuffs for static builds).
    h: f64,
    /// Placeholder half-length for unresolved cuffs: top of the law support.
    placeholder: f64,
    nodes: Vec<MetricNode>,
    adj: Vec<Vec<Arc>>,
    pants: Vec<PantsEntry>,
    node_budget: usize,
    // Resumable shortest-path state.
    dist: Vec<f64>,
    hops: Vec<u32>,
    heap: BinaryHeap<HeapEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    hops: u32,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, hops, node id); ties broken by id so witness
        // paths are deterministic.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub const DEFAULT_NODE_BUDGET: usize = 3_000_000;

impl MetricBuilder {
    /// `h_pitch` is the certified sampling pitch (max admissible cuff length
    /// divided by `m`); `placeholder_half_length` is used for cuffs whose
    /// length is not yet drawn.
    pub fn new(m: usize, word_cap: usize, h_pitch: f64, placeholder_half_length: f64) -> Result<Self> {
        if m < 4 {
            return Err(Error::invalid(format!("m must be at least 4, got {m}")));
        }
        if word_cap < 1 {
            return Err(Error::invalid("word_cap must be at least 1".to_string()));
        }
        Ok(MetricBuilder {
            m,
            word_cap,
            h: h_pitch,
            placeholder: placeholder_half_length,
            nodes: Vec::new(),
            adj: Vec::new(),
            pants: Vec::new(),
            node_budget: DEFAULT_NODE_BUDGET,
            dist: Vec::new(),
            hops: Vec::new(),
            heap: BinaryHeap::new(),
        })
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_pants(&self) -> usize {
        self.pants.len()
    }

    pub fn node(&self, id: NodeId) -> MetricNode {
        self.nodes[id as usize]
    }

    /// Appends a pants with all cuff lengths unresolved.
    pub fn add_pants(&mut self) -> PantsId {
        self.pants.push(PantsEntry {
            half_lengths: [self.placeholder; 3],
            resolved: [false; 3],
            slot_base: [None; 3],
            intra_version: 0,
        });
        self.pants.len() - 1
    }

    /// Appends a pants with a fully known shape.
    pub fn add_pants_shaped(&mut self, shape: &PantsShape<f64>) -> PantsId {
        self.pants.push(PantsEntry {
            half_lengths: shape.half_lengths(),
            resolved: [true; 3],
            slot_base: [None; 3],
            intra_version: 0,
        });
        self.pants.len() - 1
    }

    fn current_shape(&self, p: PantsId) -> Result<PantsShape<f64>> {
        let e = &self.pants[p];
        PantsShape::new(e.half_lengths[0], e.half_lengths[1], e.half_lengths[2])
    }

    pub fn half_length(&self, p: PantsId, slot: u8) -> f64 {
        self.pants[p].half_lengths[slot as usize]
    }

    pub fn slot_nodes(&self, p: PantsId, slot: u8) -> Option<(NodeId, usize)> {
        self.pants[p].slot_base[slot as usize].map(|b| (b, self.m))
    }

    /// Sets a cuff length (full boundary length) and creates its sample
    /// block. Refreshes the pants' intra arcs; a shape change (the length
    /// was unresolved before) re-touches every pair, otherwise only pairs
    /// meeting the new block.
    pub fn materialize_cuff(&mut self, p: PantsId, slot: u8, length: f64) -> Result<NodeId> {
        if self.pants[p].slot_base[slot as usize].is_some() {
            return Err(Error::invalid(format!(
                "cuff ({p}, {slot}) already materialized"
            )));
        }
        if self.nodes.len() + self.m > self.node_budget {
            return Err(Error::Resource {
                context: format!("metric node budget {} exceeded", self.node_budget),
                best_bound: None,
            });
        }
        let was_resolved = self.pants[p].resolved[slot as usize];
        let shape_changed =
            !was_resolved || self.pants[p].half_lengths[slot as usize] != length / 2.0;
        self.pants[p].half_lengths[slot as usize] = length / 2.0;
        self.pants[p].resolved[slot as usize] = true;
        let base = self.nodes.len() as NodeId;
        for k in 0..self.m {
            self.nodes.push(MetricNode {
                pants: p,
                slot,
                k: k as u16,
            });
            self.adj.push(Vec::new());
            self.dist.push(f64::INFINITY);
            self.hops.push(0);
        }
        self.pants[p].slot_base[slot as usize] = Some(base);
        // Along-cuff ring.
        let spacing = length / self.m as f64;
        for k in 0..self.m {
            let a = base + k as NodeId;
            let b = base + ((k + 1) % self.m) as NodeId;
            self.push_arc(a, b, spacing, false);
            self.push_arc(b, a, spacing, false);
        }
        self.refresh_intra(p, Some(base), shape_changed)?;
        Ok(base)
    }

    fn push_arc(&mut self, from: NodeId, to: NodeId, weight: f64, glue: bool) {
        self.adj[from as usize].push(Arc { to, weight, glue });
        // Keep the relaxation frontier alive across insertions.
        let d = self.dist[from as usize];
        if d.is_finite() {
            self.heap.push(HeapEntry {
                dist: d,
                hops: self.hops[from as usize],
                node: from,
            });
        }
    }

    /// Appends intra-pants chord arcs among materialized samples of `p` for
    /// the current shape. With `full` set every pair is re-touched (the
    /// shape changed, so tighter weights may exist); otherwise only pairs
    /// meeting the `new_block`. Stale arcs from previous shape versions stay
    /// in place: they were computed with placeholder lengths at the top of
    /// the support and remain valid upper bounds.
    fn refresh_intra(&mut self, p: PantsId, new_block: Option<NodeId>, full: bool) -> Result<()> {
        let shape = self.current_shape(p)?;
        let chart = PantsChart::new(shape)?;
        let unfoldings = enumerate_word_list(&chart, self.word_cap)?;
        let mut points: Vec<(NodeId, HPoint<f64>, Sheet)> = Vec::new();
        for slot in 0..3u8 {
            if let Some(base) = self.pants[p].slot_base[slot as usize] {
                let len = 2.0 * self.pants[p].half_lengths[slot as usize];
                let spacing = len / self.m as f64;
                for k in 0..self.m {
                    let bp =
                        crate::pants::BoundaryPoint::new((slot + 1) as usize, k as f64 * spacing)?;
                    let (pt, sheet) = chart.lift(&bp);
                    points.push((base + k as NodeId, pt, sheet));
                }
            }
        }
        let in_new = |id: NodeId| {
            new_block.is_some_and(|b| id >= b && (id as usize) < b as usize + self.m)
        };
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let (ni, pi, si) = &points[i];
                let (nj, pj, sj) = &points[j];
                if !full && !in_new(*ni) && !in_new(*nj) {
                    continue;
                }
                let parity = u8::from(si != sj);
                if let Some(w) = min_lift_distance(&unfoldings, pi, pj, parity) {
                    self.adj[*ni as usize].push(Arc {
                        to: *nj,
                        weight: w,
                        glue: false,
                    });
                    self.adj[*nj as usize].push(Arc {
                        to: *ni,
                        weight: w,
                        glue: false,
                    });
                    for &n in &[*ni, *nj] {
                        let d = self.dist[n as usize];
                        if d.is_finite() {
                            self.heap.push(HeapEntry {
                                dist: d,
                                hops: self.hops[n as usize],
                                node: n,
                            });
                        }
                    }
                }
            }
        }
        self.pants[p].intra_version += 1;
        Ok(())
    }

    /// Glues cuff `(pa, sa)` (the "+" side) to `(pb, sb)` (the "-" side)
    /// with the given boundary length and arc-length twist: a point at
    /// parameter `t` on the "+" side is the point at `t - arc_twist` on the
    /// "-" side. Materializes both sample blocks.
    pub fn add_gluing(
        &mut self,
        pa: PantsId,
        sa: u8,
        pb: PantsId,
        sb: u8,
        length: f64,
        arc_twist: f64,
    ) -> Result<()> {
        let base_a = match self.pants[pa].slot_base[sa as usize] {
            Some(b) => b,
            None => self.materialize_cuff(pa, sa, length)?,
        };
        let base_b = match self.pants[pb].slot_base[sb as usize] {
            Some(b) => b,
            None => self.materialize_cuff(pb, sb, length)?,
        };
        let spacing = length / self.m as f64;
        for k in 0..self.m {
            let t = k as f64 * spacing;
            let t_partner = (t - arc_twist).rem_euclid(length);
            let j0 = (t_partner / spacing).floor() as usize % self.m;
            let j1 = (j0 + 1) % self.m;
            let w0 = t_partner - (j0 as f64) * spacing;
            let w1 = ((j0 + 1) as f64) * spacing - t_partner;
            let a = base_a + k as NodeId;
            self.push_arc(a, base_b + j0 as NodeId, w0.max(0.0), true);
            self.push_arc(base_b + j0 as NodeId, a, w0.max(0.0), true);
            self.push_arc(a, base_b + j1 as NodeId, w1.max(0.0), true);
            self.push_arc(base_b + j1 as NodeId, a, w1.max(0.0), true);
        }
        Ok(())
    }

    /// Marks a node as a source at distance zero.
    pub fn add_source(&mut self, node: NodeId) {
        self.add_source_with_offset(node, 0.0);
    }

    /// Seeds a node at a given initial distance; used when the true source
    /// is an off-graph point whose distances to a few nodes are known.
    pub fn add_source_with_offset(&mut self, node: NodeId, offset: f64) {
        if self.dist[node as usize] > offset {
            self.dist[node as usize] = offset;
            self.hops[node as usize] = 0;
            self.heap.push(HeapEntry {
                dist: offset,
                hops: 0,
                node,
            });
        }
    }

    /// Runs the label-correcting pass to quiescence. Distances are exact for
    /// the current graph afterwards; safe to call repeatedly as arcs and
    /// sources are appended.
    pub fn run(&mut self) {
        while let Some(HeapEntry { dist, hops, node }) = self.heap.pop() {
            let n = node as usize;
            if dist > self.dist[n] {
                continue;
            }
            // Stale hops entries for the same distance are harmless: arcs
            // relax on distance alone.
            let hops = if dist == self.dist[n] { self.hops[n].min(hops) } else { hops };
            for idx in 0..self.adj[n].len() {
                let arc = self.adj[n][idx];
                let nd = dist + arc.weight;
                let nh = hops + u32::from(arc.glue);
                let t = arc.to as usize;
                if nd < self.dist[t] - 1e-15 || (nd <= self.dist[t] && nh < self.hops[t]) {
                    self.dist[t] = nd;
                    self.hops[t] = nh;
                    self.heap.push(HeapEntry {
                        dist: nd,
                        hops: nh,
                        node: arc.to,
                    });
                }
            }
        }
    }

    pub fn dist_of(&self, node: NodeId) -> f64 {
        self.dist[node as usize]
    }

    /// Largest finite distance over all materialized nodes.
    pub fn max_finite_dist(&self) -> f64 {
        self.dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn result_of(&self, node: NodeId) -> Option<DistanceResult> {
        let d = self.dist[node as usize];
        if d.is_finite() {
            Some(DistanceResult::from_upper(d, self.hops[node as usize], self.h))
        } else {
            None
        }
    }

    /// Minimum distance over a cuff's samples: distance to the boundary
    /// circle as a set. Also reports the argmin sample index.
    pub fn cuff_entry(&self, p: PantsId, slot: u8) -> Option<(DistanceResult, u16)> {
        let base = self.pants[p].slot_base[slot as usize]?;
        let mut best: Option<(DistanceResult, u16)> = None;
        for k in 0..self.m {
            if let Some(r) = self.result_of(base + k as NodeId) {
                if best.is_none() || r.upper < best.as_ref().unwrap().0.upper {
                    best = Some((r, k as u16));
                }
            }
        }
        best
    }

    /// Freezes into an immutable graph (for whole-surface queries).
    pub fn freeze(self) -> MetricGraph {
        MetricGraph {
            m: self.m,
            h: self.h,
            nodes: self.nodes,
            adj: self.adj,
        }
    }

    /// Conservative distance from an already-distanced sample to an
    /// unmaterialized cuff of the same pants: entry distance plus an
    /// intra-pants bound to the cuff set, with the target cuff length pinned
    /// at `target_half_length` and other unresolved cuffs at the support
    /// top. Used for frontier values of unpaired boundaries.
    pub fn wall_distance(
        &self,
        p: PantsId,
        target_slot: u8,
        target_half_length: f64,
        probes: usize,
    ) -> Result<Option<f64>> {
        if self.pants[p].slot_base[target_slot as usize].is_some() {
            return Err(Error::invalid(
                "wall_distance target must be unmaterialized".to_string(),
            ));
        }
        let mut halves = self.pants[p].half_lengths;
        halves[target_slot as usize] = target_half_length;
        let shape = PantsShape::new(halves[0], halves[1], halves[2])?;
        let chart = PantsChart::new(shape)?;
        let unfoldings = enumerate_word_list(&chart, self.word_cap)?;
        let target_len = 2.0 * target_half_length;
        let mut target_pts = Vec::with_capacity(probes);
        for k in 0..probes {
            let bp = crate::pants::BoundaryPoint::new(
                (target_slot + 1) as usize,
                k as f64 / probes as f64 * target_len,
            )?;
            target_pts.push(chart.lift(&bp));
        }
        let mut best = f64::INFINITY;
        for slot in 0..3u8 {
            if slot == target_slot {
                continue;
            }
            let Some(base) = self.pants[p].slot_base[slot as usize] else {
                continue;
            };
            let len = 2.0 * self.pants[p].half_lengths[slot as usize];
            let spacing = len / self.m as f64;
            for k in 0..self.m {
                let d0 = self.dist[(base + k as NodeId) as usize];
                if !d0.is_finite() || d0 >= best {
                    continue;
                }
                let bp = crate::pants::BoundaryPoint::new((slot + 1) as usize, k as f64 * spacing)?;
                let (pt, sheet) = chart.lift(&bp);
                for (tp, ts) in &target_pts {
                    let parity = u8::from(sheet != *ts);
                    if let Some(w) = min_lift_distance(&unfoldings, &pt, tp, parity) {
                        if d0 + w < best {
                            best = d0 + w;
                        }
                    }
                }
            }
        }
        Ok(best.is_finite().then_some(best))
    }
}

/// Shared unfolding enumeration for intra-pants chords: word cap plus the
/// distance-based prune against the pants' own diameter cap.
fn enumerate_word_list(chart: &PantsChart<f64>, word_cap: usize) -> Result<Vec<Unfolding<f64>>> {
    match enumerate_unfoldings(chart, word_cap, chart.distance_cap(), 300_000) {
        Ok(u) => Ok(u),
        Err(Error::Resource { .. }) => {
            // Fall back to a shallower cap; arcs stay valid upper bounds.
            let mut cap = word_cap.saturating_sub(1);
            loop {
                match enumerate_unfoldings(chart, cap, chart.distance_cap(), 300_000) {
                    Ok(u) => return Ok(u),
                    Err(_) if cap > 1 => cap -= 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Err(e) => Err(e),
    }
}

fn min_lift_distance(
    unfoldings: &[Unfolding<f64>],
    a: &HPoint<f64>,
    b: &HPoint<f64>,
    parity: u8,
) -> Option<f64> {
    let mut best = f64::INFINITY;
    for u in unfoldings {
        if u.parity() != parity {
            continue;
        }
        let c = a.cosh_distance_to(&u.iso.apply(b));
        if c < best {
            best = c;
        }
    }
    use crate::scalar::Real;
    best.is_finite().then(|| best.acosh_clamped())
}

/// Immutable metric graph for whole-surface queries.
pub struct MetricGraph {
    m: usize,
    h: f64,
    nodes: Vec<MetricNode>,
    adj: Vec<Vec<Arc>>,
}

impl MetricGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> MetricNode {
        self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[MetricNode] {
        &self.nodes
    }

    /// Multi-source shortest paths; returns per-node brackets (`None` for
    /// unreachable nodes).
    pub fn distances(&self, sources: &[NodeId]) -> Result<Vec<Option<DistanceResult>>> {
        if sources.is_empty() {
            return Err(Error::invalid("need at least one source".to_string()));
        }
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut hops = vec![0u32; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s as usize] = 0.0;
            heap.push(HeapEntry {
                dist: 0.0,
                hops: 0,
                node: s,
            });
        }
        while let Some(HeapEntry { dist: d, hops: hp, node }) = heap.pop() {
            let u = node as usize;
            if d > dist[u] {
                continue;
            }
            let hp = if d == dist[u] { hops[u].min(hp) } else { hp };
            for arc in &self.adj[u] {
                let nd = d + arc.weight;
                let nh = hp + u32::from(arc.glue);
                let t = arc.to as usize;
                if nd < dist[t] - 1e-15 || (nd <= dist[t] && nh < hops[t]) {
                    dist[t] = nd;
                    hops[t] = nh;
                    heap.push(HeapEntry {
                        dist: nd,
                        hops: nh,
                        node: arc.to,
                    });
                }
            }
        }
        Ok(dist
            .into_iter()
            .zip(hops)
            .map(|(d, hp)| d.is_finite().then(|| DistanceResult::from_upper(d, hp, self.h)))
            .collect())
    }

    /// Shortest-path bracket from a source set to a target set.
    pub fn distance(&self, sources: &[NodeId], targets: &[NodeId]) -> Result<Option<DistanceResult>> {
        let all = self.distances(sources)?;
        let mut best: Option<DistanceResult> = None;
        for &t in targets {
            if let Some(r) = all[t as usize] {
                if best.is_none() || r.upper < best.unwrap().upper {
                    best = Some(r);
                }
            }
        }
        Ok(best)
    }

    /// Max-over-pairs diameter bracket via all-sources sweeps.
    pub fn diameter_estimate(&self) -> Result<(f64, f64)> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::invalid("empty metric graph".to_string()));
        }
        let mut max_upper: f64 = 0.0;
        let mut max_lower: f64 = 0.0;
        for s in 0..n as NodeId {
            let res = self.distances(&[s])?;
            for r in res.iter() {
                match r {
                    Some(r) => {
                        max_upper = max_upper.max(r.upper);
                        max_lower = max_lower.max(r.lower);
                    }
                    None => {
                        return Err(Error::Disconnected(
                            "metric graph is disconnected; filter components before calling"
                                .to_string(),
                        ))
                    }
                }
            }
        }
        Ok((max_lower, max_upper))
    }

    /// Text edge list `(pants slot k) (pants slot k) weight` for external
    /// verification.
    pub fn dump_edges(&self) -> String {
        let mut out = String::new();
        for (u, arcs) in self.adj.iter().enumerate() {
            let nu = self.nodes[u];
            for a in arcs {
                if (a.to as usize) < u {
                    continue;
                }
                let nv = self.nodes[a.to as usize];
                out.push_str(&format!(
                    "{} {} {} {} {} {} {:.12e}\n",
                    nu.pants, nu.slot, nu.k, nv.pants, nv.slot, nv.k, a.weight
                ));
            }
        }
        out
    }
}

/// Builds the static metric graph of a whole weighted surface.
pub fn build_surface_metric(
    graph: &crate::surface::WeightedSurfaceGraph,
    m: usize,
    word_cap: usize,
) -> Result<MetricGraph> {
    let max_len = graph
        .weights
        .iter()
        .map(|w| w.length)
        .fold(0.0f64, f64::max);
    let (_, l_plus) = graph.law.half_length_support();
    let placeholder = l_plus.max(max_len / 2.0);
    let mut b = MetricBuilder::new(m, word_cap, max_len / m as f64, placeholder)?;
    for _ in 0..graph.pairing.n_vertices() {
        b.add_pants();
    }
    for (e, &(ha, hb)) in graph.pairing.pairs().iter().enumerate() {
        let w = graph.weights[e];
        b.add_gluing(
            crate::surface::vertex_of(ha) as PantsId,
            crate::surface::slot_of(ha),
            crate::surface::vertex_of(hb) as PantsId,
            crate::surface::slot_of(hb),
            w.length,
            w.arc_twist(),
        )?;
    }
    Ok(b.freeze())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pants::{seam_length, PantsShape};
    use crate::rng::{LengthLaw, TwistLaw, WeightLaw};
    use crate::surface::sample_surface;

    fn single_pants_graph(l: f64, m: usize) -> MetricGraph {
        let shape = PantsShape::new(l, l, l).unwrap();
        let mut b = MetricBuilder::new(m, 8, 2.0 * l / m as f64, l).unwrap();
        let p = b.add_pants_shaped(&shape);
        for slot in 0..3u8 {
            b.materialize_cuff(p, slot, 2.0 * l).unwrap();
        }
        b.freeze()
    }

    #[test]
    fn single_pants_foot_distances_match_seams() {
        let l = 1.0;
        let m = 16;
        let g = single_pants_graph(l, m);
        let h = g.pitch();
        let shape = PantsShape::new(l, l, l).unwrap();
        // Node (p0, slot0, k=0) is the foot of the seam between cuffs 1 and
        // 2; (p0, slot1, k=0) is its foot on cuff 2.
        let res = g.distance(&[0], &[m as NodeId]).unwrap().unwrap();
        let seam = seam_length(&shape, 1, 2).unwrap();
        assert!((res.upper - seam).abs() <= 2.0 * h, "upper {} vs seam {seam}", res.upper);
        assert!(res.lower <= seam + 1e-12);
    }

    #[test]
    fn source_equals_target_is_zero() {
        let g = single_pants_graph(1.0, 8);
        let r = g.distance(&[3], &[3]).unwrap().unwrap();
        assert_eq!(r, DistanceResult { upper: 0.0, lower: 0.0, hops: 0 });
    }

    #[test]
    fn distances_symmetric_and_triangular() {
        let law = WeightLaw {
            length: LengthLaw::Uniform(1.5, 3.0),
            twist: TwistLaw::UniformCircle,
        };
        let surf = sample_surface(2, &law, 11).unwrap();
        let g = build_surface_metric(&surf, 8, 8).unwrap();
        let n = g.n_nodes() as NodeId;
        let picks = [0, n / 3, 2 * n / 5, n - 1];
        for &a in &picks {
            for &b in &picks {
                let dab = g.distance(&[a], &[b]).unwrap().unwrap().upper;
                let dba = g.distance(&[b], &[a]).unwrap().unwrap().upper;
                assert!((dab - dba).abs() < 1e-9);
                for &c in &picks {
                    let dac = g.distance(&[a], &[c]).unwrap().unwrap().upper;
                    let dcb = g.distance(&[c], &[b]).unwrap().unwrap().upper;
                    assert!(dab <= dac + dcb + 1e-9);
                }
            }
        }
    }

    #[test]
    fn parallel_gluing_distance_below_diameter_cap() {
        // Two pants glued along three parallel edges (genus 2).
        let law = WeightLaw {
            length: LengthLaw::PointMass(2.0),
            twist: TwistLaw::UniformCircle,
        };
        let pairing = crate::surface::Pairing::from_pairs(
            2,
            vec![(0, 3), (1, 4), (2, 5)],
        )
        .unwrap();
        let surf = crate::surface::assign_weights(
            &pairing,
            &law,
            &mut crate::rng::stream_indexed(5, crate::rng::Domain::Weights, 0),
            5,
        )
        .unwrap();
        let g = build_surface_metric(&surf, 8, 8).unwrap();
        let bounds = crate::pants::pants_bounds(1.0, 1.0).unwrap();
        // Distance from any pants-0 sample to pants-1 samples is below the
        // single-pants diameter cap.
        let sources: Vec<NodeId> = (0..8).collect();
        let targets: Vec<NodeId> = (3 * 8..4 * 8).collect();
        let r = g.distance(&sources, &targets).unwrap().unwrap();
        assert!(r.upper <= bounds.delta_cap);
    }

    #[test]
    fn refinement_never_increases_uppers() {
        let law = WeightLaw {
            length: LengthLaw::Uniform(1.0, 2.5),
            twist: TwistLaw::UniformCircle,
        };
        for seed in 0..5u64 {
            let surf = sample_surface(2, &law, seed).unwrap();
            let coarse = build_surface_metric(&surf, 6, 8).unwrap();
            let fine = build_surface_metric(&surf, 12, 8).unwrap();
            // Coarse node (p, s, k) coincides with fine node (p, s, 2k).
            let to_fine = |id: NodeId| -> NodeId {
                let node = coarse.node(id);
                fine.nodes()
                    .iter()
                    .position(|n| {
                        n.pants == node.pants && n.slot == node.slot && n.k == node.k * 2
                    })
                    .unwrap() as NodeId
            };
            let n = coarse.n_nodes() as NodeId;
            let picks = [0, n / 4, n / 2, n - 2];
            for &a in &picks {
                for &b in &picks {
                    let dc = coarse.distance(&[a], &[b]).unwrap().unwrap();
                    let df = fine
                        .distance(&[to_fine(a)], &[to_fine(b)])
                        .unwrap()
                        .unwrap();
                    assert!(
                        df.upper <= dc.upper + 1e-9,
                        "refinement must not increase uppers: {} -> {}",
                        dc.upper,
                        df.upper
                    );
                    // The fine witness path shadows into the coarse graph at
                    // a cost of 2*h_c per crossing, so the coarse upper can
                    // exceed the fine one by at most that much.
                    assert!(
                        dc.upper <= df.upper + 2.0 * coarse.pitch() * df.hops as f64 + 1e-9,
                        "coarse {} fine {} (fine hops {})",
                        dc.upper,
                        df.upper,
                        df.hops
                    );
                }
            }
        }
    }

    #[test]
    fn diameter_bracket_on_single_pants() {
        let g = single_pants_graph(1.0, 16);
        let (lo, hi) = g.diameter_estimate().unwrap();
        let bounds = crate::pants::pants_bounds(1.0, 1.0).unwrap();
        assert!(lo <= hi);
        assert!(hi <= bounds.delta_cap + 2.0 * g.pitch());
        let mx = 1.0f64.max(bounds.delta_plus);
        // Sphere packing puts the diameter above max(l, delta_l).
        assert!(hi + 2.0 * g.pitch() >= mx);
    }

    #[test]
    fn diameter_errors_on_disconnected() {
        // Two pants, each with a loop... impossible at degree 3; instead two
        // separate single-pants blocks in one builder.
        let shape = PantsShape::new(1.0, 1.0, 1.0).unwrap();
        let mut b = MetricBuilder::new(8, 8, 0.25, 1.0).unwrap();
        for _ in 0..2 {
            let p = b.add_pants_shaped(&shape);
            for slot in 0..3u8 {
                b.materialize_cuff(p, slot, 2.0).unwrap();
            }
        }
        let g = b.freeze();
        assert!(matches!(
            g.diameter_estimate(),
            Err(Error::Disconnected(_))
        ));
    }

    #[test]
    fn incremental_matches_static_distances() {
        let law = WeightLaw {
            length: LengthLaw::PointMass(2.0),
            twist: TwistLaw::UniformCircle,
        };
        let surf = sample_surface(3, &law, 21).unwrap();
        let static_g = build_surface_metric(&surf, 8, 8).unwrap();
        let static_d = static_g.distances(&[0]).unwrap();

        // Same surface built through the incremental path with run() calls
        // interleaved after every gluing.
        let max_len = 2.0;
        let mut b = MetricBuilder::new(8, 8, max_len / 8.0, 1.0).unwrap();
        for _ in 0..surf.pairing.n_vertices() {
            b.add_pants();
        }
        let mut first = true;
        for (e, &(ha, hb)) in surf.pairing.pairs().iter().enumerate() {
            let w = surf.weights[e];
            b.add_gluing(
                crate::surface::vertex_of(ha) as PantsId,
                crate::surface::slot_of(ha),
                crate::surface::vertex_of(hb) as PantsId,
                crate::surface::slot_of(hb),
                w.length,
                w.arc_twist(),
            )
            .unwrap();
            if first {
                b.add_source(0);
                first = false;
            }
            b.run();
        }
        for id in 0..static_g.n_nodes() {
            let su = static_d[id].unwrap().upper;
            let iu = b.dist_of(id as NodeId);
            assert!(
                (su - iu).abs() < 1e-9,
                "node {id}: static {su} vs incremental {iu}"
            );
        }
    }
}
