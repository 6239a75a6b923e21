//! Distance-driven exploration of a configuration-model surface.
//!
//! Starting from a root pants, the exploration repeatedly selects an
//! unpaired boundary with the smallest frontier distance and reveals its
//! pairing. It runs against a pre-sampled uniform pairing, which has the
//! same law as pairing on the fly: conditioned on the history, the partner
//! of the selected half-edge is uniform over the remaining unpaired ones.
//! Weights are revealed only at pairing time, so the selection rule is a
//! function of discovered data alone.
//!
//! Frontier distances are the partial-surface wall metric: unpaired cuffs
//! carry sample nodes but no gluing arcs, so paths cannot cross them; this
//! realizes the maximum over all completions of the discovered surface.
//! With a point-mass length law the wall cuffs have their true length; for
//! spread laws they are pinned at the top of the support, which keeps every
//! stored arc an upper bound for the realized surface.

use crate::error::{Error, Result};
use crate::metric::{DistanceResult, MetricBuilder, NodeId, PantsId};
use crate::pants::pants_bounds;
use crate::rng::{self, WeightLaw};
use crate::surface::{
    half_edge, sample_surface, slot_of, vertex_of, EdgeWeight, WeightedSurfaceGraph,
};
use rayon::prelude::*;

/// When to stop a single-source exploration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop once this many pants have been discovered.
    VertexQuota(usize),
    /// Stop before pairing a boundary whose frontier distance exceeds this.
    RadiusQuota(f64),
    /// Run until the component is exhausted.
    AllVertices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    VertexQuota,
    RadiusQuota,
    /// The component was exhausted before the quota.
    Premature,
}

/// One pairing step of the trace.
#[derive(Debug, Clone, Copy)]
pub struct StepRecord {
    pub index: usize,
    /// Selected half-edge in exploration numbering `(pants, slot)`.
    pub selected: (usize, u8),
    /// Partner in exploration numbering, assigned at this step.
    pub partner: (usize, u8),
    pub bad: bool,
    /// Frontier distance of the selected boundary at selection time.
    pub d_plus: f64,
    /// Pants discovered after the step.
    pub discovered: usize,
    /// Max distance witnessed anywhere in the discovered surface after the
    /// step.
    pub witnessed_radius: f64,
    /// Unpaired boundaries after the step.
    pub unpaired: usize,
}

#[derive(Debug, Clone)]
pub struct ExplorationReport {
    pub stop: StopReason,
    pub steps: Vec<StepRecord>,
    pub bad_steps: usize,
    pub discovered: usize,
    /// Witnessed radius at stop time.
    pub final_radius: f64,
    /// Frontier distances of every unpaired boundary before each step, for
    /// monotonicity checks: `(pants, slot, d_plus)`.
    pub frontier_history: Vec<Vec<(usize, u8, f64)>>,
}

struct GlueSpec {
    host: usize,
    host_slot: u8,
    new_slot: u8,
    weight: EdgeWeight,
    /// The selected half-edge has the lower graph id; gluing orientation
    /// follows the canonical (lower, higher) order of the surface record.
    selected_is_lower: bool,
}

/// Exploration state over a fixed weighted surface graph.
pub struct Exploration<'g> {
    graph: &'g WeightedSurfaceGraph,
    edge_of: Vec<usize>,
    builder: MetricBuilder,
    /// Exploration pants id -> graph vertex.
    vertex_of_pants: Vec<u32>,
    /// Graph vertex -> exploration pants id.
    pants_of_vertex: Vec<Option<usize>>,
    /// Unpaired boundaries in exploration numbering, kept sorted.
    unpaired: Vec<(usize, u8)>,
    point_mass: bool,
    l_plus: f64,
    steps: Vec<StepRecord>,
    frontier_history: Vec<Vec<(usize, u8, f64)>>,
    bad_steps: usize,
    track_history: bool,
}

impl<'g> Exploration<'g> {
    pub fn new(
        graph: &'g WeightedSurfaceGraph,
        root: u32,
        m: usize,
        word_cap: usize,
        track_history: bool,
    ) -> Result<Self> {
        let (l_minus, l_plus) = graph.law.half_length_support();
        let point_mass = l_minus == l_plus;
        let pitch = 2.0 * l_plus / m as f64;
        let builder = MetricBuilder::new(m, word_cap, pitch, l_plus)?;
        let n = graph.pairing.n_vertices();
        let mut ex = Exploration {
            graph,
            edge_of: graph.pairing.edge_of_half_edge(),
            builder,
            vertex_of_pants: Vec::new(),
            pants_of_vertex: vec![None; n],
            unpaired: Vec::new(),
            point_mass,
            l_plus,
            steps: Vec::new(),
            frontier_history: Vec::new(),
            bad_steps: 0,
            track_history,
        };
        ex.discover_vertex(root, None)?;
        ex.builder.run();
        Ok(ex)
    }

    /// Registers a graph vertex as a new pants, keeping the graph's slot
    /// numbering. With a point-mass law all cuffs are materialized eagerly
    /// (their length is known a priori).
    fn discover_vertex(&mut self, v: u32, glue: Option<GlueSpec>) -> Result<usize> {
        let id = self.vertex_of_pants.len();
        self.vertex_of_pants.push(v);
        self.pants_of_vertex[v as usize] = Some(id);
        let p = self.builder.add_pants();
        debug_assert_eq!(p, id);
        match glue {
            None => {
                if self.point_mass {
                    for slot in 0..3u8 {
                        self.builder.materialize_cuff(p, slot, 2.0 * self.l_plus)?;
                    }
                }
                for slot in 0..3u8 {
                    self.unpaired.push((id, slot));
                }
            }
            Some(spec) => {
                let w = spec.weight;
                if spec.selected_is_lower {
                    self.builder.add_gluing(
                        spec.host as PantsId,
                        spec.host_slot,
                        p,
                        spec.new_slot,
                        w.length,
                        w.arc_twist(),
                    )?;
                } else {
                    self.builder.add_gluing(
                        p,
                        spec.new_slot,
                        spec.host as PantsId,
                        spec.host_slot,
                        w.length,
                        w.arc_twist(),
                    )?;
                }
                if self.point_mass {
                    for slot in 0..3u8 {
                        if slot != spec.new_slot {
                            self.builder.materialize_cuff(p, slot, 2.0 * self.l_plus)?;
                        }
                    }
                }
                for slot in 0..3u8 {
                    if slot != spec.new_slot {
                        self.unpaired.push((id, slot));
                    }
                }
                self.unpaired.sort_unstable();
            }
        }
        self.refresh_root_sources();
        Ok(id)
    }

    /// Every sample on the root pants is at distance zero from the root
    /// set; idempotent, called whenever blocks may have appeared.
    fn refresh_root_sources(&mut self) {
        for slot in 0..3u8 {
            if let Some((base, m)) = self.builder.slot_nodes(0, slot) {
                for k in 0..m {
                    self.builder.add_source(base + k as NodeId);
                }
            }
        }
    }

    pub fn discovered(&self) -> usize {
        self.vertex_of_pants.len()
    }

    pub fn unpaired_count(&self) -> usize {
        self.unpaired.len()
    }

    pub fn bad_steps(&self) -> usize {
        self.bad_steps
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn is_discovered(&self, v: u32) -> bool {
        self.pants_of_vertex[v as usize].is_some()
    }

    /// Frontier distance of an unpaired boundary: the wall-metric distance
    /// from the root pants set.
    pub fn frontier_distance(&self, pants: usize, slot: u8) -> Result<DistanceResult> {
        if !self.unpaired.contains(&(pants, slot)) {
            return Err(Error::invalid(format!(
                "boundary ({pants}, {slot}) is already paired"
            )));
        }
        if pants == 0 {
            // The boundary lies on the root pants itself.
            return Ok(DistanceResult {
                upper: 0.0,
                lower: 0.0,
                hops: 0,
            });
        }
        if self.point_mass {
            self.builder
                .cuff_entry(pants as PantsId, slot)
                .map(|(r, _)| r)
                .ok_or_else(|| Error::Disconnected("frontier cuff unreachable".to_string()))
        } else {
            let (l_minus, _) = self.graph.law.half_length_support();
            let d = self
                .builder
                .wall_distance(pants as PantsId, slot, l_minus, 8)?
                .ok_or_else(|| Error::Disconnected("frontier cuff unreachable".to_string()))?;
            Ok(DistanceResult {
                upper: d,
                lower: (d - 2.0 * self.builder.pitch()).max(0.0),
                hops: 0,
            })
        }
    }

    fn frontier_values(&self) -> Result<Vec<(usize, u8, f64)>> {
        let mut out = Vec::with_capacity(self.unpaired.len());
        for &(p, s) in &self.unpaired {
            out.push((p, s, self.frontier_distance(p, s)?.upper));
        }
        Ok(out)
    }

    /// Max distance witnessed anywhere in the discovered surface.
    pub fn witnessed_radius(&self) -> f64 {
        self.builder.max_finite_dist()
    }

    /// Runs one pairing step; returns false when no boundary remains.
    pub fn step(&mut self) -> Result<bool> {
        if self.unpaired.is_empty() {
            return Ok(false);
        }
        let values = self.frontier_values()?;
        if self.track_history {
            self.frontier_history.push(values.clone());
        }
        // Minimizer of the frontier distance; ties broken by the lowest
        // half-edge id in discovery numbering.
        let (sel_p, sel_s, sel_d) = values
            .iter()
            .copied()
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)))
            .expect("non-empty frontier");
        self.pair_selected(sel_p, sel_s, sel_d)?;
        Ok(true)
    }

    fn pair_selected(&mut self, sel_p: usize, sel_s: u8, sel_d: f64) -> Result<()> {
        let sel_vertex = self.vertex_of_pants[sel_p];
        let he = half_edge(sel_vertex, sel_s);
        let edge_idx = self.edge_of[he as usize];
        let (a, b) = self.graph.pairing.pairs()[edge_idx];
        let partner_he = if a == he { b } else { a };
        let (pv, ps) = (vertex_of(partner_he), slot_of(partner_he));
        let w = self.graph.weights[edge_idx];
        self.unpaired.retain(|&(p, s)| (p, s) != (sel_p, sel_s));
        let (partner_id, partner_slot, bad) = match self.pants_of_vertex[pv as usize] {
            Some(pid) => {
                self.unpaired.retain(|&(p, s)| (p, s) != (pid, ps));
                if he < partner_he {
                    self.builder.add_gluing(
                        sel_p as PantsId,
                        sel_s,
                        pid as PantsId,
                        ps,
                        w.length,
                        w.arc_twist(),
                    )?;
                } else {
                    self.builder.add_gluing(
                        pid as PantsId,
                        ps,
                        sel_p as PantsId,
                        sel_s,
                        w.length,
                        w.arc_twist(),
                    )?;
                }
                self.refresh_root_sources();
                (pid, ps, true)
            }
            None => {
                let pid = self.discover_vertex(
                    pv,
                    Some(GlueSpec {
                        host: sel_p,
                        host_slot: sel_s,
                        new_slot: ps,
                        weight: w,
                        selected_is_lower: he < partner_he,
                    }),
                )?;
                (pid, ps, false)
            }
        };
        self.builder.run();
        if bad {
            self.bad_steps += 1;
        }
        self.steps.push(StepRecord {
            index: self.steps.len(),
            selected: (sel_p, sel_s),
            partner: (partner_id, partner_slot),
            bad,
            d_plus: sel_d,
            discovered: self.discovered(),
            witnessed_radius: self.witnessed_radius(),
            unpaired: self.unpaired.len(),
        });
        Ok(())
    }

    /// Runs to the stop rule.
    pub fn run(&mut self, stop: StopRule) -> Result<ExplorationReport> {
        let reason = loop {
            match stop {
                StopRule::VertexQuota(q) if self.discovered() >= q => {
                    break StopReason::VertexQuota;
                }
                StopRule::RadiusQuota(r) => {
                    if self.unpaired.is_empty() {
                        break StopReason::Premature;
                    }
                    let min = self
                        .frontier_values()?
                        .iter()
                        .map(|v| v.2)
                        .fold(f64::INFINITY, f64::min);
                    if min > r {
                        break StopReason::RadiusQuota;
                    }
                    if !self.step()? {
                        break StopReason::Premature;
                    }
                    continue;
                }
                _ => {}
            }
            if !self.step()? {
                break StopReason::Premature;
            }
        };
        Ok(ExplorationReport {
            stop: reason,
            steps: self.steps.clone(),
            bad_steps: self.bad_steps,
            discovered: self.discovered(),
            final_radius: self.witnessed_radius(),
            frontier_history: self.frontier_history.clone(),
        })
    }

    /// Distance bracket from the root pants to a cuff of the explored
    /// surface; meaningful after the cuff is glued.
    pub fn final_cuff_distance(&self, pants: usize, slot: u8) -> Option<DistanceResult> {
        self.builder
            .cuff_entry(pants as PantsId, slot)
            .map(|(r, _)| r)
    }

    /// Graph vertex discovered as exploration pants `id`.
    pub fn vertex(&self, id: usize) -> u32 {
        self.vertex_of_pants[id]
    }
}

/// Samples a surface and explores it from vertex 0.
pub fn explore_sampled(
    genus: usize,
    law: &WeightLaw,
    stop: StopRule,
    seed: u64,
    m: usize,
    word_cap: usize,
    track_history: bool,
) -> Result<(WeightedSurfaceGraph, ExplorationReport)> {
    let graph = sample_surface(genus, law, seed)?;
    let mut ex = Exploration::new(&graph, 0, m, word_cap, track_history)?;
    let report = ex.run(stop)?;
    Ok((graph, report))
}

/// Checks the unpaired-count ledger on a trace: each normal step changes
/// the count by +1 and each bad step by -2, starting from 3.
pub fn ledger_identity_holds(report: &ExplorationReport) -> bool {
    let mut expect = 3i64;
    for s in &report.steps {
        expect += if s.bad { -2 } else { 1 };
        if s.unpaired as i64 != expect {
            return false;
        }
    }
    true
}

/// Bad-step checkpoint table: fewer than `k` bad steps within the first
/// `g^beta` steps, fewer than `ln^{3/4} g` before `g^{1/2 - 1/ln^{3/4} g}`
/// vertices, fewer than `ln^3 g` before `sqrt(g) ln(g)` vertices.
#[derive(Debug, Clone)]
pub struct BadStepStats {
    pub genus: usize,
    pub trials: usize,
    pub premature: usize,
    pub violations_first_steps: usize,
    pub violations_mid: usize,
    pub violations_total: usize,
    pub first_step_bad_rate: f64,
}

pub fn badstep_stats(
    genus: usize,
    law: &WeightLaw,
    trials: usize,
    beta: f64,
    k: usize,
    seed: u64,
    m: usize,
    word_cap: usize,
) -> Result<BadStepStats> {
    if !(0.0 < beta && beta < 0.5) {
        return Err(Error::invalid(format!("beta must be in (0, 1/2), got {beta}")));
    }
    if (k as f64) <= 2.0 / (1.0 - 2.0 * beta) {
        return Err(Error::invalid(format!(
            "k must exceed 2/(1 - 2 beta) = {}",
            2.0 / (1.0 - 2.0 * beta)
        )));
    }
    let g = genus as f64;
    let quota = (g.sqrt() * g.ln()).ceil() as usize;
    let first_steps = g.powf(beta).floor() as usize;
    let mid_vertices = g.powf(0.5 - 1.0 / g.ln().powf(0.75)).ceil() as usize;
    let mid_bound = g.ln().powf(0.75);
    let total_bound = g.ln().powi(3);
    let results: Vec<Result<(bool, usize, usize, usize, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (_, report) = explore_sampled(
                genus,
                law,
                StopRule::VertexQuota(quota),
                rng::trial_seed(seed, t as u64),
                m,
                word_cap,
                false,
            )?;
            let premature = report.stop == StopReason::Premature;
            let bad_in_first = report
                .steps
                .iter()
                .take(first_steps)
                .filter(|s| s.bad)
                .count();
            let bad_before_mid = report
                .steps
                .iter()
                .take_while(|s| s.discovered < mid_vertices)
                .filter(|s| s.bad)
                .count();
            let first_step_bad = report.steps.first().map(|s| s.bad).unwrap_or(false);
            Ok((
                premature,
                bad_in_first,
                bad_before_mid,
                report.bad_steps,
                first_step_bad,
            ))
        })
        .collect();
    let mut stats = BadStepStats {
        genus,
        trials,
        premature: 0,
        violations_first_steps: 0,
        violations_mid: 0,
        violations_total: 0,
        first_step_bad_rate: 0.0,
    };
    let mut first_bad = 0usize;
    for r in results {
        let (premature, bad_first, bad_mid, bad_total, first_step_bad) = r?;
        if first_step_bad {
            first_bad += 1;
        }
        if premature {
            stats.premature += 1;
            continue;
        }
        if bad_first >= k {
            stats.violations_first_steps += 1;
        }
        if bad_mid as f64 >= mid_bound {
            stats.violations_mid += 1;
        }
        if bad_total as f64 >= total_bound {
            stats.violations_total += 1;
        }
    }
    stats.first_step_bad_rate = first_bad as f64 / trials as f64;
    Ok(stats)
}

/// Expected first-step bad rate `2 / (6g - 7)` within `tolerance_se`
/// standard errors.
pub fn first_step_rate_consistent(stats: &BadStepStats, tolerance_se: f64) -> bool {
    let g = stats.genus as f64;
    let p = 2.0 / (6.0 * g - 7.0);
    let se = (p * (1.0 - p) / stats.trials as f64).sqrt();
    (stats.first_step_bad_rate - p).abs() <= tolerance_se * se + 1e-12
}

/// Outcome of one interleaved two-source exploration.
#[derive(Debug, Clone, Copy)]
pub struct MergeOutcome {
    pub merged: bool,
    /// Interleaved step count at the merge.
    pub steps: usize,
    pub radius_a: f64,
    pub radius_b: f64,
    pub premature: bool,
}

/// Runs two explorations from the given roots on one surface, interleaved
/// A, B, A, B, and reports whether a pairing connected them before both
/// reached the vertex quota. Identical roots merge immediately.
pub fn two_source_merge_roots(
    graph: &WeightedSurfaceGraph,
    root_a: u32,
    root_b: u32,
    quota: usize,
    m: usize,
    word_cap: usize,
) -> Result<MergeOutcome> {
    if root_a == root_b {
        return Ok(MergeOutcome {
            merged: true,
            steps: 0,
            radius_a: 0.0,
            radius_b: 0.0,
            premature: false,
        });
    }
    let mut a = Exploration::new(graph, root_a, m, word_cap, false)?;
    let mut b = Exploration::new(graph, root_b, m, word_cap, false)?;
    let mut steps = 0usize;
    loop {
        let a_active = a.discovered() < quota && a.unpaired_count() > 0;
        let b_active = b.discovered() < quota && b.unpaired_count() > 0;
        if !a_active && !b_active {
            return Ok(MergeOutcome {
                merged: false,
                steps,
                radius_a: a.witnessed_radius(),
                radius_b: b.witnessed_radius(),
                premature: a.unpaired_count() == 0 || b.unpaired_count() == 0,
            });
        }
        if a_active {
            a.step()?;
            steps += 1;
            let last = *a.steps().last().expect("stepped");
            if b.is_discovered(a.vertex(last.partner.0)) {
                return Ok(MergeOutcome {
                    merged: true,
                    steps,
                    radius_a: a.witnessed_radius(),
                    radius_b: b.witnessed_radius(),
                    premature: false,
                });
            }
        }
        if b_active {
            b.step()?;
            steps += 1;
            let last = *b.steps().last().expect("stepped");
            if a.is_discovered(b.vertex(last.partner.0)) {
                return Ok(MergeOutcome {
                    merged: true,
                    steps,
                    radius_a: a.witnessed_radius(),
                    radius_b: b.witnessed_radius(),
                    premature: false,
                });
            }
        }
    }
}

pub fn two_source_merge(
    graph: &WeightedSurfaceGraph,
    quota: usize,
    m: usize,
    word_cap: usize,
) -> Result<MergeOutcome> {
    two_source_merge_roots(graph, 0, 1, quota, m, word_cap)
}

#[derive(Debug, Clone)]
pub struct MergeStats {
    pub genus: usize,
    pub quota: usize,
    pub trials: usize,
    pub merged: usize,
    pub premature: usize,
    pub merge_fraction: f64,
}

pub fn merge_experiment(
    genus: usize,
    law: &WeightLaw,
    quota: usize,
    trials: usize,
    seed: u64,
    m: usize,
    word_cap: usize,
) -> Result<MergeStats> {
    let results: Vec<Result<MergeOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let graph = sample_surface(genus, law, rng::trial_seed(seed, t as u64))?;
            two_source_merge(&graph, quota, m, word_cap)
        })
        .collect();
    let mut merged = 0usize;
    let mut premature = 0usize;
    for r in results {
        let o = r?;
        if o.merged {
            merged += 1;
        }
        if o.premature {
            premature += 1;
        }
    }
    Ok(MergeStats {
        genus,
        quota,
        trials,
        merged,
        premature,
        merge_fraction: merged as f64 / trials as f64,
    })
}

/// Per-trial diameter data: the all-pairs metric bracket and the
/// exploration bracket from two merged explorations.
#[derive(Debug, Clone, Copy)]
pub struct DiameterTrial {
    pub seed_index: u64,
    pub metric_lower: f64,
    pub metric_upper: f64,
    pub exploration_lower: f64,
    pub exploration_upper: f64,
    pub contains: bool,
}

#[derive(Debug, Clone)]
pub struct DiameterRun {
    pub genus: usize,
    pub trials: Vec<DiameterTrial>,
    pub disconnected: usize,
}

/// For each connected sample: the metric-engine diameter bracket and the
/// exploration bracket `[max(rA, rB) - 2D, rA + rB + 2D]`, where `rA, rB`
/// are the witnessed radii when two interleaved explorations merge and `D`
/// is the pants diameter cap.
pub fn diameter_by_exploration(
    genus: usize,
    law: &WeightLaw,
    trials: usize,
    seed: u64,
    m: usize,
    word_cap: usize,
) -> Result<DiameterRun> {
    let (lm, lp) = law.half_length_support();
    let d_cap = pants_bounds(lm, lp)?.delta_cap;
    let results: Vec<Result<Option<DiameterTrial>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let graph = sample_surface(genus, law, rng::trial_seed(seed, t))?;
            let (connected, _) = crate::surface::connectivity(&graph);
            if !connected {
                return Ok(None);
            }
            let metric = crate::metric::build_surface_metric(&graph, m, word_cap)?;
            let (lo, hi) = metric.diameter_estimate()?;
            let quota = ((genus as f64).sqrt() * (genus as f64).ln()).ceil() as usize;
            let outcome = two_source_merge(&graph, quota.max(2), m, word_cap)?;
            let exp_lo = (outcome.radius_a.max(outcome.radius_b) - 2.0 * d_cap).max(0.0);
            let exp_hi = outcome.radius_a + outcome.radius_b + 2.0 * d_cap;
            Ok(Some(DiameterTrial {
                seed_index: t,
                metric_lower: lo,
                metric_upper: hi,
                exploration_lower: exp_lo,
                exploration_upper: exp_hi,
                contains: exp_lo <= hi && hi <= exp_hi,
            }))
        })
        .collect();
    let mut trials_out = Vec::new();
    let mut disconnected = 0usize;
    for r in results {
        match r? {
            Some(t) => trials_out.push(t),
            None => disconnected += 1,
        }
    }
    Ok(DiameterRun {
        genus,
        trials: trials_out,
        disconnected,
    })
}

/// Matched-stream comparison with a tree run of the same frontier rule.
#[derive(Debug, Clone, Copy)]
pub struct RadiusComparison {
    pub exploration_radius: f64,
    pub tree_radius: f64,
    pub bad_steps: usize,
    pub allowance: f64,
    pub ok: bool,
}

/// Compares the exploration radius at `n_star` discovered pants with the
/// radius of a coupled tree surface grown to the same pants count with the
/// same per-discovery weights; the exploration may exceed the tree by at
/// most `5 * D * bad_steps` plus bracket slack.
pub fn radius_comparison(
    genus: usize,
    law: &WeightLaw,
    n_star: usize,
    seed: u64,
    m: usize,
    word_cap: usize,
) -> Result<RadiusComparison> {
    let graph = sample_surface(genus, law, seed)?;
    let mut ex = Exploration::new(&graph, 0, m, word_cap, false)?;
    let report = ex.run(StopRule::VertexQuota(n_star))?;
    let edge_of = graph.pairing.edge_of_half_edge();
    let mut weights = Vec::new();
    for s in &report.steps {
        if !s.bad {
            let he = half_edge(ex.vertex(s.selected.0), s.selected.1);
            weights.push(graph.weights[edge_of[he as usize]]);
        }
    }
    let tree_radius = tree_frontier_radius(law, &weights, report.discovered, m, word_cap)?;
    let (lm, lp) = law.half_length_support();
    let d_cap = pants_bounds(lm, lp)?.delta_cap;
    let slack = 4.0 * (2.0 * lp / m as f64) * report.steps.len() as f64 + 1e-6;
    let allowance = 5.0 * d_cap * report.bad_steps as f64 + slack;
    Ok(RadiusComparison {
        exploration_radius: report.final_radius,
        tree_radius,
        bad_steps: report.bad_steps,
        allowance,
        ok: report.final_radius <= tree_radius + allowance,
    })
}

/// Frontier-rule growth on the infinite 3-regular tree with a prescribed
/// weight sequence: each step attaches a fresh pants to the closest
/// unpaired boundary, consuming weights in order; returns the witnessed
/// radius once `n_star` pants exist.
fn tree_frontier_radius(
    law: &WeightLaw,
    weights: &[EdgeWeight],
    n_star: usize,
    m: usize,
    word_cap: usize,
) -> Result<f64> {
    let (lm, lp) = law.half_length_support();
    if lm != lp {
        return Err(Error::invalid(
            "radius comparison implemented for point-mass laws".to_string(),
        ));
    }
    let pitch = 2.0 * lp / m as f64;
    let mut builder = MetricBuilder::new(m, word_cap, pitch, lp)?;
    let p0 = builder.add_pants();
    for slot in 0..3u8 {
        let base = builder.materialize_cuff(p0, slot, 2.0 * lp)?;
        for k in 0..m {
            builder.add_source(base + k as NodeId);
        }
    }
    let mut unpaired: Vec<(usize, u8)> = vec![(0, 0), (0, 1), (0, 2)];
    let mut discovered = 1usize;
    let mut widx = 0usize;
    builder.run();
    while discovered < n_star && widx < weights.len() {
        let mut best = (f64::INFINITY, usize::MAX, 0u8);
        for &(p, s) in &unpaired {
            let d = if p == 0 {
                0.0
            } else {
                builder
                    .cuff_entry(p as PantsId, s)
                    .map(|(r, _)| r.upper)
                    .unwrap_or(f64::INFINITY)
            };
            if d < best.0 || (d == best.0 && (p, s) < (best.1, best.2)) {
                best = (d, p, s);
            }
        }
        let (_, sel_p, sel_s) = best;
        unpaired.retain(|&(p, s)| (p, s) != (sel_p, sel_s));
        let w = weights[widx];
        widx += 1;
        let p = builder.add_pants();
        builder.add_gluing(sel_p as PantsId, sel_s, p, 0, w.length, w.arc_twist())?;
        for slot in 1..3u8 {
            builder.materialize_cuff(p, slot, 2.0 * lp)?;
        }
        unpaired.push((p, 1));
        unpaired.push((p, 2));
        unpaired.sort_unstable();
        discovered += 1;
        builder.run();
    }
    Ok(builder.max_finite_dist())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, LengthLaw, TwistLaw};
    use crate::surface::Pairing;

    fn law_point(l: f64) -> WeightLaw {
        WeightLaw {
            length: LengthLaw::PointMass(2.0 * l),
            twist: TwistLaw::UniformCircle,
        }
    }

    #[test]
    fn genus_two_explorations_terminate_with_two_bad_steps() {
        // Any 2-vertex matching explores in 3 pairings; the second and
        // third hit already-discovered pants.
        let law = law_point(1.0);
        for (idx, matching) in crate::surface::enumerate_matchings(2).iter().enumerate() {
            let pairing = Pairing::from_pairs(2, matching.clone()).unwrap();
            let graph = crate::surface::assign_weights(
                &pairing,
                &law,
                &mut rng::stream_indexed(7, Domain::Weights, idx as u64),
                7,
            )
            .unwrap();
            let mut ex = Exploration::new(&graph, 0, 8, 6, false).unwrap();
            let report = ex.run(StopRule::AllVertices).unwrap();
            assert_eq!(report.steps.len(), 3, "matching {idx}");
            assert_eq!(report.bad_steps, 2, "matching {idx}");
            assert_eq!(report.discovered, 2);
            assert!(ledger_identity_holds(&report));
        }
    }

    #[test]
    fn full_quota_discovers_everything_when_connected() {
        let law = law_point(1.0);
        for seed in 0..5u64 {
            let graph = sample_surface(4, &law, seed).unwrap();
            let (connected, _) = crate::surface::connectivity(&graph);
            let mut ex = Exploration::new(&graph, 0, 8, 6, false).unwrap();
            let report = ex.run(StopRule::AllVertices).unwrap();
            if connected {
                assert_eq!(report.discovered, graph.pairing.n_vertices());
            }
            assert!(ledger_identity_holds(&report));
        }
    }

    #[test]
    fn frontier_distances_monotone_in_stage() {
        let law = law_point(1.0);
        let graph = sample_surface(5, &law, 3).unwrap();
        let mut ex = Exploration::new(&graph, 0, 8, 6, true).unwrap();
        let report = ex.run(StopRule::AllVertices).unwrap();
        use std::collections::HashMap;
        let mut last: HashMap<(usize, u8), f64> = HashMap::new();
        for stage in &report.frontier_history {
            for &(p, s, d) in stage {
                if let Some(prev) = last.get(&(p, s)) {
                    assert!(
                        d <= prev + 1e-9,
                        "frontier value increased at ({p}, {s}): {prev} -> {d}"
                    );
                }
                last.insert((p, s), d);
            }
        }
    }

    #[test]
    fn final_distance_bounded_by_frontier_values() {
        let law = law_point(1.0);
        let graph = sample_surface(4, &law, 11).unwrap();
        let (connected, _) = crate::surface::connectivity(&graph);
        if !connected {
            return;
        }
        let mut ex = Exploration::new(&graph, 0, 8, 6, true).unwrap();
        let report = ex.run(StopRule::AllVertices).unwrap();
        for (stage, values) in report.frontier_history.iter().enumerate() {
            for &(p, s, d) in values {
                if let Some(fin) = ex.final_cuff_distance(p, s) {
                    assert!(
                        fin.upper <= d + 1e-9,
                        "stage {stage}: final {} exceeds frontier {d}",
                        fin.upper
                    );
                }
            }
        }
    }

    #[test]
    fn identical_roots_merge_immediately() {
        let law = law_point(1.0);
        let graph = sample_surface(6, &law, 5).unwrap();
        let out = two_source_merge_roots(&graph, 2, 2, 10, 8, 6).unwrap();
        assert!(out.merged);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn connected_surface_explorations_merge_at_full_quota() {
        let law = law_point(1.0);
        for seed in 0..4u64 {
            let graph = sample_surface(6, &law, seed).unwrap();
            let (connected, _) = crate::surface::connectivity(&graph);
            if !connected {
                continue;
            }
            let out = two_source_merge(&graph, graph.pairing.n_vertices(), 8, 6).unwrap();
            assert!(out.merged, "connected surface explorations must meet");
        }
    }

    #[test]
    fn ledger_identity_detects_corruption() {
        let law = law_point(1.0);
        let graph = sample_surface(3, &law, 2).unwrap();
        let mut ex = Exploration::new(&graph, 0, 8, 6, false).unwrap();
        let mut report = ex.run(StopRule::AllVertices).unwrap();
        assert!(ledger_identity_holds(&report));
        if let Some(s) = report.steps.first_mut() {
            s.unpaired += 1;
            assert!(!ledger_identity_holds(&report));
        }
    }

    #[test]
    fn badstep_preconditions_enforced() {
        let law = law_point(1.0);
        assert!(badstep_stats(12, &law, 5, 0.6, 11, 1, 6, 6).is_err());
        assert!(badstep_stats(12, &law, 5, 0.4, 10, 1, 6, 6).is_err());
    }
}
