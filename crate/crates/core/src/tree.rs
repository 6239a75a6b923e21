//! Tree-like surfaces: lazily grown pants gluings along the rooted binary
//! tree (one free boundary at the root) or the full 3-regular tree, with
//! frontier-growth statistics.
//!
//! Edge weights are drawn from streams keyed by the tree path of the edge,
//! so regrowing any subtree reproduces the same surface regardless of
//! traversal order. Ball membership uses distance upper bounds from the
//! metric graph: a pants is in the ball when the distance to its entering
//! cuff is at most `R`; the sphere is the set of ball members with a child
//! outside. The single convention keeps the sphere/ball combinatorics
//! exact.

use crate::error::{Error, Result};
use crate::metric::{DistanceResult, MetricBuilder, NodeId, PantsId};
use crate::pants::{enumerate_unfoldings, pants_bounds, BoundaryPoint, PantsChart, PantsShape};
use crate::rng::{self, WeightLaw};
use crate::scalar::Real;
use crate::stats;
use crate::surface::EdgeWeight;
use rayon::prelude::*;

/// Which infinite tree the surface is glued along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    /// Rooted binary tree; the root keeps one free boundary.
    Binary,
    /// Full 3-regular tree.
    Full3,
}

/// Address of a pants in the tree. The root has depth 0; `first` is the
/// branch taken at the root of the full 3-regular tree, and `bits` holds
/// the binary child choices below that, least significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodePath {
    pub depth: u8,
    pub first: u8,
    pub bits: u64,
}

impl NodePath {
    pub fn root() -> Self {
        NodePath {
            depth: 0,
            first: 0,
            bits: 0,
        }
    }

    /// Child address; `which` is 0/1 below the first generation and 0..3 at
    /// the root of the full tree.
    pub fn child(&self, which: u8, kind: TreeKind) -> Result<Self> {
        if self.depth >= 62 {
            return Err(Error::Resource {
                context: "tree depth limit (62) reached".to_string(),
                best_bound: None,
            });
        }
        if self.depth == 0 && kind == TreeKind::Full3 {
            Ok(NodePath {
                depth: 1,
                first: which,
                bits: 0,
            })
        } else {
            let shift = if kind == TreeKind::Full3 {
                self.depth - 1
            } else {
                self.depth
            };
            Ok(NodePath {
                depth: self.depth + 1,
                first: self.first,
                bits: self.bits | ((which as u64) << shift),
            })
        }
    }

    fn stream_key(&self, kind: TreeKind) -> (u64, u64) {
        let hi = (((kind == TreeKind::Full3) as u64) << 32)
            | ((self.first as u64) << 8)
            | self.depth as u64;
        (hi, self.bits)
    }
}

/// A lazily generated tree surface; it owns only the law and the seed, all
/// weights being functions of tree paths.
#[derive(Debug, Clone, Copy)]
pub struct TreeSurface {
    pub kind: TreeKind,
    pub law: WeightLaw,
    pub seed: u64,
}

impl TreeSurface {
    pub fn binary(law: WeightLaw, seed: u64) -> Result<Self> {
        law.validate()?;
        Ok(TreeSurface {
            kind: TreeKind::Binary,
            law,
            seed,
        })
    }

    pub fn full(law: WeightLaw, seed: u64) -> Result<Self> {
        law.validate()?;
        Ok(TreeSurface {
            kind: TreeKind::Full3,
            law,
            seed,
        })
    }

    /// Weight of the edge above the node at `path`. For the binary root
    /// this is the free-boundary length (its twist is unused).
    pub fn edge_weight(&self, path: &NodePath) -> EdgeWeight {
        let (hi, lo) = path.stream_key(self.kind);
        let mut rng = rng::stream_path(self.seed, hi, lo);
        EdgeWeight {
            length: self.law.sample_length(&mut rng),
            twist: self.law.sample_twist(&mut rng),
        }
    }

    /// Seam and diameter bounds for the law support.
    pub fn bounds(&self) -> crate::pants::PantsBounds<f64> {
        let (lm, lp) = self.law.half_length_support();
        pants_bounds(lm, lp).expect("validated law support")
    }
}

#[derive(Debug, Clone)]
struct TreeNode {
    path: NodePath,
    parent: Option<usize>,
    /// Child node indices per branch; entry 2 only for the full-tree root.
    children: [Option<usize>; 3],
    /// Weights of the edges to the children, drawn at materialization so
    /// the pants shape is complete. Indexed by the cuff slot they sit on.
    child_weights: [Option<EdgeWeight>; 3],
    parent_weight: EdgeWeight,
    children_materialized: bool,
}

/// Parameters for ball growth.
#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub m: usize,
    pub word_cap: usize,
    /// Hard cap on materialized pants.
    pub pants_budget: usize,
}

impl Default for GrowParams {
    fn default() -> Self {
        GrowParams {
            m: 16,
            word_cap: 8,
            pants_budget: 150_000,
        }
    }
}

/// `(R, ball, sphere, N_R, U_R, U'_R)` for one grown tree surface; entries
/// are pants indices into the owning `GrownBall`.
#[derive(Debug, Clone)]
pub struct GrowthSnapshot {
    pub r: f64,
    pub ball: Vec<usize>,
    pub sphere: Vec<usize>,
    pub n_r: usize,
    pub u_r: Vec<usize>,
    pub u_prime_r: Vec<usize>,
}

/// A tree surface grown out to a metric radius, with per-pants entry
/// brackets.
///
/// Slot convention: slot 0 faces the parent (or carries the free/center
/// boundary at the root), slots 1 and 2 face the children; the root of the
/// full tree uses all three slots for its branches.
pub struct GrownBall {
    pub tree: TreeSurface,
    pub root: NodePath,
    pub radius: f64,
    params: GrowParams,
    nodes: Vec<TreeNode>,
    builder: MetricBuilder,
}

impl GrownBall {
    /// Grows the ball of radius `r` around the root boundary (binary) or
    /// the root marked point (full tree): children of every pants whose
    /// entry distance upper bound is at most `r` are materialized, to a
    /// fixpoint.
    pub fn grow(tree: &TreeSurface, root: NodePath, r: f64, params: GrowParams) -> Result<Self> {
        let (_, l_plus) = tree.law.half_length_support();
        let pitch = 2.0 * l_plus / params.m as f64;
        let builder = MetricBuilder::new(params.m, params.word_cap, pitch, l_plus)?
            .with_node_budget(params.pants_budget.saturating_mul(3 * params.m));
        let mut ball = GrownBall {
            tree: *tree,
            root,
            radius: r,
            params,
            nodes: Vec::new(),
            builder,
        };
        ball.materialize_root()?;
        ball.builder.run();
        loop {
            let mut expanded = false;
            for id in 0..ball.nodes.len() {
                if ball.nodes[id].children_materialized {
                    continue;
                }
                if ball.entry_upper(id) <= r {
                    ball.materialize_children(id)?;
                    expanded = true;
                }
            }
            if !expanded {
                break;
            }
            ball.builder.run();
        }
        Ok(ball)
    }

    fn is_full_root(&self, id: usize) -> bool {
        self.tree.kind == TreeKind::Full3 && id == 0 && self.root == NodePath::root()
    }

    fn n_child_slots(&self, id: usize) -> usize {
        if self.is_full_root(id) {
            3
        } else {
            2
        }
    }

    pub fn n_child_slots_of(&self, id: usize) -> usize {
        self.n_child_slots(id)
    }

    /// Cuff slot on pants `id` facing its child branch `which`.
    pub fn parent_slot(&self, id: usize, which: usize) -> u8 {
        if self.is_full_root(id) {
            which as u8
        } else {
            (which + 1) as u8
        }
    }

    fn materialize_root(&mut self) -> Result<()> {
        let root_path = self.root;
        let parent_weight = self.tree.edge_weight(&root_path);
        let full_root = self.tree.kind == TreeKind::Full3 && root_path == NodePath::root();
        let mut node = TreeNode {
            path: root_path,
            parent: None,
            children: [None; 3],
            child_weights: [None; 3],
            parent_weight,
            children_materialized: false,
        };
        if full_root {
            let mut lens = [0.0f64; 3];
            for t in 0..3u8 {
                let cp = root_path.child(t, self.tree.kind)?;
                let w = self.tree.edge_weight(&cp);
                node.child_weights[t as usize] = Some(w);
                lens[t as usize] = w.length;
            }
            let shape = PantsShape::new(lens[0] / 2.0, lens[1] / 2.0, lens[2] / 2.0)?;
            let p = self.builder.add_pants_shaped(&shape);
            debug_assert_eq!(p, 0);
            for t in 0..3u8 {
                self.builder.materialize_cuff(p, t, lens[t as usize])?;
            }
            self.nodes.push(node);
            self.inject_center_sources(p)?;
        } else {
            let mut lens = [parent_weight.length, 0.0, 0.0];
            for t in 0..2u8 {
                let cp = root_path.child(t, self.tree.kind)?;
                let w = self.tree.edge_weight(&cp);
                node.child_weights[(t + 1) as usize] = Some(w);
                lens[(t + 1) as usize] = w.length;
            }
            let shape = PantsShape::new(lens[0] / 2.0, lens[1] / 2.0, lens[2] / 2.0)?;
            let p = self.builder.add_pants_shaped(&shape);
            debug_assert_eq!(p, 0);
            for t in 0..3u8 {
                self.builder.materialize_cuff(p, t, lens[t as usize])?;
            }
            self.nodes.push(node);
            let (base, m) = self.builder.slot_nodes(0, 0).expect("root slot 0");
            for k in 0..m {
                self.builder.add_source(base + k as NodeId);
            }
        }
        Ok(())
    }

    /// Seeds distances from the root marked point (the midpoint of the seam
    /// between cuffs 1 and 2) to every sample of the root pants.
    fn inject_center_sources(&mut self, p: PantsId) -> Result<()> {
        let shape = PantsShape::new(
            self.builder.half_length(p, 0),
            self.builder.half_length(p, 1),
            self.builder.half_length(p, 2),
        )?;
        let chart = PantsChart::new(shape)?;
        let center = chart.seam_midpoint();
        let words =
            enumerate_unfoldings(&chart, self.params.word_cap, chart.distance_cap(), 300_000)?;
        for slot in 0..3u8 {
            let (base, m) = self.builder.slot_nodes(p, slot).expect("root cuffs");
            let len = 2.0 * self.builder.half_length(p, slot);
            for k in 0..m {
                let bp = BoundaryPoint::new((slot + 1) as usize, k as f64 * len / m as f64)?;
                let (pt, _sheet) = chart.lift(&bp);
                // The center sits on a mirror, so both parities reach it.
                let mut best = f64::INFINITY;
                for u in &words {
                    let c = center.cosh_distance_to(&u.iso.apply(&pt));
                    if c < best {
                        best = c;
                    }
                }
                self.builder
                    .add_source_with_offset(base + k as NodeId, best.acosh_clamped());
            }
        }
        Ok(())
    }

    fn materialize_children(&mut self, id: usize) -> Result<()> {
        let slots = self.n_child_slots(id);
        if self.nodes.len() + slots > self.params.pants_budget {
            return Err(Error::Resource {
                context: format!("pants budget {} exceeded", self.params.pants_budget),
                best_bound: None,
            });
        }
        for which in 0..slots {
            let parent_slot = self.parent_slot(id, which);
            let cpath = self.nodes[id].path.child(which as u8, self.tree.kind)?;
            let w = self.nodes[id].child_weights[parent_slot as usize]
                .expect("child weight drawn at parent materialization");
            // Grandchild weights first, so the new pants has its full shape.
            let g0 = self.tree.edge_weight(&cpath.child(0, self.tree.kind)?);
            let g1 = self.tree.edge_weight(&cpath.child(1, self.tree.kind)?);
            let shape = PantsShape::new(w.length / 2.0, g0.length / 2.0, g1.length / 2.0)?;
            let p = self.builder.add_pants_shaped(&shape);
            let cid = self.nodes.len();
            debug_assert_eq!(p, cid);
            self.builder
                .add_gluing(id as PantsId, parent_slot, p, 0, w.length, w.arc_twist())?;
            self.builder.materialize_cuff(p, 1, g0.length)?;
            self.builder.materialize_cuff(p, 2, g1.length)?;
            self.nodes.push(TreeNode {
                path: cpath,
                parent: Some(id),
                children: [None; 3],
                child_weights: [None, Some(g0), Some(g1)],
                parent_weight: w,
                children_materialized: false,
            });
            self.nodes[id].children[which] = Some(cid);
        }
        self.nodes[id].children_materialized = true;
        Ok(())
    }

    pub fn n_pants(&self) -> usize {
        self.nodes.len()
    }

    pub fn path_of(&self, id: usize) -> NodePath {
        self.nodes[id].path
    }

    pub fn parent_of(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn child_of(&self, id: usize, which: usize) -> Option<usize> {
        self.nodes[id].children[which]
    }

    pub fn parent_weight(&self, id: usize) -> EdgeWeight {
        self.nodes[id].parent_weight
    }

    /// Entry distance upper bound: distance to the pants' entering cuff,
    /// measured on the parent-side sample block. The root's entry is 0 by
    /// convention.
    pub fn entry_upper(&self, id: usize) -> f64 {
        match self.entry_result(id) {
            Some(r) => r.upper,
            None => f64::INFINITY,
        }
    }

    pub fn entry_result(&self, id: usize) -> Option<DistanceResult> {
        let Some(parent) = self.nodes[id].parent else {
            return Some(DistanceResult {
                upper: 0.0,
                lower: 0.0,
                hops: 0,
            });
        };
        let which = self.nodes[parent]
            .children
            .iter()
            .position(|c| *c == Some(id))
            .expect("child link");
        let slot = self.parent_slot(parent, which);
        self.builder
            .cuff_entry(parent as PantsId, slot)
            .map(|(r, _)| r)
    }

    /// Entry bracket of a child branch, measured on this pants' own block;
    /// defined whether or not the child pants is materialized.
    pub fn child_entry_upper(&self, id: usize, which: usize) -> f64 {
        let slot = self.parent_slot(id, which);
        match self.builder.cuff_entry(id as PantsId, slot) {
            Some((r, _)) => r.upper,
            None => f64::INFINITY,
        }
    }

    /// Entry parameter of the closest approach on the entering cuff, in the
    /// child-side parameterization (the gluing maps parent-side parameter
    /// `t` to `t - arc_twist`).
    pub fn entry_parameter(&self, id: usize) -> Option<f64> {
        let parent = self.nodes[id].parent?;
        let which = self.nodes[parent]
            .children
            .iter()
            .position(|c| *c == Some(id))
            .expect("child link");
        let slot = self.parent_slot(parent, which);
        let (_, k) = self.builder.cuff_entry(parent as PantsId, slot)?;
        let w = self.nodes[id].parent_weight;
        let spacing = w.length / self.params.m as f64;
        Some((k as f64 * spacing - w.arc_twist()).rem_euclid(w.length))
    }

    /// Ball, sphere and frontier sets at radius `r <= self.radius`.
    pub fn snapshot(&self, r: f64) -> Result<GrowthSnapshot> {
        if r > self.radius {
            return Err(Error::invalid(format!(
                "snapshot radius {r} exceeds grown radius {}",
                self.radius
            )));
        }
        let mut ball = Vec::new();
        for id in 0..self.nodes.len() {
            if self.entry_upper(id) <= r {
                ball.push(id);
            }
        }
        let mut sphere = Vec::new();
        let mut in_sphere = vec![false; self.nodes.len()];
        for &id in &ball {
            let slots = self.n_child_slots(id);
            let outside = (0..slots).any(|w| self.child_entry_upper(id, w) > r);
            if outside {
                sphere.push(id);
                in_sphere[id] = true;
            }
        }
        let mut u_r = Vec::new();
        for &id in &sphere {
            let mut anc = self.nodes[id].parent;
            let mut maximal = true;
            while let Some(a) = anc {
                if in_sphere[a] {
                    maximal = false;
                    break;
                }
                anc = self.nodes[a].parent;
            }
            if maximal {
                u_r.push(id);
            }
        }
        let mut u_prime = Vec::new();
        for &id in &sphere {
            for which in 0..self.n_child_slots(id) {
                if let Some(c) = self.nodes[id].children[which] {
                    u_prime.push(c);
                }
            }
        }
        let n_r = sphere.len();
        Ok(GrowthSnapshot {
            r,
            ball,
            sphere,
            n_r,
            u_r,
            u_prime_r: u_prime,
        })
    }

    /// Number of sphere members on the ancestor chain of `id`, including
    /// `id` itself.
    pub fn ancestor_chain_len(&self, id: usize, in_sphere: &[bool]) -> usize {
        let mut n = 0;
        let mut cur = Some(id);
        while let Some(c) = cur {
            if in_sphere[c] {
                n += 1;
            }
            cur = self.nodes[c].parent;
        }
        n
    }
}

/// Grows a ball and takes the snapshot in one call.
pub fn grow_ball(
    tree: &TreeSurface,
    r: f64,
    params: GrowParams,
) -> Result<(GrownBall, GrowthSnapshot)> {
    let ball = GrownBall::grow(tree, NodePath::root(), r, params)?;
    let snap = ball.snapshot(r)?;
    Ok((ball, snap))
}

/// Frontier count of the subtree rooted at `path`, measured from its
/// entering boundary; path-keyed streams reproduce the weights of the
/// enclosing surface.
pub fn subtree_n_r(
    tree: &TreeSurface,
    path: NodePath,
    r: f64,
    params: GrowParams,
) -> Result<usize> {
    let ball = GrownBall::grow(tree, path, r, params)?;
    Ok(ball.snapshot(r)?.n_r)
}

/// Multiplicativity check report.
#[derive(Debug, Clone)]
pub struct MultiplicativityReport {
    pub r_base: f64,
    pub r_inc: f64,
    pub n_big: usize,
    pub sum_over_u: usize,
    pub sum_over_u_prime: usize,
    pub sub_constant: f64,
    pub super_constant: f64,
    pub sub_ok: bool,
    pub super_ok: bool,
    pub max_chain: usize,
    pub chain_bound: f64,
}

/// Verifies the frontier sub/supermultiplicativity inequalities with the
/// explicit constants `2 e^{4 D}` and `(e^{-4 D} / 2) (D/d + 1)^{-1}`,
/// where `D` is the diameter cap and `d` the minimal seam of the law
/// support, plus the ancestor-chain bound `D/d + 1`.
pub fn check_multiplicativity(
    tree: &TreeSurface,
    r_base: f64,
    r_inc: f64,
    params: GrowParams,
) -> Result<MultiplicativityReport> {
    let bounds = tree.bounds();
    let big = GrownBall::grow(tree, NodePath::root(), r_base + r_inc, params)?;
    let snap_big = big.snapshot(r_base + r_inc)?;
    let snap = big.snapshot(r_base)?;
    let mut sum_u = 0usize;
    for &id in &snap.u_r {
        sum_u += subtree_n_r(tree, big.path_of(id), r_inc, params)?;
    }
    let mut sum_up = 0usize;
    for &id in &snap.u_prime_r {
        sum_up += subtree_n_r(tree, big.path_of(id), r_inc, params)?;
    }
    let d_cap = bounds.delta_cap;
    let sub_constant = 2.0 * (4.0 * d_cap).exp();
    let super_constant = (-4.0 * d_cap).exp() / 2.0 / (d_cap / bounds.delta_minus + 1.0);
    let mut in_sphere = vec![false; big.n_pants()];
    for &id in &snap.sphere {
        in_sphere[id] = true;
    }
    let mut max_chain = 0usize;
    for id in 0..big.n_pants() {
        max_chain = max_chain.max(big.ancestor_chain_len(id, &in_sphere));
    }
    Ok(MultiplicativityReport {
        r_base,
        r_inc,
        n_big: snap_big.n_r,
        sum_over_u: sum_u,
        sum_over_u_prime: sum_up,
        sub_constant,
        super_constant,
        sub_ok: (snap_big.n_r as f64) <= sub_constant * sum_u as f64,
        super_ok: (snap_big.n_r as f64) >= super_constant * sum_up as f64,
        max_chain,
        chain_bound: d_cap / bounds.delta_minus + 1.0,
    })
}

/// Growth-exponent estimate over a radius grid.
#[derive(Debug, Clone)]
pub struct AlphaEstimate {
    /// `(R, mean N_R, ln(mean)/R)` per grid point.
    pub grid: Vec<(f64, f64, f64)>,
    pub alpha_hat: f64,
    /// Deterministic convergence band `15 * D / R_max`.
    pub band: f64,
    /// Bootstrap confidence interval for `ln(mean N)/R` at the grid end.
    pub ci: (f64, f64),
    /// Mean of `ln N_R / R` per grid point (diagnostic curve).
    pub mean_log: Vec<f64>,
    /// Per-trial counts at each grid radius.
    pub counts: Vec<Vec<usize>>,
    /// Grid points dropped because the growth budget was hit there.
    pub truncated: usize,
}

/// Monte Carlo estimate of the frontier growth exponent: mean `N_R` over
/// independent trees per grid radius; the point estimate is `ln(mean)/R` at
/// the grid end. If the growth budget is exceeded at the largest radii the
/// grid is truncated and the drop is reported in the estimate.
pub fn estimate_alpha(
    law: &WeightLaw,
    r_grid: &[f64],
    trials: usize,
    params: GrowParams,
    seed: u64,
) -> Result<AlphaEstimate> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "radius grid must be strictly increasing".to_string(),
        ));
    }
    if trials < 2 {
        return Err(Error::invalid("need at least 2 trials".to_string()));
    }
    let mut r_grid = r_grid.to_vec();
    let mut truncated = 0usize;
    let counts: Vec<Vec<usize>> = loop {
        let r_max = *r_grid.last().unwrap();
        let results: Vec<Result<Vec<usize>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let tree = TreeSurface::binary(*law, rng::trial_seed(seed, t as u64))?;
                let ball = GrownBall::grow(&tree, NodePath::root(), r_max, params)?;
                r_grid.iter().map(|&r| Ok(ball.snapshot(r)?.n_r)).collect()
            })
            .collect();
        let mut counts: Vec<Vec<usize>> = vec![Vec::with_capacity(trials); r_grid.len()];
        let mut budget_hit = false;
        let mut first_err = None;
        for trial in results {
            match trial {
                Ok(row) => {
                    for (i, n) in row.into_iter().enumerate() {
                        counts[i].push(n);
                    }
                }
                Err(Error::Resource { .. }) => budget_hit = true,
                Err(e) => first_err = Some(e),
            }
        }
        if let Some(e) = first_err {
            return Err(e);
        }
        if !budget_hit {
            break counts;
        }
        truncated += 1;
        r_grid.pop();
        if r_grid.is_empty() {
            return Err(Error::Resource {
                context: "growth budget exceeded at every grid radius".to_string(),
                best_bound: None,
            });
        }
    };
    let (lm, lp) = law.half_length_support();
    let bounds = pants_bounds(lm, lp)?;
    let mut grid = Vec::new();
    let mut mean_log = Vec::new();
    for (i, &r) in r_grid.iter().enumerate() {
        let xs: Vec<f64> = counts[i].iter().map(|&n| n as f64).collect();
        let m = stats::mean(&xs);
        let sigma = if r > 0.0 { m.ln() / r } else { 0.0 };
        grid.push((r, m, sigma));
        let logs: Vec<f64> = xs.iter().map(|x| x.max(1.0).ln() / r.max(1e-9)).collect();
        mean_log.push(stats::mean(&logs));
    }
    let r_max = *r_grid.last().unwrap();
    let alpha_hat = grid.last().unwrap().2;
    let band = 15.0 * bounds.delta_cap / r_max;
    let last: Vec<f64> = counts.last().unwrap().iter().map(|&n| n as f64).collect();
    let (lo, hi) = stats::bootstrap_mean_ci(&last, 400, 0.95, seed ^ 0xb00d);
    let ci = (lo.max(1.0).ln() / r_max, hi.max(1.0).ln() / r_max);
    Ok(AlphaEstimate {
        grid,
        alpha_hat,
        band,
        ci,
        mean_log,
        counts,
        truncated,
    })
}

/// Frontier count of the full 3-regular tree around the root marked point,
/// with the per-copy counts of the three embedded rooted copies (copy `c`
/// omits branch `c`). Twice the full count equals the sum of the three
/// copies once every branch of the root lies inside the ball, which holds
/// for radii at least the pants diameter cap.
#[derive(Debug, Clone)]
pub struct FullTreeGrowth {
    pub n_hat: usize,
    pub branch_counts: [usize; 3],
    pub identity_exact: bool,
}

pub fn full_tree_growth(tree: &TreeSurface, r: f64, params: GrowParams) -> Result<FullTreeGrowth> {
    if tree.kind != TreeKind::Full3 {
        return Err(Error::invalid(
            "full_tree_growth needs a full 3-regular tree".to_string(),
        ));
    }
    let ball = GrownBall::grow(tree, NodePath::root(), r, params)?;
    let snap = ball.snapshot(r)?;
    let branch_of = |mut id: usize| -> Option<u8> {
        let mut prev = id;
        while let Some(p) = ball.parent_of(id) {
            prev = id;
            id = p;
        }
        if prev == id {
            None
        } else {
            Some(ball.path_of(prev).first)
        }
    };
    let mut n_hat = 0usize;
    let mut branch_counts = [0usize; 3];
    let mut root_in_sphere = false;
    for &id in &snap.sphere {
        match branch_of(id) {
            None => root_in_sphere = true,
            Some(b) => {
                n_hat += 1;
                for c in 0..3u8 {
                    if c != b {
                        branch_counts[c as usize] += 1;
                    }
                }
            }
        }
    }
    let mut identity_exact = true;
    if root_in_sphere {
        n_hat += 1;
        let outside = (0..3)
            .filter(|&w| ball.child_entry_upper(0, w) > r)
            .count();
        for c in 0..3usize {
            let any_out = (0..3).any(|w| w != c && ball.child_entry_upper(0, w) > r);
            if any_out {
                branch_counts[c] += 1;
            }
        }
        identity_exact = outside == 1;
    }
    Ok(FullTreeGrowth {
        n_hat,
        branch_counts,
        identity_exact,
    })
}

/// Good-set count at one radius: sphere members that are ball-leaves or
/// whose entry parameter lies in the window `[l/2 - 1, l/2 + 1]` on a cuff
/// of length `2l`.
pub fn good_count(tree: &TreeSurface, r: f64, params: GrowParams) -> Result<(usize, usize)> {
    let (lm, lp) = tree.law.half_length_support();
    if lm != lp {
        return Err(Error::invalid(
            "good_count needs a point-mass length law".to_string(),
        ));
    }
    if tree.law.twist != crate::rng::TwistLaw::UniformCircle {
        return Err(Error::invalid("good_count needs uniform twists".to_string()));
    }
    let l = lm;
    let (ball, snap) = grow_ball(tree, r, params)?;
    let mut good = 0usize;
    for &id in &snap.sphere {
        let slots = ball.n_child_slots_of(id);
        let leaf = (0..slots).all(|w| ball.child_entry_upper(id, w) > r);
        if leaf {
            good += 1;
            continue;
        }
        if id == 0 {
            continue; // the root has no entering cuff
        }
        if let Some(t) = ball.entry_parameter(id) {
            if 2.0 >= 2.0 * l {
                good += 1;
                continue;
            }
            let lo = l / 2.0 - 1.0;
            let hi = l / 2.0 + 1.0;
            let t_mod = t.rem_euclid(2.0 * l);
            let in_window = if lo >= 0.0 {
                (lo..=hi).contains(&t_mod)
            } else {
                t_mod <= hi || t_mod >= lo + 2.0 * l
            };
            if in_window {
                good += 1;
            }
        }
    }
    Ok((good, snap.n_r))
}

/// Systole probe report over a truncated full tree with fixed cuff length.
#[derive(Debug, Clone)]
pub struct SystoleReport {
    /// Length of a cuff loop on the metric graph (the along-cuff ring,
    /// which is exact).
    pub cuff_loop: f64,
    /// Shortest one-pants crossing loop found: an arc entering and leaving
    /// through one cuff while crossing the opposite seam an odd number of
    /// times, closed up along the cuff. Odd intersection with a properly
    /// embedded seam arc certifies such loops essential.
    pub crossing_loop: f64,
    /// Shortest explicit two-pants loop turning across the far seams on
    /// both sides of one gluing.
    pub two_pants_loop: f64,
    pub systole_estimate: f64,
    pub n_pants: usize,
    /// Set when growth hit the budget before the requested truncation.
    pub truncated: bool,
}

pub fn systole_probe(
    tree: &TreeSurface,
    r_trunc: f64,
    probe_m: usize,
    word_cap: usize,
    params: GrowParams,
) -> Result<SystoleReport> {
    let (lm, lp) = tree.law.half_length_support();
    if lm != lp {
        return Err(Error::invalid(
            "systole_probe needs a point-mass length law".to_string(),
        ));
    }
    let bounds = tree.bounds();
    if r_trunc < 3.0 * bounds.delta_cap - 1e-9 {
        return Err(Error::invalid(format!(
            "truncation radius {r_trunc} below 3 * diameter cap {}",
            3.0 * bounds.delta_cap
        )));
    }
    let l = lm;
    let (ball, truncated) = match GrownBall::grow(tree, NodePath::root(), r_trunc, params) {
        Ok(b) => (b, false),
        Err(Error::Resource { .. }) => {
            let b = GrownBall::grow(tree, NodePath::root(), 2.0 * bounds.delta_cap, params)?;
            (b, true)
        }
        Err(e) => return Err(e),
    };

    let shape = PantsShape::new(l, l, l)?;
    let chart = PantsChart::new(shape)?;
    let words = enumerate_unfoldings(&chart, word_cap, chart.distance_cap(), 300_000)?;
    let len = 2.0 * l;
    let spacing = len / probe_m as f64;

    // All pants are congruent, so the crossing-arc matrices are computed
    // once per cuff index and shared by every pants.
    let mut inner: Vec<Vec<Vec<f64>>> = Vec::with_capacity(3);
    for cuff in 1..=3usize {
        let mut pts = Vec::with_capacity(probe_m);
        for k in 0..probe_m {
            let bp = BoundaryPoint::new(cuff, k as f64 * spacing)?;
            pts.push(chart.lift(&bp));
        }
        let mut mat = vec![vec![f64::INFINITY; probe_m]; probe_m];
        #[allow(clippy::needless_range_loop)]
        for i in 0..probe_m {
            for j in 0..probe_m {
                let (pi, si) = &pts[i];
                let (pj, sj) = &pts[j];
                let parity = u8::from(si != sj);
                let mut best = f64::INFINITY;
                for u in &words {
                    if u.parity() != parity || u.crossing_parity()[cuff - 1] != 1 {
                        continue;
                    }
                    let c = pi.cosh_distance_to(&u.iso.apply(pj));
                    if c < best {
                        best = c;
                    }
                }
                mat[i][j] = best.acosh_clamped();
            }
        }
        inner.push(mat);
    }

    // One-pants crossing loops: crossing arc plus the return cuff arc.
    let mut crossing_loop = f64::INFINITY;
    for mat in inner.iter() {
        for (i, row) in mat.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                let d = (i as f64 - j as f64).abs() * spacing;
                let arc = d.min(len - d);
                if a + arc < crossing_loop {
                    crossing_loop = a + arc;
                }
            }
        }
    }

    // Two-pants loops across each gluing: odd-crossing arcs on both sides,
    // closed through the twist offset.
    let mut two_pants = f64::INFINITY;
    for id in 0..ball.n_pants() {
        for which in 0..ball.n_child_slots_of(id) {
            let Some(child) = ball.child_of(id, which) else {
                continue;
            };
            let w = ball.parent_weight(child);
            let tau = w.arc_twist();
            let pc = ball.parent_slot(id, which) as usize;
            for i in 0..probe_m {
                for j in 0..probe_m {
                    let a = inner[pc][i][j];
                    if a >= two_pants {
                        continue;
                    }
                    let ti = (i as f64 * spacing - tau).rem_euclid(len);
                    let tj = (j as f64 * spacing - tau).rem_euclid(len);
                    let ci = (ti / spacing).round() as usize % probe_m;
                    let cj = (tj / spacing).round() as usize % probe_m;
                    let di = (ti - ci as f64 * spacing).abs();
                    let dj = (tj - cj as f64 * spacing).abs();
                    let snap_i = di.min(len - di);
                    let snap_j = dj.min(len - dj);
                    let cand = a + inner[0][cj][ci] + snap_i + snap_j;
                    if cand < two_pants {
                        two_pants = cand;
                    }
                }
            }
        }
    }

    let cuff_loop = probe_m as f64 * spacing;
    Ok(SystoleReport {
        cuff_loop,
        crossing_loop,
        two_pants_loop: two_pants,
        systole_estimate: cuff_loop.min(crossing_loop).min(two_pants),
        n_pants: ball.n_pants(),
        truncated,
    })
}

/// Statistical rendering of the spatial Markov property: frontier counts of
/// two grandchild subtrees below the first maximal frontier pants are
/// pairwise independent and distributed like a fresh tree's count.
#[derive(Debug, Clone)]
pub struct MarkovReport {
    pub pairs: usize,
    pub skipped: usize,
    pub p_independence: f64,
    pub p_marginal: f64,
}

pub fn markov_independence_test(
    law: &WeightLaw,
    r: f64,
    r_sub: f64,
    trials: usize,
    params: GrowParams,
    seed: u64,
) -> Result<MarkovReport> {
    if trials < 100 {
        return Err(Error::invalid(
            "markov test needs at least 100 trials".to_string(),
        ));
    }
    if r_sub <= 0.0 {
        return Err(Error::invalid(
            "degenerate subtree radius: every grandchild count is 1".to_string(),
        ));
    }
    let results: Vec<Result<Option<(usize, usize)>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tree = TreeSurface::binary(*law, rng::trial_seed(seed, t as u64))?;
            let ball = GrownBall::grow(&tree, NodePath::root(), r, params)?;
            let snap = ball.snapshot(r)?;
            let Some(&u0) = snap.u_r.first() else {
                return Ok(None);
            };
            let (Some(c0), Some(c1)) = (ball.child_of(u0, 0), ball.child_of(u0, 1)) else {
                return Ok(None);
            };
            let g0 = ball.path_of(c0).child(0, tree.kind)?;
            let g1 = ball.path_of(c1).child(0, tree.kind)?;
            let n0 = subtree_n_r(&tree, g0, r_sub, params)?;
            let n1 = subtree_n_r(&tree, g1, r_sub, params)?;
            Ok(Some((n0, n1)))
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut skipped = 0usize;
    for r in results {
        match r? {
            Some((a, b)) => {
                xs.push(a as f64);
                ys.push(b as f64);
            }
            None => skipped += 1,
        }
    }
    if xs.len() < 20 {
        return Err(Error::invalid(format!(
            "too few usable trials ({}) for the markov test",
            xs.len()
        )));
    }
    let mut pooled: Vec<f64> = xs.iter().chain(ys.iter()).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let median = pooled[pooled.len() / 2];
    let mut table = [[0u64; 2]; 2];
    for (x, y) in xs.iter().zip(ys.iter()) {
        table[usize::from(*x > median)][usize::from(*y > median)] += 1;
    }
    let p_independence = stats::chi_square_independence_2x2_p(table)?;
    let fresh: Vec<Result<usize>> = (0..xs.len())
        .into_par_iter()
        .map(|t| {
            let tree = TreeSurface::binary(*law, rng::trial_seed(seed ^ 0xf4e5_11aa, t as u64))?;
            subtree_n_r(&tree, NodePath::root(), r_sub, params)
        })
        .collect();
    let mut fresh_counts = Vec::new();
    for f in fresh {
        fresh_counts.push(f? as f64);
    }
    let p_marginal = stats::ks_two_sample_p(&xs, &fresh_counts)?;
    Ok(MarkovReport {
        pairs: xs.len(),
        skipped,
        p_independence,
        p_marginal,
    })
}
