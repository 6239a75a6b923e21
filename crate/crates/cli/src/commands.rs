//! Experiment command implementations: orchestration, CSV emission,
//! deterministic replay.

use crate::config::law_descriptor;
use crate::output::{fmt_f64, OutputDir};
use anyhow::{bail, Context, Result};
use hypsurf::explore::{
    badstep_stats, diameter_by_exploration, explore_sampled, merge_experiment, StopRule,
};
use hypsurf::metric::build_surface_metric;
use hypsurf::pants::{collar_width, pants_bounds, seam_length, PantsShape};
use hypsurf::rng::trial_seed;
use hypsurf::stats::{linear_fit, mean};
use hypsurf::surface::{
    assign_weights, connectivity, sample_surface, serialize, EdgeWeight, Pairing,
};
use hypsurf::tree::{estimate_alpha, grow_ball, GrowParams, TreeSurface};
use hypsurf::{LengthLaw, TwistLaw, WeightLaw};
use serde_json::json;
use std::path::Path;

pub fn cmd_pants(half_lengths: &[f64]) -> Result<()> {
    if half_lengths.len() != 3 {
        bail!("--half-lengths needs exactly three values");
    }
    let shape = PantsShape::new(half_lengths[0], half_lengths[1], half_lengths[2])
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    println!("pants half-lengths: {:?}", shape.half_lengths());
    for (i, j) in [(1usize, 2usize), (2, 3), (3, 1)] {
        let s = seam_length(&shape, i, j).map_err(|e| anyhow::anyhow!("{e}"))?;
        println!("seam({i},{j}) = {s:.9}");
    }
    let [l1, l2, l3] = shape.half_lengths();
    let lm = l1.min(l2).min(l3);
    let lp = l1.max(l2).max(l3);
    let b = pants_bounds(lm, lp).map_err(|e| anyhow::anyhow!("{e}"))?;
    println!("delta_minus = {:.9}", b.delta_minus);
    println!("delta_plus  = {:.9}", b.delta_plus);
    println!("diameter_cap = {:.9}", b.delta_cap);
    for (i, l) in shape.half_lengths().iter().enumerate() {
        let w = collar_width(2.0 * l).map_err(|e| anyhow::anyhow!("{e}"))?;
        println!("collar_width(cuff {}) = {:.9}", i + 1, w);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gen(
    out: &Path,
    genus: usize,
    law: WeightLaw,
    count: usize,
    seed: u64,
    dump_metric: Option<(usize, usize)>,
) -> Result<()> {
    let config = json!({
        "command": "gen", "genus": genus, "law": law_descriptor(&law),
        "count": count, "seed": seed,
        "dump_metric": dump_metric.map(|(m, w)| format!("m={m},word_cap={w}")),
    });
    let seeds: Vec<u64> = (0..count as u64).map(|t| trial_seed(seed, t)).collect();
    let mut dir = OutputDir::create(out, "gen", config, seed, seeds.clone())?;
    let mut rows = Vec::new();
    for (t, s) in seeds.iter().enumerate() {
        let g = sample_surface(genus, &law, *s).map_err(|e| anyhow::anyhow!("{e}"))?;
        let (conn, comps) = connectivity(&g);
        dir.write_text(&format!("surface-{t:04}.txt"), &serialize(&g))?;
        if let Some((m, word_cap)) = dump_metric {
            let metric =
                build_surface_metric(&g, m, word_cap).map_err(|e| anyhow::anyhow!("{e}"))?;
            dir.write_text(&format!("metric-{t:04}.txt"), &metric.dump_edges())?;
        }
        rows.push(format!("{t},{s},{conn},{comps}"));
    }
    dir.write_csv("surfaces.csv", "trial,seed,connected,components", &rows)?;
    dir.finish()?;
    println!("wrote {count} surface records to {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_growth(
    out: &Path,
    law: WeightLaw,
    r_grid: &[f64],
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let config = json!({
        "command": "growth", "law": law_descriptor(&law), "r_grid": r_grid,
        "trials": trials, "m": m, "word_cap": word_cap, "seed": seed,
    });
    let seeds: Vec<u64> = (0..trials as u64).map(|t| trial_seed(seed, t)).collect();
    let mut dir = OutputDir::create(out, "growth", config, seed, seeds.clone())?;
    let params = GrowParams {
        m,
        word_cap,
        pants_budget: 400_000,
    };
    let (lm, lp) = law.half_length_support();
    let bounds = pants_bounds(lm, lp).map_err(|e| anyhow::anyhow!("{e}"))?;
    let r_max = *r_grid.last().context("empty r grid")?;
    let mut rows = Vec::new();
    let mut violations = 0usize;
    let mut log_ratios: Vec<Vec<f64>> = vec![Vec::new(); r_grid.len()];
    for (t, s) in seeds.iter().enumerate() {
        let tree = TreeSurface::binary(law, *s).map_err(|e| anyhow::anyhow!("{e}"))?;
        let (ball, _) = grow_ball(&tree, r_max, params).map_err(|e| anyhow::anyhow!("{e}"))?;
        for (gi, &r) in r_grid.iter().enumerate() {
            let snap = ball.snapshot(r).map_err(|e| anyhow::anyhow!("{e}"))?;
            let ln_ratio = (snap.n_r as f64).ln() / r.max(1e-9);
            // Deterministic growth bounds.
            if r > 0.0
                && (ln_ratio < 2.0f64.ln() / bounds.delta_cap - 4.0 * 2.0f64.ln() / r - 1e-9
                    || ln_ratio > 1.0 + 3.0 * bounds.delta_cap / r + 1e-9)
            {
                violations += 1;
            }
            log_ratios[gi].push(ln_ratio);
            rows.push(format!(
                "{r},{t},{},{}",
                snap.n_r,
                snap.ball.len()
            ));
        }
    }
    dir.write_csv("growth.csv", "r,trial,n_r,ball_size", &rows)?;
    // Concentration histogram of ln N_R / R per grid radius.
    let mut hist_rows = Vec::new();
    for (gi, &r) in r_grid.iter().enumerate() {
        let xs = &log_ratios[gi];
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bins = 12usize;
        let width = ((hi - lo) / bins as f64).max(1e-12);
        let mut counts = vec![0usize; bins];
        for &x in xs {
            let b = (((x - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (b, c) in counts.iter().enumerate() {
            hist_rows.push(format!(
                "{r},{},{},{c}",
                fmt_f64(lo + b as f64 * width),
                fmt_f64(lo + (b + 1) as f64 * width)
            ));
        }
    }
    dir.write_csv(
        "concentration_histogram.csv",
        "r,bin_lo,bin_hi,count",
        &hist_rows,
    )?;
    dir.write_csv(
        "growth_summary.csv",
        "trials,bound_violations",
        &[format!("{trials},{violations}")],
    )?;
    // Good-set counts and a systole probe when the law supports them
    // (fixed length, uniform twists).
    let (lm2, lp2) = law.half_length_support();
    if lm2 == lp2 && law.twist == TwistLaw::UniformCircle {
        let mut good_rows = Vec::new();
        for (t, s) in seeds.iter().enumerate() {
            let tree = TreeSurface::binary(law, *s).map_err(|e| anyhow::anyhow!("{e}"))?;
            let (good, n_r) = hypsurf::tree::good_count(&tree, r_max, params)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            good_rows.push(format!("{t},{r_max},{good},{n_r}"));
        }
        dir.write_csv("goodset.csv", "trial,r,good,n_r", &good_rows)?;
        let full = TreeSurface::full(law, trial_seed(seed, 0xfff))
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let probe = hypsurf::tree::systole_probe(
            &full,
            3.0 * bounds.delta_cap,
            32,
            word_cap,
            params,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        dir.write_csv(
            "systole.csv",
            "cuff_loop,crossing_loop,two_pants_loop,estimate,n_pants,truncated",
            &[format!(
                "{},{},{},{},{},{}",
                fmt_f64(probe.cuff_loop),
                fmt_f64(probe.crossing_loop),
                fmt_f64(probe.two_pants_loop),
                fmt_f64(probe.systole_estimate),
                probe.n_pants,
                probe.truncated
            )],
        )?;
    }
    dir.finish()?;
    println!("growth: {trials} trials, deterministic-bound violations = {violations}");
    Ok(())
}

/// The l-sweep preset grids: per fixed half-length, a radius grid chosen so
/// trees stay at desk scale while the grid end dominates the transient.
pub fn sweep_grid(l: f64) -> Vec<f64> {
    if l <= 0.5 {
        vec![4.0, 8.0, 12.0, 14.0]
    } else if l <= 1.0 {
        vec![4.0, 8.0, 12.0]
    } else if l <= 2.0 {
        vec![3.0, 6.0, 9.0]
    } else {
        vec![3.0, 6.0, 8.0]
    }
}

pub fn cmd_alpha_sweep(
    out: &Path,
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let ls = [0.5, 1.0, 2.0, 4.0];
    let config = json!({
        "command": "alpha", "preset": "l-sweep", "l_values": ls,
        "trials": trials, "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "alpha", config, seed, vec![])?;
    let params = GrowParams {
        m,
        word_cap,
        pants_budget: 400_000,
    };
    let mut grid_rows = Vec::new();
    let mut summary_rows = Vec::new();
    let mut alphas = Vec::new();
    for (li, &l) in ls.iter().enumerate() {
        let law = WeightLaw {
            length: LengthLaw::PointMass(2.0 * l),
            twist: TwistLaw::UniformCircle,
        };
        let grid = sweep_grid(l);
        let est = estimate_alpha(&law, &grid, trials, params, trial_seed(seed, li as u64))
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        if est.truncated > 0 {
            eprintln!("warning: l = {l}: growth budget hit, grid truncated by {} point(s)", est.truncated);
        }
        for ((r, mean_n, sigma), mean_log) in est.grid.iter().zip(&est.mean_log) {
            grid_rows.push(format!(
                "{l},{r},{},{},{}",
                fmt_f64(*mean_n),
                fmt_f64(*sigma),
                fmt_f64(*mean_log)
            ));
        }
        let bounds = pants_bounds(l, l).map_err(|e| anyhow::anyhow!("{e}"))?;
        let lower = 2.0f64.ln() / bounds.delta_cap;
        let upper = (2.0f64.ln() / bounds.delta_minus).min(1.0);
        summary_rows.push(format!(
            "{l},{},{},{},{},{},{}",
            fmt_f64(est.alpha_hat),
            fmt_f64(est.band),
            fmt_f64(est.ci.0),
            fmt_f64(est.ci.1),
            fmt_f64(lower),
            fmt_f64(upper)
        ));
        alphas.push(est.alpha_hat);
        println!("l = {l}: alpha_hat = {:.4} (band {:.3})", est.alpha_hat, est.band);
    }
    dir.write_csv("alpha_grid.csv", "l,r,mean_n,sigma,mean_log", &grid_rows)?;
    dir.write_csv(
        "alpha_summary.csv",
        "l,alpha_hat,band,ci_lo,ci_hi,lower_bound,upper_bound",
        &summary_rows,
    )?;
    dir.finish()?;
    let increasing = alphas.windows(2).all(|w| w[0] < w[1]);
    println!("alpha trend strictly increasing: {increasing}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_alpha_single(
    out: &Path,
    law: WeightLaw,
    r_grid: &[f64],
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let config = json!({
        "command": "alpha", "law": law_descriptor(&law), "r_grid": r_grid,
        "trials": trials, "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "alpha", config, seed, vec![])?;
    let params = GrowParams {
        m,
        word_cap,
        pants_budget: 400_000,
    };
    let est = estimate_alpha(&law, r_grid, trials, params, seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    if est.truncated > 0 {
        eprintln!(
            "warning: growth budget hit, grid truncated by {} point(s)",
            est.truncated
        );
    }
    let mut rows = Vec::new();
    for ((r, mean_n, sigma), mean_log) in est.grid.iter().zip(&est.mean_log) {
        rows.push(format!(
            "{r},{},{},{}",
            fmt_f64(*mean_n),
            fmt_f64(*sigma),
            fmt_f64(*mean_log)
        ));
    }
    dir.write_csv("alpha_grid.csv", "r,mean_n,sigma,mean_log", &rows)?;
    dir.write_csv(
        "alpha_summary.csv",
        "alpha_hat,band,ci_lo,ci_hi",
        &[format!(
            "{},{},{},{}",
            fmt_f64(est.alpha_hat),
            fmt_f64(est.band),
            fmt_f64(est.ci.0),
            fmt_f64(est.ci.1)
        )],
    )?;
    dir.finish()?;
    println!("alpha_hat = {:.4} (band {:.3})", est.alpha_hat, est.band);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_diameter(
    out: &Path,
    genus_list: &[usize],
    law: WeightLaw,
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    if genus_list.windows(2).any(|w| w[0] >= w[1]) {
        bail!("genus list must be ascending");
    }
    let config = json!({
        "command": "diameter", "genus_list": genus_list, "law": law_descriptor(&law),
        "trials": trials, "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "diameter", config, seed, vec![])?;
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    let mut corrected_means = Vec::new();
    let mut mid_means = Vec::new();
    let mut upper_means = Vec::new();
    for (gi, &genus) in genus_list.iter().enumerate() {
        let run = diameter_by_exploration(
            genus,
            &law,
            trials,
            trial_seed(seed, gi as u64),
            m,
            word_cap,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut corrected = Vec::new();
        let mut mids = Vec::new();
        let mut uppers = Vec::new();
        for t in &run.trials {
            corrected.push(t.metric_lower);
            mids.push(0.5 * (t.metric_lower + t.metric_upper));
            uppers.push(t.metric_upper);
            rows.push(format!(
                "{genus},{},{},{},{},{},{},{}",
                t.seed_index,
                fmt_f64(t.metric_lower),
                fmt_f64(0.5 * (t.metric_lower + t.metric_upper)),
                fmt_f64(t.metric_upper),
                fmt_f64(t.exploration_lower),
                fmt_f64(t.exploration_upper),
                t.contains
            ));
        }
        println!(
            "g = {genus}: mean corrected diameter {:.3} (bracket mid {:.3}, upper {:.3}), {} connected, {} disconnected",
            mean(&corrected),
            mean(&mids),
            mean(&uppers),
            run.trials.len(),
            run.disconnected
        );
        xs.push((genus as f64).ln());
        corrected_means.push(mean(&corrected));
        mid_means.push(mean(&mids));
        upper_means.push(mean(&uppers));
    }
    dir.write_csv(
        "diameter.csv",
        "genus,trial,diam_corrected,diam_mid,diam_upper,expl_lower,expl_upper,contains",
        &rows,
    )?;
    // Matching growth-exponent run for the comparison column.
    let (lm, lp) = law.half_length_support();
    let alpha = if lm == lp {
        let grid = sweep_grid(lm);
        estimate_alpha(
            &law,
            &grid,
            200,
            GrowParams {
                m,
                word_cap,
                pants_budget: 400_000,
            },
            seed ^ 0xa1fa,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?
        .alpha_hat
    } else {
        f64::NAN
    };
    let (slope_c, _) = linear_fit(&xs, &corrected_means);
    let (slope_m, _) = linear_fit(&xs, &mid_means);
    let (slope_u, _) = linear_fit(&xs, &upper_means);
    dir.write_csv(
        "diameter_fit.csv",
        "slope_corrected,slope_mid,slope_upper,alpha_hat,inv_alpha,ratio",
        &[format!(
            "{},{},{},{},{},{}",
            fmt_f64(slope_c),
            fmt_f64(slope_m),
            fmt_f64(slope_u),
            fmt_f64(alpha),
            fmt_f64(1.0 / alpha),
            fmt_f64(slope_c * alpha)
        )],
    )?;
    dir.finish()?;
    println!(
        "slope (corrected) = {slope_c:.3}, 1/alpha_hat = {:.3}, ratio = {:.3}",
        1.0 / alpha,
        slope_c * alpha
    );
    Ok(())
}

/// Genus-2 fixture with one separating cuff of the given length: two pants,
/// each closed by a loop, joined by a single bridge edge.
pub fn collar_fixture(bridge_length: f64, loop_length: f64, seed: u64) -> Result<hypsurf::surface::WeightedSurfaceGraph> {
    let pairing = Pairing::from_pairs(2, vec![(0, 1), (3, 4), (2, 5)])
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let law = WeightLaw {
        length: LengthLaw::PointMass(loop_length),
        twist: TwistLaw::UniformCircle,
    };
    let mut graph = assign_weights(
        &pairing,
        &law,
        &mut hypsurf::rng::stream_indexed(seed, hypsurf::rng::Domain::Weights, 0),
        seed,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    for (e, &(a, b)) in graph.pairing.pairs().iter().enumerate() {
        if (a, b) == (2, 5) {
            graph.weights[e] = EdgeWeight {
                length: bridge_length,
                twist: graph.weights[e].twist,
            };
        }
    }
    Ok(graph)
}

pub fn cmd_diameter_collar(out: &Path, instances: usize, m: usize, word_cap: usize, seed: u64) -> Result<()> {
    let config = json!({
        "command": "diameter", "preset": "collar", "instances": instances,
        "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "diameter", config, seed, vec![])?;
    let target = 2.0 * collar_width(0.01).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut rows = Vec::new();
    let mut all_pass = true;
    for t in 0..instances {
        let graph = collar_fixture(0.01, 2.0, trial_seed(seed, t as u64))?;
        let metric = build_surface_metric(&graph, m, word_cap).map_err(|e| anyhow::anyhow!("{e}"))?;
        let (lo, hi) = metric.diameter_estimate().map_err(|e| anyhow::anyhow!("{e}"))?;
        let pass = lo >= target;
        all_pass &= pass;
        rows.push(format!("{t},{},{},{},{pass}", fmt_f64(lo), fmt_f64(hi), fmt_f64(target)));
    }
    dir.write_csv(
        "collar.csv",
        "instance,diam_lower,diam_upper,target,pass",
        &rows,
    )?;
    dir.finish()?;
    println!("collar preset: all {instances} instances above 2*collar_width(0.01): {all_pass}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_explore_trace(
    out: &Path,
    genus: usize,
    law: WeightLaw,
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let config = json!({
        "command": "explore", "mode": "trace", "genus": genus, "law": law_descriptor(&law),
        "trials": trials, "m": m, "word_cap": word_cap, "seed": seed,
    });
    let seeds: Vec<u64> = (0..trials as u64).map(|t| trial_seed(seed, t)).collect();
    let mut dir = OutputDir::create(out, "explore", config, seed, seeds.clone())?;
    let mut rows = Vec::new();
    for (t, s) in seeds.iter().enumerate() {
        let (_, report) = explore_sampled(
            genus,
            &law,
            StopRule::AllVertices,
            *s,
            m,
            word_cap,
            false,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        for step in &report.steps {
            rows.push(format!(
                "{t},{},{}:{},{}:{},{},{},{}",
                step.index,
                step.selected.0,
                step.selected.1,
                step.partner.0,
                step.partner.1,
                step.bad,
                fmt_f64(step.d_plus),
                step.discovered
            ));
        }
    }
    dir.write_csv(
        "trace.csv",
        "trial,step,selected,partner,bad,d_plus,discovered",
        &rows,
    )?;
    dir.finish()?;
    println!("explore trace: {trials} trials at genus {genus}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_explore_badsteps(
    out: &Path,
    genus_list: &[usize],
    law: WeightLaw,
    trials: usize,
    beta: f64,
    k: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let config = json!({
        "command": "explore", "mode": "badsteps", "genus_list": genus_list,
        "law": law_descriptor(&law), "trials": trials, "beta": beta, "k": k,
        "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "explore", config, seed, vec![])?;
    let mut rows = Vec::new();
    for (gi, &genus) in genus_list.iter().enumerate() {
        let stats = badstep_stats(
            genus,
            &law,
            trials,
            beta,
            k,
            trial_seed(seed, gi as u64),
            m,
            word_cap,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        rows.push(format!(
            "{genus},{trials},{},{},{},{},{}",
            stats.premature,
            fmt_f64(stats.violations_first_steps as f64 / trials as f64),
            fmt_f64(stats.violations_mid as f64 / trials as f64),
            fmt_f64(stats.violations_total as f64 / trials as f64),
            fmt_f64(stats.first_step_bad_rate)
        ));
        println!(
            "g = {genus}: violation fractions first/mid/total = {:.4}/{:.4}/{:.4}",
            stats.violations_first_steps as f64 / trials as f64,
            stats.violations_mid as f64 / trials as f64,
            stats.violations_total as f64 / trials as f64
        );
    }
    dir.write_csv(
        "badsteps.csv",
        "genus,trials,premature,viol_first_frac,viol_mid_frac,viol_total_frac,first_step_bad_rate",
        &rows,
    )?;
    dir.finish()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_explore_merge(
    out: &Path,
    genus: usize,
    law: WeightLaw,
    trials: usize,
    m: usize,
    word_cap: usize,
    seed: u64,
) -> Result<()> {
    let g = genus as f64;
    let quota_hi = (g.sqrt() * g.ln()).ceil() as usize;
    let quota_lo = g.powf(0.5 - 1.0 / g.ln().powf(0.75)).ceil() as usize;
    let config = json!({
        "command": "explore", "mode": "merge", "genus": genus,
        "law": law_descriptor(&law), "trials": trials,
        "quota_high": quota_hi, "quota_low": quota_lo,
        "m": m, "word_cap": word_cap, "seed": seed,
    });
    let mut dir = OutputDir::create(out, "explore", config, seed, vec![])?;
    let mut rows = Vec::new();
    for (name, quota) in [("sqrt_g_ln_g", quota_hi), ("below_sqrt_g", quota_lo)] {
        let stats = merge_experiment(genus, &law, quota, trials, seed, m, word_cap)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        rows.push(format!(
            "{name},{quota},{trials},{},{},{}",
            stats.merged,
            stats.premature,
            fmt_f64(stats.merge_fraction)
        ));
        println!("quota {name} ({quota} vertices): merge fraction {:.3}", stats.merge_fraction);
    }
    dir.write_csv(
        "merge.csv",
        "quota_kind,quota,trials,merged,premature,merge_fraction",
        &rows,
    )?;
    dir.finish()?;
    Ok(())
}

/// Collates manifests below a directory: verifies file digests and lists
/// per-run summaries.
pub fn cmd_report(root: &Path) -> Result<()> {
    let mut found = 0usize;
    let mut ok = 0usize;
    let mut entries: Vec<std::path::PathBuf> = Vec::new();
    visit(root, &mut entries)?;
    entries.sort();
    for manifest_path in entries {
        found += 1;
        let text = std::fs::read_to_string(&manifest_path)?;
        let manifest: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", manifest_path.display()))?;
        let dir = manifest_path.parent().unwrap();
        let mut verified = true;
        if let Some(files) = manifest["files"].as_array() {
            for f in files {
                let name = f["name"].as_str().unwrap_or_default();
                let want = f["sha256"].as_str().unwrap_or_default();
                let bytes = std::fs::read(dir.join(name))
                    .with_context(|| format!("reading {}", dir.join(name).display()))?;
                if crate::output::sha256_hex(&bytes) != want {
                    verified = false;
                }
            }
        }
        if verified {
            ok += 1;
        }
        println!(
            "{}: command={} seed={} files_verified={}",
            manifest_path.display(),
            manifest["command"].as_str().unwrap_or("?"),
            manifest["master_seed"],
            verified
        );
    }
    println!("report: {ok}/{found} manifests verified");
    if ok != found {
        bail!("digest verification failed for {} manifest(s)", found - ok);
    }
    Ok(())
}

fn visit(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    if !dir.is_dir() {
        return Ok(());
    }
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            visit(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "manifest.json") {
            out.push(path);
        }
    }
    Ok(())
}
