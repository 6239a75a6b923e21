//! Command-line harness for random hyperbolic surface experiments.

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::{load_config, parse_f64_list, parse_length_law, parse_twist_law, parse_usize_list, resolve};
use hypsurf::WeightLaw;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "hypsurf", version, about = "Random hyperbolic surfaces from pants gluings")]
struct Cli {
    /// Flat key = value config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seam lengths, bounds and collar widths for one pants.
    Pants {
        /// Three cuff half-lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        half_lengths: Vec<f64>,
    },
    /// Sample surfaces and write their records.
    Gen {
        #[arg(long)]
        genus: Option<usize>,
        /// Also dump each surface's metric graph as a text edge list.
        #[arg(long)]
        dump_metric: bool,
        #[arg(long)]
        length: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tree-surface growth curves and the concentration histogram.
    Growth {
        #[arg(long)]
        length: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        /// Radius grid, comma separated.
        #[arg(long)]
        r_grid: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        word_cap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth-exponent estimation; `--preset l-sweep` runs the fixed-length
    /// trend experiment.
    Alpha {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        length: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        r_grid: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        word_cap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter scaling over a genus list, or the collar preset.
    Diameter {
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        genus_list: Option<String>,
        #[arg(long)]
        length: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        word_cap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exploration traces, bad-step tables and merge statistics.
    Explore {
        /// trace | badsteps | merge
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        genus_list: Option<String>,
        #[arg(long)]
        length: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        word_cap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify manifests and collate run summaries under a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn law_from(
    length: Option<String>,
    twist: Option<String>,
    cfg: &BTreeMap<String, String>,
    default_length: Option<&str>,
    default_twist: Option<&str>,
) -> Result<WeightLaw> {
    let length = resolve::<String>(
        length,
        cfg,
        "length",
        default_length.map(|s| s.to_string()),
    )?;
    let twist = resolve::<String>(twist, cfg, "twist", default_twist.map(|s| s.to_string()))?;
    Ok(WeightLaw {
        length: parse_length_law(&length)?,
        twist: parse_twist_law(&twist)?,
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg: BTreeMap<String, String> = match &cli.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    match cli.command {
        Command::Pants { half_lengths } => commands::cmd_pants(&half_lengths),
        Command::Gen {
            genus,
            dump_metric,
            length,
            twist,
            count,
            seed,
            out,
        } => {
            let law = law_from(length, twist, &cfg, None, Some("uniform"))?;
            commands::cmd_gen(
                &resolve(out, &cfg, "out", None::<PathBuf>)?,
                resolve(genus, &cfg, "genus", None)?,
                law,
                resolve(count, &cfg, "count", Some(1))?,
                resolve(seed, &cfg, "seed", None)?,
                dump_metric.then_some((8, 8)),
            )
        }
        Command::Growth {
            length,
            twist,
            r_grid,
            trials,
            m,
            word_cap,
            seed,
            out,
        } => {
            let law = law_from(length, twist, &cfg, Some("pm:2.0"), Some("uniform"))?;
            let grid = parse_f64_list(&resolve::<String>(
                r_grid,
                &cfg,
                "r_grid",
                Some("2,4,6,8,10,12".to_string()),
            )?)?;
            commands::cmd_growth(
                &resolve(out, &cfg, "out", None::<PathBuf>)?,
                law,
                &grid,
                resolve(trials, &cfg, "trials", Some(100))?,
                resolve(m, &cfg, "m", Some(16))?,
                resolve(word_cap, &cfg, "word_cap", Some(8))?,
                resolve(seed, &cfg, "seed", None)?,
            )
        }
        Command::Alpha {
            preset,
            length,
            twist,
            r_grid,
            trials,
            m,
            word_cap,
            seed,
            out,
        } => {
            let out = resolve(out, &cfg, "out", None::<PathBuf>)?;
            let trials = resolve(trials, &cfg, "trials", Some(200))?;
            let m = resolve(m, &cfg, "m", Some(8))?;
            let word_cap = resolve(word_cap, &cfg, "word_cap", Some(8))?;
            let seed = resolve(seed, &cfg, "seed", None)?;
            match preset.or_else(|| cfg.get("preset").cloned()).as_deref() {
                Some("l-sweep") => commands::cmd_alpha_sweep(&out, trials, m, word_cap, seed),
                None => {
                    let law = law_from(length, twist, &cfg, None, Some("uniform"))?;
                    let grid = parse_f64_list(&resolve::<String>(
                        r_grid,
                        &cfg,
                        "r_grid",
                        Some("4,8,12".to_string()),
                    )?)?;
                    commands::cmd_alpha_single(&out, law, &grid, trials, m, word_cap, seed)
                }
                Some(other) => anyhow::bail!("unknown alpha preset {other:?}"),
            }
        }
        Command::Diameter {
            preset,
            genus_list,
            length,
            twist,
            trials,
            m,
            word_cap,
            seed,
            out,
        } => {
            let out = resolve(out, &cfg, "out", None::<PathBuf>)?;
            let m = resolve(m, &cfg, "m", Some(8))?;
            let word_cap = resolve(word_cap, &cfg, "word_cap", Some(8))?;
            let seed = resolve(seed, &cfg, "seed", None)?;
            match preset.or_else(|| cfg.get("preset").cloned()).as_deref() {
                Some("collar") => commands::cmd_diameter_collar(
                    &out,
                    resolve(trials, &cfg, "trials", Some(10))?,
                    32,
                    word_cap,
                    seed,
                ),
                None => {
                    let law = law_from(length, twist, &cfg, Some("pm:2.0"), Some("uniform"))?;
                    let genus = parse_usize_list(&resolve::<String>(
                        genus_list,
                        &cfg,
                        "genus_list",
                        Some("12,22,42,82".to_string()),
                    )?)?;
                    commands::cmd_diameter(
                        &out,
                        &genus,
                        law,
                        resolve(trials, &cfg, "trials", Some(20))?,
                        m,
                        word_cap,
                        seed,
                    )
                }
                Some(other) => anyhow::bail!("unknown diameter preset {other:?}"),
            }
        }
        Command::Explore {
            mode,
            genus,
            genus_list,
            length,
            twist,
            trials,
            beta,
            k,
            m,
            word_cap,
            seed,
            out,
        } => {
            let out = resolve(out, &cfg, "out", None::<PathBuf>)?;
            let law = law_from(length, twist, &cfg, Some("pm:2.0"), Some("uniform"))?;
            let trials = resolve(trials, &cfg, "trials", Some(100))?;
            let m = resolve(m, &cfg, "m", Some(8))?;
            let word_cap = resolve(word_cap, &cfg, "word_cap", Some(8))?;
            let seed = resolve(seed, &cfg, "seed", None)?;
            match mode
                .or_else(|| cfg.get("mode").cloned())
                .as_deref()
                .unwrap_or("trace")
            {
                "trace" => commands::cmd_explore_trace(
                    &out,
                    resolve(genus, &cfg, "genus", Some(22))?,
                    law,
                    trials,
                    m,
                    word_cap,
                    seed,
                ),
                "badsteps" => {
                    let genus = parse_usize_list(&resolve::<String>(
                        genus_list,
                        &cfg,
                        "genus_list",
                        Some("12,22,42,82".to_string()),
                    )?)?;
                    commands::cmd_explore_badsteps(
                        &out,
                        &genus,
                        law,
                        trials,
                        resolve(beta, &cfg, "beta", Some(0.4))?,
                        resolve(k, &cfg, "k", Some(11))?,
                        m,
                        word_cap,
                        seed,
                    )
                }
                "merge" => commands::cmd_explore_merge(
                    &out,
                    resolve(genus, &cfg, "genus", Some(82))?,
                    law,
                    trials,
                    m,
                    word_cap,
                    seed,
                ),
                other => anyhow::bail!("unknown explore mode {other:?}"),
            }
        }
        Command::Report { dir } => commands::cmd_report(&dir),
    }
}
