//! Command-line front end: `run`, `compare`, `cohesion`, `query` and
//! `export` subcommands over the patport library.
//!
//! Configuration comes from flags, optionally seeded by a TOML config
//! file; flags win. There is no interactive prompting: runs are batch
//! deterministic, and failures exit nonzero with a machine-readable
//! `error[<code>]` prefix on stderr.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use patport::ingest::{build_search_string, CbsaGroup, QuerySpec};
use patport::pipeline;
use patport::portfolio::{ClassMode, Counting};
use patport::taxonomy::{load_basemap, Level};
use patport::{Cohesion, Error};

#[derive(Parser)]
#[command(name = "patport", version, about = "Patent portfolio diversity and network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One full analysis run: parse, count, export, append to the stores
    Run(RunArgs),
    /// Cross-portfolio correlations and the (1 - cosine) distance matrix
    Compare(CompareArgs),
    /// The 16 network cohesion measures of one record set
    Cohesion(CohesionArgs),
    /// Print the USPTO advanced-search string for a query
    Query(QueryArgs),
    /// Re-emit the map files for an existing store column
    Export(ExportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Set name (at most 10 characters), used as the store variable name
    #[arg(long)]
    set: Option<String>,
    /// Classification level: ipc3 or ipc4
    #[arg(long)]
    level: Option<String>,
    /// Tagged-format record file (repeatable; batches are concatenated)
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    /// Tab-separated tabular import (repeatable)
    #[arg(long = "tabular")]
    tabular: Vec<PathBuf>,
    #[arg(long)]
    basemap_matrix: Option<PathBuf>,
    #[arg(long)]
    basemap_layout: Option<PathBuf>,
    /// Store directory holding matrix.tsv, rao.tsv and per-set outputs
    #[arg(long)]
    store: Option<PathBuf>,
    /// Keep only patents issued in this year
    #[arg(long)]
    year: Option<i32>,
    /// Count every symbol occurrence instead of distinct classes per patent
    #[arg(long)]
    multiset: bool,
    /// Reject symbols outside the canonical class list
    #[arg(long)]
    strict: bool,
    /// Cosine threshold for the VOSviewer network file
    #[arg(long)]
    threshold: Option<f64>,
    /// TOML config file supplying defaults for the flags above
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Optional config-file counterpart of `RunArgs`; every field may be
/// overridden on the command line.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RunFileConfig {
    set: Option<String>,
    level: Option<String>,
    inputs: Option<Vec<PathBuf>>,
    tabular: Option<Vec<PathBuf>>,
    basemap_matrix: Option<PathBuf>,
    basemap_layout: Option<PathBuf>,
    store: Option<PathBuf>,
    year: Option<i32>,
    multiset: Option<bool>,
    strict: Option<bool>,
    threshold: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "ipc4")]
    level: String,
    #[arg(long)]
    basemap_matrix: PathBuf,
    #[arg(long)]
    basemap_layout: PathBuf,
    /// Set names to compare; all store columns when omitted
    names: Vec<String>,
    #[arg(long, default_value_t = 0.2)]
    threshold: f64,
}

#[derive(Args)]
struct CohesionArgs {
    /// Tagged-format record file (repeatable)
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "ipc4")]
    level: String,
    /// Restrict the node universe to the base-map classes
    #[arg(long)]
    basemap_matrix: Option<PathBuf>,
    #[arg(long)]
    basemap_layout: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    year: Option<i32>,
}

#[derive(Args)]
struct QueryArgs {
    /// Query kind: city-country, city-state or cbsa
    #[arg(long)]
    kind: String,
    /// City/place search term (repeatable)
    #[arg(long = "city")]
    cities: Vec<String>,
    #[arg(long)]
    country: Option<String>,
    #[arg(long)]
    state: Option<String>,
    /// CBSA state group as "XX:Place1,Place2" (repeatable)
    #[arg(long = "group")]
    groups: Vec<String>,
    #[arg(long)]
    year: u16,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "ipc4")]
    level: String,
    #[arg(long)]
    basemap_matrix: PathBuf,
    #[arg(long)]
    basemap_layout: PathBuf,
    #[arg(long)]
    set: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    threshold: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Cohesion(args) => cmd_cohesion(args),
        Command::Query(args) => cmd_query(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}] {}", e.code(), e);
            ExitCode::FAILURE
        }
    }
}

fn parse_level(s: &str) -> Result<Level, Error> {
    s.parse()
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let file: RunFileConfig = match &args.config {
        Some(path) => toml::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?,
        None => RunFileConfig::default(),
    };
    let missing = |flag: &str| Error::InvalidSpec(format!("missing required option --{flag}"));

    let set_name = args.set.or(file.set).ok_or_else(|| missing("set"))?;
    let level = parse_level(&args.level.or(file.level).unwrap_or_else(|| "ipc4".into()))?;
    let inputs = if args.inputs.is_empty() { file.inputs.unwrap_or_default() } else { args.inputs };
    let tabular =
        if args.tabular.is_empty() { file.tabular.unwrap_or_default() } else { args.tabular };
    let config = pipeline::RunConfig {
        set_name,
        level,
        inputs,
        tabular_inputs: tabular,
        basemap_matrix: args
            .basemap_matrix
            .or(file.basemap_matrix)
            .ok_or_else(|| missing("basemap-matrix"))?,
        basemap_layout: args
            .basemap_layout
            .or(file.basemap_layout)
            .ok_or_else(|| missing("basemap-layout"))?,
        store_dir: args.store.or(file.store).ok_or_else(|| missing("store"))?,
        year: args.year.or(file.year),
        counting: if args.multiset || file.multiset.unwrap_or(false) {
            Counting::Multiset
        } else {
            Counting::Set
        },
        class_mode: if args.strict || file.strict.unwrap_or(false) {
            ClassMode::Strict
        } else {
            ClassMode::Lenient
        },
        threshold: args.threshold.or(file.threshold).unwrap_or(0.2),
    };
    let summary = pipeline::run(&config)?;
    println!(
        "run {}: n_patents={} variety={} delta={:.4} true_diversity={:.4} (duplicates_dropped={}, unknown_tags={})",
        summary.set_name,
        summary.n_patents,
        summary.variety,
        summary.rao_delta,
        summary.true_diversity,
        summary.duplicates_dropped,
        summary.unknown_tags
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), Error> {
    let level = parse_level(&args.level)?;
    let report = pipeline::compare_sets(
        &args.store,
        level,
        &args.basemap_matrix,
        &args.basemap_layout,
        &args.names,
        args.threshold,
    )?;
    for p in &report.pairs {
        let restricted = match p.restricted_spearman {
            Some((rho, n)) => format!("restricted_rho={rho:.3} (n={n})"),
            None => "restricted_rho=n/a".to_string(),
        };
        println!(
            "{} ~ {}: pearson={:.3} spearman={:.3} cosine={:.3} distance={:.3} {}",
            p.a,
            p.b,
            p.pearson,
            p.spearman,
            p.cosine,
            1.0 - p.cosine,
            restricted
        );
    }
    for path in &report.outputs {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.3}"),
        None => "n/a".to_string(),
    }
}

fn print_cohesion(report: &Cohesion) {
    let rows: Vec<(usize, &str, String)> = vec![
        (1, "Avg Degree", format!("{:.3}", report.avg_degree)),
        (2, "Indeg H-Index", report.indeg_h_index.to_string()),
        (3, "Deg Centralization", fmt_opt(report.deg_centralization)),
        (4, "Out-Central", fmt_opt(report.out_central)),
        (5, "In-Central", fmt_opt(report.in_central)),
        (6, "Density", fmt_opt(report.density)),
        (7, "Components", report.components.to_string()),
        (8, "Component Ratio", fmt_opt(report.component_ratio)),
        (9, "Connectedness", fmt_opt(report.connectedness)),
        (10, "Fragmentation", fmt_opt(report.fragmentation)),
        (11, "Closure", fmt_opt(report.closure)),
        (12, "Avg Distance", fmt_opt(report.avg_distance)),
        (13, "SD Distance", fmt_opt(report.sd_distance)),
        (14, "Diameter", report.diameter.map_or("n/a".to_string(), |d| d.to_string())),
        (15, "Breadth", fmt_opt(report.breadth)),
        (16, "Compactness", fmt_opt(report.compactness)),
    ];
    println!("nodes={} edges={}", report.node_count, report.edge_count);
    for (i, label, value) in rows {
        println!("{i:>2}  {label:<20} {value}");
    }
}

fn cmd_cohesion(args: CohesionArgs) -> Result<(), Error> {
    let level = parse_level(&args.level)?;
    let known: Option<HashSet<String>> = match (&args.basemap_matrix, &args.basemap_layout) {
        (Some(m), Some(l)) => {
            let map = load_basemap::<f64>(m, l, level)?;
            Some(map.codes().iter().cloned().collect())
        }
        (None, None) => None,
        _ => {
            return Err(Error::InvalidSpec(
                "--basemap-matrix and --basemap-layout must be given together".into(),
            ))
        }
    };
    let mode = if args.strict { ClassMode::Strict } else { ClassMode::Lenient };
    let (_, report) =
        pipeline::cohesion_from_files(&args.inputs, level, mode, known.as_ref(), args.year)?;
    print_cohesion(&report);
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<(), Error> {
    let spec = match args.kind.as_str() {
        "city-country" => QuerySpec::CityCountry {
            cities: args.cities,
            country: args
                .country
                .ok_or_else(|| Error::InvalidSpec("city-country needs --country".into()))?,
            year: args.year,
        },
        "city-state" => QuerySpec::CityState {
            cities: args.cities,
            state: args.state.ok_or_else(|| Error::InvalidSpec("city-state needs --state".into()))?,
            year: args.year,
        },
        "cbsa" => {
            let groups = args
                .groups
                .iter()
                .map(|g| {
                    let (state, places) = g.split_once(':').ok_or_else(|| {
                        Error::InvalidSpec(format!("group {g:?} must be \"XX:Place1,Place2\""))
                    })?;
                    Ok(CbsaGroup {
                        state: state.trim().to_string(),
                        places: places
                            .split(',')
                            .map(|p| p.trim().to_string())
                            .filter(|p| !p.is_empty())
                            .collect(),
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            QuerySpec::Cbsa { groups, year: args.year }
        }
        other => return Err(Error::InvalidSpec(format!("unknown query kind {other:?}"))),
    };
    println!("{}", build_search_string(&spec)?);
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), Error> {
    let level = parse_level(&args.level)?;
    let outputs = pipeline::export_set(
        &args.store,
        level,
        &args.basemap_matrix,
        &args.basemap_layout,
        &args.set,
        &args.out,
        args.threshold,
    )?;
    for path in &outputs {
        println!("wrote {}", path.display());
    }
    Ok(())
}
