//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::generator::{generate, GeneratorConfig};
use crate::io::{self, load_dir, write_tables};
use crate::metrics::{metric_report, PathMode};
use crate::network::SupplyNetwork;
use crate::policy::SelectionStrategy;
use crate::scopes::{builtin_scopes, load_scopes};
use crate::sim::{load_scenarios, run_suite, slug, write_reports, NetworkSource};

#[derive(Debug, Parser)]
#[command(
    name = "supplynet",
    version,
    about = "Supply network rewiring simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic network and write its tables
    Generate(GenerateArgs),
    /// Compute the metric table of a network
    Metrics(MetricsArgs),
    /// Run a scenario document and write all reports
    Simulate(SimulateArgs),
    /// List or check country clusters
    Scopes(ScopesArgs),
    /// Check network tables and list rejected rows
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator config (TOML); defaults are used for missing keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Directory holding firms.csv, products.csv and edges.csv
    #[arg(long)]
    net: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sampled:1000")]
    path_mode: PathMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario document (TOML)
    scenario: PathBuf,
    /// Overrides the master seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    selection: Option<SelectionStrategy>,
    #[arg(long)]
    path_mode: Option<PathMode>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScopesArgs {
    /// Print every cluster with its countries
    #[arg(long)]
    list: bool,
    /// Cluster file to load instead of the builtin clusters
    #[arg(long)]
    file: Option<PathBuf>,
    /// Write the clusters as TOML into this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Directory holding firms.csv, products.csv and edges.csv
    #[arg(long)]
    net: PathBuf,
    /// Write ingest_report.json into this directory
    #[arg(long)]
    out: Option<PathBuf>,
}

pub const SCOPES_FILE: &str = "scopes.toml";
pub const GENERATOR_FILE: &str = "generator.toml";
pub const INGEST_FILE: &str = "ingest_report.json";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code: 0 on success, 1 on a runtime error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Scopes(a) => cmd_scopes(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<i32> {
    let mut cfg: GeneratorConfig = match &a.config {
        Some(p) => toml::from_str(&fs::read_to_string(p)?)?,
        None => GeneratorConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let net = generate(&cfg)?;
    write_tables(&net, &a.out)?;
    fs::write(a.out.join(GENERATOR_FILE), toml::to_string(&cfg)?)?;
    println!(
        "wrote {} firms, {} products, {} edges to {}",
        net.firm_count(),
        net.product_count(),
        net.edge_count(),
        a.out.display()
    );
    Ok(0)
}

fn load_reporting(dir: &Path) -> Result<SupplyNetwork> {
    let (net, report) = load_dir(dir)?;
    if report.rows_rejected() > 0 {
        eprintln!(
            "warning: {} rows rejected (run `validate` for details)",
            report.rows_rejected()
        );
    }
    Ok(net)
}

fn cmd_metrics(a: MetricsArgs) -> Result<i32> {
    let net = load_reporting(&a.net)?;
    let report = metric_report(&net, a.seed, a.path_mode);
    for (label, v) in crate::metrics::MetricReport::ROW_LABELS
        .iter()
        .zip(report.values())
    {
        match v {
            Some(v) => println!("{label:<32} {v}"),
            None => println!("{label:<32} undefined"),
        }
    }
    if let Some(out) = a.out {
        io::write_metric_table(&[("Network", &report)], out.join(crate::sim::METRICS_FILE))?;
        io::write_json(&report, out.join("metrics.json"))?;
    }
    Ok(0)
}

fn cmd_simulate(a: SimulateArgs) -> Result<i32> {
    let mut scenarios = load_scenarios(&a.scenario)?;
    for sc in &mut scenarios {
        if let Some(s) = a.seed {
            sc.master_seed = s;
        }
        if let Some(n) = a.iterations {
            sc.iterations = n;
        }
        if let Some(sel) = a.selection {
            sc.selection = sel;
        }
        if let Some(pm) = a.path_mode {
            sc.path_mode = pm;
        }
    }
    let results = run_suite(&scenarios);
    fs::create_dir_all(&a.out)?;

    let mut nets: Vec<(NetworkSource, SupplyNetwork)> = Vec::new();
    let mut failed = 0;
    let mut done = Vec::new();
    let mut columns = Vec::new();
    for (sc, res) in scenarios.iter().zip(results) {
        match res {
            Ok(agg) => {
                if !nets.iter().any(|(s, _)| s == &sc.source) {
                    nets.push((sc.source.clone(), sc.source.load()?));
                }
                let net = &nets
                    .iter()
                    .find(|(s, _)| s == &sc.source)
                    .expect("cached")
                    .1;
                write_reports(&agg, net, a.out.join(slug(&sc.name)))?;
                if columns.is_empty() {
                    columns.push(("Baseline".to_string(), agg.baseline.values()));
                }
                columns.push((sc.name.clone(), agg.mean_column()));
                println!(
                    "{}: {} iterations, {:.1} non-substitutable products",
                    sc.name, agg.iterations, agg.ns_products_mean
                );
                done.push(agg);
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed += 1;
            }
        }
    }
    if !done.is_empty() {
        io::write_metric_columns(&columns, a.out.join(crate::sim::METRICS_FILE))?;
        io::write_substitutability(&done.iter().collect::<Vec<_>>(), a.out.join(SUMMARY_FILE))?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn cmd_scopes(a: ScopesArgs) -> Result<i32> {
    let set = match &a.file {
        Some(p) => load_scopes(&fs::read_to_string(p)?)?,
        None => builtin_scopes(),
    };
    for w in &set.warnings {
        eprintln!("warning: {w}");
    }
    for name in set.names() {
        let c = &set.clusters[name];
        if a.list {
            let codes: Vec<&str> = c.countries.iter().map(String::as_str).collect();
            println!("{name} ({}): {}", c.len(), codes.join(" "));
        } else {
            println!("{name} ({})", c.len());
        }
    }
    if let Some(out) = a.out {
        fs::create_dir_all(&out)?;
        fs::write(out.join(SCOPES_FILE), set.to_toml()?)?;
    }
    Ok(0)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let (net, report) = load_dir(&a.net)?;
    for (name, t) in [
        ("firms", &report.firms),
        ("products", &report.products),
        ("edges", &report.edges),
    ] {
        println!(
            "{name}: {} read, {} accepted, {} rejected",
            t.rows_read,
            t.rows_accepted,
            t.rejects.len()
        );
    }
    for (table, line, reason) in report.reject_reasons() {
        println!("  {table}:{line}: {reason}");
    }
    println!(
        "network: {} firms, {} products, {} edges ({} duplicate rows merged)",
        net.firm_count(),
        net.product_count(),
        net.edge_count(),
        report.duplicate_edges
    );
    if let Some(out) = a.out {
        io::write_json(&report, out.join(INGEST_FILE))?;
    }
    Ok(if report.rows_rejected() == 0 { 0 } else { 1 })
}
