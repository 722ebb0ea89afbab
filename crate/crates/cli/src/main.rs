use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rescurv::capacity::{conjecture_search, full_table, is_submodular, sigma_squared_submodularity};
use rescurv::corpus::parse_keyword;
use rescurv::decide::classify;
use rescurv::enumerate::Caps;
use rescurv::fitting::{fit_weights, FitOptions};
use rescurv::polytope::theta_integer_points;
use rescurv::resistance::{normalize_weights, parse_weights, relative_resistances, ResistanceProfile, Weights};
use rescurv::scalar::json_vec;
use rescurv::transforms::{circle_invert, kron_reduce, TransformRecord};
use rescurv::{Error, Graph, Rational, Result, Scalar};

mod render;
mod suite;

#[derive(Parser, Debug)]
#[command(name = "rescurv", version, about = "Resistance curvature of graphs: exact decisions and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Built-in keyword (petersen, k23, cycle:5, grid:3,4, ...) or a graph file
    #[arg(long, global = true)]
    graph: Option<String>,
    /// Weight file with one `u v weight` line per edge (default: all ones)
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap_trees: Option<u64>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap_matchings: Option<u64>,
    /// Largest vertex count for subset scans and capacity tables
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    cap_subsets: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    out: Output,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resistance matrices, relative resistances and curvature
    Curvature,
    /// Classify as RP, SRN or not RN, with a certificate
    Decide,
    /// Recover weights from target relative resistances
    Fit {
        /// Targets in weight-file format; defaults to those of --weights
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Kron reduction of a vertex set
    Kron {
        /// Vertices to eliminate, comma separated, in elimination order
        #[arg(long, value_delimiter = ',', required = true)]
        remove: Vec<usize>,
    },
    /// Circle inversion at a vertex
    Cinv {
        #[arg(long)]
        vertex: usize,
    },
    /// Integer points of the dilated polytope kΘ(G)
    Theta {
        #[arg(long)]
        k: usize,
    },
    /// Full resistance-capacity table and its submodularity
    Capacity,
    /// Random search relating submodularity to nonnegative curvature
    Conjecture {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Invariant suite on the built-in corpus (or on --graph)
    Verify,
    /// Worked examples: cycles, near-balanced bipartite graphs, Petersen, paths, grids
    Gallery,
}

impl RunConfig {
    fn caps(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(t) = self.cap_trees {
            caps.trees = t as usize;
        }
        if let Some(m) = self.cap_matchings {
            caps.matchings = m as usize;
        }
        if let Some(s) = self.cap_subsets {
            let s = s as usize;
            caps.brute_force_vertices = s;
            caps.capacity_vertices = s;
            caps.subset_vertices = s;
        }
        caps
    }

    fn graph(&self) -> Result<Graph> {
        let source = self
            .graph
            .as_deref()
            .ok_or_else(|| Error::Parameter("this subcommand needs --graph".into()))?;
        if let Some(named) = parse_keyword(source) {
            return named;
        }
        let text = std::fs::read_to_string(source)
            .map_err(|e| Error::Parameter(format!("--graph '{source}' is neither a keyword nor a readable file: {e}")))?;
        Graph::parse(&text)
    }

    fn weights(&self, g: &Graph) -> Result<Weights<Rational>> {
        match &self.weights {
            None => Ok(Weights::unit(g)),
            Some(path) => parse_weights(g, &read(path, "--weights")?),
        }
    }
}

fn read(path: &PathBuf, flag: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read {flag} file {}: {e}", path.display())))
}

/// Print to stdout; a closed pipe (e.g. `| head`) is not an error.
pub(crate) fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub(crate) fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values always serialize") + "\n"
}

fn graph_summary(g: &Graph) -> Value {
    json!({"vertices": g.vertex_count(), "edges": g.edge_count()})
}

fn with_mode<T>(
    mode: Mode,
    c: &Weights<Rational>,
    exact: impl FnOnce(&Weights<Rational>) -> Result<T>,
    numeric: impl FnOnce(&Weights<f64>) -> Result<T>,
) -> Result<T> {
    match mode {
        Mode::Exact => exact(c),
        Mode::Numeric => numeric(&c.to_f64()),
    }
}

/// A transform whose curvature update does not match recomputation is an
/// internal failure, reported after the record itself.
fn checked_record<S: Scalar>(record: TransformRecord<S>) -> Result<Value> {
    let payload = record.to_json();
    if record.lemma_holds() {
        Ok(payload)
    } else {
        emit(&pretty(&payload));
        Err(Error::Consistency("predicted and recomputed curvature differ".into()))
    }
}

fn run(command: &Command, run: &RunConfig) -> Result<Value> {
    if !(run.tol > 0.0 && run.tol.is_finite()) {
        return Err(Error::Parameter(format!("--tol must be positive, got {}", run.tol)));
    }
    let caps = run.caps();
    match command {
        Command::Curvature => {
            let g = run.graph()?;
            let c = run.weights(&g)?;
            let profile = with_mode(
                run.mode,
                &c,
                |c| Ok(ResistanceProfile::compute(&g, c)?.to_json()),
                |c| Ok(ResistanceProfile::compute(&g, c)?.to_json()),
            )?;
            Ok(json!({"graph": graph_summary(&g), "profile": profile}))
        }
        Command::Decide => {
            let g = run.graph()?;
            let (verdict, trees) = classify(&g, &caps)?;
            Ok(verdict.to_json(&trees))
        }
        Command::Fit { target, max_iter } => {
            let g = run.graph()?;
            let r: Vec<Rational> = match (target, &run.weights) {
                (Some(path), _) => parse_weights(&g, &read(path, "--target")?)?.into_values(),
                (None, Some(_)) => relative_resistances(&g, &run.weights(&g)?)?,
                (None, None) => return Err(Error::Parameter("fit needs --target or --weights".into())),
            };
            let options = FitOptions { tol: run.tol, max_iter: *max_iter, seed: Some(run.seed), trace: false };
            let fit = match run.mode {
                Mode::Exact => fit_weights(&g, &r, &options, &caps)?,
                Mode::Numeric => fit_weights(&g, &rescurv::scalar::to_f64_vec(&r), &options, &caps)?,
            };
            Ok(json!({"target": json_vec(&r), "fit": fit}))
        }
        Command::Kron { remove } => {
            let g = run.graph()?;
            let c = run.weights(&g)?;
            with_mode(
                run.mode,
                &c,
                |c| checked_record(kron_reduce(&g, c, remove)?),
                |c| checked_record(kron_reduce(&g, c, remove)?),
            )
        }
        Command::Cinv { vertex } => {
            let g = run.graph()?;
            let c = run.weights(&g)?;
            with_mode(
                run.mode,
                &c,
                |c| checked_record(circle_invert(&g, c, *vertex)?),
                |c| checked_record(circle_invert(&g, c, *vertex)?),
            )
        }
        Command::Theta { k } => {
            let g = run.graph()?;
            Ok(serde_json::to_value(theta_integer_points(&g, *k, &caps)?).expect("json"))
        }
        Command::Capacity => {
            let g = run.graph()?;
            let c = normalize_weights(&g, &run.weights(&g)?)?;
            let table = full_table(&g, &c, &caps)?;
            Ok(json!({
                "table": table.to_json(),
                "submodular": is_submodular(&table),
                "sigma_squared_intersecting": sigma_squared_submodularity(&table, true),
            }))
        }
        Command::Conjecture { samples } => {
            let g = run.graph()?;
            Ok(conjecture_search(&g, *samples, run.seed, &caps)?.to_json())
        }
        Command::Verify => suite::verify(run.graph.as_ref().map(|_| run.graph()).transpose()?, &caps),
        Command::Gallery => suite::gallery(&caps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command, &cli.run) {
        Ok(payload) => {
            match cli.run.out {
                Output::Json => emit(&pretty(&payload)),
                Output::Text => emit(&render::text(&payload)),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
