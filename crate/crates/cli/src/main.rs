//! `mdretime`: analyze, retime and generate code for multidimensional
//! data-flow graphs.
//!
//! Exit codes: 0 success, 2 parse or validation error, 3 technique
//! failure, 4 retiming larger than the iteration space.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mdretime::analysis::{c_min, cycle_period, zero_delay_paths};
use mdretime::codegen::{cycle_count, generate_loop_code_with_schedule, iteration_schedule, GeneratedProgram, MetricsReport, PrintOptions};
use mdretime::format::{load_graph_file, GraphFile};
use mdretime::retiming::apply_retiming;
use mdretime::schedule::{find_schedule_vector, spatial_constraint, spatial_violation};
use mdretime::simulator::equivalence_report;
use mdretime::{Error, IterationBounds, Mdfg, Retiming, ScheduleVector, Technique};

const CSV_HEADER: &str = "technique,function_count,cycle_period,c_min,cycle_count,execution_time,code_size,equivalence";

#[derive(Parser)]
#[command(name = "mdretime", version, about = "Multidimensional retiming of nested-loop data-flow graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cycle period, c_min, zero-delay chains and schedule vector of a graph.
    Analyze {
        graph: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
    },
    /// Retime a graph to full parallelism.
    Retime {
        graph: PathBuf,
        #[arg(long, short)]
        technique: Technique,
        #[command(flatten)]
        bounds: BoundsArg,
        /// Where to write the retimed graph file.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the loop nest of a (retimed) graph.
    Codegen {
        graph: PathBuf,
        /// File whose `retiming` (and `schedule`) to apply; defaults to the
        /// graph file's own.
        #[arg(long)]
        retiming_file: Option<PathBuf>,
        #[command(flatten)]
        bounds: BoundsArg,
        #[arg(long, value_enum, default_value_t = Emit::CLike)]
        emit: Emit,
        /// Print upper bounds as numbers instead of m, n.
        #[arg(long)]
        concrete: bool,
    },
    /// Run several techniques and tabulate their metrics.
    Compare {
        graph: PathBuf,
        #[command(flatten)]
        bounds: BoundsArg,
        #[arg(long, value_delimiter = ',', default_value = "incremental,chained,spine,optimal")]
        techniques: Vec<Technique>,
        /// Write the table as CSV to this path (`-` for stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Random input stores used by the equivalence check.
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Graphviz rendering of a graph, retimed if the file carries a retiming.
    Dot { graph: PathBuf },
}

#[derive(Args)]
struct BoundsArg {
    /// Inclusive loop bounds, `name:lower:upper` per dimension, outermost
    /// first (default `0..9` in every dimension).
    #[arg(long)]
    bounds: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    CLike,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidBounds { .. }
            | Error::UnknownNode(_)
            | Error::MissingStatement(_) => 2,
            Error::SpatialInfeasible { .. } => 4,
            _ => 3,
        };
        let message = match &e {
            Error::Invalid(vs) => {
                let mut m = String::from("invalid graph file:");
                for v in vs {
                    let _ = write!(m, "\n  {v}");
                }
                m
            }
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Loop bounds and the index names to print them with.
struct NamedBounds {
    names: Vec<String>,
    bounds: IterationBounds,
}

fn parse_bounds(arg: &Option<String>, dim: usize) -> Result<NamedBounds, Failure> {
    let Some(text) = arg else {
        return Ok(NamedBounds {
            names: mdretime::codegen::default_loop_vars(dim),
            bounds: IterationBounds::square(dim, 10),
        });
    };
    let mut names = Vec::new();
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for part in text.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        let [name, lo, hi] = fields[..] else {
            return Err(usage(format!("bad bound `{part}`: expected name:lower:upper")));
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("bad bound `{part}`: `{s}` is not an integer")))
        };
        names.push(name.trim().to_string());
        lower.push(parse(lo)?);
        upper.push(parse(hi)?);
    }
    if names.len() != dim {
        return Err(usage(format!(
            "--bounds gives {} dimensions, graph has {dim}",
            names.len()
        )));
    }
    Ok(NamedBounds {
        names,
        bounds: IterationBounds::new(lower, upper)?,
    })
}

fn load(path: &Path) -> Result<GraphFile, Failure> {
    load_graph_file(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// The graph a file describes, with its retiming applied if it has one.
fn effective_graph(file: &GraphFile) -> Result<Mdfg, Failure> {
    match &file.retiming {
        Some(r) => Ok(apply_retiming(&file.graph, r)?),
        None => Ok(file.graph.clone()),
    }
}

fn fmt_list(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn analyze(path: &Path, bounds: &Option<String>) -> Result<String, Failure> {
    let file = load(path)?;
    let g = effective_graph(&file)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dimension={} nodes={} edges={}",
        g.dimension(),
        g.node_count(),
        g.edges().len()
    );
    let schedule = if g.dimension() == 2 {
        match find_schedule_vector(&g) {
            Ok(s) => s.to_string(),
            Err(e) => format!("none ({e})"),
        }
    } else {
        "n/a".to_string()
    };
    let _ = writeln!(
        out,
        "cycle_period={} c_min={} s={schedule}",
        cycle_period(&g)?,
        c_min(&g)?
    );
    let paths = zero_delay_paths(&g, 1000);
    if paths.is_empty() {
        let _ = writeln!(out, "zero-delay chains: none");
    } else {
        let _ = writeln!(out, "zero-delay chains:");
        for p in paths {
            let ids: Vec<&str> = p.iter().map(|&v| g.node(v).id.as_str()).collect();
            let _ = writeln!(out, "  {}", ids.join(" -> "));
        }
    }
    if bounds.is_some() {
        let nb = parse_bounds(bounds, g.dimension())?;
        let sc = spatial_constraint(&nb.bounds);
        let _ = writeln!(out, "spatial_constraint={}", fmt_list(&sc.sizes));
    }
    if let Some(r) = &file.retiming {
        let sched = iteration_schedule(&file.graph, r, file.base_r.as_ref());
        if let Ok(sched) = sched {
            let _ = writeln!(out, "cycle_periods_per_iteration={}", sched.periods);
        }
    }
    Ok(out)
}

fn retime(path: &Path, technique: Technique, bounds: &Option<String>, out_path: &Option<PathBuf>) -> Result<String, Failure> {
    let file = load(path)?;
    let g = file.graph;
    let res = technique.run(&g)?;
    let mut out = String::new();
    let _ = writeln!(out, "technique={technique}");
    let _ = writeln!(out, "schedule={} r={}", res.schedule, res.base_r);
    let _ = writeln!(out, "function_count={}", res.function_count);
    let _ = writeln!(out, "cycle_period={} c_min={}", cycle_period(&res.retimed)?, c_min(&g)?);
    let _ = writeln!(out, "retiming:");
    for node in g.sorted_node_indices() {
        let id = &g.node(node).id;
        let _ = writeln!(out, "  {id} = {}", res.retiming.get(id));
    }
    let _ = writeln!(out, "delays:");
    for e in res.retimed.edges() {
        let _ = writeln!(out, "  {} -> {} = {}", res.retimed.node(e.src).id, res.retimed.node(e.dst).id, e.delay);
    }
    if bounds.is_some() {
        let nb = parse_bounds(bounds, g.dimension())?;
        let fits = spatial_violation(&res.retiming, &spatial_constraint(&nb.bounds)).is_none();
        let _ = writeln!(out, "spatially_feasible={fits}");
    }
    if let Some(p) = out_path {
        std::fs::write(p, GraphFile::from_result(&g, &res).to_json())
            .map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(out)
}

fn codegen(
    path: &Path,
    retiming_file: &Option<PathBuf>,
    bounds: &Option<String>,
    emit: Emit,
    concrete: bool,
) -> Result<String, Failure> {
    let file = load(path)?;
    let g = &file.graph;
    let (retiming, schedule) = match retiming_file {
        Some(rp) => {
            let rf = load(rp)?;
            (rf.retiming, rf.schedule)
        }
        None => (file.retiming.clone(), file.schedule.clone()),
    };
    let retiming = retiming.unwrap_or_else(|| Retiming::new(g.dimension()));
    let schedule = schedule.unwrap_or_else(|| ScheduleVector::row_major(g.dimension()));
    let nb = parse_bounds(bounds, g.dimension())?;
    let program = generate_loop_code_with_schedule(g, &retiming, &nb.bounds, &schedule)?;
    Ok(match emit {
        Emit::Json => program.to_json() + "\n",
        Emit::CLike => program.print(&print_options(&nb, concrete)),
    })
}

fn print_options(nb: &NamedBounds, concrete: bool) -> PrintOptions {
    let dim = nb.names.len();
    let mut opts = if concrete {
        PrintOptions::concrete(dim)
    } else {
        PrintOptions::symbolic(dim)
    };
    opts.loop_vars = nb.names.clone();
    opts
}

struct Row {
    technique: Technique,
    report: MetricsReport,
    equivalence: bool,
}

fn compare(
    path: &Path,
    bounds: &Option<String>,
    techniques: &[Technique],
    csv: &Option<PathBuf>,
    trials: u64,
) -> Result<String, Failure> {
    let file = load(path)?;
    let g = &file.graph;
    let nb = parse_bounds(bounds, g.dimension())?;
    let original = generate_loop_code_with_schedule(g, &Retiming::new(g.dimension()), &nb.bounds, &ScheduleVector::row_major(g.dimension()))?;
    let cmin = c_min(g)?;
    let mut rows = Vec::new();
    for &t in techniques {
        let res = t.run(g)?;
        let program: GeneratedProgram = generate_loop_code_with_schedule(g, &res.retiming, &nb.bounds, &res.schedule)?;
        let report = MetricsReport::new(
            cycle_period(&res.retimed)?,
            cmin,
            res.function_count,
            cycle_count(g, &res.retiming, &nb.bounds)?,
            program.code_size(),
        );
        let equivalence = equivalence_report(&original, &program, &nb.bounds, trials).is_ok();
        rows.push(Row {
            technique: t,
            report,
            equivalence,
        });
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<12} {:>9} {:>12} {:>5} {:>11} {:>14} {:>9} {:>11}",
        "technique", "functions", "cycle_period", "c_min", "cycle_count", "execution_time", "code_size", "equivalence"
    );
    for r in &rows {
        let m = &r.report;
        let _ = writeln!(
            text,
            "{:<12} {:>9} {:>12} {:>5} {:>11} {:>14} {:>9} {:>11}",
            r.technique.name(),
            m.function_count,
            m.cycle_period,
            m.c_min,
            m.cycle_count,
            m.execution_time,
            m.code_size,
            verdict(r.equivalence)
        );
    }

    if let Some(p) = csv {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &rows {
            let m = &r.report;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.technique.name(),
                m.function_count,
                m.cycle_period,
                m.c_min,
                m.cycle_count,
                m.execution_time,
                m.code_size,
                verdict(r.equivalence)
            );
        }
        if p.as_os_str() == "-" {
            text.push('\n');
            text.push_str(&out);
        } else {
            std::fs::write(p, out).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
        }
    }
    Ok(text)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dot(path: &Path) -> Result<String, Failure> {
    let file = load(path)?;
    let g = effective_graph(&file)?;
    let mut out = String::from("digraph mdfg {\n");
    for v in g.sorted_node_indices() {
        let n = g.node(v);
        let _ = writeln!(out, "  \"{}\" [label=\"{} ({})\"];", n.id, n.id, n.time);
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            g.node(e.src).id,
            g.node(e.dst).id,
            e.delay
        );
    }
    out.push_str("}\n");
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { graph, bounds } => analyze(graph, &bounds.bounds),
        Command::Retime {
            graph,
            technique,
            bounds,
            out,
        } => retime(graph, *technique, &bounds.bounds, out),
        Command::Codegen {
            graph,
            retiming_file,
            bounds,
            emit,
            concrete,
        } => codegen(graph, retiming_file, &bounds.bounds, *emit, *concrete),
        Command::Compare {
            graph,
            bounds,
            techniques,
            csv,
            trials,
        } => compare(graph, &bounds.bounds, techniques, csv, *trials),
        Command::Dot { graph } => dot(graph),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
