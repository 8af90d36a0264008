//! Command-line front end. `run` is the whole program minus process exit, so tests can drive it
//! in-process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use outlift::exact_linalg::io::parse_matrix;
use outlift::graph_of_groups::{
    canonical_form, enumerate_graphs, torsion_free_quotients, Filter, SearchConfig,
};
use outlift::integer_reps::{is_standard, Standardness};
use outlift::surface_toolkit::{
    block_subgroup_order, free_action_genus, free_by_free_parameters, hurwitz_bound,
    lefschetz_obstruction, max_order_tables, wiman_bound, wiman_obstruction,
    wiman_violation_symplectic, ExceptionalOrder,
};
use outlift::{
    conjugation_witness, decomposition_type, lift_decision, matrix_order, max_torsion_order_gl,
    replay, verify_phi_nonlift, Certificate, GraphOfGroups, IntMatrix, LiftDecision, MatrixOrder,
    Verdict,
};

/// Theorem confirmed, or the command ran normally.
pub const EXIT_OK: i32 = 0;
/// Malformed input or a failed replay.
pub const EXIT_BAD_INPUT: i32 = 1;
/// The search found a candidate that passes every filter.
pub const EXIT_SURVIVORS: i32 = 2;

pub const WORKERS_ENV: &str = "OUTLIFT_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "outlift",
    version,
    about = "Lifting finite cyclic subgroups of Out(F_n), GL(n,Z) and Sp(2g,Z)"
)]
pub struct Cli {
    /// Worker threads for enumeration; results do not depend on this.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Emit JSON instead of text where a command supports it.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify that φ ⊕ I_{n−2} of order 6 does not lift to Out(F_n).
    PhiNonlift {
        #[arg(long)]
        rank: usize,
        /// Search without the structural restrictions.
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Decide whether a prime-order matrix lifts, with an explicit witness.
    Lift {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Integral representations of Z_p.
    Rep {
        #[command(subcommand)]
        command: RepCommand,
    },
    /// Graphs of finite cyclic groups.
    Gog {
        #[command(subcommand)]
        command: GogCommand,
    },
    /// Surface mapping class arithmetic.
    Surface {
        #[command(subcommand)]
        command: SurfaceCommand,
    },
    /// Automorphisms of free groups.
    Outfn {
        #[command(subcommand)]
        command: OutfnCommand,
    },
    /// Maximal finite orders in Out(F_n) and GL(n,Z).
    Bounds {
        #[arg(long)]
        rank: u64,
    },
    /// Replay a certificate and report every mismatch.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RepCommand {
    Decompose(MatrixPrime),
}

#[derive(Debug, Args)]
pub struct MatrixPrime {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub prime: u64,
}

#[derive(Debug, Subcommand)]
pub enum GogCommand {
    /// Invariants and torsion-free quotients of a graph-of-groups file.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        quotient: u64,
        /// Maximum number of quotient maps to print.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Stream every reduced graph with χ = (1 − n)/q.
    Enumerate {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        quotient: u64,
        #[arg(long)]
        no_prune: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCommand {
    Bounds {
        #[arg(long)]
        genus: u64,
    },
    /// A finite-order symplectic matrix no periodic map realises.
    SymplecticNonlift {
        #[arg(long)]
        genus: u64,
    },
    Lefschetz {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        order: u64,
    },
    FreeAction {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        base_genus: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OutfnCommand {
    /// Order-m outer automorphism of F_{m+1} with no order-m lift.
    Witness {
        #[arg(long)]
        order: u64,
    },
}

/// Parses `argv` (including the program name) and runs the command. Help and version output
/// count as success; usage errors map to `EXIT_BAD_INPUT`.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send)) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{}", e.render());
                return Ok(EXIT_BAD_INPUT);
            }
            write!(out, "{}", e.render())?;
            return Ok(EXIT_OK);
        }
    };
    execute(&cli, out)
}

pub fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<i32> {
    let workers = match cli.workers {
        Some(0) => bail!("--workers must be at least 1"),
        Some(k) => k,
        None => rayon::current_num_threads(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    pool.install(|| dispatch(cli, out))
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::PhiNonlift {
            rank,
            no_prune,
            cert,
        } => phi_nonlift(*rank, *no_prune, cert.as_deref(), json, out),
        Command::Lift {
            matrix,
            prime,
            cert,
        } => lift(matrix, *prime, cert.as_deref(), json, out),
        Command::Rep {
            command: RepCommand::Decompose(args),
        } => {
            let m = read_matrix(&args.matrix)?;
            let d = decomposition_type(&m, args.prime)?;
            let standard = is_standard(&m, args.prime)?;
            if json {
                emit_json(
                    out,
                    &serde_json::json!({ "decomposition": d, "standard": standard }),
                )?;
            } else {
                writeln!(out, "{d}")?;
                writeln!(out, "standard: {}", standard == Standardness::Standard)?;
            }
            Ok(EXIT_OK)
        }
        Command::Gog { command } => match command {
            GogCommand::Check {
                file,
                quotient,
                limit,
            } => gog_check(file, *quotient, *limit, json, out),
            GogCommand::Enumerate {
                rank,
                quotient,
                no_prune,
            } => {
                if *rank == 0 || *quotient == 0 {
                    bail!("rank and quotient must be positive");
                }
                for g in enumerate_graphs(*rank, *quotient, search_config(*no_prune)) {
                    if json {
                        writeln!(out, "{}", g.to_json())?;
                    } else {
                        writeln!(out, "{g}")?;
                    }
                }
                Ok(EXIT_OK)
            }
        },
        Command::Surface { command } => surface(command, json, out),
        Command::Outfn {
            command: OutfnCommand::Witness { order },
        } => {
            let psi = conjugation_witness(*order)?;
            let m = psi.abelianize();
            let ord = matrix_order(&m)?;
            if json {
                emit_json(
                    out,
                    &serde_json::json!({ "automorphism": psi, "abelianization": m, "order": ord }),
                )?;
            } else {
                writeln!(out, "rank {}", psi.rank())?;
                write!(out, "{psi}")?;
                writeln!(out, "abelianization:\n{m}")?;
                writeln!(out, "order in GL: {}", format_order(ord))?;
                if let Some(n_prime) = free_by_free_parameters(psi.rank() as u64, *order) {
                    writeln!(
                        out,
                        "rank relation: 1 - {} = {} * (1 - {n_prime})",
                        psi.rank(),
                        order
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bounds { rank } => {
            let table = max_order_tables(*rank)?;
            let gl_element = max_torsion_order_gl(*rank as usize);
            if json {
                emit_json(
                    out,
                    &serde_json::json!({ "table": table, "gl_max_element_order": gl_element }),
                )?;
            } else {
                let show = |x: &Option<_>| match x {
                    Some(v) => format!("{v}"),
                    None => "-".to_string(),
                };
                writeln!(
                    out,
                    "max finite subgroup of Out(F_{rank}): {}",
                    show(&table.out_fn)
                )?;
                writeln!(
                    out,
                    "max finite abelian subgroup: {}",
                    show(&table.out_fn_abelian)
                )?;
                let exc = match &table.gl_exceptional {
                    ExceptionalOrder::None => "none".to_string(),
                    ExceptionalOrder::Known(v) => v.to_string(),
                    ExceptionalOrder::LargerThanHyperoctahedral => {
                        "larger than 2^n n!, value unrecorded".to_string()
                    }
                };
                writeln!(out, "exceptional finite subgroup of GL({rank},Z): {exc}")?;
                writeln!(out, "max element order in GL({rank},Z): {gl_element}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { cert } => {
            let text =
                fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
            let certificate = Certificate::from_json(&text)?;
            let issues = replay(&certificate)?;
            if issues.is_empty() {
                writeln!(
                    out,
                    "certificate replays cleanly: {} candidates, verdict {:?}",
                    certificate.candidates.len(),
                    certificate.verdict
                )?;
                Ok(EXIT_OK)
            } else {
                for issue in &issues {
                    writeln!(out, "MISMATCH: {issue}")?;
                }
                writeln!(out, "{} mismatches", issues.len())?;
                Ok(EXIT_BAD_INPUT)
            }
        }
    }
}

fn search_config(no_prune: bool) -> SearchConfig {
    if no_prune {
        SearchConfig::exhaustive()
    } else {
        SearchConfig::pruned()
    }
}

fn read_matrix(path: &Path) -> Result<IntMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing matrix {}", path.display()))
}

fn emit_json<T: Serialize>(out: &mut (dyn Write + Send), value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn format_order(o: MatrixOrder) -> String {
    match o {
        MatrixOrder::Finite(k) => k.to_string(),
        MatrixOrder::Infinite => "infinite".to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn phi_nonlift(
    rank: usize,
    no_prune: bool,
    cert_path: Option<&Path>,
    json: bool,
    out: &mut (dyn Write + Send),
) -> Result<i32> {
    let cert = verify_phi_nonlift(rank, search_config(no_prune))?;
    if let Some(path) = cert_path {
        write_file(path, &cert.to_json())?;
    }
    let maps: u64 = cert.candidates.iter().map(|c| c.quotient_maps).sum();
    let count = |f: Filter| {
        cert.candidates
            .iter()
            .filter(|c| c.rejected_by.contains(&f))
            .count()
    };
    if json {
        emit_json(
            out,
            &serde_json::json!({
                "rank": rank,
                "pruned": !no_prune,
                "candidates": cert.candidates.len(),
                "quotient_maps": maps,
                "survivors": cert.survivors.len(),
                "verdict": cert.verdict,
            }),
        )?;
    } else {
        writeln!(out, "target: phi + I_{} of order 6", rank - 2)?;
        writeln!(
            out,
            "search: {} (edges <= {}, vertices <= {})",
            if no_prune { "exhaustive" } else { "pruned" },
            cert.search.max_edges,
            cert.search.max_vertices
        )?;
        writeln!(out, "candidates: {}", cert.candidates.len())?;
        writeln!(out, "torsion-free quotient maps: {maps}")?;
        for f in [
            Filter::NoQuotient,
            Filter::Abelianization,
            Filter::InducedAction,
            Filter::Effectiveness,
        ] {
            writeln!(out, "rejected by {f:?}: {}", count(f))?;
        }
        writeln!(out, "survivors: {}", cert.survivors.len())?;
        for s in &cert.survivors {
            writeln!(out, "  {}  via {}", s.graph, s.map)?;
        }
        writeln!(out, "verdict: {:?}", cert.verdict)?;
    }
    Ok(match cert.verdict {
        Verdict::NonLifting => EXIT_OK,
        Verdict::SurvivorsFound => EXIT_SURVIVORS,
    })
}

fn lift(
    matrix: &Path,
    prime: u64,
    cert_path: Option<&Path>,
    json: bool,
    out: &mut (dyn Write + Send),
) -> Result<i32> {
    let m = read_matrix(matrix)?;
    let decision = lift_decision(&m, prime)?;
    if let Some(path) = cert_path {
        let mut text = serde_json::to_string_pretty(&decision)?;
        text.push('\n');
        write_file(path, &text)?;
    }
    if json {
        emit_json(out, &decision)?;
        return Ok(EXIT_OK);
    }
    match &decision {
        LiftDecision::Lifts {
            decomposition,
            graph,
            automorphism,
        } => {
            writeln!(out, "lifts: {decomposition}")?;
            writeln!(
                out,
                "graph: {} vertices, {} edges, base {}",
                graph.vertex_count,
                graph.edges.len(),
                graph.base
            )?;
            writeln!(out, "automorphism (images, then inverse images):")?;
            write!(out, "{automorphism}")?;
        }
        LiftDecision::Unknown {
            decomposition,
            reason,
        } => {
            writeln!(out, "unknown: {decomposition}")?;
            writeln!(out, "{reason}")?;
        }
    }
    Ok(EXIT_OK)
}

fn gog_check(
    file: &Path,
    q: u64,
    limit: usize,
    json: bool,
    out: &mut (dyn Write + Send),
) -> Result<i32> {
    if q == 0 {
        bail!("quotient order must be positive");
    }
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let g = GraphOfGroups::from_json(&text)
        .with_context(|| format!("parsing graph of groups {}", file.display()))?;
    let reduced = canonical_form(&g.reduce());
    let maps = if g.vertices().iter().all(|m| q.is_multiple_of(*m)) {
        torsion_free_quotients(&g, q)
    } else {
        Vec::new()
    };
    if json {
        emit_json(
            out,
            &serde_json::json!({
                "graph": g,
                "euler_char": g.euler_char().to_string(),
                "reduced": g.is_reduced(),
                "reduced_form": reduced,
                "abelianization": g.abelianization(),
                "central_vertex_subgroup": g.central_vertex_subgroup(),
                "quotient": q,
                "quotient_maps": maps.len(),
                "first_maps": maps.iter().take(limit).collect::<Vec<_>>(),
            }),
        )?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "graph: {g}")?;
    writeln!(out, "euler characteristic: {}", g.euler_char())?;
    writeln!(out, "reduced: {}", g.is_reduced())?;
    writeln!(out, "reduced form: {reduced}")?;
    writeln!(out, "abelianization: {}", g.abelianization())?;
    writeln!(
        out,
        "central vertex subgroup order: {}",
        g.central_vertex_subgroup()
    )?;
    writeln!(out, "torsion-free Z_{q} quotients: {}", maps.len())?;
    for f in maps.iter().take(limit) {
        writeln!(out, "  {f}")?;
    }
    if maps.len() > limit {
        writeln!(out, "  ... {} more", maps.len() - limit)?;
    }
    Ok(EXIT_OK)
}

fn surface(command: &SurfaceCommand, json: bool, out: &mut (dyn Write + Send)) -> Result<i32> {
    match command {
        SurfaceCommand::Bounds { genus } => {
            let h = hurwitz_bound(*genus)?;
            let w = wiman_bound(*genus)?;
            let u = block_subgroup_order(*genus);
            if json {
                emit_json(
                    out,
                    &serde_json::json!({
                        "genus": genus,
                        "hurwitz": h,
                        "wiman": w,
                        "block_subgroup_order": u.to_string(),
                    }),
                )?;
            } else {
                writeln!(out, "hurwitz bound: {h}")?;
                writeln!(out, "wiman bound: {w}")?;
                writeln!(out, "block subgroup order 12^g g!: {u}")?;
            }
        }
        SurfaceCommand::SymplecticNonlift { genus } => {
            let element = wiman_violation_symplectic(*genus)?;
            let report = wiman_obstruction(*genus)?;
            if json {
                emit_json(
                    out,
                    &serde_json::json!({ "element": element, "report": report }),
                )?;
            } else if let Some(e) = element {
                writeln!(out, "cycle type (length, twist order): {:?}", e.cycles)?;
                writeln!(
                    out,
                    "order {} > wiman bound {}",
                    e.order,
                    wiman_bound(*genus)?
                )?;
                writeln!(out, "matrix:\n{}", e.matrix)?;
                writeln!(out, "verdict: {:?}", report.verdict)?;
            } else {
                writeln!(out, "no block-subgroup element exceeds the wiman bound")?;
            }
        }
        SurfaceCommand::Lefschetz { matrix, order } => {
            let m = read_matrix(matrix)?;
            let report = lefschetz_obstruction(&m, *order)?;
            if json {
                emit_json(out, &report)?;
            } else {
                for w in &report.witnesses {
                    writeln!(out, "{w:?}")?;
                }
                writeln!(out, "verdict: {:?}", report.verdict)?;
                writeln!(out, "note: {}", report.note)?;
            }
        }
        SurfaceCommand::FreeAction { order, base_genus } => {
            let g = free_action_genus(*order, *base_genus)?;
            if json {
                emit_json(
                    out,
                    &serde_json::json!({ "order": order, "base_genus": base_genus, "genus": g }),
                )?;
            } else {
                writeln!(out, "genus: {g}")?;
                writeln!(
                    out,
                    "euler characteristic: {} = {} * {}",
                    2 - 2 * g as i64,
                    order,
                    2 - 2 * *base_genus as i64
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}
