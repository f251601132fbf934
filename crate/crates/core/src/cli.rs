//! Command-line interface: stability checks, solvers, lattice operations,
//! decomposition, hardness-construction generation, and an approximation
//! bench, over the JSON instance/matching file formats.
//!
//! Exit codes: 0 on success, 2 when a decision query answers "threshold
//! unmet", 1 on errors. All randomness flows through `--seed`; output
//! files are written atomically (temp file + rename).

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bipartite::{self, BipartiteObjective};
use crate::error::Error;
use crate::gen::{random_instance, seeded_rng, GenConfig};
use crate::lattice;
use crate::matching::{
    classify_matching, num_fully, parse_matching, serialize_matching, welfare, FractionalMatching,
};
use crate::milp::{lsm_optimize, milp_solve, MilpOptions, Mode, Objective, OptProblem, SolveStatus};
use crate::model::{derive_preferences, parse_instance, serialize_instance, Instance, Side};
use crate::oracle::{brute_force_optimum, OracleBudget};
use crate::partition::{compute_osm_alg1_with_partition, TieBreakPolicy};
use crate::rational::{format_rat, parse_rat, rat, Rat};
use crate::reductions::{
    reduce_is_to_full_csm, reduce_is_to_welfare_csm, reduce_is_to_welfare_osm_roommates,
    ReductionKind, SourceGraph,
};
use crate::stability::{blocking_pairs, is_stable, StabilityConcept};

#[derive(Parser)]
#[command(
    name = "fracstable",
    about = "Fractional stable matching solvers and verifiers",
    version
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Cardinal,
    Ordinal,
    Linear,
}

impl From<ConceptArg> for StabilityConcept {
    fn from(c: ConceptArg) -> Self {
        match c {
            ConceptArg::Cardinal => StabilityConcept::Cardinal,
            ConceptArg::Ordinal => StabilityConcept::Ordinal,
            ConceptArg::Linear => StabilityConcept::Linear,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Full,
    Welfare,
    Mass,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Full => Objective::MaxFull,
            ObjectiveArg::Welfare => Objective::MaxWelfare,
            ObjectiveArg::Mass => Objective::MaxMass,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    U,
    W,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeOpArg {
    Join,
    Meet,
    Median,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionTarget {
    WelfareCsm,
    FullCsm,
    WelfareOsmRr,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    #[arg(long)]
    stability: ConceptArg,
    #[arg(long)]
    objective: ObjectiveArg,
    /// Decision threshold for --objective full.
    #[arg(long)]
    tau: Option<String>,
    /// Decision threshold for --objective welfare (or mass).
    #[arg(long)]
    gamma: Option<String>,
    /// Branch and bound instead of exhaustive binary enumeration.
    #[arg(long)]
    bnb: bool,
    /// Where to write the solution matching (default: stdout report only).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to also write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a matching under all three stability concepts.
    Check {
        instance: PathBuf,
        matching: PathBuf,
    },
    /// Compute an ordinally stable matching via a stable partition.
    Osm {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the cycle decomposition of the stable partition.
        #[arg(long)]
        emit_partition: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Optimal stable matching per concept and objective (MILP/LP).
    Solve(SolveArgs),
    /// Brute-force reference solver with enforced budgets.
    Oracle(SolveArgs),
    /// Join/meet/median of matchings.
    Lattice {
        #[arg(long)]
        op: LatticeOpArg,
        /// Which declared side acts as the proposing side.
        #[arg(long, value_enum, default_value_t = SideArg::U)]
        side: SideArg,
        instance: PathBuf,
        /// Two matching files (three for median).
        matchings: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convex decomposition of a bipartite fractional matching.
    Decompose {
        instance: PathBuf,
        matching: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a hardness-construction instance from a source graph.
    Reduce {
        /// Source problem (only "is" is supported).
        #[arg(long, default_value = "is")]
        from: String,
        #[arg(long, value_enum)]
        to: ReductionTarget,
        /// Edge list file, one "i j" pair per line, 1-based.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximation bench: stable-partition matching vs exact optimum.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeded instances.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Largest instance size in the family.
        #[arg(long, default_value_t = 10)]
        max_agents: usize,
        /// Where to write the CSV (default stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliArgs::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    parse_instance(&read_to_string(path)?)
}

fn load_matching(inst: &Instance, path: &Path) -> Result<FractionalMatching, Error> {
    parse_matching(inst, &read_to_string(path)?)
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            std::process::id()
        )),
        None => PathBuf::from(format!(".fracstable.tmp-{}", std::process::id())),
    };
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Serialize)]
struct RunReport {
    instance: String,
    command: String,
    concept: String,
    objective: String,
    mode: String,
    status: String,
    value: String,
    binaries: serde_json::Value,
    stability_certified: bool,
    elapsed_ms: u128,
}

fn dispatch(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Check { instance, matching } => {
            let inst = load_instance(&instance)?;
            let m = load_matching(&inst, &matching)?;
            println!("{:<10} {:<8} first blocker", "concept", "stable");
            for concept in StabilityConcept::ALL {
                let report = blocking_pairs(&inst, &m, concept);
                let (stable, blocker) = match report.blockers.first() {
                    None => ("yes".to_string(), "-".to_string()),
                    Some(b) => (
                        "no".to_string(),
                        format!("{{{}, {}}}", inst.label(b.u), inst.label(b.v)),
                    ),
                };
                println!("{:<10} {:<8} {}", concept.name(), stable, blocker);
            }
            Ok(0)
        }
        Command::Osm {
            instance,
            seed,
            emit_partition,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let policy = if seed == 0 {
                TieBreakPolicy::index_order()
            } else {
                TieBreakPolicy::seeded(seed)
            };
            let (m, partition) = compute_osm_alg1_with_partition(&inst, policy)?;
            if emit_partition {
                println!("partition: {}", partition.display(&inst));
            }
            let stats = classify_matching(&inst, &m);
            println!(
                "fully matched: {} of {}; welfare: {}",
                stats.num_fully,
                inst.n(),
                format_rat(&stats.welfare)
            );
            let text = serialize_matching(&inst, &m);
            match output {
                Some(path) => write_atomic(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Solve(args) => run_solver(args, false),
        Command::Oracle(args) => run_solver(args, true),
        Command::Lattice {
            op,
            side,
            instance,
            matchings,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let side = match side {
                SideArg::U => Side::U,
                SideArg::W => Side::W,
            };
            let loaded: Vec<FractionalMatching> = matchings
                .iter()
                .map(|p| load_matching(&inst, p))
                .collect::<Result<_, _>>()?;
            let result = match (op, loaded.as_slice()) {
                (LatticeOpArg::Join, [a, b]) => lattice::join(&inst, a, b, side)?,
                (LatticeOpArg::Meet, [a, b]) => lattice::meet(&inst, a, b, side)?,
                (LatticeOpArg::Median, [a, b, c]) => lattice::median(&inst, a, b, c)?,
                (LatticeOpArg::Median, _) => {
                    return Err(Error::Parse("median needs exactly three matchings".into()))
                }
                _ => return Err(Error::Parse("join/meet need exactly two matchings".into())),
            };
            let text = serialize_matching(&inst, &result);
            match output {
                Some(path) => write_atomic(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Decompose {
            instance,
            matching,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let m = load_matching(&inst, &matching)?;
            let d = bipartite::support_decompose(&inst, &m)?;
            #[derive(Serialize)]
            struct Term {
                coefficient: String,
                edges: Vec<[String; 2]>,
            }
            let terms: Vec<Term> = d
                .terms
                .iter()
                .map(|(c, t)| Term {
                    coefficient: format_rat(c),
                    edges: t
                        .iter()
                        .map(|(u, v, _)| [inst.label(u).to_string(), inst.label(v).to_string()])
                        .collect(),
                })
                .collect();
            let text = serde_json::to_string_pretty(&serde_json::json!({ "terms": terms }))
                .expect("serialization cannot fail");
            match output {
                Some(path) => write_atomic(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Reduce {
            from,
            to,
            graph,
            k,
            output,
        } => {
            if from != "is" {
                return Err(Error::Unsupported(format!(
                    "unknown reduction source {from:?}; only \"is\" is available"
                )));
            }
            let g = SourceGraph::parse_edge_list(&read_to_string(&graph)?)?;
            let red = match to {
                ReductionTarget::WelfareCsm => reduce_is_to_welfare_csm(&g, k)?,
                ReductionTarget::FullCsm => reduce_is_to_full_csm(&g, k)?,
                ReductionTarget::WelfareOsmRr => reduce_is_to_welfare_osm_roommates(&g, k)?,
            };
            for w in &red.warnings {
                eprintln!("warning: {w}");
            }
            let kind = match red.kind {
                ReductionKind::WelfareCsm => "welfare-csm",
                ReductionKind::FullCsm => "full-csm",
                ReductionKind::WelfareOsmRoommates => "welfare-osm-rr",
            };
            println!(
                "{} instance: {} agents, {} edges, threshold {}",
                kind,
                red.instance.n(),
                red.instance.edges().len(),
                format_rat(&red.threshold)
            );
            let text = serialize_instance(&red.instance);
            match output {
                Some(path) => write_atomic(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Bench {
            seed,
            count,
            max_agents,
            output,
        } => run_bench(seed, count, max_agents, output),
    }
}

fn parse_budget_env() -> OracleBudget {
    let mut budget = OracleBudget::default();
    if let Ok(spec) = std::env::var("FRACSTABLE_BUDGET") {
        for part in spec.split(',') {
            let Some((key, value)) = part.split_once('=') else {
                continue;
            };
            if let Ok(v) = value.trim().parse::<u64>() {
                match key.trim() {
                    "agents" => budget.max_agents = v as usize,
                    "edges" => budget.max_edges = v as usize,
                    "enum" => budget.max_enum = v,
                    _ => {}
                }
            }
        }
    }
    budget
}

fn run_solver(args: SolveArgs, oracle: bool) -> Result<i32, Error> {
    let inst = load_instance(&args.instance)?;
    let concept: StabilityConcept = args.stability.into();
    let objective: Objective = args.objective.into();
    let threshold = match (&args.tau, &args.gamma) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse("--tau and --gamma are mutually exclusive".into()))
        }
        (Some(t), None) => Some(parse_rat(t)?),
        (None, Some(g)) => Some(parse_rat(g)?),
        (None, None) => None,
    };
    let problem = match threshold {
        Some(t) => OptProblem::decide(concept, objective, t),
        None => OptProblem::optimize(concept, objective),
    };
    let started = Instant::now();
    let (matching, value, status, binaries) = if oracle {
        let budget = parse_budget_env();
        let (value, m) = brute_force_optimum(&inst, &problem, budget)?;
        let status = match &problem.mode {
            Mode::Optimize => SolveStatus::Optimal,
            Mode::Decision(t) => {
                if value >= *t {
                    SolveStatus::ThresholdMet
                } else {
                    SolveStatus::ThresholdUnmet
                }
            }
        };
        (m, value, status, serde_json::json!({}))
    } else if concept == StabilityConcept::Linear
        && matches!(objective, Objective::MaxWelfare | Objective::MaxMass)
        && matches!(problem.mode, Mode::Optimize)
    {
        let (m, value) = lsm_optimize(&inst, objective)?;
        (m, value, SolveStatus::Optimal, serde_json::json!({}))
    } else {
        // Fast path: for strict bipartite instances the ordinal optima
        // come from the deferred-acceptance machinery.
        let prefs = derive_preferences(&inst);
        let fast = concept == StabilityConcept::Ordinal
            && prefs.is_bipartite()
            && !prefs.has_ties()
            && matches!(problem.mode, Mode::Optimize)
            && matches!(objective, Objective::MaxFull | Objective::MaxWelfare);
        if fast {
            let bobj = match objective {
                Objective::MaxFull => BipartiteObjective::MaxFull,
                _ => BipartiteObjective::MaxWelfare,
            };
            let (m, value) = bipartite::optimal_osm_bipartite_strict(&inst, bobj)?;
            (m, value, SolveStatus::Optimal, serde_json::json!({}))
        } else {
            let options = MilpOptions {
                branch_and_bound: args.bnb,
                ..Default::default()
            };
            let sol = milp_solve(&inst, &problem, &options)?;
            let y: serde_json::Map<String, serde_json::Value> = sol
                .y
                .iter()
                .map(|(&(u, v), &bit)| {
                    (
                        format!("{}-{}", inst.label(u), inst.label(v)),
                        serde_json::Value::from(u8::from(bit)),
                    )
                })
                .collect();
            let z: serde_json::Map<String, serde_json::Value> = sol
                .z
                .iter()
                .map(|(&a, &bit)| {
                    (
                        inst.label(a).to_string(),
                        serde_json::Value::from(u8::from(bit)),
                    )
                })
                .collect();
            (
                sol.matching,
                sol.value,
                sol.status,
                serde_json::json!({"y": y, "z": z}),
            )
        }
    };
    // Certify before emitting anything.
    let certified = is_stable(&inst, &matching, concept);
    if !certified {
        return Err(Error::Unsupported(
            "internal: solver output failed stability certification".into(),
        ));
    }
    let status_str = match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::ThresholdMet => "threshold_met",
        SolveStatus::ThresholdUnmet => "threshold_unmet",
    };
    let report = RunReport {
        instance: args.instance.display().to_string(),
        command: if oracle { "oracle" } else { "solve" }.into(),
        concept: concept.name().into(),
        objective: match objective {
            Objective::MaxFull => "full",
            Objective::MaxWelfare => "welfare",
            Objective::MaxMass => "mass",
        }
        .into(),
        mode: match &problem.mode {
            Mode::Optimize => "optimize".into(),
            Mode::Decision(t) => format!("decision({})", format_rat(t)),
        },
        status: status_str.into(),
        value: format_rat(&value),
        binaries,
        stability_certified: certified,
        elapsed_ms: started.elapsed().as_millis(),
    };
    let report_text =
        serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    println!("{report_text}");
    if let Some(path) = &args.report {
        write_atomic(path, &report_text)?;
    }
    if let Some(path) = &args.output {
        write_atomic(path, &serialize_matching(&inst, &matching))?;
    }
    Ok(if status == SolveStatus::ThresholdUnmet {
        2
    } else {
        0
    })
}

/// Seeded family comparison: the stable-partition matching is a
/// 2-approximation for the maximum number of fully matched agents, under
/// both the cardinal and the ordinal concept.
fn run_bench(
    seed: u64,
    count: usize,
    max_agents: usize,
    output: Option<PathBuf>,
) -> Result<i32, Error> {
    let mut rng = seeded_rng(seed);
    let mut csv = String::from("seed,index,n,m,concept,alg1_fully,milp_opt,ratio\n");
    for index in 0..count {
        let n = 4 + (index % (max_agents.saturating_sub(3)));
        let cfg = GenConfig {
            edge_prob: 0.35,
            ..GenConfig::roommates(n.max(4))
        };
        let inst = random_instance(&mut rng, &cfg);
        let alg1 = compute_osm_alg1_with_partition(&inst, TieBreakPolicy::seeded(seed ^ index as u64))?.0;
        let alg1_fully = num_fully(&inst, &alg1);
        for concept in [StabilityConcept::Cardinal, StabilityConcept::Ordinal] {
            let mut options = MilpOptions::bnb();
            options.warm_start = Some(alg1.clone());
            let sol = milp_solve(
                &inst,
                &OptProblem::optimize(concept, Objective::MaxFull),
                &options,
            )?;
            let ratio = if alg1_fully == 0 {
                if sol.value == rat(0) {
                    Rat::from_integer(1.into())
                } else {
                    return Err(Error::Unsupported(
                        "internal: optimum positive but the partition matched nobody".into(),
                    ));
                }
            } else {
                sol.value.clone() / rat(alg1_fully as i64)
            };
            if ratio > rat(2) {
                return Err(Error::Unsupported(format!(
                    "approximation ratio {} exceeds 2 on instance {index}",
                    format_rat(&ratio)
                )));
            }
            csv.push_str(&format!(
                "{seed},{index},{},{},{},{alg1_fully},{},{}\n",
                inst.n(),
                inst.edges().len(),
                concept.name(),
                format_rat(&sol.value),
                format_rat(&ratio)
            ));
        }
    }
    match output {
        Some(path) => write_atomic(&path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}
