//! Command definitions and their execution.
//!
//! Exit codes: 0 = YES (or success), 1 = NO, 2 = usage, parse or input error.

use std::fs;
use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use pcluster::cuts::{cut_count_bound, for_each_k_cut, CutBound};
use pcluster::dp::{solve_with, verify_solution, CapPolicy, SolverConfig};
use pcluster::format::{parse_graph, write_graph};
use pcluster::oracle::oracle_solve;
use pcluster::sat::cnf::{parse_assignment, parse_dimacs, write_dimacs, CnfFormula};
use pcluster::sat::eth::{build_eth, eth_witness};
use pcluster::sat::multivariate::{build_multivariate, multivariate_witness, MultivariateParams, FAITHFUL_L_FACTOR};
use pcluster::sat::regularize::RegularizeStatus;
use pcluster::{Graph, Instance, Mode};
use serde::Serialize;
use serde_json::json;

use crate::generate;
use crate::report::{SolveReport, StatsReport, SCHEMA};

pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: pcluster::Error },
    #[error(transparent)]
    Lib(#[from] pcluster::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Parser)]
#[command(name = "pcluster", version, about = "Exact p-Cluster Editing toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide p-Cluster Editing with the cut-enumeration solver.
    Solve(SolveArgs),
    /// Decide p-Cluster Editing by brute force over all partitions (n <= 14).
    Oracle(OracleArgs),
    /// List every cut crossed by at most k edges.
    Cuts(CutsArgs),
    /// Build a Cluster Editing instance from a CNF formula.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Write a seeded random instance to stdout.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    /// Exactly p clusters.
    Exact,
    /// At most p clusters.
    AtMost,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::ExactP,
            ModeArg::AtMost => Mode::AtMostP,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Graph file (`p cep n m` header, `e u v` lines).
    pub graph: PathBuf,
    /// Target number of clusters (at least 1).
    #[arg(long)]
    pub p: usize,
    /// Edit budget.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Cut enumeration cap: `bound` (the proven bound), `none`, or a number.
    #[arg(long, default_value = "bound", value_parser = parse_cap)]
    pub cap: CapPolicy,
    /// Worker threads for the DP; the answer does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
}

#[derive(Debug, Args)]
pub struct CutsArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Print only the number of cuts.
    #[arg(long)]
    pub count_only: bool,
    /// With --count-only, also compare against the bound for this p.
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCommand {
    /// 6p-cluster instance with budget k' (multivariate lower bound).
    Multivariate(MultivariateArgs),
    /// Unrestricted instance with budget 14m.
    Eth(EthArgs),
}

#[derive(Debug, Args)]
pub struct ReduceOutput {
    /// Output prefix; writes `<prefix>.graph` and `<prefix>.json`.
    /// Defaults to the input path without extension plus the reduction name.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Assignment of the input formula (signed variable ids); builds and
    /// verifies the exact-budget witness.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Do not write graph files with more edges than this.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_edges: u128,
}

#[derive(Debug, Args)]
pub struct MultivariateArgs {
    pub cnf: PathBuf,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub k: u64,
    /// Positive rational, e.g. `1`, `1/2` or `0.25`.
    #[arg(long, default_value = "1", value_parser = parse_ratio)]
    pub epsilon: Ratio<u64>,
    /// Constant in the clique size L. Values other than 1000 do not carry
    /// the soundness guarantee and are meant for testing only.
    #[arg(long, default_value_t = FAITHFUL_L_FACTOR)]
    pub l_factor: u64,
    #[command(flatten)]
    pub output: ReduceOutput,
}

#[derive(Debug, Args)]
pub struct EthArgs {
    pub cnf: PathBuf,
    #[command(flatten)]
    pub output: ReduceOutput,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Erdős–Rényi graph G(n, prob).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        prob: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Random cluster graph with p clusters.
    Clusters {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Cluster graph with p clusters plus up to k random pair toggles.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Random 3-CNF formula.
    Cnf {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        /// Only keep clauses satisfied by a hidden random assignment, which
        /// is written as a comment line.
        #[arg(long)]
        satisfiable: bool,
        #[arg(long)]
        seed: u64,
    },
}

fn parse_cap(s: &str) -> Result<CapPolicy, String> {
    match s {
        "bound" => Ok(CapPolicy::Bound),
        "none" => Ok(CapPolicy::Unlimited),
        n => n
            .parse::<u64>()
            .map(CapPolicy::Fixed)
            .map_err(|_| format!("expected `bound`, `none` or a number, got `{n}`")),
    }
}

/// Parses `a`, `a/b` or a decimal like `0.25`.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let bad = || format!("expected a positive rational like `1`, `1/2` or `0.5`, got `{s}`");
    let r = if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let denom = 10u64.pow(frac.len() as u32);
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        Ratio::new(int * denom + frac, denom)
    } else {
        Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)
    };
    if *r.numer() == 0 {
        return Err(bad());
    }
    Ok(r)
}

fn read(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> AppResult<()> {
    fs::write(path, contents).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_graph(path: &Path) -> AppResult<Graph> {
    parse_graph(&read(path)?).map_err(|source| AppError::Input {
        path: path.to_owned(),
        source,
    })
}

fn load_cnf(path: &Path) -> AppResult<CnfFormula> {
    parse_dimacs(&read(path)?).map_err(|source| AppError::Input {
        path: path.to_owned(),
        source,
    })
}

fn load_assignment(path: &Path, vars: usize) -> AppResult<Vec<bool>> {
    parse_assignment(&read(path)?, vars).map_err(|source| AppError::Input {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> AppResult<()> {
    out.write_all(text.as_bytes()).map_err(|source| AppError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    emit(out, &text)
}

fn instance(args: &InstanceArgs) -> AppResult<(Graph, Instance)> {
    if args.p == 0 {
        return Err(AppError::Usage("--p must be at least 1".into()));
    }
    let g = load_graph(&args.graph)?;
    let inst = Instance::new(g.clone(), args.p, args.k, args.mode.into())?;
    Ok((g, inst))
}

fn finish_solve(out: &mut dyn Write, format: Format, report: &SolveReport) -> AppResult<u8> {
    match format {
        Format::Json => emit_json(out, report)?,
        Format::Text => emit(out, &report.to_text())?,
    }
    Ok(if report.cost.is_some() { EXIT_YES } else { EXIT_NO })
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> AppResult<u8> {
    if args.threads == Some(0) {
        return Err(AppError::Usage("--threads must be at least 1".into()));
    }
    let (g, inst) = instance(&args.instance)?;
    let config = SolverConfig {
        cap: args.cap,
        threads: args.threads,
    };
    let start = Instant::now();
    let result = solve_with(&inst, &config)?;
    let mut stats = StatsReport::from_solver(&result.stats);
    if args.timing {
        stats.wall_time_ms = Some(start.elapsed().as_millis());
    }
    let a = &args.instance;
    let report = SolveReport::new("solve", &g, a.mode.into(), a.p, a.k, result.solution.as_ref(), stats);
    finish_solve(out, a.format, &report)
}

fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> AppResult<u8> {
    let (g, inst) = instance(&args.instance)?;
    let a = &args.instance;
    let solution = oracle_solve(&g, a.p, inst.mode)?
        .filter(|&(cost, _)| cost <= a.k)
        .map(|(_, clustering)| pcluster::Solution::from_clustering(&g, clustering));
    if let Some(sol) = &solution {
        debug_assert!(verify_solution(&inst, sol));
    }
    let report = SolveReport::new(
        "oracle",
        &g,
        a.mode.into(),
        a.p,
        a.k,
        solution.as_ref(),
        StatsReport::empty(),
    );
    finish_solve(out, a.format, &report)
}

fn cmd_cuts(args: &CutsArgs, out: &mut dyn Write) -> AppResult<u8> {
    let g = load_graph(&args.graph)?;
    if args.count_only {
        let stats = for_each_k_cut(&g, args.k, |_| ControlFlow::Continue(()));
        let mut text = format!("count {}\n", stats.emitted);
        if let Some(p) = args.p {
            if p == 0 {
                return Err(AppError::Usage("--p must be at least 1".into()));
            }
            let bound = cut_count_bound(p, args.k);
            let (shown, within) = match bound {
                CutBound::Finite(b) => (b.to_string(), stats.emitted <= b),
                CutBound::Saturated => ("saturated".to_string(), true),
            };
            text.push_str(&format!("bound {shown}\nwithin_bound {within}\n"));
        }
        return emit(out, &text).map(|_| EXIT_YES);
    }
    let mut text = String::new();
    for_each_k_cut(&g, args.k, |cut| {
        text.push_str(&cut.to_line());
        text.push('\n');
        ControlFlow::Continue(())
    });
    emit(out, &text)?;
    Ok(EXIT_YES)
}

fn output_prefix(input: &Path, out: &Option<PathBuf>, kind: &str) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => input.with_extension(kind),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct RoleEntry<R: Serialize> {
    first_vertex: u64,
    size: u64,
    #[serde(flatten)]
    role: R,
}

fn cmd_reduce_multivariate(args: &MultivariateArgs, out: &mut dyn Write) -> AppResult<u8> {
    if args.p == 0 {
        return Err(AppError::Usage("--p must be at least 1".into()));
    }
    let phi = load_cnf(&args.cnf)?;
    let params = MultivariateParams {
        p: args.p,
        k: args.k,
        epsilon: args.epsilon,
        l_factor: args.l_factor,
    };
    let inst = build_multivariate(&phi, params)?;
    let prefix = output_prefix(&args.cnf, &args.output.out, "multivariate");
    let graph_path = with_suffix(&prefix, ".graph");
    let sidecar_path = with_suffix(&prefix, ".json");

    let edge_count = inst.graph.edge_count();
    let materialized = if edge_count <= args.output.max_edges {
        let g = inst.graph.to_graph(args.output.max_edges)?;
        write_file(&graph_path, &write_graph(&g))?;
        Some(g)
    } else {
        None
    };

    let witness = match &args.output.witness {
        None => None,
        Some(path) => {
            let input = load_assignment(path, phi.var_count())?;
            if let Some(c) = phi.first_falsified(&input) {
                return Err(pcluster::Error::UnsatisfiedClause { clause: c + 1 }.into());
            }
            let extended = inst.regularized.extend_assignment(&input);
            let w = multivariate_witness(&inst, &extended)?;
            let equal_sizes = w.cluster_sizes.windows(2).all(|s| s[0] == s[1]);
            let all_nonempty = w.cluster_sizes.iter().all(|&s| s > 0);
            let materialized_check = match &materialized {
                Some(g) => {
                    let clustering = inst.graph.expand_clustering(&w.node_cluster)?;
                    let sol = pcluster::Solution::from_clustering(g, clustering);
                    let budget = usize::try_from(inst.budget).unwrap_or(usize::MAX);
                    Some(
                        sol.cost as u128 == w.cost
                            && verify_solution(&Instance::exact(g.clone(), inst.clusters, budget)?, &sol),
                    )
                }
                None => None,
            };
            let verified = w.cost == inst.budget && equal_sizes && all_nonempty && materialized_check.unwrap_or(true);
            Some(json!({
                "cost": w.cost,
                "budget": inst.budget,
                "clusters": w.cluster_sizes.len(),
                "cluster_size": w.cluster_sizes.first(),
                "equal_cluster_sizes": equal_sizes,
                "materialized_check": materialized_check,
                "verified": verified,
                "node_cluster": w.node_cluster.iter().map(|c| c + 1).collect::<Vec<_>>(),
            }))
        }
    };

    let offsets = inst.graph.offsets();
    let role_map: Vec<_> = inst
        .graph
        .roles()
        .iter()
        .enumerate()
        .map(|(node, &role)| RoleEntry {
            first_vertex: offsets[node] + 1,
            size: inst.graph.weight(node),
            role,
        })
        .collect();
    let sidecar = json!({
        "schema": SCHEMA,
        "kind": "multivariate",
        "input": { "vars": phi.var_count(), "clauses": phi.clause_count() },
        "parameters": {
            "p": args.p,
            "k": args.k,
            "epsilon": args.epsilon.to_string(),
            "l_factor": args.l_factor,
            "faithful": params.is_faithful(),
            "L": inst.l,
        },
        "regularized": {
            "vars": inst.n_prime(),
            "clauses": inst.m_prime(),
            "unsat_by_propagation": inst.regularized.status == RegularizeStatus::Unsat,
            "dimacs": write_dimacs(&inst.regularized.formula),
        },
        "target_clusters": inst.clusters,
        "budget": inst.budget,
        "budget_terms": inst.terms,
        "vertex_count": inst.graph.vertex_count(),
        "edge_count": edge_count,
        "graph_file": materialized.as_ref().map(|_| graph_path.display().to_string()),
        "role_map": role_map,
        "witness": witness,
    });
    let mut text = serde_json::to_string_pretty(&sidecar).expect("serializable");
    text.push('\n');
    write_file(&sidecar_path, &text)?;

    let verified = witness.as_ref().map(|w| w["verified"] == true);
    let summary = json!({
        "schema": SCHEMA,
        "kind": "multivariate",
        "faithful": params.is_faithful(),
        "L": inst.l,
        "target_clusters": inst.clusters,
        "budget": inst.budget,
        "vertex_count": inst.graph.vertex_count(),
        "edge_count": edge_count,
        "graph_file": materialized.as_ref().map(|_| graph_path.display().to_string()),
        "sidecar_file": sidecar_path.display().to_string(),
        "witness_verified": verified,
    });
    emit_json(out, &summary)?;
    Ok(if verified == Some(false) { EXIT_ERROR } else { EXIT_YES })
}

fn cmd_reduce_eth(args: &EthArgs, out: &mut dyn Write) -> AppResult<u8> {
    let phi = load_cnf(&args.cnf)?;
    let inst = build_eth(&phi)?;
    let prefix = output_prefix(&args.cnf, &args.output.out, "eth");
    let graph_path = with_suffix(&prefix, ".graph");
    let sidecar_path = with_suffix(&prefix, ".json");
    let g = &inst.graph;
    let written = g.edge_count() as u128 <= args.output.max_edges;
    if written {
        write_file(&graph_path, &write_graph(g))?;
    }

    let witness = match &args.output.witness {
        None => None,
        Some(path) => {
            let input = load_assignment(path, phi.var_count())?;
            if let Some(c) = phi.first_falsified(&input) {
                return Err(pcluster::Error::UnsatisfiedClause { clause: c + 1 }.into());
            }
            let sol = eth_witness(&inst, &inst.normalized.extend_assignment(&input))?;
            let check = Instance::at_most(g.clone(), g.vertex_count().max(1), inst.budget)?;
            let verified = sol.cost == inst.budget && verify_solution(&check, &sol);
            Some(json!({
                "cost": sol.cost,
                "budget": inst.budget,
                "clusters": sol.clustering.cluster_count(),
                "verified": verified,
                "additions": sol.edits.additions(g).iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>(),
                "deletions": sol.edits.deletions(g).iter().map(|&(u, v)| [u + 1, v + 1]).collect::<Vec<_>>(),
            }))
        }
    };
    let role_map: Vec<_> = inst
        .roles
        .iter()
        .enumerate()
        .map(|(v, &role)| RoleEntry {
            first_vertex: v as u64 + 1,
            size: 1,
            role,
        })
        .collect();
    let m = inst.normalized.formula.clause_count();
    let sidecar = json!({
        "schema": SCHEMA,
        "kind": "eth",
        "input": { "vars": phi.var_count(), "clauses": phi.clause_count() },
        "normalized": {
            "vars": inst.normalized.formula.var_count(),
            "clauses": m,
            "origin": inst.normalized.origin,
            "dimacs": write_dimacs(&inst.normalized.formula),
        },
        "occurrences": inst.occurrence_counts,
        "budget": inst.budget,
        "vertex_count": g.vertex_count(),
        "edge_count": g.edge_count(),
        "max_degree": g.vertices().map(|v| g.degree(v)).max().unwrap_or(0),
        "graph_file": written.then(|| graph_path.display().to_string()),
        "role_map": role_map,
        "witness": witness,
    });
    let mut text = serde_json::to_string_pretty(&sidecar).expect("serializable");
    text.push('\n');
    write_file(&sidecar_path, &text)?;

    let verified = witness.as_ref().map(|w| w["verified"] == true);
    let summary = json!({
        "schema": SCHEMA,
        "kind": "eth",
        "clauses": m,
        "budget": inst.budget,
        "vertex_count": g.vertex_count(),
        "edge_count": g.edge_count(),
        "graph_file": written.then(|| graph_path.display().to_string()),
        "sidecar_file": sidecar_path.display().to_string(),
        "witness_verified": verified,
    });
    emit_json(out, &summary)?;
    Ok(if verified == Some(false) { EXIT_ERROR } else { EXIT_YES })
}

fn cmd_generate(cmd: &GenerateCommand, out: &mut dyn Write) -> AppResult<u8> {
    let text = match *cmd {
        GenerateCommand::Gnp { n, prob, seed } => {
            if !(0.0..=1.0).contains(&prob) {
                return Err(AppError::Usage("--prob must lie in [0, 1]".into()));
            }
            write_graph(&generate::gnp(&mut generate::rng(seed), n, prob))
        }
        GenerateCommand::Clusters { n, p, seed } => {
            if p == 0 || p > n {
                return Err(AppError::Usage("need 1 <= p <= n".into()));
            }
            let mut rng = generate::rng(seed);
            let sizes = generate::cluster_sizes(&mut rng, n, p);
            write_graph(&generate::shuffled(&mut rng, &generate::cluster_graph(&sizes)))
        }
        GenerateCommand::Planted { n, p, k, seed } => {
            if p == 0 || p > n {
                return Err(AppError::Usage("need 1 <= p <= n".into()));
            }
            write_graph(&generate::planted(&mut generate::rng(seed), n, p, k))
        }
        GenerateCommand::Cnf {
            vars,
            clauses,
            satisfiable,
            seed,
        } => {
            if vars < 3 {
                return Err(AppError::Usage("--vars must be at least 3".into()));
            }
            let mut rng = generate::rng(seed);
            if satisfiable {
                let (phi, a) = generate::satisfiable_3cnf(&mut rng, vars, clauses);
                let lits: Vec<String> = a
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                    .collect();
                format!("c assignment {} 0\n{}", lits.join(" "), write_dimacs(&phi))
            } else {
                write_dimacs(&generate::random_3cnf(&mut rng, vars, clauses))
            }
        }
    };
    emit(out, &text)?;
    Ok(EXIT_YES)
}

/// Runs a parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> AppResult<u8> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, out),
        Command::Oracle(args) => cmd_oracle(args, out),
        Command::Cuts(args) => cmd_cuts(args, out),
        Command::Reduce(ReduceCommand::Multivariate(args)) => cmd_reduce_multivariate(args, out),
        Command::Reduce(ReduceCommand::Eth(args)) => cmd_reduce_eth(args, out),
        Command::Generate(cmd) => cmd_generate(cmd, out),
    }
}
