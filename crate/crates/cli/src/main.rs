//! Command-line front end: JSON artifacts in, machine-readable JSON out.
//!
//! Arguments accepting an artifact take either a file path or inline JSON
//! (anything starting with `{`). Exit codes: 0 success, 2 valid output with
//! a negative verdict (not dominated / infeasible / unknown), 1 input or
//! semantic errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use coupflow_core::coupling::{
    coupling_from_flow_decomposition, coupling_from_flow_ledger, flow_from_coupling,
};
use coupflow_core::dominance::{
    dominates_via_flow, generalized_holley_search, holley_condition, HolleySearchOutcome,
    Lattice,
};
use coupflow_core::flow::{
    flow_from_decomposition, is_stable, path_decompose, remove_cycles,
    stabilize_decomposition,
};
use coupflow_core::graph::hasse_digraph;
use coupflow_core::jsonio::{
    self, coupling_to_json, digraph_from_json, flow_from_json, lattice_from_json, measure_from_json, path_measure_from_json, path_measure_to_json,
    rat_value, relation_from_json, transport_result_to_json, truncation_to_json,
    verdict_to_json, weighted_digraph_from_json, z_measure_from_json, NumFormat,
};
use coupflow_core::measure::{half_total_variation, Measure};
use coupflow_core::num::{parse_rat, Rat};
use coupflow_core::transport::{beckmann_min, lattice_all_flows_optimal, ring_optimal};
use coupflow_core::truncate::{
    ghost_truncate, zero_flux_estimate, BinaryTreeInstance, GeometricZChain, GhostMode,
    LazyInstance, ZChainInstance,
};

#[derive(Parser)]
#[command(
    name = "coupflow",
    about = "Couplings from acyclic flows, stochastic dominance by flow feasibility, and discrete transport",
    version
)]
struct Cli {
    /// Emit rationals as floating-point numbers instead of exact strings
    #[arg(long, global = true)]
    float: bool,
    /// Seed for every randomized probe
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoupleMethod {
    Ledger,
    Decomposition,
}

#[derive(Clone, Copy, ValueEnum)]
enum TruncMode {
    Single,
    Split,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    ZChain,
    GeometricZChain,
    BinaryTree,
}

#[derive(Subcommand)]
enum Command {
    /// Decide stochastic dominance for a poset and two measures
    Dominance(DominanceArgs),
    /// Build a coupling from an acyclic flow and a first marginal
    Couple(CoupleArgs),
    /// Decompose an acyclic flow into weighted self-avoiding paths
    Decompose(DecomposeArgs),
    /// Solve the transport problem on a weighted digraph
    Wasserstein(WassersteinArgs),
    /// Check the product criterion on a lattice, or search for a tilt
    Holley(HolleyArgs),
    /// Optimal circulation interval on a weighted ring
    Ring(RingArgs),
    /// Ghost-site truncation of a built-in countable instance
    Truncate(TruncateArgs),
    /// Cross-check invariants of supplied artifacts
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DominanceArgs {
    /// Partial order: {"pairs": [["a","b"], ...]}
    #[arg(long)]
    relation: String,
    /// First measure: {"a": "1/2", ...}
    #[arg(long)]
    mu1: String,
    /// Second measure
    #[arg(long)]
    mu2: String,
}

#[derive(Args)]
struct CoupleArgs {
    /// Flow: {"edges": [["a","b","1/2"], ...]}
    #[arg(long)]
    flow: String,
    /// First marginal; the second is mu1 - div Q
    #[arg(long)]
    mu1: String,
    #[arg(long, value_enum, default_value = "decomposition")]
    method: CoupleMethod,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    flow: String,
    /// Rebalance the result into a stable collection
    #[arg(long)]
    stabilize: bool,
}

#[derive(Args)]
struct WassersteinArgs {
    /// Weighted digraph: {"vertices": [...], "edges": [["a","b","1.5"], ...]}
    #[arg(long)]
    graph: String,
    #[arg(long)]
    mu1: String,
    #[arg(long)]
    mu2: String,
}

#[derive(Args)]
struct HolleyArgs {
    /// Lattice tables: {"elements": [...], "join": [[...]], "meet": [[...]]}
    #[arg(long, conflicts_with = "hypercube")]
    lattice: Option<String>,
    /// Use the Boolean lattice {0,1}^N instead of explicit tables
    #[arg(long)]
    hypercube: Option<u32>,
    #[arg(long)]
    mu1: String,
    #[arg(long)]
    mu2: String,
    /// Search for a positive tilt certifying the generalized condition
    #[arg(long)]
    search: bool,
    /// Candidate budget for the search
    #[arg(long, default_value_t = 100)]
    budget: usize,
}

#[derive(Args)]
struct RingArgs {
    /// Weighted digraph whose undirected shadow is a single cycle
    #[arg(long)]
    graph: String,
    #[arg(long)]
    mu1: String,
    #[arg(long)]
    mu2: String,
}

#[derive(Args)]
struct TruncateArgs {
    /// Built-in instance name
    #[arg(long, value_enum)]
    instance: InstanceKind,
    /// Instance parameters, e.g. {"mu1": {"0": "1"}, "mu2": {"2": "1"}} for
    /// z-chain, {"ratio": "1/2", "center1": 0, "center2": 1} for the
    /// geometric chain, {"r1": "1/4", "r2": "1/2"} for the binary tree
    #[arg(long)]
    params: String,
    /// Truncation level n (the window V_n)
    #[arg(long)]
    level: u32,
    #[arg(long, value_enum, default_value = "single")]
    mode: TruncMode,
    /// Fail (exit 2) when the measure tail outside the window exceeds this
    #[arg(long)]
    tolerance: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    flow: Option<String>,
    #[arg(long)]
    mu1: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long)]
    digraph: Option<String>,
    #[arg(long)]
    relation: Option<String>,
    #[arg(long)]
    path_measure: Option<String>,
    /// Run the all-flows-equal probe on the Boolean lattice of this dimension
    #[arg(long)]
    lattice_dim: Option<u32>,
    /// Probe count for randomized checks
    #[arg(long, default_value_t = 30)]
    probes: usize,
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn load_value(source: &str) -> Result<Value, String> {
    let text = if source.trim_start().starts_with(['{', '[']) {
        source.to_owned()
    } else {
        std::fs::read_to_string(source).map_err(|e| format!("cannot read {source:?}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("malformed JSON in {source:?}: {e}"))
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fmt = if cli.float { NumFormat::Float } else { NumFormat::Exact };
    match run(cli, fmt) {
        Ok(code) => code,
        Err(message) => fail(message),
    }
}

fn run(cli: Cli, fmt: NumFormat) -> Result<ExitCode, String> {
    match cli.command {
        Command::Dominance(args) => {
            let rel = relation_from_json(&load_value(&args.relation)?)
                .map_err(|e| e.to_string())?;
            let mu1 = measure_from_json(&load_value(&args.mu1)?).map_err(|e| e.to_string())?;
            let mu2 = measure_from_json(&load_value(&args.mu2)?).map_err(|e| e.to_string())?;
            let hasse = hasse_digraph(&rel);
            let verdict =
                dominates_via_flow(&mu1, &mu2, &hasse).map_err(|e| e.to_string())?;
            emit(&verdict_to_json(&verdict, fmt));
            Ok(if verdict.dominates { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Couple(args) => {
            let flow = flow_from_json(&load_value(&args.flow)?).map_err(|e| e.to_string())?;
            let sparse = jsonio::sparse_measure_from_json(&load_value(&args.mu1)?)
                .map_err(|e| e.to_string())?;
            let mu1 = Measure::on_vertices(flow.digraph().vertices(), sparse)
                .map_err(|e| e.to_string())?;
            let coupling = match args.method {
                CoupleMethod::Ledger => {
                    coupling_from_flow_ledger(&flow, &mu1)
                        .map_err(|e| e.to_string())?
                        .coupling
                }
                CoupleMethod::Decomposition => {
                    coupling_from_flow_decomposition(&flow, &mu1).map_err(|e| e.to_string())?
                }
            };
            emit(&coupling_to_json(&coupling, fmt));
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose(args) => {
            let flow = flow_from_json(&load_value(&args.flow)?).map_err(|e| e.to_string())?;
            let mut pm = path_decompose(&flow).map_err(|e| e.to_string())?;
            if args.stabilize {
                pm = stabilize_decomposition(&pm).map_err(|e| e.to_string())?;
            }
            emit(&path_measure_to_json(&pm, fmt));
            Ok(ExitCode::SUCCESS)
        }
        Command::Wasserstein(args) => {
            let wg = weighted_digraph_from_json(&load_value(&args.graph)?)
                .map_err(|e| e.to_string())?;
            let mu1 = measure_from_json(&load_value(&args.mu1)?).map_err(|e| e.to_string())?;
            let mu2 = measure_from_json(&load_value(&args.mu2)?).map_err(|e| e.to_string())?;
            match beckmann_min(&wg, &mu1, &mu2) {
                Ok(result) => {
                    emit(&transport_result_to_json(&result, fmt));
                    Ok(ExitCode::SUCCESS)
                }
                Err(coupflow_core::transport::TransportError::Infeasible(detail)) => {
                    emit(&json!({"feasible": false, "detail": detail}));
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Holley(args) => {
            let lattice = match (&args.lattice, args.hypercube) {
                (Some(src), None) => {
                    lattice_from_json(&load_value(src)?).map_err(|e| e.to_string())?
                }
                (None, Some(bits)) => Lattice::hypercube(bits),
                _ => return Err("pass exactly one of --lattice or --hypercube".into()),
            };
            let mu1 = measure_from_json(&load_value(&args.mu1)?).map_err(|e| e.to_string())?;
            let mu2 = measure_from_json(&load_value(&args.mu2)?).map_err(|e| e.to_string())?;
            if args.search {
                let outcome = generalized_holley_search(&mu1, &mu2, &lattice, args.budget)
                    .map_err(|e| e.to_string())?;
                match outcome {
                    HolleySearchOutcome::InArrowH { tilt } => {
                        emit(&json!({
                            "result": "in_arrow_h",
                            "tilt": jsonio::measure_to_json(&tilt, fmt),
                        }));
                        Ok(ExitCode::SUCCESS)
                    }
                    HolleySearchOutcome::Unknown => {
                        emit(&json!({"result": "unknown", "budget": args.budget}));
                        Ok(ExitCode::from(2))
                    }
                }
            } else {
                let verdict =
                    holley_condition(&mu1, &mu2, &lattice).map_err(|e| e.to_string())?;
                emit(&json!({
                    "holds": verdict.holds,
                    "violation": verdict
                        .violation
                        .as_ref()
                        .map(|(a, b)| json!([a, b]))
                        .unwrap_or(Value::Null),
                }));
                Ok(if verdict.holds { ExitCode::SUCCESS } else { ExitCode::from(2) })
            }
        }
        Command::Ring(args) => {
            let wg = weighted_digraph_from_json(&load_value(&args.graph)?)
                .map_err(|e| e.to_string())?;
            let mu1 = measure_from_json(&load_value(&args.mu1)?).map_err(|e| e.to_string())?;
            let mu2 = measure_from_json(&load_value(&args.mu2)?).map_err(|e| e.to_string())?;
            match ring_optimal(&wg, &mu1, &mu2) {
                Ok(out) => {
                    emit(&json!({
                        "alpha_min": out
                            .alpha_min
                            .as_ref()
                            .map(|a| rat_value(a, fmt))
                            .unwrap_or(Value::Null),
                        "alpha_max": out
                            .alpha_max
                            .as_ref()
                            .map(|a| rat_value(a, fmt))
                            .unwrap_or(Value::Null),
                        "result": transport_result_to_json(&out.result, fmt),
                    }));
                    Ok(ExitCode::SUCCESS)
                }
                Err(coupflow_core::transport::TransportError::Infeasible(detail)) => {
                    emit(&json!({"feasible": false, "detail": detail}));
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Truncate(args) => {
            let params = load_value(&args.params)?;
            let instance: Box<dyn LazyInstance> = match args.instance {
                InstanceKind::ZChain => {
                    let mu1 = z_measure_from_json(
                        params.get("mu1").ok_or("params.mu1 missing")?,
                    )
                    .map_err(|e| e.to_string())?;
                    let mu2 = z_measure_from_json(
                        params.get("mu2").ok_or("params.mu2 missing")?,
                    )
                    .map_err(|e| e.to_string())?;
                    let drift = match params.get("drift") {
                        Some(Value::String(s)) => parse_rat(s).map_err(|e| e.to_string())?,
                        Some(other) => return Err(format!("params.drift: bad value {other}")),
                        None => Rat::from_integer(0.into()),
                    };
                    Box::new(ZChainInstance::new(mu1, mu2, drift).map_err(|e| e.to_string())?)
                }
                InstanceKind::GeometricZChain => {
                    let ratio = parse_rat(
                        params
                            .get("ratio")
                            .and_then(Value::as_str)
                            .ok_or("params.ratio missing")?,
                    )
                    .map_err(|e| e.to_string())?;
                    let c1 = params
                        .get("center1")
                        .and_then(Value::as_i64)
                        .ok_or("params.center1 missing")?;
                    let c2 = params
                        .get("center2")
                        .and_then(Value::as_i64)
                        .ok_or("params.center2 missing")?;
                    Box::new(GeometricZChain::new(ratio, c1, c2).map_err(|e| e.to_string())?)
                }
                InstanceKind::BinaryTree => {
                    let r1 = parse_rat(
                        params
                            .get("r1")
                            .and_then(Value::as_str)
                            .ok_or("params.r1 missing")?,
                    )
                    .map_err(|e| e.to_string())?;
                    let r2 = parse_rat(
                        params
                            .get("r2")
                            .and_then(Value::as_str)
                            .ok_or("params.r2 missing")?,
                    )
                    .map_err(|e| e.to_string())?;
                    Box::new(BinaryTreeInstance::new(r1, r2).map_err(|e| e.to_string())?)
                }
            };
            let mode = match args.mode {
                TruncMode::Single => GhostMode::Single,
                TruncMode::Split => GhostMode::Split,
            };
            let t = ghost_truncate(instance.as_ref(), args.level, mode)
                .map_err(|e| e.to_string())?;
            let fluxes = zero_flux_estimate(instance.as_ref(), args.level.max(1))
                .map_err(|e| e.to_string())?;
            let tail = instance.measure_tail(args.level);
            let mut out = truncation_to_json(&t, fmt);
            out["flux"] = Value::Array(
                fluxes
                    .iter()
                    .map(|r| {
                        json!({
                            "level": r.level,
                            "outgoing": rat_value(&r.outgoing, fmt),
                            "incoming": rat_value(&r.incoming, fmt),
                        })
                    })
                    .collect(),
            );
            out["measure_tail"] = tail
                .as_ref()
                .map(|t| rat_value(t, fmt))
                .unwrap_or(Value::Null);
            emit(&out);
            if let (Some(limit), Some(tail)) = (&args.tolerance, &tail) {
                let limit = parse_rat(limit).map_err(|e| e.to_string())?;
                if *tail > limit {
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut checks: Vec<Value> = Vec::new();
            let mut all = true;
            let push = |checks: &mut Vec<Value>,
                            all: &mut bool,
                            name: &str,
                            pass: bool,
                            detail: String| {
                *all &= pass;
                checks.push(json!({"name": name, "pass": pass, "detail": detail}));
            };

            let flow = match &args.flow {
                Some(src) => {
                    Some(flow_from_json(&load_value(src)?).map_err(|e| e.to_string())?)
                }
                None => None,
            };
            let mu1 = match &args.mu1 {
                Some(src) => {
                    Some(measure_from_json(&load_value(src)?).map_err(|e| e.to_string())?)
                }
                None => None,
            };
            let coupling = match &args.coupling {
                Some(src) => Some(
                    jsonio::coupling_from_json(&load_value(src)?, None)
                        .map_err(|e| e.to_string())?,
                ),
                None => None,
            };

            if let Some(q) = &flow {
                let div_total = q.divergence().total();
                push(
                    &mut checks,
                    &mut all,
                    "flow-divergence-sums-to-zero",
                    div_total == Rat::from_integer(0.into()),
                    format!("total divergence {div_total}"),
                );
                let acyclic = q.has_acyclic_support();
                push(
                    &mut checks,
                    &mut all,
                    "flow-support-acyclic",
                    true,
                    format!("acyclic support: {acyclic}"),
                );
                let cleaned = remove_cycles(q);
                push(
                    &mut checks,
                    &mut all,
                    "cycle-removal-idempotent",
                    remove_cycles(&cleaned) == cleaned,
                    "second pass leaves the flow unchanged".into(),
                );
                if acyclic {
                    let pm = path_decompose(q).map_err(|e| e.to_string())?;
                    let rebuilt =
                        flow_from_decomposition(&pm, q.digraph()).map_err(|e| e.to_string())?;
                    push(
                        &mut checks,
                        &mut all,
                        "decomposition-rebuilds-flow",
                        rebuilt == *q,
                        format!("{} paths", pm.len()),
                    );
                    let expect = q.divergence().abs_sum() / Rat::from_integer(2.into());
                    push(
                        &mut checks,
                        &mut all,
                        "decomposition-total-weight",
                        pm.total_weight() == expect,
                        format!("total weight {}", pm.total_weight()),
                    );
                    let stable = stabilize_decomposition(&pm).map_err(|e| e.to_string())?;
                    push(
                        &mut checks,
                        &mut all,
                        "stabilized-collection-is-stable",
                        is_stable(&stable)
                            && flow_from_decomposition(&stable, q.digraph())
                                .map_err(|e| e.to_string())?
                                == *q,
                        format!("{} stable paths", stable.len()),
                    );
                }
            }

            if let (Some(q), Some(m1)) = (&flow, &mu1) {
                let m1 = Measure::on_vertices(
                    q.digraph().vertices(),
                    m1.iter().map(|(v, w)| (v.to_owned(), w.clone())),
                )
                .map_err(|e| e.to_string())?;
                match coupling_from_flow_ledger(q, &m1) {
                    Ok(out) => {
                        let (a, b) = out.coupling.marginals();
                        let div = q.divergence();
                        let target_ok = q
                            .digraph()
                            .vertices()
                            .iter()
                            .all(|v| b.get(v) == m1.get(v) - div.get(v));
                        push(
                            &mut checks,
                            &mut all,
                            "ledger-marginals-exact",
                            a == m1 && target_ok,
                            "row sums mu1, column sums mu1 - div Q".into(),
                        );
                        let rebuilt =
                            flow_from_coupling(&out.coupling, q.digraph(), &out.recorded_paths)
                                .map_err(|e| e.to_string())?;
                        push(
                            &mut checks,
                            &mut all,
                            "ledger-round-trip",
                            rebuilt == *q,
                            "recorded paths reproduce the flow".into(),
                        );
                        let decomp = coupling_from_flow_decomposition(q, &m1)
                            .map_err(|e| e.to_string())?;
                        let tv = half_total_variation(&a, &b).map_err(|e| e.to_string())?;
                        push(
                            &mut checks,
                            &mut all,
                            "decomposition-off-diagonal-mass",
                            decomp.off_diagonal_mass() == tv,
                            format!("off-diagonal mass {tv}"),
                        );
                    }
                    Err(e) => push(
                        &mut checks,
                        &mut all,
                        "builders-run",
                        false,
                        e.to_string(),
                    ),
                }
            }

            if let Some(c) = &coupling {
                let (m1, m2) = c.marginals();
                push(
                    &mut checks,
                    &mut all,
                    "coupling-mass-consistent",
                    m1.total() == m2.total() && m1.total() == c.total_mass(),
                    format!("total mass {}", c.total_mass()),
                );
                push(
                    &mut checks,
                    &mut all,
                    "coupling-economic",
                    true,
                    format!("economic: {}", c.is_economic()),
                );
                if let Some(given) = &mu1 {
                    let matches = given.iter().all(|(v, w)| m1.get(v) == *w);
                    push(
                        &mut checks,
                        &mut all,
                        "coupling-first-marginal-matches-mu1",
                        matches,
                        "row sums compared with the supplied measure".into(),
                    );
                }
            }

            if let Some(src) = &args.digraph {
                let g = digraph_from_json(&load_value(src)?).map_err(|e| e.to_string())?;
                if g.is_acyclic() {
                    let r = g.transitive_reduction().map_err(|e| e.to_string())?;
                    push(
                        &mut checks,
                        &mut all,
                        "reduction-preserves-closure",
                        r.transitive_closure() == g.transitive_closure(),
                        format!("{} -> {} edges", g.edge_count(), r.edge_count()),
                    );
                } else {
                    push(
                        &mut checks,
                        &mut all,
                        "digraph-acyclic",
                        true,
                        "digraph has a directed cycle; reduction skipped".into(),
                    );
                }
            }

            if let Some(src) = &args.relation {
                let rel = relation_from_json(&load_value(src)?).map_err(|e| e.to_string())?;
                let h = hasse_digraph(&rel);
                push(
                    &mut checks,
                    &mut all,
                    "hasse-closure-round-trip",
                    h.transitive_closure() == rel.strict_digraph(),
                    format!("{} covering pairs", h.edge_count()),
                );
            }

            if let Some(src) = &args.path_measure {
                let pm =
                    path_measure_from_json(&load_value(src)?).map_err(|e| e.to_string())?;
                push(
                    &mut checks,
                    &mut all,
                    "path-measure-stable",
                    true,
                    format!("stable: {}", is_stable(&pm)),
                );
                if let Some(q) = &flow {
                    match flow_from_decomposition(&pm, q.digraph()) {
                        Ok(induced) => push(
                            &mut checks,
                            &mut all,
                            "path-measure-induces-flow",
                            induced == *q,
                            "induced flow compared edgewise".into(),
                        ),
                        Err(e) => push(
                            &mut checks,
                            &mut all,
                            "path-measure-induces-flow",
                            false,
                            e.to_string(),
                        ),
                    }
                }
            }

            if let Some(bits) = args.lattice_dim {
                let lattice = Lattice::hypercube(bits);
                let hasse = hasse_digraph(&lattice.order());
                let domain = hasse.vertices().to_vec();
                // a dominated pair built by pushing mass upward
                let base = coupflow_core::sample::random_probability_measure(&mut rng, &domain);
                let mut current: Vec<Rat> = domain.iter().map(|v| base.get(v)).collect();
                for _ in 0..3 {
                    for i in 0..domain.len() {
                        let succs = hasse.out_neighbors(i).to_vec();
                        if succs.is_empty() || current[i] == Rat::from_integer(0.into()) {
                            continue;
                        }
                        let take = current[i].clone() / Rat::from_integer(3.into());
                        let target = succs[rand::Rng::gen_range(&mut rng, 0..succs.len())];
                        current[i] -= &take;
                        current[target] += &take;
                    }
                }
                let m2 = Measure::new(domain.iter().cloned().zip(current))
                    .map_err(|e| e.to_string())?;
                match lattice_all_flows_optimal(bits, &base, &m2, args.probes, &mut rng) {
                    Ok(ok) => push(
                        &mut checks,
                        &mut all,
                        "lattice-all-flows-optimal",
                        ok,
                        format!("{} probes on a random dominated pair", args.probes),
                    ),
                    Err(e) => push(
                        &mut checks,
                        &mut all,
                        "lattice-all-flows-optimal",
                        false,
                        e.to_string(),
                    ),
                }
            }

            if checks.is_empty() {
                return Err("verify needs at least one artifact".into());
            }
            emit(&json!({"all_pass": all, "checks": checks}));
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}
