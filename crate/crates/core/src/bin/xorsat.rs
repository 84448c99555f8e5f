use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use xorsat_core::conduct::{conductance_exact, EXACT_MAX_POINTS, hypercube_certificate, lightest_basis, min_pairwise_distance, span_points};
use xorsat_core::de;
use xorsat_core::Error;
use xorsat_core::experiment::{
    checks_for, run_experiment, ExperimentConfig, ParamOverrides, Preset, Table,
};
use xorsat_core::gf2::kernel_basis_dense;
use xorsat_core::graph::{
    generate_configuration, generate_degree_constrained, generate_uniform, DegreeProfile, FactorGraph,
    XorInstance,
};
use xorsat_core::peel::{decompose, peel};
use xorsat_core::structure::{
    brute_force_clusters, certificate_bounds, cluster_basis, cluster_partition, sparse_basis_no_core,
    BRUTE_MAX_DIM,
};

#[derive(Parser)]
#[command(name = "xorsat", version, about = "Random k-XORSAT solution-space experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance and write it in the text format.
    Gen(GenArgs),
    /// Peel one instance, or a seeded grid of them (CSV per trial).
    Peel(PeelArgs),
    /// Core / backbone / periphery sizes of one instance.
    Decompose(InstanceArgs),
    /// Sparse kernel basis of a core-free instance, one support per line.
    Basis(BasisArgs),
    /// Cluster count, low-weight core solutions and optional brute-force check.
    Clusters(ClusterArgs),
    /// Density-evolution predictions and thresholds.
    De(DeArgs),
    /// Exact conductance of a small kernel and its hypercube certificate.
    Conduct(ConductArgs),
    /// Run a named experiment preset over an (n, alpha) grid.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Uniform,
    DegreeConstrained,
    Configuration,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file; when absent one is generated from the flags below.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of checks; overrides --alpha.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    ensemble: EnsembleArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    inst: InstanceArgs,
}

#[derive(Args)]
struct PeelArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Comma-separated sizes.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated densities.
    #[arg(long)]
    alpha: Option<String>,
    /// start:stop:step, inclusive.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BasisArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Also check each vector against its ball-mass bound.
    #[arg(long)]
    certify: bool,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long)]
    weight_cutoff: Option<usize>,
    #[arg(long)]
    witness_depth: Option<usize>,
    /// Hamming step for brute-force clustering (default: basis sparsity).
    #[arg(long)]
    step: Option<usize>,
    /// Build the basis of the cluster containing 0.
    #[arg(long)]
    basis: bool,
    /// Compare against brute-force clustering when the kernel is small.
    #[arg(long)]
    brute: bool,
}

#[derive(Args)]
struct DeArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    alpha: Option<f64>,
    /// Report the clustering threshold with both independent oracles.
    #[arg(long)]
    alpha_d: bool,
    #[arg(long, default_value_t = 200)]
    t_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConductArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Proximity radius (default: smallest pairwise distance).
    #[arg(long)]
    step: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    preset: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Comma-separated sizes.
    #[arg(long)]
    n: String,
    /// Comma-separated densities.
    #[arg(long)]
    alpha: Option<String>,
    /// start:stop:step, inclusive.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    weight_cutoff: Option<usize>,
    #[arg(long)]
    witness_depth: Option<usize>,
    #[arg(long)]
    step: Option<usize>,
    /// Rounds tracked by de-tracking.
    #[arg(long, default_value_t = 5)]
    t_max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Summary table destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial table destination.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} value {x:?}")))
        .collect()
}

/// `start:stop:step` with the stop included up to rounding.
fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = parse_list::<f64>(&s.replace(':', ","), "alpha-grid")?;
    let [start, stop, step] = parts[..] else {
        bail!("alpha-grid must look like start:stop:step");
    };
    if !(step > 0.0) || stop < start {
        bail!("alpha-grid needs step > 0 and stop >= start");
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // round to the step's decimals so values print cleanly
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

fn alphas(alpha: &Option<String>, grid: &Option<String>) -> anyhow::Result<Vec<f64>> {
    match (alpha, grid) {
        (Some(_), Some(_)) => bail!("give either --alpha or --alpha-grid"),
        (Some(a), None) => parse_list(a, "alpha"),
        (None, Some(g)) => parse_grid(g),
        (None, None) => bail!("missing --alpha or --alpha-grid"),
    }
}

fn load(args: &InstanceArgs) -> anyhow::Result<FactorGraph> {
    if let Some(path) = &args.input {
        let inst = XorInstance::read_file(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(inst.graph);
    }
    let Some(n) = args.n else { bail!("missing --input or --n") };
    let m = match (args.m, args.alpha) {
        (Some(m), _) => m,
        (None, Some(a)) => checks_for(n, a),
        (None, None) => bail!("missing --alpha or --m"),
    };
    Ok(match args.ensemble {
        EnsembleArg::Uniform => generate_uniform(n, args.k, m, args.seed)?,
        EnsembleArg::DegreeConstrained => {
            generate_degree_constrained(n, &DegreeProfile::regular(args.k, m)?, args.seed)?
        }
        EnsembleArg::Configuration => generate_configuration(n, &DegreeProfile::regular(args.k, m)?, args.seed)?,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn table_text(t: &Table, meta: &str, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Csv => t.to_csv(meta),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "schema": "xorsat-table v1", "meta": meta, "table": t }))?;
            s.push('\n');
            s
        }
    })
}

fn json_text(v: &serde_json::Value) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<()> {
    let g = load(&a.inst)?;
    let mut buf = Vec::new();
    xorsat_core::graph::write_instance(&mut buf, &XorInstance::homogeneous(g))?;
    emit(&a.inst.out, std::str::from_utf8(&buf)?)
}

fn cmd_peel(a: PeelArgs) -> anyhow::Result<()> {
    if let Some(path) = &a.input {
        let g = XorInstance::read_file(path)?.graph;
        let tr = peel(&g);
        let v = json!({
            "n": g.num_vars(), "m": g.num_checks(), "peelable": tr.is_peelable(),
            "halting_time": tr.halting_time(), "core_vars": tr.core_vars().len(),
            "core_checks": tr.core_checks().len(),
        });
        return emit(&a.out, &json_text(&v)?);
    }
    let Some(ns) = &a.n else { bail!("missing --input or --n") };
    let cfg = ExperimentConfig::new(Preset::ThresholdScan, a.k, parse_list(ns, "n")?, alphas(&a.alpha, &a.alpha_grid)?, a.trials, a.seed);
    let out = run_experiment(&cfg)?;
    // per-trial rows plus the peelable fraction of each (n, alpha) cell
    let mut t = out.trials.clone();
    t.name = "peel-trials".into();
    t.columns.push("peelable_fraction".into());
    for (i, row) in t.rows.iter_mut().enumerate() {
        let cell = i / cfg.trials;
        row.push(out.summary.rows[cell][out.summary.column("mean_peelable").expect("column")].clone());
    }
    emit(&a.out, &table_text(&t, &out.meta(), a.format)?)
}

fn cmd_decompose(a: InstanceArgs) -> anyhow::Result<()> {
    let g = load(&a)?;
    let d = decompose(&g)?;
    let v = json!({
        "n": g.num_vars(), "m": g.num_checks(),
        "core": { "vars": d.core_vars.len(), "checks": d.core_checks.len() },
        "backbone": { "vars": d.backbone_vars.len(), "checks": d.backbone_checks.len() },
        "periphery": { "vars": d.periphery_vars.len(), "checks": d.periphery_checks.len() },
        "halting_time": peel(&g).halting_time(),
    });
    emit(&a.out, &json_text(&v)?)
}

fn cmd_basis(a: BasisArgs) -> anyhow::Result<()> {
    let g = load(&a.inst)?;
    let b = sparse_basis_no_core(&g)?;
    if a.certify {
        let bounds = certificate_bounds(&g, &b)?;
        eprintln!("certificate: max ball bound {}", bounds.iter().max().unwrap_or(&0));
    }
    eprintln!("basis: n {} dim {} sparsity {}", b.n, b.dim(), b.s);
    emit(&a.inst.out, &b.to_index_lines())
}

fn cmd_clusters(a: ClusterArgs) -> anyhow::Result<()> {
    let g = load(&a.inst)?;
    let params = ParamOverrides { weight_cutoff: a.weight_cutoff, witness_depth: a.witness_depth, step: a.step }
        .resolve(g.num_vars());
    let report = cluster_partition(&g, &params)?;
    let mut v = json!({ "report": report });
    let mut step = a.step;
    if a.basis {
        let b = cluster_basis(&g, &decompose(&g)?, &params)?;
        step = step.or(Some(b.s.max(1)));
        v["cluster_basis"] = json!({ "dim": b.dim(), "s": b.s, "first_set": b.first_set, "vectors": b.vectors });
    }
    if a.brute {
        let kdim = kernel_basis_dense(&g.to_bitmatrix()).dim;
        if kdim <= BRUTE_MAX_DIM {
            let step = step.unwrap_or(1);
            let br = brute_force_clusters(&g, step)?;
            v["brute_force"] = json!({ "step": step, "components": br.num_components, "sizes": br.component_sizes() });
        } else {
            v["brute_force"] = json!({ "skipped": format!("kernel dimension {kdim} exceeds {BRUTE_MAX_DIM}") });
        }
    }
    emit(&a.inst.out, &json_text(&v)?)
}

fn cmd_de(a: DeArgs) -> anyhow::Result<()> {
    let v = if a.alpha_d {
        json!({
            "k": a.k,
            "alpha_d": de::alpha_d(a.k, 1e-9)?,
            "oracles": {
                "grid_scan": de::alpha_d_grid_scan(a.k, 1e-6, 1e-9)?,
                "closed_form": de::alpha_d_closed_form(a.k)?,
            },
        })
    } else {
        let Some(alpha) = a.alpha else { bail!("missing --alpha or --alpha-d") };
        serde_json::to_value(de::de_report(alpha, a.k, a.t_max)?)?
    };
    emit(&a.out, &json_text(&v)?)
}

fn cmd_conduct(a: ConductArgs) -> anyhow::Result<()> {
    let g = load(&a.inst)?;
    let n = g.num_vars();
    let kb = kernel_basis_dense(&g.to_bitmatrix());
    if kb.dim >= usize::BITS as usize || 1usize << kb.dim > EXACT_MAX_POINTS {
        return Err(Error::TooLarge(format!("kernel of dimension {} has more than {EXACT_MAX_POINTS} points", kb.dim)).into());
    }
    let points = span_points(n, &kb.vectors)?;
    let min_d = min_pairwise_distance(&points);
    let step = a.step.or(min_d).unwrap_or(1);
    let exact = conductance_exact(&points, step)?;
    let basis = lightest_basis(n, &points);
    let cert = hypercube_certificate(&points, &basis)?;
    let at_s = conductance_exact(&points, basis.s)?;
    let v = json!({
        "kernel_dim": kb.dim, "points": points.len(), "min_distance": min_d,
        "step": step, "exact": exact,
        "lightest_basis": { "s": basis.s, "vectors": basis.vectors },
        "certificate": cert, "exact_at_s": at_s,
    });
    emit(&a.inst.out, &json_text(&v)?)
}

fn cmd_experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::new(
        a.preset.parse::<Preset>()?,
        a.k,
        parse_list(&a.n, "n")?,
        alphas(&a.alpha, &a.alpha_grid)?,
        a.trials,
        a.seed,
    );
    cfg.params = ParamOverrides { weight_cutoff: a.weight_cutoff, witness_depth: a.witness_depth, step: a.step };
    cfg.t_max = a.t_max;
    let out = run_experiment(&cfg)?;
    let meta = out.meta();
    if let Some(path) = &a.trials_out {
        emit(&Some(path.clone()), &table_text(&out.trials, &meta, a.format)?)?;
    }
    emit(&a.out, &table_text(&out.summary, &meta, a.format)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Peel(a) => cmd_peel(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Clusters(a) => cmd_clusters(a),
        Command::De(a) => cmd_de(a),
        Command::Conduct(a) => cmd_conduct(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
