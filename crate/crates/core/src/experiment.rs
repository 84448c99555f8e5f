//! Seeded Monte-Carlo experiments over grids of (n, α): per-trial rows and
//! per-cell summaries with predictions, emitted as CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bp::{bp_zero_fixed_point, decompose_from_bp, message_stats, peeling_rounds_from_bp};
use crate::de;
use crate::error::{Error, Result};
use crate::gf2::rank;
use crate::graph::{derive_seed, generate_uniform, FactorGraph};
use crate::peel::{decompose, peel};
use crate::structure::{
    brute_force_clusters, cluster_basis, cluster_partition, sparse_basis_no_core, ClusterParams,
    BRUTE_MAX_DIM,
};

/// First line of every CSV table.
pub const CSV_SCHEMA: &str = "# xorsat-table v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    ThresholdScan,
    CoreSize,
    ClusterExponent,
    SparsityScan,
    DeTracking,
    BpEquivalence,
    MessageLaw,
    PeripheryProfile,
    ClusterOracle,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::ThresholdScan,
        Preset::CoreSize,
        Preset::ClusterExponent,
        Preset::SparsityScan,
        Preset::DeTracking,
        Preset::BpEquivalence,
        Preset::MessageLaw,
        Preset::PeripheryProfile,
        Preset::ClusterOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ThresholdScan => "threshold-scan",
            Preset::CoreSize => "core-size",
            Preset::ClusterExponent => "cluster-exponent",
            Preset::SparsityScan => "sparsity-scan",
            Preset::DeTracking => "de-tracking",
            Preset::BpEquivalence => "bp-equivalence",
            Preset::MessageLaw => "message-law",
            Preset::PeripheryProfile => "periphery-profile",
            Preset::ClusterOracle => "cluster-oracle",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown preset {s:?}")))
    }
}

/// Overrides for the size-dependent cluster defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParamOverrides {
    pub weight_cutoff: Option<usize>,
    pub witness_depth: Option<usize>,
    pub step: Option<usize>,
}

impl ParamOverrides {
    pub fn resolve(&self, n: usize) -> ClusterParams {
        let base = ClusterParams::for_size(n);
        ClusterParams {
            weight_cutoff: self.weight_cutoff.unwrap_or(base.weight_cutoff),
            witness_depth: self.witness_depth.unwrap_or(base.witness_depth),
            brute_step: self.step.or(base.brute_step),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub k: usize,
    pub ns: Vec<usize>,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub params: ParamOverrides,
    /// Rounds tracked by de-tracking.
    pub t_max: usize,
}

impl ExperimentConfig {
    pub fn new(preset: Preset, k: usize, ns: Vec<usize>, alphas: Vec<f64>, trials: usize, seed: u64) -> Self {
        ExperimentConfig { preset, k, ns, alphas, trials, seed, params: ParamOverrides::default(), t_max: 5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.alphas.is_empty() {
            return Err(Error::InvalidParameters("empty n or alpha grid".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameters("trials must be at least 1".into()));
        }
        if self.k < 3 {
            return Err(Error::InvalidParameters(format!("k = {} is below 3", self.k)));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidParameters(format!("alpha {a} is not a nonnegative number")));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < self.k) {
            return Err(Error::InvalidParameters(format!("n = {n} is below k")));
        }
        Ok(())
    }

    /// Seed of trial `trial` at grid cell (`ni`, `ai`).
    pub fn trial_seed(&self, ni: usize, ai: usize, trial: usize) -> u64 {
        let index = (ni * self.alphas.len() + ai) * self.trials + trial;
        derive_seed(self.seed, index as u64)
    }
}

/// Number of checks for density α on n variables.
pub fn checks_for(n: usize, alpha: f64) -> usize {
    (alpha * n as f64).round() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Missing,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(x) => write!(f, "{x}"),
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Text(s) => write!(f, "{s}"),
            Cell::Missing => Ok(()),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value of `name` in row `r`.
    pub fn value(&self, r: usize, name: &str) -> Option<f64> {
        match self.rows.get(r)?.get(self.column(name)?)? {
            Cell::Int(x) => Some(*x as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    /// Schema line, a `#` metadata line, the header, then the rows.
    pub fn to_csv(&self, meta: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CSV_SCHEMA} table={}", self.name);
        if !meta.is_empty() {
            let _ = writeln!(out, "# {meta}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// One trial's measurements; `None` marks a value that does not apply.
type Metrics = Vec<(String, Option<f64>)>;

fn m(name: &str, x: impl Into<Option<f64>>) -> (String, Option<f64>) {
    (name.to_string(), x.into())
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub trials: Table,
    pub summary: Table,
}

impl ExperimentOutput {
    pub fn meta(&self) -> String {
        let ns: Vec<String> = self.config.ns.iter().map(usize::to_string).collect();
        let alphas: Vec<String> = self.config.alphas.iter().map(f64::to_string).collect();
        format!(
            "preset={} k={} n={} alpha={} trials={} seed={}",
            self.config.preset.name(),
            self.config.k,
            ns.join(";"),
            alphas.join(";"),
            self.config.trials,
            self.config.seed
        )
    }
}

/// Runs every trial of the grid in parallel; rows come out ordered by
/// (n, α, trial) whatever the completion order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for ni in 0..cfg.ns.len() {
        for ai in 0..cfg.alphas.len() {
            for t in 0..cfg.trials {
                jobs.push((ni, ai, t));
            }
        }
    }
    let results: Vec<Metrics> = jobs
        .par_iter()
        .map(|&(ni, ai, t)| run_trial(cfg, cfg.ns[ni], cfg.alphas[ai], cfg.trial_seed(ni, ai, t)))
        .collect::<Result<_>>()?;

    let names: Vec<String> = results.first().map(|r| r.iter().map(|(n, _)| n.clone()).collect()).unwrap_or_default();
    let mut columns: Vec<String> = ["n", "alpha", "trial", "seed", "m"].map(String::from).to_vec();
    columns.extend(names.iter().cloned());
    let mut trials = Table::new(format!("{}-trials", cfg.preset.name()), columns);
    for (&(ni, ai, t), metrics) in jobs.iter().zip(&results) {
        let (n, alpha) = (cfg.ns[ni], cfg.alphas[ai]);
        let mut row = vec![
            Cell::Int(n as u64),
            Cell::Float(alpha),
            Cell::Int(t as u64),
            Cell::Int(cfg.trial_seed(ni, ai, t)),
            Cell::Int(checks_for(n, alpha) as u64),
        ];
        row.extend(metrics.iter().map(|(_, x)| Cell::from(*x)));
        trials.rows.push(row);
    }

    let preds = |n: usize, alpha: f64| predictions(cfg, n, alpha);
    let pred_names: Vec<String> = preds(cfg.ns[0], cfg.alphas[0]).into_iter().map(|(n, _)| n).collect();
    let mut columns: Vec<String> = ["n", "alpha", "trials", "seed"].map(String::from).to_vec();
    for name in &names {
        columns.push(format!("mean_{name}"));
        columns.push(format!("se_{name}"));
    }
    for name in &pred_names {
        columns.push(format!("pred_{name}"));
        if names.contains(name) {
            columns.push(format!("absdiff_{name}"));
        }
    }
    let mut summary = Table::new(format!("{}-summary", cfg.preset.name()), columns);
    for ni in 0..cfg.ns.len() {
        for ai in 0..cfg.alphas.len() {
            let (n, alpha) = (cfg.ns[ni], cfg.alphas[ai]);
            let base = (ni * cfg.alphas.len() + ai) * cfg.trials;
            let cell = &results[base..base + cfg.trials];
            let mut row = vec![
                Cell::Int(n as u64),
                Cell::Float(alpha),
                Cell::Int(cfg.trials as u64),
                Cell::Int(cfg.seed),
            ];
            let mut means = Vec::new();
            for (j, _) in names.iter().enumerate() {
                let xs: Vec<f64> = cell.iter().filter_map(|r| r[j].1).collect();
                let (mean, se) = mean_se(&xs);
                means.push(mean);
                row.push(mean.into());
                row.push(se.into());
            }
            for (name, p) in preds(n, alpha) {
                row.push(p.into());
                if let Some(j) = names.iter().position(|x| *x == name) {
                    row.push(p.zip(means[j]).map(|(p, x)| (x - p).abs()).into());
                }
            }
            summary.rows.push(row);
        }
    }
    Ok(ExperimentOutput { config: cfg.clone(), trials, summary })
}

/// Mean and standard error; `None` when there are no samples.
pub fn mean_se(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() == 1 {
        return (Some(mean), Some(0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (Some(mean), Some((var / k).sqrt()))
}

fn run_trial(cfg: &ExperimentConfig, n: usize, alpha: f64, seed: u64) -> Result<Metrics> {
    let k = cfg.k;
    let g = generate_uniform(n, k, checks_for(n, alpha), seed)?;
    let nf = n as f64;
    Ok(match cfg.preset {
        Preset::ThresholdScan => {
            let tr = peel(&g);
            vec![
                m("peelable", flag(tr.is_peelable())),
                m("halting_time", tr.halting_time() as f64),
                m("core_vars_frac", tr.core_vars().len() as f64 / nf),
            ]
        }
        Preset::CoreSize => {
            let tr = peel(&g);
            vec![
                m("n_c", tr.core_vars().len() as f64 / nf),
                m("m_c", tr.core_checks().len() as f64 / nf),
                m("halting_time", tr.halting_time() as f64),
            ]
        }
        Preset::ClusterExponent => match cluster_partition(&g, &cfg.params.resolve(n)) {
            Ok(r) => vec![
                m("has_core", 1.0),
                m("core_dim", r.core_dim as f64),
                m("low_weight", r.low_weight.len() as f64),
                m("g_log2", r.g_log2 as f64),
                m("exponent", r.exponent),
            ],
            Err(Error::NoClusters(_)) => vec![
                m("has_core", 0.0),
                m("core_dim", 0.0),
                m("low_weight", 0.0),
                m("g_log2", 0.0),
                m("exponent", 0.0),
            ],
            Err(e) => return Err(e),
        },
        Preset::SparsityScan => match sparse_basis_no_core(&g) {
            Ok(b) => vec![
                m("peelable", 1.0),
                m("s", b.s as f64),
                m("dim", b.dim() as f64),
                m("s_over_cap", b.s as f64 / nf.log2().powi(4)),
            ],
            Err(Error::HasCore(_)) => {
                vec![m("peelable", 0.0), m("s", None), m("dim", None), m("s_over_cap", None)]
            }
            Err(e) => return Err(e),
        },
        Preset::DeTracking => {
            let tr = peel(&g);
            let mut out = Vec::new();
            for t in 1..=cfg.t_max {
                let r = residual_stats(&g, &tr, t);
                out.push(m(&format!("n1_t{t}"), r.n1));
                out.push(m(&format!("n2plus_t{t}"), r.n2plus));
                for l in 2..r.m.len() {
                    out.push(m(&format!("m{l}_t{t}"), r.m[l]));
                }
            }
            out
        }
        Preset::BpEquivalence => {
            let tr = peel(&g);
            let bp = bp_zero_fixed_point(&g);
            let same_split = decompose_from_bp(&g, &bp.final_state())? == decompose(&g)?;
            let (vr, cr) = peeling_rounds_from_bp(&g, &bp);
            let same_rounds = (0..n).all(|v| vr[v] == tr.var_round(v))
                && (0..g.num_checks()).all(|a| cr[a] == tr.check_round(a));
            vec![
                m("identical_decomposition", flag(same_split)),
                m("identical_rounds", flag(same_rounds)),
                m("bp_time", bp.convergence_time() as f64),
                m("halting_time", tr.halting_time() as f64),
            ]
        }
        Preset::MessageLaw => {
            let (check_tv, var_tv) = message_law_tv(&g, alpha, k);
            vec![m("check_tv", check_tv), m("var_tv", var_tv)]
        }
        Preset::PeripheryProfile => {
            let stats = match periphery_stats(&g) {
                Ok(x) => Some(x),
                Err(Error::Undefined(_)) => None,
                Err(e) => return Err(e),
            };
            let mut out = vec![m("alpha_p", stats.as_ref().map(|s| s.0))];
            for l in 2..=k {
                out.push(m(&format!("r{l}"), stats.as_ref().map(|s| s.1.get(l).copied().unwrap_or(0.0))));
            }
            let rate = stats.as_ref().map(|(a, r)| flag(de::peelability_rate(*a, r).is_some()));
            out.push(m("rate_present", rate));
            out
        }
        Preset::ClusterOracle => {
            let o = cluster_oracle_trial(&g, &cfg.params.resolve(n))?;
            let opt = |x: Option<usize>| x.map(|v| v as f64);
            vec![
                m("eligible", flag(o.eligible)),
                m("clusters", opt(o.clusters)),
                m("components", opt(o.components)),
                m("match", o.eligible.then(|| flag(o.clusters == o.components))),
                m("extension_ok", o.eligible.then(|| flag(o.extension_ok))),
                m("depth_raised", o.eligible.then(|| flag(o.depth_raised))),
                m("step", opt(o.step)),
                m("separation", opt(o.separation)),
            ]
        }
    })
}

fn predictions(cfg: &ExperimentConfig, n: usize, alpha: f64) -> Vec<(String, Option<f64>)> {
    let k = cfg.k;
    match cfg.preset {
        Preset::ThresholdScan => {
            let ad = de::alpha_d(k, 1e-9).ok();
            vec![m("alpha_d", ad), m("peelable", ad.map(|a| flag(alpha < a)))]
        }
        Preset::CoreSize => {
            let p = de::core_predictions(alpha, k);
            vec![m("n_c", p.n_c), m("m_c", p.m_c)]
        }
        Preset::ClusterExponent => vec![m("exponent", de::sigma_value(alpha, k))],
        Preset::SparsityScan => vec![m("log2n_pow4", (n as f64).log2().powi(4))],
        Preset::DeTracking => {
            let r = de::regular(k);
            let mut out = Vec::new();
            for t in 1..=cfg.t_max {
                let p = de::residual_predictions(alpha, &r, t);
                out.push(m(&format!("n1_t{t}"), p.n1));
                out.push(m(&format!("n2plus_t{t}"), p.n2plus));
                for l in 2..p.m.len() {
                    out.push(m(&format!("m{l}_t{t}"), p.m[l]));
                }
            }
            out
        }
        Preset::BpEquivalence | Preset::MessageLaw | Preset::ClusterOracle => Vec::new(),
        Preset::PeripheryProfile => {
            let prof = de::periphery_profile(alpha, k).ok();
            let mut out = vec![m("alpha_p", prof.as_ref().map(|p| p.0))];
            for l in 2..=k {
                out.push(m(&format!("r{l}"), prof.as_ref().map(|p| p.1.get(l).copied().unwrap_or(0.0))));
            }
            out.push(m("theta", de::theta(alpha, k)));
            out
        }
    }
}

/// Measured counterpart of the residual predictions: the graph left after
/// `t` peeling rounds, per variable.
pub fn residual_stats(g: &FactorGraph, tr: &crate::peel::PeelingTrace, t: usize) -> de::ResidualPrediction {
    let n = g.num_vars() as f64;
    let alive: Vec<bool> = (0..g.num_checks()).map(|a| tr.check_round(a) > t).collect();
    let mut mm = vec![0.0; g.max_check_degree() + 1];
    for a in (0..g.num_checks()).filter(|&a| alive[a]) {
        mm[g.check_degree(a)] += 1.0 / n;
    }
    let (mut n1, mut n2) = (0usize, 0usize);
    for v in (0..g.num_vars()).filter(|&v| tr.var_round(v) > t) {
        match g.var_edges(v).iter().filter(|&&e| alive[g.edge_check(e)]).count() {
            0 => {}
            1 => n1 += 1,
            _ => n2 += 1,
        }
    }
    de::ResidualPrediction { t, m: mm, n1: n1 as f64 / n, n2plus: n2 as f64 / n }
}

/// Total-variation distances of the empirical check and variable
/// signature laws at the BP₀ fixed point from their limiting laws.
pub fn message_law_tv(g: &FactorGraph, alpha: f64, k: usize) -> (f64, f64) {
    let fp = bp_zero_fixed_point(g);
    let stats = message_stats(g, &fp.final_state());
    let law = de::fp_message_distribution(alpha, k);
    let check_tv = 0.5 * (0..=k).map(|l0| (stats.check_fraction(l0, k - l0) - law.check_prob(l0)).abs()).sum::<f64>();
    let top = stats.vars.keys().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 40;
    let mut diff = 0.0;
    let mut covered = 0.0;
    for z in 0..=top {
        for s in 0..=top {
            let p = law.var_prob(z, s);
            covered += p;
            diff += (stats.var_fraction(z, s) - p).abs();
        }
    }
    (check_tv, 0.5 * (diff + (1.0 - covered).max(0.0)))
}

/// Measured periphery density (checks per variable) and degree profile.
pub fn periphery_stats(g: &FactorGraph) -> Result<(f64, Vec<f64>)> {
    let d = decompose(g)?;
    let p = d.periphery(g);
    let (np, mp) = (p.graph.num_vars(), p.graph.num_checks());
    if np == 0 || mp == 0 {
        return Err(Error::Undefined("empty periphery".into()));
    }
    let mut r = vec![0.0; p.graph.max_check_degree() + 1];
    for a in 0..mp {
        r[p.graph.check_degree(a)] += 1.0 / mp as f64;
    }
    Ok((mp as f64 / np as f64, r))
}

/// Outcome of comparing the cluster count with brute-force clustering on
/// one instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleOutcome {
    /// Has a core and a kernel small enough to enumerate.
    pub eligible: bool,
    pub clusters: Option<usize>,
    pub components: Option<usize>,
    pub extension_ok: bool,
    /// The default witness depth was too small and had to be raised.
    pub depth_raised: bool,
    pub step: Option<usize>,
    pub separation: Option<usize>,
    pub sparsity: Option<usize>,
}

pub fn cluster_oracle_trial(g: &FactorGraph, params: &ClusterParams) -> Result<OracleOutcome> {
    let d = decompose(g)?;
    let kernel_dim = g.num_vars() - rank(&g.to_bitmatrix());
    if !d.has_core() || kernel_dim > BRUTE_MAX_DIM {
        return Ok(OracleOutcome::default());
    }
    let report = cluster_partition(g, params)?;
    let mut depth_raised = false;
    let basis = match cluster_basis(g, &d, params) {
        Ok(b) => Some(b),
        Err(Error::WitnessNotFound { .. }) => {
            depth_raised = true;
            let deep = ClusterParams { witness_depth: g.num_edges() + 2, ..*params };
            match cluster_basis(g, &d, &deep) {
                Ok(b) => Some(b),
                Err(Error::WitnessNotFound { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };
    let step = params.brute_step.unwrap_or(basis.as_ref().map_or(1, |b| b.s.max(1)));
    let brute = brute_force_clusters(g, step)?;
    Ok(OracleOutcome {
        eligible: true,
        clusters: Some(1usize << report.log2_clusters),
        components: Some(brute.num_components),
        extension_ok: basis.is_some(),
        depth_raised,
        step: Some(step),
        separation: report.separation,
        sparsity: basis.map(|b| b.s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let cfg = ExperimentConfig::new(Preset::ThresholdScan, 3, vec![], vec![0.5], 1, 1);
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidParameters(_))));
        let cfg = ExperimentConfig::new(Preset::ThresholdScan, 3, vec![100], vec![0.5], 0, 1);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn rows_are_ordered_and_seeded() {
        let cfg = ExperimentConfig::new(Preset::ThresholdScan, 3, vec![200, 100], vec![0.5, 0.95], 3, 9);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.trials.rows.len(), 12);
        assert_eq!(out.summary.rows.len(), 4);
        assert_eq!(out.trials.value(0, "n"), Some(200.0));
        assert_eq!(out.trials.value(3, "alpha"), Some(0.95));
        assert_eq!(out.trials.value(4, "trial"), Some(1.0));
        let again = run_experiment(&cfg).unwrap();
        assert_eq!(out.trials.to_csv(&out.meta()), again.trials.to_csv(&again.meta()));
        assert!(out.summary.to_csv("").starts_with(CSV_SCHEMA));
        assert_eq!(out.summary.value(0, "mean_peelable"), Some(1.0));
    }

    #[test]
    fn mean_and_standard_error() {
        assert_eq!(mean_se(&[]), (None, None));
        let (m, s) = mean_se(&[1.0, 3.0]);
        assert_eq!(m, Some(2.0));
        assert!((s.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_preset_runs_small() {
        for p in Preset::ALL {
            let cfg = ExperimentConfig::new(p, 3, vec![60], vec![0.3, 0.95], 2, 3);
            let out = run_experiment(&cfg).unwrap();
            assert_eq!(out.trials.rows.len(), 4, "{}", p.name());
            assert!(out.trials.rows.iter().all(|r| r.len() == out.trials.columns.len()));
            assert!(out.summary.rows.iter().all(|r| r.len() == out.summary.columns.len()));
        }
    }
}
