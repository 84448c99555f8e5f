//! Synchronous peeling, the 2-core, backbone augmentation and the
//! core/backbone/periphery decomposition.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, Subgraph};

/// One peeling round: the variables of degree at most one, the checks they
/// touch, and those checks' edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub vars: Vec<usize>,
    pub checks: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Full history of synchronous peeling, with the peeled variables ordered
/// for back-substitution and split into dependent (U) and free (W) ones.
#[derive(Clone, Debug)]
pub struct PeelingTrace {
    n: usize,
    m: usize,
    rounds: Vec<Round>,
    var_round: Vec<usize>,
    check_round: Vec<usize>,
    core_vars: Vec<usize>,
    core_checks: Vec<usize>,
    var_order: Vec<usize>,
    check_order: Vec<usize>,
    dependent: Vec<usize>,
    free: Vec<usize>,
    factor: Vec<usize>,
}

/// Marks "never peeled" in per-node round tables.
pub const IN_CORE: usize = usize::MAX;

impl PeelingTrace {
    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.m
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Number of rounds until no variable of degree at most one remains.
    pub fn halting_time(&self) -> usize {
        self.rounds.len()
    }

    /// 1-based round in which `v` was removed, or [`IN_CORE`].
    pub fn var_round(&self, v: usize) -> usize {
        self.var_round[v]
    }

    pub fn check_round(&self, a: usize) -> usize {
        self.check_round[a]
    }

    pub fn core_vars(&self) -> &[usize] {
        &self.core_vars
    }

    pub fn core_checks(&self) -> &[usize] {
        &self.core_checks
    }

    pub fn is_peelable(&self) -> bool {
        self.core_checks.is_empty()
    }

    /// Peeled variables, round by round; inside a round degree-0 variables
    /// first, then degree-1 ones by the position of their check.
    pub fn var_order(&self) -> &[usize] {
        &self.var_order
    }

    /// Peeled checks, round by round, ascending inside a round.
    pub fn check_order(&self) -> &[usize] {
        &self.check_order
    }

    /// `dependent_vars()[i]` is the dependent variable of `check_order()[i]`.
    pub fn dependent_vars(&self) -> &[usize] {
        &self.dependent
    }

    /// Free variables in peeling order.
    pub fn free_vars(&self) -> &[usize] {
        &self.free
    }

    /// The check through which a degree-1 variable was peeled, if any.
    pub fn factor_of(&self, v: usize) -> Option<usize> {
        (self.factor[v] != usize::MAX).then_some(self.factor[v])
    }
}

/// Replays synchronous peeling to completion.
pub fn peel(g: &FactorGraph) -> PeelingTrace {
    let (n, m) = (g.num_vars(), g.num_checks());
    let mut degree: Vec<usize> = (0..n).map(|v| g.var_degree(v)).collect();
    let mut check_alive = vec![true; m];
    let mut var_round = vec![IN_CORE; n];
    let mut check_round = vec![IN_CORE; m];
    let mut factor = vec![usize::MAX; n];
    let mut rounds = Vec::new();
    let mut var_order = Vec::new();
    let mut check_order = Vec::new();
    let mut dependent = Vec::new();
    let mut free = Vec::new();

    let mut queued = vec![false; n];
    let mut candidates: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    for &v in &candidates {
        queued[v] = true;
    }
    while !candidates.is_empty() {
        let t = rounds.len() + 1;
        candidates.sort_unstable();
        let vars = std::mem::take(&mut candidates);
        let mut checks = Vec::new();
        for &v in &vars {
            var_round[v] = t;
            if degree[v] == 1 {
                let e = *g
                    .var_edges(v)
                    .iter()
                    .find(|&&e| check_alive[g.edge_check(e)])
                    .expect("degree-1 variable has a live check");
                factor[v] = g.edge_check(e);
                checks.push(factor[v]);
            }
        }
        checks.sort_unstable();
        checks.dedup();
        let base = check_order.len();
        let mut edges = Vec::new();
        for &a in &checks {
            check_alive[a] = false;
            check_round[a] = t;
            for e in g.check_edges(a) {
                edges.push(e);
                let u = g.edge_var(e);
                degree[u] -= 1;
                if degree[u] <= 1 && var_round[u] == IN_CORE && !queued[u] {
                    queued[u] = true;
                    candidates.push(u);
                }
            }
        }
        // ordering and U/W split for this round
        let pos = |a: usize| base + checks.binary_search(&a).expect("factor peeled this round");
        let mut zero: Vec<usize> = vars.iter().copied().filter(|&v| factor[v] == usize::MAX).collect();
        let mut one: Vec<usize> = vars.iter().copied().filter(|&v| factor[v] != usize::MAX).collect();
        zero.sort_unstable();
        one.sort_by_key(|&v| (pos(factor[v]), v));
        free.extend(&zero);
        var_order.extend(&zero);
        let mut prev = usize::MAX;
        for &v in &one {
            if factor[v] == prev {
                free.push(v);
            } else {
                dependent.push(v);
                prev = factor[v];
            }
        }
        var_order.extend(&one);
        check_order.extend(&checks);
        rounds.push(Round { vars, checks, edges });
    }
    let core_vars = (0..n).filter(|&v| var_round[v] == IN_CORE).collect();
    let core_checks = (0..m).filter(|&a| check_alive[a]).collect();
    PeelingTrace {
        n,
        m,
        rounds,
        var_round,
        check_round,
        core_vars,
        core_checks,
        var_order,
        check_order,
        dependent,
        free,
        factor,
    }
}

pub fn is_peelable(g: &FactorGraph) -> bool {
    peel(g).is_peelable()
}

/// The maximal stopping set, as a check-induced subgraph.
pub fn two_core(g: &FactorGraph) -> Subgraph {
    g.induced_by_checks(peel(g).core_checks())
}

/// Grows `init` (sorted checks) by repeatedly absorbing any check with at
/// most one variable outside the current subgraph. Returns sorted checks and
/// variables of the fixpoint.
pub fn backbone_augment(g: &FactorGraph, init: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (n, m) = (g.num_vars(), g.num_checks());
    let mut in_checks = vec![false; m];
    let mut in_vars = vec![false; n];
    for &a in init {
        in_checks[a] = true;
        for &v in g.check(a) {
            in_vars[v] = true;
        }
    }
    let mut outside: Vec<usize> = (0..m)
        .map(|a| g.check(a).iter().filter(|&&v| !in_vars[v]).count())
        .collect();
    let mut queue: VecDeque<usize> = (0..m).filter(|&a| !in_checks[a] && outside[a] <= 1).collect();
    while let Some(a) = queue.pop_front() {
        if in_checks[a] {
            continue;
        }
        in_checks[a] = true;
        for &v in g.check(a) {
            if in_vars[v] {
                continue;
            }
            in_vars[v] = true;
            for &e in g.var_edges(v) {
                let b = g.edge_check(e);
                outside[b] -= 1;
                if !in_checks[b] && outside[b] <= 1 {
                    queue.push_back(b);
                }
            }
        }
    }
    (
        (0..m).filter(|&a| in_checks[a]).collect(),
        (0..n).filter(|&v| in_vars[v]).collect(),
    )
}

/// Which part of the decomposition a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Core,
    Backbone,
    Periphery,
}

/// Nested node sets: core inside backbone, periphery the complement of the
/// backbone. All lists sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub core_checks: Vec<usize>,
    pub core_vars: Vec<usize>,
    pub backbone_checks: Vec<usize>,
    pub backbone_vars: Vec<usize>,
    pub periphery_checks: Vec<usize>,
    pub periphery_vars: Vec<usize>,
}

impl Decomposition {
    /// Builds the decomposition from per-node labels.
    pub fn from_labels(var_part: &[Part], check_part: &[Part]) -> Self {
        let pick = |labels: &[Part], want: &[Part]| -> Vec<usize> {
            (0..labels.len()).filter(|&i| want.contains(&labels[i])).collect()
        };
        Decomposition {
            core_checks: pick(check_part, &[Part::Core]),
            core_vars: pick(var_part, &[Part::Core]),
            backbone_checks: pick(check_part, &[Part::Core, Part::Backbone]),
            backbone_vars: pick(var_part, &[Part::Core, Part::Backbone]),
            periphery_checks: pick(check_part, &[Part::Periphery]),
            periphery_vars: pick(var_part, &[Part::Periphery]),
        }
    }

    pub fn var_labels(&self, n: usize) -> Vec<Part> {
        let mut out = vec![Part::Periphery; n];
        for &v in &self.backbone_vars {
            out[v] = Part::Backbone;
        }
        for &v in &self.core_vars {
            out[v] = Part::Core;
        }
        out
    }

    pub fn check_labels(&self, m: usize) -> Vec<Part> {
        let mut out = vec![Part::Periphery; m];
        for &a in &self.backbone_checks {
            out[a] = Part::Backbone;
        }
        for &a in &self.core_checks {
            out[a] = Part::Core;
        }
        out
    }

    pub fn has_core(&self) -> bool {
        !self.core_checks.is_empty()
    }

    pub fn core(&self, g: &FactorGraph) -> Subgraph {
        g.restrict(&self.core_checks, &self.core_vars)
    }

    pub fn periphery(&self, g: &FactorGraph) -> Subgraph {
        g.restrict(&self.periphery_checks, &self.periphery_vars)
    }
}

/// Core by peeling, backbone by augmentation from the core, periphery as the
/// complement. Checks that the periphery is peelable and that each periphery
/// check keeps at least two periphery variables.
pub fn decompose(g: &FactorGraph) -> Result<Decomposition> {
    let trace = peel(g);
    let (backbone_checks, backbone_vars) = backbone_augment(g, trace.core_checks());
    let mut in_backbone_check = vec![false; g.num_checks()];
    for &a in &backbone_checks {
        in_backbone_check[a] = true;
    }
    let mut in_backbone_var = vec![false; g.num_vars()];
    for &v in &backbone_vars {
        in_backbone_var[v] = true;
    }
    let d = Decomposition {
        core_checks: trace.core_checks().to_vec(),
        core_vars: trace.core_vars().to_vec(),
        periphery_checks: (0..g.num_checks()).filter(|&a| !in_backbone_check[a]).collect(),
        periphery_vars: (0..g.num_vars()).filter(|&v| !in_backbone_var[v]).collect(),
        backbone_checks,
        backbone_vars,
    };
    for &a in &d.periphery_checks {
        let inside = g.check(a).iter().filter(|&&v| !in_backbone_var[v]).count();
        if inside < 2 {
            return Err(Error::InvariantViolation(format!(
                "periphery check {a} has {inside} periphery variables"
            )));
        }
    }
    if !is_peelable(&d.periphery(g).graph) {
        return Err(Error::InvariantViolation("periphery is not peelable".into()));
    }
    Ok(d)
}
