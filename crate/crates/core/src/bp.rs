//! {0,★} message passing. A variable tells a check ★ when every other check
//! around it already says ★; a check tells a variable 0 when every other
//! variable around it still says 0. Both directions are synchronous.
//!
//! Runs are monotone, so each message changes at most once and a run is
//! stored as one change time per directed edge.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::peel::{Decomposition, Part, IN_CORE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Msg {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "*")]
    Star,
}

/// How a run is initialised.
#[derive(Clone, Copy, Debug)]
pub enum Init<'a> {
    /// Every message starts at 0.
    Zero,
    /// Every message starts at ★ except around the core: messages inside the
    /// core and from core variables stay 0, messages from outside checks into
    /// core variables stay ★. Lists are sorted.
    StarOffCore { core_vars: &'a [usize], core_checks: &'a [usize] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitTag {
    Zero,
    StarOffCore,
}

/// Change iteration meaning "never changed".
pub const NEVER: u32 = u32::MAX;

/// Compressed record of a run: initial values, pins and change times.
#[derive(Clone, Debug)]
pub struct BpTrace {
    tag: InitTag,
    nu_init: Vec<Msg>,
    nu_hat_init: Vec<Msg>,
    pinned: Vec<bool>,
    nu_change: Vec<u32>,
    nu_hat_change: Vec<u32>,
    last_change: usize,
    converged: bool,
    iterations: usize,
}

/// Messages on every directed edge at iteration `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageState {
    pub nu: Vec<Msg>,
    pub nu_hat: Vec<Msg>,
    pub t: usize,
    pub tag: InitTag,
}

fn value_at(init: Msg, change: u32, t: usize) -> Msg {
    if (change as usize) <= t {
        flip(init)
    } else {
        init
    }
}

fn flip(m: Msg) -> Msg {
    match m {
        Msg::Zero => Msg::Star,
        Msg::Star => Msg::Zero,
    }
}

impl BpTrace {
    pub fn tag(&self) -> InitTag {
        self.tag
    }

    /// Last iteration in which any message changed (0 if none did).
    pub fn convergence_time(&self) -> usize {
        self.last_change
    }

    /// True when the run stopped because nothing changed.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Iterations executed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn nu(&self, e: usize, t: usize) -> Msg {
        value_at(self.nu_init[e], self.nu_change[e], t)
    }

    pub fn nu_hat(&self, e: usize, t: usize) -> Msg {
        value_at(self.nu_hat_init[e], self.nu_hat_change[e], t)
    }

    /// Iteration at which variable-to-check message `e` changed.
    pub fn nu_change(&self, e: usize) -> Option<usize> {
        (self.nu_change[e] != NEVER).then_some(self.nu_change[e] as usize)
    }

    pub fn nu_hat_change(&self, e: usize) -> Option<usize> {
        (self.nu_hat_change[e] != NEVER).then_some(self.nu_hat_change[e] as usize)
    }

    pub fn state_at(&self, t: usize) -> MessageState {
        let edges = self.nu_init.len();
        MessageState {
            nu: (0..edges).map(|e| self.nu(e, t)).collect(),
            nu_hat: (0..edges).map(|e| self.nu_hat(e, t)).collect(),
            t,
            tag: self.tag,
        }
    }

    /// State after the last change; only meaningful when `converged()`.
    pub fn final_state(&self) -> MessageState {
        self.state_at(self.last_change)
    }

    pub fn is_pinned(&self, e: usize) -> bool {
        self.pinned[e]
    }
}

/// Runs at most `t_max` synchronous iterations, stopping early at a fixed
/// point. A fixed point is always reached within |E| + 1 iterations.
pub fn bp_run(g: &FactorGraph, init: Init<'_>, t_max: usize) -> BpTrace {
    let (n, m, edges) = (g.num_vars(), g.num_checks(), g.num_edges());
    let mut nu = vec![Msg::Zero; edges];
    let mut nu_hat = vec![Msg::Zero; edges];
    let mut pinned = vec![false; edges];
    let tag = match init {
        Init::Zero => InitTag::Zero,
        Init::StarOffCore { core_vars, core_checks } => {
            let mut core_var = vec![false; n];
            for &v in core_vars {
                core_var[v] = true;
            }
            let mut core_check = vec![false; m];
            for &a in core_checks {
                core_check[a] = true;
            }
            for e in 0..edges {
                let (v, a) = (g.edge_var(e), g.edge_check(e));
                if core_check[a] {
                    pinned[e] = true;
                } else if core_var[v] {
                    pinned[e] = true;
                    nu_hat[e] = Msg::Star;
                } else {
                    nu[e] = Msg::Star;
                    nu_hat[e] = Msg::Star;
                }
            }
            InitTag::StarOffCore
        }
    };
    let nu_init = nu.clone();
    let nu_hat_init = nu_hat.clone();
    let mut zeros_in: Vec<usize> = (0..n)
        .map(|v| g.var_edges(v).iter().filter(|&&e| nu_hat[e] == Msg::Zero).count())
        .collect();
    let mut stars_in: Vec<usize> = (0..m)
        .map(|a| g.check_edges(a).filter(|&e| nu[e] == Msg::Star).count())
        .collect();
    let mut nu_change = vec![NEVER; edges];
    let mut nu_hat_change = vec![NEVER; edges];

    let mut var_mark = vec![true; n];
    let mut check_mark = vec![true; m];
    let mut var_queue: Vec<usize> = (0..n).collect();
    let mut check_queue: Vec<usize> = (0..m).collect();
    let mut last_change = 0;
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=t_max {
        iterations = t;
        let mut changed = false;
        // variable-to-check messages from the previous check-to-variable ones
        for v in std::mem::take(&mut var_queue) {
            var_mark[v] = false;
            for &e in g.var_edges(v) {
                if pinned[e] {
                    continue;
                }
                let others = zeros_in[v] - usize::from(nu_hat[e] == Msg::Zero);
                let want = if others > 0 { Msg::Zero } else { Msg::Star };
                if want != nu[e] {
                    debug_assert_eq!(nu_change[e], NEVER, "message changed twice");
                    nu[e] = want;
                    nu_change[e] = t as u32;
                    changed = true;
                    let a = g.edge_check(e);
                    if want == Msg::Star {
                        stars_in[a] += 1;
                    } else {
                        stars_in[a] -= 1;
                    }
                    if !check_mark[a] {
                        check_mark[a] = true;
                        check_queue.push(a);
                    }
                }
            }
        }
        // check-to-variable messages from the fresh variable-to-check ones
        for a in std::mem::take(&mut check_queue) {
            check_mark[a] = false;
            for e in g.check_edges(a) {
                if pinned[e] {
                    continue;
                }
                let others = stars_in[a] - usize::from(nu[e] == Msg::Star);
                let want = if others == 0 { Msg::Zero } else { Msg::Star };
                if want != nu_hat[e] {
                    debug_assert_eq!(nu_hat_change[e], NEVER, "message changed twice");
                    nu_hat[e] = want;
                    nu_hat_change[e] = t as u32;
                    changed = true;
                    let v = g.edge_var(e);
                    if want == Msg::Zero {
                        zeros_in[v] += 1;
                    } else {
                        zeros_in[v] -= 1;
                    }
                    if !var_mark[v] {
                        var_mark[v] = true;
                        var_queue.push(v);
                    }
                }
            }
        }
        if !changed {
            converged = true;
            break;
        }
        last_change = t;
    }
    BpTrace {
        tag,
        nu_init,
        nu_hat_init,
        pinned,
        nu_change,
        nu_hat_change,
        last_change,
        converged,
        iterations,
    }
}

/// BP₀ run to its fixed point.
pub fn bp_zero_fixed_point(g: &FactorGraph) -> BpTrace {
    bp_run(g, Init::Zero, g.num_edges() + 2)
}

/// One synchronous update applied to `state`, ignoring pins.
fn step(g: &FactorGraph, state: &MessageState) -> MessageState {
    let edges = g.num_edges();
    let mut nu = vec![Msg::Zero; edges];
    for v in 0..g.num_vars() {
        let zeros = g.var_edges(v).iter().filter(|&&e| state.nu_hat[e] == Msg::Zero).count();
        for &e in g.var_edges(v) {
            let others = zeros - usize::from(state.nu_hat[e] == Msg::Zero);
            nu[e] = if others > 0 { Msg::Zero } else { Msg::Star };
        }
    }
    let mut nu_hat = vec![Msg::Zero; edges];
    for a in 0..g.num_checks() {
        let stars = g.check_edges(a).filter(|&e| nu[e] == Msg::Star).count();
        for e in g.check_edges(a) {
            let others = stars - usize::from(nu[e] == Msg::Star);
            nu_hat[e] = if others == 0 { Msg::Zero } else { Msg::Star };
        }
    }
    MessageState { nu, nu_hat, t: state.t + 1, tag: state.tag }
}

/// Reads the core/backbone/periphery split off a BP₀ fixed point: variables
/// by incoming zeros (2+, 1, 0), checks by incoming stars (0, 1, 2+).
pub fn decompose_from_bp(g: &FactorGraph, fp: &MessageState) -> Result<Decomposition> {
    if fp.tag != InitTag::Zero {
        return Err(Error::InvalidParameters("classification needs an all-zero start".into()));
    }
    let next = step(g, fp);
    if next.nu != fp.nu || next.nu_hat != fp.nu_hat {
        return Err(Error::NotConverged);
    }
    let var_part: Vec<Part> = (0..g.num_vars())
        .map(|v| match g.var_edges(v).iter().filter(|&&e| fp.nu_hat[e] == Msg::Zero).count() {
            0 => Part::Periphery,
            1 => Part::Backbone,
            _ => Part::Core,
        })
        .collect();
    let check_part: Vec<Part> = (0..g.num_checks())
        .map(|a| match g.check_edges(a).filter(|&e| fp.nu[e] == Msg::Star).count() {
            0 => Part::Core,
            1 => Part::Backbone,
            _ => Part::Periphery,
        })
        .collect();
    Ok(Decomposition::from_labels(&var_part, &check_part))
}

/// Node counts by incoming-message signature `(#0, #★)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MessageStats {
    pub t: usize,
    pub checks: BTreeMap<(usize, usize), usize>,
    pub vars: BTreeMap<(usize, usize), usize>,
}

impl MessageStats {
    pub fn check_fraction(&self, l0: usize, lstar: usize) -> f64 {
        let total: usize = self.checks.values().sum();
        self.checks.get(&(l0, lstar)).copied().unwrap_or(0) as f64 / total.max(1) as f64
    }

    pub fn var_fraction(&self, l0: usize, lstar: usize) -> f64 {
        let total: usize = self.vars.values().sum();
        self.vars.get(&(l0, lstar)).copied().unwrap_or(0) as f64 / total.max(1) as f64
    }
}

pub fn message_stats(g: &FactorGraph, state: &MessageState) -> MessageStats {
    let mut checks = BTreeMap::new();
    for a in 0..g.num_checks() {
        let stars = g.check_edges(a).filter(|&e| state.nu[e] == Msg::Star).count();
        *checks.entry((g.check_degree(a) - stars, stars)).or_insert(0) += 1;
    }
    let mut vars = BTreeMap::new();
    for v in 0..g.num_vars() {
        let zeros = g.var_edges(v).iter().filter(|&&e| state.nu_hat[e] == Msg::Zero).count();
        *vars.entry((zeros, g.var_degree(v) - zeros)).or_insert(0) += 1;
    }
    MessageStats { t: state.t, checks, vars }
}

/// Fraction of the 2|E| directed messages whose final value differs from
/// their value at iteration `t`.
pub fn changes_after(trace: &BpTrace, t: usize) -> f64 {
    let total = 2 * trace.nu_change.len();
    if total == 0 {
        return 0.0;
    }
    let late = trace
        .nu_change
        .iter()
        .chain(&trace.nu_hat_change)
        .filter(|&&c| c != NEVER && c as usize > t)
        .count();
    late as f64 / total as f64
}

/// Peeling rounds predicted by a BP₀ run: a variable leaves in round t + 1
/// when iteration t is the first with at most one incoming 0; a check leaves
/// in the first iteration it receives a ★. Unpeeled nodes get [`IN_CORE`].
pub fn peeling_rounds_from_bp(g: &FactorGraph, trace: &BpTrace) -> (Vec<usize>, Vec<usize>) {
    let var_rounds = (0..g.num_vars())
        .map(|v| {
            let mut times: Vec<u32> = g.var_edges(v).iter().map(|&e| trace.nu_hat_change[e]).collect();
            times.sort_unstable();
            if times.len() <= 1 {
                return 1;
            }
            match times[times.len() - 2] {
                NEVER => IN_CORE,
                t => t as usize + 1,
            }
        })
        .collect();
    let check_rounds = (0..g.num_checks())
        .map(|a| match g.check_edges(a).map(|e| trace.nu_change[e]).min() {
            None | Some(NEVER) => IN_CORE,
            Some(t) => t as usize,
        })
        .collect();
    (var_rounds, check_rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_uniform, Provenance};
    use crate::peel::{decompose, peel};

    fn graph(n: usize, checks: &[&[usize]]) -> FactorGraph {
        FactorGraph::from_checks(n, checks.iter().map(|c| c.to_vec()).collect(), Provenance::derived())
            .unwrap()
    }

    #[test]
    fn single_check_goes_all_star() {
        let g = graph(3, &[&[0, 1, 2]]);
        let tr = bp_zero_fixed_point(&g);
        let s1 = tr.state_at(1);
        assert!(s1.nu.iter().all(|&m| m == Msg::Star));
        assert!(s1.nu_hat.iter().all(|&m| m == Msg::Star));
        assert_eq!(tr.convergence_time(), 1);
        assert!(tr.converged());
        let fp = tr.final_state();
        let st = message_stats(&g, &fp);
        // degree-1 variables all see one incoming star
        assert_eq!(st.var_fraction(0, 1), 1.0);
        let d = decompose_from_bp(&g, &fp).unwrap();
        assert!(!d.has_core() && d.periphery_checks == vec![0]);
    }

    #[test]
    fn parallel_checks_stay_zero() {
        let g = graph(3, &[&[0, 1, 2], &[0, 1, 2]]);
        let tr = bp_zero_fixed_point(&g);
        assert_eq!(tr.convergence_time(), 0);
        let fp = tr.final_state();
        assert!(fp.nu.iter().chain(&fp.nu_hat).all(|&m| m == Msg::Zero));
        let d = decompose_from_bp(&g, &fp).unwrap();
        assert_eq!(d.core_checks, vec![0, 1]);
        assert_eq!(d.core_vars, vec![0, 1, 2]);
        for t in 0..5 {
            assert_eq!(changes_after(&tr, t), 0.0);
        }
    }

    #[test]
    fn initial_stats_are_all_zero() {
        let g = generate_uniform(100, 3, 80, 1).unwrap();
        let tr = bp_zero_fixed_point(&g);
        let st = message_stats(&g, &tr.state_at(0));
        assert_eq!(st.check_fraction(3, 0), 1.0);
    }

    #[test]
    fn star_run_on_peelable_graph_is_trivial() {
        let g = generate_uniform(200, 3, 100, 4).unwrap();
        let tr = bp_run(&g, Init::StarOffCore { core_vars: &[], core_checks: &[] }, 100);
        for t in 0..5 {
            let s = tr.state_at(t);
            assert!(s.nu.iter().chain(&s.nu_hat).all(|&m| m == Msg::Star));
        }
    }

    #[test]
    fn non_fixed_point_is_rejected() {
        let g = graph(3, &[&[0, 1, 2]]);
        let tr = bp_zero_fixed_point(&g);
        assert!(matches!(decompose_from_bp(&g, &tr.state_at(0)), Err(Error::NotConverged)));
    }

    #[test]
    fn bp_matches_peeling_on_random_graphs() {
        for seed in 0..60 {
            let alpha = [0.5, 0.8, 0.85, 0.9, 1.0][seed as usize % 5];
            let n = 150;
            let g = generate_uniform(n, 3, (alpha * n as f64) as usize, seed).unwrap();
            let tr = bp_zero_fixed_point(&g);
            assert!(tr.converged());
            assert!(tr.convergence_time() <= g.num_edges());
            let fp = tr.final_state();
            assert_eq!(decompose_from_bp(&g, &fp).unwrap(), decompose(&g).unwrap());
            let p = peel(&g);
            let (vr, cr) = peeling_rounds_from_bp(&g, &tr);
            assert_eq!(vr, (0..n).map(|v| p.var_round(v)).collect::<Vec<_>>());
            assert_eq!(cr, (0..g.num_checks()).map(|a| p.check_round(a)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn zero_run_is_monotone() {
        let g = generate_uniform(300, 3, 260, 8).unwrap();
        let tr = bp_zero_fixed_point(&g);
        for t in 0..tr.convergence_time() {
            let (a, b) = (tr.state_at(t), tr.state_at(t + 1));
            for e in 0..g.num_edges() {
                assert!(!(a.nu[e] == Msg::Star && b.nu[e] == Msg::Zero));
                assert!(!(a.nu_hat[e] == Msg::Star && b.nu_hat[e] == Msg::Zero));
            }
            // every stored state is one synchronous step from the previous one
            if t >= 1 {
                let s = step(&g, &a);
                assert_eq!(s.nu, b.nu);
                assert_eq!(s.nu_hat, b.nu_hat);
            }
        }
    }
}
