use super::{ball, FactorGraph, Provenance};

/// Graph obtained by merging variables joined through degree-2 checks into
/// supernodes. Remaining checks keep an edge to a supernode only when they
/// meet it an odd number of times.
#[derive(Clone, Debug)]
pub struct CollapsedGraph {
    /// Supernodes as variables, surviving checks as checks.
    pub graph: FactorGraph,
    /// Supernode of each original variable.
    pub supernode_of: Vec<usize>,
    /// Sorted original variables of each supernode.
    pub members: Vec<Vec<usize>>,
    /// Original index of each surviving check.
    pub f_star: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Collapses every degree-2 check. Supernodes are numbered by their smallest
/// member. Checks of any other degree survive, including degree 1, so no
/// constraint is lost on hand-built inputs.
pub fn collapse(g: &FactorGraph) -> CollapsedGraph {
    let n = g.num_vars();
    let mut uf = UnionFind::new(n);
    for c in g.checks().filter(|c| c.len() == 2) {
        uf.union(c[0], c[1]);
    }
    let mut label = vec![usize::MAX; n];
    let mut supernode_of = vec![0; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if label[r] == usize::MAX {
            label[r] = members.len();
            members.push(Vec::new());
        }
        supernode_of[v] = label[r];
        members[label[r]].push(v);
    }
    let mut f_star = Vec::new();
    let mut lists = Vec::new();
    let mut odd = vec![false; members.len()];
    for (a, c) in g.checks().enumerate().filter(|(_, c)| c.len() != 2) {
        let mut touched = Vec::with_capacity(c.len());
        for &v in c {
            let s = supernode_of[v];
            if !odd[s] {
                touched.push(s);
            }
            odd[s] ^= true;
        }
        let list: Vec<usize> = touched.iter().copied().filter(|&s| odd[s]).collect();
        for s in touched {
            odd[s] = false;
        }
        f_star.push(a);
        lists.push(list);
    }
    let graph = FactorGraph::from_checks(members.len(), lists, Provenance::derived())
        .expect("supernode indices are in range");
    CollapsedGraph { graph, supernode_of, members, f_star }
}

impl CollapsedGraph {
    /// Number of original variables in supernode `s`.
    pub fn size(&self, s: usize) -> usize {
        self.members[s].len()
    }

    /// Total original-variable mass within distance `t` of supernode `s`.
    pub fn ball_mass(&self, s: usize, t: usize) -> usize {
        ball(&self.graph, s, t).into_iter().map(|w| self.size(w)).sum()
    }

    /// Expands a supernode support to the sorted original variables.
    pub fn lift(&self, supernodes: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> =
            supernodes.iter().flat_map(|&s| self.members[s].iter().copied()).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, checks: &[&[usize]]) -> FactorGraph {
        FactorGraph::from_checks(n, checks.iter().map(|c| c.to_vec()).collect(), Provenance::derived())
            .unwrap()
    }

    #[test]
    fn single_degree_two_check() {
        let g = graph(4, &[&[0, 1], &[0, 2, 3]]);
        let cg = collapse(&g);
        assert_eq!(cg.members, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(cg.f_star, vec![1]);
        assert_eq!(cg.graph.check(0), &[0, 1, 2]);
        assert_eq!(cg.lift(&[0, 2]), vec![0, 1, 3]);
    }

    #[test]
    fn even_overlap_drops_the_edge() {
        let g = graph(5, &[&[0, 1], &[1, 2], &[0, 2, 4]]);
        let cg = collapse(&g);
        assert_eq!(cg.members[0], vec![0, 1, 2]);
        let four = cg.supernode_of[4];
        assert_eq!(cg.graph.check(0), &[four]);
    }

    #[test]
    fn no_degree_two_checks_is_identity() {
        let g = graph(5, &[&[0, 1, 2], &[2, 3, 4]]);
        let cg = collapse(&g);
        assert_eq!(cg.graph.num_vars(), 5);
        assert_eq!(cg.graph.checks().collect::<Vec<_>>(), g.checks().collect::<Vec<_>>());
        assert!(cg.members.iter().all(|m| m.len() == 1));
    }

    #[test]
    fn mass_is_conserved() {
        let g = crate::graph::generate_degree_constrained(
            300,
            &crate::graph::DegreeProfile::from_fractions(&[0.0, 0.0, 0.5, 0.5], 200).unwrap(),
            4,
        )
        .unwrap();
        let cg = collapse(&g);
        let total: usize = (0..cg.graph.num_vars()).map(|s| cg.size(s)).sum();
        assert_eq!(total, 300);
        for v in 0..300 {
            assert!(cg.members[cg.supernode_of[v]].contains(&v));
        }
        // parity rule on every surviving check
        for (i, &a) in cg.f_star.iter().enumerate() {
            for s in 0..cg.graph.num_vars() {
                let hits = g.check(a).iter().filter(|&&v| cg.supernode_of[v] == s).count();
                assert_eq!(hits % 2 == 1, cg.graph.check(i).contains(&s));
            }
        }
        assert_eq!(cg.ball_mass(0, 0), cg.size(0));
    }
}
