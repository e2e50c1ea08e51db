//! Dependency graphs over an edge predicate, strongly connected components,
//! and validation of certificate-supplied decompositions.

use std::fmt;

use thiserror::Error;

use crate::term::Rule;

/// An ordered list of components, each a list of pairs.
pub type Decomposition = Vec<Vec<Rule>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("pair {0} is not covered by the decomposition")]
    MissingPair(Rule),
    #[error("pair {0} in the decomposition is not a dependency pair of the problem")]
    ExtraPair(Rule),
    #[error("edge from {from_rule} (component {from}) to {to_rule} (later component {to})")]
    ForwardEdge {
        from: usize,
        to: usize,
        from_rule: Box<Rule>,
        to_rule: Box<Rule>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpGraph {
    nodes: Vec<Rule>,
    adjacency: Vec<Vec<bool>>,
}

pub fn build_graph(approx: impl Fn(&Rule, &Rule) -> bool, nodes: &[Rule]) -> DpGraph {
    let adjacency = nodes
        .iter()
        .map(|a| nodes.iter().map(|b| approx(a, b)).collect())
        .collect();
    DpGraph {
        nodes: nodes.to_vec(),
        adjacency,
    }
}

impl DpGraph {
    /// Graph on `n` anonymous nodes, used for tests over plain digraphs.
    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Self {
        DpGraph {
            nodes: Vec::new(),
            adjacency,
        }
    }

    pub fn nodes(&self) -> &[Rule] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &e)| e)
                .map(move |(j, _)| (i, j))
        })
    }

    /// Strongly connected components in reverse topological order: if an
    /// edge leads from component A to a different component B, B comes
    /// first. Roots are tried in index order, successors in index order.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        struct Tarjan<'g> {
            g: &'g DpGraph,
            counter: usize,
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            stack: Vec<usize>,
            on_stack: Vec<bool>,
            out: Vec<Vec<usize>>,
        }

        impl Tarjan<'_> {
            fn visit(&mut self, v: usize) {
                self.index[v] = Some(self.counter);
                self.low[v] = self.counter;
                self.counter += 1;
                self.stack.push(v);
                self.on_stack[v] = true;
                for w in 0..self.g.len() {
                    if !self.g.has_edge(v, w) {
                        continue;
                    }
                    match self.index[w] {
                        None => {
                            self.visit(w);
                            self.low[v] = self.low[v].min(self.low[w]);
                        }
                        Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                        Some(_) => {}
                    }
                }
                if Some(self.low[v]) == self.index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = self.stack.pop().expect("v is on the stack");
                        self.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    self.out.push(comp);
                }
            }
        }

        let n = self.len();
        let mut t = Tarjan {
            g: self,
            counter: 0,
            index: vec![None; n],
            low: vec![0; n],
            stack: Vec::new(),
            on_stack: vec![false; n],
            out: Vec::new(),
        };
        for v in 0..n {
            if t.index[v].is_none() {
                t.visit(v);
            }
        }
        t.out
    }

    /// No cycle at all, self-loops included.
    pub fn is_acyclic(&self) -> bool {
        self.sccs()
            .iter()
            .all(|c| c.len() == 1 && !self.has_edge(c[0], c[0]))
    }
}

impl fmt::Display for DpGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rule) in self.nodes.iter().enumerate() {
            writeln!(f, "{i}: {rule}")?;
        }
        for (i, row) in self.adjacency.iter().enumerate() {
            let succ: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, &e)| e)
                .map(|(j, _)| j.to_string())
                .collect();
            writeln!(f, "{i} -> [{}]", succ.join(", "))?;
        }
        Ok(())
    }
}

/// First edge from a component to a later one, if any.
fn first_forward_edge(
    approx: &impl Fn(&Rule, &Rule) -> bool,
    cs: &[Vec<Rule>],
) -> Option<DecompError> {
    for (i, ci) in cs.iter().enumerate() {
        for (j, cj) in cs.iter().enumerate().skip(i + 1) {
            for b in ci {
                for c in cj {
                    if approx(b, c) {
                        return Some(DecompError::ForwardEdge {
                            from: i,
                            to: j,
                            from_rule: Box::new(b.clone()),
                            to_rule: Box::new(c.clone()),
                        });
                    }
                }
            }
        }
    }
    None
}

/// No approximation edge leads from a component into a later one.
pub fn valid_decomp(approx: impl Fn(&Rule, &Rule) -> bool, cs: &[Vec<Rule>]) -> bool {
    // Each component against all later ones, recursing on the tail first.
    fn go(approx: &dyn Fn(&Rule, &Rule) -> bool, cs: &[Vec<Rule>]) -> bool {
        match cs.split_first() {
            None => true,
            Some((ci, rest)) => {
                go(approx, rest)
                    && ci
                        .iter()
                        .all(|b| rest.iter().all(|cj| cj.iter().all(|c| !approx(b, c))))
            }
        }
    }
    go(&approx, cs)
}

/// The approximation graph restricted to `component` has no cycle.
pub fn co_scc(approx: impl Fn(&Rule, &Rule) -> bool, component: &[Rule]) -> bool {
    build_graph(approx, component).is_acyclic()
}

/// The flattened decomposition equals `pairs` as a multiset (compared up to
/// variable renaming) and has no forward edge.
pub fn check_decomposition(
    approx: impl Fn(&Rule, &Rule) -> bool,
    pairs: &[Rule],
    cs: &[Vec<Rule>],
) -> Result<(), DecompError> {
    let mut remaining: Vec<(Rule, &Rule)> = pairs.iter().map(|p| (p.canonical(), p)).collect();
    for rule in cs.iter().flatten() {
        let key = rule.canonical();
        match remaining.iter().position(|(c, _)| *c == key) {
            Some(i) => {
                remaining.swap_remove(i);
            }
            None => return Err(DecompError::ExtraPair(rule.clone())),
        }
    }
    if let Some((_, missing)) = pairs
        .iter()
        .map(|p| (p.canonical(), p))
        .find(|(c, _)| remaining.iter().any(|(r, _)| r == c))
    {
        return Err(DecompError::MissingPair(missing.clone()));
    }
    match first_forward_edge(&approx, cs) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;
    use crate::unify::{hde_edge, Approx};
    use proptest::prelude::*;

    fn hde_graph() -> DpGraph {
        build_graph(hde_edge, &r8_pairs())
    }

    #[test]
    fn hde_graph_of_quot() {
        let g = hde_graph();
        assert_eq!(g.len(), 3);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 0), (1, 0), (2, 1), (2, 2)]);
        assert!(build_graph(hde_edge, &[]).is_empty());
        let none = build_graph(|_, _| false, &r8_pairs());
        assert_eq!(none.edges().count(), 0);
    }

    #[test]
    fn unif_graph_of_quot_matches_hde() {
        let r = r8();
        let g = build_graph(Approx::Unif.edge(&r), &r8_pairs());
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            hde_graph().edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn scc_examples() {
        assert_eq!(hde_graph().sccs(), vec![vec![0], vec![1], vec![2]]);
        assert!(DpGraph::from_adjacency(vec![]).sccs().is_empty());
        let two = DpGraph::from_adjacency(vec![vec![false, true], vec![true, false]]);
        assert_eq!(two.sccs(), vec![vec![0, 1]]);
    }

    #[test]
    fn decomposition_validity() {
        let [a, b, c] = r8_pairs();
        let cs = vec![vec![a.clone()], vec![b.clone()], vec![c.clone()]];
        assert!(valid_decomp(hde_edge, &cs));
        let rev: Vec<_> = cs.iter().rev().cloned().collect();
        assert!(!valid_decomp(hde_edge, &rev));
        assert!(valid_decomp(|_, _| true, &[vec![a, b, c]]));
    }

    #[test]
    fn acyclic_components() {
        let [a, b, _] = r8_pairs();
        assert!(co_scc(hde_edge, &[b]));
        assert!(!co_scc(hde_edge, &[a]));
        assert!(co_scc(|_, _| true, &[]));
    }

    #[test]
    fn checked_decompositions() {
        let pairs = r8_pairs();
        let [a, b, c] = pairs.clone();
        let cs = vec![vec![a.clone()], vec![b.clone()], vec![c.clone()]];
        assert_eq!(check_decomposition(hde_edge, &pairs, &cs), Ok(()));
        let dropped = vec![vec![], vec![b.clone()], vec![c.clone()]];
        assert_eq!(
            check_decomposition(hde_edge, &pairs, &dropped),
            Err(DecompError::MissingPair(a.clone()))
        );
        let dup = vec![vec![a.clone(), a.clone()], vec![b.clone()], vec![c.clone()]];
        assert_eq!(
            check_decomposition(hde_edge, &pairs, &dup),
            Err(DecompError::ExtraPair(a.clone()))
        );
        let swapped = vec![vec![c.clone()], vec![b], vec![a]];
        assert!(matches!(
            check_decomposition(hde_edge, &pairs, &swapped),
            Err(DecompError::ForwardEdge { from: 0, to: 1, .. })
        ));
    }

    #[test]
    fn decomposition_matches_up_to_renaming() {
        let pairs = r8_pairs();
        let renamed: Vec<Rule> = pairs
            .iter()
            .map(|p| {
                let map = [(0, 7), (1, 3)].into_iter().collect();
                Rule::new(p.lhs.rename(&map), p.rhs.rename(&map))
            })
            .collect();
        let cs: Vec<Vec<Rule>> = renamed.into_iter().map(|p| vec![p]).collect();
        assert_eq!(check_decomposition(hde_edge, &pairs, &cs), Ok(()));
    }

    fn reach(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let n = adj.len();
        let mut r: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i == j || adj[i][j]).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    fn arb_digraph() -> impl Strategy<Value = Vec<Vec<bool>>> {
        (0usize..=8).prop_flat_map(|n| {
            proptest::collection::vec(
                proptest::collection::vec(proptest::bool::weighted(0.25), n),
                n,
            )
        })
    }

    proptest! {
        #[test]
        fn sccs_match_mutual_reachability(adj in arb_digraph()) {
            let g = DpGraph::from_adjacency(adj.clone());
            let comps = g.sccs();
            let r = reach(&adj);
            let n = adj.len();
            let mut owner = vec![usize::MAX; n];
            for (ci, c) in comps.iter().enumerate() {
                for &v in c {
                    prop_assert_eq!(owner[v], usize::MAX);
                    owner[v] = ci;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(owner[i] == owner[j], r[i][j] && r[j][i]);
                    if adj[i][j] && owner[i] != owner[j] {
                        prop_assert!(owner[j] < owner[i]);
                    }
                }
            }
            let acyclic = (0..n).all(|i| !adj[i][i]) && (0..n).all(|i| (0..n).all(|j| i == j || !(r[i][j] && r[j][i])));
            prop_assert_eq!(g.is_acyclic(), acyclic);
        }
    }
}
