//! The clustered matching engine.
//!
//! Per cluster, the match graph of the cluster root is assembled from the
//! child cluster graphs with a constant number of match-graph operations
//! plus simulations of the cluster automaton A_C: for an internal cluster
//! with extended node p,
//!
//! ```text
//! G(v) = G_{θ,φ} | G_{θ,θ'} ⊙ G(p) ⊙ (G_{φ',θ'} ⊙ G(p))* ⊙ G_{φ',φ}
//! ```
//!
//! Two traversal modes: a naive bottom-up pass that retains every cluster
//! graph until the end, and the space-reduced traversal that recurses
//! into the child with the most macro-tree descendants first and discards
//! child graphs as soon as their parent is assembled. The engine keeps a
//! live-graph ledger over the cluster-root graphs (and G(p)) so the
//! log-sized retention shape of the second mode is observable.

use crate::clustering::{build_clusters, ClusterId, ClusterPartition, MacroTree};
use crate::matchgraph::MatchGraph;
use crate::simulate::{build_match_graph, SimCost, TnfaSimulator};
use crate::syntax::{Ast, AstKind, NodeId};
use crate::tnfa::Tnfa;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceMode {
    NaiveBottomUp,
    HeavyPath,
}

impl SpaceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceMode::NaiveBottomUp => "naive",
            SpaceMode::HeavyPath => "heavy-path",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterStat {
    pub id: usize,
    #[serde(rename = "m_C")]
    pub m_c: usize,
    pub time_ns: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulatorStats {
    pub char_steps: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineStats {
    pub ell: usize,
    pub peak_live_graphs: usize,
    pub clusters: Vec<ClusterStat>,
    pub simulator: SimulatorStats,
    pub mode: String,
}

/// Counts live cluster-root match graphs (plus G(p) while it exists).
#[derive(Debug, Default)]
struct Ledger {
    live: usize,
    peak: usize,
}

impl Ledger {
    fn alloc(&mut self) {
        self.live += 1;
        self.peak = self.peak.max(self.live);
    }

    fn free(&mut self) {
        debug_assert!(self.live > 0);
        self.live -= 1;
    }
}

struct Run<'a> {
    ast: &'a Ast,
    cp: &'a ClusterPartition,
    mt: &'a MacroTree,
    q: &'a [u8],
    sim: &'a dyn TnfaSimulator,
    ledger: Ledger,
    cost: SimCost,
    stats: Vec<ClusterStat>,
}

impl<'a> Run<'a> {
    fn cluster_tnfa(&self, c: ClusterId) -> Tnfa {
        crate::clustering::build_cluster_tnfa(self.ast, self.cp, c)
            .expect("cluster automaton")
    }

    fn graph_of_pair(&mut self, a: &Tnfa, s: usize, t: usize) -> MatchGraph {
        let (g, cost) = build_match_graph(a, s, t, self.q, self.sim);
        self.cost.add(cost);
        g
    }

    /// Step 1: G(p) from the child cluster graphs, by p's label.
    fn extended_node_graph(
        &mut self,
        p: NodeId,
        child_graphs: &[MatchGraph],
    ) -> MatchGraph {
        let g = match self.ast.kind(p) {
            AstKind::Complement(_) => {
                assert_eq!(child_graphs.len(), 1, "complement node wants one child graph");
                child_graphs[0].complement()
            }
            AstKind::Intersect(..) => child_graphs[0].intersect(&child_graphs[1]),
            AstKind::Concat(..) => child_graphs[0].concat(&child_graphs[1]),
            AstKind::Union(..) => child_graphs[0].union(&child_graphs[1]),
            kind => unreachable!("extended node labeled {:?}", kind.op_name()),
        };
        self.ledger.alloc();
        g
    }

    /// Match graph of the root of cluster `c` given its child cluster
    /// graphs (in parse-tree child order of p). The returned graph is
    /// ledger-tracked; the caller frees it.
    fn cluster_graph(&mut self, c: ClusterId, child_graphs: &[MatchGraph]) -> MatchGraph {
        let started = Instant::now();
        let cluster = &self.cp.clusters[c];
        let g = match cluster.extended {
            None => {
                // Case 1: leaf cluster, plain simulation of A_C
                assert!(child_graphs.is_empty(), "leaf cluster got child graphs");
                let a = self.cluster_tnfa(c);
                let g = self.graph_of_pair(&a, a.theta(), a.phi());
                self.ledger.alloc();
                g
            }
            Some(p) => {
                assert_eq!(
                    child_graphs.len(),
                    self.ast.children(p).len(),
                    "cluster {c}: missing child graph"
                );
                let g_p = self.extended_node_graph(p, child_graphs);
                if p == cluster.root {
                    // single-node cluster: G(v) = G(p)
                    self.finish_stat(c, started);
                    return g_p;
                }
                // Step 2: the four simulation graphs of A_C
                let a = self.cluster_tnfa(c);
                let (theta, phi) = (a.theta(), a.phi());
                let (theta_p, phi_p) = a.extended().expect("internal cluster has a beta edge");
                let g_tf = self.graph_of_pair(&a, theta, phi);
                let g_tt = self.graph_of_pair(&a, theta, theta_p);
                let g_ft = self.graph_of_pair(&a, phi_p, theta_p);
                let g_fp = self.graph_of_pair(&a, phi_p, phi);
                // Step 3: the composition, six algebra calls
                let loop_term = g_ft.concat(&g_p).star();
                let chain = g_tt.concat(&g_p).concat(&loop_term).concat(&g_fp);
                let g = g_tf.union(&chain);
                self.ledger.free(); // G(p)
                self.ledger.alloc(); // the result
                g
            }
        };
        self.finish_stat(c, started);
        g
    }

    fn finish_stat(&mut self, c: ClusterId, started: Instant) {
        self.stats.push(ClusterStat {
            id: c,
            m_c: self.cp.clusters[c].size_mc(),
            time_ns: started.elapsed().as_nanos(),
        });
    }

    /// Naive bottom-up traversal: every cluster graph is retained until
    /// the whole macro tree is processed.
    fn run_naive(&mut self) -> MatchGraph {
        let mut order = Vec::with_capacity(self.mt.len());
        let mut stack = vec![self.mt.root];
        while let Some(c) = stack.pop() {
            order.push(c);
            stack.extend(&self.mt.children[c]);
        }
        let mut graphs: Vec<Option<MatchGraph>> = (0..self.mt.len()).map(|_| None).collect();
        for &c in order.iter().rev() {
            let child_graphs: Vec<MatchGraph> = self.mt.children[c]
                .iter()
                .map(|&ch| graphs[ch].clone().expect("child processed first"))
                .collect();
            // the clones above are scratch; the retained copies stay in
            // `graphs`, so the ledger tracks only the computed result
            graphs[c] = Some(self.cluster_graph(c, &child_graphs));
        }
        let root = graphs[self.mt.root].take().expect("root graph");
        for g in graphs.iter_mut() {
            if g.take().is_some() {
                self.ledger.free();
            }
        }
        self.ledger.free(); // the root graph handed to the caller
        root
    }

    /// Space-reduced traversal: child with the most macro-tree
    /// descendants first, child graphs discarded right after their parent
    /// cluster is assembled.
    fn run_heavy(&mut self, c: ClusterId) -> MatchGraph {
        let children = self.mt.children[c].clone();
        let mut child_graphs: Vec<Option<MatchGraph>> = (0..children.len()).map(|_| None).collect();
        // heavy (max descendants) first, remaining in parse-tree order
        let mut order: Vec<usize> = (0..children.len()).collect();
        if let Some(h) = self.mt.heavy_child[c] {
            order.sort_by_key(|&idx| if children[idx] == h { 0 } else { 1 });
        }
        for idx in order {
            child_graphs[idx] = Some(self.run_heavy(children[idx]));
        }
        let owned: Vec<MatchGraph> = child_graphs.into_iter().map(|g| g.unwrap()).collect();
        let g = self.cluster_graph(c, &owned);
        for _ in &owned {
            self.ledger.free();
        }
        drop(owned);
        g
    }
}

/// Match graph of the whole pattern via the clustered algorithm,
/// together with instrumentation.
pub fn clustered_root_graph(
    ast: &Ast,
    q: &[u8],
    sim: &dyn TnfaSimulator,
    mode: SpaceMode,
) -> (MatchGraph, EngineStats) {
    let (cp, mt) = build_clusters(ast);
    let mut run = Run {
        ast,
        cp: &cp,
        mt: &mt,
        q,
        sim,
        ledger: Ledger::default(),
        cost: SimCost::default(),
        stats: Vec::new(),
    };
    let root_graph = match mode {
        SpaceMode::NaiveBottomUp => run.run_naive(),
        SpaceMode::HeavyPath => {
            let g = run.run_heavy(mt.root);
            run.ledger.free();
            g
        }
    };
    let stats = EngineStats {
        ell: cp.clusters.len(),
        peak_live_graphs: run.ledger.peak,
        clusters: run.stats,
        simulator: SimulatorStats {
            char_steps: run.cost.char_steps,
        },
        mode: mode.as_str().to_string(),
    };
    (root_graph, stats)
}

/// Whole-string verdict via the clustered algorithm.
pub fn match_clustered(
    ast: &Ast,
    q: &[u8],
    sim: &dyn TnfaSimulator,
    mode: SpaceMode,
) -> (bool, EngineStats) {
    let (g, stats) = clustered_root_graph(ast, q, sim, mode);
    (g.has_edge(0, q.len()), stats)
}

/// Match graph of one cluster root from explicit child graphs; exposed
/// for per-cluster cross-checks.
pub fn cluster_graph(
    ast: &Ast,
    cp: &ClusterPartition,
    mt: &MacroTree,
    c: ClusterId,
    child_graphs: &[MatchGraph],
    q: &[u8],
    sim: &dyn TnfaSimulator,
) -> MatchGraph {
    let mut run = Run {
        ast,
        cp,
        mt,
        q,
        sim,
        ledger: Ledger::default(),
        cost: SimCost::default(),
        stats: Vec::new(),
    };
    run.cluster_graph(c, child_graphs)
}
