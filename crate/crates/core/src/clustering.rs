//! Cluster partition of the parse tree, the macro tree, per-cluster
//! TNFAs, and the heavy-path decomposition of the macro tree.
//!
//! Extended nodes are the intersection/complement nodes plus the lowest
//! common ancestors of any two of them. Deleting the edges from extended
//! nodes to their children partitions the parse tree into node-disjoint
//! clusters; contracting the remaining edges yields the macro tree. A
//! pattern with `k >= 1` extended operators has at most `4k - 1`
//! clusters.

use crate::syntax::{Ast, NodeId};
use crate::tnfa::{build_tnfa, ExtendedNodeError, Tnfa};
use std::fmt;

pub type ClusterId = usize;

#[derive(Debug, Clone)]
pub struct Cluster {
    pub root: NodeId,
    /// Member nodes, preorder within the cluster.
    pub members: Vec<NodeId>,
    /// The single extended node, for internal clusters.
    pub extended: Option<NodeId>,
}

impl Cluster {
    /// Member count m_C.
    pub fn size_mc(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct ClusterPartition {
    pub clusters: Vec<Cluster>,
    pub node_to_cluster: Vec<ClusterId>,
}

/// The macro tree: one node per cluster, child order as in the parse
/// tree. `size` counts descendant clusters including the cluster itself.
#[derive(Debug, Clone)]
pub struct MacroTree {
    pub root: ClusterId,
    pub parent: Vec<Option<ClusterId>>,
    pub children: Vec<Vec<ClusterId>>,
    pub size: Vec<usize>,
    pub heavy_child: Vec<Option<ClusterId>>,
}

impl MacroTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn is_heavy(&self, c: ClusterId) -> bool {
        match self.parent[c] {
            Some(p) => self.heavy_child[p] == Some(c),
            None => false, // the root is light
        }
    }

    /// Number of light edges on the path from the root to `c`.
    pub fn light_edges_to(&self, c: ClusterId) -> usize {
        let mut count = 0;
        let mut cur = c;
        while let Some(p) = self.parent[cur] {
            if self.heavy_child[p] != Some(cur) {
                count += 1;
            }
            cur = p;
        }
        count
    }
}

/// The set P: extended-labeled nodes plus pairwise lcas, computed in one
/// postorder pass (a node joins P when it is extended-labeled or both
/// child subtrees contain an extended-labeled node).
pub fn extended_nodes(ast: &Ast) -> Vec<NodeId> {
    let flags = extended_flags(ast);
    (0..ast.node_count()).filter(|&v| flags[v]).collect()
}

fn extended_flags(ast: &Ast) -> Vec<bool> {
    let mut in_p = vec![false; ast.node_count()];
    let mut contains = vec![false; ast.node_count()];
    // children have larger preorder positions than in the subtree walk,
    // so process in reverse preorder for a postorder effect
    for &v in ast.subtree(ast.root()).iter().rev() {
        let labeled = ast.kind(v).is_extended();
        let child_flags: Vec<bool> = ast.children(v).iter().map(|&c| contains[c]).collect();
        in_p[v] = labeled || child_flags.iter().filter(|&&f| f).count() == 2;
        contains[v] = labeled || child_flags.iter().any(|&f| f);
    }
    in_p
}

/// Builds the cluster partition and macro tree in one traversal.
pub fn build_clusters(ast: &Ast) -> (ClusterPartition, MacroTree) {
    let in_p = extended_flags(ast);
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut node_to_cluster = vec![0usize; ast.node_count()];
    let mut parent: Vec<Option<ClusterId>> = Vec::new();
    let mut children: Vec<Vec<ClusterId>> = Vec::new();

    // (node, cluster it belongs to, or None to open a new cluster under
    // the given macro parent)
    enum Item {
        InCluster(NodeId, ClusterId),
        NewCluster(NodeId, Option<ClusterId>),
    }
    let mut stack = vec![Item::NewCluster(ast.root(), None)];
    while let Some(item) = stack.pop() {
        let (v, cid) = match item {
            Item::NewCluster(v, macro_parent) => {
                let cid = clusters.len();
                clusters.push(Cluster {
                    root: v,
                    members: Vec::new(),
                    extended: None,
                });
                parent.push(macro_parent);
                children.push(Vec::new());
                if let Some(p) = macro_parent {
                    children[p].push(cid);
                }
                (v, cid)
            }
            Item::InCluster(v, cid) => (v, cid),
        };
        clusters[cid].members.push(v);
        node_to_cluster[v] = cid;
        if in_p[v] {
            debug_assert!(clusters[cid].extended.is_none());
            clusters[cid].extended = Some(v);
            // external edges: children root new clusters, in parse-tree order
            for c in ast.children(v).into_iter().rev() {
                stack.push(Item::NewCluster(c, Some(cid)));
            }
        } else {
            for c in ast.children(v).into_iter().rev() {
                stack.push(Item::InCluster(c, cid));
            }
        }
    }

    let len = clusters.len();
    let mut mt = MacroTree {
        root: 0,
        parent,
        children,
        size: vec![0; len],
        heavy_child: vec![None; len],
    };
    compute_sizes(&mut mt);
    heavy_paths(&mut mt);
    (
        ClusterPartition {
            clusters,
            node_to_cluster,
        },
        mt,
    )
}

fn compute_sizes(mt: &mut MacroTree) {
    // postorder over the macro tree
    let mut order = Vec::with_capacity(mt.len());
    let mut stack = vec![mt.root];
    while let Some(c) = stack.pop() {
        order.push(c);
        stack.extend(&mt.children[c]);
    }
    for &c in order.iter().rev() {
        mt.size[c] = 1 + mt.children[c].iter().map(|&ch| mt.size[ch]).sum::<usize>();
    }
}

/// Marks, per cluster, a child of maximum size as heavy. The left child
/// wins ties.
pub fn heavy_paths(mt: &mut MacroTree) {
    for c in 0..mt.len() {
        let mut best: Option<ClusterId> = None;
        for &ch in &mt.children[c] {
            // strict comparison keeps the first (left) child on equal size
            if best.map_or(true, |b| mt.size[ch] > mt.size[b]) {
                best = Some(ch);
            }
        }
        mt.heavy_child[c] = best;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterTnfaError {
    /// The cluster is exactly its extended node; its match graph is G(p)
    /// and no automaton is needed.
    SingleNodeInternal,
    Extended(ExtendedNodeError),
}

impl fmt::Display for ClusterTnfaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterTnfaError::SingleNodeInternal => {
                write!(f, "single-node internal cluster has no automaton")
            }
            ClusterTnfaError::Extended(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for ClusterTnfaError {}

/// The cluster automaton A_C: the TNFA of the cluster's local parse
/// tree, with the extended node (if any) replaced by the β transition.
pub fn build_cluster_tnfa(
    ast: &Ast,
    cp: &ClusterPartition,
    c: ClusterId,
) -> Result<Tnfa, ClusterTnfaError> {
    let cluster = &cp.clusters[c];
    match cluster.extended {
        None => build_tnfa(ast, cluster.root, None).map_err(ClusterTnfaError::Extended),
        Some(p) if p == cluster.root => Err(ClusterTnfaError::SingleNodeInternal),
        Some(p) => build_tnfa(ast, cluster.root, Some(p)).map_err(ClusterTnfaError::Extended),
    }
}

/// JSON dump of the partition and macro tree.
pub fn clusters_to_json(ast: &Ast, cp: &ClusterPartition, mt: &MacroTree) -> serde_json::Value {
    let clusters: Vec<serde_json::Value> = cp
        .clusters
        .iter()
        .enumerate()
        .map(|(cid, cluster)| {
            serde_json::json!({
                "id": cid,
                "root": cluster.root,
                "members": cluster.members,
                "extended": cluster.extended,
                "m_C": cluster.size_mc(),
                "parent": mt.parent[cid],
                "children": mt.children[cid],
                "size": mt.size[cid],
                "heavy": mt.is_heavy(cid),
                "expression": crate::syntax::render(&ast.subtree_ast(cluster.root)),
            })
        })
        .collect();
    serde_json::json!({
        "cluster_count": cp.clusters.len(),
        "extended_nodes": extended_nodes(ast),
        "clusters": clusters,
    })
}

/// DOT dump of the macro tree; heavy edges are bold.
pub fn macro_tree_to_dot(cp: &ClusterPartition, mt: &MacroTree) -> String {
    let mut out = String::from("digraph macro {\n  node [shape=box];\n");
    for (cid, cluster) in cp.clusters.iter().enumerate() {
        out.push_str(&format!(
            "  c{} [label=\"C{} (m_C={})\"];\n",
            cid,
            cid,
            cluster.size_mc()
        ));
    }
    for cid in 0..mt.len() {
        for &ch in &mt.children[cid] {
            let style = if mt.heavy_child[cid] == Some(ch) {
                " [style=bold]"
            } else {
                ""
            };
            out.push_str(&format!("  c{cid} -> c{ch}{style};\n"));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    const FIG_PATTERN: &str = "(!((a|b)*)b)&(ab(b|c)*)";

    #[test]
    fn extended_nodes_running_example() {
        let ast = parse(FIG_PATTERN).unwrap();
        let p = extended_nodes(&ast);
        let labeled: Vec<usize> = ast
            .node_ids()
            .filter(|&v| ast.kind(v).is_extended())
            .collect();
        // lca of the two extended operators is the intersection itself
        assert_eq!(p, labeled);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn extended_nodes_plain_regex_empty() {
        let ast = parse("a*b|c").unwrap();
        assert!(extended_nodes(&ast).is_empty());
    }

    #[test]
    fn extended_nodes_includes_lca() {
        // (!a)b(!c): the concat joining the two complements is an lca-only
        // member of P
        let ast = parse("(!a)b(!c)").unwrap();
        let p = extended_nodes(&ast);
        assert_eq!(p.len(), 3);
        let lca_only: Vec<usize> = p
            .iter()
            .copied()
            .filter(|&v| !ast.kind(v).is_extended())
            .collect();
        assert_eq!(lca_only.len(), 1);
        assert!(matches!(ast.kind(lca_only[0]), AstKind::Concat(..)));
    }

    use crate::syntax::AstKind;

    #[test]
    fn clusters_running_example() {
        let ast = parse(FIG_PATTERN).unwrap();
        let k = ast.count_extended();
        let (cp, mt) = build_clusters(&ast);
        assert_eq!(cp.clusters.len(), 4);
        assert!(cp.clusters.len() <= 4 * k - 1);
        // root cluster is the single intersection node
        let root_cluster = &cp.clusters[mt.root];
        assert_eq!(root_cluster.size_mc(), 1);
        assert_eq!(root_cluster.extended, Some(root_cluster.root));
        // member counts of the remaining clusters: {concat, not, b} and the
        // two leaf clusters (a|b)* and ab(b|c)*
        let mut sizes: Vec<usize> = cp.clusters.iter().map(|c| c.size_mc()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 4, 8]);
    }

    #[test]
    fn plain_regex_single_cluster() {
        let ast = parse("a*(b|c)").unwrap();
        let (cp, mt) = build_clusters(&ast);
        assert_eq!(cp.clusters.len(), 1);
        assert_eq!(cp.clusters[0].size_mc(), ast.node_count());
        assert!(cp.clusters[0].extended.is_none());
        assert_eq!(mt.size[mt.root], 1);
    }

    #[test]
    fn complement_chain_cluster_count() {
        for k in 1..=10 {
            let pat = format!("{}a", "!".repeat(k));
            let ast = parse(&pat).unwrap();
            let (cp, _) = build_clusters(&ast);
            assert_eq!(cp.clusters.len(), k + 1);
            assert!(cp.clusters.len() <= 4 * k - 1);
        }
    }

    #[test]
    fn clusters_are_a_disjoint_cover() {
        for pat in [FIG_PATTERN, "!(a!b)&(c|!d)", "a&b&c&d", "(!a)b(!c)"] {
            let ast = parse(pat).unwrap();
            let (cp, _) = build_clusters(&ast);
            let mut seen = vec![0usize; ast.node_count()];
            for cluster in &cp.clusters {
                for &v in &cluster.members {
                    seen[v] += 1;
                }
                // connectivity: every non-root member's parent is a member
                for &v in &cluster.members {
                    if v != cluster.root {
                        let parent = ast.node(v).parent.unwrap();
                        assert!(cluster.members.contains(&parent));
                    }
                }
                // the extended node is a leaf within its own cluster
                if let Some(p) = cluster.extended {
                    for c in ast.children(p) {
                        assert!(!cluster.members.contains(&c));
                    }
                }
            }
            assert!(seen.iter().all(|&s| s == 1), "{pat}");
        }
    }

    #[test]
    fn leaf_and_internal_cluster_invariants() {
        for pat in [FIG_PATTERN, "!(!(!a))", "(a&b)|(c&d)", "(!a)b(!c)"] {
            let ast = parse(pat).unwrap();
            let (cp, mt) = build_clusters(&ast);
            for (cid, cluster) in cp.clusters.iter().enumerate() {
                let p_members = cluster
                    .members
                    .iter()
                    .filter(|&&v| extended_nodes(&ast).contains(&v))
                    .count();
                if mt.children[cid].is_empty() {
                    assert_eq!(p_members, 0, "{pat}: leaf cluster {cid}");
                } else {
                    assert_eq!(p_members, 1, "{pat}: internal cluster {cid}");
                }
            }
        }
    }

    #[test]
    fn cluster_tnfa_running_example() {
        let ast = parse(FIG_PATTERN).unwrap();
        let (cp, mt) = build_clusters(&ast);
        // the {concat, not, b} cluster: automaton of beta . b
        let cid = cp
            .clusters
            .iter()
            .position(|c| c.size_mc() == 3)
            .unwrap();
        let a = build_cluster_tnfa(&ast, &cp, cid).unwrap();
        assert!(a.extended().is_some());
        assert!(a.state_count() <= 2 * 3);
        assert!(a.transitions().len() <= 4 * 3);
        // leaf cluster (a|b)*: plain automaton, no beta
        let leaf = (0..cp.clusters.len())
            .find(|&c| mt.children[c].is_empty() && cp.clusters[c].size_mc() == 4)
            .unwrap();
        let a = build_cluster_tnfa(&ast, &cp, leaf).unwrap();
        assert!(a.extended().is_none());
        assert!(a.accepts(b"abab"));
        // single-node internal cluster refuses an automaton
        assert_eq!(
            build_cluster_tnfa(&ast, &cp, mt.root).unwrap_err(),
            ClusterTnfaError::SingleNodeInternal
        );
    }

    #[test]
    fn heavy_marks_trivial_tree() {
        let ast = parse("abc*").unwrap();
        let (_, mt) = build_clusters(&ast);
        assert_eq!(mt.heavy_child[mt.root], None);
        assert_eq!(mt.light_edges_to(mt.root), 0);
    }

    #[test]
    fn heavy_marks_balanced_tree() {
        // balanced intersections: 7 single-node internal clusters over 8
        // leaves
        let ast = parse("((a&b)&(c&d))&((e&f)&(g&h))").unwrap();
        let (cp, mt) = build_clusters(&ast);
        let ell = cp.clusters.len();
        assert_eq!(ell, 15);
        let max_light = (ell as f64).log2().floor() as usize;
        for c in 0..mt.len() {
            if mt.children[c].is_empty() {
                assert!(mt.light_edges_to(c) <= max_light);
                assert!(mt.light_edges_to(c) <= 3);
            }
        }
    }

    #[test]
    fn heavy_marks_caterpillar() {
        // chain of intersections, each with one leaf child and one chain
        // child: the chain side is always heavy
        let ast = parse("a&(b&(c&(d&e)))").unwrap();
        let (_, mt) = build_clusters(&ast);
        for c in 0..mt.len() {
            if mt.children[c].is_empty() {
                assert!(mt.light_edges_to(c) <= 1);
            }
        }
    }

    #[test]
    fn sizes_consistent() {
        let ast = parse(FIG_PATTERN).unwrap();
        let (_, mt) = build_clusters(&ast);
        for c in 0..mt.len() {
            assert_eq!(
                mt.size[c],
                1 + mt.children[c].iter().map(|&ch| mt.size[ch]).sum::<usize>()
            );
        }
        assert_eq!(mt.size[mt.root], mt.len());
    }
}
