//! The classic bottom-up dynamic program over match graphs.
//!
//! Serves both as a complete matching engine and as the correctness
//! oracle for the clustered engine. Child graphs are dropped as soon as
//! the parent graph is computed, so only O(depth) graphs are live.

use crate::matchgraph::MatchGraph;
use crate::syntax::{Ast, AstKind, NodeId};

/// Match graph of the subexpression rooted at `v`: edge `(i, j)` iff
/// `q[i..j]` is in its language.
pub fn dp_node_graph(ast: &Ast, v: NodeId, q: &[u8]) -> MatchGraph {
    match ast.kind(v) {
        AstKind::Char(c) => MatchGraph::from_char(q, c),
        AstKind::Epsilon => MatchGraph::from_epsilon(q.len()),
        AstKind::Concat(l, r) => dp_node_graph(ast, l, q).concat(&dp_node_graph(ast, r, q)),
        AstKind::Union(l, r) => dp_node_graph(ast, l, q).union(&dp_node_graph(ast, r, q)),
        AstKind::Intersect(l, r) => {
            dp_node_graph(ast, l, q).intersect(&dp_node_graph(ast, r, q))
        }
        AstKind::Complement(c) => dp_node_graph(ast, c, q).complement(),
        AstKind::Star(c) => dp_node_graph(ast, c, q).star(),
    }
}

/// Whole-string verdict: is the edge `(0, n)` in the root graph.
pub fn dp_is_match(ast: &Ast, q: &[u8]) -> bool {
    dp_node_graph(ast, ast.root(), q).has_edge(0, q.len())
}

/// Invokes `visitor` on `(v, G(v))` for every node, children before
/// parents.
pub fn dp_all_graphs(ast: &Ast, q: &[u8], visitor: &mut impl FnMut(NodeId, &MatchGraph)) {
    walk(ast, ast.root(), q, visitor);
}

fn walk(
    ast: &Ast,
    v: NodeId,
    q: &[u8],
    visitor: &mut impl FnMut(NodeId, &MatchGraph),
) -> MatchGraph {
    let g = match ast.kind(v) {
        AstKind::Char(c) => MatchGraph::from_char(q, c),
        AstKind::Epsilon => MatchGraph::from_epsilon(q.len()),
        AstKind::Concat(l, r) => {
            let gl = walk(ast, l, q, visitor);
            let gr = walk(ast, r, q, visitor);
            gl.concat(&gr)
        }
        AstKind::Union(l, r) => {
            let gl = walk(ast, l, q, visitor);
            let gr = walk(ast, r, q, visitor);
            gl.union(&gr)
        }
        AstKind::Intersect(l, r) => {
            let gl = walk(ast, l, q, visitor);
            let gr = walk(ast, r, q, visitor);
            gl.intersect(&gr)
        }
        AstKind::Complement(c) => walk(ast, c, q, visitor).complement(),
        AstKind::Star(c) => walk(ast, c, q, visitor).star(),
    };
    visitor(v, &g);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{default_cap, oracle_match_graph};
    use crate::syntax::{parse, Alphabet, AstKind};
    use crate::tnfa::build_tnfa;

    const FIG_PATTERN: &str = "(!((a|b)*)b)&(ab(b|c)*)";
    const FIG_QUERY: &[u8] = b"cabbabcb";

    #[test]
    fn root_graph_has_single_match() {
        let ast = parse(FIG_PATTERN).unwrap();
        let g = dp_node_graph(&ast, ast.root(), FIG_QUERY);
        assert_eq!(g.edges(), vec![(4, 8)]);
    }

    #[test]
    fn leaf_graph_is_char_scan() {
        let ast = parse(FIG_PATTERN).unwrap();
        let leaf = ast
            .node_ids()
            .find(|&v| ast.kind(v) == AstKind::Char(b'b'))
            .unwrap();
        let g = dp_node_graph(&ast, leaf, FIG_QUERY);
        assert_eq!(g.edges(), vec![(2, 3), (3, 4), (5, 6), (7, 8)]);
    }

    #[test]
    fn star_over_union_is_full_upper_triangle() {
        let ast = parse("(a|b)*").unwrap();
        let g = dp_node_graph(&ast, ast.root(), b"ab");
        let mut want = MatchGraph::new(2);
        for i in 0..=2 {
            for j in i..=2 {
                want.set(i, j);
            }
        }
        assert_eq!(g, want);
    }

    #[test]
    fn is_match_examples() {
        let ast = parse(FIG_PATTERN).unwrap();
        assert!(!dp_is_match(&ast, FIG_QUERY));
        assert!(dp_is_match(&ast, b"abcb"));
        let eps = parse("()").unwrap();
        assert!(dp_is_match(&eps, b""));
    }

    #[test]
    fn all_graphs_visits_every_node_bottom_up() {
        let ast = parse(FIG_PATTERN).unwrap();
        let mut seen = Vec::new();
        dp_all_graphs(&ast, FIG_QUERY, &mut |v, _| seen.push(v));
        assert_eq!(seen.len(), ast.node_count());
        // children always precede their parent
        for (idx, &v) in seen.iter().enumerate() {
            for c in ast.children(v) {
                assert!(seen[..idx].contains(&c));
            }
        }
        // first visited node is a leaf
        assert!(ast.children(seen[0]).is_empty());
    }

    #[test]
    fn per_node_graphs_match_oracle() {
        let ast = parse("!(ab)|a*").unwrap();
        let q = b"aab";
        let alphabet = Alphabet::from_pattern_and_query(&ast, q);
        dp_all_graphs(&ast, q, &mut |v, g| {
            let sub = ast.subtree_ast(v);
            let want = oracle_match_graph(&sub, q, &alphabet, default_cap()).unwrap();
            assert_eq!(*g, want, "node {v}");
        });
    }

    #[test]
    fn complement_soundness() {
        let inner = parse("a(b|c)*").unwrap();
        let outer = parse("!(a(b|c)*)").unwrap();
        let q = b"abcc";
        assert_eq!(
            dp_node_graph(&outer, outer.root(), q),
            dp_node_graph(&inner, inner.root(), q).complement()
        );
    }

    #[test]
    fn agrees_with_tnfa_on_plain_regex() {
        for pat in ["(a|b)*abb", "a*b*", "(ab)*", "()", "a(b|())c"] {
            let ast = parse(pat).unwrap();
            let a = build_tnfa(&ast, ast.root(), None).unwrap();
            for q in [&b""[..], b"a", b"ab", b"abb", b"aabb", b"ababb", b"ac"] {
                assert_eq!(dp_is_match(&ast, q), a.accepts(q), "{pat} on {q:?}");
            }
        }
    }
}
