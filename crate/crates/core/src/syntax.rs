//! Parsing and rendering of extended regular expressions.
//!
//! The grammar, from loosest to tightest binding: union `|`, intersection
//! `&`, concatenation (juxtaposition), prefix complement `!`, postfix star
//! `*`. `()` denotes the empty string. A backslash escapes the
//! metacharacters `! & | * ( ) \`. Note that `!` binds looser than `*`, so
//! `!a*` is the complement of `a*`.

use std::fmt;

pub type NodeId = usize;

/// A node of the parse tree. Binary operators hold child node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AstKind {
    Char(u8),
    Epsilon,
    Concat(NodeId, NodeId),
    Union(NodeId, NodeId),
    Intersect(NodeId, NodeId),
    Complement(NodeId),
    Star(NodeId),
}

impl AstKind {
    /// `true` for the intersection and complement operators.
    pub fn is_extended(&self) -> bool {
        matches!(self, AstKind::Intersect(..) | AstKind::Complement(..))
    }

    pub fn op_name(&self) -> &'static str {
        match self {
            AstKind::Char(_) => "char",
            AstKind::Epsilon => "epsilon",
            AstKind::Concat(..) => "concat",
            AstKind::Union(..) => "union",
            AstKind::Intersect(..) => "intersect",
            AstKind::Complement(..) => "complement",
            AstKind::Star(..) => "star",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AstNode {
    pub kind: AstKind,
    pub parent: Option<NodeId>,
}

/// Parse tree of an extended regular expression, stored as an arena.
///
/// The node count is the size parameter `m`; the number of intersection and
/// complement nodes is `k`.
#[derive(Debug, Clone)]
pub struct Ast {
    nodes: Vec<AstNode>,
    root: NodeId,
}

impl Ast {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, v: NodeId) -> &AstNode {
        &self.nodes[v]
    }

    pub fn kind(&self, v: NodeId) -> AstKind {
        self.nodes[v].kind
    }

    /// Number of parse-tree nodes (the parameter `m`).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        0..self.nodes.len()
    }

    pub fn children(&self, v: NodeId) -> Vec<NodeId> {
        match self.nodes[v].kind {
            AstKind::Char(_) | AstKind::Epsilon => vec![],
            AstKind::Complement(c) | AstKind::Star(c) => vec![c],
            AstKind::Concat(l, r) | AstKind::Union(l, r) | AstKind::Intersect(l, r) => {
                vec![l, r]
            }
        }
    }

    /// Nodes of the subtree rooted at `v`, in preorder.
    pub fn subtree(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            let mut cs = self.children(u);
            cs.reverse();
            stack.extend(cs);
        }
        out
    }

    pub fn subtree_size(&self, v: NodeId) -> usize {
        self.subtree(v).len()
    }

    /// A standalone copy of the subtree rooted at `v`.
    pub fn subtree_ast(&self, v: NodeId) -> Ast {
        fn clone_into(ast: &Ast, v: NodeId, b: &mut AstBuilder) -> NodeId {
            match ast.kind(v) {
                AstKind::Char(c) => b.char(c),
                AstKind::Epsilon => b.epsilon(),
                AstKind::Concat(l, r) => {
                    let (l, r) = (clone_into(ast, l, b), clone_into(ast, r, b));
                    b.concat(l, r)
                }
                AstKind::Union(l, r) => {
                    let (l, r) = (clone_into(ast, l, b), clone_into(ast, r, b));
                    b.union(l, r)
                }
                AstKind::Intersect(l, r) => {
                    let (l, r) = (clone_into(ast, l, b), clone_into(ast, r, b));
                    b.intersect(l, r)
                }
                AstKind::Complement(c) => {
                    let c = clone_into(ast, c, b);
                    b.complement(c)
                }
                AstKind::Star(c) => {
                    let c = clone_into(ast, c, b);
                    b.star(c)
                }
            }
        }
        let mut b = AstBuilder::new();
        let root = clone_into(self, v, &mut b);
        b.finish(root)
    }

    /// Number of intersection and complement nodes (the parameter `k`).
    pub fn count_extended(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind.is_extended()).count()
    }

    /// Distinct `Char` leaf symbols, sorted.
    pub fn leaf_symbols(&self) -> Vec<u8> {
        let mut syms: Vec<u8> = self
            .nodes
            .iter()
            .filter_map(|n| match n.kind {
                AstKind::Char(c) => Some(c),
                _ => None,
            })
            .collect();
        syms.sort_unstable();
        syms.dedup();
        syms
    }

    /// Checks the arena is a rooted binary tree with consistent parent
    /// links and arities.
    pub fn validate(&self) -> Result<(), String> {
        let m = self.nodes.len();
        if self.root >= m {
            return Err(format!("root id {} out of range", self.root));
        }
        if self.nodes[self.root].parent.is_some() {
            return Err("root has a parent".into());
        }
        let mut seen = vec![false; m];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if seen[v] {
                return Err(format!("node {v} reached twice"));
            }
            seen[v] = true;
            for c in self.children(v) {
                if c >= m {
                    return Err(format!("child id {c} out of range"));
                }
                if self.nodes[c].parent != Some(v) {
                    return Err(format!("node {c} has wrong parent link"));
                }
                stack.push(c);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(format!("node {v} unreachable from root"));
        }
        Ok(())
    }
}

/// Structural equality modulo node-id relabeling.
pub fn structural_eq(a: &Ast, b: &Ast) -> bool {
    fn eq(a: &Ast, va: NodeId, b: &Ast, vb: NodeId) -> bool {
        match (a.kind(va), b.kind(vb)) {
            (AstKind::Char(x), AstKind::Char(y)) => x == y,
            (AstKind::Epsilon, AstKind::Epsilon) => true,
            (AstKind::Concat(l1, r1), AstKind::Concat(l2, r2))
            | (AstKind::Union(l1, r1), AstKind::Union(l2, r2))
            | (AstKind::Intersect(l1, r1), AstKind::Intersect(l2, r2)) => {
                eq(a, l1, b, l2) && eq(a, r1, b, r2)
            }
            (AstKind::Complement(c1), AstKind::Complement(c2))
            | (AstKind::Star(c1), AstKind::Star(c2)) => eq(a, c1, b, c2),
            _ => false,
        }
    }
    eq(a, a.root(), b, b.root())
}

/// Incremental arena construction, used by the parser, the random
/// instance generator, and hand-built trees in tests.
#[derive(Debug, Default)]
pub struct AstBuilder {
    nodes: Vec<AstNode>,
}

impl AstBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, kind: AstKind) -> NodeId {
        self.nodes.push(AstNode { kind, parent: None });
        self.nodes.len() - 1
    }

    pub fn char(&mut self, c: u8) -> NodeId {
        self.push(AstKind::Char(c))
    }

    pub fn epsilon(&mut self) -> NodeId {
        self.push(AstKind::Epsilon)
    }

    pub fn concat(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.push(AstKind::Concat(l, r))
    }

    pub fn union(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.push(AstKind::Union(l, r))
    }

    pub fn intersect(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.push(AstKind::Intersect(l, r))
    }

    pub fn complement(&mut self, c: NodeId) -> NodeId {
        self.push(AstKind::Complement(c))
    }

    pub fn star(&mut self, c: NodeId) -> NodeId {
        self.push(AstKind::Star(c))
    }

    /// Finishes the tree rooted at `root`, filling in parent links.
    ///
    /// Panics if the arena is not a valid tree (builder misuse).
    pub fn finish(mut self, root: NodeId) -> Ast {
        let kinds: Vec<AstKind> = self.nodes.iter().map(|n| n.kind).collect();
        for (v, kind) in kinds.iter().enumerate() {
            let cs: Vec<NodeId> = match *kind {
                AstKind::Char(_) | AstKind::Epsilon => vec![],
                AstKind::Complement(c) | AstKind::Star(c) => vec![c],
                AstKind::Concat(l, r) | AstKind::Union(l, r) | AstKind::Intersect(l, r) => {
                    vec![l, r]
                }
            };
            for c in cs {
                assert!(self.nodes[c].parent.is_none(), "node {c} has two parents");
                self.nodes[c].parent = Some(v);
            }
        }
        let ast = Ast { nodes: self.nodes, root };
        ast.validate().expect("builder produced an invalid tree");
        ast
    }
}

/// Metacharacters that must be escaped to appear as literals.
pub const METACHARS: &[u8] = b"!&|*()\\";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub reason: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: {}", self.offset, self.reason)
    }
}

impl std::error::Error for SyntaxError {}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    builder: AstBuilder,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err<T>(&self, reason: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.pos,
            reason: reason.into(),
        })
    }

    fn union(&mut self) -> Result<NodeId, SyntaxError> {
        let mut lhs = self.intersect()?;
        while self.peek() == Some(b'|') {
            self.bump();
            let rhs = self.intersect()?;
            lhs = self.builder.union(lhs, rhs);
        }
        Ok(lhs)
    }

    fn intersect(&mut self) -> Result<NodeId, SyntaxError> {
        let mut lhs = self.concat()?;
        while self.peek() == Some(b'&') {
            self.bump();
            let rhs = self.concat()?;
            lhs = self.builder.intersect(lhs, rhs);
        }
        Ok(lhs)
    }

    fn starts_term(c: u8) -> bool {
        c != b'|' && c != b'&' && c != b')' && c != b'*'
    }

    fn concat(&mut self) -> Result<NodeId, SyntaxError> {
        let mut lhs = match self.peek() {
            Some(c) if Self::starts_term(c) => self.prefix()?,
            Some(b'*') => return self.err("dangling operator `*`"),
            _ => return self.err("empty alternative"),
        };
        while let Some(c) = self.peek() {
            if !Self::starts_term(c) {
                break;
            }
            let rhs = self.prefix()?;
            lhs = self.builder.concat(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<NodeId, SyntaxError> {
        if self.peek() == Some(b'!') {
            self.bump();
            match self.peek() {
                Some(c) if Self::starts_term(c) => {
                    let child = self.prefix()?;
                    Ok(self.builder.complement(child))
                }
                _ => self.err("dangling operator `!`"),
            }
        } else {
            self.postfix()
        }
    }

    fn postfix(&mut self) -> Result<NodeId, SyntaxError> {
        let mut node = self.atom()?;
        while self.peek() == Some(b'*') {
            self.bump();
            node = self.builder.star(node);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<NodeId, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                let open = self.pos;
                self.bump();
                if self.peek() == Some(b')') {
                    self.bump();
                    return Ok(self.builder.epsilon());
                }
                let inner = self.union()?;
                if self.peek() != Some(b')') {
                    return Err(SyntaxError {
                        offset: open,
                        reason: "unbalanced parenthesis".into(),
                    });
                }
                self.bump();
                Ok(inner)
            }
            Some(b'\\') => {
                self.bump();
                match self.peek() {
                    Some(c) if c.is_ascii() => {
                        self.bump();
                        Ok(self.builder.char(c))
                    }
                    Some(_) => self.err("non-ASCII byte in pattern"),
                    None => self.err("trailing escape"),
                }
            }
            Some(c) if !c.is_ascii() => self.err("non-ASCII byte in pattern"),
            Some(c) if Self::starts_term(c) => {
                self.bump();
                Ok(self.builder.char(c))
            }
            Some(b'*') => self.err("dangling operator `*`"),
            _ => self.err("empty alternative"),
        }
    }
}

/// Parses a pattern into its parse tree.
pub fn parse(pattern: &str) -> Result<Ast, SyntaxError> {
    let mut p = Parser {
        input: pattern.as_bytes(),
        pos: 0,
        builder: AstBuilder::new(),
    };
    let root = p.union()?;
    if let Some(c) = p.peek() {
        if c == b')' {
            return p.err("unbalanced parenthesis");
        }
        return p.err("dangling operator");
    }
    Ok(p.builder.finish(root))
}

fn prec(kind: AstKind) -> u8 {
    match kind {
        AstKind::Union(..) => 0,
        AstKind::Intersect(..) => 1,
        AstKind::Concat(..) => 2,
        AstKind::Complement(..) => 3,
        AstKind::Star(..) => 4,
        AstKind::Char(_) | AstKind::Epsilon => 5,
    }
}

/// Renders a parse tree back to pattern text with minimal parenthesization.
/// Re-parsing the result yields a structurally identical tree.
pub fn render(ast: &Ast) -> String {
    let mut out = String::new();
    render_node(ast, ast.root(), 0, &mut out);
    out
}

fn render_node(ast: &Ast, v: NodeId, min_prec: u8, out: &mut String) {
    let kind = ast.kind(v);
    let p = prec(kind);
    let parens = p < min_prec;
    if parens {
        out.push('(');
    }
    match kind {
        AstKind::Char(c) => {
            if METACHARS.contains(&c) {
                out.push('\\');
            }
            out.push(c as char);
        }
        AstKind::Epsilon => out.push_str("()"),
        AstKind::Union(l, r) => {
            render_node(ast, l, 0, out);
            out.push('|');
            // right operand one level tighter keeps left association on re-parse
            render_node(ast, r, 1, out);
        }
        AstKind::Intersect(l, r) => {
            render_node(ast, l, 1, out);
            out.push('&');
            render_node(ast, r, 2, out);
        }
        AstKind::Concat(l, r) => {
            render_node(ast, l, 2, out);
            render_node(ast, r, 3, out);
        }
        AstKind::Complement(c) => {
            out.push('!');
            render_node(ast, c, 3, out);
        }
        AstKind::Star(c) => {
            render_node(ast, c, 4, out);
            out.push('*');
        }
    }
    if parens {
        out.push(')');
    }
}

/// The alphabet Σ. The extended-transition placeholder β is represented
/// out of band and is never a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut symbols = bytes.to_vec();
        symbols.sort_unstable();
        symbols.dedup();
        Alphabet { symbols }
    }

    /// Default alphabet: distinct characters of the query plus all `Char`
    /// leaves of the pattern.
    pub fn from_pattern_and_query(ast: &Ast, query: &[u8]) -> Self {
        let mut bytes = ast.leaf_symbols();
        bytes.extend_from_slice(query);
        Alphabet::from_bytes(&bytes)
    }

    pub fn contains(&self, c: u8) -> bool {
        self.symbols.binary_search(&c).is_ok()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// JSON dump of the parse tree: a node array with kind, children, id.
pub fn ast_to_json(ast: &Ast) -> serde_json::Value {
    let nodes: Vec<serde_json::Value> = ast
        .node_ids()
        .map(|v| {
            let node = ast.node(v);
            let mut obj = serde_json::json!({
                "id": v,
                "kind": node.kind.op_name(),
                "children": ast.children(v),
            });
            if let AstKind::Char(c) = node.kind {
                obj["symbol"] = serde_json::json!((c as char).to_string());
            }
            obj
        })
        .collect();
    serde_json::json!({ "root": ast.root(), "node_count": ast.node_count(), "nodes": nodes })
}

/// DOT dump of the parse tree.
pub fn ast_to_dot(ast: &Ast) -> String {
    let mut out = String::from("digraph ast {\n  node [shape=circle];\n");
    for v in ast.node_ids() {
        let label = match ast.kind(v) {
            AstKind::Char(c) => format!("{}", (c as char)),
            AstKind::Epsilon => "eps".into(),
            AstKind::Concat(..) => ".".into(),
            AstKind::Union(..) => "|".into(),
            AstKind::Intersect(..) => "&".into(),
            AstKind::Complement(..) => "!".into(),
            AstKind::Star(..) => "*".into(),
        };
        out.push_str(&format!("  n{} [label=\"{}\"];\n", v, label.replace('\\', "\\\\").replace('"', "\\\"")));
        for c in ast.children(v) {
            out.push_str(&format!("  n{v} -> n{c};\n"));
        }
    }
    out.push_str("}\n");
    out
}
