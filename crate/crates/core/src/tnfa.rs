//! Thompson NFA construction and state-set simulation.
//!
//! The construction follows Thompson's recursive rules. Intersection and
//! complement nodes are not representable; a single designated node may
//! instead be replaced by the placeholder transition labeled β, which no
//! input character ever traverses. A TNFA built from a subtree of `m`
//! nodes has at most `2m` states and `4m` transitions.

use crate::syntax::{Ast, AstKind, NodeId};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Char(u8),
    Eps,
    Beta,
}

#[derive(Debug, Clone)]
pub struct Tnfa {
    state_count: usize,
    transitions: Vec<(usize, usize, Label)>,
    theta: usize,
    phi: usize,
    extended: Option<(usize, usize)>,
    eps_out: Vec<Vec<usize>>,
    /// Character transitions grouped by symbol, for the simulation hot path.
    by_char: Vec<Vec<(usize, usize)>>,
    /// ε-closure of each state as a precomputed bit vector.
    closures: Vec<StateSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedNodeError {
    pub node: NodeId,
}

impl fmt::Display for ExtendedNodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {} is an extended operator and cannot appear in a TNFA",
            self.node
        )
    }
}

impl std::error::Error for ExtendedNodeError {}

struct Builder {
    state_count: usize,
    transitions: Vec<(usize, usize, Label)>,
    extended: Option<(usize, usize)>,
}

impl Builder {
    fn alloc(&mut self) -> usize {
        self.state_count += 1;
        self.state_count - 1
    }

    fn edge(&mut self, from: usize, to: usize, label: Label) {
        self.transitions.push((from, to, label));
    }

    /// Adds the fragment for the subtree at `v`, entering at `theta`.
    /// Returns the fragment's accept state.
    fn add(
        &mut self,
        ast: &Ast,
        v: NodeId,
        theta: usize,
        beta_node: Option<NodeId>,
    ) -> Result<usize, ExtendedNodeError> {
        if beta_node == Some(v) {
            let phi = self.alloc();
            self.edge(theta, phi, Label::Beta);
            self.extended = Some((theta, phi));
            return Ok(phi);
        }
        match ast.kind(v) {
            AstKind::Char(c) => {
                let phi = self.alloc();
                self.edge(theta, phi, Label::Char(c));
                Ok(phi)
            }
            AstKind::Epsilon => {
                let phi = self.alloc();
                self.edge(theta, phi, Label::Eps);
                Ok(phi)
            }
            AstKind::Concat(l, r) => {
                let mid = self.add(ast, l, theta, beta_node)?;
                self.add(ast, r, mid, beta_node)
            }
            AstKind::Union(l, r) => {
                let theta_l = self.alloc();
                let phi_l = self.add(ast, l, theta_l, beta_node)?;
                let theta_r = self.alloc();
                let phi_r = self.add(ast, r, theta_r, beta_node)?;
                let phi = self.alloc();
                self.edge(theta, theta_l, Label::Eps);
                self.edge(theta, theta_r, Label::Eps);
                self.edge(phi_l, phi, Label::Eps);
                self.edge(phi_r, phi, Label::Eps);
                Ok(phi)
            }
            AstKind::Star(c) => {
                let theta_c = self.alloc();
                let phi_c = self.add(ast, c, theta_c, beta_node)?;
                let phi = self.alloc();
                self.edge(theta, theta_c, Label::Eps);
                self.edge(theta, phi, Label::Eps);
                self.edge(phi_c, theta_c, Label::Eps);
                self.edge(phi_c, phi, Label::Eps);
                Ok(phi)
            }
            AstKind::Intersect(..) | AstKind::Complement(..) => {
                Err(ExtendedNodeError { node: v })
            }
        }
    }
}

/// Builds the TNFA of the subtree rooted at `root`. If `beta_node` is
/// given, that node is replaced by the extended transition θ'→φ' labeled
/// β; any other extended node reachable from `root` is an error.
pub fn build_tnfa(
    ast: &Ast,
    root: NodeId,
    beta_node: Option<NodeId>,
) -> Result<Tnfa, ExtendedNodeError> {
    let mut b = Builder {
        state_count: 0,
        transitions: Vec::new(),
        extended: None,
    };
    let theta = b.alloc(); // state 0 by construction
    let phi = b.add(ast, root, theta, beta_node)?;
    let mut eps_out = vec![Vec::new(); b.state_count];
    let mut by_char = vec![Vec::new(); 256];
    for &(from, to, label) in &b.transitions {
        match label {
            Label::Eps => eps_out[from].push(to),
            Label::Char(c) => by_char[c as usize].push((from, to)),
            Label::Beta => {}
        }
    }
    let closures = (0..b.state_count)
        .map(|s| {
            let mut set = StateSet::new(b.state_count);
            set.insert(s);
            let mut work = vec![s];
            while let Some(u) = work.pop() {
                for &t in &eps_out[u] {
                    if set.insert(t) {
                        work.push(t);
                    }
                }
            }
            set
        })
        .collect();
    Ok(Tnfa {
        state_count: b.state_count,
        transitions: b.transitions,
        theta,
        phi,
        extended: b.extended,
        eps_out,
        by_char,
        closures,
    })
}

impl Tnfa {
    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn transitions(&self) -> &[(usize, usize, Label)] {
        &self.transitions
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// The extended transition's endpoints (θ', φ'), if a β edge exists.
    pub fn extended(&self) -> Option<(usize, usize)> {
        self.extended
    }

    /// Adds every state ε-reachable from the current members.
    pub fn eps_close(&self, set: &mut StateSet) {
        let mut work: Vec<usize> = set.iter().collect();
        while let Some(s) = work.pop() {
            for &t in &self.eps_out[s] {
                if set.insert(t) {
                    work.push(t);
                }
            }
        }
    }

    pub fn eps_closure_of(&self, state: usize) -> StateSet {
        self.closures[state].clone()
    }

    /// The state-set transition δ(s, c): all states reachable from `s`
    /// via paths whose non-ε labels concatenate to `c`. β edges are never
    /// traversed.
    pub fn state_set_transition(&self, s: &StateSet, c: u8) -> StateSet {
        let mut next = StateSet::new(self.state_count);
        for &(from, to) in &self.by_char[c as usize] {
            if s.contains(from) {
                next.union_with(&self.closures[to]);
            }
        }
        next
    }

    /// Whole-string acceptance via the state-set sequence S_0..S_n.
    pub fn accepts(&self, q: &[u8]) -> bool {
        let mut set = self.eps_closure_of(self.theta);
        for &c in q {
            set = self.state_set_transition(&set, c);
            if set.is_empty() {
                return false;
            }
        }
        set.contains(self.phi)
    }

    /// DOT dump; the β edge, when present, is drawn bold red.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tnfa {\n  rankdir=LR;\n  node [shape=circle];\n");
        out.push_str(&format!("  s{} [shape=doublecircle];\n", self.phi));
        for &(from, to, label) in &self.transitions {
            let (text, attrs) = match label {
                Label::Char(c) => (format!("{}", c as char).replace('\\', "\\\\").replace('"', "\\\""), ""),
                Label::Eps => ("eps".to_string(), ""),
                Label::Beta => ("beta".to_string(), ", style=bold, color=red"),
            };
            out.push_str(&format!("  s{from} -> s{to} [label=\"{text}\"{attrs}];\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Bit-vector over the states of one TNFA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    words: Vec<u64>,
    len: usize,
}

impl StateSet {
    pub fn new(len: usize) -> Self {
        StateSet {
            words: vec![0; (len + 63) / 64],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, s: usize) -> bool {
        debug_assert!(s < self.len);
        self.words[s / 64] >> (s % 64) & 1 != 0
    }

    /// Returns `true` if `s` was newly added.
    pub fn insert(&mut self, s: usize) -> bool {
        debug_assert!(s < self.len);
        let w = &mut self.words[s / 64];
        let bit = 1u64 << (s % 64);
        let added = *w & bit == 0;
        *w |= bit;
        added
    }

    pub fn union_with(&mut self, other: &StateSet) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn char_leaf_automaton() {
        let ast = parse("a").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.transitions().len(), 1);
        assert_eq!(a.transitions()[0], (0, 1, Label::Char(b'a')));
        assert_eq!(a.theta(), 0);
    }

    #[test]
    fn union_automaton_structure() {
        // Fig 2(c) by hand: two literal fragments plus new start/accept,
        // four eps transitions.
        let ast = parse("a|b").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert_eq!(a.state_count(), 6);
        assert_eq!(a.transitions().len(), 6);
        let eps = a
            .transitions()
            .iter()
            .filter(|t| t.2 == Label::Eps)
            .count();
        assert_eq!(eps, 4);
    }

    #[test]
    fn epsilon_automaton() {
        let ast = parse("()").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.transitions(), &[(0, 1, Label::Eps)]);
    }

    #[test]
    fn size_bounds_hold() {
        for pat in ["a", "a|b", "(a|b)*", "ab(b|c)*", "((a|b)*c)*", "()a*"] {
            let ast = parse(pat).unwrap();
            let a = build_tnfa(&ast, ast.root(), None).unwrap();
            let m = ast.node_count();
            assert!(a.state_count() <= 2 * m, "{pat}: {} states", a.state_count());
            assert!(a.transitions().len() <= 4 * m, "{pat}");
        }
    }

    #[test]
    fn rejects_extended_nodes() {
        let ast = parse("a&b").unwrap();
        assert!(build_tnfa(&ast, ast.root(), None).is_err());
        // but the designated beta node is fine
        let a = build_tnfa(&ast, ast.root(), Some(ast.root())).unwrap();
        assert!(a.extended().is_some());
        let betas = a
            .transitions()
            .iter()
            .filter(|t| t.2 == Label::Beta)
            .count();
        assert_eq!(betas, 1);
    }

    #[test]
    fn state_set_transition_on_ab() {
        let ast = parse("ab").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        let s0 = a.eps_closure_of(a.theta());
        let s1 = a.state_set_transition(&s0, b'a');
        // after 'a' we sit at the source of the b transition
        let b_src = a
            .transitions()
            .iter()
            .find(|t| t.2 == Label::Char(b'b'))
            .unwrap()
            .0;
        assert!(s1.contains(b_src));
        assert!(!s1.contains(a.phi()));
        let empty = StateSet::new(a.state_count());
        assert!(a.state_set_transition(&empty, b'a').is_empty());
    }

    #[test]
    fn beta_edge_never_crossed() {
        let ast = parse("!(a)b").unwrap();
        // cluster-style automaton: beta in place of the complement node
        let beta = ast
            .node_ids()
            .find(|&v| ast.kind(v).is_extended())
            .unwrap();
        let a = build_tnfa(&ast, ast.root(), Some(beta)).unwrap();
        let (_, phi_prime) = a.extended().unwrap();
        let mut s = a.eps_closure_of(a.theta());
        for &c in b"ab" {
            s = a.state_set_transition(&s, c);
            assert!(!s.contains(phi_prime));
        }
    }

    #[test]
    fn accepts_examples() {
        let ast = parse("(a|b)*").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert!(a.accepts(b"abba"));
        assert!(a.accepts(b""));
        assert!(!a.accepts(b"abc"));

        let ast = parse("a").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert!(!a.accepts(b""));

        let ast = parse("ab(b|c)*").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        assert!(a.accepts(b"abcb"));
    }

    #[test]
    fn eps_closure_idempotent() {
        let ast = parse("((a|())*b)*").unwrap();
        let a = build_tnfa(&ast, ast.root(), None).unwrap();
        let mut s = a.eps_closure_of(a.theta());
        let once = s.clone();
        a.eps_close(&mut s);
        assert_eq!(s, once);
    }
}
