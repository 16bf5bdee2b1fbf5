//! Brute-force ground truth by finite language enumeration.
//!
//! Computes L(R) ∩ Σ^{≤L} directly from the language semantics. Complement
//! is taken against the full universe Σ^{≤L}, star as a least fixed point.
//! Everything here is desk-scale only and guarded by a feasibility cap.

use crate::matchgraph::MatchGraph;
use crate::syntax::{Alphabet, Ast, AstKind, NodeId};
use std::collections::HashSet;
use std::fmt;

/// `L(R) ∩ Σ^{≤ max_len}`, bucketed by string length.
#[derive(Debug, Clone)]
pub struct LanguageSlice {
    max_len: usize,
    buckets: Vec<HashSet<Vec<u8>>>,
}

impl LanguageSlice {
    fn empty(max_len: usize) -> Self {
        LanguageSlice {
            max_len,
            buckets: vec![HashSet::new(); max_len + 1],
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn contains(&self, s: &[u8]) -> bool {
        s.len() <= self.max_len && self.buckets[s.len()].contains(s)
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.iter().all(|b| b.is_empty())
    }

    pub fn members(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.buckets.iter().flatten()
    }

    fn insert(&mut self, s: Vec<u8>) {
        debug_assert!(s.len() <= self.max_len);
        self.buckets[s.len()].insert(s);
    }

    fn union_with(&mut self, other: &LanguageSlice) -> bool {
        let mut grew = false;
        for (mine, theirs) in self.buckets.iter_mut().zip(&other.buckets) {
            for s in theirs {
                grew |= mine.insert(s.clone());
            }
        }
        grew
    }
}

impl PartialEq for LanguageSlice {
    fn eq(&self, other: &Self) -> bool {
        self.max_len == other.max_len && self.buckets == other.buckets
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapExceeded {
    pub needed: u128,
    pub cap: u64,
}

impl fmt::Display for CapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "enumeration needs ~{} strings, over the feasibility cap {} \
             (set XREGEX_FEASIBILITY_CAP to raise)",
            self.needed, self.cap
        )
    }
}

impl std::error::Error for CapExceeded {}

/// Default feasibility cap, overridable via `XREGEX_FEASIBILITY_CAP`.
pub fn default_cap() -> u64 {
    std::env::var("XREGEX_FEASIBILITY_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(200_000)
}

fn check_cap(alphabet: &Alphabet, max_len: usize, cap: u64) -> Result<(), CapExceeded> {
    let mut needed: u128 = 1;
    for _ in 0..=max_len {
        needed = needed.saturating_mul(alphabet.len().max(1) as u128);
        if needed > cap as u128 {
            return Err(CapExceeded { needed, cap });
        }
    }
    Ok(())
}

fn universe(alphabet: &Alphabet, max_len: usize) -> LanguageSlice {
    let mut slice = LanguageSlice::empty(max_len);
    slice.insert(Vec::new());
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in alphabet.symbols() {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        for s in &next {
            slice.insert(s.clone());
        }
        frontier = next;
    }
    slice
}

fn concat_slices(a: &LanguageSlice, b: &LanguageSlice, max_len: usize) -> LanguageSlice {
    let mut out = LanguageSlice::empty(max_len);
    for la in 0..=max_len {
        for lb in 0..=(max_len - la) {
            for x in &a.buckets[la] {
                for y in &b.buckets[lb] {
                    let mut s = x.clone();
                    s.extend_from_slice(y);
                    out.insert(s);
                }
            }
        }
    }
    out
}

/// Enumerates `L(R(v)) ∩ Σ^{≤ max_len}` recursively.
pub fn enumerate_language(
    ast: &Ast,
    alphabet: &Alphabet,
    max_len: usize,
    cap: u64,
) -> Result<LanguageSlice, CapExceeded> {
    check_cap(alphabet, max_len, cap)?;
    Ok(enumerate_node(ast, ast.root(), alphabet, max_len))
}

fn enumerate_node(ast: &Ast, v: NodeId, alphabet: &Alphabet, max_len: usize) -> LanguageSlice {
    match ast.kind(v) {
        AstKind::Char(c) => {
            let mut s = LanguageSlice::empty(max_len);
            if max_len >= 1 {
                s.insert(vec![c]);
            }
            s
        }
        AstKind::Epsilon => {
            let mut s = LanguageSlice::empty(max_len);
            s.insert(Vec::new());
            s
        }
        AstKind::Concat(l, r) => {
            let a = enumerate_node(ast, l, alphabet, max_len);
            let b = enumerate_node(ast, r, alphabet, max_len);
            concat_slices(&a, &b, max_len)
        }
        AstKind::Union(l, r) => {
            let mut a = enumerate_node(ast, l, alphabet, max_len);
            let b = enumerate_node(ast, r, alphabet, max_len);
            a.union_with(&b);
            a
        }
        AstKind::Intersect(l, r) => {
            let a = enumerate_node(ast, l, alphabet, max_len);
            let b = enumerate_node(ast, r, alphabet, max_len);
            let mut out = LanguageSlice::empty(max_len);
            for s in a.members() {
                if b.contains(s) {
                    out.insert(s.clone());
                }
            }
            out
        }
        AstKind::Complement(c) => {
            let inner = enumerate_node(ast, c, alphabet, max_len);
            let mut out = LanguageSlice::empty(max_len);
            for s in universe(alphabet, max_len).members() {
                if !inner.contains(s) {
                    out.insert(s.clone());
                }
            }
            out
        }
        AstKind::Star(c) => {
            let base = enumerate_node(ast, c, alphabet, max_len);
            let mut out = LanguageSlice::empty(max_len);
            out.insert(Vec::new());
            loop {
                let next = concat_slices(&out, &base, max_len);
                if !out.union_with(&next) {
                    break;
                }
            }
            out
        }
    }
}

/// Edge `(i, j)` iff the substring `q[i..j]` is in the enumerated language.
pub fn oracle_match_graph(
    ast: &Ast,
    q: &[u8],
    alphabet: &Alphabet,
    cap: u64,
) -> Result<MatchGraph, CapExceeded> {
    let n = q.len();
    let slice = enumerate_language(ast, alphabet, n, cap)?;
    let mut g = MatchGraph::new(n);
    for i in 0..=n {
        for j in i..=n {
            if slice.contains(&q[i..j]) {
                g.set(i, j);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn alpha(s: &str) -> Alphabet {
        Alphabet::from_bytes(s.as_bytes())
    }

    #[test]
    fn enumerates_all_strings() {
        let ast = parse("(a|b)*").unwrap();
        let slice = enumerate_language(&ast, &alpha("ab"), 2, default_cap()).unwrap();
        let mut got: Vec<Vec<u8>> = slice.members().cloned().collect();
        got.sort();
        let want: Vec<Vec<u8>> = ["", "a", "aa", "ab", "b", "ba", "bb"]
            .iter()
            .map(|s| s.as_bytes().to_vec())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn complement_of_ab_star() {
        let ast = parse("!((a|b)*)").unwrap();
        let slice = enumerate_language(&ast, &alpha("abc"), 1, default_cap()).unwrap();
        let got: Vec<Vec<u8>> = slice.members().cloned().collect();
        assert_eq!(got, vec![b"c".to_vec()]);
    }

    #[test]
    fn running_example_contains_abcb() {
        let ast = parse("(!((a|b)*)b)&(ab(b|c)*)").unwrap();
        let slice = enumerate_language(&ast, &alpha("abc"), 4, default_cap()).unwrap();
        assert!(slice.contains(b"abcb"));
        assert!(!slice.contains(b""));
        assert!(!slice.contains(b"abbb"));
    }

    #[test]
    fn oracle_graph_running_example() {
        let ast = parse("(!((a|b)*)b)&(ab(b|c)*)").unwrap();
        let q = b"cabbabcb";
        let alphabet = Alphabet::from_pattern_and_query(&ast, q);
        let g = oracle_match_graph(&ast, q, &alphabet, default_cap()).unwrap();
        assert_eq!(g.edges(), vec![(4, 8)]);
    }

    #[test]
    fn epsilon_pattern_graph() {
        let ast = parse("()").unwrap();
        let g = oracle_match_graph(&ast, b"abc", &alpha("abc"), default_cap()).unwrap();
        assert_eq!(g, MatchGraph::from_epsilon(3));
    }

    #[test]
    fn star_fixed_point_stable() {
        let ast = parse("(ab)*").unwrap();
        let slice = enumerate_language(&ast, &alpha("ab"), 6, default_cap()).unwrap();
        let again = concat_slices(&slice, &slice, 6);
        for s in again.members() {
            assert!(slice.contains(s), "{s:?} escaped the fixed point");
        }
    }

    #[test]
    fn slice_complement_involution() {
        let ast = parse("!(!(a|bb))").unwrap();
        let inner = parse("a|bb").unwrap();
        let a = alpha("ab");
        assert_eq!(
            enumerate_language(&ast, &a, 3, default_cap()).unwrap(),
            enumerate_language(&inner, &a, 3, default_cap()).unwrap()
        );
    }

    #[test]
    fn cap_enforced() {
        let ast = parse("(a|b)*").unwrap();
        assert!(enumerate_language(&ast, &alpha("abcdefgh"), 10, 1000).is_err());
    }
}
