//! Seeded random instance generation for tests and the benchmark
//! harness, plus fixed pattern shapes for space-profile checks.

use crate::syntax::{Ast, AstBuilder, NodeId};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct GenParams {
    /// Approximate parse-tree node budget.
    pub node_budget: usize,
    /// Exact number of extended operators to place.
    pub extended_ops: usize,
    pub alphabet: Vec<u8>,
    /// Relative weight of star nodes among the plain operators.
    pub star_weight: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            node_budget: 20,
            extended_ops: 2,
            alphabet: b"ab".to_vec(),
            star_weight: 2,
        }
    }
}

/// Random extended regular expression with `extended_ops` intersection or
/// complement nodes and roughly `node_budget` nodes.
pub fn random_ast(rng: &mut impl Rng, params: &GenParams) -> Ast {
    let mut b = AstBuilder::new();
    let root = gen_node(rng, params, &mut b, params.node_budget.max(1), params.extended_ops);
    b.finish(root)
}

fn gen_node(
    rng: &mut impl Rng,
    params: &GenParams,
    b: &mut AstBuilder,
    budget: usize,
    k: usize,
) -> NodeId {
    // keep enough budget to host the remaining extended operators
    if budget <= 1 && k == 0 {
        return gen_leaf(rng, params, b);
    }
    let must_extend = budget <= 2 * k + 1;
    if k > 0 && (must_extend || rng.gen_bool(0.35)) {
        if rng.gen_bool(0.5) || budget < 3 {
            let child = gen_node(rng, params, b, budget.saturating_sub(1).max(1), k - 1);
            return b.complement(child);
        }
        let (lb, lk, rb, rk) = split(rng, budget - 1, k - 1);
        let l = gen_node(rng, params, b, lb, lk);
        let r = gen_node(rng, params, b, rb, rk);
        return b.intersect(l, r);
    }
    let star_w = params.star_weight;
    let choice = rng.gen_range(0..(6 + star_w));
    match choice {
        0 | 1 | 2 => {
            let (lb, lk, rb, rk) = split(rng, budget - 1, k);
            let l = gen_node(rng, params, b, lb, lk);
            let r = gen_node(rng, params, b, rb, rk);
            b.concat(l, r)
        }
        3 | 4 => {
            let (lb, lk, rb, rk) = split(rng, budget - 1, k);
            let l = gen_node(rng, params, b, lb, lk);
            let r = gen_node(rng, params, b, rb, rk);
            b.union(l, r)
        }
        5 => {
            if k > 0 {
                let child = gen_node(rng, params, b, budget.saturating_sub(1).max(1), k);
                b.star(child)
            } else {
                gen_leaf(rng, params, b)
            }
        }
        _ => {
            let child = gen_node(rng, params, b, budget.saturating_sub(1).max(1), k);
            b.star(child)
        }
    }
}

fn split(rng: &mut impl Rng, budget: usize, k: usize) -> (usize, usize, usize, usize) {
    let budget = budget.max(2);
    let lb = rng.gen_range(1..budget);
    let rb = budget - lb;
    // distribute the extended quota so each side can host its share
    let mut lk = 0;
    for _ in 0..k {
        if rng.gen_bool(0.5) {
            lk += 1;
        }
    }
    let lk = lk.min(lb.saturating_sub(1) / 2 + 1).min(k);
    let rk = (k - lk).min(rb.saturating_sub(1) / 2 + 1);
    let lk = k - rk; // give any remainder back to the left
    (lb.max(2 * lk), lk, rb.max(2 * rk), rk)
}

fn gen_leaf(rng: &mut impl Rng, params: &GenParams, b: &mut AstBuilder) -> NodeId {
    if rng.gen_bool(0.08) {
        b.epsilon()
    } else {
        let c = params.alphabet[rng.gen_range(0..params.alphabet.len())];
        b.char(c)
    }
}

/// Random query string over the alphabet.
pub fn random_query(rng: &mut impl Rng, alphabet: &[u8], n: usize) -> Vec<u8> {
    (0..n)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect()
}

/// `!!!...!a` with `k` nested complements: the macro tree is a path of
/// `k + 1` clusters.
pub fn chain_complements(k: usize) -> String {
    format!("{}a", "!".repeat(k))
}

/// A perfectly balanced tree of intersections over single-character
/// leaves, `2^depth` leaves in total.
pub fn balanced_intersects(depth: usize) -> String {
    fn rec(depth: usize, next: &mut u8) -> String {
        if depth == 0 {
            let c = *next;
            *next = if c == b'b' { b'a' } else { b'b' };
            return (c as char).to_string();
        }
        let l = rec(depth - 1, next);
        let r = rec(depth - 1, next);
        format!("({l}&{r})")
    }
    let mut next = b'a';
    rec(depth, &mut next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_hits_requested_extended_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=4 {
            for _ in 0..50 {
                let params = GenParams {
                    node_budget: 25,
                    extended_ops: k,
                    ..Default::default()
                };
                let ast = random_ast(&mut rng, &params);
                ast.validate().unwrap();
                assert_eq!(ast.count_extended(), k);
            }
        }
    }

    #[test]
    fn generator_is_seed_deterministic() {
        let params = GenParams::default();
        let a = random_ast(&mut ChaCha8Rng::seed_from_u64(42), &params);
        let b = random_ast(&mut ChaCha8Rng::seed_from_u64(42), &params);
        assert!(crate::syntax::structural_eq(&a, &b));
    }

    #[test]
    fn shapes_parse() {
        let ast = crate::syntax::parse(&chain_complements(32)).unwrap();
        assert_eq!(ast.count_extended(), 32);
        let ast = crate::syntax::parse(&balanced_intersects(3)).unwrap();
        assert_eq!(ast.count_extended(), 7);
    }
}
