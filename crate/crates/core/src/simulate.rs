//! Black-box TNFA simulation and match-graph construction from TNFAs.
//!
//! A simulator reports, for a state pair `(s, t)` and a string, every
//! prefix length `i` such that some path from `s` to `t` matches the
//! length-`i` prefix. The suffix loop that turns prefix reports into a
//! match graph lives in [`build_match_graph`], so simulators stay
//! oblivious to match graphs. Word-parallel simulators plug in behind
//! the same trait.

use crate::matchgraph::MatchGraph;
use crate::tnfa::{Label, Tnfa};

/// Cost metadata reported alongside results; never affects output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimCost {
    /// Characters consumed across state-set transitions.
    pub char_steps: u64,
}

impl SimCost {
    pub fn add(&mut self, other: SimCost) {
        self.char_steps += other.char_steps;
    }
}

/// Output of one simulation run: bit `i` set iff the length-`i` prefix
/// of the input matches a path from `s` to `t`.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub prefixes: Vec<bool>,
    pub cost: SimCost,
}

pub trait TnfaSimulator {
    fn name(&self) -> &'static str;

    /// Prefix report for paths from `s` to `t` over `q`. Bit 0 is set iff
    /// `t` is ε-reachable from `s` (including `s = t`). β transitions are
    /// never traversed.
    fn run(&self, a: &Tnfa, s: usize, t: usize, q: &[u8]) -> SimRun;
}

/// Thompson's algorithm: one state-set transition per character,
/// `t(n, m) = O(nm)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThompsonSimulator;

impl TnfaSimulator for ThompsonSimulator {
    fn name(&self) -> &'static str {
        "thompson"
    }

    fn run(&self, a: &Tnfa, s: usize, t: usize, q: &[u8]) -> SimRun {
        let mut prefixes = Vec::with_capacity(q.len() + 1);
        let mut set = a.eps_closure_of(s);
        prefixes.push(set.contains(t));
        let mut cost = SimCost::default();
        for &c in q {
            set = a.state_set_transition(&set, c);
            cost.char_steps += 1;
            prefixes.push(set.contains(t));
        }
        SimRun { prefixes, cost }
    }
}

/// Deliberately naive cross-check simulator: computes reachability over
/// (prefix position, state) pairs by fixpoint relaxation of every
/// transition. Independent of the state-set machinery.
#[derive(Debug, Clone, Copy, Default)]
pub struct RelaxationSimulator;

impl TnfaSimulator for RelaxationSimulator {
    fn name(&self) -> &'static str {
        "relaxation"
    }

    fn run(&self, a: &Tnfa, s: usize, t: usize, q: &[u8]) -> SimRun {
        let n = q.len();
        let states = a.state_count();
        let mut reach = vec![false; (n + 1) * states];
        reach[s] = true;
        let mut cost = SimCost::default();
        let mut changed = true;
        while changed {
            changed = false;
            for &(from, to, label) in a.transitions() {
                for pos in 0..=n {
                    if !reach[pos * states + from] {
                        continue;
                    }
                    match label {
                        Label::Eps => {
                            if !reach[pos * states + to] {
                                reach[pos * states + to] = true;
                                changed = true;
                            }
                        }
                        Label::Char(c) => {
                            if pos < n && q[pos] == c && !reach[(pos + 1) * states + to] {
                                reach[(pos + 1) * states + to] = true;
                                cost.char_steps += 1;
                                changed = true;
                            }
                        }
                        Label::Beta => {}
                    }
                }
            }
        }
        SimRun {
            prefixes: (0..=n).map(|pos| reach[pos * states + t]).collect(),
            cost,
        }
    }
}

pub fn simulator_by_name(name: &str) -> Option<Box<dyn TnfaSimulator>> {
    match name {
        "thompson" => Some(Box::new(ThompsonSimulator)),
        "relaxation" => Some(Box::new(RelaxationSimulator)),
        _ => None,
    }
}

/// Match graph `G(A, s, t)`: edge `(i, j)` iff some path from `s` to `t`
/// matches `q[i..j]`. One simulator run per suffix, `n + 1` in total.
pub fn build_match_graph(
    a: &Tnfa,
    s: usize,
    t: usize,
    q: &[u8],
    sim: &dyn TnfaSimulator,
) -> (MatchGraph, SimCost) {
    let n = q.len();
    let mut g = MatchGraph::new(n);
    let mut cost = SimCost::default();
    for i in 0..=n {
        let run = sim.run(a, s, t, &q[i..]);
        cost.add(run.cost);
        for (j, &hit) in run.prefixes.iter().enumerate() {
            if hit {
                g.set(i, i + j);
            }
        }
    }
    (g, cost)
}
