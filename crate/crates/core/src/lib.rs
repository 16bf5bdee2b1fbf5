//! Matching engine for extended regular expressions — regexes with
//! intersection (`&`) and complement (`!`) — over a single query string.
//!
//! The answer representation is the *match graph*: a bit-packed boolean
//! matrix over `n + 1` positions whose edge `(i, j)` records that
//! `q[i..j]` is in the language of a subexpression. Two engines produce
//! it:
//!
//! - [`classic_dp`]: a bottom-up dynamic program computing one graph per
//!   parse-tree node with the match-graph algebra of [`matchgraph`].
//! - [`engine`]: a clustered algorithm that partitions the parse tree
//!   around the extended operators ([`clustering`]), simulates one small
//!   automaton per cluster ([`tnfa`], [`simulate`]), and stitches cluster
//!   graphs together with a constant number of algebra operations each —
//!   so the expensive graph algebra scales with the number of extended
//!   operators, not the whole pattern size. A heavy-path traversal keeps
//!   only logarithmically many cluster graphs live.
//!
//! [`oracle`] provides a brute-force language-enumeration reference used
//! throughout the tests, and [`generator`] builds seeded random
//! instances.

pub mod classic_dp;
pub mod cli;
pub mod clustering;
pub mod engine;
pub mod generator;
pub mod matchgraph;
pub mod oracle;
pub mod simulate;
pub mod syntax;
pub mod tnfa;

pub use classic_dp::{dp_is_match, dp_node_graph};
pub use engine::{clustered_root_graph, match_clustered, SpaceMode};
pub use matchgraph::MatchGraph;
pub use syntax::{parse, render, Ast};
