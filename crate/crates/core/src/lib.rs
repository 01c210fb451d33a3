//! Move structures for runny permutations, and their flagship application:
//! longest-common-prefix arrays computed directly from a run-length encoded
//! Burrows–Wheeler transform in linear time and run-length-bounded space.
//!
//! A permutation π of `[0, n)` is *runny* with `r` intervals when its domain
//! splits into `r` maximal intervals on which π is a mere shift. Such a
//! permutation is fully described by `O(r)` words ([`IntervalMap`]), but
//! evaluating it repeatedly — walking an orbit, which is what BWT-based text
//! indexes do all day — naively costs a search per step. A [`MoveStructure`]
//! removes that search: after [`balance`]-ing the intervals so that no gap
//! on either side contains `2α` or more opposite-side boundaries, each
//! evaluation is an addition plus a short list scan, `O(1)` for constant α.
//! The balancing itself runs in `O(r)` time for both directions
//! simultaneously.
//!
//! On top sit the string applications ([`Rlbwt`], [`irreducible_plcp`],
//! [`lcp_stream`]): from a BWT given as `r` runs, compute the permuted LCP
//! values at all irreducible positions and stream out the full LCP array,
//! in `O(n)` time with `O(r)` working space.
//!
//! The [`oracle`] module holds deliberately naive reference implementations
//! (quadratic suffix sorting, full-scan balancing) that the optimized paths
//! are tested against.

pub mod balance;
pub mod error;
pub mod intervals;
pub mod lcp;
pub mod move_structure;
pub mod oracle;
pub mod rlbwt;
mod wire;

pub use balance::{balance, BalanceStats, BalancedPair, DEFAULT_ALPHA};
pub use error::{Error, Result};
pub use intervals::{invert_tau, IntervalMap, OutputStarts};
pub use lcp::{
    irreducible_plcp, irreducible_plcp_with_stats, lcp_array, lcp_stream, read_lcp_binary,
    write_lcp_binary, IrreduciblePlcp, PlcpStats,
};
pub use move_structure::{MoveStructure, Orbit};
pub use rlbwt::Rlbwt;
