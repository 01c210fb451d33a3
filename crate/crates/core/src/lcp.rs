//! Longest-common-prefix computation straight from a run-length encoded
//! BWT, in `O(n)` time and `O(r)` working space.
//!
//! The key fact: the permuted LCP array (`PLCP[v]` = longest common prefix
//! of the suffix at text position `v` and its lexicographic predecessor)
//! only needs to be *computed* at the `r` irreducible positions — everywhere
//! else it decreases by exactly one per position. So the whole array is
//! determined by `r` values, and any entry is one subtraction away.
//!
//! Computing those `r` values never materializes the text. Two cursors walk
//! a balanced FL move structure instead: a sequential cursor whose position
//! only moves forward over the whole loop, and a seeking cursor that jumps
//! via inverse-suffix-array samples spaced `⌈n/r⌉` apart. Together they stay
//! within `2n` symbol comparisons and `3n + r` FL steps.
//!
//! The full LCP array follows by walking the move structure of φ once in
//! descending lexicographic order, converting each visited text position to
//! its PLCP value with one lookup. Values stream out through a sink, so the
//! computation itself stays in `O(r)` space; only callers that want the
//! whole array in memory pay `O(n)`.

use std::io::{self, Read, Write};

use crate::balance::{balance, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::intervals::IntervalMap;
use crate::rlbwt::{FlWalk, Rlbwt};
use crate::wire::{put_u64, CountingReader};

/// Tag identifying a serialized LCP array.
/// Magic prefix identifying the binary LCP array format.
pub const MAGIC: &[u8; 8] = b"LCPA0001";

/// PLCP values at the irreducible positions, with `O(log r)` random access
/// to any position's value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreduciblePlcp {
    /// Irreducible positions, strictly increasing, starting at 0.
    positions: Vec<u64>,
    /// PLCP value at each irreducible position.
    values: Vec<u64>,
    n: u64,
}

impl IrreduciblePlcp {
    /// The irreducible positions (one per BWT run, ascending).
    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    /// PLCP values aligned with [`IrreduciblePlcp::positions`].
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Text length.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// PLCP at an arbitrary position: the value at the nearest irreducible
    /// position at or before `v`, minus the distance to it.
    pub fn value_at(&self, v: u64) -> Result<u64> {
        if v >= self.n {
            return Err(Error::Range {
                index: v,
                bound: self.n,
            });
        }
        let m = self.positions.partition_point(|&p| p <= v) - 1;
        Ok(self.values[m] - (v - self.positions[m]))
    }
}

/// Work counters for one irreducible-PLCP computation.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlcpStats {
    /// Symbol comparisons performed (each ends one match or one mismatch).
    pub comparisons: u64,
    /// Move queries taken by both text cursors, seeks included.
    pub fl_steps: u64,
}

/// A position in the text, readable and steppable through the balanced FL
/// structure: `symbol()` is `T[pos]`, `step()` moves to `pos + 1`.
struct Cursor<'a> {
    walk: &'a FlWalk,
    pos: u64,
    row: u64,
    rank: usize,
}

impl<'a> Cursor<'a> {
    fn at_text_start(walk: &'a FlWalk) -> Cursor<'a> {
        let (row, rank) = walk.start;
        Cursor {
            walk,
            pos: 0,
            row,
            rank,
        }
    }

    /// Jumps to `pos` via the nearest inverse-suffix-array sample at or
    /// before it (at most `⌈n/r⌉ − 1` steps away).
    fn seek(walk: &'a FlWalk, pos: u64, steps: &mut u64) -> Cursor<'a> {
        let si = (pos / walk.sample_step) as usize;
        let (row, rank) = walk.samples[si];
        let mut c = Cursor {
            walk,
            pos: si as u64 * walk.sample_step,
            row,
            rank,
        };
        c.advance_to(pos, steps);
        c
    }

    fn symbol(&self) -> u8 {
        self.walk.symbols[self.rank]
    }

    fn step(&mut self, steps: &mut u64) {
        let (row, rank) = self.walk.fl.move_query(self.row, self.rank);
        self.row = row;
        self.rank = rank;
        self.pos += 1;
        *steps += 1;
    }

    fn advance_to(&mut self, pos: u64, steps: &mut u64) {
        debug_assert!(pos >= self.pos, "cursor only moves forward");
        while self.pos < pos {
            self.step(steps);
        }
    }
}

/// The comparison loop: PLCP values at all irreducible positions, in order.
///
/// Successive values can drop by at most the gap between the positions, so
/// each round starts from the previous length minus the gap and extends by
/// direct symbol comparison. The sequential cursor serves `T[i + ℓ]` (that
/// index never decreases across rounds); a fresh seek serves `T[φ(i) + ℓ]`.
fn plcp_values(walk: &FlWalk, stats: &mut PlcpStats) -> Vec<u64> {
    let r = walk.irreducible.len();
    let mut values = Vec::with_capacity(r);
    let mut seq = Cursor::at_text_start(walk);
    let mut ell: u64 = 0;
    for m in 0..r {
        let i = walk.irreducible[m];
        if m > 0 {
            ell = ell.saturating_sub(i - walk.irreducible[m - 1]);
        }
        let j = walk.phi_images[m];
        if i == j {
            // Only in the degenerate single-suffix text.
            values.push(0);
            ell = 0;
            continue;
        }
        seq.advance_to(i + ell, &mut stats.fl_steps);
        let mut other = Cursor::seek(walk, j + ell, &mut stats.fl_steps);
        loop {
            stats.comparisons += 1;
            if seq.symbol() != other.symbol() {
                break;
            }
            ell += 1;
            seq.step(&mut stats.fl_steps);
            other.step(&mut stats.fl_steps);
        }
        values.push(ell);
    }
    values
}

/// Computes the PLCP values at all irreducible positions.
pub fn irreducible_plcp(rlbwt: &Rlbwt) -> Result<IrreduciblePlcp> {
    Ok(irreducible_plcp_with_stats(rlbwt, DEFAULT_ALPHA)?.0)
}

/// [`irreducible_plcp`] with an explicit balancing parameter and the work
/// counters of the run.
pub fn irreducible_plcp_with_stats(
    rlbwt: &Rlbwt,
    alpha: u64,
) -> Result<(IrreduciblePlcp, PlcpStats)> {
    let walk = rlbwt.fl_walk(alpha)?;
    let mut stats = PlcpStats::default();
    let values = plcp_values(&walk, &mut stats);
    Ok((
        IrreduciblePlcp {
            positions: walk.irreducible,
            values,
            n: rlbwt.n(),
        },
        stats,
    ))
}

/// Streams the LCP array of the encoded text in **descending** lexicographic
/// order: the sink receives `(lex_index, lcp_value)` for `lex_index = n−1`
/// down to `0`, one pair per suffix.
///
/// Descending order is what a single φ walk yields — φ steps from each
/// suffix to its lexicographic predecessor — and it keeps the working space
/// at `O(r)`. Callers wanting ascending output buffer the pairs (see
/// [`lcp_array`]).
///
/// A sink failure aborts the walk with [`Error::Sink`], reporting how many
/// values had already been delivered.
pub fn lcp_stream<F>(rlbwt: &Rlbwt, mut sink: F) -> Result<()>
where
    F: FnMut(u64, u64) -> io::Result<()>,
{
    let n = rlbwt.n();
    let walk = rlbwt.fl_walk(DEFAULT_ALPHA)?;
    let mut stats = PlcpStats::default();
    let values = plcp_values(&walk, &mut stats);

    // Move structure of φ, built from the walk's byproducts.
    let mut p = walk.irreducible.clone();
    p.push(n);
    let phi_map = IntervalMap::new(n, p, walk.phi_images.clone(), walk.phi_tau.clone())?;
    let phi = balance(&phi_map, DEFAULT_ALPHA)?.extract_forward();

    // Each balanced φ interval lies inside one irreducible block, so the
    // block index can be attached to the interval once, up front.
    let irr = &walk.irreducible;
    let mut irank = Vec::with_capacity(phi.r());
    let mut m = 0usize;
    for j in 0..phi.r() {
        while m + 1 < irr.len() && irr[m + 1] <= phi.starts()[j] {
            m += 1;
        }
        irank.push(m);
    }

    // Walk suffixes from lexicographically largest to smallest. The largest
    // suffix's position fell out of the text walk.
    let mut v = walk.sa_last;
    let mut rank = phi.locate(v)?;
    for lex in (0..n).rev() {
        let b = irank[rank];
        let value = values[b] - (v - irr[b]);
        sink(lex, value).map_err(|e| Error::Sink {
            delivered: n - 1 - lex,
            source: e,
        })?;
        if lex > 0 {
            let (v2, r2) = phi.move_query(v, rank);
            v = v2;
            rank = r2;
        }
    }
    Ok(())
}

/// The full LCP array in ascending lexicographic order (`LCP[0] = 0`).
/// Buffers all `n` values; use [`lcp_stream`] to stay in `O(r)` space.
pub fn lcp_array(rlbwt: &Rlbwt) -> Result<Vec<u64>> {
    let mut out = vec![0u64; rlbwt.n() as usize];
    lcp_stream(rlbwt, |lex, value| {
        out[lex as usize] = value;
        Ok(())
    })?;
    Ok(out)
}

/// Writes an LCP array in the `LCPA0001` byte format.
pub fn write_lcp_binary<W: Write>(w: &mut W, values: &[u64]) -> Result<()> {
    w.write_all(MAGIC)?;
    put_u64(w, values.len() as u64)?;
    for &v in values {
        put_u64(w, v)?;
    }
    Ok(())
}

/// Reads an LCP array from the `LCPA0001` byte format.
pub fn read_lcp_binary<R: Read>(r: R) -> Result<Vec<u64>> {
    let mut cr = CountingReader::new(r);
    cr.magic(MAGIC)?;
    let count = cr.u64()?;
    let mut values = Vec::new();
    for _ in 0..count {
        values.push(cr.u64()?);
    }
    cr.expect_end()?;
    Ok(values)
}
