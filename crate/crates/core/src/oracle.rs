//! Brute-force reference implementations and randomized input generators.
//!
//! Everything here exists to referee the real implementations in tests: the
//! functions favour obviousness over speed and share no code with the
//! structures they check. None of this module belongs in production call
//! paths — costs are quadratic-ish and inputs are capped at desk scale.

use crate::error::{Error, Result};
use crate::intervals::IntervalMap;
use crate::rlbwt::Rlbwt;

/// Upper bound on oracle text length; beyond this the naive suffix sort is
/// too slow to be useful as a referee.
pub const MAX_ORACLE_TEXT: usize = 100_000;

/// Every classical suffix structure of a small text, computed naively.
#[derive(Debug, Clone)]
pub struct SuffixOracle {
    /// The text, terminator included.
    pub text: Vec<u8>,
    /// Suffix array: `sa[i]` = start of the i-th smallest suffix.
    pub sa: Vec<u64>,
    /// Inverse suffix array: `isa[sa[i]] = i`.
    pub isa: Vec<u64>,
    /// Burrows-Wheeler transform, `bwt[i] = text[(sa[i] + n - 1) mod n]`.
    pub bwt: Vec<u8>,
    /// Run-length encoding of `bwt`.
    pub rlbwt: Rlbwt,
    /// LCP array: `lcp[0] = 0`, `lcp[i]` = longest common prefix of the
    /// suffixes at ranks `i - 1` and `i`.
    pub lcp: Vec<u64>,
    /// Permuted LCP array: `plcp[sa[i]] = lcp[i]`.
    pub plcp: Vec<u64>,
}

/// Computes every suffix structure of `text` by comparison sorting.
///
/// The final byte must be a terminator: strictly smaller than every other
/// symbol and unique in the text.
///
/// # Errors
///
/// [`Error::Parameter`] when the text is empty, exceeds
/// [`MAX_ORACLE_TEXT`], or its final byte is not a unique minimum.
pub fn naive_suffix_structures(text: &[u8]) -> Result<SuffixOracle> {
    if text.is_empty() {
        return Err(Error::parameter("oracle text must be non-empty"));
    }
    if text.len() > MAX_ORACLE_TEXT {
        return Err(Error::parameter(format!(
            "oracle text of {} bytes exceeds the {MAX_ORACLE_TEXT}-byte cap",
            text.len()
        )));
    }
    let n = text.len();
    let term = text[n - 1];
    if text[..n - 1].iter().any(|&b| b <= term) {
        return Err(Error::parameter(
            "final byte must be a unique, strictly smallest terminator",
        ));
    }

    let mut sa: Vec<u64> = (0..n as u64).collect();
    sa.sort_unstable_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));

    let mut isa = vec![0u64; n];
    for (i, &s) in sa.iter().enumerate() {
        isa[s as usize] = i as u64;
    }

    let bwt: Vec<u8> = sa
        .iter()
        .map(|&s| text[(s as usize + n - 1) % n])
        .collect();

    let mut runs: Vec<(u8, u64)> = Vec::new();
    for &b in &bwt {
        match runs.last_mut() {
            Some((sym, len)) if *sym == b => *len += 1,
            _ => runs.push((b, 1)),
        }
    }
    let rlbwt = Rlbwt::new(runs)?;

    let mut lcp = vec![0u64; n];
    for i in 1..n {
        lcp[i] = common_prefix(&text[sa[i - 1] as usize..], &text[sa[i] as usize..]);
    }
    let mut plcp = vec![0u64; n];
    for i in 0..n {
        plcp[sa[i] as usize] = lcp[i];
    }

    Ok(SuffixOracle {
        text: text.to_vec(),
        sa,
        isa,
        bwt,
        rlbwt,
        lcp,
        plcp,
    })
}

/// Length of the longest common prefix of two byte slices.
pub fn common_prefix(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).take_while(|(x, y)| x == y).count() as u64
}

/// One piece of a runny permutation: the input range `[p_start, p_start+len)`
/// maps rigidly onto the output range `[q_start, q_start+len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub p_start: u64,
    pub q_start: u64,
    pub len: u64,
}

/// Result of [`naive_balance`]: the refined piece decomposition plus both
/// sorted boundary sets (sentinels included).
#[derive(Debug, Clone)]
pub struct NaiveBalanced {
    /// Pieces sorted by input start.
    pub pieces: Vec<Piece>,
    /// Sorted input starts with sentinel n.
    pub p: Vec<u64>,
    /// Sorted output starts with sentinel n.
    pub q: Vec<u64>,
}

/// Balances an interval map by repeated full-scan splitting.
///
/// While any interval (in either direction) has at least `2 * alpha`
/// opposite-side starts strictly inside it, the gap is split at the
/// (α+1)-largest contained start, the split is mirrored onto the paired
/// interval, and the scan restarts. No ordering strategy, no pointer
/// machinery — this is the referee for the linear-time balancer, so its only
/// virtue is transparency.
///
/// # Panics
///
/// Panics if the number of splits exceeds a generous safety budget, which
/// would indicate the splitting rule itself is wrong.
pub fn naive_balance(map: &IntervalMap, alpha: u64) -> NaiveBalanced {
    assert!(alpha >= 2, "alpha must be at least 2");
    let n = map.n();
    let mut pieces: Vec<Piece> = (0..map.r())
        .map(|j| Piece {
            p_start: map.p()[j],
            q_start: map.p_pi()[j],
            len: map.p()[j + 1] - map.p()[j],
        })
        .collect();

    // Each split must make progress; (alpha+1)/(alpha-1) * r is the expected
    // ceiling, so 4r + 64 splits is comfortably beyond any legal outcome.
    let budget = 4 * map.r() + 64;
    let mut splits = 0usize;

    loop {
        let p_starts: Vec<u64> = collect_sorted(pieces.iter().map(|t| t.p_start));
        let q_starts: Vec<u64> = collect_sorted(pieces.iter().map(|t| t.q_start));

        // Heavy output gap: too many input starts strictly inside it.
        let heavy_output = pieces.iter().enumerate().find_map(|(idx, t)| {
            let inside = strictly_inside(&p_starts, t.q_start, t.q_start + t.len);
            (inside.len() as u64 >= 2 * alpha)
                .then(|| (idx, inside[inside.len() - 1 - alpha as usize]))
        });
        if let Some((idx, x)) = heavy_output {
            let t = pieces[idx];
            let off = x - t.q_start;
            pieces[idx].len = off;
            pieces.push(Piece {
                p_start: t.p_start + off,
                q_start: x,
                len: t.len - off,
            });
        } else {
            // Heavy input gap: too many output starts strictly inside it.
            let heavy_input = pieces.iter().enumerate().find_map(|(idx, t)| {
                let inside = strictly_inside(&q_starts, t.p_start, t.p_start + t.len);
                (inside.len() as u64 >= 2 * alpha)
                    .then(|| (idx, inside[inside.len() - 1 - alpha as usize]))
            });
            match heavy_input {
                Some((idx, x)) => {
                    let t = pieces[idx];
                    let off = x - t.p_start;
                    pieces[idx].len = off;
                    pieces.push(Piece {
                        p_start: x,
                        q_start: t.q_start + off,
                        len: t.len - off,
                    });
                }
                None => break,
            }
        }
        splits += 1;
        assert!(splits <= budget, "naive balance exceeded its split budget");
    }

    pieces.sort_unstable_by_key(|t| t.p_start);
    let mut p: Vec<u64> = pieces.iter().map(|t| t.p_start).collect();
    let mut q: Vec<u64> = collect_sorted(pieces.iter().map(|t| t.q_start));
    p.push(n);
    q.push(n);
    NaiveBalanced { pieces, p, q }
}

impl NaiveBalanced {
    /// Largest number of opposite-side starts strictly inside any gap, for
    /// both directions: `(max over output gaps, max over input gaps)`.
    pub fn max_gap_weights(&self) -> (usize, usize) {
        let r = self.pieces.len();
        let out_max = (0..r)
            .map(|k| strictly_inside(&self.p[..r], self.q[k], self.q[k + 1]).len())
            .max()
            .unwrap_or(0);
        let in_max = (0..r)
            .map(|j| strictly_inside(&self.q[..r], self.p[j], self.p[j + 1]).len())
            .max()
            .unwrap_or(0);
        (out_max, in_max)
    }

    /// Applies the refined permutation to one position by linear scan.
    pub fn apply(&self, i: u64) -> u64 {
        let t = self
            .pieces
            .iter()
            .find(|t| t.p_start <= i && i < t.p_start + t.len)
            .expect("position inside domain");
        t.q_start + (i - t.p_start)
    }
}

/// Applies an interval map to one position by linear scan and also returns
/// the index of the interval containing the image — the referee for move
/// queries.
pub fn naive_move(map: &IntervalMap, i: u64) -> (u64, usize) {
    let p = map.p();
    let j = (0..map.r())
        .find(|&j| p[j] <= i && i < p[j + 1])
        .expect("position inside domain");
    let image = map.p_pi()[j] + (i - p[j]);
    let j_image = (0..map.r())
        .find(|&j| p[j] <= image && image < p[j + 1])
        .expect("image inside domain");
    (image, j_image)
}

fn collect_sorted(iter: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut v: Vec<u64> = iter.collect();
    v.sort_unstable();
    v
}

/// Values of `sorted` strictly between `lo` and `hi`.
fn strictly_inside(sorted: &[u64], lo: u64, hi: u64) -> &[u64] {
    let a = sorted.partition_point(|&v| v <= lo);
    let b = sorted.partition_point(|&v| v < hi);
    &sorted[a..b]
}

// ---------------------------------------------------------------------------
// Randomized input generators (deterministic under a fixed seed).
// ---------------------------------------------------------------------------

/// Minimal xorshift-style generator so oracle helpers stay usable from any
/// test without pulling crates into the library itself.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Modulo bias is irrelevant at test scale.
        self.next_u64() % bound
    }
}

/// Generates a random runny permutation of `[0, n)` with at most `target_r`
/// intervals (adjacent blocks that stay contiguous merge, so the realized
/// count may be lower).
pub fn random_runny_permutation(rng: &mut SplitMix64, n: u64, target_r: usize) -> Vec<u64> {
    assert!(n >= 1 && target_r >= 1 && target_r as u64 <= n);
    // Choose target_r - 1 distinct interior cut points via partial shuffle.
    let mut interior: Vec<u64> = (1..n).collect();
    for i in 0..(target_r - 1).min(interior.len()) {
        let j = i + rng.below((interior.len() - i) as u64) as usize;
        interior.swap(i, j);
    }
    let mut cuts: Vec<u64> = interior[..(target_r - 1).min(interior.len())].to_vec();
    cuts.push(0);
    cuts.push(n);
    cuts.sort_unstable();

    let mut blocks: Vec<(u64, u64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    for i in (1..blocks.len()).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        blocks.swap(i, j);
    }
    let mut pi = vec![0u64; n as usize];
    let mut out = 0u64;
    for &(s, e) in &blocks {
        for d in 0..(e - s) {
            pi[(s + d) as usize] = out + d;
        }
        out += e - s;
    }
    pi
}

/// Random interval map built from [`random_runny_permutation`].
pub fn random_runny_map(rng: &mut SplitMix64, n: u64, target_r: usize) -> IntervalMap {
    let pi = random_runny_permutation(rng, n, target_r);
    IntervalMap::from_permutation(&pi).expect("generated permutation is valid")
}

/// Random text of `n` bytes over `sigma` symbols, terminator included as the
/// final byte. `sigma` counts only the regular alphabet (the terminator is
/// extra); `n` must be at least 1.
pub fn random_text(rng: &mut SplitMix64, n: usize, sigma: u8) -> Vec<u8> {
    assert!(n >= 1 && sigma >= 1);
    let mut text = Vec::with_capacity(n);
    for _ in 0..n - 1 {
        text.push(b'a' + rng.below(sigma as u64) as u8);
    }
    text.push(b'$');
    text
}
