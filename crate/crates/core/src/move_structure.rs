//! Constant-time evaluation of a runny permutation from `O(r)` words.
//!
//! A move structure stores a balanced interval decomposition of π as three
//! flat arrays: interval starts, the image of each start, and the rank of
//! the interval containing that image. A query carries a position together
//! with the rank of its interval, so evaluating π is one addition plus a
//! short forward scan — and balancing guarantees the scan stays below `2α`
//! steps. Repeated application (the whole point: walking an orbit of π)
//! therefore costs `O(1)` per step with no data structure larger than the
//! run count.

use std::io::{Read, Write};

use crate::balance::{balance, MAX_ALPHA};
use crate::error::{Error, Result};
use crate::intervals::IntervalMap;
use crate::wire::{put_u32, put_u64, CountingReader};

/// Tag identifying a serialized move structure.
/// Magic prefix identifying the serialized move-structure format.
pub const MAGIC: &[u8; 8] = b"MVST0001";

/// A balanced move structure for one direction of a runny permutation.
///
/// Build one with [`MoveStructure::build`] (balance and extract in one step)
/// or via [`balance`] directly when both directions are wanted from a single
/// sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveStructure {
    n: u64,
    alpha: u64,
    /// Interval starts, strictly increasing, `p[0] = 0`, plus sentinel `n`.
    p: Vec<u64>,
    /// Image of each interval's start under π.
    p_pi: Vec<u64>,
    /// Rank of the interval containing each image.
    p_rank: Vec<usize>,
}

impl MoveStructure {
    /// Balances `map` with parameter `alpha` and extracts the forward
    /// structure.
    pub fn build(map: &IntervalMap, alpha: u64) -> Result<MoveStructure> {
        Ok(balance(map, alpha)?.extract_forward())
    }

    /// Assembles a structure from raw arrays, checking every invariant.
    pub fn from_parts(
        n: u64,
        alpha: u64,
        p: Vec<u64>,
        p_pi: Vec<u64>,
        p_rank: Vec<usize>,
    ) -> Result<MoveStructure> {
        let ms = MoveStructure {
            n,
            alpha,
            p,
            p_pi,
            p_rank,
        };
        ms.validate()?;
        Ok(ms)
    }

    /// Assembles a structure the caller has already proven consistent
    /// (extraction from a balanced pair).
    pub(crate) fn from_parts_unchecked(
        n: u64,
        alpha: u64,
        p: Vec<u64>,
        p_pi: Vec<u64>,
        p_rank: Vec<usize>,
    ) -> MoveStructure {
        let ms = MoveStructure {
            n,
            alpha,
            p,
            p_pi,
            p_rank,
        };
        debug_assert!(ms.validate().is_ok(), "{:?}", ms.validate());
        ms
    }

    /// Domain size n.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of intervals.
    pub fn r(&self) -> usize {
        self.p_pi.len()
    }

    /// Balancing parameter the structure was built with.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Interval starts, sentinel included (`r + 1` entries).
    pub fn starts(&self) -> &[u64] {
        &self.p
    }

    /// Images of the interval starts (`r` entries).
    pub fn images(&self) -> &[u64] {
        &self.p_pi
    }

    /// Rank of the interval containing each image (`r` entries).
    pub fn image_ranks(&self) -> &[usize] {
        &self.p_rank
    }

    /// Rank of the interval containing position `i`.
    pub fn locate(&self, i: u64) -> Result<usize> {
        if i >= self.n {
            return Err(Error::Range {
                index: i,
                bound: self.n,
            });
        }
        Ok(self.p.partition_point(|&s| s <= i) - 1)
    }

    /// Evaluates π at `i`, carrying the interval rank: maps `(i, j)` with
    /// `i` inside interval `j` to `(π(i), j′)` with `π(i)` inside `j′`.
    ///
    /// The pair contract is the caller's: obtain the initial rank from
    /// [`MoveStructure::locate`] and thread the returned rank into the next
    /// call. Violations are caught by debug assertions only.
    pub fn move_query(&self, i: u64, j: usize) -> (u64, usize) {
        let (img, k, _) = self.move_query_traced(i, j);
        (img, k)
    }

    /// [`MoveStructure::move_query`] plus the number of forward scan steps
    /// taken to re-locate the image (always below `2α` by balance).
    pub fn move_query_traced(&self, i: u64, j: usize) -> (u64, usize, u64) {
        debug_assert!(j < self.r(), "rank {j} out of bounds");
        debug_assert!(
            self.p[j] <= i && i < self.p[j + 1],
            "position {i} not inside interval {j}"
        );
        let img = self.p_pi[j] + (i - self.p[j]);
        let mut k = self.p_rank[j];
        let mut steps = 0u64;
        while self.p[k + 1] <= img {
            k += 1;
            steps += 1;
        }
        (img, k, steps)
    }

    /// Evaluates π at `i` without a carried rank (costs a binary search).
    pub fn apply(&self, i: u64) -> Result<u64> {
        let j = self.locate(i)?;
        Ok(self.move_query(i, j).0)
    }

    /// Lazy orbit of `i` under repeated application of π: yields `i`,
    /// `π(i)`, `π²(i)`, … forever (π is a permutation, so the orbit cycles).
    pub fn orbit(&self, i: u64) -> Result<Orbit<'_>> {
        let j = self.locate(i)?;
        Ok(Orbit {
            ms: self,
            pos: i,
            rank: j,
        })
    }

    /// Diagnostic weight maxima: the largest number of starts falling
    /// strictly inside a gap of the other partition, as
    /// `(input starts per output gap, output starts per input gap)`.
    /// Both stay below `2α` for structures produced by balancing; the first
    /// also bounds the scan inside [`MoveStructure::move_query`].
    pub fn gap_weights(&self) -> (u64, u64) {
        let mut q: Vec<u64> = self.p_pi.clone();
        q.sort_unstable();
        let inner = &self.p[1..self.p.len() - 1];
        let out_max = max_inside(&q, self.n, inner);
        let in_max = max_inside(&self.p[..self.p.len() - 1], self.n, &q[1..]);
        (out_max, in_max)
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("domain must not be empty"));
        }
        if self.alpha < 2 || self.alpha >= MAX_ALPHA {
            return Err(Error::validation(format!(
                "alpha = {} is outside [2, 2^63)",
                self.alpha
            )));
        }
        let r = self.p_pi.len();
        if r == 0 {
            return Err(Error::validation("at least one interval is required"));
        }
        if self.p.len() != r + 1 {
            return Err(Error::validation(format!(
                "starts must have {} entries (r + 1), found {}",
                r + 1,
                self.p.len()
            )));
        }
        if self.p_rank.len() != r {
            return Err(Error::validation(format!(
                "image ranks must have {r} entries, found {}",
                self.p_rank.len()
            )));
        }
        if self.p[0] != 0 {
            return Err(Error::validation(format!(
                "p[0] must be 0, found {}",
                self.p[0]
            )));
        }
        for j in 0..r {
            if self.p[j] >= self.p[j + 1] {
                return Err(Error::validation(format!(
                    "starts must increase strictly: p[{j}] = {} but p[{}] = {}",
                    self.p[j],
                    j + 1,
                    self.p[j + 1]
                )));
            }
        }
        if self.p[r] != self.n {
            return Err(Error::validation(format!(
                "sentinel start must equal n = {}, found {}",
                self.n,
                self.p[r]
            )));
        }
        // Images must tile [0, n): sorted by value, lengths must chain.
        let mut by_image: Vec<usize> = (0..r).collect();
        by_image.sort_unstable_by_key(|&j| self.p_pi[j]);
        let mut expected = 0u64;
        for &j in &by_image {
            if self.p_pi[j] != expected {
                return Err(Error::validation(format!(
                    "images must tile the domain: expected an interval starting \
                     at {expected}, found image {} (interval {j})",
                    self.p_pi[j]
                )));
            }
            expected += self.p[j + 1] - self.p[j];
        }
        if expected != self.n {
            return Err(Error::validation(format!(
                "images cover {expected} positions, domain has {}",
                self.n
            )));
        }
        // Each stored rank must be the exact interval containing the image,
        // and each output interval must contain fewer than 2α starts so
        // query scans stay short.
        for j in 0..r {
            let k = self.p.partition_point(|&s| s <= self.p_pi[j]) - 1;
            if self.p_rank[j] != k {
                return Err(Error::validation(format!(
                    "image rank of interval {j} must be {k}, found {}",
                    self.p_rank[j]
                )));
            }
            let end = self.p_pi[j] + (self.p[j + 1] - self.p[j]);
            let inside = self.p.partition_point(|&s| s < end)
                - self.p.partition_point(|&s| s <= self.p_pi[j]);
            if inside as u64 >= 2 * self.alpha {
                return Err(Error::validation(format!(
                    "balance violated: output interval of {j} contains {inside} \
                     starts, the bound is 2·alpha = {}",
                    2 * self.alpha
                )));
            }
        }
        Ok(())
    }

    /// Serializes to the `MVST0001` byte format.
    ///
    /// The on-disk header stores α in 32 bits; structures built with a
    /// larger (rather impractical) α are rejected here instead of being
    /// silently truncated.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let alpha32 = u32::try_from(self.alpha).map_err(|_| {
            Error::parameter(format!(
                "alpha = {} does not fit the 32-bit header field",
                self.alpha
            ))
        })?;
        w.write_all(MAGIC)?;
        put_u64(w, self.n)?;
        put_u64(w, self.r() as u64)?;
        put_u32(w, alpha32)?;
        put_u32(w, 0)?; // reserved
        for &v in &self.p {
            put_u64(w, v)?;
        }
        for &v in &self.p_pi {
            put_u64(w, v)?;
        }
        for &v in &self.p_rank {
            put_u64(w, v as u64)?;
        }
        Ok(())
    }

    /// Deserializes from the `MVST0001` byte format, re-checking every
    /// invariant ([`MoveStructure::validate`]) so a hostile stream can never
    /// produce a structure that misbehaves later.
    pub fn read_from<R: Read>(r: R) -> Result<MoveStructure> {
        let mut cr = CountingReader::new(r);
        cr.magic(MAGIC)?;
        let n = cr.u64()?;
        if n == 0 {
            return Err(Error::format(8, "domain size must be positive"));
        }
        let at = cr.offset();
        let r_count = cr.u64()?;
        if r_count == 0 || r_count > n {
            return Err(Error::format(
                at,
                format!("interval count {r_count} must be in [1, n] (n = {n})"),
            ));
        }
        let r_count = usize::try_from(r_count)
            .map_err(|_| Error::format(at, "interval count does not fit in memory"))?;
        let alpha = u64::from(cr.u32()?);
        let at = cr.offset();
        if cr.u32()? != 0 {
            return Err(Error::format(at, "reserved field must be zero"));
        }

        let mut p = Vec::new();
        for _ in 0..=r_count {
            p.push(cr.u64()?);
        }
        let mut p_pi = Vec::new();
        for _ in 0..r_count {
            p_pi.push(cr.u64()?);
        }
        let mut p_rank = Vec::new();
        for _ in 0..r_count {
            let at = cr.offset();
            let v = cr.u64()?;
            if v >= r_count as u64 {
                return Err(Error::format(
                    at,
                    format!("image rank {v} out of range (r = {r_count})"),
                ));
            }
            p_rank.push(v as usize);
        }
        cr.expect_end()?;

        let ms = MoveStructure {
            n,
            alpha,
            p,
            p_pi,
            p_rank,
        };
        // Structural violations that survive the positional checks above are
        // attributed to the array region as a whole.
        ms.validate().map_err(|e| match e {
            Error::Validation { what } => Error::format(32, what),
            other => other,
        })?;
        Ok(ms)
    }
}

/// Largest count of `cands` falling strictly inside one gap of the partition
/// whose boundaries are `bounds` (closed by `n`). Both inputs sorted.
fn max_inside(bounds: &[u64], n: u64, cands: &[u64]) -> u64 {
    let mut best = 0u64;
    let mut c = 0usize;
    for k in 0..bounds.len() {
        let lo = bounds[k];
        let hi = if k + 1 < bounds.len() {
            bounds[k + 1]
        } else {
            n
        };
        while c < cands.len() && cands[c] <= lo {
            c += 1;
        }
        let from = c;
        while c < cands.len() && cands[c] < hi {
            c += 1;
        }
        best = best.max((c - from) as u64);
    }
    best
}

/// Infinite iterator over `i, π(i), π²(i), …` (see
/// [`MoveStructure::orbit`]).
pub struct Orbit<'a> {
    ms: &'a MoveStructure,
    pos: u64,
    rank: usize,
}

impl Iterator for Orbit<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.pos;
        let (next, rank) = self.ms.move_query(self.pos, self.rank);
        self.pos = next;
        self.rank = rank;
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_move, random_runny_map, SplitMix64};

    const PI_A: [u64; 8] = [4, 5, 6, 7, 0, 1, 2, 3];
    const PI_B: [u64; 12] = [6, 7, 8, 9, 10, 11, 5, 4, 3, 2, 1, 0];

    fn build(pi: &[u64], alpha: u64) -> MoveStructure {
        let m = IntervalMap::from_permutation(pi).unwrap();
        MoveStructure::build(&m, alpha).unwrap()
    }

    #[test]
    fn block_swap_structure_is_exact() {
        let ms = build(&PI_A, 2);
        assert_eq!(ms.starts(), &[0, 4, 8]);
        assert_eq!(ms.images(), &[4, 0]);
        assert_eq!(ms.image_ranks(), &[1, 0]);
        for i in 0..8u64 {
            assert_eq!(ms.apply(i).unwrap(), PI_A[i as usize]);
        }
    }

    #[test]
    fn reversal_structure_queries_match_the_permutation() {
        let ms = build(&PI_B, 2);
        assert_eq!(ms.r(), 8);
        let mut j = ms.locate(0).unwrap();
        let mut i = 0u64;
        // Follow the orbit of 0 through every position.
        for _ in 0..PI_B.len() {
            let (img, k) = ms.move_query(i, j);
            assert_eq!(img, PI_B[i as usize]);
            i = img;
            j = k;
        }
    }

    #[test]
    fn orbit_yields_successive_applications() {
        let ms = build(&PI_A, 2);
        let got: Vec<u64> = ms.orbit(1).unwrap().take(4).collect();
        assert_eq!(got, vec![1, 5, 1, 5]);
    }

    #[test]
    fn gap_weights_stay_below_the_bound_and_match_by_hand() {
        // Block swap: the two partitions coincide, so nothing is strictly
        // inside any gap.
        assert_eq!(build(&PI_A, 2).gap_weights(), (0, 0));
        for alpha in [2u64, 4] {
            let ms = build(&PI_B, alpha);
            let (wo, wi) = ms.gap_weights();
            assert!(wo < 2 * alpha && wi < 2 * alpha, "{wo}/{wi} at α={alpha}");
        }
    }

    #[test]
    fn locate_rejects_out_of_domain_positions() {
        let ms = build(&PI_A, 2);
        assert!(matches!(
            ms.locate(8),
            Err(Error::Range { index: 8, bound: 8 })
        ));
        assert!(ms.apply(9).is_err());
    }

    #[test]
    fn round_trip_preserves_the_structure() {
        let ms = build(&PI_B, 2);
        let mut bytes = Vec::new();
        ms.write_to(&mut bytes).unwrap();
        let back = MoveStructure::read_from(&bytes[..]).unwrap();
        assert_eq!(back, ms);
    }

    #[test]
    fn truncated_and_corrupted_streams_are_rejected() {
        let ms = build(&PI_B, 2);
        let mut bytes = Vec::new();
        ms.write_to(&mut bytes).unwrap();

        for cut in [0, 7, 8, 20, bytes.len() - 1] {
            assert!(
                MoveStructure::read_from(&bytes[..cut]).is_err(),
                "truncation at {cut} must fail"
            );
        }
        // Break the sentinel: the last entry of the starts array.
        let mut bad = bytes.clone();
        let sentinel_at = 32 + 8 * ms.r();
        bad[sentinel_at] ^= 0xff;
        match MoveStructure::read_from(&bad[..]) {
            Err(Error::Format { .. }) => {}
            other => panic!("expected format error, got {other:?}"),
        }
        // Trailing garbage is not tolerated either.
        let mut long = bytes.clone();
        long.push(0);
        assert!(MoveStructure::read_from(&long[..]).is_err());
    }

    #[test]
    fn validate_reports_rank_violations() {
        let ms = build(&PI_A, 2);
        let bad = MoveStructure::from_parts(
            ms.n(),
            ms.alpha(),
            ms.starts().to_vec(),
            ms.images().to_vec(),
            vec![0, 0],
        );
        match bad {
            Err(Error::Validation { what }) => assert!(what.contains("image rank")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn random_structures_agree_with_linear_scan_evaluation() {
        let mut rng = SplitMix64::new(0x5eed);
        for _ in 0..60 {
            let n = 1 + rng.below(1024);
            let target_r = (1 + rng.below(n)) as usize;
            let map = random_runny_map(&mut rng, n, target_r);
            let ms = MoveStructure::build(&map, 4).unwrap();
            for _ in 0..64 {
                let i = rng.below(n);
                let (img, j) = naive_move(&map, i);
                assert_eq!(ms.apply(i).unwrap(), img);
                let _ = j;
            }
        }
    }
}
