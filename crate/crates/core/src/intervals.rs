//! Interval representation of runny permutations.
//!
//! A permutation π of `[0, n)` is *runny with r runs* when it is built from
//! `r` maximal contiguous pieces: within a piece, π(i+1) = π(i) + 1. Such a
//! permutation is captured exactly by `O(r)` words:
//!
//! * `p` — the sorted starting positions of the input intervals, plus a
//!   sentinel `n` (so `p` has `r + 1` entries and interval `j` is
//!   `[p[j], p[j+1])`);
//! * `p_pi` — the image of each interval start, `p_pi[j] = π(p[j])`;
//! * `tau` — for each input interval `j`, the rank of its image among all
//!   images, i.e. `p_pi[j]` is the `tau[j]`-th smallest image start.
//!
//! The output intervals `[q[k], q[k+1])` are the same pieces sorted by image
//! position; [`IntervalMap::output_starts`] materializes them. Everything in
//! this module is exact bookkeeping — no balancing happens here.

use crate::error::{Error, Result};

/// Interval form of a runny permutation π over `[0, n)`.
///
/// Immutable once constructed. Use [`IntervalMap::from_permutation`] to build
/// one from an explicit permutation, or [`IntervalMap::new`] to adopt
/// externally supplied arrays (which are fully validated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMap {
    n: u64,
    /// `r + 1` strictly increasing starts; `p[0] = 0`, `p[r] = n`.
    p: Vec<u64>,
    /// `r` image starts, one per input interval.
    p_pi: Vec<u64>,
    /// `tau[j]` = rank of `p_pi[j]` among all image starts.
    tau: Vec<usize>,
}

/// Output-side view of an [`IntervalMap`]: the image interval starts in
/// sorted order plus the inverse of `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputStarts {
    /// `r + 1` sorted output starts with sentinel `n`.
    pub q: Vec<u64>,
    /// `tau_inv[k]` = the input interval whose image is output interval `k`.
    pub tau_inv: Vec<usize>,
}

/// Inverts a permutation of `0..len` given as a slice.
///
/// `tau[j] = k` means input `j` occupies rank `k`; the result maps
/// `k` back to `j`.
///
/// # Panics
///
/// Debug builds assert that `tau` is a permutation; release builds index
/// out of bounds on malformed input (callers validate first).
pub fn invert_tau(tau: &[usize]) -> Vec<usize> {
    let mut inv = vec![usize::MAX; tau.len()];
    for (j, &k) in tau.iter().enumerate() {
        debug_assert!(k < tau.len(), "rank {k} out of range");
        debug_assert!(inv[k] == usize::MAX, "duplicate rank {k}");
        inv[k] = j;
    }
    inv
}

impl IntervalMap {
    /// Builds the minimal interval map of an explicit permutation.
    ///
    /// `pi[i]` is π(i). The input is checked to be a permutation of
    /// `[0, pi.len())`; the resulting map has one interval per maximal run
    /// of contiguous images.
    ///
    /// # Errors
    ///
    /// [`Error::Parameter`] for an empty input, [`Error::Validation`] when
    /// `pi` is not a permutation.
    ///
    /// # Example
    ///
    /// ```
    /// use movestruct::intervals::IntervalMap;
    ///
    /// let m = IntervalMap::from_permutation(&[4, 5, 6, 7, 0, 1, 2, 3]).unwrap();
    /// assert_eq!(m.p(), &[0, 4, 8]);
    /// assert_eq!(m.p_pi(), &[4, 0]);
    /// assert_eq!(m.tau(), &[1, 0]);
    /// ```
    pub fn from_permutation(pi: &[u64]) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::parameter("permutation domain must be non-empty"));
        }
        let n = pi.len() as u64;
        let mut seen = vec![false; pi.len()];
        for (i, &v) in pi.iter().enumerate() {
            if v >= n {
                return Err(Error::validation(format!(
                    "pi[{i}] = {v} is outside the domain [0, {n})"
                )));
            }
            if seen[v as usize] {
                return Err(Error::validation(format!(
                    "pi[{i}] = {v} duplicates an earlier image; not a permutation"
                )));
            }
            seen[v as usize] = true;
        }

        let mut p = vec![0u64];
        for i in 1..pi.len() {
            if pi[i - 1] + 1 != pi[i] {
                p.push(i as u64);
            }
        }
        let p_pi: Vec<u64> = p.iter().map(|&s| pi[s as usize]).collect();
        p.push(n);
        let tau = rank_by_value(&p_pi);
        Ok(IntervalMap { n, p, p_pi, tau })
    }

    /// Adopts externally supplied arrays after validating every invariant.
    ///
    /// `p` must include the sentinel `n` as its final entry. See
    /// [`IntervalMap::validate`] for the full invariant list.
    pub fn new(n: u64, p: Vec<u64>, p_pi: Vec<u64>, tau: Vec<usize>) -> Result<Self> {
        let m = IntervalMap { n, p, p_pi, tau };
        m.validate()?;
        Ok(m)
    }

    /// Adopts arrays produced by trusted internal code without re-validating.
    ///
    /// Debug builds still assert the invariants.
    pub(crate) fn from_parts_unchecked(
        n: u64,
        p: Vec<u64>,
        p_pi: Vec<u64>,
        tau: Vec<usize>,
    ) -> Self {
        let m = IntervalMap { n, p, p_pi, tau };
        debug_assert!(m.validate().is_ok(), "internal map failed validation");
        m
    }

    /// Domain size n.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of intervals r.
    pub fn r(&self) -> usize {
        self.p_pi.len()
    }

    /// Input interval starts including the sentinel `n` (length `r + 1`).
    pub fn p(&self) -> &[u64] {
        &self.p
    }

    /// Image starts, one per input interval (length `r`).
    pub fn p_pi(&self) -> &[u64] {
        &self.p_pi
    }

    /// Image ranks, one per input interval (length `r`).
    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    /// Sorted output starts and the inverse rank map.
    ///
    /// `q[k] = p_pi[tau_inv[k]]`, strictly increasing, with sentinel `n`.
    pub fn output_starts(&self) -> OutputStarts {
        let tau_inv = invert_tau(&self.tau);
        let mut q: Vec<u64> = tau_inv.iter().map(|&j| self.p_pi[j]).collect();
        q.push(self.n);
        OutputStarts { q, tau_inv }
    }

    /// Interval map of the inverse permutation π⁻¹.
    ///
    /// The inverse swaps the two sides: its input starts are this map's
    /// sorted output starts, its images are this map's input starts, and its
    /// rank map is `tau_inv`.
    pub fn inverse(&self) -> IntervalMap {
        let OutputStarts { q, tau_inv } = self.output_starts();
        let p_pi: Vec<u64> = tau_inv.iter().map(|&j| self.p[j]).collect();
        // Image starts of the inverse are this map's input starts, which are
        // already sorted; the rank of interval k is therefore tau_inv[k].
        let tau = tau_inv;
        IntervalMap::from_parts_unchecked(self.n, q, p_pi, tau)
    }

    /// Applies π to a single position by binary search (O(log r)).
    ///
    /// # Errors
    ///
    /// [`Error::Range`] when `i >= n`.
    pub fn apply(&self, i: u64) -> Result<u64> {
        if i >= self.n {
            return Err(Error::Range {
                index: i,
                bound: self.n,
            });
        }
        let j = self.p.partition_point(|&s| s <= i) - 1;
        Ok(self.p_pi[j] + (i - self.p[j]))
    }

    /// Materializes the explicit permutation (O(n) memory; for tests and
    /// small inputs only).
    pub fn expand(&self) -> Vec<u64> {
        let mut pi = Vec::with_capacity(self.n as usize);
        for j in 0..self.r() {
            let len = self.p[j + 1] - self.p[j];
            for d in 0..len {
                pi.push(self.p_pi[j] + d);
            }
        }
        pi
    }

    /// Checks every structural invariant, reporting the first violation with
    /// its location.
    ///
    /// Invariants, in check order:
    ///
    /// 1. `n >= 1`;
    /// 2. `p` has `r + 1` entries, starts at 0, is strictly increasing and
    ///    ends with the sentinel `n`;
    /// 3. `tau` is a permutation of `0..r`;
    /// 4. the image starts sorted by `tau` rank are strictly increasing,
    ///    start at 0 and (with the interval lengths) tile `[0, n)` exactly —
    ///    which also forces the `p_pi` values to be distinct.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::parameter("domain size n must be at least 1"));
        }
        let r = self.p_pi.len();
        if r == 0 {
            return Err(Error::validation("interval map has no intervals"));
        }
        if self.p.len() != r + 1 {
            return Err(Error::validation(format!(
                "p has {} entries but r + 1 = {} are required (sentinel included)",
                self.p.len(),
                r + 1
            )));
        }
        if self.tau.len() != r {
            return Err(Error::validation(format!(
                "tau has {} entries but r = {r} are required",
                self.tau.len()
            )));
        }
        if self.p[0] != 0 {
            return Err(Error::validation(format!(
                "p[0] = {} but interval starts must begin at 0",
                self.p[0]
            )));
        }
        for j in 1..self.p.len() {
            if self.p[j] <= self.p[j - 1] {
                return Err(Error::validation(format!(
                    "p[{}] = {} does not exceed p[{}] = {}; starts must strictly increase",
                    j,
                    self.p[j],
                    j - 1,
                    self.p[j - 1]
                )));
            }
        }
        if self.p[r] != self.n {
            return Err(Error::validation(format!(
                "p[{r}] = {} but the sentinel must equal n = {}",
                self.p[r], self.n
            )));
        }

        let mut tau_inv = vec![usize::MAX; r];
        for (j, &k) in self.tau.iter().enumerate() {
            if k >= r {
                return Err(Error::validation(format!(
                    "tau[{j}] = {k} is outside [0, {r})"
                )));
            }
            if tau_inv[k] != usize::MAX {
                return Err(Error::validation(format!(
                    "tau[{j}] = {k} duplicates tau[{}]; tau must be a permutation",
                    tau_inv[k]
                )));
            }
            tau_inv[k] = j;
        }

        // Walk output intervals in rank order: starts must strictly increase
        // from 0 and each interval's length must match its input interval.
        let mut expected_start = 0u64;
        for (k, &j) in tau_inv.iter().enumerate() {
            if self.p_pi[j] != expected_start {
                return Err(Error::validation(format!(
                    "output interval {k} (image of input {j}) starts at {} but {} is \
                     required for the images to tile [0, {})",
                    self.p_pi[j], expected_start, self.n
                )));
            }
            expected_start += self.p[j + 1] - self.p[j];
        }
        if expected_start != self.n {
            return Err(Error::validation(format!(
                "output intervals tile [0, {expected_start}) but the domain is [0, {})",
                self.n
            )));
        }
        Ok(())
    }
}

/// Ranks each value among all values: `out[j]` = number of values smaller
/// than `values[j]`. Values must be distinct.
fn rank_by_value(values: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&j| values[j]);
    let mut rank = vec![0usize; values.len()];
    for (k, &j) in order.iter().enumerate() {
        rank[j] = k;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_runny_permutation, SplitMix64};

    /// π_A: two blocks of four, swapped.
    const PI_A: [u64; 8] = [4, 5, 6, 7, 0, 1, 2, 3];
    /// π_B: one run of six followed by six reversed singletons.
    const PI_B: [u64; 12] = [6, 7, 8, 9, 10, 11, 5, 4, 3, 2, 1, 0];

    #[test]
    fn identity_collapses_to_one_interval() {
        let pi: Vec<u64> = (0..8).collect();
        let m = IntervalMap::from_permutation(&pi).unwrap();
        assert_eq!(m.p(), &[0, 8]);
        assert_eq!(m.p_pi(), &[0]);
        assert_eq!(m.tau(), &[0]);
    }

    #[test]
    fn block_swap_permutation() {
        let m = IntervalMap::from_permutation(&PI_A).unwrap();
        assert_eq!(m.p(), &[0, 4, 8]);
        assert_eq!(m.p_pi(), &[4, 0]);
        assert_eq!(m.tau(), &[1, 0]);
        let out = m.output_starts();
        assert_eq!(out.q, &[0, 4, 8]);
        assert_eq!(out.tau_inv, &[1, 0]);
    }

    #[test]
    fn run_then_reversed_singletons() {
        let m = IntervalMap::from_permutation(&PI_B).unwrap();
        assert_eq!(m.p(), &[0, 6, 7, 8, 9, 10, 11, 12]);
        assert_eq!(m.p_pi(), &[6, 5, 4, 3, 2, 1, 0]);
        assert_eq!(m.tau(), &[6, 5, 4, 3, 2, 1, 0]);
        let out = m.output_starts();
        assert_eq!(out.q, &[0, 1, 2, 3, 4, 5, 6, 12]);
        assert_eq!(out.tau_inv, &[6, 5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn invert_tau_small() {
        assert_eq!(invert_tau(&[2, 0, 1]), vec![1, 2, 0]);
        assert_eq!(invert_tau(&[0]), vec![0]);
    }

    #[test]
    fn empty_domain_is_a_parameter_error() {
        match IntervalMap::from_permutation(&[]) {
            Err(Error::Parameter { .. }) => {}
            other => panic!("expected parameter error, got {other:?}"),
        }
    }

    #[test]
    fn non_permutation_is_rejected() {
        assert!(IntervalMap::from_permutation(&[0, 0, 1]).is_err());
        assert!(IntervalMap::from_permutation(&[0, 3]).is_err());
    }

    #[test]
    fn apply_matches_explicit_permutation() {
        let m = IntervalMap::from_permutation(&PI_B).unwrap();
        for (i, &v) in PI_B.iter().enumerate() {
            assert_eq!(m.apply(i as u64).unwrap(), v);
        }
        assert!(matches!(m.apply(12), Err(Error::Range { .. })));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let m = IntervalMap::from_permutation(&PI_B).unwrap();
        let inv = m.inverse();
        inv.validate().unwrap();
        for i in 0..12 {
            assert_eq!(inv.apply(m.apply(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn validate_reports_first_violation_with_location() {
        // Unsorted starts.
        let e = IntervalMap::new(8, vec![0, 5, 4, 8], vec![0, 4, 6], vec![0, 1, 2]).unwrap_err();
        assert!(e.to_string().contains("p[2]"), "got: {e}");

        // Bad sentinel.
        let e = IntervalMap::new(8, vec![0, 4, 9], vec![0, 4], vec![0, 1]).unwrap_err();
        assert!(e.to_string().contains("sentinel"), "got: {e}");

        // tau not a permutation.
        let e = IntervalMap::new(8, vec![0, 4, 8], vec![4, 0], vec![1, 1]).unwrap_err();
        assert!(e.to_string().contains("tau"), "got: {e}");

        // Images do not tile the domain (duplicate image start).
        let e = IntervalMap::new(8, vec![0, 4, 8], vec![0, 0], vec![0, 1]).unwrap_err();
        assert!(e.to_string().contains("output interval"), "got: {e}");
    }

    #[test]
    fn round_trip_random_runny_permutations() {
        let mut rng = SplitMix64::new(0x1e7a);
        for _ in 0..60 {
            let n = 1 + rng.below(4096);
            let target_r = 1 + rng.below(n.min(256)) as usize;
            let pi = random_runny_permutation(&mut rng, n, target_r);
            let m = IntervalMap::from_permutation(&pi).unwrap();
            m.validate().unwrap();
            assert_eq!(m.expand(), pi);
            assert!(m.r() <= target_r);
        }
    }
}
