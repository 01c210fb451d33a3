//! Simultaneous bidirectional balancing of runny permutations.
//!
//! A gap between two consecutive starts on one side (input or output) is
//! *heavy* when at least `2α` starts of the opposite side fall strictly
//! inside it. Heavy gaps make move queries scan too far, so they are split:
//! the gap is cut at the (α+1)-largest contained start and the cut is
//! mirrored onto the paired interval of the other side. Balancing both
//! directions at once, naively, re-triggers scans; this module instead runs
//! the single left-to-right sweep that performs all splits in `O(r)` total
//! time for constant α.
//!
//! # How the sweep works
//!
//! Input and output intervals live in two singly linked lists (`𝒫` and `𝒬`)
//! backed by arenas whose slot indices act as pointers. Each node knows
//! `next` (list order), `mate` (its paired interval on the other side) and
//! `pred` (the latest opposite-side node starting at or before it — only
//! maintained up to the sweep position `t`).
//!
//! Every iteration selects the interval containing `t` with the smaller
//! start (ties: the longer one; identical spans are already balanced and are
//! skipped over). A capped scan from the selected node's `pred` counts
//! opposite starts inside the gap, stopping as soon as the weight exceeds
//! `2α`; a sliding window of the last α+1 starts yields the split point.
//! Splits behind `t` repair the small set of `pred` links they invalidate
//! and re-examine the one gap whose weight they grew, recursing while the
//! mirrored insertion keeps landing below `t`. Finally `t` advances and both
//! list pointers walk forward to the nodes containing the new `t`, fixing
//! `pred` links as they go. Every scan is `O(α)` and every node is walked
//! over at most once per side, which gives the linear bound.

use crate::error::{Error, Result};
use crate::intervals::IntervalMap;
use crate::move_structure::MoveStructure;

/// Balancing parameter used when callers do not specify one.
pub const DEFAULT_ALPHA: u64 = 4;

/// Exclusive upper bound of the accepted α range.
pub const MAX_ALPHA: u64 = 1 << 63;

/// Sentinel for "no node".
const NIL: usize = usize::MAX;

/// One interval endpoint in an arena-backed linked list.
#[derive(Debug, Clone, Copy)]
struct Node {
    /// Starting position of the interval.
    idx: u64,
    /// Next node in start order, `NIL` for the last.
    next: usize,
    /// The paired interval in the opposite arena.
    mate: usize,
    /// Latest opposite-side node with `idx <= self.idx`; valid only for
    /// nodes at or behind the sweep position.
    pred: usize,
}

/// Work counters recorded during one [`balance`] run.
#[derive(Debug, Clone, Copy, Default)]
pub struct BalanceStats {
    /// Interval count before balancing.
    pub r: usize,
    /// Interval count after balancing (both sides have this many).
    pub r_prime: usize,
    /// Number of splits performed; each adds one node per side.
    pub insertions: u64,
    /// Pointer advancement steps across all update walks, both lists.
    /// Every node is entered at most once per side, so this never exceeds
    /// `2·r_prime − 2`.
    pub walk_visits: u64,
    /// The subset of [`BalanceStats::walk_visits`] landing on nodes that
    /// existed before the sweep started (at most `2·r − 2`); entries onto
    /// split-created nodes are accounted to the splits instead.
    pub walk_visits_initial: u64,
    /// Sweep iterations (interval selections).
    pub selection_steps: u64,
    /// Nodes touched by weight scans and pred repairs, total.
    pub scan_visits: u64,
    /// Largest per-split share of scan/repair work in any one iteration.
    pub split_work_max: u64,
}

/// A fully balanced pair of interval lists, ready for extraction.
///
/// Produced only by [`balance`], so holding one is proof the sweep
/// completed: every gap on both sides contains fewer than `2α` opposite
/// starts.
#[derive(Debug)]
pub struct BalancedPair {
    arena_p: Vec<Node>,
    arena_q: Vec<Node>,
    n: u64,
    alpha: u64,
    stats: BalanceStats,
}

/// Sliding window over the last α+1 nodes seen by a weight scan.
struct ScanWindow {
    slots: Vec<usize>,
    cap: usize,
    pushed: usize,
}

impl ScanWindow {
    fn new(cap: usize) -> Self {
        ScanWindow {
            slots: vec![NIL; cap],
            cap,
            pushed: 0,
        }
    }

    fn reset(&mut self) {
        self.pushed = 0;
    }

    fn push(&mut self, slot: usize) {
        self.slots[self.pushed % self.cap] = slot;
        self.pushed += 1;
    }

    /// Oldest retained entry; with a full window of α+1 entries after a scan
    /// of `w ∈ {2α, 2α+1}` nodes this is exactly the (α+1)-largest start
    /// seen.
    fn oldest(&self) -> usize {
        debug_assert!(self.pushed >= self.cap, "window must be full when read");
        self.slots[self.pushed % self.cap]
    }
}

/// Which side the sweep selected for this iteration.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Input,
    Output,
    /// Same start and same length: both intervals are trivially balanced.
    Aligned,
}

/// Balances `map` so that no gap on either side contains `2 * alpha` or more
/// opposite-side starts.
///
/// Runs in `O(r)` time and space for constant `alpha` and never increases
/// the weight of a gap it does not split. The refined structure has at most
/// `(α+1)·r/(α−1)` intervals per side.
///
/// # Errors
///
/// [`Error::Parameter`] when `alpha` is outside `[2, 2^63)`. An
/// [`Error::Internal`] escaping this function indicates a bug (the arena
/// growth bound or the sweep's termination bound failed), never bad input.
pub fn balance(map: &IntervalMap, alpha: u64) -> Result<BalancedPair> {
    if !(2..MAX_ALPHA).contains(&alpha) {
        return Err(Error::parameter(format!(
            "alpha = {alpha} is outside the accepted range [2, 2^63)"
        )));
    }
    let n = map.n();
    let r = map.r();
    let capacity = arena_capacity(r, alpha);
    let mut st = Lists::init(map, alpha, capacity);
    let mut stats = BalanceStats {
        r,
        ..BalanceStats::default()
    };

    // Window of α+1 entries, but never more than the arena can hold.
    let window_cap = ((alpha + 1) as usize).min(capacity.max(1));
    let mut window = ScanWindow::new(window_cap);

    let mut t: u64 = 0;
    let mut pt: usize = 0;
    let mut qt: usize = 0;
    // The sweep advances t or a pointer every iteration; this bound is far
    // beyond anything a correct run can reach.
    let step_budget = 16 * capacity as u64 + 1024;

    loop {
        stats.selection_steps += 1;
        if stats.selection_steps > step_budget {
            return Err(Error::internal(format!(
                "balancing sweep exceeded {step_budget} iterations for r = {r}; \
                 the termination invariant is broken"
            )));
        }

        let new_t = match select(&st.p, &st.q, pt, qt, n) {
            Side::Aligned => end_of(&st.p, pt, n),
            Side::Output => {
                let g = qt;
                st.process(
                    Arena::Q,
                    g,
                    t,
                    alpha,
                    &mut window,
                    &mut stats,
                    &mut qt,
                    &mut pt,
                )?
            }
            Side::Input => {
                let g = pt;
                st.process(
                    Arena::P,
                    g,
                    t,
                    alpha,
                    &mut window,
                    &mut stats,
                    &mut pt,
                    &mut qt,
                )?
            }
        };
        // Forward-only pointers: never move t backwards even in degenerate
        // nested configurations (see module docs on split choice).
        t = t.max(new_t);

        advance_pointers(&mut st.p, &mut st.q, &mut pt, &mut qt, t, r, &mut stats);
        if t >= n {
            break;
        }
    }

    stats.r_prime = st.p.len();
    debug_assert_eq!(st.p.len(), st.q.len());
    Ok(BalancedPair {
        arena_p: st.p,
        arena_q: st.q,
        n,
        alpha,
        stats,
    })
}

/// Maximum node count per side after balancing: `⌈(α+1)·r/(α−1)⌉ + 1`.
fn arena_capacity(r: usize, alpha: u64) -> usize {
    let num = (alpha as u128 + 1) * r as u128;
    let den = alpha as u128 - 1;
    (num.div_ceil(den) + 1) as usize
}

fn end_of(arena: &[Node], slot: usize, n: u64) -> u64 {
    match arena[slot].next {
        NIL => n,
        nx => arena[nx].idx,
    }
}

fn select(p: &[Node], q: &[Node], pt: usize, qt: usize, n: u64) -> Side {
    let (pi, qi) = (p[pt].idx, q[qt].idx);
    if pi < qi {
        return Side::Input;
    }
    if qi < pi {
        return Side::Output;
    }
    let (pe, qe) = (end_of(p, pt, n), end_of(q, qt, n));
    if pe > qe {
        Side::Input
    } else if qe > pe {
        Side::Output
    } else {
        Side::Aligned
    }
}

/// Identifies the arena a [`Lists::process`] call operates on.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Arena {
    P,
    Q,
}

/// The two lists plus everything `process` needs to mutate them together.
struct Lists {
    p: Vec<Node>,
    q: Vec<Node>,
    n: u64,
    capacity: usize,
}

impl Lists {
    /// Builds both lists from the interval map and links every `pred` by a
    /// two-finger merge (cheap because both sides are sorted).
    fn init(map: &IntervalMap, _alpha: u64, capacity: usize) -> Lists {
        let r = map.r();
        let out = map.output_starts();
        let mut p: Vec<Node> = Vec::with_capacity(capacity);
        let mut q: Vec<Node> = Vec::with_capacity(capacity);
        for j in 0..r {
            p.push(Node {
                idx: map.p()[j],
                next: if j + 1 < r { j + 1 } else { NIL },
                mate: map.tau()[j],
                pred: NIL,
            });
        }
        for (k, &j) in out.tau_inv.iter().enumerate() {
            q.push(Node {
                idx: out.q[k],
                next: if k + 1 < r { k + 1 } else { NIL },
                mate: j,
                pred: NIL,
            });
        }

        // Merge by start; both lists begin at 0 so the first step is always
        // the tie case and every later step has a predecessor to point at.
        let (mut i, mut k) = (0usize, 0usize);
        let (mut last_p, mut last_q) = (NIL, NIL);
        while i < r || k < r {
            let take_p = k == r || (i < r && p[i].idx < q[k].idx);
            let tie = i < r && k < r && p[i].idx == q[k].idx;
            if tie {
                p[i].pred = k;
                q[k].pred = i;
                last_p = i;
                last_q = k;
                i += 1;
                k += 1;
            } else if take_p {
                debug_assert!(last_q != NIL);
                p[i].pred = last_q;
                last_p = i;
                i += 1;
            } else {
                debug_assert!(last_p != NIL);
                q[k].pred = last_p;
                last_q = k;
                k += 1;
            }
        }
        Lists {
            p,
            q,
            n: map.n(),
            capacity,
        }
    }

    fn pair_mut(&mut self, which: Arena) -> (&mut Vec<Node>, &mut Vec<Node>) {
        match which {
            Arena::Q => (&mut self.q, &mut self.p),
            Arena::P => (&mut self.p, &mut self.q),
        }
    }

    /// Weight-checks the selected interval and splits it (plus any gaps its
    /// mirrored insertions grow below `t`) until balance is restored.
    /// Returns the new sweep position.
    ///
    /// `sel` is the arena holding the selected interval `g`; weights count
    /// nodes of the *other* arena falling strictly inside `g`'s gap.
    /// `sel_ptr`/`opp_ptr` are the advancement pointers oriented the same
    /// way; a split right after a pointer at or behind `t` moves the pointer
    /// onto the new node so the walk never re-enters an eagerly-linked one.
    #[allow(clippy::too_many_arguments)]
    fn process(
        &mut self,
        which: Arena,
        g: usize,
        t: u64,
        alpha: u64,
        window: &mut ScanWindow,
        stats: &mut BalanceStats,
        sel_ptr: &mut usize,
        opp_ptr: &mut usize,
    ) -> Result<u64> {
        let n = self.n;
        let capacity = self.capacity;
        let (sel, opp) = self.pair_mut(which);

        let mut work: u64 = 0;
        let mut splits_here: u64 = 0;

        let weight = scan_gap(sel, opp, g, n, alpha, window, &mut work);
        let not_heavy_t = end_of(sel, g, n);
        if weight < 2 * alpha {
            stats.scan_visits += work;
            return Ok(not_heavy_t);
        }

        // Initial split of the selected gap. The sweep resumes from the cut.
        let x_node = window.oldest();
        let new_t = opp[x_node].idx;
        let mut mirrored = split_gap(
            sel, opp, g, x_node, t, n, capacity, &mut work, sel_ptr, opp_ptr,
        )?;
        splits_here += 1;

        // A mirrored insertion below t adds weight to exactly one gap of the
        // selected side that the sweep has already passed; re-balance it now
        // (and keep going while the chain stays below t).
        while let Some((np, x_prime)) = mirrored {
            if x_prime >= t {
                break;
            }
            // Gap of `sel` containing x': its pred link was just repaired.
            let g2 = opp[np].pred;
            debug_assert!(g2 != NIL);
            if sel[g2].idx == x_prime {
                // The insertion coincides with a boundary: no gap grew.
                break;
            }
            let w2 = scan_gap(sel, opp, g2, n, alpha, window, &mut work);
            if w2 < 2 * alpha {
                break;
            }
            let x2 = window.oldest();
            mirrored = split_gap(
                sel, opp, g2, x2, t, n, capacity, &mut work, sel_ptr, opp_ptr,
            )?;
            splits_here += 1;
        }

        stats.insertions += splits_here;
        stats.scan_visits += work;
        stats.split_work_max = stats.split_work_max.max(work.div_ceil(splits_here));
        Ok(new_t)
    }
}

/// Counts opposite-side starts strictly inside the gap of `sel[g]`, stopping
/// once the weight exceeds `2α`. The window retains the last α+1 nodes seen
/// so the split point is available without rescanning.
fn scan_gap(
    sel: &[Node],
    opp: &[Node],
    g: usize,
    n: u64,
    alpha: u64,
    window: &mut ScanWindow,
    work: &mut u64,
) -> u64 {
    let lo = sel[g].idx;
    let hi = end_of(sel, g, n);
    let mut cur = sel[g].pred;
    debug_assert!(cur != NIL, "selected node must have a valid pred");
    // The pred starts at or before the gap; step past anything not strictly
    // inside. With a correct pred this is a single step.
    while cur != NIL && opp[cur].idx <= lo {
        cur = opp[cur].next;
        *work += 1;
    }
    window.reset();
    let cap = 2 * alpha + 1;
    let mut weight = 0u64;
    while cur != NIL && opp[cur].idx < hi && weight < cap {
        window.push(cur);
        weight += 1;
        *work += 1;
        cur = opp[cur].next;
    }
    weight
}

/// Splits the gap of `sel[g]` at the start of `opp[x_node]` and mirrors the
/// cut onto `g`'s mate. Returns the mirrored node and its position when that
/// insertion is a genuinely new opposite-side start (the caller decides
/// whether the gap it landed in needs re-balancing).
///
/// Repairs every `pred` link the two insertions invalidate at or behind `t`;
/// links ahead of `t` are left to the advancement walk.
#[allow(clippy::too_many_arguments)]
fn split_gap(
    sel: &mut Vec<Node>,
    opp: &mut Vec<Node>,
    g: usize,
    x_node: usize,
    t: u64,
    n: u64,
    capacity: usize,
    work: &mut u64,
    sel_ptr: &mut usize,
    opp_ptr: &mut usize,
) -> Result<Option<(usize, u64)>> {
    let x = opp[x_node].idx;
    let gap_end = end_of(sel, g, n);
    debug_assert!(sel[g].idx < x && x < gap_end);

    // New `sel` node [x, gap_end). Its pred is the opposite node at x
    // itself, which stays correct forever: no opposite start can ever be
    // inserted between a node and its own position.
    let ns = alloc(
        sel,
        Node {
            idx: x,
            next: sel[g].next,
            mate: NIL,
            pred: x_node,
        },
        capacity,
    )?;
    sel[g].next = ns;
    // A node at or behind t inserted directly after the walk pointer would
    // be re-entered by the walk, clobbering its already-final pred with the
    // other side's pointer (which has run ahead to t). Step the pointer onto
    // it instead: everything it needs is linked eagerly below.
    if g == *sel_ptr && x <= t {
        *sel_ptr = ns;
    }

    // Mirror into the mate: the interval [m, m_end) pairs with [g, gap_end),
    // so the cut lands at the same offset.
    let m = sel[g].mate;
    let x_prime = opp[m].idx + (x - sel[g].idx);
    let m_end = end_of(opp, m, n);
    let no = alloc(
        opp,
        Node {
            idx: x_prime,
            next: opp[m].next,
            mate: ns,
            pred: NIL,
        },
        capacity,
    )?;
    opp[m].next = no;
    sel[ns].mate = no;
    if m == *opp_ptr && x_prime <= t {
        *opp_ptr = no;
    }
    *work += 2;

    // The new sel-side boundary at x: the opposite node sitting exactly at
    // x (preds use "at or before", so ties count) and opposite nodes inside
    // (x, gap_end), all at or behind t, now have `ns` as their sel-side
    // pred.
    if x <= t {
        opp[x_node].pred = ns;
        let mut c = opp[x_node].next;
        while c != NIL && opp[c].idx < gap_end && opp[c].idx <= t {
            opp[c].pred = ns;
            c = opp[c].next;
            *work += 1;
        }
    }

    // The mirrored boundary at x': give it a pred and repoint sel-side
    // nodes at exactly x' (tie) or inside (x', m_end), at or behind t.
    if x_prime <= t {
        let mut q = opp[m].pred;
        debug_assert!(q != NIL);
        while sel[q].next != NIL && sel[sel[q].next].idx <= x_prime {
            q = sel[q].next;
            *work += 1;
        }
        opp[no].pred = q;
        if sel[q].idx == x_prime {
            sel[q].pred = no;
        }
        let mut c = sel[q].next;
        while c != NIL && sel[c].idx < m_end && sel[c].idx <= t {
            sel[c].pred = no;
            c = sel[c].next;
            *work += 1;
        }
    }

    Ok(Some((no, x_prime)))
}

fn alloc(arena: &mut Vec<Node>, node: Node, capacity: usize) -> Result<usize> {
    if arena.len() >= capacity {
        return Err(Error::internal(format!(
            "arena capacity exceeded: the balance bound promised at most {capacity} \
             intervals per side"
        )));
    }
    arena.push(node);
    Ok(arena.len() - 1)
}

/// Walks both pointers forward to the last nodes starting at or before `t`,
/// merging by start so every newly covered node gets its `pred` fixed.
///
/// `r0` is the initial node count: arena slots below it are the original
/// intervals, which the `walk_visits_initial` counter singles out.
fn advance_pointers(
    p: &mut [Node],
    q: &mut [Node],
    pt: &mut usize,
    qt: &mut usize,
    t: u64,
    r0: usize,
    stats: &mut BalanceStats,
) {
    let enter = |slot: usize, stats: &mut BalanceStats| {
        stats.walk_visits += 1;
        if slot < r0 {
            stats.walk_visits_initial += 1;
        }
    };
    loop {
        let pn = p[*pt].next;
        let qn = q[*qt].next;
        let p_ok = pn != NIL && p[pn].idx <= t;
        let q_ok = qn != NIL && q[qn].idx <= t;
        if p_ok && q_ok {
            let (pv, qv) = (p[pn].idx, q[qn].idx);
            if pv < qv {
                p[pn].pred = *qt;
                *pt = pn;
                enter(pn, stats);
            } else if qv < pv {
                q[qn].pred = *pt;
                *qt = qn;
                enter(qn, stats);
            } else {
                p[pn].pred = qn;
                q[qn].pred = pn;
                *pt = pn;
                *qt = qn;
                enter(pn, stats);
                enter(qn, stats);
            }
        } else if p_ok {
            p[pn].pred = *qt;
            *pt = pn;
            enter(pn, stats);
        } else if q_ok {
            q[qn].pred = *pt;
            *qt = qn;
            enter(qn, stats);
        } else {
            return;
        }
    }
}

impl BalancedPair {
    /// Domain size n.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Balancing parameter the sweep ran with.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Interval count per side after balancing.
    pub fn r_prime(&self) -> usize {
        self.arena_p.len()
    }

    /// Work counters from the sweep.
    pub fn stats(&self) -> &BalanceStats {
        &self.stats
    }

    /// Extracts the move structure of π (forward direction).
    pub fn extract_forward(&self) -> MoveStructure {
        extract(&self.arena_p, &self.arena_q, self.n, self.alpha)
    }

    /// Extracts the move structure of π⁻¹ (inverse direction).
    pub fn extract_inverse(&self) -> MoveStructure {
        extract(&self.arena_q, &self.arena_p, self.n, self.alpha)
    }

    /// Starts of the refined input intervals, sentinel included (test aid).
    pub fn input_starts(&self) -> Vec<u64> {
        list_starts(&self.arena_p, self.n)
    }

    /// Starts of the refined output intervals, sentinel included (test aid).
    pub fn output_starts(&self) -> Vec<u64> {
        list_starts(&self.arena_q, self.n)
    }
}

fn list_starts(arena: &[Node], n: u64) -> Vec<u64> {
    let mut v = Vec::with_capacity(arena.len() + 1);
    let mut cur = 0usize;
    loop {
        v.push(arena[cur].idx);
        match arena[cur].next {
            NIL => break,
            nx => cur = nx,
        }
    }
    v.push(n);
    v
}

/// Reads the finished lists into the flat arrays a move structure needs:
/// interval starts in order, the image of each start, and the rank of the
/// interval containing that image.
fn extract(main: &[Node], other: &[Node], n: u64, alpha: u64) -> MoveStructure {
    let r_prime = main.len();
    // Pass 1: ordinal of every main-arena slot in list order.
    let mut ordinal = vec![0usize; r_prime];
    let mut starts = Vec::with_capacity(r_prime + 1);
    let mut cur = 0usize;
    for j in 0.. {
        ordinal[cur] = j;
        starts.push(main[cur].idx);
        match main[cur].next {
            NIL => break,
            nx => cur = nx,
        }
    }
    starts.push(n);

    // Pass 2: images via mate, ranks via the image's pred (all preds are
    // final once the sweep has covered the whole domain).
    let mut images = Vec::with_capacity(r_prime);
    let mut ranks = Vec::with_capacity(r_prime);
    let mut cur = 0usize;
    loop {
        let mate = main[cur].mate;
        images.push(other[mate].idx);
        ranks.push(ordinal[other[mate].pred]);
        match main[cur].next {
            NIL => break,
            nx => cur = nx,
        }
    }
    MoveStructure::from_parts_unchecked(n, alpha, starts, images, ranks)
}
