//! Run-length encoded Burrows–Wheeler transforms and the runny
//! permutations they induce.
//!
//! A BWT with `r` maximal equal-symbol runs induces three permutations of
//! `[0, n)` that are all runny with at most `r` intervals:
//!
//! * **LF** maps a BWT row to the row of the suffix one position earlier in
//!   the text; its input intervals are exactly the runs.
//! * **FL** is the inverse of LF and steps one position *forward* in the
//!   text, which makes it the workhorse for reading the text back out of
//!   the run-length encoding.
//! * **φ** maps a suffix start to the start of the lexicographically
//!   preceding suffix; its interval starts are the irreducible positions
//!   (text positions whose row is a run head).
//!
//! The first two are read off the run lengths directly. φ is derived by a
//! single pass over the text order — [`Rlbwt::fl_walk`] — which follows a
//! balanced FL move structure for `n` steps while carrying, per step, the
//! run containing the current row and the offset inside it. That walk also
//! collects everything the longest-common-prefix machinery needs: inverse
//! suffix array samples and the suffix array values at run tails.

use std::io::{BufRead, Read, Write};

use crate::balance::{balance, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::intervals::IntervalMap;
use crate::move_structure::MoveStructure;
use crate::wire::{put_u64, CountingReader};

/// Tag identifying a serialized run-length encoded BWT.
/// Magic prefix identifying the binary run-length encoding.
pub const MAGIC: &[u8; 8] = b"RLBW0001";

/// A run-length encoded Burrows–Wheeler transform.
///
/// Holds `(symbol, length)` pairs with adjacent symbols distinct and every
/// length positive. The encoded string must be a terminated BWT: its
/// smallest symbol has to occur exactly once, which is what guarantees that
/// all suffix comparisons downstream terminate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rlbwt {
    runs: Vec<(u8, u64)>,
    n: u64,
}

impl Rlbwt {
    /// Validates and wraps a run list.
    pub fn new(runs: Vec<(u8, u64)>) -> Result<Rlbwt> {
        if runs.is_empty() {
            return Err(Error::validation("at least one run is required"));
        }
        let mut n: u64 = 0;
        for (k, &(_, len)) in runs.iter().enumerate() {
            if len == 0 {
                return Err(Error::validation(format!("run {k} has length zero")));
            }
            n = n.checked_add(len).ok_or_else(|| {
                Error::validation("total length overflows a 64-bit counter")
            })?;
        }
        for k in 1..runs.len() {
            if runs[k].0 == runs[k - 1].0 {
                return Err(Error::validation(format!(
                    "runs {} and {k} carry the same symbol {:#04x}; runs must be maximal",
                    k - 1,
                    runs[k].0
                )));
            }
        }
        let term = runs.iter().map(|&(s, _)| s).min().expect("non-empty");
        let term_total: u64 = runs
            .iter()
            .filter(|&&(s, _)| s == term)
            .map(|&(_, len)| len)
            .sum();
        if term_total != 1 {
            return Err(Error::validation(format!(
                "the smallest symbol {term:#04x} occurs {term_total} times; a \
                 terminated BWT contains it exactly once"
            )));
        }
        Ok(Rlbwt { runs, n })
    }

    /// Length of the encoded string.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of runs.
    pub fn r(&self) -> usize {
        self.runs.len()
    }

    /// The `(symbol, length)` pairs in order.
    pub fn runs(&self) -> &[(u8, u64)] {
        &self.runs
    }

    /// The terminator: the smallest symbol (occurs exactly once).
    pub fn terminator(&self) -> u8 {
        self.runs.iter().map(|&(s, _)| s).min().expect("non-empty")
    }

    /// Number of distinct symbols.
    pub fn distinct_symbols(&self) -> usize {
        let mut seen = [false; 256];
        let mut count = 0;
        for &(s, _) in &self.runs {
            if !seen[s as usize] {
                seen[s as usize] = true;
                count += 1;
            }
        }
        count
    }

    /// Decodes the BWT back to one byte per position (costs `O(n)` space;
    /// meant for tests and small inputs, not the query pipeline).
    pub fn expand(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n as usize);
        for &(s, len) in &self.runs {
            for _ in 0..len {
                out.push(s);
            }
        }
        out
    }

    /// Starting BWT position of every run (`r` entries).
    pub fn run_heads(&self) -> Vec<u64> {
        let mut heads = Vec::with_capacity(self.runs.len());
        let mut at = 0u64;
        for &(_, len) in &self.runs {
            heads.push(at);
            at += len;
        }
        heads
    }

    /// The LF permutation (row → row of the previous text position) as an
    /// interval map with one interval per run.
    pub fn lf_intervals(&self) -> IntervalMap {
        let r = self.r();
        // Occurrence counts per symbol, then exclusive prefix sums: the
        // classic C array giving the first row of each symbol block.
        let mut count = [0u64; 256];
        for &(s, len) in &self.runs {
            count[s as usize] += len;
        }
        let mut c = [0u64; 256];
        let mut acc = 0u64;
        for s in 0..256 {
            c[s] = acc;
            acc += count[s];
        }

        let mut p = self.run_heads();
        p.push(self.n);
        // Image of each run head: its symbol block start plus the number of
        // earlier occurrences of the same symbol.
        let mut seen = [0u64; 256];
        let mut p_pi = Vec::with_capacity(r);
        for &(s, len) in &self.runs {
            p_pi.push(c[s as usize] + seen[s as usize]);
            seen[s as usize] += len;
        }
        // Output rank of each run: runs grouped by symbol (ascending), ties
        // by position — exactly the order of the images.
        let mut tau = vec![0usize; r];
        let mut next = 0usize;
        for sym in 0..=255u8 {
            for (k, &(s, _)) in self.runs.iter().enumerate() {
                if s == sym {
                    tau[k] = next;
                    next += 1;
                }
            }
        }
        IntervalMap::from_parts_unchecked(self.n, p, p_pi, tau)
    }

    /// The FL permutation (row → row of the next text position), the
    /// inverse of [`Rlbwt::lf_intervals`].
    pub fn fl_intervals(&self) -> IntervalMap {
        self.lf_intervals().inverse()
    }

    /// The φ permutation (suffix start → start of the lexicographically
    /// preceding suffix, wrapping the smallest to the largest) as an
    /// interval map whose starts are the irreducible positions.
    pub fn phi_intervals(&self) -> Result<IntervalMap> {
        let walk = self.fl_walk(DEFAULT_ALPHA)?;
        let mut p = walk.irreducible;
        p.push(self.n);
        IntervalMap::new(self.n, p, walk.phi_images, walk.phi_tau)
    }

    /// Walks the whole text in position order through a balanced FL move
    /// structure, deriving the φ machinery and the text-access scaffolding
    /// in `O(n)` time and `O(r)` space.
    pub(crate) fn fl_walk(&self, alpha: u64) -> Result<FlWalk> {
        let n = self.n;
        let r = self.r();
        let fl = self.fl_intervals();
        let ms = balance(&fl, alpha)?.extract_forward();
        let run_heads = self.run_heads();
        let run_len: Vec<u64> = self.runs.iter().map(|&(_, len)| len).collect();

        // Every balanced input interval refines one original FL interval,
        // whose output rank is the run its image block lies in. A merge walk
        // attributes each refined interval to its original.
        let r_prime = ms.r();
        let mut run_of = Vec::with_capacity(r_prime);
        let mut run_offset = Vec::with_capacity(r_prime);
        let mut symbols = Vec::with_capacity(r_prime);
        let mut k = 0usize;
        for t in 0..r_prime {
            while fl.p()[k + 1] <= ms.starts()[t] {
                k += 1;
            }
            let run = fl.tau()[k];
            run_of.push(run);
            run_offset.push(ms.images()[t] - run_heads[run]);
            // The F symbol over an FL input interval is the symbol of the
            // run it maps into (LF sends a row to a row whose first symbol
            // is the BWT symbol it came from).
            symbols.push(self.runs[run].0);
        }

        // Text position 0 sits in the row whose BWT symbol is the
        // terminator, i.e. the head of the unique terminator run.
        let term = self.terminator();
        let term_run = self
            .runs
            .iter()
            .position(|&(s, _)| s == term)
            .expect("terminator run exists");
        let start_row = run_heads[term_run];
        let start_rank = ms.locate(start_row)?;

        let sample_step = n.div_ceil(r as u64);
        let mut samples = Vec::with_capacity(r + 1);
        let mut irreducible = Vec::with_capacity(r);
        let mut head_run = Vec::with_capacity(r);
        let mut tail_sa = vec![0u64; r];
        let mut tail_rank = vec![0usize; r];
        let mut tails_seen = 0usize;
        let mut sa_last = 0u64;

        let (mut v, mut t) = (start_row, start_rank);
        let (mut rho, mut delta) = (term_run, 0u64);
        for s in 0..n {
            if delta == 0 {
                irreducible.push(s);
                head_run.push(rho);
            }
            if delta + 1 == run_len[rho] {
                tail_sa[rho] = s;
                tail_rank[rho] = tails_seen;
                tails_seen += 1;
            }
            if s % sample_step == 0 {
                samples.push((v, t));
            }
            if v == n - 1 {
                sa_last = s;
            }
            // The next row is the image of (v, t); its run and offset follow
            // from where interval t's image block sits inside its run.
            rho = run_of[t];
            delta = run_offset[t] + (v - ms.starts()[t]);
            let (v2, t2) = ms.move_query(v, t);
            v = v2;
            t = t2;
        }
        debug_assert_eq!(v, start_row, "text walk must close its cycle");
        debug_assert_eq!(irreducible.len(), r, "one head visit per run");
        debug_assert_eq!(tails_seen, r, "one tail visit per run");

        // φ at irreducible position m: the suffix one lex rank above the
        // head of run ρ_m is the tail of the previous run (wrapping), whose
        // suffix-array value and visit ordinal the walk just recorded.
        let mut phi_images = Vec::with_capacity(r);
        let mut phi_tau = Vec::with_capacity(r);
        for &rho_m in &head_run {
            let prev = (rho_m + r - 1) % r;
            phi_images.push(tail_sa[prev]);
            phi_tau.push(tail_rank[prev]);
        }

        Ok(FlWalk {
            fl: ms,
            symbols,
            start: (start_row, start_rank),
            irreducible,
            phi_images,
            phi_tau,
            samples,
            sample_step,
            sa_last,
        })
    }

    /// Serializes to the `RLBW0001` byte format.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        put_u64(w, self.r() as u64)?;
        for &(s, len) in &self.runs {
            w.write_all(&[s])?;
            put_u64(w, len)?;
        }
        Ok(())
    }

    /// Deserializes from the `RLBW0001` byte format, re-validating the run
    /// list.
    pub fn read_binary<R: Read>(r: R) -> Result<Rlbwt> {
        let mut cr = CountingReader::new(r);
        cr.magic(MAGIC)?;
        let at = cr.offset();
        let count = cr.u64()?;
        if count == 0 {
            return Err(Error::format(at, "run count must be positive"));
        }
        let count = usize::try_from(count)
            .map_err(|_| Error::format(at, "run count does not fit in memory"))?;
        let mut runs = Vec::new();
        for _ in 0..count {
            let sym = cr.u8()?;
            let at = cr.offset();
            let len = cr.u64()?;
            if len == 0 {
                return Err(Error::format(at, "run length must be positive"));
            }
            runs.push((sym, len));
        }
        cr.expect_end()?;
        Rlbwt::new(runs).map_err(|e| match e {
            Error::Validation { what } => Error::format(16, what),
            other => other,
        })
    }

    /// Writes the line-oriented text format: one `<symbol> <length>` pair
    /// per line, with non-graphic symbols escaped as `\xHH`.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        for &(s, len) in &self.runs {
            if s.is_ascii_graphic() && s != b'\\' {
                writeln!(w, "{} {len}", s as char)?;
            } else {
                writeln!(w, "\\x{s:02x} {len}")?;
            }
        }
        Ok(())
    }

    /// Reads the text format produced by [`Rlbwt::write_text`].
    ///
    /// Blank lines and lines starting with `#` are skipped. A symbol token
    /// is either one graphic ASCII character standing for itself or an
    /// escape `\xHH` (required for the conventional `\x00` terminator,
    /// spaces, and control bytes).
    pub fn read_text<R: BufRead>(r: R) -> Result<Rlbwt> {
        let mut runs = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx as u64 + 1;
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut parts = body.split_whitespace();
            let (token, count) = match (parts.next(), parts.next(), parts.next()) {
                (Some(t), Some(c), None) => (t, c),
                _ => {
                    return Err(Error::parse(
                        lineno,
                        "expected exactly two fields: <symbol> <length>",
                    ))
                }
            };
            let sym = parse_symbol_token(token)
                .ok_or_else(|| Error::parse(lineno, format!("bad symbol token {token:?}")))?;
            let len: u64 = count.parse().map_err(|_| {
                Error::parse(lineno, format!("bad run length {count:?}"))
            })?;
            if len == 0 {
                return Err(Error::parse(lineno, "run length must be positive"));
            }
            runs.push((sym, len));
        }
        Rlbwt::new(runs)
    }
}

fn parse_symbol_token(token: &str) -> Option<u8> {
    let bytes = token.as_bytes();
    match bytes {
        [b] if b.is_ascii_graphic() && *b != b'\\' => Some(*b),
        [b'\\', b'x', h, l] => {
            let hi = (*h as char).to_digit(16)?;
            let lo = (*l as char).to_digit(16)?;
            Some((hi * 16 + lo) as u8)
        }
        _ => None,
    }
}

/// Everything one balanced pass over the text order yields (see
/// [`Rlbwt::fl_walk`]): the structure to keep walking with, and the φ and
/// sampling data the longest-common-prefix machinery builds on.
pub(crate) struct FlWalk {
    /// Balanced FL move structure (row → next text position's row).
    pub(crate) fl: MoveStructure,
    /// First-column symbol per balanced FL input interval: the text
    /// character at any position whose row lies in that interval.
    pub(crate) symbols: Vec<u8>,
    /// Row of text position 0 and its interval rank.
    pub(crate) start: (u64, usize),
    /// Irreducible positions in increasing order (`r` of them).
    pub(crate) irreducible: Vec<u64>,
    /// φ at each irreducible position.
    pub(crate) phi_images: Vec<u64>,
    /// Rank of each φ image among all of them (output order of φ's map).
    pub(crate) phi_tau: Vec<usize>,
    /// `(row, rank)` of text positions `0, q, 2q, …` — inverse suffix array
    /// samples for seeking.
    pub(crate) samples: Vec<(u64, usize)>,
    /// The sampling stride `q = ⌈n/r⌉`.
    pub(crate) sample_step: u64,
    /// Suffix array value of the last row: the lexicographically largest
    /// suffix, where descending emission starts.
    pub(crate) sa_last: u64,
}
