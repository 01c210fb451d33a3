//! Acceptance gate: ten numbered criteria covering balance soundness, size
//! and work bounds, query correctness, the LCP pipeline, serialization
//! robustness, and oracle cross-checks. Each criterion is one test whose
//! pass/fail line is the gate; the heavy corpora are built once and shared.

use std::sync::OnceLock;

use movestruct::oracle::{
    naive_balance, naive_suffix_structures, random_runny_map, random_text, SplitMix64,
};
use movestruct::{
    balance, irreducible_plcp, irreducible_plcp_with_stats, lcp_array, lcp_stream,
    read_lcp_binary, write_lcp_binary, Error, MoveStructure, Rlbwt,
};

const ALPHAS: [u64; 4] = [2, 4, 8, 16];
const MAP_CORPUS_SIZE: usize = 1000;
const TEXT_CORPUS_SIZE: usize = 500;

/// Everything measured on one (map, α) instance of the shared corpus.
struct MapOutcome {
    n: u64,
    r: u64,
    alpha: u64,
    r_prime: u64,
    insertions: u64,
    max_out_weight: u64,
    max_in_weight: u64,
    walk_visits: u64,
    walk_visits_initial: u64,
    split_work_max: u64,
    max_scan: u64,
    forward_ok: bool,
    inverse_ok: bool,
    composition_ok: bool,
}

/// Opposite-side starts strictly inside each gap of `gaps` (both arrays
/// sorted; `gaps` includes the sentinel, `elems` must not).
fn max_gap_weight(gaps: &[u64], elems: &[u64]) -> u64 {
    gaps.windows(2)
        .map(|w| {
            let a = elems.partition_point(|&v| v <= w[0]);
            let b = elems.partition_point(|&v| v < w[1]);
            (b - a) as u64
        })
        .max()
        .unwrap_or(0)
}

/// Exhaustively evaluates `ms` over its whole domain with carried interval
/// ranks, returning whether every answer matched `expected` and the longest
/// re-location scan seen.
fn exhaustive_check(ms: &MoveStructure, expected: &[u64]) -> (bool, u64) {
    let mut ok = true;
    let mut max_scan = 0u64;
    for j in 0..ms.r() {
        for i in ms.starts()[j]..ms.starts()[j + 1] {
            let (img, k, steps) = ms.move_query_traced(i, j);
            max_scan = max_scan.max(steps);
            ok &= img == expected[i as usize];
            ok &= ms.starts()[k] <= img && img < ms.starts()[k + 1];
        }
    }
    (ok, max_scan)
}

fn map_corpus() -> &'static Vec<MapOutcome> {
    static CORPUS: OnceLock<Vec<MapOutcome>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = SplitMix64::new(0xacce_0001);
        let mut outcomes = Vec::with_capacity(MAP_CORPUS_SIZE * ALPHAS.len());
        for _ in 0..MAP_CORPUS_SIZE {
            let n = 1 + rng.below(4096);
            let target_r = (1 + rng.below(n)) as usize;
            let map = random_runny_map(&mut rng, n, target_r);
            let forward = map.expand();
            let mut inverse = vec![0u64; forward.len()];
            for (i, &v) in forward.iter().enumerate() {
                inverse[v as usize] = i as u64;
            }
            for &alpha in &ALPHAS {
                let bp = balance(&map, alpha).expect("balancing must succeed");
                let p = bp.input_starts();
                let q = bp.output_starts();
                let fwd = bp.extract_forward();
                let inv = bp.extract_inverse();
                let (forward_ok, scan_f) = exhaustive_check(&fwd, &forward);
                let (inverse_ok, scan_i) = exhaustive_check(&inv, &inverse);
                // Compose forward-then-inverse through the public pair API
                // on a position sample (full composition is implied by the
                // two exhaustive checks against mutually inverse arrays).
                let mut composition_ok = true;
                for _ in 0..32 {
                    let i = rng.below(n);
                    let j = fwd.locate(i).unwrap();
                    let (v, _) = fwd.move_query(i, j);
                    let k = inv.locate(v).unwrap();
                    let (back, _) = inv.move_query(v, k);
                    composition_ok &= back == i;
                }
                let st = bp.stats();
                outcomes.push(MapOutcome {
                    n,
                    r: map.r() as u64,
                    alpha,
                    r_prime: bp.r_prime() as u64,
                    insertions: st.insertions,
                    max_out_weight: max_gap_weight(&q, &p[..p.len() - 1]),
                    max_in_weight: max_gap_weight(&p, &q[..q.len() - 1]),
                    walk_visits: st.walk_visits,
                    walk_visits_initial: st.walk_visits_initial,
                    split_work_max: st.split_work_max,
                    max_scan: scan_f.max(scan_i),
                    forward_ok,
                    inverse_ok,
                    composition_ok,
                });
            }
        }
        outcomes
    })
}

/// Everything measured on one text of the shared random-text corpus.
struct TextOutcome {
    n: u64,
    r: u64,
    lcp_ok: bool,
    irreducible_count_ok: bool,
    step_down_law_ok: bool,
    comparisons: u64,
    fl_steps: u64,
}

fn text_corpus() -> &'static Vec<TextOutcome> {
    static CORPUS: OnceLock<Vec<TextOutcome>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = SplitMix64::new(0xacce_0002);
        let mut outcomes = Vec::with_capacity(TEXT_CORPUS_SIZE);
        for _ in 0..TEXT_CORPUS_SIZE {
            let n = (2 + rng.below(1999)) as usize;
            let sigma = [2u8, 4, 16][rng.below(3) as usize];
            let text = random_text(&mut rng, n, sigma);
            let o = naive_suffix_structures(&text).expect("generated text is valid");
            let r = o.rlbwt.r() as u64;

            let lcp_ok = lcp_array(&o.rlbwt).unwrap() == o.lcp;

            let (plcp, stats) = irreducible_plcp_with_stats(&o.rlbwt, 4).unwrap();
            let irreducible_count_ok = plcp.positions().len() as u64 == r;
            let mut step_down_law_ok = true;
            for v in 0..n as u64 {
                let value = plcp.value_at(v).unwrap();
                step_down_law_ok &= value == o.plcp[v as usize];
                if v > 0 && plcp.positions().binary_search(&v).is_err() {
                    step_down_law_ok &= value == plcp.value_at(v - 1).unwrap() - 1;
                }
            }

            outcomes.push(TextOutcome {
                n: n as u64,
                r,
                lcp_ok,
                irreducible_count_ok,
                step_down_law_ok,
                comparisons: stats.comparisons,
                fl_steps: stats.fl_steps,
            });
        }
        outcomes
    })
}

fn banana_rlbwt() -> Rlbwt {
    // BWT of "banana$" is "annb$aa".
    Rlbwt::new(vec![(b'a', 1), (b'n', 2), (b'b', 1), (b'$', 1), (b'a', 2)]).unwrap()
}

#[test]
fn criterion_01_balance_soundness() {
    let corpus = map_corpus();
    for oc in corpus {
        assert!(
            oc.max_out_weight < 2 * oc.alpha && oc.max_in_weight < 2 * oc.alpha,
            "n={} r={} alpha={}: weights {}/{} reach 2α",
            oc.n,
            oc.r,
            oc.alpha,
            oc.max_out_weight,
            oc.max_in_weight
        );
    }
    println!(
        "criterion 01 balance soundness: PASS ({} instances, every gap weight < 2α both ways)",
        corpus.len()
    );
}

#[test]
fn criterion_02_size_bounds() {
    let corpus = map_corpus();
    for oc in corpus {
        // r' ≤ (α+1)·r/(α−1) and insertions ≤ 2r/(α−1), in exact integer
        // arithmetic (cross-multiplied).
        assert!(
            oc.r_prime as u128 * (oc.alpha - 1) as u128 <= (oc.alpha + 1) as u128 * oc.r as u128,
            "n={} r={} alpha={}: r'={} exceeds the size bound",
            oc.n,
            oc.r,
            oc.alpha,
            oc.r_prime
        );
        assert!(
            oc.insertions as u128 * (oc.alpha - 1) as u128 <= 2 * oc.r as u128,
            "n={} r={} alpha={}: {} insertions exceed the bound",
            oc.n,
            oc.r,
            oc.alpha,
            oc.insertions
        );
    }
    println!(
        "criterion 02 size bounds: PASS ({} instances, r'(α−1) ≤ (α+1)r and ins(α−1) ≤ 2r)",
        corpus.len()
    );
}

#[test]
fn criterion_03_query_correctness() {
    let corpus = map_corpus();
    for oc in corpus {
        assert!(
            oc.forward_ok && oc.inverse_ok && oc.composition_ok,
            "n={} r={} alpha={}: query mismatch (fwd {}, inv {}, compose {})",
            oc.n,
            oc.r,
            oc.alpha,
            oc.forward_ok,
            oc.inverse_ok,
            oc.composition_ok
        );
    }
    println!(
        "criterion 03 query correctness: PASS ({} instances, exhaustive both directions + composition)",
        corpus.len()
    );
}

#[test]
fn criterion_04_constant_query_bound() {
    let corpus = map_corpus();
    let mut worst = 0u64;
    for oc in corpus {
        assert!(
            oc.max_scan < 2 * oc.alpha,
            "n={} r={} alpha={}: a query scanned {} intervals",
            oc.n,
            oc.r,
            oc.alpha,
            oc.max_scan
        );
        worst = worst.max(oc.max_scan);
    }
    println!(
        "criterion 04 constant-query bound: PASS (max scan {worst}, always < 2α)"
    );
}

#[test]
fn criterion_05_linear_work_accounting() {
    // Work bounds on the shared corpus.
    let corpus = map_corpus();
    for oc in corpus {
        assert!(
            oc.walk_visits_initial <= oc.r_prime + oc.r,
            "n={} r={} alpha={}: {} initial-node visits exceed r' + r",
            oc.n,
            oc.r,
            oc.alpha,
            oc.walk_visits_initial
        );
        assert!(
            oc.walk_visits <= (2 * oc.r_prime).saturating_sub(2).max(1),
            "n={} r={} alpha={}: {} total walk visits exceed 2r'−2",
            oc.n,
            oc.r,
            oc.alpha,
            oc.walk_visits
        );
        // Per-split work is O(α): one capped scan plus bounded repairs.
        assert!(
            oc.insertions == 0 || oc.split_work_max <= 12 * oc.alpha,
            "n={} r={} alpha={}: per-split work {} exceeds 12α",
            oc.n,
            oc.r,
            oc.alpha,
            oc.split_work_max
        );
    }

    // Doubling r at a fixed n/r ratio must double the measured step counts.
    let mut rng = SplitMix64::new(0xacce_0005);
    let mut totals = [(0u64, 0u64), (0u64, 0u64)]; // (steps, r) per size
    for (slot, &n) in [2048u64, 4096].iter().enumerate() {
        for _ in 0..48 {
            let map = random_runny_map(&mut rng, n, (n / 8) as usize);
            let bp = balance(&map, 4).unwrap();
            let st = bp.stats();
            totals[slot].0 += st.selection_steps + st.scan_visits + st.walk_visits;
            totals[slot].1 += map.r() as u64;
        }
    }
    let steps_ratio = totals[1].0 as f64 / totals[0].0 as f64;
    let r_ratio = totals[1].1 as f64 / totals[0].1 as f64;
    let normalized = steps_ratio / r_ratio;
    assert!(
        (0.8..=1.2).contains(&normalized),
        "step counts are not linear in r: steps ratio {steps_ratio:.3} vs r ratio {r_ratio:.3}"
    );
    println!(
        "criterion 05 linear work: PASS (visits within bounds; doubling r scaled steps by \
         {steps_ratio:.2} against an r ratio of {r_ratio:.2})"
    );
}

#[test]
fn criterion_06_lcp_end_to_end() {
    // Frozen end-to-end example.
    let banana = banana_rlbwt();
    assert_eq!(lcp_array(&banana).unwrap(), vec![0, 0, 1, 3, 0, 0, 2]);
    // The stream arrives in descending lexicographic order.
    let mut last: Option<u64> = None;
    lcp_stream(&banana, |lex, _| {
        if let Some(prev) = last {
            assert_eq!(lex, prev - 1);
        }
        last = Some(lex);
        Ok(())
    })
    .unwrap();
    assert_eq!(last, Some(0));

    let corpus = text_corpus();
    for (i, oc) in corpus.iter().enumerate() {
        assert!(oc.lcp_ok, "text {i} (n={} r={}): LCP mismatch", oc.n, oc.r);
    }
    println!(
        "criterion 06 LCP end-to-end: PASS (frozen example + {} random texts vs oracle)",
        corpus.len()
    );
}

#[test]
fn criterion_07_irreducible_plcp_and_reducibility() {
    let plcp = irreducible_plcp(&banana_rlbwt()).unwrap();
    assert_eq!(plcp.positions(), &[0, 1, 4, 5, 6]);
    assert_eq!(plcp.values(), &[0, 3, 0, 0, 0]);

    let corpus = text_corpus();
    for (i, oc) in corpus.iter().enumerate() {
        assert!(
            oc.irreducible_count_ok,
            "text {i}: irreducible position count differs from r"
        );
        assert!(
            oc.step_down_law_ok,
            "text {i}: PLCP step-down law violated at a reducible position"
        );
    }
    println!(
        "criterion 07 irreducible PLCP: PASS (frozen example; |I| = r and step-down law on {} texts)",
        corpus.len()
    );
}

#[test]
fn criterion_08_lcp_work_bounds() {
    let corpus = text_corpus();
    for (i, oc) in corpus.iter().enumerate() {
        assert!(
            oc.comparisons <= 2 * oc.n,
            "text {i}: {} comparisons exceed 2n = {}",
            oc.comparisons,
            2 * oc.n
        );
        assert!(
            oc.fl_steps <= 3 * oc.n + oc.r,
            "text {i}: {} steps exceed 3n + r = {}",
            oc.fl_steps,
            3 * oc.n + oc.r
        );
    }
    println!(
        "criterion 08 LCP work bounds: PASS (≤ 2n comparisons and ≤ 3n + r steps on {} texts)",
        corpus.len()
    );
}

#[test]
fn criterion_09_serialization() {
    let mut rng = SplitMix64::new(0xacce_0009);
    let mut corruptions_rejected = 0u64;
    for round in 0..100 {
        let n = 1 + rng.below(1024);
        let target_r = (1 + rng.below(n)) as usize;
        let map = random_runny_map(&mut rng, n, target_r);
        let alpha = ALPHAS[round % ALPHAS.len()];
        let ms = MoveStructure::build(&map, alpha).unwrap();

        let mut bytes = Vec::new();
        ms.write_to(&mut bytes).unwrap();
        assert_eq!(MoveStructure::read_from(&bytes[..]).unwrap(), ms);

        // Truncate at a random cut: always a clean format error.
        let cut = rng.below(bytes.len() as u64) as usize;
        match MoveStructure::read_from(&bytes[..cut]) {
            Err(Error::Format { .. }) => {}
            other => panic!("truncation at {cut} must be a format error, got {other:?}"),
        }

        // Flip one byte. Everywhere except the 4-byte α field the result is
        // provably inconsistent and must be rejected; a flipped α can only
        // loosen the balance bound, so there the requirement is only that
        // decoding stays sane.
        let at = rng.below(bytes.len() as u64) as usize;
        let mut corrupt = bytes.clone();
        corrupt[at] ^= 1 << rng.below(8);
        let alpha_field = (24..28).contains(&at);
        match MoveStructure::read_from(&corrupt[..]) {
            Err(Error::Format { .. }) => corruptions_rejected += 1,
            Err(other) => panic!("corruption at {at} must be a format error, got {other:?}"),
            Ok(decoded) => {
                assert!(
                    alpha_field,
                    "corruption at byte {at} was accepted silently"
                );
                assert_eq!(decoded.starts(), ms.starts());
                assert_eq!(decoded.images(), ms.images());
            }
        }
    }

    // The other two formats round-trip as well.
    let mut rng = SplitMix64::new(0xacce_1009);
    for _ in 0..25 {
        let n = (2 + rng.below(300)) as usize;
        let text = random_text(&mut rng, n, 4);
        let o = naive_suffix_structures(&text).unwrap();

        let mut bin = Vec::new();
        o.rlbwt.write_binary(&mut bin).unwrap();
        assert_eq!(Rlbwt::read_binary(&bin[..]).unwrap(), o.rlbwt);
        let mut txt = Vec::new();
        o.rlbwt.write_text(&mut txt).unwrap();
        assert_eq!(Rlbwt::read_text(&txt[..]).unwrap(), o.rlbwt);

        let mut lcp_bytes = Vec::new();
        write_lcp_binary(&mut lcp_bytes, &o.lcp).unwrap();
        assert_eq!(read_lcp_binary(&lcp_bytes[..]).unwrap(), o.lcp);
    }
    println!(
        "criterion 09 serialization: PASS (100 round trips; {corruptions_rejected} corruptions \
         rejected, none crashed)"
    );
}

#[test]
fn criterion_10_oracle_cross_check() {
    let mut rng = SplitMix64::new(0xacce_0010);
    for round in 0..100 {
        let n = 1 + rng.below(512);
        let target_r = (1 + rng.below(n)) as usize;
        let map = random_runny_map(&mut rng, n, target_r);
        let alpha = if round % 2 == 0 { 2 } else { 4 };
        let expected = map.expand();
        let r = map.r() as u64;

        // Reference balancer: full rescans, any-order splits.
        let nb = naive_balance(&map, alpha);
        let (out_w, in_w) = nb.max_gap_weights();
        assert!((out_w as u64) < 2 * alpha && (in_w as u64) < 2 * alpha);
        let nb_r = nb.pieces.len() as u128;
        assert!(nb_r * (alpha - 1) as u128 <= (alpha + 1) as u128 * r as u128);
        for i in 0..n {
            assert_eq!(nb.apply(i), expected[i as usize]);
        }

        // Sweep balancer on the same instance.
        let bp = balance(&map, alpha).unwrap();
        let p = bp.input_starts();
        let q = bp.output_starts();
        assert!(max_gap_weight(&q, &p[..p.len() - 1]) < 2 * alpha);
        assert!(max_gap_weight(&p, &q[..q.len() - 1]) < 2 * alpha);
        assert!(bp.r_prime() as u128 * (alpha - 1) as u128 <= (alpha + 1) as u128 * r as u128);
        let fwd = bp.extract_forward();
        let (ok, _) = exhaustive_check(&fwd, &expected);
        assert!(ok, "round {round}: sweep result evaluates incorrectly");
    }
    println!(
        "criterion 10 oracle cross-check: PASS (100 shared instances, both balancers sound)"
    );
}
