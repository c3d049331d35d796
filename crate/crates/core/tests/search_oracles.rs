//! Exact search checked against naive test-only oracles.

use gridcolor::grid::{find_rectangle, verify_coloring};
use gridcolor::search::{colorable, exists_rect_free_of_size, maxrf_exact, SearchBudget, Verdict};

fn budget() -> SearchBudget {
    SearchBudget::nodes(50_000_000)
}

/// Largest rectangle-free subset by trying every subset of cells.
fn maxrf_subsets(n: usize, m: usize) -> usize {
    let cells = n * m;
    let mut best = 0;
    for mask in 0u32..(1 << cells) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let row = |i: usize| (mask >> (i * m)) & ((1 << m) - 1);
        let ok = (0..n).all(|i| (i + 1..n).all(|k| (row(i) & row(k)).count_ones() <= 1));
        if ok {
            best = size;
        }
    }
    best
}

/// Column-by-column branch and bound with no symmetry reduction.
fn maxrf_columns(n: usize, m: usize) -> usize {
    fn go(n: usize, m: usize, cols: &mut Vec<u32>, size: usize, best: &mut usize) {
        if size + (m - cols.len()) * n <= *best {
            return;
        }
        if cols.len() == m {
            *best = size;
            return;
        }
        for s in 0u32..(1 << n) {
            if cols.iter().all(|&c| (c & s).count_ones() <= 1) {
                cols.push(s);
                go(n, m, cols, size + s.count_ones() as usize, best);
                cols.pop();
            }
        }
    }
    let mut best = 0;
    go(n, m, &mut Vec::new(), 0, &mut best);
    best
}

/// Cell-by-cell coloring search that re-checks every rectangle through the
/// newest cell.
fn naive_colorable(n: usize, m: usize, c: u8) -> bool {
    fn go(n: usize, m: usize, c: u8, g: &mut Vec<u8>, k: usize) -> bool {
        if k == n * m {
            return true;
        }
        let (i, j) = (k / m, k % m);
        for t in 1..=c {
            g[k] = t;
            let clash = (0..i).any(|r| g[r * m + j] == t && (0..j).any(|l| g[i * m + l] == t && g[r * m + l] == t));
            if !clash && go(n, m, c, g, k + 1) {
                return true;
            }
        }
        g[k] = 0;
        false
    }
    go(n, m, c, &mut vec![0; n * m], 0)
}

#[test]
fn maxrf_matches_subset_enumeration() {
    for n in 1..=4 {
        for m in 1..=4 {
            let out = maxrf_exact(n, m, &budget()).unwrap();
            assert_eq!(out.exact(), Some(maxrf_subsets(n, m)), "maxrf({n},{m})");
            assert!(find_rectangle(&out.witness).is_none());
        }
    }
    assert_eq!(maxrf_exact(3, 5, &budget()).unwrap().exact(), Some(maxrf_subsets(3, 5)));
}

#[test]
fn maxrf_matches_column_oracle() {
    for (n, m) in [(5, 5), (4, 6), (5, 6), (3, 8), (4, 7)] {
        let out = maxrf_exact(n, m, &budget()).unwrap();
        assert_eq!(out.exact(), Some(maxrf_columns(n, m)), "maxrf({n},{m})");
    }
}

#[test]
fn colorable_matches_naive_dfs() {
    for n in 3..=6 {
        for m in 3..=6 {
            let want = naive_colorable(n, m, 2);
            let out = colorable(n, m, 2, &budget()).unwrap();
            assert_eq!(out.verdict.is_found(), want, "G_{{{n},{m}}} c=2");
            assert!(out.verdict.is_found() || out.verdict.is_refuted());
            if let Verdict::Found(x) = out.verdict {
                assert!(verify_coloring(&x));
            }
        }
    }
    for (n, m) in [(7, 3), (3, 7), (4, 6)] {
        assert_eq!(
            colorable(n, m, 2, &budget()).unwrap().verdict.is_found(),
            naive_colorable(n, m, 2)
        );
    }
}

#[test]
fn three_color_boundaries() {
    assert!(colorable(18, 4, 3, &budget()).unwrap().verdict.is_found());
    assert!(colorable(19, 4, 3, &budget()).unwrap().verdict.is_refuted());
    assert!(colorable(4, 19, 3, &budget()).unwrap().verdict.is_refuted());
}

#[test]
fn verdicts_do_not_depend_on_threads() {
    let cases = [(7, 3, 2), (6, 4, 2), (5, 5, 2), (15, 5, 3), (16, 5, 3)];
    for (n, m, c) in cases {
        let one = colorable(n, m, c, &budget()).unwrap().verdict;
        let four = colorable(n, m, c, &SearchBudget { threads: 4, ..budget() })
            .unwrap()
            .verdict;
        assert_eq!(one.tag(), four.tag(), "G_{{{n},{m}}} c={c}");
    }
    for (n, m, a) in [(10, 10, 34), (10, 10, 35), (11, 10, 37), (8, 8, 25)] {
        let one = exists_rect_free_of_size(n, m, a, &budget()).unwrap().verdict;
        let four = exists_rect_free_of_size(n, m, a, &SearchBudget { threads: 4, ..budget() })
            .unwrap()
            .verdict;
        assert_eq!(one.tag(), four.tag(), "({n},{m},{a})");
    }
}

#[test]
fn refutation_is_monotone_in_size() {
    for (n, m) in [(5, 5), (6, 6), (6, 8), (7, 7)] {
        let mut refuted = false;
        for a in 1..=n * m {
            let v = exists_rect_free_of_size(n, m, a, &budget()).unwrap().verdict;
            if refuted {
                assert!(v.is_refuted(), "({n},{m},{a}) after a refutation");
            }
            refuted |= v.is_refuted();
        }
        assert!(refuted);
    }
}
