//! Charts, obstruction sets and Ramsey brackets against the published tables.

use std::collections::BTreeSet;

use gridcolor::cache::VerdictCache;
use gridcolor::obstruction::{
    bipartite_ramsey2, chart, compute_obs, default_max_dim, Atlas, Chart, Classifier, ClassifyOptions, Status,
};
use gridcolor::search::SearchBudget;
use gridcolor::GridDims;

fn options(assume_rfc: bool) -> ClassifyOptions {
    ClassifyOptions {
        budget: SearchBudget {
            max_nodes: 200_000,
            wall_ms: 60_000,
            threads: 4,
        },
        assume_rfc,
        search: true,
    }
}

/// `(rows, cols, letters)` from a fixture: a `# rows A..B cols C..D` header
/// then one `n LETTERS` line per row.
fn fixture(name: &str) -> ((usize, usize), (usize, usize), Vec<String>) {
    let text = std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let mut lines = text.lines();
    let nums: Vec<usize> = lines
        .next()
        .unwrap()
        .split(|ch: char| !ch.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().unwrap())
        .collect();
    let rows = lines
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    ((nums[0], nums[1]), (nums[2], nums[3]), rows)
}

fn dims(list: &[(usize, usize)]) -> BTreeSet<GridDims> {
    list.iter().map(|&(n, m)| GridDims { n, m }).collect()
}

fn with_transposes(list: &[(usize, usize)]) -> BTreeSet<GridDims> {
    list.iter()
        .flat_map(|&(n, m)| [GridDims { n, m }, GridDims { n: m, m: n }])
        .collect()
}

fn check_invariants(ch: &Chart) {
    for (i, row) in ch.cells.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s == Status::Colorable && i > 0 {
                assert_eq!(ch.cells[i - 1][j], Status::Colorable, "C not closed downward");
            }
            if s == Status::NotColorable && j + 1 < row.len() {
                assert_eq!(row[j + 1], Status::NotColorable, "N not closed upward");
            }
        }
    }
}

#[test]
fn two_color_chart_and_obstructions() {
    let cl = Classifier::new(2, options(false));
    let (rows, cols, want) = fixture("chart-c2.txt");
    let ch = chart(&cl, rows, cols);
    assert_eq!(ch.rows(), want);
    check_invariants(&ch);
    let report = compute_obs(&cl, 8);
    assert!(report.complete);
    assert_eq!(
        report.minimal.iter().copied().collect::<BTreeSet<_>>(),
        dims(&[(7, 3), (5, 5), (3, 7)])
    );
}

#[test]
fn three_color_chart_and_obstructions() {
    let cl = Classifier::new(3, options(false));
    let (rows, cols, want) = fixture("chart-c3.txt");
    let ch = chart(&cl, rows, cols);
    assert_eq!(ch.rows(), want);
    check_invariants(&ch);
    let report = compute_obs(&cl, 20);
    assert!(report.complete && report.unknown.is_empty());
    let obs3 = with_transposes(&[(19, 4), (16, 5), (13, 7), (11, 10)]);
    assert_eq!(report.minimal.iter().copied().collect::<BTreeSet<_>>(), obs3);
    for d in &report.minimal {
        assert_eq!(cl.classify(d.n - 1, d.m).status, Status::Colorable);
        assert_eq!(cl.classify(d.n, d.m - 1).status, Status::Colorable);
    }
    assert!(report.minimal.len() <= 2 * 9);
}

#[test]
fn four_color_chart_frontier_and_obstructions() {
    let cl = Classifier::new(4, options(false));
    let atlas = Atlas::build(&cl, default_max_dim(4));
    let (rows, cols, want) = fixture("chart-c4.txt");
    let ch = atlas.chart(rows, cols);
    assert_eq!(ch.rows(), want);
    check_invariants(&ch);

    let square = atlas.chart((5, 41), (5, 41));
    check_invariants(&square);
    for n in 5..=41 {
        for m in 5..=41 {
            assert_eq!(square.at(n, m), square.at(m, n), "asymmetric at ({n},{m})");
        }
    }

    let unknown: BTreeSet<GridDims> = atlas.unknown().into_iter().collect();
    assert_eq!(unknown, with_transposes(&[(17, 17), (17, 18), (18, 18), (21, 12)]));
    let confirmed = with_transposes(&[(41, 5), (31, 6), (29, 7), (25, 9), (23, 10), (22, 11)]);
    assert_eq!(atlas.minimal().into_iter().collect::<BTreeSet<_>>(), confirmed);

    let v = atlas.get(19, 17);
    assert_eq!((v.status, v.rule.as_str()), (Status::NotColorable, "profile-cascade"));
    assert!(v.search.is_none());
}

#[test]
fn rfc_conditional_obstructions() {
    let cl = Classifier::new(4, options(true));
    let report = compute_obs(&cl, default_max_dim(4));
    assert!(report.complete);
    let listed = [
        (41, 5),
        (31, 6),
        (29, 7),
        (25, 9),
        (23, 10),
        (22, 11),
        (21, 13),
        (19, 17),
    ];
    assert_eq!(
        report.minimal.iter().copied().collect::<BTreeSet<_>>(),
        with_transposes(&listed)
    );
}

#[test]
fn ramsey_brackets() {
    let want = [(2, 5, 5), (3, 11, 11), (4, 17, 19)];
    for (c, lo, hi) in want {
        let r = bipartite_ramsey2(&Classifier::new(c, options(false)));
        assert_eq!((r.lower, r.upper), (lo, hi), "c = {c}");
    }
    let no_search = ClassifyOptions {
        search: false,
        ..options(false)
    };
    for c in 2..=6u32 {
        let r = bipartite_ramsey2(&Classifier::new(c, no_search));
        assert!(r.upper <= (c * c + c) as usize, "c = {c}");
        assert!(r.lower <= r.upper);
    }
    // Prime powers: the affine-plane construction colors G_{q^2, q^2}.
    for (c, q2) in [(2u32, 4usize), (3, 9), (4, 16), (5, 25)] {
        let r = bipartite_ramsey2(&Classifier::new(c, no_search));
        assert!(r.lower > q2, "c = {c}");
    }
}

#[test]
fn classifier_examples() {
    let three = Classifier::new(3, options(false));
    assert_eq!(three.classify(10, 11).status, Status::NotColorable);
    let v = three.classify(15, 6);
    assert_eq!((v.status, v.rule.as_str()), (Status::Colorable, "construction"));
    let four = Classifier::new(4, options(false));
    assert_eq!(four.classify(18, 18).status, Status::Unknown);
}

#[test]
fn cache_file_round_trip() {
    let path = std::env::temp_dir().join(format!("gridcolor-cache-{}.json", std::process::id()));
    let _ = std::fs::remove_file(&path);
    {
        let cache = VerdictCache::open(&path).unwrap();
        let cl = Classifier::new(3, options(false)).with_cache(&cache);
        compute_obs(&cl, 12);
        assert!(!cache.is_empty());
        cache.save().unwrap();
    }
    let cache = VerdictCache::open(&path).unwrap();
    let hit = cache.get(10, 11, 3, false).unwrap();
    assert_eq!(hit.status, Status::NotColorable);
    let cl = Classifier::new(3, options(false)).with_cache(&cache);
    assert_eq!(cl.classify(11, 12).rule, "containment");
    let _ = std::fs::remove_file(&path);
}
