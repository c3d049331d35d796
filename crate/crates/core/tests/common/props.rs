//! Randomized property suites with fixed seeds, shared by the property
//! tests and the acceptance target. Each suite returns how many instances
//! it checked or the first violation.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use gridcolor::constructions::{expand_strong, strong_general};
use gridcolor::grid::verify_strong;
use gridcolor::obstruction::{default_max_dim, Classifier, ClassifyOptions, Status};
use gridcolor::partition::{gf_line_partition, odd_partition, round_robin, PairPartition};
use gridcolor::search::SearchBudget;
use gridcolor::{Coloring, GridDims};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub type SuiteResult = Result<u64, String>;

fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn drive<S: Strategy>(
    cases: u32,
    seed: u8,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), String>,
) -> SuiteResult {
    let mut r = runner(cases, seed);
    r.run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map(|_| cases as u64)
        .map_err(|e| e.to_string())
}

/// Naive monochromatic rectangle test, independent of the library.
pub fn naive_valid(x: &Coloring) -> bool {
    let GridDims { n, m } = x.dims();
    for r1 in 1..=n {
        for r2 in r1 + 1..=n {
            for j1 in 1..=m {
                for j2 in j1 + 1..=m {
                    let t = x.get(r1, j1);
                    if x.get(r1, j2) == t && x.get(r2, j1) == t && x.get(r2, j2) == t {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn classifier(c: u32) -> &'static Classifier<'static> {
    static CELLS: [OnceLock<Classifier<'static>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CELLS[c as usize - 2].get_or_init(|| {
        Classifier::new(
            c,
            ClassifyOptions {
                budget: SearchBudget::nodes(1),
                assume_rfc: false,
                search: false,
            },
        )
    })
}

fn cell_pair() -> impl Strategy<Value = (u32, usize, usize, usize, usize)> {
    (2u32..=4).prop_flat_map(|c| {
        let hi = default_max_dim(c);
        (Just(c), 1..=hi, 1..=hi).prop_flat_map(|(c, n, m)| (Just(c), Just(n), Just(m), 1..=n, 1..=m))
    })
}

/// A grid and one of its subgrids never get C above N.
pub fn chart_monotonicity(cases: u32) -> SuiteResult {
    drive(cases, 11, cell_pair(), |(c, n, m, n2, m2)| {
        let cl = classifier(c);
        let big = cl.classify(n, m).status;
        let small = cl.classify(n2, m2).status;
        if big == Status::Colorable && small == Status::NotColorable {
            return Err(format!("c={c}: G_{{{n},{m}}} C but G_{{{n2},{m2}}} N"));
        }
        Ok(())
    })
}

pub fn transpose_symmetry(cases: u32) -> SuiteResult {
    drive(cases, 12, cell_pair(), |(c, n, m, _, _)| {
        let cl = classifier(c);
        let (a, b) = (cl.classify(n, m).status, cl.classify(m, n).status);
        if a != b {
            return Err(format!("c={c}: G_{{{n},{m}}} {a:?} but transpose {b:?}"));
        }
        Ok(())
    })
}

/// A strong coloring from the general construction, rows and columns
/// shuffled, sometimes with one cell recolored.
fn strong_like() -> impl Strategy<Value = (Coloring, u32)> {
    (2u32..=6)
        .prop_flat_map(|c| (Just(c), 1..=c))
        .prop_flat_map(|(c, cp)| {
            let base = strong_general(c, cp).unwrap();
            let GridDims { n, m } = base.dims();
            let rows = Just((1..=n).collect::<Vec<_>>()).prop_shuffle();
            let cols = Just((1..=m).collect::<Vec<_>>()).prop_shuffle();
            let flip = prop::option::weighted(0.5, (1..=n, 1..=m, 1..=c));
            (Just(base), Just(cp), rows, cols, flip)
        })
        .prop_map(|(base, cp, rows, cols, flip)| {
            let x = Coloring::from_fn(base.dims(), base.palette(), |i, j| match flip {
                Some((fi, fj, t)) if fi == i && fj == j => t,
                _ => base.get(rows[i - 1], cols[j - 1]),
            })
            .unwrap();
            (x, cp)
        })
}

pub fn strong_implies_valid(cases: u32) -> SuiteResult {
    drive(cases, 13, strong_like(), |(x, cp)| {
        if verify_strong(&x, cp) && !naive_valid(&x) {
            return Err(format!("strong for c'={cp} but has a rectangle:\n{x:?}"));
        }
        Ok(())
    })
}

pub fn expand_width_law(cases: u32) -> SuiteResult {
    drive(cases, 14, strong_like(), |(x, cp)| {
        let c = x.palette();
        match expand_strong(&x, cp) {
            Ok(y) => {
                let want = GridDims {
                    n: x.dims().n,
                    m: (c / cp) as usize * x.dims().m,
                };
                if y.dims() != want {
                    return Err(format!("expanded to {} instead of {want}", y.dims()));
                }
                if !naive_valid(&y) {
                    return Err(format!("expansion of a strong ({c},{cp}) coloring has a rectangle"));
                }
            }
            Err(_) if verify_strong(&x, cp) => return Err("strong input rejected".into()),
            Err(_) => {}
        }
        Ok(())
    })
}

/// Blocks within a part are disjoint and equal; pairs never repeat across
/// parts; with `full`, every pair of `[v]` is covered.
fn check_partition(pp: &PairPartition, full: bool) -> Result<(), String> {
    let mut pairs = HashSet::new();
    for (i, part) in pp.parts.iter().enumerate() {
        let size = part[0].len();
        let mut seen = HashSet::new();
        for b in part {
            if b.len() != size {
                return Err(format!("part {i}: unequal blocks"));
            }
            for &x in b {
                if x == 0 || x > pp.v || !seen.insert(x) {
                    return Err(format!("part {i}: point {x} repeated or out of range"));
                }
            }
            for (k, &x) in b.iter().enumerate() {
                for &y in &b[k + 1..] {
                    if !pairs.insert((x.min(y), x.max(y))) {
                        return Err(format!("pair {{{x},{y}}} in two parts"));
                    }
                }
            }
        }
    }
    if full && pairs.len() != pp.v * (pp.v - 1) / 2 {
        return Err(format!("{} of {} pairs covered", pairs.len(), pp.v * (pp.v - 1) / 2));
    }
    Ok(())
}

pub fn round_robin_invariants(cases: u32) -> SuiteResult {
    drive(cases, 15, 1usize..=12, |n| {
        let rr = round_robin(n);
        if rr.v != 2 * n || rr.parts.len() != 2 * n - 1 || rr.parts.iter().any(|p| p.len() != n) {
            return Err(format!("round_robin({n}) has the wrong shape"));
        }
        check_partition(&rr, true)
    })
}

pub fn odd_partition_invariants(cases: u32) -> SuiteResult {
    drive(cases, 16, 1usize..=12, |n| {
        let op = odd_partition(n);
        if op.v != 2 * n + 1 || op.parts.len() != 2 * n + 1 || op.parts.iter().any(|p| p.len() != n) {
            return Err(format!("odd_partition({n}) has the wrong shape"));
        }
        check_partition(&op, true)
    })
}

/// Admissible `(p, s, d)` with `p^(ds) <= 4096`.
fn field_params() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
        for s in 1..=12u32 {
            for d in 2..=12u32 {
                if p.checked_pow(s * d).is_some_and(|t| t <= 4096) {
                    out.push((p, s, d));
                }
            }
        }
    }
    out
}

type Checked = Result<Arc<PairPartition>, String>;

/// Each admissible partition is built and fully checked once.
fn checked_partition(p: u64, s: u32, d: u32) -> Checked {
    type Memo = Mutex<HashMap<(u64, u32, u32), Checked>>;
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = memo.lock().unwrap().get(&(p, s, d)) {
        return hit.clone();
    }
    let built = gf_line_partition(p, s, d).map_err(|e| e.to_string()).and_then(|pp| {
        let q = p.pow(s) as usize;
        let classes = (q.pow(d) - 1) / (q - 1);
        if pp.parts.len() != classes || pp.parts.iter().any(|c| c.len() != q.pow(d - 1) || c[0].len() != q) {
            return Err(format!("GF({p}^{s})^{d}: wrong class structure"));
        }
        // With no repeated pair (sampled below), this count means every pair is covered.
        let pairs: usize = pp.parts.iter().flatten().map(|b| b.len() * (b.len() - 1) / 2).sum();
        if pairs != pp.v * (pp.v - 1) / 2 {
            return Err(format!("GF({p}^{s})^{d}: {pairs} pairs in blocks"));
        }
        Ok(Arc::new(pp))
    });
    memo.lock().unwrap().insert((p, s, d), built.clone());
    built
}

/// Two random lines: at most one common point across classes, none within
/// a class.
pub fn line_partition_invariants(cases: u32) -> SuiteResult {
    let params = field_params();
    let strategy = (
        prop::sample::select(params),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
    );
    drive(cases, 17, strategy, |((p, s, d), i, a, j, b)| {
        let pp = checked_partition(p, s, d)?;
        let (ci, cj) = (i.index(pp.parts.len()), j.index(pp.parts.len()));
        let (la, lb) = (
            &pp.parts[ci][a.index(pp.parts[ci].len())],
            &pp.parts[cj][b.index(pp.parts[cj].len())],
        );
        let common = la.iter().filter(|x| lb.contains(x)).count();
        let ok = if ci != cj { common <= 1 } else { la == lb || common == 0 };
        if !ok {
            return Err(format!(
                "GF({p}^{s})^{d}: lines {la:?} and {lb:?} share {common} points"
            ));
        }
        Ok(())
    })
}

pub type Suite = (&'static str, fn(u32) -> SuiteResult, u32);

/// Every suite with its instance count; the total is at least 10^4.
pub fn all_suites() -> Vec<Suite> {
    vec![
        ("chart monotonicity", chart_monotonicity, 3000),
        ("transpose symmetry", transpose_symmetry, 2000),
        ("strong implies valid", strong_implies_valid, 2000),
        ("expand_strong width law", expand_width_law, 1500),
        ("round_robin invariants", round_robin_invariants, 600),
        ("odd_partition invariants", odd_partition_invariants, 600),
        ("gf_line_partition invariants", line_partition_invariants, 2000),
    ]
}
