//! Exact decision procedures: rectangle-free sets of a given size, exact
//! maxrf, and c-colorability by backtracking.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{density_max, maxrf_upper, reiman_z};
use crate::error::SearchError;
use crate::grid::{binom, find_rectangle, verify_coloring, CellSet, Coloring, GridDims};

/// Limits for one search call. Exhausting any limit yields `Timeout`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub wall_ms: u64,
    pub threads: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 1_000_000_000,
            wall_ms: 600_000,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64, wall_ms: u64, threads: usize) -> Result<Self, SearchError> {
        if max_nodes == 0 {
            return Err(SearchError::InvalidBudget("max_nodes"));
        }
        if wall_ms == 0 {
            return Err(SearchError::InvalidBudget("wall_ms"));
        }
        if threads == 0 {
            return Err(SearchError::InvalidBudget("threads"));
        }
        Ok(SearchBudget {
            max_nodes,
            wall_ms,
            threads,
        })
    }

    /// Single-threaded with the given node limit and the default wall clock.
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes: max_nodes.max(1),
            threads: 1,
            ..SearchBudget::default()
        }
    }

    pub fn single_threaded(self) -> Self {
        SearchBudget { threads: 1, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict<W> {
    Found(W),
    Refuted,
    Timeout,
}

impl<W> Verdict<W> {
    pub fn is_found(&self) -> bool {
        matches!(self, Verdict::Found(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Found(_) => "found",
            Verdict::Refuted => "refuted",
            Verdict::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome<W> {
    pub verdict: Verdict<W>,
    pub stats: SearchStats,
}

/// Node counter and stop flags shared by all workers.
struct Control {
    nodes: AtomicU64,
    stop: AtomicBool,
    exhausted: AtomicBool,
    start: Instant,
    max_nodes: u64,
    wall: Duration,
}

impl Control {
    fn new(budget: &SearchBudget) -> Self {
        Control {
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            exhausted: AtomicBool::new(false),
            start: Instant::now(),
            max_nodes: budget.max_nodes,
            wall: Duration::from_millis(budget.wall_ms),
        }
    }

    /// Count one node; false once the search should unwind.
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let k = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if k > self.max_nodes || (k & 0x3ff == 0 && self.start.elapsed() > self.wall) {
            self.exhausted.store(true, Ordering::Relaxed);
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    fn halt(&self) {
        self.stop.store(true, Ordering::Relaxed);
    }

    fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.nodes.load(Ordering::Relaxed).min(self.max_nodes),
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }

    fn finish<W>(&self, found: Option<W>) -> SearchOutcome<W> {
        let verdict = match found {
            Some(w) => Verdict::Found(w),
            None if self.exhausted.load(Ordering::Relaxed) => Verdict::Timeout,
            None => Verdict::Refuted,
        };
        SearchOutcome {
            verdict,
            stats: self.stats(),
        }
    }
}

/// Width limit of the bitmask searches.
pub const MAX_SIDE: usize = 64;

pub(crate) fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn low_bits(t: usize) -> u64 {
    if t >= 64 {
        u64::MAX
    } else {
        (1u64 << t) - 1
    }
}

/// Column lex key: row 0 is the most significant position.
fn lex_key(col: u64) -> u64 {
    col.reverse_bits()
}

#[derive(Clone)]
struct RfState {
    cols: Vec<u64>,
    sizes: Vec<usize>,
    /// Bit j set when column j holds the row.
    sig: Vec<u64>,
    /// Rows `0..used` are nonfresh; fresh rows form the suffix.
    used: usize,
    total: usize,
    pairs: usize,
}

/// Column-by-column branch and bound over a normal form reachable from any
/// rectangle-free set by permuting rows and columns:
///
/// * columns by size, descending; equal sizes in descending lex order;
/// * rows in descending lex order, so rows with equal history are
///   contiguous and a new column takes the topmost rows of each class.
///
/// Sorting rows and sorting columns (by size, then content) each weakly
/// increase the row-major bit string, so alternating the two sorts reaches
/// this form.
struct Rf<'a> {
    n: usize,
    m: usize,
    a: usize,
    /// `ub[f][k]` bounds a rectangle-free subset of `G_{f,k}`.
    ub: Vec<Vec<usize>>,
    ctl: &'a Control,
    frontier: Option<(usize, Mutex<Vec<RfState>>)>,
}

impl Rf<'_> {
    fn feasible(&self, st: &RfState, need: usize, k: usize, cap: usize) -> bool {
        if need > k * cap {
            return false;
        }
        // Each row pair lies in at most one column.
        let free_pairs = binom(self.n as u64, 2) as usize - st.pairs;
        let (b, rm) = (need / k, need % k);
        let cost = (k - rm) * (b * b.saturating_sub(1) / 2) + rm * ((b + 1) * b / 2);
        if cost > free_pairs {
            return false;
        }
        let j = st.cols.len();
        // A new column meets each old column at most once, so the degrees of
        // its nonfresh rows sum to at most j.
        let mut degs: Vec<usize> = st.sig[..st.used].iter().map(|s| s.count_ones() as usize).collect();
        degs.sort_unstable();
        let mut per_col = 0;
        let mut acc = 0;
        for &d in &degs {
            if acc + d > j {
                break;
            }
            acc += d;
            per_col += 1;
        }
        let fresh = self.n - st.used;
        let nonfresh_total = (k * per_col).min(self.ub[st.used][k]);
        if j > 0 && need > nonfresh_total + self.ub[fresh][k] {
            return false;
        }
        // Each column pair shares at most one row: sum over rows of
        // C(final degree, 2) <= C(m, 2). Fill the cheapest degree slots.
        let mut hist = vec![0usize; j + 1];
        let mut base = 0;
        for s in &st.sig {
            let d = s.count_ones() as usize;
            hist[d] += 1;
            base += d * d.saturating_sub(1) / 2;
        }
        let limit = self.m * (self.m - 1) / 2;
        if need > self.n * k {
            return false;
        }
        let mut rem = need;
        let mut cost = base;
        let mut level = 0usize;
        while rem > 0 {
            // Rows that can still rise from `level` to `level + 1`.
            let lo = (level + 1).saturating_sub(k);
            let avail: usize = (lo..=level.min(j)).map(|d| hist[d]).sum();
            let take = avail.min(rem);
            cost += take * level;
            rem -= take;
            if cost > limit {
                return false;
            }
            level += 1;
        }
        true
    }

    fn search(&self, st: &mut RfState) -> Option<Vec<u64>> {
        if st.total >= self.a {
            return Some(st.cols.clone());
        }
        let j = st.cols.len();
        if let Some((depth, sink)) = &self.frontier {
            if j == *depth {
                sink.lock().unwrap().push(st.clone());
                return None;
            }
        }
        let k = self.m - j;
        if k == 0 || !self.ctl.tick() {
            return None;
        }
        let need = self.a - st.total;
        let cap = st.sizes.last().copied().unwrap_or(self.n);
        if !self.feasible(st, need, k, cap) {
            return None;
        }
        // Classes of nonfresh rows: maximal runs of equal signature.
        let mut classes: Vec<(u64, usize)> = Vec::new();
        for r in 0..st.used {
            if classes.last().is_none_or(|&(s, _)| s != st.sig[r]) {
                classes.push((st.sig[r], r));
            }
        }
        let fresh = self.n - st.used;
        let lo = need.div_ceil(k);
        for x in (lo..=cap).rev() {
            for t in (0..=x.min(fresh)).rev() {
                if x - t > classes.len() {
                    continue;
                }
                let mask = low_bits(t) << st.used;
                if let Some(w) = self.pick(st, &classes, 0, x - t, 0, mask, x, t) {
                    return Some(w);
                }
                if self.ctl.stopped() {
                    return None;
                }
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn pick(
        &self,
        st: &mut RfState,
        classes: &[(u64, usize)],
        idx: usize,
        left: usize,
        sig_acc: u64,
        mask: u64,
        x: usize,
        t: usize,
    ) -> Option<Vec<u64>> {
        if left == 0 {
            if let (Some(&p), Some(&px)) = (st.cols.last(), st.sizes.last()) {
                if px == x && lex_key(mask) > lex_key(p) {
                    return None;
                }
            }
            let j = st.cols.len();
            let mut bits = mask;
            while bits != 0 {
                let r = bits.trailing_zeros() as usize;
                st.sig[r] |= 1 << j;
                bits &= bits - 1;
            }
            st.cols.push(mask);
            st.sizes.push(x);
            st.used += t;
            st.total += x;
            st.pairs += x * x.saturating_sub(1) / 2;
            let res = self.search(st);
            st.pairs -= x * x.saturating_sub(1) / 2;
            st.total -= x;
            st.used -= t;
            st.sizes.pop();
            st.cols.pop();
            let mut bits = mask;
            while bits != 0 {
                let r = bits.trailing_zeros() as usize;
                st.sig[r] &= !(1 << j);
                bits &= bits - 1;
            }
            return res;
        }
        for i in idx..classes.len() {
            if classes.len() - i < left {
                break;
            }
            let (s, rep) = classes[i];
            if s & sig_acc != 0 {
                continue;
            }
            if let Some(w) = self.pick(st, classes, i + 1, left - 1, sig_acc | s, mask | (1 << rep), x, t) {
                return Some(w);
            }
            if self.ctl.stopped() {
                return None;
            }
        }
        None
    }
}

fn check_side(n: usize, m: usize) -> Result<(), SearchError> {
    if n > MAX_SIDE || m > MAX_SIDE {
        return Err(SearchError::TooLarge { n, m, max: MAX_SIDE });
    }
    Ok(())
}

/// Reiman and density bounds only, so that search results stay independent
/// of the closed-form table and of the recursive profile bound.
fn upper_table(n: usize, m: usize) -> Vec<Vec<usize>> {
    let simple = |f: u64, k: u64| -> u64 {
        if f == 0 || k == 0 {
            return 0;
        }
        let z = reiman_z(f, k).unwrap().min(reiman_z(k, f).unwrap()) - 1;
        z.min(density_max(f, k)).min(density_max(k, f)).min(f * k)
    };
    (0..=n)
        .map(|f| (0..=m).map(|k| simple(f as u64, k as u64) as usize).collect())
        .collect()
}

/// Decide whether `G_{n,m}` has a rectangle-free subset of at least `a`
/// cells. `Found` carries a verified witness with at least `a` cells.
///
/// The search prunes with local necessary conditions only; it does not
/// consult `maxrf_upper(n, m)` for the whole grid, so a refutation is an
/// independent check of that bound.
pub fn exists_rect_free_of_size(
    n: usize,
    m: usize,
    a: usize,
    budget: &SearchBudget,
) -> Result<SearchOutcome<CellSet>, SearchError> {
    let dims = GridDims::new(n.max(1), m.max(1)).map_err(|_| SearchError::TooLarge { n, m, max: MAX_SIDE })?;
    check_side(n, m)?;
    let ctl = Control::new(budget);
    if a > n * m {
        return Ok(ctl.finish(None));
    }
    // Rows are the longer side: fewer, larger column decisions.
    let flip = m > n;
    let (rn, rm) = if flip { (m, n) } else { (n, m) };
    let ub = upper_table(rn, rm);
    let root = RfState {
        cols: Vec::new(),
        sizes: Vec::new(),
        sig: vec![0; rn],
        used: 0,
        total: 0,
        pairs: 0,
    };
    let found = run_rf(rn, rm, a, ub, root, &ctl, budget.threads);
    let witness = found.map(|cols| {
        let mut cells = CellSet::empty(GridDims { n: rn, m: rm });
        for (j, &c) in cols.iter().enumerate() {
            let mut bits = c;
            while bits != 0 {
                let r = bits.trailing_zeros() as usize;
                cells.insert(r + 1, j + 1).unwrap();
                bits &= bits - 1;
            }
        }
        let cells = if flip { cells.transpose() } else { cells };
        assert!(cells.dims() == dims && cells.len() >= a && find_rectangle(&cells).is_none());
        cells
    });
    Ok(ctl.finish(witness))
}

fn run_rf(
    n: usize,
    m: usize,
    a: usize,
    ub: Vec<Vec<usize>>,
    mut root: RfState,
    ctl: &Control,
    threads: usize,
) -> Option<Vec<u64>> {
    let mut rf = Rf {
        n,
        m,
        a,
        ub,
        ctl,
        frontier: None,
    };
    if threads <= 1 || m < 3 {
        return rf.search(&mut root);
    }
    rf.frontier = Some((2, Mutex::new(Vec::new())));
    if let Some(w) = rf.search(&mut root) {
        return Some(w);
    }
    let tasks = rf.frontier.take().unwrap().1.into_inner().unwrap();
    let worker = Rf { frontier: None, ..rf };
    pool(threads).install(|| {
        tasks.into_par_iter().find_map_any(|mut st| {
            let r = worker.search(&mut st);
            if r.is_some() {
                ctl.halt();
            }
            r
        })
    })
}

/// Exact maxrf, or the best bracket reached within budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxrfOutcome {
    pub lower: usize,
    pub upper: usize,
    pub witness: CellSet,
    pub stats: SearchStats,
}

impl MaxrfOutcome {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Greedy rectangle-free set: add cells in row-major order when allowed.
pub fn greedy_rect_free(n: usize, m: usize) -> CellSet {
    let dims = GridDims { n, m };
    let mut cols: Vec<Vec<bool>> = vec![vec![false; n]; m];
    let mut cells = CellSet::empty(dims);
    for r in 0..n {
        for j in 0..m {
            let ok = (0..m)
                .filter(|&k| k != j && cols[k][r])
                .all(|k| (0..n).all(|s| !(cols[j][s] && cols[k][s])));
            if ok {
                cols[j][r] = true;
                cells.insert(r + 1, j + 1).unwrap();
            }
        }
    }
    cells
}

/// Ascend from a greedy lower bound: each `Found` raises the lower end,
/// the first `Refuted` closes the bracket.
pub fn maxrf_exact(n: usize, m: usize, budget: &SearchBudget) -> Result<MaxrfOutcome, SearchError> {
    check_side(n, m)?;
    let start = Instant::now();
    let mut witness = greedy_rect_free(n, m);
    let mut lower = witness.len();
    let mut upper = maxrf_upper(n as u64, m as u64) as usize;
    let mut nodes = 0u64;
    while lower < upper {
        let left = budget.max_nodes.saturating_sub(nodes);
        let spent_ms = start.elapsed().as_millis() as u64;
        if left == 0 || spent_ms >= budget.wall_ms {
            break;
        }
        let b = SearchBudget {
            max_nodes: left,
            wall_ms: budget.wall_ms - spent_ms,
            threads: budget.threads,
        };
        let out = exists_rect_free_of_size(n, m, lower + 1, &b)?;
        nodes += out.stats.nodes;
        match out.verdict {
            Verdict::Found(w) => {
                lower = w.len();
                witness = w;
            }
            Verdict::Refuted => upper = lower,
            Verdict::Timeout => break,
        }
    }
    Ok(MaxrfOutcome {
        lower,
        upper,
        witness,
        stats: SearchStats {
            nodes,
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
    })
}

#[derive(Clone)]
struct ColState {
    grid: Vec<u8>,
    /// `used[t * w + j]`: columns k such that an earlier row has color t at both j and k.
    used: Vec<u64>,
    rowmask: Vec<u64>,
    maxc: u8,
    idx: usize,
    /// Same-color column pairs claimed by completed rows.
    pairs: usize,
}

/// Row-major backtracking with colors introduced in ascending order and a
/// non-decreasing first row.
struct Col<'a> {
    h: usize,
    w: usize,
    c: u8,
    /// Fewest same-color column pairs any row of width w can have.
    row_min_pairs: usize,
    ctl: &'a Control,
    frontier: Option<(usize, Mutex<Vec<ColState>>)>,
}

impl Col<'_> {
    fn search(&self, st: &mut ColState) -> bool {
        if st.idx == self.h * self.w {
            return true;
        }
        if let Some((depth, sink)) = &self.frontier {
            if st.idx == *depth {
                sink.lock().unwrap().push(st.clone());
                return false;
            }
        }
        if !self.ctl.tick() {
            return false;
        }
        let (row, col) = (st.idx / self.w, st.idx % self.w);
        let top = self.c.min(st.maxc + 1);
        let bottom = if row == 0 && col > 0 { st.grid[st.idx - 1] } else { 1 };
        for t in bottom..=top {
            let ti = (t - 1) as usize;
            if st.used[ti * self.w + col] & st.rowmask[ti] != 0 {
                continue;
            }
            let saved_max = st.maxc;
            st.grid[st.idx] = t;
            st.maxc = st.maxc.max(t);
            st.rowmask[ti] |= 1 << col;
            st.idx += 1;
            let ok = if col + 1 == self.w {
                self.commit_row(st)
            } else {
                self.search(st)
            };
            st.idx -= 1;
            st.rowmask[ti] &= !(1 << col);
            st.maxc = saved_max;
            if ok {
                return true;
            }
            if self.ctl.stopped() {
                return false;
            }
        }
        false
    }

    fn commit_row(&self, st: &mut ColState) -> bool {
        let saved_used = st.used.clone();
        let saved_rows = st.rowmask.clone();
        let saved_pairs = st.pairs;
        for ti in 0..self.c as usize {
            let rm = st.rowmask[ti];
            let k = rm.count_ones() as usize;
            st.pairs += k * k.saturating_sub(1) / 2;
            let mut bits = rm;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                st.used[ti * self.w + j] |= rm & !(1 << j);
                bits &= bits - 1;
            }
            st.rowmask[ti] = 0;
        }
        // Every column pair can repeat a color in at most one row per color.
        let rows_left = self.h - st.idx / self.w;
        let free = self.c as usize * self.w * (self.w - 1) / 2 - st.pairs;
        let ok = free >= rows_left * self.row_min_pairs && self.search(st);
        if !ok {
            st.used = saved_used;
            st.rowmask = saved_rows;
            st.pairs = saved_pairs;
        }
        ok
    }
}

/// Decide c-colorability of `G_{n,m}` exactly (within budget).
pub fn colorable(n: usize, m: usize, c: u32, budget: &SearchBudget) -> Result<SearchOutcome<Coloring>, SearchError> {
    let dims = GridDims::new(n.max(1), m.max(1)).map_err(|_| SearchError::TooLarge { n, m, max: MAX_SIDE })?;
    let ctl = Control::new(budget);
    if c == 0 {
        return Ok(ctl.finish(None));
    }
    let flip = m > n;
    let (h, w) = if flip { (m, n) } else { (n, m) };
    if w > MAX_SIDE || c > 255 {
        return Err(SearchError::TooLarge { n, m, max: MAX_SIDE });
    }
    let c8 = c.min(255) as u8;
    let root = ColState {
        grid: vec![0; h * w],
        used: vec![0; c8 as usize * w],
        rowmask: vec![0; c8 as usize],
        maxc: 0,
        idx: 0,
        pairs: 0,
    };
    let found = run_col(h, w, c8, root, &ctl, budget.threads);
    let witness = found.map(|grid| {
        let x = Coloring::new(GridDims { n: h, m: w }, c, grid.into_iter().map(u32::from).collect()).unwrap();
        let x = if flip { x.transpose() } else { x };
        assert!(x.dims() == dims && verify_coloring(&x));
        x
    });
    Ok(ctl.finish(witness))
}

fn run_col(h: usize, w: usize, c: u8, mut root: ColState, ctl: &Control, threads: usize) -> Option<Vec<u8>> {
    let (b, r) = (w / c as usize, w % c as usize);
    let row_min_pairs = (c as usize - r) * (b * b.saturating_sub(1) / 2) + r * (b * (b + 1) / 2);
    let mut col = Col {
        h,
        w,
        c,
        row_min_pairs,
        ctl,
        frontier: None,
    };
    if threads <= 1 || h < 3 {
        return col.search(&mut root).then(|| root.grid.clone());
    }
    // Deepen the split one cell at a time until there is enough work to share.
    let target = threads * 64;
    let mut tasks = Vec::new();
    for depth in 1..h * w {
        col.frontier = Some((depth, Mutex::new(Vec::new())));
        if col.search(&mut root) {
            return Some(root.grid);
        }
        tasks = col.frontier.take().unwrap().1.into_inner().unwrap();
        if ctl.stopped() || tasks.is_empty() {
            return None;
        }
        if tasks.len() >= target {
            break;
        }
    }
    let worker = Col { frontier: None, ..col };
    pool(threads).install(|| {
        tasks.into_par_iter().find_map_any(|mut st| {
            if worker.search(&mut st) {
                ctl.halt();
                Some(st.grid)
            } else {
                None
            }
        })
    })
}
