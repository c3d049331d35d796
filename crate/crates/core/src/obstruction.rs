//! Colorability classification, obstruction sets, charts and `BR(2,c)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{ceil_div, check_uncolorable, maxrf_upper, profile_cascade_uncolorable};
use crate::cache::{CachedVerdict, VerdictCache};
use crate::constructions::{bundled_cellset, bundled_verifies, BundledKind, Catalog, BUNDLED};
use crate::grid::{find_rectangle, CellSet, Coloring, GridDims};
use crate::search::{colorable, exists_rect_free_of_size, pool, SearchBudget, SearchStats, Verdict as SearchVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Colorable,
    NotColorable,
    Unknown,
}

impl Status {
    /// Chart letter.
    pub fn letter(self) -> char {
        match self {
            Status::Colorable => 'C',
            Status::NotColorable => 'N',
            Status::Unknown => 'U',
        }
    }
}

/// What backs a verdict beyond its rule tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Coloring(Coloring),
    Evidence(BTreeMap<String, u64>),
    Search(SearchStats),
    Contains(GridDims),
    ContainedIn(GridDims),
}

/// Classifier output. `rule` names the deciding step; `witness_ref` is a
/// short pointer to the construction, bound or grid behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub n: usize,
    pub m: usize,
    pub c: u32,
    pub status: Status,
    pub rule: String,
    pub witness_ref: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evidence: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchStats>,
    #[serde(skip)]
    pub witness: Option<Witness>,
}

impl Verdict {
    fn new(n: usize, m: usize, c: u32, status: Status, rule: &str, witness_ref: Option<String>) -> Self {
        Verdict {
            n,
            m,
            c,
            status,
            rule: rule.to_string(),
            witness_ref,
            evidence: None,
            search: None,
            witness: None,
        }
    }

    fn with(mut self, w: Witness) -> Self {
        match &w {
            Witness::Evidence(e) => self.evidence = Some(e.clone()),
            Witness::Search(s) => self.search = Some(*s),
            _ => {}
        }
        self.witness = Some(w);
        self
    }

    pub fn is_decided(&self) -> bool {
        self.status != Status::Unknown
    }

    fn cached(&self) -> CachedVerdict {
        CachedVerdict {
            status: self.status,
            rule: self.rule.clone(),
            witness_ref: self.witness_ref.clone(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Colorable => "colorable",
            Status::NotColorable => "not colorable",
            Status::Unknown => "unknown",
        };
        write!(
            f,
            "G_{{{},{}}} c={}: {} ({})",
            self.n, self.m, self.c, status, self.rule
        )?;
        if let Some(w) = &self.witness_ref {
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub budget: SearchBudget,
    /// Treat verified rectangle-free sets of size `ceil(nm/c)` as colorings.
    pub assume_rfc: bool,
    /// Run the search steps; off means bounds and constructions only.
    pub search: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            budget: SearchBudget::default(),
            assume_rfc: false,
            search: true,
        }
    }
}

/// The classification cascade for one palette size.
pub struct Classifier<'a> {
    c: u32,
    opts: ClassifyOptions,
    catalog: Catalog,
    certificates: Vec<(String, CellSet)>,
    cache: Option<&'a VerdictCache>,
}

fn grid_ref(d: GridDims) -> String {
    format!("G{}x{}", d.n, d.m)
}

impl<'a> Classifier<'a> {
    pub fn new(c: u32, opts: ClassifyOptions) -> Self {
        let certificates = if opts.assume_rfc {
            BUNDLED
                .iter()
                .filter(|e| matches!(e.kind, BundledKind::CellSet { .. }) && bundled_verifies(e))
                .filter_map(|e| Some((e.name.to_string(), bundled_cellset(e.name).ok()?)))
                .collect()
        } else {
            Vec::new()
        };
        Classifier {
            c,
            opts,
            catalog: Catalog::new(c),
            certificates,
            cache: None,
        }
    }

    pub fn with_cache(mut self, cache: &'a VerdictCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn palette(&self) -> u32 {
        self.c
    }

    pub fn options(&self) -> &ClassifyOptions {
        &self.opts
    }

    /// Full cascade: bounds and constructions, then search within budget.
    pub fn classify(&self, n: usize, m: usize) -> Verdict {
        let v = self.classify_cheap(n, m);
        if v.is_decided() || !self.opts.search {
            return v;
        }
        self.classify_search(n, m)
    }

    /// Every step except search.
    pub fn classify_cheap(&self, n: usize, m: usize) -> Verdict {
        let c = self.c;
        if n == 0 || m == 0 || n.min(m) <= c as usize {
            return Verdict::new(n, m, c, Status::Colorable, "trivial", None);
        }
        if let Some(v) = self.cached(n, m) {
            return v;
        }
        let v = self.decide_cheap(n, m);
        self.remember(&v);
        v
    }

    fn decide_cheap(&self, n: usize, m: usize) -> Verdict {
        let c = self.c;
        if let Some((tag, x)) = self.catalog.find(n, m) {
            return Verdict::new(n, m, c, Status::Colorable, "construction", Some(tag)).with(Witness::Coloring(x));
        }
        let a = ceil_div((n * m) as u64, c as u64);
        for (name, cells) in &self.certificates {
            if rfc_certifies(cells, n, m, a) {
                return Verdict::new(
                    n,
                    m,
                    c,
                    Status::Colorable,
                    "rfc-certificate",
                    Some(format!("bundled:{name}")),
                );
            }
        }
        let (nu, mu, cu) = (n as u64, m as u64, c as u64);
        for bv in [check_uncolorable(nu, mu, cu), profile_cascade_uncolorable(nu, mu, cu)] {
            if let (true, Some(rule)) = (bv.is_not_colorable(), bv.rule) {
                return Verdict::new(n, m, c, Status::NotColorable, rule.tag(), None)
                    .with(Witness::Evidence(bv.evidence));
            }
        }
        let upper = maxrf_upper(nu, mu);
        if upper < a {
            let ev = BTreeMap::from([("maxrf_upper".to_string(), upper), ("a".to_string(), a)]);
            return Verdict::new(n, m, c, Status::NotColorable, "maxrf-bound", None).with(Witness::Evidence(ev));
        }
        Verdict::new(n, m, c, Status::Unknown, "undecided", None)
    }

    /// The search steps alone: a refuted rectangle-free set of size
    /// `ceil(nm/c)`, then a direct coloring search.
    pub fn classify_search(&self, n: usize, m: usize) -> Verdict {
        let c = self.c;
        let budget = &self.opts.budget;
        let a = ceil_div((n * m) as u64, c as u64) as usize;
        let mut spent = SearchStats::default();
        if let Ok(out) = exists_rect_free_of_size(n, m, a, budget) {
            spent.nodes += out.stats.nodes;
            spent.elapsed_ms += out.stats.elapsed_ms;
            if out.verdict.is_refuted() {
                let v = Verdict::new(
                    n,
                    m,
                    c,
                    Status::NotColorable,
                    "maxrf-search",
                    Some(format!("no rf set of size {a}")),
                )
                .with(Witness::Search(out.stats));
                self.remember(&v);
                return v;
            }
        }
        if let Ok(out) = colorable(n, m, c, budget) {
            spent.nodes += out.stats.nodes;
            spent.elapsed_ms += out.stats.elapsed_ms;
            let v = match out.verdict {
                SearchVerdict::Found(x) => {
                    Verdict::new(n, m, c, Status::Colorable, "search", None).with(Witness::Coloring(x))
                }
                SearchVerdict::Refuted => Verdict::new(n, m, c, Status::NotColorable, "search", None),
                SearchVerdict::Timeout => Verdict::new(n, m, c, Status::Unknown, "budget", None),
            };
            let v = v.with(Witness::Search(spent));
            self.remember(&v);
            return v;
        }
        Verdict::new(n, m, c, Status::Unknown, "budget", None).with(Witness::Search(spent))
    }

    fn cached(&self, n: usize, m: usize) -> Option<Verdict> {
        let cache = self.cache?;
        let c = self.c;
        let modes: &[bool] = if self.opts.assume_rfc { &[false, true] } else { &[false] };
        for &rfc in modes {
            if let Some(hit) = cache.get(n, m, c, rfc) {
                return Some(Verdict::new(n, m, c, hit.status, &hit.rule, hit.witness_ref));
            }
        }
        let here = GridDims { n, m };
        for &rfc in modes {
            if let Some((d, hit)) = cache.implied(here, c, rfc) {
                let w = match hit.status {
                    Status::Colorable => Witness::ContainedIn(d),
                    _ => Witness::Contains(d),
                };
                return Some(Verdict::new(n, m, c, hit.status, "containment", Some(grid_ref(d))).with(w));
            }
        }
        None
    }

    fn remember(&self, v: &Verdict) {
        if let Some(cache) = self.cache {
            if v.is_decided() && v.rule != "trivial" {
                cache.put(v.n, v.m, v.c, self.opts.assume_rfc, v.cached());
            }
        }
    }
}

/// A rectangle-free set cropped to `n x m` (either orientation) keeps at
/// least `a` cells.
fn rfc_certifies(cells: &CellSet, n: usize, m: usize, a: u64) -> bool {
    let d = cells.dims();
    let count = |rows: usize, cols: usize, t: bool| {
        cells
            .iter()
            .filter(|&(i, j)| {
                if t {
                    j <= rows && i <= cols
                } else {
                    i <= rows && j <= cols
                }
            })
            .count() as u64
    };
    let ok = (d.contains(GridDims { n, m }) && count(n, m, false) >= a)
        || (d.transpose().contains(GridDims { n, m }) && count(n, m, true) >= a);
    ok && find_rectangle(cells).is_none()
}

/// Classify `G_{n,m}` with a fresh classifier.
pub fn classify(n: usize, m: usize, c: u32, budget: &SearchBudget) -> Verdict {
    Classifier::new(
        c,
        ClassifyOptions {
            budget: *budget,
            ..ClassifyOptions::default()
        },
    )
    .classify(n, m)
}

/// Verdicts for every grid `c < n, m <= dim`, closed under containment.
#[derive(Debug, Clone)]
pub struct Atlas {
    c: u32,
    dim: usize,
    cells: Vec<Verdict>,
}

impl Atlas {
    /// Bounds and constructions in parallel, containment propagation, then
    /// search on what is left in order of increasing size.
    pub fn build(cl: &Classifier<'_>, dim: usize) -> Atlas {
        let c = cl.c;
        let lo = c as usize + 1;
        let mut atlas = Atlas {
            c,
            dim,
            cells: Vec::new(),
        };
        if dim < lo {
            return atlas;
        }
        let pairs: Vec<(usize, usize)> = (lo..=dim).flat_map(|n| (n..=dim).map(move |m| (n, m))).collect();
        let threads = cl.opts.budget.threads.max(1);
        let cheap: Vec<Verdict> =
            pool(threads).install(|| pairs.par_iter().map(|&(n, m)| cl.classify_cheap(n, m)).collect());
        let side = dim - lo + 1;
        atlas.cells = vec![Verdict::new(0, 0, c, Status::Unknown, "undecided", None); side * side];
        for v in cheap {
            atlas.set(v);
        }
        atlas.propagate();
        if cl.opts.search {
            let mut open: Vec<(usize, usize)> = pairs
                .into_iter()
                .filter(|&(n, m)| !atlas.get(n, m).is_decided())
                .collect();
            open.sort_by_key(|&(n, m)| (n + m, n));
            for (n, m) in open {
                if atlas.get(n, m).is_decided() {
                    continue;
                }
                let v = cl.classify_search(n, m);
                if v.is_decided() {
                    atlas.set(v);
                    atlas.propagate();
                } else {
                    atlas.set(v);
                }
            }
        }
        for v in atlas.cells.iter().filter(|v| v.n <= v.m && v.is_decided()) {
            cl.remember(v);
        }
        atlas
    }

    pub fn palette(&self) -> u32 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, n: usize, m: usize) -> usize {
        let lo = self.c as usize + 1;
        let side = self.dim + 1 - lo;
        (n - lo) * side + (m - lo)
    }

    fn set(&mut self, v: Verdict) {
        let (n, m) = (v.n, v.m);
        let mut t = v.clone();
        t.n = m;
        t.m = n;
        t.witness = v.witness.as_ref().map(|w| match w {
            Witness::Coloring(x) => Witness::Coloring(x.transpose()),
            Witness::Contains(d) => Witness::Contains(d.transpose()),
            Witness::ContainedIn(d) => Witness::ContainedIn(d.transpose()),
            other => other.clone(),
        });
        let (i, j) = (self.idx(n, m), self.idx(m, n));
        self.cells[i] = v;
        self.cells[j] = t;
    }

    /// Verdict for any grid with both sides at most `dim`.
    pub fn get(&self, n: usize, m: usize) -> Verdict {
        let c = self.c;
        if n.min(m) <= c as usize {
            return Verdict::new(n, m, c, Status::Colorable, "trivial", None);
        }
        assert!(n <= self.dim && m <= self.dim, "G_{{{n},{m}}} lies outside the atlas");
        self.cells[self.idx(n, m)].clone()
    }

    pub fn status(&self, n: usize, m: usize) -> Status {
        let c = self.c as usize;
        if n.min(m) <= c {
            return Status::Colorable;
        }
        self.cells[self.idx(n, m)].status
    }

    /// Colorable flows to subgrids, NotColorable to supergrids. A cell
    /// reached both ways means an unsound step and aborts.
    fn propagate(&mut self) {
        let lo = self.c as usize + 1;
        let hi = self.dim;
        // Nearest decided source in each direction.
        let mut up: BTreeMap<(usize, usize), GridDims> = BTreeMap::new();
        for n in (lo..=hi).rev() {
            for m in (lo..=hi).rev() {
                let here = if self.status(n, m) == Status::Colorable {
                    Some(GridDims { n, m })
                } else {
                    None
                };
                let src = here
                    .or_else(|| (n < hi).then(|| up.get(&(n + 1, m)).copied()).flatten())
                    .or_else(|| (m < hi).then(|| up.get(&(n, m + 1)).copied()).flatten());
                if let Some(s) = src {
                    up.insert((n, m), s);
                }
            }
        }
        let mut down: BTreeMap<(usize, usize), GridDims> = BTreeMap::new();
        for n in lo..=hi {
            for m in lo..=hi {
                let here = if self.status(n, m) == Status::NotColorable {
                    Some(GridDims { n, m })
                } else {
                    None
                };
                let src = here
                    .or_else(|| (n > lo).then(|| down.get(&(n - 1, m)).copied()).flatten())
                    .or_else(|| (m > lo).then(|| down.get(&(n, m - 1)).copied()).flatten());
                if let Some(s) = src {
                    down.insert((n, m), s);
                }
            }
        }
        for n in lo..=hi {
            for m in n..=hi {
                let (cu, cd) = (up.get(&(n, m)), down.get(&(n, m)));
                if let (Some(a), Some(b)) = (cu, cd) {
                    panic!(
                        "inconsistent verdicts: G_{{{n},{m}}} lies inside colorable {a} and contains non-colorable {b}"
                    );
                }
                if self.get(n, m).is_decided() {
                    continue;
                }
                let c = self.c;
                if let Some(&d) = cu {
                    self.set(
                        Verdict::new(n, m, c, Status::Colorable, "containment", Some(grid_ref(d)))
                            .with(Witness::ContainedIn(d)),
                    );
                } else if let Some(&d) = cd {
                    self.set(
                        Verdict::new(n, m, c, Status::NotColorable, "containment", Some(grid_ref(d)))
                            .with(Witness::Contains(d)),
                    );
                }
            }
        }
    }

    /// NotColorable grids whose two immediate predecessors are Colorable.
    pub fn minimal(&self) -> Vec<GridDims> {
        let lo = self.c as usize + 1;
        let mut out = Vec::new();
        for n in lo..=self.dim {
            for m in lo..=self.dim {
                if self.status(n, m) == Status::NotColorable
                    && self.status(n - 1, m) == Status::Colorable
                    && self.status(n, m - 1) == Status::Colorable
                {
                    out.push(GridDims { n, m });
                }
            }
        }
        out
    }

    pub fn unknown(&self) -> Vec<GridDims> {
        let lo = self.c as usize + 1;
        (lo..=self.dim)
            .flat_map(|n| (lo..=self.dim).map(move |m| (n, m)))
            .filter(|&(n, m)| self.status(n, m) == Status::Unknown)
            .map(|(n, m)| GridDims { n, m })
            .collect()
    }

    /// The rectangle `rows x cols` of this atlas.
    pub fn chart(&self, rows: (usize, usize), cols: (usize, usize)) -> Chart {
        let cells = (rows.0..=rows.1)
            .map(|n| (cols.0..=cols.1).map(|m| self.status(n, m)).collect())
            .collect();
        let rules = (rows.0..=rows.1)
            .map(|n| (cols.0..=cols.1).map(|m| self.get(n, m).rule).collect())
            .collect();
        Chart {
            c: self.c,
            n_range: rows,
            m_range: cols,
            cells,
            rules,
        }
    }
}

/// Default bounding box side: no obstruction is larger.
pub fn default_max_dim(c: u32) -> usize {
    let c = c as usize;
    c * (c + 1) * c / 2 + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub c: u32,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    #[serde(serialize_with = "letters", deserialize_with = "from_letters")]
    pub cells: Vec<Vec<Status>>,
    #[serde(skip)]
    pub rules: Vec<Vec<String>>,
}

fn letters<S: serde::Serializer>(cells: &[Vec<Status>], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = cells
        .iter()
        .map(|r| r.iter().map(|x| x.letter().to_string()).collect())
        .collect();
    v.serialize(s)
}

fn from_letters<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<Vec<Status>>, D::Error> {
    let v: Vec<Vec<String>> = Vec::deserialize(d)?;
    v.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| match x.as_str() {
                    "C" => Ok(Status::Colorable),
                    "N" => Ok(Status::NotColorable),
                    "U" => Ok(Status::Unknown),
                    _ => Err(serde::de::Error::custom(format!("bad chart cell {x:?}"))),
                })
                .collect()
        })
        .collect()
}

impl Chart {
    pub fn at(&self, n: usize, m: usize) -> Status {
        self.cells[n - self.n_range.0][m - self.m_range.0]
    }

    /// Rows of letters, one string per n.
    pub fn rows(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|r| r.iter().map(|s| s.letter()).collect())
            .collect()
    }
}

/// Rows labelled by n, columns by m, one letter per cell.
impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>3} |", "")?;
        for m in self.m_range.0..=self.m_range.1 {
            write!(f, " {m:>2}")?;
        }
        writeln!(f)?;
        write!(f, "----+")?;
        for _ in self.m_range.0..=self.m_range.1 {
            write!(f, "---")?;
        }
        writeln!(f)?;
        for (k, row) in self.cells.iter().enumerate() {
            write!(f, "{:>3} |", self.n_range.0 + k)?;
            for s in row {
                write!(f, "  {}", s.letter())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Build the chart for `rows x cols`; the atlas behind it starts at `c + 1`
/// so containment sees every smaller grid.
pub fn chart(cl: &Classifier<'_>, rows: (usize, usize), cols: (usize, usize)) -> Chart {
    let dim = rows.1.max(cols.1).max(cl.c as usize + 1);
    Atlas::build(cl, dim).chart(rows, cols)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsReport {
    pub c: u32,
    pub max_dim: usize,
    pub assume_rfc: bool,
    pub minimal: Vec<GridDims>,
    pub unknown: Vec<GridDims>,
    /// Minimal set is exactly `OBS_c`: nothing Unknown in the box.
    pub complete: bool,
    #[serde(skip)]
    pub chart: Option<Chart>,
}

pub fn compute_obs(cl: &Classifier<'_>, max_dim: usize) -> ObsReport {
    let atlas = Atlas::build(cl, max_dim);
    let lo = cl.c as usize + 1;
    let unknown = atlas.unknown();
    ObsReport {
        c: cl.c,
        max_dim,
        assume_rfc: cl.opts.assume_rfc,
        minimal: atlas.minimal(),
        complete: unknown.is_empty(),
        unknown,
        chart: (max_dim >= lo).then(|| atlas.chart((lo, max_dim), (lo, max_dim))),
    }
}

/// Bracket on `BR(2,c)`, the least n with `G_{n,n}` not c-colorable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyBounds {
    pub c: u32,
    pub lower: usize,
    pub upper: usize,
}

impl RamseyBounds {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Scan squares from `c + 1`; lower is one past the largest Colorable
/// square, upper the first NotColorable one.
pub fn bipartite_ramsey2(cl: &Classifier<'_>) -> RamseyBounds {
    let c = cl.c as usize;
    let mut lower = c + 1;
    let mut upper = c * c + c;
    for n in c + 1..=c * c + c {
        let v = cl.classify(n, n);
        match v.status {
            Status::Colorable => lower = n + 1,
            Status::NotColorable => {
                upper = n;
                break;
            }
            Status::Unknown => {}
        }
    }
    RamseyBounds { c: cl.c, lower, upper }
}
