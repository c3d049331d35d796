//! Grids, colorings, cell sets and the two text formats.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GridError, ParseError};

/// Dimensions of the grid `[n] x [m]` (rows by columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridDims {
    pub n: usize,
    pub m: usize,
}

impl GridDims {
    pub fn new(n: usize, m: usize) -> Result<Self, GridError> {
        if n == 0 || m == 0 {
            return Err(GridError::EmptyDims { n, m });
        }
        Ok(GridDims { n, m })
    }

    pub fn transpose(self) -> Self {
        GridDims { n: self.m, m: self.n }
    }

    pub fn cells(self) -> usize {
        self.n * self.m
    }

    /// `self` contains `other` as a subgrid.
    pub fn contains(self, other: GridDims) -> bool {
        other.n <= self.n && other.m <= self.m
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n, self.m)
    }
}

/// Four corners `{r1,r2} x {j1,j2}`, 1-based, with `r1 < r2` and `j1 < j2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub r1: usize,
    pub r2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows ({},{}) cols ({},{})", self.r1, self.r2, self.j1, self.j2)
    }
}

/// An n x m matrix of colors in `1..=c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    dims: GridDims,
    c: u32,
    cells: Vec<u32>,
}

impl Coloring {
    /// Row-major cells, colors 1-based.
    pub fn new(dims: GridDims, c: u32, cells: Vec<u32>) -> Result<Self, GridError> {
        if c == 0 {
            return Err(GridError::EmptyPalette);
        }
        if cells.len() != dims.cells() {
            return Err(GridError::Shape {
                expected: dims.cells(),
                found: cells.len(),
            });
        }
        if let Some(k) = cells.iter().position(|&v| v == 0 || v > c) {
            return Err(GridError::ColorOutOfRange {
                row: k / dims.m + 1,
                col: k % dims.m + 1,
                value: cells[k],
                c,
            });
        }
        Ok(Coloring { dims, c, cells })
    }

    pub fn from_rows(c: u32, rows: &[Vec<u32>]) -> Result<Self, GridError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let dims = GridDims::new(n, m)?;
        let cells: Vec<u32> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != m) {
            return Err(GridError::Shape {
                expected: n * m,
                found: cells.len(),
            });
        }
        Coloring::new(dims, c, cells)
    }

    pub fn from_fn(dims: GridDims, c: u32, f: impl Fn(usize, usize) -> u32) -> Result<Self, GridError> {
        let mut cells = Vec::with_capacity(dims.cells());
        for i in 1..=dims.n {
            for j in 1..=dims.m {
                cells.push(f(i, j));
            }
        }
        Coloring::new(dims, c, cells)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn palette(&self) -> u32 {
        self.c
    }

    /// Color at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[(row - 1) * self.dims.m + (col - 1)]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        let m = self.dims.m;
        &self.cells[(row - 1) * m..row * m]
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Largest color actually used.
    pub fn max_color(&self) -> u32 {
        self.cells.iter().copied().max().unwrap_or(1)
    }

    /// Same cells under a larger (or equal) palette.
    pub fn with_palette(&self, c: u32) -> Result<Self, GridError> {
        Coloring::new(self.dims, c, self.cells.clone())
    }

    pub fn transpose(&self) -> Self {
        let d = self.dims.transpose();
        let mut cells = Vec::with_capacity(d.cells());
        for j in 1..=self.dims.m {
            for i in 1..=self.dims.n {
                cells.push(self.get(i, j));
            }
        }
        Coloring {
            dims: d,
            c: self.c,
            cells,
        }
    }

    /// Top-left `n x m` restriction.
    pub fn crop(&self, n: usize, m: usize) -> Result<Self, GridError> {
        let d = GridDims::new(n, m)?;
        if !self.dims.contains(d) {
            return Err(GridError::CellOutOfRange {
                row: n,
                col: m,
                n: self.dims.n,
                m: self.dims.m,
            });
        }
        let mut cells = Vec::with_capacity(d.cells());
        for i in 1..=n {
            cells.extend_from_slice(&self.row(i)[..m]);
        }
        Ok(Coloring {
            dims: d,
            c: self.c,
            cells,
        })
    }

    /// Cells of color `t` as a cell set.
    pub fn color_class(&self, t: u32) -> CellSet {
        let members = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == t)
            .map(|(k, _)| (k / self.dims.m + 1, k % self.dims.m + 1))
            .collect();
        CellSet {
            dims: self.dims,
            members,
        }
    }
}

/// A subset of `[n] x [m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellSet {
    dims: GridDims,
    members: BTreeSet<(usize, usize)>,
}

impl CellSet {
    pub fn empty(dims: GridDims) -> Self {
        CellSet {
            dims,
            members: BTreeSet::new(),
        }
    }

    pub fn new(dims: GridDims, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GridError> {
        let mut s = CellSet::empty(dims);
        for (r, j) in cells {
            s.insert(r, j)?;
        }
        Ok(s)
    }

    /// Build from per-column row sets (`cols[j-1]` holds the rows of column j).
    pub fn from_columns(dims: GridDims, cols: &[Vec<usize>]) -> Result<Self, GridError> {
        CellSet::new(
            dims,
            cols.iter()
                .enumerate()
                .flat_map(|(j, rows)| rows.iter().map(move |&r| (r, j + 1))),
        )
    }

    pub fn insert(&mut self, row: usize, col: usize) -> Result<(), GridError> {
        if row == 0 || col == 0 || row > self.dims.n || col > self.dims.m {
            return Err(GridError::CellOutOfRange {
                row,
                col,
                n: self.dims.n,
                m: self.dims.m,
            });
        }
        self.members.insert((row, col));
        Ok(())
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.members.contains(&(row, col))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().copied()
    }

    /// `C_j`: the rows present in column `j`, ascending.
    pub fn column(&self, j: usize) -> Vec<usize> {
        self.members.iter().filter(|&&(_, c)| c == j).map(|&(r, _)| r).collect()
    }

    /// Column counts `x_1..x_m`.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut xs = vec![0; self.dims.m];
        for &(_, j) in &self.members {
            xs[j - 1] += 1;
        }
        xs
    }

    pub fn transpose(&self) -> Self {
        CellSet {
            dims: self.dims.transpose(),
            members: self.members.iter().map(|&(r, j)| (j, r)).collect(),
        }
    }

    fn row_lists(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.dims.n];
        for &(r, j) in &self.members {
            rows[r - 1].push(j);
        }
        rows
    }
}

/// Scan rows in order, recording for every column pair the first row that
/// covers it. The first repeat under the (r1, r2, j1, j2) order is the
/// lexicographically least rectangle for the rows-as-lists input.
fn least_rectangle(m: usize, rows: &[Vec<usize>]) -> Option<Rect> {
    // Cheap existence test: seen[j1*m + j2] = first row covering the pair.
    let mut seen = vec![0usize; m * m];
    let mut any = false;
    'outer: for (i, cols) in rows.iter().enumerate() {
        for (a, &j1) in cols.iter().enumerate() {
            for &j2 in &cols[a + 1..] {
                let slot = &mut seen[(j1 - 1) * m + (j2 - 1)];
                if *slot != 0 {
                    any = true;
                    break 'outer;
                }
                *slot = i + 1;
            }
        }
    }
    if !any {
        return None;
    }
    // Exact lexicographic minimum: smallest r1, then r2, then (j1, j2).
    for r1 in 0..rows.len() {
        if rows[r1].len() < 2 {
            continue;
        }
        for r2 in r1 + 1..rows.len() {
            let (a, b) = (&rows[r1], &rows[r2]);
            let mut common = Vec::with_capacity(2);
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() && common.len() < 2 {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        common.push(a[x]);
                        x += 1;
                        y += 1;
                    }
                }
            }
            if common.len() == 2 {
                return Some(Rect {
                    r1: r1 + 1,
                    r2: r2 + 1,
                    j1: common[0],
                    j2: common[1],
                });
            }
        }
    }
    None
}

/// Lexicographically least rectangle contained in `cells`, if any.
pub fn find_rectangle(cells: &CellSet) -> Option<Rect> {
    let d = cells.dims();
    least_rectangle(d.m, &cells.row_lists())
}

pub fn is_rectangle_free(cells: &CellSet) -> bool {
    find_rectangle(cells).is_none()
}

/// Lexicographically least monochromatic rectangle under (r1, r2, j1, j2).
pub fn find_mono_rectangle(coloring: &Coloring) -> Option<Rect> {
    let GridDims { n, m } = coloring.dims();
    if n < 2 || m < 2 {
        return None;
    }
    let c = coloring.palette() as usize;
    // seen[t][r1][r2]: does color t already occupy rows r1, r2 in a common column?
    let mut seen = vec![false; (c + 1) * n * n];
    let mut found = false;
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); c + 1];
    'cols: for j in 1..=m {
        for list in by_color.iter_mut() {
            list.clear();
        }
        for i in 1..=n {
            by_color[coloring.get(i, j) as usize].push(i - 1);
        }
        for (t, rows) in by_color.iter().enumerate() {
            for (a, &r1) in rows.iter().enumerate() {
                for &r2 in &rows[a + 1..] {
                    let slot = &mut seen[(t * n + r1) * n + r2];
                    if *slot {
                        found = true;
                        break 'cols;
                    }
                    *slot = true;
                }
            }
        }
    }
    if !found {
        return None;
    }
    for r1 in 1..n {
        let a = coloring.row(r1);
        for r2 in r1 + 1..=n {
            let b = coloring.row(r2);
            // Columns where the two rows agree, grouped by color: the least
            // (j1, j2) takes the color whose first agreement comes earliest
            // among colors agreeing at least twice.
            let mut first: Vec<usize> = vec![0; c + 1];
            let mut best: Option<(usize, usize)> = None;
            for j in 0..m {
                if a[j] != b[j] {
                    continue;
                }
                let t = a[j] as usize;
                if first[t] == 0 {
                    first[t] = j + 1;
                } else {
                    let cand = (first[t], j + 1);
                    if best.is_none_or(|bst| cand < bst) {
                        best = Some(cand);
                    }
                }
            }
            if let Some((j1, j2)) = best {
                return Some(Rect { r1, r2, j1, j2 });
            }
        }
    }
    None
}

pub fn verify_coloring(coloring: &Coloring) -> bool {
    find_mono_rectangle(coloring).is_none()
}

/// Strong (c, c')-coloring test: whenever two rows agree in color on two
/// columns, the two agreeing colors differ and both lie in `1..=c_prime`.
pub fn verify_strong(coloring: &Coloring, c_prime: u32) -> bool {
    let GridDims { n, m } = coloring.dims();
    let c = coloring.palette() as usize;
    let mut count = vec![0u32; c + 1];
    for r1 in 1..n {
        let a = coloring.row(r1);
        for r2 in r1 + 1..=n {
            let b = coloring.row(r2);
            count.iter_mut().for_each(|x| *x = 0);
            let mut agreements = 0;
            for j in 0..m {
                if a[j] == b[j] {
                    count[a[j] as usize] += 1;
                    agreements += 1;
                }
            }
            if agreements <= 1 {
                continue;
            }
            for (t, &k) in count.iter().enumerate() {
                if k > 1 || (k == 1 && t as u32 > c_prime) {
                    return false;
                }
            }
        }
    }
    true
}

/// `I_1..I_k` over the chosen columns: `I_t` sums `|C_{j1} ∩ .. ∩ C_{jt}|`
/// over all t-subsets of `columns`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionStats {
    pub counts: Vec<u64>,
}

impl IntersectionStats {
    /// Size of the union of the chosen columns by inclusion-exclusion.
    pub fn union_size(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(t, &v)| if t % 2 == 0 { v as i64 } else { -(v as i64) })
            .sum()
    }
}

pub const MAX_STAT_COLUMNS: usize = 20;

/// A row lying in exactly `d` of the chosen columns contributes `C(d, t)`
/// to `I_t`, so the statistics come from row degrees alone.
pub fn intersection_stats(cells: &CellSet, columns: &[usize]) -> Result<IntersectionStats, GridError> {
    let k = columns.len();
    if k > MAX_STAT_COLUMNS {
        return Err(GridError::TooManyColumns {
            max: MAX_STAT_COLUMNS,
            got: k,
        });
    }
    let m = cells.dims().m;
    let mut chosen = vec![false; m + 1];
    for &j in columns {
        if j == 0 || j > m || chosen[j] {
            return Err(GridError::BadColumn(j));
        }
        chosen[j] = true;
    }
    let mut degree = vec![0usize; cells.dims().n + 1];
    for (r, j) in cells.iter() {
        if chosen[j] {
            degree[r] += 1;
        }
    }
    let mut counts = vec![0u64; k];
    for &d in &degree {
        for t in 1..=d.min(k) {
            counts[t - 1] += binom(d as u64, t as u64);
        }
    }
    Ok(IntersectionStats { counts })
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn parse_header(line: Option<(usize, &str)>, want: usize) -> Result<(usize, Vec<u64>), ParseError> {
    let (no, text) = line.ok_or(ParseError::Header {
        line: 1,
        msg: "empty input".into(),
    })?;
    let fields: Result<Vec<u64>, _> = text.split_whitespace().map(str::parse::<u64>).collect();
    let fields = fields.map_err(|e| ParseError::Header {
        line: no,
        msg: e.to_string(),
    })?;
    if fields.len() != want {
        return Err(ParseError::Header {
            line: no,
            msg: format!("expected {want} integers, found {}", fields.len()),
        });
    }
    if fields.contains(&0) {
        return Err(ParseError::Header {
            line: no,
            msg: "values must be positive".into(),
        });
    }
    Ok((no, fields))
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
}

fn expect_end<'a>(mut rest: impl Iterator<Item = (usize, &'a str)>) -> Result<(), ParseError> {
    match rest.find(|(_, l)| !l.trim().is_empty()) {
        Some((line, _)) => Err(ParseError::TrailingContent { line }),
        None => Ok(()),
    }
}

/// Parse `"n m c"` followed by n rows of m colors.
pub fn parse_coloring(text: &str) -> Result<Coloring, ParseError> {
    let mut lines = numbered_lines(text);
    let (hline, h) = parse_header(lines.next(), 3)?;
    let (n, m) = (h[0] as usize, h[1] as usize);
    let c = u32::try_from(h[2]).map_err(|_| ParseError::Header {
        line: hline,
        msg: "palette too large".into(),
    })?;
    let mut cells = Vec::with_capacity(n * m);
    let mut last = hline;
    for _ in 0..n {
        let (no, row) = lines.next().ok_or(ParseError::MissingRows {
            line: last + 1,
            expected: n,
        })?;
        last = no;
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != m {
            return Err(ParseError::RaggedRow {
                line: no,
                expected: m,
                found: toks.len(),
            });
        }
        for tok in toks {
            let v: u64 = tok.parse().map_err(|_| ParseError::BadCell {
                line: no,
                token: tok.to_string(),
            })?;
            if v == 0 || v > c as u64 {
                return Err(ParseError::ColorOutOfRange { line: no, value: v, c });
            }
            cells.push(v as u32);
        }
    }
    expect_end(lines)?;
    Ok(Coloring {
        dims: GridDims { n, m },
        c,
        cells,
    })
}

pub fn serialize_coloring(coloring: &Coloring) -> String {
    let GridDims { n, m } = coloring.dims();
    let mut out = format!("{n} {m} {}\n", coloring.palette());
    for i in 1..=n {
        let row: Vec<String> = coloring.row(i).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parse `"n m"` followed by n rows of m characters from `{R, .}`.
pub fn parse_cellset(text: &str) -> Result<CellSet, ParseError> {
    let mut lines = numbered_lines(text);
    let (hline, h) = parse_header(lines.next(), 2)?;
    let dims = GridDims {
        n: h[0] as usize,
        m: h[1] as usize,
    };
    let mut set = CellSet::empty(dims);
    let mut last = hline;
    for i in 1..=dims.n {
        let (no, row) = lines.next().ok_or(ParseError::MissingRows {
            line: last + 1,
            expected: dims.n,
        })?;
        last = no;
        let row = row.trim();
        let len = row.chars().count();
        if len != dims.m {
            return Err(ParseError::RaggedRow {
                line: no,
                expected: dims.m,
                found: len,
            });
        }
        for (j, ch) in row.chars().enumerate() {
            match ch {
                'R' => {
                    set.members.insert((i, j + 1));
                }
                '.' => {}
                other => {
                    return Err(ParseError::BadCell {
                        line: no,
                        token: other.to_string(),
                    })
                }
            }
        }
    }
    expect_end(lines)?;
    Ok(set)
}

pub fn serialize_cellset(cells: &CellSet) -> String {
    let GridDims { n, m } = cells.dims();
    let mut out = format!("{n} {m}\n");
    for i in 1..=n {
        for j in 1..=m {
            out.push(if cells.contains(i, j) { 'R' } else { '.' });
        }
        out.push('\n');
    }
    out
}
