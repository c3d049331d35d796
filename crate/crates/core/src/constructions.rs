//! Explicit colorings: strong colorings from pair partitions, their
//! expansion, finite-field line colorings, and the bundled data.

use serde::{Deserialize, Serialize};

use crate::error::ConstructionError;
use crate::field::is_prime;
use crate::grid::{
    binom, find_rectangle, parse_cellset, parse_coloring, verify_coloring, verify_strong, CellSet, Coloring, GridDims,
};
use crate::partition::{gf_line_partition, odd_partition, round_robin, PairPartition};

/// Strong c-coloring of `G_{c+1, C(c+1,2)}`: the column for `{x < y}` (in
/// lexicographic order) colors rows x and y with c and the other rows with
/// `1..c-1` top to bottom.
pub fn strong_c_plus_one(c: u32) -> Result<Coloring, ConstructionError> {
    if c < 2 {
        return Err(ConstructionError::Parameters("c must be at least 2".into()));
    }
    let n = c as usize + 1;
    let mut cols = Vec::new();
    for x in 1..=n {
        for y in x + 1..=n {
            let mut col = Vec::with_capacity(n);
            let mut next = 1;
            for r in 1..=n {
                if r == x || r == y {
                    col.push(c);
                } else {
                    col.push(next);
                    next += 1;
                }
            }
            cols.push(col);
        }
    }
    from_columns(c, n, &cols)
}

fn from_columns(c: u32, n: usize, cols: &[Vec<u32>]) -> Result<Coloring, ConstructionError> {
    let dims = GridDims::new(n, cols.len())?;
    Ok(Coloring::from_fn(dims, c, |i, j| cols[j - 1][i - 1])?)
}

/// Strong (c, c')-coloring of `G_{c+c', C(c+c',2)}` built from the round-robin
/// matchings (c + c' even) or the odd near-matchings (c + c' odd).
///
/// Each part `P_i = (p_{i,1}, .., p_{i,n})` yields n columns. Column j gives
/// color t to both points of `p_{i,k}` with `k = (j + t) mod n` in `1..=n`,
/// for `t = 1..c'`; the uncovered rows get `c'+1..c` top to bottom.
pub fn strong_general(c: u32, c_prime: u32) -> Result<Coloring, ConstructionError> {
    if c < 2 || c_prime == 0 || c_prime > c {
        return Err(ConstructionError::Parameters(format!(
            "need 2 <= c and 1 <= c' <= c, got c = {c}, c' = {c_prime}"
        )));
    }
    let v = (c + c_prime) as usize;
    let pp = if v.is_multiple_of(2) {
        round_robin(v / 2)
    } else {
        odd_partition(v / 2)
    };
    let n = v / 2;
    let mut cols = Vec::with_capacity(v * (v - 1) / 2);
    for part in &pp.parts {
        for j in 1..=n {
            let mut col = vec![0u32; v];
            for t in 1..=c_prime as usize {
                let k = (j + t - 1) % n;
                for &x in &part[k] {
                    col[x - 1] = t as u32;
                }
            }
            for (x, fresh) in col.iter_mut().filter(|x| **x == 0).zip(c_prime + 1..) {
                *x = fresh;
            }
            cols.push(col);
        }
    }
    from_columns(c, v, &cols)
}

/// Concatenate `chi, chi + c', chi + 2c', ..` (`floor(c/c')` copies, colors
/// taken mod c in `1..=c`). Requires `chi` to be strong (c, c').
pub fn expand_strong(chi: &Coloring, c_prime: u32) -> Result<Coloring, ConstructionError> {
    let c = chi.palette();
    if c_prime == 0 || c_prime > c || !verify_strong(chi, c_prime) {
        return Err(ConstructionError::NotStrong { c, c_prime });
    }
    let x = (c / c_prime) as usize;
    let GridDims { n, m } = chi.dims();
    let dims = GridDims::new(n, x * m)?;
    Ok(Coloring::from_fn(dims, c, |i, j| {
        let (k, b) = ((j - 1) / m, (j - 1) % m + 1);
        (chi.get(i, b) - 1 + k as u32 * c_prime) % c + 1
    })?)
}

/// Color point i in column j by the 1-based index of its block in `P_j`,
/// blocks ordered by their smallest point. Each part must split `[c r]` into
/// exactly c blocks of size r, and no pair may lie in blocks of two parts.
pub fn partition_coloring(pp: &PairPartition, c: u32) -> Result<Coloring, ConstructionError> {
    pp.validate()?;
    if c == 0 || !pp.v.is_multiple_of(c as usize) || pp.parts.is_empty() {
        return Err(ConstructionError::Partition(format!(
            "{} points do not split into {c} blocks",
            pp.v
        )));
    }
    for (i, part) in pp.parts.iter().enumerate() {
        if part.len() != c as usize || !part.iter().all(|b| b.len() == pp.v / c as usize) {
            return Err(ConstructionError::Partition(format!(
                "part {} is not {c} blocks of size {}",
                i + 1,
                pp.v / c as usize
            )));
        }
    }
    let mut cols = Vec::with_capacity(pp.parts.len());
    for part in &pp.parts {
        let mut order: Vec<&Vec<usize>> = part.iter().collect();
        order.sort_by_key(|b| b[0]);
        let mut col = vec![0u32; pp.v];
        for (u, b) in order.iter().enumerate() {
            for &x in b.iter() {
                col[x - 1] = u as u32 + 1;
            }
        }
        cols.push(col);
    }
    from_columns(c, pp.v, &cols)
}

/// Palette `p^(s(d-1))` of the line construction, with the grid it colors.
pub fn prime_power_params(p: u64, s: u32, d: u32) -> Option<(u64, GridDims)> {
    let q = p.checked_pow(s)?;
    let c = q.checked_pow(d - 1)?;
    let r = q;
    let m = (q.checked_pow(d)? - 1) / (q - 1);
    Some((
        c,
        GridDims {
            n: (c * r) as usize,
            m: (c * m) as usize,
        },
    ))
}

/// `c = p^(ds-s)` coloring of `G_{cr, cm}` from the parallel classes of
/// `F^d`, `F = GF(p^s)`.
pub fn prime_power_coloring(p: u64, s: u32, d: u32) -> Result<Coloring, ConstructionError> {
    let pp = gf_line_partition(p, s, d)?;
    let c = pp.parts[0].len() as u32;
    let strong = partition_coloring(&pp, c)?;
    expand_strong(&strong, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BundledKind {
    /// Valid coloring; strong with the given `c'` when present.
    Coloring { strong: Option<u32> },
    /// Cell set claimed rectangle-free with this many members.
    CellSet { size: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct BundledEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub kind: BundledKind,
    text: &'static str,
}

impl BundledEntry {
    pub fn text(&self) -> &'static str {
        self.text
    }
}

macro_rules! entry {
    ($name:literal, $ext:literal, $kind:expr) => {
        BundledEntry {
            name: $name,
            file: concat!($name, $ext),
            kind: $kind,
            text: include_str!(concat!("../data/", $name, $ext)),
        }
    };
}

pub const BUNDLED: &[BundledEntry] = &[
    entry!("g5x8-strong4", ".grid", BundledKind::Coloring { strong: Some(1) }),
    entry!("g4x6-strong3", ".grid", BundledKind::Coloring { strong: Some(1) }),
    entry!("g6x15-strong4-2", ".grid", BundledKind::Coloring { strong: Some(2) }),
    entry!("g8x6-strong6-2", ".grid", BundledKind::Coloring { strong: Some(2) }),
    entry!("g8x28-strong5-3", ".grid", BundledKind::Coloring { strong: Some(3) }),
    entry!("g10x10-3col", ".grid", BundledKind::Coloring { strong: None }),
    entry!("g9x6-strong4", ".grid", BundledKind::Coloring { strong: Some(1) }),
    entry!("g21x11-4col", ".grid", BundledKind::Coloring { strong: None }),
    entry!("g22x10-4col", ".grid", BundledKind::Coloring { strong: None }),
    entry!("g5x17-rfset", ".cells", BundledKind::CellSet { size: 22 }),
    entry!("g21x12-rfset-a", ".cells", BundledKind::CellSet { size: 63 }),
    entry!("g21x12-rfset-b", ".cells", BundledKind::CellSet { size: 63 }),
    entry!("g18x18-rfset", ".cells", BundledKind::CellSet { size: 81 }),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bundled {
    Coloring(Coloring),
    CellSet(CellSet),
}

/// Look up a bundled item by name, with or without its file extension.
pub fn bundled_entry(name: &str) -> Result<&'static BundledEntry, ConstructionError> {
    BUNDLED
        .iter()
        .find(|e| e.name == name || e.file == name)
        .ok_or_else(|| ConstructionError::UnknownBundled(name.to_string()))
}

pub fn bundled(name: &str) -> Result<Bundled, ConstructionError> {
    let e = bundled_entry(name)?;
    Ok(match e.kind {
        BundledKind::Coloring { .. } => Bundled::Coloring(parse_coloring(e.text)?),
        BundledKind::CellSet { .. } => Bundled::CellSet(parse_cellset(e.text)?),
    })
}

pub fn bundled_coloring(name: &str) -> Result<Coloring, ConstructionError> {
    match bundled(name)? {
        Bundled::Coloring(x) => Ok(x),
        Bundled::CellSet(_) => Err(ConstructionError::UnknownBundled(format!("{name} is a cell set"))),
    }
}

pub fn bundled_cellset(name: &str) -> Result<CellSet, ConstructionError> {
    match bundled(name)? {
        Bundled::CellSet(x) => Ok(x),
        Bundled::Coloring(_) => Err(ConstructionError::UnknownBundled(format!("{name} is a coloring"))),
    }
}

/// Whether a bundled item passes the check its kind claims.
pub fn bundled_verifies(e: &BundledEntry) -> bool {
    match (e.kind, bundled(e.name)) {
        (BundledKind::Coloring { strong }, Ok(Bundled::Coloring(x))) => {
            verify_coloring(&x) && strong.is_none_or(|cp| verify_strong(&x, cp))
        }
        (BundledKind::CellSet { size }, Ok(Bundled::CellSet(s))) => s.len() == size && find_rectangle(&s).is_none(),
        _ => false,
    }
}

/// A named coloring in the catalog.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub name: String,
    pub coloring: Coloring,
}

/// Every construction with palette at most c, in the fixed order: bundled,
/// cplusone, cplusgen by ascending c', primepower by ascending `p^(ds)`.
#[derive(Debug, Clone)]
pub struct Catalog {
    c: u32,
    candidates: Vec<Candidate>,
}

/// Largest field-plane point count the catalog tries.
const CATALOG_MAX_POINTS: u64 = 1 << 12;

impl Catalog {
    pub fn new(c: u32) -> Self {
        let mut candidates = Vec::new();
        let mut push = |name: String, x: Result<Coloring, ConstructionError>| {
            if let Ok(x) = x.and_then(|x| Ok(x.with_palette(c)?)) {
                candidates.push(Candidate { name, coloring: x });
            }
        };
        if c >= 1 {
            for e in BUNDLED {
                let BundledKind::Coloring { strong } = e.kind else {
                    continue;
                };
                let Ok(x) = bundled_coloring(e.name) else { continue };
                if x.palette() > c || !bundled_verifies(e) {
                    continue;
                }
                match strong {
                    Some(cp) => push(format!("bundled:{}+expand", e.name), expand_strong(&x, cp)),
                    None => push(format!("bundled:{}", e.name), Ok(x)),
                }
            }
        }
        if c >= 2 {
            push(
                "cplusone".into(),
                strong_c_plus_one(c).and_then(|x| expand_strong(&x, 1)),
            );
            for cp in 1..=c {
                push(
                    format!("cplusgen:c'={cp}"),
                    strong_general(c, cp).and_then(|x| expand_strong(&x, cp)),
                );
            }
        }
        let mut pp = Vec::new();
        for p in (2..=c as u64).filter(|&p| is_prime(p)) {
            for s in 1.. {
                let Some(q) = p.checked_pow(s) else { break };
                if q > c as u64 {
                    break;
                }
                for d in 2.. {
                    match prime_power_params(p, s, d) {
                        Some((pc, _)) if pc <= c as u64 && q.pow(d) <= CATALOG_MAX_POINTS => {
                            pp.push((q.pow(d), p, s, d))
                        }
                        _ => break,
                    }
                }
            }
        }
        pp.sort();
        for (_, p, s, d) in pp {
            push(format!("primepower:p={p},s={s},d={d}"), prime_power_coloring(p, s, d));
        }
        Catalog { c, candidates }
    }

    pub fn palette(&self) -> u32 {
        self.c
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// First construction containing `n x m` in either orientation, cropped
    /// and verified, with its provenance tag.
    pub fn find(&self, n: usize, m: usize) -> Option<(String, Coloring)> {
        let c = self.c;
        let dims = GridDims::new(n, m).ok()?;
        if c == 0 {
            return None;
        }
        if n.min(m) <= c as usize {
            let x = if n <= c as usize {
                Coloring::from_fn(dims, c, |i, _| i as u32)
            } else {
                Coloring::from_fn(dims, c, |_, j| j as u32)
            };
            return Some(("trivial".into(), x.ok()?));
        }
        for cand in &self.candidates {
            let d = cand.coloring.dims();
            let (x, tag) = if d.contains(dims) {
                (cand.coloring.crop(n, m).ok()?, cand.name.clone())
            } else if d.transpose().contains(dims) {
                (
                    cand.coloring.transpose().crop(n, m).ok()?,
                    format!("{}+transpose", cand.name),
                )
            } else {
                continue;
            };
            if verify_coloring(&x) {
                return Some((tag, x));
            }
        }
        None
    }
}

/// A verified c-coloring of `G_{n,m}` from the construction catalog.
pub fn best_known_coloring(n: usize, m: usize, c: u32) -> Option<(String, Coloring)> {
    Catalog::new(c).find(n, m)
}

/// Number of columns of the strong construction for `(c, c')`.
pub fn strong_general_width(c: u32, c_prime: u32) -> usize {
    binom((c + c_prime) as u64, 2) as usize
}
