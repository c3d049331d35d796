//! Closed-form uncolorability tests and upper bounds on maxrf.
//!
//! Everything here is exact integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::BoundsError;
use crate::grid::binom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    NotColorable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Uncolor1,
    Uncolor2,
    Uncolor2a,
    Uncolor3,
    Csq,
    ProfileCascade,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Uncolor1 => "uncolor1",
            Rule::Uncolor2 => "uncolor2",
            Rule::Uncolor2a => "uncolor2a",
            Rule::Uncolor3 => "uncolor3",
            Rule::Csq => "csq",
            Rule::ProfileCascade => "profile-cascade",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Result of a bound check. `evidence` holds every number substituted into
/// the inequality, keyed by its usual name (`n`, `m`, `c`, `a`, `q`, `r`, `z`, ...).
/// `n` and `m` are given in the orientation where the rule fired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub outcome: Outcome,
    pub rule: Option<Rule>,
    pub evidence: BTreeMap<String, u64>,
}

impl BoundVerdict {
    fn inconclusive() -> Self {
        BoundVerdict {
            outcome: Outcome::Inconclusive,
            rule: None,
            evidence: BTreeMap::new(),
        }
    }

    fn fired(rule: Rule, evidence: &[(&str, u64)]) -> Self {
        BoundVerdict {
            outcome: Outcome::NotColorable,
            rule: Some(rule),
            evidence: evidence.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn is_not_colorable(&self) -> bool {
        self.outcome == Outcome::NotColorable
    }
}

pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// `z_{n,m} = floor((n + sqrt(n^2 + 4nm(m-1))) / 2) + 1`, an upper bound on the
/// Zarankiewicz number, so `maxrf(n, m) <= z - 1`.
///
/// Valid for all positive `n`, `m`: the derivation only uses
/// `sum C(d_i, 2) <= C(m, 2)` over the n rows and convexity.
pub fn reiman_z(n: u64, m: u64) -> Result<u64, BoundsError> {
    if n == 0 || m == 0 {
        return Err(BoundsError::Domain {
            n,
            m,
            msg: "dimensions must be positive",
        });
    }
    let (n128, m128) = (n as u128, m as u128);
    let disc = n128 * n128 + 4 * n128 * m128 * (m128 - 1);
    Ok(((n128 + isqrt(disc)) / 2) as u64 + 1)
}

/// A rectangle-free set of size `a = qn + r` (`0 <= r < n`) needs
/// `n q(q-1) + 2qr <= m(m-1)`: its n row degrees are at least as spread as the
/// balanced profile, and two rows may share at most one column pair.
pub fn density_feasible(n: u64, m: u64, a: u64) -> bool {
    if n == 0 {
        return a == 0;
    }
    let (q, r) = (a / n, a % n);
    if q == 0 {
        return true;
    }
    n * q * (q - 1) + 2 * q * r <= m * m.saturating_sub(1)
}

/// Largest `a <= nm` with `density_feasible(n, m, a)`.
pub fn density_max(n: u64, m: u64) -> u64 {
    if n == 0 || m == 0 {
        return 0;
    }
    let budget = m * (m - 1);
    let mut q = 1;
    while q < m && n * (q + 1) * q <= budget {
        q += 1;
    }
    // q is the largest row-degree level with r = 0 feasible.
    let spare = budget - n * q * (q - 1);
    let r = (spare / (2 * q)).min(n - 1);
    (q * n + r).min(n * m)
}

/// Necessary condition for a column profile: `sum C(x_j, 2) <= C(n, 2)`.
pub fn binom_sum_ok(xs: &[u64], n: u64) -> bool {
    xs.iter().map(|&x| binom(x, 2)).sum::<u64>() <= binom(n, 2)
}

/// Upper bound on `x_1 + .. + x_k` for k columns of a rectangle-free set in
/// n rows. With `common_point` the k columns share a row.
pub fn inex_upper(k: u64, n: u64, common_point: bool) -> i64 {
    if !common_point {
        return (n + binom(k, 2)) as i64;
    }
    let mut s = n as i64;
    for j in 2..=k {
        let term = binom(k, j) as i64;
        s += if j % 2 == 0 { term } else { -term };
    }
    s
}

/// Exact maxrf when the smaller side is at most 6.
pub fn maxrf_closed(n: u64, m: u64) -> Option<u64> {
    let (s, l) = if n <= m { (n, m) } else { (m, n) };
    let v = match s {
        0 => 0,
        1 => l,
        2 => l + 1,
        3 => l + 3,
        4 => {
            if l <= 5 {
                l + 5
            } else {
                l + 6
            }
        }
        5 => match l {
            5 => 12,
            6..=7 => l + 8,
            8..=9 => l + 9,
            _ => l + 10,
        },
        6 => match l {
            6..=7 => 2 * l + 4,
            8 => 19,
            9..=10 => l + 12,
            11..=12 => l + 13,
            13..=14 => l + 14,
            _ => l + 15,
        },
        _ => return None,
    };
    Some(v)
}

/// Bounds that need no recursion: closed form, Reiman, density, and `nm`.
fn base_upper(n: u64, m: u64) -> u64 {
    if n == 0 || m == 0 {
        return 0;
    }
    if let Some(v) = maxrf_closed(n, m) {
        return v;
    }
    let z = reiman_z(n, m).unwrap().min(reiman_z(m, n).unwrap()) - 1;
    z.min(density_max(n, m)).min(density_max(m, n)).min(n * m)
}

/// Profile split at cutoff `x_star`, columns of the `n x m` orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileSplit {
    pub x_star: u64,
    /// Some column has at least `x_star` cells.
    pub case_a: u64,
    /// All columns below `x_star`: best count over the feasible number `k`
    /// of columns at exactly `x_star - 1`.
    pub case_bc: u64,
    pub k: u64,
}

impl ProfileSplit {
    pub fn bound(&self) -> u64 {
        self.case_a.max(self.case_bc)
    }
}

/// Upper bound on maxrf(n, m) by splitting on the largest column size.
///
/// If the largest column has `x >= x*` cells, each other column meets it in
/// at most one row and the remaining `n - x` rows form a rectangle-free set
/// with `m - 1` columns, so `|A| <= x* + m - 1 + U(n - x*, m - 1)` (the
/// right side only grows as x drops to x*). Otherwise every column has at
/// most `y = x* - 1` cells; if k columns have exactly y, those alone form a
/// rectangle-free set in `G_{n,k}` of size `yk`, which the base bounds must
/// allow, and `|A| <= yk + (y - 1)(m - k)`.
pub fn profile_split(n: u64, m: u64, x_star: u64) -> ProfileSplit {
    let case_a = x_star + m - 1 + base_upper(n - x_star, m - 1);
    let y = x_star - 1;
    let (mut case_bc, mut best_k) = (0, 0);
    if y > 0 {
        for k in 0..=m {
            if k > 0 && base_upper(n, k) < y * k {
                continue;
            }
            let v = y * k + (y - 1) * (m - k);
            if v >= case_bc {
                case_bc = v;
                best_k = k;
            }
        }
    }
    ProfileSplit {
        x_star,
        case_a,
        case_bc,
        k: best_k,
    }
}

/// Upper bound on the size of a rectangle-free subset of `G_{n,m}`.
pub fn maxrf_upper(n: u64, m: u64) -> u64 {
    let mut best = base_upper(n, m);
    if maxrf_closed(n, m).is_some() {
        return best;
    }
    for (a, b) in [(n, m), (m, n)] {
        for x in 1..=a {
            best = best.min(profile_split(a, b, x).bound());
        }
    }
    best
}

/// Tries uncolor1, uncolor2, uncolor2a, uncolor3 and csq in that order, each
/// on both orientations.
pub fn check_uncolorable(n: u64, m: u64, c: u64) -> BoundVerdict {
    if n == 0 || m == 0 || c == 0 {
        return BoundVerdict::inconclusive();
    }
    let a = ceil_div(n * m, c);
    let orients = [(n, m), (m, n)];

    for &(n, m) in &orients {
        let z = reiman_z(n, m).unwrap();
        if z <= a {
            return BoundVerdict::fired(Rule::Uncolor1, &[("n", n), ("m", m), ("c", c), ("a", a), ("z", z)]);
        }
    }
    for &(n, m) in &orients {
        if a >= n {
            let r = a - n;
            if binom(m, 2) < r && r <= n {
                return BoundVerdict::fired(
                    Rule::Uncolor2,
                    &[
                        ("n", n),
                        ("m", m),
                        ("c", c),
                        ("a", a),
                        ("r", r),
                        ("binom_m_2", binom(m, 2)),
                    ],
                );
            }
        }
    }
    for &(n, m) in &orients {
        for cp in 1..=c {
            if n == c + cp && m * cp > c * binom(c + cp, 2) {
                return BoundVerdict::fired(
                    Rule::Uncolor2a,
                    &[
                        ("n", n),
                        ("m", m),
                        ("c", c),
                        ("c_prime", cp),
                        ("limit_times_c_prime", c * binom(c + cp, 2)),
                    ],
                );
            }
        }
    }
    for &(n, m) in &orients {
        let (q, r) = (a / n, a % n);
        if q >= 2 && m * (m - 1) < 2 * q * r + n * q * (q - 1) {
            let ev = (m * (m - 1)).saturating_sub(2 * q * r) / (q * (q - 1));
            return BoundVerdict::fired(
                Rule::Uncolor3,
                &[
                    ("n", n),
                    ("m", m),
                    ("c", c),
                    ("a", a),
                    ("q", q),
                    ("r", r),
                    ("bound", ev),
                ],
            );
        }
    }
    let side = c * c + c;
    if n >= side && m >= side {
        return BoundVerdict::fired(Rule::Csq, &[("n", n), ("m", m), ("c", c), ("side", side)]);
    }
    BoundVerdict::inconclusive()
}

/// Mechanized case split on the largest column: NotColorable when some cutoff
/// `x*` in `ceil(a/m)..=n` keeps both branches of [`profile_split`] below
/// `a = ceil(nm/c)`.
pub fn profile_cascade_uncolorable(n: u64, m: u64, c: u64) -> BoundVerdict {
    if n == 0 || m == 0 || c == 0 {
        return BoundVerdict::inconclusive();
    }
    let a = ceil_div(n * m, c);
    for (n, m) in [(n, m), (m, n)] {
        for x in ceil_div(a, m).max(1)..=n {
            let s = profile_split(n, m, x);
            if s.bound() < a {
                return BoundVerdict::fired(
                    Rule::ProfileCascade,
                    &[
                        ("n", n),
                        ("m", m),
                        ("c", c),
                        ("a", a),
                        ("x_star", x),
                        ("case_a", s.case_a),
                        ("case_bc", s.case_bc),
                        ("k", s.k),
                    ],
                );
            }
        }
    }
    BoundVerdict::inconclusive()
}

/// `(lower, upper)` bounds on `|OBS_c|`.
///
/// The lower bound counts `G_{c+1,.}` and each `c'` in `2..=c` for which
/// `(c/c') C(c+c',2) < floor(c/(c'-1)) C(c+c'-1,2)`, doubled for transposes.
pub fn obs_cardinality_bounds(c: u64) -> (u64, u64) {
    let mut count = 1;
    for cp in 2..=c {
        let lhs = c * binom(c + cp, 2);
        let rhs = cp * (c / (cp - 1)) * binom(c + cp - 1, 2);
        if lhs < rhs {
            count += 1;
        }
    }
    (2 * count, 2 * c * c)
}
