//! `gridcolor`: verify, construct and classify rectangle-free grid colorings.
//!
//! Exit codes: 0 ok or valid, 1 invalid or refuted, 2 unknown or timeout,
//! 64 usage. Errors go to stderr as one JSON object.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gridcolor::bounds::{maxrf_closed, maxrf_upper};
use gridcolor::cache::VerdictCache;
use gridcolor::constructions::{
    bundled_entry, expand_strong, prime_power_coloring, strong_c_plus_one, strong_general, BundledKind,
};
use gridcolor::grid::{
    find_mono_rectangle, find_rectangle, parse_cellset, parse_coloring, serialize_coloring, verify_strong,
};
use gridcolor::obstruction::{
    bipartite_ramsey2, compute_obs, default_max_dim, Atlas, Classifier, ClassifyOptions, Status, Verdict,
};
use gridcolor::search::{greedy_rect_free, maxrf_exact};
use gridcolor::{CellSet, Coloring, Rect};
use serde_json::{json, Value};

use config::{Config, FileConfig, Format, Overrides};

#[derive(Parser)]
#[command(name = "gridcolor", version, about = "Rectangle-free colorings of grids")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Node limit per search call.
    #[arg(long, global = true)]
    nodes: Option<u64>,
    /// Wall-clock limit per search call, in milliseconds.
    #[arg(long = "wall-ms", global = true)]
    wall_ms: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Verdict cache file (also GRIDCOLOR_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Single thread, no wall clock, no timings in the output.
    #[arg(long, global = true)]
    deterministic: bool,
    /// TOML settings file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a coloring (.grid) or a rectangle-free cell set (.cells).
    Verify {
        /// File path, or `bundled/<name>`.
        file: String,
        /// Also require the coloring to be strong with this c'.
        #[arg(long)]
        strong: Option<u32>,
    },
    /// Build a coloring and write it in grid format.
    Construct {
        #[command(subcommand)]
        recipe: Recipe,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Size of the largest rectangle-free subset of G_{n,m}.
    Maxrf {
        n: usize,
        m: usize,
        /// Decide by search.
        #[arg(long, conflicts_with = "bounds")]
        exact: bool,
        /// Bounds only (the default).
        #[arg(long)]
        bounds: bool,
    },
    /// Decide whether G_{n,m} is c-colorable.
    Classify {
        n: usize,
        m: usize,
        c: u32,
        #[arg(long = "assume-rfc")]
        assume_rfc: bool,
    },
    /// Minimal non-colorable grids up to a bounding box.
    Obs {
        c: u32,
        #[arg(long = "max-dim")]
        max_dim: Option<usize>,
        #[arg(long = "assume-rfc")]
        assume_rfc: bool,
    },
    /// C/N/U table of colorability.
    Chart {
        c: u32,
        #[arg(long, value_parser = parse_range)]
        rows: (usize, usize),
        #[arg(long, value_parser = parse_range)]
        cols: (usize, usize),
        #[arg(long = "assume-rfc")]
        assume_rfc: bool,
    },
    /// Bracket on BR(2,c).
    Ramsey { c: u32 },
}

#[derive(Subcommand)]
enum Recipe {
    /// Strong (c+1, 1)-coloring of G_{c+1, C(c+1,2)}.
    Cplusone {
        #[arg(long)]
        c: u32,
    },
    /// Strong (c, c')-coloring of G_{c+c', C(c+c',2)}.
    Cplusgen {
        #[arg(long)]
        c: u32,
        #[arg(long = "c-prime")]
        c_prime: u32,
    },
    /// Coloring from the parallel classes of lines in GF(p^s)^d.
    Primepower {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        d: u32,
    },
    /// Widen a strong (c, c')-coloring into a c-coloring.
    Expand {
        file: String,
        #[arg(long = "c-prime")]
        c_prime: u32,
    },
    /// A bundled coloring, verbatim.
    Bundled { name: String },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a == 0 || a > b {
        return Err(format!("empty or zero-based range {s:?}"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (kind, message, code) = match self {
            Failure::Usage(m) => ("usage", m, 64),
            Failure::Input(m) => ("input", m, 1),
        };
        eprintln!("{}", json!({ "error": kind, "message": message }));
        ExitCode::from(code)
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

enum Loaded {
    Coloring(Coloring),
    Cells(CellSet),
}

/// Read a grid file or a `bundled/<name>` pseudo-path.
fn load(spec: &str) -> Result<Loaded, Failure> {
    if let Some(name) = spec.strip_prefix("bundled/") {
        let e = bundled_entry(name).map_err(input)?;
        return match e.kind {
            BundledKind::Coloring { .. } => Ok(Loaded::Coloring(parse_coloring(e.text()).map_err(input)?)),
            BundledKind::CellSet { .. } => Ok(Loaded::Cells(parse_cellset(e.text()).map_err(input)?)),
        };
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
    if Path::new(spec).extension().is_some_and(|x| x == "cells") {
        parse_cellset(&text).map(Loaded::Cells).map_err(input)
    } else {
        parse_coloring(&text).map(Loaded::Coloring).map_err(input)
    }
}

struct Out {
    format: Format,
}

impl Out {
    fn emit(&self, text: &str, value: Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => println!("{value}"),
        }
    }
}

fn rect_json(r: Option<Rect>) -> Value {
    r.map_or(
        Value::Null,
        |r| json!({ "r1": r.r1, "r2": r.r2, "j1": r.j1, "j2": r.j2 }),
    )
}

fn verify(out: &Out, file: &str, strong: Option<u32>) -> Result<u8, Failure> {
    let (kind, dims, palette, rect, strong_ok) = match load(file)? {
        Loaded::Coloring(x) => {
            let rect = find_mono_rectangle(&x);
            let strong_ok = strong.map(|cp| verify_strong(&x, cp));
            ("coloring", x.dims(), Some(x.palette()), rect, strong_ok)
        }
        Loaded::Cells(s) => {
            if strong.is_some() {
                return Err(Failure::Usage("--strong applies to colorings only".into()));
            }
            ("cellset", s.dims(), None, find_rectangle(&s), None)
        }
    };
    let valid = rect.is_none() && strong_ok != Some(false);
    let mut text = format!("{file}: {kind} {dims}: ");
    match (rect, strong_ok) {
        (Some(r), _) => text += &format!("invalid, rectangle at {r}\n"),
        (None, Some(false)) => text += &format!("valid but not strong for c'={}\n", strong.unwrap()),
        (None, Some(true)) => text += &format!("valid, strong for c'={}\n", strong.unwrap()),
        (None, None) => text += "valid\n",
    }
    let value = json!({
        "file": file,
        "kind": kind,
        "n": dims.n,
        "m": dims.m,
        "c": palette,
        "valid": valid,
        "violation": rect_json(rect),
        "strong": strong_ok,
    });
    out.emit(&text, value);
    Ok(if valid { 0 } else { 1 })
}

fn construct(recipe: Recipe, output: Option<PathBuf>) -> Result<u8, Failure> {
    let x = match recipe {
        Recipe::Cplusone { c } => strong_c_plus_one(c).map_err(input)?,
        Recipe::Cplusgen { c, c_prime } => strong_general(c, c_prime).map_err(input)?,
        Recipe::Primepower { p, s, d } => prime_power_coloring(p, s, d).map_err(input)?,
        Recipe::Expand { file, c_prime } => match load(&file)? {
            Loaded::Coloring(x) => expand_strong(&x, c_prime).map_err(input)?,
            Loaded::Cells(_) => return Err(Failure::Input(format!("{file} is a cell set"))),
        },
        Recipe::Bundled { name } => match load(&format!("bundled/{name}"))? {
            Loaded::Coloring(x) => x,
            Loaded::Cells(_) => return Err(Failure::Input(format!("{name} is a cell set"))),
        },
    };
    let text = serialize_coloring(&x);
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn maxrf(out: &Out, cfg: &Config, n: usize, m: usize, exact: bool) -> Result<u8, Failure> {
    if n == 0 || m == 0 {
        return Err(Failure::Usage("grid sides must be positive".into()));
    }
    let (lower, upper, provenance, stats) = if let Some(v) = maxrf_closed(n as u64, m as u64) {
        (v as usize, v as usize, "closed-form".to_string(), None)
    } else if exact {
        let r = maxrf_exact(n, m, &cfg.budget).map_err(input)?;
        (r.lower, r.upper, "search".to_string(), Some(r.stats))
    } else {
        let lower = greedy_rect_free(n, m).len();
        (
            lower,
            maxrf_upper(n as u64, m as u64) as usize,
            "bounds".to_string(),
            None,
        )
    };
    let stats = stats.map(|mut s| {
        if cfg.deterministic {
            s.elapsed_ms = 0;
        }
        s
    });
    let text = if lower == upper {
        format!("maxrf({n},{m}) = {lower} ({provenance})\n")
    } else {
        format!("{lower} <= maxrf({n},{m}) <= {upper} ({provenance})\n")
    };
    let value = json!({ "n": n, "m": m, "lower": lower, "upper": upper, "provenance": provenance, "search": stats });
    out.emit(&text, value);
    Ok(if lower == upper { 0 } else { 2 })
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Colorable => 0,
        Status::NotColorable => 1,
        Status::Unknown => 2,
    }
}

fn scrub(mut v: Verdict, cfg: &Config) -> Verdict {
    if cfg.deterministic {
        if let Some(s) = v.search.as_mut() {
            s.elapsed_ms = 0;
        }
    }
    v
}

fn check_palette(c: u32) -> Result<(), Failure> {
    if c == 0 {
        return Err(Failure::Usage("c must be at least 1".into()));
    }
    Ok(())
}

fn dims_json(list: &[gridcolor::GridDims]) -> Value {
    Value::Array(list.iter().map(|d| json!([d.n, d.m])).collect())
}

fn dims_text(list: &[gridcolor::GridDims]) -> String {
    list.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = cli.global;
    let file = match &g.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        nodes: g.nodes,
        wall_ms: g.wall_ms,
        threads: g.threads,
        cache: g.cache,
        format: g.format,
        deterministic: g.deterministic,
    };
    let cfg = Config::resolve(file, Config::env_cache(), flags).map_err(Failure::Usage)?;
    let out = Out { format: cfg.format };
    let cache = match &cfg.cache_path {
        Some(p) => Some(VerdictCache::open(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let classifier = |c: u32, assume_rfc: bool| {
        let cl = Classifier::new(
            c,
            ClassifyOptions {
                budget: cfg.budget,
                assume_rfc,
                search: true,
            },
        );
        match &cache {
            Some(k) => cl.with_cache(k),
            None => cl,
        }
    };

    let code = match cli.cmd {
        Command::Verify { file, strong } => verify(&out, &file, strong)?,
        Command::Construct { recipe, output } => construct(recipe, output)?,
        Command::Maxrf { n, m, exact, .. } => maxrf(&out, &cfg, n, m, exact)?,
        Command::Classify { n, m, c, assume_rfc } => {
            check_palette(c)?;
            if n == 0 || m == 0 {
                return Err(Failure::Usage("grid sides must be positive".into()));
            }
            let v = scrub(classifier(c, assume_rfc).classify(n, m), &cfg);
            let value = serde_json::to_value(&v).map_err(input)?;
            out.emit(&format!("{v}\n"), value);
            status_code(v.status)
        }
        Command::Obs { c, max_dim, assume_rfc } => {
            check_palette(c)?;
            let max_dim = max_dim.unwrap_or_else(|| default_max_dim(c));
            let r = compute_obs(&classifier(c, assume_rfc), max_dim);
            let mut text = format!(
                "OBS_{c}{} within {max_dim}x{max_dim}: {} minimal grids\n  {}\n",
                if assume_rfc { " (assuming RFC)" } else { "" },
                r.minimal.len(),
                dims_text(&r.minimal)
            );
            if r.complete {
                text += "complete\n";
            } else {
                text += &format!(
                    "unknown: {}\nincomplete: minimal set is not OBS_{c}\n",
                    dims_text(&r.unknown)
                );
            }
            let value = json!({
                "c": c,
                "max_dim": max_dim,
                "assume_rfc": assume_rfc,
                "minimal": dims_json(&r.minimal),
                "unknown": dims_json(&r.unknown),
                "complete": r.complete,
            });
            out.emit(&text, value);
            if r.complete {
                0
            } else {
                2
            }
        }
        Command::Chart {
            c,
            rows,
            cols,
            assume_rfc,
        } => {
            check_palette(c)?;
            let cl = classifier(c, assume_rfc);
            let dim = rows.1.max(cols.1).max(c as usize + 1);
            let ch = Atlas::build(&cl, dim).chart(rows, cols);
            let value = serde_json::to_value(&ch).map_err(input)?;
            out.emit(&ch.to_string(), value);
            0
        }
        Command::Ramsey { c } => {
            if c < 2 {
                return Err(Failure::Usage("ramsey needs c >= 2".into()));
            }
            let r = bipartite_ramsey2(&classifier(c, false));
            let text = match r.exact() {
                Some(v) => format!("BR(2,{c}) = {v}\n"),
                None => format!("{} <= BR(2,{c}) <= {}\n", r.lower, r.upper),
            };
            out.emit(&text, serde_json::to_value(r).map_err(input)?);
            if r.exact().is_some() {
                0
            } else {
                2
            }
        }
    };
    if let Some(k) = &cache {
        k.save().map_err(|e| Failure::Input(format!("saving cache: {e}")))?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ")
                .to_string();
            return Failure::Usage(first).report();
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => f.report(),
    }
}
