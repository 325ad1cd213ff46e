//! `rosl` command-line front end.
//!
//! Reports are line-oriented `key=value`. Exit codes: 0 success, 1 usage or
//! configuration error, 2 a checked property was refuted.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Polytope, Vector, EPS_GEOM};
use crate::maps::{self, AffinePolytope, SetValuedMap};
use crate::preimage::{self, BaseSource, GfCover, GridSpec, PreimageError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rosl", version, about = "Preimages of relaxed one-sided Lipschitz maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Map definition file (JSON).
    #[arg(long, global = true)]
    pub map: Option<PathBuf>,
    /// Target point, comma-separated coordinates.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ybar: Option<String>,
    /// Grid `LO..HI[,LO..HI...]xNODES`; one range is used for every axis.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Base points: `x1;x2;...` (coordinates comma-separated), `grid`, or
    /// `inflate:EPS,ITERS`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Use only outward-facing extreme points as ball generators.
    #[arg(long, global = true)]
    pub filtered: bool,
    /// Also compute the brute-force oracle mask and compare.
    #[arg(long = "with-oracle", global = true)]
    pub with_oracle: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Membership tolerance (grid sweeps default to half the grid spacing).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Base point for `gf`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Query point for `gf` and `witness`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Membership queries per polygon size in `bench`.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub queries: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Sampled check of the declared ROSL constant.
    CheckRosl,
    /// Outer approximation of the preimage on a grid.
    Preimage,
    /// Brute-force preimage mask.
    Oracle,
    /// Balls generating G_F(x, ybar).
    Gf,
    /// Base point whose cover excludes a non-preimage point z.
    Witness,
    /// Tabulate G_F(x, 0) for the built-in one-dimensional example.
    ReproduceExample34,
    /// Filtered vs unfiltered membership throughput.
    Bench,
}

/// Validated view of the command line.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub map: Option<SetValuedMap>,
    pub ybar: Option<Vector>,
    pub grid: Option<GridSpec>,
    pub base: Option<BaseSource>,
    pub filtered: bool,
    pub with_oracle: bool,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub x: Option<Vector>,
    pub z: Option<Vector>,
    pub queries: usize,
}

pub fn parse_floats(text: &str) -> anyhow::Result<Vec<f64>> {
    let values = text
        .trim()
        .trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().with_context(|| format!("bad number {t:?}"))?;
            if !v.is_finite() {
                bail!("non-finite number {t:?}");
            }
            Ok(v)
        })
        .collect::<anyhow::Result<Vec<f64>>>()?;
    if values.is_empty() {
        bail!("empty coordinate list");
    }
    Ok(values)
}

pub fn parse_point(text: &str, dim: usize) -> anyhow::Result<Vector> {
    let v = Vector::new(parse_floats(text)?)?;
    if v.dim() != dim {
        bail!("point {text:?} has dimension {}, expected {dim}", v.dim());
    }
    Ok(v)
}

/// `LO..HI[,LO..HI...]xNODES`
pub fn parse_grid(text: &str, dim: usize) -> anyhow::Result<GridSpec> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (ranges, nodes) = compact
        .rsplit_once(['x', 'X'])
        .ok_or_else(|| anyhow!("grid {text:?} must look like LO..HIxNODES"))?;
    let nodes: usize = nodes.parse().with_context(|| format!("bad node count {nodes:?}"))?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for range in ranges.split(',') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| anyhow!("range {range:?} must look like LO..HI"))?;
        lower.push(parse_floats(lo)?[0]);
        upper.push(parse_floats(hi)?[0]);
    }
    if lower.len() == 1 && dim > 1 {
        lower = vec![lower[0]; dim];
        upper = vec![upper[0]; dim];
    }
    if lower.len() != dim {
        bail!("grid has {} axes, map has dimension {dim}", lower.len());
    }
    Ok(GridSpec::new(Vector::new(lower)?, Vector::new(upper)?, nodes)?)
}

pub fn parse_base(text: &str, dim: usize) -> anyhow::Result<BaseSource> {
    let t = text.trim();
    if t == "grid" {
        return Ok(BaseSource::Grid);
    }
    if let Some(rest) = t.strip_prefix("inflate:") {
        let (eps, iters) = rest
            .split_once(',')
            .ok_or_else(|| anyhow!("expected inflate:EPS,ITERS"))?;
        let eps: f64 = eps.trim().parse().context("bad inflate radius")?;
        if !(eps.is_finite() && eps > 0.0) {
            bail!("inflate radius must be positive");
        }
        let iters: usize = iters.trim().parse().context("bad inflate iteration count")?;
        return Ok(BaseSource::Inflate { eps, iters });
    }
    let inner = t.trim_start_matches('{').trim_end_matches('}');
    let points = inner
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_point(p, dim))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if points.is_empty() {
        bail!("no base points given");
    }
    Ok(BaseSource::Explicit(points))
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let map = match &cli.map {
            Some(path) => Some(
                maps::load_map(path).with_context(|| format!("loading {}", path.display()))?,
            ),
            None => None,
        };
        let dim = map.as_ref().map(SetValuedMap::dim);
        let need_dim = |what: &str| dim.ok_or_else(|| anyhow!("--{what} needs --map"));
        let point = |text: &Option<String>, what: &str| -> anyhow::Result<Option<Vector>> {
            text.as_deref()
                .map(|t| parse_point(t, need_dim(what)?).with_context(|| format!("--{what}")))
                .transpose()
        };
        if let Some(tol) = cli.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                bail!("--tol must be a finite non-negative number");
            }
        }
        Ok(Self {
            command: cli.command,
            ybar: point(&cli.ybar, "ybar")?,
            grid: cli
                .grid
                .as_deref()
                .map(|g| parse_grid(g, need_dim("grid")?).context("--grid"))
                .transpose()?,
            base: cli
                .base
                .as_deref()
                .map(|b| parse_base(b, need_dim("base")?).context("--base"))
                .transpose()?,
            x: point(&cli.x, "x")?,
            z: point(&cli.z, "z")?,
            map,
            filtered: cli.filtered,
            with_oracle: cli.with_oracle,
            out: cli.out.clone(),
            tol: cli.tol,
            seed: cli.seed,
            queries: cli.queries,
        })
    }

    fn map(&self) -> anyhow::Result<&SetValuedMap> {
        self.map.as_ref().ok_or_else(|| anyhow!("--map is required"))
    }

    fn ybar(&self) -> anyhow::Result<&Vector> {
        self.ybar.as_ref().ok_or_else(|| anyhow!("--ybar is required"))
    }

    fn grid(&self) -> anyhow::Result<&GridSpec> {
        self.grid.as_ref().ok_or_else(|| anyhow!("--grid is required"))
    }
}

/// Result of a command: report text, files to write, exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(PathBuf, String)>,
    pub code: i32,
}

macro_rules! line {
    ($out:expr, $($arg:tt)*) => {
        let _ = writeln!($out, $($arg)*);
    };
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mask".into());
    out.with_file_name(format!("{stem}{suffix}"))
}

fn push_mask_files(files: &mut Vec<(PathBuf, String)>, path: &Path, mask: &preimage::GridMask) {
    files.push((path.to_path_buf(), mask.to_csv()));
    if let Some(pgm) = mask.to_pgm() {
        files.push((path.with_extension("pgm"), pgm));
    }
}

/// Default ROSL samples: `[-2, 2]^d` with 9 nodes per axis.
pub fn default_samples(dim: usize) -> Vec<Vector> {
    GridSpec::cube(dim, -2.0, 2.0, 9)
        .expect("valid default grid")
        .nodes()
}

pub fn cmd_check_rosl(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let map = cfg.map()?;
    let samples = match &cfg.grid {
        Some(g) => g.nodes(),
        None => default_samples(map.dim()),
    };
    let report = maps::check_rosl(map, &samples)?;
    let estimate = maps::estimate_ell(map, &samples)?;
    let mut out = String::new();
    line!(out, "command=check-rosl");
    line!(out, "map={}", map.id());
    line!(out, "samples={}", samples.len());
    line!(out, "{report}");
    line!(out, "estimated_ell={estimate}");
    if (estimate - map.ell()).abs() > EPS_GEOM {
        line!(
            out,
            "warning=declared ell {} differs from sampled estimate {estimate}",
            map.ell()
        );
    }
    Ok(Outcome {
        report: out,
        files: Vec::new(),
        code: if report.holds { EXIT_OK } else { EXIT_REFUTED },
    })
}

pub fn cmd_preimage(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let map = cfg.map()?;
    let ybar = cfg.ybar()?;
    let grid = cfg.grid()?;
    let base = cfg.base.as_ref().ok_or_else(|| anyhow!("--base is required"))?;
    let tol = cfg.tol.unwrap_or_else(|| grid.tol_grid());
    let outer = preimage::preimage_outer_from(map, ybar, grid, base, cfg.filtered, tol)?;

    let mut out = String::new();
    let mut files = Vec::new();
    let mut code = EXIT_OK;
    line!(out, "command=preimage");
    line!(out, "map={}", map.id());
    line!(out, "ybar={ybar}");
    line!(out, "grid={grid}");
    line!(out, "base={}", base.describe());
    line!(out, "filtered={}", cfg.filtered);
    line!(out, "tol={tol}");
    if !cfg.with_oracle {
        line!(out, "outer_members={}", outer.count());
    }
    if let Some(path) = &cfg.out {
        push_mask_files(&mut files, path, &outer);
    }
    if cfg.with_oracle {
        let oracle = preimage::preimage_oracle_tol(map, ybar, grid, tol)?;
        let cmp = preimage::compare_masks(&outer, &oracle);
        line!(out, "{}", cmp.to_report());
        if cmp.oracle_only > 0 {
            line!(out, "containment=violated");
            code = EXIT_REFUTED;
        } else {
            line!(out, "containment=ok");
        }
        if let Some(path) = &cfg.out {
            push_mask_files(&mut files, &sibling(path, ".oracle.csv"), &oracle);
        }
    }
    Ok(Outcome {
        report: out,
        files,
        code,
    })
}

pub fn cmd_oracle(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let map = cfg.map()?;
    let ybar = cfg.ybar()?;
    let grid = cfg.grid()?;
    let tol = cfg.tol.unwrap_or_else(|| grid.tol_grid());
    let oracle = preimage::preimage_oracle_tol(map, ybar, grid, tol)?;
    let mut out = String::new();
    let mut files = Vec::new();
    line!(out, "command=oracle");
    line!(out, "map={}", map.id());
    line!(out, "ybar={ybar}");
    line!(out, "grid={grid}");
    line!(out, "tol={tol}");
    line!(out, "oracle_members={}", oracle.count());
    if let Some(path) = &cfg.out {
        push_mask_files(&mut files, path, &oracle);
    }
    Ok(Outcome {
        report: out,
        files,
        code: EXIT_OK,
    })
}

pub fn cmd_gf(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let map = cfg.map()?;
    let ybar = cfg.ybar()?;
    let x = cfg.x.as_ref().ok_or_else(|| anyhow!("--x is required"))?;
    let cover = GfCover::new(map, x, ybar, cfg.filtered)?;
    let balls = cover.balls();
    let mut out = String::new();
    line!(out, "command=gf");
    line!(out, "map={}", map.id());
    line!(out, "x={x}");
    line!(out, "ybar={ybar}");
    line!(out, "filtered={}", cfg.filtered);
    line!(out, "generators={}", balls.len());
    for (i, (b, y)) in balls.iter().zip(cover.generators()).enumerate() {
        line!(out, "ball.{i}=y:{y};center:{};radius:{}", b.center, b.radius);
    }
    if map.dim() == 1 {
        let (lo, hi) = interval_union(&balls);
        line!(out, "interval={lo},{hi}");
    }
    if let Some(z) = &cfg.z {
        let tol = cfg.tol.unwrap_or(EPS_GEOM);
        line!(out, "z={z}");
        line!(out, "member={}", cover.contains(z, tol));
    }
    Ok(Outcome {
        report: out,
        files: Vec::new(),
        code: EXIT_OK,
    })
}

pub fn cmd_witness(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let map = cfg.map()?;
    let ybar = cfg.ybar()?;
    let z = cfg.z.as_ref().ok_or_else(|| anyhow!("--z is required"))?;
    let mut out = String::new();
    line!(out, "command=witness");
    line!(out, "map={}", map.id());
    line!(out, "z={z}");
    line!(out, "ybar={ybar}");
    let code = match preimage::witness_excluding_base(map, ybar, z) {
        Ok(Some(x)) => {
            line!(out, "witness={x}");
            EXIT_OK
        }
        Ok(None) => {
            line!(out, "witness=none found");
            EXIT_REFUTED
        }
        Err(PreimageError::InPreimage) => bail!("z in preimage"),
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        report: out,
        files: Vec::new(),
        code,
    })
}

/// Hull of a union of 1D balls that all share a point.
fn interval_union(balls: &[crate::geometry::Ball]) -> (f64, f64) {
    let lo = balls
        .iter()
        .map(|b| b.center.coords()[0] - b.radius)
        .fold(f64::INFINITY, f64::min);
    let hi = balls
        .iter()
        .map(|b| b.center.coords()[0] + b.radius)
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Closed form of `G_F(x, 0)` for the built-in one-dimensional example.
pub fn example34_gf_closed_form(x: f64) -> (f64, f64) {
    if x < 0.0 {
        (x, 2.0)
    } else if x == 0.0 {
        (-2.0, 2.0)
    } else {
        (-2.0, x)
    }
}

pub const EXAMPLE34_POINTS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// `(x, computed endpoints, closed-form endpoints)`.
pub type Example34Row = (f64, (f64, f64), (f64, f64));

/// Computed `G_F(x, 0)` endpoints next to the closed form.
pub fn example34_table() -> anyhow::Result<Vec<Example34Row>> {
    let map = SetValuedMap::example34();
    let ybar = Vector::scalar(0.0);
    EXAMPLE34_POINTS
        .iter()
        .map(|&x| {
            let balls = preimage::gf_balls(&map, &Vector::scalar(x), &ybar, false)?;
            Ok((x, interval_union(&balls), example34_gf_closed_form(x)))
        })
        .collect()
}

pub fn cmd_reproduce_example34(_cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut out = String::new();
    let mut all = true;
    line!(out, "command=reproduce-example34");
    for (x, (lo, hi), (plo, phi)) in example34_table()? {
        let ok = (lo - plo).abs() <= 1e-9 && (hi - phi).abs() <= 1e-9;
        all &= ok;
        line!(out, "x={x} computed={lo},{hi} closed_form={plo},{phi} match={ok}");
    }
    line!(out, "all_match={all}");
    Ok(Outcome {
        report: out,
        files: Vec::new(),
        code: if all { EXIT_OK } else { EXIT_REFUTED },
    })
}

/// Regular `n`-gon of radius 1 centred at the origin.
pub fn regular_polygon(n: usize) -> Polytope {
    let pts: Vec<Vector> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            Vector::from_slice(&[t.cos(), t.sin()])
        })
        .collect();
    Polytope::from_points(&pts, EPS_GEOM).expect("polygon hull")
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub vertices: usize,
    pub queries: usize,
    pub members: usize,
    pub mismatches: usize,
    pub retained_fraction: f64,
    pub far_retained_fraction: f64,
    pub unfiltered_qps: f64,
    pub filtered_qps: f64,
}

const QUERIES_PER_BASE: usize = 50;

/// Filtered vs unfiltered covers on `F(x) = −x + P_n` for a regular n-gon.
pub fn bench_rows(seed: u64, queries: usize, sizes: &[usize]) -> anyhow::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let poly = regular_polygon(n);
        let affine = AffinePolytope::new(
            Vector::zeros(2),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            poly.clone(),
        )?;
        let map = SetValuedMap::affine(format!("ngon{n}"), affine);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let bases = queries.div_ceil(QUERIES_PER_BASE).max(1);
        let mut setups = Vec::with_capacity(bases);
        for _ in 0..bases {
            let x = Vector::from_slice(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            let ybar = Vector::from_slice(&[rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)]);
            let zs: Vec<Vector> = (0..QUERIES_PER_BASE)
                .map(|_| x.add_scaled(1.0, &Vector::from_slice(&[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])))
                .collect();
            setups.push((x, ybar, zs));
        }

        let start = Instant::now();
        let mut plain = Vec::with_capacity(bases * QUERIES_PER_BASE);
        for (x, ybar, zs) in &setups {
            let cover = GfCover::new(&map, x, ybar, false)?;
            plain.extend(zs.iter().map(|z| cover.contains(z, EPS_GEOM)));
        }
        let plain_secs = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let mut filtered = Vec::with_capacity(plain.len());
        let mut retained = 0.0;
        for (x, ybar, zs) in &setups {
            let cover = GfCover::new(&map, x, ybar, true)?;
            retained += cover.generators().len() as f64 / n as f64;
            filtered.extend(zs.iter().map(|z| cover.contains(z, EPS_GEOM)));
        }
        let filtered_secs = start.elapsed().as_secs_f64();

        let far = preimage::gf_extreme_filter(&poly, &Vector::from_slice(&[1000.0, 0.0]))?;
        rows.push(BenchRow {
            vertices: n,
            queries: plain.len(),
            members: plain.iter().filter(|&&m| m).count(),
            mismatches: plain.iter().zip(&filtered).filter(|(a, b)| a != b).count(),
            retained_fraction: retained / bases as f64,
            far_retained_fraction: far.len() as f64 / n as f64,
            unfiltered_qps: plain.len() as f64 / plain_secs.max(1e-9),
            filtered_qps: filtered.len() as f64 / filtered_secs.max(1e-9),
        });
    }
    Ok(rows)
}

pub fn cmd_bench(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let rows = bench_rows(cfg.seed, cfg.queries, &[8, 64, 512])?;
    let mut out = String::new();
    let mut file = String::new();
    line!(out, "command=bench");
    line!(out, "seed={}", cfg.seed);
    let mut mismatches = 0;
    for r in &rows {
        let stable = format!(
            "n={} queries={} members={} mismatches={} retained_fraction={:.6} far_retained_fraction={:.6}",
            r.vertices, r.queries, r.members, r.mismatches, r.retained_fraction, r.far_retained_fraction
        );
        line!(
            out,
            "{stable} unfiltered_qps={:.0} filtered_qps={:.0}",
            r.unfiltered_qps,
            r.filtered_qps
        );
        line!(file, "{stable}");
        mismatches += r.mismatches;
    }
    line!(out, "verdicts_equal={}", mismatches == 0);
    let files = cfg
        .out
        .as_ref()
        .map(|p| vec![(p.clone(), file)])
        .unwrap_or_default();
    Ok(Outcome {
        report: out,
        files,
        code: if mismatches == 0 { EXIT_OK } else { EXIT_REFUTED },
    })
}

pub fn execute(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    match cfg.command {
        Command::CheckRosl => cmd_check_rosl(cfg),
        Command::Preimage => cmd_preimage(cfg),
        Command::Oracle => cmd_oracle(cfg),
        Command::Gf => cmd_gf(cfg),
        Command::Witness => cmd_witness(cfg),
        Command::ReproduceExample34 => cmd_reproduce_example34(cfg),
        Command::Bench => cmd_bench(cfg),
    }
}

/// Parses `args` (including the program name), runs the command, writes the
/// report to `stdout` and output files to disk. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let outcome = RunConfig::from_cli(&cli).and_then(|cfg| {
        let outcome = execute(&cfg)?;
        for (path, contents) in &outcome.files {
            std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(outcome)
    });
    match outcome {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.report.as_bytes());
            for (path, _) in &outcome.files {
                let _ = writeln!(stdout, "wrote={}", path.display());
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
