//! Front-end plumbing for the `nls-modulation` command-line tool: case naming,
//! sweep grids, per-point evaluation and deterministic CSV / JSON-lines output.

use std::fmt::Write as _;
use std::io::{self, Write};

use nls_modulation::analysis::{analyze_case, AnalysisError};
use nls_modulation::modulation::Perturbation;
use nls_modulation::pencil_solver::FIGURE_THRESHOLD;
use nls_modulation::{CaseId, Real};
use rayon::prelude::*;
use serde_json::{json, Value};

pub mod report;

/// Families of root-parameterized waves, by command-line name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseFamily {
    CubicFocusing,
    CubicDefocusing,
    QuinticFocusing4,
    QuinticFocusing2,
    QuinticDefocusing,
}

impl CaseFamily {
    pub const ALL: [CaseFamily; 5] = [
        CaseFamily::CubicFocusing,
        CaseFamily::CubicDefocusing,
        CaseFamily::QuinticFocusing4,
        CaseFamily::QuinticFocusing2,
        CaseFamily::QuinticDefocusing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseFamily::CubicFocusing => "cubic-f",
            CaseFamily::CubicDefocusing => "cubic-d",
            CaseFamily::QuinticFocusing4 => "quintic-f4",
            CaseFamily::QuinticFocusing2 => "quintic-f2",
            CaseFamily::QuinticDefocusing => "quintic-d",
        }
    }

    /// Names of the two case coordinates.
    pub fn coordinate_names(self) -> (&'static str, &'static str) {
        match self {
            CaseFamily::CubicFocusing => ("k", "b"),
            CaseFamily::QuinticFocusing2 => ("phi", "m"),
            _ => ("l", "m"),
        }
    }

    pub fn case(self, p1: f64, p2: f64) -> CaseId {
        match self {
            CaseFamily::CubicFocusing => CaseId::CubicFocusing { k: p1, b: p2 },
            CaseFamily::CubicDefocusing => CaseId::CubicDefocusing { l: p1, m: p2 },
            CaseFamily::QuinticFocusing4 => CaseId::QuinticFocusing4 { l: p1, m: p2 },
            CaseFamily::QuinticFocusing2 => CaseId::QuinticFocusing2 { phi: p1, m: p2 },
            CaseFamily::QuinticDefocusing => CaseId::QuinticDefocusing { l: p1, m: p2 },
        }
    }

    /// Maps normalized `(u, v)` in the open unit square onto the case domain.
    pub fn map_unit(self, u: f64, v: f64) -> (f64, f64) {
        match self {
            CaseFamily::CubicFocusing => (u, u * u + v * (1.0 - u * u)),
            CaseFamily::CubicDefocusing => (u * v, v),
            CaseFamily::QuinticFocusing4 => (u * (1.0 + v) / 2.0, v),
            CaseFamily::QuinticFocusing2 => (u * std::f64::consts::FRAC_PI_2, v),
            CaseFamily::QuinticDefocusing => (u, v * u),
        }
    }

    /// Classification threshold used when none is given (the focusing-cubic
    /// diagrams use a coarser one).
    pub fn default_threshold(self) -> f64 {
        match self {
            CaseFamily::CubicFocusing => FIGURE_THRESHOLD,
            _ => nls_modulation::pencil_solver::DEFAULT_THRESHOLD,
        }
    }
}

impl std::str::FromStr for CaseFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CaseFamily::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            format!("unknown case '{s}' (expected one of cubic-f, cubic-d, quintic-f4, quintic-f2, quintic-d)")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(format!("unknown format '{s}' (expected csv or jsonl)")),
        }
    }
}

/// Coordinates of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridWindow {
    /// Normalized unit square with the given inset from every edge.
    Unit { inset: f64 },
    /// Raw case coordinates `[p1min, p1max] x [p2min, p2max]`, inset applied in normalized units.
    Box { p1: (f64, f64), p2: (f64, f64), inset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: CaseFamily,
    pub grid: (usize, usize),
    pub window: GridWindow,
    pub perturbation: Perturbation,
    pub threshold: f64,
    pub include_roots: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return Err("grid must be at least 2 x 2".into());
        }
        let inset = match self.window {
            GridWindow::Unit { inset } | GridWindow::Box { inset, .. } => inset,
        };
        if !(inset > 0.0 && inset < 0.5) {
            return Err("inset must lie in (0, 0.5)".into());
        }
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err("threshold must be non-negative".into());
        }
        Ok(())
    }

    /// Grid points in output order: outer loop over the first coordinate.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let (n1, n2) = self.grid;
        let inset = match self.window {
            GridWindow::Unit { inset } | GridWindow::Box { inset, .. } => inset,
        };
        let node = |i: usize, n: usize| inset + (1.0 - 2.0 * inset) * i as f64 / (n - 1) as f64;
        let mut pts = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let (u, v) = (node(i, n1), node(j, n2));
                pts.push(match self.window {
                    GridWindow::Unit { .. } => self.family.map_unit(u, v),
                    GridWindow::Box { p1, p2, .. } => (p1.0 + u * (p1.1 - p1.0), p2.0 + v * (p2.1 - p2.0)),
                });
            }
        }
        pts
    }
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub p1: f64,
    pub p2: f64,
    pub outcome: Result<PointSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub unstable_dim: usize,
    pub n_real: usize,
    pub n_imag: usize,
    pub n_complex: usize,
    pub sigma: f64,
    pub det_m2: f64,
    pub d4: f64,
    pub kernel_generic: bool,
    pub chain_generic: bool,
    pub chain_marginal: bool,
    pub roots: Vec<(f64, f64)>,
}

impl PointSummary {
    pub fn flags(&self) -> String {
        let mut f = Vec::new();
        if !self.chain_generic {
            f.push("chain-degenerate");
        }
        if self.chain_marginal {
            f.push("chain-marginal");
        }
        if f.is_empty() {
            "ok".into()
        } else {
            f.join("|")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub config: SweepConfig,
    pub rows: Vec<GridRow>,
}

impl GridResult {
    /// Count of rows per unstable dimension (index = dimension), plus failures.
    pub fn histogram(&self) -> ([usize; 5], usize) {
        let mut h = [0usize; 5];
        let mut failed = 0;
        for r in &self.rows {
            match &r.outcome {
                Ok(s) => h[s.unstable_dim.min(4)] += 1,
                Err(_) => failed += 1,
            }
        }
        (h, failed)
    }

    pub fn summary_line(&self) -> String {
        let (h, failed) = self.histogram();
        let mut s = String::from("histogram unstable_dim:");
        for (d, n) in h.iter().enumerate() {
            if *n > 0 {
                let _ = write!(s, " {d}D={n}");
            }
        }
        let _ = write!(s, " failed={failed}");
        s
    }
}

/// Evaluates the analytic pipeline at one case point.
pub fn evaluate_point(
    family: CaseFamily,
    p1: f64,
    p2: f64,
    perturbation: Perturbation,
    threshold: f64,
) -> Result<PointSummary, AnalysisError> {
    let a = analyze_case(&family.case(p1, p2), perturbation, threshold)?;
    let st = &a.stability;
    Ok(PointSummary {
        unstable_dim: st.unstable_dim,
        n_real: st.n_real,
        n_imag: st.n_imag,
        n_complex: st.n_complex,
        sigma: a.genericity.sigma,
        det_m2: a.genericity.det_m2,
        d4: a.genericity.d4,
        kernel_generic: a.genericity.kernel_generic,
        chain_generic: a.genericity.chain_generic,
        chain_marginal: a.genericity.chain_marginal,
        roots: st.roots.iter().map(|r| (r.re, r.im)).collect(),
    })
}

/// Runs every grid point on the worker pool; row order is the grid order.
pub fn run_sweep(config: &SweepConfig) -> GridResult {
    let rows = config
        .points()
        .into_par_iter()
        .map(|(p1, p2)| GridRow {
            p1,
            p2,
            outcome: evaluate_point(config.family, p1, p2, config.perturbation, config.threshold)
                .map_err(|e| e.kind().to_string()),
        })
        .collect();
    GridResult {
        config: config.clone(),
        rows,
    }
}

/// Genericity scan row: kernel/chain determinants plus the transverse-elliptic class.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub p1: f64,
    pub p2: f64,
    pub outcome: Result<(PointSummary, Option<usize>), String>,
}

pub fn run_check(config: &SweepConfig) -> Vec<CheckRow> {
    config
        .points()
        .into_par_iter()
        .map(|(p1, p2)| {
            let outcome = evaluate_point(config.family, p1, p2, config.perturbation, config.threshold)
                .map(|s| {
                    let te = evaluate_point(
                        config.family,
                        p1,
                        p2,
                        Perturbation::TransverseElliptic,
                        config.threshold,
                    )
                    .ok()
                    .map(|t| t.unstable_dim);
                    (s, te)
                })
                .map_err(|e| e.kind().to_string());
            CheckRow { p1, p2, outcome }
        })
        .collect()
}

/// Shortest round-trip representation; deterministic across runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn metadata(command: &str, config: &SweepConfig) -> Vec<(String, String)> {
    let window = match config.window {
        GridWindow::Unit { inset } => format!("unit inset={}", fmt_f64(inset)),
        GridWindow::Box { p1, p2, inset } => format!(
            "box p1=[{},{}] p2=[{},{}] inset={}",
            fmt_f64(p1.0),
            fmt_f64(p1.1),
            fmt_f64(p2.0),
            fmt_f64(p2.1),
            fmt_f64(inset)
        ),
    };
    vec![
        ("tool".into(), format!("nls-modulation {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), command.into()),
        ("case".into(), config.family.name().into()),
        ("perturbation".into(), config.perturbation.name().into()),
        ("grid".into(), format!("{}x{}", config.grid.0, config.grid.1)),
        ("window".into(), window),
        ("threshold".into(), fmt_f64(config.threshold)),
        (
            "quadrature".into(),
            format!(
                "gauss-legendre nodes {}..{} rtol {}",
                nls_modulation::moments::MIN_NODES,
                nls_modulation::moments::MAX_NODES,
                fmt_f64(f64::default_rtol())
            ),
        ),
        (
            "genericity_tol".into(),
            fmt_f64(nls_modulation::modulation::GENERICITY_TOL),
        ),
        ("marginal_tol".into(), fmt_f64(nls_modulation::modulation::MARGINAL_TOL)),
    ]
}

fn write_header(out: &mut dyn Write, meta: &[(String, String)], format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            for (k, v) in meta {
                writeln!(out, "# {k}: {v}")?;
            }
        }
        OutputFormat::Jsonl => {
            let m: serde_json::Map<String, Value> = meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            writeln!(out, "{}", json!({ "metadata": m }))?;
        }
    }
    Ok(())
}

pub fn write_sweep(out: &mut dyn Write, result: &GridResult, format: OutputFormat) -> io::Result<()> {
    let cfg = &result.config;
    write_header(out, &metadata("sweep", cfg), format)?;
    let (c1, c2) = cfg.family.coordinate_names();
    if format == OutputFormat::Csv {
        let mut cols = format!(
            "{c1},{c2},unstable_dim,n_real,n_imag,n_complex,sigma,det_m2,d4,kernel_generic,chain_generic,flags"
        );
        if cfg.include_roots {
            cols.push_str(",re1,im1,re2,im2,re3,im3,re4,im4");
        }
        writeln!(out, "{cols}")?;
    }
    for row in &result.rows {
        match (&row.outcome, format) {
            (Ok(s), OutputFormat::Csv) => {
                let mut line = format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(row.p1),
                    fmt_f64(row.p2),
                    s.unstable_dim,
                    s.n_real,
                    s.n_imag,
                    s.n_complex,
                    fmt_f64(s.sigma),
                    fmt_f64(s.det_m2),
                    fmt_f64(s.d4),
                    s.kernel_generic,
                    s.chain_generic,
                    s.flags()
                );
                if cfg.include_roots {
                    for i in 0..4 {
                        let (re, im) = s.roots.get(i).copied().unwrap_or((f64::NAN, f64::NAN));
                        let _ = write!(line, ",{},{}", fmt_f64(re), fmt_f64(im));
                    }
                }
                writeln!(out, "{line}")?;
            }
            (Err(kind), OutputFormat::Csv) => {
                let mut line = format!("{},{},,,,,,,,,,{}", fmt_f64(row.p1), fmt_f64(row.p2), kind);
                if cfg.include_roots {
                    line.push_str(",,,,,,,,");
                }
                writeln!(out, "{line}")?;
            }
            (Ok(s), OutputFormat::Jsonl) => {
                let mut v = json!({
                    c1: row.p1, c2: row.p2,
                    "unstable_dim": s.unstable_dim,
                    "n_real": s.n_real, "n_imag": s.n_imag, "n_complex": s.n_complex,
                    "sigma": s.sigma, "det_m2": s.det_m2, "d4": s.d4,
                    "kernel_generic": s.kernel_generic, "chain_generic": s.chain_generic,
                    "flags": s.flags(),
                });
                if cfg.include_roots {
                    v["roots"] = json!(s.roots.iter().map(|(re, im)| [re, im]).collect::<Vec<_>>());
                }
                writeln!(out, "{v}")?;
            }
            (Err(kind), OutputFormat::Jsonl) => {
                writeln!(out, "{}", json!({ c1: row.p1, c2: row.p2, "flags": kind }))?;
            }
        }
    }
    Ok(())
}

pub fn write_check(
    out: &mut dyn Write,
    config: &SweepConfig,
    rows: &[CheckRow],
    format: OutputFormat,
) -> io::Result<()> {
    write_header(out, &metadata("check", config), format)?;
    let (c1, c2) = config.family.coordinate_names();
    if format == OutputFormat::Csv {
        writeln!(
            out,
            "{c1},{c2},sigma,det_m2,det_m2_sign,d4,kernel_generic,chain_generic,transverse_elliptic_dim,flags"
        )?;
    }
    for row in rows {
        match (&row.outcome, format) {
            (Ok((s, te)), OutputFormat::Csv) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(row.p1),
                fmt_f64(row.p2),
                fmt_f64(s.sigma),
                fmt_f64(s.det_m2),
                sign_of(s.det_m2),
                fmt_f64(s.d4),
                s.kernel_generic,
                s.chain_generic,
                te.map_or(String::new(), |d| d.to_string()),
                s.flags()
            )?,
            (Err(kind), OutputFormat::Csv) => writeln!(out, "{},{},,,,,,,,{}", fmt_f64(row.p1), fmt_f64(row.p2), kind)?,
            (Ok((s, te)), OutputFormat::Jsonl) => writeln!(
                out,
                "{}",
                json!({
                    c1: row.p1, c2: row.p2, "sigma": s.sigma, "det_m2": s.det_m2,
                    "det_m2_sign": sign_of(s.det_m2), "d4": s.d4,
                    "kernel_generic": s.kernel_generic, "chain_generic": s.chain_generic,
                    "transverse_elliptic_dim": te, "flags": s.flags(),
                })
            )?,
            (Err(kind), OutputFormat::Jsonl) => writeln!(out, "{}", json!({ c1: row.p1, c2: row.p2, "flags": kind }))?,
        }
    }
    Ok(())
}

pub fn sign_of(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}
