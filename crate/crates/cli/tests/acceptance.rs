//! Acceptance suite: one PASS/FAIL line per criterion, written straight to stderr so the
//! lines appear in the test log even when output capture is on.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` check identities whose printed form does not hold;
//! they are evaluated exactly as stated, reported as FAIL, and excluded from the final
//! assertion. The corrected identities are evaluated alongside and shown in the detail.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use nls_modulation::analysis::analyze_case;
use nls_modulation::floquet_oracle::slope_estimate;
use nls_modulation::modulation::{
    genericity, kernel_coefficients, off_diagonal_dual, second_order_matrix, sigma_closed_form,
};
use nls_modulation::moments::moment_set;
use nls_modulation::nonlinearity::{build_poly, from_case, NonlinearityKind};
use nls_modulation::picard_fuchs::{jacobian, solve_sylvester, Param, Quantity};
use nls_modulation::{CaseId, NonlinearitySpec, Perturbation, WaveParams};
use nls_modulation_cli::{run_check, run_sweep, CaseFamily, GridWindow, SweepConfig};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

const KNOWN_DEVIATIONS: [&str; 3] = ["5c", "5d", "5f"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn report(o: &Outcome) {
    let tag = if o.pass {
        "PASS"
    } else if KNOWN_DEVIATIONS.contains(&o.id) {
        "FAIL (known deviation)"
    } else {
        "FAIL"
    };
    let _ = writeln!(std::io::stderr(), "[{tag}] criterion {}: {}", o.id, o.detail);
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_points(family: CaseFamily, n: usize, lo: f64, hi: f64, seed: u64) -> Vec<CaseId> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (u, v) = (rng.random_range(lo..hi), rng.random_range(lo..hi));
            let (p1, p2) = family.map_unit(u, v);
            family.case(p1, p2)
        })
        .collect()
}

/// Largest relative distance from each expected value to its nearest computed value.
fn worst_match(expected: &[C64], computed: &[C64]) -> f64 {
    expected
        .iter()
        .map(|e| computed.iter().map(|c| (c - e).norm()).fold(f64::INFINITY, f64::min) / e.norm())
        .fold(0.0, f64::max)
}

fn slopes_vs_paper(a: &[C64], paper: &[C64]) -> f64 {
    worst_match(paper, a).max(worst_match(a, paper))
}

fn imag(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Point, printed normal-form slopes, printed direct-numerics slopes.
type Checkpoint = ((f64, f64), Vec<C64>, Vec<C64>);

fn checkpoint_sets() -> [Checkpoint; 2] {
    [
        (
            (0.01, 0.4),
            vec![imag(11.25), imag(-11.25), imag(2.13), imag(-2.13)],
            vec![imag(11.13), imag(-11.13), imag(2.14), imag(-2.14)],
        ),
        (
            (0.025, 0.4),
            vec![imag(1.92), imag(-1.92), real(8.37), real(-8.37)],
            vec![imag(1.92), imag(-1.92), real(8.35), real(-8.35)],
        ),
    ]
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_nls-modulation")
}

fn criterion_1() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for ((l, m), paper, _) in checkpoint_sets() {
        let start = Instant::now();
        let out = Command::new(binary())
            .args([
                "analyze",
                "--case",
                "quintic-f4",
                "--p",
                &l.to_string(),
                &m.to_string(),
                "--perturbation",
                "transverse-elliptic",
            ])
            .output()
            .expect("run analyze");
        let elapsed = start.elapsed();
        let v: Value = serde_json::from_slice(&out.stdout).expect("analyze JSON");
        let roots: Vec<C64> = v["stability"]["roots"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| C64::new(p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
            .collect();
        let err = slopes_vs_paper(&roots, &paper);
        pass &= out.status.success() && err <= 0.01 && elapsed < Duration::from_secs(1);
        parts.push(format!(
            "({l},{m}) max rel err {:.3}% in {:.0} ms",
            100.0 * err,
            elapsed.as_secs_f64() * 1e3
        ));
    }
    Outcome {
        id: "1",
        pass,
        detail: format!("quintic transverse checkpoints: {}", parts.join("; ")),
    }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut slowest = Duration::ZERO;
    for ((l, m), _, paper) in checkpoint_sets() {
        let start = Instant::now();
        let (p, poly) = from_case(&CaseId::QuinticFocusing4 { l, m }).unwrap();
        let est = slope_estimate(&p, &poly, Perturbation::TransverseElliptic, 0.01, 20);
        slowest = slowest.max(start.elapsed());
        match est {
            Ok(e) => {
                let err = slopes_vs_paper(&e.slopes, &paper);
                pass &= err <= 0.02;
                parts.push(format!("oracle ({l},{m}) vs direct numerics {:.2}%", 100.0 * err));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("oracle ({l},{m}) failed: {e}"));
            }
        }
    }
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut count = 0;
    for (fi, family) in CaseFamily::ALL.into_iter().enumerate() {
        for case in random_points(family, 20, 0.15, 0.85, 200 + fi as u64) {
            for pert in [Perturbation::Longitudinal, Perturbation::TransverseElliptic] {
                count += 1;
                let start = Instant::now();
                let pencil = analyze_case(&case, pert, 1e-6).map(|a| a.stability.roots);
                let (p, poly) = from_case(&case).unwrap();
                let oracle = slope_estimate(&p, &poly, pert, 0.01, 20);
                slowest = slowest.max(start.elapsed());
                match (pencil, oracle) {
                    (Ok(a), Ok(o)) => {
                        let err = slopes_vs_paper(&o.slopes, &a);
                        worst = worst.max(err);
                        if err > 0.02 {
                            failures.push(format!("{case:?} {}: {:.2}%", pert.name(), 100.0 * err));
                        }
                    }
                    (a, o) => failures.push(format!(
                        "{case:?} {}: {:?} / {:?}",
                        pert.name(),
                        a.err(),
                        o.err().map(|e| e.to_string())
                    )),
                }
            }
        }
    }
    pass &= failures.is_empty() && slowest < Duration::from_secs(30);
    parts.push(format!(
        "pencil vs oracle at {count} random points (5 cases x 20, longitudinal + transverse-elliptic): worst {:.3}%",
        100.0 * worst
    ));
    if !failures.is_empty() {
        parts.push(format!("{} outside 2%: {}", failures.len(), failures.join(", ")));
    }
    parts.push(format!("slowest point {:.2} s", slowest.as_secs_f64()));
    Outcome {
        id: "2",
        pass,
        detail: parts.join("; "),
    }
}

fn sweep_config(family: CaseFamily, perturbation: Perturbation, n: usize) -> SweepConfig {
    SweepConfig {
        family,
        grid: (n, n),
        window: GridWindow::Unit { inset: 1e-3 },
        perturbation,
        threshold: family.default_threshold(),
        include_roots: false,
    }
}

fn criterion_3() -> Outcome {
    use CaseFamily::*;
    use Perturbation::*;
    let start = Instant::now();
    // (family, perturbation, allowed support, required support)
    let table: [(CaseFamily, Perturbation, &[usize], &[usize]); 9] = [
        (CubicFocusing, Longitudinal, &[2, 4], &[2, 4]),
        (CubicDefocusing, Longitudinal, &[0], &[0]),
        (CubicFocusing, TransverseElliptic, &[2], &[2]),
        (CubicDefocusing, TransverseElliptic, &[2], &[2]),
        (QuinticFocusing4, Longitudinal, &[2, 4], &[]),
        (QuinticFocusing4, TransverseElliptic, &[0, 2], &[]),
        (QuinticFocusing2, Longitudinal, &[2, 4], &[]),
        (QuinticDefocusing, Longitudinal, &[0], &[0]),
        (QuinticDefocusing, TransverseElliptic, &[2], &[2]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (family, pert, allowed, required) in table {
        let result = run_sweep(&sweep_config(family, pert, 50));
        let (hist, failed) = result.histogram();
        let support: Vec<usize> = (0..5).filter(|&d| hist[d] > 0).collect();
        let mut ok = support.iter().all(|d| allowed.contains(d)) && required.iter().all(|d| support.contains(d));
        if family == CubicFocusing && pert == Longitudinal {
            // 4D throughout, with the marginal curve showing as a thin set of 2D pixels.
            ok &= hist[4] > 20 * hist[2];
        }
        if family == CubicFocusing && pert == TransverseElliptic {
            ok &= result
                .rows
                .iter()
                .all(|r| r.outcome.as_ref().map_or(true, |s| s.n_real == 2 && s.n_imag == 2));
        }
        pass &= ok;
        let hist_text: Vec<String> = support.iter().map(|d| format!("{d}D={}", hist[*d])).collect();
        parts.push(format!(
            "{} {} {{{}}} failed={failed}{}",
            family.name(),
            pert.name(),
            hist_text.join(" "),
            if ok { "" } else { " MISMATCH" }
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    Outcome {
        id: "3",
        pass,
        detail: format!("{}; total {:.1} s", parts.join("; "), elapsed.as_secs_f64()),
    }
}

fn criterion_4() -> Outcome {
    let cfg = SweepConfig {
        family: CaseFamily::QuinticFocusing4,
        grid: (100, 100),
        window: GridWindow::Box {
            p1: (0.0, 0.03),
            p2: (0.0, 1.0),
            inset: 1e-3,
        },
        perturbation: Perturbation::Longitudinal,
        threshold: 1e-6,
        include_roots: false,
    };
    let rows = run_check(&cfg);
    let sign = |r: &nls_modulation_cli::CheckRow| r.outcome.as_ref().ok().map(|(s, _)| s.det_m2 > 0.0);
    let positive = rows.iter().filter(|r| sign(r) == Some(true)).count();
    let negative = rows.iter().filter(|r| sign(r) == Some(false)).count();
    // Lower edge of the positive region in each l-column: it must rise from the m = 0 corner.
    let edge: Vec<Option<f64>> = rows
        .chunks(100)
        .map(|col| col.iter().find(|r| sign(r) == Some(true)).map(|r| r.p2))
        .collect();
    let first = edge.iter().flatten().next().copied();
    let from_corner = edge[0].is_some_and(|m| m < 0.05);
    let present: Vec<f64> = edge.iter().flatten().copied().collect();
    let rising = present.windows(2).filter(|w| w[1] + 1e-12 < w[0]).count() <= present.len() / 20;
    let inside_ok = rows
        .iter()
        .filter(|r| sign(r) == Some(true))
        .all(|r| matches!(&r.outcome, Ok((_, Some(0)))));
    let pass = positive > 0 && negative > 0 && from_corner && rising && inside_ok;
    Outcome {
        id: "4",
        pass,
        detail: format!(
            "quintic-f4 (0,0.03)x(0,1) 100x100: det_m2>0 at {positive}, <0 at {negative}; positive-region edge starts at m={:.3} for smallest l and rises with l: {rising}; transverse-elliptic 0D throughout det_m2>0: {inside_ok}",
            first.unwrap_or(f64::NAN)
        ),
    }
}

struct Pipeline {
    params: WaveParams,
    moments: nls_modulation::MomentSet,
    derivs: nls_modulation::DerivativeSet,
    kernel: nls_modulation::KernelCoefficients,
    sylvester_det: f64,
}

fn pipeline(case: &CaseId) -> Pipeline {
    let (params, poly) = from_case(case).unwrap();
    let moments = moment_set(&poly, &params).unwrap();
    let syl = solve_sylvester(&poly, &moments).unwrap();
    let derivs = jacobian(&poly, &params, &moments, &syl);
    let kernel = kernel_coefficients(&derivs, &moments);
    Pipeline {
        params,
        moments,
        derivs,
        kernel,
        sylvester_det: syl.determinant,
    }
}

fn property_points() -> Vec<CaseId> {
    CaseFamily::ALL
        .into_iter()
        .enumerate()
        .flat_map(|(i, f)| random_points(f, 50, 0.05, 0.95, 500 + i as u64))
        .collect()
}

/// Largest step in parameter `index` that moves each bracket endpoint by at most `1e-2` of the
/// bracket width (endpoint shift is about `h |dP/dp| / |P'|`).
fn bracket_step(p: &WaveParams, poly: &nls_modulation::QuadraturePolynomial, index: usize) -> f64 {
    let n = p.alpha().len();
    let mut dalpha = vec![0.0; n];
    match index {
        0 => dalpha[1] = 2.0,
        1 => dalpha[0] = -2.0 * p.angular_momentum,
        2 => dalpha[2] = -1.0,
        _ => dalpha = p.alpha_strength_derivative(),
    }
    let (r1, r2) = poly.bracket;
    [r1, r2]
        .iter()
        .map(|&r| {
            let dp = dalpha.iter().rev().fold(0.0, |acc, c| acc * r + c);
            1e-2 * (r2 - r1) * poly.derivative(r).abs() / dp.abs()
        })
        .fold(f64::INFINITY, f64::min)
}

fn quantities(p: &WaveParams) -> [f64; 4] {
    let poly = build_poly(p).unwrap();
    let m = moment_set(&poly, p).unwrap();
    [m.period, m.mass, m.quasi_momentum, m.potential]
}

fn criterion_5a(points: &[CaseId]) -> Outcome {
    let mut worst = 0.0f64;
    for case in points {
        let pl = pipeline(case);
        let poly = from_case(case).unwrap().1;
        let p = &pl.params;
        let base = [p.energy, p.angular_momentum, p.frequency, p.strength];
        for (pi, par) in Param::ALL.iter().enumerate() {
            // Step shrinks near root coalescence, where the quantities vary on a short scale.
            let values = [
                pl.moments.period,
                pl.moments.mass,
                pl.moments.quasi_momentum,
                pl.moments.potential,
            ];
            let local = Quantity::ALL
                .iter()
                .zip(values)
                .map(|(q, v)| (v / pl.derivs.get(*q, *par)).abs())
                .fold(f64::INFINITY, f64::min);
            let h = (2e-5 * base[pi].abs().max(0.1))
                .min(1e-4 * local)
                .min(bracket_step(p, &poly, pi));
            let at = |s: f64| {
                let mut q = p.clone();
                match par {
                    Param::Energy => q.energy += s,
                    Param::AngularMomentum => q.angular_momentum += s,
                    Param::Frequency => q.frequency += s,
                    Param::Strength => q.strength += s,
                }
                quantities(&q)
            };
            let (up, dn, up2, dn2) = (at(h), at(-h), at(0.5 * h), at(-0.5 * h));
            for (qi, q) in Quantity::ALL.iter().enumerate() {
                let fd = (4.0 * (up2[qi] - dn2[qi]) / h - (up[qi] - dn[qi]) / (2.0 * h)) / 3.0;
                let scale = pl.derivs.jac[qi].iter().fold(0.0f64, |a, v| a.max(v.abs()));
                worst = worst.max((fd - pl.derivs.get(*q, *par)).abs() / scale);
            }
        }
    }
    Outcome {
        id: "5a",
        pass: worst <= 1e-6,
        detail: format!(
            "jacobian vs Richardson centered differences of quadrature, {} points: worst relative error {worst:.2e} (tol 1e-6)",
            points.len()
        ),
    }
}

fn criterion_5b(points: &[CaseId]) -> Outcome {
    use Param::*;
    use Quantity::*;
    let mut worst = 0.0f64;
    for case in points {
        let d = pipeline(case).derivs;
        worst = worst
            .max(rel(d.get(Period, AngularMomentum), -d.get(QuasiMomentum, Energy)))
            .max(rel(d.get(Mass, Energy), -2.0 * d.get(Period, Frequency)))
            .max(rel(d.get(Mass, AngularMomentum), 2.0 * d.get(QuasiMomentum, Frequency)));
    }
    Outcome {
        id: "5b",
        pass: worst <= 1e-10,
        detail: format!("Maxwell symmetries: worst relative error {worst:.2e} (tol 1e-10)"),
    }
}

fn criterion_5c(points: &[CaseId]) -> Outcome {
    let mut worst_printed = 0.0f64;
    let mut worst_corrected = 0.0f64;
    for case in points {
        let pl = pipeline(case);
        let p = &pl.params;
        let (e, k, w, z) = (p.energy, p.angular_momentum, p.frequency, p.strength);
        let (t, m) = (pl.moments.period, pl.moments.mass);
        let q = match p.nonlinearity.kind {
            NonlinearityKind::Cubic => 3.0 * k * k * t * t - 4.0 * e * m * t + w * m * m,
            _ => {
                let j2 = pl.moments.get(2);
                4.0 * k.powi(4) * t * t + (4.0 * k * k * w - 9.0 * e * e) * t * j2 + w * w * j2 * j2
            }
        };
        let printed = -k * k * z * z / (16.0 * pl.sylvester_det) * q;
        worst_printed = worst_printed.max(rel(pl.kernel.sigma, printed));
        let corrected = sigma_closed_form(p, &pl.moments, pl.sylvester_det).unwrap();
        worst_corrected = worst_corrected.max(rel(pl.kernel.sigma, corrected));
    }
    Outcome {
        id: "5c",
        pass: worst_printed <= 1e-8,
        detail: format!(
            "sigma closed forms as stated (-k^2 z^2 q/(16 det S)): worst relative error {worst_printed:.2e} (tol 1e-8); corrected forms (cubic k^2 z^3 q/(8 det S), quintic 16 k^2 z^4 q/(81 det S)): {worst_corrected:.2e}"
        ),
    }
}

fn criterion_5d(points: &[CaseId]) -> Outcome {
    let mut worst_printed = 0.0f64;
    let mut worst_corrected = 0.0f64;
    for case in points {
        let pl = pipeline(case);
        let g = genericity(&pl.kernel, &pl.derivs, &pl.moments);
        let s3 = pl.kernel.sigma.powi(3);
        worst_printed = worst_printed.max(rel(g.det_m2, s3 * g.d4 / 4.0));
        worst_corrected = worst_corrected.max(rel(g.det_m2, -s3 * g.d4 / 4.0));
    }
    Outcome {
        id: "5d",
        pass: worst_printed <= 1e-8,
        detail: format!(
            "det M2 = sigma^3 D4 / 4 as stated: worst relative error {worst_printed:.2e} (tol 1e-8); with opposite sign: {worst_corrected:.2e}"
        ),
    }
}

fn criterion_5e(points: &[CaseId]) -> Outcome {
    let mut worst = 0.0f64;
    for case in points {
        let pl = pipeline(case);
        let m2 = second_order_matrix(&pl.kernel, &pl.derivs, &pl.moments);
        worst = worst.max(rel(m2[0][1], off_diagonal_dual(&pl.kernel, &pl.derivs)));
    }
    Outcome {
        id: "5e",
        pass: worst <= 1e-9,
        detail: format!("b2 dual expressions: worst relative error {worst:.2e} (tol 1e-9)"),
    }
}

fn criterion_5f(points: &[CaseId]) -> Outcome {
    let tol = 1e-10;
    let mut worst_printed = 0.0f64;
    let mut worst_corrected = 0.0f64;
    for case in points {
        let pl = pipeline(case);
        let p = &pl.params;
        let (printed, corrected) = match p.nonlinearity.kind {
            NonlinearityKind::Cubic => (3.0, 1.5),
            _ => (6.0, 2.0),
        };
        let rest = p.frequency * pl.moments.mass - p.energy * pl.moments.period;
        let scale = (p.frequency * pl.moments.mass).abs() + (p.energy * pl.moments.period).abs();
        worst_printed = worst_printed.max((printed * p.strength * pl.moments.potential + rest).abs() / scale);
        worst_corrected = worst_corrected.max((corrected * p.strength * pl.moments.potential + rest).abs() / scale);
    }
    Outcome {
        id: "5f",
        pass: worst_printed <= tol,
        detail: format!(
            "U identities 3zU+wM-ET=0 / 6zU+wM-ET=0 as stated: worst scaled residual {worst_printed:.2e} (tol {tol:e}); with coefficients 3/2 and 2: {worst_corrected:.2e}"
        ),
    }
}

fn criterion_5g(points: &[CaseId]) -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for case in points {
        for pert in Perturbation::ALL {
            let Ok(a) = analyze_case(case, pert, 1e-6) else {
                continue;
            };
            n += 1;
            let roots = &a.stability.roots;
            let scale = roots.iter().fold(1.0f64, |s, r| s.max(r.norm()));
            for r in roots {
                let d = roots
                    .iter()
                    .map(|q| (q + r.conj()).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d / scale);
            }
        }
    }
    Outcome {
        id: "5g",
        pass: worst <= 1e-9 && n == 3 * points.len(),
        detail: format!("root multiset closed under lambda -> -conj(lambda) over {n} pencils: worst {worst:.2e}"),
    }
}

fn criterion_5h(points: &[CaseId]) -> Outcome {
    let mut worst = 0.0f64;
    for case in points {
        let e = analyze_case(case, Perturbation::TransverseElliptic, 1e-6)
            .unwrap()
            .stability
            .roots;
        let h = analyze_case(case, Perturbation::TransverseHyperbolic, 1e-6)
            .unwrap()
            .stability
            .roots;
        let scale = e.iter().fold(1.0f64, |s, r| s.max(r.norm()));
        for r in &e {
            let rot = r * imag(1.0);
            worst = worst.max(h.iter().map(|q| (q - rot).norm()).fold(f64::INFINITY, f64::min) / scale);
        }
    }
    Outcome {
        id: "5h",
        pass: worst <= 1e-10,
        detail: format!("hyperbolic roots = i * elliptic roots: worst {worst:.2e} (tol 1e-10)"),
    }
}

fn criterion_5i() -> Outcome {
    let mut rng = StdRng::seed_from_u64(900);
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    let mut worst_sigma = 0.0f64;
    let mut rejected = true;
    for _ in 0..50 {
        let energy = rng.random_range(0.2..2.0);
        let omega = rng.random_range(0.3..3.0);
        let kappa = rng.random_range(0.05..0.95) * energy / f64::sqrt(omega);
        let p = WaveParams::new(energy, kappa, omega, 0.0, NonlinearitySpec::cubic());
        let poly = build_poly(&p).unwrap();
        let m = moment_set(&poly, &p).unwrap();
        worst = worst
            .max(rel(m.period, pi / omega.sqrt()))
            .max(rel(m.quasi_momentum, pi))
            .max(rel(m.mass, pi * energy / omega.powf(1.5)));
        let syl = solve_sylvester(&poly, &m).unwrap();
        let k = kernel_coefficients(&jacobian(&poly, &p, &m, &syl), &m);
        worst_sigma = worst_sigma.max(k.sigma.abs());
        rejected &=
            nls_modulation::analyze(p, Perturbation::Longitudinal, 1e-6).is_err_and(|e| e.kind() == "NonGenericKernel");
    }
    Outcome {
        id: "5i",
        pass: worst <= 1e-10 && worst_sigma <= 1e-12 && rejected,
        detail: format!(
            "harmonic limit at 50 points: T, eta, M vs analytic worst {worst:.2e}; |sigma| max {worst_sigma:.1e}; NonGenericKernel raised: {rejected}"
        ),
    }
}

fn criterion_6() -> Outcome {
    let dir = std::env::temp_dir().join(format!("nls-modulation-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut identical = true;
    let mut sizes = Vec::new();
    for format in ["csv", "jsonl"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.join(format!("sweep-{run}.{format}"));
            let status = Command::new(binary())
                .args([
                    "sweep",
                    "--case",
                    "quintic-f4",
                    "--perturbation",
                    "longitudinal",
                    "--grid",
                    "30",
                    "30",
                    "--roots",
                ])
                .args(["--format", format, "--out"])
                .arg(&path)
                .output()
                .expect("run sweep")
                .status;
            identical &= status.success();
            outputs.push(std::fs::read(&path).unwrap());
        }
        identical &= outputs[0] == outputs[1];
        sizes.push(format!("{format} {} bytes", outputs[0].len()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        id: "6",
        pass: identical,
        detail: format!("repeated sweeps byte-identical: {identical} ({})", sizes.join(", ")),
    }
}

#[test]
fn acceptance_suite() {
    let points = property_points();
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5a(&points),
        criterion_5b(&points),
        criterion_5c(&points),
        criterion_5d(&points),
        criterion_5e(&points),
        criterion_5f(&points),
        criterion_5g(&points),
        criterion_5h(&points),
        criterion_5i(),
        criterion_6(),
    ];
    let _ = writeln!(std::io::stderr(), "---- acceptance ----");
    for o in &outcomes {
        report(o);
    }
    let unexpected: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.pass && !KNOWN_DEVIATIONS.contains(&o.id))
        .map(|o| o.id)
        .collect();
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
