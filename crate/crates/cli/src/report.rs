//! Single-point reports: the full analytic pipeline as JSON, and oracle spectra.

use std::io::{self, Write};

use nls_modulation::analysis::{analyze_poly, Analysis, AnalysisError};
use nls_modulation::floquet_oracle::{self, OracleError};
use nls_modulation::modulation::Perturbation;
use nls_modulation::nonlinearity::{build_poly_with_bracket, from_case};
use nls_modulation::picard_fuchs::{Param, Quantity};
use nls_modulation::{NonlinearitySpec, QuadraturePolynomial, WaveParams};
use serde_json::{json, Value};

use crate::{fmt_f64, CaseFamily, OutputFormat};

/// A point given either by case coordinates or by raw wave constants.
#[derive(Debug, Clone)]
pub enum PointSpec {
    Case { family: CaseFamily, p1: f64, p2: f64 },
    Raw { params: WaveParams, bracket: Option<usize> },
}

impl PointSpec {
    pub fn resolve(&self) -> Result<(WaveParams, QuadraturePolynomial), AnalysisError> {
        match self {
            PointSpec::Case { family, p1, p2 } => Ok(from_case(&family.case(*p1, *p2))?),
            PointSpec::Raw { params, bracket } => {
                let poly = match bracket {
                    Some(i) => build_poly_with_bracket(params, *i)?,
                    None => nls_modulation::nonlinearity::build_poly(params)?,
                };
                Ok((params.clone(), poly))
            }
        }
    }

    fn describe(&self) -> Value {
        match self {
            PointSpec::Case { family, p1, p2 } => {
                let (a, b) = family.coordinate_names();
                json!({ "case": family.name(), a: p1, b: p2 })
            }
            PointSpec::Raw { bracket, .. } => json!({ "raw": true, "bracket": bracket }),
        }
    }
}

/// Parses `cubic`, `quintic` or `poly:c1,c2,...` with `f(z) = c1 z + c2 z^2 + ...`.
pub fn parse_nonlinearity(s: &str) -> Result<NonlinearitySpec, String> {
    match s {
        "cubic" => Ok(NonlinearitySpec::cubic()),
        "quintic" => Ok(NonlinearitySpec::quintic()),
        _ => {
            let body = s
                .strip_prefix("poly:")
                .ok_or_else(|| format!("unknown nonlinearity '{s}' (expected cubic, quintic or poly:<coeffs>)"))?;
            let coeffs = body
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("bad coefficient '{c}': {e}"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            NonlinearitySpec::poly(coeffs).map_err(|e| e.to_string())
        }
    }
}

pub fn analyze_point(
    point: &PointSpec,
    perturbation: Perturbation,
    threshold: f64,
) -> Result<Analysis<f64>, AnalysisError> {
    let (params, poly) = point.resolve()?;
    analyze_poly(params, poly, perturbation, threshold)
}

fn pair(z: &num_complex::Complex<f64>) -> Value {
    json!([z.re, z.im])
}

/// JSON document describing every stage of an analysis.
pub fn analysis_json(point: &PointSpec, a: &Analysis<f64>) -> Value {
    let p = &a.params;
    let quantity_name = |q: Quantity| match q {
        Quantity::Period => "period",
        Quantity::Mass => "mass",
        Quantity::QuasiMomentum => "quasi_momentum",
        Quantity::Potential => "potential",
    };
    let param_name = |q: Param| match q {
        Param::Energy => "energy",
        Param::AngularMomentum => "angular_momentum",
        Param::Frequency => "frequency",
        Param::Strength => "strength",
    };
    let jacobian: serde_json::Map<String, Value> = Quantity::ALL
        .iter()
        .map(|&q| {
            let row: serde_json::Map<String, Value> = Param::ALL
                .iter()
                .map(|&r| (param_name(r).to_string(), json!(a.derivatives.get(q, r))))
                .collect();
            (quantity_name(q).to_string(), Value::Object(row))
        })
        .collect();
    let k = &a.kernel;
    let g = &a.genericity;
    let st = &a.stability;
    json!({
        "point": point.describe(),
        "params": {
            "energy": p.energy,
            "angular_momentum": p.angular_momentum,
            "frequency": p.frequency,
            "strength": p.strength,
            "f_coeffs": p.nonlinearity.f_coeffs,
        },
        "polynomial": {
            "alpha": a.poly.alpha,
            "roots": a.poly.roots.iter().map(pair).collect::<Vec<_>>(),
            "bracket": [a.poly.bracket.0, a.poly.bracket.1],
        },
        "moments": {
            "j": a.moments.j,
            "period": a.moments.period,
            "mass": a.moments.mass,
            "quasi_momentum": a.moments.quasi_momentum,
            "potential": a.moments.potential,
            "kinetic": a.moments.kinetic,
            "nodes": a.moments.nodes,
        },
        "jacobian": jacobian,
        "sylvester": { "determinant": a.sylvester_determinant, "condition": a.derivatives.condition },
        "kernel": {
            "sigma": k.sigma, "gamma": k.gamma, "rho": k.rho, "tau": k.tau,
            "nu": k.nu, "xi": k.xi, "psi": k.psi,
        },
        "genericity": {
            "sigma": g.sigma, "det_m2": g.det_m2, "d4": g.d4,
            "kernel_generic": g.kernel_generic, "chain_generic": g.chain_generic,
            "chain_marginal": g.chain_marginal,
        },
        "pencil": {
            "perturbation": a.pencil.perturbation.name(),
            "m2": a.pencil.m2, "m1_imag": a.pencil.m1_imag, "m0": a.pencil.m0,
        },
        "stability": {
            "roots": st.roots.iter().map(pair).collect::<Vec<_>>(),
            "residuals": st.residuals,
            "at_infinity": st.at_infinity,
            "threshold": st.threshold,
            "n_real": st.n_real, "n_imag": st.n_imag, "n_complex": st.n_complex,
            "unstable_dim": st.unstable_dim,
        },
    })
}

#[derive(Debug, Clone)]
pub struct SpectrumConfig {
    pub perturbation: Perturbation,
    pub modes: usize,
    pub samples: usize,
    /// Largest `|mu|` (longitudinal; defaults to the Brillouin edge) or `k` (transverse).
    pub range: Option<f64>,
    /// Only eigenvalues with `|lambda| <= window` are written.
    pub window: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub kind: String,
    pub parameter: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug)]
pub enum SpectrumError {
    Analysis(AnalysisError),
    Oracle(OracleError),
}

impl std::fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumError::Analysis(e) => write!(f, "{e}"),
            SpectrumError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug)]
pub struct SpectrumTable {
    pub modes: usize,
    pub period: f64,
    pub rows: Vec<SpectrumRow>,
}

/// Oracle eigenvalues over a parameter sweep, followed by the pencil slope lines.
pub fn spectrum_table(point: &PointSpec, cfg: &SpectrumConfig) -> Result<SpectrumTable, SpectrumError> {
    let (params, poly) = point.resolve().map_err(SpectrumError::Analysis)?;
    let (profile, modes) = floquet_oracle::resolve_modes(&params, &poly, cfg.modes).map_err(SpectrumError::Oracle)?;
    let edge = std::f64::consts::PI / profile.period;
    let samples = cfg.samples.max(2);
    let parameters: Vec<f64> = match cfg.perturbation {
        Perturbation::Longitudinal => {
            let top = cfg.range.unwrap_or(edge).min(edge);
            // (-top, top], excluding the left endpoint which duplicates the right one on the torus.
            (1..=samples)
                .map(|i| -top + 2.0 * top * i as f64 / samples as f64)
                .collect()
        }
        _ => {
            let top = cfg.range.unwrap_or(0.1);
            (0..samples).map(|i| top * i as f64 / (samples - 1) as f64).collect()
        }
    };
    let mut rows = Vec::new();
    for &param in &parameters {
        let op =
            floquet_oracle::build_operator(&profile, cfg.perturbation, param, modes).map_err(SpectrumError::Oracle)?;
        for ev in floquet_oracle::spectrum(&op).map_err(SpectrumError::Oracle)? {
            if ev.norm() <= cfg.window {
                rows.push(SpectrumRow {
                    kind: "oracle".into(),
                    parameter: param,
                    re: ev.re,
                    im: ev.im,
                });
            }
        }
    }
    let analysis = analyze_poly(params, poly, cfg.perturbation, cfg.threshold).map_err(SpectrumError::Analysis)?;
    for (i, slope) in analysis.stability.roots.iter().enumerate() {
        for &param in &parameters {
            let ev = slope * param;
            if ev.norm() <= cfg.window {
                rows.push(SpectrumRow {
                    kind: format!("slope{}", i + 1),
                    parameter: param,
                    re: ev.re,
                    im: ev.im,
                });
            }
        }
    }
    Ok(SpectrumTable {
        modes,
        period: profile.period,
        rows,
    })
}

pub fn write_spectrum(
    out: &mut dyn Write,
    point: &PointSpec,
    cfg: &SpectrumConfig,
    table: &SpectrumTable,
    format: OutputFormat,
) -> io::Result<()> {
    let param_name = match cfg.perturbation {
        Perturbation::Longitudinal => "mu",
        _ => "k",
    };
    let meta = [
        ("tool", format!("nls-modulation {}", env!("CARGO_PKG_VERSION"))),
        ("command", "spectrum".to_string()),
        ("point", point.describe().to_string()),
        ("perturbation", cfg.perturbation.name().to_string()),
        ("modes", table.modes.to_string()),
        ("profile_samples", floquet_oracle::samples_for(table.modes).to_string()),
        ("parameter_samples", cfg.samples.to_string()),
        ("period", fmt_f64(table.period)),
        ("window", fmt_f64(cfg.window)),
    ];
    match format {
        OutputFormat::Csv => {
            for (k, v) in &meta {
                writeln!(out, "# {k}: {v}")?;
            }
            writeln!(out, "kind,{param_name},re,im")?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.kind,
                    fmt_f64(r.parameter),
                    fmt_f64(r.re),
                    fmt_f64(r.im)
                )?;
            }
        }
        OutputFormat::Jsonl => {
            let m: serde_json::Map<String, Value> = meta.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            writeln!(out, "{}", json!({ "metadata": m }))?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{}",
                    json!({ "kind": r.kind, param_name: r.parameter, "re": r.re, "im": r.im })
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonlinearity_strings_parse() {
        assert_eq!(
            parse_nonlinearity("cubic").unwrap().degree(),
            NonlinearitySpec::cubic().degree()
        );
        assert_eq!(parse_nonlinearity("poly:0,1").unwrap().f_coeffs, vec![0.0, 1.0]);
        assert!(parse_nonlinearity("poly:").is_err());
        assert!(parse_nonlinearity("septic").is_err());
    }

    #[test]
    fn analysis_json_reports_checkpoint_roots() {
        let point = PointSpec::Case {
            family: CaseFamily::QuinticFocusing4,
            p1: 0.01,
            p2: 0.4,
        };
        let a = analyze_point(&point, Perturbation::TransverseElliptic, 1e-6).unwrap();
        let v = analysis_json(&point, &a);
        assert_eq!(v["stability"]["unstable_dim"], 0);
        assert_eq!(v["stability"]["roots"].as_array().unwrap().len(), 4);
        assert_eq!(v["point"]["case"], "quintic-f4");
    }

    #[test]
    fn zero_parameter_spectrum_has_kernel() {
        let point = PointSpec::Case {
            family: CaseFamily::CubicDefocusing,
            p1: 0.3,
            p2: 0.6,
        };
        let cfg = SpectrumConfig {
            perturbation: Perturbation::TransverseElliptic,
            modes: 20,
            samples: 2,
            range: Some(0.05),
            window: 1e-4,
            threshold: 1e-6,
        };
        let t = spectrum_table(&point, &cfg).unwrap();
        let near_zero = t
            .rows
            .iter()
            .filter(|r| r.kind == "oracle" && r.parameter == 0.0)
            .count();
        assert!(near_zero >= 4, "{near_zero}");
    }
}
