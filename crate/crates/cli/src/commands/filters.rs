//! `filter` and `dilate`.

use std::fs;
use std::path::Path;

use kolmo_core::dilation::{
    build_dilated_rep, dilated_wavelets, dilation_report, CheckParams, DilatedRep, DilationParams, DilationReport,
};
use kolmo_core::filters::{
    cascade, find_cycles, harmonic_fixed_points, highpass_complete, qmf_check, transfer_matrix, unitarity_defect,
    wavelet_from_filters, CycleSet, FilterBank, Grid, LaurentPoly, DEFAULT_CYCLE_TOL, DEFAULT_PMAX, DEFAULT_TERMS,
};
use serde_json::{json, Value};

use crate::args::{DilateCmd, FilterCmd, GridArgs, Pmax, Terms, Window};
use crate::config::{grid_or, pmax_or, terms_or, tolerance, window_or};
use crate::error::{ensure_below, CliError, CliResult};
use crate::io::{
    coeffs_json, dilated_csv, emit_json, emit_text, matrix_json, read_json, sampled_csv, to_json_text, write_text,
    BankJson, FilterJson,
};

const QMF_TOL: f64 = 1e-10;
const FIXED_POINT_TOL: f64 = 1e-9;
const UNITARITY_SAMPLES: usize = 256;

/// Acceptance thresholds for the dilated wavelet report.
pub const THRESHOLDS: [(&str, f64); 6] = [
    ("orthonormality_defect", 1e-6),
    ("refinement_defect", 1e-4),
    ("onb_defect", 1e-4),
    ("parseval_defect", 0.02),
    ("commutation_defect", 1e-8),
    ("consistency_defect", 0.05),
];

fn read_filter(path: &Path) -> CliResult<(u64, LaurentPoly)> {
    read_json::<FilterJson>(path)?.to_filter()
}

/// A bank file, or a two-band low-pass filter completed to a bank.
fn read_bank(path: &Path) -> CliResult<FilterBank> {
    let v: Value = read_json(path)?;
    if v.get("filters").is_some() {
        let b: BankJson =
            serde_json::from_value(v).map_err(|e| CliError::validation("parse", format!("{}: {e}", path.display())))?;
        b.to_bank()
    } else {
        let f: FilterJson =
            serde_json::from_value(v).map_err(|e| CliError::validation("parse", format!("{}: {e}", path.display())))?;
        let (n, m0) = f.to_filter()?;
        if n != 2 {
            return Err(CliError::validation(
                "invalid_input",
                format!("only N = 2 filters can be completed automatically, got N = {n}; pass a bank"),
            ));
        }
        Ok(highpass_complete(&m0)?)
    }
}

fn grid_json(g: &Grid) -> Value {
    json!({"start": g.start, "step": g.step, "count": g.count})
}

fn cycles_json(set: &CycleSet) -> Value {
    let cycles: Vec<Value> = set
        .cycles
        .iter()
        .map(|c| {
            json!({
                "points": c.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "turns": c.points.iter().map(|p| p.turns()).collect::<Vec<_>>(),
                "phases": c.phases,
                "total_phase": c.total_phase(),
                "trivial": c.is_trivial(),
            })
        })
        .collect();
    json!({"N": set.n, "cycles": cycles})
}

pub fn filter(cmd: &FilterCmd) -> CliResult<()> {
    match cmd {
        FilterCmd::Qmf { input, output, tol } => {
            let (n, m0) = read_filter(&input.input)?;
            let qmf = qmf_check(&m0, n, tolerance(tol, QMF_TOL)?);
            emit_json(&json!({ "qmf": qmf }), output.out.as_deref())
        }
        FilterCmd::Cycles {
            input,
            pmax,
            output,
            tol,
        } => {
            let (n, m0) = read_filter(&input.input)?;
            let set = find_cycles(&m0, n, pmax_or(pmax, DEFAULT_PMAX)?, tolerance(tol, DEFAULT_CYCLE_TOL)?)?;
            emit_json(&cycles_json(&set), output.out.as_deref())
        }
        FilterCmd::Transfer { input, other, output } => {
            let (n, m0) = read_filter(&input.input)?;
            let m0p = second_filter(other.as_deref(), n, &m0)?;
            let t = transfer_matrix(&m0, &m0p, n);
            emit_json(
                &json!({
                    "N": n,
                    "powers": (-t.d..=t.d).collect::<Vec<_>>(),
                    "matrix": matrix_json(&t.matrix),
                }),
                output.out.as_deref(),
            )
        }
        FilterCmd::Fixedpoints {
            input,
            other,
            output,
            tol,
        } => {
            let (n, m0) = read_filter(&input.input)?;
            let m0p = second_filter(other.as_deref(), n, &m0)?;
            let fixed = harmonic_fixed_points(&transfer_matrix(&m0, &m0p, n), tolerance(tol, FIXED_POINT_TOL)?);
            let basis: Vec<Value> = fixed
                .iter()
                .map(|h| {
                    json!({
                        "coeffs": coeffs_json(&h.poly),
                        "real_valued": h.real_valued,
                        "min_value": h.min_value,
                        "nonnegative": h.is_nonnegative(),
                    })
                })
                .collect();
            emit_json(
                &json!({"N": n, "dimension": fixed.len(), "basis": basis}),
                output.out.as_deref(),
            )
        }
        FilterCmd::Complete { input, output, tol } => {
            let (n, m0) = read_filter(&input.input)?;
            if n != 2 {
                return Err(CliError::validation(
                    "invalid_input",
                    format!("completion needs N = 2, got {n}"),
                ));
            }
            let bank = highpass_complete(&m0)?;
            let defect = unitarity_defect(&bank, UNITARITY_SAMPLES);
            let mut v = serde_json::to_value(BankJson::from_bank(&bank)).expect("bank serializes");
            v["unitarity_defect"] = json!(defect);
            emit_json(&v, output.out.as_deref())?;
            ensure_below("unitarity_defect", defect, tolerance(tol, QMF_TOL)?)
        }
        FilterCmd::Cascade {
            input,
            terms,
            grid,
            frequency,
            output,
        } => {
            let (n, m0) = read_filter(&input.input)?;
            let terms = terms_or(terms, DEFAULT_TERMS)?;
            let f = if *frequency {
                cascade(&m0, n, terms, grid_or(grid, Grid::default_frequency())?)?.phi_hat
            } else {
                let time = grid_or(grid, Grid::default_time())?;
                cascade(&m0, n, terms, Grid::default_frequency())?.time_domain(time)
            };
            emit_text(&sampled_csv(&f), output.out.as_deref())
        }
        FilterCmd::Wavelet {
            input,
            index,
            terms,
            grid,
            frequency,
            output,
        } => {
            let bank = read_bank(&input.input)?;
            let terms = terms_or(terms, DEFAULT_TERMS)?;
            let freq = if *frequency {
                grid_or(grid, Grid::default_frequency())?
            } else {
                Grid::default_frequency()
            };
            let c = cascade(bank.m0(), bank.n(), terms, freq)?;
            let ws = wavelet_from_filters(&bank, &c)?;
            let w = ws.iter().find(|w| w.index == *index).ok_or_else(|| {
                CliError::validation(
                    "invalid_input",
                    format!("wavelet index must be in 1..{}, got {index}", bank.filters().len()),
                )
            })?;
            let f = if *frequency {
                w.psi_hat.clone()
            } else {
                w.time_domain(grid_or(grid, Grid::default_time())?)
            };
            emit_text(&sampled_csv(&f), output.out.as_deref())
        }
    }
}

fn second_filter(path: Option<&Path>, n: u64, m0: &LaurentPoly) -> CliResult<LaurentPoly> {
    match path {
        None => Ok(m0.clone()),
        Some(p) => {
            let (n2, m) = read_filter(p)?;
            if n2 != n {
                return Err(CliError::validation(
                    "invalid_input",
                    format!("filters have N = {n} and N = {n2}"),
                ));
            }
            Ok(m)
        }
    }
}

fn build_rep(
    m0: &LaurentPoly,
    n: u64,
    pmax: &Pmax,
    terms: &Terms,
    grid: &GridArgs,
    cycle_tol: f64,
) -> CliResult<(CycleSet, DilatedRep)> {
    let cycles = find_cycles(m0, n, pmax_or(pmax, DEFAULT_PMAX)?, cycle_tol)?;
    let params = DilationParams {
        terms: terms_or(terms, DEFAULT_TERMS)?,
        time_grid: grid_or(grid, Grid::default_time())?,
        cycle_tol,
    };
    let rep = build_dilated_rep(m0, &cycles, n, &params)?;
    Ok((cycles, rep))
}

fn check_params(window: &Window) -> CliResult<CheckParams> {
    let defaults = CheckParams::default();
    let (m, n) = window_or(window, (defaults.m_window as i64, defaults.n_window))?;
    Ok(CheckParams {
        m_window: i32::try_from(m).map_err(|_| CliError::validation("invalid_config", "window-m is too large"))?,
        n_window: n,
        ..defaults
    })
}

/// The report as JSON, and the first threshold it violates.
fn report_json(r: &DilationReport) -> (Value, Option<CliError>) {
    let values = [
        r.orthonormality_defect,
        r.refinement_defect,
        r.onb_defect,
        r.parseval_defect,
        r.commutation_defect,
        r.consistency_defect,
    ];
    let mut v = json!({});
    let mut failure = None;
    for ((name, tol), value) in THRESHOLDS.iter().zip(values) {
        v[*name] = json!(value);
        if failure.is_none() {
            failure = ensure_below(name, value, *tol).err();
        }
    }
    v["blocks_match"] = json!(r.blocks_match);
    if failure.is_none() && !r.blocks_match {
        failure = Some(CliError::Numerical {
            quantity: "blocks_match".into(),
            value: 1.0,
            tol: 0.0,
        });
    }
    v["thresholds"] = THRESHOLDS.iter().map(|(k, t)| (k.to_string(), json!(t))).collect();
    v["pass"] = json!(failure.is_none());
    (v, failure)
}

pub fn dilate(cmd: &DilateCmd) -> CliResult<()> {
    match cmd {
        DilateCmd::Build {
            input,
            pmax,
            terms,
            grid,
            tol,
            output,
        } => {
            let (n, m0) = read_filter(&input.input)?;
            let (cycles, rep) = build_rep(&m0, n, pmax, terms, grid, tolerance(tol, DEFAULT_CYCLE_TOL)?)?;
            if let Some(out) = &output.out {
                write_text(out, &dilated_csv(&rep.phi0))?;
            }
            let refinement = rep.refinement_defect();
            emit_json(
                &json!({
                    "cycles": cycles_json(&cycles)["cycles"],
                    "shape": rep.phi0.shape(),
                    "grid": grid_json(&rep.ops.grid()),
                    "phi0_norm": rep.phi0.norm(),
                    "refinement_defect": refinement,
                }),
                None,
            )?;
            ensure_below("refinement_defect", refinement, THRESHOLDS[1].1)
        }
        DilateCmd::Check {
            input,
            pmax,
            terms,
            grid,
            window,
            output,
        } => {
            let bank = read_bank(&input.input)?;
            let (_, rep) = build_rep(bank.m0(), bank.n(), pmax, terms, grid, DEFAULT_CYCLE_TOL)?;
            let wavelets = dilated_wavelets(&bank, &rep)?;
            let report = dilation_report(&rep, &wavelets, &bank, &check_params(window)?)?;
            let (v, failure) = report_json(&report);
            emit_json(&v, output.out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
        DilateCmd::DemoStretchedHaar {
            out,
            pmax,
            terms,
            grid,
            window,
        } => demo_stretched_haar(out, pmax, terms, grid, window),
    }
}

fn stretched_haar_bank() -> FilterBank {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    FilterBank::new(
        2,
        vec![
            LaurentPoly::from_real(0, &[s, 0.0, 0.0, s]),
            LaurentPoly::from_real(0, &[s, 0.0, 0.0, -s]),
        ],
    )
    .expect("two filters for N = 2")
}

fn demo_stretched_haar(out: &Path, pmax: &Pmax, terms: &Terms, grid: &GridArgs, window: &Window) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::validation("io", format!("cannot create {}: {e}", out.display())))?;
    let bank = stretched_haar_bank();
    let (cycles, rep) = build_rep(bank.m0(), 2, pmax, terms, grid, DEFAULT_CYCLE_TOL)?;
    let wavelets = dilated_wavelets(&bank, &rep)?;
    let report = dilation_report(&rep, &wavelets, &bank, &check_params(window)?)?;
    write_text(&out.join("phi.csv"), &dilated_csv(&rep.phi0))?;
    write_text(&out.join("psi.csv"), &dilated_csv(&wavelets[0].vector))?;
    let (mut v, failure) = report_json(&report);
    let trivial = rep.ops.trivial_block().ok_or(kolmo_core::Error::NoTrivialCycle)?;
    v["phi0_norm"] = json!(rep.phi0.norm());
    v["phi_norm_sqr"] = json!(rep.phi0.component(trivial, 0).norm_sqr());
    v["cycles"] = cycles_json(&cycles)["cycles"].clone();
    let text = to_json_text(&v);
    write_text(&out.join("report.json"), &text)?;
    emit_text(&text, None)?;
    failure.map_or(Ok(()), Err)
}
