//! `kernel`, `gns`, `group`, `gabor` and `frames`.

use std::path::Path;

use kolmo_core::frames::{
    check_delta_domination, dilate_gabor_ntf, dilate_group_ntf, dilate_ntf, frame_bounds, idempotency_defect,
    is_ntf_kernel, NTF_TOL,
};
use kolmo_core::kernel::{
    bound_constant, dominance_constant, intertwiner, is_positive_definite, kolmogorov_decompose,
    kolmogorov_decompose_with_tol, FiniteKernel,
};
use kolmo_core::numlin::{hermitian_eigen, DEFAULT_RANK_TOL};
use kolmo_core::structured_reps::gabor::{point_label, root_of_unity_order};
use kolmo_core::structured_reps::{
    gabor_from_kernel, gns_construct, group_representation, kernel_from_gabor, StateFunctional,
};
use kolmo_core::{ComplexMatrix, C64};
use serde_json::json;

use crate::args::{FramesCmd, GaborCmd, GnsArgs, GroupCmd, KernelCmd};
use crate::config::{tolerance, window_or};
use crate::error::{ensure_below, CliError, CliResult};
use crate::io::{
    emit_json, matrix_json, pair, read_json, vector_json, BiKernelJson, DensityJson, FamilyJson, GaborJson, GroupJson,
    KernelJson,
};

/// Round-trip and postcondition tolerance, relative to `max(1, ‖G‖_max)`.
pub const ROUNDTRIP_TOL: f64 = 1e-9;
/// Largest root-of-unity order tried for λ.
const MAX_LAMBDA_ORDER: usize = 64;

fn read_kernel(path: &Path) -> CliResult<FiniteKernel> {
    read_json::<KernelJson>(path)?.to_kernel()
}

fn scale(g: &ComplexMatrix) -> f64 {
    g.max_abs().max(1.0)
}

pub fn kernel(cmd: &KernelCmd) -> CliResult<()> {
    match cmd {
        KernelCmd::Decompose { input, output, tol } => {
            let k = read_kernel(&input.input)?;
            let d = kolmogorov_decompose_with_tol(&k, tolerance(tol, DEFAULT_RANK_TOL)?)?;
            let vectors: Vec<Vec<C64>> = (0..k.len()).map(|i| d.vector(i)).collect();
            emit_json(&FamilyJson::new(d.rank(), k.points(), &vectors), output.out.as_deref())?;
            ensure_below(
                "roundtrip_defect",
                d.gram().max_diff(k.gram()),
                ROUNDTRIP_TOL * scale(k.gram()),
            )
        }
        KernelCmd::Check { input, output, tol } => {
            let k = read_kernel(&input.input)?;
            let tol = tolerance(tol, ROUNDTRIP_TOL)?;
            let e = hermitian_eigen(k.gram(), 1.0)?;
            let pd = is_positive_definite(&k, DEFAULT_RANK_TOL);
            let decomposition = pd.then(|| kolmogorov_decompose(&k)).transpose()?;
            let roundtrip = decomposition.as_ref().map(|d| d.gram().max_diff(k.gram()));
            let ntf = pd && is_ntf_kernel(&k, NTF_TOL)?;
            emit_json(
                &json!({
                    "points": k.len(),
                    "hermitian": true,
                    "positive_definite": pd,
                    "min_eigenvalue": e.values.last().copied().unwrap_or(0.0),
                    "max_eigenvalue": e.values.first().copied().unwrap_or(0.0),
                    "rank": decomposition.as_ref().map(|d| d.rank()),
                    "roundtrip_defect": roundtrip,
                    "idempotency_defect": idempotency_defect(k.gram()),
                    "ntf": ntf,
                }),
                output.out.as_deref(),
            )?;
            ensure_below("roundtrip_defect", roundtrip.unwrap_or(0.0), tol * scale(k.gram()))
        }
        KernelCmd::Dominate {
            input,
            reference,
            output,
            tol,
        } => {
            let kp = read_kernel(&input.input)?;
            let k = read_kernel(reference)?;
            let c = dominance_constant(&kp, &k, tolerance(tol, DEFAULT_RANK_TOL)?)?;
            emit_json(&json!({"dominated": c.is_some(), "constant": c}), output.out.as_deref())
        }
        KernelCmd::Intertwine {
            input,
            left,
            right,
            output,
            tol,
        } => {
            let l = read_json::<BiKernelJson>(&input.input)?.to_bikernel()?;
            let k = read_kernel(left)?;
            let kp = read_kernel(right)?;
            let c = bound_constant(&l, &k, &kp, tolerance(tol, DEFAULT_RANK_TOL)?)?;
            let s = intertwiner(&l, &k, &kp)?;
            emit_json(
                &json!({
                    "bound_constant": c,
                    "norm": s.norm(),
                    "source_rank": s.source.rank(),
                    "target_rank": s.target.rank(),
                    "matrix": matrix_json(&s.matrix),
                }),
                output.out.as_deref(),
            )
        }
    }
}

pub fn gns(args: &GnsArgs) -> CliResult<()> {
    let rho = crate::io::matrix_from(&read_json::<DensityJson>(&args.input.input)?.rho)?;
    let phi = StateFunctional::new(rho)?;
    let g = gns_construct(&phi)?;
    let n = phi.n();
    let mut units = Vec::new();
    let mut defect = 0.0f64;
    for p in 0..n {
        for q in 0..n {
            let e = ComplexMatrix::from_fn(n, n, |i, j| C64::new(if (i, j) == (p, q) { 1.0 } else { 0.0 }, 0.0));
            defect = defect.max((g.expectation(&e) - phi.eval(&e)).norm());
            units.push(json!({
                "label": kolmo_core::structured_reps::gns::unit_label(p, q),
                "matrix": matrix_json(&g.units[p * n + q]),
            }));
        }
    }
    emit_json(
        &json!({"n": n, "dim": g.dim, "xi0": vector_json(&g.xi0), "units": units, "state_defect": defect}),
        args.output.out.as_deref(),
    )?;
    ensure_below("state_defect", defect, tolerance(&args.tol, ROUNDTRIP_TOL)?)
}

pub fn group(cmd: &GroupCmd) -> CliResult<()> {
    match cmd {
        GroupCmd::Rep {
            input,
            kernel,
            output,
            tol,
        } => {
            let g = read_json::<GroupJson>(&input.input)?.to_group()?;
            let rep = group_representation(&g, &read_kernel(kernel)?)?;
            let defect = rep.defect();
            emit_json(
                &json!({
                    "order": g.order(),
                    "dim": rep.dim,
                    "matrices": rep.matrices.iter().map(matrix_json).collect::<Vec<_>>(),
                    "cyclic": vector_json(&rep.cyclic),
                    "defect": defect,
                }),
                output.out.as_deref(),
            )?;
            ensure_below("representation_defect", defect, tolerance(tol, ROUNDTRIP_TOL)?)
        }
        GroupCmd::Dilate {
            input,
            kernel,
            output,
            tol,
        } => {
            let g = read_json::<GroupJson>(&input.input)?.to_group()?;
            let rep = group_representation(&g, &read_kernel(kernel)?)?;
            let d = dilate_group_ntf(&rep, &rep.cyclic)?;
            let defect = d.w.isometry_defect().max(d.bigger.defect());
            emit_json(
                &json!({
                    "dim": rep.dim,
                    "bigger_dim": d.bigger.dim,
                    "W": matrix_json(&d.w),
                    "P": matrix_json(&d.p),
                    "xi": vector_json(&d.xi),
                    "defect": defect,
                }),
                output.out.as_deref(),
            )?;
            ensure_below("dilation_defect", defect, tolerance(tol, ROUNDTRIP_TOL)?)
        }
    }
}

fn parse_lambda(s: &str) -> CliResult<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::validation("invalid_input", format!("lambda must be `re,im`, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re: f64 = parts[0].parse().map_err(|_| bad())?;
    let im: f64 = parts[1].parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

fn lambda_order(lambda: C64) -> CliResult<usize> {
    root_of_unity_order(lambda, MAX_LAMBDA_ORDER).ok_or_else(|| {
        CliError::validation(
            "non_periodic",
            format!("lambda is not a root of unity of order <= {MAX_LAMBDA_ORDER}"),
        )
    })
}

pub fn gabor(cmd: &GaborCmd) -> CliResult<()> {
    match cmd {
        GaborCmd::Build {
            input,
            lambda,
            output,
            tol,
        } => {
            let s = gabor_from_kernel(&read_kernel(&input.input)?, parse_lambda(lambda)?)?;
            emit_json(&GaborJson::from_system(&s), output.out.as_deref())?;
            ensure_below("commutation_defect", s.defect(), tolerance(tol, ROUNDTRIP_TOL)?)
        }
        GaborCmd::Kernel { input, window, output } => {
            let s = read_json::<GaborJson>(&input.input)?.to_system()?;
            let q = lambda_order(s.lambda)? as i64;
            let (wm, wn) = window_or(window, (q, q))?;
            let points: Vec<(i64, i64)> = (0..wm).flat_map(|m| (0..wn).map(move |n| (m, n))).collect();
            let k = kernel_from_gabor(&s, &points)?;
            emit_json(&KernelJson::from_kernel(&k), output.out.as_deref())
        }
        GaborCmd::Dilate { input, q, output, tol } => {
            let s = read_json::<GaborJson>(&input.input)?.to_system()?;
            let q = match q {
                Some(q) => *q,
                None => lambda_order(s.lambda)?,
            };
            let d = dilate_gabor_ntf(&s, q)?;
            let defect = d.w.isometry_defect().max(d.bigger.defect());
            let window = kolmo_core::structured_reps::gabor::torus_window(q);
            emit_json(
                &json!({
                    "dim": s.dim,
                    "bigger_dim": d.bigger.dim,
                    "basis": window.iter().map(|&(m, n)| point_label(m, n)).collect::<Vec<_>>(),
                    "lambda": pair(s.lambda),
                    "W": matrix_json(&d.w),
                    "P": matrix_json(&d.p),
                    "xi": vector_json(&d.xi),
                    "defect": defect,
                }),
                output.out.as_deref(),
            )?;
            ensure_below("dilation_defect", defect, tolerance(tol, ROUNDTRIP_TOL)?)
        }
    }
}

pub fn frames(cmd: &FramesCmd) -> CliResult<()> {
    match cmd {
        FramesCmd::Bounds { input, output } => {
            let f = read_json::<FamilyJson>(&input.input)?.to_family()?;
            let b = frame_bounds(&f);
            let tight = b.is_frame && (b.upper - b.lower) <= ROUNDTRIP_TOL * b.upper.max(1.0);
            emit_json(
                &json!({
                    "lower": b.lower,
                    "upper": b.upper,
                    "is_frame": b.is_frame,
                    "tight": tight,
                    "normalized_tight": tight && (b.upper - 1.0).abs() <= ROUNDTRIP_TOL,
                }),
                output.out.as_deref(),
            )
        }
        FramesCmd::Ntf { input, output, tol } => {
            let k = read_kernel(&input.input)?;
            let ntf = is_ntf_kernel(&k, tolerance(tol, NTF_TOL)?)?;
            let dominated = ntf.then(|| check_delta_domination(&k)).transpose()?;
            emit_json(
                &json!({
                    "ntf": ntf,
                    "idempotency_defect": idempotency_defect(k.gram()),
                    "delta_dominated": dominated,
                }),
                output.out.as_deref(),
            )
        }
        FramesCmd::Dilate {
            input,
            into,
            output,
            tol,
        } => {
            let k = read_kernel(&input.input)?;
            let kp = read_kernel(into)?;
            let d = dilate_ntf(&k, &kp)?;
            let defect = d.defect();
            emit_json(
                &json!({
                    "source_rank": d.source.rank(),
                    "target_rank": d.target.rank(),
                    "W": matrix_json(&d.w),
                    "P": matrix_json(&d.p),
                    "defect": defect,
                }),
                output.out.as_deref(),
            )?;
            ensure_below("dilation_defect", defect, tolerance(tol, 1e-8)?)
        }
    }
}
