//! The six subcommands. Each writes its primary artifact plus a manifest;
//! CSV payloads are byte-identical across reruns and thread counts.

use std::path::Path;

use num_complex::Complex64;

use dexpm::{
    convection_diffusion, expm_auto, expm_de, expm_de_core, expm_de_scalar, expm_pade,
    expm_talbot, get_interval, lu_factor, make_params, randsvd, read_matrix,
    rightmost_eigenvalue, test_matrix, test_matrix_parts, write_array_complex,
    write_coordinate_real, AutoQuadConfig, AutoQuadOutcome, ComplexMatrix, ConvDiffSpec,
    EvalMode, PadeConfig, RandSvdSpec, TalbotParams, TransformVariant,
};

use crate::manifest::{fmt_f64, sibling, RunManifest};
use crate::{
    AutoquadArgs, CliError, CompareArgs, ExpmArgs, GenMatrixArgs, ModeArg, ScalarMapArgs,
    ShiftSweepArgs,
};

const DE_LADDER: [f64; 3] = [0.2, 0.1, 0.05];
const TALBOT_LADDER: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

impl ModeArg {
    fn to_eval(self) -> EvalMode {
        match self {
            ModeArg::Direct => EvalMode::Direct,
            ModeArg::Split => EvalMode::Split,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Direct => "direct",
            ModeArg::Split => "split",
        }
    }
}

fn write_text(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Lib(dexpm::Error::Io(e)))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

/// a1 / a2 are the seeded prescribed-spectrum matrices; anything else is a
/// Matrix Market path.
fn load_matrix(sel: &str, n: usize, seed: u64) -> Result<ComplexMatrix, CliError> {
    match sel {
        "a1" => Ok(test_matrix(1, n, seed)?),
        "a2" => Ok(test_matrix(2, n, seed)?),
        path => Ok(read_matrix(Path::new(path))?),
    }
}

/// Like `load_matrix`, but pairs the matrix with the sharpest available
/// reference: the named generators come with their similarity factors, so
/// e^A = Z e^D Z^-1 is exact to conditioning, well below the Pade floor on
/// these spectra; file matrices fall back to Pade.
fn load_matrix_with_oracle(
    sel: &str,
    n: usize,
    seed: u64,
) -> Result<(ComplexMatrix, ComplexMatrix), CliError> {
    let k = match sel {
        "a1" => 1,
        "a2" => 2,
        path => {
            let a = read_matrix(Path::new(path))?;
            let oracle = expm_pade(&a, &PadeConfig::default())?;
            return Ok((a, oracle));
        }
    };
    let parts = test_matrix_parts(k, n, seed)?;
    let e: Vec<Complex64> = parts.d.iter().map(|l| l.exp()).collect();
    let zinv = lu_factor(&parts.z)?.inverse();
    let oracle = parts.z.matmul(&ComplexMatrix::diagonal(&e)).matmul(&zinv);
    Ok((parts.a, oracle))
}

fn rel2(x: &ComplexMatrix, truth: &ComplexMatrix) -> f64 {
    x.sub(truth).norm2_estimate().value / truth.norm2_estimate().value
}

pub fn cmd_expm(args: &ExpmArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.input)?;
    let mode = args.mode.to_eval();
    let h = args.h.unwrap_or(if args.auto { 0.4 } else { 0.1 });

    let mut meta = serde_json::Map::new();
    meta.insert("input".into(), args.input.display().to_string().into());
    meta.insert("n".into(), a.rows().into());
    meta.insert("h".into(), fmt_f64(h).into());
    meta.insert("eps".into(), fmt_f64(args.eps).into());
    meta.insert("sigma".into(), fmt_f64(args.sigma).into());
    meta.insert("mode".into(), args.mode.name().into());
    meta.insert("auto".into(), args.auto.into());

    let result = if args.auto {
        let mut cfg = AutoQuadConfig::new(args.eps, args.sigma);
        cfg.h1 = h;
        cfg.eta = args.eta;
        cfg.h_min = args.h_min;
        let (res, rep) = expm_auto(&a, &cfg, mode)?;
        let outcome = match rep.outcome {
            AutoQuadOutcome::PredictedConverged => "predicted_converged",
            AutoQuadOutcome::RefinedOnce => "refined_once",
            AutoQuadOutcome::ExhaustedRounds => "exhausted_rounds",
            AutoQuadOutcome::HitMeshFloor => "hit_mesh_floor",
        };
        // The model's error for the mesh that was returned: the measured
        // refinement distance when a refinement ran, otherwise the fit's
        // prediction for the finest trial mesh.
        let predicted = rep
            .refined_eps
            .or_else(|| rep.rounds.last().and_then(|r| r.eps3_pred));
        meta.insert("outcome".into(), outcome.into());
        meta.insert("rounds".into(), rep.rounds.len().into());
        meta.insert("final_h".into(), fmt_f64(rep.final_h).into());
        meta.insert(
            "predicted_error".into(),
            predicted.map_or(serde_json::Value::Null, |p| fmt_f64(p).into()),
        );
        res
    } else {
        expm_de(&a, h, args.eps, args.sigma, mode)?
    };

    meta.insert("interval_l".into(), result.interval.l.into());
    meta.insert("interval_r".into(), result.interval.r.into());
    meta.insert("node_count".into(), result.interval.node_count().into());
    meta.insert("nodes_evaluated".into(), result.nodes_evaluated.into());
    meta.insert("shift_re".into(), fmt_f64(result.shift_exponent.re).into());
    meta.insert("shift_im".into(), fmt_f64(result.shift_exponent.im).into());
    meta.insert("scale_applied".into(), result.scale_applied.into());

    write_array_complex(&args.out, &result.x)?;
    announce(&args.out);
    let meta_line = serde_json::Value::Object(meta).to_string();
    write_text(&sibling(&args.out, ".meta.jsonl"), &(meta_line + "\n"))?;

    let manifest = RunManifest::new("expm")
        .param("input", args.input.display().to_string())
        .param_f64("h", h)
        .param_f64("eps", args.eps)
        .param_f64("sigma", args.sigma)
        .param("mode", args.mode.name())
        .param("auto", args.auto.to_string())
        .param_f64("eta", args.eta)
        .param_f64("h_min", args.h_min)
        .param("out", args.out.display().to_string());
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}

fn axis(range: &(f64, f64), count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![range.0];
    }
    let step = (range.1 - range.0) / (count - 1) as f64;
    (0..count).map(|i| range.0 + i as f64 * step).collect()
}

fn parse_range(values: &[f64], what: &str) -> Result<(f64, f64), CliError> {
    let &[lo, hi] = values else {
        return Err(CliError::Input(format!("{what} needs exactly two values")));
    };
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::Input(format!(
            "{what} must be finite with lo <= hi, got {lo},{hi}"
        )));
    }
    Ok((lo, hi))
}

/// Error of the truncated scalar sum at one cell. Cells in the closed right
/// half-plane are invalid by construction; cells whose interval scan fails
/// are recorded the same way rather than aborting the whole map.
fn scalar_cell(z: Complex64, h: f64, eps: f64) -> f64 {
    if z.re >= 0.0 {
        return f64::NAN;
    }
    let run = || -> dexpm::Result<f64> {
        let p = make_params(h, TransformVariant::Ooura1999)?;
        let iv = get_interval(&p, z.re, eps)?;
        Ok((z.exp() - expm_de_scalar(z, &p, &iv)).norm())
    };
    run().unwrap_or(f64::NAN)
}

pub fn cmd_scalar_map(args: &ScalarMapArgs) -> Result<(), CliError> {
    if args.grid == 0 {
        return Err(CliError::Input("--grid must be at least 1".into()));
    }
    if args.h.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
        return Err(CliError::Input(format!("mesh sizes must be positive, got {:?}", args.h)));
    }
    let windows: Vec<((f64, f64), (f64, f64))> = match (&args.re_range, &args.im_range) {
        (Some(re), Some(im)) => vec![(parse_range(re, "--re-range")?, parse_range(im, "--im-range")?)],
        (None, None) => vec![
            ((-30.0, 10.0), (-20.0, 20.0)),
            ((-5000.0, 0.0), (-2500.0, 2500.0)),
        ],
        _ => {
            return Err(CliError::Input(
                "--re-range and --im-range must be given together".into(),
            ))
        }
    };

    let mut csv = String::from("re,im,h,abs_error\n");
    for (re_range, im_range) in &windows {
        for &h in &args.h {
            for &re in &axis(re_range, args.grid) {
                for &im in &axis(im_range, args.grid) {
                    let err = scalar_cell(Complex64::new(re, im), h, args.eps);
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt_f64(re),
                        fmt_f64(im),
                        fmt_f64(h),
                        fmt_f64(err)
                    ));
                }
            }
        }
    }
    write_text(&args.out, &csv)?;

    let manifest = RunManifest::new("scalar-map")
        .param_f64_list("h", &args.h)
        .param(
            "windows",
            windows
                .iter()
                .map(|(re, im)| {
                    format!(
                        "re[{},{}] im[{},{}]",
                        fmt_f64(re.0),
                        fmt_f64(re.1),
                        fmt_f64(im.0),
                        fmt_f64(im.1)
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
        )
        .param("grid", args.grid.to_string())
        .param_f64("eps", args.eps)
        .param("out", args.out.display().to_string());
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}

/// Destabilizing shifts (sigma >= 0) still get a row: the truncation scan
/// runs at a mirrored negative abscissa while the true shift is applied to
/// the matrix, so the blowup shows in the error column instead of a crash.
fn expm_with_any_shift(
    a: &ComplexMatrix,
    h: f64,
    eps: f64,
    sigma: f64,
    mode: EvalMode,
) -> dexpm::Result<ComplexMatrix> {
    if sigma < 0.0 {
        return Ok(expm_de(a, h, eps, sigma, mode)?.x);
    }
    let p = make_params(h, TransformVariant::Ooura1999)?;
    let iv = get_interval(&p, -sigma.abs().max(0.1), eps)?;
    let lambda = rightmost_eigenvalue(a)?;
    let shift = Complex64::new(sigma, 0.0) - lambda;
    let core = expm_de_core(&a.add_diagonal(shift), &p, &iv, mode)?;
    Ok(core.scale((-shift).exp()))
}

pub fn cmd_shift_sweep(args: &ShiftSweepArgs) -> Result<(), CliError> {
    let sigmas = match &args.sigmas {
        Some(list) if list.is_empty() => {
            return Err(CliError::Input("--sigmas needs at least one value".into()))
        }
        Some(list) => list.clone(),
        None => (0..=30).map(|i| -10.0 + 0.5 * i as f64).collect(),
    };
    let a = load_matrix(&args.matrix, args.n, args.seed)?;
    let oracle = expm_pade(&a, &PadeConfig::default())?;

    let mut csv = String::from("sigma,rel_error_2norm,status\n");
    for &sigma in &sigmas {
        // sigma = 0 parks the rightmost eigenvalue on the imaginary axis,
        // where a near-zero node can make the resolvent numerically
        // singular outright; that still gets the unstable_shift mark, with
        // NaN in the error column.
        let (err, status) = match expm_with_any_shift(&a, args.h, args.eps, sigma, EvalMode::Split)
        {
            Ok(x) => (rel2(&x, &oracle), if sigma < 0.0 { "ok" } else { "unstable_shift" }),
            Err(_) if sigma >= 0.0 => (f64::NAN, "unstable_shift"),
            Err(_) => (f64::NAN, "failed"),
        };
        csv.push_str(&format!("{},{},{}\n", fmt_f64(sigma), fmt_f64(err), status));
    }
    write_text(&args.out, &csv)?;

    let manifest = RunManifest::new("shift-sweep")
        .param("matrix", args.matrix.clone())
        .param_f64_list("sigmas", &sigmas)
        .param_f64("h", args.h)
        .param_f64("eps", args.eps)
        .param("n", args.n.to_string())
        .param("out", args.out.display().to_string())
        .seed(args.seed);
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}

pub fn cmd_autoquad(args: &AutoquadArgs) -> Result<(), CliError> {
    if args.eps_list.is_empty() {
        return Err(CliError::Input("--eps-list needs at least one value".into()));
    }
    let (a, oracle) = load_matrix_with_oracle(&args.matrix, args.n, args.seed)?;

    let mut csv = String::from("eps_target,eps_measured,final_h,rounds\n");
    let mut trace = String::from("eps_target,h,inv_h,est_error\n");
    for &eps in &args.eps_list {
        let cfg = AutoQuadConfig::new(eps, args.sigma);
        let (res, rep) = expm_auto(&a, &cfg, EvalMode::Split)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(eps),
            fmt_f64(rel2(&res.x, &oracle)),
            fmt_f64(rep.final_h),
            rep.rounds.len()
        ));

        let mut points: Vec<(f64, f64)> = Vec::new();
        for r in &rep.rounds {
            for pair in [(r.h1, r.eps1), (r.h2, r.eps2)] {
                if points.last() != Some(&pair) {
                    points.push(pair);
                }
            }
        }
        match rep.outcome {
            AutoQuadOutcome::RefinedOnce => {
                if let Some(e) = rep.refined_eps {
                    points.push((rep.final_h, e));
                }
            }
            _ => {
                if let Some(r) = rep.rounds.last() {
                    if let Some(p) = r.eps3_pred {
                        points.push((r.h3, p));
                    }
                }
            }
        }
        for (h, e) in points {
            trace.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(eps),
                fmt_f64(h),
                fmt_f64(1.0 / h),
                fmt_f64(e)
            ));
        }
    }
    write_text(&args.out, &csv)?;
    write_text(&sibling(&args.out, "_trace.csv"), &trace)?;

    let manifest = RunManifest::new("autoquad")
        .param("matrix", args.matrix.clone())
        .param_f64_list("eps_list", &args.eps_list)
        .param_f64("sigma", args.sigma)
        .param("n", args.n.to_string())
        .param("out", args.out.display().to_string())
        .seed(args.seed);
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    for m in &args.methods {
        if m != "de" && m != "talbot" {
            return Err(CliError::Input(format!(
                "unknown method {m:?}; expected de or talbot"
            )));
        }
    }
    let &[cx, cy] = &args.c[..] else {
        return Err(CliError::Input("--c needs exactly two values".into()));
    };
    let spec = ConvDiffSpec {
        grid_n: args.grid_n,
        d: args.d,
        c: (cx, cy),
    };
    let a = convection_diffusion(&spec)?;
    let oracle = expm_pade(&a, &PadeConfig::default())?;

    let mut csv = String::from("method,nodes,rel_error\n");
    if args.methods.iter().any(|m| m == "de") {
        for &h in &DE_LADDER {
            let row = expm_de(&a, h, 2.2e-16, -2.5, EvalMode::Direct)
                .map(|res| (res.interval.node_count(), rel2(&res.x, &oracle)));
            let (nodes, err) = match row {
                Ok(pair) => pair,
                Err(_) => (0, f64::NAN),
            };
            csv.push_str(&format!("de,{nodes},{}\n", fmt_f64(err)));
        }
    }
    if args.methods.iter().any(|m| m == "talbot") {
        for &m in &TALBOT_LADDER {
            let row = TalbotParams::new(m)
                .and_then(|p| expm_talbot(&a, &p))
                .map(|x| rel2(&x, &oracle));
            let err = row.unwrap_or(f64::NAN);
            csv.push_str(&format!("talbot,{m},{}\n", fmt_f64(err)));
        }
    }
    write_text(&args.out, &csv)?;

    let manifest = RunManifest::new("compare")
        .param_f64("d", args.d)
        .param_f64_list("c", &args.c)
        .param("grid_n", args.grid_n.to_string())
        .param("methods", args.methods.join(","))
        .param("out", args.out.display().to_string());
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}

pub fn cmd_gen_matrix(args: &GenMatrixArgs) -> Result<(), CliError> {
    match args.kind.as_str() {
        "a1" | "a2" => {
            let k = if args.kind == "a1" { 1 } else { 2 };
            let parts = test_matrix_parts(k, args.n, args.seed)?;
            write_array_complex(&args.out, &parts.a)?;
        }
        "randsvd" => {
            let spec = RandSvdSpec {
                n: args.n,
                kappa: args.kappa,
                seed: args.seed,
            };
            write_array_complex(&args.out, &randsvd(&spec)?)?;
        }
        "convdiff" => {
            let &[cx, cy] = &args.c[..] else {
                return Err(CliError::Input("--c needs exactly two values".into()));
            };
            let spec = ConvDiffSpec {
                grid_n: args.n,
                d: args.d,
                c: (cx, cy),
            };
            write_coordinate_real(&args.out, &convection_diffusion(&spec)?)?;
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown kind {other:?}; expected a1, a2, convdiff, or randsvd"
            )))
        }
    }
    announce(&args.out);

    let manifest = RunManifest::new("gen-matrix")
        .param("kind", args.kind.clone())
        .param("n", args.n.to_string())
        .param_f64("kappa", args.kappa)
        .param_f64("d", args.d)
        .param_f64_list("c", &args.c)
        .param("out", args.out.display().to_string())
        .seed(args.seed);
    announce(&manifest.write_next_to(&args.out).map_err(dexpm::Error::Io)?);
    Ok(())
}
