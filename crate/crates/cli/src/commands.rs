use crate::args::{BifurcateArgs, CriticalArgs, ExactArgs, Family, Mu1Args, PhaseArgs, PicardArgs};
use crate::output::{emit, emit_document, profile_rows, summary};
use crate::CliError;
use mems_radial::bifurcation::{self, AlphaGrid, RELIABILITY_TOL};
use mems_radial::exact::{self, ClosedFormFamily};
use mems_radial::phaseplane::{self, PhaseControls};
use mems_radial::picard::{self, KernelSpec, PicardControls};
use mems_radial::profile::{geometric_nodes, uniform_nodes};
use mems_radial::{critical, shoot, spectral, thresholds, Error, ProblemParams, ShootControls};
use serde::Serialize;
use serde_json::json;

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("--{name} must be positive, got {v}")))
    }
}

pub fn bifurcate(a: &BifurcateArgs) -> Result<(), CliError> {
    positive("rtol", a.rtol)?;
    let params = ProblemParams::new(a.dim, a.delta)?;
    let grid = AlphaGrid { body: a.body_samples, tail: a.tail_samples, tail_lo: a.tail_lo, tail_hi: a.tail_hi };
    let controls = ShootControls::default().with_rtol(a.rtol);
    let mut curve = bifurcation::trace(&params, &grid, &controls)?;
    let mu1 = spectral::mu1(a.dim).mu1;
    let t = thresholds(&params, mu1);

    let mut fold_method = "sampled";
    if a.refine {
        match bifurcation::refine_fold(&params, &curve, &controls) {
            Ok((lb, al)) => {
                curve.lambda_bar = lb;
                curve.alpha_at_fold = al;
                fold_method = "golden_section";
            }
            // a monotone curve has no interior fold to refine
            Err(Error::FoldNotInterior { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let bounds = bifurcation::check_bounds(&params, &curve, mu1);

    let doc = summary(json!({
        "command": "bifurcate",
        "dim": a.dim,
        "delta": a.delta,
        "lambda_star": t.lambda_star,
        "lambda_3star": t.lambda_3star,
        "classification": curve.classification,
        "crossings": curve.crossings,
        "lambda_bar": curve.lambda_bar,
        "alpha_at_fold": curve.alpha_at_fold,
        "fold_method": fold_method,
        "bounds": { "lower": bounds.lower, "upper": bounds.upper, "satisfied": bounds.satisfied },
        "mu1": mu1,
        "samples": curve.samples.len(),
        "tail_start": curve.tail_start,
        "dropped": curve.dropped,
        "failed": curve.failed,
        "unreliable": curve.unreliable,
        "tolerances": {
            "rtol": controls.ode.rtol,
            "atol": controls.ode.atol,
            "reliability": RELIABILITY_TOL,
            "fold_search": if a.refine { Some(1e-9) } else { None },
        },
    }));
    emit(&a.output, &curve.samples, doc)
}

#[derive(Serialize)]
struct ClosedFormRow {
    alpha: f64,
    lambda: f64,
    residual: f64,
}

#[derive(Serialize)]
struct LiouvilleRow {
    a: f64,
    b: f64,
    lambda: f64,
    residual: f64,
}

enum ExactRows {
    ClosedForm(Vec<ClosedFormRow>),
    Liouville(Vec<LiouvilleRow>),
}

impl ExactRows {
    fn residuals(&self) -> Vec<f64> {
        match self {
            ExactRows::ClosedForm(r) => r.iter().map(|r| r.residual).collect(),
            ExactRows::Liouville(r) => r.iter().map(|r| r.residual).collect(),
        }
    }
}

pub fn exact_verify(a: &ExactArgs) -> Result<(), CliError> {
    if a.members == 0 || a.nodes < 3 {
        return Err(CliError::Validation("need --members >= 1 and --nodes >= 3".into()));
    }
    let n = a.dim as f64;
    let mut tolerances = json!({ "nodes": a.nodes });
    let (rows, delta, limit) = match a.family {
        Family::Parabola => {
            let params = ProblemParams::new(a.dim, a.delta.unwrap_or(n / 2.0))?;
            let nodes = uniform_nodes(a.nodes);
            let mut rows = Vec::new();
            for k in 1..=a.members {
                let alpha = k as f64 / (a.members + 1) as f64;
                let prof = exact::build(ClosedFormFamily::Parabola { alpha }, &params, &nodes)?;
                rows.push(ClosedFormRow { alpha, lambda: prof.lambda, residual: shoot::residual(&prof, &params) });
            }
            (ExactRows::ClosedForm(rows), params.delta, a.max_residual.unwrap_or(1e-12))
        }
        Family::RuptureLine => {
            let delta = a.delta.ok_or_else(|| CliError::Validation("--delta is required for the rupture line".into()))?;
            let params = ProblemParams::new(a.dim, delta)?;
            let prof = exact::build(ClosedFormFamily::RuptureLine, &params, &geometric_nodes(1e-6, a.nodes))?;
            let res = shoot::residual(&prof, &params);
            tolerances["r_min"] = json!(1e-6);
            let rows = vec![ClosedFormRow { alpha: 1.0, lambda: prof.lambda, residual: res }];
            (ExactRows::ClosedForm(rows), delta, a.max_residual.unwrap_or(1e-12))
        }
        Family::Liouville => {
            if a.dim != 2 || a.delta.is_some_and(|d| d != 1.0) {
                return Err(CliError::Validation("the Liouville family needs --dim 2 and delta = 1".into()));
            }
            let mut rows = Vec::new();
            for k in 1..=a.members {
                let b = 2.0 * k as f64 / (a.members + 1) as f64;
                let aa = 2.0 * b * b;
                let residual = exact::liouville_singular_check(aa, b)?;
                rows.push(LiouvilleRow { a: aa, b, lambda: exact::liouville_lambda(aa, b), residual });
            }
            tolerances = json!({ "nodes": 2001, "r_min": 1e-6, "residual": "term-scaled" });
            (ExactRows::Liouville(rows), 1.0, a.max_residual.unwrap_or(1e-10))
        }
    };
    let residuals = rows.residuals();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let family = match a.family {
        Family::Parabola => "parabola",
        Family::RuptureLine => "rupture_line",
        Family::Liouville => "liouville",
    };
    tolerances["max_residual"] = json!(limit);
    let doc = summary(json!({
        "command": "exact-verify",
        "family": family,
        "dim": a.dim,
        "delta": delta,
        "members": residuals.len(),
        "max_residual": worst,
        "passed": worst <= limit,
        "tolerances": tolerances,
    }));
    match &rows {
        ExactRows::ClosedForm(r) => emit(&a.output, r, doc)?,
        ExactRows::Liouville(r) => emit(&a.output, r, doc)?,
    }
    if worst <= limit {
        Ok(())
    } else {
        Err(CliError::Check(format!("max residual {worst:e} exceeds {limit:e}")))
    }
}

#[derive(Serialize)]
struct OrbitRow {
    t: f64,
    x: f64,
    y: f64,
    energy: f64,
}

pub fn phase(a: &PhaseArgs) -> Result<(), CliError> {
    positive("t-end", a.t_end)?;
    positive("rtol", a.rtol)?;
    let params = ProblemParams::new(a.dim, a.delta)?;
    let controls = PhaseControls { t_end: a.t_end, rtol: a.rtol, samples: a.samples };
    let run = phaseplane::construct_rupture(&params, a.lambda, a.y0, &controls)?;
    let diag = phaseplane::orbit_diagnostics(&run, &params);
    let n = a.dim as f64;
    let doc = summary(json!({
        "command": "phase",
        "dim": a.dim,
        "delta": a.delta,
        "lambda": a.lambda,
        "y0": a.y0,
        "x0": phaseplane::initial_x(n, a.delta, a.lambda),
        "x_delta": phaseplane::x_delta(a.delta),
        "lambda_3star": thresholds(&params, 0.0).lambda_3star,
        "diagnostics": diag,
        "rupture_slope": phaseplane::fitted_slope(&run.profile, 1e-5, 1e-3),
        "rupture_constant": phaseplane::rupture_constant(&run.profile, n),
        "tolerances": { "rtol": a.rtol, "atol": 1e-15, "t_end": a.t_end, "slope_window": [1e-5, 1e-3] },
    }));
    if a.orbit {
        let rows: Vec<OrbitRow> = run
            .trace
            .states
            .iter()
            .zip(&run.trace.energies)
            .map(|(s, &energy)| OrbitRow { t: s.t, x: s.x, y: s.y, energy })
            .collect();
        emit(&a.output, &rows, doc)
    } else {
        emit(&a.output, &profile_rows(&run.profile), doc)
    }
}

pub fn picard(a: &PicardArgs) -> Result<(), CliError> {
    positive("t-end", a.t_end)?;
    positive("tol", a.tol)?;
    positive("step", a.step)?;
    let params = ProblemParams::new(a.dim, a.delta)?;
    let kernel = KernelSpec::for_problem(&params, a.lambda)?;
    let interval = picard::feasible_m(&kernel)?;
    let m = a.m.unwrap_or(interval.m_star);
    if !(m >= interval.m_lo && m <= interval.m_hi) {
        return Err(CliError::Validation(format!(
            "m = {m} lies outside the feasible interval [{}, {}]",
            interval.m_lo, interval.m_hi
        )));
    }
    let controls = PicardControls { step: a.step, tol: a.tol, ..PicardControls::default() };
    let sol = picard::solve_with(&kernel, m, a.t_end, &controls)?;
    let profile = picard::to_rupture(&sol, &params, a.lambda)?;
    let doc = summary(json!({
        "command": "picard",
        "dim": a.dim,
        "delta": a.delta,
        "lambda": a.lambda,
        "kernel": kernel,
        "feasible_m": interval,
        "m": m,
        "iterations": sol.iterations,
        "distance": sol.distance,
        "damping": sol.damping,
        "cone_ok": sol.cone_ok,
        "residual": sol.residual,
        "slope_error": sol.slope_error,
        "slope_bound": sol.slope_bound,
        "truncation": sol.truncation,
        "tolerances": { "fixed_point": a.tol, "step": a.step, "t_end": a.t_end, "u_cap": controls.u_cap },
    }));
    emit(&a.output, &profile_rows(&profile), doc)
}

pub fn critical(a: &CriticalArgs) -> Result<(), CliError> {
    positive("lambda", a.lambda)?;
    let shot = critical::shoot_inward(a.dim, a.beta, a.r_min)?;
    let fam = critical::rescale_family(&shot, a.lambda, 1.0)?;
    let profile = fam.to_rupture()?;
    let ratios = shot.aviles_ratios();
    let doc = summary(json!({
        "command": "critical",
        "dim": a.dim,
        "delta": a.dim as f64 - 1.0,
        "lambda": a.lambda,
        "lambda_mems": profile.lambda,
        "beta": a.beta,
        "outcome": shot.outcome,
        "rho": fam.rho,
        "r_first": fam.r.first(),
        "v_at_1": fam.v.last(),
        "residual": fam.residual(),
        "aviles_ratio": ratios.last().map(|&(r, q)| json!({ "r": r, "ratio": q })),
        "aviles_limit": critical::aviles_limit(a.dim),
        "tolerances": { "step": critical::STEP, "r_min": a.r_min },
    }));
    emit(&a.output, &profile_rows(&profile), doc)
}

pub fn mu1(a: &Mu1Args) -> Result<(), CliError> {
    if a.dim < 2 {
        return Err(CliError::Validation(format!("dim = {} < 2", a.dim)));
    }
    let r = spectral::mu1(a.dim);
    let doc = summary(json!({
        "command": "mu1",
        "dim": r.dim,
        "nu": r.nu,
        "j_first": r.j_first,
        "mu1": r.mu1,
        "tolerances": { "root_relative": 1e-15 },
    }));
    emit_document(a.out.as_deref(), &doc)
}
