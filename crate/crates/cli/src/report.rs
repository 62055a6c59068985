//! The regular and rupture lambda-ranges for each `(N, delta)` cell.

use crate::args::ReportArgs;
use crate::output::{emit, summary};
use crate::CliError;
use mems_radial::bifurcation::{self, AlphaGrid};
use mems_radial::{picard, thresholds, Error, ProblemParams, ShootControls};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

const FOLD_SEARCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub dim: u32,
    pub delta: f64,
    pub regular: String,
    pub rupture: String,
    pub lambda_star: Option<f64>,
    pub lambda_3star: Option<f64>,
    /// Computed maximum of the regular branch.
    pub lambda_bar: Option<f64>,
    /// Largest lambda for which the Picard construction is certified.
    pub rupture_bound: Option<f64>,
    pub note: String,
}

/// `7/12` for values that are small-denominator rationals, six decimals otherwise.
pub fn fmt_value(x: f64) -> String {
    if let Some(q) = Ratio::<i64>::approximate_float(x) {
        let back = *q.numer() as f64 / *q.denom() as f64;
        if *q.denom() <= 1000 && (back - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return q.to_string();
        }
    }
    format!("{x:.6}")
}

fn fold_lambda(params: &ProblemParams) -> Result<(f64, &'static str), Error> {
    let controls = ShootControls::default();
    let curve = bifurcation::trace(params, &AlphaGrid::default(), &controls)?;
    match bifurcation::refine_fold(params, &curve, &controls) {
        Ok((lb, _)) => Ok((lb, "")),
        Err(Error::FoldNotInterior { .. }) => Ok((curve.lambda_bar, "fold not interior to the grid; sampled maximum")),
        Err(e) => Err(e),
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

pub fn cell(dim: u32, delta: f64) -> Result<Cell, Error> {
    let params = ProblemParams::new(dim, delta)?;
    let n = dim as f64;
    let t = thresholds(&params, 0.0);
    let mut c = Cell {
        dim,
        delta,
        regular: String::new(),
        rupture: String::new(),
        lambda_star: t.lambda_star,
        lambda_3star: t.lambda_3star,
        lambda_bar: None,
        rupture_bound: None,
        note: String::new(),
    };
    let below_half = if dim == 2 { delta < 1.0 && !params.is_unit() } else { delta < n / 2.0 && !params.is_half_dim() };
    if below_half {
        let ls = fmt_value(n - 1.0 - delta);
        c.regular = format!("(0, {ls})");
        c.rupture = format!("λ* = {ls}");
        return Ok(c);
    }
    if params.is_half_dim() {
        let h = fmt_value(n / 2.0);
        c.regular = format!("(0,{h}]");
        c.rupture = format!("(0,{h})");
        return Ok(c);
    }

    let (lb, note) = fold_lambda(&params)?;
    c.lambda_bar = Some(lb);
    c.regular = format!("(0, {lb:.6}]");
    let mut notes = vec![note.to_string()];
    if let Some(l3) = t.lambda_3star {
        c.rupture = format!("(0, {})", fmt_value(l3));
    } else if near(delta, n - 1.0) {
        c.rupture = "(0, λ****)".into();
        notes.push("critical exponent: rupture solutions from the rescaled Lane-Emden family".into());
    } else {
        let star = if dim == 2 { "λ**" } else { "λ****" };
        let bound = picard::feasibility_threshold(&params)?;
        c.rupture_bound = Some(bound);
        c.rupture = format!("(0, {star}), {star} ≥ {bound:.6}");
        notes.push("lower bound from the Picard feasibility condition".into());
    }
    c.note = notes.into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("; ");
    Ok(c)
}

pub fn report(a: &ReportArgs) -> Result<(), CliError> {
    if a.dims.is_empty() || a.deltas.is_empty() {
        return Err(CliError::Validation("need at least one dimension and one delta".into()));
    }
    let mut cells = Vec::new();
    for &dim in &a.dims {
        for &delta in &a.deltas {
            cells.push(cell(dim, delta)?);
        }
    }
    let doc = summary(json!({
        "command": "report",
        "dims": a.dims,
        "deltas": a.deltas,
        "cells": cells.len(),
        "tolerances": {
            "shoot_rtol": ShootControls::default().ode.rtol,
            "fold_search": FOLD_SEARCH,
            "feasibility": "min over 0.1-decade grid in m, golden-section refined",
        },
    }));
    emit(&a.output, &cells, doc)
}
