use std::path::Path;
use std::time::Instant;

use ddwave::stability::alpha_and_c;
use ddwave::wave::{
    d_of_c, functionals, ode_residual, pohozaev_residuals, profile_on_grid, suggested_length,
    DMode,
};
use ddwave::{Grid, WaveContext};
use serde_json::{Map, Value};

use crate::cli::WaveArgs;
use crate::error::CliResult;
use crate::output::{fmt_f64, merge_flat, RunManifest};

pub fn run(out: &Path, args: &WaveArgs) -> CliResult<()> {
    let started = Instant::now();
    let params = args.model.params()?;
    let ctx = WaveContext::new(params, args.c)?;
    let length = args.grid.length.unwrap_or_else(|| suggested_length(&ctx));
    let grid = Grid::new(length, args.grid.n)?;
    let field = profile_on_grid(&ctx, &grid)?;

    // alpha is only defined for moving waves
    let alpha = alpha_and_c(&ctx).ok();
    let report = functionals(&grid, &field.values, &ctx, alpha.map_or(0.0, |a| a.alpha));
    let (r1, r2) = pohozaev_residuals(&field, &ctx);

    let mut obj = Map::new();
    merge_flat(&mut obj, &params)?;
    obj.insert("c".into(), serde_json::to_value(args.c)?);
    obj.insert("length".into(), serde_json::to_value(length)?);
    obj.insert("n_points".into(), serde_json::to_value(grid.len())?);
    obj.insert("peak".into(), serde_json::to_value(field.peak())?);
    merge_flat(&mut obj, &report)?;
    if alpha.is_none() {
        obj.insert("alpha".into(), Value::Null);
        obj.insert("k_alpha".into(), Value::Null);
    }
    obj.insert("c_const".into(), serde_json::to_value(alpha.map(|a| a.c_const))?);
    obj.insert("pohozaev_p1_rel".into(), serde_json::to_value(r1)?);
    obj.insert("pohozaev_p2_rel".into(), serde_json::to_value(r2)?);
    obj.insert("ode_residual".into(), serde_json::to_value(ode_residual(&field, &ctx))?);
    obj.insert(
        "d_closed_form".into(),
        serde_json::to_value(d_of_c(&ctx, DMode::ClosedForm)?)?,
    );
    obj.insert(
        "d_quadrature".into(),
        serde_json::to_value(d_of_c(&ctx, DMode::Quadrature)?)?,
    );

    let mut manifest = RunManifest::new(out, "wave", started)?;
    manifest.params(params);
    manifest.extra("c", args.c);
    manifest.extra("length", length);
    manifest.extra("n_points", grid.len());
    let rows = grid
        .points()
        .iter()
        .zip(&field.values)
        .map(|(&x, &v)| vec![fmt_f64(x), fmt_f64(v)]);
    manifest.csv("profile.csv", &["x", "phi"], rows)?;
    manifest.json("functionals.json", &Value::Object(obj))?;
    manifest.finish()
}
