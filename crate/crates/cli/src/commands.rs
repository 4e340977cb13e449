use std::fs;
use std::path::{Path, PathBuf};

use gauss_periods::cm::{
    field_data, lattice_context, quotient_order_parts, rcfp_plot, rescale_to_disc_with,
    torsion_coordinate_plot, Coordinate, OkElement, TorsionSizing,
};
use gauss_periods::laurent::{sample_image, ReductionTable};
use gauss_periods::modring::{
    check_cyclotomic_vanishing, find_matrix_with_budget, mat_order, MatrixModN,
};
use gauss_periods::periods::{
    frame_batches, gaussian_plot, supercharacter_plot, write_csv, PeriodSpec, SupercharSpec,
};
use gauss_periods::render::{auto_viewbox, encode_png, render_scatter, write_frames, RenderStyle};
use gauss_periods::weyl::{alpha_vector, weyl_sum_exact, weyl_sum_numeric, WeylInstance};
use gauss_periods::PlotPoint;
use serde_json::{json, Value};

use crate::args::{
    Command, Coord, FindElementArgs, Format, GaussArgs, GdArgs, OutputArgs, RcfpArgs,
    SupercharArgs, TorsionArgs, WeylArgs,
};
use crate::error::{CliError, Result};

/// Everything a run produces, held in memory until all of it has been computed.
struct Plot {
    points: Vec<PlotPoint>,
    index_len: usize,
    color_modulus: u64,
    summary: Value,
}

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Gauss(a) => emit_plot(cmd, &a.output, gauss(a)?),
        Command::Superchar(a) => emit_plot(cmd, &a.output, superchar(a)?),
        Command::Gd(a) => emit_plot(cmd, &a.output, gd(a)?),
        Command::Rcfp(a) => emit_plot(cmd, &a.output, rcfp(a)?),
        Command::Torsion(a) => emit_plot(cmd, &a.output, torsion(a)?),
        Command::Weyl(a) => emit_report(cmd, a.out.as_deref(), "report.json", weyl(a)?),
        Command::FindElement(a) => {
            emit_report(cmd, a.out.as_deref(), "element.json", find_element(a)?)
        }
        Command::Replay(r) => {
            let mut cmd = load_meta(&r.meta)?;
            set_out(&mut cmd, r.out.clone());
            run(&cmd)
        }
    }
}

fn load_meta(path: &Path) -> Result<Command> {
    let text = fs::read_to_string(path)?;
    let meta: Value = serde_json::from_str(&text)?;
    let config = meta
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Usage(format!("{} has no config entry", path.display())))?;
    serde_json::from_value(config).map_err(|e| CliError::Usage(e.to_string()))
}

fn set_out(cmd: &mut Command, out: PathBuf) {
    match cmd {
        Command::Gauss(a) => a.output.out = Some(out),
        Command::Superchar(a) => a.output.out = Some(out),
        Command::Gd(a) => a.output.out = Some(out),
        Command::Rcfp(a) => a.output.out = Some(out),
        Command::Torsion(a) => a.output.out = Some(out),
        Command::Weyl(a) => a.out = Some(out),
        Command::FindElement(a) => a.out = Some(out),
        Command::Replay(_) => {}
    }
}

fn meta(cmd: &Command, summary: &Value) -> Result<String> {
    let config = serde_json::to_value(cmd)?;
    let doc = json!({
        "tool": "gperiods",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "summary": summary,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn prepare_dir(dir: &Path) -> Result<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Io(format!("{} exists and is not a directory", dir.display())));
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

fn emit_plot(cmd: &Command, output: &OutputArgs, plot: Plot) -> Result<()> {
    let out = output
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let style = RenderStyle {
        point_radius: output.point_radius,
        ..RenderStyle::new(output.width, output.height, plot.color_modulus)
    };
    if output.point_radius.is_nan() || output.point_radius <= 0.0 {
        return Err(CliError::Usage("--point-radius must be positive".into()));
    }
    if output.frames == Some(0) {
        return Err(CliError::Usage("--frames must be positive".into()));
    }
    let viewbox = auto_viewbox(&plot.points, 0.05)?;
    let mut csv = Vec::new();
    if output.formats.contains(&Format::Csv) {
        write_csv(&mut csv, &plot.points, plot.index_len)?;
    }
    let png = if output.formats.contains(&Format::Png) {
        Some(encode_png(&render_scatter(&plot.points, &style, &viewbox)?)?)
    } else {
        None
    };
    let meta = meta(cmd, &plot.summary)?;

    prepare_dir(out)?;
    if output.formats.contains(&Format::Csv) {
        fs::write(out.join("points.csv"), csv)?;
    }
    if let Some(png) = png {
        fs::write(out.join("plot.png"), png)?;
    }
    if let Some(chunk) = output.frames {
        let batches = frame_batches(plot.points.len(), chunk);
        write_frames(&plot.points, &batches, &style, &viewbox, &out.join("frames"))?;
    }
    fs::write(out.join("meta.json"), meta)?;
    Ok(())
}

/// Prints the report; with an output directory also writes it with meta.json.
/// A report whose `agree` field is false ends in a numeric failure.
fn emit_report(cmd: &Command, out: Option<&Path>, name: &str, report: Value) -> Result<()> {
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(dir) = out {
        let meta = meta(cmd, &report)?;
        prepare_dir(dir)?;
        fs::write(dir.join(name), &text)?;
        fs::write(dir.join("meta.json"), meta)?;
    }
    print!("{text}");
    if report.get("agree") == Some(&Value::Bool(false)) {
        return Err(CliError::Numeric("numeric and exact sums disagree".into()));
    }
    Ok(())
}

fn gauss(a: &GaussArgs) -> Result<Plot> {
    let spec = PeriodSpec::new(a.n, a.omega, a.color_mod)?;
    let points = gaussian_plot(&spec);
    Ok(Plot {
        summary: json!({ "points": points.len(), "d": spec.d() }),
        points,
        index_len: 1,
        color_modulus: a.color_mod,
    })
}

fn superchar(a: &SupercharArgs) -> Result<Plot> {
    let matrix = MatrixModN::new(a.m, a.n, &a.matrix)?;
    let spec = SupercharSpec::new(matrix, a.color_mod)?;
    let points = supercharacter_plot(&spec, a.budget)?;
    Ok(Plot {
        summary: json!({ "points": points.len(), "d": spec.d() }),
        points,
        index_len: a.m,
        color_modulus: a.color_mod,
    })
}

fn gd(a: &GdArgs) -> Result<Plot> {
    if a.d == 0 || a.samples == 0 {
        return Err(CliError::Usage("--d and --samples must be positive".into()));
    }
    let table = ReductionTable::for_cyclotomic(a.d);
    let required = (a.samples as u128).checked_pow(table.degree() as u32).unwrap_or(u128::MAX);
    if required > a.budget as u128 {
        return Err(CliError::Budget(format!(
            "{} samples per axis in dimension {} need {required} evaluations, budget is {}",
            a.samples,
            table.degree(),
            a.budget
        )));
    }
    let points: Vec<PlotPoint> = sample_image(&table, a.samples, a.seed)
        .into_iter()
        .enumerate()
        .map(|(i, z)| PlotPoint::new(&[i as u64], z, 0))
        .collect();
    Ok(Plot {
        summary: json!({ "points": points.len(), "torus_dim": table.degree() }),
        points,
        index_len: 1,
        color_modulus: 1,
    })
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(CliError::Usage(format!("--tol {tol} outside [1e-14, 1e-6]")));
    }
    Ok(())
}

fn rescale(points: &mut [PlotPoint], m: u64, exponent: f64) -> Result<()> {
    if !exponent.is_finite() {
        return Err(CliError::Usage("--rescale-exponent must be finite".into()));
    }
    for p in points {
        p.value = rescale_to_disc_with(p.value, m, exponent);
    }
    Ok(())
}

fn rcfp(a: &RcfpArgs) -> Result<Plot> {
    check_tolerance(a.tol)?;
    if a.element.len() != 2 {
        return Err(CliError::Usage("--element takes exactly two integers a,b".into()));
    }
    let field = field_data(a.field, false)?;
    let element = OkElement::new(&field, a.element[0], a.element[1], a.modulus)?;
    let (r, t) = quotient_order_parts(&field, &element)?;
    let ctx = lattice_context(&field, a.tol)?;
    let mut points = rcfp_plot(&field, &element, a.color_mod, &ctx, a.weber, a.budget)?;
    if a.rescale {
        rescale(&mut points, a.modulus, a.rescale_exponent)?;
    }
    Ok(Plot {
        summary: json!({ "points": points.len(), "r": r, "unit_index": t }),
        points,
        index_len: 2,
        color_modulus: a.color_mod,
    })
}

fn torsion(a: &TorsionArgs) -> Result<Plot> {
    check_tolerance(a.tol)?;
    if !(a.s_max > 0.0 && a.gamma.is_finite()) {
        return Err(CliError::Usage("--s-max must be positive and --gamma finite".into()));
    }
    let field = field_data(a.field, false)?;
    let ctx = lattice_context(&field, a.tol)?;
    let coordinate = match a.coord {
        Coord::X => Coordinate::X,
        Coord::Y => Coordinate::Y,
    };
    let sizing = TorsionSizing {
        s_max: a.s_max,
        gamma: a.gamma,
    };
    let mut points =
        torsion_coordinate_plot(&field, a.modulus, coordinate, &ctx, sizing, a.color_mod, a.budget)?;
    if a.rescale {
        rescale(&mut points, a.modulus, a.rescale_exponent)?;
    }
    Ok(Plot {
        summary: json!({ "points": points.len() }),
        points,
        index_len: 2,
        color_modulus: a.color_mod,
    })
}

fn weyl(a: &WeylArgs) -> Result<Value> {
    let inst = WeylInstance::new(a.n, a.m, &a.matrix, &a.v)?;
    let d = mat_order(inst.matrix())?;
    let alpha = alpha_vector(&inst)?;
    let exact = weyl_sum_exact(&inst);
    let numeric = weyl_sum_numeric(&inst, a.budget)?;
    let scale = (a.n as f64).powi(a.m as i32);
    let agree = (numeric.re - exact as f64).abs() <= 1e-4 * scale && numeric.im.abs() <= 1e-4 * scale;
    Ok(json!({
        "n": a.n,
        "m": a.m,
        "d": d,
        "v": a.v,
        "alpha": alpha,
        "exact": exact,
        "numeric_re": numeric.re,
        "numeric_im": numeric.im,
        "agree": agree,
    }))
}

fn find_element(a: &FindElementArgs) -> Result<Value> {
    let found = find_matrix_with_budget(a.n, a.m, a.d, a.vanish, a.seed, a.budget)?;
    let order = mat_order(&found)?;
    let residue = found.eval_poly(&gauss_periods::laurent::cyclotomic(a.d));
    Ok(json!({
        "n": a.n,
        "m": a.m,
        "d": a.d,
        "matrix": found.entries(),
        "order": order,
        "phi_d_vanishes": check_cyclotomic_vanishing(&found, a.d),
        "phi_d_residue": residue.entries(),
    }))
}
