use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hvstab_core::combinatorics::{
    asymptotic_ratio, cder_expansion_check, cfun, cfun3_derivative_check, cfun_alt_check, cfun_second_derivative,
    identity_check, item_quad, recurrence_check, reh_pi, reh_pi_closed, reh_pi_quad, representation_check, zrec_check,
    Family,
};
use hvstab_core::ddo::{build_ddo, symbols, truncation_order, Stencil};
use hvstab_core::exactnum::{binom, to_f64};
use hvstab_core::hermite_weno::{hweno_classify, hweno_trace};
use hvstab_core::orderstar::{
    fdm_orderstar, fdm_sector_fraction, fdm_weights, hv_orderstar, hv_sector_fraction, GridSpec, HvSymbol,
    OrderStarGrid,
};
use hvstab_core::simulator::{simulate, InitialCondition, Scheme, SimConfig, SimError};
use hvstab_core::stability::{barrier_bound, classify, stability_table, Branch, Factored, StabilityVerdict};
use hvstab_core::trigpoly::to_cos_poly;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::args::{Command, Format, HwenoAction, SimScheme, StarScheme, Suite};
use crate::error::CliError;
use crate::output::{
    ensure_parent, envelope, float, laurent, params, path_value, poly, rational, resolve_out, sidecar, to_pretty_json,
    write_json,
};

const SECTOR_RADIUS: f64 = 0.05;
const SECTOR_SAMPLES: usize = 720;

pub fn run(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Coeffs { stencil, format } => coeffs(stencil, format),
        Command::Classify { stencil, format } => classify_cmd(stencil, format),
        Command::Table { max_l, format } => table(max_l, format),
        Command::Barrier { max_r, format } => barrier(max_r, format),
        Command::Rehpi {
            stencil,
            item,
            t,
            format,
        } => rehpi(stencil, item, t, format),
        Command::Identities { suite, range, format } => identities(suite, range, format),
        Command::Hweno { action } => hweno(action),
        Command::Orderstar {
            scheme,
            stencil,
            window,
            res,
            out,
            format,
        } => orderstar(scheme, stencil, window, res, out, format),
        Command::Simulate {
            scheme,
            stencil,
            n,
            cfl,
            tfinal,
            ic,
            out,
            format,
        } => simulate_cmd(scheme, stencil, n, cfl, tfinal, ic, out, format),
    }
}

fn only(format: Format, allowed: &[Format], command: &str) -> Result<(), CliError> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(CliError::Validation(
            format!("{command} does not support --format {format:?}").to_lowercase(),
        ))
    }
}

fn stencil_of((l, r): (u32, u32)) -> Result<Stencil, CliError> {
    Stencil::from_lr(l, r).map_err(CliError::invalid)
}

fn stencil_value(s: &Stencil) -> Value {
    let q = s.quad();
    json!({"L": s.left(), "R": s.right(), "l": q.l, "r": q.r, "lp": q.lp, "rp": q.rp})
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(&row).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn coeffs(st: (u32, u32), format: Format) -> Result<String, CliError> {
    let s = stencil_of(st)?;
    let d = build_ddo(&s);
    let (verified, _) = truncation_order(&d);
    if verified != d.order {
        return Err(CliError::Internal(format!(
            "order {} claimed, {verified} verified",
            d.order
        )));
    }
    match format {
        Format::Csv => {
            let rows = d
                .alpha
                .iter()
                .map(|(k, v)| vec!["alpha".into(), k.to_string(), v.to_string()]);
            let rows = rows.chain(
                d.beta
                    .iter()
                    .map(|(k, v)| vec!["beta".into(), k.to_string(), v.to_string()]),
            );
            csv_text(&["kind", "k", "value"], rows)
        }
        Format::Pretty => {
            let mut out = format!("stencil {s}, order {}\n", d.order);
            for (k, v) in &d.alpha {
                writeln!(out, "  alpha[{k:>3}] = {v}").unwrap();
            }
            for (k, v) in &d.beta {
                writeln!(out, "  beta[{k:>3}]  = {v}").unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let results = json!({
                "stencil": stencil_value(&s),
                "alpha": laurent(&d.alpha),
                "beta": laurent(&d.beta),
                "order": d.order,
                "verified_order": verified,
            });
            Ok(to_pretty_json(&envelope(
                "coeffs",
                params([("stencil", json!([st.0, st.1]))]),
                results,
            )))
        }
    }
}

fn factored(f: &Factored) -> Value {
    json!({"polynomial": poly(&f.full), "one_minus_x_power": f.mult, "residual": poly(&f.residual)})
}

fn verdict_value(v: &StabilityVerdict) -> Value {
    json!({
        "stencil": stencil_value(&v.stencil),
        "status": v.status.name(),
        "symbol": v.status.symbol(),
        "stable": v.status.is_stable(),
        "upwind": v.upwind,
        "witness_cos_theta": v.witness.as_ref().map(rational),
        "touches_zero": v.touches_zero,
        "trace_condition": factored(&v.conditions.trace),
        "second_condition": factored(&v.conditions.second),
    })
}

fn classify_cmd(st: (u32, u32), format: Format) -> Result<String, CliError> {
    only(format, &[Format::Json, Format::Pretty], "classify")?;
    let v = classify(&stencil_of(st)?);
    if format == Format::Pretty {
        let w = v
            .witness
            .as_ref()
            .map(|w| format!(", witness cos θ = {w}"))
            .unwrap_or_default();
        return Ok(format!("{}: {}{w}\n", v.stencil, v.status.name()));
    }
    Ok(to_pretty_json(&envelope(
        "classify",
        params([("stencil", json!([st.0, st.1]))]),
        verdict_value(&v),
    )))
}

fn table(max_l: u32, format: Format) -> Result<String, CliError> {
    if max_l == 0 {
        return Err(CliError::Validation("max-L must be at least 1".into()));
    }
    let rows = stability_table(max_l);
    match format {
        Format::Csv => csv_text(
            &["L", "R", "status", "symbol"],
            rows.iter().map(|v| {
                vec![
                    v.stencil.left().to_string(),
                    v.stencil.right().to_string(),
                    v.status.name().into(),
                    v.status.symbol().into(),
                ]
            }),
        ),
        Format::Pretty => {
            let mut out = String::from("L\\R");
            for r in 0..max_l {
                write!(out, " {r:>3}").unwrap();
            }
            out.push('\n');
            for l in 1..=max_l {
                write!(out, "{l:>3}").unwrap();
                for v in rows.iter().filter(|v| v.stencil.left() == l) {
                    write!(out, " {:>3}", v.status.symbol()).unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let entries: Vec<Value> = rows
                .iter()
                .map(|v| json!({"L": v.stencil.left(), "R": v.stencil.right(), "status": v.status.name(), "symbol": v.status.symbol()}))
                .collect();
            Ok(to_pretty_json(&envelope(
                "table",
                params([("max_L", json!(max_l))]),
                json!({"entries": entries}),
            )))
        }
    }
}

fn barrier(max_r: u64, format: Format) -> Result<String, CliError> {
    let rows: Vec<_> = (0..=max_r).map(barrier_bound).collect();
    let branch = |b: Branch| match b {
        Branch::Linear => "linear",
        Branch::SquareRoot => "sqrt",
    };
    match format {
        Format::Csv => csv_text(
            &["R", "linear", "sqrt_bound", "active_branch", "max_gap"],
            rows.iter().map(|b| {
                vec![
                    b.right.to_string(),
                    b.linear.to_string(),
                    format!("{:.16e}", 9.0 + (b.radicand as f64).sqrt()),
                    branch(b.active_branch()).into(),
                    b.max_gap().to_string(),
                ]
            }),
        ),
        Format::Pretty => {
            let mut out = String::from("  R  bound  branch  max L-R\n");
            for b in &rows {
                writeln!(
                    out,
                    "{:>3}  {:>5.2}  {:>6}  {:>7}",
                    b.right,
                    b.value_f64(),
                    branch(b.active_branch()),
                    b.max_gap()
                )
                .unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let entries: Vec<Value> = rows
                .iter()
                .map(|b| {
                    json!({
                        "R": b.right,
                        "linear": b.linear,
                        "sqrt_radicand": b.radicand,
                        "bound": float(b.value_f64()),
                        "active_branch": branch(b.active_branch()),
                        "max_gap": b.max_gap(),
                    })
                })
                .collect();
            Ok(to_pretty_json(&envelope(
                "barrier",
                params([("max_R", json!(max_r))]),
                json!({"entries": entries}),
            )))
        }
    }
}

fn rehpi(stencil: Option<(u32, u32)>, item: Option<u32>, t: Option<u32>, format: Format) -> Result<String, CliError> {
    only(format, &[Format::Json, Format::Pretty], "rehpi")?;
    let (parameters, results) = match (stencil, item, t) {
        (Some(st), _, _) => {
            let s = stencil_of(st)?;
            let v = reh_pi(&s);
            (
                params([("stencil", json!([st.0, st.1]))]),
                json!({"stencil": stencil_value(&s), "value": rational(&v), "sign": sign(&v)}),
            )
        }
        (None, Some(item), Some(t)) => {
            let q = item_quad(item, t).map_err(CliError::invalid)?;
            let direct = reh_pi_quad(&q);
            let closed = reh_pi_closed(item, t as u64).map_err(CliError::invalid)?;
            let results = json!({
                "quadruple": [q.l, q.r, q.lp, q.rp],
                "value": rational(&direct),
                "closed_form": rational(&closed),
                "agree": direct == closed,
                "sign": sign(&direct),
            });
            (params([("item", json!(item)), ("t", json!(t))]), results)
        }
        _ => return Err(CliError::Validation("give --stencil L,R or --item I --t T".into())),
    };
    if format == Format::Pretty {
        return Ok(format!(
            "Re H(pi) = {}\n",
            results["value"].as_str().unwrap_or_default()
        ));
    }
    Ok(to_pretty_json(&envelope("rehpi", parameters, results)))
}

fn sign(q: &hvstab_core::Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Cpi => "cpi",
        Suite::AltForm => "alt-form",
        Suite::Derivative => "derivative",
        Suite::Representation => "representation",
        Suite::Zrec => "zrec",
        Suite::Harmonic => "harmonic",
        Suite::Recurrence => "recurrence",
        Suite::Asymptotic => "asymptotic",
    }
}

fn default_range(s: Suite) -> (u64, u64) {
    match s {
        Suite::Cpi => (0, 12),
        Suite::AltForm => (0, 8),
        Suite::Derivative => (1, 8),
        Suite::Representation => (0, 6),
        Suite::Zrec => (1, 12),
        Suite::Harmonic => (0, 50),
        Suite::Recurrence => (0, 40),
        Suite::Asymptotic => (50, 60),
    }
}

fn case(identity: &str, p: Value, pass: bool) -> Value {
    json!({"identity": identity, "params": p, "pass": pass})
}

/// Cases for one value of the swept parameter.
fn suite_cases(s: Suite, v: u64) -> Result<Vec<Value>, CliError> {
    let samples = [0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5, std::f64::consts::PI];
    let mut out = Vec::new();
    match s {
        Suite::Cpi => {
            for n in 0..=v {
                out.push(case(
                    "c_at_pi",
                    json!({"m": v, "n": n}),
                    cfun(v, n as i64).eval_at_pi() == binom(v, n as i64),
                ));
            }
        }
        Suite::AltForm => {
            for n in 0..=v {
                out.push(case(
                    "half_angle",
                    json!({"m": v, "n": n}),
                    cfun_alt_check(v, n, &samples),
                ));
            }
        }
        Suite::Derivative => {
            for n in 1..=v {
                let ok = cfun(v, n as i64).derivative(2) == cfun_second_derivative(v, n);
                out.push(case("second_derivative", json!({"m": v, "n": n}), ok));
            }
            for j in 0..=v {
                out.push(case(
                    "derivative_expansion",
                    json!({"n": v, "j": j}),
                    cder_expansion_check(v, j),
                ));
            }
            for m2 in 1..=v {
                for n in 1..=v.min(m2) as i64 {
                    out.push(case(
                        "three_index",
                        json!({"m1": v, "m2": m2, "n": n}),
                        cfun3_derivative_check(v, m2, n),
                    ));
                }
            }
        }
        Suite::Representation => {
            for family in Family::ALL {
                for m in 1..=4 {
                    let ok = representation_check(family, v, m).map_err(|e| CliError::Internal(e.to_string()))?;
                    out.push(case(
                        "representation",
                        json!({"family": family.name(), "t": v, "m": m}),
                        ok,
                    ));
                }
            }
        }
        Suite::Zrec => {
            let n = v as i64;
            for j in 0..n {
                for k in 0..=(j + 1) {
                    out.push(case(
                        "z_recurrence",
                        json!({"n": n, "j": j, "k": k}),
                        zrec_check(j, k, n),
                    ));
                }
            }
        }
        Suite::Harmonic => out.push(case("harmonic_sum", json!({"n": v}), identity_check(v))),
        Suite::Recurrence => out.push(case("harmonic_recurrence", json!({"n": v}), recurrence_check(v))),
        Suite::Asymptotic => {
            for m in [3u32, 5, 7] {
                let val = reh_pi_quad(&Family::Sym.quad(v as u32, m));
                let want = if m % 4 == 1 { 1 } else { -1 };
                let ratio = asymptotic_ratio(m as u64, v).map_err(|e| CliError::Internal(e.to_string()))?;
                out.push(json!({
                    "identity": "asymptotic_sign",
                    "params": {"m": m, "t": v},
                    "pass": sign(&val) == want,
                    "ratio": float(to_f64(&ratio)),
                }));
            }
        }
    }
    Ok(out)
}

fn identities(s: Suite, range: Option<(u64, u64)>, format: Format) -> Result<String, CliError> {
    only(format, &[Format::Json], "identities")?;
    let (lo, hi) = range.unwrap_or_else(|| default_range(s));
    if s == Suite::Derivative && lo == 0 {
        return Err(CliError::Validation("derivative suite starts at 1".into()));
    }
    let mut cases = Vec::new();
    for v in lo..=hi {
        cases.extend(suite_cases(s, v)?);
    }
    let failed = cases.iter().filter(|c| c["pass"] != Value::Bool(true)).count();
    let results = json!({"suite": suite_name(s), "cases": cases, "passed": cases.len() - failed, "failed": failed});
    let text = to_pretty_json(&envelope(
        "identities",
        params([("suite", json!(suite_name(s))), ("range", json!([lo, hi]))]),
        results,
    ));
    if failed > 0 {
        print!("{text}");
        return Err(CliError::Internal(format!("{failed} identity cases failed")));
    }
    Ok(text)
}

fn hweno(action: HwenoAction) -> Result<String, CliError> {
    match action {
        HwenoAction::Classify { l, r, format } => {
            only(format, &[Format::Json, Format::Pretty], "hweno classify")?;
            check_hweno(l, r)?;
            let rep = hweno_classify(l, r);
            if format == Format::Pretty {
                return Ok(format!(
                    "({l},{r}): {}, trace at pi = {}\n",
                    rep.verdict.name(),
                    rep.at_pi
                ));
            }
            let p = to_cos_poly(&rep.trace).map_err(|e| CliError::Internal(e.to_string()))?;
            let results = json!({
                "verdict": rep.verdict.name(),
                "trace_at_pi": rational(&rep.at_pi),
                "witness_cos_theta": rep.witness.as_ref().map(rational),
                "trace_polynomial": poly(&p),
            });
            Ok(to_pretty_json(&envelope(
                "hweno classify",
                params([("l", json!(l)), ("r", json!(r))]),
                results,
            )))
        }
        HwenoAction::Trace { l, r, at, format } => {
            only(format, &[Format::Json], "hweno trace")?;
            check_hweno(l, r)?;
            let trace = hweno_trace(l, r);
            let (value, exact) = match at.trim() {
                "pi" => (rational(&trace.eval_at_pi()), true),
                "0" => (rational(&trace.eval_at_zero()), true),
                other => {
                    let theta: f64 = other
                        .parse()
                        .map_err(|_| CliError::Validation(format!("--at expects pi, 0 or an angle, got '{other}'")))?;
                    (float(trace.eval(theta)), false)
                }
            };
            let p = to_cos_poly(&trace).map_err(|e| CliError::Internal(e.to_string()))?;
            let results = json!({"at": at, "value": value, "exact": exact, "trace_polynomial": poly(&p)});
            Ok(to_pretty_json(&envelope(
                "hweno trace",
                params([("l", json!(l)), ("r", json!(r)), ("at", json!(at))]),
                results,
            )))
        }
    }
}

fn check_hweno(l: u32, r: u32) -> Result<(), CliError> {
    if l + r == 0 {
        return Err(CliError::Validation("l + r must be at least 1".into()));
    }
    Ok(())
}

fn write_grid_csv(path: &Path, grid: &OrderStarGrid) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let io = |e: csv::Error| CliError::io(path, e);
    w.write_record(["x", "y", "sheet", "shaded"]).map_err(io)?;
    let spec = &grid.spec;
    for (s, sheet) in grid.sheets.iter().enumerate() {
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let shaded = if sheet.shaded[j][i] { "1" } else { "0" };
                w.write_record([
                    &format!("{:.16e}", spec.x(i)),
                    &format!("{:.16e}", spec.y(j)),
                    &(s + 1).to_string(),
                    shaded,
                ])
                .map_err(io)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn orderstar(
    scheme: StarScheme,
    (l, r): (u32, u32),
    (x0, x1): (f64, f64),
    (nx, ny): (usize, usize),
    out: Option<PathBuf>,
    format: Format,
) -> Result<String, CliError> {
    only(format, &[Format::Json], "orderstar")?;
    let spec = GridSpec::new(x0, x1, nx, ny).map_err(CliError::invalid)?;
    let (grid, fraction, residuals) = match scheme {
        StarScheme::Fdm => {
            if l + r == 0 {
                return Err(CliError::Validation("l + r must be at least 1".into()));
            }
            let w = fdm_weights(l, r).map_err(|e| CliError::Internal(e.to_string()))?;
            (
                fdm_orderstar(&w, &spec),
                fdm_sector_fraction(&w, SECTOR_RADIUS, SECTOR_SAMPLES),
                Vec::new(),
            )
        }
        StarScheme::Hv => {
            let sym = symbols(&build_ddo(&stencil_of((l, r))?));
            let grid = hv_orderstar(&sym, &spec);
            let hv = HvSymbol::new(&sym);
            let res: Vec<f64> = grid.branch_points.iter().map(|z| hv.discriminant(*z).norm()).collect();
            (grid, hv_sector_fraction(&sym, SECTOR_RADIUS, SECTOR_SAMPLES), res)
        }
    };
    let csv_path = resolve_out(out.as_deref(), "orderstar.csv");
    let side = sidecar(&csv_path, "branch_points");
    write_grid_csv(&csv_path, &grid)?;
    let points: Vec<Value> = grid
        .branch_points
        .iter()
        .zip(&residuals)
        .map(|(z, d)| json!({"re": float(z.re), "im": float(z.im), "discriminant_abs": float(*d)}))
        .collect();
    write_json(&side, &json!({"branch_points": points}))?;
    let sheets: Vec<Value> = grid
        .sheets
        .iter()
        .enumerate()
        .map(|(s, sh)| json!({"sheet": s + 1, "shaded_count": sh.shaded_count(), "axis_shaded_count": sh.axis_shaded_count()}))
        .collect();
    let scheme_name = match scheme {
        StarScheme::Hv => "hv",
        StarScheme::Fdm => "fdm",
    };
    let results = json!({
        "csv": path_value(&csv_path),
        "branch_points_file": path_value(&side),
        "sheets": sheets,
        "branch_point_count": points.len(),
        "origin_sector_fraction": float(fraction),
    });
    let parameters = params([
        ("scheme", json!(scheme_name)),
        ("stencil", json!([l, r])),
        ("window", json!([float(x0), float(x1)])),
        ("res", json!([nx, ny])),
    ]);
    Ok(to_pretty_json(&envelope("orderstar", parameters, results)))
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    scheme: SimScheme,
    (l, r): (u32, u32),
    n: usize,
    cfl: f64,
    tfinal: f64,
    ic: InitialCondition,
    out: Option<PathBuf>,
    format: Format,
) -> Result<String, CliError> {
    only(format, &[Format::Json], "simulate")?;
    let scheme = match scheme {
        SimScheme::Hv => Scheme::Hv,
        SimScheme::Hweno => Scheme::Hweno,
    };
    let cfg = SimConfig {
        scheme,
        left: l,
        right: r,
        n,
        cfl,
        t_final: tfinal,
        ic,
    };
    cfg.validate().map_err(CliError::invalid)?;
    let parameters = params([
        ("scheme", json!(scheme.name())),
        ("stencil", json!([l, r])),
        ("N", json!(n)),
        ("cfl", float(cfl)),
        ("tfinal", float(tfinal)),
        ("ic", json!(ic.to_string())),
    ]);
    let csv_path = resolve_out(out.as_deref(), "run.csv");
    let side = sidecar(&csv_path, "summary");
    let results = match simulate(&cfg) {
        Ok(res) => {
            ensure_parent(&csv_path)?;
            let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
            let io = |e: csv::Error| CliError::io(&csv_path, e);
            w.write_record(["t", "l2_norm"]).map_err(io)?;
            for (t, v) in res.times.iter().zip(&res.l2_norm) {
                w.write_record([format!("{t:.16e}"), format!("{v:.16e}")]).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::io(&csv_path, e))?;
            json!({
                "status": "completed",
                "csv": path_value(&csv_path),
                "growth_rate": float(res.growth_rate),
                "final_error": float(res.final_error),
                "initial_norm": float(res.l2_norm[0]),
                "final_norm": float(*res.l2_norm.last().unwrap_or(&f64::NAN)),
                "dt": float(res.dt),
                "steps": res.steps,
            })
        }
        Err(SimError::Diverged { time, growth_rate }) => {
            eprintln!("warning: solution diverged at t = {time}");
            json!({"status": "diverged", "diverged_at": float(time), "growth_rate": float(growth_rate)})
        }
        Err(e) => return Err(CliError::invalid(e)),
    };
    let env = envelope("simulate", parameters, results);
    write_json(&side, &env)?;
    let mut m: Map<String, Value> = env.as_object().cloned().unwrap_or_default();
    if let Some(Value::Object(r)) = m.get_mut("results") {
        r.insert("summary_file".into(), path_value(&side));
    }
    Ok(to_pretty_json(&Value::Object(m)))
}
