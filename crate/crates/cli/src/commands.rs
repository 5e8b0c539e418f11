use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde_json::{json, Value};
use srbm2d::adh::{self, Face};
use srbm2d::domain::{self, DomainCase};
use srbm2d::sim::{self, OracleOpts};
use srbm2d::tail::{self, BoundaryCase, Measure};
use srbm2d::{points, rate, CharPoints, SimConfig, Srbm, SrbmData, Vector2};

use crate::args::{Cli, MeasureArg, What};
use crate::error::CliError;
use crate::output::{num, opt_num, Outcome, Table};

fn v2(v: Vector2) -> Value {
    json!([v.x1, v.x2])
}

fn case_label(c: DomainCase) -> &'static str {
    match c {
        DomainCase::BoxBelowTilde => "box-below-tilde",
        DomainCase::GammaMaxCappedAtTilde => "gamma-max-capped-at-tilde",
        DomainCase::GammaMax => "gamma-max",
    }
}

fn boundary_label(c: BoundaryCase) -> &'static str {
    match c {
        BoundaryCase::Interior => "interior",
        BoundaryCase::Boundary => "boundary",
    }
}

pub fn validate(data: &SrbmData) -> Outcome {
    let report = data.validate();
    let failures: Vec<&str> = report.failures.iter().map(|c| c.name()).collect();
    let mut out = Outcome::new(json!({ "ok": report.ok, "failures": failures }));
    if !report.ok {
        out.failure = Some(CliError::Invalid(report));
    }
    out
}

/// Labeled characteristic points in a fixed order.
fn labeled_points(cp: &CharPoints) -> Vec<(&'static str, Vector2)> {
    vec![
        ("theta_1_r", cp.r(1)),
        ("theta_2_r", cp.r(2)),
        ("theta_1_r_tilde", cp.r_tilde(1)),
        ("theta_2_r_tilde", cp.r_tilde(2)),
        ("theta_1_max", cp.max(1)),
        ("theta_2_max", cp.max(2)),
        ("theta_1_gamma", cp.gamma(1)),
        ("theta_2_gamma", cp.gamma(2)),
    ]
}

pub fn points(s: &Srbm) -> Result<Outcome, CliError> {
    let cp = CharPoints::compute(s);
    let tau = domain::tau(s)?;
    let category = domain::category(s)?;
    let pts = labeled_points(&cp);
    let mut max_gamma = 0.0f64;
    let mut scale = 1.0f64;
    let mut obj = serde_json::Map::new();
    for (label, p) in &pts {
        max_gamma = max_gamma.max(s.gamma(*p).abs());
        scale = scale.max(p.norm() * p.norm());
        obj.insert(label.to_string(), v2(*p));
    }
    let check_ok = max_gamma <= 1e-9 * scale;
    let mut out = Outcome::new(json!({
        "points": obj,
        "tau": v2(tau.tau),
        "tau_in_gamma": tau.tau_in_gamma,
        "category": category.label(),
        "domain_cases": [case_label(domain::domain_case(s, 1)), case_label(domain::domain_case(s, 2))],
        "theta_r_is_max": [points::theta_r_is_max(s, 1), points::theta_r_is_max(s, 2)],
        "max_on_boundary_face": [points::max_on_boundary_face(s, 1), points::max_on_boundary_face(s, 2)],
        "gamma_check": { "max_abs_gamma": max_gamma, "ok": check_ok },
    }));
    let mut t = Table::new("points.csv", &["label", "theta1", "theta2", "gamma"]);
    for (label, p) in &pts {
        t.push(vec![label.to_string(), num(p.x1), num(p.x2), num(s.gamma(*p))]);
    }
    t.push(vec!["tau".into(), num(tau.tau.x1), num(tau.tau.x2), num(s.gamma(tau.tau))]);
    out.tables.push(t);
    if !check_ok {
        out.warnings.push(format!("a characteristic point has |γ| = {max_gamma:e}"));
    }
    Ok(out)
}

/// Directions from --direction, else --polar (angles 0..π/2 inclusive).
fn directions(cli: &Cli, default_polar: Option<usize>) -> Result<Vec<(Option<f64>, Vector2)>, CliError> {
    if !cli.directions.is_empty() && cli.polar.is_some() {
        return Err(CliError::Parse("give either --direction or --polar, not both".into()));
    }
    if !cli.directions.is_empty() {
        return Ok(cli
            .directions
            .iter()
            .map(|&(a, b)| {
                let v = Vector2::new(a, b);
                let angle = (v != Vector2::ZERO && v.is_finite()).then(|| b.atan2(a));
                (angle, v)
            })
            .collect());
    }
    let n = match cli.polar.or(default_polar) {
        Some(n) => n,
        None => return Err(CliError::Parse("give --direction v1,v2 or --polar N".into())),
    };
    if n == 0 {
        return Err(CliError::Parse("--polar needs at least one direction".into()));
    }
    Ok((0..n)
        .map(|k| {
            let t = if n == 1 { 0.0 } else { FRAC_PI_2 * k as f64 / (n - 1) as f64 };
            // exact axes at the ends
            let v = if k == 0 {
                Vector2::new(1.0, 0.0)
            } else if k + 1 == n && n > 1 {
                Vector2::new(0.0, 1.0)
            } else {
                Vector2::new(t.cos(), t.sin())
            };
            (Some(t), v)
        })
        .collect())
}

fn rate_table(s: &Srbm, dirs: &[(Option<f64>, Vector2)], file: &str) -> (Table, Vec<Value>, usize) {
    let mut t = Table::new(file, &["angle", "v1", "v2", "I", "I1", "I2", "case_fired", "error"]);
    let mut rows = Vec::new();
    let mut errors = 0;
    for &(angle, v) in dirs {
        match rate::rate(s, v) {
            Ok(r) => {
                let case = format!("{};{}", r.case_fired[0].label(), r.case_fired[1].label());
                t.push(vec![
                    opt_num(angle),
                    num(v.x1),
                    num(v.x2),
                    num(r.value),
                    num(r.i1),
                    num(r.i2),
                    case.clone(),
                    String::new(),
                ]);
                rows.push(json!({
                    "angle": angle, "v": v2(v), "I": r.value, "I1": r.i1, "I2": r.i2,
                    "case_fired": [r.case_fired[0].label(), r.case_fired[1].label()],
                    "maximizer": v2(r.maximizer),
                }));
            }
            Err(e) => {
                errors += 1;
                let msg = e.to_string();
                t.push(vec![
                    opt_num(angle),
                    num(v.x1),
                    num(v.x2),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    msg.clone(),
                ]);
                rows.push(json!({ "angle": angle, "v": v2(v), "error": msg }));
            }
        }
    }
    (t, rows, errors)
}

pub fn rate(s: &Srbm, cli: &Cli) -> Result<Outcome, CliError> {
    let dirs = directions(cli, None)?;
    let (t, rows, errors) = rate_table(s, &dirs, "rate.csv");
    let mut out = Outcome::new(json!({ "rows": rows }));
    if errors > 0 {
        out.warnings.push(format!("{errors} direction(s) could not be evaluated"));
    }
    out.tables.push(t);
    Ok(out)
}

pub fn product_form(s: &Srbm) -> Result<Outcome, CliError> {
    let pf = adh::product_form(s)?;
    let residual = match pf.alpha {
        Some(a) => Some(adh::max_bar_residual(s, a, 20)?),
        None => None,
    };
    let ev = adh::exit_velocities(s);
    Ok(Outcome::new(json!({
        "is_product_form": pf.is_product_form,
        "skew_symmetric": pf.skew_symmetric,
        "geometric": pf.geometric,
        "alpha": pf.alpha.map(v2),
        "max_bar_residual": residual,
        "theta_1_r_tilde": v2(points::theta_r_tilde(s, 1)),
        "theta_2_r_tilde": v2(points::theta_r_tilde(s, 2)),
        "exit_velocity": [v2(ev.a[0]), v2(ev.a[1])],
        "exit_velocity_tilde": [v2(ev.a_tilde[0]), v2(ev.a_tilde[1])],
        "reflective": [adh::is_reflective(s, Face::F1)?, adh::is_reflective(s, Face::F2)?],
    })))
}

pub fn tail(s: &Srbm, measure: MeasureArg) -> Result<Outcome, CliError> {
    let m = match measure {
        MeasureArg::Nu1 => Measure::Nu1,
        MeasureArg::Nu2 => Measure::Nu2,
    };
    let t = tail::classify_boundary_tail(s, m)?;
    Ok(Outcome::new(json!({
        "measure": m.label(),
        "decay": t.decay,
        "kappa": t.kappa,
        "category": t.category.label(),
        "boundary_case": boundary_label(t.boundary_case),
    })))
}

fn rel_gap(x: f64, want: f64) -> f64 {
    (x - want).abs() / want.abs()
}

pub fn simulate(s: &Srbm, cli: &Cli) -> Result<Outcome, CliError> {
    let config = SimConfig {
        dt: cli.dt,
        horizon: cli.horizon,
        burn_in: cli.burn_in,
        seed: cli.seed,
        replications: cli.replications,
        bins: cli.bins,
        x_max: cli.x_max,
    };
    let r = sim::simulate(s, &config)?;
    let tau = domain::tau(s)?.tau;
    let alpha = adh::product_form(s).ok().and_then(|p| p.alpha);

    let mut tables = Vec::new();
    for i in 0..2 {
        // ν_2 lives on F_2 and is binned by Z_1, ν_1 by Z_2
        let boundary = &r.boundary_tail_log[1 - i];
        let mut t = Table::new(
            &format!("marginal{}.csv", i + 1),
            &["x", "density", "density_se", "log_tail", "log_boundary_tail"],
        );
        for (k, &x) in r.edges.iter().enumerate() {
            t.push(vec![
                num(x),
                r.marginal_hist[i].get(k).map(|&d| num(d)).unwrap_or_default(),
                r.marginal_hist_se[i].get(k).map(|&d| num(d)).unwrap_or_default(),
                opt_num(r.tail_log[i][k]),
                opt_num(boundary[k]),
            ]);
        }
        tables.push(t);
    }

    let sp = &r.replication_spread;
    let md = r.marginal_decay;
    // boundary_decay[0] is ν_1 (decays at τ_2), [1] is ν_2 (decays at τ_1)
    let bd = r.boundary_decay;
    let mut payload = json!({
        "config": {
            "dt": config.dt, "horizon": config.horizon, "burn_in": config.burn_in,
            "seed": config.seed, "replications": config.replications, "bins": config.bins,
            "x_max": r.edges.last().copied(),
        },
        "steps_per_replication": r.steps_per_replication,
        "marginal_decay": md,
        "marginal_decay_se": sp.marginal_decay,
        "boundary_decay": { "nu1": bd[0], "nu2": bd[1] },
        "boundary_decay_se": { "nu1": sp.boundary_decay[0], "nu2": sp.boundary_decay[1] },
        "means": r.means,
        "means_se": sp.means,
        "half_means": r.half_means,
        "y_increments": r.y_increments,
        "y_increments_se": sp.y_increments,
        "tau": v2(tau),
        "alpha": alpha.map(v2),
        "vs_tau": {
            "marginal_decay_rel_gap": [rel_gap(md[0], tau.x1), rel_gap(md[1], tau.x2)],
            "nu1_decay_rel_gap": rel_gap(bd[0], tau.x2),
            "nu2_decay_rel_gap": rel_gap(bd[1], tau.x1),
        },
    });
    if let Some(a) = alpha {
        payload["vs_alpha"] = json!({
            "marginal_decay_rel_gap": [rel_gap(md[0], a.x1), rel_gap(md[1], a.x2)],
            "means_rel_gap": [rel_gap(r.means[0], 1.0 / a.x1), rel_gap(r.means[1], 1.0 / a.x2)],
        });
    }
    let mut out = Outcome::new(payload);
    out.tables = tables;
    Ok(out)
}

pub fn oracle(s: &Srbm, cli: &Cli) -> Result<Outcome, CliError> {
    let dirs = if cli.directions.is_empty() && cli.polar.is_none() {
        [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(a, b)| (Some(f64::atan2(b, a)), Vector2::new(a, b)))
            .collect()
    } else {
        directions(cli, None)?
    };
    let opts = OracleOpts::default();
    let results: Vec<_> = dirs
        .par_iter()
        .map(|&(_, v)| {
            if v == Vector2::ZERO {
                return Ok((0.0, 0.0));
            }
            let closed = rate::rate(s, v)?.value;
            let vp = sim::vp_oracle(s, v, &opts)?;
            Ok((closed, vp))
        })
        .collect();

    let mut t = Table::new("oracle.csv", &["v1", "v2", "closed_form", "oracle", "rel_gap", "error"]);
    let mut rows = Vec::new();
    let mut failure = None;
    let mut max_gap = 0.0f64;
    for (&(_, v), res) in dirs.iter().zip(results) {
        match res {
            Ok((c, o)) => {
                let gap = if c == 0.0 { (o - c).abs() } else { rel_gap(o, c) };
                max_gap = max_gap.max(gap);
                t.push(vec![num(v.x1), num(v.x2), num(c), num(o), num(gap), String::new()]);
                rows.push(json!({ "v": v2(v), "closed_form": c, "oracle": o, "rel_gap": gap }));
            }
            Err(e) => {
                let e: srbm2d::Error = e;
                let msg = e.to_string();
                t.push(vec![num(v.x1), num(v.x2), String::new(), String::new(), String::new(), msg.clone()]);
                rows.push(json!({ "v": v2(v), "error": msg }));
                let ce = CliError::from(e);
                // an infeasible oracle outranks other per-row failures
                if failure.is_none() || matches!(ce, CliError::Infeasible(_)) {
                    failure = Some(ce);
                }
            }
        }
    }
    let mut out = Outcome::new(json!({ "rows": rows, "max_rel_gap": max_gap }));
    out.tables.push(t);
    out.failure = failure;
    Ok(out)
}

/// Horizontal extent of plots: the ellipse's bounding box plus a margin.
fn plot_box(s: &Srbm) -> (f64, f64) {
    let samples = points::ellipse_samples(s, 512);
    let lo = samples.iter().map(|p| p.x1.min(p.x2)).fold(0.0f64, f64::min) - 1.0;
    let hi = samples.iter().map(|p| p.x1.max(p.x2)).fold(0.0f64, f64::max) + 1.0;
    (lo, hi)
}

/// Upper boundary y(x) of a region below a curve, with its right end.
struct Region {
    upper: Box<dyn Fn(f64) -> f64>,
    right: f64,
}

fn region_i(s: &Srbm, i: usize) -> Region {
    let cp = CharPoints::compute(s);
    let tilde = cp.r_tilde(i);
    let xmax = cp.max(1).x1;
    let s1 = s.clone();
    let curve = move |x: f64| domain::gamma_max_upper(&s1, x);
    match (domain::domain_case(s, i), i) {
        (DomainCase::BoxBelowTilde, _) => Region {
            upper: Box::new(move |_| tilde.x2),
            right: tilde.x1,
        },
        (DomainCase::GammaMax, _) => Region {
            upper: Box::new(curve),
            right: xmax,
        },
        (DomainCase::GammaMaxCappedAtTilde, 1) => Region {
            upper: Box::new(curve),
            right: tilde.x1.min(xmax),
        },
        (DomainCase::GammaMaxCappedAtTilde, _) => Region {
            upper: Box::new(move |x| curve(x).min(tilde.x2)),
            right: xmax,
        },
    }
}

fn polyline(name: &str, reg: &Region, lo: f64, breaks: &[f64], t: &mut Table) {
    let n = 256;
    let mut xs: Vec<f64> = (0..n).map(|k| lo + (reg.right - lo) * k as f64 / n as f64).collect();
    xs.push(reg.right);
    xs.extend(breaks.iter().copied().filter(|&b| b > lo && b < reg.right));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut k = 0;
    for x in xs {
        let y = (reg.upper)(x);
        if y.is_finite() {
            t.push(vec![name.into(), k.to_string(), num(x), num(y)]);
            k += 1;
        }
    }
    t.push(vec![name.into(), k.to_string(), num(reg.right), num(lo)]);
}

pub fn plot(s: &Srbm, cli: &Cli) -> Result<Outcome, CliError> {
    let want = |w: What| cli.what == What::All || cli.what == w;
    let cp = CharPoints::compute(s);
    let tau = domain::tau(s)?;
    let (lo, hi) = plot_box(s);
    let mut out = Outcome::new(json!({}));
    let mut files = Vec::new();

    if want(What::Ellipse) {
        let mut t = Table::new("ellipse.csv", &["k", "theta1", "theta2", "gamma"]);
        for (k, p) in points::ellipse_samples(s, 512).into_iter().enumerate() {
            t.push(vec![k.to_string(), num(p.x1), num(p.x2), num(s.gamma(p))]);
        }
        out.tables.push(t);
    }
    if want(What::Rays) {
        let mut t = Table::new("rays.csv", &["ray", "t", "theta1", "theta2"]);
        for i in [1, 2] {
            let p = s.p_vec(i);
            let reach = (hi - lo) / p.norm();
            for tt in [-reach, 0.0, reach] {
                let q = tt * p;
                t.push(vec![i.to_string(), num(tt), num(q.x1), num(q.x2)]);
            }
        }
        out.tables.push(t);
    }
    if want(What::Points) {
        let mut t = Table::new("points.csv", &["label", "theta1", "theta2", "gamma"]);
        for (label, p) in labeled_points(&cp) {
            t.push(vec![label.into(), num(p.x1), num(p.x2), num(s.gamma(p))]);
        }
        t.push(vec!["tau".into(), num(tau.tau.x1), num(tau.tau.x2), num(s.gamma(tau.tau))]);
        out.tables.push(t);
    }
    if want(What::Domains) {
        let mut t = Table::new("domains.csv", &["region", "k", "theta1", "theta2"]);
        let r1 = region_i(s, 1);
        let r2 = region_i(s, 2);
        let breaks = [
            cp.max(2).x1,
            cp.max(1).x1,
            cp.r_tilde(1).x1,
            cp.r_tilde(2).x1,
            tau.tau.x1,
        ];
        polyline("D1", &r1, lo, &breaks, &mut t);
        polyline("D2", &r2, lo, &breaks, &mut t);
        let both = Region {
            right: r1.right.min(r2.right),
            upper: Box::new(move |x| (r1.upper)(x).min((r2.upper)(x))),
        };
        polyline("D", &both, lo, &breaks, &mut t);
        out.tables.push(t);
        out.payload["domain_cases"] = json!([
            case_label(domain::domain_case(s, 1)),
            case_label(domain::domain_case(s, 2))
        ]);
        out.payload["tau"] = v2(tau.tau);
    }
    if want(What::RateProfile) {
        let dirs = directions(cli, Some(90))?;
        let (t, _, _) = rate_table(s, &dirs, "rate.csv");
        out.tables.push(t);
    }
    for t in &out.tables {
        files.push(json!({ "file": t.file, "rows": t.rows.len() }));
    }
    out.payload["files"] = Value::Array(files);
    Ok(out)
}
