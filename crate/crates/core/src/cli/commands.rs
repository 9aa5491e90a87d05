//! Execution of the single-shot commands.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::output::{csv_table, json_report, num, opt_num, to_value};
use super::{
    invalid, CapillaryArgs, CircleArgs, Command, CurveArg, CylinderArgs, Format, GeometryArgs, NumericArgs,
    RadiusArgs, Report, SpaceArgs, VerifyArgs,
};
use crate::capillary::{circular_boundary_frame, contact_angle_profile, profile_oscillation};
use crate::cylinder::{cylinder_geometry, CircleData, NonCircleData};
use crate::error::Result;
use crate::geometry::{
    berger_embedding, christoffel_fd, connection_table, frame_orthonormality_residual, killing_residual,
    random_point, random_unit, ConnectionTable, Point, SpaceParams, DEFAULT_FD_STEP, FD_ROOM_FRACTION,
};
use crate::spectrum_analytic::{
    classify, critical_length, critical_length_branches, spectrum, BoundaryCondition, TruncatedCylinder,
};
use crate::spectrum_numeric::{
    assemble, instability_certificate_on, morse_index, solve_smallest, verify, weak_index,
};

pub(crate) fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::CriticalLength(a) => critical_length_cmd(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::NumericSpectrum(a) => numeric_cmd(a),
        Command::Sweep(a) => super::sweep::run_sweep(a),
        Command::Capillary(a) => capillary_cmd(a),
        Command::GeometryCheck(a) => geometry_cmd(a),
    }
}

fn space(a: &SpaceArgs) -> Result<SpaceParams> {
    SpaceParams::new(a.kappa, a.tau)
}

fn circle(s: &SpaceArgs, r: &RadiusArgs) -> Result<CircleData> {
    let sp = space(s)?;
    match (r.rho, r.r) {
        (_, Some(r)) => CircleData::from_r(sp, r),
        (rho, None) => CircleData::from_rho(sp, rho.unwrap_or(1.0)),
    }
}

/// Uses twice the critical length when no length is given.
fn cylinder(s: &SpaceArgs, r: &RadiusArgs, length: Option<f64>, bc: BoundaryCondition) -> Result<TruncatedCylinder> {
    let c = circle(s, r)?;
    let length = length.unwrap_or_else(|| 2.0 * critical_length(&c));
    TruncatedCylinder::new(c, length, bc)
}

fn circle_fields(c: &CircleData) -> Value {
    json!({
        "kappa": c.kappa(),
        "tau": c.tau(),
        "rho": c.rho(),
        "r": c.r(),
        "kappa_g": c.kappa_g(),
        "R": c.big_r(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn single_row(fields: &[(&str, String)]) -> Result<String> {
    let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
    csv_table(&header, &[fields.iter().map(|(_, v)| v.clone()).collect()])
}

fn critical_length_cmd(a: &CircleArgs) -> Result<Report> {
    let c = circle(&a.space, &a.radius)?;
    let l0 = critical_length(&c);
    let branches = critical_length_branches(c.kappa(), c.tau(), c.rho());
    let residual = (l0 - branches).abs() / l0;
    let berger = c.space().fiber_period();
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_report(
            "critical-length",
            merge(
                circle_fields(&c),
                json!({
                    "L0": l0,
                    "L0_half": 0.5 * l0,
                    "L0_branches": branches,
                    "agreement_residual": residual,
                    "berger_period": berger,
                }),
            ),
        ),
        Format::Csv => single_row(&[
            ("kappa", num(c.kappa())),
            ("tau", num(c.tau())),
            ("rho", num(c.rho())),
            ("r", num(c.r())),
            ("L0", num(l0)),
            ("L0_half", num(0.5 * l0)),
            ("L0_branches", num(branches)),
            ("agreement_residual", num(residual)),
            ("berger_period", opt_num(berger)),
        ])?,
    };
    Ok(Report { text, pass: true })
}

fn classify_cmd(a: &CylinderArgs) -> Result<Report> {
    let tc = cylinder(&a.space, &a.radius, Some(a.length), a.bc)?;
    let v = classify(&tc)?;
    let s = spectrum(&tc, a.n_max)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_report(
            "classify",
            merge(
                circle_fields(tc.circle()),
                json!({
                    "L": tc.length(),
                    "bc": tc.bc().name(),
                    "L0": v.l0,
                    "axisym_verdict": v.axisym.name(),
                    "general_verdict": v.general.name(),
                    "lambda2_criterion": v.lambda2_criterion,
                    "berger_period": v.berger_period,
                    "lambda1": s.lambda1,
                    "lambda2": s.lambda2,
                    "morse_index": s.morse_index,
                    "weak_index_axisym": s.weak_index_axisym,
                    "eigenvalues": to_value(&s.eigenvalues),
                }),
            ),
        ),
        Format::Csv => single_row(&[
            ("L", num(tc.length())),
            ("L0", num(v.l0)),
            ("axisym_verdict", v.axisym.name().into()),
            ("general_verdict", v.general.name().into()),
            ("lambda1", num(s.lambda1)),
            ("lambda2", num(s.lambda2)),
            ("morse_index", s.morse_index.to_string()),
            ("weak_index_axisym", s.weak_index_axisym.to_string()),
        ])?,
    };
    Ok(Report { text, pass: true })
}

fn verify_cmd(a: &VerifyArgs) -> Result<Report> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(invalid(format!("--tol must be positive, got {}", a.tol)));
    }
    let tc = cylinder(&a.space, &a.radius, a.length, a.bc)?;
    let report = verify(&tc, a.grid, a.n_max, a.tol)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_report(
            "verify",
            merge(
                circle_fields(tc.circle()),
                merge(json!({ "L": tc.length(), "bc": tc.bc().name() }), to_value(&report)),
            ),
        ),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .modes
                .iter()
                .map(|m| {
                    vec![
                        m.n.to_string(),
                        num(m.analytic),
                        num(m.numeric),
                        num(m.numeric_fine),
                        num(m.rel_err),
                        num(m.rel_err_fine),
                        opt_num(m.order),
                        m.pass.to_string(),
                    ]
                })
                .collect();
            csv_table(&["n", "analytic", "numeric", "numeric_fine", "rel_err", "rel_err_fine", "order", "pass"], &rows)?
        }
    };
    Ok(Report { text, pass: report.pass })
}

fn numeric_cmd(a: &NumericArgs) -> Result<Report> {
    if a.n_max == 0 {
        return Err(invalid("--n-max must be at least 1"));
    }
    let tc = cylinder(&a.space, &a.radius, a.length, a.bc)?;
    let df = assemble(&tc, a.grid)?;
    let k = a.n_max.min(df.dof());
    let eig = solve_smallest(&df, k)?;
    let morse = morse_index(&df)?;
    let weak = weak_index(&df, 8)?;
    let cert = instability_certificate_on(&tc, a.grid)?;
    let analytic = spectrum(&tc, 2)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_report(
            "numeric-spectrum",
            merge(
                circle_fields(tc.circle()),
                json!({
                    "L": tc.length(),
                    "bc": tc.bc().name(),
                    "grid": a.grid.to_string(),
                    "dof": df.dof(),
                    "zero_tolerance": df.zero_tolerance(),
                    "eigenvalues": eig.eigenvalues,
                    "worst_residual": eig.worst_residual,
                    "morse_index": morse,
                    "weak_index": weak,
                    "morse_index_axisym": analytic.morse_index,
                    "weak_index_axisym": analytic.weak_index_axisym,
                    "certificate": to_value(&cert),
                }),
            ),
        ),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                eig.eigenvalues.iter().enumerate().map(|(i, l)| vec![(i + 1).to_string(), num(*l)]).collect();
            csv_table(&["index", "eigenvalue"], &rows)?
        }
    };
    Ok(Report { text, pass: true })
}

/// Tolerance on the circular boundary identities.
const CAPILLARY_TOL: f64 = 1e-10;

fn capillary_cmd(a: &CapillaryArgs) -> Result<Report> {
    let sp = space(&a.space)?;
    match a.curve {
        CurveArg::Circle => capillary_circle(a, sp),
        CurveArg::Geodesic => {
            if a.y0.is_some() || a.rho.is_some() || a.r.is_some() {
                return Err(invalid("a geodesic takes no --rho, --r or --y0"));
            }
            let curve = NonCircleData::geodesic(sp)?;
            let half = sp.disk_radius().map_or(2.0, |d| 0.95 * d);
            capillary_profile(a, &curve, (-half, half))
        }
        CurveArg::Equidistant => {
            let (Some(r), Some(y0)) = (a.r, a.y0) else {
                return Err(invalid("an offset circle needs both --r and --y0"));
            };
            if a.rho.is_some() {
                return Err(invalid("an offset circle takes --r, not --rho"));
            }
            let curve = NonCircleData::offset_circle(sp, r, y0)?;
            capillary_profile(a, &curve, (0.0, 2.0 * PI))
        }
    }
}

fn capillary_circle(a: &CapillaryArgs, sp: SpaceParams) -> Result<Report> {
    if a.y0.is_some() || a.s_range.is_some() {
        return Err(invalid("--y0 and --s-range do not apply to circles"));
    }
    let radius = RadiusArgs { rho: a.rho, r: a.r };
    let c = circle(&SpaceArgs { kappa: sp.kappa(), tau: sp.tau() }, &radius)?;
    let n = a.samples.unwrap_or(16).max(1);
    let frames = (0..n)
        .map(|i| circular_boundary_frame(&c, 2.0 * PI * c.big_r() * i as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    let worst = |f: fn(&crate::capillary::BoundaryFrame) -> f64| {
        frames.iter().map(f).fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m })
    };
    let cos_gamma = worst(|f| f.cos_gamma);
    let atilde = worst(|f| f.atilde_nn);
    let q = worst(|f| f.q);
    let pass = cos_gamma.abs() < CAPILLARY_TOL && atilde.abs() < CAPILLARY_TOL && q.abs() < CAPILLARY_TOL;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let points: Vec<Value> = frames
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    json!({
                        "s": 2.0 * PI * c.big_r() * i as f64 / n as f64,
                        "cos_gamma": f.cos_gamma,
                        "gamma": f.gamma,
                        "atilde_nn": f.atilde_nn,
                        "a_nn": f.a_nn,
                        "q": f.q,
                    })
                })
                .collect();
            json_report(
                "capillary",
                merge(
                    circle_fields(&c),
                    json!({
                        "curve": "circle",
                        "samples": n,
                        "max_abs_cos_gamma": cos_gamma.abs(),
                        "max_abs_atilde_nn": atilde.abs(),
                        "q": q,
                        "orthogonal": cos_gamma.abs() < CAPILLARY_TOL,
                        "points": points,
                    }),
                ),
            )
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = frames
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let s = 2.0 * PI * c.big_r() * i as f64 / n as f64;
                    vec![num(s), num(f.cos_gamma), num(f.atilde_nn), num(f.q)]
                })
                .collect();
            csv_table(&["s", "cos_gamma", "atilde_nn", "q"], &rows)?
        }
    };
    Ok(Report { text, pass })
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || invalid(format!("--s-range must look like LO:HI, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn capillary_profile(a: &CapillaryArgs, curve: &NonCircleData, default: (f64, f64)) -> Result<Report> {
    let (lo, hi) = match &a.s_range {
        Some(s) => parse_pair(s)?,
        None => default,
    };
    let profile = contact_angle_profile(curve, lo, hi, a.samples.unwrap_or(101))?;
    let oscillation = profile_oscillation(&profile);
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows: Vec<Vec<String>> = profile.iter().map(|p| vec![num(p.s), num(p.cos_gamma)]).collect();
            csv_table(&["s", "cos_gamma"], &rows)?
        }
        Format::Json => json_report(
            "capillary",
            json!({
                "curve": to_value(&curve.kind()),
                "kappa": curve.space().kappa(),
                "tau": curve.space().tau(),
                "kappa_g": curve.kappa_g(),
                "y0": curve.y0(),
                "r": curve.r(),
                "oscillation": oscillation,
                "profile": to_value(&profile),
            }),
        ),
    };
    Ok(Report { text, pass: true })
}

pub(crate) const ORTHONORMALITY_TOL: f64 = 1e-12;
pub(crate) const CONNECTION_TOL: f64 = 1e-6;
pub(crate) const KILLING_TOL: f64 = 1e-6;
pub(crate) const BERGER_TOL: f64 = 1e-12;
/// det of the cylinder metric is 1 up to the rounding of its (1,1) entry.
pub(crate) const DET_ULPS: f64 = 4.0;

fn table_scale(t: &ConnectionTable) -> f64 {
    1.0 + t.0.iter().flatten().map(|v| v.max_abs()).fold(0.0, f64::max)
}

fn geometry_cmd(a: &GeometryArgs) -> Result<Report> {
    let sp = space(&a.space)?;
    if a.samples == 0 {
        return Err(invalid("--samples must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let points: Vec<Point> = (0..a.samples).map(|_| random_point(&sp, &mut rng)).collect();

    let mut orthonormality = 0.0f64;
    let mut connection = 0.0f64;
    let mut killing = 0.0f64;
    let (mut coarse, mut fine) = (0.0, 0.0);
    for p in &points {
        orthonormality = orthonormality.max(frame_orthonormality_residual(&sp, p)?);
        let exact = connection_table(&sp, p)?;
        let scale = table_scale(&exact);
        connection = connection.max(exact.max_abs_diff(&christoffel_fd(&sp, p, DEFAULT_FD_STEP)?) / scale);
        // below the boundary cap on the FD step, so that h really halves
        let room = sp.disk_radius().map_or(f64::INFINITY, |d| d - p.x.hypot(p.y));
        let h = 4e-3f64.min(0.8 * FD_ROOM_FRACTION * room);
        coarse += exact.max_abs_diff(&christoffel_fd(&sp, p, h)?) / scale;
        fine += exact.max_abs_diff(&christoffel_fd(&sp, p, 0.5 * h)?) / scale;
        let extra = [random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng)];
        killing = killing.max(killing_residual(&sp, p, &extra, DEFAULT_FD_STEP)?);
    }
    // summed errors at h and h/2; skipped when the FD path is exact
    let order = (coarse > 1e-11 * points.len() as f64).then(|| (coarse / fine).log2());
    let order_ok = order.is_none_or(|p| (1.5..=2.5).contains(&p));

    let mut det = 0.0f64;
    let mut det_ok = true;
    for _ in 0..a.samples {
        let c = match sp.disk_radius() {
            Some(d) => CircleData::from_r(sp, d * rng.random_range(0.01..0.99)),
            None => match sp.kappa() > 0.0 {
                true => CircleData::from_rho(
                    sp,
                    PI / sp.kappa().sqrt() * rng.random_range(0.01..0.99),
                ),
                false => CircleData::from_rho(sp, rng.random_range(0.05..5.0)),
            },
        }?;
        let g = cylinder_geometry(&c).first_ff;
        let residual = (g.determinant() - 1.0).abs();
        det = det.max(residual);
        det_ok &= residual <= DET_ULPS * f64::EPSILON * g[(0, 0)];
    }

    let berger = match sp.fiber_period() {
        Some(period) => {
            let mut worst = 0.0f64;
            for p in &points {
                let u = berger_embedding(&sp, p)?;
                let v = berger_embedding(&sp, &Point::new(p.x, p.y, p.z + period))?;
                worst = u.iter().zip(v).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
            }
            Some(worst)
        }
        None => None,
    };

    let checks = [
        ("frame_orthonormality", orthonormality < ORTHONORMALITY_TOL),
        ("connection_vs_fd", connection < CONNECTION_TOL),
        ("richardson_order", order_ok),
        ("killing", killing < KILLING_TOL),
        ("det_first_ff", det_ok),
        ("berger_periodicity", berger.is_none_or(|b| b < BERGER_TOL)),
    ];
    let pass = checks.iter().all(|(_, ok)| *ok);
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => json_report(
            "geometry-check",
            json!({
                "kappa": sp.kappa(),
                "tau": sp.tau(),
                "seed": a.seed,
                "samples": a.samples,
                "residuals": {
                    "frame_orthonormality": orthonormality,
                    "connection_vs_fd": connection,
                    "richardson_order": order,
                    "killing": killing,
                    "det_first_ff": det,
                    "berger_periodicity": berger,
                },
                "checks": checks.iter().map(|(k, ok)| (k.to_string(), Value::from(*ok))).collect::<serde_json::Map<_, _>>(),
                "pass": pass,
            }),
        ),
        Format::Csv => {
            let rows = vec![
                vec!["frame_orthonormality".into(), num(orthonormality), checks[0].1.to_string()],
                vec!["connection_vs_fd".into(), num(connection), checks[1].1.to_string()],
                vec!["richardson_order".into(), opt_num(order), checks[2].1.to_string()],
                vec!["killing".into(), num(killing), checks[3].1.to_string()],
                vec!["det_first_ff".into(), num(det), checks[4].1.to_string()],
                vec!["berger_periodicity".into(), opt_num(berger), checks[5].1.to_string()],
            ];
            csv_table(&["check", "residual", "pass"], &rows)?
        }
    };
    Ok(Report { text, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_radius_is_one() {
        let c = circle(&SpaceArgs { kappa: 0.0, tau: 0.0 }, &RadiusArgs { rho: None, r: None }).unwrap();
        assert_eq!(c.rho(), 1.0);
    }

    #[test]
    fn default_length_is_twice_critical() {
        let tc = cylinder(
            &SpaceArgs { kappa: 0.0, tau: 0.0 },
            &RadiusArgs { rho: Some(1.0), r: None },
            None,
            BoundaryCondition::Dirichlet,
        )
        .unwrap();
        assert!((tc.length() - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("-1.5:2").unwrap(), (-1.5, 2.0));
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("a:1").is_err());
    }
}
