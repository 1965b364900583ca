use critrad_core::cover::{critical_covering, overlap_audit, subcritical_covering, BallFamily};
use critrad_core::exponent::log_holder_constants;
use critrad_core::maximal::{hl_maximal, local_maximal, theta_maximal};
use critrad_core::norm::{luxemburg_norm, modular};
use critrad_core::rho::{
    reverse_holder_constant, rho_from_potential, verify_critical, Clamp, PotentialRho,
};
use critrad_core::verify::{
    box_ladder, boundedness_ratios, default_test_family, necessity_bound, schrodinger_experiment,
    Operator, SchrodingerSettings,
};
use critrad_core::weights::{class_report, sweep_balls, WeightPair};
use critrad_core::{Ball, Domain, GridFunction, RhoFunction};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{fmt_f64, Output};
use crate::problem::Problem;

/// What a command hands back for the report.
#[derive(Debug)]
pub struct Outcome {
    pub summary: Value,
    pub seeds: Vec<u64>,
}

fn outcome(summary: Value) -> Outcome {
    Outcome { summary, seeds: Vec::new() }
}

fn clamp_code(c: Clamp) -> f64 {
    match c {
        Clamp::None => 0.0,
        Clamp::Below => -1.0,
        Clamp::Above => 1.0,
    }
}

fn ball_rows(family: &BallFamily, dim: usize, extra: &[Vec<String>]) -> Vec<Vec<String>> {
    family
        .balls()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut row = vec![k.to_string()];
            row.extend(b.center[..dim].iter().map(|&x| fmt_f64(x)));
            row.push(fmt_f64(b.radius));
            if let Some(e) = extra.get(k) {
                row.extend(e.iter().cloned());
            }
            row
        })
        .collect()
}

fn ball_header(dim: usize, extra: &[&str]) -> Vec<String> {
    let mut h = vec!["ball".to_string()];
    h.extend((1..=dim).map(|k| format!("c{k}")));
    h.push("radius".into());
    h.extend(extra.iter().map(|s| s.to_string()));
    h
}

pub fn norm(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let p = pb.exponent()?;
    let f = pb.function()?;
    let w = pb.weight()?;
    let fw = f.mul(&w)?;
    let res = luxemburg_norm(&fw, &p)?;
    let holder = log_holder_constants(&p, None);
    out.grid("norm", &pb.domain, &[("f", f.values()), ("w", w.values()), ("p", p.as_slice())])?;
    Ok(outcome(json!({
        "norm": res.value,
        "iterations": res.iterations,
        "bracket": [res.bracket.0, res.bracket.1],
        "modular_at_norm": if res.value > 0.0 { modular(&fw, &p, res.value) } else { 0.0 },
        "p_minus": p.p_minus(),
        "p_plus": p.p_plus(),
        "log_holder": holder,
    })))
}

pub fn maximal(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let f = pb.function()?;
    let radii = pb.radii()?;
    let measure = pb.measure()?;
    let rho = pb.rho()?;
    let mut cols: Vec<(String, GridFunction)> = vec![("f".into(), f.clone())];
    cols.push(("M".into(), hl_maximal(&f, &radii, measure)?));
    if let Some(rho) = &rho {
        cols.push(("Mloc".into(), local_maximal(&f, rho, &radii, measure)?));
        for t in pb.thetas()? {
            cols.push((format!("Mtheta({t})"), theta_maximal(&f, rho, t, &radii, measure)?));
        }
    }
    let named: Vec<(&str, &[f64])> = cols.iter().map(|(n, g)| (n.as_str(), g.values())).collect();
    out.grid("maximal", &pb.domain, &named)?;
    let maxima: serde_json::Map<String, Value> =
        cols.iter().map(|(n, g)| (n.clone(), json!(g.max()))).collect();
    Ok(outcome(json!({ "max": maxima, "radii": radii.len() })))
}

/// `rho` from the config, or the critical radius of the potential.
fn critical_radius(pb: &Problem) -> Result<(RhoFunction, Option<PotentialRho>), CliError> {
    if let Some(v) = pb.potential()? {
        let pr = rho_from_potential(&v, &pb.potential_radii()?)?;
        return Ok((pr.rho.clone(), Some(pr)));
    }
    Ok((pb.require_rho()?, None))
}

pub fn rho(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let (rho, potential) = critical_radius(pb)?;
    let seed = pb.seed()?;
    let constants = verify_critical(&rho, &pb.n0_grid()?, pb.pair_budget()?, seed)?;
    let mut summary = json!({
        "source": if potential.is_some() { "potential" } else { "expression" },
        "rho_min": rho.values().min(),
        "rho_max": rho.values().max(),
        "constants": constants,
    });
    let mut cols: Vec<(&str, Vec<f64>)> = vec![("rho", rho.as_slice().to_vec())];
    if let Some(pr) = &potential {
        summary["clamped_cells"] = json!(pr.clamped_cells());
        cols.push(("clamp", pr.clamp.iter().map(|&c| clamp_code(c)).collect()));
        if let Some(q) = pb.raw.get::<f64>("run", "q")? {
            let balls = pb.sweep(&pb.domain)?;
            let v = pb.potential()?.expect("potential present");
            summary["reverse_holder"] = json!(reverse_holder_constant(&v, q, balls.balls())?);
        }
    }
    let named: Vec<(&str, &[f64])> = cols.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    out.grid("rho", &pb.domain, &named)?;
    Ok(Outcome { summary, seeds: vec![seed] })
}

pub fn cover(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let (rho, _) = critical_radius(pb)?;
    let beta = pb.positive("beta", 2.0)?;
    let family = critical_covering(&rho);
    let audit = overlap_audit(&family, &pb.domain, beta);
    let dim = pb.domain.dim();
    out.table("cover", &ball_header(dim, &[]), ball_rows(&family, dim, &[]))?;
    let mut summary = json!({ "critical": { "balls": family.len(), "overlap": audit } });
    if let Some(x0) = pb.raw.list::<f64>("run", "x0")? {
        let radius: f64 = pb.raw.require("run", "radius")?;
        let b0 = Ball::new(&x0, radius)
            .map_err(|e| CliError::Validation(format!("[run] x0/radius: {e}")))?;
        let seed = pb.seed()?;
        let constants = verify_critical(&rho, &pb.n0_grid()?, pb.pair_budget()?, seed)?;
        let cov = subcritical_covering(&b0, &rho, beta, &constants)?;
        let over = overlap_audit(&cov.family, &pb.domain, 1.0);
        out.table("subcritical", &ball_header(dim, &[]), ball_rows(&cov.family, dim, &[]))?;
        summary["subcritical"] = json!({
            "b0": b0,
            "constants": constants,
            "balls": cov.family.len(),
            "delta0": cov.delta0,
            "c1": cov.c1,
            "count_bound": cov.count_bound,
            "covers_b0": cov.covers_b0,
            "max_overlap": over.max_overlap,
        });
        return Ok(Outcome { summary, seeds: vec![seed] });
    }
    Ok(outcome(summary))
}

pub fn weight_class(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let p = pb.exponent()?;
    let w = pb.weight()?;
    let rho = match pb.rho()? {
        Some(r) => r,
        None => RhoFunction::constant(pb.domain, 2.0 * pb.domain.half_width())?,
    };
    let balls = pb.sweep(&pb.domain)?;
    let (stride, interior, sweep_radii) = pb.sweep_spec()?;
    let refined = sweep_balls(&pb.domain, (stride / 2).max(1), &sweep_radii.refined(), interior)?;
    let cap = pb.raw.get::<f64>("run", "cap")?;
    let report = class_report(&w, &p, &rho, &pb.thetas()?, &balls, Some(&refined), cap)?;

    let q = WeightPair::new(&w, &p)?.quotients(balls.balls())?;
    let extra: Vec<Vec<String>> = balls
        .balls()
        .iter()
        .zip(&q)
        .map(|(b, &v)| {
            let sub = b.radius <= rho.at_point(&b.center).unwrap_or(0.0);
            vec![fmt_f64(v), (sub as u8).to_string()]
        })
        .collect();
    let dim = pb.domain.dim();
    out.table("balls", &ball_header(dim, &["quotient", "subcritical"]), ball_rows(&balls, dim, &extra))?;
    Ok(outcome(serde_json::to_value(&report)?))
}

fn operators(pb: &Problem) -> Result<Vec<Operator>, CliError> {
    let names: Vec<String> = pb
        .raw
        .list("run", "operators")?
        .unwrap_or_else(|| vec!["m".into(), "mloc".into(), "theta".into()]);
    let mut ops = Vec::new();
    for n in names {
        match n.to_ascii_lowercase().as_str() {
            "m" => ops.push(Operator::Hl),
            "mloc" => ops.push(Operator::Local),
            "theta" => ops.extend(pb.thetas()?.into_iter().map(Operator::Theta)),
            other => {
                let line = pb.raw.line("run", "operators").unwrap_or(0);
                return Err(CliError::Validation(format!(
                    "line {line}: [run] operators: unknown operator `{other}` (expected m, mloc or theta)"
                )));
            }
        }
    }
    Ok(ops)
}

pub fn verify(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let ops = operators(pb)?;
    let seed = pb.seed()?;
    let random = pb.raw.get::<usize>("run", "random")?.unwrap_or(4);
    let levels = pb.raw.get::<usize>("run", "levels")?.unwrap_or(1).max(1);
    let measure = pb.measure()?;
    let ladder: Vec<Domain> = box_ladder(&pb.domain, levels)
        .map_err(|e| CliError::Validation(format!("[run] levels: {e}")))?;

    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut class = Value::Null;
    let mut necessity = Vec::new();
    for (level, d) in ladder.iter().enumerate() {
        let lp = pb.on(*d);
        let p = lp.exponent()?;
        let w = lp.weight()?;
        let rho = lp.require_rho()?;
        let radii = lp.radii()?;
        let balls = lp.sweep(d)?;
        let family = default_test_family(&w, balls.balls(), random, seed)?;
        for (k, op) in ops.iter().enumerate() {
            let rep = boundedness_ratios(*op, &family, &p, &w, &rho, &radii, measure)?;
            for (id, r) in &rep.ratios {
                rows.push(vec![rep.operator.clone(), level.to_string(), id.clone(), fmt_f64(*r)]);
            }
            if level == 0 {
                reports.push(rep);
            } else {
                let m = rep.max_ratio;
                reports[k].refinement_trend.push(m);
            }
        }
        if level == 0 {
            for r in &mut reports {
                let m = r.max_ratio;
                r.refinement_trend.push(m);
            }
            let thetas = pb.thetas()?;
            let cr = class_report(&w, &p, &rho, &thetas, &balls, None, pb.raw.get("run", "cap")?)?;
            class = serde_json::to_value(&cr)?;
            if let Some(eta) = pb.raw.get::<f64>("run", "eta")? {
                let constants = verify_critical(&rho, &pb.n0_grid()?, pb.pair_budget()?, seed)?;
                for op in &ops {
                    let nb = necessity_bound(*op, &p, &w, &rho, eta, balls.balls(), &constants, &radii, measure)?;
                    necessity.push(json!({
                        "operator": nb.operator,
                        "eta": nb.eta,
                        "theta": nb.theta,
                        "max_quotient": nb.max_quotient,
                        "measured_norm": nb.measured_norm,
                        "domination_constant": nb.domination_constant,
                        "holds": nb.holds,
                    }));
                }
            }
        }
    }
    let header: Vec<String> = ["operator", "level", "function", "ratio"].iter().map(|s| s.to_string()).collect();
    out.table("ratios", &header, rows)?;
    let experiments: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "operator": r.operator,
                "max_ratio": r.max_ratio,
                "skipped": r.skipped,
                "refinement_trend": r.refinement_trend,
            })
        })
        .collect();
    Ok(Outcome {
        summary: json!({
            "experiments": experiments,
            "class_constants": class,
            "necessity": necessity,
            "ladder": ladder.iter().map(|d| d.half_width()).collect::<Vec<_>>(),
        }),
        seeds: vec![seed],
    })
}

pub fn schrodinger(pb: &Problem, out: &mut Output) -> Result<Outcome, CliError> {
    let v = pb
        .potential()?
        .ok_or_else(|| CliError::Validation("missing [functions] v".into()))?;
    let q = pb.raw.get::<f64>("run", "q")?.unwrap_or(2.0);
    if !(q > 1.0) {
        return Err(CliError::Validation("[run] q must exceed 1".into()));
    }
    let p = pb.exponent()?;
    let w = pb.weight()?;
    let radii = pb.radii()?;
    let rho_radii = pb.potential_radii()?;
    let balls = pb.sweep(&pb.domain)?;
    let seed = pb.seed()?;
    let random = pb.raw.get::<usize>("run", "random")?.unwrap_or(4);
    let family = default_test_family(&w, balls.balls(), random, seed)?;
    let settings = SchrodingerSettings {
        rh_balls: balls.balls(),
        rho_radii: &rho_radii,
        n0_grid: &pb.n0_grid()?,
        pair_budget: pb.pair_budget()?,
        seed,
        thetas: &pb.thetas()?,
        family: &family,
        measure: pb.measure()?,
    };
    let (report, pr) = schrodinger_experiment(&v, q, &p, &w, &radii, &settings)?;
    let clamp: Vec<f64> = pr.clamp.iter().map(|&c| clamp_code(c)).collect();
    out.grid("rho", &pb.domain, &[("v", v.values()), ("rho", pr.rho.as_slice()), ("clamp", &clamp)])?;
    let mut rows = Vec::new();
    for rep in std::iter::once(&report.local).chain(&report.theta) {
        for (id, r) in &rep.ratios {
            rows.push(vec![rep.operator.clone(), id.clone(), fmt_f64(*r)]);
        }
    }
    let header: Vec<String> = ["operator", "function", "ratio"].iter().map(|s| s.to_string()).collect();
    out.table("ratios", &header, rows)?;
    Ok(Outcome { summary: serde_json::to_value(&report)?, seeds: vec![seed] })
}
