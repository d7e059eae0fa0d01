//! Report serialization: JSON with sorted keys and 17 significant digits,
//! the pole CSV and an SVG scatter of the disc-mapped poles.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::cee::Diagnostics;
use crate::interp::{NormalizationTranscript, PickVerdict};
use crate::pipeline::{Analysis, Design, Sweep};
use crate::poly::{RatFun, RealPoly};
use crate::problem::{InfinityCondition, RatioSource};
use crate::synth::{ClosedLoopReport, ConditionIiiReport};

pub const SCHEMA_VERSION: u64 = 1;

/// Pretty JSON whose floats are written as `{:.16e}`.
struct ReportFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        ReportFormatter {
            inner: PrettyFormatter::with_indent(b"  "),
        },
    );
    v.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Float as JSON; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex(z: Complex64) -> Value {
    json!({"re": num(z.re), "im": num(z.im)})
}

pub fn poly(p: &RealPoly) -> Value {
    Value::Array(p.coeffs().iter().map(|&c| num(c)).collect())
}

pub fn ratfun(r: &RatFun) -> Value {
    json!({
        "num": poly(r.num()),
        "den": poly(r.den()),
        "proper": r.is_proper(),
        "value_at_infinity": r.value_at_infinity().map_or(Value::Null, num),
    })
}

fn transcript(t: &NormalizationTranscript) -> Value {
    json!({"alpha": num(t.alpha), "gamma": num(t.gamma)})
}

pub fn analysis(a: &Analysis) -> Value {
    let p = &a.problem;
    let zeros: Vec<Value> = p
        .analysis
        .rhp_zeros
        .iter()
        .map(|z| json!({"s": complex(z.s), "multiplicity": z.multiplicity}))
        .collect();
    let constraints: Vec<Value> = p
        .constraints
        .iter()
        .map(|c| {
            json!({
                "node": complex(c.node),
                "order": c.order,
                "source": match c.source {
                    RatioSource::YRatio => "y1/y0",
                    RatioSource::XRatio => "x1/x0",
                },
                "target": c.target.coeffs.iter().map(|&w| complex(w)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let infinity = match &p.infinity_condition {
        InfinityCondition::None => Value::Null,
        InfinityCondition::Required {
            multiplicity,
            target_value,
        } => json!({
            "multiplicity": multiplicity,
            "target_value": target_value.map_or(Value::Null, num),
        }),
    };
    let disc_nodes = |ip: &crate::interp::InterpProblem| -> Value {
        Value::Array(
            ip.nodes
                .iter()
                .map(|n| {
                    json!({
                        "z": complex(n.z),
                        "jet": n.jet.coeffs.iter().map(|&w| complex(w)).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    };
    let pick = match &a.pick {
        None => json!({"solvable": true, "min_eigenvalue": Value::Null}),
        Some(v) => json!({
            "solvable": v.is_solvable(),
            "min_eigenvalue": num(v.min_eigenvalue()),
        }),
    };
    json!({
        "eta_zeros": zeros,
        "m_infinity": p.analysis.m_infinity,
        "multiplicity_confirmed": p.analysis.multiplicity_confirmed,
        "infinity_condition": infinity,
        "constraints": constraints,
        "degree_bound": a.degree_bound(),
        "disc_nodes": a.disc.as_ref().map_or(Value::Null, disc_nodes),
        "normalized_nodes": a.normalized.as_ref().map_or(Value::Null, disc_nodes),
        "normalization": a.normalized.as_ref().map_or(Value::Null, |ip| transcript(&ip.transcript)),
        "pick": pick,
    })
}

fn diagnostics(d: &Diagnostics) -> Value {
    json!({
        "spectral_residual": num(d.spectral_residual),
        "interpolation_residual": num(d.max_interpolation_residual()),
        "positivity_margin": num(d.positivity_margin),
        "spectral_factor_error": num(d.spectral_factor_error),
        "rank_p": d.rank_p,
        "deg_f": d.deg_f,
        "cee_residual": num(d.cee_residual),
        "are_residual": num(d.are_residual),
    })
}

pub fn condition_iii(c: &ConditionIiiReport) -> Value {
    json!({
        "margin": num(c.margin),
        "passed": c.passed(),
        "worst_point": complex(c.worst_point),
        "worst_value": complex(c.worst_value),
        "max_arg_deg": num(c.max_arg_deg),
        "max_arg_omega": num(c.max_arg_omega),
        "shifted_points": c.shifted_points.len(),
    })
}

pub fn closed_loop(c: &ClosedLoopReport) -> Value {
    let rows: Vec<Value> = c
        .results
        .iter()
        .map(|r| {
            json!({
                "lambda": num(r.lambda),
                "stable": r.stable,
                "proper": r.proper,
                "properness_value": r.properness_value.map_or(Value::Null, num),
                "roots_at_infinity": r.roots_at_infinity,
                "char_poly": poly(&r.char_poly),
                "poles": r.s_poles.iter().zip(&r.z_poles)
                    .map(|(&s, &z)| json!({"s": complex(s), "z": complex(z)}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "all_stable": c.all_stable,
        "all_proper": c.all_proper,
        "lambdas": rows,
    })
}

pub fn design(d: &Design) -> Value {
    let solution = match &d.solution {
        None => Value::Null,
        Some(s) => {
            let mut m = Map::new();
            m.insert("a".into(), poly(&s.a));
            m.insert("b".into(), poly(&s.b));
            m.insert("rho".into(), num(s.rho));
            m.insert("rank_p".into(), json!(s.rank_p));
            m.insert(
                "p".into(),
                Value::Array(
                    (0..s.p.nrows())
                        .map(|i| Value::Array((0..s.p.ncols()).map(|j| num(s.p[(i, j)])).collect()))
                        .collect(),
                ),
            );
            m.insert(
                "residuals".into(),
                json!({
                    "spectral": num(s.residuals.spectral),
                    "interpolation": num(s.residuals.interpolation),
                    "cee": num(s.residuals.cee),
                    "are": num(s.residuals.are),
                    "gk": num(s.residuals.gk),
                    "rho_identity": num(s.residuals.rho_identity),
                }),
            );
            m.insert(
                "homotopy".into(),
                json!({
                    "accepted_steps": d.stats.accepted_steps,
                    "rejected_steps": d.stats.rejected_steps,
                    "newton_iterations": d.stats.newton_iterations,
                }),
            );
            if let Some(diag) = &d.diagnostics {
                m.insert("diagnostics".into(), diagnostics(diag));
            }
            Value::Object(m)
        }
    };
    json!({
        "analysis": analysis(&d.analysis),
        "sigma": poly(d.sigma.poly()),
        "sigma_defaulted": d.sigma_defaulted,
        "solution": solution,
        "f": d.lift.as_ref().map_or(Value::Null, |l| ratfun(&l.f)),
        "r": ratfun(d.r()),
        "k": ratfun(d.k()),
        "transport_residual": d.lift.as_ref().map_or(Value::Null, |l| {
            num(l.transport_residuals.iter().cloned().fold(0.0, f64::max))
        }),
        "cancellation_residual": num(d.compensator.cancellation_residual),
        "condition_iii": condition_iii(&d.condition_iii),
        "closed_loop": closed_loop(&d.closed_loop),
        "warnings": d.warnings,
    })
}

pub fn with_header(command: &str, mut body: Value) -> Value {
    if let Value::Object(m) = &mut body {
        m.insert("command".into(), json!(command));
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    body
}

pub fn sweep(s: &Sweep) -> Value {
    let designs: Vec<Value> = s
        .entries
        .iter()
        .map(|e| match &e.outcome {
            Ok(d) => json!({"sigma_zero": num(e.zero), "status": "ok", "design": design(d)}),
            Err(err) => json!({
                "sigma_zero": num(e.zero),
                "status": "error",
                "error": err.to_string(),
                "exit_code": err.exit_code(),
            }),
        })
        .collect();
    json!({
        "designs": designs,
        "skipped": s.skipped.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "min_pair_distance": s.min_pair_distance.map_or(Value::Null, num),
        "pairs_distinct": s.pairs_distinct(),
        "warnings": s.warnings,
    })
}

pub fn pick_summary(v: &Option<PickVerdict>) -> String {
    match v {
        None => "no interpolation conditions".into(),
        Some(PickVerdict::Solvable { min_eigenvalue }) => {
            format!("solvable (Pick min eigenvalue {min_eigenvalue:.6e})")
        }
        Some(PickVerdict::Unsolvable { min_eigenvalue, .. }) => {
            format!("infeasible (Pick min eigenvalue {min_eigenvalue:.6e})")
        }
    }
}

fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pole table; with `key` a leading `sigma_zero` column is added.
pub fn poles_csv(rows: &[(Option<f64>, &ClosedLoopReport)]) -> String {
    let keyed = rows.iter().any(|(k, _)| k.is_some());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["lambda", "re_s", "im_s", "re_z", "im_z"];
    if keyed {
        header.insert(0, "sigma_zero");
    }
    w.write_record(&header).expect("in-memory write");
    for (key, report) in rows {
        for r in &report.results {
            for (s, z) in r.s_poles.iter().zip(&r.z_poles) {
                let mut rec = vec![fmt_f(r.lambda), fmt_f(s.re), fmt_f(s.im), fmt_f(z.re), fmt_f(z.im)];
                if keyed {
                    rec.insert(0, key.map_or(String::new(), fmt_f));
                }
                w.write_record(&rec).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("CSV is UTF-8")
}

/// 1000x1000 scatter of the disc poles with the unit circle at radius 400.
pub fn poles_svg(rows: &[(Option<f64>, &ClosedLoopReport)]) -> String {
    let mut out = String::new();
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n");
    out.push_str("<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n");
    out.push_str("<line x1=\"50\" y1=\"500\" x2=\"950\" y2=\"500\" stroke=\"#bbbbbb\"/>\n");
    out.push_str("<line x1=\"500\" y1=\"50\" x2=\"500\" y2=\"950\" stroke=\"#bbbbbb\"/>\n");
    out.push_str("<circle cx=\"500\" cy=\"500\" r=\"400\" fill=\"none\" stroke=\"black\"/>\n");
    for (_, report) in rows {
        for r in &report.results {
            let hue = 240.0 * (1.0 - r.lambda);
            for z in &r.z_poles {
                if !z.is_finite() {
                    continue;
                }
                let (x, y) = (500.0 + 400.0 * z.re, 500.0 - 400.0 * z.im);
                out.push_str(&format!(
                    "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"none\" stroke=\"hsl({hue:.0},80%,40%)\"><title>lambda={}</title></circle>\n",
                    r.lambda
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits_and_sorted_keys() {
        let v = json!({"b": 0.1, "a": [1.0, -2.5e-300], "c": 3, "d": Value::Null});
        let s = to_json_string(&v);
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64().unwrap(), 0.1);
        assert_eq!(back["c"].as_u64().unwrap(), 3);
        assert_eq!(num(f64::NAN), Value::Null);
    }
}
