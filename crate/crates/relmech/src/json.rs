//! JSON and text renderings. Every rational is written as a string.

use std::fmt::Write as _;

use relmech_core::certificates::{CertificateReport, Constant, FeasibilityResult, Inequality, PaymentPolytope};
use relmech_core::properties::{Counterexample, PropertyVerdict, Witness};
use relmech_core::rational::to_decimal;
use relmech_core::{Allocation, Instance, Rational};
use serde_json::{json, Value};

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

/// Assignment in input job order, workloads, makespan.
pub fn allocation(rule: &str, instance: &Instance, allocation: &Allocation, makespan: Option<&Rational>) -> Value {
    let mut out = json!({
        "rule": rule,
        "jobs": rats(instance.jobs()),
        "bids": rats(instance.bids()),
        "workloads": rats(allocation.workloads()),
    });
    match allocation {
        Allocation::Deterministic(a) => {
            let mut by_input = vec![0usize; instance.job_count()];
            for (j, &id) in instance.job_ids().iter().enumerate() {
                by_input[id] = a.job_to_machine()[j];
            }
            out["assignment"] = json!(by_input);
        }
        Allocation::Expected(e) => {
            let mut by_input = vec![Value::Null; instance.job_count()];
            for (j, &id) in instance.job_ids().iter().enumerate() {
                let dist: serde_json::Map<String, Value> =
                    e.job_distributions()[j].iter().map(|(i, p)| (i.to_string(), rat(p))).collect();
                by_input[id] = Value::Object(dist);
            }
            out["distribution"] = Value::Array(by_input);
        }
    }
    if let Some(m) = makespan {
        out["makespan"] = rat(m);
    }
    out
}

fn witness(w: &Witness) -> Value {
    match w {
        Witness::Permutation(p) => json!({"kind": "permutation", "permutation": p}),
        Witness::Envy { machine, envies } => json!({"kind": "envy", "machine": machine, "envies": envies}),
        Witness::Machine(i) => json!({"kind": "machine", "machine": i}),
        Witness::Deviation { machine, true_bid, reported } => {
            json!({"kind": "deviation", "machine": machine, "true_bid": rat(true_bid), "reported": rat(reported)})
        }
        Witness::Increase { machine, lower, higher } => {
            json!({"kind": "increase", "machine": machine, "lower": rat(lower), "higher": rat(higher)})
        }
        Witness::Swap { first, second } => json!({"kind": "swap", "first": first, "second": second}),
        Witness::Scale { factor, machine } => json!({"kind": "scale", "factor": rat(factor), "machine": machine}),
    }
}

pub fn counterexample(c: &Counterexample) -> Value {
    json!({
        "bids": rats(&c.bids),
        "witness": witness(&c.witness),
        "lhs": rat(&c.lhs),
        "relation": c.relation.symbol(),
        "rhs": rat(&c.rhs),
    })
}

pub fn verdict(v: &PropertyVerdict) -> Value {
    json!({
        "property": v.property.short_name(),
        "pass": v.passed,
        "checked": v.checked,
        "counterexample": v.counterexample.as_ref().map(counterexample),
    })
}

fn inequality(i: &Inequality) -> Value {
    json!({
        "label": i.label,
        "lhs": rat(&i.lhs),
        "relation": i.relation.symbol(),
        "rhs": rat(&i.rhs),
        "holds": i.holds(),
    })
}

fn constant(c: &Constant) -> Value {
    match c {
        Constant::Exact(r) => json!({"kind": "exact", "value": rat(r)}),
        Constant::Flag(b) => json!({"kind": "flag", "value": b}),
        Constant::Log { value, enclosure } => json!({
            "kind": "log",
            "rational": rat(&value.rational),
            "logs": value.logs.iter().map(|(c, a)| json!({"coeff": rat(c), "arg": rat(a)})).collect::<Vec<_>>(),
            "symbolic": value.render(),
            "enclosure": [rat(&enclosure.lo), rat(&enclosure.hi)],
            "decimal": to_decimal(&enclosure.lo, 12),
        }),
    }
}

pub fn report(r: &CertificateReport) -> Value {
    json!({
        "name": r.name,
        "verified": r.verified,
        "inputs": r.inputs.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "constants": r.constants.iter().map(|(k, c)| {
            let mut v = constant(c);
            v["name"] = json!(k);
            v
        }).collect::<Vec<_>>(),
        "inequalities": r.inequalities.iter().map(inequality).collect::<Vec<_>>(),
        "claims": r.claims.iter().map(inequality).collect::<Vec<_>>(),
        "failures": r.failures,
        "notes": r.notes,
    })
}

pub fn report_text(r: &CertificateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", r.name, if r.verified { "verified" } else { "NOT verified" });
    for (k, v) in &r.inputs {
        let _ = writeln!(s, "  input {k} = {v}");
    }
    for (k, c) in &r.constants {
        let shown = match c {
            Constant::Exact(v) => v.to_string(),
            Constant::Flag(b) => b.to_string(),
            Constant::Log { value, enclosure } => {
                format!("{} in [{}, {}]", value.render(), to_decimal(&enclosure.lo, 12), to_decimal(&enclosure.hi, 12))
            }
        };
        let _ = writeln!(s, "  {k} = {shown}");
    }
    for (tag, list) in [("require", &r.inequalities), ("claim", &r.claims)] {
        for i in list {
            let mark = if i.holds() { "ok" } else { "FAILS" };
            let _ = writeln!(s, "  {tag} [{mark}] {}: {} {} {}", i.label, i.lhs, i.relation.symbol(), i.rhs);
        }
    }
    for f in &r.failures {
        let _ = writeln!(s, "  failure: {f}");
    }
    for n in &r.notes {
        let _ = writeln!(s, "  note: {n}");
    }
    s
}

pub fn feasibility(polytope: &PaymentPolytope, result: &FeasibilityResult, verified: bool) -> Value {
    let mut out = json!({
        "profiles": polytope.profiles.len(),
        "variables": polytope.system.variables,
        "constraints": polytope.system.constraints.len(),
        "feasible": result.is_feasible(),
        "verified": verified,
        "note": "feasibility on a finite grid does not imply feasibility on the continuum; infeasibility does transfer",
    });
    match result {
        FeasibilityResult::Feasible { payments } => {
            out["witness"] = polytope
                .profiles
                .iter()
                .zip(payments)
                .map(|(b, p)| json!({"bids": rats(b), "payments": rats(p)}))
                .collect();
        }
        FeasibilityResult::Infeasible { core, .. } => {
            out["core"] = core
                .iter()
                .map(|&k| {
                    let c = &polytope.system.constraints[k];
                    json!({
                        "label": c.label,
                        "coeffs": c.coeffs.iter().map(|(j, a)| json!([j, rat(a)])).collect::<Vec<_>>(),
                        "sense": format!("{:?}", c.sense),
                        "rhs": rat(&c.rhs),
                    })
                })
                .collect();
        }
    }
    out
}
