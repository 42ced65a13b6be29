//! `relmech allocate | check | certify`.
//!
//! Exit codes: 0 success or pass, 1 property failure or unverified
//! certificate, 2 usage or parse error, 3 search budget exhausted.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relmech_core::allocations::at_sample;
use relmech_core::certificates::{
    default_epsilon, lemma6_g, payment_polytope_feasible, prop12_verify, theorem1_harness, theorem5_certificate,
    theorem7_certificate, verify_feasibility,
};
use relmech_core::properties::{check_envy_free, check_ir, check_local_efficiency};
use relmech_core::sampling::InstanceSampler;
use relmech_core::{
    makespan, parse_rational, Allocation, AllocationRule, Error, Instance, PaymentScheme, Property, PropertyVerdict,
    Rule,
};
use serde_json::{json, Value};

use crate::batch;
use crate::io::{load_instance, parse_assignments, parse_list, InstanceFile};
use crate::json;

#[derive(Debug, Parser)]
#[command(name = "relmech", version, about = "Mechanisms for scheduling on related machines with strategic machines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an allocation rule on an instance file.
    Allocate(AllocateArgs),
    /// Check a property of a mechanism on instances or on explicit vectors.
    Check(CheckArgs),
    /// Produce a certificate report.
    Certify(CertifyArgs),
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    /// lpt-star, at-expected, at-sample, vcg, opt or two-opt
    pub rule: String,
    pub instance: PathBuf,
    /// Seed for at-sample; falls back to the file's seed, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// le, ef, ir, truthful, monotone, anonymous, scalable or ratio
    pub property: String,
    /// Rule name; its payments come from --payments.
    pub mechanism: Option<String>,
    pub instance: Option<PathBuf>,
    /// Check this many random instances instead of a file.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub min_machines: usize,
    #[arg(long, default_value_t = 4)]
    pub max_machines: usize,
    #[arg(long, default_value_t = 6)]
    pub max_jobs: usize,
    /// Deviation grid, comma separated rationals.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub scalars: Option<String>,
    /// clarke, ef-chain, cost, zero or tight
    #[arg(long)]
    pub payments: Option<String>,
    #[arg(long)]
    pub workloads: Option<String>,
    #[arg(long)]
    pub bids: Option<String>,
    #[arg(long)]
    pub payment_values: Option<String>,
    /// Lower-bound construction parameters, e.g. `m=3 c=3/2 eps=1/2`.
    #[arg(long, num_args = 1..)]
    pub theorem1: Option<Vec<String>>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs_parallel: usize,
    /// Ratio tables as CSV (rule,m,n,ratio).
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// theorem5, theorem7, theorem1, lemma6, prop12 or polytope
    pub name: String,
    #[arg(long, default_value = "8,16,32")]
    pub a: String,
    #[arg(long, default_value = "1/1000000")]
    pub tol: String,
    #[arg(long, default_value = "vcg")]
    pub mechanism: String,
    #[arg(long)]
    pub payments: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value = "3/2")]
    pub c: String,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, default_value = "3")]
    pub k: String,
    #[arg(long, default_value = "2,1")]
    pub jobs: String,
    #[arg(long, default_value = "1,2,5")]
    pub samples: String,
    /// lemma6 defaults to two-opt, polytope to lpt-star.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long, default_value = "1,2")]
    pub grid: String,
    #[arg(long, default_value_t = 2)]
    pub machines: usize,
    /// prop12: number of samples. polytope: largest profile count.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub text: bool,
}

/// Exit code for an error raised while running a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(Error::NotTruthful(_)) => 1,
        _ => 2,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Allocate(a) => allocate(a, out),
        Command::Check(c) => check(c, out),
        Command::Certify(c) => certify(c, out),
    }
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn allocate(args: AllocateArgs, out: &mut dyn Write) -> Result<i32> {
    let (instance, file_seed) = load_instance(&args.instance)?;
    let (allocation, name) = if args.rule == "at-sample" {
        let seed = args.seed.or(file_seed).unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (Allocation::Deterministic(at_sample(&instance, &mut rng)?), "at-sample".to_string())
    } else {
        let mut rule: Rule = args.rule.parse()?;
        if let (Rule::Opt { .. }, Some(b)) = (&rule, args.budget) {
            rule = Rule::Opt { budget: b };
        }
        (rule.allocate(&instance)?, rule.name().to_string())
    };
    let span = match &allocation {
        Allocation::Deterministic(a) => Some(makespan(a, instance.bids())?),
        Allocation::Expected(_) => None,
    };
    if args.text {
        writeln!(out, "rule {name}")?;
        writeln!(out, "workloads {}", join(allocation.workloads()))?;
        if let Some(s) = &span {
            writeln!(out, "makespan {s}")?;
        }
    } else {
        emit(out, &json::allocation(&name, &instance, &allocation, span.as_ref()))?;
    }
    Ok(0)
}

fn join(v: &[relmech_core::Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_scheme(s: &Option<String>) -> Result<Option<PaymentScheme>> {
    s.as_deref().map(|s| s.parse::<PaymentScheme>().map_err(Into::into)).transpose()
}

fn instances(args: &CheckArgs) -> Result<Vec<Instance>> {
    match (&args.instance, args.random) {
        (Some(path), None) => Ok(vec![load_instance(path)?.0]),
        (None, Some(n)) => {
            if args.min_machines == 0 || args.min_machines > args.max_machines || args.max_jobs == 0 {
                bail!("need 1 <= --min-machines <= --max-machines and --max-jobs >= 1");
            }
            let sampler = InstanceSampler::default().machines(args.min_machines, args.max_machines).jobs(1, args.max_jobs);
            Ok(batch::random_instances(n, args.seed, &sampler))
        }
        (Some(_), Some(_)) => bail!("give either an instance file or --random, not both"),
        (None, None) => bail!("give an instance file or --random N"),
    }
}

fn verdict_output(out: &mut dyn Write, text: bool, verdict: &PropertyVerdict) -> Result<i32> {
    if text {
        match &verdict.counterexample {
            None => writeln!(out, "PASS {}", verdict.property)?,
            Some(c) => writeln!(out, "FAIL {}: {:?} gives {}", verdict.property, c.witness, c.inequality())?,
        }
    } else {
        emit(out, &json::verdict(verdict))?;
    }
    Ok(if verdict.passed { 0 } else { 1 })
}

fn check(args: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    if args.property == "ratio" {
        return check_ratio(args, out);
    }
    let property: Property = args.property.parse()?;

    if let (Some(w), Some(b)) = (&args.workloads, &args.bids) {
        let workloads = parse_list(w)?;
        let bids = parse_list(b)?;
        let verdict = match property {
            Property::LocalEfficiency => check_local_efficiency(&bids, &workloads)?,
            Property::EnvyFree | Property::IndividuallyRational => {
                let pays = parse_list(args.payment_values.as_deref().context("--payment-values is required")?)?;
                if property == Property::EnvyFree {
                    check_envy_free(&bids, &workloads, &pays)?
                } else {
                    check_ir(&bids, &workloads, &pays)?
                }
            }
            other => bail!("property {other} needs a mechanism, not explicit vectors"),
        };
        return verdict_output(out, args.text, &verdict);
    }

    let name = args.mechanism.as_deref().ok_or_else(|| anyhow!("a mechanism name is required"))?;
    let mechanism = batch::mechanism(name, parse_scheme(&args.payments)?)?;
    let grid = args.grid.as_deref().map(parse_list).transpose()?;
    let scalars = args.scalars.as_deref().map(parse_list).transpose()?.unwrap_or_else(batch::default_scalars);
    let instances = instances(&args)?;
    let results = batch::check_many(property, &mechanism, &instances, grid.as_deref(), &scalars, args.jobs_parallel);

    let mut failures = 0;
    let mut first: Option<(usize, PropertyVerdict)> = None;
    for (k, r) in results.into_iter().enumerate() {
        let v = r.with_context(|| format!("instance {k}"))?;
        if !v.passed {
            failures += 1;
            if first.is_none() {
                first = Some((k, v));
            }
        }
    }
    if args.text {
        match &first {
            None => writeln!(out, "PASS {property} {name} on {} instances", instances.len())?,
            Some((k, v)) => {
                let c = v.counterexample.as_ref().expect("failed verdict has a counterexample");
                writeln!(out, "FAIL {property} {name}: {failures} of {} instances; instance {k}: {:?} gives {}", instances.len(), c.witness, c.inequality())?
            }
        }
    } else {
        emit(
            out,
            &json!({
                "property": property.short_name(),
                "mechanism": name,
                "instances": instances.len(),
                "pass": failures == 0,
                "failures": failures,
                "first_failure": first.as_ref().map(|(k, v)| json!({
                    "index": k,
                    "instance": InstanceFile::from_instance(&instances[*k], None),
                    "verdict": json::verdict(v),
                })),
            }),
        )?;
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn check_ratio(args: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let name = args.mechanism.as_deref().ok_or_else(|| anyhow!("a mechanism name is required"))?;
    let mechanism = batch::mechanism(name, parse_scheme(&args.payments)?)?;
    if let Some(pairs) = &args.theorem1 {
        let params = parse_assignments(pairs.iter().map(String::as_str))?;
        let get = |k: &str| params.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let m: usize = get("m").context("m=<machines> is required")?.parse().context("m")?;
        let c = parse_rational(get("c").context("c=<ratio> is required")?)?;
        let eps = get("eps").map(parse_rational).transpose()?.unwrap_or_else(default_epsilon);
        let report = theorem1_harness(&mechanism, m, &c, &eps)?;
        let ratio = report.exact_constant("ratio").context("no ratio in report")?.clone();
        if args.text {
            writeln!(out, "{ratio}")?;
        } else {
            emit(out, &json!({"mechanism": name, "m": m, "c": c.to_string(), "ratio": ratio.to_string(), "verified": report.verified}))?;
        }
        return Ok(0);
    }
    let instances = instances(&args)?;
    let rule: Rule = name.parse()?;
    let ratios = batch::ratios(&rule, &instances, args.budget, args.jobs_parallel);
    let mut rows = Vec::with_capacity(instances.len());
    for (inst, r) in instances.iter().zip(ratios) {
        rows.push((inst.machines(), inst.job_count(), r?));
    }
    if args.csv {
        writeln!(out, "rule,m,n,ratio")?;
        for (m, n, r) in &rows {
            writeln!(out, "{name},{m},{n},{r}")?;
        }
    } else if args.text {
        for (_, _, r) in &rows {
            writeln!(out, "{r}")?;
        }
    } else {
        let list: Vec<Value> = rows.iter().map(|(m, n, r)| json!({"m": m, "n": n, "ratio": r.to_string()})).collect();
        emit(out, &json!({"rule": name, "ratios": list}))?;
    }
    Ok(0)
}

fn certify(args: CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let report = match args.name.as_str() {
        "theorem5" => theorem5_certificate(&parse_list(&args.a)?)?,
        "theorem7" => theorem7_certificate(&parse_rational(&args.tol)?)?,
        "theorem1" => {
            let mechanism = batch::mechanism(&args.mechanism, parse_scheme(&args.payments)?)?;
            let eps = args.eps.as_deref().map(parse_rational).transpose()?.unwrap_or_else(default_epsilon);
            theorem1_harness(&mechanism, args.m, &parse_rational(&args.c)?, &eps)?
        }
        "lemma6" => {
            let rule: Rule = args.rule.as_deref().unwrap_or("two-opt").parse()?;
            lemma6_g(&rule, &parse_rational(&args.k)?, &parse_list(&args.jobs)?, &parse_list(&args.samples)?)?.1
        }
        "prop12" => prop12_verify(args.budget.unwrap_or(1000) as usize, args.seed)?,
        "polytope" => return certify_polytope(args, out),
        other => bail!("unknown certificate {other:?}"),
    };
    if args.text {
        write!(out, "{}", json::report_text(&report))?;
    } else {
        emit(out, &json::report(&report))?;
    }
    Ok(if report.verified { 0 } else { 1 })
}

fn certify_polytope(args: CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let rule: Rule = args.rule.as_deref().unwrap_or("lpt-star").parse()?;
    let grid = parse_list(&args.grid)?;
    let jobs = parse_list(&args.jobs)?;
    let budget = args.budget.unwrap_or(4096);
    let (polytope, result) = payment_polytope_feasible(&rule, &grid, &jobs, args.machines, budget)?;
    let verified = verify_feasibility(&polytope, &result)?;
    if args.text {
        writeln!(
            out,
            "{} on grid {} with jobs {}: {} ({} profiles, {} constraints), re-check {}",
            rule.name(),
            join(&grid),
            join(&jobs),
            if result.is_feasible() { "feasible" } else { "infeasible" },
            polytope.profiles.len(),
            polytope.system.constraints.len(),
            if verified { "ok" } else { "FAILED" }
        )?;
    } else {
        let mut v = json::feasibility(&polytope, &result, verified);
        v["rule"] = json!(rule.name());
        v["grid"] = json::rats(&grid);
        v["jobs"] = json::rats(&jobs);
        v["machines"] = json!(args.machines);
        emit(out, &v)?;
    }
    Ok(if verified { 0 } else { 1 })
}

