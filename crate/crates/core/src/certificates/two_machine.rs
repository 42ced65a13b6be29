use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CertificateReport;
use crate::allocations::{AllocationRule, Rule};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::payments::{PaymentScheme, RuleMechanism};
use crate::properties::{check_anonymous, check_local_efficiency, check_monotone, check_scalable, default_grid, PropertyVerdict, Relation};
use crate::rational::{int, ratio, Rational};
use crate::sampling::InstanceSampler;
use crate::workcurve::{build_response_curve, build_workcurve, WorkCurve};

fn scalars() -> [Rational; 3] {
    [int(2), ratio(1, 3), ratio(7, 5)]
}

fn exact(curve: WorkCurve, what: &str) -> Result<WorkCurve> {
    if curve.is_approximate() {
        return Err(Error::Resolution(format!("{what} has approximate breakpoints")));
    }
    Ok(curve)
}

/// `g(k) = (4k²/(k+1)² − 1)·∫_{1/k}^{(k+1)/(2k)} w(1, y) dy` for a scalable
/// two-machine rule, and a check of
/// `∫_a^{ka} w(x, a) dx ≥ ∫_{a/k}^a w(a, x) dx + g(k)·a` at each sample `a`.
///
/// Here `w(x, y)` is the workload of the machine bidding `x` against `y`.
pub fn lemma6_g<R: AllocationRule + ?Sized>(
    rule: &R,
    k: &Rational,
    jobs: &[Rational],
    samples: &[Rational],
) -> Result<(Rational, CertificateReport)> {
    if *k <= int(1) {
        return Err(Error::Domain(format!("k = {k} must exceed 1")));
    }
    if rule.is_randomized() {
        return Err(Error::Domain(format!("{} is randomized", rule.name())));
    }
    let probe = Instance::new(jobs.to_vec(), vec![int(1), int(1)])?;
    let total = probe.total_length().clone();
    let shortest = probe.jobs().last().expect("jobs").clone();
    let reach = &total / &shortest * int(4);

    let mut report = CertificateReport::new("lemma6");
    report.input("rule", rule.name());
    report.input("k", k);
    report.input("jobs", jobs.iter().map(|l| format!("{l}")).collect::<Vec<_>>().join(","));

    for a in samples {
        if !a.is_positive() {
            return Err(Error::Domain(format!("sample a = {a} must be positive")));
        }
        for bids in [vec![int(1), a.clone()], vec![a.clone(), int(1)]] {
            let inst = Instance::new(jobs.to_vec(), bids)?;
            if !check_scalable(rule, &inst, &scalars())?.passed {
                return Err(Error::Precondition(format!("{} is not scalable at bids {:?}", rule.name(), inst.bids())));
            }
        }
        let own = exact(build_workcurve(rule, core::slice::from_ref(a), jobs, &(a * k * &reach))?, "w(x, a)")?;
        let ka = k * a;
        for (lo, _, v) in own.pieces() {
            if lo < ka && !v.is_positive() {
                return Err(Error::Precondition(format!("w(x, {a}) = {v} for x > {lo}, inside (0, {ka})")));
            }
        }
    }

    let cross = exact(build_response_curve(rule, &[int(1), int(1)], 1, 0, jobs, &(k * &reach))?, "w(1, y)")?;
    let lo = int(1) / k;
    let hi = (k + int(1)) / (k * int(2));
    let inner = cross.integrate(&lo, Some(&hi))?;
    let kp1 = k + int(1);
    let factor = int(4) * k * k / (&kp1 * &kp1) - int(1);
    let g = &factor * &inner;
    report.exact("integral w(1,y) over (1/k, (k+1)/(2k))", inner);
    report.exact("g", g.clone());
    report.require("g(k) > 0", g.clone(), Relation::Gt, Rational::zero());

    for a in samples {
        let own = exact(build_workcurve(rule, core::slice::from_ref(a), jobs, &(a * k * &reach))?, "w(x, a)")?;
        let lhs = own.integrate(a, Some(&(k * a)))?;
        let cross_a = exact(build_response_curve(rule, &[a.clone(), a.clone()], 1, 0, jobs, &(a * &reach))?, "w(a, x)")?;
        let rhs = cross_a.integrate(&(a / k), Some(a))? + &g * a;
        report.exact(format!("lhs[a={a}]"), lhs.clone());
        report.exact(format!("rhs[a={a}]"), rhs.clone());
        report.require(format!("inequality at a={a}"), lhs, Relation::Ge, rhs);
    }
    Ok((g, report.finish()))
}

fn tally(report: &mut CertificateReport, verdict: &PropertyVerdict, passes: &mut i64, inst: &Instance) {
    if verdict.passed {
        *passes += 1;
    } else if let Some(c) = &verdict.counterexample {
        report.fail(format!(
            "{} fails on jobs {:?} bids {:?}: {:?}, {}",
            verdict.property,
            inst.jobs().iter().map(|l| format!("{l}")).collect::<Vec<_>>(),
            c.bids.iter().map(|b| format!("{b}")).collect::<Vec<_>>(),
            c.witness,
            c.inequality()
        ));
    }
}

/// The two-machine min-makespan rule (ties to the smaller total running
/// time) is locally efficient, monotone, scalable and anonymous on
/// `sample_budget` random instances, yet differs from VCG.
pub fn prop12_verify(sample_budget: usize, seed: u64) -> Result<CertificateReport> {
    let rule = Rule::TwoMachineOpt;
    let mechanism = RuleMechanism::new(rule, PaymentScheme::Zero);
    let sampler = InstanceSampler::default().machines(2, 2).jobs(1, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CertificateReport::new("prop12");
    report.input("rule", rule.name());
    report.input("samples", sample_budget);
    report.input("seed", seed);

    let (mut le, mut mono, mut scal, mut anon) = (0, 0, 0, 0);
    for _ in 0..sample_budget {
        let inst = sampler.sample(&mut rng);
        let workloads = rule.workloads(&inst)?;
        tally(&mut report, &check_local_efficiency(inst.bids(), &workloads)?, &mut le, &inst);
        tally(&mut report, &check_monotone(&rule, &inst, &default_grid(inst.bids()))?, &mut mono, &inst);
        tally(&mut report, &check_scalable(&rule, &inst, &scalars())?, &mut scal, &inst);
        tally(&mut report, &check_anonymous(&mechanism, &inst)?, &mut anon, &inst);
    }
    let n = int(sample_budget as i64);
    report.require("locally efficient on every sample", int(le), Relation::Eq, n.clone());
    report.require("monotone on every sample", int(mono), Relation::Eq, n.clone());
    report.require("scalable on every sample", int(scal), Relation::Eq, n.clone());
    report.require("anonymous on every sample", int(anon), Relation::Eq, n);

    // raise the second bid across the regimes of the split
    let base = Instance::new(vec![int(2), int(1)], vec![int(1), ratio(3, 2)])?;
    let fine: Vec<Rational> = (1..=96).map(|j| ratio(j, 16)).collect();
    let mut fine_passes = 0;
    tally(&mut report, &check_monotone(&rule, &base, &fine)?, &mut fine_passes, &base);
    report.require("monotone along a fine grid at jobs (2,1), bids (1,3/2)", int(fine_passes), Relation::Eq, int(1));

    let split = rule.workloads(&base)?;
    let vcg = Rule::Vcg.workloads(&base)?;
    report.exact("two_opt_w0", split[0].clone());
    report.exact("vcg_w0", vcg[0].clone());
    report.flag("differs_from_vcg", split != vcg);
    report.require("two-opt gives machine 0 workload 2", split[0].clone(), Relation::Eq, int(2));
    report.require("VCG gives machine 0 workload 3", vcg[0].clone(), Relation::Eq, int(3));
    Ok(report.finish())
}
