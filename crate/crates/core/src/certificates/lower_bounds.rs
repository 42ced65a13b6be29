use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{CertificateReport, Constant};
use crate::allocations::{at_lower_bound, opt_makespan, AllocationRule, Rule, DEFAULT_OPT_BUDGET};
use crate::error::{Error, Result};
use crate::model::{makespan_of, Instance};
use crate::payments::{extract_h_consistent, Mechanism};
use crate::properties::{check_local_efficiency, check_scalable, Relation};
use crate::rational::{int, is_power_of_two, midpoint, parse_rational, ratio, Rational};
use crate::workcurve::{build_workcurve, expected_workcurve, PieceForm};

/// `ε` used when the caller has no preference; any value in `(0, 1)` works.
pub fn default_epsilon() -> Rational {
    ratio(1, 2)
}

/// `3.5 + ln 3 − ln 2` to 27 decimal places.
const AT_CONSTANT_DIGITS: &str = "3.905465108108164381978013115";

fn job_pair() -> Vec<Rational> {
    vec![int(2), int(1)]
}

fn workload_at<R: AllocationRule + ?Sized>(rule: &R, jobs: &[Rational], bids: Vec<Rational>, machine: usize) -> Result<Rational> {
    Ok(rule.workloads(&Instance::new(jobs.to_vec(), bids)?)?[machine].clone())
}

/// LPT* against a power-of-two opponent `a ≥ 8` with jobs `(2, 1)`.
///
/// Individual rationality forces `h(a) ≥ ∫_0^∞ w(x, a) dx = 13a/4`, while
/// no-envy at `(1, a)` forces `h(a) ≤ h(1) + 3a`. Both hold only if
/// `h(1) ≥ a/4`, which fails once `a > 4·h(1)`.
pub fn theorem5_certificate(a_values: &[Rational]) -> Result<CertificateReport> {
    let rule = Rule::lpt_star();
    let jobs = job_pair();
    let total = int(3);
    let mut report = CertificateReport::new("theorem5");
    report.input("rule", rule.name());
    report.input("jobs", "2,1");
    for a in a_values {
        if !is_power_of_two(a) || *a < int(8) {
            return Err(Error::Precondition(format!("a = {a} must be a power of two and at least 8")));
        }
    }
    for a in a_values {
        report.input("a", a);
        let curve = build_workcurve(&rule, core::slice::from_ref(a), &jobs, &(a * int(8)))?;
        let shape_breaks = [a / int(4), a.clone(), a * int(2)];
        let shape_values = [int(3), int(2), int(1)];
        if curve.breakpoints() != &shape_breaks[..]
            || curve.values() != &shape_values[..]
            || !curve.tail().is_zero()
            || !curve.is_exact()
        {
            report.fail(format!(
                "a = {a}: workcurve breakpoints {:?} values {:?} tail {}, expected breakpoints {:?} values {:?} tail 0",
                curve.breakpoints().iter().map(|b| format!("{b}")).collect::<Vec<_>>(),
                curve.values().iter().map(|b| format!("{b}")).collect::<Vec<_>>(),
                curve.tail(),
                shape_breaks.iter().map(|b| format!("{b}")).collect::<Vec<_>>(),
                shape_values.iter().map(|b| format!("{b}")).collect::<Vec<_>>(),
            ));
            continue;
        }
        let integral = curve.integrate(&Rational::zero(), None)?;
        report.exact(format!("integral[a={a}]"), integral.clone());
        report.require(format!("integral of w(x,{a}) = 13a/4"), integral.clone(), Relation::Eq, a * ratio(13, 4));

        let low = workload_at(&rule, &jobs, vec![a / int(4), a.clone()], 0)?;
        let high = workload_at(&rule, &jobs, vec![a * int(2), a.clone()], 0)?;
        report.require(format!("w(a/4, a) = 3 at a={a}"), low, Relation::Eq, int(3));
        report.require(format!("w(2a, a) = 1 at a={a}"), high, Relation::Eq, int(1));

        // envy bound h(t_-i) − h(t_-j) ≤ L·t_i + (t_j − t_i)·w_i(t) at t = (1, a)
        let w_fast = workload_at(&rule, &jobs, vec![int(1), a.clone()], 0)?;
        let envy = &total + (a - int(1)) * &w_fast;
        report.exact(format!("envy_bound[a={a}]"), envy.clone());
        report.require(format!("envy bound h(a) - h(1) <= 3a at a={a}"), envy.clone(), Relation::Eq, a * int(3));

        let threshold = &integral - &envy;
        report.exact(format!("h1_threshold[a={a}]"), threshold.clone());
        report.require(format!("IR minus envy gap = a/4 at a={a}"), threshold, Relation::Eq, a / int(4));
        report.require(format!("integral slope exceeds envy slope at a={a}"), integral / a, Relation::Gt, envy / a);
    }
    report.note("IR and the envy bound need h(1) >= a/4 for every admissible a, impossible for a > 4*h(1)");
    Ok(report.finish())
}

/// The binning rule's expected workcurve against bid 1 with jobs `(2, 1)`:
/// six regimes, integral `7/2 + ln(3/2)`. By scalability the integral
/// against `a` is `(7/2 + ln(3/2))·a > 3a`, beyond the envy bound.
pub fn theorem7_certificate(tolerance: &Rational) -> Result<CertificateReport> {
    if !tolerance.is_positive() {
        return Err(Error::Domain(format!("tolerance {tolerance} must be positive")));
    }
    let rule = Rule::AtExpected;
    let jobs = job_pair();
    let mut report = CertificateReport::new("theorem7");
    report.input("rule", rule.name());
    report.input("jobs", "2,1");
    report.input("other_bid", "1");
    report.input("tolerance", tolerance);

    let curve = expected_workcurve(&rule, &[int(1)], &jobs)?;
    let forms = [
        PieceForm::Constant(int(3)),
        PieceForm::Reciprocal(int(1)),
        PieceForm::Constant(int(2)),
        PieceForm::Constant(int(1)),
        PieceForm::Affine { intercept: int(3), slope: int(-1) },
        PieceForm::Constant(int(0)),
    ];
    let boundaries = [ratio(1, 3), ratio(1, 2), int(1), int(2), int(3)];
    let found: Vec<PieceForm> = curve.pieces().iter().map(|p| p.form()).collect();
    if found.len() != forms.len() {
        report.fail(format!("expected {} regimes, found {}", forms.len(), found.len()));
    }
    for (k, (got, want)) in found.iter().zip(&forms).enumerate() {
        if got != want {
            let piece = &curve.pieces()[k];
            report.fail(format!("regime {k} starting at {}: found {got:?}, expected {want:?}", piece.lo));
        }
    }
    if curve.boundaries() != boundaries {
        report.fail(format!("regime boundaries {:?}", curve.boundaries().iter().map(|b| format!("{b}")).collect::<Vec<_>>()));
    }
    for (k, b) in curve.boundaries().iter().enumerate() {
        report.exact(format!("boundary[{k}]"), b.clone());
    }
    if !report.failures.is_empty() {
        return Ok(report.finish());
    }

    let integral = curve.integrate_all()?;
    report.require("rational part = 7/2", integral.rational.clone(), Relation::Eq, ratio(7, 2));
    match integral.folded_log() {
        Some((c, arg)) if c.is_one() && arg == ratio(3, 2) => {}
        other => report.fail(format!("log part {other:?} is not ln(3/2)")),
    }
    let enclosure = integral.enclosure(tolerance)?;
    let reference = parse_rational(AT_CONSTANT_DIGITS)?;
    let slack = tolerance + ratio(1, 1_000_000_000_000_000_000);
    report.require("enclosure width < tolerance", enclosure.width(), Relation::Lt, tolerance.clone());
    report.require("enclosure low end near 3.5 + ln 3 - ln 2", enclosure.lo.clone(), Relation::Ge, &reference - &slack);
    report.require("enclosure high end near 3.5 + ln 3 - ln 2", enclosure.hi.clone(), Relation::Le, &reference + &slack);
    report.require("integral slope exceeds envy slope 3", enclosure.lo.clone(), Relation::Gt, int(3));
    report.constants.push(("integral".into(), Constant::Log { value: integral.clone(), enclosure: enclosure.clone() }));
    report.exact("h1_threshold_slope_lower", &enclosure.lo - int(3));

    for a in [int(4), int(8), int(64)] {
        let w = workload_at(&rule, &jobs, vec![int(1), a.clone()], 0)?;
        let envy = int(3) + (&a - int(1)) * w;
        report.require(format!("envy bound h(a) - h(1) <= 3a at a={a}"), envy, Relation::Eq, &a * int(3));
    }

    let mut samples: Vec<Rational> = boundaries.to_vec();
    let mut mids: Vec<Rational> = boundaries.windows(2).map(|w| midpoint(&w[0], &w[1])).collect();
    samples.append(&mut mids);
    samples.push(ratio(1, 6));
    samples.push(int(5));
    samples.sort();
    let mut locally_efficient = 0;
    for x in &samples {
        let inst = Instance::new(jobs.clone(), vec![x.clone(), int(1)])?;
        let workloads = rule.workloads(&inst)?;
        if !boundaries.contains(x) {
            report.require(format!("symbolic curve matches the pour at x={x}"), curve.value_at(x), Relation::Eq, workloads[0].clone());
        }
        if check_local_efficiency(inst.bids(), &workloads)?.passed {
            locally_efficient += 1;
        }
        report.claim(format!("E[w_0] = T_LB / x at x={x}"), workloads[0].clone(), Relation::Eq, at_lower_bound(&inst) / x);
        let scaled = check_scalable(&rule, &inst, &[int(2), ratio(1, 3), ratio(7, 5)])?;
        if !scaled.passed {
            report.fail(format!("expected allocation not scalable at x={x}"));
        }
    }
    report.require(
        "expected allocation locally efficient at all samples",
        int(locally_efficient),
        Relation::Eq,
        int(samples.len() as i64),
    );
    report.note("scalability gives the integral against a as a times the integral against 1");
    report.note("IR and the envy bound need h(1) >= (1/2 + ln(3/2))*a for every a, impossible for large a");
    Ok(report.finish())
}

/// Constants of the `m`-machine construction with jobs `(1, …, 1, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Params {
    pub m: usize,
    pub c: Rational,
    pub epsilon: Rational,
    /// Total length `2m − 1`.
    pub total_length: Rational,
    /// `c·L + ε`
    pub gamma: Rational,
    /// `γ^{m−1}·L + h(γ^{m−2}, …, γ, 1)`
    pub f: Rational,
    /// `L·c·f / (m − 1)`
    pub alpha: Rational,
}

impl Theorem1Params {
    pub fn jobs(&self) -> Vec<Rational> {
        let mut jobs = vec![int(1); self.m - 1];
        jobs.push(int(self.m as i64));
        jobs
    }

    /// `(mα, …, mα, α)`
    pub fn speeds(&self) -> Vec<Rational> {
        let mut speeds = vec![&self.alpha * int(self.m as i64); self.m - 1];
        speeds.push(self.alpha.clone());
        speeds
    }
}

fn pow(base: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * base)
}

/// Runs `mechanism` on the construction that defeats ratios below
/// `2 − 1/m`. `h` is extracted from the mechanism itself, so a mechanism
/// whose `h` depends on the probe is rejected with the evidence.
pub fn theorem1_harness<M: Mechanism + ?Sized>(
    mechanism: &M,
    m: usize,
    c: &Rational,
    epsilon: &Rational,
) -> Result<CertificateReport> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m} must be at least 2")));
    }
    let mi = int(m as i64);
    let bound = int(2) - int(1) / &mi;
    if *c < int(1) || *c >= bound {
        return Err(Error::Precondition(format!("c = {c} must lie in [1, {bound})")));
    }
    if !epsilon.is_positive() || *epsilon >= int(1) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let total = int(2 * m as i64 - 1);
    let gamma = c * &total + epsilon;
    let jobs = {
        let mut j = vec![int(1); m - 1];
        j.push(mi.clone());
        j
    };
    let ladder: Vec<Rational> = (0..m - 1).rev().map(|k| pow(&gamma, k)).collect();
    let top = pow(&gamma, m - 1);
    let h_ladder = extract_h_consistent(mechanism, &ladder, &jobs, &[top.clone(), &top * int(2), ratio(1, 2)])?;
    let f = &top * &total + &h_ladder;
    let alpha = &total * c * &f / int(m as i64 - 1);
    let params = Theorem1Params { m, c: c.clone(), epsilon: epsilon.clone(), total_length: total.clone(), gamma, f, alpha };

    let mut report = CertificateReport::new("theorem1");
    report.input("mechanism", mechanism.name());
    report.input("m", m);
    report.input("c", c);
    report.input("epsilon", epsilon);
    report.exact("L", total.clone());
    report.exact("gamma", params.gamma.clone());
    report.exact("h(gamma ladder)", h_ladder);
    report.exact("f", params.f.clone());
    report.exact("alpha", params.alpha.clone());
    report.require("gamma > c*L", params.gamma.clone(), Relation::Gt, c * &total);

    let speeds = params.speeds();
    let instance = Instance::new(jobs.clone(), speeds.clone())?;
    let outcome = mechanism.run(&instance)?;
    let workloads = outcome.workloads().to_vec();
    let all_on_fastest = workloads[m - 1] == total;
    report.flag("all_jobs_on_fastest", all_on_fastest);
    let achieved = makespan_of(&workloads, &speeds)?;
    let (_, opt) = opt_makespan(&instance, DEFAULT_OPT_BUDGET)?;
    let ratio_value = &achieved / &opt;
    report.exact("makespan", achieved.clone());
    report.exact("opt", opt.clone());
    report.exact("ratio", ratio_value.clone());
    report.require("OPT = m*alpha (exhaustive search)", opt, Relation::Eq, &params.alpha * &mi);
    if all_on_fastest {
        report.require("makespan = (2m-1)*alpha", achieved, Relation::Eq, &params.alpha * &total);
        report.require("ratio = 2 - 1/m", ratio_value.clone(), Relation::Eq, bound.clone());
        report.require("ratio > c", ratio_value, Relation::Gt, c.clone());
    } else {
        report.fail("the mechanism does not put every job on the fastest machine");
    }

    let others: Vec<Rational> = speeds[1..].to_vec();
    let own = speeds[0].clone();
    let h_others = extract_h_consistent(mechanism, &others, &jobs, &[own.clone(), &own * int(2)])?;
    report.exact("h(t_-1)", h_others.clone());
    let claim_low = (&total + int(m as i64 - 1) / (&total * c)) * &params.alpha;
    report.claim("h(t_-1) >= (L + (m-1)/(L*c))*alpha", h_others.clone(), Relation::Ge, claim_low);
    report.claim("h(t_-1) < L*alpha + f", h_others.clone(), Relation::Lt, &total * &params.alpha + &params.f);
    let cap = others.iter().max().expect("m >= 2") * &total * int(4);
    let curve = build_workcurve(mechanism.rule(), &others, &jobs, &cap)?;
    match curve.integrate(&Rational::zero(), None) {
        Ok(ir) => report.claim("IR bound h(t_-1) >= integral of w(x, t_-1)", h_others, Relation::Ge, ir),
        Err(Error::Divergent) => report.note("workcurve integral diverges, the IR bound on h is vacuous"),
        Err(e) => return Err(e),
    }
    report.note("the h bounds are derived for mechanisms that avoid the all-on-fastest allocation; they are reported, not required");
    Ok(report.finish())
}
