//! Payment schemes and mechanisms.
//!
//! Truthful payments have the form
//! `p_i(b) = h_i(b_{-i}) + b_i·w_i(b) − ∫_0^{b_i} w_i(u, b_{-i}) du`; the only
//! freedom is `h`. [`extract_h`] recovers `h` from any mechanism by inverting
//! that formula, so two probes that disagree prove the mechanism untruthful.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::allocations::{vcg_allocate, AllocationRule, Rule};
use crate::error::{Error, NotTruthfulEvidence, Result};
use crate::model::{Allocation, Assignment, Instance, Outcome};
use crate::rational::{int, Rational};
use crate::workcurve::{build_workcurve, build_workcurve_for, WorkCurve};

/// Envy-free payments for a locally efficient allocation.
///
/// With machines ranked by bid from slowest to fastest, the slowest is paid
/// its cost and each next one is paid the previous payment plus its bid times
/// the workload increase.
pub fn ef_chain_payments(bids: &[Rational], workloads: &[Rational]) -> Result<Vec<Rational>> {
    if bids.len() != workloads.len() {
        return Err(Error::Dimension { expected: bids.len(), found: workloads.len() });
    }
    for i in 0..bids.len() {
        for k in 0..bids.len() {
            if bids[i] > bids[k] && workloads[i] > workloads[k] {
                return Err(Error::Precondition(format!(
                    "not locally efficient: machine {i} bids {} > {} but gets {} > {}",
                    bids[i], bids[k], workloads[i], workloads[k]
                )));
            }
        }
    }
    let mut order: Vec<usize> = (0..bids.len()).collect();
    // equal bids: smaller workload first
    order.sort_by(|&a, &b| bids[b].cmp(&bids[a]).then(workloads[a].cmp(&workloads[b])).then(a.cmp(&b)));

    let mut payments = vec![Rational::zero(); bids.len()];
    let mut previous: Option<(Rational, &Rational)> = None;
    for &i in &order {
        let p = match previous {
            None => &bids[i] * &workloads[i],
            Some((prev_pay, prev_load)) => prev_pay + &bids[i] * (&workloads[i] - prev_load),
        };
        payments[i] = p.clone();
        previous = Some((p, &workloads[i]));
    }
    Ok(payments)
}

/// `h + bid·workload − ∫_0^bid curve`.
///
/// `workload` must be the curve's value at `bid` (either one-sided limit at a
/// breakpoint).
pub fn truthful_payment(h: &Rational, bid: &Rational, workload: &Rational, curve: &WorkCurve) -> Result<Rational> {
    let right = curve.value_at(bid);
    let left = left_value(curve, bid);
    if *workload != right && *workload != left {
        return Err(Error::Inconsistent(format!("curve gives {right} at bid {bid}, allocation gives {workload}")));
    }
    Ok(h + bid * workload - curve.integrate(&Rational::zero(), Some(bid))?)
}

fn left_value(curve: &WorkCurve, x: &Rational) -> Rational {
    match curve.breakpoints().iter().position(|b| b == x) {
        Some(k) => curve.values()[k].clone(),
        None => curve.value_at(x),
    }
}

/// Clarke pivot payments: the optimal total running time without machine
/// `i` minus everyone else's running time in `assignment`. Minimum total
/// running time puts all work on the lowest bid.
///
/// A lone machine is paid its cost `b·L`.
pub fn vcg_payments(instance: &Instance, assignment: &Assignment) -> Result<Vec<Rational>> {
    clarke_pivot(instance, assignment.workloads())
}

fn clarke_pivot(instance: &Instance, workloads: &[Rational]) -> Result<Vec<Rational>> {
    let bids = instance.bids();
    if workloads.len() != bids.len() {
        return Err(Error::Dimension { expected: bids.len(), found: workloads.len() });
    }
    let total = instance.total_length();
    if bids.len() == 1 {
        return Ok(vec![&bids[0] * total]);
    }
    let running: Vec<Rational> = bids.iter().zip(workloads).map(|(b, w)| b * w).collect();
    let all: Rational = running.iter().sum();
    Ok((0..bids.len())
        .map(|i| {
            let cheapest_other = bids.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, b)| b).min().expect("m > 1");
            cheapest_other * total - (&all - &running[i])
        })
        .collect())
}

pub trait Mechanism {
    fn name(&self) -> &str;

    fn rule(&self) -> &dyn AllocationRule;

    fn payments(&self, instance: &Instance, allocation: &Allocation) -> Result<Vec<Rational>>;

    fn run(&self, instance: &Instance) -> Result<Outcome> {
        let allocation = self.rule().allocate(instance)?;
        let payments = self.payments(instance, &allocation)?;
        Outcome::new(allocation, payments)
    }
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn rule(&self) -> &dyn AllocationRule {
        (**self).rule()
    }
    fn payments(&self, instance: &Instance, allocation: &Allocation) -> Result<Vec<Rational>> {
        (**self).payments(instance, allocation)
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn rule(&self) -> &dyn AllocationRule {
        (**self).rule()
    }
    fn payments(&self, instance: &Instance, allocation: &Allocation) -> Result<Vec<Rational>> {
        (**self).payments(instance, allocation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaymentScheme {
    /// Clarke pivot on the rule's workloads.
    ClarkePivot,
    /// [`ef_chain_payments`].
    EfChain,
    /// Each machine is paid its reported cost `b_i·w_i`.
    Cost,
    Zero,
    Constant(Rational),
    /// Truthful payments with the smallest IR choice
    /// `h(b_{-i}) = ∫_0^∞ w_i(u, b_{-i}) du`.
    TightIntegral,
}

impl core::str::FromStr for PaymentScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clarke" => Ok(PaymentScheme::ClarkePivot),
            "ef-chain" => Ok(PaymentScheme::EfChain),
            "cost" => Ok(PaymentScheme::Cost),
            "zero" => Ok(PaymentScheme::Zero),
            "tight" => Ok(PaymentScheme::TightIntegral),
            other => Err(Error::Domain(format!("unknown payment scheme {other:?}"))),
        }
    }
}

/// An allocation rule paired with a payment scheme.
pub struct RuleMechanism<R> {
    name: String,
    rule: R,
    scheme: PaymentScheme,
}

impl<R: AllocationRule> RuleMechanism<R> {
    pub fn new(rule: R, scheme: PaymentScheme) -> Self {
        let name = format!("{}/{:?}", rule.name(), scheme);
        RuleMechanism { name, rule, scheme }
    }

    pub fn scheme(&self) -> &PaymentScheme {
        &self.scheme
    }
}

/// VCG: everything to the lowest bid, Clarke pivot payments.
pub fn vcg() -> RuleMechanism<Rule> {
    RuleMechanism::new(Rule::Vcg, PaymentScheme::ClarkePivot)
}

/// Bid range that contains every breakpoint of a machine's curve for the
/// rules in this crate.
fn curve_cap(instance: &Instance, machine: usize) -> Rational {
    let shortest = instance.jobs().last().expect("jobs");
    let top = instance
        .bids()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != machine)
        .map(|(_, b)| b)
        .max()
        .cloned()
        .unwrap_or_else(|| int(1));
    top * instance.total_length() / shortest * int(4)
}

impl<R: AllocationRule> Mechanism for RuleMechanism<R> {
    fn name(&self) -> &str {
        &self.name
    }

    fn rule(&self) -> &dyn AllocationRule {
        &self.rule
    }

    fn payments(&self, instance: &Instance, allocation: &Allocation) -> Result<Vec<Rational>> {
        let bids = instance.bids();
        let workloads = allocation.workloads();
        match &self.scheme {
            PaymentScheme::ClarkePivot => clarke_pivot(instance, workloads),
            PaymentScheme::EfChain => ef_chain_payments(bids, workloads),
            PaymentScheme::Cost => Ok(bids.iter().zip(workloads).map(|(b, w)| b * w).collect()),
            PaymentScheme::Zero => Ok(vec![Rational::zero(); bids.len()]),
            PaymentScheme::Constant(c) => Ok(vec![c.clone(); bids.len()]),
            PaymentScheme::TightIntegral => (0..bids.len())
                .map(|i| {
                    let cap = curve_cap(instance, i);
                    let curve = build_workcurve_for(&self.rule, bids, i, instance.jobs(), &cap)?;
                    if !curve.is_exact() {
                        return Err(Error::Resolution(format!("workcurve of machine {i} is not exact")));
                    }
                    let h = curve.integrate(&Rational::zero(), None)?;
                    truthful_payment(&h, &bids[i], &workloads[i], &curve)
                })
                .collect(),
        }
    }
}

/// `h(others) = p_0(b) − b_0·w_0(b) + ∫_0^{b_0} w_0(u, others) du` at
/// `b = (probe, others)`.
pub fn extract_h<M: Mechanism + ?Sized>(
    mechanism: &M,
    others: &[Rational],
    jobs: &[Rational],
    probe: &Rational,
) -> Result<Rational> {
    let mut bids = Vec::with_capacity(others.len() + 1);
    bids.push(probe.clone());
    bids.extend_from_slice(others);
    let instance = Instance::new(jobs.to_vec(), bids)?;
    let outcome = mechanism.run(&instance)?;
    let curve = build_workcurve(mechanism.rule(), others, jobs, probe)?;
    if curve.is_approximate() {
        return Err(Error::Resolution("workcurve breakpoints could not be located exactly".into()));
    }
    let integral = curve.integrate(&Rational::zero(), Some(probe))?;
    Ok(&outcome.payments[0] - probe * &outcome.workloads()[0] + integral)
}

/// [`extract_h`] at every probe; all values must agree.
pub fn extract_h_consistent<M: Mechanism + ?Sized>(
    mechanism: &M,
    others: &[Rational],
    jobs: &[Rational],
    probes: &[Rational],
) -> Result<Rational> {
    let mut first: Option<(Rational, Rational)> = None;
    for probe in probes {
        let h = extract_h(mechanism, others, jobs, probe)?;
        match &first {
            None => first = Some((probe.clone(), h)),
            Some((p0, h0)) if *h0 != h => {
                return Err(Error::NotTruthful(Box::new(NotTruthfulEvidence {
                    others: others.to_vec(),
                    first_probe: p0.clone(),
                    first_h: h0.clone(),
                    second_probe: probe.clone(),
                    second_h: h,
                })))
            }
            Some(_) => {}
        }
    }
    first.map(|(_, h)| h).ok_or_else(|| Error::Domain("no probes given".into()))
}

/// `h` tabulated at finitely many opposing-bid vectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HTable {
    entries: BTreeMap<Vec<Rational>, Rational>,
}

impl HTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates `h` for `others` (sorted, since anonymous mechanisms share
    /// one symmetric `h`) unless already tabulated.
    pub fn evaluate<M: Mechanism + ?Sized>(
        &mut self,
        mechanism: &M,
        others: &[Rational],
        jobs: &[Rational],
        probes: &[Rational],
    ) -> Result<Rational> {
        let mut key = others.to_vec();
        key.sort();
        if let Some(h) = self.entries.get(&key) {
            return Ok(h.clone());
        }
        let h = extract_h_consistent(mechanism, others, jobs, probes)?;
        self.entries.insert(key, h.clone());
        Ok(h)
    }

    pub fn get(&self, others: &[Rational]) -> Option<&Rational> {
        let mut key = others.to_vec();
        key.sort();
        self.entries.get(&key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Rational>, &Rational)> {
        self.entries.iter()
    }
}

/// Whether `h ≥ ∫_0^∞ w(u, others) du`, the condition for individual
/// rationality at every own bid. `None` when the integral diverges.
pub fn meets_ir_bound(h: &Rational, curve: &WorkCurve) -> Result<Option<bool>> {
    match curve.integrate(&Rational::zero(), None) {
        Ok(total) => Ok(Some(*h >= total)),
        Err(Error::Divergent) => Ok(None),
        Err(e) => Err(e),
    }
}

/// VCG outcome without going through the trait.
pub fn vcg_outcome(instance: &Instance) -> Result<Outcome> {
    let assignment = vcg_allocate(instance);
    let payments = vcg_payments(instance, &assignment)?;
    Outcome::new(Allocation::Deterministic(assignment), payments)
}
