//! Allocation rules.
//!
//! Deterministic rules return an [`Assignment`]; the Archer–Tardos binning
//! rule returns its [`ExpectedAllocation`] (and [`at_sample`] draws from it).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::str::FromStr;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{makespan_of, Allocation, Assignment, ExpectedAllocation, Instance};
use crate::rational::{rounded_speed, Rational};

/// Default node budget for the exact makespan search.
pub const DEFAULT_OPT_BUDGET: u64 = 10_000_000;

/// Largest job count [`two_machine_opt`] will enumerate (`2^n` splits).
pub const TWO_MACHINE_MAX_JOBS: usize = 24;

pub trait AllocationRule {
    fn name(&self) -> &str;

    fn allocate(&self, instance: &Instance) -> Result<Allocation>;

    fn is_randomized(&self) -> bool {
        false
    }

    /// Workloads (expected workloads for randomized rules).
    fn workloads(&self, instance: &Instance) -> Result<Vec<Rational>> {
        Ok(self.allocate(instance)?.workloads().to_vec())
    }
}

impl<R: AllocationRule + ?Sized> AllocationRule for &R {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        (**self).allocate(instance)
    }
    fn is_randomized(&self) -> bool {
        (**self).is_randomized()
    }
}

impl<R: AllocationRule + ?Sized> AllocationRule for alloc::boxed::Box<R> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        (**self).allocate(instance)
    }
    fn is_randomized(&self) -> bool {
        (**self).is_randomized()
    }
}

/// How greedy argmin ties are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgminTie {
    #[default]
    LowestIndex,
    /// Smaller raw bid first, then lower index.
    SmallestBid,
}

/// How bundles are ranked when LPT* redistributes them inside a rounded-speed
/// class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BundleOrder {
    #[default]
    Workload,
    JobCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TieBreakPolicy {
    pub argmin: ArgminTie,
    pub bundles: BundleOrder,
}

/// The built-in rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    LptStar(TieBreakPolicy),
    /// Expected allocation of the Archer–Tardos binning rule.
    AtExpected,
    Vcg,
    Opt { budget: u64 },
    TwoMachineOpt,
}

impl Rule {
    pub fn lpt_star() -> Self {
        Rule::LptStar(TieBreakPolicy::default())
    }

    pub fn opt() -> Self {
        Rule::Opt { budget: DEFAULT_OPT_BUDGET }
    }

    pub fn is_scalable(&self) -> bool {
        !matches!(self, Rule::LptStar(_))
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lpt-star" => Ok(Rule::lpt_star()),
            "at-expected" => Ok(Rule::AtExpected),
            "vcg" => Ok(Rule::Vcg),
            "opt" => Ok(Rule::opt()),
            "two-opt" => Ok(Rule::TwoMachineOpt),
            other => Err(Error::Domain(format!("unknown rule {other:?}"))),
        }
    }
}

impl AllocationRule for Rule {
    fn name(&self) -> &str {
        match self {
            Rule::LptStar(_) => "lpt-star",
            Rule::AtExpected => "at-expected",
            Rule::Vcg => "vcg",
            Rule::Opt { .. } => "opt",
            Rule::TwoMachineOpt => "two-opt",
        }
    }

    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        Ok(match self {
            Rule::LptStar(policy) => Allocation::Deterministic(lpt_star_with(instance, *policy)?),
            Rule::AtExpected => Allocation::Expected(at_fractional(instance)?),
            Rule::Vcg => Allocation::Deterministic(vcg_allocate(instance)),
            Rule::Opt { budget } => Allocation::Deterministic(opt_makespan(instance, *budget)?.0),
            Rule::TwoMachineOpt => Allocation::Deterministic(two_machine_opt(instance)?),
        })
    }

    fn is_randomized(&self) -> bool {
        matches!(self, Rule::AtExpected)
    }
}

/// A deterministic rule given by a closure returning a job-to-machine map.
pub struct FnRule<F> {
    name: &'static str,
    f: F,
}

impl<F> FnRule<F>
where
    F: Fn(&Instance) -> Vec<usize>,
{
    pub fn new(name: &'static str, f: F) -> Self {
        FnRule { name, f }
    }
}

impl<F> AllocationRule for FnRule<F>
where
    F: Fn(&Instance) -> Vec<usize>,
{
    fn name(&self) -> &str {
        self.name
    }

    fn allocate(&self, instance: &Instance) -> Result<Allocation> {
        let map = (self.f)(instance);
        Ok(Allocation::Deterministic(Assignment::new(instance.jobs(), instance.machines(), map)?))
    }
}

/// Machine indices sorted by bid, ties by index.
pub(crate) fn bid_order(bids: &[Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..bids.len()).collect();
    order.sort_by(|&a, &b| bids[a].cmp(&bids[b]).then(a.cmp(&b)));
    order
}

pub fn lpt_star(instance: &Instance) -> Result<Assignment> {
    lpt_star_with(instance, TieBreakPolicy::default())
}

/// LPT*: round every bid up to a power of two, place jobs longest first on
/// the machine minimizing `(load + l_j)·s_i`, then inside each rounded-speed
/// class hand the heavier bundles to the smaller raw bids.
pub fn lpt_star_with(instance: &Instance, policy: TieBreakPolicy) -> Result<Assignment> {
    let bids = instance.bids();
    let m = bids.len();
    let rounded: Vec<Rational> = bids.iter().map(rounded_speed).collect::<Result<_>>()?;
    let mut loads = vec![Rational::zero(); m];
    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); m];

    for (j, l) in instance.jobs().iter().enumerate() {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..m {
            let finish = (&loads[i] + l) * &rounded[i];
            let better = match &best {
                None => true,
                Some((k, t)) => match finish.cmp(t) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => match policy.argmin {
                        ArgminTie::LowestIndex => false,
                        ArgminTie::SmallestBid => bids[i] < bids[*k],
                    },
                },
            };
            if better {
                best = Some((i, finish));
            }
        }
        let (i, _) = best.expect("at least one machine");
        loads[i] += l;
        bundles[i].push(j);
    }

    let mut classes: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for (i, s) in rounded.iter().enumerate() {
        classes.entry(s.clone()).or_default().push(i);
    }
    let mut final_bundles = bundles.clone();
    for members in classes.values().filter(|c| c.len() > 1) {
        let mut by_size = members.clone();
        match policy.bundles {
            BundleOrder::Workload => by_size.sort_by(|&a, &b| loads[b].cmp(&loads[a]).then(a.cmp(&b))),
            BundleOrder::JobCount => {
                by_size.sort_by(|&a, &b| bundles[b].len().cmp(&bundles[a].len()).then(a.cmp(&b)))
            }
        }
        let mut by_bid = members.clone();
        by_bid.sort_by(|&a, &b| bids[a].cmp(&bids[b]).then(a.cmp(&b)));
        for (&target, &source) in by_bid.iter().zip(&by_size) {
            final_bundles[target] = bundles[source].clone();
        }
    }

    let mut map = vec![0; instance.job_count()];
    for (i, bundle) in final_bundles.iter().enumerate() {
        for &j in bundle {
            map[j] = i;
        }
    }
    Assignment::new(instance.jobs(), m, map)
}

/// `T_LB(b) = max_j min_i max{ b_i·l_j, (Σ_{k≤j} l_k) / (Σ_{r≤i} 1/b_r) }`
/// over bids sorted nondecreasing.
pub fn at_lower_bound(instance: &Instance) -> Rational {
    let bids = instance.bids();
    let order = bid_order(bids);
    let mut inverse_prefix = Vec::with_capacity(order.len());
    let mut acc = Rational::zero();
    for &i in &order {
        acc += bids[i].recip();
        inverse_prefix.push(acc.clone());
    }
    let mut length_prefix = Rational::zero();
    let mut bound = Rational::zero();
    for l in instance.jobs() {
        length_prefix += l;
        let best = order
            .iter()
            .zip(&inverse_prefix)
            .map(|(&i, inv)| {
                let single = &bids[i] * l;
                let spread = &length_prefix / inv;
                if single > spread { single } else { spread }
            })
            .min()
            .expect("at least one machine");
        if best > bound {
            bound = best;
        }
    }
    bound
}

/// Fractional pour into bins of size `T_LB/b_i`, fastest machine first.
pub fn at_fractional(instance: &Instance) -> Result<ExpectedAllocation> {
    let bids = instance.bids();
    let order = bid_order(bids);
    let bound = at_lower_bound(instance);
    let mut dists: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); instance.job_count()];

    let mut bin = 0;
    let mut room = &bound / &bids[order[0]];
    for (j, l) in instance.jobs().iter().enumerate() {
        let mut left = l.clone();
        while !left.is_zero() {
            if room.is_zero() {
                bin += 1;
                if bin == order.len() {
                    return Err(Error::Internal(format!("bins of total size below L with T_LB = {bound}")));
                }
                room = &bound / &bids[order[bin]];
                continue;
            }
            let piece = if left < room { left.clone() } else { room.clone() };
            room -= &piece;
            left -= &piece;
            *dists[j].entry(order[bin]).or_insert_with(Rational::zero) += &piece / l;
        }
    }
    ExpectedAllocation::new(instance.jobs(), instance.machines(), dists)
}

/// Draws each job's machine independently from the fractional pour.
pub fn at_sample<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Result<Assignment> {
    let expected = at_fractional(instance)?;
    let mut map = Vec::with_capacity(instance.job_count());
    for dist in expected.job_distributions() {
        let common = dist.values().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let draw = rng.gen_bigint_range(&BigInt::zero(), &common);
        let mut cumulative = BigInt::zero();
        let mut chosen = None;
        for (&i, p) in dist {
            cumulative += p.numer() * (&common / p.denom());
            if draw < cumulative {
                chosen = Some(i);
                break;
            }
        }
        map.push(chosen.ok_or_else(|| Error::Internal("probabilities do not cover the draw".into()))?);
    }
    Assignment::new(instance.jobs(), instance.machines(), map)
}

/// Every job on the lowest bid (lowest index among ties).
pub fn vcg_allocate(instance: &Instance) -> Assignment {
    let winner = bid_order(instance.bids())[0];
    Assignment::new(instance.jobs(), instance.machines(), vec![winner; instance.job_count()])
        .expect("winner index is in range")
}

struct OptSearch<'a> {
    jobs: &'a [Rational],
    bids: &'a [Rational],
    order: Vec<usize>,
    global_bound: Rational,
    fastest: Rational,
    loads: Vec<Rational>,
    current: Vec<usize>,
    best: Rational,
    best_map: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl OptSearch<'_> {
    fn search(&mut self, j: usize, span: &Rational) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if j == self.jobs.len() {
            if *span < self.best {
                self.best = span.clone();
                self.best_map = self.current.clone();
            }
            return Ok(());
        }
        let l = &self.jobs[j];
        let mut bound = span.clone();
        let longest = l * &self.fastest;
        for candidate in [&self.global_bound, &longest] {
            if *candidate > bound {
                bound = candidate.clone();
            }
        }
        if bound >= self.best {
            return Ok(());
        }
        let mut tried: Vec<(Rational, Rational)> = Vec::new();
        for k in 0..self.order.len() {
            let i = self.order[k];
            // machines with equal bid and equal load are interchangeable
            let key = (self.bids[i].clone(), self.loads[i].clone());
            if tried.contains(&key) {
                continue;
            }
            let finish = (&self.loads[i] + l) * &self.bids[i];
            let next = if finish > *span { finish } else { span.clone() };
            tried.push(key);
            if next >= self.best {
                continue;
            }
            self.loads[i] += l;
            self.current[j] = i;
            self.search(j + 1, &next)?;
            self.loads[i] -= l;
        }
        Ok(())
    }
}

/// Exact minimum makespan by branch and bound, treating bids as speeds.
///
/// `budget` caps the number of search nodes.
pub fn opt_makespan(instance: &Instance, budget: u64) -> Result<(Assignment, Rational)> {
    let jobs = instance.jobs();
    let bids = instance.bids();
    let m = bids.len();
    let order = bid_order(bids);

    // greedy earliest-finish schedule seeds the incumbent
    let mut loads = vec![Rational::zero(); m];
    let mut greedy = Vec::with_capacity(jobs.len());
    for l in jobs {
        let i = *order.iter().min_by_key(|&&i| (&loads[i] + l) * &bids[i]).expect("machines");
        loads[i] += l;
        greedy.push(i);
    }
    let greedy_span = makespan_of(&loads, bids)?;
    let inverse_sum: Rational = bids.iter().map(|b| b.recip()).sum();

    let mut search = OptSearch {
        jobs,
        bids,
        global_bound: instance.total_length() / inverse_sum,
        fastest: bids[order[0]].clone(),
        order,
        loads: vec![Rational::zero(); m],
        current: vec![0; jobs.len()],
        best: greedy_span,
        best_map: greedy,
        nodes: 0,
        budget,
    };
    search.search(0, &Rational::zero())?;
    let assignment = Assignment::new(jobs, m, search.best_map)?;
    Ok((assignment, search.best))
}

/// Two machines: the split minimizing makespan, ties broken by minimum total
/// running time `Σ b_i w_i`, then by enumeration order.
pub fn two_machine_opt(instance: &Instance) -> Result<Assignment> {
    if instance.machines() != 2 {
        return Err(Error::Domain(format!("two_machine_opt needs 2 machines, got {}", instance.machines())));
    }
    let n = instance.job_count();
    if n > TWO_MACHINE_MAX_JOBS {
        return Err(Error::BudgetExceeded { budget: 1u64 << TWO_MACHINE_MAX_JOBS });
    }
    let jobs = instance.jobs();
    let (b0, b1) = (&instance.bids()[0], &instance.bids()[1]);
    let total = instance.total_length();
    let mut best: Option<(Rational, Rational, u64)> = None;
    for mask in 0..(1u64 << n) {
        let second: Rational = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| &jobs[j]).sum();
        let first = total - &second;
        let (t0, t1) = (&first * b0, &second * b1);
        let span = if t0 > t1 { t0.clone() } else { t1.clone() };
        let running = t0 + t1;
        let better = match &best {
            None => true,
            Some((s, r, _)) => (&span, &running) < (s, r),
        };
        if better {
            best = Some((span, running, mask));
        }
    }
    let mask = best.expect("at least one split").2;
    let map = (0..n).map(|j| (mask >> j & 1) as usize).collect();
    Assignment::new(jobs, 2, map)
}
