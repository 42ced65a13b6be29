//! Property checkers.
//!
//! Every failing verdict carries a [`Counterexample`]: the profile, what was
//! changed, and the required relation between two exact rationals that does
//! not hold. [`Counterexample::is_violation`] re-evaluates it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::allocations::{opt_makespan, AllocationRule};
use crate::error::{Error, Result};
use crate::model::{makespan_of, Instance, Outcome};
use crate::payments::Mechanism;
use crate::rational::{int, Rational};

/// Local-efficiency checks enumerate all permutations up to this many
/// machines as a cross-check of the pairwise criterion.
pub const PERMUTATION_CROSS_CHECK_MAX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    LocalEfficiency,
    EnvyFree,
    IndividuallyRational,
    Truthful,
    Monotone,
    Anonymous,
    Scalable,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::LocalEfficiency,
        Property::EnvyFree,
        Property::IndividuallyRational,
        Property::Truthful,
        Property::Monotone,
        Property::Anonymous,
        Property::Scalable,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Property::LocalEfficiency => "le",
            Property::EnvyFree => "ef",
            Property::IndividuallyRational => "ir",
            Property::Truthful => "truthful",
            Property::Monotone => "monotone",
            Property::Anonymous => "anonymous",
            Property::Scalable => "scalable",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .iter()
            .copied()
            .find(|p| p.short_name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown property {s:?}")))
    }
}

/// The relation a property requires between `lhs` and `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Ge,
    Gt,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "==",
        }
    }
}

/// What was perturbed to expose a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Reassigning bundles: machine `i` takes the workload of `permutation[i]`.
    Permutation(Vec<usize>),
    /// `machine` prefers the bundle of `envies`.
    Envy { machine: usize, envies: usize },
    /// `machine` has negative utility.
    Machine(usize),
    /// `machine` with true speed `true_bid` gains by reporting `reported`.
    Deviation { machine: usize, true_bid: Rational, reported: Rational },
    /// Workload of `machine` rises when its bid rises from `lower` to `higher`.
    Increase { machine: usize, lower: Rational, higher: Rational },
    /// Swapping the bids of `first` and `second` does not swap their outcomes.
    Swap { first: usize, second: usize },
    /// Scaling all bids by `factor` changes the allocation of `machine`.
    Scale { factor: Rational, machine: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub bids: Vec<Rational>,
    pub witness: Witness,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Counterexample {
    /// True when the recorded inequality indeed fails.
    pub fn is_violation(&self) -> bool {
        !self.relation.holds(&self.lhs, &self.rhs)
    }

    pub fn inequality(&self) -> String {
        format!("{} {} {}", self.lhs, self.relation.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub property: Property,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    /// Number of inequalities evaluated.
    pub checked: usize,
}

impl PropertyVerdict {
    fn new(property: Property) -> Self {
        PropertyVerdict { property, passed: true, counterexample: None, checked: 0 }
    }

    fn check(&mut self, bids: &[Rational], witness: impl FnOnce() -> Witness, lhs: Rational, relation: Relation, rhs: Rational) -> bool {
        self.checked += 1;
        if relation.holds(&lhs, &rhs) {
            return true;
        }
        self.passed = false;
        self.counterexample = Some(Counterexample { bids: bids.to_vec(), witness: witness(), lhs, relation, rhs });
        false
    }
}

fn same_len(a: &[Rational], b: &[Rational]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), found: b.len() });
    }
    Ok(())
}

fn dot(bids: &[Rational], workloads: &[Rational], perm: &[usize]) -> Rational {
    bids.iter().zip(perm).map(|(b, &k)| b * &workloads[k]).sum()
}

/// The best bundle permutation by exhaustive search, when it is strictly
/// better than the identity.
pub fn improving_permutation(bids: &[Rational], workloads: &[Rational]) -> Option<(Vec<usize>, Rational)> {
    let m = bids.len();
    let identity: Vec<usize> = (0..m).collect();
    let base = dot(bids, workloads, &identity);
    let mut best: Option<(Vec<usize>, Rational)> = None;
    let mut perm = identity;
    permute(&mut perm, 0, &mut |p| {
        let v = dot(bids, workloads, p);
        if v < base && best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((p.to_vec(), v));
        }
    });
    best
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Faster machines (smaller bids) get no less work.
///
/// A failing pair `b_i > b_k`, `w_i > w_k` is reported as the swap of the two
/// bundles, which lowers `Σ b_i w_i`.
pub fn check_local_efficiency(bids: &[Rational], workloads: &[Rational]) -> Result<PropertyVerdict> {
    same_len(bids, workloads)?;
    let mut verdict = PropertyVerdict::new(Property::LocalEfficiency);
    let m = bids.len();
    let identity: Vec<usize> = (0..m).collect();
    'outer: for i in 0..m {
        for k in 0..m {
            if i == k || bids[i] <= bids[k] {
                continue;
            }
            let mut perm = identity.clone();
            perm.swap(i, k);
            let lhs = if workloads[i] > workloads[k] { dot(bids, workloads, &identity) } else { Rational::zero() };
            let rhs = if workloads[i] > workloads[k] { dot(bids, workloads, &perm) } else { Rational::zero() };
            if !verdict.check(bids, || Witness::Permutation(perm.clone()), lhs, Relation::Le, rhs) {
                break 'outer;
            }
        }
    }
    if m <= PERMUTATION_CROSS_CHECK_MAX && verdict.passed != improving_permutation(bids, workloads).is_none() {
        return Err(Error::Internal(format!(
            "pairwise local efficiency ({}) disagrees with permutation search",
            verdict.passed
        )));
    }
    Ok(verdict)
}

/// `p_i − b_i w_i ≥ p_j − b_i w_j` for all ordered pairs.
pub fn check_envy_free(bids: &[Rational], workloads: &[Rational], payments: &[Rational]) -> Result<PropertyVerdict> {
    same_len(bids, workloads)?;
    same_len(bids, payments)?;
    let mut verdict = PropertyVerdict::new(Property::EnvyFree);
    for i in 0..bids.len() {
        let own = &payments[i] - &bids[i] * &workloads[i];
        for j in 0..bids.len() {
            if i == j {
                continue;
            }
            let other = &payments[j] - &bids[i] * &workloads[j];
            if !verdict.check(bids, || Witness::Envy { machine: i, envies: j }, own.clone(), Relation::Ge, other) {
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

/// `p_i − b_i w_i ≥ 0` with bids read as true speeds.
pub fn check_ir(bids: &[Rational], workloads: &[Rational], payments: &[Rational]) -> Result<PropertyVerdict> {
    same_len(bids, workloads)?;
    same_len(bids, payments)?;
    let mut verdict = PropertyVerdict::new(Property::IndividuallyRational);
    for i in 0..bids.len() {
        let u = &payments[i] - &bids[i] * &workloads[i];
        if !verdict.check(bids, || Witness::Machine(i), u, Relation::Ge, Rational::zero()) {
            break;
        }
    }
    Ok(verdict)
}

/// `{j/8 · max(b)/4 : 1 ≤ j ≤ 64}` plus the bids themselves, sorted.
pub fn default_grid(bids: &[Rational]) -> Vec<Rational> {
    let top = bids.iter().max().cloned().unwrap_or_else(Rational::one);
    let mut grid: Vec<Rational> = (1..=64).map(|j| int(j) * &top / int(32)).collect();
    grid.extend_from_slice(bids);
    grid.sort();
    grid.dedup();
    grid
}

fn own_points(grid: &[Rational], bid: &Rational) -> Vec<Rational> {
    let mut points: Vec<Rational> = grid.iter().filter(|x| x.is_positive()).cloned().collect();
    points.push(bid.clone());
    points.sort();
    points.dedup();
    points
}

/// Grid truthfulness. For each machine, every point of `grid ∪ {b_i}` is
/// taken both as a true speed and as a report, others fixed:
/// `p_i(t) − t·w_i(t) ≥ p_i(d) − t·w_i(d)`.
pub fn check_truthful<M: Mechanism + ?Sized>(mechanism: &M, instance: &Instance, grid: &[Rational]) -> Result<PropertyVerdict> {
    let mut verdict = PropertyVerdict::new(Property::Truthful);
    for i in 0..instance.machines() {
        let points = own_points(grid, &instance.bids()[i]);
        let outcomes: Vec<Outcome> =
            points.iter().map(|x| mechanism.run(&instance.with_bid(i, x.clone())?)).collect::<Result<_>>()?;
        for (t, truth) in points.iter().zip(&outcomes) {
            let honest = &truth.payments[i] - t * &truth.workloads()[i];
            for (d, lie) in points.iter().zip(&outcomes) {
                if d == t {
                    continue;
                }
                let deviant = &lie.payments[i] - t * &lie.workloads()[i];
                let bids = instance.with_bid(i, t.clone())?.bids().to_vec();
                let witness = || Witness::Deviation { machine: i, true_bid: t.clone(), reported: d.clone() };
                if !verdict.check(&bids, witness, honest.clone(), Relation::Ge, deviant) {
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// Workloads are nonincreasing in the own bid along `grid ∪ {b_i}`.
pub fn check_monotone<R: AllocationRule + ?Sized>(rule: &R, instance: &Instance, grid: &[Rational]) -> Result<PropertyVerdict> {
    let mut verdict = PropertyVerdict::new(Property::Monotone);
    for i in 0..instance.machines() {
        let points = own_points(grid, &instance.bids()[i]);
        let mut previous: Option<(Rational, Rational)> = None;
        for x in points {
            let w = rule.workloads(&instance.with_bid(i, x.clone())?)?[i].clone();
            if let Some((px, pw)) = previous {
                let bids = instance.with_bid(i, x.clone())?.bids().to_vec();
                let witness = || Witness::Increase { machine: i, lower: px.clone(), higher: x.clone() };
                if !verdict.check(&bids, witness, pw, Relation::Ge, w.clone()) {
                    return Ok(verdict);
                }
            }
            previous = Some((x, w));
        }
    }
    Ok(verdict)
}

/// Swapping the bids of `k` (holding a unique bid) and any `l` moves `k`'s
/// workload and payment to position `l`. Nothing is required of `l`'s own
/// bundle, which may be shared with equal bids.
pub fn check_anonymous<M: Mechanism + ?Sized>(mechanism: &M, instance: &Instance) -> Result<PropertyVerdict> {
    let mut verdict = PropertyVerdict::new(Property::Anonymous);
    let bids = instance.bids();
    let base = mechanism.run(instance)?;
    for k in 0..bids.len() {
        if bids.iter().filter(|b| **b == bids[k]).count() != 1 {
            continue;
        }
        for l in 0..bids.len() {
            if l == k {
                continue;
            }
            let swapped = instance.with_swapped_bids(k, l);
            let out = mechanism.run(&swapped)?;
            let pairs = [
                (out.workloads()[l].clone(), base.workloads()[k].clone()),
                (out.payments[l].clone(), base.payments[k].clone()),
            ];
            for (lhs, rhs) in pairs {
                if !verdict.check(swapped.bids(), || Witness::Swap { first: k, second: l }, lhs, Relation::Eq, rhs) {
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// The allocation is unchanged when every bid is multiplied by each scalar.
pub fn check_scalable<R: AllocationRule + ?Sized>(rule: &R, instance: &Instance, scalars: &[Rational]) -> Result<PropertyVerdict> {
    let mut verdict = PropertyVerdict::new(Property::Scalable);
    let base = rule.allocate(instance)?;
    for c in scalars {
        let scaled = instance.scaled_bids(c)?;
        let alloc = rule.allocate(&scaled)?;
        for i in 0..instance.machines() {
            let lhs = alloc.workloads()[i].clone();
            let rhs = base.workloads()[i].clone();
            if !verdict.check(scaled.bids(), || Witness::Scale { factor: c.clone(), machine: i }, lhs, Relation::Eq, rhs) {
                return Ok(verdict);
            }
        }
    }
    Ok(verdict)
}

/// `makespan(rule) / OPT`, both exact. Only defined for deterministic rules.
pub fn approx_ratio<R: AllocationRule + ?Sized>(rule: &R, instance: &Instance, budget: u64) -> Result<Rational> {
    if rule.is_randomized() {
        return Err(Error::Domain(format!("{} is randomized; its makespan is a random variable", rule.name())));
    }
    let achieved = makespan_of(&rule.workloads(instance)?, instance.bids())?;
    let (_, opt) = opt_makespan(instance, budget)?;
    Ok(achieved / opt)
}
