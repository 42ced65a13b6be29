//! A machine's workload as a function of its own bid, with everyone else's
//! bid held fixed.
//!
//! For deterministic rules the curve is a step function; [`build_workcurve`]
//! recovers it exactly from seeded candidate breakpoints and bisection.
//! [`expected_workcurve`] handles the binning rule, whose expected workload is
//! piecewise linear-fractional and whose integrals carry logarithms.

mod expected;

pub use expected::{expected_workcurve, ExpectedCurve, ExpectedPiece, LinearFractional, LogIntegral, PieceForm};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::allocations::AllocationRule;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{ceil_log2, int, midpoint, pow2, Rational};

/// Halvings allowed when locating an unseeded breakpoint.
pub const DEFAULT_MAX_DEPTH: u32 = 64;
/// Rule evaluations allowed for one curve.
pub const DEFAULT_EVAL_BUDGET: usize = 200_000;
/// Above this many distinct subset sums the seeds fall back to prefix sums.
const MAX_SUBSET_SUMS: usize = 64;

/// Step function on `(0, ∞)`.
///
/// `values[k]` holds on `(breakpoints[k-1], breakpoints[k])` (with an implicit
/// leading breakpoint at 0) and `tail` holds beyond the last breakpoint. The
/// value at a breakpoint itself is taken from the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkCurve {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    tail: Rational,
    /// Upper end of the probed range when the curve was discovered.
    cap: Option<Rational>,
    /// The tail value was not confirmed beyond `cap`.
    truncated: bool,
    /// Some breakpoint was only bracketed, not located exactly.
    approximate: bool,
}

/// Two bids where the workload went up as the bid went up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub lower_bid: Rational,
    pub lower_value: Rational,
    pub higher_bid: Rational,
    pub higher_value: Rational,
}

impl WorkCurve {
    pub fn from_steps(breakpoints: Vec<Rational>, values: Vec<Rational>, tail: Rational) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::Dimension { expected: breakpoints.len(), found: values.len() });
        }
        if breakpoints.first().is_some_and(|x| !x.is_positive()) {
            return Err(Error::Domain("breakpoints must be positive".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        Ok(WorkCurve { breakpoints, values, tail, cap: None, truncated: false, approximate: false })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    pub fn cap(&self) -> Option<&Rational> {
        self.cap.as_ref()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// Both exactly located and confirmed beyond the probed range.
    pub fn is_exact(&self) -> bool {
        !self.approximate && !self.truncated
    }

    /// Value at `x`, right-continuous at breakpoints.
    pub fn value_at(&self, x: &Rational) -> Rational {
        let k = self.breakpoints.partition_point(|b| b <= x);
        self.values.get(k).unwrap_or(&self.tail).clone()
    }

    /// Every piece as `(lo, hi, value)`; `hi = None` is the tail.
    pub fn pieces(&self) -> impl Iterator<Item = (Rational, Option<Rational>, &Rational)> + '_ {
        let los = core::iter::once(Rational::zero()).chain(self.breakpoints.iter().cloned());
        let his = self.breakpoints.iter().cloned().map(Some).chain(core::iter::once(None));
        los.zip(his).zip(self.values.iter().chain(core::iter::once(&self.tail))).map(|((lo, hi), v)| (lo, hi, v))
    }

    /// First place where the curve increases, if any.
    pub fn monotonicity_violation(&self) -> Option<MonotonicityViolation> {
        let pieces: Vec<_> = self.pieces().collect();
        pieces.windows(2).find(|w| w[1].2 > w[0].2).map(|w| {
            let lo_bid = match &w[0].1 {
                Some(hi) => midpoint(&w[0].0, hi),
                None => w[0].0.clone(),
            };
            let hi_bid = match &w[1].1 {
                Some(hi) => midpoint(&w[1].0, hi),
                None => &w[1].0 + int(1),
            };
            MonotonicityViolation {
                lower_bid: lo_bid,
                lower_value: w[0].2.clone(),
                higher_bid: hi_bid,
                higher_value: w[1].2.clone(),
            }
        })
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// Curve of the same rule with every bid multiplied by `c`, assuming the
    /// rule is scalable: breakpoints scale, values stay.
    pub fn scaled(&self, c: &Rational) -> WorkCurve {
        WorkCurve {
            breakpoints: self.breakpoints.iter().map(|b| b * c).collect(),
            cap: self.cap.as_ref().map(|x| x * c),
            ..self.clone()
        }
    }

    /// `∫_lo^hi` of the curve, `hi = None` meaning `∞`.
    pub fn integrate(&self, lo: &Rational, hi: Option<&Rational>) -> Result<Rational> {
        if lo.is_negative() {
            return Err(Error::Domain(format!("integration bound {lo} is negative")));
        }
        if let Some(h) = hi {
            if h < lo {
                return Err(Error::Domain(format!("empty range [{lo}, {h}]")));
            }
        }
        if self.truncated {
            let beyond = match (hi, &self.cap) {
                (None, _) => true,
                (Some(h), Some(cap)) => h > cap,
                (Some(_), None) => false,
            };
            if beyond {
                return Err(Error::Resolution("integral reaches past the probed range".into()));
            }
        }
        if hi.is_none() && !self.tail.is_zero() {
            return Err(Error::Divergent);
        }
        let mut total = Rational::zero();
        for (a, b, v) in self.pieces() {
            if v.is_zero() {
                continue;
            }
            let start = if a > *lo { a } else { lo.clone() };
            let end = match (b, hi) {
                (Some(b), Some(h)) => {
                    if b < *h {
                        b
                    } else {
                        h.clone()
                    }
                }
                (Some(b), None) => b,
                (None, Some(h)) => h.clone(),
                (None, None) => unreachable!("zero tail skipped above"),
            };
            if end > start {
                total += v * (end - start);
            }
        }
        Ok(total)
    }
}

/// `integrate(curve, lo, hi)` as a free function.
pub fn integrate(curve: &WorkCurve, lo: &Rational, hi: Option<&Rational>) -> Result<Rational> {
    curve.integrate(lo, hi)
}

/// Distinct subset sums of `jobs`, or prefix/suffix sums and single lengths
/// when there are too many subsets.
fn load_levels(jobs: &[Rational]) -> Vec<Rational> {
    let mut sums: BTreeSet<Rational> = BTreeSet::new();
    sums.insert(Rational::zero());
    if jobs.len() <= 12 {
        for l in jobs {
            let next: Vec<Rational> = sums.iter().map(|s| s + l).collect();
            sums.extend(next);
            if sums.len() > MAX_SUBSET_SUMS {
                break;
            }
        }
    }
    if sums.len() > MAX_SUBSET_SUMS || jobs.len() > 12 {
        sums.clear();
        let total: Rational = jobs.iter().sum();
        let mut prefix = Rational::zero();
        sums.insert(Rational::zero());
        for l in jobs {
            prefix += l;
            sums.insert(prefix.clone());
            sums.insert(&total - &prefix);
            sums.insert(l.clone());
        }
    }
    sums.into_iter().collect()
}

/// Candidate breakpoints on `(0, cap)`: the other bids, every
/// `b · B / A` for other bids `b` and load levels `A > 0, B`, and the powers
/// of two down to a quarter of the smallest such ratio.
pub fn candidate_seeds(others: &[Rational], jobs: &[Rational], cap: &Rational) -> Vec<Rational> {
    let mut seeds: BTreeSet<Rational> = others.iter().cloned().collect();
    let levels = load_levels(jobs);
    for b in others {
        for a in levels.iter().filter(|a| a.is_positive()) {
            for l in levels.iter().filter(|l| l.is_positive()) {
                seeds.insert(b * l / a);
            }
        }
    }
    let smallest = seeds.iter().next().cloned().unwrap_or_else(|| cap.clone());
    if let (Ok(lo), Ok(hi)) = (ceil_log2(&(smallest / int(4))), ceil_log2(cap)) {
        for e in lo..=hi {
            seeds.insert(pow2(e));
        }
    }
    seeds.into_iter().filter(|x| x.is_positive() && x < cap).collect()
}

struct Discovery<F> {
    eval: F,
    max_depth: u32,
    evals_left: usize,
    approximate: bool,
    pieces: Vec<(Rational, Rational)>,
}

impl<F: FnMut(&Rational) -> Result<Rational>> Discovery<F> {
    fn sample(&mut self, x: &Rational) -> Result<Rational> {
        if self.evals_left == 0 {
            return Err(Error::Resolution("evaluation budget exhausted; curve is not a coarse step function".into()));
        }
        self.evals_left -= 1;
        (self.eval)(x)
    }

    fn push(&mut self, hi: Rational, value: Rational) {
        match self.pieces.last_mut() {
            Some((end, v)) if *v == value => *end = hi,
            _ => self.pieces.push((hi, value)),
        }
    }

    /// Samples the window `(lo, hi)` between two seeds. A value change
    /// between samples means an unseeded breakpoint; it is bracketed by
    /// bisection and the curve is marked approximate.
    fn resolve(&mut self, lo: &Rational, hi: &Rational) -> Result<()> {
        let width = hi - lo;
        let mut probes: Vec<Rational> = (1..4).map(|k| lo + &width * int(k) / int(4)).collect();
        if lo.is_zero() {
            probes.insert(0, hi / int(1024));
        }
        let mut values = Vec::with_capacity(probes.len());
        for p in &probes {
            values.push(self.sample(p)?);
        }
        for k in 1..probes.len() {
            if values[k] == values[k - 1] {
                continue;
            }
            let (mut a, mut b) = (probes[k - 1].clone(), probes[k].clone());
            for _ in 0..self.max_depth {
                let mid = midpoint(&a, &b);
                if self.sample(&mid)? == values[k - 1] {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            self.approximate = true;
            self.push(b, values[k - 1].clone());
        }
        self.push(hi.clone(), values.pop().expect("probes"));
        Ok(())
    }
}

/// Builds a step curve for an arbitrary evaluation function on `(0, cap]`.
pub fn build_curve_with<F>(eval: F, seeds: &[Rational], cap: &Rational, max_depth: u32) -> Result<WorkCurve>
where
    F: FnMut(&Rational) -> Result<Rational>,
{
    if !cap.is_positive() {
        return Err(Error::Domain(format!("cap {cap} must be positive")));
    }
    let mut points: Vec<Rational> = seeds.iter().filter(|s| s.is_positive() && *s < cap).cloned().collect();
    points.sort();
    points.dedup();
    points.insert(0, Rational::zero());
    points.push(cap.clone());

    let mut d = Discovery { eval, max_depth, evals_left: DEFAULT_EVAL_BUDGET, approximate: false, pieces: Vec::new() };
    for w in points.windows(2) {
        d.resolve(&w[0], &w[1])?;
    }
    let last = d.pieces.last().expect("at least one piece").1.clone();
    let beyond = [d.sample(&(cap * int(2)))?, d.sample(&(cap * int(4)))?];
    let truncated = beyond.iter().any(|v| *v != last);

    let (tail_end, tail) = d.pieces.pop().expect("at least one piece");
    debug_assert_eq!(&tail_end, cap);
    let (breakpoints, values) = d.pieces.into_iter().unzip();
    Ok(WorkCurve { breakpoints, values, tail, cap: Some(cap.clone()), truncated, approximate: d.approximate })
}

/// Workload of machine `read` as machine `vary` changes its bid, the other
/// bids taken from `bids`.
pub fn build_response_curve<R: AllocationRule + ?Sized>(
    rule: &R,
    bids: &[Rational],
    vary: usize,
    read: usize,
    jobs: &[Rational],
    cap: &Rational,
) -> Result<WorkCurve> {
    if rule.is_randomized() {
        return Err(Error::Domain(format!("{} is randomized; use expected_workcurve", rule.name())));
    }
    if vary >= bids.len() || read >= bids.len() {
        return Err(Error::Dimension { expected: bids.len(), found: vary.max(read) + 1 });
    }
    let others: Vec<Rational> = bids.iter().enumerate().filter(|&(i, _)| i != vary).map(|(_, b)| b.clone()).collect();
    let seeds = candidate_seeds(&others, jobs, cap);
    let base = Instance::new(jobs.to_vec(), bids.to_vec())?;
    let eval = |x: &Rational| -> Result<Rational> {
        let inst = base.with_bid(vary, x.clone())?;
        Ok(rule.workloads(&inst)?[read].clone())
    };
    build_curve_with(eval, &seeds, cap, DEFAULT_MAX_DEPTH)
}

/// Machine `machine`'s own workcurve at the profile `bids`.
pub fn build_workcurve_for<R: AllocationRule + ?Sized>(
    rule: &R,
    bids: &[Rational],
    machine: usize,
    jobs: &[Rational],
    cap: &Rational,
) -> Result<WorkCurve> {
    build_response_curve(rule, bids, machine, machine, jobs, cap)
}

/// Workcurve of machine 0 against `others` (machines 1..m).
pub fn build_workcurve<R: AllocationRule + ?Sized>(
    rule: &R,
    others: &[Rational],
    jobs: &[Rational],
    cap: &Rational,
) -> Result<WorkCurve> {
    let mut bids = Vec::with_capacity(others.len() + 1);
    bids.push(cap.clone());
    bids.extend_from_slice(others);
    build_workcurve_for(rule, &bids, 0, jobs, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocations::Rule;
    use crate::rational::ratio;
    use alloc::vec;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn lpt_star_curve_against_eight() {
        let c = build_workcurve(&Rule::lpt_star(), &ints(&[8]), &ints(&[2, 1]), &int(64)).unwrap();
        assert_eq!(c.breakpoints(), &ints(&[2, 8, 16])[..]);
        assert_eq!(c.values(), &ints(&[3, 2, 1])[..]);
        assert_eq!(c.tail(), &int(0));
        assert!(c.is_exact());
        assert_eq!(c.integrate(&int(0), None).unwrap(), int(26));
    }

    #[test]
    fn vcg_curve_is_a_single_step() {
        let c = build_workcurve(&Rule::Vcg, &ints(&[1]), &ints(&[2, 1]), &int(8)).unwrap();
        assert_eq!(c.breakpoints(), &ints(&[1])[..]);
        assert_eq!(c.values(), &ints(&[3])[..]);
        assert_eq!(c.integrate(&int(0), None).unwrap(), int(3));
    }

    #[test]
    fn two_machine_opt_curve() {
        // w(x, a) = 3 on (0, a/3), 2 on (a/3, a), 1 on (a, 3a), 0 after
        let a = int(6);
        let c = build_workcurve(&Rule::TwoMachineOpt, core::slice::from_ref(&a), &ints(&[2, 1]), &int(64)).unwrap();
        assert_eq!(c.breakpoints(), &ints(&[2, 6, 18])[..]);
        assert_eq!(c.values(), &ints(&[3, 2, 1])[..]);
        assert_eq!(c.tail(), &int(0));
    }

    #[test]
    fn integrate_constant_piece() {
        let c = WorkCurve::from_steps(ints(&[1]), ints(&[3]), int(0)).unwrap();
        assert_eq!(c.integrate(&int(0), Some(&ratio(1, 2))).unwrap(), ratio(3, 2));
        assert_eq!(c.integrate(&ratio(1, 2), Some(&int(5))).unwrap(), ratio(3, 2));
        assert!(c.integrate(&int(2), Some(&int(1))).is_err());
        assert!(c.integrate(&int(-1), Some(&int(1))).is_err());
    }

    #[test]
    fn nonzero_tail_diverges() {
        let c = WorkCurve::from_steps(vec![], vec![], int(3)).unwrap();
        assert_eq!(c.integrate(&int(0), None), Err(Error::Divergent));
        assert_eq!(c.integrate(&int(0), Some(&int(2))).unwrap(), int(6));
    }

    #[test]
    fn single_machine_curve_is_constant() {
        let c = build_workcurve(&Rule::lpt_star(), &[], &ints(&[2, 1]), &int(16)).unwrap();
        assert!(c.breakpoints().is_empty());
        assert_eq!(c.tail(), &int(3));
    }

    #[test]
    fn short_cap_is_flagged_truncated() {
        let c = build_workcurve(&Rule::lpt_star(), &ints(&[8]), &ints(&[2, 1]), &int(12)).unwrap();
        assert!(c.is_truncated());
        assert!(c.integrate(&int(0), None).is_err());
        assert_eq!(c.integrate(&int(0), Some(&int(12))).unwrap(), int(6 + 12 + 4));
    }

    #[test]
    fn monotonicity_violation_is_reported() {
        let c = WorkCurve::from_steps(ints(&[1, 2]), ints(&[1, 2]), int(0)).unwrap();
        let v = c.monotonicity_violation().unwrap();
        assert_eq!(v.lower_value, int(1));
        assert_eq!(v.higher_value, int(2));
        assert!(v.lower_bid < v.higher_bid);
        let ok = WorkCurve::from_steps(ints(&[1, 2]), ints(&[2, 1]), int(0)).unwrap();
        assert!(ok.is_nonincreasing());
    }

    #[test]
    fn seeded_breakpoints_are_exact() {
        let eval = |x: &Rational| Ok(if *x < ratio(1, 3) { int(2) } else { int(1) });
        let c = build_curve_with(eval, &[ratio(1, 3)], &int(1), DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(c.breakpoints(), &[ratio(1, 3)][..]);
        assert!(c.is_exact());
    }

    #[test]
    fn unseeded_breakpoint_is_bracketed_and_flagged() {
        let eval = |x: &Rational| Ok(if *x < ratio(1, 3) { int(2) } else { int(1) });
        let c = build_curve_with(eval, &[], &int(1), 30).unwrap();
        assert!(c.is_approximate());
        assert_eq!(c.values(), &ints(&[2])[..]);
        let error = &c.breakpoints()[0] - ratio(1, 3);
        assert!(!error.is_negative() && error < ratio(1, 1 << 30));
    }

    #[test]
    fn randomized_rules_are_refused() {
        assert!(build_workcurve(&Rule::AtExpected, &ints(&[1]), &ints(&[2, 1]), &int(8)).is_err());
    }
}
