//! Instances, allocations and the basic quantities computed from them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Jobs (sorted nonincreasing) and one bid per machine.
///
/// Jobs are sorted at construction. `job_ids()[j]` is the position the
/// `j`-th longest job had in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Rational>,
    job_ids: Vec<usize>,
    bids: Vec<Rational>,
    total_length: Rational,
}

impl Instance {
    pub fn new(jobs: Vec<Rational>, bids: Vec<Rational>) -> Result<Self> {
        if jobs.is_empty() {
            return Err(Error::InvalidInstance("no jobs".into()));
        }
        if bids.is_empty() {
            return Err(Error::InvalidInstance("no machines".into()));
        }
        if let Some(l) = jobs.iter().find(|l| !l.is_positive()) {
            return Err(Error::InvalidInstance(format!("job length {l} is not positive")));
        }
        if let Some(b) = bids.iter().find(|b| !b.is_positive()) {
            return Err(Error::InvalidInstance(format!("bid {b} is not positive")));
        }
        let mut order: Vec<usize> = (0..jobs.len()).collect();
        // stable: equal lengths keep their input order
        order.sort_by(|&a, &b| jobs[b].cmp(&jobs[a]));
        let sorted: Vec<Rational> = order.iter().map(|&j| jobs[j].clone()).collect();
        let total_length = sorted.iter().sum();
        Ok(Instance { jobs: sorted, job_ids: order, bids, total_length })
    }

    pub fn jobs(&self) -> &[Rational] {
        &self.jobs
    }

    pub fn job_ids(&self) -> &[usize] {
        &self.job_ids
    }

    pub fn bids(&self) -> &[Rational] {
        &self.bids
    }

    pub fn total_length(&self) -> &Rational {
        &self.total_length
    }

    pub fn machines(&self) -> usize {
        self.bids.len()
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    /// Same jobs, new bid profile.
    pub fn with_bids(&self, bids: Vec<Rational>) -> Result<Self> {
        if let Some(b) = bids.iter().find(|b| !b.is_positive()) {
            return Err(Error::InvalidInstance(format!("bid {b} is not positive")));
        }
        if bids.is_empty() {
            return Err(Error::InvalidInstance("no machines".into()));
        }
        Ok(Instance { bids, ..self.clone() })
    }

    /// Same instance with machine `machine` bidding `bid`.
    pub fn with_bid(&self, machine: usize, bid: Rational) -> Result<Self> {
        if machine >= self.machines() {
            return Err(Error::Dimension { expected: self.machines(), found: machine + 1 });
        }
        let mut bids = self.bids.clone();
        bids[machine] = bid;
        self.with_bids(bids)
    }

    /// Bids with positions `a` and `b` exchanged.
    pub fn with_swapped_bids(&self, a: usize, b: usize) -> Self {
        let mut bids = self.bids.clone();
        bids.swap(a, b);
        Instance { bids, ..self.clone() }
    }

    pub fn scaled_bids(&self, c: &Rational) -> Result<Self> {
        self.with_bids(self.bids.iter().map(|b| b * c).collect())
    }
}

/// Deterministic job-to-machine map over the instance's sorted job order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    job_to_machine: Vec<usize>,
    workloads: Vec<Rational>,
}

impl Assignment {
    pub fn new(jobs: &[Rational], machines: usize, job_to_machine: Vec<usize>) -> Result<Self> {
        if job_to_machine.len() != jobs.len() {
            return Err(Error::Dimension { expected: jobs.len(), found: job_to_machine.len() });
        }
        let mut workloads = alloc::vec![Rational::zero(); machines];
        for (j, &i) in job_to_machine.iter().enumerate() {
            if i >= machines {
                return Err(Error::Dimension { expected: machines, found: i + 1 });
            }
            workloads[i] += &jobs[j];
        }
        Ok(Assignment { job_to_machine, workloads })
    }

    pub fn job_to_machine(&self) -> &[usize] {
        &self.job_to_machine
    }

    pub fn workloads(&self) -> &[Rational] {
        &self.workloads
    }

    pub fn machines(&self) -> usize {
        self.workloads.len()
    }
}

/// Per-job machine distributions and the resulting expected workloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedAllocation {
    expected_workloads: Vec<Rational>,
    job_distributions: Vec<BTreeMap<usize, Rational>>,
}

impl ExpectedAllocation {
    pub fn new(jobs: &[Rational], machines: usize, job_distributions: Vec<BTreeMap<usize, Rational>>) -> Result<Self> {
        if job_distributions.len() != jobs.len() {
            return Err(Error::Dimension { expected: jobs.len(), found: job_distributions.len() });
        }
        let mut expected_workloads = alloc::vec![Rational::zero(); machines];
        for (j, dist) in job_distributions.iter().enumerate() {
            let mut total = Rational::zero();
            for (&i, p) in dist {
                if i >= machines {
                    return Err(Error::Dimension { expected: machines, found: i + 1 });
                }
                if p.is_negative() {
                    return Err(Error::Inconsistent(format!("negative probability {p} for job {j}")));
                }
                expected_workloads[i] += &jobs[j] * p;
                total += p;
            }
            if !total.is_one() {
                return Err(Error::Inconsistent(format!("job {j} probabilities sum to {total}")));
            }
        }
        Ok(ExpectedAllocation { expected_workloads, job_distributions })
    }

    pub fn expected_workloads(&self) -> &[Rational] {
        &self.expected_workloads
    }

    pub fn job_distributions(&self) -> &[BTreeMap<usize, Rational>] {
        &self.job_distributions
    }

    /// True when every job sits on a single machine with probability one.
    pub fn is_degenerate(&self) -> bool {
        self.job_distributions.iter().all(|d| d.values().filter(|p| !p.is_zero()).count() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Allocation {
    Deterministic(Assignment),
    Expected(ExpectedAllocation),
}

impl Allocation {
    /// Workloads, or expected workloads for randomized allocations.
    pub fn workloads(&self) -> &[Rational] {
        match self {
            Allocation::Deterministic(a) => a.workloads(),
            Allocation::Expected(e) => e.expected_workloads(),
        }
    }

    pub fn as_assignment(&self) -> Option<&Assignment> {
        match self {
            Allocation::Deterministic(a) => Some(a),
            Allocation::Expected(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub allocation: Allocation,
    pub payments: Vec<Rational>,
}

impl Outcome {
    pub fn new(allocation: Allocation, payments: Vec<Rational>) -> Result<Self> {
        let m = allocation.workloads().len();
        if payments.len() != m {
            return Err(Error::Dimension { expected: m, found: payments.len() });
        }
        Ok(Outcome { allocation, payments })
    }

    pub fn workloads(&self) -> &[Rational] {
        self.allocation.workloads()
    }

    /// Utilities at the reported profile, treating bids as true speeds.
    pub fn utilities(&self, bids: &[Rational]) -> Vec<Rational> {
        self.payments.iter().zip(bids).zip(self.workloads()).map(|((p, b), w)| utility(p, b, w)).collect()
    }
}

/// `max_i workloads_i · speeds_i`.
pub fn makespan(assignment: &Assignment, speeds: &[Rational]) -> Result<Rational> {
    makespan_of(assignment.workloads(), speeds)
}

pub fn makespan_of(workloads: &[Rational], speeds: &[Rational]) -> Result<Rational> {
    if workloads.len() != speeds.len() {
        return Err(Error::Dimension { expected: workloads.len(), found: speeds.len() });
    }
    Ok(workloads.iter().zip(speeds).map(|(w, t)| w * t).max().unwrap_or_else(Rational::zero))
}

/// `payment − true_speed · workload`.
pub fn utility(payment: &Rational, true_speed: &Rational, workload: &Rational) -> Rational {
    payment - true_speed * workload
}
