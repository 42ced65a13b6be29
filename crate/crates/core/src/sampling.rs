//! Random instances for property checks and benchmarks.

use alloc::vec::Vec;

use rand::Rng;

use crate::model::Instance;
use crate::rational::{int, pow2, Rational};

/// Shape of sampled instances. Lengths and bids are `p/q` with
/// `1 ≤ p ≤ max_numerator`, `1 ≤ q ≤ max_denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSampler {
    pub min_machines: usize,
    pub max_machines: usize,
    pub min_jobs: usize,
    pub max_jobs: usize,
    pub max_numerator: i64,
    pub max_denominator: i64,
    /// When set, about half the bids sit on or just beside a power of two.
    pub straddle_powers_of_two: bool,
}

impl Default for InstanceSampler {
    fn default() -> Self {
        InstanceSampler {
            min_machines: 1,
            max_machines: 4,
            min_jobs: 1,
            max_jobs: 6,
            max_numerator: 12,
            max_denominator: 4,
            straddle_powers_of_two: false,
        }
    }
}

impl InstanceSampler {
    pub fn machines(mut self, lo: usize, hi: usize) -> Self {
        self.min_machines = lo;
        self.max_machines = hi;
        self
    }

    pub fn jobs(mut self, lo: usize, hi: usize) -> Self {
        self.min_jobs = lo;
        self.max_jobs = hi;
        self
    }

    pub fn straddling(mut self) -> Self {
        self.straddle_powers_of_two = true;
        self
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Instance {
        let m = rng.gen_range(self.min_machines..=self.max_machines);
        let n = rng.gen_range(self.min_jobs..=self.max_jobs);
        let jobs = (0..n).map(|_| random_rational(rng, self.max_numerator, self.max_denominator)).collect();
        let bids = (0..m)
            .map(|_| {
                if self.straddle_powers_of_two && rng.gen_bool(0.5) {
                    straddling_bid(rng)
                } else {
                    random_rational(rng, self.max_numerator, self.max_denominator)
                }
            })
            .collect();
        Instance::new(jobs, bids).expect("sampled values are positive")
    }
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, max_numerator: i64, max_denominator: i64) -> Rational {
    Rational::new(rng.gen_range(1..=max_numerator).into(), rng.gen_range(1..=max_denominator).into())
}

/// `2^k`, `2^k(1 + 1/d)` or `2^k(1 − 1/d)` for small `k` and `d`.
pub fn straddling_bid<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let base = pow2(rng.gen_range(-3..=5));
    let d = int(rng.gen_range(2..=16));
    match rng.gen_range(0..3) {
        0 => base,
        1 => &base + &base / d,
        _ => &base - &base / d,
    }
}

/// Random bids with workloads that never give a slower machine more work.
pub fn random_locally_efficient<R: Rng + ?Sized>(rng: &mut R, machines: usize) -> (Vec<Rational>, Vec<Rational>) {
    let bids: Vec<Rational> = (0..machines)
        .map(|_| if rng.gen_bool(0.3) { int(rng.gen_range(1..=3)) } else { random_rational(rng, 10, 4) })
        .collect();
    let mut loads: Vec<Rational> = (0..machines)
        .map(|_| if rng.gen_bool(0.2) { int(0) } else { random_rational(rng, 10, 3) })
        .collect();
    loads.sort_by(|a, b| b.cmp(a));
    let mut order: Vec<usize> = (0..machines).collect();
    order.sort_by(|&a, &b| bids[a].cmp(&bids[b]));
    let mut workloads = alloc::vec![int(0); machines];
    for (rank, &i) in order.iter().enumerate() {
        workloads[i] = loads[rank].clone();
    }
    (bids, workloads)
}
