//! Property checks over many instances, optionally across worker threads.
//! Results always come back in input order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use relmech_core::allocations::DEFAULT_OPT_BUDGET;
use relmech_core::properties::{
    approx_ratio, check_anonymous, check_envy_free, check_ir, check_local_efficiency, check_monotone, check_scalable,
    check_truthful, default_grid,
};
use relmech_core::rational::ratio;
use relmech_core::sampling::InstanceSampler;
use relmech_core::{AllocationRule, Instance, Mechanism, PaymentScheme, Property, PropertyVerdict, Rational, Rule, RuleMechanism};

/// Clarke pivot for VCG, envy-free chain payments for everything else.
pub fn default_scheme(rule: &Rule) -> PaymentScheme {
    match rule {
        Rule::Vcg => PaymentScheme::ClarkePivot,
        _ => PaymentScheme::EfChain,
    }
}

pub fn mechanism(rule_name: &str, scheme: Option<PaymentScheme>) -> relmech_core::Result<RuleMechanism<Rule>> {
    let rule: Rule = rule_name.parse()?;
    let scheme = scheme.unwrap_or_else(|| default_scheme(&rule));
    Ok(RuleMechanism::new(rule, scheme))
}

pub fn default_scalars() -> Vec<Rational> {
    vec![Rational::from_integer(2.into()), ratio(1, 3), ratio(7, 5)]
}

pub fn random_instances(count: usize, seed: u64, sampler: &InstanceSampler) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}

/// One property on one instance. `grid` defaults to [`default_grid`].
pub fn check_instance<M: Mechanism + ?Sized>(
    property: Property,
    mechanism: &M,
    instance: &Instance,
    grid: Option<&[Rational]>,
    scalars: &[Rational],
) -> relmech_core::Result<PropertyVerdict> {
    let own_grid;
    let grid = match grid {
        Some(g) => g,
        None => {
            own_grid = default_grid(instance.bids());
            &own_grid
        }
    };
    match property {
        Property::LocalEfficiency => check_local_efficiency(instance.bids(), &mechanism.rule().workloads(instance)?),
        Property::EnvyFree => {
            let o = mechanism.run(instance)?;
            check_envy_free(instance.bids(), o.workloads(), &o.payments)
        }
        Property::IndividuallyRational => {
            let o = mechanism.run(instance)?;
            check_ir(instance.bids(), o.workloads(), &o.payments)
        }
        Property::Truthful => check_truthful(mechanism, instance, grid),
        Property::Monotone => check_monotone(mechanism.rule(), instance, grid),
        Property::Anonymous => check_anonymous(mechanism, instance),
        Property::Scalable => check_scalable(mechanism.rule(), instance, scalars),
    }
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool")
}

pub fn check_many<M: Mechanism + Sync + ?Sized>(
    property: Property,
    mechanism: &M,
    instances: &[Instance],
    grid: Option<&[Rational]>,
    scalars: &[Rational],
    workers: usize,
) -> Vec<relmech_core::Result<PropertyVerdict>> {
    pool(workers).install(|| {
        instances.par_iter().map(|inst| check_instance(property, mechanism, inst, grid, scalars)).collect()
    })
}

pub fn ratios<R: AllocationRule + Sync + ?Sized>(
    rule: &R,
    instances: &[Instance],
    budget: Option<u64>,
    workers: usize,
) -> Vec<relmech_core::Result<Rational>> {
    let budget = budget.unwrap_or(DEFAULT_OPT_BUDGET);
    pool(workers).install(|| instances.par_iter().map(|inst| approx_ratio(rule, inst, budget)).collect())
}
