use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::allocations::AllocationRule;
use crate::error::{Error, Result};
use crate::lp::{irreducible_infeasible_subset, solve, Constraint, Feasibility, LinearSystem, Sense};
use crate::model::Instance;
use crate::rational::{int, Rational};

/// Payment variables `p_i(b)` for every profile `b ∈ grid^m`, one variable
/// per (profile, machine), constrained by grid truthfulness, envy-freeness,
/// IR and anonymity.
///
/// Grid feasibility is one-directional evidence: the continuum has more
/// constraints, so only infeasibility transfers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentPolytope {
    pub machines: usize,
    pub profiles: Vec<Vec<Rational>>,
    pub workloads: Vec<Vec<Rational>>,
    pub system: LinearSystem,
}

impl PaymentPolytope {
    pub fn variable(&self, profile: usize, machine: usize) -> usize {
        profile * self.machines + machine
    }

    pub fn profile_index(&self, bids: &[Rational]) -> Option<usize> {
        self.profiles.iter().position(|p| p == bids)
    }

    /// Flattens per-profile payments into the variable vector.
    pub fn flatten(&self, payments: &[Vec<Rational>]) -> Vec<Rational> {
        payments.iter().flatten().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    /// Payments per profile, aligned with [`PaymentPolytope::profiles`].
    Feasible { payments: Vec<Vec<Rational>> },
    /// Indices into the polytope's constraints forming an irreducible
    /// infeasible subset, and Farkas multipliers for the full system.
    Infeasible { core: Vec<usize>, farkas: Vec<Rational> },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

fn profiles(grid: &[Rational], machines: usize) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..machines {
        out = out
            .into_iter()
            .flat_map(|p| {
                grid.iter().map(move |g| {
                    let mut q = p.clone();
                    q.push(g.clone());
                    q
                })
            })
            .collect();
    }
    out
}

pub fn build_payment_polytope<R: AllocationRule + ?Sized>(
    rule: &R,
    grid: &[Rational],
    jobs: &[Rational],
    machines: usize,
    budget: u64,
) -> Result<PaymentPolytope> {
    let mut grid = grid.to_vec();
    grid.sort();
    grid.dedup();
    if grid.is_empty() || machines == 0 {
        return Err(Error::Domain("grid and machine count must be nonempty".into()));
    }
    let count = (grid.len() as u64).checked_pow(machines as u32).unwrap_or(u64::MAX);
    if count > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    let profiles = profiles(&grid, machines);
    let index: BTreeMap<&Vec<Rational>, usize> = profiles.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let workloads: Vec<Vec<Rational>> = profiles
        .iter()
        .map(|b| rule.workloads(&Instance::new(jobs.to_vec(), b.clone())?))
        .collect::<Result<_>>()?;

    let m = machines;
    let var = |profile: usize, machine: usize| profile * m + machine;
    let one = Rational::one();
    let mut system = LinearSystem::new(profiles.len() * m);
    for (k, b) in profiles.iter().enumerate() {
        let w = &workloads[k];
        for i in 0..m {
            system.push(Constraint::new(vec![(var(k, i), one.clone())], Sense::Ge, &b[i] * &w[i], format!("ir p{i}{b:?}")));
            for j in 0..m {
                if i != j {
                    system.push(Constraint::new(
                        vec![(var(k, i), one.clone()), (var(k, j), -one.clone())],
                        Sense::Ge,
                        &b[i] * (&w[i] - &w[j]),
                        format!("ef {i} vs {j} at {b:?}"),
                    ));
                }
            }
            for d in &grid {
                if *d == b[i] {
                    continue;
                }
                let mut dev = b.clone();
                dev[i] = d.clone();
                let kd = index[&dev];
                system.push(Constraint::new(
                    vec![(var(k, i), one.clone()), (var(kd, i), -one.clone())],
                    Sense::Ge,
                    &b[i] * (&w[i] - &workloads[kd][i]),
                    format!("truthful {i} at {b:?} reporting {d}"),
                ));
            }
        }
        #[allow(clippy::needless_range_loop)]
        for a in 0..m {
            if b.iter().filter(|x| **x == b[a]).count() != 1 {
                continue;
            }
            for l in 0..m {
                if l == a {
                    continue;
                }
                let mut swapped = b.clone();
                swapped.swap(a, l);
                let ks = index[&swapped];
                if ks < k {
                    continue;
                }
                if workloads[ks][l] != w[a] {
                    // the allocation itself is not anonymous: 0 ≥ 1
                    system.push(Constraint::new(vec![], Sense::Ge, one.clone(), format!("allocation not anonymous at {b:?} swapping {a},{l}")));
                }
                system.push(Constraint::new(
                    vec![(var(ks, l), one.clone()), (var(k, a), -one.clone())],
                    Sense::Eq,
                    int(0),
                    format!("anonymous {a},{l} at {b:?}"),
                ));
            }
        }
    }
    Ok(PaymentPolytope { machines, profiles, workloads, system })
}

/// Builds the polytope and decides it exactly. Infeasible systems are
/// reduced to an irreducible core.
pub fn payment_polytope_feasible<R: AllocationRule + ?Sized>(
    rule: &R,
    grid: &[Rational],
    jobs: &[Rational],
    machines: usize,
    budget: u64,
) -> Result<(PaymentPolytope, FeasibilityResult)> {
    let polytope = build_payment_polytope(rule, grid, jobs, machines, budget)?;
    let result = match solve(&polytope.system)? {
        Feasibility::Feasible(x) => {
            FeasibilityResult::Feasible { payments: x.chunks(machines).map(|c| c.to_vec()).collect() }
        }
        Feasibility::Infeasible(farkas) => {
            let core = irreducible_infeasible_subset(&polytope.system)?;
            FeasibilityResult::Infeasible { core, farkas }
        }
    };
    Ok((polytope, result))
}

/// Independent re-check: a witness must satisfy every constraint exactly; a
/// core must re-solve infeasible and carry a valid Farkas certificate.
pub fn verify_feasibility(polytope: &PaymentPolytope, result: &FeasibilityResult) -> Result<bool> {
    match result {
        FeasibilityResult::Feasible { payments } => Ok(polytope.system.is_satisfied_by(&polytope.flatten(payments))),
        FeasibilityResult::Infeasible { core, farkas } => {
            let sub = polytope.system.subsystem(core);
            Ok(polytope.system.is_farkas_certificate(farkas) && !solve(&sub)?.is_feasible())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocations::{FnRule, Rule};
    use crate::payments::vcg_outcome;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn vcg_grid_is_feasible_and_clarke_is_a_witness() {
        let (poly, result) = payment_polytope_feasible(&Rule::Vcg, &ints(&[1, 2]), &ints(&[2, 1]), 2, 1000).unwrap();
        assert!(result.is_feasible());
        assert!(verify_feasibility(&poly, &result).unwrap());
        let clarke: Vec<Vec<Rational>> = poly
            .profiles
            .iter()
            .map(|b| vcg_outcome(&Instance::new(ints(&[2, 1]), b.clone()).unwrap()).unwrap().payments)
            .collect();
        assert!(poly.system.is_satisfied_by(&poly.flatten(&clarke)));
    }

    #[test]
    fn single_profile_grid() {
        let (poly, result) = payment_polytope_feasible(&Rule::lpt_star(), &ints(&[1]), &ints(&[2, 1]), 2, 10).unwrap();
        assert_eq!(poly.profiles.len(), 1);
        assert!(verify_feasibility(&poly, &result).unwrap());
        let costs = vec![poly.workloads[0].clone()];
        assert!(poly.system.is_satisfied_by(&poly.flatten(&costs)));
    }

    #[test]
    fn index_biased_rule_is_infeasible() {
        let biased = FnRule::new("first-wins", |inst: &Instance| vec![0; inst.job_count()]);
        let (poly, result) = payment_polytope_feasible(&biased, &ints(&[1, 2]), &ints(&[1]), 2, 100).unwrap();
        let FeasibilityResult::Infeasible { core, .. } = &result else { panic!("feasible") };
        assert!(verify_feasibility(&poly, &result).unwrap());
        assert!(!core.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            build_payment_polytope(&Rule::Vcg, &ints(&[1, 2, 3]), &ints(&[1]), 3, 10),
            Err(Error::BudgetExceeded { budget: 10 })
        ));
    }
}
