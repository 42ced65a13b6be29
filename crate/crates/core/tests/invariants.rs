//! Property-based tests for the invariants the rules, payments and solver
//! promise on every input.

use num_traits::Zero;
use proptest::prelude::*;
use relmech_core::allocations::{at_fractional, at_lower_bound, lpt_star, opt_makespan};
use relmech_core::lp::{irreducible_infeasible_subset, solve, Constraint, Feasibility, LinearSystem, Sense};
use relmech_core::payments::{ef_chain_payments, extract_h, vcg};
use relmech_core::properties::{check_envy_free, check_ir, check_local_efficiency, check_scalable};
use relmech_core::rational::{int, parse_rational, pow2};
use relmech_core::workcurve::build_workcurve;
use relmech_core::{AllocationRule, Instance, Rational, Rule};

fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn instance(machines: std::ops::RangeInclusive<usize>, jobs: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Instance> {
    (prop::collection::vec(rational(12, 4), jobs), prop::collection::vec(rational(12, 4), machines))
        .prop_map(|(j, b)| Instance::new(j, b).unwrap())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Bids drawn from a small set so ties are common, and the workloads handed
/// out fastest-first in nonincreasing order.
fn locally_efficient() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (1usize..=6)
        .prop_flat_map(|m| {
            (
                prop::collection::vec((1i64..=4).prop_map(int), m),
                prop::collection::vec(prop_oneof![Just(Rational::zero()), rational(10, 3)], m),
            )
        })
        .prop_map(|(bids, mut loads)| {
            loads.sort_by(|a, b| b.cmp(a));
            let mut order: Vec<usize> = (0..bids.len()).collect();
            order.sort_by(|&a, &b| bids[a].cmp(&bids[b]).then(b.cmp(&a)));
            let mut workloads = vec![Rational::zero(); bids.len()];
            for (rank, &i) in order.iter().enumerate() {
                workloads[i] = loads[rank].clone();
            }
            (bids, workloads)
        })
}

fn linear_system() -> impl Strategy<Value = LinearSystem> {
    let coeff = (-3i64..=3).prop_map(int);
    let sense = prop_oneof![Just(Sense::Le), Just(Sense::Ge), Just(Sense::Eq)];
    (1usize..=3).prop_flat_map(move |vars| {
        prop::collection::vec((prop::collection::vec(coeff.clone(), vars), sense.clone(), -4i64..=4), 1..=5).prop_map(
            move |rows| {
                let mut system = LinearSystem::new(vars);
                for (k, (a, s, b)) in rows.into_iter().enumerate() {
                    let coeffs = a.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
                    system.push(Constraint::new(coeffs, s, int(b), format!("row {k}")));
                }
                system
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pairwise_local_efficiency_matches_permutations(
        (bids, workloads) in (1usize..=5).prop_flat_map(|m| (prop::collection::vec(rational(4, 2), m), prop::collection::vec(rational(4, 2), m)))
    ) {
        let base = dot(&bids, &workloads);
        let brute = permutations(bids.len()).iter().all(|p| {
            let w: Vec<Rational> = p.iter().map(|&j| workloads[j].clone()).collect();
            dot(&bids, &w) >= base
        });
        prop_assert_eq!(check_local_efficiency(&bids, &workloads).unwrap().passed, brute);
    }

    #[test]
    fn chain_payments_are_envy_free_and_rational((bids, workloads) in locally_efficient()) {
        prop_assert!(check_local_efficiency(&bids, &workloads).unwrap().passed);
        let pays = ef_chain_payments(&bids, &workloads).unwrap();
        prop_assert!(check_envy_free(&bids, &workloads, &pays).unwrap().passed);
        prop_assert!(check_ir(&bids, &workloads, &pays).unwrap().passed);
    }

    #[test]
    fn lower_bound_is_homogeneous(inst in instance(1..=5, 1..=6), c in rational(20, 7)) {
        let scaled = inst.scaled_bids(&c).unwrap();
        prop_assert_eq!(at_lower_bound(&scaled), &c * at_lower_bound(&inst));
    }

    #[test]
    fn binning_pour_is_a_distribution(inst in instance(1..=4, 1..=6)) {
        let e = at_fractional(&inst).unwrap();
        let total: Rational = e.expected_workloads().iter().sum();
        prop_assert_eq!(&total, inst.total_length());
        for dist in e.job_distributions() {
            let mass: Rational = dist.values().sum();
            prop_assert_eq!(mass, int(1));
        }
    }

    #[test]
    fn lpt_star_is_invariant_under_powers_of_two(inst in instance(1..=5, 1..=6), k in -4i64..=4) {
        let scaled = inst.scaled_bids(&pow2(k)).unwrap();
        let (a, b) = (lpt_star(&inst).unwrap(), lpt_star(&scaled).unwrap());
        prop_assert_eq!(a.workloads(), b.workloads());
    }

    #[test]
    fn two_machine_rule_is_scalable(inst in instance(2..=2, 1..=6), c in rational(9, 5)) {
        prop_assert!(check_scalable(&Rule::TwoMachineOpt, &inst, &[c]).unwrap().passed);
    }

    #[test]
    fn solver_answers_carry_checkable_evidence(system in linear_system()) {
        match solve(&system).unwrap() {
            Feasibility::Feasible(x) => prop_assert!(system.is_satisfied_by(&x)),
            Feasibility::Infeasible(y) => {
                prop_assert!(system.is_farkas_certificate(&y));
                let core = irreducible_infeasible_subset(&system).unwrap();
                prop_assert!(!solve(&system.subsystem(&core)).unwrap().is_feasible());
                for drop in 0..core.len() {
                    let mut rest = core.clone();
                    rest.remove(drop);
                    prop_assert!(solve(&system.subsystem(&rest)).unwrap().is_feasible());
                }
            }
        }
    }

    #[test]
    fn rationals_round_trip_through_text(n in -1000i64..=1000, d in 1i64..=97) {
        let r = Rational::new(n.into(), d.into());
        prop_assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tlb_never_exceeds_opt(inst in instance(1..=3, 1..=5)) {
        let (_, opt) = opt_makespan(&inst, 1_000_000).unwrap();
        prop_assert!(at_lower_bound(&inst) <= opt);
    }

    #[test]
    fn vcg_h_does_not_depend_on_the_probe(
        others in prop::collection::vec(rational(8, 3), 1..=3),
        jobs in prop::collection::vec(rational(6, 2), 1..=4),
        probes in prop::collection::vec(rational(16, 3), 2..=3),
    ) {
        let mech = vcg();
        let h: Vec<Rational> = probes.iter().map(|p| extract_h(&mech, &others, &jobs, p).unwrap()).collect();
        prop_assert!(h.windows(2).all(|w| w[0] == w[1]), "h values {:?}", h);
    }

    #[test]
    fn deterministic_workcurves_are_nonincreasing(
        others in prop::collection::vec(rational(8, 2), 1..=2),
        jobs in prop::collection::vec(rational(6, 2), 1..=4),
        which in 0usize..3,
    ) {
        let rule = match which {
            0 => Rule::lpt_star(),
            1 => Rule::Vcg,
            _ if others.len() == 1 => Rule::TwoMachineOpt,
            _ => Rule::lpt_star(),
        };
        let cap = others.iter().max().unwrap() * int(64);
        let curve = build_workcurve(&rule, &others, &jobs, &cap).unwrap();
        prop_assert!(curve.is_nonincreasing(), "{} curve {:?}", rule.name(), curve);
    }
}
