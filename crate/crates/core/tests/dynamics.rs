mod common;

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use qmeasure::dynamics::{self, Feasibility};
use qmeasure::{CoEvent, Event, HistoriesTheory, MeasureSource, SampleSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn multiplicative(n: usize, dual: u32) -> CoEvent {
    CoEvent::Multiplicative(Event::from_bits(n, dual))
}

fn random_table_coevent(n: usize, rng: &mut ChaCha8Rng) -> CoEvent {
    let values = (0..1usize << n)
        .map(|m| m != 0 && rng.random_bool(0.5))
        .collect();
    CoEvent::from_table(n, values).unwrap_or_else(|_| CoEvent::classical(n, 0))
}

/// `mu(A) = sum_k w_k phi_k(A)`.
fn mixture_theory(n: usize, coevents: &[CoEvent], weights: &[BigRational]) -> HistoriesTheory {
    let values = (0..1u32 << n)
        .map(|m| {
            coevents
                .iter()
                .zip(weights)
                .filter(|(phi, _)| phi.eval(Event::from_bits(n, m)))
                .map(|(_, w)| w.clone())
                .sum()
        })
        .collect();
    HistoriesTheory::new(
        SampleSpace::indexed(n).unwrap(),
        MeasureSource::Table(values),
    )
    .unwrap()
}

/// Ring-form identity over all triples, computed on raw masks.
fn quadratic_oracle(values: &[bool]) -> bool {
    let size = values.len() as u32;
    (0..size).all(|a| {
        (0..size).all(|b| {
            (0..size).all(|c| {
                let parity = [a ^ b ^ c, a ^ b, b ^ c, c ^ a, a, b, c]
                    .iter()
                    .filter(|m| values[**m as usize])
                    .count();
                parity % 2 == 0
            })
        })
    })
}

fn check_solution(system: &dynamics::FeasibilitySystem) -> bool {
    match dynamics::solve_feasibility(system) {
        Feasibility::Feasible(p) => {
            assert!(system.satisfied_by(&p));
            true
        }
        Feasibility::Infeasible(cert) => {
            assert!(system.certifies_infeasible(&cert));
            false
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn third_order_mixtures_only_support_quadratic_duals(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small: Vec<u32> = (1..1u32 << n).filter(|d| d.count_ones() <= 2).collect();
        let chosen: Vec<CoEvent> = small
            .iter()
            .filter(|_| rng.random_bool(0.4))
            .map(|d| multiplicative(n, *d))
            .collect();
        let chosen = if chosen.is_empty() { vec![multiplicative(n, 0b11)] } else { chosen };
        let raw: Vec<i64> = chosen.iter().map(|_| rng.random_range(1..=4)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<BigRational> = raw.iter().map(|w| r(*w, total)).collect();
        let theory = mixture_theory(n, &chosen, &weights);

        let all: Vec<CoEvent> = (1..1u32 << n).map(|d| multiplicative(n, d)).collect();
        let system = dynamics::build_feasibility(&theory, &all).unwrap();
        prop_assert!(check_solution(&system));
        for (k, phi) in all.iter().enumerate() {
            let max = dynamics::max_probability(&system, k).unwrap();
            if max > BigRational::zero() {
                prop_assert!(dynamics::is_quadratic(phi).unwrap().is_quadratic);
                prop_assert!(phi.dual().unwrap().len() <= 2);
            }
        }
    }

    #[test]
    fn disjoint_and_unrestricted_quadratic_checks_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_table_coevent(4, &mut rng);
        let report = dynamics::is_quadratic(&phi).unwrap();
        prop_assert_eq!(report.is_quadratic, quadratic_oracle(phi.to_table().values()));
        if let Some((a, b, c)) = report.witness {
            prop_assert!(dynamics::q_value(&phi, a, b, c).unwrap());
        }
    }

    #[test]
    fn q_is_r_mod_two(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_table_coevent(n, &mut rng);
        for (a, b, c) in disjoint_triples(n) {
            let (a, b, c) = (Event::from_bits(n, a), Event::from_bits(n, b), Event::from_bits(n, c));
            let q = dynamics::q_value(&phi, a, b, c).unwrap();
            let r = dynamics::r_value(&phi, a, b, c).unwrap();
            prop_assert_eq!(q, r.rem_euclid(2) == 1);
        }
    }

    #[test]
    fn solver_output_is_verified(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theory = random_table_theory(n, &mut rng);
        let coevents: Vec<CoEvent> = (0..m).map(|_| random_table_coevent(n, &mut rng)).collect();
        let system = dynamics::build_feasibility(&theory, &coevents).unwrap();
        check_solution(&system);
    }

    #[test]
    fn mixtures_are_feasible_and_bounded(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coevents: Vec<CoEvent> = (0..m).map(|_| random_table_coevent(n, &mut rng)).collect();
        let raw: Vec<i64> = (0..m).map(|_| rng.random_range(1..=5)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<BigRational> = raw.iter().map(|w| r(*w, total)).collect();
        let theory = mixture_theory(n, &coevents, &weights);
        let system = dynamics::build_feasibility(&theory, &coevents).unwrap();
        prop_assert!(check_solution(&system));
        for k in 0..m {
            let max = dynamics::max_probability(&system, k).unwrap();
            prop_assert!(max <= r(1, 1));
            // Duplicated co-events share their weight.
            let shared: BigRational = coevents
                .iter()
                .zip(&weights)
                .filter(|(phi, _)| **phi == coevents[k])
                .map(|(_, w)| w.clone())
                .sum();
            prop_assert!(max >= shared);
        }
    }
}

#[test]
fn multiplicative_r_values_are_zero_or_one() {
    for n in 1..=4 {
        for d in 1..1u32 << n {
            let phi = multiplicative(n, d);
            for (a, b, c) in disjoint_triples(n) {
                let expected =
                    i64::from(d & a != 0 && d & b != 0 && d & c != 0 && d & !(a | b | c) == 0);
                let (a, b, c) = (
                    Event::from_bits(n, a),
                    Event::from_bits(n, b),
                    Event::from_bits(n, c),
                );
                assert_eq!(dynamics::r_value(&phi, a, b, c).unwrap(), expected);
            }
        }
    }
}

#[test]
fn inconsistent_row_is_reported() {
    let theory =
        HistoriesTheory::classical(SampleSpace::indexed(2).unwrap(), &[r(1, 2), r(1, 2)]).unwrap();
    let system = dynamics::build_feasibility(&theory, &[CoEvent::classical(2, 0)]).unwrap();
    assert!(!check_solution(&system));
}

#[test]
fn non_disjoint_triples_are_rejected() {
    let phi = CoEvent::classical(3, 0);
    let e = |b| Event::from_bits(3, b);
    assert!(dynamics::q_value(&phi, e(1), e(3), e(4)).is_err());
    assert!(dynamics::r_value(&phi, e(1), e(2), e(4)).is_ok());
}
