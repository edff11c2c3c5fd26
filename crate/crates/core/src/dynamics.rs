//! Probability measures on sets of co-events and the quadratic identity.
//!
//! A probability assignment `p` on a set `S` of co-events reproduces the
//! quantum measure when `sum of p_phi over phi in S with phi(A) = 1` equals
//! `mu(A)` for every event `A`. For multiplicative `S`, any co-event carrying
//! positive probability under such an assignment must satisfy the quadratic
//! identity
//!
//! ```text
//! phi(A+B+C) = phi(A+B) + phi(B+C) + phi(C+A) + phi(A) + phi(B) + phi(C)
//! ```
//!
//! (over Z2, for all events). [`max_probability`] solves the linear program
//! exactly so the prediction can be checked on concrete theories.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coevent::CoEvent;
use crate::error::{Error, Result};
use crate::event::{all_events, disjoint_families, ensure_disjoint, Event};
use crate::simplex::{phase_one, PhaseOne};
use crate::theory::HistoriesTheory;

fn check_triple(phi: &CoEvent, a: Event, b: Event, c: Event) -> Result<()> {
    for e in [a, b, c] {
        if e.space_size() != phi.space_size() {
            return Err(Error::SpaceMismatch {
                left: e.space_size(),
                right: phi.space_size(),
            });
        }
    }
    ensure_disjoint(&[a, b, c])
}

/// `Q_ABC(phi)` in Z2 for disjoint `A, B, C`.
pub fn q_value(phi: &CoEvent, a: Event, b: Event, c: Event) -> Result<bool> {
    check_triple(phi, a, b, c)?;
    Ok(q_unchecked(phi, a, b, c))
}

fn q_unchecked(phi: &CoEvent, a: Event, b: Event, c: Event) -> bool {
    phi.eval(a.union(b).union(c))
        ^ phi.eval(a.union(b))
        ^ phi.eval(b.union(c))
        ^ phi.eval(c.union(a))
        ^ phi.eval(a)
        ^ phi.eval(b)
        ^ phi.eval(c)
}

/// The integer lift `R_ABC(phi)` of `Q_ABC`, with truth values read as 0 and 1.
pub fn r_value(phi: &CoEvent, a: Event, b: Event, c: Event) -> Result<i64> {
    check_triple(phi, a, b, c)?;
    let v = |e: Event| i64::from(phi.eval(e));
    Ok(v(a.union(b).union(c)) - v(a.union(b)) - v(b.union(c)) - v(c.union(a)) + v(a) + v(b) + v(c))
}

/// Outcome of the quadratic check on all disjoint triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticReport {
    pub is_quadratic: bool,
    /// First disjoint triple with `Q != 0`, present iff not quadratic.
    pub witness: Option<(Event, Event, Event)>,
}

/// Checks `Q_ABC(phi) = 0` on every disjoint triple (empty members allowed).
/// The unrestricted identity over arbitrary triples is equivalent.
pub fn is_quadratic(phi: &CoEvent) -> Result<QuadraticReport> {
    let n = phi.space_size();
    if n > crate::event::ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            size: n,
            cap: crate::event::ENUMERATION_CAP,
        });
    }
    let mut witness = None;
    disjoint_families(n, 3, true, |t| {
        if q_unchecked(phi, t[0], t[1], t[2]) {
            witness = Some((t[0], t[1], t[2]));
            true
        } else {
            false
        }
    });
    Ok(QuadraticReport {
        is_quadratic: witness.is_none(),
        witness,
    })
}

/// Which events contribute constraint rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ConstraintMode {
    /// One row for every event.
    #[default]
    AllEvents,
    /// Rows only for the listed events (plus `Omega`).
    Observable(Vec<Event>),
    /// Rows only for events with measure exactly 0 or 1.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    Event(Event),
    /// `sum of p = 1`, added when the `Omega` row does not already say so.
    Normalization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub kind: RowKind,
    /// `coefficients[k]` is 1 when co-event `k` is true on the row's event.
    pub coefficients: Vec<bool>,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    pub coevents: Vec<CoEvent>,
    pub rows: Vec<ConstraintRow>,
}

pub fn build_feasibility(
    theory: &HistoriesTheory,
    coevents: &[CoEvent],
) -> Result<FeasibilitySystem> {
    build_feasibility_with(theory, coevents, &ConstraintMode::AllEvents)
}

pub fn build_feasibility_with(
    theory: &HistoriesTheory,
    coevents: &[CoEvent],
    mode: &ConstraintMode,
) -> Result<FeasibilitySystem> {
    if coevents.is_empty() {
        return Err(Error::EmptySystem("no co-events given".into()));
    }
    let n = theory.size();
    for phi in coevents {
        if phi.space_size() != n {
            return Err(Error::SpaceMismatch {
                left: phi.space_size(),
                right: n,
            });
        }
    }
    let full = Event::full(n);
    let events: Vec<Event> = match mode {
        ConstraintMode::AllEvents => {
            theory.check_enumerable()?;
            all_events(n).collect()
        }
        ConstraintMode::Observable(list) => {
            let mut list = list.clone();
            list.push(full);
            list.sort();
            list.dedup();
            list
        }
        ConstraintMode::Binary => {
            theory.check_enumerable()?;
            let table = theory.mu_table()?;
            all_events(n)
                .filter(|e| {
                    let v = &table[e.index()];
                    e.is_full() || v.is_zero() || v.is_one()
                })
                .collect()
        }
    };
    let mut rows: Vec<ConstraintRow> = events
        .into_iter()
        .map(|e| ConstraintRow {
            kind: RowKind::Event(e),
            coefficients: coevents.iter().map(|phi| phi.eval(e)).collect(),
            rhs: theory.mu(e),
        })
        .collect();
    let omega_normalizes = theory.mu(full).is_one() && coevents.iter().all(|phi| phi.eval(full));
    if !omega_normalizes {
        rows.push(ConstraintRow {
            kind: RowKind::Normalization,
            coefficients: vec![true; coevents.len()],
            rhs: BigRational::one(),
        });
    }
    Ok(FeasibilitySystem {
        coevents: coevents.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// A row with no participating co-event but a nonzero right-hand side.
    InconsistentRow { row: usize },
    /// Multipliers `y` over the rows with `y . column <= 0` for every
    /// co-event and `y . rhs > 0`.
    Farkas { multipliers: Vec<BigRational> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Probabilities indexed like `FeasibilitySystem::coevents`.
    Feasible(Vec<BigRational>),
    Infeasible(Certificate),
}

impl FeasibilitySystem {
    fn matrix(&self) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let a = self
            .rows
            .iter()
            .map(|r| {
                r.coefficients
                    .iter()
                    .map(|&c| {
                        if c {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let b = self.rows.iter().map(|r| r.rhs.clone()).collect();
        (a, b)
    }

    /// True when `p` is nonnegative and satisfies every row exactly.
    pub fn satisfied_by(&self, p: &[BigRational]) -> bool {
        p.len() == self.coevents.len()
            && p.iter().all(|x| *x >= BigRational::zero())
            && self.rows.iter().all(|r| {
                let lhs: BigRational = r
                    .coefficients
                    .iter()
                    .zip(p)
                    .filter(|(c, _)| **c)
                    .map(|(_, x)| x.clone())
                    .sum();
                lhs == r.rhs
            })
    }

    /// True when the certificate proves the system has no nonnegative
    /// solution.
    pub fn certifies_infeasible(&self, certificate: &Certificate) -> bool {
        match certificate {
            Certificate::InconsistentRow { row } => self
                .rows
                .get(*row)
                .is_some_and(|r| r.coefficients.iter().all(|c| !c) && !r.rhs.is_zero()),
            Certificate::Farkas { multipliers } => {
                if multipliers.len() != self.rows.len() {
                    return false;
                }
                let columns_ok = (0..self.coevents.len()).all(|k| {
                    let s: BigRational = self
                        .rows
                        .iter()
                        .zip(multipliers)
                        .filter(|(r, _)| r.coefficients[k])
                        .map(|(_, y)| y.clone())
                        .sum();
                    s <= BigRational::zero()
                });
                let yb: BigRational = self
                    .rows
                    .iter()
                    .zip(multipliers)
                    .map(|(r, y)| &r.rhs * y)
                    .sum();
                columns_ok && yb > BigRational::zero()
            }
        }
    }

    pub fn index_of(&self, phi: &CoEvent) -> Option<usize> {
        self.coevents.iter().position(|c| c == phi)
    }
}

/// Decides whether some probability assignment on the co-events satisfies
/// every row, returning a witness or an infeasibility certificate.
pub fn solve_feasibility(system: &FeasibilitySystem) -> Feasibility {
    if let Some(row) = system
        .rows
        .iter()
        .position(|r| r.coefficients.iter().all(|c| !c) && !r.rhs.is_zero())
    {
        return Feasibility::Infeasible(Certificate::InconsistentRow { row });
    }
    let (a, b) = system.matrix();
    match phase_one(&a, &b) {
        PhaseOne::Feasible(tableau) => Feasibility::Feasible(tableau.solution()),
        PhaseOne::Infeasible(multipliers) => {
            Feasibility::Infeasible(Certificate::Farkas { multipliers })
        }
    }
}

/// Largest probability any feasible assignment gives to `system.coevents[index]`.
pub fn max_probability(system: &FeasibilitySystem, index: usize) -> Result<BigRational> {
    if index >= system.coevents.len() {
        return Err(Error::OutOfRange(format!("co-event index {index}")));
    }
    let (a, b) = system.matrix();
    let PhaseOne::Feasible(mut tableau) = phase_one(&a, &b) else {
        return Err(Error::Infeasible);
    };
    let objective: Vec<BigRational> = (0..system.coevents.len())
        .map(|k| {
            if k == index {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    tableau.maximize(&objective)
}
