//! Co-events: truth valuations `EA -> Z2` that send the empty event to 0.
//!
//! Multiplicative co-events are stored through the duality with nonempty
//! events: the co-event `A*` is true on exactly the supersets of `A`. General
//! co-events are stored as a full truth table.
//!
//! Preclusion is parameterised by `eps`. With `eps = 0` an event is null when
//! its measure is exactly zero; with `eps > 0` it is null when its measure is
//! strictly below `eps`. An event is negligible when it lies inside a null
//! event.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::{all_events, Event};
use crate::partition::Partition;
use crate::theory::{propagate_down, HistoriesTheory};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoEvent {
    /// The co-event `dual*`, true on `A` iff `dual` is a subset of `A`.
    Multiplicative(Event),
    Table(TableCoEvent),
}

/// Truth table indexed by event bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableCoEvent {
    n: usize,
    values: Vec<bool>,
}

impl TableCoEvent {
    pub fn space_size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl CoEvent {
    /// The multiplicative co-event dual to a nonempty event.
    pub fn dual_of(event: Event) -> Result<CoEvent> {
        if event.is_empty() {
            return Err(Error::EmptyDual);
        }
        Ok(CoEvent::Multiplicative(event))
    }

    /// The classical co-event `gamma*` of a single history.
    pub fn classical(n: usize, history: usize) -> CoEvent {
        CoEvent::Multiplicative(Event::singleton(n, history))
    }

    pub fn from_table(n: usize, values: Vec<bool>) -> Result<CoEvent> {
        if values.len() != 1 << n {
            return Err(Error::InvalidCoEvent(format!(
                "truth table has {} entries, expected {}",
                values.len(),
                1usize << n
            )));
        }
        if values[0] {
            return Err(Error::InvalidCoEvent(
                "the empty event must map to 0".into(),
            ));
        }
        if !values.iter().any(|v| *v) {
            return Err(Error::InvalidCoEvent(
                "the zero map is not a co-event".into(),
            ));
        }
        Ok(CoEvent::Table(TableCoEvent { n, values }))
    }

    pub fn from_fn<F: FnMut(Event) -> bool>(n: usize, f: F) -> Result<CoEvent> {
        Self::from_table(n, all_events(n).map(f).collect())
    }

    pub fn space_size(&self) -> usize {
        match self {
            CoEvent::Multiplicative(dual) => dual.space_size(),
            CoEvent::Table(t) => t.n,
        }
    }

    /// The truth value assigned to `event`.
    pub fn eval(&self, event: Event) -> bool {
        assert_eq!(
            event.space_size(),
            self.space_size(),
            "event from another sample space"
        );
        match self {
            CoEvent::Multiplicative(dual) => dual.is_subset_of(event),
            CoEvent::Table(t) => t.values[event.index()],
        }
    }

    pub fn is_multiplicative_form(&self) -> bool {
        matches!(self, CoEvent::Multiplicative(_))
    }

    /// The dual event of a multiplicative co-event.
    pub fn dual(&self) -> Result<Event> {
        match self {
            CoEvent::Multiplicative(dual) => Ok(*dual),
            CoEvent::Table(_) => Err(Error::NotMultiplicative),
        }
    }

    /// Rewrites a table co-event in multiplicative form when its truth set
    /// is a principal filter; multiplicative inputs are returned unchanged.
    pub fn to_multiplicative(&self) -> Option<CoEvent> {
        match self {
            CoEvent::Multiplicative(_) => Some(self.clone()),
            CoEvent::Table(t) => {
                let true_set: Vec<Event> =
                    all_events(t.n).filter(|e| t.values[e.index()]).collect();
                let meet = true_set
                    .iter()
                    .fold(Event::full(t.n), |acc, e| acc.intersection(*e));
                let principal = !meet.is_empty()
                    && all_events(t.n).all(|e| t.values[e.index()] == meet.is_subset_of(e));
                principal.then_some(CoEvent::Multiplicative(meet))
            }
        }
    }

    /// Table form of any co-event.
    pub fn to_table(&self) -> TableCoEvent {
        match self {
            CoEvent::Table(t) => t.clone(),
            CoEvent::Multiplicative(dual) => {
                let n = dual.space_size();
                TableCoEvent {
                    n,
                    values: all_events(n).map(|e| dual.is_subset_of(e)).collect(),
                }
            }
        }
    }

    /// True when the co-event is a ring homomorphism `EA -> Z2` on the whole
    /// event algebra. Checked directly on every pair of events.
    pub fn is_homomorphism(&self) -> bool {
        self.is_homomorphism_on(&Partition::singletons(self.space_size()))
    }

    /// True when the restriction to unions of blocks of `partition` is a
    /// unital ring homomorphism. Checked directly on every pair of block
    /// unions; see [`is_classical_on`] for the containment criterion.
    pub fn is_homomorphism_on(&self, partition: &Partition) -> bool {
        let unions = partition.block_unions();
        let full = Event::full(self.space_size());
        if !self.eval(full) {
            return false;
        }
        unions.iter().all(|&x| {
            unions.iter().all(|&y| {
                self.eval(x.symmetric_difference(y)) == (self.eval(x) ^ self.eval(y))
                    && self.eval(x.intersection(y)) == (self.eval(x) && self.eval(y))
            })
        })
    }
}

fn multiplicative_dual(phi: &CoEvent) -> Result<Event> {
    phi.dual()
}

fn is_null(value: &BigRational, eps: &BigRational) -> bool {
    if eps.is_zero() {
        value.is_zero()
    } else {
        less_than(value, eps)
    }
}

/// `a < b` for rationals with positive denominators, cross-multiplying in
/// `i128` when every part fits in an `i64`.
fn less_than(a: &BigRational, b: &BigRational) -> bool {
    match (
        a.numer().to_i64(),
        a.denom().to_i64(),
        b.numer().to_i64(),
        b.denom().to_i64(),
    ) {
        (Some(an), Some(ad), Some(bn), Some(bd)) => {
            i128::from(an) * i128::from(bd) < i128::from(bn) * i128::from(ad)
        }
        _ => a < b,
    }
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if eps < &BigRational::zero() {
        return Err(Error::OutOfRange("epsilon must be nonnegative".into()));
    }
    Ok(())
}

/// The (eps-)negligible family of a theory, precomputed over all events.
#[derive(Debug, Clone)]
pub struct Negligibility {
    n: usize,
    eps: BigRational,
    null: Vec<bool>,
    negligible: Vec<bool>,
}

impl Negligibility {
    pub fn compute(theory: &HistoriesTheory, eps: &BigRational) -> Result<Self> {
        check_eps(eps)?;
        let n = theory.size();
        let table = theory.mu_table()?;
        let null: Vec<bool> = table.par_iter().map(|v| is_null(v, eps)).collect();
        let mut negligible = null.clone();
        propagate_down(n, &mut negligible);
        Ok(Negligibility {
            n,
            eps: eps.clone(),
            null,
            negligible,
        })
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    pub fn is_null(&self, event: Event) -> bool {
        self.null[event.index()]
    }

    pub fn is_negligible(&self, event: Event) -> bool {
        self.negligible[event.index()]
    }

    pub fn null_family(&self) -> Vec<Event> {
        all_events(self.n)
            .filter(|e| self.null[e.index()])
            .collect()
    }

    /// Minimal non-negligible events: every single-element deletion is
    /// negligible. Ascending bitmask order.
    pub fn minimal_non_negligible(&self) -> Vec<Event> {
        let n = self.n;
        let masks: Vec<usize> = (1..self.negligible.len()).collect();
        masks
            .par_iter()
            .filter(|&&mask| {
                if self.negligible[mask] {
                    return false;
                }
                let mut bits = mask;
                while bits != 0 {
                    let low = bits & bits.wrapping_neg();
                    if !self.negligible[mask & !low] {
                        return false;
                    }
                    bits &= bits - 1;
                }
                true
            })
            .map(|&mask| Event::from_bits(n, mask as u32))
            .collect()
    }
}

/// True when no (eps-)null event contains the dual, i.e. every null event is
/// valued 0. Scans the supersets of the dual directly.
pub fn is_preclusive(phi: &CoEvent, theory: &HistoriesTheory, eps: &BigRational) -> Result<bool> {
    check_eps(eps)?;
    let dual = multiplicative_dual(phi)?;
    if dual.space_size() != theory.size() {
        return Err(Error::SpaceMismatch {
            left: dual.space_size(),
            right: theory.size(),
        });
    }
    Ok(!is_negligible_by_scan(theory, dual, eps))
}

fn is_negligible_by_scan(theory: &HistoriesTheory, event: Event, eps: &BigRational) -> bool {
    event.supersets().any(|sup| is_null(&theory.mu(sup), eps))
}

/// Preclusive with every proper subset of the dual negligible, decided by
/// superset scans without a full event table.
pub fn is_primitive(phi: &CoEvent, theory: &HistoriesTheory, eps: &BigRational) -> Result<bool> {
    if !is_preclusive(phi, theory, eps)? {
        return Ok(false);
    }
    let dual = multiplicative_dual(phi)?;
    Ok(dual
        .members()
        .all(|i| is_negligible_by_scan(theory, dual.without(i), eps)))
}

/// Strict domination: `psi* ⊊ phi*`.
pub fn dominates(psi: &CoEvent, phi: &CoEvent) -> Result<bool> {
    let a = multiplicative_dual(psi)?;
    let b = multiplicative_dual(phi)?;
    if a.space_size() != b.space_size() {
        return Err(Error::SpaceMismatch {
            left: a.space_size(),
            right: b.space_size(),
        });
    }
    Ok(a != b && a.is_subset_of(b))
}

/// Primitive (eps-)preclusive multiplicative co-events, ascending by dual.
pub fn primitives(theory: &HistoriesTheory, eps: &BigRational) -> Result<Vec<CoEvent>> {
    Ok(primitive_duals(theory, eps)?
        .into_iter()
        .map(CoEvent::Multiplicative)
        .collect())
}

pub fn primitive_duals(theory: &HistoriesTheory, eps: &BigRational) -> Result<Vec<Event>> {
    Ok(Negligibility::compute(theory, eps)?.minimal_non_negligible())
}

/// Preclusive classical co-events: `gamma*` for every history whose
/// singleton is not negligible.
pub fn classical_coevents(theory: &HistoriesTheory) -> Result<Vec<CoEvent>> {
    let negligibility = Negligibility::compute(theory, &BigRational::zero())?;
    let n = theory.size();
    Ok((0..n)
        .filter(|&i| !negligibility.is_negligible(Event::singleton(n, i)))
        .map(|i| CoEvent::classical(n, i))
        .collect())
}

/// Classicality of a multiplicative co-event on the subalgebra generated by
/// a partition: some block contains the dual.
pub fn is_classical_on(phi: &CoEvent, partition: &Partition) -> Result<bool> {
    let dual = multiplicative_dual(phi)?;
    partition.check_space(dual.space_size())?;
    Ok(partition.blocks().iter().any(|b| dual.is_subset_of(*b)))
}

/// Summary flags for a co-event relative to a theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoEventClass {
    pub multiplicative: bool,
    pub classical: bool,
    pub preclusive: bool,
    pub primitive: bool,
}

pub fn classify(
    phi: &CoEvent,
    theory: &HistoriesTheory,
    eps: &BigRational,
) -> Result<CoEventClass> {
    let Some(mult) = phi.to_multiplicative() else {
        return Ok(CoEventClass {
            multiplicative: false,
            classical: false,
            preclusive: false,
            primitive: false,
        });
    };
    let dual = mult.dual()?;
    Ok(CoEventClass {
        multiplicative: true,
        classical: dual.len() == 1,
        preclusive: is_preclusive(&mult, theory, eps)?,
        primitive: is_primitive(&mult, theory, eps)?,
    })
}
