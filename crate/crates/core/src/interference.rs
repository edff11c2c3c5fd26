//! The interference hierarchy `I_k` and the level of a theory.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::event::{disjoint_families, ensure_disjoint, Event};
use crate::theory::HistoriesTheory;

/// `I_k(X_1..X_k)`: the inclusion-exclusion sum over nonempty subsets `S` of
/// the arguments of `(-1)^(k-|S|) mu(union of S)`.
pub fn interference(theory: &HistoriesTheory, events: &[Event]) -> Result<BigRational> {
    if events.is_empty() {
        return Err(Error::OutOfRange(
            "interference needs at least one event".into(),
        ));
    }
    if events.len() > 20 {
        return Err(Error::OutOfRange("interference order above 20".into()));
    }
    for e in events {
        if e.space_size() != theory.size() {
            return Err(Error::SpaceMismatch {
                left: e.space_size(),
                right: theory.size(),
            });
        }
    }
    ensure_disjoint(events)?;
    Ok(inclusion_exclusion(events, |e| theory.mu(e)))
}

fn inclusion_exclusion<F>(events: &[Event], mut mu: F) -> BigRational
where
    F: FnMut(Event) -> BigRational,
{
    let k = events.len();
    let n = events[0].space_size();
    let mut total = BigRational::zero();
    for subset in 1u32..(1 << k) {
        let mut union = Event::empty(n);
        for (i, e) in events.iter().enumerate() {
            if subset >> i & 1 == 1 {
                union = union.union(*e);
            }
        }
        let value = mu(union);
        if (k - subset.count_ones() as usize).is_multiple_of(2) {
            total += value;
        } else {
            total -= value;
        }
    }
    total
}

/// Searches every family of `order` pairwise-disjoint nonempty events for a
/// nonzero `I_order`. Returns the first witness in enumeration order.
///
/// Families with an empty member are skipped: `I_k` vanishes on them
/// identically.
pub fn find_interference(theory: &HistoriesTheory, order: usize) -> Result<Option<Vec<Event>>> {
    if order == 0 {
        return Err(Error::OutOfRange(
            "interference order must be at least 1".into(),
        ));
    }
    let table = theory.mu_table()?;
    let n = theory.size();
    if order > n {
        return Ok(None);
    }
    let mut witness = None;
    disjoint_families(n, order, false, |events| {
        let value = inclusion_exclusion(events, |e| table[e.index()].clone());
        if value.is_zero() {
            false
        } else {
            witness = Some(events.to_vec());
            true
        }
    });
    Ok(witness)
}

/// Smallest `k` such that `I_{k+1}` vanishes on all disjoint families.
/// Once `I_{k+1}` vanishes, every higher sum rule holds as well, so the scan
/// stops there.
pub fn level(theory: &HistoriesTheory) -> Result<usize> {
    let n = theory.size();
    for k in 1..=n {
        if find_interference(theory, k + 1)?.is_none() {
            return Ok(k);
        }
    }
    Ok(n)
}
