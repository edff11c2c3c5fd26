//! Sample spaces and events.
//!
//! An event is a subset of the sample space stored as a bitmask: bit `i` is
//! set when history `i` belongs to the event. The event algebra is always the
//! full power set, a Boolean ring over Z2 with symmetric difference as
//! addition and intersection as multiplication.

use std::fmt;

use crate::error::{Error, Result};

/// Hard limit on the number of histories an explicit theory may have.
pub const MAX_HISTORIES: usize = 24;

/// Default limit for operations that enumerate all `2^n` events.
pub const ENUMERATION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampleSpace {
    labels: Vec<String>,
}

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace(
                "at least one history is required".into(),
            ));
        }
        if labels.len() > MAX_HISTORIES {
            return Err(Error::SpaceTooLarge {
                size: labels.len(),
                limit: MAX_HISTORIES,
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate history label {label:?}"
                )));
            }
        }
        Ok(SampleSpace { labels })
    }

    /// Space with histories named `h0, h1, ...`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("h{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    pub fn empty_event(&self) -> Event {
        Event::empty(self.len())
    }

    pub fn singleton(&self, index: usize) -> Event {
        Event::singleton(self.len(), index)
    }

    /// Builds an event from history labels.
    pub fn event<'a, I>(&self, labels: I) -> Result<Event>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut bits = 0u32;
        for label in labels {
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::InvalidSpace(format!("unknown history {label:?}")))?;
            bits |= 1 << i;
        }
        Ok(Event::from_bits(self.len(), bits))
    }

    /// Human-readable form such as `{a,c}`.
    pub fn describe(&self, event: Event) -> String {
        let names: Vec<&str> = event.members().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Number of events in the power set.
    pub fn event_count(&self) -> usize {
        1usize << self.len()
    }
}

/// A subset of a sample space with `n` histories.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    bits: u32,
    n: u8,
}

impl Event {
    /// Panics if `bits` has members outside the space; use
    /// [`Event::try_from_bits`] for untrusted input.
    pub fn from_bits(n: usize, bits: u32) -> Self {
        Self::try_from_bits(n, bits).expect("event bits outside sample space")
    }

    pub fn try_from_bits(n: usize, bits: u32) -> Result<Self> {
        if n > MAX_HISTORIES {
            return Err(Error::SpaceTooLarge {
                size: n,
                limit: MAX_HISTORIES,
            });
        }
        if bits & !full_mask(n) != 0 {
            return Err(Error::InvalidSpace(format!(
                "event {bits:#x} has members outside a space of {n} histories"
            )));
        }
        Ok(Event { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Self {
        Self::from_bits(n, 0)
    }

    pub fn full(n: usize) -> Self {
        Self::from_bits(n, full_mask(n))
    }

    pub fn singleton(n: usize, index: usize) -> Self {
        assert!(index < n, "history index {index} outside space of {n}");
        Self::from_bits(n, 1 << index)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn space_size(self) -> usize {
        self.n as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_full(self) -> bool {
        self.bits == full_mask(self.space_size())
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.bits >> index & 1 == 1
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(self, other: Event) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.bits & other.bits == 0
    }

    pub fn union(self, other: Event) -> Event {
        debug_assert_eq!(self.n, other.n);
        Event {
            bits: self.bits | other.bits,
            n: self.n,
        }
    }

    pub fn intersection(self, other: Event) -> Event {
        debug_assert_eq!(self.n, other.n);
        Event {
            bits: self.bits & other.bits,
            n: self.n,
        }
    }

    pub fn symmetric_difference(self, other: Event) -> Event {
        debug_assert_eq!(self.n, other.n);
        Event {
            bits: self.bits ^ other.bits,
            n: self.n,
        }
    }

    pub fn difference(self, other: Event) -> Event {
        debug_assert_eq!(self.n, other.n);
        Event {
            bits: self.bits & !other.bits,
            n: self.n,
        }
    }

    pub fn complement(self) -> Event {
        Event {
            bits: !self.bits & full_mask(self.space_size()),
            n: self.n,
        }
    }

    pub fn without(self, index: usize) -> Event {
        Event {
            bits: self.bits & !(1 << index),
            n: self.n,
        }
    }

    pub fn with(self, index: usize) -> Event {
        assert!(index < self.space_size());
        Event {
            bits: self.bits | 1 << index,
            n: self.n,
        }
    }

    /// All subsets of this event, in ascending bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Event> {
        let n = self.n;
        let mask = self.bits;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == mask {
                None
            } else {
                Some((current.wrapping_sub(mask)) & mask)
            };
            Some(Event { bits: current, n })
        })
    }

    /// All supersets of this event within its space, ascending.
    pub fn supersets(self) -> impl Iterator<Item = Event> {
        let base = self.bits;
        self.complement().subsets().map(move |extra| Event {
            bits: base | extra.bits,
            n: extra.n,
        })
    }

    /// Canonical hex encoding, e.g. `0x5`.
    pub fn to_hex(self) -> String {
        format!("{:#x}", self.bits)
    }

    pub fn parse_hex(n: usize, text: &str) -> Result<Event> {
        let digits = text.trim();
        let digits = digits
            .strip_prefix("0x")
            .or_else(|| digits.strip_prefix("0X"))
            .unwrap_or(digits);
        let bits = u32::from_str_radix(digits, 16)
            .map_err(|_| Error::Parse(format!("not a hex bitmask: {text:?}")))?;
        Event::try_from_bits(n, bits)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event({:#x}/{})", self.bits, self.n)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Every event of an `n`-history space in ascending bitmask order.
pub fn all_events(n: usize) -> impl Iterator<Item = Event> {
    (0..=full_mask(n)).map(move |bits| Event { bits, n: n as u8 })
}

fn check_same_space(a: Event, b: Event) -> Result<()> {
    if a.n != b.n {
        return Err(Error::SpaceMismatch {
            left: a.space_size(),
            right: b.space_size(),
        });
    }
    Ok(())
}

/// Ring addition: symmetric difference.
pub fn event_add(a: Event, b: Event) -> Result<Event> {
    check_same_space(a, b)?;
    Ok(a.symmetric_difference(b))
}

/// Ring multiplication: intersection.
pub fn event_mul(a: Event, b: Event) -> Result<Event> {
    check_same_space(a, b)?;
    Ok(a.intersection(b))
}

/// Returns an error naming the first overlapping pair, if any.
pub fn ensure_disjoint(events: &[Event]) -> Result<()> {
    for (i, a) in events.iter().enumerate() {
        for b in &events[i + 1..] {
            check_same_space(*a, *b)?;
            if !a.is_disjoint(*b) {
                return Err(Error::NotDisjoint(format!(
                    "{a} and {b} share {}",
                    a.intersection(*b)
                )));
            }
        }
    }
    Ok(())
}

/// Visits every unordered family of `order` pairwise-disjoint events of an
/// `n`-history space. Members appear in first-occurrence order of their
/// least history; with `allow_empty` the trailing members may be empty.
/// Stops early and returns true when `visit` returns true.
pub fn disjoint_families<F>(n: usize, order: usize, allow_empty: bool, mut visit: F) -> bool
where
    F: FnMut(&[Event]) -> bool,
{
    fn step<F: FnMut(&[Event]) -> bool>(
        n: usize,
        order: usize,
        allow_empty: bool,
        position: usize,
        used: usize,
        bits: &mut [u32],
        visit: &mut F,
    ) -> bool {
        if !allow_empty && n - position < order - used {
            return false;
        }
        if position == n {
            let events: Vec<Event> = bits.iter().map(|b| Event::from_bits(n, *b)).collect();
            return visit(&events);
        }
        for label in 0..=(used + 1).min(order) {
            if label > 0 {
                bits[label - 1] |= 1 << position;
            }
            let now_used = used.max(label);
            let stop = step(n, order, allow_empty, position + 1, now_used, bits, visit);
            if label > 0 {
                bits[label - 1] &= !(1 << position);
            }
            if stop {
                return true;
            }
        }
        false
    }
    let mut bits = vec![0u32; order];
    step(n, order, allow_empty, 0, 0, &mut bits, &mut visit)
}
