//! Finite histories theories: a sample space together with an exact measure,
//! given either as a table over all events or by a decoherence functional.

use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::{all_events, full_mask, Event, SampleSpace, ENUMERATION_CAP};
use crate::partition::Partition;
use crate::rational::{format_rational, ComplexRational};

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSource {
    /// `values[mask]` is the measure of the event with that bitmask.
    Table(Vec<BigRational>),
    /// Decoherence matrix over pairs of histories.
    Decoherence(Vec<Vec<ComplexRational>>),
}

#[derive(Debug)]
pub struct HistoriesTheory {
    space: SampleSpace,
    source: MeasureSource,
    allow_large: bool,
    table: OnceLock<Vec<BigRational>>,
}

impl Clone for HistoriesTheory {
    fn clone(&self) -> Self {
        HistoriesTheory {
            space: self.space.clone(),
            source: self.source.clone(),
            allow_large: self.allow_large,
            table: self.table.clone(),
        }
    }
}

impl HistoriesTheory {
    /// Checks only the shape of the measure source. Use [`validate`] for the
    /// measure axioms.
    pub fn new(space: SampleSpace, source: MeasureSource) -> Result<Self> {
        let n = space.len();
        match &source {
            MeasureSource::Table(values) => {
                if values.len() != 1 << n {
                    return Err(Error::InvalidMeasure(format!(
                        "table has {} entries, expected 2^{n} = {}",
                        values.len(),
                        1usize << n
                    )));
                }
            }
            MeasureSource::Decoherence(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidMeasure(format!(
                        "decoherence matrix must be {n}x{n}"
                    )));
                }
            }
        }
        Ok(HistoriesTheory {
            space,
            source,
            allow_large: false,
            table: OnceLock::new(),
        })
    }

    /// Table-form theory from a closure evaluated on every event.
    pub fn from_fn<F>(space: SampleSpace, mut measure: F) -> Result<Self>
    where
        F: FnMut(Event) -> BigRational,
    {
        let values = all_events(space.len()).map(&mut measure).collect();
        Self::new(space, MeasureSource::Table(values))
    }

    /// Classical theory from per-history weights (Kolmogorov additive).
    pub fn classical(space: SampleSpace, weights: &[BigRational]) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::InvalidMeasure(
                "one weight per history is required".into(),
            ));
        }
        let n = space.len();
        let mut values = vec![BigRational::zero(); 1 << n];
        for mask in 1..(1usize << n) {
            let low = mask.trailing_zeros() as usize;
            values[mask] = &values[mask & (mask - 1)] + &weights[low];
        }
        Self::new(space, MeasureSource::Table(values))
    }

    /// Decoherence-form theory `D(i, j) = a_i * conj(a_j)` from amplitudes.
    pub fn from_amplitudes(space: SampleSpace, amplitudes: &[ComplexRational]) -> Result<Self> {
        if amplitudes.len() != space.len() {
            return Err(Error::InvalidMeasure(
                "one amplitude per history is required".into(),
            ));
        }
        let matrix = amplitudes
            .iter()
            .map(|ai| amplitudes.iter().map(|aj| ai * aj.conj()).collect())
            .collect();
        Self::new(space, MeasureSource::Decoherence(matrix))
    }

    /// Lifts the default enumeration cap for this theory (up to the hard
    /// limit on histories).
    pub fn with_large_enumeration(mut self, allow: bool) -> Self {
        self.allow_large = allow;
        self
    }

    pub fn allows_large_enumeration(&self) -> bool {
        self.allow_large
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn source(&self) -> &MeasureSource {
        &self.source
    }

    pub fn size(&self) -> usize {
        self.space.len()
    }

    pub fn is_decoherence_form(&self) -> bool {
        matches!(self.source, MeasureSource::Decoherence(_))
    }

    pub fn full(&self) -> Event {
        self.space.full()
    }

    /// Errors unless exhaustive `2^n` scans are permitted for this theory.
    pub fn check_enumerable(&self) -> Result<()> {
        if self.size() > ENUMERATION_CAP && !self.allow_large {
            return Err(Error::EnumerationCap {
                size: self.size(),
                cap: ENUMERATION_CAP,
            });
        }
        Ok(())
    }

    fn check_event(&self, event: Event) -> Result<()> {
        if event.space_size() != self.size() {
            return Err(Error::SpaceMismatch {
                left: event.space_size(),
                right: self.size(),
            });
        }
        Ok(())
    }

    /// The measure of an event. For decoherence form this is the real part
    /// of the sum of `D` over `A x A`; the imaginary part cancels for any
    /// Hermitian matrix, which [`validate`] checks.
    pub fn mu(&self, event: Event) -> BigRational {
        assert_eq!(
            event.space_size(),
            self.size(),
            "event from another sample space"
        );
        if let Some(table) = self.table.get() {
            return table[event.index()].clone();
        }
        match &self.source {
            MeasureSource::Table(values) => values[event.index()].clone(),
            MeasureSource::Decoherence(d) => {
                let mut total = BigRational::zero();
                for i in event.members() {
                    for j in event.members() {
                        total += &d[i][j].re;
                    }
                }
                total
            }
        }
    }

    pub fn try_mu(&self, event: Event) -> Result<BigRational> {
        self.check_event(event)?;
        Ok(self.mu(event))
    }

    /// Measure of every event indexed by bitmask. Computed once and cached.
    pub fn mu_table(&self) -> Result<&[BigRational]> {
        if let MeasureSource::Table(values) = &self.source {
            return Ok(values);
        }
        self.check_enumerable()?;
        Ok(self.table.get_or_init(|| match &self.source {
            MeasureSource::Decoherence(d) => decoherence_table(d),
            MeasureSource::Table(values) => values.clone(),
        }))
    }

    /// `D(X, Y) = sum of D(i, j) over i in X, j in Y`.
    pub fn decoherence(&self, x: Event, y: Event) -> Result<ComplexRational> {
        self.check_event(x)?;
        self.check_event(y)?;
        let MeasureSource::Decoherence(d) = &self.source else {
            return Err(Error::NotDecoherenceForm);
        };
        let mut total = ComplexRational::zero();
        for i in x.members() {
            for j in y.members() {
                total += &d[i][j];
            }
        }
        Ok(total)
    }

    /// New table-form theory whose histories are the blocks of `partition`.
    pub fn coarse_grain(&self, partition: &Partition) -> Result<HistoriesTheory> {
        partition.check_space(self.size())?;
        let blocks = partition.blocks();
        let labels: Vec<String> = blocks.iter().map(|b| self.space.describe(*b)).collect();
        let space = SampleSpace::new(labels)?;
        let k = blocks.len();
        let mut values = Vec::with_capacity(1 << k);
        let mut fine = vec![0u32; 1 << k];
        for mask in 0..(1usize << k) {
            if mask > 0 {
                let low = mask.trailing_zeros() as usize;
                fine[mask] = fine[mask & (mask - 1)] | blocks[low].bits();
            }
            values.push(self.mu(Event::from_bits(self.size(), fine[mask])));
        }
        let mut coarse = HistoriesTheory::new(space, MeasureSource::Table(values))?;
        coarse.allow_large = self.allow_large;
        Ok(coarse)
    }

    /// Checks the measure axioms on every event.
    pub fn validate(&self, options: ValidationOptions) -> Result<ValidationReport> {
        self.check_enumerable()?;
        let n = self.size();
        let mut violations = Vec::new();
        let mut warnings = Vec::new();

        if let MeasureSource::Decoherence(d) = &self.source {
            for i in 0..n {
                for j in i..n {
                    if d[i][j] != d[j][i].conj() {
                        violations.push(Violation::Hermiticity { row: i, column: j });
                    }
                }
            }
        }

        let table = self.mu_table()?;
        if !table[0].is_zero() {
            violations.push(Violation::EmptyNotNull {
                value: table[0].clone(),
            });
        }
        let total = &table[full_mask(n) as usize];
        if !total.is_one() {
            let v = Violation::Normalization {
                value: total.clone(),
            };
            if options.relax_normalization {
                warnings.push(v);
            } else {
                violations.push(v);
            }
        }
        for (mask, value) in table.iter().enumerate() {
            if value.is_negative() {
                violations.push(Violation::Positivity {
                    event: Event::from_bits(n, mask as u32),
                    value: value.clone(),
                });
            }
        }

        let null_family: Vec<Event> = all_events(n)
            .filter(|e| table[e.index()].is_zero())
            .collect();
        let negligible = downward_closure(n, &null_family);
        let negligible_family = all_events(n).filter(|e| negligible[e.index()]).collect();
        Ok(ValidationReport {
            violations,
            warnings,
            null_family,
            negligible_family,
        })
    }
}

fn decoherence_table(d: &[Vec<ComplexRational>]) -> Vec<BigRational> {
    let n = d.len();
    let two = BigRational::from_integer(2.into());
    // mu(A) = mu(A - k) + D(k,k) + 2 Re sum_{i in A - k} D(i,k), k = lowest member.
    // Each entry depends on one with fewer members, so fill by popcount layer.
    let size = 1usize << n;
    let mut table = vec![BigRational::zero(); size];
    for layer in 1..=n {
        let masks: Vec<usize> = (1..size)
            .filter(|m| m.count_ones() as usize == layer)
            .collect();
        let computed: Vec<(usize, BigRational)> = masks
            .par_iter()
            .map(|&mask| {
                let k = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                let mut cross = BigRational::zero();
                let mut bits = rest;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    cross += &d[i][k].re;
                    bits &= bits - 1;
                }
                (mask, &table[rest] + &d[k][k].re + &two * cross)
            })
            .collect();
        for (mask, value) in computed {
            table[mask] = value;
        }
    }
    table
}

/// Marks every subset of an event in `family`; one pass in descending
/// popcount order.
pub(crate) fn downward_closure(n: usize, family: &[Event]) -> Vec<bool> {
    let size = 1usize << n;
    let mut marked = vec![false; size];
    for e in family {
        marked[e.index()] = true;
    }
    propagate_down(n, &mut marked);
    marked
}

pub(crate) fn propagate_down(n: usize, marked: &mut [bool]) {
    // Removing a bit lowers the mask, so one descending pass sees every
    // superset before its subsets.
    for mask in (1..1usize << n).rev() {
        if marked[mask] {
            let mut bits = mask;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                marked[mask & !low] = true;
                bits &= bits - 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Report `mu(Omega) != 1` as a warning instead of a violation.
    pub relax_normalization: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Positivity { event: Event, value: BigRational },
    EmptyNotNull { value: BigRational },
    Normalization { value: BigRational },
    Hermiticity { row: usize, column: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Positivity { event, value } => {
                write!(
                    f,
                    "positivity: mu({event}) = {} < 0",
                    format_rational(value)
                )
            }
            Violation::EmptyNotNull { value } => {
                write!(f, "empty event: mu(0x0) = {} != 0", format_rational(value))
            }
            Violation::Normalization { value } => {
                write!(
                    f,
                    "normalization: mu(Omega) = {} != 1",
                    format_rational(value)
                )
            }
            Violation::Hermiticity { row, column } => {
                write!(
                    f,
                    "hermiticity: D({row},{column}) != conj(D({column},{row}))"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
    /// Events of measure exactly zero, ascending.
    pub null_family: Vec<Event>,
    /// Subsets of null events, ascending.
    pub negligible_family: Vec<Event>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}
