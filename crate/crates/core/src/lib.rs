//! Exact finite quantum measure theory in the co-event interpretation.
//!
//! The crate works with finite histories theories: a sample space of
//! histories, the full power set as event algebra, and a measure given either
//! as a table or by a decoherence functional. All arithmetic is exact
//! (`BigRational`, with complex numbers as pairs of rationals), because the
//! central predicates, such as "this event has measure zero", cannot survive
//! floating point.
//!
//! - [`event`] and [`theory`]: events as a Boolean ring, measures, validation,
//!   coarse graining.
//! - [`interference`]: the interference hierarchy and the level of a theory.
//! - [`coevent`]: co-events, duality, (approximate) preclusion, primitives.
//! - [`partition`]: decoherence, separability, classicality of partitions and
//!   the principle classical partition.
//! - [`dynamics`]: probability measures on co-event sets and the quadratic
//!   identity, solved with an exact simplex.
//! - [`bernoulli`]: closed-form analytics for the n-fold repeated coin.
//!
//! ```
//! use num_complex::Complex;
//! use qmeasure::{coevent, rational::int, Event, HistoriesTheory, SampleSpace};
//!
//! let space = SampleSpace::new(["a", "b", "c"])?;
//! let amps = [1, -1, 1].map(|a| Complex::new(int(a), int(0)));
//! let theory = HistoriesTheory::from_amplitudes(space, &amps)?;
//! let primitives = coevent::primitive_duals(&theory, &int(0))?;
//! assert_eq!(primitives, vec![Event::from_bits(3, 0b101)]);
//! # Ok::<(), qmeasure::Error>(())
//! ```

pub mod bernoulli;
pub mod coevent;
pub mod dynamics;
pub mod error;
pub mod event;
pub mod interference;
pub mod io;
pub mod partition;
pub mod rational;
pub mod recipes;
pub mod simplex;
pub mod theory;

pub use coevent::CoEvent;
pub use error::{Error, Result};
pub use event::{Event, SampleSpace};
pub use partition::Partition;
pub use theory::{HistoriesTheory, MeasureSource};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/events-and-measures.md")]
    mod events_and_measures {}
    #[doc = include_str!("../../../book/src/interference.md")]
    mod interference {}
    #[doc = include_str!("../../../book/src/coevents.md")]
    mod coevents {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/repeated-trials.md")]
    mod repeated_trials {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
