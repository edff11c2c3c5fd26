//! JSON encodings for theories, co-events, partitions and feasibility
//! results. Events are written as lowercase hex bitmasks (`"0x5"`) and
//! rationals as `"p/q"` strings or integers.

use num_complex::Complex;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::coevent::CoEvent;
use crate::dynamics::{Certificate, Feasibility, FeasibilitySystem, RowKind};
use crate::error::{Error, Result};
use crate::event::{all_events, Event, SampleSpace};
use crate::partition::Partition;
use crate::rational::{format_rational, parse_rational};
use crate::theory::{HistoriesTheory, MeasureSource};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RationalText {
    Integer(i64),
    Text(String),
}

impl RationalText {
    fn parse(&self) -> Result<BigRational> {
        match self {
            RationalText::Integer(i) => Ok(BigRational::from_integer((*i).into())),
            RationalText::Text(t) => parse_rational(t),
        }
    }

    fn of(value: &BigRational) -> Self {
        RationalText::Text(format_rational(value))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MeasureFile {
    Table { values: Map<String, Value> },
    Decoherence { matrix: Vec<Vec<[RationalText; 2]>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TheoryFile {
    histories: Vec<String>,
    measure: MeasureFile,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses a theory document. Table measures must list all `2^n` events.
pub fn parse_theory(text: &str) -> Result<HistoriesTheory> {
    let file: TheoryFile = serde_json::from_str(text).map_err(json_error)?;
    let space = SampleSpace::new(file.histories)?;
    let n = space.len();
    let source = match file.measure {
        MeasureFile::Table { values } => {
            let mut table: Vec<Option<BigRational>> = vec![None; 1 << n];
            for (key, value) in values {
                let event = Event::parse_hex(n, &key)?;
                let value: RationalText = serde_json::from_value(value).map_err(json_error)?;
                let slot = &mut table[event.index()];
                if slot.is_some() {
                    return Err(Error::Parse(format!("event {event} listed twice")));
                }
                *slot = Some(value.parse()?);
            }
            let mut out = Vec::with_capacity(table.len());
            for (mask, v) in table.into_iter().enumerate() {
                out.push(
                    v.ok_or_else(|| Error::Parse(format!("table is missing event {:#x}", mask)))?,
                );
            }
            MeasureSource::Table(out)
        }
        MeasureFile::Decoherence { matrix } => {
            let rows = matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|[re, im]| Ok(Complex::new(re.parse()?, im.parse()?)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            MeasureSource::Decoherence(rows)
        }
    };
    HistoriesTheory::new(space, source)
}

pub fn theory_to_json(theory: &HistoriesTheory) -> Value {
    let measure = match theory.source() {
        MeasureSource::Table(values) => {
            let mut map = Map::new();
            for e in all_events(theory.size()) {
                map.insert(
                    e.to_hex(),
                    Value::String(format_rational(&values[e.index()])),
                );
            }
            MeasureFile::Table { values: map }
        }
        MeasureSource::Decoherence(d) => MeasureFile::Decoherence {
            matrix: d
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| [RationalText::of(&c.re), RationalText::of(&c.im)])
                        .collect()
                })
                .collect(),
        },
    };
    let file = TheoryFile {
        histories: theory.space().labels().to_vec(),
        measure,
    };
    serde_json::to_value(file).expect("theory serializes")
}

pub fn coevent_to_json(phi: &CoEvent) -> Value {
    match phi {
        CoEvent::Multiplicative(dual) => json!({ "dual": dual.to_hex() }),
        CoEvent::Table(t) => {
            let mut map = Map::new();
            for e in all_events(t.space_size()) {
                map.insert(e.to_hex(), json!(u8::from(t.values()[e.index()])));
            }
            json!({ "table": map })
        }
    }
}

pub fn parse_coevent(n: usize, value: &Value) -> Result<CoEvent> {
    if let Some(dual) = value.get("dual") {
        let text = dual
            .as_str()
            .ok_or_else(|| Error::Parse("dual must be a hex string".into()))?;
        return CoEvent::dual_of(Event::parse_hex(n, text)?);
    }
    if let Some(table) = value.get("table").and_then(Value::as_object) {
        let mut values = vec![false; 1 << n];
        let mut seen = vec![false; 1 << n];
        for (key, v) in table {
            let e = Event::parse_hex(n, key)?;
            let bit = match v.as_u64() {
                Some(0) => false,
                Some(1) => true,
                _ => {
                    return Err(Error::Parse(format!(
                        "truth value for {key} must be 0 or 1"
                    )))
                }
            };
            values[e.index()] = bit;
            seen[e.index()] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse("co-event table must list every event".into()));
        }
        return CoEvent::from_table(n, values);
    }
    Err(Error::Parse(
        "co-event must have a \"dual\" or \"table\" field".into(),
    ))
}

pub fn partition_to_json(partition: &Partition) -> Value {
    Value::Array(
        partition
            .blocks()
            .iter()
            .map(|b| Value::String(b.to_hex()))
            .collect(),
    )
}

pub fn parse_partition(n: usize, value: &Value) -> Result<Partition> {
    let blocks = value
        .as_array()
        .ok_or_else(|| Error::Parse("partition must be an array of hex blocks".into()))?
        .iter()
        .map(|b| {
            let text = b
                .as_str()
                .ok_or_else(|| Error::Parse("block must be a hex string".into()))?;
            Event::parse_hex(n, text)
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(n, blocks)
}

/// `{"feasible": true, "assignment": {...}}` keyed by co-event dual (or
/// position for table co-events), or `{"feasible": false, "certificate": ...}`.
pub fn feasibility_to_json(system: &FeasibilitySystem, result: &Feasibility) -> Value {
    match result {
        Feasibility::Feasible(p) => {
            let mut map = Map::new();
            for (i, (phi, value)) in system.coevents.iter().zip(p).enumerate() {
                let key = match phi {
                    CoEvent::Multiplicative(d) => d.to_hex(),
                    CoEvent::Table(_) => format!("#{i}"),
                };
                map.insert(key, Value::String(format_rational(value)));
            }
            json!({ "feasible": true, "assignment": map })
        }
        Feasibility::Infeasible(Certificate::InconsistentRow { row }) => {
            let event = match &system.rows[*row].kind {
                RowKind::Event(e) => Value::String(e.to_hex()),
                RowKind::Normalization => Value::String("normalization".into()),
            };
            json!({ "feasible": false, "certificate": { "row": row, "event": event } })
        }
        Feasibility::Infeasible(Certificate::Farkas { multipliers }) => {
            let y: Vec<Value> = multipliers
                .iter()
                .map(|m| Value::String(format_rational(m)))
                .collect();
            json!({ "feasible": false, "certificate": { "farkas": y } })
        }
    }
}
