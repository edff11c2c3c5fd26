use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use qmeasure::bernoulli::{self, BernoulliModel, Decision, HypothesisTest, TrialSequence};
use qmeasure::coevent::{self, CoEvent};
use qmeasure::dynamics::{self, ConstraintMode, Feasibility, FeasibilitySystem, RowKind};
use qmeasure::event::all_events;
use qmeasure::io;
use qmeasure::rational::{approx_f64, format_rational, parse_rational, scientific};
use qmeasure::recipes::{self, RecipeOptions};
use qmeasure::theory::ValidationOptions;
use qmeasure::{interference, partition, Event, HistoriesTheory, Partition};
use serde_json::{json, Value};

use crate::output::{Failure, Report};
use crate::{CoinAction, Command, FeasibilityAction, Mode, PartitionAction, TheoryArgs};

type Outcome = Result<Report, Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Validate {
            theory,
            relax_normalization,
        } => validate(&theory, relax_normalization),
        Command::Measure {
            theory,
            events,
            interference,
            level,
        } => measure(&theory, &events, &interference, level),
        Command::Primitives { theory, eps } => primitives(&theory, &eps),
        Command::Partition { theory, action } => partition_command(&theory, action),
        Command::Coin { n, p, eps, action } => coin(n, &p, &eps, action),
        Command::Feasibility {
            theory,
            coevents,
            all_duals,
            mode,
            observables,
            action,
        } => feasibility(
            &theory,
            coevents.as_deref(),
            all_duals,
            mode,
            &observables,
            action,
        ),
        Command::Hypothesis {
            n,
            p0,
            eps,
            p_true,
            seed,
            runs,
            sequence,
        } => hypothesis(
            n,
            &p0,
            &eps,
            p_true.as_deref(),
            seed,
            runs,
            sequence.as_deref(),
        ),
        Command::PaperCheck {
            samples,
            theories,
            seed,
            only,
        } => paper_check(
            RecipeOptions {
                samples,
                random_theories: theories,
                seed,
            },
            only,
        ),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_theory(args: &TheoryArgs) -> Result<HistoriesTheory, Failure> {
    let theory = io::parse_theory(&read(&args.theory)?)?;
    Ok(theory.with_large_enumeration(args.allow_large))
}

fn rational(text: &str) -> Result<BigRational, Failure> {
    Ok(parse_rational(text)?)
}

fn hex_list(events: &[Event]) -> Value {
    Value::Array(events.iter().map(|e| Value::String(e.to_hex())).collect())
}

fn validate(args: &TheoryArgs, relax_normalization: bool) -> Outcome {
    let theory = load_theory(args)?;
    let report = theory.validate(ValidationOptions {
        relax_normalization,
    })?;
    let strings =
        |v: &[qmeasure::theory::Violation]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let violations = strings(&report.violations);
    let warnings = strings(&report.warnings);
    let mut human = String::new();
    if report.is_valid() {
        writeln!(
            human,
            "valid histories theory on {} histories",
            theory.size()
        )
        .unwrap();
    } else {
        writeln!(human, "invalid histories theory").unwrap();
    }
    for v in &violations {
        writeln!(human, "  violation: {v}").unwrap();
    }
    for w in &warnings {
        writeln!(human, "  warning: {w}").unwrap();
    }
    let describe = |events: &[Event]| {
        events
            .iter()
            .map(|e| theory.space().describe(*e))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(human, "null events: {}", describe(&report.null_family)).unwrap();
    writeln!(
        human,
        "negligible events: {}",
        describe(&report.negligible_family)
    )
    .unwrap();
    let json = json!({
        "valid": report.is_valid(),
        "violations": violations,
        "warnings": warnings,
        "null_family": hex_list(&report.null_family),
        "negligible_family": hex_list(&report.negligible_family),
    });
    let code = if report.is_valid() { 0 } else { 1 };
    Ok(Report::new(human, json).exit(code))
}

fn measure(args: &TheoryArgs, events: &[String], families: &[String], level: bool) -> Outcome {
    let theory = load_theory(args)?;
    let n = theory.size();
    let space = theory.space();
    let mut human = String::new();
    let mut json = serde_json::Map::new();

    let listed: Vec<Event> = if events.is_empty() && families.is_empty() && !level {
        theory.check_enumerable()?;
        all_events(n).collect()
    } else {
        events
            .iter()
            .map(|e| Event::parse_hex(n, e))
            .collect::<Result<_, _>>()?
    };
    let mut csv = String::from("event,label,mu\n");
    let mut measures = serde_json::Map::new();
    for e in &listed {
        let mu = format_rational(&theory.try_mu(*e)?);
        writeln!(human, "mu{} = {mu}", space.describe(*e)).unwrap();
        writeln!(csv, "{},\"{}\",{mu}", e.to_hex(), space.describe(*e)).unwrap();
        measures.insert(e.to_hex(), Value::String(mu));
    }
    if !listed.is_empty() {
        json.insert("mu".into(), Value::Object(measures));
    }

    let mut terms = Vec::new();
    for family in families {
        let members: Vec<Event> = family
            .split(',')
            .map(|e| Event::parse_hex(n, e))
            .collect::<Result<_, _>>()?;
        let value = format_rational(&interference::interference(&theory, &members)?);
        let names: Vec<String> = members.iter().map(|e| space.describe(*e)).collect();
        writeln!(human, "I_{}({}) = {value}", members.len(), names.join(", ")).unwrap();
        terms.push(json!({ "events": hex_list(&members), "value": value }));
    }
    if !terms.is_empty() {
        json.insert("interference".into(), Value::Array(terms));
    }

    if level {
        let k = interference::level(&theory)?;
        writeln!(human, "level = {k}").unwrap();
        json.insert("level".into(), json!(k));
    }
    Ok(Report::new(human, Value::Object(json)).with_csv(csv))
}

fn primitives(args: &TheoryArgs, eps: &str) -> Outcome {
    let theory = load_theory(args)?;
    let eps = rational(eps)?;
    let duals = coevent::primitive_duals(&theory, &eps)?;
    let mut human = String::new();
    let mut csv = String::from("dual,label\n");
    for d in &duals {
        writeln!(
            human,
            "{}  {}*",
            io::coevent_to_json(&CoEvent::Multiplicative(*d)),
            theory.space().describe(*d)
        )
        .unwrap();
        writeln!(csv, "{},\"{}\"", d.to_hex(), theory.space().describe(*d)).unwrap();
    }
    if duals.is_empty() {
        human.push_str("no primitive co-events: Omega itself is negligible\n");
    }
    let json = Value::Array(
        duals
            .iter()
            .map(|d| io::coevent_to_json(&CoEvent::Multiplicative(*d)))
            .collect(),
    );
    Ok(Report::new(human, json).with_csv(csv))
}

fn load_partition(n: usize, text: &str) -> Result<Partition, Failure> {
    let source = if text.trim_start().starts_with('[') {
        text.to_string()
    } else {
        read(Path::new(text))?
    };
    let value: Value =
        serde_json::from_str(&source).map_err(|e| Failure::input(format!("partition: {e}")))?;
    Ok(io::parse_partition(n, &value)?)
}

fn describe_partition(theory: &HistoriesTheory, p: &Partition) -> String {
    let blocks: Vec<String> = p
        .blocks()
        .iter()
        .map(|b| theory.space().describe(*b))
        .collect();
    format!("{{{}}}", blocks.join(", "))
}

fn partition_command(args: &TheoryArgs, action: PartitionAction) -> Outcome {
    let theory = load_theory(args)?;
    let n = theory.size();
    let verdict = |name: &str, p: &Partition, holds: bool| {
        let human = format!("{name} {}: {holds}\n", describe_partition(&theory, p));
        Report::new(
            human,
            json!({ "partition": io::partition_to_json(p), name: holds }),
        )
    };
    match action {
        PartitionAction::Decoherence { partition } => {
            let p = load_partition(n, &partition)?;
            Ok(verdict(
                "decoherent",
                &p,
                partition::is_decoherent(&theory, &p)?,
            ))
        }
        PartitionAction::Separability { partition } => {
            let p = load_partition(n, &partition)?;
            Ok(verdict(
                "separable",
                &p,
                partition::is_preclusively_separable(&theory, &p)?,
            ))
        }
        PartitionAction::Classical { partition, eps } => {
            let p = load_partition(n, &partition)?;
            let holds = partition::is_classical_wrt_m(&theory, &p, &rational(&eps)?)?;
            Ok(verdict("classical", &p, holds))
        }
        PartitionAction::Principle { eps } => {
            let (lambda, fat) =
                partition::principle_classical_partition(&theory, &rational(&eps)?)?;
            let mut human = format!(
                "principle classical partition: {}\n",
                describe_partition(&theory, &lambda)
            );
            for (class, dual) in fat.classes.iter().zip(&fat.fat_duals) {
                let members: Vec<String> =
                    class.iter().map(|d| theory.space().describe(*d)).collect();
                writeln!(
                    human,
                    "  fat dual {} from {}",
                    theory.space().describe(*dual),
                    members.join(" ")
                )
                .unwrap();
            }
            if !fat.uncovered.is_empty() {
                writeln!(
                    human,
                    "  uncovered histories {}",
                    theory.space().describe(fat.uncovered)
                )
                .unwrap();
            }
            let json = json!({
                "partition": io::partition_to_json(&lambda),
                "fat_duals": hex_list(&fat.fat_duals),
                "classes": fat.classes.iter().map(|c| hex_list(c)).collect::<Vec<_>>(),
                "uncovered": fat.uncovered.to_hex(),
            });
            Ok(Report::new(human, json))
        }
    }
}

fn big_json(value: &BigInt) -> Value {
    let (mantissa, exponent) = scientific(value, 2);
    json!({ "exact": value.to_string(), "scientific": format!("{mantissa}e{exponent}") })
}

fn coin(n: usize, p: &str, eps: &str, action: CoinAction) -> Outcome {
    let model = BernoulliModel::new(n, rational(p)?, rational(eps)?)?;
    match action {
        CoinAction::HEpsilon => {
            let h = model.h_epsilon().ok_or(qmeasure::Error::NoThreshold)?;
            let below = model.cumulative(h)?;
            let next = if h < n {
                Some(model.cumulative(h + 1)?)
            } else {
                None
            };
            let json = json!({
                "h_epsilon": h,
                "cumulative": format_rational(&below),
                "cumulative_next": next.as_ref().map(format_rational),
            });
            Ok(Report::new(format!("{h}\n"), json.clone()).with_csv(format!("h_epsilon\n{h}\n")))
        }
        CoinAction::Cumulative { heads } => {
            let c = model.cumulative(heads)?;
            let human = format!(
                "P(L_{heads}) = {} ~ {:e}\n",
                format_rational(&c),
                approx_f64(&c)
            );
            Ok(Report::new(
                human,
                json!({ "heads": heads, "cumulative": format_rational(&c) }),
            ))
        }
        CoinAction::Straddle => {
            let s = model.straddle_set_cardinality()?;
            let (mantissa, exponent) = scientific(&s, 2);
            let human = format!("{s}\n(~ {mantissa} x 10^{exponent})\n");
            Ok(Report::new(
                human,
                json!({ "straddle_set_cardinality": big_json(&s) }),
            ))
        }
        CoinAction::PrimitiveSize => {
            let s = model.uniform_primitive_cardinality()?;
            Ok(Report::new(
                format!("{s}\n"),
                json!({ "primitive_cardinality": big_json(&s) }),
            ))
        }
        CoinAction::Singleton { heads } => {
            let preclusive = model.is_singleton_preclusive(heads)?;
            let mass = model.prob_history(heads)?;
            let human = format!(
                "history with {heads} heads: P = {} , preclusive = {preclusive}\n",
                format_rational(&mass)
            );
            Ok(Report::new(
                human,
                json!({ "heads": heads, "probability": format_rational(&mass), "preclusive": preclusive }),
            ))
        }
        CoinAction::EvenOdd => {
            let r = model.even_odd_witness()?;
            let v = r.valuations;
            let mut human = String::new();
            writeln!(human, "H^E = {}, H^O = {}", r.h_even, r.h_odd).unwrap();
            writeln!(
                human,
                "|G_H^E| = {} histories",
                scientific_text(&r.g_even_count)
            )
            .unwrap();
            writeln!(human, "eps 2^n = {}", approx_f64(&r.threshold)).unwrap();
            writeln!(human, "|G_H^E| > eps 2^n: {}", r.g_even_exceeds).unwrap();
            writeln!(human, "witness history: {}", r.witness).unwrap();
            writeln!(
                human,
                "phi(L_E) = {}, phi(G_E) = {}, phi(L_O) = {}, phi(G_O) = {}",
                u8::from(v.l_even),
                u8::from(v.g_even),
                u8::from(v.l_odd),
                u8::from(v.g_odd)
            )
            .unwrap();
            writeln!(human, "certified: {}", r.certified()).unwrap();
            let json = json!({
                "m": r.m,
                "h_even": r.h_even,
                "h_odd": r.h_odd,
                "g_even_count": big_json(&r.g_even_count),
                "l_odd_count": big_json(&r.l_odd_count),
                "primitive_cardinality": big_json(&r.primitive_cardinality),
                "g_even_exceeds": r.g_even_exceeds,
                "witness": r.witness.to_string(),
                "valuations": { "l_even": v.l_even, "g_even": v.g_even, "l_odd": v.l_odd, "g_odd": v.g_odd },
                "certified": r.certified(),
            });
            Ok(Report::new(human, json))
        }
        CoinAction::Tail => {
            let rows = model.tail_rows();
            let mut human = String::from("    H  P(N_H)        P(L_H)\n");
            let mut csv =
                String::from("heads,p_exactly,p_at_most,p_exactly_exact,p_at_most_exact\n");
            let mut json_rows = Vec::with_capacity(rows.len());
            for (h, exact, cumulative) in &rows {
                writeln!(
                    human,
                    "{h:>5}  {:<12.6e}  {:<12.6e}",
                    approx_f64(exact),
                    approx_f64(cumulative)
                )
                .unwrap();
                writeln!(
                    csv,
                    "{h},{:e},{:e},{},{}",
                    approx_f64(exact),
                    approx_f64(cumulative),
                    format_rational(exact),
                    format_rational(cumulative)
                )
                .unwrap();
                json_rows.push(json!({
                    "heads": h,
                    "p_exactly": format_rational(exact),
                    "p_at_most": format_rational(cumulative),
                }));
            }
            Ok(Report::new(human, Value::Array(json_rows)).with_csv(csv))
        }
    }
}

fn scientific_text(value: &BigInt) -> String {
    let (mantissa, exponent) = scientific(value, 3);
    format!("{mantissa}e{exponent}")
}

fn coevent_set(
    theory: &HistoriesTheory,
    path: Option<&Path>,
    all_duals: bool,
) -> Result<Vec<CoEvent>, Failure> {
    let n = theory.size();
    if all_duals {
        theory.check_enumerable()?;
        return Ok(all_events(n)
            .filter(|e| !e.is_empty())
            .map(CoEvent::Multiplicative)
            .collect());
    }
    let path = path.ok_or_else(|| Failure::input("give --coevents FILE or --all-duals"))?;
    let value: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::input(format!("co-events: {e}")))?;
    let items = value
        .as_array()
        .ok_or_else(|| Failure::input("co-events must be a JSON array"))?;
    Ok(items
        .iter()
        .map(|v| io::parse_coevent(n, v))
        .collect::<Result<_, _>>()?)
}

fn label(theory: &HistoriesTheory, phi: &CoEvent, index: usize) -> String {
    match phi {
        CoEvent::Multiplicative(d) => format!("{}*", theory.space().describe(*d)),
        CoEvent::Table(_) => format!("phi#{index}"),
    }
}

fn describe_system(theory: &HistoriesTheory, system: &FeasibilitySystem) -> (String, Value) {
    let mut human = String::new();
    let mut rows = Vec::new();
    for row in &system.rows {
        let terms: Vec<String> = row
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c)
            .map(|(k, _)| format!("p[{}]", label(theory, &system.coevents[k], k)))
            .collect();
        let lhs = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        let (name, event) = match &row.kind {
            RowKind::Event(e) => (theory.space().describe(*e), Value::String(e.to_hex())),
            RowKind::Normalization => (
                "normalization".to_string(),
                Value::String("normalization".into()),
            ),
        };
        writeln!(human, "{name:>16}: {lhs} = {}", format_rational(&row.rhs)).unwrap();
        rows.push(json!({
            "event": event,
            "coefficients": row.coefficients.iter().map(|c| u8::from(*c)).collect::<Vec<_>>(),
            "rhs": format_rational(&row.rhs),
        }));
    }
    let coevents: Vec<Value> = system.coevents.iter().map(io::coevent_to_json).collect();
    (human, json!({ "coevents": coevents, "rows": rows }))
}

fn feasibility(
    args: &TheoryArgs,
    coevents: Option<&Path>,
    all_duals: bool,
    mode: Mode,
    observables: &[String],
    action: FeasibilityAction,
) -> Outcome {
    let theory = load_theory(args)?;
    theory.check_enumerable()?;
    let n = theory.size();
    let set = coevent_set(&theory, coevents, all_duals)?;
    let mode = match mode {
        Mode::All => ConstraintMode::AllEvents,
        Mode::Binary => ConstraintMode::Binary,
        Mode::Observable => ConstraintMode::Observable(
            observables
                .iter()
                .map(|e| Event::parse_hex(n, e))
                .collect::<Result<_, _>>()?,
        ),
    };
    let system = dynamics::build_feasibility_with(&theory, &set, &mode)?;
    match action {
        FeasibilityAction::Build => {
            let (human, json) = describe_system(&theory, &system);
            Ok(Report::new(human, json))
        }
        FeasibilityAction::Solve => {
            let result = dynamics::solve_feasibility(&system);
            let mut human = String::new();
            match &result {
                Feasibility::Feasible(p) => {
                    if !system.satisfied_by(p) {
                        return Err(Failure::internal("solver witness fails re-substitution"));
                    }
                    writeln!(human, "feasible").unwrap();
                    for (k, (phi, value)) in system.coevents.iter().zip(p).enumerate() {
                        writeln!(
                            human,
                            "  p[{}] = {}",
                            label(&theory, phi, k),
                            format_rational(value)
                        )
                        .unwrap();
                    }
                }
                Feasibility::Infeasible(certificate) => {
                    if !system.certifies_infeasible(certificate) {
                        return Err(Failure::internal(
                            "infeasibility certificate does not verify",
                        ));
                    }
                    writeln!(human, "infeasible").unwrap();
                    match certificate {
                        dynamics::Certificate::InconsistentRow { row } => {
                            let name = match &system.rows[*row].kind {
                                RowKind::Event(e) => theory.space().describe(*e),
                                RowKind::Normalization => "normalization".into(),
                            };
                            writeln!(
                                human,
                                "  row {row} ({name}) reads 0 = {}",
                                format_rational(&system.rows[*row].rhs)
                            )
                            .unwrap();
                        }
                        dynamics::Certificate::Farkas { multipliers } => {
                            let y: Vec<String> = multipliers.iter().map(format_rational).collect();
                            writeln!(human, "  Farkas multipliers: [{}]", y.join(", ")).unwrap();
                        }
                    }
                }
            }
            Ok(Report::new(
                human,
                io::feasibility_to_json(&system, &result),
            ))
        }
        FeasibilityAction::Max { coevent } => {
            let phi = CoEvent::dual_of(Event::parse_hex(n, &coevent)?)?;
            let index = system
                .index_of(&phi)
                .ok_or_else(|| Failure::input(format!("{coevent} is not in the co-event set")))?;
            let max = dynamics::max_probability(&system, index)?;
            let quadratic = dynamics::is_quadratic(&phi)?;
            let human = format!(
                "max p[{}] = {}\nquadratic: {}\n",
                label(&theory, &phi, index),
                format_rational(&max),
                quadratic.is_quadratic
            );
            let witness = quadratic.witness.map(|(a, b, c)| hex_list(&[a, b, c]));
            let json = json!({
                "coevent": io::coevent_to_json(&phi),
                "max_probability": format_rational(&max),
                "quadratic": quadratic.is_quadratic,
                "witness": witness,
            });
            Ok(Report::new(human, json))
        }
    }
}

fn hypothesis(
    n: usize,
    p0: &str,
    eps: &str,
    p_true: Option<&str>,
    seed: u64,
    runs: usize,
    sequence: Option<&str>,
) -> Outcome {
    let p0 = rational(p0)?;
    let test = HypothesisTest::new(n, p0.clone(), rational(eps)?)?;
    let decision_text = |d: Decision| match d {
        Decision::Reject => "reject",
        Decision::FailToReject => "fail to reject",
    };
    if let Some(text) = sequence {
        let seq = TrialSequence::parse(text)?;
        let outcome = test.test(&seq)?;
        let human = format!(
            "heads = {}, P(L_H) = {} ~ {:e}: {}\n",
            outcome.heads,
            format_rational(&outcome.cumulative),
            approx_f64(&outcome.cumulative),
            decision_text(outcome.decision)
        );
        let json = json!({
            "heads": outcome.heads,
            "cumulative": format_rational(&outcome.cumulative),
            "reject": outcome.decision == Decision::Reject,
        });
        return Ok(Report::new(human, json));
    }
    let p = match p_true {
        Some(text) => rational(text)?,
        None => p0,
    };
    let mut human = String::new();
    let mut csv = String::from("seed,sequence,heads,reject\n");
    let mut rows = Vec::new();
    let mut rejections = 0usize;
    for k in 0..runs as u64 {
        let s = seed.wrapping_add(k);
        let seq = bernoulli::simulate(n, &p, s)?;
        let outcome = test.test(&seq)?;
        let reject = outcome.decision == Decision::Reject;
        rejections += usize::from(reject);
        if runs <= 20 {
            writeln!(
                human,
                "seed {s}: {seq} heads = {} -> {}",
                outcome.heads,
                decision_text(outcome.decision)
            )
            .unwrap();
        }
        writeln!(csv, "{s},{seq},{},{reject}", outcome.heads).unwrap();
        rows.push(json!({ "seed": s, "sequence": seq.to_string(), "heads": outcome.heads, "reject": reject }));
    }
    let mass = test.rejection_mass();
    writeln!(
        human,
        "rejected {rejections} of {runs}; exact rejection mass {} ~ {:e}",
        format_rational(&mass),
        approx_f64(&mass)
    )
    .unwrap();
    let json = json!({
        "runs": rows,
        "rejections": rejections,
        "rejection_mass": format_rational(&mass),
    });
    Ok(Report::new(human, json).with_csv(csv))
}

fn paper_check(options: RecipeOptions, only: Option<u8>) -> Outcome {
    let checks = match only {
        Some(id) if (1..=10).contains(&id) => vec![recipes::run(id, &options)],
        Some(id) => return Err(Failure::input(format!("no check numbered {id}"))),
        None => recipes::run_all(&options),
    };
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut human = String::new();
    let mut csv = String::from("id,name,passed\n");
    for check in &checks {
        writeln!(human, "{check}").unwrap();
        writeln!(csv, "{},\"{}\",{}", check.id, check.name, check.passed).unwrap();
    }
    writeln!(human, "{passed}/{} checks passed", checks.len()).unwrap();
    let json = json!({ "checks": checks, "passed": passed, "total": checks.len() });
    let code = if passed == checks.len() { 0 } else { 3 };
    Ok(Report::new(human, json).with_csv(csv).exit(code))
}
