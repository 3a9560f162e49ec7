//! Report rendering. JSON carries every integer as a decimal string so
//! values above 2^53 survive any consumer; text and CSV are derived views.
//! Timing lives only in the JSON envelope, keeping other fields stable
//! across warm and cold cache runs.

use std::time::Duration;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use excycle::certificates::{Certificate, Witness};
use excycle::{
    Classification, ConjectureReport, DigitWord, ExtremeCycle, Factorization, Instance,
    OrderProfile, PrimitiveRecord,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: String,
    pub exit: u8,
}

impl Report {
    pub fn print(&self, format: Format, elapsed: Duration) {
        match format {
            Format::Json => {
                let mut json = self.json.clone();
                if let Value::Object(map) = &mut json {
                    map.insert("timing_ms".into(), s(elapsed.as_millis()));
                }
                println!("{}", serde_json::to_string_pretty(&json).unwrap());
            }
            Format::Csv => print!("{}", self.csv),
            Format::Text => print!("{}", self.text),
        }
    }
}

fn s(x: u128) -> Value {
    Value::String(x.to_string())
}

fn factorization_json(f: &Factorization) -> Value {
    Value::Array(
        f.factors()
            .iter()
            .map(|&(p, e)| json!([p.to_string(), e.to_string()]))
            .collect(),
    )
}

fn cycle_json(c: &ExtremeCycle, order: Option<u128>) -> Value {
    let mut map = Map::new();
    map.insert(
        "points".into(),
        Value::Array(c.points().iter().map(|&x| s(x)).collect()),
    );
    map.insert("digits".into(), Value::String(c.digits().to_string()));
    map.insert("length".into(), s(c.len() as u128));
    map.insert("gcd".into(), s(c.gcd_points()));
    if let Some(o) = order {
        map.insert("length_equals_order".into(), Value::Bool(c.len() as u128 == o));
    }
    Value::Object(map)
}

fn points_field(c: &ExtremeCycle) -> String {
    c.points()
        .iter()
        .map(u128::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn cycle_lines(text: &mut String, cycles: &[ExtremeCycle]) {
    for (i, c) in cycles.iter().enumerate() {
        text.push_str(&format!(
            "  cycle {}: length {}, gcd {}, digits {}\n    points: {}\n",
            i + 1,
            c.len(),
            c.gcd_points(),
            c.digits(),
            points_field(c)
        ));
    }
}

pub fn cycles_report(
    inst: &Instance,
    cycles: &[ExtremeCycle],
    order: Option<u128>,
    exit: u8,
) -> Report {
    let json = json!({
        "command": "cycles",
        "g": s(inst.g()),
        "m": s(inst.m()),
        "verdict": if cycles.is_empty() { "complete" } else { "incomplete" },
        "order": order.map(s).unwrap_or(Value::Null),
        "cycles": cycles.iter().map(|c| cycle_json(c, order)).collect::<Vec<_>>(),
    });
    let mut text = format!(
        "g={} m={}: {}",
        inst.g(),
        inst.m(),
        if cycles.is_empty() {
            "complete (no non-trivial cycles)".to_string()
        } else {
            format!("incomplete ({} cycle(s))", cycles.len())
        }
    );
    if let Some(o) = order {
        text.push_str(&format!(", o_{}({}) = {}", inst.g(), inst.m(), o));
    }
    text.push('\n');
    cycle_lines(&mut text, cycles);
    let mut csv = String::from("g,m,index,length,gcd,digits,points\n");
    for (i, c) in cycles.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{},{},\"{}\"\n",
            inst.g(),
            inst.m(),
            i + 1,
            c.len(),
            c.gcd_points(),
            c.digits(),
            points_field(c)
        ));
    }
    Report { json, text, csv, exit }
}

pub fn classify_report(inst: &Instance, cls: &Classification, exit: u8) -> Report {
    let json = json!({
        "command": "classify",
        "g": s(inst.g()),
        "m": s(inst.m()),
        "verdict": cls.verdict.to_string(),
        "primitive": cls.primitive,
        "witness_divisor": cls.witness_divisor.map(s).unwrap_or(Value::Null),
        "cycles": cls.cycles.iter().map(|c| cycle_json(c, None)).collect::<Vec<_>>(),
    });
    let mut text = format!("g={} m={}: {}", inst.g(), inst.m(), cls.verdict);
    if cls.verdict == excycle::Verdict::Incomplete {
        if cls.primitive {
            text.push_str(", primitive");
        } else if let Some(d) = cls.witness_divisor {
            text.push_str(&format!(", not primitive (incomplete divisor {d})"));
        } else {
            text.push_str(", not primitive");
        }
    }
    text.push('\n');
    cycle_lines(&mut text, &cls.cycles);
    let csv = format!(
        "g,m,verdict,primitive,witness_divisor,cycle_count\n{},{},{},{},{},{}\n",
        inst.g(),
        inst.m(),
        cls.verdict,
        cls.primitive,
        cls.witness_divisor.map_or(String::new(), |d| d.to_string()),
        cls.cycles.len()
    );
    Report { json, text, csv, exit }
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::EmptyWindow => json!({"type": "empty-window"}),
        Witness::UnitCycle { point } => json!({"type": "unit-cycle", "point": s(*point)}),
        Witness::IncompleteDivisor { divisor, scaled_cycle } => json!({
            "type": "incomplete-divisor",
            "divisor": s(*divisor),
            "scaled_cycle": cycle_json(scaled_cycle, None),
        }),
        Witness::SharedFactor { gcd } => json!({"type": "shared-factor", "gcd": s(*gcd)}),
        Witness::GroupElement { residue, exponent } => json!({
            "type": "group-element",
            "residue": s(*residue),
            "exponent": s(*exponent),
        }),
        Witness::EvenOrder { order } => json!({"type": "even-order", "order": s(*order)}),
        Witness::SquareScale { root } => json!({"type": "square-scale", "root": s(*root)}),
        Witness::OrderThreshold { order, bound } => json!({
            "type": "order-threshold",
            "order": s(*order),
            "bound": s(*bound),
        }),
        Witness::Split { a, b, order_ab, order_b } => json!({
            "type": "split",
            "a": s(*a),
            "b": s(*b),
            "order_ab": s(*order_ab),
            "order_b": s(*order_b),
        }),
        Witness::BaseCase { value } => json!({"type": "base-case", "value": s(*value)}),
        Witness::Checklist { items } => json!({"type": "checklist", "items": items}),
        Witness::None => Value::Null,
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::EmptyWindow => "window below 1".into(),
        Witness::UnitCycle { point } => format!("cycle {{{point}}}"),
        Witness::IncompleteDivisor { divisor, .. } => format!("incomplete divisor {divisor}"),
        Witness::SharedFactor { gcd } => format!("gcd(m, g) = {gcd}"),
        Witness::GroupElement { residue, exponent } => {
            format!("g^{exponent} = {residue} (mod m)")
        }
        Witness::EvenOrder { order } => format!("even order {order}"),
        Witness::SquareScale { root } => format!("g = {root}^2"),
        Witness::OrderThreshold { order, bound } => format!("order {order} > bound {bound}"),
        Witness::Split { a, b, order_ab, order_b } => {
            format!("split {a} * {b}, o(ab) = {order_ab}, o(b) = {order_b}")
        }
        Witness::BaseCase { value } => format!("base case {value}"),
        Witness::Checklist { items } => items.join("; "),
        Witness::None => String::new(),
    }
}

pub fn certify_report(g: u128, m: u128, certs: &[Certificate], exit: u8) -> Report {
    let json = json!({
        "command": "certify",
        "g": s(g),
        "m": s(m),
        "certificates": certs.iter().map(|c| json!({
            "rule": c.rule.to_string(),
            "verdict": c.verdict.to_string(),
            "subject": s(c.subject),
            "witness": witness_json(&c.witness),
        })).collect::<Vec<_>>(),
    });
    let mut text = format!("g={g} m={m}: {} certificate(s)\n", certs.len());
    let mut csv = String::from("g,m,rule,verdict,subject,witness\n");
    for c in certs {
        text.push_str(&format!(
            "  {} -> {} [{}]\n",
            c.rule,
            c.verdict,
            witness_text(&c.witness)
        ));
        csv.push_str(&format!(
            "{},{},{},{},{},\"{}\"\n",
            g,
            m,
            c.rule,
            c.verdict,
            c.subject,
            witness_text(&c.witness)
        ));
    }
    Report { json, text, csv, exit }
}

pub fn order_report(profile: &OrderProfile, modulus_factorization: &Factorization) -> Report {
    let json = json!({
        "command": "order",
        "g": s(profile.base),
        "m": s(profile.modulus),
        "order": s(profile.order),
        "order_factorization": factorization_json(&profile.order_factorization),
        "modulus_factorization": factorization_json(modulus_factorization),
        "iota": profile.iota.map(s).unwrap_or(Value::Null),
    });
    let mut text = format!(
        "o_{}({}) = {} = {}\n",
        profile.base, profile.modulus, profile.order, profile.order_factorization
    );
    text.push_str(&format!("m = {modulus_factorization}\n"));
    if let Some(i) = profile.iota {
        text.push_str(&format!("iota = {i}\n"));
    }
    let csv = format!(
        "g,m,order,order_factorization,iota\n{},{},{},\"{}\",{}\n",
        profile.base,
        profile.modulus,
        profile.order,
        profile.order_factorization,
        profile.iota.map_or(String::new(), |i| i.to_string())
    );
    Report {
        json,
        text,
        csv,
        exit: 0,
    }
}

fn record_json(r: &PrimitiveRecord) -> Value {
    json!({
        "m": s(r.m),
        "order": s(r.order),
        "construction": r.construction.to_string(),
        "factorization": factorization_json(&r.factorization),
        "cycles": r.cycles.iter().map(|c| cycle_json(c, Some(r.order))).collect::<Vec<_>>(),
    })
}

fn records_body(records: &[PrimitiveRecord]) -> (String, String) {
    let mut text = String::new();
    let mut csv = String::from("m,order,construction,factorization,cycle_count\n");
    for r in records {
        text.push_str(&format!(
            "  m = {} = {}, order {}, {} cycle(s), via {}\n",
            r.m,
            r.factorization,
            r.order,
            r.cycles.len(),
            r.construction
        ));
        csv.push_str(&format!(
            "{},{},{},\"{}\",{}\n",
            r.m,
            r.order,
            r.construction,
            r.factorization,
            r.cycles.len()
        ));
    }
    (text, csv)
}

pub fn records_report(
    command: &str,
    g: u128,
    bound: Option<(&str, u128)>,
    records: &[PrimitiveRecord],
    exit: u8,
) -> Report {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    map.insert("g".into(), s(g));
    if let Some((key, value)) = bound {
        map.insert(key.into(), s(value));
    }
    map.insert("count".into(), s(records.len() as u128));
    map.insert(
        "records".into(),
        Value::Array(records.iter().map(record_json).collect()),
    );
    let (body, csv) = records_body(records);
    let text = format!("g={g}: {} primitive number(s)\n{body}", records.len());
    Report {
        json: Value::Object(map),
        text,
        csv,
        exit,
    }
}

pub fn sweep_report(
    g: u128,
    n: u32,
    known: &[u128],
    records: &[PrimitiveRecord],
    exit: u8,
) -> Report {
    let json = json!({
        "command": "sweep",
        "g": s(g),
        "n": s(n as u128),
        "known": known.iter().map(|&k| s(k)).collect::<Vec<_>>(),
        "count": s(records.len() as u128),
        "records": records.iter().map(record_json).collect::<Vec<_>>(),
    });
    let (body, csv) = records_body(records);
    let text = format!(
        "g={g} n={n}: {} new primitive number(s)\n{body}",
        records.len()
    );
    Report { json, text, csv, exit }
}

pub fn construct_report(inst: &Instance, word: &DigitWord, cycle: &ExtremeCycle) -> Report {
    let json = json!({
        "command": "construct",
        "g": s(inst.g()),
        "digits": word.to_string(),
        "m": s(inst.m()),
        "verdict": "incomplete",
        "cycle": cycle_json(cycle, None),
    });
    let mut text = format!(
        "g={} digits={}: m = {} (incomplete)\n",
        inst.g(),
        word,
        inst.m()
    );
    cycle_lines(&mut text, std::slice::from_ref(cycle));
    let csv = format!(
        "g,digits,m,length,gcd,points\n{},{},{},{},{},\"{}\"\n",
        inst.g(),
        word,
        inst.m(),
        cycle.len(),
        cycle.gcd_points(),
        points_field(cycle)
    );
    Report {
        json,
        text,
        csv,
        exit: 0,
    }
}

pub fn conjecture_report(g: u128, report: &ConjectureReport, exit: u8) -> Report {
    let (status, value) = match report {
        ConjectureReport::Verified { upper } => ("verified", *upper),
        ConjectureReport::Counterexample { m } => ("counterexample", *m),
        ConjectureReport::BudgetExhausted { checked_to } => ("budget-exhausted", *checked_to),
    };
    let json = json!({
        "command": "conjecture",
        "g": s(g),
        "status": status,
        "value": s(value),
    });
    let text = match report {
        ConjectureReport::Verified { upper } => format!(
            "g={g}: no primitive number in ({}, {upper}); the repunit is the first\n",
            g - 1
        ),
        ConjectureReport::Counterexample { m } => {
            format!("g={g}: counterexample, {m} is primitive below the repunit\n")
        }
        ConjectureReport::BudgetExhausted { checked_to } => {
            format!("g={g}: budget exhausted, no primitive found up to {checked_to}\n")
        }
    };
    let csv = format!("g,status,value\n{g},{status},{value}\n");
    Report { json, text, csv, exit }
}

pub fn quotient_report(g: u128, q: u128, m: u128, order: u128) -> Report {
    let json = json!({
        "command": "quotient",
        "g": s(g),
        "q": s(q),
        "m": s(m),
        "order": s(order),
        "verdict": "incomplete",
    });
    let text = format!("g={g} q={q}: m = (g^q - 1)/(g - 1) = {m}, order {order}, incomplete\n");
    let csv = format!("g,q,m,order\n{g},{q},{m},{order}\n");
    Report {
        json,
        text,
        csv,
        exit: 0,
    }
}
