//! Seeded random schemas inside the supported keyword subset, and event
//! arrays that are mostly valid with scattered violations.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

const SCALARS: &[&str] = &["string", "number", "integer", "boolean"];
const FORMATS: &[&str] = &["date", "date-time", "email"];

/// Random schema with nesting depth at most `max_depth` and at most
/// `max_leaves` leaves (at least one).
pub fn schema(rng: &mut ChaCha8Rng, max_depth: usize, max_leaves: usize) -> Value {
    let mut budget = rng.gen_range(1..=max_leaves);
    let mut counter = 0;
    let mut root = object(rng, 1, max_depth, &mut budget, &mut counter);
    root["description"] = json!(format!("event{}", rng.gen_range(0..1000)));
    root
}

fn object(
    rng: &mut ChaCha8Rng,
    depth: usize,
    max_depth: usize,
    budget: &mut usize,
    counter: &mut usize,
) -> Value {
    let mut props = Map::new();
    let mut required = Vec::new();
    let width = rng.gen_range(1..=6);
    for _ in 0..width {
        if *budget == 0 {
            break;
        }
        *counter += 1;
        let name = match rng.gen_range(0..6) {
            0 => format!("a/b{counter}"),
            1 => format!("t~{counter}"),
            _ => format!("p{counter}"),
        };
        let nested = depth < max_depth && *budget >= 2 && rng.gen_bool(0.3);
        let prop = if nested {
            object(rng, depth + 1, max_depth, budget, counter)
        } else {
            *budget -= 1;
            leaf(rng, *counter)
        };
        if rng.gen_bool(0.5) {
            required.push(json!(name.clone()));
        }
        props.insert(name, prop);
    }
    json!({"type": "object", "required": required, "properties": props})
}

fn leaf(rng: &mut ChaCha8Rng, n: usize) -> Value {
    let mut leaf = if rng.gen_bool(0.15) {
        json!({"type": "array", "items": scalar(rng)})
    } else {
        scalar(rng)
    };
    if rng.gen_bool(0.7) {
        leaf["displayName"] = json!(format!("Column {n}"));
    }
    if rng.gen_bool(0.3) {
        leaf["description"] = json!(format!("note {n}"));
    }
    leaf
}

fn scalar(rng: &mut ChaCha8Rng) -> Value {
    let ty = *SCALARS.choose(rng).unwrap();
    let mut s = json!({"type": ty});
    if ty == "string" {
        match rng.gen_range(0..4) {
            0 => s["format"] = json!(*FORMATS.choose(rng).unwrap()),
            1 => s["enum"] = json!(["red", "green", "blue"]),
            _ => {}
        }
    }
    s
}

/// Events for `schema`: `count` objects, each property mutated with
/// probability `p_bad`.
pub fn events(schema: &Value, rng: &mut ChaCha8Rng, count: usize, p_bad: f64) -> Value {
    let events = (0..count)
        .map(|_| {
            if rng.gen_bool(p_bad / 4.0) {
                [json!(1), json!("x"), json!([]), Value::Null]
                    .choose(rng)
                    .unwrap()
                    .clone()
            } else {
                object_value(schema, rng, p_bad)
            }
        })
        .collect();
    Value::Array(events)
}

fn object_value(schema: &Value, rng: &mut ChaCha8Rng, p_bad: f64) -> Value {
    let required: Vec<&str> = schema["required"]
        .as_array()
        .map(|r| r.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    let mut map = Map::new();
    for (name, sub) in schema["properties"].as_object().unwrap() {
        let present = required.contains(&name.as_str()) || rng.gen_bool(0.6);
        let bad = rng.gen_bool(p_bad);
        if bad && rng.gen_bool(0.3) {
            continue; // drop, possibly a required one
        }
        if !present {
            continue;
        }
        let v = if sub["type"] == "object" {
            if bad && rng.gen_bool(0.3) {
                json!("flat")
            } else {
                object_value(sub, rng, p_bad)
            }
        } else if sub["type"] == "array" {
            if bad && rng.gen_bool(0.3) {
                good_scalar(&sub["items"], rng)
            } else {
                let n = rng.gen_range(0..4);
                Value::Array(
                    (0..n)
                        .map(|_| maybe_bad(&sub["items"], rng, p_bad))
                        .collect(),
                )
            }
        } else {
            maybe_bad(sub, rng, if bad { 1.0 } else { 0.0 })
        };
        map.insert(name.clone(), v);
    }
    if rng.gen_bool(0.2) {
        map.insert("extra".into(), json!(true));
    }
    Value::Object(map)
}

fn maybe_bad(schema: &Value, rng: &mut ChaCha8Rng, p_bad: f64) -> Value {
    if rng.gen_bool(p_bad) {
        bad_scalar(schema, rng)
    } else {
        good_scalar(schema, rng)
    }
}

fn good_scalar(schema: &Value, rng: &mut ChaCha8Rng) -> Value {
    match schema["type"].as_str().unwrap() {
        "number" => [json!(1.5), json!(-3), json!(0), json!(1e3)]
            .choose(rng)
            .unwrap()
            .clone(),
        "integer" => [json!(7), json!(-2), json!(4.0), json!(0)]
            .choose(rng)
            .unwrap()
            .clone(),
        "boolean" => json!(rng.gen_bool(0.5)),
        _ => match (schema["format"].as_str(), schema["enum"].as_array()) {
            (Some("date"), _) => json!(["2024-02-29", "2023-12-31", "1999-01-01"]
                .choose(rng)
                .unwrap()),
            (Some("date-time"), _) => json!([
                "2024-03-01T08:30:00Z",
                "2024-03-01T08:30:00.25+10:00",
                "2023-06-30T23:59:59-05:30"
            ]
            .choose(rng)
            .unwrap()),
            (Some("email"), _) => json!(["a@b.co", "vet.ops@farm.com.au"].choose(rng).unwrap()),
            (_, Some(allowed)) => allowed.choose(rng).unwrap().clone(),
            _ => json!(["", "text", "with/slash"].choose(rng).unwrap()),
        },
    }
}

fn bad_scalar(schema: &Value, rng: &mut ChaCha8Rng) -> Value {
    let ty = schema["type"].as_str().unwrap();
    let wrong_type = [
        json!("12"),
        json!(true),
        json!(2.5),
        Value::Null,
        json!({"k": 1}),
        json!([1]),
    ]
    .into_iter()
    .filter(|v| match ty {
        "string" => !v.is_string(),
        "number" => !v.is_number(),
        "integer" => !(v.is_i64() || v.as_f64().is_some_and(|f| f == f.trunc())),
        "boolean" => !v.is_boolean(),
        _ => true,
    })
    .collect::<Vec<_>>();
    let format_or_enum = match (schema["format"].as_str(), schema["enum"].is_array()) {
        (Some("date"), _) => Some(json!(["2023-02-29", "2024-1-05", "yesterday"]
            .choose(rng)
            .unwrap())),
        (Some("date-time"), _) => Some(json!([
            "2024-03-01",
            "2024-03-01T25:00:00Z",
            "2024-03-01T08:30:00"
        ]
        .choose(rng)
        .unwrap())),
        (Some("email"), _) => Some(json!(["no-at-sign", "a@b", "a b@c.d"].choose(rng).unwrap())),
        (_, true) => Some(json!("purple")),
        _ => None,
    };
    match format_or_enum {
        Some(v) if rng.gen_bool(0.6) => v,
        _ => wrong_type.choose(rng).unwrap().clone(),
    }
}
