//! Brute-force checker over raw schema JSON, written without the core
//! library. Returns `(pointer, code)` for every violation.

use serde_json::Value;

pub fn check(schema: &Value, events: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let Some(events) = events.as_array() else {
        panic!("reference checker expects an array");
    };
    for (i, event) in events.iter().enumerate() {
        let ptr = format!("/{i}");
        if event.is_object() {
            object(schema, event, &ptr, &mut out);
        } else {
            out.push((ptr, "SCHEMA_TYPE_MISMATCH".into()));
        }
    }
    out
}

fn esc(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

fn object(schema: &Value, value: &Value, ptr: &str, out: &mut Vec<(String, String)>) {
    let required: Vec<&str> = schema["required"]
        .as_array()
        .map(|r| r.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    let Some(props) = schema["properties"].as_object() else {
        return;
    };
    for (name, sub) in props {
        let p = format!("{ptr}/{}", esc(name));
        match value.get(name) {
            None if required.contains(&name.as_str()) => {
                out.push((p, "REQUIRED_MISSING_FIELD".into()))
            }
            None => {}
            Some(v) => property(sub, v, &p, out),
        }
    }
}

fn property(schema: &Value, value: &Value, ptr: &str, out: &mut Vec<(String, String)>) {
    match schema["type"].as_str().unwrap_or("object") {
        "object" => {
            if value.is_object() {
                object(schema, value, ptr, out);
            } else {
                out.push((ptr.to_owned(), "SCHEMA_TYPE_MISMATCH".into()));
            }
        }
        "array" => match value.as_array() {
            Some(items) => {
                for (j, item) in items.iter().enumerate() {
                    scalar(&schema["items"], item, &format!("{ptr}/{j}"), out);
                }
            }
            None => out.push((ptr.to_owned(), "SCHEMA_TYPE_MISMATCH".into())),
        },
        _ => scalar(schema, value, ptr, out),
    }
}

fn scalar(schema: &Value, value: &Value, ptr: &str, out: &mut Vec<(String, String)>) {
    let ok = match schema["type"].as_str().unwrap() {
        "string" => value.is_string(),
        "number" => value.is_number(),
        "boolean" => value.is_boolean(),
        "integer" => value.as_f64().is_some_and(|f| f == f.trunc()),
        t => panic!("unexpected type {t}"),
    };
    if !ok {
        out.push((ptr.to_owned(), "SCHEMA_TYPE_MISMATCH".into()));
        return;
    }
    let Some(s) = value.as_str() else { return };
    if let Some(format) = schema["format"].as_str() {
        let good = match format {
            "date" => date(s),
            "date-time" => date_time(s),
            "email" => email(s),
            _ => true,
        };
        if !good {
            out.push((ptr.to_owned(), "SCHEMA_FORMAT_INVALID".into()));
        }
    }
    if let Some(allowed) = schema["enum"].as_array() {
        if !allowed.iter().any(|a| a.as_str() == Some(s)) {
            out.push((ptr.to_owned(), "SCHEMA_ENUM_VIOLATION".into()));
        }
    }
}

fn digits(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn date(s: &str) -> bool {
    let parts: Vec<&str> = s.split('-').collect();
    let [y, m, d] = parts[..] else { return false };
    if y.len() != 4 || m.len() != 2 || d.len() != 2 {
        return false;
    }
    let (Some(y), Some(m), Some(d)) = (digits(y), digits(m), digits(d)) else {
        return false;
    };
    let leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    let days = match m {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if leap => 29,
        2 => 28,
        _ => return false,
    };
    (1..=days).contains(&d)
}

fn hm(s: &str, max_h: u32) -> bool {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [h, m] if h.len() == 2 && m.len() == 2 => {
            digits(h).is_some_and(|h| h <= max_h) && digits(m).is_some_and(|m| m <= 59)
        }
        _ => false,
    }
}

fn date_time(s: &str) -> bool {
    let Some((d, t)) = s.split_once(['T', 't']) else {
        return false;
    };
    if !date(d) || t.len() < 9 || !t.is_char_boundary(8) {
        return false;
    }
    let (clock, mut zone) = t.split_at(8);
    let c: Vec<&str> = clock.split(':').collect();
    let [h, m, sec] = c[..] else { return false };
    if !(hm(&format!("{h}:{m}"), 23) && sec.len() == 2 && digits(sec).is_some_and(|s| s <= 59)) {
        return false;
    }
    if let Some(frac) = zone.strip_prefix('.') {
        let n = frac.bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return false;
        }
        zone = &frac[n..];
    }
    match zone {
        "Z" | "z" => true,
        z if z.starts_with(['+', '-']) => hm(&z[1..], 23),
        _ => false,
    }
}

fn email(s: &str) -> bool {
    let parts: Vec<&str> = s.split('@').collect();
    let [local, domain] = parts[..] else {
        return false;
    };
    !local.is_empty()
        && !s.chars().any(char::is_whitespace)
        && domain.split('.').count() >= 2
        && domain.split('.').all(|l| !l.is_empty())
}
