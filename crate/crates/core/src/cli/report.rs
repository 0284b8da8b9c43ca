//! Result records and their CSV/JSON serialization. Floats are printed
//! with 17 significant digits so identical runs are byte-identical and
//! round-trip exactly.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    List(Vec<f64>),
}

/// One computed quantity: ordered (name, value) pairs; the order defines
/// the CSV columns and the JSON key order.
#[derive(Clone, Debug, Default)]
pub struct Record {
    pub fields: Vec<(String, Field)>,
}

impl Record {
    pub fn push(&mut self, name: &str, field: Field) {
        self.fields.push((name.to_string(), field));
    }

    pub fn num(&mut self, name: &str, v: f64) {
        self.push(name, Field::Num(v));
    }

    pub fn get(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_field(f: &Field) -> String {
    match f {
        Field::Num(v) => fmt_f64(*v),
        Field::Int(v) => v.to_string(),
        Field::Str(s) => format!("\"{}\"", json_escape(s)),
        Field::Bool(b) => b.to_string(),
        Field::List(vs) => {
            let items: Vec<String> = vs.iter().map(|&v| fmt_f64(v)).collect();
            format!("[{}]", items.join(", "))
        }
    }
}

pub fn to_json(records: &[Record]) -> String {
    let mut out = String::from("[\n");
    for (i, rec) in records.iter().enumerate() {
        out.push_str("  {\n");
        for (j, (k, v)) in rec.fields.iter().enumerate() {
            out.push_str(&format!("    \"{}\": {}", json_escape(k), json_field(v)));
            out.push_str(if j + 1 < rec.fields.len() { ",\n" } else { "\n" });
        }
        out.push_str(if i + 1 < records.len() { "  },\n" } else { "  }\n" });
    }
    out.push_str("]\n");
    out
}

fn csv_field(f: &Field) -> String {
    let raw = match f {
        Field::Num(v) => fmt_f64(*v),
        Field::Int(v) => v.to_string(),
        Field::Str(s) => s.clone(),
        Field::Bool(b) => b.to_string(),
        // lists are packed into one column, semicolon-separated
        Field::List(vs) => vs.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(";"),
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

pub fn to_csv(records: &[Record]) -> Result<String> {
    let first = records
        .first()
        .ok_or_else(|| Error::domain("no records to serialize"))?;
    let header: Vec<&str> = first.fields.iter().map(|(k, _)| k.as_str()).collect();
    let mut out = header.join(",");
    out.push('\n');
    for rec in records {
        let keys: Vec<&str> = rec.fields.iter().map(|(k, _)| k.as_str()).collect();
        if keys != header {
            return Err(Error::domain("records disagree on CSV columns"));
        }
        let row: Vec<String> = rec.fields.iter().map(|(_, v)| csv_field(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn config_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        let mut r = Record::default();
        r.push("name", Field::Str("probe".into()));
        r.num("value", 1.0 / 3.0);
        r.push("count", Field::Int(7));
        r.push("ok", Field::Bool(true));
        r.push("grid", Field::List(vec![0.1, 0.2]));
        vec![r]
    }

    #[test]
    fn json_round_trips_seventeen_digits() {
        let json = to_json(&sample());
        assert!(json.contains("3.3333333333333331e-1"));
        let reparsed: f64 = "3.3333333333333331e-1".parse().unwrap();
        assert_eq!(reparsed, 1.0 / 3.0);
    }

    #[test]
    fn csv_has_stable_header_and_rows() {
        let csv = to_csv(&sample()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "name,value,count,ok,grid");
        let row = lines.next().unwrap();
        assert!(row.starts_with("probe,3.3333333333333331e-1,7,true,"));
        assert!(row.ends_with("1.0000000000000001e-1;2.0000000000000001e-1"));
    }

    #[test]
    fn hash_is_stable_hex() {
        let h = config_hash("abc");
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash("abc"));
        assert_ne!(h, config_hash("abd"));
    }
}
