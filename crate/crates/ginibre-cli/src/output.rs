//! Machine-readable output rows: CSV with a stable header and a JSON mirror.

use std::collections::BTreeMap;
use std::io::Write;

/// One table row. Meta entries become trailing columns (sorted by key).
#[derive(Debug, Clone)]
pub struct OutputRow {
    pub quantity: String,
    pub ensemble: String,
    pub scale: String,
    pub x: f64,
    pub analytic: Option<f64>,
    pub mc_value: Option<f64>,
    pub mc_se: Option<f64>,
    pub meta: BTreeMap<String, String>,
}

impl OutputRow {
    pub fn new(quantity: &str, ensemble: &str, scale: &str, x: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            ensemble: ensemble.to_string(),
            scale: scale.to_string(),
            x,
            analytic: None,
            mc_value: None,
            mc_se: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn analytic(mut self, v: f64) -> Self {
        self.analytic = Some(v);
        self
    }

    pub fn mc(mut self, value: f64, se: f64) -> Self {
        self.mc_value = Some(value);
        self.mc_se = Some(se);
        self
    }

    pub fn meta_num(mut self, key: &str, v: f64) -> Self {
        self.meta.insert(key.to_string(), fmt_f64(v));
        self
    }

    pub fn meta_str(mut self, key: &str, v: &str) -> Self {
        self.meta.insert(key.to_string(), v.to_string());
        self
    }
}

/// 17 significant digits; round-trips through f64 parsing exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn meta_columns(rows: &[OutputRow]) -> Vec<String> {
    let mut keys: Vec<String> = rows
        .iter()
        .flat_map(|r| r.meta.keys().cloned())
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

pub fn write_csv<W: Write>(rows: &[OutputRow], out: &mut W) -> std::io::Result<()> {
    let meta = meta_columns(rows);
    write!(out, "quantity,ensemble,scale,x,analytic,mc_value,mc_se")?;
    for k in &meta {
        write!(out, ",{k}")?;
    }
    writeln!(out)?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        write!(
            out,
            "{},{},{},{},{},{},{}",
            r.quantity,
            r.ensemble,
            r.scale,
            fmt_f64(r.x),
            opt(r.analytic),
            opt(r.mc_value),
            opt(r.mc_se)
        )?;
        for k in &meta {
            write!(out, ",{}", r.meta.get(k).map(String::as_str).unwrap_or(""))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[OutputRow], out: &mut W) -> std::io::Result<()> {
    let meta = meta_columns(rows);
    let mut arr = Vec::with_capacity(rows.len());
    for r in rows {
        let mut obj = serde_json::Map::new();
        obj.insert("quantity".into(), r.quantity.clone().into());
        obj.insert("ensemble".into(), r.ensemble.clone().into());
        obj.insert("scale".into(), r.scale.clone().into());
        obj.insert("x".into(), r.x.into());
        let num = |v: Option<f64>| match v {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::Null,
        };
        obj.insert("analytic".into(), num(r.analytic));
        obj.insert("mc_value".into(), num(r.mc_value));
        obj.insert("mc_se".into(), num(r.mc_se));
        for k in &meta {
            let v = match r.meta.get(k) {
                Some(s) => match s.parse::<f64>() {
                    Ok(f) => serde_json::Value::from(f),
                    Err(_) => serde_json::Value::from(s.clone()),
                },
                None => serde_json::Value::Null,
            };
            obj.insert(k.clone(), v);
        }
        arr.push(serde_json::Value::Object(obj));
    }
    writeln!(out, "{}", serde_json::Value::Array(arr))
}
