//! The CSV result table.
//!
//! Every floating-point value is rounded to nine significant digits when a
//! row is built and printed in positional decimal notation, so a written
//! table parses back to an identical in-memory table.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::TierRates;

use super::EngineKind;

/// Rounds to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Nine significant digits in positional notation.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split_once('e').expect("exponent").1.parse().expect("integer exponent");
    let v: f64 = sci.parse().expect("formatted float parses");
    let decimals = (8 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TierRow {
    pub rates: TierRates<f64>,
    /// Standard errors; simulation rows only.
    pub std_errors: Option<TierRates<f64>>,
    /// Unweighted secrecy rate of the tier.
    pub secrecy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRates {
    pub secrecy_total: f64,
    pub secrecy_total_se: Option<f64>,
    pub tiers: Vec<TierRow>,
    /// Redrawn empty snapshots; simulation rows only.
    pub degenerate: Option<u64>,
}

impl PointRates {
    /// Rounds every value as it will appear in the CSV.
    pub fn rounded(mut self) -> Self {
        self.secrecy_total = round_sig(self.secrecy_total);
        self.secrecy_total_se = self.secrecy_total_se.map(round_sig);
        for t in &mut self.tiers {
            t.rates = t.rates.map(|x| round_sig(*x));
            t.std_errors = t.std_errors.map(|s| s.map(|x| round_sig(*x)));
            t.secrecy = round_sig(t.secrecy);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub parameter: String,
    /// Grid value; absent for scenarios evaluated once.
    pub value: Option<f64>,
    pub engine: EngineKind,
    /// `random` or the first-user radius.
    pub placement: String,
    pub outcome: std::result::Result<PointRates, String>,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Name of the column that the determinism contract ignores.
pub const TIMING_COLUMN: &str = "wall_time_s";

const LEADING: [&str; 7] =
    ["scenario", "parameter", "value", "engine", "placement", "secrecy_total", "secrecy_total_se"];

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn parse_opt(s: &str, column: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Spec(format!("column {column}: `{s}` is not a number")))
}

fn from_array(a: [f64; 7]) -> TierRates<f64> {
    TierRates {
        association: a[0],
        r_m_case1: a[1],
        r_n_case1: a[2],
        r_n_case2: a[3],
        r_m_case2: a[4],
        leak_m: a[5],
        leak_n: a[6],
    }
}

impl ResultTable {
    /// Largest tier count over successful rows.
    pub fn tier_columns(&self) -> usize {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok()).map(|p| p.tiers.len()).max().unwrap_or(0)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
        for k in 1..=self.tier_columns() {
            for f in TierRates::<f64>::FIELDS {
                h.push(format!("tier{k}_{f}"));
                h.push(format!("tier{k}_{f}_se"));
            }
            h.push(format!("tier{k}_secrecy"));
        }
        for c in ["degenerate", "error", TIMING_COLUMN] {
            h.push(c.into());
        }
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let k_max = self.tier_columns();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = vec![
                row.scenario.clone(),
                row.parameter.clone(),
                opt(row.value),
                row.engine.to_string(),
                row.placement.clone(),
            ];
            match &row.outcome {
                Ok(p) => {
                    rec.push(format_sig(p.secrecy_total));
                    rec.push(opt(p.secrecy_total_se));
                    for k in 0..k_max {
                        match p.tiers.get(k) {
                            Some(t) => {
                                let se = t.std_errors.as_ref().map(|s| s.as_array().map(|x| *x));
                                for (i, x) in t.rates.as_array().iter().enumerate() {
                                    rec.push(format_sig(**x));
                                    rec.push(opt(se.map(|s| s[i])));
                                }
                                rec.push(format_sig(t.secrecy));
                            }
                            None => rec.extend(std::iter::repeat_n(String::new(), 15)),
                        }
                    }
                    rec.push(p.degenerate.map(|d| d.to_string()).unwrap_or_default());
                    rec.push(String::new());
                }
                Err(msg) => {
                    rec.extend(std::iter::repeat_n(String::new(), 2 + 15 * k_max + 1));
                    rec.push(msg.clone());
                }
            }
            rec.push(opt(row.wall_time_s));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let col = |name: &str| {
            header.iter().position(|h| h == name).ok_or_else(|| Error::Spec(format!("missing column {name}")))
        };
        let mut k_max = 0;
        while header.iter().any(|h| *h == format!("tier{}_assoc", k_max + 1)) {
            k_max += 1;
        }
        let lead: Vec<usize> = LEADING.iter().map(|c| col(c)).collect::<Result<_>>()?;
        let (c_deg, c_err, c_time) = (col("degenerate")?, col("error")?, col(TIMING_COLUMN)?);
        let mut tier_cols = Vec::new();
        for k in 1..=k_max {
            let mut vals = Vec::new();
            for f in TierRates::<f64>::FIELDS {
                vals.push((col(&format!("tier{k}_{f}"))?, col(&format!("tier{k}_{f}_se"))?));
            }
            tier_cols.push((vals, col(&format!("tier{k}_secrecy"))?));
        }

        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let get = |i: usize| rec.get(i).unwrap_or("");
            let num = |i: usize| parse_opt(get(i), &header[i]);
            let outcome = if get(c_err).is_empty() {
                let mut tiers = Vec::new();
                for (vals, c_sec) in &tier_cols {
                    if get(vals[0].0).is_empty() {
                        break;
                    }
                    let mut rates = [0.0; 7];
                    let mut ses = [0.0; 7];
                    let mut has_se = false;
                    for (i, &(cv, cs)) in vals.iter().enumerate() {
                        rates[i] = num(cv)?.unwrap_or(f64::NAN);
                        if let Some(s) = num(cs)? {
                            ses[i] = s;
                            has_se = true;
                        }
                    }
                    tiers.push(TierRow {
                        rates: from_array(rates),
                        std_errors: has_se.then(|| from_array(ses)),
                        secrecy: num(*c_sec)?.unwrap_or(f64::NAN),
                    });
                }
                let degenerate = match get(c_deg) {
                    "" => None,
                    s => Some(s.parse().map_err(|_| Error::Spec(format!("bad degenerate count `{s}`")))?),
                };
                Ok(PointRates {
                    secrecy_total: num(lead[5])?.unwrap_or(f64::NAN),
                    secrecy_total_se: num(lead[6])?,
                    tiers,
                    degenerate,
                })
            } else {
                Err(get(c_err).to_string())
            };
            rows.push(ResultRow {
                scenario: get(lead[0]).to_string(),
                parameter: get(lead[1]).to_string(),
                value: num(lead[2])?,
                engine: get(lead[3]).parse()?,
                placement: get(lead[4]).to_string(),
                outcome,
                wall_time_s: num(c_time)?,
            });
        }
        Ok(Self { rows })
    }

    /// Rows of one scenario and engine, in grid order.
    pub fn select<'a>(&'a self, scenario: &'a str, engine: EngineKind) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.scenario == scenario && r.engine == engine)
    }
}

/// The CSV text with the timing column removed, for determinism checks.
pub fn without_timing(csv_text: &str) -> Result<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers()?.clone();
    let skip = header.iter().position(|h| h == TIMING_COLUMN);
    let mut w = csv::Writer::from_writer(Vec::new());
    let keep = |rec: &csv::StringRecord| -> Vec<String> {
        rec.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|(_, s)| s.to_string()).collect()
    };
    w.write_record(keep(&header))?;
    for rec in r.records() {
        w.write_record(keep(&rec?))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}
