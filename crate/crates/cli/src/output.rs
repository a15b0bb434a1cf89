//! CSV schemas for episode logs and summaries.

use std::io::{Read, Write};

use crate::error::CliError;

pub const RESULTS_HEADER: [&str; 5] = ["learner", "seed", "t", "instant_regret", "cumulative_regret"];
pub const SUMMARY_HEADER: [&str; 5] = ["learner", "T", "mean_cum_regret", "std_cum_regret", "theorem_bound"];

/// `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub learner: String,
    pub seed: u64,
    pub t: u64,
    pub instant_regret: f64,
    pub cumulative_regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub learner: String,
    pub horizon: u64,
    pub mean: f64,
    pub std: f64,
    pub bound: Option<f64>,
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// Writes one episode's rows; `cumulative` is recomputed as a running sum.
pub struct ResultsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> ResultsWriter<W> {
    pub fn new(w: W) -> std::io::Result<Self> {
        let mut inner = writer(w);
        inner.write_record(RESULTS_HEADER).map_err(csv_io)?;
        Ok(ResultsWriter { inner })
    }

    pub fn episode(&mut self, learner: &str, seed: u64, instant: &[f64]) -> std::io::Result<()> {
        let seed = seed.to_string();
        let mut cum = 0.0;
        for (i, &r) in instant.iter().enumerate() {
            cum += r;
            let t = (i + 1).to_string();
            self.inner.write_record([learner, &seed, &t, &fmt_num(r), &fmt_num(cum)]).map_err(csv_io)?;
        }
        Ok(())
    }

    pub fn finish(self) -> std::io::Result<W> {
        self.inner.into_inner().map_err(|e| e.into_error())
    }
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> std::io::Result<()> {
    let mut out = writer(w);
    out.write_record(SUMMARY_HEADER).map_err(csv_io)?;
    for row in rows {
        let bound = row.bound.map(fmt_num).unwrap_or_default();
        out.write_record([&row.learner, &row.horizon.to_string(), &fmt_num(row.mean), &fmt_num(row.std), &bound])
            .map_err(csv_io)?;
    }
    out.flush()
}

/// Reads a results CSV, rejecting anything that deviates from the schema.
pub fn read_results<R: Read>(r: R, path: &str) -> Result<Vec<ResultRow>, CliError> {
    let schema = |message: String| CliError::Schema { path: path.to_string(), message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = reader.headers().map_err(|e| schema(e.to_string()))?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(schema(format!("expected header `{}`, found `{}`", RESULTS_HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| schema(format!("line {line}: {e}")))?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| schema(format!("line {line}: `{}` is not an integer", field(k))));
        let real = |k: usize| field(k).parse::<f64>().map_err(|_| schema(format!("line {line}: `{}` is not a number", field(k))));
        rows.push(ResultRow {
            learner: field(0).to_string(),
            seed: int(1)?,
            t: int(2)?,
            instant_regret: real(3)?,
            cumulative_regret: real(4)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.6), "0.59999999999999998");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(-0.0), "0");
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-9, 6.02e23, 1e-300] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn results_round_trip() {
        let mut w = ResultsWriter::new(Vec::new()).unwrap();
        w.episode("alg5", 7, &[0.5, 0.25]).unwrap();
        let bytes = w.finish().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text, "learner,seed,t,instant_regret,cumulative_regret\nalg5,7,1,0.5,0.5\nalg5,7,2,0.25,0.75\n");
        let rows = read_results(&bytes[..], "mem").unwrap();
        assert_eq!(rows[1].cumulative_regret, 0.75);
    }

    #[test]
    fn summary_empty_bound() {
        let mut out = Vec::new();
        let rows = [SummaryRow { learner: "oracle".into(), horizon: 10, mean: 0.0, std: 0.0, bound: None }];
        write_summary(&mut out, &rows).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "learner,T,mean_cum_regret,std_cum_regret,theorem_bound\noracle,10,0,0,\n");
    }

    #[test]
    fn schema_mismatch() {
        let err = read_results(&b"learner,seed,t,regret\n"[..], "x.csv").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
