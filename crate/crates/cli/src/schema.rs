//! Validators for the documented output formats.

use serde_json::Value;

use crate::output::{records_header, sweep_header, trajectories_header};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("schema violation: {0}")]
pub struct SchemaError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError(msg.into()))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Reads the header, infers the coordinate dimension from the trailing
/// `per_axis` groups and checks the names against `expected`.
fn header_dim(
    rows: &mut csv::StringRecordsIter<&[u8]>,
    fixed: usize,
    per_axis: usize,
    expected: fn(usize) -> Vec<String>,
) -> Result<usize, SchemaError> {
    let header = match rows.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return fail(format!("unreadable header: {e}")),
        None => return fail("missing header"),
    };
    let extra = header
        .len()
        .checked_sub(fixed)
        .filter(|e| *e > 0 && e % per_axis == 0);
    let Some(extra) = extra else {
        return fail(format!("header has {} columns", header.len()));
    };
    let d = extra / per_axis;
    if header.iter().ne(expected(d).iter().map(String::as_str)) {
        return fail("unexpected header names");
    }
    Ok(d)
}

fn float(s: &str, col: &str) -> Result<f64, SchemaError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => fail(format!("{col}: `{s}` is not a finite number")),
    }
}

fn opt_float(s: &str, col: &str) -> Result<Option<f64>, SchemaError> {
    if s.is_empty() {
        Ok(None)
    } else {
        float(s, col).map(Some)
    }
}

fn count(s: &str, col: &str) -> Result<u64, SchemaError> {
    s.parse::<u64>()
        .or_else(|_| fail(format!("{col}: `{s}` is not a count")))
}

fn boolean(s: &str, col: &str) -> Result<bool, SchemaError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => fail(format!("{col}: `{s}` is not true/false")),
    }
}

/// All empty or all finite.
fn coordinate_block(fields: &[&str], col: &str) -> Result<bool, SchemaError> {
    if fields.iter().all(|f| f.is_empty()) {
        return Ok(false);
    }
    for f in fields {
        float(f, col)?;
    }
    Ok(true)
}

/// Returns the number of data rows of a `records.csv`.
pub fn check_records_csv(text: &str) -> Result<usize, SchemaError> {
    let mut rd = reader(text);
    let mut rows = rd.records();
    let d = header_dim(&mut rows, 6, 3, records_header)?;
    let mut n = 0;
    for (line, row) in rows.enumerate() {
        let row = row.map_err(|e| SchemaError(format!("row {line}: {e}")))?;
        let f: Vec<&str> = row.iter().collect();
        if f.len() != 6 + 3 * d {
            return fail(format!("row {line}: {} fields", f.len()));
        }
        count(f[0], "sigma_index")?;
        if float(f[1], "sigma")? <= 0.0 {
            return fail(format!("row {line}: sigma must be positive"));
        }
        count(f[2], "replicate")?;
        if f[3].is_empty() {
            return fail(format!("row {line}: empty rule"));
        }
        if float(f[4], "time")? < 0.0 {
            return fail(format!("row {line}: negative time"));
        }
        let censored = boolean(f[5], "censored")?;
        let blocks = [
            coordinate_block(&f[6..6 + d], "x")?,
            coordinate_block(&f[6 + d..6 + 2 * d], "y")?,
            coordinate_block(&f[6 + 2 * d..], "mid")?,
        ];
        if censored != (f[3] == "censored") {
            return fail(format!(
                "row {line}: censored flag disagrees with rule `{}`",
                f[3]
            ));
        }
        if blocks.contains(&censored) {
            return fail(format!(
                "row {line}: locations must be present exactly for uncensored records"
            ));
        }
        n += 1;
    }
    Ok(n)
}

/// Returns the number of data rows of a `sweep.csv`.
pub fn check_sweep_csv(text: &str) -> Result<usize, SchemaError> {
    let mut rd = reader(text);
    let mut rows = rd.records();
    let d = header_dim(&mut rows, 11, 1, sweep_header)?;
    let mut n = 0;
    for (line, row) in rows.enumerate() {
        let row = row.map_err(|e| SchemaError(format!("row {line}: {e}")))?;
        let f: Vec<&str> = row.iter().collect();
        if f.len() != 11 + d {
            return fail(format!("row {line}: {} fields", f.len()));
        }
        if float(f[0], "sigma")? <= 0.0 || float(f[1], "t_max")? <= 0.0 {
            return fail(format!("row {line}: sigma and t_max must be positive"));
        }
        let unc = count(f[2], "n_uncensored")?;
        count(f[3], "n_censored")?;
        let mut stats = Vec::new();
        for (k, col) in [
            "mean_time",
            "mean_log_time",
            "median_dist_lambda0",
            "location_mad",
            "within_delta",
            "window_fraction",
        ]
        .iter()
        .enumerate()
        {
            stats.push(opt_float(f[4 + k], col)?);
        }
        if (unc > 0) != stats[0].is_some() {
            return fail(format!(
                "row {line}: mean_time must be present exactly when n_uncensored > 0"
            ));
        }
        for frac in [stats[4], stats[5]].into_iter().flatten() {
            if !(0.0..=1.0).contains(&frac) {
                return fail(format!("row {line}: fraction {frac} outside [0, 1]"));
            }
        }
        boolean(f[10], "flagged")?;
        coordinate_block(&f[11..], "location")?;
        n += 1;
    }
    Ok(n)
}

/// Returns the number of data rows of a `trajectories.csv`.
pub fn check_trajectories_csv(text: &str) -> Result<usize, SchemaError> {
    let mut rd = reader(text);
    let mut rows = rd.records();
    let d = header_dim(&mut rows, 5, 1, trajectories_header)?;
    let mut n = 0;
    for (line, row) in rows.enumerate() {
        let row = row.map_err(|e| SchemaError(format!("row {line}: {e}")))?;
        let f: Vec<&str> = row.iter().collect();
        if f.len() != 5 + d {
            return fail(format!("row {line}: {} fields", f.len()));
        }
        count(f[0], "sigma_index")?;
        count(f[1], "replicate")?;
        float(f[2], "t")?;
        if f[3] != "x" && f[3] != "y" {
            return fail(format!("row {line}: side must be x or y"));
        }
        count(f[4], "particle")?;
        for c in &f[5..] {
            float(c, "c")?;
        }
        n += 1;
    }
    Ok(n)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, SchemaError> {
    v.get(key)
        .ok_or_else(|| SchemaError(format!("missing `{key}`")))
}

fn number_or_null(v: &Value, key: &str) -> Result<(), SchemaError> {
    match field(v, key)? {
        Value::Number(_) | Value::Null => Ok(()),
        _ => fail(format!("`{key}` must be a number")),
    }
}

fn number_array(v: &Value, key: &str) -> Result<(), SchemaError> {
    match field(v, key)? {
        Value::Array(a) if !a.is_empty() && a.iter().all(Value::is_number) => Ok(()),
        _ => fail(format!("`{key}` must be a non-empty array of numbers")),
    }
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, SchemaError> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| SchemaError(format!("`{key}` must be an array")))
}

fn check_prediction(p: &Value) -> Result<(), SchemaError> {
    number_or_null(p, "Hbar0")?;
    number_array(p, "lambda0")?;
    number_or_null(p, "eps0")
}

/// Checks the `report.json` of any subcommand.
pub fn check_report_json(text: &str) -> Result<(), SchemaError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| SchemaError(format!("invalid JSON: {e}")))?;
    if !v.is_object() {
        return fail("report must be a JSON object");
    }
    match field(&v, "report")?.as_str() {
        Some("sweep") | Some("exit_check") => {
            let r = field(&v, "result")?;
            check_prediction(field(r, "prediction")?)?;
            for row in array(r, "rows")? {
                number_or_null(row, "sigma")?;
                field(row, "n_uncensored")?
                    .as_u64()
                    .ok_or_else(|| SchemaError("`n_uncensored` must be a count".into()))?;
            }
            match field(r, "arrhenius")? {
                Value::Null => Ok(()),
                fit @ Value::Object(_) => {
                    number_or_null(fit, "slope")?;
                    number_or_null(fit, "r2")?;
                    match field(fit, "slope_ci")? {
                        Value::Array(a) if a.len() == 2 => Ok(()),
                        _ => fail("`slope_ci` must be a pair"),
                    }
                }
                _ => fail("`arrhenius` must be an object or null"),
            }
        }
        Some("landscape") => {
            check_prediction(&v)?;
            match array(&v, "wells")?.as_slice() {
                [a, b] if a.is_array() && b.is_array() => {}
                _ => return fail("`wells` must hold two points"),
            }
            number_or_null(&v, "theta")?;
            number_or_null(&v, "eps_c")?;
            for row in array(&v, "h_eps")? {
                number_or_null(row, "epsilon")?;
                number_or_null(row, "inf_h_eps")?;
                array(row, "minimizers")?;
            }
            Ok(())
        }
        Some("couple") => {
            let c = field(&v, "coupling")?;
            let m = field(&v, "confinement")?;
            if c.is_null() && m.is_null() {
                return fail("couple report holds neither coupling nor confinement");
            }
            if !c.is_null() {
                for row in array(c, "rows")? {
                    number_or_null(row, "t_start")?;
                    number_or_null(row, "exceedance")?;
                }
            }
            if !m.is_null() {
                number_or_null(m, "fraction_within")?;
                array(m, "max_deviations")?;
            }
            Ok(())
        }
        _ => fail("`report` must be one of sweep, exit_check, landscape, couple"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_accept_both_shapes() {
        let text = "sigma_index,sigma,replicate,rule,time,censored,x_0,y_0,mid_0\n\
                    0,0.5,0,exact_collision_1d,1.5,false,0.1,0.1,0.1\n\
                    0,0.5,1,censored,10.0,true,,,\n";
        assert_eq!(check_records_csv(text), Ok(2));
    }

    #[test]
    fn records_reject_half_censored_rows() {
        let text = "sigma_index,sigma,replicate,rule,time,censored,x_0,y_0,mid_0\n\
                    0,0.5,1,censored,10.0,true,0.1,,\n";
        assert!(check_records_csv(text).is_err());
        let text = "sigma_index,sigma,replicate,rule,time,censored,x_0,y_0,mid_0\n\
                    0,0.5,1,eps_collision,NaN,false,0.1,0.1,0.1\n";
        assert!(check_records_csv(text).is_err());
    }

    #[test]
    fn sweep_header_is_checked() {
        let mut text = sweep_header(1).join(",");
        text.push('\n');
        assert_eq!(check_sweep_csv(&text), Ok(0));
        assert!(check_sweep_csv("sigma,t_max\n").is_err());
        assert!(check_sweep_csv("").is_err());
    }

    #[test]
    fn report_kinds() {
        assert!(check_report_json("[]").is_err());
        assert!(check_report_json(r#"{"report":"nope"}"#).is_err());
        let land = r#"{"report":"landscape","wells":[[-1.0],[1.0]],"theta":-1.0,"eps0":1.0,
            "lambda0":[0.0],"Hbar0":2.5,"eps_c":null,"h_eps":[]}"#;
        assert_eq!(check_report_json(land), Ok(()));
    }
}
