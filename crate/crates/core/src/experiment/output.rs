//! CSV persistence.

use std::fmt::Write as _;
use std::path::Path;

use super::ExperimentResult;
use crate::error::{Error, Result};

pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const FINAL_STATE_CSV: &str = "final_state.csv";

const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `v` like C's `%.9g`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(super) fn run_file_name(run_id: usize) -> String {
    format!("run_{run_id:03}.csv")
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub(super) fn write_all(dir: &Path, result: &ExperimentResult) -> Result<()> {
    for run in &result.runs {
        let mut csv = String::from("timestep,mean_lambda,sd_lambda\n");
        for p in &run.series {
            let _ = writeln!(
                csv,
                "{},{},{}",
                p.timestep,
                format_number(p.mean_lambda),
                format_number(p.sd_lambda)
            );
        }
        write(dir, &run_file_name(run.run_id), &csv)?;
    }

    let mut csv = String::from("timestep,mean_of_means,sem_of_means,mean_sd\n");
    for p in &result.aggregate.series {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            p.timestep,
            format_number(p.mean_of_means),
            format_number(p.sem_of_means),
            format_number(p.mean_sd)
        );
    }
    write(dir, AGGREGATE_CSV, &csv)?;

    let mut csv = String::from("run_id,agent_id,lambda\n");
    for run in &result.runs {
        for (agent, lambda) in run.final_lambdas.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", run.run_id, agent, format_number(*lambda));
        }
    }
    write(dir, FINAL_STATE_CSV, &csv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-0.25, "-0.25"),
            (9.9999999999, "10"),
            (0.0, "0"),
        ];
        for (v, want) in cases {
            assert_eq!(format_number(v), want, "{v}");
        }
    }

    proptest! {
        #[test]
        fn keeps_nine_significant_digits(v in -1e6..1e6f64) {
            let parsed: f64 = format_number(v).parse().unwrap();
            prop_assert!((parsed - v).abs() <= v.abs() * 1e-8 + 1e-300);
        }
    }
}
