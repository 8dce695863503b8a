//! Acceptance suite for the command-line driver: criteria 9 and 10 run
//! the compiled binary end to end. Criteria 1–8 concern the library and
//! live in its acceptance suite; the `verify` subcommand re-runs all ten
//! at will.

use std::path::Path;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cogrowth"))
}

fn conclude(number: usize, label: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {number} ({label}): PASS — {detail}"),
        Err(detail) => {
            println!("criterion {number} ({label}): FAIL — {detail}");
            panic!("criterion {number} failed: {detail}");
        }
    }
}

const RESULT_COLUMNS: &str = "beta,alpha,samples,mean_length,err,conj_accept_rate,\
insert_accept_rate,insert_guard_rate,swap_accept_rate,tau_int";

/// Parses a results CSV and checks that every report field is present
/// and sane: positive finite mean and error, rates inside [0, 1], and an
/// autocorrelation time of at least half a move.
fn validate_results(path: &Path, expected_rows: usize) -> Result<(), String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or("missing column header")?;
    if header != RESULT_COLUMNS {
        return Err(format!("unexpected columns: {header}"));
    }
    let rows: Vec<&str> = lines.collect();
    if rows.len() != expected_rows {
        return Err(format!("{} rows, expected {expected_rows}", rows.len()));
    }
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 10 {
            return Err(format!("row `{row}` has {} fields", fields.len()));
        }
        let number = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| format!("field {i} of `{row}`: {e}"))
        };
        let mean = number(3)?;
        let err = number(4)?;
        if !(mean > 0.0 && mean.is_finite() && err > 0.0 && err.is_finite()) {
            return Err(format!("mean {mean} ± {err} out of range in `{row}`"));
        }
        for i in [5usize, 6, 7, 8] {
            let rate = number(i)?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(format!("rate field {i} is {rate} in `{row}`"));
            }
        }
        let tau = number(9)?;
        if !(tau >= 0.5 && tau.is_finite()) {
            return Err(format!("tau_int {tau} out of range in `{row}`"));
        }
    }
    Ok(())
}

#[test]
fn criterion_9_exotic_presentations_run_end_to_end() {
    let outcome = (|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for name in ["f1", "f2", "f3", "basilica1", "basilica2", "basilica3"] {
            let out = dir.path().join(name);
            let status = binary()
                .args([
                    "run",
                    "--presentation",
                    name,
                    "--betas",
                    "0.10,0.15,0.20",
                    "--alpha",
                    "1",
                    "--steps",
                    "1000000",
                    "--blocks",
                    "50",
                    "--burn-in",
                    "10000",
                    "--seed",
                    "5",
                    "--out",
                ])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "{name}: run exited with {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            validate_results(&out.join("results.csv"), 3).map_err(|e| format!("{name}: {e}"))?;
            let blocks = std::fs::read_to_string(out.join("blocks.csv"))
                .map_err(|e| format!("{name}: {e}"))?;
            let block_rows = blocks
                .lines()
                .filter(|l| !l.starts_with('#') && !l.starts_with("beta"))
                .count();
            if block_rows != 3 * 50 {
                return Err(format!("{name}: {block_rows} block rows, expected 150"));
            }
            if !out.join("plot.py").exists() {
                return Err(format!("{name}: plot.py missing"));
            }
        }
        Ok(
            "f1–f3 and basilica1–basilica3 each ran 3 β × 10⁶ moves and emitted complete reports"
                .to_string(),
        )
    })();
    conclude(9, "exotic presentations run end to end", outcome);
}

#[test]
fn criterion_10_identical_seeds_identical_reports() {
    let outcome = (|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let run = |sub: &str| -> Result<std::path::PathBuf, String> {
            let out = dir.path().join(sub);
            let status = binary()
                .args([
                    "run",
                    "--presentation",
                    "z2",
                    "--betas",
                    "0.10,0.20,0.28",
                    "--steps",
                    "200000",
                    "--blocks",
                    "20",
                    "--burn-in",
                    "1000",
                    "--seed",
                    "9",
                    "--overlay",
                    "z2",
                    "--out",
                ])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "run exited with {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            Ok(out)
        };
        let first = run("a")?;
        let second = run("b")?;
        for file in ["results.csv", "blocks.csv", "plot.py"] {
            let a = std::fs::read(first.join(file)).map_err(|e| format!("{file}: {e}"))?;
            let b = std::fs::read(second.join(file)).map_err(|e| format!("{file}: {e}"))?;
            if a != b {
                return Err(format!("{file} differs between identically seeded runs"));
            }
        }
        let results =
            std::fs::read_to_string(first.join("results.csv")).map_err(|e| e.to_string())?;
        if !results.contains("# version: ") {
            return Err("results.csv lacks the version header line".into());
        }
        Ok("results.csv, blocks.csv and plot.py byte-identical across reruns".to_string())
    })();
    conclude(10, "equal seeds give identical reports", outcome);
}
