//! Report files for a sampling run: a per-β results CSV, the raw block
//! means, and a standalone Python script that plots both against the
//! exact series curve. Output is deterministic — identical settings and
//! seed reproduce every byte, and only the version header line changes
//! between releases.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use cogrowth::series::expected_length_estimate;
use cogrowth::tempering::RunReport;

use crate::config::{RunSettings, OVERLAY_ORDER};
use crate::CliError;

/// Column order of results.csv. Fixed: downstream tooling indexes by it.
pub const RESULT_COLUMNS: &str = "beta,alpha,samples,mean_length,err,conj_accept_rate,\
insert_accept_rate,insert_guard_rate,swap_accept_rate,tau_int";

/// Number of points on the overlay curve embedded in the plot script.
const OVERLAY_POINTS: usize = 121;

pub struct ReportPaths {
    pub results: PathBuf,
    pub blocks: PathBuf,
    pub plot: PathBuf,
}

impl ReportPaths {
    pub fn describe(&self) -> String {
        format!(
            "{}, {} and {}",
            self.results.display(),
            self.blocks.display(),
            self.plot.display()
        )
    }
}

pub fn write_reports(
    settings: &RunSettings,
    reports: &[RunReport],
) -> Result<ReportPaths, CliError> {
    fs::create_dir_all(&settings.out_dir).map_err(|err| {
        CliError::Runtime(format!(
            "cannot create output directory {}: {err}",
            settings.out_dir.display()
        ))
    })?;
    let paths = ReportPaths {
        results: settings.out_dir.join("results.csv"),
        blocks: settings.out_dir.join("blocks.csv"),
        plot: settings.out_dir.join("plot.py"),
    };
    let write = |path: &PathBuf, body: String| {
        fs::write(path, body).map_err(|err| {
            CliError::Runtime(format!("cannot write {}: {err}", path.display()))
        })
    };
    write(&paths.results, results_csv(settings, reports))?;
    write(&paths.blocks, blocks_csv(settings, reports))?;
    write(&paths.plot, plot_script(settings, reports))?;
    Ok(paths)
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn metadata_header(settings: &RunSettings, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# cogrowth {title}");
    let _ = writeln!(out, "# version: {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# presentation: {}", settings.presentation_label);
    let _ = writeln!(
        out,
        "# presentation_sha256: {}",
        sha256_hex(&settings.presentation_text)
    );
    let _ = writeln!(out, "# alpha: {}", settings.alpha);
    let _ = writeln!(
        out,
        "# conjugation_probability: {}",
        settings.conjugation_probability
    );
    let _ = writeln!(out, "# steps_per_chain: {}", settings.steps);
    let _ = writeln!(out, "# swap_interval: {}", settings.swap_interval);
    let _ = writeln!(out, "# blocks: {}", settings.blocks);
    let _ = writeln!(out, "# burn_in: {}", settings.burn_in);
    let _ = writeln!(out, "# seed: {}", settings.seed);
    let _ = writeln!(out, "# avoid_empty: {}", settings.avoid_empty);
    let _ = writeln!(out, "# overlay: {}", settings.overlay.label());
    out
}

pub fn results_csv(settings: &RunSettings, reports: &[RunReport]) -> String {
    let mut out = metadata_header(settings, "results");
    let _ = writeln!(out, "{RESULT_COLUMNS}");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.beta,
            r.alpha,
            r.samples,
            r.mean_length,
            r.err,
            r.conj_accept_rate,
            r.insert_accept_rate,
            r.insert_guard_rate,
            r.swap_accept_rate,
            r.tau_int
        );
    }
    out
}

pub fn blocks_csv(settings: &RunSettings, reports: &[RunReport]) -> String {
    let mut out = metadata_header(settings, "block means");
    let _ = writeln!(out, "beta,block,mean_length");
    for r in reports {
        for (index, mean) in r.block_means.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", r.beta, index, mean);
        }
    }
    out
}

/// The overlay curve: β values below the critical point paired with the
/// truncated-series expectation, ready for embedding in the plot script.
fn overlay_points(settings: &RunSettings) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let (series, beta_c) = settings.overlay.exact()?;
    let lo = settings.betas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = settings
        .betas
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .min(beta_c * 0.999);
    let mut betas = Vec::new();
    let mut means = Vec::new();
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        for i in 0..OVERLAY_POINTS {
            let t = lo + (hi - lo) * i as f64 / (OVERLAY_POINTS - 1) as f64;
            if let Ok((value, _)) =
                expected_length_estimate(&series, settings.alpha, t, settings.avoid_empty)
            {
                betas.push(t);
                means.push(value);
            }
        }
    }
    Some((betas, means, beta_c))
}

fn python_list(values: &[f64]) -> String {
    let mut out = String::from("[");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{v}");
    }
    out.push(']');
    out
}

fn plot_script(settings: &RunSettings, _reports: &[RunReport]) -> String {
    let (overlay_block, critical) = match overlay_points(settings) {
        Some((betas, means, beta_c)) => (
            format!(
                "OVERLAY = {{\n    \"label\": \"{} series, order {}\",\n    \"beta\": {},\n    \"mean\": {},\n}}",
                settings.overlay.label(),
                OVERLAY_ORDER,
                python_list(&betas),
                python_list(&means),
            ),
            format!("CRITICAL_BETA = {beta_c}"),
        ),
        None => ("OVERLAY = None".to_string(), "CRITICAL_BETA = None".to_string()),
    };
    format!(
        r##"#!/usr/bin/env python3
"""Plot the sampled mean trivial-word length against beta.

Reads results.csv from the directory containing this script and writes
results.png next to it. The lower panel shows 1/err, whose approach to
zero locates the critical beta."""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))

{overlay_block}
{critical}


def read_rows(path):
    with open(path) as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


rows = read_rows(os.path.join(HERE, "results.csv"))
beta = [float(r["beta"]) for r in rows]
mean = [float(r["mean_length"]) for r in rows]
err = [float(r["err"]) for r in rows]

fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
top.errorbar(beta, mean, yerr=err, fmt="o", ms=4, capsize=3, label="sampled")
if OVERLAY is not None:
    top.plot(OVERLAY["beta"], OVERLAY["mean"], "-", lw=1, label=OVERLAY["label"])
if CRITICAL_BETA is not None:
    for axis in (top, bottom):
        axis.axvline(CRITICAL_BETA, color="gray", ls="--", lw=1)
top.set_ylabel("mean |w|")
top.legend()
inverse_err = [1.0 / e if e > 0 else float("nan") for e in err]
bottom.plot(beta, inverse_err, "s-", ms=4)
bottom.set_xlabel("beta")
bottom.set_ylabel("1 / err")
fig.tight_layout()
target = os.path.join(HERE, "results.png")
fig.savefig(target, dpi=150)
print("wrote", target)
"##
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overlay, RunSettings};
    use cogrowth::tempering::run_grid;

    fn small_run() -> (RunSettings, Vec<RunReport>) {
        let mut settings = RunSettings::for_bundled(
            "z2",
            vec![0.1, 0.2],
            20_000,
            std::env::temp_dir(),
        );
        settings.blocks = 10;
        settings.seed = 3;
        settings.overlay = Overlay::Z2;
        let reports = run_grid(settings.presentation(), &settings.tempering_config()).unwrap();
        (settings, reports)
    }

    #[test]
    fn results_csv_has_the_fixed_columns_and_one_row_per_beta() {
        let (settings, reports) = small_run();
        let text = results_csv(&settings, &reports);
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        assert_eq!(lines.next().unwrap(), RESULT_COLUMNS);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert_eq!(row.split(',').count(), 10);
        }
        assert!(text.contains("# seed: 3"));
        assert!(text.contains("# presentation: z2"));
        assert!(text.contains("# presentation_sha256: "));
    }

    #[test]
    fn block_csv_lists_every_block() {
        let (settings, reports) = small_run();
        let text = blocks_csv(&settings, &reports);
        let rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("beta"))
            .count();
        assert_eq!(rows, 2 * 10);
    }

    #[test]
    fn identical_runs_render_identical_reports() {
        let (settings, reports) = small_run();
        let (settings2, reports2) = small_run();
        assert_eq!(
            results_csv(&settings, &reports),
            results_csv(&settings2, &reports2)
        );
        assert_eq!(
            blocks_csv(&settings, &reports),
            blocks_csv(&settings2, &reports2)
        );
        assert_eq!(
            plot_script(&settings, &reports),
            plot_script(&settings2, &reports2)
        );
    }

    #[test]
    fn plot_script_embeds_the_overlay_and_critical_beta() {
        let (settings, reports) = small_run();
        let script = plot_script(&settings, &reports);
        assert!(script.contains("\"label\": \"z2 series, order 60\""));
        assert!(script.contains("CRITICAL_BETA = 0.3333333333333333"));
        assert!(script.contains("results.png"));

        let mut plain = RunSettings::for_bundled("f1", vec![0.1], 1000, std::env::temp_dir());
        plain.blocks = 5;
        let script = plot_script(&plain, &[]);
        assert!(script.contains("OVERLAY = None"));
        assert!(script.contains("CRITICAL_BETA = None"));
    }
}
