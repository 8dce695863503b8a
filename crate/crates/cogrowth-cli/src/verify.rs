//! The built-in verification suite behind `cogrowth verify`: ten checks
//! covering the exact oracles, the kernel's reversibility and balance,
//! sampling accuracy against truncated series, divergence at the critical
//! point, exotic presentations, and report determinism. `--quick` skips
//! the sampling-scale checks (5–9) and keeps the exact ones.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cogrowth::bruteforce::{count_trivial_words, truncated_state_space, WordProblemOracle};
use cogrowth::chain::{transition_probability, ChainParams};
use cogrowth::moves::{conjugate, left_insert, reachable_states};
use cogrowth::presentation::{bundled, Presentation, RelatorTable};
use cogrowth::series::{
    boltzmann_weight, expected_length_estimate, kouksov_radius, kouksov_series, woess_transform,
    z2_return_series, CoefficientSeries, KouksovGroup, Z2_CRITICAL_BETA,
};
use cogrowth::tempering::{run_grid, RunReport, TemperingConfig};
use cogrowth::words::{Letter, Word};

use crate::config::{Overlay, RunSettings};
use crate::report;

pub enum Status {
    Pass,
    Fail,
    Skipped,
}

pub struct CheckOutcome {
    pub label: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

fn timed(
    label: &'static str,
    check: impl FnOnce() -> Result<String, String>,
) -> CheckOutcome {
    let start = Instant::now();
    let (status, detail) = match check() {
        Ok(detail) => (Status::Pass, detail),
        Err(detail) => (Status::Fail, detail),
    };
    CheckOutcome { label, status, detail, seconds: start.elapsed().as_secs_f64() }
}

fn skipped(label: &'static str, why: &str) -> CheckOutcome {
    CheckOutcome { label, status: Status::Skipped, detail: why.to_string(), seconds: 0.0 }
}

pub fn run_checks(quick: bool) -> Vec<CheckOutcome> {
    let mut out = vec![
        timed("series radii at their pinned values", check_radii),
        timed("series oracles match enumeration", check_series_vs_enumeration),
        timed("order-two counts and closed form", check_order_two),
        timed("exact detailed balance on truncated states", check_detailed_balance),
    ];

    let mut z2_reports: Option<Vec<RunReport>> = None;
    let mut k3_reports: Option<Vec<RunReport>> = None;
    if quick {
        out.push(skipped("randomized move reversibility", "quick mode"));
        out.push(skipped("z2 means track the exact series", "quick mode"));
        out.push(skipped("k3 means track the exact series", "quick mode"));
        out.push(skipped("mean and error diverge toward criticality", "quick mode"));
        out.push(skipped("exotic presentations run end to end", "quick mode"));
    } else {
        out.push(timed("randomized move reversibility", check_reversibility));
        out.push(timed("z2 means track the exact series", || {
            let (p, config) = z2_sampling();
            let reports =
                run_grid(&p, &config).map_err(|err| format!("sampling failed: {err}"))?;
            let series = woess_transform(&z2_return_series(60), 2, 60)
                .map_err(|err| err.to_string())?;
            let detail = track_series(&reports, &series, 0.30);
            z2_reports = Some(reports);
            detail
        }));
        out.push(timed("k3 means track the exact series", || {
            let (p, config) = k3_sampling();
            let reports =
                run_grid(&p, &config).map_err(|err| format!("sampling failed: {err}"))?;
            let series = kouksov_series(KouksovGroup::Z2StarZ2StarZ2, 60);
            let detail = track_series(&reports, &series, 0.19);
            k3_reports = Some(reports);
            detail
        }));
        match (&z2_reports, &k3_reports) {
            (Some(z2), Some(k3)) => {
                out.push(timed("mean and error diverge toward criticality", || {
                    let a = divergence(z2, Z2_CRITICAL_BETA, "z2")?;
                    let b = divergence(
                        k3,
                        kouksov_radius(KouksovGroup::Z2StarZ2StarZ2),
                        "k3",
                    )?;
                    Ok(format!("{a}; {b}"))
                }));
            }
            _ => out.push(skipped(
                "mean and error diverge toward criticality",
                "needs the sampling data of the two previous checks",
            )),
        }
        out.push(timed("exotic presentations run end to end", check_exotic_presentations));
    }
    out.push(timed("equal seeds give identical reports", check_determinism));
    out
}

const PINNED_RADII: [(KouksovGroup, f64, &str); 3] = [
    (KouksovGroup::Z2StarZ3, 0.3418821478, "k1"),
    (KouksovGroup::Z3StarZ3, 0.3664068598, "k2"),
    (KouksovGroup::Z2StarZ2StarZ2, 0.2192752634, "k3"),
];

fn check_radii() -> Result<String, String> {
    let start = Instant::now();
    let mut shown = Vec::new();
    for (group, pinned, name) in PINNED_RADII {
        let radius = kouksov_radius(group);
        if (radius - pinned).abs() > 1e-9 {
            return Err(format!("{name}: computed {radius}, pinned {pinned}"));
        }
        shown.push(format!("{name} {radius:.10}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 1.0 {
        return Err(format!("radii took {elapsed:.2}s, budget is 1s"));
    }
    Ok(shown.join(", "))
}

/// Compares exact integer series coefficients against brute-force counts.
fn match_counts(
    name: &str,
    series: &CoefficientSeries,
    counts: &[u64],
    up_to: usize,
) -> Result<(), String> {
    let ints = series
        .integer_coefficients()
        .ok_or_else(|| format!("{name}: series coefficients are not integers"))?;
    for n in 0..=up_to {
        if ints[n].to_string() != counts[n].to_string() {
            return Err(format!(
                "{name}: c({n}) is {} from the series but {} from enumeration",
                ints[n], counts[n]
            ));
        }
    }
    Ok(())
}

fn check_series_vs_enumeration() -> Result<String, String> {
    let start = Instant::now();
    let z2 = bundled("z2").expect("bundled");
    let counts = count_trivial_words(&z2, &WordProblemOracle::FreeAbelian { rank: 2 }, 12)
        .map_err(|err| err.to_string())?;
    let series =
        woess_transform(&z2_return_series(12), 2, 12).map_err(|err| err.to_string())?;
    match_counts("z2", &series, &counts, 12)?;

    let k2 = bundled("k2").expect("bundled");
    let counts = count_trivial_words(
        &k2,
        &WordProblemOracle::FreeProductOfCyclics { orders: vec![3, 3] },
        9,
    )
    .map_err(|err| err.to_string())?;
    match_counts("k2", &kouksov_series(KouksovGroup::Z3StarZ3, 9), &counts, 9)?;

    let k3 = bundled("k3").expect("bundled");
    let counts = count_trivial_words(
        &k3,
        &WordProblemOracle::FreeProductOfCyclics { orders: vec![2, 2, 2] },
        8,
    )
    .map_err(|err| err.to_string())?;
    match_counts("k3", &kouksov_series(KouksovGroup::Z2StarZ2StarZ2, 8), &counts, 8)?;

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 60.0 {
        return Err(format!("comparison took {elapsed:.1}s, budget is 60s"));
    }
    Ok("z2 to length 12, k2 to 9, k3 to 8 all agree".into())
}

fn check_order_two() -> Result<String, String> {
    let p = bundled("a2").expect("bundled");
    let counts = count_trivial_words(
        &p,
        &WordProblemOracle::FreeProductOfCyclics { orders: vec![2] },
        12,
    )
    .map_err(|err| err.to_string())?;
    let mut expected = vec![0u64; 13];
    expected[0] = 1;
    for n in (2..=12).step_by(2) {
        expected[n] = 2;
    }
    if counts != expected {
        return Err(format!("enumeration gave {counts:?}"));
    }
    let closed_form = CoefficientSeries::polynomial(&[1, 0, 1], 12)
        .mul(&CoefficientSeries::polynomial(&[1, 0, -1], 12).recip());
    match_counts("a2", &closed_form, &expected, 12)?;
    Ok("c(0)=1, c(2n)=2, odd counts zero; closed form agrees".into())
}

fn check_detailed_balance() -> Result<String, String> {
    let start = Instant::now();
    let p = bundled("z2").expect("bundled");
    let table = RelatorTable::closure(&p);
    let k = p.generator_count();
    let words =
        truncated_state_space(&p, &WordProblemOracle::FreeAbelian { rank: 2 }, 8, false)
            .map_err(|err| err.to_string())?;
    let index: HashMap<Word, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut max_rel = 0.0f64;
    for (alpha, beta) in [(-1.0, 0.2), (0.0, 0.25), (1.0, 0.3)] {
        let params = ChainParams::new(alpha, beta);
        let weights: Vec<f64> =
            words.iter().map(|w| boltzmann_weight(w, alpha, beta)).collect();
        let mut flows = vec![vec![0.0f64; words.len()]; words.len()];
        for (i, u) in words.iter().enumerate() {
            for v in reachable_states(u, &table, k) {
                if let Some(&j) = index.get(&v) {
                    if j != i {
                        flows[i][j] = transition_probability(u, &v, &params, &table, k);
                    }
                }
            }
        }
        for i in 0..words.len() {
            for j in 0..i {
                let forward = weights[i] * flows[i][j];
                let backward = weights[j] * flows[j][i];
                if forward == 0.0 && backward == 0.0 {
                    continue;
                }
                let rel = (forward - backward).abs() / forward.max(backward);
                max_rel = max_rel.max(rel);
                if rel >= 1e-12 {
                    return Err(format!(
                        "pair ({i}, {j}) at α={alpha}, β={beta}: fluxes {forward:e} vs {backward:e}"
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 10.0 {
        return Err(format!("balance check took {elapsed:.1}s, budget is 10s"));
    }
    Ok(format!(
        "{} states, three (α, β) pairs, worst imbalance {max_rel:.2e}",
        words.len()
    ))
}

fn random_letter(rng: &mut ChaCha8Rng, k: usize) -> Letter {
    Letter::new(rng.gen_range(0..k) as u16, rng.gen_bool(0.5))
}

fn random_word(rng: &mut ChaCha8Rng, k: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<Letter> = (0..len).map(|_| random_letter(rng, k)).collect();
    Word::reduce(letters)
}

/// A random element of the normal closure: a short product of conjugated
/// relator-table members.
fn random_trivial_word(rng: &mut ChaCha8Rng, table: &RelatorTable, k: usize) -> Word {
    let members = table.members();
    let mut w = Word::empty();
    for _ in 0..rng.gen_range(1..=3) {
        let relator = &members[rng.gen_range(0..members.len())];
        let conjugator = random_word(rng, k, 4);
        w = w
            .concat(&conjugator)
            .concat(relator)
            .concat(&conjugator.inverse());
    }
    w
}

fn insertion_count(from: &Word, to: &Word, members: &[Word]) -> usize {
    members
        .iter()
        .filter(|r| (from.len() + r.len()) % 2 == to.len() % 2)
        .map(|r| {
            (0..=from.len())
                .filter(|&m| left_insert(from, r, m).is_some_and(|w| &w == to))
                .count()
        })
        .sum()
}

fn check_reversibility() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let names = ["z2", "k1", "bs12", "f1"];
    let cases_per_presentation = 25_000usize;
    let mut guarded = 0u64;
    let mut total = 0u64;
    for name in names {
        let p = bundled(name).expect("bundled");
        let table = RelatorTable::closure(&p);
        let members = table.members();
        let k = p.generator_count();
        for _ in 0..cases_per_presentation {
            total += 1;
            let w = random_trivial_word(&mut rng, &table, k);
            if rng.gen_bool(0.5) {
                let x = random_letter(&mut rng, k);
                let w2 = conjugate(&w, x);
                let forward =
                    Letter::alphabet(k).filter(|&y| conjugate(&w, y) == w2).count();
                let backward =
                    Letter::alphabet(k).filter(|&y| conjugate(&w2, y) == w).count();
                if forward != backward || backward == 0 {
                    return Err(format!(
                        "{name}: conjugation by {x:?} on |w|={} has {forward} forward \
                         but {backward} backward moves",
                        w.len()
                    ));
                }
            } else {
                let relator = &members[rng.gen_range(0..members.len())];
                let position = rng.gen_range(0..=w.len());
                match left_insert(&w, relator, position) {
                    None => guarded += 1,
                    Some(w2) => {
                        let forward = insertion_count(&w, &w2, members);
                        let backward = insertion_count(&w2, &w, members);
                        if forward != backward || backward == 0 {
                            return Err(format!(
                                "{name}: insertion at {position} on |w|={} has {forward} \
                                 forward but {backward} backward moves",
                                w.len()
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{total} cases across z2, k1, bs12, f1 all reversible ({guarded} guarded proposals)"
    ))
}

/// Shared grid for the z2 sampling checks: α = 1, six β values up to
/// 0.30, ten million recorded moves per chain.
pub(crate) fn z2_sampling() -> (Presentation, TemperingConfig) {
    let p = bundled("z2").expect("bundled");
    let mut config = TemperingConfig::new(
        vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
        1.0,
        10_000_000,
    );
    config.burn_in = 100_000;
    config.seed = 41;
    (p, config)
}

/// Shared grid for the k3 sampling checks: α = 1, nine β values up to
/// 0.20 (the radius sits at ≈ 0.2193).
pub(crate) fn k3_sampling() -> (Presentation, TemperingConfig) {
    let p = bundled("k3").expect("bundled");
    let mut config = TemperingConfig::new(
        vec![0.04, 0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20],
        1.0,
        10_000_000,
    );
    config.burn_in = 100_000;
    config.seed = 53;
    (p, config)
}

/// Compares sampled means against the truncated-series expectation,
/// allowing three standard errors plus the series' own truncation-error
/// bound. The bound matters only near the radius (for z2 at β = 0.30 the
/// order-60 value sits up to ≈ 0.9 below the true expectation), where
/// ignoring it would test the truncation instead of the sampler.
fn track_series(
    reports: &[RunReport],
    series: &CoefficientSeries,
    compare_up_to: f64,
) -> Result<String, String> {
    let mut max_z = 0.0f64;
    let mut compared = 0usize;
    for r in reports {
        if r.beta > compare_up_to + 1e-9 {
            continue;
        }
        let (exact, bound) = expected_length_estimate(series, r.alpha, r.beta, true)
            .map_err(|err| format!("series evaluation at β={}: {err}", r.beta))?;
        let deviation = (r.mean_length - exact).abs();
        if !deviation.is_finite() || deviation > 3.0 * r.err + bound {
            return Err(format!(
                "β={}: sampled {:.4} ± {:.4} vs exact {:.4} (+{:.4} truncation bound)",
                r.beta, r.mean_length, r.err, exact, bound
            ));
        }
        max_z = max_z.max((deviation - bound).max(0.0) / r.err);
        compared += 1;
    }
    Ok(format!(
        "{compared} β values within 3σ plus the truncation bound (worst residual {max_z:.2}σ)"
    ))
}

fn divergence(reports: &[RunReport], beta_c: f64, name: &str) -> Result<String, String> {
    let below: Vec<&RunReport> = reports.iter().filter(|r| r.beta < beta_c).collect();
    if below.len() < 5 {
        return Err(format!("{name}: only {} grid points below β_c", below.len()));
    }
    let top = &below[below.len() - 5..];
    for pair in top.windows(2) {
        if pair[1].mean_length <= pair[0].mean_length {
            return Err(format!(
                "{name}: mean fell from {:.4} at β={} to {:.4} at β={}",
                pair[0].mean_length, pair[0].beta, pair[1].mean_length, pair[1].beta
            ));
        }
        if pair[1].err <= pair[0].err {
            return Err(format!(
                "{name}: err fell from {:.2e} at β={} to {:.2e} at β={}",
                pair[0].err, pair[0].beta, pair[1].err, pair[1].beta
            ));
        }
    }
    Ok(format!(
        "{name} mean {:.2}→{:.2}, err {:.1e}→{:.1e} over the top five β",
        top[0].mean_length,
        top[4].mean_length,
        top[0].err,
        top[4].err
    ))
}

fn scratch_dir(tag: &str) -> Result<PathBuf, String> {
    let dir = std::env::temp_dir().join(format!("cogrowth-verify-{}-{tag}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|err| format!("cannot clear {}: {err}", dir.display()))?;
    }
    fs::create_dir_all(&dir).map_err(|err| format!("cannot create {}: {err}", dir.display()))?;
    Ok(dir)
}

fn validate_results_csv(text: &str, expected_rows: usize) -> Result<(), String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or("results.csv has no column header")?;
    if header != report::RESULT_COLUMNS {
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
                .map_err(|err| format!("field {i} of `{row}`: {err}"))
        };
        let mean = number(3)?;
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(format!("mean_length {mean} out of range in `{row}`"));
        }
        let err = number(4)?;
        if !(err > 0.0 && err.is_finite()) {
            return Err(format!("err {err} out of range in `{row}`"));
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

fn check_exotic_presentations() -> Result<String, String> {
    let names = ["f1", "f2", "f3", "basilica1", "basilica2", "basilica3"];
    let dir = scratch_dir("smoke")?;
    for name in names {
        let mut settings = RunSettings::for_bundled(
            name,
            vec![0.10, 0.15, 0.20],
            1_000_000,
            dir.join(name),
        );
        settings.blocks = 50;
        settings.burn_in = 10_000;
        settings.seed = 5;
        let reports = run_grid(settings.presentation(), &settings.tempering_config())
            .map_err(|err| format!("{name}: {err}"))?;
        let paths = report::write_reports(&settings, &reports)
            .map_err(|err| format!("{name}: {err}"))?;
        let text = fs::read_to_string(&paths.results)
            .map_err(|err| format!("{name}: cannot re-read results: {err}"))?;
        validate_results_csv(&text, 3).map_err(|err| format!("{name}: {err}"))?;
        for r in &reports {
            if r.block_means.len() != 50 || r.samples != 1_000_000 || r.swap_attempts == 0 {
                return Err(format!(
                    "{name}: incomplete report at β={} ({} blocks, {} samples, {} swap attempts)",
                    r.beta,
                    r.block_means.len(),
                    r.samples,
                    r.swap_attempts
                ));
            }
        }
    }
    let _ = fs::remove_dir_all(&dir);
    Ok("f1–f3 and basilica1–basilica3 ran 3 β × 10⁶ moves with complete reports".into())
}

fn check_determinism() -> Result<String, String> {
    let base = scratch_dir("determinism")?;
    let run_once = |subdir: &str| -> Result<PathBuf, String> {
        let mut settings = RunSettings::for_bundled(
            "z2",
            vec![0.10, 0.20, 0.28],
            200_000,
            base.join(subdir),
        );
        settings.blocks = 20;
        settings.burn_in = 1000;
        settings.seed = 9;
        settings.overlay = Overlay::Z2;
        let reports = run_grid(settings.presentation(), &settings.tempering_config())
            .map_err(|err| err.to_string())?;
        report::write_reports(&settings, &reports).map_err(|err| err.to_string())?;
        Ok(settings.out_dir)
    };
    let first = run_once("a")?;
    let second = run_once("b")?;
    for file in ["results.csv", "blocks.csv", "plot.py"] {
        let a = fs::read(first.join(file)).map_err(|err| format!("{file}: {err}"))?;
        let b = fs::read(second.join(file)).map_err(|err| format!("{file}: {err}"))?;
        if a != b {
            return Err(format!("{file} differs between identically seeded runs"));
        }
    }
    let results = fs::read_to_string(first.join("results.csv")).map_err(|e| e.to_string())?;
    if !results.contains("# version: ") {
        return Err("results.csv is missing the version header".into());
    }
    let _ = fs::remove_dir_all(&base);
    Ok("results.csv, blocks.csv and plot.py byte-identical across reruns".into())
}
