//! Run settings assembled from three layers: built-in desk-scale
//! defaults, an optional `key = value` settings file, and command-line
//! flags. Later layers win. The resolved settings carry everything the
//! run needs, including the presentation source text so reports can
//! record its digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use cogrowth::bruteforce::WordProblemOracle;
use cogrowth::presentation::{bundled, bundled_source, Presentation};
use cogrowth::series::{
    kouksov_radius, kouksov_series, woess_transform, z2_return_series, CoefficientSeries,
    KouksovGroup, Z2_CRITICAL_BETA,
};
use cogrowth::tempering::TemperingConfig;

use crate::CliError;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_PC: f64 = 0.5;
pub const DEFAULT_BETA_MIN: f64 = 0.05;
pub const DEFAULT_BETA_MAX: f64 = 0.30;
pub const DEFAULT_BETA_COUNT: usize = 20;
pub const DEFAULT_STEPS: u64 = 10_000_000;
pub const DEFAULT_SWAP_INTERVAL: u64 = 1000;
pub const DEFAULT_BLOCKS: usize = 100;
pub const DEFAULT_BURN_IN: u64 = 0;
pub const DEFAULT_SEED: u64 = 1;

/// Truncation order of the series drawn over sampled means.
pub const OVERLAY_ORDER: usize = 60;

/// Exact expectation curve to draw over the sampled means. Only groups
/// with a series oracle can be selected.
#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Overlay {
    None,
    Z2,
    K1,
    K2,
    K3,
}

impl Overlay {
    pub fn label(self) -> &'static str {
        match self {
            Overlay::None => "none",
            Overlay::Z2 => "z2",
            Overlay::K1 => "k1",
            Overlay::K2 => "k2",
            Overlay::K3 => "k3",
        }
    }

    /// The truncated counting series and the critical β of the overlay
    /// group, or `None` when no overlay was requested.
    pub fn exact(self) -> Option<(CoefficientSeries, f64)> {
        let pair = match self {
            Overlay::None => return None,
            Overlay::Z2 => (
                woess_transform(&z2_return_series(OVERLAY_ORDER), 2, OVERLAY_ORDER)
                    .expect("transform order matches input order"),
                Z2_CRITICAL_BETA,
            ),
            Overlay::K1 => (
                kouksov_series(KouksovGroup::Z2StarZ3, OVERLAY_ORDER),
                kouksov_radius(KouksovGroup::Z2StarZ3),
            ),
            Overlay::K2 => (
                kouksov_series(KouksovGroup::Z3StarZ3, OVERLAY_ORDER),
                kouksov_radius(KouksovGroup::Z3StarZ3),
            ),
            Overlay::K3 => (
                kouksov_series(KouksovGroup::Z2StarZ2StarZ2, OVERLAY_ORDER),
                kouksov_radius(KouksovGroup::Z2StarZ2StarZ2),
            ),
        };
        Some(pair)
    }
}

#[derive(Args, Default)]
pub struct RunArgs {
    /// Bundled presentation name (z2, a2, k1..k3, bs12..bs35, f1..f3,
    /// basilica1..basilica3) or a path to a presentation file
    #[arg(long)]
    pub presentation: Option<String>,
    /// Settings file with `key = value` lines; flags given here override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exponent α in the target weight (|w|+1)^(1+α) β^|w|
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Probability that a proposal is a conjugation rather than an insertion
    #[arg(long)]
    pub pc: Option<f64>,
    /// Explicit comma-separated β ladder (instead of the linear grid)
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["beta_min", "beta_max", "beta_count"])]
    pub betas: Option<Vec<f64>>,
    /// Smallest β of the linear grid
    #[arg(long)]
    pub beta_min: Option<f64>,
    /// Largest β of the linear grid
    #[arg(long)]
    pub beta_max: Option<f64>,
    /// Number of β values in the linear grid
    #[arg(long)]
    pub beta_count: Option<usize>,
    /// Recorded elementary moves per chain
    #[arg(long)]
    pub steps: Option<u64>,
    /// Moves between replica-exchange rounds
    #[arg(long)]
    pub swap_interval: Option<u64>,
    /// Number of blocks in the blocked error estimate
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Unrecorded moves per chain before measurement begins
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Master seed; every stream in the run is derived from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for results.csv, blocks.csv and plot.py
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exact series drawn over the sampled means by the plot script
    #[arg(long, value_enum)]
    pub overlay: Option<Overlay>,
    /// Let the chain visit the empty word (excluded by default)
    #[arg(long)]
    pub allow_empty: bool,
}

/// Fully resolved inputs of one sampling run.
#[derive(Debug)]
pub struct RunSettings {
    pub presentation_label: String,
    pub presentation_text: String,
    presentation: Presentation,
    pub alpha: f64,
    pub conjugation_probability: f64,
    pub betas: Vec<f64>,
    pub steps: u64,
    pub swap_interval: u64,
    pub blocks: usize,
    pub burn_in: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub overlay: Overlay,
    pub avoid_empty: bool,
}

impl RunSettings {
    /// Default-shaped settings for a bundled presentation; callers adjust
    /// fields afterwards. Panics when the name is not bundled.
    pub fn for_bundled(name: &str, betas: Vec<f64>, steps: u64, out_dir: PathBuf) -> Self {
        let source = bundled_source(name).expect("bundled presentation name");
        RunSettings {
            presentation_label: name.to_string(),
            presentation_text: source.to_string(),
            presentation: bundled(name).expect("bundled presentation name"),
            alpha: DEFAULT_ALPHA,
            conjugation_probability: DEFAULT_PC,
            betas,
            steps,
            swap_interval: DEFAULT_SWAP_INTERVAL,
            blocks: DEFAULT_BLOCKS,
            burn_in: DEFAULT_BURN_IN,
            seed: DEFAULT_SEED,
            out_dir,
            overlay: Overlay::None,
            avoid_empty: true,
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn tempering_config(&self) -> TemperingConfig {
        TemperingConfig {
            betas: self.betas.clone(),
            alpha: self.alpha,
            conjugation_probability: self.conjugation_probability,
            steps_per_chain: self.steps,
            swap_interval: self.swap_interval,
            block_count: self.blocks,
            burn_in: self.burn_in,
            seed: self.seed,
            avoid_empty: self.avoid_empty,
        }
    }
}

/// Keys accepted in a settings file; they mirror the long flag names.
const KNOWN_KEYS: &[&str] = &[
    "presentation",
    "alpha",
    "pc",
    "betas",
    "beta-min",
    "beta-max",
    "beta-count",
    "steps",
    "swap-interval",
    "blocks",
    "burn-in",
    "seed",
    "out",
    "overlay",
    "allow-empty",
];

fn parse_settings_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|err| {
        CliError::Config(format!("cannot read settings file {}: {err}", path.display()))
    })?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                idx + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "{}:{}: unknown setting `{key}`",
                path.display(),
                idx + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn file_value<T: FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|err| CliError::Config(format!("setting `{key}`: {err}"))),
    }
}

fn parse_beta_list(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|err| CliError::Config(format!("setting `betas`: {err}")))
        })
        .collect()
}

fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count == 0 {
        return Err(CliError::Config("beta-count must be at least 1".into()));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(CliError::Config(format!(
            "bad β grid: min {min}, max {max}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    Ok((0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect())
}

pub fn resolve_presentation(spec: &str) -> Result<(String, String, Presentation), CliError> {
    if let Some(source) = bundled_source(spec) {
        let p = bundled(spec).expect("bundled source implies bundled presentation");
        return Ok((spec.to_string(), source.to_string(), p));
    }
    let text = fs::read_to_string(spec).map_err(|err| {
        CliError::Config(format!(
            "`{spec}` is neither a bundled presentation nor a readable file: {err}"
        ))
    })?;
    let p = Presentation::parse(&text)
        .map_err(|err| CliError::Config(format!("{spec}: {err}")))?;
    Ok((spec.to_string(), text, p))
}

pub fn resolve_run(args: &RunArgs) -> Result<RunSettings, CliError> {
    let file = match &args.config {
        Some(path) => parse_settings_file(path)?,
        None => BTreeMap::new(),
    };

    let spec = args
        .presentation
        .clone()
        .or_else(|| file.get("presentation").cloned())
        .ok_or_else(|| {
            CliError::Config("no presentation given (flag --presentation or settings file)".into())
        })?;
    let (label, text, presentation) = resolve_presentation(&spec)?;

    let mut betas = resolve_betas(args, &file)?;
    betas.sort_by(|a, b| {
        a.partial_cmp(b)
            .expect("β values are validated as finite before sorting")
    });
    betas.dedup();

    let overlay = match &args.overlay {
        Some(o) => *o,
        None => match file.get("overlay") {
            Some(raw) => Overlay::from_str(raw, true)
                .map_err(|err| CliError::Config(format!("setting `overlay`: {err}")))?,
            None => Overlay::None,
        },
    };

    let avoid_empty = if args.allow_empty {
        false
    } else {
        !file_value::<bool>(&file, "allow-empty")?.unwrap_or(false)
    };

    let settings = RunSettings {
        presentation_label: label,
        presentation_text: text,
        presentation,
        alpha: args
            .alpha
            .map_or_else(|| file_value(&file, "alpha"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_ALPHA),
        conjugation_probability: args
            .pc
            .map_or_else(|| file_value(&file, "pc"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_PC),
        betas,
        steps: args
            .steps
            .map_or_else(|| file_value(&file, "steps"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_STEPS),
        swap_interval: args
            .swap_interval
            .map_or_else(|| file_value(&file, "swap-interval"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_SWAP_INTERVAL),
        blocks: args
            .blocks
            .map_or_else(|| file_value(&file, "blocks"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_BLOCKS),
        burn_in: args
            .burn_in
            .map_or_else(|| file_value(&file, "burn-in"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_BURN_IN),
        seed: args
            .seed
            .map_or_else(|| file_value(&file, "seed"), |v| Ok(Some(v)))?
            .unwrap_or(DEFAULT_SEED),
        out_dir: args
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".")),
        overlay,
        avoid_empty,
    };

    for beta in &settings.betas {
        if !beta.is_finite() {
            return Err(CliError::Config(format!("β value {beta} is not finite")));
        }
    }
    Ok(settings)
}

/// An explicit list beats the grid; within each source, flags beat the
/// settings file. Mixing a flag list with file grid keys (or vice versa)
/// resolves in favour of the flags.
fn resolve_betas(
    args: &RunArgs,
    file: &BTreeMap<String, String>,
) -> Result<Vec<f64>, CliError> {
    if let Some(list) = &args.betas {
        return Ok(list.clone());
    }
    let grid_flag_given =
        args.beta_min.is_some() || args.beta_max.is_some() || args.beta_count.is_some();
    let min = match args.beta_min {
        Some(v) => v,
        None => file_value(file, "beta-min")?.unwrap_or(DEFAULT_BETA_MIN),
    };
    let max = match args.beta_max {
        Some(v) => v,
        None => file_value(file, "beta-max")?.unwrap_or(DEFAULT_BETA_MAX),
    };
    let count = match args.beta_count {
        Some(v) => v,
        None => file_value(file, "beta-count")?.unwrap_or(DEFAULT_BETA_COUNT),
    };
    if grid_flag_given {
        return linear_grid(min, max, count);
    }
    if let Some(raw) = file.get("betas") {
        return parse_beta_list(raw);
    }
    linear_grid(min, max, count)
}

pub fn parse_oracle(spec: &str) -> Result<WordProblemOracle, CliError> {
    let lower = spec.trim().to_ascii_lowercase();
    if lower == "free" {
        return Ok(WordProblemOracle::FreeGroup);
    }
    if let Some(rest) = lower.strip_prefix("abelian:") {
        let rank = rest
            .parse::<usize>()
            .map_err(|err| CliError::Config(format!("oracle rank: {err}")))?;
        return Ok(WordProblemOracle::FreeAbelian { rank });
    }
    if let Some(rest) = lower.strip_prefix("cyclic:") {
        let orders = rest
            .split(',')
            .map(|piece| {
                piece
                    .trim()
                    .parse::<u32>()
                    .map_err(|err| CliError::Config(format!("oracle order: {err}")))
            })
            .collect::<Result<Vec<u32>, CliError>>()?;
        return Ok(WordProblemOracle::FreeProductOfCyclics { orders });
    }
    if let Some(rest) = lower.strip_prefix("affine:") {
        let n = rest
            .parse::<u32>()
            .map_err(|err| CliError::Config(format!("oracle multiplier: {err}")))?;
        return Ok(WordProblemOracle::AffineBs1N { n });
    }
    Err(CliError::Config(format!(
        "unknown oracle `{spec}`; use free, abelian:<rank>, cyclic:<n,n,...> or affine:<n>"
    )))
}

/// The oracle matching a bundled presentation, for names whose word
/// problem one of the oracles solves.
pub fn infer_oracle(label: &str) -> Option<WordProblemOracle> {
    match label {
        "z2" => Some(WordProblemOracle::FreeAbelian { rank: 2 }),
        "a2" => Some(WordProblemOracle::FreeProductOfCyclics { orders: vec![2] }),
        "k1" => Some(WordProblemOracle::FreeProductOfCyclics { orders: vec![2, 3] }),
        "k2" => Some(WordProblemOracle::FreeProductOfCyclics { orders: vec![3, 3] }),
        "k3" => Some(WordProblemOracle::FreeProductOfCyclics {
            orders: vec![2, 2, 2],
        }),
        "bs12" => Some(WordProblemOracle::AffineBs1N { n: 2 }),
        "bs13" => Some(WordProblemOracle::AffineBs1N { n: 3 }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn defaults_fill_everything_but_the_presentation() {
        let args = RunArgs {
            presentation: Some("z2".into()),
            ..RunArgs::default()
        };
        let settings = resolve_run(&args).unwrap();
        assert_eq!(settings.alpha, DEFAULT_ALPHA);
        assert_eq!(settings.betas.len(), DEFAULT_BETA_COUNT);
        assert_eq!(settings.betas[0], DEFAULT_BETA_MIN);
        assert_eq!(settings.betas[DEFAULT_BETA_COUNT - 1], DEFAULT_BETA_MAX);
        assert_eq!(settings.steps, DEFAULT_STEPS);
        assert!(settings.avoid_empty);
        assert_eq!(settings.overlay, Overlay::None);
    }

    #[test]
    fn missing_presentation_is_a_config_error() {
        let err = resolve_run(&RunArgs::default()).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn settings_file_is_read_and_flags_override_it() {
        let file = write_temp(
            "presentation = z2\nalpha = 2.0\nsteps = 5000\nbetas = 0.3, 0.1, 0.2\n\
             overlay = z2  # trailing comment\nallow-empty = true\n",
        );
        let args = RunArgs {
            config: Some(file.path().to_path_buf()),
            alpha: Some(0.5),
            ..RunArgs::default()
        };
        let settings = resolve_run(&args).unwrap();
        assert_eq!(settings.presentation_label, "z2");
        assert_eq!(settings.alpha, 0.5, "flag wins over file");
        assert_eq!(settings.steps, 5000);
        assert_eq!(settings.betas, vec![0.1, 0.2, 0.3], "sorted ladder");
        assert_eq!(settings.overlay, Overlay::Z2);
        assert!(!settings.avoid_empty);
    }

    #[test]
    fn unknown_settings_key_is_rejected() {
        let file = write_temp("presentation = z2\nstep = 100\n");
        let args = RunArgs {
            config: Some(file.path().to_path_buf()),
            ..RunArgs::default()
        };
        let err = resolve_run(&args).unwrap_err();
        assert!(err.to_string().contains("unknown setting"));
    }

    #[test]
    fn grid_flags_override_a_file_beta_list() {
        let file = write_temp("presentation = z2\nbetas = 0.1, 0.2\n");
        let args = RunArgs {
            config: Some(file.path().to_path_buf()),
            beta_min: Some(0.1),
            beta_max: Some(0.3),
            beta_count: Some(3),
            ..RunArgs::default()
        };
        let settings = resolve_run(&args).unwrap();
        assert_eq!(settings.betas, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn single_point_grid_is_allowed() {
        assert_eq!(linear_grid(0.25, 0.30, 1).unwrap(), vec![0.25]);
        assert!(linear_grid(0.3, 0.1, 5).is_err());
        assert!(linear_grid(0.1, 0.3, 0).is_err());
    }

    #[test]
    fn oracle_specs_parse() {
        assert!(matches!(
            parse_oracle("free").unwrap(),
            WordProblemOracle::FreeGroup
        ));
        assert!(matches!(
            parse_oracle("abelian:2").unwrap(),
            WordProblemOracle::FreeAbelian { rank: 2 }
        ));
        match parse_oracle("cyclic:2,3").unwrap() {
            WordProblemOracle::FreeProductOfCyclics { orders } => {
                assert_eq!(orders, vec![2, 3]);
            }
            other => panic!("unexpected oracle {other:?}"),
        }
        assert!(matches!(
            parse_oracle("affine:2").unwrap(),
            WordProblemOracle::AffineBs1N { n: 2 }
        ));
        assert!(parse_oracle("noidea:7").is_err());
    }

    #[test]
    fn bundled_names_infer_their_oracle() {
        assert!(infer_oracle("z2").is_some());
        assert!(infer_oracle("bs13").is_some());
        assert!(infer_oracle("f1").is_none(), "no oracle for Thompson F");
    }

    #[test]
    fn file_presentations_load_from_disk() {
        let file = write_temp("gens: a b\nrel: [a, b]\n");
        let path = file.path().to_string_lossy().into_owned();
        let (label, text, p) = resolve_presentation(&path).unwrap();
        assert_eq!(label, path);
        assert!(text.contains("gens"));
        assert_eq!(p.generator_count(), 2);
        assert!(resolve_presentation("no-such-presentation").is_err());
    }
}
