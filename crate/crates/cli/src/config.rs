use std::path::{Path, PathBuf};

use anisoframe::interpolation::SplitFamily;
use anisoframe::rnla::{BetaSide, Oracle};
use anisoframe::spaces::ext_real_serde as ext_real;
use anisoframe::SpaceParams;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every experiment parameter. A JSON config file supplies any subset of the
/// fields; flags override it; unspecified fields keep these defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Grid size of the frame.
    pub n: usize,
    pub j_max: u32,
    pub window_order: u32,
    /// Random inputs for the round-trip check.
    pub samples: usize,
    /// Frequency cutoff of the random band-limited inputs.
    pub cutoff: usize,
    pub s1: f64,
    pub p1: f64,
    #[serde(with = "ext_real")]
    pub q1: f64,
    pub s2: f64,
    pub p2: f64,
    #[serde(with = "ext_real")]
    pub q2: f64,
    /// Corpus size; each subcommand has its own default.
    pub corpus: Option<usize>,
    /// Largest index set or support drawn for a corpus element; each
    /// subcommand has its own default.
    pub max_size: Option<usize>,
    /// Finest scale of random index sets.
    pub corpus_j_max: u32,
    /// Side of the translate window of random index sets.
    pub side: i64,
    /// Sample points per index set for the pointwise cube bounds.
    pub points: usize,
    pub gammas: Vec<f64>,
    pub xi: f64,
    #[serde(with = "ext_real")]
    pub mu: f64,
    pub beta_side: BetaSide,
    pub oracle: Oracle,
    /// Measure exponent for the Lorentz norm in `norms`; defaults to alpha.
    pub beta: Option<f64>,
    /// Midpoint grid side for the f-norm in `norms`; `None` integrates exactly.
    pub tl_grid: Option<usize>,
    /// Above this many entries `norms` uses a 1024 x 1024 grid unless
    /// `tl_grid` is given.
    pub overlay_limit: usize,
    pub xi0: f64,
    pub xi1: f64,
    pub theta: f64,
    #[serde(with = "ext_real")]
    pub mu0: f64,
    #[serde(with = "ext_real")]
    pub mu1: f64,
    pub family: SplitFamily,
    pub width_limit: f64,
    pub budgets: Vec<usize>,
    pub parseval_tolerance: f64,
    pub round_trip_tolerance: f64,
    pub exact_tolerance: f64,
    /// Allowed relative widening of a calibrated band on held-out data.
    pub drift: f64,
    pub input: Option<PathBuf>,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            subcommand: String::new(),
            out_dir: PathBuf::from("out"),
            seed: 7,
            n: 256,
            j_max: 3,
            window_order: 3,
            samples: 100,
            cutoff: 96,
            s1: 0.0,
            p1: 1.0,
            q1: 1.0,
            s2: 0.5,
            p2: 2.0,
            q2: 2.0,
            corpus: None,
            max_size: None,
            corpus_j_max: 4,
            side: 8,
            points: 1000,
            gammas: vec![0.2, 0.6],
            xi: 0.5,
            mu: 1.0,
            beta_side: BetaSide::Exact,
            oracle: Oracle::Exact,
            beta: None,
            tl_grid: None,
            overlay_limit: 50_000,
            xi0: 0.25,
            xi1: 1.0,
            theta: 0.4,
            mu0: 1.0,
            mu1: 1.0,
            family: SplitFamily::Threshold,
            width_limit: 10.0,
            budgets: (5..=13).map(|k| 1usize << k).collect(),
            parseval_tolerance: 1e-10,
            round_trip_tolerance: 1e-8,
            exact_tolerance: 1e-10,
            drift: 0.10,
            input: None,
            svg: false,
        }
    }
}

fn ext(s: &str) -> Result<f64, String> {
    anisoframe::spaces::parse_ext_real(s)
}

/// Flags shared by all subcommands; each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "jmax")]
    pub j_max: Option<u32>,
    #[arg(long)]
    pub window_order: Option<u32>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub s1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p1: Option<f64>,
    #[arg(long, value_parser = ext)]
    pub q1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p2: Option<f64>,
    #[arg(long, value_parser = ext)]
    pub q2: Option<f64>,
    #[arg(long)]
    pub corpus: Option<usize>,
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub corpus_jmax: Option<u32>,
    #[arg(long)]
    pub side: Option<i64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, value_parser = ext)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = parse_beta_side)]
    pub beta_side: Option<BetaSide>,
    #[arg(long)]
    pub oracle: Option<Oracle>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub tl_grid: Option<usize>,
    #[arg(long)]
    pub overlay_limit: Option<usize>,
    #[arg(long)]
    pub xi0: Option<f64>,
    #[arg(long)]
    pub xi1: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = ext)]
    pub mu0: Option<f64>,
    #[arg(long, value_parser = ext)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub family: Option<SplitFamily>,
    #[arg(long)]
    pub width_limit: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<usize>>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub drift: Option<f64>,
    /// Input file: PGM or CSV image for `transform`, coefficient file for
    /// `norms` and `rnla`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

fn parse_beta_side(s: &str) -> Result<BetaSide, String> {
    match s {
        "jackson" => Ok(BetaSide::Jackson),
        "bernstein" => Ok(BetaSide::Bernstein),
        "exact" => Ok(BetaSide::Exact),
        other => Err(format!("`{other}` is not one of jackson, bernstein, exact")),
    }
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),*) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(ExperimentConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides, seed: Option<u64>) {
        apply!(self, o; n, j_max, window_order, samples, cutoff, s1, p1, q1, s2, p2, q2, side, points,
            gammas, xi, mu, beta_side, oracle, overlay_limit, xi0, xi1, theta, mu0, mu1, family, width_limit, budgets, drift);
        if let Some(v) = o.corpus_jmax {
            self.corpus_j_max = v;
        }
        if o.corpus.is_some() {
            self.corpus = o.corpus;
        }
        if o.max_size.is_some() {
            self.max_size = o.max_size;
        }
        if o.beta.is_some() {
            self.beta = o.beta;
        }
        if o.tl_grid.is_some() {
            self.tl_grid = o.tl_grid;
        }
        if let Some(t) = o.tolerance {
            self.round_trip_tolerance = t;
        }
        if o.input.is_some() {
            self.input = o.input.clone();
        }
        self.svg |= o.svg;
        if let Some(s) = seed {
            self.seed = s;
        }
    }

    pub fn par1(&self) -> Result<SpaceParams, CliError> {
        Ok(SpaceParams::new(self.s1, self.p1, self.q1)?)
    }

    pub fn par2(&self) -> Result<SpaceParams, CliError> {
        Ok(SpaceParams::new(self.s2, self.p2, self.q2)?)
    }

    pub fn corpus_or(&self, default: usize) -> usize {
        self.corpus.unwrap_or(default)
    }

    pub fn max_size_or(&self, default: usize) -> usize {
        self.max_size.unwrap_or(default)
    }

    pub fn input(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("`{}` needs --input", self.subcommand)))
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        self.par1()?;
        self.par2()?;
        if self.tl_grid == Some(0) {
            return Err(CliError::Config("tl_grid must be positive".into()));
        }
        if self.max_size == Some(0) {
            return Err(CliError::Config("max_size must be positive".into()));
        }
        if self.side <= 0 {
            return Err(CliError::Config("side must be positive".into()));
        }
        for (name, v) in [
            ("parseval_tolerance", self.parseval_tolerance),
            ("round_trip_tolerance", self.round_trip_tolerance),
            ("exact_tolerance", self.exact_tolerance),
            ("drift", self.drift),
            ("width_limit", self.width_limit),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        Ok(())
    }
}
