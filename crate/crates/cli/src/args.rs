use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "gperiods", version, about = "Gaussian periods, supercharacters and ray class field periods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Gaussian periods η_{n,ω}(k) for k = 0..n−1.
    Gauss(GaussArgs),
    /// Cyclic supercharacter values θ_{n,m,A}(x) over (Z/nZ)^m.
    Superchar(SupercharArgs),
    /// Sampled image of the Laurent polynomial g_d on the torus.
    #[command(alias = "gd-image")]
    Gd(GdArgs),
    /// Exact and numeric Weyl sums; prints a JSON report.
    #[command(alias = "weyl-check")]
    Weyl(WeylArgs),
    /// Ray class field periods over the m-torsion of a CM curve.
    Rcfp(RcfpArgs),
    /// ℘ or ℘′ at every nonzero m-torsion point.
    Torsion(TorsionArgs),
    /// Search GL_m(Z/nZ) for an element of exact order d.
    FindElement(FindElementArgs),
    /// Re-run the configuration stored in a meta.json.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Png,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["csv", "png"])]
    pub formats: Vec<Format>,
    #[arg(long, default_value_t = 1024)]
    pub width: u32,
    #[arg(long, default_value_t = 1024)]
    pub height: u32,
    /// Disc radius in pixels for a point of unit size.
    #[arg(long, default_value_t = 1.0)]
    pub point_radius: f64,
    /// Also write frames/ with cumulative batches of this many points.
    #[arg(long)]
    pub frames: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GaussArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub omega: u64,
    #[arg(long, default_value_t = 1)]
    pub color_mod: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SupercharArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: usize,
    /// Row-major entries, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub matrix: Vec<i64>,
    #[arg(long, default_value_t = 1)]
    pub color_mod: u64,
    /// Cap on n^m.
    #[arg(long, default_value_t = gauss_periods::periods::SUPERCHAR_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GdArgs {
    #[arg(long)]
    pub d: u64,
    /// Grid samples per torus coordinate.
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on samples^φ(d).
    #[arg(long, default_value_t = 4_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeylArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub m: usize,
    /// Integer lift of A, row-major.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub matrix: Vec<i64>,
    /// Coefficients v_0, …, v_{s−1}.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub v: Vec<i64>,
    #[arg(long, default_value_t = gauss_periods::weyl::WEYL_BUDGET)]
    pub budget: u64,
    /// Optional directory for report.json and meta.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RcfpArgs {
    /// Squarefree d of the field Q(√−d).
    #[arg(long)]
    pub field: u64,
    #[arg(long)]
    pub modulus: u64,
    /// The element a + bα as "a,b".
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub element: Vec<i64>,
    #[arg(long, default_value_t = 1)]
    pub color_mod: u64,
    /// Map values into the unit disc with w/(|w| + (m²)^e).
    #[arg(long)]
    pub rescale: bool,
    #[arg(long, default_value_t = 0.25)]
    pub rescale_exponent: f64,
    /// Sum Weber coordinates instead of ℘ values.
    #[arg(long)]
    pub weber: bool,
    /// Lattice-sum tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Cap on m².
    #[arg(long, default_value_t = gauss_periods::cm::TORSION_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Coord {
    X,
    Y,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TorsionArgs {
    #[arg(long)]
    pub field: u64,
    #[arg(long)]
    pub modulus: u64,
    #[arg(long, value_enum, default_value_t = Coord::X)]
    pub coord: Coord,
    #[arg(long, default_value_t = 1)]
    pub color_mod: u64,
    #[arg(long, default_value_t = 8.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long)]
    pub rescale: bool,
    #[arg(long, default_value_t = 0.25)]
    pub rescale_exponent: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = gauss_periods::cm::TORSION_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FindElementArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Require Φ_d(A) ≡ 0 as well as exact order d.
    #[arg(long)]
    pub vanish: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random candidates tried.
    #[arg(long, default_value_t = gauss_periods::modring::SEARCH_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ReplayArgs {
    /// A meta.json written by an earlier run.
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}
