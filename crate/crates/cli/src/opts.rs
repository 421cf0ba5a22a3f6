use clap::Args;
use fracnir::degree::{CriticalPointModel, ModelK};
use fracnir::sphere::SpectralSnapshot;
use serde::Deserialize;
use std::path::PathBuf;

/// Options shared by every subcommand. Values from `--config` take
/// precedence over flags.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Opts {
    /// Sphere dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Order of the operator, in (0, 1).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Band limit.
    #[arg(long)]
    pub lmax: Option<usize>,
    /// Quadrature grid as POLARxAZIMUTHAL, e.g. 128x256.
    #[arg(long)]
    pub grid: Option<String>,
    /// JSON file whose keys override the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Curvature: const, tilt, even-band, harmonics or model.
    #[arg(long)]
    pub k_preset: Option<String>,
    /// Amplitude for the tilt and even-band presets, or the constant value.
    #[arg(long)]
    pub k_eps: Option<f64>,
    /// JSON file with harmonic coefficients or a model curvature.
    #[arg(long)]
    pub k_file: Option<PathBuf>,
    #[arg(skip)]
    pub k_harmonics: Option<SpectralSnapshot>,
    #[arg(skip)]
    pub k_model: Option<ModelK>,
    /// JSON file with a list of critical-point models.
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(skip)]
    pub critical_points: Option<Vec<CriticalPointModel>>,

    #[arg(long)]
    pub kmax: Option<usize>,
    /// Number of random fields.
    #[arg(long)]
    pub fields: Option<usize>,
    /// Band limit of random test fields.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub triples: Option<usize>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    /// Centre of the test bubbles.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,

    /// Subcritical exponent for the solver, or the power of the slice for
    /// the Aubin explorers.
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated exponents for continuation.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    /// none or antipodal.
    #[arg(long)]
    pub symmetry: Option<String>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Radius of the evaluation sphere in the ball.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub subdivisions: Option<usize>,
    /// area or preimage.
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated dilations.
    #[arg(long, value_delimiter = ',')]
    pub t_schedule: Option<Vec<f64>>,
    /// Number of random poles added to the coordinate axes.
    #[arg(long)]
    pub poles: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f; })*
    };
}

impl Opts {
    /// Fields present in `cfg` replace those given on the command line.
    pub fn overlay(mut self, cfg: Opts) -> Opts {
        overlay!(self, cfg; n, sigma, lmax, grid, out, seed, k_preset, k_eps, k_file, k_harmonics, k_model,
            models, critical_points, kmax, fields, degree, triples, tmax, beta, betas, center, p, schedule,
            symmetry, max_iter, tol, samples, eps, a, iterations, s, subdivisions, method, t_schedule, poles);
        self
    }
}
