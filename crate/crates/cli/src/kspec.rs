use crate::opts::Opts;
use crate::output::ConfigError;
use fracnir::degree::ModelK;
use fracnir::presets::Preset;
use fracnir::sphere::{SpectralSnapshot, SphereFn};
use fracnir::{FracOperatorSpec, Point, SpectralField};
use std::path::Path;

/// Prescribed curvature from a preset, a harmonic expansion or a model list.
pub enum Curvature {
    Preset(Preset),
    Harmonics(SpectralField),
    Model(Box<ModelK>),
}

impl Curvature {
    pub fn is_even(&self) -> bool {
        match self {
            Curvature::Preset(p) => p.is_even(),
            Curvature::Harmonics(c) => (1..=c.lmax())
                .step_by(2)
                .all(|k| c.degree(k).iter().all(|&x| x == 0.0)),
            Curvature::Model(_) => false,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Curvature::Preset(Preset::Const { .. }))
    }
}

impl SphereFn for Curvature {
    fn value(&self, x: &Point) -> f64 {
        match self {
            Curvature::Preset(p) => p.value(x),
            Curvature::Harmonics(c) => c.value(x),
            Curvature::Model(m) => m.value(x),
        }
    }

    fn gradient(&self, x: &Point, n: usize) -> Point {
        match self {
            Curvature::Preset(p) => p.gradient(x, n),
            Curvature::Harmonics(c) => c.gradient(x, n),
            Curvature::Model(m) => m.gradient(x, n),
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub fn curvature(
    opts: &Opts,
    spec: &FracOperatorSpec,
    default: &str,
) -> Result<Curvature, ConfigError> {
    let n = spec.n;
    let name = opts.k_preset.as_deref().unwrap_or(default);
    let cfg = |e: fracnir::Error| ConfigError(e.to_string());
    Ok(match name {
        "const" => Curvature::Preset(Preset::Const {
            c: opts.k_eps.unwrap_or(1.0),
        }),
        "tilt" => Curvature::Preset(Preset::Tilt {
            n,
            eps: opts.k_eps.unwrap_or(0.1),
        }),
        "even-band" => Curvature::Preset(Preset::EvenBand {
            n,
            eps: opts.k_eps.unwrap_or(0.1),
        }),
        "harmonics" => {
            if n != 2 {
                return Err(ConfigError("harmonic curvature needs n = 2".into()));
            }
            let snap: SpectralSnapshot = match (&opts.k_harmonics, &opts.k_file) {
                (Some(s), _) => s.clone(),
                (None, Some(p)) => read_json(p)?,
                _ => {
                    return Err(ConfigError(
                        "k_preset harmonics needs k_harmonics or --k-file".into(),
                    ))
                }
            };
            Curvature::Harmonics(SpectralField::from_snapshot(&snap).map_err(cfg)?)
        }
        "model" => {
            let m: ModelK = match (&opts.k_model, &opts.k_file) {
                (Some(m), _) => m.clone(),
                (None, Some(p)) => read_json(p)?,
                _ => {
                    return Err(ConfigError(
                        "k_preset model needs k_model or --k-file".into(),
                    ))
                }
            };
            Curvature::Model(Box::new(m.prepared(spec).map_err(cfg)?))
        }
        other => return Err(ConfigError(format!("unknown curvature preset '{other}'"))),
    })
}
