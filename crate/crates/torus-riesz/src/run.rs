//! Flag resolution: command-line values win over the `--config` JSON file,
//! which wins over built-in defaults; the resolved bundle is handed to the
//! command functions.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use torus_riesz_core::asymptotics::{sphere_surface, DomainSpec};
use torus_riesz_core::dpp::{support_box, support_scaled_domain, support_shell, SpectralSupport};
use torus_riesz_core::lattice::{Lattice, NamedLattice, MAX_DIM};
use torus_riesz_core::zeta::EwaldSettings;
use torus_riesz_core::Error;

use crate::CommonArgs;

/// A command failure with its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable files, or mathematical domain violations.
    Usage(String),
    /// A numerical method gave up within its budget.
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let text = format!("{e}");
        match e {
            Error::CapExceeded { .. }
            | Error::ConvergenceFailure(_)
            | Error::DivergentSeries
            | Error::QuadratureFailure
            | Error::RejectionBudgetExceeded
            | Error::NearSingularity { .. }
            | Error::CoincidentPoints { .. } => Failure::Numeric(text),
            _ => Failure::Usage(text),
        }
    }
}

/// The `--config` file mirrors the command-line flags field by field.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lattice: Option<String>,
    lattice_file: Option<PathBuf>,
    s: Option<f64>,
    s_grid: Option<String>,
    support: Option<String>,
    #[serde(alias = "N")]
    n: Option<usize>,
    replicas: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    rel_tol: Option<f64>,
    d: Option<usize>,
    grid_count: Option<usize>,
}

/// Fully merged options; accessors apply per-command requirements.
pub struct Merged {
    lattice: Option<String>,
    lattice_file: Option<PathBuf>,
    s: Option<f64>,
    s_grid: Option<String>,
    support: Option<String>,
    n: Option<usize>,
    replicas: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    rel_tol: Option<f64>,
    pub d: Option<usize>,
    pub grid_count: Option<usize>,
}

/// Merges args with their config file and runs the command body.
pub fn with_merged<F>(args: CommonArgs, body: F) -> Result<(), Failure>
where
    F: FnOnce(&Merged) -> Result<(), Failure>,
{
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let merged = Merged {
        lattice: args.lattice.or(file.lattice),
        lattice_file: args.lattice_file.or(file.lattice_file),
        s: args.s.or(file.s),
        s_grid: args.s_grid.or(file.s_grid),
        support: args.support.or(file.support),
        n: args.n.or(file.n),
        replicas: args.replicas.or(file.replicas),
        seed: args.seed.or(file.seed),
        threads: args.threads.or(file.threads),
        out: args.out.or(file.out),
        rel_tol: args.rel_tol.or(file.rel_tol),
        d: file.d,
        grid_count: file.grid_count,
    };
    body(&merged)
}

fn named_spec(name: &str) -> Result<NamedLattice, Failure> {
    let lower = name.to_ascii_lowercase();
    Ok(match lower.as_str() {
        "hexagonal" | "hex" => NamedLattice::Hexagonal,
        "d4" => NamedLattice::D4,
        "e8" => NamedLattice::E8,
        _ => {
            let d: usize = lower
                .strip_prefix('z')
                .and_then(|rest| rest.parse().ok())
                .filter(|d| (1..=MAX_DIM).contains(d))
                .ok_or_else(|| {
                    Failure::Usage(format!(
                        "unknown lattice {name:?}; expected Z<d>, hexagonal, D4, or E8"
                    ))
                })?;
            NamedLattice::Zd(d)
        }
    })
}

fn lattice_by_name(name: &str) -> Result<Lattice, Failure> {
    // Z<d> already has covolume one, so unconditional normalization only
    // affects the other named bases.
    Ok(Lattice::named(&named_spec(name)?, true)?)
}

/// Lattice file: exactly one of "name", "basis" (rows), "gram"; an optional
/// "normalize" rescales to covolume one (default true for named lattices,
/// false otherwise).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFile {
    name: Option<String>,
    basis: Option<Vec<Vec<f64>>>,
    gram: Option<Vec<Vec<f64>>>,
    normalize: Option<bool>,
}

fn lattice_from_file(path: &Path) -> Result<Lattice, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read lattice file {}: {e}", path.display())))?;
    let spec: LatticeFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad lattice file {}: {e}", path.display())))?;
    let given = spec.name.is_some() as u8 + spec.basis.is_some() as u8 + spec.gram.is_some() as u8;
    if given != 1 {
        return Err(Failure::Usage(
            "lattice file needs exactly one of \"name\", \"basis\", \"gram\"".into(),
        ));
    }
    if let Some(name) = &spec.name {
        return Ok(Lattice::named(
            &named_spec(name)?,
            spec.normalize.unwrap_or(true),
        )?);
    }
    let lat = if let Some(rows) = &spec.basis {
        Lattice::from_generators(rows)?
    } else {
        Lattice::from_gram(spec.gram.as_ref().unwrap())?
    };
    Ok(if spec.normalize == Some(true) {
        lat.normalized_covolume()
    } else {
        lat
    })
}

impl Merged {
    pub fn lattice(&self) -> Result<Lattice, Failure> {
        match (&self.lattice, &self.lattice_file) {
            (Some(_), Some(_)) => Err(Failure::Usage(
                "--lattice and --lattice-file are mutually exclusive".into(),
            )),
            (Some(name), None) => lattice_by_name(name),
            (None, Some(path)) => lattice_from_file(path),
            (None, None) => Err(Failure::Usage(
                "a lattice is required (--lattice or --lattice-file)".into(),
            )),
        }
    }

    /// The exponent list: a single --s or an --s-grid "min,max,count".
    pub fn s_values(&self) -> Result<Vec<f64>, Failure> {
        match (self.s, &self.s_grid) {
            (Some(_), Some(_)) => Err(Failure::Usage(
                "--s and --s-grid are mutually exclusive".into(),
            )),
            (Some(s), None) => Ok(vec![s]),
            (None, Some(grid)) => parse_grid(grid),
            (None, None) => Err(Failure::Usage(
                "an exponent is required (--s or --s-grid)".into(),
            )),
        }
    }

    pub fn single_s(&self) -> Result<f64, Failure> {
        let values = self.s_values()?;
        if values.len() == 1 {
            Ok(values[0])
        } else {
            Err(Failure::Usage("this command takes a single --s".into()))
        }
    }

    pub fn support(&self, lat: &Lattice) -> Result<SpectralSupport, Failure> {
        let text = self
            .support
            .as_deref()
            .ok_or_else(|| Failure::Usage("a --support is required".into()))?;
        parse_support(text, lat, self.n)
    }

    pub fn replicas_or(&self, default: usize) -> usize {
        self.replicas.unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn threads(&self) -> Result<usize, Failure> {
        let resolved = match self.threads {
            Some(t) => t,
            None => match std::env::var("TORUS_RIESZ_THREADS") {
                Ok(text) => text.parse().map_err(|_| {
                    Failure::Usage(format!("TORUS_RIESZ_THREADS is not a thread count: {text:?}"))
                })?,
                Err(_) => 1,
            },
        };
        if resolved == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        Ok(resolved)
    }

    pub fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    pub fn ewald(&self) -> Result<EwaldSettings, Failure> {
        let mut settings = EwaldSettings::default();
        if let Some(tol) = self.rel_tol {
            settings.rel_tol = tol;
        }
        settings.validate()?;
        Ok(settings)
    }
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("bad --s-grid {text:?}; expected min,max,count"));
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count < 2 {
        return Err(Failure::Usage("--s-grid count must be at least 2".into()));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Failure::Usage("--s-grid needs finite min < max".into()));
    }
    Ok(linspace(min, max, count))
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    let step = (max - min) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { max } else { min + i as f64 * step })
        .collect()
}

fn parse_support(
    text: &str,
    lat: &Lattice,
    n_flag: Option<usize>,
) -> Result<SpectralSupport, Failure> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("bad --support {text:?}")))?;
    match kind {
        "box" => {
            let n: usize = rest
                .parse()
                .map_err(|_| Failure::Usage(format!("bad box radius in --support {text:?}")))?;
            Ok(support_box(lat, n)?)
        }
        "shell" => {
            let norm: u64 = rest
                .parse()
                .map_err(|_| Failure::Usage(format!("bad shell norm in --support {text:?}")))?;
            Ok(support_shell(lat, norm)?)
        }
        "domain" => {
            if rest != "ball" {
                return Err(Failure::Usage(format!(
                    "unsupported domain {rest:?} in --support; only \"ball\""
                )));
            }
            let n = n_flag.ok_or_else(|| {
                Failure::Usage("domain supports need a dilation count --N".into())
            })?;
            // The canonical ball: volume 1/|Λ| so that N dilations carry
            // about N dual points.
            let d = lat.dim() as f64;
            let unit_ball = sphere_surface(lat.dim()) / d;
            let radius = (1.0 / (lat.covolume() * unit_ball)).powf(1.0 / d);
            let ball = DomainSpec::ball(radius)?;
            Ok(support_scaled_domain(lat, &ball, n)?)
        }
        "coeffs" => {
            let mut vectors = Vec::new();
            for part in rest.split('/') {
                let coeffs: Result<Vec<i64>, _> =
                    part.split(',').map(|c| c.trim().parse::<i64>()).collect();
                vectors.push(coeffs.map_err(|_| {
                    Failure::Usage(format!("bad coefficient vector {part:?} in --support"))
                })?);
            }
            Ok(SpectralSupport::new(lat.clone(), &vectors)?)
        }
        _ => Err(Failure::Usage(format!(
            "unknown support kind {kind:?}; expected box, shell, domain, coeffs"
        ))),
    }
}
