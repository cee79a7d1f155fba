//! Job configuration: a flat TOML document with strictly known keys.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use kprab::kspecial::{HilferParams, PrabhakarParams, SeriesControl};
use kprab::transforms::{OperatorKind, TransformKind};
use kprab::verify::{IdentityId, TestFunction};
use kprab::{Control, Hilfer, Params};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Eval,
    Apply,
    Transform,
    SolveRelaxation,
    SolveDiffusion,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Apply => "apply",
            Command::Transform => "transform",
            Command::SolveRelaxation => "solve-relaxation",
            Command::SolveDiffusion => "solve-diffusion",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "eval" => Command::Eval,
            "apply" => Command::Apply,
            "transform" => Command::Transform,
            "solve-relaxation" => Command::SolveRelaxation,
            "solve-diffusion" => Command::SolveDiffusion,
            "verify" => Command::Verify,
            other => return Err(CliError::Config(format!("unknown command `{other}`"))),
        })
    }
}

/// A number or a comma-separated list of numbers.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Numbers {
    One(f64),
    List(String),
}

impl Numbers {
    fn values(&self, key: &str) -> CliResult<Vec<f64>> {
        match self {
            Numbers::One(x) => Ok(vec![*x]),
            Numbers::List(s) => parse_list(s, key),
        }
    }
}

fn parse_list(s: &str, key: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{key}`: `{t}` is not a number")))
        })
        .collect()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    command: Option<String>,
    k: Option<f64>,
    alpha: Option<f64>,
    mu: Option<f64>,
    gamma: Option<f64>,
    omega: Option<f64>,
    nu: Option<f64>,
    grid_n: Option<usize>,
    t_end: Option<f64>,
    rel_tol: Option<f64>,
    max_terms: Option<usize>,
    // eval
    function: Option<String>,
    z: Option<Numbers>,
    // apply / transform
    operator: Option<String>,
    input: Option<PathBuf>,
    kind: Option<String>,
    u: Option<Numbers>,
    f_of_u: Option<f64>,
    initial_values: Option<String>,
    frozen_terms: Option<String>,
    // solvers
    lambda: Option<f64>,
    delta: Option<f64>,
    k_init: Option<f64>,
    forcing: Option<PathBuf>,
    residual: Option<bool>,
    k_diff: Option<f64>,
    time_points: Option<Numbers>,
    p_max: Option<f64>,
    gaussian_sigma: Option<f64>,
    x_max: Option<f64>,
    // verify
    identities: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalFunction {
    MittagLeffler,
    Kernel,
    KGamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyOperator {
    Integral,
    RlIntegral,
    Derivative,
    RegularizedDerivative,
    Hilfer,
    RegularizedHilfer,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operand {
    File(PathBuf),
    Builtin { function: TestFunction, t_end: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformTarget {
    Kernel,
    Operator {
        op: OperatorKind,
        f_of_u: f64,
        initial_values: Vec<f64>,
        frozen_terms: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    File(PathBuf),
    Gaussian { sigma: f64, x_max: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Eval {
        function: EvalFunction,
        params: Option<Params>,
        k: f64,
        z: Vec<f64>,
    },
    Apply {
        operator: ApplyOperator,
        params: Params,
        nu: Option<f64>,
        operand: Operand,
    },
    Transform {
        kind: TransformKind,
        params: Params,
        nu: Option<f64>,
        u: Vec<f64>,
        target: TransformTarget,
    },
    SolveRelaxation {
        hp: Hilfer,
        lambda: f64,
        delta: f64,
        k_init: f64,
        t_end: f64,
        forcing: Option<PathBuf>,
        residual: bool,
    },
    SolveDiffusion {
        hp: Hilfer,
        k_diff: f64,
        profile: Profile,
        time_points: Vec<f64>,
        p_max: f64,
        residual: bool,
    },
    Verify {
        identities: Option<Vec<IdentityId>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub job: Job,
    /// Grid cells; `None` leaves the per-command default.
    pub grid_n: Option<usize>,
    pub ctrl: Control,
}

fn need<T>(v: Option<T>, key: &str, cmd: Command) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("missing key `{key}` (required by {})", cmd.name())))
}

/// Resolves `p` against the config directory and checks that it exists.
fn resolve(base: &Path, p: PathBuf) -> CliResult<PathBuf> {
    let p = if p.is_absolute() { p } else { base.join(p) };
    if !p.is_file() {
        return Err(CliError::Config(format!("input file {} does not exist", p.display())));
    }
    Ok(p)
}

fn named<T: for<'de> Deserialize<'de>>(name: &str, key: &str) -> CliResult<T> {
    T::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(name))
        .map_err(|_| CliError::Config(format!("`{key}`: unknown value `{name}`")))
}

impl Raw {
    fn params(&self, cmd: Command) -> CliResult<Params> {
        Ok(PrabhakarParams::new(
            need(self.k, "k", cmd)?,
            need(self.alpha, "alpha", cmd)?,
            need(self.mu, "mu", cmd)?,
            need(self.gamma, "gamma", cmd)?,
            need(self.omega, "omega", cmd)?,
        )?)
    }

    fn hilfer(&self, cmd: Command) -> CliResult<Hilfer> {
        Ok(HilferParams::new(self.params(cmd)?, need(self.nu, "nu", cmd)?)?)
    }

    fn check_nu(&self) -> CliResult<()> {
        if let Some(nu) = self.nu {
            if !(0.0..=1.0).contains(&nu) {
                return Err(kprab::Error::Domain {
                    param: "nu".into(),
                    message: "must be in [0,1]".into(),
                }
                .into());
            }
        }
        Ok(())
    }
}

/// Parse and validate a configuration. `expected`, when given, is the
/// subcommand the document is run under; a `command` key must agree with it.
/// Relative paths resolve against `base`.
pub fn parse_config(source: &str, expected: Option<Command>, base: &Path) -> CliResult<JobConfig> {
    let raw: Raw = toml::from_str(source).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    let command = match (&raw.command, expected) {
        (Some(c), None) => c.parse()?,
        (Some(c), Some(e)) => {
            let c: Command = c.parse()?;
            if c != e {
                return Err(CliError::Config(format!(
                    "config is for `{}` but was run as `{}`",
                    c.name(),
                    e.name()
                )));
            }
            c
        }
        (None, Some(e)) => e,
        (None, None) => return Err(CliError::Config("missing key `command`".into())),
    };
    raw.check_nu()?;
    let mut ctrl = SeriesControl::default();
    if let Some(t) = raw.rel_tol {
        ctrl.rel_tol = t;
    }
    if let Some(m) = raw.max_terms {
        ctrl.max_terms = m;
    }
    ctrl.validate()?;
    if let Some(n) = raw.grid_n {
        if n < 4 {
            return Err(CliError::Config("`grid_n` must be >= 4".into()));
        }
    }
    let cmd = command;
    let job = match cmd {
        Command::Eval => {
            let function = match raw.function.as_deref().unwrap_or("ml") {
                "ml" => EvalFunction::MittagLeffler,
                "kernel" => EvalFunction::Kernel,
                "k_gamma" => EvalFunction::KGamma,
                other => return Err(CliError::Config(format!("`function`: unknown value `{other}`"))),
            };
            let z = need(raw.z.as_ref(), "z", cmd)?.values("z")?;
            match function {
                EvalFunction::KGamma => {
                    let k = need(raw.k, "k", cmd)?;
                    if k.is_nan() || k <= 0.0 {
                        return Err(kprab::Error::Domain {
                            param: "k".into(),
                            message: "must be > 0".into(),
                        }
                        .into());
                    }
                    Job::Eval {
                        function,
                        params: None,
                        k,
                        z,
                    }
                }
                _ => {
                    let p = raw.params(cmd)?;
                    Job::Eval {
                        function,
                        params: Some(p),
                        k: p.k,
                        z,
                    }
                }
            }
        }
        Command::Apply => {
            let operator = match need(raw.operator.as_deref(), "operator", cmd)? {
                "integral" => ApplyOperator::Integral,
                "rl_integral" => ApplyOperator::RlIntegral,
                "derivative" => ApplyOperator::Derivative,
                "regularized_derivative" => ApplyOperator::RegularizedDerivative,
                "hilfer" => ApplyOperator::Hilfer,
                "regularized_hilfer" => ApplyOperator::RegularizedHilfer,
                other => return Err(CliError::Config(format!("`operator`: unknown value `{other}`"))),
            };
            let params = raw.params(cmd)?;
            let nu = match operator {
                ApplyOperator::Hilfer | ApplyOperator::RegularizedHilfer => Some(raw.hilfer(cmd)?.nu),
                _ => None,
            };
            let operand = match (&raw.input, &raw.function) {
                (Some(p), None) => Operand::File(resolve(base, p.clone())?),
                (None, Some(name)) => Operand::Builtin {
                    function: named(name, "function")?,
                    t_end: need(raw.t_end, "t_end", cmd)?,
                },
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("give either `input` or `function`, not both".into()))
                }
                (None, None) => return Err(CliError::Config("missing key `input` or `function`".into())),
            };
            Job::Apply {
                operator,
                params,
                nu,
                operand,
            }
        }
        Command::Transform => {
            let kind = match raw.kind.as_deref().unwrap_or("laplace") {
                "laplace" => TransformKind::Laplace,
                "sumudu" => TransformKind::Sumudu,
                other => return Err(CliError::Config(format!("`kind`: unknown value `{other}`"))),
            };
            let params = raw.params(cmd)?;
            let u = need(raw.u.as_ref(), "u", cmd)?.values("u")?;
            let op = match raw.operator.as_deref().unwrap_or("kernel") {
                "kernel" => None,
                "p_integral" => Some(OperatorKind::PIntegral),
                "p_deriv" => Some(OperatorKind::PDeriv),
                "reg_p_deriv" => Some(OperatorKind::RegPDeriv),
                "hp_deriv" => Some(OperatorKind::HPDeriv),
                "reg_hp_deriv" => Some(OperatorKind::RegHPDeriv),
                other => return Err(CliError::Config(format!("`operator`: unknown value `{other}`"))),
            };
            let nu = match op {
                Some(OperatorKind::HPDeriv | OperatorKind::RegHPDeriv) => Some(raw.hilfer(cmd)?.nu),
                _ => None,
            };
            let target = match op {
                None => TransformTarget::Kernel,
                Some(op) => TransformTarget::Operator {
                    op,
                    f_of_u: need(raw.f_of_u, "f_of_u", cmd)?,
                    initial_values: raw
                        .initial_values
                        .as_deref()
                        .map(|s| parse_list(s, "initial_values"))
                        .transpose()?
                        .unwrap_or_default(),
                    frozen_terms: raw
                        .frozen_terms
                        .as_deref()
                        .map(|s| parse_list(s, "frozen_terms"))
                        .transpose()?
                        .unwrap_or_default(),
                },
            };
            Job::Transform {
                kind,
                params,
                nu,
                u,
                target,
            }
        }
        Command::SolveRelaxation => Job::SolveRelaxation {
            hp: raw.hilfer(cmd)?,
            lambda: need(raw.lambda, "lambda", cmd)?,
            delta: raw.delta.unwrap_or(0.0),
            k_init: need(raw.k_init, "k_init", cmd)?,
            t_end: need(raw.t_end, "t_end", cmd)?,
            forcing: raw.forcing.clone().map(|p| resolve(base, p)).transpose()?,
            residual: raw.residual.unwrap_or(false),
        },
        Command::SolveDiffusion => {
            let profile = match (&raw.input, raw.gaussian_sigma) {
                (Some(p), None) => Profile::File(resolve(base, p.clone())?),
                (None, Some(sigma)) => Profile::Gaussian {
                    sigma,
                    x_max: need(raw.x_max, "x_max", cmd)?,
                },
                (Some(_), Some(_)) => {
                    return Err(CliError::Config(
                        "give either `input` or `gaussian_sigma`, not both".into(),
                    ))
                }
                (None, None) => return Err(CliError::Config("missing key `input` or `gaussian_sigma`".into())),
            };
            Job::SolveDiffusion {
                hp: raw.hilfer(cmd)?,
                k_diff: need(raw.k_diff, "k_diff", cmd)?,
                profile,
                time_points: need(raw.time_points.as_ref(), "time_points", cmd)?.values("time_points")?,
                p_max: need(raw.p_max, "p_max", cmd)?,
                residual: raw.residual.unwrap_or(false),
            }
        }
        Command::Verify => Job::Verify {
            identities: raw
                .identities
                .as_deref()
                .map(|s| {
                    s.split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(|t| named::<IdentityId>(t, "identities"))
                        .collect::<CliResult<Vec<_>>>()
                })
                .transpose()?,
        },
    };
    Ok(JobConfig {
        command,
        job,
        grid_n: raw.grid_n,
        ctrl,
    })
}
