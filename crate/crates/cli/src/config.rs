//! Experiment configuration and its flat `key=value` text form.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use randseries::bits::FileMode;
use randseries::CoefficientSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rademacher,
    Fourier,
    Brownian,
    Normals,
    Encode,
    Oscillation,
    Verify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Rademacher,
        Command::Fourier,
        Command::Brownian,
        Command::Normals,
        Command::Encode,
        Command::Oscillation,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Rademacher => "rademacher",
            Command::Fourier => "fourier",
            Command::Brownian => "brownian",
            Command::Normals => "normals",
            Command::Encode => "encode",
            Command::Oscillation => "oscillation",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| anyhow!("unknown subcommand `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Suite {
    Kolmogorov,
    PaleyZygmund,
    Supnorm,
    Brownian,
    Divergence,
    Fejer,
    #[default]
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Kolmogorov,
        Suite::PaleyZygmund,
        Suite::Supnorm,
        Suite::Brownian,
        Suite::Divergence,
        Suite::Fejer,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kolmogorov => "kolmogorov",
            Suite::PaleyZygmund => "paley-zygmund",
            Suite::Supnorm => "supnorm",
            Suite::Brownian => "brownian",
            Suite::Divergence => "divergence",
            Suite::Fejer => "fejer",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| anyhow!("unknown suite `{s}`"))
    }
}

/// A named coefficient family.
///
/// Text forms: `zero`, `harmonic-root`, `power:P`, `geometric:R`,
/// `constant:C`, `file:PATH`. A coefficient file holds one real per line
/// (blank lines and `#` comments skipped); line i is u_i, starting at u_1.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Zero,
    HarmonicRoot,
    Power(f64),
    Geometric(f64),
    Constant(f64),
    File(PathBuf),
}

impl Family {
    pub fn build(&self) -> Result<CoefficientSequence> {
        Ok(match self {
            Family::Zero => CoefficientSequence::zero(),
            Family::HarmonicRoot => CoefficientSequence::harmonic_root(),
            Family::Power(p) => CoefficientSequence::power(*p),
            Family::Geometric(r) => CoefficientSequence::geometric(*r),
            Family::Constant(c) => CoefficientSequence::constant(*c),
            Family::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading coefficients from {}", path.display()))?;
                let mut values = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let v: f64 = line
                        .parse()
                        .with_context(|| format!("{}:{}: not a number", path.display(), i + 1))?;
                    values.push(v);
                }
                CoefficientSequence::from_values(format!("file:{}", path.display()), values, 1)
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Zero => f.write_str("zero"),
            Family::HarmonicRoot => f.write_str("harmonic-root"),
            Family::Power(p) => write!(f, "power:{p}"),
            Family::Geometric(r) => write!(f, "geometric:{r}"),
            Family::Constant(c) => write!(f, "constant:{c}"),
            Family::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for Family {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let real = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| anyhow!("family `{name}` needs a parameter, e.g. `{name}:1`"))?;
            let v: f64 = a.parse().with_context(|| format!("bad parameter `{a}` for `{name}`"))?;
            if !v.is_finite() {
                bail!("parameter for `{name}` must be finite");
            }
            Ok(v)
        };
        Ok(match name {
            "zero" => Family::Zero,
            "harmonic-root" => Family::HarmonicRoot,
            "power" => Family::Power(real(arg)?),
            "geometric" => Family::Geometric(real(arg)?),
            "constant" => Family::Constant(real(arg)?),
            "file" => Family::File(PathBuf::from(arg.ok_or_else(|| anyhow!("`file` needs a path"))?)),
            _ => bail!("unknown coefficient family `{s}`"),
        })
    }
}

fn parse_mode(s: &str) -> Result<FileMode> {
    match s {
        "raw" => Ok(FileMode::Raw),
        "ascii" => Ok(FileMode::Ascii),
        _ => bail!("bits mode must be `raw` or `ascii`, got `{s}`"),
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub family: Family,
    pub phases: Family,
    pub seed: Option<u64>,
    pub bits_file: Option<PathBuf>,
    pub bits_mode: FileMode,
    pub precision: u32,
    pub terms: u64,
    pub grid: usize,
    /// Code length for `encode`.
    pub n: usize,
    /// Code lengths for `oscillation`.
    pub ns: Vec<usize>,
    pub suite: Suite,
    pub trials: u64,
    pub seed_base: u64,
    pub sequential: bool,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            family: Family::Power(1.0),
            phases: Family::Zero,
            seed: None,
            bits_file: None,
            bits_mode: FileMode::Raw,
            precision: 53,
            terms: 1024,
            grid: 257,
            n: 64,
            ns: vec![16, 64, 256],
            suite: Suite::All,
            trials: 100,
            seed_base: 0,
            sequential: false,
            out: None,
            plot: None,
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let field = || format!("config.{key}");
        let num = |v: &str| -> Result<u64> { v.parse().with_context(field) };
        match key {
            "command" => self.command = value.parse().with_context(field)?,
            "family" => self.family = value.parse().with_context(field)?,
            "phases" => self.phases = value.parse().with_context(field)?,
            "seed" => self.seed = Some(num(value)?),
            "bits_file" => self.bits_file = Some(PathBuf::from(value)),
            "bits_mode" => self.bits_mode = parse_mode(value).with_context(field)?,
            "precision" => self.precision = value.parse().with_context(field)?,
            "terms" => self.terms = num(value)?,
            "grid" => self.grid = value.parse().with_context(field)?,
            "n" => self.n = value.parse().with_context(field)?,
            "ns" => {
                self.ns = value
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .with_context(field)?
            }
            "suite" => self.suite = value.parse().with_context(field)?,
            "trials" => self.trials = num(value)?,
            "seed_base" => self.seed_base = num(value)?,
            "sequential" => self.sequential = value.parse().with_context(field)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "plot" => self.plot = Some(PathBuf::from(value)),
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// Parses the text form. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
            entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let command = entries
            .iter()
            .find(|(_, k, _)| k == "command")
            .ok_or_else(|| anyhow!("config.command is missing"))?
            .2
            .parse()?;
        let mut cfg = Self::new(command);
        for (line, k, v) in &entries {
            cfg.set(k, v).with_context(|| format!("line {line}"))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Every field as `(key, value)`, unset options omitted.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("command", self.command.to_string()),
            ("family", self.family.to_string()),
            ("phases", self.phases.to_string()),
        ];
        if let Some(s) = self.seed {
            e.push(("seed", s.to_string()));
        }
        if let Some(p) = &self.bits_file {
            e.push(("bits_file", p.display().to_string()));
        }
        e.extend([
            ("bits_mode", self.bits_mode.to_string()),
            ("precision", self.precision.to_string()),
            ("terms", self.terms.to_string()),
            ("grid", self.grid.to_string()),
            ("n", self.n.to_string()),
            (
                "ns",
                self.ns.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            ),
            ("suite", self.suite.to_string()),
            ("trials", self.trials.to_string()),
            ("seed_base", self.seed_base.to_string()),
            ("sequential", self.sequential.to_string()),
        ]);
        if let Some(p) = &self.out {
            e.push(("out", p.display().to_string()));
        }
        if let Some(p) = &self.plot {
            e.push(("plot", p.display().to_string()));
        }
        e
    }

    pub fn serialize(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Checks ranges and references; every problem is reported with its
    /// field path.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.seed.is_some() && self.bits_file.is_some() {
            errs.push("config.seed, config.bits_file: give one bit source, not both".to_string());
        }
        if let Some(p) = &self.bits_file {
            if !p.is_file() {
                errs.push(format!("config.bits_file: {} does not exist", p.display()));
            }
        }
        for (key, fam) in [("family", &self.family), ("phases", &self.phases)] {
            if let Family::File(p) = fam {
                if !p.is_file() {
                    errs.push(format!("config.{key}: {} does not exist", p.display()));
                }
            }
        }
        if self.precision == 0 || self.precision > randseries::gaussian::MAX_PRECISION {
            errs.push(format!(
                "config.precision: must be in 1..={}, got {}",
                randseries::gaussian::MAX_PRECISION,
                self.precision
            ));
        }
        if self.terms == 0 && self.command != Command::Verify {
            errs.push("config.terms: must be positive".into());
        }
        if self.command == Command::Fourier && self.grid < 2 {
            errs.push("config.grid: need at least 2 points".into());
        }
        if self.n == 0 {
            errs.push("config.n: must be positive".into());
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            errs.push("config.ns: need a non-empty list of positive lengths".into());
        }
        if self.trials == 0 {
            errs.push("config.trials: must be positive".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            bail!("invalid configuration:\n  {}", errs.join("\n  "))
        }
    }
}
