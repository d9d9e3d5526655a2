//! Run configuration: `key = value` text with `#` comments, plus
//! command-line `--key value` overrides that win over the file.
//!
//! A key prefixed by a method name (`sis.alpha0 = 0.6`) applies only when
//! that method runs; `compare` uses this to give each method its own step.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lbsphere::diagnostics::FeatureKind;
use lbsphere::optim::{BbVariant, Method, OptimizerConfig};
use lbsphere::pma::{radius_for_degree, Preset, SymmetrySubgroup};
use lbsphere::{GradientVariant, ModelParams};

use crate::error::{CliError, CliResult};

/// Ordered `key = value` pairs; later entries override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value', got '{raw}'", i + 1))
            })?;
            let key = normalize_key(k);
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", i + 1)));
            }
            entries.push((key, v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `--key value` or `--key=value` pairs.
    pub fn from_flags<S: AsRef<str>>(args: &[S]) -> CliResult<Self> {
        let mut entries = Vec::new();
        let mut it = args.iter().map(|s| s.as_ref());
        while let Some(arg) = it.next() {
            let flag = arg
                .strip_prefix("--")
                .ok_or_else(|| CliError::Config(format!("expected a --key flag, got '{arg}'")))?;
            let (k, v) = match flag.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it
                        .next()
                        .ok_or_else(|| CliError::Config(format!("flag --{flag} needs a value")))?;
                    (flag.to_string(), v.to_string())
                }
            };
            entries.push((normalize_key(&k), v));
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((normalize_key(key), value.into()));
    }

    pub fn extend(&mut self, other: KeyValues) {
        self.entries.extend(other.entries);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

/// Where the initial field comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSource {
    Preset(Preset),
    /// Invariant field of one symmetry operator at the given degree.
    Pma(SymmetrySubgroup, usize),
    Random,
    File(PathBuf),
}

impl InitSource {
    /// Principal degree, when the source has one.
    pub fn degree(&self) -> Option<usize> {
        match self {
            Self::Preset(p) => Some(p.degree()),
            Self::Pma(_, l) => Some(*l),
            Self::Random | Self::File(_) => None,
        }
    }
}

impl FromStr for InitSource {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        if s == "random" {
            return Ok(Self::Random);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(path)));
        }
        if let Some(rest) = s.strip_prefix("pma:") {
            let (g, l) = rest
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("expected pma:GROUP:DEGREE, got '{s}'")))?;
            let group: SymmetrySubgroup = g.parse()?;
            let degree = l
                .parse()
                .map_err(|_| CliError::Config(format!("bad degree in '{s}'")))?;
            return Ok(Self::Pma(group, degree));
        }
        Ok(Self::Preset(s.parse()?))
    }
}

impl fmt::Display for InitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Preset(p) => write!(f, "{p}"),
            Self::Pma(g, l) => write!(f, "pma:{g}:{l}"),
            Self::Random => f.write_str("random"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSpec {
    Value(f64),
    /// `sqrt(l (l + 1))` of the initial state's principal degree.
    Principal,
    /// Uniform draw from the run seed.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub trace: bool,
    pub coefficients: bool,
    pub grid: bool,
    pub summary: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self {
            trace: true,
            coefficients: true,
            grid: false,
            summary: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub bandlimit: usize,
    /// `None` selects the smallest grid that integrates the energy exactly.
    pub grid: Option<(usize, usize)>,
    pub xi: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub radius: RadiusSpec,
    pub variant: GradientVariant,
    pub optimizer: OptimizerConfig,
    pub init: InitSource,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub emit: Emit,
    pub count: Option<FeatureKind>,
    /// Method-prefixed keys, applied by [`RunConfig::for_method`].
    pub per_method: BTreeMap<String, KeyValues>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::AaBpg2,
            bandlimit: 127,
            grid: None,
            xi: 1.0,
            epsilon: -1.0,
            lambda: 0.8,
            radius: RadiusSpec::Principal,
            variant: GradientVariant::Squared,
            optimizer: OptimizerConfig::default(),
            init: InitSource::Preset(Preset::S15),
            seed: 0,
            output: None,
            emit: Emit::default(),
            count: None,
            per_method: BTreeMap::new(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    let bad = || CliError::Config(format!("{key}: expected a number, got '{v}'"));
    let x = match v.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => inner.trim().parse::<f64>().map_err(|_| bad())?.sqrt(),
        None => v.parse::<f64>().map_err(|_| bad())?,
    };
    if x.is_nan() {
        return Err(bad());
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> CliResult<usize> {
    v.parse()
        .map_err(|_| CliError::Config(format!("{key}: expected a nonnegative integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> CliResult<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got '{v}'"))),
    }
}

impl RunConfig {
    pub fn from_pairs(kv: &KeyValues) -> CliResult<Self> {
        let mut cfg = Self::default();
        cfg.apply(kv)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads an optional config file, then applies flag overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut kv = match path {
            Some(p) => KeyValues::read(p)?,
            None => KeyValues::default(),
        };
        kv.extend(KeyValues::from_flags(overrides)?);
        Self::from_pairs(&kv)
    }

    pub fn apply(&mut self, kv: &KeyValues) -> CliResult<()> {
        for (key, v) in kv.iter() {
            if let Some((prefix, rest)) = key.split_once('.') {
                let method: Method = prefix.parse()?;
                self.per_method
                    .entry(method.name().to_string())
                    .or_default()
                    .set(rest, v);
                continue;
            }
            self.apply_one(key, v)?;
        }
        Ok(())
    }

    fn apply_one(&mut self, key: &str, v: &str) -> CliResult<()> {
        let opt = &mut self.optimizer;
        match key {
            "method" => self.method = v.parse()?,
            "bandlimit" => self.bandlimit = parse_usize(key, v)?,
            "grid" => {
                self.grid = if v == "minimal" {
                    None
                } else {
                    let (t, p) = v.split_once(['x', 'X']).ok_or_else(|| {
                        CliError::Config(format!("grid: expected THETAxPHI or 'minimal', got '{v}'"))
                    })?;
                    Some((parse_usize(key, t.trim())?, parse_usize(key, p.trim())?))
                }
            }
            "n_theta" => {
                let t = parse_usize(key, v)?;
                self.grid = Some((t, self.grid.map_or(0, |g| g.1)));
            }
            "n_phi" => {
                let p = parse_usize(key, v)?;
                self.grid = Some((self.grid.map_or(0, |g| g.0), p));
            }
            "xi" => self.xi = parse_f64(key, v)?,
            "epsilon" => self.epsilon = parse_f64(key, v)?,
            "lambda" => self.lambda = parse_f64(key, v)?,
            "radius" => {
                self.radius = match v {
                    "pma" | "principal" => RadiusSpec::Principal,
                    "random" => RadiusSpec::Random,
                    _ => RadiusSpec::Value(parse_f64(key, v)?),
                }
            }
            "gradient" => self.variant = v.parse()?,
            "init" => self.init = v.parse()?,
            "seed" => {
                self.seed = v
                    .parse()
                    .map_err(|_| CliError::Config(format!("seed: expected an integer, got '{v}'")))?
            }
            "output" => self.output = Some(PathBuf::from(v)),
            "trace" => self.emit.trace = parse_bool(key, v)?,
            "coefficients" => self.emit.coefficients = parse_bool(key, v)?,
            "grid_field" => self.emit.grid = parse_bool(key, v)?,
            "summary" => self.emit.summary = parse_bool(key, v)?,
            "count" => {
                self.count = match v {
                    "none" => None,
                    _ => Some(v.parse()?),
                }
            }
            "alpha" | "alpha0" => opt.alpha0 = parse_f64(key, v)?,
            "alpha_min" => opt.alpha_min = parse_f64(key, v)?,
            "alpha_max" => opt.alpha_max = parse_f64(key, v)?,
            "eta" => opt.eta = parse_f64(key, v)?,
            "w_bar" => {
                opt.w_bar = match v {
                    "default" => None,
                    _ => Some(parse_f64(key, v)?),
                }
            }
            "bregman_a" => opt.bregman.a = parse_f64(key, v)?,
            "bregman_b" => opt.bregman.b = parse_f64(key, v)?,
            "tol" => opt.tol = parse_f64(key, v)?,
            "max_iter" => opt.max_iter = parse_usize(key, v)?,
            "direction_bound" => opt.direction_bound = parse_f64(key, v)?,
            "newton_tol" => opt.newton.tol = parse_f64(key, v)?,
            "newton_max_iter" => opt.newton.max_iter = parse_usize(key, v)?,
            "bb" => {
                opt.bb = match v {
                    "default" => None,
                    "long" => Some(BbVariant::Long),
                    "short" => Some(BbVariant::Short),
                    _ => return Err(CliError::Config(format!("bb: expected long, short or default, got '{v}'"))),
                }
            }
            "trace_records" => opt.record_trace = parse_bool(key, v)?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.bandlimit == 0 {
            return Err(CliError::Config("bandlimit must be at least 1".into()));
        }
        if let Some((t, p)) = self.grid {
            if t == 0 || p == 0 {
                return Err(CliError::Config(
                    "grid needs both n_theta and n_phi".into(),
                ));
            }
        }
        if self.radius == RadiusSpec::Principal && self.init.degree().is_none() {
            return Err(CliError::Config(format!(
                "init '{}' has no principal degree; set radius explicitly",
                self.init
            )));
        }
        if let Some(l) = self.init.degree() {
            if l > self.bandlimit {
                return Err(CliError::Config(format!(
                    "initial degree {l} exceeds bandlimit {}",
                    self.bandlimit
                )));
            }
        }
        self.model_params().validate()?;
        self.optimizer.validate(self.method)?;
        for name in self.per_method.keys() {
            let m: Method = name.parse()?;
            self.for_method(m)?;
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        match self.radius {
            RadiusSpec::Value(r) => r,
            RadiusSpec::Principal => radius_for_degree(self.init.degree().unwrap_or(0)),
            RadiusSpec::Random => lbsphere::pma::random_radius(self.seed),
        }
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams::new(self.xi, self.epsilon, self.lambda, self.radius())
    }

    /// This configuration with `method` selected and its prefixed keys applied.
    pub fn for_method(&self, method: Method) -> CliResult<Self> {
        let mut cfg = self.clone();
        cfg.method = method;
        cfg.per_method.clear();
        if let Some(kv) = self.per_method.get(method.name()) {
            for (k, v) in kv.iter() {
                cfg.apply_one(k, v)?;
            }
        }
        cfg.optimizer.validate(method)?;
        Ok(cfg)
    }

    /// Key-value text that reproduces this configuration.
    pub fn to_text(&self) -> String {
        let o = &self.optimizer;
        let mut lines = vec![
            format!("method = {}", self.method),
            format!("bandlimit = {}", self.bandlimit),
            match self.grid {
                Some((t, p)) => format!("grid = {t}x{p}"),
                None => "grid = minimal".into(),
            },
            format!("xi = {:e}", self.xi),
            format!("epsilon = {:e}", self.epsilon),
            format!("lambda = {:e}", self.lambda),
            match self.radius {
                RadiusSpec::Value(r) => format!("radius = {r:e}"),
                RadiusSpec::Principal => "radius = pma".into(),
                RadiusSpec::Random => "radius = random".into(),
            },
            format!(
                "gradient = {}",
                match self.variant {
                    GradientVariant::Squared => "squared",
                    GradientVariant::PaperLiteral => "literal",
                }
            ),
            format!("init = {}", self.init),
            format!("seed = {}", self.seed),
            format!("alpha0 = {:e}", o.alpha0),
            format!("alpha_min = {:e}", o.alpha_min),
            format!("alpha_max = {:e}", o.alpha_max),
            format!("eta = {:e}", o.eta),
            match o.w_bar {
                Some(w) => format!("w_bar = {w:e}"),
                None => "w_bar = default".into(),
            },
            format!("bregman_a = {:e}", o.bregman.a),
            format!("bregman_b = {:e}", o.bregman.b),
            format!("tol = {:e}", o.tol),
            format!("max_iter = {}", o.max_iter),
            format!("direction_bound = {:e}", o.direction_bound),
            format!("newton_tol = {:e}", o.newton.tol),
            format!("newton_max_iter = {}", o.newton.max_iter),
            match o.bb {
                Some(BbVariant::Long) => "bb = long".into(),
                Some(BbVariant::Short) => "bb = short".into(),
                None => "bb = default".into(),
            },
            format!("count = {}", self.count.map_or("none".to_string(), |k| k.to_string())),
        ];
        for (m, kv) in &self.per_method {
            for (k, v) in kv.iter() {
                lines.push(format!("{m}.{k} = {v}"));
            }
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blank_lines_and_overrides() {
        let mut kv = KeyValues::parse("# spots\nepsilon = -0.75  # colder\n\nradius = sqrt(240)\n").unwrap();
        kv.extend(KeyValues::from_flags(&["--epsilon", "-0.5", "--max-iter=7"]).unwrap());
        let cfg = RunConfig::from_pairs(&kv).unwrap();
        assert_eq!(cfg.epsilon, -0.5);
        assert_eq!(cfg.optimizer.max_iter, 7);
        assert_eq!(cfg.radius(), 240f64.sqrt());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_pairs(&KeyValues::parse("colour = red").unwrap()).is_err());
        assert!(RunConfig::from_pairs(&KeyValues::parse("alpha0 = fast").unwrap()).is_err());
        assert!(KeyValues::parse("just words").is_err());
        assert!(KeyValues::from_flags(&["--tol"]).is_err());
    }

    #[test]
    fn random_init_needs_a_radius() {
        let kv = KeyValues::parse("init = random").unwrap();
        assert!(RunConfig::from_pairs(&kv).is_err());
        let kv = KeyValues::parse("init = random\nradius = 12").unwrap();
        assert!(RunConfig::from_pairs(&kv).is_ok());
    }

    #[test]
    fn method_prefixed_keys() {
        let kv = KeyValues::parse("alpha0 = 0.02\nsis.alpha0 = 0.6").unwrap();
        let cfg = RunConfig::from_pairs(&kv).unwrap();
        assert_eq!(cfg.optimizer.alpha0, 0.02);
        assert_eq!(cfg.for_method(Method::Sis).unwrap().optimizer.alpha0, 0.6);
        assert_eq!(cfg.for_method(Method::AaBpg4).unwrap().optimizer.alpha0, 0.02);
    }

    #[test]
    fn text_form_round_trips() {
        let kv = KeyValues::parse(
            "init = pma:I:6\nmethod = asis\nsis.alpha0 = 0.6\ngrid = 64x130\nbandlimit = 31\nw_bar = 0.5",
        )
        .unwrap();
        let cfg = RunConfig::from_pairs(&kv).unwrap();
        let again = RunConfig::from_pairs(&KeyValues::parse(&cfg.to_text()).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn init_sources_parse() {
        assert_eq!("S15".parse::<InitSource>().unwrap(), InitSource::Preset(Preset::S15));
        assert_eq!(
            "pma:Z15:15".parse::<InitSource>().unwrap(),
            InitSource::Pma(SymmetrySubgroup::Cyclic(15), 15)
        );
        assert_eq!(
            "file:a/b.txt".parse::<InitSource>().unwrap(),
            InitSource::File(PathBuf::from("a/b.txt"))
        );
        assert!("blob".parse::<InitSource>().is_err());
    }
}
