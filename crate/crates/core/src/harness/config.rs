use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::{make_problem, make_problem_near_h, Problem, ProblemKind};
use crate::stepper::step_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Partial-fraction stepper with real distinct poles.
    Rdp,
    /// (2,2) Padé variant.
    P22,
    /// Dense exact-exponential ETDRK4; small grids only.
    ExactRef,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rdp => "rdp",
            Scheme::P22 => "p22",
            Scheme::ExactRef => "exact-ref",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Scheme::Rdp, Scheme::P22, Scheme::ExactRef]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{s}' (rdp, p22, exact-ref)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub problem: ProblemKind,
    /// Interior points per direction; takes precedence over `h`.
    pub m: Option<usize>,
    /// Nominal spacing, mapped to the nearest representable grid.
    pub h: Option<f64>,
    pub k: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub workers: usize,
    pub levels: usize,
    pub out: Option<PathBuf>,
    pub snapshot_at: Vec<f64>,
}

impl RunConfig {
    /// Defaults for a problem: its conventional `k`, `h` and final time.
    pub fn new(problem: ProblemKind) -> Self {
        let (k, h, t_final) = problem.defaults();
        Self {
            problem,
            m: None,
            h: Some(h),
            k,
            t_final,
            scheme: Scheme::Rdp,
            workers: 1,
            levels: 3,
            out: None,
            snapshot_at: Vec::new(),
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_t_final(mut self, t: f64) -> Self {
        self.t_final = t;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        step_count(self.t_final, self.k)?;
        if let Some(&t) = self.snapshot_at.iter().find(|&&t| !(0.0..=self.t_final).contains(&t)) {
            return Err(Error::InvalidArgument(format!(
                "snapshot time {t} lies outside [0, {}]",
                self.t_final
            )));
        }
        Ok(())
    }

    /// The problem on the configured grid.
    pub fn build_problem(&self) -> Result<Problem> {
        match (self.m, self.h) {
            (Some(m), _) => make_problem(self.problem.name(), m),
            (None, Some(h)) => make_problem_near_h(self.problem.name(), h),
            (None, None) => make_problem_near_h(self.problem.name(), self.problem.defaults().1),
        }
    }

    /// Sets one field from its textual `key = value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("invalid {what} '{value}'"));
        match key.replace('_', "-").as_str() {
            "problem" => self.problem = value.parse()?,
            "m" => self.m = Some(value.parse().map_err(|_| bad("m"))?),
            "h" => self.h = Some(value.parse().map_err(|_| bad("h"))?),
            "k" => self.k = value.parse().map_err(|_| bad("k"))?,
            "t-final" | "t" => self.t_final = value.parse().map_err(|_| bad("final time"))?,
            "scheme" => self.scheme = value.parse()?,
            "workers" => self.workers = value.parse().map_err(|_| bad("worker count"))?,
            "levels" => self.levels = value.parse().map_err(|_| bad("level count"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "snapshot-at" => self.snapshot_at = parse_list(value).map_err(|_| bad("snapshot list"))?,
            other => return Err(Error::InvalidArgument(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }
}

/// Comma-separated numbers.
pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::parse)
        .collect()
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
