use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Var};
use crate::operators::TransportNorm;

use super::ini::{Entry, Ini, Section};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    PLaplaceObstacle,
    ReactionDiffusion,
    AgeStructured,
    Impulsive,
    CustomLinear,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PLaplaceObstacle => "plaplace_obstacle",
            ProblemKind::ReactionDiffusion => "reaction_diffusion",
            ProblemKind::AgeStructured => "age_structured",
            ProblemKind::Impulsive => "impulsive",
            ProblemKind::CustomLinear => "custom_linear",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            ProblemKind::PLaplaceObstacle,
            ProblemKind::ReactionDiffusion,
            ProblemKind::AgeStructured,
            ProblemKind::Impulsive,
            ProblemKind::CustomLinear,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    /// Exponent of the p-Laplacian.
    pub p: f64,
    /// Domain length in x (age horizon for the age model).
    pub length: f64,
    /// Total node count in x; 1 gives a scalar state.
    pub nodes: usize,
    /// Second axis, for a rectangle.
    pub width: Option<f64>,
    pub ny: Option<usize>,
    /// `A = −d·Δ + c·I` for linear kinds.
    pub diffusion: f64,
    pub rate: f64,
    pub variant: TransportNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Expr(Expr),
    /// `Σ c_k sin(kπx/l)`.
    Modes(Vec<(usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataConfig {
    pub f: Expr,
    pub lower: Option<Expr>,
    pub upper: Option<Expr>,
    pub beta: Option<Expr>,
    pub x0: InitialData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConfig {
    pub index: usize,
    /// `τ(s)` with `s = ‖u‖∞`.
    pub tau: Expr,
    /// Pointwise impulse `I(u)(x)`.
    pub impulse: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaChoice {
    /// Linear with the constructive constant of the problem.
    Auto,
    Linear(f64),
    Power {
        c: f64,
        a: f64,
    },
    XLog,
    Custom(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorKind {
    Quad,
    Sup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckerConfig {
    pub omega: OmegaChoice,
    pub deltas: Vec<f64>,
    pub random_bumps: usize,
    pub seed: u64,
    pub h0: f64,
    pub levels: usize,
    pub monitor: MonitorKind,
    pub exit_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub csv: bool,
    pub svg: bool,
    pub prefix: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ProblemKind,
    pub operator: OperatorConfig,
    pub data: DataConfig,
    pub barriers: Vec<BarrierConfig>,
    pub t_end: f64,
    pub steps: usize,
    pub checker: CheckerConfig,
    pub output: OutputConfig,
}

/// Typed access to one section, tracking which keys were consumed.
struct Reader<'a> {
    section: Option<&'a Section>,
    name: &'a str,
    used: BTreeSet<&'a str>,
}

fn cfg_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl<'a> Reader<'a> {
    fn new(ini: &'a Ini, name: &'a str) -> Self {
        Reader {
            section: ini.section(name),
            name,
            used: BTreeSet::new(),
        }
    }

    fn line(&self) -> usize {
        self.section.map_or(0, |s| s.line)
    }

    fn entry(&mut self, key: &'a str) -> Option<&'a Entry> {
        let e = self.section?.get(key)?;
        self.used.insert(key);
        Some(e)
    }

    fn str(&mut self, key: &'a str) -> Option<&'a Entry> {
        self.entry(key)
    }

    fn f64(&mut self, key: &'a str) -> Result<Option<f64>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        let v: f64 = e.value.parse().map_err(|_| {
            cfg_err(
                e.line,
                format!("[{}] {key}: expected a number, got {:?}", self.name, e.value),
            )
        })?;
        if !v.is_finite() {
            return Err(cfg_err(e.line, format!("[{}] {key} must be finite", self.name)));
        }
        Ok(Some(v))
    }

    fn usize(&mut self, key: &'a str) -> Result<Option<usize>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        e.value.parse().map(Some).map_err(|_| {
            cfg_err(
                e.line,
                format!(
                    "[{}] {key}: expected a nonnegative integer, got {:?}",
                    self.name, e.value
                ),
            )
        })
    }

    fn bool(&mut self, key: &'a str) -> Result<Option<bool>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        match e.value.as_str() {
            "true" | "yes" | "1" => Ok(Some(true)),
            "false" | "no" | "0" => Ok(Some(false)),
            other => Err(cfg_err(
                e.line,
                format!("[{}] {key}: expected true/false, got {other:?}", self.name),
            )),
        }
    }

    fn expr(&mut self, key: &'a str, allowed: &[Var]) -> Result<Option<Expr>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        let ex = parse(&e.value).map_err(|p| cfg_err(e.line, format!("[{}] {key}: {p}", self.name)))?;
        if let Some(v) = ex.variables().into_iter().find(|v| !allowed.contains(v)) {
            let names: Vec<&str> = allowed.iter().map(|v| v.name()).collect();
            return Err(cfg_err(
                e.line,
                format!(
                    "[{}] {key} may not reference '{}' (allowed: {})",
                    self.name,
                    v.name(),
                    if names.is_empty() {
                        "none".to_string()
                    } else {
                        names.join(", ")
                    }
                ),
            ));
        }
        Ok(Some(ex))
    }

    fn finish(self) -> Result<()> {
        if let Some(s) = self.section {
            if let Some(e) = s.entries.iter().find(|e| !self.used.contains(e.key.as_str())) {
                return Err(cfg_err(e.line, format!("unknown key {:?} in [{}]", e.key, self.name)));
            }
        }
        Ok(())
    }
}

fn parse_list(e: &Entry) -> Result<Vec<f64>> {
    e.value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| cfg_err(e.line, format!("expected positive numbers, got {:?}", s.trim())))
        })
        .collect()
}

fn parse_modes(e: &Entry) -> Result<Vec<(usize, f64)>> {
    e.value
        .split(',')
        .map(|item| {
            let (k, c) = item
                .split_once(':')
                .ok_or_else(|| cfg_err(e.line, format!("mode {:?} must look like k:c", item.trim())))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| cfg_err(e.line, format!("bad mode index {:?}", k.trim())))?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| cfg_err(e.line, format!("bad mode coefficient {:?}", c.trim())))?;
            if k == 0 || !c.is_finite() {
                return Err(cfg_err(
                    e.line,
                    format!("mode {:?} must have k >= 1 and finite c", item.trim()),
                ));
            }
            Ok((k, c))
        })
        .collect()
}

const SPACE: [Var; 2] = [Var::X, Var::Y];

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e).context(path.display().to_string()))?;
        Scenario::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let ini = Ini::parse(text)?;
        let known = ["problem", "operator", "data", "time", "checker", "output"];
        for s in &ini.sections {
            let barrier = s
                .name
                .strip_prefix("barrier.")
                .is_some_and(|n| n.parse::<usize>().is_ok_and(|n| n >= 1));
            if !(known.contains(&s.name.as_str()) || barrier) {
                return Err(cfg_err(s.line, format!("unknown section [{}]", s.name)));
            }
        }

        let mut r = Reader::new(&ini, "problem");
        if r.section.is_none() {
            return Err(cfg_err(0, "missing [problem] section"));
        }
        let kind_e = r.str("kind").ok_or_else(|| cfg_err(r.line(), "[problem] needs kind"))?;
        let kind = ProblemKind::parse(&kind_e.value).ok_or_else(|| {
            cfg_err(
                kind_e.line,
                format!(
                    "unknown problem kind {:?} (expected plaplace_obstacle, reaction_diffusion, age_structured, impulsive or custom_linear)",
                    kind_e.value
                ),
            )
        })?;
        let name = r
            .str("name")
            .map_or_else(|| kind.name().to_string(), |e| e.value.clone());
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(cfg_err(
                r.line(),
                format!("scenario name {name:?} must be alphanumeric, '-', '_' or '.'"),
            ));
        }
        r.finish()?;

        let mut r = Reader::new(&ini, "operator");
        let op_line = r.line();
        let operator = OperatorConfig {
            p: r.f64("p")?.unwrap_or(2.0),
            length: r.f64("length")?.unwrap_or(1.0),
            nodes: r.usize("nodes")?.unwrap_or(101),
            width: r.f64("width")?,
            ny: r.usize("ny")?,
            diffusion: r
                .f64("diffusion")?
                .unwrap_or(if kind == ProblemKind::CustomLinear { 0.0 } else { 1.0 }),
            rate: r.f64("rate")?.unwrap_or(0.0),
            variant: match r.str("norm").map(|e| (e.value.as_str(), e.line)) {
                None | Some(("sup", _)) => TransportNorm::Sup,
                Some(("l2", _)) => TransportNorm::L2Shifted,
                Some((other, line)) => return Err(cfg_err(line, format!("norm must be sup or l2, got {other:?}"))),
            },
        };
        r.finish()?;
        if !(operator.length > 0.0) || operator.width.is_some_and(|w| !(w > 0.0)) {
            return Err(cfg_err(op_line, "domain lengths must be positive"));
        }
        if operator.width.is_some() != operator.ny.is_some() {
            return Err(cfg_err(op_line, "a rectangle needs both width and ny"));
        }
        if operator.ny.is_some() && kind != ProblemKind::ReactionDiffusion {
            return Err(cfg_err(op_line, "only reaction_diffusion supports a rectangle"));
        }
        if operator.diffusion < 0.0 {
            return Err(cfg_err(op_line, "diffusion must be >= 0"));
        }

        let two_d = operator.ny.is_some();
        let space: &[Var] = if two_d { &SPACE } else { &SPACE[..1] };
        let mut fvars = space.to_vec();
        fvars.extend([Var::T, Var::U]);

        let mut r = Reader::new(&ini, "data");
        let data_line = r.line();
        let f = r.expr("f", &fvars)?.unwrap_or(Expr::Num(0.0));
        let lower = match (r.expr("m", space)?, r.expr("lower", space)?) {
            (Some(_), Some(_)) => return Err(cfg_err(data_line, "give either m or lower, not both")),
            (a, b) => a.or(b),
        };
        let upper = match (r.expr("M", space)?, r.expr("upper", space)?) {
            (Some(_), Some(_)) => return Err(cfg_err(data_line, "give either M or upper, not both")),
            (a, b) => a.or(b),
        };
        let beta = r.expr("beta", &[Var::X])?;
        let x0 = match (r.expr("x0", space)?, r.str("modes")) {
            (Some(e), None) => InitialData::Expr(e),
            (None, Some(e)) => InitialData::Modes(parse_modes(e)?),
            (Some(_), Some(_)) => return Err(cfg_err(data_line, "give either x0 or modes, not both")),
            (None, None) => return Err(cfg_err(data_line, "[data] needs x0 or modes")),
        };
        r.finish()?;

        match kind {
            ProblemKind::AgeStructured => {
                if beta.is_none() || lower.is_none() {
                    return Err(cfg_err(data_line, "age_structured needs beta and a lower obstacle m"));
                }
                if upper.is_some() {
                    return Err(cfg_err(data_line, "age_structured supports a lower obstacle only"));
                }
            }
            ProblemKind::PLaplaceObstacle | ProblemKind::ReactionDiffusion if lower.is_none() && upper.is_none() => {
                return Err(cfg_err(data_line, format!("{} needs m and/or M", kind.name())));
            }
            _ => {}
        }
        if beta.is_some() && kind != ProblemKind::AgeStructured {
            return Err(cfg_err(data_line, "beta only applies to age_structured"));
        }

        let mut barriers = Vec::new();
        for s in ini.sections.iter().filter(|s| s.name.starts_with("barrier.")) {
            let index: usize = s.name["barrier.".len()..].parse().expect("checked above");
            let mut r = Reader::new(&ini, &s.name);
            let tau = r
                .expr("tau", &[Var::S])?
                .ok_or_else(|| cfg_err(s.line, format!("[{}] needs tau", s.name)))?;
            let mut ivars = space.to_vec();
            ivars.extend([Var::T, Var::U]);
            let impulse = r.expr("impulse", &ivars)?.unwrap_or(Expr::Num(0.0));
            r.finish()?;
            barriers.push(BarrierConfig { index, tau, impulse });
        }
        barriers.sort_by_key(|b| b.index);
        if kind == ProblemKind::Impulsive {
            if barriers.is_empty() {
                return Err(cfg_err(0, "impulsive needs at least one [barrier.N] section"));
            }
            if barriers.iter().enumerate().any(|(i, b)| b.index != i + 1) {
                return Err(cfg_err(0, "barriers must be numbered 1, 2, ... without gaps"));
            }
        } else if let Some(b) = barriers.first() {
            return Err(cfg_err(0, format!("[barrier.{}] only applies to impulsive", b.index)));
        }

        let mut r = Reader::new(&ini, "time");
        let t_line = r.line();
        let t_end = r.f64("T")?.ok_or_else(|| cfg_err(t_line, "[time] needs T"))?;
        let steps = r.usize("steps")?.ok_or_else(|| cfg_err(t_line, "[time] needs steps"))?;
        r.finish()?;
        if !(t_end > 0.0) || steps == 0 {
            return Err(cfg_err(t_line, "need T > 0 and steps >= 1"));
        }

        let mut r = Reader::new(&ini, "checker");
        let omega = match r.str("omega") {
            None => OmegaChoice::Auto,
            Some(e) => match e.value.as_str() {
                "auto" => OmegaChoice::Auto,
                "xlog" => OmegaChoice::XLog,
                "linear" | "power" => {
                    let c = r
                        .f64("c")?
                        .ok_or_else(|| cfg_err(e.line, format!("omega = {} needs c", e.value)))?;
                    if e.value == "linear" {
                        OmegaChoice::Linear(c)
                    } else {
                        let a = r.f64("a")?.ok_or_else(|| cfg_err(e.line, "omega = power needs a"))?;
                        OmegaChoice::Power { c, a }
                    }
                }
                _ if e.quoted => {
                    OmegaChoice::Custom(parse(&e.value).map_err(|p| cfg_err(e.line, format!("[checker] omega: {p}")))?)
                }
                other => return Err(cfg_err(e.line, format!("unknown omega {other:?}"))),
            },
        };
        let checker = CheckerConfig {
            omega,
            deltas: match r.str("deltas") {
                Some(e) => parse_list(e)?,
                None => vec![1e-1, 1e-2, 1e-3, 1e-4],
            },
            random_bumps: r.usize("random_bumps")?.unwrap_or(2),
            seed: r.usize("seed")?.unwrap_or(0) as u64,
            h0: r.f64("h0")?.unwrap_or(crate::invariance::DEFAULT_H0),
            levels: r.usize("levels")?.unwrap_or(crate::invariance::DEFAULT_LEVELS),
            monitor: match r.str("monitor").map(|e| (e.value.as_str(), e.line)) {
                None | Some(("quad", _)) => MonitorKind::Quad,
                Some(("sup", _)) => MonitorKind::Sup,
                Some((other, line)) => {
                    return Err(cfg_err(line, format!("monitor must be quad or sup, got {other:?}")))
                }
            },
            exit_tol: r.f64("exit_tol")?,
        };
        r.finish()?;
        if !(checker.h0 > 0.0) || checker.levels < 2 {
            return Err(cfg_err(0, "[checker] needs h0 > 0 and levels >= 2"));
        }

        let mut r = Reader::new(&ini, "output");
        let output = OutputConfig {
            csv: r.bool("csv")?.unwrap_or(true),
            svg: r.bool("svg")?.unwrap_or(false),
            prefix: r.str("prefix").map_or_else(|| name.clone(), |e| e.value.clone()),
        };
        r.finish()?;

        Ok(Scenario {
            name,
            kind,
            operator,
            data: DataConfig {
                f,
                lower,
                upper,
                beta,
                x0,
            },
            barriers,
            t_end,
            steps,
            checker,
            output,
        })
    }
}
