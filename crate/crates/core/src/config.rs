//! Tolerances and the flat `key = value` run configuration.
//!
//! ```text
//! [weight]
//! kind = power
//! alpha = 0.5
//! [grid]
//! h = 0.00390625
//! t_max = 40
//! [tolerance]
//! decay = 0.01
//! [run]
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Grid, Result, Rule, Weight, WeightKind};

/// Every numeric threshold used by the analyzers, overridable by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative slack in `ω(t+s) ≤ ω(t)ω(s)`.
    pub submult: f64,
    /// "Tends to zero" threshold for dyadic-window maxima.
    pub decay: f64,
    /// Constant `C` in `slack(h) = C·h·(norm product)`.
    pub slack: f64,
    /// Cap on divided differences `|Δφ| / (Δt·ω·sup)` for grid continuity.
    pub lipschitz: f64,
    /// Relative agreement of a tail coefficient with the last 10% of samples.
    pub tail: f64,
    /// Slack on the jump-witness bounds.
    pub witness: f64,
    /// Relative slack on `∥D_φ f_n − α∥ ≥ |α|`.
    pub limit: f64,
    /// Weak-star pairing convergence threshold.
    pub pairing: f64,
    pub net_eps: f64,
    /// Allowed growth in ε-net size under refinement.
    pub net_growth: f64,
    /// `|φ(0)| ≤ vanish·∥φ∥` counts as vanishing at 0.
    pub vanish: f64,
    /// Last dyadic Cauchy difference of `D̄_φδ_s/ω(s)`, relative to `∥φ∥`.
    pub cauchy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            submult: 1e-10,
            decay: 1e-2,
            slack: 10.0,
            lipschitz: 64.0,
            tail: 0.1,
            witness: 1e-3,
            limit: 0.1,
            pairing: 0.05,
            net_eps: 0.05,
            net_growth: 1.0,
            vanish: 1e-2,
            cauchy: 0.1,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 12] = [
        "submult",
        "decay",
        "slack",
        "lipschitz",
        "tail",
        "witness",
        "limit",
        "pairing",
        "net_eps",
        "net_growth",
        "vanish",
        "cauchy",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "submult" => &mut self.submult,
            "decay" => &mut self.decay,
            "slack" => &mut self.slack,
            "lipschitz" => &mut self.lipschitz,
            "tail" => &mut self.tail,
            "witness" => &mut self.witness,
            "limit" => &mut self.limit,
            "pairing" => &mut self.pairing,
            "net_eps" => &mut self.net_eps,
            "net_growth" => &mut self.net_growth,
            "vanish" => &mut self.vanish,
            "cauchy" => &mut self.cauchy,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "tolerance {name} must be a finite non-negative number, got {value}"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::InvalidParams(format!("unknown tolerance `{name}`")))?;
        *slot = value;
        Ok(())
    }

    /// Parses `NAME=VALUE` and applies it.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("expected NAME=VALUE, got `{spec}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("tolerance value `{value}` is not a number")))?;
        self.set(name.trim(), value)
    }

    /// Discretisation budget `C·h·scale`.
    pub fn slack_budget(&self, h: f64, scale: f64) -> f64 {
        self.slack * h * scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub h: Option<f64>,
    pub t_max: Option<f64>,
    /// Extra geometric levels on `[0, h]`.
    pub refine: u32,
    pub rule: Rule,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            h: None,
            t_max: None,
            refine: 0,
            rule: Rule::Trapezoid,
        }
    }
}

impl GridSpec {
    /// Builds the grid, filling unset fields from `default`.
    pub fn build(&self, default: (f64, f64)) -> Result<Grid> {
        let h = self.h.unwrap_or(default.0);
        let t_max = self.t_max.unwrap_or(default.1);
        match (self.refine, self.rule) {
            (0, rule) => Grid::uniform_with_rule(h, t_max, rule),
            (levels, Rule::Trapezoid) => Grid::refined_near_zero(h, t_max, levels),
            (_, Rule::Simpson) => Err(Error::InvalidGrid(
                "Simpson weights need a uniform grid".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub weight: Option<Weight>,
    pub grid: GridSpec,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub phi: Option<String>,
    pub out: Option<String>,
}

#[derive(Default)]
struct WeightFields {
    kind: Option<(usize, String)>,
    alpha: Option<f64>,
    rate: Option<f64>,
    c: Option<f64>,
    ts: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
}

impl WeightFields {
    fn build(self) -> Result<Option<Weight>> {
        let Some((line, kind)) = self.kind else {
            if self.alpha.is_some() || self.rate.is_some() || self.c.is_some() || self.ts.is_some() {
                return Err(config_err(0, "weight parameters given without `kind`"));
            }
            return Ok(None);
        };
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| config_err(line, &format!("weight kind `{kind}` needs `{key}`")))
        };
        let wk = match kind.as_str() {
            "constant-one" => WeightKind::ConstantOne,
            "power" => WeightKind::Power {
                alpha: need(self.alpha, "alpha")?,
            },
            "exponential" => WeightKind::Exponential {
                rate: need(self.rate, "rate")?,
            },
            "gaussian-decay" => WeightKind::GaussianDecay {
                c: need(self.c, "c")?,
            },
            "tabulated" => WeightKind::Tabulated {
                ts: self
                    .ts
                    .ok_or_else(|| config_err(line, "tabulated weight needs `ts`"))?,
                values: self
                    .values
                    .ok_or_else(|| config_err(line, "tabulated weight needs `values`"))?,
            },
            other => return Err(config_err(line, &format!("unknown weight kind `{other}`"))),
        };
        Weight::new(wk)
            .map(Some)
            .map_err(|e| config_err(line, &e.to_string()))
    }
}

fn config_err(line: usize, msg: &str) -> Error {
    Error::Config {
        line,
        msg: msg.to_string(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(line, &format!("`{key}` expects a number, got `{v}`")))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_f64(line, key, x.trim())).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut wf = WeightFields::default();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "weight" | "grid" | "tolerance" | "run") {
                    return Err(config_err(line, &format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| config_err(line, &format!("expected key = value, got `{content}`")))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| config_err(line, "key outside of any section"))?;
            match (sec, key) {
                ("weight", "kind") => wf.kind = Some((line, value.to_string())),
                ("weight", "alpha") => wf.alpha = Some(parse_f64(line, key, value)?),
                ("weight", "rate") => wf.rate = Some(parse_f64(line, key, value)?),
                ("weight", "c") => wf.c = Some(parse_f64(line, key, value)?),
                ("weight", "ts") => wf.ts = Some(parse_list(line, key, value)?),
                ("weight", "values") => wf.values = Some(parse_list(line, key, value)?),
                ("grid", "h") => cfg.grid.h = Some(parse_f64(line, key, value)?),
                ("grid", "t_max") => cfg.grid.t_max = Some(parse_f64(line, key, value)?),
                ("grid", "refine") => {
                    cfg.grid.refine = value
                        .parse()
                        .map_err(|_| config_err(line, "`refine` expects a non-negative integer"))?
                }
                ("grid", "rule") => {
                    cfg.grid.rule = match value {
                        "trapezoid" => Rule::Trapezoid,
                        "simpson" => Rule::Simpson,
                        other => return Err(config_err(line, &format!("unknown rule `{other}`"))),
                    }
                }
                ("tolerance", name) => {
                    let v = parse_f64(line, name, value)?;
                    Tolerances::default()
                        .set(name, v)
                        .map_err(|e| config_err(line, &e.to_string()))?;
                    cfg.tolerance_overrides.insert(name.to_string(), v);
                }
                ("run", "seed") => {
                    cfg.seed = Some(
                        value
                            .parse()
                            .map_err(|_| config_err(line, "`seed` expects an unsigned integer"))?,
                    )
                }
                ("run", "trials") => {
                    cfg.trials = Some(
                        value
                            .parse()
                            .map_err(|_| config_err(line, "`trials` expects an unsigned integer"))?,
                    )
                }
                ("run", "phi") => cfg.phi = Some(value.to_string()),
                ("run", "out") => cfg.out = Some(value.to_string()),
                (sec, key) => {
                    return Err(config_err(line, &format!("unknown key `{key}` in [{sec}]")))
                }
            }
        }
        cfg.weight = wf.build()?;
        Ok(cfg)
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerance_overrides {
            t.set(k, *v).expect("validated on insert");
        }
        t
    }

    /// Canonical text form; `parse(to_canonical())` reproduces `self`.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        if let Some(w) = &self.weight {
            out.push_str("[weight]\n");
            let _ = writeln!(out, "kind = {}", w.kind().name());
            match w.kind() {
                WeightKind::ConstantOne => {}
                WeightKind::Power { alpha } => {
                    let _ = writeln!(out, "alpha = {alpha}");
                }
                WeightKind::Exponential { rate } => {
                    let _ = writeln!(out, "rate = {rate}");
                }
                WeightKind::GaussianDecay { c } => {
                    let _ = writeln!(out, "c = {c}");
                }
                WeightKind::Tabulated { ts, values } => {
                    let _ = writeln!(out, "ts = {}", join(ts));
                    let _ = writeln!(out, "values = {}", join(values));
                }
            }
        }
        out.push_str("[grid]\n");
        if let Some(h) = self.grid.h {
            let _ = writeln!(out, "h = {h}");
        }
        if let Some(t) = self.grid.t_max {
            let _ = writeln!(out, "t_max = {t}");
        }
        let _ = writeln!(out, "refine = {}", self.grid.refine);
        let rule = match self.grid.rule {
            Rule::Trapezoid => "trapezoid",
            Rule::Simpson => "simpson",
        };
        let _ = writeln!(out, "rule = {rule}");
        if !self.tolerance_overrides.is_empty() {
            out.push_str("[tolerance]\n");
            for (k, v) in &self.tolerance_overrides {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out.push_str("[run]\n");
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed = {s}");
        }
        if let Some(t) = self.trials {
            let _ = writeln!(out, "trials = {t}");
        }
        if let Some(p) = &self.phi {
            let _ = writeln!(out, "phi = {p}");
        }
        if let Some(o) = &self.out {
            let _ = writeln!(out, "out = {o}");
        }
        out
    }
}
