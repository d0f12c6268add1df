//! Structured verdicts and their plain-text / CSV forms.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    /// Compactness established for `D_φ` on `L¹(ω)` but not for the
    /// extension to `M(ω)`; the two are not known to coincide.
    HoldsForD,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsForD => "holds-for-D",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holds" => Ok(Verdict::Holds),
            "holds-for-D" => Ok(Verdict::HoldsForD),
            "fails" => Ok(Verdict::Fails),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(Error::InvalidParams(format!("unknown verdict `{other}`"))),
        }
    }
}

/// A named numeric sequence of `(parameter, value)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Evidence {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Evidence {
            name: name.into(),
            points,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values().reduce(f64::max)
    }

    /// `parameter,value` header followed by one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,value\n");
        for &(p, v) in &self.points {
            out.push_str(&fmt_num(p));
            out.push(',');
            out.push_str(&fmt_num(v));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub analyzer: String,
    pub verdict: Verdict,
    /// Headline numbers (maxima, constants, sizes).
    pub summary: Vec<(String, f64)>,
    pub evidence: Vec<Evidence>,
    pub parameters: Vec<(String, String)>,
    pub caveats: Vec<String>,
}

impl AnalysisReport {
    /// Starts an open report; call [`AnalysisReport::conclude`] to set the verdict.
    pub fn new(analyzer: impl Into<String>) -> Self {
        AnalysisReport {
            analyzer: analyzer.into(),
            verdict: Verdict::Inconclusive,
            summary: Vec::new(),
            evidence: Vec::new(),
            parameters: Vec::new(),
            caveats: Vec::new(),
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    pub fn summarize(mut self, key: impl Into<String>, value: f64) -> Self {
        self.summary.push((key.into(), value));
        self
    }

    pub fn with_evidence(mut self, ev: Evidence) -> Self {
        self.evidence.push(ev);
        self
    }

    pub fn caveat(mut self, text: impl Into<String>) -> Self {
        let text = text.into();
        if !self.caveats.contains(&text) {
            self.caveats.push(text);
        }
        self
    }

    pub fn caveats_from<'a>(mut self, texts: impl IntoIterator<Item = &'a String>) -> Self {
        for t in texts {
            self = self.caveat(t.clone());
        }
        self
    }

    /// Sets the verdict.
    ///
    /// Panics if the verdict is decisive without evidence, or inconclusive
    /// without a caveat; both are bugs in the analyzer that built the report.
    pub fn conclude(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        if let Err(e) = self.validate() {
            panic!("{}: {e}", self.analyzer);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.verdict {
            Verdict::Inconclusive if self.caveats.is_empty() => Err(Error::InvalidParams(
                "inconclusive verdict without a caveat".into(),
            )),
            Verdict::Holds | Verdict::HoldsForD | Verdict::Fails if self.evidence.is_empty() => {
                Err(Error::InvalidParams(
                    "decisive verdict without evidence".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn evidence_named(&self, name: &str) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.name == name)
    }

    /// Line-oriented text form with exactly one `VERDICT:` line.
    pub fn to_text(&self) -> String {
        let mut out = format!("ANALYZER: {}\n", self.analyzer);
        out.push_str(&format!("VERDICT: {} {}\n", self.analyzer, self.verdict));
        for (k, v) in &self.parameters {
            out.push_str(&format!("PARAM: {k} = {v}\n"));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("SUMMARY: {k} = {}\n", fmt_num(*v)));
        }
        for c in &self.caveats {
            out.push_str(&format!("CAVEAT: {c}\n"));
        }
        for e in &self.evidence {
            out.push_str(&format!("EVIDENCE: {} ({} points)\n", e.name, e.points.len()));
        }
        out
    }
}

/// Locale-free number formatting: shortest round-trip decimal in the usual
/// range, exponent form outside it.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        format!("{x}")
    } else if (1e-4..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
