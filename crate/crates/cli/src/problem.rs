//! Problem files: a versioned JSON document whose numbers are decimal strings.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use sparsecert_core::moments::TruncatedMomentSequence;
use sparsecert_core::polynomial::Interval;
use sparsecert_core::{ExponentVector, FunctionFamily, SparsePolynomial};

pub const VERSION: u32 = 1;

/// Problem-level error; always a usage or parse failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<sparsecert_core::Error> for ParseError {
    fn from(e: sparsecert_core::Error) -> Self {
        ParseError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// A number written as a decimal string. Bare JSON numbers are accepted too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let v = match Raw::deserialize(d)? {
            Raw::Number(v) => v,
            Raw::Text(s) => {
                let t = s.trim();
                match t {
                    "inf" | "+inf" | "infinity" => f64::INFINITY,
                    _ => f64::from_str(t).map_err(|_| serde::de::Error::custom(format!("'{s}' is not a decimal number")))?,
                }
            }
        };
        if v.is_nan() {
            return Err(serde::de::Error::custom("NaN is not allowed"));
        }
        Ok(Num(v))
    }
}

fn values(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CheckTsystem,
    CheckEtsystem,
    Decompose,
    CertifyNonneg,
    MomentCheck,
    RecoverAtoms,
    SignedRepr,
    Hankel,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::CheckTsystem => "check-tsystem",
            Task::CheckEtsystem => "check-etsystem",
            Task::Decompose => "decompose",
            Task::CertifyNonneg => "certify-nonneg",
            Task::MomentCheck => "moment-check",
            Task::RecoverAtoms => "recover-atoms",
            Task::SignedRepr => "signed-repr",
            Task::Hankel => "hankel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    T,
    Et,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Hamburger,
    Stieltjes,
    Hausdorff,
    Svecov,
}

/// `["a", "b"]` or the string `"half-line"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IntervalSpec {
    Closed([Num; 2]),
    Named(String),
}

impl IntervalSpec {
    pub fn build(&self) -> Result<Interval> {
        match self {
            IntervalSpec::Closed([a, b]) if b.0 == f64::INFINITY => {
                if a.0 != 0.0 {
                    return Err(ParseError(format!("unbounded intervals must start at 0, got {}", a.0)));
                }
                Ok(Interval::half_line())
            }
            IntervalSpec::Closed([a, b]) => Ok(Interval::closed(a.0, b.0)?),
            IntervalSpec::Named(s) if s == "half-line" => Ok(Interval::half_line()),
            IntervalSpec::Named(s) => Err(ParseError(format!("unknown interval '{s}', expected [a, b] or \"half-line\""))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub exponents: Vec<Num>,
    pub coefficients: Vec<Num>,
}

impl PolynomialSpec {
    pub fn build(&self) -> Result<SparsePolynomial> {
        let exps = ExponentVector::new(values(&self.exponents))?;
        Ok(SparsePolynomial::new(exps, values(&self.coefficients))?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Powers {
        exponents: Vec<Num>,
        #[serde(default)]
        weight: Option<PolynomialSpec>,
    },
    Exponentials {
        rates: Vec<Num>,
    },
    Cauchy {
        shifts: Vec<Num>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<FunctionFamily> {
        Ok(match self {
            FamilySpec::Powers { exponents, weight } => {
                let fam = FunctionFamily::powers(ExponentVector::new(values(exponents))?);
                match weight {
                    Some(w) => FunctionFamily::scaled_by_polynomial(fam, w.build()?),
                    None => fam,
                }
            }
            FamilySpec::Exponentials { rates } => FunctionFamily::exponentials(values(rates))?,
            FamilySpec::Cauchy { shifts } => FunctionFamily::cauchy(values(shifts))?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub exponents: Vec<Num>,
    pub values: Vec<Num>,
}

impl SequenceSpec {
    pub fn build(&self) -> Result<TruncatedMomentSequence> {
        let exps = ExponentVector::new(values(&self.exponents))?;
        Ok(TruncatedMomentSequence::new(exps, values(&self.values))?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub task: Task,
    #[serde(default)]
    pub interval: Option<IntervalSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub polynomial: Option<PolynomialSpec>,
    #[serde(default)]
    pub sequence: Option<SequenceSpec>,
    #[serde(default)]
    pub points: Option<Vec<Num>>,
    #[serde(default)]
    pub support: Option<Support>,
    #[serde(default)]
    pub tolerance: Option<Num>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn need<'a, T>(v: &'a Option<T>, field: &str, task: Task) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| ParseError(format!("task {} needs a '{field}' field", task.name())))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| ParseError(format!("malformed problem file: {e}")))?;
        if p.version != VERSION {
            return Err(ParseError(format!("unsupported version {}, expected {VERSION}", p.version)));
        }
        p.check_shape()?;
        Ok(p)
    }

    /// Payload fields required by the task are present and no foreign ones are.
    fn check_shape(&self) -> Result<()> {
        let t = self.task;
        let has = [
            ("family", self.family.is_some()),
            ("mode", self.mode.is_some()),
            ("polynomial", self.polynomial.is_some()),
            ("sequence", self.sequence.is_some()),
            ("points", self.points.is_some()),
            ("support", self.support.is_some()),
        ];
        let allowed: &[&str] = match t {
            Task::CheckTsystem | Task::CheckEtsystem => &["family", "mode"],
            Task::Decompose | Task::CertifyNonneg => &["polynomial"],
            Task::MomentCheck | Task::RecoverAtoms => &["sequence"],
            Task::SignedRepr => &["sequence", "points"],
            Task::Hankel => &["sequence", "support"],
        };
        if let Some((name, _)) = has.iter().find(|(name, present)| *present && !allowed.contains(name)) {
            return Err(ParseError(format!("field '{name}' does not belong to task {}", t.name())));
        }
        match t {
            Task::CheckTsystem | Task::CheckEtsystem => {
                need(&self.family, "family", t)?;
                need(&self.interval, "interval", t)?;
            }
            Task::Decompose | Task::CertifyNonneg => {
                need(&self.polynomial, "polynomial", t)?;
                need(&self.interval, "interval", t)?;
            }
            Task::MomentCheck | Task::RecoverAtoms => {
                need(&self.sequence, "sequence", t)?;
                need(&self.interval, "interval", t)?;
            }
            Task::SignedRepr => {
                need(&self.sequence, "sequence", t)?;
                need(&self.points, "points", t)?;
            }
            Task::Hankel => {
                need(&self.sequence, "sequence", t)?;
            }
        }
        Ok(())
    }

    pub fn interval(&self) -> Result<Interval> {
        need(&self.interval, "interval", self.task)?.build()
    }

    pub fn family(&self) -> Result<FunctionFamily> {
        need(&self.family, "family", self.task)?.build()
    }

    pub fn polynomial(&self) -> Result<SparsePolynomial> {
        need(&self.polynomial, "polynomial", self.task)?.build()
    }

    pub fn sequence(&self) -> Result<TruncatedMomentSequence> {
        need(&self.sequence, "sequence", self.task)?.build()
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        Ok(values(need(&self.points, "points", self.task)?))
    }
}
