//! Run configuration and module specifications.
//!
//! Both are checked against the schemas in `schemas/` before they are
//! deserialized; every report embeds the resolved form.

use std::collections::BTreeMap;

use ltphi_core::arith::FieldSpec;
use ltphi_core::fourier::{solve_period, Fourier, OmegaConfig};
use ltphi_core::linalg::Mat;
use ltphi_core::lt::{LTData, PhiKind};
use ltphi_core::module::{GammaData, PhiGammaModule};
use ltphi_core::{CoeffRing, Field, Interval, LaurentSeries, Ring, Scalar, Q};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const RUN_CONFIG_SCHEMA: &str = include_str!("../schemas/run-config.schema.json");
pub const MODULE_SPEC_SCHEMA: &str = include_str!("../schemas/module-spec.schema.json");

/// Integer, rational string `"a/b"`, or power-basis coordinates.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Ratio(String),
    Coords(Vec<i64>),
}

impl ScalarJson {
    pub fn to_scalar(&self, fld: &'static Field) -> Result<Scalar, CliError> {
        match self {
            ScalarJson::Int(n) => Ok(fld.from_i64(*n)),
            ScalarJson::Ratio(s) => {
                let r = parse_q(s)?;
                Ok(fld.from_ratio(*r.numer(), *r.denom())?)
            }
            ScalarJson::Coords(c) => {
                if c.len() > fld.d {
                    return Err(CliError::Config(format!("{} coordinates for a degree-{} field", c.len(), fld.d)));
                }
                Ok(fld.from_coords(c))
            }
        }
    }
}

pub fn parse_q(s: &str) -> Result<Q, CliError> {
    s.trim().parse::<Q>().map_err(|_| CliError::Config(format!("not a rational number: {s:?}")))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub poly: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhiJson {
    Cyclotomic,
    Special,
    /// Sparse map degree -> coefficient.
    Custom { coefficients: BTreeMap<String, ScalarJson> },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OmegaMode {
    Exact,
    Solve,
    Symbolic,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OmegaJson {
    pub mode: OmegaMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ScalarJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Windows {
    /// Degree window of the Lubin-Tate data.
    pub lt: i32,
    /// `w` of the phi-variant Herr complex.
    pub herr: usize,
    /// `w` of the Psi-variant Herr complex.
    pub psi: usize,
    /// `w` of the psi-kernel certificate.
    pub psi_kernel: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Residuals must reach `N - guard`.
    pub guard: i32,
    /// Largest admissible `|slack|` in dimension counts.
    pub slack: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldJson,
    pub phi: PhiJson,
    pub omega: OmegaJson,
    pub level_n: u32,
    pub precision: i32,
    pub windows: Windows,
    /// Pairs `[t_s, t_r]` of rational strings.
    pub intervals: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub thresholds: Thresholds,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    /// Cyclotomic `Q_3` at `N = 6`.
    pub fn default_q3() -> RunConfig {
        RunConfig {
            field: FieldJson { p: 3, e: 1, f: 1, poly: vec![0, 1], precision: None },
            phi: PhiJson::Cyclotomic,
            omega: OmegaJson { mode: OmegaMode::Exact, v_omega: None, value: Some(ScalarJson::Int(1)) },
            level_n: 1,
            precision: 6,
            windows: Windows { lt: 80, herr: 15, psi: 60, psi_kernel: 30 },
            intervals: vec![["1/9".into(), "1/3".into()]],
            suite: None,
            thresholds: Thresholds { guard: 1, slack: 4 },
            seed: 0,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<RunConfig, CliError> {
        let v = validated(text, RUN_CONFIG_SCHEMA)?;
        let c: RunConfig = serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(p) = c.field.precision {
            if p != c.precision {
                return Err(CliError::Config(format!("field precision {p} differs from precision {}", c.precision)));
            }
        }
        for [a, b] in &c.intervals {
            Interval::new(parse_q(a)?, parse_q(b)?)?;
        }
        Ok(c)
    }

    pub fn field_spec(&self) -> FieldSpec {
        FieldSpec { p: self.field.p, e: self.field.e, f: self.field.f, poly: self.field.poly.clone(), precision: self.precision }
    }

    pub fn build_field(&self) -> Result<&'static Field, CliError> {
        Ok(self.field_spec().build().map_err(|e| CliError::Config(e.to_string()))?)
    }

    pub fn build_lt(&self, fld: &'static Field) -> Result<LTData, CliError> {
        let d = self.windows.lt;
        let lt = match &self.phi {
            PhiJson::Cyclotomic => LTData::cyclotomic(fld, d),
            PhiJson::Special => LTData::special(fld, d),
            PhiJson::Custom { coefficients } => {
                let mut c = BTreeMap::new();
                for (k, v) in coefficients {
                    let deg: i32 = k.parse().map_err(|_| CliError::Config(format!("bad degree {k:?}")))?;
                    if deg < 0 {
                        return Err(CliError::Config(format!("negative degree {deg} in phi")));
                    }
                    c.insert(deg, v.to_scalar(fld)?);
                }
                let top = c.keys().max().copied().unwrap_or(0);
                let coeffs = (0..=top).map(|k| c.get(&k).copied().unwrap_or(fld.zero())).collect();
                LTData::new(fld, LaurentSeries::polynomial(&fld.zero(), 0, coeffs), d, PhiKind::Custom)
            }
        };
        // An invalid Frobenius series is a configuration error.
        lt.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn intervals(&self) -> Result<Vec<Interval>, CliError> {
        self.intervals.iter().map(|[a, b]| Ok(Interval::new(parse_q(a)?, parse_q(b)?)?)).collect()
    }

    /// Fourier data for a numerical period; `None` for symbolic mode.
    pub fn build_fourier(&self, lt: &LTData) -> Result<Option<Fourier>, ltphi_core::Error> {
        let fld = lt.field();
        let omega = match self.omega.mode {
            OmegaMode::Symbolic => return Ok(None),
            OmegaMode::Solve => solve_period(lt, fld.n)?.omega,
            OmegaMode::Exact => match &self.omega.value {
                Some(v) => v.to_scalar(fld).map_err(|e| ltphi_core::Error::ConfigMismatch(e.to_string()))?,
                None => fld.one(),
            },
        };
        Fourier::new(lt.clone(), &OmegaConfig::ExactPeriod(omega)).map(Some)
    }

    pub fn v_omega(&self, fld: &Field) -> Result<Q, CliError> {
        match &self.omega.v_omega {
            Some(s) => parse_q(s),
            None => Ok(CoeffRing::default_v_omega(fld)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GammaJson {
    /// `phi(e) = delta(pi) e`, `gamma(e) = chi(gamma)^weight e`; `delta_pi`
    /// lists the coefficients of `1, eps, eps^2, ...`.
    Character { delta_pi: Vec<ScalarJson>, weight: i64 },
    /// Explicit matrix of the generator of `Gamma_level`.
    Matrices { level: u32, generator: Vec<Vec<ScalarJson>> },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModuleWindows {
    pub herr: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub rank: usize,
    pub interval: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_matrix: Option<Vec<Vec<ScalarJson>>>,
    pub gamma: GammaJson,
    pub windows: ModuleWindows,
    pub precision: i32,
}

impl ModuleSpec {
    pub fn from_json(text: &str) -> Result<ModuleSpec, CliError> {
        let v = validated(text, MODULE_SPEC_SCHEMA)?;
        serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn build(&self, four: &Fourier) -> Result<PhiGammaModule, CliError> {
        let fld = four.lt().field();
        if self.precision != fld.n {
            return Err(CliError::Config(format!("module precision {} differs from run precision {}", self.precision, fld.n)));
        }
        let interval = Interval::new(parse_q(&self.interval[0])?, parse_q(&self.interval[1])?)?;
        let matrix = |rows: &Vec<Vec<ScalarJson>>| -> Result<Mat, CliError> {
            let d = rows.len();
            let mut m = Mat::zeros(fld, d, d);
            for (i, r) in rows.iter().enumerate() {
                if r.len() != d {
                    return Err(CliError::Config("matrix is not square".into()));
                }
                for (j, x) in r.iter().enumerate() {
                    m.set(i, j, x.to_scalar(fld)?);
                }
            }
            Ok(m)
        };
        match &self.gamma {
            GammaJson::Character { delta_pi, weight } => {
                if self.rank != 1 {
                    return Err(CliError::Config("a character module has rank 1".into()));
                }
                if delta_pi.is_empty() {
                    return Err(CliError::Config("delta_pi is empty".into()));
                }
                let ring = CoeffRing::artinian(fld, delta_pi.len() as u32)?;
                let mut c = ring.scalar(fld.zero());
                let mut e = ring.scalar(fld.one());
                for d in delta_pi {
                    c = c.add(&e.mul_scalar(&d.to_scalar(fld)?));
                    e = e.mul(&ring.eps());
                }
                let m = PhiGammaModule::twist(four.clone(), &c, *weight, interval)?;
                if let Some(p) = &self.phi_matrix {
                    let given = matrix(p)?;
                    if given.rows() != 1 || !(given.get(0, 0) - m.phi_matrix().get(0, 0)).is_zero() {
                        return Err(CliError::Config("phi_matrix disagrees with delta_pi".into()));
                    }
                }
                Ok(m)
            }
            GammaJson::Matrices { level, generator } => {
                let p = self.phi_matrix.as_ref().ok_or_else(|| CliError::Config("phi_matrix is required".into()))?;
                let (p, g) = (matrix(p)?, matrix(generator)?);
                if p.rows() != self.rank {
                    return Err(CliError::Config(format!("phi_matrix has size {} for rank {}", p.rows(), self.rank)));
                }
                Ok(PhiGammaModule::new(four.clone(), p, GammaData::Matrices { level: *level, generator: g }, 1, interval)?)
            }
        }
    }
}

fn validated(text: &str, schema: &str) -> Result<Value, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let schema: Value = serde_json::from_str(schema).expect("shipped schema parses");
    let validator = jsonschema::validator_for(&schema).expect("shipped schema compiles");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{}: {e}", e.instance_path)).collect();
    if !errors.is_empty() {
        return Err(CliError::Config(format!("schema violation: {}", errors.join("; "))));
    }
    Ok(v)
}
