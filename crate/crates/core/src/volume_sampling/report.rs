//! `BoundReport` and its flat text forms.
//!
//! The key-value form is one `key=value` line per entry of [`CSV_COLUMNS`],
//! in that order; the CSV form has a mandatory header row with the same
//! names followed by one row per report. Absent optional values are empty.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the expectation fields of a report were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimationMode {
    /// Only the closed-form bounds were computed.
    BoundsOnly,
    /// Full enumeration of the sampling distribution.
    Exact,
    /// Sample means over `samples` draws seeded with `seed`.
    MonteCarlo {
        samples: u64,
        seed: u64,
        b_std_error: f64,
        d_std_error: f64,
        total_std_error: f64,
    },
}

impl EstimationMode {
    pub fn name(&self) -> &'static str {
        match self {
            EstimationMode::BoundsOnly => "bounds_only",
            EstimationMode::Exact => "exact",
            EstimationMode::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

/// Measured expected errors and every closed-form bound for one `(M, r, k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub r: usize,
    pub m: usize,
    pub n: usize,
    /// `E ‖(I − AA⁺) B‖²`
    pub b_err_expected: Option<f64>,
    /// `E ‖C A⁺ B − D‖²`
    pub d_err_expected: Option<f64>,
    /// `E ‖CUR − M‖²`
    pub total_expected: Option<f64>,
    /// `(k+1)(r−k)/(m−k) · compound_ratio`
    pub thm2_rhs: f64,
    /// `(k+1)²(m−r)/(m−k) · compound_ratio`
    pub thm3_rhs: f64,
    /// `interpolation_factor · compound_ratio`
    pub thm4_rhs: f64,
    /// `interpolation_factor · e_{k+1}(σ²)/e_k(σ²)`, for `r < min(m, n)`.
    pub sv_bound: Option<f64>,
    /// `interpolation_factor · Σ_{i>k} σ_i²`, for `r < min(m, n)`.
    pub tail_bound: Option<f64>,
    /// `‖C_{k+1}(M)‖² / ‖C_k(M)‖²`
    pub compound_ratio: f64,
    pub interpolation_factor: f64,
    pub estimation_mode: EstimationMode,
}

/// Column order of the CSV and key-value forms.
pub const CSV_COLUMNS: [&str; 20] = [
    "m",
    "n",
    "k",
    "r",
    "estimation_mode",
    "samples",
    "seed",
    "b_err_expected",
    "d_err_expected",
    "total_expected",
    "b_std_error",
    "d_std_error",
    "total_std_error",
    "thm2_rhs",
    "thm3_rhs",
    "thm4_rhs",
    "sv_bound",
    "tail_bound",
    "compound_ratio",
    "interpolation_factor",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BoundReport {
    /// `d_err_expected − b_err_expected`. For symmetric positive definite
    /// inputs the two components are expected to be close; this is a
    /// diagnostic only.
    pub fn component_gap(&self) -> Option<f64> {
        Some(self.d_err_expected? - self.b_err_expected?)
    }

    /// Values in [`CSV_COLUMNS`] order.
    pub fn fields(&self) -> Vec<String> {
        let (samples, seed, bse, dse, tse) = match self.estimation_mode {
            EstimationMode::MonteCarlo {
                samples,
                seed,
                b_std_error,
                d_std_error,
                total_std_error,
            } => (
                samples.to_string(),
                seed.to_string(),
                b_std_error.to_string(),
                d_std_error.to_string(),
                total_std_error.to_string(),
            ),
            _ => Default::default(),
        };
        vec![
            self.m.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.r.to_string(),
            self.estimation_mode.name().to_string(),
            samples,
            seed,
            opt(self.b_err_expected),
            opt(self.d_err_expected),
            opt(self.total_expected),
            bse,
            dse,
            tse,
            self.thm2_rhs.to_string(),
            self.thm3_rhs.to_string(),
            self.thm4_rhs.to_string(),
            opt(self.sv_bound),
            opt(self.tail_bound),
            self.compound_ratio.to_string(),
            self.interpolation_factor.to_string(),
        ]
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (key, value) in CSV_COLUMNS.iter().zip(self.fields()) {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }

    pub fn from_kv(text: &str) -> Result<BoundReport> {
        let mut map: HashMap<&str, &str> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected key=value".into(),
            })?;
            if !CSV_COLUMNS.contains(&key) {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("unknown key {key:?}"),
                });
            }
            if map.insert(key, value).is_some() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("duplicate key {key:?}"),
                });
            }
        }
        let values = CSV_COLUMNS
            .iter()
            .map(|key| {
                map.get(key).copied().ok_or_else(|| Error::Parse {
                    line: 0,
                    message: format!("missing key {key:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_fields(&values, 0)
    }

    fn from_fields(values: &[&str], line: usize) -> Result<BoundReport> {
        let err = |message: String| Error::Parse { line, message };
        if values.len() != CSV_COLUMNS.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                CSV_COLUMNS.len(),
                values.len()
            )));
        }
        let get = |name: &str| values[CSV_COLUMNS.iter().position(|c| *c == name).expect("known column")].trim();
        let count = |name: &str| -> Result<usize> {
            get(name)
                .parse::<usize>()
                .map_err(|_| err(format!("{name}: invalid count {:?}", get(name))))
        };
        let int = |name: &str| -> Result<u64> {
            get(name)
                .parse::<u64>()
                .map_err(|_| err(format!("{name}: invalid integer {:?}", get(name))))
        };
        let real = |name: &str| -> Result<f64> {
            let v = get(name)
                .parse::<f64>()
                .map_err(|_| err(format!("{name}: invalid number {:?}", get(name))))?;
            if !v.is_finite() {
                return Err(err(format!("{name}: non-finite value")));
            }
            Ok(v)
        };
        let optional = |name: &str| -> Result<Option<f64>> {
            if get(name).is_empty() {
                Ok(None)
            } else {
                real(name).map(Some)
            }
        };
        let mc_fields = ["samples", "seed", "b_std_error", "d_std_error", "total_std_error"];
        let estimation_mode = match get("estimation_mode") {
            "monte_carlo" => EstimationMode::MonteCarlo {
                samples: int("samples")?,
                seed: int("seed")?,
                b_std_error: real("b_std_error")?,
                d_std_error: real("d_std_error")?,
                total_std_error: real("total_std_error")?,
            },
            mode @ ("exact" | "bounds_only") => {
                if let Some(f) = mc_fields.iter().find(|f| !get(f).is_empty()) {
                    return Err(err(format!("{f} is only valid for monte_carlo rows")));
                }
                if mode == "exact" {
                    EstimationMode::Exact
                } else {
                    EstimationMode::BoundsOnly
                }
            }
            other => return Err(err(format!("unknown estimation_mode {other:?}"))),
        };
        Ok(BoundReport {
            k: count("k")?,
            r: count("r")?,
            m: count("m")?,
            n: count("n")?,
            b_err_expected: optional("b_err_expected")?,
            d_err_expected: optional("d_err_expected")?,
            total_expected: optional("total_expected")?,
            thm2_rhs: real("thm2_rhs")?,
            thm3_rhs: real("thm3_rhs")?,
            thm4_rhs: real("thm4_rhs")?,
            sv_bound: optional("sv_bound")?,
            tail_bound: optional("tail_bound")?,
            compound_ratio: real("compound_ratio")?,
            interpolation_factor: real("interpolation_factor")?,
            estimation_mode,
        })
    }

    /// Header row plus one row per report.
    pub fn write_csv(reports: &[BoundReport]) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for rep in reports {
            out.push_str(&rep.fields().join(","));
            out.push('\n');
        }
        out
    }

    pub fn read_csv(text: &str) -> Result<Vec<BoundReport>> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header row".into(),
        })?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names != CSV_COLUMNS {
            return Err(Error::Parse {
                line: hline,
                message: "header does not match the report columns".into(),
            });
        }
        lines
            .map(|(lineno, line)| {
                let values: Vec<&str> = line.split(',').collect();
                Self::from_fields(&values, lineno)
            })
            .collect()
    }
}
