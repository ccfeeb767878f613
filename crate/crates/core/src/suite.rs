//! Randomized check of every determinant identity and local bound on
//! seeded instances. Backs the `identities` command.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bordered::{add_both_identity, add_column_identity, add_row_identity, gram_increment};
use crate::compound::{compound, compound_norm_sq, gram_volume, minor};
use crate::error::Result;
use crate::generate::{gaussian_from, rng, Rng64};
use crate::local_bounds::{average_volume_selection, deleted_volume_sq, eig_ratio_bound, local_cur_bound};
use crate::subsets::subsets_vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    AddColumn,
    AddRow,
    AddBoth,
    AddBothZeroRow,
    GramIncrement,
    CauchyBinet,
    SpectralCompound,
    EigRatio,
    RectBound,
    Multiplicity,
    LocalCur,
}

impl Identity {
    pub const ALL: [Identity; 11] = [
        Identity::AddColumn,
        Identity::AddRow,
        Identity::AddBoth,
        Identity::AddBothZeroRow,
        Identity::GramIncrement,
        Identity::CauchyBinet,
        Identity::SpectralCompound,
        Identity::EigRatio,
        Identity::RectBound,
        Identity::Multiplicity,
        Identity::LocalCur,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::AddColumn => "add-column",
            Identity::AddRow => "add-row",
            Identity::AddBoth => "add-both",
            Identity::AddBothZeroRow => "add-both-zero-row",
            Identity::GramIncrement => "gram-increment",
            Identity::CauchyBinet => "cauchy-binet",
            Identity::SpectralCompound => "compound-spectral",
            Identity::EigRatio => "eig-ratio-bound",
            Identity::RectBound => "rect-bound",
            Identity::Multiplicity => "multiplicity",
            Identity::LocalCur => "local-cur-bound",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }

    /// Relative tolerance the residual must stay under.
    pub fn tolerance(self) -> f64 {
        match self {
            Identity::SpectralCompound => 1e-8,
            _ => 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Relation {
    Equal,
    AtMost,
}

/// One evaluated `lhs (= | ≤) rhs` with a comparison floor `scale`.
#[derive(Clone, Copy, Debug)]
struct Check {
    lhs: f64,
    rhs: f64,
    scale: f64,
    relation: Relation,
}

impl Check {
    fn eq(lhs: f64, rhs: f64, scale: f64) -> Check {
        Check {
            lhs,
            rhs,
            scale,
            relation: Relation::Equal,
        }
    }

    fn le(lhs: f64, rhs: f64, scale: f64) -> Check {
        Check {
            lhs,
            rhs,
            scale,
            relation: Relation::AtMost,
        }
    }

    fn residual(&self) -> f64 {
        let denom = self.lhs.abs().max(self.rhs.abs()).max(self.scale);
        if denom == 0.0 {
            return 0.0;
        }
        let gap = match self.relation {
            Relation::Equal => (self.lhs - self.rhs).abs(),
            Relation::AtMost => (self.lhs - self.rhs).max(0.0),
        };
        gap / denom
    }

    fn corrupted(self) -> Check {
        let bump = 0.01 * self.lhs.abs().max(self.rhs.abs()).max(self.scale).max(1.0);
        Check {
            lhs: self.rhs + bump,
            ..self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityStat {
    pub identity: Identity,
    pub checks: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteFailure {
    pub identity: Identity,
    pub trial: usize,
    pub instance_seed: u64,
    /// Residual, or `inf` when the check raised an error.
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub trials: usize,
    pub seed: u64,
    pub stats: Vec<IdentityStat>,
    pub first_failure: Option<SuiteFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Seed of the instance used in trial `trial`.
pub fn instance_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

fn normals(rng: &mut Rng64, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn checks_for(identity: Identity, rng: &mut Rng64) -> Result<Vec<Check>> {
    Ok(match identity {
        Identity::AddColumn | Identity::AddRow | Identity::AddBoth | Identity::AddBothZeroRow => {
            let r = rng.random_range(1..=8usize);
            let k = rng.random_range(1..=r);
            let a = gaussian_from(r, k, rng);
            let b = normals(rng, r);
            let c = normals(rng, k);
            let d: f64 = rng.sample(StandardNormal);
            let res = match identity {
                Identity::AddColumn => add_column_identity(&a, &b)?,
                Identity::AddRow => add_row_identity(&a, &c)?,
                Identity::AddBoth => add_both_identity(&a, &b, &c, d)?,
                _ => {
                    let both = add_both_identity(&a, &b, &vec![0.0; k], d)?;
                    let col = add_column_identity(&a, &b)?;
                    let expected = col.rhs + gram_volume(&a) * d * d;
                    return Ok(vec![
                        Check::eq(both.rhs, expected, both.scale),
                        Check::eq(both.lhs, both.rhs, both.scale),
                        Check::eq(both.schur_scalar.unwrap_or(f64::NAN), d, 1.0),
                    ]);
                }
            };
            vec![Check::eq(res.lhs, res.rhs, res.scale)]
        }
        Identity::GramIncrement => {
            let cols = rng.random_range(1..=7usize);
            let rows = rng.random_range(cols + 1..=8);
            let inc = gram_increment(&gaussian_from(rows, cols, rng))?;
            vec![Check::eq(inc.increment, inc.minor_sum, inc.scale)]
        }
        Identity::CauchyBinet => {
            let rows = rng.random_range(1..=8usize);
            let cols = rng.random_range(1..=rows.min(5));
            let a = gaussian_from(rows, cols, rng);
            let all: Vec<usize> = (0..cols).collect();
            let sum: f64 = subsets_vec(rows, cols)?
                .iter()
                .map(|s| minor(&a, s.indices(), &all).powi(2))
                .sum();
            vec![Check::eq(gram_volume(&a), sum, 0.0)]
        }
        Identity::SpectralCompound => {
            let rows = rng.random_range(1..=8usize);
            let cols = rng.random_range(1..=5usize);
            let k = rng.random_range(1..=rows.min(cols));
            let m = gaussian_from(rows, cols, rng);
            vec![Check::eq(compound_norm_sq(&m, k)?, compound(&m, k)?.norm_sq(), 0.0)]
        }
        Identity::EigRatio => {
            let n = rng.random_range(1..=6usize);
            let g = gaussian_from(n + 3, n, rng).gram();
            let res = eig_ratio_bound(&g)?;
            vec![
                Check::le(res.ratio, res.harmonic_bound, 0.0),
                Check::le(res.harmonic_bound, res.bound, 0.0),
                Check::eq(res.minor_sum, res.spectral_minor_sum, 0.0),
            ]
        }
        Identity::RectBound => {
            let cols = rng.random_range(1..=5usize);
            let rows = rng.random_range(cols..=8);
            let sel = average_volume_selection(&gaussian_from(rows, cols, rng))?;
            vec![
                Check::le(sel.average_volume_sq, sel.selected_volume_sq, 0.0),
                Check::le(sel.volume_ratio(), sel.bound_value, 0.0),
            ]
        }
        Identity::Multiplicity => {
            let cols = rng.random_range(1..=5usize);
            let rows = rng.random_range(cols..=6);
            let x = gaussian_from(rows, cols, rng);
            let (r, k) = (rows - 1, cols - 1);
            let all_rows: Vec<usize> = (0..rows).collect();
            let lhs: f64 = (0..rows)
                .flat_map(|i| (0..cols).map(move |j| (i, j)))
                .map(|(i, j)| deleted_volume_sq(&x, i, j))
                .sum();
            let per_column: f64 = (0..cols)
                .map(|j| {
                    let keep: Vec<usize> = (0..cols).filter(|&t| t != j).collect();
                    gram_volume(&x.select(&all_rows, &keep))
                })
                .sum();
            vec![Check::eq(lhs, (r + 1 - k) as f64 * per_column, 0.0)]
        }
        Identity::LocalCur => {
            let cols = rng.random_range(1..=5usize);
            let rows = rng.random_range(cols..=8);
            let rep = local_cur_bound(&gaussian_from(rows, cols, rng))?;
            vec![
                Check::le(rep.measured_error_sq, rep.volume_ratio, 0.0),
                Check::le(rep.volume_ratio, rep.bound, 0.0),
            ]
        }
    })
}

/// Runs every identity on `trials` instances. `corrupt` perturbs one
/// identity so that it fails, as a negative control.
pub fn run_identity_suite(trials: usize, seed: u64, corrupt: Option<Identity>) -> SuiteReport {
    let mut stats: Vec<IdentityStat> = Identity::ALL
        .iter()
        .map(|&identity| IdentityStat {
            identity,
            checks: 0,
            max_residual: 0.0,
        })
        .collect();
    let mut first_failure = None;
    for trial in 0..trials {
        let inst = instance_seed(seed, trial);
        for (slot, &identity) in Identity::ALL.iter().enumerate() {
            // each identity gets its own stream so instances do not shift
            // when another identity changes how many draws it consumes
            let mut r = rng(inst ^ ((slot as u64 + 1) << 56));
            let outcome = checks_for(identity, &mut r);
            let (residual, error) = match outcome {
                Ok(checks) => {
                    let worst = checks
                        .into_iter()
                        .map(|c| if corrupt == Some(identity) { c.corrupted() } else { c })
                        .map(|c| c.residual())
                        .fold(0.0, |acc: f64, v| if v.is_nan() { f64::INFINITY } else { acc.max(v) });
                    stats[slot].checks += 1;
                    (worst, None)
                }
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            let stat = &mut stats[slot];
            stat.max_residual = stat.max_residual.max(residual);
            if !(residual <= identity.tolerance()) && first_failure.is_none() {
                first_failure = Some(SuiteFailure {
                    identity,
                    trial,
                    instance_seed: inst,
                    residual,
                    error,
                });
            }
        }
    }
    SuiteReport {
        trials,
        seed,
        stats,
        first_failure,
    }
}
