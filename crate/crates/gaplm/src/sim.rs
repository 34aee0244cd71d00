//! Monte-Carlo study of coverage probabilities and mean squared errors for
//! the Full/AIC/BIC/FIC/S-FIC estimators of four focus parameters.
//!
//! The generating model is a logistic GAPLM with two smooth components,
//! sin(2 pi x1) and 5 x2^4 + 3 x2^2 - 2, and five correlated normal linear
//! covariates whose last three coefficients shrink at the root-n rate.
//! Replications are keyed by (base_seed, rep) so any execution order gives
//! bit-identical summaries.

use ndarray::{array, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisExpansion, SplineSpec};
use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::fic::{
    apply_weights, fma_estimate, score_submodels, FicInputs, FocusSpec, WeightScheme,
    SubmodelFitSet,
};
use crate::fit::FitControls;
use crate::knots::{select_knots, KnotMode};
use crate::model::{enumerate_submodels, CovariatePartition};
use crate::stats::normal_quantile;

pub const METHODS: [WeightScheme; 5] = [
    WeightScheme::Full,
    WeightScheme::Aic,
    WeightScheme::Bic,
    WeightScheme::Fic,
    WeightScheme::Sfic,
];

pub const FOCUS_NAMES: [&str; 4] = ["mu1", "mu2", "mu3", "mu4"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimDesign {
    /// Observations per replication (the study uses 200 and 400).
    pub n: usize,
    /// Strength of the local misspecification; the exploratory coefficients
    /// are r0 * (2, 1, 3) / sqrt(n).
    pub r0: f64,
    /// AR-style correlation base of the linear covariates.
    pub varpi: f64,
    pub replications: usize,
    pub base_seed: u64,
    pub knot_mode: KnotMode,
    pub level: f64,
    pub degree: usize,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self {
            n: 200,
            r0: 4.0,
            varpi: 0.0,
            replications: 200,
            base_seed: 2010,
            knot_mode: KnotMode::Auto,
            level: 0.95,
            degree: 3,
        }
    }
}

impl SimDesign {
    pub fn true_beta(&self) -> [f64; 5] {
        let s = self.r0 / (self.n as f64).sqrt();
        [1.5, 2.0, 2.0 * s, s, 3.0 * s]
    }
}

pub fn eta1(x: f64) -> f64 {
    (2.0 * std::f64::consts::PI * x).sin()
}

pub fn eta2(x: f64) -> f64 {
    5.0 * x.powi(4) + 3.0 * x.powi(2) - 2.0
}

/// True values of the four focus parameters under a design.
pub fn true_focus_values(design: &SimDesign) -> [f64; 4] {
    let b = design.true_beta();
    let mu3 = 0.75 * b[0] + 0.05 * b[1] - 0.3 * b[2] + 0.1 * b[3] - 0.06 * b[4];
    let mu4 = eta1(0.86) + eta2(0.53) + 0.32 * b[0] - 0.87 * b[1] - 0.33 * b[2] - 0.15 * b[3]
        + 0.13 * b[4];
    [b[0], b[1], mu3, mu4]
}

/// The beta-gradients and plug-in points of the four foci.
fn focus_specs() -> [FocusSpec; 4] {
    [
        FocusSpec::coefficient(0, 5),
        FocusSpec::coefficient(1, 5),
        FocusSpec::Linear {
            coefs: array![0.75, 0.05, -0.3, 0.1, -0.06],
            offset: 0.0,
        },
        FocusSpec::General {
            eta_points: vec![(0, 0.86), (1, 0.53)],
            coefs: array![0.32, -0.87, -0.33, -0.15, 0.13],
            offset: 0.0,
        },
    ]
}

fn replication_rng(base_seed: u64, rep: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&base_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&rep.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Lower Cholesky factor of the AR-style correlation varpi^|i-j|.
fn correlation_chol(varpi: f64, d: usize) -> Array2<f64> {
    let corr = Array2::from_shape_fn((d, d), |(i, j)| {
        varpi.powi((i as i32 - j as i32).abs())
    });
    let na = crate::linalg::to_nalgebra(&corr);
    let chol = na
        .cholesky()
        .expect("AR correlation matrix is positive definite for |varpi| < 1");
    crate::linalg::from_nalgebra(&chol.l())
}

/// One simulated data set: responses, two uniform smooth covariates and the
/// five correlated normal linear covariates.
pub fn generate_dataset(design: &SimDesign, rep: u64) -> (Array1<f64>, Array2<f64>, Array2<f64>) {
    let n = design.n;
    let mut rng = replication_rng(design.base_seed, rep);
    let chol = correlation_chol(design.varpi, 5);
    let beta = design.true_beta();

    let x = Array2::from_shape_fn((n, 2), |_| rng.gen::<f64>());
    let mut z = Array2::zeros((n, 5));
    for i in 0..n {
        let e: [f64; 5] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        for j in 0..5 {
            let mut acc = 0.0;
            for k in 0..=j {
                acc += chol[[j, k]] * e[k];
            }
            z[[i, j]] = acc;
        }
    }
    let y = Array1::from_shape_fn(n, |i| {
        let mut m = eta1(x[[i, 0]]) + eta2(x[[i, 1]]);
        for j in 0..5 {
            m += beta[j] * z[[i, j]];
        }
        let p = QuasiFamily::BernoulliLogit.inv_link(m);
        if rng.gen::<f64>() < p {
            1.0
        } else {
            0.0
        }
    });
    (y, x, z)
}

/// Estimates and interval-coverage indicators of one replication,
/// methods x foci.
struct RepOutcome {
    estimate: [[f64; 4]; 5],
    covered: [[Option<bool>; 4]; 5],
}

fn run_replication(design: &SimDesign, rep: u64) -> Result<RepOutcome> {
    let (y, x, z) = generate_dataset(design, rep);
    let controls = FitControls::default();
    let family = QuasiFamily::BernoulliLogit;

    let search = select_knots(
        y.view(),
        &x,
        &z,
        family,
        design.degree,
        design.knot_mode,
        &controls,
    )?;
    let specs = vec![SplineSpec::new(design.degree, search.chosen)?; 2];
    let basis = BasisExpansion::expand(&x, &specs)?;

    let partition = CovariatePartition::new(
        vec!["z1".into(), "z2".into()],
        vec!["z3".into(), "z4".into(), "z5".into()],
    )?;
    let submodels = enumerate_submodels(&partition, None)?;
    let set = SubmodelFitSet::fit(y.view(), &basis, &z, &partition, &submodels, family, &controls)?;
    let full_idx = set
        .full_index()
        .ok_or_else(|| Error::Config("full model missing from enumeration".into()))?;

    let truths = true_focus_values(design);
    let z_level = normal_quantile(0.5 + design.level / 2.0);

    let mut outcome = RepOutcome {
        estimate: [[0.0; 4]; 5],
        covered: [[None; 4]; 5],
    };

    for (f_idx, focus) in focus_specs().into_iter().enumerate() {
        let inputs = FicInputs::estimate(
            &set.fits[full_idx],
            &basis,
            &z,
            family,
            focus.coefs().clone(),
            partition.d_c(),
        )?;
        let mut report = score_submodels(&set, &inputs, &focus, &basis, FOCUS_NAMES[f_idx])?;
        let truth = truths[f_idx];

        for (m_idx, scheme) in METHODS.into_iter().enumerate() {
            match scheme {
                // naive post-selection Wald interval from the chosen
                // submodel's own covariance, ignoring the selection step
                WeightScheme::Aic | WeightScheme::Bic => {
                    let chosen = if scheme == WeightScheme::Aic {
                        report.chosen_aic
                    } else {
                        report.chosen_bic
                    };
                    let s = &report.scores[chosen];
                    let half = z_level * s.se_naive;
                    outcome.estimate[m_idx][f_idx] = s.mu_hat;
                    outcome.covered[m_idx][f_idx] =
                        Some(s.mu_hat - half <= truth && truth <= s.mu_hat + half);
                }
                _ => {
                    let weights = apply_weights(scheme, &mut report, &set)?;
                    let fma = fma_estimate(&weights, &report, &set, &inputs, &focus, design.level)?;
                    outcome.estimate[m_idx][f_idx] = fma.mu_hat;
                    // interval coverage is not reported for the plug-in
                    // focus under FIC and S-FIC weighting
                    let report_cp = !(focus.is_general()
                        && matches!(scheme, WeightScheme::Fic | WeightScheme::Sfic));
                    outcome.covered[m_idx][f_idx] = if report_cp {
                        Some(fma.low <= truth && truth <= fma.up)
                    } else {
                        None
                    };
                }
            }
        }
    }
    Ok(outcome)
}

/// One (method, focus) cell of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub method: String,
    pub focus: String,
    pub cp: Option<f64>,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub n: usize,
    pub r0: f64,
    pub varpi: f64,
    pub replications: usize,
    pub reps_used: usize,
    pub failures: usize,
    pub cells: Vec<SimCell>,
}

impl SimSummary {
    pub fn cell(&self, method: WeightScheme, focus: &str) -> Option<&SimCell> {
        self.cells
            .iter()
            .find(|c| c.method == method.name() && c.focus == focus)
    }

    /// Table-style CSV: one row per method, CP and MSE per focus.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "method")?;
        for f in FOCUS_NAMES {
            write!(w, ",{f}_cp,{f}_mse")?;
        }
        writeln!(w)?;
        for method in METHODS {
            write!(w, "{}", method.name())?;
            for f in FOCUS_NAMES {
                let cell = self.cell(method, f).expect("complete table");
                match cell.cp {
                    Some(cp) => write!(w, ",{cp:.4}")?,
                    None => write!(w, ",")?,
                }
                write!(w, ",{:.6}", cell.mse)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Run the full study. Replications are independent and evaluated in
/// parallel; failed ones (separation, singular plug-ins) are excluded from
/// the aggregates and counted.
pub fn run_study(design: &SimDesign) -> SimSummary {
    let outcomes: Vec<Result<RepOutcome>> = (0..design.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(design, rep))
        .collect();

    let mut failures = 0usize;
    let truths = true_focus_values(design);
    let mut sums = [[0.0f64; 4]; 5];
    let mut covered = [[0usize; 4]; 5];
    let mut cp_counts = [[0usize; 4]; 5];
    let mut used = 0usize;

    for outcome in outcomes {
        match outcome {
            Ok(rep) => {
                used += 1;
                for m in 0..5 {
                    for f in 0..4 {
                        let err = rep.estimate[m][f] - truths[f];
                        sums[m][f] += err * err;
                        if let Some(hit) = rep.covered[m][f] {
                            cp_counts[m][f] += 1;
                            if hit {
                                covered[m][f] += 1;
                            }
                        }
                    }
                }
            }
            Err(e) => {
                log::warn!("replication failed and was excluded: {e}");
                failures += 1;
            }
        }
    }

    let mut cells = Vec::new();
    for (m, method) in METHODS.into_iter().enumerate() {
        for (f, focus) in FOCUS_NAMES.into_iter().enumerate() {
            let cp = if cp_counts[m][f] > 0 {
                Some(covered[m][f] as f64 / cp_counts[m][f] as f64)
            } else {
                None
            };
            let mse = if used > 0 {
                sums[m][f] / used as f64
            } else {
                f64::NAN
            };
            cells.push(SimCell {
                method: method.name().to_string(),
                focus: focus.to_string(),
                cp,
                mse,
            });
        }
    }

    SimSummary {
        n: design.n,
        r0: design.r0,
        varpi: design.varpi,
        replications: design.replications,
        reps_used: used,
        failures,
        cells,
    }
}
