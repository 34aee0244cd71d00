//! Interior-knot-count selection for the full model by BIC over the
//! sample-size-driven candidate range.
//!
//! The anchor count N_r is ceiling(n^(1/5.5)) by default, with
//! oversmoothing (n^(1/3)) and undersmoothing (n^(1/10)) variants for the
//! sensitivity study; candidates are the integers in [2/3 N_r, 4/3 N_r],
//! endpoints rounded inward. Every smooth covariate shares the selected
//! count.

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::basis::{BasisExpansion, SplineSpec};
use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::fit::{irls_fit, FitControls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnotMode {
    /// N_r = ceiling(n^(1/5.5)).
    Auto,
    /// Oversmoothing variant: N_r = ceiling(n^(1/3)).
    Over,
    /// Undersmoothing variant: N_r = ceiling(n^(1/10)).
    Under,
    /// Skip the search and use this many interior knots.
    Fixed(usize),
}

impl KnotMode {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "auto" => Ok(KnotMode::Auto),
            "auto-over" | "over" => Ok(KnotMode::Over),
            "auto-under" | "under" => Ok(KnotMode::Under),
            other => other
                .parse::<usize>()
                .map(KnotMode::Fixed)
                .map_err(|_| Error::Config(format!("cannot parse knot mode '{other}'"))),
        }
    }

    fn exponent(&self) -> f64 {
        match self {
            KnotMode::Auto => 1.0 / 5.5,
            KnotMode::Over => 1.0 / 3.0,
            KnotMode::Under => 1.0 / 10.0,
            KnotMode::Fixed(_) => unreachable!("fixed mode has no anchor exponent"),
        }
    }
}

/// Anchor count and the inward-rounded candidate interval.
pub fn candidate_range(n: usize, mode: KnotMode) -> (usize, Vec<usize>) {
    if let KnotMode::Fixed(j) = mode {
        return (j, vec![j]);
    }
    let n_r = (n as f64).powf(mode.exponent()).ceil() as usize;
    let lo = (2 * n_r).div_ceil(3);
    let hi = 4 * n_r / 3;
    (n_r, (lo..=hi).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotSearch {
    pub n: usize,
    pub n_r: usize,
    pub candidates: Vec<usize>,
    pub chosen: usize,
    /// (candidate, BIC) for every candidate whose full model fit.
    pub bic_trace: Vec<(usize, f64)>,
    /// Candidates excluded because the full model failed to fit.
    pub failed: Vec<(usize, String)>,
}

/// Fit the full model once per candidate count and keep the BIC minimizer;
/// ties go to the smallest candidate.
pub fn select_knots(
    y: ArrayView1<f64>,
    x_smooth: &Array2<f64>,
    z_full: &Array2<f64>,
    family: QuasiFamily,
    degree: usize,
    mode: KnotMode,
    controls: &FitControls,
) -> Result<KnotSearch> {
    let n = y.len();
    let (n_r, candidates) = candidate_range(n, mode);
    if let KnotMode::Fixed(j) = mode {
        return Ok(KnotSearch {
            n,
            n_r,
            candidates,
            chosen: j,
            bic_trace: Vec::new(),
            failed: Vec::new(),
        });
    }

    let mut bic_trace = Vec::new();
    let mut failed = Vec::new();
    for &j in &candidates {
        let specs: Vec<SplineSpec> = (0..x_smooth.ncols())
            .map(|_| SplineSpec::new(degree, j))
            .collect::<Result<_>>()?;
        let attempt = BasisExpansion::expand(x_smooth, &specs)
            .and_then(|exp| irls_fit(y, &exp, z_full, family, controls));
        match attempt {
            Ok(fit) => {
                let bic = -2.0 * fit.qloglik + fit.n_params as f64 * (n as f64).ln();
                bic_trace.push((j, bic));
            }
            Err(e) => {
                log::warn!("knot candidate {j} excluded: {e}");
                failed.push((j, e.to_string()));
            }
        }
    }

    let chosen = bic_trace
        .iter()
        .fold(None::<(usize, f64)>, |best, &(j, bic)| match best {
            Some((_, b)) if bic >= b => best,
            _ => Some((j, bic)),
        })
        .map(|(j, _)| j)
        .ok_or_else(|| {
            Error::Config("every knot candidate failed to fit the full model".into())
        })?;

    Ok(KnotSearch {
        n,
        n_r,
        candidates,
        chosen,
        bic_trace,
        failed,
    })
}
