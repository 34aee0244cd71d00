//! Quasi-likelihood maximization by iteratively reweighted least squares
//! (Fisher scoring) with step halving, over the joint coefficient vector
//! [intercept | spline block | linear block].

use ndarray::{s, Array1, Array2, ArrayView1, Axis};

use crate::basis::BasisExpansion;
use crate::error::{Error, Result};
use crate::family::{QuasiFamily, RhoOrder};
use crate::linalg;

/// Smallest working weight; bernoulli means clamped so mu(1-mu) stays
/// above this inside the weighted solves.
const MIN_WEIGHT: f64 = 1e-12;

/// All fitted means within this distance of their responses on a
/// bounded-mean family means the maximum lies at infinity.
const SEPARATION_GAP: f64 = 1e-6;

/// Linear predictors beyond this magnitude on a bounded-mean family indicate
/// quasi-separation: the objective is flat to machine precision along the
/// divergent direction while coefficients grow without bound.
const ETA_OVERFLOW: f64 = 100.0;

/// What to do when separation is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparationPolicy {
    /// Fail with [`Error::Separation`].
    #[default]
    Error,
    /// Return the current iterate with `converged = false` and
    /// `separated = true`; the direction still classifies correctly, which is
    /// what leave-one-out prediction needs.
    StopEarly,
}

#[derive(Debug, Clone)]
pub struct FitControls {
    /// Gradient criterion: converged when max|grad| < tol * (1 + |qloglik|).
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub on_separation: SeparationPolicy,
}

impl Default for FitControls {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            max_halvings: 30,
            on_separation: SeparationPolicy::Error,
        }
    }
}

/// A converged quasi-likelihood fit.
#[derive(Debug, Clone)]
pub struct GaplmFit {
    /// Raw intercept of the fitted design (centering offsets not folded in).
    pub intercept: f64,
    /// Spline coefficients in the full raw layout, zero at each covariate's
    /// dropped leading function.
    pub gamma_hat: Array1<f64>,
    /// Linear coefficients for the Z columns passed to the fitter.
    pub beta_hat: Array1<f64>,
    /// Per-observation linear predictor.
    pub eta_hat: Array1<f64>,
    /// Total quasi-log-likelihood (sum over observations).
    pub qloglik: f64,
    /// Accepted-step objective values, non-decreasing.
    pub qloglik_trace: Vec<f64>,
    /// Expected information X'WX at the solution, W = rho_2.
    pub fisher: Array2<f64>,
    /// Inverse information, fitted-parameter order.
    pub cov: Array2<f64>,
    /// Linear-coefficient block of `cov`.
    pub beta_cov: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub separated: bool,
    pub n: usize,
    /// Number of fitted parameters (intercept + reduced spline + linear).
    pub n_params: usize,
}

impl GaplmFit {
    /// Intercept with the spline centering constants folded in, so that
    /// predictions written as intercept + sum of centered components match
    /// the fitted linear predictor.
    pub fn adjusted_intercept(&self, basis: &BasisExpansion) -> f64 {
        let offsets: f64 = (0..basis.n_covariates())
            .map(|a| basis.center_offset(a, self.gamma_hat.view()))
            .sum();
        self.intercept + offsets
    }
}

/// Maximize the quasi-likelihood over [1 | basis | z] and return the fit.
///
/// `z` holds the linear covariates of the submodel being fitted (certain
/// columns first). The spline block is shared by every submodel.
pub fn irls_fit(
    y: ArrayView1<f64>,
    basis: &BasisExpansion,
    z: &Array2<f64>,
    family: QuasiFamily,
    controls: &FitControls,
) -> Result<GaplmFit> {
    let n = y.len();
    if basis.n_rows() != n || z.nrows() != n {
        return Err(Error::Dimension(format!(
            "response has {n} rows, basis {}, linear block {}",
            basis.n_rows(),
            z.nrows()
        )));
    }
    let y_owned;
    let y_slice = match y.as_slice() {
        Some(s) => s,
        None => {
            y_owned = y.to_vec();
            &y_owned
        }
    };
    family.validate_response(y_slice)?;
    for ((i, j), v) in z.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "linear covariate".into(),
                row: i,
                col: j,
            });
        }
    }

    let design = assemble_design(basis, z);
    let q = design.ncols();
    if n <= q {
        return Err(Error::Dimension(format!(
            "need more observations than parameters: n = {n}, parameters = {q}"
        )));
    }

    let mut theta = Array1::<f64>::zeros(q);
    let mut eta = design.dot(&theta);
    let mut qll = total_qll(family, &eta, y);
    let mut trace = vec![qll];
    let mut iterations = 0usize;
    let mut separated = false;

    loop {
        let score: Array1<f64> =
            Array1::from_shape_fn(n, |i| family.q1(eta[i], y[i]));
        let grad = design.t().dot(&score);
        let grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));

        // Complete separation: every fitted mean pinned to its response.
        if family.separable() && all_pinned(family, &eta, y) {
            match controls.on_separation {
                SeparationPolicy::Error => return Err(Error::Separation),
                SeparationPolicy::StopEarly => {
                    separated = true;
                    break;
                }
            }
        }

        if grad_norm < controls.tol * (1.0 + qll.abs()) {
            // Quasi-separation: the gradient criterion can fire anywhere
            // along a divergent ray where the objective is flat to machine
            // precision. A huge linear predictor at "convergence" marks it;
            // transient large iterates mid-optimization are fine.
            if family.separable() && eta.iter().any(|&m| m.abs() > ETA_OVERFLOW) {
                match controls.on_separation {
                    SeparationPolicy::Error => return Err(Error::Separation),
                    SeparationPolicy::StopEarly => {
                        separated = true;
                        break;
                    }
                }
            }
            break;
        }
        if iterations >= controls.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                reason: format!("gradient max-norm still {grad_norm:.3e}"),
            });
        }
        iterations += 1;

        let weights: Array1<f64> = Array1::from_shape_fn(n, |i| {
            family.rho(eta[i], RhoOrder::Two).max(MIN_WEIGHT)
        });
        let xtwx = weighted_gram(&design, &weights);
        let delta = linalg::solve_spd(&xtwx, &grad).map_err(|_| Error::RankDeficient {
            col: linalg::weakest_column(&xtwx),
            reason: "weighted information matrix is singular".into(),
        })?;

        // Step halving: accept the first step length that does not decrease
        // the objective.
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..=controls.max_halvings {
            let cand = &theta + &(&delta * step);
            let cand_eta = design.dot(&cand);
            let cand_qll = total_qll(family, &cand_eta, y);
            if cand_qll.is_finite() && cand_qll >= qll {
                theta = cand;
                eta = cand_eta;
                qll = cand_qll;
                trace.push(qll);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No ascent direction left; either we are at the maximum or the
            // problem is numerically stuck.
            if grad_norm < controls.tol.sqrt() * (1.0 + qll.abs()) {
                if family.separable() && eta.iter().any(|&m| m.abs() > ETA_OVERFLOW) {
                    match controls.on_separation {
                        SeparationPolicy::Error => return Err(Error::Separation),
                        SeparationPolicy::StopEarly => {
                            separated = true;
                        }
                    }
                }
                break;
            }
            return Err(Error::NonConvergence {
                iterations,
                reason: "step halving exhausted without ascent".into(),
            });
        }
    }

    // Information and covariance at the solution.
    let weights: Array1<f64> = Array1::from_shape_fn(n, |i| {
        family.rho(eta[i], RhoOrder::Two).max(MIN_WEIGHT)
    });
    let fisher = weighted_gram(&design, &weights);
    let cov = linalg::inverse_spd(&fisher).map_err(|_| Error::RankDeficient {
        col: linalg::weakest_column(&fisher),
        reason: "information matrix is singular at the solution".into(),
    })?;

    let k_red = basis.reduced_cols();
    let beta_cov = cov.slice(s![1 + k_red.., 1 + k_red..]).to_owned();
    let gamma_hat = basis.embed_gamma(theta.slice(s![1..1 + k_red]));
    let beta_hat = theta.slice(s![1 + k_red..]).to_owned();

    Ok(GaplmFit {
        intercept: theta[0],
        gamma_hat,
        beta_hat,
        eta_hat: eta,
        qloglik: qll,
        qloglik_trace: trace,
        fisher,
        cov,
        beta_cov,
        iterations,
        converged: !separated,
        separated,
        n,
        n_params: q,
    })
}

/// Linear predictor at a new point. `x` holds the smooth covariates already
/// rescaled to [0, 1] with the training min-max; `z` the linear covariates in
/// fitting order.
pub fn predict_linear(
    fit: &GaplmFit,
    basis: &BasisExpansion,
    x: &[f64],
    z: &[f64],
) -> Result<f64> {
    if z.len() != fit.beta_hat.len() {
        return Err(Error::Dimension(format!(
            "expected {} linear covariates, got {}",
            fit.beta_hat.len(),
            z.len()
        )));
    }
    let mut m = fit.adjusted_intercept(basis);
    for (a, &xa) in x.iter().enumerate() {
        m += basis.component_value(a, fit.gamma_hat.view(), xa)?;
    }
    for (j, &zj) in z.iter().enumerate() {
        m += fit.beta_hat[j] * zj;
    }
    Ok(m)
}

/// Mean-scale prediction via the inverse link.
pub fn predict_response(
    fit: &GaplmFit,
    basis: &BasisExpansion,
    family: QuasiFamily,
    x: &[f64],
    z: &[f64],
) -> Result<f64> {
    Ok(family.inv_link(predict_linear(fit, basis, x, z)?))
}

pub(crate) fn assemble_design(basis: &BasisExpansion, z: &Array2<f64>) -> Array2<f64> {
    let n = basis.n_rows();
    let k_red = basis.reduced_cols();
    let q = 1 + k_red + z.ncols();
    let mut design = Array2::zeros((n, q));
    design.column_mut(0).fill(1.0);
    design
        .slice_mut(s![.., 1..1 + k_red])
        .assign(&basis.reduced_design());
    if z.ncols() > 0 {
        design.slice_mut(s![.., 1 + k_red..]).assign(z);
    }
    design
}

fn total_qll(family: QuasiFamily, eta: &Array1<f64>, y: ArrayView1<f64>) -> f64 {
    eta.iter()
        .zip(y.iter())
        .map(|(&m, &yi)| family.quasi_loglik(m, yi))
        .sum()
}

fn all_pinned(family: QuasiFamily, eta: &Array1<f64>, y: ArrayView1<f64>) -> bool {
    eta.iter().zip(y.iter()).all(|(&m, &yi)| {
        let mu = family.inv_link(m);
        (yi - mu).abs() < SEPARATION_GAP * (1.0 + yi.abs())
    })
}

fn weighted_gram(design: &Array2<f64>, weights: &Array1<f64>) -> Array2<f64> {
    let weighted = design * &weights.view().insert_axis(Axis(1));
    design.t().dot(&weighted)
}
