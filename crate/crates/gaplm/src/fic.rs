//! Focused information criterion and frequentist model averaging.
//!
//! The plug-in ingredients come from the full-model fit: partial residuals
//! psi of the linear covariates after projecting out the spline space,
//! D-hat as their weighted sample Gram, Sigma-hat from the covariance
//! sandwich D * (n Cov(beta_full)) * D, and delta-hat = sqrt(n) times the
//! exploratory block of the full-model estimate. Every submodel is then
//! scored by the mean-squared-error expansion of its focus estimator, and
//! the smoothed weights, averaged estimate and bias-corrected interval
//! follow from those scores.

use ndarray::{s, Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::basis::BasisExpansion;
use crate::error::{Error, Result};
use crate::family::{QuasiFamily, RhoOrder};
use crate::fit::{irls_fit, FitControls, GaplmFit};
use crate::linalg;
use crate::model::{CovariatePartition, SubmodelSpec};
use crate::stats::normal_quantile;

// ---------------------------------------------------------------------------
// Focus parameters
// ---------------------------------------------------------------------------

/// A scalar focus parameter.
///
/// `Linear` is c'beta + offset. `General` adds plugged-in values of the
/// centered smooth components at fixed evaluation points (already rescaled
/// to [0, 1]); such estimators are not root-n consistent, so intervals for
/// them are flagged by the callers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FocusSpec {
    Linear {
        coefs: Array1<f64>,
        offset: f64,
    },
    General {
        /// (smooth covariate index, evaluation point in [0, 1]) pairs.
        eta_points: Vec<(usize, f64)>,
        coefs: Array1<f64>,
        offset: f64,
    },
}

impl FocusSpec {
    /// Focus on a single coefficient.
    pub fn coefficient(index: usize, d: usize) -> Self {
        let mut coefs = Array1::zeros(d);
        coefs[index] = 1.0;
        FocusSpec::Linear { coefs, offset: 0.0 }
    }

    pub fn coefs(&self) -> &Array1<f64> {
        match self {
            FocusSpec::Linear { coefs, .. } | FocusSpec::General { coefs, .. } => coefs,
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self, FocusSpec::General { .. })
    }

    /// Evaluate the focus under a submodel fit: c' embed(beta_s) plus the
    /// submodel's own centered component estimates at the evaluation points.
    pub fn value_under(
        &self,
        fit: &GaplmFit,
        spec: &SubmodelSpec,
        basis: &BasisExpansion,
        d_c: usize,
    ) -> Result<f64> {
        let beta_full = spec.embed(fit.beta_hat.view(), d_c)?;
        let mut value = self.coefs().dot(&beta_full);
        match self {
            FocusSpec::Linear { offset, .. } => value += offset,
            FocusSpec::General {
                eta_points, offset, ..
            } => {
                value += offset;
                for &(a, x) in eta_points {
                    value += basis.component_value(a, fit.gamma_hat.view(), x)?;
                }
            }
        }
        Ok(value)
    }
}

/// Gradient of the focus with respect to beta, and the full-model plug-in
/// value of its nonparametric part.
pub fn focus_gradient(
    focus: &FocusSpec,
    full_fit: &GaplmFit,
    basis: &BasisExpansion,
) -> Result<(Array1<f64>, f64)> {
    let mu_beta = focus.coefs().clone();
    let offset = match focus {
        FocusSpec::Linear { offset, .. } => *offset,
        FocusSpec::General {
            eta_points, offset, ..
        } => {
            let mut acc = *offset;
            for &(a, x) in eta_points {
                acc += basis.component_value(a, full_fit.gamma_hat.view(), x)?;
            }
            acc
        }
    };
    Ok((mu_beta, offset))
}

// ---------------------------------------------------------------------------
// Plug-in estimation
// ---------------------------------------------------------------------------

/// Residuals of a weighted least-squares projection of each `z` column onto
/// the given design columns.
pub(crate) fn weighted_projection_residuals(
    z: &Array2<f64>,
    design: &Array2<f64>,
    weights: &Array1<f64>,
) -> Result<Array2<f64>> {
    let weighted = design * &weights.view().insert_axis(Axis(1));
    let gram = design.t().dot(&weighted);
    let rhs = weighted.t().dot(z);
    let gram_inv = linalg::inverse_spd(&gram).map_err(|_| Error::RankDeficient {
        col: linalg::weakest_column(&gram),
        reason: "weighted Gram matrix of the projection design is singular".into(),
    })?;
    let coefs = gram_inv.dot(&rhs);
    Ok(z - &design.dot(&coefs))
}

/// psi-hat: linear covariates minus their rho_1-weighted regression onto
/// [1 | spline basis], evaluated at the full-model fit.
pub fn estimate_psi(
    full_fit: &GaplmFit,
    basis: &BasisExpansion,
    z: &Array2<f64>,
    family: QuasiFamily,
) -> Result<Array2<f64>> {
    let n = basis.n_rows();
    let k_red = basis.reduced_cols();
    let mut design = Array2::zeros((n, 1 + k_red));
    design.column_mut(0).fill(1.0);
    design
        .slice_mut(s![.., 1..])
        .assign(&basis.reduced_design());
    let weights = Array1::from_shape_fn(n, |i| family.rho(full_fit.eta_hat[i], RhoOrder::One));
    weighted_projection_residuals(z, &design, &weights)
}

/// D-hat as the weighted sample mean of psi psi', and Sigma-hat from the
/// covariance sandwich D * (n Cov(beta_full)) * D.
pub fn estimate_d_sigma(
    full_fit: &GaplmFit,
    psi: &Array2<f64>,
    family: QuasiFamily,
    n: usize,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let rho1 = Array1::from_shape_fn(n, |i| family.rho(full_fit.eta_hat[i], RhoOrder::One));
    let weighted = psi * &rho1.view().insert_axis(Axis(1));
    let d_hat = psi.t().dot(&weighted) / n as f64;

    let eig = linalg::sym_eigenvalues(&d_hat);
    let (min_eig, max_eig) = (eig[0], eig[eig.len() - 1]);
    if !(min_eig > 1e-10 * max_eig.abs()) {
        return Err(Error::DNotPositiveDefinite { min_eig, max_eig });
    }

    let sigma_hat = d_hat.dot(&(&full_fit.beta_cov * n as f64)).dot(&d_hat);
    Ok((d_hat, sigma_hat))
}

/// Everything the per-submodel scores share.
#[derive(Debug, Clone)]
pub struct FicInputs {
    pub d_hat: Array2<f64>,
    pub sigma_hat: Array2<f64>,
    /// sqrt(n) times the exploratory block of the full-model estimate.
    pub delta_hat: Array1<f64>,
    pub mu_beta: Array1<f64>,
    /// mu_beta' D^-1 Sigma D^-1 mu_beta.
    pub kappa2: f64,
    pub psi_hat: Array2<f64>,
    pub n: usize,
    pub d_c: usize,
    d_inv_sigma_d_inv: Array2<f64>,
}

impl FicInputs {
    /// Assemble from explicit matrices; used both by the fitting pipeline
    /// and directly in tests with synthetic inputs.
    pub fn from_parts(
        d_hat: Array2<f64>,
        sigma_hat: Array2<f64>,
        delta_hat: Array1<f64>,
        mu_beta: Array1<f64>,
        psi_hat: Array2<f64>,
        n: usize,
        d_c: usize,
    ) -> Result<Self> {
        let d = d_hat.nrows();
        if mu_beta.len() != d || sigma_hat.nrows() != d || delta_hat.len() + d_c != d {
            return Err(Error::Dimension(format!(
                "inconsistent FIC inputs: d = {d}, d_c = {d_c}, |delta| = {}, |mu_beta| = {}",
                delta_hat.len(),
                mu_beta.len()
            )));
        }
        let d_inv = linalg::inverse_spd(&d_hat)
            .map_err(|_| Error::Singular("D-hat is not invertible (condition C9)".into()))?;
        let d_inv_sigma_d_inv = d_inv.dot(&sigma_hat).dot(&d_inv);
        let kappa2 = mu_beta.dot(&d_inv_sigma_d_inv.dot(&mu_beta));
        Ok(Self {
            d_hat,
            sigma_hat,
            delta_hat,
            mu_beta,
            kappa2,
            psi_hat,
            n,
            d_c,
            d_inv_sigma_d_inv,
        })
    }

    /// Build the plug-ins from a converged full-model fit.
    pub fn estimate(
        full_fit: &GaplmFit,
        basis: &BasisExpansion,
        z_full: &Array2<f64>,
        family: QuasiFamily,
        mu_beta: Array1<f64>,
        d_c: usize,
    ) -> Result<Self> {
        let n = z_full.nrows();
        let psi = estimate_psi(full_fit, basis, z_full, family)?;
        let (d_hat, sigma_hat) = estimate_d_sigma(full_fit, &psi, family, n)?;
        let sqrt_n = (n as f64).sqrt();
        let delta_hat = full_fit.beta_hat.slice(s![d_c..]).mapv(|b| b * sqrt_n);
        Self::from_parts(d_hat, sigma_hat, delta_hat, mu_beta, psi, n, d_c)
    }

    /// (0', delta-hat')' embedded in d dimensions.
    fn delta_padded(&self) -> Array1<f64> {
        let d = self.d_hat.nrows();
        let mut u = Array1::zeros(d);
        for (j, &v) in self.delta_hat.iter().enumerate() {
            u[self.d_c + j] = v;
        }
        u
    }

    pub fn d_inv_sigma_d_inv(&self) -> &Array2<f64> {
        &self.d_inv_sigma_d_inv
    }
}

// ---------------------------------------------------------------------------
// Per-submodel scores
// ---------------------------------------------------------------------------

/// R_s = Pi_s' (Pi_s D Pi_s')^-1 Pi_s.
pub fn r_matrix(spec: &SubmodelSpec, d_hat: &Array2<f64>, d_c: usize) -> Result<Array2<f64>> {
    let pi = spec.projection_matrix(d_c);
    let mid = pi.dot(d_hat).dot(&pi.t());
    let mid_inv = linalg::inverse_spd(&mid).map_err(|_| {
        Error::Singular(format!(
            "submodel '{}' information Pi D Pi' is singular",
            spec.label(d_c)
        ))
    })?;
    Ok(pi.t().dot(&mid_inv).dot(&pi))
}

/// The focused criterion of one submodel: the plug-in estimate of the
/// limiting mean squared error of sqrt(n) times its focus estimator. May be
/// negative; no truncation is applied.
pub fn fic_score(spec: &SubmodelSpec, inputs: &FicInputs) -> Result<f64> {
    let d = inputs.d_hat.nrows();
    let r = r_matrix(spec, &inputs.d_hat, inputs.d_c)?;
    let mu = &inputs.mu_beta;

    // B = R_s D - I
    let mut b = r.dot(&inputs.d_hat);
    for i in 0..d {
        b[[i, i]] -= 1.0;
    }

    let term1 = mu.dot(&r.dot(&inputs.sigma_hat).dot(&r.dot(mu)));

    let u = inputs.delta_padded();
    let bias = mu.dot(&b.dot(&u));
    let term2 = bias * bias;

    // w = J_u B' mu, zeroing the certain block
    let mut w = b.t().dot(mu);
    for i in 0..inputs.d_c {
        w[i] = 0.0;
    }
    let term3 = w.dot(&inputs.d_inv_sigma_d_inv.dot(&w));

    Ok(term1 + term2 - term3)
}

/// Classical information criteria for one fitted submodel:
/// AIC = -2 qloglik + 2 q, BIC = -2 qloglik + q log n.
pub fn ic_scores(qloglik: f64, n_params: usize, n: usize) -> (f64, f64) {
    let dev = -2.0 * qloglik;
    let q = n_params as f64;
    (dev + 2.0 * q, dev + q * (n as f64).ln())
}

/// Smoothed-FIC weights: softmax of -FIC_s / kappa^2 over the submodels with
/// a finite score; excluded submodels get exactly zero weight.
pub fn sfic_weights(fic_values: &[Option<f64>], kappa2: f64) -> Result<Vec<f64>> {
    if !(kappa2 > 0.0) {
        return Err(Error::Config(format!(
            "smoothed weights need kappa^2 > 0, got {kappa2}"
        )));
    }
    let exponents: Vec<Option<f64>> = fic_values
        .iter()
        .map(|f| f.map(|v| -v / kappa2))
        .collect();
    let max = exponents
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |m, &e| m.max(e));
    if max == f64::NEG_INFINITY {
        return Err(Error::AllSubmodelsExcluded);
    }
    let unnorm: Vec<f64> = exponents
        .iter()
        .map(|e| e.map_or(0.0, |v| (v - max).exp()))
        .collect();
    let total: f64 = unnorm.iter().sum();
    Ok(unnorm.into_iter().map(|w| w / total).collect())
}

/// Indicator weights on the submodel with the given index.
pub fn indicator_weights(len: usize, chosen: usize) -> Vec<f64> {
    let mut w = vec![0.0; len];
    w[chosen] = 1.0;
    w
}

// ---------------------------------------------------------------------------
// Submodel sweep
// ---------------------------------------------------------------------------

/// All submodel fits sharing one spline block.
#[derive(Debug)]
pub struct SubmodelFitSet {
    pub submodels: Vec<SubmodelSpec>,
    pub fits: Vec<GaplmFit>,
    pub d_c: usize,
}

impl SubmodelFitSet {
    /// Fit every submodel on [1 | basis | certain | selected exploratory].
    pub fn fit(
        y: ndarray::ArrayView1<f64>,
        basis: &BasisExpansion,
        z_full: &Array2<f64>,
        partition: &CovariatePartition,
        submodels: &[SubmodelSpec],
        family: QuasiFamily,
        controls: &FitControls,
    ) -> Result<Self> {
        let d_c = partition.d_c();
        if z_full.ncols() != partition.d() {
            return Err(Error::Dimension(format!(
                "linear block has {} columns, partition describes {}",
                z_full.ncols(),
                partition.d()
            )));
        }
        let mut fits = Vec::with_capacity(submodels.len());
        for spec in submodels {
            let z_s = submodel_columns(z_full, spec, d_c);
            let fit = irls_fit(y, basis, &z_s, family, controls).map_err(|e| {
                Error::Config(format!(
                    "submodel '{}' failed to fit: {e}",
                    spec.label(d_c)
                ))
            })?;
            fits.push(fit);
        }
        Ok(Self {
            submodels: submodels.to_vec(),
            fits,
            d_c,
        })
    }

    pub fn full_index(&self) -> Option<usize> {
        self.submodels.iter().position(|s| s.is_full())
    }
}

/// Columns of the submodel design: certain block then selected exploratory.
pub fn submodel_columns(z_full: &Array2<f64>, spec: &SubmodelSpec, d_c: usize) -> Array2<f64> {
    let n = z_full.nrows();
    let mut z = Array2::zeros((n, d_c + spec.d_us()));
    for j in 0..d_c {
        z.column_mut(j).assign(&z_full.column(j));
    }
    for (t, j) in spec.selected().into_iter().enumerate() {
        z.column_mut(d_c + t).assign(&z_full.column(d_c + j));
    }
    z
}

/// One row of the model-selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodelScore {
    pub label: String,
    pub bit_label: String,
    /// None when the submodel information matrix was singular; the submodel
    /// is then excluded from weighting.
    pub fic: Option<f64>,
    pub fic_error: Option<String>,
    pub aic: f64,
    pub bic: f64,
    pub qloglik: f64,
    pub n_params: usize,
    pub mu_hat: f64,
    /// Naive Wald standard error of the focus under this submodel alone.
    pub se_naive: f64,
    pub weight: f64,
}

/// The per-focus model-selection report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FicReport {
    pub focus: String,
    pub scores: Vec<SubmodelScore>,
    pub kappa2: f64,
    pub chosen_fic: usize,
    pub chosen_aic: usize,
    pub chosen_bic: usize,
}

impl FicReport {
    pub fn chosen_fic_label(&self) -> &str {
        &self.scores[self.chosen_fic].label
    }
    pub fn chosen_aic_label(&self) -> &str {
        &self.scores[self.chosen_aic].label
    }
    pub fn chosen_bic_label(&self) -> &str {
        &self.scores[self.chosen_bic].label
    }
}

/// Score every submodel for one focus. Weights are filled by the caller
/// through [`apply_weights`].
pub fn score_submodels(
    set: &SubmodelFitSet,
    inputs: &FicInputs,
    focus: &FocusSpec,
    basis: &BasisExpansion,
    focus_label: &str,
) -> Result<FicReport> {
    let n = inputs.n;
    let mut scores = Vec::with_capacity(set.submodels.len());
    for (spec, fit) in set.submodels.iter().zip(set.fits.iter()) {
        let (fic, fic_error) = match fic_score(spec, inputs) {
            Ok(v) => (Some(v), None),
            Err(e) => {
                log::warn!(
                    "submodel '{}' excluded from weighting: {e}",
                    spec.label(set.d_c)
                );
                (None, Some(e.to_string()))
            }
        };
        let (aic, bic) = ic_scores(fit.qloglik, fit.n_params, n);
        let mu_hat = focus.value_under(fit, spec, basis, set.d_c)?;
        let c_s = spec.project(inputs.mu_beta.view(), set.d_c)?;
        let se_naive = c_s.dot(&fit.beta_cov.dot(&c_s)).max(0.0).sqrt();
        scores.push(SubmodelScore {
            label: spec.label(set.d_c),
            bit_label: spec.bit_label(),
            fic,
            fic_error,
            aic,
            bic,
            qloglik: fit.qloglik,
            n_params: fit.n_params,
            mu_hat,
            se_naive,
            weight: 0.0,
        });
    }

    let argmin = |key: &dyn Fn(&SubmodelScore) -> Option<f64>| -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in scores.iter().enumerate() {
            if let Some(v) = key(s) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| i).ok_or(Error::AllSubmodelsExcluded)
    };
    let chosen_fic = argmin(&|s: &SubmodelScore| s.fic)?;
    let chosen_aic = argmin(&|s: &SubmodelScore| Some(s.aic))?;
    let chosen_bic = argmin(&|s: &SubmodelScore| Some(s.bic))?;

    Ok(FicReport {
        focus: focus_label.to_string(),
        scores,
        kappa2: inputs.kappa2,
        chosen_fic,
        chosen_aic,
        chosen_bic,
    })
}

/// Weighting schemes over the submodel set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScheme {
    /// All weight on the full model.
    Full,
    /// Indicator of the AIC minimizer.
    Aic,
    /// Indicator of the BIC minimizer.
    Bic,
    /// Indicator of the FIC minimizer.
    Fic,
    /// Softmax of -FIC_s / kappa^2.
    Sfic,
}

impl WeightScheme {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "full" => Ok(WeightScheme::Full),
            "aic" => Ok(WeightScheme::Aic),
            "bic" => Ok(WeightScheme::Bic),
            "fic" => Ok(WeightScheme::Fic),
            "sfic" | "s-fic" => Ok(WeightScheme::Sfic),
            other => Err(Error::Config(format!("unknown weight scheme '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Full => "full",
            WeightScheme::Aic => "aic",
            WeightScheme::Bic => "bic",
            WeightScheme::Fic => "fic",
            WeightScheme::Sfic => "sfic",
        }
    }
}

/// Compute the weight vector for a scheme and store it in the report.
pub fn apply_weights(
    scheme: WeightScheme,
    report: &mut FicReport,
    set: &SubmodelFitSet,
) -> Result<Vec<f64>> {
    let len = report.scores.len();
    let weights = match scheme {
        WeightScheme::Full => {
            let full = set
                .full_index()
                .ok_or_else(|| Error::Config("the submodel set has no full model".into()))?;
            indicator_weights(len, full)
        }
        WeightScheme::Aic => indicator_weights(len, report.chosen_aic),
        WeightScheme::Bic => indicator_weights(len, report.chosen_bic),
        WeightScheme::Fic => indicator_weights(len, report.chosen_fic),
        WeightScheme::Sfic => {
            let fics: Vec<Option<f64>> = report.scores.iter().map(|s| s.fic).collect();
            sfic_weights(&fics, report.kappa2)?
        }
    };
    for (s, &w) in report.scores.iter_mut().zip(weights.iter()) {
        s.weight = w;
    }
    Ok(weights)
}

// ---------------------------------------------------------------------------
// Model averaging
// ---------------------------------------------------------------------------

/// Model-average estimate and its bias-corrected confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmaResult {
    pub mu_hat: f64,
    pub low: f64,
    pub up: f64,
    pub level: f64,
    /// The subtracted bias term mu' {Q(delta)(0,delta) - (0,delta)} / sqrt(n).
    pub correction: f64,
    /// Set when the focus involves plugged-in nonparametric values, whose
    /// interval coverage is not guaranteed.
    pub plug_in_flag: bool,
}

/// Average the per-submodel focus estimates with the given weights and build
/// the confidence interval. The interval half-width is z kappa / sqrt(n)
/// regardless of the weights; only the centering changes.
pub fn fma_estimate(
    weights: &[f64],
    report: &FicReport,
    set: &SubmodelFitSet,
    inputs: &FicInputs,
    focus: &FocusSpec,
    level: f64,
) -> Result<FmaResult> {
    if weights.len() != report.scores.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} submodels",
            weights.len(),
            report.scores.len()
        )));
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !(0.0..=1.0 + 1e-12).contains(&w)) || (wsum - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!(
            "weights must lie in [0,1] and sum to 1 (sum = {wsum})"
        )));
    }

    let mu_hat: f64 = weights
        .iter()
        .zip(report.scores.iter())
        .map(|(w, s)| w * s.mu_hat)
        .sum();

    // Q(delta-hat) = sum_s w_s R_s D
    let d = inputs.d_hat.nrows();
    let mut q = Array2::<f64>::zeros((d, d));
    for (w, spec) in weights.iter().zip(set.submodels.iter()) {
        if *w == 0.0 {
            continue;
        }
        let r = r_matrix(spec, &inputs.d_hat, inputs.d_c)?;
        q = q + r.dot(&inputs.d_hat) * *w;
    }
    let u = inputs.delta_padded();
    let correction = inputs.mu_beta.dot(&(q.dot(&u) - &u)) / (inputs.n as f64).sqrt();

    let z = normal_quantile(0.5 + level / 2.0);
    let half = z * inputs.kappa2.max(0.0).sqrt() / (inputs.n as f64).sqrt();
    let center = mu_hat - correction;

    Ok(FmaResult {
        mu_hat,
        low: center - half,
        up: center + half,
        level,
        correction,
        plug_in_flag: focus.is_general(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SplineSpec;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};

    fn random_spd(d: usize, rng: &mut StdRng) -> Array2<f64> {
        let a = Array2::from_shape_fn((d, d), |_| StandardNormal.sample(rng));
        a.t().dot(&a) + Array2::<f64>::eye(d) * 0.5
    }

    fn synthetic_inputs(d_c: usize, d_u: usize, seed: u64) -> FicInputs {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = d_c + d_u;
        let d_hat = random_spd(d, &mut rng);
        let sigma = random_spd(d, &mut rng);
        let delta = Array1::from_shape_fn(d_u, |_| StandardNormal.sample(&mut rng));
        let mu = Array1::from_shape_fn(d, |_| StandardNormal.sample(&mut rng));
        FicInputs::from_parts(d_hat, sigma, delta, mu, Array2::zeros((0, d)), 100, d_c).unwrap()
    }

    // -------------------- plug-ins --------------------

    #[test]
    fn psi_satisfies_weighted_normal_equations() {
        let mut rng = StdRng::seed_from_u64(4);
        let n = 80;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 2).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 3), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            if rng.gen::<f64>() < 0.4 + 0.2 * x[[i, 0]] {
                1.0
            } else {
                0.0
            }
        });
        let fit = irls_fit(
            y.view(),
            &exp,
            &z,
            QuasiFamily::BernoulliLogit,
            &FitControls::default(),
        )
        .unwrap();
        let psi = estimate_psi(&fit, &exp, &z, QuasiFamily::BernoulliLogit).unwrap();

        // bernoulli-logit has rho_1 = 1: psi are plain projection residuals,
        // orthogonal to the intercept and every basis column
        let k = exp.reduced_cols();
        let mut design = Array2::zeros((n, 1 + k));
        design.column_mut(0).fill(1.0);
        design.slice_mut(s![.., 1..]).assign(&exp.reduced_design());
        let cross = design.t().dot(&psi);
        for v in cross.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn psi_matches_brute_force_weighted_projector() {
        // Explicit projector P = A (A'WA)^-1 A'W with synthetic non-constant
        // weights, applied column by column.
        let mut rng = StdRng::seed_from_u64(12);
        let n = 30;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 1).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 2), |_| StandardNormal.sample(&mut rng));
        let weights = Array1::from_shape_fn(n, |_| 0.2 + rng.gen::<f64>());

        let k = exp.reduced_cols();
        let mut a = Array2::zeros((n, 1 + k));
        a.column_mut(0).fill(1.0);
        a.slice_mut(s![.., 1..]).assign(&exp.reduced_design());

        let got = weighted_projection_residuals(&z, &a, &weights).unwrap();

        let w_mat = Array2::from_diag(&weights);
        let gram = a.t().dot(&w_mat).dot(&a);
        let gram_inv = crate::linalg::inverse_spd(&gram).unwrap();
        let projector = a.dot(&gram_inv).dot(&a.t()).dot(&w_mat);
        for j in 0..2 {
            let zj = z.column(j).to_owned();
            let want = &zj - &projector.dot(&zj);
            for i in 0..n {
                assert_abs_diff_eq!(got[[i, j]], want[i], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_d_sigma_match_classical_least_squares() {
        // Pure-linear gaussian model with sigma = 1: D-hat is close to the
        // sample covariance of Z and Sigma-hat close to D-hat itself.
        let mut rng = StdRng::seed_from_u64(31);
        let n = 4000;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 0).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 2), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            0.5 + 1.0 * z[[i, 0]] - 0.7 * z[[i, 1]] + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
        });
        let fit = irls_fit(
            y.view(),
            &exp,
            &z,
            QuasiFamily::GaussianIdentity,
            &FitControls::default(),
        )
        .unwrap();
        let psi = estimate_psi(&fit, &exp, &z, QuasiFamily::GaussianIdentity).unwrap();
        let (d_hat, sigma_hat) =
            estimate_d_sigma(&fit, &psi, QuasiFamily::GaussianIdentity, n).unwrap();

        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (d_hat[[i, j]] - want).abs() < 0.1,
                    "D[{i}{j}] = {}",
                    d_hat[[i, j]]
                );
                assert!(
                    (sigma_hat[[i, j]] - d_hat[[i, j]]).abs() < 0.1,
                    "Sigma[{i}{j}] = {} vs D = {}",
                    sigma_hat[[i, j]],
                    d_hat[[i, j]]
                );
            }
        }
    }

    #[test]
    fn sigma_recipe_close_to_direct_moment_estimator_gaussian() {
        // Cross-check oracle: Sigma-tilde = (1/n) sum rho_1^2 eps^2 psi psi'.
        // For gaussian-identity with unit noise the covariance-sandwich
        // recipe and the direct moment estimator agree within sampling
        // noise; compare averaged eigenvalues to 25 percent. Fourth-moment
        // noise at n = 200 has relative sd around 0.1.
        let mut rng = StdRng::seed_from_u64(0);
        let n = 200;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 2).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 3), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            (2.0 * std::f64::consts::PI * x[[i, 0]]).sin() + 0.8 * z[[i, 0]] - 0.3 * z[[i, 1]]
                + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
        });
        let fit = irls_fit(
            y.view(),
            &exp,
            &z,
            QuasiFamily::GaussianIdentity,
            &FitControls::default(),
        )
        .unwrap();
        let psi = estimate_psi(&fit, &exp, &z, QuasiFamily::GaussianIdentity).unwrap();
        let (_, sigma_recipe) =
            estimate_d_sigma(&fit, &psi, QuasiFamily::GaussianIdentity, n).unwrap();

        let mut sigma_direct = Array2::<f64>::zeros((3, 3));
        for i in 0..n {
            let eps = y[i] - fit.eta_hat[i];
            let row = psi.row(i);
            for a in 0..3 {
                for b in 0..3 {
                    sigma_direct[[a, b]] += eps * eps * row[a] * row[b];
                }
            }
        }
        sigma_direct /= n as f64;

        let avg = |m: &Array2<f64>| {
            let ev = crate::linalg::sym_eigenvalues(m);
            ev.iter().sum::<f64>() / ev.len() as f64
        };
        let (a, b) = (avg(&sigma_recipe), avg(&sigma_direct));
        assert!(
            (a - b).abs() / b.abs() < 0.25,
            "averaged eigenvalues differ: recipe {a} vs direct {b}"
        );
    }

    #[test]
    fn bernoulli_sandwich_identity_holds_exactly() {
        // With Sigma-hat = D (n Cov) D, the matrix D^-1 Sigma D^-1 equals
        // n Cov(beta_full) by construction; kappa^2 is its quadratic form.
        let mut rng = StdRng::seed_from_u64(19);
        let n = 150;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 2).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 3), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            let m = 0.5 * z[[i, 0]] - 0.4 * z[[i, 1]] + x[[i, 0]];
            if rng.gen::<f64>() < QuasiFamily::BernoulliLogit.inv_link(m) {
                1.0
            } else {
                0.0
            }
        });
        let fit = irls_fit(
            y.view(),
            &exp,
            &z,
            QuasiFamily::BernoulliLogit,
            &FitControls::default(),
        )
        .unwrap();
        let mu_beta = array![1.0, 0.0, 0.0];
        let inputs = FicInputs::estimate(
            &fit,
            &exp,
            &z,
            QuasiFamily::BernoulliLogit,
            mu_beta.clone(),
            1,
        )
        .unwrap();
        let want = n as f64 * mu_beta.dot(&fit.beta_cov.dot(&mu_beta));
        assert_abs_diff_eq!(inputs.kappa2, want, epsilon = 1e-8 * want.abs());

        // rho_1 = 1 for the canonical link: D-hat is the unweighted Gram
        let psi = &inputs.psi_hat;
        let gram = psi.t().dot(psi) / n as f64;
        for (a, b) in inputs.d_hat.iter().zip(gram.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    // -------------------- focus --------------------

    #[test]
    fn coefficient_focus_gradient_is_a_basis_vector() {
        let focus = FocusSpec::coefficient(0, 5);
        assert_eq!(focus.coefs(), &array![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn linear_combination_focus_keeps_its_vector() {
        let coefs = array![0.75, 0.05, -0.3, 0.1, -0.06];
        let focus = FocusSpec::Linear {
            coefs: coefs.clone(),
            offset: 0.0,
        };
        assert_eq!(focus.coefs(), &coefs);
    }

    #[test]
    fn general_focus_offset_uses_component_plugins() {
        let mut rng = StdRng::seed_from_u64(3);
        let n = 60;
        let x = Array2::from_shape_fn((n, 2), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(
            &x,
            &[
                SplineSpec::new(3, 1).unwrap(),
                SplineSpec::new(3, 1).unwrap(),
            ],
        )
        .unwrap();
        let z = Array2::from_shape_fn((n, 2), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| z[[i, 0]] + x[[i, 0]] + rng.gen::<f64>());
        let fit = irls_fit(
            y.view(),
            &exp,
            &z,
            QuasiFamily::GaussianIdentity,
            &FitControls::default(),
        )
        .unwrap();
        let focus = FocusSpec::General {
            eta_points: vec![(0, 0.3), (1, 0.8)],
            coefs: array![0.5, -0.5],
            offset: 0.0,
        };
        let (mu_beta, offset) = focus_gradient(&focus, &fit, &exp).unwrap();
        assert_eq!(mu_beta, array![0.5, -0.5]);
        let want = exp.component_value(0, fit.gamma_hat.view(), 0.3).unwrap()
            + exp.component_value(1, fit.gamma_hat.view(), 0.8).unwrap();
        assert_abs_diff_eq!(offset, want, epsilon = 1e-12);

        // value_under the full model equals offset + c' beta
        let full = SubmodelSpec::full(1);
        let v = focus.value_under(&fit, &full, &exp, 1).unwrap();
        assert_abs_diff_eq!(
            v,
            want + 0.5 * fit.beta_hat[0] - 0.5 * fit.beta_hat[1],
            epsilon = 1e-12
        );
    }

    // -------------------- criterion algebra --------------------

    #[test]
    fn full_model_fic_equals_kappa2() {
        for seed in 0..10u64 {
            let inputs = synthetic_inputs(2, 3, seed);
            let full = SubmodelSpec::full(3);
            let fic = fic_score(&full, &inputs).unwrap();
            assert_abs_diff_eq!(fic, inputs.kappa2, epsilon = 1e-10 * (1.0 + inputs.kappa2));
        }
    }

    #[test]
    fn hand_computed_identity_matrix_case() {
        // d_c = 1, d_u = 1, D = Sigma = I, focus on the certain coefficient:
        // R_narrow = diag(1,0), R D - I = diag(0,-1), both corrections die,
        // FIC_narrow = 1 and kappa^2 = 1.
        let inputs = FicInputs::from_parts(
            Array2::eye(2),
            Array2::eye(2),
            array![0.7],
            array![1.0, 0.0],
            Array2::zeros((0, 2)),
            50,
            1,
        )
        .unwrap();
        assert_abs_diff_eq!(inputs.kappa2, 1.0, epsilon = 1e-14);
        let narrow = SubmodelSpec::narrow(1);
        assert_abs_diff_eq!(fic_score(&narrow, &inputs).unwrap(), 1.0, epsilon = 1e-14);
        let full = SubmodelSpec::full(1);
        assert_abs_diff_eq!(fic_score(&full, &inputs).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn generalized_inverse_identity() {
        // R_s D Pi_s' = Pi_s' for every submodel.
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..20 {
            let d_c = 1 + (rng.gen::<u32>() % 3) as usize;
            let d_u = 1 + (rng.gen::<u32>() % 4) as usize;
            let d_hat = random_spd(d_c + d_u, &mut rng);
            for mask in 0..(1u32 << d_u) {
                let spec = SubmodelSpec::new(mask, d_u).unwrap();
                let r = r_matrix(&spec, &d_hat, d_c).unwrap();
                let pi_t = spec.projection_matrix(d_c).t().to_owned();
                let got = r.dot(&d_hat).dot(&pi_t);
                for (a, b) in got.iter().zip(pi_t.iter()) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn certain_block_is_never_penalized() {
        // (R_s D - I) annihilates vectors supported on the certain block.
        let mut rng = StdRng::seed_from_u64(42);
        let d_c = 2;
        let d_u = 3;
        let d_hat = random_spd(d_c + d_u, &mut rng);
        for mask in 0..(1u32 << d_u) {
            let spec = SubmodelSpec::new(mask, d_u).unwrap();
            let r = r_matrix(&spec, &d_hat, d_c).unwrap();
            let mut b = r.dot(&d_hat);
            for i in 0..d_c + d_u {
                b[[i, i]] -= 1.0;
            }
            let vc = array![1.3, -0.4, 0.0, 0.0, 0.0];
            let out = b.dot(&vc);
            for v in out.iter() {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-10);
            }
        }
    }

    // -------------------- weights --------------------

    #[test]
    fn equal_fic_values_split_weight_evenly() {
        let w = sfic_weights(&[Some(3.0), Some(3.0)], 2.0).unwrap();
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn one_kappa2_gap_gives_the_closed_form() {
        let k2 = 1.7;
        let w = sfic_weights(&[Some(0.0), Some(k2)], k2).unwrap();
        assert_abs_diff_eq!(w[0], 0.7310585786300049, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.2689414213699951, epsilon = 1e-12);
    }

    #[test]
    fn weights_form_a_simplex_and_skip_excluded() {
        let w = sfic_weights(&[Some(1.0), None, Some(-2.0), Some(0.3)], 0.8).unwrap();
        assert_eq!(w[1], 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn negative_fic_values_are_kept() {
        let w = sfic_weights(&[Some(-5.0), Some(1.0)], 1.0).unwrap();
        assert!(w[0] > w[1]);
    }

    #[test]
    fn all_excluded_is_an_error() {
        assert!(matches!(
            sfic_weights(&[None, None], 1.0),
            Err(Error::AllSubmodelsExcluded)
        ));
    }

    #[test]
    fn huge_fic_gaps_do_not_overflow() {
        let w = sfic_weights(&[Some(0.0), Some(1e6)], 1e-3).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert!(w[1] >= 0.0);
    }

    // -------------------- averaging pipeline --------------------

    struct Pipeline {
        report: FicReport,
        weights: Vec<f64>,
        fma: FmaResult,
        kappa2: f64,
        n: usize,
    }

    fn small_pipeline(seed: u64, scale_col: Option<(usize, f64)>) -> Pipeline {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 250;
        let d_c = 1;
        let d_u = 2;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 2).unwrap()]).unwrap();
        let mut z = Array2::from_shape_fn((n, d_c + d_u), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            let m = (2.0 * std::f64::consts::PI * x[[i, 0]]).sin() + 1.2 * z[[i, 0]]
                + 0.3 * z[[i, 1]];
            if rng.gen::<f64>() < QuasiFamily::BernoulliLogit.inv_link(m) {
                1.0
            } else {
                0.0
            }
        });
        // focus: the certain coefficient in ORIGINAL units
        let mut mu_beta = array![1.0, 0.0, 0.0];
        if let Some((col, c)) = scale_col {
            for v in z.column_mut(col).iter_mut() {
                *v *= c;
            }
            mu_beta[col] *= c;
        }
        let partition =
            CovariatePartition::new(vec!["zc".into()], vec!["u1".into(), "u2".into()]).unwrap();
        let submodels = crate::model::enumerate_submodels(&partition, None).unwrap();
        let set = SubmodelFitSet::fit(
            y.view(),
            &exp,
            &z,
            &partition,
            &submodels,
            QuasiFamily::BernoulliLogit,
            &FitControls::default(),
        )
        .unwrap();
        let full_fit = &set.fits[set.full_index().unwrap()];
        let inputs = FicInputs::estimate(
            full_fit,
            &exp,
            &z,
            QuasiFamily::BernoulliLogit,
            mu_beta.clone(),
            d_c,
        )
        .unwrap();
        let focus = FocusSpec::Linear {
            coefs: mu_beta,
            offset: 0.0,
        };
        let mut report = score_submodels(&set, &inputs, &focus, &exp, "beta_c").unwrap();
        let weights = apply_weights(WeightScheme::Sfic, &mut report, &set).unwrap();
        let fma = fma_estimate(&weights, &report, &set, &inputs, &focus, 0.95).unwrap();
        Pipeline {
            report,
            weights,
            fma,
            kappa2: inputs.kappa2,
            n,
        }
    }

    #[test]
    fn degenerate_weight_returns_that_submodel_estimate() {
        let p = small_pipeline(5, None);
        let idx = 2;
        let w = indicator_weights(p.report.scores.len(), idx);
        let mu: f64 = w
            .iter()
            .zip(p.report.scores.iter())
            .map(|(wi, s)| wi * s.mu_hat)
            .sum();
        assert_abs_diff_eq!(mu, p.report.scores[idx].mu_hat, epsilon = 1e-15);
    }

    #[test]
    fn full_weight_gives_classical_wald_interval() {
        let mut rng = StdRng::seed_from_u64(9);
        let n = 200;
        let x = Array2::from_shape_fn((n, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &[SplineSpec::new(3, 1).unwrap()]).unwrap();
        let z = Array2::from_shape_fn((n, 2), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |i| {
            let m = 0.8 * z[[i, 0]] + x[[i, 0]];
            if rng.gen::<f64>() < QuasiFamily::BernoulliLogit.inv_link(m) {
                1.0
            } else {
                0.0
            }
        });
        let partition = CovariatePartition::new(vec!["zc".into()], vec!["u1".into()]).unwrap();
        let submodels = crate::model::enumerate_submodels(&partition, None).unwrap();
        let set = SubmodelFitSet::fit(
            y.view(),
            &exp,
            &z,
            &partition,
            &submodels,
            QuasiFamily::BernoulliLogit,
            &FitControls::default(),
        )
        .unwrap();
        let full_fit = &set.fits[set.full_index().unwrap()];
        let mu_beta = array![1.0, 0.0];
        let inputs = FicInputs::estimate(
            full_fit,
            &exp,
            &z,
            QuasiFamily::BernoulliLogit,
            mu_beta.clone(),
            1,
        )
        .unwrap();
        let focus = FocusSpec::Linear {
            coefs: mu_beta,
            offset: 0.0,
        };
        let mut report = score_submodels(&set, &inputs, &focus, &exp, "mu").unwrap();
        let weights = apply_weights(WeightScheme::Full, &mut report, &set).unwrap();
        let fma = fma_estimate(&weights, &report, &set, &inputs, &focus, 0.95).unwrap();

        // correction vanishes because R_full D = I
        assert_abs_diff_eq!(fma.correction, 0.0, epsilon = 1e-10);
        let mu_full = report.scores[set.full_index().unwrap()].mu_hat;
        assert_abs_diff_eq!(fma.mu_hat, mu_full, epsilon = 1e-12);
        let half = normal_quantile(0.975) * inputs.kappa2.sqrt() / (n as f64).sqrt();
        assert_abs_diff_eq!(fma.up - fma.low, 2.0 * half, epsilon = 1e-12);
    }

    #[test]
    fn interval_width_is_weight_independent() {
        let p = small_pipeline(13, None);
        let z = normal_quantile(0.975);
        let want = 2.0 * z * p.kappa2.sqrt() / (p.n as f64).sqrt();
        assert_abs_diff_eq!(p.fma.up - p.fma.low, want, epsilon = 1e-12);
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.report.scores.iter().all(|s| s.fic.is_some()));
    }

    #[test]
    fn pipeline_is_equivariant_to_covariate_rescaling() {
        // Rescaling one exploratory column while expressing the focus in the
        // original units must leave every score, weight and interval alone.
        let a = small_pipeline(101, None);
        let b = small_pipeline(101, Some((2, 7.5)));

        assert_abs_diff_eq!(a.kappa2, b.kappa2, epsilon = 1e-6 * (1.0 + a.kappa2.abs()));
        for (sa, sb) in a.report.scores.iter().zip(b.report.scores.iter()) {
            let (fa, fb) = (sa.fic.unwrap(), sb.fic.unwrap());
            assert_abs_diff_eq!(fa, fb, epsilon = 1e-6 * (1.0 + fa.abs()));
            assert_abs_diff_eq!(sa.mu_hat, sb.mu_hat, epsilon = 1e-6);
        }
        for (wa, wb) in a.weights.iter().zip(b.weights.iter()) {
            assert_abs_diff_eq!(wa, wb, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(a.fma.mu_hat, b.fma.mu_hat, epsilon = 1e-6);
        assert_abs_diff_eq!(a.fma.low, b.fma.low, epsilon = 1e-6);
        assert_abs_diff_eq!(a.fma.up, b.fma.up, epsilon = 1e-6);
    }

    #[test]
    fn adding_a_useless_parameter_moves_aic_by_two() {
        // identical qloglik, one extra parameter
        let (aic0, bic0) = ic_scores(-100.0, 5, 200);
        let (aic1, bic1) = ic_scores(-100.0, 6, 200);
        assert_abs_diff_eq!(aic1 - aic0, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bic1 - bic0, (200f64).ln(), epsilon = 1e-12);
    }
}
