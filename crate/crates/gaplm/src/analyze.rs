//! The end-to-end analysis pipeline behind the CLI: knot selection, the
//! full-model coefficient table, the submodel sweep per focus parameter,
//! model-average intervals, component-curve samples and leave-one-out
//! cross-validated prediction error.

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisExpansion, SplineSpec};
use crate::data::{ColumnStandardization, Dataset, SmoothScaler};
use crate::error::{Error, Result};
use crate::fic::{
    apply_weights, fma_estimate, score_submodels, FicInputs, FicReport, FmaResult, FocusSpec,
    SubmodelFitSet, WeightScheme,
};
use crate::fit::{predict_linear, FitControls, GaplmFit, SeparationPolicy};
use crate::knots::{select_knots, KnotMode, KnotSearch};
use crate::model::{enumerate_submodels, SubmodelSpec};
use crate::stats::two_sided_p;

/// How leave-one-out prediction uses the smoothed weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CvPrediction {
    /// S-FIC predicts with the weighted average of submodel linear
    /// predictors; the selection criteria predict with their chosen
    /// submodel's own refit.
    Fma,
    /// Every method predicts with a single submodel; S-FIC uses its
    /// maximal-weight submodel.
    Selected,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub degree: usize,
    pub knot_mode: KnotMode,
    pub level: f64,
    pub weights: WeightScheme,
    /// Optional explicit submodel labels; defaults to all 2^d_u.
    pub submodel_subset: Option<Vec<String>>,
    pub curve_points: usize,
    pub cv_prediction: CvPrediction,
    pub controls: FitControls,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            degree: 3,
            knot_mode: KnotMode::Auto,
            level: 0.95,
            weights: WeightScheme::Sfic,
            submodel_subset: None,
            curve_points: 101,
            cv_prediction: CvPrediction::Fma,
            controls: FitControls::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub z_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Position on the internal [0, 1] scale.
    pub x_unit: f64,
    /// Position in the covariate's units after standardization.
    pub x_value: f64,
    pub eta: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub name: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusReport {
    pub label: String,
    pub scheme: String,
    pub fic: FicReport,
    pub fma: FmaResult,
}

/// Per-focus slot that records a failure instead of aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocusOutcome {
    pub label: String,
    pub report: Option<FocusReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvReport {
    pub n: usize,
    /// (method name, misclassification ratio).
    pub ratios: Vec<(String, f64)>,
    pub fold_failures: usize,
    pub prediction_route: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub family: String,
    pub n_used: usize,
    pub n_dropped: usize,
    pub knot_search: KnotSearch,
    pub coefficients: Vec<CoefficientRow>,
    pub foci: Vec<FocusOutcome>,
    pub curves: Vec<CurveSamples>,
    pub loocv: Option<LoocvReport>,
    pub standardization: Vec<ColumnStandardization>,
    pub scalers: Vec<SmoothScaler>,
}

// ---------------------------------------------------------------------------
// Focus grammar
// ---------------------------------------------------------------------------

/// Parse a focus expression into a [`FocusSpec`].
///
/// Grammar: signed terms joined by `+`/`-`, each one of
///   `beta:NAME`           a single coefficient,
///   `C*NAME`              a scaled coefficient (optionally after `lincomb:`),
///   `eta:NAME@VALUE`      a smooth component at a point (post-
///                         standardization units),
///   a bare number         a constant offset.
pub fn parse_focus(text: &str, dataset: &Dataset) -> Result<FocusSpec> {
    let d = dataset.partition.d();
    let mut coefs = Array1::<f64>::zeros(d);
    let mut eta_points: Vec<(usize, f64)> = Vec::new();
    let mut offset = 0.0;

    for (sign, term) in split_signed_terms(text) {
        let term = term.strip_prefix("lincomb:").unwrap_or(&term);
        if term.is_empty() {
            return Err(Error::Focus(format!("empty term in '{text}'")));
        }
        if let Some(rest) = term.strip_prefix("beta:") {
            let idx = dataset.linear_index(rest.trim())?;
            coefs[idx] += sign;
        } else if let Some(rest) = term.strip_prefix("eta:") {
            if sign < 0.0 {
                return Err(Error::Focus(
                    "smooth component terms enter with coefficient +1".into(),
                ));
            }
            let (name, value) = rest.split_once('@').ok_or_else(|| {
                Error::Focus(format!("expected eta:NAME@VALUE, got 'eta:{rest}'"))
            })?;
            let idx = dataset.smooth_index(name.trim())?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Focus(format!("cannot parse eta value in '{term}'")))?;
            eta_points.push((idx, dataset.scalers[idx].to_unit(value)));
        } else if let Some((c, name)) = term.split_once('*') {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Focus(format!("cannot parse coefficient in '{term}'")))?;
            let idx = dataset.linear_index(name.trim())?;
            coefs[idx] += sign * c;
        } else if let Ok(c) = term.trim().parse::<f64>() {
            offset += sign * c;
        } else {
            // bare covariate name
            let idx = dataset.linear_index(term.trim())?;
            coefs[idx] += sign;
        }
    }

    if eta_points.is_empty() {
        Ok(FocusSpec::Linear { coefs, offset })
    } else {
        Ok(FocusSpec::General {
            eta_points,
            coefs,
            offset,
        })
    }
}

/// Split "a+b-c" into signed terms, leaving +/- alone inside numbers
/// (after 'e', '*', '@' or at a term start).
fn split_signed_terms(text: &str) -> Vec<(f64, String)> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut sign = 1.0;
    let mut prev: Option<char> = None;
    for c in text.chars() {
        if c.is_whitespace() {
            continue;
        }
        let splits = (c == '+' || c == '-')
            && !current.is_empty()
            && !matches!(prev, Some('e') | Some('E') | Some('*') | Some('@') | Some(':'));
        if splits {
            terms.push((sign, std::mem::take(&mut current)));
            sign = if c == '-' { -1.0 } else { 1.0 };
            prev = None;
            continue;
        }
        if (c == '+' || c == '-') && current.is_empty() && prev.is_none() {
            sign = if c == '-' { -sign } else { sign };
            continue;
        }
        current.push(c);
        prev = Some(c);
    }
    if !current.is_empty() {
        terms.push((sign, current));
    }
    terms
}

// ---------------------------------------------------------------------------
// Analysis pipeline
// ---------------------------------------------------------------------------

fn expand_selected(dataset: &Dataset, degree: usize, interior: usize) -> Result<BasisExpansion> {
    let specs = vec![SplineSpec::new(degree, interior)?; dataset.x_smooth.ncols()];
    BasisExpansion::expand(&dataset.x_smooth, &specs)
}

fn submodel_list(dataset: &Dataset, options: &AnalysisOptions) -> Result<Vec<SubmodelSpec>> {
    let subset = match &options.submodel_subset {
        None => None,
        Some(labels) => {
            let parsed: Vec<SubmodelSpec> = labels
                .iter()
                .map(|l| {
                    SubmodelSpec::parse_label(l, dataset.partition.d_c(), dataset.partition.d_u())
                })
                .collect::<Result<_>>()?;
            Some(parsed)
        }
    };
    enumerate_submodels(&dataset.partition, subset.as_deref())
}

/// Pointwise standard error of the centered component estimate at x.
fn component_se(fit: &GaplmFit, basis: &BasisExpansion, covariate: usize, x: f64) -> Result<f64> {
    let vals = crate::basis::eval_basis(x, basis.spec(covariate))?;
    let block = basis.block(covariate);
    let q = fit.cov.nrows();
    let mut contrast = Array1::<f64>::zeros(q);
    for (t, v) in vals.iter().enumerate() {
        let full_idx = block.start + t;
        if let Some(r) = basis.reduced_index(full_idx) {
            contrast[1 + r] = v - basis.column_means[full_idx];
        }
    }
    let var = contrast.dot(&fit.cov.dot(&contrast));
    Ok(var.max(0.0).sqrt())
}

fn sample_curves(
    fit: &GaplmFit,
    basis: &BasisExpansion,
    dataset: &Dataset,
    points: usize,
) -> Result<Vec<CurveSamples>> {
    let points = points.max(2);
    let mut curves = Vec::new();
    for (a, name) in dataset.smooth_names.iter().enumerate() {
        let mut samples = Vec::with_capacity(points);
        for t in 0..points {
            let x_unit = t as f64 / (points - 1) as f64;
            let eta = basis.component_value(a, fit.gamma_hat.view(), x_unit)?;
            let se = component_se(fit, basis, a, x_unit)?;
            samples.push(CurvePoint {
                x_unit,
                x_value: dataset.scalers[a].from_unit(x_unit),
                eta,
                se,
            });
        }
        curves.push(CurveSamples {
            name: name.clone(),
            points: samples,
        });
    }
    Ok(curves)
}

/// Run the full analysis: knot search, full fit, coefficient table, the
/// submodel sweep for every requested focus, and component curves.
pub fn analyze(
    dataset: &Dataset,
    options: &AnalysisOptions,
    foci: &[(String, FocusSpec)],
) -> Result<AnalysisReport> {
    let knot_search = select_knots(
        dataset.y.view(),
        &dataset.x_smooth,
        &dataset.z,
        dataset.family,
        options.degree,
        options.knot_mode,
        &options.controls,
    )?;
    let basis = expand_selected(dataset, options.degree, knot_search.chosen)?;
    let submodels = submodel_list(dataset, options)?;

    let set = SubmodelFitSet::fit(
        dataset.y.view(),
        &basis,
        &dataset.z,
        &dataset.partition,
        &submodels,
        dataset.family,
        &options.controls,
    )?;
    let full_idx = set
        .full_index()
        .ok_or_else(|| Error::Config("submodel subset must include the full model".into()))?;
    let full_fit = &set.fits[full_idx];

    let names = dataset.linear_names();
    let coefficients = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = full_fit.beta_hat[j];
            let se = full_fit.beta_cov[[j, j]].max(0.0).sqrt();
            let z_value = if se > 0.0 { estimate / se } else { 0.0 };
            CoefficientRow {
                name: name.clone(),
                estimate,
                se,
                z_value,
                p_value: two_sided_p(z_value),
            }
        })
        .collect();

    let mut outcomes = Vec::with_capacity(foci.len());
    for (label, focus) in foci {
        let run = || -> Result<FocusReport> {
            let inputs = FicInputs::estimate(
                full_fit,
                &basis,
                &dataset.z,
                dataset.family,
                focus.coefs().clone(),
                dataset.partition.d_c(),
            )?;
            let mut fic = score_submodels(&set, &inputs, focus, &basis, label)?;
            let weights = apply_weights(options.weights, &mut fic, &set)?;
            let fma = fma_estimate(&weights, &fic, &set, &inputs, focus, options.level)?;
            Ok(FocusReport {
                label: label.clone(),
                scheme: options.weights.name().to_string(),
                fic,
                fma,
            })
        };
        match run() {
            Ok(report) => outcomes.push(FocusOutcome {
                label: label.clone(),
                report: Some(report),
                error: None,
            }),
            Err(e) => {
                log::warn!("focus '{label}' failed: {e}");
                outcomes.push(FocusOutcome {
                    label: label.clone(),
                    report: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    let curves = sample_curves(full_fit, &basis, dataset, options.curve_points)?;

    Ok(AnalysisReport {
        family: dataset.family.name().to_string(),
        n_used: dataset.n(),
        n_dropped: dataset.n_dropped,
        knot_search,
        coefficients,
        foci: outcomes,
        curves,
        loocv: None,
        standardization: dataset.standardization.clone(),
        scalers: dataset.scalers.clone(),
    })
}

// ---------------------------------------------------------------------------
// Leave-one-out cross-validation
// ---------------------------------------------------------------------------

const CV_METHODS: [WeightScheme; 4] = [
    WeightScheme::Aic,
    WeightScheme::Bic,
    WeightScheme::Fic,
    WeightScheme::Sfic,
];

/// Misclassification ratios of AIC/BIC/FIC/S-FIC under leave-one-out
/// refitting, classifying at probability 0.5.
///
/// The interior-knot count is selected once on the full sample and reused
/// across folds. Each fold refits every submodel on the remaining rows; the
/// focus steering FIC / S-FIC is the left-out observation's own linear
/// predictor. Folds are fitted with the stop-early separation policy so a
/// separable training set still yields a prediction; genuine fold failures
/// count as prediction errors for every method.
pub fn loocv(dataset: &Dataset, options: &AnalysisOptions) -> Result<LoocvReport> {
    if dataset.family != crate::family::QuasiFamily::BernoulliLogit {
        return Err(Error::Config(
            "leave-one-out misclassification needs a binary response".into(),
        ));
    }
    let knot_search = select_knots(
        dataset.y.view(),
        &dataset.x_smooth,
        &dataset.z,
        dataset.family,
        options.degree,
        options.knot_mode,
        &options.controls,
    )?;
    let interior = knot_search.chosen;
    let submodels = submodel_list(dataset, options)?;
    let fold_controls = FitControls {
        on_separation: SeparationPolicy::StopEarly,
        ..options.controls.clone()
    };

    let n = dataset.n();
    let fold_results: Vec<Result<[bool; 4]>> = (0..n)
        .into_par_iter()
        .map(|i| run_fold(dataset, options, &fold_controls, &submodels, interior, i))
        .collect();

    let mut errors = [0usize; 4];
    let mut failures = 0usize;
    for fold in fold_results {
        match fold {
            Ok(mistaken) => {
                for (m, &bad) in mistaken.iter().enumerate() {
                    if bad {
                        errors[m] += 1;
                    }
                }
            }
            Err(e) => {
                log::warn!("fold failed; counted as a prediction error: {e}");
                failures += 1;
                for e in errors.iter_mut() {
                    *e += 1;
                }
            }
        }
    }

    let ratios = CV_METHODS
        .iter()
        .enumerate()
        .map(|(m, scheme)| (scheme.name().to_string(), errors[m] as f64 / n as f64))
        .collect();

    Ok(LoocvReport {
        n,
        ratios,
        fold_failures: failures,
        prediction_route: match options.cv_prediction {
            CvPrediction::Fma => "fma".to_string(),
            CvPrediction::Selected => "selected".to_string(),
        },
    })
}

/// One fold: refit on the rest, predict the left-out row with each method,
/// return the per-method mistake indicators.
fn run_fold(
    dataset: &Dataset,
    options: &AnalysisOptions,
    controls: &FitControls,
    submodels: &[SubmodelSpec],
    interior: usize,
    row: usize,
) -> Result<[bool; 4]> {
    let fold = dataset.without_row(row);
    let basis = expand_selected(&fold, options.degree, interior)?;
    let set = SubmodelFitSet::fit(
        fold.y.view(),
        &basis,
        &fold.z,
        &fold.partition,
        submodels,
        fold.family,
        controls,
    )?;
    let full_idx = set
        .full_index()
        .ok_or_else(|| Error::Config("submodel subset must include the full model".into()))?;

    let x_star: Vec<f64> = (0..dataset.x_smooth.ncols())
        .map(|a| dataset.x_smooth[[row, a]])
        .collect();
    let z_star = dataset.z.row(row).to_owned();
    let truth = dataset.y[row];

    // focus: the left-out observation's linear predictor (its intercept is
    // common to all submodels and carries no beta-gradient)
    let focus = FocusSpec::General {
        eta_points: x_star.iter().enumerate().map(|(a, &x)| (a, x)).collect(),
        coefs: z_star.clone(),
        offset: 0.0,
    };
    let inputs = FicInputs::estimate(
        &set.fits[full_idx],
        &basis,
        &fold.z,
        fold.family,
        z_star.clone(),
        fold.partition.d_c(),
    )?;
    let mut report = score_submodels(&set, &inputs, &focus, &basis, "loocv")?;
    let sfic_w = apply_weights(WeightScheme::Sfic, &mut report, &set)?;

    let predict_with = |idx: usize| -> Result<f64> {
        let spec = &set.submodels[idx];
        let z_s = spec.project(z_star.view(), fold.partition.d_c())?;
        predict_linear(&set.fits[idx], &basis, &x_star, z_s.as_slice().unwrap())
    };

    let mut mistaken = [false; 4];
    for (m, scheme) in CV_METHODS.into_iter().enumerate() {
        let linear = match scheme {
            WeightScheme::Aic => predict_with(report.chosen_aic)?,
            WeightScheme::Bic => predict_with(report.chosen_bic)?,
            WeightScheme::Fic => predict_with(report.chosen_fic)?,
            WeightScheme::Sfic => match options.cv_prediction {
                CvPrediction::Fma => {
                    let mut acc = 0.0;
                    for (idx, &w) in sfic_w.iter().enumerate() {
                        if w > 0.0 {
                            acc += w * predict_with(idx)?;
                        }
                    }
                    acc
                }
                CvPrediction::Selected => {
                    let best = sfic_w
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                        .map(|(i, _)| i)
                        .unwrap();
                    predict_with(best)?
                }
            },
            _ => unreachable!(),
        };
        let predicted = if linear >= 0.0 { 1.0 } else { 0.0 };
        mistaken[m] = predicted != truth;
    }
    Ok(mistaken)
}
