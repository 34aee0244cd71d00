//! gaplm: fit generalized additive partial linear models, score submodels
//! with the focused information criterion, average them, replicate the
//! Monte-Carlo study and run leave-one-out prediction experiments.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use gaplm::analyze::{analyze, loocv, parse_focus, AnalysisOptions, AnalysisReport, CvPrediction};
use gaplm::data::{load_csv, Dataset, DatasetConfig};
use gaplm::family::QuasiFamily;
use gaplm::fic::WeightScheme;
use gaplm::knots::KnotMode;
use gaplm::sim::{run_study, SimDesign};

#[derive(Parser)]
#[command(
    name = "gaplm",
    version,
    about = "Generalized additive partial linear models with focused model selection and averaging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the full model: knot search, coefficient table, component curves.
    Fit(FitArgs),
    /// Score every submodel (AIC, BIC, FIC) for one or more focus parameters.
    Select(FocusArgs),
    /// Model-average the focus estimates and report bias-corrected intervals.
    Average(FocusArgs),
    /// Replicate the Monte-Carlo coverage/MSE study.
    Simulate(SimArgs),
    /// Leave-one-out cross-validated misclassification per method.
    Cv(CvArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Response column name.
    #[arg(long)]
    response: String,
    /// Comma-separated covariates entering the smooth additive part.
    #[arg(long, value_delimiter = ',', required = true)]
    smooth: Vec<String>,
    /// Comma-separated linear covariates kept in every submodel.
    #[arg(long, value_delimiter = ',', required = true)]
    certain: Vec<String>,
    /// Comma-separated linear covariates subject to selection.
    #[arg(long, value_delimiter = ',', default_value = "")]
    exploratory: Vec<String>,
    /// bernoulli-logit, gaussian-identity or poisson-log.
    #[arg(long, default_value = "bernoulli-logit")]
    family: String,
    /// Keep covariates in their original units.
    #[arg(long)]
    no_standardize: bool,
    /// Columns where a literal 0 encodes a missing value.
    #[arg(long, value_delimiter = ',', default_value = "")]
    na_zero: Vec<String>,
}

#[derive(Args)]
struct ModelArgs {
    /// Spline degree.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// auto | auto-over | auto-under | <integer>.
    #[arg(long, default_value = "auto")]
    knots: String,
    /// Nominal confidence level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Weighting scheme for averaging: sfic | fic | aic | bic | full.
    #[arg(long, default_value = "sfic")]
    weights: String,
    /// Comma-separated submodel labels to restrict the sweep.
    #[arg(long)]
    subset: Option<String>,
    /// Points per component curve.
    #[arg(long, default_value_t = 101)]
    curve_points: usize,
}

#[derive(Args)]
struct OutArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json | csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FocusArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Focus parameter; repeatable. Terms: beta:NAME, C*NAME,
    /// eta:NAME@VALUE, constants; joined by + or -.
    #[arg(long = "focus", required = true)]
    focus: Vec<String>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 4.0)]
    r0: f64,
    /// Correlation base of the linear covariates.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 2010)]
    seed: u64,
    /// auto | auto-over | auto-under | <integer>.
    #[arg(long, default_value = "auto")]
    knot_mode: String,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
    /// fma: S-FIC predicts with weighted linear predictors;
    /// selected: every method predicts with one submodel.
    #[arg(long, default_value = "fma")]
    cv_prediction: String,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Fit(args) => {
            let dataset = build_dataset(&args.data)?;
            let options = build_options(&args.model, CvPrediction::Fma)?;
            let report = analyze(&dataset, &options, &[])?;
            match args.out.format.as_str() {
                "json" => emit_json(&args.out, &report)?,
                "csv" => emit_text(&args.out, &coefficients_csv(&report))?,
                other => bail!("unknown format '{other}'"),
            }
        }
        Command::Select(args) | Command::Average(args) => {
            let dataset = build_dataset(&args.data)?;
            let options = build_options(&args.model, CvPrediction::Fma)?;
            let foci = parse_foci(&args.focus, &dataset)?;
            let report = analyze(&dataset, &options, &foci)?;
            for outcome in &report.foci {
                if let Some(err) = &outcome.error {
                    log::warn!("focus '{}' failed: {err}", outcome.label);
                }
            }
            match args.out.format.as_str() {
                "json" => emit_json(&args.out, &report)?,
                "csv" => emit_text(&args.out, &submodel_csv(&report))?,
                other => bail!("unknown format '{other}'"),
            }
        }
        Command::Simulate(args) => {
            let design = SimDesign {
                n: args.n,
                r0: args.r0,
                varpi: args.rho,
                replications: args.reps,
                base_seed: args.seed,
                knot_mode: KnotMode::parse(&args.knot_mode)?,
                level: args.level,
                degree: 3,
            };
            let summary = run_study(&design);
            match args.out.format.as_str() {
                "json" => emit_json(&args.out, &summary)?,
                "csv" => {
                    let mut buf = Vec::new();
                    summary.write_csv(&mut buf)?;
                    emit_text(&args.out, &String::from_utf8(buf)?)?;
                }
                other => bail!("unknown format '{other}'"),
            }
        }
        Command::Cv(args) => {
            let dataset = build_dataset(&args.data)?;
            let route = match args.cv_prediction.as_str() {
                "fma" => CvPrediction::Fma,
                "selected" => CvPrediction::Selected,
                other => bail!("unknown cv prediction route '{other}'"),
            };
            let options = build_options(&args.model, route)?;
            let report = loocv(&dataset, &options)?;
            match args.out.format.as_str() {
                "json" => emit_json(&args.out, &report)?,
                "csv" => {
                    let mut text = String::from("method,error_ratio\n");
                    for (method, ratio) in &report.ratios {
                        text.push_str(&format!("{method},{ratio:.6}\n"));
                    }
                    emit_text(&args.out, &text)?;
                }
                other => bail!("unknown format '{other}'"),
            }
        }
    }
    Ok(())
}

fn build_dataset(args: &DataArgs) -> anyhow::Result<Dataset> {
    let strip = |v: &[String]| -> Vec<String> {
        v.iter().filter(|s| !s.is_empty()).cloned().collect()
    };
    let config = DatasetConfig {
        path: args.data.clone(),
        response: args.response.clone(),
        smooth: strip(&args.smooth),
        linear_certain: strip(&args.certain),
        linear_exploratory: strip(&args.exploratory),
        family: QuasiFamily::parse(&args.family)?,
        standardize: !args.no_standardize,
        na_zero: strip(&args.na_zero),
    };
    load_csv(&config).with_context(|| format!("loading {}", args.data.display()))
}

fn build_options(args: &ModelArgs, cv: CvPrediction) -> anyhow::Result<AnalysisOptions> {
    Ok(AnalysisOptions {
        degree: args.degree,
        knot_mode: KnotMode::parse(&args.knots)?,
        level: args.level,
        weights: WeightScheme::parse(&args.weights)?,
        submodel_subset: args
            .subset
            .as_ref()
            .map(|s| s.split(',').map(|l| l.trim().to_string()).collect()),
        curve_points: args.curve_points,
        cv_prediction: cv,
        controls: Default::default(),
    })
}

fn parse_foci(
    texts: &[String],
    dataset: &Dataset,
) -> anyhow::Result<Vec<(String, gaplm::fic::FocusSpec)>> {
    texts
        .iter()
        .map(|t| {
            parse_focus(t, dataset)
                .map(|spec| (t.clone(), spec))
                .with_context(|| format!("parsing focus '{t}'"))
        })
        .collect()
}

fn coefficients_csv(report: &AnalysisReport) -> String {
    let mut text = String::from("name,estimate,se,z,p_value\n");
    for row in &report.coefficients {
        text.push_str(&format!(
            "{},{:.6},{:.6},{:.4},{:.6}\n",
            row.name, row.estimate, row.se, row.z_value, row.p_value
        ));
    }
    text
}

fn submodel_csv(report: &AnalysisReport) -> String {
    let mut text =
        String::from("focus,label,bits,fic,aic,bic,qloglik,n_params,mu_hat,se_naive,weight\n");
    for outcome in &report.foci {
        let Some(rep) = &outcome.report else { continue };
        for s in &rep.fic.scores {
            let fic = s
                .fic
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default();
            text.push_str(&format!(
                "{},{},{},{},{:.4},{:.4},{:.6},{},{:.6},{:.6},{:.6}\n",
                rep.label,
                s.label,
                s.bit_label,
                fic,
                s.aic,
                s.bic,
                s.qloglik,
                s.n_params,
                s.mu_hat,
                s.se_naive,
                s.weight
            ));
        }
    }
    text
}

fn emit_json<T: serde::Serialize>(out: &OutArgs, value: &T) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    emit_text(out, &json)
}

fn emit_text(out: &OutArgs, text: &str) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => {
            let mut f = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => {
            println!("{text}");
        }
    }
    Ok(())
}
