// probe cleaning x knot-count combinations against the published table
use gaplm::analyze::{analyze, parse_focus, AnalysisOptions};
use gaplm::data::{load_csv, DatasetConfig};
use gaplm::family::QuasiFamily;
use gaplm::knots::KnotMode;
use std::path::PathBuf;

fn main() {
    let cleanings: [(&str, Vec<&str>); 3] = [
        ("none", vec![]),
        ("BMI", vec!["BMI"]),
        ("BMI+PGC", vec!["BMI", "PGC"]),
    ];
    for (clabel, na) in cleanings {
        for j in [3usize, 4, 5] {
            let config = DatasetConfig {
                path: PathBuf::from("data/pima.csv"),
                response: "Diabetes".into(),
                smooth: vec!["BMI".into(), "AGE".into()],
                linear_certain: vec!["PGC".into(), "DPF".into()],
                linear_exploratory: vec!["DBP".into(), "NumPreg".into(), "SI".into(), "TSFT".into()],
                family: QuasiFamily::BernoulliLogit,
                standardize: true,
                na_zero: na.iter().map(|s| s.to_string()).collect(),
            };
            let ds = match load_csv(&config) { Ok(d) => d, Err(e) => { println!("{clabel} J={j}: load {e}"); continue } };
            let options = AnalysisOptions { knot_mode: KnotMode::Fixed(j), ..Default::default() };
            let foci = [
                "beta:PGC",
                "beta:DPF",
                "eta:BMI@-1.501+eta:AGE@0.585+0.028*PGC-0.899*DPF-1.570*DBP+1.087*NumPreg-0.223*SI-0.707*TSFT",
                "eta:BMI@-0.059+eta:AGE@1.363+0.994*PGC+0.423*DPF+0.645*DBP+1.117*NumPreg-0.221*SI+0.055*TSFT",
            ];
            let parsed: Vec<(String, _)> = foci.iter().enumerate()
                .map(|(i, t)| (format!("mu{}", i + 1), parse_focus(t, &ds).unwrap())).collect();
            match analyze(&ds, &options, &parsed) {
                Ok(rep) => {
                    let c = &rep.coefficients;
                    let mu1 = rep.foci[0].report.as_ref();
                    match mu1 {
                        Some(r1) => {
                            let labels: Vec<String> = rep.foci.iter().map(|o| o.report.as_ref().map(|r| r.fic.chosen_fic_label().to_string()).unwrap_or("ERR".into())).collect();
                            println!("{clabel} n={} J={j}: PGC {:.4} (SE {:.4}) NumPreg {:.4} | AIC@{} BIC@{} | FIC {} | k2_mu1 {:.2}",
                                rep.n_used, c[0].estimate, c[0].se, c[3].estimate,
                                r1.fic.chosen_aic_label(), r1.fic.chosen_bic_label(),
                                labels.join(","), r1.fic.kappa2);
                        }
                        None => println!("{clabel} J={j}: focus failed"),
                    }
                }
                Err(e) => println!("{clabel} n={} J={j}: {e}", ds.n()),
            }
        }
    }
}
