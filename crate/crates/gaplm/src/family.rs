//! Quasi-likelihood families: link, inverse link, variance function and the
//! derived weights rho_1, rho_2 and score q_1 used by the fitter and the
//! information-matrix plug-ins.
//!
//! rho_l(m) = {d g^{-1}(m) / dm}^l / V{g^{-1}(m)} for l = 1, 2, evaluated on
//! the linear-predictor scale. All three supported links are canonical, so
//! rho_1 is identically 1; the implementations keep the general expressions
//! where that costs nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuasiFamily {
    BernoulliLogit,
    GaussianIdentity,
    PoissonLog,
}

/// Derivative order for [`rho_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoOrder {
    One,
    Two,
}

impl QuasiFamily {
    pub fn name(&self) -> &'static str {
        match self {
            QuasiFamily::BernoulliLogit => "bernoulli-logit",
            QuasiFamily::GaussianIdentity => "gaussian-identity",
            QuasiFamily::PoissonLog => "poisson-log",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "bernoulli-logit" | "bernoulli" | "binomial" | "logit" => {
                Ok(QuasiFamily::BernoulliLogit)
            }
            "gaussian-identity" | "gaussian" | "normal" => Ok(QuasiFamily::GaussianIdentity),
            "poisson-log" | "poisson" => Ok(QuasiFamily::PoissonLog),
            other => Err(Error::Config(format!(
                "unknown family '{other}' (expected bernoulli-logit, gaussian-identity or poisson-log)"
            ))),
        }
    }

    /// Inverse link: mean as a function of the linear predictor.
    pub fn inv_link(&self, m: f64) -> f64 {
        match self {
            QuasiFamily::BernoulliLogit => sigmoid(m),
            QuasiFamily::GaussianIdentity => m,
            QuasiFamily::PoissonLog => m.exp(),
        }
    }

    /// Link: linear predictor as a function of the mean.
    pub fn link(&self, mu: f64) -> f64 {
        match self {
            QuasiFamily::BernoulliLogit => (mu / (1.0 - mu)).ln(),
            QuasiFamily::GaussianIdentity => mu,
            QuasiFamily::PoissonLog => mu.ln(),
        }
    }

    /// Variance function V(mu).
    pub fn variance(&self, mu: f64) -> f64 {
        match self {
            QuasiFamily::BernoulliLogit => mu * (1.0 - mu),
            QuasiFamily::GaussianIdentity => 1.0,
            QuasiFamily::PoissonLog => mu,
        }
    }

    /// Quasi-likelihood contribution Q(g^{-1}(m), y) on the linear-predictor
    /// scale, with constants not depending on m dropped.
    pub fn quasi_loglik(&self, m: f64, y: f64) -> f64 {
        match self {
            // y*m - log(1 + e^m), stable for |m| up to ~700
            QuasiFamily::BernoulliLogit => y * m - softplus(m),
            QuasiFamily::GaussianIdentity => -0.5 * (y - m) * (y - m),
            QuasiFamily::PoissonLog => y * m - m.exp(),
        }
    }

    /// rho_1 or rho_2 at linear predictor m.
    pub fn rho(&self, m: f64, order: RhoOrder) -> f64 {
        match self {
            // canonical: d g^{-1}/dm = V(mu), so rho_1 = 1, rho_2 = mu(1-mu)
            QuasiFamily::BernoulliLogit => match order {
                RhoOrder::One => 1.0,
                RhoOrder::Two => sigmoid(m) * sigmoid(-m),
            },
            QuasiFamily::GaussianIdentity => 1.0,
            QuasiFamily::PoissonLog => match order {
                RhoOrder::One => 1.0,
                RhoOrder::Two => m.exp(),
            },
        }
    }

    /// Score weight q_1(m, y) = {y - g^{-1}(m)} rho_1(m).
    pub fn q1(&self, m: f64, y: f64) -> f64 {
        (y - self.inv_link(m)) * self.rho(m, RhoOrder::One)
    }

    /// Check that every response value is inside the family's support.
    pub fn validate_response(&self, y: &[f64]) -> Result<()> {
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Response {
                    family: self.name().into(),
                    reason: format!("non-finite value at row {i}"),
                });
            }
            let ok = match self {
                QuasiFamily::BernoulliLogit => v == 0.0 || v == 1.0,
                QuasiFamily::GaussianIdentity => true,
                QuasiFamily::PoissonLog => v >= 0.0,
            };
            if !ok {
                return Err(Error::Response {
                    family: self.name().into(),
                    reason: format!("value {v} at row {i} outside the support"),
                });
            }
        }
        Ok(())
    }

    /// Whether the quasi-likelihood maximum escapes to infinity when every
    /// observation is fitted exactly (bounded-mean families).
    pub(crate) fn separable(&self) -> bool {
        matches!(self, QuasiFamily::BernoulliLogit | QuasiFamily::PoissonLog)
    }
}

/// Standalone form of the spec operation: rho_eval(family, m, order).
pub fn rho_eval(family: QuasiFamily, m: f64, order: RhoOrder) -> f64 {
    family.rho(m, order)
}

fn sigmoid(m: f64) -> f64 {
    if m >= 0.0 {
        1.0 / (1.0 + (-m).exp())
    } else {
        let e = m.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^m) without overflow.
fn softplus(m: f64) -> f64 {
    if m > 0.0 {
        m + (-m).exp().ln_1p()
    } else {
        m.exp().ln_1p()
    }
}
