//! The certain/exploratory partition of the linear covariates and the
//! projection algebra of submodels.
//!
//! A submodel keeps every certain covariate and a subset of the exploratory
//! ones. pi_s selects the kept exploratory coordinates; Pi_s = diag(I, pi_s)
//! acts on the full coefficient vector.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard against enumerating 2^d_u submodels for absurd d_u.
pub const MAX_EXPLORATORY: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovariatePartition {
    pub certain: Vec<String>,
    pub exploratory: Vec<String>,
}

impl CovariatePartition {
    pub fn new(certain: Vec<String>, exploratory: Vec<String>) -> Result<Self> {
        for name in &certain {
            if exploratory.contains(name) {
                return Err(Error::Config(format!(
                    "covariate '{name}' listed as both certain and exploratory"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in certain.iter().chain(exploratory.iter()) {
            if !seen.insert(name.clone()) {
                return Err(Error::Config(format!("duplicate covariate '{name}'")));
            }
        }
        Ok(Self {
            certain,
            exploratory,
        })
    }

    pub fn d_c(&self) -> usize {
        self.certain.len()
    }

    pub fn d_u(&self) -> usize {
        self.exploratory.len()
    }

    pub fn d(&self) -> usize {
        self.d_c() + self.d_u()
    }
}

/// One submodel: a bitmask over the exploratory coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubmodelSpec {
    mask: u32,
    d_u: usize,
}

impl SubmodelSpec {
    pub fn new(mask: u32, d_u: usize) -> Result<Self> {
        if d_u > MAX_EXPLORATORY {
            return Err(Error::Config(format!(
                "{d_u} exploratory covariates exceeds the limit of {MAX_EXPLORATORY}"
            )));
        }
        if d_u < 32 && mask >= (1u32 << d_u) {
            return Err(Error::Config(format!(
                "mask {mask:#b} addresses more than {d_u} exploratory coordinates"
            )));
        }
        Ok(Self { mask, d_u })
    }

    pub fn full(d_u: usize) -> Self {
        Self {
            mask: if d_u == 0 { 0 } else { (1u32 << d_u) - 1 },
            d_u,
        }
    }

    pub fn narrow(d_u: usize) -> Self {
        Self { mask: 0, d_u }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn d_u(&self) -> usize {
        self.d_u
    }

    /// Exploratory coordinates kept by this submodel, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.d_u).filter(|j| self.mask >> j & 1 == 1).collect()
    }

    /// Exploratory coordinates excluded by this submodel, ascending.
    pub fn excluded(&self) -> Vec<usize> {
        (0..self.d_u).filter(|j| self.mask >> j & 1 == 0).collect()
    }

    pub fn d_us(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_full(&self) -> bool {
        self.d_us() == self.d_u
    }

    /// Digit label in the style of the data analysis sections: exploratory
    /// coordinate j maps to digit d_c + j + 1, the empty model to "0".
    pub fn label(&self, d_c: usize) -> String {
        if self.mask == 0 {
            return "0".into();
        }
        self.selected()
            .iter()
            .map(|j| (d_c + j + 1).to_string())
            .collect::<Vec<_>>()
            .join("")
    }

    /// Bitstring label, exploratory coordinate 0 first.
    pub fn bit_label(&self) -> String {
        (0..self.d_u)
            .map(|j| if self.mask >> j & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Parse either a digit label ("0", "35", ...) or a bitstring ("010...").
    pub fn parse_label(text: &str, d_c: usize, d_u: usize) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("cannot parse submodel label '{text}': {why}"));
        if text == "0" {
            return Self::new(0, d_u);
        }
        if text.len() == d_u && text.chars().all(|c| c == '0' || c == '1') && d_u > 1 {
            let mut mask = 0u32;
            for (j, c) in text.chars().enumerate() {
                if c == '1' {
                    mask |= 1 << j;
                }
            }
            return Self::new(mask, d_u);
        }
        let mut mask = 0u32;
        for c in text.chars() {
            let digit = c
                .to_digit(10)
                .ok_or_else(|| bad("expected decimal digits"))? as usize;
            if digit <= d_c || digit > d_c + d_u {
                return Err(bad(&format!(
                    "digit {digit} outside the exploratory range {}..={}",
                    d_c + 1,
                    d_c + d_u
                )));
            }
            let bit = 1u32 << (digit - d_c - 1);
            if mask & bit != 0 {
                return Err(bad(&format!("digit {digit} repeated")));
            }
            mask |= bit;
        }
        Self::new(mask, d_u)
    }

    /// Pi_s v: keep the certain block and the selected exploratory entries.
    pub fn project(&self, v: ArrayView1<f64>, d_c: usize) -> Result<Array1<f64>> {
        if v.len() != d_c + self.d_u {
            return Err(Error::Dimension(format!(
                "projection expects a {} vector, got {}",
                d_c + self.d_u,
                v.len()
            )));
        }
        let mut out = Array1::zeros(d_c + self.d_us());
        for i in 0..d_c {
            out[i] = v[i];
        }
        for (t, j) in self.selected().into_iter().enumerate() {
            out[d_c + t] = v[d_c + j];
        }
        Ok(out)
    }

    /// Pi_s^T w: scatter back into the full layout, zeros elsewhere.
    pub fn embed(&self, w: ArrayView1<f64>, d_c: usize) -> Result<Array1<f64>> {
        if w.len() != d_c + self.d_us() {
            return Err(Error::Dimension(format!(
                "embedding expects a {} vector, got {}",
                d_c + self.d_us(),
                w.len()
            )));
        }
        let mut out = Array1::zeros(d_c + self.d_u);
        for i in 0..d_c {
            out[i] = w[i];
        }
        for (t, j) in self.selected().into_iter().enumerate() {
            out[d_c + j] = w[d_c + t];
        }
        Ok(out)
    }

    /// Pi_s as a dense (d_c + d_uS) x d matrix.
    pub fn projection_matrix(&self, d_c: usize) -> Array2<f64> {
        let d = d_c + self.d_u;
        let mut pi = Array2::zeros((d_c + self.d_us(), d));
        for i in 0..d_c {
            pi[[i, i]] = 1.0;
        }
        for (t, j) in self.selected().into_iter().enumerate() {
            pi[[d_c + t, d_c + j]] = 1.0;
        }
        pi
    }

    /// pi-bar_s: rows selecting the exploratory coordinates NOT in the mask,
    /// acting on the d_u-dimensional exploratory block only.
    pub fn complement_projection(&self) -> Array2<f64> {
        let excl = self.excluded();
        let mut pi = Array2::zeros((excl.len(), self.d_u));
        for (t, j) in excl.into_iter().enumerate() {
            pi[[t, j]] = 1.0;
        }
        pi
    }
}

/// All submodels in increasing-popcount order, ties broken lexicographically
/// by the selected index sets; or an explicit subset passed through verbatim.
pub fn enumerate_submodels(
    partition: &CovariatePartition,
    subset: Option<&[SubmodelSpec]>,
) -> Result<Vec<SubmodelSpec>> {
    let d_u = partition.d_u();
    if d_u > MAX_EXPLORATORY {
        return Err(Error::Config(format!(
            "{d_u} exploratory covariates exceeds the limit of {MAX_EXPLORATORY}"
        )));
    }
    if let Some(subset) = subset {
        let mut seen = std::collections::HashSet::new();
        for spec in subset {
            if spec.d_u() != d_u {
                return Err(Error::Config(format!(
                    "submodel {} built for {} exploratory covariates, partition has {}",
                    spec.bit_label(),
                    spec.d_u(),
                    d_u
                )));
            }
            if !seen.insert(spec.mask()) {
                return Err(Error::Config(format!(
                    "duplicate submodel '{}' in subset",
                    spec.label(partition.d_c())
                )));
            }
        }
        return Ok(subset.to_vec());
    }

    let mut all: Vec<SubmodelSpec> = (0u32..1 << d_u)
        .map(|mask| SubmodelSpec { mask, d_u })
        .collect();
    all.sort_by(|a, b| {
        a.d_us()
            .cmp(&b.d_us())
            .then_with(|| a.selected().cmp(&b.selected()))
    });
    Ok(all)
}
