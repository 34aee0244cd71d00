//! Clamped, equally spaced B-spline bases on [0, 1] and the design-block
//! expansion used by the additive part of the model.
//!
//! The raw basis functions of degree `d` with `J` interior knots form a
//! partition of unity, so a block of raw columns is exactly collinear with an
//! intercept column. The expansion therefore keeps the full raw columns (for
//! centering and reporting) and hands the fitter a reduced design that drops
//! the first function of each block; the spanned function space is identical.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{Error, Result};

/// Knot layout for one smooth covariate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplineSpec {
    /// Polynomial degree, at least 1 (cubic = 3).
    pub degree: usize,
    /// Number of interior knots J; spacing is 1/(J+1).
    pub interior_knots: usize,
}

impl SplineSpec {
    pub fn new(degree: usize, interior_knots: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidSpline(format!(
                "degree must be at least 1, got {degree}"
            )));
        }
        Ok(Self {
            degree,
            interior_knots,
        })
    }

    /// Number of basis functions: J + degree + 1.
    pub fn dim(&self) -> usize {
        self.interior_knots + self.degree + 1
    }

    pub fn knots(&self) -> Vec<f64> {
        make_knots(self.degree, self.interior_knots)
    }
}

/// Clamped knot vector on [0, 1]: degree+1 repeats of 0, J equally spaced
/// interior knots, degree+1 repeats of 1. Length J + 2(degree + 1).
pub fn make_knots(degree: usize, interior: usize) -> Vec<f64> {
    let mut knots = Vec::with_capacity(interior + 2 * (degree + 1));
    knots.extend(std::iter::repeat(0.0).take(degree + 1));
    let h = 1.0 / (interior as f64 + 1.0);
    for j in 1..=interior {
        knots.push(j as f64 * h);
    }
    knots.extend(std::iter::repeat(1.0).take(degree + 1));
    knots
}

/// Evaluate all J + degree + 1 basis functions at `x` in [0, 1].
///
/// Cox-de Boor recursion on the knot span containing `x`; at most degree+1
/// entries are nonzero and the values sum to 1.
pub fn eval_basis(x: f64, spec: &SplineSpec) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { x });
    }
    let degree = spec.degree;
    let knots = spec.knots();
    let nb = spec.dim();

    // Largest span index s with knots[s] <= x, restricted to the
    // non-degenerate spans [degree, degree + J].
    let mut span = knots.partition_point(|&k| k <= x);
    span = span.saturating_sub(1).clamp(degree, degree + spec.interior_knots);

    // Triangular scheme for the degree+1 nonzero values on this span.
    let mut values = vec![0.0; degree + 1];
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    values[0] = 1.0;
    for r in 1..=degree {
        left[r] = x - knots[span + 1 - r];
        right[r] = knots[span + r] - x;
        let mut saved = 0.0;
        for t in 0..r {
            let tmp = values[t] / (right[t + 1] + left[r - t]);
            values[t] = saved + right[t + 1] * tmp;
            saved = left[r - t] * tmp;
        }
        values[r] = saved;
    }

    let mut out = vec![0.0; nb];
    for (t, v) in values.iter().enumerate() {
        // Clamp one-ulp noise so entries stay inside [0, 1].
        out[span - degree + t] = v.clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Evaluated B-spline design columns for all smooth covariates.
///
/// `columns` holds the full raw blocks (per-covariate rows sum to 1);
/// `column_means` are the training-sample means used for post-fit centering.
#[derive(Debug, Clone)]
pub struct BasisExpansion {
    specs: Vec<SplineSpec>,
    pub columns: Array2<f64>,
    pub column_means: Array1<f64>,
    blocks: Vec<Range<usize>>,
}

impl BasisExpansion {
    /// Expand an n x p matrix of covariates already rescaled to [0, 1].
    pub fn expand(x: &Array2<f64>, specs: &[SplineSpec]) -> Result<Self> {
        if x.ncols() != specs.len() {
            return Err(Error::Dimension(format!(
                "{} covariate columns but {} spline specs",
                x.ncols(),
                specs.len()
            )));
        }
        for ((i, j), v) in x.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "smooth covariate".into(),
                    row: i,
                    col: j,
                });
            }
        }

        let n = x.nrows();
        let mut blocks = Vec::with_capacity(specs.len());
        let mut start = 0usize;
        for spec in specs {
            blocks.push(start..start + spec.dim());
            start += spec.dim();
        }
        let total = start;

        let mut columns = Array2::zeros((n, total));
        for (a, spec) in specs.iter().enumerate() {
            let block = blocks[a].clone();
            for i in 0..n {
                let vals = eval_basis(x[[i, a]], spec)?;
                for (t, v) in vals.iter().enumerate() {
                    columns[[i, block.start + t]] = *v;
                }
            }
        }
        let column_means = columns.mean_axis(ndarray::Axis(0)).unwrap();

        Ok(Self {
            specs: specs.to_vec(),
            columns,
            column_means,
            blocks,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.columns.nrows()
    }

    pub fn n_covariates(&self) -> usize {
        self.specs.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.ncols()
    }

    pub fn spec(&self, covariate: usize) -> &SplineSpec {
        &self.specs[covariate]
    }

    /// Column range of covariate `a` within the full raw matrix.
    pub fn block(&self, covariate: usize) -> Range<usize> {
        self.blocks[covariate].clone()
    }

    /// Number of columns the fitter sees (one dropped per covariate).
    pub fn reduced_cols(&self) -> usize {
        self.n_cols() - self.specs.len()
    }

    /// Design block with the first basis column of each covariate removed.
    pub fn reduced_design(&self) -> Array2<f64> {
        let n = self.n_rows();
        let mut out = Array2::zeros((n, self.reduced_cols()));
        let mut dst = 0usize;
        for block in &self.blocks {
            for src in block.start + 1..block.end {
                out.column_mut(dst).assign(&self.columns.column(src));
                dst += 1;
            }
        }
        out
    }

    /// Reduced-coordinate basis row for a new point (per-covariate values
    /// rescaled to [0, 1]); used for prediction.
    pub fn reduced_row(&self, x: &[f64]) -> Result<Array1<f64>> {
        if x.len() != self.specs.len() {
            return Err(Error::Dimension(format!(
                "expected {} smooth covariate values, got {}",
                self.specs.len(),
                x.len()
            )));
        }
        let mut out = Array1::zeros(self.reduced_cols());
        let mut dst = 0usize;
        for (a, spec) in self.specs.iter().enumerate() {
            let vals = eval_basis(x[a], spec)?;
            for v in vals.iter().skip(1) {
                out[dst] = *v;
                dst += 1;
            }
        }
        Ok(out)
    }

    /// Map a full-length coefficient vector index to its reduced position,
    /// or None for the dropped leading function of each block.
    pub fn reduced_index(&self, full_index: usize) -> Option<usize> {
        let mut offset = 0usize;
        for block in &self.blocks {
            if block.contains(&full_index) {
                if full_index == block.start {
                    return None;
                }
                return Some(offset + (full_index - block.start) - 1);
            }
            offset += block.len() - 1;
        }
        None
    }

    /// Embed reduced-coordinate spline coefficients into the full layout,
    /// with 0 for each dropped leading function.
    pub fn embed_gamma(&self, reduced: ArrayView1<f64>) -> Array1<f64> {
        let mut full = Array1::zeros(self.n_cols());
        let mut src = 0usize;
        for block in &self.blocks {
            for dst in block.start + 1..block.end {
                full[dst] = reduced[src];
                src += 1;
            }
        }
        full
    }

    /// Centering constant for covariate `a`: the training-sample mean of the
    /// raw fitted component, subtracted to enforce a mean-zero estimate.
    pub fn center_offset(&self, covariate: usize, gamma_full: ArrayView1<f64>) -> f64 {
        self.block(covariate)
            .map(|j| gamma_full[j] * self.column_means[j])
            .sum()
    }

    /// Centered component estimate at a rescaled point x in [0, 1]:
    /// sum_j gamma_j b_j(x) minus the training-sample mean of that sum.
    pub fn component_value(
        &self,
        covariate: usize,
        gamma_full: ArrayView1<f64>,
        x: f64,
    ) -> Result<f64> {
        let vals = eval_basis(x, &self.specs[covariate])?;
        let block = self.block(covariate);
        let raw: f64 = vals
            .iter()
            .enumerate()
            .map(|(t, v)| gamma_full[block.start + t] * v)
            .sum();
        Ok(raw - self.center_offset(covariate, gamma_full))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn knots_cubic_no_interior() {
        assert_eq!(
            make_knots(3, 0),
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn knots_cubic_two_interior() {
        // J + 2(degree + 1) entries: 2 interior + 4 clamped on each side
        let k = make_knots(3, 2);
        assert_eq!(k.len(), 10);
        assert_abs_diff_eq!(k[4], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k[5], 2.0 / 3.0, epsilon = 1e-15);
        let spec = SplineSpec::new(3, 2).unwrap();
        assert_eq!(spec.dim(), 6);
        assert_eq!(k.len(), spec.dim() + spec.degree + 1);
    }

    #[test]
    fn knots_linear_one_interior() {
        assert_eq!(make_knots(1, 1), vec![0.0, 0.0, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn bernstein_values_at_half() {
        let spec = SplineSpec::new(3, 0).unwrap();
        let v = eval_basis(0.5, &spec).unwrap();
        let expect = [0.125, 0.375, 0.375, 0.125];
        for (a, b) in v.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn left_endpoint_is_first_basis_function() {
        for (deg, j) in [(1, 0), (2, 3), (3, 5), (4, 2)] {
            let spec = SplineSpec::new(deg, j).unwrap();
            let v = eval_basis(0.0, &spec).unwrap();
            assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-14);
            assert!(v[1..].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn right_endpoint_is_last_basis_function() {
        let spec = SplineSpec::new(3, 4).unwrap();
        let v = eval_basis(1.0, &spec).unwrap();
        assert_abs_diff_eq!(v[spec.dim() - 1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let spec = SplineSpec::new(3, 2).unwrap();
        assert!(eval_basis(-0.01, &spec).is_err());
        assert!(eval_basis(1.01, &spec).is_err());
    }

    // ------------------------------------------------------------------
    // Independent oracle: expand each basis function into its polynomial
    // pieces via the Cox-de Boor definition on polynomial coefficients,
    // then evaluate with Horner. Shares no code with eval_basis.
    // ------------------------------------------------------------------

    #[derive(Clone, Default)]
    struct Poly(Vec<f64>);

    impl Poly {
        fn eval(&self, x: f64) -> f64 {
            self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
        }
        fn add(&self, other: &Poly) -> Poly {
            let n = self.0.len().max(other.0.len());
            let mut c = vec![0.0; n];
            for (i, v) in self.0.iter().enumerate() {
                c[i] += v;
            }
            for (i, v) in other.0.iter().enumerate() {
                c[i] += v;
            }
            Poly(c)
        }
        /// Multiply by the linear factor a + b x.
        fn mul_linear(&self, a: f64, b: f64) -> Poly {
            let mut c = vec![0.0; self.0.len() + 1];
            for (i, v) in self.0.iter().enumerate() {
                c[i] += a * v;
                c[i + 1] += b * v;
            }
            Poly(c)
        }
    }

    /// Piecewise polynomials of basis function j at degree r: one Poly per
    /// knot interval [knots[i], knots[i+1]).
    fn bspline_pieces(knots: &[f64], j: usize, r: usize) -> Vec<Poly> {
        let m = knots.len() - 1;
        if r == 0 {
            let mut pieces = vec![Poly::default(); m];
            if knots[j] < knots[j + 1] {
                pieces[j] = Poly(vec![1.0]);
            }
            return pieces;
        }
        let lower_l = bspline_pieces(knots, j, r - 1);
        let lower_r = bspline_pieces(knots, j + 1, r - 1);
        let mut pieces = vec![Poly::default(); m];
        let den_l = knots[j + r] - knots[j];
        let den_r = knots[j + r + 1] - knots[j + 1];
        for i in 0..m {
            let mut p = Poly::default();
            if den_l > 0.0 {
                p = p.add(&lower_l[i].mul_linear(-knots[j] / den_l, 1.0 / den_l));
            }
            if den_r > 0.0 {
                p = p.add(&lower_r[i].mul_linear(knots[j + r + 1] / den_r, -1.0 / den_r));
            }
            pieces[i] = p;
        }
        pieces
    }

    fn oracle_basis(x: f64, spec: &SplineSpec) -> Vec<f64> {
        let knots = spec.knots();
        let m = knots.len() - 1;
        // interval containing x, half-open except the last non-empty one
        let mut interval = m - 1;
        for i in 0..m {
            if knots[i] <= x && (x < knots[i + 1] || (x == 1.0 && knots[i + 1] == 1.0)) {
                interval = i;
                break;
            }
        }
        (0..spec.dim())
            .map(|j| bspline_pieces(&knots, j, spec.degree)[interval].eval(x))
            .collect()
    }

    #[test]
    fn matches_polynomial_expansion_oracle() {
        let spec = SplineSpec::new(3, 5).unwrap();
        let got = eval_basis(0.37, &spec).unwrap();
        let want = oracle_basis(0.37, &spec);
        assert_eq!(got.len(), 9);
        for (g, w) in got.iter().zip(want.iter()) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-10);
        }
        // reference values computed from the same expansion, frozen
        assert_abs_diff_eq!(got[2], 0.079092, epsilon = 1e-10);
        assert_abs_diff_eq!(got[3], 0.6235906666666665, epsilon = 1e-10);
        assert_abs_diff_eq!(got[4], 0.2955426666666667, epsilon = 1e-10);
        assert_abs_diff_eq!(got[5], 0.0017746666666666687, epsilon = 1e-10);
    }

    #[test]
    fn matches_oracle_across_degrees_and_knots() {
        let mut rng = StdRng::seed_from_u64(11);
        for degree in 1..=4usize {
            for interior in [0usize, 1, 3, 7] {
                let spec = SplineSpec::new(degree, interior).unwrap();
                for _ in 0..20 {
                    let x: f64 = rng.gen();
                    let got = eval_basis(x, &spec).unwrap();
                    let want = oracle_basis(x, &spec);
                    for (g, w) in got.iter().zip(want.iter()) {
                        assert_abs_diff_eq!(g, w, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(
            x in 0.0f64..=1.0,
            degree in 1usize..=5,
            interior in 0usize..=20,
        ) {
            let spec = SplineSpec::new(degree, interior).unwrap();
            let v = eval_basis(x, &spec).unwrap();
            let sum: f64 = v.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(v.iter().all(|&b| (0.0..=1.0).contains(&b)));
            prop_assert!(v.iter().filter(|&&b| b != 0.0).count() <= degree + 1);
        }
    }

    #[test]
    fn local_support() {
        let spec = SplineSpec::new(3, 6).unwrap();
        let knots = spec.knots();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..300 {
            let x: f64 = rng.gen();
            let v = eval_basis(x, &spec).unwrap();
            for (j, &b) in v.iter().enumerate() {
                if x < knots[j] || x > knots[j + spec.degree + 1] {
                    assert_eq!(b, 0.0, "basis {j} should vanish at {x}");
                }
            }
        }
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |p, i| p * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn derivative_continuity_across_interior_knots() {
        // For degree >= 2 the (degree-1)th derivative is continuous; compare
        // one-sided finite differences of that order on both sides of each
        // interior knot.
        for degree in 2..=4usize {
            let spec = SplineSpec::new(degree, 3).unwrap();
            let order = degree - 1;
            let h = 1e-5;
            let fd = |j: usize, x0: f64| -> f64 {
                let mut acc = 0.0;
                for t in 0..=order {
                    let sign = if (order - t) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * binomial(order, t) * eval_basis(x0 + t as f64 * h, &spec).unwrap()[j];
                }
                acc / h.powi(order as i32)
            };
            // A one-sided difference of this order carries truncation error
            // of size ~ h * sup|f^(degree)|; a genuine discontinuity of the
            // (degree-1)th derivative would be of size ~ sup|f^(degree)| / h
            // larger, so this tolerance separates the two cleanly.
            let deriv_scale: f64 =
                (1..=degree).map(|t| t as f64).product::<f64>() * 4f64.powi(degree as i32);
            let tol = 20.0 * h * deriv_scale;
            for knot_idx in 1..=3usize {
                let k = knot_idx as f64 / 4.0;
                for j in 0..spec.dim() {
                    let left = fd(j, k - (order as f64 + 1.0) * h);
                    let right = fd(j, k + h);
                    assert!(
                        (left - right).abs() < tol,
                        "degree {degree} basis {j}: derivative jump {} at knot {k} (tol {tol})",
                        (left - right).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn function_continuity_at_interior_knots() {
        // Zeroth-order check at the knots themselves: evaluating a hair on
        // either side gives the same value to 1e-6 (spline continuity).
        let spec = SplineSpec::new(3, 5).unwrap();
        for knot_idx in 1..=5usize {
            let k = knot_idx as f64 / 6.0;
            let lo = eval_basis(k - 1e-9, &spec).unwrap();
            let hi = eval_basis(k + 1e-9, &spec).unwrap();
            for (a, b) in lo.iter().zip(hi.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn expansion_single_point() {
        let specs = [SplineSpec::new(3, 0).unwrap()];
        let x = array![[0.5]];
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        let expect = [0.125, 0.375, 0.375, 0.125];
        for (j, e) in expect.iter().enumerate() {
            assert_abs_diff_eq!(exp.columns[[0, j]], *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn expansion_blocks_sum_to_one_per_covariate() {
        let specs = [SplineSpec::new(3, 2).unwrap(), SplineSpec::new(2, 4).unwrap()];
        let mut rng = StdRng::seed_from_u64(7);
        let x = Array2::from_shape_fn((40, 2), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        for i in 0..40 {
            for a in 0..2 {
                let s: f64 = exp.block(a).map(|j| exp.columns[[i, j]]).sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn expansion_is_deterministic() {
        let specs = [SplineSpec::new(3, 3).unwrap()];
        let mut rng = StdRng::seed_from_u64(9);
        let x = Array2::from_shape_fn((25, 1), |_| rng.gen::<f64>());
        let a = BasisExpansion::expand(&x, &specs).unwrap();
        let b = BasisExpansion::expand(&x, &specs).unwrap();
        assert_eq!(a.columns, b.columns);
    }

    #[test]
    fn expansion_rejects_non_finite() {
        let specs = [SplineSpec::new(3, 0).unwrap()];
        let x = array![[0.2], [f64::NAN]];
        match BasisExpansion::expand(&x, &specs) {
            Err(Error::NonFinite { row, col, .. }) => {
                assert_eq!((row, col), (1, 0));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn centering_zero_coefficients() {
        let specs = [SplineSpec::new(3, 2).unwrap()];
        let mut rng = StdRng::seed_from_u64(3);
        let x = Array2::from_shape_fn((30, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        let gamma = Array1::zeros(exp.n_cols());
        for &xv in &[0.0, 0.3, 0.9] {
            assert_abs_diff_eq!(
                exp.component_value(0, gamma.view(), xv).unwrap(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn centering_removes_constants() {
        // Constant coefficients make the raw function identically c by the
        // partition of unity; centering must null it out.
        let specs = [SplineSpec::new(3, 4).unwrap()];
        let mut rng = StdRng::seed_from_u64(21);
        let x = Array2::from_shape_fn((50, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        let gamma = Array1::from_elem(exp.n_cols(), 2.5);
        for &xv in &[0.05, 0.5, 0.95] {
            assert_abs_diff_eq!(
                exp.component_value(0, gamma.view(), xv).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn centered_component_has_zero_training_mean() {
        let specs = [SplineSpec::new(3, 3).unwrap()];
        let mut rng = StdRng::seed_from_u64(17);
        let x = Array2::from_shape_fn((50, 1), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        let gamma = Array1::from_shape_fn(exp.n_cols(), |_| rng.gen::<f64>() * 4.0 - 2.0);
        let mean: f64 = (0..50)
            .map(|i| exp.component_value(0, gamma.view(), x[[i, 0]]).unwrap())
            .sum::<f64>()
            / 50.0;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn reduced_design_and_embedding_are_consistent() {
        let specs = [SplineSpec::new(3, 2).unwrap(), SplineSpec::new(3, 1).unwrap()];
        let mut rng = StdRng::seed_from_u64(2);
        let x = Array2::from_shape_fn((10, 2), |_| rng.gen::<f64>());
        let exp = BasisExpansion::expand(&x, &specs).unwrap();
        assert_eq!(exp.reduced_cols(), exp.n_cols() - 2);

        let reduced = Array1::from_shape_fn(exp.reduced_cols(), |i| i as f64 + 1.0);
        let full = exp.embed_gamma(reduced.view());
        for a in 0..2 {
            assert_eq!(full[exp.block(a).start], 0.0);
        }
        for j in 0..exp.n_cols() {
            match exp.reduced_index(j) {
                Some(r) => assert_eq!(full[j], reduced[r]),
                None => assert_eq!(full[j], 0.0),
            }
        }

        // row built from reduced_design equals reduced_row at the same point
        let rd = exp.reduced_design();
        let row = exp.reduced_row(&[x[[4, 0]], x[[4, 1]]]).unwrap();
        for j in 0..exp.reduced_cols() {
            assert_abs_diff_eq!(rd[[4, j]], row[j], epsilon = 1e-14);
        }
    }
}
