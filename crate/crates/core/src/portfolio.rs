//! Equal-weight combinatorial portfolio selection against a benchmark.
//!
//! A selection is a bitmask over the asset pool (bit `i` set means asset `i`
//! is held). The tracking objective is
//!
//! ```text
//! f = l_mu  (N_p mu_p - N_p mu_b)^2
//!   + l_s2  (N_p^2 s_p^2 - N_p^2 s_b^2)^2
//!   + (1 - l_mu - l_s2) (N_p - N_b)^2
//! ```
//!
//! evaluated through the sums `N_p mu_p = sum_i x_i mu_i` and
//! `N_p^2 s_p^2 = sum_ij x_i x_j s_i s_j rho_ij`, so the empty selection is
//! well defined.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, QseraError, Result};
use crate::pseudo_boolean::MultilinearPoly;
use crate::scalar::Scalar;

/// Largest pool for which the objective is expanded exhaustively.
pub const MAX_ASSETS: usize = 20;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AssetPool<T> {
    mu: Vec<T>,
    sigma: Vec<T>,
    rho: Vec<Vec<T>>,
}

impl<T: Scalar> AssetPool<T> {
    /// Validates shapes, non-negative volatilities and a symmetric
    /// correlation matrix with unit diagonal and entries in `[-1, 1]`.
    pub fn new(mu: Vec<T>, sigma: Vec<T>, rho: Vec<Vec<T>>) -> Result<Self> {
        let n = mu.len();
        let invalid = |m: String| Err(QseraError::Validation(m));
        if n == 0 {
            return invalid("asset pool is empty".into());
        }
        if sigma.len() != n || rho.len() != n || rho.iter().any(|r| r.len() != n) {
            return invalid(format!(
                "mu, sigma and rho dimensions disagree (mu has {n} entries)"
            ));
        }
        if mu
            .iter()
            .chain(&sigma)
            .chain(rho.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return invalid("asset data contains a non-finite value".into());
        }
        if let Some(i) = sigma.iter().position(|s| *s < T::zero()) {
            return invalid(format!("sigma[{i}] is negative"));
        }
        let tol = T::lit(SYMMETRY_TOL);
        for i in 0..n {
            if (rho[i][i] - T::one()).abs() > tol {
                return invalid(format!("rho[{i}][{i}] must be 1"));
            }
            for j in 0..n {
                if rho[i][j].abs() > T::one() + tol {
                    return invalid(format!("rho[{i}][{j}] outside [-1, 1]"));
                }
                if (rho[i][j] - rho[j][i]).abs() > tol {
                    return invalid(format!("rho is not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(Self { mu, sigma, rho })
    }

    pub fn num_assets(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn rho(&self) -> &[Vec<T>] {
        &self.rho
    }

    fn check_selection(&self, selection: usize) -> Result<()> {
        if selection >> self.num_assets() != 0 {
            return domain(format!(
                "selection {selection:#b} out of range for {} assets",
                self.num_assets()
            ));
        }
        Ok(())
    }

    fn held(&self, selection: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_assets()).filter(move |i| selection >> i & 1 == 1)
    }

    /// `sum_i x_i mu_i`
    fn return_sum(&self, selection: usize) -> T {
        self.held(selection).map(|i| self.mu[i]).sum()
    }

    /// `sum_ij x_i x_j s_i s_j rho_ij`
    fn covariance_sum(&self, selection: usize) -> T {
        let held: Vec<usize> = self.held(selection).collect();
        let mut acc = T::zero();
        for &i in &held {
            for &j in &held {
                acc = acc + self.sigma[i] * self.sigma[j] * self.rho[i][j];
            }
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Benchmark<T> {
    pub mu_b: T,
    pub sigma_b: T,
    /// Target number of assets (the budget).
    pub n_b: usize,
}

/// Weights on the return and variance tracking terms; the budget penalty
/// carries `1 - lambda_mu - lambda_sigma2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackingObjective<T> {
    lambda_mu: T,
    lambda_sigma2: T,
}

impl<T: Scalar> TrackingObjective<T> {
    pub fn new(lambda_mu: T, lambda_sigma2: T) -> Result<Self> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(lambda_mu) || !unit(lambda_sigma2) {
            return Err(QseraError::Validation(
                "lambda weights must lie in [0, 1]".into(),
            ));
        }
        if lambda_mu + lambda_sigma2 > T::one() + T::lit(SYMMETRY_TOL) {
            return Err(QseraError::Validation(
                "lambda_mu + lambda_sigma2 must not exceed 1".into(),
            ));
        }
        Ok(Self {
            lambda_mu,
            lambda_sigma2,
        })
    }

    pub fn lambda_mu(&self) -> T {
        self.lambda_mu
    }

    pub fn lambda_sigma2(&self) -> T {
        self.lambda_sigma2
    }

    /// Weight of the soft budget constraint.
    pub fn lambda_budget(&self) -> T {
        T::one() - self.lambda_mu - self.lambda_sigma2
    }
}

/// Mean return of an equal-weight selection.
pub fn portfolio_return<T: Scalar>(pool: &AssetPool<T>, selection: usize) -> Result<T> {
    pool.check_selection(selection)?;
    let n_p = selection.count_ones();
    if n_p == 0 {
        return Err(QseraError::UndefinedPortfolio(
            "mean return of the empty selection".into(),
        ));
    }
    Ok(pool.return_sum(selection) / T::from_u32(n_p).unwrap())
}

/// Variance of an equal-weight selection.
pub fn portfolio_variance<T: Scalar>(pool: &AssetPool<T>, selection: usize) -> Result<T> {
    pool.check_selection(selection)?;
    let n_p = selection.count_ones();
    if n_p == 0 {
        return Err(QseraError::UndefinedPortfolio(
            "variance of the empty selection".into(),
        ));
    }
    let n = T::from_u32(n_p).unwrap();
    Ok(pool.covariance_sum(selection) / (n * n))
}

/// A complete tracking problem.
#[derive(Clone, Debug, PartialEq)]
pub struct PortfolioProblem<T> {
    pub pool: AssetPool<T>,
    pub benchmark: Benchmark<T>,
    pub weights: TrackingObjective<T>,
}

impl<T: Scalar> PortfolioProblem<T> {
    pub fn new(
        pool: AssetPool<T>,
        benchmark: Benchmark<T>,
        weights: TrackingObjective<T>,
    ) -> Result<Self> {
        if benchmark.n_b == 0 || benchmark.n_b > pool.num_assets() {
            return Err(QseraError::Validation(format!(
                "benchmark asset count {} must be in 1..={}",
                benchmark.n_b,
                pool.num_assets()
            )));
        }
        if !benchmark.mu_b.is_finite()
            || !benchmark.sigma_b.is_finite()
            || benchmark.sigma_b < T::zero()
        {
            return Err(QseraError::Validation(
                "benchmark mu_b/sigma_b must be finite, sigma_b >= 0".into(),
            ));
        }
        Ok(Self {
            pool,
            benchmark,
            weights,
        })
    }

    pub fn num_assets(&self) -> usize {
        self.pool.num_assets()
    }

    pub fn objective_value(&self, selection: usize) -> Result<T> {
        self.pool.check_selection(selection)?;
        let n_p = T::from_u32(selection.count_ones()).unwrap();
        let b = &self.benchmark;
        let n_b = T::from_usize(b.n_b).unwrap();
        let ret = self.pool.return_sum(selection) - n_p * b.mu_b;
        let var = self.pool.covariance_sum(selection) - n_p * n_p * b.sigma_b * b.sigma_b;
        let budget = n_p - n_b;
        let w = &self.weights;
        Ok(w.lambda_mu * ret * ret
            + w.lambda_sigma2 * var * var
            + w.lambda_budget() * budget * budget)
    }

    fn check_capacity(&self) -> Result<()> {
        if self.num_assets() > MAX_ASSETS {
            return Err(QseraError::Capacity(format!(
                "{} assets exceeds the exhaustive-expansion bound of {MAX_ASSETS}",
                self.num_assets()
            )));
        }
        Ok(())
    }

    /// Objective at every selection, indexed by mask.
    pub fn objective_table(&self) -> Result<Vec<T>> {
        self.check_capacity()?;
        (0..1usize << self.num_assets())
            .map(|z| self.objective_value(z))
            .collect()
    }

    /// Multilinear form of the objective, interpolated from its values at
    /// all `2^N_a` selections.
    pub fn objective_to_polynomial(&self) -> Result<MultilinearPoly<T>> {
        MultilinearPoly::from_point_values(&self.objective_table()?)
    }

    /// Multilinear form obtained by expanding the squares symbolically:
    ///
    /// ```text
    /// l_mu  sum_ij   x_i x_j (mu_b^2 - 2 mu_i mu_b + mu_i mu_j)
    /// l_s2  sum_ijkl x_i x_j x_k x_l (s_b^4 - 2 s_i s_j rho_ij s_b^2 + s_i s_j s_k s_l rho_ij rho_kl)
    /// l_bud (N_b^2 - 2 N_b sum_i x_i + sum_ij x_i x_j)
    /// ```
    ///
    /// Each product of variables collapses to the union of their indices.
    pub fn symbolic_expansion(&self) -> Result<MultilinearPoly<T>> {
        self.check_capacity()?;
        let n = self.num_assets();
        let pool = &self.pool;
        let b = &self.benchmark;
        let w = &self.weights;
        let two = T::lit(2.0);
        let n_b = T::from_usize(b.n_b).unwrap();
        let sb2 = b.sigma_b * b.sigma_b;
        let mut acc: BTreeMap<usize, T> = BTreeMap::new();
        let mut add = |mask: usize, v: T| {
            let e = acc.entry(mask).or_insert_with(T::zero);
            *e = *e + v;
        };

        let lb = w.lambda_budget();
        add(0, lb * n_b * n_b);
        for i in 0..n {
            add(1 << i, -lb * two * n_b);
        }
        for i in 0..n {
            for j in 0..n {
                let m = 1 << i | 1 << j;
                add(m, lb);
                let mu_term = b.mu_b * b.mu_b - two * pool.mu[i] * b.mu_b + pool.mu[i] * pool.mu[j];
                add(m, w.lambda_mu * mu_term);
            }
        }
        let cov = |i: usize, j: usize| pool.sigma[i] * pool.sigma[j] * pool.rho[i][j];
        for i in 0..n {
            for j in 0..n {
                let cij = cov(i, j);
                for k in 0..n {
                    for l in 0..n {
                        let m = 1 << i | 1 << j | 1 << k | 1 << l;
                        let v = sb2 * sb2 - two * cij * sb2 + cij * cov(k, l);
                        add(m, w.lambda_sigma2 * v);
                    }
                }
            }
        }
        let mut p = MultilinearPoly::from_terms(n, acc)?;
        p.prune(T::lit(crate::pseudo_boolean::DEFAULT_PRUNE_THRESHOLD));
        Ok(p)
    }

    /// One row per selection: size, mean return, volatility and objective.
    pub fn scan(&self) -> Result<Vec<ScanRow<T>>> {
        self.check_capacity()?;
        (0..1usize << self.num_assets())
            .map(|z| {
                let (mu_p, sigma_p) = if z == 0 {
                    (None, None)
                } else {
                    (
                        Some(portfolio_return(&self.pool, z)?),
                        Some(portfolio_variance(&self.pool, z)?.sqrt()),
                    )
                };
                Ok(ScanRow {
                    selection: z,
                    n_assets: z.count_ones() as usize,
                    mu_p,
                    sigma_p,
                    f: self.objective_value(z)?,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> ProblemJson {
        let v = |x: &[T]| x.iter().map(|t| t.to_f64_lossy()).collect::<Vec<_>>();
        ProblemJson {
            mu: v(&self.pool.mu),
            sigma: v(&self.pool.sigma),
            rho: self.pool.rho.iter().map(|r| v(r)).collect(),
            benchmark: BenchmarkJson {
                mu_b: self.benchmark.mu_b.to_f64_lossy(),
                sigma_b: self.benchmark.sigma_b.to_f64_lossy(),
                n_b: self.benchmark.n_b,
            },
            lambda_mu: self.weights.lambda_mu.to_f64_lossy(),
            lambda_sigma2: self.weights.lambda_sigma2.to_f64_lossy(),
        }
    }

    pub fn from_json(json: &ProblemJson) -> Result<Self> {
        let v = |x: &[f64]| x.iter().map(|&t| T::lit(t)).collect::<Vec<_>>();
        let pool = AssetPool::new(
            v(&json.mu),
            v(&json.sigma),
            json.rho.iter().map(|r| v(r)).collect(),
        )?;
        let benchmark = Benchmark {
            mu_b: T::lit(json.benchmark.mu_b),
            sigma_b: T::lit(json.benchmark.sigma_b),
            n_b: json.benchmark.n_b,
        };
        let weights = TrackingObjective::new(T::lit(json.lambda_mu), T::lit(json.lambda_sigma2))?;
        Self::new(pool, benchmark, weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow<T> {
    pub selection: usize,
    pub n_assets: usize,
    /// `None` for the empty selection.
    pub mu_p: Option<T>,
    pub sigma_p: Option<T>,
    pub f: T,
}

/// `{"mu": [...], "sigma": [...], "rho": [[...]], "benchmark": {...}, "lambda_mu": .., "lambda_sigma2": ..}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
    pub benchmark: BenchmarkJson,
    pub lambda_mu: f64,
    pub lambda_sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkJson {
    pub mu_b: f64,
    pub sigma_b: f64,
    pub n_b: usize,
}
