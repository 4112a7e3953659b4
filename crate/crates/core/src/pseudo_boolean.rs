//! Multilinear pseudo-Boolean polynomials.
//!
//! A polynomial over `K` binary variables is stored as a sparse map from a
//! variable subset (bit `i` set means `x_i` appears in the monomial) to its
//! coefficient. Because `x_i^2 = x_i` on `{0, 1}`, every product collapses to
//! a union of subsets, so the representation is closed under multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, QseraError, Result};
use crate::scalar::Scalar;

/// Largest supported variable count. Masks live in a `usize` and dense tables
/// of `2^K` point values must stay addressable.
pub const MAX_VARS: usize = 30;

/// Coefficients with magnitude at or below this are dropped after arithmetic.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-15;

/// Canonical multilinear polynomial over `num_vars` binary variables.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearPoly<T> {
    num_vars: usize,
    coeffs: BTreeMap<usize, T>,
}

/// How an objective is mapped into `[0, 1]` so that its optimum lands on 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RescaleMode {
    Maximise,
    Minimise,
    RootFind,
}

impl FromStr for RescaleMode {
    type Err = QseraError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "maximise" | "maximize" => Ok(Self::Maximise),
            "min" | "minimise" | "minimize" => Ok(Self::Minimise),
            "root" | "rootfind" | "root-find" => Ok(Self::RootFind),
            other => Err(QseraError::Parse(format!(
                "unknown mode `{other}` (expected min|max|root)"
            ))),
        }
    }
}

impl fmt::Display for RescaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Maximise => "max",
            Self::Minimise => "min",
            Self::RootFind => "root",
        })
    }
}

fn check_num_vars(num_vars: usize) -> Result<()> {
    if num_vars == 0 || num_vars > MAX_VARS {
        return domain(format!(
            "num_vars must be in 1..={MAX_VARS}, got {num_vars}"
        ));
    }
    Ok(())
}

impl<T: Scalar> MultilinearPoly<T> {
    /// The zero polynomial.
    pub fn zero(num_vars: usize) -> Result<Self> {
        check_num_vars(num_vars)?;
        Ok(Self {
            num_vars,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(num_vars: usize, value: T) -> Result<Self> {
        Self::from_terms(num_vars, [(0, value)])
    }

    /// A single monomial `coeff * prod_{i in mask} x_i`.
    pub fn monomial(num_vars: usize, mask: usize, coeff: T) -> Result<Self> {
        Self::from_terms(num_vars, [(mask, coeff)])
    }

    /// Builds a polynomial from `(mask, coeff)` pairs. Repeated masks are
    /// summed; zero coefficients are not stored.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, T)>,
    {
        check_num_vars(num_vars)?;
        let mut coeffs = BTreeMap::new();
        for (mask, c) in terms {
            if mask >> num_vars != 0 {
                return domain(format!(
                    "monomial mask {mask:#b} exceeds {num_vars} variables"
                ));
            }
            if !c.is_finite() {
                return domain(format!("coefficient of mask {mask:#b} is not finite"));
            }
            let e = coeffs.entry(mask).or_insert_with(T::zero);
            *e = *e + c;
        }
        let mut p = Self { num_vars, coeffs };
        p.prune(T::zero());
        Ok(p)
    }

    /// Interpolates the unique multilinear polynomial taking `values[z]` at
    /// assignment `z` (Möbius transform over the subset lattice).
    pub fn from_point_values(values: &[T]) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!(
                "point-value table length must be a power of two >= 2, got {len}"
            ));
        }
        let num_vars = len.trailing_zeros() as usize;
        check_num_vars(num_vars)?;
        if values.iter().any(|v| !v.is_finite()) {
            return domain("point-value table contains a non-finite entry");
        }
        let mut c = values.to_vec();
        for bit in 0..num_vars {
            let step = 1usize << bit;
            for z in 0..len {
                if z & step != 0 {
                    c[z] = c[z] - c[z ^ step];
                }
            }
        }
        let coeffs = c
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let mut p = Self { num_vars, coeffs };
        p.prune(T::lit(DEFAULT_PRUNE_THRESHOLD));
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Coefficient of the monomial `mask` (zero when absent).
    pub fn coeff(&self, mask: usize) -> T {
        self.coeffs.get(&mask).copied().unwrap_or_else(T::zero)
    }

    /// Number of stored (nonzero) monomials.
    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Stored terms in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    /// Stored terms ordered by monomial degree, then by mask.
    pub fn terms_by_order(&self) -> Vec<(usize, T)> {
        let mut out: Vec<_> = self.terms().collect();
        out.sort_by_key(|&(m, _)| (m.count_ones(), m));
        out
    }

    /// Highest monomial degree present (0 for constants and the zero polynomial).
    pub fn max_order(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Drops coefficients whose magnitude is `<= threshold`.
    pub fn prune(&mut self, threshold: T) {
        self.coeffs.retain(|_, c| c.abs() > threshold);
    }

    pub fn evaluate(&self, assignment: usize) -> Result<T> {
        if assignment >> self.num_vars != 0 {
            return domain(format!(
                "assignment {assignment} out of range for {} variables",
                self.num_vars
            ));
        }
        Ok(self.eval_unchecked(assignment))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, assignment: usize) -> T {
        self.coeffs
            .iter()
            .filter(|(&m, _)| m & assignment == m)
            .fold(T::zero(), |acc, (_, &c)| acc + c)
    }

    /// Values at all `2^K` assignments (zeta transform of the coefficients).
    pub fn values(&self) -> Vec<T> {
        let len = 1usize << self.num_vars;
        let mut v = vec![T::zero(); len];
        for (&m, &c) in &self.coeffs {
            v[m] = c;
        }
        for bit in 0..self.num_vars {
            let step = 1usize << bit;
            for z in 0..len {
                if z & step != 0 {
                    v[z] = v[z] + v[z ^ step];
                }
            }
        }
        v
    }

    /// Product with idempotent reduction `x_i^2 = x_i`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_pruned(other, T::lit(DEFAULT_PRUNE_THRESHOLD))
    }

    pub fn multiply_pruned(&self, other: &Self, threshold: T) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return domain(format!(
                "cannot multiply polynomials over {} and {} variables",
                self.num_vars, other.num_vars
            ));
        }
        let mut coeffs: BTreeMap<usize, T> = BTreeMap::new();
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                let e = coeffs.entry(a | b).or_insert_with(T::zero);
                *e = *e + ca * cb;
            }
        }
        let mut p = Self {
            num_vars: self.num_vars,
            coeffs,
        };
        p.prune(threshold);
        Ok(p)
    }

    /// `p^n` by iterated multiplication `p^n = p^(n-1) * p`.
    ///
    /// `n = 0` yields the constant polynomial 1.
    pub fn power(&self, n: u32) -> Self {
        let mut acc = Self {
            num_vars: self.num_vars,
            coeffs: BTreeMap::from([(0, T::one())]),
        };
        for _ in 0..n {
            acc = acc.multiply(self).expect("same variable count");
        }
        acc
    }

    /// `a * p + b` applied coefficient-wise.
    pub fn affine(&self, a: T, b: T) -> Self {
        let mut coeffs: BTreeMap<usize, T> =
            self.coeffs.iter().map(|(&m, &c)| (m, a * c)).collect();
        let e = coeffs.entry(0).or_insert_with(T::zero);
        *e = *e + b;
        let mut p = Self {
            num_vars: self.num_vars,
            coeffs,
        };
        p.prune(T::lit(DEFAULT_PRUNE_THRESHOLD));
        p
    }

    /// Maps an objective to `g` with `g(x_*) = 1` at the sought point.
    ///
    /// - `Maximise`: `(f - f_min) / (f_max - f_min)`
    /// - `Minimise`: `(f_max - f) / (f_max - f_min)`
    /// - `RootFind`: `1 - f^2 / max(f_min^2, f_max^2)`
    pub fn rescale(&self, mode: RescaleMode, f_min: T, f_max: T) -> Result<Self> {
        if !f_min.is_finite() || !f_max.is_finite() {
            return domain("f_min and f_max must be finite");
        }
        match mode {
            RescaleMode::Maximise | RescaleMode::Minimise => {
                if f_max == f_min {
                    return Err(QseraError::DegenerateRange(format!(
                        "f_max == f_min == {f_min}"
                    )));
                }
                if f_max < f_min {
                    return domain(format!("f_max ({f_max}) must exceed f_min ({f_min})"));
                }
                let width = f_max - f_min;
                Ok(match mode {
                    RescaleMode::Maximise => self.affine(T::one() / width, -f_min / width),
                    _ => self.affine(-T::one() / width, f_max / width),
                })
            }
            RescaleMode::RootFind => {
                let scale = (f_min * f_min).max(f_max * f_max);
                if scale.is_zero() {
                    return Err(QseraError::DegenerateRange(
                        "max(f_min^2, f_max^2) is zero".into(),
                    ));
                }
                let sq = self.multiply(self)?;
                Ok(sq.affine(-T::one() / scale, T::one()))
            }
        }
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> MultilinearPoly<U> {
        MultilinearPoly {
            num_vars: self.num_vars,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&m, &c)| (m, U::lit(c.to_f64_lossy())))
                .collect(),
        }
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            num_vars: self.num_vars,
            terms: self
                .terms_by_order()
                .into_iter()
                .map(|(m, c)| TermJson {
                    vars: mask_to_vars(m),
                    coeff: c.to_f64_lossy(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<Self> {
        check_num_vars(json.num_vars)?;
        let mut seen = std::collections::BTreeSet::new();
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            if t.vars.windows(2).any(|w| w[0] >= w[1]) {
                return domain(format!("term vars {:?} are not strictly ascending", t.vars));
            }
            if let Some(&v) = t.vars.iter().find(|&&v| v >= json.num_vars) {
                return domain(format!(
                    "variable index {v} out of range for {} variables",
                    json.num_vars
                ));
            }
            let mask = vars_to_mask(&t.vars);
            if !seen.insert(mask) {
                return domain(format!("monomial {:?} listed twice", t.vars));
            }
            terms.push((mask, T::lit(t.coeff)));
        }
        Self::from_terms(json.num_vars, terms)
    }
}

impl<T: Scalar> fmt::Display for MultilinearPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms_by_order();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for v in mask_to_vars(m) {
                write!(f, "*x{v}")?;
            }
        }
        Ok(())
    }
}

/// Ascending variable indices of a monomial mask.
pub fn mask_to_vars(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|&i| mask >> i & 1 == 1)
        .collect()
}

pub fn vars_to_mask(vars: &[usize]) -> usize {
    vars.iter().fold(0, |m, &v| m | 1 << v)
}

/// Serialized polynomial: `{"num_vars": K, "terms": [{"vars": [..], "coeff": r}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub num_vars: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub vars: Vec<usize>,
    pub coeff: f64,
}
