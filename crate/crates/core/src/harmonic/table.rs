use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::sum::sum_complex;

/// Tolerance on `| |v| - 1 |` for a table to count as unimodular.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// A dense function `F_p^n -> C`, indexed by linear index.
#[derive(Clone, Debug)]
pub struct FunctionTable {
    params: GroupParams,
    values: Vec<Complex64>,
    sup_norm: f64,
}

impl PartialEq for FunctionTable {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.values == other.values
    }
}

fn sup(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

impl FunctionTable {
    pub fn new(params: GroupParams, values: Vec<Complex64>) -> Result<Self> {
        params.product_size(1, "function table")?;
        if values.len() != params.order() {
            return Err(Error::param(format!(
                "table has {} values, group has {} elements",
                values.len(),
                params.order()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain("table values must be finite"));
        }
        let sup_norm = sup(&values);
        Ok(Self {
            params,
            values,
            sup_norm,
        })
    }

    pub fn from_fn(params: &GroupParams, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        params.product_size(1, "function table")?;
        let values = (0..params.order()).map(f).collect();
        Self::new(params.clone(), values)
    }

    pub fn constant(params: &GroupParams, c: Complex64) -> Result<Self> {
        Self::from_fn(params, |_| c)
    }

    /// The character `chi_gamma` as a table.
    pub fn character(params: &GroupParams, gamma: usize) -> Result<Self> {
        if gamma >= params.order() {
            return Err(Error::param(format!("character index {gamma} out of range")));
        }
        Self::from_fn(params, |x| params.character_index(gamma, x))
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn set(&mut self, index: usize, value: Complex64) {
        self.values[index] = value;
        self.sup_norm = sup(&self.values);
    }

    pub fn is_unimodular(&self) -> bool {
        self.values
            .iter()
            .all(|v| (v.norm() - 1.0).abs() <= UNIMODULAR_TOL)
    }

    pub fn ensure_unimodular(&self) -> Result<()> {
        match self
            .values
            .iter()
            .position(|v| (v.norm() - 1.0).abs() > UNIMODULAR_TOL)
        {
            None => Ok(()),
            Some(i) => Err(Error::domain(format!(
                "table is not unimodular: |f({i})| = {}",
                self.values[i].norm()
            ))),
        }
    }

    pub fn mean(&self) -> Complex64 {
        sum_complex(self.values.iter().copied()) / self.values.len() as f64
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values: Vec<Complex64> = self.values.iter().map(|&v| f(v)).collect();
        let sup_norm = sup(&values);
        Self {
            params: self.params.clone(),
            values,
            sup_norm,
        }
    }

    pub fn pointwise_mul(&self, other: &FunctionTable) -> Result<Self> {
        self.params.ensure_same(&other.params)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Self::new(self.params.clone(), values)
    }

    /// `x -> f(x + a)`.
    pub fn translate(&self, a: usize) -> Self {
        let g = &self.params;
        let values: Vec<Complex64> = (0..g.order())
            .map(|x| self.values[g.add_index(x, a)])
            .collect();
        Self {
            params: self.params.clone(),
            values,
            sup_norm: self.sup_norm,
        }
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            p: self.params.p() as u64,
            n: self.params.n(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("table serialization is infallible")
    }

    pub fn from_file(file: &TableFile) -> Result<Self> {
        let params = GroupParams::new(file.p, file.n)?;
        let values = file
            .values
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::new(params, values)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}

/// On-disk form of a [`FunctionTable`]: `{p, n, values: [[re, im], ...]}`
/// in linear-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub p: u64,
    pub n: usize,
    pub values: Vec<[f64; 2]>,
}

/// Fourier coefficients indexed by character.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    params: GroupParams,
    coeffs: Vec<Complex64>,
}

impl SpectrumTable {
    pub fn new(params: GroupParams, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != params.order() {
            return Err(Error::param(format!(
                "spectrum has {} coefficients, group has {} characters",
                coeffs.len(),
                params.order()
            )));
        }
        Ok(Self { params, coeffs })
    }

    /// A single unit coefficient at `gamma`.
    pub fn delta(params: &GroupParams, gamma: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); params.order()];
        *coeffs
            .get_mut(gamma)
            .ok_or_else(|| Error::param(format!("character index {gamma} out of range")))? =
            Complex64::new(1.0, 0.0);
        Self::new(params.clone(), coeffs)
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn get(&self, gamma: usize) -> Complex64 {
        self.coeffs[gamma]
    }

    /// `sum_gamma |f^(gamma)|^2`.
    pub fn energy(&self) -> f64 {
        crate::sum::sum_real(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    /// `max_gamma |f^(gamma)|` with the maximizing character.
    pub fn max_modulus(&self) -> (usize, f64) {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }
}
