//! Classical polynomials over `F_p`, their phase functions `omega^P`, seeded
//! random instances, and exhaustive correlation/farness certification.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{checked_power, Error, Result};
use crate::group::{GroupParams, GroupVector};
use crate::harmonic::FunctionTable;
use crate::rng::{rng_for, Stream};
use crate::sum::sum_complex;

/// Default bound on the number of polynomials [`certify_farness`] may visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 22;

/// `x^e` reduced with `x^p = x`: exponents land in `0..p`.
fn reduce_exponent(e: u64, p: u32) -> u32 {
    if e == 0 {
        0
    } else {
        (((e - 1) % (p as u64 - 1)) + 1) as u32
    }
}

/// A polynomial `F_p^n -> F_p`; exponent vectors map to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialSpec {
    params: GroupParams,
    terms: BTreeMap<Vec<u32>, u32>,
    degree: u32,
}

impl PolynomialSpec {
    /// Builds a polynomial from raw `(exponents, coefficient)` terms, applying
    /// Frobenius reduction and merging like terms.
    pub fn new<I>(params: &GroupParams, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u64>, u64)>,
    {
        let p = params.p();
        let mut merged: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != params.n() {
                return Err(Error::param(format!(
                    "monomial has {} exponents, expected {}",
                    exps.len(),
                    params.n()
                )));
            }
            let key: Vec<u32> = exps.iter().map(|&e| reduce_exponent(e, p)).collect();
            let c = merged.entry(key).or_insert(0);
            *c = (*c + coeff % p as u64) % p as u64;
        }
        let terms: BTreeMap<Vec<u32>, u32> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (k, c as u32))
            .collect();
        let degree = terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        Ok(Self {
            params: params.clone(),
            terms,
            degree,
        })
    }

    pub fn zero(params: &GroupParams) -> Self {
        Self {
            params: params.clone(),
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    /// `sum_i coeffs[i] x_i`, the linear form behind the character `chi_coeffs`.
    pub fn linear(params: &GroupParams, coeffs: &[u32]) -> Result<Self> {
        if coeffs.len() != params.n() {
            return Err(Error::param("linear form needs one coefficient per coordinate"));
        }
        let n = params.n();
        Self::new(
            params,
            coeffs.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0u64; n];
                e[i] = 1;
                (e, c as u64)
            }),
        )
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn evaluate(&self, x: &GroupVector) -> Result<u32> {
        let index = self.params.index_checked(x)?;
        Ok(self.evaluate_index(index))
    }

    pub fn evaluate_index(&self, index: usize) -> u32 {
        let p = self.params.p() as u64;
        let digits = self.params.digits_of(index);
        let mut acc = 0u64;
        for (exps, &c) in &self.terms {
            let mut m = c as u64;
            for (&xi, &e) in digits.iter().zip(exps) {
                for _ in 0..e {
                    m = m * xi as u64 % p;
                }
            }
            acc = (acc + m) % p;
        }
        acc as u32
    }

    /// Values of `P` on every group element, in linear-index order.
    pub fn value_table(&self) -> Result<Vec<u32>> {
        self.params.product_size(1, "polynomial table")?;
        Ok((0..self.params.order()).map(|x| self.evaluate_index(x)).collect())
    }

    pub fn add(&self, other: &PolynomialSpec) -> Result<Self> {
        self.params.ensure_same(&other.params)?;
        let widen = |(e, &c): (&Vec<u32>, &u32)| (e.iter().map(|&v| v as u64).collect(), c as u64);
        Self::new(
            &self.params,
            self.terms.iter().map(widen).chain(other.terms.iter().map(widen)),
        )
    }

    /// Parses the compact form, e.g. `"2*x0*x1 + x2^2 + 1"`. Variables are
    /// 0-based; `*` between factors is optional and `-` negates mod `p`.
    pub fn parse(params: &GroupParams, text: &str) -> Result<Self> {
        let terms = parse_terms(text, params.n())?;
        let p = params.p() as i64;
        Self::new(
            params,
            terms
                .into_iter()
                .map(|(e, c)| (e, c.rem_euclid(p) as u64)),
        )
    }

    pub fn to_file(&self) -> PolyFile {
        PolyFile {
            p: self.params.p() as u64,
            n: self.params.n(),
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| PolyTerm {
                    exps: e.clone(),
                    coeff: c,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &PolyFile) -> Result<Self> {
        let params = GroupParams::new(file.p, file.n)?;
        Self::new(
            &params,
            file.terms
                .iter()
                .map(|t| (t.exps.iter().map(|&e| e as u64).collect(), t.coeff as u64)),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("polynomial serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for PolynomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (exps, &c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                _ => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// JSON form: `{p, n, terms: [{exps: [...], coeff}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub p: u64,
    pub n: usize,
    pub terms: Vec<PolyTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exps: Vec<u32>,
    pub coeff: u32,
}

fn parse_terms(text: &str, n: usize) -> Result<Vec<(Vec<u64>, i64)>> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut pos = 0;
    let mut out = Vec::new();
    let read_int = |pos: &mut usize| -> Result<u64> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse(format!("expected a number at position {start}")));
        }
        chars[start..*pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|e| Error::Parse(format!("{e}")))
    };
    loop {
        let mut sign = 1i64;
        while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
            if chars[pos] == '-' {
                sign = -sign;
            }
            pos += 1;
        }
        let mut coeff: i64 = 1;
        let mut exps = vec![0u64; n];
        let mut factors = 0;
        while pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
            if chars[pos] == '*' {
                if factors == 0 {
                    return Err(Error::Parse(format!("unexpected '*' at position {pos}")));
                }
                pos += 1;
            }
            match chars.get(pos) {
                Some(c) if c.is_ascii_digit() => {
                    let v = read_int(&mut pos)?;
                    coeff = coeff
                        .checked_mul(v as i64)
                        .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
                }
                Some('x') => {
                    pos += 1;
                    let var = read_int(&mut pos)? as usize;
                    if var >= n {
                        return Err(Error::Parse(format!("variable x{var} out of range for n = {n}")));
                    }
                    let mut e = 1;
                    if chars.get(pos) == Some(&'^') {
                        pos += 1;
                        e = read_int(&mut pos)?;
                    }
                    exps[var] += e;
                }
                Some(c) => return Err(Error::Parse(format!("unexpected '{c}' at position {pos}"))),
                None => return Err(Error::Parse("dangling '*'".into())),
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(Error::Parse(format!("empty term at position {pos}")));
        }
        out.push((exps, sign * coeff));
        if pos >= chars.len() {
            break;
        }
    }
    Ok(out)
}

/// Exponent vectors of every monomial of degree `<= d` (exponents `< p`),
/// in ascending base-`p` order of the exponent vector, exponent 0 least
/// significant. The constant monomial comes first.
pub fn monomials(params: &GroupParams, d: u32) -> Result<Vec<Vec<u32>>> {
    let p = params.p() as usize;
    let count = checked_power(p, params.n())
        .filter(|&c| c <= params.cap())
        .ok_or_else(|| Error::Size {
            what: "monomial enumeration".into(),
            needed: format!("{p}^{}", params.n()),
            cap: params.cap(),
        })?;
    Ok((0..count)
        .map(|k| {
            let mut rest = k;
            (0..params.n())
                .map(|_| {
                    let e = rest % p;
                    rest /= p;
                    e as u32
                })
                .collect::<Vec<u32>>()
        })
        .filter(|e| e.iter().sum::<u32>() <= d)
        .collect())
}

fn check_degree(params: &GroupParams, d: u32) -> Result<()> {
    let max = params.n() as u64 * (params.p() as u64 - 1);
    if d as u64 > max {
        return Err(Error::precondition(format!(
            "degree {d} exceeds the maximum reduced degree n(p-1) = {max}"
        )));
    }
    Ok(())
}

/// A polynomial of degree `<= d` whose every monomial coefficient (constant
/// included) is uniform on `F_p`, drawn in [`monomials`] order.
pub fn random_polynomial(params: &GroupParams, d: u32, seed: u64) -> Result<PolynomialSpec> {
    check_degree(params, d)?;
    let mut rng = rng_for(seed, Stream::Polynomial);
    let p = params.p();
    let terms: Vec<(Vec<u64>, u64)> = monomials(params, d)?
        .into_iter()
        .map(|e| {
            let c = rng.gen_range(0..p) as u64;
            (e.into_iter().map(u64::from).collect(), c)
        })
        .collect();
    PolynomialSpec::new(params, terms)
}

/// `f(x) = exp(i theta_x)` with independent uniform angles.
pub fn haar_random_function(params: &GroupParams, seed: u64) -> Result<FunctionTable> {
    let mut rng = rng_for(seed, Stream::Haar);
    FunctionTable::from_fn(params, |_| {
        Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
    })
}

/// `x -> omega^{P(x)}`, read from the root-of-unity table.
pub fn phase_function(poly: &PolynomialSpec) -> Result<FunctionTable> {
    let g = poly.params();
    let values = poly.value_table()?;
    FunctionTable::from_fn(g, |x| g.roots()[values[x] as usize])
}

/// `|E_x f(x) conj(omega^{P(x)})|`.
pub fn correlation(f: &FunctionTable, poly: &PolynomialSpec) -> Result<f64> {
    f.params().ensure_same(poly.params())?;
    let values = poly.value_table()?;
    Ok(correlation_with_values(f, &values))
}

fn correlation_with_values(f: &FunctionTable, values: &[u32]) -> f64 {
    let roots = f.params().roots();
    let s = sum_complex(
        f.values()
            .iter()
            .zip(values)
            .map(|(v, &k)| v * roots[k as usize].conj()),
    );
    s.norm() / f.len() as f64
}

/// Where a test instance came from.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceKind {
    PhasePoly(PolynomialSpec),
    HaarRandom { seed: u64 },
    Custom,
}

/// A unimodular test function together with its provenance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: InstanceKind,
    pub table: FunctionTable,
}

impl Instance {
    pub fn phase_poly(poly: PolynomialSpec) -> Result<Self> {
        let table = phase_function(&poly)?;
        Ok(Self {
            kind: InstanceKind::PhasePoly(poly),
            table,
        })
    }

    pub fn haar(params: &GroupParams, seed: u64) -> Result<Self> {
        Ok(Self {
            kind: InstanceKind::HaarRandom { seed },
            table: haar_random_function(params, seed)?,
        })
    }

    pub fn custom(table: FunctionTable) -> Result<Self> {
        table.ensure_unimodular()?;
        Ok(Self {
            kind: InstanceKind::Custom,
            table,
        })
    }
}

/// Slack on the farness comparison, so rounding in a correlation of exactly 1
/// never certifies a function as far from itself.
pub const FARNESS_TOL: f64 = 1e-12;

fn is_far(max_correlation: f64, eps: f64) -> bool {
    max_correlation + FARNESS_TOL < eps
}

/// Outcome of a farness check against all polynomials of degree `<= d`.
#[derive(Clone, Debug)]
pub struct FarnessCertificate {
    /// `max |<f, omega^P>| < eps`.
    pub far: bool,
    pub max_correlation: f64,
    pub witness: PolynomialSpec,
    pub polynomials_checked: usize,
    /// `false` when only a random sample of polynomials was checked.
    pub exhaustive: bool,
    pub degree: u32,
    pub eps: f64,
}

/// Checks every polynomial of degree `<= d` with zero constant term (a
/// constant only rotates the inner product) and reports the best witness.
pub fn certify_farness(
    f: &FunctionTable,
    d: u32,
    eps: f64,
    enumeration_cap: usize,
) -> Result<FarnessCertificate> {
    let g = f.params();
    check_degree(g, d)?;
    let monos: Vec<Vec<u32>> = monomials(g, d)?.into_iter().skip(1).collect();
    let p = g.p() as usize;
    let total = checked_power(p, monos.len())
        .filter(|&t| t <= enumeration_cap)
        .ok_or_else(|| Error::Size {
            what: "farness enumeration".into(),
            needed: format!("{p}^{}", monos.len()),
            cap: enumeration_cap,
        })?;

    let mono_tables: Vec<Vec<u32>> = monos
        .iter()
        .map(|e| {
            let m = PolynomialSpec::new(g, [(e.iter().map(|&v| v as u64).collect(), 1)])?;
            m.value_table()
        })
        .collect::<Result<_>>()?;

    // Split on the last coefficient; each worker runs an odometer over the rest.
    let k = monos.len();
    let chunks = if k == 0 { 1 } else { p };
    let per_chunk = total / chunks;
    let best = (0..chunks)
        .into_par_iter()
        .map(|top| {
            let mut coeffs = vec![0usize; k];
            let mut values = vec![0u32; g.order()];
            if k > 0 {
                coeffs[k - 1] = top;
                for (v, m) in values.iter_mut().zip(&mono_tables[k - 1]) {
                    *v = ((top * *m as usize) % p) as u32;
                }
            }
            let mut best = (f64::NEG_INFINITY, usize::MAX, coeffs.clone());
            for step in 0..per_chunk {
                let corr = correlation_with_values(f, &values);
                let order = top * per_chunk + step;
                if corr > best.0 {
                    best = (corr, order, coeffs.clone());
                }
                // advance the odometer over all but the last coefficient
                for j in 0..k.saturating_sub(1) {
                    for (v, m) in values.iter_mut().zip(&mono_tables[j]) {
                        *v = ((*v + *m) as usize % p) as u32;
                    }
                    coeffs[j] += 1;
                    if coeffs[j] < p {
                        break;
                    }
                    coeffs[j] = 0;
                }
            }
            best
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one chunk");

    let witness = PolynomialSpec::new(
        g,
        monos
            .iter()
            .zip(&best.2)
            .map(|(e, &c)| (e.iter().map(|&v| v as u64).collect(), c as u64)),
    )?;
    Ok(FarnessCertificate {
        far: is_far(best.0, eps),
        max_correlation: best.0,
        witness,
        polynomials_checked: total,
        exhaustive: true,
        degree: d,
        eps,
    })
}

/// Heuristic fallback: checks `samples` random polynomials of degree `<= d`.
/// A `far` verdict here is not a proof.
pub fn certify_farness_sampled(
    f: &FunctionTable,
    d: u32,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<FarnessCertificate> {
    let g = f.params();
    check_degree(g, d)?;
    let mut best: Option<(f64, PolynomialSpec)> = None;
    for s in 0..samples as u64 {
        let poly = random_polynomial(g, d, seed.wrapping_add(s))?;
        let corr = correlation(f, &poly)?;
        if best.as_ref().is_none_or(|(b, _)| corr > *b) {
            best = Some((corr, poly));
        }
    }
    let (max_correlation, witness) =
        best.ok_or_else(|| Error::param("sampled certification needs at least one sample"))?;
    Ok(FarnessCertificate {
        far: is_far(max_correlation, eps),
        max_correlation,
        witness,
        polynomials_checked: samples,
        exhaustive: false,
        degree: d,
        eps,
    })
}
