//! Classical reference engine: Fourier analysis on `F_p^n`, brute-force
//! Gowers norms and inner products, their Fourier-side identities, and the
//! 3-AP trilinear form.
//!
//! Everything here is computed by direct summation. These routines are the
//! ground truth that the circuit simulations are checked against.

mod table;

pub use table::{FunctionTable, SpectrumTable, TableFile, UNIMODULAR_TOL};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{checked_power, ensure_cap, Error, Result};
use crate::group::GroupParams;
use crate::sum::{sum_complex, sum_real, ComplexSum};

/// Largest imaginary residue tolerated in a Gowers expectation before it is
/// treated as an implementation fault.
pub const GOWERS_IMAG_TOL: f64 = 1e-10;

/// `f^(gamma) = E_x f(x) conj(chi_gamma(x))`, by direct `O(N^2)` summation.
pub fn fourier(f: &FunctionTable) -> Result<SpectrumTable> {
    let g = f.params();
    g.product_size(2, "direct Fourier transform")?;
    let big_n = g.order();
    let coeffs: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|gamma| {
            sum_complex((0..big_n).map(|x| f.get(x) * g.character_index(gamma, x).conj()))
                / big_n as f64
        })
        .collect();
    SpectrumTable::new(g.clone(), coeffs)
}

/// `f(x) = sum_gamma F(gamma) chi_gamma(x)`.
pub fn inverse_fourier(spectrum: &SpectrumTable) -> Result<FunctionTable> {
    let g = spectrum.params();
    g.product_size(2, "direct inverse Fourier transform")?;
    let big_n = g.order();
    let values: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|x| sum_complex((0..big_n).map(|gamma| spectrum.get(gamma) * g.character_index(gamma, x))))
        .collect();
    FunctionTable::new(g.clone(), values)
}

/// `(f * g)(x) = E_y f(y) g(x - y)`.
pub fn convolve(f: &FunctionTable, h: &FunctionTable) -> Result<FunctionTable> {
    f.params().ensure_same(h.params())?;
    let g = f.params();
    g.product_size(2, "convolution")?;
    let big_n = g.order();
    let values: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|x| sum_complex((0..big_n).map(|y| f.get(y) * h.get(g.sub_index(x, y)))) / big_n as f64)
        .collect();
    FunctionTable::new(g.clone(), values)
}

/// `Corr_f(a) = E_x f(x) conj(f(x + a))`.
pub fn autocorrelation(f: &FunctionTable, a: usize) -> Complex64 {
    let g = f.params();
    let big_n = g.order();
    sum_complex((0..big_n).map(|x| f.get(x) * f.get(g.add_index(x, a)).conj())) / big_n as f64
}

/// `E_{x,h_1..h_d} prod_w C^{|w|} f_w(x + w.h)` for `2^d` tables, where bit
/// `j` of the vertex index `w` selects `h_{j+1}`.
pub fn gowers_inner_product(fs: &[FunctionTable], d: usize) -> Result<Complex64> {
    if d == 0 {
        return Err(Error::param("Gowers order d must be at least 1"));
    }
    let vertices = checked_power(2, d).ok_or_else(|| Error::param("order too large"))?;
    if fs.len() != vertices {
        return Err(Error::param(format!(
            "inner product of order {d} takes {vertices} tables, got {}",
            fs.len()
        )));
    }
    let g = fs[0].params();
    for f in &fs[1..] {
        g.ensure_same(f.params())?;
    }
    let total = g.product_size(d + 1, "Gowers expectation")?;
    let big_n = g.order();
    let inner = total / big_n;

    let partials: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|x| {
            let mut acc = ComplexSum::default();
            let mut hs = vec![0usize; d];
            let mut points = vec![0usize; vertices];
            points[0] = x;
            for _ in 0..inner {
                let mut prod = vertex_value(&fs[0], 0, x);
                for w in 1..vertices {
                    let j = w.trailing_zeros() as usize;
                    points[w] = g.add_index(points[w ^ (1 << j)], hs[j]);
                    prod *= vertex_value(&fs[w], w, points[w]);
                }
                acc.add(prod);
                // odometer over (h_1, ..., h_d)
                for h in hs.iter_mut() {
                    *h += 1;
                    if *h < big_n {
                        break;
                    }
                    *h = 0;
                }
            }
            acc.value()
        })
        .collect();
    Ok(sum_complex(partials) / total as f64)
}

#[inline]
fn vertex_value(f: &FunctionTable, w: usize, point: usize) -> Complex64 {
    let v = f.get(point);
    if w.count_ones() % 2 == 1 {
        v.conj()
    } else {
        v
    }
}

/// `||f||_{U^d}^{2^d}` by direct summation, with the imaginary residue
/// checked and discarded.
pub fn gowers_norm_power(f: &FunctionTable, d: usize) -> Result<f64> {
    let vertices = checked_power(2, d).ok_or_else(|| Error::param("order too large"))?;
    let fs = vec![f.clone(); vertices];
    let value = gowers_inner_product(&fs, d)?;
    let scale = f.sup_norm().powi(vertices as i32).max(1.0);
    if value.im.abs() > GOWERS_IMAG_TOL * scale {
        return Err(Error::Internal(format!(
            "Gowers expectation has imaginary part {:e}",
            value.im
        )));
    }
    if value.re < -GOWERS_IMAG_TOL * scale {
        return Err(Error::Internal(format!(
            "Gowers expectation is negative: {:e}",
            value.re
        )));
    }
    Ok(value.re.max(0.0))
}

/// `||f||_{U^d}` from the defining expectation.
pub fn gowers_norm_bruteforce(f: &FunctionTable, d: usize) -> Result<f64> {
    let power = gowers_norm_power(f, d)?;
    Ok(power.powf(1.0 / (1u64 << d) as f64))
}

/// `(sum_gamma |f^(gamma)|^4)^(1/4)`.
pub fn gowers_u2_via_fourier(f: &FunctionTable) -> Result<f64> {
    let spectrum = fourier(f)?;
    let s = sum_real(spectrum.coeffs().iter().map(|c| c.norm_sqr() * c.norm_sqr()));
    Ok(s.powf(0.25))
}

/// `||f||_{U^3}` from the eight-fold Fourier sum under its four linear
/// constraints.
///
/// Labelling coefficients by cube vertex, the free indices are the three
/// even-weight-two vertices `u = 110, v = 101, w = 011` and the top vertex
/// `t = 111`; the rest are forced:
/// `100 = u+v-t`, `010 = u+w-t`, `001 = v+w-t`, `000 = u+v+w-2t`.
/// Odd-weight vertices enter conjugated.
pub fn gowers_u3_via_fourier(f: &FunctionTable) -> Result<f64> {
    let g = f.params();
    let big_n = g.order();
    ensure_cap("U^3 Fourier sum", checked_power(big_n, 4), g.cap())?;
    let spectrum = fourier(f)?;
    let c = spectrum.coeffs();
    let add: Vec<usize> = (0..big_n * big_n)
        .map(|k| g.add_index(k / big_n, k % big_n))
        .collect();
    let sub: Vec<usize> = (0..big_n * big_n)
        .map(|k| g.sub_index(k / big_n, k % big_n))
        .collect();
    let add_ix = |a: usize, b: usize| add[a * big_n + b];
    let sub_ix = |a: usize, b: usize| sub[a * big_n + b];

    let partials: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|t| {
            let mut acc = ComplexSum::default();
            for u in 0..big_n {
                let u_t = sub_ix(u, t);
                for v in 0..big_n {
                    let e100 = add_ix(u_t, v);
                    let uv = add_ix(u, v);
                    let v_t = sub_ix(v, t);
                    for w in 0..big_n {
                        let e010 = add_ix(u_t, w);
                        let e001 = add_ix(v_t, w);
                        let e000 = sub_ix(sub_ix(add_ix(uv, w), t), t);
                        let plain = c[e000] * c[u] * c[v] * c[w];
                        let conj = (c[e100] * c[e010] * c[e001] * c[t]).conj();
                        acc.add(plain * conj);
                    }
                }
            }
            acc.value()
        })
        .collect();
    let value = sum_complex(partials);
    if value.im.abs() > GOWERS_IMAG_TOL || value.re < -GOWERS_IMAG_TOL {
        return Err(Error::Internal(format!(
            "U^3 Fourier sum is not a nonnegative real: {value}"
        )));
    }
    Ok(value.re.max(0.0).powf(0.125))
}

/// `E_{x,y} f(x) g(x+y) h(x+2y)` by direct summation.
///
/// With `verify`, the Fourier-side value `sum_gamma f^(gamma) g^(-2 gamma)
/// h^(gamma)` is also computed and must agree within `1e-10`.
pub fn t3(f: &FunctionTable, g_tab: &FunctionTable, h: &FunctionTable, verify: bool) -> Result<Complex64> {
    let g = f.params();
    g.ensure_same(g_tab.params())?;
    g.ensure_same(h.params())?;
    if g.p() == 2 {
        return Err(Error::domain("3-AP patterns need p >= 3 (x + 2y = x in characteristic 2)"));
    }
    g.product_size(2, "3-AP sum")?;
    let big_n = g.order();
    let partials: Vec<Complex64> = (0..big_n)
        .into_par_iter()
        .map(|x| {
            let mut acc = ComplexSum::default();
            for y in 0..big_n {
                let x1 = g.add_index(x, y);
                let x2 = g.add_index(x1, y);
                acc.add(f.get(x) * g_tab.get(x1) * h.get(x2));
            }
            acc.value()
        })
        .collect();
    let direct = sum_complex(partials) / (big_n * big_n) as f64;
    if verify {
        let via_fourier = t3_fourier(f, g_tab, h)?;
        if (direct - via_fourier).norm() > 1e-10 {
            return Err(Error::Internal(format!(
                "3-AP direct sum {direct} disagrees with Fourier sum {via_fourier}"
            )));
        }
    }
    Ok(direct)
}

/// `sum_gamma f^(gamma) g^(-2 gamma) h^(gamma)`.
pub fn t3_fourier(f: &FunctionTable, g_tab: &FunctionTable, h: &FunctionTable) -> Result<Complex64> {
    let g = f.params();
    g.ensure_same(g_tab.params())?;
    g.ensure_same(h.params())?;
    let (fh, gh, hh) = (fourier(f)?, fourier(g_tab)?, fourier(h)?);
    let minus_two = g.p() - 2;
    Ok(sum_complex((0..g.order()).map(|gamma| {
        fh.get(gamma) * gh.get(g.scale_index(minus_two, gamma)) * hh.get(gamma)
    })))
}

/// Exact 3-AP statistics of a set given by its indicator table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApCount {
    /// Ordered pairs `(x, d)`, `d = 0` included, with `x, x+d, x+2d` in the set.
    pub count: u64,
    /// `count - |S|`: progressions with `d != 0`.
    pub nontrivial: u64,
    /// `T(f) = count / N^2`.
    pub t: f64,
    pub set_size: u64,
}

/// Reads a `{0,1}` indicator, rejecting anything else.
pub fn indicator_bits(s: &FunctionTable) -> Result<Vec<bool>> {
    s.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.im != 0.0 {
                Err(Error::domain(format!("indicator value at {i} is not real")))
            } else if v.re == 1.0 {
                Ok(true)
            } else if v.re == 0.0 {
                Ok(false)
            } else {
                Err(Error::domain(format!("indicator value {} at {i} is not 0 or 1", v.re)))
            }
        })
        .collect()
}

pub fn count_3aps_exact(s: &FunctionTable) -> Result<ApCount> {
    let g = s.params();
    if g.p() == 2 {
        return Err(Error::domain("3-AP counting needs p >= 3"));
    }
    let bits = indicator_bits(s)?;
    let big_n = g.order();
    ensure_cap("3-AP count", checked_power(big_n, 2), g.cap())?;
    let count: u64 = (0..big_n)
        .into_par_iter()
        .filter(|&x| bits[x])
        .map(|x| {
            (0..big_n)
                .filter(|&d| {
                    let x1 = g.add_index(x, d);
                    bits[x1] && bits[g.add_index(x1, d)]
                })
                .count() as u64
        })
        .sum();
    let set_size = bits.iter().filter(|&&b| b).count() as u64;
    Ok(ApCount {
        count,
        nontrivial: count - set_size,
        t: count as f64 / (big_n as f64 * big_n as f64),
        set_size,
    })
}

/// The indicator of a set of linear indices.
pub fn indicator_table(params: &GroupParams, members: &[usize]) -> Result<FunctionTable> {
    let mut values = vec![Complex64::new(0.0, 0.0); params.order()];
    for &m in members {
        *values
            .get_mut(m)
            .ok_or_else(|| Error::param(format!("set element {m} out of range")))? =
            Complex64::new(1.0, 0.0);
    }
    FunctionTable::new(params.clone(), values)
}
