//! Dense statevector simulation over products of `F_p^n` registers.
//!
//! The composite basis index of `(x_0, ..., x_{r-1})` is `sum_k x_k N^k`
//! with `N = p^n`; an optional two-level ancilla occupies the top bit, so
//! ancilla level `a` adds `a * N^r`. Only three register gates exist: the
//! diagonal phase oracle, controlled group addition (a permutation) and the
//! QFT, realised as `n` single-digit `p`-point transforms.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{ensure_cap, Error, Result};
use crate::group::{GroupParams, GroupVector};
use crate::harmonic::FunctionTable;
use crate::rng::{rng_for, Stream};
use crate::sum::sum_real;

/// Below this many amplitudes per task, gates run sequentially.
const PAR_GRAIN: usize = 1 << 12;

/// Tolerated drift of the squared norm across a single gate (debug builds).
pub const GATE_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RegisterLayout {
    params: GroupParams,
    registers: usize,
    ancilla: bool,
    register_dim: usize,
    total_dim: usize,
}

impl RegisterLayout {
    pub fn new(params: &GroupParams, registers: usize, ancilla: bool) -> Result<Self> {
        if registers == 0 {
            return Err(Error::param("a layout needs at least one register"));
        }
        let base = params.product_size(registers, "state vector")?;
        let total_dim = if ancilla {
            ensure_cap("state vector", base.checked_mul(2), params.cap())?
        } else {
            base
        };
        Ok(Self {
            params: params.clone(),
            registers,
            ancilla,
            register_dim: params.order(),
            total_dim,
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn has_ancilla(&self) -> bool {
        self.ancilla
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Dimension of the register part, `N^r`.
    pub fn register_space(&self) -> usize {
        if self.ancilla {
            self.total_dim / 2
        } else {
            self.total_dim
        }
    }

    fn stride(&self, k: usize) -> usize {
        self.register_dim.pow(k as u32)
    }

    fn check_register(&self, k: usize) -> Result<()> {
        if k < self.registers {
            Ok(())
        } else {
            Err(Error::param(format!(
                "register {k} out of range for a {}-register layout",
                self.registers
            )))
        }
    }

    /// Composite index of one basis vector per register (ancilla level 0).
    pub fn composite_index(&self, basis: &[GroupVector]) -> Result<usize> {
        if basis.len() != self.registers {
            return Err(Error::param(format!(
                "expected {} register values, got {}",
                self.registers,
                basis.len()
            )));
        }
        let mut index = 0;
        for v in basis.iter().rev() {
            index = index * self.register_dim + self.params.index_checked(v)?;
        }
        Ok(index)
    }

    /// Splits a composite index into per-register linear indices and the
    /// ancilla level.
    pub fn split_index(&self, index: usize) -> (Vec<usize>, u8) {
        let mut rest = index;
        let regs = (0..self.registers)
            .map(|_| {
                let v = rest % self.register_dim;
                rest /= self.register_dim;
                v
            })
            .collect();
        (regs, rest as u8)
    }
}

/// Gate tallies, kept for query accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub oracle: usize,
    pub cadd: usize,
    pub qft: usize,
}

#[derive(Clone, Debug)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
    counts: GateCounts,
    #[cfg(debug_assertions)]
    norm_sq: f64,
}

fn min_len(chunk: usize) -> usize {
    (PAR_GRAIN / chunk.max(1)).max(1)
}

impl StateVector {
    fn from_amps(layout: RegisterLayout, amps: Vec<Complex64>) -> Self {
        #[allow(unused_mut)]
        let mut state = Self {
            layout,
            amps,
            counts: GateCounts::default(),
            #[cfg(debug_assertions)]
            norm_sq: 0.0,
        };
        #[cfg(debug_assertions)]
        {
            state.norm_sq = state.norm_sqr();
        }
        state
    }

    /// Uniform superposition over the register part; the ancilla starts at 0.
    pub fn init_uniform(layout: &RegisterLayout) -> Self {
        let space = layout.register_space();
        let a = Complex64::new(1.0 / (space as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim];
        amps[..space].fill(a);
        Self::from_amps(layout.clone(), amps)
    }

    pub fn init_basis(layout: &RegisterLayout, shifts: &[GroupVector]) -> Result<Self> {
        let index = layout.composite_index(shifts)?;
        Ok(Self::init_basis_index(layout, index))
    }

    pub fn init_basis_index(layout: &RegisterLayout, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_amps(layout.clone(), amps)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn counts(&self) -> GateCounts {
        self.counts
    }

    pub fn norm_sqr(&self) -> f64 {
        sum_real(self.amps.iter().map(|a| a.norm_sqr()))
    }

    #[cfg(debug_assertions)]
    fn check_norm(&mut self, gate: &str) {
        let now = self.norm_sqr();
        debug_assert!(
            (now - self.norm_sq).abs() <= GATE_NORM_TOL,
            "{gate} changed the squared norm by {}",
            now - self.norm_sq
        );
        self.norm_sq = now;
    }

    #[cfg(not(debug_assertions))]
    #[inline]
    fn check_norm(&mut self, _gate: &str) {}

    fn check_table(&self, f: &FunctionTable) -> Result<()> {
        self.layout.params.ensure_same(f.params())?;
        f.ensure_unimodular()
    }

    /// Multiplies every amplitude by `f(x_k)` (or its conjugate).
    pub fn apply_phase_oracle(&mut self, k: usize, f: &FunctionTable, conjugate: bool) -> Result<()> {
        self.layout.check_register(k)?;
        self.check_table(f)?;
        let whole = 0..self.amps.len();
        self.phase_on(whole, k, f, conjugate);
        self.counts.oracle += 1;
        self.check_norm("phase oracle");
        Ok(())
    }

    /// `U_f` on register `k` conditioned on the ancilla being at level 1.
    pub fn controlled_phase_oracle(&mut self, k: usize, f: &FunctionTable, conjugate: bool) -> Result<()> {
        self.require_ancilla()?;
        self.layout.check_register(k)?;
        self.check_table(f)?;
        let space = self.layout.register_space();
        self.phase_on(space..2 * space, k, f, conjugate);
        self.counts.oracle += 1;
        self.check_norm("controlled phase oracle");
        Ok(())
    }

    fn phase_on(&mut self, range: std::ops::Range<usize>, k: usize, f: &FunctionTable, conjugate: bool) {
        let stride = self.layout.stride(k);
        let block = stride * self.layout.register_dim;
        let values = f.values();
        self.amps[range]
            .par_chunks_mut(block)
            .with_min_len(min_len(block))
            .for_each(|chunk| {
                for (x, run) in chunk.chunks_mut(stride).enumerate() {
                    let phase = if conjugate { values[x].conj() } else { values[x] };
                    for a in run {
                        *a *= phase;
                    }
                }
            });
    }

    /// `|.., x_src, .., y_dst, ..> -> |.., x_src, .., y_dst + sign x_src, ..>`.
    pub fn apply_cadd(&mut self, src: usize, dst: usize, sign: i8) -> Result<()> {
        self.layout.check_register(src)?;
        self.layout.check_register(dst)?;
        if src == dst {
            return Err(Error::param("controlled addition needs distinct registers"));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::param(format!("sign must be +1 or -1, got {sign}")));
        }
        let g = &self.layout.params;
        let dim = self.layout.register_dim;
        let dst_stride = self.layout.stride(dst);
        let src_stride = self.layout.stride(src);
        let block = dst_stride * dim;
        self.amps
            .par_chunks_mut(block)
            .with_min_len(min_len(block))
            .enumerate()
            .for_each(|(b, chunk)| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
                let base = b * block;
                for off in 0..dst_stride {
                    let x = ((base + off) / src_stride) % dim;
                    if x == 0 {
                        continue;
                    }
                    for (y, s) in scratch.iter_mut().enumerate() {
                        *s = chunk[off + y * dst_stride];
                    }
                    for (y, s) in scratch.iter().enumerate() {
                        let target = if sign > 0 { g.add_index(y, x) } else { g.sub_index(y, x) };
                        chunk[off + target * dst_stride] = *s;
                    }
                }
            });
        self.counts.cadd += 1;
        self.check_norm("controlled addition");
        Ok(())
    }

    /// `amps'(gamma) = N^{-1/2} sum_x omega^{+-<gamma, x>} amps(x)` on register `k`.
    pub fn apply_qft(&mut self, k: usize, inverse: bool) -> Result<()> {
        self.layout.check_register(k)?;
        let p = self.layout.params.p() as usize;
        let roots = self.layout.params.roots();
        let scale = 1.0 / (p as f64).sqrt();
        let matrix: Vec<Complex64> = (0..p * p)
            .map(|i| {
                let w = roots[(i / p) * (i % p) % p];
                (if inverse { w.conj() } else { w }) * scale
            })
            .collect();
        let mut stride = self.layout.stride(k);
        for _ in 0..self.layout.params.n() {
            let block = stride * p;
            let matrix = &matrix;
            self.amps
                .par_chunks_mut(block)
                .with_min_len(min_len(block))
                .for_each(|chunk| {
                    if p == 2 {
                        let (lo, hi) = chunk.split_at_mut(stride);
                        for (a, b) in lo.iter_mut().zip(hi) {
                            let (u, v) = (*a, *b);
                            *a = (u + v) * scale;
                            *b = (u - v) * scale;
                        }
                        return;
                    }
                    let mut scratch = vec![Complex64::new(0.0, 0.0); p];
                    for off in 0..stride {
                        for (x, s) in scratch.iter_mut().enumerate() {
                            *s = chunk[off + x * stride];
                        }
                        for gamma in 0..p {
                            let row = &matrix[gamma * p..(gamma + 1) * p];
                            chunk[off + gamma * stride] =
                                row.iter().zip(&scratch).map(|(m, s)| m * s).sum();
                        }
                    }
                });
            stride *= p;
        }
        self.counts.qft += 1;
        self.check_norm("QFT");
        Ok(())
    }

    fn require_ancilla(&self) -> Result<()> {
        if self.layout.ancilla {
            Ok(())
        } else {
            Err(Error::precondition("layout has no ancilla"))
        }
    }

    /// Hadamard on the ancilla.
    pub fn apply_ancilla_hadamard(&mut self) -> Result<()> {
        self.require_ancilla()?;
        let space = self.layout.register_space();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (lo, hi) = self.amps.split_at_mut(space);
        lo.par_iter_mut()
            .zip(hi.par_iter_mut())
            .with_min_len(PAR_GRAIN)
            .for_each(|(a, b)| {
                let (u, v) = (*a, *b);
                *a = (u + v) * s;
                *b = (u - v) * s;
            });
        self.check_norm("ancilla Hadamard");
        Ok(())
    }

    /// Probability that the ancilla reads `level`.
    pub fn ancilla_probability(&self, level: u8) -> Result<f64> {
        self.require_ancilla()?;
        let space = self.layout.register_space();
        let half = if level == 0 { &self.amps[..space] } else { &self.amps[space..] };
        Ok(sum_real(half.iter().map(|a| a.norm_sqr())))
    }

    pub fn probability_of(&self, basis: &[GroupVector]) -> Result<f64> {
        Ok(self.probability_index(self.layout.composite_index(basis)?))
    }

    pub fn probability_index(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `m` i.i.d. composite indices drawn by inverse CDF.
    pub fn sample(&self, m: usize, seed: u64) -> Result<Vec<usize>> {
        if m == 0 {
            return Err(Error::precondition("sample count must be at least 1"));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut rng = rng_for(seed, Stream::Measurement);
        let last = cdf.len() - 1;
        Ok((0..m)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect())
    }

    /// Header of four little-endian `u32` `{p, n, r, ancilla}`, then
    /// interleaved little-endian `(re, im)` doubles.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let l = &self.layout;
        for v in [l.params.p(), l.params.n() as u32, l.registers as u32, l.ancilla as u32] {
            w.write_all(&v.to_le_bytes())?;
        }
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        let word = |i: usize| u32::from_le_bytes(header[4 * i..4 * i + 4].try_into().unwrap());
        let params = GroupParams::new(word(0) as u64, word(1) as usize)?;
        let layout = RegisterLayout::new(&params, word(2) as usize, word(3) != 0)?;
        let mut amps = Vec::with_capacity(layout.total_dim);
        let mut buf = [0u8; 16];
        for _ in 0..layout.total_dim {
            r.read_exact(&mut buf)?;
            amps.push(Complex64::new(
                f64::from_le_bytes(buf[..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..].try_into().unwrap()),
            ));
        }
        Ok(Self::from_amps(layout, amps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(p: u64, n: usize, r: usize, ancilla: bool) -> RegisterLayout {
        RegisterLayout::new(&GroupParams::new(p, n).unwrap(), r, ancilla).unwrap()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn uniform_states() {
        let s = StateVector::init_uniform(&layout(2, 1, 1, false));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[Complex64::new(h, 0.0); 2], 1e-15));
        let s = StateVector::init_uniform(&layout(3, 1, 3, false));
        assert_eq!(s.amplitudes().len(), 27);
        assert!(s.amplitudes().iter().all(|a| (a.re - 27f64.sqrt().recip()).abs() <= 1e-15));
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-15);
        for (i, p) in s.distribution().iter().enumerate() {
            assert!((p - 1.0 / 27.0).abs() <= 1e-15, "outcome {i}");
        }
    }

    #[test]
    fn basis_indexing() {
        let l = layout(3, 1, 2, false);
        let g = l.params().clone();
        let s = StateVector::init_basis(&l, &[g.vector(&[1]).unwrap(), g.vector(&[2]).unwrap()]).unwrap();
        assert_eq!(s.amplitude(7), Complex64::new(1.0, 0.0));
        assert_eq!(s.probability_index(7), 1.0);
        let s0 = StateVector::init_basis(&l, &[g.zero(), g.zero()]).unwrap();
        assert_eq!(s0.amplitude(0), Complex64::new(1.0, 0.0));
        assert_eq!(l.split_index(7), (vec![1, 2], 0));
        assert!(StateVector::init_basis(&l, &[g.zero()]).is_err());
    }

    #[test]
    fn layout_cap() {
        let g = GroupParams::new(2, 4).unwrap().with_cap(1 << 8);
        assert!(RegisterLayout::new(&g, 2, false).is_ok());
        assert!(matches!(RegisterLayout::new(&g, 2, true), Err(Error::Size { .. })));
        assert!(matches!(RegisterLayout::new(&g, 3, false), Err(Error::Size { .. })));
        assert!(RegisterLayout::new(&g, 0, false).is_err());
    }

    #[test]
    fn oracle_cases() {
        let l = layout(3, 2, 2, false);
        let g = l.params().clone();
        let mut s = StateVector::init_basis_index(&l, 40);
        s.apply_qft(0, false).unwrap();
        s.apply_qft(1, false).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_phase_oracle(1, &FunctionTable::constant(&g, Complex64::new(1.0, 0.0)).unwrap(), false)
            .unwrap();
        assert!(close(s.amplitudes(), &before, 0.0));

        let f = FunctionTable::from_fn(&g, |x| Complex64::from_polar(1.0, 0.3 * x as f64 + 0.1)).unwrap();
        s.apply_phase_oracle(1, &f, false).unwrap();
        // amplitude of |x0, x1> picks up f(x1)
        for (i, &b) in before.iter().enumerate() {
            let expected = b * f.get(i / 9);
            assert!((s.amplitude(i) - expected).norm() <= 1e-15);
        }
        s.apply_phase_oracle(1, &f, true).unwrap();
        assert!(close(s.amplitudes(), &before, 1e-12));
        assert_eq!(s.counts().oracle, 3);

        let bad = FunctionTable::constant(&g, Complex64::new(0.5, 0.0)).unwrap();
        assert!(matches!(s.apply_phase_oracle(0, &bad, false), Err(Error::Domain(_))));
        assert!(s.apply_phase_oracle(2, &f, false).is_err());
    }

    #[test]
    fn character_oracle_then_qft_finds_gamma() {
        for (p, n) in [(3u64, 2usize), (2, 3), (5, 1)] {
            let l = layout(p, n, 1, false);
            let g = l.params().clone();
            for gamma in 0..g.order() {
                let mut s = StateVector::init_uniform(&l);
                s.apply_phase_oracle(0, &FunctionTable::character(&g, gamma).unwrap(), false)
                    .unwrap();
                s.apply_qft(0, false).unwrap();
                // uniform * chi_gamma, transformed with omega^{+<.,.>}, peaks at -gamma
                assert!((s.probability_index(g.neg_index(gamma)) - 1.0).abs() <= 1e-12);
                let mut s = StateVector::init_uniform(&l);
                s.apply_phase_oracle(0, &FunctionTable::character(&g, gamma).unwrap(), false)
                    .unwrap();
                s.apply_qft(0, true).unwrap();
                assert!((s.probability_index(gamma) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cadd_cases() {
        let l = layout(3, 1, 2, false);
        let mut s = StateVector::init_basis_index(&l, 1 + 2 * 3);
        s.apply_cadd(0, 1, 1).unwrap();
        assert_eq!(s.amplitude(1), Complex64::new(1.0, 0.0));
        s.apply_cadd(0, 1, -1).unwrap();
        assert_eq!(s.amplitude(7), Complex64::new(1.0, 0.0));
        assert!(matches!(s.apply_cadd(1, 1, 1), Err(Error::Parameter(_))));
        assert!(s.apply_cadd(0, 1, 0).is_err());

        let l = layout(2, 2, 3, false);
        let mut a = StateVector::init_basis_index(&l, 1 + 4 * 3 + 16 * 2);
        let mut b = a.clone();
        a.apply_cadd(2, 0, 1).unwrap();
        b.apply_cadd(2, 0, -1).unwrap();
        assert!(close(a.amplitudes(), b.amplitudes(), 0.0));
        // 1 xor 2 = 3
        assert_eq!(a.amplitude(3 + 4 * 3 + 16 * 2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn qft_cases() {
        let l = layout(5, 2, 1, false);
        let mut s = StateVector::init_basis_index(&l, 0);
        s.apply_qft(0, false).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a - Complex64::new(0.2, 0.0)).norm() <= 1e-15));

        let l = layout(3, 2, 2, true);
        let mut s = StateVector::init_uniform(&l);
        s.apply_ancilla_hadamard().unwrap();
        s.apply_phase_oracle(1, &FunctionTable::character(l.params(), 4).unwrap(), false).unwrap();
        s.apply_cadd(1, 0, 1).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_qft(1, false).unwrap();
        s.apply_qft(1, true).unwrap();
        assert!(close(s.amplitudes(), &before, 1e-12));

        // p = 2, n = 2: H tensor H
        let l = layout(2, 2, 1, false);
        let h = 0.5;
        let hh = [
            [h, h, h, h],
            [h, -h, h, -h],
            [h, h, -h, -h],
            [h, -h, -h, h],
        ];
        for x in 0..4 {
            let mut s = StateVector::init_basis_index(&l, x);
            s.apply_qft(0, false).unwrap();
            for (gamma, row) in hh.iter().enumerate() {
                assert!((s.amplitude(gamma) - Complex64::new(row[x], 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn qft_matches_direct_sum() {
        let l = layout(3, 2, 2, false);
        let g = l.params().clone();
        let mut s = StateVector::init_uniform(&l);
        let f = FunctionTable::from_fn(&g, |x| Complex64::from_polar(1.0, (x * x) as f64 * 0.7)).unwrap();
        s.apply_phase_oracle(1, &f, false).unwrap();
        s.apply_cadd(1, 0, 1).unwrap();
        s.apply_phase_oracle(0, &f, true).unwrap();
        let before = s.amplitudes().to_vec();
        s.apply_qft(1, false).unwrap();
        for x0 in 0..9 {
            for gamma in 0..9 {
                let mut acc = Complex64::new(0.0, 0.0);
                for x1 in 0..9 {
                    acc += g.character_index(gamma, x1) * before[x0 + 9 * x1];
                }
                assert!((s.amplitude(x0 + 9 * gamma) - acc / 3.0).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn ancilla_cases() {
        let l = layout(3, 1, 1, true);
        let g = l.params().clone();
        let c = Complex64::from_polar(1.0, 2.1);
        let f = FunctionTable::constant(&g, c).unwrap();

        let mut s = StateVector::init_uniform(&l);
        let before = s.amplitudes().to_vec();
        s.controlled_phase_oracle(0, &f, false).unwrap();
        assert!(close(s.amplitudes(), &before, 0.0));

        let mut s = StateVector::init_basis_index(&l, 3 + 2);
        let mut plain = s.clone();
        s.controlled_phase_oracle(0, &f, false).unwrap();
        plain.apply_phase_oracle(0, &f, false).unwrap();
        assert!(close(s.amplitudes(), plain.amplitudes(), 0.0));

        let mut s = StateVector::init_uniform(&l);
        s.apply_ancilla_hadamard().unwrap();
        s.controlled_phase_oracle(0, &f, false).unwrap();
        s.apply_ancilla_hadamard().unwrap();
        let re = 2.0 * s.ancilla_probability(0).unwrap() - 1.0;
        assert!((re - c.re).abs() <= 1e-12);
        assert!((s.ancilla_probability(0).unwrap() + s.ancilla_probability(1).unwrap() - 1.0).abs() <= 1e-12);

        let mut plain = StateVector::init_uniform(&layout(3, 1, 1, false));
        assert!(matches!(plain.controlled_phase_oracle(0, &f, false), Err(Error::Precondition(_))));
        assert!(plain.apply_ancilla_hadamard().is_err());
    }

    #[test]
    fn sampling() {
        let l = layout(2, 2, 1, false);
        let s = StateVector::init_basis_index(&l, 2);
        assert!(s.sample(50, 1).unwrap().iter().all(|&i| i == 2));
        assert!(s.sample(0, 1).is_err());

        let u = StateVector::init_uniform(&l);
        let m = 100_000;
        let draws = u.sample(m, 17).unwrap();
        assert_eq!(draws, u.sample(m, 17).unwrap());
        let sigma = (m as f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let hits = draws.iter().filter(|&&i| i == k).count() as f64;
            assert!((hits - m as f64 / 4.0).abs() <= 4.0 * sigma, "outcome {k}: {hits}");
        }
    }

    #[test]
    fn dump_round_trip() {
        let l = layout(3, 1, 2, true);
        let mut s = StateVector::init_uniform(&l);
        s.apply_ancilla_hadamard().unwrap();
        s.apply_qft(1, false).unwrap();
        let mut bytes = Vec::new();
        s.write_dump(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 18 * 16);
        assert_eq!(&bytes[..16], &[3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        let back = StateVector::read_dump(bytes.as_slice()).unwrap();
        assert_eq!(back.layout(), s.layout());
        assert!(close(back.amplitudes(), s.amplitudes(), 0.0));
        assert!(StateVector::read_dump(&bytes[..20]).is_err());
    }
}
