//! Fully connected Ising problems: representation, energy evaluation and an
//! exhaustive ground-state search for small instances.
//!
//! The energy of a spin configuration `s` with `s_i ∈ {-1, +1}` is
//!
//! ```text
//! E(s) = -1/2 Σ_ij J_ij s_i s_j + Σ_i h_i s_i
//! ```
//!
//! with a symmetric coupling matrix `J` (zero diagonal) and field vector `h`.
//! The double sum runs over both `(i, j)` and `(j, i)`, hence the `1/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest spin count accepted by [`IsingProblem::brute_force_ground_state`].
pub const ENUMERATION_LIMIT: usize = 26;

/// Incremental Gray-code energies are recomputed from scratch at this
/// interval so rounding drift stays far below the 1e-9 tolerances used by
/// the verification oracles.
const REFRESH_BLOCK_BITS: u32 = 14;
pub(crate) const REFRESH_BLOCK: u64 = 1 << REFRESH_BLOCK_BITS;

/// Minimum problem size before matrix-vector products fan out across the
/// rayon pool. Row dot products stay sequential either way, so results are
/// bit-identical for every thread count.
const PARALLEL_MATVEC_MIN: usize = 256;

/// Dot product with four independent accumulators. Deterministic summation
/// order; the split lets the compiler keep the hot loop vectorized.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let a4 = a.chunks_exact(4);
    let b4 = b.chunks_exact(4);
    let ra = a4.remainder();
    let rb = b4.remainder();
    for (ca, cb) in a4.zip(b4) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// A spin configuration with every entry exactly -1 or +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinVector {
    spins: Vec<i8>,
}

impl SpinVector {
    /// Validates that every entry is -1 or +1.
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!(
                "spin value {bad} is neither -1 nor +1"
            )));
        }
        Ok(Self { spins })
    }

    /// Extracts spins from real amplitudes: `sign(x)` with `sign(0) = +1`.
    pub fn from_signs(xs: &[f64]) -> Self {
        Self {
            spins: xs.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect(),
        }
    }

    /// All spins -1 (the all-zeros bit pattern).
    pub fn all_down(n: usize) -> Self {
        Self { spins: vec![-1; n] }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, i: usize) -> i8 {
        self.spins[i]
    }

    /// Flips every spin in place.
    pub fn negate(&mut self) {
        for s in &mut self.spins {
            *s = -*s;
        }
    }

    /// Spins as `±1.0` doubles, the form the energy kernels consume.
    pub fn to_f64(&self) -> Vec<f64> {
        self.spins.iter().map(|&s| f64::from(s)).collect()
    }

    /// The binary-bit view `b_i = (s_i + 1) / 2`.
    pub fn bit(&self, i: usize) -> u8 {
        ((self.spins[i] + 1) / 2) as u8
    }
}

/// Serialized form of [`IsingProblem`]: the documented flat JSON schema.
#[derive(Serialize, Deserialize)]
struct ProblemData {
    n: usize,
    /// Row-major `n x n` coupling matrix.
    j: Vec<f64>,
    h: Vec<f64>,
}

/// A fully connected Ising problem.
///
/// The coupling matrix is stored dense and row-major; the constructor
/// symmetrizes the input via `(J + Jᵀ)/2` and moves any diagonal into a
/// recorded constant (diagonal terms contribute `-1/2 Σ J_ii` for ±1 spins,
/// independent of the configuration).
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ProblemData", into = "ProblemData")]
pub struct IsingProblem {
    n: usize,
    j: Vec<f64>,
    h: Vec<f64>,
    dropped_constant: f64,
}

impl TryFrom<ProblemData> for IsingProblem {
    type Error = Error;

    fn try_from(data: ProblemData) -> Result<Self> {
        if data.j.len() != data.n * data.n {
            return Err(Error::DimensionMismatch {
                context: "coupling matrix",
                expected: data.n * data.n,
                got: data.j.len(),
            });
        }
        if data.h.len() != data.n {
            return Err(Error::DimensionMismatch {
                context: "field vector",
                expected: data.n,
                got: data.h.len(),
            });
        }
        Self::new(data.n, data.j, data.h)
    }
}

impl From<IsingProblem> for ProblemData {
    fn from(p: IsingProblem) -> Self {
        ProblemData {
            n: p.n,
            j: p.j,
            h: p.h,
        }
    }
}

impl IsingProblem {
    /// Builds a problem from a row-major coupling matrix and a field vector.
    ///
    /// The matrix is symmetrized and its diagonal is zeroed; the constant
    /// energy contribution of the dropped diagonal is recorded and available
    /// via [`IsingProblem::dropped_constant`].
    pub fn new(n: usize, j: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if j.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "coupling matrix",
                expected: n * n,
                got: j.len(),
            });
        }
        if h.len() != n {
            return Err(Error::DimensionMismatch {
                context: "field vector",
                expected: n,
                got: h.len(),
            });
        }
        if j.iter().chain(h.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "couplings and fields must be finite".into(),
            ));
        }

        let mut j = j;
        let mut dropped_constant = 0.0;
        for i in 0..n {
            for k in (i + 1)..n {
                let avg = 0.5 * (j[i * n + k] + j[k * n + i]);
                j[i * n + k] = avg;
                j[k * n + i] = avg;
            }
            // -1/2 J_ii s_i^2 is configuration independent.
            dropped_constant += -0.5 * j[i * n + i];
            j[i * n + i] = 0.0;
        }

        Ok(Self {
            n,
            j,
            h,
            dropped_constant,
        })
    }

    /// A problem with no couplings and no fields.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            j: vec![0.0; n * n],
            h: vec![0.0; n],
            dropped_constant: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` of the coupling matrix.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.j[i * self.n..(i + 1) * self.n]
    }

    pub fn coupling(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    pub fn field(&self, i: usize) -> f64 {
        self.h[i]
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &[f64] {
        &self.j
    }

    /// Constant energy contribution dropped when the diagonal was zeroed at
    /// construction. `energy_as_constructed = energy(s) + dropped_constant`.
    pub fn dropped_constant(&self) -> f64 {
        self.dropped_constant
    }

    /// Population standard deviation of the off-diagonal couplings.
    pub fn coupling_std(&self) -> f64 {
        let m = self.n * self.n - self.n;
        if m == 0 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..self.n {
            for k in 0..self.n {
                if i != k {
                    let v = self.j[i * self.n + k];
                    sum += v;
                    sumsq += v * v;
                }
            }
        }
        let mean = sum / m as f64;
        (sumsq / m as f64 - mean * mean).max(0.0).sqrt()
    }

    /// `out_i = Σ_j J_ij v_j`. Rows are processed independently (parallel for
    /// large problems) with a fixed per-row summation order, so the result is
    /// bit-identical regardless of thread count.
    pub(crate) fn coupling_matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        if self.n >= PARALLEL_MATVEC_MIN {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = dot(self.row(i), v));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = dot(self.row(i), v);
            }
        }
    }

    /// Energy kernel over `±1.0` doubles.
    pub(crate) fn energy_f64(&self, s: &[f64]) -> f64 {
        let mut quad = 0.0;
        let mut field = 0.0;
        for i in 0..self.n {
            quad += s[i] * dot(self.row(i), s);
            field += self.h[i] * s[i];
        }
        -0.5 * quad + field
    }

    /// Ising energy of `spins`: `-1/2 Σ_ij J_ij s_i s_j + Σ_i h_i s_i`.
    pub fn energy(&self, spins: &SpinVector) -> Result<f64> {
        if spins.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "spin vector",
                expected: self.n,
                got: spins.len(),
            });
        }
        Ok(self.energy_f64(&spins.to_f64()))
    }

    /// Exact ground state by exhaustive enumeration (instances up to
    /// [`ENUMERATION_LIMIT`] spins).
    ///
    /// Configurations are visited in Gray-code order so each step updates the
    /// energy in O(n). Ties are broken toward the lexicographically lowest
    /// spin vector (-1 before +1, first index most significant). The search
    /// space is split into fixed blocks that are scanned in parallel and
    /// merged in order, so the result does not depend on the thread count.
    pub fn brute_force_ground_state(&self) -> Result<(SpinVector, f64)> {
        if self.n > ENUMERATION_LIMIT {
            return Err(Error::EnumerationBound {
                bits: self.n,
                max: ENUMERATION_LIMIT,
            });
        }
        let total: u64 = 1 << self.n;
        let n_blocks = total.div_ceil(REFRESH_BLOCK);
        let candidates: Vec<Candidate> = (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * REFRESH_BLOCK;
                let end = total.min(start + REFRESH_BLOCK);
                self.scan_range(start, end, |_, _| {})
            })
            .collect();
        let best = candidates
            .into_iter()
            .reduce(|a, b| if b.beats(&a) { b } else { a })
            .expect("at least one block");
        // report the argmin's energy from scratch rather than the
        // incrementally tracked value
        let spins = spins_from_gray(self.n, best.gray);
        let energy = self.energy_f64(&spins.to_f64());
        Ok((spins, energy))
    }

    /// Scans enumeration indices `[start, end)`, reporting `(index, energy)`
    /// to `sink` and returning the best configuration seen.
    ///
    /// The energy is rebuilt from scratch at every multiple of the refresh
    /// block, so a configuration's reported energy is a pure function of its
    /// index, independent of how ranges are partitioned.
    pub(crate) fn scan_range<F: FnMut(u64, f64)>(
        &self,
        start: u64,
        end: u64,
        mut sink: F,
    ) -> Candidate {
        debug_assert!(start < end);
        let mut s = spins_from_gray(self.n, gray_code(start)).to_f64();
        let mut energy = self.energy_f64(&s);
        let mut best = Candidate {
            energy,
            gray: gray_code(start),
        };
        sink(start, energy);

        for idx in start + 1..end {
            if idx % REFRESH_BLOCK == 0 {
                s = spins_from_gray(self.n, gray_code(idx)).to_f64();
                energy = self.energy_f64(&s);
            } else {
                let k = idx.trailing_zeros() as usize;
                let old = s[k];
                let r = dot(self.row(k), &s);
                energy += 2.0 * old * (r - self.h[k]);
                s[k] = -old;
            }
            let cand = Candidate {
                energy,
                gray: gray_code(idx),
            };
            if cand.beats(&best) {
                best = cand;
            }
            sink(idx, energy);
        }
        best
    }
}

/// Standard reflected Gray code.
#[inline]
pub(crate) fn gray_code(index: u64) -> u64 {
    index ^ (index >> 1)
}

/// Spin configuration for a Gray code: bit `k` set means `s_k = +1`.
pub(crate) fn spins_from_gray(n: usize, gray: u64) -> SpinVector {
    SpinVector {
        spins: (0..n)
            .map(|k| if gray >> k & 1 == 1 { 1 } else { -1 })
            .collect(),
    }
}

/// True when spin vector `a` (as a Gray code) precedes `b` lexicographically,
/// reading -1 as lower than +1 and index 0 as most significant.
#[inline]
fn gray_lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let k = diff.trailing_zeros();
    a >> k & 1 == 0
}

/// A configuration met during enumeration, ordered by energy then by the
/// lexicographic spin tie-break.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub(crate) energy: f64,
    pub(crate) gray: u64,
}

impl Candidate {
    #[inline]
    fn beats(&self, other: &Candidate) -> bool {
        self.energy < other.energy
            || (self.energy == other.energy && gray_lex_less(self.gray, other.gray))
    }
}
