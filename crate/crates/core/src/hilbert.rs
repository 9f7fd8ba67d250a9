//! Complex vectors, orthonormal bases, Bloch vectors and the samplers for
//! the unitarily invariant measures on them.
//!
//! Bloch convention: the computational vector `|1>` (index 0) is the `+z`
//! pole and `(|1> + |2>)/sqrt(2)` is `+x`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on norms and inner products of constructed objects.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Gram-Schmidt residual norms below this are treated as rank deficiency.
const DEGENERATE_NORM: f64 = 1e-8;

/// A unit-norm pure state in `C^N`, `N >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validates dimension and normalization.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension { dim: amps.len() });
        }
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidDimension { dim: amps.len() });
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { amps })
    }

    /// Computational basis vector `|k+1>` (zero-based `k`).
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: k + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    // Callers guarantee the invariants.
    pub(crate) fn from_raw(amps: Vec<Complex64>) -> Self {
        debug_assert!(amps.len() >= 2);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(inner_raw(&self.amps, &other.amps))
    }
}

/// `N` mutually orthonormal state vectors of dimension `N`: a projective
/// measurement or a shared random frame.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    vectors: Vec<StateVector>,
    // Set only by `computational`; enables O(1) overlaps.
    computational: bool,
}

impl PartialEq for OrthonormalBasis {
    fn eq(&self, other: &Self) -> bool {
        self.vectors == other.vectors
    }
}

impl OrthonormalBasis {
    /// Validates that the vectors form an orthonormal frame.
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let dim = vectors.len();
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        for v in &vectors {
            check_dims(dim, v.dim())?;
        }
        for i in 0..dim {
            for j in i..dim {
                let ip = inner_raw(vectors[i].amplitudes(), vectors[j].amplitudes());
                let target = if i == j { 1.0 } else { 0.0 };
                let deviation = (ip - Complex64::new(target, 0.0)).norm();
                if deviation > NORM_TOLERANCE {
                    return Err(Error::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Self::from_raw(vectors))
    }

    pub fn computational(dim: usize) -> Result<Self> {
        let vectors = (0..dim)
            .map(|k| StateVector::basis(dim, k))
            .collect::<Result<Vec<_>>>()?;
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        Ok(Self {
            vectors,
            computational: true,
        })
    }

    pub(crate) fn from_raw(vectors: Vec<StateVector>) -> Self {
        Self {
            vectors,
            computational: false,
        }
    }

    /// `|<v_k|x>|^2`.
    #[inline]
    pub(crate) fn overlap_with(&self, k: usize, x: &[Complex64]) -> f64 {
        if self.computational {
            x[k].norm_sqr()
        } else {
            overlap_raw(self.vectors[k].amplitudes(), x)
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &StateVector {
        &self.vectors[k]
    }

    pub fn into_vectors(self) -> Vec<StateVector> {
        self.vectors
    }

    /// Reorders the vectors: output slot `k` holds input vector `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim());
        Self::from_raw(perm.iter().map(|&k| self.vectors[k].clone()).collect())
    }

    /// Applies the unitary whose columns are `frame`'s vectors to every vector.
    pub fn transformed(&self, frame: &OrthonormalBasis) -> Result<Self> {
        check_dims(self.dim(), frame.dim())?;
        Ok(Self::from_raw(
            self.vectors.iter().map(|v| apply_frame(frame, v)).collect(),
        ))
    }
}

/// Unit vector in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Normalizes `(x, y, z)`; `None` for the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub const PLUS_Z: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn from_angles(theta: f64, azimuth: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self {
            x: st * ca,
            y: st * sa,
            z: ct,
        }
    }

    pub fn vec3(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn dot(self, other: impl Into<Vec3>) -> f64 {
        self.vec3().dot(other.into())
    }
}

impl Neg for BlochVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl From<BlochVector> for Vec3 {
    fn from(b: BlochVector) -> Self {
        b.vec3()
    }
}

/// Unconstrained real 3-vector, e.g. the sums `x1 + x2` of two Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self * v.x, self * v.y, self * v.z)
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(Complex64::norm_sqr).sum()
}

#[inline]
fn inner_raw(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2` without dimension checks.
#[inline]
pub(crate) fn overlap_raw(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner_raw(a, b).norm_sqr()
}

/// `|<a*|b>|^2 = |sum_k a_k b_k|^2`, where `a*` is `a` conjugated in the
/// computational basis.
#[inline]
pub(crate) fn conj_overlap_raw(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .sum::<Complex64>()
        .norm_sqr()
}

fn apply_frame(frame: &OrthonormalBasis, v: &StateVector) -> StateVector {
    let dim = v.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (c, col) in v.amplitudes().iter().zip(frame.vectors()) {
        for (o, e) in out.iter_mut().zip(col.amplitudes()) {
            *o += c * e;
        }
    }
    StateVector::from_raw(out)
}

/// `|<a|b>|^2`, symmetric in its arguments.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(overlap_raw(&a.amps, &b.amps))
}

/// Componentwise complex conjugate in the computational basis.
pub fn conjugate_in_computational_basis(v: &StateVector) -> StateVector {
    StateVector::from_raw(v.amps.iter().map(Complex64::conj).collect())
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn fill_gaussian<R: Rng + ?Sized>(buf: &mut [Complex64], rng: &mut R) {
    buf.iter_mut().for_each(|c| *c = complex_gaussian(rng));
}

/// Haar-random unit vector: `dim` independent complex Gaussians, normalized.
pub fn sample_haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    loop {
        fill_gaussian(&mut amps, rng);
        let norm = norm_sqr(&amps).sqrt();
        if norm > DEGENERATE_NORM {
            let inv = 1.0 / norm;
            amps.iter_mut().for_each(|a| *a *= inv);
            return Ok(StateVector::from_raw(amps));
        }
    }
}

/// Gram-Schmidt on the `dim` rows of `buf` (row-major, each of length
/// `dim`), starting at row `from`; rows before `from` must already be
/// orthonormal. A row is projected a second time when the first pass
/// cancels most of its norm. Returns `false` on rank deficiency.
fn gram_schmidt_rows(buf: &mut [Complex64], dim: usize, from: usize) -> bool {
    for j in from..dim {
        let (done, rest) = buf.split_at_mut(j * dim);
        let row = &mut rest[..dim];
        let mut norm = norm_sqr(row).sqrt();
        for _ in 0..2 {
            for q in done.chunks_exact(dim) {
                let proj = inner_raw(q, row);
                for (r, qk) in row.iter_mut().zip(q) {
                    *r -= proj * qk;
                }
            }
            let projected = norm_sqr(row).sqrt();
            let settled = projected > 0.5 * norm;
            norm = projected;
            if settled {
                break;
            }
        }
        if norm < DEGENERATE_NORM {
            return false;
        }
        let inv = 1.0 / norm;
        row.iter_mut().for_each(|r| *r *= inv);
    }
    true
}

fn rows_to_basis(buf: Vec<Complex64>, dim: usize) -> OrthonormalBasis {
    OrthonormalBasis::from_raw(
        buf.chunks_exact(dim)
            .map(|row| StateVector::from_raw(row.to_vec()))
            .collect(),
    )
}

/// Haar-random orthonormal frame: Gram-Schmidt on `dim` independent complex
/// Gaussian vectors. Each output vector has a real positive overlap with its
/// pre-orthonormalization input, which makes the frame exactly Haar.
pub fn sample_haar_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<OrthonormalBasis> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
    loop {
        fill_gaussian(&mut buf, rng);
        if gram_schmidt_rows(&mut buf, dim, 0) {
            return Ok(rows_to_basis(buf, dim));
        }
    }
}

/// Completes `first` to an orthonormal frame whose remaining vectors are
/// Haar-random in the orthogonal complement. The first vector is `first`
/// exactly.
pub fn complete_basis<R: Rng + ?Sized>(
    first: &StateVector,
    rng: &mut R,
) -> Result<OrthonormalBasis> {
    let dim = first.dim();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
    loop {
        buf[..dim].copy_from_slice(first.amplitudes());
        fill_gaussian(&mut buf[dim..], rng);
        if gram_schmidt_rows(&mut buf, dim, 1) {
            return Ok(rows_to_basis(buf, dim));
        }
    }
}

/// Uniform point on `S^2`: three real Gaussians, normalized.
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        let norm = (x * x + y * y + z * z).sqrt();
        if norm > DEGENERATE_NORM {
            return BlochVector {
                x: x / norm,
                y: y / norm,
                z: z / norm,
            };
        }
    }
}

/// Pauli expectation values `(<X>, <Y>, <Z>)` of a qubit state.
pub fn bloch_from_state(v: &StateVector) -> Result<BlochVector> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: v.dim(),
        });
    }
    let (c1, c2) = (v.amps[0], v.amps[1]);
    let cross = c1.conj() * c2;
    Ok(BlochVector {
        x: 2.0 * cross.re,
        y: 2.0 * cross.im,
        z: c1.norm_sqr() - c2.norm_sqr(),
    })
}

/// Inverse of [`bloch_from_state`] with the first amplitude real and nonnegative.
pub fn state_from_bloch(b: BlochVector) -> StateVector {
    let theta = b.z.clamp(-1.0, 1.0).acos();
    let azimuth = b.y.atan2(b.x);
    let (s, c) = (theta / 2.0).sin_cos();
    StateVector::from_raw(vec![
        Complex64::new(c, 0.0),
        Complex64::from_polar(s, azimuth),
    ])
}
