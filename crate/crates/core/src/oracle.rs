//! Born-rule predictions for `(1/sqrt(N)) sum_k |k>|k>` and the one-parameter
//! measurement family used to probe the protocols.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    conj_overlap_raw, conjugate_in_computational_basis, OrthonormalBasis, StateVector,
};

/// `p[a][b]`, row `a` for Alice's outcome and column `b` for Bob's.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointProbabilityTable {
    dim: usize,
    p: Vec<f64>,
}

impl JointProbabilityTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.dim + b]
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        self.p
            .chunks_exact(self.dim)
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|b| (0..self.dim).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// `p[a][b] = (1/N) |sum_k <phi_a|k><psi_b|k>|^2 = (1/N) |<phi_a*|psi_b>|^2`.
pub fn born_joint(ma: &OrthonormalBasis, mb: &OrthonormalBasis) -> Result<JointProbabilityTable> {
    let dim = ma.dim();
    if mb.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: mb.dim(),
        });
    }
    let inv = 1.0 / dim as f64;
    let mut p = Vec::with_capacity(dim * dim);
    for phi in ma.vectors() {
        for psi in mb.vectors() {
            p.push(inv * conj_overlap_raw(phi.amplitudes(), psi.amplitudes()));
        }
    }
    Ok(JointProbabilityTable { dim, p })
}

/// Single-party Born probabilities `|<phi_a*|psi>|^2` for Alice measuring the
/// conditional state left by Bob finding `psi`.
pub fn born_conditional(ma: &OrthonormalBasis, psi: &StateVector) -> Result<Vec<f64>> {
    if ma.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: ma.dim(),
            actual: psi.dim(),
        });
    }
    Ok(ma
        .vectors()
        .iter()
        .map(|phi| conj_overlap_raw(phi.amplitudes(), psi.amplitudes()))
        .collect())
}

/// Alice's basis rotated by `phi` inside the span of Bob's first two
/// conditional states. With `psi*` the computational-basis conjugate,
/// `phi_1 = cos(phi) psi_1* - sin(phi) psi_2*`, `phi_2 = sin(phi) psi_1* + cos(phi) psi_2*`
/// and `phi_k = psi_k*` otherwise, so `P(1, 1) = cos^2(phi) / N` for every
/// `mb`. For real `mb` this is the rotation of `mb` itself.
pub fn measurement_family(mb: &OrthonormalBasis, phi: f64) -> Result<OrthonormalBasis> {
    let dim = mb.dim();
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    let (s, c) = phi.sin_cos();
    let combine = |u: f64, v: f64| -> StateVector {
        let amps = mb
            .vector(0)
            .amplitudes()
            .iter()
            .zip(mb.vector(1).amplitudes())
            .map(|(p1, p2): (&Complex64, &Complex64)| p1.conj() * u + p2.conj() * v)
            .collect();
        StateVector::from_raw(amps)
    };
    let mut vectors = Vec::with_capacity(dim);
    vectors.push(combine(c, -s));
    vectors.push(combine(s, c));
    vectors.extend(
        mb.vectors()[2..]
            .iter()
            .map(conjugate_in_computational_basis),
    );
    Ok(OrthonormalBasis::from_raw(vectors))
}

/// Target conditional `P(a = 1 | b = 1, phi) = cos^2(phi)` on the family.
pub fn quantum_conditional(phi: f64) -> f64 {
    let c = phi.cos();
    c * c
}
