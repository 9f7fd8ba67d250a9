//! Approximate `N`-dimensional protocols and the common two-party interface
//! that the Monte Carlo harness and the channel conversion drive.
//!
//! All indices are zero-based: outcome `k` is the basis vector `k` of the
//! measurement, and the message names a shared vector by position.
//!
//! Every `N`-dimensional protocol is the same maximization round over a set
//! of shared vectors `x_n`: Bob picks `(b, n)` maximizing `|<psi_b|x_n>|^2` and
//! sends `n`; Alice picks `a` maximizing `|<phi_a*|x_n>|^2`. Protocol 1 is the
//! exception: Bob's outcome comes from one shared vector `x` and the message
//! from a separate frame `Y`, and Alice scores both.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_qubit::{self, QubitMeasurement, TwoVectorNoise};
use crate::hilbert::{
    bloch_from_state, conj_overlap_raw, sample_haar_basis, sample_haar_vector, sample_unit_sphere,
    BlochVector, OrthonormalBasis, StateVector,
};

/// Shared randomness of the `N`-dimensional protocols.
#[derive(Debug, Clone, PartialEq)]
pub enum SharedNoise {
    /// One random vector and a random frame.
    P1 { x: StateVector, y: OrthonormalBasis },
    /// `N` independent random vectors.
    P2a(Vec<StateVector>),
    /// A random orthonormal frame.
    P2b(OrthonormalBasis),
}

impl SharedNoise {
    pub fn sample_p1<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let x = sample_haar_vector(dim, rng)?;
        let y = sample_haar_basis(dim, rng)?;
        Ok(Self::P1 { x, y })
    }

    pub fn sample_p2a<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Ok(Self::P2a(sample_independent(dim, dim, rng)?))
    }

    pub fn sample_p2b<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        Ok(Self::P2b(sample_haar_basis(dim, rng)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::P1 { x, .. } => x.dim(),
            Self::P2a(v) => v[0].dim(),
            Self::P2b(b) => b.dim(),
        }
    }

    /// The vector set scanned by the maximization round (`None` for P1).
    pub fn vectors(&self) -> Option<&[StateVector]> {
        match self {
            Self::P1 { .. } => None,
            Self::P2a(v) => Some(v),
            Self::P2b(b) => Some(b.vectors()),
        }
    }
}

/// `count` independent Haar vectors in dimension `dim`.
pub fn sample_independent<R: Rng + ?Sized>(
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<StateVector>> {
    (0..count).map(|_| sample_haar_vector(dim, rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundResult {
    /// Alice's outcome.
    pub a: usize,
    /// Bob's outcome.
    pub b: usize,
    pub message: usize,
    pub bits_sent: u32,
}

/// Bob's outcome and the index he sends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BobTurn {
    pub outcome: usize,
    pub message: usize,
}

/// Bits needed to encode one of `count` indices.
pub fn index_bits(count: usize) -> u32 {
    if count <= 1 {
        0
    } else {
        usize::BITS - (count - 1).leading_zeros()
    }
}

/// First index of the maximum; ties go to the lowest index.
/// Scores closer than this count as tied; ties go to the lowest index.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[inline]
fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, s) in scores.enumerate() {
        if s > best.1 + TIE_TOLERANCE {
            best = (k, s);
        }
    }
    best.0
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn wrong_noise(protocol: &'static str) -> Error {
    Error::NoiseMismatch { protocol }
}

fn p1_parts(noise: &SharedNoise) -> Result<(&StateVector, &OrthonormalBasis)> {
    match noise {
        SharedNoise::P1 { x, y } => Ok((x, y)),
        _ => Err(wrong_noise("p1")),
    }
}

pub fn protocol1_bob(mb: &OrthonormalBasis, noise: &SharedNoise) -> Result<BobTurn> {
    let (x, y) = p1_parts(noise)?;
    check_dim(mb.dim(), x.dim())?;
    check_dim(mb.dim(), y.dim())?;
    let outcome = argmax((0..mb.dim()).map(|b| mb.overlap_with(b, x.amplitudes())));
    let message = argmax(
        y.vectors()
            .iter()
            .map(|ym| mb.overlap_with(outcome, ym.amplitudes())),
    );
    Ok(BobTurn { outcome, message })
}

pub fn protocol1_alice(
    ma: &OrthonormalBasis,
    noise: &SharedNoise,
    message: usize,
) -> Result<usize> {
    let (x, y) = p1_parts(noise)?;
    check_dim(ma.dim(), x.dim())?;
    check_dim(ma.dim(), y.dim())?;
    let yn = y.vector(message).amplitudes();
    Ok(argmax(ma.vectors().iter().map(|phi| {
        let phi = phi.amplitudes();
        conj_overlap_raw(phi, x.amplitudes()) + conj_overlap_raw(phi, yn)
    })))
}

/// Protocol 1: `b` maximizes `|<psi_b|x>|^2`, the message `n` maximizes
/// `|<y_n|psi_b>|^2`, and `a` maximizes `<phi_a*|(|x><x| + |y_n><y_n|)|phi_a*>`.
pub fn protocol1_round(
    ma: &OrthonormalBasis,
    mb: &OrthonormalBasis,
    noise: &SharedNoise,
) -> Result<RoundResult> {
    check_dim(ma.dim(), mb.dim())?;
    let bob = protocol1_bob(mb, noise)?;
    let a = protocol1_alice(ma, noise, bob.message)?;
    Ok(RoundResult {
        a,
        b: bob.outcome,
        message: bob.message,
        bits_sent: index_bits(ma.dim()),
    })
}

fn check_vectors(dim: usize, vectors: &[StateVector]) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::EmptyVectorSet);
    }
    vectors.iter().try_for_each(|v| check_dim(dim, v.dim()))
}

/// Bob's half of the maximization round: joint argmax over `(b, n)` of
/// `|<psi_b|x_n>|^2`, scanning `n` in the outer loop.
pub fn generic_bob(mb: &OrthonormalBasis, vectors: &[StateVector]) -> Result<BobTurn> {
    check_vectors(mb.dim(), vectors)?;
    let mut best = (0, 0, f64::NEG_INFINITY);
    for (n, x) in vectors.iter().enumerate() {
        for b in 0..mb.dim() {
            let score = mb.overlap_with(b, x.amplitudes());
            if score > best.2 + TIE_TOLERANCE {
                best = (b, n, score);
            }
        }
    }
    Ok(BobTurn {
        outcome: best.0,
        message: best.1,
    })
}

pub fn generic_alice(
    ma: &OrthonormalBasis,
    vectors: &[StateVector],
    message: usize,
) -> Result<usize> {
    check_vectors(ma.dim(), vectors)?;
    let x = vectors
        .get(message)
        .ok_or(Error::DimensionMismatch {
            expected: vectors.len(),
            actual: message + 1,
        })?
        .amplitudes();
    Ok(argmax(
        ma.vectors()
            .iter()
            .map(|phi| conj_overlap_raw(phi.amplitudes(), x)),
    ))
}

/// The maximization round over an arbitrary non-empty set of shared vectors.
/// The message costs `ceil(log2(vectors.len()))` bits.
pub fn generic_round(
    ma: &OrthonormalBasis,
    mb: &OrthonormalBasis,
    vectors: &[StateVector],
) -> Result<RoundResult> {
    check_dim(ma.dim(), mb.dim())?;
    let bob = generic_bob(mb, vectors)?;
    let a = generic_alice(ma, vectors, bob.message)?;
    Ok(RoundResult {
        a,
        b: bob.outcome,
        message: bob.message,
        bits_sent: index_bits(vectors.len()),
    })
}

/// Protocols 2a and 2b: the maximization round over the shared vectors.
pub fn protocol2_round(
    ma: &OrthonormalBasis,
    mb: &OrthonormalBasis,
    noise: &SharedNoise,
) -> Result<RoundResult> {
    let vectors = noise.vectors().ok_or(wrong_noise("p2"))?;
    generic_round(ma, mb, vectors)
}

/// A one-way protocol split into the parties' local rules, so a caller can
/// run Bob alone (rejection in the channel conversion, conditioning in
/// sweeps) and finish the round only when needed.
///
/// Measurements are orthonormal bases for the state
/// `(1/sqrt(N)) sum_k |k>|k>`.
pub trait EntanglementProtocol: Sync {
    type Noise: Send;

    fn dim(&self) -> usize;

    /// Bits in the one-way message.
    fn bits_sent(&self) -> u32;

    fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Noise;

    fn bob(&self, mb: &OrthonormalBasis, noise: &Self::Noise) -> Result<BobTurn>;

    fn alice(&self, ma: &OrthonormalBasis, noise: &Self::Noise, message: usize) -> Result<usize>;

    fn round(
        &self,
        ma: &OrthonormalBasis,
        mb: &OrthonormalBasis,
        noise: &Self::Noise,
    ) -> Result<RoundResult> {
        let bob = self.bob(mb, noise)?;
        let a = self.alice(ma, noise, bob.message)?;
        Ok(RoundResult {
            a,
            b: bob.outcome,
            message: bob.message,
            bits_sent: self.bits_sent(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    TonerBacon,
    Alt,
    AltSynthetic,
    P1,
    P2a,
    P2b,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 6] = [
        Self::TonerBacon,
        Self::Alt,
        Self::AltSynthetic,
        Self::P1,
        Self::P2a,
        Self::P2b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::TonerBacon => "toner-bacon",
            Self::Alt => "alt",
            Self::AltSynthetic => "alt-synthetic",
            Self::P1 => "p1",
            Self::P2a => "p2a",
            Self::P2b => "p2b",
        }
    }

    /// Qubit-only models defined on Bloch vectors.
    pub fn is_qubit_model(self) -> bool {
        matches!(self, Self::TonerBacon | Self::Alt | Self::AltSynthetic)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown protocol `{s}`"))
    }
}

/// Noise consumed by [`Protocol`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolNoise {
    Lambdas(BlochVector, BlochVector),
    TwoVector(TwoVectorNoise),
    Shared(SharedNoise),
}

/// One of the named protocols at a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Protocol {
    kind: ProtocolKind,
    dim: usize,
}

impl Protocol {
    pub fn new(kind: ProtocolKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if kind.is_qubit_model() && dim != 2 {
            return Err(Error::UnsupportedDimension {
                protocol: kind.name(),
                required: 2,
                actual: dim,
            });
        }
        Ok(Self { kind, dim })
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }
}

/// Alice's Bloch axis for her first basis vector.
fn alice_axis(ma: &OrthonormalBasis) -> Result<QubitMeasurement> {
    Ok(QubitMeasurement::new(bloch_from_state(ma.vector(0))?))
}

/// Bob's singlet-frame axis. The state `(|11> + |22>)/sqrt(2)` is the singlet
/// with `i sigma_y` applied on Bob's side, which acts on his Bloch vectors as
/// `(x, y, z) -> (-x, y, -z)`.
fn bob_axis(mb: &OrthonormalBasis) -> Result<QubitMeasurement> {
    let b = bloch_from_state(mb.vector(0))?;
    Ok(QubitMeasurement::new(BlochVector {
        x: -b.x,
        y: b.y,
        z: -b.z,
    }))
}

fn message_u8(message: usize) -> Result<u8> {
    match message {
        0 | 1 => Ok(message as u8),
        _ => Err(Error::DimensionMismatch {
            expected: 2,
            actual: message + 1,
        }),
    }
}

impl EntanglementProtocol for Protocol {
    type Noise = ProtocolNoise;

    fn dim(&self) -> usize {
        self.dim
    }

    fn bits_sent(&self) -> u32 {
        index_bits(self.dim)
    }

    fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> ProtocolNoise {
        // Protocol::new validated the dimension, so sampling cannot fail.
        let dim = self.dim;
        match self.kind {
            ProtocolKind::TonerBacon => {
                let l1 = sample_unit_sphere(rng);
                ProtocolNoise::Lambdas(l1, sample_unit_sphere(rng))
            }
            ProtocolKind::Alt | ProtocolKind::AltSynthetic => {
                ProtocolNoise::TwoVector(TwoVectorNoise::sample(rng))
            }
            ProtocolKind::P1 => ProtocolNoise::Shared(SharedNoise::sample_p1(dim, rng).unwrap()),
            ProtocolKind::P2a => ProtocolNoise::Shared(SharedNoise::sample_p2a(dim, rng).unwrap()),
            ProtocolKind::P2b => ProtocolNoise::Shared(SharedNoise::sample_p2b(dim, rng).unwrap()),
        }
    }

    fn bob(&self, mb: &OrthonormalBasis, noise: &ProtocolNoise) -> Result<BobTurn> {
        check_dim(self.dim, mb.dim())?;
        let (outcome, message) = match (self.kind, noise) {
            (ProtocolKind::TonerBacon, ProtocolNoise::Lambdas(l1, l2)) => {
                let (beta, n) = exact_qubit::tb_bob(&bob_axis(mb)?, *l1, *l2);
                (beta, usize::from(n))
            }
            (ProtocolKind::Alt, ProtocolNoise::TwoVector(noise)) => {
                let (beta, n) = exact_qubit::alt_bob(&bob_axis(mb)?, noise);
                (beta, usize::from(n))
            }
            (ProtocolKind::AltSynthetic, ProtocolNoise::TwoVector(noise)) => {
                let (beta, n) = exact_qubit::alt_synthetic_bob(&bob_axis(mb)?, noise);
                (beta, usize::from(n))
            }
            (ProtocolKind::P1, ProtocolNoise::Shared(noise)) => {
                let turn = protocol1_bob(mb, noise)?;
                (turn.outcome, turn.message)
            }
            (ProtocolKind::P2a | ProtocolKind::P2b, ProtocolNoise::Shared(noise)) => {
                let turn = generic_bob(mb, noise.vectors().ok_or(wrong_noise("p2"))?)?;
                (turn.outcome, turn.message)
            }
            _ => return Err(wrong_noise(self.kind.name())),
        };
        Ok(BobTurn { outcome, message })
    }

    fn alice(&self, ma: &OrthonormalBasis, noise: &ProtocolNoise, message: usize) -> Result<usize> {
        check_dim(self.dim, ma.dim())?;
        match (self.kind, noise) {
            (ProtocolKind::TonerBacon, ProtocolNoise::Lambdas(l1, l2)) => Ok(
                exact_qubit::tb_alice(&alice_axis(ma)?, *l1, *l2, message_u8(message)?),
            ),
            (ProtocolKind::Alt, ProtocolNoise::TwoVector(noise)) => Ok(exact_qubit::alt_alice(
                &alice_axis(ma)?,
                noise,
                message_u8(message)?,
            )),
            (ProtocolKind::AltSynthetic, ProtocolNoise::TwoVector(noise)) => Ok(
                exact_qubit::alt_synthetic_alice(&alice_axis(ma)?, noise, message_u8(message)?),
            ),
            (ProtocolKind::P1, ProtocolNoise::Shared(noise)) => protocol1_alice(ma, noise, message),
            (ProtocolKind::P2a | ProtocolKind::P2b, ProtocolNoise::Shared(noise)) => {
                generic_alice(ma, noise.vectors().ok_or(wrong_noise("p2"))?, message)
            }
            _ => Err(wrong_noise(self.kind.name())),
        }
    }
}

/// The maximization round over `count` independent Haar vectors, for any
/// `count >= 1` (more vectors than the dimension costs more message bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenericProtocol {
    dim: usize,
    count: usize,
}

impl GenericProtocol {
    pub fn new(dim: usize, count: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if count == 0 {
            return Err(Error::EmptyVectorSet);
        }
        Ok(Self { dim, count })
    }
}

impl EntanglementProtocol for GenericProtocol {
    type Noise = Vec<StateVector>;

    fn dim(&self) -> usize {
        self.dim
    }

    fn bits_sent(&self) -> u32 {
        index_bits(self.count)
    }

    fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<StateVector> {
        sample_independent(self.dim, self.count, rng).unwrap()
    }

    fn bob(&self, mb: &OrthonormalBasis, noise: &Vec<StateVector>) -> Result<BobTurn> {
        generic_bob(mb, noise)
    }

    fn alice(
        &self,
        ma: &OrthonormalBasis,
        noise: &Vec<StateVector>,
        message: usize,
    ) -> Result<usize> {
        generic_alice(ma, noise, message)
    }
}
