//! Exact one-qubit models: Toner-Bacon, the Kochen-Specker channel model with
//! its two-bit shared-noise form, and the one-bit entanglement model derived
//! from it (plus its maximization form).
//!
//! Entanglement rounds use the singlet convention: the joint law of
//! outcomes is `P(alpha, beta) = (1 - a_alpha . b_beta) / 4`. Outcome indices are
//! zero-based, so index 0 is the `+a1`/`+b1` axis and index 1 its antipode.
//!
//! Ties (an exact zero dot product, or equal maxima) resolve to the lowest
//! index. Sign messages are encoded as index 0 for `+1` and index 1 for `-1`.

use std::f64::consts::TAU;

use rand::Rng;

use crate::hilbert::{sample_unit_sphere, BlochVector, Vec3};

/// Projective qubit measurement along `a1`; the second outcome is `-a1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMeasurement {
    pub a1: BlochVector,
}

impl QubitMeasurement {
    pub fn new(a1: BlochVector) -> Self {
        Self { a1 }
    }

    /// Outcome axis for zero-based index `k`.
    pub fn axis(&self, k: usize) -> BlochVector {
        if k == 0 {
            self.a1
        } else {
            -self.a1
        }
    }
}

/// Two independent uniform unit vectors, with `y1 = x1 + x2`, `y2 = x1 - x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoVectorNoise {
    pub x1: BlochVector,
    pub x2: BlochVector,
}

impl TwoVectorNoise {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            x1: sample_unit_sphere(rng),
            x2: sample_unit_sphere(rng),
        }
    }

    pub fn y1(&self) -> Vec3 {
        self.x1.vec3() + self.x2.vec3()
    }

    pub fn y2(&self) -> Vec3 {
        self.x1.vec3() - self.x2.vec3()
    }

    pub fn swapped(&self) -> Self {
        Self {
            x1: self.x2,
            x2: self.x1,
        }
    }

    fn x(&self, n: usize) -> BlochVector {
        if n == 0 {
            self.x1
        } else {
            self.x2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitRoundResult {
    pub alpha: usize,
    pub beta: usize,
    pub message: u8,
    pub bits_sent: u32,
}

/// Index of the axis `+/-v1` with a nonnegative projection on `w`.
#[inline]
fn closest(v1: BlochVector, w: Vec3) -> usize {
    usize::from(v1.dot(w) < 0.0)
}

/// Sign of `v . w` as a message index (`+1 -> 0`, `-1 -> 1`).
#[inline]
fn sign_index(v: BlochVector, w: Vec3) -> u8 {
    u8::from(v.dot(w) < 0.0)
}

#[inline]
fn signed(n: u8, w: Vec3) -> Vec3 {
    if n == 0 {
        w
    } else {
        -1.0 * w
    }
}

/// Alice's rule `a_alpha . w < 0` with ties going to index 0.
#[inline]
fn anti_closest(a1: BlochVector, w: Vec3) -> usize {
    usize::from(a1.dot(w) > 0.0)
}

/// Bob picks `b_beta` closest to `l1`, sends `sgn(b_beta . l2)`; Alice picks
/// `a_alpha` with `a_alpha . (l1 + n l2) < 0`.
pub fn tb_round(
    ma: &QubitMeasurement,
    mb: &QubitMeasurement,
    l1: BlochVector,
    l2: BlochVector,
) -> QubitRoundResult {
    let (beta, message) = tb_bob(mb, l1, l2);
    QubitRoundResult {
        alpha: tb_alice(ma, l1, l2, message),
        beta,
        message,
        bits_sent: 1,
    }
}

/// Bob's half of [`tb_round`]: `(beta, message)`.
pub fn tb_bob(mb: &QubitMeasurement, l1: BlochVector, l2: BlochVector) -> (usize, u8) {
    let beta = closest(mb.a1, l1.vec3());
    (beta, sign_index(mb.axis(beta), l2.vec3()))
}

pub fn tb_alice(ma: &QubitMeasurement, l1: BlochVector, l2: BlochVector, message: u8) -> usize {
    anti_closest(ma.a1, l1.vec3() + signed(message, l2.vec3()))
}

/// Draws `x1` with density `(1/pi) (b . x1) theta(b . x1)`: about `b`, the
/// polar cosine is `sqrt(u)` for uniform `u` and the azimuth is uniform.
pub fn ks_sample_channel_vector<R: Rng + ?Sized>(b: BlochVector, rng: &mut R) -> BlochVector {
    let u: f64 = rng.random();
    let cos_theta = u.sqrt();
    let sin_theta = (1.0 - u).max(0.0).sqrt();
    let azimuth = TAU * rng.random::<f64>();
    let (e1, e2) = orthonormal_complement(b.vec3());
    let (sa, ca) = azimuth.sin_cos();
    let v = cos_theta * b.vec3() + (sin_theta * ca) * e1 + (sin_theta * sa) * e2;
    BlochVector::new(v.x, v.y, v.z).unwrap_or(b)
}

/// Two unit vectors completing `n` to a right-handed orthonormal frame.
fn orthonormal_complement(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let e1 = helper - helper.dot(n) * n;
    let e1 = (1.0 / e1.norm()) * e1;
    (e1, n.cross(e1))
}

/// Alice outputs the axis closest to the received vector.
pub fn ks_channel_measure(x1: BlochVector, ma: &QubitMeasurement) -> usize {
    closest(ma.a1, x1.vec3())
}

/// Two-bit channel model: Bob sends `n_i = sgn(b . y_i)`, Alice outputs the
/// axis with `a_alpha . (n1 y1 + n2 y2) > 0`. `message` packs `n1` in bit 0
/// and `n2` in bit 1.
pub fn ks_two_bit_channel_round(
    b: BlochVector,
    noise: &TwoVectorNoise,
    ma: &QubitMeasurement,
) -> QubitRoundResult {
    let n1 = sign_index(b, noise.y1());
    let n2 = sign_index(b, noise.y2());
    let target = signed(n1, noise.y1()) + signed(n2, noise.y2());
    QubitRoundResult {
        alpha: closest(ma.a1, target),
        // Bob's outcome is not part of a channel round.
        beta: 0,
        message: n1 | (n2 << 1),
        bits_sent: 2,
    }
}

/// One-bit entanglement model: `b_beta` closest to `y1`, `n = sgn(b_beta . y2)`,
/// Alice picks `a_alpha` with `-a_alpha . (y1 + n y2) > 0`.
pub fn alt_entanglement_round(
    ma: &QubitMeasurement,
    mb: &QubitMeasurement,
    noise: &TwoVectorNoise,
) -> QubitRoundResult {
    let (beta, message) = alt_bob(mb, noise);
    QubitRoundResult {
        alpha: alt_alice(ma, noise, message),
        beta,
        message,
        bits_sent: 1,
    }
}

pub fn alt_bob(mb: &QubitMeasurement, noise: &TwoVectorNoise) -> (usize, u8) {
    let beta = closest(mb.a1, noise.y1());
    (beta, sign_index(mb.axis(beta), noise.y2()))
}

pub fn alt_alice(ma: &QubitMeasurement, noise: &TwoVectorNoise, message: u8) -> usize {
    anti_closest(ma.a1, noise.y1() + signed(message, noise.y2()))
}

/// Maximization form of [`alt_entanglement_round`]: Bob maximizes
/// `b_beta . x_n` over `(beta, n)` and sends `n`; Alice maximizes `-a_alpha . x_n`.
/// Message index 0 names `x1`, which matches the sign `+1` of the other form.
pub fn alt_synthetic_round(
    ma: &QubitMeasurement,
    mb: &QubitMeasurement,
    noise: &TwoVectorNoise,
) -> QubitRoundResult {
    let (beta, message) = alt_synthetic_bob(mb, noise);
    QubitRoundResult {
        alpha: alt_synthetic_alice(ma, noise, message),
        beta,
        message,
        bits_sent: 1,
    }
}

pub fn alt_synthetic_bob(mb: &QubitMeasurement, noise: &TwoVectorNoise) -> (usize, u8) {
    let mut best = (0, 0, f64::NEG_INFINITY);
    for n in 0..2 {
        for beta in 0..2 {
            let score = mb.axis(beta).dot(noise.x(n));
            if score > best.2 {
                best = (beta, n, score);
            }
        }
    }
    (best.0, best.1 as u8)
}

pub fn alt_synthetic_alice(ma: &QubitMeasurement, noise: &TwoVectorNoise, message: u8) -> usize {
    let x = noise.x(usize::from(message));
    usize::from(-ma.axis(1).dot(x) > -ma.axis(0).dot(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new(x, y, z).unwrap()
    }

    #[test]
    fn y_vectors_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let noise = TwoVectorNoise::sample(&mut rng);
            assert!(noise.y1().dot(noise.y2()).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_sum_recovers_noise_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let noise = TwoVectorNoise::sample(&mut rng);
            let (y1, y2) = (noise.y1(), noise.y2());
            let cases = [
                (y1 + y2, 2.0 * noise.x1.vec3()),
                (y1 - y2, 2.0 * noise.x2.vec3()),
                (-1.0 * y1 - y2, -2.0 * noise.x1.vec3()),
                (-1.0 * y1 + y2, -2.0 * noise.x2.vec3()),
            ];
            for (lhs, rhs) in cases {
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn tie_rule_prefers_lowest_index() {
        let m = QubitMeasurement::new(BlochVector::PLUS_Z);
        let equator = bv(1.0, 0.0, 0.0);
        let r = tb_round(&m, &m, equator, equator);
        assert_eq!(r.beta, 0);
        assert_eq!(r.message, 0);
        assert_eq!(r.alpha, 0);
        assert_eq!(ks_channel_measure(equator, &m), 0);
    }

    #[test]
    fn ks_samples_lie_in_hemisphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let b = bv(0.3, -0.2, 0.9);
        for _ in 0..10_000 {
            let x = ks_sample_channel_vector(b, &mut rng);
            assert!(b.dot(x) > 0.0 || b.dot(x) == 0.0);
            assert!((x.vec3().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bits_sent_per_protocol() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = QubitMeasurement::new(sample_unit_sphere(&mut rng));
        let noise = TwoVectorNoise::sample(&mut rng);
        assert_eq!(alt_entanglement_round(&m, &m, &noise).bits_sent, 1);
        assert_eq!(alt_synthetic_round(&m, &m, &noise).bits_sent, 1);
        assert_eq!(ks_two_bit_channel_round(m.a1, &noise, &m).bits_sent, 2);
        assert_eq!(tb_round(&m, &m, noise.x1, noise.x2).bits_sent, 1);
    }

    #[test]
    fn parallel_axes_never_give_equal_outcomes() {
        // Singlet: a1 = b1 implies opposite outcomes in every round.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = QubitMeasurement::new(sample_unit_sphere(&mut rng));
        for _ in 0..10_000 {
            let noise = TwoVectorNoise::sample(&mut rng);
            let r = alt_entanglement_round(&m, &m, &noise);
            assert_ne!(r.alpha, r.beta);
            let r = tb_round(&m, &m, noise.x1, noise.x2);
            assert_ne!(r.alpha, r.beta);
        }
    }
}
