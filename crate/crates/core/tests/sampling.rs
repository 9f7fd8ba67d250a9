mod common;

use common::{ks_one_sample_passes, ks_two_sample_passes, mean_se};
use ebitsim_core::hilbert::{
    sample_haar_basis, sample_haar_vector, sample_unit_sphere, OrthonormalBasis,
};
use ebitsim_core::StateVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn first_weight(v: &StateVector) -> f64 {
    v.amplitudes()[0].norm_sqr()
}

#[test]
fn haar_vector_first_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let w: Vec<f64> = (0..1_000_000)
        .map(|_| first_weight(&sample_haar_vector(8, &mut rng).unwrap()))
        .collect();
    let (mean, se) = mean_se(&w);
    assert!((mean - 0.125).abs() < 3.0 * se, "mean {mean} se {se}");
}

#[test]
fn haar_qubit_frame_marginal_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let from_basis: Vec<f64> = (0..1_000_000)
        .map(|_| first_weight(sample_haar_basis(2, &mut rng).unwrap().vector(0)))
        .collect();
    let from_vector: Vec<f64> = (0..100_000)
        .map(|_| first_weight(&sample_haar_vector(2, &mut rng).unwrap()))
        .collect();
    assert!(ks_two_sample_passes(
        from_basis[..100_000].to_vec(),
        from_vector.clone()
    ));
    assert!(ks_one_sample_passes(from_basis, |x| x.clamp(0.0, 1.0)));
    assert!(ks_one_sample_passes(from_vector, |x| x.clamp(0.0, 1.0)));
}

#[test]
fn sphere_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let z: Vec<f64> = (0..1_000_000)
        .map(|_| sample_unit_sphere(&mut rng).z)
        .collect();
    let (mean, se) = mean_se(&z);
    assert!(mean.abs() < 3.0 * se, "mean {mean}");
    let z2: Vec<f64> = z.iter().map(|z| z * z).collect();
    let (mean2, se2) = mean_se(&z2);
    assert!((mean2 - 1.0 / 3.0).abs() < 3.0 * se2, "mean z^2 {mean2}");
}

#[test]
fn haar_vectors_are_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let frame = sample_haar_basis(4, &mut rng).unwrap();
    let n = 100_000;
    let plain: Vec<f64> = (0..n)
        .map(|_| first_weight(&sample_haar_vector(4, &mut rng).unwrap()))
        .collect();
    // First component of U x, with U's columns the frame vectors.
    let rotated: Vec<f64> = (0..n)
        .map(|_| {
            let v = sample_haar_vector(4, &mut rng).unwrap();
            let amp: Complex64 = frame
                .vectors()
                .iter()
                .zip(v.amplitudes())
                .map(|(col, c)| col.amplitudes()[0] * c)
                .sum();
            amp.norm_sqr()
        })
        .collect();
    assert!(ks_two_sample_passes(plain, rotated));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samplers_satisfy_invariants(seed in any::<u64>(), dim in 2usize..17) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = sample_haar_vector(dim, &mut rng).unwrap();
        let norm: f64 = v.amplitudes().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let basis = sample_haar_basis(dim, &mut rng).unwrap();
        prop_assert!(OrthonormalBasis::new(basis.clone().into_vectors()).is_ok());
        let b = sample_unit_sphere(&mut rng);
        prop_assert!((b.x * b.x + b.y * b.y + b.z * b.z - 1.0).abs() < 1e-12);

        let mut again = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(&sample_haar_vector(dim, &mut again).unwrap(), &v);
        prop_assert_eq!(&sample_haar_basis(dim, &mut again).unwrap(), &basis);
    }
}
