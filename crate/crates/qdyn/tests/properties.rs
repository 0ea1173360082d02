use nalgebra::Vector3;
use proptest::prelude::*;
use qdyn::channels::{apply, choi_of, is_completely_positive, kraus_from_choi};
use qdyn::entanglement::{concurrence, ppt_verdict};
use qdyn::lindblad::{evolve, propagator};
use qdyn::linalg::{hermiticity_defect, min_eigenvalue};
use qdyn::states::{
    bloch_to_density, density_to_bloch, partial_trace, tensor, von_neumann_entropy, Subsystem,
};
use qdyn::{random, BlochVector, CMatrix, Complex64, DensityMatrix, LindbladGenerator, LindbladGenerator32, QuantumChannel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cmax(m: &CMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |s, z| s.max(z.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_inverts_tensor(seed in any::<u64>(), na in 2usize..4, nb in 2usize..4) {
        let mut r = rng(seed);
        let a = DensityMatrix::new(random::density(na, &mut r)).unwrap();
        let b = DensityMatrix::new(random::density(nb, &mut r)).unwrap();
        let ab = tensor(&a, &b);
        prop_assert!(cmax(&(partial_trace(&ab, (na, nb), Subsystem::A).unwrap().into_matrix() - a.matrix())) < 1e-12);
        prop_assert!(cmax(&(partial_trace(&ab, (na, nb), Subsystem::B).unwrap().into_matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn entropy_is_bounded(seed in any::<u64>(), n in 2usize..5) {
        let rho = DensityMatrix::new(random::density(n, &mut rng(seed))).unwrap();
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -1e-12 && s <= (n as f64).ln() + 1e-12);
    }

    #[test]
    fn bloch_round_trip(x in -0.57f64..0.57, y in -0.57f64..0.57, z in -0.57f64..0.57) {
        let b = BlochVector::new(Vector3::new(x, y, z)).unwrap();
        let back = density_to_bloch(&bloch_to_density(&b)).unwrap();
        prop_assert!((back.vector() - b.vector()).amax() < 1e-14);
        prop_assert!((b.determinant() - (1.0 - b.vector().norm_squared()) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn concurrence_is_between_zero_and_one(seed in any::<u64>()) {
        let rho = DensityMatrix::new(random::density(4, &mut rng(seed))).unwrap();
        let c = concurrence(&rho).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        // for two qubits PPT and zero concurrence coincide
        let ppt = ppt_verdict(&rho, (2, 2)).unwrap().min_pt_eigenvalue >= -1e-10;
        prop_assert!(ppt == (c < 1e-8) || c.abs() < 1e-6);
    }

    #[test]
    fn kraus_choi_round_trip(seed in any::<u64>(), n in 2usize..4, k in 1usize..4) {
        let mut r = rng(seed);
        // Stinespring: the columns of a random isometry give Kraus operators
        let u = random::unitary::<f64, _>(n * k, &mut r);
        let ops: Vec<CMatrix<f64>> = (0..k).map(|j| u.view((j * n, 0), (n, n)).into_owned()).collect();
        let ch = QuantumChannel::from_kraus(ops).unwrap();
        prop_assert!(ch.trace_preserving());
        prop_assert!(is_completely_positive(&ch).completely_positive);
        let again = QuantumChannel::from_kraus(kraus_from_choi(&choi_of(&ch)).unwrap()).unwrap();
        prop_assert!(cmax(&(choi_of(&again) - choi_of(&ch))) < 1e-10);
        let rho = random::density::<f64, _>(n, &mut r);
        let out = apply(&ch, &rho).unwrap();
        prop_assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(min_eigenvalue(&out) > -1e-12);
    }

    #[test]
    fn cp_generator_keeps_states(seed in any::<u64>(), n in 2usize..4, t in 0.0f64..3.0) {
        let mut r = rng(seed);
        let c = random::psd::<f64, _>(n * n - 1, 2, &mut r) * Complex64::new(0.3, 0.0);
        let g = LindbladGenerator::with_gell_mann(random::hermitian(n, &mut r), c).unwrap();
        let rho = DensityMatrix::new(random::density(n, &mut r)).unwrap();
        let out = evolve(&g, &rho, t).unwrap();
        prop_assert!(hermiticity_defect(&out) < 1e-12);
        prop_assert!(min_eigenvalue(&out) > -1e-10);
    }
}

#[test]
fn single_precision_generator() {
    let mut r = rng(7);
    let c = random::psd::<f32, _>(3, 3, &mut r) * num_complex::Complex32::new(0.2, 0.0);
    let g = LindbladGenerator32::with_gell_mann(random::hermitian(2, &mut r), c).unwrap();
    let p = propagator(&g, 0.5f32).unwrap();
    let pp = propagator(&g, 1.0f32).unwrap();
    let d = (&p * &p - pp).iter().fold(0.0f32, |s, z| s.max(z.norm()));
    assert!(d < 1e-4, "semigroup defect {d}");
}
