use dmp_core::apartment::{support, ApartmentPoint};
use dmp_core::finite_types::{build_character, fork_identity, hom_dim, FiniteModule, GF};
use dmp_core::graded::GradedElement;
use dmp_core::rational::{q, qi};
use dmp_core::refine::DMPPair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_dual(x: &ApartmentPoint, s: dmp_core::rational::Q, p: u32) -> Vec<GradedElement> {
    let dim = support(x, -s).dim();
    (0..(p as u64).pow(dim as u32))
        .map(|mut idx| {
            let v: Vec<u32> = (0..dim)
                .map(|_| {
                    let d = (idx % p as u64) as u32;
                    idx /= p as u64;
                    d
                })
                .collect();
            GradedElement::from_vector(x, -s, p, &v)
        })
        .collect()
}

#[test]
fn extension_of_scalars_preserves_hom_dims() {
    let small = GF::new(2, 4).unwrap();
    let big = GF::new(2, 8).unwrap();
    let table = small.embedding_into(&big).unwrap();
    let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
    let s = q(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = FiniteModule::random(&x, s, 5, &small, 9, &mut rng).unwrap();
    let mb = m.extend_to(&big).unwrap();
    let z = small.root_of_unity(5).unwrap();
    for phi in all_dual(&x, s, 5) {
        let a = hom_dim(&m, &build_character(&x, s, &phi, z, &small).unwrap()).unwrap();
        let b = hom_dim(&mb, &build_character(&x, s, &phi, table[z as usize], &big).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn galois_twist_scales_the_character() {
    let k = GF::new(2, 4).unwrap();
    let z = k.root_of_unity(5).unwrap();
    let o = ApartmentPoint::origin(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = FiniteModule::random(&o, qi(1), 5, &k, 14, &mut rng).unwrap();
    for phi in all_dual(&o, qi(1), 5) {
        let doubled: Vec<(usize, usize, u32)> = phi.coeffs.iter().map(|&(i, j, c)| (i, j, 2 * c % 5)).collect();
        let phi2 = GradedElement::new(&o, qi(-1), 5, &doubled).unwrap();
        let twisted = hom_dim(&m, &build_character(&o, qi(1), &phi, k.pow(z, 2), &k).unwrap()).unwrap();
        let scaled = hom_dim(&m, &build_character(&o, qi(1), &phi2, z, &k).unwrap()).unwrap();
        assert_eq!(twisted, scaled);
    }
}

#[test]
fn delta_module_detects_its_character() {
    let k = GF::new(3, 4).unwrap();
    let z = k.root_of_unity(5).unwrap();
    let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
    let chi = GradedElement::new(&x, q(-1, 2), 5, &[(0, 1, 2), (1, 0, 4)]).unwrap();
    let m = FiniteModule::delta(&x, q(1, 2), &chi, &k).unwrap();
    for phi in all_dual(&x, q(1, 2), 5) {
        let h = hom_dim(&m, &build_character(&x, q(1, 2), &phi, z, &k).unwrap()).unwrap();
        assert_eq!(h, usize::from(phi == chi));
    }
}

#[test]
fn hyperspecial_fork_identity_for_regular_and_trivial() {
    let k = GF::new(2, 4).unwrap();
    let y = ApartmentPoint::new(vec![q(1, 4), qi(0)]);
    let coarse = DMPPair::new(qi(1), &y, GradedElement::zero(&y, qi(-1), 5)).unwrap();
    let o = ApartmentPoint::origin(2);
    let reg = FiniteModule::regular(&o, qi(1), 5, &k).unwrap();
    let r = fork_identity(&reg, &coarse, &o, qi(1)).unwrap();
    // one eigenvector per extension; all five extensions are nilpotent
    assert_eq!((r.restricted, r.extension_sum, r.degenerate_sum, r.extensions), (5, 5, 5, 5));
    let triv = FiniteModule::trivial(&o, qi(1), 5, &k).unwrap();
    let r = fork_identity(&triv, &coarse, &o, qi(1)).unwrap();
    assert_eq!((r.restricted, r.extension_sum), (1, 1));
}

#[test]
fn modules_serialize() {
    let k = GF::new(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = FiniteModule::random(&ApartmentPoint::origin(2), qi(1), 5, &k, 3, &mut rng).unwrap();
    let text = serde_json::to_string(&m).unwrap();
    let back: FiniteModule = serde_json::from_str(&text).unwrap();
    assert_eq!(back.generators, m.generators);
    assert_eq!(back.eigen, m.eigen);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let k = GF::new(2, 4).unwrap();
    let o = ApartmentPoint::origin(2);
    let m = FiniteModule::trivial(&o, qi(1), 5, &k).unwrap();
    let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
    let phi = GradedElement::zero(&x, q(-1, 2), 5);
    let psi = build_character(&x, q(1, 2), &phi, k.root_of_unity(5).unwrap(), &k).unwrap();
    assert!(hom_dim(&m, &psi).is_err());
    assert!(GF::new(4, 1).is_err());
    // 7 does not divide 2^4 - 1
    assert!(k.root_of_unity(7).is_err());
}
