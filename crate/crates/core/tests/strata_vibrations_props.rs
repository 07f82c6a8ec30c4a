mod common;

use common::{rel, rng};
use molshape::equilibria;
use molshape::strata::{align_xy, classify_stratum_xy, mib_x2, mib_xy};
use molshape::symmetry::{detect_point_group, DEFAULT_TOLERANCE};
use molshape::vibrations::{diatomic_frequency, normal_modes, DiatomicInput};
use molshape::{
    apply_group_element, Configuration, GroupElement, ModelCoefficients, MoleculeSpec, OrthogonalMatrix3,
    PotentialModel, Species, SpeciesPermutation, UnitSystem, Vec3,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn random_vector(r: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    ) * scale
}

fn rotate(h: &OrthogonalMatrix3, c: &Configuration) -> Configuration {
    Configuration::new(c.positions().iter().map(|p| h.apply(p)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn xy_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)]).unwrap();
        let m = mib_xy(&c).unwrap();
        prop_assert!(m.satisfies_schwartz(1e-12));
        let h = OrthogonalMatrix3::random(&mut r);
        let gc = rotate(&h, &c);
        let mg = mib_xy(&gc).unwrap();
        prop_assert!(m.max_deviation(&mg) <= 1e-10 * m.theta1.max(m.theta2).max(1.0));

        // a configuration rebuilt from the orbit parameters alone, in an
        // unrelated frame, has the same invariants and is reachable by an
        // orthogonal map
        let a = m.theta1.sqrt();
        let b = m.theta2.sqrt();
        let cos = (m.theta3 / (a * b)).clamp(-1.0, 1.0);
        let u = random_vector(&mut r, 1.0).normalize();
        let mut v = random_vector(&mut r, 1.0);
        v = (v - u * u.dot(&v)).normalize();
        let other = Configuration::new(vec![u * a, (u * cos + v * (1.0 - cos * cos).sqrt()) * b]).unwrap();
        let mo = mib_xy(&other).unwrap();
        prop_assert!(m.max_deviation(&mo) <= 1e-10 * m.theta1.max(m.theta2).max(1.0));
        let g = align_xy(&c, &other).unwrap();
        prop_assert!((rotate(&g, &c).stacked() - other.stacked()).norm() <= 1e-6);
        prop_assert_eq!(classify_stratum_xy(&c, 1e-9).unwrap(), classify_stratum_xy(&other, 1e-9).unwrap());
    }

    #[test]
    fn x2_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = MoleculeSpec::new(vec![Species::new("X", 1.0, 1.0, 2).unwrap()]).unwrap();
        let c = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)]).unwrap();
        let m = mib_x2(&c).unwrap();
        prop_assert!(m.theta1 >= 0.0 && m.theta3 >= 0.0);
        prop_assert!(m.theta2 * m.theta2 <= m.theta3 * (1.0 + 1e-12));
        prop_assert!(4.0 * m.theta3 <= m.theta1 * m.theta1 * (1.0 + 1e-12));
        let g = GroupElement::random(&spec, &mut r);
        let mg = mib_x2(&apply_group_element(&g, &c).unwrap()).unwrap();
        prop_assert!(m.max_deviation(&mg) <= 1e-10 * m.theta1.max(1.0));
        let swap = GroupElement::new(SpeciesPermutation::from_map(&spec, vec![1, 0]).unwrap(), OrthogonalMatrix3::identity());
        let ms = mib_x2(&apply_group_element(&swap, &c).unwrap()).unwrap();
        prop_assert_eq!(m, ms);
    }

    #[test]
    fn distinct_invariants_mean_distinct_orbits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)]).unwrap();
        let d = Configuration::new(vec![random_vector(&mut r, 2.0), random_vector(&mut r, 2.0)]).unwrap();
        let (mc, md) = (mib_xy(&c).unwrap(), mib_xy(&d).unwrap());
        if mc.max_deviation(&md) > 1e-6 {
            // no orthogonal map can carry one onto the other, in particular
            // not the frame alignment
            let g = align_xy(&c, &d).unwrap();
            prop_assert!((rotate(&g, &c).stacked() - d.stacked()).norm() > 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn diatomic_pipeline_matches_formula(
        q1 in 0.3f64..4.0, q2 in 0.3f64..4.0, m1 in 0.5f64..50.0, m2 in 0.5f64..50.0, a in 0.1f64..4.0,
    ) {
        let units = UnitSystem::reduced();
        let spec = MoleculeSpec::new(vec![Species::new("X", q1, m1, 1).unwrap(), Species::new("Y", q2, m2, 1).unwrap()]).unwrap();
        let model = PotentialModel::new(spec, ModelCoefficients::new().with("X", "Y", a), units).unwrap();
        let rho = equilibria::diatomic_bond_length(q1, q2, a, &units).unwrap();
        let c = Configuration::from_arrays(&[[0.0; 3], [0.0, 0.0, rho]]).unwrap().centered(model.spec());
        let report = normal_modes(&model, &c, None, 1e-7).unwrap();
        prop_assert_eq!(report.frequencies.len(), 1);
        let w = diatomic_frequency(&DiatomicInput { q1, q2, m1, m2, bond_length: rho }, &units).unwrap();
        prop_assert!(rel(report.frequencies[0], w) <= 1e-9, "{} vs {}", report.frequencies[0], w);
    }
}

#[test]
fn modes_avoid_rigid_motions() {
    let red = UnitSystem::reduced();
    let spec_masses = [1.0, 7.0];
    let spec = MoleculeSpec::new(vec![
        Species::new("X", 2.0, spec_masses[0], 1).unwrap(),
        Species::new("Y", 1.0, spec_masses[1], 3).unwrap(),
    ])
    .unwrap();
    let (q, big_q, a3, c3) = (2.0, 1.0, 1.0, 0.5);
    let model = PotentialModel::new(
        spec.clone(),
        ModelCoefficients::new().with("X", "Y", a3).with("Y", "Y", c3),
        red,
    )
    .unwrap();
    let c = equilibria::xy3_pyramidal_geometry(q, big_q, a3, c3, &red)
        .unwrap()
        .configuration()
        .unwrap()
        .centered(&spec);
    let g = detect_point_group(&spec, &c, DEFAULT_TOLERANCE).unwrap();
    assert_eq!(g.name, "C3v");
    let report = normal_modes(&model, &c, Some(&g), 1e-7).unwrap();
    assert_eq!(report.frequencies.len(), 6);
    assert_eq!(report.zero_modes, 6);

    // mass-weighted rigid motions: sqrt(M) times translations and rotations
    let n = spec.n_nuclei();
    let mut rigid = DMatrix::zeros(3 * n, 6);
    for j in 0..n {
        let s = spec.mass(j).sqrt();
        let p = c.positions()[j];
        for k in 0..3 {
            rigid[(3 * j + k, k)] = s;
            let e = Vec3::ith(k, 1.0);
            let rot = e.cross(&p) * s;
            for i in 0..3 {
                rigid[(3 * j + i, 3 + k)] = rot[i];
            }
        }
    }
    let q_basis = rigid.qr().q();
    for mode in &report.modes {
        let v = nalgebra::DVector::from_vec(mode.clone());
        assert!((q_basis.transpose() * &v).norm() <= 1e-9);
    }
    for (l, f) in report.labels.iter().zip(&report.frequencies) {
        if l == "E" {
            let partner = report
                .labels
                .iter()
                .zip(&report.frequencies)
                .filter(|(l2, f2)| *l2 == "E" && rel(**f2, *f) <= 1e-8)
                .count();
            assert!(partner >= 2);
        }
    }
    let v = DMatrix::from_fn(3 * n, report.modes.len(), |i, j| report.modes[j][i]);
    assert!((v.transpose() * &v - DMatrix::identity(v.ncols(), v.ncols())).norm() < 1e-10);
}
