//! Randomised checks of the pointwise multilinear and Clifford identities.

use g2kit::alg7::{change_frame, fundamental_form, hodge_star, pairing, wedge, Form, Metric, MultiIndex};
use g2kit::cl7::{act, canonical_spinor, canonical_spinor_projector, Spinor, SPINOR_DIM};
use g2kit::g2point::{metric_from_form, project2, project3, G2PointStructure};
use g2kit::linalg::{self, Mat7};
use g2kit::DIM;
use proptest::prelude::*;

const TOL: f64 = 1e-10;

fn binomial(k: usize) -> usize {
    MultiIndex::all_of_degree(k).len()
}

fn form_of_degree(k: usize) -> impl Strategy<Value = Form<f64>> {
    prop::collection::vec(-1.0..1.0f64, binomial(k)).prop_map(move |v| Form::from_dense(k, &v))
}

/// `Id + small` keeps the frame change orientation preserving.
fn near_identity() -> impl Strategy<Value = Mat7<f64>> {
    prop::collection::vec(-0.25..0.25f64, DIM * DIM)
        .prop_map(|v| std::array::from_fn(|i| std::array::from_fn(|j| v[i * DIM + j] + if i == j { 1.0 } else { 0.0 })))
}

fn metric_from(a: &Mat7<f64>) -> Metric<f64> {
    Metric::new(linalg::mat_mul(&linalg::transpose(a), a), 1).unwrap()
}

fn spinor() -> impl Strategy<Value = Spinor<f64>> {
    prop::array::uniform8(-1.0..1.0f64).prop_map(Spinor)
}

fn std_structure() -> G2PointStructure<f64> {
    G2PointStructure::new(fundamental_form()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative((a, b) in (0usize..=3, 0usize..=3)
        .prop_flat_map(|(k, l)| (form_of_degree(k), form_of_degree(l))))
    {
        let (k, l) = (a.degree(), b.degree());
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        let sign = if (k * l) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ab.approx_eq(&ba.scale(&sign), TOL));
    }

    #[test]
    fn wedge_is_associative(a in form_of_degree(1), b in form_of_degree(2), c in form_of_degree(2)) {
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert!(left.approx_eq(&right, TOL));
    }

    #[test]
    fn star_characterises_the_pairing(a in form_of_degree(3), b in form_of_degree(3), m in near_identity()) {
        let metric = metric_from(&m);
        let lhs = wedge(&a, &hodge_star(&b, &metric)).unwrap();
        let vol = Form::volume().scale(metric.sqrt_det());
        let rhs = vol.scale(&pairing(&a, &b, &metric).unwrap());
        prop_assert!(lhs.approx_eq(&rhs, TOL));
        let twice = hodge_star(&hodge_star(&a, &metric), &metric);
        prop_assert!(twice.approx_eq(&a, TOL));
    }

    #[test]
    fn frame_change_transforms_the_metric(m in near_identity(), f in -1.0..1.0f64) {
        let w = change_frame(&fundamental_form::<f64>(), &m);
        let g = metric_from_form(&w).unwrap();
        let expected = linalg::mat_mul(&linalg::transpose(&m), &m);
        prop_assert!(linalg::max_abs_diff(&linalg::values(g.matrix()), &expected) < TOL);
        let scaled = metric_from_form(&w.scale(&(3.0 * f).exp())).unwrap();
        let expected = linalg::mat_scale(&expected, &(2.0 * f).exp());
        prop_assert!(linalg::max_abs_diff(scaled.matrix(), &expected) < TOL * 10.0);
    }

    #[test]
    fn omega_contraction_identity(g in form_of_degree(1)) {
        let s = std_structure();
        let w = s.omega();
        let lhs = wedge(&s.star(&wedge(w, &g).unwrap()), w).unwrap();
        prop_assert!(lhs.approx_eq(&s.star(&g).scale(&4.0), TOL));
    }

    #[test]
    fn projections_are_idempotent_and_complete(a in form_of_degree(2), c in form_of_degree(3)) {
        let s = std_structure();
        let (a7, a14) = project2(&a, &s).unwrap();
        prop_assert!((a7.clone() + a14.clone()).approx_eq(&a, TOL));
        prop_assert!(project2(&a7, &s).unwrap().0.approx_eq(&a7, TOL));
        prop_assert!(pairing(&a7, &a14, s.metric()).unwrap().abs() < TOL);
        let (c1, c7, c27) = project3(&c, &s).unwrap();
        prop_assert!((c1.clone() + c7.clone() + c27.clone()).approx_eq(&c, TOL));
        let (_, again7, _) = project3(&c7, &s).unwrap();
        prop_assert!(again7.approx_eq(&c7, TOL));
        prop_assert!(pairing(&c1, &c27, s.metric()).unwrap().abs() < TOL);
        prop_assert!(pairing(&c7, &c27, s.metric()).unwrap().abs() < TOL);
    }

    #[test]
    fn clifford_action_adjoint_sign(a in (1usize..=3).prop_flat_map(form_of_degree), psi in spinor(), phi in spinor()) {
        let k = a.degree();
        let sign = if (k * (k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = act(&a, &psi).inner(&phi);
        let rhs = psi.inner(&act(&a, &phi)) * sign;
        prop_assert!((lhs - rhs).abs() < TOL);
    }

    #[test]
    fn canonical_spinor_identities(g in form_of_degree(1), alpha in form_of_degree(2)) {
        let s = std_structure();
        let psi = s.canonical_spinor().unwrap();
        let lhs = act(&s.star(&wedge(&g, s.omega()).unwrap()), &psi);
        prop_assert!(lhs.sub(&act(&g, &psi).scale(&-4.0)).norm() < TOL);
        let (_, a14) = project2(&alpha, &s).unwrap();
        prop_assert!(act(&a14, &psi).norm() < TOL);
    }

    #[test]
    fn rotated_forms_keep_the_spinor_eigenvalue(m in near_identity()) {
        // orthonormalise so the rotated form is again written in an orthonormal frame
        let (_, inv_sqrt) = linalg::sqrt_and_inv_sqrt(&linalg::mat_mul(&linalg::transpose(&m), &m)).unwrap();
        let rot = linalg::mat_mul(&m, &inv_sqrt);
        let w = change_frame(&fundamental_form::<f64>(), &rot);
        let psi = canonical_spinor(&w).unwrap();
        prop_assert!(act(&w, &psi).sub(&psi.scale(&-7.0)).norm() < TOL);
        let proj = canonical_spinor_projector(&w).unwrap();
        prop_assert!(proj.sub(&psi).norm() < 1e-8);
        prop_assert!((psi.norm() - 1.0).abs() < TOL);
        prop_assert_eq!(psi.0.len(), SPINOR_DIM);
    }
}

/// Traces of the projectors: 7 and 14 on Λ², 1, 7 and 27 on Λ³.
#[test]
fn projector_traces() {
    let s = std_structure();
    let mut t2 = [0.0; 2];
    for &mi in MultiIndex::all_of_degree(2) {
        let (a7, a14) = project2(&Form::monomial(mi, 1.0), &s).unwrap();
        t2[0] += a7.get(mi);
        t2[1] += a14.get(mi);
    }
    let mut t3 = [0.0; 3];
    for &mi in MultiIndex::all_of_degree(3) {
        let (c1, c7, c27) = project3(&Form::monomial(mi, 1.0), &s).unwrap();
        t3[0] += c1.get(mi);
        t3[1] += c7.get(mi);
        t3[2] += c27.get(mi);
    }
    for (got, want) in t2.iter().zip([7.0, 14.0]).chain(t3.iter().zip([1.0, 7.0, 27.0])) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}
