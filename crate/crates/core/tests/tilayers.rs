use cylwave_core::cylfun::CylKind;
use cylwave_core::elastodyn::{aluminium, ElasticSystem, RadialProfile, WaveContext};
use cylwave_core::impedance::{conditional_from_twopoint, integrate_impedance, twopoint_from_matricant};
use cylwave_core::matricant::{matricant_global, Scheme};
use cylwave_core::numkernel::{hermitian_residual, rel_max_diff};
use cylwave_core::tilayers::*;
use cylwave_core::Error;
use proptest::prelude::*;

fn material() -> impl Strategy<Value = TiMaterial> {
    (0.8f64..3.0, 2.0f64..6.0, 0.2f64..0.8, 0.1f64..0.6, 2.0f64..6.0, 0.5f64..2.0).prop_filter_map(
        "positive definite",
        |(rho, c11, c12f, c13f, c33, c44)| {
            let m = TiMaterial { rho, c11, c12: c12f * c11, c13: c13f * c11.min(c33), c33, c44 };
            m.stiffness().ok().map(|_| m)
        },
    )
}

fn real_wavenumbers(m: &TiMaterial, omega: f64, kz: f64) -> bool {
    let (a, b, c, _, _) = radial_wavenumbers_squared(m, omega, kz);
    [a, b, c].iter().all(|k| k.im.abs() < 1e-12 * k.norm() && k.re > 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lossless_twopoints_are_hermitian(
        m1 in material(), m2 in material(),
        omega in 1.0f64..8.0, n in 0u32..5, kzf in 0.0f64..0.25,
        r0 in 0.2f64..0.5, t1 in 0.1f64..0.4, t2 in 0.1f64..0.4,
    ) {
        let kz = kzf * omega;
        prop_assume!(real_wavenumbers(&m1, omega, kz) && real_wavenumbers(&m2, omega, kz));
        let ctx = WaveContext::new(omega, n, kz).unwrap();
        let a = LayerTI::new(r0, r0 + t1, m1).unwrap();
        let b = LayerTI::new(r0 + t1, r0 + t1 + t2, m2).unwrap();
        let (Ok(za), Ok(zb)) = (layer_twopoint(&a, &ctx), layer_twopoint(&b, &ctx)) else {
            return Ok(());
        };
        prop_assert!(za.hermitian_residual() <= 1e-9 * za.z.norm_max(), "{}", za.hermitian_residual());
        let Ok(zj) = join_twopoint(&za, &zb) else { return Ok(()) };
        prop_assert!(zj.hermitian_residual() <= 1e-9 * zj.z.norm_max());
        let zg = global_twopoint(&[a, b], &ctx).unwrap();
        prop_assert!(rel_max_diff(&zg.z, &zj.z) < 1e-12);
    }

    #[test]
    fn vieta_relations(m in material(), omega in 0.5f64..10.0, kz in 0.1f64..4.0) {
        let w = ti_wavenumbers(&m, omega, kz).unwrap();
        let (s, p) = (w.k1 * w.k1 + w.k2 * w.k2, w.k1 * w.k1 * (w.k2 * w.k2));
        let den = 2.0 * m.c11 * m.c44;
        prop_assert!((s - 2.0 * w.a_aux / den).norm() < 1e-10 * (w.a_aux / den).norm().max(1.0));
        prop_assert!((p - w.b_aux / (den * den)).norm() < 1e-10 * (w.b_aux / (den * den)).norm().max(1.0));
    }
}

fn al() -> TiMaterial {
    TiMaterial::from_material(&aluminium()).unwrap()
}

#[test]
fn split_layers_fold_back() {
    let layer = LayerTI::new(0.5, 1.0, al()).unwrap();
    for (ka, n, kz) in [(5.0, 0, 0.0), (5.0, 2, 0.0), (3.0, 1, 0.7)] {
        let ctx = WaveContext::new(ka, n, kz).unwrap();
        let single = layer_twopoint(&layer, &ctx).unwrap();
        for parts in [2, 4, 8, 64] {
            let folded = global_twopoint(&layer.split(parts), &ctx).unwrap();
            let err = rel_max_diff(&folded.z, &single.z);
            assert!(err < 1e-8, "ka={ka} n={n} parts={parts}: {err}");
        }
    }
}

#[test]
fn basis_choice_does_not_matter() {
    let layer = LayerTI::new(0.4, 0.9, al()).unwrap();
    let ctx = WaveContext::new(6.0, 3, 0.5).unwrap();
    let a = layer_twopoint_with_basis(&layer, &ctx, (CylKind::J, CylKind::H1)).unwrap();
    let b = layer_twopoint_with_basis(&layer, &ctx, (CylKind::J, CylKind::Y)).unwrap();
    let c = layer_twopoint_with_basis(&layer, &ctx, (CylKind::H1, CylKind::H2)).unwrap();
    assert!(rel_max_diff(&a.z, &b.z) < 1e-10);
    assert!(rel_max_diff(&a.z, &c.z) < 1e-10);
}

#[test]
fn recursion_matches_global_matricant() {
    let layer = LayerTI::new(0.5, 1.0, al()).unwrap();
    let p = RadialProfile::uniform(0.5, 1.0, aluminium()).unwrap();
    for (ka, n, kz) in [(5.0, 1, 0.0), (4.0, 2, 1.1)] {
        let ctx = WaveContext::new(ka, n, kz).unwrap();
        let zp = layer_twopoint(&layer, &ctx).unwrap();
        let m = matricant_global(&ElasticSystem::new(&p, ctx), 0.5, 1.0, 2000, Scheme::Exp2a).unwrap();
        let zm = twopoint_from_matricant(&m.matricant).unwrap();
        assert!(rel_max_diff(&zm.z, &zp.z) < 1e-7, "{}", rel_max_diff(&zm.z, &zp.z));
    }
}

#[test]
fn oblique_closed_form_matches_integration() {
    let p = RadialProfile::uniform(0.5, 1.0, aluminium()).unwrap();
    let ctx = WaveContext::new(6.0, 2, 1.5).unwrap();
    let z0 = ti_conditional_impedance(CylKind::J, &al(), &ctx, 0.5).unwrap();
    let z = integrate_impedance(&ElasticSystem::new(&p, ctx), &z0, 0.5, 1.0, 400, Scheme::Mg4).unwrap().z;
    let exact = ti_conditional_impedance(CylKind::J, &al(), &ctx, 1.0).unwrap();
    assert!(rel_max_diff(&z.z, &exact.z) < 1e-8);
    assert!(hermitian_residual(&exact.z) < 1e-12 * exact.z.norm_max());
    // the recursion and the inner solid core agree as well
    let zr = conditional_from_twopoint(&layer_twopoint(&LayerTI::new(0.5, 1.0, al()).unwrap(), &ctx).unwrap(), &z0).unwrap();
    assert!(rel_max_diff(&zr.z, &exact.z) < 1e-9);
}

#[test]
fn in_plane_reduction_matches_full_block() {
    let ctx3 = WaveContext::new(5.0, 2, 0.0).unwrap();
    let ctx2 = WaveContext::with_dim(5.0, 2, 0.0, 2).unwrap();
    let layer = LayerTI::new(0.5, 1.0, al()).unwrap();
    let z3 = layer_twopoint(&layer, &ctx3).unwrap();
    let z2 = layer_twopoint(&layer, &ctx2).unwrap();
    assert_eq!(z2.z, z3.z.select(ctx2.state_indices()));
    // shear horizontal block is decoupled
    assert_eq!(z3.z[(0, 2)].norm(), 0.0);
}

#[test]
fn errors() {
    let layer = LayerTI::new(0.5, 1.0, al()).unwrap();
    let other = LayerTI::new(0.6, 1.2, al()).unwrap();
    let ctx = WaveContext::new(2.0, 0, 0.0).unwrap();
    let a = layer_twopoint(&layer, &ctx).unwrap();
    let b = layer_twopoint(&other, &ctx).unwrap();
    assert!(matches!(join_twopoint(&a, &b), Err(Error::NonContiguous(_))));
    assert!(matches!(global_twopoint(&[layer, other], &ctx), Err(Error::NonContiguous(_))));
    assert!(LayerTI::new(1.0, 0.5, al()).is_err());
}
