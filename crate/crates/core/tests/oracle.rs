use nalgebra::DMatrix;
use xychain::correlator::g_k;
use xychain::oracle::{
    build_hamiltonian, compare, ed_rho3, fermion_rho3, finite_correlators, finite_g_matrix,
    parity_diagonal, reduce_to_sites, thermal_state, FiniteChain, GibbsState,
};
use xychain::{
    correlator_set, CorrelatorSet, Error, ModelParams, QuadratureConfig, Rho3, TripleGeometry,
};

fn p(h: f64, gamma: f64, t: f64) -> ModelParams {
    ModelParams::new(h, gamma, t).unwrap()
}

fn chain(n: usize, h: f64, gamma: f64, t: f64) -> FiniteChain {
    FiniteChain::new(n, p(h, gamma, t)).unwrap()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn hamiltonian_examples() {
    let h = build_hamiltonian(&chain(2, 0.0, 1.0, 0.0)).unwrap();
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    assert_eq!(e.len(), 4);
    for (a, b) in e.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
        assert!((a - b).abs() < 1e-14);
    }

    // strong field: the ground state is |↑…↑⟩ = basis state 0
    let c = chain(6, 1e4, 0.7, 0.0);
    let rho = thermal_state(&build_hamiltonian(&c).unwrap(), 0.0).unwrap();
    assert!((rho[(0, 0)] - 1.0).abs() < 1e-6);

    assert!(matches!(
        build_hamiltonian(&chain(15, 0.5, 0.5, 0.0)),
        Err(Error::SizeLimit { n_sites: 15, max_sites: 14 })
    ));
}

#[test]
fn parity_commutes_with_hamiltonian() {
    for (h, gamma) in [(0.0, 1.0), (0.5, 0.25), (1.5, 0.7)] {
        let ham = build_hamiltonian(&chain(8, h, gamma, 0.0)).unwrap();
        let parity = DMatrix::from_diagonal(&parity_diagonal(8).into());
        let comm = &ham * &parity - &parity * &ham;
        assert!(comm.abs().max() < 1e-12);
    }
}

#[test]
fn thermal_state_examples() {
    let ham = build_hamiltonian(&chain(5, 0.6, 0.4, 0.0)).unwrap();
    let hot = thermal_state(&ham, 1e10).unwrap();
    assert!((hot - DMatrix::identity(32, 32) / 32.0).abs().max() < 1e-10);

    let cold = thermal_state(&ham, 0.0).unwrap();
    assert!((&cold * &cold - &cold).abs().max() < 1e-10);

    let c = chain(8, 1.0, 1.0, 0.5);
    let ham = build_hamiltonian(&c).unwrap();
    let e = ham.symmetric_eigenvalues();
    let e0 = e.min();
    let z: f64 = e.iter().map(|x| (-(x - e0) / 0.5).exp()).sum();
    let mean: f64 = e.iter().map(|x| x * (-(x - e0) / 0.5).exp()).sum::<f64>() / z;
    let rho = thermal_state(&ham, 0.5).unwrap();
    assert!(((&rho * &ham).trace() - mean).abs() < 1e-10);
    assert!((GibbsState::new(&c).unwrap().energy() - mean).abs() < 1e-10);
}

#[test]
fn reduction_examples() {
    let id = DMatrix::identity(32, 32) / 32.0;
    let r = reduce_to_sites(&id, 5, &[0, 2, 4]).unwrap();
    assert!((r - DMatrix::identity(8, 8) / 8.0).abs().max() < 1e-15);

    // product state |↓↑↓↑⟩ reduces to |↓↓⟩ on sites (0, 2)
    let mut prod = DMatrix::zeros(16, 16);
    prod[(0b1010, 0b1010)] = 1.0;
    let r = reduce_to_sites(&prod, 4, &[0, 2]).unwrap();
    assert_eq!(r[(3, 3)], 1.0);
    assert_eq!(r.sum(), 1.0);

    let mut ghz = DMatrix::zeros(8, 8);
    for (a, b) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        ghz[(a, b)] = 0.5;
    }
    let r = reduce_to_sites(&ghz, 3, &[0, 1, 2]).unwrap();
    assert_eq!(r, *Rho3::ghz().matrix());
}

#[test]
fn contraction_matrix_limits() {
    let hot = finite_g_matrix(&chain(10, 0.5, 0.5, 1e12)).unwrap();
    assert!(hot.g.abs().max() < 1e-11);
    let polarized = finite_g_matrix(&chain(10, 1e4, 0.5, 0.0)).unwrap();
    assert!((&polarized.g + DMatrix::identity(10, 10)).abs().max() < 1e-3);
    let set = finite_correlators(&polarized, [2, 4, 7]).unwrap();
    assert!(set.max_abs_diff(&CorrelatorSet::polarized()) < 1e-3);

    let g = finite_g_matrix(&chain(40, 0.9, 0.3, 0.1)).unwrap();
    assert!(g.g.abs().max() <= 1.0 + 1e-12);
}

#[test]
fn long_chain_bulk_row_matches_quadrature() {
    let params = p(0.5, 0.5, 0.0);
    let g = finite_g_matrix(&FiniteChain::new(64, params).unwrap()).unwrap();
    for k in -6i64..=6 {
        let finite = g.g[(32, (32 + k) as usize)];
        let infinite = g_k(k, &params, &quad()).unwrap();
        assert!((finite - infinite).abs() < 1e-6, "k={k}: {finite} {infinite}");
    }
}

#[test]
fn ed_matches_fermion_correlators_at_ten_sites() {
    for (h, gamma, t) in [(0.3, 0.6, 0.0), (1.0, 1.0, 0.5), (1.4, 0.2, 0.1)] {
        let c = chain(10, h, gamma, t);
        for sites in [[0, 1, 2], [3, 4, 6], [1, 5, 9]] {
            let ed = ed_rho3(&c, sites).unwrap().correlators();
            let ff = finite_correlators(&finite_g_matrix(&c).unwrap(), sites).unwrap();
            assert!(ed.max_abs_diff(&ff) < 1e-8, "{h} {gamma} {t} {sites:?}");
        }
    }
}

#[test]
fn long_chain_matches_thermodynamic_correlators() {
    for (h, gamma, t) in [(0.5, 0.5, 0.0), (1.3, 1.0, 0.3), (0.2, 0.8, 1.0)] {
        let params = p(h, gamma, t);
        let geom = TripleGeometry::new(2, 1).unwrap();
        let c = FiniteChain::new(64, params).unwrap();
        let sites = c.bulk_sites(&geom).unwrap();
        let ff = finite_correlators(&finite_g_matrix(&c).unwrap(), sites).unwrap();
        let thermo = correlator_set(&geom, &params, &quad()).unwrap();
        assert!(ff.max_abs_diff(&thermo) < 5e-3);
    }
}

#[test]
fn finite_size_error_shrinks_with_length() {
    let params = p(0.5, 0.5, 0.0);
    let geom = TripleGeometry::block();
    let thermo = correlator_set(&geom, &params, &quad()).unwrap();
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let c = FiniteChain::new(n, params).unwrap();
            let sites = c.bulk_sites(&geom).unwrap();
            finite_correlators(&finite_g_matrix(&c).unwrap(), sites)
                .unwrap()
                .max_abs_diff(&thermo)
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 1e-9);
}

#[test]
fn compare_examples() {
    let q = quad();
    let polarized = compare(&p(10.0, 1.0, 0.0), 8, [3, 4, 5], &q).unwrap();
    assert!(polarized.ed_vs_fermion < 1e-6);
    assert!(polarized.ed_vs_thermodynamic < 1e-6, "{polarized:?}");
    assert!(polarized.fermion_vs_thermodynamic < 1e-6);

    let c = compare(&p(1.0, 1.0, 0.5), 10, [4, 5, 6], &q).unwrap();
    assert!(c.ed_vs_fermion < 1e-8);
    assert_eq!(c.correlators.len(), CorrelatorSet::NAMES.len());

    let c = compare(&p(0.5, 0.5, 0.2), 12, [5, 6, 7], &q).unwrap();
    assert!(c.ed_vs_thermodynamic < 5e-3, "{c:?}");
    assert!(c.ed_vs_fermion < 1e-8);
}

#[test]
fn fermion_and_ed_states_agree_on_small_chains() {
    for n in [4, 6] {
        let c = chain(n, 0.8, 0.5, 0.0);
        let a = ed_rho3(&c, [0, 1, n - 1]).unwrap();
        let b = fermion_rho3(&c, [0, 1, n - 1]).unwrap();
        assert!((a.matrix() - b.matrix()).abs().max() < 1e-10);
    }
}
