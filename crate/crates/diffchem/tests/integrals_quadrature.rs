//! Integral matrices checked against independent quadrature oracles.

mod common;

use common::{h2, heh_plus, lih, oracle_shell};
use diffchem::integrals::{
    attraction_matrix, boys, hermite_coefficients, kinetic_matrix, overlap_matrix,
    repulsion_tensor,
};
use diffchem::molecule::{primitive_norm, DiffFlags, Molecule};
use diffchem_oracles::{
    attraction_quadrature, eri_s_quadrature, gauss_legendre_on, kinetic_quadrature,
    overlap_quadrature, GaussianShell,
};

fn check_overlap_kinetic(mol: &Molecule<f64>, tol: f64) {
    let m = mol.n_basis();
    let s = overlap_matrix(mol).unwrap();
    let t = kinetic_matrix(mol);
    for i in 0..m {
        for j in i..m {
            let sa = oracle_shell(mol, i);
            let sb = oracle_shell(mol, j);
            let s_ref = overlap_quadrature(&sa, &sb);
            let t_ref = kinetic_quadrature(&sa, &sb);
            assert!(
                (s[(i, j)] - s_ref).abs() < tol,
                "S[{i}{j}] = {} vs quadrature {}",
                s[(i, j)],
                s_ref
            );
            assert!(
                (t[(i, j)] - t_ref).abs() < tol,
                "T[{i}{j}] = {} vs quadrature {}",
                t[(i, j)],
                t_ref
            );
        }
    }
}

fn check_attraction(mol: &Molecule<f64>, tol: f64) {
    let m = mol.n_basis();
    let v = attraction_matrix(mol);
    for i in 0..m {
        for j in i..m {
            let sa = oracle_shell(mol, i);
            let sb = oracle_shell(mol, j);
            let mut v_ref = 0.0;
            for atom in &mol.atoms {
                v_ref +=
                    attraction_quadrature(&sa, &sb, atom.position, atom.atomic_number as f64);
            }
            assert!(
                (v[(i, j)] - v_ref).abs() < tol,
                "V[{i}{j}] = {} vs quadrature {}",
                v[(i, j)],
                v_ref
            );
        }
    }
}

fn check_eri(mol: &Molecule<f64>, tol: f64) {
    let eri = repulsion_tensor(mol);
    let shells: Vec<GaussianShell> = (0..mol.n_basis()).map(|i| oracle_shell(mol, i)).collect();
    for ((i, j, k, l), value) in eri.canonical_entries() {
        let reference = eri_s_quadrature(&shells[i], &shells[j], &shells[k], &shells[l]);
        assert!(
            (value - reference).abs() < tol,
            "({i}{j}|{k}{l}) = {value} vs oracle {reference}"
        );
    }
}

#[test]
fn h2_overlap_and_kinetic_match_quadrature() {
    check_overlap_kinetic(&h2(1.4, DiffFlags::default()), 1e-10);
}

#[test]
fn h2_attraction_matches_quadrature() {
    check_attraction(&h2(1.4, DiffFlags::default()), 1e-8);
}

#[test]
fn h2_repulsion_matches_semi_analytic_oracle() {
    let mol = h2(1.4, DiffFlags::default());
    let eri = repulsion_tensor(&mol);
    assert_eq!(eri.canonical_entries().count(), 6);
    check_eri(&mol, 1e-10);
}

#[test]
fn heh_plus_all_integrals_match_oracles() {
    let mol = heh_plus(1.5);
    check_overlap_kinetic(&mol, 1e-10);
    check_attraction(&mol, 1e-8);
    check_eri(&mol, 1e-10);
}

#[test]
fn lih_one_electron_integrals_with_p_functions_match_quadrature() {
    // covers s-s, s-p, and p-p blocks on two centers
    let mol = lih(3.0);
    check_overlap_kinetic(&mol, 1e-9);
    check_attraction(&mol, 5e-8);
}

#[test]
fn boys_matches_defining_integral_quadrature() {
    for n in [0usize, 1, 2, 4] {
        for x in [0.0f64, 0.3, 1.7, 10.0, 24.0, 30.0, 60.0] {
            let (ts, ws) = gauss_legendre_on(240, 0.0, 1.0);
            let reference: f64 = ts
                .iter()
                .zip(&ws)
                .map(|(t, w)| w * t.powi(2 * n as i32) * (-x * t * t).exp())
                .sum();
            let value = boys(n, &x).unwrap();
            assert!(
                (value - reference).abs() < 1e-12,
                "F_{n}({x}) = {value} vs quadrature {reference}"
            );
        }
    }
}

#[test]
fn primitive_norm_of_p_function_matches_quadrature() {
    let alpha = 0.5;
    let n = primitive_norm(&alpha, (1, 0, 0)).unwrap();
    let shell = GaussianShell {
        center: [0.0; 3],
        angular: [1, 0, 0],
        primitives: vec![(alpha, n)],
    };
    let self_overlap = overlap_quadrature(&shell, &shell);
    assert!((self_overlap - 1.0).abs() < 1e-10, "got {self_overlap}");
}

#[test]
fn hermite_coefficients_reproduce_p_s_overlap() {
    // a p-x primitive at the origin against an s primitive at offset d
    let (alpha, beta) = (0.8, 1.3);
    let d = 0.9;
    let p = alpha + beta;
    let ex = hermite_coefficients(1, 0, (&alpha, &beta), (&0.0, &d));
    let e0y = hermite_coefficients(0, 0, (&alpha, &beta), (&0.0, &0.0));
    let analytic =
        ex[0] * e0y[0] * e0y[0] * (std::f64::consts::PI / p).powf(1.5);
    let pa = GaussianShell {
        center: [0.0; 3],
        angular: [1, 0, 0],
        primitives: vec![(alpha, 1.0)],
    };
    let sb = GaussianShell {
        center: [d, 0.0, 0.0],
        angular: [0, 0, 0],
        primitives: vec![(beta, 1.0)],
    };
    let reference = overlap_quadrature(&pa, &sb);
    assert!(
        (analytic - reference).abs() < 1e-10,
        "{analytic} vs {reference}"
    );
}

#[test]
fn s_s_hermite_prefactor_is_gaussian_product() {
    let (alpha, beta, d) = (1.1, 0.4, 1.7);
    let e = hermite_coefficients(0, 0, (&alpha, &beta), (&0.0, &d));
    let mu = alpha * beta / (alpha + beta);
    assert!((e[0] - (-mu * d * d).exp()).abs() < 1e-14);
}

#[test]
fn attraction_translates_with_the_molecule() {
    let a = attraction_matrix(&h2(1.4, DiffFlags::default()));
    let shifted = diffchem::molecule::build_molecule(
        &["H", "H"],
        &[[2.0, -1.0, 0.5], [2.0, -1.0, 1.9]],
        0,
        "sto-3g",
        DiffFlags::default(),
    )
    .unwrap();
    let b = attraction_matrix(&shifted);
    for i in 0..2 {
        for j in 0..2 {
            assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-12);
        }
    }
}

#[test]
fn overlap_spectrum_stays_positive_definite() {
    for mol in [
        h2(0.7, DiffFlags::default()),
        h2(1.4, DiffFlags::default()),
        heh_plus(1.5),
        lih(3.0),
    ] {
        let s = overlap_matrix(&mol).unwrap();
        let m = mol.n_basis();
        let rows: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| s[(i, j)]).collect()).collect();
        let (evals, _) = diffchem_oracles::dense_sym_eig(&rows);
        assert!(evals[0] > 1e-8, "smallest overlap eigenvalue {}", evals[0]);
    }
}
