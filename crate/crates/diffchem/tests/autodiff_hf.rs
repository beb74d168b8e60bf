//! Forward-mode derivatives of the Hartree-Fock pipeline checked against
//! central finite differences, for every differentiable parameter class.

mod common;

use common::{h2, h3_plus, TestRng};
use diffchem::autodiff::{grad, grad_generic, hessian_with_asymmetry, jacobian, seed, Dual, Scalar};
use diffchem::integrals::overlap_matrix;
use diffchem::molecule::{pack_parameters, unpack_parameters, DiffFlags, Molecule};
use diffchem::scf::{scf_solve, ScfConfig};
use diffchem_oracles::{central_gradient, central_hessian, golden_section_min};

fn hf_total_energy<S: Scalar>(template: &Molecule<f64>, x: &[S]) -> S {
    let mol = unpack_parameters(template, x).unwrap();
    scf_solve(&mol, &ScfConfig::default()).unwrap().total_energy
}

fn fd_energy(template: &Molecule<f64>) -> impl FnMut(&[f64]) -> f64 + '_ {
    move |x: &[f64]| hf_total_energy(template, x)
}

fn check_gradient_against_fd(template: &Molecule<f64>, fd_step: f64, tol: f64) {
    let packed = pack_parameters(template);
    let analytic = grad(|x| hf_total_energy(template, x), &packed.values).unwrap();
    let numeric = central_gradient(&mut fd_energy(template), &packed.values, fd_step);
    for (i, (a, n)) in analytic.iter().zip(&numeric).enumerate() {
        assert!
            ((a - n).abs() < tol,
            "component {i} ({:?}): autodiff {a} vs finite differences {n}",
            packed.layout.keys[i]
        );
    }
}

#[test]
fn h2_gradient_matches_fd_for_all_parameter_classes() {
    // slightly asymmetric geometry so no component is trivially zero
    let mol = diffchem::molecule::build_molecule(
        &["H", "H"],
        &[[0.05, -0.02, 0.01], [0.03, 0.04, 1.38]],
        0,
        "sto-3g",
        DiffFlags::all(),
    )
    .unwrap();
    assert_eq!(pack_parameters(&mol).values.len(), 18);
    check_gradient_against_fd(&mol, 1e-4, 1e-6);
}

#[test]
fn h3_plus_gradient_matches_fd_for_all_parameter_classes() {
    let mol = h3_plus(1.8, DiffFlags::all());
    assert_eq!(pack_parameters(&mol).values.len(), 9 + 9 + 9);
    check_gradient_against_fd(&mol, 1e-4, 1e-6);
}

#[test]
fn h2_coordinate_gradient_components_sum_to_zero() {
    // translation invariance: equal and opposite forces on the two atoms
    let mol = h2(1.4, DiffFlags::coordinates_only());
    let packed = pack_parameters(&mol);
    let g = grad(|x| hf_total_energy(&mol, x), &packed.values).unwrap();
    for axis in 0..3 {
        let total: f64 = (0..mol.n_atoms()).map(|a| g[3 * a + axis]).sum();
        assert!(total.abs() < 1e-8, "axis {axis} gradient sum {total}");
    }
}

#[test]
fn gradient_vanishes_at_the_variational_bond_length() {
    // locate the optimal bond by scalar minimization of E(R), then check
    // the full coordinate gradient there
    let template = h2(1.4, DiffFlags::coordinates_only());
    let mut energy_at = |r: f64| {
        let mol = template
            .with_coordinates(&[[0.0, 0.0, 0.0], [0.0, 0.0, r]])
            .unwrap();
        scf_solve(&mol, &ScfConfig::default()).unwrap().total_energy
    };
    let (r_star, _) = golden_section_min(&mut energy_at, 1.0, 2.0, 1e-11);
    let mol = template
        .with_coordinates(&[[0.0, 0.0, 0.0], [0.0, 0.0, r_star]])
        .unwrap();
    let packed = pack_parameters(&mol);
    let g = grad(|x| hf_total_energy(&mol, x), &packed.values).unwrap();
    let norm = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(norm < 1e-5, "gradient norm {norm} at R = {r_star}");
}

#[test]
fn h2_coordinate_hessian_matches_fd() {
    let mol = h2(1.4, DiffFlags::coordinates_only());
    let packed = pack_parameters(&mol);
    let (analytic, asymmetry) =
        hessian_with_asymmetry(|x| hf_total_energy(&mol, x), &packed.values).unwrap();
    assert!(asymmetry < 1e-10, "raw Hessian asymmetry {asymmetry}");
    let numeric = central_hessian(&mut fd_energy(&mol), &packed.values, 1e-3);
    for i in 0..6 {
        for j in 0..6 {
            assert!(
                (analytic[(i, j)] - numeric[i][j]).abs() < 1e-4,
                "H[{i}{j}]: {} vs {}",
                analytic[(i, j)],
                numeric[i][j]
            );
        }
    }
}

#[test]
fn nested_hessian_equals_jacobian_of_gradient() {
    let mol = h2(1.4, DiffFlags::coordinates_only());
    let packed = pack_parameters(&mol);
    let (hess, _) =
        hessian_with_asymmetry(|x| hf_total_energy(&mol, x), &packed.values).unwrap();
    let jac = jacobian(
        |x| grad_generic(|y| hf_total_energy(&mol, y), x),
        &packed.values,
    )
    .unwrap();
    for i in 0..6 {
        for j in 0..6 {
            // the jacobian-of-gradient is not symmetrized; compare to the
            // symmetrized Hessian within the nesting-consistency tolerance
            assert!(
                (hess[(i, j)] - jac[(i, j)]).abs() < 1e-10,
                "({i},{j}): {} vs {}",
                hess[(i, j)],
                jac[(i, j)]
            );
        }
    }
}

#[test]
fn overlap_matrix_tangents_match_fd_for_every_class() {
    // integral-level differentiability: d S_01 / d(parameter)
    let template = diffchem::molecule::build_molecule(
        &["H", "H"],
        &[[0.1, -0.2, 0.0], [0.0, 0.1, 1.5]],
        0,
        "sto-3g",
        DiffFlags::all(),
    )
    .unwrap();
    let packed = pack_parameters(&template);
    let entry = |x: &[f64]| -> f64 {
        let mol = unpack_parameters(&template, x).unwrap();
        overlap_matrix(&mol).unwrap()[(0, 1)]
    };
    let duals = seed(&packed.values);
    let mol_dual = unpack_parameters(&template, &duals).unwrap();
    let s01: Dual<f64> = overlap_matrix(&mol_dual).unwrap()[(0, 1)].clone();
    let numeric = central_gradient(&mut { entry }, &packed.values, 1e-5);
    for (i, n) in numeric.iter().enumerate() {
        let a = s01.tangent(i);
        let scale = n.abs().max(1.0);
        assert!(
            ((a - n) / scale).abs() < 1e-6,
            "dS01/dx{i}: {a} vs {n}"
        );
    }
}

#[test]
fn attraction_and_repulsion_tangents_match_fd() {
    let template = diffchem::molecule::build_molecule(
        &["H", "H"],
        &[[0.1, -0.2, 0.0], [0.0, 0.1, 1.5]],
        0,
        "sto-3g",
        DiffFlags::all(),
    )
    .unwrap();
    let packed = pack_parameters(&template);
    let duals = seed(&packed.values);
    let mol_dual = unpack_parameters(&template, &duals).unwrap();
    let v01: Dual<f64> = diffchem::integrals::attraction_matrix(&mol_dual)[(0, 1)].clone();
    let eri: Dual<f64> = diffchem::integrals::repulsion_tensor(&mol_dual)
        .get(0, 1, 0, 1)
        .clone();

    let mut v_at = |x: &[f64]| -> f64 {
        let mol = unpack_parameters(&template, x).unwrap();
        diffchem::integrals::attraction_matrix(&mol)[(0, 1)]
    };
    let mut eri_at = |x: &[f64]| -> f64 {
        let mol = unpack_parameters(&template, x).unwrap();
        *diffchem::integrals::repulsion_tensor(&mol).get(0, 1, 0, 1)
    };
    let v_fd = central_gradient(&mut v_at, &packed.values, 1e-5);
    let eri_fd = central_gradient(&mut eri_at, &packed.values, 1e-5);
    for i in 0..packed.values.len() {
        let scale_v = v_fd[i].abs().max(1.0);
        let scale_e = eri_fd[i].abs().max(1.0);
        assert!(
            ((v01.tangent(i) - v_fd[i]) / scale_v).abs() < 1e-6,
            "dV01/dx{i}"
        );
        assert!(
            ((eri.tangent(i) - eri_fd[i]) / scale_e).abs() < 1e-6,
            "dERI/dx{i}"
        );
    }
}

#[test]
fn chain_rule_matches_fd_on_random_compositions() {
    // random expressions over the supported primitive set at safe points
    let mut rng = TestRng(42);
    for case in 0..30 {
        let n = 2 + rng.below(3);
        let x0: Vec<f64> = (0..n).map(|_| 0.4 + 0.4 * (rng.uniform() + 1.0)).collect();
        let ops: Vec<usize> = (0..6).map(|_| rng.below(7)).collect();
        let picks: Vec<usize> = (0..6).map(|_| rng.below(n)).collect();

        fn eval<S: Scalar>(x: &[S], ops: &[usize], picks: &[usize]) -> S {
            let mut acc = x[0].clone();
            for (op, pick) in ops.iter().zip(picks) {
                let v = x[*pick].clone();
                acc = match op {
                    0 => acc + v,
                    1 => acc - v.scale(0.5),
                    2 => acc * v,
                    3 => acc / (v + S::constant(1.5)),
                    4 => (acc.scale(0.25)).exp() + v,
                    5 => (acc.clone() * acc + S::one()).sqrt() + v.scale(0.1),
                    _ => acc.clone() * v.erf() + (acc.abs() + S::constant(0.1)).ln(),
                };
            }
            acc
        }

        let analytic = grad(|x| eval(x, &ops, &picks), &x0).unwrap();
        let mut f = |x: &[f64]| eval(x, &ops, &picks);
        let numeric = central_gradient(&mut f, &x0, 1e-6);
        for (i, (a, nv)) in analytic.iter().zip(&numeric).enumerate() {
            let scale = nv.abs().max(1.0);
            assert!(
                ((a - nv) / scale).abs() < 1e-6,
                "case {case} component {i}: {a} vs {nv}"
            );
        }
    }
}
