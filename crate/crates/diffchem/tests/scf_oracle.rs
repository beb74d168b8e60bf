//! SCF fixed point checked against a brute-force variational oracle:
//! direct minimization of the closed-shell energy over S-orthonormal
//! coefficients, with energy contractions written out independently.

mod common;

use common::{h2, h3_plus, heh_plus, oracle_shell, TestRng};
use diffchem::integrals::{integral_tables, IntegralTables};
use diffchem::molecule::{build_molecule, DiffFlags};
use diffchem::scf::{
    core_hamiltonian, coulomb_exchange, fock_matrix, scf_solve, scf_solve_with_tables, ScfConfig,
};
use diffchem_oracles::{
    attraction_quadrature, dense_sym_eig, golden_section_min, kinetic_quadrature,
};
use ndarray::Array2;

/// Independent electronic energy for one doubly occupied orbital `c`:
/// E = 2 c'Hc + sum_uvhg c_u c_v c_h c_g [2 (uv|hg) - (uh|vg)], contracted
/// directly from the raw tensors (no J/K code from the library).
fn energy_of_orbital(c: &[f64], tables: &IntegralTables<f64>, h_core: &Array2<f64>) -> f64 {
    let m = c.len();
    let mut one = 0.0;
    for u in 0..m {
        for v in 0..m {
            one += c[u] * c[v] * h_core[(u, v)];
        }
    }
    let mut two = 0.0;
    for u in 0..m {
        for v in 0..m {
            for h in 0..m {
                for g in 0..m {
                    let d = c[u] * c[v] * c[h] * c[g];
                    two += d
                        * (2.0 * tables.repulsion.get(u, v, h, g)
                            - tables.repulsion.get(u, h, v, g));
                }
            }
        }
    }
    2.0 * one + two
}

fn s_normalized(v: &[f64], s: &Array2<f64>) -> Vec<f64> {
    let m = v.len();
    let mut norm2 = 0.0;
    for u in 0..m {
        for w in 0..m {
            norm2 += v[u] * s[(u, w)] * v[w];
        }
    }
    v.iter().map(|x| x / norm2.sqrt()).collect()
}

/// Variational ground energy for a two-function basis with one occupied
/// orbital: scan + golden section over the single mixing angle.
fn variational_minimum_two_basis(tables: &IntegralTables<f64>) -> f64 {
    let h_core = core_hamiltonian(tables);
    let mut energy_at = |t: f64| {
        let c = s_normalized(&[t.cos(), t.sin()], &tables.overlap);
        energy_of_orbital(&c, tables, &h_core)
    };
    let mut best = (0.0, f64::INFINITY);
    let n_grid = 720;
    for k in 0..n_grid {
        let t = -std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * k as f64 / n_grid as f64;
        let e = energy_at(t);
        if e < best.1 {
            best = (t, e);
        }
    }
    let dt = std::f64::consts::PI / n_grid as f64;
    let (_, e) = golden_section_min(&mut energy_at, best.0 - dt, best.0 + dt, 1e-13);
    e
}

#[test]
fn h2_scf_energy_matches_variational_oracle() {
    let mol = h2(1.4, DiffFlags::default());
    let tables = integral_tables(&mol).unwrap();
    let result = scf_solve_with_tables(&mol, &tables, &ScfConfig::default()).unwrap();
    let oracle = variational_minimum_two_basis(&tables);
    assert!(
        (result.electronic_energy - oracle).abs() < 1e-8,
        "SCF {} vs variational oracle {}",
        result.electronic_energy,
        oracle
    );
}

#[test]
fn heh_plus_scf_energy_matches_variational_oracle() {
    let mol = heh_plus(1.5);
    let tables = integral_tables(&mol).unwrap();
    let result = scf_solve_with_tables(&mol, &tables, &ScfConfig::default()).unwrap();
    let oracle = variational_minimum_two_basis(&tables);
    assert!((result.electronic_energy - oracle).abs() < 1e-8);
}

#[test]
fn helium_scf_energy_is_the_fixed_functional_value() {
    // one basis function: the normalized orbital is unique, no variational
    // freedom; the energy functional value IS the oracle
    let mol = build_molecule(&["He"], &[[0.0; 3]], 0, "sto-3g", DiffFlags::default()).unwrap();
    let tables = integral_tables(&mol).unwrap();
    let result = scf_solve_with_tables(&mol, &tables, &ScfConfig::default()).unwrap();
    let h_core = core_hamiltonian(&tables);
    let c = s_normalized(&[1.0], &tables.overlap);
    let oracle = energy_of_orbital(&c, &tables, &h_core);
    assert!((result.electronic_energy - oracle).abs() < 1e-8);
    assert!((result.total_energy - oracle).abs() < 1e-8); // no nuclear repulsion
}

#[test]
fn fock_matrix_is_the_density_derivative_of_the_energy() {
    // E as a function of the spin-summed density Pso = 2P, perturbed entry
    // by entry: central differences must reproduce F = H + 2J - K.
    let mol = h2(1.4, DiffFlags::default());
    let tables = integral_tables(&mol).unwrap();
    let h_core = core_hamiltonian(&tables);
    let m = mol.n_basis();

    let energy_of_p = |p: &Array2<f64>| {
        let (j, k) = {
            // independent contraction of J and K from the raw tensor
            let mut j = Array2::<f64>::zeros((m, m));
            let mut k = Array2::<f64>::zeros((m, m));
            for u in 0..m {
                for v in 0..m {
                    for h in 0..m {
                        for g in 0..m {
                            j[(u, v)] += p[(h, g)] * tables.repulsion.get(u, v, h, g);
                            k[(u, v)] += p[(h, g)] * tables.repulsion.get(u, h, v, g);
                        }
                    }
                }
            }
            (j, k)
        };
        let mut e = 0.0;
        for u in 0..m {
            for v in 0..m {
                e += 2.0 * p[(u, v)] * h_core[(u, v)]
                    + p[(u, v)] * (2.0 * j[(u, v)] - k[(u, v)]);
            }
        }
        e
    };

    let mut rng = TestRng(7);
    for _ in 0..3 {
        let mut p = Array2::<f64>::zeros((m, m));
        for u in 0..m {
            for v in u..m {
                let x = 0.4 * rng.uniform();
                p[(u, v)] = x;
                p[(v, u)] = x;
            }
        }
        let (j, k) = coulomb_exchange(&p, &tables.repulsion);
        let fock = fock_matrix(&h_core, &j, &k);

        let h = 1e-5;
        for a in 0..m {
            for b in 0..m {
                // perturb one entry of Pso = 2P, i.e. P entry by h/2
                let mut plus = p.clone();
                plus[(a, b)] += h / 2.0;
                let mut minus = p.clone();
                minus[(a, b)] -= h / 2.0;
                let fd = (energy_of_p(&plus) - energy_of_p(&minus)) / (2.0 * h);
                assert!(
                    (fock[(a, b)] - fd).abs() < 1e-6,
                    "F[{a}{b}] = {} vs dE/dPso = {}",
                    fock[(a, b)],
                    fd
                );
            }
        }
    }
}

#[test]
fn converged_energy_is_stationary_under_occupied_virtual_rotation() {
    let mol = h2(1.4, DiffFlags::default());
    let tables = integral_tables(&mol).unwrap();
    let result = scf_solve_with_tables(&mol, &tables, &ScfConfig::default()).unwrap();
    let h_core = core_hamiltonian(&tables);
    let c = &result.state.coefficients;
    let occupied: Vec<f64> = (0..2).map(|u| c[(u, 0)]).collect();
    let virtual_: Vec<f64> = (0..2).map(|u| c[(u, 1)]).collect();

    let energy_at = |eps: f64| {
        let mixed: Vec<f64> = occupied
            .iter()
            .zip(&virtual_)
            .map(|(o, v)| eps.cos() * o + eps.sin() * v)
            .collect();
        energy_of_orbital(&mixed, &tables, &h_core)
    };
    let e0 = energy_at(0.0);
    let slope = (energy_at(1e-4) - energy_at(-1e-4)) / 2e-4;
    assert!(slope.abs() < 1e-8, "stationarity violated: slope {slope}");
    assert!(energy_at(1e-3) > e0);
    assert!(energy_at(-1e-3) > e0);
}

#[test]
fn core_guess_eigenvalue_matches_independent_dense_route() {
    // hydrogen-atom framework (charge -1 only to satisfy the even-electron
    // constructor; the core Hamiltonian itself is electron-free)
    let mol = build_molecule(&["H"], &[[0.0; 3]], -1, "sto-3g", DiffFlags::default()).unwrap();
    let tables = integral_tables(&mol).unwrap();
    let h_core = core_hamiltonian(&tables);

    // independent route: quadrature H_core entry over S = 1 normalized basis
    let shell = oracle_shell(&mol, 0);
    let t_ref = kinetic_quadrature(&shell, &shell);
    let v_ref = attraction_quadrature(&shell, &shell, [0.0; 3], 1.0);
    let s_ref = diffchem_oracles::overlap_quadrature(&shell, &shell);
    let oracle_eps = (t_ref + v_ref) / s_ref;
    assert!(
        (h_core[(0, 0)] - oracle_eps).abs() < 1e-8,
        "{} vs {}",
        h_core[(0, 0)],
        oracle_eps
    );
}

#[test]
fn h2_core_hamiltonian_matches_quadrature_oracle() {
    let mol = h2(1.4, DiffFlags::default());
    let tables = integral_tables(&mol).unwrap();
    let h_core = core_hamiltonian(&tables);
    for i in 0..2 {
        for j in 0..2 {
            let a = oracle_shell(&mol, i);
            let b = oracle_shell(&mol, j);
            let mut reference = kinetic_quadrature(&a, &b);
            for atom in &mol.atoms {
                reference +=
                    attraction_quadrature(&a, &b, atom.position, atom.atomic_number as f64);
            }
            assert!((h_core[(i, j)] - reference).abs() < 1e-7);
        }
    }
}

#[test]
fn energy_is_invariant_under_rigid_motion() {
    let reference = scf_solve(&h3_plus(1.8, DiffFlags::default()), &ScfConfig::default())
        .unwrap();

    // translation
    let translated = build_molecule(
        &["H", "H", "H"],
        &[
            [3.0, -1.0, 2.0],
            [3.0 + 1.8, -1.0, 2.0],
            [3.0 + 0.9, -1.0 + 1.8 * 3f64.sqrt() / 2.0, 2.0],
        ],
        1,
        "sto-3g",
        DiffFlags::default(),
    )
    .unwrap();
    let t = scf_solve(&translated, &ScfConfig::default()).unwrap();
    assert!((t.total_energy - reference.total_energy).abs() < 1e-8);

    // rotation by 90 degrees about z: (x, y) -> (-y, x)
    let rotate = |p: [f64; 3]| [-p[1], p[0], p[2]];
    let rotated = build_molecule(
        &["H", "H", "H"],
        &[
            rotate([0.0, 0.0, 0.0]),
            rotate([1.8, 0.0, 0.0]),
            rotate([0.9, 1.8 * 3f64.sqrt() / 2.0, 0.0]),
        ],
        1,
        "sto-3g",
        DiffFlags::default(),
    )
    .unwrap();
    let r = scf_solve(&rotated, &ScfConfig::default()).unwrap();
    assert!((r.total_energy - reference.total_energy).abs() < 1e-8);
    for (a, b) in reference
        .state
        .orbital_energies
        .iter()
        .zip(&r.state.orbital_energies)
    {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn generalized_core_eigenvalue_agrees_with_oracle_dense_solver() {
    // whole generalized problem H_core c = e S c via an independent route:
    // oracle eigensolver on S, explicit X = V D^(-1/2) V^T, oracle
    // eigensolver on X^T H X.
    let mol = h2(1.4, DiffFlags::default());
    let tables = integral_tables(&mol).unwrap();
    let h_core = core_hamiltonian(&tables);
    let m = mol.n_basis();
    let to_rows = |a: &Array2<f64>| -> Vec<Vec<f64>> {
        (0..m).map(|i| (0..m).map(|j| a[(i, j)]).collect()).collect()
    };
    let (s_evals, s_vecs) = dense_sym_eig(&to_rows(&tables.overlap));
    let mut x = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                x[i][j] += s_vecs[i][k] / s_evals[k].sqrt() * s_vecs[j][k];
            }
        }
    }
    let mut xhx = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            for u in 0..m {
                for v in 0..m {
                    xhx[i][j] += x[u][i] * h_core[(u, v)] * x[v][j];
                }
            }
        }
    }
    let (oracle_evals, _) = dense_sym_eig(&xhx);

    // library route
    let x_lib = diffchem::scf::orthogonalizer(&tables.overlap).unwrap();
    let mut fp = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            for u in 0..m {
                for v in 0..m {
                    fp[(i, j)] += x_lib[(u, i)] * h_core[(u, v)] * x_lib[(v, j)];
                }
            }
        }
    }
    let (lib_evals, _) = diffchem::linalg::jacobi_eigh(&fp).unwrap();
    for (a, b) in lib_evals.iter().zip(&oracle_evals) {
        assert!((a - b).abs() < 1e-10, "{a} vs oracle {b}");
    }
}
