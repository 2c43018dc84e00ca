use aqcpqc::ansatz::AnsatzSpec;
use aqcpqc::oracle::ground_energy;
use aqcpqc::pauli::{Pauli, PauliHamiltonian, PauliString};
use aqcpqc::vqe::{initial_point, vqe_minimize, OptimizerConfig, OptimizerKind};

fn z(n: usize, q: usize) -> PauliString {
    PauliString::from_sparse(n, &[(q, Pauli::Z)]).unwrap()
}

fn x(n: usize, q: usize) -> PauliString {
    PauliString::from_sparse(n, &[(q, Pauli::X)]).unwrap()
}

/// `Z0 + 0.5·X1`: a unique product ground state `|1⟩|−⟩` that `R_y` alone reaches.
fn product_target() -> PauliHamiltonian {
    PauliHamiltonian::new(2, [(1.0, z(2, 0)), (0.5, x(2, 1))], "product").unwrap()
}

#[test]
fn gradient_descent_never_climbs_on_single_qubit_z() {
    let h = PauliHamiltonian::new(1, [(1.0, z(1, 0))], "z").unwrap();
    let spec = AnsatzSpec::new(1, 0).unwrap();
    let config = OptimizerConfig { restarts: 4, max_iterations: 300, record_trace: true, ..Default::default() };
    let result = vqe_minimize(&h, &spec, &config).unwrap();
    for r in &result.restarts {
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "restart {}: {} -> {}", r.restart, w[0], w[1]);
        }
    }
    assert!((result.best().energy + 1.0).abs() < 1e-6);
}

#[test]
fn both_optimizers_reach_a_product_ground_state() {
    let h = product_target();
    let exact = ground_energy(&h).unwrap();
    let spec = AnsatzSpec::new(2, 0).unwrap();
    for method in [OptimizerKind::Gd, OptimizerKind::Spsa2] {
        let result = vqe_minimize(&h, &spec, &OptimizerConfig { method, ..Default::default() }).unwrap();
        let e = result.best().energy;
        assert!((e - exact).abs() < 1e-4, "{}: {e} vs {exact}", method.name());
    }
}

#[test]
fn zero_iterations_return_the_initial_points() {
    let h = product_target();
    let spec = AnsatzSpec::new(2, 1).unwrap();
    let config = OptimizerConfig { max_iterations: 0, restarts: 3, seed: 9, ..Default::default() };
    for method in [OptimizerKind::Gd, OptimizerKind::Spsa2] {
        let result = vqe_minimize(&h, &spec, &OptimizerConfig { method, ..config }).unwrap();
        for r in &result.restarts {
            assert_eq!(r.theta, initial_point(9, r.restart, spec.num_params()));
        }
    }
}

#[test]
fn energies_respect_the_variational_bound_and_are_deterministic() {
    let h = PauliHamiltonian::new(3, [(1.0, z(3, 0)), (-0.7, x(3, 2)), (0.4, z(3, 1))], "mixed").unwrap();
    let exact = ground_energy(&h).unwrap();
    let spec = AnsatzSpec::new(3, 1).unwrap();
    for method in [OptimizerKind::Gd, OptimizerKind::Spsa2] {
        let config = OptimizerConfig { method, max_iterations: 200, restarts: 3, seed: 4, ..Default::default() };
        let a = vqe_minimize(&h, &spec, &config).unwrap();
        let b = vqe_minimize(&h, &spec, &config).unwrap();
        assert_eq!(a, b);
        assert!(a.restarts.iter().all(|r| r.energy >= exact - 1e-8));
    }
}
