use qsinn::bruteforce::exhaustive_search;
use qsinn::nets::NetworkConfig;
use qsinn::quantum::train::{run_fixed_pipeline, Backend};
use qsinn::quantum::{grover_train, GroverCircuits, Outcome, QDataset, QTrainConfig, QsinnCircuit};
use qsinn::sim::{QuantumState, SparseState, StateVector};
use qsinn::Parallelism;

#[test]
fn dense_and_sparse_agree_on_the_toy_demo() {
    let net = QsinnCircuit::new(&[2], QDataset::toy(), 2, 0).unwrap();
    let n = net.num_qubits();
    let g = GroverCircuits::new(net).unwrap();
    let d = run_fixed_pipeline(&g, 0.5, 1, StateVector::new(n).unwrap()).unwrap();
    let s = run_fixed_pipeline(&g, 0.5, 1, SparseState::new(n).unwrap()).unwrap();
    assert!(d.phase.max_abs_diff(&s.phase) < 1e-12);
    assert!(d.weight.max_abs_diff(&s.weight) < 1e-12);
    assert!(d.final_weight.max_abs_diff(&s.final_weight) < 1e-12);
    assert!((d.norm - 1.0).abs() < 1e-12 && (s.norm - 1.0).abs() < 1e-12);
    for rho in [&d.phase, &d.weight, &d.final_weight] {
        rho.validate().unwrap();
    }
}

#[test]
fn phase_carrier_choice_does_not_change_the_result() {
    let mut finals = Vec::new();
    for carrier in 0..2 {
        let net = QsinnCircuit::new(&[2], QDataset::toy(), 2, carrier).unwrap();
        let n = net.num_qubits();
        let g = GroverCircuits::new(net).unwrap();
        let snap = run_fixed_pipeline(&g, 0.5, 1, SparseState::new(n).unwrap()).unwrap();
        assert!((snap.work_clean_probability - 1.0).abs() < 1e-12);
        finals.push(snap);
    }
    assert!(finals[0].phase.max_abs_diff(&finals[1].phase) < 1e-12);
    assert!(finals[0].final_weight.max_abs_diff(&finals[1].final_weight) < 1e-12);
}

#[test]
fn toy_training_finds_the_all_positive_weights() {
    for backend in [Backend::Dense, Backend::Sparse] {
        let cfg = QTrainConfig {
            backend,
            ..Default::default()
        };
        let r = grover_train(QDataset::toy(), &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        assert_eq!(r.bits, Some(0));
        assert_eq!(r.correct_count, Some(4));
        assert_eq!(r.diagnostics.num_qubits, 21);
        assert!(r.diagnostics.grover_iterations <= 2);
    }
}

#[test]
fn file_dataset_matches_the_referee() {
    let text = "# k, n, y\n-2, 2, 1\n1, 2, 1\n3, 2, -1\n4, 2, 0\n-4, 2, 0\n";
    let data = QDataset::parse(text).unwrap();
    assert_eq!(QDataset::parse(&data.to_text()).unwrap(), data);
    for hidden in [vec![2], vec![1, 2], vec![3]] {
        let cfg = QTrainConfig {
            hidden: hidden.clone(),
            ..Default::default()
        };
        let r = grover_train(data.clone(), &cfg).unwrap();
        let search = exhaustive_search(
            &NetworkConfig::dsinnn(&hidden, 0.0),
            &data.classical_pairs(),
            Parallelism::Sequential,
        )
        .unwrap();
        assert!(search.maximizers().contains(&r.bits.unwrap()), "{hidden:?}");
        assert_eq!(r.correct_count, Some(search.best_count()));
    }
}

#[test]
fn unitary_leaves_weight_branches_clean() {
    let net = QsinnCircuit::new(&[1, 2], QDataset::toy(), 1, 2).unwrap();
    let u = net.unitary().unwrap();
    for bits in 0..1u64 << net.num_weights() {
        let idx = net.weight_basis_index(bits);
        let mut s = SparseState::basis(net.num_qubits(), idx).unwrap();
        u.run(&mut s).unwrap();
        assert!((s.amplitude(idx).norm() - 1.0).abs() < 1e-12);
    }
}
