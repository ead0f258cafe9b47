use gatecomm::concentration::{concentrate, exact_oracle, SchmidtSpectrum};
use gatecomm::gates::{gate_by_name, hadamard, ry};
use gatecomm::infomeasures::{cond_entropy_bb_given_x, delta_ie, mutual_info_xbb, random_ensemble, PureEnsemble};
use gatecomm::montecarlo::{haar_state, trial_rng};
use gatecomm::protocols::{
    backcomm_uxoxo, coherent_erasure_2bit, erasure_input, simulate_vm, simulate_vm_dag, split_qubit, ProtocolResult,
};
use gatecomm::resources::{expr_equal, ratio, region_reverse, CapacityTriple, Dir, ResourceAtom, ResourceExpr};
use gatecomm::simcore::{make_basis_state, Party, QState, Wire, C64};
use proptest::prelude::*;

fn ebit_balance(r: &ProtocolResult) -> f64 {
    let e = |x: &ResourceExpr| gatecomm::resources::to_f64(&x.coef(&ResourceAtom::Ebit));
    e(&r.ledger.produced) - e(&r.ledger.consumed)
}

fn entropy_change(r: &ProtocolResult) -> f64 {
    r.entropy_out - r.entropy_in - r.ebits_supplied
}

fn quantum_comm(r: &ProtocolResult) -> f64 {
    r.ledger
        .consumed
        .iter()
        .filter(|(a, _)| matches!(a, ResourceAtom::Qubit(_) | ResourceAtom::Cobit(_) | ResourceAtom::Cocobit(_)))
        .map(|(_, c)| gatecomm::resources::to_f64(c).abs())
        .sum()
}

fn atom_strategy() -> impl Strategy<Value = ResourceAtom> {
    let dir = prop_oneof![Just(Dir::AtoB), Just(Dir::BtoA)];
    prop_oneof![
        dir.clone().prop_map(ResourceAtom::Qubit),
        Just(ResourceAtom::Ebit),
        dir.clone().prop_map(ResourceAtom::Cobit),
        dir.prop_map(ResourceAtom::Cocobit),
        (any::<bool>(), any::<bool>()).prop_map(|(adjoint, exchanged)| ResourceAtom::Gate(
            gatecomm::resources::GateRef { name: "v_m:2".into(), adjoint, exchanged }
        )),
    ]
}

fn expr_strategy() -> impl Strategy<Value = ResourceExpr> {
    prop::collection::vec((atom_strategy(), -6i64..=6, 1i64..=4), 0..6).prop_map(|terms| {
        let mut e = ResourceExpr::zero();
        for (a, n, d) in terms {
            e.add_term(ratio(n, d), a);
        }
        e
    })
}

fn random_state(wires: Vec<Wire>, seed: u64) -> QState {
    let d = wires.iter().map(|w| w.dim).product();
    QState::new(wires, haar_state(d, &mut trial_rng(seed, 0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gates_act_linearly(seed in any::<u64>(), which in 0usize..4, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let g = gate_by_name(["v_m:2", "u_xoxo:2", "phi_swap:4", "v_m_dag:2"][which]).unwrap();
        let wires = vec![Wire::new("A", Party::Alice, 4), Wire::new("B", Party::Bob, 4)];
        let a = random_state(wires.clone(), seed);
        let b = random_state(wires.clone(), seed ^ 0x5555);
        let alpha = C64::new(re, im);
        let mix: Vec<C64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| alpha * x + y).collect();
        prop_assume!(mix.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let norm = mix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s = QState::normalized(wires, mix).unwrap();
        let out = s.apply(&g, &["A", "B"]).unwrap();
        let (ga, gb) = (a.apply(&g, &["A", "B"]).unwrap(), b.apply(&g, &["A", "B"]).unwrap());
        for i in 0..16 {
            let want = (alpha * ga.amplitudes()[i] + gb.amplitudes()[i]) / norm;
            prop_assert!((out.amplitudes()[i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn backcomm_entanglement_is_accounted(m in 1u32..=3, v in any::<u8>()) {
        let b: Vec<bool> = (0..m).map(|i| (v >> i) & 1 == 1).collect();
        let r = backcomm_uxoxo(m, &b).unwrap();
        prop_assert!((r.fidelity_vs_target - 1.0).abs() < 1e-10);
        prop_assert!((entropy_change(&r) - ebit_balance(&r)).abs() < 1e-9);
    }

    #[test]
    fn erasure_changes_entanglement_by_at_most_what_is_sent(seed in any::<u64>()) {
        let amps = haar_state(4, &mut trial_rng(seed, 1));
        let terms: Vec<(usize, C64)> = amps.into_iter().enumerate().collect();
        let r = coherent_erasure_2bit(&erasure_input(&terms).unwrap()).unwrap();
        prop_assert!((r.fidelity_vs_target - 1.0).abs() < 1e-10);
        prop_assert!(entropy_change(&r).abs() <= quantum_comm(&r) + 1e-9);
    }

    #[test]
    fn splitting_moves_at_most_what_is_sent(seed in any::<u64>()) {
        let input = random_state(vec![Wire::qubit("R", Party::Reference), Wire::qubit("A", Party::Alice)], seed);
        let r = split_qubit(&input).unwrap();
        prop_assert!(r.fidelity_vs_target >= 1.0 - 1e-10);
        prop_assert!(entropy_change(&r).abs() <= quantum_comm(&r) + 1e-9);
    }

    #[test]
    fn vm_simulations_are_clean_and_linear(m in 1u32..=2, seed in any::<u64>(), dag in any::<bool>()) {
        let n = 1usize << m;
        let input = random_state(vec![Wire::new("A1", Party::Alice, n), Wire::new("B1", Party::Bob, n)], seed);
        let r = if dag { simulate_vm_dag(m, &input).unwrap() } else { simulate_vm(m, &input).unwrap() };
        prop_assert!(r.clean);
        prop_assert!(r.garbage.is_empty());
        prop_assert!((r.fidelity_vs_target - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exchange_and_reverse_are_involutions(e in expr_strategy()) {
        prop_assert!(expr_equal(&e.exchange().exchange(), &e));
        let back = e.reverse().unwrap().reverse().unwrap();
        prop_assert!(expr_equal(&back, &e));
        let mut with_cbit = e.clone();
        with_cbit.add_term(ratio(1, 1), ResourceAtom::Cbit(Dir::AtoB));
        prop_assert!(with_cbit.reverse().is_err());
    }

    #[test]
    fn region_reverse_is_an_involution(c1 in -8.0f64..8.0, c2 in -8.0f64..8.0, e in -8.0f64..8.0) {
        let t = CapacityTriple::new(c1, c2, e);
        let back = region_reverse(region_reverse(t));
        prop_assert!((back.c1 - c1).abs() < 1e-12 && (back.c2 - c2).abs() < 1e-12 && (back.e - e).abs() < 1e-12);
    }

    #[test]
    fn concentration_matches_oracle_without_truncation(
        a in 0.5f64..0.75, b in 0.45f64..0.6, n1 in 1usize..6, n2 in 0usize..5, delta in 0.9f64..1.4,
    ) {
        let s1 = SchmidtSpectrum::from_probs(&[a, 1.0 - a]).unwrap();
        let s2 = SchmidtSpectrum::from_probs(&[b, (1.0 - b) / 2.0, (1.0 - b) / 2.0]).unwrap();
        let mut spectra = vec![s1; n1];
        spectra.extend(vec![s2; n2]);
        let r = concentrate(&spectra, delta).unwrap();
        prop_assume!(!r.truncation_active);
        let o = exact_oracle(&spectra, delta).unwrap();
        prop_assert_eq!(r.differing_fields(&o, 1e-9), Vec::<&str>::new());
        prop_assert!(r.rejected_mass <= r.bins as f64 * r.epsilon + 1e-12);
    }

    #[test]
    fn ensemble_quantities_stay_in_range(seed in any::<u64>(), k in 1usize..5) {
        let e = random_ensemble(k, 2, 2, &mut trial_rng(seed, 0)).unwrap();
        let i = mutual_info_xbb(&e).unwrap();
        let h = cond_entropy_bb_given_x(&e).unwrap();
        prop_assert!(i >= -1e-9);
        prop_assert!(h >= -1e-9 && h <= (e.bob_dim() as f64).log2() + 1e-9);
    }

    #[test]
    fn delta_ie_ignores_spectator_operations(seed in any::<u64>(), theta in -3.0f64..3.0) {
        let e = random_ensemble(3, 4, 4, &mut trial_rng(seed, 0)).unwrap();
        let u = gate_by_name("v_m:2").unwrap();
        let base = delta_ie(&u, &e).unwrap();

        let rotated = PureEnsemble::new(
            e.entries()
                .iter()
                .map(|(p, s)| (*p, s.apply(&ry(theta), &["A'"]).unwrap().apply(&hadamard(), &["B'"]).unwrap()))
                .collect(),
        )
        .unwrap();
        let r = delta_ie(&u, &rotated).unwrap();
        prop_assert!((r.0 - base.0).abs() < 1e-8 && (r.1 - base.1).abs() < 1e-8);

        let zero = make_basis_state(vec![Wire::qubit("B''", Party::Bob)], &[0]).unwrap();
        let padded = PureEnsemble::new(e.entries().iter().map(|(p, s)| (*p, s.tensor(&zero).unwrap())).collect()).unwrap();
        let r = delta_ie(&u, &padded).unwrap();
        prop_assert!((r.0 - base.0).abs() < 1e-8 && (r.1 - base.1).abs() < 1e-8);
    }
}

#[test]
fn erasure_of_basis_labels_turns_into_one_ebit() {
    for x in 0..4 {
        let r = coherent_erasure_2bit(&gatecomm::protocols::erasure_basis_input(x >> 1, x & 1).unwrap()).unwrap();
        assert!((entropy_change(&r) - ebit_balance(&r)).abs() < 1e-9);
    }
}
