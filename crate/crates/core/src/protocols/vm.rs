//! Two-party simulations of `V_m` and `V_m^dag` from cobits, co-cobits and comparisons.

use crate::error::{domain, Result};
use crate::gates::{add_mod, sub_mod, swap, v_m, v_m_dag, xor_into, Comparison, GateSpec};
use crate::simcore::{make_basis_state, Party, QState, Wire};

use super::comparator::{check_m, run_comparator};
use super::lab::{Lab, ProtocolResult};

fn check_input(m: u32, input: &QState) -> Result<usize> {
    let n = check_m(m)?;
    for (id, p) in [("A1", Party::Alice), ("B1", Party::Bob)] {
        match input.wire(id) {
            Some(w) if w.party == p && w.dim == n => {}
            _ => return domain(format!("input needs wire `{id}` of dim {n} held by {p:?}")),
        }
    }
    for id in ["A2", "B2", "A3", "B3", "In"] {
        if input.wire(id).is_some() {
            return domain(format!("wire name `{id}` is reserved for protocol ancillas"));
        }
    }
    Ok(n)
}

/// `|x>^{A1} |y>^{B1} -> V_m |x, y>` using `m` cobits plus two comparator runs.
///
/// 1. compute the branch `w` into `A2`, `B2`;
/// 2. if `w = 1`, Alice cobit-copies `x` to `B3` and Bob swaps it into `B1`;
/// 3. if `w = 2`, Bob decrements `y`;
/// 4. the order of `(x, y')` now equals the old `w`, so comparing again clears `A2`, `B2`.
pub fn simulate_vm(m: u32, input: &QState) -> Result<ProtocolResult> {
    let n = check_input(m, input)?;
    let mut lab = Lab::new(input.clone());
    lab.ancilla("A2", Party::Alice, 4)?;
    lab.ancilla("B2", Party::Bob, 4)?;
    run_comparator(&mut lab, m, Comparison::VmBranch, "A1", "A2", "B1", "B2", "T1")?;

    let copy_x = xor_into(n)?.controlled(4, 1)?;
    lab.ancilla("In", Party::Alice, n)?;
    lab.local(Party::Alice, &copy_x, &["A2", "A1", "In"])?;
    lab.cobit("In", "B3")?;
    lab.local(Party::Alice, &copy_x, &["A2", "A1", "In"])?;
    lab.discard("In")?;
    lab.local(Party::Bob, &swap(n)?.controlled(4, 1)?, &["B2", "B1", "B3"])?;
    lab.discard("B3")?;

    lab.local(Party::Bob, &sub_mod(m)?.controlled(4, 2)?, &["B2", "B1"])?;

    run_comparator(&mut lab, m, Comparison::Order, "A1", "A2", "B1", "B2", "T2")?;
    lab.discard("A2")?;
    lab.discard("B2")?;
    lab.finish(&input.apply(&v_m(m)?, &["A1", "B1"])?)
}

/// `|x>^{A1} |y>^{B1} -> V_m^dag |x, y>` using `m` co-cobits plus two comparator runs.
///
/// Mirror of [`simulate_vm`]: compare the order, erase Bob's copy of `x`
/// when `y = x`, increment `y` when `y < x`, and clear `w` with the branch
/// comparison.
pub fn simulate_vm_dag(m: u32, input: &QState) -> Result<ProtocolResult> {
    let n = check_input(m, input)?;
    let mut lab = Lab::new(input.clone());
    lab.ancilla("A2", Party::Alice, 4)?;
    lab.ancilla("B2", Party::Bob, 4)?;
    run_comparator(&mut lab, m, Comparison::Order, "A1", "A2", "B1", "B2", "T1")?;

    let copy_x = xor_into(n)?.controlled(4, 1)?;
    lab.ancilla("B3", Party::Bob, n)?;
    lab.local(Party::Bob, &swap(n)?.controlled(4, 1)?, &["B2", "B1", "B3"])?;
    lab.ancilla("In", Party::Alice, n)?;
    lab.local(Party::Alice, &copy_x, &["A2", "A1", "In"])?;
    lab.cocobit("In", "B3")?;
    lab.local(Party::Alice, &copy_x, &["A2", "A1", "In"])?;
    lab.discard("In")?;

    lab.local(Party::Bob, &add_mod(m)?.controlled(4, 2)?, &["B2", "B1"])?;

    run_comparator(&mut lab, m, Comparison::VmBranch, "A1", "A2", "B1", "B2", "T2")?;
    lab.discard("A2")?;
    lab.discard("B2")?;
    lab.finish(&input.apply(&v_m_dag(m)?, &["A1", "B1"])?)
}

/// Basis input `|x>^{A1} |y>^{B1}` for the simulations.
pub fn vm_basis_input(m: u32, x: usize, y: usize) -> Result<QState> {
    let n = check_m(m)?;
    make_basis_state(vec![Wire::new("A1", Party::Alice, n), Wire::new("B1", Party::Bob, n)], &[x, y])
}

/// Permutation induced by a simulation on all `2^{2m}` basis pairs.
///
/// Each output must be a single basis state; fails otherwise.
pub fn induced_permutation(
    m: u32,
    sim: fn(u32, &QState) -> Result<ProtocolResult>,
) -> Result<Vec<usize>> {
    let n = check_m(m)?;
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let r = sim(m, &vm_basis_input(m, x, y)?)?;
            let out = r.final_state.reordered(&["A1", "B1"])?;
            let k = out.argmax();
            if (out.amplitudes()[k].norm_sqr() - 1.0).abs() > 1e-9 {
                return crate::error::contract(format!("|{x},{y}> did not map to a basis state"));
            }
            table.push(k);
        }
    }
    Ok(table)
}

/// The permutation table of `g` (for comparison with [`induced_permutation`]).
pub fn oracle_table(g: &GateSpec) -> Option<Vec<usize>> {
    g.permutation().map(<[usize]>::to_vec)
}
