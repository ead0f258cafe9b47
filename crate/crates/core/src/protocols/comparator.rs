//! Reversible comparison of Alice's `x` with Bob's `y`.

use crate::error::{domain, Result};
use crate::gates::{comparator, xor_into, Comparison, GateSpec, MAX_M};
use crate::simcore::Party;

use super::lab::Lab;

/// Largest `m` the comparator protocols accept.
pub const MAX_CMP_M: u32 = 6;

pub(crate) fn check_m(m: u32) -> Result<usize> {
    if (1..=MAX_CMP_M.min(MAX_M)).contains(&m) {
        Ok(1 << m)
    } else {
        domain(format!("m = {m} outside 1..={MAX_CMP_M}"))
    }
}

/// The isometry `|x>^A |y>^B |0>^{A2} |0>^{B2} -> |x>|y>|w>|w>` for the `V_m` branch variable.
///
/// `w = 1` if `y = 0`, `2` if `0 < y <= x`, `3` if `y > x`. The `w` registers
/// are 4-level and updated by XOR, so running it again uncomputes `w`.
pub fn coherent_comparator(m: u32) -> Result<GateSpec> {
    check_m(m)?;
    comparator(m, Comparison::VmBranch)
}

/// Local gate `|x, y, t> -> |x, y, t ^ w(x, y)>` on `(2^m, 2^m, 4)`.
fn w_into(m: u32, kind: Comparison) -> Result<GateSpec> {
    let n = check_m(m)?;
    let tag = match kind {
        Comparison::VmBranch => "w_vm",
        Comparison::Order => "w_ord",
    };
    GateSpec::from_basis_map(format!("{tag}:{m}"), vec![n, n, 4], vec![], |d| {
        vec![d[0], d[1], d[2] ^ kind.eval(d[0], d[1])]
    })
}

/// Runs the comparator as an exact two-party protocol inside `lab`.
///
/// Alice ships `x` to Bob, Bob computes `w` into a scratch register and his
/// own `b_w`, the scratch makes a round trip so Alice can XOR it into `a_w`,
/// then Bob clears the scratch and returns `x`. Costs `m + 2` qubits in each
/// direction.
#[allow(clippy::too_many_arguments)]
pub fn run_comparator(
    lab: &mut Lab,
    m: u32,
    kind: Comparison,
    x: &str,
    a_w: &str,
    y: &str,
    b_w: &str,
    scratch: &str,
) -> Result<()> {
    let w = w_into(m, kind)?;
    let xor4 = xor_into(4)?;
    lab.send(x)?;
    lab.ancilla(scratch, Party::Bob, 4)?;
    lab.local(Party::Bob, &w, &[x, y, scratch])?;
    lab.local(Party::Bob, &xor4, &[scratch, b_w])?;
    lab.send(scratch)?;
    lab.local(Party::Alice, &xor4, &[scratch, a_w])?;
    lab.send(scratch)?;
    lab.local(Party::Bob, &w, &[x, y, scratch])?;
    lab.discard(scratch)?;
    lab.send(x)?;
    lab.note(format!(
        "comparator {}: {m}+2 qubits each way exactly; an eps-error version costs O(log m/eps) bits",
        w.name
    ));
    Ok(())
}
