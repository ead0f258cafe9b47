//! Coherent erasure of a copied two-bit register and qubit splitting.

use crate::error::{contract, domain, Result};
use crate::gates::{cnot, cz, u_sd};
use crate::resources::{int, ResourceAtom, ResourceExpr};
use crate::simcore::{c64, Party, QState, Wire, C64};

use super::lab::{Lab, ProtocolResult};

const ERASE_WIRES: [(&str, Party); 4] =
    [("A1", Party::Alice), ("A2", Party::Alice), ("B1", Party::Bob), ("B2", Party::Bob)];

/// `|x1 x2>^A |x1 x2>^B` on wires `A1, A2, B1, B2`.
pub fn erasure_basis_input(x1: usize, x2: usize) -> Result<QState> {
    erasure_input(&[(x1 * 2 + x2, c64(1.0, 0.0))])
}

/// `sum_x c_x |x>^A |x>^B` for two-bit labels `x`, renormalized.
pub fn erasure_input(terms: &[(usize, C64)]) -> Result<QState> {
    let wires: Vec<Wire> = ERASE_WIRES.iter().map(|(id, p)| Wire::qubit(*id, *p)).collect();
    let mut amps = vec![C64::default(); 16];
    for &(x, c) in terms {
        if x > 3 {
            return domain(format!("two-bit label {x} out of range"));
        }
        amps[x * 4 + x] += c;
    }
    QState::normalized(wires, amps)
}

/// Erases Bob's copy of a two-bit register with one qubit sent back to Alice.
///
/// Bob turns his copy into a Bell pair with `u_sd^dag` and sends the first
/// half; Alice undoes the Pauli `X^{x1} Z^{x2}` controlled on her copy. The
/// pair `(B1, B2)` ends as `|Phi>` with `B1` at Alice, producing one ebit.
/// Inputs with weight outside `span{|x>^A |x>^B}` are rejected.
pub fn coherent_erasure_2bit(input: &QState) -> Result<ProtocolResult> {
    for (id, p) in ERASE_WIRES {
        match input.wire(id) {
            Some(w) if w.party == p && w.dim == 2 => {}
            _ => return domain(format!("input needs qubit `{id}` held by {p:?}")),
        }
    }
    let pos: Vec<usize> = ERASE_WIRES.iter().map(|(id, _)| input.wire_index(id)).collect::<Result<_>>()?;
    let off = input.weight_where(|l| l[pos[0]] != l[pos[2]] || l[pos[1]] != l[pos[3]]);
    if off > crate::simcore::tol::CONSTRUCTION {
        return contract(format!("input has weight {off:e} outside the span of |x>^A|x>^B"));
    }

    let mut lab = Lab::new(input.clone());
    lab.local(Party::Bob, &u_sd().adjoint(), &["B1", "B2"])?;
    lab.send("B1")?;
    lab.local(Party::Alice, &cnot(), &["A1", "B1"])?;
    lab.local(Party::Alice, &cz(), &["A2", "B1"])?;
    lab.produce(ResourceExpr::term(int(1), ResourceAtom::Ebit));

    // target: the input with Bob's copy replaced by |Phi> on (B1 at Alice, B2)
    let mut target = input.clone();
    target.erase_duplicate("A1", "B1")?;
    target.erase_duplicate("A2", "B2")?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = QState::new(
        vec![Wire::qubit("B1", Party::Alice), Wire::qubit("B2", Party::Bob)],
        vec![c64(h, 0.0), C64::default(), C64::default(), c64(h, 0.0)],
    )?;
    lab.finish(&target.tensor(&phi)?)
}

/// Moves Alice's qubit `A` to Bob as wire `B` via a cobit followed by a co-cobit.
///
/// Other wires of `input` (for example an entangled reference) are left alone.
pub fn split_qubit(input: &QState) -> Result<ProtocolResult> {
    match input.wire("A") {
        Some(w) if w.party == Party::Alice && w.dim == 2 => {}
        _ => return domain("input needs an Alice qubit `A`"),
    }
    if input.wire("B").is_some() {
        return domain("wire name `B` is reserved for the output");
    }
    let mut lab = Lab::new(input.clone());
    lab.cobit("A", "B")?;
    lab.cocobit("B", "A")?;
    let mut target = input.clone();
    target.rename_wire("A", "B")?;
    target.set_party("B", Party::Bob)?;
    lab.finish(&target)
}

/// `sqrt(p)|0>^R|0>^A + sqrt(1-p)|1>^R|1>^A`.
pub fn reference_pair(p: f64) -> Result<QState> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("weight {p} outside [0, 1]"));
    }
    QState::new(
        vec![Wire::qubit("R", Party::Reference), Wire::qubit("A", Party::Alice)],
        vec![c64(p.sqrt(), 0.0), C64::default(), C64::default(), c64((1.0 - p).sqrt(), 0.0)],
    )
}

/// A single Alice qubit `A` in the given state.
pub fn alice_qubit(a0: C64, a1: C64) -> Result<QState> {
    QState::normalized(vec![Wire::qubit("A", Party::Alice)], vec![a0, a1])
}
