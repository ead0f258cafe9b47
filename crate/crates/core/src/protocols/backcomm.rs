//! Communication backwards through one use of `u_xoxo(m)`.

use crate::error::{domain, Result};
use crate::gates::{cz, hadamard, u_xoxo, z_string};
use crate::resources::{int, Dir, ResourceAtom, ResourceExpr};
use crate::simcore::{make_basis_state, Party, QState, Wire};

use super::lab::{Lab, ProtocolResult};

pub const MAX_BACKCOMM_M: u32 = 6;

fn check(m: u32) -> Result<usize> {
    if (1..=MAX_BACKCOMM_M).contains(&m) {
        Ok(m as usize)
    } else {
        domain(format!("m = {m} outside 1..={MAX_BACKCOMM_M}"))
    }
}

fn pair_wires(m: usize) -> (Vec<String>, Vec<String>) {
    ((0..m).map(|i| format!("A{i}")).collect(), (0..m).map(|i| format!("B{i}")).collect())
}

enum Message<'a> {
    Bits(&'a [bool]),
    Wires(&'a [String]),
}

/// Shared body. `exchanged` runs the mirrored protocol where Alice is the sender.
fn run(lab: &mut Lab, m: usize, msg: Message<'_>, exchanged: bool) -> Result<()> {
    let receiver = if exchanged { Party::Bob } else { Party::Alice };
    let sender = receiver.other();
    let (a, b) = pair_wires(m);
    for i in 0..m {
        lab.supply_entanglement(&a[i], &b[i], 2)?;
    }
    let (rx, tx) = if exchanged { (&b, &a) } else { (&a, &b) };
    let tx_refs: Vec<&str> = tx.iter().map(String::as_str).collect();
    match msg {
        Message::Bits(bits) => lab.local(sender, &z_string(bits), &tx_refs)?,
        Message::Wires(ws) => {
            for (w, t) in ws.iter().zip(tx) {
                lab.local(sender, &cz(), &[w, t])?;
            }
        }
    }
    let mut u = u_xoxo(m as u32)?;
    if exchanged {
        u = u.exchange_parties();
    }
    let targets: Vec<&str> = a.iter().chain(&b).map(String::as_str).collect();
    lab.use_gate(&u, &targets)?;
    for w in rx {
        lab.local(receiver, &hadamard(), &[w])?;
    }
    let dir = if exchanged { Dir::AtoB } else { Dir::BtoA };
    lab.produce(ResourceExpr::term(int(m as i64), ResourceAtom::Cobit(dir)));
    Ok(())
}

fn basis_target(m: usize, bits: &[bool], exchanged: bool) -> Result<QState> {
    let (a, b) = pair_wires(m);
    let value: Vec<usize> = bits.iter().map(|&x| x as usize).collect();
    let zeros = vec![0; m];
    let (la, lb) = if exchanged { (&zeros, &value) } else { (&value, &zeros) };
    let wires: Vec<Wire> = a
        .iter()
        .map(|id| Wire::qubit(id, Party::Alice))
        .chain(b.iter().map(|id| Wire::qubit(id, Party::Bob)))
        .collect();
    let labels: Vec<usize> = la.iter().chain(lb).copied().collect();
    make_basis_state(wires, &labels)
}

fn basis_run(m: u32, b: &[bool], exchanged: bool) -> Result<ProtocolResult> {
    let m = check(m)?;
    if b.len() != m {
        return domain(format!("message has {} bits, expected {m}", b.len()));
    }
    let mut lab = Lab::new(QState::scalar());
    run(&mut lab, m, Message::Bits(b), exchanged)?;
    lab.finish(&basis_target(m, b, exchanged)?)
}

/// Bob sends the `m`-bit string `b` to Alice using one gate use and `m` ebits.
///
/// Bob applies `Z^b` to his halves of the pairs, the gate folds the pairs
/// onto Alice's side, and Hadamards reveal `b`. Ends in `|b>^A |0>^B`.
pub fn backcomm_uxoxo(m: u32, b: &[bool]) -> Result<ProtocolResult> {
    basis_run(m, b, false)
}

/// The same protocol with the parties' roles swapped, using `F u_xoxo F`.
pub fn backcomm_uxoxo_exchanged(m: u32, b: &[bool]) -> Result<ProtocolResult> {
    basis_run(m, b, true)
}

/// Coherent version: Bob's message sits in qubit wires `X0..X{m-1}` of `input`.
///
/// Ends with a copy of the message in Alice's `A0..A{m-1}`; Bob's pair halves
/// return to `|0>` and are discarded.
pub fn backcomm_uxoxo_coherent(m: u32, input: &QState) -> Result<ProtocolResult> {
    let m = check(m)?;
    let xs: Vec<String> = (0..m).map(|i| format!("X{i}")).collect();
    for x in &xs {
        match input.wire(x) {
            Some(w) if w.party == Party::Bob && w.dim == 2 => {}
            _ => return domain(format!("input needs a Bob qubit `{x}`")),
        }
    }
    let mut lab = Lab::new(input.clone());
    run(&mut lab, m, Message::Wires(&xs), false)?;
    let (a, b) = pair_wires(m);
    for w in &b {
        lab.discard(w)?;
    }
    let mut target = input.clone();
    for (x, id) in xs.iter().zip(&a) {
        target.copy_into_new(x, Wire::qubit(id, Party::Alice))?;
    }
    lab.finish(&target)
}

/// Alice's `2^m`-level wire `X` is copied into a fresh Bob wire `Y` by one gate use.
pub fn uxoxo_forward_cobit(m: u32, input: &QState) -> Result<ProtocolResult> {
    let mm = check(m)?;
    let n = 1usize << mm;
    match input.wire("X") {
        Some(w) if w.party == Party::Alice && w.dim == n => {}
        _ => return domain(format!("input needs an Alice wire `X` of dim {n}")),
    }
    let mut lab = Lab::new(input.clone());
    lab.ancilla("Y", Party::Bob, n)?;
    lab.use_gate(&u_xoxo(m)?, &["X", "Y"])?;
    lab.produce(ResourceExpr::term(int(mm as i64), ResourceAtom::Cobit(Dir::AtoB)));
    let mut target = input.clone();
    target.copy_into_new("X", Wire::new("Y", Party::Bob, n))?;
    lab.finish(&target)
}

/// Bits of `v` as an `m`-bit string, most significant first.
pub fn bits_of(v: usize, m: usize) -> Vec<bool> {
    (0..m).rev().map(|i| (v >> i) & 1 == 1).collect()
}
