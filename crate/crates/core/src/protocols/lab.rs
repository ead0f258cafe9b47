use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{contract, domain, Error, Result};
use crate::gates::GateSpec;
use crate::resources::{int, Dir, GateRef, ResourceAtom, ResourceExpr};
use crate::simcore::{
    c64, entropy_bits, exact_log2, fidelity_pure, tol, BlockOp, Party, QState, StateDump, Wire, C64,
};

/// Resources consumed and produced by a protocol run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostLedger {
    pub consumed: ResourceExpr,
    pub produced: ResourceExpr,
    pub gate_uses: BTreeMap<String, u64>,
}

impl CostLedger {
    /// `consumed - produced`, the net resource the run spent.
    pub fn net(&self) -> ResourceExpr {
        self.consumed.clone() - self.produced.clone()
    }

    pub fn exchange(&self) -> CostLedger {
        CostLedger {
            consumed: self.consumed.exchange(),
            produced: self.produced.exchange(),
            gate_uses: self
                .gate_uses
                .iter()
                .map(|(k, v)| (exchange_gate_name(k), *v))
                .collect(),
        }
    }

    pub fn report(&self) -> LedgerReport {
        LedgerReport {
            consumed: self.consumed.to_string(),
            produced: self.produced.to_string(),
            gate_uses: self.gate_uses.clone(),
        }
    }
}

fn exchange_gate_name(name: &str) -> String {
    match name.strip_prefix("F*").and_then(|n| n.strip_suffix("*F")) {
        Some(inner) => inner.to_string(),
        None => format!("F*{name}*F"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerReport {
    pub consumed: String,
    pub produced: String,
    pub gate_uses: BTreeMap<String, u64>,
}

/// Outcome of a protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub final_state: QState,
    pub ledger: CostLedger,
    pub fidelity_vs_target: f64,
    pub transcript: Vec<String>,
    /// Cost-model remarks that are not part of the exact ledger.
    pub notes: Vec<String>,
    /// True when every discarded wire was within tolerance of `|0>`.
    pub clean: bool,
    /// Wires left holding message-independent garbage instead of `|0>`.
    pub garbage: Vec<String>,
    /// Entropy of Alice's marginal before and after the run.
    pub entropy_in: f64,
    pub entropy_out: f64,
    /// Ebits handed to the run as fresh pairs.
    pub ebits_supplied: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub fidelity_vs_target: f64,
    pub clean: bool,
    pub garbage: Vec<String>,
    pub ledger: LedgerReport,
    pub transcript: Vec<String>,
    pub notes: Vec<String>,
    pub final_state: StateDump,
}

impl ProtocolResult {
    pub fn report(&self) -> ProtocolReport {
        ProtocolReport {
            fidelity_vs_target: self.fidelity_vs_target,
            clean: self.clean,
            garbage: self.garbage.clone(),
            ledger: self.ledger.report(),
            transcript: self.transcript.clone(),
            notes: self.notes.clone(),
            final_state: self.final_state.dump(),
        }
    }
}

/// Entropy of the Alice side of `s`, zero if Alice holds nothing.
pub fn alice_entropy(s: &QState) -> f64 {
    match s.party_marginal(Party::Alice) {
        Ok(rho) if s.wires().iter().any(|w| w.party != Party::Alice) => entropy_bits(&rho),
        _ => 0.0,
    }
}

/// Bookkeeping wrapper around a state that enforces who may touch which wire.
#[derive(Debug, Clone)]
pub struct Lab {
    state: QState,
    ledger: CostLedger,
    transcript: Vec<String>,
    notes: Vec<String>,
    clean: bool,
    garbage: Vec<String>,
    entropy_in: f64,
    ebits_supplied: f64,
}

fn name(p: Party) -> &'static str {
    match p {
        Party::Alice => "Alice",
        Party::Bob => "Bob",
        Party::Reference => "Reference",
        Party::Environment => "Environment",
    }
}

fn dir_from(sender: Party) -> Result<Dir> {
    match sender {
        Party::Alice => Ok(Dir::AtoB),
        Party::Bob => Ok(Dir::BtoA),
        p => domain(format!("{} cannot communicate", name(p))),
    }
}

fn qubits_in(dim: usize) -> Result<i64> {
    match exact_log2(dim) {
        Some(k) => Ok(k as i64),
        None => domain(format!("only power-of-two wires count as whole qubits (dim {dim})")),
    }
}

impl Lab {
    pub fn new(state: QState) -> Lab {
        let entropy_in = alice_entropy(&state);
        Lab {
            state,
            ledger: CostLedger::default(),
            transcript: Vec::new(),
            notes: Vec::new(),
            clean: true,
            garbage: Vec::new(),
            entropy_in,
            ebits_supplied: 0.0,
        }
    }

    pub fn state(&self) -> &QState {
        &self.state
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn log(&mut self, s: String) {
        self.transcript.push(s);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn owner(&self, id: &str) -> Result<Party> {
        self.state
            .wire(id)
            .map(|w| w.party)
            .ok_or_else(|| Error::Domain(format!("no wire `{id}`")))
    }

    fn require_owner(&self, party: Party, ids: &[&str]) -> Result<()> {
        for id in ids {
            let owner = self.owner(id)?;
            if owner != party {
                return contract(format!("{} cannot act on `{id}` held by {}", name(party), name(owner)));
            }
        }
        Ok(())
    }

    /// Adds a fresh wire in `|0>`.
    pub fn ancilla(&mut self, id: &str, party: Party, dim: usize) -> Result<()> {
        self.state.push_wire(Wire::new(id, party, dim))?;
        self.log(format!("{} prepares ancilla {id} (dim {dim})", name(party)));
        Ok(())
    }

    /// Adds a maximally entangled pair of `d`-level wires, `log2 d` ebits.
    pub fn supply_entanglement(&mut self, alice_id: &str, bob_id: &str, d: usize) -> Result<()> {
        let k = qubits_in(d)?;
        let s = 1.0 / (d as f64).sqrt();
        let mut amps = vec![C64::default(); d * d];
        for i in 0..d {
            amps[i * d + i] = c64(s, 0.0);
        }
        let pair = QState::new(
            vec![Wire::new(alice_id, Party::Alice, d), Wire::new(bob_id, Party::Bob, d)],
            amps,
        )?;
        self.state = self.state.tensor(&pair)?;
        self.ledger.consumed.add_term(int(k), ResourceAtom::Ebit);
        self.ebits_supplied += k as f64;
        self.log(format!("shared entanglement {alice_id}|{bob_id} ({k} ebits)"));
        Ok(())
    }

    /// Applies a gate that `party` performs on its own wires.
    pub fn local(&mut self, party: Party, gate: &GateSpec, targets: &[&str]) -> Result<()> {
        self.require_owner(party, targets)?;
        self.state.apply_in_place(gate, targets)?;
        self.log(format!("{} applies {gate} to {}", name(party), targets.join(",")));
        Ok(())
    }

    /// Like [`Lab::local`] for any block operator.
    pub fn local_op(&mut self, party: Party, op: &dyn BlockOp, label: &str, targets: &[&str]) -> Result<()> {
        self.require_owner(party, targets)?;
        self.state.apply_in_place(op, targets)?;
        self.log(format!("{} applies {label} to {}", name(party), targets.join(",")));
        Ok(())
    }

    /// One use of a bipartite gate; the leading targets must be Alice's, the rest Bob's.
    pub fn use_gate(&mut self, gate: &GateSpec, targets: &[&str]) -> Result<()> {
        let dims = targets
            .iter()
            .map(|t| self.state.wire(t).map(|w| w.dim).ok_or_else(|| Error::Domain(format!("no wire `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let na = gate
            .alice_target_count(&dims)
            .ok_or_else(|| Error::Domain(format!("targets do not fit the factors of {gate}")))?;
        self.require_owner(Party::Alice, &targets[..na])?;
        self.require_owner(Party::Bob, &targets[na..])?;
        self.state.apply_in_place(gate, targets)?;
        *self.ledger.gate_uses.entry(gate.to_string()).or_insert(0) += 1;
        self.ledger.consumed.add_term(int(1), ResourceAtom::Gate(GateRef::from(gate)));
        self.log(format!("gate {gate} on {}", targets.join(",")));
        Ok(())
    }

    /// Sends a wire to the other party over a quantum channel.
    pub fn send(&mut self, id: &str) -> Result<()> {
        let from = self.owner(id)?;
        let dir = dir_from(from)?;
        let k = qubits_in(self.state.wire(id).unwrap().dim)?;
        self.state.set_party(id, from.other())?;
        self.ledger.consumed.add_term(int(k), ResourceAtom::Qubit(dir));
        self.log(format!("{} sends {id} to {} ({k} qubits)", name(from), name(from.other())));
        Ok(())
    }

    /// Ideal cobit: copies `src` in the computational basis into a new wire of the other party.
    pub fn cobit(&mut self, src: &str, new_id: &str) -> Result<()> {
        let from = self.owner(src)?;
        let dir = dir_from(from)?;
        let dim = self.state.wire(src).unwrap().dim;
        let k = qubits_in(dim)?;
        self.state.copy_into_new(src, Wire::new(new_id, from.other(), dim))?;
        self.ledger.consumed.add_term(int(k), ResourceAtom::Cobit(dir));
        self.log(format!("{} cobit-copies {src} into {new_id} ({k} cobits)", name(from)));
        Ok(())
    }

    /// Ideal co-cobit: erases `erase` given that it equals `keep`, held by the other party.
    pub fn cocobit(&mut self, keep: &str, erase: &str) -> Result<()> {
        let survivor = self.owner(keep)?;
        let eraser = self.owner(erase)?;
        if eraser != survivor.other() || eraser == survivor {
            return contract("co-cobit needs one copy on each side");
        }
        let dir = dir_from(eraser)?;
        let k = qubits_in(self.state.wire(erase).unwrap().dim)?;
        let leak = self.state.erase_duplicate(keep, erase)?;
        if leak > tol::CONSTRUCTION {
            return contract(format!("co-cobit input has weight {leak:e} outside the copy subspace"));
        }
        self.ledger.consumed.add_term(int(k), ResourceAtom::Cocobit(dir));
        self.log(format!("{} erases {erase} against {keep} ({k} co-cobits)", name(eraser)));
        Ok(())
    }

    /// Drops a wire that should be in `|0>`; fails if it is not within tolerance.
    pub fn discard(&mut self, id: &str) -> Result<()> {
        let party = self.owner(id)?;
        let leak = self.state.remove_wire(id, 0)?;
        if leak > tol::ROUND_TRIP {
            self.clean = false;
            return contract(format!("discarded wire {id} is not |0> (residual {leak:e})"));
        }
        self.log(format!("{} discards {id}", name(party)));
        Ok(())
    }

    /// Leaves `id` in place as declared garbage.
    pub fn keep_as_garbage(&mut self, id: &str) -> Result<()> {
        self.owner(id)?;
        self.garbage.push(id.to_string());
        Ok(())
    }

    pub fn rename(&mut self, id: &str, new_id: &str) -> Result<()> {
        self.state.rename_wire(id, new_id)
    }

    /// Records a resource the run delivers.
    pub fn produce(&mut self, e: ResourceExpr) {
        self.log(format!("produces {e}"));
        self.ledger.produced = self.ledger.produced.clone() + e;
    }

    /// Compares against `target` (wire order may differ) and closes the run.
    pub fn finish(self, target: &QState) -> Result<ProtocolResult> {
        let aligned = self.state.aligned_to(target)?;
        let fidelity = fidelity_pure(&aligned, target)?;
        self.finish_with(fidelity)
    }

    /// Closes the run with a fidelity computed by the caller.
    pub fn finish_with(self, fidelity: f64) -> Result<ProtocolResult> {
        let entropy_out = alice_entropy(&self.state);
        Ok(ProtocolResult {
            final_state: self.state,
            ledger: self.ledger,
            fidelity_vs_target: fidelity.clamp(0.0, 1.0),
            transcript: self.transcript,
            notes: self.notes,
            clean: self.clean,
            garbage: self.garbage,
            entropy_in: self.entropy_in,
            entropy_out,
            ebits_supplied: self.ebits_supplied,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{hadamard, u_xoxo};
    use crate::simcore::make_basis_state;

    fn two() -> QState {
        make_basis_state(vec![Wire::qubit("a", Party::Alice), Wire::qubit("b", Party::Bob)], &[1, 0]).unwrap()
    }

    #[test]
    fn ownership_is_enforced() {
        let mut lab = Lab::new(two());
        assert!(matches!(lab.local(Party::Alice, &hadamard(), &["b"]), Err(Error::Contract(_))));
        assert!(lab.local(Party::Bob, &hadamard(), &["b"]).is_ok());
        // gate with Bob's wire in Alice's slot
        assert!(matches!(lab.use_gate(&u_xoxo(1).unwrap(), &["b", "a"]), Err(Error::Contract(_))));
    }

    #[test]
    fn gate_use_and_send_are_ledgered() {
        let mut lab = Lab::new(two());
        lab.use_gate(&u_xoxo(1).unwrap(), &["a", "b"]).unwrap();
        lab.send("b").unwrap();
        let l = lab.ledger().clone();
        assert_eq!(l.gate_uses["u_xoxo:1"], 1);
        assert_eq!(l.consumed.to_string(), "[q<-q] + <GATE:u_xoxo:1>");
        let target = make_basis_state(vec![Wire::qubit("a", Party::Alice), Wire::qubit("b", Party::Alice)], &[1, 1]).unwrap();
        let r = lab.finish(&target).unwrap();
        assert!((r.fidelity_vs_target - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirty_discard_fails() {
        let mut lab = Lab::new(two());
        assert!(matches!(lab.discard("a"), Err(Error::Contract(_))));
        let mut lab = Lab::new(two());
        lab.discard("b").unwrap();
    }

    #[test]
    fn cocobit_checks_copy_subspace() {
        let mut lab = Lab::new(two());
        assert!(matches!(lab.cocobit("a", "b"), Err(Error::Contract(_))));
        let mut lab = Lab::new(two());
        lab.cobit("a", "c").unwrap();
        lab.cocobit("c", "a").unwrap();
        assert_eq!(lab.ledger().consumed.to_string(), "[q->qq] + [qq->q]");
        assert_eq!(lab.state().wire("c").unwrap().party, Party::Bob);
    }

    #[test]
    fn ledger_exchange_renames_gates() {
        let mut l = CostLedger::default();
        l.gate_uses.insert("u".into(), 2);
        assert_eq!(l.exchange().gate_uses["F*u*F"], 2);
        assert_eq!(l.exchange().exchange(), l);
    }
}
