//! Decoupling a two-way exchange's garbage from its messages with shared pads.

use serde::Serialize;

use crate::error::{contract, domain, Result};
use crate::gates::{cnot, cz, hadamard, ry, u_xoxo, xor_into};
use crate::simcore::{make_basis_state, schmidt_decompose, Party, QState, Wire, C64};

use super::lab::{Lab, ProtocolResult};

/// Where a base exchange leaves its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseLayout {
    /// Alice's wire that should read Bob's input.
    pub a_out: String,
    /// Bob's wire that should read Alice's input.
    pub b_out: String,
    /// Remaining garbage wires.
    pub extra: Vec<String>,
}

impl BaseLayout {
    fn wires(&self) -> Vec<&str> {
        let mut w = vec![self.a_out.as_str(), self.b_out.as_str()];
        w.extend(self.extra.iter().map(String::as_str));
        w
    }
}

/// A protocol `|a>^A |b>^B -> |a>^A |b>^B |phi_{a,b}>` whose garbage holds a copy of
/// `b` on Alice's side and of `a` on Bob's side, up to error `epsilon`.
///
/// Wires it creates must start with `g` so they do not collide with the
/// transform's own registers.
pub trait BaseExchange {
    fn name(&self) -> String;
    /// Message sizes `(c1, c2)` in bits for Alice and Bob.
    fn bits(&self) -> (u32, u32);
    /// Declared worst-case probability that the copies are wrong.
    fn epsilon(&self) -> f64;
    fn run(&self, lab: &mut Lab, a_in: &str, b_in: &str) -> Result<BaseLayout>;
}

/// One bit each way by ideal cobits, plus a locally prepared `|+>` that never changes.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantGarbageExchange;

impl BaseExchange for ConstantGarbageExchange {
    fn name(&self) -> String {
        "constant-garbage".into()
    }
    fn bits(&self) -> (u32, u32) {
        (1, 1)
    }
    fn epsilon(&self) -> f64 {
        0.0
    }
    fn run(&self, lab: &mut Lab, a_in: &str, b_in: &str) -> Result<BaseLayout> {
        lab.cobit(a_in, "gB2")?;
        lab.cobit(b_in, "gA2")?;
        lab.ancilla("gG", Party::Alice, 2)?;
        lab.local(Party::Alice, &hadamard(), &["gG"])?;
        Ok(BaseLayout { a_out: "gA2".into(), b_out: "gB2".into(), extra: vec!["gG".into()] })
    }
}

/// One bit each way from two uses of `u_xoxo(1)` and an ebit.
///
/// Alice also keeps a scratch copy of her bit, so the garbage depends on the
/// messages. A rotation `R_y(theta)` on Alice's received bit makes the
/// exchange noisy with error `sin^2(theta/2)`.
#[derive(Debug, Clone, Copy)]
pub struct XoxoExchange {
    pub theta: f64,
    pub declared_epsilon: f64,
}

impl XoxoExchange {
    pub fn new(theta: f64) -> Self {
        XoxoExchange { theta, declared_epsilon: (theta / 2.0).sin().powi(2) }
    }
}

impl BaseExchange for XoxoExchange {
    fn name(&self) -> String {
        format!("xoxo(theta={})", self.theta)
    }
    fn bits(&self) -> (u32, u32) {
        (1, 1)
    }
    fn epsilon(&self) -> f64 {
        self.declared_epsilon
    }
    fn run(&self, lab: &mut Lab, a_in: &str, b_in: &str) -> Result<BaseLayout> {
        let u = u_xoxo(1)?;
        lab.ancilla("gB2", Party::Bob, 2)?;
        lab.use_gate(&u, &[a_in, "gB2"])?;
        lab.supply_entanglement("gA2", "gEB", 2)?;
        lab.local(Party::Bob, &cz(), &[b_in, "gEB"])?;
        lab.use_gate(&u, &["gA2", "gEB"])?;
        lab.local(Party::Alice, &hadamard(), &["gA2"])?;
        lab.ancilla("gS", Party::Alice, 2)?;
        lab.local(Party::Alice, &cnot(), &[a_in, "gS"])?;
        if self.theta != 0.0 {
            lab.local(Party::Alice, &ry(self.theta), &["gA2"])?;
        }
        Ok(BaseLayout { a_out: "gA2".into(), b_out: "gB2".into(), extra: vec!["gEB".into(), "gS".into()] })
    }
}

fn dims(base: &dyn BaseExchange) -> Result<(usize, usize)> {
    let (c1, c2) = base.bits();
    if !(1..=3).contains(&c1) || !(1..=3).contains(&c2) {
        return domain(format!("message sizes ({c1}, {c2}) outside 1..=3 bits"));
    }
    Ok((1 << c1, 1 << c2))
}

/// The base run on `|a>^X |b>^Y`, with its layout.
pub fn base_output(base: &dyn BaseExchange, a: usize, b: usize) -> Result<(QState, BaseLayout)> {
    let (n1, n2) = dims(base)?;
    let input = make_basis_state(vec![Wire::new("X", Party::Alice, n1), Wire::new("Y", Party::Bob, n2)], &[a, b])?;
    let mut lab = Lab::new(input);
    let layout = base.run(&mut lab, "X", "Y")?;
    Ok((lab.state().clone(), layout))
}

/// `1 - P(Alice reads b, Bob reads a)` for one input pair.
pub fn extraction_error(base: &dyn BaseExchange, a: usize, b: usize) -> Result<f64> {
    let (s, layout) = base_output(base, a, b)?;
    let (pa, pb) = (s.wire_index(&layout.a_out)?, s.wire_index(&layout.b_out)?);
    Ok(1.0 - s.weight_where(|l| l[pa] == b && l[pb] == a))
}

fn worst_error(base: &dyn BaseExchange) -> Result<f64> {
    let (n1, n2) = dims(base)?;
    let mut worst: f64 = 0.0;
    for a in 0..n1 {
        for b in 0..n2 {
            worst = worst.max(extraction_error(base, a, b)?);
        }
    }
    Ok(worst)
}

/// `N^{-1/2} sum_{a,b} |a>^X |b>^{Ea} |b>^Y |a>^{Eb} |phi_{a,b}>`, the garbage the padded run leaves.
pub fn phi_bar(base: &dyn BaseExchange) -> Result<QState> {
    let (n1, n2) = dims(base)?;
    let mut acc: Option<(QState, Vec<C64>)> = None;
    for a in 0..n1 {
        for b in 0..n2 {
            let (s, _) = base_output(base, a, b)?;
            let copies =
                make_basis_state(vec![Wire::new("Ea", Party::Alice, n2), Wire::new("Eb", Party::Bob, n1)], &[b, a])?;
            let term = s.tensor(&copies)?;
            match &mut acc {
                None => acc = Some((term.clone(), term.amplitudes().to_vec())),
                Some((first, sum)) => {
                    let t = term.aligned_to(first)?;
                    for (x, y) in sum.iter_mut().zip(t.amplitudes()) {
                        *x += y;
                    }
                }
            }
        }
    }
    let (first, sum) = acc.expect("at least one message pair");
    QState::normalized(first.wires().to_vec(), sum)
}

fn check_messages(input: &QState, n1: usize, n2: usize) -> Result<()> {
    for (id, p, n) in [("X", Party::Alice, n1), ("Y", Party::Bob, n2)] {
        match input.wire(id) {
            Some(w) if w.party == p && w.dim == n => {}
            _ => return domain(format!("input needs wire `{id}` of dim {n} held by {p:?}")),
        }
    }
    for id in ["PA", "PB", "PAp", "PBp", "Ea", "Eb"] {
        if input.wire(id).is_some() {
            return domain(format!("wire name `{id}` is reserved"));
        }
    }
    Ok(())
}

/// Runs `base` on messages in `X` (Alice) and `Y` (Bob) behind a coherent one-time pad.
///
/// Pads `(PA, PAp)` and `(PB, PBp)` are shared maximally entangled registers.
/// Alice masks `X` with `PA`, Bob masks `Y` with `PBp`, the base exchanges the
/// masked values, both sides copy what they received into `Ea`/`Eb`, and the
/// pads are unmasked so that `PA = PAp = x` and `PB = PBp = y`. Everything else
/// is left as [`phi_bar`], which does not depend on the messages.
pub fn one_time_pad_transform(base: &dyn BaseExchange, input: &QState) -> Result<ProtocolResult> {
    let (n1, n2) = dims(base)?;
    check_messages(input, n1, n2)?;
    let worst = worst_error(base)?;
    if worst > base.epsilon() + 1e-12 {
        return contract(format!(
            "base `{}` misses its outputs with probability {worst:e} > declared {:e}",
            base.name(),
            base.epsilon()
        ));
    }
    let (x1, x2) = (xor_into(n1)?, xor_into(n2)?);
    let mut lab = Lab::new(input.clone());
    lab.supply_entanglement("PA", "PAp", n1)?;
    lab.supply_entanglement("PB", "PBp", n2)?;
    lab.local(Party::Alice, &x1, &["PA", "X"])?;
    lab.local(Party::Bob, &x2, &["PBp", "Y"])?;
    let layout = base.run(&mut lab, "X", "Y")?;
    lab.ancilla("Ea", Party::Alice, n2)?;
    lab.local(Party::Alice, &x2, &[&layout.a_out, "Ea"])?;
    lab.ancilla("Eb", Party::Bob, n1)?;
    lab.local(Party::Bob, &x1, &[&layout.b_out, "Eb"])?;
    lab.local(Party::Alice, &x1, &["X", "PA"])?;
    lab.local(Party::Alice, &x2, &["Ea", "PB"])?;
    lab.local(Party::Bob, &x1, &["Eb", "PAp"])?;
    lab.local(Party::Bob, &x2, &["Y", "PBp"])?;
    for w in ["X", "Y", "Ea", "Eb"].into_iter().chain(layout.wires()) {
        lab.keep_as_garbage(w)?;
    }
    lab.note("pad entanglement is converted into the fixed garbage state phi_bar");

    let mut target = input.clone();
    target.rename_wire("X", "PA")?;
    target.rename_wire("Y", "PBp")?;
    target.copy_into_new("PA", Wire::new("PAp", Party::Bob, n1))?;
    target.copy_into_new("PBp", Wire::new("PB", Party::Alice, n2))?;
    let target = target.tensor(&phi_bar(base)?)?;
    lab.finish(&target)
}

/// The base run directly on the messages, with no pads.
pub fn run_unpadded(base: &dyn BaseExchange, input: &QState) -> Result<(ProtocolResult, BaseLayout)> {
    let (n1, n2) = dims(base)?;
    check_messages(input, n1, n2)?;
    let mut lab = Lab::new(input.clone());
    let layout = base.run(&mut lab, "X", "Y")?;
    for w in layout.wires() {
        lab.keep_as_garbage(w)?;
    }
    let fin = lab.state().clone();
    Ok((lab.finish(&fin)?, layout))
}

/// `|x>^X |y>^Y` message input.
pub fn message_input(base: &dyn BaseExchange, x: usize, y: usize) -> Result<QState> {
    let (n1, n2) = dims(base)?;
    make_basis_state(vec![Wire::new("X", Party::Alice, n1), Wire::new("Y", Party::Bob, n2)], &[x, y])
}

/// `(|0> + |1>)/sqrt(2)` on `X`, `|0>` on `Y`.
pub fn superposed_input(base: &dyn BaseExchange) -> Result<QState> {
    let (n1, n2) = dims(base)?;
    let mut amps = vec![C64::default(); n1 * n2];
    amps[0] = C64::new(1.0, 0.0);
    amps[n2] = C64::new(1.0, 0.0);
    QState::normalized(vec![Wire::new("X", Party::Alice, n1), Wire::new("Y", Party::Bob, n2)], amps)
}

#[derive(Debug, Clone, Serialize)]
pub struct OtpReport {
    pub base: String,
    pub epsilon: f64,
    /// Smallest fidelity of the padded run against its target over all message pairs.
    pub min_fidelity: f64,
    /// Smallest pairwise fidelity between garbage states left for different messages.
    pub min_garbage_overlap_padded: f64,
    pub min_garbage_overlap_unpadded: f64,
    /// `|<00|rho|11>|` of Alice's and Bob's copies of a superposed `x`; `0.5` is fully coherent.
    pub coherence_padded: f64,
    pub coherence_unpadded: f64,
    /// Schmidt coefficients of `phi_bar` across the Alice|Bob cut.
    pub phi_bar_schmidt: Vec<f64>,
}

fn garbage_state(r: &ProtocolResult, drop: &[&str]) -> Result<QState> {
    // basis inputs leave the message copies in product with the garbage
    let mut s = r.final_state.clone();
    for id in drop {
        let i = s.wire_index(id)?;
        let pos = s.labels_of(s.argmax())[i];
        s.remove_wire(id, pos)?;
    }
    let n = s.norm();
    QState::normalized(s.wires().to_vec(), s.amplitudes().iter().map(|a| a / n).collect())
}

fn min_pairwise(states: &[QState]) -> Result<f64> {
    let mut worst: f64 = 1.0;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            worst = worst.min(crate::simcore::fidelity_pure(a, &b.aligned_to(a)?)?);
        }
    }
    Ok(worst)
}

fn coherence(s: &QState, alice: &str, bob: &str) -> Result<f64> {
    let rho = s.partial_trace(&[alice, bob])?;
    let d = rho.wires()[1].dim;
    Ok(rho.matrix()[(0, d + 1)].norm())
}

/// Runs the padded and unpadded protocols on every message pair and on a superposed message.
pub fn otp_report(base: &dyn BaseExchange) -> Result<OtpReport> {
    let (n1, n2) = dims(base)?;
    let mut min_fidelity: f64 = 1.0;
    let (mut padded, mut unpadded) = (Vec::new(), Vec::new());
    for x in 0..n1 {
        for y in 0..n2 {
            let input = message_input(base, x, y)?;
            let r = one_time_pad_transform(base, &input)?;
            min_fidelity = min_fidelity.min(r.fidelity_vs_target);
            padded.push(garbage_state(&r, &["PA", "PB", "PAp", "PBp"])?);
            let (u, _) = run_unpadded(base, &input)?;
            unpadded.push(garbage_state(&u, &["X", "Y"])?);
        }
    }
    let sup = superposed_input(base)?;
    let rp = one_time_pad_transform(base, &sup)?;
    let (ru, layout) = run_unpadded(base, &sup)?;
    let pb = phi_bar(base)?;
    let alice: Vec<String> = pb.ids_of(Party::Alice);
    let alice: Vec<&str> = alice.iter().map(String::as_str).collect();
    Ok(OtpReport {
        base: base.name(),
        epsilon: base.epsilon(),
        min_fidelity,
        min_garbage_overlap_padded: min_pairwise(&padded)?,
        min_garbage_overlap_unpadded: min_pairwise(&unpadded)?,
        coherence_padded: coherence(&rp.final_state, "PA", "PAp")?,
        coherence_unpadded: coherence(&ru.final_state, "X", &layout.b_out)?,
        phi_bar_schmidt: schmidt_decompose(&pb, &alice)?.coefficients,
    })
}
