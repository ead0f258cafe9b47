//! Entropic quantities of classical-quantum ensembles pushed through a gate.
//!
//! An ensemble is a list of `(p_x, psi_x)` with every `psi_x` on the same
//! wires. Bob's wires together form `BB'`; the wires a gate acts on are
//! recorded in the ensemble (by default the unprimed Alice wires followed by
//! the unprimed Bob wires, so `A'` and `B'` are spectators).

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gates::GateSpec;
use crate::montecarlo::haar_state;
use crate::simcore::{entropy_bits, make_basis_state, tol, trace_distance, C64, DensityOp, Party, QState, StateDump, Wire};

#[derive(Debug, Clone)]
pub struct PureEnsemble {
    entries: Vec<(f64, QState)>,
    targets: Vec<String>,
}

/// JSON form of one ensemble entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub p: f64,
    #[serde(flatten)]
    pub state: StateDump,
}

fn is_primed(id: &str) -> bool {
    id.ends_with('\'')
}

impl PureEnsemble {
    pub fn new(entries: Vec<(f64, QState)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return domain("ensemble has no entries");
        };
        let total: f64 = entries.iter().map(|e| e.0).sum();
        if (total - 1.0).abs() > tol::CONSTRUCTION || entries.iter().any(|e| e.0 < 0.0) {
            return domain(format!("ensemble probabilities sum to {total}"));
        }
        for (_, s) in &entries {
            if s.wires() != first.wires() {
                return domain("ensemble entries must share one wire layout");
            }
            if (s.norm() - 1.0).abs() > tol::CONSTRUCTION {
                return domain("ensemble state is not normalized");
            }
        }
        let mut targets: Vec<String> =
            first.ids_of(Party::Alice).into_iter().filter(|id| !is_primed(id)).collect();
        targets.extend(first.ids_of(Party::Bob).into_iter().filter(|id| !is_primed(id)));
        Ok(PureEnsemble { entries, targets })
    }

    /// Overrides the wires a gate acts on; Alice's targets must come first.
    pub fn with_targets(mut self, targets: &[&str]) -> Result<Self> {
        let layout = &self.entries[0].1;
        for t in targets {
            if layout.wire(t).is_none() {
                return domain(format!("no wire `{t}` in the ensemble"));
            }
        }
        self.targets = targets.iter().map(|t| t.to_string()).collect();
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<EnsembleEntry> =
            serde_json::from_str(text).map_err(|e| crate::Error::Domain(format!("bad ensemble JSON: {e}")))?;
        let entries = raw.iter().map(|e| Ok((e.p, QState::from_dump(&e.state)?))).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(f64, QState)] {
        &self.entries
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    /// Every entry pushed through `u` on the target wires.
    pub fn apply(&self, u: &GateSpec) -> Result<PureEnsemble> {
        let targets: Vec<&str> = self.targets.iter().map(String::as_str).collect();
        let entries = self.entries.iter().map(|(p, s)| Ok((*p, s.apply(u, &targets)?))).collect::<Result<_>>()?;
        Ok(PureEnsemble { entries, targets: self.targets.clone() })
    }

    fn bob_marginals(&self) -> Result<Vec<(f64, DensityOp)>> {
        self.entries.iter().map(|(p, s)| Ok((*p, s.party_marginal(Party::Bob)?))).collect()
    }

    /// Dimension of `BB'`.
    pub fn bob_dim(&self) -> usize {
        self.entries[0].1.wires().iter().filter(|w| w.party == Party::Bob).map(|w| w.dim).product()
    }
}

/// `I(X;BB') = H(sum_x p_x rho_x) - sum_x p_x H(rho_x)` with `rho_x` Bob's marginal.
pub fn mutual_info_xbb(e: &PureEnsemble) -> Result<f64> {
    let parts = e.bob_marginals()?;
    let avg = DensityOp::mix(&parts)?;
    Ok(entropy_bits(&avg) - parts.iter().map(|(p, r)| p * entropy_bits(r)).sum::<f64>())
}

/// `H(BB'|X) = sum_x p_x H(rho_x)`.
pub fn cond_entropy_bb_given_x(e: &PureEnsemble) -> Result<f64> {
    Ok(e.bob_marginals()?.iter().map(|(p, r)| p * entropy_bits(r)).sum())
}

/// Changes in `I(X;BB')` and `H(BB'|X)` caused by applying `u` to the ensemble.
pub fn delta_ie(u: &GateSpec, e: &PureEnsemble) -> Result<(f64, f64)> {
    let out = e.apply(u)?;
    Ok((
        mutual_info_xbb(&out)? - mutual_info_xbb(e)?,
        cond_entropy_bb_given_x(&out)? - cond_entropy_bb_given_x(e)?,
    ))
}

/// Binary entropy in bits.
pub fn h2(x: f64) -> f64 {
    crate::simcore::shannon_bits(&[x, 1.0 - x])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FannesCheck {
    /// Largest per-entry trace distance between the two outputs.
    pub measured_eps: f64,
    pub eps: f64,
    /// `|I_U - I_V|` on the outputs.
    pub delta_i: f64,
    /// `|H_U - H_V|` on the outputs.
    pub delta_h: f64,
    pub bound_i: f64,
    pub bound_h: f64,
    /// False when `measured_eps > eps`; the comparison is then skipped.
    pub precondition_ok: bool,
    pub pass: bool,
}

/// Compares the output quantities of `u` and `v` against the continuity bounds
/// `2 H2(eps) + 4 eps log d` (conditional entropy) and twice that (mutual information),
/// `d` being the dimension of `BB'`.
pub fn fannes_gap_check(u: &GateSpec, v: &GateSpec, e: &PureEnsemble, eps: f64) -> Result<FannesCheck> {
    if !(0.0..=1.0).contains(&eps) {
        return domain(format!("eps = {eps} outside [0, 1]"));
    }
    let measured = output_distance(u, v, e)?;
    let (ou, ov) = (e.apply(u)?, e.apply(v)?);
    let logd = (e.bob_dim() as f64).log2();
    let bound_h = 2.0 * h2(eps) + 4.0 * eps * logd;
    let bound_i = 2.0 * bound_h;
    let precondition_ok = measured <= eps + tol::CONSTRUCTION;
    let delta_i = (mutual_info_xbb(&ou)? - mutual_info_xbb(&ov)?).abs();
    let delta_h = (cond_entropy_bb_given_x(&ou)? - cond_entropy_bb_given_x(&ov)?).abs();
    let slack = tol::ROUND_TRIP;
    Ok(FannesCheck {
        measured_eps: measured,
        eps,
        delta_i,
        delta_h,
        bound_i,
        bound_h,
        precondition_ok,
        pass: precondition_ok && delta_i <= bound_i + slack && delta_h <= bound_h + slack,
    })
}

/// `H(A) - H(AB)`.
pub fn coherent_info(h_a: f64, h_ab: f64) -> f64 {
    h_a - h_ab
}

/// `ry(theta)` on the last qubit of Bob's side, then `u`.
///
/// The rotation goes first so that it interacts with the gate; a rotation
/// applied afterwards would leave every quantity on `BB'` unchanged.
pub fn with_bob_rotation(u: &GateSpec, theta: f64) -> Result<GateSpec> {
    let da: usize = u.alice_dims.iter().product();
    let db: usize = u.bob_dims.iter().product();
    if !db.is_multiple_of(2) {
        return domain("Bob's side has no qubit to rotate");
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ry = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|x| C64::new(x, 0.0));
    let local = DMatrix::<C64>::identity(da * db / 2, da * db / 2).kronecker(&ry);
    GateSpec::dense(format!("{u}*ry:{theta}"), u.alice_dims.clone(), u.bob_dims.clone(), u.matrix() * local)
}

fn register_wires(m: u32) -> Result<Vec<Wire>> {
    if !(1..=crate::gates::MAX_M).contains(&m) {
        return domain(format!("m = {m} outside 1..={}", crate::gates::MAX_M));
    }
    let n = 1usize << m;
    Ok(vec![Wire::new("A", Party::Alice, n), Wire::new("B", Party::Bob, n)])
}

/// Uniform over `|x>^A |0>^B` for all `m`-bit `x`.
pub fn message_ensemble(m: u32) -> Result<PureEnsemble> {
    let wires = register_wires(m)?;
    let n = 1usize << m;
    let entries = (0..n).map(|x| Ok((1.0 / n as f64, make_basis_state(wires.clone(), &[x, 0])?))).collect::<Result<_>>()?;
    PureEnsemble::new(entries)
}

/// The single state `2^{-m/2} sum_x |x>^A |0>^B`.
pub fn superposition_ensemble(m: u32) -> Result<PureEnsemble> {
    let wires = register_wires(m)?;
    let n = 1usize << m;
    let mut amps = vec![C64::default(); n * n];
    for x in 0..n {
        amps[x * n] = C64::new(1.0, 0.0);
    }
    PureEnsemble::new(vec![(1.0, QState::normalized(wires, amps)?)])
}

/// Largest per-entry trace distance between the outputs of `u` and `v`.
pub fn output_distance(u: &GateSpec, v: &GateSpec, e: &PureEnsemble) -> Result<f64> {
    let (ou, ov) = (e.apply(u)?, e.apply(v)?);
    let mut worst: f64 = 0.0;
    for ((_, a), (_, b)) in ou.entries.iter().zip(&ov.entries) {
        worst = worst.max(trace_distance(a, b)?);
    }
    Ok(worst)
}

/// Random ensemble of `k` Haar states on `A` (dim `da`), `A'`, `B` (dim `db`), `B'`.
pub fn random_ensemble(k: usize, da: usize, db: usize, rng: &mut impl Rng) -> Result<PureEnsemble> {
    let wires = vec![
        Wire::new("A", Party::Alice, da),
        Wire::qubit("A'", Party::Alice),
        Wire::new("B", Party::Bob, db),
        Wire::qubit("B'", Party::Bob),
    ];
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let entries = weights
        .iter()
        .map(|w| Ok((w / total, QState::new(wires.clone(), haar_state(da * 2 * db * 2, rng))?)))
        .collect::<Result<_>>()?;
    PureEnsemble::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{u_xoxo, v_m};
    use crate::montecarlo::trial_rng;
    use crate::simcore::c64;

    fn b_qubit(a0: f64, a1: f64) -> QState {
        QState::normalized(vec![Wire::qubit("B", Party::Bob)], vec![c64(a0, 0.0), c64(a1, 0.0)]).unwrap()
    }

    fn alice_basis_ensemble(m: u32) -> PureEnsemble {
        message_ensemble(m).unwrap()
    }

    #[test]
    fn holevo_examples() {
        let single = PureEnsemble::new(vec![(1.0, b_qubit(0.3, 0.7))]).unwrap();
        assert!(mutual_info_xbb(&single).unwrap().abs() < 1e-12);
        let bits = PureEnsemble::new(vec![(0.5, b_qubit(1.0, 0.0)), (0.5, b_qubit(0.0, 1.0))]).unwrap();
        assert!((mutual_info_xbb(&bits).unwrap() - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = PureEnsemble::new(vec![(0.5, b_qubit(1.0, 0.0)), (0.5, b_qubit(h, h))]).unwrap();
        let lam = (1.0 + h) / 2.0;
        let want = -lam * lam.log2() - (1.0 - lam) * (1.0 - lam).log2();
        assert!((mutual_info_xbb(&e).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.6009).abs() < 1e-3);
    }

    #[test]
    fn vm_sends_m_bits_or_makes_m_ebits() {
        for m in 1..=3 {
            let (di, dh) = delta_ie(&v_m(m).unwrap(), &alice_basis_ensemble(m)).unwrap();
            assert!((di - m as f64).abs() < 1e-9 && dh.abs() < 1e-9);

            let (di, dh) = delta_ie(&v_m(m).unwrap(), &superposition_ensemble(m).unwrap()).unwrap();
            assert!(di.abs() < 1e-9 && (dh - m as f64).abs() < 1e-9, "m = {m}: {di} {dh}");
        }
    }

    #[test]
    fn wire_mismatch_is_rejected() {
        let e = alice_basis_ensemble(1);
        assert!(matches!(delta_ie(&v_m(2).unwrap(), &e), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn one_way_gain_is_bounded_by_schmidt_rank() {
        for (g, m) in [(v_m(1).unwrap(), 1usize), (v_m(2).unwrap(), 2), (u_xoxo(2).unwrap(), 2)] {
            let bound = (g.operator_schmidt_rank() as f64).log2();
            let n = 1usize << m;
            for t in 0..20 {
                let mut rng = trial_rng(5, t);
                let wires = [Wire::new("A", Party::Alice, n), Wire::new("B", Party::Bob, n)];
                let entries: Vec<(f64, QState)> = (0..4)
                    .map(|_| {
                        let a = QState::new(vec![wires[0].clone()], haar_state(n, &mut rng)).unwrap();
                        let b = make_basis_state(vec![wires[1].clone()], &[0]).unwrap();
                        (0.25, a.tensor(&b).unwrap())
                    })
                    .collect();
                let (di, _) = delta_ie(&g, &PureEnsemble::new(entries).unwrap()).unwrap();
                assert!(di <= bound + 1e-9, "{g}: {di} > {bound}");
            }
        }
    }

    #[test]
    fn fannes_trivial_cases() {
        let mut rng = trial_rng(9, 0);
        let e = random_ensemble(4, 4, 4, &mut rng).unwrap();
        let u = v_m(2).unwrap();
        let c = fannes_gap_check(&u, &u, &e, 0.0).unwrap();
        assert!(c.pass && c.bound_i == 0.0 && c.delta_i < 1e-9);
        let v = with_bob_rotation(&u, 0.01).unwrap();
        let c = fannes_gap_check(&u, &v, &e, 0.0).unwrap();
        assert!(!c.precondition_ok && !c.pass);
        let c = fannes_gap_check(&u, &v, &e, 0.01).unwrap();
        assert!(c.precondition_ok && c.pass, "{c:?}");
    }

    #[test]
    fn coherent_info_examples() {
        assert_eq!(coherent_info(1.0, 0.0), 1.0);
        assert_eq!(coherent_info(1.0, 2.0), -1.0);
        assert!((coherent_info(h2(0.6), 0.0) - 0.97095).abs() < 1e-5);
    }

    #[test]
    fn json_round_trip() {
        let e = alice_basis_ensemble(1);
        let raw: Vec<EnsembleEntry> =
            e.entries().iter().map(|(p, s)| EnsembleEntry { p: *p, state: s.dump() }).collect();
        let back = PureEnsemble::from_json(&serde_json::to_string(&raw).unwrap()).unwrap();
        assert_eq!(back.entries().len(), 2);
        assert_eq!(back.targets(), &["A".to_string(), "B".to_string()]);
    }
}
