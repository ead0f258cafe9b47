//! Remote state preparation from co-cobits, ebits and a small shift register.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::montecarlo::{estimate, haar_state, run_trials, Estimate};
use crate::resources::{int, Dir, ResourceAtom, ResourceExpr};
use crate::simcore::{c64, tol, BlockOp, Party, QState, Wire, C64};

use super::lab::{Lab, ProtocolResult};

fn check(alpha: &[C64], kappa: usize) -> Result<(usize, usize)> {
    let d = alpha.len();
    if d < 2 || !d.is_power_of_two() {
        return domain(format!("dimension {d} is not a power of two >= 2"));
    }
    if kappa == 0 || kappa > d {
        return domain(format!("kappa = {kappa} outside 1..={d}"));
    }
    let n: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
    if (n - 1.0).abs() > tol::CONSTRUCTION {
        return domain(format!("target state has norm^2 {n}"));
    }
    Ok((d, kappa.next_power_of_two()))
}

/// `beta_x = sqrt(sum_{k=1..kappa} |alpha_{x-k}|^2 / kappa)`, indices mod `d`.
pub fn rsp_beta(alpha: &[C64], kappa: usize) -> Vec<f64> {
    let d = alpha.len();
    (0..d)
        .map(|x| {
            let s: f64 = (1..=kappa).map(|k| alpha[(x + d * kappa - k) % d].norm_sqr()).sum();
            (s / kappa as f64).sqrt()
        })
        .collect()
}

/// `F(beta) = sum_x beta_x / sqrt(d)`.
pub fn rsp_f_beta(alpha: &[C64], kappa: usize) -> f64 {
    let d = alpha.len() as f64;
    rsp_beta(alpha, kappa).iter().sum::<f64>() / d.sqrt()
}

/// Alice's preparation `|x>|0> -> |x>|b_x>` on `(A, K)`.
///
/// Each `|b_x>` is reached by a phase times a Householder reflection, so the
/// operator is unitary on the whole block.
struct Prep {
    d: usize,
    dk: usize,
    blocks: Vec<(C64, Vec<C64>, f64)>,
}

impl Prep {
    fn new(alpha: &[C64], kappa: usize, dk: usize, beta: &[f64]) -> Prep {
        let d = alpha.len();
        let blocks = (0..d)
            .map(|x| {
                let mut b = vec![C64::default(); dk];
                if beta[x] > 0.0 {
                    for (k, bk) in b.iter_mut().enumerate().take(kappa) {
                        *bk = alpha[(x + d * kappa - k - 1) % d] / ((kappa as f64).sqrt() * beta[x]);
                    }
                } else {
                    b[0] = c64(1.0, 0.0);
                }
                // rotate so b[0] is real and nonnegative, reflect e0 onto it
                let phase = if b[0].norm() > 0.0 { b[0] / b[0].norm() } else { c64(1.0, 0.0) };
                let mut v: Vec<C64> = b.iter().map(|z| -(z / phase)).collect();
                v[0] += c64(1.0, 0.0);
                let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                (phase, v, vn)
            })
            .collect();
        Prep { d, dk, blocks }
    }
}

impl BlockOp for Prep {
    fn factor_dims(&self) -> Vec<usize> {
        if self.dk > 1 {
            vec![self.d, self.dk]
        } else {
            vec![self.d]
        }
    }

    fn apply_block(&self, input: &[C64], output: &mut [C64]) {
        for (x, (phase, v, vn)) in self.blocks.iter().enumerate() {
            let r = x * self.dk..(x + 1) * self.dk;
            let (inp, out) = (&input[r.clone()], &mut output[r]);
            if *vn < 1e-30 {
                for (o, i) in out.iter_mut().zip(inp) {
                    *o = phase * i;
                }
                continue;
            }
            let dot: C64 = v.iter().zip(inp).map(|(a, b)| a.conj() * b).sum();
            let s = dot * (2.0 / vn);
            for ((o, i), vk) in out.iter_mut().zip(inp).zip(v) {
                *o = phase * (i - vk * s);
            }
        }
    }
}

/// Bob's decoder `|k>|x> -> |k>|x - k - 1>` on `(K, B)`.
struct Unshift {
    d: usize,
    dk: usize,
    kappa: usize,
}

impl BlockOp for Unshift {
    fn factor_dims(&self) -> Vec<usize> {
        if self.dk > 1 {
            vec![self.dk, self.d]
        } else {
            vec![self.d]
        }
    }

    fn apply_block(&self, input: &[C64], output: &mut [C64]) {
        let d = self.d;
        for k in 0..self.dk {
            let s = if k < self.kappa { k + 1 } else { 0 };
            for x in 0..d {
                output[k * d + (x + d - s % d) % d] = input[k * d + x];
            }
        }
    }
}

/// Prepares `alpha` in Bob's lab from `log d` ebits, `log d` co-cobits and the shift register.
///
/// Alice maps the shared `|Phi_d>` to `sum_x |x>^A |x>^B |b_x>^K / sqrt(d)`,
/// erases `A` against `B` with co-cobits and sends `K`. Bob's state is then
/// close to `|beta> = sum_k |k> U_k |alpha> / sqrt(kappa)` and he undoes the
/// shifts. The fidelity against `|uniform_kappa>^K |alpha>^B` is `F(beta)^2`.
pub fn rsp_cocobit(alpha: &[C64], kappa: usize) -> Result<ProtocolResult> {
    let (d, dk) = check(alpha, kappa)?;
    let beta = rsp_beta(alpha, kappa);
    let mut lab = Lab::new(QState::scalar());
    lab.supply_entanglement("A", "B", d)?;
    let prep = Prep::new(alpha, kappa, dk, &beta);
    let unshift = Unshift { d, dk, kappa };
    if dk > 1 {
        lab.ancilla("K", Party::Alice, dk)?;
        lab.local_op(Party::Alice, &prep, "prep_b", &["A", "K"])?;
    } else {
        lab.local_op(Party::Alice, &prep, "prep_b", &["A"])?;
    }
    lab.cocobit("B", "A")?;
    if dk > 1 {
        lab.send("K")?;
        lab.local_op(Party::Bob, &unshift, "unshift", &["K", "B"])?;
    } else {
        lab.local_op(Party::Bob, &unshift, "unshift", &["B"])?;
    }
    if dk != kappa {
        lab.note(format!("kappa = {kappa} held in a {dk}-level register"));
    }
    let f = rsp_f_beta(alpha, kappa);
    lab.note(format!("F(beta) = {f:.12}"));

    let b = Wire::new("B", Party::Bob, d);
    let target = if dk > 1 {
        let mut amps = vec![C64::default(); dk * d];
        for k in 0..kappa {
            for x in 0..d {
                amps[k * d + x] = alpha[x] / (kappa as f64).sqrt();
            }
        }
        QState::new(vec![Wire::new("K", Party::Bob, dk), b], amps)?
    } else {
        QState::new(vec![b], alpha.to_vec())?
    };
    lab.finish(&target)
}

/// The resources the protocol consumes, `log d [qq] + log d [qq->q] + log kappa' [q->q]`.
pub fn rsp_cost(d: usize, kappa: usize) -> ResourceExpr {
    let ld = d.trailing_zeros() as i64;
    let lk = kappa.next_power_of_two().trailing_zeros() as i64;
    let mut e = ResourceExpr::zero();
    e.add_term(int(ld), ResourceAtom::Ebit);
    e.add_term(int(ld), ResourceAtom::Cocobit(Dir::AtoB));
    e.add_term(int(lk), ResourceAtom::Qubit(Dir::AtoB));
    e
}

#[derive(Debug, Clone, Serialize)]
pub struct RspMonteCarlo {
    pub d: usize,
    pub kappa: usize,
    pub seed: u64,
    pub f_beta: Estimate,
    /// `sqrt((1 + 1/d) / (1 + 1/kappa))`
    pub bound: f64,
    /// Mean at least `bound - 3 se`.
    pub passes: bool,
}

/// Mean `F(beta)` over Haar-random targets.
pub fn rsp_montecarlo(d: usize, kappa: usize, trials: u64, seed: u64) -> Result<RspMonteCarlo> {
    if d < 2 || !d.is_power_of_two() || kappa == 0 || kappa > d {
        return domain(format!("need d a power of two and 1 <= kappa <= d (d = {d}, kappa = {kappa})"));
    }
    let samples = run_trials(seed, trials, |rng| rsp_f_beta(&haar_state(d, rng), kappa));
    let f_beta = estimate(&samples);
    let bound = ((1.0 + 1.0 / d as f64) / (1.0 + 1.0 / kappa as f64)).sqrt();
    Ok(RspMonteCarlo { d, kappa, seed, f_beta, bound, passes: f_beta.mean >= bound - 3.0 * f_beta.se })
}

#[derive(Debug, Clone, Serialize)]
pub struct RspMoments {
    pub d: usize,
    pub kappa: usize,
    pub seed: u64,
    pub mean_tr_p: Estimate,
    pub mean_tr_p_sq: Estimate,
    /// `kappa / d`
    pub expect_tr_p: f64,
    /// `kappa (kappa + 1) / (d (d + 1))`
    pub expect_tr_p_sq: f64,
    /// Both means within 4 standard errors of the closed forms.
    pub within: bool,
}

/// Moments of `tr P alpha` for the projector onto the first `kappa` basis states.
pub fn rsp_moment_check(d: usize, kappa: usize, trials: u64, seed: u64) -> Result<RspMoments> {
    if d == 0 || kappa == 0 || kappa > d {
        return domain(format!("need 1 <= kappa <= d (d = {d}, kappa = {kappa})"));
    }
    let samples = run_trials(seed, trials, |rng| {
        let a = haar_state(d, rng);
        a[..kappa].iter().map(|z| z.norm_sqr()).sum::<f64>()
    });
    let sq: Vec<f64> = samples.iter().map(|t| t * t).collect();
    let (m1, m2) = (estimate(&samples), estimate(&sq));
    let (df, kf) = (d as f64, kappa as f64);
    let e1 = kf / df;
    let e2 = kf * (kf + 1.0) / (df * (df + 1.0));
    let ok = |e: &Estimate, want: f64| (e.mean - want).abs() <= 4.0 * e.se + 1e-12;
    Ok(RspMoments {
        d,
        kappa,
        seed,
        within: ok(&m1, e1) && ok(&m2, e2),
        mean_tr_p: m1,
        mean_tr_p_sq: m2,
        expect_tr_p: e1,
        expect_tr_p_sq: e2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;

    #[test]
    fn flat_state_needs_no_shift_register() {
        let d = 8;
        let alpha: Vec<C64> =
            (0..d).map(|x| C64::from_polar(1.0 / (d as f64).sqrt(), 0.7 * x as f64)).collect();
        let r = rsp_cocobit(&alpha, 1).unwrap();
        assert!((r.fidelity_vs_target - 1.0).abs() < 1e-10);
        assert_eq!(r.ledger.consumed, rsp_cost(8, 1));
    }

    #[test]
    fn qubit_with_two_shifts() {
        let alpha = [c64(1.0, 0.0), c64(0.0, 0.0)];
        // beta_0 = beta_1 = sqrt(1/2) by hand, so F = 1
        let beta = rsp_beta(&alpha, 2);
        assert!((beta[0] - 0.5f64.sqrt()).abs() < 1e-15 && (beta[1] - 0.5f64.sqrt()).abs() < 1e-15);
        let r = rsp_cocobit(&alpha, 2).unwrap();
        assert!((r.fidelity_vs_target - rsp_f_beta(&alpha, 2).powi(2)).abs() < 1e-8);
    }

    #[test]
    fn protocol_matches_formula_on_random_targets() {
        for (t, (d, kappa)) in [(8, 3), (16, 4), (4, 4), (16, 1)].into_iter().enumerate() {
            let alpha = haar_state(d, &mut trial_rng(5, t as u64));
            let r = rsp_cocobit(&alpha, kappa).unwrap();
            let f = rsp_f_beta(&alpha, kappa);
            assert!((r.fidelity_vs_target - f * f).abs() < 1e-8, "d={d} kappa={kappa}");
            assert_eq!(r.ledger.consumed, rsp_cost(d, kappa));
        }
    }

    #[test]
    fn bad_dimensions() {
        let alpha = vec![c64(1.0 / 3f64.sqrt(), 0.0); 3];
        assert!(matches!(rsp_cocobit(&alpha, 1), Err(crate::Error::Domain(_))));
        let alpha = [c64(1.0, 0.0), c64(0.0, 0.0)];
        assert!(rsp_cocobit(&alpha, 3).is_err());
    }

    #[test]
    fn full_rank_moments_are_exact() {
        let m = rsp_moment_check(4, 4, 200, 1).unwrap();
        assert!((m.mean_tr_p.mean - 1.0).abs() < 1e-12);
        assert!((m.mean_tr_p_sq.mean - 1.0).abs() < 1e-12);
        assert!(m.within);
    }

    #[test]
    fn moments_small_case() {
        let m = rsp_moment_check(8, 3, 20_000, 9).unwrap();
        assert_eq!(m.expect_tr_p, 3.0 / 8.0);
        assert!((m.expect_tr_p_sq - 12.0 / 72.0).abs() < 1e-15);
        assert!(m.within, "{m:?}");
    }
}
