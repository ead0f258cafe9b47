//! Approximate entanglement concentration on products of Schmidt spectra.
//!
//! Everything here is diagonal in the Schmidt basis, so a product state of
//! `n` pairs is described by the multiset of products `lambda = prod_i p^i_{j_i}`.
//! These are enumerated by type class (how many times each coefficient value
//! is chosen) rather than string by string.
//!
//! Pipeline of [`concentrate`]:
//! 1. drop coefficients below `2^-gamma`, `gamma = (n delta^2)^(1/3)`, renormalize;
//! 2. keep products with `|log2 lambda + E| <= n delta / 2`;
//! 3. split that window into `m = floor(2^(n delta / 4))` equal bins in `log2 lambda`,
//!    half-open `[lower, upper)` with the last bin closed;
//! 4. accept bins of mass at least `eps = 2^(-n delta / 2)` and score each by its
//!    fidelity with a maximally entangled state of the same rank.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::simcore::shannon_bits;

/// Schmidt coefficients (squared amplitudes) of one pure bipartite state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// `(coefficient, multiplicity)`, coefficients strictly descending.
    pub values: Vec<(f64, u32)>,
}

impl SchmidtSpectrum {
    pub fn new(values: Vec<(f64, u32)>) -> Result<Self> {
        let mut merged: Vec<(f64, u32)> = Vec::new();
        let mut vals = values;
        vals.retain(|&(_, k)| k > 0);
        vals.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (p, k) in vals {
            if !(p > 0.0 && p <= 1.0 + 1e-12) {
                return domain(format!("Schmidt coefficient {p} outside (0, 1]"));
            }
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += k,
                _ => merged.push((p, k)),
            }
        }
        let total: f64 = merged.iter().map(|&(p, k)| p * k as f64).sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("Schmidt coefficients sum to {total}"));
        }
        Ok(SchmidtSpectrum { values: merged })
    }

    /// From a probability vector, merging equal entries.
    pub fn from_probs(p: &[f64]) -> Result<Self> {
        Self::new(p.iter().filter(|&&x| x > 0.0).map(|&x| (x, 1)).collect())
    }

    pub fn rank(&self) -> u32 {
        self.values.iter().map(|v| v.1).sum()
    }

    /// Entanglement in bits.
    pub fn entropy(&self) -> f64 {
        let probs: Vec<f64> =
            self.values.iter().flat_map(|&(p, k)| std::iter::repeat_n(p, k as usize)).collect();
        shannon_bits(&probs)
    }
}

/// Largest number of type classes either enumeration will visit.
pub const MAX_CLASSES: usize = 1_000_000;
/// Largest number of bins a report may hold.
pub const MAX_BINS: usize = 1 << 20;

/// One group of equal products: `count` eigenvalues each equal to `2^log2_lambda`.
#[derive(Debug, Clone, Copy)]
struct Class {
    log2_lambda: f64,
    count: f64,
    mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    /// Largest Schmidt rank among the inputs.
    pub d: u32,
    /// Entanglement of the inputs as given.
    pub e_raw: f64,
    /// Entanglement after truncation and renormalization; equals `e_raw` when nothing is cut.
    pub e: f64,
    pub delta: f64,
    pub gamma: f64,
    pub truncation_threshold: f64,
    pub truncation_active: bool,
    /// Probability removed by truncation.
    pub truncation_loss: f64,
    /// `n d 2^-gamma`
    pub truncation_loss_bound: f64,
    pub bins: usize,
    pub epsilon: f64,
    /// Window on `-log2 lambda`.
    pub window: (f64, f64),
    pub p_typical: f64,
    pub out_of_window_mass: f64,
    pub bin_masses: Vec<f64>,
    pub bin_ranks: Vec<f64>,
    pub accepted_bins: Vec<usize>,
    pub rejected_mass: f64,
    /// `e - n delta`
    pub ebits_out: f64,
    /// `None` when no bin is accepted.
    pub worst_bin_fidelity: Option<f64>,
    /// `1 - n delta ln 2 / m`
    pub fidelity_floor: f64,
    /// Every accepted bin holds at least `eps 2^(e - n delta / 2)` eigenvalues.
    pub count_check: bool,
    /// Every accepted bin has rank at least `2^ebits_out`.
    pub rank_check: bool,
    /// Sum over accepted bins of `rank / 2^ebits_out`.
    pub rank_ratio_sum: f64,
    /// `2^(2 n delta)`
    pub residual_rank_bound: f64,
    /// Whether `n >= max(3 (log d)^3 / delta^2, 20 log2(n delta) / delta)`.
    pub precondition_met: bool,
}

impl ConcentrationReport {
    /// Names of fields that differ from `other` by more than `tol`.
    pub fn differing_fields(&self, other: &Self, tol: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        let close = |a: f64, b: f64| (a - b).abs() <= tol || (a.is_infinite() && a == b);
        let vec_close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y));
        macro_rules! scalar {
            ($($f:ident),*) => {$(if !close(self.$f as f64, other.$f as f64) { out.push(stringify!($f)); })*};
        }
        scalar!(n, d, e_raw, e, delta, gamma, truncation_loss, bins, epsilon, p_typical, out_of_window_mass);
        scalar!(rejected_mass, ebits_out, fidelity_floor, rank_ratio_sum);
        if !close(self.window.0, other.window.0) || !close(self.window.1, other.window.1) {
            out.push("window");
        }
        if self.truncation_active != other.truncation_active {
            out.push("truncation_active");
        }
        if !vec_close(&self.bin_masses, &other.bin_masses) {
            out.push("bin_masses");
        }
        // ranks are integer counts; compare relatively
        let ranks_ok = self.bin_ranks.len() == other.bin_ranks.len()
            && self.bin_ranks.iter().zip(&other.bin_ranks).all(|(a, b)| (a - b).abs() <= tol * a.abs().max(1.0));
        if !ranks_ok {
            out.push("bin_ranks");
        }
        if self.accepted_bins != other.accepted_bins {
            out.push("accepted_bins");
        }
        match (self.worst_bin_fidelity, other.worst_bin_fidelity) {
            (Some(a), Some(b)) if close(a, b) => {}
            (None, None) => {}
            _ => out.push("worst_bin_fidelity"),
        }
        if self.count_check != other.count_check {
            out.push("count_check");
        }
        if self.rank_check != other.rank_check {
            out.push("rank_check");
        }
        out
    }
}

/// `2 exp(-n delta^2 / (gamma^2 2 ln 2))`.
pub fn chernoff_window_bound(spectra: &[SchmidtSpectrum], delta: f64, gamma: f64) -> f64 {
    let n = spectra.len() as f64;
    2.0 * (-n * delta * delta / (gamma * gamma * 2.0 * std::f64::consts::LN_2)).exp()
}

/// `4 (log2 d)^2 / (n delta^2)`, the variance-based alternative.
pub fn chebyshev_window_bound(spectra: &[SchmidtSpectrum], delta: f64) -> f64 {
    let n = spectra.len() as f64;
    let d = spectra.iter().map(SchmidtSpectrum::rank).max().unwrap_or(1) as f64;
    4.0 * d.log2().powi(2) / (n * delta * delta)
}

pub fn gamma_for(n: usize, delta: f64) -> f64 {
    (n as f64 * delta * delta).cbrt()
}

fn check_args(spectra: &[SchmidtSpectrum], delta: f64) -> Result<()> {
    if spectra.is_empty() {
        return domain("no spectra given");
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta = {delta} must be positive"));
    }
    Ok(())
}

fn bin_count(n: usize, delta: f64) -> Result<usize> {
    let m = (n as f64 * delta / 4.0).exp2().floor();
    if m > MAX_BINS as f64 {
        return Err(Error::Size(format!("{m} bins exceed the limit of {MAX_BINS}")));
    }
    Ok((m as usize).max(1))
}

/// Window and binning shared by both enumerations.
fn assemble(
    spectra: &[SchmidtSpectrum],
    delta: f64,
    e_raw: f64,
    e: f64,
    truncation_active: bool,
    truncation_loss: f64,
    classes: &[Class],
) -> Result<ConcentrationReport> {
    let n = spectra.len();
    let nf = n as f64;
    let d = spectra.iter().map(SchmidtSpectrum::rank).max().unwrap_or(1);
    let gamma = gamma_for(n, delta);
    let m = bin_count(n, delta)?;
    let half = nf * delta / 2.0;
    let epsilon = (-half).exp2();
    let (lo, hi) = (-e - half, -e + half);
    let width = (hi - lo) / m as f64;
    let slack = 1e-12 * (1.0 + e.abs());

    let mut masses = vec![0.0; m];
    let mut ranks = vec![0.0; m];
    let mut root_sums = vec![0.0; m];
    let mut lambda_max = vec![0.0f64; m];
    for c in classes {
        let x = c.log2_lambda;
        if c.count == 0.0 || x < lo - slack || x > hi + slack {
            continue;
        }
        let b = (((x - lo) / width).floor().max(0.0) as usize).min(m - 1);
        masses[b] += c.mass;
        ranks[b] += c.count;
        root_sums[b] += c.count * (x / 2.0).exp2();
        lambda_max[b] = lambda_max[b].max(x.exp2());
    }
    let p_typical: f64 = masses.iter().sum();
    let accepted: Vec<usize> = (0..m).filter(|&b| masses[b] >= epsilon && masses[b] > 0.0).collect();
    let rejected_mass = p_typical - accepted.iter().map(|&b| masses[b]).sum::<f64>();
    let ebits_out = e - nf * delta;
    let worst = accepted
        .iter()
        .map(|&b| (root_sums[b] * root_sums[b] / (masses[b] * ranks[b])).min(1.0))
        .min_by(f64::total_cmp);
    let need = epsilon * (e - half).exp2();
    let count_check = accepted.iter().all(|&b| ranks[b] >= need * (1.0 - 1e-12));
    let rank_check = accepted.iter().all(|&b| ranks[b] >= ebits_out.exp2() * (1.0 - 1e-12));
    let rank_ratio_sum = accepted.iter().map(|&b| ranks[b] / ebits_out.exp2()).sum();
    let logd = (d as f64).log2();
    let precondition_met = nf >= 3.0 * logd.powi(3) / (delta * delta) && nf >= 20.0 * (nf * delta).log2() / delta;
    let total_mass: f64 = classes.iter().map(|c| c.mass).sum();
    Ok(ConcentrationReport {
        n,
        d,
        e_raw,
        e,
        delta,
        gamma,
        truncation_threshold: (-gamma).exp2(),
        truncation_active,
        truncation_loss,
        truncation_loss_bound: nf * d as f64 * (-gamma).exp2(),
        bins: m,
        epsilon,
        window: (e - half, e + half),
        p_typical,
        out_of_window_mass: (total_mass - p_typical).max(0.0),
        bin_masses: masses,
        bin_ranks: ranks,
        accepted_bins: accepted,
        rejected_mass: rejected_mass.max(0.0),
        ebits_out,
        worst_bin_fidelity: worst,
        fidelity_floor: 1.0 - nf * delta * std::f64::consts::LN_2 / m as f64,
        count_check,
        rank_check,
        rank_ratio_sum,
        residual_rank_bound: (2.0 * nf * delta).exp2(),
        precondition_met,
    })
}

fn log2_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).log2();
    }
    t
}

/// All ways to split `n` into `r` ordered nonnegative parts.
fn compositions(n: u32, r: usize, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, limit: usize) -> Result<()> {
    if cur.len() + 1 == r {
        cur.push(n);
        out.push(cur.clone());
        cur.pop();
        if out.len() > limit {
            return Err(Error::Size(format!("more than {limit} type classes")));
        }
        return Ok(());
    }
    for k in (0..=n).rev() {
        cur.push(k);
        compositions(n - k, r, out, cur, limit)?;
        cur.pop();
    }
    Ok(())
}

/// Type classes of a product of spectra, grouping identical spectra and using multinomials.
fn classes_by_multinomial(spectra: &[SchmidtSpectrum]) -> Result<Vec<Class>> {
    let mut groups: Vec<(&SchmidtSpectrum, u32)> = Vec::new();
    for s in spectra {
        match groups.iter_mut().find(|(g, _)| *g == s) {
            Some(g) => g.1 += 1,
            None => groups.push((s, 1)),
        }
    }
    let lf = log2_factorials(spectra.len());
    // (log2 lambda, log2 count)
    let mut acc: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for (s, copies) in groups {
        let mut comps = Vec::new();
        compositions(copies, s.values.len(), &mut comps, &mut Vec::new(), MAX_CLASSES)?;
        let per: Vec<(f64, f64)> = comps
            .iter()
            .map(|k| {
                let mut ll = 0.0;
                let mut lc = lf[copies as usize];
                for (&kt, &(p, mult)) in k.iter().zip(&s.values) {
                    ll += kt as f64 * p.log2();
                    lc += kt as f64 * (mult as f64).log2() - lf[kt as usize];
                }
                (ll, lc)
            })
            .collect();
        if acc.len().saturating_mul(per.len()) > MAX_CLASSES {
            return Err(Error::Size(format!("more than {MAX_CLASSES} type classes")));
        }
        acc = acc.iter().flat_map(|a| per.iter().map(move |b| (a.0 + b.0, a.1 + b.1))).collect();
    }
    Ok(acc
        .into_iter()
        .map(|(ll, lc)| Class { log2_lambda: ll, count: lc.exp2().round(), mass: (ll + lc).exp2() })
        .collect())
}

fn truncate(s: &SchmidtSpectrum, threshold: f64) -> (Option<SchmidtSpectrum>, f64) {
    let kept: Vec<(f64, u32)> = s.values.iter().copied().filter(|&(p, _)| p >= threshold).collect();
    let mass: f64 = kept.iter().map(|&(p, k)| p * k as f64).sum();
    if kept.is_empty() {
        return (None, 0.0);
    }
    let renorm = SchmidtSpectrum { values: kept.into_iter().map(|(p, k)| (p / mass, k)).collect() };
    (Some(renorm), mass)
}

/// Runs the concentration pipeline and reports masses, bins and fidelities.
///
/// If truncation empties some spectrum the report has no accepted bins.
pub fn concentrate(spectra: &[SchmidtSpectrum], delta: f64) -> Result<ConcentrationReport> {
    check_args(spectra, delta)?;
    let n = spectra.len();
    let threshold = (-gamma_for(n, delta)).exp2();
    let e_raw: f64 = spectra.iter().map(SchmidtSpectrum::entropy).sum();
    let mut kept_mass = 1.0;
    let mut truncated = Vec::with_capacity(n);
    let mut active = false;
    let mut emptied = false;
    for s in spectra {
        let (t, mass) = truncate(s, threshold);
        active |= t.as_ref() != Some(s);
        kept_mass *= mass;
        match t {
            Some(t) => truncated.push(t),
            None => emptied = true,
        }
    }
    if emptied {
        return assemble(spectra, delta, e_raw, 0.0, true, 1.0, &[]);
    }
    let e = if active { truncated.iter().map(SchmidtSpectrum::entropy).sum() } else { e_raw };
    let classes = classes_by_multinomial(&truncated)?;
    assemble(spectra, delta, e_raw, e, active, 1.0 - kept_mass, &classes)
}

/// Independent reference: builds the classes copy by copy, keyed by how often each
/// coefficient value occurs, with no truncation.
pub fn exact_oracle(spectra: &[SchmidtSpectrum], delta: f64) -> Result<ConcentrationReport> {
    oracle_with_limit(spectra, delta, MAX_CLASSES)
}

fn oracle_with_limit(spectra: &[SchmidtSpectrum], delta: f64, limit: usize) -> Result<ConcentrationReport> {
    check_args(spectra, delta)?;
    let mut values: Vec<f64> = spectra.iter().flat_map(|s| s.values.iter().map(|v| v.0)).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let index = |p: f64| values.iter().position(|&v| v == p).expect("value collected above");
    let mut table: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    table.insert(vec![0; values.len()], 1.0);
    for s in spectra {
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (key, count) in &table {
            for &(p, mult) in &s.values {
                let mut k = key.clone();
                k[index(p)] += 1;
                *next.entry(k).or_insert(0.0) += count * mult as f64;
            }
        }
        if next.len() > limit {
            return Err(Error::Size(format!("more than {limit} type classes")));
        }
        table = next;
    }
    let classes: Vec<Class> = table
        .iter()
        .map(|(k, &count)| {
            let lambda: f64 = k.iter().zip(&values).map(|(&e, &p)| p.powi(e as i32)).product();
            Class { log2_lambda: lambda.log2(), count, mass: count * lambda }
        })
        .collect();
    let e: f64 = spectra
        .iter()
        .map(|s| s.values.iter().map(|&(p, k)| -(k as f64) * p * p.log2()).sum::<f64>())
        .sum();
    assemble(spectra, delta, e, e, false, 0.0, &classes)
}

/// `n` copies of the same spectrum.
pub fn copies(s: &SchmidtSpectrum, n: usize) -> Vec<SchmidtSpectrum> {
    vec![s.clone(); n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn spectrum_validation() {
        assert!(SchmidtSpectrum::from_probs(&[0.5, 0.4]).is_err());
        let s = SchmidtSpectrum::from_probs(&[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(s.values, vec![(0.5, 1), (0.25, 2)]);
        assert!((s.entropy() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn flat_spectrum_is_one_bin() {
        let s = SchmidtSpectrum::from_probs(&[0.5, 0.5]).unwrap();
        let (n, delta) = (16, 0.3);
        let r = concentrate(&copies(&s, n), delta).unwrap();
        assert!(!r.truncation_active);
        assert_eq!(r.e, 16.0);
        assert!((r.p_typical - 1.0).abs() < 1e-12);
        assert_eq!(r.accepted_bins.len(), 1);
        assert_eq!(r.bin_ranks[r.accepted_bins[0]], 65536.0);
        assert!((r.worst_bin_fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.ebits_out - (16.0 - 16.0 * 0.3)).abs() < 1e-12);
        let o = exact_oracle(&copies(&s, n), delta).unwrap();
        assert!(r.differing_fields(&o, 1e-9).is_empty());
        assert!(chernoff_window_bound(&copies(&s, n), delta, r.gamma) >= o.out_of_window_mass);
    }

    #[test]
    fn product_state_is_trivial() {
        let s = SchmidtSpectrum::from_probs(&[1.0]).unwrap();
        let r = concentrate(&copies(&s, 5), 0.5).unwrap();
        assert_eq!(r.e, 0.0);
        assert!((r.p_typical - 1.0).abs() < 1e-12);
        assert_eq!(r.worst_bin_fidelity, Some(1.0));
    }

    #[test]
    fn oracle_window_is_a_binomial_sum() {
        let (n, delta, p) = (10u64, 0.4, 0.7f64);
        let s = SchmidtSpectrum::from_probs(&[p, 1.0 - p]).unwrap();
        let o = exact_oracle(&copies(&s, n as usize), delta).unwrap();
        let e = n as f64 * (-(p * p.log2()) - (1.0 - p) * (1.0 - p).log2());
        let mut want = 0.0;
        for k in 0..=n {
            let x = k as f64 * (1.0 / p).log2() + (n - k) as f64 * (1.0 / (1.0 - p)).log2();
            if (x - e).abs() <= n as f64 * delta / 2.0 {
                want += binom(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            }
        }
        assert!((o.p_typical - want).abs() < 1e-12, "{} vs {want}", o.p_typical);
    }

    #[test]
    fn inactive_truncation_matches_oracle() {
        // 2^-gamma = 2^-(12)^(1/3) ~ 0.2 is below every coefficient
        let a = SchmidtSpectrum::from_probs(&[0.5, 0.28, 0.22]).unwrap();
        let b = SchmidtSpectrum::from_probs(&[0.6, 0.4]).unwrap();
        let mut spectra = copies(&a, 6);
        spectra.extend(copies(&b, 6));
        let r = concentrate(&spectra, 1.0).unwrap();
        assert!(!r.truncation_active);
        let o = exact_oracle(&spectra, 1.0).unwrap();
        assert_eq!(r.differing_fields(&o, 1e-9), Vec::<&str>::new());
    }

    #[test]
    fn truncation_changes_entropy() {
        let s = SchmidtSpectrum::from_probs(&[0.6, 0.4]).unwrap();
        let r = concentrate(&copies(&s, 20), 0.3).unwrap();
        assert!(r.truncation_threshold > 0.4);
        assert!(r.truncation_active);
        assert_eq!(r.e, 0.0);
        assert!((r.truncation_loss - (1.0 - 0.6f64.powi(20))).abs() < 1e-12);
    }

    #[test]
    fn chernoff_is_monotone() {
        let s = SchmidtSpectrum::from_probs(&[0.6, 0.4]).unwrap();
        let delta = 0.3;
        let b: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| chernoff_window_bound(&copies(&s, n), delta, gamma_for(n, delta)))
            .collect();
        assert!(b[0] > b[1] && b[1] > b[2]);
    }

    #[test]
    fn oracle_size_limit() {
        let probs: Vec<f64> = (1..=12).map(|i| i as f64 / 78.0).collect();
        let s = SchmidtSpectrum::from_probs(&probs).unwrap();
        assert!(matches!(oracle_with_limit(&copies(&s, 16), 0.5, 10_000), Err(Error::Size(_))));
        assert!(oracle_with_limit(&copies(&s, 2), 0.5, 10_000).is_ok());
    }
}
