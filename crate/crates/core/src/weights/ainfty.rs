use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weight::Weight;
use crate::error::{Error, Result};
use crate::spaces::{Cube, CubeFamily, Exponent};
use crate::varnorm::NormOptions;

/// A set `E ⊂ Q` given as a union of non-overlapping sub-cubes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub e: Vec<Cube>,
    pub q: Cube,
}

impl Pair {
    pub fn new(e: Vec<Cube>, q: Cube) -> Result<Pair> {
        if e.is_empty() {
            return Err(Error::invalid("E must contain at least one cube"));
        }
        if let Some(c) = e.iter().find(|c| !q.contains_cube(c)) {
            return Err(Error::invalid(format!(
                "sub-cube centered at {:?} is not inside Q",
                c.center
            )));
        }
        Ok(Pair { e, q })
    }

    pub fn e_measure(&self) -> f64 {
        self.e.iter().map(Cube::measure).sum()
    }
}

/// Pairs for every family cube: the `2^n` children, the centered cube of
/// side `ℓ/4`, eight seeded random sub-cubes, and `E = Q`.
pub fn ainfty_pairs(family: &CubeFamily, seed: u64) -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for q in &family.cubes {
        for c in q.children() {
            out.push(Pair {
                e: vec![c],
                q: q.clone(),
            });
        }
        out.push(Pair {
            e: vec![Cube {
                center: q.center.clone(),
                side: q.side / 4.0,
            }],
            q: q.clone(),
        });
        let lo = q.lower();
        for _ in 0..8 {
            let side = q.side * rng.gen_range(0.125..0.5);
            let corner: Vec<f64> = lo
                .iter()
                .map(|&l| l + rng.gen_range(0.0..1.0) * (q.side - side))
                .collect();
            if let Ok(e) = Cube::from_corner(&corner, side) {
                out.push(Pair {
                    e: vec![e],
                    q: q.clone(),
                });
            }
        }
        out.push(Pair {
            e: vec![q.clone()],
            q: q.clone(),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AInftyEstimate {
    pub delta: f64,
    pub c1: f64,
    pub pairs_used: usize,
    /// Pairs with `W(E) = 0`.
    pub skipped: Vec<Pair>,
    /// Cubes where `W(Q)` is infinite.
    pub divergent: Vec<Cube>,
    pub witness: Option<Pair>,
}

/// Fit `|E|/|Q| <= C1 (W(E)/W(Q))^δ` with `δ = 1/p_+` and `W = w^{p(.)} dx`.
pub fn ainfty_fit(
    w: &Weight,
    p: &Exponent,
    pairs: &[Pair],
    opts: &NormOptions,
) -> Result<AInftyEstimate> {
    p.require_bounded()?;
    let delta = 1.0 / p.p_plus();
    enum Outcome {
        Ratio(f64),
        Skipped,
        Divergent,
    }
    let outcomes = pairs
        .par_iter()
        .map(|pair| {
            let wq = match w.measure(p, std::slice::from_ref(&pair.q), opts) {
                Ok(v) => v,
                Err(e) if e.is_divergence() => return Ok(Outcome::Divergent),
                Err(e) => return Err(e),
            };
            let we = w.measure(p, &pair.e, opts)?;
            if we <= 0.0 {
                return Ok(Outcome::Skipped);
            }
            let frac = (pair.e_measure() / pair.q.measure()).min(1.0);
            Ok(Outcome::Ratio(frac * (wq / we).powf(delta)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = AInftyEstimate {
        delta,
        c1: 0.0,
        pairs_used: 0,
        skipped: Vec::new(),
        divergent: Vec::new(),
        witness: None,
    };
    for (pair, o) in pairs.iter().zip(outcomes) {
        match o {
            Outcome::Ratio(r) => {
                est.pairs_used += 1;
                if r > est.c1 {
                    est.c1 = r;
                    est.witness = Some(pair.clone());
                }
            }
            Outcome::Skipped => est.skipped.push(pair.clone()),
            Outcome::Divergent => {
                if !est.divergent.contains(&pair.q) {
                    est.divergent.push(pair.q.clone());
                }
            }
        }
    }
    if est.pairs_used == 0 {
        return Err(Error::NoCertificate("no usable A∞ pair".into()));
    }
    Ok(est)
}

/// `1 + 1/(2^{n+2+1/δ} (n+1) ln 2 · C1^{1/δ})`.
pub fn rh_exponent_from_ainfty(delta: f64, c1: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0,1], got {delta}"
        )));
    }
    if !(c1 >= 1.0) || !c1.is_finite() {
        return Err(Error::invalid(format!(
            "C1 must be finite and >= 1, got {c1}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    let nf = n as f64;
    let denom = 2f64.powf(nf + 2.0 + 1.0 / delta)
        * (nf + 1.0)
        * std::f64::consts::LN_2
        * c1.powf(1.0 / delta);
    Ok(1.0 + 1.0 / denom)
}
