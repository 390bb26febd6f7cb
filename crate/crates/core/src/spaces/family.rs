use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cube::{special_cube, Cube};
use crate::error::{Error, Result};

/// Dyadic cubes `2^{-k}(j + [0,1]^n)` inside a bounding box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicSpec {
    pub min_level: i32,
    pub max_level: i32,
    pub bbox: Cube,
    /// Levels with more cubes keep those near `targets` plus a seeded sample.
    #[serde(default = "default_max_per_level")]
    pub max_per_level: usize,
    #[serde(default)]
    pub targets: Vec<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

fn default_max_per_level() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// The target is the cube center.
    #[default]
    Centered,
    /// The target is the lower corner.
    Corner,
}

/// Cubes of side `side0 * 2^{-k}`, `k = 0..=levels`, at each target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkSpec {
    pub targets: Vec<Vec<f64>>,
    pub side0: f64,
    pub levels: u32,
    #[serde(default)]
    pub anchor: Anchor,
}

/// Seeded random cubes with log-uniform sides and centers in `bbox`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub count: usize,
    pub bbox: Cube,
    pub min_side: f64,
    pub max_side: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Generation descriptor for a [`CubeFamily`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub dim: usize,
    #[serde(default)]
    pub dyadic: Option<DyadicSpec>,
    #[serde(default)]
    pub shrink: Option<ShrinkSpec>,
    /// Include the special cubes `Q_0..=Q_K`.
    #[serde(default)]
    pub special: Option<u32>,
    #[serde(default)]
    pub random: Option<RandomSpec>,
    #[serde(default)]
    pub explicit: Vec<Cube>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CubeTag {
    Dyadic { level: i32 },
    Shrink { target: usize, level: u32 },
    Special { k: u32 },
    Random,
    Explicit,
}

/// A finite stand-in for "all cubes".
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFamily {
    pub cubes: Vec<Cube>,
    pub tags: Vec<CubeTag>,
    /// Indices of shrinking sequences, largest cube first.
    pub sequences: Vec<Vec<usize>>,
}

impl CubeFamily {
    pub fn from_cubes(cubes: Vec<Cube>) -> Result<Self> {
        if cubes.is_empty() {
            return Err(Error::invalid("cube family must be non-empty"));
        }
        let n = cubes[0].dim();
        if cubes.iter().any(|q| q.dim() != n) {
            return Err(Error::invalid("cube family mixes dimensions"));
        }
        Ok(CubeFamily {
            tags: vec![CubeTag::Explicit; cubes.len()],
            cubes,
            sequences: Vec::new(),
        })
    }

    pub fn generate(spec: &FamilySpec) -> Result<Self> {
        let n = spec.dim;
        if n == 0 {
            return Err(Error::invalid("family dimension must be >= 1"));
        }
        let mut fam = CubeFamily {
            cubes: Vec::new(),
            tags: Vec::new(),
            sequences: Vec::new(),
        };
        if let Some(d) = &spec.dyadic {
            fam.push_dyadic(d, n)?;
        }
        if let Some(s) = &spec.shrink {
            if !(s.side0 > 0.0) {
                return Err(Error::invalid("shrink.side0 must be positive"));
            }
            for (t, target) in s.targets.iter().enumerate() {
                check_dim(target, n, "shrink target")?;
                let mut seq = Vec::new();
                for k in 0..=s.levels {
                    let side = s.side0 * 0.5f64.powi(k as i32);
                    let q = match s.anchor {
                        Anchor::Centered => Cube::new(target.clone(), side)?,
                        Anchor::Corner => Cube::from_corner(target, side)?,
                    };
                    seq.push(fam.cubes.len());
                    fam.cubes.push(q);
                    fam.tags.push(CubeTag::Shrink {
                        target: t,
                        level: k,
                    });
                }
                fam.sequences.push(seq);
            }
        }
        if let Some(k) = spec.special {
            for j in 0..=k {
                fam.cubes.push(special_cube(j, n));
                fam.tags.push(CubeTag::Special { k: j });
            }
        }
        if let Some(r) = &spec.random {
            check_dim(&r.bbox.center, n, "random.bbox")?;
            if !(r.min_side > 0.0) || r.max_side < r.min_side {
                return Err(Error::invalid(
                    "random sides must satisfy 0 < min_side <= max_side",
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            let (lo, hi) = (r.bbox.lower(), r.bbox.upper());
            for _ in 0..r.count {
                let center: Vec<f64> = (0..n).map(|i| rng.gen_range(lo[i]..=hi[i])).collect();
                let t: f64 = rng.gen();
                let side = (r.min_side.ln() + t * (r.max_side / r.min_side).ln()).exp();
                fam.cubes.push(Cube::new(center, side)?);
                fam.tags.push(CubeTag::Random);
            }
        }
        for q in &spec.explicit {
            check_dim(&q.center, n, "explicit cube")?;
            fam.cubes.push(Cube::new(q.center.clone(), q.side)?);
            fam.tags.push(CubeTag::Explicit);
        }
        if fam.cubes.is_empty() {
            return Err(Error::invalid("cube family descriptor produced no cubes"));
        }
        Ok(fam)
    }

    fn push_dyadic(&mut self, d: &DyadicSpec, n: usize) -> Result<()> {
        check_dim(&d.bbox.center, n, "dyadic.bbox")?;
        if d.min_level > d.max_level {
            return Err(Error::invalid("dyadic.min_level exceeds max_level"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
        let (lo, hi) = (d.bbox.lower(), d.bbox.upper());
        for level in d.min_level..=d.max_level {
            let h = 0.5f64.powi(level);
            let first: Vec<i64> = lo.iter().map(|l| (l / h - 1e-9).ceil() as i64).collect();
            let last: Vec<i64> = hi
                .iter()
                .map(|u| (u / h + 1e-9).floor() as i64 - 1)
                .collect();
            if first.iter().zip(&last).any(|(a, b)| b < a) {
                continue;
            }
            let counts: Vec<u64> = first
                .iter()
                .zip(&last)
                .map(|(a, b)| (b - a + 1) as u64)
                .collect();
            let total = counts.iter().try_fold(1u64, |acc, c| acc.checked_mul(*c));
            let mut chosen: BTreeSet<Vec<i64>> = BTreeSet::new();
            match total {
                Some(t) if t as usize <= d.max_per_level => {
                    for flat in 0..t {
                        let mut r = flat;
                        let idx: Vec<i64> = (0..n)
                            .map(|i| {
                                let k = (r % counts[i]) as i64;
                                r /= counts[i];
                                first[i] + k
                            })
                            .collect();
                        chosen.insert(idx);
                    }
                }
                _ => {
                    let budget = d.max_per_level;
                    // cubes around each target: the 2 nearest indices per axis
                    for t in &d.targets {
                        let mut around = vec![Vec::new()];
                        for i in 0..n {
                            let base = (t[i] / h).floor() as i64;
                            let mut next = Vec::new();
                            for pre in &around {
                                for k in [base - 1, base] {
                                    if k >= first[i] && k <= last[i] {
                                        let mut v: Vec<i64> = pre.clone();
                                        v.push(k);
                                        next.push(v);
                                    }
                                }
                            }
                            around = next;
                        }
                        for idx in around {
                            if chosen.len() < budget / 2 || chosen.is_empty() {
                                chosen.insert(idx);
                            }
                        }
                    }
                    let mut attempts = 0;
                    while chosen.len() < budget && attempts < 20 * budget {
                        let idx: Vec<i64> =
                            (0..n).map(|i| rng.gen_range(first[i]..=last[i])).collect();
                        chosen.insert(idx);
                        attempts += 1;
                    }
                }
            }
            for idx in chosen {
                let corner: Vec<f64> = idx.iter().map(|&j| j as f64 * h).collect();
                self.cubes.push(Cube::from_corner(&corner, h)?);
                self.tags.push(CubeTag::Dyadic { level });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cubes.first().map_or(0, Cube::dim)
    }
}

fn check_dim(x: &[f64], n: usize, what: &str) -> Result<()> {
    if x.len() != n {
        return Err(Error::invalid(format!(
            "{what} has dimension {}, expected {n}",
            x.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_1d() -> FamilySpec {
        FamilySpec {
            dim: 1,
            dyadic: Some(DyadicSpec {
                min_level: 0,
                max_level: 12,
                bbox: Cube::interval(-1.0, 1.0).unwrap(),
                max_per_level: 16,
                targets: vec![vec![0.0]],
                seed: 0,
            }),
            shrink: Some(ShrinkSpec {
                targets: vec![vec![0.0]],
                side0: 1.0,
                levels: 12,
                anchor: Anchor::Centered,
            }),
            special: Some(2),
            random: Some(RandomSpec {
                count: 5,
                bbox: Cube::interval(-2.0, 2.0).unwrap(),
                min_side: 0.01,
                max_side: 1.0,
                seed: 9,
            }),
            explicit: vec![],
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = CubeFamily::generate(&spec_1d()).unwrap();
        let b = CubeFamily::generate(&spec_1d()).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn dyadic_levels_stay_in_the_box_and_reach_the_target() {
        let fam = CubeFamily::generate(&spec_1d()).unwrap();
        let bbox = Cube::interval(-1.0, 1.0).unwrap();
        for (q, t) in fam.cubes.iter().zip(&fam.tags) {
            if let CubeTag::Dyadic { level } = t {
                assert!(bbox.contains_cube(q));
                assert_eq!(q.side, 0.5f64.powi(*level));
            }
        }
        let finest = fam
            .cubes
            .iter()
            .zip(&fam.tags)
            .filter(|(_, t)| matches!(t, CubeTag::Dyadic { level: 12 }))
            .map(|(q, _)| q)
            .collect::<Vec<_>>();
        assert!(finest.iter().any(|q| q.lower()[0] == 0.0));
        assert!(finest.len() <= 16);
    }

    #[test]
    fn shrink_sequences_halve() {
        let fam = CubeFamily::generate(&spec_1d()).unwrap();
        assert_eq!(fam.sequences.len(), 1);
        let seq = &fam.sequences[0];
        assert_eq!(seq.len(), 13);
        for w in seq.windows(2) {
            assert_eq!(fam.cubes[w[1]].side * 2.0, fam.cubes[w[0]].side);
        }
    }

    #[test]
    fn two_dimensional_dyadic_is_capped() {
        let spec = FamilySpec {
            dim: 2,
            dyadic: Some(DyadicSpec {
                min_level: -1,
                max_level: 10,
                bbox: Cube::new(vec![0.0, 0.0], 4.0).unwrap(),
                max_per_level: 20,
                targets: vec![vec![0.0, 0.0]],
                seed: 1,
            }),
            ..Default::default()
        };
        let fam = CubeFamily::generate(&spec).unwrap();
        assert!(fam.len() <= 12 * 20);
        assert!(fam
            .cubes
            .iter()
            .any(|q| q.side == 0.5f64.powi(10) && q.contains(&[0.0, 0.0])));
    }

    #[test]
    fn empty_family_is_rejected() {
        assert!(CubeFamily::generate(&FamilySpec {
            dim: 1,
            ..Default::default()
        })
        .is_err());
        assert!(CubeFamily::from_cubes(vec![]).is_err());
    }
}
