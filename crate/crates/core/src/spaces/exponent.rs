use std::f64::consts::E;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cube::Cube;
use super::quadrature::{integrate_cube, Cut, IntegrationPlan};
use crate::error::{Error, Result};

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Declared bounds and log-Hölder constants of an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentMeta {
    pub p_minus: f64,
    pub p_plus: f64,
    pub p_infty: f64,
    pub c0: f64,
    pub c_inf: f64,
}

#[derive(Clone)]
enum Repr {
    Constant(f64),
    Piecewise {
        axis: usize,
        at: f64,
        left: f64,
        right: f64,
    },
    LogDecay {
        base: f64,
        amp: f64,
    },
    Custom {
        f: PointFn,
        cuts: Vec<Cut>,
        features: Vec<Vec<f64>>,
    },
    Scaled(f64, Arc<Exponent>),
    Conjugate(Arc<Exponent>),
    /// `1/q = 1/a + 1/b`.
    Harmonic(Arc<Exponent>, Arc<Exponent>),
}

/// An exponent function `p(.)` with declared metadata.
#[derive(Clone)]
pub struct Exponent {
    repr: Repr,
    meta: ExponentMeta,
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Constant(c) => format!("constant({c})"),
            Repr::Piecewise {
                axis,
                at,
                left,
                right,
            } => format!("piecewise(x{axis} < {at} ? {left} : {right})"),
            Repr::LogDecay { base, amp } => format!("log_decay({base}, {amp})"),
            Repr::Custom { .. } => "custom".to_string(),
            Repr::Scaled(s, p) => format!("{s} * {p:?}"),
            Repr::Conjugate(p) => format!("conj({p:?})"),
            Repr::Harmonic(a, b) => format!("harmonic({a:?}, {b:?})"),
        };
        f.debug_struct("Exponent")
            .field("kind", &kind)
            .field("meta", &self.meta)
            .finish()
    }
}

/// `p / (p - 1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate_value(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn check_value(name: &str, v: f64) -> Result<()> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::invalid(format!(
            "{name} must be a finite exponent >= 1, got {v}"
        )));
    }
    Ok(())
}

impl Exponent {
    pub fn constant(p: f64) -> Result<Self> {
        check_value("constant exponent", p)?;
        Ok(Exponent {
            repr: Repr::Constant(p),
            meta: ExponentMeta {
                p_minus: p,
                p_plus: p,
                p_infty: p,
                c0: 0.0,
                c_inf: 0.0,
            },
        })
    }

    /// `left` for `x[axis] < at`, `right` otherwise.
    ///
    /// A jump is not log-Hölder, so both constants are declared infinite.
    pub fn piecewise(axis: usize, at: f64, left: f64, right: f64) -> Result<Self> {
        check_value("left exponent", left)?;
        check_value("right exponent", right)?;
        if !at.is_finite() {
            return Err(Error::invalid("piecewise breakpoint must be finite"));
        }
        let jump = left != right;
        Ok(Exponent {
            repr: Repr::Piecewise {
                axis,
                at,
                left,
                right,
            },
            meta: ExponentMeta {
                p_minus: left.min(right),
                p_plus: left.max(right),
                p_infty: right,
                c0: if jump { f64::INFINITY } else { 0.0 },
                c_inf: if jump { f64::INFINITY } else { 0.0 },
            },
        })
    }

    /// `base + amp / log(e + |x|)`.
    pub fn log_decay(base: f64, amp: f64) -> Result<Self> {
        check_value("log-decay base", base)?;
        check_value("log-decay peak", base + amp)?;
        Ok(Exponent {
            repr: Repr::LogDecay { base, amp },
            meta: ExponentMeta {
                p_minus: base.min(base + amp),
                p_plus: base.max(base + amp),
                p_infty: base,
                c0: amp.abs() / (E * E),
                c_inf: amp.abs(),
            },
        })
    }

    /// A user-supplied exponent; the metadata is trusted and can be checked
    /// with [`Exponent::validate_on`].
    pub fn custom(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        meta: ExponentMeta,
        cuts: Vec<Cut>,
        features: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_value("p_minus", meta.p_minus)?;
        check_value("p_plus", meta.p_plus)?;
        if meta.p_minus > meta.p_plus {
            return Err(Error::invalid("p_minus exceeds p_plus"));
        }
        Ok(Exponent {
            repr: Repr::Custom {
                f: Arc::new(f),
                cuts,
                features,
            },
            meta,
        })
    }

    pub fn meta(&self) -> ExponentMeta {
        self.meta
    }

    pub fn p_minus(&self) -> f64 {
        self.meta.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.meta.p_plus
    }

    pub fn p_infty(&self) -> f64 {
        self.meta.p_infty
    }

    /// The constant value when the exponent is known to be constant.
    pub fn as_constant(&self) -> Option<f64> {
        match &self.repr {
            Repr::Constant(c) => Some(*c),
            _ if self.meta.p_minus == self.meta.p_plus => Some(self.meta.p_minus),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Repr::Constant(c) => *c,
            Repr::Piecewise {
                axis,
                at,
                left,
                right,
            } => {
                if x[*axis] < *at {
                    *left
                } else {
                    *right
                }
            }
            Repr::LogDecay { base, amp } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                base + amp / (E + r).ln()
            }
            Repr::Custom { f, .. } => f(x),
            Repr::Scaled(s, p) => s * p.eval(x),
            Repr::Conjugate(p) => conjugate_value(p.eval(x)),
            Repr::Harmonic(a, b) => 1.0 / (1.0 / a.eval(x) + 1.0 / b.eval(x)),
        }
    }

    /// Planes across which the exponent jumps.
    pub fn cuts(&self) -> Vec<Cut> {
        match &self.repr {
            Repr::Piecewise { axis, at, .. } => vec![Cut {
                axis: *axis,
                at: *at,
            }],
            Repr::Custom { cuts, .. } => cuts.clone(),
            Repr::Scaled(_, p) | Repr::Conjugate(p) => p.cuts(),
            Repr::Harmonic(a, b) => {
                let mut c = a.cuts();
                c.extend(b.cuts());
                c
            }
            _ => Vec::new(),
        }
    }

    /// Points where the exponent is not smooth (quadrature refines toward them).
    pub fn features(&self, dim: usize) -> Vec<Vec<f64>> {
        match &self.repr {
            Repr::LogDecay { .. } => vec![vec![0.0; dim]],
            Repr::Custom { features, .. } => features.clone(),
            Repr::Scaled(_, p) | Repr::Conjugate(p) => p.features(dim),
            Repr::Harmonic(a, b) => {
                let mut f = a.features(dim);
                f.extend(b.features(dim));
                f
            }
            _ => Vec::new(),
        }
    }

    /// `s p(.)`.
    pub fn scale(&self, s: f64) -> Result<Exponent> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::invalid(format!(
                "scale factor must be positive, got {s}"
            )));
        }
        if s == 1.0 {
            return Ok(self.clone());
        }
        let m = self.meta;
        let meta = ExponentMeta {
            p_minus: s * m.p_minus,
            p_plus: s * m.p_plus,
            p_infty: s * m.p_infty,
            c0: s * m.c0,
            c_inf: s * m.c_inf,
        };
        check_value("scaled p_minus", meta.p_minus)?;
        if let Repr::Constant(c) = self.repr {
            return Exponent::constant(s * c);
        }
        Ok(Exponent {
            repr: Repr::Scaled(s, Arc::new(self.clone())),
            meta,
        })
    }

    /// The pointwise conjugate `p'(.)`; conjugating twice returns the original.
    ///
    /// When `p_minus = 1` the result has `p_plus = ∞`; norms refuse such
    /// exponents with [`Error::UnboundedConjugate`].
    pub fn conjugate(&self) -> Exponent {
        if let Repr::Conjugate(p) = &self.repr {
            return (**p).clone();
        }
        let m = self.meta;
        let gap = m.p_minus - 1.0;
        let lh = |c: f64| {
            if c == 0.0 {
                0.0
            } else if gap > 0.0 {
                c / (gap * gap)
            } else {
                f64::INFINITY
            }
        };
        Exponent {
            repr: Repr::Conjugate(Arc::new(self.clone())),
            meta: ExponentMeta {
                p_minus: conjugate_value(m.p_plus),
                p_plus: conjugate_value(m.p_minus),
                p_infty: conjugate_value(m.p_infty),
                c0: lh(m.c0),
                c_inf: lh(m.c_inf),
            },
        }
    }

    /// The exponent `q` with `1/q = 1/self + 1/other` pointwise.
    pub fn harmonic_sum(&self, other: &Exponent) -> Result<Exponent> {
        let hs = |a: f64, b: f64| 1.0 / (1.0 / a + 1.0 / b);
        let (a, b) = (self.meta, other.meta);
        let meta = ExponentMeta {
            p_minus: hs(a.p_minus, b.p_minus),
            p_plus: hs(a.p_plus, b.p_plus),
            p_infty: hs(a.p_infty, b.p_infty),
            c0: a.c0 + b.c0,
            c_inf: a.c_inf + b.c_inf,
        };
        check_value("harmonic p_minus", meta.p_minus)?;
        Ok(Exponent {
            repr: Repr::Harmonic(Arc::new(self.clone()), Arc::new(other.clone())),
            meta,
        })
    }

    /// Exponent for left openness: `q` with `q' = s p'`.
    pub fn left_openness(&self, s: f64) -> Result<Exponent> {
        if !(self.meta.p_minus > 1.0) {
            return Err(Error::UnboundedConjugate(
                "left openness needs p_minus > 1".into(),
            ));
        }
        Ok(self.conjugate().scale(s)?.conjugate())
    }

    /// Require a finite upper bound, as every norm computation does.
    pub fn require_bounded(&self) -> Result<()> {
        if self.meta.p_plus.is_finite() {
            return Ok(());
        }
        if matches!(self.repr, Repr::Conjugate(_)) {
            Err(Error::UnboundedConjugate(
                "conjugate of an exponent with p_minus = 1".into(),
            ))
        } else {
            Err(Error::invalid("exponent must have p_plus < ∞"))
        }
    }

    /// Check the declared metadata against point samples.
    pub fn validate_on(&self, grid: &[Vec<f64>]) -> Result<()> {
        let m = self.meta;
        let slack = 1e-12;
        for x in grid {
            let v = self.eval(x);
            if v < m.p_minus - slack || v > m.p_plus + slack {
                return Err(Error::invalid(format!(
                    "p({x:?}) = {v} outside [{}, {}]",
                    m.p_minus, m.p_plus
                )));
            }
        }
        let est = estimate_lh_constants(self, grid);
        if est.c0_hat > m.c0 * (1.0 + 1e-9) + slack {
            return Err(Error::invalid(format!(
                "sampled LH0 constant {} exceeds declared {}",
                est.c0_hat, m.c0
            )));
        }
        let cinf = sup_lh_inf(self, grid, m.p_infty);
        if cinf > m.c_inf * (1.0 + 1e-9) + slack {
            return Err(Error::invalid(format!(
                "sampled LH∞ constant {cinf} exceeds declared {}",
                m.c_inf
            )));
        }
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sup_lh_inf(p: &Exponent, grid: &[Vec<f64>], p_inf: f64) -> f64 {
    grid.iter()
        .map(|x| (p.eval(x) - p_inf).abs() * (E + norm(x)).ln())
        .fold(0.0, f64::max)
}

/// Empirical log-Hölder constants over a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhEstimate {
    pub c0_hat: f64,
    pub c_inf_hat: f64,
    pub p_infty_hat: f64,
}

/// Smallest constants satisfying both log-Hölder inequalities on `grid`.
///
/// `p_infty_hat` is the intercept of the least-squares line of `p(x)` against
/// `1/log(e+|x|)`, which is exact for exponents of the form `a + b/log(e+|x|)`.
pub fn estimate_lh_constants(p: &Exponent, grid: &[Vec<f64>]) -> LhEstimate {
    let vals: Vec<f64> = grid.iter().map(|x| p.eval(x)).collect();
    let ts: Vec<f64> = grid.iter().map(|x| 1.0 / (E + norm(x)).ln()).collect();
    let k = vals.len() as f64;
    let p_infty_hat = if vals.is_empty() {
        f64::NAN
    } else {
        let mt = ts.iter().sum::<f64>() / k;
        let mv = vals.iter().sum::<f64>() / k;
        let stt: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
        let stv: f64 = ts.iter().zip(&vals).map(|(t, v)| (t - mt) * (v - mv)).sum();
        if stt > 1e-300 {
            mv - stv / stt * mt
        } else {
            mv
        }
    };
    let mut c0_hat: f64 = 0.0;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let d = grid[i]
                .iter()
                .zip(&grid[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            if d > 0.0 && d < 0.5 {
                c0_hat = c0_hat.max((vals[i] - vals[j]).abs() * -d.ln());
            }
        }
    }
    let c_inf_hat = sup_lh_inf(p, grid, p_infty_hat);
    LhEstimate {
        c0_hat,
        c_inf_hat,
        p_infty_hat,
    }
}

/// A seeded point cloud with near pairs and far points, for LH estimation.
pub fn sample_grid(dim: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count + 1);
    out.push(vec![0.0; dim]);
    for k in 0..count {
        // radii spread geometrically so far points are represented
        let r = radius.powf(k as f64 / count.max(1) as f64) - 1.0 + rng.gen::<f64>();
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let len = norm(&dir).max(1e-12);
        let x: Vec<f64> = dir.iter().map(|d| d / len * r).collect();
        let h = 10f64.powf(-rng.gen_range(0.5..6.0));
        let y: Vec<f64> = x
            .iter()
            .map(|v| v + h * (rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        out.push(x);
        out.push(y);
    }
    out
}

/// `p_Q` with `1/p_Q = ⨍_Q 1/p`.
pub fn harmonic_mean(p: &Exponent, q: &Cube) -> Result<f64> {
    if let Some(c) = p.as_constant() {
        return Ok(c);
    }
    let plan = IntegrationPlan::new(q.dim())
        .with_cuts(p.cuts())
        .with_singular_points(p.features(q.dim()));
    let inv = integrate_cube(|x| 1.0 / p.eval(x), q, &plan)?;
    Ok(q.measure() / inv)
}

/// The constant in `|Q|^{p_-(Q) - p_+(Q)} <= C_D`:
/// `max{(2√n)^{n(p+ - p-)}, exp(C0 (1 + log2 √n))}`.
pub fn diening_constant(p: &Exponent, n: usize) -> f64 {
    let m = p.meta();
    let nf = n as f64;
    let a = (2.0 * nf.sqrt()).powf(nf * (m.p_plus - m.p_minus));
    let b = (m.c0 * (1.0 + nf.sqrt().log2())).exp();
    a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conjugate_values() {
        let p = Exponent::constant(2.0).unwrap();
        assert_eq!(p.conjugate().eval(&[0.3]), 2.0);
        let p = Exponent::constant(4.0 / 3.0).unwrap();
        assert_relative_eq!(p.conjugate().eval(&[0.0]), 4.0, max_relative = 1e-15);
        let p = Exponent::piecewise(0, 0.0, 2.0, 3.0).unwrap();
        assert_eq!(p.conjugate().eval(&[1.0]), 1.5);
        assert_eq!(p.conjugate().eval(&[-1.0]), 2.0);
    }

    #[test]
    fn conjugate_is_an_involution() {
        let p = Exponent::log_decay(1.5, 0.7).unwrap();
        let pp = p.conjugate().conjugate();
        for x in sample_grid(2, 50.0, 100, 3) {
            assert_eq!(pp.eval(&x), p.eval(&x));
        }
        assert_eq!(pp.meta(), p.meta());
    }

    #[test]
    fn conjugate_metadata() {
        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let c = p.conjugate();
        assert_relative_eq!(c.p_minus(), 1.5);
        assert_relative_eq!(c.p_plus(), 2.0);
        assert_relative_eq!(c.p_infty(), 2.0);
        c.validate_on(&sample_grid(1, 100.0, 200, 1)).unwrap();
        let one = Exponent::constant(1.0).unwrap();
        assert!(one.conjugate().p_plus().is_infinite());
        assert!(matches!(
            one.conjugate().require_bounded(),
            Err(Error::UnboundedConjugate(_))
        ));
    }

    #[test]
    fn harmonic_means() {
        let q = Cube::interval(-1.0, 1.0).unwrap();
        assert_eq!(
            harmonic_mean(&Exponent::constant(2.0).unwrap(), &q).unwrap(),
            2.0
        );
        let p = Exponent::piecewise(0, 0.0, 2.0, 4.0).unwrap();
        assert_relative_eq!(
            harmonic_mean(&p, &q).unwrap(),
            8.0 / 3.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn harmonic_mean_matches_simpson_oracle() {
        // composite Simpson on 10^6 subintervals of 1/p over [0, 1]
        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += c / p.eval(&[x]);
        }
        let oracle = 1.0 / (s * h / 3.0);
        let q = Cube::interval(0.0, 1.0).unwrap();
        assert_relative_eq!(harmonic_mean(&p, &q).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn lh_estimates() {
        let grid = sample_grid(1, 1e4, 300, 7);
        let c = estimate_lh_constants(&Exponent::constant(2.0).unwrap(), &grid);
        assert_eq!((c.c0_hat, c.c_inf_hat), (0.0, 0.0));
        assert_relative_eq!(c.p_infty_hat, 2.0, epsilon = 1e-12);

        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let c = estimate_lh_constants(&p, &grid);
        assert_relative_eq!(c.p_infty_hat, 2.0, epsilon = 1e-9);
        assert!(c.c_inf_hat <= 1.0 + 1e-9);
        assert!(c.c0_hat <= p.meta().c0);
    }

    #[test]
    fn lh0_declared_constant_dominates_dense_sup() {
        // dense-grid oracle: near pairs (x, x + h) on a fine lattice around 0
        let p = Exponent::log_decay(1.2, E * E).unwrap();
        assert_relative_eq!(p.meta().c0, 1.0, max_relative = 1e-15);
        let mut sup: f64 = 0.0;
        for i in 0..2000 {
            let x = -1.0 + i as f64 * 1e-3;
            for k in 1..40 {
                let h = 0.49 * 0.8f64.powi(k);
                let d = (p.eval(&[x]) - p.eval(&[x + h])).abs() * -h.ln();
                sup = sup.max(d);
            }
        }
        assert!(sup <= 1.0, "sup {sup}");
        let grid = sample_grid(1, 10.0, 400, 11);
        assert!(estimate_lh_constants(&p, &grid).c0_hat <= 1.0);
    }

    #[test]
    fn diening_substitution() {
        let c = Exponent::constant(3.0).unwrap();
        assert_eq!(diening_constant(&c, 1), 1.0);
        let p = Exponent::custom(
            |_| 2.0,
            ExponentMeta {
                p_minus: 2.0,
                p_plus: 3.0,
                p_infty: 2.0,
                c0: 0.0,
                c_inf: 0.0,
            },
            vec![],
            vec![],
        )
        .unwrap();
        assert_relative_eq!(diening_constant(&p, 1), 2.0);
        let p = Exponent::custom(
            |_| 2.0,
            ExponentMeta {
                p_minus: 2.0,
                p_plus: 3.0,
                p_infty: 2.0,
                c0: 1.0,
                c_inf: 0.0,
            },
            vec![],
            vec![],
        )
        .unwrap();
        assert_relative_eq!(diening_constant(&p, 4), 256.0, max_relative = 1e-12);
    }

    #[test]
    fn scaling_and_left_openness() {
        let p = Exponent::constant(1.5).unwrap();
        assert_eq!(p.scale(2.0).unwrap().eval(&[0.0]), 3.0);
        let q = p.left_openness(1.1).unwrap();
        // q' = 1.1 * 3
        assert_relative_eq!(conjugate_value(q.eval(&[0.2])), 3.3, max_relative = 1e-14);
        assert!(Exponent::constant(1.0).unwrap().left_openness(1.1).is_err());
        assert!(p.scale(0.5).is_err());
    }

    #[test]
    fn rejects_unbounded_or_small_exponents() {
        assert!(Exponent::constant(0.9).is_err());
        assert!(Exponent::constant(f64::INFINITY).is_err());
        assert!(Exponent::piecewise(0, 0.0, 2.0, f64::NAN).is_err());
    }

    #[test]
    fn validation_catches_wrong_metadata() {
        let bad = Exponent::custom(
            |x| 2.0 + 1.0 / (E + x[0].abs()).ln(),
            ExponentMeta {
                p_minus: 2.0,
                p_plus: 3.0,
                p_infty: 2.0,
                c0: 1.0,
                c_inf: 0.5,
            },
            vec![],
            vec![],
        )
        .unwrap();
        assert!(bad.validate_on(&sample_grid(1, 100.0, 50, 0)).is_err());
    }
}
