use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-parallel cube given by its center and side length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Vec<f64>,
    pub side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, side: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("cube must have dimension >= 1"));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::invalid(format!(
                "cube side must be positive, got {side}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("cube center must be finite"));
        }
        Ok(Cube { center, side })
    }

    /// The interval `[lo, hi]` as a one-dimensional cube.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Cube::new(vec![0.5 * (lo + hi)], hi - lo)
    }

    /// The cube `[lo, lo + side]^n`.
    pub fn from_corner(lo: &[f64], side: f64) -> Result<Self> {
        Cube::new(lo.iter().map(|l| l + 0.5 * side).collect(), side)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim() as i32)
    }

    /// `kQ`: same center, side scaled by `k`.
    pub fn dilate(&self, k: f64) -> Cube {
        Cube {
            center: self.center.clone(),
            side: self.side * k,
        }
    }

    pub fn lower(&self) -> Vec<f64> {
        self.center.iter().map(|c| c - 0.5 * self.side).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.center.iter().map(|c| c + 0.5 * self.side).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let h = 0.5 * self.side;
        self.center.iter().zip(x).all(|(c, xi)| (xi - c).abs() <= h)
    }

    /// True when `other` lies inside `self` (closed cubes).
    pub fn contains_cube(&self, other: &Cube) -> bool {
        let slack = 1e-12 * self.side;
        let h = 0.5 * self.side;
        let k = 0.5 * other.side;
        self.center
            .iter()
            .zip(&other.center)
            .all(|(c, o)| o - k >= c - h - slack && o + k <= c + h + slack)
    }

    /// The `2^n` dyadic children.
    pub fn children(&self) -> Vec<Cube> {
        let n = self.dim();
        let q = 0.25 * self.side;
        (0..1usize << n)
            .map(|mask| Cube {
                center: (0..n)
                    .map(|i| self.center[i] + if mask >> i & 1 == 1 { q } else { -q })
                    .collect(),
                side: 0.5 * self.side,
            })
            .collect()
    }

    /// Euclidean distance from the cube to a point (0 inside).
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let h = 0.5 * self.side;
        self.center
            .iter()
            .zip(x)
            .map(|(c, xi)| ((xi - c).abs() - h).max(0.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn as_box(&self) -> Cell {
        Cell {
            lo: self.lower(),
            hi: self.upper(),
        }
    }
}

/// `Q(0, 2e^{k+1})`: the cube centered at the origin with side `2 e^{k+1}`.
pub fn special_cube(k: u32, n: usize) -> Cube {
    Cube {
        center: vec![0.0; n.max(1)],
        side: 2.0 * (k as f64 + 1.0).exp(),
    }
}

/// Axis-parallel box used internally by the quadrature.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn max_side(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }

    /// Closed containment with a slack relative to the cell size.
    pub fn touches(&self, x: &[f64]) -> bool {
        let eps = 1e-12 * self.max_side();
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((l, h), xi)| *xi >= l - eps && *xi <= h + eps)
    }

    /// Sup-norm distance from the cell to a point.
    pub fn sup_distance(&self, x: &[f64]) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .map(|((l, h), xi)| (l - xi).max(xi - h).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn bisect(&self) -> Vec<Cell> {
        let n = self.dim();
        let mid: Vec<f64> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect();
        (0..1usize << n)
            .map(|mask| {
                let mut lo = self.lo.clone();
                let mut hi = self.hi.clone();
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        lo[i] = mid[i];
                    } else {
                        hi[i] = mid[i];
                    }
                }
                Cell { lo, hi }
            })
            .collect()
    }

    /// Split along `axis` at `at` when the plane cuts the interior.
    /// Split along long axes into equal pieces with aspect ratio below about 1.5.
    pub fn squarish(self) -> Vec<Cell> {
        let sides: Vec<f64> = self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect();
        let min = sides.iter().copied().fold(f64::INFINITY, f64::min);
        let mut cells = vec![self];
        for (axis, &w) in sides.iter().enumerate() {
            let k = (w / min).round().clamp(1.0, 64.0) as usize;
            if k == 1 {
                continue;
            }
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    let lo = c.lo[axis];
                    (0..k).map(move |j| {
                        let mut piece = c.clone();
                        piece.lo[axis] = lo + w * j as f64 / k as f64;
                        piece.hi[axis] = if j + 1 == k {
                            c.hi[axis]
                        } else {
                            lo + w * (j + 1) as f64 / k as f64
                        };
                        piece
                    })
                })
                .collect();
        }
        cells
    }

    pub fn cut(self, axis: usize, at: f64) -> Vec<Cell> {
        let width = self.hi[axis] - self.lo[axis];
        if at <= self.lo[axis] + 1e-14 * width || at >= self.hi[axis] - 1e-14 * width {
            return vec![self];
        }
        let mut left = self.clone();
        let mut right = self;
        left.hi[axis] = at;
        right.lo[axis] = at;
        vec![left, right]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarish_splits_long_axes() {
        let cell = Cell {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 3.8],
        };
        let parts = cell.squarish();
        assert_eq!(parts.len(), 4);
        assert_eq!(parts.last().unwrap().hi, vec![1.0, 3.8]);
        let area: f64 = parts
            .iter()
            .map(|c| (c.hi[0] - c.lo[0]) * (c.hi[1] - c.lo[1]))
            .sum();
        assert!((area - 3.8).abs() < 1e-12);
    }

    #[test]
    fn special_cubes_follow_exponential_sides() {
        let e = std::f64::consts::E;
        assert!((special_cube(0, 1).side - 2.0 * e).abs() < 1e-12);
        assert!((special_cube(1, 1).side - 2.0 * e * e).abs() < 1e-12);
        assert!((special_cube(2, 2).side - 2.0 * e.powi(3)).abs() < 1e-11);
        assert_eq!(special_cube(2, 2).center, vec![0.0, 0.0]);
    }

    #[test]
    fn degenerate_cubes_are_rejected() {
        assert!(Cube::new(vec![0.0], 0.0).is_err());
        assert!(Cube::new(vec![0.0], -1.0).is_err());
        assert!(Cube::new(vec![], 1.0).is_err());
        assert!(Cube::new(vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn dilation_and_measure() {
        let q = Cube::new(vec![1.0, 2.0], 0.5).unwrap();
        assert_eq!(q.measure(), 0.25);
        let q5 = q.dilate(5.0);
        assert_eq!(q5.center, q.center);
        assert_eq!(q5.side, 2.5);
        assert!(q5.contains_cube(&q));
        assert!(!q.contains_cube(&q5));
    }

    #[test]
    fn children_tile_the_parent() {
        let q = Cube::new(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        let kids = q.children();
        assert_eq!(kids.len(), 8);
        let total: f64 = kids.iter().map(Cube::measure).sum();
        assert!((total - q.measure()).abs() < 1e-12);
        assert!(kids.iter().all(|k| q.contains_cube(k)));
    }

    #[test]
    fn cell_cut_ignores_planes_outside() {
        let c = Cube::interval(0.0, 1.0).unwrap().as_box();
        assert_eq!(c.clone().cut(0, 2.0).len(), 1);
        let parts = c.cut(0, 0.25);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].hi[0], 0.25);
    }
}
