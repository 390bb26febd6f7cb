use serde::{Deserialize, Serialize};

use super::cube::{Cell, Cube};
use crate::error::{Error, Result};

/// An axis-parallel plane `x[axis] = at` across which an integrand may jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub axis: usize,
    pub at: f64,
}

/// Integration settings for a single cube.
///
/// Cells touching a singular point are bisected down to `max_depth`; the
/// innermost cell is dropped and its contribution extrapolated from the
/// geometric decay of the last two refinement levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPlan {
    /// Gauss–Legendre points per axis on every leaf cell.
    pub order: usize,
    pub max_depth: usize,
    pub rtol: f64,
    pub singular_points: Vec<Vec<f64>>,
    #[serde(default)]
    pub cuts: Vec<Cut>,
    /// Maximum number of uniform bisections tried by the adaptive driver.
    #[serde(default = "default_max_uniform")]
    pub max_uniform: usize,
}

fn default_max_uniform() -> usize {
    6
}

impl IntegrationPlan {
    pub fn new(dim: usize) -> Self {
        let (order, max_depth, max_uniform) = match dim {
            0 | 1 => (10, 32, 8),
            2 => (8, 16, 4),
            _ => (6, 10, 2),
        };
        IntegrationPlan {
            order,
            max_depth,
            rtol: 1e-10,
            singular_points: Vec::new(),
            cuts: Vec::new(),
            max_uniform,
        }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn with_singular_points<I>(mut self, points: I) -> Self
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        for p in points {
            if !self.singular_points.contains(&p) {
                self.singular_points.push(p);
            }
        }
        self
    }

    pub fn with_cuts<I>(mut self, cuts: I) -> Self
    where
        I: IntoIterator<Item = Cut>,
    {
        for c in cuts {
            if !self.cuts.contains(&c) {
                self.cuts.push(c);
            }
        }
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.rtol > 0.0) {
            return Err(Error::invalid("integration tolerance must be positive"));
        }
        if self.order == 0 {
            return Err(Error::invalid("quadrature order must be at least 1"));
        }
        if self.singular_points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("singular point dimension mismatch"));
        }
        if self.cuts.iter().any(|c| c.axis >= dim) {
            return Err(Error::invalid("cut axis out of range"));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            x = 0.0;
            dp = 1.0;
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m == 1 {
        weights[0] = 2.0;
    }
    (nodes, weights)
}

/// Result of a quadrature: the integral and the integral of the absolute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs: f64,
}

/// A fixed set of quadrature nodes over a cube.
///
/// Nodes are tagged with a singular group (0 for regular cells) and a
/// refinement level so that tails can be extrapolated per singular point.
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    group: Vec<u32>,
    level: Vec<u32>,
    groups: usize,
    /// Deepest refinement level of each singular group.
    group_depth: Vec<usize>,
    depth: usize,
    measure: f64,
}

struct Builder<'a> {
    plan: &'a IntegrationPlan,
    rule: (Vec<f64>, Vec<f64>),
    grid: Grid,
    group_point: Vec<usize>,
}

impl Grid {
    /// Build the grid for `cube` after `uniform` rounds of uniform bisection.
    pub fn build(cube: &Cube, plan: &IntegrationPlan, uniform: usize) -> Result<Grid> {
        let n = cube.dim();
        plan.validate(n)?;
        let mut boxes = vec![cube.as_box()];
        let mut cuts: Vec<Cut> = plan.cuts.clone();
        for p in &plan.singular_points {
            if cube.contains(p) {
                cuts.extend(p.iter().enumerate().map(|(axis, &at)| Cut { axis, at }));
            }
        }
        for c in &cuts {
            boxes = boxes
                .into_iter()
                .flat_map(|b| b.cut(c.axis, c.at))
                .collect();
        }
        boxes = boxes.into_iter().flat_map(Cell::squarish).collect();
        for _ in 0..uniform {
            boxes = boxes.iter().flat_map(Cell::bisect).collect();
        }
        let mut b = Builder {
            plan,
            rule: gauss_legendre(plan.order),
            grid: Grid {
                dim: n,
                nodes: Vec::new(),
                weights: Vec::new(),
                group: Vec::new(),
                level: Vec::new(),
                groups: 0,
                group_depth: Vec::new(),
                depth: plan.max_depth,
                measure: cube.measure(),
            },
            group_point: Vec::new(),
        };
        for cell in boxes {
            b.refine(cell, 0, None);
        }
        Ok(b.grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Measure of the cube the grid was built for.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Evaluate `f` at every node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.node(i))).collect()
    }

    pub fn integrate(&self, values: &[f64]) -> Result<Integral> {
        self.integrate_with(|i| values[i])
    }

    /// Integrate node values given by `value(i)`, extrapolating singular tails.
    pub fn integrate_with(&self, mut value: impl FnMut(usize) -> f64) -> Result<Integral> {
        let levels = self.depth + 1;
        let mut signed = vec![0.0; self.groups * levels];
        let mut absolute = vec![0.0; self.groups * levels];
        let mut total = 0.0;
        let mut total_abs = 0.0;
        for i in 0..self.len() {
            let v = value(i);
            if v.is_nan() {
                return Err(Error::NonFinite {
                    point: self.node(i).to_vec(),
                });
            }
            if v.is_infinite() {
                return Err(Error::InfiniteModular);
            }
            let wv = self.weights[i] * v;
            let g = self.group[i] as usize;
            if g == 0 {
                total += wv;
                total_abs += wv.abs();
            } else {
                let k = (g - 1) * levels + self.level[i] as usize;
                signed[k] += wv;
                absolute[k] += wv.abs();
            }
        }
        for g in 0..self.groups {
            let s = &signed[g * levels..(g + 1) * levels];
            let a = &absolute[g * levels..(g + 1) * levels];
            total += s.iter().sum::<f64>();
            total_abs += a.iter().sum::<f64>();
            let d = self.group_depth[g];
            if d >= 2 && a[d - 1] > 0.0 {
                let r = a[d] / a[d - 1];
                if r >= 1.0 - 1e-9 {
                    return Err(Error::InfiniteModular);
                }
                let tail = tail_sum(a, d, r) * s[d] / a[d];
                total += tail;
                total_abs += tail.abs();
            }
        }
        Ok(Integral {
            value: total,
            abs: total_abs,
        })
    }
}

impl Builder<'_> {
    fn touching(&self, cell: &Cell) -> Option<usize> {
        self.plan
            .singular_points
            .iter()
            .position(|p| cell.touches(p))
    }

    fn refine(&mut self, cell: Cell, depth: usize, group: Option<(u32, usize)>) {
        let Some(pt) = self.touching(&cell) else {
            let (g, lvl) = group.map_or((0, 0), |(g, _)| (g, depth as u32));
            self.refine_near(cell, depth, g, lvl);
            return;
        };
        if self.plan.max_depth < 2 {
            self.leaf(&cell, 0, 0);
            return;
        }
        let g = match group {
            Some(g) if self.group_point[g.0 as usize - 1] == pt => g.0,
            _ => {
                self.group_point.push(pt);
                self.grid.groups += 1;
                let cap = depth_cap(cell.max_side(), &self.plan.singular_points[pt]);
                let d = (depth + cap.max(3)).min(self.plan.max_depth);
                self.grid.group_depth.push(d);
                self.grid.groups as u32
            }
        };
        if depth >= self.grid.group_depth[g as usize - 1] {
            return;
        }
        for child in cell.bisect() {
            if child.touches(&self.plan.singular_points[pt]) {
                self.refine(child, depth + 1, Some((g, pt)));
            } else {
                self.refine_near(child, depth + 1, g, depth as u32 + 1);
            }
        }
    }

    fn refine_near(&mut self, cell: Cell, depth: usize, group: u32, level: u32) {
        let side = cell.max_side();
        let near = self
            .plan
            .singular_points
            .iter()
            .any(|p| cell.sup_distance(p) < 0.5 * side);
        if near && depth < self.plan.max_depth {
            for child in cell.bisect() {
                if self.touching(&child).is_some() {
                    self.refine(child, depth + 1, None);
                } else {
                    self.refine_near(child, depth + 1, group, level);
                }
            }
        } else {
            self.leaf(&cell, group, level);
        }
    }

    fn leaf(&mut self, cell: &Cell, group: u32, level: u32) {
        let n = cell.dim();
        let m = self.rule.0.len();
        let half: Vec<f64> = cell
            .lo
            .iter()
            .zip(&cell.hi)
            .map(|(l, h)| 0.5 * (h - l))
            .collect();
        let mid: Vec<f64> = cell
            .lo
            .iter()
            .zip(&cell.hi)
            .map(|(l, h)| 0.5 * (h + l))
            .collect();
        let total = m.pow(n as u32);
        for flat in 0..total {
            let mut idx = flat;
            let mut w = 1.0;
            for i in 0..n {
                let k = idx % m;
                idx /= m;
                self.grid.nodes.push(mid[i] + half[i] * self.rule.0[k]);
                w *= half[i] * self.rule.1[k];
            }
            self.grid.weights.push(w);
            self.grid.group.push(group);
            self.grid.level.push(level);
        }
    }
}

/// Sum of the level contributions beyond `d`.
///
/// Tried in order: an exact two-term recurrence `a_k = A rho^k + B sigma^k`
/// fitted to the last four levels, Aitken extrapolation of the level ratios,
/// and finally the last ratio `r` frozen. A fitted tail is kept only if the
/// same fit one level shallower predicts it, which rejects fits to noise.
type TailFit = fn(&[f64]) -> Option<f64>;

fn tail_sum(a: &[f64], d: usize, r: f64) -> f64 {
    let frozen = a[d] * r / (1.0 - r);
    if d < 5 || a[d - 4] <= 0.0 || a[d - 3] <= 0.0 || a[d - 2] <= 0.0 {
        return frozen;
    }
    let fits: [TailFit; 2] = [two_term_tail, aitken_tail];
    for fit in fits {
        if let (Some(t), Some(t_prev)) = (fit(&a[d - 3..=d]), fit(&a[d - 4..d])) {
            let shift = (t - (t_prev - a[d])).abs();
            if shift <= 0.05 * (t - frozen).abs() {
                return t;
            }
        }
    }
    frozen
}

fn two_term_tail(a: &[f64]) -> Option<f64> {
    let (a0, a1, a2, a3) = (a[0], a[1], a[2], a[3]);
    let det = a0 * a2 - a1 * a1;
    if det.abs() <= 1e-9 * a1 * a1 {
        return None;
    }
    let s = (a0 * a3 - a2 * a1) / det;
    let p = (a1 * a3 - a2 * a2) / det;
    let disc = s * s - 4.0 * p;
    if disc < 0.0 {
        return None;
    }
    let rho = 0.5 * (s + disc.sqrt());
    let sigma = 0.5 * (s - disc.sqrt());
    if !(sigma > 0.0 && rho < 1.0 - 1e-9) {
        return None;
    }
    let t = (s * a3 - p * (a2 + a3)) / ((1.0 - rho) * (1.0 - sigma));
    (t.is_finite() && t >= 0.0).then_some(t)
}

fn aitken_tail(a: &[f64]) -> Option<f64> {
    let (r1, r2, r) = (a[1] / a[0], a[2] / a[1], a[3] / a[2]);
    let (d1, d2) = (r2 - r1, r - r2);
    if d1 == 0.0 || d2.abs() <= 1e-13 * r {
        return None;
    }
    let theta = d2 / d1;
    if !(theta > 0.0 && theta < 0.95) {
        return None;
    }
    let rho = r + d2 * theta / (1.0 - theta);
    if !(rho > 0.0 && rho < 1.0 - 1e-9) {
        return None;
    }
    let (mut e, mut term, mut sum) = (r - rho, a[3], 0.0);
    for _ in 0..200_000 {
        e *= theta;
        term *= rho + e;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    Some(sum)
}

/// Refinement levels below a cell of side `side` before node coordinates
/// lose relative precision against the singular point's magnitude.
fn depth_cap(side: f64, point: &[f64]) -> usize {
    let scale = point.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return usize::MAX / 2;
    }
    let h_min = 1e-6 * scale;
    if side <= h_min {
        return 0;
    }
    (side / h_min).log2().floor() as usize
}

/// Adaptive driver: refine uniformly until two consecutive estimates agree.
pub(crate) fn adaptive_grid(
    f: impl Fn(&[f64]) -> f64,
    cube: &Cube,
    plan: &IntegrationPlan,
) -> Result<(Grid, Integral)> {
    let mut history: Vec<f64> = Vec::new();
    let mut previous: Option<Integral> = None;
    for u in 0..=plan.max_uniform {
        let grid = Grid::build(cube, plan, u)?;
        let est = grid.integrate_with(|i| f(grid.node(i)))?;
        if let Some(prev) = previous {
            let scale = est.abs.max(prev.abs);
            if (est.value - prev.value).abs() <= plan.rtol * scale || scale == 0.0 {
                return Ok((grid, est));
            }
        }
        history.push(est.value);
        previous = Some(est);
    }
    let last = history.last().copied().unwrap_or(f64::NAN);
    let prev = if history.len() >= 2 {
        history[history.len() - 2]
    } else {
        f64::NAN
    };
    Err(Error::QuadratureFailure {
        previous: prev,
        last,
    })
}

/// `∫_Q f`, adaptive in the uniform refinement level.
pub fn integrate_cube(
    f: impl Fn(&[f64]) -> f64,
    cube: &Cube,
    plan: &IntegrationPlan,
) -> Result<f64> {
    adaptive_grid(f, cube, plan).map(|(_, est)| est.value)
}
