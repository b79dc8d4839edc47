use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// Position of a spatial node relative to `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialKind {
    /// All adjacent cells belong to `Ω`.
    Interior,
    /// Some, but not all, adjacent cells belong to `Ω`.
    Lateral,
    /// No adjacent cell belongs to `Ω`.
    Exterior,
}

/// Classification of a space-time node; exhaustive and disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    LateralBoundary,
    /// Any node of `Ω̄` at time level zero.
    InitialBoundary,
    Exterior,
}

/// A rectilinear space-time grid carrying a cell mask for `Ω`.
///
/// Nodes sit at cell corners. A node's control volume is `θ·hⁿ` where `θ`
/// is the fraction of its adjacent cells inside `Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    n: usize,
    h: f64,
    origin: Vec2,
    cells: [usize; 2],
    mask: Vec<bool>,
    t_final: f64,
    dt: f64,
    periodic: bool,
    kinds: Vec<SpatialKind>,
    weights: Vec<f64>,
}

/// One outer-density measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub node: usize,
    pub radius: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub entries: Vec<DensityEntry>,
    pub threshold: f64,
    pub pass: bool,
}

impl DensityReport {
    pub fn worst_ratio(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.ratio).reduce(f64::max)
    }
}

impl GridDomain {
    /// `Ω = (lo, hi)` split into `cells` cells.
    pub fn interval(lo: f64, hi: f64, cells: usize, t_final: f64, dt: f64) -> Result<Self> {
        if !(hi > lo) || cells < 2 {
            return Err(Error::invalid(
                "grid",
                "interval needs hi > lo and at least 2 cells",
            ));
        }
        let h = (hi - lo) / cells as f64;
        GridDomain::build(
            1,
            h,
            [lo, 0.0],
            [cells, 0],
            vec![true; cells],
            t_final,
            dt,
            false,
        )
    }

    /// The circle `[lo, hi)` with identified endpoints; it has no lateral boundary.
    pub fn periodic_interval(
        lo: f64,
        hi: f64,
        cells: usize,
        t_final: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(hi > lo) || cells < 3 {
            return Err(Error::invalid(
                "grid",
                "periodic interval needs hi > lo and at least 3 cells",
            ));
        }
        let h = (hi - lo) / cells as f64;
        GridDomain::build(
            1,
            h,
            [lo, 0.0],
            [cells, 0],
            vec![true; cells],
            t_final,
            dt,
            true,
        )
    }

    /// The square `(lo, hi)²` with `cells` cells per side.
    pub fn square(lo: f64, hi: f64, cells: usize, t_final: f64, dt: f64) -> Result<Self> {
        if !(hi > lo) || cells < 2 {
            return Err(Error::invalid(
                "grid",
                "square needs hi > lo and at least 2 cells per side",
            ));
        }
        let h = (hi - lo) / cells as f64;
        GridDomain::build(
            2,
            h,
            [lo, lo],
            [cells, cells],
            vec![true; cells * cells],
            t_final,
            dt,
            false,
        )
    }

    /// A two-dimensional domain from a cell mask; `mask[i + j*nx]` is cell `(i, j)`.
    pub fn from_mask(
        h: f64,
        origin: Vec2,
        nx: usize,
        ny: usize,
        mask: Vec<bool>,
        t_final: f64,
        dt: f64,
    ) -> Result<Self> {
        if mask.len() != nx * ny || nx == 0 || ny == 0 {
            return Err(Error::invalid(
                "grid.mask",
                "mask size does not match the cell counts",
            ));
        }
        if !mask.iter().any(|m| *m) {
            return Err(Error::invalid("grid.mask", "mask selects no cell"));
        }
        GridDomain::build(2, h, origin, [nx, ny], mask, t_final, dt, false)
    }

    /// Parse rows of `0`/`1` characters; the first row is the top (largest `y`).
    pub fn parse_mask(text: &str) -> Result<(usize, usize, Vec<bool>)> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let ny = rows.len();
        let nx = rows.first().map_or(0, |r| r.len());
        if ny == 0 || nx == 0 {
            return Err(Error::invalid("grid.mask", "empty mask"));
        }
        let mut mask = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nx {
                return Err(Error::invalid(
                    "grid.mask",
                    format!("row {r} has length {} instead of {nx}", row.len()),
                ));
            }
            let j = ny - 1 - r;
            for (i, ch) in row.chars().enumerate() {
                mask[i + j * nx] = match ch {
                    '1' => true,
                    '0' => false,
                    other => {
                        return Err(Error::invalid(
                            "grid.mask",
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
            }
        }
        Ok((nx, ny, mask))
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        n: usize,
        h: f64,
        origin: Vec2,
        cells: [usize; 2],
        mask: Vec<bool>,
        t_final: f64,
        dt: f64,
        periodic: bool,
    ) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid("grid.h", "cell size must be positive"));
        }
        if !(dt > 0.0 && t_final > 0.0) {
            return Err(Error::invalid(
                "grid.dt",
                "time step and final time must be positive",
            ));
        }
        let steps = t_final / dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::invalid(
                "grid.dt",
                "final time must be an integer multiple of dt",
            ));
        }
        let mut d = GridDomain {
            n,
            h,
            origin,
            cells,
            mask,
            t_final,
            dt,
            periodic,
            kinds: Vec::new(),
            weights: Vec::new(),
        };
        let count = d.node_count();
        let mut kinds = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for node in 0..count {
            let adj = d.adjacent_cells(node);
            let inside = adj.iter().filter(|c| c.is_some_and(|c| d.mask[c])).count();
            let total = adj.len();
            weights.push(inside as f64 / total as f64);
            kinds.push(if inside == total {
                SpatialKind::Interior
            } else if inside == 0 {
                SpatialKind::Exterior
            } else {
                SpatialKind::Lateral
            });
        }
        d.kinds = kinds;
        d.weights = weights;
        Ok(d)
    }

    /// Adjacent cell indices; `None` marks a cell outside the box.
    fn adjacent_cells(&self, node: usize) -> Vec<Option<usize>> {
        let [nx, ny] = self.cells;
        match self.n {
            1 => {
                let i = node as isize;
                let nxi = nx as isize;
                [i - 1, i]
                    .iter()
                    .map(|&c| {
                        if self.periodic {
                            Some(c.rem_euclid(nxi) as usize)
                        } else if (0..nxi).contains(&c) {
                            Some(c as usize)
                        } else {
                            None
                        }
                    })
                    .collect()
            }
            _ => {
                let (i, j) = self.node_ij(node);
                let mut out = Vec::with_capacity(4);
                for dj in [-1isize, 0] {
                    for di in [-1isize, 0] {
                        let ci = i as isize + di;
                        let cj = j as isize + dj;
                        if ci >= 0 && cj >= 0 && (ci as usize) < nx && (cj as usize) < ny {
                            out.push(Some(ci as usize + cj as usize * nx));
                        } else {
                            out.push(None);
                        }
                    }
                }
                out
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// True for the one-dimensional mode, an extrapolation below the `n ≥ 2` theory.
    pub fn is_one_dimensional(&self) -> bool {
        self.n == 1
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of time steps; levels run from 0 to this value.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.dt
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn cell_in_domain(&self, cell: usize) -> bool {
        self.mask[cell]
    }

    /// Nodes per row (x-direction).
    pub fn row_len(&self) -> usize {
        if self.n == 1 && self.periodic {
            self.cells[0]
        } else {
            self.cells[0] + 1
        }
    }

    pub fn node_count(&self) -> usize {
        match self.n {
            1 => self.row_len(),
            _ => (self.cells[0] + 1) * (self.cells[1] + 1),
        }
    }

    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        let r = self.row_len();
        (node % r, node / r)
    }

    pub fn node_at(&self, i: usize, j: usize) -> usize {
        i + j * self.row_len()
    }

    pub fn coords(&self, node: usize) -> Vec2 {
        let (i, j) = self.node_ij(node);
        let y = if self.n == 2 {
            self.origin[1] + j as f64 * self.h
        } else {
            0.0
        };
        [self.origin[0] + i as f64 * self.h, y]
    }

    pub fn spatial_kind(&self, node: usize) -> SpatialKind {
        self.kinds[node]
    }

    pub fn kind(&self, node: usize, level: usize) -> NodeKind {
        match (self.kinds[node], level) {
            (SpatialKind::Exterior, _) => NodeKind::Exterior,
            (_, 0) => NodeKind::InitialBoundary,
            (SpatialKind::Interior, _) => NodeKind::Interior,
            (SpatialKind::Lateral, _) => NodeKind::LateralBoundary,
        }
    }

    /// True for nodes of `Ω̄`.
    pub fn in_closure(&self, node: usize) -> bool {
        self.kinds[node] != SpatialKind::Exterior
    }

    /// Fraction of adjacent cells inside `Ω`.
    pub fn weight(&self, node: usize) -> f64 {
        self.weights[node]
    }

    /// Control-volume measure `θ·hⁿ`.
    pub fn measure(&self, node: usize) -> f64 {
        self.weights[node] * self.h.powi(self.n as i32)
    }

    pub fn closure_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&i| self.in_closure(i))
    }

    pub fn lateral_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&i| self.kinds[i] == SpatialKind::Lateral)
    }

    /// Neighbour one step along `axis` in direction `dir = ±1`.
    pub fn neighbor(&self, node: usize, axis: usize, dir: isize) -> Option<usize> {
        let (i, j) = self.node_ij(node);
        let r = self.row_len() as isize;
        match axis {
            0 => {
                let ni = i as isize + dir;
                if self.n == 1 && self.periodic {
                    return Some(ni.rem_euclid(r) as usize);
                }
                (0..r).contains(&ni).then(|| self.node_at(ni as usize, j))
            }
            _ => {
                if self.n < 2 {
                    return None;
                }
                let nj = j as isize + dir;
                (0..=self.cells[1] as isize)
                    .contains(&nj)
                    .then(|| self.node_at(i, nj as usize))
            }
        }
    }

    /// Corner nodes of cell `c`, counter-clockwise from the lower left (two nodes in 1D).
    pub fn cell_nodes(&self, cell: usize) -> Vec<usize> {
        match self.n {
            1 => {
                let r = self.row_len();
                vec![cell, (cell + 1) % r]
            }
            _ => {
                let nx = self.cells[0];
                let (i, j) = (cell % nx, cell / nx);
                vec![
                    self.node_at(i, j),
                    self.node_at(i + 1, j),
                    self.node_at(i + 1, j + 1),
                    self.node_at(i, j + 1),
                ]
            }
        }
    }

    pub fn cell_count(&self) -> usize {
        match self.n {
            1 => self.cells[0],
            _ => self.cells[0] * self.cells[1],
        }
    }

    /// Centroid of cell `c`.
    pub fn cell_center(&self, cell: usize) -> Vec2 {
        match self.n {
            1 => [self.origin[0] + (cell as f64 + 0.5) * self.h, 0.0],
            _ => {
                let nx = self.cells[0];
                let (i, j) = (cell % nx, cell / nx);
                [
                    self.origin[0] + (i as f64 + 0.5) * self.h,
                    self.origin[1] + (j as f64 + 0.5) * self.h,
                ]
            }
        }
    }

    /// Discrete outer density at every lateral node for each radius `k·h ≤ r_Ω`.
    ///
    /// The ratio compares `Σθ` over grid points of the closed ball with
    /// the plain point count, so points outside the box contribute zero.
    pub fn check_outer_density(&self, delta: f64, r_omega: f64) -> DensityReport {
        let threshold = 1.0 - delta;
        let kmax = (r_omega / self.h + 1e-9).floor() as isize;
        let mut entries = Vec::new();
        for node in self.lateral_nodes() {
            let (i0, j0) = self.node_ij(node);
            for k in 1..=kmax {
                let mut total = 0.0;
                let mut inside = 0.0;
                let jr = if self.n == 2 { k } else { 0 };
                for dj in -jr..=jr {
                    for di in -k..=k {
                        if di * di + dj * dj > k * k {
                            continue;
                        }
                        total += 1.0;
                        let ii = i0 as isize + di;
                        let jj = j0 as isize + dj;
                        let in_box = ii >= 0
                            && (ii as usize) < self.row_len()
                            && (self.n == 1 && jj == 0
                                || self.n == 2 && jj >= 0 && (jj as usize) <= self.cells[1]);
                        if in_box {
                            inside += self.weights[self.node_at(ii as usize, jj as usize)];
                        }
                    }
                }
                entries.push(DensityEntry {
                    node,
                    radius: k as f64 * self.h,
                    ratio: inside / total,
                });
            }
        }
        let pass = entries.iter().all(|e| e.ratio <= threshold + 1e-15);
        DensityReport {
            entries,
            threshold,
            pass,
        }
    }
}
