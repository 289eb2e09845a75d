//! Grid functions: states sampled on a uniform 1D or 2D grid.
//!
//! A [`GridFunction`] carries its [`Grid`], a [`Boundary`] tag and the
//! [`NormTag`] of the space it lives in. All spatial integrals use the
//! composite trapezoid rule, and the discrete L² inner product uses the same
//! trapezoid weights, so `V(u) = ½∫(u−m)₋²` and `⟨grad V, w⟩` are mutually
//! consistent.

use std::fmt;

use crate::error::{Error, Result};

/// Which norm the state space is equipped with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormTag {
    /// Discrete sup norm `max |u_i|`.
    Sup,
    /// Discrete L² norm with trapezoid weights.
    L2,
}

impl fmt::Display for NormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormTag::Sup => f.write_str("sup"),
            NormTag::L2 => f.write_str("l2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Boundary nodes are pinned to zero.
    DirichletZero,
    /// Node 0 is tied to the interior through a birth integral.
    NonlocalBirth,
    None,
}

/// Uniform grid. Node counts include boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// Plain vector in `R^n` with unit weights (scalar and toy systems).
    Points {
        n: usize,
    },
    Interval {
        length: f64,
        nodes: usize,
    },
    /// Row-major: the node `(ix, iy)` is stored at `iy * nx + ix`.
    Rectangle {
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
    },
}

impl Grid {
    pub fn points(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("a point grid needs at least one node".into()));
        }
        Ok(Grid::Points { n })
    }

    pub fn interval(length: f64, nodes: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "interval length must be positive, got {length}"
            )));
        }
        if nodes < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {nodes}"
            )));
        }
        Ok(Grid::Interval { length, nodes })
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        for (l, n) in [(lx, nx), (ly, ny)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!("side length must be positive, got {l}")));
            }
            if n < 3 {
                return Err(Error::InvalidGrid(format!("need at least 3 nodes per axis, got {n}")));
            }
        }
        Ok(Grid::Rectangle { lx, ly, nx, ny })
    }

    /// Spatial dimension; 0 for point grids.
    pub fn dim(&self) -> usize {
        match self {
            Grid::Points { .. } => 0,
            Grid::Interval { .. } => 1,
            Grid::Rectangle { .. } => 2,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Points { n } => n,
            Grid::Interval { nodes, .. } => nodes,
            Grid::Rectangle { nx, ny, .. } => nx * ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Mesh widths per axis (empty for point grids).
    pub fn spacing(&self) -> Vec<f64> {
        match *self {
            Grid::Points { .. } => vec![],
            Grid::Interval { length, nodes } => vec![length / (nodes - 1) as f64],
            Grid::Rectangle { lx, ly, nx, ny } => {
                vec![lx / (nx - 1) as f64, ly / (ny - 1) as f64]
            }
        }
    }

    /// Coordinates of node `i`; unused axes are 0.
    pub fn coords(&self, i: usize) -> [f64; 2] {
        match *self {
            Grid::Points { .. } => [i as f64, 0.0],
            Grid::Interval { length, nodes } => [length * i as f64 / (nodes - 1) as f64, 0.0],
            Grid::Rectangle { lx, ly, nx, ny } => {
                let (ix, iy) = (i % nx, i / nx);
                [lx * ix as f64 / (nx - 1) as f64, ly * iy as f64 / (ny - 1) as f64]
            }
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        match *self {
            Grid::Points { .. } => false,
            Grid::Interval { nodes, .. } => i == 0 || i + 1 == nodes,
            Grid::Rectangle { nx, ny, .. } => {
                let (ix, iy) = (i % nx, i / nx);
                ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny
            }
        }
    }

    /// Trapezoid quadrature weights.
    pub fn weights(&self) -> Vec<f64> {
        fn axis(n: usize, h: f64) -> Vec<f64> {
            let mut w = vec![h; n];
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
            w
        }
        match *self {
            Grid::Points { n } => vec![1.0; n],
            Grid::Interval { nodes, .. } => axis(nodes, self.spacing()[0]),
            Grid::Rectangle { nx, ny, .. } => {
                let h = self.spacing();
                let (wx, wy) = (axis(nx, h[0]), axis(ny, h[1]));
                let mut w = Vec::with_capacity(nx * ny);
                for wyj in &wy {
                    for wxi in &wx {
                        w.push(wxi * wyj);
                    }
                }
                w
            }
        }
    }
}

/// Values of a state on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    grid: Grid,
    boundary: Boundary,
    norm: NormTag,
}

impl GridFunction {
    /// Checked constructor: length, finiteness and the Dirichlet pin are validated.
    pub fn new(grid: Grid, values: Vec<f64>, boundary: Boundary, norm: NormTag) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        if boundary == Boundary::DirichletZero {
            for (i, &v) in values.iter().enumerate() {
                if grid.is_boundary(i) && v != 0.0 {
                    return Err(Error::DirichletViolation { node: i, value: v });
                }
            }
        }
        Ok(GridFunction {
            values,
            grid,
            boundary,
            norm,
        })
    }

    pub fn zeros(grid: Grid, boundary: Boundary, norm: NormTag) -> Self {
        let values = vec![0.0; grid.len()];
        GridFunction {
            values,
            grid,
            boundary,
            norm,
        }
    }

    /// Samples `f` at every node. Dirichlet boundary nodes are set to 0.
    pub fn from_fn(grid: Grid, boundary: Boundary, norm: NormTag, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                if boundary == Boundary::DirichletZero && grid.is_boundary(i) {
                    0.0
                } else {
                    f(grid.coords(i))
                }
            })
            .collect();
        GridFunction {
            values,
            grid,
            boundary,
            norm,
        }
    }

    /// Scalar state on a one-node point grid.
    pub fn scalar(value: f64, norm: NormTag) -> Self {
        GridFunction {
            values: vec![value],
            grid: Grid::Points { n: 1 },
            boundary: Boundary::None,
            norm,
        }
    }

    pub fn vector(values: Vec<f64>, norm: NormTag) -> Result<Self> {
        let grid = Grid::points(values.len())?;
        GridFunction::new(grid, values, Boundary::None, norm)
    }

    /// Same metadata, new values. Dirichlet nodes are re-pinned to zero;
    /// non-finite values are kept, so callers that care must check [`Self::validate`].
    pub(crate) fn with_values(&self, mut values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        if self.boundary == Boundary::DirichletZero {
            for (i, v) in values.iter_mut().enumerate() {
                if self.grid.is_boundary(i) {
                    *v = 0.0;
                }
            }
        }
        GridFunction {
            values,
            grid: self.grid.clone(),
            boundary: self.boundary,
            norm: self.norm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        GridFunction::new(self.grid.clone(), self.values.clone(), self.boundary, self.norm).map(|_| ())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn norm_tag(&self) -> NormTag {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_norm(mut self, norm: NormTag) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_boundary(self, boundary: Boundary) -> Result<Self> {
        GridFunction::new(self.grid, self.values, boundary, self.norm)
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GeometryMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Same grid and same norm tag.
    pub fn ensure_compatible(&self, other: &GridFunction) -> Result<()> {
        self.ensure_same_grid(other)?;
        if self.norm != other.norm {
            return Err(Error::GeometryMismatch(format!(
                "norm tags differ: {} vs {}",
                self.norm, other.norm
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &GridFunction) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect()))
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.grid.weights()
    }

    /// Weighted inner product with trapezoid weights.
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_grid(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (x, y))| w * x * y)
            .sum())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm_in(&self, tag: NormTag) -> f64 {
        match tag {
            NormTag::Sup => self.sup_norm(),
            NormTag::L2 => self.l2_norm(),
        }
    }

    /// Norm selected by the function's own tag.
    pub fn norm(&self) -> f64 {
        self.norm_in(self.norm)
    }

    /// `‖self − other‖` in `self`'s norm.
    pub fn dist(&self, other: &GridFunction) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Trapezoid integral.
    pub fn integral(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn coords(&self, i: usize) -> [f64; 2] {
        self.grid.coords(i)
    }
}
