//! Tensor sampling grids. Nodes are kept as exact rationals (for exact polynomial
//! evaluation) alongside their rounded `f64` images (for expression evaluation).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::region::BoxRegion;
use crate::scalar::rational_to_f64;
use crate::tensor::unflatten;

/// Largest number of points any sampling grid may have unless a caller overrides it.
pub const DEFAULT_GRID_CAP: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<BigRational>>,
    float_axes: Vec<Vec<f64>>,
}

fn int(k: usize) -> BigInt {
    BigInt::from(k)
}

fn lerp(a: &BigRational, b: &BigRational, t: BigRational) -> BigRational {
    a + (b - a) * t
}

impl Grid {
    pub fn from_axes(axes: Vec<Vec<BigRational>>) -> Self {
        let float_axes = axes
            .iter()
            .map(|a| a.iter().map(rational_to_f64).collect())
            .collect();
        Grid { axes, float_axes }
    }

    /// `density` equispaced points per axis including both endpoints.
    pub fn endpoint(region: &BoxRegion, density: usize) -> Result<Self> {
        if density < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid density must be at least 2, got {density}"
            )));
        }
        Ok(Self::map_unit(
            region,
            |i| BigRational::new(int(i), int(density - 1)),
            density,
        ))
    }

    /// Cell-centre grid: `density` points per axis at the midpoints of `density`
    /// equal cells, so every node sits half a pitch inside the endpoint grid's cells.
    pub fn offset(region: &BoxRegion, density: usize) -> Result<Self> {
        if density < 1 {
            return Err(Error::InvalidArgument(
                "grid density must be positive".into(),
            ));
        }
        Ok(Self::map_unit(
            region,
            |i| BigRational::new(int(2 * i + 1), int(2 * density)),
            density,
        ))
    }

    /// Bernstein nodes `k/d`, `k = 0..=d`, mapped onto the box.
    pub fn bernstein_nodes(region: &BoxRegion, degree: u32) -> Self {
        let d = degree as usize;
        Self::map_unit(region, |k| BigRational::new(int(k), int(d.max(1))), d + 1)
    }

    fn map_unit(region: &BoxRegion, t: impl Fn(usize) -> BigRational, count: usize) -> Self {
        let axes = (0..region.dimension())
            .map(|i| {
                (0..count)
                    .map(|k| lerp(&region.lower()[i], &region.upper()[i], t(k)))
                    .collect()
            })
            .collect();
        Self::from_axes(axes)
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> &[Vec<BigRational>] {
        &self.axes
    }

    pub fn float_axes(&self) -> &[Vec<f64>] {
        &self.float_axes
    }

    /// Point number `flat` in row-major order (axis 0 slowest).
    pub fn point(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, &self.shape())
            .into_iter()
            .enumerate()
            .map(|(axis, k)| self.float_axes[axis][k])
            .collect()
    }

    /// Largest spacing between neighbouring nodes on any axis.
    pub fn pitch(&self) -> f64 {
        self.float_axes
            .iter()
            .flat_map(|a| a.windows(2).map(|w| (w[1] - w[0]).abs()))
            .fold(0.0, f64::max)
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let points = self
            .axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
            .unwrap_or(usize::MAX);
        if points > cap {
            Err(Error::GridCapExceeded { points, cap })
        } else {
            Ok(())
        }
    }
}

/// Squared Euclidean norm.
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
