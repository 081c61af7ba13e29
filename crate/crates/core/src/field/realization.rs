use super::grid::UniformGrid;
use crate::error::{Error, Result};

/// Nodal values of one lognormal field sample on a CE grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRealization {
    level: usize,
    grid: UniformGrid,
    log_values: Vec<f64>,
    values: Vec<f64>,
}

impl FieldRealization {
    pub fn from_log_values(level: usize, grid: UniformGrid, log_values: Vec<f64>) -> Self {
        assert_eq!(log_values.len(), grid.num_points());
        let values = log_values.iter().map(|v| v.exp()).collect();
        Self {
            level,
            grid,
            log_values,
            values,
        }
    }

    /// Field given directly by its (positive) nodal values.
    pub fn from_values(level: usize, grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.num_points(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("field value {v} is not positive")));
        }
        Ok(Self {
            level,
            grid,
            log_values: values.iter().map(|v| v.ln()).collect(),
            values,
        })
    }

    pub fn constant(grid: UniformGrid, value: f64) -> Result<Self> {
        Self::from_values(0, grid, vec![value; grid.num_points()])
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multilinear interpolation of the nodal values at `x ∈ [0,1]^d`.
    pub fn eval_field(&self, x: &[f64]) -> Result<f64> {
        let d = self.grid.dim();
        if x.len() < d || x[..d].iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!("point {x:?} outside [0,1]^{d}")));
        }
        Ok(self.eval(x))
    }

    /// Unchecked variant of [`eval_field`](Self::eval_field).
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.grid.dim();
        let n = self.grid.points_per_axis();
        let scale = (n - 1) as f64;
        let mut cell = [0usize; 3];
        let mut t = [0.0f64; 3];
        for a in 0..d {
            let u = x[a] * scale;
            let c = (u.floor().max(0.0) as usize).min(n - 2);
            cell[a] = c;
            t[a] = u - c as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0;
            let mut stride = 1;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { t[a] } else { 1.0 - t[a] };
                flat += (cell[a] + bit) * stride;
                stride *= n;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// Restriction to a nested coarser grid: coarse nodal values are copied
    /// from the shared fine nodes.
    pub fn restrict_to_coarse(&self, coarse: &UniformGrid) -> Result<FieldRealization> {
        let ratio = coarse.nesting_ratio(&self.grid).ok_or_else(|| {
            Error::NestingViolation(format!("{coarse:?} is not nested in {:?}", self.grid))
        })?;
        let d = coarse.dim();
        let mut log_values = Vec::with_capacity(coarse.num_points());
        let mut values = Vec::with_capacity(coarse.num_points());
        for i in 0..coarse.num_points() {
            let mut idx = coarse.multi_index(i);
            for v in idx.iter_mut().take(d) {
                *v *= ratio;
            }
            let j = self.grid.flat_index(&idx);
            log_values.push(self.log_values[j]);
            values.push(self.values[j]);
        }
        Ok(FieldRealization {
            level: self.level.saturating_sub(1),
            grid: *coarse,
            log_values,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn affine_field(g: UniformGrid) -> FieldRealization {
        let vals = (0..g.num_points())
            .map(|i| {
                let x = g.point(i);
                2.0 + x[0] - 0.5 * x[1]
            })
            .collect();
        FieldRealization::from_values(2, g, vals).unwrap()
    }

    #[test]
    fn exact_at_nodes() {
        let g = UniformGrid::new(2, 5).unwrap();
        let vals: Vec<f64> = (0..25).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
        let f = FieldRealization::from_values(0, g, vals.clone()).unwrap();
        for i in 0..25 {
            assert_eq!(f.eval_field(&g.point(i)[..2]).unwrap(), vals[i]);
        }
    }

    #[test]
    fn cell_center_is_corner_mean() {
        let g = UniformGrid::new(2, 3).unwrap();
        let vals: Vec<f64> = (1..=9).map(|i| i as f64).collect();
        let f = FieldRealization::from_values(0, g, vals).unwrap();
        let v = f.eval_field(&[0.25, 0.75]).unwrap();
        assert!((v - (4.0 + 5.0 + 7.0 + 8.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn constant_field() {
        let g = UniformGrid::new(3, 3).unwrap();
        let f = FieldRealization::constant(g, 1.7).unwrap();
        for x in [[0.1, 0.9, 0.33], [1.0, 1.0, 1.0], [0.0, 0.5, 0.77]] {
            assert!((f.eval_field(&x).unwrap() - 1.7).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_checks() {
        let g = UniformGrid::new(2, 3).unwrap();
        let f = FieldRealization::constant(g, 1.0).unwrap();
        assert!(f.eval_field(&[1.01, 0.5]).is_err());
        assert!(f.eval_field(&[-0.01, 0.5]).is_err());
        assert!(FieldRealization::from_values(0, g, vec![1.0; 8]).is_err());
        assert!(FieldRealization::from_values(0, g, vec![0.0; 9]).is_err());
    }

    #[test]
    fn restriction_keeps_shared_nodes_and_affine_fields() {
        let fine = UniformGrid::dyadic(2, 3).unwrap();
        let coarse = UniformGrid::dyadic(2, 1).unwrap();
        let f = affine_field(fine);
        let c = f.restrict_to_coarse(&coarse).unwrap();
        for i in 0..coarse.num_points() {
            let x = coarse.point(i);
            assert_eq!(c.values()[i], f.eval(&x[..2]));
        }
        for k in 0..50 {
            let x = [(k as f64 * 0.137) % 1.0, (k as f64 * 0.291) % 1.0];
            assert!((c.eval(&x) - f.eval(&x)).abs() < 1e-14);
        }
        let bad = UniformGrid::new(2, 4).unwrap();
        assert!(matches!(
            f.restrict_to_coarse(&bad),
            Err(Error::NestingViolation(_))
        ));
    }

    #[test]
    fn restriction_error_bounded_by_cell_range() {
        // brute-force scan on a 2-level 1D example
        let fine = UniformGrid::new(1, 9).unwrap();
        let coarse = UniformGrid::new(1, 3).unwrap();
        let vals: Vec<f64> = (0..9).map(|i| (1.3 * i as f64).sin() + 2.0).collect();
        let f = FieldRealization::from_values(1, fine, vals.clone()).unwrap();
        let c = f.restrict_to_coarse(&coarse).unwrap();
        for cell in 0..2 {
            let span = &vals[cell * 4..=cell * 4 + 4];
            let range = span.iter().cloned().fold(f64::MIN, f64::max)
                - span.iter().cloned().fold(f64::MAX, f64::min);
            for k in 0..=1000 {
                let x = 0.5 * cell as f64 + 0.5 * k as f64 / 1000.0;
                assert!((f.eval(&[x]) - c.eval(&[x])).abs() <= range + 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn interpolation_within_nodal_bounds(
            vals in proptest::collection::vec(0.1f64..10.0, 16),
            x in 0.0f64..=1.0, y in 0.0f64..=1.0,
        ) {
            let g = UniformGrid::new(2, 4).unwrap();
            let f = FieldRealization::from_values(0, g, vals.clone()).unwrap();
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let v = f.eval_field(&[x, y]).unwrap();
            prop_assert!(v >= lo * (1.0 - 1e-15) && v <= hi * (1.0 + 1e-15));
        }

        #[test]
        fn gradient_bounded_by_divided_differences(
            vals in proptest::collection::vec(0.1f64..10.0, 16),
            cx in 0usize..3, cy in 0usize..3,
            tx in 0.05f64..0.95, ty in 0.05f64..0.95,
        ) {
            let g = UniformGrid::new(2, 4).unwrap();
            let h = g.spacing();
            let f = FieldRealization::from_values(0, g, vals.clone()).unwrap();
            // largest divided difference along either axis over the grid
            let mut lip: f64 = 0.0;
            for j in 0..4 {
                for i in 0..3 {
                    lip = lip.max((vals[j * 4 + i + 1] - vals[j * 4 + i]).abs() / h);
                    lip = lip.max((vals[(i + 1) * 4 + j] - vals[i * 4 + j]).abs() / h);
                }
            }
            let x = [(cx as f64 + tx) * h, (cy as f64 + ty) * h];
            let e = 1e-7;
            let gx = (f.eval(&[x[0] + e, x[1]]) - f.eval(&[x[0] - e, x[1]])) / (2.0 * e);
            let gy = (f.eval(&[x[0], x[1] + e]) - f.eval(&[x[0], x[1] - e])) / (2.0 * e);
            prop_assert!(gx.abs() <= lip * (1.0 + 1e-5) + 1e-6);
            prop_assert!(gy.abs() <= lip * (1.0 + 1e-5) + 1e-6);
        }
    }
}
