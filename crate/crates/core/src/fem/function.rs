use super::mesh::FeLevel;
use crate::error::{Error, Result};

/// Continuous piecewise-linear function given by its nodal values.
#[derive(Clone, Debug, PartialEq)]
pub struct FeFunction {
    mesh: FeLevel,
    values: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(mesh: FeLevel) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.num_nodes()],
        }
    }

    pub fn from_values(mesh: FeLevel, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_nodes(),
                got: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: FeLevel, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..mesh.num_nodes()).map(|k| f(mesh.node(k))).collect();
        Self { mesh, values }
    }

    /// Nodal interpolant of `f` with boundary values set to zero.
    pub fn interpolate_dirichlet(mesh: FeLevel, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..mesh.num_nodes())
            .map(|k| {
                if mesh.is_boundary(k) {
                    0.0
                } else {
                    f(mesh.node(k))
                }
            })
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &FeLevel {
        &self.mesh
    }

    pub fn level(&self) -> usize {
        self.mesh.level()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Point evaluation on `[0,1]^2`.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let n = self.mesh.nodes_per_axis();
        let s = (n - 1) as f64;
        let u = x[0] * s;
        let v = x[1] * s;
        let i = (u.floor().max(0.0) as usize).min(n - 2);
        let j = (v.floor().max(0.0) as usize).min(n - 2);
        let tx = u - i as f64;
        let ty = v - j as f64;
        let k = i + n * j;
        let f00 = self.values[k];
        let f10 = self.values[k + 1];
        let f01 = self.values[k + n];
        let f11 = self.values[k + n + 1];
        if ty <= tx {
            f00 + tx * (f10 - f00) + ty * (f11 - f10)
        } else {
            f00 + ty * (f01 - f00) + tx * (f11 - f01)
        }
    }

    pub fn axpy(&mut self, alpha: f64, other: &FeFunction) -> Result<()> {
        if other.mesh != self.mesh {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &FeFunction) -> Result<FeFunction> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_reproduces_linear_functions() {
        let mesh = FeLevel::new(1);
        let f = FeFunction::interpolate(mesh, |x| 1.0 + 2.0 * x[0] - 3.0 * x[1]);
        for k in 0..37 {
            let x = [(k as f64 * 0.173) % 1.0, (k as f64 * 0.311) % 1.0];
            assert!((f.eval(x) - (1.0 + 2.0 * x[0] - 3.0 * x[1])).abs() < 1e-13);
        }
        assert!((f.eval([1.0, 1.0]) + 0.0).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_interpolant_vanishes_on_boundary() {
        let mesh = FeLevel::new(0);
        let f = FeFunction::interpolate_dirichlet(mesh, |_| 1.0);
        for k in 0..mesh.num_nodes() {
            assert_eq!(f.values()[k], if mesh.is_boundary(k) { 0.0 } else { 1.0 });
        }
    }
}
