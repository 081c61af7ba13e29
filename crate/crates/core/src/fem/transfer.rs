use super::function::FeFunction;
use super::mesh::FeLevel;
use crate::error::{Error, Result};

/// Natural inclusion of a coarse P1 function into a nested finer space.
pub fn prolong(f: &FeFunction, fine: FeLevel) -> Result<FeFunction> {
    let coarse = *f.mesh();
    let ratio = coarse.nesting_ratio(&fine).ok_or_else(|| {
        Error::NestingViolation(format!(
            "mesh with {} nodes per axis is not nested in one with {}",
            coarse.nodes_per_axis(),
            fine.nodes_per_axis()
        ))
    })?;
    if ratio == 2 {
        let mut out = vec![0.0; fine.num_nodes()];
        prolong_values(coarse, fine, f.values(), &mut out);
        return FeFunction::from_values(fine, out);
    }
    Ok(FeFunction::interpolate(fine, |x| f.eval(x)))
}

/// Ratio-2 prolongation `fine = P coarse`.
pub(crate) fn prolong_values(coarse: FeLevel, fine: FeLevel, c: &[f64], f: &mut [f64]) {
    let nc = coarse.nodes_per_axis();
    let nf = fine.nodes_per_axis();
    for jf in 0..nf {
        let (jc, jodd) = (jf / 2, jf % 2 == 1);
        for i_f in 0..nf {
            let (ic, iodd) = (i_f / 2, i_f % 2 == 1);
            let k = ic + nc * jc;
            f[i_f + nf * jf] = match (iodd, jodd) {
                (false, false) => c[k],
                (true, false) => 0.5 * (c[k] + c[k + 1]),
                (false, true) => 0.5 * (c[k] + c[k + nc]),
                (true, true) => 0.5 * (c[k] + c[k + nc + 1]),
            };
        }
    }
}

/// Ratio-2 restriction `coarse = Pᵀ fine`.
pub(crate) fn restrict_values(coarse: FeLevel, fine: FeLevel, f: &[f64], c: &mut [f64]) {
    let nc = coarse.nodes_per_axis();
    let nf = fine.nodes_per_axis();
    c.fill(0.0);
    for jf in 0..nf {
        let (jc, jodd) = (jf / 2, jf % 2 == 1);
        for i_f in 0..nf {
            let (ic, iodd) = (i_f / 2, i_f % 2 == 1);
            let k = ic + nc * jc;
            let v = f[i_f + nf * jf];
            match (iodd, jodd) {
                (false, false) => c[k] += v,
                (true, false) => {
                    c[k] += 0.5 * v;
                    c[k + 1] += 0.5 * v;
                }
                (false, true) => {
                    c[k] += 0.5 * v;
                    c[k + nc] += 0.5 * v;
                }
                (true, true) => {
                    c[k] += 0.5 * v;
                    c[k + nc + 1] += 0.5 * v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prolongation_is_exact_for_p1() {
        let coarse = FeLevel::new(1);
        let g = |x: [f64; 2]| (3.0 * x[0]).sin() + x[1] * x[1];
        let fc = FeFunction::interpolate(coarse, g);
        for fine in [FeLevel::new(2), FeLevel::new(3)] {
            let ff = prolong(&fc, fine).unwrap();
            for k in 0..fine.num_nodes() {
                let x = fine.node(k);
                assert!((ff.values()[k] - fc.eval(x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shared_nodes_are_copied() {
        let coarse = FeLevel::new(0);
        let fine = FeLevel::new(1);
        let fc = FeFunction::interpolate(coarse, |x| x[0].exp() * x[1]);
        let ff = prolong(&fc, fine).unwrap();
        for k in 0..coarse.num_nodes() {
            let (i, j) = (k % 5, k / 5);
            assert_eq!(ff.values()[2 * i + 9 * 2 * j], fc.values()[k]);
        }
    }

    #[test]
    fn restriction_is_transpose() {
        let coarse = FeLevel::new(0);
        let fine = FeLevel::new(1);
        let c: Vec<f64> = (0..coarse.num_nodes()).map(|k| (k as f64).sin()).collect();
        let f: Vec<f64> = (0..fine.num_nodes()).map(|k| (k as f64 * 0.7).cos()).collect();
        let mut pc = vec![0.0; fine.num_nodes()];
        prolong_values(coarse, fine, &c, &mut pc);
        let mut rf = vec![0.0; coarse.num_nodes()];
        restrict_values(coarse, fine, &f, &mut rf);
        let lhs: f64 = pc.iter().zip(&f).map(|(a, b)| a * b).sum();
        let rhs: f64 = c.iter().zip(&rf).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn non_nested_is_rejected() {
        let f = FeFunction::zeros(FeLevel::with_nodes(0, 4).unwrap());
        assert!(matches!(
            prolong(&f, FeLevel::new(0)),
            Err(Error::NestingViolation(_))
        ));
    }
}
