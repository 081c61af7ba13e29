use crate::error::{Error, Result};
use crate::rng::{keyed_rng, Stream};
use rand::Rng;

/// Smallest distance kept from 0 and 1 before the inverse normal map.
pub const UNIT_CLAMP: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

/// Point `i` of the `n`-point shifted rank-1 lattice, `frac(i·z/n + Δ)`,
/// for the dimensions covered by `z`.
pub fn lattice_point(z: &[u64], n: u64, i: u64, delta: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; z.len()];
    lattice_point_into(z, n, i, delta, &mut out)?;
    Ok(out)
}

pub fn lattice_point_into(
    z: &[u64],
    n: u64,
    i: u64,
    delta: &[f64],
    out: &mut [f64],
) -> Result<()> {
    if n == 0 || i == 0 || i > n {
        return Err(Error::Index {
            index: i as usize,
            len: n as usize,
        });
    }
    if delta.len() < z.len() || out.len() < z.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: delta.len().min(out.len()),
        });
    }
    let nf = n as f64;
    let im = i % n;
    for ((o, &zj), &dj) in out.iter_mut().zip(z).zip(delta) {
        let k = ((im as u128 * zj as u128) % n as u128) as f64;
        let mut v = k / nf + dj;
        if v >= 1.0 {
            v -= 1.0;
        }
        *o = v;
    }
    Ok(())
}

/// Clamps to `[2^-53, 1 − 2^-53]`.
#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(UNIT_CLAMP, 1.0 - UNIT_CLAMP)
}

/// `R` independent uniform shifts in `[0,1)^s`, keyed by `(seed, level, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSet {
    seed: u64,
    level: usize,
    shifts: Vec<Vec<f64>>,
}

impl ShiftSet {
    pub fn generate(seed: u64, level: usize, count: usize, dim: usize) -> Self {
        let shifts = (0..count)
            .map(|r| {
                let mut rng = keyed_rng(seed, Stream::Shift, &[level as u64, r as u64]);
                (0..dim).map(|_| rng.gen::<f64>()).collect()
            })
            .collect();
        Self {
            seed,
            level,
            shifts,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn get(&self, r: usize) -> &[f64] {
        &self.shifts[r]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.shifts.iter().map(|v| v.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exact_point() {
        let p = lattice_point(&[1, 5], 8, 3, &[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.375, 0.875]);
    }

    #[test]
    fn last_point_is_shift() {
        let z = [1, 182_667, 469_891];
        assert_eq!(lattice_point(&z, 1024, 1024, &[0.0; 3]).unwrap(), vec![0.0; 3]);
        let d = [0.25, 0.5, 0.125];
        assert_eq!(lattice_point(&z, 1024, 1024, &d).unwrap(), d.to_vec());
    }

    #[test]
    fn index_and_length_errors() {
        assert!(lattice_point(&[1, 3], 8, 0, &[0.0; 2]).is_err());
        assert!(lattice_point(&[1, 3], 8, 9, &[0.0; 2]).is_err());
        assert!(lattice_point(&[1, 3], 8, 1, &[0.0; 1]).is_err());
    }

    #[test]
    fn points_in_unit_cube() {
        let z = [1, 433_461, 315_689, 441_789];
        let d = [0.999_999_999, 0.5, 0.0, 0.75];
        for i in 1..=64 {
            let p = lattice_point(&z, 64, i, &d).unwrap();
            assert!(p.iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }

    #[test]
    fn unshifted_lattice_is_a_group() {
        for n in [2u64, 3, 8, 17, 32, 64] {
            let z = [1, 7, 13 % n.max(2), 29];
            let pts: Vec<Vec<u64>> = (1..=n)
                .map(|i| z.iter().map(|&zj| (i * zj) % n).collect())
                .collect();
            for a in &pts {
                for b in &pts {
                    let sum: Vec<u64> = a.iter().zip(b).map(|(x, y)| (x + y) % n).collect();
                    assert!(pts.contains(&sum));
                }
            }
            // exact float points reproduce the integer lattice
            for i in 1..=n {
                let p = lattice_point(&z, n, i, &[0.0; 4]).unwrap();
                for (j, &zj) in z.iter().enumerate() {
                    assert_eq!(p[j], ((i * zj) % n) as f64 / n as f64);
                }
            }
        }
    }

    #[test]
    fn shifts_are_keyed() {
        let a = ShiftSet::generate(1, 2, 4, 3);
        assert_eq!(a, ShiftSet::generate(1, 2, 4, 3));
        assert_ne!(a.get(0), ShiftSet::generate(1, 3, 4, 3).get(0));
        assert_eq!(ShiftSet::generate(1, 2, 6, 3).get(3), a.get(3));
        assert!(a.iter().flatten().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn clamp_keeps_interior() {
        assert_eq!(clamp_unit(0.0), UNIT_CLAMP);
        assert_eq!(clamp_unit(1.0), 1.0 - UNIT_CLAMP);
        assert_eq!(clamp_unit(0.3), 0.3);
    }
}
