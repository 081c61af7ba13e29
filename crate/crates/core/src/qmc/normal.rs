use crate::error::{Error, Result};
use statrs::function::erf::erfc;

// Wichura, Algorithm AS 241 (PPND16).
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_545_925,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Inverse standard normal CDF for `p ∈ (0, 1/2]`, refined by one Halley step.
fn lower(p: f64) -> f64 {
    let x = ppnd16(p);
    let cdf = 0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2);
    let u = (cdf - p) * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Inverse standard normal CDF for `p ∈ (0,1)`. Exactly antisymmetric about 1/2.
#[inline]
pub fn inv_norm_cdf(p: f64) -> f64 {
    if p <= 0.5 {
        lower(p)
    } else {
        -lower(1.0 - p)
    }
}

/// Componentwise inverse standard normal CDF.
pub fn to_normal(xi: &[f64]) -> Result<Vec<f64>> {
    xi.iter()
        .map(|&p| {
            if p > 0.0 && p < 1.0 {
                Ok(inv_norm_cdf(p))
            } else {
                Err(Error::Domain(format!(
                    "inverse normal CDF needs p in (0,1), got {p}"
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    // High-precision quantiles evaluated at the exact double inputs.
    const REFERENCE: &[(f64, f64)] = &[
        (1e-300, -37.047_096_299_361_199_237),
        (1e-100, -21.273_453_560_965_324_295),
        (1e-20, -9.262_340_089_798_407_573_7),
        (1e-10, -6.361_340_902_404_056_204_7),
        (0.001, -3.090_232_306_167_813_541_5),
        (0.02425, -1.972_961_051_311_884_837_6),
        (0.1, -1.281_551_565_544_600_467),
        (0.3, -0.524_400_512_708_040_815_97),
        (0.7, 0.524_400_512_708_040_656_31),
        (0.975, 1.959_963_984_540_053_855_6),
        (0.99999, 4.264_890_793_923_840_769_9),
        (0.999_999_999_9, 6.361_340_889_697_421_864_2),
        (0.999_999_999_999_999_9, 8.209_536_151_601_386_855_6),
    ];

    #[test]
    fn matches_reference_quantiles() {
        for &(p, want) in REFERENCE {
            let got = inv_norm_cdf(p);
            assert!((got - want).abs() < 1e-9, "p={p:e}: {got} vs {want}");
        }
    }

    #[test]
    fn unrefined_rational_is_already_close() {
        for &(p, want) in REFERENCE {
            assert!((ppnd16(p) - want).abs() < 1e-12 * want.abs().max(1.0), "p={p:e}");
        }
    }

    #[test]
    fn roundtrip_through_cdf() {
        let n = Normal::new(0.0, 1.0).unwrap();
        for k in 1..2000 {
            let p = k as f64 / 2000.0;
            let x = inv_norm_cdf(p);
            assert!((n.cdf(x) - p).abs() < 1e-15, "p={p}");
        }
    }

    #[test]
    fn symmetric() {
        assert_eq!(inv_norm_cdf(0.5), 0.0);
        for k in 1..500 {
            let p = k as f64 / 1000.0 + 1e-4;
            assert!((inv_norm_cdf(p) + inv_norm_cdf(1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn domain() {
        assert!(to_normal(&[0.0]).is_err());
        assert!(to_normal(&[1.0]).is_err());
        assert!(to_normal(&[0.5, 1.5]).is_err());
        assert_eq!(to_normal(&[0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
    }
}
