//! Error-function family via W. J. Cody's rational Chebyshev approximations
//! (CALERF), evaluated in the scaled form wherever the unscaled one would
//! under- or overflow.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const ONE_OVER_SQRT_PI: f64 = 0.564_189_583_547_756_286_95;
const SMALL_ARG: f64 = 0.468_75;
/// Below this, `2 exp(x^2)` no longer fits in an `f64`.
const OVERFLOW_ARG: f64 = -26.628_735_713_751_4;
/// Above this, `erfcx(x) = 1/(x sqrt(pi))` to full precision.
const HUGE_ARG: f64 = 6.71e7;

// erf on |x| <= 0.46875
const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302_02,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const B: [f64; 4] = [
    23.601_290_952_344_122,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];

// erfcx on 0.46875 < x <= 4
const C: [f64; 9] = [
    0.564_188_496_988_670_09,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_13,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_5,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];

// erfcx on x > 4, in powers of 1/x^2
const P: [f64; 6] = [
    0.305_326_634_961_232_34,
    0.360_344_899_949_804_44,
    0.125_781_726_111_229_25,
    0.016_083_785_148_742_277,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_098,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_4,
    1.872_952_849_923_460_5,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

/// `erf(x) / x` for `|x| <= 0.46875`, argument `z = x^2`.
fn erf_over_x_small(z: f64) -> f64 {
    let num = (((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3];
    let den = (((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3];
    num / den
}

/// `erfcx(y)` for `y > 0.46875`.
fn erfcx_positive_large(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else if y >= HUGE_ARG {
        ONE_OVER_SQRT_PI / y
    } else {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        (ONE_OVER_SQRT_PI - r) / y
    }
}

/// `exp(x^2)` with the square split to keep the rounding error of `x^2`
/// out of the exponent.
fn exp_square(x: f64) -> f64 {
    let head = (x * 16.0).trunc() / 16.0;
    (head * head).exp() * ((x - head) * (x + head)).exp()
}

/// `exp(-x^2)`, split the same way.
fn exp_neg_square(x: f64) -> f64 {
    let head = (x * 16.0).trunc() / 16.0;
    (-head * head).exp() * (-(x - head) * (x + head)).exp()
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
///
/// Relative accuracy is close to machine precision for every `x >= 0`.
/// For negative arguments the reflection `2 exp(x^2) - erfcx(-x)` is used,
/// which overflows below `x ~ -26.63` and is reported as [`Error::Range`].
pub fn erfcx(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("erfcx of NaN".into()));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x < OVERFLOW_ARG {
        return Err(Error::Range(format!("erfcx({x}) overflows")));
    }
    let y = x.abs();
    if y <= SMALL_ARG {
        let z = y * y;
        return Ok(z.exp() * (1.0 - x * erf_over_x_small(z)));
    }
    let tail = erfcx_positive_large(y);
    if x < 0.0 {
        Ok(2.0 * exp_square(x) - tail)
    } else {
        Ok(tail)
    }
}

/// Complementary error function. Underflows gracefully to zero.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL_ARG {
        return 1.0 - x * erf_over_x_small(y * y);
    }
    let upper = if y > 26.6 { 0.0 } else { erfcx_positive_large(y) * exp_neg_square(y) };
    if x < 0.0 {
        2.0 - upper
    } else {
        upper
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= SMALL_ARG {
        return x * erf_over_x_small(y * y);
    }
    let magnitude = 1.0 - erfc(y);
    if x < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}
