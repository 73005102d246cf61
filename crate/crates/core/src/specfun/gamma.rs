use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Coefficients of 1/Gamma(z) = sum_{k>=1} c_k z^k.
const RECIP_GAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Gamma function for real arguments (Lanczos, g = 7, nine terms).
///
/// Relative error stays below 1e-13 on (0, 50). Poles return infinity.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    // t^(z+0.5) split in two factors to stay finite up to x ~ 170
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// 1/Gamma(1+mu) and 1/Gamma(1-mu) for |mu| <= 1/2 from the Taylor series of 1/Gamma.
pub(crate) fn recip_gamma_pair(mu: f64) -> (f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for &c in RECIP_GAMMA_TAYLOR.iter().rev() {
        plus = plus * mu + c;
        minus = minus * (-mu) + c;
    }
    (plus, minus)
}

/// Temme's auxiliary functions gamma1(mu), gamma2(mu) for |mu| <= 1/2:
/// gamma1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gamma2 = (1/G(1-mu) + 1/G(1+mu)) / 2.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    // even and odd parts of the 1/Gamma series, evaluated without the 1/mu cancellation
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for k in (0..RECIP_GAMMA_TAYLOR.len()).rev() {
        let c = RECIP_GAMMA_TAYLOR[k];
        // c_{k+1} multiplies mu^k in 1/Gamma(1+mu)
        if k % 2 == 1 {
            g1 = g1 * mu2 + c;
        } else {
            g2 = g2 * mu2 + c;
        }
    }
    (-g1, g2)
}
