//! Complex gamma function (Lanczos, g = 7, n = 9) and its reciprocal.

use std::f64::consts::PI;

use crate::C64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// `ln Γ(z)` for `Re z ≥ 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `Γ(z)` for complex `z`. Poles return non-finite values.
pub fn gamma(z: C64) -> C64 {
    let r = recip_gamma(z);
    C64::new(1.0, 0.0) / r
}

/// `1/Γ(z)`, entire: exactly zero at `z = 0, -1, -2, …`.
pub fn recip_gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        // Reflection: 1/Γ(z) = Γ(1-z) sin(πz) / π.
        let s = (PI * z).sin();
        return ln_gamma_right(1.0 - z).exp() * s / PI;
    }
    (-ln_gamma_right(z)).exp()
}

/// Real gamma for `x > 0`.
pub fn gamma_real(x: f64) -> f64 {
    gamma(C64::new(x, 0.0)).re
}
