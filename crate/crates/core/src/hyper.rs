//! Hyperbolic combinations evaluated without overflow or cancellation.

/// `(1 − e^{−z}) / z` for `z ≥ 0`; equals 1 at `z = 0` and decays like `1/z`.
pub(crate) fn decay_ratio(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `ln(sinh(x) / x)` for `x ≥ 0`.
pub(crate) fn ln_sinhc(x: f64) -> f64 {
    x + decay_ratio(2.0 * x).ln()
}

/// `1 − tanh(y)/y` for `y ≥ 0`.
pub(crate) fn one_minus_tanhc(y: f64) -> f64 {
    if y < 0.1 {
        y * y * tanhc_deficit_scaled(y)
    } else {
        1.0 - y.tanh() / y
    }
}

/// `(1 − tanh(y)/y) / y²`, finite at `y = 0` where it equals 1/3.
pub(crate) fn tanhc_deficit_scaled(y: f64) -> f64 {
    if y < 0.1 {
        // Taylor series of tanh(y)/y; next term is O(y¹²).
        let y2 = y * y;
        1.0 / 3.0
            + y2 * (-2.0 / 15.0
                + y2 * (17.0 / 315.0
                    + y2 * (-62.0 / 2835.0 + y2 * (1382.0 / 155_925.0 + y2 * (-21_844.0 / 6_081_075.0)))))
    } else {
        (1.0 - y.tanh() / y) / (y * y)
    }
}

/// `ln(1 − e^{−z})` for `z > 0`.
pub(crate) fn ln_one_minus_exp(z: f64) -> f64 {
    if z > std::f64::consts::LN_2 {
        (-(-z).exp()).ln_1p()
    } else {
        (-(-z).exp_m1()).ln()
    }
}

/// `coth(z)` for `z > 0`.
pub(crate) fn coth(z: f64) -> f64 {
    let e = (-2.0 * z).exp();
    (1.0 + e) / -(-2.0 * z).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_ratio_limits() {
        assert_eq!(decay_ratio(0.0), 1.0);
        assert!((decay_ratio(1e-12) - 1.0).abs() < 1e-12);
        assert!((decay_ratio(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((decay_ratio(800.0) * 800.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ln_sinhc_matches_direct_and_survives_large_arguments() {
        for &x in &[1e-8, 1e-3, 0.3, 1.0, 5.0, 40.0] {
            let direct = (f64::sinh(x) / x).ln();
            assert!((ln_sinhc(x) - direct).abs() < 1e-14 * (1.0 + direct.abs()), "x = {x}");
        }
        let big = ln_sinhc(1000.0);
        assert!((big - (1000.0 - (2000.0f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn tanhc_series_joins_direct_form() {
        let below = one_minus_tanhc(0.1 - 1e-12);
        let above = one_minus_tanhc(0.1 + 1e-12);
        assert!(((below - above) / above).abs() < 1e-10);
        // series against the direct form in the overlap region
        let y: f64 = 0.09;
        let direct = 1.0 - y.tanh() / y;
        assert!(((one_minus_tanhc(y) - direct) / direct).abs() < 1e-11);
    }

    #[test]
    fn log_and_coth_helpers() {
        for &z in &[1e-6, 0.2, 0.69, 0.7, 3.0, 50.0] {
            assert!((ln_one_minus_exp(z) - (1.0 - (-z).exp()).ln()).abs() < 1e-12 * (1.0 + z.recip()));
            assert!((coth(z) - 1.0 / z.tanh()).abs() < 1e-12 * coth(z));
        }
    }
}
