//! Bessel-family special functions used by the mode solvers and the
//! excitation-spot model.
//!
//! `J_n` is evaluated with Miller's downward recurrence normalized through
//! the identity `J_0 + 2*sum_k J_{2k} = 1`, which is accurate to near machine
//! precision for the argument ranges that occur here (x below a few hundred).
//! `K_0`/`K_1` use the Abramowitz & Stegun polynomial fits (about 1e-7
//! absolute) with stable upward recurrence for higher orders.

/// First positive zero of `J_1`, i.e. the first dark ring of the Airy pattern.
pub const AIRY_FIRST_ZERO_X: f64 = 3.831_705_970_207_512_5;

/// Argument at which `[2 J_1(x)/x]^2` falls to one half.
pub const AIRY_HALF_MAX_X: f64 = 1.616_339_948_310_703;

/// Bessel function of the first kind, integer order `n >= 0`.
pub fn bessel_jn(n: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "bessel_jn expects x >= 0");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Start the downward recurrence well above both the order and the
    // turning point x.
    let start = {
        let m = (n as f64).max(x) as u32 + 1;
        let pad = 18 + (x.sqrt() as u32) * 4;
        let m = m + pad;
        // recurrence parity does not matter; keep it even for the sum rule
        m + (m & 1)
    };
    let mut jp = 0.0_f64; // J_{k+1}
    let mut j = 1e-30_f64; // J_k (arbitrary seed)
    let mut sum = 0.0_f64;
    let mut result = 0.0_f64;
    let mut k = start;
    while k > 0 {
        let jm = (2.0 * k as f64 / x) * j - jp; // J_{k-1}
        jp = j;
        j = jm;
        // renormalize to avoid overflow of the unscaled recurrence
        if j.abs() > 1e100 {
            j *= 1e-100;
            jp *= 1e-100;
            sum *= 1e-100;
            result *= 1e-100;
        }
        k -= 1;
        if k > 0 && k % 2 == 0 {
            sum += j;
        }
        if k == n {
            result = j;
        }
    }
    if n == 0 {
        result = j;
    }
    sum = 2.0 * sum + j; // J_0 + 2 * sum_{k even >= 2} J_k = 1
    result / sum
}

/// Derivative `J_n'(x)` via the standard three-term relation.
pub fn bessel_jn_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_jn(1, x)
    } else {
        0.5 * (bessel_jn(n - 1, x) - bessel_jn(n + 1, x))
    }
}

/// Modified Bessel function `I_0` (series / polynomial fit, A&S 9.8.1-9.8.2).
fn bessel_i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let t = (x / 3.75) * (x / 3.75);
        1.0 + t
            * (3.5156229
                + t * (3.0899424
                    + t * (1.2067492 + t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))))
    } else {
        let t = 3.75 / ax;
        (ax.exp() / ax.sqrt())
            * (0.39894228
                + t * (0.01328592
                    + t * (0.00225319
                        + t * (-0.00157565
                            + t * (0.00916281
                                + t * (-0.02057706
                                    + t * (0.02635537 + t * (-0.01647633 + t * 0.00392377))))))))
    }
}

fn bessel_i1(x: f64) -> f64 {
    let ax = x.abs();
    let ans = if ax < 3.75 {
        let t = (x / 3.75) * (x / 3.75);
        ax * (0.5
            + t * (0.87890594
                + t * (0.51498869
                    + t * (0.15084934 + t * (0.02658733 + t * (0.00301532 + t * 0.00032411))))))
    } else {
        let t = 3.75 / ax;
        let a = 0.02282967 + t * (-0.02895312 + t * (0.01787654 - t * 0.00420059));
        let b = 0.39894228 + t * (-0.03988024 + t * (-0.00362018 + t * (0.00163801 + t * (-0.01031555 + t * a))));
        (ax.exp() / ax.sqrt()) * b
    };
    if x < 0.0 {
        -ans
    } else {
        ans
    }
}

/// Modified Bessel function of the second kind, `K_0` (A&S 9.8.5-9.8.6).
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k0 requires x > 0");
    if x <= 2.0 {
        let t = x * x / 4.0;
        -(x / 2.0).ln() * bessel_i0(x)
            + (-0.57721566
                + t * (0.42278420
                    + t * (0.23069756
                        + t * (0.03488590 + t * (0.00262698 + t * (0.00010750 + t * 0.00000740))))))
    } else {
        let t = 2.0 / x;
        ((-x).exp() / x.sqrt())
            * (1.25331414
                + t * (-0.07832358
                    + t * (0.02189568
                        + t * (-0.01062446
                            + t * (0.00587872 + t * (-0.00251540 + t * 0.00053208))))))
    }
}

/// `K_1` (A&S 9.8.7-9.8.8).
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k1 requires x > 0");
    if x <= 2.0 {
        let t = x * x / 4.0;
        (x / 2.0).ln() * bessel_i1(x)
            + (1.0 / x)
                * (1.0
                    + t * (0.15443144
                        + t * (-0.67278579
                            + t * (-0.18156897
                                + t * (-0.01919402 + t * (-0.00110404 - t * 0.00004686))))))
    } else {
        let t = 2.0 / x;
        ((-x).exp() / x.sqrt())
            * (1.25331414
                + t * (0.23498619
                    + t * (-0.03655620
                        + t * (0.01504268
                            + t * (-0.00780353 + t * (0.00325614 - t * 0.00068245))))))
    }
}

/// `K_n` for integer order via upward recurrence (stable for K).
pub fn bessel_kn(n: u32, x: f64) -> f64 {
    match n {
        0 => bessel_k0(x),
        1 => bessel_k1(x),
        _ => {
            let mut km = bessel_k0(x);
            let mut k = bessel_k1(x);
            for j in 1..n {
                let kp = km + (2.0 * j as f64 / x) * k;
                km = k;
                k = kp;
            }
            k
        }
    }
}

/// Derivative `K_n'(x)`.
pub fn bessel_kn_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_k1(x)
    } else {
        -0.5 * (bessel_kn(n - 1, x) + bessel_kn(n + 1, x))
    }
}

/// First maximum of `J_m`, i.e. the smallest positive zero of `J_m'`.
pub fn first_jn_max(m: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    // j'_{m,1} lies in (m, m + 2 m^{1/3} + 2); scan then bisect.
    let mut a = mf.max(1e-3);
    let step = (0.05 * mf.cbrt()).max(0.02);
    let mut fa = bessel_jn_prime(m, a);
    let limit = mf + 2.5 * mf.cbrt() + 3.0;
    let mut b = a;
    loop {
        b += step;
        let fb = bessel_jn_prime(m, b);
        if fa * fb <= 0.0 {
            break;
        }
        a = b;
        fa = fb;
        assert!(b < limit, "first_jn_max: no sign change found for m = {m}");
    }
    // bisection
    let mut lo = a;
    let mut hi = b;
    let mut flo = fa;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_jn_prime(m, mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Normalized Airy-disk intensity `[2 J_1(x)/x]^2`, with the x -> 0 limit 1.
pub fn airy_intensity(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0;
    }
    let t = 2.0 * bessel_jn(1, x.abs()) / x.abs();
    t * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values frozen from an independent high-precision evaluation.
    #[test]
    fn jn_matches_reference() {
        assert_relative_eq!(bessel_jn(0, 1.0), 0.7651976865579666, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(0, 5.0), -0.17759677131433835, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(1, 1.0), 0.44005058574493355, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(1, 3.8), 0.01282100292673165, max_relative = 1e-10);
        assert_relative_eq!(bessel_jn(2, 1.5), 0.23208767214421475, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(5, 2.0), 0.007039629755871686, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(21, 22.5), 0.22814068242211766, max_relative = 1e-12);
        assert_relative_eq!(bessel_jn(21, 18.0), 0.036862326050899445, max_relative = 1e-11);
        assert_relative_eq!(bessel_jn(30, 10.0), 1.5510960782574745e-12, max_relative = 1e-10);
    }

    #[test]
    fn kn_matches_reference() {
        assert_relative_eq!(bessel_k0(1.0), 0.42102443824070834, max_relative = 1e-6);
        assert_relative_eq!(bessel_k0(0.1), 2.427069024702017, max_relative = 1e-6);
        assert_relative_eq!(bessel_k1(1.0), 0.6019072301972346, max_relative = 1e-6);
        assert_relative_eq!(bessel_k1(2.5), 0.07389081634774708, max_relative = 1e-6);
        assert_relative_eq!(bessel_kn(2, 2.0), 0.2537597545660559, max_relative = 1e-6);
        assert_relative_eq!(bessel_kn(3, 1.5), 1.8338037024745788, max_relative = 1e-6);
    }

    #[test]
    fn jn_prime_consistent_with_finite_difference() {
        for &(n, x) in &[(0u32, 1.3), (1, 2.2), (5, 4.0), (21, 23.0)] {
            let h = 1e-6;
            let fd = (bessel_jn(n, x + h) - bessel_jn(n, x - h)) / (2.0 * h);
            assert_relative_eq!(bessel_jn_prime(n, x), fd, max_relative = 1e-7, epsilon = 1e-9);
        }
    }

    #[test]
    fn first_jn_max_reference() {
        assert_relative_eq!(first_jn_max(1), 1.8411837813406595, max_relative = 1e-10);
        assert_relative_eq!(first_jn_max(21), 23.254820510010976, max_relative = 1e-10);
    }

    #[test]
    fn airy_pattern_landmarks() {
        assert_relative_eq!(airy_intensity(0.0), 1.0);
        assert!(airy_intensity(AIRY_FIRST_ZERO_X).abs() < 1e-16);
        assert_relative_eq!(airy_intensity(AIRY_HALF_MAX_X), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn kn_recurrence_consistent() {
        // K satisfies K_{n+1} - K_{n-1} = (2n/x) K_n by construction; check the
        // derivative against finite differences instead.
        let h = 1e-6;
        for &(n, x) in &[(0u32, 1.7), (1, 2.4), (2, 3.1)] {
            let fd = (bessel_kn(n, x + h) - bessel_kn(n, x - h)) / (2.0 * h);
            assert_relative_eq!(bessel_kn_prime(n, x), fd, max_relative = 1e-6);
        }
    }
}
