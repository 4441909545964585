//! Complex probability function w(z) and the area-normalized Voigt profile.
//!
//! w(z) is evaluated with Weideman's rational approximation in the variable
//! Z = (L + iz)/(L − iz) with 32 expansion terms, which holds to ~1e-14
//! absolute accuracy in the closed upper half plane. Far from the origin the
//! Laplace continued fraction takes over.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::error::{invalid, Result};

const TERMS: usize = 32;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const CF_RADIUS: f64 = 15.0;
const CF_DEPTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        Self::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
    fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

struct Weideman {
    l: f64,
    /// a[0] multiplies Z^0
    a: [f64; TERMS],
}

fn weideman() -> &'static Weideman {
    static CELL: OnceLock<Weideman> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = 2 * TERMS;
        let l = (TERMS as f64 / 2f64.sqrt()).sqrt();
        // f(t) = exp(-t²)(L² + t²) at t = L·tan(kπ/2M), k = -M+1..M-1;
        // the k = -M sample is zero (t → -∞).
        let f = |k: i64| -> f64 {
            if k == -(m as i64) {
                return 0.0;
            }
            let t = l * (k as f64 * PI / (2.0 * m as f64)).tan();
            (-t * t).exp() * (l * l + t * t)
        };
        let mut a = [0.0; TERMS];
        for (j, slot) in a.iter_mut().enumerate() {
            let n = (j + 1) as f64;
            let mut acc = 0.0;
            for k in -(m as i64)..(m as i64) {
                acc += f(k) * (PI * k as f64 * n / m as f64).cos();
            }
            *slot = acc / (2 * m) as f64;
        }
        Weideman { l, a }
    })
}

/// Faddeeva function w(z) = exp(−z²)·erfc(−iz) for Im z ≥ 0.
pub fn faddeeva(x: f64, y: f64) -> (f64, f64) {
    debug_assert!(y >= 0.0);
    let z = C64::new(x, y);
    if x.abs() + y > CF_RADIUS {
        // Laplace continued fraction
        // w = (i/√π) / (z − (1/2)/(z − 1/(z − (3/2)/(z − ...))))
        let mut t = z;
        for k in (1..=CF_DEPTH).rev() {
            t = z.add(C64::new(-0.5 * k as f64, 0.0).div(t));
        }
        let w = C64::new(0.0, FRAC_1_SQRT_PI).div(t);
        return (w.re, w.im);
    }
    let wd = weideman();
    // L - iz = (L + y) - ix
    let lmiz = C64::new(wd.l + y, -x);
    let lpiz = C64::new(wd.l - y, x);
    let zz = lpiz.div(lmiz);
    let mut p = C64::new(wd.a[TERMS - 1], 0.0);
    for &c in wd.a[..TERMS - 1].iter().rev() {
        p = p.mul(zz).add(C64::new(c, 0.0));
    }
    let inv = C64::new(1.0, 0.0).div(lmiz);
    let w = p.scale(2.0).mul(inv).mul(inv).add(inv.scale(FRAC_1_SQRT_PI));
    (w.re, w.im)
}

/// Voigt profile with Doppler HWHM `gamma_d` and Lorentz HWHM `gamma_l`,
/// normalized to unit area in the abscissa units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoigtProfile {
    gamma_d: f64,
    gamma_l: f64,
    /// σ√2 of the Gaussian component
    gauss_scale: f64,
    y: f64,
}

impl VoigtProfile {
    pub fn new(gamma_d: f64, gamma_l: f64) -> Result<Self> {
        if !(gamma_d >= 0.0 && gamma_l >= 0.0) {
            return Err(invalid(format!(
                "Voigt widths must be non-negative (γ_D = {gamma_d}, γ_L = {gamma_l})"
            )));
        }
        if gamma_d == 0.0 && gamma_l == 0.0 {
            return Err(invalid("Voigt profile needs a non-zero width"));
        }
        let gauss_scale = gamma_d / LN_2.sqrt();
        let y = if gamma_d > 0.0 { gamma_l / gauss_scale } else { f64::INFINITY };
        Ok(Self {
            gamma_d,
            gamma_l,
            gauss_scale,
            y,
        })
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    /// Approximate Voigt HWHM (Olivero–Longbothum), good to ~0.02%.
    pub fn hwhm(&self) -> f64 {
        let (fg, fl) = (self.gamma_d, self.gamma_l);
        0.5346 * fl + (0.2166 * fl * fl + fg * fg).sqrt()
    }

    /// Profile value at offset `dx` from line center.
    pub fn eval(&self, dx: f64) -> f64 {
        let x = dx.abs();
        if self.gamma_l == 0.0 {
            let u = x / self.gamma_d;
            return (LN_2 / PI).sqrt() / self.gamma_d * (-LN_2 * u * u).exp();
        }
        if self.gamma_d == 0.0 {
            return self.gamma_l / (PI * (x * x + self.gamma_l * self.gamma_l));
        }
        let (re, _) = faddeeva(x / self.gauss_scale, self.y);
        re / (self.gauss_scale * PI.sqrt())
    }
}

/// Area-normalized Voigt density at ν for a line at ν₀.
pub fn voigt_profile(nu: f64, nu0: f64, gamma_d: f64, gamma_l: f64) -> Result<f64> {
    Ok(VoigtProfile::new(gamma_d, gamma_l)?.eval(nu - nu0))
}
