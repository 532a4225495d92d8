//! Radial basis functions of positive order, their predicted convergence
//! orders, and the Riesz and semi-Riesz representers.

use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::points::norm_sq;
use crate::polyspace::UnisolventFrame;

/// Closed-form radial basis function families.
///
/// Signs are chosen so that each kernel is conditionally positive definite of
/// the order it is paired with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// `(-1)^ceil(s) r^(2s)` for non-integer `s`, `(-1)^(s+1) r^(2s) log r` for integer `s`.
    ThinPlate { s: f64 },
    /// The thin-plate forms applied to `a^2 + r^2` instead of `r^2`.
    ShiftedThinPlate { s: f64, a: f64 },
    /// `-(a^2 + r^2)^(1/2)`.
    Multiquadric { a: f64 },
    /// `(a^2 + r^2)^(-1/2)`.
    InverseMultiquadric { a: f64 },
    /// `exp(-r^2)`.
    Gaussian,
}

fn is_integer(s: f64) -> bool {
    libm::floor(s) == s
}

// (-1)^n for an integral-valued float
fn parity_sign(n: f64) -> f64 {
    if libm::fmod(libm::fabs(n), 2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl KernelFamily {
    /// Value at squared radius `r2`.
    #[inline]
    pub fn radial(&self, r2: f64) -> f64 {
        match *self {
            KernelFamily::ThinPlate { s } => {
                if r2 == 0.0 {
                    return 0.0;
                }
                if is_integer(s) {
                    parity_sign(s + 1.0) * libm::pow(r2, s) * 0.5 * libm::log(r2)
                } else {
                    parity_sign(libm::ceil(s)) * libm::pow(r2, s)
                }
            }
            KernelFamily::ShiftedThinPlate { s, a } => {
                let t = a * a + r2;
                if is_integer(s) {
                    parity_sign(s + 1.0) * 0.5 * libm::pow(t, s) * libm::log(t)
                } else {
                    parity_sign(libm::ceil(s)) * libm::pow(t, s)
                }
            }
            KernelFamily::Multiquadric { a } => -libm::sqrt(a * a + r2),
            KernelFamily::InverseMultiquadric { a } => 1.0 / libm::sqrt(a * a + r2),
            KernelFamily::Gaussian => libm::exp(-r2),
        }
    }

    fn shift(&self) -> Option<f64> {
        match *self {
            KernelFamily::ShiftedThinPlate { a, .. }
            | KernelFamily::Multiquadric { a }
            | KernelFamily::InverseMultiquadric { a } => Some(a),
            _ => None,
        }
    }

    /// Exponent `s`, with the multiquadrics as the `s = +-1/2` shifted cases.
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            KernelFamily::ThinPlate { s } | KernelFamily::ShiftedThinPlate { s, .. } => Some(s),
            KernelFamily::Multiquadric { .. } => Some(0.5),
            KernelFamily::InverseMultiquadric { .. } => Some(-0.5),
            KernelFamily::Gaussian => None,
        }
    }

    /// Shift parameter `a`, where the family has one.
    pub fn shift_param(&self) -> Option<f64> {
        self.shift()
    }

    /// Short family tag used by the text formats.
    pub fn tag(&self) -> &'static str {
        match self {
            KernelFamily::ThinPlate { .. } => "thinplate",
            KernelFamily::ShiftedThinPlate { .. } => "shifted-tps",
            KernelFamily::Multiquadric { .. } => "mq",
            KernelFamily::InverseMultiquadric { .. } => "imq",
            KernelFamily::Gaussian => "gauss",
        }
    }

    /// Rebuilds a family from its tag and optional `s`, `a` parameters.
    pub fn from_parts(tag: &str, s: Option<f64>, a: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Parameter(format!("kernel `{tag}` requires parameter {name}")))
        };
        match tag {
            "thinplate" => Ok(KernelFamily::ThinPlate { s: need(s, "s")? }),
            "shifted-tps" => Ok(KernelFamily::ShiftedThinPlate {
                s: need(s, "s")?,
                a: need(a, "a")?,
            }),
            "mq" => Ok(KernelFamily::Multiquadric { a: need(a, "a")? }),
            "imq" => Ok(KernelFamily::InverseMultiquadric { a: need(a, "a")? }),
            "gauss" => Ok(KernelFamily::Gaussian),
            other => Err(Error::Parameter(format!("unknown kernel family `{other}`"))),
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KernelFamily::ThinPlate { s } => write!(f, "thinplate:s={s}"),
            KernelFamily::ShiftedThinPlate { s, a } => write!(f, "shifted-tps:s={s},a={a}"),
            KernelFamily::Multiquadric { a } => write!(f, "mq:a={a}"),
            KernelFamily::InverseMultiquadric { a } => write!(f, "imq:a={a}"),
            KernelFamily::Gaussian => f.write_str("gauss"),
        }
    }
}

/// Parses `thinplate:s=1.5`, `shifted-tps:s=1,a=0.5`, `mq:a=1`, `imq:a=1`, `gauss`.
impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (tag, params) = match text.split_once(':') {
            Some((t, p)) => (t, Some(p)),
            None => (text, None),
        };
        let mut s = None;
        let mut a = None;
        if let Some(params) = params {
            for item in params.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| {
                    Error::Parameter(format!("malformed kernel parameter `{item}`"))
                })?;
                let value: f64 = value.trim().parse().map_err(|_| {
                    Error::Parameter(format!("kernel parameter `{item}` is not a number"))
                })?;
                let slot = match key.trim() {
                    "s" => &mut s,
                    "a" => &mut a,
                    other => {
                        return Err(Error::Parameter(format!(
                            "unknown kernel parameter `{other}`"
                        )))
                    }
                };
                if slot.replace(value).is_some() {
                    return Err(Error::Parameter(format!("kernel parameter `{key}` repeated")));
                }
            }
        }
        let family = Self::from_parts(tag, s, a)?;
        let allowed_s = matches!(tag, "thinplate" | "shifted-tps");
        let allowed_a = matches!(tag, "shifted-tps" | "mq" | "imq");
        if (s.is_some() && !allowed_s) || (a.is_some() && !allowed_a) {
            return Err(Error::Parameter(format!(
                "kernel `{tag}` does not take the given parameters"
            )));
        }
        Ok(family)
    }
}

/// Predicted pointwise convergence orders in the data density `h_X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPrediction {
    pub eta: f64,
    pub delta: f64,
}

impl OrderPrediction {
    /// Total order `eta_G = eta + delta_G`.
    pub fn total(&self) -> f64 {
        self.eta + self.delta
    }
}

/// Slack below 1/2 used where any increment strictly below 1/2 is admissible.
pub const OPEN_HALF_SLACK: f64 = 1e-6;

/// A validated kernel together with the polynomial order and dimension it is used with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    theta: usize,
    dim: usize,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, theta: usize, dim: usize) -> Result<Self> {
        if theta == 0 {
            return Err(Error::Parameter("order theta must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::Parameter("dimension d must be at least 1".into()));
        }
        let t = theta as f64;
        let d = dim as f64;
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("kernel parameter {name} must be finite")))
            }
        };
        if let Some(a) = family.shift() {
            finite(a, "a")?;
            if a <= 0.0 {
                return Err(Error::Parameter(format!("shift a = {a} must be positive")));
            }
        }
        match family {
            KernelFamily::ThinPlate { s } => {
                finite(s, "s")?;
                if !(s > 0.0 && s < t) {
                    return Err(Error::Parameter(format!(
                        "thin-plate exponent requires 0 < s < theta, got s = {s}, theta = {theta}"
                    )));
                }
            }
            KernelFamily::ShiftedThinPlate { s, .. } => {
                finite(s, "s")?;
                if !(s > -d / 2.0 && s < t) {
                    return Err(Error::Parameter(format!(
                        "shifted thin-plate exponent requires -d/2 < s < theta, got s = {s}"
                    )));
                }
                if s == 0.0 {
                    return Err(Error::Parameter(
                        "shifted thin-plate with s = 0 is constant".into(),
                    ));
                }
            }
            KernelFamily::Multiquadric { .. } => {
                if dim < 2 {
                    return Err(Error::Parameter(
                        "multiquadric requires dimension d > 1".into(),
                    ));
                }
            }
            KernelFamily::InverseMultiquadric { .. } | KernelFamily::Gaussian => {}
        }
        Ok(Self { family, theta, dim })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `G(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::Input("kernel argument contains NaN".into()));
        }
        Ok(self.family.radial(norm_sq(x)))
    }

    /// `G(x - y)` without argument checks.
    #[inline]
    pub fn eval_between(&self, x: &[f64], y: &[f64]) -> f64 {
        self.family.radial(crate::points::dist_sq(x, y))
    }

    /// `(2 pi)^(d/2)`.
    pub fn fourier_scale(&self) -> f64 {
        libm::pow(2.0 * PI, self.dim as f64 / 2.0)
    }

    pub fn predicted_orders(&self) -> OrderPrediction {
        let theta = self.theta as f64;
        match self.family {
            KernelFamily::ThinPlate { s } => {
                let two_s = 2.0 * s;
                let eta = if is_integer(two_s) {
                    theta.min(s - 0.5)
                } else {
                    theta.min(libm::floor(two_s) / 2.0)
                };
                let delta = if is_integer(s) {
                    0.5 - OPEN_HALF_SLACK
                } else {
                    s - libm::floor(two_s) / 2.0
                };
                OrderPrediction { eta, delta }
            }
            KernelFamily::ShiftedThinPlate { .. }
            | KernelFamily::Multiquadric { .. }
            | KernelFamily::InverseMultiquadric { .. } => OrderPrediction {
                eta: theta,
                delta: 0.5,
            },
            KernelFamily::Gaussian => OrderPrediction {
                eta: theta,
                delta: 0.0,
            },
        }
    }

    fn check_frame(&self, uf: &UnisolventFrame) -> Result<()> {
        let f = uf.frame();
        if f.dim() != self.dim || f.theta() != self.theta {
            return Err(Error::Parameter(format!(
                "unisolvent frame (d={}, theta={}) does not match kernel (d={}, theta={})",
                f.dim(),
                f.theta(),
                self.dim,
                self.theta
            )));
        }
        Ok(())
    }

    /// Riesz representer `R_x(y)` of point evaluation for the minimal
    /// unisolvent set held by `uf`.
    pub fn riesz_representer(&self, uf: &UnisolventFrame, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_frame(uf)?;
        let lx = uf.cardinal_values(x);
        let ly = uf.cardinal_values(y);
        let poly: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
        Ok(self.semi_riesz_with(uf, x, y, &lx, &ly)? + poly)
    }

    /// Semi-Riesz representer `r_x(y) = R_x(y) - sum_j l_j(x) l_j(y)`.
    pub fn semi_riesz(&self, uf: &UnisolventFrame, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_frame(uf)?;
        let lx = uf.cardinal_values(x);
        let ly = uf.cardinal_values(y);
        self.semi_riesz_with(uf, x, y, &lx, &ly)
    }

    fn semi_riesz_with(
        &self,
        uf: &UnisolventFrame,
        x: &[f64],
        y: &[f64],
        lx: &[f64],
        ly: &[f64],
    ) -> Result<f64> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                got: if x.len() != self.dim { x.len() } else { y.len() },
            });
        }
        if x.iter().chain(y).any(|v| v.is_nan()) {
            return Err(Error::Input("representer argument contains NaN".into()));
        }
        let a = uf.points();
        let m = a.len();
        let mut acc = self.eval_between(y, x);
        for i in 0..m {
            acc -= lx[i] * self.eval_between(y, a.point(i));
            acc -= ly[i] * self.eval_between(a.point(i), x);
        }
        for i in 0..m {
            for j in 0..m {
                acc += lx[i] * self.eval_between(a.point(j), a.point(i)) * ly[j];
            }
        }
        Ok(acc / self.fourier_scale())
    }

    /// Text form of the family, e.g. `thinplate:s=1.5`.
    pub fn family_string(&self) -> String {
        format!("{}", self.family)
    }
}
