//! Bounded, symmetric, non-negative smoothing kernels and bandwidths.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `(2 pi)^(-1/2)`
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum KernelSpec {
    /// Standard normal density.
    #[default]
    Gaussian,
    /// `0.75 (1 - u^2)` on `[-1, 1]`.
    Epanechnikov,
}

impl KernelSpec {
    #[inline]
    pub fn evaluate(self, u: f64) -> f64 {
        match self {
            KernelSpec::Gaussian => INV_SQRT_2PI * (-0.5 * u * u).exp(),
            KernelSpec::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width of the support, `None` for unbounded support.
    pub fn support_radius(self) -> Option<f64> {
        match self {
            KernelSpec::Gaussian => None,
            KernelSpec::Epanechnikov => Some(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelSpec::Gaussian => "gaussian",
            KernelSpec::Epanechnikov => "epanechnikov",
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(KernelSpec::Gaussian),
            "epanechnikov" => Ok(KernelSpec::Epanechnikov),
            other => Err(Error::UnknownKernel(other.to_string())),
        }
    }
}

/// Strictly positive, finite smoothing parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Self(h))
        } else {
            Err(Error::InvalidBandwidth(h))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
