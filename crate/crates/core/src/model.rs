//! Parameters, state and the vector field.

use libm::tanh;

use crate::error::{Error, Result};

/// The seven scalars of the model.
///
/// Validated once at construction: `d, a, k, k_s > 0`, `mu0 >= 0`,
/// `eps ∈ (0, 1)`, `b` finite. Fields are read through accessors so a value
/// can never be mutated into an invalid state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d: f64,
    a: f64,
    k: f64,
    k_s: f64,
    mu0: f64,
    b: f64,
    eps: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            expected: "finite and > 0",
        })
    }
}

impl ModelParams {
    pub fn new(d: f64, a: f64, k: f64, k_s: f64, mu0: f64, b: f64, eps: f64) -> Result<Self> {
        positive("d", d)?;
        positive("a", a)?;
        positive("k", k)?;
        positive("k_s", k_s)?;
        if !(mu0.is_finite() && mu0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu0",
                value: mu0,
                expected: "finite and >= 0",
            });
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
                expected: "finite",
            });
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                expected: "in (0, 1)",
            });
        }
        Ok(Self {
            d,
            a,
            k,
            k_s,
            mu0,
            b,
            eps,
        })
    }

    /// Canonical set: `mu0 = 0.8, a = d = 1, k = 2.3, k_s = 16, eps = 0.1`, `b = 0`.
    pub fn reference() -> Self {
        Self {
            d: 1.0,
            a: 1.0,
            k: 2.3,
            k_s: 16.0,
            mu0: 0.8,
            b: 0.0,
            eps: 0.1,
        }
    }

    pub fn with_b(self, b: f64) -> Result<Self> {
        Self::new(self.d, self.a, self.k, self.k_s, self.mu0, b, self.eps)
    }

    pub fn with_mu0(self, mu0: f64) -> Result<Self> {
        Self::new(self.d, self.a, self.k, self.k_s, mu0, self.b, self.eps)
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self::new(self.d, self.a, self.k, self.k_s, self.mu0, self.b, eps)
    }

    pub fn with_k(self, k: f64) -> Result<Self> {
        Self::new(self.d, self.a, k, self.k_s, self.mu0, self.b, self.eps)
    }

    #[inline]
    pub fn d(&self) -> f64 {
        self.d
    }
    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }
    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }
    #[inline]
    pub fn k_s(&self) -> f64 {
        self.k_s
    }
    #[inline]
    pub fn mu0(&self) -> f64 {
        self.mu0
    }
    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }
    #[inline]
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Half-width `1/d` of the interval that contains every fixed point.
    #[inline]
    pub fn z_bound(&self) -> f64 {
        1.0 / self.d
    }
}

/// Opinion `z` and slow recovery `s`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub z: f64,
    pub s: f64,
}

impl State {
    pub const fn new(z: f64, s: f64) -> Self {
        Self { z, s }
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.s.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub dz: f64,
    pub ds: f64,
}

/// Row-major 2×2 Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian(pub [[f64; 2]; 2]);

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

/// Argument of the saturating nonlinearity, `a z (k z² + μ0 − s) + b`.
#[inline]
pub fn phi(z: f64, s: f64, p: &ModelParams) -> f64 {
    (p.k * z * z + p.mu0 - s) * p.a * z + p.b
}

/// `phi` restricted to the s-nullcline `s = k_s z⁴`.
#[inline]
pub fn psi(z: f64, p: &ModelParams) -> f64 {
    let z2 = z * z;
    p.a * z * (-p.k_s * z2 * z2 + p.k * z2 + p.mu0) + p.b
}

#[inline]
pub fn tanh_prime(x: f64) -> f64 {
    let t = tanh(x);
    1.0 - t * t
}

#[inline]
pub fn vector_field(state: State, p: &ModelParams) -> Derivative {
    let State { z, s } = state;
    let z2 = z * z;
    Derivative {
        dz: -p.d * z + tanh(phi(z, s, p)),
        ds: p.eps * (-s + p.k_s * z2 * z2),
    }
}

/// Fixed-point residual `h(z) = −d z + tanh(ψ(z))`; its zeros are the
/// z-coordinates of the equilibria `(z, k_s z⁴)`.
#[inline]
pub fn residual_h(z: f64, p: &ModelParams) -> f64 {
    -p.d * z + tanh(psi(z, p))
}

pub fn jacobian(state: State, p: &ModelParams) -> Jacobian {
    let State { z, s } = state;
    let g = tanh_prime(phi(z, s, p));
    let dphi_dz = p.a * (3.0 * p.k * z * z + p.mu0 - s);
    Jacobian([
        [-p.d + g * dphi_dz, g * (-p.a * z)],
        [4.0 * p.eps * p.k_s * z * z * z, -p.eps],
    ])
}
