//! Half-integer Bessel functions `J_{n-1/2}`, their derivatives and zeros.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest order index accepted by the public evaluators.
pub const N_MAX: usize = 12;

/// Scan step for zero bracketing.
const SCAN_STEP: f64 = PI / 8.0;

/// Order index `n ≥ 1` of `J_ν` with `ν = n - 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BesselOrder(usize);

impl BesselOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Bessel order index must be at least 1".into()));
        }
        if n > N_MAX {
            return Err(Error::OrderTooLarge { n, max: N_MAX });
        }
        Ok(Self(n))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn nu(self) -> f64 {
        self.0 as f64 - 0.5
    }
}

/// `Γ(n + 1/2)` for integer `n ≥ 0`.
fn gamma_half(n: usize) -> f64 {
    (0..n).fold(PI.sqrt(), |g, k| g * (k as f64 + 0.5))
}

fn series(n: usize, x: f64) -> f64 {
    let nu = n as f64 - 0.5;
    let half = 0.5 * x;
    // First term (x/2)^ν / Γ(ν + 1), with Γ(ν + 1) = Γ(n + 1/2).
    let mut term = half.powf(nu) / gamma_half(n);
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn upward(n: usize, x: f64) -> f64 {
    let c = (2.0 / (PI * x)).sqrt();
    let (s, co) = x.sin_cos();
    let mut prev = c * s;
    if n == 1 {
        return prev;
    }
    let mut cur = c * (s / x - co);
    for k in 2..n {
        let nu = k as f64 - 0.5;
        let next = 2.0 * nu / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `J_{n-1/2}(x)` for `x > 0` without the order cap (used for derivative chains).
pub(crate) fn j_half(n: usize, x: f64) -> f64 {
    debug_assert!(n >= 1 && x > 0.0);
    if x < n as f64 - 0.5 {
        series(n, x)
    } else {
        upward(n, x)
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidArgument(format!("Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `J_{n-1/2}(x)`.
pub fn eval_j(n: usize, x: f64) -> Result<f64> {
    BesselOrder::new(n)?;
    check_arg(x)?;
    Ok(j_half(n, x))
}

/// `d/dr J_ν(ωr) = (ν/r) J_ν(ωr) − ω J_{ν+1}(ωr)`.
pub fn eval_j_prime_scaled(n: usize, omega: f64, r: f64) -> Result<f64> {
    let order = BesselOrder::new(n)?;
    check_arg(r)?;
    check_arg(omega)?;
    Ok(jprime_unchecked(order.nu(), n, omega, r))
}

fn jprime_unchecked(nu: f64, n: usize, omega: f64, r: f64) -> f64 {
    nu / r * j_half(n, omega * r) - omega * j_half(n + 1, omega * r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    /// Zeros of `J_ν`.
    Function,
    /// Zeros of `J_ν′`.
    Derivative,
}

/// Ascending positive zeros of `J_ν` or `J_ν′` with the residual `|f(zero)|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroTable {
    pub n: usize,
    pub kind: ZeroKind,
    pub zeros: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn target(n: usize, kind: ZeroKind) -> impl Fn(f64) -> f64 {
    let nu = n as f64 - 0.5;
    move |x| match kind {
        ZeroKind::Function => j_half(n, x),
        ZeroKind::Derivative => jprime_unchecked(nu, n, 1.0, x),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || b - a <= 1e-14 * b.max(1.0) {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
}

/// Default scan limit: generous enough for `count` zeros of order `n`.
fn default_limit(n: usize, count: usize) -> f64 {
    (count + n + 4) as f64 * PI
}

/// First `count` zeros by sign scanning on a `π/8` grid up to `limit`, then bisection.
pub fn zeros_with_limit(n: usize, kind: ZeroKind, count: usize, limit: f64) -> Result<ZeroTable> {
    BesselOrder::new(n)?;
    if count == 0 {
        return Err(Error::InvalidArgument("zero count must be at least 1".into()));
    }
    let f = target(n, kind);
    let mut zeros = Vec::with_capacity(count);
    let mut a = SCAN_STEP;
    let mut fa = f(a);
    while zeros.len() < count {
        let b = a + SCAN_STEP;
        if b > limit {
            return Err(Error::BracketExhausted { found: zeros.len(), wanted: count, limit });
        }
        let fb = f(b);
        if fa == 0.0 {
            zeros.push(a);
        } else if (fa < 0.0) != (fb < 0.0) {
            zeros.push(bisect(&f, a, b));
        }
        a = b;
        fa = fb;
    }
    zeros.truncate(count);
    let residuals = zeros.iter().map(|&z| f(z).abs()).collect();
    Ok(ZeroTable { n, kind, zeros, residuals })
}

/// Positive zeros `ω_{n,m}` of `J_{n-1/2}`.
pub fn zeros_j(n: usize, count: usize) -> Result<ZeroTable> {
    zeros_with_limit(n, ZeroKind::Function, count, default_limit(n, count))
}

/// Positive zeros of `J_{n-1/2}′`.
pub fn zeros_jprime(n: usize, count: usize) -> Result<ZeroTable> {
    zeros_with_limit(n, ZeroKind::Derivative, count, default_limit(n, count))
}

/// All zeros below `x_max`.
pub fn zeros_below(n: usize, kind: ZeroKind, x_max: f64) -> Result<Vec<f64>> {
    BesselOrder::new(n)?;
    let f = target(n, kind);
    let mut out = Vec::new();
    let mut a = SCAN_STEP;
    let mut fa = f(a);
    while a < x_max {
        let b = a + SCAN_STEP;
        let fb = f(b);
        if (fa < 0.0) != (fb < 0.0) {
            let z = bisect(&f, a, b);
            if z <= x_max {
                out.push(z);
            }
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

/// Smallest distance between zeros of different orders below `x_max`;
/// `+∞` for fewer than two orders.
pub fn no_common_zero_check(orders: &[usize], kind: ZeroKind, x_max: f64) -> Result<f64> {
    let tables = orders.iter().map(|&n| zeros_below(n, kind, x_max)).collect::<Result<Vec<_>>>()?;
    let mut best = f64::INFINITY;
    for a in 0..tables.len() {
        for b in a + 1..tables.len() {
            for x in &tables[a] {
                for y in &tables[b] {
                    best = best.min((x - y).abs());
                }
            }
        }
    }
    Ok(best)
}

/// Whether exactly one zero of `J_{ν+1}` lies strictly between each pair of
/// consecutive zeros of `J_ν`, over the first `count` zeros of `J_ν`.
pub fn interlacing_holds(n: usize, count: usize) -> Result<bool> {
    let lower = zeros_j(n, count)?;
    let upper = zeros_below(n + 1, ZeroKind::Function, lower.zeros[count - 1])?;
    Ok(lower.zeros.windows(2).all(|w| upper.iter().filter(|&&z| z > w[0] && z < w[1]).count() == 1))
}
