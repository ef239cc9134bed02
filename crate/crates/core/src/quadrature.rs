//! Globally adaptive Gauss-Kronrod (7, 15) integration of complex-valued
//! integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, max_intervals: 50_000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: C,
    error: f64,
}

// Max-heap order on the error estimate.
impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> C>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Integrates `f` over consecutive intervals `[p_0, p_1], [p_1, p_2], ...`;
/// the points must be sorted. Interior points mark where the integrand is
/// sharply peaked.
pub fn integrate<F: Fn(f64) -> C>(f: F, points: &[f64], cfg: QuadConfig) -> Result<QuadResult> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("quadrature points must be sorted, at least two".into()));
    }
    let mut heap: BinaryHeap<Segment> =
        points.windows(2).filter(|w| w[1] > w[0]).map(|w| kronrod(&f, w[0], w[1])).collect();
    if heap.is_empty() {
        return Ok(QuadResult { value: C::new(0.0, 0.0), error: 0.0, intervals: 0 });
    }
    let mut total: C = heap.iter().map(|s| s.value).sum();
    let mut err: f64 = heap.iter().map(|s| s.error).sum();
    let mut since_resum = 0usize;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if err <= target {
            // Re-sum from scratch so the returned value carries no drift.
            let value = heap.iter().map(|s| s.value).sum();
            let error = heap.iter().map(|s| s.error).sum();
            return Ok(QuadResult { value, error, intervals: heap.len() });
        }
        let fail = || Error::Quadrature { achieved: err / total.norm().max(f64::MIN_POSITIVE), requested: cfg.rel_tol };
        if heap.len() >= cfg.max_intervals {
            return Err(fail());
        }
        let s = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            return Err(fail());
        }
        let (l, r) = (kronrod(&f, s.a, mid), kronrod(&f, mid, s.b));
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        since_resum += 1;
        if since_resum == 256 {
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
            since_resum = 0;
        }
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: QuadConfig) -> Result<(f64, f64)> {
    let r = integrate(|x| C::new(f(x), 0.0), points, cfg)?;
    Ok((r.value.re, r.error))
}
