//! Reference values computed without touching the library: adaptive
//! Gauss–Kronrod quadrature and Pfaffians by minor expansion.

#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
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
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    // QUADPACK's rescaling: |K15 - G7| grossly overstates the K15 error on
    // smooth pieces. Never claim better than roundoff.
    let value = k * h;
    let raw = ((k - g) * h).abs();
    let mag = value.abs().max(f64::MIN_POSITIVE);
    let err = (mag * (200.0 * raw / mag).powf(1.5).min(1.0)).max(50.0 * f64::EPSILON * mag);
    (value, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// ∫ₐᵇ f to roughly `rel_tol` relative accuracy: globally adaptive, always
/// bisecting the piece with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let piece = |a: f64, b: f64| {
        let (value, err) = gk15(&f, a, b);
        Piece { a, b, value, err }
    };
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(piece(a, b));
    for _ in 0..2000 {
        let (total, err) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err));
        if err <= rel_tol.max(100.0 * f64::EPSILON) * f64::abs(total) {
            break;
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(piece(worst.a, mid));
        heap.push(piece(mid, worst.b));
    }
    heap.iter().map(|p| p.value).sum()
}

/// B(x; a, b) = ∫₀ˣ t^{a-1} (1-t)^{b-1} dt for x < 1. The substitution
/// t = x v^{1/a} absorbs the endpoint singularity.
pub fn beta_lower(x: f64, a: f64, b: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x.powf(a) / a * integrate(|v| (1.0 - x * v.powf(1.0 / a)).powf(b - 1.0), 0.0, 1.0, 1e-14)
}

/// Complete beta function, split at 1/2 so neither piece reaches t = 1.
pub fn beta_complete(a: f64, b: f64) -> f64 {
    beta_lower(0.5, a, b) + beta_lower(0.5, b, a)
}

pub fn reg_beta(x: f64, a: f64, b: f64) -> f64 {
    if x == 1.0 {
        return 1.0;
    }
    beta_lower(x, a, b) / beta_complete(a, b)
}

/// ∫₀ˣ t^{a-1} (1-t)^n B(t; b, n+1) dt as a nested quadrature.
pub fn script_e(x: f64, a: f64, b: f64, n: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let outer = |v: f64| {
        let t = x * v.powf(1.0 / a);
        (1.0 - t).powf(n) * beta_lower(t, b, n + 1.0)
    };
    x.powf(a) / a * integrate(outer, 0.0, 1.0, 1e-12)
}

/// Pfaffian of an even-order skew-symmetric matrix (row-major) by expansion
/// along the first row. Exponential cost; fine up to order 8.
pub fn pfaffian_expansion(n: usize, a: &[f64]) -> f64 {
    fn rec(idx: &[usize], n: usize, a: &[f64]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let i = idx[0];
        let mut total = 0.0;
        for (k, &j) in idx.iter().enumerate().skip(1) {
            let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != i && x != j).collect();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * a[i * n + j] * rec(&rest, n, a);
        }
        total
    }
    if n % 2 == 1 {
        return 0.0;
    }
    rec(&(0..n).collect::<Vec<_>>(), n, a)
}

/// Determinant by Laplace expansion along the first row.
pub fn det_expansion(n: usize, a: &[f64]) -> f64 {
    if n == 1 {
        return a[0];
    }
    let mut total = 0.0;
    for c in 0..n {
        let minor: Vec<f64> = (1..n)
            .flat_map(|r| (0..n).filter(move |&k| k != c).map(move |k| (r, k)))
            .map(|(r, k)| a[r * n + k])
            .collect();
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * a[c] * det_expansion(n - 1, &minor);
    }
    total
}

/// Random skew-symmetric matrix with entries in [-1, 1) from a small LCG,
/// so oracle inputs don't depend on any crate.
pub fn random_skew(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = next();
            a[i * n + j] = v;
            a[j * n + i] = -v;
        }
    }
    a
}
