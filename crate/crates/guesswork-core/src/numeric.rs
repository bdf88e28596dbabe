//! Small numeric kernels shared across the crate: golden-section search,
//! log-domain linear algebra for tilted transition matrices, and stable
//! logarithms of huge integers.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximize a concave function on `[lo, hi]` by golden-section search.
///
/// Returns `(argmax, max)`. The interval is shrunk until it is narrower
/// than `tol`; the better of the two final probes is returned.
pub(crate) fn golden_max(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// log(exp(a) + exp(b)) without overflow; tolerates -inf inputs.
pub(crate) fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub(crate) fn logsumexp(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - hi).exp()).sum();
    hi + sum.ln()
}

/// Natural log of a positive big integer, accurate to a few ulps even for
/// values far beyond the f64 range.
pub(crate) fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 53;
    let mantissa = (n >> shift).to_f64().expect("53-bit mantissa");
    mantissa.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Is the digraph on `m` nodes with edges `adj[i*m + j]` strongly connected?
pub(crate) fn strongly_connected(adj: &[bool], m: usize) -> bool {
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                let edge = if forward { adj[i * m + j] } else { adj[j * m + i] };
                if edge && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count
    };
    reach(true) == m && reach(false) == m
}

/// Maximum mean cycle weight of a strongly connected digraph (Karp).
///
/// `weights[i*m + j]` is the weight of edge i -> j, `NEG_INFINITY` when the
/// edge is absent.
pub(crate) fn max_mean_cycle(weights: &[f64], m: usize) -> f64 {
    // d[t][v]: maximum weight of a t-edge walk ending at v (any start).
    let mut d = vec![vec![0.0f64; m]];
    for t in 1..=m {
        let prev = &d[t - 1];
        let mut cur = vec![f64::NEG_INFINITY; m];
        for i in 0..m {
            if prev[i] == f64::NEG_INFINITY {
                continue;
            }
            for j in 0..m {
                let w = weights[i * m + j];
                if w > f64::NEG_INFINITY {
                    let cand = prev[i] + w;
                    if cand > cur[j] {
                        cur[j] = cand;
                    }
                }
            }
        }
        d.push(cur);
    }
    let mut best = f64::NEG_INFINITY;
    for v in 0..m {
        if d[m][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut worst = f64::INFINITY;
        for t in 0..m {
            if d[t][v] == f64::NEG_INFINITY {
                continue;
            }
            let mean = (d[m][v] - d[t][v]) / (m - t) as f64;
            if mean < worst {
                worst = mean;
            }
        }
        if worst > best {
            best = worst;
        }
    }
    best
}

const SPECTRAL_MAX_ITERS: usize = 200_000;

/// Natural log of the Perron root of the nonnegative matrix with log-domain
/// entries `log_entries[i*m + j]` (NEG_INFINITY for zeros).
///
/// Works entirely in log space so tilted matrices with entries like
/// exp(-1e6) are handled without underflow. The matrix must be irreducible.
/// Power iteration runs on M + cI with c = exp(max mean cycle), which makes
/// the iteration aperiodic while keeping c <= lambda, so recovering lambda
/// from lambda + c loses at most one bit.
pub(crate) fn log_spectral_radius(log_entries: &[f64], m: usize) -> Result<f64> {
    debug_assert_eq!(log_entries.len(), m * m);
    if m == 1 {
        return Ok(log_entries[0]);
    }
    let mu = max_mean_cycle(log_entries, m);
    if mu == f64::NEG_INFINITY {
        return Err(Error::Numeric("matrix has no cycle".into()));
    }
    // Shifted matrix in log domain.
    let mut shifted = log_entries.to_vec();
    for i in 0..m {
        shifted[i * m + i] = logaddexp(shifted[i * m + i], mu);
    }
    let mut v = vec![0.0f64; m];
    let mut row = vec![0.0f64; m];
    for iter in 0..SPECTRAL_MAX_ITERS {
        let mut next = vec![f64::NEG_INFINITY; m];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            for j in 0..m {
                row[j] = shifted[i * m + j] + v[j];
            }
            next[i] = logsumexp(&row);
            let ratio = next[i] - v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        // Collatz-Wielandt: lo <= ln(lambda + c) <= hi for any positive vector.
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            let log_shifted_root = 0.5 * (lo + hi);
            let delta = log_shifted_root - mu;
            // lambda = exp(mu) * (exp(delta) - 1), with delta >= ln 2.
            return Ok(mu + delta.exp_m1().ln());
        }
        // Renormalize so the iterate stays near zero.
        let shift = next.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for x in next.iter_mut() {
            *x -= shift;
        }
        v = next;
        if iter == SPECTRAL_MAX_ITERS - 1 {
            return Err(Error::Numeric(format!(
                "power iteration did not converge within {SPECTRAL_MAX_ITERS} steps (gap {:.3e})",
                hi - lo
            )));
        }
    }
    unreachable!()
}

/// Stationary distribution of a row-stochastic matrix, by direct solve of
/// pi (P - I) = 0 with the normalization constraint replacing one equation.
pub(crate) fn stationary_distribution(transition: &[f64], m: usize) -> Result<Vec<f64>> {
    // Columns of A are equations: A[eq][var]. Build (P^T - I) with the last
    // equation replaced by sum(pi) = 1.
    let n = m;
    let mut a = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n];
    for eq in 0..n - 1 {
        for var in 0..n {
            a[eq * n + var] = transition[var * m + eq] - if eq == var { 1.0 } else { 0.0 };
        }
    }
    for var in 0..n {
        a[(n - 1) * n + var] = 1.0;
    }
    rhs[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if a[pivot * n + col].abs() < 1e-14 {
            return Err(Error::Numeric("singular system for stationary distribution".into()));
        }
        if pivot != col {
            for c in 0..n {
                a.swap(col * n + c, pivot * n + c);
            }
            rhs.swap(col, pivot);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in row + 1..n {
            acc -= a[row * n + c] * x[c];
        }
        x[row] = acc / a[row * n + row];
    }
    // Clean tiny negative round-off and renormalize.
    let mut sum = 0.0;
    for v in x.iter_mut() {
        if *v < 0.0 && *v > -1e-12 {
            *v = 0.0;
        }
        sum += *v;
    }
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::Numeric("stationary solve produced an invalid vector".into()));
    }
    for v in x.iter_mut() {
        *v /= sum;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(&mut |t| -(t - 1.25) * (t - 1.25) + 3.0, -10.0, 10.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((fx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ln_biguint_matches_f64_for_small_values() {
        let n = BigUint::from(12345u32);
        assert!((ln_biguint(&n) - 12345f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_biguint_handles_huge_values() {
        // 2^4000: ln = 4000 ln 2
        let n = BigUint::one() << 4000;
        let expected = 4000.0 * std::f64::consts::LN_2;
        assert!((ln_biguint(&n) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn karp_two_state_chain() {
        // P = [[0.7,0.3],[0.1,0.9]]: best cycle is the 1->1 self loop.
        let w = [0.7f64.ln(), 0.3f64.ln(), 0.1f64.ln(), 0.9f64.ln()];
        let mu = max_mean_cycle(&w, 2);
        assert!((mu - 0.9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn karp_prefers_two_cycle() {
        // Self loops are weak; the alternating cycle dominates.
        let w = [
            0.01f64.ln(),
            0.99f64.ln(),
            0.99f64.ln(),
            0.01f64.ln(),
        ];
        let mu = max_mean_cycle(&w, 2);
        assert!((mu - 0.99f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn spectral_radius_of_symmetric_tilt() {
        // [[q,p],[p,q]] tilted by beta has Perron root q^b + p^b.
        let (p, q, beta): (f64, f64, f64) = (0.25, 0.75, 0.5);
        let logs = [
            beta * q.ln(),
            beta * p.ln(),
            beta * p.ln(),
            beta * q.ln(),
        ];
        let got = log_spectral_radius(&logs, 2).unwrap();
        let expected = (q.powf(beta) + p.powf(beta)).ln();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn spectral_radius_periodic_matrix() {
        // [[0,1],[1,0]] is irreducible but periodic; the shift keeps the
        // iteration convergent. Perron root is 1.
        let logs = [f64::NEG_INFINITY, 0.0, 0.0, f64::NEG_INFINITY];
        let got = log_spectral_radius(&logs, 2).unwrap();
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_huge_tilt_stays_finite() {
        let (p, q): (f64, f64) = (0.3, 0.7);
        let beta = 1e9;
        let logs = [
            beta * q.ln(),
            beta * p.ln(),
            beta * p.ln(),
            beta * q.ln(),
        ];
        let got = log_spectral_radius(&logs, 2).unwrap();
        // ln lambda ~ beta ln q for huge beta.
        assert!((got / (beta * q.ln()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stationary_two_state() {
        // a=0.1, b=0.3 -> pi = (0.75, 0.25)
        let t = [0.9, 0.1, 0.3, 0.7];
        let pi = stationary_distribution(&t, 2).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-12);
        assert!((pi[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn stationary_periodic_chain() {
        let t = [0.0, 1.0, 1.0, 0.0];
        let pi = stationary_distribution(&t, 2).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-12);
    }
}
