//! Sign-change scanning with bisection and secant polishing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCAN_STEP: f64 = 0.1;
/// Halvings tried when a same-sign local minimum of |f| suggests a pair of close zeros.
const DIP_DEPTH: u32 = 6;

/// Zeros in scan order: ascending, or descending for intervals on the negative axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub values: Vec<f64>,
    pub achieved_tolerance: f64,
}

impl ZeroList {
    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

fn sign_differs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Locates a zero inside `[a, b]` where the target changes sign, to width `tol`.
pub fn refine_bracket<F>(target: &mut F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut f_lo = target(lo)?;
    let f_hi = target(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !sign_differs(f_lo, f_hi) {
        return Err(Error::NotFound {
            found: vec![],
            requested: 1,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = target(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if sign_differs(f_lo, f_mid) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }

    // Secant polish inside the final bracket.
    let bisected = 0.5 * (lo + hi);
    let (mut x0, mut x1) = (lo, hi);
    let (mut y0, mut y1) = (f_lo, target(hi)?);
    let mut best = bisected;
    for _ in 0..8 {
        if y1 == y0 {
            break;
        }
        let x2 = x1 - y1 * (x1 - x0) / (y1 - y0);
        if !(x2 >= lo && x2 <= hi) {
            break;
        }
        let y2 = target(x2)?;
        best = x2;
        if y2 == 0.0 || (x2 - x1).abs() <= 1e-15 * x2.abs().max(1.0) {
            break;
        }
        x0 = x1;
        y0 = y1;
        x1 = x2;
        y1 = y2;
    }
    // Keep the polished value only if it still straddles a sign change at ±tol.
    let straddles = |x: f64, target: &mut F| -> Result<bool> {
        Ok(sign_differs(target(x - tol)?, target(x + tol)?))
    };
    if best != bisected && !straddles(best, target)? {
        best = bisected;
    }
    Ok(best)
}

/// First `n` zeros of `target` in `interval`, scanning from the end nearest
/// the origin when the interval lies on the negative axis.
pub fn find_zeros<F>(mut target: F, interval: (f64, f64), n: usize, tol: f64) -> Result<ZeroList>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("bad search interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let descending = b <= 0.0;
    let (start, end, dir) = if descending {
        (b, a, -1.0)
    } else {
        (a, b, 1.0)
    };
    let past_end = |x: f64| if descending { x < end } else { x > end };

    let mut found: Vec<f64> = Vec::new();
    let push = |z: f64, found: &mut Vec<f64>| {
        if found
            .last()
            .is_none_or(|&last| (z - last).abs() > 10.0 * tol)
        {
            found.push(z);
        }
    };

    let mut prev_x = start;
    let mut prev_f = target(start)?;
    let mut before: Option<(f64, f64)> = None;
    if prev_f == 0.0 {
        push(start, &mut found);
    }
    let mut i = 1usize;
    while found.len() < n {
        let mut x = start + dir * SCAN_STEP * i as f64;
        i += 1;
        let last_step = past_end(x);
        if last_step {
            x = end;
        }
        let fx = target(x)?;
        if fx == 0.0 {
            push(x, &mut found);
        } else if sign_differs(prev_f, fx) {
            let z = refine_bracket(&mut target, prev_x, x, tol)?;
            push(z, &mut found);
        } else if let Some((bx, bf)) = before {
            // |f| dipped at prev_x without a sign change: look for a hidden pair.
            if !sign_differs(bf, prev_f) && prev_f.abs() < bf.abs().min(fx.abs()) {
                for z in probe_dip(&mut target, bx, x, tol)? {
                    push(z, &mut found);
                }
            }
        }
        if last_step || x == end {
            break;
        }
        before = Some((prev_x, prev_f));
        prev_x = x;
        prev_f = fx;
    }

    if found.len() < n {
        return Err(Error::NotFound {
            found,
            requested: n,
        });
    }
    found.truncate(n);
    // Far out the target may sit at the noise floor; widen until the sign change is visible.
    let mut achieved = tol;
    for &z in &found {
        while achieved < 0.01 * SCAN_STEP
            && !sign_differs(target(z - achieved)?, target(z + achieved)?)
        {
            achieved *= 10.0;
        }
    }
    Ok(ZeroList {
        values: found,
        achieved_tolerance: achieved,
    })
}

/// Resamples `[from, to]` with successively halved steps looking for sign changes.
fn probe_dip<F>(target: &mut F, from: f64, to: f64, tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = Vec::new();
    for depth in 2..=DIP_DEPTH + 1 {
        let pieces = 1usize << depth;
        let h = (to - from) / pieces as f64;
        let mut zeros = Vec::new();
        let mut px = from;
        let mut pf = target(from)?;
        for k in 1..=pieces {
            let x = from + h * k as f64;
            let fx = target(x)?;
            if fx == 0.0 {
                zeros.push(x);
            } else if sign_differs(pf, fx) {
                zeros.push(refine_bracket(target, px, x, tol)?);
            }
            px = x;
            pf = fx;
        }
        // a same-sign dip hides zeros in pairs
        if zeros.len() >= 2 {
            return Ok(zeros);
        }
        if zeros.len() > best.len() {
            best = zeros;
        }
    }
    Ok(best)
}

/// A zero near `seed`, bracketed by stepping outward on both sides.
pub fn find_zero_near<F>(mut target: F, seed: f64, max_radius: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = 0.05_f64.min(max_radius);
    let f_seed = target(seed)?;
    if f_seed == 0.0 {
        return Ok(seed);
    }
    let (mut left, mut right) = ((seed, f_seed), (seed, f_seed));
    let mut r = step;
    while r <= max_radius + 1e-12 {
        let fr = target(seed + r)?;
        if sign_differs(right.1, fr) || fr == 0.0 {
            return refine_bracket(&mut target, right.0, seed + r, tol);
        }
        right = (seed + r, fr);
        let fl = target(seed - r)?;
        if sign_differs(left.1, fl) || fl == 0.0 {
            return refine_bracket(&mut target, seed - r, left.0, tol);
        }
        left = (seed - r, fl);
        r += step;
    }
    Err(Error::NotFound {
        found: vec![],
        requested: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{airy_ai, phi4};

    #[test]
    fn polynomial_root() {
        let z = find_zeros(|x| Ok(x * x - 1.0), (0.0, 3.0), 1, 1e-12).unwrap();
        assert_eq!(z.values.len(), 1);
        assert!((z.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_zero_of_phi4() {
        let z = find_zeros(phi4, (0.1, 10.0), 1, 1e-10).unwrap();
        assert!((z.values[0] - 2.44197).abs() < 1e-4, "{:?}", z.values);
    }

    #[test]
    fn negative_axis_scans_from_origin() {
        let z = find_zeros(|x| Ok(airy_ai(x)), (-5.0, 0.0), 2, 1e-12).unwrap();
        assert!((z.values[0] + 2.33811).abs() < 1e-4);
        assert!((z.values[1] + 4.08795).abs() < 1e-4);
        assert!(z.values[0] > z.values[1]);
    }

    #[test]
    fn zeros_straddle_sign_changes() {
        let tol = 1e-9;
        let z = find_zeros(|x| Ok((3.0 * x).sin()), (0.05, 10.0), 9, tol).unwrap();
        for (k, &v) in z.values.iter().enumerate() {
            assert!((v - (k as f64 + 1.0) * std::f64::consts::PI / 3.0).abs() < tol);
            assert!(sign_differs(
                (3.0 * (v - tol)).sin(),
                (3.0 * (v + tol)).sin()
            ));
        }
        for w in z.values.windows(2) {
            assert!(w[1] - w[0] > 10.0 * tol);
        }
    }

    #[test]
    fn close_pair_inside_one_step_is_found() {
        // Roots at 1.02 and 1.05 share a single 0.1-wide scan cell.
        let f = |x: f64| Ok((x - 1.02) * (x - 1.05));
        let z = find_zeros(f, (0.0, 3.0), 2, 1e-12).unwrap();
        assert!((z.values[0] - 1.02).abs() < 1e-10, "{:?}", z.values);
        assert!((z.values[1] - 1.05).abs() < 1e-10, "{:?}", z.values);
    }

    #[test]
    fn too_few_zeros_reports_partial_list() {
        match find_zeros(|x| Ok(x - 0.5), (0.0, 2.0), 3, 1e-12) {
            Err(Error::NotFound { found, requested }) => {
                assert_eq!(requested, 3);
                assert_eq!(found.len(), 1);
                assert!((found[0] - 0.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_near_seed() {
        let z = find_zero_near(|x| Ok(airy_ai(x)), -2.3, 1.0, 1e-13).unwrap();
        assert!((z + 2.338_107_410_459_767).abs() < 1e-12);
    }
}
