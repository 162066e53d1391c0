//! Golden-section search for the extremum of a unimodal scalar function.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `width`.
/// Returns the best point seen (end points included) and its value.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut best = (lo, f(lo));
    let f_hi = f(hi);
    if f_hi > best.1 {
        best = (hi, f_hi);
    }

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any f64 bracket below one ulp
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, width: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (x, neg) = golden_section_max(|x| -f(x), lo, hi, width);
    (x, -neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, fx) = golden_section_max(|x| 3.0 - (x - 0.3).powi(2), -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn minimum_on_boundary() {
        let (x, fx) = golden_section_min(|x| x, 1.0, 2.0, 1e-12);
        assert_eq!(x, 1.0);
        assert_eq!(fx, 1.0);
    }
}
