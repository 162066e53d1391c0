//! Grid certificates that each closed-form generating function is convex,
//! checked against a double-double finite difference.

use meanforge::convexity::certify_convexity;
use meanforge::generating::DifferenceKind;
use meanforge::grid::GridSpec;

fn main() -> meanforge::Result<()> {
    let grid = GridSpec::default();
    println!(
        "grid [{:e}, {:e}], {} points",
        grid.x_min, grid.x_max, grid.points
    );
    for kind in DifferenceKind::CLOSED_FORM {
        let cert = certify_convexity(kind, &grid)?;
        println!(
            "{:<5} min f'' {:.3e} at x={:.3e}  fd mismatch {:.1e}  {}",
            kind.to_string(),
            cert.min_f2,
            cert.min_f2_at,
            cert.max_fd_mismatch,
            if cert.passed { "pass" } else { "FAIL" }
        );
    }
    // a one-point grid cannot certify anything
    assert!(certify_convexity(DifferenceKind::AG, &GridSpec { points: 1, ..grid }).is_err());
    Ok(())
}
