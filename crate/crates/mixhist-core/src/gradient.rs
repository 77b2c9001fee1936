//! Multi-channel gradient machinery: Sobel partials per channel, the 2x2
//! structure tensor accumulated over the H/S/V channels, and the direction
//! of maximum rate of change at each pixel.
//!
//! For a three-channel image the per-pixel tensor is
//! `[[g_xx, g_xy], [g_xy, g_yy]]` where `g_xx` sums squared x-partials over
//! the channels, `g_yy` the y-partials, and `g_xy` the cross products. The
//! rate of change along direction `theta` is
//! `F(theta) = sqrt(((g_xx + g_yy) + (g_xx - g_yy) cos 2t + 2 g_xy sin 2t) / 2)`
//! and the edge orientation is the `theta` in [0, pi) maximizing it.

use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use crate::image::{HsvImage, Plane};

/// Unnormalized 3x3 Sobel partials `(d/dx, d/dy)` with replicate padding at
/// the borders, so the output planes keep the input dimensions.
///
/// Each output is accumulated as weighted differences,
/// `sum_k w_k * (forward_k - backward_k)` with weights (1, 2, 1), so a
/// locally constant neighborhood yields exactly zero.
pub fn sobel_partials(plane: &Plane) -> Result<(Plane, Plane), GradientError> {
    if plane.width() < 3 || plane.height() < 3 {
        return Err(GradientError::PlaneTooSmall {
            width: plane.width(),
            height: plane.height(),
        });
    }
    Ok(sobel_raw(plane))
}

fn sobel_raw(plane: &Plane) -> (Plane, Plane) {
    let (w, h) = (plane.width(), plane.height());
    let mut dx = Plane::zeroed(w, h);
    let mut dy = Plane::zeroed(w, h);
    let weights = [1.0, 2.0, 1.0];
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as i64, y as i64);
            let mut sx = 0.0;
            let mut sy = 0.0;
            for k in 0..3i64 {
                let t = k - 1;
                sx += weights[k as usize]
                    * (plane.get_clamped(xi + 1, yi + t) - plane.get_clamped(xi - 1, yi + t));
                sy += weights[k as usize]
                    * (plane.get_clamped(xi + t, yi + 1) - plane.get_clamped(xi + t, yi - 1));
            }
            dx.set(x, y, sx);
            dy.set(x, y, sy);
        }
    }
    (dx, dy)
}

/// Per-pixel structure tensor components.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    gxx: Plane,
    gyy: Plane,
    gxy: Plane,
}

impl GradientField {
    pub fn width(&self) -> u32 {
        self.gxx.width()
    }

    pub fn height(&self) -> u32 {
        self.gxx.height()
    }

    pub fn gxx(&self) -> &Plane {
        &self.gxx
    }

    pub fn gyy(&self) -> &Plane {
        &self.gyy
    }

    pub fn gxy(&self) -> &Plane {
        &self.gxy
    }
}

/// Accumulates the tensor from the six per-channel partial planes: squared
/// x-partials into `g_xx`, squared y-partials into `g_yy`, cross products
/// into `g_xy`, summed over H, S, V in that order.
pub fn structure_tensor(
    dh_x: &Plane,
    dh_y: &Plane,
    ds_x: &Plane,
    ds_y: &Plane,
    dv_x: &Plane,
    dv_y: &Plane,
) -> Result<GradientField, GradientError> {
    let (w, h) = (dh_x.width(), dh_x.height());
    for plane in [dh_y, ds_x, ds_y, dv_x, dv_y] {
        if plane.width() != w || plane.height() != h {
            return Err(GradientError::DimensionMismatch);
        }
    }
    let mut gxx = Plane::zeroed(w, h);
    let mut gyy = Plane::zeroed(w, h);
    let mut gxy = Plane::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            let hx = dh_x.get(x, y);
            let hy = dh_y.get(x, y);
            let sx = ds_x.get(x, y);
            let sy = ds_y.get(x, y);
            let vx = dv_x.get(x, y);
            let vy = dv_y.get(x, y);
            gxx.set(x, y, hx * hx + sx * sx + vx * vx);
            gyy.set(x, y, hy * hy + sy * sy + vy * vy);
            gxy.set(x, y, hx * hy + sx * sy + vx * vy);
        }
    }
    Ok(GradientField { gxx, gyy, gxy })
}

/// Rate of change of the multi-channel image along direction `theta`.
///
/// The radicand is clamped at zero: at the minimizing direction it can
/// drift slightly negative in floating point when the tensor is singular.
pub fn rate_of_change(gxx: f64, gyy: f64, gxy: f64, theta: f64) -> f64 {
    let two_theta = 2.0 * theta;
    let radicand =
        0.5 * ((gxx + gyy) + (gxx - gyy) * libm::cos(two_theta) + 2.0 * gxy * libm::sin(two_theta));
    if radicand > 0.0 {
        libm::sqrt(radicand)
    } else {
        0.0
    }
}

/// Direction of maximum rate of change, in [0, pi).
///
/// The stationary angle is `0.5 * atan2(2 g_xy, g_xx - g_yy)`; that angle
/// and its orthogonal complement are evaluated through [`rate_of_change`]
/// and the maximizer wins. Isotropic pixels, where both candidates tie
/// (including the zero tensor), resolve to 0 so that every pixel carries an
/// orientation.
pub fn edge_orientation(gxx: f64, gyy: f64, gxy: f64) -> Result<f64, GradientError> {
    if !(gxx >= 0.0) || !(gyy >= 0.0) || !gxy.is_finite() {
        return Err(GradientError::InvalidTensor { gxx, gyy, gxy });
    }
    Ok(orientation_unchecked(gxx, gyy, gxy))
}

pub(crate) fn orientation_unchecked(gxx: f64, gyy: f64, gxy: f64) -> f64 {
    let theta = 0.5 * libm::atan2(2.0 * gxy, gxx - gyy);
    let f_here = rate_of_change(gxx, gyy, gxy, theta);
    let f_ortho = rate_of_change(gxx, gyy, gxy, theta + FRAC_PI_2);
    if f_here == f_ortho {
        return 0.0;
    }
    let best = if f_here > f_ortho { theta } else { theta + FRAC_PI_2 };
    normalize_half_turn(best)
}

/// Folds an angle into [0, pi). The candidates above lie in (-pi/2, pi], so
/// one correction suffices.
fn normalize_half_turn(theta: f64) -> f64 {
    if theta < 0.0 {
        theta + PI
    } else if theta >= PI {
        theta - PI
    } else {
        theta
    }
}

/// Orientation of maximum rate of change for every pixel of a tensor field.
pub fn orientation_field(field: &GradientField) -> Plane {
    let (w, h) = (field.width(), field.height());
    let mut theta = Plane::zeroed(w, h);
    for y in 0..h {
        for x in 0..w {
            theta.set(
                x,
                y,
                orientation_unchecked(field.gxx.get(x, y), field.gyy.get(x, y), field.gxy.get(x, y)),
            );
        }
    }
    theta
}

/// Full gradient stage for an HSV image: per-channel Sobel partials feeding
/// the structure tensor.
pub fn hsv_gradient(hsv: &HsvImage) -> GradientField {
    let (hx, hy) = sobel_raw(hsv.h());
    let (sx, sy) = sobel_raw(hsv.s());
    let (vx, vy) = sobel_raw(hsv.v());
    structure_tensor(&hx, &hy, &sx, &sy, &vx, &vy)
        .expect("partials of one image share its dimensions")
}

#[derive(Debug, Clone, PartialEq)]
pub enum GradientError {
    PlaneTooSmall { width: u32, height: u32 },
    DimensionMismatch,
    InvalidTensor { gxx: f64, gyy: f64, gxy: f64 },
}

impl fmt::Display for GradientError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradientError::PlaneTooSmall { width, height } => {
                write!(f, "plane is {width}x{height}; the Sobel stencil needs at least 3x3")
            }
            GradientError::DimensionMismatch => write!(f, "partial planes differ in dimensions"),
            GradientError::InvalidTensor { gxx, gyy, gxy } => {
                write!(f, "invalid tensor (gxx={gxx}, gyy={gyy}, gxy={gxy}): diagonal must be nonnegative and finite")
            }
        }
    }
}

impl core::error::Error for GradientError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_4, SQRT_2};

    fn constant_plane(w: u32, h: u32, value: f64) -> Plane {
        Plane::from_vec(w, h, vec![value; w as usize * h as usize]).unwrap()
    }

    #[test]
    fn constant_plane_has_zero_partials() {
        let plane = constant_plane(5, 4, 0.7);
        let (dx, dy) = sobel_partials(&plane).unwrap();
        assert!(dx.values().iter().all(|&v| v == 0.0));
        assert!(dy.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_step_gives_dx_four() {
        // Left half 0, right half 1; hand-convolving the 3x3 kernel across
        // the step gives (1 + 2 + 1) * 1 = 4 on both step-adjacent columns.
        let mut plane = Plane::zeroed(6, 5);
        for y in 0..5 {
            for x in 3..6 {
                plane.set(x, y, 1.0);
            }
        }
        let (dx, dy) = sobel_partials(&plane).unwrap();
        assert_eq!(dx.get(2, 2), 4.0);
        assert_eq!(dx.get(3, 2), 4.0);
        assert_eq!(dy.get(2, 2), 0.0);
        assert_eq!(dx.get(0, 2), 0.0);
    }

    #[test]
    fn horizontal_step_gives_dy_four() {
        let mut plane = Plane::zeroed(5, 6);
        for y in 3..6 {
            for x in 0..5 {
                plane.set(x, y, 1.0);
            }
        }
        let (dx, dy) = sobel_partials(&plane).unwrap();
        assert_eq!(dy.get(2, 2), 4.0);
        assert_eq!(dy.get(2, 3), 4.0);
        assert_eq!(dx.get(2, 2), 0.0);
    }

    #[test]
    fn too_small_plane_rejected() {
        let plane = constant_plane(2, 5, 0.0);
        assert!(matches!(
            sobel_partials(&plane),
            Err(GradientError::PlaneTooSmall { .. })
        ));
    }

    #[test]
    fn tensor_from_single_channel_partial() {
        // Only dV/dx = 4: gxx = 16, rest 0.
        let zero = constant_plane(3, 3, 0.0);
        let vx = constant_plane(3, 3, 4.0);
        let field = structure_tensor(&zero, &zero, &zero, &zero, &vx, &zero).unwrap();
        assert_eq!(field.gxx().get(1, 1), 16.0);
        assert_eq!(field.gyy().get(1, 1), 0.0);
        assert_eq!(field.gxy().get(1, 1), 0.0);
    }

    #[test]
    fn tensor_saturates_cauchy_schwarz_on_single_direction() {
        // dH/dx = dH/dy = 1 gives (1, 1, 1), where gxy^2 == gxx * gyy.
        let one = constant_plane(3, 3, 1.0);
        let zero = constant_plane(3, 3, 0.0);
        let field = structure_tensor(&one, &one, &zero, &zero, &zero, &zero).unwrap();
        assert_eq!(field.gxx().get(0, 0), 1.0);
        assert_eq!(field.gyy().get(0, 0), 1.0);
        assert_eq!(field.gxy().get(0, 0), 1.0);
    }

    #[test]
    fn tensor_dimension_mismatch_rejected() {
        let a = constant_plane(3, 3, 0.0);
        let b = constant_plane(4, 3, 0.0);
        assert_eq!(
            structure_tensor(&a, &a, &a, &a, &a, &b),
            Err(GradientError::DimensionMismatch)
        );
    }

    #[test]
    fn isotropic_tensor_resolves_to_zero() {
        assert_eq!(edge_orientation(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(edge_orientation(3.0, 3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pure_x_gradient_points_at_zero() {
        let theta = edge_orientation(16.0, 0.0, 0.0).unwrap();
        assert_eq!(theta, 0.0);
        assert_eq!(rate_of_change(16.0, 0.0, 0.0, theta), 4.0);
        assert_eq!(rate_of_change(16.0, 0.0, 0.0, FRAC_PI_2), 0.0);
    }

    #[test]
    fn pure_y_gradient_points_at_half_pi() {
        let theta = edge_orientation(0.0, 16.0, 0.0).unwrap();
        assert_eq!(theta, FRAC_PI_2);
        assert_eq!(rate_of_change(0.0, 16.0, 0.0, theta), 4.0);
    }

    #[test]
    fn diagonal_gradient_points_at_quarter_pi() {
        let theta = edge_orientation(1.0, 1.0, 1.0).unwrap();
        assert_eq!(theta, FRAC_PI_4);
        assert_eq!(rate_of_change(1.0, 1.0, 1.0, theta), SQRT_2);
        assert!(rate_of_change(1.0, 1.0, 1.0, theta + FRAC_PI_2) < 1e-7);
    }

    #[test]
    fn negative_diagonal_rejected() {
        assert!(edge_orientation(-1.0, 0.0, 0.0).is_err());
        assert!(edge_orientation(0.0, -1.0, 0.0).is_err());
        assert!(edge_orientation(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn orientation_always_in_half_turn() {
        let mut rng = crate::rng::SplitMix64::new(3);
        for _ in 0..2000 {
            let ax = rng.next_f64() * 2.0 - 1.0;
            let ay = rng.next_f64() * 2.0 - 1.0;
            let bx = rng.next_f64() * 2.0 - 1.0;
            let by = rng.next_f64() * 2.0 - 1.0;
            let gxx = ax * ax + bx * bx;
            let gyy = ay * ay + by * by;
            let gxy = ax * ay + bx * by;
            let theta = edge_orientation(gxx, gyy, gxy).unwrap();
            assert!((0.0..PI).contains(&theta), "theta = {theta}");
        }
    }

    #[test]
    fn trace_identity_holds() {
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..2000 {
            let ax = rng.next_f64() * 8.0 - 4.0;
            let ay = rng.next_f64() * 8.0 - 4.0;
            let bx = rng.next_f64() * 8.0 - 4.0;
            let by = rng.next_f64() * 8.0 - 4.0;
            let gxx = ax * ax + bx * bx;
            let gyy = ay * ay + by * by;
            let gxy = ax * ay + bx * by;
            let theta = edge_orientation(gxx, gyy, gxy).unwrap();
            let f1 = rate_of_change(gxx, gyy, gxy, theta);
            let f2 = rate_of_change(gxx, gyy, gxy, theta + FRAC_PI_2);
            assert!((f1 * f1 + f2 * f2 - (gxx + gyy)).abs() < 1e-9);
        }
    }
}
