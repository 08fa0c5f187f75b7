//! Closed-form displacement laws `d(x, γx)` as functions of the distance
//! `s` from `x` to the convex set attached to `γ`, their two-sided bounds,
//! and the inverse maps `ψ` with `d(x, C) = ψ(d(x, γx))`.

mod invariants;
pub mod oracle;

pub use invariants::{ClassKind, ConjClassInvariants};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Slack allowed when a threshold sits exactly at the class minimum.
const MIN_SLACK: f64 = 1e-12;

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("distance s must be finite and >= 0, got {s}"));
    }
    Ok(())
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return domain(format!("translation length must be positive, got {length}"));
    }
    Ok(())
}

/// `|e^λ - 1|² / (4 e^ℓ)`, the coefficient of `sinh² s` in the loxodromic law.
fn off_axis_coefficient(lambda: Complex64) -> f64 {
    (lambda.exp() - 1.0).norm_sqr() / (4.0 * lambda.re.exp())
}

/// Displacement of a point at distance `s` from the axis of a loxodromic
/// isometry with complex translation length `λ = ℓ + iθ`:
/// `sinh²(d/2) = sinh² s |e^λ - 1|² / (4 e^ℓ) + sinh²(ℓ/2)`.
pub fn disp_loxo(s: f64, lambda: Complex64) -> Result<f64> {
    check_s(s)?;
    check_length(lambda.re)?;
    let sh = s.sinh();
    let half = (lambda.re / 2.0).sinh();
    let rhs = sh * sh * off_axis_coefficient(lambda) + half * half;
    Ok(2.0 * rhs.sqrt().asinh())
}

/// `(2 argsinh(cosh s sinh(ℓ/2)), 2s + ℓ)`.
pub fn disp_loxo_bounds(s: f64, length: f64) -> Result<(f64, f64)> {
    check_s(s)?;
    check_length(length)?;
    let lower = 2.0 * (s.cosh() * (length / 2.0).sinh()).asinh();
    Ok((lower, 2.0 * s + length))
}

/// Limit of `upper - lower` in [`disp_loxo_bounds`] as `s → ∞`: `ℓ - 2 log sinh(ℓ/2)`.
pub fn loxo_bounds_gap_limit(length: f64) -> f64 {
    length - 2.0 * (length / 2.0).sinh().ln()
}

/// Parabolic law `2 argsinh(e^s sinh(ℓ/2))` with `s >= 0` the distance to the horoball.
pub fn disp_para(s: f64, length: f64) -> Result<f64> {
    check_s(s)?;
    disp_para_signed(s, length)
}

/// The parabolic law for a signed horoball distance (negative inside), where
/// it still holds exactly in H².
pub fn disp_para_signed(s: f64, length: f64) -> Result<f64> {
    check_length(length)?;
    if !s.is_finite() {
        return domain("signed horoball distance must be finite");
    }
    Ok(2.0 * (s.exp() * (length / 2.0).sinh()).asinh())
}

/// `(2 argsinh(e^s sinh(ℓ/2)), 2s + d(p, γp))` where `p` is the closest point
/// of the horoball.
pub fn disp_para_bounds(s: f64, length: f64, boundary_displacement: f64) -> Result<(f64, f64)> {
    let lower = disp_para(s, length)?;
    Ok((lower, 2.0 * s + boundary_displacement))
}

/// Elliptic law `2 argsinh(sinh s · sin(θ/2))`, `θ ∈ (0, π]`.
pub fn disp_ell(s: f64, angle: f64) -> Result<f64> {
    check_s(s)?;
    check_angle(angle)?;
    Ok(2.0 * (s.sinh() * (angle / 2.0).sin()).asinh())
}

fn check_angle(angle: f64) -> Result<()> {
    if !(angle > 0.0 && angle <= std::f64::consts::PI) {
        return domain(format!("rotation angle must lie in (0, π], got {angle}"));
    }
    Ok(())
}

/// Displacement at distance `s` for a class, dispatching on its kind.
pub fn displacement(inv: &ConjClassInvariants, s: f64) -> Result<f64> {
    match inv.kind {
        ClassKind::Loxodromic => disp_loxo(s, inv.lambda()),
        ClassKind::Parabolic => disp_para(s, inv.length),
        ClassKind::Elliptic => disp_ell(s, inv.angle),
    }
}

fn check_t(inv: &ConjClassInvariants, t: f64) -> Result<f64> {
    let minimum = inv.min_displacement();
    if !t.is_finite() || t < minimum - MIN_SLACK * (1.0 + minimum) {
        return Err(Error::BelowMinimum { t, minimum });
    }
    Ok(t.max(minimum))
}

/// Exact inverse of the displacement law: the distance to `C` of a point
/// displaced by `t`. Parabolic values are clamped at 0 (inside the horoball).
pub fn psi_exact(inv: &ConjClassInvariants, t: f64) -> Result<f64> {
    inv.validate()?;
    let t = check_t(inv, t)?;
    let target = (t / 2.0).sinh();
    Ok(match inv.kind {
        ClassKind::Loxodromic => {
            let half = (inv.length / 2.0).sinh();
            let diff = (target - half) * (target + half);
            (diff.max(0.0) / off_axis_coefficient(inv.lambda())).sqrt().asinh()
        }
        ClassKind::Parabolic => psi_parabolic_signed(t, inv.length).max(0.0),
        ClassKind::Elliptic => (target / (inv.angle / 2.0).sin()).asinh(),
    })
}

/// Unclamped parabolic inverse `log(sinh(t/2) / sinh(ℓ/2))`, defined for all
/// `t > 0`; pairs with signed horoball distances.
pub fn psi_parabolic_signed(t: f64, length: f64) -> f64 {
    ((t / 2.0).sinh() / (length / 2.0).sinh()).ln()
}

/// Large-`t` expansion `t/2 - log τ` of the inverse.
pub fn psi_asymptotic(inv: &ConjClassInvariants, t: f64) -> Result<f64> {
    inv.validate()?;
    if !t.is_finite() {
        return domain("t must be finite");
    }
    Ok(match inv.kind {
        ClassKind::Loxodromic => 0.5 * (t - ((inv.length.cosh() - inv.angle.cos()) / 2.0).ln()),
        ClassKind::Parabolic => t / 2.0 - (inv.length / 2.0).sinh().ln() - 2f64.ln(),
        ClassKind::Elliptic => t / 2.0 - (inv.angle / 2.0).sin().ln(),
    })
}
