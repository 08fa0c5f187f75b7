use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hyperbolic::{elliptic_data, parabolic_data, Horoball, Isometry2, IsometryKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Loxodromic,
    Parabolic,
    Elliptic,
}

impl ClassKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Loxodromic => "loxodromic",
            ClassKind::Parabolic => "parabolic",
            ClassKind::Elliptic => "elliptic",
        }
    }
}

/// Everything the displacement laws and the counting constants need to know
/// about a conjugacy class.
///
/// `length` is the translation length (loxodromic) or the horospherical
/// length for the stored horoball (parabolic), and 0 for elliptic classes.
/// `angle` is the holonomy (loxodromic, in (-π, π]) or the rotation angle
/// (elliptic, in (0, π]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjClassInvariants {
    pub kind: ClassKind,
    pub length: f64,
    pub angle: f64,
    /// 2 when some group element swaps the fixed points (reciprocal class).
    pub reciprocity: u32,
    /// Index `i_K`, default 1.
    pub index: u32,
    /// Power of the primitive element, `m_{γ0}`.
    pub power: u32,
    /// Order of the pointwise stabiliser of the axis, `n_{γ0}`.
    pub axis_fixer: u32,
    /// Order of the stabiliser of an elliptic fixed point.
    pub stabilizer_order: u32,
    /// Normalising horoball of a parabolic class.
    pub horoball: Option<Horoball>,
    /// Volume of the cusp cross-section `Γ_C \ C` for parabolic classes.
    pub cusp_volume: Option<f64>,
}

impl ConjClassInvariants {
    fn base(kind: ClassKind, length: f64, angle: f64) -> Self {
        Self {
            kind,
            length,
            angle,
            reciprocity: 1,
            index: 1,
            power: 1,
            axis_fixer: 1,
            stabilizer_order: 1,
            horoball: None,
            cusp_volume: None,
        }
    }

    pub fn loxodromic(length: f64, angle: f64) -> Result<Self> {
        let inv = Self::base(ClassKind::Loxodromic, length, angle);
        inv.validate()?;
        Ok(inv)
    }

    pub fn parabolic(length: f64) -> Result<Self> {
        let inv = Self::base(ClassKind::Parabolic, length, 0.0);
        inv.validate()?;
        Ok(inv)
    }

    pub fn elliptic(angle: f64) -> Result<Self> {
        let inv = Self::base(ClassKind::Elliptic, 0.0, angle);
        inv.validate()?;
        Ok(inv)
    }

    /// Reads the invariants off a planar isometry. Parabolic elements need the
    /// horoball fixing the normalisation of `ψ`; `primitive_translation` is the
    /// translation of the primitive parabolic of the cusp in the horoball frame,
    /// used for the cusp volume.
    pub fn from_isometry(
        g: &Isometry2,
        horoball: Option<Horoball>,
        primitive_translation: Option<f64>,
    ) -> Result<Self> {
        match g.classify().kind {
            IsometryKind::Identity => Err(Error::IdentityClass("the identity has no displacement law".into())),
            IsometryKind::Loxodromic { length, .. } => Self::loxodromic(length, 0.0),
            IsometryKind::Elliptic { .. } => {
                let (_, angle) = elliptic_data(g)?;
                Self::elliptic(angle)
            }
            IsometryKind::Parabolic => {
                let Some(h) = horoball else {
                    return domain("a parabolic class needs a horoball normalisation");
                };
                let data = parabolic_data(g, h)?;
                let mut inv = Self::parabolic(data.length)?;
                inv.horoball = Some(data.horoball);
                let prim = primitive_translation.unwrap_or(data.translation);
                inv.cusp_volume = Some(prim / data.horoball.cusp_height());
                Ok(inv)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_length = self.length > 0.0 && self.length.is_finite();
        match self.kind {
            ClassKind::Loxodromic if !ok_length => {
                return domain(format!("loxodromic length must be positive, got {}", self.length))
            }
            ClassKind::Loxodromic if !(self.angle.abs() <= std::f64::consts::PI) => {
                return domain(format!("holonomy must lie in [-π, π], got {}", self.angle))
            }
            ClassKind::Parabolic if !ok_length => {
                return domain(format!("horospherical length must be positive, got {}", self.length))
            }
            ClassKind::Elliptic if !(self.angle > 0.0 && self.angle <= std::f64::consts::PI) => {
                return domain(format!("rotation angle must lie in (0, π], got {}", self.angle))
            }
            _ => {}
        }
        if !(self.reciprocity == 1 || self.reciprocity == 2) {
            return domain(format!("reciprocity flag must be 1 or 2, got {}", self.reciprocity));
        }
        if self.index == 0 || self.power == 0 || self.axis_fixer == 0 || self.stabilizer_order == 0 {
            return domain("index, power and stabiliser orders must be positive");
        }
        Ok(())
    }

    /// `λ = ℓ + iθ`.
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.length, self.angle)
    }

    pub fn tau(&self) -> f64 {
        match self.kind {
            ClassKind::Loxodromic => ((self.length.cosh() - self.angle.cos()) / 2.0).sqrt(),
            ClassKind::Parabolic => 2.0 * (self.length / 2.0).sinh(),
            ClassKind::Elliptic => (self.angle / 2.0).sin(),
        }
    }

    /// Smallest displacement achieved by an element of the class.
    pub fn min_displacement(&self) -> f64 {
        match self.kind {
            ClassKind::Loxodromic | ClassKind::Parabolic => self.length,
            ClassKind::Elliptic => 0.0,
        }
    }

    pub fn isometry_kind(&self) -> IsometryKind {
        match self.kind {
            ClassKind::Loxodromic => IsometryKind::Loxodromic { length: self.length, angle: self.angle },
            ClassKind::Parabolic => IsometryKind::Parabolic,
            ClassKind::Elliptic => IsometryKind::Elliptic { angle: self.angle },
        }
    }
}
