use num_rational::Ratio;

use super::Singularity;
use crate::mesh::{Corner, TriMesh};
use crate::Real;

/// Both sides of the Poincare-Hopf identity in exact arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareHopf {
    pub interior: Ratio<i64>,
    pub boundary: Ratio<i64>,
    pub euler_characteristic: i64,
}

impl PoincareHopf {
    pub fn lhs(&self) -> Ratio<i64> {
        self.interior + self.boundary
    }

    pub fn holds(&self) -> bool {
        self.lhs() == Ratio::from_integer(self.euler_characteristic)
    }
}

/// Sums interior singularity indices and corner indices (quarters each) and
/// compares with the Euler characteristic.
pub fn poincare_hopf_check<T: Real>(
    singularities: &[Singularity<T>],
    corners: &[Corner<T>],
    mesh: &TriMesh<T>,
) -> PoincareHopf {
    let interior = singularities.iter().map(|s| Ratio::new(s.rep_degree as i64, 4)).sum();
    let boundary = corners.iter().map(|c| Ratio::new(c.quarters() as i64, 4)).sum();
    PoincareHopf { interior, boundary, euler_characteristic: mesh.euler_characteristic() }
}

/// Index of a sector: `(pi - angle + rotation) / 2 pi`.
pub fn sector_index<T: Real>(angle: T, rotation: T) -> T {
    (T::PI() - angle + rotation) / T::TAU()
}

/// Cross rotation over a sector of the given angle at an interior singularity
/// of representation degree `d`.
pub fn singular_sector_rotation<T: Real>(rep_degree: i32, angle: T) -> T {
    T::from_i32(rep_degree).expect("small integer") * angle / T::lit(4.0)
}

/// Cross rotation over a sector of the given angle at a boundary corner with
/// index `k/4` and interior angle `phi_c`, swept from the outgoing edge.
pub fn boundary_sector_rotation<T: Real>(k: i32, phi_c: T, angle: T) -> T {
    let kf = T::from_i32(k).expect("small integer");
    -(T::PI() - phi_c - T::FRAC_PI_2() * kf) * angle / phi_c
}

/// Sector index of an evenly split degree `d` singularity, in exact arithmetic
/// with all angles in units of pi.
pub fn even_split_sector_index(rep_degree: i64) -> Ratio<i64> {
    let angle = Ratio::new(2, 4 - rep_degree);
    let rotation = Ratio::new(rep_degree, 4) * angle;
    (Ratio::from_integer(1) - angle + rotation) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_corner_sector() {
        let h = std::f64::consts::FRAC_PI_2;
        assert!((sector_index(h, boundary_sector_rotation(1, h, h)) - 0.25).abs() < 1e-12);
        let re = 3.0 * h;
        assert!((sector_index(h, boundary_sector_rotation(-1, re, h)) - 0.25).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn every_even_sector_is_a_quarter(d in -12i64..4) {
            prop_assert_eq!(even_split_sector_index(d), Ratio::new(1, 4));
            let angle = std::f64::consts::TAU / (4 - d) as f64;
            let idx = sector_index(angle, singular_sector_rotation(d as i32, angle));
            prop_assert!((idx - 0.25).abs() < 1e-12);
        }

        #[test]
        fn boundary_sectors_are_quarters(k in -2i32..2, phi in 0.3f64..6.0) {
            let sectors = (2 - k) as f64;
            let angle = phi / sectors;
            let idx = sector_index(angle, boundary_sector_rotation(k, phi, angle));
            prop_assert!((idx - 0.25).abs() < 1e-9, "{}", idx);
        }
    }
}
