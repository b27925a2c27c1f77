use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;

use crate::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Self::new(T::lit(x), T::lit(y))
    }

    /// Unit vector at angle `theta`.
    pub fn polar(theta: T) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n)
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.x.as_f64(), self.y.as_f64()]
    }
}

impl<T: Real> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> AddAssign for Point2<T> {
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<T: Real> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl<T: Real> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

/// Principal value of an angle in `(-pi, pi]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::TAU();
    let mut r = a - two_pi * (a / two_pi).round();
    if r <= -T::PI() {
        r += two_pi;
    }
    if r > T::PI() {
        r -= two_pi;
    }
    r
}

/// Angle mapped into `[0, 2pi)`.
pub fn wrap_positive<T: Real>(a: T) -> T {
    let two_pi = T::TAU();
    let mut r = a - two_pi * (a / two_pi).floor();
    if r >= two_pi {
        r -= two_pi;
    }
    if r < T::zero() {
        r = T::zero();
    }
    r
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn polygon_area<T: Real>(pts: &[Point2<T>]) -> T {
    let n = pts.len();
    let mut s = T::zero();
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    s * T::lit(0.5)
}

/// Even-odd point in polygon test.
pub fn point_in_polygon<T: Real>(p: Point2<T>, poly: &[Point2<T>]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to segment `ab` and the segment parameter of the foot.
pub fn segment_distance<T: Real>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> (T, T) {
    let d = b - a;
    let len2 = d.dot(d);
    let t = if len2 > T::zero() {
        ((p - a).dot(d) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    ((a + d * t).dist(p), t)
}

/// Proper or touching intersection of segments `p0p1` and `q0q1`.
/// Returns the parameters along each segment.
pub fn segment_intersection<T: Real>(
    p0: Point2<T>,
    p1: Point2<T>,
    q0: Point2<T>,
    q1: Point2<T>,
) -> Option<(T, T)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let scale = r.norm() * s.norm();
    if denom.abs() <= T::lit(1e-12) * scale || scale == T::zero() {
        return None;
    }
    let qp = q0 - p0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let eps = T::lit(1e-12);
    if t >= -eps && t <= T::one() + eps && u >= -eps && u <= T::one() + eps {
        Some((t.max(T::zero()).min(T::one()), u.max(T::zero()).min(T::one())))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps() {
        let pi = std::f64::consts::PI;
        assert!((wrap_angle(3.0 * pi) - pi).abs() < 1e-12);
        assert!((wrap_angle(-pi) - pi).abs() < 1e-12);
        assert!((wrap_positive(-0.5f64) - (2.0 * pi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn crossing_segments() {
        let p = |x, y| Point2::<f64>::new(x, y);
        let (t, u) = segment_intersection(p(0., 0.), p(2., 0.), p(1., -1.), p(1., 1.)).unwrap();
        assert!((t - 0.5).abs() < 1e-12 && (u - 0.5).abs() < 1e-12);
        assert!(segment_intersection(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.)).is_none());
    }

    #[test]
    fn polygon_helpers() {
        let sq: Vec<Point2<f64>> = [(0., 0.), (1., 0.), (1., 1.), (0., 1.)]
            .iter()
            .map(|&(x, y)| Point2::new(x, y))
            .collect();
        assert!((polygon_area(&sq) - 1.0).abs() < 1e-12);
        assert!(point_in_polygon(Point2::new(0.5, 0.5), &sq));
        assert!(!point_in_polygon(Point2::new(1.5, 0.5), &sq));
    }
}
