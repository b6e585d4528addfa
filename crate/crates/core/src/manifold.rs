//! Array manifold: pure maps from physical parameters (direction,
//! polarization, geometry) to steering vectors and joint manifold
//! vectors/matrices of the tripole ULA.
//!
//! Conventions used throughout the crate:
//! - angles cross every public boundary in degrees and are converted to
//!   radians exactly once, here;
//! - the inter-sensor phase constant is `tau = 2*pi*(d/lambda)`;
//! - a tripole sensor contributes three rows, so all joint quantities have
//!   `3N` rows with sensor-major blocks.

use nalgebra::{DMatrix, DVector, Matrix3x2, Vector2, Vector3};
use num_complex::Complex64;

use crate::{Error, Result};

/// Elevation/azimuth direction of arrival, in degrees.
///
/// The linear array cannot disambiguate the full sphere, so directions are
/// restricted to `theta in [0, 90]`, `phi in [0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dir {
    theta_deg: f64,
    phi_deg: f64,
}

impl Dir {
    pub fn new(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        if !theta_deg.is_finite() || !(0.0..=90.0).contains(&theta_deg) {
            return Err(Error::Domain(format!(
                "elevation theta = {theta_deg} deg outside [0, 90]"
            )));
        }
        if !phi_deg.is_finite() || !(0.0..180.0).contains(&phi_deg) {
            return Err(Error::Domain(format!(
                "azimuth phi = {phi_deg} deg outside [0, 180)"
            )));
        }
        Ok(Self { theta_deg, phi_deg })
    }

    /// Construct without range validation. Used internally where values come
    /// from an already-validated grid or from boundary-crossing finite
    /// differences that remain mathematically well defined.
    pub(crate) fn new_unchecked(theta_deg: f64, phi_deg: f64) -> Self {
        Self { theta_deg, phi_deg }
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }

    pub(crate) fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    pub(crate) fn phi_rad(&self) -> f64 {
        self.phi_deg.to_radians()
    }

    /// Euclidean separation from `other` in the (theta, phi) degree plane.
    pub fn separation_deg(&self, other: &Dir) -> f64 {
        (self.theta_deg - other.theta_deg).hypot(self.phi_deg - other.phi_deg)
    }
}

impl std::fmt::Display for Dir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.4} deg, {:.4} deg)", self.theta_deg, self.phi_deg)
    }
}

/// Polarization state: auxiliary angle `gamma in [0, 90]` and phase
/// difference `eta in (-180, 180]`, both in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pol {
    gamma_deg: f64,
    eta_deg: f64,
}

impl Pol {
    pub fn new(gamma_deg: f64, eta_deg: f64) -> Result<Self> {
        if !gamma_deg.is_finite() || !(0.0..=90.0).contains(&gamma_deg) {
            return Err(Error::Domain(format!(
                "polarization gamma = {gamma_deg} deg outside [0, 90]"
            )));
        }
        if !eta_deg.is_finite() || eta_deg <= -180.0 || eta_deg > 180.0 {
            return Err(Error::Domain(format!(
                "polarization eta = {eta_deg} deg outside (-180, 180]"
            )));
        }
        Ok(Self { gamma_deg, eta_deg })
    }

    pub fn gamma_deg(&self) -> f64 {
        self.gamma_deg
    }

    pub fn eta_deg(&self) -> f64 {
        self.eta_deg
    }

    pub(crate) fn gamma_rad(&self) -> f64 {
        self.gamma_deg.to_radians()
    }

    pub(crate) fn eta_rad(&self) -> f64 {
        self.eta_deg.to_radians()
    }

    /// True for exactly linear polarization (`gamma` at 0 or 90, or `eta` at
    /// 0 or 180), which is the degenerate case behind the classic steering
    /// ambiguity of vector-sensor subspace methods.
    pub fn is_linear(&self) -> bool {
        self.gamma_deg == 0.0
            || self.gamma_deg == 90.0
            || self.eta_deg == 0.0
            || self.eta_deg == 180.0
    }
}

impl std::fmt::Display for Pol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:.4} deg, {:.4} deg)", self.gamma_deg, self.eta_deg)
    }
}

/// Uniform linear tripole array: sensor count and normalized spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_sensors: usize,
    spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(num_sensors: usize, spacing_wavelengths: f64) -> Result<Self> {
        if num_sensors < 2 {
            return Err(Error::Config(format!(
                "array needs at least 2 sensors, got {num_sensors}"
            )));
        }
        if !spacing_wavelengths.is_finite() || spacing_wavelengths <= 0.0 {
            return Err(Error::Config(format!(
                "inter-sensor spacing must be positive, got {spacing_wavelengths} wavelengths"
            )));
        }
        Ok(Self {
            num_sensors,
            spacing_wavelengths,
        })
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }

    /// Phase shift constant between adjacent sensors: `2*pi*(d/lambda)`.
    pub fn phase_constant(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.spacing_wavelengths
    }

    /// Dimension of the joint array output (three dipoles per sensor).
    pub fn output_dim(&self) -> usize {
        3 * self.num_sensors
    }
}

/// Unit polarization vector `g = [sin(gamma) e^{j eta}, cos(gamma)]^T`.
pub fn polarization_vector(pol: &Pol) -> Vector2<Complex64> {
    let (sg, cg) = pol.gamma_rad().sin_cos();
    Vector2::new(Complex64::from_polar(sg, pol.eta_rad()), Complex64::new(cg, 0.0))
}

/// Real 3x2 angular matrix with orthonormal columns spanning the tripole
/// response plane of a direction.
pub fn angular_matrix(dir: &Dir) -> Matrix3x2<f64> {
    let (st, ct) = dir.theta_rad().sin_cos();
    let (sp, cp) = dir.phi_rad().sin_cos();
    #[rustfmt::skip]
    let omega = Matrix3x2::new(
        ct * cp, -sp,
        ct * sp,  cp,
        -st,      0.0,
    );
    omega
}

/// Angular-polarization response of one tripole sensor: `p = Omega * g`,
/// always unit norm.
pub fn angular_polarization_vector(dir: &Dir, pol: &Pol) -> Vector3<Complex64> {
    let omega = angular_matrix(dir);
    let g = polarization_vector(pol);
    Vector3::new(
        g[0].scale(omega[(0, 0)]) + g[1].scale(omega[(0, 1)]),
        g[0].scale(omega[(1, 0)]) + g[1].scale(omega[(1, 1)]),
        g[0].scale(omega[(2, 0)]) + g[1].scale(omega[(2, 1)]),
    )
}

/// Spatial steering vector of the ULA: `a[n] = e^{-j n tau sin(theta)}`.
/// Depends on elevation only.
pub fn steering_vector(dir: &Dir, geom: &ArrayGeometry) -> DVector<Complex64> {
    let phase_step = -geom.phase_constant() * dir.theta_rad().sin();
    DVector::from_fn(geom.num_sensors(), |n, _| {
        Complex64::from_polar(1.0, phase_step * n as f64)
    })
}

/// Joint direction-polarization steering vector `q = a kron p` (length 3N,
/// norm `sqrt(N)`).
pub fn joint_steering_vector(dir: &Dir, pol: &Pol, geom: &ArrayGeometry) -> DVector<Complex64> {
    let a = steering_vector(dir, geom);
    let p = angular_polarization_vector(dir, pol);
    let mut q = DVector::zeros(geom.output_dim());
    for (n, an) in a.iter().enumerate() {
        for i in 0..3 {
            q[3 * n + i] = an * p[i];
        }
    }
    q
}

/// Direction-only manifold matrix `B = a kron Omega` (3N x 2). Its columns
/// span every joint steering vector from that direction; the joint vector for
/// polarization `g` is `B * g`.
pub fn direction_matrix(dir: &Dir, geom: &ArrayGeometry) -> DMatrix<Complex64> {
    let a = steering_vector(dir, geom);
    let omega = angular_matrix(dir);
    let mut b = DMatrix::zeros(geom.output_dim(), 2);
    for (n, an) in a.iter().enumerate() {
        for i in 0..3 {
            for j in 0..2 {
                b[(3 * n + i, j)] = an.scale(omega[(i, j)]);
            }
        }
    }
    b
}

/// Tolerance below which two unit polarization vectors are considered
/// parallel (their 2x2 determinant vanishes).
const PARALLEL_POL_TOL: f64 = 1e-12;

/// Joint steering matrix of a DST source: `Q = [q_a q_b]` for two
/// polarizations sharing one direction. Rejects parallel polarization
/// vectors, for which the source loses its rank-2 signature.
pub fn joint_steering_matrix(
    dir: &Dir,
    pol_a: &Pol,
    pol_b: &Pol,
    geom: &ArrayGeometry,
) -> Result<DMatrix<Complex64>> {
    let ga = polarization_vector(pol_a);
    let gb = polarization_vector(pol_b);
    let det = ga[0] * gb[1] - ga[1] * gb[0];
    if det.norm() < PARALLEL_POL_TOL {
        return Err(Error::DegenerateDst(format!(
            "polarization vectors of {pol_a} and {pol_b} are parallel"
        )));
    }
    let qa = joint_steering_vector(dir, pol_a, geom);
    let qb = joint_steering_vector(dir, pol_b, geom);
    let mut q = DMatrix::zeros(geom.output_dim(), 2);
    q.column_mut(0).copy_from(&qa);
    q.column_mut(1).copy_from(&qb);
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn geom5() -> ArrayGeometry {
        ArrayGeometry::new(5, 0.5).unwrap()
    }

    #[test]
    fn dir_domain() {
        assert!(Dir::new(0.0, 0.0).is_ok());
        assert!(Dir::new(90.0, 179.999).is_ok());
        assert!(Dir::new(-0.1, 0.0).is_err());
        assert!(Dir::new(90.1, 0.0).is_err());
        assert!(Dir::new(10.0, 180.0).is_err());
        assert!(Dir::new(10.0, -1.0).is_err());
        assert!(Dir::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn pol_domain() {
        assert!(Pol::new(0.0, 180.0).is_ok());
        assert!(Pol::new(90.0, -179.999).is_ok());
        assert!(Pol::new(-1.0, 0.0).is_err());
        assert!(Pol::new(91.0, 0.0).is_err());
        assert!(Pol::new(45.0, -180.0).is_err());
        assert!(Pol::new(45.0, 180.001).is_err());
    }

    #[test]
    fn geometry_domain() {
        assert!(ArrayGeometry::new(2, 0.25).is_ok());
        assert!(ArrayGeometry::new(1, 0.5).is_err());
        assert!(ArrayGeometry::new(5, 0.0).is_err());
        assert!(ArrayGeometry::new(5, -0.5).is_err());
        assert_eq!(geom5().output_dim(), 15);
        assert_relative_eq!(geom5().phase_constant(), std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn polarization_vector_poles() {
        // gamma = 0: the eta phase multiplies a zero component.
        let g = polarization_vector(&Pol::new(0.0, 123.0).unwrap());
        assert!(g[0].norm() < 1e-15);
        assert_relative_eq!(g[1].re, 1.0, epsilon = 1e-15);
        // gamma = 90, eta = 0.
        let g = polarization_vector(&Pol::new(90.0, 0.0).unwrap());
        assert_relative_eq!(g[0].re, 1.0, epsilon = 1e-15);
        assert!(g[0].im.abs() < 1e-15);
        assert!(g[1].norm() < 1e-15);
    }

    #[test]
    fn polarization_vector_frozen_values() {
        // Independent high-precision evaluation of sin/cos at (50, 10) deg.
        let g = polarization_vector(&Pol::new(50.0, 10.0).unwrap());
        assert_relative_eq!(g[0].re, 0.754406506735488986, epsilon = 1e-12);
        assert_relative_eq!(g[0].im, 0.133022221559489017, epsilon = 1e-12);
        assert_relative_eq!(g[1].re, 0.642787609686539326, epsilon = 1e-12);
        assert!(g[1].im.abs() < 1e-15);
    }

    #[test]
    fn angular_matrix_axis_cases() {
        let om = angular_matrix(&Dir::new(0.0, 0.0).unwrap());
        let expect = Matrix3x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert_relative_eq!(om, expect, epsilon = 1e-15);

        let om = angular_matrix(&Dir::new(90.0, 0.0).unwrap());
        let expect = Matrix3x2::new(0.0, 0.0, 0.0, 1.0, -1.0, 0.0);
        assert_relative_eq!(om, expect, epsilon = 1e-15);
    }

    #[test]
    fn angular_matrix_frozen_values() {
        let om = angular_matrix(&Dir::new(60.0, 60.0).unwrap());
        assert_relative_eq!(om[(0, 0)], 0.25, epsilon = 1e-12);
        assert_relative_eq!(om[(0, 1)], -0.866025403784438647, epsilon = 1e-12);
        assert_relative_eq!(om[(1, 0)], 0.433012701892219323, epsilon = 1e-12);
        assert_relative_eq!(om[(1, 1)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(om[(2, 0)], -0.866025403784438647, epsilon = 1e-12);
        assert_relative_eq!(om[(2, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn angular_polarization_axis_cases() {
        let p = angular_polarization_vector(
            &Dir::new(0.0, 0.0).unwrap(),
            &Pol::new(0.0, 0.0).unwrap(),
        );
        assert!(p[0].norm() < 1e-15 && p[2].norm() < 1e-15);
        assert_relative_eq!(p[1].re, 1.0, epsilon = 1e-15);

        let p = angular_polarization_vector(
            &Dir::new(90.0, 0.0).unwrap(),
            &Pol::new(90.0, 0.0).unwrap(),
        );
        assert!(p[0].norm() < 1e-15 && p[1].norm() < 1e-15);
        assert_relative_eq!(p[2].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn steering_vector_cases() {
        // Broadside: all ones.
        let a = steering_vector(&Dir::new(0.0, 77.0).unwrap(), &geom5());
        for an in a.iter() {
            assert_relative_eq!(an.re, 1.0, epsilon = 1e-15);
            assert!(an.im.abs() < 1e-15);
        }
        // Endfire with half-wavelength spacing and two sensors: [1, -1].
        let g2 = ArrayGeometry::new(2, 0.5).unwrap();
        let a = steering_vector(&Dir::new(90.0, 0.0).unwrap(), &g2);
        assert_relative_eq!(a[0].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(a[1].re, -1.0, epsilon = 1e-12);
        assert!(a[1].im.abs() < 1e-12);
    }

    #[test]
    fn steering_vector_frozen_values() {
        // theta = 20 deg, d = lambda/2: a[n] = e^{-j pi n sin(20 deg)}.
        let a = steering_vector(&Dir::new(20.0, 20.0).unwrap(), &geom5());
        assert_relative_eq!(a[1].re, 0.476182557710674290, epsilon = 1e-12);
        assert_relative_eq!(a[1].im, -0.879346445794898490, epsilon = 1e-12);
        assert_relative_eq!(a[3].re, -0.996650420391802525, epsilon = 1e-12);
        assert_relative_eq!(a[3].im, 0.081779823507044190, epsilon = 1e-12);
    }

    #[test]
    fn steering_depends_on_elevation_only() {
        let g = geom5();
        let a1 = steering_vector(&Dir::new(37.5, 10.0).unwrap(), &g);
        let a2 = steering_vector(&Dir::new(37.5, 170.0).unwrap(), &g);
        assert_eq!(a1, a2);
    }

    #[test]
    fn joint_steering_broadside_stacks_copies() {
        let dir = Dir::new(0.0, 120.0).unwrap();
        let pol = Pol::new(25.0, -60.0).unwrap();
        let q = joint_steering_vector(&dir, &pol, &geom5());
        let p = angular_polarization_vector(&dir, &pol);
        for n in 0..5 {
            for i in 0..3 {
                assert_relative_eq!(q[3 * n + i].re, p[i].re, epsilon = 1e-14);
                assert_relative_eq!(q[3 * n + i].im, p[i].im, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn joint_steering_matrix_rank_and_degeneracy() {
        let g = geom5();
        let dir = Dir::new(60.0, 60.0).unwrap();
        let pol_a = Pol::new(20.0, 50.0).unwrap();
        let pol_b = Pol::new(70.0, -40.0).unwrap();
        assert!(matches!(
            joint_steering_matrix(&dir, &pol_a, &pol_a, &g),
            Err(Error::DegenerateDst(_))
        ));
        let q = joint_steering_matrix(&dir, &pol_a, &pol_b, &g).unwrap();
        // Columns keep the sqrt(N) norm.
        assert_relative_eq!(q.column(0).norm(), 5f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(q.column(1).norm(), 5f64.sqrt(), epsilon = 1e-12);
        // Frozen singular values from an independent evaluation; rank 2.
        let gram = q.adjoint() * &q;
        let t11 = gram[(0, 0)].re;
        let t22 = gram[(1, 1)].re;
        let t12 = gram[(0, 1)];
        let mid = 0.5 * (t11 + t22);
        let rad = (0.25 * (t11 - t22).powi(2) + t12.norm_sqr()).sqrt();
        let s_max = (mid + rad).sqrt();
        let s_min = (mid - rad).sqrt();
        assert_relative_eq!(s_max, 2.69677537, epsilon = 1e-6);
        assert_relative_eq!(s_min, 1.65148497, epsilon = 1e-6);
    }

    proptest! {
        #[test]
        fn omega_columns_orthonormal(theta in 0.0..=90.0f64, phi in 0.0..180.0f64) {
            let om = angular_matrix(&Dir::new(theta, phi).unwrap());
            let gram = om.transpose() * om;
            prop_assert!((gram[(0, 0)] - 1.0).abs() < 1e-12);
            prop_assert!((gram[(1, 1)] - 1.0).abs() < 1e-12);
            prop_assert!(gram[(0, 1)].abs() < 1e-12);
        }

        #[test]
        fn manifold_norms(
            theta in 0.0..=90.0f64, phi in 0.0..180.0f64,
            gamma in 0.0..=90.0f64, eta in -179.9..=180.0f64,
        ) {
            let dir = Dir::new(theta, phi).unwrap();
            let pol = Pol::new(gamma, eta).unwrap();
            let geom = geom5();
            prop_assert!((polarization_vector(&pol).norm() - 1.0).abs() < 1e-12);
            prop_assert!((angular_polarization_vector(&dir, &pol).norm() - 1.0).abs() < 1e-12);
            prop_assert!((steering_vector(&dir, &geom).norm() - 5f64.sqrt()).abs() < 1e-12);
            prop_assert!((joint_steering_vector(&dir, &pol, &geom).norm() - 5f64.sqrt()).abs() < 1e-10);
        }

        #[test]
        fn mixed_product_identity(
            theta in 0.0..=90.0f64, phi in 0.0..180.0f64,
            gamma in 0.0..=90.0f64, eta in -179.9..=180.0f64,
        ) {
            // (a kron Omega) g == a kron (Omega g)
            let dir = Dir::new(theta, phi).unwrap();
            let pol = Pol::new(gamma, eta).unwrap();
            let geom = geom5();
            let via_matrix = direction_matrix(&dir, &geom) * polarization_vector(&pol);
            let direct = joint_steering_vector(&dir, &pol, &geom);
            prop_assert!((via_matrix - direct).norm() < 1e-12);
        }

        #[test]
        fn shared_direction_span(
            theta in 1.0..=89.0f64, phi in 1.0..179.0f64,
            g1 in 5.0..=85.0f64, e1 in -170.0..=170.0f64,
            g2 in 5.0..=85.0f64, e2 in -170.0..=170.0f64,
            g3 in 0.0..=90.0f64, e3 in -179.9..=180.0f64,
        ) {
            // Any third polarization response from the same direction lies in
            // the span of two independent ones.
            let dir = Dir::new(theta, phi).unwrap();
            let pa = Pol::new(g1, e1).unwrap();
            let pb = Pol::new(g2, e2).unwrap();
            let ga = polarization_vector(&pa);
            let gb = polarization_vector(&pb);
            let det = ga[0] * gb[1] - ga[1] * gb[0];
            prop_assume!(det.norm() > 1e-3);

            let p1 = angular_polarization_vector(&dir, &pa);
            let p2 = angular_polarization_vector(&dir, &pb);
            let p3 = angular_polarization_vector(&dir, &Pol::new(g3, e3).unwrap());

            // Solve [p1 p2] c = p3 by the 2x2 normal equations and check the
            // least-squares residual.
            let a11 = p1.dotc(&p1);
            let a12 = p1.dotc(&p2);
            let a22 = p2.dotc(&p2);
            let b1 = p1.dotc(&p3);
            let b2 = p2.dotc(&p3);
            let den = a11 * a22 - a12 * a12.conj();
            let c1 = (b1 * a22 - a12 * b2) / den;
            let c2 = (a11 * b2 - a12.conj() * b1) / den;
            let residual = (p3 - (p1 * c1 + p2 * c2)).norm();
            prop_assert!(residual < 1e-10, "residual {residual}");
        }

        #[test]
        fn ap_vector_in_omega_column_space(
            theta in 0.0..=90.0f64, phi in 0.0..180.0f64,
            gamma in 0.0..=90.0f64, eta in -179.9..=180.0f64,
        ) {
            // p = Omega g stays in the column space of Omega: projecting back
            // onto the columns reconstructs it.
            let dir = Dir::new(theta, phi).unwrap();
            let p = angular_polarization_vector(&dir, &Pol::new(gamma, eta).unwrap());
            let om = angular_matrix(&dir);
            let mut recon = Vector3::from_element(Complex64::new(0.0, 0.0));
            for j in 0..2 {
                let col = Vector3::new(
                    Complex64::new(om[(0, j)], 0.0),
                    Complex64::new(om[(1, j)], 0.0),
                    Complex64::new(om[(2, j)], 0.0),
                );
                let coef = col.dotc(&p);
                recon += col * coef;
            }
            prop_assert!((recon - p).norm() < 1e-12);
        }
    }
}
