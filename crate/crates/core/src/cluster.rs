//! Cluster-space kinematics for two- and three-robot formations.
//!
//! A 2R formation is described by its midpoint `p`, unit axis `z` pointing
//! from robot 1 to robot 2, and the separation `d`. A 3R formation is
//! described by its centroid `p`, a frame `R = [x y z]` with `x` pointing from
//! robot 1 to the centroid and `z` normal to the formation plane, and the
//! shape `(d₂, d₃, α)`: the lengths of the edges from robot 1 and the angle
//! between them.

use serde::{Deserialize, Serialize};

use crate::dq::{Mat3, UnitDualQuaternion, UnitQuaternion, Vec3};
use crate::Error;

/// Separation below which two robots count as coincident (m).
pub const COINCIDENT_TOL: f64 = 1e-6;
/// Collinearity threshold relative to `d₂·d₃`.
pub const COLLINEAR_TOL: f64 = 1e-9;
/// Smallest admissible median length `m` (m).
pub const SINGULAR_M_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster2RState {
    pub p: Vec3,
    pub z: Vec3,
    pub d: f64,
}

pub fn forward_2r(r1: &Vec3, r2: &Vec3) -> Result<Cluster2RState, Error> {
    let e = r2 - r1;
    let d = e.norm();
    if !(d > COINCIDENT_TOL) {
        return Err(Error::DegenerateFormation("coincident robots"));
    }
    Ok(Cluster2RState {
        p: (r1 + r2) * 0.5,
        z: e / d,
        d,
    })
}

pub fn robots_from_cluster_2r(state: &Cluster2RState) -> (Vec3, Vec3) {
    let h = state.z * (0.5 * state.d);
    (state.p - h, state.p + h)
}

/// Robot velocities for a formation velocity `v`, inertial angular velocity
/// `omega_i` and separation rate `ddot`.
pub fn inverse_vel_2r(state: &Cluster2RState, v: &Vec3, omega_i: &Vec3, ddot: f64) -> (Vec3, Vec3) {
    let spread = (state.z * ddot + omega_i.cross(&state.z) * state.d) * 0.5;
    (v - spread, v + spread)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster3RState {
    pub p: Vec3,
    pub rot: Mat3,
    pub d2: f64,
    pub d3: f64,
    pub alpha: f64,
}

impl Cluster3RState {
    pub fn from_attitude(p: Vec3, q: &UnitQuaternion, d2: f64, d3: f64, alpha: f64) -> Self {
        Self {
            p,
            rot: q.to_rotation_matrix(),
            d2,
            d3,
            alpha,
        }
    }

    pub fn attitude(&self) -> UnitQuaternion {
        UnitQuaternion::from_rotation_matrix(&self.rot)
    }

    pub fn pose(&self) -> UnitDualQuaternion {
        UnitDualQuaternion::from_pose(&self.attitude(), &self.p)
    }

    pub fn geometry(&self) -> Geometry3R {
        Geometry3R {
            d2: self.d2,
            d3: self.d3,
            alpha: self.alpha,
        }
    }

    pub fn x(&self) -> Vec3 {
        self.rot.column(0).into()
    }

    pub fn y(&self) -> Vec3 {
        self.rot.column(1).into()
    }

    pub fn z(&self) -> Vec3 {
        self.rot.column(2).into()
    }
}

pub fn forward_3r(r1: &Vec3, r2: &Vec3, r3: &Vec3) -> Result<Cluster3RState, Error> {
    let a = r2 - r1;
    let b = r3 - r1;
    let d2 = a.norm();
    let d3 = b.norm();
    if !(d2 > COINCIDENT_TOL && d3 > COINCIDENT_TOL) {
        return Err(Error::DegenerateFormation("coincident robots"));
    }
    let n = a.cross(&b);
    let sn = n.norm();
    if !(sn > COLLINEAR_TOL * d2 * d3) {
        return Err(Error::DegenerateFormation("collinear robots"));
    }
    let p = (r1 + r2 + r3) / 3.0;
    let to_center = p - r1;
    let lc = to_center.norm();
    if !(lc > COINCIDENT_TOL) {
        return Err(Error::DegenerateFormation("robot 1 at the centroid"));
    }
    let x = to_center / lc;
    let z = n / sn;
    let y = z.cross(&x);
    Ok(Cluster3RState {
        p,
        rot: Mat3::from_columns(&[x, y, z]),
        d2,
        d3,
        alpha: sn.atan2(a.dot(&b)),
    })
}

/// Split of `α` by the median from robot 1: `α₂` lies between the median and
/// the edge to robot 2, `α₃` between the median and the edge to robot 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaSplit {
    pub alpha2: f64,
    pub alpha3: f64,
    pub m: f64,
}

#[derive(Clone, Copy, Debug)]
struct SplitTrig {
    m: f64,
    s2: f64,
    c2: f64,
    s3: f64,
    c3: f64,
}

fn median_length(d2: f64, d3: f64, alpha: f64) -> f64 {
    (0.25 * (d2 * d2 + d3 * d3 + 2.0 * d2 * d3 * alpha.cos()))
        .max(0.0)
        .sqrt()
}

fn split_trig(d2: f64, d3: f64, alpha: f64) -> Result<SplitTrig, Error> {
    if !(d2 > 0.0 && d3 > 0.0) {
        return Err(Error::DegenerateFormation("non-positive edge length"));
    }
    let m = median_length(d2, d3, alpha);
    if !(m > SINGULAR_M_TOL) {
        return Err(Error::SingularGeometry { m });
    }
    let (sa, ca) = alpha.sin_cos();
    let k = 0.5 / m;
    Ok(SplitTrig {
        m,
        s2: d3 * sa * k,
        c2: (d2 + d3 * ca) * k,
        s3: d2 * sa * k,
        c3: (d3 + d2 * ca) * k,
    })
}

pub fn alpha_split(d2: f64, d3: f64, alpha: f64) -> Result<AlphaSplit, Error> {
    let t = split_trig(d2, d3, alpha)?;
    Ok(AlphaSplit {
        alpha2: t.s2.atan2(t.c2),
        alpha3: t.s3.atan2(t.c3),
        m: t.m,
    })
}

/// Partial derivatives of `S(αᵢ) = d_j S(α)/(2m)` (the `m*` fields) and
/// `C(αᵢ) = (d_i + d_j C(α))/(2m)` (the `n*` fields) with respect to
/// `d_i`, `d_j` and `α`, in that order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MnPair {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl MnPair {
    fn new(di: f64, dj: f64, alpha: f64, m: f64) -> Self {
        let (sa, ca) = alpha.sin_cos();
        let m2 = m * m;
        let den = 8.0 * m2 * m;
        let ui = di + dj * ca;
        let uj = dj + di * ca;
        Self {
            m1: -dj * sa * ui / den,
            m2: sa * (4.0 * m2 - dj * uj) / den,
            m3: dj * (4.0 * m2 * ca + di * dj * sa * sa) / den,
            n1: (4.0 * m2 - ui * ui) / den,
            n2: (4.0 * m2 * ca - ui * uj) / den,
            n3: dj * sa * (-4.0 * m2 + di * ui) / den,
        }
    }
}

/// Coefficient pairs for `(i, j) = (2, 3)` and `(3, 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MnCoeffs {
    pub pair23: MnPair,
    pub pair32: MnPair,
}

pub fn mn_coeffs(d2: f64, d3: f64, alpha: f64) -> Result<MnCoeffs, Error> {
    let t = split_trig(d2, d3, alpha)?;
    Ok(MnCoeffs {
        pair23: MnPair::new(d2, d3, alpha, t.m),
        pair32: MnPair::new(d3, d2, alpha, t.m),
    })
}

fn coords_from_trig(d2: f64, d3: f64, t: &SplitTrig) -> [(f64, f64); 3] {
    let (u2, w2) = (d2 * t.c2, d2 * t.s2);
    let (u3, w3) = (d3 * t.c3, d3 * t.s3);
    [
        (-(u2 + u3) / 3.0, -(w3 - w2) / 3.0),
        ((2.0 * u2 - u3) / 3.0, -(2.0 * w2 + w3) / 3.0),
        ((2.0 * u3 - u2) / 3.0, (2.0 * w3 + w2) / 3.0),
    ]
}

/// In-plane coordinates `(x_b, y_b)` of the three robots in the formation
/// frame, relative to the centroid.
pub fn formation_coords(d2: f64, d3: f64, alpha: f64) -> Result<[(f64, f64); 3], Error> {
    let t = split_trig(d2, d3, alpha)?;
    Ok(coords_from_trig(d2, d3, &t))
}

pub fn robots_from_cluster_3r(state: &Cluster3RState) -> Result<[Vec3; 3], Error> {
    let c = formation_coords(state.d2, state.d3, state.alpha)?;
    let (x, y) = (state.x(), state.y());
    Ok(c.map(|(a, b)| state.p + x * a + y * b))
}

/// Cluster velocity: centroid velocity, frame-axis rates `ω×x` and `ω×y`, and
/// geometry rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterVelocity3R {
    pub v: Vec3,
    pub wx: Vec3,
    pub wy: Vec3,
    pub d2dot: f64,
    pub d3dot: f64,
    pub alphadot: f64,
}

impl ClusterVelocity3R {
    /// Builds the velocity from an inertial angular velocity.
    pub fn new(state: &Cluster3RState, v: Vec3, omega_i: &Vec3, rates: &Geometry3R) -> Self {
        Self {
            v,
            wx: omega_i.cross(&state.x()),
            wy: omega_i.cross(&state.y()),
            d2dot: rates.d2,
            d3dot: rates.d3,
            alphadot: rates.alpha,
        }
    }
}

pub fn inverse_vel_3r(state: &Cluster3RState, vc: &ClusterVelocity3R) -> Result<[Vec3; 3], Error> {
    let (d2, d3) = (state.d2, state.d3);
    let t = split_trig(d2, d3, state.alpha)?;
    let mn = MnCoeffs {
        pair23: MnPair::new(d2, d3, state.alpha, t.m),
        pair32: MnPair::new(d3, d2, state.alpha, t.m),
    };
    let (g2, g3, ga) = (vc.d2dot, vc.d3dot, vc.alphadot);
    let p23 = &mn.pair23;
    let p32 = &mn.pair32;
    let s2dot = p23.m1 * g2 + p23.m2 * g3 + p23.m3 * ga;
    let c2dot = p23.n1 * g2 + p23.n2 * g3 + p23.n3 * ga;
    let s3dot = p32.m1 * g3 + p32.m2 * g2 + p32.m3 * ga;
    let c3dot = p32.n1 * g3 + p32.n2 * g2 + p32.n3 * ga;
    // Rates of u = d C(α_i) and w = d S(α_i).
    let u2dot = g2 * t.c2 + d2 * c2dot;
    let w2dot = g2 * t.s2 + d2 * s2dot;
    let u3dot = g3 * t.c3 + d3 * c3dot;
    let w3dot = g3 * t.s3 + d3 * s3dot;

    let coords = coords_from_trig(d2, d3, &t);
    let rates = [
        (-(u2dot + u3dot) / 3.0, -(w3dot - w2dot) / 3.0),
        ((2.0 * u2dot - u3dot) / 3.0, -(2.0 * w2dot + w3dot) / 3.0),
        ((2.0 * u3dot - u2dot) / 3.0, (2.0 * w3dot + w2dot) / 3.0),
    ];
    let (x, y) = (state.x(), state.y());
    let mut out = [Vec3::zeros(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        let (a, b) = coords[k];
        let (ad, bd) = rates[k];
        *o = vc.v + vc.wx * a + vc.wy * b + x * ad + y * bd;
    }
    Ok(out)
}

/// Proportional gains of the shape controllers (1/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryGains {
    pub k_d: f64,
    pub k_alpha: f64,
}

impl Default for GeometryGains {
    fn default() -> Self {
        Self {
            k_d: 0.5,
            k_alpha: 0.5,
        }
    }
}

impl GeometryGains {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.k_d > 0.0 && self.k_d.is_finite()) {
            return Err(Error::InvalidGain(format!(
                "k_d must be positive, got {}",
                self.k_d
            )));
        }
        if !(self.k_alpha > 0.0 && self.k_alpha.is_finite()) {
            return Err(Error::InvalidGain(format!(
                "k_alpha must be positive, got {}",
                self.k_alpha
            )));
        }
        Ok(())
    }
}

/// 3R shape `(d₂, d₃, α)`; also used for its rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry3R {
    pub d2: f64,
    pub d3: f64,
    pub alpha: f64,
}

pub fn distance_rate(d: f64, d_ref: f64, gains: &GeometryGains) -> f64 {
    gains.k_d * (d_ref - d)
}

pub fn geometry_rates_3r(
    current: &Geometry3R,
    reference: &Geometry3R,
    gains: &GeometryGains,
) -> Geometry3R {
    Geometry3R {
        d2: gains.k_d * (reference.d2 - current.d2),
        d3: gains.k_d * (reference.d3 - current.d3),
        alpha: gains.k_alpha * (reference.alpha - current.alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const S3_2: f64 = 0.8660254037844386;

    fn equilateral() -> [Vec3; 3] {
        [Vec3::zeros(), Vec3::x(), Vec3::new(0.5, S3_2, 0.0)]
    }

    #[test]
    fn forward_2r_examples() {
        let s = forward_2r(&Vec3::zeros(), &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(s.p, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(s.z, Vec3::z());
        assert_eq!(s.d, 2.0);
        let t = forward_2r(&Vec3::new(0.0, 0.0, 2.0), &Vec3::zeros()).unwrap();
        assert_eq!((t.p, t.z, t.d), (s.p, -s.z, s.d));
        assert!(forward_2r(&Vec3::x(), &Vec3::x()).is_err());
    }

    #[test]
    fn inverse_vel_2r_examples() {
        let s = Cluster2RState {
            p: Vec3::zeros(),
            z: Vec3::z(),
            d: 2.0,
        };
        let v = Vec3::new(1.0, -2.0, 0.5);
        assert_eq!(inverse_vel_2r(&s, &v, &Vec3::zeros(), 0.0), (v, v));
        let (a, b) = inverse_vel_2r(&s, &Vec3::zeros(), &Vec3::zeros(), 1.0);
        assert_eq!(
            (a, b),
            (Vec3::new(0.0, 0.0, -0.5), Vec3::new(0.0, 0.0, 0.5))
        );
        let (a, b) = inverse_vel_2r(&s, &Vec3::zeros(), &Vec3::z(), 0.0);
        assert_eq!((a, b), (Vec3::zeros(), Vec3::zeros()));
    }

    #[test]
    fn inverse_vel_2r_matches_finite_differences() {
        let s = Cluster2RState {
            p: Vec3::new(1.0, 2.0, -1.0),
            z: Vec3::new(0.3, -0.4, 0.6).normalize(),
            d: 7.0,
        };
        let (v, w, dd) = (Vec3::new(0.2, 0.1, -0.3), Vec3::new(-0.4, 0.9, 0.2), 0.7);
        let h = 1e-6;
        let at = |t: f64| {
            let st = Cluster2RState {
                p: s.p + v * t,
                z: UnitQuaternion::exp(&(w * (0.5 * t))).adjoint(&s.z),
                d: s.d + dd * t,
            };
            robots_from_cluster_2r(&st)
        };
        let (p1, p2) = at(h);
        let (m1, m2) = at(-h);
        let (a, b) = inverse_vel_2r(&s, &v, &w, dd);
        assert!(((p1 - m1) / (2.0 * h) - a).norm() < 1e-8);
        assert!(((p2 - m2) / (2.0 * h) - b).norm() < 1e-8);
    }

    #[test]
    fn forward_3r_equilateral() {
        let [r1, r2, r3] = equilateral();
        let s = forward_3r(&r1, &r2, &r3).unwrap();
        assert!((s.p - Vec3::new(0.5, 0.28867513459481287, 0.0)).norm() < 1e-12);
        assert!((s.x() - Vec3::new(S3_2, 0.5, 0.0)).norm() < 1e-12);
        assert!((s.y() - Vec3::new(-0.5, S3_2, 0.0)).norm() < 1e-12);
        assert!((s.z() - Vec3::z()).norm() < 1e-12);
        assert!((s.d2 - 1.0).abs() < 1e-12 && (s.d3 - 1.0).abs() < 1e-12);
        assert!((s.alpha - PI / 3.0).abs() < 1e-12);

        let back = robots_from_cluster_3r(&s).unwrap();
        for (a, b) in back.iter().zip([r1, r2, r3].iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn forward_3r_rejects_degenerate() {
        let r = [Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0];
        assert!(matches!(
            forward_3r(&r[0], &r[1], &r[2]),
            Err(Error::DegenerateFormation(_))
        ));
        assert!(forward_3r(&Vec3::zeros(), &Vec3::zeros(), &Vec3::y()).is_err());
    }

    #[test]
    fn alpha_split_examples() {
        let s = alpha_split(1.0, 1.0, PI / 3.0).unwrap();
        assert!((s.alpha2 - PI / 6.0).abs() < 1e-12 && (s.alpha3 - PI / 6.0).abs() < 1e-12);
        assert!((s.m - S3_2).abs() < 1e-12);
        for a in [0.2, 1.0, 2.5] {
            let s = alpha_split(3.0, 3.0, a).unwrap();
            assert!((s.m - 3.0 * (a / 2.0).cos()).abs() < 1e-12);
        }
        let s = alpha_split(30.0, 45.0, 2.2).unwrap();
        assert!((s.alpha2 + s.alpha3 - 2.2).abs() < 1e-12);
        assert!(matches!(
            alpha_split(1.0, 1.0, PI),
            Err(Error::SingularGeometry { .. })
        ));
    }

    fn sin_cos_i(di: f64, dj: f64, a: f64) -> (f64, f64) {
        let m = median_length(di, dj, a);
        (dj * a.sin() / (2.0 * m), (di + dj * a.cos()) / (2.0 * m))
    }

    #[test]
    fn mn_coefficients_match_finite_differences() {
        let (d2, d3, a) = (30.0, 40.0, 1.0);
        let c = mn_coeffs(d2, d3, a).unwrap();
        let h = 1e-6;
        for (pair, di, dj) in [(c.pair23, d2, d3), (c.pair32, d3, d2)] {
            let fd = |f: &dyn Fn(f64, f64, f64) -> (f64, f64), k: usize| {
                let (mut p, mut m) = ([di, dj, a], [di, dj, a]);
                p[k] += h;
                m[k] -= h;
                let (sp, cp) = f(p[0], p[1], p[2]);
                let (sm, cm) = f(m[0], m[1], m[2]);
                ((sp - sm) / (2.0 * h), (cp - cm) / (2.0 * h))
            };
            let got = [(pair.m1, pair.n1), (pair.m2, pair.n2), (pair.m3, pair.n3)];
            for (k, (gm, gn)) in got.iter().enumerate() {
                let (em, en) = fd(&sin_cos_i, k);
                assert!(
                    (gm - em).abs() <= 1e-6 * em.abs().max(1e-3),
                    "M{} {gm} vs {em}",
                    k + 1
                );
                assert!(
                    (gn - en).abs() <= 1e-6 * en.abs().max(1e-3),
                    "N{} {gn} vs {en}",
                    k + 1
                );
            }
        }
    }

    #[test]
    fn mn_symmetric_case() {
        let c = mn_coeffs(25.0, 25.0, 0.7).unwrap();
        assert!((c.pair23.m1 - c.pair32.m1).abs() < 1e-15);
        assert!((c.pair23.m3 - c.pair32.m3).abs() < 1e-15);
        let c = mn_coeffs(10.0, 10.0, 1e-8).unwrap();
        assert!(c.pair23.m3.is_finite());
        let (s, _) = sin_cos_i(10.0, 10.0, 1e-8);
        assert!(s.abs() < 1e-8);
        // dS(α₂)/dα → 1/2 at α = 0 when d₂ = d₃
        assert!((c.pair23.m3 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rigid_translation_and_rotation() {
        let s = forward_3r(
            &Vec3::new(1.0, -2.0, 0.5),
            &Vec3::new(30.0, 4.0, 2.0),
            &Vec3::new(-5.0, 28.0, -3.0),
        )
        .unwrap();
        let v = Vec3::new(0.3, -0.2, 1.1);
        let r = inverse_vel_3r(
            &s,
            &ClusterVelocity3R {
                v,
                wx: Vec3::zeros(),
                wy: Vec3::zeros(),
                d2dot: 0.0,
                d3dot: 0.0,
                alphadot: 0.0,
            },
        )
        .unwrap();
        for ri in r {
            assert!((ri - v).norm() < 1e-12);
        }

        let w = 0.8;
        let omega = s.z() * w;
        let rates = Geometry3R {
            d2: 0.0,
            d3: 0.0,
            alpha: 0.0,
        };
        let vel = inverse_vel_3r(
            &s,
            &ClusterVelocity3R::new(&s, Vec3::zeros(), &omega, &rates),
        )
        .unwrap();
        let pos = robots_from_cluster_3r(&s).unwrap();
        for (ri, vi) in pos.iter().zip(vel.iter()) {
            assert!((vi.norm() - w * (ri - s.p).norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn d2_rate_matches_finite_difference() {
        let [r1, r2, r3] = equilateral();
        let s = forward_3r(&r1, &r2, &r3).unwrap();
        let h = 1e-6;
        let mut sp = s;
        sp.d2 += h;
        let mut sm = s;
        sm.d2 -= h;
        let (p, m) = (
            robots_from_cluster_3r(&sp).unwrap(),
            robots_from_cluster_3r(&sm).unwrap(),
        );
        let rates = Geometry3R {
            d2: 1.0,
            d3: 0.0,
            alpha: 0.0,
        };
        let vel = inverse_vel_3r(
            &s,
            &ClusterVelocity3R::new(&s, Vec3::zeros(), &Vec3::zeros(), &rates),
        )
        .unwrap();
        for k in 0..3 {
            assert!(((p[k] - m[k]) / (2.0 * h) - vel[k]).norm() < 1e-5);
        }
    }

    #[test]
    fn geometry_controller_examples() {
        let g = GeometryGains {
            k_d: 0.1,
            k_alpha: 0.1,
        };
        assert_eq!(distance_rate(50.0, 50.0, &g), 0.0);
        assert!((distance_rate(10.0, 50.0, &g) - 4.0).abs() < 1e-12);
        let cur = Geometry3R {
            d2: 20.0,
            d3: 30.0,
            alpha: 1.0,
        };
        let r = geometry_rates_3r(&cur, &cur, &g);
        assert_eq!(
            r,
            Geometry3R {
                d2: 0.0,
                d3: 0.0,
                alpha: 0.0
            }
        );
        assert!(GeometryGains {
            k_d: 0.0,
            k_alpha: 1.0
        }
        .validate()
        .is_err());
    }
}
