//! Spatial model: the leader sits at the origin, followers form a PPP over a
//! disk and jammers a PPP over an annulus.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return domain(format!("point coordinates must be finite, got ({x}, {y})"));
        }
        Ok(Self { x, y })
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self {
            x: radius * angle.cos(),
            y: radius * angle.sin(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn translate(&self, by: &Point2D) -> Point2D {
        Point2D {
            x: self.x + by.x,
            y: self.y + by.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    radius: f64,
}

impl DiskRegion {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("disk radius must be positive, got {radius}"));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Ring `z1 ≤ ‖x‖ ≤ z2` centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRegion {
    z1: f64,
    z2: f64,
}

impl AnnulusRegion {
    pub fn new(z1: f64, z2: f64) -> Result<Self> {
        if !z1.is_finite() || !z2.is_finite() || !(z1 >= 0.0) || !(z1 < z2) {
            return domain(format!(
                "annulus requires 0 <= z1 < z2, got z1 = {z1}, z2 = {z2}"
            ));
        }
        Ok(Self { z1, z2 })
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }
}

/// Sampling region for [`sample_ppp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disk(DiskRegion),
    Annulus(AnnulusRegion),
}

impl Region {
    pub fn area(&self) -> f64 {
        match self {
            Region::Disk(d) => PI * d.radius * d.radius,
            Region::Annulus(a) => PI * (a.z2 * a.z2 - a.z1 * a.z1),
        }
    }

    fn radial_bounds(&self) -> (f64, f64) {
        match self {
            Region::Disk(d) => (0.0, d.radius),
            Region::Annulus(a) => (a.z1, a.z2),
        }
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        let (lo, hi) = self.radial_bounds();
        let r = p.norm();
        r >= lo && r <= hi
    }

    /// One point uniformly distributed over the region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        let (lo, hi) = self.radial_bounds();
        let u: f64 = rng.random();
        let r = (lo * lo + u * (hi * hi - lo * lo)).sqrt().clamp(lo, hi);
        let theta = 2.0 * PI * rng.random::<f64>();
        Point2D::from_polar(r, theta)
    }
}

impl From<DiskRegion> for Region {
    fn from(d: DiskRegion) -> Self {
        Region::Disk(d)
    }
}

impl From<AnnulusRegion> for Region {
    fn from(a: AnnulusRegion) -> Self {
        Region::Annulus(a)
    }
}

/// Draws a homogeneous Poisson point process realisation over `region`.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity: f64,
    region: impl Into<Region>,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return domain(format!("PPP intensity must be >= 0, got {intensity}"));
    }
    let region = region.into();
    let mean = intensity * region.area();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| crate::error::Error::Domain(e.to_string()))?
        .sample(rng) as usize;
    Ok((0..count).map(|_| region.sample_uniform(rng)).collect())
}

/// Density of the leader-to-follower distance,
/// `f_R(r) = 2π ρ_T r exp(-ρ_T π r²)`.
pub fn distance_pdf(r: f64, rho_t: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return domain(format!("distance must be >= 0, got {r}"));
    }
    if !(rho_t > 0.0) {
        return domain(format!("follower intensity must be > 0, got {rho_t}"));
    }
    Ok(2.0 * PI * rho_t * r * (-rho_t * PI * r * r).exp())
}

/// Inverse-CDF draw from [`distance_pdf`].
pub fn sample_follower_distance<R: Rng + ?Sized>(rho_t: f64, rng: &mut R) -> f64 {
    // 1 - U keeps the argument of ln strictly positive.
    let u: f64 = 1.0 - rng.random::<f64>();
    (-u.ln() / (PI * rho_t)).sqrt()
}

/// One realisation of the network: leader at the origin, followers inside the
/// disk, jammers inside the annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub leader: Point2D,
    pub followers: Vec<Point2D>,
    pub jammers: Vec<Point2D>,
    pub follower_intensity: f64,
    pub jammer_intensity: f64,
}

impl Deployment {
    pub fn new(
        followers: Vec<Point2D>,
        jammers: Vec<Point2D>,
        disk: DiskRegion,
        annulus: AnnulusRegion,
        follower_intensity: f64,
        jammer_intensity: f64,
    ) -> Result<Self> {
        if !(follower_intensity >= 0.0) || !(jammer_intensity >= 0.0) {
            return domain("node intensities must be >= 0");
        }
        let disk = Region::Disk(disk);
        if let Some(p) = followers.iter().find(|p| !disk.contains(p)) {
            return domain(format!("follower {p:?} lies outside the deployment disk"));
        }
        let annulus = Region::Annulus(annulus);
        if let Some(p) = jammers.iter().find(|p| !annulus.contains(p)) {
            return domain(format!("jammer {p:?} lies outside the jamming annulus"));
        }
        Ok(Self {
            leader: Point2D::ORIGIN,
            followers,
            jammers,
            follower_intensity,
            jammer_intensity,
        })
    }

    /// Independent PPP draws for followers and jammers.
    pub fn sample<R: Rng + ?Sized>(
        disk: DiskRegion,
        annulus: AnnulusRegion,
        follower_intensity: f64,
        jammer_intensity: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let followers = sample_ppp(follower_intensity, disk, rng)?;
        let jammers = sample_ppp(jammer_intensity, annulus, rng)?;
        Ok(Self {
            leader: Point2D::ORIGIN,
            followers,
            jammers,
            follower_intensity,
            jammer_intensity,
        })
    }
}
