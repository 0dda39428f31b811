//! Randomized point-scatterer phantoms with hyper- and hypoechoic lesions.
//!
//! Coordinates are millimetres: `x` lateral (centred on the probe axis),
//! `y` elevational (centred on the imaging plane) and `z` axial depth measured
//! from the transducer face. The phantom occupies
//! `[-L/2, L/2) x [-E/2, E/2) x [standoff, standoff + A)`.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ImageGrid, MaskImage};
use crate::scalar::Real;

/// Placement attempts per lesion before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Echogenicity {
    Hyperechoic,
    Hypoechoic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LesionShape {
    Circle,
    Ellipsoid,
}

/// How a lesion's scale factor acts on the scatterers it contains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntensityScaling {
    /// Scatterer amplitudes are multiplied by the scale.
    #[default]
    Amplitude,
    /// Scatterer power is multiplied by the scale (amplitudes by its square root).
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LesionPolicy {
    /// Relative weights of {hyper only, hypo only, both}.
    pub class_mix: [f64; 3],
    /// Inclusive range of lesions drawn per selected class.
    pub count_per_class: (u32, u32),
    /// Relative weights of {circle, ellipsoid}.
    pub shape_mix: [f64; 2],
    /// Inclusive radius range, mm.
    pub radius_range: (f64, f64),
    /// Inclusive integer range of the hyperechoic factor k.
    pub hyper_k_range: (u32, u32),
    /// Open interval of the hypoechoic factor l.
    pub hypo_l_range: (f64, f64),
    /// Clearance a lesion keeps from the axial and lateral phantom faces, mm.
    pub margin: f64,
}

impl Default for LesionPolicy {
    fn default() -> Self {
        LesionPolicy {
            class_mix: [1.0, 1.0, 1.0],
            count_per_class: (1, 1),
            shape_mix: [1.0, 1.0],
            radius_range: (3.0, 12.0),
            hyper_k_range: (1, 10),
            hypo_l_range: (0.0, 1.0),
            margin: 2.0,
        }
    }
}

impl LesionPolicy {
    pub fn validate(&self) -> Result<()> {
        let weights_ok = |w: &[f64]| {
            w.iter().all(|&v| v.is_finite() && v >= 0.0) && w.iter().sum::<f64>() > 0.0
        };
        if !weights_ok(&self.class_mix) {
            return Err(Error::config("class_mix needs non-negative weights with a positive sum"));
        }
        if !weights_ok(&self.shape_mix) {
            return Err(Error::config("shape_mix needs non-negative weights with a positive sum"));
        }
        if self.count_per_class.0 > self.count_per_class.1 {
            return Err(Error::config("count_per_class min exceeds max"));
        }
        let (rmin, rmax) = self.radius_range;
        if !(rmin > 0.0 && rmin <= rmax && rmax.is_finite()) {
            return Err(Error::config("radius_range needs 0 < min <= max"));
        }
        let (kmin, kmax) = self.hyper_k_range;
        if kmin < 1 || kmin > kmax {
            return Err(Error::config("hyper_k_range needs 1 <= min <= max"));
        }
        let (lmin, lmax) = self.hypo_l_range;
        if !(lmin >= 0.0 && lmax <= 1.0 && lmin < lmax) {
            return Err(Error::config("hypo_l_range must be an open sub-interval of (0, 1)"));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::config("margin must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomConfig {
    pub axial_extent: f64,
    pub lateral_extent: f64,
    pub elevational_extent: f64,
    /// Distance from the transducer face to the top of the phantom, mm.
    pub standoff: f64,
    /// Scatterers per mm³.
    pub scatterer_density: f64,
    pub intensity_scaling: IntensityScaling,
    pub lesion_policy: LesionPolicy,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        PhantomConfig {
            axial_extent: 60.0,
            lateral_extent: 40.0,
            elevational_extent: 10.0,
            standoff: 30.0,
            scatterer_density: 4.0,
            intensity_scaling: IntensityScaling::Amplitude,
            lesion_policy: LesionPolicy::default(),
        }
    }
}

impl PhantomConfig {
    pub fn validate(&self) -> Result<()> {
        let extents = [self.axial_extent, self.lateral_extent, self.elevational_extent];
        if !extents.iter().all(|&e| e > 0.0 && e.is_finite()) {
            return Err(Error::config("phantom extents must be > 0"));
        }
        if !(self.standoff >= 0.0 && self.standoff.is_finite()) {
            return Err(Error::config("standoff must be >= 0"));
        }
        if !(self.scatterer_density > 0.0 && self.scatterer_density.is_finite()) {
            return Err(Error::config("scatterer_density must be > 0"));
        }
        self.lesion_policy.validate()
    }

    pub fn volume(&self) -> f64 {
        self.axial_extent * self.lateral_extent * self.elevational_extent
    }

    /// Fixed scatterer count, `round(density * volume)`.
    pub fn scatterer_count(&self) -> usize {
        (self.scatterer_density * self.volume()).round() as usize
    }

    /// `[min, max)` bounds per axis in `(x, y, z)` order.
    pub fn bounds(&self) -> [(f64, f64); 3] {
        [
            (-self.lateral_extent / 2.0, self.lateral_extent / 2.0),
            (-self.elevational_extent / 2.0, self.elevational_extent / 2.0),
            (self.standoff, self.standoff + self.axial_extent),
        ]
    }

    /// Depth of the phantom's mid-plane, mm.
    pub fn mid_depth(&self) -> f64 {
        self.standoff + self.axial_extent / 2.0
    }
}

/// One lesion, as an axis-aligned ellipsoid in phantom coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LesionSpec {
    pub class: Echogenicity,
    pub shape: LesionShape,
    /// `(x, y, z)` in mm.
    pub center: [f64; 3],
    /// Semi-axes along `(x, y, z)` in mm.
    pub radii: [f64; 3],
    /// k for hyperechoic lesions, l for hypoechoic ones.
    pub scale: f64,
}

impl LesionSpec {
    #[inline]
    pub fn contains(&self, p: [f64; 3]) -> bool {
        let mut s = 0.0;
        for a in 0..3 {
            let d = (p[a] - self.center[a]) / self.radii[a];
            s += d * d;
        }
        s <= 1.0
    }

    /// Point test against the lesion's cross-section with the imaging plane `y = 0`.
    #[inline]
    pub fn midplane_contains(&self, x: f64, z: f64) -> bool {
        self.contains([x, 0.0, z])
    }

    /// Amplitude multiplier applied to scatterers inside the lesion.
    pub fn amplitude_factor(&self, scaling: IntensityScaling) -> f64 {
        match scaling {
            IntensityScaling::Amplitude => self.scale,
            IntensityScaling::Power => self.scale.sqrt(),
        }
    }

    fn fits(&self, cfg: &PhantomConfig, margin: f64) -> bool {
        let [bx, by, bz] = cfg.bounds();
        let inside = |c: f64, r: f64, (lo, hi): (f64, f64)| c - r >= lo + margin && c + r <= hi - margin;
        inside(self.center[0], self.radii[0], bx)
            && inside(self.center[2], self.radii[2], bz)
            && self.center[1] >= by.0 + margin
            && self.center[1] <= by.1 - margin
    }
}

/// A scatterer cloud together with the lesions that shaped it.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom<T> {
    pub config: PhantomConfig,
    pub lesions: Vec<LesionSpec>,
    /// `(x, y, z)` per scatterer, mm.
    pub positions: Vec<[T; 3]>,
    pub amplitudes: Vec<T>,
}

impl<T: Real> Phantom<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Copy of the phantom with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Phantom {
            amplitudes: self.amplitudes.iter().map(|&a| a * factor).collect(),
            ..self.clone()
        }
    }
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.gen_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

fn sample_one<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &PhantomConfig,
    class: Echogenicity,
    shapes: &WeightedIndex<f64>,
) -> Result<LesionSpec> {
    let policy = &cfg.lesion_policy;
    let shape = if shapes.sample(rng) == 0 { LesionShape::Circle } else { LesionShape::Ellipsoid };
    let scale = match class {
        Echogenicity::Hyperechoic => {
            rng.gen_range(policy.hyper_k_range.0..=policy.hyper_k_range.1) as f64
        }
        Echogenicity::Hypoechoic => uniform_open(rng, policy.hypo_l_range.0, policy.hypo_l_range.1),
    };
    let (rmin, rmax) = policy.radius_range;
    let bounds = cfg.bounds();
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let radii = match shape {
            LesionShape::Circle => [rng.gen_range(rmin..=rmax); 3],
            LesionShape::Ellipsoid => [
                rng.gen_range(rmin..=rmax),
                rng.gen_range(rmin..=rmax),
                rng.gen_range(rmin..=rmax),
            ],
        };
        let center = [
            rng.gen_range(bounds[0].0..bounds[0].1),
            rng.gen_range(bounds[1].0..bounds[1].1),
            rng.gen_range(bounds[2].0..bounds[2].1),
        ];
        let lesion = LesionSpec { class, shape, center, radii, scale };
        if lesion.fits(cfg, policy.margin) {
            return Ok(lesion);
        }
    }
    Err(Error::GeometryInfeasible { attempts: MAX_PLACEMENT_ATTEMPTS })
}

/// Draws the lesion set for one phantom.
///
/// Hyperechoic lesions are sampled before hypoechoic ones; on overlap the
/// later lesion's scale wins in [`apply_lesion_scaling`].
pub fn sample_lesions<R: Rng + ?Sized>(rng: &mut R, cfg: &PhantomConfig) -> Result<Vec<LesionSpec>> {
    cfg.validate()?;
    let policy = &cfg.lesion_policy;
    let classes = WeightedIndex::new(policy.class_mix).expect("validated weights");
    let shapes = WeightedIndex::new(policy.shape_mix).expect("validated weights");

    let (with_hyper, with_hypo) = match classes.sample(rng) {
        0 => (true, false),
        1 => (false, true),
        _ => (true, true),
    };
    let mut lesions = Vec::new();
    for (enabled, class) in [(with_hyper, Echogenicity::Hyperechoic), (with_hypo, Echogenicity::Hypoechoic)] {
        if !enabled {
            continue;
        }
        let count = rng.gen_range(policy.count_per_class.0..=policy.count_per_class.1);
        for _ in 0..count {
            lesions.push(sample_one(rng, cfg, class, &shapes)?);
        }
    }
    Ok(lesions)
}

/// Multiplies each base amplitude by the factor of the last lesion containing it.
pub fn apply_lesion_scaling<T: Real>(
    positions: &[[T; 3]],
    base_amplitudes: &[T],
    lesions: &[LesionSpec],
    scaling: IntensityScaling,
) -> Vec<T> {
    assert_eq!(positions.len(), base_amplitudes.len(), "positions and amplitudes differ in length");
    let factors: Vec<T> = lesions.iter().map(|l| T::lit(l.amplitude_factor(scaling))).collect();
    positions
        .iter()
        .zip(base_amplitudes)
        .map(|(p, &base)| {
            let p = [p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy()];
            match lesions.iter().rposition(|l| l.contains(p)) {
                Some(i) => base * factors[i],
                None => base,
            }
        })
        .collect()
}

/// Generates a phantom around an explicit lesion set.
pub fn generate_phantom_with_lesions<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &PhantomConfig,
    lesions: Vec<LesionSpec>,
) -> Result<Phantom<T>> {
    cfg.validate()?;
    let n = cfg.scatterer_count();
    let [bx, by, bz] = cfg.bounds();
    let mut positions = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.gen_range(bx.0..bx.1);
        let y = rng.gen_range(by.0..by.1);
        let z = rng.gen_range(bz.0..bz.1);
        positions.push([T::lit(x), T::lit(y), T::lit(z)]);
    }
    let base: Vec<T> = (0..n)
        .map(|_| T::lit(StandardNormal.sample(rng)))
        .collect();
    let amplitudes = apply_lesion_scaling(&positions, &base, &lesions, cfg.intensity_scaling);
    Ok(Phantom { config: cfg.clone(), lesions, positions, amplitudes })
}

/// Samples lesions, scatters `round(density * volume)` points uniformly in the
/// box with standard-normal reflectivities, and applies lesion scaling.
pub fn generate_phantom<T: Real, R: Rng + ?Sized>(rng: &mut R, cfg: &PhantomConfig) -> Result<Phantom<T>> {
    let lesions = sample_lesions(rng, cfg)?;
    generate_phantom_with_lesions(rng, cfg, lesions)
}

/// Rasterizes the selected lesions' imaging-plane cross-sections onto `grid`.
pub fn rasterize_lesions<'a, I>(lesions: I, grid: &ImageGrid) -> MaskImage
where
    I: IntoIterator<Item = &'a LesionSpec>,
{
    let lesions: Vec<&LesionSpec> = lesions.into_iter().collect();
    let pixels = Array2::from_shape_fn(grid.shape(), |(row, col)| {
        let (x, z) = (grid.lateral_at(col), grid.axial_at(row));
        u8::from(lesions.iter().any(|l| l.midplane_contains(x, z)))
    });
    MaskImage { pixels, grid: *grid }
}

/// Ground-truth mask: 1 where a pixel centre lies inside a hypoechoic lesion.
pub fn rasterize_mask(lesions: &[LesionSpec], grid: &ImageGrid) -> MaskImage {
    rasterize_lesions(lesions.iter().filter(|l| l.class == Echogenicity::Hypoechoic), grid)
}
