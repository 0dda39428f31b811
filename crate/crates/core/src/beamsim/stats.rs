use ndarray::Array2;

use crate::phantom::{LesionSpec, PhantomConfig};
use crate::scalar::Real;

use super::RfGeometry;

/// Mean over standard deviation (population) of a sample.
pub fn point_snr<T: Real>(values: impl IntoIterator<Item = T>) -> f64 {
    let (mut n, mut sum, mut sum2) = (0usize, 0.0, 0.0);
    for v in values {
        let v = v.to_f64_lossy();
        n += 1;
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / n as f64;
    let var = sum2 / n as f64 - mean * mean;
    mean / var.max(0.0).sqrt()
}

/// Beam-space samples at least `clearance` mm inside the phantom's lateral and
/// axial faces and at least `clearance` mm outside every lesion's in-plane
/// cross-section (lesion radii grown by `clearance`).
pub fn lesion_free_region(
    geometry: &RfGeometry,
    phantom: &PhantomConfig,
    lesions: &[LesionSpec],
    clearance: f64,
) -> Array2<bool> {
    let [bx, _, bz] = phantom.bounds();
    let grown: Vec<LesionSpec> = lesions
        .iter()
        .map(|l| LesionSpec { radii: l.radii.map(|r| r + clearance), ..*l })
        .collect();
    Array2::from_shape_fn((geometry.n_lines, geometry.n_samples), |(line, s)| {
        let x = geometry.line_x(line);
        let z = geometry.depth_at(s);
        x >= bx.0 + clearance
            && x <= bx.1 - clearance
            && z >= bz.0 + clearance
            && z <= bz.1 - clearance
            && !grown.iter().any(|l| {
                // Cross-section at y = 0, ignoring the elevational offset so that
                // lesions slightly off-plane are still excluded.
                let dx = (x - l.center[0]) / l.radii[0];
                let dz = (z - l.center[2]) / l.radii[2];
                dx * dx + dz * dz <= 1.0
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_of_constant_offset_samples() {
        let snr = point_snr([1.0f64, 3.0, 1.0, 3.0]);
        assert!((snr - 2.0).abs() < 1e-12);
    }
}
