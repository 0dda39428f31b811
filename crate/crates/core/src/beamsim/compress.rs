use ndarray::Array2;

use crate::scalar::Real;

/// Maps an envelope frame onto `[0, 1]` over `dynamic_range_db` below its maximum.
pub fn log_compress<T: Real>(env: &Array2<T>, dynamic_range_db: f64) -> Array2<T> {
    let max = env.iter().cloned().fold(T::zero(), T::max);
    if max <= T::zero() {
        return Array2::zeros(env.dim());
    }
    let twenty_over_dr = T::lit(20.0 / dynamic_range_db);
    env.mapv(|v| {
        let db = (v / max).log10() * twenty_over_dr;
        let out = T::one() + db;
        if out.is_nan() {
            T::zero()
        } else {
            out.max(T::zero()).min(T::one())
        }
    })
}
