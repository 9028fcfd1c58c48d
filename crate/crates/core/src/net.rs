//! The embedding `FIN_±k → Δ_±k ⊂ S_{c_0}` and a sampled δ-net check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vector::{BlockSequence, BlockVector, Mode, RealVector};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidReal(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Magnitude assigned to value `i` (`1 ≤ i ≤ k`): `(1+δ)^{i−k}`.
fn level_value(i: i32, k: u32, delta: f64) -> f64 {
    (1.0 + delta).powi(i - k as i32)
}

/// `φ(p)(n) = ±(1+δ)^{|p(n)|−k}`, carrying the sign of `p(n)`.
pub fn embed_delta(p: &BlockVector, delta: f64) -> Result<RealVector> {
    if p.mode() != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    check_delta(delta)?;
    let k = p.k();
    Ok(RealVector {
        entries: p
            .entries()
            .iter()
            .map(|&(n, v)| (n, v.signum() as f64 * level_value(v.abs(), k, delta)))
            .collect(),
    })
}

/// Whether `(1+δ)^{1−k} < δ`, the condition making the embedding a δ-net.
pub fn net_condition(k: u32, delta: f64) -> bool {
    (1.0 + delta).powi(1 - k as i32) < delta
}

/// Distance from `x` to the image of the span of `blocks` under
/// [`embed_delta`].
///
/// `x` must be supported inside the union of the block supports. Blocks
/// have disjoint supports, so the ℓ∞ distance to `Σ ε_n T^{j_n}(b_n)` is
/// the maximum of per-block errors; the only coupling is the requirement
/// that some block is taken unshifted. Minimizing therefore reduces to
/// picking which block carries the unshifted term.
pub fn distance_to_span_image(
    blocks: &BlockSequence,
    x: &RealVector,
    delta: f64,
) -> Result<f64> {
    let (k, mode) = blocks.shape().ok_or(Error::EmptySequence)?;
    if mode != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    check_delta(delta)?;
    // (best error over every choice including "absent", best error with shift 0)
    let mut per_block = Vec::with_capacity(blocks.len());
    for b in blocks.elements() {
        let restricted: Vec<f64> = b.entries().iter().map(|&(n, _)| x.get(n)).collect();
        let absent = restricted.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let mut best_any = absent;
        let mut best_top = f64::INFINITY;
        for shift in 0..k as i32 {
            for sign in [1.0, -1.0] {
                let err = b
                    .entries()
                    .iter()
                    .zip(&restricted)
                    .map(|(&(_, v), &xv)| {
                        let level = v.abs() - shift;
                        let target = if level > 0 {
                            sign * v.signum() as f64 * level_value(level, k, delta)
                        } else {
                            0.0
                        };
                        (xv - target).abs()
                    })
                    .fold(0.0, f64::max);
                best_any = best_any.min(err);
                if shift == 0 {
                    best_top = best_top.min(err);
                }
            }
        }
        per_block.push((best_any, best_top));
    }
    let mut best = f64::INFINITY;
    for forced in 0..per_block.len() {
        let worst = per_block
            .iter()
            .enumerate()
            .map(|(idx, &(any, top))| if idx == forced { top } else { any })
            .fold(0.0, f64::max);
        best = best.min(worst);
    }
    Ok(best)
}

/// A unit-sphere sample: coefficients uniform in `[−1, 1]` on the block
/// images, normalized to sup-norm 1. `None` if every coefficient is zero.
pub fn sample_sphere_point(
    images: &[RealVector],
    rng: &mut impl Rng,
) -> Option<RealVector> {
    let mut entries = Vec::new();
    for img in images {
        let c: f64 = rng.gen_range(-1.0..=1.0);
        entries.extend(img.entries.iter().map(|&(n, v)| (n, c * v)));
    }
    let x = RealVector { entries };
    let norm = x.sup_norm();
    (norm > 0.0).then(|| x.scale(1.0 / norm))
}

/// Samples `sample_count` points of the unit sphere of `span{φ(b_n)}` and
/// returns the largest distance from a sample to `{φ(b) : b ∈ [B]_±k}`.
pub fn net_defect(blocks: &BlockSequence, delta: f64, sample_count: usize, seed: u64) -> Result<f64> {
    let (k, mode) = blocks.shape().ok_or(Error::EmptySequence)?;
    if mode != Mode::Signed {
        return Err(Error::RequiresSigned);
    }
    check_delta(delta)?;
    if !net_condition(k, delta) {
        return Err(Error::NetPrecondition { delta, k });
    }
    let images = blocks
        .elements()
        .iter()
        .map(|b| embed_delta(b, delta))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defect: f64 = 0.0;
    let mut drawn = 0;
    while drawn < sample_count {
        let Some(x) = sample_sphere_point(&images, &mut rng) else {
            continue;
        };
        drawn += 1;
        defect = defect.max(distance_to_span_image(blocks, &x, delta)?);
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: u32, e: &[(usize, i32)]) -> BlockVector {
        BlockVector::new(k, Mode::Signed, e.to_vec()).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let img = embed_delta(&s(3, &[(0, 3)]), 0.5).unwrap();
        assert_eq!(img.entries, vec![(0, 1.0)]);
        let img = embed_delta(&s(3, &[(0, 3), (2, -1)]), 0.5).unwrap();
        assert_eq!(img.entries[0], (0, 1.0));
        assert!((img.entries[1].1 + 1.5f64.powi(-2)).abs() < 1e-15);
        assert!((img.entries[1].1 + 0.4444).abs() < 1e-4);
    }

    #[test]
    fn embedding_is_odd_and_unit() {
        let p = s(3, &[(1, -2), (2, 3), (5, 1)]);
        let a = embed_delta(&p, 0.3).unwrap();
        let b = embed_delta(&p.negate().unwrap(), 0.3).unwrap();
        assert_eq!(a.scale(-1.0), b);
        assert_eq!(a.sup_norm(), 1.0);
    }

    #[test]
    fn unsigned_rejected() {
        let p = BlockVector::new(1, Mode::Unsigned, vec![(0, 1)]).unwrap();
        assert_eq!(embed_delta(&p, 0.5), Err(Error::RequiresSigned));
    }

    #[test]
    fn net_point_has_zero_defect() {
        let b = BlockSequence::new(vec![s(3, &[(0, 3), (1, -1)])]).unwrap();
        let img = embed_delta(&b[0], 0.5).unwrap();
        assert_eq!(distance_to_span_image(&b, &img, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn precondition_is_enforced() {
        let b = BlockSequence::new(vec![s(2, &[(0, 2)])]).unwrap();
        // (1.5)^{-1} = 0.667 > 0.5
        assert!(matches!(
            net_defect(&b, 0.5, 10, 1),
            Err(Error::NetPrecondition { .. })
        ));
        assert!(net_condition(3, 0.5));
    }

    #[test]
    fn defect_is_small_and_nonnegative() {
        let b = BlockSequence::new(vec![s(3, &[(0, 3), (1, 1)]), s(3, &[(2, -2), (3, 3)])]).unwrap();
        let d = net_defect(&b, 0.5, 1000, 7).unwrap();
        assert!(d >= 0.0);
        assert!(d <= 0.5 + 1e-9, "defect {d}");
    }
}
