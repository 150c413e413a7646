//! Uniform symmetric converter quantization.

/// Quantizes a signal in place: uniform mid-rise quantizer with `2^bits`
/// levels spread symmetrically over `[-bound, bound]`, clipping outside.
/// A `bound` of zero derives the range from the call's own max magnitude;
/// zero `bits` disables quantization entirely.
pub fn quantize(values: &mut [f64], bits: u32, bound: f64) {
    if bits == 0 || values.is_empty() {
        return;
    }
    let bound = if bound > 0.0 {
        bound
    } else {
        values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    if bound == 0.0 {
        return;
    }
    let levels = (1u64 << bits.min(52)) as f64;
    for v in values.iter_mut() {
        let u = (v.clamp(-bound, bound) + bound) / (2.0 * bound);
        let code = (u * (levels - 1.0)).round();
        *v = code / (levels - 1.0) * 2.0 * bound - bound;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn zero_bits_is_identity() {
        let mut v = vec![0.123, -4.56, 7.0];
        let orig = v.clone();
        quantize(&mut v, 0, 0.0);
        assert_eq!(v, orig);
    }

    #[test]
    fn output_levels_bounded_by_two_to_the_bits() {
        for bits in [1u32, 2, 3, 4, 6] {
            let mut v: Vec<f64> = (0..1000).map(|i| (i as f64) / 499.5 - 1.0).collect();
            quantize(&mut v, bits, 1.0);
            let distinct: BTreeSet<u64> = v.iter().map(|x| x.to_bits()).collect();
            assert!(
                distinct.len() as u64 <= 1 << bits,
                "{bits} bits produced {} levels",
                distinct.len()
            );
        }
    }

    #[test]
    fn one_bit_snaps_to_the_rails() {
        let mut v = vec![-0.9, -0.1, 0.2, 1.0];
        quantize(&mut v, 1, 1.0);
        assert_eq!(v, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn clipping_applies_outside_bound() {
        let mut v = vec![10.0, -10.0];
        quantize(&mut v, 8, 1.0);
        assert!(v[0] <= 1.0 && v[1] >= -1.0);
    }
}
