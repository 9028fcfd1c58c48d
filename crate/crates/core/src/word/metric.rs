use super::{VarWordSequence, Word};
use crate::distance::Distance;

/// Same length, same nonzero-letter positions, same letters there.
pub fn compatible(x: &Word, y: &Word) -> bool {
    x.len() == y.len()
        && x.symbols().iter().zip(y.symbols()).all(|(&a, &b)| {
            match (a.metric_value(), b.metric_value()) {
                (Some(_), Some(_)) => true,
                (None, None) => a == b,
                _ => false,
            }
        })
}

/// `sup |i − j|` over positions holding variables or the zero letter, with
/// `v_i ↦ i` and `0 ↦ 0`; infinite for incompatible words.
pub fn dist_words(x: &Word, y: &Word) -> Distance {
    if !compatible(x, y) {
        return Distance::Infinite;
    }
    let d = x
        .symbols()
        .iter()
        .zip(y.symbols())
        .filter_map(|(&a, &b)| Some(a.metric_value()?.abs_diff(b.metric_value()?)))
        .max()
        .unwrap_or(0);
    Distance::Finite(d)
}

/// Elementwise supremum; infinite when lengths differ.
pub fn dist_seqs(xs: &[Word], ys: &[Word]) -> Distance {
    if xs.len() != ys.len() {
        return Distance::Infinite;
    }
    xs.iter()
        .zip(ys)
        .map(|(x, y)| dist_words(x, y))
        .max()
        .unwrap_or(Distance::ZERO)
}

impl VarWordSequence {
    /// [`dist_seqs`] on the word lists.
    pub fn dist(&self, other: &VarWordSequence) -> Distance {
        dist_seqs(self.words(), other.words())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Mode;

    fn w(t: &str) -> Word {
        Word::parse(2, Mode::Signed, t).unwrap()
    }

    #[test]
    fn compatibility() {
        assert!(compatible(&w("v_1 1"), &w("v_-2 1")));
        assert!(!compatible(&w("1 v_1"), &w("01 v_1")));
        assert!(!compatible(&w("1 v_1"), &w("v_1 v_1")));
        assert!(compatible(&w("0 v_1"), &w("v_2 0")));
    }

    #[test]
    fn distances() {
        assert_eq!(dist_words(&w("v_2 v_1"), &w("v_1 0")), Distance::Finite(1));
        assert_eq!(dist_words(&w("v_1 1"), &w("v_-1 1")), Distance::Finite(2));
        assert_eq!(dist_words(&w("1 v_1"), &w("01 v_1")), Distance::Infinite);
        assert_eq!(dist_words(&w("1"), &w("1")), Distance::ZERO);
        assert_eq!(dist_words(&w("v_1"), &w("v_1 0")), Distance::Infinite);
    }

    #[test]
    fn sequences() {
        let xs = vec![w("v_1"), w("v_2 0")];
        assert_eq!(dist_seqs(&xs, &xs), Distance::ZERO);
        let ys = vec![w("v_2"), w("0 v_2")];
        assert_eq!(dist_seqs(&xs, &ys), Distance::Finite(2));
        assert_eq!(dist_seqs(&xs, &[w("v_1")]), Distance::Infinite);
        let zs = vec![w("v_1"), w("1 0")];
        assert_eq!(dist_seqs(&xs, &zs), Distance::Infinite);
    }
}
