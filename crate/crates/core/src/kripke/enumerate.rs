use super::{Frame, FrameProperty, KripkeError};

pub const DEFAULT_ENUMERATION_CAP: usize = 5;

/// Hard limit: relations are enumerated as `u64` bitmasks.
const MAX_WORLDS: usize = 7;

/// Adjacency rows of a small frame; bit `j` of `rows[i]` is the pair `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Rows {
    pub n: usize,
    pub rows: [u8; 8],
}

impl Rows {
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut rows = [0u8; 8];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = ((mask >> (i * n)) & ((1u64 << n) - 1)) as u8;
        }
        Rows { n, rows }
    }

    fn reflexive(&self) -> bool {
        (0..self.n).all(|i| self.rows[i] >> i & 1 == 1)
    }

    fn symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.rows[i] >> j & 1 == self.rows[j] >> i & 1))
    }

    fn transitive(&self) -> bool {
        (0..self.n).all(|i| {
            let r = self.rows[i];
            (0..self.n)
                .filter(|j| r >> j & 1 == 1)
                .all(|j| self.rows[j] & !r == 0)
        })
    }

    fn directed(&self) -> bool {
        (0..self.n).all(|i| {
            let r = self.rows[i];
            let succ = || (0..self.n).filter(move |j| r >> j & 1 == 1);
            succ().all(|u| succ().all(|v| self.rows[u] & self.rows[v] != 0))
        })
    }

    pub fn has(&self, p: FrameProperty) -> bool {
        match p {
            FrameProperty::Reflexive => self.reflexive(),
            FrameProperty::Transitive => self.transitive(),
            FrameProperty::Directed => self.directed(),
            FrameProperty::Symmetric => self.symmetric(),
            FrameProperty::Equivalence => self.reflexive() && self.transitive() && self.symmetric(),
        }
    }
}

/// Every frame on `w0..w(n-1)` satisfying all of `props`, each exactly once,
/// in ascending order of relation bitmask (bit `i*n + j` is the pair
/// `(i, j)`). Isomorphic copies are not merged.
pub fn enumerate_frames(
    n: usize,
    props: &[FrameProperty],
    cap: usize,
) -> Result<FrameEnumeration, KripkeError> {
    if n > cap.min(MAX_WORLDS) {
        return Err(KripkeError::CapExceeded {
            what: "number of worlds",
            got: n,
            cap: cap.min(MAX_WORLDS),
        });
    }
    Ok(FrameEnumeration::new(n, props))
}

/// Lazy iterator behind [`enumerate_frames`].
pub struct FrameEnumeration {
    n: usize,
    props: Vec<FrameProperty>,
    forced: u64,
    free_bits: Vec<usize>,
    next: u64,
    end: u64,
}

impl FrameEnumeration {
    fn new(n: usize, props: &[FrameProperty]) -> Self {
        let loops_forced = props
            .iter()
            .any(|p| matches!(p, FrameProperty::Reflexive | FrameProperty::Equivalence));
        let diagonal: u64 = (0..n).map(|i| 1u64 << (i * n + i)).sum();
        let forced = if loops_forced { diagonal } else { 0 };
        let free_bits: Vec<usize> = (0..n * n).filter(|b| forced >> b & 1 == 0).collect();
        FrameEnumeration {
            n,
            props: props.to_vec(),
            forced,
            end: 1u64 << free_bits.len(),
            free_bits,
            next: 0,
        }
    }

    /// The next matching relation bitmask.
    pub(crate) fn next_mask(&mut self) -> Option<u64> {
        while self.next < self.end {
            let counter = self.next;
            self.next += 1;
            // Spreading the counter over the free bits preserves order since
            // the forced bits are constant.
            let mut mask = self.forced;
            for (k, &b) in self.free_bits.iter().enumerate() {
                mask |= (counter >> k & 1) << b;
            }
            let rows = Rows::from_mask(self.n, mask);
            if self.props.iter().all(|&p| rows.has(p)) {
                return Some(mask);
            }
        }
        None
    }
}

impl Iterator for FrameEnumeration {
    type Item = Frame;

    fn next(&mut self) -> Option<Frame> {
        self.next_mask().map(|m| Frame::from_mask(self.n, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        use FrameProperty::*;
        assert_eq!(enumerate_frames(1, &[Reflexive], 5).unwrap().count(), 1);
        assert_eq!(
            enumerate_frames(2, &[Reflexive, Transitive], 5)
                .unwrap()
                .count(),
            4
        );
        assert_eq!(enumerate_frames(2, &[], 5).unwrap().count(), 16);
        // number of preorders on 3 and 4 labelled points
        assert_eq!(
            enumerate_frames(3, &[Reflexive, Transitive], 5)
                .unwrap()
                .count(),
            29
        );
        assert_eq!(
            enumerate_frames(4, &[Reflexive, Transitive], 5)
                .unwrap()
                .count(),
            355
        );
        // equivalence relations: Bell numbers
        assert_eq!(enumerate_frames(4, &[Equivalence], 5).unwrap().count(), 15);
    }

    #[test]
    fn order_is_ascending_by_mask() {
        let masks: Vec<u64> = enumerate_frames(3, &[FrameProperty::Transitive], 5)
            .unwrap()
            .map(|f| f.mask().unwrap())
            .collect();
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(masks[0], 0);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_frames(6, &[], 5),
            Err(KripkeError::CapExceeded { got: 6, cap: 5, .. })
        ));
        assert!(enumerate_frames(9, &[], 100).is_err());
    }

    #[test]
    fn rows_agree_with_frame_checks() {
        for m in 0..512u64 {
            let rows = Rows::from_mask(3, m);
            let fr = Frame::from_mask(3, m);
            for p in FrameProperty::ALL {
                assert_eq!(rows.has(p), fr.has_property(p), "mask {m} {p:?}");
            }
        }
    }
}
