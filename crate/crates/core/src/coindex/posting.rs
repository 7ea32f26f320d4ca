use serde::{Deserialize, Serialize};

/// Dense document ordinal: position of the document in the indexed set.
pub type DocOrdinal = u32;

/// Strictly ascending list of document ordinals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PostingList(Vec<DocOrdinal>);

// Switch from a linear merge to galloping once one side is this many times
// longer than the other.
const GALLOP_RATIO: usize = 16;

impl PostingList {
    pub fn new() -> Self {
        PostingList(Vec::new())
    }

    /// Caller guarantees `ids` is strictly ascending.
    pub(crate) fn from_sorted_unchecked(ids: Vec<DocOrdinal>) -> Self {
        debug_assert!(is_strictly_ascending(&ids));
        PostingList(ids)
    }

    /// Returns `None` unless `ids` is strictly ascending.
    pub fn from_sorted(ids: Vec<DocOrdinal>) -> Option<Self> {
        is_strictly_ascending(&ids).then_some(PostingList(ids))
    }

    pub fn from_unsorted(mut ids: Vec<DocOrdinal>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        PostingList(ids)
    }

    /// All ordinals `0..n`.
    pub fn full(n: usize) -> Self {
        PostingList((0..n as DocOrdinal).collect())
    }

    pub fn as_slice(&self) -> &[DocOrdinal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = DocOrdinal> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, id: DocOrdinal) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn last(&self) -> Option<DocOrdinal> {
        self.0.last().copied()
    }

    pub fn intersect(&self, other: &PostingList) -> PostingList {
        PostingList(intersect_sorted(&self.0, &other.0))
    }

    pub fn intersection_len(&self, other: &PostingList) -> usize {
        let (short, long) = order_by_len(&self.0, &other.0);
        if short.len() * GALLOP_RATIO < long.len() {
            let mut n = 0;
            gallop_each(short, long, |_| n += 1);
            n
        } else {
            let mut n = 0;
            merge_each(short, long, |_| n += 1);
            n
        }
    }

    pub fn into_vec(self) -> Vec<DocOrdinal> {
        self.0
    }
}

impl<'a> IntoIterator for &'a PostingList {
    type Item = DocOrdinal;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, DocOrdinal>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

pub(crate) fn is_strictly_ascending(ids: &[DocOrdinal]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

fn order_by_len<'a>(a: &'a [DocOrdinal], b: &'a [DocOrdinal]) -> (&'a [DocOrdinal], &'a [DocOrdinal]) {
    if a.len() <= b.len() {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn intersect_sorted(a: &[DocOrdinal], b: &[DocOrdinal]) -> Vec<DocOrdinal> {
    let (short, long) = order_by_len(a, b);
    let mut out = Vec::with_capacity(short.len());
    if short.len() * GALLOP_RATIO < long.len() {
        gallop_each(short, long, |id| out.push(id));
    } else {
        merge_each(short, long, |id| out.push(id));
    }
    out
}

fn merge_each(a: &[DocOrdinal], b: &[DocOrdinal], mut emit: impl FnMut(DocOrdinal)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                emit(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// For each probe in `short`, exponential search forward in `long` from the
/// last position, then binary search inside the bracket.
fn gallop_each(short: &[DocOrdinal], long: &[DocOrdinal], mut emit: impl FnMut(DocOrdinal)) {
    let mut base = 0;
    for &x in short {
        let rest = &long[base..];
        if rest.is_empty() {
            break;
        }
        let mut bound = 1;
        while bound < rest.len() && rest[bound] < x {
            bound *= 2;
        }
        let from = bound / 2;
        let window = &rest[from..(bound + 1).min(rest.len())];
        match window.binary_search(&x) {
            Ok(p) => {
                emit(x);
                base += from + p + 1;
            }
            Err(p) => base += from + p,
        }
    }
}
