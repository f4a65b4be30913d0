//! Small data-structure helpers shared by the search engines.

/// A vector whose entries reset to a default in O(1) via generation stamps.
/// The label arrays of the searches are cleared once per run/query, which
/// would otherwise dominate on small queries.
#[derive(Clone)]
pub struct TimestampedVec<T: Copy> {
    data: Vec<T>,
    stamp: Vec<u32>,
    generation: u32,
    default: T,
}

impl<T: Copy> TimestampedVec<T> {
    pub fn new(len: usize, default: T) -> Self {
        TimestampedVec {
            data: vec![default; len],
            stamp: vec![0; len],
            generation: 1,
            default,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Resets every entry to the default.
    #[inline]
    pub fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            // wrapped: stamps may collide, clear eagerly once
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> T {
        if self.stamp[i] == self.generation {
            self.data[i]
        } else {
            self.default
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: T) {
        self.stamp[i] = self.generation;
        self.data[i] = value;
    }
}
