//! Live-element accounting for Verifier state.
//!
//! Every piece of Verifier state is allocated through a [`SpaceMeter`]; the
//! meter records the peak number of simultaneously live elements (field
//! elements, vertex ids and counters alike).

use std::cell::Cell;
use std::ops::{Deref, DerefMut};
use std::rc::Rc;

#[derive(Debug, Default)]
struct MeterState {
    live: Cell<usize>,
    peak: Cell<usize>,
    limit: Option<usize>,
    violated: Cell<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct SpaceMeter {
    inner: Rc<MeterState>,
}

impl SpaceMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// A meter that flags any peak above `limit`.
    pub fn with_limit(limit: usize) -> Self {
        Self { inner: Rc::new(MeterState { limit: Some(limit), ..Default::default() }) }
    }

    pub fn alloc(&self, k: usize) {
        let live = self.inner.live.get() + k;
        self.inner.live.set(live);
        if live > self.inner.peak.get() {
            self.inner.peak.set(live);
            if self.inner.limit.is_some_and(|l| live > l) {
                self.inner.violated.set(true);
            }
        }
    }

    pub fn free(&self, k: usize) {
        let live = self.inner.live.get();
        debug_assert!(live >= k, "freeing more than allocated");
        self.inner.live.set(live.saturating_sub(k));
    }

    pub fn live(&self) -> usize {
        self.inner.live.get()
    }

    pub fn peak(&self) -> usize {
        self.inner.peak.get()
    }

    pub fn limit(&self) -> Option<usize> {
        self.inner.limit
    }

    pub fn violated(&self) -> bool {
        self.inner.violated.get()
    }

    /// Reserves `k` elements of scalar state until the guard drops.
    pub fn reserve(&self, k: usize) -> Reservation {
        self.alloc(k);
        Reservation { meter: self.clone(), k }
    }

    pub fn vec<T: Clone>(&self, len: usize, fill: T) -> TrackedVec<T> {
        TrackedVec::from_vec(self, vec![fill; len])
    }
}

#[derive(Debug)]
pub struct Reservation {
    meter: SpaceMeter,
    k: usize,
}

impl Reservation {
    pub fn size(&self) -> usize {
        self.k
    }

    pub fn resize(&mut self, k: usize) {
        if k > self.k {
            self.meter.alloc(k - self.k);
        } else {
            self.meter.free(self.k - k);
        }
        self.k = k;
    }
}

impl Drop for Reservation {
    fn drop(&mut self) {
        self.meter.free(self.k);
    }
}

/// A vector whose capacity in elements is charged to a meter.
#[derive(Debug)]
pub struct TrackedVec<T> {
    data: Vec<T>,
    meter: SpaceMeter,
}

impl<T> TrackedVec<T> {
    pub fn from_vec(meter: &SpaceMeter, data: Vec<T>) -> Self {
        meter.alloc(data.len());
        Self { data, meter: meter.clone() }
    }

    pub fn new(meter: &SpaceMeter) -> Self {
        Self { data: Vec::new(), meter: meter.clone() }
    }

    pub fn push(&mut self, x: T) {
        self.meter.alloc(1);
        self.data.push(x);
    }

    pub fn pop(&mut self) -> Option<T> {
        let x = self.data.pop();
        if x.is_some() {
            self.meter.free(1);
        }
        x
    }

    pub fn clear(&mut self) {
        self.meter.free(self.data.len());
        self.data.clear();
    }
}

impl<T> Deref for TrackedVec<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.data
    }
}

impl<T> DerefMut for TrackedVec<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
}

impl<T> Drop for TrackedVec<T> {
    fn drop(&mut self) {
        self.meter.free(self.data.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_tracks_simultaneous_state() {
        let m = SpaceMeter::with_limit(10);
        {
            let a = m.vec(4, 0u64);
            let _r = m.reserve(3);
            assert_eq!(m.live(), 7);
            drop(a);
            let mut b = m.vec(2, 0u64);
            b.push(1);
            assert_eq!(m.live(), 6);
        }
        assert_eq!(m.live(), 0);
        assert_eq!(m.peak(), 7);
        assert!(!m.violated());
        let _big = m.vec(11, 0u8);
        assert!(m.violated());
    }
}
