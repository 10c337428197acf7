//! Addressable binary min-heap over dense item indices.

use std::cmp::Ordering;

const ABSENT: u32 = u32::MAX;

/// Queue key: current crowding distance, then the random tie-break key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueKey {
    pub cdis: f64,
    pub tie: f64,
}

impl QueueKey {
    /// Below every legal key (crowding distances are non-negative).
    pub const SENTINEL: QueueKey = QueueKey {
        cdis: -1.0,
        tie: -1.0,
    };

    pub fn new(cdis: f64, tie: f64) -> Self {
        Self { cdis, tie }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.cdis
            .total_cmp(&other.cdis)
            .then(self.tie.total_cmp(&other.tie))
    }
}

/// Min-heap of items `0..capacity` with a position table, so keys can be
/// changed in `O(log n)` given only the item.
#[derive(Debug, Clone)]
pub struct IndexedMinHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
    keys: Vec<QueueKey>,
    ops: u64,
}

impl IndexedMinHeap {
    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity < ABSENT as usize);
        Self {
            heap: Vec::with_capacity(capacity),
            pos: vec![ABSENT; capacity],
            keys: vec![QueueKey::SENTINEL; capacity],
            ops: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.pos[item] != ABSENT
    }

    pub fn key(&self, item: usize) -> Option<QueueKey> {
        self.contains(item).then(|| self.keys[item])
    }

    /// Number of push, pop and decrease-key operations performed so far.
    pub fn operations(&self) -> u64 {
        self.ops
    }

    pub fn push(&mut self, item: usize, key: QueueKey) {
        assert!(!self.contains(item), "item {item} already queued");
        self.ops += 1;
        self.keys[item] = key;
        self.pos[item] = self.heap.len() as u32;
        self.heap.push(item as u32);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn peek(&self) -> Option<(usize, QueueKey)> {
        self.heap
            .first()
            .map(|&i| (i as usize, self.keys[i as usize]))
    }

    pub fn pop_min(&mut self) -> Option<(usize, QueueKey)> {
        let top = *self.heap.first()? as usize;
        self.ops += 1;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0);
        }
        Some((top, self.keys[top]))
    }

    pub fn decrease_key(&mut self, item: usize, key: QueueKey) {
        assert!(self.contains(item), "item {item} not queued");
        debug_assert!(key.total_cmp(&self.keys[item]) != Ordering::Greater);
        self.ops += 1;
        self.keys[item] = key;
        self.sift_up(self.pos[item] as usize);
    }

    /// Moves `item` to `key`. A larger key is applied by decreasing to
    /// [`QueueKey::SENTINEL`], extracting the item and inserting it again.
    pub fn update_key(&mut self, item: usize, key: QueueKey) {
        match key.total_cmp(&self.keys[item]) {
            Ordering::Equal => {}
            Ordering::Less => self.decrease_key(item, key),
            Ordering::Greater => {
                self.decrease_key(item, QueueKey::SENTINEL);
                let (popped, _) = self.pop_min().expect("item is queued");
                debug_assert_eq!(popped, item);
                self.push(item, key);
            }
        }
    }

    fn less(&self, a: u32, b: u32) -> bool {
        self.keys[a as usize]
            .total_cmp(&self.keys[b as usize])
            .then(a.cmp(&b))
            == Ordering::Less
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(self.heap[i], self.heap[parent]) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && self.less(self.heap[l], self.heap[m]) {
                m = l;
            }
            if r < n && self.less(self.heap[r], self.heap[m]) {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a] as usize] = a as u32;
        self.pos[self.heap[b] as usize] = b as u32;
    }
}
