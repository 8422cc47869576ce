//! List decoding with copy-on-write path storage.
//!
//! Each path holds one handle per tree depth into shared array pools. Forking
//! a path only bumps reference counts; a path that writes to a shared array
//! gets a fresh one first. Every write covers the whole array, so fresh
//! arrays never need the old contents copied in.

use std::cmp::Ordering;

use crate::bits::{transform_in_place, BitBlock};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::kernel::{bit_node, check_node, hard, penalty};
use super::{DecodeCandidate, FrozenPlan, LlrVector};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Pool<E> {
    len: usize,
    data: Vec<Vec<E>>,
    refs: Vec<u32>,
    free: Vec<usize>,
}

impl<E: Copy + Default> Pool<E> {
    fn new(len: usize) -> Self {
        Pool { len, data: Vec::new(), refs: Vec::new(), free: Vec::new() }
    }

    fn reset(&mut self) {
        self.refs.fill(0);
        self.free.clear();
        self.free.extend((0..self.data.len()).rev());
    }

    fn alloc(&mut self) -> usize {
        if let Some(h) = self.free.pop() {
            self.refs[h] = 1;
            h
        } else {
            self.data.push(vec![E::default(); self.len]);
            self.refs.push(1);
            self.data.len() - 1
        }
    }

    fn retain(&mut self, h: usize) {
        if h != NONE {
            self.refs[h] += 1;
        }
    }

    fn release(&mut self, h: usize) {
        if h != NONE {
            self.refs[h] -= 1;
            if self.refs[h] == 0 {
                self.free.push(h);
            }
        }
    }

    /// Handle that the caller may overwrite in full.
    fn writable(&mut self, h: usize) -> usize {
        if h != NONE && self.refs[h] == 1 {
            return h;
        }
        self.release(h);
        self.alloc()
    }

    fn get(&self, h: usize) -> &[E] {
        &self.data[h]
    }

    fn get_mut(&mut self, h: usize) -> &mut [E] {
        &mut self.data[h]
    }
}

#[derive(Clone, Debug)]
struct Path<T> {
    metric: T,
    alpha: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Fork<T> {
    metric: T,
    /// `2·parent + (0 for the hard decision, 1 otherwise)`; breaks metric ties.
    key: usize,
    parent: usize,
    bit: u8,
}

/// Reusable SCL decoder for block size `n` and list size `L`.
#[derive(Clone, Debug)]
pub struct ListDecoder<T> {
    n: usize,
    m: usize,
    list_size: usize,
    alpha: Vec<Pool<T>>,
    left: Vec<Pool<u8>>,
    right: Vec<Pool<u8>>,
    paths: Vec<Path<T>>,
    forks: Vec<Fork<T>>,
    scratch: Vec<u8>,
}

impl<T: Scalar> ListDecoder<T> {
    pub fn new(n: usize, list_size: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if list_size < 1 {
            return Err(Error::InvalidParameter("list size must be at least 1".into()));
        }
        let m = n.trailing_zeros() as usize;
        Ok(ListDecoder {
            n,
            m,
            list_size,
            alpha: (0..=m).map(|d| Pool::new(n >> d)).collect(),
            left: (0..=m).map(|d| Pool::new(n >> d)).collect(),
            right: (0..=m).map(|d| Pool::new(n >> d)).collect(),
            paths: Vec::with_capacity(2 * list_size),
            forks: Vec::with_capacity(2 * list_size),
            scratch: vec![0; n],
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    /// Decodes one frame; candidates come back sorted by metric, best first.
    pub fn decode(
        &mut self,
        llr: &LlrVector<T>,
        plan: &FrozenPlan,
    ) -> Result<Vec<DecodeCandidate<T>>> {
        for len in [llr.len(), plan.len()] {
            if len != self.n {
                return Err(Error::LengthMismatch { expected: self.n, actual: len });
            }
        }
        self.alpha.iter_mut().for_each(Pool::reset);
        self.left.iter_mut().for_each(Pool::reset);
        self.right.iter_mut().for_each(Pool::reset);
        self.paths.clear();

        let root = self.alpha[0].alloc();
        self.alpha[0].get_mut(root).copy_from_slice(llr.as_slice());
        let mut alpha = vec![NONE; self.m + 1];
        alpha[0] = root;
        self.paths.push(Path {
            metric: T::zero(),
            alpha,
            left: vec![NONE; self.m + 1],
            right: vec![NONE; self.m + 1],
        });

        self.node(plan, 0, 0);

        let mut order: Vec<usize> = (0..self.paths.len()).collect();
        order.sort_by(|&a, &b| cmp_metric(self.paths[a].metric, self.paths[b].metric));
        Ok(order
            .into_iter()
            .map(|p| {
                let path = &self.paths[p];
                let mut u = self.left[0].get(path.left[0]).to_vec();
                transform_in_place(&mut u);
                DecodeCandidate {
                    transform_word: BitBlock::new(u).expect("binary"),
                    metric: path.metric,
                    crc_ok: None,
                }
            })
            .collect())
    }

    /// Handle for the output slot of node `j` at depth `d` of path `p`.
    fn output_slot(&mut self, p: usize, d: usize, j: usize) -> usize {
        let path = &mut self.paths[p];
        if j % 2 == 0 {
            let h = self.left[d].writable(path.left[d]);
            path.left[d] = h;
            h
        } else {
            let h = self.right[d].writable(path.right[d]);
            path.right[d] = h;
            h
        }
    }

    fn node(&mut self, plan: &FrozenPlan, d: usize, j: usize) {
        if plan.is_rate0(d, j) {
            self.fixed_subtree(plan, d, j);
            return;
        }
        if d == self.m {
            self.fork(j);
            return;
        }
        let half = (self.n >> d) / 2;

        for p in 0..self.paths.len() {
            let (lo, hi) = self.alpha.split_at_mut(d + 1);
            let path = &mut self.paths[p];
            let dst = hi[0].writable(path.alpha[d + 1]);
            path.alpha[d + 1] = dst;
            let src = lo[d].get(path.alpha[d]);
            let out = hi[0].get_mut(dst);
            for i in 0..half {
                out[i] = check_node(src[i], src[i + half]);
            }
        }
        self.node(plan, d + 1, 2 * j);

        for p in 0..self.paths.len() {
            let (lo, hi) = self.alpha.split_at_mut(d + 1);
            let path = &mut self.paths[p];
            let dst = hi[0].writable(path.alpha[d + 1]);
            path.alpha[d + 1] = dst;
            let src = lo[d].get(path.alpha[d]);
            let bits = self.left[d + 1].get(path.left[d + 1]);
            let out = hi[0].get_mut(dst);
            for i in 0..half {
                out[i] = bit_node(src[i], src[i + half], bits[i]);
            }
        }
        self.node(plan, d + 1, 2 * j + 1);

        for p in 0..self.paths.len() {
            let slot = self.output_slot(p, d, j);
            let path = &self.paths[p];
            let (l_lo, l_hi) = self.left.split_at_mut(d + 1);
            let (r_lo, r_hi) = self.right.split_at_mut(d + 1);
            let lb = l_hi[0].get(path.left[d + 1]);
            let rb = r_hi[0].get(path.right[d + 1]);
            let out = if j % 2 == 0 { l_lo[d].get_mut(slot) } else { r_lo[d].get_mut(slot) };
            for i in 0..half {
                out[i] = lb[i] ^ rb[i];
                out[i + half] = rb[i];
            }
        }
    }

    fn fixed_subtree(&mut self, plan: &FrozenPlan, d: usize, j: usize) {
        let len = self.n >> d;
        let mut code = std::mem::take(&mut self.scratch);
        plan.subtree_codeword(d, j, &mut code[..len]);
        for p in 0..self.paths.len() {
            let llrs = self.alpha[d].get(self.paths[p].alpha[d]);
            let mut charge = T::zero();
            for (&a, &b) in llrs.iter().zip(&code[..len]) {
                charge += penalty(a, b);
            }
            self.paths[p].metric += charge;
            let slot = self.output_slot(p, d, j);
            let pool = if j % 2 == 0 { &mut self.left[d] } else { &mut self.right[d] };
            pool.get_mut(slot).copy_from_slice(&code[..len]);
        }
        self.scratch = code;
    }

    /// Information leaf `j`: every path forks on both bit values and the
    /// `L` most probable children survive.
    fn fork(&mut self, j: usize) {
        let m = self.m;
        self.forks.clear();
        for (p, path) in self.paths.iter().enumerate() {
            let llr = self.alpha[m].get(path.alpha[m])[0];
            let h = hard(llr);
            for (child, bit) in [(0, h), (1, h ^ 1)] {
                self.forks.push(Fork {
                    metric: path.metric + penalty(llr, bit),
                    key: 2 * p + child,
                    parent: p,
                    bit,
                });
            }
        }
        self.forks
            .sort_by(|a, b| cmp_metric(a.metric, b.metric).then(a.key.cmp(&b.key)));
        self.forks.truncate(self.list_size);

        let mut uses = vec![0u8; self.paths.len()];
        for f in &self.forks {
            uses[f.parent] += 1;
        }
        let mut parents: Vec<Option<Path<T>>> = self.paths.drain(..).map(Some).collect();
        for (p, slot) in parents.iter_mut().enumerate() {
            if uses[p] == 0 {
                let path = slot.take().expect("unused parent present");
                self.release_path(&path);
            }
        }
        let forks = std::mem::take(&mut self.forks);
        for f in &forks {
            let mut path = if uses[f.parent] == 2 {
                uses[f.parent] -= 1;
                let original = parents[f.parent].as_ref().expect("parent present");
                self.retain_path(original);
                original.clone()
            } else {
                parents[f.parent].take().expect("parent present")
            };
            path.metric = f.metric;
            self.paths.push(path);
            let p = self.paths.len() - 1;
            let slot = self.output_slot(p, m, j);
            let pool = if j % 2 == 0 { &mut self.left[m] } else { &mut self.right[m] };
            pool.get_mut(slot)[0] = f.bit;
        }
        self.forks = forks;
    }

    fn retain_path(&mut self, path: &Path<T>) {
        for d in 0..=self.m {
            self.alpha[d].retain(path.alpha[d]);
            self.left[d].retain(path.left[d]);
            self.right[d].retain(path.right[d]);
        }
    }

    fn release_path(&mut self, path: &Path<T>) {
        for d in 0..=self.m {
            self.alpha[d].release(path.alpha[d]);
            self.left[d].release(path.left[d]);
            self.right[d].release(path.right[d]);
        }
    }
}

fn cmp_metric<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}
