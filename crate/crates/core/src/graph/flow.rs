//! Unit-capacity max-flow on the node-split digraph.
//!
//! Node `w` becomes `w_in = 2w` and `w_out = 2w + 1` joined by a
//! capacity-1 arc, and each edge `a -> b` becomes `a_out -> b_in`, also
//! with capacity 1. Flow from `u_out` to `v_in` then counts internally
//! node-disjoint `u -> v` paths, with a direct `u -> v` edge contributing
//! exactly one path.

#[derive(Clone)]
pub(crate) struct SplitNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    next: Vec<usize>,
    base_cap: Vec<u8>,
    cap: Vec<u8>,
    level: Vec<i32>,
    cursor: Vec<usize>,
    queue: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl SplitNetwork {
    pub(crate) fn new(out: &[Vec<usize>]) -> Self {
        let nodes = out.len() * 2;
        let mut net = SplitNetwork {
            head: vec![NIL; nodes],
            to: Vec::new(),
            next: Vec::new(),
            base_cap: Vec::new(),
            cap: Vec::new(),
            level: vec![-1; nodes],
            cursor: vec![NIL; nodes],
            queue: Vec::with_capacity(nodes),
        };
        for w in 0..out.len() {
            net.add_arc(2 * w, 2 * w + 1);
        }
        for (a, targets) in out.iter().enumerate() {
            for &b in targets {
                net.add_arc(2 * a + 1, 2 * b);
            }
        }
        net.cap = net.base_cap.clone();
        net
    }

    fn add_arc(&mut self, from: usize, to: usize) {
        for (f, t, c) in [(from, to, 1u8), (to, from, 0u8)] {
            self.to.push(t);
            self.base_cap.push(c);
            self.next.push(self.head[f]);
            self.head[f] = self.to.len() - 1;
        }
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.queue.clear();
        self.level[source] = 0;
        self.queue.push(source);
        let mut at = 0;
        while at < self.queue.len() {
            let x = self.queue[at];
            at += 1;
            let mut e = self.head[x];
            while e != NIL {
                let y = self.to[e];
                if self.cap[e] > 0 && self.level[y] < 0 {
                    self.level[y] = self.level[x] + 1;
                    self.queue.push(y);
                }
                e = self.next[e];
            }
        }
        self.level[sink] >= 0
    }

    fn augment(&mut self, x: usize, sink: usize) -> bool {
        if x == sink {
            return true;
        }
        while self.cursor[x] != NIL {
            let e = self.cursor[x];
            let y = self.to[e];
            if self.cap[e] > 0 && self.level[y] == self.level[x] + 1 && self.augment(y, sink) {
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                return true;
            }
            self.cursor[x] = self.next[e];
        }
        false
    }

    /// Number of internally node-disjoint `u -> v` paths, never exceeding
    /// `limit`.
    pub(crate) fn disjoint_paths(&mut self, u: usize, v: usize, limit: usize) -> usize {
        self.cap.copy_from_slice(&self.base_cap);
        let (source, sink) = (2 * u + 1, 2 * v);
        let mut flow = 0;
        while flow < limit && self.bfs(source, sink) {
            self.cursor.copy_from_slice(&self.head);
            while flow < limit && self.augment(source, sink) {
                flow += 1;
            }
        }
        flow
    }
}
