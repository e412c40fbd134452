/// Binary indexed tree over non-negative integer weights.
#[derive(Clone, Debug)]
pub(crate) struct Fenwick {
    tree: Vec<u64>,
    total: u64,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        Self { tree: vec![0; len + 1], total: 0 }
    }

    pub fn from_weights(weights: impl IntoIterator<Item = u64>) -> Self {
        let mut tree = vec![0u64];
        tree.extend(weights);
        let len = tree.len() - 1;
        let total = tree.iter().sum();
        for i in 1..=len {
            let j = i + (i & i.wrapping_neg());
            if j <= len {
                tree[j] += tree[i];
            }
        }
        Self { tree, total }
    }

    pub fn add(&mut self, idx: usize, delta: i64) {
        self.total = (self.total as i64 + delta) as u64;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i64 + delta) as u64;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of weights at positions `0..end`.
    pub fn prefix(&self, end: usize) -> u64 {
        let mut s = 0;
        let mut i = end;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Smallest position `p` with `prefix(p + 1) > r`; requires `r < total()`.
    pub fn find(&self, mut r: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_find_agree_with_scan() {
        let w = [3u64, 0, 2, 5, 0, 1, 4];
        let f = Fenwick::from_weights(w.iter().copied());
        assert_eq!(f.total(), 15);
        for end in 0..=w.len() {
            assert_eq!(f.prefix(end), w[..end].iter().sum::<u64>());
        }
        for r in 0..15 {
            let mut acc = 0;
            let want = w.iter().position(|&x| { acc += x; acc > r }).unwrap();
            assert_eq!(f.find(r), want);
        }
    }

    #[test]
    fn updates_track_weights() {
        let mut f = Fenwick::new(5);
        f.add(2, 4);
        f.add(4, 1);
        f.add(2, -3);
        assert_eq!(f.total(), 2);
        assert_eq!(f.find(0), 2);
        assert_eq!(f.find(1), 4);
    }
}
