//! Small combinatorial helpers.

/// All tuples `(i_0, .., i_{k-1})` with `i_j < sizes[j]`, in lexicographic
/// order; a single empty tuple when `sizes` is empty.
pub fn index_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s.max(1));
        for t in &out {
            for i in 0..s {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        assert_eq!(index_tuples(&[]), vec![Vec::<usize>::new()]);
        assert_eq!(index_tuples(&[2, 3]).len(), 6);
        assert!(index_tuples(&[2, 0]).is_empty());
    }
}
