use std::sync::Arc;

use k3lines::lines::LineUniverse;

/// Every non-empty geometric line set, by depth-first search over dual pairs
/// with products and root-freeness checked on the way down.
pub fn oracle_geometric(u: &Arc<LineUniverse>) -> Vec<Vec<usize>> {
    let pairs: Vec<usize> = (0..u.len()).filter(|&i| i < u.dual[i]).collect();
    let mut out = Vec::new();
    fn rec(u: &Arc<LineUniverse>, pairs: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for a in start..pairs.len() {
            let (l, m) = (pairs[a], u.dual[pairs[a]]);
            let ok = cur.iter().all(|&x| matches!(u.product(l, x), 1 | 2) && matches!(u.product(m, x), 1 | 2));
            if !ok {
                continue;
            }
            cur.extend([l, m]);
            let s = u.set(cur.iter().copied());
            if !s.has_perp_root(s.span()) {
                if s.is_complete() && s.is_geometric().unwrap() {
                    out.push(s.members.clone());
                }
                rec(u, pairs, a + 1, cur, out);
            }
            cur.truncate(cur.len() - 2);
        }
    }
    rec(u, &pairs, 0, &mut Vec::new(), &mut out);
    out
}
