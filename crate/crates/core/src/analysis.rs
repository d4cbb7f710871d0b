//! Distribution distances and structural statistics of grown graphs.

use crate::error::{Error, Result};
use crate::growth::MultiGraph;
use crate::model::DegreeDistribution;

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub tv_distance: f64,
    pub ks_statistic: f64,
    /// Smallest and largest degree with mass in either distribution.
    pub common_support: (u32, u32),
    pub per_k_abs_error: Vec<(u32, f64)>,
}

/// Total variation and Kolmogorov-Smirnov distances over the union support.
pub fn compare(d1: &DegreeDistribution, d2: &DegreeDistribution) -> ComparisonReport {
    let lo = d1.support_min().min(d2.support_min());
    let hi = d1.support_max().max(d2.support_max());
    let mut per_k = Vec::with_capacity((hi - lo) as usize + 1);
    let (mut c1, mut c2) = (0.0, 0.0);
    let mut ks: f64 = 0.0;
    let mut tv = 0.0;
    for k in lo..=hi {
        let (p, q) = (d1.prob(k), d2.prob(k));
        let err = (p - q).abs();
        tv += err;
        per_k.push((k, err));
        c1 += p;
        c2 += q;
        ks = ks.max((c1 - c2).abs());
    }
    ComparisonReport {
        tv_distance: (0.5 * tv).min(1.0),
        ks_statistic: ks.min(1.0),
        common_support: (lo, hi),
        per_k_abs_error: per_k,
    }
}

/// Number of distinct vertex triples that are pairwise adjacent, ignoring
/// edge multiplicity.
pub fn triangle_count(g: &MultiGraph) -> u64 {
    let adj = g.simple_adjacency();
    let rank = |v: u32| (adj[v as usize].len(), v);
    // Orient every edge towards the higher-ranked end; each triangle is then
    // found exactly once from its lowest-ranked vertex.
    let out: Vec<Vec<u32>> = adj
        .iter()
        .enumerate()
        .map(|(u, nbrs)| nbrs.iter().copied().filter(|&v| rank(v) > rank(u as u32)).collect())
        .collect();
    let mut mark = vec![false; adj.len()];
    let mut count = 0u64;
    for u in 0..adj.len() {
        for &v in &out[u] {
            mark[v as usize] = true;
        }
        for &v in &out[u] {
            count += out[v as usize].iter().filter(|&&w| mark[w as usize]).count() as u64;
        }
        for &v in &out[u] {
            mark[v as usize] = false;
        }
    }
    count
}

/// `3 * triangles / wedges` on the simple projection.
pub fn global_clustering(g: &MultiGraph) -> Result<f64> {
    let wedges: u64 = g
        .simple_adjacency()
        .iter()
        .map(|nbrs| {
            let d = nbrs.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if wedges == 0 {
        return Err(Error::NoWedges);
    }
    Ok(3.0 * triangle_count(g) as f64 / wedges as f64)
}

/// Least-squares slope of `ln d_k` against `ln k` over `k_lo..=k_hi`,
/// using only degrees with positive mass.
pub fn loglog_slope(d: &DegreeDistribution, k_lo: u32, k_hi: u32) -> Result<f64> {
    let pts: Vec<(f64, f64)> = (k_lo.max(1)..=k_hi)
        .filter_map(|k| {
            let p = d.prob(k);
            (p > 0.0).then(|| ((k as f64).ln(), p.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints(pts.len()));
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DegreeDistribution as D;
    use proptest::prelude::*;

    fn brute_triangles(g: &MultiGraph) -> u64 {
        let n = g.vertex_count();
        let mut a = vec![vec![false; n]; n];
        for &(u, v) in g.edges() {
            a[u as usize][v as usize] = true;
            a[v as usize][u as usize] = true;
        }
        let mut t = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if a[i][j] && a[j][k] && a[i][k] {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    #[allow(clippy::needless_range_loop)]
    fn brute_wedges(g: &MultiGraph) -> u64 {
        // Paths u - c - w with u < w, enumerated over all triples.
        let n = g.vertex_count();
        let mut a = vec![vec![false; n]; n];
        for &(u, v) in g.edges() {
            a[u as usize][v as usize] = true;
            a[v as usize][u as usize] = true;
        }
        let mut w = 0;
        for c in 0..n {
            for u in 0..n {
                for x in u + 1..n {
                    if u != c && x != c && a[c][u] && a[c][x] {
                        w += 1;
                    }
                }
            }
        }
        w
    }

    #[test]
    fn compare_examples() {
        let d = D::new([(1, 0.2), (2, 0.3), (5, 0.5)]).unwrap();
        let r = compare(&d, &d);
        assert_eq!((r.tv_distance, r.ks_statistic), (0.0, 0.0));
        let r = compare(&D::point(0), &D::point(1));
        assert_eq!((r.tv_distance, r.ks_statistic), (1.0, 1.0));
        assert_eq!(r.common_support, (0, 1));
        let r = compare(&D::new([(0, 0.5), (1, 0.5)]).unwrap(), &D::point(0));
        assert_eq!(r.tv_distance, 0.5);
        assert_eq!(r.per_k_abs_error, vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_count(&MultiGraph::complete(4).unwrap()), 4);
        assert_eq!(triangle_count(&MultiGraph::complete(5).unwrap()), 10);
        assert_eq!(triangle_count(&MultiGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap()), 0);
        let doubled = MultiGraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0), (0, 2)]).unwrap();
        assert_eq!(triangle_count(&doubled), 1);
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(global_clustering(&MultiGraph::complete(6).unwrap()).unwrap(), 1.0);
        let star = MultiGraph::from_edges(5, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(global_clustering(&star).unwrap(), 0.0);
        let single = MultiGraph::from_edges(2, [(0, 1), (0, 1)]).unwrap();
        assert!(matches!(global_clustering(&single), Err(Error::NoWedges)));

        let mut edges: Vec<(u32, u32)> = MultiGraph::complete(4).unwrap().edges().to_vec();
        edges.push((0, 4));
        let g = MultiGraph::from_edges(5, edges).unwrap();
        let expected = 3.0 * brute_triangles(&g) as f64 / brute_wedges(&g) as f64;
        assert_eq!(brute_wedges(&g), 15);
        assert!((global_clustering(&g).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.8).abs() < 1e-15);
    }

    #[test]
    fn slope_examples() {
        let pairs: Vec<(u32, f64)> = (10..=100).map(|k| (k, (k as f64).powi(-3))).collect();
        let d = D::new_renormalized(pairs, 1.0).unwrap();
        assert!((loglog_slope(&d, 10, 100).unwrap() + 3.0).abs() < 1e-9);
        let flat = D::new_renormalized((1..=10).map(|k| (k, 0.1)), 1e-6).unwrap();
        assert!(loglog_slope(&flat, 1, 10).unwrap().abs() < 1e-12);
        assert!(matches!(loglog_slope(&flat, 9, 20), Err(Error::InsufficientPoints(2))));
    }

    fn arb_graph() -> impl Strategy<Value = MultiGraph> {
        (2u32..40).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..(3 * n as usize))
                .prop_map(move |pairs| MultiGraph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap())
        })
    }

    fn arb_dist() -> impl Strategy<Value = D> {
        prop::collection::vec(0.0f64..1.0, 1..12).prop_filter_map("all zero", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6)
                .then(|| D::new_renormalized(w.iter().enumerate().map(|(k, &x)| (k as u32, x / s)), 1e-6).unwrap())
        })
    }

    proptest! {
        #[test]
        fn triangles_match_enumeration(g in arb_graph()) {
            prop_assert_eq!(triangle_count(&g), brute_triangles(&g));
        }

        #[test]
        fn distances_are_metrics(a in arb_dist(), b in arb_dist(), c in arb_dist()) {
            let ab = compare(&a, &b);
            let ba = compare(&b, &a);
            prop_assert!((ab.tv_distance - ba.tv_distance).abs() < 1e-15);
            prop_assert!((ab.ks_statistic - ba.ks_statistic).abs() < 1e-15);
            prop_assert!(ab.tv_distance >= 0.0 && ab.ks_statistic >= 0.0);
            prop_assert!(ab.ks_statistic <= ab.tv_distance + 1e-12);
            let ac = compare(&a, &c);
            let cb = compare(&c, &b);
            prop_assert!(ab.tv_distance <= ac.tv_distance + cb.tv_distance + 1e-12);
            prop_assert!(ab.ks_statistic <= ac.ks_statistic + cb.ks_statistic + 1e-12);
        }
    }
}
