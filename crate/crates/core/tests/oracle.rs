use polyform::polygonal::shifted_triangular;
use polyform::table::{evaluate_form, Decomposition};
use polyform::{
    build_table, decompose, enumerate_values, eval_polygonal, extend_table, polygonal_index_of,
    MGonalForm,
};
use proptest::prelude::*;

// straight from the definition, i128 so overflow can't hide anything
fn p(m: i128, x: i128) -> i128 {
    ((m - 2) * x * x - (m - 4) * x) / 2
}

fn naive_values(m: u32, bound: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut x: i128 = 0;
    loop {
        let a = p(m as i128, x);
        let b = p(m as i128, -x - 1);
        if a > bound as i128 && b > bound as i128 {
            break;
        }
        for y in [a, b] {
            if y <= bound as i128 {
                v.push(y as u64);
            }
        }
        x += 1;
    }
    v.sort_unstable();
    v.dedup();
    v
}

fn naive_set(m: u32, coeffs: &[u64], bound: u64) -> Vec<bool> {
    let vals = naive_values(m, bound);
    let mut hit = vec![false; bound as usize + 1];
    fn go(i: usize, acc: u64, coeffs: &[u64], vals: &[u64], bound: u64, hit: &mut [bool]) {
        if i == coeffs.len() {
            hit[acc as usize] = true;
            return;
        }
        for &v in vals {
            let s = acc + coeffs[i] * v;
            if s > bound {
                break;
            }
            go(i + 1, s, coeffs, vals, bound, hit);
        }
    }
    go(0, 0, coeffs, &vals, bound, &mut hit);
    hit
}

fn assert_matches_naive(m: u32, coeffs: &[u64], bound: u64) {
    let form = MGonalForm::new(m, coeffs.to_vec()).unwrap();
    let t = build_table(&form, bound).unwrap();
    let want = naive_set(m, coeffs, bound);
    for (n, &w) in want.iter().enumerate() {
        assert_eq!(t.represents(n as u64), w, "m={m} {coeffs:?} n={n}");
    }
    let truant = want.iter().skip(1).position(|&b| !b).map(|i| i as u64 + 1);
    assert_eq!(t.truant().truant(), truant, "m={m} {coeffs:?}");
}

#[test]
fn values_match_double_loop() {
    for m in 3..=30 {
        for bound in [0, 1, 7, 100, 1000, 10_000] {
            let got: Vec<u64> = enumerate_values(m, bound).unwrap().iter().collect();
            assert_eq!(got, naive_values(m, bound), "m={m} B={bound}");
        }
    }
}

#[test]
fn decomposition_through_triangular() {
    for m in 3..=40u32 {
        for x in -200i64..=200 {
            let lhs = eval_polygonal(m, x).unwrap() as i128;
            assert_eq!(lhs, p(m as i128, x as i128));
            let rhs = (m as i128 - 2) * shifted_triangular(x) as i128 + x as i128;
            assert_eq!(lhs, rhs, "m={m} x={x}");
        }
    }
    for x in -500i64..=500 {
        assert_eq!(eval_polygonal(3, x).unwrap(), eval_polygonal(3, -x - 1).unwrap());
    }
}

#[test]
fn index_inversion() {
    for m in 3..=20 {
        let vals = enumerate_values(m, 5000).unwrap();
        for n in 0..=5000u64 {
            let idx = polygonal_index_of(m, n).unwrap();
            assert_eq!(idx.is_some(), vals.contains(n), "m={m} n={n}");
            if let Some(x) = idx {
                assert_eq!(eval_polygonal(m, x).unwrap(), n);
            }
        }
    }
}

#[test]
fn small_grid_exhaustive() {
    for m in [3, 4, 5, 8, 12] {
        for coeffs in [vec![1], vec![1, 1], vec![1, 2], vec![1, 1, 3], vec![2, 3, 5]] {
            assert_matches_naive(m, &coeffs, 150);
        }
    }
}

#[test]
fn appending_never_loses_values() {
    let f = MGonalForm::new(7, vec![1, 2]).unwrap();
    let t = build_table(&f, 500).unwrap();
    let mut prev = t.truant().truant().unwrap();
    let mut cur = t;
    for a in [2, 3, 5, 5] {
        let next = extend_table(&cur, a).unwrap();
        assert!(next.bits().is_superset_of(cur.bits()));
        match next.truant().truant() {
            Some(t) => assert!(t >= prev),
            None => break,
        }
        prev = next.truant().truant().unwrap();
        cur = next;
    }
}

#[test]
fn witnesses_evaluate_back() {
    let f = MGonalForm::new(9, vec![1, 1, 2, 3]).unwrap();
    let t = build_table(&f, 300).unwrap();
    for n in 0..=300 {
        match decompose(&f, n, 30).unwrap() {
            Decomposition::Found { witness } => {
                assert!(t.represents(n));
                assert_eq!(evaluate_form(&f, &witness).unwrap(), n);
            }
            Decomposition::Absent => assert!(!t.represents(n)),
            Decomposition::Inconclusive => panic!("radius 30 is ample for n={n}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_table_equals_naive(
        m in 3u32..=12,
        coeffs in prop::collection::vec(1u64..=5, 1..=3),
        bound in 1u64..=200,
    ) {
        let mut coeffs = coeffs;
        coeffs.sort_unstable();
        assert_matches_naive(m, &coeffs, bound);
    }

    #[test]
    fn prop_extend_equals_rebuild(
        m in 3u32..=15,
        coeffs in prop::collection::vec(1u64..=6, 1..=3),
        extra in 6u64..=9,
    ) {
        let mut coeffs = coeffs;
        coeffs.sort_unstable();
        let f = MGonalForm::new(m, coeffs.clone()).unwrap();
        let ext = extend_table(&build_table(&f, 400).unwrap(), extra).unwrap();
        coeffs.push(extra);
        let direct = build_table(&MGonalForm::new(m, coeffs).unwrap(), 400).unwrap();
        prop_assert_eq!(ext.bits(), direct.bits());
    }
}
