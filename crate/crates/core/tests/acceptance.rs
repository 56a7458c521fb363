//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use polyform::identity::{builtin_sets, recompute_s_sets, verify_builtin_sets, Solvability};
use polyform::lab::{
    check_ell, check_leaf_families, check_multiples_lemma, check_node_proposition,
    check_power2_forms, pow2_form, pow2_params, short_pow2_forms, Verdict,
};
use polyform::{build_table, stabilize_gamma, MGonalForm, SearchConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_identities() -> Result<String, String> {
    let reports = verify_builtin_sets();
    let bad: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.clone()).collect();
    ensure(bad.is_empty(), || format!("failing sets: {bad:?}"))?;
    let sizes: BTreeMap<&str, usize> =
        builtin_sets().iter().map(|s| (s.id, s.claims.len())).collect();
    for (id, n) in [("122", 6), ("123", 7), ("124", 8), ("115", 8), ("TT", 6)] {
        ensure(sizes.get(id) == Some(&n), || format!("set {id} has {:?} claims, want {n}", sizes.get(id)))?;
    }
    let r115 = reports.iter().find(|r| r.id == "115").unwrap();
    ensure(r115.residue.as_ref().is_some_and(|r| r.complete), || "115 residues incomplete".into())?;
    ensure(sizes.contains_key("11") && sizes.contains_key("116,3"), || "missing set".into())?;
    let claims: usize = reports.iter().map(|r| r.checks.len()).sum();
    Ok(format!("{} sets, {claims} identities exact", reports.len()))
}

fn c2_s_table() -> Result<String, String> {
    let s = recompute_s_sets().map_err(|e| e.to_string())?;
    ensure(s.grid.cells().len() == 161 * 8, || "grid size".into())?;
    let pos = s.grid.class_set(Solvability::PosOnly);
    let neg = s.grid.class_set(Solvability::NegOnly);
    ensure(pos.contains(&(116, 3)), || "(116,3) not pos-only".into())?;
    ensure(neg.contains(&(1, 7)), || "(1,7) not neg-only".into())?;
    let unexplained: Vec<String> = s.diff.unexplained().map(|d| d.key()).collect();
    ensure(unexplained.is_empty(), || format!("undocumented diff: {unexplained:?}"))?;
    Ok(format!(
        "{} pos-only, {} neg-only, {} diff entries all documented",
        pos.len(),
        neg.len(),
        s.diff.entries.len()
    ))
}

fn c3_stability() -> Result<String, String> {
    let mut parts = Vec::new();
    for (m, want) in [(3u32, 8u64), (4, 15)] {
        let s = stabilize_gamma(m, 64, 2, &SearchConfig::with_bound(64)).map_err(|e| e.to_string())?;
        ensure(s.converged, || format!("m={m} did not settle within two doublings"))?;
        ensure(s.report.gamma_b == want, || format!("m={m} gamma_B {} want {want}", s.report.gamma_b))?;
        ensure(s.history.iter().all(|r| r.gamma_b == want), || {
            format!("m={m} gamma_B moved: {:?}", s.history.iter().map(|r| r.gamma_b).collect::<Vec<_>>())
        })?;
        parts.push(format!("m={m} gamma_B={want} at B={}", s.bound));
    }
    Ok(parts.join(", "))
}

fn c4_ell() -> Result<String, String> {
    let ms: Vec<u32> = (3..=30).collect();
    let r = check_ell(&ms, 100_000).map_err(|e| e.to_string())?;
    ensure(r.all_match(), || r.summary())?;
    Ok("m=3..30 match at B=1e5".into())
}

fn c5_short_form_truants() -> Result<String, String> {
    let mut wrong = Vec::new();
    let mut total = 0;
    for m in [35u32, 34, 33, 32, 31] {
        let forms = short_pow2_forms(m).ok_or_else(|| format!("no listing for m={m}"))?;
        for (coeffs, stated) in forms {
            total += 1;
            let f = MGonalForm::new(m, coeffs.clone()).map_err(|e| e.to_string())?;
            let t = build_table(&f, 10 * stated).map_err(|e| e.to_string())?;
            let got = t.truant().truant();
            if got != Some(stated) {
                wrong.push(format!(
                    "m={m} [{}] truant {} stated {stated} (stated value {})",
                    f.coeffs_string(),
                    got.map_or("none".into(), |x| x.to_string()),
                    if t.represents(stated) { "represented" } else { "missed" }
                ));
            }
        }
    }
    ensure(wrong.is_empty(), || format!("{}/{total} differ: {}", wrong.len(), wrong.join("; ")))?;
    Ok(format!("{total} forms exact"))
}

fn c6_power_two() -> Result<String, String> {
    let bound = 1_000_000;
    let mut findings = Vec::new();
    for m in [30u32, 60, 100, 31, 32, 33, 34, 35] {
        let (n, s) = pow2_params(m).unwrap();
        let coeffs = if s >= 2 { pow2_form(n) } else { pow2_form(n + 1) };
        let f = MGonalForm::new(m, coeffs).map_err(|e| e.to_string())?;
        let at_b = build_table(&f, bound).map_err(|e| e.to_string())?.truant().truant();
        let at_2b = build_table(&f, 2 * bound).map_err(|e| e.to_string())?.truant().truant();
        ensure(at_b == at_2b, || format!("m={m} verdict moved under doubling: {at_b:?} -> {at_2b:?}"))?;
        if let Some(t) = at_b {
            findings.push(format!("m={m} [{}] truant {t}", f.coeffs_string()));
        }
    }
    let r = check_power2_forms(&[30, 60, 100, 31, 32, 33, 34, 35], 10_000).map_err(|e| e.to_string())?;
    ensure(r.per_m.iter().flat_map(|v| &v.forms).all(|o| o.stable != Some(false)), || {
        "unstable universality verdict".into()
    })?;
    Ok(if findings.is_empty() {
        "all B-universal, stable at 2B".into()
    } else {
        format!("verdicts stable at 2B; not universal: {}", findings.join("; "))
    })
}

fn c7_multiples() -> Result<String, String> {
    let mut cells = 0;
    for a in 1..=12 {
        for m in 3..=30 {
            let o = check_multiples_lemma(a, m, 20).map_err(|e| e.to_string())?;
            ensure(o.passed, || format!("A={a} m={m} misses k={:?}", o.missed))?;
            cells += 1;
        }
    }
    Ok(format!("{cells} (A, m) cells, k=1..20"))
}

fn c8_node_property() -> Result<String, String> {
    let mut parts = Vec::new();
    for m in [5u32, 8, 10] {
        let s = stabilize_gamma(m, 256, 4, &SearchConfig::with_bound(256)).map_err(|e| e.to_string())?;
        ensure(s.converged, || format!("m={m} did not stabilize"))?;
        let cfg = SearchConfig::with_bound(s.bound);
        let o = check_node_proposition(m, &cfg, None, 0).map_err(|e| e.to_string())?;
        ensure(!o.truncated, || format!("m={m} tree truncated"))?;
        ensure(o.passed, || format!("m={m} violations {:?}", o.violations))?;
        parts.push(format!("m={m} B={} {} nodes", s.bound, o.checked));
    }
    Ok(parts.join(", "))
}

fn c9_families() -> Result<String, String> {
    let mut parts = Vec::new();
    for m in [21u32, 30].into_iter().chain(9..=15) {
        let v = check_leaf_families(m, 100_000).map_err(|e| e.to_string())?;
        let unstable = v.forms.iter().any(|o| o.stable == Some(false));
        ensure(!unstable, || format!("m={m} universality verdict not stable at 2B"))?;
        match &v.verdict {
            Verdict::Matches => parts.push(m.to_string()),
            other => return Err(format!("m={m}: {other:?}")),
        }
    }
    Ok(format!("m={} hold", parts.join(",")))
}

// nested loops over the value list, no sumset machinery
fn naive_reach(m: u32, coeffs: &[u64], bound: u64) -> Vec<bool> {
    let mut vals = Vec::new();
    for x in -100i64..=100 {
        let v = ((m as i64 - 2) * x * x - (m as i64 - 4) * x) / 2;
        if v as u64 <= bound {
            vals.push(v as u64);
        }
    }
    vals.sort_unstable();
    vals.dedup();
    let mut reach = vec![false; bound as usize + 1];
    let mut idx = vec![0usize; coeffs.len()];
    loop {
        let s: u64 = idx.iter().zip(coeffs).map(|(&i, &a)| a * vals[i]).sum();
        if s <= bound {
            reach[s as usize] = true;
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < vals.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return reach;
        }
    }
}

fn c10_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..500 {
        let m = rng.random_range(3..=12u32);
        let n = rng.random_range(1..=3usize);
        let mut coeffs: Vec<u64> = (0..n).map(|_| rng.random_range(1..=5)).collect();
        coeffs.sort_unstable();
        let bound = rng.random_range(1..=200u64);
        let f = MGonalForm::new(m, coeffs.clone()).map_err(|e| e.to_string())?;
        let t = build_table(&f, bound).map_err(|e| e.to_string())?;
        let want = naive_reach(m, &coeffs, bound);
        for (k, &w) in want.iter().enumerate() {
            ensure(t.represents(k as u64) == w, || {
                format!("case {case}: m={m} {coeffs:?} B={bound} disagrees at {k}")
            })?;
        }
    }
    Ok("500 seeded cases bit-exact".into())
}

fn main() {
    let criteria: [(u32, &str, Check, Option<Duration>); 10] = [
        (1, "identity suite", c1_identities, Some(Duration::from_secs(1))),
        (2, "S-table reproduction", c2_s_table, Some(Duration::from_secs(10))),
        (3, "escalator stability", c3_stability, Some(Duration::from_secs(30))),
        (4, "ell grid", c4_ell, Some(Duration::from_secs(60))),
        (5, "short power-of-two truants", c5_short_form_truants, None),
        (6, "power-of-two universality", c6_power_two, None),
        (7, "multiples grid", c7_multiples, Some(Duration::from_secs(60))),
        (8, "node coverage property", c8_node_property, None),
        (9, "leaf families", c9_families, None),
        (10, "oracle equivalence", c10_oracle, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, check, budget) in criteria {
        let tag = format!("criterion {n}");
        if !filter.is_empty() && !filter.iter().any(|f| tag.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let res = match (res, budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (r, _) => r,
        };
        match res {
            Ok(detail) => println!("{tag:>12} PASS  {name} ({took:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{tag:>12} FAIL  {name} ({took:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
