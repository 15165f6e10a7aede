//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! visible under `cargo test`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitfrob::arith::{series_frobenius, Embedding, FieldCtx, FieldElement, LaurentPoly, LaurentScalar, Mat};
use unitfrob::catalog::random::random_direct_sum;
use unitfrob::catalog::{cover_poly, global_dual_of_sheaf, SheafSpec};
use unitfrob::global::{etale_chi, CohomReport};
use unitfrob::local::random::{random_monomial_module, MonomialRanges};
use unitfrob::local::{is_root, minimal_root_index, Frame, IndexValue, Lattice, LocalUnitModule, RootOptions};
use unitfrob::oracle::{brute_force_minimal_root, chi_topological, hasse_witt_genus1, roots_in_box, sample_lattice, SearchBox};
use unitfrob::Error;
use unitfrob::semilin::{
    artin_schreier_solve_field, fixed_space, solve_series_system, splitting_degree, splitting_extension, ss_nil_dims, SemilinearOp,
};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Every global instance checked by 2-4 and 6, shared with 8.
#[derive(Default)]
struct Ledger {
    instances: Vec<(String, CohomReport)>,
}

impl Ledger {
    fn record(&mut self, name: String, rep: &CohomReport) {
        self.instances.push((name, rep.clone()));
    }
}

fn global(spec: &SheafSpec, p: u64, r: u32, ext: u32) -> Result<CohomReport, String> {
    let gm = global_dual_of_sheaf(spec, p, r, ext).map_err(|e| format!("{spec:?}: {e}"))?;
    etale_chi(&gm).map_err(|e| format!("{spec:?}: {e}"))
}

fn ratio(i: &IndexValue) -> Ratio<i64> {
    i.ratio()
}

fn sorted_indices(rep: &CohomReport) -> Vec<Ratio<i64>> {
    let mut v: Vec<_> = rep.local_indices.iter().map(|i| Ratio::new(i.num, i.den)).collect();
    v.sort();
    v
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let t = Instant::now();
    let out = f();
    let took = t.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(out)
}

fn criterion_1() -> Outcome {
    let mut worst = Duration::ZERO;
    for p in [5u64, 7, 11, 13] {
        for r in [1u32, 2] {
            let k = FieldCtx::new(p, r, 1).map_err(|e| e.to_string())?;
            let q = k.q() as i64;
            let t = Instant::now();
            let w = LocalUnitModule::twist(&k, (q - 1) / 2);
            let idx = minimal_root_index(&w).map_err(|e| e.to_string())?;
            let l0 = Frame::new(&w).and_then(|f| f.minimal_root()).map_err(|e| e.to_string())?;
            let took = t.elapsed();
            worst = worst.max(took);
            ensure!(took < Duration::from_secs(1), "q = {q}: {took:?}");
            ensure!(idx == IndexValue::new(1, 2), "q = {q}: index {idx:?}");
            ensure!(l0 == Lattice::diagonal(&k, &[-1]), "q = {q}: minimal root {l0:?}");
            // colength of F(W_0) + W_0 over W_0 is (q-1)/2, read off the
            // image t^{(q-1)/2} t^{-q} = t^{-(q+1)/2} of the generator
            let w1 = Lattice::diagonal(&k, &[(q - 1) / 2 - q]);
            ensure!(w1.colength_of(&l0) == (q - 1) / 2, "q = {q}: colength");
        }
    }
    Ok(format!("8 fields, index 1/2, root t^-1 A e, slowest {worst:.2?}"))
}

fn shriek() -> SheafSpec {
    SheafSpec::Shriek { rank: 2, punctures: vec!["0".into(), "inf".into()] }
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    for p in [5u64, 7] {
        let rep = timed(Duration::from_secs(5), "shriek", || global(&shriek(), p, 1, 1))??;
        let two = Ratio::from_integer(2);
        ensure!(sorted_indices(&rep) == vec![two, two], "p = {p}: indices {:?}", rep.local_indices);
        ensure!(rep.degree_root == 4, "p = {p}: degree {}", rep.degree_root);
        ensure!(ratio(&rep.bound) == Ratio::from_integer(-2), "p = {p}: bound {:?}", rep.bound);
        ensure!(rep.chi == -2 && rep.equality, "p = {p}: chi {} equality {}", rep.chi, rep.equality);
        let top = chi_topological(&shriek(), p, 1).map_err(|e| e.to_string())?;
        ensure!(top.chi_top == -2, "p = {p}: oracle {}", top.chi_top);
        ledger.record(format!("shriek p={p}"), &rep);
    }
    Ok("p = 5, 7: indices (2, 2), degree 4, bound -2, chi -2, oracle -2".into())
}

fn criterion_3(ledger: &mut Ledger) -> Outcome {
    let spec = SheafSpec::tame_cover("x");
    for p in [5u64, 7] {
        let rep = timed(Duration::from_secs(5), "quadratic cover", || global(&spec, p, 1, 1))??;
        let half = Ratio::new(1, 2);
        ensure!(sorted_indices(&rep) == vec![half, half], "p = {p}: indices {:?}", rep.local_indices);
        ensure!(ratio(&rep.bound) == Ratio::from_integer(1), "p = {p}: bound {:?}", rep.bound);
        ensure!(rep.chi == 1 && rep.equality, "p = {p}: chi {} equality {}", rep.chi, rep.equality);
        ledger.record(format!("y^2=x p={p}"), &rep);
    }
    Ok("p = 5, 7: indices (1/2, 1/2), bound 1, chi 1".into())
}

/// Coefficient of `x^(p-1)` in `f^((p-1)/2)` for `f` with integer
/// coefficients (low degree first), by schoolbook arithmetic mod `p`.
fn hasse_coefficient(f: &[u64], p: u64) -> u64 {
    let mut acc = vec![1u64];
    for _ in 0..(p - 1) / 2 {
        let mut next = vec![0u64; acc.len() + f.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                next[i + j] = (next[i + j] + a * b) % p;
            }
        }
        acc = next;
    }
    acc.get(p as usize - 1).copied().unwrap_or(0)
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let cases: [(&str, &[u64], u64); 3] =
        [("x^3 + 1", &[1, 0, 0, 1], 5), ("x^3 + x", &[0, 1, 0, 1], 5), ("x^3 + 1", &[1, 0, 0, 1], 7)];
    let mut kinds = Vec::new();
    for (f, ints, p) in cases {
        let spec = SheafSpec::tame_cover(f);
        let rep = timed(Duration::from_secs(10), f, || global(&spec, p, 1, 1))??;
        let supersingular = hasse_coefficient(ints, p) == 0;
        let k = FieldCtx::new(p, 1, 1).map_err(|e| e.to_string())?;
        let poly = cover_poly(f, &k).map_err(|e| e.to_string())?;
        let hw = hasse_witt_genus1(&poly).map_err(|e| e.to_string())?;
        ensure!(hw.p_rank() == u32::from(!supersingular), "{f}, p = {p}: Hasse-Witt {hw:?}");
        ensure!(rep.ss1 as u32 == hw.p_rank(), "{f}, p = {p}: ss1 {} vs p-rank {}", rep.ss1, hw.p_rank());
        ensure!(ratio(&rep.bound) == Ratio::from_integer(0), "{f}, p = {p}: bound {:?}", rep.bound);
        if supersingular {
            ensure!(rep.chi == 1 && !rep.equality, "{f}, p = {p}: chi {} equality {}", rep.chi, rep.equality);
        } else {
            ensure!(rep.chi == 0 && rep.equality, "{f}, p = {p}: chi {} equality {}", rep.chi, rep.equality);
        }
        let top = chi_topological(&spec, p, 1).map_err(|e| e.to_string())?;
        ensure!(top.chi_top == rep.chi, "{f}, p = {p}: oracle {} vs {}", top.chi_top, rep.chi);
        kinds.push(format!("{f} p={p} {}", if supersingular { "supersingular" } else { "ordinary" }));
        ledger.record(format!("y^2={f} p={p}"), &rep);
    }
    Ok(kinds.join(", "))
}

fn criterion_5() -> Outcome {
    let mut checked_roots = 0usize;
    let mut exhaustive = 0usize;
    let mut oversized = 0usize;
    for (p, r) in [(5u64, 1u32), (7, 1), (5, 2)] {
        let k = FieldCtx::new(p, r, 1).map_err(|e| e.to_string())?;
        let q = k.q() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + p * 10 + r as u64);
        let ranges = MonomialRanges::for_field(&k);
        // draw until 50 modules per field have met the exhaustive search;
        // modules whose box is past the candidate limit still get (b), (c)
        let mut here = 0;
        let mut i = 0;
        while here < 50 {
            ensure!(i < 200, "({p}, {r}): only {here} of {i} modules fit the exhaustive search");
            let w = random_monomial_module(&k, &mut rng, 2, ranges);
            let tag = format!("(p, r) = ({p}, {r}) module {i}");
            i += 1;
            let f = Frame::new(&w).map_err(|e| format!("{tag}: {e}"))?;
            let l0 = f.minimal_root().map_err(|e| format!("{tag}: {e}"))?;
            let greedy = f.greedy_minimal_root(None).map_err(|e| format!("{tag}: {e}"))?;
            ensure!(greedy == l0, "{tag}: greedy {greedy} vs descent {l0}");
            let bx = SearchBox::around_start(&w).map_err(|e| format!("{tag}: {e}"))?;
            match brute_force_minimal_root(&w, bx) {
                Ok(brute) => {
                    ensure!(brute == l0, "{tag}: brute force {brute} vs greedy {l0}");
                    here += 1;
                }
                Err(Error::BoxTooLarge(_)) => oversized += 1,
                Err(e) => return Err(format!("{tag}: {e}")),
            }

            let fil = f.root_filtration(&l0, 3);
            let cols: Vec<i64> = fil.windows(2).map(|s| s[1].colength_of(&s[0])).collect();
            for pair in cols.windows(2) {
                ensure!(pair[1] == q * pair[0], "{tag}: colengths {cols:?}");
            }

            let wide = SearchBox { lo: -f.start_exponent() - 1, hi: 2 };
            let roots = match roots_in_box(&w, wide) {
                Ok(v) => v,
                Err(_) => {
                    let mut v = vec![f.start_root().map_err(|e| e.to_string())?];
                    for _ in 0..40 {
                        let l = sample_lattice(&w, wide, &mut rng).map_err(|e| e.to_string())?;
                        if is_root(&w, &l, RootOptions::default()).map_err(|e| e.to_string())?.is_root() {
                            v.push(l);
                        }
                    }
                    v
                }
            };
            for l in &roots {
                ensure!(l.contains(&l0), "{tag}: root {l} misses the minimal root {l0}");
            }
            checked_roots += roots.len();
        }
        exhaustive += here;
    }
    Ok(format!(
        "{exhaustive} modules against exhaustive search ({oversized} more past the box limit), {checked_roots} sampled roots"
    ))
}

fn criterion_6(ledger: &mut Ledger, catalog: &[(SheafSpec, u64)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut specs: Vec<(SheafSpec, u64, u32)> = catalog.iter().map(|(s, p)| (s.clone(), *p, 1)).collect();
    let mut random = 0;
    for (p, r) in [(5u64, 1u32), (7, 1), (5, 2), (11, 1)] {
        for _ in 0..6 {
            specs.push((random_direct_sum(p, r, &mut rng), p, r));
            random += 1;
        }
    }
    for (spec, p, r) in &specs {
        let rep = global(spec, *p, *r, 1)?;
        let sum: Ratio<i64> = rep.local_indices.iter().map(|i| Ratio::new(i.num, i.den)).sum();
        ensure!(Ratio::from_integer(rep.degree_root) == sum, "{spec:?}: degree {} vs {sum}", rep.degree_root);
        ensure!(Ratio::from_integer(rep.chi) >= ratio(&rep.bound), "{spec:?}: chi {} < bound", rep.chi);
        let swapped = spec.swap(*p, *r).map_err(|e| e.to_string())?;
        let rs = global(&swapped, *p, *r, 1)?;
        ensure!(rs.place_free() == rep.place_free(), "{spec:?}: swap changes the report");
        let re = global(spec, *p, *r, 2)?;
        ensure!(re.place_free() == rep.place_free(), "{spec:?}: field extension changes the report");
        ledger.record(format!("{spec:?} p={p} r={r}"), &rep);
    }
    Ok(format!("{} catalog + {random} random direct sums, swap and extension invariant", catalog.len()))
}

fn random_op<R: Rng>(k: &FieldCtx, rng: &mut R) -> SemilinearOp {
    let n = rng.gen_range(1..=3);
    let size = k.size().unwrap();
    let nil_rows = rng.gen_range(0..=n);
    let rows: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // part of the draws are strictly upper triangular so nilpotent parts occur
                    if i < nil_rows && j <= i && rng.gen_bool(0.5) {
                        k.zero()
                    } else {
                        k.from_index(rng.gen_range(0..size))
                    }
                })
                .collect()
        })
        .collect();
    SemilinearOp::new(Mat::from_rows(k, rows)).unwrap()
}

/// Matrix of `phi^k` assembled column by column from `apply`.
fn iterate_matrix(op: &SemilinearOp, k: usize) -> Mat {
    let ctx = op.ctx();
    let n = op.dim();
    let mut cols = Vec::new();
    for j in 0..n {
        let mut v: Vec<FieldElement> = (0..n).map(|i| if i == j { ctx.one() } else { ctx.zero() }).collect();
        for _ in 0..k {
            v = op.apply(&v);
        }
        cols.push(v);
    }
    Mat::from_rows(ctx, (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
}

fn all_vectors(ctx: &FieldCtx, n: usize) -> Vec<Vec<FieldElement>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                ctx.elements().map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// Operators whose splitting field is larger than this are only checked for
/// rank stabilization; building fields of degree `12 p` over `F_q` is the
/// practical limit for the fixed-point and Artin-Schreier checks.
const SPLIT_CAP: u32 = 12;

fn criterion_7() -> Outcome {
    let mut ops = 0;
    let mut drawn = 0;
    let mut enumerated = 0;
    let mut series = 0;
    for (p, r, label) in [(5u64, 1u32, "F_5"), (5, 2, "F_25"), (7, 2, "F_49")] {
        let k = FieldCtx::new(p, r, 1).map_err(|e| e.to_string())?;
        let q = k.q() as u128;
        let mut rng = ChaCha8Rng::seed_from_u64(700 + p + r as u64);
        let mut here = 0;
        while here < 70 {
            ensure!(drawn < 5000, "too few operators with splitting degree <= {SPLIT_CAP}");
            let tag = format!("{label} op {drawn}");
            drawn += 1;
            let op = random_op(&k, &mut rng);
            let n = op.dim();
            let (ss, nil) = ss_nil_dims(&op);
            let rn = iterate_matrix(&op, n).rank();
            let rn1 = iterate_matrix(&op, n + 1).rank();
            ensure!(rn == rn1 && rn == ss && ss + nil == n, "{tag}: ranks {rn} {rn1} vs ss {ss}");

            let e = match splitting_degree(&op, SPLIT_CAP) {
                Ok(e) => e,
                Err(Error::IterationLimit(_)) => continue,
                Err(e) => return Err(format!("{tag}: {e}")),
            };
            let ext = splitting_extension(&op).map_err(|e| format!("{tag}: {e}"))?;
            ensure!(ext.e() == e, "{tag}: extension degree {} vs {e}", ext.e());
            let emb = Embedding::new(&k, &ext).map_err(|e| e.to_string())?;
            let big = op.base_change(&emb);
            let fx = fixed_space(&big);
            ensure!(fx.dim() == ss, "{tag}: fixed dimension {} vs ss {ss}", fx.dim());
            for v in &fx.basis {
                ensure!(&big.apply(v) == v, "{tag}: basis vector not fixed");
            }
            ensure!(ss == 0 || Mat::from_rows(&ext, fx.basis.clone()).rank() == ss, "{tag}: dependent basis");
            for d in (1..e).filter(|d| e % d == 0) {
                let sub = k.extend(d).map_err(|e| e.to_string())?;
                let small = fixed_space(&op.base_change(&Embedding::new(&k, &sub).map_err(|e| e.to_string())?));
                ensure!(small.dim() < ss, "{tag}: already split in degree {d} < {e}");
            }
            let small = ext.size().and_then(|s| s.checked_pow(n as u32)).is_some_and(|s| s <= 20_000);
            if small {
                let count = all_vectors(&ext, n).iter().filter(|v| &big.apply(v) == *v).count() as u128;
                ensure!(count == q.pow(ss as u32), "{tag}: {count} fixed points, expected {}", q.pow(ss as u32));
                enumerated += 1;
            }

            let size = k.size().unwrap();
            let v: Vec<FieldElement> = (0..n).map(|_| k.from_index(rng.gen_range(0..size))).collect();
            let sol = artin_schreier_solve_field(&op, &v).map_err(|e| format!("{tag}: {e}"))?;
            let emb = Embedding::new(&k, &sol.ctx).map_err(|e| e.to_string())?;
            let phi = op.base_change(&emb).apply(&sol.x);
            for (j, (x, y)) in sol.x.iter().zip(&phi).enumerate() {
                ensure!((x - y) == emb.map(&v[j]), "{tag}: Artin-Schreier residual in coordinate {j}");
            }

            if here % 2 == 0 {
                series_check(&k, n, &mut rng).map_err(|e| format!("{tag}: {e}"))?;
                series += 1;
            }
            here += 1;
            ops += 1;
        }
    }
    Ok(format!(
        "{ops} operators of {drawn} drawn (splitting degree <= {SPLIT_CAP}), {enumerated} fixed-point counts by enumeration, {series} series systems"
    ))
}

/// `x - M F(x) = b` over `A`, checked by substitution to the full requested
/// precision.
fn series_check<R: Rng>(k: &FieldCtx, n: usize, rng: &mut R) -> Result<(), String> {
    let prec = 10;
    let size = k.size().unwrap();
    let poly = |rng: &mut R| {
        let c: Vec<FieldElement> = (0..4).map(|_| k.from_index(rng.gen_range(0..size))).collect();
        LaurentScalar::exact(LaurentPoly::from_parts(k, 0, c))
    };
    // residue layers whose splitting field is past SPLIT_CAP are redrawn
    let m: Vec<Vec<LaurentScalar>> = loop {
        let m: Vec<Vec<LaurentScalar>> = (0..n).map(|_| (0..n).map(|_| poly(rng)).collect()).collect();
        let m0 = Mat::from_rows(k, m.iter().map(|r| r.iter().map(|s| s.known().coeff(0)).collect()).collect());
        if splitting_degree(&SemilinearOp::new(m0).unwrap(), SPLIT_CAP).is_ok() {
            break m;
        }
    };
    let b: Vec<LaurentScalar> = (0..n).map(|_| poly(rng)).collect();
    let sol = solve_series_system(&m, &b, prec).map_err(|e| e.to_string())?;
    let emb = Embedding::new(k, &sol.ctx).map_err(|e| e.to_string())?;
    let lift = |s: &LaurentScalar| LaurentScalar::exact(s.known().map_coeffs(&sol.ctx, |a| emb.map(a)));
    let fx: Vec<LaurentScalar> = sol.x.iter().map(series_frobenius).collect();
    for i in 0..n {
        let mut lhs = sol.x[i].clone();
        for j in 0..n {
            lhs = lhs.sub(&lift(&m[i][j]).mul(&fx[j]));
        }
        let want = lift(&b[i]).known().truncate(prec);
        ensure!(lhs.known().truncate(prec) == want, "series residual in row {i}");
    }
    Ok(())
}

fn criterion_8(ledger: &Ledger, extra: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut instances: Vec<(String, CohomReport)> = ledger.instances.clone();
    for (p, r) in [(5u64, 1u32), (7, 1), (13, 1), (5, 2)] {
        for _ in 0..extra {
            let spec = random_direct_sum(p, r, &mut rng);
            instances.push((format!("{spec:?} p={p} r={r}"), global(&spec, p, r, 1)?));
        }
    }
    for (name, rep) in &instances {
        ensure!(Ratio::from_integer(rep.chi) >= ratio(&rep.bound), "{name}: chi {} < bound {:?}", rep.chi, rep.bound);
    }
    let exact: Vec<bool> = ["shriek p=5", "shriek p=7", "y^2=x p=5", "y^2=x p=7", "y^2=x^3 + x p=5", "y^2=x^3 + 1 p=7"]
        .iter()
        .map(|n| ledger.instances.iter().any(|(m, r)| m == n && r.equality))
        .collect();
    ensure!(exact.iter().all(|&b| b), "equality missing among the exact examples: {exact:?}");
    let strict = ledger.instances.iter().any(|(m, r)| m == "y^2=x^3 + 1 p=5" && !r.equality && r.chi == 1);
    ensure!(strict, "supersingular example should be strict");
    Ok(format!("inequality on {} of {} instances, equality on the exact examples", instances.len(), instances.len()))
}

fn run(n: usize, f: impl FnOnce() -> Outcome) -> bool {
    // ACCEPTANCE_ONLY=5,7 restricts the run to some criteria
    if let Ok(only) = std::env::var("ACCEPTANCE_ONLY") {
        if !only.split(',').any(|c| c.trim() == n.to_string()) {
            return true;
        }
    }
    let t = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    match out {
        Ok(msg) => {
            println!("PASS criterion {n}: {msg} [{:.2?}]", t.elapsed());
            true
        }
        Err(msg) => {
            println!("FAIL criterion {n}: {msg}");
            false
        }
    }
}

fn main() {
    // `cargo test -- --list` and filters are harness conventions; only run
    // when invoked plainly or with the target name.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let catalog: Vec<(SheafSpec, u64)> = vec![
        (shriek(), 5),
        (shriek(), 7),
        (SheafSpec::tame_cover("x"), 5),
        (SheafSpec::tame_cover("x"), 7),
        (SheafSpec::tame_cover("x^3 + 1"), 5),
        (SheafSpec::tame_cover("x^3 + x"), 5),
        (SheafSpec::tame_cover("x^3 + 1"), 7),
    ];
    let mut ledger = Ledger::default();
    let mut ok = true;
    ok &= run(1, criterion_1);
    ok &= run(2, || criterion_2(&mut ledger));
    ok &= run(3, || criterion_3(&mut ledger));
    ok &= run(4, || criterion_4(&mut ledger));
    ok &= run(5, criterion_5);
    let mut l6 = Ledger::default();
    ok &= run(6, || criterion_6(&mut l6, &catalog));
    ledger.instances.extend(l6.instances);
    ok &= run(7, criterion_7);
    ok &= run(8, || criterion_8(&ledger, 5));
    if !ok {
        std::process::exit(1);
    }
}
