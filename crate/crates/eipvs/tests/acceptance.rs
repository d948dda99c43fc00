//! Acceptance suite: one verdict line per criterion, run sequentially in a
//! single test so timing measurements never overlap.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eipvs::elastic::{
    eip, eip_distance, eip_distance_direct, find_additivity_violation, ElasticParams, TimeKernel,
};
use eipvs::eval::{
    self, euclidean_distance, BenchDistance, HarnessDistance, DEFAULT_NU_GRID,
};
use eipvs::index::build_elastic_matrix;
use eipvs::kernels::{check_psd, gram_matrix, KernelSpec};
use eipvs::matrix::Matrix;
use eipvs::ortho::{gram_schmidt, make_spike_basis};
use eipvs::seq::{compute_idf, eip_tm, strip_zero_idf, SymbolSequence, Weighting};
use eipvs::series::TimeSeries;
use eipvs::Error;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn random_series(rng: &mut ChaCha8Rng, max_len: usize, dim: usize) -> TimeSeries {
    let len = rng.random_range(1..=max_len);
    let mut t = 0.0;
    let mut times = Vec::with_capacity(len);
    for _ in 0..len {
        t += rng.random_range(0.05..1.5);
        times.push(t);
    }
    let values: Vec<f64> = (0..len * dim)
        .map(|_| {
            let v: f64 = rng.random_range(-2.0..2.0);
            if v == 0.0 {
                0.7
            } else {
                v
            }
        })
        .collect();
    TimeSeries::new(values, times, dim).expect("random series is valid")
}

fn uniform_series(rng: &mut ChaCha8Rng, len: usize) -> TimeSeries {
    let values: Vec<f64> = (0..len)
        .map(|_| {
            let v: f64 = rng.random_range(-2.0..2.0);
            if v == 0.0 {
                0.7
            } else {
                v
            }
        })
        .collect();
    TimeSeries::univariate(values).expect("valid")
}

fn prefix(a: &TimeSeries, k: usize) -> TimeSeries {
    if k == 0 {
        return TimeSeries::empty(a.dim());
    }
    let d = a.dim();
    TimeSeries::new(a.values()[..k * d].to_vec(), a.timestamps()[..k].to_vec(), d).expect("valid")
}

fn criterion_1_axioms() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let nus = [0.0, 0.01, 1.0, 100.0];
    let dims = [1usize, 3];
    let mut worst_additivity = 0.0f64;
    let mut worst_homogeneity = 0.0f64;
    for trial in 0..1000 {
        let nu = nus[trial % nus.len()];
        let dim = dims[trial % dims.len()];
        let params = ElasticParams::eip(nu);
        let a = random_series(&mut rng, 64, dim);
        let b = random_series(&mut rng, 64, dim);
        let c = random_series(&mut rng, 64, dim);

        let ab = eip(&a, &b, &params).unwrap();
        let ba = eip(&b, &a, &params).unwrap();
        if ab.to_bits() != ba.to_bits() {
            return Verdict::Fail(format!("symmetry not exact on trial {trial}: {ab} vs {ba}"));
        }

        let ac = eip(&a, &c, &params).unwrap();
        let bc = eip(&b, &c, &params).unwrap();
        let sum = eip(&a.oplus(&b).unwrap(), &c, &params).unwrap();
        let add_err = (sum - (ac + bc)).abs() / (ac.abs() + bc.abs()).max(1.0);
        worst_additivity = worst_additivity.max(add_err);
        if add_err > 1e-9 {
            return Verdict::Fail(format!("additivity error {add_err:.3e} on trial {trial}"));
        }

        let lambda: f64 = rng.random_range(-3.0..3.0);
        if lambda != 0.0 {
            let lhs = eip(&a.scale(lambda), &b, &params).unwrap();
            let rhs = lambda * ab;
            let hom_err = (lhs - rhs).abs() / rhs.abs().max(1.0);
            worst_homogeneity = worst_homogeneity.max(hom_err);
            if hom_err > 1e-9 {
                return Verdict::Fail(format!("homogeneity error {hom_err:.3e} on trial {trial}"));
            }
        }

        let aa = eip(&a, &a, &params).unwrap();
        let bb = eip(&b, &b, &params).unwrap();
        if !(aa > 0.0) {
            return Verdict::Fail(format!("self-product {aa} not positive on trial {trial}"));
        }
        // at nu=0 the inequality is exact equality (rank-one collapse), so
        // the slack must cover the evaluation error, which scales with the
        // squared sample masses rather than with the (possibly cancelled)
        // result
        let mass = |s: &TimeSeries| s.values().iter().map(|v| v.abs()).sum::<f64>();
        let cs_slack = 1e-12 * (mass(&a) * mass(&b)).powi(2).max(1.0);
        if ab * ab > aa * bb + cs_slack {
            return Verdict::Fail(format!(
                "Cauchy-Schwarz violated on trial {trial}: {} > {}",
                ab * ab,
                aa * bb
            ));
        }
        let dab = eip_distance(&a, &b, &params).unwrap();
        let dbc = eip_distance(&b, &c, &params).unwrap();
        let dac = eip_distance(&a, &c, &params).unwrap();
        if dac > dab + dbc + 1e-12 * (dab + dbc).max(1.0) {
            return Verdict::Fail(format!("triangle inequality violated on trial {trial}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Verdict::Fail(format!("axiom suite took {secs:.1}s (budget 60s)"));
    }
    Verdict::Pass(format!(
        "1000 triples; worst additivity {worst_additivity:.2e}, homogeneity {worst_homogeneity:.2e}; {secs:.1}s"
    ))
}

fn criterion_2_necessity() -> Verdict {
    let mut details = Vec::new();
    for (alpha, beta) in [(1.0, 1.0), (0.5, -1.0), (1.0, -0.5)] {
        let params = ElasticParams::general(alpha, beta, 0.0, 0.1, TimeKernel::Gaussian);
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        match find_additivity_violation(&params, 10_000, 1e-6, &mut rng).unwrap() {
            Some(w) => details.push(format!(
                "(a={alpha}, b={beta}): gap {:.2e} at trial {}",
                w.gap, w.trial
            )),
            None => {
                return Verdict::Fail(format!(
                    "no additivity violation found for alpha={alpha}, beta={beta} in 10000 trials"
                ))
            }
        }
    }
    Verdict::Pass(details.join("; "))
}

fn criterion_3_euclidean_limit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let params = ElasticParams::eip(1e6);
    let mut worst_expansion = 0.0f64;
    for pair in 0..200 {
        let a = uniform_series(&mut rng, 64);
        let b = uniform_series(&mut rng, 64);
        let mut dot = 0.0;
        for i in 0..64 {
            dot += a.value(i)[0] * b.value(i)[0];
        }
        let product = eip(&a, &b, &params).unwrap();
        if product.to_bits() != dot.to_bits() {
            return Verdict::Fail(format!(
                "pair {pair}: rigid product {product} != dot {dot}"
            ));
        }
        let ed = euclidean_distance(&a, &b).unwrap();
        let direct = eip_distance_direct(&a, &b, &params).unwrap();
        if direct.to_bits() != ed.to_bits() {
            return Verdict::Fail(format!(
                "pair {pair}: difference-form distance {direct} != euclidean {ed}"
            ));
        }
        let expansion = eip_distance(&a, &b, &params).unwrap();
        let rel = (expansion - ed).abs() / ed.max(1e-300);
        worst_expansion = worst_expansion.max(rel);
        if rel > 1e-12 {
            return Verdict::Fail(format!(
                "pair {pair}: expansion-form distance off by {rel:.2e} relative"
            ));
        }
    }
    Verdict::Pass(format!(
        "200 aligned pairs: product and difference-form distance exact; expansion form within {worst_expansion:.2e}"
    ))
}

fn criterion_4_matrix_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let nus = [0.0, 0.01, 1.0];
    let mut worst = 0.0f64;
    for pair in 0..200 {
        let n = rng.random_range(2..=1024);
        let nu = nus[pair % nus.len()];
        let a = uniform_series(&mut rng, n);
        let b = uniform_series(&mut rng, n);
        let recursive = eip(&a, &b, &ElasticParams::eip(nu)).unwrap();
        let grid: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let e = build_elastic_matrix(&grid, nu, TimeKernel::Gaussian).unwrap();
        let emb_a = a.embed_on_grid(&grid).unwrap();
        let emb_b = b.embed_on_grid(&grid).unwrap();
        let bilinear = e.bilinear(&emb_a, &emb_b, 1).unwrap();
        let denom = recursive.abs().max(bilinear.abs());
        let rel = if denom == 0.0 { 0.0 } else { (recursive - bilinear).abs() / denom };
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Verdict::Fail(format!(
                "pair {pair} (n={n}, nu={nu}): recursive {recursive} vs matrix {bilinear} ({rel:.2e} relative)"
            ));
        }
    }
    Verdict::Pass(format!("200 grid-aligned pairs up to length 1024; worst gap {worst:.2e}"))
}

fn criterion_5_monotone_growth() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let nus = [0.0, 0.01, 1.0, 100.0];
    let mut checked = 0usize;
    // positive-valued series: the growth argument needs pointwise-positive
    // spatial products (mixed signs genuinely break it)
    let positive = |rng: &mut ChaCha8Rng| {
        let len = rng.random_range(1..=64);
        let mut t = 0.0;
        let mut times = Vec::with_capacity(len);
        for _ in 0..len {
            t += rng.random_range(0.05..1.2);
            times.push(t);
        }
        let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..2.0)).collect();
        TimeSeries::univariate_at(values, times).expect("valid")
    };
    for trial in 0..10_000 {
        let nu = nus[trial % nus.len()];
        let params = ElasticParams::eip(nu);
        let a = positive(&mut rng);
        let b = positive(&mut rng);
        let q = rng.random_range(1..=b.len());
        let longer = eip(&a, &prefix(&b, q), &params).unwrap();
        let shorter = eip(&a, &prefix(&b, q - 1), &params).unwrap();
        if longer - shorter < 0.0 {
            return Verdict::Fail(format!(
                "trial {trial}: product decreased ({longer} < {shorter}) at nu={nu}"
            ));
        }
        checked += 1;
    }
    Verdict::Pass(format!("{checked} prefix pairs, zero violations"))
}

fn criterion_6_kernel_definiteness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let items: Vec<TimeSeries> = (0..50)
        .map(|_| {
            let len = rng.random_range(4..=12);
            uniform_series(&mut rng, len)
        })
        .collect();
    let params = ElasticParams::eip(0.5);
    let specs: Vec<(String, KernelSpec)> = vec![
        ("gaussian_eip".into(), KernelSpec::GaussianEip { params: params.clone(), sigma: 1.0 }),
        ("polynomial_eip(p=1)".into(), KernelSpec::PolynomialEip { params: params.clone(), degree: 1 }),
        ("polynomial_eip(p=2)".into(), KernelSpec::PolynomialEip { params: params.clone(), degree: 2 }),
        ("polynomial_eip(p=3)".into(), KernelSpec::PolynomialEip { params: params.clone(), degree: 3 }),
        ("exp_eip".into(), KernelSpec::ExpEip { params: params.clone() }),
        ("exp_neg_distance(p=0.5)".into(), KernelSpec::ExpNegDistance { params: params.clone(), rate: 0.5, exponent: 0.5 }),
        ("exp_neg_distance(p=1)".into(), KernelSpec::ExpNegDistance { params: params.clone(), rate: 0.5, exponent: 1.0 }),
        ("exp_neg_distance(p=2)".into(), KernelSpec::ExpNegDistance { params: params.clone(), rate: 0.5, exponent: 2.0 }),
    ];
    let mut details = Vec::new();
    for (name, spec) in specs {
        let gram = gram_matrix(&spec, &items).unwrap();
        let report = check_psd(&gram, 1e-8).unwrap();
        if report.min_eigenvalue < -1e-8 * report.max_eigenvalue {
            return Verdict::Fail(format!(
                "{name}: min eigenvalue {} vs max {}",
                report.min_eigenvalue, report.max_eigenvalue
            ));
        }
        details.push(format!("{name} ratio {:.1e}", report.min_eigenvalue / report.max_eigenvalue));
    }
    Verdict::Pass(format!("m=50 grams PSD: {}", details.join(", ")))
}

fn criterion_7_sequence_degeneration() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let random_seq = |rng: &mut ChaCha8Rng| {
        let len = rng.random_range(1..=40);
        let tokens: Vec<String> = (0..len)
            .map(|_| ((b'a' + rng.random_range(0..26u8)) as char).to_string())
            .collect();
        SymbolSequence::new(tokens).expect("valid")
    };
    let pairs: Vec<(SymbolSequence, SymbolSequence)> =
        (0..300).map(|_| (random_seq(&mut rng), random_seq(&mut rng))).collect();
    let corpus: Vec<SymbolSequence> =
        pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let idf = compute_idf(&corpus).unwrap();

    let tf_dot = |a: &SymbolSequence, b: &SymbolSequence, weights: Option<&eipvs::seq::IdfTable>| {
        let tfa = a.term_frequencies();
        let tfb = b.term_frequencies();
        tfa.iter()
            .filter_map(|(t, ca)| {
                tfb.get(t).map(|cb| {
                    let w = weights.map(|table| table.get(t).unwrap()).unwrap_or(1.0);
                    (*ca as f64) * (*cb as f64) * w * w
                })
            })
            .sum::<f64>()
    };

    let mut worst_tf = 0.0f64;
    let mut worst_tfidf = 0.0f64;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let got = eip_tm(a, b, 0.0, &Weighting::Indicator).unwrap();
        let want = tf_dot(a, b, None);
        let err = (got - want).abs() / want.abs().max(1.0);
        worst_tf = worst_tf.max(err);
        if err > 1e-10 {
            return Verdict::Fail(format!("pair {i}: tf gap {err:.2e}"));
        }

        let (sa, _) = strip_zero_idf(a, &idf);
        let (sb, _) = strip_zero_idf(b, &idf);
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        let got = eip_tm(&sa, &sb, 0.0, &Weighting::Idf(idf.clone())).unwrap();
        let want = tf_dot(&sa, &sb, Some(&idf));
        let err = (got - want).abs() / want.abs().max(1.0);
        worst_tfidf = worst_tfidf.max(err);
        if err > 1e-10 {
            return Verdict::Fail(format!("pair {i}: tf-idf gap {err:.2e}"));
        }
    }
    Verdict::Pass(format!(
        "300 pairs: tf gap {worst_tf:.2e}, tf-idf gap {worst_tfidf:.2e}"
    ))
}

/// Dense modified Gram-Schmidt under the E-weighted inner product.
fn dense_e_weighted_gs(vectors: &[Vec<f64>], e: &Matrix) -> Vec<Vec<f64>> {
    let ip = |x: &[f64], y: &[f64]| -> f64 {
        let ey = e.matvec(y).unwrap();
        x.iter().zip(&ey).map(|(a, b)| a * b).sum()
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for b in &basis {
            let c = ip(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        let n = ip(&r, &r).max(0.0).sqrt();
        for ri in r.iter_mut() {
            *ri /= n;
        }
        basis.push(r);
    }
    basis
}

fn criterion_8_orthogonalization() -> Verdict {
    let nu = 0.01;
    let params = ElasticParams::eip(nu);
    let family = make_spike_basis(11, f64::EPSILON).unwrap();
    let basis = match gram_schmidt(&family, &params) {
        Ok(b) => b,
        Err(Error::DependentFamily { index }) => {
            return Verdict::Fail(format!(
                "gram_schmidt reports numeric dependence at member {index}: the 11-point \
                 elastic matrix at nu=0.01 has eigenvalues down to ~1e-27 (f64 numerical \
                 rank ~6), so the family is not orthogonalizable to 1e-8 in double precision"
            ))
        }
        Err(e) => return Verdict::Fail(format!("gram_schmidt failed: {e}")),
    };

    let mut worst_off = 0.0f64;
    let mut worst_norm = 0.0f64;
    for i in 0..basis.len() {
        let nrm = eip(&basis[i], &basis[i], &params).unwrap();
        worst_norm = worst_norm.max((nrm - 1.0).abs());
        for j in 0..i {
            worst_off = worst_off.max(eip(&basis[i], &basis[j], &params).unwrap().abs());
        }
    }

    let mut sign_ok = true;
    for (k, e) in basis.iter().enumerate().skip(1) {
        let last_t = family[k].timestamp(family[k].len() - 1);
        match (0..e.len()).find(|&i| e.timestamp(i) == last_t) {
            Some(pos) if pos > 0 => {
                if !(e.value(pos)[0] > 0.0 && e.value(pos - 1)[0] < 0.0) {
                    sign_ok = false;
                }
            }
            _ => sign_ok = false,
        }
    }

    let grid: Vec<f64> = family[10].timestamps().to_vec();
    let e = build_elastic_matrix(&grid, nu, TimeKernel::Gaussian).unwrap();
    let embedded: Vec<Vec<f64>> =
        family.iter().map(|s| s.embed_on_grid(&grid).unwrap()).collect();
    let oracle = dense_e_weighted_gs(&embedded, e.entries());
    let mut worst_oracle = 0.0f64;
    for (mine, want) in basis.iter().zip(&oracle) {
        let got = mine.embed_on_grid(&grid).unwrap();
        for (g, w) in got.iter().zip(want) {
            worst_oracle = worst_oracle.max((g - w).abs());
        }
    }

    if worst_off <= 1e-8 && worst_norm <= 1e-8 && sign_ok && worst_oracle <= 1e-8 {
        Verdict::Pass(format!(
            "pairwise {worst_off:.2e}, norms {worst_norm:.2e}, sign pattern ok, oracle {worst_oracle:.2e}"
        ))
    } else {
        Verdict::Fail(format!(
            "pairwise |eip| {worst_off:.2e} (need <=1e-8), |norm-1| {worst_norm:.2e} (need <=1e-8), \
             sign pattern {}, oracle gap {worst_oracle:.2e} (need <=1e-8) — the 11-point elastic \
             matrix at nu=0.01 has eigenvalues down to ~1e-27 (f64 numerical rank ~6), so an \
             orthonormal 11-member family cannot be computed or verified at 1e-8 in double \
             precision; orthogonality is attained to ~depth 4 and the spike sign pattern through \
             member 6 (see module tests)",
            if sign_ok { "ok" } else { "violated" }
        ))
    }
}

fn slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(l, _)| (*l as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, t)| t.max(1e-12).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn criterion_9_complexity_shape() -> Verdict {
    let start = Instant::now();
    let lengths = [10usize, 100, 1000];
    let distances = [
        BenchDistance::Euclidean,
        BenchDistance::RecursiveEip { nu: 0.01 },
        BenchDistance::IndexedEip { nu: 0.01 },
        BenchDistance::Dtw,
    ];
    let rows = eval::timing_bench(&lengths, 100, &distances, 5, 4242).unwrap();
    let slope_of = |name: &str| {
        let points: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.distance == name)
            .map(|r| (r.length, r.seconds))
            .collect();
        slope(&points)
    };
    let (s_ed, s_eip, s_ieip, s_dtw) =
        (slope_of("ed"), slope_of("eip"), slope_of("ieip"), slope_of("dtw"));
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "slopes: eip {s_eip:.2}, dtw {s_dtw:.2} (need [1.6,2.4]); ed {s_ed:.2}, ieip {s_ieip:.2} (need [0.7,1.4]); {secs:.0}s"
    );
    let quad_ok = (1.6..=2.4).contains(&s_eip) && (1.6..=2.4).contains(&s_dtw);
    let lin_ok = (0.7..=1.4).contains(&s_ed) && (0.7..=1.4).contains(&s_ieip);
    if !quad_ok || !lin_ok {
        return Verdict::Fail(detail);
    }
    if secs >= 600.0 {
        return Verdict::Fail(format!("{detail} — over the 10 minute budget"));
    }
    Verdict::Pass(detail)
}

fn find_ucr_dir() -> Option<std::path::PathBuf> {
    if let Ok(dir) = std::env::var("EIPVS_UCR_DIR") {
        let p = std::path::PathBuf::from(dir);
        if p.is_dir() {
            return Some(p);
        }
    }
    let fallback = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/UCR");
    if fallback.is_dir() {
        return Some(fallback);
    }
    None
}

fn load_ucr_split(dir: &std::path::Path, name: &str, split: &str) -> Option<eipvs::LabeledDataset<TimeSeries>> {
    for candidate in [
        dir.join(name).join(format!("{name}_{split}.tsv")),
        dir.join(name).join(format!("{name}_{split}.txt")),
        dir.join(name).join(format!("{name}_{split}")),
        dir.join(format!("{name}_{split}.tsv")),
        dir.join(format!("{name}_{split}")),
    ] {
        if candidate.is_file() {
            let opts = eipvs::io::UcrOptions { name: name.into(), ..Default::default() };
            return eipvs::io::load_ucr(&candidate, &opts).ok().map(|r| r.dataset);
        }
    }
    None
}

fn criterion_10_ucr() -> Verdict {
    let Some(dir) = find_ucr_dir() else {
        return Verdict::Skip(
            "UCR data not found (set EIPVS_UCR_DIR or place data/UCR); replaced by criterion 11"
                .into(),
        );
    };
    // (dataset, target error, absolute tolerance)
    let cases = [
        ("SyntheticControl", 0.03, None),
        ("CBF", 0.0422, Some(0.03)),
        ("ECG200", 0.02, Some(0.03)),
    ];
    let mut details = Vec::new();
    for (name, target, tolerance) in cases {
        let Some(train) = load_ucr_split(&dir, name, "TRAIN") else {
            return Verdict::Skip(format!("{name} not found under {}; replaced by criterion 11", dir.display()));
        };
        let Some(test) = load_ucr_split(&dir, name, "TEST") else {
            return Verdict::Skip(format!("{name} TEST not found; replaced by criterion 11"));
        };
        let sel = eval::select_nu(&train, &DEFAULT_NU_GRID).unwrap();
        let report = eval::test_error(
            &train,
            &test,
            1,
            &HarnessDistance::Eip(ElasticParams::eip(sel.nu)),
        )
        .unwrap();
        let ok = match tolerance {
            None => report.error_rate <= target,
            Some(tol) => (report.error_rate - target).abs() <= tol,
        };
        if !ok {
            return Verdict::Fail(format!(
                "{name}: test error {:.4} (selected nu {}), target {target} tolerance {tolerance:?}",
                report.error_rate, sel.nu
            ));
        }
        details.push(format!("{name} {:.4} (nu {})", report.error_rate, sel.nu));
    }
    Verdict::Pass(details.join("; "))
}

fn criterion_11_synthetic_fallback() -> Verdict {
    let train = eval::cbf_generate(10, 128, 2024).unwrap();
    let test = eval::cbf_generate(100, 128, 2025).unwrap();
    let sel = eval::select_nu(&train, &DEFAULT_NU_GRID).unwrap();
    let eip_report = eval::test_error(
        &train,
        &test,
        1,
        &HarnessDistance::Eip(ElasticParams::eip(sel.nu)),
    )
    .unwrap();
    let ed_report = eval::test_error(&train, &test, 1, &HarnessDistance::Euclidean).unwrap();
    let detail = format!(
        "CBF 30/300: elastic error {:.4} (nu {}, loo {:.4}) vs euclidean {:.4}",
        eip_report.error_rate, sel.nu, sel.loo_error, ed_report.error_rate
    );
    if eip_report.error_rate <= ed_report.error_rate {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(u32, &str, fn() -> Verdict)> = vec![
        (1, "inner-product axioms", criterion_1_axioms),
        (2, "necessity of alpha=1, beta=-1", criterion_2_necessity),
        (3, "rigid limit equals Euclidean exactly", criterion_3_euclidean_limit),
        (4, "recursive vs elastic-matrix identity", criterion_4_matrix_identity),
        (5, "monotone growth on positive series", criterion_5_monotone_growth),
        (6, "derived kernels are positive semidefinite", criterion_6_kernel_definiteness),
        (7, "sequence product degenerates to tf / tf-idf", criterion_7_sequence_degeneration),
        (8, "spike-basis orthogonalization", criterion_8_orthogonalization),
        (9, "complexity shape (log-log slopes)", criterion_9_complexity_shape),
        (10, "UCR 1-NN reproduction", criterion_10_ucr),
        (11, "synthetic CBF fallback", criterion_11_synthetic_fallback),
    ];
    // EIPVS_ACCEPTANCE_CRITERIA="1,8" narrows the run while iterating
    let subset: Option<Vec<u32>> = std::env::var("EIPVS_ACCEPTANCE_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|f| f.trim().parse().ok()).collect());
    let mut failures = Vec::new();
    for (number, name, run) in criteria {
        if let Some(only) = &subset {
            if !only.contains(&number) {
                continue;
            }
        }
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Verdict::Pass(detail) => println!("[PASS] criterion {number}: {name} — {detail} ({secs:.1}s)"),
            Verdict::Skip(detail) => println!("[SKIP] criterion {number}: {name} — {detail}"),
            Verdict::Fail(detail) => {
                println!("[FAIL] criterion {number}: {name} — {detail} ({secs:.1}s)");
                failures.push(number);
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance criteria failed: {failures:?} (see the [FAIL] lines above)"
    );
}
