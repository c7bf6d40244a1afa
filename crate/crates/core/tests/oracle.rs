//! Recomputes every frozen fixture value with the reference implementation in `common`
//! and checks it against the constants the acceptance suite relies on.

mod common;

use common::frozen;
use common::*;

const KS: [usize; 3] = [1, 5, 10];

struct Derived {
    small_exact_ir: Vec<usize>,
    exact: [Vec<usize>; 2],
    sweep: Vec<(&'static str, f64, [Vec<usize>; 2])>,
    fidelity: Vec<(&'static str, [f64; 2])>,
    rerank: Vec<(&'static str, usize, [usize; 2])>,
}

fn encoder(method: &str, z: usize) -> impl Fn(&[f32]) -> Vec<f64> + '_ {
    move |g| {
        let c = crelu(g);
        match method {
            "deep_permutation" => deep_permutation(&c, z),
            _ => scalar_quantize(&c, 1000.0, z),
        }
    }
}

fn derive() -> Derived {
    let (si, ss) = small_fixture();
    let small = rank(&encode_with(&ss, widen), &encode_with(&si, widen), 10, false);
    let small_exact_ir = count_hits(&small, &ss, false, &KS);

    let (images, sentences) = fixture();
    let img = encode_with(&images, widen);
    let sen = encode_with(&sentences, widen);
    let exact = [
        count_hits(&rank(&sen, &img, 10, false), &sentences, false, &KS),
        count_hits(&rank(&img, &sen, 10, false), &sentences, true, &KS),
    ];
    let reference = [
        rank(
            &encode_with(&sentences, |g| widen(&crelu(g))),
            &encode_with(&images, |g| widen(&crelu(g))),
            10,
            false,
        ),
        rank(
            &encode_with(&images, |g| widen(&crelu(g))),
            &encode_with(&sentences, |g| widen(&crelu(g))),
            10,
            false,
        ),
    ];

    let mut sweep = Vec::new();
    let mut fidelity = Vec::new();
    let mut rerank_rows = Vec::new();
    for method in ["deep_permutation", "scalar_quantization"] {
        for f in frozen::SWEEP {
            let z = keep(2 * images.dim, f);
            let ei = encode_with(&images, encoder(method, z));
            let es = encode_with(&sentences, encoder(method, z));
            let ir = rank(&es, &ei, 200, true);
            let sr = rank(&ei, &es, 200, true);
            sweep.push((
                method,
                f,
                [
                    count_hits(&ir, &sentences, false, &KS),
                    count_hits(&sr, &sentences, true, &KS),
                ],
            ));
            if f == 0.0 {
                fidelity.push((
                    method,
                    [overlap(&ir, &reference[0], 10), overlap(&sr, &reference[1], 10)],
                ));
            }
            if f == frozen::RERANK_SPARSITY {
                for r_m in frozen::RERANK_RM {
                    let a = common::rerank(&ir, &sen, &img, r_m * 10);
                    let b = common::rerank(&sr, &img, &sen, r_m * 10);
                    let h = [
                        count_hits(&a, &sentences, false, &[10])[0],
                        count_hits(&b, &sentences, true, &[10])[0],
                    ];
                    rerank_rows.push((method, r_m, h));
                }
            }
        }
    }
    Derived {
        small_exact_ir,
        exact,
        sweep,
        fidelity,
        rerank: rerank_rows,
    }
}

#[test]
#[ignore = "prints the values to freeze; run after changing a fixture"]
fn print_oracle_values() {
    let d = derive();
    println!("small exact IR hits {:?}", d.small_exact_ir);
    println!("exact hits {:?}", d.exact);
    for row in &d.sweep {
        println!("sweep {row:?}");
    }
    for row in &d.fidelity {
        println!("fidelity {row:?}");
    }
    for row in &d.rerank {
        println!("rerank {row:?}");
    }
}

#[test]
fn oracle_reproduces_frozen_values() {
    let d = derive();
    assert_eq!(d.small_exact_ir[2], frozen::SMALL_EXACT_IR_HITS10);
    assert_eq!(d.exact[0], frozen::EXACT_HITS[0]);
    assert_eq!(d.exact[1], frozen::EXACT_HITS[1]);
    for (method, f, hits) in &d.sweep {
        let want = frozen::sweep_hits(method, *f);
        assert_eq!(hits[0], want[0], "{method} f={f} image retrieval");
        assert_eq!(hits[1], want[1], "{method} f={f} sentence retrieval");
    }
    for (method, got) in &d.fidelity {
        let want = frozen::fidelity(method);
        assert!(
            (got[0] - want[0]).abs() < 1e-9 && (got[1] - want[1]).abs() < 1e-9,
            "{method}: {got:?}"
        );
    }
    for (method, r_m, hits) in &d.rerank {
        assert_eq!(*hits, frozen::rerank_hits10(method, *r_m), "{method} r_m={r_m}");
    }
}
