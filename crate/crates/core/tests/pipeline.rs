use std::collections::BTreeMap;

use concavex::bundle::{BundleSpec, Insertion, InsertionSpec};
use concavex::closed_forms::multiple_cover;
use concavex::recovery::{compute, one_point, two_point};
use concavex::series::rat::{frac, parse_rat, rat};
use concavex::{DescendentReading, Error, MirrorPipeline, Rat};

fn sig(p: &[(u32, u32)]) -> InsertionSpec {
    InsertionSpec::new(p.iter().map(|&(h, a)| Insertion::new(h, a)).collect()).unwrap()
}

fn bundle(n: usize, pos: &[u32], neg: &[u32]) -> BundleSpec {
    BundleSpec::new(n, pos.to_vec(), neg.to_vec()).unwrap()
}

fn values(pipe: &MirrorPipeline, s: &InsertionSpec, d: usize, r: DescendentReading) -> BTreeMap<usize, Rat> {
    compute(pipe, s, d, r).unwrap().by_degree(s)
}

#[test]
fn local_p5_one_point() {
    let pipe = MirrorPipeline::new(&bundle(5, &[3], &[3]), 5).unwrap();
    let k = values(&pipe, &sig(&[(3, 0)]), 5, DescendentReading::Mirror);
    let want = ["144", "-15228", "3387832", "-1033328799", "9395106912144/25"];
    for (d, w) in want.iter().enumerate() {
        assert_eq!(k[&(d + 1)], parse_rat(w).unwrap(), "d={}", d + 1);
    }
}

#[test]
fn readings_agree_without_descendents() {
    let pipe = MirrorPipeline::new(&bundle(5, &[3], &[3]), 4).unwrap();
    let s = sig(&[(2, 0), (2, 0)]);
    assert_eq!(
        values(&pipe, &s, 4, DescendentReading::Mirror),
        values(&pipe, &s, 4, DescendentReading::Published)
    );
}

#[test]
fn concave_multiple_cover_two_point() {
    let pipe = MirrorPipeline::new(&bundle(3, &[], &[1, 1, 1, 1]), 4).unwrap();
    let k = values(&pipe, &sig(&[(3, 0), (3, 0)]), 4, DescendentReading::Mirror);
    assert_eq!(k[&2], frac(1, 2));
    for (d, v) in &k {
        assert_eq!(*v, multiple_cover(3, *d));
    }
}

#[test]
fn conifold_one_point() {
    let pipe = MirrorPipeline::new(&bundle(1, &[], &[1, 1]), 6).unwrap();
    let t = one_point(&pipe, 1, 6).unwrap();
    for d in 1..=6 {
        assert_eq!(t.get(d, &sig(&[(1, 0)])), Some(&frac(1, (d * d) as i64)));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let b = bundle(5, &[3], &[3]);
    let s = sig(&[(2, 0), (1, 1)]);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let pipe = MirrorPipeline::new(&b, 5).unwrap();
                values(&pipe, &s, 5, DescendentReading::Published)
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn single_concave_summand_with_a_pole_is_unsupported() {
    let b = bundle(2, &[], &[3]);
    let r = MirrorPipeline::new(&b, 2).and_then(|p| compute(&p, &sig(&[(1, 0)]), 2, DescendentReading::Mirror));
    assert!(matches!(r, Err(Error::Unsupported(_))), "{r:?}");
}

#[test]
fn concave_heights_beyond_zero_are_unsupported() {
    let pipe = MirrorPipeline::new(&bundle(2, &[], &[1, 2]), 3).unwrap();
    let r = two_point(&pipe, 2, 1, 0, 3, DescendentReading::Mirror);
    assert!(matches!(r, Err(Error::Unsupported(_))), "{r:?}");
}

#[test]
fn validation_errors() {
    assert!(matches!(BundleSpec::new(3, vec![2], vec![]), Err(Error::InvalidBundle(_))));
    assert!(matches!(BundleSpec::new(0, vec![1], vec![]), Err(Error::InvalidBundle(_))));

    let pipe = MirrorPipeline::new(&bundle(1, &[], &[1, 1]), 3).unwrap();
    let r = compute(&pipe, &sig(&[(0, 0)]), 3, DescendentReading::Mirror);
    assert!(matches!(r, Err(Error::DimensionMismatch { required: 1, actual: 0 })), "{r:?}");
    let r = compute(&pipe, &sig(&[(1, 0)]), 4, DescendentReading::Mirror);
    assert!(matches!(r, Err(Error::OutOfRange(_))), "{r:?}");
    assert!(matches!(pipe.y_table(1), Err(Error::WrongBundleClass { .. })));

    let pipe = MirrorPipeline::new(&bundle(5, &[3], &[3]), 2).unwrap();
    let r = compute(&pipe, &sig(&[(6, 0)]), 2, DescendentReading::Mirror);
    assert!(matches!(r, Err(Error::InvalidInsertion(_))), "{r:?}");
    assert!(InsertionSpec::new(vec![Insertion::new(1, 1), Insertion::new(2, 0)]).is_err());
    let budget = pipe.budget().unwrap();
    assert!(matches!(pipe.height(budget + 1), Err(Error::PrecisionBudget { .. })));
    assert!(pipe.height(budget).is_ok());
}

#[test]
fn quintic_degree_one() {
    let pipe = MirrorPipeline::new(&bundle(4, &[5], &[]), 2).unwrap();
    let k = values(&pipe, &sig(&[(1, 0)]), 2, DescendentReading::Mirror);
    assert_eq!(k[&1], rat(2875));
}
