mod common;

use common::{brute_bottleneck, persistent_betti, DenseComplex};

#[test]
fn oracle_on_circle_and_disk() {
    let circle = DenseComplex {
        simplices: vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]],
    };
    assert_eq!((circle.betti(0), circle.betti(1)), (1, 1));
    let mut disk = circle.simplices.clone();
    disk.push(vec![0, 1, 2]);
    let disk = DenseComplex { simplices: disk };
    assert_eq!((disk.betti(0), disk.betti(1), disk.betti(2)), (1, 0, 0));
    assert_eq!(persistent_betti(&circle, &circle, 1), 1);
    assert_eq!(persistent_betti(&circle, &disk, 1), 0);
    assert_eq!(persistent_betti(&circle, &disk, 0), 1);
}

#[test]
fn oracle_on_hollow_tetrahedron() {
    let mut simplices = Vec::new();
    for mask in 1u32..16 {
        let v: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        if v.len() <= 3 {
            simplices.push(v);
        }
    }
    let sphere = DenseComplex { simplices };
    assert_eq!((sphere.betti(0), sphere.betti(1), sphere.betti(2)), (1, 0, 1));
}

#[test]
fn brute_bottleneck_small_cases() {
    assert_eq!(brute_bottleneck(&[(0.0, 2.0)], &[]), 1.0);
    assert_eq!(brute_bottleneck(&[(0.0, 4.0)], &[(1.0, 5.0)]), 1.0);
    assert_eq!(brute_bottleneck(&[], &[]), 0.0);
    // Two close pairs beat sending everything to the diagonal.
    assert_eq!(
        brute_bottleneck(&[(0.0, 10.0), (0.0, 6.0)], &[(0.0, 6.5), (0.5, 10.0)]),
        0.5
    );
}
