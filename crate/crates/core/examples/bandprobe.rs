// Scratch probe: band capture of W^T Pi^l W for cyclic shifts.
use num_complex::Complex64;
use whtdm::channel::frobenius_capture;
use whtdm::mat::CMat;
use whtdm::transform::{dense_walsh_matrix, WalshOrdering};

fn main() {
    let n = 64usize;
    for ordering in [WalshOrdering::Sequency, WalshOrdering::Natural] {
        println!("ordering {ordering:?}");
        let w = dense_walsh_matrix(n, ordering).unwrap();
        let wc = CMat::from_fn(n, |i, j| Complex64::new(w.get(i, j), 0.0));
        for l in 0..9usize {
            // Pi^l: H[r, (r-l) mod N] = 1
            let mut h = CMat::zeros(n);
            for r in 0..n {
                h[(r, (r + n - l) % n)] = Complex64::new(1.0, 0.0);
            }
            let g = wc.transpose().matmul(&h).matmul(&wc);
            let caps: Vec<String> = [1usize, 2, 4, 8, 16, 32]
                .iter()
                .map(|&b| format!("B{}={:.4}", b, frobenius_capture(&g, b).unwrap()))
                .collect();
            println!("  shift {l}: {}", caps.join(" "));
        }
    }
}
