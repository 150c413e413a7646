use ndarray::{Array1, Array2, Axis};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rand::SeedableRng;

fn relu(x: &Array2<f64>) -> Array2<f64> { x.mapv(|v| v.max(0.0)) }
fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

fn main() {
    let d = 16; let n = 256; let h = 16; let sep = 2.4;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut dir: Vec<f64> = (0..d).map(|_| std_normal.sample(&mut rng)).collect();
    let norm = dir.iter().map(|v| v*v).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|v| *v /= norm);
    let mut x: Array2<f64> = Array2::zeros((n, d));
    let mut y = vec![0usize; n];
    for i in 0..n {
        let class = i % 2;
        let sign = if class == 0 { -1.0 } else { 1.0 };
        for j in 0..d { x[[i,j]] = sign * sep/2.0 * dir[j] + std_normal.sample(&mut rng); }
        y[i] = class;
    }
    let mut onehot: Array2<f64> = Array2::zeros((n, 2));
    for (i,&yy) in y.iter().enumerate() { onehot[[i,yy]] = 1.0; }

    let mut w1 = Array2::from_shape_fn((h,d), |_| std_normal.sample(&mut rng)/(d as f64).sqrt());
    let mut b1: Array1<f64> = Array1::zeros(h);
    let mut w2 = Array2::from_shape_fn((2,h), |_| std_normal.sample(&mut rng)/(h as f64).sqrt());
    let mut b2: Array1<f64> = Array1::zeros(2);
    let lr = 1.0;
    for epoch in 0..801 {
        let z1 = x.dot(&w1.t()) + &b1;
        let a1 = relu(&z1);
        let z2 = a1.dot(&w2.t()) + &b2;
        let p = softmax_rows(&z2);
        if epoch % 200 == 0 {
            let loss: f64 = p.outer_iter().zip(&y).map(|(row,&yy)| -row[yy].max(1e-12).ln()).sum::<f64>() / n as f64;
            let acc = p.outer_iter().zip(&y).filter(|(row,&yy)| (row[1] > row[0]) as usize == yy).count() as f64 / n as f64;
            println!("epoch {epoch}: loss {loss:.4} train acc {acc:.4}");
        }
        let dz2 = (&p - &onehot) / n as f64;
        let dw2 = dz2.t().dot(&a1);
        let db2 = dz2.sum_axis(Axis(0));
        let da1 = dz2.dot(&w2);
        let dz1 = &da1 * &z1.mapv(|v| if v > 0.0 {1.0} else {0.0});
        let dw1 = dz1.t().dot(&x);
        let db1 = dz1.sum_axis(Axis(0));
        w2 = w2 - lr * &dw2; b2 = b2 - lr * &db2;
        w1 = w1 - lr * &dw1; b1 = b1 - lr * &db1;
    }
}
