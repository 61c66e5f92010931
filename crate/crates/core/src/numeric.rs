//! Small numeric kernels: deterministic summation, Gauss-Legendre panels,
//! and ordinary least squares on log-log samples.

/// Pairwise summation with a fixed block structure.
///
/// The reduction tree depends only on the slice length, so the result is
/// bit-identical no matter how the values were produced (serial or from a
/// parallel map collected in order).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Complex pairwise summation with the same fixed tree as [`pairwise_sum`].
pub fn pairwise_sum_c(values: &[num_complex::Complex64]) -> num_complex::Complex64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

/// Nodes of the 10-point Gauss-Legendre rule on [-1, 1] (positive half).
const GL10_X: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_W: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// 10-point Gauss-Legendre quadrature of `f` over [a, b].
pub fn gauss10<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let s = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..5 {
        acc += GL10_W[i] * (f(c + s * GL10_X[i]) + f(c - s * GL10_X[i]));
    }
    acc * s
}

/// ln(n!) by direct summation; exact to roundoff for the basis sizes in use.
pub fn ln_factorial(n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 2..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// Ordinary least-squares fit y ≈ intercept + slope·x.
///
/// Returns (slope, intercept, residuals).
pub fn ols_fit(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let xb = x.iter().sum::<f64>() / n;
    let yb = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - xb) * (xi - xb);
        sxy += (xi - xb) * (yi - yb);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = yb - slope * xb;
    let resid = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| yi - (intercept + slope * xi))
        .collect();
    (slope, intercept, resid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-10);
    }

    #[test]
    fn gauss10_integrates_degree_19_exactly() {
        // x^19 over [0, 1] = 1/20
        let v = gauss10(0.0, 1.0, |t| t.powi(19));
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (s, i, r) = ols_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-12);
        assert!((i - 1.0).abs() < 1e-12);
        assert!(r.iter().all(|e| e.abs() < 1e-12));
    }
}
