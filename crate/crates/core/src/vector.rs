//! Small helpers on `[f64; 3]`.

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Central-difference Jacobian `J[i][j] = ∂Fᵢ/∂xⱼ` with absolute step `h`.
pub fn jacobian_fd<F>(field: F, at: &[f64; 3], h: f64) -> [[f64; 3]; 3]
where
    F: Fn(&[f64; 3]) -> [f64; 3],
{
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = *at;
        let mut minus = *at;
        plus[j] += h;
        minus[j] -= h;
        let (fp, fm) = (field(&plus), field(&minus));
        let width = plus[j] - minus[j];
        for i in 0..3 {
            jac[i][j] = (fp[i] - fm[i]) / width;
        }
    }
    jac
}

/// `∇ × F` by central differences.
pub fn curl_fd<F>(field: F, at: &[f64; 3], h: f64) -> [f64; 3]
where
    F: Fn(&[f64; 3]) -> [f64; 3],
{
    let j = jacobian_fd(field, at, h);
    [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
}

/// `∇V` by central differences.
pub fn gradient_fd<V>(potential: V, at: &[f64; 3], h: f64) -> [f64; 3]
where
    V: Fn(&[f64; 3]) -> f64,
{
    std::array::from_fn(|i| {
        let mut plus = *at;
        let mut minus = *at;
        plus[i] += h;
        minus[i] -= h;
        (potential(&plus) - potential(&minus)) / (plus[i] - minus[i])
    })
}
