//! Five-point central finite differences with one Richardson extrapolation.

/// `f'(x)` from the 5-point stencil, error `O(h^4)`.
pub fn first5<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// `f''(x)` from the 5-point stencil, error `O(h^4)`.
pub fn second5<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Eliminates the `h^4` term from two estimates at `h` and `h/2`.
pub fn richardson4(coarse: f64, fine: f64) -> f64 {
    (16.0 * fine - coarse) / 15.0
}

pub fn derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let coarse = first5(&mut f, x, h);
    let fine = first5(&mut f, x, 0.5 * h);
    richardson4(coarse, fine)
}

pub fn second_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let coarse = second5(&mut f, x, h);
    let fine = second5(&mut f, x, 0.5 * h);
    richardson4(coarse, fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_exp() {
        let x = 0.3;
        assert!((derivative(|x| x.exp(), x, 1e-2) - x.exp()).abs() < 1e-12);
        assert!((second_derivative(|x| x.exp(), x, 1e-2) - x.exp()).abs() < 1e-10);
    }

    #[test]
    fn stencils_exact_for_quartics() {
        let f = |x: f64| 3.0 * x.powi(4) - x.powi(3) + 2.0 * x;
        let d = first5(f, 1.5, 0.1);
        let exact = 12.0 * 1.5f64.powi(3) - 3.0 * 1.5f64.powi(2) + 2.0;
        assert!((d - exact).abs() < 1e-10);
        let d2 = second5(f, 1.5, 0.1);
        assert!((d2 - (36.0 * 2.25 - 9.0)).abs() < 1e-9);
    }
}
