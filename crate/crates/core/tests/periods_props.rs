use gauss_periods::laurent::HypocycloidDecomposer;
use gauss_periods::modring::{is_prime, mul_order, MatrixModN, Residue};
use gauss_periods::periods::{
    gaussian_period, gaussian_plot, gaussian_values, supercharacter_plot, supercharacter_value,
    write_csv, PeriodSpec, SupercharSpec, SUPERCHAR_BUDGET,
};
use gauss_periods::Complex64;
use proptest::prelude::*;

fn unit_mod(n: u64, seed: u64) -> u64 {
    let mut w = seed % n;
    while gauss_periods::modring::gcd(w, n) != 1 {
        w = (w + 1) % n;
    }
    w
}

#[test]
fn order_twelve_periods_of_255255_sum_to_zero() {
    let spec = PeriodSpec::new(255255, 254, 11).unwrap();
    assert_eq!(spec.d(), 12);
    let plot = gaussian_plot(&spec);
    assert_eq!(plot.len(), 255255);
    let sum: Complex64 = plot.iter().map(|p| p.value).sum();
    assert!(sum.norm() < 1e-4, "{sum}");
    assert_eq!(plot[0].value, Complex64::new(12.0, 0.0));
}

#[test]
fn values_match_fft_of_subgroup_indicator() {
    // η(k) = Σ_{h∈⟨ω⟩} e(hk/n) is the conjugate DFT of the indicator of ⟨ω⟩
    for (n, w) in [(255255u64, 254u64), (10, 3), (4096, 5), (99991, 2), (68921, 46244)] {
        let mut buf = vec![rustfft::num_complex::Complex64::new(0.0, 0.0); n as usize];
        let mut h = 1u64;
        loop {
            buf[h as usize].re = 1.0;
            h = h * w % n;
            if h == 1 {
                break;
            }
        }
        rustfft::FftPlanner::new().plan_fft_forward(n as usize).process(&mut buf);
        let values = gaussian_values(&PeriodSpec::new(n, w, 1).unwrap());
        for (k, (v, f)) in values.iter().zip(&buf).enumerate() {
            assert!((v.re - f.re).abs() < 1e-8 && (v.im + f.im).abs() < 1e-8, "n={n} k={k}");
        }
    }
}

#[test]
fn periods_lie_in_hypocycloids_up_to_5000() {
    let mut checked = 0;
    for p in (3..5000u64).filter(|&p| is_prime(p)) {
        let mut n = p;
        while n <= 5000 {
            for d in (2..p).filter(|&d| is_prime(d) && (p - 1) % d == 0) {
                // an element of order d mod p^a lifts from one mod p
                let omega = (2..n)
                    .find(|&w| mul_order(Residue::new(w, n).unwrap()) == Ok(d))
                    .unwrap();
                let spec = PeriodSpec::new(n, omega, 1).unwrap();
                let checker = HypocycloidDecomposer::new(d, 1e-6).unwrap();
                for (k, eta) in gaussian_values(&spec).into_iter().enumerate() {
                    let (h, inside) = checker.decompose(eta, n, k as u64);
                    assert!(inside, "n={n} ω={omega} d={d} k={k} h={h}");
                }
                checked += 1;
            }
            n *= p;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn order_three_supercharacter_fills_the_deltoid() {
    let a = MatrixModN::new(2, 455, &[0, 1, 454, 454]).unwrap();
    let spec = SupercharSpec::new(a, 1).unwrap();
    let deltoid = gauss_periods::laurent::FilledHypocycloid::new(3);
    for p in supercharacter_plot(&spec, SUPERCHAR_BUDGET).unwrap() {
        assert!(deltoid.contains(p.value, 1e-9), "{p:?}");
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let a = MatrixModN::new(2, 715, &[0, 2, 61, 121]).unwrap();
    let render = || {
        let spec = SupercharSpec::new(a.clone(), 5).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &supercharacter_plot(&spec, SUPERCHAR_BUDGET).unwrap(), 2).unwrap();
        buf
    };
    let first = render();
    assert_eq!(first, render());
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 715 * 715 + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn period_identities(n in 2u64..200_000, seed in any::<u64>(), ks in proptest::collection::vec(any::<u64>(), 20)) {
        let w = unit_mod(n, seed);
        let spec = PeriodSpec::new(n, w, 1).unwrap();
        let values = gaussian_values(&spec);
        prop_assert_eq!(values[0], Complex64::new(spec.d() as f64, 0.0));
        let mut acc = gauss_periods::numeric::ComplexSum::new();
        for &v in &values {
            acc.add(v);
        }
        prop_assert!(acc.value().norm() < 1e-6 * (n as f64).sqrt());
        for k in ks {
            let k = k % n;
            let eta = values[k as usize];
            prop_assert!((values[((n - k) % n) as usize] - eta.conj()).norm() < 1e-9);
            let wk = (w as u128 * k as u128 % n as u128) as usize;
            prop_assert!((values[wk] - eta).norm() < 1e-9);
            prop_assert!((gaussian_period(&spec, k) - eta).norm() < 1e-8);
        }
    }

    #[test]
    fn supercharacters_are_constant_on_superclasses(
        n in 2u64..60,
        m in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let entries: Vec<i64> = (0..m * m).map(|i| (seed.rotate_left(9 * i as u32) % n) as i64).collect();
        let a = MatrixModN::new(m, n, &entries).unwrap();
        prop_assume!(a.det_unit());
        let spec = SupercharSpec::new(a.clone(), 3).unwrap();
        let at = a.transpose();
        let plot = supercharacter_plot(&spec, SUPERCHAR_BUDGET).unwrap();
        let stride = (plot.len() / 200).max(1);
        for p in plot.into_iter().step_by(stride) {
            let moved = at.mul_vec(&p.index);
            let v = supercharacter_value(&spec, &moved).unwrap();
            prop_assert!((v - p.value).norm() < 1e-9);
            prop_assert!((supercharacter_value(&spec, &p.index).unwrap() - p.value).norm() < 1e-9);
        }
    }
}
