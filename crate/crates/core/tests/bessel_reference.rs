//! Bessel evaluators against values computed with 40-digit arithmetic, plus
//! the derivative, Wronskian and asymptotic identities.

#![allow(clippy::excessive_precision)]

use nsk_core::bessel::{
    bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, BesselOrder, MAX_UNSCALED_ARG,
};

/// (2 nu, x, e^{-x} I_nu(x), e^{x} K_nu(x)) from mpmath at 40 digits.
const REFERENCE: &[(u32, f64, f64, f64)] = &[
    (0, 1e-6, 9.9999900000075e-1, 1.3931456005075459e+1),
    (0, 1e-3, 9.9900074958351556e-1, 7.0307160023782515),
    (0, 0.1, 9.071009257823011e-1, 2.6823261022628944),
    (0, 0.5, 6.4503527044915007e-1, 1.5241093857739095),
    (0, 1.0, 4.6575960759364044e-1, 1.144463079806895),
    (0, 1.9, 3.1824316288914157e-1, 8.6145061675175577e-1),
    (0, 2.0, 3.0850832255367104e-1, 8.4156821507077142e-1),
    (0, 2.1, 2.9956309452628192e-1, 8.2301715253166207e-1),
    (0, 5.0, 1.8354081260932835e-1, 5.4780756431351899e-1),
    (0, 10.0, 1.2783333716342861e-1, 3.9163193443659867e-1),
    (0, 12.0, 1.1642622121344044e-1, 3.5819487848907822e-1),
    (0, 15.0, 1.0389953144882272e-1, 3.2100235350577624e-1),
    (0, 19.9, 9.0008588864389594e-2, 2.7923549940723692e-1),
    (0, 20.1, 8.9553763620613447e-2, 2.7785935434081997e-1),
    (0, 30.0, 7.3145946482237294e-2, 2.2788666561625373e-1),
    (0, 50.0, 5.6561626647454193e-2, 1.7680715585742934e-1),
    (0, 100.0, 3.9944379299096683e-2, 1.2517562165912658e-1),
    (0, 300.0, 2.3042558415085462e-2, 7.2330031739607302e-2),
    (0, 700.0, 1.5081295651531358e-2, 4.7362369454613572e-2),
    (1, 1e-6, 7.9788376291883648e-4, 1.2533141373155003e+3),
    (1, 1e-3, 2.52061107074578e-2, 3.963327297606011e+1),
    (1, 0.1, 2.2868316607552338e-1, 3.963327297606011),
    (1, 0.5, 3.5663583483745894e-1, 1.772453850905516),
    (1, 1.0, 3.4495131388824463e-1, 1.2533141373155003),
    (1, 1.9, 2.8294853034646389e-1, 9.0924964054951337e-1),
    (1, 2.0, 2.7692804543535513e-1, 8.8622692545275801e-1),
    (1, 2.1, 2.7116810063755102e-1, 8.6486892119830082e-1),
    (1, 5.0, 1.7840431170432102e-1, 5.6049912163979287e-1),
    (1, 10.0, 1.2615662584097982e-1, 3.963327297606011e-1),
    (1, 12.0, 1.1516471648609754e-1, 3.6180062727913383e-1),
    (1, 15.0, 1.0300645387284092e-1, 3.2360431875928321e-1),
    (1, 19.9, 8.9430061130268633e-2, 2.8095282305693806e-1),
    (1, 20.1, 8.8984023131858402e-2, 2.7955155335791058e-1),
    (1, 30.0, 7.2836562039471938e-2, 2.2882280821594225e-1),
    (1, 50.0, 5.6418958354775629e-2, 1.772453850905516e-1),
    (1, 100.0, 3.9894228040143268e-2, 1.2533141373155003e-1),
    (1, 300.0, 2.3032943298089032e-2, 7.2360125455826766e-2),
    (1, 700.0, 1.5078600877302686e-2, 4.737082174254673e-2),
    (2, 1e-6, 4.999995000003125e-7, 1.0000009999932843e+6),
    (2, 1e-3, 4.9950031235422134e-4, 1.0009967345590685e+3),
    (2, 0.1, 4.5298446808809325e-2, 1.0890182683049697e+1),
    (2, 0.5, 1.564208031848717e-1, 2.7310097082117857),
    (2, 1.0, 2.0791041534970845e-1, 1.6361534862632582),
    (2, 1.9, 2.1661191117477051e-1, 1.06747092981457),
    (2, 2.0, 2.1526928924893766e-1, 1.0334768470686886),
    (2, 2.1, 2.1374767210633227e-1, 1.0023680527405791),
    (2, 5.0, 1.6397226694454236e-1, 6.0027385878831258e-1),
    (2, 10.0, 1.2126268138445552e-1, 4.1076657059578875e-1),
    (2, 12.0, 1.1146429929018098e-1, 3.7283175336970988e-1),
    (2, 15.0, 1.0037417504516666e-1, 3.3153489496662908e-1),
    (2, 19.9, 8.7717102131706098e-2, 2.8616744008632065e-1),
    (2, 20.1, 8.7296851843201595e-2, 2.8468928452815896e-1),
    (2, 30.0, 7.1916330598647555e-2, 2.316541293777118e-1),
    (2, 50.0, 5.59931238928954e-2, 1.7856655855881557e-1),
    (2, 100.0, 3.9744153025130253e-2, 1.2579995047957853e-1),
    (2, 300.0, 2.3004122040268951e-2, 7.2450481667258409e-2),
    (2, 700.0, 1.5070519444716847e-2, 4.7396187653494544e-2),
    (3, 1e-6, 2.6596125430626109e-10, 1.2533153906296376e+9),
    (3, 1e-3, 8.4020363423501933e-6, 3.967290624903617e+4),
    (3, 0.1, 7.6176951894028296e-3, 4.3596600273666121e+1),
    (3, 0.5, 5.8471662583135768e-2, 5.3173615527165481),
    (3, 1.0, 1.079819330263761e-1, 2.5066282746310005),
    (3, 1.9, 1.4697748971575463e-1, 1.3878020829439941),
    (3, 2.0, 1.4879751539472359e-1, 1.329340388179137),
    (3, 2.1, 1.502968881332445e-1, 1.2767112646260631),
    (3, 5.0, 1.42739649185369e-1, 6.7259894596775144e-1),
    (3, 10.0, 1.1354096377693821e-1, 4.3596600273666121e-1),
    (3, 12.0, 1.0556765678761799e-1, 3.9195067955239498e-1),
    (3, 15.0, 9.6139356948004133e-2, 3.4517794000990209e-1),
    (3, 19.9, 8.4936088209149607e-2, 2.9507105537135706e-1),
    (3, 20.1, 8.4556957304402761e-2, 2.9345959083840365e-1),
    (3, 30.0, 7.0408676638156207e-2, 2.3645023515647366e-1),
    (3, 50.0, 5.5290579187680116e-2, 1.8079029279236263e-1),
    (3, 100.0, 3.9495285759741835e-2, 1.2658472786886553e-1),
    (3, 300.0, 2.2956166820428735e-2, 7.2601325874012855e-2),
    (3, 700.0, 1.5057060018906539e-2, 4.7438494345036083e-2),
    (4, 1e-6, 1.2499987500007292e-13, 2.0000020000005e+12),
    (4, 1e-3, 1.2487507288542741e-7, 2.0020004998341393e+6),
    (4, 0.1, 1.1319896061145963e-3, 2.2048597976325683e+2),
    (4, 0.5, 1.935205770966328e-2, 1.2448148218621052e+1),
    (4, 1.0, 4.9938776894223539e-2, 4.4167700523334115),
    (4, 1.9, 9.0230624810435764e-2, 1.9851042270828821),
    (4, 2.0, 9.323903330473338e-2, 1.87504506213946),
    (4, 2.1, 9.5993882996441656e-2, 1.7776533932369755),
    (4, 5.0, 1.1795190583151141e-1, 7.8791710782884402e-1),
    (4, 10.0, 1.035808008865375e-1, 4.7378524855575642e-1),
    (4, 12.0, 9.784883799841028e-2, 4.2033350405069653e-1),
    (4, 15.0, 9.0516308109467167e-2, 3.6520700616799345e-1),
    (4, 19.9, 8.1192799705424157e-2, 3.079960461495807e-1),
    (4, 20.1, 8.086750970586702e-2, 3.0618664633367161e-1),
    (4, 30.0, 6.8351524442327457e-2, 2.4333027424143452e-1),
    (4, 50.0, 5.4321901691738377e-2, 1.8394981819978196e-1),
    (4, 100.0, 3.9149496238594078e-2, 1.2769162066871815e-1),
    (4, 300.0, 2.2889197601483669e-2, 7.2813034950722358e-2),
    (4, 700.0, 1.5038237024546452e-2, 4.7497787133623557e-2),
    (5, 1e-6, 5.3192250861250699e-17, 3.759946171890166e+15),
    (5, 1e-3, 1.6804072204584046e-9, 1.1901875838038149e+8),
    (5, 0.1, 1.5231039343849565e-4, 1.3118613355075896e+3),
    (5, 0.5, 5.8058593386443269e-3, 3.3676623167204805e+1),
    (5, 1.0, 2.1005514809116314e-2, 8.7731989612085018),
    (5, 1.9, 5.0878809742640785e-2, 3.1005160873031883),
    (5, 2.0, 5.3731772343269742e-2, 2.8802375077214635),
    (5, 2.1, 5.6458260447201736e-2, 2.688742156378391),
    (5, 5.0, 9.2760522193099625e-2, 9.6405848922044374e-1),
    (5, 10.0, 9.2094336707898353e-2, 5.2712253058159946e-1),
    (5, 12.0, 8.877280228919304e-2, 4.5978829716723258e-1),
    (5, 15.0, 8.3778582483240089e-2, 3.9263990676126363e-1),
    (5, 19.9, 7.6625625721854119e-2, 3.2543589673101199e-1),
    (5, 20.1, 7.6363581743141572e-2, 3.233514922890156e-1),
    (5, 30.0, 6.5795694375656317e-2, 2.5246783173158961e-1),
    (5, 50.0, 5.3101523603514822e-2, 1.8809280265809336e-1),
    (5, 100.0, 3.8709369467351013e-2, 1.2912895556761599e-1),
    (5, 300.0, 2.2803381629884745e-2, 7.3086138714566894e-2),
    (5, 700.0, 1.5014070620078801e-2, 4.7574129575454028e-2),
    (6, 1e-6, 2.0833312500011719e-20, 8.000008000003e+18),
    (6, 1e-3, 2.0812511713977246e-11, 8.0080030003332917e+9),
    (6, 0.1, 1.8862564225473262e-5, 8.8303293732133227e+3),
    (6, 0.5, 1.6043415075654608e-3, 1.023161954571802e+2),
    (6, 1.0, 8.1553077728142938e-3, 1.9303233695596904e+1),
    (6, 1.9, 2.6652701047537327e-2, 5.2466377236732692),
    (6, 2.0, 2.8791222639470898e-2, 4.7835669713476086),
    (6, 2.1, 3.0902180684538644e-2, 4.3883745160491038),
    (6, 5.0, 6.9610742279333229e-2, 1.2306075450513878),
    (6, 10.0, 7.9830361029840517e-2, 6.0028067001809132e-1),
    (6, 12.0, 7.884801995737755e-2, 5.1294292138660872e-1),
    (6, 15.0, 7.6236492882642077e-2, 4.2892342994476067e-1),
    (6, 19.9, 7.1396941386897222e-2, 3.4807619308121124e-1),
    (6, 20.1, 7.1203815085815123e-2, 3.4562195046520803e-1),
    (6, 30.0, 6.2802794006337227e-2, 2.640981659432364e-1),
    (6, 50.0, 5.164737175755633e-2, 1.9328254401479813e-1),
    (6, 100.0, 3.817817317558649e-2, 1.3090761530632726e-1),
    (6, 300.0, 2.2698932738915835e-2, 7.3421322133268041e-2),
    (6, 700.0, 1.4984586661719439e-2, 4.7667603579972393e-2),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn scaled_values_match_high_precision_reference() {
    for &(two_nu, x, i_ref, k_ref) in REFERENCE {
        let o = BesselOrder::new(two_nu);
        let i = bessel_i_scaled(o, x).unwrap();
        let k = bessel_k_scaled(o, x).unwrap();
        assert!(rel(i, i_ref) <= 1e-12, "I nu={o} x={x}: {i} vs {i_ref}, rel {}", rel(i, i_ref));
        assert!(rel(k, k_ref) <= 1e-12, "K nu={o} x={x}: {k} vs {k_ref}, rel {}", rel(k, k_ref));
    }
}

#[test]
fn unscaled_values_match_reference_inside_range() {
    for &(two_nu, x, i_ref, k_ref) in REFERENCE {
        if x > MAX_UNSCALED_ARG {
            continue;
        }
        let o = BesselOrder::new(two_nu);
        let i = bessel_i(o, x).unwrap();
        let k = bessel_k(o, x).unwrap();
        // the reference is scaled; exp() contributes its own rounding at large x
        let tol = 1e-12 + 4.0 * f64::EPSILON * x;
        assert!(rel(i, i_ref * x.exp()) <= tol, "I nu={o} x={x}");
        assert!(rel(k, k_ref * (-x).exp()) <= tol, "K nu={o} x={x}");
    }
}

/// Ascending series `sum (x/2)^{2k+1} / (k! (k+1)!)`, 40 terms.
fn i1_series_oracle(x: f64) -> f64 {
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..40 {
        let k = k as f64;
        term *= 0.25 * x * x / (k * (k + 1.0));
        sum += term;
    }
    sum
}

#[test]
fn i1_at_two_matches_ascending_series() {
    let oracle = i1_series_oracle(2.0);
    assert!(rel(oracle, 1.590_636_854_637_329) < 1e-15);
    let got = bessel_i(BesselOrder::new(2), 2.0).unwrap();
    assert!(rel(got, oracle) < 1e-13);
}

/// Adaptive Simpson on `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[test]
fn k0_matches_integral_representation() {
    // K_0(x) = int_0^inf exp(-x cosh t) dt; the integrand is below 1e-300 past t = 7.
    let x = 1.0;
    let oracle = adaptive_simpson(&|t: f64| (-x * t.cosh()).exp(), 0.0, 7.0, 1e-15);
    assert!(rel(oracle, 0.421_024_438_240_708_3) < 1e-12);
    let got = bessel_k(BesselOrder::new(0), x).unwrap();
    assert!(rel(got, oracle) < 1e-12);
}

const ORDERS: [u32; 5] = [0, 1, 2, 3, 4];

fn log_grid(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(move |i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().clamp(lo, hi))
}

#[test]
fn wronskian_identity() {
    for two_nu in ORDERS {
        let o = BesselOrder::new(two_nu);
        for x in log_grid(0.5, 100.0, 60) {
            let lhs = bessel_i_scaled(o, x).unwrap() * bessel_k_scaled(o.next(), x).unwrap()
                + bessel_i_scaled(o.next(), x).unwrap() * bessel_k_scaled(o, x).unwrap();
            assert!(rel(lhs, 1.0 / x) <= 1e-12, "nu={o} x={x}: {}", rel(lhs, 1.0 / x));
        }
    }
}

#[test]
fn derivative_identities_by_centered_differences() {
    for two_nu in ORDERS {
        let o = BesselOrder::new(two_nu);
        let nu = o.nu();
        let wi = |z: f64| z.powf(-nu) * bessel_i(o, z).unwrap();
        let wk = |z: f64| z.powf(-nu) * bessel_k(o, z).unwrap();
        for x in log_grid(0.1, 50.0, 40) {
            let h = 1e-5 * x;
            let di = (wi(x + h) - wi(x - h)) / (2.0 * h);
            let dk = (wk(x + h) - wk(x - h)) / (2.0 * h);
            let ei = x.powf(-nu) * bessel_i(o.next(), x).unwrap();
            let ek = -x.powf(-nu) * bessel_k(o.next(), x).unwrap();
            assert!(rel(di, ei) <= 1e-6, "I' nu={o} x={x}");
            assert!(rel(dk, ek) <= 1e-6, "K' nu={o} x={x}");
        }
    }
}

#[test]
fn large_argument_envelope() {
    for two_nu in ORDERS {
        let o = BesselOrder::new(two_nu);
        for x in log_grid(20.0, 600.0, 30) {
            let i = bessel_i_scaled(o, x).unwrap() * (2.0 * std::f64::consts::PI * x).sqrt();
            let k = bessel_k_scaled(o, x).unwrap() * (2.0 * x / std::f64::consts::PI).sqrt();
            assert!((i - 1.0).abs() <= 0.1, "nu={o} x={x}: {i}");
            assert!((k - 1.0).abs() <= 0.1, "nu={o} x={x}: {k}");
        }
    }
}

#[test]
fn monotonicity_in_argument() {
    for two_nu in ORDERS {
        let o = BesselOrder::new(two_nu);
        let xs: Vec<f64> = log_grid(1e-6, 700.0, 400).collect();
        for w in xs.windows(2) {
            assert!(bessel_i(o, w[1]).unwrap() > bessel_i(o, w[0]).unwrap());
            let (k0, k1) = (bessel_k(o, w[0]).unwrap(), bessel_k(o, w[1]).unwrap());
            assert!(k1 < k0 && k1 > 0.0);
        }
    }
}
