use xbarnas_core::eval::{train_tiny_net, tiny_net_eval, TinyNetParams};
use xbarnas_core::imc::RpuConfig;
use xbarnas_core::space::fixtures;
use xbarnas_core::seeds::{derive_rng, tag};

fn main() {
    let rpu = RpuConfig::ideal();
    for lr in [0.1, 0.5, 1.0, 2.0] {
        for epochs in [300usize, 800] {
            let params = TinyNetParams { learning_rate: lr, epochs, ..Default::default() };
            let net = train_tiny_net(&fixtures::analognas_t100(), &rpu, &params, 1);
            println!("lr={lr} epochs={epochs} digital={:.4}", net.digital_accuracy());
        }
    }
    // Gap comparison sketch at the best setting.
    let rpu = RpuConfig::default();
    for hwa in [false, true] {
        let params = TinyNetParams { learning_rate: 1.0, epochs: 400, hwa_noise: hwa, ..Default::default() };
        let mut gaps = vec![];
        for seed in 0..6u64 {
            let net = train_tiny_net(&fixtures::analognas_t100(), &rpu, &params, seed);
            let mut s = 0.0; let mut m = 0.0;
            for trial in 0..6u64 {
                let base = derive_rng(seed, &[tag::EVAL_TRIAL, trial]);
                s += tiny_net_eval(&net, &rpu, rpu.t0, &mut base.clone()).unwrap();
                m += tiny_net_eval(&net, &rpu, 2_592_000.0, &mut base.clone()).unwrap();
            }
            gaps.push((s - m) / 6.0);
        }
        println!("hwa={hwa} gaps={gaps:?}");
    }
}
