#include <benchmark/benchmark.h>

#include "mpvr/aes.hpp"
#include "mpvr/attenuation.hpp"
#include "mpvr/campaign.hpp"

namespace {

void BM_Simulate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  mpvr::CampaignSpec spec = mpvr::default_scenario();
  mpvr::RegulatorConfig reg =
      mpvr::RegulatorConfig::from_total(n, spec.regulator->c_tot(),
                                        spec.regulator->r_on, spec.regulator->f_sw);
  spec.regulator = reg;
  const double dt = spec.resolved_dt();
  const double duration = spec.resolved_duration();
  for (auto _ : state) {
    auto tr = mpvr::simulate(reg, spec.load, spec.glitch, duration, dt, 1);
    benchmark::DoNotOptimize(tr.v_out.back());
  }
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FirResponse(benchmark::State& state) {
  const auto spec = mpvr::FirSpec::moving_average(32, 32 * 60e6);
  double f = 1e6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpvr::fir_response(spec, f));
    f += 1e3;
  }
}
BENCHMARK(BM_FirResponse);

void BM_Aes128(benchmark::State& state) {
  const mpvr::Block key = mpvr::block_from_hex("000102030405060708090a0b0c0d0e0f");
  mpvr::Block pt = mpvr::block_from_hex("00112233445566778899aabbccddeeff");
  for (auto _ : state) {
    pt = mpvr::aes128_encrypt(key, pt);
    benchmark::DoNotOptimize(pt[0]);
  }
}
BENCHMARK(BM_Aes128);

}  // namespace

BENCHMARK_MAIN();
