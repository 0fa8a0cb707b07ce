#include <benchmark/benchmark.h>

#include "storetwin/mqtt/codec.hpp"

using namespace storetwin::mqtt;

namespace {

Publish sample_publish(std::size_t payload_size) {
    return Publish{"store/store1/sensor/temp", Bytes(payload_size, 'x'), 1, false, false, 42};
}

void BM_EncodePublish(benchmark::State& state) {
    const Packet p = sample_publish(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(encode_packet(p));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodePublish)->Arg(32)->Arg(1024)->Arg(65536);

void BM_DecodePublish(benchmark::State& state) {
    const Bytes wire = encode_packet(sample_publish(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(decode_packet(wire));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(wire.size()));
}
BENCHMARK(BM_DecodePublish)->Arg(32)->Arg(1024)->Arg(65536);

void BM_DecodeConnect(benchmark::State& state) {
    Connect c;
    c.client_id = "storetwin-store1";
    c.will = Will{"store/store1/alarm", Bytes{'o', 'f', 'f'}, 0, true};
    const Bytes wire = encode_packet(c);
    for (auto _ : state) benchmark::DoNotOptimize(decode_packet(wire));
}
BENCHMARK(BM_DecodeConnect);

}  // namespace
