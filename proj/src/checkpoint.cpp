#include "pcmas/checkpoint.hpp"

#include <fstream>

namespace pcmas::nn {

namespace {
constexpr std::uint32_t kNetworkFileVersion = 1;
constexpr const char* kNetworkMagic = "pcmas-network";
}  // namespace

NetworkState NetworkState::fresh(const MlpSpec& spec, std::uint64_t seed) {
  NetworkState n;
  n.spec = spec;
  n.params = init_params(spec, seed);
  n.opt = AdamState::zeros(n.params.size());
  n.init_seed = seed;
  return n;
}

HypernetState HypernetState::fresh(const HypernetSpec& spec, std::uint64_t seed) {
  HypernetState h;
  h.spec = spec;
  h.phi = init_params(spec, seed);
  h.opt = AdamState::zeros(h.phi.size());
  h.init_seed = seed;
  return h;
}

void write_mlp_spec(io::BinaryWriter& w, const MlpSpec& spec) {
  w.ints(spec.layer_sizes);
  w.u32(static_cast<std::uint32_t>(spec.hidden_activation));
  w.u32(static_cast<std::uint32_t>(spec.output_head));
}

MlpSpec read_mlp_spec(io::BinaryReader& r) {
  MlpSpec spec;
  spec.layer_sizes = r.ints();
  spec.hidden_activation = static_cast<Activation>(r.u32());
  spec.output_head = static_cast<OutputHead>(r.u32());
  validate(spec);
  return spec;
}

void write_hyper_spec(io::BinaryWriter& w, const HypernetSpec& spec) {
  w.i64(spec.context_dim);
  w.ints(spec.hidden);
  write_mlp_spec(w, spec.target);
}

HypernetSpec read_hyper_spec(io::BinaryReader& r) {
  HypernetSpec spec;
  spec.context_dim = static_cast<int>(r.i64());
  spec.hidden = r.ints();
  spec.target = read_mlp_spec(r);
  validate(spec);
  return spec;
}

void write_adam(io::BinaryWriter& w, const AdamState& s) {
  w.vec(s.m);
  w.vec(s.v);
  w.i64(s.step);
  w.f64(s.beta1);
  w.f64(s.beta2);
  w.f64(s.eps);
  w.i64(s.skipped);
}

AdamState read_adam(io::BinaryReader& r) {
  AdamState s;
  s.m = r.vec();
  s.v = r.vec();
  s.step = r.i64();
  s.beta1 = r.f64();
  s.beta2 = r.f64();
  s.eps = r.f64();
  s.skipped = r.i64();
  return s;
}

void write_network(io::BinaryWriter& w, const NetworkState& n) {
  write_mlp_spec(w, n.spec);
  w.vec(n.params);
  write_adam(w, n.opt);
  w.u64(n.init_seed);
}

NetworkState read_network(io::BinaryReader& r) {
  NetworkState n;
  n.spec = read_mlp_spec(r);
  n.params = r.vec();
  n.opt = read_adam(r);
  n.init_seed = r.u64();
  if (n.params.size() != param_count(n.spec)) {
    throw io::CorruptFileError("network checkpoint: parameter count mismatch");
  }
  return n;
}

void write_hypernet(io::BinaryWriter& w, const HypernetState& h) {
  write_hyper_spec(w, h.spec);
  w.vec(h.phi);
  write_adam(w, h.opt);
  w.u64(h.init_seed);
}

HypernetState read_hypernet(io::BinaryReader& r) {
  HypernetState h;
  h.spec = read_hyper_spec(r);
  h.phi = r.vec();
  h.opt = read_adam(r);
  h.init_seed = r.u64();
  if (h.phi.size() != param_count(h.spec)) {
    throw io::CorruptFileError("hypernet checkpoint: parameter count mismatch");
  }
  return h;
}

void save_network(const std::string& path, const NetworkState& n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  io::BinaryWriter w(out);
  w.str(kNetworkMagic);
  w.u32(kNetworkFileVersion);
  write_network(w, n);
}

NetworkState load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  io::BinaryReader r(in);
  io::expect_tag(r, kNetworkMagic);
  const std::uint32_t version = r.u32();
  if (version != kNetworkFileVersion) {
    throw io::CorruptFileError("unsupported network checkpoint version " +
                               std::to_string(version));
  }
  return read_network(r);
}

}  // namespace pcmas::nn
