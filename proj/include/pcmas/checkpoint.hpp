#pragma once

#include <iosfwd>
#include <string>

#include "pcmas/adam.hpp"
#include "pcmas/hypernet.hpp"
#include "pcmas/mlp.hpp"
#include "pcmas/serialize.hpp"

namespace pcmas::nn {

/// One network together with its optimizer state and the seed it was
/// initialized from. Checkpoints of larger systems are built from these.
struct NetworkState {
  MlpSpec spec;
  Vector params;
  AdamState opt;
  std::uint64_t init_seed = 0;

  static NetworkState fresh(const MlpSpec& spec, std::uint64_t seed);
};

/// Hypernetwork counterpart; `phi` parameterizes the generator.
struct HypernetState {
  HypernetSpec spec;
  Vector phi;
  AdamState opt;
  std::uint64_t init_seed = 0;

  static HypernetState fresh(const HypernetSpec& spec, std::uint64_t seed);
};

void write_mlp_spec(io::BinaryWriter& w, const MlpSpec& spec);
MlpSpec read_mlp_spec(io::BinaryReader& r);

void write_hyper_spec(io::BinaryWriter& w, const HypernetSpec& spec);
HypernetSpec read_hyper_spec(io::BinaryReader& r);

void write_adam(io::BinaryWriter& w, const AdamState& s);
AdamState read_adam(io::BinaryReader& r);

void write_network(io::BinaryWriter& w, const NetworkState& n);
NetworkState read_network(io::BinaryReader& r);

void write_hypernet(io::BinaryWriter& w, const HypernetState& h);
HypernetState read_hypernet(io::BinaryReader& r);

/// Single-network checkpoint files (versioned; bit-exact reload).
void save_network(const std::string& path, const NetworkState& n);
NetworkState load_network(const std::string& path);

}  // namespace pcmas::nn
