#pragma once

// Shared plumbing for the experiment drivers.

#include "config.hpp"
#include "experiments.hpp"
#include "measures.hpp"
#include "metrics.hpp"
#include "potentials.hpp"
#include "rng.hpp"
#include "stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rcar::detail {

/// Replica streams of different experiment stages never collide.
enum class Stream : std::uint64_t {
  Data = 1,
  Reversibility,
  Posterior,
  ProjectionOneStep,
  ProjectionChain,
  InnovationMoment,
  InnovationChain,
  MseChain,
  Drift,
  Contraction,
  Smallset,
  Triangle,
  Tail,
  Bootstrap,
};

std::uint64_t stream_id(Stream family, std::uint64_t index);
RngStream make_stream(std::uint64_t seed, Stream family, std::uint64_t index);

std::size_t replicas_or(const RunOptions &opts, std::size_t fallback);
std::uint64_t steps_or(const Config &cfg, std::uint64_t fallback);
std::vector<double> sweep_or(const Config &cfg, std::vector<double> fallback);

BasisSpec basis_from(const Config &cfg);
SemimetricParams semimetric_from(const Config &cfg, double q);

enum class PriorKind { Gamma, Gaussian };
FieldVector draw_prior(PriorKind kind, const Config &cfg, const BasisSpec &basis, RngStream &rng);

/// SSL observations: read from potential.data_file, or generated from a
/// prior-drawn truth with the potential.data_seed stream.
ObservationData ssl_data(const Config &cfg, const BasisSpec &basis, PriorKind truth_prior);
Potential ssl_potential(const Config &cfg, const BasisSpec &basis, const ObservationData &data);

/// Summary skeleton: experiment name, seed, replicas, resolved config, build id.
nlohmann::ordered_json base_summary(const std::string &name, const Config &cfg, const RunOptions &opts,
                                    std::size_t replicas);

double z_two_sided(double confidence);

} // namespace rcar::detail
