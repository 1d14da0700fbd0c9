#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "mcnsim/types.hpp"

namespace mcnsim {

struct MeshDim {
  std::size_t rows = 4;
  std::size_t cols = 4;

  std::size_t nodes() const noexcept { return rows * cols; }
  bool operator==(const MeshDim&) const = default;
};

struct NodeCoord {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const NodeCoord&) const = default;
};

/// Per-core electrical parameters of the two-state (idle/active) power model.
///
/// Static power `alpha * temp_k * beta` is drawn whenever the core is powered;
/// dynamic power `omega * c_eff * v_s^2 * freq` only while it executes a task.
struct PowerParams {
  double omega = 0.5;     // switching factor, (0, 1]
  double c_eff = 1e-9;    // farads
  double v_s = 1.0;       // volts
  double freq = 2e9;      // Hz
  double alpha = 0.01;
  double beta = 0.03;
  double temp_k = 330.0;  // kelvin, held constant

  double static_watts() const noexcept { return alpha * temp_k * beta; }
  double dynamic_watts() const noexcept { return omega * c_eff * v_s * v_s * freq; }

  void validate() const;
  bool operator==(const PowerParams&) const = default;
};

// Directed mesh link, identified by its source node and outgoing direction.
enum class Direction : std::size_t { kEast = 0, kWest = 1, kSouth = 2, kNorth = 3 };

struct LinkId {
  std::size_t node = 0;  // row-major node index
  Direction dir = Direction::kEast;

  std::size_t index() const noexcept { return node * 4 + static_cast<std::size_t>(dir); }
  bool operator==(const LinkId&) const = default;
};

/// The memory-centric network: a 2-D mesh of memory nodes, each hosting
/// `cores_per_node` near-memory cores. Cores are numbered node-major, so core
/// `c` lives on node `c / cores_per_node` laid out row-major over the mesh.
struct Platform {
  MeshDim mesh;
  std::size_t cores_per_node = 16;
  std::size_t num_cpu_cores = 16;  // informational only
  Matrix transfer_rate;            // N x N, bytes per time unit
  std::vector<Time> startup;       // N
  std::vector<double> comp_cost_rate;  // eta, N
  double comm_cost_rate = 0.1;         // zeta_comm
  Time hop_latency = 1.0;
  double link_bandwidth = 256.0;   // bytes per time unit on each directed mesh link
  std::vector<PowerParams> power;  // N
  double time_unit_seconds = 1e-9;

  std::size_t num_cores() const noexcept { return mesh.nodes() * cores_per_node; }

  /// Throws `Error(kInvalidInput)` naming the first violated invariant.
  void validate() const;

  /// Homogeneous platform; every per-core vector is filled with the scalar.
  static Platform uniform(MeshDim mesh, std::size_t cores_per_node, double rate,
                          Time startup, double eta, double zeta_comm, Time hop_latency,
                          const PowerParams& power = {});

  /// 4x4 mesh, 16 cores per node (256 cores).
  static Platform default_mcn();
};

std::size_t node_index(NodeCoord node, const Platform& p) noexcept;
NodeCoord node_at(std::size_t index, const Platform& p) noexcept;

/// Node hosting `core`. Throws `Error(kCoreOutOfRange)`.
NodeCoord node_of(CoreId core, const Platform& p);

std::size_t hop_count(NodeCoord a, NodeCoord b) noexcept;

/// Links traversed under dimension-ordered routing: first along the row
/// (X, columns), then along the column (Y, rows).
std::vector<LinkId> xy_route(NodeCoord src, NodeCoord dst, const Platform& p);

/// Per-link queueing delays, indexed by `LinkId::index()`.
class LinkDelays {
 public:
  LinkDelays() = default;
  explicit LinkDelays(const Platform& p) : delay_(p.mesh.nodes() * 4, 0.0) {}

  Time at(LinkId link) const noexcept {
    return link.index() < delay_.size() ? delay_[link.index()] : 0.0;
  }
  void set(LinkId link, Time delay);

 private:
  std::vector<Time> delay_;
};

/// Mesh traversal time between two cores: zero within a node, otherwise
/// `hops * hop_latency` plus the queueing delay on every traversed link.
Time packet_latency(CoreId src, CoreId dst, const Platform& p,
                    const LinkDelays& congestion = {});

}  // namespace mcnsim
