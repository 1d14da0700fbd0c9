#include "mcnsim/platform.hpp"

#include <cmath>
#include <string>

namespace mcnsim {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kInvalidInput, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PowerParams::validate() const {
  require(std::isfinite(omega) && omega > 0.0 && omega <= 1.0, "power.omega must lie in (0, 1]");
  require(finite_positive(c_eff), "power.c_eff must be > 0");
  require(finite_positive(v_s), "power.v_s must be > 0");
  require(finite_positive(freq), "power.freq must be > 0");
  require(finite_positive(alpha), "power.alpha must be > 0");
  require(finite_positive(beta), "power.beta must be > 0");
  require(finite_positive(temp_k), "power.temp_k must be > 0");
}

void Platform::validate() const {
  require(mesh.rows > 0 && mesh.cols > 0, "mesh dimensions must be positive");
  require(cores_per_node > 0, "cores_per_node must be positive");
  const std::size_t n = num_cores();
  require(transfer_rate.rows() == n && transfer_rate.cols() == n,
          "delta must be an N x N matrix (N = " + std::to_string(n) + ")");
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      if (k == m) continue;
      require(finite_positive(transfer_rate(k, m)), "delta must be positive off-diagonal");
      require(transfer_rate(k, m) == transfer_rate(m, k), "delta must be symmetric");
    }
  }
  require(startup.size() == n, "startup must have N entries");
  for (Time l : startup) require(std::isfinite(l) && l >= 0.0, "startup entries must be >= 0");
  require(comp_cost_rate.size() == n, "eta must have N entries");
  for (double e : comp_cost_rate) require(finite_positive(e), "eta entries must be > 0");
  require(std::isfinite(comm_cost_rate) && comm_cost_rate >= 0.0, "zeta_comm must be >= 0");
  require(std::isfinite(hop_latency) && hop_latency >= 0.0, "hop_latency must be >= 0");
  require(power.size() == n, "power must have N entries");
  for (const auto& pp : power) pp.validate();
  require(finite_positive(link_bandwidth), "link_bandwidth must be > 0");
  require(finite_positive(time_unit_seconds), "time_unit_seconds must be > 0");
}

Platform Platform::uniform(MeshDim mesh, std::size_t cores_per_node, double rate, Time startup,
                           double eta, double zeta_comm, Time hop_latency,
                           const PowerParams& power) {
  Platform p;
  p.mesh = mesh;
  p.cores_per_node = cores_per_node;
  const std::size_t n = p.num_cores();
  p.transfer_rate = Matrix(n, n, rate);
  for (std::size_t k = 0; k < n; ++k) p.transfer_rate(k, k) = 0.0;
  p.startup.assign(n, startup);
  p.comp_cost_rate.assign(n, eta);
  p.comm_cost_rate = zeta_comm;
  p.hop_latency = hop_latency;
  p.power.assign(n, power);
  return p;
}

Platform Platform::default_mcn() {
  // 10 bytes/ns matches the per-vault bandwidth of the stacked memory.
  return uniform({4, 4}, 16, 10.0, 10.0, 1.0, 0.1, 1.0);
}

std::size_t node_index(NodeCoord node, const Platform& p) noexcept {
  return node.row * p.mesh.cols + node.col;
}

NodeCoord node_at(std::size_t index, const Platform& p) noexcept {
  return {index / p.mesh.cols, index % p.mesh.cols};
}

NodeCoord node_of(CoreId core, const Platform& p) {
  if (core >= p.num_cores()) {
    throw Error(ErrorKind::kCoreOutOfRange,
                "core " + std::to_string(core) + " >= " + std::to_string(p.num_cores()));
  }
  return node_at(core / p.cores_per_node, p);
}

std::size_t hop_count(NodeCoord a, NodeCoord b) noexcept {
  const auto diff = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
  return diff(a.row, b.row) + diff(a.col, b.col);
}

std::vector<LinkId> xy_route(NodeCoord src, NodeCoord dst, const Platform& p) {
  std::vector<LinkId> route;
  route.reserve(hop_count(src, dst));
  NodeCoord at = src;
  while (at.col != dst.col) {
    const bool east = dst.col > at.col;
    route.push_back({node_index(at, p), east ? Direction::kEast : Direction::kWest});
    at.col = east ? at.col + 1 : at.col - 1;
  }
  while (at.row != dst.row) {
    const bool south = dst.row > at.row;
    route.push_back({node_index(at, p), south ? Direction::kSouth : Direction::kNorth});
    at.row = south ? at.row + 1 : at.row - 1;
  }
  return route;
}

void LinkDelays::set(LinkId link, Time delay) {
  if (link.index() >= delay_.size()) delay_.resize(link.index() + 1, 0.0);
  delay_[link.index()] = delay;
}

Time packet_latency(CoreId src, CoreId dst, const Platform& p, const LinkDelays& congestion) {
  const NodeCoord a = node_of(src, p);
  const NodeCoord b = node_of(dst, p);
  if (a == b) return 0.0;
  Time total = 0.0;
  for (const LinkId& link : xy_route(a, b, p)) total += p.hop_latency + congestion.at(link);
  return total;
}

}  // namespace mcnsim
