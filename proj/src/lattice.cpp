#include "zzpulse/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace zzp {

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::honeycomb: return "honeycomb";
    case Geometry::square: return "square";
    case Geometry::chain: return "chain";
    case Geometry::custom: return "custom";
  }
  return "custom";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "honeycomb") return Geometry::honeycomb;
  if (s == "square") return Geometry::square;
  if (s == "chain") return Geometry::chain;
  if (s == "custom") return Geometry::custom;
  throw std::invalid_argument("unknown geometry '" + s + "'");
}

namespace {

int max_degree(Geometry g) {
  switch (g) {
    case Geometry::honeycomb: return 3;
    case Geometry::square: return 4;
    case Geometry::chain: return 2;
    case Geometry::custom: return -1;
  }
  return -1;
}

}  // namespace

QubitGraph::QubitGraph(int num_qubits, std::vector<Edge> edges, Geometry geometry,
                       std::vector<SiteCoord> coords)
    : num_qubits_(num_qubits),
      edges_(std::move(edges)),
      geometry_(geometry),
      coords_(std::move(coords)) {
  if (num_qubits_ < 1) throw std::invalid_argument("QubitGraph: need at least one qubit");
  if (!coords_.empty() && static_cast<int>(coords_.size()) != num_qubits_) {
    throw std::invalid_argument("QubitGraph: coordinate count does not match qubit count");
  }
  adjacency_.resize(num_qubits_);
  edge_lookup_.resize(num_qubits_);
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.a < 0 || edge.a >= num_qubits_ || edge.b < 0 || edge.b >= num_qubits_) {
      throw std::invalid_argument("QubitGraph: edge endpoint out of range");
    }
    if (edge.a == edge.b) throw std::invalid_argument("QubitGraph: self-loop on qubit " + std::to_string(edge.a));
    if (!std::isfinite(edge.coupling) || edge.coupling == 0.0) {
      throw std::invalid_argument("QubitGraph: coupling must be finite and nonzero");
    }
    const auto key = std::minmax(edge.a, edge.b);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("QubitGraph: duplicate edge (" + std::to_string(key.first) + "," +
                                  std::to_string(key.second) + ")");
    }
    adjacency_[edge.a].push_back(edge.b);
    adjacency_[edge.b].push_back(edge.a);
    edge_lookup_[edge.a].push_back(static_cast<int>(e));
    edge_lookup_[edge.b].push_back(static_cast<int>(e));
  }
  if (const int cap = max_degree(geometry_); cap > 0) {
    for (int q = 0; q < num_qubits_; ++q) {
      if (degree(q) > cap) {
        throw std::invalid_argument("QubitGraph: qubit " + std::to_string(q) + " has degree " +
                                    std::to_string(degree(q)) + " > " + std::to_string(cap) +
                                    " for " + to_string(geometry_) + " geometry");
      }
    }
  }
}

void QubitGraph::check_qubit(int q) const {
  if (q < 0 || q >= num_qubits_) throw std::out_of_range("qubit " + std::to_string(q) + " out of range");
}

const std::vector<int>& QubitGraph::neighbors(int q) const {
  check_qubit(q);
  return adjacency_[q];
}

std::optional<int> QubitGraph::edge_index(int a, int b) const {
  if (a < 0 || a >= num_qubits_ || b < 0 || b >= num_qubits_) return std::nullopt;
  const auto& adj = adjacency_[a];
  for (std::size_t k = 0; k < adj.size(); ++k) {
    if (adj[k] == b) return edge_lookup_[a][k];
  }
  return std::nullopt;
}

double QubitGraph::coupling(int a, int b) const {
  const auto e = edge_index(a, b);
  if (!e) throw std::invalid_argument("no edge between " + std::to_string(a) + " and " + std::to_string(b));
  return edges_[*e].coupling;
}

QubitGraph QubitGraph::with_couplings(std::span<const double> couplings) const {
  if (couplings.size() != edges_.size()) {
    throw std::invalid_argument("with_couplings: expected " + std::to_string(edges_.size()) + " values");
  }
  std::vector<Edge> edges = edges_;
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e].coupling = couplings[e];
  return QubitGraph(num_qubits_, std::move(edges), geometry_, coords_);
}

int QubitGraph::color(int q) const {
  check_qubit(q);
  if (coords_.empty()) throw std::logic_error("QubitGraph::color: graph has no lattice coordinates");
  return ((coords_[q].row + coords_[q].col) % 2 + 2) % 2;
}

namespace {

QubitGraph from_sites(const std::vector<SiteCoord>& sites, const std::vector<std::pair<SiteCoord, SiteCoord>>& bonds,
                      Geometry geometry, double coupling) {
  std::map<std::pair<int, int>, int> index;
  for (std::size_t k = 0; k < sites.size(); ++k) index[{sites[k].row, sites[k].col}] = static_cast<int>(k);
  std::vector<Edge> edges;
  edges.reserve(bonds.size());
  for (const auto& [p, q] : bonds) {
    edges.push_back({index.at({p.row, p.col}), index.at({q.row, q.col}), coupling});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::minmax(x.a, x.b) < std::minmax(y.a, y.b);
  });
  for (auto& e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  return QubitGraph(static_cast<int>(sites.size()), std::move(edges), geometry, sites);
}

}  // namespace

QubitGraph build_honeycomb(int rows, int cols, double coupling) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("build_honeycomb: rows and cols must be >= 1");
  // Brick row k spans lines k and k+1 with columns [k % 2, k % 2 + 2 cols].
  auto row_lo = [](int k) { return k % 2; };
  auto row_hi = [cols](int k) { return k % 2 + 2 * cols; };
  std::vector<SiteCoord> sites;
  std::vector<std::pair<int, int>> line_range;
  for (int line = 0; line <= rows; ++line) {
    int lo = 1 << 30, hi = -1;
    if (line > 0) lo = std::min(lo, row_lo(line - 1)), hi = std::max(hi, row_hi(line - 1));
    if (line < rows) lo = std::min(lo, row_lo(line)), hi = std::max(hi, row_hi(line));
    line_range.emplace_back(lo, hi);
    for (int c = lo; c <= hi; ++c) sites.push_back({line, c});
  }
  std::vector<std::pair<SiteCoord, SiteCoord>> bonds;
  for (int line = 0; line <= rows; ++line) {
    for (int c = line_range[line].first; c < line_range[line].second; ++c) {
      bonds.push_back({{line, c}, {line, c + 1}});
    }
  }
  for (int k = 0; k < rows; ++k) {
    for (int c = row_lo(k); c <= row_hi(k); c += 2) bonds.push_back({{k, c}, {k + 1, c}});
  }
  return from_sites(sites, bonds, Geometry::honeycomb, coupling);
}

QubitGraph build_chain(int n, double coupling) {
  if (n < 2) throw std::invalid_argument("build_chain: need n >= 2");
  std::vector<SiteCoord> sites;
  std::vector<std::pair<SiteCoord, SiteCoord>> bonds;
  for (int q = 0; q < n; ++q) sites.push_back({0, q});
  for (int q = 0; q + 1 < n; ++q) bonds.push_back({{0, q}, {0, q + 1}});
  return from_sites(sites, bonds, Geometry::chain, coupling);
}

QubitGraph build_square(int rows, int cols, double coupling) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw std::invalid_argument("build_square: need at least two sites");
  }
  std::vector<SiteCoord> sites;
  std::vector<std::pair<SiteCoord, SiteCoord>> bonds;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      sites.push_back({r, c});
      if (c + 1 < cols) bonds.push_back({{r, c}, {r, c + 1}});
      if (r + 1 < rows) bonds.push_back({{r, c}, {r + 1, c}});
    }
  }
  return from_sites(sites, bonds, Geometry::square, coupling);
}

QubitGraph induced_subgraph(const QubitGraph& graph, std::span<const int> keep) {
  std::vector<int> remap(graph.num_qubits(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= graph.num_qubits()) throw std::out_of_range("induced_subgraph: bad qubit");
    if (remap[keep[k]] != -1) throw std::invalid_argument("induced_subgraph: repeated qubit");
    remap[keep[k]] = static_cast<int>(k);
  }
  std::vector<Edge> edges;
  for (const auto& e : graph.edges()) {
    if (remap[e.a] >= 0 && remap[e.b] >= 0) edges.push_back({remap[e.a], remap[e.b], e.coupling});
  }
  std::vector<SiteCoord> coords;
  if (graph.has_coords()) {
    for (int q : keep) coords.push_back(graph.coords()[q]);
  }
  return QubitGraph(static_cast<int>(keep.size()), std::move(edges), graph.geometry(), std::move(coords));
}

bool DrivingPattern::is_driven(int q) const { return std::binary_search(driven.begin(), driven.end(), q); }

namespace {

void require_lattice(const QubitGraph& graph, const char* what) {
  if (graph.geometry() == Geometry::custom || !graph.has_coords()) {
    throw std::invalid_argument(std::string(what) +
                                ": custom geometry has no built-in pattern; supply a pattern explicitly");
  }
}

// Honeycomb plane position in exact integer units: x = X * sqrt(3)/2, y = Y2 / 2.
struct HexPosition {
  long x;
  long y2;
};

HexPosition hex_position(const SiteCoord& s) {
  const bool odd = ((s.row + s.col) % 2 + 2) % 2 == 1;
  return {s.col, -3L * s.row + (odd ? 1 : 0)};
}

}  // namespace

DrivingPattern single_qubit_pattern(const QubitGraph& graph, std::optional<int> sublattice) {
  require_lattice(graph, "single_qubit_pattern");
  int s = 0;
  if (sublattice) {
    if (*sublattice != 0 && *sublattice != 1) throw std::invalid_argument("sublattice must be 0 or 1");
    s = *sublattice;
  } else if (graph.geometry() == Geometry::chain) {
    s = 1;
  } else {
    int ones = 0;
    for (int q = 0; q < graph.num_qubits(); ++q) ones += graph.color(q);
    s = (2 * ones > graph.num_qubits()) ? 1 : 0;
  }
  DrivingPattern p;
  for (int q = 0; q < graph.num_qubits(); ++q) {
    if (graph.color(q) == s) p.driven.push_back(q);
  }
  return p;
}

DrivingPattern two_qubit_pattern(const QubitGraph& graph, std::pair<int, int> target) {
  require_lattice(graph, "two_qubit_pattern");
  const auto [a, b] = target;
  if (!graph.has_edge(a, b)) {
    throw std::invalid_argument("two_qubit_pattern: (" + std::to_string(a) + "," + std::to_string(b) +
                                ") is not an edge");
  }
  const auto& coords = graph.coords();
  std::vector<char> drive(graph.num_qubits(), 0);
  switch (graph.geometry()) {
    case Geometry::honeycomb: {
      // Flip the driven sublattice across the line of bonds parallel to the
      // target bond; every bond crossing that line joins two driven qubits.
      const int u = graph.color(a) == 0 ? a : b;
      const int v = u == a ? b : a;
      const HexPosition pu = hex_position(coords[u]);
      const HexPosition pv = hex_position(coords[v]);
      const long dx = pv.x - pu.x;
      const long dy2 = pv.y2 - pu.y2;
      for (int q = 0; q < graph.num_qubits(); ++q) {
        const HexPosition pq = hex_position(coords[q]);
        const long side = 3 * dx * (2 * pq.x - pu.x - pv.x) + dy2 * (2 * pq.y2 - pu.y2 - pv.y2);
        drive[q] = (side < 0) ? graph.color(q) == 0 : graph.color(q) == 1;
      }
      break;
    }
    case Geometry::square: {
      // Plus-shaped driven center at `a` inside the complementary checkerboard.
      for (int q = 0; q < graph.num_qubits(); ++q) drive[q] = graph.color(q) != graph.color(a);
      drive[a] = 1;
      break;
    }
    case Geometry::chain: {
      const int lo = std::min(coords[a].col, coords[b].col);
      const int hi = lo + 1;
      for (int q = 0; q < graph.num_qubits(); ++q) {
        const int c = coords[q].col;
        drive[q] = c <= lo ? (lo - c) % 2 == 0 : (c - hi) % 2 == 0;
      }
      break;
    }
    case Geometry::custom: break;
  }
  DrivingPattern p;
  for (int q = 0; q < graph.num_qubits(); ++q) {
    if (drive[q]) p.driven.push_back(q);
  }
  p.gate_pairs.emplace_back(a, b);
  for (const auto& e : graph.edges()) {
    if (drive[e.a] && drive[e.b] && std::minmax(e.a, e.b) != std::minmax(a, b)) {
      p.gate_pairs.emplace_back(e.a, e.b);
    }
  }
  return p;
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::undriven_without_driven_neighbor: return "undriven_without_driven_neighbor";
    case ViolationKind::edge_without_driven_endpoint: return "edge_without_driven_endpoint";
    case ViolationKind::adjacent_driven_outside_gate_pair: return "adjacent_driven_outside_gate_pair";
    case ViolationKind::malformed_gate_pair: return "malformed_gate_pair";
    case ViolationKind::qubit_out_of_range: return "qubit_out_of_range";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(kind) << ":";
  for (int q : qubits) os << ' ' << q;
  return os.str();
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_pattern(const QubitGraph& graph, const DrivingPattern& pattern) {
  ValidationReport report;
  const int n = graph.num_qubits();
  std::vector<char> driven(n, 0);
  for (int q : pattern.driven) {
    if (q < 0 || q >= n) {
      report.violations.push_back({ViolationKind::qubit_out_of_range, {q}});
      continue;
    }
    driven[q] = 1;
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& [a, b] : pattern.gate_pairs) {
    const bool ok = a != b && graph.has_edge(a, b) && driven[a] && driven[b];
    if (!ok) {
      report.violations.push_back({ViolationKind::malformed_gate_pair, {a, b}});
      continue;
    }
    pairs.insert(std::minmax(a, b));
  }
  for (int q = 0; q < n; ++q) {
    if (driven[q]) continue;
    const auto& nb = graph.neighbors(q);
    if (std::none_of(nb.begin(), nb.end(), [&](int k) { return driven[k] != 0; })) {
      report.violations.push_back({ViolationKind::undriven_without_driven_neighbor, {q}});
    }
  }
  for (const auto& e : graph.edges()) {
    if (!driven[e.a] && !driven[e.b]) {
      report.violations.push_back({ViolationKind::edge_without_driven_endpoint, {e.a, e.b}});
    } else if (driven[e.a] && driven[e.b] && !pairs.contains(std::minmax(e.a, e.b))) {
      report.violations.push_back({ViolationKind::adjacent_driven_outside_gate_pair, {e.a, e.b}});
    }
  }
  return report;
}

int Block::global_qubit(int local) const {
  if (local < 0 || local >= size()) throw std::out_of_range("Block::global_qubit: bad local index");
  return local < num_center() ? center[local] : boundary[local - num_center()];
}

std::optional<int> Block::local_index(int global) const {
  for (int k = 0; k < size(); ++k) {
    if (global_qubit(k) == global) return k;
  }
  return std::nullopt;
}

int Block::smallest_member() const {
  int m = center.empty() ? 1 << 30 : *std::min_element(center.begin(), center.end());
  if (!boundary.empty()) m = std::min(m, *std::min_element(boundary.begin(), boundary.end()));
  return m;
}

std::vector<Block> decompose_blocks(const QubitGraph& graph, const DrivingPattern& pattern) {
  const ValidationReport report = validate_pattern(graph, pattern);
  if (!report.ok()) {
    throw std::invalid_argument("decompose_blocks: invalid pattern (" + report.violations.front().describe() +
                                (report.violations.size() > 1 ? ", ..." : "") + ")");
  }
  const int n = graph.num_qubits();
  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> members;
  for (int q : pattern.driven) {
    if (component[q] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::queue<int> frontier;
    frontier.push(q);
    component[q] = id;
    while (!frontier.empty()) {
      const int x = frontier.front();
      frontier.pop();
      members[id].push_back(x);
      for (int y : graph.neighbors(x)) {
        if (pattern.is_driven(y) && component[y] < 0) {
          component[y] = id;
          frontier.push(y);
        }
      }
    }
  }

  std::vector<Block> blocks;
  blocks.reserve(members.size());
  for (std::size_t id = 0; id < members.size(); ++id) {
    Block block;
    std::vector<int> rest = members[id];
    std::sort(rest.begin(), rest.end());
    for (const auto& [a, b] : pattern.gate_pairs) {
      if (component[a] == static_cast<int>(id)) {
        block.center = {a, b};
        std::erase(rest, a);
        std::erase(rest, b);
        break;
      }
    }
    block.center.insert(block.center.end(), rest.begin(), rest.end());
    std::set<int> boundary;
    for (int c : block.center) {
      for (int y : graph.neighbors(c)) {
        if (!pattern.is_driven(y)) boundary.insert(y);
      }
    }
    block.boundary.assign(boundary.begin(), boundary.end());
    if (block.size() > kMaxBlockSize) {
      throw std::invalid_argument("decompose_blocks: block of " + std::to_string(block.size()) +
                                  " qubits exceeds the limit of " + std::to_string(kMaxBlockSize));
    }
    for (const auto& e : graph.edges()) {
      if (component[e.a] == static_cast<int>(id) || component[e.b] == static_cast<int>(id)) {
        block.couplings.push_back({*block.local_index(e.a), *block.local_index(e.b), e.coupling});
      }
    }
    blocks.push_back(std::move(block));
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& x, const Block& y) { return x.smallest_member() < y.smallest_member(); });
  return blocks;
}

ReferenceBlock reference_block_from_string(const std::string& name) {
  static const std::map<std::string, ReferenceBlock> names = {
      {"honeycomb-1q", ReferenceBlock::honeycomb_1q}, {"honeycomb-2q", ReferenceBlock::honeycomb_2q},
      {"chain-1q", ReferenceBlock::chain_1q},         {"chain-2q", ReferenceBlock::chain_2q},
      {"square-1q", ReferenceBlock::square_1q},       {"square-2q", ReferenceBlock::square_2q}};
  const auto it = names.find(name);
  if (it == names.end()) throw std::invalid_argument("unknown block '" + name + "'");
  return it->second;
}

std::string to_string(ReferenceBlock kind) {
  switch (kind) {
    case ReferenceBlock::honeycomb_1q: return "honeycomb-1q";
    case ReferenceBlock::honeycomb_2q: return "honeycomb-2q";
    case ReferenceBlock::chain_1q: return "chain-1q";
    case ReferenceBlock::chain_2q: return "chain-2q";
    case ReferenceBlock::square_1q: return "square-1q";
    case ReferenceBlock::square_2q: return "square-2q";
  }
  return "unknown";
}

namespace {

Block block_containing(const std::vector<Block>& blocks, int qubit) {
  for (const auto& b : blocks) {
    if (std::find(b.center.begin(), b.center.end(), qubit) != b.center.end()) return b;
  }
  throw std::logic_error("reference_block: qubit not in any block center");
}

int interior_vertex(const QubitGraph& g, int want_degree, int color) {
  for (int q = 0; q < g.num_qubits(); ++q) {
    if (g.degree(q) != want_degree || g.color(q) != color) continue;
    const auto& nb = g.neighbors(q);
    if (std::all_of(nb.begin(), nb.end(), [&](int k) { return g.degree(k) == want_degree; })) return q;
  }
  throw std::logic_error("reference_block: no interior vertex");
}

}  // namespace

Block reference_block(ReferenceBlock kind, double coupling) {
  switch (kind) {
    case ReferenceBlock::honeycomb_1q: {
      const QubitGraph g = build_honeycomb(3, 3, coupling);
      const int c = interior_vertex(g, 3, 0);
      return block_containing(decompose_blocks(g, single_qubit_pattern(g, 0)), c);
    }
    case ReferenceBlock::honeycomb_2q: {
      const QubitGraph g = build_honeycomb(3, 3, coupling);
      const int a = interior_vertex(g, 3, 0);
      int b = -1;
      for (int k : g.neighbors(a)) {
        const auto& nb = g.neighbors(k);
        if (std::all_of(nb.begin(), nb.end(), [&](int x) { return g.degree(x) == 3; })) {
          b = k;
          break;
        }
      }
      return block_containing(decompose_blocks(g, two_qubit_pattern(g, {a, b})), a);
    }
    case ReferenceBlock::chain_1q: {
      const QubitGraph g = build_chain(3, coupling);
      return block_containing(decompose_blocks(g, single_qubit_pattern(g)), 1);
    }
    case ReferenceBlock::chain_2q: {
      const QubitGraph g = build_chain(4, coupling);
      return block_containing(decompose_blocks(g, two_qubit_pattern(g, {1, 2})), 1);
    }
    case ReferenceBlock::square_1q: {
      const QubitGraph g = build_square(3, 3, coupling);
      return block_containing(decompose_blocks(g, single_qubit_pattern(g, g.color(4))), 4);
    }
    case ReferenceBlock::square_2q: {
      const QubitGraph g = build_square(5, 5, coupling);
      return block_containing(decompose_blocks(g, two_qubit_pattern(g, {12, 13})), 12);
    }
  }
  throw std::logic_error("reference_block: unhandled kind");
}

}  // namespace zzp
