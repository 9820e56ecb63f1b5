#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace zzp {

enum class Geometry { honeycomb, square, chain, custom };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

struct Edge {
  int a = 0;
  int b = 0;
  double coupling = 1.0;  // J_ab in units of the nominal coupling
};

/// Row/column of a vertex in the generating layout. For honeycomb patches
/// this is the brick-wall embedding: `row` is the zigzag line and `col` the
/// position along it; a vertical bond joins (r, c) and (r + 1, c) when
/// r + c is even.
struct SiteCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const SiteCoord&, const SiteCoord&) = default;
};

/// Physical qubit array: vertices with fixed ZZ couplings on the edges.
class QubitGraph {
 public:
  QubitGraph(int num_qubits, std::vector<Edge> edges, Geometry geometry = Geometry::custom,
             std::vector<SiteCoord> coords = {});

  int num_qubits() const { return num_qubits_; }
  const std::vector<Edge>& edges() const { return edges_; }
  Geometry geometry() const { return geometry_; }
  const std::vector<SiteCoord>& coords() const { return coords_; }
  bool has_coords() const { return !coords_.empty(); }

  const std::vector<int>& neighbors(int q) const;
  int degree(int q) const { return static_cast<int>(neighbors(q).size()); }
  bool has_edge(int a, int b) const { return edge_index(a, b).has_value(); }
  std::optional<int> edge_index(int a, int b) const;
  double coupling(int a, int b) const;

  /// Same connectivity with per-edge couplings replaced (edge order preserved).
  QubitGraph with_couplings(std::span<const double> couplings) const;

  /// Bipartition color used by the sublattice driving patterns; requires
  /// a generated geometry.
  int color(int q) const;

 private:
  void check_qubit(int q) const;

  int num_qubits_;
  std::vector<Edge> edges_;
  Geometry geometry_;
  std::vector<SiteCoord> coords_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<int>> edge_lookup_;  // parallel to adjacency_
};

/// Honeycomb patch of `rows` x `cols` hexagons in brick-wall form, row-major
/// numbering over (line, position).
QubitGraph build_honeycomb(int rows, int cols, double coupling = 1.0);
QubitGraph build_chain(int n, double coupling = 1.0);
QubitGraph build_square(int rows, int cols, double coupling = 1.0);

/// Subgraph on `keep` (renumbered in the given order), keeping geometry and
/// coordinates so the lattice patterns still apply.
QubitGraph induced_subgraph(const QubitGraph& graph, std::span<const int> keep);

struct DrivingPattern {
  std::vector<int> driven;                       // sorted ascending
  std::vector<std::pair<int, int>> gate_pairs;  // adjacent driven pairs, first is the target pair

  bool is_driven(int q) const;
  friend bool operator==(const DrivingPattern&, const DrivingPattern&) = default;
};

/// Drive one bipartite sublattice. Without an explicit `sublattice`, 2D
/// lattices drive the larger color class (ties: color 0) and chains drive
/// the odd sites, so that both ends of an odd chain are boundary qubits.
DrivingPattern single_qubit_pattern(const QubitGraph& graph, std::optional<int> sublattice = std::nullopt);

/// Pattern enabling a two-qubit gate on `target` (which must be an edge).
DrivingPattern two_qubit_pattern(const QubitGraph& graph, std::pair<int, int> target);

enum class ViolationKind {
  undriven_without_driven_neighbor,
  edge_without_driven_endpoint,
  adjacent_driven_outside_gate_pair,
  malformed_gate_pair,
  qubit_out_of_range,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::vector<int> qubits;
  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

ValidationReport validate_pattern(const QubitGraph& graph, const DrivingPattern& pattern);

struct BlockCoupling {
  int i = 0;  // block-local indices
  int j = 0;
  double coupling = 1.0;
};

/// Star-graph block: driven center plus its undriven boundary. Local qubit
/// order is center (gate-pair order first) followed by boundary ascending.
struct Block {
  std::vector<int> center;
  std::vector<int> boundary;
  std::vector<BlockCoupling> couplings;

  int size() const { return static_cast<int>(center.size() + boundary.size()); }
  int num_center() const { return static_cast<int>(center.size()); }
  int num_boundary() const { return static_cast<int>(boundary.size()); }
  int global_qubit(int local) const;
  std::optional<int> local_index(int global) const;
  int smallest_member() const;
};

inline constexpr int kMaxBlockSize = 13;

/// One block per connected driven component; blocks sorted by smallest member.
std::vector<Block> decompose_blocks(const QubitGraph& graph, const DrivingPattern& pattern);

enum class ReferenceBlock { honeycomb_1q, honeycomb_2q, chain_1q, chain_2q, square_1q, square_2q };

ReferenceBlock reference_block_from_string(const std::string& name);
std::string to_string(ReferenceBlock kind);

/// The bulk block of each lattice pattern with uniform coupling J.
Block reference_block(ReferenceBlock kind, double coupling = 1.0);

}  // namespace zzp
