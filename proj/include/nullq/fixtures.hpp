#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nullq/database.hpp"
#include "nullq/egd.hpp"
#include "nullq/formula.hpp"

namespace nullq::fixtures {

/// Two forests of balanced binary trees over E, with unary A and B
/// marking leaves, and the key constraint on E's first attribute.
struct TreePair {
  Database separated;  // A in T1, B in T2
  Database joined;     // A and B in T1, under different root children
  Query query;         // ∃x (A(x) ∧ B(x))
  EgdSet sigma;
};

/// Trees of depth n (2^(n+1) − 1 nodes each), all nodes distinct nulls.
TreePair gen_tree_pair(std::size_t depth);

struct Graph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;  // undirected
};

/// Edge list, one `u v` per line; a lone `u` declares an isolated node.
Graph parse_graph(std::string_view text);

struct ColoringGadget {
  Database database;
  Query query;
};

/// One null per node, symmetric E, colours c1..cm in C (m = #nodes), odd
/// colours in O, L the order on colours, and the colouring query.
/// Throws ResourceError for more than 5 nodes.
ColoringGadget gen_coloring(const Graph& g);

struct RandomParams {
  std::size_t max_facts = 6;
  std::size_t max_consts = 4;
  std::size_t max_nulls = 3;
  Schema schema = {{"R", 2}, {"S", 1}};
  std::vector<Query> query_pool;
  std::vector<EgdSet> egd_pool;
};

struct RandomInstance {
  std::uint64_t seed = 0;
  Database database;
  std::size_t query_index = 0;  // into query_pool (0 when empty)
  std::size_t egd_index = 0;    // into egd_pool (0 when empty)
};

/// Reproducible from `seed`.  Nulls are reused across facts and key
/// overlaps on first attributes are planted so EGDs fire.
RandomInstance gen_random(std::uint64_t seed, const RandomParams& params);

/// Small deterministic generator (splitmix64) so corpora are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, n).
  std::size_t below(std::size_t n);
  bool chance(double p);

 private:
  std::uint64_t state_;
};

/// Query pools over the default schema R/2, S/1.
std::vector<Query> ucq_pool();   // 10 UCQs
std::vector<Query> bccq_pool();  // 8 BCCQs
std::vector<Query> best_pool();  // 6 UCQs
/// Constraint sets over R/2, S/1, the first one empty.
std::vector<EgdSet> egd_pools();

}  // namespace nullq::fixtures
