#include "nullq/fixtures.hpp"

#include <algorithm>
#include <sstream>

#include "nullq/errors.hpp"
#include "nullq/parser.hpp"

namespace nullq::fixtures {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t Rng::below(std::size_t n) {
  if (n <= 1) return 0;
  std::uint64_t bound = static_cast<std::uint64_t>(n);
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

bool Rng::chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

TreePair gen_tree_pair(std::size_t depth) {
  if (depth < 1) throw Error("tree depth must be at least 1");
  const std::size_t nodes = (std::size_t{2} << depth) - 1;
  auto node = [](char tree, std::size_t i) { return Value::null(std::string(1, tree) + std::to_string(i)); };
  Database base(Schema{{"A", 1}, {"B", 1}, {"E", 2}});
  for (char tree : {'s', 't'})
    for (std::size_t i = 1; i < nodes; ++i) base.insert("E", {node(tree, (i - 1) / 2), node(tree, i)});
  const std::size_t first_leaf = (std::size_t{1} << depth) - 1;
  const std::size_t last_leaf = nodes - 1;

  TreePair out;
  out.separated = base;
  out.separated.insert("A", {node('s', first_leaf)});
  out.separated.insert("B", {node('t', first_leaf)});
  out.joined = base;
  out.joined.insert("A", {node('s', first_leaf)});
  out.joined.insert("B", {node('s', last_leaf)});
  out.query = parse_query("exists x (A(x) & B(x))");
  out.sigma = {Egd::functional_dependency("E", 2, {0}, 1)};
  return out;
}

Graph parse_graph(std::string_view text) {
  Graph g;
  auto add_node = [&](const std::string& n) {
    if (std::find(g.nodes.begin(), g.nodes.end(), n) == g.nodes.end()) g.nodes.push_back(n);
  };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    for (const auto& t : toks)
      if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
        throw SyntaxError("node names must be alphanumeric", line_no, 1);
    if (toks.size() > 2) throw SyntaxError("expected `u v` or `u`", line_no, 1);
    add_node(toks[0]);
    if (toks.size() == 2) {
      if (toks[0] == toks[1]) throw SyntaxError("self-loops are not allowed", line_no, 1);
      add_node(toks[1]);
      auto e = std::minmax(toks[0], toks[1]);
      std::pair<std::string, std::string> edge{e.first, e.second};
      if (std::find(g.edges.begin(), g.edges.end(), edge) == g.edges.end()) g.edges.push_back(edge);
    }
  }
  return g;
}

namespace {

std::string phi(const std::string& t) {
  return "C(" + t + ") & forall u w (E(u, w) -> L(u, " + t + ")) & forall u (L(u, " + t +
         ") -> exists w (E(u, w))) & !(exists u (E(u, u)))";
}

}  // namespace

ColoringGadget gen_coloring(const Graph& g) {
  constexpr std::size_t cap = 5;
  if (g.nodes.size() > cap)
    throw ResourceError("colouring gadget supports at most 5 nodes", cap);
  ColoringGadget out;
  Database& d = out.database;
  d.declare(Schema{{"C", 1}, {"E", 2}, {"L", 2}, {"O", 1}});
  auto null = [](const std::string& n) { return Value::null("g" + n); };
  for (const auto& [u, v] : g.edges) {
    d.insert("E", {null(u), null(v)});
    d.insert("E", {null(v), null(u)});
  }
  const std::size_t m = g.nodes.size();
  auto colour = [](std::size_t i) { return Value::string("c" + std::to_string(i)); };
  for (std::size_t i = 1; i <= m; ++i) {
    d.insert("C", {colour(i)});
    if (i % 2 == 1) d.insert("O", {colour(i)});
    for (std::size_t j = i; j <= m; ++j) d.insert("L", {colour(i), colour(j)});
  }
  out.query = parse_query("C(x) & (" + phi("x") + " | exists y (O(y) & L(x, y) & " + phi("y") + "))");
  return out;
}

RandomInstance gen_random(std::uint64_t seed, const RandomParams& params) {
  Rng rng(seed);
  RandomInstance out;
  out.seed = seed;
  out.database.declare(params.schema);
  std::vector<std::pair<std::string, std::size_t>> rels(params.schema.begin(), params.schema.end());
  if (rels.empty()) return out;

  const std::size_t consts = rng.below(params.max_consts + 1);
  const std::size_t nulls = rng.below(params.max_nulls + 1);
  const std::size_t facts = 1 + rng.below(std::max<std::size_t>(params.max_facts, 1));
  auto value = [&]() {
    bool use_null = nulls > 0 && (consts == 0 || rng.chance(0.5));
    if (use_null) return Value::null("n" + std::to_string(1 + rng.below(nulls)));
    return Value::integer(static_cast<std::int64_t>(1 + rng.below(std::max<std::size_t>(consts, 1))));
  };
  std::vector<std::pair<std::string, Tuple>> made;
  for (std::size_t f = 0; f < facts; ++f) {
    const auto& [rel, arity] = rels[rng.below(rels.size())];
    Tuple t;
    for (std::size_t i = 0; i < arity; ++i) t.push_back(value());
    // Plant a shared first attribute so key-like EGDs fire.
    if (arity >= 2 && rng.chance(0.35)) {
      std::vector<const Tuple*> same;
      for (const auto& [r, prev] : made)
        if (r == rel) same.push_back(&prev);
      if (!same.empty()) t[0] = (*same[rng.below(same.size())])[0];
    }
    made.emplace_back(rel, t);
    out.database.insert(rel, std::move(t));
  }
  if (!params.query_pool.empty()) out.query_index = rng.below(params.query_pool.size());
  if (!params.egd_pool.empty()) out.egd_index = rng.below(params.egd_pool.size());
  return out;
}

namespace {

std::vector<Query> parse_all(const std::vector<const char*>& texts) {
  std::vector<Query> out;
  for (const char* t : texts) out.push_back(parse_query(t));
  return out;
}

}  // namespace

std::vector<Query> ucq_pool() {
  return parse_all({
      "R(x, y)",
      "exists y (R(x, y))",
      "exists y (R(x, y) & S(y))",
      "exists y z (R(x, y) & R(y, z))",
      "R(x, x)",
      "R(x, 1) | S(x)",
      "exists y (R(y, x)) | S(x)",
      "exists y (R(x, y) & R(y, x))",
      "exists x y (R(x, y) & S(x))",
      "exists y (R(x, y) & y = 2) | R(x, x)",
  });
}

std::vector<Query> bccq_pool() {
  return parse_all({
      "R(x, y) & !(R(x, y) & x = y)",
      "S(x) - exists y (R(x, y))",
      "exists y (R(x, y)) - S(x)",
      "R(x, y) - (R(x, y) & y = 1)",
      "!(exists x (S(x)))",
      "(S(x) | exists y (R(y, x))) - exists z (R(x, z) & S(z))",
      "exists y (R(x, y) & S(y)) & !S(x) | R(x, x)",
      "S(x) & !(exists y (R(x, y) & R(y, x)))",
  });
}

std::vector<Query> best_pool() {
  return parse_all({
      "S(x)",
      "exists y (R(x, y))",
      "exists y (S(y) & R(y, x))",
      "R(x, 1) | S(x)",
      "R(x, y) | R(y, x)",
      "R(x, x) | exists y (R(y, x) & S(y))",
  });
}

std::vector<EgdSet> egd_pools() {
  return {
      {},
      parse_constraints("R(x, y) & R(x, z) -> y = z ."),
      parse_constraints("R(x, y) & R(z, y) -> x = z ."),
      parse_constraints("R(x, y) & S(x) & S(y) -> x = y ."),
  };
}

}  // namespace nullq::fixtures
