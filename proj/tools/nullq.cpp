#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "nullq/best.hpp"
#include "nullq/certain.hpp"
#include "nullq/chase.hpp"
#include "nullq/errors.hpp"
#include "nullq/eval.hpp"
#include "nullq/fixtures.hpp"
#include "nullq/oracle.hpp"
#include "nullq/parser.hpp"

using namespace nullq;

namespace {

Query load_query(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return parse_query(read_file(arg));
  if (arg.find('(') != std::string::npos) return parse_query(arg);
  throw Error("cannot read " + arg);
}

EgdSet load_constraints(const std::string& path) {
  if (path.empty()) return {};
  return parse_constraints(read_file(path));
}

// Stored facts cannot declare empty relations, so relations the query or
// the constraints use are declared here.
Database load_database(const std::string& path, const Query* q, const EgdSet& sigma) {
  Database d = parse_database(read_file(path));
  Schema extra = relations(sigma);
  if (q)
    for (const auto& [r, a] : q->formula.relations()) extra.emplace(r, a);
  for (const auto& [r, a] : extra) {
    auto ar = d.arity(r);
    if (ar && *ar != a)
      throw SchemaError("relation " + r + " has arity " + std::to_string(*ar) +
                        " in the database but arity " + std::to_string(a) + " in the query");
    d.declare(r, a);
  }
  return d;
}

void print(const Query& q, const TupleSet& answers) {
  if (q.is_boolean()) {
    std::cout << (answers.empty() ? "false" : "true") << "\n";
    return;
  }
  for (const auto& t : answers) std::cout << to_string(t) << "\n";
}

TupleSet all_candidates(const Query& q, const Database& d) {
  std::set<Value> dom = d.active_domain();
  auto qc = q.formula.constants();
  dom.insert(qc.begin(), qc.end());
  TupleSet out{Tuple{}};
  for (std::size_t i = 0; i < q.answer_vars.size(); ++i) {
    TupleSet next;
    for (const auto& t : out)
      for (const auto& v : dom) {
        Tuple u = t;
        u.push_back(v);
        next.insert(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certain and best answers over databases with marked nulls"};
  app.require_subcommand(1);

  std::string db_path;
  std::string query_arg;
  std::string constraints_path;
  std::string method;
  std::string vacuous;
  std::string target;
  std::string schema_path;
  std::string kind;
  std::string variant;
  std::string payload;
  std::string gen_kind;
  std::string gen_arg;
  std::string out_dir;
  bool experimental = false;

  auto* eval_cmd = app.add_subcommand("eval", "Naive evaluation, nulls as distinct constants");
  eval_cmd->add_option("DB", db_path)->required();
  eval_cmd->add_option("QUERY", query_arg)->required();

  auto* certain_cmd = app.add_subcommand("certain", "Certain answers");
  certain_cmd->add_option("DB", db_path)->required();
  certain_cmd->add_option("QUERY", query_arg)->required();
  certain_cmd->add_option("--constraints", constraints_path, "EGD file");
  certain_cmd->add_option("--method", method)->check(CLI::IsMember({"datalog", "fo", "chase", "brute"}));
  certain_cmd->add_option("--vacuous", vacuous, "Print every candidate when inconsistent")
      ->check(CLI::IsMember({"full"}));

  auto* best_cmd = app.add_subcommand("best", "Best answers");
  best_cmd->add_option("DB", db_path)->required();
  best_cmd->add_option("QUERY", query_arg)->required();
  best_cmd->add_option("--constraints", constraints_path, "EGD file");
  best_cmd->add_option("--method", method)->check(CLI::IsMember({"fo", "brute"}));
  best_cmd->add_flag("--experimental-egd", experimental,
                     "Rewrite under constraints through the Datalog equivalence relation");

  auto* rewrite_cmd = app.add_subcommand("rewrite", "Print the certain-answer rewriting");
  rewrite_cmd->add_option("QUERY", query_arg)->required();
  rewrite_cmd->add_option("--constraints", constraints_path, "EGD file");
  rewrite_cmd->add_option("--target", target)->check(CLI::IsMember({"datalog", "fo"}));
  rewrite_cmd->add_option("--schema", schema_path, "Database whose relations Dom ranges over");

  auto* chase_cmd = app.add_subcommand("chase", "Chase a database with EGDs");
  chase_cmd->add_option("DB", db_path)->required();
  chase_cmd->add_option("--constraints", constraints_path, "EGD file")->required();

  auto* decide_cmd = app.add_subcommand("decide", "Decision problems, by enumeration");
  decide_cmd->add_option("KIND", kind)->required()->check(CLI::IsMember({"certain", "best"}));
  decide_cmd->add_option("VARIANT", variant)
      ->required()
      ->check(CLI::IsMember({"member", "equal", "family"}));
  decide_cmd->add_option("DB", db_path)->required();
  decide_cmd->add_option("QUERY", query_arg)->required();
  decide_cmd->add_option("PAYLOAD", payload)->required();
  decide_cmd->add_option("--constraints", constraints_path, "EGD file");

  auto* gen_cmd = app.add_subcommand("gen", "Generate instances");
  gen_cmd->add_option("KIND", gen_kind)->required()->check(CLI::IsMember({"tree", "coloring", "random"}));
  gen_cmd->add_option("ARG", gen_arg, "depth, graph file or seed")->required();
  gen_cmd->add_option("--out", out_dir, "Write files into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    EgdSet sigma = load_constraints(constraints_path);

    if (*eval_cmd) {
      Query q = load_query(query_arg);
      Database d = load_database(db_path, &q, {});
      print(q, eval_fo(q, d));
      return 0;
    }

    if (*certain_cmd) {
      Query q = load_query(query_arg);
      Database d = load_database(db_path, &q, sigma);
      if (method.empty()) {
        if (q.query_class == QueryClass::FO) {
          method = "brute";
        } else {
          method = sigma.empty() ? "fo" : "datalog";
        }
      }
      if (method == "fo" && !sigma.empty())
        throw UnsupportedError("--method fo supports no constraints; use datalog");
      if (method == "chase" && q.query_class > QueryClass::UCQ)
        throw ClassificationError(
            "--method chase needs a UCQ: naive evaluation is not certain under negation, e.g. "
            "R(x, y) - (R(x, y) & x = y) on {R(1, _n)}");
      if (!sigma.empty()) {
        ChaseResult c = chase(d, sigma);
        if (c.failed && vacuous.empty()) {
          std::cout << "INCONSISTENT\n";
          return 0;
        }
        if (method == "chase") {
          TupleSet candidates = all_candidates(q, d);
          if (c.failed) {
            print(q, candidates);
            return 0;
          }
          TupleSet chased = eval_fo(q, c.database);
          TupleSet answers;
          for (const auto& t : candidates)
            if (chased.contains(c.apply(t))) answers.insert(t);
          print(q, answers);
          return 0;
        }
      }
      TupleSet answers;
      if (method == "brute") {
        answers = certain_oracle(q, d, sigma);
      } else if (method == "chase") {
        answers = eval_fo(q, d);
      } else {
        RewriteOptions ro{d.schema()};
        auto bundle = rewrite_certain(q, sigma, method == "fo" ? RewriteTarget::Fo : RewriteTarget::Datalog, ro);
        answers = evaluate_bundle(bundle, d);
      }
      print(q, answers);
      return 0;
    }

    if (*best_cmd) {
      Query q = load_query(query_arg);
      Database d = load_database(db_path, &q, sigma);
      if (method.empty()) method = "fo";
      if (method == "brute") {
        print(q, best_oracle(q, d, sigma));
      } else {
        BestOptions bo;
        bo.sigma = sigma;
        bo.experimental_egds = experimental;
        print(q, evaluate_best(q, d, bo));
      }
      return 0;
    }

    if (*rewrite_cmd) {
      Query q = load_query(query_arg);
      RewriteOptions ro;
      if (!schema_path.empty()) ro.schema = parse_database(read_file(schema_path)).schema();
      if (target.empty()) target = sigma.empty() ? "fo" : "datalog";
      auto bundle =
          rewrite_certain(q, sigma, target == "fo" ? RewriteTarget::Fo : RewriteTarget::Datalog, ro);
      std::cout << bundle.to_text();
      return 0;
    }

    if (*chase_cmd) {
      Database d = load_database(db_path, nullptr, sigma);
      ChaseResult c = chase(d, sigma);
      if (c.failed) {
        std::cout << "INCONSISTENT\n";
        return 0;
      }
      std::cout << c.database.to_text();
      return 0;
    }

    if (*decide_cmd) {
      Query q = load_query(query_arg);
      Database d = load_database(db_path, &q, sigma);
      DecisionVariant v = variant == "member" ? DecisionVariant::Member
                          : variant == "equal" ? DecisionVariant::Equal
                                               : DecisionVariant::Family;
      AnswerKind k = kind == "certain" ? AnswerKind::Certain : AnswerKind::Best;
      std::cout << (decide(k, v, q, d, sigma, parse_payload(v, payload)) ? "true" : "false") << "\n";
      return 0;
    }

    if (*gen_cmd) {
      std::vector<std::pair<std::string, std::string>> files;
      if (gen_kind == "tree") {
        std::size_t n = std::stoul(gen_arg);
        auto t = fixtures::gen_tree_pair(n);
        std::string base = "tree" + std::to_string(n);
        files = {{base + ".db", t.separated.to_text()},
                 {base + "_joined.db", t.joined.to_text()},
                 {"tree.q", t.query.formula.to_string() + "\n"},
                 {"tree.egd", t.sigma.front().to_string() + "\n"}};
      } else if (gen_kind == "coloring") {
        auto g = fixtures::gen_coloring(fixtures::parse_graph(read_file(gen_arg)));
        files = {{"coloring.db", g.database.to_text()},
                 {"coloring.q", g.query.formula.to_string() + "\n"}};
      } else {
        std::uint64_t seed = std::stoull(gen_arg);
        fixtures::RandomParams params;
        params.query_pool = fixtures::bccq_pool();
        params.egd_pool = fixtures::egd_pools();
        auto r = fixtures::gen_random(seed, params);
        std::string egds;
        for (const auto& e : params.egd_pool[r.egd_index]) egds += e.to_string() + "\n";
        std::string base = "random" + std::to_string(seed);
        files = {{base + ".db", r.database.to_text()},
                 {base + ".q", params.query_pool[r.query_index].formula.to_string() + "\n"},
                 {base + ".egd", egds}};
      }
      if (out_dir.empty()) {
        for (const auto& [name, text] : files) std::cout << "# " << name << "\n" << text;
      } else {
        std::filesystem::create_directories(out_dir);
        for (const auto& [name, text] : files) {
          std::ofstream f(std::filesystem::path(out_dir) / name);
          if (!f) throw Error("cannot write " + name);
          f << text;
          std::cout << (std::filesystem::path(out_dir) / name).string() << "\n";
        }
      }
      return 0;
    }
  } catch (const ResourceError& e) {
    std::cerr << "nullq: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nullq: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
