#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "qbtree/bench.hpp"
#include "qbtree/quantum_btree.hpp"

namespace
{
using namespace qbtree;

LayoutNode leaf(std::initializer_list<Key> keys)
{
  LayoutNode n;
  for (const Key k : keys) n.pairs.push_back({k, RecordHandle{static_cast<std::uint64_t>(k)}});
  return n;
}

LayoutNode inner(std::vector<LayoutNode> children) { return LayoutNode{std::move(children), {}}; }

std::ostream &operator<<(std::ostream &os, const Rational &r)
{
  return os << r.num() << '/' << r.den();
}

int run_demo()
{
  const auto layout = inner({
      inner({leaf({1, 2}), leaf({4, 6})}),
      inner({leaf({8, 10}), leaf({13}), leaf({16, 19, 21})}),
      inner({leaf({25, 27}), leaf({33, 35})}),
  });
  IoCounters io;
  const auto t = QuantumBPlusTree::from_tree(
      WeightBalancedTree::from_layout(layout, validate_params(4)), io);
  std::cout << "tree: N=" << t.size() << " B=4 height=" << t.height() << " nodes="
            << t.tree().node_count() << " (QRAM stores " << io.qram_stores << ")\n";

  const auto r = make_range(5, 11);
  IoCounters gio;
  const auto outcome = global_classical_search(t.tree(), r, gio);
  const auto &c = std::get<QuantumCandidates>(outcome);
  std::cout << "QUERY(5, 11): candidates at level " << c.level << ":";
  for (const auto id : c.nodes) std::cout << " node " << id.value;
  std::cout << " (" << gio.classical_node_accesses << " node reads)\n";

  IoCounters qio;
  const auto res = query(t, r, EvalMode::kAnalytic, nullptr, qio);
  std::cout << "success probability per attempt " << res.success_probability
            << ", expected attempts " << res.cost.attempts << ", IO " << res.cost.io() << "\n";
  std::cout << "result state:";
  for (const auto &[p, w] : res.state->entries()) {
    std::cout << " |" << p.key << "> w=" << Rational{w, res.state->total()};
  }
  std::cout << "\n";

  Rng rng{1};
  IoCounters sio;
  const auto once = query(t, r, EvalMode::kStochastic, &rng, sio);
  std::cout << "one stochastic run (seed 1): " << once.cost.attempts
            << " attempts, IO " << once.cost.io() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Quantum B+ tree simulator and benchmark driver"};
  app.require_subcommand(1);

  auto *bench = app.add_subcommand("bench", "Run an experiment and write CSV rows");
  std::string mode = "static";
  std::vector<std::size_t> ns{4096};
  std::uint32_t b = 16;
  std::vector<double> sels{0.05};
  std::size_t queries = 1000;
  std::uint64_t seed = 1;
  bool synthetic = false;
  std::string dataset;
  std::string key_mode;
  std::string eval = "analytic";
  std::string out;
  const std::map<std::string, bench::Mode> modes{{"static", bench::Mode::kStatic},
                                                 {"dynamic", bench::Mode::kDynamic},
                                                 {"range2d", bench::Mode::kRange2d}};
  bench->add_option("--mode", mode, "static, dynamic or range2d")
      ->check(CLI::IsMember({"static", "dynamic", "range2d"}));
  bench->add_option("--n", ns, "dataset size; repeat for a sweep")->expected(1, -1);
  bench->add_option("--b", b, "branching factor (power of two, >= 4)");
  bench->add_option("--selectivity", sels, "fraction of records per query; repeat for a sweep")
      ->expected(1, -1);
  bench->add_option("--queries", queries, "queries per configuration");
  bench->add_option("--seed", seed, "master seed");
  auto *syn = bench->add_flag("--synthetic", synthetic, "uniform random keys (default)");
  bench->add_option("--dataset", dataset, "check-in TSV file")->excludes(syn);
  bench->add_option("--key-mode", key_mode, "timestamp or location2d (default follows --mode)")
      ->check(CLI::IsMember({"timestamp", "location2d"}));
  bench->add_option("--eval", eval, "stochastic or analytic")
      ->check(CLI::IsMember({"stochastic", "analytic"}));
  bench->add_option("--out", out, "CSV path (stdout when omitted)");

  auto *verify = app.add_subcommand("verify", "Run invariant and oracle suites");
  std::uint64_t verify_seed = 1;
  verify->add_option("--seed", verify_seed, "master seed");

  auto *demo = app.add_subcommand("demo", "Walk through the 14-key example tree");

  CLI11_PARSE(app, argc, argv);

  try {
    if (demo->parsed()) return run_demo();

    if (verify->parsed()) {
      const auto rep = bench::run_verify(verify_seed);
      for (const auto &l : rep.lines) std::cout << l << "\n";
      return rep.failures == 0 ? 0 : 1;
    }

    std::vector<bench::ResultRow> rows;
    for (const auto n : ns) {
      for (const double s : sels) {
        bench::ExperimentConfig cfg;
        cfg.mode = modes.at(mode);
        cfg.n = n;
        cfg.branching = b;
        cfg.selectivity = s;
        cfg.query_count = queries;
        cfg.seed = seed;
        if (!dataset.empty()) cfg.dataset_path = dataset;
        const bool locations = key_mode.empty() ? cfg.mode == bench::Mode::kRange2d
                                                : key_mode == "location2d";
        cfg.key_mode = locations ? bench::KeyMode::kLocation2d : bench::KeyMode::kTimestamp;
        cfg.eval = eval == "analytic" ? EvalMode::kAnalytic : EvalMode::kStochastic;
        for (auto &r : bench::run_experiment(cfg)) {
          if (r.fallbacks > 0) {
            std::cerr << "note: " << r.structure << " N=" << r.n << ": " << r.fallbacks
                      << " queries answered by the classical fallback\n";
          }
          rows.push_back(std::move(r));
        }
      }
    }
    if (out.empty()) {
      bench::write_csv(std::cout, rows);
    } else {
      std::ofstream f{out};
      if (!f) {
        std::cerr << "cannot write " << out << "\n";
        return 2;
      }
      bench::write_csv(f, rows);
    }
    return 0;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
