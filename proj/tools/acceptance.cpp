// Acceptance run: one PASS/FAIL line per criterion. With --strict any FAIL exits non-zero.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qbtree/bench.hpp"
#include "qbtree/classical_btree.hpp"
#include "qbtree/quantum_btree.hpp"

namespace
{
using namespace qbtree;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kExactBudgetS = 1.0;
constexpr std::size_t kAttemptTrials = 100000;
constexpr double kAttemptRelTol = 0.02;
constexpr double kAttemptBudgetS = 30.0;
constexpr std::size_t kOracleInstances = 1000;
constexpr std::size_t kOracleMaxN = 512;
constexpr double kOracleBudgetS = 60.0;
constexpr double kStaticIoFactor = 10.0;
constexpr std::size_t kScalingQueries = 1000;
constexpr double kScalingMinRatio = 100.0;
constexpr double kScalingMaxQuantumSpread = 3.0;
constexpr double kScalingMinClassicalGrowth = 100.0;
constexpr double kScalingBudgetS = 600.0;
constexpr double kSelectivityClassicalGrowth = 5.0;
constexpr std::size_t kDynamicOps = 10000;
constexpr std::size_t kDynamicAuditEvery = 1000;
constexpr std::size_t kDynamicQueries = 100;
constexpr double kDynamicInsertFactor = 20.0;
constexpr double kDynamicAttemptFactor = 8.0;
constexpr std::size_t kRangeInstances = 500;
constexpr std::size_t kRangeMaxN = 256;
constexpr double kRangeIoFactor = 10.0;
constexpr double kRangeBudgetS = 120.0;
constexpr std::uint64_t kSeed = 1;

int failures = 0;

void report(const char *name, bool ok, const std::string &detail)
{
  std::printf("%s %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

KeyRecordPair kp(Key k) { return {k, RecordHandle{static_cast<std::uint64_t>(k)}}; }

LayoutNode leaf(std::initializer_list<Key> keys)
{
  LayoutNode n;
  for (const Key k : keys) n.pairs.push_back(kp(k));
  return n;
}

LayoutNode inner(std::vector<LayoutNode> children) { return LayoutNode{std::move(children), {}}; }

WeightBalancedTree figure_tree()
{
  return WeightBalancedTree::from_layout(
      inner({
          inner({leaf({1, 2}), leaf({4, 6})}),
          inner({leaf({8, 10}), leaf({13}), leaf({16, 19, 21})}),
          inner({leaf({25, 27}), leaf({33, 35})}),
      }),
      validate_params(4));
}

void figure_exact()
{
  const auto t0 = Clock::now();
  IoCounters io;
  const auto t = QuantumBPlusTree::from_tree(figure_tree(), io);
  const auto r = make_range(5, 11);
  IoCounters gio;
  const auto outcome = global_classical_search(t.tree(), r, gio);
  bool ok = std::holds_alternative<QuantumCandidates>(outcome);
  if (ok) {
    const auto &c = std::get<QuantumCandidates>(outcome);
    ok = c.nodes == std::vector<NodeId>{NodeId{1}, NodeId{2}};
  }
  IoCounters qio;
  const auto res = query(t, r, EvalMode::kAnalytic, nullptr, qio);
  ok = ok && res.success_probability == Rational(3, 32) && res.state && res.state->uniform() &&
       res.support() == std::vector<KeyRecordPair>{kp(6), kp(8), kp(10)};
  const double s = seconds_since(t0);
  report("figure-example", ok && s < kExactBudgetS,
         fmt("candidates {1,2}, p=%llu/%llu, support {6,8,10}, %.3fs",
             static_cast<unsigned long long>(res.success_probability.num()),
             static_cast<unsigned long long>(res.success_probability.den()), s));
}

void micro_fixture()
{
  const auto t0 = Clock::now();
  const std::vector<KeyRecordPair> labels{kp(0), kp(1), kp(4), kp(7)};
  const auto f = mark_in_range(uniform_init<KeyRecordPair>(labels), make_range(2, 5));
  const auto p = success_probability(f);
  const bool ok = p == Rational(1, 4) && f.in_state &&
                  f.in_state->labels() == std::vector<KeyRecordPair>{kp(4)};
  const double s = seconds_since(t0);
  report("post-selection-quarter", ok && s < kExactBudgetS,
         fmt("p=%llu/%llu, result {4}, %.3fs", static_cast<unsigned long long>(p.num()),
             static_cast<unsigned long long>(p.den()), s));
}

void attempt_mean()
{
  const auto t0 = Clock::now();
  struct Case {
    std::vector<std::pair<KeyRecordPair, Weight>> entries;
    QueryRange range;
  };
  const std::vector<Case> cases{
      {{{kp(6), 1}, {kp(8), 1}, {kp(10), 1}, {kp(1), 1}, {KeyRecordPair::dummy(), 28}},
       make_range(5, 11)},
      {{{kp(0), 1}, {kp(1), 1}, {kp(4), 1}, {kp(7), 1}}, make_range(2, 5)},
      {{{kp(3), 5}, {kp(9), 5}, {kp(20), 5}, {KeyRecordPair::dummy(), 985}}, make_range(0, 10)},
  };
  double worst = 0.0;
  bool ok = true;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto f =
        mark_in_range(WeightedState<KeyRecordPair>::from_entries(cases[c].entries), cases[c].range);
    const double exact = expected_attempts(f).to_double();
    Rng rng{Rng::derive_seed(kSeed, c)};
    IoCounters io;
    for (std::size_t i = 0; i < kAttemptTrials; ++i) {
      while (!post_select(f, rng, io)) {
      }
    }
    const double mean =
        static_cast<double>(io.post_selection_attempts) / static_cast<double>(kAttemptTrials);
    const double rel = std::abs(mean - exact) / exact;
    worst = std::max(worst, rel);
    ok = ok && rel <= kAttemptRelTol;
  }
  const double s = seconds_since(t0);
  report("attempts-total-over-in", ok && s < kAttemptBudgetS,
         fmt("%zu states x %zu trials, worst rel. error %.4f (tol %.2f), %.1fs", cases.size(),
             kAttemptTrials, worst, kAttemptRelTol, s));
}

void static_sweeps()
{
  const auto t0 = Clock::now();
  const auto st = bench::static_sweep(kSeed, kOracleInstances, kOracleMaxN, kStaticIoFactor);
  const double s = seconds_since(t0);
  report("oracle-equivalence",
         st.support_mismatches + st.nonuniform == 0 && st.instances == kOracleInstances &&
             s < kOracleBudgetS,
         fmt("%zu instances (%zu quantum), %zu support, %zu weight violations, %.1fs",
             st.instances, st.quantum_paths, st.support_mismatches, st.nonuniform, s));
  report("candidates-and-density", st.too_many_candidates + st.sparse == 0,
         fmt("%zu over two candidates, %zu below 1/(8B)", st.too_many_candidates, st.sparse));
  report("static-io-bound", st.io_over_bound == 0,
         fmt("%zu violations, worst IO / B(ceil(log_B N)+1) = %.3f (limit %.0f)", st.io_over_bound,
             st.worst_io_ratio, kStaticIoFactor));
}

bench::ResultRow row(const std::vector<bench::ResultRow> &rows, std::size_t i) { return rows.at(i); }

void scaling()
{
  const auto t0 = Clock::now();
  const std::vector<std::size_t> ns{4096, 16384, 65536, 262144, 1048576};
  std::vector<double> q;
  std::vector<double> c;
  for (const auto n : ns) {
    bench::ExperimentConfig cfg;
    cfg.n = n;
    cfg.query_count = kScalingQueries;
    cfg.seed = kSeed;
    const auto rows = bench::run_experiment(cfg);
    q.push_back(*row(rows, 0).mean_query_io);
    c.push_back(*row(rows, 1).mean_query_io);
  }
  const double ratio = c.back() / q.back();
  const double spread = *std::max_element(q.begin(), q.end()) / *std::min_element(q.begin(), q.end());
  const double growth = c.back() / c.front();
  const double s = seconds_since(t0);
  std::ostringstream qs;
  for (const double v : q) qs << (qs.tellp() ? " " : "") << fmt("%.2f", v);
  report("scaling-trend",
         ratio >= kScalingMinRatio && spread < kScalingMaxQuantumSpread &&
             growth >= kScalingMinClassicalGrowth && s < kScalingBudgetS,
         fmt("ratio@1M %.1f (>= %.0f), quantum spread %.2fx (< %.0fx) [%s], classical growth "
             "%.1fx (>= %.0fx), %.1fs",
             ratio, kScalingMinRatio, spread, kScalingMaxQuantumSpread, qs.str().c_str(), growth,
             kScalingMinClassicalGrowth, s));
}

void selectivity()
{
  std::vector<double> q;
  std::vector<double> c;
  for (const double sel : {0.01, 0.10}) {
    bench::ExperimentConfig cfg;
    cfg.n = 262144;
    cfg.selectivity = sel;
    cfg.query_count = kScalingQueries;
    cfg.seed = kSeed;
    const auto rows = bench::run_experiment(cfg);
    q.push_back(*row(rows, 0).mean_query_io);
    c.push_back(*row(rows, 1).mean_query_io);
  }
  report("selectivity-trend", q[1] <= q[0] && c[1] >= kSelectivityClassicalGrowth * c[0],
         fmt("quantum %.2f@1%% -> %.2f@10%% (needs <=), classical %.1f -> %.1f (%.1fx, >= %.0fx)",
             q[0], q[1], c[0], c[1], c[1] / c[0], kSelectivityClassicalGrowth));
}

void dynamic_workload()
{
  const auto d =
      bench::dynamic_workload(kSeed, kDynamicOps, 16, kDynamicAuditEvery, kDynamicQueries);
  const double log_n = std::log(static_cast<double>(d.live)) / std::log(16.0);
  const bool ok = d.dirty_audits == 0 && d.audits == kDynamicOps / kDynamicAuditEvery &&
                  d.mean_insert_io <= kDynamicInsertFactor * log_n && d.query_mismatches == 0 &&
                  d.queries == kDynamicQueries && d.worst_attempt_ratio <= kDynamicAttemptFactor;
  report("dynamic-workload", ok,
         fmt("%zu/%zu clean audits, insert IO %.2f (<= %.1f), %zu/%zu queries match, attempts / "
             "B ceil(log_B N) %.3f (<= %.0f)%s%s",
             d.audits - d.dirty_audits, d.audits, d.mean_insert_io, kDynamicInsertFactor * log_n,
             d.queries - d.query_mismatches, d.queries, d.worst_attempt_ratio,
             kDynamicAttemptFactor, d.first_violation.empty() ? "" : "; ",
             d.first_violation.c_str()));
}

void deletion_fixtures()
{
  auto borrow = figure_tree();
  auto rebuild = figure_tree();
  IoCounters io;
  const auto a = borrow.erase(kp(6), io);
  const auto b = rebuild.erase(kp(27), io);
  const bool borrow_ok = a.actions.size() == 1 && a.actions[0].kind == RebalanceKind::kBorrow &&
                         a.actions[0].moved == NodeId{6} && a.actions[0].donor == NodeId{2} &&
                         check_balance(borrow).ok();
  const bool rebuild_ok = b.actions.size() == 1 &&
                          b.actions[0].kind == RebalanceKind::kRebuild &&
                          check_balance(rebuild).ok();
  report("deletion-fixtures", borrow_ok && rebuild_ok,
         fmt("delete 6: borrow node 6 from node 2 %s; delete 27: subtree rebuild %s",
             borrow_ok ? "ok" : "wrong", rebuild_ok ? "ok" : "wrong"));
}

void range_tree()
{
  const auto t0 = Clock::now();
  const auto r = bench::range_sweep(kSeed, kRangeInstances, kRangeMaxN, kRangeIoFactor);
  const double s = seconds_since(t0);
  const bool ok = r.support_mismatches + r.classical_mismatches + r.nonuniform + r.audit_failures +
                          r.io_over_bound ==
                      0 &&
                  r.classical_io_high_k > r.classical_io_low_k && s < kRangeBudgetS;
  report("range-tree-2d", ok,
         fmt("%zu instances, %zu support, %zu weight, %zu IO violations; classical IO %.1f "
             "(small k) -> %.1f (large k), %.1fs",
             r.instances, r.support_mismatches + r.classical_mismatches, r.nonuniform,
             r.io_over_bound, r.classical_io_low_k, r.classical_io_high_k, s));
}

void determinism()
{
  std::vector<std::string> out;
  for (int run = 0; run < 2; ++run) {
    std::ostringstream os;
    for (const auto mode : {bench::Mode::kStatic, bench::Mode::kDynamic, bench::Mode::kRange2d}) {
      bench::ExperimentConfig cfg;
      cfg.mode = mode;
      cfg.n = 5000;
      cfg.query_count = 100;
      cfg.seed = 7;
      const auto rows = bench::run_experiment(cfg);
      bench::write_csv(os, rows);
    }
    out.push_back(os.str());
  }
  report("determinism", out[0] == out[1] && !out[0].empty(),
         fmt("two analytic runs, seed 7, %zu bytes each, %s", out[0].size(),
             out[0] == out[1] ? "identical" : "differ"));
}

}  // namespace

int main(int argc, char **argv)
{
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::function<void()>> steps{
      figure_exact, micro_fixture, attempt_mean, static_sweeps,     scaling,
      selectivity,  dynamic_workload, deletion_fixtures, range_tree, determinism};
  bool raised = false;
  for (const auto &step : steps) {
    try {
      step();
    } catch (const std::exception &e) {
      report("(step raised)", false, e.what());
      raised = true;
    }
  }
  std::printf("%d FAIL\n", failures);
  return raised || (strict && failures > 0) ? 1 : 0;
}
