#include "qbtree/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "qbtree/dynamic_qbtree.hpp"
#include "qbtree/quantum_range_tree.hpp"

namespace qbtree::bench
{
namespace
{
std::vector<std::string_view> split_tabs(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

template <typename T>
bool parse_number(std::string_view s, T &out)
{
  const auto *end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

Error parse_error(std::size_t line, const std::string &what)
{
  return Error{ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what};
}

std::vector<KeyRecordPair> linear_filter(std::span<const KeyRecordPair> pairs,
                                         const QueryRange &r)
{
  std::vector<KeyRecordPair> out;
  for (const auto &p : pairs) {
    if (r.contains(p.key)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointRecord> linear_filter(std::span<const PointRecord> points, const BoxRange &box)
{
  std::vector<PointRecord> out;
  for (const auto &p : points) {
    if (box.contains(p.key)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool uniform_weights(const QueryResult &res)
{
  if (!res.state) return true;
  const auto &e = res.state->entries();
  return std::all_of(e.begin(), e.end(),
                     [&](const auto &x) { return x.second == e.front().second; });
}

double mean(double sum, std::size_t n) { return n == 0 ? 0.0 : sum / static_cast<double>(n); }

struct QueryTally {
  double quantum_io{};
  double attempts{};
  std::size_t quantum_paths{};
  std::size_t fallbacks{};
  double classical_io{};

  void add(const QueryResult &res, std::uint64_t classical)
  {
    quantum_io += res.cost.io();
    if (res.kind == ResultKind::kSuperposition) {
      attempts += res.cost.attempts.to_double();
      ++quantum_paths;
    } else {
      ++fallbacks;
    }
    classical_io += static_cast<double>(classical);
  }
};

std::vector<ResultRow> rows_for(const ExperimentConfig &cfg, std::size_t n, const QueryTally &t,
                                const char *quantum, const char *classical)
{
  ResultRow q{quantum, n, cfg.branching, cfg.selectivity};
  q.seed = cfg.seed;
  q.mean_query_io = mean(t.quantum_io, cfg.query_count);
  if (t.quantum_paths > 0) q.mean_attempts = mean(t.attempts, t.quantum_paths);
  q.fallbacks = t.fallbacks;
  ResultRow c{classical, n, cfg.branching, cfg.selectivity};
  c.seed = cfg.seed;
  c.mean_query_io = mean(t.classical_io, cfg.query_count);
  return {q, c};
}

void warn_short(const std::string &path, std::size_t lines)
{
  std::clog << "warning: " << path << " holds only " << lines << " records; using all\n";
}

std::vector<KeyRecordPair> load_pairs_for(const ExperimentConfig &cfg)
{
  if (!cfg.dataset_path) return synthetic_pairs(cfg.n, cfg.seed);
  auto data = ingest_checkins(*cfg.dataset_path, KeyMode::kTimestamp, cfg.n, cfg.seed);
  if (data.short_file) warn_short(*cfg.dataset_path, data.lines);
  return std::move(data.pairs);
}

std::vector<ResultRow> run_static(const ExperimentConfig &cfg)
{
  const auto pairs = load_pairs_for(cfg);
  IoCounters build_io;
  const auto t = QuantumBPlusTree::build(pairs, validate_params(cfg.branching), build_io);
  std::vector<Key> keys;
  for (const auto &p : pairs) keys.push_back(p.key);
  const auto queries = gen_queries(keys, cfg.selectivity, cfg.query_count, cfg.seed);

  QueryTally tally;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Rng rng{Rng::derive_seed(cfg.seed, i)};
    IoCounters qio;
    const auto res = query(t, queries[i], cfg.eval, &rng, qio);
    IoCounters cio;
    (void)classical_range_query(t.tree(), queries[i], cio);
    tally.add(res, cio.classical_node_accesses);
  }
  return rows_for(cfg, pairs.size(), tally, "quantum_bptree", "classical_bptree");
}

std::vector<ResultRow> run_dynamic(const ExperimentConfig &cfg)
{
  auto pairs = load_pairs_for(cfg);
  std::shuffle(pairs.begin(), pairs.end(), std::mt19937_64{Rng::derive_seed(cfg.seed, 7)});
  DynamicQuantumBTree t{validate_params(cfg.branching)};
  Rng workload{Rng::derive_seed(cfg.seed, 11)};
  std::vector<KeyRecordPair> live;
  double ins_io = 0;
  double ins_classical = 0;
  double del_io = 0;
  double del_classical = 0;
  std::size_t inserts = 0;
  std::size_t deletes = 0;
  for (std::size_t next = 0; next < pairs.size();) {
    IoCounters io;
    if (!live.empty() && workload.below(100) == 0) {
      const auto at = workload.below(live.size());
      t.erase(live[at], io);
      live[at] = live.back();
      live.pop_back();
      del_io += static_cast<double>(io.total_io());
      del_classical += static_cast<double>(io.classical_node_accesses);
      ++deletes;
    } else {
      t.insert(pairs[next], io);
      live.push_back(pairs[next++]);
      ins_io += static_cast<double>(io.total_io());
      ins_classical += static_cast<double>(io.classical_node_accesses);
      ++inserts;
    }
  }
  IoCounters flush_io;
  t.flush(flush_io);

  std::vector<Key> keys;
  for (const auto &p : live) keys.push_back(p.key);
  std::sort(keys.begin(), keys.end());
  const auto queries = gen_queries(keys, cfg.selectivity, cfg.query_count, cfg.seed);
  QueryTally tally;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Rng rng{Rng::derive_seed(cfg.seed, i)};
    IoCounters qio;
    const auto res = t.query(queries[i], cfg.eval, &rng, qio);
    IoCounters cio;
    (void)t.classical_query(queries[i], cio);
    tally.add(res, cio.classical_node_accesses);
  }
  auto rows = rows_for(cfg, pairs.size(), tally, "dynamic_quantum_bptree",
                       "classical_dynamic_bptree");
  rows[0].mean_insert_io = mean(ins_io, inserts);
  rows[1].mean_insert_io = mean(ins_classical, inserts);
  if (deletes > 0) {
    rows[0].mean_delete_io = mean(del_io, deletes);
    rows[1].mean_delete_io = mean(del_classical, deletes);
  }
  return rows;
}

std::vector<ResultRow> run_range2d(const ExperimentConfig &cfg)
{
  std::vector<PointRecord> points;
  if (cfg.dataset_path) {
    auto data = ingest_checkins(*cfg.dataset_path, KeyMode::kLocation2d, cfg.n, cfg.seed);
    if (data.short_file) warn_short(*cfg.dataset_path, data.lines);
    points = std::move(data.points);
  } else {
    points = synthetic_points(cfg.n, 2, cfg.seed);
  }
  IoCounters build_io;
  const auto t = QuantumRangeTree::build(points, validate_params(cfg.branching), build_io);
  const auto boxes = gen_boxes(t.points(), cfg.selectivity, cfg.query_count, cfg.seed);
  QueryTally tally;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    Rng rng{Rng::derive_seed(cfg.seed, i)};
    IoCounters qio;
    const auto res = t.query(boxes[i], cfg.eval, &rng, qio);
    IoCounters cio;
    (void)t.classical_query(boxes[i], cio);
    tally.add(res, cio.classical_node_accesses);
  }
  return rows_for(cfg, t.size(), tally, "quantum_range_tree", "classical_range_tree");
}

}  // namespace

/*######################################################################################
 * Data
 *####################################################################################*/

std::optional<std::int64_t> parse_timestamp(std::string_view s)
{
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':') {
    return std::nullopt;
  }
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int h = 0;
  int mi = 0;
  int sec = 0;
  if (!parse_number(s.substr(0, 4), y) || !parse_number(s.substr(5, 2), mo) ||
      !parse_number(s.substr(8, 2), d) || !parse_number(s.substr(11, 2), h) ||
      !parse_number(s.substr(14, 2), mi) || !parse_number(s.substr(17, 2), sec)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec;
}

CheckinData ingest_checkins(const std::string &path, KeyMode mode, std::optional<std::size_t> n,
                            std::uint64_t seed)
{
  std::ifstream in{path};
  if (!in) throw Error{ErrorCode::kFileNotFound, "cannot open " + path};

  CheckinData out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 5) throw parse_error(line_no, "expected 5 tab-separated fields");
    const RecordHandle rec{line_no};
    if (mode == KeyMode::kTimestamp) {
      const auto ts = parse_timestamp(f[1]);
      if (!ts) throw parse_error(line_no, "bad timestamp");
      out.pairs.push_back({*ts, rec});
    } else {
      double lat = 0;
      double lon = 0;
      if (!parse_number(f[2], lat) || !parse_number(f[3], lon) || !std::isfinite(lat) ||
          !std::isfinite(lon)) {
        throw parse_error(line_no, "bad coordinates");
      }
      out.points.push_back(
          {{static_cast<Key>(std::llround(lat * 1e4)), static_cast<Key>(std::llround(lon * 1e4))},
           rec});
    }
  }
  out.lines = mode == KeyMode::kTimestamp ? out.pairs.size() : out.points.size();
  if (n && *n > out.lines) out.short_file = true;
  if (n && *n < out.lines) {
    std::mt19937_64 eng{seed};
    if (mode == KeyMode::kTimestamp) {
      std::vector<KeyRecordPair> keep;
      std::sample(out.pairs.begin(), out.pairs.end(), std::back_inserter(keep), *n, eng);
      out.pairs = std::move(keep);
    } else {
      std::vector<PointRecord> keep;
      std::sample(out.points.begin(), out.points.end(), std::back_inserter(keep), *n, eng);
      out.points = std::move(keep);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::vector<KeyRecordPair> synthetic_pairs(std::size_t n, std::uint64_t seed)
{
  Rng rng{seed};
  std::unordered_set<Key> seen;
  std::vector<KeyRecordPair> out;
  out.reserve(n);
  while (out.size() < n) {
    const auto k = static_cast<Key>(rng.below(std::uint64_t{1} << 40));
    if (seen.insert(k).second) out.push_back({k, RecordHandle{out.size()}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointRecord> synthetic_points(std::size_t n, std::size_t dims, std::uint64_t seed)
{
  Rng rng{seed};
  std::vector<PointRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p(dims);
    for (auto &c : p) c = static_cast<Key>(rng.below(std::uint64_t{1} << 20));
    out.push_back({std::move(p), RecordHandle{i}});
  }
  return out;
}

std::vector<QueryRange> gen_queries(std::span<const Key> sorted_keys, double selectivity,
                                    std::size_t count, std::uint64_t seed)
{
  if (!(selectivity > 0.0 && selectivity <= 1.0)) {
    throw Error{ErrorCode::kInvalidConfig, "selectivity must lie in (0, 1]"};
  }
  const std::size_t n = sorted_keys.size();
  if (n == 0) return {};
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(selectivity * static_cast<double>(n))), 1, n);
  std::vector<QueryRange> out;
  out.reserve(count);
  Rng rng{Rng::derive_seed(seed, 0x9e37)};
  for (std::size_t q = 0; q < count; ++q) {
    const auto start = rng.below(n - k + 1);
    out.push_back(make_range(sorted_keys[start], sorted_keys[start + k - 1]));
  }
  return out;
}

std::vector<BoxRange> gen_boxes(std::span<const PointRecord> points, double selectivity,
                                std::size_t count, std::uint64_t seed)
{
  if (!(selectivity > 0.0 && selectivity <= 1.0)) {
    throw Error{ErrorCode::kInvalidConfig, "selectivity must lie in (0, 1]"};
  }
  if (points.empty()) return {};
  const std::size_t dims = points.front().key.size();
  const double per_dim = std::pow(selectivity, 1.0 / static_cast<double>(dims));
  std::vector<std::vector<Key>> coords(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    for (const auto &p : points) coords[d].push_back(p.key[d]);
    std::sort(coords[d].begin(), coords[d].end());
  }
  std::vector<BoxRange> out;
  out.reserve(count);
  Rng rng{Rng::derive_seed(seed, 0x9e38)};
  const std::size_t n = points.size();
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(per_dim * static_cast<double>(n))), 1, n);
  for (std::size_t q = 0; q < count; ++q) {
    BoxRange box;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto start = rng.below(n - k + 1);
      box.dims.push_back(make_range(coords[d][start], coords[d][start + k - 1]));
    }
    out.push_back(std::move(box));
  }
  return out;
}

/*######################################################################################
 * Experiments
 *####################################################################################*/

void validate(const ExperimentConfig &cfg)
{
  (void)validate_params(cfg.branching);
  if (!(cfg.selectivity > 0.0 && cfg.selectivity <= 1.0)) {
    throw Error{ErrorCode::kInvalidConfig, "selectivity must lie in (0, 1]"};
  }
  if (cfg.query_count == 0) throw Error{ErrorCode::kInvalidConfig, "need at least one query"};
  if (cfg.n == 0) throw Error{ErrorCode::kInvalidConfig, "need at least one record"};
  if (cfg.dataset_path && (cfg.mode == Mode::kRange2d) != (cfg.key_mode == KeyMode::kLocation2d)) {
    throw Error{ErrorCode::kInvalidConfig, "range2d reads locations; the other modes timestamps"};
  }
}

std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg)
{
  validate(cfg);
  switch (cfg.mode) {
    case Mode::kStatic:
      return run_static(cfg);
    case Mode::kDynamic:
      return run_dynamic(cfg);
    case Mode::kRange2d:
      return run_range2d(cfg);
  }
  return {};
}

void write_csv(std::ostream &os, std::span<const ResultRow> rows)
{
  const auto real = [&](const std::optional<double> &v) {
    if (v) os << std::fixed << std::setprecision(4) << *v;
  };
  os << kCsvHeader << '\n';
  for (const auto &r : rows) {
    os << r.structure << ',' << r.n << ',' << r.branching << ',';
    real(r.selectivity);
    os << ',';
    real(r.mean_query_io);
    os << ',';
    real(r.mean_attempts);
    os << ',';
    real(r.mean_insert_io);
    os << ',';
    real(r.mean_delete_io);
    os << ',' << r.seed << '\n';
  }
}

/*######################################################################################
 * Sweeps
 *####################################################################################*/

std::uint64_t ceil_log(std::uint64_t n, std::uint64_t b)
{
  std::uint64_t h = 0;
  for (std::uint64_t p = 1; p < n; p *= b) ++h;
  return h;
}

StaticSweepStats static_sweep(std::uint64_t seed, std::size_t instances, std::size_t max_n,
                              double io_factor)
{
  StaticSweepStats st;
  Rng rng{seed};
  constexpr std::uint32_t kBranchings[] = {4, 8, 16};
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint32_t b = kBranchings[i % 3];
    const auto n = 1 + rng.below(max_n);
    const auto span = n + rng.below(4 * n);
    std::vector<KeyRecordPair> pairs;
    for (std::uint64_t j = 0; j < n; ++j) {
      pairs.push_back({static_cast<Key>(rng.below(span)), RecordHandle{j}});
    }
    std::sort(pairs.begin(), pairs.end());
    Key lo = static_cast<Key>(rng.below(span + 2)) - 1;
    Key hi = static_cast<Key>(rng.below(span + 2)) - 1;
    if (lo > hi) std::swap(lo, hi);
    const auto r = make_range(lo, hi);

    IoCounters io;
    const auto t = QuantumBPlusTree::build(pairs, validate_params(b), io);
    IoCounters qio;
    const auto res = query(t, r, EvalMode::kAnalytic, nullptr, qio);
    ++st.instances;
    if (res.support() != linear_filter(pairs, r)) ++st.support_mismatches;
    if (!uniform_weights(res)) ++st.nonuniform;
    if (res.kind == ResultKind::kSuperposition) {
      ++st.quantum_paths;
      if (res.candidate_count > 2) ++st.too_many_candidates;
      if (res.success_probability < Rational{1, 8ULL * b}) ++st.sparse;
    }
    const double unit = static_cast<double>(b) * static_cast<double>(ceil_log(n, b) + 1);
    st.worst_io_ratio = std::max(st.worst_io_ratio, res.cost.io() / unit);
    if (res.cost.io() > io_factor * unit) ++st.io_over_bound;
  }
  return st;
}

DynamicWorkloadStats dynamic_workload(std::uint64_t seed, std::size_t ops, std::uint32_t b,
                                      std::size_t audit_every, std::size_t queries)
{
  DynamicWorkloadStats st;
  DynamicQuantumBTree t{validate_params(b)};
  Rng rng{seed};
  std::vector<KeyRecordPair> live;
  std::unordered_set<std::uint64_t> used;
  double insert_io = 0;
  std::size_t inserts = 0;
  std::uint64_t next_rec = 0;
  for (std::size_t op = 1; op <= ops; ++op) {
    IoCounters io;
    if (!live.empty() && rng.below(100) == 0) {
      const auto at = rng.below(live.size());
      t.erase(live[at], io);
      live[at] = live.back();
      live.pop_back();
    } else {
      const KeyRecordPair p{static_cast<Key>(rng.below(std::uint64_t{1} << 30)),
                            RecordHandle{next_rec++}};
      t.insert(p, io);
      live.push_back(p);
      insert_io += static_cast<double>(io.total_io());
      ++inserts;
    }
    ++st.ops;
    if (op % audit_every == 0) {
      ++st.audits;
      const auto rep = t.check_invariants();
      if (!rep.ok()) {
        ++st.dirty_audits;
        if (st.first_violation.empty()) st.first_violation = rep.violations.front();
      }
    }
  }
  st.live = live.size();
  st.mean_insert_io = mean(insert_io, inserts);

  IoCounters flush_io;
  t.flush(flush_io);
  std::sort(live.begin(), live.end());
  const double unit = static_cast<double>(b) * static_cast<double>(ceil_log(live.size(), b));
  for (std::size_t q = 0; q < queries; ++q) {
    const Key lo = static_cast<Key>(rng.below(std::uint64_t{1} << 30));
    const auto r = make_range(lo, lo + static_cast<Key>(rng.below(std::uint64_t{1} << 26)));
    IoCounters io;
    const auto res = t.query(r, EvalMode::kAnalytic, nullptr, io);
    ++st.queries;
    if (res.support() != linear_filter(live, r)) ++st.query_mismatches;
    if (res.kind == ResultKind::kSuperposition) {
      st.worst_attempt_ratio = std::max(st.worst_attempt_ratio, res.cost.attempts.to_double() / unit);
    }
  }
  return st;
}

RangeSweepStats range_sweep(std::uint64_t seed, std::size_t instances, std::size_t max_n,
                            double io_factor)
{
  RangeSweepStats st;
  Rng rng{seed};
  constexpr std::uint32_t kBranchings[] = {4, 8, 16};
  std::vector<std::pair<std::size_t, double>> k_and_io;
  double quantum_io = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint32_t b = kBranchings[i % 3];
    const auto n = 1 + rng.below(max_n);
    const auto span = 4 + rng.below(2 * n + 8);
    std::vector<PointRecord> pts;
    for (std::uint64_t j = 0; j < n; ++j) {
      pts.push_back({{static_cast<Key>(rng.below(span)), static_cast<Key>(rng.below(span))},
                     RecordHandle{j}});
    }
    BoxRange box;
    for (int d = 0; d < 2; ++d) {
      Key lo = static_cast<Key>(rng.below(span));
      Key hi = static_cast<Key>(rng.below(span));
      if (lo > hi) std::swap(lo, hi);
      box.dims.push_back(make_range(lo, hi));
    }
    IoCounters io;
    const auto t = QuantumRangeTree::build(pts, validate_params(b), io);
    if (!t.audit().empty()) ++st.audit_failures;
    const auto expect = linear_filter(pts, box);
    IoCounters qio;
    const auto res = t.query(box, EvalMode::kAnalytic, nullptr, qio);
    ++st.instances;
    if (t.resolve(res) != expect) ++st.support_mismatches;
    if (!uniform_weights(res)) ++st.nonuniform;
    if (res.kind == ResultKind::kSuperposition) ++st.quantum_paths;
    const double l = static_cast<double>(ceil_log(n, b) + 1);
    if (res.cost.io() > io_factor * static_cast<double>(b) * l * l) ++st.io_over_bound;
    quantum_io += res.cost.io();
    IoCounters cio;
    if (t.classical_query(box, cio) != expect) ++st.classical_mismatches;
    k_and_io.emplace_back(expect.size(), static_cast<double>(cio.classical_node_accesses));
  }
  st.mean_quantum_io = mean(quantum_io, st.instances);
  std::sort(k_and_io.begin(), k_and_io.end());
  const std::size_t third = k_and_io.size() / 3;
  double low = 0;
  double high = 0;
  for (std::size_t i = 0; i < third; ++i) {
    low += k_and_io[i].second;
    high += k_and_io[k_and_io.size() - 1 - i].second;
  }
  st.classical_io_low_k = mean(low, third);
  st.classical_io_high_k = mean(high, third);
  return st;
}

VerifyReport run_verify(std::uint64_t seed)
{
  VerifyReport rep;
  const auto line = [&](bool ok, const std::string &what) {
    rep.lines.push_back(std::string{ok ? "ok   " : "FAIL "} + what);
    if (!ok) ++rep.failures;
  };

  const auto s = static_sweep(seed, 1000, 512, 10.0);
  std::ostringstream os;
  os << "static oracle sweep: " << s.instances << " instances, " << s.support_mismatches
     << " support, " << s.nonuniform << " weight, " << s.too_many_candidates << " candidate, "
     << s.sparse << " density, " << s.io_over_bound << " IO violations";
  line(s.support_mismatches + s.nonuniform + s.too_many_candidates + s.sparse +
               s.io_over_bound ==
           0,
       os.str());

  const auto d = dynamic_workload(seed, 10000, 16, 1000, 100);
  os.str("");
  os << "dynamic workload: " << d.ops << " ops, " << d.dirty_audits << "/" << d.audits
     << " dirty audits, " << d.query_mismatches << "/" << d.queries << " query mismatches";
  if (!d.first_violation.empty()) os << " (" << d.first_violation << ")";
  line(d.dirty_audits == 0 && d.query_mismatches == 0, os.str());

  const auto r = range_sweep(seed, 300, 256, 10.0);
  os.str("");
  os << "range tree sweep: " << r.instances << " instances, " << r.support_mismatches
     << " quantum, " << r.classical_mismatches << " classical, " << r.nonuniform << " weight, "
     << r.audit_failures << " audit violations";
  line(r.support_mismatches + r.classical_mismatches + r.nonuniform + r.audit_failures == 0,
       os.str());
  return rep;
}

}  // namespace qbtree::bench
