#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "kcoreset/kcoreset.hpp"

using namespace kcoreset;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kGeneric = 1, kValidationFailed = 2, kInput = 3, kCapacity = 4, kSketch = 5 };

struct Common {
  int k = 1;
  Weight z = 0;
  double eps = 0.5;
  std::string metric = "l2";
  std::string out;
};

Metric parse_metric(const std::string& arg) {
  if (arg == "l2") return Metric::l2();
  if (arg == "linf") return Metric::linf();
  if (arg.starts_with("matrix:")) {
    auto in = detail::open_input(arg.substr(7));
    return Metric::explicit_matrix(read_matrix(in));
  }
  throw InputError("unknown metric '" + arg + "' (use l2, linf or matrix:FILE)");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

void write_coreset(const std::string& path, const PointSet& pts) {
  auto out = open_output(path);
  write_points(out, pts);
}

int dimension_of(const PointSet& pts) {
  if (pts.empty()) throw InputError("input holds no points");
  return static_cast<int>(pts.front().point.dimension());
}

json params(const Common& c) { return {{"k", c.k}, {"z", c.z}, {"eps", c.eps}, {"metric", c.metric}}; }

void add_common(CLI::App* cmd, Common& c, bool with_metric = true) {
  cmd->add_option("--k", c.k, "number of centers")->required();
  cmd->add_option("--z", c.z, "outlier weight budget")->required();
  cmd->add_option("--eps", c.eps, "coreset accuracy")->required();
  if (with_metric) cmd->add_option("--metric", c.metric, "l2, linf or matrix:FILE");
}

/// Optional brute-force radii; skipped when the enumeration would be too large.
void add_oracle(json& stats, const PointSet& P, const PointSet& coreset, const Common& c, const Metric& m) {
  try {
    const double full = brute_force_opt(P, c.k, c.z, m, CenterUniverse::input_points()).radius;
    const double core = brute_force_opt(coreset, c.k, c.z, m, CenterUniverse::input_points()).radius;
    stats["oracle_opt"] = full;
    stats["coreset_opt"] = core;
  } catch (const CapacityError&) {
    stats["oracle"] = "skipped";
  }
}

struct OfflineArgs {
  Common c;
  std::string points;
  int d = 0;
  bool oracle = false;
};

json cmd_offline(const OfflineArgs& a) {
  const Metric m = parse_metric(a.c.metric);
  const PointSet P = read_points_file(a.points);
  const int d = a.d > 0 ? a.d : dimension_of(P);
  const auto mbc = mbc_construction(P, a.c.k, a.c.z, a.c.eps, m);
  write_coreset(a.c.out, mbc.representatives);
  json s = {{"command", "offline"}, {"algorithm", "mbc"}};
  s["params"] = params(a.c);
  s["n"] = P.size();
  s["doubling_dimension"] = d;
  s["coreset_size"] = mbc.representatives.size();
  s["size_bound"] = mbc_size_bound(a.c.k, a.c.z, a.c.eps, d);
  s["greedy_radius"] = mbc.greedy_radius;
  s["covering_radius"] = mbc.covering_radius;
  if (a.oracle) add_oracle(s, P, mbc.representatives, a.c, m);
  return s;
}

struct StreamArgs {
  Common c;
  std::string points;
  int d = 0;
};

json cmd_stream(const StreamArgs& a) {
  const Metric m = parse_metric(a.c.metric);
  const PointSet P = read_points_file(a.points);
  const int d = a.d > 0 ? a.d : dimension_of(P);
  InsertionStream<> st(a.c.k, a.c.z, a.c.eps, d, m);
  std::size_t peak = 0;
  for (const auto& wp : P)
    for (Weight i = 0; i < wp.weight; ++i) {
      st.handle_arrival(wp.point);
      peak = std::max(peak, st.report().size());
    }
  write_coreset(a.c.out, st.report());
  json s = {{"command", "stream"}};
  s["params"] = params(a.c);
  s["arrivals"] = st.arrivals();
  s["final_r"] = st.radius();
  s["coreset_size"] = st.report().size();
  s["peak_coreset_size"] = peak;
  s["threshold"] = st.threshold();
  return s;
}

struct DynamicArgs {
  Common c;
  std::string updates;
  std::string mode = "sketch";
  bool exact_shadow = false;
  std::uint64_t seed = 1;
  double delta = 0.1;
};

json cmd_dynamic(const DynamicArgs& a) {
  const UpdateStream ups = read_updates_file(a.updates);
  DynamicOptions opt;
  opt.sketches = a.mode == "sketch";
  opt.exact_shadow = a.exact_shadow || a.mode == "exact";
  opt.seed = a.seed;
  opt.delta = a.delta;
  DynamicCoreset dc(ups.delta, ups.d, a.c.k, a.c.z, a.c.eps, opt);
  for (const auto& u : ups.ops) dc.update(u);
  const DynamicReport r = dc.report();
  write_coreset(a.c.out, r.coreset);
  json s = {{"command", "dynamic"}};
  s["params"] = {{"k", a.c.k}, {"z", a.c.z}, {"eps", a.c.eps}, {"delta", ups.delta}, {"d", ups.d},
                 {"mode", a.mode}, {"exact_shadow", opt.exact_shadow}, {"failure_probability", a.delta}};
  s["seed"] = a.seed;
  s["ops"] = dc.ops();
  s["live_count"] = dc.live_count();
  s["level"] = r.level;
  s["from_sketch"] = r.from_sketch;
  s["coreset_size"] = r.coreset.size();
  s["cell_budget"] = dc.cell_budget();
  s["sketch_bytes"] = dc.sketch_bytes();
  return s;
}

struct MpcArgs {
  Common c;
  std::string points;
  std::string algo = "two-round";
  int machines = 2;
  int rounds = 2;
  std::string dist = "roundrobin";
  std::uint64_t seed = 1;
};

Distribution parse_distribution(const std::string& arg, std::uint64_t seed, std::optional<std::uint64_t>& used_seed) {
  if (arg == "roundrobin") return Distribution::round_robin();
  if (arg == "random" || arg.starts_with("random:")) {
    if (arg.size() > 7) {
      const std::string tail = arg.substr(7);
      seed = detail::parse_number<std::uint64_t>(tail, 0, "seed");
    }
    used_seed = seed;
    return Distribution::random(seed);
  }
  if (arg.starts_with("adversarial:")) {
    auto in = detail::open_input(arg.substr(12));
    return Distribution::adversarial(read_assignment(in));
  }
  throw InputError("unknown distribution '" + arg + "' (use roundrobin, random[:SEED] or adversarial:FILE)");
}

json cmd_mpc(const MpcArgs& a) {
  const Metric m = parse_metric(a.c.metric);
  const PointSet P = read_points_file(a.points);
  std::optional<std::uint64_t> seed;
  const MpcConfig cfg{a.machines, parse_distribution(a.dist, a.seed, seed)};
  MpcRun run;
  if (a.algo == "two-round") {
    run = run_two_round(P, a.c.k, a.c.z, a.c.eps, cfg, m);
  } else if (a.algo == "one-round") {
    run = run_one_round_randomized(P, a.c.k, a.c.z, a.c.eps, cfg, m);
  } else if (a.algo == "r-round") {
    run = run_r_round(P, a.c.k, a.c.z, a.c.eps, a.rounds, cfg, m);
  } else {
    throw InputError("unknown algorithm '" + a.algo + "'");
  }
  write_coreset(a.c.out, run.coreset);
  json s = {{"command", "mpc"}, {"algorithm", a.algo}};
  s["params"] = params(a.c);
  s["params"]["machines"] = a.machines;
  s["params"]["distribution"] = a.dist;
  if (a.algo == "r-round") s["params"]["rounds"] = a.rounds;
  if (seed) s["seed"] = *seed;
  s["rounds"] = run.rounds_used;
  s["per_machine_peak_words"] = run.per_machine_peak_words;
  s["coordinator_peak_words"] = run.coordinator_peak_words;
  s["messages_per_round"] = run.messages_per_round;
  s["coreset_size"] = run.coreset.size();
  if (a.algo == "two-round") {
    s["r_hat"] = run.r_hat;
    s["j_hat"] = run.j_hat;
  }
  if (a.algo == "one-round") s["z_prime"] = run.z_prime;
  if (a.algo == "r-round") {
    s["beta"] = run.beta;
    s["active_per_round"] = run.active_per_round;
  }
  return s;
}

struct GenArgs {
  std::string family;
  int k = 2;
  Weight z = 0;
  double eps = 0.125;
  int d = 1;
  std::int64_t delta = 0;
  std::string out;
  int probe_cluster = 0;
  int probe_group = 1;
  std::size_t probe_point = 0;
  bool next = false;
};

json cmd_gen(const GenArgs& a) {
  json s = {{"command", "gen"}, {"family", a.family}};
  s["params"] = {{"k", a.k}, {"z", a.z}, {"eps", a.eps}, {"d", a.d}};
  auto out = open_output(a.out);
  if (a.family == "insertion-lb") {
    std::optional<InsertionProbe> probe;
    if (a.probe_cluster > 0) probe = InsertionProbe{a.probe_cluster, a.probe_point};
    const auto inst = gen_insertion_lb(a.k, a.z, a.eps, a.d, probe);
    write_points(out, with_unit_weights(inst.stream));
    s["points"] = inst.stream.size();
    s["probe_points"] = inst.stream.size() - inst.base_size;
    s["lambda"] = inst.geometry.lambda;
    s["h"] = inst.geometry.h;
    s["r"] = inst.geometry.r;
  } else if (a.family == "one-dim-lb") {
    const auto pts = gen_one_dim_lb(a.k, a.z, a.next);
    write_points(out, with_unit_weights(pts));
    s["points"] = pts.size();
  } else if (a.family == "dynamic-lb") {
    if (a.delta <= 0) throw InputError("dynamic-lb needs --delta");
    std::optional<DynamicProbe> probe;
    if (a.probe_cluster > 0) probe = DynamicProbe{a.probe_cluster, a.probe_group, a.probe_point};
    const auto inst = gen_dynamic_lb(a.k, a.z, a.eps, a.d, a.delta, probe);
    write_updates(out, {a.delta, a.d, inst.updates});
    s["params"]["delta"] = a.delta;
    s["ops"] = inst.updates.size();
    s["inserts_before_scenario"] = inst.base_size;
    s["groups"] = inst.groups;
    s["extent"] = inst.extent;
    s["lambda"] = inst.geometry.lambda;
  } else {
    throw InputError("unknown family '" + a.family + "' (use insertion-lb, one-dim-lb or dynamic-lb)");
  }
  return s;
}

struct ValidateArgs {
  Common c;
  std::string points;
  std::string coreset;
  std::string universe = "midpoint";
  bool covering = false;
};

json cmd_validate(const ValidateArgs& a, bool& passed) {
  const Metric m = parse_metric(a.c.metric);
  const PointSet P = read_points_file(a.points);
  const PointSet C = read_points_file(a.coreset);
  CenterUniverse u;
  if (a.universe == "input") {
    u = CenterUniverse::input_points();
  } else if (a.universe == "midpoint") {
    u = CenterUniverse::midpoint_grid();
  } else if (a.universe == "union") {
    std::vector<Point> pts;
    for (const auto& wp : P) pts.push_back(wp.point);
    for (const auto& wp : C) pts.push_back(wp.point);
    u = CenterUniverse::explicit_list(pts);
  } else {
    throw InputError("unknown universe '" + a.universe + "' (use input, midpoint or union)");
  }
  const ValidationReport r = check_coreset(P, C, a.c.k, a.c.z, a.c.eps, m, u);
  passed = r.passed;
  json s = {{"command", "validate"}};
  s["params"] = params(a.c);
  s["params"]["universe"] = a.universe;
  s["passed"] = r.passed;
  s["violated_condition"] = r.violated_condition ? json(to_string(*r.violated_condition)) : json(nullptr);
  s["witness"] = r.witness;
  s["opt_full"] = r.opt_full;
  s["opt_coreset"] = r.opt_coreset;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-center with outliers: coreset construction, simulation and validation"};
  app.require_subcommand(1);

  OfflineArgs off;
  auto* c_off = app.add_subcommand("offline", "mini-ball covering of a point file");
  add_common(c_off, off.c);
  c_off->add_option("--points", off.points, "input point file")->required();
  c_off->add_option("--d", off.d, "doubling dimension for the size bound (default: coordinate count)");
  c_off->add_option("--out", off.c.out, "coreset output file")->required();
  c_off->add_flag("--oracle", off.oracle, "also report brute-force optima");

  StreamArgs st;
  auto* c_st = app.add_subcommand("stream", "insertion-only streaming coreset");
  add_common(c_st, st.c);
  c_st->add_option("--points", st.points, "arrivals, one per line; w=N repeats a point")->required();
  c_st->add_option("--d", st.d, "doubling dimension (default: coordinate count)");
  c_st->add_option("--out", st.c.out, "coreset output file")->required();

  DynamicArgs dy;
  auto* c_dy = app.add_subcommand("dynamic", "turnstile grid coreset");
  add_common(c_dy, dy.c, false);
  c_dy->add_option("--updates", dy.updates, "update-stream file")->required();
  c_dy->add_option("--mode", dy.mode, "sketch or exact")->check(CLI::IsMember({"sketch", "exact"}));
  c_dy->add_flag("--exact-shadow", dy.exact_shadow, "keep exact cell counts and cross-check sketch answers");
  c_dy->add_option("--seed", dy.seed, "sketch seed");
  c_dy->add_option("--fail-prob", dy.delta, "overall sketch failure probability");
  c_dy->add_option("--out", dy.c.out, "coreset output file")->required();

  MpcArgs mp;
  auto* c_mp = app.add_subcommand("mpc", "simulated MPC protocols");
  add_common(c_mp, mp.c);
  c_mp->add_option("--points", mp.points, "input point file")->required();
  c_mp->add_option("--algo", mp.algo, "two-round, one-round or r-round")
      ->check(CLI::IsMember({"two-round", "one-round", "r-round"}));
  c_mp->add_option("--machines", mp.machines, "machine count")->required();
  c_mp->add_option("--rounds", mp.rounds, "rounds for r-round");
  c_mp->add_option("--dist", mp.dist, "roundrobin, random[:SEED] or adversarial:FILE");
  c_mp->add_option("--seed", mp.seed, "seed for random distribution without an explicit seed");
  c_mp->add_option("--out", mp.c.out, "coreset output file")->required();

  GenArgs gn;
  auto* c_gn = app.add_subcommand("gen", "lower-bound instance generators");
  c_gn->add_option("--family", gn.family, "insertion-lb, one-dim-lb or dynamic-lb")->required();
  c_gn->add_option("--k", gn.k)->required();
  c_gn->add_option("--z", gn.z)->required();
  c_gn->add_option("--eps", gn.eps);
  c_gn->add_option("--d", gn.d);
  c_gn->add_option("--delta", gn.delta, "grid side for dynamic-lb");
  c_gn->add_option("--probe-cluster", gn.probe_cluster, "1-based cluster of the probe point (0: no probe)");
  c_gn->add_option("--probe-group", gn.probe_group, "1-based group of the probe point (dynamic-lb)");
  c_gn->add_option("--probe-point", gn.probe_point, "index of the probe point within its cluster or group");
  c_gn->add_flag("--next", gn.next, "one-dim-lb: include the (k+z+1)-th point");
  c_gn->add_option("--out", gn.out, "output file")->required();

  ValidateArgs va;
  auto* c_va = app.add_subcommand("validate", "check the coreset conditions by enumeration");
  add_common(c_va, va.c);
  c_va->add_option("--points", va.points, "input point file")->required();
  c_va->add_option("--coreset", va.coreset, "candidate coreset file")->required();
  c_va->add_option("--universe", va.universe, "input, midpoint or union");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    json stats;
    if (*c_off) stats = cmd_offline(off);
    if (*c_st) stats = cmd_stream(st);
    if (*c_dy) stats = cmd_dynamic(dy);
    if (*c_mp) stats = cmd_mpc(mp);
    if (*c_gn) stats = cmd_gen(gn);
    if (*c_va) {
      bool passed = false;
      stats = cmd_validate(va, passed);
      if (!passed) code = kValidationFailed;
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    stats["wall_time_ms"] = elapsed.count();
    std::cout << stats.dump(2) << '\n';
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const SketchFailure& e) {
    std::cerr << "sketch failure: " << e.what() << '\n';
    return kSketch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGeneric;
  }
  return code;
}
