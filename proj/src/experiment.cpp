#include "bsvgd/experiment.hpp"

#include "bsvgd/presets.hpp"
#include "bsvgd/snapshot_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef BSVGD_VERSION
#define BSVGD_VERSION "0.0.0"
#endif

namespace bsvgd {

namespace fs = std::filesystem;

std::string_view to_string(Algorithm a) { return a == Algorithm::Svgd ? "svgd" : "bsvgd"; }

Algorithm algorithm_from_string(std::string_view text) {
  if (text == "svgd") return Algorithm::Svgd;
  if (text == "bsvgd") return Algorithm::Bsvgd;
  throw InvalidArgument("unknown algorithm '" + std::string(text) + "' (expected svgd or bsvgd)");
}

std::string_view to_string(ClockMode c) { return c == ClockMode::Wall ? "wall" : "work"; }

ClockMode clock_from_string(std::string_view text) {
  if (text == "wall") return ClockMode::Wall;
  if (text == "work") return ClockMode::Work;
  throw InvalidArgument("unknown clock '" + std::string(text) + "' (expected wall or work)");
}

SvgdConfig RunConfig::svgd_config() const {
  SvgdConfig c;
  c.schedule = schedule;
  c.max_iterations = max_iterations;
  c.threshold = threshold;
  c.kernel = std::make_shared<GaussianKernel>(kernel_bandwidth, model().dimension());
  c.threads = threads;
  return c;
}

OffspringLaws RunConfig::offspring_laws() const {
  return {q_explorer, IntegerLaw::point_mass(0), q_spine, std::make_shared<GaussianProposal>(proposal_std)};
}

// ---------------------------------------------------------------------------
// config resolution

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "preset",
      "algorithm",
      "seed",
      "target.preset",
      "target.type",
      "target.variance",
      "target.dof",
      "target.means",
      "target.weights",
      "target.locations",
      "target.nonlinearity",
      "kernel.type",
      "kernel.bandwidth",
      "svgd.max_iterations",
      "svgd.threshold",
      "svgd.schedule.kind",
      "svgd.schedule.e_start",
      "svgd.schedule.e_end",
      "svgd.initial.count",
      "svgd.initial.std",
      "svgd.snapshot_every",
      "branching.q_E",
      "branching.q_O",
      "branching.q_S",
      "branching.proposal_std",
      "bsvgd.max_population",
      "bsvgd.precision",
      "bsvgd.initial.count",
      "bsvgd.initial.std",
      "bsvgd.final_refinement",
      "bsvgd.snapshot_every",
      "metrics.enabled",
      "metrics.replicates",
      "output.clock",
      "run.threads",
  };
  return keys;
}

IntegerLaw law_from(const ConfigDocument& doc, const std::string& key) {
  std::vector<int> support;
  std::vector<double> probs;
  for (const auto& row : doc.get_matrix(key)) {
    if (row.size() != 2) doc.fail(key, "each entry must be [value, probability]");
    if (row[0] != std::floor(row[0]) || row[0] < 0 || row[0] > 1e6)
      doc.fail(key, "offspring values must be non-negative integers");
    support.push_back(static_cast<int>(row[0]));
    probs.push_back(row[1]);
  }
  try {
    return IntegerLaw(std::move(support), std::move(probs));
  } catch (const InvalidArgument& e) {
    doc.fail(key, e.what());
  }
}

std::vector<Position> positions_from(const ConfigDocument& doc, const std::string& key) {
  std::vector<Position> out;
  for (const auto& row : doc.get_matrix(key)) {
    try {
      out.push_back(make_position(std::span<const double>(row)));
    } catch (const InvalidArgument& e) {
      doc.fail(key, e.what());
    }
  }
  if (out.empty()) doc.fail(key, "needs at least one entry");
  return out;
}

template <typename Fn>
auto with_key(const ConfigDocument& doc, const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    doc.fail(key, e.what());
  }
}

BenchmarkTarget resolve_target(const ConfigDocument& doc, std::string& preset_out) {
  const std::string preset = doc.get_string("target.preset", "");
  std::string type = doc.get_string("target.type", "");
  preset_out = preset;
  if (!preset.empty()) {
    const std::string preset_type = preset == "paper-gauss25"   ? "gaussian_mixture"
                                    : preset == "paper-banana3" ? "banana_t_mixture"
                                                                : "";
    if (preset_type.empty()) doc.fail("target.preset", "unknown target preset '" + preset + "'");
    if (!type.empty() && type != preset_type)
      doc.fail("target.type", "conflicts with target.preset '" + preset + "'");
    for (const char* k : {"target.means", "target.weights", "target.locations", "target.nonlinearity"})
      if (doc.has(k)) doc.fail(k, "cannot be combined with target.preset");
    if (preset_type == "gaussian_mixture") {
      if (doc.has("target.dof")) doc.fail("target.dof", "not a parameter of a Gaussian mixture");
      const double variance = doc.get_number("target.variance", 5.0);
      return with_key(doc, "target.variance", [&] { return BenchmarkTarget(paper_gauss25(variance)); });
    }
    if (doc.has("target.variance")) doc.fail("target.variance", "not a parameter of a banana mixture");
    const double dof = doc.get_number("target.dof", 7.0);
    return with_key(doc, "target.dof", [&] { return BenchmarkTarget(paper_banana3(dof)); });
  }

  if (type.empty()) doc.fail("target.type", "missing target: set target.preset or target.type");
  if (type == "gaussian_mixture") {
    const auto means = positions_from(doc, "target.means");
    std::vector<double> weights = doc.has("target.weights")
                                      ? doc.get_number_list("target.weights")
                                      : std::vector<double>(means.size(), 1.0 / static_cast<double>(means.size()));
    const double variance = doc.get_number("target.variance");
    return with_key(doc, "target.means", [&] { return BenchmarkTarget(GaussianMixture(means, variance, weights)); });
  }
  if (type == "banana_t_mixture") {
    const auto locations = positions_from(doc, "target.locations");
    const auto b = doc.get_number_list("target.nonlinearity");
    if (b.size() != locations.size()) doc.fail("target.nonlinearity", "needs one value per location");
    std::vector<double> dof(locations.size(), 7.0);
    if (const auto* v = doc.find("target.dof")) {
      if (std::holds_alternative<double>(v->data))
        std::fill(dof.begin(), dof.end(), doc.get_number("target.dof"));
      else
        dof = doc.get_number_list("target.dof");
      if (dof.size() != locations.size()) doc.fail("target.dof", "needs one value per location");
    }
    std::vector<double> weights = doc.has("target.weights")
                                      ? doc.get_number_list("target.weights")
                                      : std::vector<double>(locations.size(), 1.0 / static_cast<double>(locations.size()));
    std::vector<BananaComponent> comps;
    for (std::size_t k = 0; k < locations.size(); ++k) comps.push_back({locations[k], dof[k], b[k]});
    return with_key(doc, "target.locations",
                    [&] { return BenchmarkTarget(BananaTMixture(std::move(comps), weights)); });
  }
  doc.fail("target.type", "unknown target type '" + type + "' (expected gaussian_mixture or banana_t_mixture)");
}

long positive_integer(const ConfigDocument& doc, const std::string& key, long fallback, long minimum = 1) {
  const long v = doc.get_integer(key, fallback);
  if (v < minimum) doc.fail(key, "must be at least " + std::to_string(minimum));
  return v;
}

double positive_number(const ConfigDocument& doc, const std::string& key, double fallback) {
  const double v = doc.get_number(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) doc.fail(key, "must be positive");
  return v;
}

}  // namespace

ConfigDocument load_config_document(const std::string& path_or_preset) {
  ConfigDocument doc;
  if (fs::exists(path_or_preset) && fs::is_regular_file(path_or_preset)) {
    std::ifstream in(path_or_preset, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    doc = ConfigDocument::parse(buf.str(), path_or_preset);
  } else if (auto text = preset_text(path_or_preset)) {
    return ConfigDocument::parse(*text, "preset:" + path_or_preset);
  } else {
    throw ConfigError(path_or_preset, 0, "no such config file or preset");
  }
  if (doc.has("preset")) {
    const std::string name = doc.get_string("preset");
    const auto text = preset_text(name);
    if (!text) doc.fail("preset", "unknown preset '" + name + "'");
    ConfigDocument base = ConfigDocument::parse(*text, "preset:" + name);
    base.merge(doc);
    return base;
  }
  return doc;
}

RunConfig resolve_run_config(const ConfigDocument& doc) {
  for (const auto& [key, value] : doc.values())
    if (!known_keys().count(key)) doc.fail(key, "unknown key");

  RunConfig c;
  c.algorithm = with_key(doc, "algorithm", [&] { return algorithm_from_string(doc.get_string("algorithm", "bsvgd")); });
  c.seed = doc.get_unsigned("seed", 0);
  c.target = resolve_target(doc, c.target_preset);

  if (doc.get_string("kernel.type", "gaussian") != "gaussian")
    doc.fail("kernel.type", "only the gaussian kernel is available");
  c.kernel_bandwidth = positive_number(doc, "kernel.bandwidth", 1.0);

  c.max_iterations = positive_integer(doc, "svgd.max_iterations", 2000);
  c.threshold = positive_number(doc, "svgd.threshold", 1e-3);
  const std::string kind = doc.get_string("svgd.schedule.kind", "sigmoid");
  const double e_start = positive_number(doc, "svgd.schedule.e_start", 1.0);
  if (kind == "sigmoid") {
    const double e_end = positive_number(doc, "svgd.schedule.e_end", 0.01);
    c.schedule = with_key(doc, "svgd.schedule.e_end",
                          [&] { return StepSchedule::sigmoid(e_start, e_end, c.max_iterations); });
  } else if (kind == "constant") {
    c.schedule = StepSchedule::constant(e_start);
  } else {
    doc.fail("svgd.schedule.kind", "expected sigmoid or constant");
  }
  c.svgd_initial_count = positive_integer(doc, "svgd.initial.count", 500);
  c.svgd_initial_std = doc.get_number("svgd.initial.std", 1.0);
  if (!(c.svgd_initial_std >= 0.0)) doc.fail("svgd.initial.std", "must be non-negative");
  c.svgd_snapshot_every = positive_integer(doc, "svgd.snapshot_every", 20, 0);

  if (doc.has("branching.q_O") && !law_from(doc, "branching.q_O").is_point_mass_at(0))
    doc.fail("branching.q_O", "optimizers never branch; q_O must be [[0, 1]]");
  if (doc.has("branching.q_E")) c.q_explorer = law_from(doc, "branching.q_E");
  if (doc.has("branching.q_S")) c.q_spine = law_from(doc, "branching.q_S");
  if (c.q_spine.probability_of(0) > 0.0) doc.fail("branching.q_S", "the spine must have at least one offspring");
  c.proposal_std = positive_number(doc, "branching.proposal_std", 2.0);

  if (doc.get_string("bsvgd.precision", "one_over_ell") != "one_over_ell")
    doc.fail("bsvgd.precision", "only one_over_ell is available");
  c.bsvgd_initial_count = positive_integer(doc, "bsvgd.initial.count", 1);
  c.bsvgd_initial_std = doc.get_number("bsvgd.initial.std", 1.0);
  if (!(c.bsvgd_initial_std >= 0.0)) doc.fail("bsvgd.initial.std", "must be non-negative");
  c.max_population = positive_integer(doc, "bsvgd.max_population", 500);
  if (c.max_population < c.bsvgd_initial_count)
    doc.fail("bsvgd.max_population", "smaller than bsvgd.initial.count");
  c.final_refinement = doc.get_bool("bsvgd.final_refinement", true);
  c.bsvgd_snapshot_every = positive_integer(doc, "bsvgd.snapshot_every", 0, 0);

  c.metrics_enabled = doc.get_bool("metrics.enabled", true);
  c.replicates = static_cast<int>(positive_integer(doc, "metrics.replicates", 10));

  c.clock = with_key(doc, "output.clock", [&] { return clock_from_string(doc.get_string("output.clock", "wall")); });
  c.threads = static_cast<int>(positive_integer(doc, "run.threads", 0, 0));
  return c;
}

namespace {

std::string number(double v) { return format_double(v); }

std::string point_list(const Positions& cols) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < cols.cols(); ++i) {
    if (i) s += ", ";
    s += "[";
    for (Eigen::Index k = 0; k < cols.rows(); ++k) {
      if (k) s += ", ";
      s += number(cols(k, i));
    }
    s += "]";
  }
  return s + "]";
}

std::string number_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + number(v[i]);
  return s + "]";
}

std::string law_text(const IntegerLaw& law) {
  std::string s = "[";
  for (std::size_t i = 0; i < law.support().size(); ++i)
    s += (i ? ", [" : "[") + std::to_string(law.support()[i]) + ", " + number(law.probabilities()[i]) + "]";
  return s + "]";
}

}  // namespace

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "algorithm = \"" << to_string(c.algorithm) << "\"\n";
  o << "seed = " << c.seed << "\n\n[target]\n";
  if (const auto* g = std::get_if<GaussianMixture>(&c.target)) {
    if (!c.target_preset.empty()) {
      o << "preset = \"" << c.target_preset << "\"\n";
    } else {
      o << "type = \"gaussian_mixture\"\n";
      o << "means = " << point_list(g->means()) << "\n";
      o << "weights = "
        << number_list(std::vector<double>(g->weights().data(), g->weights().data() + g->weights().size())) << "\n";
    }
    o << "variance = " << number(g->variance()) << "\n";
  } else {
    const auto& b = std::get<BananaTMixture>(c.target);
    if (!c.target_preset.empty()) {
      o << "preset = \"" << c.target_preset << "\"\n";
      o << "dof = " << number(b.components().front().dof) << "\n";
    } else {
      Positions locs(b.dimension(), static_cast<Eigen::Index>(b.components().size()));
      std::vector<double> nl, dof;
      for (std::size_t k = 0; k < b.components().size(); ++k) {
        locs.col(static_cast<Eigen::Index>(k)) = b.components()[k].location;
        nl.push_back(b.components()[k].nonlinearity);
        dof.push_back(b.components()[k].dof);
      }
      o << "type = \"banana_t_mixture\"\n";
      o << "locations = " << point_list(locs) << "\n";
      o << "nonlinearity = " << number_list(nl) << "\n";
      o << "dof = " << number_list(dof) << "\n";
      o << "weights = "
        << number_list(std::vector<double>(b.weights().data(), b.weights().data() + b.weights().size())) << "\n";
    }
  }
  o << "\n[kernel]\ntype = \"gaussian\"\nbandwidth = " << number(c.kernel_bandwidth) << "\n";
  o << "\n[svgd]\nmax_iterations = " << c.max_iterations << "\nthreshold = " << number(c.threshold) << "\n";
  if (c.schedule.kind == StepSchedule::Kind::Sigmoid) {
    o << "schedule.kind = \"sigmoid\"\nschedule.e_start = " << number(c.schedule.e_start)
      << "\nschedule.e_end = " << number(c.schedule.e_end) << "\n";
  } else {
    o << "schedule.kind = \"constant\"\nschedule.e_start = " << number(c.schedule.e_start) << "\n";
  }
  o << "initial.count = " << c.svgd_initial_count << "\ninitial.std = " << number(c.svgd_initial_std)
    << "\nsnapshot_every = " << c.svgd_snapshot_every << "\n";
  o << "\n[branching]\nq_E = " << law_text(c.q_explorer) << "\nq_S = " << law_text(c.q_spine)
    << "\nproposal_std = " << number(c.proposal_std) << "\n";
  o << "\n[bsvgd]\nmax_population = " << c.max_population << "\nprecision = \"one_over_ell\"\ninitial.count = "
    << c.bsvgd_initial_count << "\ninitial.std = " << number(c.bsvgd_initial_std)
    << "\nfinal_refinement = " << (c.final_refinement ? "true" : "false")
    << "\nsnapshot_every = " << c.bsvgd_snapshot_every << "\n";
  o << "\n[metrics]\nenabled = " << (c.metrics_enabled ? "true" : "false") << "\nreplicates = " << c.replicates
    << "\n";
  o << "\n[output]\nclock = \"" << to_string(c.clock) << "\"\n";
  o << "\n[run]\nthreads = " << c.threads << "\n";
  return o.str();
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// execution

BsvgdTrace run_svgd_trace(const RunConfig& config) {
  const ScoreModel& model = config.model();
  const Eigen::Index d = model.dimension();
  SeededRng init = SeededRng(config.seed).derive(1);
  Positions x0(d, config.svgd_initial_count);
  for (long i = 0; i < config.svgd_initial_count; ++i) x0.col(i) = config.svgd_initial_std * init.normal_vector(d);
  const ParticleCloud cloud0(x0);
  const long level = config.svgd_initial_count;
  const double pair_work = static_cast<double>(level) * static_cast<double>(level);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  BsvgdTrace trace;
  long phase_index = 0;
  const long every = config.svgd_snapshot_every;
  auto time_at = [&](long iteration, double seconds) {
    return config.clock == ClockMode::Wall ? seconds : static_cast<double>(iteration) * pair_work * kWorkSecondsPerUnit;
  };
  IterationObserver observer;
  if (every > 0) {
    observer = [&](long iteration, const Positions& x, double seconds) {
      if (iteration % every != 0) return;
      trace.entries.push_back(TraceEntry{phase_index++, level, Phase::SvgdIteration, time_at(iteration, seconds),
                                         cloud0.with_positions(x), iteration, 0.0, config.threshold});
    };
  }
  SvgdRunReport report = svgd_iterate(x0, model, config.svgd_config(), observer);
  if (!trace.entries.empty() && trace.entries.back().svgd_iterations == report.iterations_used) {
    trace.entries.pop_back();
    --phase_index;
  }
  double total = 0.0;
  for (double s : report.iteration_seconds) total += s;
  trace.entries.push_back(TraceEntry{phase_index++, level, Phase::PostSvgd, time_at(report.iterations_used, total),
                                     cloud0.with_positions(std::move(report.final_positions)),
                                     report.iterations_used, report.final_displacement, config.threshold});
  trace.measured_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return trace;
}

RunResult execute_run(const RunConfig& config) {
  RunResult result;
  if (config.algorithm == Algorithm::Svgd) {
    result.trace = run_svgd_trace(config);
    const auto& last = result.trace.final_entry();
    result.svgd_iterations = last.svgd_iterations;
    result.svgd_converged = last.svgd_iterations < config.max_iterations;
  } else {
    BsvgdConfig bc;
    bc.svgd = config.svgd_config();
    bc.laws = config.offspring_laws();
    bc.max_population = config.max_population;
    SeededRng init = SeededRng(config.seed).derive(1);
    bc.initial_cloud =
        initial_spine_cloud(config.model().dimension(), config.bsvgd_initial_count, config.bsvgd_initial_std, init);
    bc.seed = SeededRng(config.seed).derive(2).seed();
    bc.final_refinement = config.final_refinement;
    bc.snapshot_every = config.bsvgd_snapshot_every;
    bc.clock = config.clock;
    result.trace = run_bsvgd(bc, config.model());
  }
  if (config.metrics_enabled) {
    SeededRng metrics_rng = SeededRng(config.seed).derive(3);
    result.metrics = trajectory_report(result.trace, make_target_sampler(config.target), config.replicates,
                                       metrics_rng, resolve_threads(config.threads));
  }
  return result;
}

// ---------------------------------------------------------------------------
// artifacts

namespace {

std::string snapshot_name(long phase_index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshots/phase_%06ld.csv", phase_index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

long parse_long(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v)) throw InvalidArgument("not an integer: '" + s + "'");
  return static_cast<long>(v);
}

}  // namespace

void write_trace_csv(std::ostream& out, const BsvgdTrace& trace) {
  out << "phase_index,level,phase,wall_time_s,sample_size,snapshot_file\n";
  for (const auto& e : trace.entries)
    out << e.phase_index << ',' << e.level << ',' << to_string(e.phase) << ',' << format_double(e.wall_time_s) << ','
        << e.sample_size() << ',' << snapshot_name(e.phase_index) << '\n';
}

void write_metrics_csv(std::ostream& out, const DistanceTrajectory& metrics) {
  const std::size_t reps = metrics.empty() ? 0 : metrics.front().replicates.size();
  out << "phase_index,wall_time_s,sample_size,w_mean";
  for (std::size_t a = 0; a < reps; ++a) out << ",w_rep_" << a;
  out << '\n';
  for (const auto& p : metrics) {
    out << p.phase_index << ',' << format_double(p.wall_time_s) << ',' << p.sample_size << ','
        << format_double(p.w_mean);
    for (double w : p.replicates) out << ',' << format_double(w);
    out << '\n';
  }
}

void write_run_outputs(const fs::path& dir, const RunConfig& config, const RunResult& result, double total_seconds) {
  fs::create_directories(dir / "snapshots");
  for (const auto& e : result.trace.entries) write_snapshot_csv(dir / snapshot_name(e.phase_index), e.snapshot);

  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, result.trace);
  write_text(dir / "trace.csv", trace_csv.str());

  if (config.metrics_enabled) {
    std::ostringstream metrics_csv;
    write_metrics_csv(metrics_csv, result.metrics);
    write_text(dir / "metrics.csv", metrics_csv.str());
  }

  const std::string config_text = to_config_text(config);
  const auto& last = result.trace.final_entry();
  nlohmann::ordered_json j;
  j["software"] = "bsvgd";
  j["version"] = BSVGD_VERSION;
  j["algorithm"] = to_string(config.algorithm);
  j["seed"] = config.seed;
  j["target_preset"] = config.target_preset;
  j["clock"] = to_string(config.clock);
  j["config_hash"] = fnv1a_hex(config_text);
  j["config_text"] = config_text;
  j["phases"] = result.trace.entries.size();
  j["final_sample_size"] = last.sample_size();
  j["algorithm_time_s"] = last.wall_time_s;
  j["measured_algorithm_seconds"] = result.trace.measured_seconds;
  j["total_wall_time_s"] = total_seconds;
  if (config.algorithm == Algorithm::Svgd) {
    j["svgd"] = {{"iterations_used", result.svgd_iterations},
                 {"converged", result.svgd_converged},
                 {"final_displacement", last.displacement},
                 {"convergence_time_s", last.wall_time_s}};
  }
  if (!result.metrics.empty()) {
    j["w_first"] = result.metrics.front().w_mean;
    j["w_final"] = result.metrics.back().w_mean;
  }
  write_text(dir / "run.json", j.dump(2) + "\n");
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  if (line != "phase_index,level,phase,wall_time_s,sample_size,snapshot_file")
    throw InvalidArgument(path.string() + ": unexpected trace header");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw InvalidArgument(path.string() + ": malformed trace row");
    rows.push_back({parse_long(f[0]), parse_long(f[1]), phase_from_string(f[2]), parse_double(f[3]), parse_long(f[4]),
                    f[5]});
  }
  return rows;
}

DistanceTrajectory read_metrics_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "phase_index" || header[1] != "wall_time_s" || header[2] != "sample_size" ||
      header[3] != "w_mean")
    throw InvalidArgument(path.string() + ": unexpected metrics header");
  DistanceTrajectory out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw InvalidArgument(path.string() + ": malformed metrics row");
    TrajectoryPoint p;
    p.phase_index = parse_long(f[0]);
    p.wall_time_s = parse_double(f[1]);
    p.sample_size = parse_long(f[2]);
    p.w_mean = parse_double(f[3]);
    for (std::size_t k = 4; k < f.size(); ++k) p.replicates.push_back(parse_double(f[k]));
    out.push_back(std::move(p));
  }
  return out;
}

ReportOutput build_report(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.empty()) throw InvalidArgument("report needs at least one run directory");
  struct Run {
    fs::path dir;
    nlohmann::json meta;
    DistanceTrajectory metrics;
  };
  std::vector<Run> runs;
  for (const auto& dir : run_dirs) {
    if (!fs::exists(dir / "metrics.csv")) throw InvalidArgument("missing metrics.csv in " + dir.string());
    if (!fs::exists(dir / "run.json")) throw InvalidArgument("missing run.json in " + dir.string());
    runs.push_back({dir, nlohmann::json::parse(read_text(dir / "run.json")), read_metrics_csv(dir / "metrics.csv")});
  }

  std::optional<double> marker;
  for (const auto& r : runs)
    if (r.meta.value("algorithm", "") == "svgd" && r.meta.contains("svgd")) {
      marker = r.meta["svgd"]["convergence_time_s"].get<double>();
      break;
    }

  std::ostringstream csv;
  csv << "run,algorithm,seed,phase_index,wall_time_s,sample_size,w_mean,svgd_convergence_s\n";
  nlohmann::ordered_json j;
  j["svgd_convergence_time_s"] = marker ? nlohmann::json(*marker) : nlohmann::json(nullptr);
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    const std::string algo = r.meta.value("algorithm", "");
    const auto seed = r.meta.value("seed", std::uint64_t{0});
    for (const auto& p : r.metrics) {
      csv << r.dir.string() << ',' << algo << ',' << seed << ',' << p.phase_index << ','
          << format_double(p.wall_time_s) << ',' << p.sample_size << ',' << format_double(p.w_mean) << ','
          << (marker ? format_double(*marker) : std::string()) << '\n';
    }
    nlohmann::ordered_json rj;
    rj["run"] = r.dir.string();
    rj["algorithm"] = algo;
    rj["seed"] = seed;
    rj["rows"] = r.metrics.size();
    if (!r.metrics.empty()) {
      rj["w_first"] = r.metrics.front().w_mean;
      rj["w_final"] = r.metrics.back().w_mean;
      rj["final_sample_size"] = r.metrics.back().sample_size;
      rj["final_wall_time_s"] = r.metrics.back().wall_time_s;
    }
    if (marker && algo == "bsvgd" && !r.metrics.empty()) {
      // last estimate available at the marker time; the first one if the run had not produced any yet
      const TrajectoryPoint* at = &r.metrics.front();
      for (const auto& p : r.metrics)
        if (p.wall_time_s <= *marker) at = &p;
      rj["w_at_svgd_convergence"] = at->w_mean;
      rj["sample_size_at_svgd_convergence"] = at->sample_size;
      rj["phase_at_svgd_convergence"] = at->phase_index;
    }
    j["runs"].push_back(std::move(rj));
  }
  return {csv.str(), j.dump(2) + "\n"};
}

// ---------------------------------------------------------------------------
// commands

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ConfigDocument doc = load_config_document(options.config);
    for (const auto& kv : options.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set", 0, "expected key=value, got '" + kv + "'");
      doc.set(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
    }
    if (options.seed) doc.set("seed", std::to_string(*options.seed), "--seed");
    if (options.algorithm) doc.set("algorithm", "\"" + *options.algorithm + "\"", "--algorithm");
    if (options.clock) doc.set("output.clock", "\"" + *options.clock + "\"", "--clock");
    RunConfig base = resolve_run_config(doc);
    if (options.snapshot_every) {
      if (*options.snapshot_every < 0) throw InvalidArgument("--snapshot-every must be non-negative");
      (base.algorithm == Algorithm::Svgd ? base.svgd_snapshot_every : base.bsvgd_snapshot_every) =
          *options.snapshot_every;
    }
    if (options.replicas < 1) throw InvalidArgument("--replicas must be at least 1");

    const fs::path out_dir = options.out;
    auto run_one = [](const RunConfig& cfg, const fs::path& dir) {
      const auto start = std::chrono::steady_clock::now();
      RunResult result = execute_run(cfg);
      const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_run_outputs(dir, cfg, result, total);
      return result;
    };

    if (options.replicas == 1) {
      const RunResult r = run_one(base, out_dir);
      out << to_string(base.algorithm) << ": " << r.trace.entries.size() << " phases, final sample size "
          << r.trace.final_entry().sample_size();
      if (!r.metrics.empty()) out << ", final W " << std::setprecision(6) << r.metrics.back().w_mean;
      out << " -> " << out_dir.string() << '\n';
      return kExitOk;
    }

    const int per_run_threads = std::max(1, resolve_threads(base.threads) / options.replicas);
    std::vector<int> codes(static_cast<std::size_t>(options.replicas), kExitOk);
    std::vector<std::string> messages(static_cast<std::size_t>(options.replicas));
    {
      std::vector<std::jthread> workers;
      for (int r = 0; r < options.replicas; ++r) {
        workers.emplace_back([&, r] {
          RunConfig cfg = base;
          cfg.seed = base.seed + static_cast<std::uint64_t>(r);
          cfg.threads = per_run_threads;
          char name[32];
          std::snprintf(name, sizeof name, "replica_%03d", r);
          std::ostringstream local_err;
          codes[static_cast<std::size_t>(r)] = guarded(local_err, [&] {
            run_one(cfg, out_dir / name);
            return kExitOk;
          });
          messages[static_cast<std::size_t>(r)] = local_err.str();
        });
      }
    }
    int worst = kExitOk;
    for (int r = 0; r < options.replicas; ++r) {
      err << messages[static_cast<std::size_t>(r)];
      worst = std::max(worst, codes[static_cast<std::size_t>(r)]);
    }
    out << options.replicas << " replicas -> " << out_dir.string() << '\n';
    return worst;
  });
}

int cmd_wasserstein(const std::string& file_a, const std::string& file_b, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ParticleCloud a = read_snapshot_csv(fs::path(file_a));
    const ParticleCloud b = read_snapshot_csv(fs::path(file_b));
    const double w = wasserstein2(a.positions(), b.positions());
    out << std::setprecision(12) << w << '\n';
    return kExitOk;
  });
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::optional<std::string>& out_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
    const ReportOutput report = build_report(dirs);
    if (out_dir) {
      fs::create_directories(*out_dir);
      write_text(fs::path(*out_dir) / "report.csv", report.csv);
      write_text(fs::path(*out_dir) / "report.json", report.json);
      out << "report -> " << *out_dir << '\n';
    } else {
      out << report.csv;
    }
    return kExitOk;
  });
}

int cmd_presets(const std::optional<std::string>& name, std::ostream& out, std::ostream& err) {
  if (name) {
    const auto text = preset_text(*name);
    if (!text) {
      err << "error: unknown preset '" << *name << "'\n";
      return kExitUsage;
    }
    out << *text;
    return kExitOk;
  }
  bool first = true;
  for (const auto& n : preset_names()) {
    if (!first) out << '\n';
    first = false;
    out << "# ===== preset: " << n << " =====\n" << *preset_text(n);
  }
  return kExitOk;
}

}  // namespace bsvgd
