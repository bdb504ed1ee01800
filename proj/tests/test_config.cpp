#include "bsvgd/config.hpp"
#include "bsvgd/experiment.hpp"
#include "bsvgd/presets.hpp"

#include <doctest.h>

#include <fstream>

using namespace bsvgd;

namespace {
int error_line(const std::string& text) {
  try {
    resolve_run_config(ConfigDocument::parse(text, "t.toml"));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("parser handles sections, dotted keys, comments and arrays") {
  const auto doc = ConfigDocument::parse(R"(# header comment
seed = 18446744073709551615
name = "a # not a comment"
bare = gaussian
[svgd]
schedule.kind = "sigmoid"   # trailing
threshold = 1e-3
flag = false
[branching]
q_E = [
  [0, 0.5],  # multi-line
  [1, 0.5],
]
)",
                                         "x.toml");
  CHECK(doc.get_unsigned("seed", 0) == 18446744073709551615ULL);
  CHECK(doc.get_string("name") == "a # not a comment");
  CHECK(doc.get_string("bare") == "gaussian");
  CHECK(doc.get_string("svgd.schedule.kind") == "sigmoid");
  CHECK(doc.get_number("svgd.threshold") == 1e-3);
  CHECK_FALSE(doc.get_bool("svgd.flag", true));
  const auto m = doc.get_matrix("branching.q_E");
  REQUIRE(m.size() == 2);
  CHECK(m[1] == std::vector<double>{1, 0.5});
  CHECK(doc.find("branching.q_E")->line == 10);
  CHECK(doc.get_number("missing", 4.5) == 4.5);
}

TEST_CASE("parser errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      ConfigDocument::parse(text, "p.toml");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).rfind("p.toml:", 0) == 0);
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("a = 1\nb = \n") == 2);
  CHECK(line_of("a = 1\n[bad\n") == 2);
  CHECK(line_of("a = 1\na = 2\n") == 2);
  CHECK(line_of("x = [1, 2\n\n") >= 1);
  CHECK(line_of("x = \"open\n") == 1);
  CHECK(line_of("just words\n") == 1);
}

TEST_CASE("typed getters reject the wrong type") {
  const auto doc = ConfigDocument::parse("a = \"s\"\nb = 1.5\nc = [1, \"x\"]\n");
  CHECK_THROWS_AS(doc.get_number("a"), ConfigError);
  CHECK_THROWS_AS(doc.get_integer("b"), ConfigError);
  CHECK_THROWS_AS(doc.get_string("b"), ConfigError);
  CHECK_THROWS_AS(doc.get_number_list("c"), ConfigError);
  CHECK_THROWS_AS(doc.get_number("nope"), ConfigError);
}

TEST_CASE("set and merge override keys") {
  auto doc = ConfigDocument::parse("seed = 1\n[svgd]\nthreshold = 0.1\n");
  doc.set("seed", "7");
  CHECK(doc.get_integer("seed") == 7);
  CHECK_THROWS_AS(doc.set("seed", "[1,"), ConfigError);
  auto other = ConfigDocument::parse("[svgd]\nthreshold = 0.5\n");
  doc.merge(other);
  CHECK(doc.get_number("svgd.threshold") == 0.5);
}

TEST_CASE("presets resolve to the documented defaults") {
  CHECK(preset_names() == std::vector<std::string>{"paper-gauss25", "paper-banana3"});
  CHECK_FALSE(preset_text("nope").has_value());

  const RunConfig g = resolve_run_config(load_config_document("paper-gauss25"));
  CHECK(g.algorithm == Algorithm::Bsvgd);
  CHECK(g.target_preset == "paper-gauss25");
  CHECK(std::get<GaussianMixture>(g.target).components() == 25);
  CHECK(g.kernel_bandwidth == 1.0);
  CHECK(g.schedule.kind == StepSchedule::Kind::Sigmoid);
  CHECK(g.schedule.e_start == 1.0);
  CHECK(g.schedule.e_end == 0.01);
  CHECK(g.proposal_std == 2.0);
  CHECK(g.replicates == 10);
  CHECK(g.max_population == 500);
  CHECK(g.svgd_initial_count == 500);
  CHECK(g.q_explorer == IntegerLaw({0, 1, 2}, {0.5, 0.2, 0.3}));
  CHECK(g.q_spine.mean() == doctest::Approx(2.0));

  const RunConfig b = resolve_run_config(load_config_document("paper-banana3"));
  CHECK(std::get<BananaTMixture>(b.target).components().size() == 3);
  CHECK(b.schedule.e_start == 10.0);
  CHECK(b.schedule.e_end == 1.0);
  CHECK(b.proposal_std == 5.0);
}

TEST_CASE("resolved configs round-trip through their text") {
  for (const auto& name : preset_names()) {
    const RunConfig a = resolve_run_config(load_config_document(name));
    const std::string text = to_config_text(a);
    const RunConfig b = resolve_run_config(ConfigDocument::parse(text));
    CHECK(to_config_text(b) == text);
  }
  auto doc = ConfigDocument::parse(R"(
algorithm = "svgd"
seed = 3
[target]
type = "banana_t_mixture"
locations = [[0, 0], [1, 2]]
nonlinearity = [0.03, 0.01]
dof = [5, 9]
weights = [0.25, 0.75]
[svgd]
schedule.kind = "constant"
schedule.e_start = 0.2
)");
  const RunConfig c = resolve_run_config(doc);
  CHECK(c.schedule.kind == StepSchedule::Kind::Constant);
  const std::string text = to_config_text(c);
  CHECK(to_config_text(resolve_run_config(ConfigDocument::parse(text))) == text);
  CHECK(fnv1a_hex(text) == fnv1a_hex(text));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("inline gaussian target") {
  const RunConfig c = resolve_run_config(ConfigDocument::parse(R"(
[target]
type = "gaussian_mixture"
means = [[0, 0, 0], [1, 1, 1]]
variance = 2
)"));
  const auto& g = std::get<GaussianMixture>(c.target);
  CHECK(g.dimension() == 3);
  CHECK(g.weights()(0) == 0.5);
}

TEST_CASE("semantic errors point at the offending line") {
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\nbogus = 1\n") == 3);
  CHECK(error_line("[target]\npreset = \"paper-gauss99\"\n") == 2);
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\n[kernel]\ntype = \"laplace\"\n") == 4);
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\n[svgd]\nthreshold = -1\n") == 4);
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\n[branching]\nq_S = [[0, 0.5], [1, 0.5]]\n") == 4);
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\n[branching]\nq_E = [[0, 0.5], [1, 0.4]]\n") == 4);
  CHECK(error_line("[target]\npreset = \"paper-gauss25\"\n[branching]\nq_O = [[1, 1]]\n") == 4);
  CHECK(error_line("[target]\ntype = \"gaussian_mixture\"\nmeans = [[0, 0]]\nvariance = 1\nweights = [0.5]\n") > 0);
  CHECK(error_line("algorithm = \"mcmc\"\n") == 1);
  CHECK(error_line("[output]\nclock = \"sundial\"\n[target]\npreset = \"paper-gauss25\"\n") == 2);
  CHECK(error_line("[bsvgd]\nprecision = \"one_over_sqrt\"\n[target]\npreset = \"paper-gauss25\"\n") == 2);
  CHECK(error_line("[target]\ntype = \"banana_t_mixture\"\nlocations = [[0, 0]]\nnonlinearity = [0.1, 0.2]\n") == 4);
}

TEST_CASE("config files layer over a preset") {
  const auto path = std::filesystem::temp_directory_path() / "bsvgd_layer_test.toml";
  {
    std::ofstream out(path);
    out << "preset = \"paper-banana3\"\nalgorithm = \"svgd\"\n[svgd]\ninitial.count = 17\n";
  }
  const RunConfig c = resolve_run_config(load_config_document(path.string()));
  CHECK(c.algorithm == Algorithm::Svgd);
  CHECK(c.svgd_initial_count == 17);
  CHECK(c.proposal_std == 5.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_document("/no/such/file.toml"), ConfigError);
}
